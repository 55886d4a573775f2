//! The four benchmark applications: circuit builders, plain reference
//! implementations with the same output layout, and input generators.
//!
//! Every app takes all of its inputs as public inputs, in the order listed on
//! each builder, and exposes its results as public outputs.

mod floyd;
mod image;
mod input;
mod matmul;
mod multipoly;

use rand::Rng;
use thiserror::Error;

use crate::circuit::{ArithmeticCircuit, CircuitError};
use crate::field::PrimeField;

pub use floyd::{build_floyd_warshall, floyd_warshall_reference, infinity};
pub use image::{build_image_match, image_match_reference, score_width};
pub use input::{AppData, AppInput, InputError};
pub use matmul::{build_matmul, matmul_reference};
pub use multipoly::{build_multipoly, multipoly_reference};

/// Bit width of image pixels when an input file does not say otherwise.
pub const DEFAULT_PIXEL_BITS: u32 = 8;
/// Floyd-Warshall weight bit width when an input file does not say otherwise.
pub const DEFAULT_WEIGHT_BITS: u32 = 16;

/// Largest number of public inputs a builder will accept.
pub const MAX_INPUTS: usize = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AppError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("kernel {kernel_width}x{kernel_height} does not fit in image {width}x{height}")]
    KernelLargerThanImage {
        width: usize,
        height: usize,
        kernel_width: usize,
        kernel_height: usize,
    },
    #[error("expected {expected} input values, got {got}")]
    InputLength { expected: usize, got: usize },
    #[error("pixel {index} = {value} does not fit in {bits} bits")]
    PixelOutOfRange { index: usize, value: u64, bits: u32 },
    #[error("weight d[{row}][{col}] = {value} is out of range")]
    WeightOutOfRange { row: usize, col: usize, value: u64 },
    #[error("input {index} = {value} is not a field element")]
    NotAFieldElement { index: usize, value: u64 },
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

/// Application and size parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AppSpec {
    /// Product of two `n x n` matrices.
    Matmul { n: usize },
    /// Position and score of the best placement of a kernel over an image,
    /// by sum of squared differences.
    ImageMatch {
        width: usize,
        height: usize,
        kernel_width: usize,
        kernel_height: usize,
        bitwidth: u32,
    },
    /// A `vars`-variate polynomial with degree at most `degree` in each
    /// variable.
    Multipoly { degree: usize, vars: usize },
    /// All-pairs shortest paths on `n` vertices.
    FloydWarshall { n: usize, bitwidth: u32 },
}

impl AppSpec {
    pub fn matmul(n: usize) -> Self {
        AppSpec::Matmul { n }
    }

    /// Square image and kernel with the default pixel width.
    pub fn image_match(image: usize, kernel: usize) -> Self {
        AppSpec::ImageMatch {
            width: image,
            height: image,
            kernel_width: kernel,
            kernel_height: kernel,
            bitwidth: DEFAULT_PIXEL_BITS,
        }
    }

    pub fn multipoly(degree: usize, vars: usize) -> Self {
        AppSpec::Multipoly { degree, vars }
    }

    pub fn floyd_warshall(n: usize) -> Self {
        AppSpec::FloydWarshall {
            n,
            bitwidth: DEFAULT_WEIGHT_BITS,
        }
    }

    /// matmul 8, image 16x16 with a 3x3 kernel, multipoly m=2 k=3,
    /// Floyd-Warshall on 6 vertices.
    pub fn desk_suite() -> [AppSpec; 4] {
        [
            AppSpec::matmul(8),
            AppSpec::image_match(16, 3),
            AppSpec::multipoly(2, 3),
            AppSpec::floyd_warshall(6),
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            AppSpec::Matmul { .. } => "matmul",
            AppSpec::ImageMatch { .. } => "image_match",
            AppSpec::Multipoly { .. } => "multipoly",
            AppSpec::FloydWarshall { .. } => "floyd_warshall",
        }
    }

    /// Short size label such as `8x8` or `16x16/3x3`.
    pub fn size_label(&self) -> String {
        match *self {
            AppSpec::Matmul { n } => format!("{n}x{n}"),
            AppSpec::ImageMatch {
                width,
                height,
                kernel_width,
                kernel_height,
                ..
            } => format!("{width}x{height}/{kernel_width}x{kernel_height}"),
            AppSpec::Multipoly { degree, vars } => format!("m{degree}k{vars}"),
            AppSpec::FloydWarshall { n, .. } => format!("{n}x{n}"),
        }
    }

    /// Builds a spec from an app name and named parameters.
    ///
    /// Images accept `width`/`height` or a square `image`, and
    /// `kernel_width`/`kernel_height` or a square `kernel`. `bitwidth` is
    /// optional for images and graphs.
    pub fn from_params(app: &str, param: impl Fn(&str) -> Option<u64>) -> Result<Self, AppError> {
        let get = |key: &str| {
            param(key)
                .ok_or_else(|| AppError::InvalidParameters(format!("missing parameter `{key}`")))
        };
        let either = |key: &str, square: &str| match param(key) {
            Some(v) => Ok(v),
            None => get(square),
        };
        let size = |v: u64| {
            usize::try_from(v).map_err(|_| AppError::InvalidParameters(format!("{v} is too large")))
        };
        let bits = |default: u32| -> Result<u32, AppError> {
            param("bitwidth").map_or(Ok(default), |v| {
                u32::try_from(v).map_err(|_| AppError::InvalidParameters(format!("bitwidth {v}")))
            })
        };
        Ok(match app {
            "matmul" => AppSpec::Matmul {
                n: size(get("n")?)?,
            },
            "image_match" => AppSpec::ImageMatch {
                width: size(either("width", "image")?)?,
                height: size(either("height", "image")?)?,
                kernel_width: size(either("kernel_width", "kernel")?)?,
                kernel_height: size(either("kernel_height", "kernel")?)?,
                bitwidth: bits(DEFAULT_PIXEL_BITS)?,
            },
            "multipoly" => AppSpec::Multipoly {
                degree: size(get("degree")?)?,
                vars: size(get("vars")?)?,
            },
            "floyd_warshall" => AppSpec::FloydWarshall {
                n: size(get("n")?)?,
                bitwidth: bits(DEFAULT_WEIGHT_BITS)?,
            },
            other => {
                return Err(AppError::InvalidParameters(format!(
                    "unknown app `{other}`"
                )))
            }
        })
    }

    /// Number of public inputs; `None` if it overflows.
    pub fn num_inputs(&self) -> Option<usize> {
        match *self {
            AppSpec::Matmul { n } => n.checked_mul(n)?.checked_mul(2),
            AppSpec::ImageMatch {
                width,
                height,
                kernel_width,
                kernel_height,
                ..
            } => width
                .checked_mul(height)?
                .checked_add(kernel_width.checked_mul(kernel_height)?),
            AppSpec::Multipoly { degree, vars } => {
                multipoly::coefficient_count(degree, vars)?.checked_add(vars)
            }
            AppSpec::FloydWarshall { n, .. } => n.checked_mul(n),
        }
    }

    pub fn num_outputs(&self) -> usize {
        match *self {
            AppSpec::Matmul { n } => n * n,
            AppSpec::ImageMatch { .. } => 3,
            AppSpec::Multipoly { .. } => 1,
            AppSpec::FloydWarshall { n, .. } => n * n,
        }
    }

    /// Checks the parameters against the builder preconditions for `field`.
    pub fn validate(&self, field: PrimeField) -> Result<(), AppError> {
        let bad = |msg: String| Err(AppError::InvalidParameters(msg));
        match *self {
            AppSpec::Matmul { n: 0 } => return bad("matrix size must be positive".into()),
            AppSpec::ImageMatch {
                width,
                height,
                kernel_width,
                kernel_height,
                bitwidth,
            } => {
                if width == 0 || height == 0 || kernel_width == 0 || kernel_height == 0 {
                    return bad("image and kernel dimensions must be positive".into());
                }
                if kernel_width > width || kernel_height > height {
                    return Err(AppError::KernelLargerThanImage {
                        width,
                        height,
                        kernel_width,
                        kernel_height,
                    });
                }
                if bitwidth == 0 {
                    return bad("pixel bit width must be positive".into());
                }
                let sw = score_width(kernel_width, kernel_height, bitwidth);
                if sw + 1 > field.max_bit_width() {
                    return bad(format!(
                        "scores need {sw} bits, the field allows comparisons up to {} bits",
                        field.max_bit_width() - 1
                    ));
                }
            }
            AppSpec::Multipoly { degree, vars } => {
                if vars == 0 {
                    return bad("need at least one variable".into());
                }
                if degree == 0 {
                    return bad("degree must be positive".into());
                }
            }
            AppSpec::FloydWarshall { n, bitwidth } => {
                if n == 0 {
                    return bad("graph needs at least one vertex".into());
                }
                if bitwidth < 2 || bitwidth + 1 > field.max_bit_width() {
                    return bad(format!(
                        "weight bit width must be in 2..={}",
                        field.max_bit_width() - 1
                    ));
                }
            }
            _ => {}
        }
        match self.num_inputs() {
            Some(k) if k <= MAX_INPUTS => Ok(()),
            _ => bad(format!("more than {MAX_INPUTS} inputs")),
        }
    }

    /// Checks an input vector: length, field range and per-app value bounds.
    pub fn validate_inputs(&self, field: PrimeField, inputs: &[u64]) -> Result<(), AppError> {
        self.validate(field)?;
        let expected = self.num_inputs().expect("validated");
        if inputs.len() != expected {
            return Err(AppError::InputLength {
                expected,
                got: inputs.len(),
            });
        }
        if let Some((index, &value)) = inputs
            .iter()
            .enumerate()
            .find(|(_, &v)| v >= field.modulus())
        {
            return Err(AppError::NotAFieldElement { index, value });
        }
        match *self {
            AppSpec::ImageMatch { bitwidth, .. } => {
                if let Some((index, &value)) =
                    inputs.iter().enumerate().find(|(_, &v)| v >> bitwidth != 0)
                {
                    return Err(AppError::PixelOutOfRange {
                        index,
                        value,
                        bits: bitwidth,
                    });
                }
            }
            AppSpec::FloydWarshall { n, bitwidth } => floyd::check_weights(n, bitwidth, inputs)?,
            _ => {}
        }
        Ok(())
    }

    /// Builds the circuit for these parameters.
    pub fn build(&self, field: PrimeField) -> Result<ArithmeticCircuit, AppError> {
        match *self {
            AppSpec::Matmul { n } => build_matmul(field, n),
            AppSpec::ImageMatch {
                width,
                height,
                kernel_width,
                kernel_height,
                bitwidth,
            } => build_image_match(field, width, height, kernel_width, kernel_height, bitwidth),
            AppSpec::Multipoly { degree, vars } => build_multipoly(field, degree, vars),
            AppSpec::FloydWarshall { n, bitwidth } => build_floyd_warshall(field, n, bitwidth),
        }
    }

    /// Random valid inputs. Arithmetic apps draw from the whole field;
    /// image pixels and graph weights respect their bit widths, and about a
    /// quarter of the graph's edges are missing.
    pub fn random_inputs<R: Rng + ?Sized>(&self, field: PrimeField, rng: &mut R) -> Vec<u64> {
        let k = self.num_inputs().expect("parameters checked by caller");
        match *self {
            AppSpec::ImageMatch { bitwidth, .. } => (0..k)
                .map(|_| rng.random_range(0..1u64 << bitwidth))
                .collect(),
            AppSpec::FloydWarshall { n, bitwidth } => {
                let inf = infinity(bitwidth);
                let max = 1u64 << (bitwidth - 2);
                (0..k)
                    .map(|idx| {
                        if idx / n == idx % n {
                            0
                        } else if rng.random_bool(0.25) {
                            inf
                        } else {
                            rng.random_range(0..max)
                        }
                    })
                    .collect()
            }
            _ => (0..k).map(|_| field.random(rng).value()).collect(),
        }
    }
}

/// Plain-integer implementation of `spec`, with outputs in the circuit's
/// output order and reduced into `field`.
pub fn run_reference(
    spec: &AppSpec,
    field: PrimeField,
    inputs: &[u64],
) -> Result<Vec<u64>, AppError> {
    spec.validate_inputs(field, inputs)?;
    Ok(match *spec {
        AppSpec::Matmul { n } => matmul_reference(field, n, inputs),
        AppSpec::ImageMatch {
            width,
            height,
            kernel_width,
            kernel_height,
            ..
        } => image_match_reference(width, height, kernel_width, kernel_height, inputs).to_vec(),
        AppSpec::Multipoly { degree, vars } => {
            vec![multipoly_reference(field, degree, vars, inputs)]
        }
        AppSpec::FloydWarshall { n, .. } => floyd_warshall_reference(n, inputs),
    })
}

/// Evaluates an app circuit on `inputs` and returns its public
/// outputs as integers.
pub fn run_circuit(circuit: &ArithmeticCircuit, inputs: &[u64]) -> Result<Vec<u64>, AppError> {
    let w = circuit.evaluate_u64(inputs, &[])?;
    Ok(circuit
        .public_output_wires()
        .map(|o| w.get(o).value())
        .collect())
}
