//! TOML app input files.
//!
//! ```toml
//! app = "matmul"          # matmul | image_match | multipoly | floyd_warshall
//! modulus = 2305843009213693951   # optional, defaults to 2^61 - 1
//! n = 2
//! a = [1, 2, 3, 4]        # row-major
//! b = [5, 6, 7, 8]
//! ```
//!
//! Fields per app:
//!
//! | app              | parameters                                                     | arrays                  |
//! |------------------|----------------------------------------------------------------|-------------------------|
//! | `matmul`         | `n`                                                            | `a`, `b`                |
//! | `image_match`    | `width`, `height`, `kernel_width`, `kernel_height`, `bitwidth`? | `image`, `kernel`       |
//! | `multipoly`      | `degree`, `vars`                                               | `coefficients`, `point` |
//! | `floyd_warshall` | `n`, `bitwidth`?                                               | `weights`               |
//!
//! `bitwidth` defaults to 8 for images and 16 for graphs.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{FieldError, PrimeField};

use super::{AppError, AppSpec, DEFAULT_PIXEL_BITS, DEFAULT_WEIGHT_BITS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InputError {
    #[error("cannot parse app input: {0}")]
    Parse(String),
    #[error("bad modulus: {0}")]
    Field(#[from] FieldError),
    #[error(transparent)]
    App(#[from] AppError),
}

fn pixel_bits() -> u32 {
    DEFAULT_PIXEL_BITS
}

fn weight_bits() -> u32 {
    DEFAULT_WEIGHT_BITS
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "app", rename_all = "snake_case")]
pub enum AppData {
    Matmul {
        n: usize,
        a: Vec<u64>,
        b: Vec<u64>,
    },
    ImageMatch {
        width: usize,
        height: usize,
        kernel_width: usize,
        kernel_height: usize,
        #[serde(default = "pixel_bits")]
        bitwidth: u32,
        image: Vec<u64>,
        kernel: Vec<u64>,
    },
    Multipoly {
        degree: usize,
        vars: usize,
        coefficients: Vec<u64>,
        point: Vec<u64>,
    },
    FloydWarshall {
        n: usize,
        #[serde(default = "weight_bits")]
        bitwidth: u32,
        weights: Vec<u64>,
    },
}

/// A parsed input file: which app, its parameters, and its input values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AppInput {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<u64>,
    #[serde(flatten)]
    pub data: AppData,
}

impl AppInput {
    /// Packs a flat input vector (in circuit order) for `spec`.
    pub fn new(spec: AppSpec, modulus: Option<u64>, inputs: &[u64]) -> Result<Self, InputError> {
        let expected = spec.num_inputs().unwrap_or(usize::MAX);
        if inputs.len() != expected {
            return Err(AppError::InputLength {
                expected,
                got: inputs.len(),
            }
            .into());
        }
        let data = match spec {
            AppSpec::Matmul { n } => {
                let (a, b) = inputs.split_at(n * n);
                AppData::Matmul {
                    n,
                    a: a.to_vec(),
                    b: b.to_vec(),
                }
            }
            AppSpec::ImageMatch {
                width,
                height,
                kernel_width,
                kernel_height,
                bitwidth,
            } => {
                let (image, kernel) = inputs.split_at(width * height);
                AppData::ImageMatch {
                    width,
                    height,
                    kernel_width,
                    kernel_height,
                    bitwidth,
                    image: image.to_vec(),
                    kernel: kernel.to_vec(),
                }
            }
            AppSpec::Multipoly { degree, vars } => {
                let (c, p) = inputs.split_at(inputs.len() - vars);
                AppData::Multipoly {
                    degree,
                    vars,
                    coefficients: c.to_vec(),
                    point: p.to_vec(),
                }
            }
            AppSpec::FloydWarshall { n, bitwidth } => AppData::FloydWarshall {
                n,
                bitwidth,
                weights: inputs.to_vec(),
            },
        };
        Ok(AppInput { modulus, data })
    }

    pub fn parse(text: &str) -> Result<Self, InputError> {
        toml::from_str(text).map_err(|e| InputError::Parse(e.message().to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("app inputs always serialize")
    }

    pub fn field(&self) -> Result<PrimeField, InputError> {
        Ok(match self.modulus {
            Some(p) => PrimeField::new(p)?,
            None => PrimeField::default(),
        })
    }

    pub fn spec(&self) -> AppSpec {
        match self.data {
            AppData::Matmul { n, .. } => AppSpec::Matmul { n },
            AppData::ImageMatch {
                width,
                height,
                kernel_width,
                kernel_height,
                bitwidth,
                ..
            } => AppSpec::ImageMatch {
                width,
                height,
                kernel_width,
                kernel_height,
                bitwidth,
            },
            AppData::Multipoly { degree, vars, .. } => AppSpec::Multipoly { degree, vars },
            AppData::FloydWarshall { n, bitwidth, .. } => AppSpec::FloydWarshall { n, bitwidth },
        }
    }

    /// All input values in circuit order.
    pub fn inputs(&self) -> Vec<u64> {
        match &self.data {
            AppData::Matmul { a, b, .. } => [a.as_slice(), b].concat(),
            AppData::ImageMatch { image, kernel, .. } => [image.as_slice(), kernel].concat(),
            AppData::Multipoly {
                coefficients,
                point,
                ..
            } => [coefficients.as_slice(), point].concat(),
            AppData::FloydWarshall { weights, .. } => weights.clone(),
        }
    }

    /// Checks the field, the parameters and every input value.
    pub fn validate(&self) -> Result<(), InputError> {
        let field = self.field()?;
        self.spec().validate(field)?;
        let arrays: Vec<(usize, usize)> = match &self.data {
            AppData::Matmul { n, a, b } => vec![(n * n, a.len()), (n * n, b.len())],
            AppData::ImageMatch {
                width,
                height,
                kernel_width,
                kernel_height,
                image,
                kernel,
                ..
            } => vec![
                (width * height, image.len()),
                (kernel_width * kernel_height, kernel.len()),
            ],
            AppData::Multipoly { vars, point, .. } => vec![(*vars, point.len())],
            AppData::FloydWarshall { .. } => Vec::new(),
        };
        if let Some(&(expected, got)) = arrays.iter().find(|(e, g)| e != g) {
            return Err(AppError::InputLength { expected, got }.into());
        }
        self.spec().validate_inputs(field, &self.inputs())?;
        Ok(())
    }
}
