use crate::circuit::gadgets::{less_than, select};
use crate::circuit::{ArithmeticCircuit, CircuitBuilder, Wire};
use crate::field::PrimeField;

use super::{AppError, AppSpec};

/// Bits needed for a sum of squared differences over a `kw x kh` window of
/// `bits`-bit pixels: `2 * bits + ceil(log2(kw * kh))`.
pub fn score_width(kernel_width: usize, kernel_height: usize, bits: u32) -> u32 {
    let cells = (kernel_width * kernel_height).max(1);
    let extra = usize::BITS - (cells - 1).leading_zeros();
    bits.saturating_mul(2).saturating_add(extra)
}

/// Best placement of a `kernel_width x kernel_height` kernel inside a
/// `width x height` image by sum of squared differences.
///
/// Inputs: the image (`height` rows of `width` pixels) then the kernel, both
/// row-major. Outputs: `(row, col, score)` of the placement with the lowest
/// score. Placements are scanned row-major and only a strictly smaller score
/// replaces the current best, so ties go to the first placement.
pub fn build_image_match(
    field: PrimeField,
    width: usize,
    height: usize,
    kernel_width: usize,
    kernel_height: usize,
    bitwidth: u32,
) -> Result<ArithmeticCircuit, AppError> {
    let spec = AppSpec::ImageMatch {
        width,
        height,
        kernel_width,
        kernel_height,
        bitwidth,
    };
    spec.validate(field)?;
    let sw = score_width(kernel_width, kernel_height, bitwidth);
    let mut b = CircuitBuilder::new(field, spec.num_inputs().unwrap(), 3, 0);
    let pixel = |r: usize, c: usize| Wire(1 + r * width + c);
    let kbase = 1 + width * height;
    let kernel = |r: usize, c: usize| Wire(kbase + r * kernel_width + c);

    let mut best: Option<(Wire, Wire, Wire)> = None;
    for row in 0..=height - kernel_height {
        for col in 0..=width - kernel_width {
            let mut squares = Vec::with_capacity(kernel_width * kernel_height);
            for i in 0..kernel_height {
                for j in 0..kernel_width {
                    let d = b.sub(pixel(row + i, col + j), kernel(i, j));
                    squares.push(b.mul(d, d));
                }
            }
            let score = b.sum(&squares);
            best = Some(match best {
                None => {
                    let zero_r = b.constant(0);
                    let zero_c = b.constant(0);
                    (zero_r, zero_c, score)
                }
                Some((br, bc, bs)) => {
                    let better = less_than(&mut b, score, bs, sw)?;
                    let r = b.constant(row as u64);
                    let c = b.constant(col as u64);
                    (
                        select(&mut b, better, r, br),
                        select(&mut b, better, c, bc),
                        select(&mut b, better, score, bs),
                    )
                }
            });
        }
    }
    let (r, c, s) = best.expect("at least one placement");
    b.set_output(0, r);
    b.set_output(1, c);
    b.set_output(2, s);
    Ok(b.finish()?)
}

/// Exhaustive scan with the same tie-break as the circuit.
pub fn image_match_reference(
    width: usize,
    height: usize,
    kernel_width: usize,
    kernel_height: usize,
    inputs: &[u64],
) -> [u64; 3] {
    let (image, kernel) = inputs.split_at(width * height);
    let mut best = (0, 0, u64::MAX);
    for row in 0..=height - kernel_height {
        for col in 0..=width - kernel_width {
            let mut score = 0u64;
            for i in 0..kernel_height {
                for j in 0..kernel_width {
                    let d =
                        image[(row + i) * width + col + j].abs_diff(kernel[i * kernel_width + j]);
                    score += d * d;
                }
            }
            if score < best.2 {
                best = (row as u64, col as u64, score);
            }
        }
    }
    [best.0, best.1, best.2]
}
