use crate::circuit::{ArithmeticCircuit, CircuitBuilder};
use crate::field::PrimeField;

use super::{AppError, AppSpec};

/// `C = A · B` for `n x n` matrices.
///
/// Inputs: `A` then `B`, each row-major. Outputs: `C`, row-major. Uses `n³`
/// multiplication gates.
pub fn build_matmul(field: PrimeField, n: usize) -> Result<ArithmeticCircuit, AppError> {
    AppSpec::Matmul { n }.validate(field)?;
    let mut b = CircuitBuilder::new(field, 2 * n * n, n * n, 0);
    let a: Vec<_> = (0..n * n).map(|x| b.public_input(x)).collect();
    let m: Vec<_> = (n * n..2 * n * n).map(|x| b.public_input(x)).collect();
    for i in 0..n {
        for j in 0..n {
            let terms: Vec<_> = (0..n).map(|k| b.mul(a[i * n + k], m[k * n + j])).collect();
            let c = b.sum(&terms);
            b.set_output(i * n + j, c);
        }
    }
    Ok(b.finish()?)
}

/// Naive triple loop over the field.
pub fn matmul_reference(field: PrimeField, n: usize, inputs: &[u64]) -> Vec<u64> {
    let (a, m) = inputs.split_at(n * n);
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = field.zero();
            for k in 0..n {
                acc += field.element(a[i * n + k]) * field.element(m[k * n + j]);
            }
            out.push(acc.value());
        }
    }
    out
}
