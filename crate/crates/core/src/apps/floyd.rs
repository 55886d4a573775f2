use crate::circuit::gadgets::min;
use crate::circuit::{ArithmeticCircuit, CircuitBuilder, Wire};
use crate::field::PrimeField;

use super::{AppError, AppSpec};

/// The "no edge" sentinel for `bitwidth`-bit weights: `2^(bitwidth-1) - 1`.
pub fn infinity(bitwidth: u32) -> u64 {
    (1u64 << (bitwidth - 1)) - 1
}

pub(super) fn check_weights(n: usize, bitwidth: u32, weights: &[u64]) -> Result<(), AppError> {
    let inf = infinity(bitwidth);
    let limit = 1u64 << (bitwidth - 2);
    for (idx, &value) in weights.iter().enumerate() {
        let (row, col) = (idx / n, idx % n);
        let ok = if row == col {
            value == 0
        } else {
            value < limit || value == inf
        };
        if !ok {
            return Err(AppError::WeightOutOfRange { row, col, value });
        }
    }
    Ok(())
}

/// All-pairs shortest paths.
///
/// Inputs: the `n x n` weight matrix, row-major, with zero diagonal. Edge
/// weights must be below `2^(bitwidth-2)`; [`infinity`] marks a missing edge.
/// Outputs: the distance matrix, row-major.
///
/// Each of the `n³` relaxation steps is one min gadget at `bitwidth` bits.
/// Every distance stays at or below the sentinel, so sums of two distances
/// fit in `bitwidth` bits and unreachable pairs, as well as paths longer
/// than the sentinel, report [`infinity`].
pub fn build_floyd_warshall(
    field: PrimeField,
    n: usize,
    bitwidth: u32,
) -> Result<ArithmeticCircuit, AppError> {
    AppSpec::FloydWarshall { n, bitwidth }.validate(field)?;
    let mut b = CircuitBuilder::new(field, n * n, n * n, 0);
    let mut d: Vec<Wire> = (0..n * n).map(|i| b.public_input(i)).collect();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = b.add(d[i * n + k], d[k * n + j]);
                d[i * n + j] = min(&mut b, d[i * n + j], via, bitwidth)?;
            }
        }
    }
    for (i, w) in d.into_iter().enumerate() {
        b.set_output(i, w);
    }
    Ok(b.finish()?)
}

/// In-place Floyd-Warshall with the same relaxation order as the circuit.
pub fn floyd_warshall_reference(n: usize, weights: &[u64]) -> Vec<u64> {
    let mut d = weights.to_vec();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i * n + k] + d[k * n + j];
                if via < d[i * n + j] {
                    d[i * n + j] = via;
                }
            }
        }
    }
    d
}
