//! Closed-form gas estimates for running an app directly in a contract.
//!
//! An estimate counts the primitive operations a straightforward on-chain
//! implementation would perform and prices each with a [`GasModel`]. Inputs
//! and outputs are written to contract storage, which dominates for the
//! data-heavy apps.
//!
//! ```
//! use cic_core::apps::AppSpec;
//! use cic_core::gas::GasModel;
//!
//! let model = GasModel::default();
//! let gas = model.estimate(&AppSpec::image_match(85, 3));
//! assert!(gas > 10 * model.block_gas_limit);
//! ```

use crate::apps::AppSpec;

/// Ethereum mainnet block gas limit used as the feasibility bar.
pub const BLOCK_GAS_LIMIT: u64 = 12_000_000;

/// Gas prices per primitive operation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GasModel {
    /// Flat cost of one transaction.
    pub tx_base: u64,
    /// Modular addition or subtraction.
    pub field_add: u64,
    /// Modular multiplication.
    pub field_mul: u64,
    /// Comparison plus conditional update.
    pub comparison: u64,
    /// Writing one fresh 32-byte storage slot.
    pub storage_write: u64,
    pub block_gas_limit: u64,
}

impl Default for GasModel {
    /// `ADDMOD`/`MULMOD` at 8, a comparison with its branch at 3, `SSTORE`
    /// to a fresh slot at 20000, and a 21000 transaction base.
    fn default() -> Self {
        GasModel {
            tx_base: 21_000,
            field_add: 8,
            field_mul: 8,
            comparison: 3,
            storage_write: 20_000,
            block_gas_limit: BLOCK_GAS_LIMIT,
        }
    }
}

/// Primitive operation counts for one on-chain run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpCounts {
    pub adds: u64,
    pub muls: u64,
    pub comparisons: u64,
    pub storage_writes: u64,
}

fn sat(v: usize) -> u64 {
    u64::try_from(v).unwrap_or(u64::MAX)
}

/// Operation counts for `spec`. Sizes of zero count nothing.
pub fn op_counts(spec: &AppSpec) -> OpCounts {
    match *spec {
        AppSpec::Matmul { n } => {
            let n = sat(n);
            let n2 = n.saturating_mul(n);
            let n3 = n2.saturating_mul(n);
            OpCounts {
                muls: n3,
                adds: n2.saturating_mul(n.saturating_sub(1)),
                comparisons: 0,
                // both inputs and the product
                storage_writes: n2.saturating_mul(3),
            }
        }
        AppSpec::ImageMatch {
            width,
            height,
            kernel_width,
            kernel_height,
            ..
        } => {
            let placements = sat(width.saturating_sub(kernel_width).saturating_add(1))
                .saturating_mul(sat(height.saturating_sub(kernel_height).saturating_add(1)));
            let placements = if kernel_width > width || kernel_height > height {
                0
            } else {
                placements
            };
            let cells = sat(kernel_width).saturating_mul(sat(kernel_height));
            OpCounts {
                // one subtraction per cell, then cells - 1 additions
                adds: placements.saturating_mul((2 * cells).saturating_sub(1)),
                muls: placements.saturating_mul(cells),
                comparisons: placements,
                storage_writes: sat(width)
                    .saturating_mul(sat(height))
                    .saturating_add(cells)
                    .saturating_add(3),
            }
        }
        AppSpec::Multipoly { degree, vars } => {
            let coeffs = sat(degree)
                .saturating_add(1)
                .saturating_pow(u32::try_from(vars).unwrap_or(u32::MAX));
            let steps = if vars == 0 {
                0
            } else {
                coeffs.saturating_sub(1)
            };
            OpCounts {
                adds: steps,
                muls: steps,
                comparisons: 0,
                storage_writes: coeffs.saturating_add(sat(vars)).saturating_add(1),
            }
        }
        AppSpec::FloydWarshall { n, .. } => {
            let n = sat(n);
            let n2 = n.saturating_mul(n);
            let n3 = n2.saturating_mul(n);
            OpCounts {
                adds: n3,
                muls: 0,
                comparisons: n3,
                storage_writes: n2.saturating_mul(2),
            }
        }
    }
}

impl GasModel {
    /// Total gas: the transaction base plus every counted operation at its
    /// price. Saturates at `u64::MAX`.
    pub fn estimate(&self, spec: &AppSpec) -> u64 {
        let ops = op_counts(spec);
        [
            (ops.adds, self.field_add),
            (ops.muls, self.field_mul),
            (ops.comparisons, self.comparison),
            (ops.storage_writes, self.storage_write),
        ]
        .into_iter()
        .fold(self.tx_base, |acc, (count, price)| {
            acc.saturating_add(count.saturating_mul(price))
        })
    }

    /// How many blocks' worth of gas `spec` needs.
    pub fn block_ratio(&self, spec: &AppSpec) -> f64 {
        self.estimate(spec) as f64 / self.block_gas_limit as f64
    }
}
