//! Reusable constraint sub-circuits: bit decomposition, comparison, min,
//! selection and equality.
//!
//! Comparisons work on the integer representatives of field elements and
//! require both operands to be below `2^width`. That range is a precondition
//! of the honest inputs; the decomposition constraints make any witness for
//! out-of-range values unsatisfiable.

use super::{CircuitBuilder, CircuitError, Hint, Wire};

fn check_width(b: &CircuitBuilder, width: u32) -> Result<(), CircuitError> {
    let max = b.field().max_bit_width();
    if width > max {
        return Err(CircuitError::WidthTooLarge { width, max });
    }
    Ok(())
}

/// Splits `x` into `width` boolean wires, least significant first, and
/// constrains `sum(bit_i * 2^i) == x`.
pub fn bit_decompose(
    b: &mut CircuitBuilder,
    x: Wire,
    width: u32,
) -> Result<Vec<Wire>, CircuitError> {
    check_width(b, width)?;
    let field = b.field();
    let mut bits = Vec::with_capacity(width as usize);
    let mut terms = Vec::with_capacity(width as usize);
    for index in 0..width {
        let bit = b.advice(Hint::Bit { source: x, index });
        b.assert_boolean(bit);
        let weighted = if index == 0 {
            bit
        } else {
            b.scale(field.element(1u64 << index), bit)
        };
        bits.push(bit);
        terms.push(weighted);
    }
    let recomposed = b.sum(&terms);
    b.assert_equal(recomposed, x);
    Ok(bits)
}

/// Returns a boolean wire that is 1 iff `x < y` as integers.
///
/// Decomposes `y - x + 2^width - 1` into `width + 1` bits; the top bit is set
/// exactly when `y - x - 1` is non-negative.
pub fn less_than(
    b: &mut CircuitBuilder,
    x: Wire,
    y: Wire,
    width: u32,
) -> Result<Wire, CircuitError> {
    check_width(b, width + 1)?;
    let field = b.field();
    let diff = b.sub(y, x);
    let offset = field.element((1u64 << width) - 1);
    let shifted = b.add_constant(diff, offset);
    let bits = bit_decompose(b, shifted, width + 1)?;
    Ok(bits[width as usize])
}

/// `if cond { when_true } else { when_false }` for a boolean `cond`.
pub fn select(b: &mut CircuitBuilder, cond: Wire, when_true: Wire, when_false: Wire) -> Wire {
    let delta = b.sub(when_true, when_false);
    let picked = b.mul(cond, delta);
    b.add(when_false, picked)
}

/// `min(x, y)` together with the `x < y` flag used to pick it.
pub fn min_with_flag(
    b: &mut CircuitBuilder,
    x: Wire,
    y: Wire,
    width: u32,
) -> Result<(Wire, Wire), CircuitError> {
    let lt = less_than(b, x, y, width)?;
    Ok((select(b, lt, x, y), lt))
}

pub fn min(b: &mut CircuitBuilder, x: Wire, y: Wire, width: u32) -> Result<Wire, CircuitError> {
    min_with_flag(b, x, y, width).map(|(m, _)| m)
}

/// Returns a boolean wire that is 1 iff `x == y` in the field.
pub fn is_equal(b: &mut CircuitBuilder, x: Wire, y: Wire) -> Wire {
    let field = b.field();
    let diff = b.sub(x, y);
    let inv = b.advice(Hint::InverseOrZero { source: diff });
    let nonzero = b.mul(diff, inv);
    let neg = b.scale(-field.one(), nonzero);
    let eq = b.add_constant(neg, field.one());
    let zero = b.constant(0);
    b.assert_product(diff, eq, zero);
    eq
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{check_r1cs, to_r1cs, ArithmeticCircuit, Gate};
    use crate::field::PrimeField;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn f() -> PrimeField {
        PrimeField::mersenne61()
    }

    fn decompose_circuit(width: u32) -> ArithmeticCircuit {
        let mut b = CircuitBuilder::new(f(), 1, width as usize, 0);
        let x = b.public_input(0);
        let bits = bit_decompose(&mut b, x, width).unwrap();
        for (i, bit) in bits.into_iter().enumerate() {
            b.set_output(i, bit);
        }
        b.finish().unwrap()
    }

    fn outputs(c: &ArithmeticCircuit, public: &[u64]) -> Vec<u64> {
        let w = c.evaluate_u64(public, &[]).unwrap();
        c.public_output_wires().map(|o| w.get(o).value()).collect()
    }

    #[test]
    fn decompose_thirteen() {
        let c = decompose_circuit(4);
        assert_eq!(outputs(&c, &[13]), vec![1, 0, 1, 1]);
        assert_eq!(outputs(&c, &[0]), vec![0, 0, 0, 0]);
    }

    #[test]
    fn decompose_rejects_out_of_range_value() {
        let c = decompose_circuit(4);
        assert!(matches!(
            c.evaluate_u64(&[16], &[]),
            Err(CircuitError::AssertionFailed { .. })
        ));
    }

    #[test]
    fn width_limit() {
        let mut b = CircuitBuilder::new(f(), 2, 0, 0);
        let x = b.public_input(0);
        assert_eq!(
            bit_decompose(&mut b, x, 61),
            Err(CircuitError::WidthTooLarge { width: 61, max: 60 })
        );
        assert!(bit_decompose(&mut b, x, 60).is_ok());
        let y = b.public_input(1);
        assert!(matches!(
            less_than(&mut b, x, y, 60),
            Err(CircuitError::WidthTooLarge { width: 61, .. })
        ));
    }

    #[test]
    fn injected_non_boolean_bit_is_caught() {
        let c = decompose_circuit(4);
        let cs = to_r1cs(&c).unwrap();
        let mut w = c.evaluate_u64(&[13], &[]).unwrap();
        assert!(check_r1cs(&cs, &w).unwrap());
        // bit 1 is 0 for 13; setting it to 2 keeps nothing consistent
        let bit1 = c
            .gates()
            .iter()
            .filter_map(|g| match g {
                Gate::Advice { out, .. } => Some(*out),
                _ => None,
            })
            .nth(1)
            .unwrap();
        w.set(bit1, f().element(2));
        assert!(!check_r1cs(&cs, &w).unwrap());
    }

    fn binary_gadget(op: fn(&mut CircuitBuilder, Wire, Wire) -> Wire) -> ArithmeticCircuit {
        let mut b = CircuitBuilder::new(f(), 2, 1, 0);
        let (x, y) = (b.public_input(0), b.public_input(1));
        let out = op(&mut b, x, y);
        b.set_output(0, out);
        b.finish().unwrap()
    }

    #[test]
    fn less_than_examples() {
        let c = binary_gadget(|b, x, y| less_than(b, x, y, 4).unwrap());
        assert_eq!(outputs(&c, &[3, 5]), vec![1]);
        assert_eq!(outputs(&c, &[5, 3]), vec![0]);
        assert_eq!(outputs(&c, &[5, 5]), vec![0]);
    }

    #[test]
    fn less_than_exhaustive_width_4() {
        let c = binary_gadget(|b, x, y| less_than(b, x, y, 4).unwrap());
        let cs = to_r1cs(&c).unwrap();
        for x in 0..16u64 {
            for y in 0..16u64 {
                let w = c.evaluate_u64(&[x, y], &[]).unwrap();
                assert_eq!(
                    w.get(crate::circuit::Wire(3)).value(),
                    (x < y) as u64,
                    "{x} < {y}"
                );
                assert!(check_r1cs(&cs, &w).unwrap());
            }
        }
    }

    #[test]
    fn min_exhaustive_width_4() {
        let c = binary_gadget(|b, x, y| min(b, x, y, 4).unwrap());
        for x in 0..16u64 {
            for y in 0..16u64 {
                assert_eq!(outputs(&c, &[x, y]), vec![x.min(y)]);
            }
        }
    }

    #[test]
    fn equality_gadget() {
        let c = binary_gadget(is_equal);
        let cs = to_r1cs(&c).unwrap();
        for (x, y) in [(0, 0), (5, 5), (5, 6), (0, 9), (u64::MAX >> 4, 1)] {
            let w = c.evaluate_u64(&[x, y], &[]).unwrap();
            assert_eq!(w.get(crate::circuit::Wire(3)).value(), (x == y) as u64);
            assert!(check_r1cs(&cs, &w).unwrap());
        }
        // claiming equality of distinct values is unsatisfiable
        let mut w = c.evaluate_u64(&[5, 6], &[]).unwrap();
        w.set(crate::circuit::Wire(3), f().one());
        assert!(!check_r1cs(&cs, &w).unwrap());
    }

    #[test]
    fn boolean_wires_stay_boolean() {
        let c = binary_gadget(|b, x, y| min(b, x, y, 8).unwrap());
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        for _ in 0..200 {
            let (x, y) = (rng.random_range(0..256), rng.random_range(0..256));
            let w = c.evaluate_u64(&[x, y], &[]).unwrap();
            for g in c.gates() {
                if let Gate::Advice { out, .. } = g {
                    assert!(w.get(*out).value() <= 1);
                }
            }
        }
    }

    /// Corrupting any single constrained, non-input wire must break a constraint.
    #[test]
    fn single_wire_corruption_is_detected() {
        let c = binary_gadget(|b, x, y| {
            let m = min(b, x, y, 6).unwrap();
            let bits = bit_decompose(b, m, 6).unwrap();
            let lt = less_than(b, bits[0], bits[5], 1).unwrap();
            b.add(m, lt)
        });
        let cs = to_r1cs(&c).unwrap();
        let targets: Vec<_> = cs
            .variable_wires()
            .filter(|w| w.index() > c.num_public_inputs())
            .collect();
        assert!(targets.len() > 10);
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        for _ in 0..50 {
            let (x, y) = (rng.random_range(0..64), rng.random_range(0..64));
            let honest = c.evaluate_u64(&[x, y], &[]).unwrap();
            assert!(check_r1cs(&cs, &honest).unwrap());
            for &t in &targets {
                let mut w = honest.clone();
                let delta = f().element(rng.random_range(1..1000));
                w.set(t, w.get(t) + delta);
                assert!(
                    !check_r1cs(&cs, &w).unwrap(),
                    "corrupting {t:?} went unnoticed"
                );
            }
        }
    }
}
