use crate::circuit::{ArithmeticCircuit, CircuitBuilder, Wire};
use crate::field::{FieldElement, PrimeField};

use super::{AppError, AppSpec};

/// `(degree + 1)^vars`, or `None` on overflow.
pub(super) fn coefficient_count(degree: usize, vars: usize) -> Option<usize> {
    (degree.checked_add(1)?).checked_pow(u32::try_from(vars).ok()?)
}

/// Evaluates a `vars`-variate polynomial of degree at most `degree` in each
/// variable.
///
/// Inputs: the `(degree + 1)^vars` coefficients, then the point
/// `x_1, ..., x_vars`. Coefficient `c[e_1, ..., e_k]` sits at index
/// `e_1 + e_2 (m+1) + ... + e_k (m+1)^(k-1)`, so `e_1` varies fastest.
/// One output.
///
/// Nested Horner's rule in `x_k`, then `x_{k-1}` inside each coefficient, and
/// so on, uses `(degree + 1)^vars - 1` multiplications.
pub fn build_multipoly(
    field: PrimeField,
    degree: usize,
    vars: usize,
) -> Result<ArithmeticCircuit, AppError> {
    let spec = AppSpec::Multipoly { degree, vars };
    spec.validate(field)?;
    let count = coefficient_count(degree, vars).unwrap();
    let mut b = CircuitBuilder::new(field, count + vars, 1, 0);
    let coeffs: Vec<Wire> = (0..count).map(|i| b.public_input(i)).collect();
    let point: Vec<Wire> = (0..vars).map(|i| b.public_input(count + i)).collect();
    let out = horner_circuit(&mut b, &coeffs, &point, degree);
    b.set_output(0, out);
    Ok(b.finish()?)
}

fn horner_circuit(b: &mut CircuitBuilder, coeffs: &[Wire], point: &[Wire], degree: usize) -> Wire {
    let Some((&x, inner)) = point.split_last() else {
        return coeffs[0];
    };
    let block = coeffs.len() / (degree + 1);
    let mut acc = horner_circuit(b, &coeffs[degree * block..], inner, degree);
    for e in (0..degree).rev() {
        let scaled = b.mul(acc, x);
        let c = horner_circuit(b, &coeffs[e * block..(e + 1) * block], inner, degree);
        acc = b.add(scaled, c);
    }
    acc
}

/// Direct expansion: sum over every exponent tuple of `c · Π x_i^e_i`.
pub fn multipoly_reference(field: PrimeField, degree: usize, vars: usize, inputs: &[u64]) -> u64 {
    let count = coefficient_count(degree, vars).unwrap();
    let (coeffs, point) = inputs.split_at(count);
    let point: Vec<FieldElement> = point.iter().map(|&x| field.element(x)).collect();
    let mut total = field.zero();
    for (idx, &c) in coeffs.iter().enumerate() {
        let mut term = field.element(c);
        let mut rest = idx;
        for x in &point {
            term *= x.pow((rest % (degree + 1)) as u64);
            rest /= degree + 1;
        }
        total += term;
    }
    total.value()
}
