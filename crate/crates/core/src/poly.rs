//! Dense univariate polynomials in coefficient form, lowest degree first.
//!
//! The zero polynomial is represented by an empty coefficient list and has
//! degree `None` (the -infinity sentinel). All other polynomials are kept
//! trimmed so the last coefficient is nonzero.

use std::ops::{Add, Mul, Sub};

use thiserror::Error;

use crate::field::{FieldElement, PrimeField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("evaluation point {0} appears more than once")]
    DuplicateEvaluationPoint(u64),
    #[error("division by the zero polynomial")]
    DivisionByZeroPolynomial,
}

#[derive(Clone, PartialEq, Eq, Default)]
pub struct Polynomial {
    coeffs: Vec<FieldElement>,
}

impl std::fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("{c}"),
                1 => format!("{c}x"),
                _ => format!("{c}x^{i}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    /// Builds a polynomial from coefficients (lowest degree first), trimming
    /// trailing zeros.
    pub fn new(coeffs: Vec<FieldElement>) -> Self {
        let mut p = Polynomial { coeffs };
        p.trim();
        p
    }

    pub fn from_u64(field: PrimeField, coeffs: &[u64]) -> Self {
        Self::new(coeffs.iter().map(|&c| field.element(c)).collect())
    }

    pub fn constant(c: FieldElement) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `x`.
    pub fn x(field: PrimeField) -> Self {
        Polynomial {
            coeffs: vec![field.zero(), field.one()],
        }
    }

    /// Π (x - r) over `roots`; the constant 1 when `roots` is empty.
    pub fn vanishing(field: PrimeField, roots: &[FieldElement]) -> Self {
        let mut coeffs = Vec::with_capacity(roots.len() + 1);
        coeffs.push(field.one());
        for r in roots {
            // multiply by (x - r) in place
            coeffs.push(field.zero());
            for i in (0..coeffs.len()).rev() {
                let shifted = if i > 0 { coeffs[i - 1] } else { field.zero() };
                coeffs[i] = shifted - *r * coeffs[i];
            }
        }
        Self::new(coeffs)
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<FieldElement> {
        self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading_coefficient(&self) -> Option<FieldElement> {
        self.coeffs.last().copied()
    }

    /// Horner evaluation.
    pub fn evaluate(&self, x: FieldElement) -> FieldElement {
        let f = x.field();
        let mut acc = 0u64;
        for c in self.coeffs.iter().rev() {
            debug_assert_eq!(c.field(), f);
            acc = f.add_raw(f.mul_raw(acc, x.value()), c.value());
        }
        f.wrap(acc)
    }

    pub fn scale(&self, k: FieldElement) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * k).collect())
    }

    /// Lagrange interpolation through `points`. The result has degree below
    /// `points.len()` and passes through every point.
    pub fn interpolate(points: &[(FieldElement, FieldElement)]) -> Result<Self, PolyError> {
        let Some(&(first, _)) = points.first() else {
            return Ok(Self::zero());
        };
        let field = first.field();
        let xs: Vec<FieldElement> = points.iter().map(|p| p.0).collect();
        let full = Self::vanishing(field, &xs);

        let mut quotients = Vec::with_capacity(points.len());
        let mut denominators = Vec::with_capacity(points.len());
        for &x in &xs {
            let (q, _) = full.divide_by_linear(x);
            let d = q.evaluate(x);
            if d.is_zero() {
                return Err(PolyError::DuplicateEvaluationPoint(x.value()));
            }
            denominators.push(d);
            quotients.push(q);
        }
        field
            .batch_invert(&mut denominators)
            .expect("denominators checked nonzero");

        let mut acc = vec![field.zero(); points.len()];
        for ((q, inv), &(_, y)) in quotients.iter().zip(&denominators).zip(points) {
            let k = y * *inv;
            if k.is_zero() {
                continue;
            }
            for (a, c) in acc.iter_mut().zip(q.coeffs()) {
                *a += k * *c;
            }
        }
        Ok(Self::new(acc))
    }

    /// Synthetic division by `(x - root)`, returning quotient and remainder.
    pub fn divide_by_linear(&self, root: FieldElement) -> (Self, FieldElement) {
        let f = root.field();
        if self.coeffs.is_empty() {
            return (Self::zero(), f.zero());
        }
        let n = self.coeffs.len();
        let mut q = vec![f.zero(); n - 1];
        let mut carry = 0u64;
        for i in (0..n).rev() {
            let v = f.add_raw(self.coeffs[i].value(), f.mul_raw(carry, root.value()));
            if i == 0 {
                return (Self::new(q), f.wrap(v));
            }
            q[i - 1] = f.wrap(v);
            carry = v;
        }
        unreachable!()
    }

    /// Long division: returns `(q, r)` with `self = q * den + r` and
    /// `deg r < deg den`.
    ///
    /// Large divisions go through a Newton-iteration reciprocal of the
    /// reversed divisor, so the cost is a few multiplications instead of
    /// `deg(q) * deg(den)` steps.
    pub fn div_rem(&self, den: &Polynomial) -> Result<(Self, Self), PolyError> {
        let dd = den.degree().ok_or(PolyError::DivisionByZeroPolynomial)?;
        let Some(nd) = self.degree() else {
            return Ok((Self::zero(), Self::zero()));
        };
        if nd < dd {
            return Ok((Self::zero(), self.clone()));
        }
        if dd.min(nd - dd) < NEWTON_DIVISION_THRESHOLD {
            return Ok(self.div_rem_schoolbook(den));
        }
        let f = den.coeffs[0].field();
        let k = nd - dd + 1;
        let rev_den: Vec<u64> = den.coeffs.iter().rev().map(|c| c.value()).collect();
        let rev_num: Vec<u64> = self
            .coeffs
            .iter()
            .rev()
            .take(k)
            .map(|c| c.value())
            .collect();
        let inv = reciprocal(f, &rev_den, k);
        let mut q = mul_slices(f, &rev_num, &inv);
        q.truncate(k);
        q.resize(k, 0);
        q.reverse();
        let q = Self::new(q.into_iter().map(|v| f.wrap(v)).collect());
        let qd = &q * den;
        let mut r: Vec<FieldElement> = self.coeffs[..dd].to_vec();
        for (ri, c) in r.iter_mut().zip(qd.coeffs()) {
            *ri -= *c;
        }
        Ok((q, Self::new(r)))
    }

    fn div_rem_schoolbook(&self, den: &Polynomial) -> (Self, Self) {
        let dd = den.degree().expect("nonzero divisor");
        let nd = self.degree().expect("nonzero dividend");
        let f = den.coeffs[0].field();
        let lead_inv = den.coeffs[dd]
            .inverse()
            .expect("trimmed leading coefficient");
        let mut rem: Vec<u64> = self.coeffs.iter().map(|c| c.value()).collect();
        let den_raw: Vec<u64> = den.coeffs.iter().map(|c| c.value()).collect();
        let mut q = vec![f.zero(); nd - dd + 1];
        for i in (0..=nd - dd).rev() {
            let c = f.mul_raw(rem[i + dd], lead_inv.value());
            q[i] = f.wrap(c);
            if c == 0 {
                continue;
            }
            for (j, &d) in den_raw.iter().enumerate() {
                rem[i + j] = f.sub_raw(rem[i + j], f.mul_raw(c, d));
            }
        }
        rem.truncate(dd);
        let r = Self::new(rem.into_iter().map(|v| f.wrap(v)).collect());
        (Self::new(q), r)
    }
}

const KARATSUBA_THRESHOLD: usize = 32;
const NEWTON_DIVISION_THRESHOLD: usize = 64;

fn schoolbook(f: PrimeField, a: &[u64], b: &[u64], out: &mut [u64]) {
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.add_raw(out[i + j], f.mul_raw(x, y));
        }
    }
}

fn add_into(f: PrimeField, out: &mut [u64], src: &[u64]) {
    for (o, &s) in out.iter_mut().zip(src) {
        *o = f.add_raw(*o, s);
    }
}

/// Product of two raw coefficient slices, `a.len() + b.len() - 1` long.
pub(crate) fn mul_slices(f: PrimeField, a: &[u64], b: &[u64]) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let (a, b) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut out = vec![0u64; a.len() + b.len() - 1];
    if b.len() < KARATSUBA_THRESHOLD {
        schoolbook(f, a, b, &mut out);
    } else if a.len() > b.len() {
        for (i, chunk) in a.chunks(b.len()).enumerate() {
            let part = mul_slices(f, chunk, b);
            add_into(f, &mut out[i * b.len()..], &part);
        }
    } else {
        let h = a.len() / 2;
        let (a0, a1) = a.split_at(h);
        let (b0, b1) = b.split_at(h);
        let z0 = mul_slices(f, a0, b0);
        let z2 = mul_slices(f, a1, b1);
        let sum = |lo: &[u64], hi: &[u64]| -> Vec<u64> {
            let mut s = hi.to_vec();
            add_into(f, &mut s, lo);
            s
        };
        let mut z1 = mul_slices(f, &sum(a0, a1), &sum(b0, b1));
        for (i, v) in z1.iter_mut().enumerate() {
            let lo = z0.get(i).copied().unwrap_or(0);
            let hi = z2.get(i).copied().unwrap_or(0);
            *v = f.sub_raw(f.sub_raw(*v, lo), hi);
        }
        add_into(f, &mut out, &z0);
        add_into(f, &mut out[h..], &z1);
        add_into(f, &mut out[2 * h..], &z2);
    }
    out
}

/// `g` with `a * g = 1 mod x^k`; needs `a[0] != 0`.
fn reciprocal(f: PrimeField, a: &[u64], k: usize) -> Vec<u64> {
    let mut g = vec![f
        .wrap(a[0])
        .inverse()
        .expect("nonzero constant term")
        .value()];
    let mut prec = 1;
    while prec < k {
        prec = (2 * prec).min(k);
        let mut e = mul_slices(f, &a[..prec.min(a.len())], &g);
        e.resize(prec, 0);
        // e = 2 - a g
        for v in e.iter_mut() {
            *v = f.sub_raw(0, *v);
        }
        e[0] = f.add_raw(e[0], 2 % f.modulus());
        g = mul_slices(f, &g, &e);
        g.truncate(prec);
    }
    g
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let (long, short) = if self.coeffs.len() >= rhs.coeffs.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut out = long.coeffs.clone();
        for (o, c) in out.iter_mut().zip(&short.coeffs) {
            *o += *c;
        }
        Polynomial::new(out)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let neg = Polynomial {
            coeffs: rhs.coeffs.iter().map(|&c| -c).collect(),
        };
        self + &neg
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let f = self.coeffs[0].field();
        assert_eq!(
            f,
            rhs.coeffs[0].field(),
            "polynomials over different fields"
        );
        let a: Vec<u64> = self.coeffs.iter().map(|c| c.value()).collect();
        let b: Vec<u64> = rhs.coeffs.iter().map(|c| c.value()).collect();
        let out = mul_slices(f, &a, &b);
        Polynomial::new(out.into_iter().map(|v| f.wrap(v)).collect())
    }
}
