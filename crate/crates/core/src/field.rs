//! Prime-field arithmetic over a runtime-configured modulus.
//!
//! Every element carries the [`PrimeField`] it belongs to, so mixing elements of
//! different fields is caught: the `checked_*` methods report
//! [`FieldError::ModulusMismatch`], while the arithmetic operators panic.
//!
//! ```
//! use cic_core::field::PrimeField;
//!
//! let f = PrimeField::mersenne61();
//! let a = f.element(f.modulus() - 1);
//! assert_eq!((a + f.element(5)).value(), 4);
//! assert_eq!(f.element(2).inverse().unwrap().value(), 1 << 60);
//! ```

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use rand::Rng;
use thiserror::Error;

/// The Mersenne prime 2^61 - 1, the default modulus.
pub const MERSENNE_61: u64 = (1 << 61) - 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("attempted to invert zero")]
    InversionOfZero,
    #[error("operands belong to different fields (p = {left} vs p = {right})")]
    ModulusMismatch { left: u64, right: u64 },
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} is outside the supported range (2 < p < 2^63)")]
    ModulusOutOfRange(u64),
}

/// A prime field Z_p with p < 2^63.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    modulus: u64,
}

impl Default for PrimeField {
    fn default() -> Self {
        Self::mersenne61()
    }
}

impl PrimeField {
    pub const fn mersenne61() -> Self {
        PrimeField {
            modulus: MERSENNE_61,
        }
    }

    /// Builds a field after checking that `modulus` is an odd prime below 2^63.
    pub fn new(modulus: u64) -> Result<Self, FieldError> {
        if modulus <= 2 || modulus >= 1 << 63 {
            return Err(FieldError::ModulusOutOfRange(modulus));
        }
        if !is_prime(modulus) {
            return Err(FieldError::NotPrime(modulus));
        }
        Ok(PrimeField { modulus })
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Largest `w` such that every integer below 2^w has a distinct canonical
    /// representative, i.e. 2^w <= p.
    pub fn max_bit_width(&self) -> u32 {
        63 - self.modulus.leading_zeros()
    }

    /// Reduces `value` modulo p.
    #[inline]
    pub fn element(&self, value: u64) -> FieldElement {
        FieldElement {
            value: value % self.modulus,
            field: *self,
        }
    }

    pub fn from_i64(&self, value: i64) -> FieldElement {
        if value >= 0 {
            self.element(value as u64)
        } else {
            -self.element(value.unsigned_abs())
        }
    }

    #[inline]
    pub fn zero(&self) -> FieldElement {
        FieldElement {
            value: 0,
            field: *self,
        }
    }

    #[inline]
    pub fn one(&self) -> FieldElement {
        FieldElement {
            value: 1,
            field: *self,
        }
    }

    /// Uniformly random element.
    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        FieldElement {
            value: rng.random_range(0..self.modulus),
            field: *self,
        }
    }

    /// Uniformly random nonzero element.
    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        FieldElement {
            value: rng.random_range(1..self.modulus),
            field: *self,
        }
    }

    // Raw operations on canonical representatives. Used by hot loops that have
    // already established that all operands live in this field.

    #[inline]
    pub(crate) fn add_raw(&self, a: u64, b: u64) -> u64 {
        // p < 2^63, so a + b cannot overflow.
        let s = a.wrapping_add(b);
        s.min(s.wrapping_sub(self.modulus))
    }

    #[inline]
    pub(crate) fn sub_raw(&self, a: u64, b: u64) -> u64 {
        let (d, borrow) = a.overflowing_sub(b);
        d.wrapping_add(self.modulus & 0u64.wrapping_sub(borrow as u64))
    }

    #[inline]
    pub(crate) fn mul_raw(&self, a: u64, b: u64) -> u64 {
        let prod = a as u128 * b as u128;
        if self.modulus == MERSENNE_61 {
            let lo = (prod as u64) & MERSENNE_61;
            let hi = (prod >> 61) as u64;
            let s = lo.wrapping_add(hi);
            s.min(s.wrapping_sub(MERSENNE_61))
        } else {
            (prod % self.modulus as u128) as u64
        }
    }

    #[inline]
    pub(crate) fn wrap(&self, value: u64) -> FieldElement {
        debug_assert!(value < self.modulus);
        FieldElement {
            value,
            field: *self,
        }
    }

    /// Inverts every element of `values` in place with a single field inversion.
    pub fn batch_invert(&self, values: &mut [FieldElement]) -> Result<(), FieldError> {
        let mut prefix = Vec::with_capacity(values.len());
        let mut acc = self.one();
        for v in values.iter() {
            if v.is_zero() {
                return Err(FieldError::InversionOfZero);
            }
            prefix.push(acc);
            acc *= *v;
        }
        let mut inv = acc.inverse()?;
        for (v, before) in values.iter_mut().zip(prefix).rev() {
            let next = inv * *v;
            *v = inv * before;
            inv = next;
        }
        Ok(())
    }
}

/// An element of a [`PrimeField`], always held in canonical form `0 <= value < p`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u64,
    field: PrimeField,
}

impl FieldElement {
    #[inline]
    pub fn value(&self) -> u64 {
        self.value
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn same_field(&self, other: &Self) -> Result<(), FieldError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(FieldError::ModulusMismatch {
                left: self.field.modulus,
                right: other.field.modulus,
            })
        }
    }

    pub fn checked_add(self, rhs: Self) -> Result<Self, FieldError> {
        self.same_field(&rhs)?;
        Ok(self.field.wrap(self.field.add_raw(self.value, rhs.value)))
    }

    pub fn checked_sub(self, rhs: Self) -> Result<Self, FieldError> {
        self.same_field(&rhs)?;
        Ok(self.field.wrap(self.field.sub_raw(self.value, rhs.value)))
    }

    pub fn checked_mul(self, rhs: Self) -> Result<Self, FieldError> {
        self.same_field(&rhs)?;
        Ok(self.field.wrap(self.field.mul_raw(self.value, rhs.value)))
    }

    pub fn checked_div(self, rhs: Self) -> Result<Self, FieldError> {
        self.same_field(&rhs)?;
        Ok(self * rhs.inverse()?)
    }

    /// Square-and-multiply exponentiation.
    pub fn pow(self, mut exp: u64) -> Self {
        let f = self.field;
        let mut base = self.value;
        let mut acc = 1u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = f.mul_raw(acc, base);
            }
            base = f.mul_raw(base, base);
            exp >>= 1;
        }
        f.wrap(acc)
    }

    /// Multiplicative inverse via Fermat's little theorem.
    pub fn inverse(self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Err(FieldError::InversionOfZero);
        }
        Ok(self.pow(self.field.modulus - 2))
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $checked:ident, $assign_trait:ident, $assign:ident) => {
        impl $trait for FieldElement {
            type Output = FieldElement;
            #[inline]
            fn $method(self, rhs: FieldElement) -> FieldElement {
                match self.$checked(rhs) {
                    Ok(v) => v,
                    Err(e) => panic!("{e}"),
                }
            }
        }

        impl $assign_trait for FieldElement {
            #[inline]
            fn $assign(&mut self, rhs: FieldElement) {
                *self = $trait::$method(*self, rhs);
            }
        }
    };
}

binop!(Add, add, checked_add, AddAssign, add_assign);
binop!(Sub, sub, checked_sub, SubAssign, sub_assign);
binop!(Mul, mul, checked_mul, MulAssign, mul_assign);

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.field.wrap(self.field.sub_raw(0, self.value))
    }
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in SMALL {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let pow = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul(acc, b);
            }
            b = mul(b, b);
            e >>= 1;
        }
        acc
    };
    let d0 = n - 1;
    let r = d0.trailing_zeros();
    let d = d0 >> r;
    'witness: for a in SMALL {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn wraparound_and_inverse_of_two() {
        let f = PrimeField::mersenne61();
        let a = f.element(MERSENNE_61 - 1);
        assert_eq!((a + f.element(5)).value(), 4);
        assert_eq!(f.element(2).inverse().unwrap().value(), 1 << 60);
    }

    #[test]
    fn fermat_small_prime() {
        let f = PrimeField::new(7).unwrap();
        assert_eq!(f.element(3).pow(6).value(), 1);
    }

    #[test]
    fn inverting_zero_fails() {
        let f = PrimeField::mersenne61();
        assert_eq!(f.zero().inverse(), Err(FieldError::InversionOfZero));
    }

    #[test]
    fn mixing_fields_is_reported() {
        let a = PrimeField::new(7).unwrap().element(3);
        let b = PrimeField::new(11).unwrap().element(3);
        assert_eq!(
            a.checked_add(b),
            Err(FieldError::ModulusMismatch { left: 7, right: 11 })
        );
        assert!(a.checked_mul(b).is_err());
    }

    #[test]
    #[should_panic(expected = "different fields")]
    fn operator_panics_on_mismatch() {
        let a = PrimeField::new(7).unwrap().element(3);
        let b = PrimeField::new(11).unwrap().element(3);
        let _ = a + b;
    }

    #[test]
    fn rejects_composite_and_out_of_range() {
        assert_eq!(PrimeField::new(15), Err(FieldError::NotPrime(15)));
        assert_eq!(PrimeField::new(2), Err(FieldError::ModulusOutOfRange(2)));
        assert!(PrimeField::new((1 << 63) + 29).is_err());
        assert!(PrimeField::new(MERSENNE_61).is_ok());
        assert!(PrimeField::new(18446744069414584321).is_err()); // goldilocks, too large
        assert!(PrimeField::new(2013265921).is_ok());
    }

    #[test]
    fn miller_rabin_matches_trial_division() {
        let trial = |n: u64| {
            n >= 2
                && (2..)
                    .take_while(|d| d * d <= n)
                    .all(|d| !n.is_multiple_of(d))
        };
        for n in 0..5000u64 {
            assert_eq!(is_prime(n), trial(n), "n = {n}");
        }
    }

    #[test]
    fn mersenne_reduction_matches_generic() {
        let f = PrimeField::mersenne61();
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        for _ in 0..10_000 {
            let a = rng.random_range(0..MERSENNE_61);
            let b = rng.random_range(0..MERSENNE_61);
            let want = ((a as u128 * b as u128) % MERSENNE_61 as u128) as u64;
            assert_eq!(f.mul_raw(a, b), want);
        }
        assert_eq!(f.mul_raw(MERSENNE_61 - 1, MERSENNE_61 - 1), 1);
    }

    #[test]
    fn negative_integers_map_to_additive_inverses() {
        let f = PrimeField::new(101).unwrap();
        assert_eq!(f.from_i64(-1).value(), 100);
        assert_eq!((f.from_i64(-7) + f.element(7)).value(), 0);
    }

    #[test]
    fn batch_inversion() {
        let f = PrimeField::mersenne61();
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        let orig: Vec<_> = (0..50).map(|_| f.random_nonzero(&mut rng)).collect();
        let mut inv = orig.clone();
        f.batch_invert(&mut inv).unwrap();
        for (a, b) in orig.iter().zip(&inv) {
            assert_eq!((*a * *b).value(), 1);
        }
        let mut with_zero = vec![f.one(), f.zero()];
        assert_eq!(
            f.batch_invert(&mut with_zero),
            Err(FieldError::InversionOfZero)
        );
    }

    #[test]
    fn bit_width_bound() {
        assert_eq!(PrimeField::mersenne61().max_bit_width(), 60);
        assert_eq!(PrimeField::new(17).unwrap().max_bit_width(), 4);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn elem() -> impl Strategy<Value = FieldElement> {
            (0..MERSENNE_61).prop_map(|v| PrimeField::mersenne61().element(v))
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(1000))]

            #[test]
            fn field_axioms(a in elem(), b in elem(), c in elem()) {
                prop_assert_eq!((a + b) + c, a + (b + c));
                prop_assert_eq!((a * b) * c, a * (b * c));
                prop_assert_eq!(a + b, b + a);
                prop_assert_eq!(a * b, b * a);
                prop_assert_eq!(a * (b + c), a * b + a * c);
                prop_assert_eq!((a - b) + b, a);
                prop_assert_eq!(a + (-a), a.field().zero());
            }

            #[test]
            fn inverse_is_two_sided(a in 1..MERSENNE_61) {
                let a = PrimeField::mersenne61().element(a);
                let inv = a.inverse().unwrap();
                prop_assert_eq!((a * inv).value(), 1);
                prop_assert_eq!((inv * a).value(), 1);
            }
        }
    }
}
