//! Bilinear group abstraction and the default mock backend.

use std::fmt::Debug;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::field::{FieldElement, PrimeField};

use super::encoding::{EncodingError, Reader};

/// Two source groups and a target group of prime order `q`, with a bilinear
/// map `e: G1 x G2 -> GT`. Source groups are written additively, the target
/// group multiplicatively.
///
/// Implementations must encode every element of a given group in a fixed
/// number of bytes.
pub trait BilinearGroup: Clone + Debug {
    type G1: Copy + Eq + Debug;
    type G2: Copy + Eq + Debug;
    type Gt: Copy + Eq + Debug;

    /// Identifies the backend in serialized proofs and keys.
    const BACKEND_ID: u8;
    /// Encoded size of a single element of either source group.
    const ELEMENT_BYTES: usize;

    /// The scalar field, of order equal to the group order.
    fn scalar_field(&self) -> PrimeField;

    fn g1_generator(&self) -> Self::G1;
    fn g2_generator(&self) -> Self::G2;
    fn g1_identity(&self) -> Self::G1;
    fn g2_identity(&self) -> Self::G2;

    fn g1_add(&self, a: &Self::G1, b: &Self::G1) -> Self::G1;
    fn g2_add(&self, a: &Self::G2, b: &Self::G2) -> Self::G2;
    fn g1_mul(&self, a: &Self::G1, k: FieldElement) -> Self::G1;
    fn g2_mul(&self, a: &Self::G2, k: FieldElement) -> Self::G2;

    fn pairing(&self, a: &Self::G1, b: &Self::G2) -> Self::Gt;
    fn gt_mul(&self, a: &Self::Gt, b: &Self::Gt) -> Self::Gt;

    fn encode_g1(a: &Self::G1, out: &mut Vec<u8>);
    fn encode_g2(a: &Self::G2, out: &mut Vec<u8>);
    fn decode_g1(&self, r: &mut Reader<'_>) -> Result<Self::G1, EncodingError>;
    fn decode_g2(&self, r: &mut Reader<'_>) -> Result<Self::G2, EncodingError>;

    /// `Σ k_i * base_i` in G1.
    fn g1_msm(&self, bases: &[Self::G1], scalars: &[FieldElement]) -> Self::G1 {
        bases
            .iter()
            .zip(scalars)
            .fold(self.g1_identity(), |acc, (b, k)| {
                self.g1_add(&acc, &self.g1_mul(b, *k))
            })
    }

    /// `Σ k_i * base_i` in G2.
    fn g2_msm(&self, bases: &[Self::G2], scalars: &[FieldElement]) -> Self::G2 {
        bases
            .iter()
            .zip(scalars)
            .fold(self.g2_identity(), |acc, (b, k)| {
                self.g2_add(&acc, &self.g2_mul(b, *k))
            })
    }
}

/// Counts of the expensive operations performed through a [`MockGroup`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpCounts {
    pub pairings: u64,
    /// Additions and scalar multiplications in G1 and G2.
    pub group_ops: u64,
    pub gt_ops: u64,
}

#[derive(Debug, Default)]
struct Counters {
    pairings: AtomicU64,
    group_ops: AtomicU64,
    gt_ops: AtomicU64,
}

/// Group tags used by the mock encoding.
pub const TAG_G1: u8 = 0x01;
pub const TAG_G2: u8 = 0x02;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MockG1(pub u64);
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MockG2(pub u64);
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MockGt(pub u64);

/// A mock bilinear group in which every element is represented by its
/// discrete logarithm: `a·g` is stored as `a`, and `e(a·g1, b·g2) = e(g1, g2)^(ab)`
/// is stored as `ab`.
///
/// Every verification equation is checked exactly, which makes the mock ideal
/// for testing the protocol. It provides no security whatsoever: anyone can
/// read the trapdoors straight out of the keys.
#[derive(Clone, Debug)]
pub struct MockGroup {
    field: PrimeField,
    counters: Arc<Counters>,
}

impl MockGroup {
    pub fn new(field: PrimeField) -> Self {
        MockGroup {
            field,
            counters: Arc::default(),
        }
    }

    pub fn op_counts(&self) -> OpCounts {
        OpCounts {
            pairings: self.counters.pairings.load(Ordering::Relaxed),
            group_ops: self.counters.group_ops.load(Ordering::Relaxed),
            gt_ops: self.counters.gt_ops.load(Ordering::Relaxed),
        }
    }

    pub fn reset_counts(&self) {
        self.counters.pairings.store(0, Ordering::Relaxed);
        self.counters.group_ops.store(0, Ordering::Relaxed);
        self.counters.gt_ops.store(0, Ordering::Relaxed);
    }

    fn bump_group(&self) {
        self.counters.group_ops.fetch_add(1, Ordering::Relaxed);
    }

    fn decode_exponent(&self, r: &mut Reader<'_>, tag: u8) -> Result<u64, EncodingError> {
        let found = r.u8()?;
        if found != tag {
            return Err(EncodingError::BadElement(format!(
                "expected group tag {tag:#04x}, found {found:#04x}"
            )));
        }
        let v = r.u64()?;
        if v >= self.field.modulus() {
            return Err(EncodingError::BadElement(format!(
                "exponent {v} is not below the group order"
            )));
        }
        Ok(v)
    }
}

impl Default for MockGroup {
    fn default() -> Self {
        MockGroup::new(PrimeField::default())
    }
}

impl BilinearGroup for MockGroup {
    type G1 = MockG1;
    type G2 = MockG2;
    type Gt = MockGt;

    const BACKEND_ID: u8 = 0x01;
    const ELEMENT_BYTES: usize = 9;

    fn scalar_field(&self) -> PrimeField {
        self.field
    }

    fn g1_generator(&self) -> MockG1 {
        MockG1(1)
    }

    fn g2_generator(&self) -> MockG2 {
        MockG2(1)
    }

    fn g1_identity(&self) -> MockG1 {
        MockG1(0)
    }

    fn g2_identity(&self) -> MockG2 {
        MockG2(0)
    }

    fn g1_add(&self, a: &MockG1, b: &MockG1) -> MockG1 {
        self.bump_group();
        MockG1(self.field.add_raw(a.0, b.0))
    }

    fn g2_add(&self, a: &MockG2, b: &MockG2) -> MockG2 {
        self.bump_group();
        MockG2(self.field.add_raw(a.0, b.0))
    }

    fn g1_mul(&self, a: &MockG1, k: FieldElement) -> MockG1 {
        self.bump_group();
        MockG1(self.field.mul_raw(a.0, k.value()))
    }

    fn g2_mul(&self, a: &MockG2, k: FieldElement) -> MockG2 {
        self.bump_group();
        MockG2(self.field.mul_raw(a.0, k.value()))
    }

    fn pairing(&self, a: &MockG1, b: &MockG2) -> MockGt {
        self.counters.pairings.fetch_add(1, Ordering::Relaxed);
        MockGt(self.field.mul_raw(a.0, b.0))
    }

    fn gt_mul(&self, a: &MockGt, b: &MockGt) -> MockGt {
        self.counters.gt_ops.fetch_add(1, Ordering::Relaxed);
        MockGt(self.field.add_raw(a.0, b.0))
    }

    fn encode_g1(a: &MockG1, out: &mut Vec<u8>) {
        out.push(TAG_G1);
        out.extend_from_slice(&a.0.to_be_bytes());
    }

    fn encode_g2(a: &MockG2, out: &mut Vec<u8>) {
        out.push(TAG_G2);
        out.extend_from_slice(&a.0.to_be_bytes());
    }

    fn decode_g1(&self, r: &mut Reader<'_>) -> Result<MockG1, EncodingError> {
        self.decode_exponent(r, TAG_G1).map(MockG1)
    }

    fn decode_g2(&self, r: &mut Reader<'_>) -> Result<MockG2, EncodingError> {
        self.decode_exponent(r, TAG_G2).map(MockG2)
    }

    // Counted as one mul and one add per term, same as the default.
    fn g1_msm(&self, bases: &[MockG1], scalars: &[FieldElement]) -> MockG1 {
        let f = self.field;
        let acc = bases.iter().zip(scalars).fold(0u64, |acc, (b, k)| {
            f.add_raw(acc, f.mul_raw(b.0, k.value()))
        });
        self.counters
            .group_ops
            .fetch_add(2 * bases.len().min(scalars.len()) as u64, Ordering::Relaxed);
        MockG1(acc)
    }

    fn g2_msm(&self, bases: &[MockG2], scalars: &[FieldElement]) -> MockG2 {
        let f = self.field;
        let acc = bases.iter().zip(scalars).fold(0u64, |acc, (b, k)| {
            f.add_raw(acc, f.mul_raw(b.0, k.value()))
        });
        self.counters
            .group_ops
            .fetch_add(2 * bases.len().min(scalars.len()) as u64, Ordering::Relaxed);
        MockG2(acc)
    }
}
