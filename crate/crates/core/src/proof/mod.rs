//! Succinct proofs of QAP satisfiability with public verification.
//!
//! The scheme follows the classic eight-element construction: the prover
//! commits to the non-public part of the witness under three independent
//! "shifted" bases (`r_v`, `r_w`, `r_y = r_v r_w`), adds α-shifted copies
//! that show each commitment is a combination of the published key terms,
//! a β term tying the three commitments to one coefficient vector, and a
//! commitment to the quotient polynomial `h(s)`. The verifier folds the public
//! values into the key, then runs five pairing equations (twelve pairings).
//!
//! Everything is generic over a [`BilinearGroup`]. The shipped
//! [`MockGroup`] checks every equation exactly but offers no hiding or
//! soundness against an adversary who inspects the keys.

mod encoding;
mod group;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use thiserror::Error;
use zeroize::{Zeroize, ZeroizeOnDrop};

use crate::circuit::Witness;
use crate::field::FieldElement;
use crate::qap::{QapError, QuadraticProgram};

pub use encoding::{
    key_modulus, EncodingError, Reader, EK_MAGIC, FORMAT_VERSION, PROOF_MAGIC, VK_MAGIC,
};
pub use group::{BilinearGroup, MockG1, MockG2, MockGroup, MockGt, OpCounts, TAG_G1, TAG_G2};

use encoding::write_header;

/// Number of group elements in a proof.
pub const PROOF_ELEMENTS: usize = 8;

/// Size of a [`MockGroup`] proof on the wire.
pub const MOCK_PROOF_BYTES: usize = 7 + PROOF_ELEMENTS * 9;

/// Size of the same eight elements over a 256-bit pairing-friendly curve with
/// compressed points (six 32-byte G1 and two 64-byte G2 elements), the figure
/// to compare against for a real deployment. Not produced by this crate.
pub const REFERENCE_PROOF_BYTES: usize = 288;

const TRAPDOOR_ATTEMPTS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProofError {
    #[error("could not sample a trapdoor outside the evaluation domain")]
    DegenerateTrapdoor,
    #[error("witness does not satisfy the constraint system")]
    UnsatisfyingWitness,
    #[error("malformed proof: {0}")]
    MalformedProof(EncodingError),
    #[error("malformed key: {0}")]
    MalformedKey(EncodingError),
    #[error("expected {expected} public values, got {got}")]
    IoLengthMismatch { expected: usize, got: usize },
    #[error("key mismatch: {0}")]
    KeyMismatch(String),
    #[error(transparent)]
    Qap(QapError),
}

impl From<QapError> for ProofError {
    fn from(e: QapError) -> Self {
        match e {
            QapError::NotDivisible => ProofError::UnsatisfyingWitness,
            other => ProofError::Qap(other),
        }
    }
}

#[derive(Zeroize, ZeroizeOnDrop)]
struct Trapdoor {
    s: u64,
    r_v: u64,
    r_w: u64,
    alpha_v: u64,
    alpha_w: u64,
    alpha_y: u64,
    beta: u64,
    gamma: u64,
}

impl Trapdoor {
    fn sample(qap: &QuadraticProgram, seed: u64) -> Result<Self, ProofError> {
        let field = qap.field();
        let m = qap.degree() as u64;
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let mut s = None;
        for _ in 0..TRAPDOOR_ATTEMPTS {
            let cand = field.random(&mut rng).value();
            if cand == 0 || cand > m {
                s = Some(cand);
                break;
            }
        }
        let s = s.ok_or(ProofError::DegenerateTrapdoor)?;
        let mut nz = || field.random_nonzero(&mut rng).value();
        Ok(Trapdoor {
            s,
            r_v: nz(),
            r_w: nz(),
            alpha_v: nz(),
            alpha_w: nz(),
            alpha_y: nz(),
            beta: nz(),
            gamma: nz(),
        })
    }
}

/// Everything the prover needs besides the witness. Generated per circuit;
/// its size is linear in the number of non-public wires plus the number of
/// constraints.
#[derive(Clone, Debug)]
pub struct EvaluationKey<G: BilinearGroup> {
    group: G,
    wire_count: usize,
    num_public_inputs: usize,
    num_public_outputs: usize,
    mid_wires: Vec<usize>,
    v: Vec<G::G1>,
    w: Vec<G::G2>,
    y: Vec<G::G1>,
    v_alpha: Vec<G::G1>,
    w_alpha: Vec<G::G2>,
    y_alpha: Vec<G::G1>,
    beta: Vec<G::G1>,
    /// `s^i · g1` for `i < max(m - 1, 1)`.
    powers: Vec<G::G1>,
}

/// Public verification data. Its size depends only on the number of public
/// values, never on the size of the computation.
#[derive(Clone, Debug)]
pub struct VerificationKey<G: BilinearGroup> {
    group: G,
    num_public_inputs: usize,
    num_public_outputs: usize,
    alpha_v: G::G2,
    alpha_w: G::G1,
    alpha_y: G::G2,
    gamma: G::G2,
    beta_gamma_g1: G::G1,
    beta_gamma_g2: G::G2,
    target: G::G2,
    /// Terms for the constant wire followed by every public value.
    io_v: Vec<G::G1>,
    io_w: Vec<G::G2>,
    io_y: Vec<G::G1>,
}

/// An eight-element proof. Fields are public so tests and adversarial
/// simulations can tamper with them.
pub struct Proof<G: BilinearGroup> {
    pub v_mid: G::G1,
    pub w_mid: G::G2,
    pub y_mid: G::G1,
    pub h: G::G1,
    pub v_alpha: G::G1,
    pub w_alpha: G::G2,
    pub y_alpha: G::G1,
    pub beta: G::G1,
}

impl<G: BilinearGroup> Clone for Proof<G> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<G: BilinearGroup> Copy for Proof<G> {}

impl<G: BilinearGroup> PartialEq for Proof<G> {
    fn eq(&self, o: &Self) -> bool {
        self.v_mid == o.v_mid
            && self.w_mid == o.w_mid
            && self.y_mid == o.y_mid
            && self.h == o.h
            && self.v_alpha == o.v_alpha
            && self.w_alpha == o.w_alpha
            && self.y_alpha == o.y_alpha
            && self.beta == o.beta
    }
}

impl<G: BilinearGroup> Eq for Proof<G> {}

impl<G: BilinearGroup> std::fmt::Debug for Proof<G> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Proof")
            .field("v_mid", &self.v_mid)
            .field("w_mid", &self.w_mid)
            .field("y_mid", &self.y_mid)
            .field("h", &self.h)
            .field("v_alpha", &self.v_alpha)
            .field("w_alpha", &self.w_alpha)
            .field("y_alpha", &self.y_alpha)
            .field("beta", &self.beta)
            .finish()
    }
}

/// Generates a key pair for `qap` from `seed`. The same seed always yields
/// the same keys; the trapdoor is wiped before returning.
pub fn setup<G: BilinearGroup>(
    group: &G,
    qap: &QuadraticProgram,
    seed: u64,
) -> Result<(EvaluationKey<G>, VerificationKey<G>), ProofError> {
    let field = qap.field();
    if group.scalar_field() != field {
        return Err(ProofError::KeyMismatch(format!(
            "group order {} differs from circuit field {}",
            group.scalar_field().modulus(),
            field.modulus()
        )));
    }
    let td = Trapdoor::sample(qap, seed)?;
    let el = |v: u64| field.element(v);
    let s = el(td.s);
    let (r_v, r_w) = (el(td.r_v), el(td.r_w));
    let r_y = r_v * r_w;
    let (a_v, a_w, a_y) = (el(td.alpha_v), el(td.alpha_w), el(td.alpha_y));
    let (beta, gamma) = (el(td.beta), el(td.gamma));
    drop(td);

    let evals = qap.wire_polys_at(s);
    let g1 = group.g1_generator();
    let g2 = group.g2_generator();
    let m1 = |k: FieldElement| group.g1_mul(&g1, k);
    let m2 = |k: FieldElement| group.g2_mul(&g2, k);

    let io = qap.public_io_range();
    let mid_wires: Vec<usize> = (1..qap.wire_count())
        .filter(|j| !io.contains(j) && qap.wire_is_used(*j))
        .collect();
    let n = mid_wires.len();
    let mut ek = EvaluationKey {
        group: group.clone(),
        wire_count: qap.wire_count(),
        num_public_inputs: qap.num_public_inputs(),
        num_public_outputs: qap.num_public_outputs(),
        mid_wires,
        v: Vec::with_capacity(n),
        w: Vec::with_capacity(n),
        y: Vec::with_capacity(n),
        v_alpha: Vec::with_capacity(n),
        w_alpha: Vec::with_capacity(n),
        y_alpha: Vec::with_capacity(n),
        beta: Vec::with_capacity(n),
        powers: Vec::new(),
    };
    for &k in &ek.mid_wires {
        let v = r_v * evals.v[k];
        let w = r_w * evals.w[k];
        let y = r_y * evals.y[k];
        ek.v.push(m1(v));
        ek.w.push(m2(w));
        ek.y.push(m1(y));
        ek.v_alpha.push(m1(a_v * v));
        ek.w_alpha.push(m2(a_w * w));
        ek.y_alpha.push(m1(a_y * y));
        ek.beta.push(m1(beta * (v + w + y)));
    }
    let mut p = field.one();
    for _ in 0..qap.degree().saturating_sub(1).max(1) {
        ek.powers.push(m1(p));
        p *= s;
    }

    let io_wires = std::iter::once(0).chain(io);
    let bg = beta * gamma;
    let vk = VerificationKey {
        group: group.clone(),
        num_public_inputs: qap.num_public_inputs(),
        num_public_outputs: qap.num_public_outputs(),
        alpha_v: m2(a_v),
        alpha_w: m1(a_w),
        alpha_y: m2(a_y),
        gamma: m2(gamma),
        beta_gamma_g1: m1(bg),
        beta_gamma_g2: m2(bg),
        target: m2(r_y * qap.target().evaluate(s)),
        io_v: io_wires.clone().map(|j| m1(r_v * evals.v[j])).collect(),
        io_w: io_wires.clone().map(|j| m2(r_w * evals.w[j])).collect(),
        io_y: io_wires.map(|j| m1(r_y * evals.y[j])).collect(),
    };
    Ok((ek, vk))
}

/// [`setup`] over a [`MockGroup`] for the circuit's field.
pub fn setup_mock(
    qap: &QuadraticProgram,
    seed: u64,
) -> Result<(EvaluationKey<MockGroup>, VerificationKey<MockGroup>), ProofError> {
    setup(&MockGroup::new(qap.field()), qap, seed)
}

/// Produces a proof that `witness` satisfies `qap`.
pub fn prove<G: BilinearGroup>(
    ek: &EvaluationKey<G>,
    qap: &QuadraticProgram,
    witness: &Witness,
) -> Result<Proof<G>, ProofError> {
    ek.check_matches(qap)?;
    let h = qap.compute_quotient(witness)?;
    ek.assemble(witness, h.coeffs())
}

/// Like [`prove`] but never checks that the witness satisfies the system: the
/// remainder of `p(x) / t(x)` is silently dropped. The result verifies only
/// if the witness was in fact valid. Used to model dishonest workers.
pub fn prove_unchecked<G: BilinearGroup>(
    ek: &EvaluationKey<G>,
    qap: &QuadraticProgram,
    witness: &Witness,
) -> Result<Proof<G>, ProofError> {
    ek.check_matches(qap)?;
    let (h, _) = qap.divide_by_target(witness)?;
    ek.assemble(witness, h.coeffs())
}

/// Checks `proof` against the public values `io`, which are the public
/// inputs followed by the public outputs. Uses a fixed number of pairings.
pub fn verify<G: BilinearGroup>(
    vk: &VerificationKey<G>,
    io: &[FieldElement],
    proof: &Proof<G>,
) -> Result<bool, ProofError> {
    let g = &vk.group;
    let expected = vk.io_len();
    if io.len() != expected {
        return Err(ProofError::IoLengthMismatch {
            expected,
            got: io.len(),
        });
    }
    let field = g.scalar_field();
    if let Some(bad) = io.iter().find(|x| x.field() != field) {
        return Err(ProofError::KeyMismatch(format!(
            "public value from field {} under key for field {}",
            bad.field().modulus(),
            field.modulus()
        )));
    }
    let g1 = g.g1_generator();
    let g2 = g.g2_generator();

    let v_io = g.g1_add(&vk.io_v[0], &g.g1_msm(&vk.io_v[1..], io));
    let w_io = g.g2_add(&vk.io_w[0], &g.g2_msm(&vk.io_w[1..], io));
    let y_io = g.g1_add(&vk.io_y[0], &g.g1_msm(&vk.io_y[1..], io));
    let v_full = g.g1_add(&v_io, &proof.v_mid);
    let w_full = g.g2_add(&w_io, &proof.w_mid);
    let y_full = g.g1_add(&y_io, &proof.y_mid);

    let alpha_v_ok = g.pairing(&proof.v_alpha, &g2) == g.pairing(&proof.v_mid, &vk.alpha_v);
    let alpha_w_ok = g.pairing(&g1, &proof.w_alpha) == g.pairing(&vk.alpha_w, &proof.w_mid);
    let alpha_y_ok = g.pairing(&proof.y_alpha, &g2) == g.pairing(&proof.y_mid, &vk.alpha_y);

    let vy = g.g1_add(&proof.v_mid, &proof.y_mid);
    let beta_ok = g.pairing(&proof.beta, &vk.gamma)
        == g.gt_mul(
            &g.pairing(&vy, &vk.beta_gamma_g2),
            &g.pairing(&vk.beta_gamma_g1, &proof.w_mid),
        );

    let div_ok = g.pairing(&v_full, &w_full)
        == g.gt_mul(&g.pairing(&proof.h, &vk.target), &g.pairing(&y_full, &g2));

    Ok(alpha_v_ok && alpha_w_ok && alpha_y_ok && beta_ok && div_ok)
}

/// Decodes `bytes` and verifies. Undecodable input is an error, not a
/// rejection.
pub fn verify_bytes<G: BilinearGroup>(
    vk: &VerificationKey<G>,
    io: &[FieldElement],
    bytes: &[u8],
) -> Result<bool, ProofError> {
    let proof = Proof::from_bytes(&vk.group, bytes)?;
    verify(vk, io, &proof)
}

impl<G: BilinearGroup> EvaluationKey<G> {
    pub fn group(&self) -> &G {
        &self.group
    }

    /// Indices of the wires the prover commits to.
    pub fn mid_wires(&self) -> &[usize] {
        &self.mid_wires
    }

    fn check_matches(&self, qap: &QuadraticProgram) -> Result<(), ProofError> {
        let same = self.group.scalar_field() == qap.field()
            && self.wire_count == qap.wire_count()
            && self.num_public_inputs == qap.num_public_inputs()
            && self.num_public_outputs == qap.num_public_outputs()
            && self.powers.len() == qap.degree().saturating_sub(1).max(1);
        if !same {
            return Err(ProofError::KeyMismatch(
                "evaluation key was generated for a different circuit".into(),
            ));
        }
        Ok(())
    }

    fn assemble(&self, witness: &Witness, h: &[FieldElement]) -> Result<Proof<G>, ProofError> {
        let g = &self.group;
        if h.len() > self.powers.len() {
            return Err(ProofError::KeyMismatch(format!(
                "quotient of degree {} exceeds the key's {} powers",
                h.len() - 1,
                self.powers.len()
            )));
        }
        let vals = witness.values();
        let mid: Vec<FieldElement> = self.mid_wires.iter().map(|&k| vals[k]).collect();
        Ok(Proof {
            v_mid: g.g1_msm(&self.v, &mid),
            w_mid: g.g2_msm(&self.w, &mid),
            y_mid: g.g1_msm(&self.y, &mid),
            h: g.g1_msm(&self.powers, h),
            v_alpha: g.g1_msm(&self.v_alpha, &mid),
            w_alpha: g.g2_msm(&self.w_alpha, &mid),
            y_alpha: g.g1_msm(&self.y_alpha, &mid),
            beta: g.g1_msm(&self.beta, &mid),
        })
    }

    /// ```text
    /// "CICE" | version | backend | modulus u64 | wire_count u32
    ///   | num_public_inputs u32 | num_public_outputs u32
    ///   | n u32 | n x wire u32 | v, w, y, v_alpha, w_alpha, y_alpha, beta (n each)
    ///   | k u32 | k x power
    /// ```
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        write_header(&mut out, EK_MAGIC, G::BACKEND_ID);
        out.extend_from_slice(&self.group.scalar_field().modulus().to_be_bytes());
        for n in [
            self.wire_count,
            self.num_public_inputs,
            self.num_public_outputs,
        ] {
            out.extend_from_slice(&(n as u32).to_be_bytes());
        }
        out.extend_from_slice(&(self.mid_wires.len() as u32).to_be_bytes());
        for &k in &self.mid_wires {
            out.extend_from_slice(&(k as u32).to_be_bytes());
        }
        for v in [&self.v, &self.y, &self.v_alpha, &self.y_alpha, &self.beta] {
            v.iter().for_each(|e| G::encode_g1(e, &mut out));
        }
        for v in [&self.w, &self.w_alpha] {
            v.iter().for_each(|e| G::encode_g2(e, &mut out));
        }
        out.extend_from_slice(&(self.powers.len() as u32).to_be_bytes());
        self.powers.iter().for_each(|e| G::encode_g1(e, &mut out));
        out
    }

    pub fn from_bytes(group: &G, bytes: &[u8]) -> Result<Self, ProofError> {
        Self::decode(group, bytes).map_err(ProofError::MalformedKey)
    }

    fn decode(group: &G, bytes: &[u8]) -> Result<Self, EncodingError> {
        let mut r = Reader::new(bytes);
        r.header(EK_MAGIC, G::BACKEND_ID)?;
        check_modulus(group, r.u64()?)?;
        let wire_count = r.u32()? as usize;
        let num_public_inputs = r.u32()? as usize;
        let num_public_outputs = r.u32()? as usize;
        let n = r.count(4 + 7 * G::ELEMENT_BYTES)?;
        let mut mid_wires = Vec::with_capacity(n);
        for _ in 0..n {
            let k = r.u32()? as usize;
            if k == 0 || k >= wire_count {
                return Err(EncodingError::BadHeader(format!(
                    "wire index {k} out of range"
                )));
            }
            mid_wires.push(k);
        }
        let g1s = |r: &mut Reader<'_>| {
            (0..n)
                .map(|_| group.decode_g1(r))
                .collect::<Result<Vec<_>, _>>()
        };
        let v = g1s(&mut r)?;
        let y = g1s(&mut r)?;
        let v_alpha = g1s(&mut r)?;
        let y_alpha = g1s(&mut r)?;
        let beta = g1s(&mut r)?;
        let g2s = |r: &mut Reader<'_>| {
            (0..n)
                .map(|_| group.decode_g2(r))
                .collect::<Result<Vec<_>, _>>()
        };
        let w = g2s(&mut r)?;
        let w_alpha = g2s(&mut r)?;
        let k = r.count(G::ELEMENT_BYTES)?;
        let powers = (0..k)
            .map(|_| group.decode_g1(&mut r))
            .collect::<Result<Vec<_>, _>>()?;
        r.finish()?;
        Ok(EvaluationKey {
            group: group.clone(),
            wire_count,
            num_public_inputs,
            num_public_outputs,
            mid_wires,
            v,
            w,
            y,
            v_alpha,
            w_alpha,
            y_alpha,
            beta,
            powers,
        })
    }
}

fn check_modulus<G: BilinearGroup>(group: &G, found: u64) -> Result<(), EncodingError> {
    let expected = group.scalar_field().modulus();
    if found != expected {
        return Err(EncodingError::ModulusMismatch { expected, found });
    }
    Ok(())
}

impl<G: BilinearGroup> VerificationKey<G> {
    pub fn group(&self) -> &G {
        &self.group
    }

    pub fn num_public_inputs(&self) -> usize {
        self.num_public_inputs
    }

    pub fn num_public_outputs(&self) -> usize {
        self.num_public_outputs
    }

    /// Number of public values a proof is checked against.
    pub fn io_len(&self) -> usize {
        self.num_public_inputs + self.num_public_outputs
    }

    /// ```text
    /// "CICV" | version | backend | modulus u64
    ///   | num_public_inputs u32 | num_public_outputs u32
    ///   | alpha_w, beta_gamma_g1 (G1) | alpha_v, alpha_y, gamma, beta_gamma_g2, target (G2)
    ///   | io_v (G1) | io_w (G2) | io_y (G1), each 1 + inputs + outputs long
    /// ```
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        write_header(&mut out, VK_MAGIC, G::BACKEND_ID);
        out.extend_from_slice(&self.group.scalar_field().modulus().to_be_bytes());
        out.extend_from_slice(&(self.num_public_inputs as u32).to_be_bytes());
        out.extend_from_slice(&(self.num_public_outputs as u32).to_be_bytes());
        G::encode_g1(&self.alpha_w, &mut out);
        G::encode_g1(&self.beta_gamma_g1, &mut out);
        for e in [
            &self.alpha_v,
            &self.alpha_y,
            &self.gamma,
            &self.beta_gamma_g2,
            &self.target,
        ] {
            G::encode_g2(e, &mut out);
        }
        self.io_v.iter().for_each(|e| G::encode_g1(e, &mut out));
        self.io_w.iter().for_each(|e| G::encode_g2(e, &mut out));
        self.io_y.iter().for_each(|e| G::encode_g1(e, &mut out));
        out
    }

    pub fn from_bytes(group: &G, bytes: &[u8]) -> Result<Self, ProofError> {
        Self::decode(group, bytes).map_err(ProofError::MalformedKey)
    }

    fn decode(group: &G, bytes: &[u8]) -> Result<Self, EncodingError> {
        let mut r = Reader::new(bytes);
        r.header(VK_MAGIC, G::BACKEND_ID)?;
        check_modulus(group, r.u64()?)?;
        let num_public_inputs = r.u32()? as usize;
        let num_public_outputs = r.u32()? as usize;
        let io = 1 + num_public_inputs + num_public_outputs;
        if io.saturating_mul(3 * G::ELEMENT_BYTES) > r.remaining() {
            return Err(EncodingError::LengthMismatch {
                expected: bytes.len() - r.remaining() + (7 + 3 * io) * G::ELEMENT_BYTES,
                got: bytes.len(),
            });
        }
        let alpha_w = group.decode_g1(&mut r)?;
        let beta_gamma_g1 = group.decode_g1(&mut r)?;
        let alpha_v = group.decode_g2(&mut r)?;
        let alpha_y = group.decode_g2(&mut r)?;
        let gamma = group.decode_g2(&mut r)?;
        let beta_gamma_g2 = group.decode_g2(&mut r)?;
        let target = group.decode_g2(&mut r)?;
        let io_v = (0..io)
            .map(|_| group.decode_g1(&mut r))
            .collect::<Result<_, _>>()?;
        let io_w = (0..io)
            .map(|_| group.decode_g2(&mut r))
            .collect::<Result<_, _>>()?;
        let io_y = (0..io)
            .map(|_| group.decode_g1(&mut r))
            .collect::<Result<_, _>>()?;
        r.finish()?;
        Ok(VerificationKey {
            group: group.clone(),
            num_public_inputs,
            num_public_outputs,
            alpha_v,
            alpha_w,
            alpha_y,
            gamma,
            beta_gamma_g1,
            beta_gamma_g2,
            target,
            io_v,
            io_w,
            io_y,
        })
    }
}

impl<G: BilinearGroup> Proof<G> {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(7 + PROOF_ELEMENTS * G::ELEMENT_BYTES);
        write_header(&mut out, PROOF_MAGIC, G::BACKEND_ID);
        out.push(PROOF_ELEMENTS as u8);
        G::encode_g1(&self.v_mid, &mut out);
        G::encode_g2(&self.w_mid, &mut out);
        G::encode_g1(&self.y_mid, &mut out);
        G::encode_g1(&self.h, &mut out);
        G::encode_g1(&self.v_alpha, &mut out);
        G::encode_g2(&self.w_alpha, &mut out);
        G::encode_g1(&self.y_alpha, &mut out);
        G::encode_g1(&self.beta, &mut out);
        out
    }

    pub fn from_bytes(group: &G, bytes: &[u8]) -> Result<Self, ProofError> {
        Self::decode(group, bytes).map_err(ProofError::MalformedProof)
    }

    fn decode(group: &G, bytes: &[u8]) -> Result<Self, EncodingError> {
        let expected = 7 + PROOF_ELEMENTS * G::ELEMENT_BYTES;
        let mut r = Reader::new(bytes);
        r.header(PROOF_MAGIC, G::BACKEND_ID)?;
        let count = r.u8()?;
        if count as usize != PROOF_ELEMENTS {
            return Err(EncodingError::BadHeader(format!(
                "proof declares {count} elements, expected {PROOF_ELEMENTS}"
            )));
        }
        if bytes.len() != expected {
            return Err(EncodingError::LengthMismatch {
                expected,
                got: bytes.len(),
            });
        }
        let proof = Proof {
            v_mid: group.decode_g1(&mut r)?,
            w_mid: group.decode_g2(&mut r)?,
            y_mid: group.decode_g1(&mut r)?,
            h: group.decode_g1(&mut r)?,
            v_alpha: group.decode_g1(&mut r)?,
            w_alpha: group.decode_g2(&mut r)?,
            y_alpha: group.decode_g1(&mut r)?,
            beta: group.decode_g1(&mut r)?,
        };
        r.finish()?;
        Ok(proof)
    }
}
