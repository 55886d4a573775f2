//! Quadratic arithmetic programs.
//!
//! A constraint system with `m` rows is encoded by interpolating every column
//! of `A`, `B` and `C` over the evaluation points `1, 2, ..., m`: wire `j`
//! gets polynomials `v_j`, `w_j`, `y_j` with `v_j(i) = A_i[j]` and so on. A
//! witness `s` satisfies the system exactly when
//!
//! ```text
//! p(x) = (Σ s_j v_j(x)) · (Σ s_j w_j(x)) - (Σ s_j y_j(x))
//! ```
//!
//! vanishes on every evaluation point, i.e. when the target polynomial
//! `t(x) = Π (x - i)` divides `p(x)`. The quotient `h(x) = p(x) / t(x)` is what
//! the prover commits to.
//!
//! The per-wire polynomials are produced on demand ([`QuadraticProgram::v_poly`]
//! and friends). Setup only needs their values at one secret point and the
//! prover only needs the witness-weighted sums, both of which are computed
//! directly from the sparse rows without materializing `3 * wire_count` dense
//! polynomials of degree `m - 1`.

use std::ops::Range;

use thiserror::Error;

use crate::circuit::{ConstraintSystem, Witness};
use crate::field::{FieldElement, PrimeField};
use crate::poly::Polynomial;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QapError {
    #[error("constraint system has no constraints")]
    EmptySystem,
    #[error("field of size {modulus} is too small for {constraints} evaluation points")]
    FieldTooSmall { modulus: u64, constraints: usize },
    #[error("witness has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("target polynomial does not divide p(x): the witness does not satisfy the system")]
    NotDivisible,
}

/// Which of the three constraint matrices a column comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Matrix {
    A,
    B,
    C,
}

/// Values of every wire polynomial at a single point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WireEvaluations {
    pub v: Vec<FieldElement>,
    pub w: Vec<FieldElement>,
    pub y: Vec<FieldElement>,
}

type Column = Vec<(u32, u64)>;

#[derive(Clone, Debug)]
pub struct QuadraticProgram {
    cs: ConstraintSystem,
    // columns[matrix][wire] = sparse (row, coefficient) list
    columns: [Vec<Column>; 3],
    target: Polynomial,
    eval_points: Vec<FieldElement>,
    // 1 / Π_{j≠i} (r_i - r_j)
    barycentric: Vec<FieldElement>,
    // 1 / k! for k < m
    inv_factorials: Vec<u64>,
}

/// Encodes `cs` as a QAP over the points `1..=m`.
pub fn r1cs_to_qap(cs: &ConstraintSystem) -> Result<QuadraticProgram, QapError> {
    QuadraticProgram::new(cs)
}

impl QuadraticProgram {
    pub fn new(cs: &ConstraintSystem) -> Result<Self, QapError> {
        let m = cs.num_constraints();
        let field = cs.field();
        if m == 0 {
            return Err(QapError::EmptySystem);
        }
        if (m as u64) >= field.modulus() {
            return Err(QapError::FieldTooSmall {
                modulus: field.modulus(),
                constraints: m,
            });
        }

        let mut columns: [Vec<Column>; 3] =
            std::array::from_fn(|_| vec![Vec::new(); cs.wire_count()]);
        for (i, row) in cs.constraints().iter().enumerate() {
            for (k, lc) in [&row.a, &row.b, &row.c].into_iter().enumerate() {
                for &(wire, coeff) in lc.terms() {
                    columns[k][wire].push((i as u32, coeff.value()));
                }
            }
        }

        let eval_points: Vec<FieldElement> = (1..=m as u64).map(|i| field.element(i)).collect();
        let target = Polynomial::vanishing(field, &eval_points);

        // For consecutive points 1..m: Π_{j≠i} (i - j) = (i-1)! · (-1)^(m-i) · (m-i)!
        let mut factorial = Vec::with_capacity(m);
        factorial.push(field.one());
        for k in 1..m as u64 {
            let prev = *factorial.last().unwrap();
            factorial.push(prev * field.element(k));
        }
        let mut barycentric: Vec<FieldElement> = (1..=m)
            .map(|i| {
                let d = factorial[i - 1] * factorial[m - i];
                if (m - i) % 2 == 1 {
                    -d
                } else {
                    d
                }
            })
            .collect();
        field
            .batch_invert(&mut barycentric)
            .expect("factorials of integers below p are nonzero");
        let mut inv_factorials = factorial;
        field
            .batch_invert(&mut inv_factorials)
            .expect("factorials of integers below p are nonzero");
        let inv_factorials = inv_factorials.into_iter().map(|v| v.value()).collect();

        Ok(QuadraticProgram {
            cs: cs.clone(),
            columns,
            target,
            eval_points,
            barycentric,
            inv_factorials,
        })
    }

    pub fn field(&self) -> PrimeField {
        self.cs.field()
    }

    pub fn constraint_system(&self) -> &ConstraintSystem {
        &self.cs
    }

    /// Number of constraints, which is also `deg t`.
    pub fn degree(&self) -> usize {
        self.eval_points.len()
    }

    pub fn wire_count(&self) -> usize {
        self.cs.wire_count()
    }

    pub fn num_public_inputs(&self) -> usize {
        self.cs.num_public_inputs()
    }

    pub fn num_public_outputs(&self) -> usize {
        self.cs.num_public_outputs()
    }

    pub fn public_io_range(&self) -> Range<usize> {
        self.cs.public_io_range()
    }

    pub fn target(&self) -> &Polynomial {
        &self.target
    }

    pub fn eval_points(&self) -> &[FieldElement] {
        &self.eval_points
    }

    /// Whether wire `j` has a nonzero polynomial in any of the three matrices.
    pub fn wire_is_used(&self, j: usize) -> bool {
        self.columns.iter().any(|c| !c[j].is_empty())
    }

    fn column(&self, matrix: Matrix, j: usize) -> &Column {
        &self.columns[matrix as usize][j]
    }

    /// The interpolated polynomial of column `j` of `matrix`.
    pub fn wire_poly(&self, matrix: Matrix, j: usize) -> Polynomial {
        let m = self.degree();
        let mut dense = vec![0u64; m];
        for &(row, c) in self.column(matrix, j) {
            dense[row as usize] = c;
        }
        let [p] = self.interpolate_on_domain([&dense]);
        p
    }

    pub fn v_poly(&self, j: usize) -> Polynomial {
        self.wire_poly(Matrix::A, j)
    }

    pub fn w_poly(&self, j: usize) -> Polynomial {
        self.wire_poly(Matrix::B, j)
    }

    pub fn y_poly(&self, j: usize) -> Polynomial {
        self.wire_poly(Matrix::C, j)
    }

    /// `L_i(s)` for every Lagrange basis polynomial of the domain.
    pub fn lagrange_basis_at(&self, s: FieldElement) -> Vec<FieldElement> {
        let field = self.field();
        let m = self.degree();
        if s.value() >= 1 && s.value() <= m as u64 {
            let mut unit = vec![field.zero(); m];
            unit[s.value() as usize - 1] = field.one();
            return unit;
        }
        let mut diffs: Vec<FieldElement> = self.eval_points.iter().map(|&r| s - r).collect();
        field
            .batch_invert(&mut diffs)
            .expect("s is not an evaluation point");
        let z = self.target.evaluate(s);
        diffs
            .iter()
            .zip(&self.barycentric)
            .map(|(inv, b)| z * *b * *inv)
            .collect()
    }

    /// `v_j(s)`, `w_j(s)`, `y_j(s)` for every wire.
    pub fn wire_polys_at(&self, s: FieldElement) -> WireEvaluations {
        let field = self.field();
        let basis = self.lagrange_basis_at(s);
        let eval = |cols: &Vec<Column>| -> Vec<FieldElement> {
            cols.iter()
                .map(|col| {
                    let mut acc = 0u64;
                    for &(row, c) in col {
                        acc = field.add_raw(acc, field.mul_raw(c, basis[row as usize].value()));
                    }
                    field.wrap(acc)
                })
                .collect()
        };
        WireEvaluations {
            v: eval(&self.columns[0]),
            w: eval(&self.columns[1]),
            y: eval(&self.columns[2]),
        }
    }

    /// Interpolates polynomials given by their values on `1..=m`.
    ///
    /// On consecutive integer points the Newton form needs only forward
    /// differences: `P(x) = Σ_k Δ^k y_1 / k! · (x-1)(x-2)...(x-k)`. The nested
    /// form is then expanded to coefficients from the inside out.
    fn interpolate_on_domain<const K: usize>(&self, values: [&[u64]; K]) -> [Polynomial; K] {
        let field = self.field();
        let m = self.degree();
        values.map(|ys| {
            let mut diff = ys.to_vec();
            let mut newton = Vec::with_capacity(m);
            for k in 0..m {
                newton.push(field.mul_raw(diff[0], self.inv_factorials[k]));
                for i in 0..m - k - 1 {
                    diff[i] = field.sub_raw(diff[i + 1], diff[i]);
                }
            }
            let top = newton.iter().rposition(|&c| c != 0);
            let mut coeffs: Vec<u64> = Vec::with_capacity(m);
            if let Some(top) = top {
                coeffs.push(newton[top]);
                for k in (0..top).rev() {
                    // coeffs = coeffs * (x - (k + 1)) + newton[k]
                    let node = (k + 1) as u64;
                    coeffs.push(0);
                    for i in (1..coeffs.len()).rev() {
                        coeffs[i] = field.sub_raw(coeffs[i - 1], field.mul_raw(coeffs[i], node));
                    }
                    coeffs[0] = field.sub_raw(newton[k], field.mul_raw(coeffs[0], node));
                }
            }
            Polynomial::new(coeffs.into_iter().map(|c| field.wrap(c)).collect())
        })
    }

    /// Row-wise `(<A_i, s>, <B_i, s>, <C_i, s>)`.
    fn row_values(&self, w: &Witness) -> [Vec<u64>; 3] {
        let field = self.field();
        let s = w.values();
        let mut out = [(); 3].map(|_| Vec::with_capacity(self.degree()));
        for row in self.cs.constraints() {
            for (k, lc) in [&row.a, &row.b, &row.c].into_iter().enumerate() {
                out[k].push(lc.evaluate(s, field).value());
            }
        }
        out
    }

    fn check_length(&self, w: &Witness) -> Result<(), QapError> {
        if w.len() != self.wire_count() {
            return Err(QapError::LengthMismatch {
                expected: self.wire_count(),
                got: w.len(),
            });
        }
        Ok(())
    }

    /// `p(x)` for witness `w`, together with its three factors.
    pub fn witness_polynomial(&self, w: &Witness) -> Result<Polynomial, QapError> {
        self.check_length(w)?;
        let [a, b, c] = self.row_values(w);
        let [pa, pb, pc] = self.interpolate_on_domain([&a, &b, &c]);
        Ok(&(&pa * &pb) - &pc)
    }

    /// Divides `p(x)` by `t(x)` and returns quotient and remainder without
    /// judging the result.
    pub fn divide_by_target(&self, w: &Witness) -> Result<(Polynomial, Polynomial), QapError> {
        let p = self.witness_polynomial(w)?;
        Ok(p.div_rem(&self.target).expect("target is nonzero"))
    }

    /// The quotient `h(x)` with `p(x) = h(x) t(x)`; fails with
    /// [`QapError::NotDivisible`] for unsatisfying witnesses.
    pub fn compute_quotient(&self, w: &Witness) -> Result<Polynomial, QapError> {
        let (h, r) = self.divide_by_target(w)?;
        if !r.is_zero() {
            return Err(QapError::NotDivisible);
        }
        Ok(h)
    }
}

/// Free-function form of [`QuadraticProgram::compute_quotient`].
pub fn compute_quotient(qap: &QuadraticProgram, w: &Witness) -> Result<Polynomial, QapError> {
    qap.compute_quotient(w)
}
