//! Lowering of arithmetic circuits to rank-1 constraint systems.
//!
//! Every multiplication and assertion gate becomes exactly one constraint
//! `<A, s> * <B, s> = <C, s>`. Addition and constant-multiplication gates do
//! not: their outputs are folded into linear combinations over the variables
//! that feed them. A linear wire becomes a variable of its own, bound by
//! `<lc, s> * 1 = s_out`, only when it is a public output or when its
//! combination would exceed [`MAX_LINEAR_TERMS`] terms.

use std::fmt::Write as _;
use std::ops::Range;

use crate::field::{FieldElement, PrimeField};

use super::{ArithmeticCircuit, CircuitError, Gate, Wire, Witness};

/// Linear combinations longer than this are materialized into a fresh
/// variable so that heavy fan-out cannot blow up row sizes.
pub const MAX_LINEAR_TERMS: usize = 32;

/// A sparse row: `(wire, coefficient)` pairs sorted by wire, without zero
/// coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LinearCombination {
    terms: Vec<(usize, FieldElement)>,
}

impl LinearCombination {
    pub fn single(wire: Wire, coeff: FieldElement) -> Self {
        let mut lc = LinearCombination { terms: Vec::new() };
        if !coeff.is_zero() {
            lc.terms.push((wire.index(), coeff));
        }
        lc
    }

    /// Builds a combination from arbitrary terms, merging duplicates.
    pub fn from_terms(mut terms: Vec<(usize, FieldElement)>) -> Self {
        terms.sort_by_key(|t| t.0);
        let mut merged: Vec<(usize, FieldElement)> = Vec::with_capacity(terms.len());
        for (w, c) in terms {
            match merged.last_mut() {
                Some(last) if last.0 == w => last.1 += c,
                _ => merged.push((w, c)),
            }
        }
        merged.retain(|t| !t.1.is_zero());
        LinearCombination { terms: merged }
    }

    pub fn terms(&self) -> &[(usize, FieldElement)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `wire`, zero when absent.
    pub fn coefficient(&self, wire: usize, field: PrimeField) -> FieldElement {
        self.terms
            .binary_search_by_key(&wire, |t| t.0)
            .map(|i| self.terms[i].1)
            .unwrap_or_else(|_| field.zero())
    }

    fn scale(mut self, k: FieldElement) -> Self {
        if k.is_zero() {
            self.terms.clear();
        } else {
            for t in &mut self.terms {
                t.1 *= k;
            }
        }
        self
    }

    fn merge(self, other: Self) -> Self {
        let (a, b) = (self.terms, other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = a[i].1 + b[j].1;
                    if !c.is_zero() {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        LinearCombination { terms: out }
    }

    /// `<self, values>`.
    pub fn evaluate(&self, values: &[FieldElement], field: PrimeField) -> FieldElement {
        let mut acc = 0u64;
        for &(w, c) in &self.terms {
            acc = field.add_raw(acc, field.mul_raw(c.value(), values[w].value()));
        }
        field.element(acc)
    }

    fn render(&self, out: &mut String) {
        if self.terms.is_empty() {
            out.push('-');
            return;
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{w}:{c}");
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub a: LinearCombination,
    pub b: LinearCombination,
    pub c: LinearCombination,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintSystem {
    field: PrimeField,
    constraints: Vec<Constraint>,
    wire_count: usize,
    num_public_inputs: usize,
    num_public_outputs: usize,
    is_variable: Vec<bool>,
}

impl ConstraintSystem {
    /// Assembles a system directly from rows. Wires 0 and the public IO range
    /// are always treated as variables.
    pub fn new(
        field: PrimeField,
        constraints: Vec<Constraint>,
        wire_count: usize,
        num_public_inputs: usize,
        num_public_outputs: usize,
    ) -> Result<Self, CircuitError> {
        if 1 + num_public_inputs + num_public_outputs > wire_count {
            return Err(CircuitError::MalformedCircuit(
                "public IO range exceeds the wire count".into(),
            ));
        }
        let mut is_variable = vec![false; wire_count];
        for v in is_variable
            .iter_mut()
            .take(1 + num_public_inputs + num_public_outputs)
        {
            *v = true;
        }
        for row in &constraints {
            for lc in [&row.a, &row.b, &row.c] {
                for &(w, c) in lc.terms() {
                    if w >= wire_count {
                        return Err(CircuitError::MalformedCircuit(format!(
                            "constraint references wire {w} out of range"
                        )));
                    }
                    if c.field() != field {
                        return Err(CircuitError::MalformedCircuit(
                            "constraint coefficient from another field".into(),
                        ));
                    }
                    is_variable[w] = true;
                }
            }
        }
        Ok(ConstraintSystem {
            field,
            constraints,
            wire_count,
            num_public_inputs,
            num_public_outputs,
            is_variable,
        })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn wire_count(&self) -> usize {
        self.wire_count
    }

    pub fn num_public_inputs(&self) -> usize {
        self.num_public_inputs
    }

    pub fn num_public_outputs(&self) -> usize {
        self.num_public_outputs
    }

    pub fn public_io_range(&self) -> Range<usize> {
        1..1 + self.num_public_inputs + self.num_public_outputs
    }

    /// Wires that carry a value the constraints can see: the constant, the
    /// public IO, and every wire referenced by some row. Linear wires that
    /// were folded away are excluded.
    pub fn variable_wires(&self) -> impl Iterator<Item = Wire> + '_ {
        self.is_variable
            .iter()
            .enumerate()
            .filter(|(_, v)| **v)
            .map(|(i, _)| Wire(i))
    }

    pub fn is_variable(&self, wire: Wire) -> bool {
        self.is_variable[wire.index()]
    }

    /// Line-oriented text dump: one constraint per line, `A | B | C`, each a
    /// space-separated list of `wire:coeff` pairs (`-` when empty).
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for row in &self.constraints {
            row.a.render(&mut out);
            out.push_str(" | ");
            row.b.render(&mut out);
            out.push_str(" | ");
            row.c.render(&mut out);
            out.push('\n');
        }
        out
    }
}

/// Lowers a circuit to R1CS. See the module docs for the folding rules.
pub fn to_r1cs(circuit: &ArithmeticCircuit) -> Result<ConstraintSystem, CircuitError> {
    circuit.validate()?;
    let field = circuit.field();
    let n = circuit.wire_count();
    let outputs = {
        let start = 1 + circuit.num_public_inputs();
        start..start + circuit.num_public_outputs()
    };

    let mut uses = vec![0u32; n];
    for g in circuit.gates() {
        for w in g.inputs().into_iter().flatten() {
            uses[w.index()] += 1;
        }
    }

    // `None` means the wire is its own variable.
    let mut folded: Vec<Option<LinearCombination>> = vec![None; n];
    let one = field.one();
    let take = |w: Wire, uses: &mut [u32], folded: &mut [Option<LinearCombination>]| {
        let i = w.index();
        uses[i] -= 1;
        match &folded[i] {
            None => LinearCombination::single(w, one),
            Some(lc) if uses[i] > 0 => lc.clone(),
            Some(_) => folded[i].take().unwrap(),
        }
    };

    let mut constraints = Vec::new();
    for gate in circuit.gates() {
        let linear = match *gate {
            Gate::Add { left, right, out } => {
                let l = take(left, &mut uses, &mut folded);
                let r = take(right, &mut uses, &mut folded);
                Some((out, l.merge(r)))
            }
            Gate::ConstMul { coeff, input, out } => {
                Some((out, take(input, &mut uses, &mut folded).scale(coeff)))
            }
            Gate::Mul { left, right, out } => {
                let a = take(left, &mut uses, &mut folded);
                let b = take(right, &mut uses, &mut folded);
                constraints.push(Constraint {
                    a,
                    b,
                    c: LinearCombination::single(out, one),
                });
                None
            }
            Gate::Advice { .. } => None,
            Gate::Assert {
                left,
                right,
                product,
            } => {
                let a = take(left, &mut uses, &mut folded);
                let b = take(right, &mut uses, &mut folded);
                let c = take(product, &mut uses, &mut folded);
                constraints.push(Constraint { a, b, c });
                None
            }
        };
        if let Some((out, lc)) = linear {
            if outputs.contains(&out.index()) || lc.len() > MAX_LINEAR_TERMS {
                constraints.push(Constraint {
                    a: lc,
                    b: LinearCombination::single(Wire::ONE, one),
                    c: LinearCombination::single(out, one),
                });
            } else if uses[out.index()] > 0 {
                folded[out.index()] = Some(lc);
            }
        }
    }

    ConstraintSystem::new(
        field,
        constraints,
        n,
        circuit.num_public_inputs(),
        circuit.num_public_outputs(),
    )
}

/// True iff `<A_i, s> * <B_i, s> = <C_i, s>` for every row and `s[0] = 1`.
pub fn check_r1cs(cs: &ConstraintSystem, witness: &Witness) -> Result<bool, CircuitError> {
    if witness.len() != cs.wire_count {
        return Err(CircuitError::LengthMismatch {
            expected: cs.wire_count,
            got: witness.len(),
        });
    }
    let s = witness.values();
    let f = cs.field;
    if s[0] != f.one() {
        return Ok(false);
    }
    Ok(cs
        .constraints
        .iter()
        .all(|row| row.a.evaluate(s, f) * row.b.evaluate(s, f) == row.c.evaluate(s, f)))
}
