//! Arithmetic circuits over a prime field.
//!
//! Wire layout is fixed for every circuit:
//!
//! | wires                                   | role                 |
//! |-----------------------------------------|----------------------|
//! | `0`                                     | the constant one     |
//! | `1 ..= npi`                             | public inputs        |
//! | `npi + 1 ..= npi + npo`                 | public outputs       |
//! | next `n_private` wires                  | private inputs       |
//! | everything after                        | gate outputs         |
//!
//! so the public IO occupies the contiguous range `1 .. 1 + npi + npo`.
//!
//! Besides the usual `add`, `mul` and `const_mul` gates a circuit may contain
//! advice gates, whose values are supplied by the prover (bits of a wire, an
//! inverse) and are only meaningful together with assertion gates that pin
//! them down.

mod builder;
pub mod gadgets;
pub(crate) mod r1cs;

use std::ops::Range;

use thiserror::Error;

use crate::field::{FieldElement, PrimeField};

pub use builder::CircuitBuilder;
pub use r1cs::{check_r1cs, to_r1cs, Constraint, ConstraintSystem, LinearCombination};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CircuitError {
    #[error("expected {expected} {kind} inputs, got {got}")]
    InputArityMismatch {
        kind: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("malformed circuit: {0}")]
    MalformedCircuit(String),
    #[error("assertion gate #{gate} does not hold for these inputs")]
    AssertionFailed { gate: usize },
    #[error("public output {0} was never assigned")]
    OutputNotSet(usize),
    #[error("bit width {width} exceeds the field limit of {max}")]
    WidthTooLarge { width: u32, max: u32 },
    #[error("witness has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("input {value} on wire {wire} has no field representative (p = {modulus})")]
    InputOutOfField {
        wire: usize,
        value: u64,
        modulus: u64,
    },
}

/// Index of a wire in a circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Wire(pub usize);

impl Wire {
    /// The constant-one wire.
    pub const ONE: Wire = Wire(0);

    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

/// Prover-computed values.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Hint {
    /// Bit `index` of the canonical integer representative of `source`.
    Bit { source: Wire, index: u32 },
    /// `1 / source`, or zero when `source` is zero.
    InverseOrZero { source: Wire },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate {
    Add {
        left: Wire,
        right: Wire,
        out: Wire,
    },
    Mul {
        left: Wire,
        right: Wire,
        out: Wire,
    },
    ConstMul {
        coeff: FieldElement,
        input: Wire,
        out: Wire,
    },
    Advice {
        hint: Hint,
        out: Wire,
    },
    /// Requires `left * right == product`; writes no wire.
    Assert {
        left: Wire,
        right: Wire,
        product: Wire,
    },
}

impl Gate {
    pub fn out(&self) -> Option<Wire> {
        match *self {
            Gate::Add { out, .. }
            | Gate::Mul { out, .. }
            | Gate::ConstMul { out, .. }
            | Gate::Advice { out, .. } => Some(out),
            Gate::Assert { .. } => None,
        }
    }

    /// Wires read by the gate; unused slots are `None`.
    pub fn inputs(&self) -> [Option<Wire>; 3] {
        match *self {
            Gate::Add { left, right, .. } | Gate::Mul { left, right, .. } => {
                [Some(left), Some(right), None]
            }
            Gate::ConstMul { input, .. } => [Some(input), None, None],
            Gate::Advice { hint, .. } => match hint {
                Hint::Bit { source, .. } | Hint::InverseOrZero { source } => {
                    [Some(source), None, None]
                }
            },
            Gate::Assert {
                left,
                right,
                product,
            } => [Some(left), Some(right), Some(product)],
        }
    }
}

/// A gate-level program. Construct one with [`CircuitBuilder`] or
/// [`ArithmeticCircuit::new`], which validates the wiring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArithmeticCircuit {
    field: PrimeField,
    num_public_inputs: usize,
    num_public_outputs: usize,
    num_private_inputs: usize,
    wire_count: usize,
    gates: Vec<Gate>,
}

impl ArithmeticCircuit {
    pub fn new(
        field: PrimeField,
        num_public_inputs: usize,
        num_public_outputs: usize,
        num_private_inputs: usize,
        wire_count: usize,
        gates: Vec<Gate>,
    ) -> Result<Self, CircuitError> {
        let c = ArithmeticCircuit {
            field,
            num_public_inputs,
            num_public_outputs,
            num_private_inputs,
            wire_count,
            gates,
        };
        c.validate()?;
        Ok(c)
    }

    /// Checks the structural invariants: wires in range, topological order,
    /// single assignment, and every wire assigned.
    pub fn validate(&self) -> Result<(), CircuitError> {
        let malformed = |msg: String| Err(CircuitError::MalformedCircuit(msg));
        let first_gate_wire = self.first_internal_wire();
        if self.wire_count < first_gate_wire {
            return malformed(format!(
                "wire count {} is smaller than the {} reserved wires",
                self.wire_count, first_gate_wire
            ));
        }
        let mut assigned = vec![false; self.wire_count];
        assigned[0] = true;
        for w in self.public_input_wires().chain(self.private_input_wires()) {
            assigned[w.index()] = true;
        }
        for (i, gate) in self.gates.iter().enumerate() {
            for w in gate.inputs().into_iter().flatten() {
                if w.index() >= self.wire_count {
                    return malformed(format!("gate #{i} reads wire {} out of range", w.0));
                }
                if !assigned[w.index()] {
                    return malformed(format!("gate #{i} reads unassigned wire {}", w.0));
                }
            }
            if let Gate::ConstMul { coeff, .. } = gate {
                if coeff.field() != self.field {
                    return malformed(format!("gate #{i} has a coefficient from another field"));
                }
            }
            if let Some(out) = gate.out() {
                if out.index() >= self.wire_count {
                    return malformed(format!("gate #{i} writes wire {} out of range", out.0));
                }
                if assigned[out.index()] {
                    return malformed(format!("gate #{i} writes wire {} twice", out.0));
                }
                assigned[out.index()] = true;
            }
        }
        for w in self.public_output_wires() {
            if !assigned[w.index()] {
                return Err(CircuitError::OutputNotSet(
                    w.index() - 1 - self.num_public_inputs,
                ));
            }
        }
        if let Some(w) = assigned.iter().position(|a| !a) {
            return malformed(format!("wire {w} is never assigned"));
        }
        Ok(())
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn num_public_inputs(&self) -> usize {
        self.num_public_inputs
    }

    pub fn num_public_outputs(&self) -> usize {
        self.num_public_outputs
    }

    pub fn num_private_inputs(&self) -> usize {
        self.num_private_inputs
    }

    pub fn wire_count(&self) -> usize {
        self.wire_count
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn mul_gate_count(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| matches!(g, Gate::Mul { .. }))
            .count()
    }

    /// Wire index range of the public inputs followed by the public outputs.
    pub fn public_io_range(&self) -> Range<usize> {
        1..1 + self.num_public_inputs + self.num_public_outputs
    }

    pub fn public_input_wires(&self) -> impl Iterator<Item = Wire> {
        (1..1 + self.num_public_inputs).map(Wire)
    }

    pub fn public_output_wires(&self) -> impl Iterator<Item = Wire> {
        let start = 1 + self.num_public_inputs;
        (start..start + self.num_public_outputs).map(Wire)
    }

    pub fn private_input_wires(&self) -> impl Iterator<Item = Wire> {
        let start = self.public_io_range().end;
        (start..start + self.num_private_inputs).map(Wire)
    }

    fn first_internal_wire(&self) -> usize {
        self.public_io_range().end + self.num_private_inputs
    }

    /// Runs the circuit, producing a full wire assignment.
    pub fn evaluate(
        &self,
        public_in: &[FieldElement],
        private_in: &[FieldElement],
    ) -> Result<Witness, CircuitError> {
        if public_in.len() != self.num_public_inputs {
            return Err(CircuitError::InputArityMismatch {
                kind: "public",
                expected: self.num_public_inputs,
                got: public_in.len(),
            });
        }
        if private_in.len() != self.num_private_inputs {
            return Err(CircuitError::InputArityMismatch {
                kind: "private",
                expected: self.num_private_inputs,
                got: private_in.len(),
            });
        }
        let f = self.field;
        let mut values = vec![f.zero(); self.wire_count];
        values[0] = f.one();
        for (w, v) in self.public_input_wires().zip(public_in) {
            values[w.index()] = *v;
        }
        for (w, v) in self.private_input_wires().zip(private_in) {
            values[w.index()] = *v;
        }
        for (i, gate) in self.gates.iter().enumerate() {
            let get = |w: Wire| values[w.index()];
            match *gate {
                Gate::Add { left, right, out } => values[out.index()] = get(left) + get(right),
                Gate::Mul { left, right, out } => values[out.index()] = get(left) * get(right),
                Gate::ConstMul { coeff, input, out } => values[out.index()] = coeff * get(input),
                Gate::Advice { hint, out } => {
                    values[out.index()] = match hint {
                        Hint::Bit { source, index } => {
                            let v = get(source).value();
                            let bit = if index < 64 { (v >> index) & 1 } else { 0 };
                            f.element(bit)
                        }
                        Hint::InverseOrZero { source } => {
                            get(source).inverse().unwrap_or_else(|_| f.zero())
                        }
                    }
                }
                Gate::Assert {
                    left,
                    right,
                    product,
                } => {
                    if get(left) * get(right) != get(product) {
                        return Err(CircuitError::AssertionFailed { gate: i });
                    }
                }
            }
        }
        Ok(Witness { values })
    }

    /// [`evaluate`](Self::evaluate) with plain integer inputs, which must all be
    /// canonical field representatives.
    pub fn evaluate_u64(
        &self,
        public_in: &[u64],
        private_in: &[u64],
    ) -> Result<Witness, CircuitError> {
        let conv = |vals: &[u64], first: usize| -> Result<Vec<FieldElement>, CircuitError> {
            vals.iter()
                .enumerate()
                .map(|(i, &v)| {
                    if v >= self.field.modulus() {
                        Err(CircuitError::InputOutOfField {
                            wire: first + i,
                            value: v,
                            modulus: self.field.modulus(),
                        })
                    } else {
                        Ok(self.field.element(v))
                    }
                })
                .collect()
        };
        let public = conv(public_in, 1)?;
        let private = conv(private_in, self.public_io_range().end)?;
        self.evaluate(&public, &private)
    }
}

/// A full assignment of values to wires; `values[0]` is always one for honest
/// witnesses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    values: Vec<FieldElement>,
}

impl Witness {
    pub fn from_values(values: Vec<FieldElement>) -> Self {
        Witness { values }
    }

    pub fn values(&self) -> &[FieldElement] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, wire: Wire) -> FieldElement {
        self.values[wire.index()]
    }

    /// Overwrites a single entry. Mostly useful for building corrupted
    /// witnesses in tests.
    pub fn set(&mut self, wire: Wire, value: FieldElement) {
        self.values[wire.index()] = value;
    }

    /// Public inputs followed by public outputs.
    pub fn public_io(&self, range: Range<usize>) -> Vec<FieldElement> {
        self.values[range].to_vec()
    }
}
