use crate::field::{FieldElement, PrimeField};

use super::{ArithmeticCircuit, CircuitError, Gate, Hint, Wire};

/// Append-only circuit construction with explicit wire handles.
///
/// The IO shape is fixed up front so that wire indices of inputs and outputs
/// follow the layout documented in [`crate::circuit`].
///
/// ```
/// use cic_core::circuit::CircuitBuilder;
/// use cic_core::field::PrimeField;
///
/// let mut b = CircuitBuilder::new(PrimeField::mersenne61(), 2, 1, 0);
/// let (x, y) = (b.public_input(0), b.public_input(1));
/// let xy = b.mul(x, y);
/// let out = b.add(xy, x);
/// b.set_output(0, out);
/// let circuit = b.finish().unwrap();
///
/// let w = circuit.evaluate_u64(&[3, 4], &[]).unwrap();
/// assert_eq!(w.public_io(circuit.public_io_range())[2].value(), 15);
/// ```
#[derive(Debug, Clone)]
pub struct CircuitBuilder {
    field: PrimeField,
    num_public_inputs: usize,
    num_public_outputs: usize,
    num_private_inputs: usize,
    next_wire: usize,
    gates: Vec<Gate>,
    outputs_set: Vec<bool>,
    mul_gates: usize,
}

impl CircuitBuilder {
    pub fn new(
        field: PrimeField,
        num_public_inputs: usize,
        num_public_outputs: usize,
        num_private_inputs: usize,
    ) -> Self {
        CircuitBuilder {
            field,
            num_public_inputs,
            num_public_outputs,
            num_private_inputs,
            next_wire: 1 + num_public_inputs + num_public_outputs + num_private_inputs,
            gates: Vec::new(),
            outputs_set: vec![false; num_public_outputs],
            mul_gates: 0,
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn one(&self) -> Wire {
        Wire::ONE
    }

    pub fn public_input(&self, i: usize) -> Wire {
        assert!(i < self.num_public_inputs, "public input {i} out of range");
        Wire(1 + i)
    }

    pub fn public_inputs(&self) -> Vec<Wire> {
        (0..self.num_public_inputs)
            .map(|i| self.public_input(i))
            .collect()
    }

    pub fn private_input(&self, i: usize) -> Wire {
        assert!(
            i < self.num_private_inputs,
            "private input {i} out of range"
        );
        Wire(1 + self.num_public_inputs + self.num_public_outputs + i)
    }

    pub fn mul_gate_count(&self) -> usize {
        self.mul_gates
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    fn fresh(&mut self) -> Wire {
        let w = Wire(self.next_wire);
        self.next_wire += 1;
        w
    }

    pub fn add(&mut self, left: Wire, right: Wire) -> Wire {
        let out = self.fresh();
        self.gates.push(Gate::Add { left, right, out });
        out
    }

    pub fn mul(&mut self, left: Wire, right: Wire) -> Wire {
        let out = self.fresh();
        self.gates.push(Gate::Mul { left, right, out });
        self.mul_gates += 1;
        out
    }

    pub fn scale(&mut self, coeff: FieldElement, input: Wire) -> Wire {
        let out = self.fresh();
        self.gates.push(Gate::ConstMul { coeff, input, out });
        out
    }

    pub fn sub(&mut self, left: Wire, right: Wire) -> Wire {
        let neg = self.scale(-self.field.one(), right);
        self.add(left, neg)
    }

    /// A wire carrying the constant `c`.
    pub fn constant(&mut self, c: u64) -> Wire {
        let c = self.field.element(c);
        self.scale(c, Wire::ONE)
    }

    pub fn add_constant(&mut self, input: Wire, c: FieldElement) -> Wire {
        let k = self.scale(c, Wire::ONE);
        self.add(input, k)
    }

    /// Sum of `wires`; the constant zero for an empty slice.
    pub fn sum(&mut self, wires: &[Wire]) -> Wire {
        match wires {
            [] => self.scale(self.field.zero(), Wire::ONE),
            [first, rest @ ..] => rest.iter().fold(*first, |acc, &w| self.add(acc, w)),
        }
    }

    /// A prover-supplied wire. It is unconstrained until an assertion uses it.
    pub fn advice(&mut self, hint: Hint) -> Wire {
        let out = self.fresh();
        self.gates.push(Gate::Advice { hint, out });
        out
    }

    /// Constrains `left * right == product`.
    pub fn assert_product(&mut self, left: Wire, right: Wire, product: Wire) {
        self.gates.push(Gate::Assert {
            left,
            right,
            product,
        });
    }

    pub fn assert_equal(&mut self, a: Wire, b: Wire) {
        self.assert_product(a, Wire::ONE, b);
    }

    /// Constrains `b * b == b`, i.e. `b` is 0 or 1.
    pub fn assert_boolean(&mut self, b: Wire) {
        self.assert_product(b, b, b);
    }

    /// Routes `value` to public output `index`.
    pub fn set_output(&mut self, index: usize, value: Wire) {
        assert!(
            index < self.num_public_outputs,
            "output {index} out of range"
        );
        assert!(!self.outputs_set[index], "output {index} assigned twice");
        let out = Wire(1 + self.num_public_inputs + index);
        self.gates.push(Gate::ConstMul {
            coeff: self.field.one(),
            input: value,
            out,
        });
        self.outputs_set[index] = true;
    }

    pub fn finish(self) -> Result<ArithmeticCircuit, CircuitError> {
        if let Some(i) = self.outputs_set.iter().position(|set| !set) {
            return Err(CircuitError::OutputNotSet(i));
        }
        ArithmeticCircuit::new(
            self.field,
            self.num_public_inputs,
            self.num_public_outputs,
            self.num_private_inputs,
            self.next_wire,
            self.gates,
        )
    }
}
