use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::games::QuantumStrategy;
use crate::qhe::{AliceCircuit, Ciphertext, EmbeddedCircuit, HomomorphicCircuit};
use crate::quantum::{ComplexMatrix, KrausBranch, KrausFamily, ProjectiveMeasurement, StateVector};

/// Rule mapping a first-round ciphertext to the prover's instrument.
#[derive(Clone)]
pub enum FirstRound {
    /// The instrument depends only on the plaintext of the ciphertext,
    /// which the ideal evaluator exposes to the circuit.
    ByPlaintext(Arc<dyn HomomorphicCircuit>),
    /// The instrument depends on the ciphertext bytes themselves.
    PerCiphertext {
        output_bits: usize,
        rule: Arc<dyn Fn(&Ciphertext) -> Result<KrausFamily> + Send + Sync>,
    },
}

impl fmt::Debug for FirstRound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FirstRound::ByPlaintext(c) => f
                .debug_struct("ByPlaintext")
                .field("input_bits", &c.input_bits())
                .field("output_bits", &c.output_bits())
                .finish(),
            FirstRound::PerCiphertext { output_bits, .. } => {
                f.debug_struct("PerCiphertext").field("output_bits", output_bits).finish()
            }
        }
    }
}

/// Single-prover strategy for a compiled game: an initial state, a
/// first-round instrument family keyed by ciphertext class, and second-round
/// PVMs keyed by the second question.
#[derive(Clone, Debug)]
pub struct CompiledProverStrategy {
    pub id: String,
    pub state: StateVector,
    pub first_round: FirstRound,
    pub second_round: Vec<ProjectiveMeasurement>,
}

impl CompiledProverStrategy {
    pub fn new(
        id: impl Into<String>,
        state: StateVector,
        first_round: FirstRound,
        second_round: Vec<ProjectiveMeasurement>,
    ) -> Result<Self> {
        let dim = state.dim();
        if let FirstRound::ByPlaintext(c) = &first_round {
            if c.num_qubits() != state.num_qubits() {
                return Err(Error::DimensionMismatch { expected: state.num_qubits(), found: c.num_qubits() });
            }
        }
        for m in &second_round {
            if m.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: m.dim() });
            }
        }
        Ok(Self { id: id.into(), state, first_round, second_round })
    }

    pub fn num_qubits(&self) -> usize {
        self.state.num_qubits()
    }

    /// The instrument applied for a plaintext class.
    pub fn instrument(&self, plaintext: &Bits) -> Result<KrausFamily> {
        match &self.first_round {
            FirstRound::ByPlaintext(c) => c.instrument(plaintext),
            FirstRound::PerCiphertext { .. } => Err(Error::UnsupportedStrategy(
                "first round depends on ciphertext bytes, not only on the plaintext class".into(),
            )),
        }
    }

    /// Branches `A^x_α |ψ>` for plaintext class `x`.
    pub fn branches(&self, plaintext: &Bits) -> Result<Vec<KrausBranch>> {
        let fam = self.instrument(plaintext)?;
        if fam.num_qubits() != self.num_qubits() {
            return Err(Error::DimensionMismatch { expected: self.num_qubits(), found: fam.num_qubits() });
        }
        fam.branches(&self.state)
    }

    pub fn second_round(&self, y: u64) -> Result<&ProjectiveMeasurement> {
        self.second_round
            .get(y as usize)
            .ok_or_else(|| Error::InvalidQuestion(format!("no second-round measurement for y = {y}")))
    }

    /// `A^c = Σ_α (-1)^{Dec α} A_α† A_α` for single-bit outputs.
    pub fn decrypted_observable(&self, plaintext: &Bits) -> Result<ComplexMatrix> {
        let fam = self.instrument(plaintext)?;
        let dim = fam.dim();
        let mut acc = ComplexMatrix::zeros(dim, dim);
        for (i, k) in fam.local_ops().iter().enumerate() {
            let sign = if k.label.parity() { -1.0 } else { 1.0 };
            acc = &acc + &fam.full_op(i)?.abs_sq().scale_real(sign);
        }
        Ok(acc)
    }
}

/// Compiled prover that runs a two-player strategy: the first round
/// evaluates Alice's circuit on her qubits, the second round applies Bob's
/// measurement on his.
pub fn honest_compiled_prover(strategy: &QuantumStrategy, input_bits: usize, output_bits: usize) -> Result<CompiledProverStrategy> {
    let alice = Arc::new(AliceCircuit::new(strategy.alice.clone(), input_bits, output_bits)?);
    let total = strategy.alice_qubits + strategy.bob_qubits;
    let circuit = EmbeddedCircuit::new(alice, strategy.alice_targets(), total)?;
    let dim_a = 1usize << strategy.alice_qubits;
    let second = strategy
        .bob
        .iter()
        .map(|m| m.extended(dim_a, false))
        .collect::<Result<Vec<_>>>()?;
    CompiledProverStrategy::new("honest", strategy.state.clone(), FirstRound::ByPlaintext(Arc::new(circuit)), second)
}

/// A first-round circuit given as an explicit table of instruments, one per
/// plaintext.
#[derive(Clone, Debug)]
pub struct InstrumentTable {
    input_bits: usize,
    output_bits: usize,
    qubits: usize,
    families: BTreeMap<Bits, KrausFamily>,
}

impl InstrumentTable {
    pub fn new(input_bits: usize, output_bits: usize, families: BTreeMap<Bits, KrausFamily>) -> Result<Self> {
        let qubits = families
            .values()
            .next()
            .ok_or_else(|| Error::InvalidArgument("empty instrument table".into()))?
            .num_qubits();
        for (x, f) in &families {
            if x.len() != input_bits {
                return Err(Error::InvalidQuestion(format!("table key {x} is not {input_bits} bits")));
            }
            if f.num_qubits() != qubits {
                return Err(Error::DimensionMismatch { expected: qubits, found: f.num_qubits() });
            }
            if f.labels().any(|l| l.len() != output_bits) {
                return Err(Error::InvalidMeasurement("output label width differs from table".into()));
            }
        }
        Ok(Self { input_bits, output_bits, qubits, families })
    }

    /// The same instrument for every plaintext.
    pub fn oblivious(input_bits: usize, family: KrausFamily) -> Result<Self> {
        let output_bits = family.labels().next().map(|l| l.len()).unwrap_or(0);
        let families = (0..(1u64 << input_bits))
            .map(|x| (Bits::new(input_bits, x).expect("fits"), family.clone()))
            .collect();
        Self::new(input_bits, output_bits, families)
    }
}

impl HomomorphicCircuit for InstrumentTable {
    fn input_bits(&self) -> usize {
        self.input_bits
    }

    fn output_bits(&self) -> usize {
        self.output_bits
    }

    fn num_qubits(&self) -> usize {
        self.qubits
    }

    fn instrument(&self, input: &Bits) -> Result<KrausFamily> {
        self.families
            .get(input)
            .cloned()
            .ok_or_else(|| Error::InvalidQuestion(format!("no instrument for plaintext {input}")))
    }
}
