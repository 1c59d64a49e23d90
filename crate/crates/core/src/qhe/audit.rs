use rand::Rng;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::circuit::{EmbeddedCircuit, HomomorphicCircuit};
use super::IdealQhe;
use crate::bits::Bits;
use crate::error::Result;
use crate::quantum::{trace_distance, ComplexMatrix, QubitSplit, StateVector};

/// Classical-quantum state `Σ_y |y><y| ⊗ ρ_y` with unnormalised blocks.
#[derive(Clone, Debug, Default)]
pub struct CqState {
    pub blocks: BTreeMap<Bits, ComplexMatrix>,
}

impl CqState {
    fn add(&mut self, label: Bits, rho: ComplexMatrix) {
        match self.blocks.get_mut(&label) {
            Some(acc) => *acc = &*acc + &rho,
            None => {
                self.blocks.insert(label, rho);
            }
        }
    }

    /// `½‖self - other‖₁`, which splits over the classical blocks.
    pub fn trace_distance(&self, other: &CqState) -> Result<f64> {
        let labels: BTreeSet<&Bits> = self.blocks.keys().chain(other.blocks.keys()).collect();
        let mut total = 0.0;
        for label in labels {
            total += match (self.blocks.get(label), other.blocks.get(label)) {
                (Some(a), Some(b)) => trace_distance(a, b)?,
                (Some(a), None) | (None, Some(a)) => 0.5 * a.trace().re,
                (None, None) => unreachable!("label drawn from one of the maps"),
            };
        }
        Ok(total)
    }
}

#[derive(Clone, Debug)]
pub struct AuditReport {
    pub ideal: CqState,
    pub homomorphic: CqState,
    pub trace_distance: f64,
}

/// Compares running a circuit in the clear (reading its output) with running
/// it homomorphically and decrypting, when the register is entangled with
/// an auxiliary register. Returns both classical-quantum outputs.
///
/// `circuit` acts on `register_qubits` of `psi`; the remaining qubits form
/// the auxiliary register.
pub fn correctness_audit<R: Rng + ?Sized>(
    scheme: &IdealQhe,
    circuit: Arc<dyn HomomorphicCircuit>,
    psi: &StateVector,
    register_qubits: &[usize],
    input: &Bits,
    rng: &mut R,
) -> Result<AuditReport> {
    let n = psi.num_qubits();
    QubitSplit::new(n, register_qubits)?;
    let aux: Vec<usize> = (0..n).filter(|q| !register_qubits.contains(q)).collect();
    let embedded = EmbeddedCircuit::new(circuit.clone(), register_qubits.to_vec(), n)?;

    let mut ideal = CqState::default();
    for b in embedded.instrument(input)?.branches(psi)? {
        ideal.add(b.label, b.state.reduced_density(&aux)?);
    }

    let sk = scheme.gen(rng);
    let c = scheme.enc(&sk, input, rng)?;
    let mut homomorphic = CqState::default();
    for b in scheme.eval_branches(&embedded, psi, &c, rng)? {
        let y = scheme.dec(&sk, &b.ciphertext)?;
        homomorphic.add(y, b.state.reduced_density(&aux)?);
    }

    let trace_distance = ideal.trace_distance(&homomorphic)?;
    Ok(AuditReport { ideal, homomorphic, trace_distance })
}
