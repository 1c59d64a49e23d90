use std::sync::Arc;

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::quantum::matrix::{check_dim, re};
use crate::quantum::{ComplexMatrix, KrausFamily, KrausOperator, ProjectiveMeasurement};

/// A circuit with classical input and output acting on a quantum register.
///
/// Its action for a fixed input is an instrument: a Kraus family labelled
/// by the classical output.
pub trait HomomorphicCircuit: Send + Sync {
    fn input_bits(&self) -> usize;
    fn output_bits(&self) -> usize;
    fn num_qubits(&self) -> usize;
    fn instrument(&self, input: &Bits) -> Result<KrausFamily>;
}

/// Coherent version of a strategy's first player: controlled on the
/// question register it measures `{A^x_a}` into an answer register.
#[derive(Clone, Debug)]
pub struct AliceCircuit {
    pvms: Vec<ProjectiveMeasurement>,
    input_bits: usize,
    output_bits: usize,
    qubits: usize,
}

impl AliceCircuit {
    pub fn new(pvms: Vec<ProjectiveMeasurement>, input_bits: usize, output_bits: usize) -> Result<Self> {
        if pvms.len() != 1 << input_bits {
            return Err(Error::DimensionMismatch { expected: 1 << input_bits, found: pvms.len() });
        }
        let dim = pvms[0].dim();
        let qubits = crate::quantum::matrix::qubits_for_dim(dim)?;
        for m in &pvms {
            if m.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: m.dim() });
            }
            if m.outcomes().iter().any(|(l, _)| *l >> output_bits != 0) {
                return Err(Error::InvalidMeasurement("answer label exceeds output width".into()));
            }
        }
        Ok(Self { pvms, input_bits, output_bits, qubits })
    }

    /// `Σ_x |x><x| ⊗ Σ_a A^x_a ⊗ X^a` on question, register and answer qubits.
    pub fn unitary(&self) -> Result<ComplexMatrix> {
        let dq = 1usize << self.input_bits;
        let dr = 1usize << self.qubits;
        let da = 1usize << self.output_bits;
        check_dim(dq * dr * da)?;
        let mut u = ComplexMatrix::zeros(dq * dr * da, dq * dr * da);
        for (x, pvm) in self.pvms.iter().enumerate() {
            for (a, p) in pvm.outcomes() {
                for i in 0..dr {
                    for j in 0..dr {
                        let v = p.get(i, j);
                        if v == re(0.0) {
                            continue;
                        }
                        for z in 0..da {
                            let row = (x * dr + i) * da + (z ^ *a as usize);
                            let col = (x * dr + j) * da + z;
                            u.set(row, col, u.get(row, col) + v);
                        }
                    }
                }
            }
        }
        Ok(u)
    }

    /// Instrument read off the coherent unitary: `<x,a| U |x,0>` on the register.
    pub fn coherent_instrument(&self, input: &Bits) -> Result<KrausFamily> {
        let u = self.unitary()?;
        let x = input.value() as usize;
        let dr = 1usize << self.qubits;
        let da = 1usize << self.output_bits;
        let ops = (0..da)
            .map(|a| KrausOperator {
                label: Bits::new(self.output_bits, a as u64).expect("fits"),
                op: ComplexMatrix::from_fn(dr, dr, |i, j| u.get((x * dr + i) * da + a, (x * dr + j) * da)),
            })
            .filter(|k| k.op.max_abs() > 0.0)
            .collect();
        KrausFamily::new(ops)
    }
}

impl HomomorphicCircuit for AliceCircuit {
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
        if input.len() != self.input_bits {
            return Err(Error::InvalidQuestion(format!(
                "expected {}-bit input, got {} bits",
                self.input_bits,
                input.len()
            )));
        }
        let pvm = &self.pvms[input.value() as usize];
        let labelled: Vec<(Bits, ComplexMatrix)> = pvm
            .outcomes()
            .iter()
            .map(|(a, p)| Ok((Bits::new(self.output_bits, *a)?, p.clone())))
            .collect::<Result<_>>()?;
        KrausFamily::from_pvm(&labelled)
    }
}

/// A circuit applied to a subset of a larger register.
#[derive(Clone)]
pub struct EmbeddedCircuit {
    inner: Arc<dyn HomomorphicCircuit>,
    targets: Vec<usize>,
    total_qubits: usize,
}

impl EmbeddedCircuit {
    pub fn new(inner: Arc<dyn HomomorphicCircuit>, targets: Vec<usize>, total_qubits: usize) -> Result<Self> {
        if targets.len() != inner.num_qubits() {
            return Err(Error::DimensionMismatch { expected: inner.num_qubits(), found: targets.len() });
        }
        crate::quantum::QubitSplit::new(total_qubits, &targets)?;
        Ok(Self { inner, targets, total_qubits })
    }
}

impl HomomorphicCircuit for EmbeddedCircuit {
    fn input_bits(&self) -> usize {
        self.inner.input_bits()
    }

    fn output_bits(&self) -> usize {
        self.inner.output_bits()
    }

    fn num_qubits(&self) -> usize {
        self.total_qubits
    }

    fn instrument(&self, input: &Bits) -> Result<KrausFamily> {
        self.inner.instrument(input)?.embedded(&self.targets, self.total_qubits)
    }
}
