//! Question types and the question distributions derived from a Hamiltonian.

use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use super::hamiltonian::{PauliBasis, XxzzHamiltonian};
use super::params::ProtocolConfig;
use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::quantum::{sample_index, PauliMask};

const TAG_BITS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subtest {
    Chsh,
    Commutation,
    Teleport,
}

impl Subtest {
    pub const ALL: [Subtest; 3] = [Subtest::Chsh, Subtest::Commutation, Subtest::Teleport];

    fn tag(self) -> u64 {
        match self {
            Subtest::Chsh => 0,
            Subtest::Commutation => 1,
            Subtest::Teleport => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AliceQuestion {
    Chsh { a: PauliMask, b: PauliMask, x: bool },
    Commutation { a: PauliMask, b: PauliMask },
    Teleport,
}

/// Serialised width of every question for `n` qubits: tag byte, two masks
/// and one bit.
pub fn question_bits(n: usize) -> usize {
    TAG_BITS + 2 * n + 1
}

/// Width of the padded answer register; the honest prover's teleport
/// answer is the longest.
pub fn answer_bits(n: usize) -> usize {
    2 * n
}

impl AliceQuestion {
    pub fn chsh(a: PauliMask, b: PauliMask, x: bool) -> Result<Self> {
        if !a.dot(&b) {
            return Err(Error::InvalidQuestion(format!("CHSH question needs a·b = 1, got a = {a}, b = {b}")));
        }
        Ok(Self::Chsh { a, b, x })
    }

    pub fn commutation(a: PauliMask, b: PauliMask) -> Result<Self> {
        if a.dot(&b) {
            return Err(Error::InvalidQuestion(format!("commutation question needs a·b = 0, got a = {a}, b = {b}")));
        }
        Ok(Self::Commutation { a, b })
    }

    pub fn subtest(&self) -> Subtest {
        match self {
            Self::Chsh { .. } => Subtest::Chsh,
            Self::Commutation { .. } => Subtest::Commutation,
            Self::Teleport => Subtest::Teleport,
        }
    }

    /// Number of meaningful leading answer bits.
    pub fn answer_len(&self, n: usize) -> usize {
        match self {
            Self::Chsh { .. } => 1,
            Self::Commutation { .. } => 2,
            Self::Teleport => 2 * n,
        }
    }

    pub fn to_bits(&self, n: usize) -> Result<Bits> {
        let (a, b, x) = match self {
            Self::Chsh { a, b, x } => (a.bits(), b.bits(), u64::from(*x)),
            Self::Commutation { a, b } => (a.bits(), b.bits(), 0),
            Self::Teleport => (0, 0, 0),
        };
        for m in self.masks() {
            if m.num_qubits() != n {
                return Err(Error::DimensionMismatch { expected: n, found: m.num_qubits() });
            }
        }
        let value = (((self.subtest().tag() << n | a) << n | b) << 1) | x;
        Bits::new(question_bits(n), value)
    }

    pub fn from_bits(n: usize, bits: &Bits) -> Result<Self> {
        if bits.len() != question_bits(n) {
            return Err(Error::InvalidQuestion(format!(
                "question of {} bits, expected {}",
                bits.len(),
                question_bits(n)
            )));
        }
        let v = bits.value();
        let low = (1u64 << n) - 1;
        let x = v & 1 == 1;
        let b = PauliMask::new(n, (v >> 1) & low)?;
        let a = PauliMask::new(n, (v >> (n + 1)) & low)?;
        match v >> (2 * n + 1) {
            0 => Self::chsh(a, b, x),
            1 if !x => Self::commutation(a, b),
            2 if !x && a.is_zero() && b.is_zero() => Ok(Self::Teleport),
            _ => Err(Error::InvalidQuestion(format!("malformed question {bits}"))),
        }
    }

    fn masks(&self) -> Vec<PauliMask> {
        match self {
            Self::Chsh { a, b, .. } | Self::Commutation { a, b } => vec![*a, *b],
            Self::Teleport => vec![],
        }
    }
}

pub type MaskTable = Vec<(PauliMask, f64)>;
pub type PairTable = Vec<((PauliMask, PauliMask), f64)>;

/// Exact probability tables. The pair distributions are absent when the
/// Hamiltonian has no `X` terms.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuestionDistributions {
    pub n: usize,
    pub d_x: MaskTable,
    pub d_z: MaskTable,
    d_q: Option<PairTable>,
    d_q0: Option<PairTable>,
    d_q1: Option<PairTable>,
}

fn term_table(h: &XxzzHamiltonian, w: PauliBasis) -> Result<MaskTable> {
    let total = h.weight(w);
    let mut acc: BTreeMap<PauliMask, f64> = BTreeMap::new();
    for t in h.terms.iter().filter(|t| t.w == w && t.p > 0.0) {
        *acc.entry(h.term_mask(t)?).or_insert(0.0) += t.p / total;
    }
    Ok(acc.into_iter().collect())
}

fn condition(table: &PairTable, parity: bool) -> Result<PairTable> {
    let kept: PairTable = table.iter().filter(|((a, b), _)| a.dot(b) == parity).copied().collect();
    let mass: f64 = kept.iter().map(|(_, p)| p).sum();
    if mass <= 0.0 {
        return Err(Error::DegenerateDistribution(format!("no question pairs with a·b = {}", u8::from(parity))));
    }
    Ok(kept.into_iter().map(|(k, p)| (k, p / mass)).collect())
}

fn degenerate(name: &str) -> Error {
    Error::DegenerateDistribution(format!("{name} is empty: the Hamiltonian has no X terms"))
}

impl QuestionDistributions {
    pub fn build(h: &XxzzHamiltonian) -> Result<Self> {
        let n = h.n;
        let d_x = term_table(h, PauliBasis::X)?;
        let d_z = term_table(h, PauliBasis::Z)?;
        let (d_q, d_q0, d_q1) = if d_x.is_empty() {
            (None, None, None)
        } else {
            let uniform = 1.0 / (1u64 << n) as f64;
            let mut q = PairTable::new();
            for a in PauliMask::all(n) {
                for (b, p) in &d_x {
                    q.push(((a, *b), uniform * p));
                }
            }
            let q0 = condition(&q, false)?;
            let q1 = condition(&q, true)?;
            (Some(q), Some(q0), Some(q1))
        };
        Ok(Self { n, d_x, d_z, d_q, d_q0, d_q1 })
    }

    pub fn d_q(&self) -> Result<&PairTable> {
        self.d_q.as_ref().ok_or_else(|| degenerate("D_Q"))
    }

    /// Pairs with `a·b = 0`.
    pub fn d_q0(&self) -> Result<&PairTable> {
        self.d_q0.as_ref().ok_or_else(|| degenerate("D_Q0"))
    }

    /// Pairs with `a·b = 1`.
    pub fn d_q1(&self) -> Result<&PairTable> {
        self.d_q1.as_ref().ok_or_else(|| degenerate("D_Q1"))
    }

    /// Probability that a pair drawn from `D_Q` has `a·b = 1`.
    pub fn odd_fraction(&self) -> Result<f64> {
        Ok(self.d_q()?.iter().filter(|((a, b), _)| a.dot(b)).map(|(_, p)| p).sum())
    }

    /// Every Alice question with its probability, including the subtest
    /// weight. Subtests of probability zero are skipped.
    pub fn question_classes(&self, config: &ProtocolConfig) -> Result<Vec<(AliceQuestion, f64)>> {
        let side = 0.5 * (1.0 - config.kappa);
        let mut out = Vec::new();
        if side > 0.0 {
            for ((a, b), p) in self.d_q1()? {
                for x in [false, true] {
                    out.push((AliceQuestion::chsh(*a, *b, x)?, side * p * 0.5));
                }
            }
            for ((a, b), p) in self.d_q0()? {
                out.push((AliceQuestion::commutation(*a, *b)?, side * p));
            }
        }
        if config.kappa > 0.0 {
            out.push((AliceQuestion::Teleport, config.kappa));
        }
        Ok(out)
    }

    /// Draws the subtest, Alice's question and Bob's question bit.
    pub fn sample_question<R: Rng + ?Sized>(&self, config: &ProtocolConfig, rng: &mut R) -> Result<(AliceQuestion, u8)> {
        let side = 0.5 * (1.0 - config.kappa);
        let subtest = Subtest::ALL[sample_index(&[side, side, config.kappa], rng)?];
        let q = match subtest {
            Subtest::Chsh => {
                let (a, b) = sample_pair(self.d_q1()?, rng)?;
                AliceQuestion::chsh(a, b, rng.random())?
            }
            Subtest::Commutation => {
                let (a, b) = sample_pair(self.d_q0()?, rng)?;
                AliceQuestion::commutation(a, b)?
            }
            Subtest::Teleport => AliceQuestion::Teleport,
        };
        Ok((q, rng.random_range(0..2)))
    }
}

fn sample_pair<R: Rng + ?Sized>(table: &PairTable, rng: &mut R) -> Result<(PauliMask, PauliMask)> {
    let weights: Vec<f64> = table.iter().map(|(_, p)| *p).collect();
    Ok(table[sample_index(&weights, rng)?].0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verifier::hamiltonian::HamiltonianTerm;

    fn single_x() -> XxzzHamiltonian {
        XxzzHamiltonian::new(2, vec![HamiltonianTerm { w: PauliBasis::X, i: 0, j: 1, p: 1.0 }]).unwrap()
    }

    #[test]
    fn question_roundtrip_and_fixed_width() {
        let n = 3;
        let a = PauliMask::new(n, 0b110).unwrap();
        let b = PauliMask::new(n, 0b011).unwrap();
        let c = PauliMask::new(n, 0b111).unwrap();
        let qs = [
            AliceQuestion::chsh(a, b, true).unwrap(),
            AliceQuestion::commutation(a, c).unwrap(),
            AliceQuestion::Teleport,
        ];
        for q in qs {
            let bits = q.to_bits(n).unwrap();
            assert_eq!(bits.len(), question_bits(n));
            assert_eq!(AliceQuestion::from_bits(n, &bits).unwrap(), q);
        }
    }

    #[test]
    fn parity_requirements_enforced() {
        let a = PauliMask::new(2, 0b11).unwrap();
        assert!(AliceQuestion::chsh(a, a, false).is_err());
        assert!(AliceQuestion::commutation(PauliMask::new(2, 0b10).unwrap(), a).is_err());
    }

    #[test]
    fn single_x_term_tables() {
        let d = QuestionDistributions::build(&single_x()).unwrap();
        let b = PauliMask::new(2, 0b11).unwrap();
        assert_eq!(d.d_x, vec![(b, 1.0)]);
        assert!(d.d_z.is_empty());
        let q1 = d.d_q1().unwrap();
        assert_eq!(q1.len(), 2);
        for ((a, bb), p) in q1 {
            assert!(a.get(0) ^ a.get(1));
            assert_eq!(*bb, b);
            assert!((p - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn conditioning_recombines_to_d_q() {
        let d = QuestionDistributions::build(&single_x()).unwrap();
        let odd = d.odd_fraction().unwrap();
        for ((a, b), p) in d.d_q().unwrap() {
            let (table, frac) = if a.dot(b) { (d.d_q1().unwrap(), odd) } else { (d.d_q0().unwrap(), 1.0 - odd) };
            let cond = table.iter().find(|(k, _)| *k == (*a, *b)).unwrap().1;
            assert!((cond * frac - p).abs() < 1e-15);
        }
    }

    #[test]
    fn missing_x_terms_are_degenerate() {
        let h = XxzzHamiltonian::new(2, vec![HamiltonianTerm { w: PauliBasis::Z, i: 0, j: 1, p: 1.0 }]).unwrap();
        let d = QuestionDistributions::build(&h).unwrap();
        assert!(matches!(d.d_q1(), Err(Error::DegenerateDistribution(_))));
    }
}
