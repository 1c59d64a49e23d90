//! Compilation of nonlocal games into single-prover protocols.
//!
//! A round: the verifier samples `(x, y)`, encrypts `x` under a fresh key,
//! and the prover answers with an encrypted `α`. The verifier then sends `y`
//! in the clear, receives `b`, decrypts `α` and scores `V(x, y, Dec α, b)`.

mod prover;

pub use prover::{honest_compiled_prover, CompiledProverStrategy, FirstRound, InstrumentTable};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::io::Write;
use std::sync::Arc;

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::games::NonlocalGame;
use crate::qhe::{Ciphertext, IdealQhe};
use crate::quantum::{sample_index, StateVector};

/// Default security parameter.
pub const DEFAULT_LAMBDA: usize = 128;

#[derive(Clone, Debug)]
pub struct CompiledProtocol {
    pub game: NonlocalGame,
    pub scheme: Arc<IdealQhe>,
}

/// One round of the compiled protocol.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub round: u64,
    pub x: u64,
    pub y: u64,
    pub c: Ciphertext,
    pub alpha: Ciphertext,
    /// Decrypted first answer.
    pub a: u64,
    pub b: u64,
    pub accepted: bool,
}

/// Aggregate of a batch of sampled rounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloSummary {
    pub trials: u64,
    pub wins: u64,
    pub mean: f64,
    pub exact: f64,
    pub std_error: f64,
    pub within_three_sigma: bool,
}

impl CompiledProtocol {
    pub fn compile(game: NonlocalGame, scheme: Arc<IdealQhe>) -> Result<Self> {
        game.validate()?;
        Ok(Self { game, scheme })
    }

    fn check_prover(&self, prover: &CompiledProverStrategy) -> Result<()> {
        if prover.second_round.len() as u64 != self.game.num_bob_questions() {
            return Err(Error::InvalidGame(format!(
                "prover has {} second-round measurements, game has {} questions",
                prover.second_round.len(),
                self.game.num_bob_questions()
            )));
        }
        Ok(())
    }

    fn alice_bits(&self, x: u64) -> Bits {
        Bits::new(self.game.alice_question_bits, x).expect("question in range")
    }

    /// `E_{(x,y)} Σ_{α,b} V(x, y, Dec α, b) ‖B^y_b A^x_α ψ‖²`.
    pub fn compiled_value_exact(&self, prover: &CompiledProverStrategy) -> Result<f64> {
        self.check_prover(prover)?;
        let mut by_x: HashMap<u64, Vec<(u64, StateVector)>> = HashMap::new();
        let mut total = 0.0;
        for q in &self.game.questions {
            if q.p == 0.0 {
                continue;
            }
            if !by_x.contains_key(&q.x) {
                let branches = prover
                    .branches(&self.alice_bits(q.x))?
                    .into_iter()
                    .filter(|b| b.probability > 0.0)
                    .map(|b| (b.label.value(), b.state))
                    .collect();
                by_x.insert(q.x, branches);
            }
            let pvm = prover.second_round(q.y)?;
            for (a, phi) in &by_x[&q.x] {
                for (b, p) in pvm.outcomes() {
                    let v = self.game.value(q.x, q.y, *a, *b);
                    if v != 0.0 {
                        total += q.p * v * phi.apply(p)?.norm_sqr();
                    }
                }
            }
        }
        Ok(total)
    }

    /// Runs one round, sampling every coin from `rng`.
    pub fn run_round<R: Rng + ?Sized>(
        &self,
        session: &mut ProverSession<'_>,
        round: u64,
        rng: &mut R,
    ) -> Result<Transcript> {
        let weights: Vec<f64> = self.game.questions.iter().map(|q| q.p).collect();
        let q = self.game.questions[sample_index(&weights, rng)?];
        let sk = self.scheme.gen(rng);
        let c = self.scheme.enc(&sk, &self.alice_bits(q.x), rng)?;
        let alpha = session.first_round(&self.scheme, &c, rng)?;
        let b = session.second_round(q.y, rng)?;
        let a = self.scheme.dec(&sk, &alpha)?.value();
        let accepted = self.game.predicate.accepts(q.x, q.y, a, b);
        Ok(Transcript { round, x: q.x, y: q.y, c, alpha, a, b, accepted })
    }

    /// Runs `trials` rounds from a seeded generator.
    pub fn run_rounds(&self, prover: &CompiledProverStrategy, trials: u64, seed: u64) -> Result<Vec<Transcript>> {
        self.check_prover(prover)?;
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let mut session = ProverSession::new(prover);
        (0..trials).map(|r| self.run_round(&mut session, r, &mut rng)).collect()
    }

    /// Sampled acceptance rate compared with the exact compiled value.
    pub fn monte_carlo(&self, prover: &CompiledProverStrategy, trials: u64, seed: u64) -> Result<MonteCarloSummary> {
        if trials == 0 {
            return Err(Error::InvalidArgument("at least one trial is required".into()));
        }
        let exact = self.compiled_value_exact(prover)?;
        let wins = self.run_rounds(prover, trials, seed)?.iter().filter(|t| t.accepted).count() as u64;
        Ok(summarize(trials, wins, exact))
    }
}

pub(crate) fn summarize(trials: u64, wins: u64, exact: f64) -> MonteCarloSummary {
    let mean = wins as f64 / trials as f64;
    let std_error = ((exact * (1.0 - exact)).max(0.0) / trials as f64).sqrt();
    // A zero-variance exact value must be matched exactly.
    let within_three_sigma = (mean - exact).abs() <= 3.0 * std_error + 1e-12;
    MonteCarloSummary { trials, wins, mean, exact, std_error, within_three_sigma }
}

#[derive(Debug)]
struct ClassBranches {
    probabilities: Vec<f64>,
    labels: Vec<Bits>,
    states: Vec<Option<StateVector>>,
    second: HashMap<(usize, u64), (Vec<u64>, Vec<f64>)>,
}

/// Per-run prover state. Caches first-round branches for plaintext-keyed
/// instruments and second-round outcome distributions per branch.
#[derive(Debug)]
pub struct ProverSession<'a> {
    prover: &'a CompiledProverStrategy,
    cache: HashMap<Bits, ClassBranches>,
    current: Option<Current>,
}

#[derive(Debug)]
enum Current {
    Cached { class: Bits, branch: usize },
    Fresh(StateVector),
}

impl<'a> ProverSession<'a> {
    pub fn new(prover: &'a CompiledProverStrategy) -> Self {
        Self { prover, cache: HashMap::new(), current: None }
    }

    /// Homomorphically evaluates the first-round instrument on `c`.
    pub fn first_round<R: Rng + ?Sized>(&mut self, scheme: &IdealQhe, c: &Ciphertext, rng: &mut R) -> Result<Ciphertext> {
        match &self.prover.first_round {
            FirstRound::ByPlaintext(_) => {
                // The ideal evaluator decrypts internally; the instrument
                // only sees the plaintext class.
                let class = scheme.peek(c)?;
                if !self.cache.contains_key(&class) {
                    let branches = self.prover.branches(&class)?;
                    let entry = ClassBranches {
                        probabilities: branches.iter().map(|b| b.probability).collect(),
                        labels: branches.iter().map(|b| b.label).collect(),
                        states: branches
                            .into_iter()
                            .map(|b| if b.probability > 0.0 { b.state.normalized().ok() } else { None })
                            .collect(),
                        second: HashMap::new(),
                    };
                    self.cache.insert(class, entry);
                }
                let entry = &self.cache[&class];
                let k = sample_index(&entry.probabilities, rng)?;
                let out = scheme.reencrypt(c.key_id, &entry.labels[k], rng)?;
                self.current = Some(Current::Cached { class, branch: k });
                Ok(out)
            }
            FirstRound::PerCiphertext { rule, .. } => {
                let fam = rule(c)?;
                let branches = fam.branches(&self.prover.state)?;
                let probs: Vec<f64> = branches.iter().map(|b| b.probability).collect();
                let k = sample_index(&probs, rng)?;
                let out = scheme.reencrypt(c.key_id, &branches[k].label, rng)?;
                self.current = Some(Current::Fresh(branches[k].state.normalized()?));
                Ok(out)
            }
        }
    }

    /// Measures the second-round PVM for `y` on the post-evaluation state.
    pub fn second_round<R: Rng + ?Sized>(&mut self, y: u64, rng: &mut R) -> Result<u64> {
        let pvm = self.prover.second_round(y)?;
        let current = self
            .current
            .take()
            .ok_or_else(|| Error::InvalidArgument("second round before first round".into()))?;
        match current {
            Current::Cached { class, branch } => {
                let entry = self.cache.get_mut(&class).expect("cached class");
                if !entry.second.contains_key(&(branch, y)) {
                    let state = entry.states[branch].as_ref().expect("sampled branch has weight");
                    let mut labels = Vec::new();
                    let mut probs = Vec::new();
                    for (b, p) in pvm.outcomes() {
                        labels.push(*b);
                        probs.push(state.apply(p)?.norm_sqr());
                    }
                    entry.second.insert((branch, y), (labels, probs));
                }
                let (labels, probs) = &entry.second[&(branch, y)];
                Ok(labels[sample_index(probs, rng)?])
            }
            Current::Fresh(state) => {
                let (b, _) = crate::quantum::measure(pvm, &state, rng)?;
                Ok(b)
            }
        }
    }
}

/// Writes transcripts as JSON lines.
pub fn write_transcripts_jsonl<W: Write>(transcripts: &[Transcript], mut out: W) -> Result<()> {
    for t in transcripts {
        let line = serde_json::to_string(t)?;
        writeln!(out, "{line}").map_err(|e| Error::Serialization(e.to_string()))?;
    }
    Ok(())
}

pub fn read_transcripts_jsonl(s: &str) -> Result<Vec<Transcript>> {
    s.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| Ok(serde_json::from_str(l)?))
        .collect()
}
