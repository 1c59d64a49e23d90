//! Exact and sampled acceptance of a prover in the verification protocol.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::Arc;

use super::hamiltonian::{PauliBasis, XxzzHamiltonian};
use super::params::{completeness_simulated, completeness_stated, ProtocolConfig};
use super::prover::{honest_verifier_prover, VerifierProver, Witness};
use super::questions::{AliceQuestion, QuestionDistributions, Subtest};
use super::verdict::{acceptance_probability, verdict, TeleportCheck};
use crate::bits::Bits;
use crate::compiler::{summarize, MonteCarloSummary};
use crate::error::{Error, Result};
use crate::qhe::{Ciphertext, IdealQhe};
use crate::quantum::sample_index;

/// Acceptance probability of one Alice question, averaged over `y`,
/// first-round branches and Bob's outcomes.
pub fn question_acceptance(prover: &VerifierProver, h: &XxzzHamiltonian, q: &AliceQuestion) -> Result<f64> {
    let len = q.answer_len(prover.n);
    let mut acc = 0.0;
    for br in prover.branches(q)? {
        if br.probability <= 0.0 {
            continue;
        }
        let s_a = br.label.slice(0, len)?;
        for y in 0..2u8 {
            let weights = prover.bob.outcome_weights(PauliBasis::for_question(y), &br.state)?;
            for (s_b, w) in weights.into_iter().enumerate() {
                if w > 0.0 {
                    acc += 0.5 * w * acceptance_probability(h, q, y, &s_a, s_b as u64)?;
                }
            }
        }
    }
    Ok(acc)
}

/// Acceptance probability conditioned on the subtest.
pub fn subtest_acceptance(
    prover: &VerifierProver,
    h: &XxzzHamiltonian,
    dists: &QuestionDistributions,
    subtest: Subtest,
) -> Result<f64> {
    match subtest {
        Subtest::Chsh => {
            let mut acc = 0.0;
            for ((a, b), p) in dists.d_q1()? {
                for x in [false, true] {
                    acc += 0.5 * p * question_acceptance(prover, h, &AliceQuestion::chsh(*a, *b, x)?)?;
                }
            }
            Ok(acc)
        }
        Subtest::Commutation => {
            let mut acc = 0.0;
            for ((a, b), p) in dists.d_q0()? {
                acc += p * question_acceptance(prover, h, &AliceQuestion::commutation(*a, *b)?)?;
            }
            Ok(acc)
        }
        Subtest::Teleport => question_acceptance(prover, h, &AliceQuestion::Teleport),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubtestValues {
    /// Absent when the subtest has probability zero.
    pub chsh: Option<f64>,
    pub commutation: Option<f64>,
    pub teleport: f64,
    pub total: f64,
}

pub fn protocol_value_exact(
    prover: &VerifierProver,
    h: &XxzzHamiltonian,
    config: &ProtocolConfig,
) -> Result<SubtestValues> {
    let dists = QuestionDistributions::build(h)?;
    let [w_chsh, w_com, w_tele] = config.subtest_weights();
    let side = |s| -> Result<Option<f64>> {
        if w_chsh > 0.0 {
            Ok(Some(subtest_acceptance(prover, h, &dists, s)?))
        } else {
            Ok(None)
        }
    };
    let chsh = side(Subtest::Chsh)?;
    let commutation = side(Subtest::Commutation)?;
    let teleport = subtest_acceptance(prover, h, &dists, Subtest::Teleport)?;
    let total = w_chsh * chsh.unwrap_or(0.0) + w_com * commutation.unwrap_or(0.0) + w_tele * teleport;
    Ok(SubtestValues { chsh, commutation, teleport, total })
}

/// Honest acceptance next to the two closed forms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompletenessReport {
    pub config: ProtocolConfig,
    pub witness_energy: f64,
    pub values: SubtestValues,
    /// `½(1-κ)(p_CHSH + 1) + κ(¾ - ¼E)`; matches the simulation.
    pub simulated_formula: f64,
    /// `½(1-κ)(1 + ω*) + κ(1 - ¼α)`, reported for comparison.
    pub stated_formula: f64,
    pub stated_formula_flagged: bool,
}

pub fn honest_completeness(h: &XxzzHamiltonian, witness: &Witness, config: &ProtocolConfig) -> Result<CompletenessReport> {
    if witness.num_qubits()? != h.n {
        return Err(Error::DimensionMismatch { expected: h.n, found: witness.num_qubits()? });
    }
    let prover = honest_verifier_prover(witness)?;
    let values = protocol_value_exact(&prover, h, config)?;
    let energy = h.energy(&witness.density())?;
    let p_chsh = values.chsh.unwrap_or(0.0);
    let simulated_formula = completeness_simulated(config.kappa, p_chsh, energy);
    let stated_formula = completeness_stated(config.kappa, config.alpha);
    Ok(CompletenessReport {
        config: config.clone(),
        witness_energy: energy,
        stated_formula_flagged: (stated_formula - values.total).abs() > 1e-9,
        values,
        simulated_formula,
        stated_formula,
    })
}

/// One protocol round as seen by the verifier.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifierTranscript {
    pub round: u64,
    pub question: AliceQuestion,
    pub y: u8,
    pub c: Ciphertext,
    pub alpha: Ciphertext,
    pub s_a: Bits,
    pub s_b: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub teleport: Option<TeleportCheck>,
    pub accepted: bool,
}

struct ClassCache {
    probabilities: Vec<f64>,
    labels: Vec<Bits>,
    /// Normalised outcome distribution per branch and Bob question.
    outcomes: Vec<[Vec<f64>; 2]>,
}

/// Prover-side state across rounds; caches first-round branches per
/// plaintext class and Bob's outcome distributions per branch.
pub struct VerifierSession<'a> {
    prover: &'a VerifierProver,
    cache: HashMap<Bits, ClassCache>,
    current: Option<(Bits, usize)>,
}

impl<'a> VerifierSession<'a> {
    pub fn new(prover: &'a VerifierProver) -> Self {
        Self { prover, cache: HashMap::new(), current: None }
    }

    pub fn first_round<R: Rng + ?Sized>(&mut self, scheme: &IdealQhe, c: &Ciphertext, rng: &mut R) -> Result<Ciphertext> {
        // The ideal evaluator decrypts internally; the instrument only
        // sees the plaintext class.
        let class = scheme.peek(c)?;
        if !self.cache.contains_key(&class) {
            let branches = self.prover.alice.instrument(&class)?.branches(&self.prover.state)?;
            let mut entry = ClassCache { probabilities: Vec::new(), labels: Vec::new(), outcomes: Vec::new() };
            for br in branches {
                let mut per_y = [Vec::new(), Vec::new()];
                if br.probability > 0.0 {
                    for (y, slot) in per_y.iter_mut().enumerate() {
                        let w = self.prover.bob.outcome_weights(PauliBasis::for_question(y as u8), &br.state)?;
                        *slot = w.iter().map(|v| v / br.probability).collect();
                    }
                }
                entry.probabilities.push(br.probability);
                entry.labels.push(br.label);
                entry.outcomes.push(per_y);
            }
            self.cache.insert(class, entry);
        }
        let entry = &self.cache[&class];
        let k = sample_index(&entry.probabilities, rng)?;
        let out = scheme.reencrypt(c.key_id, &entry.labels[k], rng)?;
        self.current = Some((class, k));
        Ok(out)
    }

    pub fn second_round<R: Rng + ?Sized>(&mut self, y: u8, rng: &mut R) -> Result<u64> {
        let (class, k) = self
            .current
            .take()
            .ok_or_else(|| Error::InvalidArgument("second round before first round".into()))?;
        let dist = &self.cache[&class].outcomes[k][usize::from(y)];
        Ok(sample_index(dist, rng)? as u64)
    }
}

/// Runs `trials` seeded rounds against `prover`.
pub fn run_protocol(
    prover: &VerifierProver,
    h: &XxzzHamiltonian,
    config: &ProtocolConfig,
    trials: u64,
) -> Result<Vec<VerifierTranscript>> {
    let dists = QuestionDistributions::build(h)?;
    let scheme = Arc::new(IdealQhe::new(config.lambda.max(1))?);
    let mut rng = ChaCha20Rng::seed_from_u64(config.seed);
    let sk = scheme.gen(&mut rng);
    let mut session = VerifierSession::new(prover);
    let mut out = Vec::with_capacity(trials as usize);
    for round in 0..trials {
        let (question, y) = dists.sample_question(config, &mut rng)?;
        let c = scheme.enc(&sk, &question.to_bits(h.n)?, &mut rng)?;
        let alpha = session.first_round(&scheme, &c, &mut rng)?;
        let s_b = session.second_round(y, &mut rng)?;
        let s_a = scheme.dec(&sk, &alpha)?.slice(0, question.answer_len(h.n))?;
        let v = verdict(h, &question, y, &s_a, s_b, &mut rng)?;
        out.push(VerifierTranscript { round, question, y, c, alpha, s_a, s_b, teleport: v.teleport, accepted: v.accepted });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubtestTally {
    pub rounds: u64,
    pub accepted: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolMonteCarlo {
    pub seed: u64,
    pub overall: MonteCarloSummary,
    pub chsh: SubtestTally,
    pub commutation: SubtestTally,
    pub teleport: SubtestTally,
    /// Mean measured term value over checked `X` and `Z` teleport rounds.
    pub teleport_x_mean: Option<f64>,
    pub teleport_z_mean: Option<f64>,
    pub teleport_x_checks: u64,
    pub teleport_z_checks: u64,
}

pub fn monte_carlo(
    prover: &VerifierProver,
    h: &XxzzHamiltonian,
    config: &ProtocolConfig,
    trials: u64,
) -> Result<ProtocolMonteCarlo> {
    if trials == 0 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    let exact = protocol_value_exact(prover, h, config)?.total;
    let transcripts = run_protocol(prover, h, config, trials)?;
    let mut tallies = [(0u64, 0u64); 3];
    let mut sums = [(0i64, 0u64); 2];
    for t in &transcripts {
        let slot = match t.question.subtest() {
            Subtest::Chsh => 0,
            Subtest::Commutation => 1,
            Subtest::Teleport => 2,
        };
        tallies[slot].0 += 1;
        tallies[slot].1 += u64::from(t.accepted);
        if let Some(TeleportCheck { w, value: Some(v), .. }) = t.teleport {
            let s = &mut sums[usize::from(w)];
            s.0 += i64::from(v);
            s.1 += 1;
        }
    }
    let wins = tallies.iter().map(|t| t.1).sum();
    let tally = |t: (u64, u64)| SubtestTally { rounds: t.0, accepted: t.1 };
    let mean = |s: (i64, u64)| if s.1 == 0 { None } else { Some(s.0 as f64 / s.1 as f64) };
    Ok(ProtocolMonteCarlo {
        seed: config.seed,
        overall: summarize(trials, wins, exact),
        chsh: tally(tallies[0]),
        commutation: tally(tallies[1]),
        teleport: tally(tallies[2]),
        teleport_x_mean: mean(sums[0]),
        teleport_z_mean: mean(sums[1]),
        teleport_x_checks: sums[0].1,
        teleport_z_checks: sums[1].1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificates::chsh_quantum_value;
    use crate::verifier::hamiltonian::HamiltonianTerm;

    fn mixed_h(p: f64) -> XxzzHamiltonian {
        XxzzHamiltonian::new(
            2,
            vec![
                HamiltonianTerm { w: PauliBasis::X, i: 0, j: 1, p },
                HamiltonianTerm { w: PauliBasis::Z, i: 0, j: 1, p: 1.0 - p },
            ],
        )
        .unwrap()
    }

    #[test]
    fn honest_subtests_on_ground_state() {
        let h = mixed_h(0.3);
        let (e, ground) = h.ground_state().unwrap();
        let config = ProtocolConfig::new(2, -0.9, -0.5, Some(0.2), 1).unwrap();
        let r = honest_completeness(&h, &Witness::Pure(ground), &config).unwrap();
        assert!((r.values.chsh.unwrap() - chsh_quantum_value()).abs() < 1e-9);
        assert!((r.values.commutation.unwrap() - 1.0).abs() < 1e-10);
        assert!((r.values.teleport - (0.75 - 0.25 * e)).abs() < 1e-10);
        assert!((r.values.total - r.simulated_formula).abs() < 1e-10);
    }

    #[test]
    fn single_z_term_teleport_accepts_always() {
        let h = XxzzHamiltonian::new(2, vec![HamiltonianTerm { w: PauliBasis::Z, i: 0, j: 1, p: 1.0 }]).unwrap();
        let prover = honest_verifier_prover(&Witness::Pure(crate::quantum::StateVector::basis(2, 1).unwrap())).unwrap();
        let d = QuestionDistributions::build(&h).unwrap();
        let p = subtest_acceptance(&prover, &h, &d, Subtest::Teleport).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
        assert!(subtest_acceptance(&prover, &h, &d, Subtest::Chsh).is_err());
    }

    #[test]
    fn teleport_only_config_skips_pair_distributions() {
        let h = XxzzHamiltonian::new(2, vec![HamiltonianTerm { w: PauliBasis::Z, i: 0, j: 1, p: 1.0 }]).unwrap();
        let prover = honest_verifier_prover(&Witness::Pure(crate::quantum::StateVector::basis(2, 1).unwrap())).unwrap();
        let config = ProtocolConfig::new(2, -1.0, 0.0, Some(1.0), 3).unwrap();
        let v = protocol_value_exact(&prover, &h, &config).unwrap();
        assert!(v.chsh.is_none());
        assert!((v.total - 1.0).abs() < 1e-12);
        let mc = monte_carlo(&prover, &h, &config, 200).unwrap();
        assert_eq!(mc.teleport.rounds, 200);
        assert_eq!(mc.overall.wins, 200);
    }
}
