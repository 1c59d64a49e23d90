//! Two-player nonlocal games and their classical and quantum values.

mod strategy;

pub use strategy::{
    canonical_chsh_strategy, canonical_commutation_strategy, chsh_correlators,
    chsh_value_from_correlators, constant_strategy, quantum_value_exact, QuantumStrategy,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest number of deterministic strategy pairs enumerated by
/// [`classical_value_bruteforce`].
pub const MAX_CLASSICAL_STRATEGIES: u64 = 1 << 24;

/// Registry of acceptance predicates, so games serialise as plain data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Predicate {
    /// Accept iff `x·y = a ⊕ b` on single bits.
    Chsh,
    /// Alice answers two bits, Bob one; accept iff `b = a_y`.
    Commutation,
    AlwaysAccept,
    AlwaysReject,
}

impl Predicate {
    pub fn accepts(&self, x: u64, y: u64, a: u64, b: u64) -> bool {
        match self {
            Predicate::Chsh => (x & y & 1) == ((a ^ b) & 1),
            Predicate::Commutation => ((a >> (1 - (y & 1))) & 1) == (b & 1),
            Predicate::AlwaysAccept => true,
            Predicate::AlwaysReject => false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuestionPair {
    pub x: u64,
    pub y: u64,
    pub p: f64,
}

/// A game with `n1`/`n2`-bit questions and `m1`/`m2`-bit answers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonlocalGame {
    pub name: String,
    pub alice_question_bits: usize,
    pub bob_question_bits: usize,
    pub alice_answer_bits: usize,
    pub bob_answer_bits: usize,
    pub questions: Vec<QuestionPair>,
    pub predicate: Predicate,
}

impl NonlocalGame {
    pub fn new(
        name: impl Into<String>,
        question_bits: (usize, usize),
        answer_bits: (usize, usize),
        questions: Vec<QuestionPair>,
        predicate: Predicate,
    ) -> Result<Self> {
        let g = Self {
            name: name.into(),
            alice_question_bits: question_bits.0,
            bob_question_bits: question_bits.1,
            alice_answer_bits: answer_bits.0,
            bob_answer_bits: answer_bits.1,
            questions,
            predicate,
        };
        g.validate()?;
        Ok(g)
    }

    /// Re-checks invariants; used after deserialisation.
    pub fn validate(&self) -> Result<()> {
        for bits in [
            self.alice_question_bits,
            self.bob_question_bits,
            self.alice_answer_bits,
            self.bob_answer_bits,
        ] {
            if bits > 16 {
                return Err(Error::ResourceLimit(format!("{bits}-bit question or answer")));
            }
        }
        if self.questions.is_empty() {
            return Err(Error::InvalidGame("empty question distribution".into()));
        }
        let mut total = 0.0;
        for q in &self.questions {
            if q.x >= self.num_alice_questions() || q.y >= self.num_bob_questions() {
                return Err(Error::InvalidGame(format!("question ({}, {}) out of range", q.x, q.y)));
            }
            if !(q.p >= 0.0) {
                return Err(Error::InvalidGame(format!("negative probability {}", q.p)));
            }
            total += q.p;
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidGame(format!("question probabilities sum to {total}")));
        }
        Ok(())
    }

    pub fn num_alice_questions(&self) -> u64 {
        1 << self.alice_question_bits
    }

    pub fn num_bob_questions(&self) -> u64 {
        1 << self.bob_question_bits
    }

    pub fn num_alice_answers(&self) -> u64 {
        1 << self.alice_answer_bits
    }

    pub fn num_bob_answers(&self) -> u64 {
        1 << self.bob_answer_bits
    }

    /// `V(x, y, a, b) ∈ {0, 1}`.
    pub fn value(&self, x: u64, y: u64, a: u64, b: u64) -> f64 {
        if self.predicate.accepts(x, y, a, b) {
            1.0
        } else {
            0.0
        }
    }

    /// Uniform questions, single-bit answers, `x·y = a ⊕ b`.
    pub fn chsh() -> Self {
        let questions = (0..4).map(|k| QuestionPair { x: k >> 1, y: k & 1, p: 0.25 }).collect();
        Self::new("chsh", (1, 1), (1, 1), questions, Predicate::Chsh).expect("valid game")
    }

    /// Alice gets a dummy question and reports both outcomes; Bob reports one.
    pub fn commutation() -> Self {
        let questions = (0..2).map(|y| QuestionPair { x: 0, y, p: 0.5 }).collect();
        Self::new("commutation", (0, 1), (2, 1), questions, Predicate::Commutation)
            .expect("valid game")
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let g: Self = serde_json::from_str(s)?;
        g.validate()?;
        Ok(g)
    }
}

/// Best deterministic strategy value by exhaustive enumeration.
pub fn classical_value_bruteforce(game: &NonlocalGame) -> Result<f64> {
    let na = game.num_alice_questions();
    let nb = game.num_bob_questions();
    let alice_count = (game.num_alice_answers() as f64).powf(na as f64);
    let bob_count = (game.num_bob_answers() as f64).powf(nb as f64);
    if alice_count * bob_count > MAX_CLASSICAL_STRATEGIES as f64 {
        return Err(Error::ResourceLimit(format!(
            "{} deterministic strategy pairs exceed 2^24",
            alice_count * bob_count
        )));
    }
    let alice_funcs = enumerate_functions(na, game.num_alice_answers());
    let bob_funcs = enumerate_functions(nb, game.num_bob_answers());
    let mut best = f64::NEG_INFINITY;
    for fa in &alice_funcs {
        for fb in &bob_funcs {
            let v: f64 = game
                .questions
                .iter()
                .map(|q| q.p * game.value(q.x, q.y, fa[q.x as usize], fb[q.y as usize]))
                .sum();
            best = best.max(v);
        }
    }
    Ok(best)
}

fn enumerate_functions(domain: u64, range: u64) -> Vec<Vec<u64>> {
    let mut out = vec![vec![]];
    for _ in 0..domain {
        out = out
            .into_iter()
            .flat_map(|f| {
                (0..range).map(move |v| {
                    let mut g = f.clone();
                    g.push(v);
                    g
                })
            })
            .collect();
    }
    out
}
