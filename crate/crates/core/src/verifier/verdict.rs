//! The verifier's decision for one round.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::hamiltonian::{PauliBasis, XxzzHamiltonian};
use super::questions::AliceQuestion;
use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::quantum::{sample_index, PauliMask};

fn mask_dot(mask: &PauliMask, s_b: u64) -> bool {
    (mask.bits() & s_b).count_ones() % 2 == 1
}

/// Bob's answer bit for the observable selected by `y`: `a·s_B` for `y = 0`
/// and `b·s_B` for `y = 1`.
pub fn bob_bit(a: &PauliMask, b: &PauliMask, y: u8, s_b: u64) -> bool {
    if y == 0 {
        mask_dot(a, s_b)
    } else {
        mask_dot(b, s_b)
    }
}

/// Bit `i` of an `n`-bit Bob answer, qubit 0 first.
fn s_b_bit(n: usize, s_b: u64, i: usize) -> bool {
    (s_b >> (n - 1 - i)) & 1 == 1
}

/// Corrected parity for a checked teleport term; the term's energy
/// outcome is `-1` exactly when this is `true`.
pub fn corrected_parity(n: usize, w: PauliBasis, i: usize, j: usize, s_a: &Bits, s_b: u64) -> bool {
    // X corrections flip Z outcomes and Z corrections flip X outcomes.
    let offset = match w {
        PauliBasis::Z => n,
        PauliBasis::X => 0,
    };
    s_b_bit(n, s_b, i) ^ s_b_bit(n, s_b, j) ^ s_a.bit(offset + i) ^ s_a.bit(offset + j)
}

fn check_lengths(h: &XxzzHamiltonian, q: &AliceQuestion, s_a: &Bits, s_b: u64) -> Result<()> {
    let expected = q.answer_len(h.n);
    if s_a.len() != expected {
        return Err(Error::InvalidArgument(format!("answer of {} bits, expected {expected}", s_a.len())));
    }
    if s_b >> h.n != 0 {
        return Err(Error::InvalidArgument(format!("Bob answer {s_b} exceeds {} bits", h.n)));
    }
    Ok(())
}

/// Probability that the verifier accepts, averaged over its own
/// randomness in the teleport subtest.
pub fn acceptance_probability(h: &XxzzHamiltonian, q: &AliceQuestion, y: u8, s_a: &Bits, s_b: u64) -> Result<f64> {
    check_lengths(h, q, s_a, s_b)?;
    let accepted = match q {
        AliceQuestion::Chsh { a, b, x } => s_a.bit(0) ^ bob_bit(a, b, y, s_b) == (*x && y == 1),
        AliceQuestion::Commutation { a, b } => s_a.bit(usize::from(y)) == bob_bit(a, b, y, s_b),
        AliceQuestion::Teleport => {
            let basis = PauliBasis::for_question(y);
            let mut p = 1.0 - h.weight(basis);
            for t in h.terms.iter().filter(|t| t.w == basis) {
                if corrected_parity(h.n, basis, t.i, t.j, s_a, s_b) {
                    p += t.p;
                }
            }
            return Ok(p);
        }
    };
    Ok(if accepted { 1.0 } else { 0.0 })
}

/// What happened in a teleport round's energy check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TeleportCheck {
    /// `0` for an `X` check, `1` for `Z`.
    pub w: u8,
    /// Index into the Hamiltonian's terms, when the check was performed.
    pub term: Option<usize>,
    /// Measured term value `±1`, when the check was performed.
    pub value: Option<i8>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub accepted: bool,
    pub teleport: Option<TeleportCheck>,
}

/// Samples the verifier's decision.
pub fn verdict<R: Rng + ?Sized>(
    h: &XxzzHamiltonian,
    q: &AliceQuestion,
    y: u8,
    s_a: &Bits,
    s_b: u64,
    rng: &mut R,
) -> Result<Verdict> {
    if !matches!(q, AliceQuestion::Teleport) {
        let p = acceptance_probability(h, q, y, s_a, s_b)?;
        return Ok(Verdict { accepted: p == 1.0, teleport: None });
    }
    check_lengths(h, q, s_a, s_b)?;
    let w: u8 = if rng.random::<f64>() < h.weight(PauliBasis::X) { 0 } else { 1 };
    let basis = if w == 0 { PauliBasis::X } else { PauliBasis::Z };
    if basis != PauliBasis::for_question(y) {
        return Ok(Verdict { accepted: true, teleport: Some(TeleportCheck { w, term: None, value: None }) });
    }
    let candidates: Vec<usize> = (0..h.terms.len()).filter(|&k| h.terms[k].w == basis).collect();
    let weights: Vec<f64> = candidates.iter().map(|&k| h.terms[k].p).collect();
    let k = candidates[sample_index(&weights, rng)?];
    let t = &h.terms[k];
    let odd = corrected_parity(h.n, basis, t.i, t.j, s_a, s_b);
    Ok(Verdict {
        accepted: odd,
        teleport: Some(TeleportCheck { w, term: Some(k), value: Some(if odd { -1 } else { 1 }) }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verifier::hamiltonian::HamiltonianTerm;

    fn h() -> XxzzHamiltonian {
        XxzzHamiltonian::new(
            2,
            vec![
                HamiltonianTerm { w: PauliBasis::X, i: 0, j: 1, p: 0.5 },
                HamiltonianTerm { w: PauliBasis::Z, i: 0, j: 1, p: 0.5 },
            ],
        )
        .unwrap()
    }

    #[test]
    fn chsh_predicate_arithmetic() {
        let a = PauliMask::new(2, 0b10).unwrap();
        let b = PauliMask::new(2, 0b11).unwrap();
        let q = AliceQuestion::chsh(a, b, false).unwrap();
        // s_B = 10 gives z = a·s_B = 1.
        assert_eq!(acceptance_probability(&h(), &q, 0, &Bits::new(1, 1).unwrap(), 0b10).unwrap(), 1.0);
        assert_eq!(acceptance_probability(&h(), &q, 0, &Bits::new(1, 0).unwrap(), 0b10).unwrap(), 0.0);
    }

    #[test]
    fn commutation_checks_selected_bit() {
        let a = PauliMask::new(2, 0b11).unwrap();
        let b = PauliMask::new(2, 0b11).unwrap();
        let q = AliceQuestion::commutation(a, b).unwrap();
        // y = 1 compares the second bit with b·s_B = 1.
        assert_eq!(acceptance_probability(&h(), &q, 1, &Bits::new(2, 0b01).unwrap(), 0b01).unwrap(), 1.0);
        assert_eq!(acceptance_probability(&h(), &q, 1, &Bits::new(2, 0b10).unwrap(), 0b01).unwrap(), 0.0);
    }

    #[test]
    fn teleport_z_term_uses_x_corrections() {
        // s_B parity 1, X-correction bits 00: result -1, accepted.
        let s_a = Bits::new(4, 0b1100).unwrap();
        assert!(corrected_parity(2, PauliBasis::Z, 0, 1, &s_a, 0b01));
        // Z basis question: half the weight auto-accepts, the Z term accepts.
        assert_eq!(acceptance_probability(&h(), &AliceQuestion::Teleport, 0, &s_a, 0b01).unwrap(), 1.0);
        let flipped = Bits::new(4, 0b0001).unwrap();
        assert_eq!(acceptance_probability(&h(), &AliceQuestion::Teleport, 0, &flipped, 0b01).unwrap(), 0.5);
    }

    #[test]
    fn wrong_answer_length_rejected() {
        assert!(acceptance_probability(&h(), &AliceQuestion::Teleport, 0, &Bits::new(1, 0).unwrap(), 0).is_err());
    }
}
