//! Moment matrix of a compiled CHSH prover and the degree-2 pseudo-expectation
//! it defines.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use super::{chsh_quantum_value, ChshView};
use crate::error::{Error, Result};
use crate::quantum::{re, ComplexMatrix, C64};

/// Generators of the CHSH operator algebra, in moment-matrix order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Generator {
    A0,
    A1,
    B0,
    B1,
}

impl Generator {
    pub const ALL: [Generator; 4] = [Generator::A0, Generator::A1, Generator::B0, Generator::B1];

    pub fn index(self) -> usize {
        self as usize
    }

    fn is_alice(self) -> bool {
        matches!(self, Generator::A0 | Generator::A1)
    }
}

/// 4x4 Hermitian matrix indexed by `(A0, A1, B0, B1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaMatrix {
    pub entries: [[C64; 4]; 4],
}

impl GammaMatrix {
    pub fn get(&self, u: Generator, v: Generator) -> C64 {
        self.entries[u.index()][v.index()]
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(4, 4, |r, c| self.entries[r][c])
    }

    /// `q† Γ q`.
    pub fn quadratic_form(&self, q: &[C64; 4]) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..4 {
            for j in 0..4 {
                acc += q[i].conj() * self.entries[i][j] * q[j];
            }
        }
        acc
    }

    pub fn max_diagonal_defect(&self) -> f64 {
        (0..4).map(|i| (self.entries[i][i] - re(1.0)).norm()).fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.to_matrix().hermitian_eigen()?.values[0])
    }
}

/// Moment matrix of a prover:
///
/// * `Γ_{A_x A_x} = 1`, `Γ_{A_0 A_1} = 0`;
/// * `Γ_{A_x B_y} = Σ_α (-1)^{Dec α} <ψ^x_α| B^y |ψ^x_α>`;
/// * `Γ_{B_y B_y'}` = the same sum of `<B^y B^y'>`, averaged over `x`.
///
/// It need not be positive semidefinite for a general compiled prover.
pub fn gamma_matrix(view: &ChshView) -> Result<GammaMatrix> {
    let mut e = [[C64::new(0.0, 0.0); 4]; 4];
    e[0][0] = re(1.0);
    e[1][1] = re(1.0);
    let bs = [&view.b0, &view.b1];
    for x in 0..2 {
        for (y, b) in bs.iter().enumerate() {
            let v = re(view.signed_expectation(x, b)?);
            e[x][2 + y] = v;
            e[2 + y][x] = v;
        }
    }
    for (y, by) in bs.iter().enumerate() {
        for (y2, by2) in bs.iter().enumerate() {
            let prod = *by * *by2;
            let mut acc = C64::new(0.0, 0.0);
            for x in 0..2 {
                for b in &view.branches[x] {
                    acc += b.state.expectation(&prod)?;
                }
            }
            e[2 + y][2 + y2] = acc * 0.5;
        }
    }
    Ok(GammaMatrix { entries: e })
}

/// `c · u† v` terms of a degree-2 polynomial in the generators.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Polynomial {
    pub constant: C64,
    pub terms: Vec<(C64, Generator, Generator)>,
}

impl Polynomial {
    /// `A0 B0 + A0 B1 + A1 B0 - A1 B1`.
    pub fn chsh() -> Self {
        use Generator::*;
        let one = re(1.0);
        Self {
            constant: C64::new(0.0, 0.0),
            terms: vec![(one, A0, B0), (one, A0, B1), (one, A1, B0), (-one, A1, B1)],
        }
    }

    /// `q† q` for `q = Σ_i q_i g_i`.
    pub fn hermitian_square(q: &[C64; 4]) -> Self {
        let mut terms = Vec::new();
        for (i, gi) in Generator::ALL.iter().enumerate() {
            for (j, gj) in Generator::ALL.iter().enumerate() {
                let c = q[i].conj() * q[j];
                if c != C64::new(0.0, 0.0) {
                    terms.push((c, *gi, *gj));
                }
            }
        }
        Self { constant: C64::new(0.0, 0.0), terms }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().copied());
        Self { constant: self.constant + other.constant, terms }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            constant: self.constant * s,
            terms: self.terms.iter().map(|(c, u, v)| (c * s, *u, *v)).collect(),
        }
    }

    /// Normal form in the algebra where every generator squares to one and
    /// Alice's generators commute with Bob's.
    pub fn normal_form(&self) -> BTreeMap<Vec<Generator>, C64> {
        let mut out: BTreeMap<Vec<Generator>, C64> = BTreeMap::new();
        let mut push = |w: Vec<Generator>, c: C64| {
            *out.entry(w).or_insert(C64::new(0.0, 0.0)) += c;
        };
        push(vec![], self.constant);
        for &(c, u, v) in &self.terms {
            push(reduce_word(&[u, v]), c);
        }
        out.retain(|_, c| c.norm() > 0.0);
        out
    }

    /// Operator obtained by substituting concrete operators for the generators.
    pub fn evaluate(&self, ops: &[ComplexMatrix; 4]) -> ComplexMatrix {
        let dim = ops[0].rows();
        let mut acc = ComplexMatrix::identity(dim).scale(self.constant);
        for &(c, u, v) in &self.terms {
            let term = &ops[u.index()].adjoint() * &ops[v.index()];
            acc = &acc + &term.scale(c);
        }
        acc
    }
}

fn reduce_word(word: &[Generator]) -> Vec<Generator> {
    let mut w: Vec<Generator> = word.iter().copied().filter(|g| g.is_alice()).collect();
    w.extend(word.iter().copied().filter(|g| !g.is_alice()));
    let mut out: Vec<Generator> = Vec::with_capacity(w.len());
    for g in w {
        if out.last() == Some(&g) {
            out.pop();
        } else {
            out.push(g);
        }
    }
    out
}

/// `Ẽ[p] = c_0 + Σ c · Γ_{u v}`.
pub fn pseudo_expectation(gamma: &GammaMatrix, p: &Polynomial) -> C64 {
    p.constant + p.terms.iter().map(|&(c, u, v)| c * gamma.get(u, v)).sum::<C64>()
}

/// `q_1 = A0 - (B0 + B1)/√2`.
pub fn q1() -> [C64; 4] {
    let s = 1.0 / 2f64.sqrt();
    [re(1.0), re(0.0), re(-s), re(-s)]
}

/// `q_2 = A1 - (B0 - B1)/√2`.
pub fn q2() -> [C64; 4] {
    let s = 1.0 / 2f64.sqrt();
    [re(0.0), re(1.0), re(-s), re(s)]
}

/// Largest coefficient of `q_1†q_1 + q_2†q_2 - (4 - √2 p_CHSH)` in normal form.
pub fn sos_identity_symbolic_residual() -> f64 {
    let lhs = Polynomial::hermitian_square(&q1()).add(&Polynomial::hermitian_square(&q2()));
    let mut rhs = Polynomial::chsh().scale(re(-(2f64.sqrt())));
    rhs.constant = re(4.0);
    let diff = lhs.add(&rhs.scale(re(-1.0)));
    diff.normal_form().values().map(|c| c.norm()).fold(0.0, f64::max)
}

/// `‖q_1† q_1 + q_2† q_2 - 4 + √2 p_CHSH‖_max` for concrete binary observables
/// `(A0, A1, B0, B1)` with Alice's commuting with Bob's.
pub fn sos_identity_residual(ops: &[ComplexMatrix; 4]) -> Result<f64> {
    let dim = ops[0].rows();
    for o in ops {
        if !o.is_binary_observable(1e-9) {
            return Err(Error::InvalidOperator("SoS instantiation needs binary observables".into()));
        }
        if o.rows() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: o.rows() });
        }
    }
    let lhs = Polynomial::hermitian_square(&q1()).add(&Polynomial::hermitian_square(&q2())).evaluate(ops);
    let p = Polynomial::chsh().evaluate(ops);
    let rhs = &ComplexMatrix::identity(dim).scale_real(4.0) - &p.scale_real(2f64.sqrt());
    Ok(lhs.max_abs_diff(&rhs))
}

/// `½ + ⅛ Re(Γ_{A0B0} + Γ_{A0B1} + Γ_{A1B0} - Γ_{A1B1})`.
pub fn win_probability_from_gamma(gamma: &GammaMatrix) -> f64 {
    0.5 + pseudo_expectation(gamma, &Polynomial::chsh()).re / 8.0
}

/// `|Pr[win] - (ω* - (√2/16)(q_1†Γq_1 + q_2†Γq_2))|`.
pub fn win_decomposition_residual(gamma: &GammaMatrix) -> f64 {
    let forms = gamma.quadratic_form(&q1()).re + gamma.quadratic_form(&q2()).re;
    (win_probability_from_gamma(gamma) - (chsh_quantum_value() - 2f64.sqrt() / 16.0 * forms)).abs()
}

fn mu_setup(j: usize) -> Result<(usize, f64)> {
    match j {
        1 => Ok((0, 1.0)),
        2 => Ok((1, -1.0)),
        _ => Err(Error::InvalidArgument(format!("distribution index {j} is not 1 or 2"))),
    }
}

/// `E_{μ_j}[(a - b)²]` where `a` is the decrypted first answer on class
/// `x = j - 1` and `b` an eigenvalue of `(B0 ± B1)/√2` measured afterwards.
pub fn mu_expectation(view: &ChshView, j: usize) -> Result<f64> {
    let (x, sign) = mu_setup(j)?;
    let op = view.b_combination(sign).scale_real(1.0 / 2f64.sqrt());
    let eig = op.hermitian_eigen()?;
    let dim = op.rows();
    let mut acc = 0.0;
    for br in &view.branches[x] {
        for (k, &lambda) in eig.values.iter().enumerate() {
            let mut overlap = C64::new(0.0, 0.0);
            for i in 0..dim {
                overlap += eig.vectors.get(i, k).conj() * br.state.amplitude(i);
            }
            acc += overlap.norm_sqr() * (br.sign - lambda).powi(2);
        }
    }
    Ok(acc)
}

/// Signed gap `avg_x <𝔅²>_x - <𝔅²>_{x_j}` with `𝔅 = (B0 ± B1)/√2`, so that
/// `q_j† Γ q_j = E_{μ_j}[(a-b)²] + gap` holds exactly.
pub fn gamma_slack_signed(view: &ChshView, j: usize) -> Result<f64> {
    let (x, sign) = mu_setup(j)?;
    let b = view.b_combination(sign);
    let sq = (&b * &b).scale_real(0.5);
    let per_x = [view.sum_expectation(0, &sq)?, view.sum_expectation(1, &sq)?];
    Ok(0.5 * (per_x[0] + per_x[1]) - per_x[x])
}

/// Absolute value of [`gamma_slack_signed`]; zero for provers whose
/// post-measurement statistics of `𝔅²` do not depend on `x`.
pub fn gamma_slack(view: &ChshView, j: usize) -> Result<f64> {
    Ok(gamma_slack_signed(view, j)?.abs())
}
