//! Operator-level diagnostics of a prover: Bob's (anti)commutation
//! residuals, the phase and `ZXZ` residuals on teleport states, the
//! correction-signed energy estimates and the extracted witness.

use serde::{Deserialize, Serialize};

use super::hamiltonian::{PauliBasis, XxzzHamiltonian};
use super::isometry::extract_witness;
use super::params::ProtocolConfig;
use super::protocol::{protocol_value_exact, SubtestValues};
use super::prover::VerifierProver;
use super::questions::{AliceQuestion, QuestionDistributions};
use crate::bits::Bits;
use crate::certificates::{chsh_quantum_value, Check};
use crate::error::Result;
use crate::quantum::{KrausBranch, PauliMask, StateVector};

const IDENTITY_TOL: f64 = 1e-9;
const LEMMA_TOL: f64 = 1e-8;

fn sign(bit: bool) -> f64 {
    if bit {
        -1.0
    } else {
        1.0
    }
}

struct Ops<'a> {
    prover: &'a VerifierProver,
}

impl Ops<'_> {
    fn z(&self, a: &PauliMask, psi: &StateVector) -> Result<StateVector> {
        self.prover.bob.apply(PauliBasis::Z, a, psi)
    }

    fn x(&self, b: &PauliMask, psi: &StateVector) -> Result<StateVector> {
        self.prover.bob.apply(PauliBasis::X, b, psi)
    }

    /// `‖(Z(a)X(b) + s X(b)Z(a))ψ‖²`.
    fn product_norm(&self, a: &PauliMask, b: &PauliMask, s: f64, psi: &StateVector) -> Result<f64> {
        let zx = self.z(a, &self.x(b, psi)?)?;
        let xz = self.x(b, &self.z(a, psi)?)?;
        Ok(zx.amplitudes().iter().zip(xz.amplitudes().iter()).map(|(p, q)| (p + q * s).norm_sqr()).sum())
    }

    /// `‖(Z(a) + s X(b))ψ‖²`.
    fn sum_norm(&self, a: &PauliMask, b: &PauliMask, s: f64, psi: &StateVector) -> Result<f64> {
        let z = self.z(a, psi)?;
        let x = self.x(b, psi)?;
        Ok(z.amplitudes().iter().zip(x.amplitudes().iter()).map(|(p, q)| (p + q * s).norm_sqr()).sum())
    }
}

fn live(branches: &[KrausBranch]) -> impl Iterator<Item = &KrausBranch> {
    branches.iter().filter(|b| b.probability > 0.0)
}

/// Term qubits `(i, j)` of a weight-two mask.
fn term_pair(mask: &PauliMask) -> (usize, usize) {
    let s = mask.support();
    (s[0], s[1])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtractedWitness {
    pub trace: f64,
    pub min_eigenvalue: f64,
    pub energy: f64,
    /// `E_{a←D_Z} tr[σ_Z(a)ρ]`.
    pub z_expectation: f64,
    /// `E_{b←D_X} tr[σ_X(b)ρ]`.
    pub x_expectation: f64,
}

/// Quantities that need only the teleport branches.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TeleportEstimates {
    /// `E_{b←D_X} Σ_α (-1)^{s_i+s_j} <X(b)>_α`; zero without `X` terms.
    pub energy_x: f64,
    /// `E_{a←D_Z} Σ_α (-1)^{s_{n+i}+s_{n+j}} <Z(a)>_α`; zero without `Z` terms.
    pub energy_z: f64,
    pub energy_estimate: f64,
    pub extracted: ExtractedWitness,
    pub single_rho_z_gap: f64,
    pub single_rho_x_gap: f64,
}

/// Energy estimates and the extracted witness from teleport branches.
pub fn teleport_estimates(
    prover: &VerifierProver,
    h: &XxzzHamiltonian,
    dists: &QuestionDistributions,
    tele: &[KrausBranch],
) -> Result<TeleportEstimates> {
    let n = prover.n;
    let ops = Ops { prover };
    let mut energy_x = 0.0;
    for (b, p) in &dists.d_x {
        let (i, j) = term_pair(b);
        for br in live(tele) {
            let x_psi = ops.x(b, &br.state)?;
            energy_x += p * sign(br.label.bit(i) ^ br.label.bit(j)) * br.state.inner(&x_psi).re;
        }
    }
    let mut energy_z = 0.0;
    for (a, p) in &dists.d_z {
        let (i, j) = term_pair(a);
        for br in live(tele) {
            let z_psi = ops.z(a, &br.state)?;
            energy_z += p * sign(br.label.bit(n + i) ^ br.label.bit(n + j)) * br.state.inner(&z_psi).re;
        }
    }
    let energy_estimate = h.weight(PauliBasis::X) * energy_x + h.weight(PauliBasis::Z) * energy_z;

    let pairs: Vec<(&Bits, &StateVector)> = live(tele).map(|b| (&b.label, &b.state)).collect();
    let rho = extract_witness(&prover.bob, pairs)?;
    let expect = |basis: PauliBasis, table: &[(PauliMask, f64)]| -> Result<f64> {
        let mut acc = 0.0;
        for (m, p) in table {
            acc += p * rho.try_mul(&basis.operator(m)?)?.trace().re;
        }
        Ok(acc)
    };
    let extracted = ExtractedWitness {
        trace: rho.trace().re,
        min_eigenvalue: rho.hermitian_eigen()?.values.iter().cloned().fold(f64::INFINITY, f64::min),
        energy: h.energy(&rho)?,
        z_expectation: expect(PauliBasis::Z, &dists.d_z)?,
        x_expectation: expect(PauliBasis::X, &dists.d_x)?,
    };
    Ok(TeleportEstimates {
        energy_x,
        energy_z,
        energy_estimate,
        single_rho_z_gap: (extracted.z_expectation - energy_z).abs(),
        single_rho_x_gap: (extracted.x_expectation - energy_x).abs(),
        extracted,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SoundnessReport {
    pub prover: String,
    pub n: usize,
    pub kappa: f64,
    pub values: SubtestValues,
    /// `ω* - p_CHSH`.
    pub epsilon_chsh: f64,
    /// `1 - p_com`.
    pub epsilon_commutation: f64,
    /// `E_{D_Q1} Σ_α ‖{Z(a),X(b)} ψ_α‖²` on CHSH first-round states.
    pub anticommutator_residual: f64,
    /// `E_{D_Q0} Σ_α ‖[Z(a),X(b)] ψ_α‖²` on commutation first-round states.
    pub commutator_residual: f64,
    /// The same two quantities on teleport first-round states.
    pub teleport_anticommutator: f64,
    pub teleport_commutator: f64,
    /// `E_{D_Q} Σ_α ‖((-1)^{a·b} Z(a)X(b) - X(b)Z(a)) ψ_α‖²`.
    pub phase_residual: f64,
    pub odd_fraction: f64,
    /// `x`-dependence of Bob's `(Z(a) ± X(b))²` statistics on CHSH states.
    pub crypto_slack: f64,
    /// `|T0 - com| + |T1 - anticom|`: the cost of moving from subtest
    /// states to teleport states.
    pub phase_slack: f64,
    pub anticommutator_bound: f64,
    pub commutator_bound: f64,
    pub phase_bound: f64,
    /// `sqrt(phase_residual)`.
    pub delta_teleport: f64,
    /// Conditioned `ZXZ` residuals indexed by `2·u1 + u2`.
    pub zxz: [f64; 4],
    pub energy_x: f64,
    pub energy_z: f64,
    /// `Σp_X Ê[H_X] + Σp_Z Ê[H_Z]`.
    pub energy_estimate: f64,
    pub extracted: ExtractedWitness,
    pub single_rho_z_gap: f64,
    pub single_rho_x_gap: f64,
    pub checks: Vec<Check>,
}

impl SoundnessReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

pub fn soundness_report(prover: &VerifierProver, h: &XxzzHamiltonian, config: &ProtocolConfig) -> Result<SoundnessReport> {
    let n = prover.n;
    let ops = Ops { prover };
    let dists = QuestionDistributions::build(h)?;
    let values = protocol_value_exact(prover, h, config)?;
    let p_chsh = crate::verifier::protocol::subtest_acceptance(prover, h, &dists, super::questions::Subtest::Chsh)?;
    let p_com = crate::verifier::protocol::subtest_acceptance(prover, h, &dists, super::questions::Subtest::Commutation)?;
    let epsilon_chsh = chsh_quantum_value() - p_chsh;
    let epsilon_commutation = 1.0 - p_com;

    let mut anticom = 0.0;
    let mut crypto_slack = 0.0;
    for ((a, b), p) in dists.d_q1()? {
        let mut s = [[0.0; 2]; 2];
        for (xi, x) in [false, true].into_iter().enumerate() {
            let branches = prover.branches(&AliceQuestion::chsh(*a, *b, x)?)?;
            for br in live(&branches) {
                if !x {
                    anticom += p * ops.product_norm(a, b, 1.0, &br.state)?;
                }
                s[0][xi] += 0.5 * ops.sum_norm(a, b, 1.0, &br.state)?;
                s[1][xi] += 0.5 * ops.sum_norm(a, b, -1.0, &br.state)?;
            }
        }
        crypto_slack += p * ((s[0][0] - s[0][1]).abs() + (s[1][0] - s[1][1]).abs());
    }
    let mut com = 0.0;
    for ((a, b), p) in dists.d_q0()? {
        for br in live(&prover.branches(&AliceQuestion::commutation(*a, *b)?)?) {
            com += p * ops.product_norm(a, b, -1.0, &br.state)?;
        }
    }

    let tele = prover.branches(&AliceQuestion::Teleport)?;
    let (mut t0, mut t1) = (0.0, 0.0);
    for ((a, b), p) in dists.d_q0()? {
        for br in live(&tele) {
            t0 += p * ops.product_norm(a, b, -1.0, &br.state)?;
        }
    }
    for ((a, b), p) in dists.d_q1()? {
        for br in live(&tele) {
            t1 += p * ops.product_norm(a, b, 1.0, &br.state)?;
        }
    }
    let mut phase = 0.0;
    let mut zxz = [0.0; 4];
    for ((a, b), p) in dists.d_q()? {
        let odd = a.dot(b);
        let (i, j) = term_pair(b);
        for br in live(&tele) {
            // ((-1)^{a·b} ZX - XZ)ψ = -(XZ + (-1)^{a·b+1} ZX)ψ.
            phase += p * ops.product_norm(a, b, if odd { 1.0 } else { -1.0 }, &br.state)?;
            let zxz_psi = ops.z(a, &ops.x(b, &ops.z(a, &br.state)?)?)?;
            let x_psi = ops.x(b, &br.state)?;
            let v = sign(odd) * br.state.inner(&zxz_psi).re - br.state.inner(&x_psi).re;
            let k = 2 * usize::from(br.label.bit(i)) + usize::from(br.label.bit(j));
            zxz[k] += p * v;
        }
    }
    let odd_fraction = dists.odd_fraction()?;
    let phase_slack = (t0 - com).abs() + (t1 - anticom).abs();
    let anticommutator_bound = 96.0 * 2f64.sqrt() * epsilon_chsh.max(0.0) + 12.0 * crypto_slack;
    let commutator_bound = 128.0 * epsilon_commutation.max(0.0);
    let phase_bound = 0.5 * (anticommutator_bound + commutator_bound) + phase_slack;
    let delta_teleport = phase.max(0.0).sqrt();

    let est = teleport_estimates(prover, h, &dists, &tele)?;
    let (energy_x, energy_z, energy_estimate) = (est.energy_x, est.energy_z, est.energy_estimate);
    let extracted = est.extracted;
    let (single_rho_z_gap, single_rho_x_gap) = (est.single_rho_z_gap, est.single_rho_x_gap);
    // The X gap equals the sign-weighted sum of the conditioned residuals.
    let zxz_signed = zxz[0] - zxz[1] - zxz[2] + zxz[3];

    let mut checks = Vec::new();
    let min_residual = [anticom, com, t0, t1, phase].into_iter().fold(f64::INFINITY, f64::min);
    checks.push(Check::at_most("residuals_nonnegative", -min_residual, 1e-12));
    if epsilon_chsh >= -IDENTITY_TOL {
        checks.push(Check::at_most("anticommutation_lemma", anticom, anticommutator_bound + LEMMA_TOL));
    } else {
        checks.push(Check::not_applicable("anticommutation_lemma", anticom, anticommutator_bound));
    }
    checks.push(Check::at_most("commutation_lemma", com, commutator_bound + LEMMA_TOL));
    let split = (1.0 - odd_fraction) * t0 + odd_fraction * t1;
    checks.push(Check::at_most("phase_split", (phase - split).abs(), IDENTITY_TOL));
    checks.push(Check::at_most("phase_vs_parts", phase, 0.5 * (com + anticom) + phase_slack + IDENTITY_TOL));
    checks.push(Check::at_most("phase_vs_lemma_bounds", phase, phase_bound + LEMMA_TOL));
    for (k, v) in zxz.iter().enumerate() {
        let name = format!("zxz_{}{}", k >> 1, k & 1);
        checks.push(Check::at_most(&name, v.abs(), delta_teleport + IDENTITY_TOL));
    }
    let zxz_total: f64 = zxz.iter().map(|v| v.abs()).sum();
    checks.push(Check::at_most("zxz_sum", zxz_total, delta_teleport + IDENTITY_TOL));
    let tele_formula = 0.75 - 0.25 * energy_estimate;
    checks.push(Check::at_most("teleport_energy_identity", (values.teleport - tele_formula).abs(), IDENTITY_TOL));
    checks.push(Check::at_most("single_rho_trace", (extracted.trace - 1.0).abs(), IDENTITY_TOL));
    checks.push(Check::at_most("single_rho_psd", -extracted.min_eigenvalue, IDENTITY_TOL));
    checks.push(Check::at_most("single_rho_z", single_rho_z_gap, IDENTITY_TOL));
    checks.push(Check::at_most(
        "single_rho_x_identity",
        (extracted.x_expectation - energy_x - zxz_signed).abs(),
        IDENTITY_TOL,
    ));
    checks.push(Check::at_most("single_rho_x", single_rho_x_gap, 4.0 * delta_teleport + IDENTITY_TOL));

    Ok(SoundnessReport {
        prover: prover.id.clone(),
        n,
        kappa: config.kappa,
        values,
        epsilon_chsh,
        epsilon_commutation,
        anticommutator_residual: anticom,
        commutator_residual: com,
        teleport_anticommutator: t1,
        teleport_commutator: t0,
        phase_residual: phase,
        odd_fraction,
        crypto_slack,
        phase_slack,
        anticommutator_bound,
        commutator_bound,
        phase_bound,
        delta_teleport,
        zxz,
        energy_x,
        energy_z,
        energy_estimate,
        extracted,
        single_rho_z_gap,
        single_rho_x_gap,
        checks,
    })
}
