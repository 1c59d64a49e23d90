//! Compiled verification of XX/ZZ Hamiltonian energies.
//!
//! A verifier runs three subtests against a single prover: a compiled CHSH
//! test and a compiled commutation test on random Pauli pairs, and a
//! teleport-and-measure energy test on the prover's witness.

pub mod adversaries;
pub mod hamiltonian;
pub mod isometry;
pub mod params;
pub mod protocol;
pub mod prover;
pub mod questions;
pub mod report;
pub mod soundness;
pub mod verdict;

pub use adversaries::{
    scrambled_bob_prover, standard_adversaries, tilted_bob_prover, witness_reading_bob_prover, z_only_bob_prover,
};
pub use hamiltonian::{HamiltonianTerm, PauliBasis, XxzzHamiltonian};
pub use isometry::{
    apply_swap_isometry, extract_witness, isometry_audit, isometry_defect, isometry_pauli_check, isometry_pauli_checks,
    q_register_density, swap_isometry, IsometryAudit, IsometryRecord, PauliCheck,
};
pub use params::{
    completeness_simulated, completeness_stated, default_kappa, thm_main_parameters, ProtocolConfig, ThmMainParameters,
};
pub use protocol::{
    honest_completeness, monte_carlo, protocol_value_exact, question_acceptance, run_protocol, subtest_acceptance,
    CompletenessReport, ProtocolMonteCarlo, SubtestTally, SubtestValues, VerifierSession, VerifierTranscript,
};
pub use prover::{honest_verifier_prover, BobObservables, HonestAlice, VerifierProver, Witness};
pub use questions::{answer_bits, question_bits, AliceQuestion, QuestionDistributions, Subtest};
pub use report::{verify_honest, VerificationReport, WitnessSpec};
pub use soundness::{soundness_report, teleport_estimates, ExtractedWitness, SoundnessReport, TeleportEstimates};
pub use verdict::{acceptance_probability, verdict, TeleportCheck, Verdict};
