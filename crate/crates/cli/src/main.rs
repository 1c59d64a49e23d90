use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use cnl_core::certificates::provers::{chsh_prover_by_name, commutation_prover_by_name, depolarized_chsh};
use cnl_core::certificates::{block_encoding_audit, certify, CertificateReport, Check, GameKind};
use cnl_core::compiler::{
    honest_compiled_prover, write_transcripts_jsonl, CompiledProtocol, MonteCarloSummary, DEFAULT_LAMBDA,
};
use cnl_core::games::{
    canonical_chsh_strategy, canonical_commutation_strategy, classical_value_bruteforce, constant_strategy,
    quantum_value_exact, NonlocalGame, QuantumStrategy,
};
use cnl_core::qhe::IdealQhe;
use cnl_core::verifier::{
    isometry_audit, soundness_report, standard_adversaries, verify_honest, ProtocolConfig, SoundnessReport,
    VerificationReport, WitnessSpec, XxzzHamiltonian,
};

#[derive(Parser, Debug)]
#[command(name = "cnl", version, about = "Compiled nonlocal games and Hamiltonian verification experiments")]
struct Cli {
    #[command(flatten)]
    output: OutputArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Write a JSON report (to --out, or standard output).
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    /// Write a CSV report (to --out, or standard output).
    #[arg(long, global = true)]
    csv: bool,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Game {
    Chsh,
    Commutation,
}

impl Game {
    fn build(self) -> NonlocalGame {
        match self {
            Game::Chsh => NonlocalGame::chsh(),
            Game::Commutation => NonlocalGame::commutation(),
        }
    }

    fn kind(self) -> GameKind {
        match self {
            Game::Chsh => GameKind::Chsh,
            Game::Commutation => GameKind::Commutation,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Quantum, classical and compiled value of a strategy.
    Value { game: Game, strategy: String },
    /// Sample compiled-protocol rounds and compare with the exact value.
    CompileRun {
        game: Game,
        strategy: String,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        /// Also write every transcript as JSON lines.
        #[arg(long)]
        transcripts: Option<PathBuf>,
    },
    /// Certificates for a named compiled prover.
    Certify {
        prover: String,
        #[arg(long, value_enum, default_value = "chsh")]
        game: Game,
        /// Family parameter (noise, fidelity, angle or seed).
        #[arg(long)]
        param: Option<f64>,
        /// Instead of one prover, sweep the family's noise over this many points.
        #[arg(long)]
        sweep: Option<usize>,
    },
    /// Run the verification protocol for a Hamiltonian with an honest prover.
    Verify {
        hamiltonian: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true)]
        beta: f64,
        /// `ground`, `maximally-mixed` or `basis:<bits>`.
        #[arg(long, default_value = "ground")]
        witness: String,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        kappa: Option<f64>,
        /// Also report soundness diagnostics for the built-in adversaries.
        #[arg(long)]
        adversaries: bool,
    },
    /// Check the swap isometry and its Pauli identities on random states.
    IsometryCheck {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 5)]
        states: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Audit the block encodings and the spectral oracle on random inputs.
    BlockEncodings {
        #[arg(long, default_value_t = 10)]
        pairs: usize,
        #[arg(long, default_value_t = 50)]
        spectral: usize,
        #[arg(long, default_value_t = 2)]
        qubits: usize,
        #[arg(long)]
        seed: u64,
    },
}

type AnyResult<T> = Result<T, Box<dyn std::error::Error>>;

/// A command's result: a human summary, a serializable body and its checks.
struct Outcome<T: Serialize> {
    table: String,
    body: T,
    csv: Option<String>,
    passed: bool,
}

fn checks_csv(rows: &[(&str, &[Check])]) -> String {
    let mut out = String::from("subject,check,value,bound,applicable,passed\n");
    for (subject, checks) in rows {
        for c in *checks {
            out.push_str(&format!(
                "{subject},{},{:.12e},{:.12e},{},{}\n",
                c.name, c.value, c.bound, c.applicable, c.passed
            ));
        }
    }
    out
}

fn checks_table(checks: &[Check]) -> String {
    let mut s = String::new();
    for c in checks {
        let verdict = if !c.applicable {
            "n/a"
        } else if c.passed {
            "PASS"
        } else {
            "FAIL"
        };
        s.push_str(&format!("  {:<28} {:>14.6e} <= {:<14.6e} {verdict}\n", c.name, c.value, c.bound));
    }
    s
}

fn strategy(game: Game, id: &str) -> AnyResult<QuantumStrategy> {
    Ok(match (game, id) {
        (Game::Chsh, "canonical" | "honest") => canonical_chsh_strategy(),
        (Game::Commutation, "canonical" | "honest") => canonical_commutation_strategy(),
        (_, "constant-zero") => constant_strategy(&game.build(), 0, 0)?,
        (_, other) => return Err(format!("unknown strategy '{other}' (canonical, honest, constant-zero)").into()),
    })
}

fn protocol(game: Game) -> AnyResult<CompiledProtocol> {
    Ok(CompiledProtocol::compile(game.build(), Arc::new(IdealQhe::new(DEFAULT_LAMBDA)?))?)
}

#[derive(Serialize)]
struct ValueReport {
    game: String,
    strategy: String,
    quantum: f64,
    classical: f64,
    compiled: f64,
}

fn cmd_value(game: Game, id: &str) -> AnyResult<Outcome<ValueReport>> {
    let g = game.build();
    let s = strategy(game, id)?;
    let prover = honest_compiled_prover(&s, g.alice_question_bits, g.alice_answer_bits)?;
    let body = ValueReport {
        game: g.name.clone(),
        strategy: id.into(),
        quantum: quantum_value_exact(&g, &s)?,
        classical: classical_value_bruteforce(&g)?,
        compiled: protocol(game)?.compiled_value_exact(&prover)?,
    };
    let table = format!(
        "game {} strategy {}\n  quantum   {:.6}\n  classical {:.6}\n  compiled  {:.6}\n",
        body.game, body.strategy, body.quantum, body.classical, body.compiled
    );
    let csv = format!(
        "game,strategy,quantum,classical,compiled\n{},{},{:.12},{:.12},{:.12}\n",
        body.game, body.strategy, body.quantum, body.classical, body.compiled
    );
    Ok(Outcome { table, body, csv: Some(csv), passed: true })
}

fn cmd_compile_run(
    game: Game,
    id: &str,
    trials: u64,
    seed: u64,
    transcripts: Option<&PathBuf>,
) -> AnyResult<Outcome<MonteCarloSummary>> {
    let g = game.build();
    let prover = honest_compiled_prover(&strategy(game, id)?, g.alice_question_bits, g.alice_answer_bits)?;
    let proto = protocol(game)?;
    let body = proto.monte_carlo(&prover, trials, seed)?;
    if let Some(path) = transcripts {
        let rounds = proto.run_rounds(&prover, trials, seed)?;
        write_transcripts_jsonl(&rounds, fs::File::create(path)?)?;
    }
    let table = format!(
        "seed {seed} trials {}\n  empirical {:.6} ± {:.6}\n  exact     {:.6}\n  within 3σ {}\n",
        body.trials, body.mean, body.std_error, body.exact, body.within_three_sigma
    );
    let csv = format!(
        "seed,trials,wins,mean,exact,std_error,within_three_sigma\n{seed},{},{},{:.12},{:.12},{:.12},{}\n",
        body.trials, body.wins, body.mean, body.exact, body.std_error, body.within_three_sigma
    );
    let passed = body.within_three_sigma;
    Ok(Outcome { table, body, csv: Some(csv), passed })
}

fn named_prover(game: Game, name: &str, param: Option<f64>) -> AnyResult<cnl_core::compiler::CompiledProverStrategy> {
    Ok(match game {
        Game::Chsh => chsh_prover_by_name(name, param)?,
        Game::Commutation => commutation_prover_by_name(name, param)?,
    })
}

fn cmd_certify(game: Game, name: &str, param: Option<f64>) -> AnyResult<Outcome<CertificateReport>> {
    let report = certify(&named_prover(game, name, param)?, game.kind())?;
    let table = format!(
        "prover {} win probability {:.9} ε {:.3e}\n{}",
        report.prover,
        report.win_probability,
        report.epsilon,
        checks_table(&report.checks)
    );
    let csv = report.to_csv();
    let passed = report.all_passed();
    Ok(Outcome { table, body: report, csv: Some(csv), passed })
}

#[derive(Serialize)]
struct SweepRow {
    noise: f64,
    epsilon: f64,
    residual: f64,
    bound: f64,
    passed: bool,
}

/// Depolarizing noise for CHSH, Bob's rotation angle for the commutation game.
fn cmd_sweep(game: Game, points: usize) -> AnyResult<Outcome<Vec<SweepRow>>> {
    let mut rows = Vec::new();
    for k in 0..points {
        let t = if points > 1 { k as f64 / (points - 1) as f64 } else { 0.0 };
        let (noise, prover) = match game {
            Game::Chsh => (0.5 * t, depolarized_chsh(0.5 * t)?),
            Game::Commutation => (std::f64::consts::FRAC_PI_2 * t, commutation_prover_by_name("rotated", Some(std::f64::consts::FRAC_PI_2 * t))?),
        };
        let report = certify(&prover, game.kind())?;
        let (residual, bound, passed) = match (&report.chsh, &report.commutation) {
            (Some(c), _) => {
                let chk = report.checks.iter().find(|c| c.name == "anticommutator");
                (c.anticommutator_residual, chk.map_or(f64::NAN, |c| c.bound), chk.is_some_and(|c| c.passed))
            }
            (_, Some(c)) => {
                let chk = report.checks.iter().find(|c| c.name == "commutator");
                (c.commutator_residual, chk.map_or(f64::NAN, |c| c.bound), chk.is_some_and(|c| c.passed))
            }
            _ => return Err("certificate without residuals".into()),
        };
        rows.push(SweepRow { noise, epsilon: report.epsilon, residual, bound, passed });
    }
    let mut table = String::from("  noise        epsilon      residual     bound\n");
    let mut csv = String::from("noise,epsilon,residual,bound,passed\n");
    for r in &rows {
        table.push_str(&format!("  {:<12.6} {:<12.6e} {:<12.6e} {:<12.6e} {}\n", r.noise, r.epsilon, r.residual, r.bound, if r.passed { "PASS" } else { "FAIL" }));
        csv.push_str(&format!("{:.12},{:.12e},{:.12e},{:.12e},{}\n", r.noise, r.epsilon, r.residual, r.bound, r.passed));
    }
    let passed = rows.iter().all(|r| r.passed);
    Ok(Outcome { table, body: rows, csv: Some(csv), passed })
}

#[derive(Serialize)]
struct VerifyOutput {
    seed: u64,
    trials: u64,
    report: VerificationReport,
    adversaries: Vec<SoundnessReport>,
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    path: &PathBuf,
    alpha: f64,
    beta: f64,
    witness: &str,
    trials: u64,
    seed: u64,
    kappa: Option<f64>,
    adversaries: bool,
) -> AnyResult<Outcome<VerifyOutput>> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let h = XxzzHamiltonian::from_json(&text)?;
    let config = ProtocolConfig::new(h.n, alpha, beta, kappa, seed)?;
    let spec: WitnessSpec = witness.parse()?;
    let report = verify_honest(&h, &spec, &config, trials)?;
    let mut adv = Vec::new();
    if adversaries && report.soundness.is_some() {
        for p in standard_adversaries(&spec.build(&h)?)? {
            adv.push(soundness_report(&p, &h, &config)?);
        }
    }

    let t = &report.theorem;
    let c = &report.completeness;
    let mc = &report.monte_carlo;
    let fmt_opt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.6}"));
    let rate = |t: &cnl_core::verifier::SubtestTally| {
        if t.rounds == 0 {
            "-".to_string()
        } else {
            format!("{:.6}", t.accepted as f64 / t.rounds as f64)
        }
    };
    let mut table = format!(
        "κ {:.6e}  ν {:.6e}  gap {:.6e}  (chain closes: {}, largest closing κ {:.3e})\n",
        config.kappa, t.nu, t.gap, t.chain_closes, t.kappa_closing_max
    );
    table.push_str(&format!("witness energy {:.9}\n", c.witness_energy));
    table.push_str("  subtest        exact       empirical\n");
    table.push_str(&format!("  chsh           {:<11} {}\n", fmt_opt(c.values.chsh), rate(&mc.chsh)));
    table.push_str(&format!("  commutation    {:<11} {}\n", fmt_opt(c.values.commutation), rate(&mc.commutation)));
    table.push_str(&format!("  teleport       {:<11.6} {}\n", c.values.teleport, rate(&mc.teleport)));
    table.push_str(&format!("  total          {:<11.6} {:.6} ± {:.6}\n", c.values.total, mc.overall.mean, mc.overall.std_error));
    table.push_str(&format!(
        "formula (simulated) {:.9}  formula (stated) {:.9}{}\n",
        c.simulated_formula,
        c.stated_formula,
        if c.stated_formula_flagged { "  [differs from exact]" } else { "" }
    ));
    table.push_str(&format!("extracted witness energy {:.9}\n", report.estimates.extracted.energy));
    table.push_str(&checks_table(&report.checks));
    match &report.soundness {
        Some(r) => {
            table.push_str(&format!("soundness diagnostics: {}\n", r.prover));
            table.push_str(&checks_table(&r.checks));
        }
        None => table.push_str("soundness diagnostics skipped: no X terms\n"),
    }
    for a in &adv {
        table.push_str(&format!("soundness diagnostics: {} (acceptance {:.6})\n", a.prover, a.values.total));
        table.push_str(&checks_table(&a.checks));
    }

    let mut rows: Vec<(&str, &[Check])> = vec![("verification", &report.checks)];
    if let Some(r) = &report.soundness {
        rows.push(("honest", &r.checks));
    }
    for a in &adv {
        rows.push((a.prover.as_str(), &a.checks));
    }
    let csv = checks_csv(&rows);
    let passed = report.all_passed() && adv.iter().all(|a| a.all_passed());
    Ok(Outcome { table, body: VerifyOutput { seed, trials, report, adversaries: adv }, csv: Some(csv), passed })
}

fn cmd_isometry(n: usize, states: usize, seed: u64) -> AnyResult<Outcome<cnl_core::verifier::IsometryAudit>> {
    let audit = isometry_audit(n, states, seed)?;
    let mut table = format!("n {n}, {} prover qubits, seed {seed}\n", audit.prover_qubits);
    for (bob, d) in &audit.defects {
        table.push_str(&format!("  {bob:<8} max |V†V - I| {d:.3e}\n"));
    }
    table.push_str(&checks_table(&audit.checks));
    let csv = checks_csv(&[("isometry", &audit.checks)]);
    let passed = audit.all_passed();
    Ok(Outcome { table, body: audit, csv: Some(csv), passed })
}

fn cmd_block_encodings(
    pairs: usize,
    spectral: usize,
    qubits: usize,
    seed: u64,
) -> AnyResult<Outcome<cnl_core::certificates::BlockEncodingAudit>> {
    let audit = block_encoding_audit(pairs, spectral, qubits, seed)?;
    let mut table = format!(
        "{} encodings, {} shifted, {} spectral cases on {qubits} qubits, seed {seed}\n",
        audit.encodings.len(),
        audit.shifted.len(),
        audit.spectral.len()
    );
    table.push_str(&checks_table(&audit.checks));
    let mut csv = String::from("case,kind,ancillas,scale,unitarity_error,block_error\n");
    for e in &audit.encodings {
        csv.push_str(&format!(
            "{},{},{},{},{:.6e},{:.6e}\n",
            e.case, e.kind, e.ancillas, e.scale, e.unitarity_error, e.block_error
        ));
    }
    let passed = audit.all_passed();
    Ok(Outcome { table, body: audit, csv: Some(csv), passed })
}

fn emit<T: Serialize>(out: &OutputArgs, outcome: Outcome<T>) -> AnyResult<bool> {
    let payload = if out.json {
        Some(serde_json::to_string_pretty(&outcome.body)? + "\n")
    } else if out.csv {
        Some(outcome.csv.ok_or("this command has no CSV output")?)
    } else {
        None
    };
    match (payload, &out.out) {
        (Some(p), Some(path)) => {
            fs::write(path, p)?;
            print!("{}", outcome.table);
        }
        (Some(p), None) => print!("{p}"),
        (None, Some(path)) => {
            fs::write(path, serde_json::to_string_pretty(&outcome.body)? + "\n")?;
            print!("{}", outcome.table);
        }
        (None, None) => print!("{}", outcome.table),
    }
    Ok(outcome.passed)
}

fn run(cli: Cli) -> AnyResult<bool> {
    let out = &cli.output;
    match &cli.command {
        Command::Value { game, strategy } => emit(out, cmd_value(*game, strategy)?),
        Command::CompileRun { game, strategy, trials, seed, transcripts } => {
            emit(out, cmd_compile_run(*game, strategy, *trials, *seed, transcripts.as_ref())?)
        }
        Command::Certify { prover: _, game, param: _, sweep: Some(points) } => emit(out, cmd_sweep(*game, *points)?),
        Command::Certify { prover, game, param, sweep: None } => emit(out, cmd_certify(*game, prover, *param)?),
        Command::Verify { hamiltonian, alpha, beta, witness, trials, seed, kappa, adversaries } => emit(
            out,
            cmd_verify(hamiltonian, *alpha, *beta, witness, *trials, *seed, *kappa, *adversaries)?,
        ),
        Command::IsometryCheck { n, states, seed } => emit(out, cmd_isometry(*n, *states, *seed)?),
        Command::BlockEncodings { pairs, spectral, qubits, seed } => {
            emit(out, cmd_block_encodings(*pairs, *spectral, *qubits, *seed)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
