//! Command-line front end: evaluate D on a fixed setting, classify effects,
//! maximize D, simulate shot-based runs, and score teleportation POVMs.
//!
//! Every command prints a human-readable summary to stdout and can write a
//! machine-readable JSON report (with input hashes and the full
//! configuration) via `--report`. Exit codes: 0 success, 2 validation
//! failure, 3 numerical non-convergence.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use dualbell::chsh::{
    check_trace_condition, d_terms, d_value, max_d_qubit, maximize_d_seesaw, ChshSetting,
    MaxDReport, SeesawOptions,
};
use dualbell::experiment::{
    paper_setting, run_dual_chsh_experiment, ExperimentConfig, ExperimentRecord, NoiseModel,
};
use dualbell::fileio::{OperatorFile, OperatorKind, RunReport};
use dualbell::objects::{
    bell_projectors, renormalize_effect, BinaryObservable, Effect, QuantumState,
};
use dualbell::separability::{classify_effect, Evidence, Verdict};
use dualbell::teleport::{bell_povm, dual_chsh_link, max_average_fidelity, product_povm};
use dualbell::Result;

/// Environment variable consulted for the default RNG seed.
const SEED_ENV: &str = "DUALBELL_SEED";

fn default_seed() -> u64 {
    std::env::var(SEED_ENV)
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0)
}

/// Format with 9 significant digits, plain notation for moderate magnitudes.
fn sig9(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if (-3..9).contains(&mag) {
        format!("{:.*}", (8 - mag).max(0) as usize, x)
    } else {
        format!("{:.8e}", x)
    }
}

#[derive(Parser)]
#[command(
    name = "dualbell",
    version,
    about = "Dual Bell-CHSH entanglement tests for quantum effects"
)]
struct Cli {
    /// Write the machine-readable JSON run report to this path.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate D and the four E terms on a fixed setting.
    Dvalue(SettingArgs),
    /// Classify an effect as separable, entangled, or inconclusive.
    Classify {
        /// Effect or observable operator file.
        effect: PathBuf,
    },
    /// Maximize D over preparations for a fixed observable.
    Maximize {
        /// Effect or observable operator file (the +1 element).
        effect: PathBuf,
        #[arg(long, default_value_t = 16)]
        restarts: usize,
        #[arg(long, default_value_t = 200)]
        max_iters: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = default_seed())]
        seed: u64,
        /// Renormalize the +1 element to the trace condition first.
        #[arg(long)]
        renormalize: bool,
    },
    /// Simulate a shot-based two-qubit run with optional noise.
    Simulate {
        #[command(flatten)]
        setting: SettingArgs,
        /// Shots per preparation setting (16 settings in total).
        #[arg(long, default_value_t = 100_000)]
        shots: u64,
        /// Per-qubit depolarizing probability.
        #[arg(long, default_value_t = 0.0)]
        noise_p: f64,
        /// Per-qubit readout bit-flip probability.
        #[arg(long, default_value_t = 0.0)]
        readout_flip: f64,
        #[arg(long, default_value_t = default_seed())]
        seed: u64,
        /// Realize mixed preparations as shot-split 50/50 basis mixtures.
        #[arg(long)]
        mixture: bool,
        /// Write the Bell-outcome histogram of the fully mixed preparation
        /// to this CSV path.
        #[arg(long)]
        histogram: Option<PathBuf>,
    },
    /// Evaluate teleportation usefulness of a four-outcome two-qubit POVM.
    Teleport {
        /// POVM operator file.
        povm: PathBuf,
    },
    /// Write the bundled fixture operator files into a directory.
    Fixtures {
        #[arg(long, default_value = "fixtures")]
        out_dir: PathBuf,
    },
}

/// The four preparation files plus the observable under test.
#[derive(Args)]
struct SettingArgs {
    #[arg(long)]
    rho_a0: PathBuf,
    #[arg(long)]
    rho_a1: PathBuf,
    #[arg(long)]
    rho_b0: PathBuf,
    #[arg(long)]
    rho_b1: PathBuf,
    /// Observable file holding the +1 effect.
    #[arg(long)]
    effect: PathBuf,
    /// Renormalize the +1 element to the trace condition first.
    #[arg(long)]
    renormalize: bool,
}

impl SettingArgs {
    fn paths(&self) -> [&Path; 5] {
        [
            &self.rho_a0,
            &self.rho_a1,
            &self.rho_b0,
            &self.rho_b1,
            &self.effect,
        ]
    }

    /// Load and validate; returns the setting and the kept probability when
    /// renormalization changed the observable.
    fn load(&self) -> Result<(ChshSetting, Option<f64>)> {
        let state = |p: &Path| OperatorFile::load(p)?.into_state();
        let a0 = state(&self.rho_a0)?;
        let a1 = state(&self.rho_a1)?;
        let b0 = state(&self.rho_b0)?;
        let b1 = state(&self.rho_b1)?;
        let obs = OperatorFile::load(&self.effect)?.into_observable()?;
        let (obs, kept) = if self.renormalize {
            renormalize_effect(&obs)
        } else {
            (obs, None)
        };
        Ok((ChshSetting::new([a0, a1], [b0, b1], obs)?, kept))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let mut code = ExitCode::SUCCESS;
    let report = match &cli.command {
        Command::Dvalue(setting) => cmd_dvalue(setting)?,
        Command::Classify { effect } => cmd_classify(effect)?,
        Command::Maximize {
            effect,
            restarts,
            max_iters,
            tol,
            seed,
            renormalize,
        } => {
            let (report, converged) =
                cmd_maximize(effect, *restarts, *max_iters, *tol, *seed, *renormalize)?;
            if !converged {
                code = ExitCode::from(3);
            }
            report
        }
        Command::Simulate {
            setting,
            shots,
            noise_p,
            readout_flip,
            seed,
            mixture,
            histogram,
        } => cmd_simulate(
            setting,
            *shots,
            *noise_p,
            *readout_flip,
            *seed,
            *mixture,
            histogram.as_deref(),
        )?,
        Command::Teleport { povm } => cmd_teleport(povm)?,
        Command::Fixtures { out_dir } => cmd_fixtures(out_dir)?,
    };
    if let Some(path) = &cli.report {
        let text = serde_json::to_string_pretty(&report)
            .map_err(|e| dualbell::Error::Format(e.to_string()))?;
        std::fs::write(path, text + "\n")?;
    }
    Ok(code)
}

fn cmd_dvalue(args: &SettingArgs) -> Result<RunReport> {
    let (setting, kept) = args.load()?;
    let d = d_value(&setting)?;
    let terms = d_terms(&setting)?;
    let trace_ok = check_trace_condition(&setting.observable);

    for (label, t) in ["E00", "E01", "E10", "E11"].iter().zip(terms) {
        println!("{label} = {}", sig9(t));
    }
    println!("D   = {}", sig9(d));
    println!(
        "trace condition: {}",
        if trace_ok { "satisfied" } else { "violated" }
    );
    if let Some(p) = kept {
        println!("renormalized (kept probability {})", sig9(p));
    }

    let mut report = RunReport::new("dvalue");
    for p in args.paths() {
        report.add_input(p)?;
    }
    report.config = json!({ "renormalize": args.renormalize });
    report.results = json!({
        "d": d,
        "terms": terms,
        "trace_condition": trace_ok,
        "kept_probability": kept,
    });
    Ok(report)
}

fn cmd_classify(path: &Path) -> Result<RunReport> {
    let effect = OperatorFile::load(path)?.into_effect()?;
    let c = classify_effect(&effect)?;

    let verdict = match c.verdict {
        Verdict::Separable => "separable",
        Verdict::Entangled => "entangled",
        Verdict::Inconclusive => "inconclusive",
    };
    println!("verdict: {verdict}");
    let evidence = match &c.evidence {
        Evidence::Decomposition(d) => {
            println!(
                "evidence: explicit product decomposition, {} terms",
                d.terms.len()
            );
            json!({ "kind": "decomposition", "terms": d.terms.len() })
        }
        Evidence::Ppt {
            min_eigenvalue,
            normalization,
        } => {
            println!(
                "evidence: partial transpose min eigenvalue {} (normalization {})",
                sig9(*min_eigenvalue),
                sig9(*normalization)
            );
            json!({
                "kind": "ppt",
                "min_eigenvalue": min_eigenvalue,
                "normalization": normalization,
            })
        }
        Evidence::DualChshViolation { value, .. } => {
            println!("evidence: dual-CHSH violation, D = {}", sig9(*value));
            json!({ "kind": "dual_chsh_violation", "d": value })
        }
        Evidence::None => {
            println!("evidence: none");
            json!({ "kind": "none" })
        }
    };
    let dual = c.dual_chsh.map(|i| {
        println!(
            "dual-CHSH maximum D = {} ({})",
            sig9(i.max_d),
            if i.violates_dual_chsh {
                "violates the dual inequality"
            } else {
                "within the separable bound"
            }
        );
        json!({ "max_d": i.max_d, "violates": i.violates_dual_chsh })
    });

    let mut report = RunReport::new("classify");
    report.add_input(path)?;
    report.results = json!({
        "verdict": verdict,
        "evidence": evidence,
        "dual_chsh": dual,
    });
    Ok(report)
}

fn setting_json(s: &ChshSetting) -> serde_json::Value {
    let mat = |q: &QuantumState| {
        let m = q.op().mat();
        (0..m.nrows())
            .map(|i| {
                (0..m.ncols())
                    .map(|j| [m[(i, j)].re, m[(i, j)].im])
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>()
    };
    json!({
        "rho_a": [mat(&s.rho_a[0]), mat(&s.rho_a[1])],
        "rho_b": [mat(&s.rho_b[0]), mat(&s.rho_b[1])],
    })
}

fn print_max_report(label: &str, r: &MaxDReport) {
    println!(
        "{label}: max D = {} ({}{})",
        sig9(r.max_d),
        if r.converged {
            "converged"
        } else {
            "not converged"
        },
        if r.iterations > 0 {
            format!(", {} iterations", r.iterations)
        } else {
            String::new()
        }
    );
}

fn cmd_maximize(
    path: &Path,
    restarts: usize,
    max_iters: usize,
    tol: f64,
    seed: u64,
    renormalize: bool,
) -> Result<(RunReport, bool)> {
    let effect = OperatorFile::load(path)?.into_effect()?;
    let obs = BinaryObservable::from_effect(effect);
    let (obs, kept) = if renormalize {
        renormalize_effect(&obs)
    } else {
        (obs, None)
    };
    let opts = SeesawOptions {
        restarts,
        max_iters,
        tol,
        seed,
    };
    let seesaw = maximize_d_seesaw(&obs, &opts)?;
    print_max_report("seesaw", &seesaw);

    let dims = obs.m_plus().op().split().unwrap_or((0, 0));
    let closed = if dims == (2, 2) {
        let r = max_d_qubit(obs.m_plus())?;
        print_max_report("closed form", &r);
        println!(
            "agreement: |difference| = {}",
            sig9((r.max_d - seesaw.max_d).abs())
        );
        Some(r)
    } else {
        None
    };
    if let Some(p) = kept {
        println!("renormalized (kept probability {})", sig9(p));
    }

    let converged = seesaw.converged;
    let mut report = RunReport::new("maximize");
    report.add_input(path)?;
    report.config = json!({
        "restarts": restarts,
        "max_iters": max_iters,
        "tol": tol,
        "seed": seed,
        "renormalize": renormalize,
    });
    report.results = json!({
        "seesaw_max_d": seesaw.max_d,
        "seesaw_converged": seesaw.converged,
        "seesaw_iterations": seesaw.iterations,
        "closed_form_max_d": closed.as_ref().map(|r| r.max_d),
        "optimal_setting": setting_json(&seesaw.optimal_setting),
        "kept_probability": kept,
    });
    Ok((report, converged))
}

fn write_histogram(path: &Path, record: &ExperimentRecord) -> Result<()> {
    // The fully mixed preparation is slot 3 of term 0; its Bell-outcome
    // frequencies form the histogram.
    let rec = record
        .settings
        .iter()
        .find(|r| r.term == 0 && r.slot == 3)
        .ok_or(dualbell::Error::EmptyCounts)?;
    let mut csv = String::from("outcome,count,frequency\n");
    for (i, label) in ["phi_plus", "phi_minus", "psi_plus", "psi_minus"]
        .iter()
        .enumerate()
    {
        csv.push_str(&format!(
            "{label},{},{}\n",
            rec.counts.counts[i],
            rec.counts.frequency(i)
        ));
    }
    std::fs::write(path, csv)?;
    Ok(())
}

fn cmd_simulate(
    args: &SettingArgs,
    shots: u64,
    noise_p: f64,
    readout_flip: f64,
    seed: u64,
    mixture: bool,
    histogram: Option<&Path>,
) -> Result<RunReport> {
    let (setting, kept) = args.load()?;
    let config = ExperimentConfig {
        shots_per_setting: shots,
        noise: NoiseModel::new(noise_p, readout_flip)?,
        seed,
        mixture_mode: mixture,
    };
    let record = run_dual_chsh_experiment(&setting, &config)?;
    let est = &record.estimate;

    for (i, (e, se)) in est.per_term.iter().enumerate() {
        println!("E{}{} = {} +- {}", i / 2, i % 2, sig9(*e), sig9(*se));
    }
    println!("D   = {} +- {}", sig9(est.value), sig9(est.std_error));
    println!("shots per setting: {shots}, seed: {seed}");
    if let Some(p) = kept {
        println!("renormalized (kept probability {})", sig9(p));
    }
    if let Some(path) = histogram {
        write_histogram(path, &record)?;
        println!("histogram written to {}", path.display());
    }

    let mut report = RunReport::new("simulate");
    for p in args.paths() {
        report.add_input(p)?;
    }
    report.config = json!({
        "shots_per_setting": shots,
        "noise": { "depolarizing_p": noise_p, "readout_flip": readout_flip },
        "seed": seed,
        "mixture_mode": mixture,
        "renormalize": args.renormalize,
    });
    let settings: Vec<_> = record
        .settings
        .iter()
        .map(|r| {
            json!({
                "term": r.term,
                "slot": r.slot,
                "probs": r.probs,
                "counts": r.counts.counts,
            })
        })
        .collect();
    report.results = json!({
        "d": est.value,
        "std_error": est.std_error,
        "per_term": est.per_term,
        "kept_probability": kept,
        "settings": settings,
    });
    Ok(report)
}

fn cmd_teleport(path: &Path) -> Result<RunReport> {
    let povm = OperatorFile::load(path)?.into_povm()?;
    let fid = max_average_fidelity(&povm)?;
    let links = dual_chsh_link(&povm)?;

    println!("max average fidelity = {}", sig9(fid.f_max));
    println!(
        "useful for teleportation: {} (threshold margin {})",
        fid.useful,
        sig9(fid.threshold_margin)
    );
    for (i, link) in links.iter().enumerate() {
        println!(
            "outcome {i}: nuclear norm {}, max D {} ({})",
            sig9(link.nuclear_norm),
            sig9(link.max_d),
            if link.violates_dual_chsh {
                "violates the dual inequality"
            } else {
                "no violation"
            }
        );
    }

    let mut report = RunReport::new("teleport");
    report.add_input(path)?;
    report.results = json!({
        "f_max": fid.f_max,
        "useful": fid.useful,
        "threshold_margin": fid.threshold_margin,
        "per_outcome_nuclear_norms": fid.per_outcome_nuclear_norms,
        "dual_chsh": links.iter().map(|l| json!({
            "violates": l.violates_dual_chsh,
            "max_d": l.max_d,
            "nuclear_norm": l.nuclear_norm,
        })).collect::<Vec<_>>(),
    });
    Ok(report)
}

fn cmd_fixtures(out_dir: &Path) -> Result<RunReport> {
    std::fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    let mut save = |name: &str, file: OperatorFile| -> Result<()> {
        let path = out_dir.join(name);
        file.save(&path)?;
        written.push(path.display().to_string());
        Ok(())
    };

    let setting = paper_setting();
    let state_names = ["rho_a0.json", "rho_a1.json", "rho_b0.json", "rho_b1.json"];
    let states = [
        &setting.rho_a[0],
        &setting.rho_a[1],
        &setting.rho_b[0],
        &setting.rho_b[1],
    ];
    for (name, state) in state_names.iter().zip(states) {
        save(
            name,
            OperatorFile::from_state(state, (2, 1))
                .with_metadata("description", "qubit preparation of the reference setting"),
        )?;
    }
    save(
        "mixed_qubit.json",
        OperatorFile::from_state(&dualbell::objects::maximally_mixed(2), (2, 1))
            .with_metadata("description", "maximally mixed qubit"),
    )?;

    let bell_names = [
        "bell_phi_plus.json",
        "bell_phi_minus.json",
        "bell_psi_plus.json",
        "bell_psi_minus.json",
    ];
    for (name, eff) in bell_names.iter().zip(bell_projectors()) {
        save(
            name,
            OperatorFile::from_effect(&eff, (2, 2), OperatorKind::Observable)
                .with_metadata("description", "Bell-state projector as the +1 effect"),
        )?;
    }

    let epsilon = 0.1;
    let eps_effect = Effect::new(bell_projectors()[0].op().scale_re(2.0 * epsilon))?;
    save(
        "epsilon_effect.json",
        OperatorFile::from_effect(&eps_effect, (2, 2), OperatorKind::Effect)
            .with_metadata("description", "2*epsilon times the phi_plus projector")
            .with_metadata("epsilon", "0.1"),
    )?;

    save(
        "bell_povm.json",
        OperatorFile::from_povm(&bell_povm(), (2, 2))
            .with_metadata("description", "Bell-basis measurement"),
    )?;
    save(
        "product_povm.json",
        OperatorFile::from_povm(&product_povm(), (2, 2))
            .with_metadata("description", "computational-basis product measurement"),
    )?;

    for path in &written {
        println!("wrote {path}");
    }
    let mut report = RunReport::new("fixtures");
    report.config = json!({ "out_dir": out_dir.display().to_string() });
    report.results = json!({ "written": written });
    Ok(report)
}
