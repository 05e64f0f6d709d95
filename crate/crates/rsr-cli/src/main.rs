//! Command-line harness: fault campaigns, TVLA assessments, bound
//! verification, and end-to-end attack demos, all seeded and emitting
//! plot-ready CSV plus structured text reports.
//!
//! Exit codes: 0 on success, 1 when an assessment or bound check fails,
//! 2 on usage or configuration errors.

mod config;

use clap::{Args, Parser, Subcommand};
use config::{FileConfig, GridDims};
use rsr::fault::{
    run_paired_fault_campaign, CampaignGrid, CampaignTarget, FaultInjector, FaultMode,
    FaultModel, FaultTarget,
};
use rsr::leakage::{run_tvla_assessment, TvlaTarget};
use rsr::protect::{
    min_repetitions_attack_bound, min_repetitions_chernoff, Protection, SecurityParams,
};
use rsr::rng::Prng;
use rsr::schemes::{
    bellcore_recover_factor, elgamal_decrypt, elgamal_encrypt, rsa_crt_sign,
    twiddle_zeroization_attack, InverseMethod, KyberParams, RsaKey,
};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "rsr",
    about = "Random-self-reducibility countermeasure workbench",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Paired unprotected/protected fault-injection campaign over the
    /// (offset, intensity) grid; writes heatmap CSVs and a summary.
    FaultCampaign(FaultCampaignArgs),
    /// Fixed-weight-class TVLA assessment of one operation, protected and
    /// unprotected; writes t-trace and PoI CSVs and a verdict report.
    Tvla(TvlaArgs),
    /// Monte-Carlo check of the single-shot success bound and the two
    /// repetition-count formulas side by side.
    Verify(VerifyArgs),
    /// End-to-end attack demo: rsa-crt (Bellcore), elgamal (faulty
    /// decryptions), kyber (twiddle zeroization).
    Demo(DemoArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Master seed; every output is a pure function of it (required).
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for report files.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Optional key=value config file; flags win on conflict.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct FaultCampaignArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// mod | mod-mul | mod-exp | poly-mul | ntt | rsa-crt | kyber-keygen
    #[arg(long)]
    target: Option<String>,
    /// Invocations per hiding evaluation.
    #[arg(long)]
    c: Option<u32>,
    /// Vote repetitions (even values are bumped to the next odd).
    #[arg(long)]
    n: Option<u32>,
    /// Grid dimensions as offsets x intensities, e.g. 16x16.
    #[arg(long)]
    grid: Option<GridDims>,
    /// Runs per grid cell.
    #[arg(long)]
    reps: Option<u32>,
}

#[derive(Args)]
struct TvlaArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// mod | mod-mul | mod-exp | ntt
    #[arg(long)]
    target: Option<String>,
    #[arg(long)]
    c: Option<u32>,
    /// Traces per class.
    #[arg(long)]
    traces: Option<usize>,
    /// Noise standard deviation.
    #[arg(long)]
    sigma: Option<f64>,
    /// Hamming weight of the first class.
    #[arg(long)]
    hw_a: Option<u32>,
    /// Hamming weight of the second class.
    #[arg(long)]
    hw_b: Option<u32>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Per-invocation fault probabilities to test (repeatable).
    #[arg(long)]
    epsilon: Vec<f64>,
    /// Invocation counts to test (repeatable).
    #[arg(long)]
    c: Vec<u32>,
    /// Confidence parameter for the repetition bounds.
    #[arg(long)]
    delta: Option<f64>,
}

#[derive(Args)]
struct DemoArgs {
    /// rsa-crt | elgamal | kyber
    scheme: Option<String>,
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    c: Option<u32>,
    #[arg(long)]
    n: Option<u32>,
    /// Attack trials per arm.
    #[arg(long)]
    trials: Option<u32>,
}

/// Failures that map to exit code 2 (usage) vs 1 (assessment).
enum CmdError {
    Usage(String),
    Failed(String),
}

impl From<rsr::Error> for CmdError {
    fn from(e: rsr::Error) -> Self {
        match e {
            rsr::Error::InvalidParams(_) | rsr::Error::UnknownTarget(_) => {
                CmdError::Usage(e.to_string())
            }
            other => CmdError::Failed(other.to_string()),
        }
    }
}

impl From<String> for CmdError {
    fn from(msg: String) -> Self {
        CmdError::Usage(msg)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::FaultCampaign(args) => cmd_fault_campaign(args),
        Command::Tvla(args) => cmd_tvla(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Demo(args) => cmd_demo(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(CmdError::Failed(msg)) => {
            eprintln!("failed: {msg}");
            ExitCode::from(1)
        }
        Err(CmdError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
    }
}

struct OutDir {
    dir: Option<PathBuf>,
}

impl OutDir {
    fn new(dir: Option<PathBuf>) -> Result<Self, CmdError> {
        if let Some(d) = &dir {
            std::fs::create_dir_all(d)
                .map_err(|e| CmdError::Usage(format!("cannot create {}: {e}", d.display())))?;
        }
        Ok(OutDir { dir })
    }

    fn write(&self, name: &str, contents: &str) -> Result<(), CmdError> {
        if let Some(d) = &self.dir {
            let path = d.join(name);
            std::fs::write(&path, contents)
                .map_err(|e| CmdError::Failed(format!("cannot write {}: {e}", path.display())))?;
        }
        Ok(())
    }
}

fn cmd_fault_campaign(args: FaultCampaignArgs) -> Result<(), CmdError> {
    let cfg = FileConfig::load(args.common.config.as_deref())?;
    let seed: u64 = cfg.require(args.common.seed, "seed")?;
    let target: CampaignTarget =
        cfg.require::<String>(args.target, "target")?.parse()?;
    let c = cfg.resolve(args.c, "c", 2)?;
    let n = cfg.resolve(args.n, "n", 10)?;
    let dims = cfg.resolve(args.grid, "grid", GridDims { offsets: 16, intensities: 16 })?;
    let reps = cfg.resolve(args.reps, "reps", 5)?;
    let out = OutDir::new(args.common.out.clone())?;

    let params = SecurityParams::new(c, n)?;
    let grid = CampaignGrid::with_dims(dims.offsets, dims.intensities, reps);
    let paired = run_paired_fault_campaign(
        target,
        &grid,
        FaultMode::CorruptUniform,
        0.1,
        &params,
        seed,
    )?;

    out.write("heatmap_unprotected.csv", &paired.unprotected.to_csv())?;
    out.write("heatmap_protected.csv", &paired.protected.to_csv())?;
    let summary = paired.summary_text();
    out.write("summary.txt", &summary)?;
    print!("{summary}");
    Ok(())
}

fn cmd_tvla(args: TvlaArgs) -> Result<(), CmdError> {
    let cfg = FileConfig::load(args.common.config.as_deref())?;
    let seed: u64 = cfg.require(args.common.seed, "seed")?;
    let target: TvlaTarget = cfg.require::<String>(args.target, "target")?.parse()?;
    let c = cfg.resolve(args.c, "c", 2)?;
    let traces = cfg.resolve(args.traces, "traces", 1000)?;
    let sigma = cfg.resolve(args.sigma, "sigma", 1.0)?;
    let hw_a = cfg.resolve(args.hw_a, "hw-a", 4)?;
    let hw_b = cfg.resolve(args.hw_b, "hw-b", 12)?;
    let out = OutDir::new(args.common.out.clone())?;

    // Repetition voting is fault-injection machinery; the trace assessment
    // looks at one hiding evaluation.
    let params = SecurityParams::new(c, 1)?;
    let plain = run_tvla_assessment(target, &Protection::Off, traces, sigma, hw_a, hw_b, seed)?;
    let masked = run_tvla_assessment(
        target,
        &Protection::On(params),
        traces,
        sigma,
        hw_a,
        hw_b,
        seed,
    )?;

    out.write("ttrace_unprotected.csv", &plain.ttest.to_csv())?;
    out.write("ttrace_protected.csv", &masked.ttest.to_csv())?;
    out.write("poi_unprotected.csv", &plain.sost.to_csv())?;
    out.write("poi_protected.csv", &masked.sost.to_csv())?;
    let report = format!("{}{}", plain.text(), masked.text());
    out.write("report.txt", &report)?;
    print!("{report}");

    if masked.ttest.leak {
        return Err(CmdError::Failed(format!(
            "protected {} still leaks: max |t| = {:.2}",
            masked.target, masked.ttest.max_t_windowed
        )));
    }
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> Result<(), CmdError> {
    let cfg = FileConfig::load(args.common.config.as_deref())?;
    let seed: u64 = cfg.require(args.common.seed, "seed")?;
    let epsilons = cfg.resolve_list(&args.epsilon, "epsilon", &[0.01, 0.05])?;
    let cs = cfg.resolve_list(&args.c, "c", &[2, 3, 4])?;
    let delta = cfg.resolve(args.delta, "delta", 0.05)?;
    let out = OutDir::new(args.common.out.clone())?;
    let trials: u32 = 100_000;

    let mut report = String::new();
    let mut violations = 0u32;
    for (i, &eps) in epsilons.iter().enumerate() {
        for (j, &c) in cs.iter().enumerate() {
            let combo_seed = Prng::substream(seed, (i * cs.len() + j) as u64).next_u64();
            let rate = rsr::fault::single_shot_success_rate(eps, c, trials, combo_seed)?;
            let bound = 1.0 - eps * c as f64;
            let tolerance = 3.0 * (eps * c as f64 / trials as f64).sqrt();
            let ok = rate >= bound - tolerance;
            if !ok {
                violations += 1;
            }
            report.push_str(&format!(
                "single_shot epsilon={eps} c={c} trials={trials} success_rate={rate:.5} \
                 bound={bound:.5} tolerance={tolerance:.5} status={}\n",
                if ok { "ok" } else { "violated" }
            ));
        }
    }
    for &eps in &epsilons {
        for &c in &cs {
            let ec = eps * c as f64;
            let attack = min_repetitions_attack_bound(eps, c, delta)
                .map(|n| n.to_string())
                .unwrap_or_else(|_| "na".into());
            let chernoff = if ec < 0.5 {
                min_repetitions_chernoff(1.0 - ec, delta)
                    .map(|n| n.to_string())
                    .unwrap_or_else(|_| "na".into())
            } else {
                "na".into()
            };
            report.push_str(&format!(
                "repetitions epsilon={eps} c={c} delta={delta} n_attack_bound={attack} \
                 n_chernoff={chernoff}\n"
            ));
        }
    }

    out.write("bounds.txt", &report)?;
    print!("{report}");
    if violations > 0 {
        return Err(CmdError::Failed(format!("{violations} bound violations")));
    }
    Ok(())
}

fn demo_line(scheme: &str, protected: bool, trials: u32, exploitable: u32, base: Option<u32>) -> String {
    let reduction = match base {
        Some(b) if b > 0 => format!("{:.2}", 100.0 * (1.0 - exploitable as f64 / b as f64)),
        _ => "na".to_string(),
    };
    format!(
        "scheme={scheme} protected={protected} trials={trials} exploitable_count={exploitable} \
         reduction_pct={reduction}\n"
    )
}

fn cmd_demo(args: DemoArgs) -> Result<(), CmdError> {
    let cfg = FileConfig::load(args.common.config.as_deref())?;
    let seed: u64 = cfg.require(args.common.seed, "seed")?;
    let scheme: String = cfg.require(args.scheme, "scheme")?;
    let c = cfg.resolve(args.c, "c", 2)?;
    let n = cfg.resolve(args.n, "n", 10)?;
    let trials = cfg.resolve(args.trials, "trials", 1000)?;
    let out = OutDir::new(args.common.out.clone())?;
    let params = SecurityParams::new(c, n)?;

    let report = match scheme.as_str() {
        "rsa-crt" => demo_rsa(trials, &params, seed)?,
        "elgamal" => demo_elgamal(trials, &params, seed)?,
        "kyber" => demo_kyber(trials, &params, seed)?,
        other => return Err(CmdError::Usage(format!("unknown scheme: {other}"))),
    };

    out.write("report.txt", &report)?;
    print!("{report}");
    Ok(())
}

/// One faulted signature per trial, targeting the first half
/// exponentiation; exploitable when the gcd recovers a true factor.
fn demo_rsa(trials: u32, params: &SecurityParams, seed: u64) -> Result<String, CmdError> {
    let mut key_rng = Prng::substream(seed, 0);
    let key = RsaKey::generate(31, &mut key_rng)?;
    let run_arm = |protection: &Protection, arm: u64| -> Result<u32, CmdError> {
        let mut exploitable = 0u32;
        for trial in 0..trials {
            let cell = arm * trials as u64 + trial as u64;
            let mut msg_rng = Prng::substream(seed, 3 * cell + 1);
            let m = msg_rng.below_u64(key.n);
            let mut rng = Prng::substream(seed, 3 * cell + 2);
            let s_correct = rsa_crt_sign(m, &key, protection, None, &mut rng)?;
            let model = FaultModel::new(
                1.0,
                FaultMode::CorruptUniform,
                FaultTarget::InvocationIndex(0),
                0.0,
            )?;
            let mut injector = FaultInjector::new(model, Prng::substream(seed, 3 * cell + 3));
            let s_faulty = rsa_crt_sign(m, &key, protection, Some(&mut injector), &mut rng)?;
            if let Some(factor) = bellcore_recover_factor(s_correct, s_faulty, key.n) {
                debug_assert!(key.n % factor == 0);
                exploitable += 1;
            }
        }
        Ok(exploitable)
    };
    let unprot = run_arm(&Protection::Off, 0)?;
    let prot = run_arm(&Protection::On(*params), 1)?;
    Ok(format!(
        "{}{}",
        demo_line("rsa-crt", false, trials, unprot, None),
        demo_line("rsa-crt", true, trials, prot, Some(unprot))
    ))
}

/// Random decryptions under a moderate every-invocation fault rate;
/// exploitable when the attacker obtains a wrong (faulty) plaintext.
fn demo_elgamal(trials: u32, params: &SecurityParams, seed: u64) -> Result<String, CmdError> {
    let ring = rsr::arith::RingParams::prime(2_147_483_647)?;
    let r = ring.modulus();
    let generator = 7u64;
    let eps = 0.05;
    let run_arm = |protection: &Protection, arm: u64| -> Result<u32, CmdError> {
        let mut faulty_outputs = 0u32;
        for trial in 0..trials {
            let cell = arm * trials as u64 + trial as u64;
            let mut setup = Prng::substream(seed, 4 * cell + 11);
            let x = 1 + setup.below_u64(r - 2);
            let y = rsr::arith::mod_exp_square_multiply(generator as u128, x as u128, &ring);
            let m = 1 + setup.below_u64(r - 1);
            let k = 1 + setup.below_u64(r - 2);
            let (c1, c2) = elgamal_encrypt(m, generator, y, k, &ring);
            let model = FaultModel::new(
                eps,
                FaultMode::CorruptUniform,
                FaultTarget::EveryInvocation,
                0.0,
            )?;
            let mut injector = FaultInjector::new(model, Prng::substream(seed, 4 * cell + 12));
            let mut rng = Prng::substream(seed, 4 * cell + 13);
            let method =
                if trial % 2 == 0 { InverseMethod::Fermat } else { InverseMethod::FastGcd };
            match elgamal_decrypt(
                c1,
                c2,
                x,
                &ring,
                method,
                protection,
                Some(&mut injector),
                &mut rng,
            ) {
                Ok(out) if out == m => {}
                Ok(_) => faulty_outputs += 1,
                // Detected failures abort without emitting a faulty value.
                Err(_) => {}
            }
        }
        Ok(faulty_outputs)
    };
    let unprot = run_arm(&Protection::Off, 0)?;
    let prot = run_arm(&Protection::On(*params), 1)?;
    Ok(format!(
        "{}{}",
        demo_line("elgamal", false, trials, unprot, None),
        demo_line("elgamal", true, trials, prot, Some(unprot))
    ))
}

/// One twiddle-zeroization attack per trial on fresh seeds; exploitable
/// when the delivered secret transform is corrupted.
fn demo_kyber(trials: u32, params: &SecurityParams, seed: u64) -> Result<String, CmdError> {
    let run_arm = |protection: &Protection, arm: u64| -> Result<u32, CmdError> {
        let mut corrupted = 0u32;
        for trial in 0..trials {
            let cell = arm * trials as u64 + trial as u64;
            let mut seeds = Prng::substream(seed, 5 * cell + 21);
            let kyber = KyberParams::standard(seeds.next_u64(), seeds.next_u64());
            let mut rng = Prng::substream(seed, 5 * cell + 22);
            let report = twiddle_zeroization_attack(&kyber, protection, &mut rng)?;
            if report.s_hat_corrupted {
                corrupted += 1;
            }
        }
        Ok(corrupted)
    };
    let unprot = run_arm(&Protection::Off, 0)?;
    let prot = run_arm(&Protection::On(*params), 1)?;
    Ok(format!(
        "{}{}",
        demo_line("kyber", false, trials, unprot, None),
        demo_line("kyber", true, trials, prot, Some(unprot))
    ))
}
