//! Browser demo bindings: run fault-campaign heatmaps, TVLA t-traces, and
//! the end-to-end attack demos in the page and hand the results to
//! JavaScript as JSON. Everything is seeded, so the page reproduces the
//! same pictures for the same inputs.

use rsr::fault::{
    run_paired_fault_campaign, CampaignGrid, CampaignReport, CampaignTarget, FaultInjector,
    FaultMode, FaultModel, FaultTarget, Outcome,
};
use rsr::leakage::{run_tvla_assessment, LeakageReport, TvlaTarget, TVLA_THRESHOLD};
use rsr::protect::{Protection, SecurityParams};
use rsr::rng::Prng;
use rsr::schemes::{
    bellcore_recover_factor, rsa_crt_sign, twiddle_zeroization_attack, KyberParams, RsaKey,
};
use wasm_bindgen::prelude::*;

fn err_to_js(e: rsr::Error) -> JsValue {
    JsValue::from_str(&e.to_string())
}

/// Paired fault campaign on a custom grid; returns the heatmap data for
/// both arms plus the reduction figure.
#[wasm_bindgen]
pub fn fault_heatmap(
    target: &str,
    c: u32,
    n: u32,
    offsets: usize,
    intensities: usize,
    reps: u32,
    seed: u64,
) -> Result<String, JsValue> {
    fault_heatmap_impl(target, c, n, offsets, intensities, reps, seed).map_err(err_to_js)
}

/// TVLA t-traces for one operation, unprotected and protected.
#[wasm_bindgen]
pub fn tvla_traces(
    target: &str,
    traces: usize,
    sigma: f64,
    hw_a: u32,
    hw_b: u32,
    seed: u64,
) -> Result<String, JsValue> {
    tvla_traces_impl(target, traces, sigma, hw_a, hw_b, seed).map_err(err_to_js)
}

/// End-to-end attack demo; returns exploitable counts for both arms plus
/// scheme-specific color for the page.
#[wasm_bindgen]
pub fn attack_demo(scheme: &str, trials: u32, seed: u64) -> Result<String, JsValue> {
    attack_demo_impl(scheme, trials, seed).map_err(err_to_js)
}

fn json_f64_array(values: impl Iterator<Item = f64>) -> String {
    let items: Vec<String> = values.map(|v| format!("{v:.6}")).collect();
    format!("[{}]", items.join(","))
}

fn json_u64_array(values: impl Iterator<Item = u64>) -> String {
    let items: Vec<String> = values.map(|v| v.to_string()).collect();
    format!("[{}]", items.join(","))
}

/// Per-cell outcome counts in offset-major order.
fn arm_json(report: &CampaignReport, grid: &CampaignGrid) -> String {
    let cols = grid.intensities.len();
    let mut faulty = vec![0u64; grid.offsets.len() * cols];
    let mut reset = vec![0u64; grid.offsets.len() * cols];
    for row in &report.rows {
        let oi = grid.offsets.iter().position(|&o| o == row.offset).unwrap();
        let ii = grid.intensities.iter().position(|&e| e == row.intensity).unwrap();
        match row.outcome {
            Outcome::Faulty => faulty[oi * cols + ii] += 1,
            Outcome::Reset => reset[oi * cols + ii] += 1,
            Outcome::Correct => {}
        }
    }
    format!(
        "{{\"invocations\":{},\"faulty_total\":{},\"faulty\":{},\"reset\":{}}}",
        report.invocations_per_run,
        report.faulty_count(),
        json_u64_array(faulty.into_iter()),
        json_u64_array(reset.into_iter())
    )
}

fn fault_heatmap_impl(
    target: &str,
    c: u32,
    n: u32,
    offsets: usize,
    intensities: usize,
    reps: u32,
    seed: u64,
) -> rsr::Result<String> {
    let target: CampaignTarget = target.parse()?;
    let params = SecurityParams::new(c, n)?;
    let grid =
        CampaignGrid::with_dims(offsets.clamp(1, 64), intensities.clamp(2, 64), reps.clamp(1, 50));
    let paired =
        run_paired_fault_campaign(target, &grid, FaultMode::CorruptUniform, 0.1, &params, seed)?;
    let reduction = paired
        .reduction_pct()
        .map(|v| format!("{v:.2}"))
        .unwrap_or_else(|| "null".to_string());
    Ok(format!(
        "{{\"target\":\"{}\",\"reps\":{},\"offsets\":{},\"intensities\":{},\
         \"unprotected\":{},\"protected\":{},\"reduction_pct\":{}}}",
        paired.unprotected.target,
        grid.repetitions,
        json_u64_array(grid.offsets.iter().copied()),
        json_f64_array(grid.intensities.iter().copied()),
        arm_json(&paired.unprotected, &grid),
        arm_json(&paired.protected, &grid),
        reduction
    ))
}

fn leakage_json(report: &LeakageReport) -> String {
    format!(
        "{{\"max_t\":{:.4},\"max_t_global\":{:.4},\"verdict\":\"{}\",\"poi\":{},\"t\":{}}}",
        report.ttest.max_t_windowed,
        report.ttest.max_t_global,
        report.verdict(),
        json_u64_array(report.ttest.poi.iter().map(|&p| p as u64)),
        json_f64_array(report.ttest.t_trace.iter().copied())
    )
}

fn tvla_traces_impl(
    target: &str,
    traces: usize,
    sigma: f64,
    hw_a: u32,
    hw_b: u32,
    seed: u64,
) -> rsr::Result<String> {
    let target: TvlaTarget = target.parse()?;
    let traces = traces.clamp(4, 5000);
    let params = SecurityParams::new(2, 1)?;
    let plain = run_tvla_assessment(target, &Protection::Off, traces, sigma, hw_a, hw_b, seed)?;
    let masked =
        run_tvla_assessment(target, &Protection::On(params), traces, sigma, hw_a, hw_b, seed)?;
    Ok(format!(
        "{{\"target\":\"{}\",\"threshold\":{TVLA_THRESHOLD},\"n_traces\":{traces},\
         \"sigma\":{sigma},\"unprotected\":{},\"protected\":{}}}",
        plain.target,
        leakage_json(&plain),
        leakage_json(&masked)
    ))
}

fn attack_demo_impl(scheme: &str, trials: u32, seed: u64) -> rsr::Result<String> {
    let trials = trials.clamp(1, 2000);
    let params = SecurityParams::new(2, 10)?;
    match scheme {
        "rsa-crt" => rsa_demo_json(trials, &params, seed),
        "kyber" => kyber_demo_json(trials, &params, seed),
        other => Err(rsr::Error::UnknownTarget(other.to_string())),
    }
}

fn rsa_demo_json(trials: u32, params: &SecurityParams, seed: u64) -> rsr::Result<String> {
    let mut key_rng = Prng::substream(seed, 0);
    let key = RsaKey::generate(31, &mut key_rng)?;
    let arm = |protection: &Protection, arm_tag: u64| -> rsr::Result<(u32, Option<u64>)> {
        let mut exploitable = 0u32;
        let mut sample_factor = None;
        for trial in 0..trials {
            let cell = arm_tag * trials as u64 + trial as u64;
            let mut msg_rng = Prng::substream(seed, 3 * cell + 1);
            let m = msg_rng.below_u64(key.n);
            let mut rng = Prng::substream(seed, 3 * cell + 2);
            let s = rsa_crt_sign(m, &key, protection, None, &mut rng)?;
            let model = FaultModel::new(
                1.0,
                FaultMode::CorruptUniform,
                FaultTarget::InvocationIndex(0),
                0.0,
            )?;
            let mut injector = FaultInjector::new(model, Prng::substream(seed, 3 * cell + 3));
            let s_faulty = rsa_crt_sign(m, &key, protection, Some(&mut injector), &mut rng)?;
            if let Some(f) = bellcore_recover_factor(s, s_faulty, key.n) {
                exploitable += 1;
                sample_factor.get_or_insert(f);
            }
        }
        Ok((exploitable, sample_factor))
    };
    let (unprot, factor) = arm(&Protection::Off, 0)?;
    let (prot, _) = arm(&Protection::On(*params), 1)?;
    Ok(format!(
        "{{\"scheme\":\"rsa-crt\",\"trials\":{trials},\"modulus\":{},\
         \"recovered_factor\":{},\"unprotected_exploitable\":{unprot},\
         \"protected_exploitable\":{prot}}}",
        key.n,
        factor.map(|f| f.to_string()).unwrap_or_else(|| "null".into())
    ))
}

fn kyber_demo_json(trials: u32, params: &SecurityParams, seed: u64) -> rsr::Result<String> {
    let mut corrupted = 0u32;
    let mut restored = 0u32;
    let mut sample = None;
    for trial in 0..trials {
        let mut seeds = Prng::substream(seed, trial as u64 + 1);
        let kp = KyberParams::standard(seeds.next_u64(), seeds.next_u64());
        let mut rng = Prng::substream(seed, 10_000 + trial as u64);
        let plain = twiddle_zeroization_attack(&kp, &Protection::Off, &mut rng)?;
        if plain.s_hat_corrupted {
            corrupted += 1;
        }
        let masked = twiddle_zeroization_attack(&kp, &Protection::On(*params), &mut rng)?;
        if masked.restored {
            restored += 1;
        }
        sample.get_or_insert((plain.distinct_correct, plain.distinct_faulty));
    }
    let (distinct_correct, distinct_faulty) = sample.unwrap_or((0, 0));
    Ok(format!(
        "{{\"scheme\":\"kyber\",\"trials\":{trials},\"unprotected_corrupted\":{corrupted},\
         \"protected_restored\":{restored},\"distinct_correct\":{distinct_correct},\
         \"distinct_faulty\":{distinct_faulty}}}"
    ))
}
