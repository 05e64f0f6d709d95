//! Acceptance suite: one test per criterion, each printing its own
//! PASS/FAIL line (run with `--nocapture` to see them). Every tolerance is
//! pinned here, not tuned at runtime.

use rsr::arith::{self, MatrixZq, PolyRing, RingParams};
use rsr::fault::{
    run_paired_fault_campaign, single_shot_success_rate, CampaignGrid, CampaignTarget,
    FaultInjector, FaultMode, FaultModel, FaultTarget,
};
use rsr::leakage::{run_tvla_assessment, TvlaTarget};
use rsr::protect::{
    fisher_yates_shuffle, min_repetitions_chernoff, protected_int_div, protected_int_mul_blind,
    protected_int_mul_split, protected_mat_det, protected_mat_inverse, protected_mat_mul,
    protected_mod, protected_mod_exp, protected_mod_inverse, protected_mod_mul, protected_ntt,
    protected_poly_mul, random_split, Protection, SecurityParams,
};
use rsr::rng::Prng;
use rsr::schemes::{
    bellcore_recover_factor, rsa_crt_sign, twiddle_zeroization_attack, KyberParams, RsaKey,
};
use rsr::stats::uniformity_p_value;
use std::time::{Duration, Instant};

fn report(criterion: u32, label: &str, started: Instant, budget: Duration) {
    let elapsed = started.elapsed();
    println!(
        "acceptance: criterion {criterion} ({label}): PASS [{:.2}s of {:.0}s budget]",
        elapsed.as_secs_f64(),
        budget.as_secs_f64()
    );
    assert!(
        elapsed < budget,
        "criterion {criterion} exceeded its runtime budget: {elapsed:?} >= {budget:?}"
    );
}

fn params_c2_n1() -> SecurityParams {
    SecurityParams::new(2, 1).unwrap()
}

#[test]
fn criterion_1_rsr_exactness() {
    let started = Instant::now();
    let params = params_c2_n1();
    let mut rng = Prng::from_seed(0xacc1);

    // mod: exhaustive over the full widened domain 12 * 2^8 = 3072.
    let ring12_w8 = RingParams::new(12).unwrap();
    let mut p_mod = |&x: &u128| Ok(arith::mod_reduce(x as i128, &ring12_w8));
    for x in 0..ring12_w8.share_modulus() {
        let got = protected_mod(&mut p_mod, &ring12_w8, x, &params, &mut rng).unwrap();
        assert_eq!(got, (x % 12) as u64, "mod mismatch at x={x}");
    }

    // mod_mul: exhaustive over all share-domain pairs of the 4-bit
    // widening (192^2 <= 2^16).
    let ring12 = RingParams::new(12).unwrap().with_widening(4).unwrap();
    let mut p_mul = |q: &(u128, u128)| Ok(arith::mod_mul(q.0, q.1, &ring12));
    for x in 0..ring12.share_modulus() {
        for y in 0..ring12.share_modulus() {
            let got = protected_mod_mul(&mut p_mul, &ring12, x, y, &params, &mut rng).unwrap();
            assert_eq!(got, ((x * y) % 12) as u64, "mod_mul mismatch at ({x}, {y})");
        }
    }

    // mod_exp: 10^4 random exponents over a prime ring with known totient.
    let ring_f4 = RingParams::prime(65_537).unwrap();
    let exp_domain = ring_f4.exponent_share_modulus().unwrap();
    for _ in 0..10_000 {
        let a = 1 + rng.below_u64(65_536);
        let x = rng.below_u128(exp_domain);
        let mut p = |&e: &u128| Ok(arith::mod_exp_square_multiply(a as u128, e, &ring_f4));
        let got = protected_mod_exp(&mut p, &ring_f4, a as u128, x, &params, &mut rng).unwrap();
        assert_eq!(got, arith::mod_exp_square_multiply(a as u128, x, &ring_f4));
    }

    // mod_inverse: 10^4 random units.
    let ring_kq = RingParams::prime(3329).unwrap();
    let mut p_inv = |&v: &u64| arith::mod_inverse_fermat(v as u128, &ring_kq);
    for _ in 0..10_000 {
        let x = 1 + rng.below_u64(3328);
        let got =
            protected_mod_inverse(&mut p_inv, &ring_kq, x as u128, &params, &mut rng).unwrap();
        assert_eq!(got, arith::mod_inverse_fermat(x as u128, &ring_kq).unwrap());
        assert_eq!(arith::mod_mul(got as u128, x as u128, &ring_kq), 1);
    }

    // poly_mul and ntt: 10^4 random cases each on the small test ring.
    let poly_ring = PolyRing::new(8, 17, 3).unwrap();
    let rand_poly =
        |rng: &mut Prng| -> Vec<u64> { (0..8).map(|_| rng.below_u64(17)).collect() };
    let mut p_poly = |q: &(Vec<u64>, Vec<u64>)| arith::poly_mul_schoolbook(&q.0, &q.1, &poly_ring);
    for _ in 0..10_000 {
        let a = rand_poly(&mut rng);
        let b = rand_poly(&mut rng);
        let got =
            protected_poly_mul(&mut p_poly, &a, &b, &poly_ring, &params, &mut rng).unwrap();
        assert_eq!(got, arith::poly_mul_schoolbook(&a, &b, &poly_ring).unwrap());
    }
    let mut p_ntt = |v: &Vec<u64>| arith::ntt_forward(v, &poly_ring);
    for _ in 0..10_000 {
        let a = rand_poly(&mut rng);
        let got = protected_ntt(&mut p_ntt, &a, &poly_ring, &params, &mut rng).unwrap();
        assert_eq!(got, arith::ntt_forward(&a, &poly_ring).unwrap());
    }

    // Integer multiplication, both self-reduction rules: 10^4 random 30-bit pairs.
    let mut p_int = |q: &(i128, i128)| Ok(q.0 * q.1);
    for _ in 0..10_000 {
        let x = rng.below_u64(1 << 30) as i128;
        let y = rng.below_u64(1 << 30) as i128;
        assert_eq!(
            protected_int_mul_split(&mut p_int, x, y, &params, &mut rng).unwrap(),
            x * y
        );
        assert_eq!(
            protected_int_mul_blind(&mut p_int, x, y, &params, &mut rng).unwrap(),
            x * y
        );
    }

    // Integer division: exhaustive x in [0, 2^12) for three divisors.
    for divisor in [3i128, 7, 16] {
        let mut p_div = move |&x: &i128| Ok(x.div_euclid(divisor));
        for x in 0..(1i128 << 12) {
            assert_eq!(
                protected_int_div(&mut p_div, x, divisor, &params, &mut rng).unwrap(),
                x / divisor
            );
        }
    }

    // Matrix operations: 10^4 random instances each.
    let rand_matrix = |n: usize, rng: &mut Prng| -> MatrixZq {
        MatrixZq::new(n, n, (0..n * n).map(|_| rng.below_u64(3329)).collect()).unwrap()
    };
    let mut p_mm = |q: &(MatrixZq, MatrixZq)| arith::mat_mul(&q.0, &q.1, &ring_kq);
    for _ in 0..10_000 {
        let a = rand_matrix(3, &mut rng);
        let b = rand_matrix(3, &mut rng);
        let got = protected_mat_mul(&mut p_mm, &a, &b, &ring_kq, &params, &mut rng).unwrap();
        assert_eq!(got, arith::mat_mul(&a, &b, &ring_kq).unwrap());
    }
    let mut p_mi = |m: &MatrixZq| arith::mat_inverse(m, &ring_kq);
    let identity = MatrixZq::identity(3);
    let mut done = 0;
    while done < 10_000 {
        let a = rand_matrix(3, &mut rng);
        if arith::mat_det(&a, &ring_kq).unwrap() == 0 {
            continue;
        }
        let got = protected_mat_inverse(&mut p_mi, &a, &ring_kq, &params, &mut rng).unwrap();
        assert_eq!(got, arith::mat_inverse(&a, &ring_kq).unwrap());
        assert_eq!(arith::mat_mul(&a, &got, &ring_kq).unwrap(), identity);
        done += 1;
    }
    let mut p_md = |m: &MatrixZq| arith::mat_det(m, &ring_kq);
    for _ in 0..10_000 {
        let a = rand_matrix(4, &mut rng);
        let got = protected_mat_det(&mut p_md, &a, &ring_kq, &params, &mut rng).unwrap();
        assert_eq!(got, arith::mat_det(&a, &ring_kq).unwrap());
    }

    report(1, "rsr exactness", started, Duration::from_secs(60));
}

#[test]
fn criterion_2_single_shot_bound() {
    let started = Instant::now();
    let trials: u32 = 100_000;
    for &eps in &[0.01f64, 0.05] {
        for &c in &[2u32, 3, 4] {
            let seed = (eps * 1000.0) as u64 * 100 + c as u64;
            let rate = single_shot_success_rate(eps, c, trials, seed).unwrap();
            let bound = 1.0 - eps * c as f64;
            let tolerance = 3.0 * (eps * c as f64 / trials as f64).sqrt();
            assert!(
                rate >= bound - tolerance,
                "eps={eps} c={c}: rate {rate} below bound {bound} - {tolerance}"
            );
        }
    }
    report(2, "single-shot 1-eps*c bound", started, Duration::from_secs(120));
}

#[test]
fn criterion_3_chernoff_boosting() {
    let started = Instant::now();
    let n = min_repetitions_chernoff(0.90, 0.05).unwrap();
    let params = SecurityParams::new(2, n).unwrap();
    let eps = 0.05;
    let ring = RingParams::new(257).unwrap();
    let model =
        FaultModel::new(eps, FaultMode::CorruptUniform, FaultTarget::EveryInvocation, 0.0)
            .unwrap();
    let trials = 10_000;
    let mut successes = 0u32;
    for trial in 0..trials {
        let mut input_rng = Prng::substream(0xacc3, 3 * trial);
        let x = input_rng.below_u128(ring.share_modulus());
        let expected = arith::mod_reduce(x as i128, &ring);
        let mut injector = FaultInjector::new(model, Prng::substream(0xacc3, 3 * trial + 1));
        let mut run_rng = Prng::substream(0xacc3, 3 * trial + 2);
        let mut p = rsr::fault::faulty_mod(&mut injector, &ring);
        if protected_mod(&mut p, &ring, x, &params, &mut run_rng) == Ok(expected) {
            successes += 1;
        }
    }
    let rate = successes as f64 / trials as f64;
    assert!(rate >= 0.95, "boosted success {rate} below 0.95 (n = {n})");
    report(3, "chernoff boosting to 95%", started, Duration::from_secs(120));
}

#[test]
fn criterion_4_fault_reduction() {
    let started = Instant::now();
    let grid = CampaignGrid::standard();
    let params = SecurityParams::new(2, 10).unwrap();
    for target in [
        CampaignTarget::ModMul,
        CampaignTarget::ModExp,
        CampaignTarget::PolyMul,
        CampaignTarget::Ntt,
        CampaignTarget::RsaCrt,
        CampaignTarget::KyberKeygen,
    ] {
        let paired = run_paired_fault_campaign(
            target,
            &grid,
            FaultMode::CorruptUniform,
            0.1,
            &params,
            0xacc4,
        )
        .unwrap();
        let unprot = paired.unprotected.faulty_count();
        let prot = paired.protected.faulty_count();
        assert!(unprot > 0, "{}: unprotected arm never faulted", target.name());
        assert!(
            prot * 10 <= unprot,
            "{}: protected faults {prot} exceed 10% of unprotected {unprot}",
            target.name()
        );
        assert_eq!(paired.unprotected.rows.len(), 1280);
    }
    report(4, "fault reduction >= 90% on the 1280-point grid", started, Duration::from_secs(1800));
}

#[test]
fn criterion_5_tvla_verdicts() {
    let started = Instant::now();
    let params = params_c2_n1();
    for target in TvlaTarget::all() {
        let plain =
            run_tvla_assessment(target, &Protection::Off, 1000, 1.0, 4, 12, 0xacc5).unwrap();
        assert!(
            plain.ttest.leak && plain.ttest.max_t_windowed > 4.5,
            "{} unprotected must leak (max |t| = {})",
            target.name(),
            plain.ttest.max_t_windowed
        );
        let masked = run_tvla_assessment(
            target,
            &Protection::On(params),
            1000,
            1.0,
            4,
            12,
            0xacc5,
        )
        .unwrap();
        assert!(
            !masked.ttest.leak && masked.ttest.max_t_windowed <= 4.5,
            "{} protected must not leak (max |t| = {})",
            target.name(),
            masked.ttest.max_t_windowed
        );
    }
    report(5, "tvla leak/no-leak verdicts", started, Duration::from_secs(720));
}

#[test]
fn criterion_6_bellcore() {
    let started = Instant::now();
    let mut key_rng = Prng::from_seed(0xacc6);
    let key = RsaKey::generate(31, &mut key_rng).unwrap();
    let trials: u32 = 1000;

    // Unprotected: a single fault in the first half-exponentiation must
    // hand over a true prime factor every time.
    let mut recovered = 0u32;
    for trial in 0..trials {
        let mut msg_rng = Prng::substream(0xacc6, 3 * trial as u64 + 1);
        let m = msg_rng.below_u64(key.n);
        let mut rng = Prng::substream(0xacc6, 3 * trial as u64 + 2);
        let s = rsa_crt_sign(m, &key, &Protection::Off, None, &mut rng).unwrap();
        let model =
            FaultModel::new(1.0, FaultMode::CorruptUniform, FaultTarget::InvocationIndex(0), 0.0)
                .unwrap();
        let mut injector = FaultInjector::new(model, Prng::substream(0xacc6, 3 * trial as u64 + 3));
        let s_faulty =
            rsa_crt_sign(m, &key, &Protection::Off, Some(&mut injector), &mut rng).unwrap();
        if let Some(factor) = bellcore_recover_factor(s, s_faulty, key.n) {
            assert!(key.n.is_multiple_of(factor) && (factor == key.p || factor == key.q));
            recovered += 1;
        }
    }
    assert_eq!(recovered, trials, "unprotected recovery must be total");

    // Protected: the same single fault must be outvoted.
    let params = SecurityParams::new(2, 10).unwrap();
    let mut exploitable = 0u32;
    for trial in 0..trials {
        let mut msg_rng = Prng::substream(0xacc7, 3 * trial as u64 + 1);
        let m = msg_rng.below_u64(key.n);
        let mut rng = Prng::substream(0xacc7, 3 * trial as u64 + 2);
        let s = rsa_crt_sign(m, &key, &Protection::On(params), None, &mut rng).unwrap();
        let model =
            FaultModel::new(1.0, FaultMode::CorruptUniform, FaultTarget::InvocationIndex(0), 0.0)
                .unwrap();
        let mut injector = FaultInjector::new(model, Prng::substream(0xacc7, 3 * trial as u64 + 3));
        let s_faulty =
            rsa_crt_sign(m, &key, &Protection::On(params), Some(&mut injector), &mut rng)
                .unwrap();
        if bellcore_recover_factor(s, s_faulty, key.n).is_some() {
            exploitable += 1;
        }
    }
    assert!(
        exploitable as f64 <= trials as f64 * 0.01,
        "protected exploitable pairs: {exploitable}"
    );
    report(6, "bellcore factor recovery", started, Duration::from_secs(300));
}

#[test]
fn criterion_7_twiddle_zeroization() {
    let started = Instant::now();
    let trials = 1000u64;

    let mut corrupted = 0u64;
    let mut rng = Prng::from_seed(0xacc8);
    for trial in 0..trials {
        let p = KyberParams::standard(trial * 2 + 1, trial * 2 + 2);
        // Rules out the measure-zero all-zero secret, for which the
        // transform of the zero vector is correct by linearity.
        let ring = p.ring().unwrap();
        let (s, _) = rsr::schemes::sample_secret_and_error(&p, &ring);
        assert!(s.iter().any(|poly| poly.iter().any(|&c| c != 0)));
        let report = twiddle_zeroization_attack(&p, &Protection::Off, &mut rng).unwrap();
        if report.s_hat_corrupted {
            corrupted += 1;
        }
    }
    assert_eq!(corrupted, trials, "zeroization must corrupt every unprotected run");

    let params = SecurityParams::new(2, 10).unwrap();
    let mut restored = 0u64;
    for trial in 0..trials {
        let p = KyberParams::standard(trial * 2 + 1, trial * 2 + 2);
        let report = twiddle_zeroization_attack(&p, &Protection::On(params), &mut rng).unwrap();
        if report.restored {
            restored += 1;
        }
    }
    assert!(
        restored as f64 >= trials as f64 * 0.99,
        "protected keygen restored only {restored} of {trials}"
    );
    report(7, "twiddle zeroization", started, Duration::from_secs(300));
}

#[test]
fn criterion_8_statistical_hygiene() {
    let started = Instant::now();
    let significance = 1e-3;

    // Share marginals over Z_8.
    let mut rng = Prng::from_seed(0xacc9);
    let mut bins = [0u64; 8];
    for _ in 0..100_000 {
        let sv = random_split(8, 5, 2, &mut rng).unwrap();
        bins[sv.shares()[0] as usize] += 1;
    }
    let p_split = uniformity_p_value(&bins);
    assert!(p_split > significance, "share marginal p = {p_split}");

    // Shuffle uniformity over the six permutations of three items.
    let perms =
        [[1u8, 2, 3], [1, 3, 2], [2, 1, 3], [2, 3, 1], [3, 1, 2], [3, 2, 1]];
    let mut perm_bins = [0u64; 6];
    for _ in 0..60_000 {
        let out = fisher_yates_shuffle(vec![1u8, 2, 3], &mut rng);
        perm_bins[perms.iter().position(|p| p == out.as_slice()).unwrap()] += 1;
    }
    let p_perm = uniformity_p_value(&perm_bins);
    assert!(p_perm > significance, "permutation p = {p_perm}");

    // Blinding uniformity: every query of the protected reduction over
    // the widened domain Z_12.
    let ring = RingParams::new(3).unwrap().with_widening(2).unwrap();
    let params = params_c2_n1();
    let mut query_bins = vec![0u64; 12];
    for _ in 0..30_000 {
        let mut p = |&x: &u128| {
            query_bins[x as usize] += 1;
            Ok(arith::mod_reduce(x as i128, &ring))
        };
        protected_mod(&mut p, &ring, 7, &params, &mut rng).unwrap();
    }
    let p_blind = uniformity_p_value(&query_bins);
    assert!(p_blind > significance, "blinding p = {p_blind}");

    report(8, "statistical hygiene", started, Duration::from_secs(120));
}

#[test]
fn criterion_9_cli_determinism() {
    let started = Instant::now();
    let bin = env!("CARGO_BIN_EXE_rsr");
    let base = std::env::temp_dir().join(format!("rsr-acceptance-{}", std::process::id()));

    let invocations: Vec<Vec<&str>> = vec![
        vec![
            "fault-campaign", "--target", "mod-mul", "--c", "2", "--n", "10", "--seed", "1",
            "--grid", "6x6", "--reps", "2",
        ],
        vec!["tvla", "--target", "mod", "--traces", "60", "--seed", "2"],
        vec!["verify", "--seed", "3"],
        vec!["demo", "rsa-crt", "--seed", "4", "--trials", "25"],
        vec!["demo", "elgamal", "--seed", "5", "--trials", "50"],
        vec!["demo", "kyber", "--seed", "6", "--trials", "15"],
    ];

    for (i, argv) in invocations.iter().enumerate() {
        let mut outputs: Vec<std::collections::BTreeMap<String, Vec<u8>>> = Vec::new();
        for run in 0..2 {
            let dir = base.join(format!("cmd{i}-run{run}"));
            std::fs::create_dir_all(&dir).unwrap();
            let status = std::process::Command::new(bin)
                .args(argv)
                .arg("--out")
                .arg(&dir)
                .output()
                .expect("spawn CLI");
            assert!(
                status.status.success(),
                "{argv:?} failed: {}",
                String::from_utf8_lossy(&status.stderr)
            );
            let mut files = std::collections::BTreeMap::new();
            for entry in std::fs::read_dir(&dir).unwrap() {
                let entry = entry.unwrap();
                files.insert(
                    entry.file_name().to_string_lossy().into_owned(),
                    std::fs::read(entry.path()).unwrap(),
                );
            }
            assert!(!files.is_empty(), "{argv:?} wrote no output files");
            outputs.push(files);
        }
        assert_eq!(
            outputs[0].keys().collect::<Vec<_>>(),
            outputs[1].keys().collect::<Vec<_>>(),
            "{argv:?}: file sets differ between reruns"
        );
        for (name, bytes) in &outputs[0] {
            assert_eq!(
                bytes,
                outputs[1].get(name).unwrap(),
                "{argv:?}: {name} differs between reruns"
            );
        }
    }
    let _ = std::fs::remove_dir_all(&base);
    report(9, "cli determinism", started, Duration::from_secs(600));
}
