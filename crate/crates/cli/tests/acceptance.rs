//! Acceptance battery: one test per release criterion, each printing a
//! PASS line when it holds.  The criteria pin down the toolkit's core
//! claims — closed-form endpoints, agreement between the numerical
//! searches and the analytic curves, the structure of the maximizer, the
//! critical disturbances, disturbance universality, the attacked-pair
//! state, Bell scaling and optima, Monte-Carlo consistency, and
//! byte-level CLI determinism.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::process::Command;

use sixstate::attack::{build_optimal_probe, to_isometry};
use sixstate::bell::{
    chained_s, classical_bound, critical_disturbance, optimize_directions, quantum_maximum,
    rho_ab, DirectionSet,
};
use sixstate::info::{binary_entropy, i_ab, i_ae_one_bit, i_ae_two_bit};
use sixstate::optimize::{find_intersection, maximize_iae, ConstraintSet};
use sixstate::protocol::{run_session, AttackKind, SessionConfig, StateCount};
use sixstate::quantum::{
    fidelity_pure, make_singlet, partial_trace, BlochVector, DensityMatrix, PureState,
};
use nalgebra::DMatrix;
use num_complex::Complex64;

fn assert_close(a: f64, b: f64, tol: f64, what: &str) {
    assert!(
        (a - b).abs() <= tol,
        "{what}: {a} vs {b} differ by {} (tol {tol})",
        (a - b).abs()
    );
}

/// Nine-point interior grid D = 0.05, 0.10, …, 0.45.
fn interior_grid() -> Vec<f64> {
    (1..=9).map(|i| 0.05 * i as f64).collect()
}

#[test]
fn criterion_1_closed_form_endpoints() {
    assert_close(i_ab(0.0).unwrap(), 1.0, 1e-12, "receiver curve at 0");
    assert_close(i_ae_two_bit(0.0).unwrap(), 0.0, 1e-12, "two-bit curve at 0");
    assert_close(i_ae_one_bit(0.0).unwrap(), 0.0, 1e-12, "one-bit curve at 0");
    assert_close(i_ab(0.5).unwrap(), 0.0, 1e-12, "receiver curve at 1/2");
    assert_close(i_ae_two_bit(0.5).unwrap(), 1.0, 1e-12, "two-bit curve at 1/2");
    assert_close(i_ae_one_bit(0.5).unwrap(), 1.0, 1e-12, "one-bit curve at 1/2");
    println!("criterion 1 PASS: information curves hit their exact endpoint values");
}

#[test]
fn criterion_2_constrained_search_matches_the_closed_form() {
    for d in interior_grid() {
        let result = maximize_iae(d, &ConstraintSet::six_state(), 1).unwrap();
        assert_close(
            result.best_value,
            i_ae_two_bit(d).unwrap(),
            1e-6,
            &format!("search value at d={d}"),
        );

        // Structure of the maximizer: corner amplitudes vanish and the
        // interior amplitudes pair up to unit weight.
        let a = result.parameters.faithful_zero();
        let c = result.parameters.faithful_one();
        for state in [a, c] {
            assert!(
                state.amplitude(0).norm() < 1e-5 && state.amplitude(3).norm() < 1e-5,
                "corner amplitudes must vanish at d={d}"
            );
        }
        for idx in [1, 2] {
            let paired = a.amplitude(idx).norm_sqr() + c.amplitude(idx).norm_sqr();
            assert_close(paired, 1.0, 1e-5, &format!("amplitude pairing at d={d}"));
        }
    }
    println!(
        "criterion 2 PASS: constrained search reproduces the closed form and \
         maximizer structure on the interior grid"
    );
}

#[test]
fn criterion_3_information_strictly_orders_by_probe_power() {
    for d in interior_grid() {
        let one_bit = i_ae_one_bit(d).unwrap();
        let two_bit = i_ae_two_bit(d).unwrap();
        let four_state = maximize_iae(d, &ConstraintSet::bb84(), 2).unwrap().best_value;
        assert!(
            one_bit + 1e-9 < two_bit,
            "one-bit probe must trail the two-bit probe at d={d}"
        );
        assert!(
            two_bit + 1e-9 < four_state,
            "dropping the third basis must help the eavesdropper at d={d}"
        );
    }
    println!(
        "criterion 3 PASS: one-bit < two-bit < four-state information on the \
         interior grid"
    );
}

#[test]
fn criterion_4_critical_disturbances() {
    let chsh = critical_disturbance(2).unwrap();
    assert_close(
        chsh,
        0.5 * (1.0 - std::f64::consts::FRAC_1_SQRT_2),
        1e-9,
        "four-term Bell threshold",
    );

    let d_star = find_intersection(i_ab, i_ae_two_bit, 0.05, 0.45).unwrap();

    // Independent oracle: plain bisection on the curve gap.
    let gap = |d: f64| i_ab(d).unwrap() - i_ae_two_bit(d).unwrap();
    let (mut lo, mut hi) = (0.1, 0.2);
    assert!(gap(lo) > 0.0 && gap(hi) < 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if gap(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let oracle = 0.5 * (lo + hi);

    assert_close(d_star, oracle, 1e-9, "crossing vs bisection oracle");
    assert_close(d_star, 0.156_373_463_330, 1e-9, "crossing vs frozen value");
    assert!(
        d_star > chsh,
        "the Bell check must trip before the information balance tips"
    );
    println!(
        "criterion 4 PASS: critical disturbances match the closed form and an \
         independent bisection oracle"
    );
}

#[test]
fn criterion_5_disturbance_is_universal_over_pure_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for &d in &[0.1, 0.25, 0.4] {
        let isometry = to_isometry(&build_optimal_probe(d).unwrap()).unwrap();
        for _ in 0..1000 {
            let amps: Vec<Complex64> = (0..2)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            if amps.iter().map(|z| z.norm_sqr()).sum::<f64>() < 1e-6 {
                continue;
            }
            let input = PureState::new(amps).unwrap();
            let joint = isometry.apply(&input).unwrap();
            let received =
                partial_trace(&DensityMatrix::from_pure(&joint), 0, (2, 4)).unwrap();
            let fidelity = fidelity_pure(&input, &received).unwrap();
            assert_close(
                fidelity,
                1.0 - d,
                1e-9,
                &format!("fidelity of a random input at d={d}"),
            );
        }
    }
    println!(
        "criterion 5 PASS: the optimal attack disturbs every pure input state \
         equally (1000 random states per disturbance)"
    );
}

#[test]
fn criterion_6_attacked_pair_matches_its_closed_form() {
    for step in 0..10 {
        let d = 0.5 * step as f64 / 9.0;
        let isometry = to_isometry(&build_optimal_probe(d).unwrap()).unwrap();
        let v = isometry.matrix();
        let pd = isometry.probe_dim();
        let singlet = make_singlet();

        // Attack the second qubit of an explicit singlet and trace out
        // the probe, fully independently of the closed-form constructor.
        let mut amp = vec![Complex64::new(0.0, 0.0); 2 * 2 * pd];
        for i in 0..2 {
            for j in 0..2 {
                let s_ij = singlet.amplitude(i * 2 + j);
                for k in 0..2 * pd {
                    amp[i * 2 * pd + k] += s_ij * v[(k, j)];
                }
            }
        }
        let mut reduced = DMatrix::from_element(4, 4, Complex64::new(0.0, 0.0));
        for i in 0..2 {
            for b in 0..2 {
                for i2 in 0..2 {
                    for b2 in 0..2 {
                        let mut total = Complex64::new(0.0, 0.0);
                        for e in 0..pd {
                            total += amp[i * 2 * pd + b * pd + e]
                                * amp[i2 * 2 * pd + b2 * pd + e].conj();
                        }
                        reduced[(i * 2 + b, i2 * 2 + b2)] = total;
                    }
                }
            }
        }

        let closed = rho_ab(d).unwrap();
        for r in 0..4 {
            for c in 0..4 {
                assert!(
                    (reduced[(r, c)] - closed.entry(r, c)).norm() < 1e-12,
                    "entry ({r},{c}) mismatch at d={d}"
                );
            }
        }
    }
    println!(
        "criterion 6 PASS: attacking half a singlet reproduces the closed-form \
         shared state on a 10-point grid"
    );
}

#[test]
fn criterion_7_bell_scaling_and_optimal_violation() {
    let singlet = DensityMatrix::from_pure(&make_singlet());

    // (a) Correlation sums shrink linearly in the disturbance for any
    // direction choice.
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let random_unit = |rng: &mut ChaCha8Rng| loop {
        let v = BlochVector::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        if v.norm() > 1e-3 {
            break BlochVector::new(v.x / v.norm(), v.y / v.norm(), v.z / v.norm());
        }
    };
    for _ in 0..50 {
        let n = rng.gen_range(2..=6);
        let alice: Vec<_> = (0..n).map(|_| random_unit(&mut rng)).collect();
        let bob: Vec<_> = (0..n).map(|_| random_unit(&mut rng)).collect();
        let directions = DirectionSet::new(alice, bob).unwrap();
        let s0 = chained_s(&singlet, &directions).unwrap();
        for step in 0..10 {
            let d = 0.5 * step as f64 / 9.0;
            let s = chained_s(&rho_ab(d).unwrap(), &directions).unwrap();
            assert_close(s, (1.0 - 2.0 * d) * s0, 1e-9, "linear shrinkage");
        }
    }

    // (b) The optimized four-term sum reaches 2√2 with coplanar settings.
    let (directions, s) = optimize_directions(&singlet, 2, 3).unwrap();
    assert_close(s, 2.0 * std::f64::consts::SQRT_2, 1e-6, "four-term optimum");
    let mut rows = Vec::new();
    for v in directions.alice().iter().chain(directions.bob()) {
        rows.extend_from_slice(&[v.x, v.y, v.z]);
    }
    let stacked = DMatrix::from_row_slice(4, 3, &rows);
    let sigma3 = stacked.svd(false, false).singular_values[2];
    assert!(sigma3 < 1e-4, "optimal directions must be coplanar, σ₃={sigma3}");

    // (c) Optimized violations stay within the √2 ratio for every chain
    // length.
    for n in 2..=6 {
        let (_, s_n) = optimize_directions(&singlet, n, 11).unwrap();
        assert_close(s_n, quantum_maximum(n).unwrap(), 1e-6, "chain ceiling");
        let ratio = s_n / classical_bound(n).unwrap();
        assert!(
            ratio <= std::f64::consts::SQRT_2 + 1e-9,
            "violation ratio {ratio} exceeds √2 at n={n}"
        );
    }
    println!(
        "criterion 7 PASS: Bell sums scale linearly with disturbance and the \
         optimized violations match the quantum ceiling"
    );
}

#[test]
fn criterion_8_monte_carlo_session_consistency() {
    let d = 0.1;
    let config = SessionConfig {
        n_signals: 100_000,
        states: StateCount::Six,
        disturbance: d,
        attack: AttackKind::OptimalTwoBit,
        seed: 7,
    };
    let stats = run_session(&config).unwrap();

    let five_sigma = |p: f64, n: f64| 5.0 * (p * (1.0 - p) / n).sqrt();
    assert_close(
        stats.sift_rate,
        1.0 / 3.0,
        five_sigma(1.0 / 3.0, config.n_signals as f64),
        "sift rate",
    );
    assert_close(
        stats.qber,
        d,
        five_sigma(d, stats.sifted_count as f64),
        "error rate",
    );
    let per_basis_n = stats.sifted_count as f64 / 3.0;
    for (basis, qber) in &stats.per_basis_qber {
        assert_close(
            *qber,
            d,
            five_sigma(d, per_basis_n),
            &format!("error rate in basis {basis:?}"),
        );
    }
    for (_, qi) in &stats.per_basis_qber {
        for (_, qj) in &stats.per_basis_qber {
            assert!(
                (qi - qj).abs() <= 5.0 * (2.0 * d * (1.0 - d) / per_basis_n).sqrt(),
                "per-basis rates must agree within their joint band"
            );
        }
    }
    assert_close(
        stats.empirical_i_ab.unwrap(),
        1.0 - binary_entropy(d),
        0.01,
        "empirical sender-receiver information",
    );
    assert_close(
        stats.empirical_i_ae.unwrap(),
        i_ae_two_bit(d).unwrap(),
        0.01,
        "empirical sender-eavesdropper information",
    );
    println!(
        "criterion 8 PASS: a 100k-signal session matches the analytic sift rate, \
         error rates, and information curves"
    );
}

#[test]
fn criterion_9_cli_output_is_byte_deterministic() {
    let invocations: Vec<Vec<&str>> = vec![
        vec!["intersect"],
        vec![
            "simulate", "--signals", "20000", "--d", "0.1", "--attack", "opt2",
            "--seed", "5",
        ],
        vec!["bell", "--settings", "3", "--d", "0.05", "--seed", "2"],
        vec![
            "curves", "--d-min", "0.1", "--d-max", "0.2", "--steps", "2", "--seed", "3",
        ],
        vec!["optimize", "--d", "0.15", "--seed", "4"],
        vec!["attack-verify", "--d", "0.2"],
    ];
    for args in &invocations {
        let run = |args: &[&str]| {
            Command::new(env!("CARGO_BIN_EXE_sixstate"))
                .args(args)
                .output()
                .expect("binary runs")
        };
        let first = run(args);
        let second = run(args);
        assert!(first.status.success(), "{args:?} failed");
        assert_eq!(
            first.stdout, second.stdout,
            "{args:?} produced different bytes on identical runs"
        );
        assert!(!first.stdout.is_empty());
    }

    // File output is deterministic too.
    let dir = tempfile::tempdir().unwrap();
    let write_table = |name: &str| {
        let path = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_sixstate"))
            .args([
                "curves", "--d-min", "0.05", "--d-max", "0.15", "--steps", "3",
                "--seed", "8", "--out",
            ])
            .arg(&path)
            .status()
            .expect("binary runs");
        assert!(status.success());
        std::fs::read(&path).unwrap()
    };
    assert_eq!(write_table("a.csv"), write_table("b.csv"));
    println!("criterion 9 PASS: identical invocations produce byte-identical output");
}
