mod common;

use cellfree_ee::config::RunConfig;
use cellfree_ee::model::{
    apc_first_principles, apc_polynomial, ase, check_gamma, energy_efficiency, se_per_user, ApcMode,
};
use cellfree_ee::optimizer::{joint_optimize, optimal_n_users};
use cellfree_ee::params::{PowerModel, SystemParams};
use cellfree_ee::sim::{assign_pilots, conditional_sinr, pilot_count, sample_realization, torus_distance, PilotPolicy};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{any_params, moderate_params, target_at};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn check_gamma_grows_with_zeta_lambda_and_k(seed in any::<u64>(), bump in 1.01f64..3.0) {
        let (p, _) = any_params(&mut rng(seed));
        let g = check_gamma(&p);

        let mut q = p.clone();
        q.pilot_reuse = (p.pilot_reuse * bump).min(p.n_users as f64);
        prop_assert!(check_gamma(&q) >= g);

        let mut q = p.clone();
        q.ap_density *= bump;
        prop_assert!(check_gamma(&q) >= g);

        let mut q = p.clone();
        q.n_users += 1;
        prop_assert!(check_gamma(&q) > g);
    }

    #[test]
    fn check_gamma_falls_with_n(seed in any::<u64>(), extra in 1u32..64) {
        let (p, _) = any_params(&mut rng(seed));
        let mut q = p.clone();
        q.n_antennas += extra;
        prop_assert!(check_gamma(&q) <= check_gamma(&p));
        // strictly, once the N-dependent terms are above rounding
        let p = moderate_params(&mut rng(seed));
        let mut q = p.clone();
        q.n_antennas += extra;
        prop_assert!(check_gamma(&q) < check_gamma(&p));
    }

    #[test]
    fn apc_constructions_agree(seed in any::<u64>()) {
        let (p, pm) = any_params(&mut rng(seed));
        let a = apc_polynomial(&p, &pm).unwrap();
        let b = apc_first_principles(&p, &pm).unwrap();
        prop_assert!(rel(a, b) <= 1e-9, "{a} vs {b}");
    }

    #[test]
    fn model_outputs_are_finite(seed in any::<u64>()) {
        let (p, pm) = any_params(&mut rng(seed));
        for mode in [ApcMode::Polynomial, ApcMode::FirstPrinciples] {
            let b = energy_efficiency(&p, &pm, mode).unwrap();
            for x in [b.check_gamma, b.gamma, b.se_per_user, b.ase, b.apc, b.ee] {
                prop_assert!(x.is_finite() && x >= 0.0, "{x} in {b:?}");
            }
        }
    }

    #[test]
    fn ee_is_throughput_over_power(seed in any::<u64>()) {
        let (p, pm) = any_params(&mut rng(seed));
        let b = energy_efficiency(&p, &pm, ApcMode::Polynomial).unwrap();
        prop_assert_eq!(b.ee, p.bandwidth * b.ase / b.apc);
        prop_assert_eq!(b.ase, ase(&p).unwrap());
        prop_assert_eq!(b.se_per_user, se_per_user(&p).unwrap());
    }

    #[test]
    fn config_round_trips(
        n in 1u32..256,
        k in 1u32..64,
        lambda in 1.0f64..500.0,
        gamma0 in 0.1f64..20.0,
        seed in any::<u64>(),
    ) {
        let mut cfg = RunConfig::table_iii();
        cfg.system.n_antennas = n;
        cfg.system.n_users = k;
        cfg.system.pilot_reuse = k as f64;
        cfg.system.ap_density_per_km2 = lambda;
        cfg.constraint.gamma0 = gamma0;
        cfg.mc.seed = seed;
        let back = RunConfig::from_json(&cfg.to_json().unwrap()).unwrap();
        prop_assert_eq!(back, cfg);
    }

    #[test]
    fn torus_distance_is_a_bounded_symmetric_metric(
        side in 1.0f64..1e4,
        a in prop::array::uniform2(0.0f64..1.0),
        b in prop::array::uniform2(0.0f64..1.0),
    ) {
        let a = [a[0] * side, a[1] * side];
        let b = [b[0] * side, b[1] * side];
        let d = torus_distance(a, b, side);
        prop_assert_eq!(d, torus_distance(b, a, side));
        prop_assert!(d >= 0.0 && d <= side / 2f64.sqrt() * (1.0 + 1e-12));
        prop_assert_eq!(torus_distance(a, a, side), 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn k_roots_are_stationary(seed in any::<u64>()) {
        let p = moderate_params(&mut rng(seed));
        let gamma0 = target_at(&p, p.pilot_reuse);
        if let Ok(r) = optimal_n_users(&p, &PowerModel::table_iii(), gamma0) {
            if let Some(res) = r.diagnostics.get("max_root_residual") {
                prop_assert!(*res <= 1e-8, "residual {res}");
            }
        }
    }

    #[test]
    fn joint_ascent_never_loses_ee(seed in any::<u64>()) {
        let p = moderate_params(&mut rng(seed));
        let gamma0 = target_at(&p, p.pilot_reuse);
        if let Ok(r) = joint_optimize(&p, &PowerModel::table_iii(), gamma0) {
            let accepted: Vec<f64> = r.trace.iter().filter(|s| s.accepted).map(|s| s.point.ee).collect();
            for w in accepted.windows(2) {
                prop_assert!(w[1] >= w[0], "{accepted:?}");
            }
        }
    }

    #[test]
    fn sinr_is_translation_invariant(seed in any::<u64>(), v in prop::array::uniform2(0.0f64..1000.0)) {
        let p = sim_params();
        let real = sample_realization(&p, seed).unwrap();
        let pilots = assign_pilots(p.n_users as usize, pilot_count(&p), PilotPolicy::RoundRobin, seed).unwrap();
        let a = conditional_sinr(&real, &pilots, &p, 0).unwrap();
        let b = conditional_sinr(&real.translated(v), &pilots, &p, 0).unwrap();
        prop_assert!(rel(a, b) <= 1e-12, "{a} vs {b}");
    }

    #[test]
    fn sinr_ignores_ap_and_user_order(seed in any::<u64>(), shuffle in any::<u64>()) {
        use rand::seq::SliceRandom;
        let p = sim_params();
        let real = sample_realization(&p, seed).unwrap();
        let pilots = assign_pilots(p.n_users as usize, pilot_count(&p), PilotPolicy::RoundRobin, seed).unwrap();
        let a = conditional_sinr(&real, &pilots, &p, 0).unwrap();

        let mut r = rng(shuffle);
        let mut shuffled = real.clone();
        shuffled.ap_positions.shuffle(&mut r);
        // user 0 stays the typical user; the others move with their pilots
        let mut order: Vec<usize> = (1..real.user_positions.len()).collect();
        order.shuffle(&mut r);
        order.insert(0, 0);
        shuffled.user_positions = order.iter().map(|&i| real.user_positions[i]).collect();
        let mut permuted = pilots.clone();
        permuted.pilot = order.iter().map(|&i| pilots.pilot[i]).collect();

        let b = conditional_sinr(&shuffled, &permuted, &p, 0).unwrap();
        prop_assert!(rel(a, b) <= 1e-12, "{a} vs {b}");
    }
}

/// Table III geometry with SNRs low enough that every SINR term matters.
fn sim_params() -> SystemParams {
    let mut p = SystemParams::table_iii();
    p.rho_tr = 5.0;
    p.rho_d = 5.0;
    p
}
