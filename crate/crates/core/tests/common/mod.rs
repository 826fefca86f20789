#![allow(dead_code)]

use cellfree_ee::model::check_gamma;
use cellfree_ee::params::{PowerModel, SystemParams};
use rand::Rng;

/// Random operating point with pilot and data SNRs of a few dB, where the
/// SINR bound depends visibly on ζ, N and λ.
pub fn moderate_params<R: Rng>(rng: &mut R) -> SystemParams {
    let mut p = SystemParams::table_iii();
    p.n_antennas = rng.random_range(4..=64);
    p.n_users = rng.random_range(4..=20);
    p.ap_density = rng.random_range(5.0..150.0) * 1e-6;
    p.pathloss_exp = rng.random_range(3.0..4.5);
    p.rho_tr = rng.random_range(0.5..10.0);
    p.rho_d = rng.random_range(1.0..10.0);
    p.rho_tr_watts = rng.random_range(0.05..0.2);
    p.rho_d_watts = rng.random_range(0.1..0.4);
    p.dl_fraction = rng.random_range(0.2..0.6);
    p.pilot_corr_sum = rng.random_range(1.0..3.0);
    p.pilot_reuse = interior_zeta(rng, &p);
    p
}

/// A ζ strictly inside `[max(1, K/τc), K]`.
pub fn interior_zeta<R: Rng>(rng: &mut R, p: &SystemParams) -> f64 {
    let k = p.n_users as f64;
    let lo = (k / p.tau_c as f64).max(1.0);
    lo + (k - lo) * rng.random_range(0.05..0.95)
}

/// The SINR bound of `p` at pilot reuse `zeta`.
pub fn target_at(p: &SystemParams, zeta: f64) -> f64 {
    let mut q = p.clone();
    q.pilot_reuse = zeta;
    1.0 / check_gamma(&q)
}

/// Any valid parameter set, SNRs and powers spanning several decades.
pub fn any_params<R: Rng>(rng: &mut R) -> (SystemParams, PowerModel) {
    let mut p = SystemParams::table_iii();
    p.n_antennas = rng.random_range(1..=256);
    p.n_users = rng.random_range(1..=64);
    p.tau_c = rng.random_range(p.n_users.max(10)..=1000);
    let k = p.n_users as f64;
    p.pilot_reuse = rng.random_range(1.0..=k.max(1.0 + 1e-9)).min(k);
    p.ap_density = 10f64.powf(rng.random_range(-6.0..-3.0));
    p.area = 10f64.powf(rng.random_range(4.0..8.0));
    p.pathloss_exp = rng.random_range(2.1..6.0);
    p.rho_tr = 10f64.powf(rng.random_range(-2.0..12.0));
    p.rho_d = 10f64.powf(rng.random_range(-2.0..12.0));
    p.rho_tr_watts = 10f64.powf(rng.random_range(-3.0..0.0));
    p.rho_d_watts = 10f64.powf(rng.random_range(-3.0..0.0));
    p.dl_fraction = rng.random_range(0.05..=1.0);
    p.bandwidth = 10f64.powf(rng.random_range(5.0..8.0));
    p.pilot_corr_sum = rng.random_range(1.0..10.0);
    let pm = PowerModel {
        p_fp: rng.random_range(0.0..10.0),
        p_lo: rng.random_range(0.0..1.0),
        p_ap: rng.random_range(0.0..1.0),
        p_ue: rng.random_range(0.0..1.0),
        p_cod: rng.random_range(0.0..0.1) * 1e-9,
        p_dec: rng.random_range(0.0..0.1) * 1e-9,
        p_bt: rng.random_range(0.0..0.1) * 1e-9,
        l_ap: rng.random_range(10.0..1000.0) * 1e9,
        amp_eff: rng.random_range(0.1..=1.0),
    };
    (p, pm)
}
