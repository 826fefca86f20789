//! Closed-form optima of the reduced problem, one variable at a time.
//!
//! Every variable is handled the same way: the reduced objective is
//! written as a ratio of low-degree polynomials in that variable, its
//! stationarity condition is solved exactly (a quadratic for λ and N, a
//! polynomial of degree at most five for K), and the stationary points are
//! compared with the ends of the feasible set. Maximising EE is the same as
//! minimising `λ·P/(K(1 − K/(ζτc)))`, the only part of `1/EE` that moves.

use std::f64::consts::PI;

use super::poly::Poly;
use super::reduced::{PilotCoupling, ReducedPoint, ReducedProblem};

/// Outcome of a relaxed (real-valued) closed-form solve.
#[derive(Debug, Clone)]
pub(crate) struct Relaxed {
    pub point: ReducedPoint,
    /// Feasible range of the variable that was scanned, relaxed.
    pub interval: (f64, f64),
    pub candidates: Vec<f64>,
    pub diagnostics: Vec<(&'static str, f64)>,
}

fn best_of<F: Fn(f64) -> ReducedPoint>(cands: &[f64], eval: F) -> Option<ReducedPoint> {
    let mut best: Option<ReducedPoint> = None;
    for &x in cands {
        let pt = eval(x);
        if pt.feasible && best.is_none_or(|b| pt.ee > b.ee) {
            best = Some(pt);
        }
    }
    best
}

/// `ζ*(λ) = z₀ − z₁λ` for fixed N, K.
pub(crate) fn zeta_affine_in_lambda(prob: &ReducedProblem, n: f64, k: f64) -> (f64, f64) {
    let b = &prob.base;
    let x = b.alpha * PI * n * b.rho_tr * b.rho_d;
    let q2 = ((b.alpha - 1.0) + n * b.rho_d * (b.alpha - 2.0) * (k - 1.0)) / k;
    (prob.zeta_star(0.0, n, k), x * (k - 1.0) / q2)
}

pub(crate) fn ap_density(prob: &ReducedProblem, n: f64, k: f64, bounds: (f64, f64)) -> Option<Relaxed> {
    let (z0, z1) = zeta_affine_in_lambda(prob, n, k);
    let (zlo, zhi) = prob.zeta_window(k);
    let (mut lo, mut hi) = bounds;
    if z1 > 0.0 {
        lo = lo.max((z0 - zhi) / z1);
        hi = hi.min((z0 - zlo) / z1);
    } else if !prob.in_window(k, z0) {
        return None;
    }
    if !(lo <= hi) {
        return None;
    }

    // h(λ) = λ(p_a ζ + p_b)/(ζ − K/τc) with ζ = z₀ − z₁λ; h' = 0 reduces to
    // p_a z₁² λ² − 2 p_a z₁ w λ + c w = 0, w = z₀ − K/τc, c = p_a z₀ + p_b.
    let p_a = prob.split.base(n, k);
    let p_b = prob.split.pilot_scaled(n, k);
    let w = z0 - k / prob.base.tau_c;
    let c = p_a * z0 + p_b;
    let stationary = Poly::new(vec![c * w, -2.0 * p_a * z1 * w, p_a * z1 * z1]);
    let mut candidates = vec![lo, hi];
    candidates.extend(stationary.real_roots_in(lo, hi));
    let point = best_of(&candidates, |l| prob.evaluate(l, n, k))?;
    Some(Relaxed {
        point,
        interval: (lo, hi),
        candidates,
        diagnostics: vec![
            ("zeta_intercept", z0),
            ("zeta_slope", -z1),
            ("stationarity_discriminant", w * (w - c / p_a)),
        ],
    })
}

/// Constraint `a + b/N + ζ(c + d/N) = 0` solved as `ζ(N) = −(aN+b)/(cN+d)`.
pub(crate) struct NConstraint {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl NConstraint {
    pub fn new(prob: &ReducedProblem, lambda: f64, k: f64) -> Self {
        let o = &prob.base;
        let api = o.alpha * PI;
        let a_sum = prob.pilot_sum(k);
        NConstraint {
            a: (a_sum + lambda) * (k - 1.0) - 1.0 / prob.gamma0,
            b: a_sum * (o.alpha - 2.0) / (api * o.rho_d),
            c: (k - 1.0) * (o.alpha - 2.0) / (api * k * o.rho_tr),
            d: (o.alpha - 1.0) / (api * k * o.rho_tr * o.rho_d),
        }
    }

    #[cfg(test)]
    pub fn zeta(&self, n: f64) -> f64 {
        -(self.a * n + self.b) / (self.c * n + self.d)
    }

    /// N at which ζ(N) reaches `zeta`, or `None` if it never does.
    pub fn n_for(&self, zeta: f64) -> Option<f64> {
        let den = self.a + zeta * self.c;
        (den < 0.0).then(|| -(self.b + zeta * self.d) / den)
    }
}

pub(crate) fn antennas(prob: &ReducedProblem, lambda: f64, k: f64, bounds: (f64, f64)) -> Option<Relaxed> {
    let nc = NConstraint::new(prob, lambda, k);
    let (zlo, zhi) = prob.zeta_window(k);
    // ζ(N) increases from −b/d to −a/c, so the window maps to an N interval
    let lo = bounds.0.max(nc.n_for(zlo)?);
    let hi = bounds.1.min(nc.n_for(zhi).unwrap_or(f64::INFINITY));
    if !(lo <= hi) {
        return None;
    }

    let s = &prob.split;
    let (q_a, q_n) = (s.u0 + s.u_k * k, s.u_n + s.u_kn * k);
    let (r_a, r_n) = (s.v_k * k + s.v_kk * k * k, s.v_kkn * k * k);
    let kr = k / prob.base.tau_c;
    let NConstraint { a, b, c, d } = nc;
    let n2 = -a * q_n + r_n * c;
    let n1 = -a * q_a - b * q_n + r_a * c + r_n * d;
    let n0 = -b * q_a + r_a * d;
    let m1 = -(a + kr * c);
    let m0 = -(b + kr * d);
    let stationary = Poly::new(vec![n1 * m0 - m1 * n0, 2.0 * n2 * m0, n2 * m1]);
    let mut candidates = vec![lo, hi];
    candidates.extend(stationary.real_roots_in(lo, hi));
    let point = best_of(&candidates, |x| prob.evaluate(lambda, x, k))?;
    Some(Relaxed {
        point,
        interval: (lo, hi),
        candidates,
        diagnostics: vec![
            ("stationarity_c2", n2 * m1),
            ("stationarity_c1", 2.0 * n2 * m0),
            ("stationarity_c0", n1 * m0 - m1 * n0),
        ],
    })
}

/// `K/(ζ*τc) = P(K)/Q(K)` on one pilot regime.
pub(crate) struct KRegime {
    pub p: Poly,
    pub q: Poly,
}

impl KRegime {
    /// A fixed at `a_sum`.
    pub fn fixed(prob: &ReducedProblem, lambda: f64, n: f64, a_sum: f64) -> Self {
        let o = &prob.base;
        let beta = (o.alpha - 2.0) / (o.alpha * PI * n * o.rho_d);
        let t = Poly::linear(-(o.alpha - 2.0) + (o.alpha - 1.0) / (n * o.rho_d), o.alpha - 2.0);
        let g = Poly::linear(1.0 / prob.gamma0 + lambda + a_sum - a_sum * beta, -lambda - a_sum);
        KRegime { p: t, q: g.scale(o.tau_c * o.alpha * PI * o.rho_tr) }
    }

    /// A from the Welch bound with training length `tau` (unclamped).
    pub fn welch(prob: &ReducedProblem, lambda: f64, n: f64, tau: f64) -> Self {
        let o = &prob.base;
        let beta = (o.alpha - 2.0) / (o.alpha * PI * n * o.rho_d);
        let t = Poly::linear(-(o.alpha - 2.0) + (o.alpha - 1.0) / (n * o.rho_d), o.alpha - 2.0);
        let tk = Poly::linear(-2.0 * tau, tau);
        let w = Poly::linear(-3.0 * tau - 1.0, tau + 1.0);
        let g = &(&Poly::linear(1.0 / prob.gamma0 + lambda, -lambda) * &tk) - &(&w * &Poly::linear(beta - 1.0, 1.0));
        KRegime { p: &t * &tk, q: g.scale(o.tau_c * o.alpha * PI * o.rho_tr) }
    }

    /// Numerator of dJ/dK for `J = (u₀Q + u₁KQ + τc(w₁+w₂K)P)/(K(Q−P))`.
    pub fn stationarity(&self, prob: &ReducedProblem, n: f64) -> Poly {
        let s = &prob.split;
        let tau_c = prob.base.tau_c;
        let u0 = s.u0 + s.u_n * n;
        let u1 = s.u_k + s.u_kn * n;
        let (w1, w2) = (s.v_k, s.v_kk + s.v_kkn * n);
        let num = &(&self.q * &Poly::linear(u0, u1)) + &(&self.p * &Poly::linear(tau_c * w1, tau_c * w2));
        let den = &Poly::linear(0.0, 1.0) * &(&self.q - &self.p);
        &(&num.derivative() * &den) - &(&num * &den.derivative())
    }

    /// Polynomials whose roots are the edges of the feasible set.
    pub fn boundaries(&self, tau_c: f64) -> [Poly; 4] {
        let ptc = self.p.scale(tau_c);
        [
            &ptc - &self.q,
            &ptc - &(&Poly::linear(0.0, 1.0) * &self.q),
            &self.p - &self.q,
            self.q.clone(),
        ]
    }
}

pub(crate) struct UsersSolve {
    pub relaxed: Option<Relaxed>,
    /// Stationarity polynomial of the regime containing most of the range,
    /// padded to six coefficients.
    pub p: [f64; 6],
    pub roots: Vec<f64>,
    pub max_root_residual: f64,
}

pub(crate) fn users(prob: &ReducedProblem, lambda: f64, n: f64, bounds: (f64, f64)) -> UsersSolve {
    let (lo, hi) = bounds;
    let mut regimes: Vec<(KRegime, f64, f64)> = Vec::new();
    match prob.coupling {
        PilotCoupling::Fixed => regimes.push((KRegime::fixed(prob, lambda, n, prob.base.a), lo, hi)),
        PilotCoupling::Welch { tau_tr } => {
            let split = tau_tr + 1.0;
            regimes.push((KRegime::fixed(prob, lambda, n, 1.0), lo, hi.min(split)));
            regimes.push((KRegime::welch(prob, lambda, n, tau_tr), lo.max(split), hi));
        }
    }

    let mut candidates = vec![lo, hi];
    let mut roots = Vec::new();
    let mut max_residual: f64 = 0.0;
    let mut p = [0.0; 6];
    let mut widest = -1.0;
    for (regime, a, b) in &regimes {
        if !(a <= b) {
            continue;
        }
        candidates.extend([*a, *b]);
        let stat = regime.stationarity(prob, n);
        if b - a > widest {
            widest = b - a;
            p = [0.0; 6];
            for (slot, c) in p.iter_mut().zip(stat.coeffs()) {
                *slot = *c;
            }
        }
        for r in stat.real_roots_in(*a, *b) {
            let scale = stat.term_scale(r);
            if scale > 0.0 {
                max_residual = max_residual.max(stat.eval(r).abs() / scale);
            }
            roots.push(r);
            candidates.push(r);
        }
        for edge in regime.boundaries(prob.base.tau_c) {
            candidates.extend(edge.real_roots_in(*a, *b));
        }
    }
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    let relaxed = best_of(&candidates, |k| prob.evaluate(lambda, n, k)).map(|point| Relaxed {
        point,
        interval: (lo, hi),
        candidates: candidates.clone(),
        diagnostics: Vec::new(),
    });
    UsersSolve { relaxed, p, roots, max_root_residual: max_residual }
}

/// Better of the two integers around `x` (ties to the smaller), within `[lo, hi]`.
pub(crate) fn round_to_integer<F: Fn(f64) -> ReducedPoint>(x: f64, lo: f64, hi: f64, eval: F) -> Option<ReducedPoint> {
    let f = x.floor().clamp(lo, hi);
    let c = x.ceil().clamp(lo, hi);
    best_of(&[f, c], eval)
}
