//! The published coefficient tables for the λ, N and K optimizers.
//!
//! These are transcribed as printed and evaluated with the SINR target in
//! place of γ, normalized powers inside SINR expressions and watt powers
//! inside power expressions. Several entries do not survive a re-derivation
//! (see the guide's chapter on the optimizers), so the optimizers only
//! report them; the authoritative closed forms live in `closed_form`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::model::{ApcCoefficients, OperatingPoint};
use crate::params::PowerModel;

/// Published optimizer coefficients at one operating point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientTable {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    pub a5: f64,
    pub a6: f64,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub b4: f64,
    pub b5: f64,
    pub b6: f64,
    pub b7: f64,
    pub b8: f64,
    pub c11: f64,
    pub c12: f64,
    pub c22: f64,
    pub d22: f64,
    pub bar_c11: f64,
    pub bar_d11: f64,
    /// e1..e10
    pub e: [f64; 10],
    /// p0..p5
    pub p: [f64; 6],
    pub q1: f64,
    pub q2: f64,
    pub q3: f64,
    /// Q₁ of the ζ* inversion, with its leading K.
    #[serde(rename = "Q1")]
    pub big_q1: f64,
    #[serde(rename = "Q2")]
    pub big_q2: f64,
    #[serde(rename = "G")]
    pub g: f64,
}

/// Closed-form values the published tables lead to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrintedCandidates {
    pub zeta: f64,
    pub lambda0: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub n0: f64,
    pub n1: f64,
    pub n2: f64,
    pub k2: f64,
    pub k11: f64,
    pub k12: f64,
}

impl CoefficientTable {
    pub fn new(op: &OperatingPoint, pm: &PowerModel, gamma0: f64) -> Self {
        let OperatingPoint { n, k, lambda, alpha, rho_tr, rho_d, tau_c, xi, bandwidth: b, a, .. } = *op;
        let g0 = gamma0;
        let c = ApcCoefficients::printed(op, pm);
        let (l, eff, traffic) = (pm.l_ap, pm.amp_eff, pm.traffic_power());
        let (rtr_w, rd_w) = (op.rho_tr_watts, op.rho_d_watts);
        let apn = alpha * PI * n * rho_d;

        let a1 = rho_tr * tau_c * k * (apn - ((alpha - 2.0) + apn) * g0 * a);
        let a2 = alpha * PI * g0 * rho_d * rho_tr * tau_c * k * n * (k - 1.0);
        let a3 = g0 * k * n * rho_d * (alpha - 1.0 + (k - 1.0) * (alpha - 2.0));
        let a4 = c.c0 + c.c1 * k + n * (c.d0 + c.d1 * k);
        let a5 = ((xi - 1.0) * rd_w + k * rtr_w) / eff - 3.0 * b * k * n * xi / l;
        let a6 = traffic;
        let g = a2 * (a4 + a5 + a6 * k * g0.ln_1p());

        let b1 = k * (alpha - 1.0);
        let b2 = rho_d * k * (k - 1.0) * (alpha - 2.0);
        let b3 = alpha * PI * rho_d * rho_tr * tau_c * (1.0 - g0 * (a + lambda) * (k - 1.0));
        let b4 = rho_tr * tau_c * g0 * (alpha - 2.0) * a;
        let c11 = (b / (7.0 * l * tau_c) + pm.p_ue) / lambda;
        let c12 = (rd_w * (1.0 - xi) / eff - c.c0) / lambda;
        let c22 = rtr_w / (eff * lambda);
        let d22 = 3.0 * b * xi / (l * lambda);
        let bar_d11 = (c.d0 + c.d1 * k) / lambda;
        let bar_c11 = c12 - (c11 + c22) * k;
        let b5 = (c.c0 + c.c1 * k) / lambda;
        let b6 = (c.d0 + c.d1 * k - c.d2 * k * k) / lambda;
        let b7 = (c22 - d22 - c12) * k * k / lambda;
        let b8 = traffic / lambda;

        let q1 = b3 * b3 * bar_d11
            + b1 * k * (b1 * d22 * k * k + b4 * bar_c11)
            + b3 * k * b2 * bar_c11
            + b1 * (bar_d11 + d22 * k);
        let cross = b2 * d22 * k * k - b4 * bar_d11;
        let q2 = 2.0 * (b3 + b1 * k) * (b4 - b2 * k) * cross;
        let q3 = q1 * q1 + 4.0 * q2 * cross;

        let tau_tr = op.tau_tr();
        let e1 = g0 * n * rho_d * (alpha - 2.0);
        let e2 = g0 * n * rho_d * (1.0 - 3.0 * (alpha - 2.0));
        let e3 = 2.0 * g0 * (1.0 - alpha) - 2.0 * b1;
        let e4 = -alpha * PI * n * rho_tr * tau_c * rho_d * g0 * (tau_tr + lambda - 1.0);
        let e6 = (alpha - 2.0) * (g0 - 3.0 * tau_tr);
        let e5 = g0 * rho_tr * tau_c * ((alpha - 2.0) * (tau_tr + 1.0) + alpha * PI * n * rho_tr * tau_c * rho_d * (tau_tr + g0))
            - e6;
        let e7 = (c.c0 + c.d0 * n) / lambda;
        let e8 = traffic / lambda;
        let e9 = (c.c2 - c.d2 * n) / lambda;
        let e10 = traffic / lambda;
        let p = [
            e1 - e2,
            (e1 - e2) + 2.0 * e3,
            3.0 * (e3 - 2.0 * e1),
            (e2 + e1) - e1 * e3,
            2.0 * e4 * (e1 - e2),
            (e2 - e1) - e1,
        ];

        let big_q1 = k * rho_tr * ((alpha - 2.0) * a + apn * (k - 1.0) * (a + lambda));
        let big_q2 = (alpha - 1.0 + n * rho_d * (alpha - 2.0) * (k - 1.0)) / k;

        CoefficientTable {
            a1,
            a2,
            a3,
            a4,
            a5,
            a6,
            b1,
            b2,
            b3,
            b4,
            b5,
            b6,
            b7,
            b8,
            c11,
            c12,
            c22,
            d22,
            bar_c11,
            bar_d11,
            e: [e1, e2, e3, e4, e5, e6, e7, e8, e9, e10],
            p,
            q1,
            q2,
            q3,
            big_q1,
            big_q2,
            g,
        }
    }

    /// Names of coefficients that evaluate to NaN or ±inf.
    pub fn non_finite(&self) -> Vec<String> {
        let mut out = Vec::new();
        let named = [
            ("a1", self.a1),
            ("a2", self.a2),
            ("a3", self.a3),
            ("a4", self.a4),
            ("a5", self.a5),
            ("a6", self.a6),
            ("b1", self.b1),
            ("b2", self.b2),
            ("b3", self.b3),
            ("b4", self.b4),
            ("b5", self.b5),
            ("b6", self.b6),
            ("b7", self.b7),
            ("b8", self.b8),
            ("c11", self.c11),
            ("c12", self.c12),
            ("c22", self.c22),
            ("d22", self.d22),
            ("bar_c11", self.bar_c11),
            ("bar_d11", self.bar_d11),
            ("q1", self.q1),
            ("q2", self.q2),
            ("q3", self.q3),
            ("Q1", self.big_q1),
            ("Q2", self.big_q2),
            ("G", self.g),
        ];
        for (name, v) in named {
            if !v.is_finite() {
                out.push(name.to_string());
            }
        }
        for (i, v) in self.e.iter().enumerate() {
            if !v.is_finite() {
                out.push(format!("e{}", i + 1));
            }
        }
        for (i, v) in self.p.iter().enumerate() {
            if !v.is_finite() {
                out.push(format!("p{i}"));
            }
        }
        out
    }

    /// Evaluates the published closed forms. Entries are NaN where a square
    /// root of a negative number or a division by zero occurs.
    pub fn candidates(&self, op: &OperatingPoint, gamma0: f64) -> PrintedCandidates {
        let OperatingPoint { n, k, alpha, rho_tr, rho_d, tau_c, .. } = *op;
        let kt = k / tau_c;
        let [e1, e2, e3, e4, ..] = self.e;
        let disc = (e1 - e2).powi(2) - 4.0 * e3 * e4;
        PrintedCandidates {
            zeta: (alpha * PI * k * n * rho_tr * rho_d - gamma0 * self.big_q1) / (gamma0 * self.big_q2),
            lambda0: ((self.a1 + self.a3) * self.g + (self.a2 * self.a3 * self.a4 * (self.a1 + self.a3) * self.g).sqrt())
                / (self.a2 * self.a4 * self.g),
            lambda1: (self.a3 - self.a1) / self.a2,
            lambda2: (tau_c / (k * self.a3) + self.a1) / self.a2,
            n0: (self.q1 - self.q3.sqrt()) / self.q2,
            n1: (self.b1 + self.b3) / (self.b4 - self.b2),
            n2: (kt * self.b1 + self.b3) / (self.b4 - kt * self.b2),
            k2: (e4 * kt - e2) / (e1 - e3 * kt),
            k11: (-(e1 - e2) - disc.sqrt()) / (2.0 * e4),
            k12: (-(e1 - e2) + disc.sqrt()) / (2.0 * e4),
        }
    }
}
