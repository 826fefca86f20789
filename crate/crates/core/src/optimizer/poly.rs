//! Dense real polynomials and their real roots on an interval.
//!
//! Roots are isolated by recursion on the derivative: the real roots of
//! `p'` split the interval into pieces on which `p` is monotone, so each
//! piece holds at most one root and a sign change brackets it. Bracketed
//! roots are refined by plain bisection down to adjacent floating-point
//! numbers.

use std::ops::{Add, Mul, Sub};

/// Polynomial with coefficients in ascending order: `c[0] + c[1]x + ...`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly(Vec<f64>);

impl Poly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Poly(coeffs)
    }

    pub fn constant(c: f64) -> Self {
        Poly::new(vec![c])
    }

    /// `a + b x`
    pub fn linear(a: f64, b: f64) -> Self {
        Poly::new(vec![a, b])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.0
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| i as f64 * c)
                .collect(),
        )
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly::new(self.0.iter().map(|c| c * s).collect())
    }

    /// `max_i |c_i x^i|`, the scale against which a residual at `x` is judged.
    pub fn term_scale(&self, x: f64) -> f64 {
        let mut xi = 1.0;
        let mut m: f64 = 0.0;
        for &c in &self.0 {
            m = m.max((c * xi).abs());
            xi *= x;
        }
        m
    }

    /// Real roots in `[lo, hi]`, ascending.
    pub fn real_roots_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        if self.is_zero() || !(lo <= hi) {
            return Vec::new();
        }
        if self.degree() == 0 {
            return Vec::new();
        }
        if self.degree() == 1 {
            let r = -self.0[0] / self.0[1];
            return if (lo..=hi).contains(&r) { vec![r] } else { Vec::new() };
        }

        let mut knots = vec![lo];
        knots.extend(self.derivative().real_roots_in(lo, hi));
        knots.push(hi);

        let mut roots: Vec<f64> = Vec::new();
        let push = |r: f64, roots: &mut Vec<f64>| {
            if roots.last().is_none_or(|&last| r > last) {
                roots.push(r);
            }
        };
        for w in knots.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (fa, fb) = (self.eval(a), self.eval(b));
            if fa == 0.0 || self.is_touching_root(a) {
                push(a, &mut roots);
            }
            if fa.signum() * fb.signum() < 0.0 {
                push(self.bisect(a, b, fa), &mut roots);
            }
        }
        if self.eval(hi) == 0.0 || self.is_touching_root(hi) {
            push(hi, &mut roots);
        }
        roots
    }

    // A root of even multiplicity has no sign change; it shows up as a
    // critical point where p vanishes to rounding.
    fn is_touching_root(&self, x: f64) -> bool {
        self.eval(x).abs() <= 1e-13 * self.term_scale(x) && self.derivative().eval(x).abs() <= 1e-8 * self.derivative().term_scale(x)
    }

    fn bisect(&self, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
        loop {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                return if self.eval(a).abs() <= self.eval(b).abs() { a } else { b };
            }
            let fm = self.eval(m);
            if fm == 0.0 {
                return m;
            }
            if fm.signum() == fa.signum() {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.0.len().max(rhs.0.len());
        Poly::new(
            (0..n)
                .map(|i| self.0.get(i).unwrap_or(&0.0) + rhs.0.get(i).unwrap_or(&0.0))
                .collect(),
        )
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &rhs.scale(-1.0)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::default();
        }
        let mut out = vec![0.0; self.0.len() + rhs.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in rhs.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}
