//! Gauss–Legendre rules and composite panel-doubling integration.
//!
//! Every improper integral in the crate is first truncated to a finite range
//! (the caller supplies the cut) and then handed to [`Integrator::integrate`],
//! which doubles the number of panels until two successive estimates agree.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Values that can be accumulated by a quadrature rule.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

/// An n-point Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the rule by Newton iteration on the Legendre recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre order must be positive");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d.is_finite() { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    /// Shared instance for an order, built once per process.
    pub fn cached(n: usize) -> Arc<GaussLegendre> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("quadrature cache poisoned");
        guard
            .entry(n)
            .or_insert_with(|| Arc::new(GaussLegendre::new(n)))
            .clone()
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped onto [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let x = self.nodes.iter().map(|t| mid + half * t).collect();
        let w = self.weights.iter().map(|w| half * w).collect();
        (x, w)
    }

    /// Single-panel integral of `f` over [a, b]; also returns the integral of |f|.
    pub fn integrate<T: QuadValue, F: Fn(f64) -> T>(&self, f: &F, a: f64, b: f64) -> (T, f64) {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = T::zero();
        let mut env = 0.0;
        for (t, w) in self.nodes.iter().zip(&self.weights) {
            let v = f(mid + half * t);
            acc = acc + v * (w * half);
            env += v.magnitude() * w * half.abs();
        }
        (acc, env)
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let (pn, pn1) = if n == 1 { (x, 1.0) } else { (p1, p0) };
    let d = n as f64 * (x * pn - pn1) / (x * x - 1.0);
    (pn, d)
}

/// Composite Gauss–Legendre integration with panel doubling.
#[derive(Debug, Clone, Copy)]
pub struct Integrator {
    pub order: usize,
    pub initial_panels: usize,
    /// Two successive refinements must agree to this relative tolerance.
    pub rel_tol: f64,
    /// Agreement floor relative to the integral of |f| (controls cancellation).
    pub envelope_tol: f64,
    pub abs_tol: f64,
    pub max_doublings: usize,
}

impl Default for Integrator {
    fn default() -> Self {
        Integrator {
            order: 20,
            initial_panels: 2,
            rel_tol: 1e-12,
            envelope_tol: 1e-14,
            abs_tol: 1e-300,
            max_doublings: 12,
        }
    }
}

impl Integrator {
    pub fn with_min_panels(mut self, panels: usize) -> Self {
        self.initial_panels = self.initial_panels.max(panels);
        self
    }

    pub fn with_rel_tol(mut self, tol: f64) -> Self {
        self.rel_tol = tol;
        self
    }

    pub fn with_abs_tol(mut self, tol: f64) -> Self {
        self.abs_tol = tol;
        self
    }

    /// Integrates `f` over [a, b]. Intervals of zero length integrate to zero.
    pub fn integrate<T: QuadValue, F: Fn(f64) -> T>(&self, f: F, a: f64, b: f64) -> Result<T> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::Quadrature(format!("non-finite limits [{a}, {b}]")));
        }
        if a == b {
            return Ok(T::zero());
        }
        let rule = GaussLegendre::cached(self.order);
        let mut panels = self.initial_panels.max(1);
        let (mut prev, _) = composite(&rule, &f, a, b, panels);
        for _ in 0..self.max_doublings {
            panels *= 2;
            let (next, env) = composite(&rule, &f, a, b, panels);
            let diff = (next - prev).magnitude();
            let scale = (self.rel_tol * next.magnitude())
                .max(self.envelope_tol * env)
                .max(self.abs_tol);
            if diff <= scale {
                return Ok(next);
            }
            if !diff.is_finite() {
                return Err(Error::Quadrature(format!(
                    "non-finite integrand on [{a}, {b}]"
                )));
            }
            prev = next;
        }
        Err(Error::Quadrature(format!(
            "no agreement on [{a}, {b}] after {} panels",
            panels
        )))
    }

    /// Integrates over consecutive intervals given by `breaks`, summing the pieces.
    pub fn integrate_pieces<T: QuadValue, F: Fn(f64) -> T>(&self, f: F, breaks: &[f64]) -> Result<T> {
        let mut acc = T::zero();
        for w in breaks.windows(2) {
            acc = acc + self.integrate(&f, w[0], w[1])?;
        }
        Ok(acc)
    }
}

fn composite<T: QuadValue, F: Fn(f64) -> T>(
    rule: &GaussLegendre,
    f: &F,
    a: f64,
    b: f64,
    panels: usize,
) -> (T, f64) {
    let h = (b - a) / panels as f64;
    let mut acc = T::zero();
    let mut env = 0.0;
    for k in 0..panels {
        let lo = a + h * k as f64;
        let hi = if k + 1 == panels { b } else { lo + h };
        let (v, e) = rule.integrate(f, lo, hi);
        acc = acc + v;
        env += e;
    }
    (acc, env)
}

/// Minimum panel count so that no panel spans more than half a period of
/// `cos(omega * x)` over an interval of the given length.
pub fn half_period_panels(length: f64, omega: f64) -> usize {
    let n = (length.abs() * omega.abs() / PI).ceil();
    if n.is_finite() && n >= 1.0 {
        n as usize
    } else {
        1
    }
}

/// Integral with the oscillatory factor split into cosine and sine parts,
/// each integrated on half-period panels: returns ∫ f(x) e^{i ω x} dx.
pub fn integrate_fourier<F: Fn(f64) -> f64>(
    integrator: &Integrator,
    f: F,
    omega: f64,
    a: f64,
    b: f64,
) -> Result<Complex64> {
    let q = integrator.with_min_panels(half_period_panels(b - a, omega));
    let re = q.integrate(|x| f(x) * (omega * x).cos(), a, b)?;
    let im = if omega == 0.0 {
        0.0
    } else {
        q.integrate(|x| f(x) * (omega * x).sin(), a, b)?
    };
    Ok(Complex64::new(re, im))
}

/// Fixed-node quadrature of u ↦ ∫ φ(s) e^{iωus} ds, built once and reused for
/// many separations u with |u| ≤ `max_sep`.
///
/// Each piece between consecutive breakpoints gets enough Gauss–Legendre
/// panels to resolve the oscillation at `max_sep`; the panel count is doubled
/// until two tables agree at probe separations.
#[derive(Debug, Clone)]
pub struct FourierTable {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    omega: f64,
    /// φ even: the table integrates over s ≥ 0 and doubles the cosine part.
    even: bool,
}

impl FourierTable {
    pub fn build<F: Fn(f64) -> f64>(
        phi: F,
        breaks: &[f64],
        omega: f64,
        max_sep: f64,
        even: bool,
        tol: f64,
    ) -> Result<Self> {
        let rule = GaussLegendre::cached(20);
        let make = |scale: usize| {
            let mut nodes = Vec::new();
            let mut weights = Vec::new();
            for w in breaks.windows(2) {
                let (a, b) = (w[0], w[1]);
                if b <= a {
                    continue;
                }
                let panels = half_period_panels(b - a, omega * max_sep).max(2) * scale;
                let h = (b - a) / panels as f64;
                for k in 0..panels {
                    let (x, wt) = rule.mapped(a + h * k as f64, a + h * (k + 1) as f64);
                    for (xi, wi) in x.into_iter().zip(wt) {
                        let v = phi(xi);
                        if v != 0.0 {
                            nodes.push(xi);
                            weights.push(wi * v);
                        }
                    }
                }
            }
            FourierTable {
                nodes,
                weights,
                omega,
                even,
            }
        };
        let probes = [0.0, 0.37 * max_sep, max_sep];
        let mut scale = 1;
        let mut prev = make(scale);
        for _ in 0..8 {
            scale *= 2;
            let next = make(scale);
            let mut diff = 0.0f64;
            let mut mag = 0.0f64;
            for &u in &probes {
                let (a, b) = (prev.eval(u), next.eval(u));
                diff = diff.max((a - b).norm());
                mag = mag.max(b.norm());
            }
            if !diff.is_finite() {
                return Err(Error::Quadrature("non-finite spectral weight".into()));
            }
            if diff <= tol * mag.max(1.0) {
                return Ok(next);
            }
            prev = next;
        }
        Err(Error::Quadrature(format!(
            "Fourier table did not settle with {} nodes",
            prev.nodes.len()
        )))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// ∫ φ(s) e^{iωus} ds (over the full line when the table is even).
    pub fn eval(&self, u: f64) -> Complex64 {
        let w = self.omega * u;
        if self.even {
            let re: f64 = self
                .nodes
                .iter()
                .zip(&self.weights)
                .map(|(s, v)| v * (w * s).cos())
                .sum();
            Complex64::new(2.0 * re, 0.0)
        } else {
            let (mut re, mut im) = (0.0, 0.0);
            for (s, v) in self.nodes.iter().zip(&self.weights) {
                let (sn, cs) = (w * s).sin_cos();
                re += v * cs;
                im += v * sn;
            }
            Complex64::new(re, im)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn low_order_rules_match_tables() {
        let r = GaussLegendre::new(2);
        assert_abs_diff_eq!(r.nodes()[1], 1.0 / 3f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(r.weights()[0], 1.0, epsilon = 1e-15);
        let r = GaussLegendre::new(3);
        assert_abs_diff_eq!(r.nodes()[2], (0.6f64).sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(r.nodes()[1], 0.0, epsilon = 0.0);
        assert_abs_diff_eq!(r.weights()[1], 8.0 / 9.0, epsilon = 1e-15);
    }

    #[test]
    fn weights_sum_to_two_and_integrate_polynomials_exactly() {
        for n in [1, 5, 20, 64, 200] {
            let r = GaussLegendre::new(n);
            let s: f64 = r.weights().iter().sum();
            assert_abs_diff_eq!(s, 2.0, epsilon = 1e-13);
            // x^(2n-2) integrates exactly
            let k = 2 * n as i32 - 2;
            let (v, _) = r.integrate(&|x: f64| x.powi(k), -1.0, 1.0);
            assert_abs_diff_eq!(v, 2.0 / (k as f64 + 1.0), epsilon = 1e-12);
        }
    }

    #[test]
    fn composite_integration_of_gaussian() {
        let q = Integrator::default();
        let v: f64 = q.integrate(|x| (-PI * x * x).exp(), -8.0, 8.0).unwrap();
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn fourier_integral_of_gaussian() {
        // ∫ e^{-π x²} e^{2π i s x} dx = e^{-π s²}
        let q = Integrator::default();
        let s = 1.7;
        let v = integrate_fourier(&q, |x| (-PI * x * x).exp(), 2.0 * PI * s, -8.0, 8.0).unwrap();
        assert_abs_diff_eq!(v.re, (-PI * s * s).exp(), epsilon = 1e-14);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn fourier_table_matches_closed_form() {
        let t = FourierTable::build(|s| (-PI * s * s).exp(), &[0.0, 7.0], 2.0 * PI, 5.0, true, 1e-14)
            .unwrap();
        for u in [0.0, 0.4, 1.9, 5.0] {
            assert_abs_diff_eq!(t.eval(u).re, (-PI * u * u).exp(), epsilon = 1e-14);
        }
    }

    #[test]
    fn zero_length_interval() {
        let q = Integrator::default();
        let v: f64 = q.integrate(|x| x, 2.0, 2.0).unwrap();
        assert_eq!(v, 0.0);
    }
}
