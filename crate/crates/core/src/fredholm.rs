//! Fredholm determinants det(I − ξK_J) on intervals by Nyström discretization,
//! counting distributions, Toeplitz asymptotics, the momentum-space
//! (integrable) form of the fermion determinant and σ-form checks.

use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::KernelFamily;
use crate::quad::GaussLegendre;
use crate::spectral_limits::{
    fermi, fermion_breaks_to, fermion_density, thermo_pressure, CorrelationKernel,
};

/// Doubling the node count must move the determinant by less than this.
pub const DET_GATE: f64 = 1e-10;
pub const MAX_DOUBLINGS: usize = 4;
pub const DEFAULT_ORDER: usize = 32;
pub const MIN_ORDER: usize = 8;
/// Fermi weight at the momentum-space truncation point.
pub const MOMENTUM_CUTOFF: f64 = 1e-14;
/// Finite-difference step for the σ checks.
pub const SIGMA_STEP: f64 = 1e-2;

const EIG_SLACK: f64 = 1e-8;
const HERMITIAN_TOL: f64 = 1e-10;
const COUNT_SLACK: f64 = 1e-8;
const NEGATIVE_SLACK: f64 = 1e-10;
const STENCIL_AGREEMENT: f64 = 0.1;
const PDE_AGREEMENT: f64 = 0.5;
const DERIVATIVE_FLOOR: f64 = 1e-9;

/// A kernel restricted to J = (a, b), a ξ, and a starting quadrature order.
#[derive(Debug, Clone)]
pub struct FredholmProblem {
    kernel: CorrelationKernel,
    a: f64,
    b: f64,
    xi: f64,
    order: usize,
}

impl FredholmProblem {
    pub fn new(kernel: CorrelationKernel, a: f64, b: f64, xi: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(Error::invalid(format!("interval ({a}, {b}) must satisfy b > a")));
        }
        check_xi(xi)?;
        Ok(FredholmProblem { kernel, a, b, xi, order: DEFAULT_ORDER })
    }

    pub fn with_order(mut self, n: usize) -> Result<Self> {
        if n < MIN_ORDER {
            return Err(Error::invalid(format!("quadrature order must be at least {MIN_ORDER}")));
        }
        self.order = n;
        Ok(self)
    }

    pub fn with_xi(mut self, xi: f64) -> Result<Self> {
        check_xi(xi)?;
        self.xi = xi;
        Ok(self)
    }

    pub fn kernel(&self) -> &CorrelationKernel {
        &self.kernel
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn order(&self) -> usize {
        self.order
    }
}

fn check_xi(xi: f64) -> Result<()> {
    if (0.0..=1.0).contains(&xi) {
        Ok(())
    } else {
        Err(Error::invalid(format!("xi must lie in [0, 1] (got {xi})")))
    }
}

/// Converged Nyström eigenvalues (descending) and the order that produced them.
#[derive(Debug, Clone)]
pub struct NystromSpectrum {
    pub eigenvalues: Vec<f64>,
    pub order: usize,
}

impl NystromSpectrum {
    /// Π_j (1 − ξλ_j).
    pub fn det(&self, xi: f64) -> f64 {
        self.eigenvalues.iter().map(|l| 1.0 - xi * l).product()
    }

    pub fn trace(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }
}

/// Eigenvalues of [√w_i k(x_i, x_j) √w_j] for a Hermitian k.
fn hermitian_eigenvalues(
    nodes: &[f64],
    weights: &[f64],
    real: bool,
    k: impl Fn(f64, f64) -> Complex64,
) -> Result<Vec<f64>> {
    let n = nodes.len();
    let sw: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    let a = DMatrix::from_fn(n, n, |i, j| k(nodes[i], nodes[j]) * (sw[i] * sw[j]));
    let scale = a.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let asym = (0..n)
        .flat_map(|i| (0..i).map(move |j| (i, j)))
        .map(|(i, j)| (a[(i, j)] - a[(j, i)].conj()).norm())
        .fold(0.0, f64::max);
    if asym > HERMITIAN_TOL * scale.max(1.0) {
        return Err(Error::NotHermitian(asym));
    }
    let mut vals: Vec<f64> = if real {
        let m = DMatrix::from_fn(n, n, |i, j| 0.5 * (a[(i, j)].re + a[(j, i)].re));
        m.symmetric_eigen().eigenvalues.iter().copied().collect()
    } else {
        let m = DMatrix::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)].conj()));
        m.symmetric_eigen().eigenvalues.iter().copied().collect()
    };
    vals.sort_by(|x, y| y.total_cmp(x));
    if let Some(bad) = vals.iter().find(|l| !(**l > -EIG_SLACK && **l < 1.0 + EIG_SLACK)) {
        return Err(Error::Numerical(format!(
            "Nyström eigenvalue {bad} outside (-{EIG_SLACK:e}, 1 + {EIG_SLACK:e})"
        )));
    }
    Ok(vals)
}

/// Doubles the order from `n0` until the determinants at ξ and at ξ = 1 move
/// by less than [`DET_GATE`].
fn converge(
    n0: usize,
    xi: f64,
    eig: impl Fn(usize) -> Result<Vec<f64>>,
) -> Result<NystromSpectrum> {
    let mut n = n0;
    let mut prev = NystromSpectrum { eigenvalues: eig(n)?, order: n };
    let mut change = f64::INFINITY;
    for _ in 0..MAX_DOUBLINGS {
        n *= 2;
        let next = NystromSpectrum { eigenvalues: eig(n)?, order: n };
        change = (next.det(xi) - prev.det(xi)).abs().max((next.det(1.0) - prev.det(1.0)).abs());
        if change < DET_GATE {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::NystromNonConvergence { doublings: MAX_DOUBLINGS, change })
}

fn interval_eigenvalues(kernel: &CorrelationKernel, a: f64, b: f64, n: usize) -> Result<Vec<f64>> {
    let (x, w) = GaussLegendre::cached(n).mapped(a, b);
    hermitian_eigenvalues(&x, &w, kernel.is_real(), |p, q| kernel.value(p, q))
}

/// Nyström eigenvalues of K_J after the convergence gate.
pub fn nystrom(problem: &FredholmProblem) -> Result<NystromSpectrum> {
    converge(problem.order, problem.xi, |n| {
        interval_eigenvalues(&problem.kernel, problem.a, problem.b, n)
    })
}

pub fn nystrom_eigenvalues(problem: &FredholmProblem) -> Result<Vec<f64>> {
    Ok(nystrom(problem)?.eigenvalues)
}

/// det(I − ξK_J) = Π_j (1 − ξλ_j^{(J)}).
pub fn fredholm_det(problem: &FredholmProblem) -> Result<f64> {
    Ok(nystrom(problem)?.det(problem.xi))
}

/// E(0; J) = det(I − K_J), whatever ξ the problem carries.
pub fn gap_probability(problem: &FredholmProblem) -> Result<f64> {
    fredholm_det(&problem.clone().with_xi(1.0)?)
}

/// E(n; J) for n = 0, …, n_max and the mass beyond n_max.
#[derive(Debug, Clone, PartialEq)]
pub struct CountingDistribution {
    probabilities: Vec<f64>,
    tail: f64,
}

impl CountingDistribution {
    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn get(&self, n: usize) -> Option<f64> {
        self.probabilities.get(n).copied()
    }

    pub fn n_max(&self) -> usize {
        self.probabilities.len() - 1
    }

    /// 1 − Σ_{n ≤ n_max} E(n; J).
    pub fn tail(&self) -> f64 {
        self.tail
    }

    pub fn mean(&self) -> f64 {
        self.probabilities.iter().enumerate().map(|(n, p)| n as f64 * p).sum()
    }
}

/// Coefficients of Π_j ((1 − λ_j) + ηλ_j) in η.
fn counting_polynomial(eigenvalues: &[f64]) -> Vec<f64> {
    let mut poly = vec![1.0];
    for &l in eigenvalues {
        let mut next = vec![0.0; poly.len() + 1];
        for (k, c) in poly.iter().enumerate() {
            next[k] += c * (1.0 - l);
            next[k + 1] += c * l;
        }
        poly = next;
    }
    poly
}

/// E(n; J) as the coefficient of η^n, η = 1 − ξ, in det(I − ξK_J).
pub fn counting_distribution(problem: &FredholmProblem, n_max: usize) -> Result<CountingDistribution> {
    let spec = nystrom(problem)?;
    if n_max > spec.order {
        return Err(Error::invalid(format!(
            "n_max = {n_max} exceeds the {} quadrature nodes",
            spec.order
        )));
    }
    let mut poly = counting_polynomial(&spec.eigenvalues);
    poly.truncate(n_max + 1);
    let total: f64 = poly.iter().sum();
    if total > 1.0 + COUNT_SLACK || poly.iter().any(|p| *p < -NEGATIVE_SLACK) {
        return Err(Error::Numerical(format!(
            "counting probabilities out of range (sum {total})"
        )));
    }
    Ok(CountingDistribution { probabilities: poly, tail: 1.0 - total })
}

/// Large-|J| form exp(|J| ∫ log(1 − ξ zλ/(1 + zλ)) ds). Since
/// 1 − ξzλ/(1 + zλ) = (1 + (1 − ξ)zλ)/(1 + zλ) the exponent is
/// |J| (βP(z(1 − ξ)) − βP(z)), which is −|J|βP at ξ = 1.
pub fn gap_asymptote(family: &KernelFamily, z: f64, length: f64, xi: f64) -> Result<f64> {
    check_xi(xi)?;
    if !(length >= 0.0 && length.is_finite()) {
        return Err(Error::invalid("interval length must be nonnegative"));
    }
    let bp = thermo_pressure(family, z)?;
    let bp_thinned = if xi == 1.0 { 0.0 } else { thermo_pressure(family, z * (1.0 - xi))? };
    Ok((length * (bp_thinned - bp)).exp())
}

/// Momentum-space truncation of K̃ for the fermion kernel on (−x, x):
/// nodes on [−k_max, k_max] with pieces split at the Fermi edges.
#[derive(Debug, Clone)]
struct MomentumGrid {
    breaks: Vec<f64>,
}

impl MomentumGrid {
    fn new(beta: f64, mu: f64) -> Result<Self> {
        let half = fermion_breaks_to(beta, mu, MOMENTUM_CUTOFF);
        let kmax = half[half.len() - 1];
        if !(kmax > 0.0 && kmax.is_finite()) {
            return Err(Error::Truncation(format!(
                "Fermi weight never drops below {MOMENTUM_CUTOFF:e} (beta = {beta}, mu = {mu})"
            )));
        }
        let mut breaks: Vec<f64> = half.iter().rev().map(|k| -k).collect();
        breaks.extend(half.iter().skip(1));
        Ok(MomentumGrid { breaks })
    }

    fn span(&self) -> f64 {
        self.breaks[self.breaks.len() - 1] - self.breaks[0]
    }

    /// Roughly n nodes shared among the pieces in proportion to their length.
    fn nodes(&self, n: usize) -> (Vec<f64>, Vec<f64>) {
        let span = self.span();
        let (mut x, mut w) = (Vec::new(), Vec::new());
        for p in self.breaks.windows(2) {
            let m = ((n as f64 * (p[1] - p[0]) / span).ceil() as usize).max(MIN_ORDER);
            let (px, pw) = GaussLegendre::cached(m).mapped(p[0], p[1]);
            x.extend(px);
            w.extend(pw);
        }
        (x, w)
    }
}

/// sin(xd)/(πd), equal to x/π at d = 0.
fn sinc_kernel(x: f64, d: f64) -> f64 {
    let u = x * d;
    if u.abs() < 1e-6 {
        x / PI * (1.0 - u * u / 6.0)
    } else {
        u.sin() / (PI * d)
    }
}

fn check_fermion(beta: f64, mu: f64, x: f64) -> Result<()> {
    if !(beta > 0.0 && beta.is_finite() && mu.is_finite()) {
        return Err(Error::invalid("need beta > 0 and finite mu"));
    }
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::invalid(format!("half-width x must be positive (got {x})")));
    }
    Ok(())
}

fn momentum_n0(grid: &MomentumGrid, x: f64) -> usize {
    // about two nodes per half oscillation of sin(x(k − s)) across the span
    DEFAULT_ORDER.max((2.0 * grid.span() * x / PI).ceil() as usize)
}

fn momentum_eigenvalues(grid: &MomentumGrid, beta: f64, mu: f64, x: f64, n: usize) -> Result<Vec<f64>> {
    let (k, w) = grid.nodes(n);
    let sf: Vec<f64> = k.iter().map(|k| fermi(beta, mu, *k).sqrt()).collect();
    let index: HashMap<u64, usize> = k.iter().enumerate().map(|(i, k)| (k.to_bits(), i)).collect();
    hermitian_eigenvalues(&k, &w, true, |p, q| {
        let (i, j) = (index[&p.to_bits()], index[&q.to_bits()]);
        Complex64::new(sf[i] * sinc_kernel(x, p - q) * sf[j], 0.0)
    })
}

/// Fermion determinant on (−x, x) computed directly and through the momentum
/// kernel √F(k) sin(x(k − s))/(π(k − s)) √F(s) on the real line.
pub fn iik_equivalence(beta: f64, mu: f64, x: f64, xi: f64) -> Result<(f64, f64)> {
    check_fermion(beta, mu, x)?;
    check_xi(xi)?;
    let kernel = CorrelationKernel::fermion(beta, mu, 2.0 * x)?;
    let n0 = DEFAULT_ORDER.max((2.0 * x * fermion_breaks_to(beta, mu, MOMENTUM_CUTOFF)[1] / PI).ceil() as usize);
    let direct = converge(n0, xi, |n| interval_eigenvalues(&kernel, -x, x, n))?.det(xi);
    Ok((direct, momentum_det(beta, mu, x, xi)?))
}

/// det(I − ξK̃) through the momentum route alone.
pub fn momentum_det(beta: f64, mu: f64, x: f64, xi: f64) -> Result<f64> {
    check_fermion(beta, mu, x)?;
    check_xi(xi)?;
    let grid = MomentumGrid::new(beta, mu)?;
    let spec = converge(momentum_n0(&grid, x), xi, |n| momentum_eigenvalues(&grid, beta, mu, x, n))?;
    Ok(spec.det(xi))
}

/// I(t) = ∫ dλ / (1 + e^{λ² − t}).
pub fn fermi_line_integral(t: f64) -> Result<f64> {
    Ok(2.0 * PI * fermion_density(1.0, t)?)
}

/// Coefficients (c₁, c₂) of σ(x, t, ξ) = c₁x + c₂x² + O(x³):
/// c₁ = −ξI(t)/π, c₂ = −ξ²I(t)²/(2π²).
pub fn sigma_expansion_coefficients(t: f64, xi: f64) -> Result<(f64, f64)> {
    let i = fermi_line_integral(t)?;
    Ok((-xi * i / PI, -xi * xi * i * i / (2.0 * PI * PI)))
}

/// σ(x, t, ξ) = log det(I − ξK̃) at β = 1, μ = t, through the momentum route.
pub fn sigma(x: f64, t: f64, xi: f64) -> Result<f64> {
    if x == 0.0 {
        return Ok(0.0);
    }
    Ok(momentum_det(1.0, t, x, xi)?.ln())
}

/// Largest |σ(x) − c₁x − c₂x²| over the grid (each x in [0, 0.05]).
pub fn sigma_small_x_check(t: f64, xi: f64, x_grid: &[f64]) -> Result<f64> {
    check_xi(xi)?;
    if let Some(x) = x_grid.iter().find(|x| !(0.0..=0.05).contains(*x)) {
        return Err(Error::invalid(format!("small-x check needs 0 <= x <= 0.05 (got {x})")));
    }
    let (c1, c2) = sigma_expansion_coefficients(t, xi)?;
    x_grid.iter().try_fold(0.0f64, |acc, &x| {
        Ok(acc.max((sigma(x, t, xi)? - c1 * x - c2 * x * x).abs()))
    })
}

/// First, second and third derivatives from the 5-point stencil f(x + kh), k = −2..=2.
fn stencil(f: &[f64; 5], h: f64) -> [f64; 3] {
    let [m2, m1, z, p1, p2] = *f;
    [
        (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h),
        (-m2 + 16.0 * m1 - 30.0 * z + 16.0 * p1 - p2) / (12.0 * h * h),
        (-m2 + 2.0 * m1 - 2.0 * p1 + p2) / (2.0 * h * h * h),
    ]
}

fn agree(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()) + DERIVATIVE_FLOOR
}

/// Richardson-combined estimate from steps h and h/2 with leading error O(h^p).
fn richardson(coarse: f64, fine: f64, p: i32) -> f64 {
    fine + (fine - coarse) / (2f64.powi(p) - 1.0)
}

/// log det(I − ξK) for sin(τ(X − Y))/(π(X − Y)) on (−1, 1) with n nodes.
fn sine_log_det(tau: f64, xi: f64, n: usize) -> Result<f64> {
    let kernel = CorrelationKernel::sine(tau)?;
    let eig = interval_eigenvalues(&kernel, -1.0, 1.0, n)?;
    Ok(eig.iter().map(|l| (1.0 - xi * l).ln()).sum())
}

/// Normalized residual of (τσ₀″)² + 4(τσ₀′ − σ₀)(4τσ₀′ + (σ₀′)² − 4σ₀) with
/// σ₀(τ) = τ d/dτ log det(I − ξK^{(τ, sine)}_{(−1,1)}), divided by (τσ₀″)² + 1.
pub fn sine_sigma_ode_residual(tau_grid: &[f64], xi: f64) -> Result<Vec<f64>> {
    check_xi(xi)?;
    let h = SIGMA_STEP;
    if let Some(t) = tau_grid.iter().find(|t| !(**t > 2.0 * h && t.is_finite())) {
        return Err(Error::invalid(format!("tau must exceed {} (got {t})", 2.0 * h)));
    }
    if tau_grid.is_empty() {
        return Ok(vec![]);
    }
    // one node count for every stencil point keeps the rounding smooth in τ
    let tmax = tau_grid.iter().copied().fold(0.0, f64::max) + 2.0 * h;
    let kernel = CorrelationKernel::sine(tmax)?;
    let n = converge(DEFAULT_ORDER, xi, |n| interval_eigenvalues(&kernel, -1.0, 1.0, n))?.order;
    tau_grid
        .par_iter()
        .map(|&tau| {
            let eval = |step: f64| -> Result<[f64; 3]> {
                let mut f = [0.0; 5];
                for (k, v) in f.iter_mut().enumerate() {
                    *v = sine_log_det(tau + (k as f64 - 2.0) * step, xi, n)?;
                }
                Ok(stencil(&f, step))
            };
            let (c, f) = (eval(h)?, eval(h / 2.0)?);
            if !(0..3).all(|i| agree(c[i], f[i], STENCIL_AGREEMENT)) {
                return Err(Error::Numerical(format!(
                    "finite differences of log det disagree under step halving at tau = {tau}"
                )));
            }
            let d1 = richardson(c[0], f[0], 4);
            let d2 = richardson(c[1], f[1], 4);
            let d3 = richardson(c[2], f[2], 2);
            let s0 = tau * d1;
            let s1 = d1 + tau * d2;
            let s2 = 2.0 * d2 + tau * d3;
            let lhs = (tau * s2).powi(2);
            Ok((lhs + 4.0 * (tau * s1 - s0) * (4.0 * tau * s1 + s1 * s1 - 4.0 * s0)).abs() / (lhs + 1.0))
        })
        .collect()
}

/// One point of the σ PDE diagnostic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdeResidual {
    pub x: f64,
    pub t: f64,
    /// |(∂_t∂_x²σ)² + 4(∂_x²σ)(2x∂_t∂_xσ + (∂_t∂_xσ)² − 2∂_tσ)| / ((∂_t∂_x²σ)² + 1).
    pub normalized: f64,
    /// Set when a derivative changed by more than 50% under step halving.
    pub flagged: bool,
}

/// σ at β = 1 through the direct route with a fixed node count.
struct SigmaGrid {
    xi: f64,
    n: usize,
    max_sep: f64,
    kernels: std::sync::Mutex<HashMap<u64, CorrelationKernel>>,
}

impl SigmaGrid {
    fn kernel(&self, t: f64) -> Result<CorrelationKernel> {
        if let Some(k) = self.kernels.lock().expect("kernel cache poisoned").get(&t.to_bits()) {
            return Ok(k.clone());
        }
        let k = CorrelationKernel::fermion(1.0, t, self.max_sep)?;
        self.kernels
            .lock()
            .expect("kernel cache poisoned")
            .insert(t.to_bits(), k.clone());
        Ok(k)
    }

    fn sigma(&self, x: f64, t: f64) -> Result<f64> {
        let eig = interval_eigenvalues(&self.kernel(t)?, -x, x, self.n)?;
        Ok(eig.iter().map(|l| (1.0 - self.xi * l).ln()).sum())
    }

    /// (∂_tσ, ∂_x²σ, ∂_t∂_xσ, ∂_t∂_x²σ) from a 5 × 5 tensor stencil.
    fn derivatives(&self, x: f64, t: f64, hx: f64, ht: f64) -> Result<[f64; 4]> {
        let mut dx = [[0.0; 3]; 5];
        let mut centre = [0.0; 5];
        for (j, row) in dx.iter_mut().enumerate() {
            let tj = t + (j as f64 - 2.0) * ht;
            let mut f = [0.0; 5];
            for (i, v) in f.iter_mut().enumerate() {
                *v = self.sigma(x + (i as f64 - 2.0) * hx, tj)?;
            }
            centre[j] = f[2];
            *row = stencil(&f, hx);
        }
        let d_t = stencil(&centre, ht)[0];
        let d_tx = stencil(&dx.map(|r| r[0]), ht)[0];
        let d_txx = stencil(&dx.map(|r| r[1]), ht)[0];
        Ok([d_t, dx[2][1], d_tx, d_txx])
    }
}

/// Residual of the σ PDE at every (x, t) in the grids, with steps equal to
/// the grid spacings (at least 2 points per axis) and a half-step refinement.
pub fn sigma_pde_residual(x_grid: &[f64], t_grid: &[f64], xi: f64) -> Result<Vec<PdeResidual>> {
    check_xi(xi)?;
    let spacing = |g: &[f64], name: &str| -> Result<f64> {
        if g.len() < 2 || g.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid(format!("{name} grid needs at least 2 increasing points")));
        }
        Ok(g[1] - g[0])
    };
    let (hx, ht) = (spacing(x_grid, "x")?, spacing(t_grid, "t")?);
    if x_grid[0] - 2.0 * hx <= 0.0 {
        return Err(Error::invalid("x stencil must stay at positive x"));
    }
    let xmax = x_grid[x_grid.len() - 1] + 2.0 * hx;
    let tmax = t_grid[t_grid.len() - 1] + 2.0 * ht;
    let fk = CorrelationKernel::fermion(1.0, tmax, 2.0 * xmax)?;
    let n = converge(DEFAULT_ORDER, xi, |n| interval_eigenvalues(&fk, -xmax, xmax, n))?.order;
    let grid = SigmaGrid { xi, n, max_sep: 2.0 * xmax, kernels: Default::default() };
    let points: Vec<(f64, f64)> = t_grid
        .iter()
        .flat_map(|&t| x_grid.iter().map(move |&x| (x, t)))
        .collect();
    points
        .par_iter()
        .map(|&(x, t)| {
            let c = grid.derivatives(x, t, hx, ht)?;
            let f = grid.derivatives(x, t, hx / 2.0, ht / 2.0)?;
            let flagged = !(0..4).all(|i| agree(c[i], f[i], PDE_AGREEMENT));
            let [s_t, s_xx, s_tx, s_txx] = f;
            let lhs = s_txx * s_txx;
            let res = lhs + 4.0 * s_xx * (2.0 * x * s_tx + s_tx * s_tx - 2.0 * s_t);
            Ok(PdeResidual { x, t, normalized: res.abs() / (lhs + 1.0), flagged })
        })
        .collect()
}
