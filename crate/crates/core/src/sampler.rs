//! Exact determinantal sampling on finite tensor-circulant lattices and Monte
//! Carlo estimators built on it.
//!
//! Each replicate first keeps Fourier mode p with probability
//! k_p = zλ_p/(1 + zλ_p), then draws one site per kept mode from the
//! projection kernel of those modes by sequential conditioning.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact_finite::even_dft;
use crate::model::{chord, phase_range, KernelFamily};
use crate::spectral_limits::{ddim_pressure_radial, occupancy};

pub const MAX_SITES: usize = 1 << 20;
/// Conditional intensities below this are treated as degenerate pivots.
pub const PIVOT_TOL: f64 = 1e-12;
pub const MIN_REPS: usize = 100;

const EIGEN_TOL: f64 = -1e-10;
const MAX_DEGENERATE: usize = 1000;
const HOLE_MAX_TAU: f64 = 0.125;
const HOLE_NOISE: f64 = 0.2;

/// A d-dimensional torus of M sites per axis and circumference L per axis.
#[derive(Debug, Clone)]
pub struct TensorLattice {
    d: usize,
    m: usize,
    l: f64,
    z: f64,
    family: KernelFamily,
    /// λ_p in row-major order over the phase range on each axis.
    lambda: Vec<f64>,
    /// k_p in the same order.
    occ: Vec<f64>,
    /// Row-major coordinates of every site, d per site.
    coords: Vec<usize>,
}

impl TensorLattice {
    pub fn new(d: usize, m: usize, l: f64, z: f64, family: KernelFamily) -> Result<Self> {
        match family {
            KernelFamily::Gaussian { .. } if d == 1 => {}
            KernelFamily::GaussianD { d: fd, .. } if fd == d => {}
            _ => return Err(family.unsupported("TensorLattice")),
        }
        if m == 0 {
            return Err(Error::invalid("need at least one site per axis"));
        }
        let sites = (m as u128).checked_pow(d as u32).unwrap_or(u128::MAX);
        if sites > MAX_SITES as u128 {
            return Err(Error::TooLarge { op: "TensorLattice", m: sites.min(usize::MAX as u128) as usize, max: MAX_SITES });
        }
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::invalid(format!("circumference must be positive (got {l})")));
        }
        if !(z >= 0.0 && z.is_finite()) {
            return Err(Error::invalid(format!("fugacity must be nonnegative and finite (got {z})")));
        }
        let lambda = tensor_eigenvalues(d, m, l, &family)?;
        let occ = if z == 0.0 {
            vec![0.0; lambda.len()]
        } else {
            let lz = z.ln();
            lambda.iter().map(|v| occupancy(lz, v.max(0.0))).collect()
        };
        let mut coords = vec![0; lambda.len() * d];
        for (i, c) in coords.chunks_mut(d.max(1)).enumerate() {
            let mut rem = i;
            for a in (0..d).rev() {
                c[a] = rem % m;
                rem /= m;
            }
        }
        Ok(TensorLattice { d, m, l, z, family, lambda, occ, coords })
    }

    /// Lattice whose fugacity τ^d z matches a continuum fugacity z.
    pub fn from_continuum(d: usize, m: usize, l: f64, z: f64, family: KernelFamily) -> Result<Self> {
        let tau = l / m as f64;
        Self::new(d, m, l, z * tau.powi(d as i32), family)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn family(&self) -> &KernelFamily {
        &self.family
    }

    pub fn tau(&self) -> f64 {
        self.l / self.m as f64
    }

    /// z / τ^d.
    pub fn continuum_fugacity(&self) -> f64 {
        self.z / self.tau().powi(self.d as i32)
    }

    pub fn sites(&self) -> usize {
        self.lambda.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.lambda
    }

    /// Phase multi-index of the i-th eigenvalue.
    pub fn phase(&self, i: usize) -> Vec<i64> {
        let first = *phase_range(self.m).start();
        self.coords(i).iter().map(|c| first + *c as i64).collect()
    }

    /// Row-major coordinates of a linear index.
    pub fn coords(&self, i: usize) -> &[usize] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }

    /// Linear index of the site x − y (coordinates mod M).
    fn difference(&self, x: usize, y: usize) -> usize {
        self.coords(x)
            .iter()
            .zip(self.coords(y))
            .fold(0, |acc, (a, b)| acc * self.m + (a + self.m - b) % self.m)
    }

    pub fn linear(&self, site: &[usize]) -> Result<usize> {
        if site.len() != self.d {
            return Err(Error::invalid(format!("expected {} coordinates", self.d)));
        }
        site.iter().try_fold(0usize, |acc, &c| {
            if c >= self.m {
                Err(Error::SiteOutOfRange { site: c, m: self.m })
            } else {
                Ok(acc * self.m + c)
            }
        })
    }

    /// K(x, x + r) = M^{−d} Σ_p k_p cos(2π p·r/M).
    pub fn kernel(&self, r: &[i64]) -> Result<f64> {
        if r.len() != self.d {
            return Err(Error::invalid(format!("expected {} offsets", self.d)));
        }
        let k = &self.occ;
        let mf = self.m as f64;
        let acc: f64 = k
            .iter()
            .enumerate()
            .map(|(i, kp)| {
                let dot: i64 = self.phase(i).iter().zip(r).map(|(p, r)| p * r).sum();
                kp * (2.0 * PI * dot.rem_euclid(self.m as i64) as f64 / mf).cos()
            })
            .sum();
        Ok(acc / self.sites() as f64)
    }

    /// Σ k_p.
    pub fn expected_count(&self) -> f64 {
        self.occ.iter().sum()
    }

    /// Σ k_p (1 − k_p).
    pub fn count_variance(&self) -> f64 {
        self.occ.iter().map(|k| k * (1.0 - k)).sum()
    }
}

/// d-dimensional DFT of the first row, one axis at a time.
fn tensor_eigenvalues(d: usize, m: usize, l: f64, family: &KernelFamily) -> Result<Vec<f64>> {
    let n = m.pow(d as u32);
    let chords: Vec<f64> = (0..m).map(|s| chord(l, m, s.min(m - s) as f64)).collect();
    let mut data = Vec::with_capacity(n);
    let mut u = vec![0.0; d];
    for i in 0..n {
        let mut rem = i;
        for a in (0..d).rev() {
            u[a] = chords[rem % m];
            rem /= m;
        }
        data.push(family.g_vec(&u)?);
    }
    let scale = data.iter().map(|v| v.abs()).sum::<f64>().max(1.0);
    let mut resid = 0.0f64;
    let mut line = vec![0.0; m];
    for a in 0..d {
        let stride = m.pow((d - 1 - a) as u32);
        for start in (0..n).filter(|i| (i / stride) % m == 0) {
            for (k, v) in line.iter_mut().enumerate() {
                *v = data[start + k * stride];
            }
            let (vals, r) = even_dft(&line);
            resid = resid.max(r);
            for (k, v) in vals.into_iter().enumerate() {
                data[start + k * stride] = v;
            }
        }
    }
    if resid > 1e-10 * scale {
        return Err(Error::Numerical(format!("lattice eigenvalues have imaginary residue {resid:e}")));
    }
    let min = data.iter().copied().fold(f64::INFINITY, f64::min);
    if min < EIGEN_TOL * scale {
        return Err(Error::NotPositiveSemidefinite(min));
    }
    Ok(data)
}

/// k_p = zλ_p/(1 + zλ_p), in the order of [`TensorLattice::eigenvalues`].
pub fn bernoulli_probabilities(lattice: &TensorLattice) -> Vec<f64> {
    lattice.occ.clone()
}

/// Sorted distinct occupied sites of one draw.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSample {
    d: usize,
    m: usize,
    indices: Vec<usize>,
    degenerate_pivots: usize,
}

impl PointSample {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Row-major linear site indices, ascending.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn contains(&self, linear: usize) -> bool {
        self.indices.binary_search(&linear).is_ok()
    }

    /// Site multi-indices in lexicographic order.
    pub fn sites(&self) -> Vec<Vec<usize>> {
        self.indices
            .iter()
            .map(|&i| {
                let mut rem = i;
                let mut c = vec![0; self.d];
                for a in (0..self.d).rev() {
                    c[a] = rem % self.m;
                    rem /= self.m;
                }
                c
            })
            .collect()
    }

    /// Draws redone because the conditional intensity at the drawn site was below [`PIVOT_TOL`].
    pub fn degenerate_pivots(&self) -> usize {
        self.degenerate_pivots
    }
}

/// First replicate stream of `seed`.
pub fn sample(lattice: &TensorLattice, seed: u64) -> Result<PointSample> {
    sample_replicate(lattice, seed, 0)
}

/// Replicate `rep` drawn from ChaCha8 stream `rep` of `seed`.
pub fn sample_replicate(lattice: &TensorLattice, seed: u64, rep: u64) -> Result<PointSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep);
    let modes: Vec<usize> = lattice
        .occ
        .iter()
        .enumerate()
        .filter_map(|(i, kp)| (rng.random::<f64>() < *kp).then_some(i))
        .collect();
    let (d, m) = (lattice.d, lattice.m);
    let empty = PointSample { d, m, indices: vec![], degenerate_pivots: 0 };
    if modes.is_empty() {
        return Ok(empty);
    }
    let kappa = projection_kernel(lattice, &modes);
    let n = lattice.sites();
    let mut q = vec![kappa[0].re; n];
    // row j holds the j-th Cholesky column over all sites
    let mut cs: Vec<Complex64> = Vec::with_capacity(modes.len() * n);
    let mut chosen = Vec::with_capacity(modes.len());
    let mut at_x: Vec<Complex64> = Vec::with_capacity(modes.len());
    let mut degenerate = 0;
    for j in 0..modes.len() {
        let x = loop {
            let x = draw_proportional(&q, &mut rng)?;
            if q[x] >= PIVOT_TOL {
                break x;
            }
            degenerate += 1;
            log::warn!("degenerate pivot {:e} at site {x}; redrawing", q[x]);
            if degenerate > MAX_DEGENERATE {
                return Err(Error::Numerical("repeated degenerate pivots while sampling".into()));
            }
        };
        let inv = 1.0 / q[x].sqrt();
        at_x.clear();
        at_x.extend((0..j).map(|l| cs[l * n + x].conj()));
        for y in 0..n {
            let mut v = kappa[lattice.difference(y, x)];
            for (l, cx) in at_x.iter().enumerate() {
                v -= cs[l * n + y] * cx;
            }
            let c = v * inv;
            q[y] -= c.norm_sqr();
            cs.push(c);
        }
        chosen.push(x);
        for &prev in &chosen {
            q[prev] = 0.0;
        }
    }
    chosen.sort_unstable();
    Ok(PointSample { indices: chosen, degenerate_pivots: degenerate, ..empty })
}

/// κ(r) = M^{−d} Σ_{p ∈ modes} e^{2πi p·r/M} over all offsets r (row-major).
fn projection_kernel(lattice: &TensorLattice, modes: &[usize]) -> Vec<Complex64> {
    let (m, n) = (lattice.m, lattice.sites());
    let roots: Vec<Complex64> = (0..m)
        .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / m as f64))
        .collect();
    let mut kappa = vec![Complex64::new(0.0, 0.0); n];
    for &i in modes {
        let p: Vec<usize> = lattice
            .phase(i)
            .iter()
            .map(|p| p.rem_euclid(m as i64) as usize)
            .collect();
        for (r, kr) in kappa.iter_mut().enumerate() {
            let e: usize = lattice.coords(r).iter().zip(&p).map(|(c, p)| c * p).sum();
            *kr += roots[e % m];
        }
    }
    let inv = 1.0 / n as f64;
    kappa.iter_mut().for_each(|v| *v *= inv);
    kappa
}

fn draw_proportional(q: &[f64], rng: &mut ChaCha8Rng) -> Result<usize> {
    let total: f64 = q.iter().map(|v| v.max(0.0)).sum();
    if !(total > 0.0) {
        return Err(Error::Numerical("conditional intensity vanished before all modes were used".into()));
    }
    let mut u = rng.random::<f64>() * total;
    let mut last = 0;
    for (i, v) in q.iter().enumerate() {
        let w = v.max(0.0);
        if w > 0.0 {
            last = i;
            if u < w {
                return Ok(i);
            }
            u -= w;
        }
    }
    Ok(last)
}

/// A Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

impl Estimate {
    /// Sample mean and standard error of the mean.
    pub fn from_values(v: &[f64]) -> Self {
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        Estimate { mean, stderr: (var / n).sqrt() }
    }

    /// |mean − target| / stderr (0 when both the error and the stderr vanish).
    pub fn z_score(&self, target: f64) -> f64 {
        let diff = (self.mean - target).abs();
        if diff == 0.0 {
            0.0
        } else {
            diff / self.stderr
        }
    }

    /// Within k standard errors of `target`.
    pub fn within(&self, target: f64, k: f64) -> bool {
        self.z_score(target) <= k
    }
}

fn check_reps(reps: usize) -> Result<()> {
    if reps < MIN_REPS {
        return Err(Error::invalid(format!("need at least {MIN_REPS} replicates (got {reps})")));
    }
    Ok(())
}

/// Applies `f` to replicates 0..reps in parallel; results come back in replicate order.
pub fn replicates<T: Send>(
    lattice: &TensorLattice,
    reps: usize,
    seed: u64,
    f: impl Fn(&PointSample) -> T + Sync,
) -> Result<Vec<T>> {
    (0..reps as u64)
        .into_par_iter()
        .map(|r| sample_replicate(lattice, seed, r).map(|s| f(&s)))
        .collect()
}

/// Mean occupancy per site.
pub fn estimate_density(lattice: &TensorLattice, reps: usize, seed: u64) -> Result<Estimate> {
    check_reps(reps)?;
    let n = lattice.sites() as f64;
    let v = replicates(lattice, reps, seed, |s| s.len() as f64 / n)?;
    Ok(Estimate::from_values(&v))
}

/// Probability that every listed site is occupied.
pub fn estimate_inclusion(lattice: &TensorLattice, sites: &[Vec<usize>], reps: usize, seed: u64) -> Result<Estimate> {
    check_reps(reps)?;
    let idx = sites.iter().map(|s| lattice.linear(s)).collect::<Result<Vec<_>>>()?;
    let v = replicates(lattice, reps, seed, |s| {
        if idx.iter().all(|i| s.contains(*i)) { 1.0 } else { 0.0 }
    })?;
    Ok(Estimate::from_values(&v))
}

/// ρ₂(x, x + r), averaged over all translates x in each replicate.
pub fn estimate_two_point(lattice: &TensorLattice, separation: &[i64], reps: usize, seed: u64) -> Result<Estimate> {
    check_reps(reps)?;
    if separation.len() != lattice.d {
        return Err(Error::invalid(format!("expected {} offsets", lattice.d)));
    }
    let m = lattice.m as i64;
    let n = lattice.sites() as f64;
    let v = replicates(lattice, reps, seed, |s| {
        let hits = s
            .sites()
            .iter()
            .filter(|x| {
                let y: Vec<usize> = x
                    .iter()
                    .zip(separation)
                    .map(|(a, r)| (*a as i64 + r).rem_euclid(m) as usize)
                    .collect();
                lattice.linear(&y).map(|i| s.contains(i)).unwrap_or(false)
            })
            .count();
        hits as f64 / n
    })?;
    Ok(Estimate::from_values(&v))
}

fn in_block(site: &[usize], block: &[usize]) -> bool {
    site.iter().zip(block).all(|(c, b)| c < b)
}

fn check_block(lattice: &TensorLattice, block: &[usize]) -> Result<()> {
    if block.len() != lattice.d || block.iter().any(|b| *b == 0 || *b > lattice.m) {
        return Err(Error::invalid(format!(
            "block needs {} side lengths in 1..={}",
            lattice.d, lattice.m
        )));
    }
    Ok(())
}

/// E(0; block) for the block of sites [0, b_1) × … × [0, b_d).
pub fn estimate_gap(lattice: &TensorLattice, block: &[usize], reps: usize, seed: u64) -> Result<Estimate> {
    check_reps(reps)?;
    check_block(lattice, block)?;
    let v = replicates(lattice, reps, seed, |s| {
        if s.sites().iter().any(|x| in_block(x, block)) { 0.0 } else { 1.0 }
    })?;
    Ok(Estimate::from_values(&v))
}

/// Sample-size mean and variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CardinalityEstimate {
    pub mean: Estimate,
    pub variance: Estimate,
}

pub fn estimate_cardinality(lattice: &TensorLattice, reps: usize, seed: u64) -> Result<CardinalityEstimate> {
    check_reps(reps)?;
    let v = replicates(lattice, reps, seed, |s| s.len() as f64)?;
    let mean = Estimate::from_values(&v);
    let n = v.len() as f64;
    let m2 = v.iter().map(|x| (x - mean.mean).powi(2)).sum::<f64>() / n;
    let m4 = v.iter().map(|x| (x - mean.mean).powi(4)).sum::<f64>() / n;
    let variance = Estimate { mean: m2 * n / (n - 1.0), stderr: ((m4 - m2 * m2).max(0.0) / n).sqrt() };
    Ok(CardinalityEstimate { mean, variance })
}

/// One row of the hole-probability comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoleRow {
    /// Block side in sites.
    pub side: usize,
    pub sites: usize,
    /// Block area in continuum units, sites · τ^d.
    pub area: f64,
    pub gap: Estimate,
    /// −log Ê(0, Λ)/|Λ| and its delta-method standard error; `None` when Ê = 0.
    pub rate: Option<Estimate>,
    /// Continuum βP at the lattice's continuum fugacity.
    pub pressure: f64,
    /// rate / βP; `None` when either is unavailable or βP = 0.
    pub ratio: Option<f64>,
    /// The rate's standard error exceeds 20% of the rate.
    pub insufficient: bool,
}

/// Compares −log Ê(0, Λ)/|Λ| with βP for nested square blocks of a d = 2
/// Gaussian lattice with τ ≤ 1/8. One set of samples serves every block.
pub fn hole_probability_check(lattice: &TensorLattice, sides: &[usize], reps: usize, seed: u64) -> Result<Vec<HoleRow>> {
    check_reps(reps)?;
    let c = match lattice.family {
        KernelFamily::GaussianD { c, d: 2 } => c,
        _ => return Err(lattice.family.unsupported("hole_probability_check (d = 2 Gaussian)")),
    };
    if lattice.tau() > HOLE_MAX_TAU {
        return Err(Error::invalid(format!("lattice spacing must be at most {HOLE_MAX_TAU}")));
    }
    for &b in sides {
        check_block(lattice, &[b, b])?;
    }
    let pressure = ddim_pressure_radial(c, 2, lattice.continuum_fugacity())?;
    // per replicate: the smallest block side that contains a point (m + 1 if none)
    let m = lattice.m;
    let reach = replicates(lattice, reps, seed, |s| {
        s.sites().iter().map(|x| x[0].max(x[1]) + 1).min().unwrap_or(m + 1)
    })?;
    let cell = lattice.tau().powi(2);
    Ok(sides
        .iter()
        .map(|&b| {
            let v: Vec<f64> = reach.iter().map(|r| if *r > b { 1.0 } else { 0.0 }).collect();
            let gap = Estimate::from_values(&v);
            let area = (b * b) as f64 * cell;
            let rate = (gap.mean > 0.0).then(|| Estimate {
                mean: -gap.mean.ln() / area,
                stderr: gap.stderr / (gap.mean * area),
            });
            let ratio = rate.filter(|_| pressure > 0.0).map(|r| r.mean / pressure);
            let insufficient = rate.is_none_or(|r| r.stderr > HOLE_NOISE * r.mean.abs());
            HoleRow { side: b, sites: b * b, area, gap, rate, pressure, ratio, insufficient }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_finite::{correlation, FiniteKernel};
    use crate::model::CirculantEnsemble;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn line(m: usize, z: f64) -> TensorLattice {
        TensorLattice::new(1, m, m as f64, z, KernelFamily::gaussian(1.0).unwrap()).unwrap()
    }

    #[test]
    fn rejects_bad_lattices() {
        let g = KernelFamily::gaussian(1.0).unwrap();
        assert!(TensorLattice::new(2, 8, 8.0, 1.0, g.clone()).is_err());
        assert!(TensorLattice::new(1, 0, 8.0, 1.0, g.clone()).is_err());
        assert!(TensorLattice::new(1, 8, 8.0, -1.0, g).is_err());
        let g3 = KernelFamily::gaussian_d(1.0, 3).unwrap();
        assert!(matches!(TensorLattice::new(3, 128, 8.0, 1.0, g3), Err(Error::TooLarge { .. })));
        let gd = KernelFamily::inverse_argument(1.0).unwrap();
        assert!(TensorLattice::new(1, 8, 8.0, 1.0, gd).is_err());
    }

    #[test]
    fn bernoulli_trace_is_kernel_diagonal() {
        let lat = line(64, 1.0);
        let ens = CirculantEnsemble::new(64, 64.0, 1.0, KernelFamily::gaussian(1.0).unwrap()).unwrap();
        let k = FiniteKernel::new(&ens).unwrap();
        let rho = lat.expected_count() / 64.0;
        assert!((rho - k.density()).abs() / rho < 1e-10);
        for r in [0, 3, -5] {
            assert_abs_diff_eq!(lat.kernel(&[r]).unwrap(), k.at_offset(r).re, epsilon = 1e-12);
        }
        assert!(bernoulli_probabilities(&line(16, 0.0)).iter().all(|k| *k == 0.0));
        let big = bernoulli_probabilities(&line(8, 1e12));
        assert!(big.iter().all(|k| *k > 1.0 - 1e-6 && *k < 1.0));
    }

    #[test]
    fn separable_gaussian_eigenvalues() {
        // e^{−π|u|²/c} factorizes, so λ_{p,q} = λ_p λ_q
        let one = line(8, 1.0);
        let two = TensorLattice::new(2, 8, 8.0, 1.0, KernelFamily::gaussian_d(1.0, 2).unwrap()).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                let prod = one.eigenvalues()[i] * one.eigenvalues()[j];
                assert_abs_diff_eq!(two.eigenvalues()[i * 8 + j], prod, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn seeding_is_deterministic() {
        let lat = line(32, 1.0);
        let a = sample(&lat, 7).unwrap();
        assert_eq!(a, sample(&lat, 7).unwrap());
        let many: Vec<_> = (0..20).map(|r| sample_replicate(&lat, 7, r).unwrap()).collect();
        assert!(many.windows(2).any(|w| w[0] != w[1]));
        assert!(sample(&line(32, 0.0), 3).unwrap().is_empty());
    }

    #[test]
    fn zero_fugacity_estimators() {
        let lat = line(16, 0.0);
        let d = estimate_density(&lat, 100, 1).unwrap();
        assert_eq!((d.mean, d.stderr), (0.0, 0.0));
        assert_eq!(estimate_gap(&lat, &[4], 100, 1).unwrap().mean, 1.0);
    }

    #[test]
    fn mean_cardinality() {
        let lat = line(32, 1.0);
        let c = estimate_cardinality(&lat, 20_000, 11).unwrap();
        assert!(c.mean.within(lat.expected_count(), 3.0), "{c:?}");
        assert!(c.variance.within(lat.count_variance(), 3.0), "{c:?}");
    }

    #[test]
    fn singleton_and_pair_inclusion() {
        let lat = line(8, 0.5);
        let ens = CirculantEnsemble::new(8, 8.0, 0.5, KernelFamily::gaussian(1.0).unwrap()).unwrap();
        let one = estimate_inclusion(&lat, &[vec![3]], 200_000, 5).unwrap();
        assert!(one.within(correlation(&ens, &[3]).unwrap().value, 3.0), "{one:?}");
        let lat = line(64, 1.0);
        let ens = CirculantEnsemble::new(64, 64.0, 1.0, KernelFamily::gaussian(1.0).unwrap()).unwrap();
        let two = estimate_two_point(&lat, &[3], 5_000, 9).unwrap();
        assert!(two.within(correlation(&ens, &[0, 3]).unwrap().value, 3.0), "{two:?}");
    }

    #[test]
    fn one_site_gap_is_vacancy() {
        let lat = line(16, 2.0);
        let g = estimate_gap(&lat, &[1], 20_000, 4).unwrap();
        assert!(g.within(1.0 - lat.kernel(&[0]).unwrap(), 3.0), "{g:?}");
    }

    #[test]
    fn hole_rows_are_monotone() {
        let fam = KernelFamily::gaussian_d(4.0 * PI, 2).unwrap();
        let lat = TensorLattice::from_continuum(2, 16, 2.0, 1.0, fam).unwrap();
        let rows = hole_probability_check(&lat, &[1, 4, 8, 16], 2_000, 2).unwrap();
        assert!(rows.windows(2).all(|w| w[1].gap.mean <= w[0].gap.mean));
        let lat0 = TensorLattice::new(2, 16, 2.0, 0.0, KernelFamily::gaussian_d(4.0 * PI, 2).unwrap()).unwrap();
        let rows = hole_probability_check(&lat0, &[2, 4], 100, 2).unwrap();
        assert!(rows.iter().all(|r| r.gap.mean == 1.0 && r.ratio.is_none()));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn samples_are_sorted_distinct(seed in 0u64..1000, z in 0.1f64..20.0) {
            let lat = line(24, z);
            let s = sample(&lat, seed).unwrap();
            prop_assert!(s.indices().windows(2).all(|w| w[0] < w[1]));
            prop_assert!(s.len() <= 24);
        }
    }
}
