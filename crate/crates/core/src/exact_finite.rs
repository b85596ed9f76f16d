//! Exact finite-M computations: dense L-ensemble engine, the circulant fast
//! path, correlations and subset-enumeration oracles.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::model::{chord, phase_range, CirculantEnsemble, KernelFamily};

/// Eigenvalues below this are treated as a PSD violation.
pub const PSD_TOL: f64 = -1e-10;
/// Sizes below this use the direct O(M²) transform.
pub const DIRECT_DFT_MAX: usize = 256;
/// Largest M accepted by the subset-enumeration oracles.
pub const BRUTE_FORCE_MAX: usize = 14;

const HERMITIAN_TOL: f64 = 1e-12;

/// A Hermitian positive semidefinite L-matrix.
#[derive(Debug, Clone)]
pub struct LMatrix {
    entries: DMatrix<Complex64>,
    circulant: bool,
}

impl LMatrix {
    /// Validates Hermitian symmetry (1e−12) and positive semidefiniteness (−1e−10).
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() || entries.nrows() == 0 {
            return Err(Error::invalid("L must be a nonempty square matrix"));
        }
        let scale = entries.iter().map(|v| v.norm()).fold(1.0, f64::max);
        let mut dev = 0.0f64;
        for j in 0..entries.nrows() {
            for k in 0..=j {
                dev = dev.max((entries[(j, k)] - entries[(k, j)].conj()).norm());
            }
        }
        if dev > HERMITIAN_TOL * scale {
            return Err(Error::NotHermitian(dev));
        }
        let m = LMatrix {
            entries,
            circulant: false,
        };
        let min = m.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min < PSD_TOL {
            return Err(Error::NotPositiveSemidefinite(min));
        }
        Ok(m)
    }

    pub fn from_real(entries: DMatrix<f64>) -> Result<Self> {
        Self::new(entries.map(|v| Complex64::new(v, 0.0)))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn is_circulant(&self) -> bool {
        self.circulant
    }

    /// Ascending eigenvalues from a dense Hermitian eigensolver.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .entries
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// det(I + zL) by LU with partial pivoting.
    pub fn det_identity_plus(&self, z: f64) -> f64 {
        let n = self.dim();
        let a = DMatrix::<Complex64>::identity(n, n) + &self.entries * Complex64::new(z, 0.0);
        a.lu().determinant().re
    }

    /// Principal minor det L_S for an arbitrary index set (empty set gives 1).
    pub fn principal_minor(&self, sites: &[usize]) -> f64 {
        principal_minor(&self.entries, sites).re
    }
}

fn principal_minor(a: &DMatrix<Complex64>, sites: &[usize]) -> Complex64 {
    let k = sites.len();
    if k == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let sub = DMatrix::from_fn(k, k, |r, c| a[(sites[r], sites[c])]);
    sub.lu().determinant()
}

fn lattice_family<'a>(ens: &'a CirculantEnsemble, op: &'static str) -> Result<(usize, &'a KernelFamily)> {
    let fam = ens.family();
    if !fam.is_real_even_1d() {
        return Err(fam.unsupported(op));
    }
    Ok((ens.m()?, fam))
}

/// First row of the circulant L-matrix: g((L/π) sin(πs/M)), s = 0..M−1.
pub fn circulant_row(ens: &CirculantEnsemble) -> Result<Vec<f64>> {
    let (m, fam) = lattice_family(ens, "circulant_row")?;
    // s and M − s share one chord so the row is exactly symmetric
    (0..m)
        .map(|s| fam.g(chord(ens.l(), m, s.min(m - s) as f64)))
        .collect()
}

/// Dense real symmetric circulant L-matrix of a lattice ensemble.
pub fn build_circulant(ens: &CirculantEnsemble) -> Result<LMatrix> {
    let row = circulant_row(ens)?;
    let m = row.len();
    let entries = DMatrix::from_fn(m, m, |j, l| Complex64::new(row[(l + m - j) % m], 0.0));
    Ok(LMatrix {
        entries,
        circulant: true,
    })
}

/// Eigenvalues λ_p of a circulant ensemble, p over the global phase range.
#[derive(Debug, Clone, PartialEq)]
pub struct CirculantSpectrum {
    m: usize,
    values: Vec<f64>,
}

impl CirculantSpectrum {
    pub fn m(&self) -> usize {
        self.m
    }

    /// Values in phase order ⌊−M/2⌋+1 ..= ⌊M/2⌋.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// λ_p for any integer p (taken modulo M).
    pub fn get(&self, p: i64) -> f64 {
        let m = self.m as i64;
        let first = *phase_range(self.m).start();
        self.values[(p - first).rem_euclid(m) as usize]
    }

    /// (p, λ_p) pairs in phase order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        phase_range(self.m).zip(self.values.iter().copied())
    }

    /// Ξ = Π_p (1 + zλ_p).
    pub fn partition_function(&self, z: f64) -> f64 {
        self.values.iter().map(|l| 1.0 + z * l).product()
    }

    /// log Ξ = Σ_p log(1 + zλ_p).
    pub fn log_partition_function(&self, z: f64) -> f64 {
        self.values.iter().map(|l| (z * l).ln_1p()).sum()
    }

    /// Occupation probabilities zλ_p/(1 + zλ_p).
    pub fn occupations(&self, z: f64) -> Vec<f64> {
        self.values.iter().map(|l| z * l / (1.0 + z * l)).collect()
    }

    /// Expected particle number Σ_p zλ_p/(1 + zλ_p), i.e. z d/dz log Ξ.
    pub fn expected_count(&self, z: f64) -> f64 {
        self.occupations(z).iter().sum()
    }
}

/// Discrete Fourier transform of a real even periodic sequence evaluated at
/// every phase: Σ_s a_s e^{2πips/M}. Returns the values in phase order and
/// the largest imaginary residue.
pub(crate) fn even_dft(a: &[f64]) -> (Vec<f64>, f64) {
    let m = a.len();
    let mut out = Vec::with_capacity(m);
    let mut resid = 0.0f64;
    if m < DIRECT_DFT_MAX {
        for p in phase_range(m) {
            let pm = p.unsigned_abs() as usize % m;
            let (mut re, mut im) = (0.0, 0.0);
            for (s, v) in a.iter().enumerate() {
                let k = (pm * s) % m;
                let ang = 2.0 * PI * k.min(m - k) as f64 / m as f64;
                re += v * ang.cos();
                im += if 2 * k > m { -v * ang.sin() } else { v * ang.sin() };
            }
            resid = resid.max(im.abs());
            out.push(re);
        }
    } else {
        let mut buf: Vec<Complex64> = a.iter().map(|v| Complex64::new(*v, 0.0)).collect();
        FftPlanner::new().plan_fft_inverse(m).process(&mut buf);
        for p in phase_range(m) {
            let v = buf[p.rem_euclid(m as i64) as usize];
            resid = resid.max(v.im.abs());
            out.push(v.re);
        }
        // enforce λ_p = λ_{−p} exactly
        let first = *phase_range(m).start();
        for p in 1..=(m as i64 - 1) / 2 {
            let (i, j) = ((p - first) as usize, (-p - first) as usize);
            let avg = 0.5 * (out[i] + out[j]);
            out[i] = avg;
            out[j] = avg;
        }
    }
    (out, resid)
}

/// Complex inverse transform Σ_k w_k e^{2πidk/M} for d = 0..M−1, where
/// `w` is indexed by k = p mod M.
pub(crate) fn inverse_dft(w: &[Complex64]) -> Vec<Complex64> {
    let m = w.len();
    if m < DIRECT_DFT_MAX {
        (0..m)
            .map(|d| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, v) in w.iter().enumerate() {
                    let ang = 2.0 * PI * ((d * k) % m) as f64 / m as f64;
                    acc += v * Complex64::from_polar(1.0, ang);
                }
                acc
            })
            .collect()
    } else {
        let mut buf = w.to_vec();
        FftPlanner::new().plan_fft_inverse(m).process(&mut buf);
        buf
    }
}

/// λ_p of the circulant L-matrix from the transform of its first row.
pub fn circulant_eigenvalues(ens: &CirculantEnsemble) -> Result<CirculantSpectrum> {
    let row = circulant_row(ens)?;
    let m = row.len();
    let (values, resid) = even_dft(&row);
    let scale = row.iter().map(|v| v.abs()).sum::<f64>().max(1.0);
    if resid > 1e-10 * scale {
        return Err(Error::Numerical(format!(
            "circulant eigenvalues have imaginary residue {resid:e}"
        )));
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if min < PSD_TOL {
        return Err(Error::NotPositiveSemidefinite(min));
    }
    Ok(CirculantSpectrum { m, values })
}

/// Ξ = det(I + zL) from the spectral product.
pub fn partition_function(ens: &CirculantEnsemble) -> Result<f64> {
    Ok(circulant_eigenvalues(ens)?.partition_function(ens.z()))
}

pub fn log_partition_function(ens: &CirculantEnsemble) -> Result<f64> {
    Ok(circulant_eigenvalues(ens)?.log_partition_function(ens.z()))
}

/// Expected number of particles Σ_p zλ_p/(1 + zλ_p).
pub fn expected_count(ens: &CirculantEnsemble) -> Result<f64> {
    Ok(circulant_eigenvalues(ens)?.expected_count(ens.z()))
}

/// Visits every subset of 0..m in Gray-code order, passing its members.
fn for_each_subset(m: usize, mut f: impl FnMut(&[usize])) {
    let mut members = Vec::with_capacity(m);
    for i in 0u64..(1u64 << m) {
        let code = i ^ (i >> 1);
        members.clear();
        members.extend((0..m).filter(|b| code >> b & 1 == 1));
        f(&members);
    }
}

fn check_brute_force_size(op: &'static str, m: usize) -> Result<()> {
    if m > BRUTE_FORCE_MAX {
        return Err(Error::TooLarge {
            op,
            m,
            max: BRUTE_FORCE_MAX,
        });
    }
    Ok(())
}

/// Σ_N z^N Σ_{|X| = N} det L_X by enumerating all 2^M subsets.
pub fn brute_force_partition(ens: &CirculantEnsemble) -> Result<f64> {
    let m = ens.m()?;
    check_brute_force_size("brute_force_partition", m)?;
    let l = build_circulant(ens)?;
    let z = ens.z();
    let mut total = 0.0;
    for_each_subset(m, |s| total += z.powi(s.len() as i32) * l.principal_minor(s));
    Ok(total)
}

/// K = zL(I + zL)^{-1}, with its eigenvalues checked to lie in [0, 1).
pub fn macchi_kernel(l: &LMatrix, z: f64) -> Result<DMatrix<Complex64>> {
    if !(z.is_finite() && z >= 0.0) {
        return Err(Error::invalid(format!("fugacity must be nonnegative (got {z})")));
    }
    let n = l.dim();
    let zl = l.entries() * Complex64::new(z, 0.0);
    let a = DMatrix::<Complex64>::identity(n, n) + &zl;
    // zL and (I + zL)^{-1} commute
    let k = a.lu().solve(&zl).ok_or(Error::Singular)?;
    let ev = k.clone().symmetric_eigenvalues();
    for v in ev.iter() {
        if *v < PSD_TOL || *v > 1.0 + 1e-10 {
            return Err(Error::Numerical(format!(
                "kernel eigenvalue {v} outside [0, 1)"
            )));
        }
    }
    Ok(k)
}

/// The finite-M kernel K^{(M)}(x, y) = (z/M) Σ_p e^{2πi(y−x)p/M} λ_p/(1 + zλ_p),
/// tabulated once per separation.
#[derive(Debug, Clone)]
pub struct FiniteKernel {
    m: usize,
    z: f64,
    spectrum: CirculantSpectrum,
    by_offset: Vec<Complex64>,
}

impl FiniteKernel {
    pub fn new(ens: &CirculantEnsemble) -> Result<Self> {
        let spectrum = circulant_eigenvalues(ens)?;
        Ok(Self::from_spectrum(spectrum, ens.z()))
    }

    pub fn from_spectrum(spectrum: CirculantSpectrum, z: f64) -> Self {
        let m = spectrum.m();
        let mut w = vec![Complex64::new(0.0, 0.0); m];
        for (p, l) in spectrum.iter() {
            w[p.rem_euclid(m as i64) as usize] = Complex64::new(z * l / (1.0 + z * l) / m as f64, 0.0);
        }
        let by_offset = inverse_dft(&w);
        FiniteKernel {
            m,
            z,
            spectrum,
            by_offset,
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn spectrum(&self) -> &CirculantSpectrum {
        &self.spectrum
    }

    /// K as a function of the separation y − x (taken modulo M).
    pub fn at_offset(&self, d: i64) -> Complex64 {
        self.by_offset[d.rem_euclid(self.m as i64) as usize]
    }

    /// K(x, y) for 0-based sites.
    pub fn value(&self, x: usize, y: usize) -> Result<Complex64> {
        self.check_site(x)?;
        self.check_site(y)?;
        Ok(self.at_offset(y as i64 - x as i64))
    }

    /// Density per site K(x, x).
    pub fn density(&self) -> f64 {
        self.by_offset[0].re
    }

    /// The full M×M matrix [K(x, y)].
    pub fn matrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.m, self.m, |x, y| self.at_offset(y as i64 - x as i64))
    }

    fn check_site(&self, site: usize) -> Result<()> {
        if site >= self.m {
            return Err(Error::SiteOutOfRange { site, m: self.m });
        }
        Ok(())
    }

    /// k-point correlation: determinant of the K-submatrix on distinct sites.
    pub fn correlation(&self, sites: &[usize]) -> Result<CorrelationMinor> {
        let sorted = validate_sites(sites, self.m)?;
        let k = sorted.len();
        let sub = DMatrix::from_fn(k, k, |r, c| {
            self.at_offset(sorted[c] as i64 - sorted[r] as i64)
        });
        let value = if k == 0 {
            1.0
        } else {
            sub.lu().determinant().re
        };
        Ok(CorrelationMinor {
            sites: sorted,
            value,
        })
    }
}

fn validate_sites(sites: &[usize], m: usize) -> Result<Vec<usize>> {
    let mut sorted = sites.to_vec();
    sorted.sort_unstable();
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(Error::RepeatedSite(w[0]));
        }
    }
    if let Some(&s) = sorted.last() {
        if s >= m {
            return Err(Error::SiteOutOfRange { site: s, m });
        }
    }
    Ok(sorted)
}

/// Correlation at a set of distinct lattice sites.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMinor {
    /// Strictly increasing 0-based sites.
    pub sites: Vec<usize>,
    pub value: f64,
}

/// K^{(M)}(x, y) from the spectral sum; sites are 0-based.
pub fn kernel_finite(ens: &CirculantEnsemble, x: usize, y: usize) -> Result<Complex64> {
    FiniteKernel::new(ens)?.value(x, y)
}

/// det [K(x_j, x_k)] over the given distinct sites.
pub fn correlation(ens: &CirculantEnsemble, sites: &[usize]) -> Result<CorrelationMinor> {
    FiniteKernel::new(ens)?.correlation(sites)
}

/// Σ_{Y ⊇ X} Pr(Y) by enumerating all subsets of the lattice.
pub fn brute_force_correlation(ens: &CirculantEnsemble, sites: &[usize]) -> Result<f64> {
    let m = ens.m()?;
    check_brute_force_size("brute_force_correlation", m)?;
    let x = validate_sites(sites, m)?;
    let l = build_circulant(ens)?;
    let z = ens.z();
    let (mut total, mut part) = (0.0, 0.0);
    for_each_subset(m, |s| {
        let w = z.powi(s.len() as i32) * l.principal_minor(s);
        total += w;
        if x.iter().all(|v| s.binary_search(v).is_ok()) {
            part += w;
        }
    });
    Ok(part / total)
}

/// Entry i·h((L/π) sin(π(x − y + 2iε)/L)) of the complex Hermitian operator.
pub fn complex_circulant_entry(family: &KernelFamily, l: f64, x: f64, y: f64) -> Result<Complex64> {
    let eps = family.eps().ok_or_else(|| family.unsupported("complex_circulant_entry"))?;
    let arg = Complex64::new(PI * (x - y) / l, 2.0 * PI * eps / l).sin() * (l / PI);
    Ok(Complex64::i() * family.h(arg)?)
}

/// Both sides of the Cauchy double-alternant evaluation of det L for h(u) = 1/u.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CauchyCheck {
    pub lhs: Complex64,
    pub rhs: Complex64,
}

impl CauchyCheck {
    pub fn rel_diff(&self) -> f64 {
        (self.lhs - self.rhs).norm() / self.rhs.norm()
    }
}

/// Dense determinant of [i/((L/π) sin(π(X_j − X_k + 2iε)/L))] against the
/// closed product
/// (−1)^{N(N−1)/2} (πi/L)^N Π_{j<k} sin²(π(X_k − X_j)/L) / Π_{j,k} sin(π(X_j − X_k + 2iε)/L).
pub fn cauchy_determinant_check(points: &[f64], eps: f64, l: f64) -> Result<CauchyCheck> {
    let n = points.len();
    if !(2..=8).contains(&n) {
        return Err(Error::invalid(format!("need 2 to 8 points (got {n})")));
    }
    if !(eps > 0.0 && eps.is_finite() && l > 0.0 && l.is_finite()) {
        return Err(Error::invalid("eps and L must be positive"));
    }
    for &x in points {
        if !(0.0..l).contains(&x) {
            return Err(Error::invalid(format!("point {x} outside [0, {l})")));
        }
    }
    for j in 0..n {
        for k in 0..j {
            if (points[j] - points[k]).abs() < 1e-12 * l {
                return Err(Error::invalid(format!("coincident points at {}", points[j])));
            }
        }
    }
    let fam = KernelFamily::inverse_argument(eps)?;
    let mut a = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for j in 0..n {
        for k in 0..n {
            a[(j, k)] = complex_circulant_entry(&fam, l, points[j], points[k])?;
        }
    }
    let lhs = a.lu().determinant();

    let mut num = 1.0;
    for j in 0..n {
        for k in j + 1..n {
            num *= (PI * (points[k] - points[j]) / l).sin().powi(2);
        }
    }
    let mut den = Complex64::new(1.0, 0.0);
    for &xj in points {
        for &xk in points {
            den *= Complex64::new(PI * (xj - xk) / l, 2.0 * PI * eps / l).sin();
        }
    }
    let sign = if (n * (n - 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
    let rhs = Complex64::new(0.0, PI / l).powi(n as i32) * sign * num / den;
    Ok(CauchyCheck { lhs, rhs })
}
