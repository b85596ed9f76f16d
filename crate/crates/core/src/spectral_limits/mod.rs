//! Spectral densities, pressures, densities and correlation kernels in the
//! limiting regimes: infinite lattice at fixed spacing, continuum circle of
//! fixed circumference, the thermodynamic limit, the complex Hermitian
//! (Gaudin) family and d-dimensional Gaussians.

mod ddim;
mod finite_l;
mod gaudin;
mod lattice;
mod thermo;

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

pub use ddim::{
    ddim_kernel, ddim_kernel_cartesian, ddim_pressure_cartesian, ddim_pressure_radial,
    ddim_spectral_density,
};
pub use finite_l::{
    finite_l_eigenvalue, finite_l_kernel, finite_l_log_partition, FiniteLSpectrum,
};
pub use gaudin::{
    complex_thermo_spectral_density, gaudin_asymptotic, gaudin_fugacity, gaudin_kernel,
    gaudin_pressure, gaudin_truncated_two_point,
};
pub use lattice::{
    lattice_density, lattice_kernel, lattice_occupancy_variance, lattice_pressure,
    lattice_spectral_density, LatticeSymbol,
};
pub use thermo::{
    fermion_density, fermion_kernel, fermion_momentum_cutoff, gaussian_series_kernel,
    sine_kernel, thermo_compressibility_integrals, thermo_density, thermo_kernel,
    thermo_pressure, thermo_spectral_density, thermo_spectral_density_numeric, ThermoKernel,
};
pub(crate) use thermo::{fermi, fermion_breaks_to};

use crate::error::{Error, Result};
use crate::model::{CustomEven, CustomOdd, KernelFamily};
use crate::quad::{integrate_fourier, Integrator};

/// Relative size below which spectral contributions are dropped.
pub const SPECTRAL_CUTOFF: f64 = 1e-16;

/// Which limit a spectral density or kernel belongs to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regime {
    /// M → ∞ at fixed lattice spacing τ.
    Lattice { tau: f64 },
    /// M → ∞ at fixed circumference L.
    FiniteL { l: f64 },
    /// L → ∞ for a real even family.
    Thermo,
    /// L → ∞ for a complex Hermitian family with regulariser ε.
    ComplexThermo { eps: f64 },
    /// L → ∞ in d dimensions.
    ThermoD { d: usize },
}

/// λ as a function of its spectral variable in one regime.
#[derive(Debug, Clone)]
pub struct SpectralDensity {
    family: KernelFamily,
    regime: Regime,
}

impl SpectralDensity {
    pub fn new(family: KernelFamily, regime: Regime) -> Result<Self> {
        match regime {
            Regime::Lattice { tau } | Regime::FiniteL { l: tau } if !(tau > 0.0 && tau.is_finite()) => {
                return Err(Error::invalid("lattice spacing and circumference must be positive"))
            }
            Regime::Lattice { .. } | Regime::FiniteL { .. } | Regime::Thermo => {
                if !family.is_real_even_1d() {
                    return Err(family.unsupported("SpectralDensity"));
                }
            }
            Regime::ComplexThermo { eps } => {
                if family.eps() != Some(eps) {
                    return Err(Error::invalid("regime ε must match the family"));
                }
            }
            Regime::ThermoD { d } => {
                if family.dimension() != d || !matches!(family, KernelFamily::GaussianD { .. }) {
                    return Err(family.unsupported("SpectralDensity (d-dimensional)"));
                }
            }
        }
        Ok(SpectralDensity { family, regime })
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn family(&self) -> &KernelFamily {
        &self.family
    }

    /// True when λ is evaluated from a closed form rather than by quadrature.
    pub fn closed_form(&self) -> bool {
        match self.regime {
            Regime::Thermo | Regime::ComplexThermo { .. } | Regime::ThermoD { .. } => matches!(
                self.family,
                KernelFamily::Gaussian { .. }
                    | KernelFamily::GaussianD { .. }
                    | KernelFamily::InverseArgument { .. }
            ),
            _ => false,
        }
    }

    /// Lattice: t ↦ f̃(e^{2πit}); FiniteL: p ↦ λ_p (x rounded); thermodynamic: s ↦ λ(s);
    /// d-dimensional: radial |s| ↦ λ.
    pub fn eval(&self, x: f64) -> Result<f64> {
        match self.regime {
            Regime::Lattice { tau } => lattice_spectral_density(&self.family, tau, x),
            Regime::FiniteL { l } => finite_l_eigenvalue(&self.family, l, x.round() as i64),
            Regime::Thermo | Regime::ComplexThermo { .. } => thermo_spectral_density(&self.family, x),
            Regime::ThermoD { d } => match self.family {
                KernelFamily::GaussianD { c, .. } => {
                    let mut s = vec![0.0; d];
                    s[0] = x;
                    ddim_spectral_density(c, d, &s)
                }
                _ => Err(self.family.unsupported("SpectralDensity::eval")),
            },
        }
    }
}

/// Translation-invariant correlation kernel with a regime tag:
/// K(X, Y) = κ(X − Y), κ(−u) = conj κ(u).
#[derive(Clone)]
pub struct CorrelationKernel {
    regime: &'static str,
    kappa: Arc<dyn Fn(f64) -> Complex64 + Send + Sync>,
    real: bool,
    density: f64,
}

impl std::fmt::Debug for CorrelationKernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CorrelationKernel")
            .field("regime", &self.regime)
            .field("density", &self.density)
            .finish()
    }
}

impl CorrelationKernel {
    /// Wraps κ; `real` declares κ real and even.
    pub fn from_fn(
        regime: &'static str,
        real: bool,
        kappa: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        let density = kappa(0.0).re;
        CorrelationKernel {
            regime,
            kappa: Arc::new(kappa),
            real,
            density,
        }
    }

    pub fn zero() -> Self {
        Self::from_fn("zero", true, |_| Complex64::new(0.0, 0.0))
    }

    /// Thermodynamic kernel of a one-dimensional family at fugacity z, accurate for |X − Y| ≤ `max_sep`.
    pub fn thermo(family: &KernelFamily, z: f64, max_sep: f64) -> Result<Self> {
        let k = ThermoKernel::new(family, z, max_sep)?;
        let real = family.is_real_even_1d();
        // the thermodynamic kernel is a function of Y − X, so K(X, Y) = table(−(X − Y))
        Ok(Self::from_fn(if real { "thermo" } else { "complex-thermo" }, real, move |u| {
            k.value(-u)
        }))
    }

    /// Free-fermion kernel (1/2π) ∫ e^{ik(X−Y)} / (e^{β(k²−μ)} + 1) dk.
    pub fn fermion(beta: f64, mu: f64, max_sep: f64) -> Result<Self> {
        let k = thermo::FermionTable::new(beta, mu, max_sep)?;
        Ok(Self::from_fn("fermion", true, move |u| Complex64::new(k.value(u), 0.0)))
    }

    /// Sine kernel sin(k_F u)/(πu).
    pub fn sine(k_f: f64) -> Result<Self> {
        if !(k_f > 0.0) {
            return Err(Error::invalid("k_F must be positive"));
        }
        Ok(Self::from_fn("sine", true, move |u| {
            Complex64::new(sine_kernel(k_f, u).unwrap_or(0.0), 0.0)
        }))
    }

    /// Gaudin kernel ∫_0^∞ e^{2πi(X−Y)s} / ((2πz)^{-1} e^{4πεs} + 1) ds.
    pub fn gaudin(eps: f64, z: f64, max_sep: f64) -> Result<Self> {
        let k = gaudin::GaudinTable::new(eps, z, max_sep)?;
        Ok(Self::from_fn("gaudin", false, move |u| k.value(u)))
    }

    pub fn regime(&self) -> &'static str {
        self.regime
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    /// ρ = K(X, X).
    pub fn density(&self) -> f64 {
        self.density
    }

    pub fn value(&self, x: f64, y: f64) -> Complex64 {
        (self.kappa)(x - y)
    }

    pub fn at_separation(&self, u: f64) -> Complex64 {
        (self.kappa)(u)
    }
}

/// Log-space helpers so that fugacities like e^{βμ} with βμ ≫ 1 stay finite.
pub(crate) fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

pub(crate) fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// log(1 + zλ), with λ given on a log scale when positive.
pub(crate) fn log1p_zl(ln_z: f64, lambda: f64) -> f64 {
    if lambda > 0.0 {
        softplus(ln_z + lambda.ln())
    } else {
        (ln_z.exp() * lambda).ln_1p()
    }
}

/// zλ/(1 + zλ).
pub(crate) fn occupancy(ln_z: f64, lambda: f64) -> f64 {
    if lambda > 0.0 {
        logistic(ln_z + lambda.ln())
    } else {
        let zl = ln_z.exp() * lambda;
        zl / (1.0 + zl)
    }
}

pub(crate) fn check_fugacity(z: f64) -> Result<()> {
    if z.is_finite() && z >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("fugacity must be nonnegative and finite (got {z})")))
    }
}

/// Thermodynamic spectral density of a one-dimensional family with its
/// truncation geometry.
pub(crate) enum Spectrum1d<'a> {
    Gaussian { c: f64 },
    Gaudin { eps: f64 },
    CustomEven(&'a KernelFamily, &'a CustomEven),
    CustomOdd(&'a CustomOdd),
}

const SCAN_MAX_STEPS: usize = 200_000;
const SCAN_RUN: usize = 16;

impl<'a> Spectrum1d<'a> {
    pub(crate) fn new(family: &'a KernelFamily) -> Result<Self> {
        Ok(match family {
            KernelFamily::Gaussian { c } => Spectrum1d::Gaussian { c: *c },
            KernelFamily::GaussianD { c, d: 1 } => Spectrum1d::Gaussian { c: *c },
            KernelFamily::InverseArgument { eps } => Spectrum1d::Gaudin { eps: *eps },
            KernelFamily::CustomEven(g) => Spectrum1d::CustomEven(family, g),
            KernelFamily::CustomOdd(h) => Spectrum1d::CustomOdd(h),
            _ => return Err(family.unsupported("thermodynamic spectral density")),
        })
    }

    pub(crate) fn is_even(&self) -> bool {
        matches!(self, Spectrum1d::Gaussian { .. } | Spectrum1d::CustomEven(..))
    }

    pub(crate) fn lambda(&self, s: f64) -> Result<f64> {
        match self {
            Spectrum1d::Gaussian { c } => Ok((-PI * c * s * s).exp()),
            Spectrum1d::Gaudin { eps } => Ok(if s >= 0.0 {
                2.0 * PI * (-4.0 * PI * eps * s).exp()
            } else {
                0.0
            }),
            Spectrum1d::CustomEven(fam, g) => custom_even_transform(fam, g.decay_radius, s),
            Spectrum1d::CustomOdd(h) => custom_odd_transform(h, s),
        }
    }

    /// log λ for positive λ, used to keep zλ finite for very large z.
    pub(crate) fn ln_lambda(&self, s: f64) -> Result<f64> {
        match self {
            Spectrum1d::Gaussian { c } => Ok(-PI * c * s * s),
            Spectrum1d::Gaudin { eps } => Ok(if s >= 0.0 {
                (2.0 * PI).ln() - 4.0 * PI * eps * s
            } else {
                f64::NEG_INFINITY
            }),
            _ => {
                let l = self.lambda(s)?;
                Ok(if l > 0.0 { l.ln() } else { f64::NEG_INFINITY })
            }
        }
    }

    /// log(1 + zλ(s)).
    pub(crate) fn log1p(&self, ln_z: f64, s: f64) -> Result<f64> {
        match self {
            Spectrum1d::Gaussian { .. } | Spectrum1d::Gaudin { .. } => {
                Ok(softplus(ln_z + self.ln_lambda(s)?))
            }
            _ => Ok(log1p_zl(ln_z, self.lambda(s)?)),
        }
    }

    /// zλ(s)/(1 + zλ(s)).
    pub(crate) fn occupancy(&self, ln_z: f64, s: f64) -> Result<f64> {
        match self {
            Spectrum1d::Gaussian { .. } | Spectrum1d::Gaudin { .. } => {
                Ok(logistic(ln_z + self.ln_lambda(s)?))
            }
            _ => Ok(occupancy(ln_z, self.lambda(s)?)),
        }
    }

    /// Breakpoints covering the region where zλ is not negligible (relative
    /// to the peak and to 1), refined around a sharp Fermi edge. For even
    /// spectra only s ≥ 0 is returned. Empty when nothing survives.
    pub(crate) fn breaks(&self, ln_z: f64) -> Result<Vec<f64>> {
        let cut = SPECTRAL_CUTOFF.ln();
        match self {
            Spectrum1d::Gaussian { c } => {
                let smax = ((ln_z.max(0.0) - cut) / (PI * c)).sqrt();
                let mut b = vec![0.0, smax];
                if ln_z > 0.0 {
                    let sf = (ln_z / (PI * c)).sqrt();
                    let w = 1.0 / (2.0 * PI * c * sf);
                    edge_breaks(&mut b, sf, w);
                }
                Ok(b)
            }
            Spectrum1d::Gaudin { eps } => {
                let l0 = (2.0 * PI).ln();
                let smax = ((ln_z + l0).max(0.0) - cut) / (4.0 * PI * eps);
                let mut b = vec![0.0, smax];
                if ln_z + l0 > 0.0 {
                    let sf = (ln_z + l0) / (4.0 * PI * eps);
                    edge_breaks(&mut b, sf, 1.0 / (4.0 * PI * eps));
                }
                Ok(b)
            }
            Spectrum1d::CustomEven(_, g) => {
                let hi = match g.spectral_radius {
                    Some(r) => r,
                    None => self.scan(ln_z, 1.0 / (8.0 * g.decay_radius), 1.0)?,
                };
                Ok(vec![0.0, hi])
            }
            Spectrum1d::CustomOdd(h) => {
                let (lo, hi) = match h.spectral_radius {
                    Some(r) => (-r, r),
                    None => {
                        let step = (1.0 / (8.0 * h.decay_radius)).max(h.eps / 64.0);
                        (-self.scan(ln_z, step, -1.0)?, self.scan(ln_z, step, 1.0)?)
                    }
                };
                Ok(if lo < 0.0 && hi > 0.0 { vec![lo, 0.0, hi] } else { vec![lo, hi] })
            }
        }
    }

    /// Walks outward in direction `dir` until |zλ| stays below the cutoff for a run of steps.
    fn scan(&self, ln_z: f64, step: f64, dir: f64) -> Result<f64> {
        let peak = self.lambda(0.0)?.abs().max(1e-300);
        let thr = SPECTRAL_CUTOFF * peak.min((-ln_z).exp());
        let mut run = 0;
        let mut last_big = 0.0;
        for k in 0..SCAN_MAX_STEPS {
            let s = k as f64 * step;
            if self.lambda(dir * s)?.abs() < thr {
                run += 1;
                if run >= SCAN_RUN {
                    return Ok(last_big + step);
                }
            } else {
                run = 0;
                last_big = s;
            }
        }
        Err(Error::Truncation(
            "spectral density does not decay; declare a spectral radius".into(),
        ))
    }
}

fn edge_breaks(b: &mut Vec<f64>, sf: f64, w: f64) {
    let smax = b[1];
    for k in [-40.0, -5.0, 5.0, 40.0] {
        let x = sf + k * w;
        if x > 0.0 && x < smax {
            b.push(x);
        }
    }
    b.sort_by(f64::total_cmp);
}

/// λ(s) = ∫ g(t) e^{2πist} dt = 2 ∫_0^R g(t) cos(2πst) dt by quadrature.
fn custom_even_transform(fam: &KernelFamily, radius: f64, s: f64) -> Result<f64> {
    let q = Integrator::default();
    let v = integrate_fourier(&q, |t| fam.g(t).unwrap_or(0.0), 2.0 * PI * s, 0.0, radius)?;
    Ok(2.0 * v.re)
}

/// λ(s) = i ∫ h(−Y + 2iε) e^{2πisY} dY over |Y| ≤ R by quadrature.
fn custom_odd_transform(h: &CustomOdd, s: f64) -> Result<f64> {
    let q = Integrator::default().with_rel_tol(1e-10);
    let r = h.decay_radius;
    let hv = |y: f64| (h.h)(Complex64::new(-y, 2.0 * h.eps));
    let a = integrate_fourier(&q, |y| hv(y).re, 2.0 * PI * s, -r, r)?;
    let b = integrate_fourier(&q, |y| hv(y).im, 2.0 * PI * s, -r, r)?;
    // ∫ (hr + i hi)(cos + i sin) = (a.re − b.im) + i (a.im + b.re)
    let integral = Complex64::new(a.re - b.im, a.im + b.re);
    let lambda = Complex64::i() * integral;
    if lambda.im.abs() > 1e-10 * lambda.re.abs().max(1.0) {
        return Err(Error::Numerical(format!(
            "spectral density has imaginary part {:e}",
            lambda.im
        )));
    }
    Ok(lambda.re)
}
