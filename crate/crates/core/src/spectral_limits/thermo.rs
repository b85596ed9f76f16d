//! Thermodynamic limit of one-dimensional families, the Gaussian series, the
//! free-fermion kernel and the sine kernel.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{check_fugacity, custom_even_transform, edge_breaks, logistic, Spectrum1d, SPECTRAL_CUTOFF};
use crate::error::{Error, Result};
use crate::model::KernelFamily;
use crate::quad::{half_period_panels, FourierTable, Integrator};

const TABLE_TOL: f64 = 1e-14;

/// λ^∞(s) = ∫ g(t) e^{2πist} dt (closed form for builtins).
pub fn thermo_spectral_density(family: &KernelFamily, s: f64) -> Result<f64> {
    Spectrum1d::new(family)?.lambda(s)
}

/// λ^∞(s) by quadrature of g over its decay radius, for any real even family.
pub fn thermo_spectral_density_numeric(family: &KernelFamily, s: f64) -> Result<f64> {
    if !family.is_real_even_1d() {
        return Err(family.unsupported("thermo_spectral_density_numeric"));
    }
    custom_even_transform(family, family.decay_radius(), s)
}

/// ∫ f(s) ds over the support of zλ, where f is even when the spectrum is.
fn integrate_spectral(sp: &Spectrum1d, ln_z: f64, f: impl Fn(f64) -> f64) -> Result<f64> {
    let breaks = sp.breaks(ln_z)?;
    let v = Integrator::default().integrate_pieces(&f, &breaks)?;
    Ok(if sp.is_even() { 2.0 * v } else { v })
}

/// βP = ∫ log(1 + zλ(s)) ds.
pub fn thermo_pressure(family: &KernelFamily, z: f64) -> Result<f64> {
    check_fugacity(z)?;
    if z == 0.0 {
        return Ok(0.0);
    }
    let sp = Spectrum1d::new(family)?;
    let lz = z.ln();
    integrate_spectral(&sp, lz, |s| sp.log1p(lz, s).unwrap_or(f64::NAN))
}

/// ρ = ∫ zλ/(1 + zλ) ds.
pub fn thermo_density(family: &KernelFamily, z: f64) -> Result<f64> {
    check_fugacity(z)?;
    if z == 0.0 {
        return Ok(0.0);
    }
    let sp = Spectrum1d::new(family)?;
    let lz = z.ln();
    integrate_spectral(&sp, lz, |s| sp.occupancy(lz, s).unwrap_or(f64::NAN))
}

/// (∫ (zλ/(1 + zλ))² ds, ∫ zλ/(1 + zλ)² ds): the pair integral of the
/// truncated two-point function and the analytic second log-derivative of βP.
pub fn thermo_compressibility_integrals(family: &KernelFamily, z: f64) -> Result<(f64, f64)> {
    check_fugacity(z)?;
    if z == 0.0 {
        return Ok((0.0, 0.0));
    }
    let sp = Spectrum1d::new(family)?;
    let lz = z.ln();
    let sq = integrate_spectral(&sp, lz, |s| sp.occupancy(lz, s).map(|k| k * k).unwrap_or(f64::NAN))?;
    let var = integrate_spectral(&sp, lz, |s| {
        sp.occupancy(lz, s).map(|k| k * (1.0 - k)).unwrap_or(f64::NAN)
    })?;
    Ok((sq, var))
}

/// z ∫ e^{2πirs} λ(s)/(1 + zλ(s)) ds, so that K(X, Y) is this at r = Y − X.
pub fn thermo_kernel(family: &KernelFamily, z: f64, r: f64) -> Result<Complex64> {
    check_fugacity(z)?;
    if z == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let sp = Spectrum1d::new(family)?;
    let lz = z.ln();
    let breaks = sp.breaks(lz)?;
    let omega = 2.0 * PI * r;
    let occ = |s: f64| sp.occupancy(lz, s).unwrap_or(f64::NAN);
    let mut re = 0.0;
    let mut im = 0.0;
    for w in breaks.windows(2) {
        let q = Integrator::default().with_min_panels(half_period_panels(w[1] - w[0], omega));
        re += q.integrate(|s| occ(s) * (omega * s).cos(), w[0], w[1])?;
        if !sp.is_even() && omega != 0.0 {
            im += q.integrate(|s| occ(s) * (omega * s).sin(), w[0], w[1])?;
        }
    }
    Ok(if sp.is_even() {
        Complex64::new(2.0 * re, 0.0)
    } else {
        Complex64::new(re, im)
    })
}

/// Thermodynamic kernel tabulated on fixed quadrature nodes for fast
/// evaluation at many separations |r| ≤ max_sep.
#[derive(Debug, Clone)]
pub struct ThermoKernel {
    table: FourierTable,
    max_sep: f64,
}

impl ThermoKernel {
    pub fn new(family: &KernelFamily, z: f64, max_sep: f64) -> Result<Self> {
        check_fugacity(z)?;
        if !(max_sep >= 0.0 && max_sep.is_finite()) {
            return Err(Error::invalid("max_sep must be finite and nonnegative"));
        }
        let sp = Spectrum1d::new(family)?;
        let (lz, breaks) = if z == 0.0 {
            (f64::NEG_INFINITY, vec![])
        } else {
            let lz = z.ln();
            (lz, sp.breaks(lz)?)
        };
        let table = FourierTable::build(
            |s| sp.occupancy(lz, s).unwrap_or(f64::NAN),
            &breaks,
            2.0 * PI,
            max_sep,
            sp.is_even(),
            TABLE_TOL,
        )?;
        Ok(ThermoKernel { table, max_sep })
    }

    pub fn max_sep(&self) -> f64 {
        self.max_sep
    }

    /// z ∫ e^{2πirs} λ/(1 + zλ) ds.
    pub fn value(&self, r: f64) -> Complex64 {
        self.table.eval(r)
    }
}

/// −Σ_{p≥1} (−z)^p (cp)^{−1/2} e^{−πr²/(cp)} for the Gaussian family, |z| < 1.
pub fn gaussian_series_kernel(c: f64, z: f64, r: f64) -> Result<f64> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::invalid("c must be positive"));
    }
    if !(z.abs() < 1.0) {
        return Err(Error::invalid(format!("series requires |z| < 1 (got {z})")));
    }
    let mut acc = 0.0;
    let mut zp = 1.0;
    for p in 1.. {
        zp *= -z;
        if zp.abs() < SPECTRAL_CUTOFF {
            break;
        }
        let cp = c * p as f64;
        acc -= zp / cp.sqrt() * (-PI * r * r / cp).exp();
    }
    Ok(acc)
}

/// Momentum beyond which the Fermi weight 1/(e^{β(k²−μ)} + 1) is below
/// `thr` times min(1, its peak).
pub fn fermion_momentum_cutoff(beta: f64, mu: f64, thr: f64) -> f64 {
    let ln_peak = -super::softplus(-beta * mu);
    let k2 = mu + (-thr.ln() - ln_peak.min(0.0)) / beta;
    k2.max(0.0).sqrt()
}

fn check_fermion(beta: f64, mu: f64) -> Result<()> {
    if !(beta > 0.0 && beta.is_finite() && mu.is_finite()) {
        return Err(Error::invalid("need beta > 0 and finite mu"));
    }
    Ok(())
}

pub(crate) fn fermi(beta: f64, mu: f64, k: f64) -> f64 {
    logistic(-beta * (k * k - mu))
}

pub(crate) fn fermion_breaks(beta: f64, mu: f64) -> Vec<f64> {
    fermion_breaks_to(beta, mu, SPECTRAL_CUTOFF)
}

/// Breakpoints on [0, k_max] where the Fermi weight at k_max is `thr`.
pub(crate) fn fermion_breaks_to(beta: f64, mu: f64, thr: f64) -> Vec<f64> {
    let kmax = fermion_momentum_cutoff(beta, mu, thr);
    let mut b = vec![0.0, kmax];
    if mu > 0.0 {
        let kf = mu.sqrt();
        edge_breaks(&mut b, kf, 1.0 / (2.0 * beta * kf));
    }
    b
}

/// (1/2π) ∫ e^{irk} / (e^{β(k²−μ)} + 1) dk.
pub fn fermion_kernel(beta: f64, mu: f64, r: f64) -> Result<f64> {
    check_fermion(beta, mu)?;
    let mut acc = 0.0;
    for w in fermion_breaks(beta, mu).windows(2) {
        let q = Integrator::default().with_min_panels(half_period_panels(w[1] - w[0], r));
        acc += q.integrate(|k| fermi(beta, mu, k) * (r * k).cos(), w[0], w[1])?;
    }
    Ok(acc / PI)
}

/// Particle density of free fermions, the kernel at r = 0.
pub fn fermion_density(beta: f64, mu: f64) -> Result<f64> {
    fermion_kernel(beta, mu, 0.0)
}

/// Fixed-node table of the fermion kernel for |r| ≤ max_sep.
#[derive(Debug, Clone)]
pub(crate) struct FermionTable {
    table: FourierTable,
}

impl FermionTable {
    pub(crate) fn new(beta: f64, mu: f64, max_sep: f64) -> Result<Self> {
        check_fermion(beta, mu)?;
        let table = FourierTable::build(
            |k| fermi(beta, mu, k),
            &fermion_breaks(beta, mu),
            1.0,
            max_sep,
            true,
            TABLE_TOL,
        )?;
        Ok(FermionTable { table })
    }

    pub(crate) fn value(&self, r: f64) -> f64 {
        self.table.eval(r).re / (2.0 * PI)
    }
}

/// sin(k_F r)/(πr), equal to k_F/π at r = 0.
pub fn sine_kernel(k_f: f64, r: f64) -> Result<f64> {
    if !(k_f > 0.0 && k_f.is_finite()) {
        return Err(Error::invalid("k_F must be positive"));
    }
    let x = k_f * r;
    Ok(if x.abs() < 1e-6 {
        k_f / PI * (1.0 - x * x / 6.0)
    } else {
        x.sin() / (PI * r)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::FermionParams;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn gauss(c: f64) -> KernelFamily {
        KernelFamily::gaussian(c).unwrap()
    }

    #[test]
    fn gaussian_density_closed_form() {
        assert_eq!(thermo_spectral_density(&gauss(1.0), 0.0).unwrap(), 1.0);
        let a = thermo_spectral_density(&gauss(2.0), 0.7).unwrap();
        let b = thermo_spectral_density_numeric(&gauss(2.0), 0.7).unwrap();
        assert_abs_diff_eq!(a, (-PI * 2.0 * 0.49f64).exp(), epsilon = 1e-16);
        assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        let b = thermo_spectral_density_numeric(&gauss(1.0), 0.7).unwrap();
        assert_abs_diff_eq!(b, (-PI * 0.49f64).exp(), epsilon = 1e-10);
    }

    #[test]
    fn zero_fugacity() {
        let g = gauss(1.0);
        assert_eq!(thermo_pressure(&g, 0.0).unwrap(), 0.0);
        assert_eq!(thermo_density(&g, 0.0).unwrap(), 0.0);
        assert_eq!(thermo_kernel(&g, 0.0, 0.3).unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(gaussian_series_kernel(1.0, 0.0, 0.3).unwrap(), 0.0);
    }

    #[test]
    fn small_z_pressure_is_linear() {
        let bp = thermo_pressure(&gauss(1.0), 1e-4).unwrap();
        assert!((bp / 1e-4 - 1.0).abs() < 1e-4);
    }

    #[test]
    fn series_matches_quadrature() {
        let g = gauss(1.0);
        for r in [0.0, 0.8, 2.0, 3.0] {
            let s = gaussian_series_kernel(1.0, 0.5, r).unwrap();
            let q = thermo_kernel(&g, 0.5, r).unwrap();
            assert_abs_diff_eq!(s, q.re, epsilon = 1e-10);
            assert_eq!(q.im, 0.0);
        }
        assert!(gaussian_series_kernel(1.0, 1.0, 0.0).is_err());
        let at0: f64 = (1..60).map(|p| -(-0.3f64).powi(p) / (p as f64).sqrt()).sum();
        assert_abs_diff_eq!(gaussian_series_kernel(1.0, 0.3, 0.0).unwrap(), at0, epsilon = 1e-15);
    }

    #[test]
    fn fermion_matches_gaussian_gas() {
        let p = FermionParams::new(1.0, 1.0).unwrap();
        let (c, z) = p.to_gas();
        let g = gauss(c);
        for r in [0.0, 0.5, 2.3] {
            let a = fermion_kernel(1.0, 1.0, r).unwrap();
            let b = thermo_kernel(&g, z, r).unwrap().re;
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
        assert_abs_diff_eq!(fermion_density(1.0, 1.0).unwrap(), thermo_density(&g, z).unwrap(), epsilon = 1e-10);
    }

    #[test]
    fn boltzmann_limit() {
        // μ → −∞: K ≈ z (4πβ)^{-1/2} e^{−r²/(4β)}
        let (beta, mu, r): (f64, f64, f64) = (1.0, -20.0, 0.7);
        let z = (beta * mu).exp();
        let lead = z / (4.0 * PI * beta).sqrt() * (-r * r / (4.0 * beta)).exp();
        let k = fermion_kernel(beta, mu, r).unwrap();
        assert!((k - lead).abs() / lead < 1e-8);
    }

    #[test]
    fn low_temperature_sine_limit() {
        for r in [0.1, 1.0, 2.5] {
            let a = fermion_kernel(200.0, 1.0, r).unwrap();
            let b = sine_kernel(1.0, r).unwrap();
            assert!((a - b).abs() < 1e-2);
        }
    }

    #[test]
    fn sine_kernel_values() {
        assert_abs_diff_eq!(sine_kernel(1.3, 0.0).unwrap(), 1.3 / PI, epsilon = 1e-16);
        assert_abs_diff_eq!(sine_kernel(PI, 1.0).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(sine_kernel(1.0, PI / 2.0).unwrap(), 2.0 / (PI * PI), epsilon = 1e-15);
    }

    #[test]
    fn table_matches_adaptive_kernel() {
        let g = gauss(4.0 * PI);
        let t = ThermoKernel::new(&g, 1.0, 8.0).unwrap();
        for r in [0.0, 0.3, 4.1, 8.0] {
            assert_abs_diff_eq!(t.value(r).re, thermo_kernel(&g, 1.0, r).unwrap().re, epsilon = 1e-12);
        }
        let f = FermionTable::new(1.0, 1.0, 10.0).unwrap();
        for r in [0.0, 1.7, 10.0] {
            assert_abs_diff_eq!(f.value(r), fermion_kernel(1.0, 1.0, r).unwrap(), epsilon = 1e-12);
        }
    }

    #[test]
    fn huge_fugacity_stays_finite() {
        // z = e^{200} is representable but zλ products are not needed explicitly
        let g = gauss(4.0 * PI * 200.0);
        let rho = thermo_density(&g, (200.0f64).exp()).unwrap();
        assert!((rho - 1.0 / PI).abs() < 1e-2);
    }

    proptest! {
        #[test]
        fn pressure_and_density_monotone(c in 0.2f64..5.0, z in 0.01f64..20.0) {
            let g = gauss(c);
            let (p1, p2) = (thermo_pressure(&g, z).unwrap(), thermo_pressure(&g, 1.1 * z).unwrap());
            prop_assert!(p1 >= 0.0 && p2 > p1);
            let (d1, d2) = (thermo_density(&g, z).unwrap(), thermo_density(&g, 1.1 * z).unwrap());
            prop_assert!(d1 >= 0.0 && d2 > d1);
        }

        #[test]
        fn kernel_real_and_even(c in 0.2f64..5.0, z in 0.01f64..5.0, r in 0.0f64..4.0) {
            let g = gauss(c);
            let a = thermo_kernel(&g, z, r).unwrap();
            let b = thermo_kernel(&g, z, -r).unwrap();
            prop_assert!((a - b).norm() < 1e-12);
            prop_assert_eq!(a.im, 0.0);
        }
    }
}
