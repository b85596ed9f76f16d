//! Continuum circle of fixed circumference L.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{check_fugacity, log1p_zl, occupancy, SPECTRAL_CUTOFF};
use crate::error::{Error, Result};
use crate::model::KernelFamily;
use crate::quad::{integrate_fourier, Integrator};

const MAX_MODES: usize = 1_000_000;
const TAIL_RUN: usize = 3;

/// λ_p^{(L)} = L ∫_{−1/2}^{1/2} g((L/π) sin πt) e^{2πipt} dt.
pub fn finite_l_eigenvalue(family: &KernelFamily, l: f64, p: i64) -> Result<f64> {
    if !family.is_real_even_1d() {
        return Err(family.unsupported("finite-L regime"));
    }
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::invalid(format!("L must be positive (got {l})")));
    }
    // g vanishes once the chord exceeds the decay radius
    let ratio = PI * family.decay_radius() / l;
    let tmax = if ratio < 1.0 { ratio.asin() / PI } else { 0.5 };
    let v = integrate_fourier(
        &Integrator::default(),
        |t| family.g(l / PI * (PI * t).sin()).unwrap_or(f64::NAN),
        2.0 * PI * p.unsigned_abs() as f64,
        0.0,
        tmax,
    )?;
    Ok(2.0 * l * v.re)
}

/// λ_p^{(L)} for p = 0, 1, … up to the point where zλ_p is negligible.
#[derive(Debug, Clone)]
pub struct FiniteLSpectrum {
    l: f64,
    z: f64,
    values: Vec<f64>,
}

impl FiniteLSpectrum {
    /// Stops once λ_p < 1e−16 · min(λ_0, 1/z) for three consecutive p.
    pub fn new(family: &KernelFamily, l: f64, z: f64) -> Result<Self> {
        check_fugacity(z)?;
        let l0 = finite_l_eigenvalue(family, l, 0)?;
        let mut values = vec![l0];
        if z == 0.0 {
            return Ok(FiniteLSpectrum { l, z, values });
        }
        let thr = SPECTRAL_CUTOFF * l0.abs().min(1.0 / z);
        let mut run = 0;
        for p in 1..=MAX_MODES as i64 {
            let v = finite_l_eigenvalue(family, l, p)?;
            values.push(v);
            if v.abs() < thr {
                run += 1;
                if run >= TAIL_RUN {
                    values.truncate(values.len() - TAIL_RUN);
                    return Ok(FiniteLSpectrum { l, z, values });
                }
            } else {
                run = 0;
            }
        }
        Err(Error::Truncation(format!(
            "finite-L eigenvalues still above {thr:e} after {MAX_MODES} modes"
        )))
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    /// λ_p for p ≥ 0 (λ_{−p} = λ_p).
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// log Ξ^{(L)} = Σ_p log(1 + zλ_p).
    pub fn log_partition(&self) -> f64 {
        if self.z == 0.0 {
            return 0.0;
        }
        let lz = self.z.ln();
        let tail: f64 = self.values[1..].iter().rev().map(|v| log1p_zl(lz, *v)).sum();
        log1p_zl(lz, self.values[0]) + 2.0 * tail
    }

    /// K^{(L)}(X, Y) = (z/L) Σ_p e^{2πi(Y−X)p/L} λ_p/(1 + zλ_p).
    pub fn kernel(&self, x: f64, y: f64) -> Complex64 {
        if self.z == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let lz = self.z.ln();
        let w = 2.0 * PI * (y - x) / self.l;
        let tail: f64 = self
            .values
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .map(|(p, v)| occupancy(lz, *v) * (w * p as f64).cos())
            .sum();
        Complex64::new((occupancy(lz, self.values[0]) + 2.0 * tail) / self.l, 0.0)
    }

    pub fn density(&self) -> f64 {
        self.kernel(0.0, 0.0).re
    }
}

pub fn finite_l_log_partition(family: &KernelFamily, l: f64, z: f64) -> Result<f64> {
    Ok(FiniteLSpectrum::new(family, l, z)?.log_partition())
}

pub fn finite_l_kernel(family: &KernelFamily, l: f64, z: f64, x: f64, y: f64) -> Result<Complex64> {
    Ok(FiniteLSpectrum::new(family, l, z)?.kernel(x, y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_finite::circulant_eigenvalues;
    use crate::model::CirculantEnsemble;
    use crate::spectral_limits::thermo_pressure;
    use approx::assert_abs_diff_eq;

    fn g1() -> KernelFamily {
        KernelFamily::gaussian(1.0).unwrap()
    }

    #[test]
    fn symmetric_in_p() {
        let a = finite_l_eigenvalue(&g1(), 5.0, 3).unwrap();
        assert_eq!(a, finite_l_eigenvalue(&g1(), 5.0, -3).unwrap());
    }

    #[test]
    fn riemann_limit_of_circulant_eigenvalues() {
        let (l, m) = (8.0, 1024);
        let ens = CirculantEnsemble::new(m, l, 1.0, g1()).unwrap();
        let lam = l / m as f64 * circulant_eigenvalues(&ens).unwrap().get(2);
        let exact = finite_l_eigenvalue(&g1(), l, 2).unwrap();
        assert!((lam - exact).abs() / exact < 1e-6);
    }

    #[test]
    fn large_circle_approaches_continuum_density() {
        // p = sL with s = 0.25; the chord shortens distances by O(1/L²)
        let exact = (-PI * 0.0625f64).exp();
        let err = |l: f64| (finite_l_eigenvalue(&g1(), l, (l / 4.0) as i64).unwrap() - exact) / exact;
        let (e64, e128) = (err(64.0), err(128.0));
        assert!(e64.abs() < 1e-4);
        assert!((e64 / e128 - 4.0).abs() < 0.05, "{e64} {e128}");
    }

    #[test]
    fn zero_fugacity_and_periodicity() {
        let s = FiniteLSpectrum::new(&g1(), 6.0, 0.0).unwrap();
        assert_eq!(s.log_partition(), 0.0);
        assert_eq!(s.kernel(0.2, 1.3), Complex64::new(0.0, 0.0));
        let s = FiniteLSpectrum::new(&g1(), 6.0, 1.3).unwrap();
        assert_abs_diff_eq!(s.kernel(0.4, 0.4 + 6.0).re, s.kernel(0.4, 0.4).re, epsilon = 1e-12);
        assert_abs_diff_eq!(s.kernel(0.4, 1.1).re, s.kernel(1.1, 0.4).re, epsilon = 1e-15);
    }

    #[test]
    fn pressure_converges_with_l() {
        let bp = thermo_pressure(&g1(), 1.0).unwrap();
        let errs: Vec<f64> = [8.0, 16.0, 32.0]
            .iter()
            .map(|&l| (finite_l_log_partition(&g1(), l, 1.0).unwrap() / l - bp).abs())
            .collect();
        assert!(errs[0] > errs[1] && errs[1] > errs[2]);
    }
}
