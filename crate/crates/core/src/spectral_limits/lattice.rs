//! Infinite lattice at fixed spacing τ.

use std::f64::consts::PI;

use super::{check_fugacity, log1p_zl, occupancy};
use crate::error::{Error, Result};
use crate::model::KernelFamily;
use crate::quad::{half_period_panels, Integrator};

/// The symbol f̃(e^{2πit}) = Σ_s g(τs) e^{2πist} with its coefficients
/// truncated beyond the family's decay radius.
#[derive(Debug, Clone)]
pub struct LatticeSymbol {
    tau: f64,
    coeffs: Vec<f64>,
}

impl LatticeSymbol {
    pub fn new(family: &KernelFamily, tau: f64) -> Result<Self> {
        if !family.is_real_even_1d() {
            return Err(family.unsupported("lattice regime"));
        }
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::invalid(format!("lattice spacing must be positive (got {tau})")));
        }
        let r = family.decay_radius();
        let n = (r / tau).ceil();
        if !(n < 1e7) {
            return Err(Error::Truncation(format!(
                "decay radius {r} needs {n} lattice terms at spacing {tau}"
            )));
        }
        let coeffs = (0..=n as usize)
            .map(|s| family.g(tau * s as f64))
            .collect::<Result<Vec<_>>>()?;
        Ok(LatticeSymbol { tau, coeffs })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn eval(&self, t: f64) -> f64 {
        let w = 2.0 * PI * t;
        let tail: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .map(|(s, c)| c * (w * s as f64).cos())
            .sum();
        self.coeffs[0] + 2.0 * tail
    }

    /// Panel breakpoints on [0, 1/2], denser near t = 0 where the symbol
    /// concentrates for small τ.
    fn breaks(&self) -> Vec<f64> {
        let mut b = vec![0.0];
        let mut t = self.tau / 4.0;
        while t < 0.5 {
            b.push(t);
            t *= 4.0;
        }
        b.push(0.5);
        b
    }

    /// ∫_{−1/2}^{1/2} f(f̃(t)) cos(2πjt) dt, for integrands whose slope in f̃
    /// is at most z. The summed symbol carries rounding of order ε Σ|c_s|,
    /// which sets the absolute agreement floor on each piece.
    fn integrate(&self, j: i64, z: f64, f: impl Fn(f64) -> f64) -> Result<f64> {
        let omega = 2.0 * PI * j as f64;
        let l1 = self.coeffs[0].abs() + 2.0 * self.coeffs[1..].iter().map(|c| c.abs()).sum::<f64>();
        let noise = 16.0 * f64::EPSILON * z * l1;
        let mut acc = 0.0;
        for w in self.breaks().windows(2) {
            let q = Integrator::default()
                .with_min_panels(half_period_panels(w[1] - w[0], omega))
                .with_abs_tol((noise * (w[1] - w[0])).max(1e-300));
            acc += q.integrate(|t| f(self.eval(t)) * (omega * t).cos(), w[0], w[1])?;
        }
        Ok(2.0 * acc)
    }
}

/// f̃^∞(e^{2πit}) = Σ_s g(τs) e^{2πist}.
pub fn lattice_spectral_density(family: &KernelFamily, tau: f64, t: f64) -> Result<f64> {
    Ok(LatticeSymbol::new(family, tau)?.eval(t))
}

/// τβP^{(τ)} = ∫_{−1/2}^{1/2} log(1 + z f̃(e^{2πit})) dt.
pub fn lattice_pressure(family: &KernelFamily, tau: f64, z: f64) -> Result<f64> {
    check_fugacity(z)?;
    let sym = LatticeSymbol::new(family, tau)?;
    if z == 0.0 {
        return Ok(0.0);
    }
    let lz = z.ln();
    sym.integrate(0, z, |f| log1p_zl(lz, f))
}

/// ρ^{(τ)} = ∫ z f̃/(1 + z f̃) dt, the density per site.
pub fn lattice_density(family: &KernelFamily, tau: f64, z: f64) -> Result<f64> {
    lattice_kernel(family, tau, z, 0)
}

/// K^{(τ)}(x, x + j) = ∫ z e^{2πijt} f̃/(1 + z f̃) dt, real and even in j.
pub fn lattice_kernel(family: &KernelFamily, tau: f64, z: f64, j: i64) -> Result<f64> {
    check_fugacity(z)?;
    let sym = LatticeSymbol::new(family, tau)?;
    if z == 0.0 {
        return Ok(0.0);
    }
    let lz = z.ln();
    sym.integrate(j, z, |f| occupancy(lz, f))
}

/// ∫ z f̃/(1 + z f̃)² dt, the analytic (z d/dz)² of τβP^{(τ)}.
pub fn lattice_occupancy_variance(family: &KernelFamily, tau: f64, z: f64) -> Result<f64> {
    check_fugacity(z)?;
    let sym = LatticeSymbol::new(family, tau)?;
    if z == 0.0 {
        return Ok(0.0);
    }
    let lz = z.ln();
    sym.integrate(0, z, |f| {
        let k = occupancy(lz, f);
        k * (1.0 - k)
    })
}
