//! The complex Hermitian family h(u) = 1/u in the thermodynamic limit.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{check_fugacity, edge_breaks, logistic, thermo_pressure, SPECTRAL_CUTOFF};
use crate::error::{Error, Result};
use crate::model::KernelFamily;
use crate::quad::{half_period_panels, FourierTable, Integrator};

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("eps must be positive (got {eps})")))
    }
}

/// λ(s) = 2π e^{−4πεs} for s ≥ 0 and 0 otherwise.
pub fn complex_thermo_spectral_density(eps: f64, s: f64) -> Result<f64> {
    check_eps(eps)?;
    Ok(if s >= 0.0 {
        2.0 * PI * (-4.0 * PI * eps * s).exp()
    } else {
        0.0
    })
}

/// Fugacity tied to the field h by 1/(2πz) = e^{−4εh}.
pub fn gaudin_fugacity(eps: f64, h: f64) -> f64 {
    (4.0 * eps * h).exp() / (2.0 * PI)
}

/// Weight 1/((2πz)^{-1} e^{4πεs} + 1) with its panel breakpoints on s ≥ 0.
fn weight_and_breaks(eps: f64, z: f64) -> (impl Fn(f64) -> f64, Vec<f64>) {
    let ln_a = -(2.0 * PI * z).ln();
    let rate = 4.0 * PI * eps;
    let smax = ((-ln_a).max(0.0) - SPECTRAL_CUTOFF.ln()) / rate;
    let mut b = vec![0.0, smax];
    if ln_a < 0.0 {
        edge_breaks(&mut b, -ln_a / rate, 1.0 / rate);
    }
    (move |s: f64| logistic(-(ln_a + rate * s)), b)
}

/// K(X, Y) = ∫_0^∞ e^{2πirs} / ((2πz)^{-1} e^{4πεs} + 1) ds at r = X − Y,
/// evaluated for |r| and conjugated for r < 0.
pub fn gaudin_kernel(eps: f64, z: f64, r: f64) -> Result<Complex64> {
    check_eps(eps)?;
    check_fugacity(z)?;
    if z == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let (w, breaks) = weight_and_breaks(eps, z);
    let omega = 2.0 * PI * r.abs();
    let (mut re, mut im) = (0.0, 0.0);
    for p in breaks.windows(2) {
        let q = Integrator::default().with_min_panels(half_period_panels(p[1] - p[0], omega));
        re += q.integrate(|s| w(s) * (omega * s).cos(), p[0], p[1])?;
        if omega != 0.0 {
            im += q.integrate(|s| w(s) * (omega * s).sin(), p[0], p[1])?;
        }
    }
    let k = Complex64::new(re, im);
    Ok(if r < 0.0 { k.conj() } else { k })
}

/// βP = ∫_0^∞ log(1 + 2πz e^{−4πεs}) ds.
pub fn gaudin_pressure(eps: f64, z: f64) -> Result<f64> {
    thermo_pressure(&KernelFamily::inverse_argument(eps)?, z)
}

/// Large-|r| form of the kernel with z tied to h:
/// (1/2πi) (−1/r + π e^{2ihr} / (2ε sinh(πr/2ε))).
pub fn gaudin_asymptotic(eps: f64, h: f64, r: f64) -> Result<Complex64> {
    check_eps(eps)?;
    if !(h > 0.0) || r == 0.0 {
        return Err(Error::invalid("need h > 0 and r != 0"));
    }
    let osc = Complex64::from_polar(PI / (2.0 * eps * (PI * r / (2.0 * eps)).sinh()), 2.0 * h * r);
    Ok((Complex64::new(-1.0 / r, 0.0) + osc) / Complex64::new(0.0, 2.0 * PI))
}

/// Non-oscillatory large-|r| part of ρ₂ − ρ²: −1/(4π²r²) − 1/(16ε² sinh²(πr/2ε)).
pub fn gaudin_truncated_two_point(eps: f64, h: f64, r: f64) -> Result<f64> {
    check_eps(eps)?;
    if !(h > 0.0) || r == 0.0 {
        return Err(Error::invalid("need h > 0 and r != 0"));
    }
    let sh = (PI * r / (2.0 * eps)).sinh();
    Ok(-1.0 / (4.0 * PI * PI * r * r) - 1.0 / (16.0 * eps * eps * sh * sh))
}

/// Fixed-node table of the Gaudin kernel for |r| ≤ max_sep.
#[derive(Debug, Clone)]
pub(crate) struct GaudinTable {
    table: FourierTable,
}

impl GaudinTable {
    pub(crate) fn new(eps: f64, z: f64, max_sep: f64) -> Result<Self> {
        check_eps(eps)?;
        check_fugacity(z)?;
        let (w, breaks) = if z == 0.0 {
            let (w, _) = weight_and_breaks(eps, 1.0);
            (w, vec![])
        } else {
            weight_and_breaks(eps, z)
        };
        let table = FourierTable::build(w, &breaks, 2.0 * PI, max_sep, false, 1e-14)?;
        Ok(GaudinTable { table })
    }

    pub(crate) fn value(&self, r: f64) -> Complex64 {
        self.table.eval(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral_limits::{sine_kernel, thermo_density, thermo_kernel};
    use approx::assert_abs_diff_eq;

    #[test]
    fn one_sided_support() {
        assert_eq!(complex_thermo_spectral_density(1.0, -0.1).unwrap(), 0.0);
        assert_eq!(complex_thermo_spectral_density(1.0, 0.0).unwrap(), 2.0 * PI);
        let fam = KernelFamily::inverse_argument(0.3).unwrap();
        assert_eq!(crate::spectral_limits::thermo_spectral_density(&fam, -1e-9).unwrap(), 0.0);
    }

    #[test]
    fn two_quadrature_routes_agree() {
        let fam = KernelFamily::inverse_argument(1.0).unwrap();
        for r in [0.0, 0.7, -2.0, 6.0] {
            let a = gaudin_kernel(1.0, 1.0, r).unwrap();
            // same integral reached through the generic spectral-density route
            let b = thermo_kernel(&fam, 1.0, r).unwrap();
            assert!((a - b).norm() < 1e-10, "r={r} {a} {b}");
        }
        let rho = gaudin_kernel(1.0, 1.0, 0.0).unwrap();
        assert_abs_diff_eq!(rho.re, thermo_density(&fam, 1.0).unwrap(), epsilon = 1e-12);
        assert_eq!(rho.im, 0.0);
    }

    #[test]
    fn hermitian_in_separation() {
        let a = gaudin_kernel(0.5, 2.0, 1.3).unwrap();
        let b = gaudin_kernel(0.5, 2.0, -1.3).unwrap();
        assert_eq!(a, b.conj());
        assert_eq!(gaudin_kernel(0.5, 0.0, 1.3).unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(gaudin_pressure(0.5, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn pressure_closed_form_small_z() {
        // ∫_0^∞ log(1 + a e^{−bs}) ds = −Li₂(−a)/b, Li₂(−a) ≈ −a + a²/4 − a³/9 for small a
        let (eps, z) = (0.7, 1e-4);
        let a = 2.0 * PI * z;
        let li2 = -a + a * a / 4.0 - a * a * a / 9.0;
        let expect = -li2 / (4.0 * PI * eps);
        assert!((gaudin_pressure(eps, z).unwrap() - expect).abs() / expect < 1e-10);
    }

    #[test]
    fn asymptotic_form_tracks_kernel() {
        let (eps, h) = (1.0, 1.0);
        let z = gaudin_fugacity(eps, h);
        let a = 1.0 / (2.0 * PI * z);
        for r in [5.0, 10.0, 20.0] {
            let exact = gaudin_kernel(eps, z, r).unwrap();
            let asy = gaudin_asymptotic(eps, h, r).unwrap();
            // the leading term carries weight 1 where the exact one has 1/(1 + A)
            assert!((asy - exact).norm() / exact.norm() < 1.2 * a / (1.0 + a));
        }
    }

    #[test]
    fn sine_limit() {
        let (eps, h, r) = (50.0, 1.0, 1.0);
        let k = gaudin_kernel(eps, gaudin_fugacity(eps, h), r).unwrap();
        let target = Complex64::from_polar(sine_kernel(h, r).unwrap(), r * h);
        assert!((k - target).norm() < 1e-3);
    }

    #[test]
    fn table_matches_adaptive() {
        let t = GaudinTable::new(1.0, 1.0, 6.0).unwrap();
        for r in [0.0, 1.5, -4.0, 6.0] {
            assert!((t.value(r) - gaudin_kernel(1.0, 1.0, r).unwrap()).norm() < 1e-12);
        }
    }
}
