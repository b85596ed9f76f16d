//! d-dimensional Gaussian family: pressure by radial reduction and by
//! cartesian quadrature, and the free-fermion kernel by Bessel reduction.

use std::f64::consts::PI;

use super::thermo::{fermi, fermion_breaks};
use super::{check_fugacity, softplus, Spectrum1d};
use crate::error::{Error, Result};
use crate::quad::{half_period_panels, GaussLegendre, Integrator};
use crate::special::{bessel_j_radial, unit_sphere_area};

const CARTESIAN_MAX_D: usize = 3;
const TENSOR_TOL: f64 = 1e-12;

fn check_cd(c: f64, d: usize) -> Result<()> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::invalid(format!("c must be positive (got {c})")));
    }
    if d == 0 {
        return Err(Error::invalid("dimension must be at least 1"));
    }
    Ok(())
}

/// λ(s) = e^{−πc|s|²}.
pub fn ddim_spectral_density(c: f64, d: usize, s: &[f64]) -> Result<f64> {
    check_cd(c, d)?;
    if s.len() != d {
        return Err(Error::invalid(format!("expected {d} coordinates, got {}", s.len())));
    }
    Ok((-PI * c * s.iter().map(|x| x * x).sum::<f64>()).exp())
}

/// βP = |Ω_d| ∫_0^∞ r^{d−1} log(1 + z e^{−πcr²}) dr.
pub fn ddim_pressure_radial(c: f64, d: usize, z: f64) -> Result<f64> {
    check_cd(c, d)?;
    check_fugacity(z)?;
    if z == 0.0 {
        return Ok(0.0);
    }
    let lz = z.ln();
    let breaks = Spectrum1d::Gaussian { c }.breaks(lz)?;
    let v = Integrator::default().integrate_pieces(
        |r: f64| r.powi(d as i32 - 1) * softplus(lz - PI * c * r * r),
        &breaks,
    )?;
    Ok(unit_sphere_area(d) * v)
}

/// Gauss–Legendre nodes over consecutive pieces, `panels` panels per piece.
fn axis_rule(breaks: &[f64], panels: usize) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::cached(20);
    let mut out = Vec::new();
    for w in breaks.windows(2) {
        let h = (w[1] - w[0]) / panels as f64;
        for k in 0..panels {
            let (x, wt) = rule.mapped(w[0] + h * k as f64, w[0] + h * (k + 1) as f64);
            out.extend(x.into_iter().zip(wt));
        }
    }
    out
}

/// Tensor-product quadrature of f over the cube given by per-axis breakpoints,
/// doubling panels until two estimates agree.
fn tensor_integrate(d: usize, breaks: &[f64], min_panels: usize, f: impl Fn(&[f64]) -> f64) -> Result<f64> {
    let eval = |panels: usize| {
        let axis = axis_rule(breaks, panels);
        let mut x = vec![0.0; d];
        nested_sum(&axis, &mut x, 0, &f)
    };
    let mut panels = min_panels.max(1);
    let mut prev = eval(panels);
    for _ in 0..5 {
        panels *= 2;
        let next = eval(panels);
        if (next - prev).abs() <= TENSOR_TOL * next.abs().max(1e-300) {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Quadrature(format!(
        "cartesian quadrature did not settle at {panels} panels per piece"
    )))
}

/// One axis at a time, so each partial sum only runs over a single axis.
fn nested_sum(axis: &[(f64, f64)], x: &mut [f64], k: usize, f: &impl Fn(&[f64]) -> f64) -> f64 {
    let mut acc = 0.0;
    for &(node, w) in axis {
        x[k] = node;
        acc += w * if k + 1 == x.len() { f(x) } else { nested_sum(axis, x, k + 1, f) };
    }
    acc
}

/// ∫_{R^d} log(1 + z e^{−πc|s|²}) ds by full cartesian quadrature (d ≤ 3).
pub fn ddim_pressure_cartesian(c: f64, d: usize, z: f64) -> Result<f64> {
    check_cd(c, d)?;
    check_fugacity(z)?;
    if d > CARTESIAN_MAX_D {
        return Err(Error::invalid(format!(
            "cartesian quadrature is limited to d <= {CARTESIAN_MAX_D}"
        )));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    let lz = z.ln();
    let half = Spectrum1d::Gaussian { c }.breaks(lz)?;
    let breaks = mirrored(&half);
    tensor_integrate(d, &breaks, 1, |s| {
        softplus(lz - PI * c * s.iter().map(|x| x * x).sum::<f64>())
    })
}

fn mirrored(half: &[f64]) -> Vec<f64> {
    let mut b: Vec<f64> = half.iter().rev().map(|x| -x).collect();
    b.extend(half.iter().skip(1));
    b
}

/// (2π)^{−d} ∫_{R^d} e^{ik·x} / (e^{β(k²−μ)} + 1) dk at |x| = r, reduced to
/// (2π)^{−d/2} r^{1−d/2} ∫_0^∞ F(k) J_{d/2−1}(kr) k^{d/2} dk.
pub fn ddim_kernel(beta: f64, mu: f64, d: usize, r: f64) -> Result<f64> {
    if !(beta > 0.0 && beta.is_finite() && mu.is_finite()) {
        return Err(Error::invalid("need beta > 0 and finite mu"));
    }
    if d == 0 {
        return Err(Error::invalid("dimension must be at least 1"));
    }
    let r = r.abs();
    let breaks = fermion_breaks(beta, mu);
    let df = d as f64;
    if r == 0.0 {
        let v = Integrator::default()
            .integrate_pieces(|k: f64| fermi(beta, mu, k) * k.powi(d as i32 - 1), &breaks)?;
        return Ok(unit_sphere_area(d) * v / (2.0 * PI).powi(d as i32));
    }
    let mut acc = 0.0;
    for w in breaks.windows(2) {
        let q = Integrator::default().with_min_panels(half_period_panels(w[1] - w[0], r));
        acc += q.integrate(
            |k| {
                if k == 0.0 {
                    0.0
                } else {
                    fermi(beta, mu, k) * bessel_j_radial(d, k * r) * k.powf(df / 2.0)
                }
            },
            w[0],
            w[1],
        )?;
    }
    Ok((2.0 * PI).powf(-df / 2.0) * r.powf(1.0 - df / 2.0) * acc)
}

/// The same kernel by full cartesian quadrature with x along the first axis (d ≤ 3).
pub fn ddim_kernel_cartesian(beta: f64, mu: f64, d: usize, r: f64) -> Result<f64> {
    if !(beta > 0.0 && beta.is_finite() && mu.is_finite()) {
        return Err(Error::invalid("need beta > 0 and finite mu"));
    }
    if d == 0 || d > CARTESIAN_MAX_D {
        return Err(Error::invalid(format!(
            "cartesian quadrature is limited to 1 <= d <= {CARTESIAN_MAX_D}"
        )));
    }
    let breaks = mirrored(&fermion_breaks(beta, mu));
    let kmax = breaks[breaks.len() - 1];
    let min_panels = half_period_panels(kmax, r).max(1);
    let v = tensor_integrate(d, &breaks, min_panels, |k| {
        let k2: f64 = k.iter().map(|x| x * x).sum();
        fermi(beta, mu, k2.sqrt()) * (k[0] * r).cos()
    })?;
    Ok(v / (2.0 * PI).powi(d as i32))
}
