//! Small special-function helpers for the d-dimensional radial reductions.

use std::f64::consts::PI;

use crate::quad::GaussLegendre;

/// Γ(d/2) for a positive integer d.
pub fn gamma_half(d: usize) -> f64 {
    assert!(d >= 1);
    // Γ(1/2) = √π, Γ(1) = 1, Γ(x + 1) = x Γ(x)
    let (mut g, mut x) = if d % 2 == 0 { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
    let target = d as f64 / 2.0;
    while x < target - 1e-12 {
        g *= x;
        x += 1.0;
    }
    g
}

/// Surface area of the unit sphere in R^d: 2 π^{d/2} / Γ(d/2).
pub fn unit_sphere_area(d: usize) -> f64 {
    2.0 * PI.powf(d as f64 / 2.0) / gamma_half(d)
}

/// Bessel function J_n for integer n ≥ 0, from Bessel's integral
/// J_n(x) = (1/π) ∫_0^π cos(nθ − x sin θ) dθ.
pub fn bessel_j_int(n: u32, x: f64) -> f64 {
    let rule = GaussLegendre::cached(32);
    let panels = ((x.abs() + n as f64) / 4.0).ceil().max(1.0) as usize;
    let h = PI / panels as f64;
    let nf = n as f64;
    let mut acc = 0.0;
    for k in 0..panels {
        let lo = h * k as f64;
        let (v, _) = rule.integrate(&|t: f64| (nf * t - x * t.sin()).cos(), lo, lo + h);
        acc += v;
    }
    acc / PI
}

/// Bessel function of half-integer order ν = k + 1/2 (k ≥ −1) for x > 0,
/// from the elementary forms of J_{±1/2} and upward recurrence.
pub fn bessel_j_half(k: i32, x: f64) -> f64 {
    assert!(k >= -1 && x > 0.0);
    let pref = (2.0 / (PI * x)).sqrt();
    let j_m = pref * x.cos(); // J_{-1/2}
    if k == -1 {
        return j_m;
    }
    let mut prev = j_m;
    let mut cur = pref * x.sin(); // J_{1/2}
    let mut nu = 0.5;
    for _ in 0..k {
        let next = 2.0 * nu / x * cur - prev;
        prev = cur;
        cur = next;
        nu += 1.0;
    }
    cur
}

/// J_{d/2 − 1}(x) for x > 0, the order appearing in d-dimensional radial Fourier transforms.
pub fn bessel_j_radial(d: usize, x: f64) -> f64 {
    assert!(d >= 1);
    if d % 2 == 0 {
        bessel_j_int((d / 2 - 1) as u32, x)
    } else {
        // d/2 − 1 = (d − 3)/2 + 1/2
        bessel_j_half((d as i32 - 3) / 2, x)
    }
}
