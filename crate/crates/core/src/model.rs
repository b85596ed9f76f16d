//! Domain types shared by every regime: kernel families, finite ensembles and
//! the free-fermion parametrisation.

use std::f64::consts::PI;
use std::fmt;
use std::ops::RangeInclusive;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Magnitude below which a family's entry function counts as vanished.
pub const DECAY_THRESHOLD: f64 = 1e-18;

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type VectorFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type ComplexFn = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

/// Broad class of a family, deciding which regimes accept it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyClass {
    /// Real, even entry function of one variable.
    RealEven,
    /// Odd `h` with a regulariser ε, giving a complex Hermitian operator.
    ComplexOdd,
    /// Real even entry function of `d` variables.
    RealEvenD(usize),
}

/// User-supplied real even entry function.
#[derive(Clone)]
pub struct CustomEven {
    pub name: String,
    pub g: RealFn,
    /// |g(u)| < 1e-18 for |u| beyond this radius.
    pub decay_radius: f64,
    /// Optional radius beyond which the spectral density is negligible.
    pub spectral_radius: Option<f64>,
}

/// User-supplied odd function `h` for the complex Hermitian construction.
#[derive(Clone)]
pub struct CustomOdd {
    pub name: String,
    pub h: ComplexFn,
    pub eps: f64,
    pub decay_radius: f64,
    pub spectral_radius: Option<f64>,
}

/// User-supplied real even entry function of `d` variables.
#[derive(Clone)]
pub struct CustomEvenD {
    pub name: String,
    pub g: VectorFn,
    pub d: usize,
    pub decay_radius: f64,
}

/// The function defining the entries of the L-matrix or L-operator.
#[derive(Clone)]
pub enum KernelFamily {
    /// g(u) = c^{-1/2} exp(-π u² / c)
    Gaussian { c: f64 },
    /// g(u) = c^{-d/2} exp(-π |u|² / c)
    GaussianD { c: f64, d: usize },
    /// h(u) = 1/u with regulariser ε
    InverseArgument { eps: f64 },
    CustomEven(CustomEven),
    CustomOdd(CustomOdd),
    CustomEvenD(CustomEvenD),
}

impl fmt::Debug for KernelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelFamily::Gaussian { c } => write!(f, "Gaussian {{ c: {c} }}"),
            KernelFamily::GaussianD { c, d } => write!(f, "GaussianD {{ c: {c}, d: {d} }}"),
            KernelFamily::InverseArgument { eps } => write!(f, "InverseArgument {{ eps: {eps} }}"),
            KernelFamily::CustomEven(g) => write!(f, "CustomEven({})", g.name),
            KernelFamily::CustomOdd(h) => write!(f, "CustomOdd({}, eps = {})", h.name, h.eps),
            KernelFamily::CustomEvenD(g) => write!(f, "CustomEvenD({}, d = {})", g.name, g.d),
        }
    }
}

const EVEN_PROBES: usize = 64;

impl KernelFamily {
    pub fn gaussian(c: f64) -> Result<Self> {
        check_positive("c", c)?;
        Ok(KernelFamily::Gaussian { c })
    }

    pub fn gaussian_d(c: f64, d: usize) -> Result<Self> {
        check_positive("c", c)?;
        if d == 0 {
            return Err(Error::invalid("dimension d must be at least 1"));
        }
        Ok(KernelFamily::GaussianD { c, d })
    }

    pub fn inverse_argument(eps: f64) -> Result<Self> {
        check_positive("eps", eps)?;
        Ok(KernelFamily::InverseArgument { eps })
    }

    /// Wraps a user function, checking evenness on a probe grid to 1e-12.
    pub fn custom_even(
        name: impl Into<String>,
        g: impl Fn(f64) -> f64 + Send + Sync + 'static,
        decay_radius: f64,
    ) -> Result<Self> {
        check_positive("decay_radius", decay_radius)?;
        let g: RealFn = Arc::new(g);
        for k in 0..=EVEN_PROBES {
            let u = 1.5 * decay_radius * k as f64 / EVEN_PROBES as f64;
            let (a, b) = (g(u), g(-u));
            if !a.is_finite() || (a - b).abs() > 1e-12 * a.abs().max(1.0) {
                return Err(Error::invalid(format!("g is not even at u = {u}")));
            }
        }
        Ok(KernelFamily::CustomEven(CustomEven {
            name: name.into(),
            g,
            decay_radius,
            spectral_radius: None,
        }))
    }

    /// Wraps a user odd `h` (evaluated at complex arguments), checking oddness on the real axis.
    pub fn custom_odd(
        name: impl Into<String>,
        h: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static,
        eps: f64,
        decay_radius: f64,
    ) -> Result<Self> {
        check_positive("eps", eps)?;
        check_positive("decay_radius", decay_radius)?;
        let h: ComplexFn = Arc::new(h);
        for k in 1..=EVEN_PROBES {
            let u = Complex64::new(1.5 * decay_radius * k as f64 / EVEN_PROBES as f64, eps);
            let (a, b) = (h(u), h(-u));
            if (a + b).norm() > 1e-12 * a.norm().max(1.0) {
                return Err(Error::invalid(format!("h is not odd at u = {u}")));
            }
        }
        Ok(KernelFamily::CustomOdd(CustomOdd {
            name: name.into(),
            h,
            eps,
            decay_radius,
            spectral_radius: None,
        }))
    }

    /// Wraps a user function of `d` variables, checking g(u) = g(−u) on probes.
    pub fn custom_even_d(
        name: impl Into<String>,
        g: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        d: usize,
        decay_radius: f64,
    ) -> Result<Self> {
        check_positive("decay_radius", decay_radius)?;
        if d == 0 {
            return Err(Error::invalid("dimension d must be at least 1"));
        }
        let g: VectorFn = Arc::new(g);
        for k in 0..=EVEN_PROBES {
            let u: Vec<f64> = (0..d)
                .map(|j| decay_radius * ((k * (j + 3)) % 17) as f64 / 17.0 * if j % 2 == 0 { 1.0 } else { -1.0 })
                .collect();
            let neg: Vec<f64> = u.iter().map(|x| -x).collect();
            let (a, b) = (g(&u), g(&neg));
            if !a.is_finite() || (a - b).abs() > 1e-12 * a.abs().max(1.0) {
                return Err(Error::invalid(format!("g is not even at u = {u:?}")));
            }
        }
        Ok(KernelFamily::CustomEvenD(CustomEvenD {
            name: name.into(),
            g,
            d,
            decay_radius,
        }))
    }

    /// Declares where the spectral density of a custom family becomes negligible.
    pub fn with_spectral_radius(mut self, radius: f64) -> Result<Self> {
        check_positive("spectral_radius", radius)?;
        match &mut self {
            KernelFamily::CustomEven(g) => g.spectral_radius = Some(radius),
            KernelFamily::CustomOdd(h) => h.spectral_radius = Some(radius),
            _ => {
                return Err(Error::invalid(
                    "spectral radius can only be declared for custom one-dimensional families",
                ))
            }
        }
        Ok(self)
    }

    pub fn class(&self) -> FamilyClass {
        match self {
            KernelFamily::Gaussian { .. } | KernelFamily::CustomEven(_) => FamilyClass::RealEven,
            KernelFamily::InverseArgument { .. } | KernelFamily::CustomOdd(_) => FamilyClass::ComplexOdd,
            KernelFamily::GaussianD { d, .. } => FamilyClass::RealEvenD(*d),
            KernelFamily::CustomEvenD(g) => FamilyClass::RealEvenD(g.d),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            KernelFamily::Gaussian { .. } => "Gaussian",
            KernelFamily::GaussianD { .. } => "GaussianD",
            KernelFamily::InverseArgument { .. } => "InverseArgument",
            KernelFamily::CustomEven(_) => "CustomEven",
            KernelFamily::CustomOdd(_) => "CustomOdd",
            KernelFamily::CustomEvenD(_) => "CustomEvenD",
        }
    }

    /// Spatial dimension of the entry function.
    pub fn dimension(&self) -> usize {
        match self.class() {
            FamilyClass::RealEvenD(d) => d,
            _ => 1,
        }
    }

    /// True for one-dimensional real even families, including `GaussianD` with d = 1.
    pub fn is_real_even_1d(&self) -> bool {
        matches!(self.class(), FamilyClass::RealEven | FamilyClass::RealEvenD(1))
    }

    /// Evaluates a one-dimensional real even entry function g(u).
    pub fn g(&self, u: f64) -> Result<f64> {
        match self {
            KernelFamily::Gaussian { c } => Ok(gaussian_g(*c, 1, u * u)),
            KernelFamily::GaussianD { c, d: 1 } => Ok(gaussian_g(*c, 1, u * u)),
            KernelFamily::CustomEven(g) => Ok((g.g)(u)),
            KernelFamily::CustomEvenD(g) if g.d == 1 => Ok((g.g)(&[u])),
            _ => Err(self.unsupported("g")),
        }
    }

    /// Evaluates a d-dimensional real even entry function g(u).
    pub fn g_vec(&self, u: &[f64]) -> Result<f64> {
        if u.len() != self.dimension() || self.class() == FamilyClass::ComplexOdd {
            return Err(self.unsupported("g_vec"));
        }
        match self {
            KernelFamily::Gaussian { c } => Ok(gaussian_g(*c, 1, u[0] * u[0])),
            KernelFamily::GaussianD { c, d } => {
                Ok(gaussian_g(*c, *d, u.iter().map(|x| x * x).sum()))
            }
            KernelFamily::CustomEven(g) => Ok((g.g)(u[0])),
            KernelFamily::CustomEvenD(g) => Ok((g.g)(u)),
            _ => Err(self.unsupported("g_vec")),
        }
    }

    /// Evaluates the odd function h at a complex argument.
    pub fn h(&self, u: Complex64) -> Result<Complex64> {
        match self {
            KernelFamily::InverseArgument { .. } => Ok(u.inv()),
            KernelFamily::CustomOdd(h) => Ok((h.h)(u)),
            _ => Err(self.unsupported("h")),
        }
    }

    /// Regulariser ε of a complex family.
    pub fn eps(&self) -> Option<f64> {
        match self {
            KernelFamily::InverseArgument { eps } => Some(*eps),
            KernelFamily::CustomOdd(h) => Some(h.eps),
            _ => None,
        }
    }

    /// Radius beyond which |g| (per coordinate norm) is below 1e-18.
    pub fn decay_radius(&self) -> f64 {
        match self {
            KernelFamily::Gaussian { c } => gaussian_decay_radius(*c, 1),
            KernelFamily::GaussianD { c, d } => gaussian_decay_radius(*c, *d),
            KernelFamily::InverseArgument { .. } => f64::INFINITY,
            KernelFamily::CustomEven(g) => g.decay_radius,
            KernelFamily::CustomOdd(h) => h.decay_radius,
            KernelFamily::CustomEvenD(g) => g.decay_radius,
        }
    }

    pub(crate) fn unsupported(&self, op: &'static str) -> Error {
        Error::UnsupportedFamily {
            op,
            family: self.name(),
        }
    }
}

fn gaussian_g(c: f64, d: usize, u2: f64) -> f64 {
    c.powf(-(d as f64) / 2.0) * (-PI * u2 / c).exp()
}

fn gaussian_decay_radius(c: f64, d: usize) -> f64 {
    // c^{-d/2} e^{-π R²/c} = 1e-18
    let amp = c.powf(-(d as f64) / 2.0);
    let ratio = amp / DECAY_THRESHOLD;
    if ratio <= 1.0 {
        0.0
    } else {
        (c / PI * ratio.ln()).sqrt()
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be positive and finite (got {v})")))
    }
}

/// Index range ⌊−M/2⌋+1 ..= ⌊M/2⌋ used for every lattice phase and site-offset sum.
pub fn phase_range(m: usize) -> RangeInclusive<i64> {
    let m = m as i64;
    ((-m).div_euclid(2) + 1)..=m.div_euclid(2)
}

/// Chord length (L/π) sin(π s / M) between lattice sites a distance `s` apart.
pub fn chord(l: f64, m: usize, s: f64) -> f64 {
    l / PI * (PI * s / m as f64).sin()
}

/// A finite system of `M` sites on a circle of circumference `L` at fugacity `z`.
#[derive(Debug, Clone)]
pub struct CirculantEnsemble {
    m: Option<usize>,
    l: f64,
    z: f64,
    family: KernelFamily,
}

impl CirculantEnsemble {
    /// Lattice ensemble with M sites; complex families are continuum-only and rejected.
    pub fn new(m: usize, l: f64, z: f64, family: KernelFamily) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("M must be at least 1"));
        }
        if family.class() == FamilyClass::ComplexOdd {
            return Err(Error::invalid(
                "complex Hermitian families are defined on the continuum only",
            ));
        }
        Self::build(Some(m), l, z, family)
    }

    /// Continuum ensemble on [0, L); M is unused.
    pub fn continuum(l: f64, z: f64, family: KernelFamily) -> Result<Self> {
        Self::build(None, l, z, family)
    }

    fn build(m: Option<usize>, l: f64, z: f64, family: KernelFamily) -> Result<Self> {
        check_positive("L", l)?;
        if !(z.is_finite() && z >= 0.0) {
            return Err(Error::invalid(format!("fugacity must be nonnegative (got {z})")));
        }
        Ok(CirculantEnsemble { m, l, z, family })
    }

    /// Site count; errors for continuum ensembles.
    pub fn m(&self) -> Result<usize> {
        self.m
            .ok_or_else(|| Error::invalid("continuum ensemble has no lattice size"))
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

    /// Lattice spacing L/M.
    pub fn tau(&self) -> Result<f64> {
        Ok(self.l / self.m()? as f64)
    }

    pub fn with_z(&self, z: f64) -> Result<Self> {
        Self::build(self.m, self.l, z, self.family.clone())
    }
}

/// Inverse temperature and chemical potential of the free-fermion picture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FermionParams {
    pub beta: f64,
    pub mu: f64,
}

impl FermionParams {
    pub fn new(beta: f64, mu: f64) -> Result<Self> {
        check_positive("beta", beta)?;
        if !mu.is_finite() {
            return Err(Error::invalid("chemical potential must be finite"));
        }
        Ok(FermionParams { beta, mu })
    }

    /// (c, z) = (4πβ, e^{βμ}).
    pub fn to_gas(&self) -> (f64, f64) {
        (4.0 * PI * self.beta, (self.beta * self.mu).exp())
    }

    /// Inverse of [`FermionParams::to_gas`]; requires c > 0 and z > 0.
    pub fn from_gas(c: f64, z: f64) -> Result<Self> {
        check_positive("c", c)?;
        check_positive("z", z)?;
        let beta = c / (4.0 * PI);
        Self::new(beta, z.ln() / beta)
    }
}

/// Maps fermion parameters to the Gaussian-family width and fugacity.
pub fn fermion_to_gas(params: FermionParams) -> (f64, f64) {
    params.to_gas()
}

/// The generating function Σ_s g((L/π) sin(πs/M)) ζ^s over the phase range.
pub fn generating_function(family: &KernelFamily, m: usize, l: f64, zeta: Complex64) -> Result<Complex64> {
    if !family.is_real_even_1d() {
        return Err(family.unsupported("generating_function"));
    }
    if m == 0 {
        return Err(Error::invalid("M must be at least 1"));
    }
    check_positive("L", l)?;
    if (zeta.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::invalid(format!("|zeta| must be 1 (got {})", zeta.norm())));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for s in phase_range(m) {
        acc += family.g(chord(l, m, s as f64))? * zeta.powi(s as i32);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn phase_range_limits() {
        assert_eq!(phase_range(1), 0..=0);
        assert_eq!(phase_range(4), -1..=2);
        assert_eq!(phase_range(5), -2..=2);
        assert_eq!(phase_range(8).count(), 8);
    }

    #[test]
    fn gaussian_single_site_generating_function() {
        let fam = KernelFamily::gaussian(1.0).unwrap();
        let zeta = Complex64::from_polar(1.0, 0.37);
        let v = generating_function(&fam, 1, 3.0, zeta).unwrap();
        assert_abs_diff_eq!(v.re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn gaussian_m8_at_one_matches_direct_loop() {
        let fam = KernelFamily::gaussian(1.0).unwrap();
        let v = generating_function(&fam, 8, 8.0, Complex64::new(1.0, 0.0)).unwrap();
        // independent loop over s = -3..=4 with g(u) = exp(-π u²)
        let mut expect = 0.0;
        for s in -3i32..=4 {
            let u = 8.0 / PI * (PI * s as f64 / 8.0).sin();
            expect += (-PI * u * u).exp();
        }
        assert_abs_diff_eq!(v.re, expect, epsilon = 1e-14);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn generating_function_rejects_complex_family_and_off_circle() {
        let fam = KernelFamily::inverse_argument(0.1).unwrap();
        assert!(generating_function(&fam, 4, 1.0, Complex64::new(1.0, 0.0)).is_err());
        let fam = KernelFamily::gaussian(1.0).unwrap();
        assert!(generating_function(&fam, 4, 1.0, Complex64::new(1.1, 0.0)).is_err());
    }

    #[test]
    fn gaussian_generating_function_positive_at_roots_of_unity() {
        for &(m, l, c) in &[(7usize, 7.0, 1.0), (12, 3.0, 0.5), (16, 16.0, 4.0 * PI)] {
            let fam = KernelFamily::gaussian(c).unwrap();
            for p in phase_range(m) {
                let zeta = Complex64::from_polar(1.0, 2.0 * PI * p as f64 / m as f64);
                let v = generating_function(&fam, m, l, zeta).unwrap();
                assert!(v.re > 0.0, "m={m} p={p} value {v}");
                assert!(v.im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn fermion_map_examples() {
        let (c, z) = fermion_to_gas(FermionParams::new(1.0, 0.0).unwrap());
        assert_abs_diff_eq!(c, 4.0 * PI, epsilon = 1e-15);
        assert_abs_diff_eq!(z, 1.0, epsilon = 1e-15);
        let (_, z) = fermion_to_gas(FermionParams::new(1.0, -800.0).unwrap());
        assert_eq!(z, 0.0);
        let p = FermionParams::new(2.5, 0.7).unwrap();
        let (c, z) = p.to_gas();
        let back = FermionParams::from_gas(c, z).unwrap();
        assert_abs_diff_eq!(back.beta, 2.5, epsilon = 1e-14);
        assert_abs_diff_eq!(back.mu, 0.7, epsilon = 1e-14);
        assert!(FermionParams::new(0.0, 1.0).is_err());
    }

    #[test]
    fn custom_family_must_be_even() {
        assert!(KernelFamily::custom_even("odd", |u| u, 5.0).is_err());
        assert!(KernelFamily::custom_even("cosh", |u: f64| (-u * u).exp(), 7.0).is_ok());
        assert!(KernelFamily::custom_odd("inv", |u: Complex64| u.inv(), 0.1, 100.0).is_ok());
        assert!(KernelFamily::custom_odd("even", |u: Complex64| u * u, 0.1, 10.0).is_err());
    }

    #[test]
    fn ensemble_validation() {
        let g = KernelFamily::gaussian(1.0).unwrap();
        assert!(CirculantEnsemble::new(0, 1.0, 1.0, g.clone()).is_err());
        assert!(CirculantEnsemble::new(4, -1.0, 1.0, g.clone()).is_err());
        assert!(CirculantEnsemble::new(4, 1.0, -0.1, g.clone()).is_err());
        let e = CirculantEnsemble::new(4, 2.0, 0.5, g).unwrap();
        assert_abs_diff_eq!(e.tau().unwrap(), 0.5);
        let h = KernelFamily::inverse_argument(0.2).unwrap();
        assert!(CirculantEnsemble::new(4, 1.0, 1.0, h.clone()).is_err());
        let c = CirculantEnsemble::continuum(1.0, 1.0, h).unwrap();
        assert!(c.m().is_err());
    }

    #[test]
    fn gaussian_decay_radius_is_tight() {
        for c in [0.3, 1.0, 4.0 * PI] {
            let fam = KernelFamily::gaussian(c).unwrap();
            let r = fam.decay_radius();
            assert!(fam.g(r).unwrap() <= 1.0001 * DECAY_THRESHOLD);
            assert!(fam.g(0.99 * r).unwrap() > DECAY_THRESHOLD);
        }
    }

    proptest! {
        #[test]
        fn conjugate_arguments_give_conjugate_values(m in 1usize..40, l in 0.5f64..30.0, theta in -3.2f64..3.2, c in 0.2f64..5.0) {
            let fam = KernelFamily::gaussian(c).unwrap();
            let zeta = Complex64::from_polar(1.0, theta);
            let a = generating_function(&fam, m, l, zeta).unwrap();
            let b = generating_function(&fam, m, l, zeta.conj()).unwrap();
            prop_assert!((a - b.conj()).norm() < 1e-12 * a.norm().max(1.0));
        }

        #[test]
        fn gaussian_entry_function_is_even(c in 0.1f64..10.0, u in -20.0f64..20.0) {
            let fam = KernelFamily::gaussian(c).unwrap();
            prop_assert_eq!(fam.g(u).unwrap(), fam.g(-u).unwrap());
        }
    }
}
