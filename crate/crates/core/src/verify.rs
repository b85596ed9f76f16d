//! Named verification checks and the report they are collected into.
//!
//! Every check measures one error against one tolerance. Checks never abort
//! the suite: a numerical failure becomes a failing entry with a message.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_finite::{
    brute_force_correlation, brute_force_partition, build_circulant, cauchy_determinant_check, correlation,
    log_partition_function, macchi_kernel, partition_function, FiniteKernel,
};
use crate::fredholm::{
    gap_asymptote, gap_probability, iik_equivalence, nystrom, sigma, sigma_expansion_coefficients,
    sigma_pde_residual, sigma_small_x_check, sine_sigma_ode_residual, FredholmProblem,
};
use crate::model::{CirculantEnsemble, KernelFamily};
use crate::sampler::{estimate_cardinality, estimate_inclusion, hole_probability_check, TensorLattice};
use crate::spectral_limits::{
    complex_thermo_spectral_density, ddim_kernel, ddim_kernel_cartesian, ddim_pressure_cartesian,
    ddim_pressure_radial, fermion_density, fermion_kernel, finite_l_log_partition, gaudin_asymptotic,
    gaudin_fugacity, gaudin_kernel, gaussian_series_kernel, lattice_kernel, lattice_occupancy_variance,
    lattice_pressure, sine_kernel, thermo_compressibility_integrals, thermo_density, thermo_kernel,
    thermo_pressure, thermo_spectral_density, CorrelationKernel,
};

/// Version of the JSON report layout.
pub const REPORT_VERSION: u32 = 1;
pub const DEFAULT_SEED: u64 = 42;
/// Factor by which strict mode divides every tolerance.
pub const STRICT_FACTOR: f64 = 10.0;
pub const DEFAULT_SAMPLER_REPS: usize = 100_000;
pub const DEFAULT_HOLE_REPS: usize = 20_000;

/// Lattice separations are summed until |K(j)| drops below this.
const KERNEL_TAIL: f64 = 1e-14;

/// One measured error against its tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub id: String,
    /// `None` when the computation itself failed.
    pub error: Option<f64>,
    pub tol: f64,
    pub pass: bool,
    pub seconds: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

impl CheckEntry {
    pub fn measured(id: impl Into<String>, error: f64, tol: f64) -> Self {
        CheckEntry { id: id.into(), error: Some(error), tol, pass: error <= tol, seconds: 0.0, message: None }
    }

    pub fn failed(id: impl Into<String>, tol: f64, message: impl Into<String>) -> Self {
        CheckEntry { id: id.into(), error: None, tol, pass: false, seconds: 0.0, message: Some(message.into()) }
    }

    fn with_message(mut self, message: String) -> Self {
        self.message = Some(message);
        self
    }

    fn tightened(mut self, factor: f64) -> Self {
        self.tol /= factor;
        self.pass = self.error.is_some_and(|e| e <= self.tol);
        self
    }
}

/// Collected entries, sorted by id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub version: u32,
    pub seed: u64,
    pub entries: Vec<CheckEntry>,
    pub pass: bool,
}

impl VerificationReport {
    pub fn new(seed: u64, mut entries: Vec<CheckEntry>) -> Self {
        entries.sort_by(|a, b| a.id.cmp(&b.id));
        let pass = entries.iter().all(|e| e.pass);
        VerificationReport { version: REPORT_VERSION, seed, entries, pass }
    }

    pub fn get(&self, id: &str) -> Option<&CheckEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckEntry> {
        self.entries.iter().filter(|e| !e.pass)
    }

    /// Zeroes every runtime so that reports from identical runs compare equal byte for byte.
    pub fn without_timing(mut self) -> Self {
        for e in &mut self.entries {
            e.seconds = 0.0;
        }
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteOptions {
    pub seed: u64,
    pub strict: bool,
    pub sampler_reps: usize,
    pub hole_reps: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            seed: DEFAULT_SEED,
            strict: false,
            sampler_reps: DEFAULT_SAMPLER_REPS,
            hole_reps: DEFAULT_HOLE_REPS,
        }
    }
}

/// Runs `f` and records its runtime; an `Err` becomes a failing entry.
fn timed(id: &str, tol: f64, f: impl FnOnce() -> Result<CheckEntry>) -> CheckEntry {
    let start = Instant::now();
    let entry = f().unwrap_or_else(|e| CheckEntry::failed(id, tol, e.to_string()));
    CheckEntry { seconds: start.elapsed().as_secs_f64(), ..entry }
}

fn measure(id: &str, tol: f64, f: impl FnOnce() -> Result<f64>) -> CheckEntry {
    timed(id, tol, || f().map(|e| CheckEntry::measured(id, e, tol)))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn max_over<T>(items: impl IntoIterator<Item = T>, f: impl Fn(T) -> Result<f64>) -> Result<f64> {
    items.into_iter().try_fold(0.0f64, |acc, x| Ok(acc.max(f(x)?)))
}

fn family_tag(family: &KernelFamily) -> String {
    match family {
        KernelFamily::Gaussian { .. } => "gaussian".into(),
        KernelFamily::GaussianD { d, .. } => format!("gaussian-d{d}"),
        KernelFamily::InverseArgument { .. } => "gaudin".into(),
        KernelFamily::CustomEven(_) => "custom-even".into(),
        KernelFamily::CustomOdd(_) => "custom-odd".into(),
        KernelFamily::CustomEvenD(_) => "custom-even-d".into(),
    }
}

fn gaussian(c: f64) -> KernelFamily {
    KernelFamily::gaussian(c).expect("positive width")
}

/// Central second difference of f in log z at step h.
fn second_log_derivative(f: impl Fn(f64) -> Result<f64>, z: f64, h: f64) -> Result<f64> {
    let lz = z.ln();
    Ok((f((lz + h).exp())? - 2.0 * f(z)? + f((lz - h).exp())?) / (h * h))
}

/// (z d/dz)² of βP by finite differences at h and 2h, Richardson-combined,
/// with the change between the two steps.
fn fd_compressibility(f: impl Fn(f64) -> Result<f64>, z: f64) -> Result<(f64, f64)> {
    // ε^{1/6} balances O(h⁴) truncation against ε/h² rounding after extrapolation
    let h = f64::EPSILON.powf(1.0 / 6.0);
    let fine = second_log_derivative(&f, z, h)?;
    let coarse = second_log_derivative(&f, z, 2.0 * h)?;
    Ok(((4.0 * fine - coarse) / 3.0, (fine - coarse).abs()))
}

/// Sum rule in the thermodynamic limit: ρ − ∫k², the analytic ∫k(1 − k) and
/// finite differences of βP agree pairwise.
pub fn check_compressibility_continuum(family: &KernelFamily, z: f64) -> CheckEntry {
    let id = format!("SUMRULE/{}", family_tag(family));
    let tol = 1e-6;
    timed(&id, tol, || {
        let rho = thermo_density(family, z)?;
        let (sq, var) = thermo_compressibility_integrals(family, z)?;
        let (fd, step_change) = fd_compressibility(|z| thermo_pressure(family, z), z)?;
        let lhs = rho - sq;
        let err = rel(lhs, var).max(rel(lhs, fd)).max(rel(var, fd));
        Ok(CheckEntry::measured(&id, err, tol).with_message(format!(
            "pair route {lhs:.12e}, analytic {var:.12e}, finite difference {fd:.12e} (step change {step_change:.1e})"
        )))
    })
}

/// ρ + Σ_j (ρ₂(0, j) − ρ²) over lattice separations against (z d/dz)² τβP^{(τ)}.
pub fn check_compressibility_lattice(family: &KernelFamily, tau: f64, z: f64) -> CheckEntry {
    let id = "SUMRULE/lattice";
    let tol = 1e-5;
    timed(id, tol, || {
        let rho = lattice_kernel(family, tau, z, 0)?;
        // ρ₂(0, 0) = 0, so the j = 0 term contributes −ρ²
        let mut sum = rho - rho * rho;
        let mut j = 1i64;
        loop {
            let k = lattice_kernel(family, tau, z, j)?;
            let rho2 = rho * rho - k * k;
            sum += 2.0 * (rho2 - rho * rho);
            if k.abs() < KERNEL_TAIL {
                break;
            }
            j += 1;
            if j > 100_000 {
                return Err(Error::Truncation("lattice kernel did not decay".into()));
            }
        }
        let var = lattice_occupancy_variance(family, tau, z)?;
        let (fd, _) = fd_compressibility(|z| lattice_pressure(family, tau, z), z)?;
        let err = rel(sum, var).max(rel(sum, fd));
        Ok(CheckEntry::measured(id, err, tol).with_message(format!(
            "separation sum {sum:.12e} over |j| <= {j}, analytic {var:.12e}, finite difference {fd:.12e}"
        )))
    })
}

/// Local exponent of ρ₂(0, r) at r → 0 from r ∈ {0.04, 0.02, 0.01}, Richardson-extrapolated.
pub fn quadratic_vanishing_exponent(family: &KernelFamily, z: f64) -> Result<f64> {
    let rho = thermo_kernel(family, z, 0.0)?.re;
    let rho2 = |r: f64| -> Result<f64> { Ok(rho * rho - thermo_kernel(family, z, r)?.norm_sqr()) };
    let (a, b, c) = (rho2(0.04)?, rho2(0.02)?, rho2(0.01)?);
    let coarse = (a / b).log2();
    let fine = (b / c).log2();
    Ok((4.0 * fine - coarse) / 3.0)
}

pub fn check_quadratic_vanishing(family: &KernelFamily, z: f64) -> CheckEntry {
    let id = format!("QUADRATIC-VANISHING/{}", family_tag(family));
    let tol = 0.05;
    timed(&id, tol, || {
        let e = quadratic_vanishing_exponent(family, z)?;
        Ok(CheckEntry::measured(&id, (e - 2.0).abs(), tol).with_message(format!("exponent {e:.6}")))
    })
}

/// (ρ₂(0, r), z²(g(0)² − g(r)²)) for a real even family.
pub fn small_z_two_point(family: &KernelFamily, z: f64, r: f64) -> Result<(f64, f64)> {
    if !family.is_real_even_1d() {
        return Err(family_error(family, "small_z_two_point"));
    }
    if !(z > 0.0 && z <= 1e-2) {
        return Err(Error::invalid(format!("small-z check needs 0 < z <= 1e-2 (got {z})")));
    }
    let rho = thermo_density(family, z)?;
    let k = thermo_kernel(family, z, r)?.re;
    let (g0, gr) = (family.g(0.0)?, family.g(r)?);
    Ok((rho * rho - k * k, z * z * (g0 * g0 - gr * gr)))
}

fn family_error(family: &KernelFamily, op: &'static str) -> Error {
    Error::UnsupportedFamily { op, family: family.name() }
}

pub fn check_small_z_two_point(family: &KernelFamily, z: f64, r: f64) -> CheckEntry {
    let id = format!("SMALL-Z/{}", family_tag(family));
    let tol = 1e-3;
    timed(&id, tol, || {
        let (rho2, lead) = small_z_two_point(family, z, r)?;
        Ok(CheckEntry::measured(&id, rel(rho2, lead), tol)
            .with_message(format!("rho2 {rho2:.12e}, leading order {lead:.12e}")))
    })
}

type Group = fn(&SuiteOptions) -> Vec<CheckEntry>;

const GROUPS: &[(&str, Group)] = &[
    ("CAUCHY-DET", cauchy_det),
    ("DDIM-PRESSURE", ddim_pressure),
    ("FERMION-SINE", fermion_sine),
    ("GAP-ASYMPTOTE", gap_asymptote_checks),
    ("GAUDIN", gaudin),
    ("IIK-EQUIV", iik_equiv),
    ("LIMIT-CONSISTENCY", limit_consistency),
    ("ORACLE-K", oracle_k),
    ("ORACLE-RHO", oracle_rho),
    ("ORACLE-XI", oracle_xi),
    ("QUADRATIC-VANISHING", quadratic_vanishing),
    ("SAMPLER-MARGINALS", sampler_marginals),
    ("SERIES-KERNEL", series_kernel),
    ("SIGMA-ODE", sigma_ode),
    ("SMALL-Z", small_z),
    ("SUMRULE", sumrule),
];

/// Group names accepted by [`run_suite`], besides "all".
pub fn check_names() -> Vec<&'static str> {
    GROUPS.iter().map(|(n, _)| *n).collect()
}

/// What each group establishes, one line per identity or limit it exercises.
pub fn coverage_manifest() -> &'static [(&'static str, &'static [&'static str])] {
    &[
        ("CAUCHY-DET", &["Cauchy double-alternant determinant of the complex circulant"]),
        (
            "DDIM-PRESSURE",
            &[
                "d-dimensional pressure by radial reduction",
                "d-dimensional free-fermion kernel by Bessel reduction",
            ],
        ),
        (
            "FERMION-SINE",
            &["zero-temperature limit of the fermion kernel", "zero-temperature fermion density"],
        ),
        (
            "GAP-ASYMPTOTE",
            &[
                "gap probability as a Fredholm determinant",
                "exponential decay of the gap probability at the pressure",
                "thinned gap asymptote as a pressure difference",
            ],
        ),
        (
            "GAUDIN",
            &[
                "one-sided spectral density of the inverse-argument family",
                "large-separation form of the complex kernel",
                "sine-kernel limit at large regulariser",
            ],
        ),
        ("IIK-EQUIV", &["position and momentum forms of the fermion Fredholm determinant"]),
        (
            "LIMIT-CONSISTENCY",
            &[
                "lattice pressure as the large-M limit at fixed spacing",
                "thermodynamic pressure as the large-L limit of the finite circle",
                "continuum kernel recovered as the lattice spacing vanishes",
            ],
        ),
        ("ORACLE-K", &["correlation kernel K = zL(I + zL)^{-1}"]),
        ("ORACLE-RHO", &["k-point correlations as minors of K"]),
        (
            "ORACLE-XI",
            &["partition function as det(I + zL)", "partition function as a product over circulant eigenvalues"],
        ),
        ("QUADRATIC-VANISHING", &["two-point function vanishes quadratically at coincidence"]),
        (
            "SAMPLER-MARGINALS",
            &[
                "exact sampling of the periodic lattice ensemble",
                "sample size as a sum of independent Bernoulli modes",
                "hole probability decay rate in two dimensions",
            ],
        ),
        ("SERIES-KERNEL", &["series form of the Gaussian-family thermodynamic kernel"]),
        (
            "SIGMA-ODE",
            &[
                "sigma-form ODE for the sine-kernel determinant",
                "small-interval expansion of the fermion log-determinant",
                "PDE for the temperature-dependent log-determinant",
            ],
        ),
        ("SMALL-Z", &["two-point function to leading order in the fugacity"]),
        (
            "SUMRULE",
            &[
                "compressibility sum rule in the thermodynamic limit",
                "compressibility sum rule for the complex family",
                "compressibility sum rule on the lattice",
            ],
        ),
    ]
}

/// Runs the named groups ("all" expands to every group). Unknown names yield
/// a failing entry under their own id.
pub fn run_suite(names: &[&str], options: &SuiteOptions) -> VerificationReport {
    let mut selected = BTreeSet::new();
    let mut entries = Vec::new();
    for name in names {
        if name.eq_ignore_ascii_case("all") {
            selected.extend(0..GROUPS.len());
        } else if let Some(i) = GROUPS.iter().position(|(n, _)| n.eq_ignore_ascii_case(name)) {
            selected.insert(i);
        } else {
            entries.push(CheckEntry::failed(*name, 0.0, format!("unknown check '{name}'")));
        }
    }
    let selected: Vec<usize> = selected.into_iter().collect();
    let measured: Vec<CheckEntry> = selected.par_iter().flat_map_iter(|&i| (GROUPS[i].1)(options)).collect();
    entries.extend(measured.into_iter().map(|e| if options.strict { e.tightened(STRICT_FACTOR) } else { e }));
    VerificationReport::new(options.seed, entries)
}

fn oracle_xi(_: &SuiteOptions) -> Vec<CheckEntry> {
    vec![measure("ORACLE-XI", 1e-9, || {
        max_over([6usize, 10, 12].iter().flat_map(|&m| [0.3, 1.0, 3.0].map(|z| (m, z))), |(m, z)| {
            let ens = CirculantEnsemble::new(m, m as f64, z, gaussian(1.0))?;
            let spectral = partition_function(&ens)?;
            let dense = build_circulant(&ens)?.det_identity_plus(z);
            let subsets = brute_force_partition(&ens)?;
            Ok(rel(spectral, dense).max(rel(spectral, subsets)).max(rel(dense, subsets)))
        })
    })]
}

fn oracle_k(_: &SuiteOptions) -> Vec<CheckEntry> {
    vec![measure("ORACLE-K", 1e-10, || {
        max_over([6usize, 10, 12].iter().flat_map(|&m| [0.3, 1.0, 3.0].map(|z| (m, z))), |(m, z)| {
            let ens = CirculantEnsemble::new(m, m as f64, z, gaussian(1.0))?;
            let fast = FiniteKernel::new(&ens)?.matrix();
            let dense = macchi_kernel(&build_circulant(&ens)?, z)?;
            Ok((fast - dense).iter().map(|v| v.norm()).fold(0.0, f64::max))
        })
    })]
}

/// Site subsets of sizes 1..=3: all of them for small M, those through site 0 otherwise.
fn site_subsets(m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for a in 0..m {
        out.push(vec![a]);
        for b in a + 1..m {
            out.push(vec![a, b]);
            for c in b + 1..m {
                out.push(vec![a, b, c]);
            }
        }
    }
    if m > 8 {
        out.retain(|s| s[0] == 0);
    }
    out
}

fn oracle_rho(_: &SuiteOptions) -> Vec<CheckEntry> {
    vec![measure("ORACLE-RHO", 1e-9, || {
        max_over([6usize, 12].iter().flat_map(|&m| [0.3, 1.0, 3.0].map(|z| (m, z))), |(m, z)| {
            let ens = CirculantEnsemble::new(m, m as f64, z, gaussian(1.0))?;
            max_over(site_subsets(m), |s| {
                Ok((correlation(&ens, &s)?.value - brute_force_correlation(&ens, &s)?).abs())
            })
        })
    })]
}

fn limit_consistency(_: &SuiteOptions) -> Vec<CheckEntry> {
    let g = gaussian(1.0);
    vec![
        measure("LIMIT-CONSISTENCY/lattice", 1e-6, || {
            let ens = CirculantEnsemble::new(256, 256.0, 1.0, g.clone())?;
            Ok((log_partition_function(&ens)? / 256.0 - lattice_pressure(&g, 1.0, 1.0)?).abs())
        }),
        measure("LIMIT-CONSISTENCY/finite-l", 1e-6, || {
            Ok((finite_l_log_partition(&g, 32.0, 1.0)? / 32.0 - thermo_pressure(&g, 1.0)?).abs())
        }),
        measure("LIMIT-CONSISTENCY/reclaim", 1e-4, || {
            let tau = 1.0 / 64.0;
            max_over([0.0, 0.5, 1.0], |r: f64| {
                let j = (r / tau).round() as i64;
                let lat = lattice_kernel(&g, tau, tau * 1.0, j)? / tau;
                Ok((lat - thermo_kernel(&g, 1.0, r)?.re).abs())
            })
        }),
    ]
}

fn unit_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn series_kernel(_: &SuiteOptions) -> Vec<CheckEntry> {
    vec![measure("SERIES-KERNEL", 1e-10, || {
        let g = gaussian(1.0);
        max_over(unit_grid(0.0, 3.0, 31), |r| {
            Ok((gaussian_series_kernel(1.0, 0.5, r)? - thermo_kernel(&g, 0.5, r)?.re).abs())
        })
    })]
}

fn fermion_sine(_: &SuiteOptions) -> Vec<CheckEntry> {
    vec![
        measure("FERMION-SINE/kernel", 1e-2, || {
            max_over(unit_grid(0.1, 3.0, 30), |r| Ok((fermion_kernel(200.0, 1.0, r)? - sine_kernel(1.0, r)?).abs()))
        }),
        measure("FERMION-SINE/density", 1e-2, || Ok((fermion_density(200.0, 1.0)? - 1.0 / PI).abs())),
    ]
}

fn sumrule(_: &SuiteOptions) -> Vec<CheckEntry> {
    let inverse = KernelFamily::inverse_argument(1.0).expect("positive eps");
    vec![
        check_compressibility_continuum(&gaussian(4.0 * PI), 1.0),
        check_compressibility_continuum(&inverse, 1.0),
        check_compressibility_lattice(&gaussian(1.0), 1.0, 1.0),
        measure("SUMRULE/finite-m", 1e-4, || {
            let g = gaussian(1.0);
            let fk = FiniteKernel::new(&CirculantEnsemble::new(512, 512.0, 1.0, g.clone())?)?;
            let rho = fk.density();
            let sum: f64 = (0..512).map(|j| fk.at_offset(j).norm_sqr()).sum();
            Ok(rel(rho - sum, lattice_occupancy_variance(&g, 1.0, 1.0)?))
        }),
    ]
}

fn gap_asymptote_checks(_: &SuiteOptions) -> Vec<CheckEntry> {
    let (beta, mu) = (1.0, 1.0);
    // fermions at (β, μ) are the Gaussian family with c = 4πβ at z = e^{βμ}
    let gas = gaussian(4.0 * PI * beta);
    let z = (beta * mu).exp();
    let length = || -> Result<f64> { Ok(6.0 / fermion_density(beta, mu)?) };
    vec![
        timed("GAP-ASYMPTOTE/fermion", 0.05, || {
            let j = length()?;
            let k = CorrelationKernel::fermion(beta, mu, j)?;
            let gap = gap_probability(&FredholmProblem::new(k, 0.0, j, 1.0)?)?;
            let bp = thermo_pressure(&gas, z)?;
            let rate = -gap.ln() / j;
            Ok(CheckEntry::measured("GAP-ASYMPTOTE/fermion", rel(rate, bp), 0.05)
                .with_message(format!("|J| = {j:.6}, -log E/|J| = {rate:.8}, betaP = {bp:.8}")))
        }),
        measure("GAP-ASYMPTOTE/identity", 1e-12, || {
            max_over([1.0, 5.0, 12.0], |l: f64| {
                let bp = thermo_pressure(&gas, z)?;
                Ok(rel(gap_asymptote(&gas, z, l, 1.0)?, (-l * bp).exp()))
            })
        }),
        measure("GAP-ASYMPTOTE/doubling", 1e-10, || {
            let j = length()?;
            let k = CorrelationKernel::fermion(beta, mu, j)?;
            max_over([0.5, 1.0], |xi| {
                let p = FredholmProblem::new(k.clone(), 0.0, j, xi)?;
                let first = nystrom(&p)?;
                // restarting at the accepted order compares it with its doubling
                let again = nystrom(&p.clone().with_order(first.order)?)?;
                Ok((first.det(xi) - again.det(xi)).abs().max((first.det(1.0) - again.det(1.0)).abs()))
            })
        }),
    ]
}

fn iik_equiv(_: &SuiteOptions) -> Vec<CheckEntry> {
    vec![measure("IIK-EQUIV", 1e-6, || {
        let grid = [0.5, 1.0, 2.0].iter().flat_map(|&x| [0.3, 0.7, 1.0].map(|xi| (x, xi)));
        max_over(grid, |(x, xi)| {
            let (direct, momentum) = iik_equivalence(1.0, 1.0, x, xi)?;
            Ok(rel(direct, momentum))
        })
    })]
}

/// (c₁, c₂) from an exact cubic through σ at x ∈ {0.01, 0.02, 0.03}.
fn fitted_sigma_coefficients(t: f64, xi: f64) -> Result<(f64, f64)> {
    let h = 0.01;
    let q: Vec<f64> = (1..=3)
        .map(|k| Ok(sigma(k as f64 * h, t, xi)? / (k as f64 * h)))
        .collect::<Result<_>>()?;
    // q(x) = c₁ + c₂x + c₃x² at x = h, 2h, 3h
    let c3 = (q[2] - 2.0 * q[1] + q[0]) / (2.0 * h * h);
    let c2 = (q[1] - q[0]) / h - 3.0 * h * c3;
    let c1 = q[0] - c2 * h - c3 * h * h;
    Ok((c1, c2))
}

fn sigma_ode(_: &SuiteOptions) -> Vec<CheckEntry> {
    vec![
        measure("SIGMA-ODE/ode", 1e-3, || {
            let taus = unit_grid(0.2, 2.0, 10);
            max_over([0.5, 1.0], |xi| {
                Ok(sine_sigma_ode_residual(&taus, xi)?.into_iter().fold(0.0, f64::max))
            })
        }),
        measure("SIGMA-ODE/small-x", 1e-4, || {
            max_over([(0.0, 1.0), (1.0, 0.5)], |(t, xi)| {
                let (c1, c2) = sigma_expansion_coefficients(t, xi)?;
                let (f1, f2) = fitted_sigma_coefficients(t, xi)?;
                Ok((f1 - c1).abs().max((f2 - c2).abs()))
            })
        }),
        measure("SIGMA-ODE/small-x-residual", 1e-5, || sigma_small_x_check(0.0, 1.0, &[0.005, 0.01])),
        timed("SIGMA-ODE/pde", 5e-2, || {
            let rows = sigma_pde_residual(&[0.48, 0.5], &[0.48, 0.5], 1.0)?;
            let worst = rows.iter().map(|r| r.normalized).fold(0.0, f64::max);
            let flagged = rows.iter().filter(|r| r.flagged).count();
            Ok(CheckEntry::measured("SIGMA-ODE/pde", worst, 5e-2)
                .with_message(format!("diagnostic; {flagged} of {} points flagged", rows.len())))
        }),
    ]
}

/// N points on [0, l) with cyclic spacing at least 0.3 l/N.
fn spread_points(rng: &mut ChaCha8Rng, n: usize, l: f64) -> Vec<f64> {
    let e: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let total: f64 = e.iter().sum();
    let start = rng.random::<f64>() * l;
    let mut x = start;
    e.iter()
        .map(|g| {
            let p = x.rem_euclid(l);
            x += l * (0.3 / n as f64 + 0.7 * g / total);
            p
        })
        .collect()
}

fn cauchy_det(options: &SuiteOptions) -> Vec<CheckEntry> {
    vec![measure("CAUCHY-DET", 1e-9, || {
        let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
        let mut worst = 0.0f64;
        for trial in 0..100 {
            let n = 2 + trial % 7;
            let pts = spread_points(&mut rng, n, 1.0);
            worst = worst.max(cauchy_determinant_check(&pts, 0.1, 1.0)?.rel_diff());
        }
        Ok(worst)
    })]
}

fn gaudin(_: &SuiteOptions) -> Vec<CheckEntry> {
    let (eps, h) = (1.0, 1.0);
    vec![
        measure("GAUDIN/support", 0.0, || {
            let fam = KernelFamily::inverse_argument(eps)?;
            max_over([-1e-12, -1e-3, -0.5, -10.0], |s| {
                Ok(complex_thermo_spectral_density(eps, s)?.abs().max(thermo_spectral_density(&fam, s)?.abs()))
            })
        }),
        timed("GAUDIN/asymptotic-decreasing", 0.0, || {
            let z = gaudin_fugacity(eps, h);
            let errs = [2.5, 5.0, 10.0, 20.0]
                .iter()
                .map(|&r| {
                    let exact = gaudin_kernel(eps, z, r)?;
                    Ok((gaudin_asymptotic(eps, h, r)? - exact).norm() / exact.norm())
                })
                .collect::<Result<Vec<f64>>>()?;
            let growth = errs.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
            Ok(CheckEntry::measured("GAUDIN/asymptotic-decreasing", growth, 0.0)
                .with_message(format!(
                    "relative errors at r = 2.5, 5, 10, 20: {}",
                    errs.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>().join(", ")
                )))
        }),
        measure("GAUDIN/sine-limit", 1e-3, || {
            let (eps, h) = (50.0, 1.0);
            let z = gaudin_fugacity(eps, h);
            max_over([0.5, 1.0, 2.0, 3.0], |r: f64| {
                let target = Complex64::from_polar(sine_kernel(h, r)?, h * r);
                Ok((gaudin_kernel(eps, z, r)? - target).norm())
            })
        }),
    ]
}

fn ddim_pressure(_: &SuiteOptions) -> Vec<CheckEntry> {
    let pressure = |d: usize| move || Ok(rel(ddim_pressure_radial(1.0, d, 1.0)?, ddim_pressure_cartesian(1.0, d, 1.0)?));
    vec![
        measure("DDIM-PRESSURE/d2", 1e-8, pressure(2)),
        measure("DDIM-PRESSURE/d3", 1e-8, pressure(3)),
        measure("DDIM-PRESSURE/kernel", 1e-8, || {
            max_over([0.0, 0.5, 1.0, 2.5], |r| {
                Ok((ddim_kernel(1.0, 0.5, 2, r)? - ddim_kernel_cartesian(1.0, 0.5, 2, r)?).abs())
            })
        }),
    ]
}

fn sampler_marginals(options: &SuiteOptions) -> Vec<CheckEntry> {
    let (m, z, reps, seed) = (32usize, 1.0, options.sampler_reps, options.seed);
    let g = gaussian(1.0);
    let setup = || -> Result<(TensorLattice, CirculantEnsemble)> {
        Ok((TensorLattice::new(1, m, m as f64, z, g.clone())?, CirculantEnsemble::new(m, m as f64, z, g.clone())?))
    };
    let inclusion = |id: &'static str, sets: Vec<Vec<usize>>| {
        timed(id, 3.0, || {
            let (lat, ens) = setup()?;
            let mut worst = 0.0f64;
            let mut notes = Vec::new();
            for s in sets {
                let exact = correlation(&ens, &s)?.value;
                let sites: Vec<Vec<usize>> = s.iter().map(|x| vec![*x]).collect();
                let est = estimate_inclusion(&lat, &sites, reps, seed)?;
                worst = worst.max(est.z_score(exact));
                notes.push(format!("{s:?}: {:.5} vs {exact:.5}", est.mean));
            }
            Ok(CheckEntry::measured(id, worst, 3.0).with_message(format!("max z-score; {}", notes.join(", "))))
        })
    };
    vec![
        inclusion("SAMPLER-MARGINALS/singleton", vec![vec![0], vec![17]]),
        inclusion("SAMPLER-MARGINALS/pair", vec![vec![0, 1], vec![0, 2], vec![5, 13]]),
        timed("SAMPLER-MARGINALS/cardinality-mean", 3.0, || {
            let (lat, _) = setup()?;
            let c = estimate_cardinality(&lat, reps, seed)?;
            Ok(CheckEntry::measured("SAMPLER-MARGINALS/cardinality-mean", c.mean.z_score(lat.expected_count()), 3.0))
        }),
        timed("SAMPLER-MARGINALS/cardinality-variance", 3.0, || {
            let (lat, _) = setup()?;
            let c = estimate_cardinality(&lat, reps, seed)?;
            Ok(CheckEntry::measured(
                "SAMPLER-MARGINALS/cardinality-variance",
                c.variance.z_score(lat.count_variance()),
                3.0,
            ))
        }),
        timed("SAMPLER-MARGINALS/hole", 0.15, || hole_entry(options)),
    ]
}

/// d = 2, c = 1, z = 1 on a 32 × 32 torus of side 4, blocks up to side 2/√ρ.
fn hole_entry(options: &SuiteOptions) -> Result<CheckEntry> {
    let id = "SAMPLER-MARGINALS/hole";
    let c = 1.0;
    let lat = TensorLattice::from_continuum(2, 32, 4.0, 1.0, KernelFamily::gaussian_d(c, 2)?)?;
    // the d = 2 gas at width c is the fermion gas at β = c/4π, μ = log z/β
    let rho = ddim_kernel(c / (4.0 * PI), 0.0, 2, 0.0)?;
    let side = ((2.0 / rho.sqrt() / lat.tau()).round() as usize).clamp(4, lat.m());
    let sides: Vec<usize> = (1..=4).map(|k| side * k / 4).collect();
    let rows = hole_probability_check(&lat, &sides, options.hole_reps, options.seed)?;
    let table: Vec<String> = rows
        .iter()
        .map(|r| format!("{}: {}", r.side, r.ratio.map_or("n/a".into(), |x| format!("{x:.4}"))))
        .collect();
    let last = rows.last().expect("at least one side");
    let msg = format!("ratio by block side {}", table.join(", "));
    Ok(match last.ratio {
        Some(ratio) => CheckEntry::measured(id, (ratio - 1.0).abs(), 0.15).with_message(msg),
        None => CheckEntry::failed(id, 0.15, format!("no empty blocks observed; {msg}")),
    })
}

fn quadratic_vanishing(_: &SuiteOptions) -> Vec<CheckEntry> {
    vec![
        check_quadratic_vanishing(&gaussian(4.0 * PI), 1.0),
        check_quadratic_vanishing(&KernelFamily::inverse_argument(1.0).expect("positive eps"), 1.0),
    ]
}

fn small_z(_: &SuiteOptions) -> Vec<CheckEntry> {
    vec![check_small_z_two_point(&gaussian(1.0), 1e-4, 0.5)]
}
