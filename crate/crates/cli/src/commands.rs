//! One function per subcommand, each producing a table.

use circulant_core::exact_finite::{circulant_eigenvalues, log_partition_function, FiniteKernel};
use circulant_core::fredholm::{counting_distribution, gap_asymptote, nystrom, FredholmProblem, DEFAULT_ORDER};
use circulant_core::model::{CirculantEnsemble, KernelFamily};
use circulant_core::sampler::{hole_probability_check, sample_replicate, TensorLattice};
use circulant_core::spectral_limits::{
    ddim_kernel, ddim_pressure_radial, ddim_spectral_density, fermion_kernel, finite_l_eigenvalue,
    finite_l_kernel, finite_l_log_partition, lattice_density, lattice_kernel, lattice_pressure,
    lattice_spectral_density, thermo_density, thermo_kernel, thermo_pressure, thermo_spectral_density,
    CorrelationKernel, FiniteLSpectrum,
};
use rayon::prelude::*;

use crate::config::{Params, RegimeName};
use crate::table::{Cell, Table};
use crate::CliError;

fn grid(lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>, CliError> {
    if steps < 2 {
        return Err(CliError::Invalid("steps must be at least 2".into()));
    }
    Ok((0..steps).map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64).collect())
}

fn ensemble(p: &Params, family: KernelFamily, z: f64) -> Result<CirculantEnsemble, CliError> {
    let m = p.require_m()?;
    Ok(CirculantEnsemble::new(m, p.l.unwrap_or(m as f64), z, family)?)
}

fn circumference(p: &Params) -> Result<f64, CliError> {
    p.l.ok_or_else(|| CliError::Invalid("the finite-l regime needs --l".into()))
}

fn one_dimensional(p: &Params, what: &str) -> Result<(), CliError> {
    if p.dim() != 1 {
        return Err(CliError::Invalid(format!("{what} is one-dimensional outside the thermo regime")));
    }
    Ok(())
}

/// Eigenvalues or spectral density in the chosen regime.
pub fn spectrum(p: &Params) -> Result<Table, CliError> {
    let (family, z) = p.family_and_z()?;
    let steps = p.steps.unwrap_or(101);
    match p.regime() {
        RegimeName::Finite => {
            one_dimensional(p, "spectrum")?;
            let spec = circulant_eigenvalues(&ensemble(p, family, z)?)?;
            let mut t = Table::new(&["p", "lambda"]);
            for (k, l) in spec.iter() {
                t.push(vec![k.into(), l.into()]);
            }
            Ok(t)
        }
        RegimeName::Lattice => {
            one_dimensional(p, "spectrum")?;
            let tau = p.tau.unwrap_or(1.0);
            let mut t = Table::new(&["t", "symbol"]);
            for x in grid(-0.5, 0.5, steps)? {
                t.push(vec![x.into(), lattice_spectral_density(&family, tau, x)?.into()]);
            }
            Ok(t)
        }
        RegimeName::FiniteL => {
            one_dimensional(p, "spectrum")?;
            let l = circumference(p)?;
            let pmax = p.pmax.unwrap_or(20);
            let mut t = Table::new(&["p", "lambda"]);
            for k in -pmax..=pmax {
                t.push(vec![k.into(), finite_l_eigenvalue(&family, l, k)?.into()]);
            }
            Ok(t)
        }
        RegimeName::Thermo => {
            let smax = p.rmax.unwrap_or(3.0);
            let d = p.dim();
            let mut t = Table::new(&["s", "lambda"]);
            for s in grid(-smax, smax, steps)? {
                let v = if d == 1 {
                    thermo_spectral_density(&family, s)?
                } else {
                    // along the first axis
                    let mut x = vec![0.0; d];
                    x[0] = s;
                    let c = gaussian_width(&family)?;
                    ddim_spectral_density(c, d, &x)?
                };
                t.push(vec![s.into(), v.into()]);
            }
            Ok(t)
        }
    }
}

fn gaussian_width(family: &KernelFamily) -> Result<f64, CliError> {
    match family {
        KernelFamily::Gaussian { c } | KernelFamily::GaussianD { c, .. } => Ok(*c),
        _ => Err(CliError::Invalid("this computation needs the Gaussian family".into())),
    }
}

/// βP per unit length (per site on the lattice).
pub fn pressure(p: &Params) -> Result<Table, CliError> {
    let (family, z) = p.family_and_z()?;
    let bp = match p.regime() {
        RegimeName::Finite => {
            let ens = ensemble(p, family, z)?;
            log_partition_function(&ens)? / ens.l()
        }
        RegimeName::Lattice => lattice_pressure(&family, p.tau.unwrap_or(1.0), z)?,
        RegimeName::FiniteL => {
            let l = circumference(p)?;
            finite_l_log_partition(&family, l, z)? / l
        }
        RegimeName::Thermo if p.dim() > 1 => ddim_pressure_radial(gaussian_width(&family)?, p.dim(), z)?,
        RegimeName::Thermo => thermo_pressure(&family, z)?,
    };
    let mut t = Table::new(&["z", "betaP"]);
    t.push(vec![z.into(), bp.into()]);
    Ok(t)
}

/// Mean density per unit length (per site on the lattice).
pub fn density(p: &Params) -> Result<Table, CliError> {
    let (family, z) = p.family_and_z()?;
    let rho = match p.regime() {
        RegimeName::Finite => {
            let ens = ensemble(p, family, z)?;
            FiniteKernel::new(&ens)?.density() * ens.m()? as f64 / ens.l()
        }
        RegimeName::Lattice => lattice_density(&family, p.tau.unwrap_or(1.0), z)?,
        RegimeName::FiniteL => FiniteLSpectrum::new(&family, circumference(p)?, z)?.density(),
        RegimeName::Thermo if p.dim() > 1 => {
            let (beta, mu) = p.fermion_params()?;
            ddim_kernel(beta, mu, p.dim(), 0.0)?
        }
        RegimeName::Thermo => thermo_density(&family, z)?,
    };
    let mut t = Table::new(&["z", "rho"]);
    t.push(vec![z.into(), rho.into()]);
    Ok(t)
}

/// K(0, r) on a grid of separations (site offsets on discrete regimes).
pub fn kernel(p: &Params) -> Result<Table, CliError> {
    let (family, z) = p.family_and_z()?;
    let real = family.is_real_even_1d() || p.dim() > 1;
    let columns: &[&'static str] = if real { &["r", "K"] } else { &["r", "K_re", "K_im"] };
    let mut t = Table::new(columns);
    let mut push = |r: Cell, k: num_complex::Complex64| {
        t.push(if real { vec![r, k.re.into()] } else { vec![r, k.re.into(), k.im.into()] });
    };
    let steps = p.steps.unwrap_or(101);
    let real_value = |v: f64| num_complex::Complex64::new(v, 0.0);
    match p.regime() {
        RegimeName::Finite => {
            one_dimensional(p, "kernel")?;
            let fk = FiniteKernel::new(&ensemble(p, family, z)?)?;
            for j in 0..fk.m() as i64 {
                push(j.into(), fk.at_offset(j));
            }
        }
        RegimeName::Lattice => {
            one_dimensional(p, "kernel")?;
            let tau = p.tau.unwrap_or(1.0);
            for j in 0..steps as i64 {
                push(j.into(), real_value(lattice_kernel(&family, tau, z, j)?));
            }
        }
        RegimeName::FiniteL => {
            one_dimensional(p, "kernel")?;
            let l = circumference(p)?;
            for r in grid(0.0, p.rmax.unwrap_or(l / 2.0), steps)? {
                push(r.into(), finite_l_kernel(&family, l, z, 0.0, r)?);
            }
        }
        RegimeName::Thermo => {
            let rs = grid(0.0, p.rmax.unwrap_or(5.0), steps)?;
            let values: Vec<num_complex::Complex64> = if p.dim() > 1 {
                let (beta, mu) = p.fermion_params()?;
                rs.par_iter().map(|&r| ddim_kernel(beta, mu, p.dim(), r).map(real_value)).collect::<Result<_, _>>()?
            } else if let (Some(beta), Some(mu)) = (p.beta, p.mu) {
                rs.par_iter().map(|&r| fermion_kernel(beta, mu, r).map(real_value)).collect::<Result<_, _>>()?
            } else {
                rs.par_iter().map(|&r| thermo_kernel(&family, z, r)).collect::<Result<_, _>>()?
            };
            for (r, k) in rs.iter().zip(values) {
                push((*r).into(), k);
            }
        }
    }
    Ok(t)
}

fn fredholm_problem(p: &Params) -> Result<FredholmProblem, CliError> {
    if p.regime() != RegimeName::Thermo || p.dim() != 1 {
        return Err(CliError::Invalid("gap and counting use the one-dimensional thermo regime".into()));
    }
    let (a, b) = p.interval()?;
    let len = b - a;
    let kernel = match (p.beta, p.mu) {
        (Some(beta), Some(mu)) => CorrelationKernel::fermion(beta, mu, len.abs())?,
        _ => {
            let (family, z) = p.family_and_z()?;
            CorrelationKernel::thermo(&family, z, len.abs())?
        }
    };
    Ok(FredholmProblem::new(kernel, a, b, p.xi.unwrap_or(1.0))?.with_order(p.order.unwrap_or(DEFAULT_ORDER))?)
}

/// det(I − ξK_J) with the large-|J| asymptote.
pub fn gap(p: &Params) -> Result<Table, CliError> {
    let problem = fredholm_problem(p)?;
    let spec = nystrom(&problem)?;
    let (family, z) = p.family_and_z()?;
    let (a, b) = problem.interval();
    let asym = gap_asymptote(&family, z, problem.length(), problem.xi())?;
    let mut t = Table::new(&["a", "b", "xi", "det", "asymptote", "order"]);
    t.push(vec![a.into(), b.into(), problem.xi().into(), spec.det(problem.xi()).into(), asym.into(), spec.order.into()]);
    Ok(t)
}

/// E(n; J) for n = 0..=nmax.
pub fn counting(p: &Params) -> Result<Table, CliError> {
    let problem = fredholm_problem(p)?;
    let dist = counting_distribution(&problem, p.nmax.unwrap_or(10))?;
    let mut t = Table::new(&["n", "probability"]);
    for (n, pr) in dist.probabilities().iter().enumerate() {
        t.push(vec![n.into(), (*pr).into()]);
    }
    Ok(t)
}

fn lattice(p: &Params, continuum: bool) -> Result<TensorLattice, CliError> {
    let (family, z) = p.family_and_z()?;
    let m = p.require_m()?;
    let l = p.l.unwrap_or(m as f64);
    Ok(if continuum {
        TensorLattice::from_continuum(p.dim(), m, l, z, family)?
    } else {
        TensorLattice::new(p.dim(), m, l, z, family)?
    })
}

/// Exact samples on the periodic lattice, one row per point.
pub fn sample(p: &Params) -> Result<Table, CliError> {
    let seed = p.require_seed()?;
    let lat = lattice(p, false)?;
    let reps = p.reps.unwrap_or(1);
    let samples = (0..reps as u64)
        .into_par_iter()
        .map(|r| sample_replicate(&lat, seed, r))
        .collect::<Result<Vec<_>, _>>()?;
    let columns: &[&'static str] = match lat.d() {
        1 => &["rep", "site", "x0"],
        2 => &["rep", "site", "x0", "x1"],
        _ => &["rep", "site", "x0", "x1", "x2"],
    };
    let mut t = Table::new(columns);
    let pivots: usize = samples.iter().map(|s| s.degenerate_pivots()).sum();
    if pivots > 0 {
        eprintln!("note: {pivots} degenerate pivots were redrawn");
    }
    for (rep, s) in samples.iter().enumerate() {
        for (&i, x) in s.indices().iter().zip(s.sites()) {
            let mut row: Vec<Cell> = vec![rep.into(), i.into()];
            row.extend(x.iter().map(|c| Cell::from(*c)));
            t.push(row);
        }
    }
    Ok(t)
}

/// Hole-probability decay rate against βP on nested square blocks (d = 2).
pub fn hole(p: &Params) -> Result<Table, CliError> {
    let seed = p.require_seed()?;
    if p.dim() != 2 {
        return Err(CliError::Invalid("hole needs --d 2".into()));
    }
    let lat = lattice(p, true)?;
    let sides = p.sides.clone().ok_or_else(|| CliError::Invalid("hole needs --sides".into()))?;
    let rows = hole_probability_check(&lat, &sides, p.reps.unwrap_or(10_000), seed)?;
    let mut t = Table::new(&[
        "side", "sites", "area", "gap", "gap_stderr", "rate", "rate_stderr", "betaP", "ratio", "insufficient",
    ]);
    for r in rows {
        let (rate, rate_err) = r.rate.map_or((f64::NAN, f64::NAN), |e| (e.mean, e.stderr));
        t.push(vec![
            r.side.into(),
            r.sites.into(),
            r.area.into(),
            r.gap.mean.into(),
            r.gap.stderr.into(),
            rate.into(),
            rate_err.into(),
            r.pressure.into(),
            r.ratio.unwrap_or(f64::NAN).into(),
            r.insufficient.into(),
        ]);
    }
    Ok(t)
}
