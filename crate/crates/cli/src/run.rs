use std::f64::consts::PI;
use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::Result;
use bslab::abstract_lab::run_lab;
use bslab::dirac::{enclosure_region, kato_sufficiency_check, norms_from_samples, MatrixPotentialSample};
use bslab::euclid3d::{critical_amplitudes, gamma_sweep, implication_chain, rollnik_monte_carlo, RadialPotential};
use bslab::hyperbolic3d::{
    default_h3_zgrid, eigenvalue_hunt_h3, fd_oracle_h3, h3_search, h3_zgrid, stability_scan, subordination_certificate,
    HyperbolicRadialPotential,
};
use bslab::numerics::linalg::operator_norm;
use bslab::numerics::Domain;
use bslab::schrodinger1d::{davies_containment, davies_radius, davies_search, fd_oracle, find_eigenvalues_bs, BsOptions, FdOptions, PotentialSpec};
use bslab::spectral::{hausdorff, SearchRect, SpectralReport};
use faer::c64;
use serde_json::json;

use crate::cli::{Command, Common, LabArgs, Output};
use crate::params::{numbers, read_table, Params};
use crate::report::{emit_report, Check, Report, RunConfig, Table};
use crate::UsageError;

/// Lower bound on `||K(lambda)||` at eigenvalues.
pub const K_NORM_FLOOR: f64 = 1.0 - 1e-3;
/// Agreement between determinant roots and the finite-difference oracle.
pub const METHOD_AGREEMENT: f64 = 1e-3;
/// Relative agreement between Rollnik quadrature and Monte Carlo.
pub const MC_AGREEMENT: f64 = 0.02;
/// Bound on `sup ||K(z)||` when the subordination constant is below 1.
pub const SCAN_SLACK: f64 = 1e-3;

/// Runs one subcommand, writes its report and returns whether every check
/// passed.
pub fn execute(cmd: &Command) -> Result<bool> {
    let (out, mut report) = match cmd {
        Command::Lab(a) => (&a.output, Report::new(lab_config(a))),
        Command::S1d(c) => (&c.output, Report::new(model_config("s1d", c)?)),
        Command::E3d(c) => (&c.output, Report::new(model_config("e3d", c)?)),
        Command::H3(c) => (&c.output, Report::new(model_config("h3", c)?)),
        Command::Dirac(c) => (&c.output, Report::new(model_config("dirac", c)?)),
    };
    let started = Instant::now();
    match cmd {
        Command::Lab(a) => lab(a, &mut report)?,
        Command::S1d(c) => s1d(c, &mut report)?,
        Command::E3d(c) => e3d(c, &mut report)?,
        Command::H3(c) => h3(c, &mut report)?,
        Command::Dirac(c) => dirac(c, &mut report)?,
    }
    stamp(&mut report, out, started);
    log::info!("{} finished in {:.2} s, passed = {}", report.config.command, started.elapsed().as_secs_f64(), report.passed);
    emit_report(&report, out.format, out.out.as_deref())?;
    Ok(report.passed)
}

fn stamp(report: &mut Report, out: &Output, started: Instant) {
    if !out.fixed_clock {
        report.started_at = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        report.elapsed_seconds = started.elapsed().as_secs_f64();
    }
}

fn lab_config(a: &LabArgs) -> RunConfig {
    RunConfig {
        command: "lab".into(),
        potential: None,
        params: Default::default(),
        grid_n: None,
        domain: None,
        search: vec![],
        zgrid: None,
        table: None,
        seed: a.output.seed,
        format: a.output.format,
        trials: Some(a.trials),
        dim_max: Some(a.dim_max),
        z_per_system: Some(a.z_per_system),
    }
}

fn model_config(command: &str, c: &Common) -> Result<RunConfig> {
    let domain = match &c.domain {
        Some(s) => {
            let v = numbers(s, 2, "domain")?;
            Some([v[0], v[1]])
        }
        None => None,
    };
    let search = c.search.iter().map(|s| SearchRect::parse(s)).collect::<bslab::Result<Vec<_>>>()?;
    Ok(RunConfig {
        command: command.into(),
        potential: c.potential.clone(),
        params: Params::parse(&c.params)?.resolved(&[]),
        grid_n: c.grid_n,
        domain,
        search,
        zgrid: c.zgrid.clone(),
        table: c.table.as_ref().map(|p| p.display().to_string()),
        seed: c.output.seed,
        format: c.output.format,
        trials: None,
        dim_max: None,
        z_per_system: None,
    })
}

fn family<'a>(c: &'a Common, default: &'a str) -> &'a str {
    c.potential.as_deref().unwrap_or(default)
}

fn unknown(model: &str, f: &str, known: &[&str]) -> anyhow::Error {
    UsageError(format!("{model} has no potential '{f}'; known: {}", known.join(", "))).into()
}

fn eigen_table(reports: &[&SpectralReport]) -> Table {
    let mut t = Table::new("eigenvalues", &["method", "re", "im", "residual", "k_norm"]);
    for r in reports {
        for e in &r.eigenvalues {
            let method = serde_json::to_value(e.method).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
            t.push([method, e.lambda.re.to_string(), e.lambda.im.to_string(), e.residual.to_string(), e.k_norm.map(|k| k.to_string()).unwrap_or_default()]);
        }
    }
    t
}

fn in_search(search: &[SearchRect], z: c64) -> bool {
    search.iter().any(|r| r.contains(z, 0.0))
}

/// Both methods must see the same eigenvalues inside the search region.
fn agreement(bs: &SpectralReport, fd: &SpectralReport, search: &[SearchRect]) -> f64 {
    let a = bs.lambdas();
    let b: Vec<c64> = fd.lambdas().into_iter().filter(|&z| in_search(search, z)).collect();
    match (a.is_empty(), b.is_empty()) {
        (true, true) => 0.0,
        (false, false) => hausdorff(&a, &b),
        _ => f64::INFINITY,
    }
}

fn min_k_norm(r: &SpectralReport) -> f64 {
    r.eigenvalues.iter().filter_map(|e| e.k_norm).fold(f64::INFINITY, f64::min)
}

fn lab(a: &LabArgs, report: &mut Report) -> Result<()> {
    let lab = run_lab(a.trials, a.dim_max, a.output.seed, a.z_per_system)?;
    report.check(Check::at_most("failed_trials", lab.failures.len() as f64, 0.0));
    report.check(Check::at_most("pseudo_friedrichs", lab.worst.pseudo_friedrichs, 1e-10));
    report.check(Check::at_most("resolvent_identity", lab.worst.resolvent, 1e-10));
    report.check(Check::at_most("forward_residual", lab.worst.max_forward, 1e-7));
    report.check(Check::at_most("backward_residual", lab.worst.max_backward, 1e-7));
    report.check(Check::at_most("round_trip", lab.worst.max_round_trip, 1e-8));
    let mut t = Table::new(
        "trials",
        &["trial", "n", "m", "eigenvalues", "bs_roots", "mismatches", "forward", "backward", "round_trip", "pseudo_friedrichs", "resolvent"],
    );
    for s in &lab.per_trial {
        t.push([
            s.trial.to_string(),
            s.n.to_string(),
            s.m.to_string(),
            s.direct_eigenvalues.to_string(),
            s.bs_roots.to_string(),
            s.mismatches.to_string(),
            s.max_forward.to_string(),
            s.max_backward.to_string(),
            s.max_round_trip.to_string(),
            s.pseudo_friedrichs.to_string(),
            s.resolvent.to_string(),
        ]);
    }
    report.tables.push(t);
    let mut v = serde_json::to_value(&lab)?;
    if let Some(m) = v.as_object_mut() {
        m.remove("per_trial");
    }
    report.result = v;
    Ok(())
}

fn s1d_potential(c: &Common) -> Result<PotentialSpec> {
    let p = Params::parse(&c.params)?;
    let f = family(c, "complex-step");
    Ok(match f {
        "complex-step" => {
            p.restrict(f, &["gamma_re", "gamma_im", "a", "b"])?;
            PotentialSpec::complex_step(c64::new(p.get("gamma_re", 0.0), p.get("gamma_im", 1.0)), p.get("a", 0.0), p.get("b", 1.0))?
        }
        "poschl-teller" => {
            p.restrict(f, &["s", "alpha"])?;
            PotentialSpec::poschl_teller(p.get("s", 1.0), p.get("alpha", 1.0))?
        }
        "gaussian" => {
            p.restrict(f, &["re", "im", "width"])?;
            PotentialSpec::gaussian(c64::new(p.get("re", -1.0), p.get("im", 0.0)), p.get("width", 1.0))?
        }
        "tabulated" => {
            p.restrict(f, &[])?;
            let path = c.table.as_deref().ok_or_else(|| UsageError("tabulated needs --table x,re,im".into()))?;
            let rows = read_table(path)?;
            if rows.iter().any(|r| r.len() != 3) {
                return Err(UsageError("tabulated rows are x,re,im".into()).into());
            }
            PotentialSpec::tabulated(rows.iter().map(|r| r[0]).collect(), rows.iter().map(|r| c64::new(r[1], r[2])).collect())?
        }
        other => return Err(unknown("s1d", other, &["complex-step", "poschl-teller", "gaussian", "tabulated"])),
    })
}

fn s1d(c: &Common, report: &mut Report) -> Result<()> {
    let p = s1d_potential(c)?;
    let domain = match report.config.domain {
        Some([lo, hi]) => Domain::interval(lo, hi)?,
        None => p.default_domain()?,
    };
    let search = if report.config.search.is_empty() { davies_search(&p)? } else { report.config.search.clone() };
    let opts = BsOptions { n: c.grid_n.unwrap_or(BsOptions::default().n), ..BsOptions::default() };
    let bs = find_eigenvalues_bs(&p, domain, &search, &opts)?;
    let fd = fd_oracle(&p, domain, &FdOptions::default())?;
    let agree = agreement(&bs, &fd, &search);
    let disk_bs = davies_containment(&p, &bs.lambdas());
    let disk_fd = davies_containment(&p, &fd.lambdas());
    report.check(Check::at_most("davies_disk_bs", disk_bs.computed, disk_bs.threshold));
    report.check(Check::at_most("davies_disk_fd", disk_fd.computed, disk_fd.threshold));
    report.check(Check::at_most("bs_fd_agreement", agree, METHOD_AGREEMENT));
    if !bs.eigenvalues.is_empty() {
        report.check(Check::at_least("k_norm_at_eigenvalues", min_k_norm(&bs), K_NORM_FLOOR));
    }
    report.certificates.extend([disk_bs, disk_fd]);
    report.tables.push(eigen_table(&[&bs, &fd]));
    let r = davies_radius(&p);
    let mut disk = Table::new("davies_disk", &["re", "im"]);
    for k in 0..=360 {
        let z = c64::from_polar(r, 2.0 * PI * k as f64 / 360.0);
        disk.push([z.re, z.im]);
    }
    report.tables.push(disk);
    report.result = json!({
        "potential": p,
        "domain": domain,
        "search": search,
        "davies_radius": r,
        "birman_schwinger": bs,
        "finite_difference": fd,
    });
    Ok(())
}

fn e3d_potential(c: &Common, p: &Params) -> Result<RadialPotential> {
    let f = family(c, "exponential");
    let v = match f {
        "exponential" => {
            p.restrict(f, &["gamma", "scale", "phase", "samples"])?;
            RadialPotential::exponential(p.get("gamma", 1.0), p.get("scale", 1.0))?
        }
        "gaussian" => {
            p.restrict(f, &["gamma", "width", "phase", "samples"])?;
            RadialPotential::gaussian(p.get("gamma", 1.0), p.get("width", 1.0))?
        }
        "inverse-square" => {
            p.restrict(f, &["c0", "r0", "r1", "phase", "samples"])?;
            RadialPotential::inverse_square(p.get("c0", 0.8), p.get("r0", 0.5), p.get("r1", 2.0))?
        }
        "step" => {
            p.restrict(f, &["gamma", "radius", "phase", "samples"])?;
            RadialPotential::step(p.get("gamma", 1.0), p.get("radius", 1.0))?
        }
        other => return Err(unknown("e3d", other, &["exponential", "gaussian", "inverse-square", "step"])),
    };
    Ok(v.with_phase(p.get("phase", 0.0)))
}

fn e3d(c: &Common, report: &mut Report) -> Result<()> {
    let params = Params::parse(&c.params)?;
    let p = e3d_potential(c, &params)?;
    let grid = match c.grid_n {
        Some(n) => p.grid(n)?,
        None => p.default_grid()?,
    };
    let samples = params.get("samples", 2e6);
    if !(samples >= 1.0) {
        return Err(UsageError("samples must be at least 1".into()).into());
    }
    let chain = implication_chain(&p, &grid)?;
    let mc = rollnik_monte_carlo(&p, samples as usize, c.output.seed)?;
    let crit = critical_amplitudes(&p, &grid)?;
    let rel = if chain.rollnik.computed > 0.0 { (mc.value - chain.rollnik.computed).abs() / chain.rollnik.computed } else { mc.value.abs() };
    report.check(Check::at_most("fkv_equals_kato", (chain.fkv.computed - chain.kato.computed).abs(), 1e-10));
    report.check(Check::at_most("rollnik_monte_carlo", rel, MC_AGREEMENT));
    report.check(Check::flag("implication_chain", chain.holds()));
    let a = p.amplitude();
    let gammas: Vec<f64> = (0..=16).map(|k| a * 2f64.powf(k as f64 / 4.0 - 2.0)).collect();
    let sweep = gamma_sweep(&p, &grid, &gammas)?;
    let mut t = Table::new("gamma_sweep", &["amplitude", "frank", "rollnik", "fkv", "kato", "chain_holds"]);
    for s in &sweep {
        t.push([
            s.amplitude.to_string(),
            s.frank.computed.to_string(),
            s.rollnik.computed.to_string(),
            s.fkv.computed.to_string(),
            s.kato.computed.to_string(),
            s.holds().to_string(),
        ]);
    }
    report.tables.push(t);
    report.certificates.extend([chain.frank.clone(), chain.rollnik.clone(), chain.fkv.clone(), chain.kato.clone()]);
    report.result = json!({
        "potential": p,
        "grid_nodes": grid.len(),
        "chain": chain,
        "monte_carlo": mc,
        "critical_amplitudes": crit,
    });
    Ok(())
}

fn h3_potential(c: &Common, p: &Params) -> Result<HyperbolicRadialPotential> {
    let f = family(c, "bump");
    let v = match f {
        "bump" => {
            p.restrict(f, &["gamma", "radius", "phase", "target_c"])?;
            HyperbolicRadialPotential::bump(p.get("gamma", 1.0), p.get("radius", 2.0))?
        }
        "sech2" => {
            p.restrict(f, &["gamma", "alpha", "phase", "target_c"])?;
            HyperbolicRadialPotential::sech2(p.get("gamma", 1.0), p.get("alpha", 2.0))?
        }
        "inverse-square" => {
            p.restrict(f, &["c0", "rho0", "rho1", "phase", "target_c"])?;
            HyperbolicRadialPotential::inverse_square(p.get("c0", 0.8), p.get("rho0", 1e-3), p.get("rho1", 5.0))?
        }
        other => return Err(unknown("h3", other, &["bump", "sech2", "inverse-square"])),
    };
    Ok(v.with_phase(p.get("phase", 0.0)))
}

fn h3(c: &Common, report: &mut Report) -> Result<()> {
    let params = Params::parse(&c.params)?;
    let mut p = h3_potential(c, &params)?;
    let grid_for = |p: &HyperbolicRadialPotential| match c.grid_n {
        Some(n) => p.grid(n),
        None => p.default_grid(),
    };
    let mut grid = grid_for(&p)?;
    let mut sub = subordination_certificate(&p, &grid)?;
    if let Some(target) = params.opt("target_c") {
        if !(target > 0.0) || sub.constant() == 0.0 {
            return Err(UsageError("target_c needs a positive target and a nonzero potential".into()).into());
        }
        p = p.scaled(target / sub.constant())?;
        grid = grid_for(&p)?;
        sub = subordination_certificate(&p, &grid)?;
    }
    let zgrid = match c.zgrid.as_deref() {
        None | Some("default") => default_h3_zgrid(),
        Some(s) => {
            let v = numbers(s, 6, "zgrid")?;
            h3_zgrid(v[0], v[1], v[2] as usize, v[3] as usize, v[4], v[5] as usize)
        }
    };
    let search = if report.config.search.is_empty() { h3_search(-2.0, 3.0, 2.0)? } else { report.config.search.clone() };
    let opts = BsOptions { n: c.grid_n.unwrap_or(200), coarse_n: 60, ..BsOptions::default() };
    let hunt = eigenvalue_hunt_h3(&p, &search, &opts)?;
    let fd = fd_oracle_h3(&p, &FdOptions::default())?;
    let subordinated = sub.constant() < 1.0;
    let scan = if subordinated { Some(stability_scan(&p, &grid, &zgrid)?) } else { None };
    if let Some(s) = &scan {
        report.check(Check::at_most("sup_k_norm", s.sup_norm, sub.constant() + SCAN_SLACK));
        report.check(Check::flag("scan_dominated", s.holds()));
        report.check(Check::at_most("eigenvalues_found", hunt.eigenvalues.len() as f64, 0.0));
        let mut t = Table::new("k_norm", &["re", "im", "norm"]);
        for (z, n) in zgrid.points.iter().zip(&s.norms) {
            t.push([z.re, z.im, *n]);
        }
        report.tables.push(t);
    }
    if !hunt.eigenvalues.is_empty() {
        report.check(Check::at_least("k_norm_at_eigenvalues", min_k_norm(&hunt), K_NORM_FLOOR));
    }
    report.check(Check::at_most("bs_fd_agreement", agreement(&hunt, &fd, &search), METHOD_AGREEMENT));
    report.tables.push(eigen_table(&[&hunt, &fd]));
    report.certificates.extend([sub.certificate.clone(), sub.hardy.clone()]);
    report.result = json!({
        "potential": p,
        "grid_nodes": grid.len(),
        "subordination": sub,
        "scan": scan,
        "search": search,
        "birman_schwinger": hunt,
        "finite_difference": fd,
    });
    Ok(())
}

fn dirac_samples(path: &Path) -> Result<Vec<MatrixPotentialSample>> {
    read_table(path)?.iter().map(|r| Ok(MatrixPotentialSample::from_row(r)?)).collect()
}

fn dirac(c: &Common, report: &mut Report) -> Result<()> {
    let p = Params::parse(&c.params)?;
    p.restrict("dirac", &["norm3", "norm32", "v1_norm3", "im_max"])?;
    let mut samples_json = serde_json::Value::Null;
    let (n3, n32) = match &c.table {
        Some(path) => {
            let samples = dirac_samples(path)?;
            let mut worst = 0.0f64;
            let mut t = Table::new("samples", &["x", "y", "z", "v", "rank", "reconstruction"]);
            for s in &samples {
                let m = s.matrix();
                let pol = s.polar()?;
                let err = operator_norm(&(&(&pol.u * &pol.abs) - &m)) / pol.norm().max(f64::MIN_POSITIVE);
                worst = worst.max(err);
                t.push([s.site[0].to_string(), s.site[1].to_string(), s.site[2].to_string(), pol.norm().to_string(), pol.rank.to_string(), err.to_string()]);
            }
            report.tables.push(t);
            report.check(Check::at_most("polar_reconstruction", worst, 1e-10));
            samples_json = json!({ "count": samples.len(), "max_reconstruction": worst });
            match (p.opt("norm3"), p.opt("norm32")) {
                (Some(a), Some(b)) => (a, b),
                _ => {
                    let n = norms_from_samples(&samples)?;
                    (n.l3, n.l32)
                }
            }
        }
        None => (p.get("norm3", 0.0), p.get("norm32", 0.0)),
    };
    let region = enclosure_region(n3, n32)?;
    let kato = kato_sufficiency_check(p.get("v1_norm3", n3))?;
    let mut t = Table::new("strip", &["re", "im"]);
    for (re, im) in region.boundary(p.get("im_max", 10.0)) {
        t.push([re, im]);
    }
    report.tables.push(t);
    report.certificates.extend([region.certificate.clone(), kato.clone()]);
    let w = region.half_width();
    report.result = json!({
        "region": region,
        "half_width": if w.is_finite() { json!(w) } else { json!("infinite") },
        "kato_sufficiency": kato,
        "samples": samples_json,
        "origin_excluded": region.excludes(c64::new(0.0, 0.0)),
    });
    Ok(())
}
