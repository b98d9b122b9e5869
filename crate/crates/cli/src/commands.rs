//! Subcommand bodies. Each one resolves its defaults into the returned
//! configuration so the manifest can re-run it.

use std::f64::consts::PI;
use std::path::Path;

use ymh_core::energy::{total_energy, EnergyReport};
use ymh_core::flow::{
    build_sweepout, gap_probe, perturbed_trivial, relax, sweepout_energy, width_scan, FlowParams, FlowStatus, FlowTrace,
    GapTrial,
};
use ymh_core::gauge::{random_smooth_algebra_field, reducible_pair};
use ymh_core::grid::{HiggsField, OneFormField, Region};
use ymh_core::io::{load_snapshot, save_snapshot, write_csv, RunConfig};
use ymh_core::measures::{
    charge_degree_with_level, charge_volume, detect_concentration, measures, rescale_window, z_beta_sites,
    DEFAULT_ETA_STAR, DEFAULT_SPHERE_LEVEL,
};
use ymh_core::radial::{
    bps_profile_scaled, hedgehog_to_grid, initial_guess, radial_bogomolny, radial_energy, radial_relax, RadialProfile,
};
use ymh_core::verify::run_suite;
use ymh_core::{Boundary, Configuration, EnergyParams, Error, Grid, Su2Vec};

use crate::{CliError, Command, Outcome};

type Res<T> = std::result::Result<T, CliError>;

pub fn dispatch(cmd: Command, rc: RunConfig, out: &Path) -> Res<Outcome> {
    match cmd {
        Command::Relax => relax_cmd(rc, out),
        Command::Sweepout => sweepout_cmd(rc, out),
        Command::Bps => bps_cmd(rc, out),
        Command::Radial => radial_cmd(rc, out),
        Command::Charge => charge_cmd(rc, out),
        Command::Bubbling => bubbling_cmd(rc, out),
        Command::GapProbe => gap_cmd(rc, out),
        Command::Verify => verify_cmd(rc, out),
    }
}

fn pin_params(rc: &mut RunConfig, p: EnergyParams) {
    rc.epsilon = Some(p.epsilon);
    rc.lambda = Some(p.lambda);
}

fn pin_grid(rc: &mut RunConfig, g: &Grid) {
    let d = g.dims();
    rc.n1 = Some(d[0]);
    rc.n2 = Some(d[1]);
    rc.n3 = Some(d[2]);
    rc.h = Some(g.spacing());
    rc.boundary = Some(g.boundary());
    rc.twist_n = Some(g.twist());
}

fn flow_params(rc: &mut RunConfig, defaults: FlowParams) -> Res<FlowParams> {
    let fp = FlowParams {
        step0: rc.step0.unwrap_or(defaults.step0),
        tol_residual: rc.tol_residual.unwrap_or(defaults.tol_residual),
        max_iters: rc.max_iters.unwrap_or(defaults.max_iters),
        backtrack: rc.backtrack.unwrap_or(defaults.backtrack),
    };
    fp.validate()?;
    rc.step0 = Some(fp.step0);
    rc.tol_residual = Some(fp.tol_residual);
    rc.max_iters = Some(fp.max_iters);
    rc.backtrack = Some(fp.backtrack);
    Ok(fp)
}

struct Files<'a> {
    dir: &'a Path,
    names: Vec<String>,
}

impl<'a> Files<'a> {
    fn new(dir: &'a Path) -> Self {
        Files { dir, names: Vec::new() }
    }

    fn csv<I, S>(&mut self, name: &str, header: &str, rows: I) -> Res<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        write_csv(&self.dir.join(name), header, rows)?;
        self.names.push(name.to_string());
        Ok(())
    }

    fn snapshot(&mut self, name: &str, cfg: &Configuration, p: EnergyParams) -> Res<()> {
        save_snapshot(cfg, p, &self.dir.join(name))?;
        self.names.push(name.to_string());
        Ok(())
    }

    fn text(&mut self, name: &str, text: &str) -> Res<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, text).map_err(|e| CliError::Core(Error::Io { path, source: e }))?;
        self.names.push(name.to_string());
        Ok(())
    }
}

fn stage_rows(rows: &[(&str, EnergyReport)]) -> Vec<String> {
    rows.iter().map(|(s, r)| format!("{s},{}", r.csv_row())).collect()
}

fn status_failure(status: FlowStatus) -> Option<String> {
    (status == FlowStatus::Diverged).then(|| "step size collapsed before the energy stopped decreasing".to_string())
}

/// Starting configuration for `relax` when no snapshot is given.
fn generated_start(rc: &mut RunConfig) -> Res<(Configuration, EnergyParams)> {
    let p = rc.energy_params(0.125, 1.0)?;
    let n = rc.n1.unwrap_or(16);
    let g = rc.grid(16, 1.0 / n as f64, Boundary::Periodic)?;
    let seed = rc.seed.unwrap_or(0);
    rc.seed = Some(seed);
    let cfg = match (g.boundary(), g.twist()) {
        (Boundary::Periodic, 0) => {
            let amp = rc.amplitude.unwrap_or(0.1 * p.lambda.min(1.0));
            rc.amplitude = Some(amp);
            perturbed_trivial(p, &g, amp, seed)?
        }
        (Boundary::Periodic, _) => {
            // Reducible pair plus a T₃-valued perturbation, which the seam
            // rotation leaves unchanged.
            let amp = rc.amplitude.unwrap_or(0.05);
            rc.amplitude = Some(amp);
            let comps: Vec<_> = (0..4).map(|d| random_smooth_algebra_field(&g, 4 * seed + d, 1.0)).collect();
            let t3 = |c: usize, i: usize| Su2Vec::T3 * comps[c][i].0[0];
            let da = OneFormField((0..g.n_sites()).map(|i| [t3(0, i), t3(1, i), t3(2, i)]).collect());
            let dphi = HiggsField((0..g.n_sites()).map(|i| t3(3, i)).collect());
            reducible_pair(&g)?.perturbed(amp, &da, &dphi)
        }
        (Boundary::Dirichlet, _) => {
            let y = rc.y.unwrap_or([0.0; 3]);
            rc.y = Some(y);
            build_sweepout(y, p, &g)?
        }
    };
    pin_grid(rc, &g);
    pin_params(rc, p);
    Ok((cfg, p))
}

fn relax_cmd(mut rc: RunConfig, out: &Path) -> Res<Outcome> {
    let (cfg, p) = match rc.input.clone() {
        Some(path) => {
            let (cfg, stored) = load_snapshot(Path::new(&path))?;
            let p = EnergyParams::new(rc.epsilon.unwrap_or(stored.epsilon), rc.lambda.unwrap_or(stored.lambda))?;
            pin_params(&mut rc, p);
            (cfg, p)
        }
        None => generated_start(&mut rc)?,
    };
    let fp = flow_params(&mut rc, FlowParams::default())?;
    let before = total_energy(&cfg, p);
    let (done, trace) = relax(&cfg, p, &fp)?;
    let after = total_energy(&done, p);
    let mut f = Files::new(out);
    f.csv("trace.csv", FlowTrace::CSV_HEADER, trace.csv_rows())?;
    f.csv(
        "energy.csv",
        &format!("stage,{}", EnergyReport::CSV_HEADER),
        stage_rows(&[("initial", before), ("final", after)]),
    )?;
    f.snapshot("final.ymh", &done, p)?;
    Ok(Outcome {
        effective: rc,
        summary: format!(
            "relax: {:?} after {} iterations, energy {:e} -> {:e}, residual {:e}",
            trace.status,
            trace.iterations(),
            before.total,
            after.total,
            trace.final_residual()
        ),
        files: f.names,
        numerical_failure: status_failure(trace.status),
    })
}

/// Dirichlet cube `[−1, 1]³` unless the configuration says otherwise.
fn cube_grid(rc: &mut RunConfig, n: usize) -> Res<Grid> {
    let n = rc.n1.unwrap_or(n);
    let g = rc.grid(n, 2.0 / (n - 1) as f64, Boundary::Dirichlet)?;
    pin_grid(rc, &g);
    Ok(g)
}

fn sweepout_cmd(mut rc: RunConfig, out: &Path) -> Res<Outcome> {
    let p = rc.energy_params(0.25, 1.0)?;
    pin_params(&mut rc, p);
    let g = cube_grid(&mut rc, 33)?;
    let mut f = Files::new(out);
    let header = format!("y1,y2,y3,{}", EnergyReport::CSV_HEADER);
    let row = |y: [f64; 3], r: &EnergyReport| format!("{:e},{:e},{:e},{}", y[0], y[1], y[2], r.csv_row());
    let summary = if let Some(y) = rc.y {
        let rep = sweepout_energy(y, p, &g)?;
        f.csv("sweepout.csv", &header, [row(y, &rep)])?;
        f.snapshot("sweepout.ymh", &build_sweepout(y, p, &g)?, p)?;
        format!("sweepout: energy/epsilon {:e} at y = {y:?}", rep.normalized)
    } else {
        let n = rc.y_samples.unwrap_or(100);
        if n == 0 {
            return Err(CliError::Invalid("y_samples must be >= 1".into()));
        }
        rc.y_samples = Some(n);
        let scan = width_scan(p, &g, n)?;
        f.csv("sweepout.csv", &header, scan.samples.iter().map(|(y, r)| row(*y, r)))?;
        format!(
            "sweepout: max energy/epsilon {:e} over {n} samples at y = {:?}",
            scan.omega_hat / p.epsilon,
            scan.argmax_y
        )
    };
    Ok(Outcome { effective: rc, summary, files: f.names, numerical_failure: None })
}

fn profile_rows(prof: &RadialProfile) -> impl Iterator<Item = String> + '_ {
    (0..prof.len()).map(|i| format!("{:e},{:e},{:e}", prof.r[i], prof.h[i], prof.k[i]))
}

fn radial_grid(rc: &mut RunConfig, r_max: f64, n: usize) -> Res<(f64, usize)> {
    let r_max = rc.r_max.unwrap_or(r_max);
    let n = rc.n_radial.unwrap_or(n);
    rc.r_max = Some(r_max);
    rc.n_radial = Some(n);
    Ok((r_max, n))
}

fn bps_cmd(mut rc: RunConfig, out: &Path) -> Res<Outcome> {
    if rc.lambda.is_some_and(|l| l != 0.0) {
        return Err(CliError::Invalid("bps: the closed-form monopole needs lambda = 0".into()));
    }
    let p = rc.energy_params(1.0, 0.0)?;
    pin_params(&mut rc, p);
    let (r_max, n) = radial_grid(&mut rc, 20.0, 4000)?;
    let prof = bps_profile_scaled(r_max, n, p.epsilon)?;
    let e = radial_energy(&prof, p);
    let (top, defect, _) = radial_bogomolny(&prof, p);
    let mut f = Files::new(out);
    f.csv(
        "bps.csv",
        "epsilon,lambda,r_max,n,curvature,gradient,potential,bogomolny_defect,topological,total,normalized",
        [format!(
            "{:e},{:e},{:e},{n},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
            p.epsilon, p.lambda, r_max, e.curvature, e.gradient, e.potential, defect, top, e.total, e.normalized
        )],
    )?;
    f.csv("profile.csv", "r,H,K", profile_rows(&prof))?;
    Ok(Outcome {
        effective: rc,
        summary: format!(
            "bps: energy/epsilon {:.6} (8pi = {:.6}), relative deviation {:.2e}",
            e.normalized,
            8.0 * PI,
            (e.normalized / (8.0 * PI) - 1.0).abs()
        ),
        files: f.names,
        numerical_failure: None,
    })
}

/// Relaxed (λ > 0) or closed-form (λ = 0) charge-one profile.
fn monopole_profile(rc: &mut RunConfig, p: EnergyParams) -> Res<(RadialProfile, FlowTrace)> {
    let (r_max, n) = radial_grid(rc, 20.0 * p.epsilon, 4000)?;
    let fp = flow_params(rc, FlowParams { step0: 1.0, tol_residual: 1e-6, max_iters: 200, backtrack: 0.5 })?;
    if p.lambda == 0.0 {
        // Already critical; a zero-iteration run records its energy and residual.
        return Ok(radial_relax(&bps_profile_scaled(r_max, n, p.epsilon)?, p, &FlowParams { max_iters: 0, ..fp })?);
    }
    Ok(radial_relax(&initial_guess(r_max, n, p)?, p, &fp)?)
}

fn radial_cmd(mut rc: RunConfig, out: &Path) -> Res<Outcome> {
    let p = rc.energy_params(1.0, 1.0)?;
    pin_params(&mut rc, p);
    let (prof, trace) = monopole_profile(&mut rc, p)?;
    let e = radial_energy(&prof, p);
    let mut f = Files::new(out);
    f.csv("trace.csv", FlowTrace::CSV_HEADER, trace.csv_rows())?;
    f.csv("profile.csv", "r,H,K", profile_rows(&prof))?;
    f.csv(
        "energy.csv",
        &format!("{},excess_over_8pi", EnergyReport::CSV_HEADER),
        [format!("{},{:e}", e.csv_row(), e.normalized - 8.0 * PI)],
    )?;
    Ok(Outcome {
        effective: rc,
        summary: format!(
            "radial: {:?} after {} iterations, energy/epsilon {:.6}, residual {:e}",
            trace.status,
            trace.iterations(),
            e.normalized,
            trace.final_residual()
        ),
        files: f.names,
        numerical_failure: status_failure(trace.status),
    })
}

/// Snapshot from `input`, or a relaxed monopole lifted to `[−8ε, 8ε]³` at `h = ε/4`.
fn monopole_or_input(rc: &mut RunConfig) -> Res<(Configuration, EnergyParams)> {
    if let Some(path) = rc.input.clone() {
        let (cfg, stored) = load_snapshot(Path::new(&path))?;
        let p = EnergyParams::new(rc.epsilon.unwrap_or(stored.epsilon), rc.lambda.unwrap_or(stored.lambda))?;
        pin_params(rc, p);
        return Ok((cfg, p));
    }
    let p = rc.energy_params(0.25, 1.0)?;
    pin_params(rc, p);
    let (prof, trace) = monopole_profile(rc, p)?;
    if trace.status == FlowStatus::Diverged {
        return Err(CliError::Numerical("radial relaxation of the starting monopole diverged".into()));
    }
    let g = rc.grid(65, p.epsilon / 4.0, Boundary::Dirichlet)?;
    pin_grid(rc, &g);
    Ok((hedgehog_to_grid(&prof, &g)?, p))
}

fn charge_cmd(mut rc: RunConfig, out: &Path) -> Res<Outcome> {
    let (cfg, p) = monopole_or_input(&mut rc)?;
    let g = &cfg.grid;
    let center = rc.center.unwrap_or(g.center());
    rc.center = Some(center);
    let radii = rc.radii.clone().unwrap_or_else(|| [2.0, 4.0, 6.0].map(|k| k * p.epsilon).to_vec());
    rc.radii = Some(radii.clone());
    let level = rc.sphere_level.unwrap_or(DEFAULT_SPHERE_LEVEL);
    rc.sphere_level = Some(level);
    let m = measures(&cfg, p);
    let mut rows = Vec::new();
    for &r in &radii {
        let (mass, kappa) = m.ball_mass(center, r)?;
        let degree = match charge_degree_with_level(&cfg, center, r, level) {
            Ok(d) => format!("{d:e}"),
            Err(Error::HiggsVanishesOnSphere { .. }) => String::new(),
            Err(e) => return Err(e.into()),
        };
        rows.push(format!("{r:e},{mass:e},{:e},{degree}", kappa / (8.0 * PI)));
    }
    let total = charge_volume(&cfg, p, Region::All)?;
    let mut f = Files::new(out);
    f.csv("charge.csv", "radius,mass,charge,degree", rows)?;
    Ok(Outcome {
        effective: rc,
        summary: format!("charge: volume charge over the grid {total:.6}, total mass {:.6}", m.total_mass()),
        files: f.names,
        numerical_failure: None,
    })
}

fn bubbling_cmd(mut rc: RunConfig, out: &Path) -> Res<Outcome> {
    let (cfg, p) = monopole_or_input(&mut rc)?;
    let r = rc.radius.unwrap_or(4.0 * p.epsilon);
    rc.radius = Some(r);
    let eta = rc.eta_star.unwrap_or(DEFAULT_ETA_STAR);
    rc.eta_star = Some(eta);
    let beta = rc.beta.unwrap_or(0.25);
    rc.beta = Some(beta);
    let m = measures(&cfg, p);
    let report = detect_concentration(&m, r, eta);
    let g = &cfg.grid;
    let hot = z_beta_sites(&cfg, beta);
    let near = |i: usize, c: [f64; 3]| {
        let d = g.displacement(g.site_position(i), c);
        (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt() <= r
    };
    let mut text = report.to_text();
    text += &format!("z_beta beta={beta} sites={}\n", hot.len());
    for (k, pt) in report.points.iter().enumerate() {
        let inside = hot.iter().filter(|&&i| near(i, pt.center)).count();
        text += &format!("point {k} z_beta_sites={inside}\n");
    }
    let uncovered = hot.iter().filter(|&&i| !report.points.iter().any(|pt| near(i, pt.center))).count();
    text += &format!("z_beta_uncovered sites={uncovered}\n");

    let mut f = Files::new(out);
    if let Some(first) = report.points.first() {
        // Desk-scale bubble: the ball around the heaviest point at ε' = 1.
        match rescale_window(&cfg, p, first.center, p.epsilon, r) {
            Ok((bubble, bp)) => f.snapshot("bubble.ymh", &bubble, bp)?,
            Err(Error::WindowOutOfDomain) => text += "bubble window leaves the grid; not written\n",
            Err(e) => return Err(e.into()),
        }
    }
    f.text("concentration.txt", &text)?;
    f.csv(
        "masses.csv",
        "radius,mass,charge",
        report.points.iter().map(|pt| format!("{r:e},{:e},{:e}", pt.mass, pt.charge / (8.0 * PI))),
    )?;
    Ok(Outcome {
        effective: rc,
        summary: format!(
            "bubbling: {} concentration point(s), total mass {:.6}, {} hot-spot sites",
            report.points.len(),
            m.total_mass(),
            hot.len()
        ),
        files: f.names,
        numerical_failure: None,
    })
}

fn gap_cmd(mut rc: RunConfig, out: &Path) -> Res<Outcome> {
    let p = rc.energy_params(0.125, 1.0)?;
    pin_params(&mut rc, p);
    let n = rc.n1.unwrap_or(16);
    let g = rc.grid(16, 1.0 / n as f64, Boundary::Periodic)?;
    pin_grid(&mut rc, &g);
    let amp = rc.amplitude.unwrap_or(0.1 * p.lambda.min(1.0));
    rc.amplitude = Some(amp);
    let trials = rc.trials.unwrap_or(4);
    rc.trials = Some(trials);
    let seed = rc.seed.unwrap_or(0);
    rc.seed = Some(seed);
    let fp = flow_params(&mut rc, FlowParams { step0: 1e-3, max_iters: 20_000, ..FlowParams::default() })?;
    let report = gap_probe(p, &g, amp, trials, &fp, seed)?;
    let mut f = Files::new(out);
    f.csv("gap.csv", GapTrial::CSV_HEADER, report.trials.iter().map(GapTrial::csv_row))?;
    let diverged = report.trials.iter().filter(|t| t.status == FlowStatus::Diverged).count();
    Ok(Outcome {
        effective: rc,
        summary: format!(
            "gap-probe: {}/{} trials relaxed to the trivial pair",
            report.trials.iter().filter(|t| t.is_trivial()).count(),
            report.trials.len()
        ),
        files: f.names,
        numerical_failure: (diverged > 0).then(|| format!("{diverged} trial(s) diverged")),
    })
}

fn verify_cmd(mut rc: RunConfig, out: &Path) -> Res<Outcome> {
    let seed = rc.seed.unwrap_or(0);
    rc.seed = Some(seed);
    let checks = run_suite(seed)?;
    for c in &checks {
        println!("{}", c.line());
    }
    let mut f = Files::new(out);
    f.csv(
        "verify.csv",
        "check,passed,value,threshold",
        checks.iter().map(|c| format!("{},{},{:e},{:e}", c.name, c.passed, c.value, c.threshold)),
    )?;
    let failed = checks.iter().filter(|c| !c.passed).count();
    Ok(Outcome {
        effective: rc,
        summary: format!("verify: {}/{} checks passed", checks.len() - failed, checks.len()),
        files: f.names,
        numerical_failure: (failed > 0).then(|| format!("{failed} check(s) failed")),
    })
}
