use std::path::PathBuf;

use fracws::numerov::{potential_eval, RadialGrid, MAX_SHOOTING_LEVEL};
use fracws::spectrum::{
    enumerate_solutions, nuclear_radius, scan_window, solve_eps_fractional, solve_level, EnergyLevel,
    MAX_LEVEL_CAP,
};
use fracws::verify::{feasibility_summary, run_suite, SuiteConfig, PIPELINE_MATCHING_SIGN};
use fracws::wavefun::{build_spec, normalize, normalize_nu, radial_nu, radial_r, JacobiArgument};
use fracws::{Execution, FractionalOrder, MiddleSign, SolveOptions};

use crate::config::{Model, RunConfig};
use crate::output::{emit, num, Cell, Table};
use crate::CliError;

fn describe_model(t: &mut Table, model: &Model, fo: Option<&FractionalOrder>) {
    if let Some(fo) = fo {
        t.meta_num("alpha", fo.alpha())
            .meta_num("beta_frac", fo.beta_frac())
            .meta_num("i_factor", fo.i_factor());
    }
    let pp = &model.pp;
    t.meta_num("v0_MeV", pp.v0)
        .meta_num("q", pp.q)
        .meta_num("c_MeV", pp.c)
        .meta_num("beta1_per_fm", pp.beta1)
        .meta_num("mu_MeV", pp.mu);
    if let Some((a, r0, ad)) = model.nuclear {
        t.meta_num("a_mass", a)
            .meta_num("r0_fm", r0)
            .meta_num("a_diff_fm", ad)
            .meta_num("radius_fm", nuclear_radius(a, r0));
    }
    let shape = pp.shape();
    t.meta_num("beta_pot", shape.beta_pot).meta_num("gamma_p", shape.gamma_p);
}

fn finish(t: &Table, cfg: &RunConfig) -> Result<(), CliError> {
    emit(&t.render(cfg.format()), cfg.out.as_deref()).map_err(CliError::io)
}

pub fn potential(cfg: &RunConfig) -> Result<(), CliError> {
    let model = cfg.model()?;
    let r_max = cfg.r_max.unwrap_or(12.0);
    let points = cfg.points.unwrap_or(600);
    if !(r_max > 0.0) || !r_max.is_finite() {
        return Err(CliError::Usage(format!("--r-max must be positive, got {r_max}")));
    }
    if points < 2 {
        return Err(CliError::Usage(format!("--points must be at least 2, got {points}")));
    }
    let mut t = Table::new(&["r_fm", "V_MeV"]);
    describe_model(&mut t, &model, None);
    t.meta("points", points).meta_num("r_max_fm", r_max);
    for i in 0..points {
        let r = r_max * i as f64 / (points - 1) as f64;
        t.push(vec![Cell::Num(r), Cell::Num(potential_eval(&model.pp, r))]);
    }
    finish(&t, cfg)
}

fn level_row(l: &EnergyLevel) -> Vec<Cell> {
    vec![
        Cell::Int(l.n),
        Cell::Num(l.eps_n),
        Cell::Num(l.energy_mev),
        Cell::Bool(l.feasible),
        Cell::Num(l.residual),
    ]
}

pub fn spectrum(cfg: &RunConfig) -> Result<(), CliError> {
    let model = cfg.model()?;
    let fo = cfg.order()?;
    let n_max = cfg.n_max.unwrap_or(10);
    if n_max > MAX_LEVEL_CAP {
        return Err(CliError::Usage(format!("--n-max must be <= {MAX_LEVEL_CAP}, got {n_max}")));
    }
    let opts = SolveOptions::default();
    let shape = model.pp.shape();
    let solutions = enumerate_solutions(&shape, &fo, n_max, &opts).map_err(CliError::usage)?;
    let levels: Vec<EnergyLevel> = solutions
        .iter()
        .map(|s| EnergyLevel::from_solution(s, &model.pp))
        .collect();

    let mut t = Table::new(&["n", "eps_n", "E_MeV", "feasible", "residual"]);
    describe_model(&mut t, &model, Some(&fo));
    let (lo, hi) = scan_window(&shape);
    t.meta("scan_window", format!("{},{}", num(lo), num(hi)))
        .meta("closed_form_middle_sign", sign_label(MiddleSign::default()))
        .meta("pipeline_matching_sign", sign_label(PIPELINE_MATCHING_SIGN))
        .meta("levels", levels.len())
        .meta("feasibility", feasibility_summary(&model.pp, &fo, &levels));
    if levels.len() <= n_max {
        let next = levels.len();
        let reason = match solve_level(next, &shape, &fo, &opts) {
            Ok(_) => "level found but failed certification".to_string(),
            Err(e) => e.to_string(),
        };
        t.meta("stopped_at_n", next).meta("stop_reason", reason);
    }
    for l in &levels {
        t.push(level_row(l));
    }
    finish(&t, cfg)
}

fn sign_label(sign: MiddleSign) -> &'static str {
    match sign {
        MiddleSign::Minus => "-1",
        MiddleSign::Plus => "+1",
    }
}

pub fn wavefunction(cfg: &RunConfig) -> Result<(), CliError> {
    let model = cfg.model()?;
    let fo = cfg.order()?;
    let r_space = cfg.r_space.unwrap_or(false);
    if r_space && fo.alpha() != 1.0 {
        return Err(CliError::Usage(format!(
            "--r-space needs alpha = 1: the r mapping of the fractional coordinate is not defined (alpha = {})",
            fo.alpha()
        )));
    }
    let n = cfg.n.unwrap_or(0);
    let points = cfg.points.unwrap_or(400);
    let r_max = cfg.r_max.unwrap_or(20.0);
    if points < 2 {
        return Err(CliError::Usage(format!("--points must be at least 2, got {points}")));
    }
    if !(r_max > 0.0) || !r_max.is_finite() {
        return Err(CliError::Usage(format!("--r-max must be positive, got {r_max}")));
    }
    let shape = model.pp.shape();
    let level = solve_level(n, &shape, &fo, &SolveOptions::default()).map_err(CliError::usage)?;
    let spec = build_spec(level.eps, &shape, &fo, n).map_err(CliError::usage)?;
    let beta1 = model.pp.beta1;

    let columns: &'static [&'static str] = if r_space { &["r_fm", "R"] } else { &["x", "R"] };
    let mut t = Table::new(columns);
    describe_model(&mut t, &model, Some(&fo));
    let jp = spec.jacobi_params().map_err(CliError::usage)?;
    t.meta("n", n)
        .meta_num("eps_n", level.eps)
        .meta_num("E_MeV", fracws::spectrum::eps_to_energy(level.eps, &model.pp))
        .meta_num("a11", spec.a11)
        .meta_num("b11", spec.b11)
        .meta("jacobi_parameters", format!("{},{}", num(jp.a()), num(jp.b())))
        .meta("jacobi_argument", "1 - 2 q x^alpha");

    if r_space {
        let spec = normalize(&spec, beta1, r_max, 200 * (r_max.ceil() as usize).max(1))
            .map_err(CliError::usage)?;
        t.meta("coordinate", "r_fm with x = exp(-2 beta1 r)/q")
            .meta_num("norm_const", spec.norm_const)
            .meta("normalization", "integral of R(r)^2 over [0, r_max] equals 1");
        for i in 0..points {
            let r = r_max * i as f64 / (points - 1) as f64;
            let v = radial_r(&spec, beta1, r).map_err(CliError::usage)?;
            t.push(vec![Cell::Num(r), Cell::Num(v)]);
        }
    } else {
        let spec = normalize_nu(&spec, 4000).map_err(CliError::usage)?;
        let x_max = spec.x_max();
        t.meta("coordinate", "x in (0, q^(-1/alpha)), midpoint samples")
            .meta_num("norm_const", spec.norm_const)
            .meta("normalization", "integral of R(x)^2 over the NU interval equals 1");
        for i in 0..points {
            let x = x_max * (i as f64 + 0.5) / points as f64;
            let v = radial_nu(&spec, x, JacobiArgument::Interval).map_err(CliError::usage)?;
            t.push(vec![Cell::Num(x), Cell::Num(v)]);
        }
    }
    finish(&t, cfg)
}

pub fn scan_alpha(cfg: &RunConfig) -> Result<(), CliError> {
    let model = cfg.model()?;
    let beta_frac = cfg.beta_frac.unwrap_or(1.0);
    let lo = cfg.alpha_min.unwrap_or(0.7);
    let hi = cfg.alpha_max.unwrap_or(1.0);
    let steps = cfg.steps.unwrap_or(13);
    let n = cfg.n.unwrap_or(0);
    if !(lo > 0.0) || !(hi <= 1.0) || !(lo <= hi) {
        return Err(CliError::Usage(format!(
            "alpha range must satisfy 0 < alpha-min <= alpha-max <= 1, got [{lo}, {hi}]"
        )));
    }
    if steps < 1 || (steps < 2 && lo != hi) {
        return Err(CliError::Usage(format!("--steps must be at least 2 for a nonempty range, got {steps}")));
    }
    let alphas: Vec<f64> = (0..steps)
        .map(|k| {
            if k + 1 == steps {
                hi
            } else {
                lo + (hi - lo) * k as f64 / (steps - 1).max(1) as f64
            }
        })
        .collect();
    let orders = alphas
        .iter()
        .map(|&a| FractionalOrder::new(a, beta_frac))
        .collect::<Result<Vec<_>, _>>()
        .map_err(CliError::usage)?;
    let inner = SolveOptions {
        exec: Execution::Sequential,
        ..SolveOptions::default()
    };
    let pp = model.pp;
    let results = Execution::default().map(orders, |fo| solve_eps_fractional(n, &pp, &fo, &inner));

    let mut t = Table::new(&["alpha", "eps_n", "E_MeV"]);
    describe_model(&mut t, &model, None);
    t.meta("n", n).meta_num("beta_frac", beta_frac).meta("steps", steps);
    let mut infeasible = Vec::new();
    let mut rows = Vec::new();
    for (a, r) in alphas.iter().zip(results) {
        match r {
            Ok(l) if l.feasible && l.eps_n.is_finite() => {
                rows.push(vec![Cell::Num(*a), Cell::Num(l.eps_n), Cell::Num(l.energy_mev)]);
            }
            _ => infeasible.push(*a),
        }
    }
    t.meta("feasible_count", rows.len());
    if !infeasible.is_empty() {
        let list: Vec<String> = infeasible.iter().map(|a| num(*a)).collect();
        t.meta("infeasible_alpha", list.join(","));
        let feasible: Vec<f64> = alphas.iter().copied().filter(|a| !infeasible.contains(a)).collect();
        let boundary = match (feasible.first(), feasible.last()) {
            (Some(f), Some(l)) => format!("level n = {n} feasible for alpha in [{}, {}] on this grid", num(*f), num(*l)),
            _ => format!("level n = {n} infeasible at every alpha on this grid"),
        };
        t.meta("feasibility_boundary", boundary);
    }
    for row in rows {
        t.push(row);
    }
    finish(&t, cfg)
}

pub fn verify(cfg: &RunConfig) -> Result<bool, CliError> {
    let model = cfg.model()?;
    let fo = cfg.order()?;
    let n_max = cfg.n_max.unwrap_or(MAX_SHOOTING_LEVEL);
    if n_max > MAX_SHOOTING_LEVEL {
        return Err(CliError::Usage(format!("--n-max must be <= {MAX_SHOOTING_LEVEL} for verify, got {n_max}")));
    }
    let suite = SuiteConfig {
        pp: model.pp,
        fo,
        grid: RadialGrid::default(),
        n_max,
        exec: Execution::default(),
    };
    let report = run_suite(&suite).map_err(CliError::usage)?;
    let path = cfg.out.clone().unwrap_or_else(|| PathBuf::from("verify-report.json"));
    let mut json = report.to_json().map_err(CliError::usage)?;
    json.push('\n');
    crate::output::write_atomic(&json, &path).map_err(CliError::io)?;
    emit(&report.table(), None).map_err(CliError::io)?;
    Ok(report.passed())
}
