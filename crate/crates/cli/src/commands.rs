//! Subcommand implementations. Every CSV starts with a `#` line echoing the
//! version and the parsed arguments, then the header row. Floats are written
//! with Rust's shortest round-trip formatting.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use padestep::metrics::{self, L2Form, PLATEAU_PCT};
use padestep::pade::{ck_polynomials, format_rational, pade_coefficients, phat_coefficients, q_roots, MAX_ORDER};
use padestep::stepper::run;
use padestep::studies::{
    self, geometric_ladder, make_integrator, peae_sweep, step_count, time_method, SweepPoint,
    SDOF_STEPS_PER_PERIOD,
};
use padestep::{Error, Method, Result};

use crate::model::{build, ModelSpec};
use crate::{Cli, Command, ConvergeArgs, PeaeArgs, RunArgs, SchemeArgs, TimeArgs};

pub fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Scheme(a) => scheme(a),
        Command::Run(a) => run_cmd(a, cli),
        Command::Converge(a) => converge(a, cli),
        Command::Peae(a) => peae(a, cli),
        Command::Time(a) => time(a, cli),
    }
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn metadata(cli: &Cli, extra: &[(String, String)]) -> String {
    let mut line = format!("# padestep {} {}", env!("CARGO_PKG_VERSION"), cli.echo);
    for (k, v) in extra {
        line.push_str(&format!(" {k}={v}"));
    }
    line
}

fn parse_methods(names: &[String]) -> Result<Vec<Method>> {
    names.iter().map(|s| Method::parse(s)).collect()
}

fn scheme(a: &SchemeArgs) -> Result<()> {
    let m = a.m;
    if m == 0 || m > MAX_ORDER {
        return Err(Error::Invalid(format!("M must be in 1..={MAX_ORDER}, got {m}")));
    }
    let pf = a.pf.unwrap_or(m);
    let poly = pade_coefficients(m)?;
    let roots = q_roots(m)?;
    let ck = ck_polynomials(m, pf)?;
    let phat = phat_coefficients(m)?;
    let mut out = io::stdout().lock();
    let join = |v: &[i128]| v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", ");
    writeln!(out, "Pade scheme M = {m} (order {}), p_f = {pf}", 2 * m)?;
    writeln!(out, "P coefficients (x^0..x^{m}): [{}]", join(&poly.p))?;
    writeln!(out, "Q coefficients (x^0..x^{m}): [{}]", join(&poly.q))?;
    writeln!(out, "roots of Q (backward error):")?;
    for r in roots.all().into_iter().filter(|r| r.im >= 0.0) {
        if r.im == 0.0 {
            writeln!(out, "  real  {:?}  ({:.2e})", r.re, poly.backward_error(r))?;
        } else {
            writeln!(out, "  pair  {:?} +/- {:?}i  ({:.2e})", r.re, r.im, poly.backward_error(r))?;
        }
    }
    writeln!(out, "P-hat coefficients (A^0..A^{}): [{}]", m - 1, join(&phat))?;
    writeln!(out, "C_k coefficients (A^0..A^{}):", m - 1)?;
    for (k, c) in ck.polys.iter().enumerate() {
        let s: Vec<String> = c.iter().map(format_rational).collect();
        writeln!(out, "  C_{k} = [{}]", s.join(", "))?;
    }
    Ok(())
}

fn run_cmd(a: &RunArgs, cli: &Cli) -> Result<()> {
    let spec = ModelSpec::parse(&a.model.model)?;
    let model = build(&spec, &a.model.inputs())?;
    let method = match a.m {
        Some(m) => Method::parse(&m.to_string())?,
        None => Method::parse(&a.method)?,
    };
    let dt = match (a.dt, a.steps_per_period, model.period) {
        (Some(dt), _, _) => dt,
        (None, Some(n), Some(t)) if n > 0 => t / n as f64,
        (None, Some(_), None) => return Err(Error::Invalid("--steps-per-period needs an SDOF model".into())),
        _ => return Err(Error::Invalid("give --dt or --steps-per-period".into())),
    };
    let t_sim = a.t_sim.unwrap_or(model.default_t_sim);
    if !(t_sim > 0.0) {
        return Err(Error::Invalid(format!("t_sim must be positive, got {t_sim}")));
    }
    let steps = step_count(t_sim, dt);
    let dofs = if a.dofs.is_empty() { vec![model.observe] } else { a.dofs.clone() };
    let mut integ = make_integrator(&model.sys, method, dt, a.pf)?;
    let hist = run(integ.as_mut(), steps, &dofs)?;
    let mut meta = model.notes.clone();
    meta.push(("resolved_method".into(), method.label()));
    meta.push(("resolved_dt".into(), format!("{dt:?}")));
    meta.push(("steps".into(), steps.to_string()));
    let mut out = open_output(a.output.as_deref())?;
    writeln!(out, "{}", metadata(cli, &meta))?;
    hist.write_csv(&mut out)?;
    out.flush()?;
    Ok(())
}

fn converge(a: &ConvergeArgs, cli: &Cli) -> Result<()> {
    let spec = ModelSpec::parse(&a.model.model)?;
    let model = build(&spec, &a.model.inputs())?;
    let methods = parse_methods(&a.methods)?;
    let form = match a.form.as_str() {
        "root" => L2Form::Root,
        "squared" => L2Form::Squared,
        f => return Err(Error::Parse(format!("unknown error form '{f}'"))),
    };
    let dts = if !a.ladder.is_empty() {
        if a.ladder.len() != 3 {
            return Err(Error::Invalid("--ladder takes start,factor,count".into()));
        }
        geometric_ladder(a.ladder[0], a.ladder[1], a.ladder[2] as usize)?
    } else if let Some(t) = model.period {
        let n: &[usize] = if a.steps_per_period.is_empty() { &SDOF_STEPS_PER_PERIOD } else { &a.steps_per_period };
        n.iter().map(|&k| t / k as f64).collect()
    } else {
        geometric_ladder(1e-2, 0.5, 9)?
    };
    if dts.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Invalid("step ladder must be strictly decreasing".into()));
    }
    let t_sim = a.t_sim.unwrap_or(model.default_t_sim);
    let dof = a.dof.unwrap_or(model.observe);
    let mut meta = model.notes.clone();
    let tables: Vec<Vec<SweepPoint>> = if let Some(exact) = model.analytic() {
        meta.push(("reference".into(), "closed-form".into()));
        methods
            .iter()
            .map(|&m| {
                padestep::exec::map(&dts, |&dt| {
                    let mut integ = make_integrator(&model.sys, m, dt, None)?;
                    let u = padestep::stepper::displacement_series(integ.as_mut(), step_count(t_sim, dt), dof)?;
                    let r: Vec<f64> = (0..u.len()).map(|i| exact(i as f64 * dt)).collect();
                    metrics::l2_error_with(&u, &r, form).map(|error| SweepPoint { dt, error })
                })
                .into_iter()
                .collect()
            })
            .collect::<Result<_>>()?
    } else {
        let ref_dt = dts[dts.len() - 1] / a.ref_refine.max(1) as f64;
        meta.push(("reference".into(), format!("pade4 dt={ref_dt:?}")));
        let mut integ = make_integrator(&model.sys, Method::Pade(4), ref_dt, None)?;
        let reference = padestep::stepper::displacement_series(integ.as_mut(), step_count(t_sim, ref_dt), dof)?;
        let mut tables = Vec::new();
        for &m in &methods {
            tables.push(padestep::exec::map(&dts, |&dt| {
                let mut integ = make_integrator(&model.sys, m, dt, None)?;
                let u = padestep::stepper::displacement_series(integ.as_mut(), step_count(t_sim, dt), dof)?;
                let r = studies::subsample(&reference, ref_dt, dt)?;
                metrics::l2_error_with(&u, &r, form).map(|error| SweepPoint { dt, error })
            })
            .into_iter()
            .collect::<Result<Vec<_>>>()?);
        }
        tables
    };
    meta.push(("t_sim".into(), format!("{t_sim:?}")));
    meta.push(("dof".into(), dof.to_string()));
    let mut out = open_output(a.output.as_deref())?;
    writeln!(out, "{}", metadata(cli, &meta))?;
    writeln!(out, "order,dt,epsilon_L2,slope")?;
    for (m, pts) in methods.iter().zip(&tables) {
        let pairs: Vec<(f64, f64)> = pts.iter().map(|p| (p.dt, p.error)).collect();
        let slope = metrics::convergence_slope_in(&pairs, PLATEAU_PCT, a.fit_max).map_or(f64::NAN, |f| f.slope);
        let cross = metrics::crossing_dt(&pairs, 1.0);
        eprintln!("{}: slope {slope:.3}, 1% reached at dt {:?}", m.label(), cross);
        for p in pts {
            writeln!(out, "{},{:?},{:?},{:?}", m.accuracy_order(), p.dt, p.error, slope)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn peae(a: &PeaeArgs, cli: &Cli) -> Result<()> {
    let methods = parse_methods(&a.methods)?;
    if a.ratios.iter().any(|r| !(*r > 0.0)) || a.periods == 0 {
        return Err(Error::Invalid("ratios must be positive and periods at least 1".into()));
    }
    let pts = peae_sweep(&methods, &a.ratios, a.periods)?;
    let mut out = open_output(a.output.as_deref())?;
    writeln!(out, "{}", metadata(cli, &[]))?;
    writeln!(out, "order,dt_over_T,AE_pct,PE_pct")?;
    for p in &pts {
        if p.pe_partial {
            eprintln!("{} at dt/T = {:?}: fewer peaks than periods", p.method.label(), p.dt_over_t);
        }
        writeln!(out, "{},{:?},{:?},{:?}", p.method.accuracy_order(), p.dt_over_t, p.ae_pct, p.pe_pct)?;
    }
    out.flush()?;
    Ok(())
}

fn time(a: &TimeArgs, cli: &Cli) -> Result<()> {
    let model_name = if a.model.model == "sdof:1" { "rod:80x16".to_string() } else { a.model.model.clone() };
    let spec = ModelSpec::parse(&model_name)?;
    let model = build(&spec, &a.model.inputs())?;
    let methods = parse_methods(&a.methods)?;
    let timings: Vec<_> = methods
        .iter()
        .map(|&m| time_method(&model.sys, m, a.dt, a.steps, a.repeats))
        .collect::<Result<_>>()?;
    let base = timings
        .iter()
        .find(|t| t.method == Method::Newmark)
        .unwrap_or(&timings[0])
        .per_step_s;
    let mut meta = model.notes.clone();
    meta.push(("model".into(), model_name));
    meta.push(("factorization".into(), "amortized".into()));
    let mut out = open_output(a.output.as_deref())?;
    writeln!(out, "{}", metadata(cli, &meta))?;
    writeln!(out, "method,order,setup_s,per_step_s,normalized")?;
    for t in &timings {
        writeln!(
            out,
            "{},{},{:?},{:?},{:?}",
            t.method.label(),
            t.method.accuracy_order(),
            t.setup_s,
            t.per_step_s,
            t.per_step_s / base
        )?;
    }
    out.flush()?;
    Ok(())
}
