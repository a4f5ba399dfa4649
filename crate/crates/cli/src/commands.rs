//! Subcommand implementations. Each writes its report to `out` and returns
//! an error carrying the process exit code.

use std::f64::consts::PI;
use std::fs;
use std::io::{self, BufReader, Write};
use std::net::TcpListener;
use std::path::Path;

use vinelock_core::{
    beam_tip_force, calibrate_fastener, fit_shape, new_session, plan_from_shape, separation_pressure,
    tip_deflection, Command, DesignParams, FastenerParams, FitOptions, PlanError, Polyline, Pose, Regime,
    StaticsError, TensionMode,
};

use crate::args::*;
use crate::emit::{self, TraceRecord};
use crate::error::{CliError, Result};
use crate::files;
use crate::protocol::{self, SessionConfig};
use crate::scenario::{load_design, ScenarioFile, Source};

fn design_or_default(path: Option<&Path>) -> Result<DesignParams> {
    path.map_or_else(|| Ok(DesignParams::default()), load_design)
}

fn report(out: &mut dyn Write, text: std::fmt::Arguments) -> Result<()> {
    out.write_fmt(text).map_err(|e| CliError::io(Path::new("<stdout>"), e))
}

fn plan_error(e: PlanError) -> CliError {
    match e {
        PlanError::UnreachableTolerance { .. } => CliError::Unreachable(e.to_string()),
        PlanError::TooFewWaypoints(_) | PlanError::InvalidTolerance(_) => CliError::Usage(e.to_string()),
        e => CliError::Runtime(e.to_string()),
    }
}

fn warn_uncalibrated(f: &FastenerParams) {
    if !f.calibrated {
        eprintln!("note: fastener strengths are uncalibrated defaults; fit them with `vinelock calibrate`");
    }
}

/// Commands and start pose of a scenario, fitting and planning a waypoint
/// target first.
fn scenario_commands(s: &ScenarioFile, out: &mut dyn Write) -> Result<(Vec<Command>, Pose)> {
    match &s.source {
        Source::Plan(plan) => Ok((plan.steps.clone(), s.base.unwrap_or(plan.base))),
        Source::CommandScript(cmds) => Ok((cmds.clone(), s.base.unwrap_or_default())),
        Source::TargetWaypoints(waypoints) => {
            let fit = fit_shape(waypoints, &s.design, s.options.tol_mm, &FitOptions::default()).map_err(plan_error)?;
            let plan = plan_from_shape(&fit.shape, &s.design, s.pressure, s.options.tension_mode).map_err(plan_error)?;
            report(
                out,
                format_args!("fit: residual_mm={} primitives={}\n", fit.residual, fit.primitive_count),
            )?;
            Ok((plan.steps, s.base.unwrap_or(fit.base)))
        }
    }
}

pub fn simulate(args: &SimulateArgs, out: &mut dyn Write) -> Result<()> {
    let mut scenario = ScenarioFile::load(&args.scenario)?;
    if let Some(path) = &args.design {
        scenario.design = load_design(path)?;
    }
    if let Some(t) = args.disturbance {
        scenario.options.disturbance = t.into();
    }
    let (commands, base) = scenario_commands(&scenario, out)?;
    fs::create_dir_all(&args.out).map_err(|e| CliError::io(&args.out, e))?;

    let mut state = new_session(scenario.design, scenario.pressure)
        .map_err(|e| CliError::Runtime(e.to_string()))?
        .with_disturbance(scenario.options.disturbance);
    let trace_path = args.out.join("trace.jsonl");
    let mut trace = files::create(&trace_path)?;
    let mut failure = None;
    for (i, cmd) in commands.iter().enumerate() {
        match state.apply(cmd) {
            Ok(events) => {
                let record = TraceRecord {
                    seq: i as u64 + 1,
                    cmd: *cmd,
                    everted_len: state.everted_len,
                    primitive_count: state.shape().len(),
                    events,
                };
                emit::write_trace_line(&mut trace, &record).map_err(|e| CliError::io(&trace_path, e))?;
            }
            Err(e) => {
                failure = Some(CliError::Runtime(format!("command {}: {e}", i + 1)));
                break;
            }
        }
    }
    files::finish(&trace_path, trace)?;

    let snapshot = state
        .snapshot(base, scenario.options.samples_per_mm)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    let csv_path = args.out.join("centerline.csv");
    let mut csv = files::create(&csv_path)?;
    emit::write_centerline_csv(&mut csv, &snapshot).map_err(|e| CliError::io(&csv_path, e))?;
    files::finish(&csv_path, csv)?;
    let svg_path = args.out.join("deploy.svg");
    let mut svg = files::create(&svg_path)?;
    emit::write_svg(&mut svg, &snapshot, scenario.design.beam_radius).map_err(|e| CliError::io(&svg_path, e))?;
    files::finish(&svg_path, svg)?;

    for e in &state.events {
        eprintln!("event at {} mm: {:?}", e.at_len, e.kind);
    }
    if let Some(err) = failure {
        return Err(err);
    }
    report(
        out,
        format_args!(
            "everted_mm={} primitives={} events={}\n",
            state.everted_len,
            snapshot.shape.len(),
            state.events.len()
        ),
    )
}

pub fn plan(args: &PlanArgs, out: &mut dyn Write) -> Result<()> {
    let design = design_or_default(args.design.as_deref())?;
    let waypoints: Polyline = files::read_json(&args.target)?;
    if !(args.tol_mm > 0.0) {
        return Err(CliError::Usage(format!("--tol-mm must be positive, got {}", args.tol_mm)));
    }
    if !(args.pressure_kpa > 0.0) {
        return Err(CliError::Usage(format!("--pressure-kpa must be positive, got {}", args.pressure_kpa)));
    }
    let opts = FitOptions { max_primitives: args.max_primitives.max(1), ..FitOptions::default() };
    let fit = fit_shape(&waypoints, &design, args.tol_mm, &opts).map_err(plan_error)?;
    let mode = if args.binary { TensionMode::Binary } else { TensionMode::Proportional };
    let mut plan = plan_from_shape(&fit.shape, &design, args.pressure_kpa, mode).map_err(plan_error)?;
    plan.base = fit.base;
    files::write_json(&args.out, &plan)?;
    for w in &plan.warnings {
        eprintln!(
            "warning: primitive {} separates at {:.3} kPa, below the planned {} kPa",
            w.primitive_index, w.p_min, w.pressure
        );
    }
    report(
        out,
        format_args!(
            "residual_mm={}\nprimitives={}\ngrowth_mm={}\n",
            fit.residual, fit.primitive_count, plan.total_growth
        ),
    )
}

fn fastener_with(base: FastenerParams, o: &FastenerOverrides) -> Result<FastenerParams> {
    let mut f = base;
    for (slot, value) in [
        (&mut f.sigma_star, o.sigma_kpa),
        (&mut f.tau_star, o.tau_kpa),
        (&mut f.width, o.width_mm),
        (&mut f.thickness, o.thickness_mm),
        (&mut f.pinch_offset, o.offset_mm),
    ] {
        if let Some(v) = value {
            *slot = v;
        }
    }
    // explicit strengths count as measured values
    if o.sigma_kpa.is_some() && o.tau_kpa.is_some() {
        f.calibrated = true;
    }
    f.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(f)
}

fn sweep(from: f64, to: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![from];
    }
    (0..points).map(|i| from + (to - from) * i as f64 / (points - 1) as f64).collect()
}

pub fn models(args: &ModelsArgs, out: &mut dyn Write) -> Result<()> {
    let design = design_or_default(args.design.as_deref())?;
    let mut text = String::new();
    match &args.model {
        ModelCmd::PressureCurve(p) => {
            let fastener = fastener_with(design.fastener, &p.fastener)?;
            warn_uncalibrated(&fastener);
            let r = p.radius_mm.unwrap_or(design.beam_radius);
            if !(r > 0.0) {
                return Err(CliError::Usage(format!("--radius-mm must be positive, got {r}")));
            }
            let angles = match p.angle_rad {
                Some(a) => vec![a],
                None => {
                    if p.points == 0 || (p.points > 1 && !(p.from_rad < p.to_rad)) {
                        return Err(CliError::Usage(format!(
                            "sweep needs from < to and at least one point, got {}..{} with {}",
                            p.from_rad, p.to_rad, p.points
                        )));
                    }
                    sweep(p.from_rad, p.to_rad, p.points)
                }
            };
            if let Some(bad) = angles.iter().find(|a| !(**a > 0.0 && **a < PI)) {
                return Err(CliError::Usage(format!("angle {bad} rad is outside (0, π)")));
            }
            text.push_str("theta_rad,p_min_kpa\n");
            for theta in angles {
                let p_min = separation_pressure(theta, r, &fastener).map_err(|e| CliError::Usage(e.to_string()))?;
                text.push_str(&format!("{theta},{p_min}\n"));
            }
        }
        ModelCmd::Stiffness(s) => {
            if !(s.max_displacement_m > 0.0) || s.points < 2 {
                return Err(CliError::Usage("need a positive displacement range and at least 2 points".into()));
            }
            text.push_str("displacement_m,force_unlocked_n,force_locked_n\n");
            for d in sweep(0.0, s.max_displacement_m, s.points) {
                let k = &design.stiffness;
                text.push_str(&format!(
                    "{d},{},{}\n",
                    beam_tip_force(d, Regime::Unlocked, k),
                    beam_tip_force(d, Regime::Locked, k)
                ));
            }
        }
        ModelCmd::Deflection(d) => {
            let max = d.max_tension_n.unwrap_or(design.stiffness.t_full);
            if !(max > 0.0) || d.points < 2 {
                return Err(CliError::Usage("need a positive tension range and at least 2 points".into()));
            }
            text.push_str("tension_n,unlocked_deg,locked_deg\n");
            let cap = Some(design.window_full_bend_deg());
            for t in sweep(0.0, max, d.points) {
                let k = &design.stiffness;
                text.push_str(&format!(
                    "{t},{},{}\n",
                    tip_deflection(t, Regime::Unlocked, k, cap),
                    tip_deflection(t, Regime::Locked, k, None)
                ));
            }
        }
    }
    match &args.out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => report(out, format_args!("{text}")),
    }
}

pub fn calibrate(args: &CalibrateArgs, out: &mut dyn Write) -> Result<()> {
    let mut design = design_or_default(args.design.as_deref())?;
    let samples = files::read_samples_csv(&args.samples)?;
    let r = args.radius_mm.unwrap_or(design.beam_radius);
    let fit = calibrate_fastener(&samples, r, &design.fastener, args.fit_d).map_err(|e| match e {
        StaticsError::InsufficientSamples { .. } => CliError::InsufficientData(e.to_string()),
        StaticsError::InvalidSample { index, .. } => {
            // header is line 1
            CliError::schema(&args.samples, format!("line {}", index + 2), e)
        }
        e => CliError::Usage(e.to_string()),
    })?;
    if !fit.converged {
        eprintln!("warning: calibration stopped at the iteration limit; reporting the best point found");
    }
    let f = fit.params;
    report(
        out,
        format_args!(
            "sigma_star_kpa={}\ntau_star_kpa={}\npinch_offset_mm={}\nrmse_kpa={}\niterations={}\n",
            f.sigma_star, f.tau_star, f.pinch_offset, fit.rmse, fit.iterations
        ),
    )?;
    if let Some(path) = &args.write_design {
        design.fastener = f;
        files::write_json(path, &design)?;
    }
    Ok(())
}

pub fn evaluate(args: &EvaluateArgs, out: &mut dyn Write) -> Result<()> {
    if args.n < 2 {
        return Err(CliError::Usage(format!("--n must be at least 2, got {}", args.n)));
    }
    let deployed = files::read_polyline_csv(&args.deployed)?;
    let desired = files::read_polyline_csv(&args.desired)?;
    let e = vinelock_core::mean_config_error(&deployed, &desired, args.n)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    report(out, format_args!("{e}\n"))
}

pub fn serve(args: &ServeArgs) -> Result<()> {
    let design = design_or_default(args.design.as_deref())?;
    let config = SessionConfig {
        design,
        pressure: args.pressure_kpa,
        disturbance: args.disturbance.into(),
        ..SessionConfig::default()
    };
    protocol::Session::new(config).map_err(|e| CliError::Usage(e.to_string()))?;
    if args.stdio {
        let stdin = io::stdin();
        return protocol::serve_stream(BufReader::new(stdin.lock()), io::stdout().lock(), config)
            .map_err(|e| CliError::io(Path::new("<stdio>"), e));
    }
    let addr = format!("{}:{}", args.host, args.port);
    let listener = TcpListener::bind(&addr).map_err(|e| CliError::io(Path::new(&addr), e))?;
    let local = listener.local_addr().map_err(|e| CliError::io(Path::new(&addr), e))?;
    eprintln!("listening on {local}");
    protocol::serve_tcp(listener, config).map_err(|e| CliError::io(Path::new(&addr), e))
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Cmd::Simulate(a) => simulate(a, out),
        Cmd::Plan(a) => plan(a, out),
        Cmd::Models(a) => models(a, out),
        Cmd::Calibrate(a) => calibrate(a, out),
        Cmd::Evaluate(a) => evaluate(a, out),
        Cmd::Serve(a) => serve(a),
    }
}
