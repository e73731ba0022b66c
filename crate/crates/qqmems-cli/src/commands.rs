use std::path::Path;

use qqmems::acs::{acs_sweep, AcsOptions, InitialEnsemble};
use qqmems::hermitian_core::{negativity, purity, DensityMatrix};
use qqmems::par::{derive_seed, map_indexed, Execution};
use qqmems::purity_mems::{
    construct_deg, construct_rank2, construct_rank3, deg_eigenvalues, n_hed, n_x_p_deg, n_x_p_rank2,
    n_x_p_rank3, rank2_eigenvalues, rank3_eigenvalues, verify_certificate, HedValue, Theorem,
};
use qqmems::spectrum_mems::{
    best_sequence_bruteforce, construct_spectrum_xmems, n_x_lambda, s_value, SequenceChoice, Spectrum,
};
use qqmems::tgx::{maximize_tgx2, maximize_tgx3, tgx2_matrix, tgx3_matrix, TgxOptions, TgxParams};
use qqmems::xstate::{x_negativity, XState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::output::{fmt17, opt17, write_csv, write_json, write_text};
use crate::{AcsArgs, CertifyArgs, Cli, CliError, Command, CurvesArgs, GridArgs, Prop1Args, StateArgs, TgxArgs};

fn exec(cli: &Cli) -> Execution {
    if cli.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    }
}

struct Range {
    p_min: f64,
    p_max: f64,
    p_steps: usize,
}

fn range_for(cmd: &Command) -> Range {
    match cmd {
        Command::Tgx2(_) => Range { p_min: 0.5, p_max: 0.99, p_steps: 50 },
        Command::Tgx3(_) => Range { p_min: 1.0 / 3.0, p_max: 0.99, p_steps: 50 },
        _ => Range { p_min: 0.2, p_max: 0.99, p_steps: 80 },
    }
}

/// Grid points in order: explicit list, or p_steps evenly spaced points with
/// both endpoints included.
fn resolve_grid(g: &GridArgs, default: Range) -> Result<Vec<f64>, CliError> {
    if let Some(points) = &g.points {
        if points.iter().any(|p| !p.is_finite()) {
            return Err(CliError::Usage("points must be finite".into()));
        }
        return Ok(points.clone());
    }
    let lo = g.p_min.unwrap_or(default.p_min);
    let hi = g.p_max.unwrap_or(default.p_max);
    let n = g.p_steps.unwrap_or(default.p_steps);
    if n == 0 {
        return Err(CliError::Usage("p-steps must be at least 1".into()));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(CliError::Usage(format!("p-min ({lo}) must be below p-max ({hi})")));
    }
    Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect())
}

fn validate(what: &str, p: f64, value: f64, oracle: f64, tol: f64) -> Result<(), CliError> {
    if (value - oracle).abs() > tol {
        return Err(CliError::Check(format!(
            "{what} at P = {p}: emitted {value} but trace-norm value is {oracle}"
        )));
    }
    Ok(())
}

fn oracle(x: qqmems::Result<XState>) -> Result<f64, CliError> {
    Ok(negativity(&x?.to_matrix()?))
}

pub fn dispatch(cli: &Cli, cmd: &Command) -> Result<(), CliError> {
    match cmd {
        Command::Curves(a) => curves(cli, cmd, a),
        Command::Gap(g) => gap(cli, cmd, g),
        Command::Certify(a) => certify(cli, a),
        Command::Tgx2(a) => tgx(cli, cmd, a, 2),
        Command::Tgx3(a) => tgx(cli, cmd, a, 3),
        Command::Acs(a) => acs(cli, a),
        Command::Prop1(a) => prop1(cli, a),
        Command::State(a) => state(cli, a),
    }
}

fn curves(cli: &Cli, cmd: &Command, a: &CurvesArgs) -> Result<(), CliError> {
    let mut grid = resolve_grid(&a.grid, range_for(cmd))?;
    let (lo, hi) = (1.0 / 3.0, 0.375);
    grid.extend((0..a.inset_steps).map(|i| lo + (hi - lo) * (i + 1) as f64 / (a.inset_steps + 1) as f64));
    grid.sort_by(f64::total_cmp);
    let tol = cli.validate_tol;
    let rows = map_indexed(grid.len(), exec(cli), |i| -> Result<Vec<String>, CliError> {
        let p = grid[i];
        let n2 = n_x_p_rank2(p).ok();
        let n3 = n_x_p_rank3(p).ok();
        let nd = n_x_p_deg(p).ok();
        if let Some(v) = n2 {
            validate("N2", p, v, oracle(construct_rank2(p))?, tol)?;
        }
        if let Some(v) = n3 {
            validate("N3", p, v, oracle(construct_rank3(p))?, tol)?;
        }
        if let Some(v) = nd {
            validate("Ndeg", p, v, oracle(construct_deg(p))?, tol)?;
        }
        Ok(vec![fmt17(p), opt17(n2), opt17(n3), opt17(nd)])
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    write_csv(&cli.output, &["P", "N2", "N3", "Ndeg"], &rows)
}

fn gap(cli: &Cli, cmd: &Command, g: &GridArgs) -> Result<(), CliError> {
    let grid = resolve_grid(g, range_for(cmd))?;
    let tol = cli.validate_tol;
    let rows = map_indexed(grid.len(), exec(cli), |i| -> Result<Vec<String>, CliError> {
        let p = grid[i];
        let Ok(nd) = n_x_p_deg(p) else {
            return Ok(vec![fmt17(p), String::new(), String::new(), String::new(), "P outside (1/5, 1)".into()]);
        };
        validate("Ndeg", p, nd, oracle(construct_deg(p))?, tol)?;
        let (hed, reason) = match n_hed(p)? {
            HedValue::Defined { value } => (Some(value), String::new()),
            HedValue::Undefined { radicand } => (None, format!("Nhed radicand {} < 0", fmt17(radicand))),
        };
        Ok(vec![fmt17(p), fmt17(nd), opt17(hed), opt17(hed.map(|h| nd - h)), reason])
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    write_csv(&cli.output, &["P", "Ndeg", "Nhed", "diff", "reason"], &rows)
}

fn theorems(name: &str) -> Result<Vec<Theorem>, CliError> {
    if name == "all" {
        Ok(Theorem::ALL.to_vec())
    } else {
        name.parse::<Theorem>().map(|t| vec![t]).map_err(CliError::Usage)
    }
}

fn constructed_negativity(t: Theorem, p: f64) -> Result<f64, CliError> {
    match t {
        Theorem::Rank2 => oracle(construct_rank2(p)),
        Theorem::Rank3 => oracle(construct_rank3(p)),
        Theorem::Deg => oracle(construct_deg(p)),
    }
}

fn certify(cli: &Cli, a: &CertifyArgs) -> Result<(), CliError> {
    let mut jobs = Vec::new();
    for t in theorems(&a.theorem)? {
        match a.p {
            Some(p) => {
                t.check_domain(p)?;
                jobs.push((t, p));
            }
            None => {
                if a.grid_points == 0 {
                    return Err(CliError::Usage("grid-points must be at least 1".into()));
                }
                jobs.extend(t.domain_grid(a.grid_points).into_iter().map(|p| (t, p)));
            }
        }
    }
    let reports = map_indexed(jobs.len(), exec(cli), |i| {
        let (t, p) = jobs[i];
        let rep = verify_certificate(t, p)?;
        validate("certificate negativity", p, rep.negativity, constructed_negativity(t, p)?, cli.validate_tol)?;
        Ok::<_, CliError>(rep)
    });
    let reports = reports.into_iter().collect::<Result<Vec<_>, _>>()?;
    let failed: Vec<String> = reports
        .iter()
        .filter(|r| !r.verified)
        .map(|r| format!("{}@{}", r.theorem_id.name(), r.p))
        .collect();
    write_json(&cli.output, &json!({ "all_verified": failed.is_empty(), "reports": reports }))?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Check(format!("certificates not verified: {}", failed.join(", "))))
    }
}

fn tgx(cli: &Cli, cmd: &Command, a: &TgxArgs, rank: u8) -> Result<(), CliError> {
    let grid = resolve_grid(&a.grid, range_for(cmd))?;
    if a.restarts == 0 {
        return Err(CliError::Usage("restarts must be at least 1".into()));
    }
    let opts = TgxOptions {
        restarts: a.restarts,
        xtol: a.xtol,
        max_iter: a.max_iter,
        exec: exec(cli),
    };
    let mut rows = Vec::with_capacity(grid.len());
    for (i, &p) in grid.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cli.seed, i as u64));
        let (res, reference, rho) = if rank == 2 {
            let res = maximize_tgx2(p, &opts, &mut rng)?;
            let TgxParams::Rank2(q) = res.best_params else { unreachable!("rank-2 search") };
            let rho = tgx2_matrix(&q)?;
            (res, n_x_p_rank2(p)?, rho)
        } else {
            let res = maximize_tgx3(p, &opts, &mut rng)?;
            let TgxParams::Rank3(q) = res.best_params else { unreachable!("rank-3 search") };
            let rho = tgx3_matrix(&q)?;
            (res, n_x_p_rank3(p)?, rho)
        };
        validate("tgx_max", p, res.best_value, negativity(&rho), cli.validate_tol)?;
        let xref = if rank == 2 { oracle(construct_rank2(p))? } else { oracle(construct_rank3(p))? };
        validate("x_reference", p, reference, xref, cli.validate_tol)?;
        let mut row = vec![fmt17(p), fmt17(res.best_value), fmt17(reference), fmt17(res.best_value - reference)];
        match res.best_params {
            TgxParams::Rank2(q) => row.extend([q.theta1, q.theta2, q.p1, q.p2].map(fmt17)),
            TgxParams::Rank3(q) => {
                row.extend(q.theta.map(fmt17));
                row.extend(q.p.map(fmt17));
            }
        }
        row.push(res.restarts_used.to_string());
        row.push(res.converged.to_string());
        rows.push(row);
    }
    let header: &[&str] = if rank == 2 {
        &["P", "tgx_max", "x_reference", "gap", "theta1", "theta2", "p1", "p2", "restarts", "converged"]
    } else {
        &[
            "P", "tgx_max", "x_reference", "gap", "theta1", "theta2", "theta3", "p1", "p2", "p3", "restarts",
            "converged",
        ]
    };
    write_csv(&cli.output, header, &rows)
}

fn acs(cli: &Cli, a: &AcsArgs) -> Result<(), CliError> {
    let ensemble: InitialEnsemble = a.ensemble.parse().map_err(CliError::Usage)?;
    if a.max_rounds == 0 {
        return Err(CliError::Usage("max-rounds must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let purities: Vec<f64> = match &a.points {
        Some(p) => p.clone(),
        None => {
            if !(a.p_min >= 0.2 && a.p_max <= 1.0 && a.p_min < a.p_max) {
                return Err(CliError::Usage(format!(
                    "need 1/5 <= p-min < p-max <= 1, got ({}, {})",
                    a.p_min, a.p_max
                )));
            }
            let mut v = Vec::with_capacity(a.runs);
            while v.len() < a.runs {
                let p = rng.random_range(a.p_min..a.p_max);
                if p > 0.2 {
                    v.push(p);
                }
            }
            v
        }
    };
    let opts = AcsOptions {
        max_rounds: a.max_rounds,
        ensemble,
        exec: exec(cli),
    };
    let summaries = acs_sweep(&purities, a.samples_per_p, &mut rng, &opts)?;
    for s in &summaries {
        validate("best_value", s.p, s.best_value, s.state_negativity, cli.validate_tol)?;
    }
    let rows: Vec<Vec<String>> = summaries
        .iter()
        .map(|s| {
            vec![
                fmt17(s.p),
                s.seed.to_string(),
                fmt17(s.best_value),
                fmt17(s.n_deg_reference),
                fmt17(s.deviation),
                s.rounds.to_string(),
                s.converged.to_string(),
                s.monotone.to_string(),
            ]
        })
        .collect();
    write_csv(
        &cli.output,
        &["P", "seed", "best_value", "n_deg_reference", "deviation", "rounds", "converged", "monotone"],
        &rows,
    )?;
    if let Some(path) = &a.trace_output {
        let mut trace_rows = Vec::new();
        for &run in &a.trace_runs {
            if let Some(s) = summaries.get(run) {
                for (n, v) in s.trace.iter().enumerate() {
                    trace_rows.push(vec![run.to_string(), fmt17(s.p), n.to_string(), fmt17(*v)]);
                }
            }
        }
        write_csv(path, &["run", "P", "round", "value"], &trace_rows)?;
    }
    let close = summaries.iter().filter(|s| s.deviation.abs() <= 1e-6).count();
    eprintln!("acs: {close}/{} runs within 1e-6 of Ndeg", summaries.len());
    let exceeding: Vec<String> = summaries
        .iter()
        .filter(|s| s.exceeds_reference)
        .map(|s| format!("P = {} (seed {}) reached {}", s.p, s.seed, s.best_value))
        .collect();
    if !exceeding.is_empty() {
        return Err(CliError::Check(format!("run(s) exceeded Ndeg: {}", exceeding.join("; "))));
    }
    Ok(())
}

fn prop1(cli: &Cli, a: &Prop1Args) -> Result<(), CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let mut violations = 0usize;
    let mut worst: f64 = 0.0;
    let mut first_violation = None;
    for i in 0..a.spectra {
        let spec = Spectrum::random(&mut rng);
        let (choice, best) = best_sequence_bruteforce(&spec);
        let diff = best - s_value(&spec, SequenceChoice::OPTIMAL);
        worst = worst.max(diff.abs());
        if diff.abs() > 1e-12 {
            violations += 1;
            first_violation.get_or_insert((i, choice, spec.values()));
        }
    }
    let uniform = Spectrum::uniform();
    let (tie, tie_value) = best_sequence_bruteforce(&uniform);
    let mut text = format!(
        "spectra {}\nseed {}\nviolations {violations}\nmax_abs_diff {}\nuniform_spectrum best {} (lexicographic tie-break {:?}), optimal-choice value {}\n",
        a.spectra,
        cli.seed,
        fmt17(worst),
        fmt17(tie_value),
        (tie.i, tie.j, tie.k, tie.l),
        fmt17(n_x_lambda(&uniform)),
    );
    if let Some((i, c, v)) = first_violation {
        text.push_str(&format!("first_violation index {i} choice {:?} spectrum {v:?}\n", (c.i, c.j, c.k, c.l)));
    }
    write_text(&cli.output, &text)?;
    if violations > 0 {
        return Err(CliError::Check(format!("{violations} spectra beat the optimal choice")));
    }
    Ok(())
}

#[derive(Serialize)]
struct MatrixJson {
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

fn matrix_json(rho: &DensityMatrix) -> MatrixJson {
    let rows = rho.matrix().rows();
    MatrixJson {
        re: rows.iter().map(|r| r.iter().map(|z| z.re).collect()).collect(),
        im: rows.iter().map(|r| r.iter().map(|z| z.im).collect()).collect(),
    }
}

fn state(cli: &Cli, a: &StateArgs) -> Result<(), CliError> {
    let need_p = || a.p.ok_or_else(|| CliError::Usage(format!("--p is required for kind {}", a.kind)));
    let (x, closed_form, details) = match a.kind.as_str() {
        "rank2" => {
            let p = need_p()?;
            let (l1, l2) = rank2_eigenvalues(p)?;
            (construct_rank2(p)?, n_x_p_rank2(p)?, json!({ "nonzero_eigenvalues": [l1, l2] }))
        }
        "rank3" => {
            let p = need_p()?;
            let (l1, l2, l3) = rank3_eigenvalues(p)?;
            (construct_rank3(p)?, n_x_p_rank3(p)?, json!({ "nonzero_eigenvalues": [l1, l2, l3] }))
        }
        "deg" => {
            let p = need_p()?;
            (construct_deg(p)?, n_x_p_deg(p)?, json!({ "eigenvalues": deg_eigenvalues(p)? }))
        }
        "spectrum" => {
            let v = a
                .spectrum
                .as_ref()
                .ok_or_else(|| CliError::Usage("--spectrum is required for kind spectrum".into()))?;
            let arr: [f64; 6] = v
                .as_slice()
                .try_into()
                .map_err(|_| CliError::Usage(format!("--spectrum needs 6 values, got {}", v.len())))?;
            let spec = Spectrum::from_unsorted(arr)?;
            let n = n_x_lambda(&spec);
            (construct_spectrum_xmems(&spec), n.max(0.0), json!({ "n_x_lambda": n, "spectrum": spec }))
        }
        other => {
            return Err(CliError::Usage(format!("unknown kind '{other}' (rank2, rank3, deg, spectrum)")));
        }
    };
    let rho = x.to_matrix()?;
    let n = negativity(&rho);
    let p = purity(&rho);
    validate("x_negativity", p, x_negativity(&x), n, cli.validate_tol)?;
    validate("closed-form negativity", p, closed_form, n, cli.validate_tol)?;
    let report = json!({
        "kind": a.kind,
        "P": a.p,
        "xstate": x,
        "matrix": matrix_json(&rho),
        "eigenvalues": rho.eigenvalues(),
        "negativity": n,
        "closed_form_negativity": closed_form,
        "purity": p,
        "details": details,
    });
    write_json(&cli.output, &report)
}

#[derive(Serialize)]
struct ResolvedGrid {
    points: Vec<f64>,
}

fn resolved(cmd: &Command) -> Result<serde_json::Value, CliError> {
    let mut v = serde_json::to_value(cmd).map_err(|e| CliError::Io(e.to_string()))?;
    let grid = match cmd {
        Command::Curves(a) => Some(&a.grid),
        Command::Gap(g) => Some(g),
        Command::Tgx2(a) | Command::Tgx3(a) => Some(&a.grid),
        _ => None,
    };
    if let Some(g) = grid {
        let d = range_for(cmd);
        v["p_min"] = json!(g.p_min.unwrap_or(d.p_min));
        v["p_max"] = json!(g.p_max.unwrap_or(d.p_max));
        v["p_steps"] = json!(g.p_steps.unwrap_or(d.p_steps));
        v["resolved"] = json!(ResolvedGrid { points: resolve_grid(g, d)? });
    }
    Ok(v)
}

pub fn print_config(cli: &Cli) -> Result<(), CliError> {
    use clap::Parser;
    let commands = match &cli.command {
        Some(c) => vec![resolved(c)?],
        None => {
            let mut all = Vec::new();
            for name in ["curves", "gap", "certify", "tgx2", "tgx3", "acs", "prop1", "state"] {
                let parsed = Cli::try_parse_from(["qqmems", name]).map_err(|e| CliError::Usage(e.to_string()))?;
                all.push(resolved(parsed.command.as_ref().expect("subcommand given"))?);
            }
            all
        }
    };
    let cfg = json!({
        "output": cli.output,
        "seed": cli.seed,
        "sequential": cli.sequential,
        "validate_tol": cli.validate_tol,
        "commands": commands,
    });
    let mut text = serde_json::to_string_pretty(&cfg).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    write_text(Path::new("-"), &text)
}
