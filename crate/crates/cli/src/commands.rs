use std::fs;

use anyhow::{anyhow, Context, Result};
use serde_json::{json, Map, Value};

use leafwise_core::circle::{
    check_moser_condition, kam_iterate, rotation_number, ConjugacyConfig, KamConfig, KamOutcome,
};
use leafwise_core::cohomeq::{
    infinitesimal_rigidity_report, obstruction_space, parameter_equivalence, solve_action,
    solve_flow, Equivalence, SolveConfig, SolveReport, SolveStatus,
};
use leafwise_core::diophantine::{estimate_type, ActionMatrix, ScanConfig};
use leafwise_core::io;
use leafwise_core::references;
use leafwise_core::suspension::{toral_pipeline, HyperbolicMatrix};
use leafwise_core::FrequencyVector;

use crate::output::{
    sha256_hex, to_value, Cell, InputDigest, Outcome, Table, EXIT_DIVERGENT, EXIT_OBSTRUCTED,
    EXIT_USAGE,
};

/// Shared state of one run: resolved configuration and input digests, both
/// recorded in the manifest.
#[derive(Debug, Default)]
pub struct Ctx {
    pub config: Map<String, Value>,
    pub inputs: Vec<InputDigest>,
}

impl Ctx {
    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.config.insert(key.to_string(), value.into());
    }

    pub fn read(&mut self, name: &str, path: &str) -> Result<String> {
        let bytes = fs::read(path).with_context(|| format!("reading {name} from {path}"))?;
        self.inputs.push(InputDigest {
            name: name.to_string(),
            path: Some(path.to_string()),
            sha256: sha256_hex(&bytes),
        });
        String::from_utf8(bytes).map_err(|_| anyhow!("{path} is not valid UTF-8"))
    }

    /// Inline JSON on the command line, or a path to a file holding it.
    pub fn read_inline(&mut self, name: &str, arg: &str) -> Result<String> {
        if serde_json::from_str::<Value>(arg).is_ok() {
            self.inputs.push(InputDigest {
                name: name.to_string(),
                path: None,
                sha256: sha256_hex(arg.as_bytes()),
            });
            Ok(arg.to_string())
        } else {
            self.read(name, arg)
        }
    }
}

fn mode_table(name: &str, dims: usize, modes: &[FrequencyVector]) -> Table {
    let header = (1..=dims).map(|i| format!("m_{i}")).collect();
    let mut t = Table::new(name, header);
    for m in modes {
        t.push(m.entries().iter().map(|&x| Cell::Int(x)).collect());
    }
    t
}

fn modes_value(modes: &[FrequencyVector]) -> Value {
    Value::Array(modes.iter().map(|m| json!(m.entries())).collect())
}

fn read_matrix(ctx: &mut Ctx, name: &str, path: &str) -> Result<ActionMatrix> {
    let text = ctx.read(name, path)?;
    Ok(io::parse_action_matrix(&text)?)
}

fn solve_outcome(report: SolveReport, dims: usize, cfg: &SolveConfig) -> Outcome {
    let mut residuals = Table::new(
        "residuals",
        vec!["component".into(), "residual_sup".into()],
    );
    for r in &report.residuals {
        residuals.push(vec![r.component.into(), r.residual_sup.into()]);
    }
    let payload = json!({
        "status": report.status,
        "c": report.c,
        "residual_sup": report.residual_sup,
        "residuals": report.residuals,
        "amplification": report.amplification,
        "blowup_factor": cfg.blowup_factor,
        "obstruction_modes": modes_value(&report.obstruction_modes),
        "g": io::series_to_value(&report.g),
    });
    let out = Outcome::ok(payload)
        .with_table(residuals)
        .with_table(mode_table("obstructions", dims, &report.obstruction_modes));
    match report.status {
        SolveStatus::Solved => out,
        SolveStatus::Obstructed => {
            let n = report.obstruction_modes.len();
            out.fail(EXIT_OBSTRUCTED, format!("{n} resonant modes carry nonzero coefficients"))
        }
        SolveStatus::Divergent => out.fail(
            EXIT_DIVERGENT,
            format!(
                "amplification {:e} exceeds {:e} or residual {:e} exceeds tol {:e}",
                report.amplification, cfg.blowup_factor, report.residual_sup, cfg.tol
            ),
        ),
    }
}

pub fn solve_cohomeq(ctx: &mut Ctx, field: &str, matrix: &str, tol: Option<f64>) -> Result<Outcome> {
    let v = read_matrix(ctx, "matrix", matrix)?;
    let text = ctx.read("field", field)?;
    let cfg = SolveConfig::with_tol(tol.unwrap_or(SolveConfig::default().tol));
    ctx.set("tol", cfg.tol);
    ctx.set("blowup_factor", cfg.blowup_factor);
    let report = if v.p() == 1 {
        let f = io::parse_series(&text)?;
        solve_flow(&f, v.row(0), &cfg)?
    } else {
        let omega = io::parse_form(&text, &v)?;
        solve_action(&omega, &cfg)?
    };
    Ok(solve_outcome(report, v.n(), &cfg))
}

pub fn diophantine_scan(ctx: &mut Ctx, matrix: &str, radius: Option<i64>) -> Result<Outcome> {
    let v = read_matrix(ctx, "matrix", matrix)?;
    let radius = radius.unwrap_or(1024);
    let cfg = ScanConfig::default();
    ctx.set("radius", radius);
    ctx.set("budget", cfg.budget);
    ctx.set("offenders", cfg.offenders);
    let report = estimate_type(&v, radius, cfg)?;
    let mut header: Vec<String> = (1..=v.n()).map(|i| format!("m_{i}")).collect();
    header.push("delta".into());
    header.push("delta_times_norm_tau".into());
    let mut offenders = Table::new("offenders", header);
    for o in &report.offenders {
        let mut row: Vec<Cell> = o.m.entries().iter().map(|&x| Cell::Int(x)).collect();
        row.push(o.delta.into());
        row.push(o.delta_times_norm_tau.into());
        offenders.push(row);
    }
    Ok(Outcome::ok(to_value(&report)).with_table(offenders))
}

pub fn lie_cohomology(ctx: &mut Ctx, algebra: &str) -> Result<Outcome> {
    let text = ctx.read("algebra", algebra)?;
    let l = io::parse_algebra(&text)?;
    let validation = l.validate();
    if !validation.pass {
        let reason = validation.describe();
        return Ok(Outcome::ok(json!({ "status": "invalid", "validation": validation }))
            .fail(EXIT_USAGE, reason));
    }
    let report = l.cohomology_dims()?;
    let mut table = Table::new("cohomology", vec!["degree".into(), "dim".into(), "rank_d".into()]);
    for (k, d) in report.dims.iter().enumerate() {
        let rank = report.ranks.get(k).map_or(0, |r| r.rank);
        table.push(vec![k.into(), (*d).into(), rank.into()]);
    }
    Ok(Outcome::ok(json!({
        "n": l.dim(),
        "validation": validation,
        "dims": report.dims,
        "h1_dim": report.dims.get(1).copied().unwrap_or(0),
        "euler": report.euler,
        "ranks": report.ranks,
        "d_squared_residual": l.d_squared_residual(),
    }))
    .with_table(table))
}

pub fn suspension_h1(ctx: &mut Ctx, data: &str) -> Result<Outcome> {
    let text = ctx.read("data", data)?;
    let s = io::parse_suspension(&text)?;
    let dims = s.mv_dimensions()?;
    let mut table = Table::new("suspension", vec!["degree".into(), "dim".into()]);
    for (k, d) in dims.iter().enumerate() {
        table.push(vec![k.into(), (*d).into()]);
    }
    Ok(Outcome::ok(json!({
        "fiber_dims": s.dims,
        "dims": dims,
        "h1_dim": s.mv_dimension(1)?,
    }))
    .with_table(table))
}

pub fn toral(ctx: &mut Ctx, matrix: &str) -> Result<Outcome> {
    let text = ctx.read_inline("matrix", matrix)?;
    let rows = io::parse_matrix(&text)?;
    let a = HyperbolicMatrix::from_rows(&rows)?;
    Ok(Outcome::ok(to_value(&toral_pipeline(&a)?)))
}

pub fn rotation(ctx: &mut Ctx, map: &str, iters: u64) -> Result<Outcome> {
    let text = ctx.read("map", map)?;
    let f = io::parse_circle_map(&text)?;
    ctx.set("iters", iters);
    Ok(Outcome::ok(to_value(&rotation_number(&f, iters)?)))
}

pub fn moser(ctx: &mut Ctx, taus: &str, radius: Option<i64>, exponent: f64) -> Result<Outcome> {
    let text = ctx.read_inline("taus", taus)?;
    let taus: Vec<f64> = serde_json::from_str(&text)
        .map_err(|e| leafwise_core::Error::Schema {
            pointer: String::new(),
            message: format!("expected an array of numbers: {e}"),
        })?;
    let radius = radius.unwrap_or(1000);
    ctx.set("radius", radius);
    ctx.set("exponent", exponent);
    let report = check_moser_condition(&taus, radius, exponent)?;
    let mut shells = Table::new(
        "shells",
        vec!["lo".into(), "hi".into(), "m".into(), "value".into()],
    );
    for s in &report.shells {
        shells.push(vec![s.lo.into(), s.hi.into(), s.m.into(), s.value.into()]);
    }
    let out = Outcome::ok(to_value(&report)).with_table(shells);
    if report.pass {
        Ok(out)
    } else {
        let reason = format!("resonant at m = {:?}", report.resonant);
        Ok(out.fail(EXIT_OBSTRUCTED, reason))
    }
}

pub fn kam(
    ctx: &mut Ctx,
    family: &str,
    steps: usize,
    truncation: Option<i64>,
    tol: Option<f64>,
) -> Result<Outcome> {
    let text = ctx.read("family", family)?;
    let input = io::parse_family(&text)?;
    let mut cfg = KamConfig::default();
    if let Some(t) = truncation {
        cfg.truncation = t;
    }
    if let Some(t) = tol {
        cfg.conjugacy.tol = t;
    }
    let ConjugacyConfig {
        tol: ctol,
        rotation_iters,
    } = cfg.conjugacy;
    ctx.set("steps", steps);
    ctx.set("truncation", cfg.truncation);
    ctx.set("tol", ctol);
    ctx.set("rotation_iters", rotation_iters);
    let alpha = match &input.targets {
        Some(t) => t.clone(),
        None => input
            .family
            .maps()
            .iter()
            .map(|f| rotation_number(f, rotation_iters).map(|r| r.refined))
            .collect::<leafwise_core::Result<_>>()?,
    };
    ctx.set("targets", json!(alpha));
    let report = kam_iterate(&input.family, &alpha, steps, &cfg)?;
    let mut table = Table::new(
        "kam_steps",
        vec![
            "step".into(),
            "residual_sup".into(),
            "truncation_loss".into(),
            "consistency_residual".into(),
        ],
    );
    for s in &report.steps {
        table.push(vec![
            s.step.into(),
            s.residual_sup.into(),
            s.truncation_loss.into(),
            s.consistency_residual.into(),
        ]);
    }
    let payload = json!({
        "alpha": report.alpha,
        "steps": report.steps,
        "outcome": report.outcome,
        "family": io::family_to_value(&report.family, Some(&report.alpha)),
    });
    let out = Outcome::ok(payload).with_table(table);
    Ok(match report.outcome {
        KamOutcome::Completed | KamOutcome::Converged => out,
        KamOutcome::Obstructed { mode, numerator } => out.fail(
            EXIT_OBSTRUCTED,
            format!("resonant mode {mode} with numerator {numerator:e}"),
        ),
        KamOutcome::ResidualIncreased { step } => {
            out.fail(EXIT_DIVERGENT, format!("residual increased at step {step}"))
        }
    })
}

pub fn equivalence(ctx: &mut Ctx, v1: &str, v2: &str, tol: Option<f64>) -> Result<Outcome> {
    let a = read_matrix(ctx, "v1", v1)?;
    let b = read_matrix(ctx, "v2", v2)?;
    let tol = tol.unwrap_or(1e-9);
    ctx.set("tol", tol);
    let result = parameter_equivalence(&a, &b, tol)?;
    let out = Outcome::ok(to_value(&result));
    Ok(match result {
        Equivalence::Equivalent { .. } => out,
        Equivalence::NotEquivalent { angle } => out.fail(
            EXIT_OBSTRUCTED,
            format!("row spans differ (principal angle {angle:e})"),
        ),
    })
}

pub fn obstructions(ctx: &mut Ctx, matrix: &str, radius: Option<i64>) -> Result<Outcome> {
    let v = read_matrix(ctx, "matrix", matrix)?;
    let radius = radius.unwrap_or(64);
    ctx.set("radius", radius);
    let space = obstruction_space(&v, radius)?;
    let table = mode_table("obstructions", v.n(), &space.modes);
    Ok(Outcome::ok(to_value(&space)).with_table(table))
}

pub fn rigidity(ctx: &mut Ctx, matrix: &str, radius: Option<i64>) -> Result<Outcome> {
    let v = read_matrix(ctx, "matrix", matrix)?;
    let radius = radius.unwrap_or(64);
    ctx.set("radius", radius);
    Ok(Outcome::ok(to_value(&infinitesimal_rigidity_report(&v, radius)?)))
}

pub fn refs(ctx: &mut Ctx, id: &str) -> Result<Outcome> {
    ctx.set("id", id);
    let hits = references::lookup(id)?;
    Ok(Outcome::ok(json!({ "entries": hits })))
}
