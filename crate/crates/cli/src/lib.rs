//! `lcausal`: JSON in, JSON out. Output bytes depend only on the input and
//! flags; floats are rounded to 12 significant digits and keys keep a fixed
//! order.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde_json::{json, Map, Value};

use lorentz_causal::causal_order::{
    future_indices, generate_causal_family, minkowski_order, order_via_functions, past_set, Event, OrderRelation,
    ORDER_TOL,
};
use lorentz_causal::clifford::{build_flat_gammas, curved_gammas};
use lorentz_causal::identity_suite::verify_identities;
use lorentz_causal::linalg::{from_pairs, to_pairs, CMatrix};
use lorentz_causal::lorentz_distance::{algebraic_distance, minkowski_interval, SearchConfig};
use lorentz_causal::manifold::{check_causal, check_steep, CoordBox, Gradient, MetricSpec, SpacetimeDocument};
use lorentz_causal::nc_finite::{
    cone_degeneracy_report, cone_membership, sample_cone, state_order, validate_triple, FiniteTriple, MatrixJson,
    SamplerConfig, StateVec, TripleDocument, NC_TOL,
};
use lorentz_causal::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "lcausal", version, about = "Algebraic causality toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Clone, Default)]
pub struct Common {
    /// JSON input file.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// JSON input given on the command line.
    #[arg(long, global = true)]
    pub inline: Option<String>,
    /// Seed for every randomized step (default 0).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Overrides the subcommand's tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Overrides the grid's points per axis.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand, Clone)]
pub enum Command {
    /// Flat gamma matrices, chirality and J = i gamma^0.
    Gammas,
    /// Sampled causality test of a scalar field.
    CheckCausal,
    /// Sampled steepness test (even dimension).
    CheckSteep,
    /// Causal order of two events via a verified family of causal functions.
    Order,
    /// Causal future and past of an event among candidates.
    FutureSet,
    /// Algebraic Lorentzian distance on flat spacetime.
    Distance,
    /// Randomized and exact checks of the trace identities.
    VerifyIdentities {
        #[arg(long, default_value_t = 8)]
        d: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Axiom report for a finite triple.
    NcValidate,
    /// Cone membership and degeneracy for a finite triple.
    NcCone,
    /// Order between two states of a finite triple.
    NcOrder,
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = if e.is_numeric() { EXIT_NUMERIC } else { EXIT_CONFIG };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

fn config(message: impl Into<String>) -> CliError {
    CliError {
        code: EXIT_CONFIG,
        message: message.into(),
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Runs one subcommand and returns the serialized report, newline-terminated.
pub fn run(cli: &Cli) -> CliResult<String> {
    let c = &cli.common;
    if let Some(t) = c.tol {
        if !(t.is_finite() && t > 0.0) {
            return Err(config(format!("--tol must be finite and > 0, got {t}")));
        }
    }
    let report = match &cli.command {
        Command::Gammas => gammas(read_input(c)?)?,
        Command::CheckCausal => check(read_input(c)?, c, false)?,
        Command::CheckSteep => check(read_input(c)?, c, true)?,
        Command::Order => order(read_input(c)?, c)?,
        Command::FutureSet => future(read_input(c)?, c)?,
        Command::Distance => distance(read_input(c)?, c)?,
        Command::VerifyIdentities { d, trials } => identities(*d, *trials, c)?,
        Command::NcValidate => nc_validate(read_input(c)?, c)?,
        Command::NcCone => nc_cone(read_input(c)?, c)?,
        Command::NcOrder => nc_order(read_input(c)?, c)?,
    };
    let mut text = serde_json::to_string_pretty(&round_floats(report)).map_err(|e| CliError {
        code: EXIT_NUMERIC,
        message: format!("serializing report: {e}"),
    })?;
    text.push('\n');
    Ok(text)
}

fn read_input<T: DeserializeOwned>(c: &Common) -> CliResult<T> {
    let text = match (&c.input, &c.inline) {
        (Some(_), Some(_)) => return Err(config("give either --input or --inline, not both")),
        (None, None) => return Err(config("this subcommand needs --input or --inline")),
        (Some(path), None) => {
            fs::read_to_string(path).map_err(|e| config(format!("reading {}: {e}", path.display())))?
        }
        (None, Some(s)) => s.clone(),
    };
    serde_json::from_str(&text).map_err(|e| config(format!("invalid input: {e}")))
}

fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// Rounds every float in the tree to 12 significant digits.
pub fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => n.as_f64().map(round12).map(Value::from).unwrap_or(Value::Null),
        Value::Array(a) => Value::Array(a.into_iter().map(round_floats).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_floats(v))).collect::<Map<_, _>>()),
        other => other,
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct GammasInput {
    dimension: usize,
    /// Diagonal inverse metric for curved gammas at one point.
    #[serde(default)]
    metric: Option<Vec<f64>>,
}

fn gammas(input: GammasInput) -> CliResult<Value> {
    let gs = build_flat_gammas(input.dimension)?;
    let mut out = json!({
        "dimension": gs.dimension(),
        "spinor_dim": gs.spinor_dim(),
        "gammas": gs.gammas().iter().map(to_pairs).collect::<Vec<_>>(),
        "chirality": gs.chirality().map(to_pairs),
        "fundamental_symmetry": to_pairs(&gs.fundamental_symmetry()),
        "anticommutation_defect": gs.anticommutation_defect(),
    });
    if let Some(g) = input.metric {
        let pg = curved_gammas(&gs, &g)?;
        out["curved"] = json!({
            "g_inv_diag": pg.g_inv_diag,
            "gammas": pg.curved.iter().map(to_pairs).collect::<Vec<_>>(),
            "anticommutation_defect": pg.anticommutation_defect(),
        });
    }
    Ok(out)
}

fn check(mut doc: SpacetimeDocument, c: &Common, steep: bool) -> CliResult<Value> {
    if let Some(k) = c.grid {
        doc.grid.points_per_axis = k;
    }
    if let Some(s) = c.seed {
        doc.grid.seed = s;
    }
    let (st, f, grid) = doc.build()?;
    let tol = c.tol.unwrap_or_else(|| f.default_boundary_tol());
    let r = if steep {
        check_steep(&st, &f, &grid, tol)?
    } else {
        check_causal(&st, &f, &grid, tol)?
    };
    Ok(json!({
        "verdict": r.verdict,
        "worst_alpha": r.worst_alpha,
        "worst_beta": r.worst_beta,
        "worst_point": r.worst_point,
        "worst_margin": r.worst_margin,
        "samples_checked": r.samples_checked,
        "steepness": r.steepness,
        "tolerance": r.tolerance,
        "gradient": match f.gradient_kind() { Gradient::Analytic(_) => "analytic", Gradient::FiniteDifference { .. } => "finite_difference" },
        "note": "verdict certifies the sampled points only",
    }))
}

const DEFAULT_FAMILY: usize = 200;

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct OrderInput {
    p: Vec<f64>,
    q: Vec<f64>,
    #[serde(default)]
    family_size: Option<usize>,
    #[serde(default)]
    metric: Option<MetricSpec>,
    #[serde(default, rename = "box")]
    bounds: Option<Vec<[f64; 2]>>,
}

fn domain_for(points: &[&[f64]], bounds: &Option<Vec<[f64; 2]>>) -> CliResult<CoordBox> {
    let n = points[0].len();
    if points.iter().any(|p| p.len() != n) {
        return Err(config("events have mixed dimensions"));
    }
    if n < 2 {
        return Err(config("events need at least two coordinates"));
    }
    Ok(match bounds {
        Some(b) => CoordBox::new(b.iter().map(|x| (x[0], x[1])).collect())?,
        None => {
            let events: Vec<Event> = points.iter().map(|p| Event::new(p.to_vec())).collect();
            lorentz_causal::causal_order::bounding_box(&events, 1.0)?
        }
    })
}

fn relation_name(r: OrderRelation) -> Value {
    to_value(&r)
}

fn order(input: OrderInput, c: &Common) -> CliResult<Value> {
    let domain = domain_for(&[&input.p, &input.q], &input.bounds)?;
    let n = input.p.len();
    let metric = input.metric.unwrap_or_else(MetricSpec::minkowski);
    let st = metric.build(n, domain)?;
    let family = generate_causal_family(&st, input.family_size.unwrap_or(DEFAULT_FAMILY), c.seed.unwrap_or(0))?;
    let (p, q) = (Event::new(input.p), Event::new(input.q));
    let tol = c.tol.unwrap_or(ORDER_TOL);
    let forward = order_via_functions(&p, &q, &family, tol)?;
    let backward = order_via_functions(&q, &p, &family, tol)?;
    let mut out = json!({
        "relation": relation_name(forward.relation),
        "precedes": forward.precedes(),
        "follows": backward.precedes(),
        "witness": forward.witness,
        "witness_function": forward.witness.map(|i| family[i].description.clone()),
        "family_size": family.len(),
    });
    if st.is_minkowski() {
        out["oracle"] = relation_name(minkowski_order(&p, &q)?.relation);
    }
    Ok(out)
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct FutureInput {
    center: Vec<f64>,
    candidates: Vec<Vec<f64>>,
    #[serde(default)]
    family_size: Option<usize>,
    #[serde(default)]
    metric: Option<MetricSpec>,
    #[serde(default, rename = "box")]
    bounds: Option<Vec<[f64; 2]>>,
}

fn future(input: FutureInput, c: &Common) -> CliResult<Value> {
    let mut pts: Vec<&[f64]> = vec![&input.center];
    pts.extend(input.candidates.iter().map(|v| v.as_slice()));
    let domain = domain_for(&pts, &input.bounds)?;
    let st = input
        .metric
        .unwrap_or_else(MetricSpec::minkowski)
        .build(input.center.len(), domain)?;
    let family = generate_causal_family(&st, input.family_size.unwrap_or(DEFAULT_FAMILY), c.seed.unwrap_or(0))?;
    let center = Event::new(input.center);
    let cands: Vec<Event> = input.candidates.into_iter().map(Event::new).collect();
    let fut = future_indices(&center, &cands, &family)?;
    let past = past_set(&center, &cands, &family)?;
    let past_idx: Vec<usize> = (0..cands.len()).filter(|i| past.contains(&cands[*i])).collect();
    Ok(json!({
        "future": fut.iter().map(|&i| cands[i].coords().to_vec()).collect::<Vec<_>>(),
        "future_indices": fut,
        "past_indices": past_idx,
        "family_size": family.len(),
        "note": "membership refutations are exact; inclusions hold up to the family's resolution",
    }))
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct DistanceInput {
    p: Vec<f64>,
    q: Vec<f64>,
    #[serde(default)]
    dimension: Option<usize>,
}

fn distance(input: DistanceInput, c: &Common) -> CliResult<Value> {
    if let Some(n) = input.dimension {
        if input.p.len() != n || input.q.len() != n {
            return Err(config(format!("events must have {n} coordinates")));
        }
    }
    let cfg = SearchConfig {
        seed: c.seed.unwrap_or(0),
        ..SearchConfig::default()
    };
    let (p, q) = (Event::new(input.p), Event::new(input.q));
    let r = algebraic_distance(&p, &q, &cfg)?;
    Ok(json!({
        "distance": r.value,
        "optimizer": {"theta": r.optimizer.theta, "direction": r.optimizer.direction},
        "oracle": minkowski_interval(&p, &q)?,
        "constraint_margin": r.constraint_margin,
        "method": r.method,
    }))
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

fn identities(d: usize, trials: usize, c: &Common) -> CliResult<Value> {
    let r = verify_identities(d, trials, c.seed.unwrap_or(0))?;
    Ok(json!({
        "newton": pass(r.newton_pass()),
        "traces": pass(r.traces_pass()),
        "combinatorial": pass(r.combinatorial_pass()),
        "charpoly": pass(r.charpoly_pass()),
        "d": r.d,
        "trials": r.trials,
        "seed": r.seed,
        "trace_max_rel_error": r.trace_max_rel_error,
        "charpoly_max_rel_error": r.charpoly_max_rel_error,
    }))
}

fn nc_validate(doc: TripleDocument, c: &Common) -> CliResult<Value> {
    let t = FiniteTriple::from_document(&doc)?;
    let r = validate_triple(&t, c.tol.unwrap_or(NC_TOL))?;
    Ok(json!({
        "passed": r.passed(),
        "dim_h": t.dim_h(),
        "checks": to_value(&r.checks),
    }))
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct ConeInput {
    triple: TripleDocument,
    #[serde(default)]
    elements: Vec<MatrixJson>,
}

fn sampler(c: &Common) -> SamplerConfig {
    SamplerConfig {
        seed: c.seed.unwrap_or(0),
        tol: c.tol.unwrap_or(NC_TOL),
        ..SamplerConfig::default()
    }
}

fn nc_cone(input: ConeInput, c: &Common) -> CliResult<Value> {
    let t = FiniteTriple::from_document(&input.triple)?;
    let cfg = sampler(c);
    let members = input
        .elements
        .iter()
        .map(|m| cone_membership(&t, &from_pairs(m)?, cfg.tol))
        .collect::<lorentz_causal::Result<Vec<bool>>>()?;
    let report = cone_degeneracy_report(&t, &cfg)?;
    Ok(json!({
        "membership": members,
        "degeneracy": to_value(&report),
    }))
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct StateOrderInput {
    triple: TripleDocument,
    chi: MatrixJson,
    xi: MatrixJson,
    #[serde(default)]
    sample: Option<Vec<MatrixJson>>,
}

fn nc_order(input: StateOrderInput, c: &Common) -> CliResult<Value> {
    let t = FiniteTriple::from_document(&input.triple)?;
    let cfg = sampler(c);
    let chi = StateVec::new(from_pairs(&input.chi)?)?;
    let xi = StateVec::new(from_pairs(&input.xi)?)?;
    let sample: Vec<CMatrix> = match &input.sample {
        Some(s) => s.iter().map(|m| from_pairs(m)).collect::<lorentz_causal::Result<_>>()?,
        None => sample_cone(&t, &cfg)?.members,
    };
    let r = state_order(&t, &chi, &xi, &sample, cfg.tol)?;
    Ok(to_value(&r))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round12(0.1 + 0.2), 0.3);
        assert_eq!(round12(4.000000000000001), 4.0);
        assert_eq!(round12(-0.0), 0.0);
        assert_eq!(round12(1.23456789012345e-7), 1.23456789012e-7);
        let v = round_floats(json!({"a": [0.1 + 0.2, 3], "b": {"c": 2.0f64.sqrt()}}));
        assert_eq!(
            serde_json::to_string(&v).unwrap(),
            r#"{"a":[0.3,3],"b":{"c":1.41421356237}}"#
        );
    }

    #[test]
    fn both_input_sources_rejected() {
        let cli = Cli::parse_from(["lcausal", "distance", "--inline", "{}", "--input", "x.json"]);
        assert_eq!(run(&cli).unwrap_err().code, EXIT_CONFIG);
    }

    #[test]
    fn non_positive_tolerance_rejected() {
        let cli = Cli::parse_from([
            "lcausal",
            "distance",
            "--inline",
            r#"{"p":[0,0],"q":[1,0]}"#,
            "--tol",
            "0",
        ]);
        assert_eq!(run(&cli).unwrap_err().code, EXIT_CONFIG);
    }
}
