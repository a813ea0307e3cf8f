//! Algebraic Lorentzian distance: the infimum of `max{0, f(q) - f(p)}` over
//! steep functions, evaluated over the affine boost family
//! `f = cosh(th) t - sinh(th) u . x` on flat spacetime.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::causal_order::Event;
use crate::error::{Error, Result};
use crate::exact::diagonal_quadratic_form;
use crate::manifold::{check_steep_at, minkowski, CoordBox, SamplingSpec, ScalarField, Spacetime};

/// Relative tolerance on distance values.
pub const DISTANCE_TOL: f64 = 1e-6;

fn same_dimension(p: &Event, q: &Event) -> Result<()> {
    if p.dimension() != q.dimension() {
        return Err(Error::Shape(format!(
            "events have dimensions {} and {}",
            p.dimension(),
            q.dimension()
        )));
    }
    if p.dimension() < 2 {
        return Err(Error::Dimension(format!(
            "need at least two coordinates, got {}",
            p.dimension()
        )));
    }
    Ok(())
}

fn difference(p: &Event, q: &Event) -> Vec<f64> {
    p.coords().iter().zip(q.coords()).map(|(a, b)| b - a).collect()
}

/// Flat Lorentzian distance: `sqrt(dt^2 - |dx|^2)` when `p <= q`, else 0.
pub fn minkowski_interval(p: &Event, q: &Event) -> Result<f64> {
    same_dimension(p, q)?;
    let d = difference(p, q);
    let dx2: f64 = d[1..].iter().map(|v| v * v).sum();
    if d[0] <= 0.0 || d[0] * d[0] <= dx2 {
        return Ok(0.0);
    }
    Ok((d[0] * d[0] - dx2).sqrt())
}

/// `f = c0 t - sum_i s_i x_i` with `c0 = cosh(theta)` and `s = sinh(theta) u`.
/// `c0` is rounded upward until `c0^2 - |s|^2 >= 1` holds exactly, so the
/// stored components are steep as floats, not just in exact arithmetic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostFunction {
    pub theta: f64,
    pub direction: Vec<f64>,
    coefficients: Vec<f64>,
}

impl BoostFunction {
    pub fn new(theta: f64, direction: Vec<f64>) -> Result<Self> {
        if !(theta.is_finite() && theta >= 0.0) {
            return Err(Error::Range(format!(
                "boost rapidity must be finite and >= 0, got {theta}"
            )));
        }
        let norm = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
        if direction.is_empty() || !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Geometry(
                "boost direction must be a nonzero spatial vector".into(),
            ));
        }
        let direction: Vec<f64> = direction.iter().map(|v| v / norm).collect();
        let (c, s) = (theta.cosh(), theta.sinh());
        let mut coefficients = Vec::with_capacity(direction.len() + 1);
        coefficients.push(c);
        coefficients.extend(direction.iter().map(|u| -s * u));
        let n = coefficients.len();
        let mut weights = vec![1.0; n];
        weights[0] = -1.0;
        // -c0^2 + |s|^2 + 1 <= 0
        while diagonal_quadratic_form(&weights, &coefficients, 1.0) > 0.0 {
            coefficients[0] = coefficients[0].next_up();
        }
        Ok(Self {
            theta,
            direction,
            coefficients,
        })
    }

    /// Constant co-gradient `(c0, -s_1, ..., -s_{n-1})`.
    pub fn gradient(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn dimension(&self) -> usize {
        self.coefficients.len()
    }

    /// `f(q) - f(p)`, computed from the difference vector so that it is
    /// unchanged under translations that leave `q - p` unchanged.
    pub fn increment(&self, p: &Event, q: &Event) -> f64 {
        difference(p, q)
            .iter()
            .zip(&self.coefficients)
            .map(|(d, c)| c * d)
            .sum()
    }

    pub fn to_field(&self) -> ScalarField {
        ScalarField::affine(0.0, self.coefficients.clone())
    }
}

/// The boost realizing the flat distance of a chronological pair:
/// `cosh(th) = dt / tau`, `sinh(th) = |dx| / tau`.
pub fn optimal_boost_function(p: &Event, q: &Event) -> Result<BoostFunction> {
    let tau = minkowski_interval(p, q)?;
    if tau <= 0.0 {
        return Err(Error::Geometry(
            "pair is not chronological; the optimal boost degenerates".into(),
        ));
    }
    let d = difference(p, q);
    let dx = d[1..].iter().map(|v| v * v).sum::<f64>().sqrt();
    if dx == 0.0 {
        let mut u = vec![0.0; d.len() - 1];
        u[0] = 1.0;
        return BoostFunction::new(0.0, u);
    }
    let theta = (dx / tau).asinh();
    BoostFunction::new(theta, d[1..].to_vec())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub theta_max: f64,
    pub theta_steps: usize,
    /// Random unit directions tried besides the pair's own spatial direction
    /// and the coordinate axes.
    pub random_directions: usize,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            theta_max: 40.0,
            theta_steps: 401,
            random_directions: 8,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMethod {
    ClosedForm,
    BoostSearch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostParameters {
    pub theta: f64,
    pub direction: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceResult {
    pub value: f64,
    pub optimizer: BoostParameters,
    /// Worst `min(-alpha, beta)` of the optimizer over the probe points.
    pub constraint_margin: f64,
    pub method: DistanceMethod,
}

fn search_directions(d_space: &[f64], cfg: &SearchConfig) -> Vec<Vec<f64>> {
    let m = d_space.len();
    let mut dirs = Vec::new();
    let norm = d_space.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        dirs.push(d_space.iter().map(|v| v / norm).collect());
    }
    for i in 0..m {
        for sign in [1.0, -1.0] {
            let mut e = vec![0.0; m];
            e[i] = sign;
            dirs.push(e);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    while dirs.len() < 1 + 2 * m + cfg.random_directions {
        let v: Vec<f64> = (0..m).map(|_| crate::causal_order::standard_normal(&mut rng)).collect();
        if v.iter().map(|x| x * x).sum::<f64>() > 1e-12 {
            dirs.push(v);
        }
    }
    dirs
}

fn validate(st: &Spacetime, f: &BoostFunction, probes: &[Vec<f64>]) -> Result<Option<f64>> {
    let report = check_steep_at(st, &f.to_field(), probes, 0.0)?;
    Ok((report.verdict == crate::manifold::Verdict::Steep).then_some(report.worst_margin))
}

/// `d~(p, q)` on flat spacetime of even dimension. Chronological pairs use
/// the closed-form boost; all other pairs minimise over a rapidity grid and a
/// set of directions. Every candidate is checked for steepness at `p` and `q`
/// before its value counts.
pub fn algebraic_distance(p: &Event, q: &Event, cfg: &SearchConfig) -> Result<DistanceResult> {
    same_dimension(p, q)?;
    let n = p.dimension();
    if !n.is_multiple_of(2) {
        return Err(Error::Parity(format!("distance needs even dimension, got {n}")));
    }
    if !(cfg.theta_max.is_finite() && cfg.theta_max >= 0.0) || cfg.theta_steps < 2 {
        return Err(Error::Config(
            "rapidity grid needs theta_max >= 0 and at least two steps".into(),
        ));
    }
    let probes = vec![p.coords().to_vec(), q.coords().to_vec()];
    let st = minkowski(n, CoordBox::new(probes_box(&probes))?)?;

    if minkowski_interval(p, q)? > 0.0 {
        let f = optimal_boost_function(p, q)?;
        let margin = validate(&st, &f, &probes)?
            .ok_or_else(|| Error::Numeric("closed-form boost failed the steepness check".into()))?;
        return Ok(DistanceResult {
            value: f.increment(p, q).max(0.0),
            optimizer: BoostParameters {
                theta: f.theta,
                direction: f.direction.clone(),
            },
            constraint_margin: margin,
            method: DistanceMethod::ClosedForm,
        });
    }

    let d = difference(p, q);
    let mut best: Option<(f64, BoostFunction, f64)> = None;
    'outer: for u in search_directions(&d[1..], cfg) {
        for k in 0..cfg.theta_steps {
            let theta = cfg.theta_max * k as f64 / (cfg.theta_steps - 1) as f64;
            let f = BoostFunction::new(theta, u.clone())?;
            let Some(margin) = validate(&st, &f, &probes)? else {
                continue;
            };
            let value = f.increment(p, q);
            if best.as_ref().is_none_or(|(v, _, _)| value < *v) {
                best = Some((value, f, margin));
                if value <= 0.0 {
                    break 'outer;
                }
            }
        }
    }
    let (value, f, margin) = best.ok_or_else(|| Error::Numeric("no steep candidate found".into()))?;
    Ok(DistanceResult {
        value: value.max(0.0),
        optimizer: BoostParameters {
            theta: f.theta,
            direction: f.direction,
        },
        constraint_margin: margin,
        method: DistanceMethod::BoostSearch,
    })
}

fn probes_box(points: &[Vec<f64>]) -> Vec<(f64, f64)> {
    let n = points[0].len();
    (0..n)
        .map(|i| {
            let lo = points.iter().map(|p| p[i]).fold(f64::INFINITY, f64::min);
            let hi = points.iter().map(|p| p[i]).fold(f64::NEG_INFINITY, f64::max);
            (lo - 1.0, hi + 1.0)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvedDistanceBound {
    pub upper_bound: f64,
    pub optimizer: BoostParameters,
    /// Factor by which the boost co-gradient was stretched to be steep on
    /// every sample point.
    pub scale: f64,
    pub constraint_margin: f64,
    pub samples_checked: usize,
    pub note: String,
}

/// Experimental: upper bound on `d~(p, q)` over a curved diagonal metric,
/// searching rescaled boosts that are steep on the sampled domain. Not
/// certified equal to the Lorentzian distance.
pub fn curved_distance_upper_bound(
    st: &Spacetime,
    p: &Event,
    q: &Event,
    grid: &SamplingSpec,
    cfg: &SearchConfig,
) -> Result<CurvedDistanceBound> {
    same_dimension(p, q)?;
    let n = st.dimension();
    if n != p.dimension() {
        return Err(Error::Shape(format!(
            "events have {} coordinates, spacetime has {n}",
            p.dimension()
        )));
    }
    if !n.is_multiple_of(2) {
        return Err(Error::Parity(format!("distance needs even dimension, got {n}")));
    }
    let mut points = grid.points(st.domain())?;
    points.push(p.coords().to_vec());
    points.push(q.coords().to_vec());
    let metrics: Vec<Vec<f64>> = points.iter().map(|x| st.g_inv(x)).collect::<Result<_>>()?;
    let d = difference(p, q);
    let mut best: Option<(f64, BoostParameters, f64, f64)> = None;
    for u in search_directions(&d[1..], cfg) {
        for k in 0..cfg.theta_steps {
            let theta = cfg.theta_max * k as f64 / (cfg.theta_steps - 1) as f64;
            let f = BoostFunction::new(theta, u.clone())?;
            let w = f.gradient();
            // steep iff scale^2 * (-g(w, w)) >= 1 everywhere
            let mut needed: f64 = 0.0;
            let mut timelike = true;
            for g in &metrics {
                let norm = -diagonal_quadratic_form(g, w, 0.0);
                if norm <= 0.0 {
                    timelike = false;
                    break;
                }
                needed = needed.max(1.0 / norm.sqrt());
            }
            if !timelike {
                continue;
            }
            let mut scale = needed * (1.0 + 1e-12);
            let mut field = None;
            for _ in 0..8 {
                let grad: Vec<f64> = w.iter().map(|c| c * scale).collect();
                let candidate = ScalarField::affine(0.0, grad);
                let report = check_steep_at(st, &candidate, &points, 0.0)?;
                if report.verdict == crate::manifold::Verdict::Steep {
                    field = Some(report.worst_margin);
                    break;
                }
                scale *= 1.0 + 1e-9;
            }
            let Some(margin) = field else { continue };
            let value = scale * f.increment(p, q);
            if best.as_ref().is_none_or(|(v, ..)| value < *v) {
                best = Some((
                    value,
                    BoostParameters {
                        theta,
                        direction: f.direction.clone(),
                    },
                    scale,
                    margin,
                ));
            }
        }
    }
    let (value, optimizer, scale, margin) =
        best.ok_or_else(|| Error::Numeric("no boost is steep on the sampled domain".into()))?;
    Ok(CurvedDistanceBound {
        upper_bound: value.max(0.0),
        optimizer,
        scale,
        constraint_margin: margin,
        samples_checked: points.len(),
        note: "upper bound on d~ over sampled points, not certified equal to d".into(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub points: usize,
    pub triples_checked: usize,
    pub reflexive: bool,
    pub nonnegative: bool,
    pub antisymmetric: bool,
    pub reverse_triangle: bool,
    pub dominates_interval: bool,
    /// Largest `d(p,q) + d(q,r) - d(p,r)` over triples with positive legs.
    pub max_triangle_deficit: f64,
    pub violations: Vec<String>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.reflexive && self.nonnegative && self.antisymmetric && self.reverse_triangle && self.dominates_interval
    }
}

/// Checks the Lorentzian distance axioms for `d~` on all ordered pairs and
/// triples of `points`.
pub fn distance_axiom_check(points: &[Event], cfg: &SearchConfig) -> Result<AxiomReport> {
    if points.len() < 3 {
        return Err(Error::Config(format!(
            "axiom check needs at least 3 points, got {}",
            points.len()
        )));
    }
    let m = points.len();
    let mut dist = vec![vec![0.0; m]; m];
    let mut report = AxiomReport {
        points: m,
        triples_checked: 0,
        reflexive: true,
        nonnegative: true,
        antisymmetric: true,
        reverse_triangle: true,
        dominates_interval: true,
        max_triangle_deficit: f64::NEG_INFINITY,
        violations: Vec::new(),
    };
    for i in 0..m {
        for j in 0..m {
            let v = algebraic_distance(&points[i], &points[j], cfg)?.value;
            dist[i][j] = v;
            if i == j && v != 0.0 {
                report.reflexive = false;
                report.violations.push(format!("d({i},{i}) = {v}"));
            }
            if v < 0.0 {
                report.nonnegative = false;
                report.violations.push(format!("d({i},{j}) = {v} < 0"));
            }
            let oracle = minkowski_interval(&points[i], &points[j])?;
            if oracle > v + DISTANCE_TOL * (1.0 + oracle) {
                report.dominates_interval = false;
                report
                    .violations
                    .push(format!("d({i},{j}) = {v} below interval {oracle}"));
            }
        }
    }
    for i in 0..m {
        for j in (i + 1)..m {
            if dist[i][j] > DISTANCE_TOL && dist[j][i] > DISTANCE_TOL {
                report.antisymmetric = false;
                report
                    .violations
                    .push(format!("d({i},{j}) and d({j},{i}) both positive"));
            }
        }
    }
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                if dist[i][j] <= DISTANCE_TOL || dist[j][k] <= DISTANCE_TOL {
                    continue;
                }
                report.triples_checked += 1;
                let deficit = dist[i][j] + dist[j][k] - dist[i][k];
                report.max_triangle_deficit = report.max_triangle_deficit.max(deficit);
                if deficit > DISTANCE_TOL {
                    report.reverse_triangle = false;
                    report
                        .violations
                        .push(format!("d({i},{k}) < d({i},{j}) + d({j},{k}) by {deficit}"));
                }
            }
        }
    }
    if report.triples_checked == 0 {
        report.max_triangle_deficit = 0.0;
    }
    Ok(report)
}
