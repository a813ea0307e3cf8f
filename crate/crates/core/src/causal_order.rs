//! Causal order between events (and mixtures of events) probed by families
//! of causal functions: `p <= q` iff `f(p) <= f(q)` for every causal `f`.
//!
//! A finite family can only refute `p <= q`; an `Incomparable` verdict
//! always comes with a witness and is sound, while `Causal` is complete
//! only up to the family's resolution.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifold::{check_causal, CoordBox, SamplingSpec, ScalarField, Spacetime, Verdict};

/// Tolerance on function-value comparisons.
pub const ORDER_TOL: f64 = 1e-9;

/// A spacetime event, standing for the pure state `f -> f(p)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Event(pub Vec<f64>);

impl Event {
    pub fn new(coords: Vec<f64>) -> Self {
        Event(coords)
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }
}

impl From<Vec<f64>> for Event {
    fn from(v: Vec<f64>) -> Self {
        Event(v)
    }
}

/// A state on functions: something that turns a scalar field into a number.
pub trait StateFunctional {
    fn evaluate(&self, f: &ScalarField) -> f64;
}

impl StateFunctional for Event {
    fn evaluate(&self, f: &ScalarField) -> f64 {
        f.eval(&self.0)
    }
}

/// Finite convex combination of point evaluations.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedState {
    pub events: Vec<Event>,
    pub weights: Vec<f64>,
}

impl MixedState {
    pub fn new(events: Vec<Event>, weights: Vec<f64>) -> Result<Self> {
        if events.is_empty() || events.len() != weights.len() {
            return Err(Error::Shape("mixture needs one weight per event".into()));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::Domain("mixture weights must be nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("mixture weights sum to {total}, expected 1")));
        }
        Ok(Self { events, weights })
    }

    /// `(1 - lambda) p + lambda q`.
    pub fn interpolate(p: &Event, q: &Event, lambda: f64) -> Result<Self> {
        Self::new(vec![p.clone(), q.clone()], vec![1.0 - lambda, lambda])
    }
}

impl StateFunctional for MixedState {
    fn evaluate(&self, f: &ScalarField) -> f64 {
        self.events
            .iter()
            .zip(&self.weights)
            .map(|(e, w)| w * f.eval(&e.0))
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderRelation {
    Causal,
    Chronological,
    Equal,
    Incomparable,
}

/// Relation of `p` to `q`, read as "`p` precedes `q`".
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderVerdict {
    pub relation: OrderRelation,
    /// Index of a family member with `f(p) > f(q)`.
    pub witness: Option<usize>,
}

impl OrderVerdict {
    /// True for every relation that implies `p <= q`.
    pub fn precedes(&self) -> bool {
        !matches!(self.relation, OrderRelation::Incomparable)
    }
}

fn same_dimension(p: &Event, q: &Event) -> Result<()> {
    if p.dimension() != q.dimension() {
        return Err(Error::Shape(format!(
            "events have dimensions {} and {}",
            p.dimension(),
            q.dimension()
        )));
    }
    Ok(())
}

/// Closed-form order in flat spacetime: `p <= q` iff `dt >= |dx|`, strict
/// (chronological) iff `dt > |dx|`.
pub fn minkowski_order(p: &Event, q: &Event) -> Result<OrderVerdict> {
    same_dimension(p, q)?;
    if p == q {
        return Ok(OrderVerdict {
            relation: OrderRelation::Equal,
            witness: None,
        });
    }
    let dt = q.0[0] - p.0[0];
    let dx2: f64 = p.0[1..].iter().zip(&q.0[1..]).map(|(a, b)| (b - a) * (b - a)).sum();
    let relation = if dt <= 0.0 {
        OrderRelation::Incomparable
    } else {
        let dt2 = dt * dt;
        if dt2 > dx2 {
            OrderRelation::Chronological
        } else if dt2 == dx2 {
            OrderRelation::Causal
        } else {
            OrderRelation::Incomparable
        }
    };
    Ok(OrderVerdict {
        relation,
        witness: None,
    })
}

fn verification_grid(n: usize) -> SamplingSpec {
    let points_per_axis = match n {
        0..=3 => 5,
        4 => 4,
        _ => 3,
    };
    SamplingSpec {
        points_per_axis,
        random_samples: 64,
        seed: 0x5eed,
    }
}

/// `atan(s (w0 t + w . x - c))`, with `(w0, w)` a causal co-vector.
fn arctan_time_function(weights: Vec<f64>, scale: f64, offset: f64) -> ScalarField {
    let terms: Vec<String> = weights
        .iter()
        .enumerate()
        .map(|(i, w)| format!("{w:+.6}*x{i}"))
        .collect();
    let desc = format!("atan({scale:.6}*({} {:+.6}))", terms.join(" "), -offset);
    ScalarField::affine(-offset, weights).compose(
        desc,
        move |u| (scale * u).atan(),
        move |u| scale / (1.0 + (scale * u).powi(2)),
    )
}

/// Generates `count` causal functions, deterministically from `seed`. The
/// first member is `atan(t)`; the rest are arctangents of random affine
/// functions whose spatial co-gradient lies on (or inside) the light cone.
/// Every member is verified with [`check_causal`] over the domain before it
/// is accepted; a rejected candidate is retried with a shrunken spatial part,
/// which ends at the pure time function in the worst case.
pub fn generate_causal_family(st: &Spacetime, count: usize, seed: u64) -> Result<Vec<ScalarField>> {
    if count == 0 {
        return Err(Error::Config("family size must be >= 1".into()));
    }
    let n = st.dimension();
    let grid = verification_grid(n);
    let diameter = st
        .domain()
        .bounds
        .iter()
        .map(|(lo, hi)| (hi - lo) * (hi - lo))
        .sum::<f64>()
        .sqrt()
        .max(1e-12);
    let centre: Vec<f64> = st.domain().bounds.iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut family = Vec::with_capacity(count);

    let mut time = vec![0.0; n];
    time[0] = 1.0;
    family.push(
        accept(st, arctan_time_function(time.clone(), 1.0, 0.0), &grid)?
            .unwrap_or_else(|| arctan_time_function(time.clone(), 1.0, 0.0)),
    );

    while family.len() < count {
        let mut direction: Vec<f64> = (1..n).map(|_| standard_normal(&mut rng)).collect();
        let norm = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-12 {
            continue;
        }
        direction.iter_mut().for_each(|v| *v /= norm);
        let scale = rng.gen_range(0.5..2.0) / diameter;
        let u_centre = centre[0] + direction.iter().zip(&centre[1..]).map(|(v, c)| v * c).sum::<f64>();
        let offset = u_centre + rng.gen_range(-0.5..0.5) * diameter;
        let mut radius = 1.0;
        let mut accepted = None;
        for _ in 0..64 {
            let mut w = Vec::with_capacity(n);
            w.push(1.0);
            w.extend(direction.iter().map(|v| v * radius));
            if let Some(f) = accept(st, arctan_time_function(w, scale, offset), &grid)? {
                accepted = Some(f);
                break;
            }
            radius *= 0.5;
        }
        family.push(accepted.unwrap_or_else(|| arctan_time_function(time.clone(), scale, offset)));
    }
    Ok(family)
}

fn accept(st: &Spacetime, f: ScalarField, grid: &SamplingSpec) -> Result<Option<ScalarField>> {
    let report = check_causal(st, &f, grid, f.default_boundary_tol())?;
    Ok((report.verdict == Verdict::Causal).then_some(f))
}

pub(crate) fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Probes `p <= q` with a family of causal functions.
pub fn order_via_functions<P, Q>(p: &P, q: &Q, family: &[ScalarField], tol: f64) -> Result<OrderVerdict>
where
    P: StateFunctional + ?Sized,
    Q: StateFunctional + ?Sized,
{
    if family.is_empty() {
        return Err(Error::Config("causal-function family is empty".into()));
    }
    for (i, f) in family.iter().enumerate() {
        if p.evaluate(f) > q.evaluate(f) + tol {
            return Ok(OrderVerdict {
                relation: OrderRelation::Incomparable,
                witness: Some(i),
            });
        }
    }
    Ok(OrderVerdict {
        relation: OrderRelation::Causal,
        witness: None,
    })
}

/// Indices of the candidates in the causal future of `center`, in input order.
pub fn future_indices(center: &Event, candidates: &[Event], family: &[ScalarField]) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for (i, q) in candidates.iter().enumerate() {
        same_dimension(center, q)?;
        if order_via_functions(center, q, family, ORDER_TOL)?.precedes() {
            out.push(i);
        }
    }
    if family.is_empty() {
        return Err(Error::Config("causal-function family is empty".into()));
    }
    Ok(out)
}

/// `J+(center)` restricted to `candidates`.
pub fn future_set(center: &Event, candidates: &[Event], family: &[ScalarField]) -> Result<Vec<Event>> {
    Ok(future_indices(center, candidates, family)?
        .into_iter()
        .map(|i| candidates[i].clone())
        .collect())
}

/// `J-(center)` restricted to `candidates`.
pub fn past_set(center: &Event, candidates: &[Event], family: &[ScalarField]) -> Result<Vec<Event>> {
    if family.is_empty() {
        return Err(Error::Config("causal-function family is empty".into()));
    }
    let mut out = Vec::new();
    for q in candidates {
        same_dimension(center, q)?;
        if order_via_functions(q, center, family, ORDER_TOL)?.precedes() {
            out.push(q.clone());
        }
    }
    Ok(out)
}

/// Smallest box containing the events, padded by `pad` on every side.
pub fn bounding_box(events: &[Event], pad: f64) -> Result<CoordBox> {
    let n = events
        .first()
        .map(Event::dimension)
        .ok_or_else(|| Error::Config("no events".into()))?;
    let mut bounds = vec![(f64::INFINITY, f64::NEG_INFINITY); n];
    for e in events {
        if e.dimension() != n {
            return Err(Error::Shape("events have mixed dimensions".into()));
        }
        for (b, x) in bounds.iter_mut().zip(e.coords()) {
            b.0 = b.0.min(*x);
            b.1 = b.1.max(*x);
        }
    }
    CoordBox::new(bounds.into_iter().map(|(lo, hi)| (lo - pad, hi + pad)).collect())
}
