//! Spacetimes with diagonal inverse metrics, scalar fields, and sampled
//! causality/steepness sweeps.
//!
//! A field is causal when `alpha <= 0` and `beta >= 0` at every point, and
//! steep (feasible for the distance formula) when the same holds with the
//! chirality term, i.e. `g(grad f, grad f) <= -1` with past-directed
//! gradient. Sweeps only certify the sampled points.

mod document;
mod expr;

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::clifford::{check_signature, curved_gammas, GammaSet};
use crate::error::{Error, Result};
use crate::spectral_matrix::{alpha_beta, causal_matrix, is_negative_semidefinite, NSD_TOL};

pub use document::{FieldSpec, GridSpec, MetricKind, MetricSpec, SpacetimeDocument};
pub use expr::Expression;

/// Boundary tolerance for analytic gradients.
pub const TOL_ANALYTIC: f64 = 1e-9;
/// Boundary tolerance for finite-difference gradients.
pub const TOL_FINITE_DIFF: f64 = 1e-6;
/// Default central-difference step.
pub const DEFAULT_FD_STEP: f64 = 1e-5;

/// Axis-aligned coordinate box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoordBox {
    pub bounds: Vec<(f64, f64)>,
}

impl CoordBox {
    pub fn new(bounds: Vec<(f64, f64)>) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::Config("coordinate box needs at least one axis".into()));
        }
        for (i, (lo, hi)) in bounds.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::Config(format!("axis {i}: invalid interval [{lo}, {hi}]")));
            }
        }
        Ok(Self { bounds })
    }

    /// `[-r, r]^n`.
    pub fn cube(n: usize, r: f64) -> Self {
        Self {
            bounds: vec![(-r, r); n],
        }
    }

    pub fn dimension(&self) -> usize {
        self.bounds.len()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.bounds.len() && p.iter().zip(&self.bounds).all(|(x, (lo, hi))| lo <= x && x <= hi)
    }
}

type MetricFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

#[derive(Clone)]
pub enum MetricField {
    Minkowski,
    Diagonal(Vec<Expression>),
    Function(MetricFn),
}

impl fmt::Debug for MetricField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricField::Minkowski => write!(f, "Minkowski"),
            MetricField::Diagonal(e) => f.debug_tuple("Diagonal").field(e).finish(),
            MetricField::Function(_) => write!(f, "Function(..)"),
        }
    }
}

/// A desk-scale spacetime: diagonal inverse metric over a coordinate box.
/// Global hyperbolicity of user-supplied metrics is assumed, not checked.
#[derive(Debug, Clone)]
pub struct Spacetime {
    n: usize,
    metric: MetricField,
    domain: CoordBox,
    pub description: String,
}

/// Flat spacetime with `g^{-1} = diag(-1, 1, ..., 1)`.
pub fn minkowski(n: usize, domain: CoordBox) -> Result<Spacetime> {
    Spacetime::new(
        n,
        MetricField::Minkowski,
        domain,
        format!("Minkowski R^(1,{})", n.saturating_sub(1)),
    )
}

impl Spacetime {
    pub fn new(n: usize, metric: MetricField, domain: CoordBox, description: String) -> Result<Self> {
        if n < 2 {
            return Err(Error::Dimension(format!("spacetime dimension must be >= 2, got {n}")));
        }
        if domain.dimension() != n {
            return Err(Error::Shape(format!(
                "domain box has {} axes, spacetime dimension is {n}",
                domain.dimension()
            )));
        }
        if let MetricField::Diagonal(c) = &metric {
            if c.len() != n {
                return Err(Error::Shape(format!("need {n} metric components, got {}", c.len())));
            }
        }
        Ok(Self {
            n,
            metric,
            domain,
            description,
        })
    }

    /// A spacetime whose diagonal inverse metric is computed by `g_inv`.
    pub fn diagonal<F>(n: usize, domain: CoordBox, description: &str, g_inv: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        Self::new(
            n,
            MetricField::Function(Arc::new(g_inv)),
            domain,
            description.to_string(),
        )
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn domain(&self) -> &CoordBox {
        &self.domain
    }

    pub fn metric(&self) -> &MetricField {
        &self.metric
    }

    pub fn is_minkowski(&self) -> bool {
        matches!(self.metric, MetricField::Minkowski)
    }

    /// Diagonal inverse metric at `p`, validated against `(-, +, ..., +)`.
    pub fn g_inv(&self, p: &[f64]) -> Result<Vec<f64>> {
        if p.len() != self.n {
            return Err(Error::Shape(format!(
                "point has {} coordinates, expected {}",
                p.len(),
                self.n
            )));
        }
        let g = match &self.metric {
            MetricField::Minkowski => {
                let mut g = vec![1.0; self.n];
                g[0] = -1.0;
                g
            }
            MetricField::Diagonal(exprs) => exprs.iter().map(|e| e.eval(p)).collect(),
            MetricField::Function(f) => f(p),
        };
        check_signature(&g, self.n)?;
        Ok(g)
    }

    /// Same spacetime with `g^{-1}` multiplied by a positive scalar field.
    pub fn conformally_rescaled<F>(&self, factor: F) -> Spacetime
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        let base = self.clone();
        let g: MetricFn = Arc::new(move |p: &[f64]| {
            let w = factor(p);
            base.g_inv(p)
                .map(|g| g.into_iter().map(|v| v * w).collect())
                .unwrap_or_else(|_| vec![f64::NAN; p.len()])
        });
        Spacetime {
            n: self.n,
            metric: MetricField::Function(g),
            domain: self.domain.clone(),
            description: format!("{} (conformally rescaled)", self.description),
        }
    }
}

type ValueFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type GradFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

#[derive(Clone)]
pub enum Gradient {
    Analytic(GradFn),
    /// Central differences with step `h` on every axis.
    FiniteDifference {
        h: f64,
    },
}

/// A real function on coordinates together with a gradient provider.
#[derive(Clone)]
pub struct ScalarField {
    pub description: String,
    value: ValueFn,
    gradient: Gradient,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.gradient {
            Gradient::Analytic(_) => "analytic".to_string(),
            Gradient::FiniteDifference { h } => format!("finite-difference h={h}"),
        };
        write!(f, "ScalarField({:?}, {kind})", self.description)
    }
}

impl ScalarField {
    pub fn analytic<V, G>(description: impl Into<String>, value: V, grad: G) -> Self
    where
        V: Fn(&[f64]) -> f64 + Send + Sync + 'static,
        G: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        Self {
            description: description.into(),
            value: Arc::new(value),
            gradient: Gradient::Analytic(Arc::new(grad)),
        }
    }

    pub fn finite_difference<V>(description: impl Into<String>, value: V, h: f64) -> Self
    where
        V: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self {
            description: description.into(),
            value: Arc::new(value),
            gradient: Gradient::FiniteDifference { h },
        }
    }

    /// `f(x) = offset + sum_mu coeffs[mu] x^mu`.
    pub fn affine(offset: f64, coeffs: Vec<f64>) -> Self {
        let terms: Vec<String> = coeffs.iter().enumerate().map(|(i, c)| format!("{c}*x{i}")).collect();
        let description = format!("{offset} + {}", terms.join(" + "));
        let c2 = coeffs.clone();
        Self::analytic(
            description,
            move |p| offset + coeffs.iter().zip(p).map(|(c, x)| c * x).sum::<f64>(),
            move |_| c2.clone(),
        )
    }

    /// Builds a field from expression strings. Without gradient expressions
    /// the gradient falls back to central differences with `fd_step`.
    pub fn from_exprs(n: usize, expr: &str, grad: Option<&[String]>, fd_step: f64) -> Result<Self> {
        let value = Expression::parse(expr, n)?;
        let v2 = value.clone();
        match grad {
            Some(g) => {
                if g.len() != n {
                    return Err(Error::Shape(format!("need {n} gradient expressions, got {}", g.len())));
                }
                let comps = g.iter().map(|s| Expression::parse(s, n)).collect::<Result<Vec<_>>>()?;
                Ok(Self::analytic(
                    expr,
                    move |p| v2.eval(p),
                    move |p| comps.iter().map(|c| c.eval(p)).collect(),
                ))
            }
            None => {
                if !(fd_step.is_finite() && fd_step > 0.0) {
                    return Err(Error::Config(format!(
                        "finite-difference step must be > 0, got {fd_step}"
                    )));
                }
                Ok(Self::finite_difference(expr, move |p| v2.eval(p), fd_step))
            }
        }
    }

    pub fn eval(&self, p: &[f64]) -> f64 {
        (self.value)(p)
    }

    pub fn gradient_kind(&self) -> &Gradient {
        &self.gradient
    }

    pub fn is_analytic(&self) -> bool {
        matches!(self.gradient, Gradient::Analytic(_))
    }

    /// Boundary tolerance matching the gradient provider.
    pub fn default_boundary_tol(&self) -> f64 {
        if self.is_analytic() {
            TOL_ANALYTIC
        } else {
            TOL_FINITE_DIFF
        }
    }

    pub fn grad(&self, p: &[f64]) -> Vec<f64> {
        match &self.gradient {
            Gradient::Analytic(g) => g(p),
            Gradient::FiniteDifference { h } => self.central_difference(p, *h),
        }
    }

    /// Central-difference gradient with step `h`, regardless of provider.
    pub fn central_difference(&self, p: &[f64], h: f64) -> Vec<f64> {
        let mut x = p.to_vec();
        (0..p.len())
            .map(|i| {
                x[i] = p[i] + h;
                let up = self.eval(&x);
                x[i] = p[i] - h;
                let down = self.eval(&x);
                x[i] = p[i];
                (up - down) / (2.0 * h)
            })
            .collect()
    }

    /// `phi o f` for a monotone `phi` with derivative `dphi`.
    pub fn compose<P, D>(self, description: impl Into<String>, phi: P, dphi: D) -> Self
    where
        P: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let inner = self.clone();
        let inner_g = self;
        Self::analytic(
            description,
            move |p| phi(inner.eval(p)),
            move |p| {
                let s = dphi(inner_g.eval(p));
                inner_g.grad(p).into_iter().map(|g| g * s).collect()
            },
        )
    }
}

/// Which points a sweep visits: a uniform grid over the domain box plus
/// optional seeded uniform random samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingSpec {
    pub points_per_axis: usize,
    #[serde(default)]
    pub random_samples: usize,
    #[serde(default)]
    pub seed: u64,
}

impl SamplingSpec {
    pub fn grid(points_per_axis: usize) -> Self {
        Self {
            points_per_axis,
            random_samples: 0,
            seed: 0,
        }
    }

    /// Grid points in lexicographic order (last axis fastest), then the
    /// random samples. One point per axis means the box centre.
    pub fn points(&self, domain: &CoordBox) -> Result<Vec<Vec<f64>>> {
        let n = domain.dimension();
        let k = self.points_per_axis;
        let grid_count = if k == 0 {
            0
        } else {
            k.checked_pow(n as u32)
                .ok_or_else(|| Error::Config("grid too large".into()))?
        };
        if grid_count + self.random_samples == 0 {
            return Err(Error::Config("sampling config selects no points".into()));
        }
        let axis = |i: usize, j: usize| -> f64 {
            let (lo, hi) = domain.bounds[i];
            if k == 1 {
                0.5 * (lo + hi)
            } else {
                lo + (hi - lo) * j as f64 / (k - 1) as f64
            }
        };
        let mut points = Vec::with_capacity(grid_count + self.random_samples);
        let mut idx = vec![0usize; n];
        for _ in 0..grid_count {
            points.push((0..n).map(|i| axis(i, idx[i])).collect());
            for i in (0..n).rev() {
                idx[i] += 1;
                if idx[i] < k {
                    break;
                }
                idx[i] = 0;
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        for _ in 0..self.random_samples {
            points.push(
                domain
                    .bounds
                    .iter()
                    .map(|&(lo, hi)| if lo == hi { lo } else { rng.gen_range(lo..=hi) })
                    .collect(),
            );
        }
        Ok(points)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Causal,
    Steep,
    Violating,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CausalityReport {
    pub verdict: Verdict,
    pub worst_alpha: f64,
    pub worst_beta: f64,
    /// Point minimising `min(-alpha, beta)`; ties go to the lexicographically
    /// smallest coordinates.
    pub worst_point: Vec<f64>,
    pub worst_margin: f64,
    pub samples_checked: usize,
    pub steepness: f64,
    pub tolerance: f64,
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Less => return true,
            std::cmp::Ordering::Greater => return false,
            std::cmp::Ordering::Equal => {}
        }
    }
    false
}

fn sweep(st: &Spacetime, f: &ScalarField, points: &[Vec<f64>], steepness: f64, tol_b: f64) -> Result<CausalityReport> {
    if points.is_empty() {
        return Err(Error::Config("empty sampling grid".into()));
    }
    if !(tol_b.is_finite() && tol_b >= 0.0) {
        return Err(Error::Range(format!("boundary tolerance must be >= 0, got {tol_b}")));
    }
    let mut all_ok = true;
    let mut worst: Option<(f64, f64, f64, &Vec<f64>)> = None;
    for p in points {
        if p.len() != st.dimension() {
            return Err(Error::Shape(format!(
                "sample point has {} coordinates, expected {}",
                p.len(),
                st.dimension()
            )));
        }
        let g = st.g_inv(p)?;
        let ab = alpha_beta(&g, &f.grad(p), steepness)?;
        all_ok &= ab.alpha <= tol_b && ab.beta >= -tol_b;
        let margin = ab.margin();
        let replace = match worst {
            None => true,
            Some((m, _, _, q)) => margin < m || (margin == m && lex_less(p, q)),
        };
        if replace {
            worst = Some((margin, ab.alpha, ab.beta, p));
        }
    }
    let (worst_margin, worst_alpha, worst_beta, worst_point) = worst.expect("points is nonempty");
    let verdict = match (all_ok, steepness > 0.0) {
        (false, _) => Verdict::Violating,
        (true, false) => Verdict::Causal,
        (true, true) => Verdict::Steep,
    };
    Ok(CausalityReport {
        verdict,
        worst_alpha,
        worst_beta,
        worst_point: worst_point.clone(),
        worst_margin,
        samples_checked: points.len(),
        steepness,
        tolerance: tol_b,
    })
}

/// Classifies `f` as causal iff `alpha <= tol_b` and `beta >= -tol_b` at
/// every sampled point.
pub fn check_causal(st: &Spacetime, f: &ScalarField, grid: &SamplingSpec, tol_b: f64) -> Result<CausalityReport> {
    let points = grid.points(st.domain())?;
    sweep(st, f, &points, 0.0, tol_b)
}

/// Same sweep at explicit points.
pub fn check_causal_at(st: &Spacetime, f: &ScalarField, points: &[Vec<f64>], tol_b: f64) -> Result<CausalityReport> {
    sweep(st, f, points, 0.0, tol_b)
}

/// Classifies `f` as steep iff the unit-steepness criterion holds at every
/// sampled point. Needs even dimension.
pub fn check_steep(st: &Spacetime, f: &ScalarField, grid: &SamplingSpec, tol_b: f64) -> Result<CausalityReport> {
    require_even(st)?;
    let points = grid.points(st.domain())?;
    sweep(st, f, &points, 1.0, tol_b)
}

pub fn check_steep_at(st: &Spacetime, f: &ScalarField, points: &[Vec<f64>], tol_b: f64) -> Result<CausalityReport> {
    require_even(st)?;
    sweep(st, f, points, 1.0, tol_b)
}

fn require_even(st: &Spacetime) -> Result<()> {
    if !st.dimension().is_multiple_of(2) {
        return Err(Error::Parity(format!(
            "steepness needs the chirality element, which requires even dimension (got {})",
            st.dimension()
        )));
    }
    Ok(())
}

/// Eigenvalue verdict on the causal matrix built from the curved gammas at
/// `p`, the matrix-level counterpart of the alpha/beta sweep.
pub fn matrix_verdict(gs: &GammaSet, st: &Spacetime, f: &ScalarField, p: &[f64], steepness: f64) -> Result<bool> {
    let g = st.g_inv(p)?;
    let pg = curved_gammas(gs, &g)?;
    let m = causal_matrix(&pg, &f.grad(p), steepness, gs.chirality())?;
    is_negative_semidefinite(&m, NSD_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::build_flat_gammas;

    fn flat2() -> Spacetime {
        minkowski(2, CoordBox::cube(2, 1.0)).unwrap()
    }

    #[test]
    fn minkowski_metric() {
        let st = flat2();
        assert_eq!(st.g_inv(&[0.3, -0.2]).unwrap(), vec![-1.0, 1.0]);
        let st4 = minkowski(4, CoordBox::cube(4, 1.0)).unwrap();
        assert_eq!(st4.g_inv(&[0.0; 4]).unwrap(), vec![-1.0, 1.0, 1.0, 1.0]);
        assert!(matches!(minkowski(1, CoordBox::cube(1, 1.0)), Err(Error::Dimension(_))));
    }

    #[test]
    fn time_function_is_causal() {
        let f = ScalarField::affine(0.0, vec![1.0, 0.0]);
        let r = check_causal(&flat2(), &f, &SamplingSpec::grid(5), TOL_ANALYTIC).unwrap();
        assert_eq!(r.verdict, Verdict::Causal);
        assert_eq!((r.worst_alpha, r.worst_beta), (-1.0, 1.0));
        assert_eq!(r.samples_checked, 25);
        // all points tie, so the lexicographically smallest wins
        assert_eq!(r.worst_point, vec![-1.0, -1.0]);
    }

    #[test]
    fn space_function_violates() {
        let f = ScalarField::affine(0.0, vec![0.0, 1.0]);
        let r = check_causal(&flat2(), &f, &SamplingSpec::grid(3), TOL_ANALYTIC).unwrap();
        assert_eq!(r.verdict, Verdict::Violating);
        assert_eq!(r.worst_beta, -1.0);
    }

    #[test]
    fn null_function_is_causal_on_boundary() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let f = ScalarField::affine(0.0, vec![s, s]);
        let r = check_causal(&flat2(), &f, &SamplingSpec::grid(3), TOL_ANALYTIC).unwrap();
        assert_eq!(r.verdict, Verdict::Causal);
        assert!(r.worst_beta.abs() < 1e-15);
    }

    #[test]
    fn constant_field_is_causal() {
        let f = ScalarField::affine(3.0, vec![0.0, 0.0]);
        let r = check_causal(&flat2(), &f, &SamplingSpec::grid(2), TOL_ANALYTIC).unwrap();
        assert_eq!(r.verdict, Verdict::Causal);
        assert_eq!((r.worst_alpha, r.worst_beta), (0.0, 0.0));
    }

    #[test]
    fn steepness_examples() {
        let st = flat2();
        let grid = SamplingSpec::grid(3);
        let r = check_steep(&st, &ScalarField::affine(0.0, vec![2.0, 0.0]), &grid, TOL_ANALYTIC).unwrap();
        assert_eq!(r.verdict, Verdict::Steep);
        assert_eq!((r.worst_alpha, r.worst_beta), (-2.0, 3.0));
        let r = check_steep(&st, &ScalarField::affine(0.0, vec![0.5, 0.0]), &grid, TOL_ANALYTIC).unwrap();
        assert_eq!(r.verdict, Verdict::Violating);
        assert_eq!(r.worst_beta, -0.75);
        let r = check_steep(&st, &ScalarField::affine(0.0, vec![1.0, 0.0]), &grid, TOL_ANALYTIC).unwrap();
        assert_eq!(r.verdict, Verdict::Steep);
        assert_eq!(r.worst_beta, 0.0);
    }

    #[test]
    fn steepness_needs_even_dimension() {
        let st = minkowski(3, CoordBox::cube(3, 1.0)).unwrap();
        let f = ScalarField::affine(0.0, vec![2.0, 0.0, 0.0]);
        assert!(matches!(
            check_steep(&st, &f, &SamplingSpec::grid(2), TOL_ANALYTIC),
            Err(Error::Parity(_))
        ));
    }

    #[test]
    fn empty_grid_is_config_error() {
        let f = ScalarField::affine(0.0, vec![1.0, 0.0]);
        let spec = SamplingSpec::grid(0);
        assert!(matches!(
            check_causal(&flat2(), &f, &spec, TOL_ANALYTIC),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            check_causal_at(&flat2(), &f, &[], TOL_ANALYTIC),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn grid_layout_and_random_samples() {
        let b = CoordBox::new(vec![(0.0, 1.0), (2.0, 4.0)]).unwrap();
        let spec = SamplingSpec {
            points_per_axis: 2,
            random_samples: 3,
            seed: 7,
        };
        let pts = spec.points(&b).unwrap();
        assert_eq!(
            &pts[..4],
            &[vec![0.0, 2.0], vec![0.0, 4.0], vec![1.0, 2.0], vec![1.0, 4.0]]
        );
        assert_eq!(pts.len(), 7);
        assert!(pts.iter().all(|p| b.contains(p)));
        assert_eq!(pts, spec.points(&b).unwrap());
        assert_eq!(SamplingSpec::grid(1).points(&b).unwrap(), vec![vec![0.5, 3.0]]);
    }

    fn curved_spacetime() -> Spacetime {
        // g^{-1} = diag(-(1 + x1^2), 2 + sin t, 1)
        Spacetime::diagonal(3, CoordBox::cube(3, 1.0), "test", |p| {
            vec![-(1.0 + p[1] * p[1]), 2.0 + p[0].sin(), 1.0]
        })
        .unwrap()
    }

    #[test]
    fn matrix_and_alpha_beta_verdicts_agree_pointwise() {
        let st = curved_spacetime();
        let gs = build_flat_gammas(3).unwrap();
        let fields = [
            ScalarField::analytic(
                "t + 0.3 x1^2",
                |p| p[0] + 0.3 * p[1] * p[1],
                |p| vec![1.0, 0.6 * p[1], 0.0],
            ),
            ScalarField::analytic("x1", |p| p[1], |_| vec![0.0, 1.0, 0.0]),
            ScalarField::analytic("t + sin x2", |p| p[0] + p[2].sin(), |p| vec![1.0, 0.0, p[2].cos()]),
        ];
        for f in &fields {
            for p in SamplingSpec::grid(4).points(st.domain()).unwrap() {
                let g = st.g_inv(&p).unwrap();
                let ab = alpha_beta(&g, &f.grad(&p), 0.0).unwrap();
                let by_matrix = matrix_verdict(&gs, &st, f, &p, 0.0).unwrap();
                assert_eq!(
                    by_matrix,
                    crate::spectral_matrix::causal_criterion(&ab),
                    "{f:?} at {p:?}"
                );
            }
        }
    }

    #[test]
    fn conformal_rescaling_preserves_verdicts() {
        let st = curved_spacetime();
        let scaled = st.conformally_rescaled(|p| 0.5 + p[0] * p[0] + p[2].cos().abs());
        let grid = SamplingSpec {
            points_per_axis: 5,
            random_samples: 50,
            seed: 3,
        };
        for f in [
            ScalarField::analytic("t", |p| p[0], |_| vec![1.0, 0.0, 0.0]),
            ScalarField::analytic("t + 0.9 x2", |p| p[0] + 0.9 * p[2], |_| vec![1.0, 0.0, 0.9]),
            ScalarField::analytic("t + 1.5 x2", |p| p[0] + 1.5 * p[2], |_| vec![1.0, 0.0, 1.5]),
            ScalarField::analytic("-t", |p| -p[0], |_| vec![-1.0, 0.0, 0.0]),
        ] {
            let a = check_causal(&st, &f, &grid, TOL_ANALYTIC).unwrap();
            let b = check_causal(&scaled, &f, &grid, TOL_ANALYTIC).unwrap();
            assert_eq!(a.verdict, b.verdict, "{f:?}");
        }
    }

    #[test]
    fn finite_differences_converge_quadratically() {
        let f = ScalarField::analytic(
            "t^3 + t x^2 + x^3/3",
            |p| p[0].powi(3) + p[0] * p[1] * p[1] + p[1].powi(3) / 3.0,
            |p| vec![3.0 * p[0] * p[0] + p[1] * p[1], 2.0 * p[0] * p[1] + p[1] * p[1]],
        );
        let st = flat2();
        let pts = SamplingSpec::grid(5).points(st.domain()).unwrap();
        let deviation = |h: f64| -> f64 {
            pts.iter()
                .map(|p| {
                    let g = st.g_inv(p).unwrap();
                    let exact = alpha_beta(&g, &f.grad(p), 0.0).unwrap();
                    let approx = alpha_beta(&g, &f.central_difference(p, h), 0.0).unwrap();
                    (exact.alpha - approx.alpha).abs().max((exact.beta - approx.beta).abs())
                })
                .fold(0.0, f64::max)
        };
        let ratio = deviation(1e-2) / deviation(5e-3);
        assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn expression_fields_match_analytic() {
        let f = ScalarField::from_exprs(
            2,
            "x0^2 + sin(x1)",
            Some(&["2*x0".into(), "cos(x1)".into()]),
            DEFAULT_FD_STEP,
        )
        .unwrap();
        let fd = ScalarField::from_exprs(2, "x0^2 + sin(x1)", None, DEFAULT_FD_STEP).unwrap();
        assert!(f.is_analytic() && !fd.is_analytic());
        for p in [[0.3, -0.7], [1.0, 2.0]] {
            for (a, b) in f.grad(&p).iter().zip(fd.grad(&p)) {
                assert!((a - b).abs() < 1e-8);
            }
        }
        assert_eq!(fd.default_boundary_tol(), TOL_FINITE_DIFF);
    }
}
