//! JSON description of a spacetime, a scalar field and a sampling grid:
//!
//! ```json
//! {"dimension": 2,
//!  "metric": {"type": "diagonal", "components": ["-1", "1 + x0^2"]},
//!  "field": {"expr": "x0", "grad": ["1", "0"]},
//!  "grid": {"box": [[-1, 1], [-1, 1]], "points_per_axis": 5}}
//! ```

use serde::{Deserialize, Serialize};

use super::{CoordBox, Expression, MetricField, SamplingSpec, ScalarField, Spacetime, DEFAULT_FD_STEP};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpacetimeDocument {
    pub dimension: usize,
    pub metric: MetricSpec,
    pub field: FieldSpec,
    pub grid: GridSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricSpec {
    #[serde(rename = "type")]
    pub kind: MetricKind,
    #[serde(default)]
    pub components: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricKind {
    Minkowski,
    Diagonal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub expr: String,
    #[serde(default)]
    pub grad: Option<Vec<String>>,
    #[serde(default)]
    pub fd_step: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(rename = "box")]
    pub bounds: Vec<[f64; 2]>,
    pub points_per_axis: usize,
    #[serde(default)]
    pub random_samples: usize,
    #[serde(default)]
    pub seed: u64,
}

impl MetricSpec {
    pub fn minkowski() -> Self {
        Self {
            kind: MetricKind::Minkowski,
            components: Vec::new(),
        }
    }

    pub fn build(&self, n: usize, domain: CoordBox) -> Result<Spacetime> {
        match self.kind {
            MetricKind::Minkowski => super::minkowski(n, domain),
            MetricKind::Diagonal => {
                let comps = self
                    .components
                    .iter()
                    .map(|c| Expression::parse(c, n))
                    .collect::<Result<Vec<_>>>()?;
                let description = format!("diagonal g^-1 = ({})", self.components.join(", "));
                Spacetime::new(n, MetricField::Diagonal(comps), domain, description)
            }
        }
    }
}

impl SpacetimeDocument {
    pub fn build(&self) -> Result<(Spacetime, ScalarField, SamplingSpec)> {
        let n = self.dimension;
        if n < 2 {
            return Err(Error::Dimension(format!("spacetime dimension must be >= 2, got {n}")));
        }
        if self.grid.bounds.len() != n {
            return Err(Error::Shape(format!(
                "grid box has {} axes, dimension is {n}",
                self.grid.bounds.len()
            )));
        }
        let domain = CoordBox::new(self.grid.bounds.iter().map(|b| (b[0], b[1])).collect())?;
        let st = self.metric.build(n, domain)?;
        let field = ScalarField::from_exprs(
            n,
            &self.field.expr,
            self.field.grad.as_deref(),
            self.field.fd_step.unwrap_or(DEFAULT_FD_STEP),
        )?;
        let sampling = SamplingSpec {
            points_per_axis: self.grid.points_per_axis,
            random_samples: self.grid.random_samples,
            seed: self.grid.seed,
        };
        Ok((st, field, sampling))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{check_causal, Verdict};

    #[test]
    fn parses_and_builds() {
        let doc: SpacetimeDocument = serde_json::from_str(
            r#"{"dimension": 2,
                "metric": {"type": "diagonal", "components": ["-(1 + x1^2)", "1"]},
                "field": {"expr": "x0 + 0.5*x1", "grad": ["1", "0.5"]},
                "grid": {"box": [[-1, 1], [-1, 1]], "points_per_axis": 3}}"#,
        )
        .unwrap();
        let (st, f, grid) = doc.build().unwrap();
        assert_eq!(st.g_inv(&[0.0, 1.0]).unwrap(), vec![-2.0, 1.0]);
        let r = check_causal(&st, &f, &grid, f.default_boundary_tol()).unwrap();
        assert_eq!(r.verdict, Verdict::Causal);
    }

    #[test]
    fn wrong_component_count_is_shape_error() {
        let doc: SpacetimeDocument = serde_json::from_str(
            r#"{"dimension": 2, "metric": {"type": "diagonal", "components": ["-1"]},
                "field": {"expr": "x0"}, "grid": {"box": [[0, 1], [0, 1]], "points_per_axis": 2}}"#,
        )
        .unwrap();
        assert!(matches!(doc.build(), Err(Error::Shape(_))));
    }

    #[test]
    fn unknown_metric_type_rejected() {
        let r: std::result::Result<SpacetimeDocument, _> = serde_json::from_str(
            r#"{"dimension": 2, "metric": {"type": "kerr"}, "field": {"expr": "x0"},
                "grid": {"box": [[0, 1], [0, 1]], "points_per_axis": 2}}"#,
        );
        assert!(r.is_err());
    }
}
