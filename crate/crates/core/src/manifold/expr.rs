use std::fmt;

use exmex::prelude::*;
use exmex::FlatEx;

use crate::error::{Error, Result};

/// A parsed arithmetic expression over coordinates `x0 .. x{n-1}`.
///
/// Grammar: `+ - * / ^`, parentheses, numeric literals and the functions
/// `sin`, `cos`, `exp`, `sqrt` (plus the rest of the exmex float set).
#[derive(Clone)]
pub struct Expression {
    source: String,
    flat: FlatEx<f64>,
    /// Coordinate index of each variable, in exmex's variable order.
    coords: Vec<usize>,
}

impl Expression {
    pub fn parse(source: &str, n: usize) -> Result<Self> {
        let flat = exmex::parse::<f64>(source).map_err(|e| Error::Parse(format!("cannot parse `{source}`: {e}")))?;
        let coords = flat
            .var_names()
            .iter()
            .map(|name| {
                name.strip_prefix('x')
                    .and_then(|i| i.parse::<usize>().ok())
                    .filter(|&i| i < n)
                    .ok_or_else(|| {
                        Error::Parse(format!(
                            "unknown variable `{name}` in `{source}` (expected x0..x{})",
                            n - 1
                        ))
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            source: source.to_string(),
            flat,
            coords,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn eval(&self, point: &[f64]) -> f64 {
        let args: Vec<f64> = self.coords.iter().map(|&i| point[i]).collect();
        self.flat.eval(&args).unwrap_or(f64::NAN)
    }
}

impl fmt::Debug for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expression({:?})", self.source)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluates_with_coordinate_mapping() {
        // x10-style names sort before x2 alphabetically; the mapping must not care.
        let e = Expression::parse("x2 - 3*x0 + sin(x1)^2 + sqrt(4)", 3).unwrap();
        let v = e.eval(&[1.0, 0.0, 5.0]);
        assert!((v - 4.0).abs() < 1e-15);
    }

    #[test]
    fn constants_and_division() {
        let e = Expression::parse("1/2", 2).unwrap();
        assert_eq!(e.eval(&[9.0, 9.0]), 0.5);
    }

    #[test]
    fn rejects_unknown_variables() {
        assert!(matches!(Expression::parse("x2 + y", 3), Err(Error::Parse(_))));
        assert!(matches!(Expression::parse("x3", 3), Err(Error::Parse(_))));
        assert!(matches!(Expression::parse("x0 +", 3), Err(Error::Parse(_))));
    }
}
