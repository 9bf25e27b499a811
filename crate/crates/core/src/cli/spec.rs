//! Parsers for the small command-line languages: time-function expressions,
//! metric names, and `key=value` lists.

use std::fmt;
use std::fs;
use std::path::PathBuf;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{AxisymMetric, Grid, ScalarField};

fn parse_err(input: &str, reason: impl Into<String>) -> Error {
    Error::Parse {
        input: input.to_string(),
        reason: reason.into(),
    }
}

fn number(input: &str, s: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| parse_err(input, format!("`{}` is not a number", s.trim())))?;
    if !v.is_finite() {
        return Err(parse_err(input, format!("`{}` is not finite", s.trim())));
    }
    Ok(v)
}

/// Parses `k1=v1,k2=v2` into pairs, in order.
pub fn key_values(input: &str) -> Result<Vec<(String, f64)>> {
    input
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|item| {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| parse_err(input, format!("expected key=value, found `{item}`")))?;
            Ok((k.trim().to_string(), number(input, v)?))
        })
        .collect()
}

fn take(input: &str, pairs: &[(String, f64)], key: &str) -> Result<f64> {
    pairs
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| *v)
        .ok_or_else(|| parse_err(input, format!("missing `{key}`")))
}

fn only_keys(input: &str, pairs: &[(String, f64)], allowed: &[&str]) -> Result<()> {
    match pairs.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
        Some((k, _)) => Err(parse_err(input, format!("unknown key `{k}` (expected {})", allowed.join(", ")))),
        None => Ok(()),
    }
}

/// `m=<mass>,r=<radius>`.
pub fn schwarzschild(input: &str) -> Result<(f64, f64)> {
    let kv = key_values(input)?;
    only_keys(input, &kv, &["m", "r"])?;
    Ok((take(input, &kv, "m")?, take(input, &kv, "r")?))
}

/// A time function: `zero`, a sum of `c*Pl` terms, or `file:<path>`.
#[derive(Debug, Clone, PartialEq)]
pub enum TauSpec {
    /// `(l, c)` pairs; `l = 0` is a constant.
    Modes(Vec<(usize, f64)>),
    File(PathBuf),
}

impl TauSpec {
    pub fn zero() -> Self {
        TauSpec::Modes(Vec::new())
    }

    pub fn parse(input: &str) -> Result<Self> {
        let trimmed = input.trim();
        if let Some(path) = trimmed.strip_prefix("file:") {
            return Ok(TauSpec::File(PathBuf::from(path)));
        }
        if trimmed == "zero" || trimmed == "0" {
            return Ok(TauSpec::zero());
        }
        let compact: String = trimmed.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(parse_err(input, "empty expression"));
        }
        // Split into signed terms at `+`/`-` that do not belong to an exponent.
        let mut terms = Vec::new();
        let mut start = 0;
        let bytes = compact.as_bytes();
        for i in 1..bytes.len() {
            let c = bytes[i];
            if (c == b'+' || c == b'-') && !matches!(bytes[i - 1], b'e' | b'E' | b'*' | b'+' | b'-') {
                terms.push(&compact[start..i]);
                start = i;
            }
        }
        terms.push(&compact[start..]);
        let modes = terms.into_iter().map(|t| Self::term(input, t)).collect::<Result<_>>()?;
        Ok(TauSpec::Modes(modes))
    }

    fn term(input: &str, term: &str) -> Result<(usize, f64)> {
        let (sign, body) = match term.as_bytes().first() {
            Some(b'-') => (-1.0, &term[1..]),
            Some(b'+') => (1.0, &term[1..]),
            _ => (1.0, term),
        };
        if body.is_empty() {
            return Err(parse_err(input, "dangling sign"));
        }
        let (coef, mode) = match body.split_once('*') {
            Some((c, m)) => (number(input, c)?, Some(m)),
            None if body.starts_with('P') => (1.0, Some(body)),
            None => (number(input, body)?, None),
        };
        let l = match mode {
            None => 0,
            Some(m) => m
                .strip_prefix('P')
                .and_then(|d| d.parse::<usize>().ok())
                .ok_or_else(|| parse_err(input, format!("expected a Legendre mode like `P2`, found `{m}`")))?,
        };
        Ok((l, sign * coef))
    }

    /// Node values on `grid`.
    pub fn field(&self, grid: &Grid) -> Result<ScalarField> {
        match self {
            TauSpec::Modes(modes) => Ok(modes
                .iter()
                .fold(ScalarField::zeros(grid.n_nodes()), |acc, &(l, c)| acc + c * grid.legendre(l))),
            TauSpec::File(path) => read_node_values(path, grid.n_nodes()),
        }
    }
}

impl fmt::Display for TauSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TauSpec::File(p) => write!(f, "file:{}", p.display()),
            TauSpec::Modes(m) if m.is_empty() => f.write_str("zero"),
            TauSpec::Modes(m) => {
                for (i, (l, c)) in m.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" + ")?;
                    }
                    write!(f, "{c}*P{l}")?;
                }
                Ok(())
            }
        }
    }
}

/// One value per node, taken from the last column of each non-comment line.
fn read_node_values(path: &PathBuf, n: usize) -> Result<ScalarField> {
    let text = fs::read_to_string(path)?;
    let mut values = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let last = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .rfind(|s| !s.is_empty())
            .unwrap_or("");
        match last.parse::<f64>() {
            Ok(v) if v.is_finite() => values.push(v),
            // A header line.
            Err(_) if values.is_empty() => continue,
            _ => {
                return Err(Error::Table {
                    path: path.clone(),
                    row: idx + 1,
                    column: "tau".into(),
                    reason: format!("`{last}` is not a finite number"),
                })
            }
        }
    }
    if values.len() != n {
        return Err(Error::NodeMismatch {
            path: path.clone(),
            reason: format!("grid n={n} needs {n} values, found {}", values.len()),
        });
    }
    Ok(ScalarField::new(values))
}

/// A named 2-metric on the sphere.
#[derive(Debug, Clone, PartialEq)]
pub enum MetricSpec {
    Sphere { radius: f64 },
    /// `Q = 1`, `P = √(1 − e sin²θ)`.
    Oblate { e: f64 },
    /// Ellipsoid of revolution with unit equatorial radius and polar semi-axis `c`.
    Ellipsoid { c: f64 },
}

impl MetricSpec {
    pub fn parse(input: &str) -> Result<Self> {
        let (name, rest) = input.split_once(':').unwrap_or((input, ""));
        let kv = key_values(rest)?;
        match name.trim() {
            "unit-sphere" => {
                only_keys(input, &kv, &[])?;
                Ok(MetricSpec::Sphere { radius: 1.0 })
            }
            "sphere" => {
                only_keys(input, &kv, &["r"])?;
                Ok(MetricSpec::Sphere {
                    radius: take(input, &kv, "r")?,
                })
            }
            "oblate" => {
                only_keys(input, &kv, &["e"])?;
                Ok(MetricSpec::Oblate {
                    e: take(input, &kv, "e")?,
                })
            }
            "ellipsoid" => {
                only_keys(input, &kv, &["c"])?;
                Ok(MetricSpec::Ellipsoid {
                    c: take(input, &kv, "c")?,
                })
            }
            other => Err(parse_err(
                input,
                format!("unknown metric `{other}` (expected unit-sphere, sphere:r=R, oblate:e=E, ellipsoid:c=C)"),
            )),
        }
    }

    pub fn build(&self, grid: Arc<Grid>) -> Result<AxisymMetric> {
        match *self {
            MetricSpec::Sphere { radius } => AxisymMetric::round_sphere(grid, radius),
            MetricSpec::Oblate { e } => {
                if !(0.0..1.0).contains(&e) {
                    return Err(Error::param("e", format!("must lie in [0, 1), got {e}")));
                }
                AxisymMetric::from_profiles(grid, |t| (1.0 - e * t.sin().powi(2)).sqrt(), |_| 1.0)
            }
            MetricSpec::Ellipsoid { c } => {
                if !(c > 0.0) {
                    return Err(Error::param("c", format!("must be positive, got {c}")));
                }
                AxisymMetric::from_revolution_profile(grid, |_| 1.0, move |_| c)
            }
        }
    }
}

impl fmt::Display for MetricSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricSpec::Sphere { radius } => write!(f, "sphere:r={radius}"),
            MetricSpec::Oblate { e } => write!(f, "oblate:e={e}"),
            MetricSpec::Ellipsoid { c } => write!(f, "ellipsoid:c={c}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::make_grid;

    #[test]
    fn tau_expressions() {
        assert_eq!(TauSpec::parse("zero").unwrap(), TauSpec::zero());
        assert_eq!(
            TauSpec::parse("0.3*P1 + 0.1*P2").unwrap(),
            TauSpec::Modes(vec![(1, 0.3), (2, 0.1)])
        );
        assert_eq!(
            TauSpec::parse("-P2-1e-3*P4+2").unwrap(),
            TauSpec::Modes(vec![(2, -1.0), (4, -1e-3), (0, 2.0)])
        );
        assert_eq!(TauSpec::parse("2.5e-1*P3").unwrap(), TauSpec::Modes(vec![(3, 0.25)]));
        assert_eq!(TauSpec::parse("file:t.txt").unwrap(), TauSpec::File("t.txt".into()));
        for bad in ["0.3*Q1", "0.3*P", "abc", "0.3*P1 +", ""] {
            assert!(TauSpec::parse(bad).is_err(), "{bad}");
        }
    }

    proptest::proptest! {
        #[test]
        fn display_round_trips(terms in proptest::collection::vec((0usize..12, -1e3f64..1e3), 1..6)) {
            let spec = TauSpec::Modes(terms);
            proptest::prop_assert_eq!(TauSpec::parse(&spec.to_string()).unwrap(), spec);
        }
    }

    #[test]
    fn tau_fields() {
        let g = make_grid(16).unwrap();
        let f = TauSpec::parse("0.3*P1").unwrap().field(&g).unwrap();
        assert!((f - 0.3 * g.cos_theta()).max_abs() < 1e-15);
        let display = TauSpec::parse("0.3*P1 - 0.1*P2").unwrap().to_string();
        assert_eq!(TauSpec::parse(&display).unwrap(), TauSpec::Modes(vec![(1, 0.3), (2, -0.1)]));
    }

    #[test]
    fn tau_from_file() {
        let g = make_grid(8).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tau.txt");
        let mut text = String::from("theta tau\n");
        for (t, x) in g.nodes().iter().zip(g.cos_theta().values()) {
            text.push_str(&format!("{t} {x}\n"));
        }
        fs::write(&path, text).unwrap();
        let f = TauSpec::File(path.clone()).field(&g).unwrap();
        assert_eq!(f, g.cos_theta());
        assert!(matches!(
            TauSpec::File(path).field(&make_grid(9).unwrap()),
            Err(Error::NodeMismatch { .. })
        ));
    }

    #[test]
    fn data_and_metric_specs() {
        assert_eq!(schwarzschild("m=1,r=4").unwrap(), (1.0, 4.0));
        assert!(schwarzschild("m=1").is_err());
        assert!(schwarzschild("m=1,r=4,q=2").is_err());
        assert_eq!(MetricSpec::parse("unit-sphere").unwrap(), MetricSpec::Sphere { radius: 1.0 });
        assert_eq!(MetricSpec::parse("oblate:e=0.3").unwrap(), MetricSpec::Oblate { e: 0.3 });
        assert!(MetricSpec::parse("torus").is_err());
        let g = make_grid(16).unwrap();
        let m = MetricSpec::Ellipsoid { c: 1.0 }.build(g.clone()).unwrap();
        assert!((m.p() - 1.0).max_abs() < 1e-12);
        assert!(MetricSpec::Oblate { e: 1.5 }.build(g).is_err());
    }
}
