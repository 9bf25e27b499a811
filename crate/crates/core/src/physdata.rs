//! Physical surface data `(σ, |H|, α_H)`: generators and the text table format.
//!
//! Table layout:
//!
//! ```text
//! # n=32
//! # provenance=schwarzschild
//! theta P Q normH alpha_theta
//! 7.3877236787553e-02 4.0000000000000000e+00 ...
//! ```
//!
//! Columns may be separated by whitespace or commas and may appear in any
//! order. Rows must sit exactly on the Gauss–Legendre nodes of the declared
//! grid size.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use crate::embedding::{embed_lifted, extrinsic_data};
use crate::error::{Error, Result};
use crate::geometry::{make_grid, AxisymMetric, Grid, OneFormField, ScalarField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Schwarzschild,
    Minkowski,
    File,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Schwarzschild => "schwarzschild",
            Provenance::Minkowski => "minkowski",
            Provenance::File => "file",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalData {
    pub metric: AxisymMetric,
    pub norm_h: ScalarField,
    pub alpha_h: OneFormField,
    pub provenance: Provenance,
}

impl PhysicalData {
    pub fn new(
        metric: AxisymMetric,
        norm_h: ScalarField,
        alpha_h: OneFormField,
        provenance: Provenance,
    ) -> Result<Self> {
        let n = metric.n_nodes();
        norm_h.check_len(n)?;
        alpha_h.theta.check_len(n)?;
        if let Some((node, &value)) = norm_h
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v > 0.0))
        {
            return Err(Error::InvalidData {
                node,
                field: "normH",
                value,
            });
        }
        if let Some((node, &value)) = alpha_h.theta.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidData {
                node,
                field: "alpha_theta",
                value,
            });
        }
        Ok(PhysicalData {
            metric,
            norm_h,
            alpha_h,
            provenance,
        })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.metric.grid()
    }
}

/// Round coordinate sphere of radius `r` in the time-symmetric Schwarzschild
/// slice of mass `m`: `P = Q = r`, `|H| = (2/r)√(1 − 2m/r)`, `α_H = 0`.
pub fn schwarzschild_sphere(grid: Arc<Grid>, mass: f64, radius: f64) -> Result<PhysicalData> {
    if !(mass >= 0.0 && mass.is_finite()) {
        return Err(Error::param("m", format!("mass must be nonnegative, got {mass}")));
    }
    if !(radius > 2.0 * mass) {
        return Err(Error::Horizon { m: mass, r: radius });
    }
    let n = grid.n_nodes();
    let metric = AxisymMetric::round_sphere(grid, radius)?;
    let norm_h = 2.0 / radius * (1.0 - 2.0 * mass / radius).sqrt();
    PhysicalData::new(
        metric,
        ScalarField::constant(n, norm_h),
        OneFormField::zeros(n),
        Provenance::Schwarzschild,
    )
}

/// Data of the Minkowski surface `Σ_{τ₀}` regarded as a physical surface.
pub fn minkowski_surface_data(metric: &AxisymMetric, tau0: &ScalarField) -> Result<PhysicalData> {
    let surface = embed_lifted(metric, tau0)?;
    let ext = extrinsic_data(&surface)?;
    let frame = ext.require_frame(metric.grid().nodes())?;
    PhysicalData::new(
        metric.clone(),
        frame.norm_h.clone(),
        frame.alpha_h.clone(),
        Provenance::Minkowski,
    )
}

const COLUMNS: [&str; 5] = ["theta", "P", "Q", "normH", "alpha_theta"];
const NODE_TOLERANCE: f64 = 1e-12;

pub fn store_physical_data(data: &PhysicalData, path: impl AsRef<Path>) -> Result<()> {
    let mut out = Vec::new();
    write_table(data, &mut out)?;
    fs::write(path, out)?;
    Ok(())
}

pub fn write_table(data: &PhysicalData, out: &mut impl Write) -> Result<()> {
    let grid = data.grid();
    writeln!(out, "# n={}", grid.n_nodes())?;
    writeln!(out, "# provenance={}", data.provenance)?;
    writeln!(out, "{}", COLUMNS.join(" "))?;
    for j in 0..grid.n_nodes() {
        writeln!(
            out,
            "{:.16e} {:.16e} {:.16e} {:.16e} {:.16e}",
            grid.nodes()[j],
            data.metric.p()[j],
            data.metric.q()[j],
            data.norm_h[j],
            data.alpha_h.theta[j]
        )?;
    }
    Ok(())
}

pub fn load_physical_data(path: impl AsRef<Path>) -> Result<PhysicalData> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    parse_table(&text, path)
}

fn split_fields(line: &str) -> Vec<&str> {
    line.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .collect()
}

pub fn parse_table(text: &str, path: &Path) -> Result<PhysicalData> {
    let table_err = |row: usize, column: &str, reason: String| Error::Table {
        path: path.to_path_buf(),
        row,
        column: column.to_string(),
        reason,
    };

    let mut declared_n = None;
    let mut header: Option<Vec<String>> = None;
    let mut rows: Vec<(usize, Vec<f64>)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(v) = comment.strip_prefix("n=") {
                let n = v
                    .trim()
                    .parse::<usize>()
                    .map_err(|e| table_err(line_no, "n", format!("bad grid size `{v}`: {e}")))?;
                declared_n = Some(n);
            }
            continue;
        }
        let fields = split_fields(line);
        match &header {
            None => {
                for required in COLUMNS {
                    if !fields.contains(&required) {
                        return Err(table_err(line_no, required, "missing from header".into()));
                    }
                }
                header = Some(fields.iter().map(|s| s.to_string()).collect());
            }
            Some(h) => {
                if fields.len() != h.len() {
                    return Err(table_err(
                        line_no,
                        "*",
                        format!("expected {} fields, found {}", h.len(), fields.len()),
                    ));
                }
                let mut values = Vec::with_capacity(COLUMNS.len());
                for name in COLUMNS {
                    let pos = h.iter().position(|c| c == name).unwrap();
                    let v = fields[pos]
                        .parse::<f64>()
                        .map_err(|e| table_err(line_no, name, format!("`{}`: {e}", fields[pos])))?;
                    if !v.is_finite() {
                        return Err(table_err(line_no, name, "value is not finite".into()));
                    }
                    values.push(v);
                }
                rows.push((line_no, values));
            }
        }
    }

    let n = declared_n.ok_or_else(|| Error::NodeMismatch {
        path: path.to_path_buf(),
        reason: "missing `# n=<N>` grid declaration".into(),
    })?;
    if header.is_none() {
        return Err(table_err(0, "*", "missing header line".into()));
    }
    if rows.len() != n {
        return Err(Error::NodeMismatch {
            path: path.to_path_buf(),
            reason: format!("grid n={n} needs {n} rows, found {}", rows.len()),
        });
    }
    let grid = make_grid(n)?;
    for (j, (line_no, values)) in rows.iter().enumerate() {
        let expected = grid.nodes()[j];
        if (values[0] - expected).abs() > NODE_TOLERANCE {
            return Err(Error::NodeMismatch {
                path: path.to_path_buf(),
                reason: format!(
                    "row {line_no}: theta = {} but node {j} of the n={n} grid is {expected}",
                    values[0]
                ),
            });
        }
        for (col, name) in [(1, "P"), (2, "Q"), (3, "normH")] {
            if values[col] <= 0.0 {
                return Err(table_err(*line_no, name, format!("must be positive, got {}", values[col])));
            }
        }
    }
    let column = |c: usize| ScalarField::from_fn(n, |j| rows[j].1[c]);
    let metric = AxisymMetric::new(grid, column(1), column(2))?;
    PhysicalData::new(
        metric,
        column(3),
        OneFormField::new(column(4)),
        Provenance::File,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::embed_r3;

    #[test]
    fn flat_space_sphere() {
        let g = make_grid(32).unwrap();
        let d = schwarzschild_sphere(g.clone(), 0.0, 1.0).unwrap();
        assert!((&d.norm_h - 2.0).max_abs() < 1e-15);
        let mk = minkowski_surface_data(&AxisymMetric::round_sphere(g, 1.0).unwrap(), &ScalarField::zeros(32))
            .unwrap();
        assert!((&mk.norm_h - &d.norm_h).max_abs() < 1e-9);
        assert!(mk.alpha_h.theta.max_abs() < 1e-9);
    }

    #[test]
    fn schwarzschild_mean_curvature() {
        let g = make_grid(32).unwrap();
        let d = schwarzschild_sphere(g, 1.0, 4.0).unwrap();
        assert!((&d.norm_h - 0.3535533906).max_abs() < 1e-10);
        assert_eq!(d.provenance, Provenance::Schwarzschild);
    }

    #[test]
    fn horizon_rejected() {
        let g = make_grid(16).unwrap();
        assert!(matches!(schwarzschild_sphere(g.clone(), 1.0, 2.0), Err(Error::Horizon { .. })));
        assert!(matches!(schwarzschild_sphere(g, 1.0, 1.0), Err(Error::Horizon { .. })));
    }

    #[test]
    fn reference_mean_curvature_exceeds_physical() {
        let g = make_grid(32).unwrap();
        for (m, r) in [(1.0, 4.0), (0.5, 1.5), (0.1, 10.0)] {
            let d = schwarzschild_sphere(g.clone(), m, r).unwrap();
            let h0 = embed_r3(&d.metric).unwrap().mean_curvature();
            let gap = h0 - &d.norm_h;
            assert!(gap.min() > 0.0);
            assert!(d.norm_h.min() > 0.0);
        }
    }

    #[test]
    fn time_translated_minkowski_data() {
        let g = make_grid(32).unwrap();
        let m = AxisymMetric::round_sphere(g.clone(), 1.0).unwrap();
        let a = minkowski_surface_data(&m, &ScalarField::zeros(32)).unwrap();
        let b = minkowski_surface_data(&m, &ScalarField::constant(32, 1.7)).unwrap();
        assert!((&a.norm_h - &b.norm_h).max_abs() < 1e-9);
        assert!((&a.alpha_h.theta - &b.alpha_h.theta).max_abs() < 1e-9);
    }

    #[test]
    fn boosted_minkowski_data_matches_closed_form() {
        let g = make_grid(32).unwrap();
        let m = AxisymMetric::round_sphere(g.clone(), 1.0).unwrap();
        let tau = 0.3 * g.cos_theta();
        let d = minkowski_surface_data(&m, &tau).unwrap();
        let base = embed_r3(&m).unwrap();
        let closed = crate::embedding::mean_sq_from_base(&base, &tau).unwrap();
        assert!((&d.norm_h * &d.norm_h - closed).max_abs() < 1e-8);
    }

    #[test]
    fn table_round_trip_is_exact() {
        let g = make_grid(32).unwrap();
        let d = schwarzschild_sphere(g.clone(), 1.0, 4.0).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.txt");
        store_physical_data(&d, &path).unwrap();
        let back = load_physical_data(&path).unwrap();
        assert_eq!(back.metric.p(), d.metric.p());
        assert_eq!(back.metric.q(), d.metric.q());
        assert_eq!(back.norm_h, d.norm_h);
        assert_eq!(back.alpha_h, d.alpha_h);
        assert_eq!(back.provenance, Provenance::File);

        let mk = minkowski_surface_data(
            &AxisymMetric::round_sphere(g.clone(), 1.0).unwrap(),
            &(0.3 * g.cos_theta() + 0.1 * g.legendre(2)),
        )
        .unwrap();
        store_physical_data(&mk, &path).unwrap();
        let back = load_physical_data(&path).unwrap();
        assert_eq!(back.alpha_h, mk.alpha_h);
        assert_eq!(back.norm_h, mk.norm_h);
    }

    fn table_text(n: usize, rows: usize, mutate: impl Fn(usize, &mut [f64; 5])) -> String {
        let g = make_grid(n).unwrap();
        let mut s = format!("# n={n}\ntheta,P,Q,normH,alpha_theta\n");
        for j in 0..rows {
            let mut r = [g.nodes()[j], 1.0, 1.0, 2.0, 0.0];
            mutate(j, &mut r);
            s.push_str(&format!("{:.16e},{},{},{},{}\n", r[0], r[1], r[2], r[3], r[4]));
        }
        s
    }

    #[test]
    fn zero_mean_curvature_names_row_and_column() {
        let text = table_text(8, 8, |j, r| {
            if j == 5 {
                r[3] = 0.0
            }
        });
        match parse_table(&text, Path::new("t.csv")) {
            Err(Error::Table { row, column, .. }) => {
                assert_eq!(row, 8);
                assert_eq!(column, "normH");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn short_table_is_node_mismatch() {
        let text = table_text(32, 31, |_, _| {});
        assert!(matches!(parse_table(&text, Path::new("t")), Err(Error::NodeMismatch { .. })));
    }

    #[test]
    fn shifted_node_is_node_mismatch() {
        let text = table_text(8, 8, |j, r| {
            if j == 2 {
                r[0] += 1e-6
            }
        });
        assert!(matches!(parse_table(&text, Path::new("t")), Err(Error::NodeMismatch { .. })));
    }

    #[test]
    fn malformed_number_is_table_error() {
        let text = table_text(8, 8, |_, _| {}).replacen(",1,1,2,0\n", ",1,abc,2,0\n", 1);
        match parse_table(&text, Path::new("t")) {
            Err(Error::Table { column, .. }) => assert_eq!(column, "Q"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn whitespace_and_reordered_columns() {
        let g = make_grid(6).unwrap();
        let mut s = String::from("# n=6\nnormH  theta Q P alpha_theta\n");
        for j in 0..6 {
            s.push_str(&format!("2.0\t{:.16e}  1.0 1.0 0.0\n", g.nodes()[j]));
        }
        let d = parse_table(&s, Path::new("t")).unwrap();
        assert!((&d.norm_h - 2.0).max_abs() == 0.0);
    }
}
