//! File formats: index sets, grids, coefficients, polynomial bundles,
//! convergence records, rate fits and Lebesgue sweeps.
//!
//! Floats are written with 17 significant digits, so every file round-trips
//! bit for bit. All writers go through a temporary file and a rename.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::analysis::{ConvergenceRecord, RateFit};
use crate::error::{Error, Result};
use crate::grid::{build_grid, NodeFamily, Nodes1D, UnisolventGrid};
use crate::multi_index::{LpDegree, LpTag, MultiIndexSet};
use crate::newton::NewtonPolynomial;

pub const BUNDLE_HEADER: &str = "header.json";
pub const BUNDLE_GRID: &str = "grid.csv";
pub const BUNDLE_COEFFS: &str = "coeffs.csv";

/// Full-precision float text.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes `bytes` to `path` via a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(path, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

fn csv_bytes(header: &[String], rows: impl Iterator<Item = Vec<String>>, path: &Path) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| Error::format(path, e.to_string());
    w.write_record(header).map_err(fail)?;
    for row in rows {
        w.write_record(&row).map_err(fail)?;
    }
    w.into_inner().map_err(|e| Error::format(path, e.to_string()))
}

fn names(prefix: &str, m: usize) -> Vec<String> {
    (1..=m).map(|i| format!("{prefix}{i}")).collect()
}

/// Numeric CSV rows, skipping `#` comments and a non-numeric header row.
pub fn read_numeric_csv(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_numeric_csv(&text, path)
}

fn parse_numeric_csv(text: &str, path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::format(path, e.to_string()))?;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(values) => rows.push(values),
            Err(_) if line == 0 && rows.is_empty() => continue,
            Err(e) => return Err(Error::format(path, format!("row {}: {e}", line + 1))),
        }
    }
    if let Some(width) = rows.first().map(Vec::len) {
        if let Some(bad) = rows.iter().position(|r| r.len() != width) {
            return Err(Error::format(path, format!("row {} has {} fields, expected {width}", bad + 1, rows[bad].len())));
        }
    }
    Ok(rows)
}

/// CSV `a1..am`, one row per index in canonical order.
pub fn multi_index_csv(set: &MultiIndexSet, path: &Path) -> Result<Vec<u8>> {
    let rows = set.iter().map(|a| a.iter().map(usize::to_string).collect());
    csv_bytes(&names("a", set.dim()), rows, path)
}

/// CSV `a1..am,x1..xm` in canonical order.
pub fn grid_csv(grid: &UnisolventGrid, path: &Path) -> Result<Vec<u8>> {
    let m = grid.dim();
    let mut header = names("a", m);
    header.extend(names("x", m));
    let rows = (0..grid.len()).map(|pos| {
        let a = grid.index_set().get(pos);
        let mut row: Vec<String> = a.iter().map(usize::to_string).collect();
        row.extend(grid.node(pos).into_iter().map(fmt_f64));
        row
    });
    csv_bytes(&header, rows, path)
}

/// CSV `a1..am,c` in canonical order.
pub fn coeffs_csv(poly: &NewtonPolynomial, path: &Path) -> Result<Vec<u8>> {
    let m = poly.dim();
    let mut header = names("a", m);
    header.push("c".into());
    let set = poly.grid().index_set();
    let rows = set.iter().zip(poly.coeffs()).map(|(a, &c)| {
        let mut row: Vec<String> = a.iter().map(usize::to_string).collect();
        row.push(fmt_f64(c));
        row
    });
    csv_bytes(&header, rows, path)
}

pub fn write_grid(grid: &UnisolventGrid, path: &Path) -> Result<()> {
    write_atomic(path, &grid_csv(grid, path)?)
}

/// Header of a polynomial bundle directory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BundleHeader {
    pub m: usize,
    pub num_coeffs: usize,
    pub node_family: NodeFamily,
    pub provenance: Option<LpTag>,
}

/// Writes `header.json`, `grid.csv` and `coeffs.csv` into the directory
/// `dir`. The directory appears only once all three files are complete.
pub fn write_bundle(poly: &NewtonPolynomial, dir: &Path) -> Result<()> {
    let grid = poly.grid();
    let header = BundleHeader {
        m: grid.dim(),
        num_coeffs: grid.len(),
        node_family: grid.family(),
        provenance: grid.index_set().provenance(),
    };
    let parent = match dir.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    if dir.exists() && !dir.join(BUNDLE_HEADER).is_file() {
        return Err(Error::format(dir, "exists and is not a polynomial bundle"));
    }
    let staging = tempfile::Builder::new().prefix(".bundle").tempdir_in(&parent).map_err(|e| Error::io(&parent, e))?;
    let json = serde_json::to_vec_pretty(&header).map_err(|e| Error::format(dir, e.to_string()))?;
    write_atomic(&staging.path().join(BUNDLE_HEADER), &json)?;
    write_atomic(&staging.path().join(BUNDLE_GRID), &grid_csv(grid, dir)?)?;
    write_atomic(&staging.path().join(BUNDLE_COEFFS), &coeffs_csv(poly, dir)?)?;
    if dir.exists() {
        fs::remove_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let staged = staging.keep();
    fs::rename(&staged, dir).map_err(|e| Error::io(dir, e))?;
    Ok(())
}

/// Loads a bundle written by [`write_bundle`]. Axes are rebuilt from the
/// grid coordinates, so they hold exactly the points the grid uses.
pub fn read_bundle(dir: &Path) -> Result<NewtonPolynomial> {
    let header_path = dir.join(BUNDLE_HEADER);
    let text = fs::read_to_string(&header_path).map_err(|e| Error::io(&header_path, e))?;
    let header: BundleHeader =
        serde_json::from_str(&text).map_err(|e| Error::format(&header_path, e.to_string()))?;
    let m = header.m;
    if m == 0 {
        return Err(Error::InvalidDimension(0));
    }

    let grid_path = dir.join(BUNDLE_GRID);
    let grid_rows = read_numeric_csv(&grid_path)?;
    let coeff_path = dir.join(BUNDLE_COEFFS);
    let coeff_rows = read_numeric_csv(&coeff_path)?;
    if grid_rows.len() != header.num_coeffs || coeff_rows.len() != header.num_coeffs {
        return Err(Error::format(
            dir,
            format!(
                "header announces {} coefficients, grid has {} rows, coefficients {}",
                header.num_coeffs,
                grid_rows.len(),
                coeff_rows.len()
            ),
        ));
    }

    let mut indices = Vec::with_capacity(grid_rows.len());
    let mut axes: Vec<Vec<Option<f64>>> = vec![Vec::new(); m];
    for row in &grid_rows {
        if row.len() != 2 * m {
            return Err(Error::format(&grid_path, format!("expected {} columns, got {}", 2 * m, row.len())));
        }
        let alpha = to_index(&row[..m], &grid_path)?;
        for (i, &a) in alpha.iter().enumerate() {
            let slot = &mut axes[i];
            if slot.len() <= a {
                slot.resize(a + 1, None);
            }
            match slot[a] {
                None => slot[a] = Some(row[m + i]),
                Some(v) if v.to_bits() == row[m + i].to_bits() => {}
                Some(v) => {
                    return Err(Error::format(
                        &grid_path,
                        format!("axis {} position {a} holds both {v} and {}", i + 1, row[m + i]),
                    ))
                }
            }
        }
        indices.push(alpha);
    }
    let mut nodes = Vec::with_capacity(m);
    for (i, slot) in axes.into_iter().enumerate() {
        let points = slot
            .into_iter()
            .collect::<Option<Vec<f64>>>()
            .ok_or_else(|| Error::format(&grid_path, format!("axis {} has gaps", i + 1)))?;
        nodes.push(Nodes1D::new(points, header.node_family)?);
    }
    let mut set = MultiIndexSet::from_indices(m, indices.iter().map(|v| v.as_slice()))?;
    if set.len() != indices.len() || set.iter().zip(&indices).any(|(a, b)| a != b.as_slice()) {
        return Err(Error::format(&grid_path, "rows are not in canonical order or repeat an index"));
    }
    if let Some(tag) = header.provenance {
        set = set.with_provenance(tag)?;
    }
    let grid = build_grid(set, nodes)?;

    let mut coeffs = Vec::with_capacity(coeff_rows.len());
    for (pos, row) in coeff_rows.iter().enumerate() {
        if row.len() != m + 1 {
            return Err(Error::format(&coeff_path, format!("expected {} columns, got {}", m + 1, row.len())));
        }
        if to_index(&row[..m], &coeff_path)? != indices[pos] {
            return Err(Error::format(&coeff_path, format!("row {} does not match the grid order", pos + 1)));
        }
        coeffs.push(row[m]);
    }
    NewtonPolynomial::new(grid, coeffs)
}

fn to_index(values: &[f64], path: &Path) -> Result<Vec<usize>> {
    values
        .iter()
        .map(|&v| {
            if v >= 0.0 && v.fract() == 0.0 && v < u32::MAX as f64 {
                Ok(v as usize)
            } else {
                Err(Error::format(path, format!("{v} is not a valid exponent")))
            }
        })
        .collect()
}

/// Sample values for a grid: the last column of each row, in grid order.
pub fn read_values(path: &Path, grid: &Arc<UnisolventGrid>) -> Result<Vec<f64>> {
    let rows = read_numeric_csv(path)?;
    if rows.len() != grid.len() {
        return Err(Error::LengthMismatch { expected: grid.len(), got: rows.len() });
    }
    Ok(rows.into_iter().map(|r| *r.last().unwrap()).collect())
}

/// Query points with `m` coordinates each.
pub fn read_points(path: &Path, m: usize) -> Result<Vec<Vec<f64>>> {
    let rows = read_numeric_csv(path)?;
    if let Some(bad) = rows.iter().position(|r| r.len() != m) {
        return Err(Error::format(path, format!("row {} has {} coordinates, expected {m}", bad + 1, rows[bad].len())));
    }
    Ok(rows)
}

/// CSV `x1..xm,value`.
pub fn values_csv(points: &[Vec<f64>], values: &[f64], m: usize, path: &Path) -> Result<Vec<u8>> {
    let mut header = names("x", m);
    header.push("value".into());
    let rows = points.iter().zip(values).map(|(x, &v)| {
        let mut row: Vec<String> = x.iter().map(|&c| fmt_f64(c)).collect();
        row.push(fmt_f64(v));
        row
    });
    csv_bytes(&header, rows, path)
}

fn join_params(params: &[(String, f64)]) -> String {
    params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(",")
}

/// `#` metadata lines, then `n,num_coeffs,error`.
pub fn record_csv(record: &ConvergenceRecord, path: &Path) -> Result<Vec<u8>> {
    let meta = &record.meta;
    let order: Vec<String> = meta.deriv_order.iter().map(usize::to_string).collect();
    let mut out = String::new();
    for (key, value) in [
        ("function", meta.function.clone()),
        ("params", join_params(&meta.params)),
        ("m", meta.m.to_string()),
        ("p", meta.p.to_string()),
        ("family", meta.family.to_string()),
        ("samples", meta.num_samples.to_string()),
        ("seed", meta.seed.to_string()),
        ("deriv_order", order.join(",")),
    ] {
        out.push_str(&format!("# {key}={value}\n"));
    }
    let rows = record
        .rows
        .iter()
        .map(|r| vec![r.degree.to_string(), r.num_coeffs.to_string(), fmt_f64(r.error)]);
    let body = csv_bytes(&["n".into(), "num_coeffs".into(), "error".into()], rows, path)?;
    let mut bytes = out.into_bytes();
    bytes.extend(body);
    Ok(bytes)
}

/// `(n, num_coeffs, error)` rows of a record CSV; metadata lines are skipped.
pub fn read_record_rows(path: &Path) -> Result<Vec<(usize, usize, f64)>> {
    read_numeric_csv(path)?
        .into_iter()
        .map(|r| match r[..] {
            [n, len, e] => Ok((n as usize, len as usize, e)),
            _ => Err(Error::format(path, "expected n,num_coeffs,error")),
        })
        .collect()
}

#[derive(Serialize)]
struct FitJson {
    c: f64,
    rho: f64,
    r_squared: f64,
    fit_range: [usize; 2],
}

/// `{c, rho, r_squared, fit_range: [lo, hi]}`.
pub fn fit_json(fit: &RateFit) -> Vec<u8> {
    let json = FitJson { c: fit.c, rho: fit.rho, r_squared: fit.r_squared, fit_range: [fit.fit_range.0, fit.fit_range.1] };
    let mut bytes = serde_json::to_vec_pretty(&json).expect("plain struct serialises");
    bytes.push(b'\n');
    bytes
}

/// One row of a Lebesgue sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LebesgueRow {
    pub m: usize,
    pub p: LpDegree,
    pub n: usize,
    pub num_coeffs: usize,
    pub lambda: f64,
}

/// CSV `m,p,n,num_coeffs,lambda`.
pub fn lebesgue_csv(rows: &[LebesgueRow], path: &Path) -> Result<Vec<u8>> {
    let header: Vec<String> = ["m", "p", "n", "num_coeffs", "lambda"].iter().map(|s| s.to_string()).collect();
    let body = rows
        .iter()
        .map(|r| vec![r.m.to_string(), r.p.to_string(), r.n.to_string(), r.num_coeffs.to_string(), fmt_f64(r.lambda)]);
    csv_bytes(&header, body, path)
}
