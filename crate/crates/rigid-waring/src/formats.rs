//! On-disk formats: CSV tables, the JSON metadata sidecar, and a JSON
//! encoding of Waring polynomials so runs are replayable from their metadata.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rigid_core::waring::{WaringPolynomial, WaringSystem};
use rigid_core::{CMatrix, Complex64};
use serde_json::{json, Value};

/// Formats a float with Rust's shortest round-trip representation, the one
/// fixed formatting every CSV cell uses so outputs are byte-stable.
pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

/// Formats an optional cell; absent values are empty cells.
pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// Writes one CSV table with a header row.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)
            .with_context(|| format!("creating output directory {}", dir.display()))?;
    }
    let mut w = csv::Writer::from_path(path)
        .with_context(|| format!("creating CSV {}", path.display()))?;
    w.write_record(header)?;
    for row in rows {
        if row.len() != header.len() {
            bail!("row width {} does not match header width {}", row.len(), header.len());
        }
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Sidecar path of an output file: the same name with `.meta.json` appended.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_os_string();
    name.push(".meta.json");
    PathBuf::from(name)
}

/// Writes the JSON metadata sidecar next to `out` and returns its path.
pub fn write_sidecar(out: &Path, meta: &Value) -> Result<PathBuf> {
    let path = sidecar_path(out);
    fs::write(&path, serde_json::to_string_pretty(meta)?)
        .with_context(|| format!("writing sidecar {}", path.display()))?;
    Ok(path)
}

/// Encodes a polynomial as `{"degree": D, "coeffs": [[[re, im], ...], ...]}`,
/// one inner row per linear form.
pub fn poly_to_json(f: &WaringPolynomial) -> Value {
    let rows: Vec<Value> = (0..f.num_terms())
        .map(|i| {
            let row: Vec<Value> =
                (0..f.num_vars()).map(|j| json!([f.coeffs()[(i, j)].re, f.coeffs()[(i, j)].im])).collect();
            Value::Array(row)
        })
        .collect();
    json!({ "degree": f.degree(), "coeffs": rows })
}

/// Decodes [`poly_to_json`]'s encoding.
pub fn poly_from_json(v: &Value) -> Result<WaringPolynomial> {
    let degree = v
        .get("degree")
        .and_then(Value::as_u64)
        .context("polynomial JSON needs an integer `degree`")? as usize;
    let rows = v
        .get("coeffs")
        .and_then(Value::as_array)
        .context("polynomial JSON needs a `coeffs` array")?;
    if rows.is_empty() {
        bail!("polynomial JSON has no coefficient rows");
    }
    let dim = rows[0].as_array().map(Vec::len).unwrap_or(0);
    let mut flat = Vec::with_capacity(rows.len() * dim);
    for row in rows {
        let row = row.as_array().context("coefficient row is not an array")?;
        if row.len() != dim {
            bail!("ragged coefficient rows: {} vs {}", row.len(), dim);
        }
        for entry in row {
            let pair = entry.as_array().filter(|p| p.len() == 2).context("entry is not [re, im]")?;
            let re = pair[0].as_f64().context("re is not a number")?;
            let im = pair[1].as_f64().context("im is not a number")?;
            flat.push(Complex64::new(re, im));
        }
    }
    let coeffs = CMatrix::from_row_slice(rows.len(), dim, &flat);
    WaringPolynomial::new(degree, coeffs).map_err(|e| anyhow::anyhow!("invalid polynomial: {e}"))
}

/// Encodes a system as an array of polynomial encodings.
pub fn system_to_json(system: &WaringSystem) -> Value {
    Value::Array(system.polys().iter().map(poly_to_json).collect())
}

/// Decodes [`system_to_json`]'s encoding.
pub fn system_from_json(v: &Value) -> Result<WaringSystem> {
    let arr = v.as_array().context("system JSON must be an array of polynomials")?;
    let polys = arr.iter().map(poly_from_json).collect::<Result<Vec<_>>>()?;
    WaringSystem::new(polys).map_err(|e| anyhow::anyhow!("invalid system: {e}"))
}

/// Caveats echoed into every sidecar so downstream consumers see the
/// methodological choices without reading the code.
pub fn standard_caveats() -> Value {
    json!([
        "roots are sampled by random-line intersection; the induced density may deviate from the uniform measure on the zero set",
        "heuristic-vs-certified agreement uses the projective endpoint distance |1 - |<z_a, z_b>|| < 1e-10",
        "aggregate statistics cover converged trials only; convergence_rate reports the fraction",
        "wall-clock fields live only in this sidecar so CSV bytes are reproducible"
    ])
}
