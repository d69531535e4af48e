//! CSV and JSON export. Output is deterministic: floats use Rust's shortest
//! round-trip formatting and JSON keys keep declaration order.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::ScalarField;
use crate::hyperbolic::HyperbolicProfile;
use crate::radial::{RadialProfile, TransformedCurve};

fn csv<const N: usize>(header: [&str; N], rows: impl Iterator<Item = [f64; N]>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        for (c, v) in r.iter().enumerate() {
            if c > 0 {
                out.push(',');
            }
            write!(out, "{v}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// Columns s, x, u, z.
pub fn profile_csv(p: &RadialProfile) -> String {
    csv(["s", "x", "u", "z"], (0..p.len()).map(|i| [p.s[i], p.x[i], p.u[i], p.z[i]]))
}

/// Columns lambda, theta, z.
pub fn transformed_csv(c: &TransformedCurve) -> String {
    csv(["lambda", "theta", "z"], (0..c.lambda.len()).map(|i| [c.lambda[i], c.theta[i], c.z[i]]))
}

/// Columns x, u, z and the first integral cosh(z)·u^{α+1}.
pub fn hyperbolic_csv(p: &HyperbolicProfile) -> String {
    let k = p.first_integral();
    csv(["x", "u", "z", "k"], (0..p.x.len()).map(|i| [p.x[i], p.u[i], p.z[i], k[i]]))
}

/// Columns x, y, value, valid (1/0), row-major.
pub fn field_csv(f: &ScalarField) -> String {
    let g = &f.grid;
    csv(
        ["x", "y", "value", "valid"],
        (0..g.len()).map(|k| {
            let (x, y) = g.point(k);
            [x, y, f.values[k], if f.valid[k] { 1.0 } else { 0.0 }]
        }),
    )
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::Io { path: path.display().to_string(), message: e.to_string() })
}
