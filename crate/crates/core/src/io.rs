//! JSON exchange format for tensors.
//!
//! ```json
//! { "m": 2, "n": 2, "format": "dense", "entries": [[[[...]]]] }
//! { "m": 2, "n": 2, "format": "coo",   "entries": [[1,1,2,2,-7.0], ...] }
//! ```
//!
//! Dense entries nest as `entries[i][j][k][l]`. COO rows are
//! `[i, j, k, l, value]` with 1-based indices; unlisted entries are zero and
//! every listed entry is closed under the partial symmetries before the
//! tensor is validated. Conflicting duplicates inside one symmetry orbit are
//! rejected.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::Tolerances;
use crate::tensor::{PsTensor, Validated};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("json parse error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("tensor error: {0}")]
    Tensor(#[from] crate::error::TensorError),
    #[error("coo index ({i},{j},{k},{l}) out of range for a {m}x{n}x{m}x{n} tensor")]
    IndexOutOfRange { i: usize, j: usize, k: usize, l: usize, m: usize, n: usize },
    #[error("conflicting coo entries in the symmetry orbit of ({i},{j},{k},{l}): {a} vs {b}")]
    ConflictingEntries { i: usize, j: usize, k: usize, l: usize, a: f64, b: f64 },
    #[error("dense entries must nest as [m][n][m][n]; found ragged level {level}")]
    RaggedDense { level: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TensorFormat {
    Dense,
    Coo,
}

#[derive(Serialize, Deserialize)]
struct TensorFile {
    m: usize,
    n: usize,
    format: TensorFormat,
    entries: serde_json::Value,
}

fn parse_dense(m: usize, n: usize, entries: &serde_json::Value) -> Result<Vec<f64>, IoError> {
    let level1 = entries.as_array().ok_or(IoError::RaggedDense { level: 1 })?;
    if level1.len() != m {
        return Err(IoError::RaggedDense { level: 1 });
    }
    let mut raw = Vec::with_capacity(m * n * m * n);
    for row_i in level1 {
        let level2 = row_i.as_array().ok_or(IoError::RaggedDense { level: 2 })?;
        if level2.len() != n {
            return Err(IoError::RaggedDense { level: 2 });
        }
        for row_j in level2 {
            let level3 = row_j.as_array().ok_or(IoError::RaggedDense { level: 3 })?;
            if level3.len() != m {
                return Err(IoError::RaggedDense { level: 3 });
            }
            for row_k in level3 {
                let level4 = row_k.as_array().ok_or(IoError::RaggedDense { level: 4 })?;
                if level4.len() != n {
                    return Err(IoError::RaggedDense { level: 4 });
                }
                for v in level4 {
                    raw.push(v.as_f64().ok_or(IoError::RaggedDense { level: 4 })?);
                }
            }
        }
    }
    Ok(raw)
}

fn parse_coo(m: usize, n: usize, entries: &serde_json::Value) -> Result<Vec<f64>, IoError> {
    let rows: Vec<(usize, usize, usize, usize, f64)> =
        serde_json::from_value(entries.clone())?;
    let mut raw = vec![0.0f64; m * n * m * n];
    let mut set = vec![false; m * n * m * n];
    let idx = |i: usize, j: usize, k: usize, l: usize| ((i * n + j) * m + k) * n + l;
    for (i1, j1, k1, l1, v) in rows {
        if i1 == 0 || j1 == 0 || k1 == 0 || l1 == 0 || i1 > m || k1 > m || j1 > n || l1 > n {
            return Err(IoError::IndexOutOfRange { i: i1, j: j1, k: k1, l: l1, m, n });
        }
        let (i, j, k, l) = (i1 - 1, j1 - 1, k1 - 1, l1 - 1);
        // close under the partial symmetry group
        for (a, b, c, d) in [(i, j, k, l), (k, j, i, l), (i, l, k, j), (k, l, i, j)] {
            let at = idx(a, b, c, d);
            if set[at] && raw[at] != v {
                return Err(IoError::ConflictingEntries {
                    i: i1,
                    j: j1,
                    k: k1,
                    l: l1,
                    a: raw[at],
                    b: v,
                });
            }
            raw[at] = v;
            set[at] = true;
        }
    }
    Ok(raw)
}

/// Parse a tensor from JSON text, applying symmetry closure (COO) and then
/// validation. `repair` symmetrizes instead of rejecting near-miss input.
pub fn tensor_from_json(
    text: &str,
    tol: &Tolerances<f64>,
    repair: bool,
) -> Result<Validated<f64>, IoError> {
    let file: TensorFile = serde_json::from_str(text)?;
    let raw = match file.format {
        TensorFormat::Dense => parse_dense(file.m, file.n, &file.entries)?,
        TensorFormat::Coo => parse_coo(file.m, file.n, &file.entries)?,
    };
    Ok(PsTensor::validate(file.m, file.n, raw, tol, repair)?)
}

/// Serialize a tensor to the dense JSON format.
pub fn tensor_to_json(t: &PsTensor<f64>) -> String {
    let (m, n) = (t.m(), t.n());
    let mut outer = Vec::with_capacity(m);
    for i in 0..m {
        let mut level_j = Vec::with_capacity(n);
        for j in 0..n {
            let mut level_k = Vec::with_capacity(m);
            for k in 0..m {
                let level_l: Vec<serde_json::Value> =
                    (0..n).map(|l| serde_json::json!(t.at(i, j, k, l))).collect();
                level_k.push(serde_json::Value::Array(level_l));
            }
            level_j.push(serde_json::Value::Array(level_k));
        }
        outer.push(serde_json::Value::Array(level_j));
    }
    serde_json::to_string_pretty(&serde_json::json!({
        "m": m,
        "n": n,
        "format": "dense",
        "entries": outer,
    }))
    .expect("serialization cannot fail")
}
