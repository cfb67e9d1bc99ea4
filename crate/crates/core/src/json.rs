//! Text encodings of matrices.
//!
//! Matrix JSON: `{"field":"R"|"C"|"H","rows":n,"cols":m,"data":[[…],…]}` where
//! an entry is a number over R, `[re, im]` over C and `[a, b, c, d]` over H.
//! Diagonal shorthand: `diag:1,2,3` (real entries).

use serde_json::Value;

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::scalar::{Field, Quat};

/// Fixed 17-significant-digit rendering, valid as a JSON number.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        // normalize -0
        return format!("{:.16e}", 0.0);
    }
    format!("{x:.16e}")
}

pub fn parse_matrix_json(text: &str) -> Result<Mat> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(format!("matrix JSON: {e}")))?;
    matrix_from_value(&v)
}

pub fn matrix_from_value(v: &Value) -> Result<Mat> {
    let obj = v.as_object().ok_or_else(|| Error::Parse("matrix must be a JSON object".into()))?;
    for key in obj.keys() {
        if !matches!(key.as_str(), "field" | "rows" | "cols" | "data") {
            return Err(Error::Parse(format!("unexpected key `{key}` in matrix")));
        }
    }
    let field: Field = obj
        .get("field")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::Parse("missing string `field`".into()))?
        .parse()
        .map_err(Error::Parse)?;
    let dim = |key: &str| -> Result<usize> {
        let n = obj
            .get(key)
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse(format!("missing positive integer `{key}`")))?;
        if n == 0 || n > 4096 {
            return Err(Error::Parse(format!("`{key}` = {n} out of range 1..=4096")));
        }
        Ok(n as usize)
    };
    let rows = dim("rows")?;
    let cols = dim("cols")?;
    let data = obj
        .get("data")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("missing array `data`".into()))?;
    if data.len() != rows {
        return Err(Error::Parse(format!("`data` has {} rows, expected {rows}", data.len())));
    }
    let mut entries = Vec::with_capacity(rows * cols);
    for (i, row) in data.iter().enumerate() {
        let row = row.as_array().ok_or_else(|| Error::Parse(format!("row {i} is not an array")))?;
        if row.len() != cols {
            return Err(Error::Parse(format!("row {i} has {} entries, expected {cols}", row.len())));
        }
        for entry in row {
            entries.push(scalar_from_value(entry, field)?);
        }
    }
    Mat::from_entries(field, rows, cols, entries)
}

fn number(v: &Value) -> Result<f64> {
    let x = v.as_f64().ok_or_else(|| Error::Parse(format!("expected a number, found {v}")))?;
    if !x.is_finite() {
        return Err(Error::Parse("non-finite number".into()));
    }
    Ok(x)
}

fn scalar_from_value(v: &Value, field: Field) -> Result<Quat> {
    match field {
        Field::R => Ok(Quat::real(number(v)?)),
        Field::C | Field::H => {
            let parts = v
                .as_array()
                .ok_or_else(|| Error::Parse(format!("{field} entry must be an array, found {v}")))?;
            if parts.len() != field.dim() {
                return Err(Error::Parse(format!(
                    "{field} entry needs {} components, found {}",
                    field.dim(),
                    parts.len()
                )));
            }
            let mut c = [0.0; 4];
            for (slot, p) in c.iter_mut().zip(parts) {
                *slot = number(p)?;
            }
            Ok(Quat::from_array(c))
        }
    }
}

pub fn matrix_to_json(m: &Mat) -> String {
    let mut out = format!(r#"{{"field":"{}","rows":{},"cols":{},"data":["#, m.field(), m.rows(), m.cols());
    for i in 0..m.rows() {
        if i > 0 {
            out.push(',');
        }
        out.push('[');
        for j in 0..m.cols() {
            if j > 0 {
                out.push(',');
            }
            let q = m[(i, j)];
            match m.field() {
                Field::R => out.push_str(&fmt_num(q.re)),
                Field::C => out.push_str(&format!("[{},{}]", fmt_num(q.re), fmt_num(q.i))),
                Field::H => out.push_str(&format!(
                    "[{},{},{},{}]",
                    fmt_num(q.re),
                    fmt_num(q.i),
                    fmt_num(q.j),
                    fmt_num(q.k)
                )),
            }
        }
        out.push(']');
    }
    out.push_str("]}");
    out
}

/// Parses `diag:a1,a2,…` into a real diagonal matrix.
pub fn parse_diag_shorthand(text: &str) -> Result<Mat> {
    let body = text
        .trim()
        .strip_prefix("diag:")
        .ok_or_else(|| Error::Parse("diagonal shorthand must start with `diag:`".into()))?;
    if body.trim().is_empty() {
        return Err(Error::Parse("diagonal shorthand has no entries".into()));
    }
    let mut values = Vec::new();
    for part in body.split(',') {
        let x: f64 = part
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad diagonal entry `{}`", part.trim())))?;
        if !x.is_finite() {
            return Err(Error::Parse(format!("non-finite diagonal entry `{}`", part.trim())));
        }
        values.push(x);
    }
    if values.len() > 4096 {
        return Err(Error::Parse("diagonal shorthand too long".into()));
    }
    Ok(Mat::diag_real(Field::R, &values))
}

/// Accepts either matrix JSON or the diagonal shorthand.
pub fn parse_matrix_arg(text: &str) -> Result<Mat> {
    if text.trim_start().starts_with("diag:") {
        parse_diag_shorthand(text)
    } else {
        parse_matrix_json(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_all_fields() {
        for field in [Field::R, Field::C, Field::H] {
            let m = Mat::from_fn(field, 2, 3, |i, j| {
                let s = (i * 3 + j) as f64 * 0.37 - 1.0;
                let q = Quat::new(s, s * s, -s / 3.0, 1.0 / (1.0 + s * s));
                match field {
                    Field::R => Quat::real(q.re),
                    Field::C => Quat::complex(q.re, q.i),
                    Field::H => q,
                }
            })
            .promote(field);
            let back = parse_matrix_json(&matrix_to_json(&m)).unwrap();
            assert_eq!(back, m);
        }
    }

    #[test]
    fn rejects_malformed() {
        for bad in [
            "",
            "[]",
            r#"{"field":"Q","rows":1,"cols":1,"data":[[1]]}"#,
            r#"{"field":"R","rows":1,"cols":1,"data":[[1,2]]}"#,
            r#"{"field":"C","rows":1,"cols":1,"data":[[1]]}"#,
            r#"{"field":"R","rows":0,"cols":1,"data":[]}"#,
            r#"{"field":"R","rows":1,"cols":1,"data":[["x"]]}"#,
            r#"{"field":"R","rows":1,"cols":1,"data":[[1e999]]}"#,
        ] {
            assert!(matches!(parse_matrix_json(bad), Err(Error::Parse(_))), "{bad}");
        }
    }

    #[test]
    fn diag_shorthand() {
        let m = parse_matrix_arg("diag:1,2,3").unwrap();
        assert_eq!(m, Mat::diag_real(Field::R, &[1.0, 2.0, 3.0]));
        assert!(parse_diag_shorthand("diag:").is_err());
        assert!(parse_diag_shorthand("diag:1,,2").is_err());
        assert!(parse_diag_shorthand("diag:nan").is_err());
    }

    #[test]
    fn number_format_is_fixed_width_mantissa() {
        assert_eq!(fmt_num(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_num(-0.0), fmt_num(0.0));
        let v: f64 = serde_json::from_str(&fmt_num(0.1)).unwrap();
        assert_eq!(v, 0.1);
    }
}
