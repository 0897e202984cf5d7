use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::sparse::Csr;
use crate::spectra::fmt_num;

/// Rounds to twelve significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x.is_finite() && x != 0.0 {
        fmt_num(x).parse().unwrap_or(x)
    } else {
        x
    }
}

/// Shortest text of the rounded value, in exponent form when very small or large.
pub fn sig(x: f64) -> String {
    let r = round_sig(x);
    if r != 0.0 && r.is_finite() && !(1e-4..1e12).contains(&r.abs()) {
        format!("{r:e}")
    } else {
        format!("{r}")
    }
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n
                .as_f64()
                .map(round_sig)
                .and_then(serde_json::Number::from_f64)
            {
                *n = r;
            }
        }
        Value::Array(xs) => xs.iter_mut().for_each(round_value),
        Value::Object(m) => m.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Pretty JSON with every float rounded to twelve significant digits.
pub fn to_json<T: Serialize>(v: &T) -> Result<String> {
    let mut value = serde_json::to_value(v).map_err(|e| Error::Io(e.to_string()))?;
    round_value(&mut value);
    let mut s = serde_json::to_string_pretty(&value).map_err(|e| Error::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Collects written files under one output directory.
pub struct OutDir {
    pub root: PathBuf,
    pub written: Vec<PathBuf>,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).map_err(|e| Error::Io(format!("{}: {e}", root.display())))?;
        Ok(OutDir {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, contents: &[u8]) -> Result<()> {
        let path = self.root.join(name);
        let mut f =
            fs::File::create(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        f.write_all(contents)?;
        self.written.push(path);
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, v: &T) -> Result<()> {
        self.write(name, to_json(v)?.as_bytes())
    }
}

/// Coordinate format: a `rows cols nnz` line, then `row col value` per entry, 0-based.
pub fn coo_text(a: &Csr) -> String {
    let mut s = format!("{} {} {}\n", a.rows(), a.cols(), a.nnz());
    for (i, row) in a.outer_iterator().enumerate() {
        for (j, v) in row.iter() {
            s.push_str(&format!("{i} {j} {}\n", fmt_num(*v)));
        }
    }
    s
}

/// A diagonal as coordinate text.
pub fn coo_diag(d: &[f64]) -> String {
    let mut s = format!("{0} {0} {0}\n", d.len());
    for (i, v) in d.iter().enumerate() {
        s.push_str(&format!("{i} {i} {}\n", fmt_num(*v)));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::from_triplets;

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round_sig(0.1 + 0.2), 0.3);
        assert_eq!(sig(2.0 / 3.0), "0.666666666667");
        assert_eq!(round_sig(f64::INFINITY), f64::INFINITY);
        assert_eq!(sig(-9.801707767801234e-15), "-9.8017077678e-15");
        let j = to_json(&serde_json::json!({"x": [1.0 / 3.0, 7], "y": null})).unwrap();
        assert!(j.contains("0.333333333333") && j.contains("7"));
    }

    #[test]
    fn coo_layout() {
        let a = from_triplets(2, 2, vec![(0, 1, 2.0), (1, 0, -1.0)]);
        let t = coo_text(&a);
        assert_eq!(t.lines().next(), Some("2 2 2"));
        assert_eq!(t.lines().nth(1), Some("0 1 2.00000000000e0"));
        assert_eq!(coo_diag(&[3.0]).lines().count(), 2);
    }
}
