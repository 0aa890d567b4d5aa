//! Matrix files, trajectory CSV and number lists.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::HermitianMatrix;

/// `{"n": 3, "entries_re": [[...]], "entries_im": [[...]]}`; a missing
/// `entries_im` means a real symmetric matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub n: usize,
    pub entries_re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entries_im: Option<Vec<Vec<f64>>>,
}

impl MatrixFile {
    pub fn from_matrix(h: &HermitianMatrix) -> Self {
        let n = h.dim();
        let grid = |f: &dyn Fn(Complex64) -> f64| -> Vec<Vec<f64>> {
            (0..n).map(|i| (0..n).map(|j| f(h.get(i, j))).collect()).collect()
        };
        Self { n, entries_re: grid(&|z| z.re), entries_im: if h.is_real() { None } else { Some(grid(&|z| z.im)) } }
    }

    pub fn to_matrix(&self) -> Result<HermitianMatrix> {
        let check = |name: &str, g: &[Vec<f64>]| -> Result<()> {
            if g.len() != self.n {
                return Err(Error::Parse(format!("{name} has {} rows, expected n = {}", g.len(), self.n)));
            }
            Ok(())
        };
        check("entries_re", &self.entries_re)?;
        if let Some(im) = &self.entries_im {
            check("entries_im", im)?;
            for (row, (r, i)) in self.entries_re.iter().zip(im).enumerate() {
                if r.len() != i.len() {
                    return Err(Error::Parse(format!(
                        "entries_im row {row} has {} entries, entries_re has {}",
                        i.len(),
                        r.len()
                    )));
                }
            }
        }
        let grid: Vec<Vec<Complex64>> = self
            .entries_re
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, &re)| {
                        let im = self.entries_im.as_ref().map_or(0.0, |m| m[i][j]);
                        Complex64::new(re, im)
                    })
                    .collect()
            })
            .collect();
        HermitianMatrix::validate(&grid)
    }
}

pub fn parse_matrix_file(text: &str) -> Result<HermitianMatrix> {
    let file: MatrixFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    file.to_matrix()
}

pub fn matrix_file_json(h: &HermitianMatrix) -> String {
    let mut s = serde_json::to_string_pretty(&MatrixFile::from_matrix(h)).expect("plain data serializes");
    s.push('\n');
    s
}

/// Shortest round-trip decimal.
pub fn format_f64(x: f64) -> String {
    let mut buf = ryu::Buffer::new();
    let s = buf.format(x);
    s.strip_suffix(".0").unwrap_or(s).to_string()
}

pub fn csv_header(n: usize, with_phases: bool) -> String {
    let mut cols = vec!["s".to_string()];
    for i in 1..=n {
        for j in i..=n {
            cols.push(format!("H{i}{j}_re"));
            cols.push(format!("H{i}{j}_im"));
        }
    }
    if with_phases {
        cols.extend(["phi_b", "phi_c", "phi_g"].map(String::from));
    }
    cols.join(",")
}

/// One CSV row per sample. `phases`, when given, must match `samples`.
pub fn write_csv(samples: &[(f64, HermitianMatrix)], phases: Option<&[(f64, f64, f64)]>) -> Result<String> {
    let n = samples.first().map_or(0, |(_, h)| h.dim());
    if let Some(p) = phases {
        if p.len() != samples.len() {
            return Err(Error::InvalidArgument("phase series length differs from samples".into()));
        }
    }
    let mut out = csv_header(n, phases.is_some());
    out.push('\n');
    for (k, (s, h)) in samples.iter().enumerate() {
        if h.dim() != n {
            return Err(Error::DimensionUnsupported { expected: n, got: h.dim() });
        }
        out.push_str(&format_f64(*s));
        for i in 0..n {
            for j in i..n {
                let z = h.get(i, j);
                let _ = write!(out, ",{},{}", format_f64(z.re), format_f64(z.im));
            }
        }
        if let Some(p) = phases {
            let (a, b, c) = p[k];
            let _ = write!(out, ",{},{},{}", format_f64(a), format_f64(b), format_f64(c));
        }
        out.push('\n');
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvTrajectory {
    pub n: usize,
    pub samples: Vec<(f64, HermitianMatrix)>,
    pub phases: Option<Vec<(f64, f64, f64)>>,
}

pub fn parse_csv(text: &str) -> Result<CsvTrajectory> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Parse("empty CSV".into()))?;
    let cols: Vec<&str> = header.split(',').collect();
    let with_phases = cols.ends_with(&["phi_b", "phi_c", "phi_g"]);
    let entries = cols.len() - 1 - if with_phases { 3 } else { 0 };
    // n(n+1) entry columns for an n×n matrix.
    let n = (1..=64)
        .find(|n| n * (n + 1) == entries)
        .ok_or_else(|| Error::Parse(format!("header has {} columns, which matches no matrix size", cols.len())))?;
    if header != csv_header(n, with_phases) {
        return Err(Error::Parse(format!("unexpected header for n = {n}")));
    }
    let mut samples = Vec::new();
    let mut phases = with_phases.then(Vec::new);
    for (line_no, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let values = line
            .split(',')
            .map(|t| t.parse::<f64>().map_err(|e| Error::Parse(format!("line {}: {t:?}: {e}", line_no + 2))))
            .collect::<Result<Vec<f64>>>()?;
        if values.len() != cols.len() {
            return Err(Error::Parse(format!(
                "line {}: {} fields, expected {}",
                line_no + 2,
                values.len(),
                cols.len()
            )));
        }
        let mut it = values[1..].chunks(2);
        let mut upper = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in i..n {
                let c = it.next().expect("column count checked");
                upper[i * n + j] = Complex64::new(c[0], c[1]);
            }
        }
        let h = HermitianMatrix::validate(
            &(0..n)
                .map(|i| (0..n).map(|j| if i <= j { upper[i * n + j] } else { upper[j * n + i].conj() }).collect())
                .collect::<Vec<_>>(),
        )?;
        samples.push((values[0], h));
        if let Some(p) = phases.as_mut() {
            let t = &values[values.len() - 3..];
            p.push((t[0], t[1], t[2]));
        }
    }
    Ok(CsvTrajectory { n, samples, phases })
}

/// Comma- or whitespace-separated reals; `a/b` fractions are accepted.
pub fn parse_real_list(text: &str) -> Result<Vec<f64>> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            let value = match t.split_once('/') {
                Some((a, b)) => parse_real(a)? / parse_real(b)?,
                None => parse_real(t)?,
            };
            if value.is_finite() {
                Ok(value)
            } else {
                Err(Error::Parse(format!("{t:?} is not a finite number")))
            }
        })
        .collect()
}

fn parse_real(t: &str) -> Result<f64> {
    t.trim().parse::<f64>().map_err(|e| Error::Parse(format!("{t:?}: {e}")))
}
