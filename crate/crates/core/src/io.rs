//! CSV and JSON-lines serialization.
//!
//! Radial functions:
//! ```text
//! n,r_max,t_max,n_r,n_t,kind,window_r_start,window_r_end,window_t_start,window_t_end
//! 1,2,1,200,200,gauss_legendre,0,200,0,200
//! i_r,i_t,re,im
//! 0,0,0.99,0
//! ```
//! Fan functions:
//! ```text
//! n,j_max,lambda_min,lambda_max,lambda_count,rule,valid_j,valid_lambda_margin
//! 1,8,0.1,8,80,rectangle,8,0
//! sign,j,i_lambda,re,im
//! 1,0,0,0.5,0
//! ```
//! Floats use the shortest representation that parses back to the same value.

use std::io::{Read, Write};
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fan::{FanFunction, FanGrid, LambdaRule, Sign};
use crate::radial::{RadialFunction, RadialGrid, Window};

const RADIAL_HEADER: [&str; 10] = [
    "n",
    "r_max",
    "t_max",
    "n_r",
    "n_t",
    "kind",
    "window_r_start",
    "window_r_end",
    "window_t_start",
    "window_t_end",
];
const FAN_HEADER: [&str; 8] = [
    "n",
    "j_max",
    "lambda_min",
    "lambda_max",
    "lambda_count",
    "rule",
    "valid_j",
    "valid_lambda_margin",
];

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().flexible(true).from_writer(w)
}

fn reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().flexible(true).has_headers(false).from_reader(r)
}

pub fn write_radial_csv<W: Write>(f: &RadialFunction, out: W) -> Result<()> {
    let g = f.grid();
    let w = f.window();
    let mut csv = writer(out);
    csv.write_record(RADIAL_HEADER)?;
    csv.write_record([
        g.n().to_string(),
        g.r_max().to_string(),
        g.t_max().to_string(),
        g.r_count().to_string(),
        g.t_count().to_string(),
        "gauss_legendre".to_string(),
        w.r.start.to_string(),
        w.r.end.to_string(),
        w.t.start.to_string(),
        w.t.end.to_string(),
    ])?;
    csv.write_record(["i_r", "i_t", "re", "im"])?;
    for i in 0..g.r_count() {
        for k in 0..g.t_count() {
            let v = f.get(i, k);
            csv.write_record([i.to_string(), k.to_string(), v.re.to_string(), v.im.to_string()])?;
        }
    }
    csv.flush()?;
    Ok(())
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, idx: usize, name: &str) -> Result<T> {
    rec.get(idx)
        .ok_or_else(|| Error::Parse(format!("missing field `{name}`")))?
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad value for `{name}`")))
}

fn expect_header(rec: Option<csv::StringRecord>, names: &[&str]) -> Result<()> {
    let rec = rec.ok_or_else(|| Error::Parse("unexpected end of input".into()))?;
    if rec.iter().map(str::trim).eq(names.iter().copied()) {
        Ok(())
    } else {
        Err(Error::Parse(format!("expected header {}", names.join(","))))
    }
}

fn complex(rec: &csv::StringRecord, at: usize) -> Result<Complex64> {
    Ok(Complex64::new(field(rec, at, "re")?, field(rec, at + 1, "im")?))
}

pub fn read_radial_csv<R: Read>(input: R) -> Result<RadialFunction> {
    let mut csv = reader(input);
    let mut records = csv.records();
    let mut next = || records.next().transpose().map_err(Error::from);
    expect_header(next()?, &RADIAL_HEADER)?;
    let meta = next()?.ok_or_else(|| Error::Parse("missing grid record".into()))?;
    let n: usize = field(&meta, 0, "n")?;
    let r_max: f64 = field(&meta, 1, "r_max")?;
    let t_max: f64 = field(&meta, 2, "t_max")?;
    let nr: usize = field(&meta, 3, "n_r")?;
    let nt: usize = field(&meta, 4, "n_t")?;
    let kind: String = field(&meta, 5, "kind")?;
    if kind != "gauss_legendre" {
        return Err(Error::Parse(format!("unknown grid kind `{kind}`")));
    }
    let window = Window {
        r: field(&meta, 6, "window_r_start")?..field(&meta, 7, "window_r_end")?,
        t: field(&meta, 8, "window_t_start")?..field(&meta, 9, "window_t_end")?,
    };
    let grid = Arc::new(RadialGrid::gauss_legendre(n, r_max, nr, t_max, nt)?);
    expect_header(next()?, &["i_r", "i_t", "re", "im"])?;
    let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
    let mut seen = vec![false; grid.len()];
    while let Some(rec) = next()? {
        let i: usize = field(&rec, 0, "i_r")?;
        let k: usize = field(&rec, 1, "i_t")?;
        if i >= nr || k >= nt {
            return Err(Error::Parse(format!("node ({i}, {k}) outside the grid")));
        }
        let idx = grid.index(i, k);
        values[idx] = complex(&rec, 2)?;
        seen[idx] = true;
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(Error::Parse(format!("no value for node ({}, {})", missing / nt, missing % nt)));
    }
    RadialFunction::with_window(grid, values, window)
}

fn rule_name(rule: LambdaRule) -> &'static str {
    match rule {
        LambdaRule::Trapezoid => "trapezoid",
        LambdaRule::Rectangle => "rectangle",
    }
}

pub fn write_fan_csv<W: Write>(f: &FanFunction, out: W) -> Result<()> {
    let g = f.grid();
    let mut csv = writer(out);
    csv.write_record(FAN_HEADER)?;
    csv.write_record([
        g.n().to_string(),
        g.j_max().to_string(),
        g.lambda_min().to_string(),
        g.lambda_max().to_string(),
        g.lambda_count().to_string(),
        rule_name(g.rule()).to_string(),
        f.valid_j().to_string(),
        f.valid_lambda_margin().to_string(),
    ])?;
    csv.write_record(["sign", "j", "i_lambda", "re", "im"])?;
    for s in Sign::BOTH {
        for j in 0..=g.j_max() {
            for i in 0..g.lambda_count() {
                let v = f.get(s, j, i);
                csv.write_record([
                    (s.factor() as i64).to_string(),
                    j.to_string(),
                    i.to_string(),
                    v.re.to_string(),
                    v.im.to_string(),
                ])?;
            }
        }
    }
    csv.flush()?;
    Ok(())
}

/// Rebuilds the fan grid from its header fields.
pub fn fan_grid_from_spec(
    n: usize,
    j_max: usize,
    lambda_min: f64,
    lambda_max: f64,
    count: usize,
    rule: LambdaRule,
) -> Result<FanGrid> {
    if rule == LambdaRule::Rectangle && count >= 2 && lambda_max == count as f64 * lambda_min {
        let g = FanGrid::lattice(n, j_max, lambda_min, count)?;
        if g.lambda_max() == lambda_max {
            return Ok(g);
        }
    }
    FanGrid::equispaced(n, j_max, lambda_min, lambda_max, count, rule)
}

pub fn read_fan_csv<R: Read>(input: R) -> Result<FanFunction> {
    let mut csv = reader(input);
    let mut records = csv.records();
    let mut next = || records.next().transpose().map_err(Error::from);
    expect_header(next()?, &FAN_HEADER)?;
    let meta = next()?.ok_or_else(|| Error::Parse("missing grid record".into()))?;
    let rule = match field::<String>(&meta, 5, "rule")?.as_str() {
        "trapezoid" => LambdaRule::Trapezoid,
        "rectangle" => LambdaRule::Rectangle,
        other => return Err(Error::Parse(format!("unknown λ rule `{other}`"))),
    };
    let grid = Arc::new(fan_grid_from_spec(
        field(&meta, 0, "n")?,
        field(&meta, 1, "j_max")?,
        field(&meta, 2, "lambda_min")?,
        field(&meta, 3, "lambda_max")?,
        field(&meta, 4, "lambda_count")?,
        rule,
    )?);
    let valid_j: usize = field(&meta, 6, "valid_j")?;
    let margin: usize = field(&meta, 7, "valid_lambda_margin")?;
    expect_header(next()?, &["sign", "j", "i_lambda", "re", "im"])?;
    let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
    let mut seen = vec![false; grid.len()];
    while let Some(rec) = next()? {
        let sign = Sign::from_factor(field(&rec, 0, "sign")?)?;
        let j: usize = field(&rec, 1, "j")?;
        let i: usize = field(&rec, 2, "i_lambda")?;
        if j > grid.j_max() || i >= grid.lambda_count() {
            return Err(Error::Parse(format!("node ({j}, {i}) outside the grid")));
        }
        let idx = grid.index(sign, j, i);
        values[idx] = complex(&rec, 3)?;
        seen[idx] = true;
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::Parse("fan table is missing nodes".into()));
    }
    FanFunction::with_window(grid, values, valid_j, margin)
}

/// Writes generic rows with a header (RFC 4180 quoting).
pub fn write_table<W: Write, S: Serialize>(rows: &[S], out: W) -> Result<()> {
    let mut csv = csv::Writer::from_writer(out);
    for row in rows {
        csv.serialize(row)?;
    }
    csv.flush()?;
    Ok(())
}

/// One JSON object per line.
pub fn write_json_lines<W: Write, S: Serialize>(records: &[S], mut out: W) -> Result<()> {
    for rec in records {
        serde_json::to_writer(&mut out, rec)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}
