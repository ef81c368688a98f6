//! CSV rows and polyline files.

use std::io::{BufRead, BufReader, Read, Write};

use crate::error::{Error, Result};

use super::sweep::SweepRow;

pub const CSV_HEADER: [&str; 6] = ["epsilon", "N", "E_el", "E_surf", "E_total", "flag"];

fn csv_err(e: csv::Error) -> Error {
    Error::Format(format!("csv: {e}"))
}

/// Floats carry 17 significant digits.
pub fn write_rows(rows: &[SweepRow], w: impl Write) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in rows {
        out.write_record([
            format!("{:.16e}", r.epsilon),
            r.n.to_string(),
            format!("{:.16e}", r.e_el),
            format!("{:.16e}", r.e_surf),
            format!("{:.16e}", r.e_total),
            (r.flag as u8).to_string(),
        ])
        .map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_rows(r: impl Read) -> Result<Vec<SweepRow>> {
    let mut rdr = csv::Reader::from_reader(r);
    let header = rdr.headers().map_err(csv_err)?.clone();
    if header.iter().collect::<Vec<_>>() != CSV_HEADER {
        return Err(Error::Format(format!(
            "unexpected CSV header: {:?}",
            header.iter().collect::<Vec<_>>()
        )));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        let f = |i: usize| -> Result<f64> {
            rec[i]
                .trim()
                .parse()
                .map_err(|_| Error::Format(format!("bad number '{}'", &rec[i])))
        };
        rows.push(SweepRow {
            epsilon: f(0)?,
            n: rec[1]
                .trim()
                .parse()
                .map_err(|_| Error::Format(format!("bad N '{}'", &rec[1])))?,
            e_el: f(2)?,
            e_surf: f(3)?,
            e_total: f(4)?,
            flag: matches!(rec[5].trim(), "1" | "true"),
        });
    }
    Ok(rows)
}

/// One `x y` pair per line; curves are separated by blank lines.
pub fn write_polylines(curves: &[Vec<(f64, f64)>], mut w: impl Write) -> Result<()> {
    for (i, c) in curves.iter().enumerate() {
        if i > 0 {
            writeln!(w)?;
        }
        for (x, y) in c {
            writeln!(w, "{x:.12e} {y:.12e}")?;
        }
    }
    Ok(())
}

pub fn read_polylines(r: impl Read) -> Result<Vec<Vec<(f64, f64)>>> {
    let mut curves = Vec::new();
    let mut cur = Vec::new();
    for line in BufReader::new(r).lines() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            if !cur.is_empty() {
                curves.push(std::mem::take(&mut cur));
            }
            continue;
        }
        if t.starts_with('#') {
            continue;
        }
        let mut it = t.split_whitespace().map(|s| s.parse::<f64>());
        match (it.next(), it.next(), it.next()) {
            (Some(Ok(x)), Some(Ok(y)), None) => cur.push((x, y)),
            _ => return Err(Error::Format(format!("bad polyline line '{t}'"))),
        }
    }
    if !cur.is_empty() {
        curves.push(cur);
    }
    Ok(curves)
}
