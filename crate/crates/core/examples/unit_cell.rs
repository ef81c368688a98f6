//! Elastic energy of a single unit cell against its width l and height h.
//! The slopes approach 2m+1 and −(2m−1).

use twowell::construction2d::{cell_energy, unit_cell, UnitCellParams};

fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

fn main() -> twowell::Result<()> {
    let lambda = 0.5;
    for m in 1..=4 {
        let ls: Vec<f64> = (4..=8).map(|k| 2f64.powi(-k)).collect();
        let mut el = Vec::new();
        for &l in &ls {
            el.push(
                cell_energy(
                    &unit_cell(UnitCellParams::new(l, 0.5, lambda, m, 0.1)?)?,
                    64,
                )?
                .e_el
                .log10(),
            );
        }
        let lx: Vec<f64> = ls.iter().map(|l| l.log10()).collect();
        let hs = [0.25, 0.35, 0.5, 0.7, 1.0];
        let mut elh = Vec::new();
        for &h in &hs {
            elh.push(
                cell_energy(
                    &unit_cell(UnitCellParams::new(2f64.powi(-6), h, lambda, m, 0.1)?)?,
                    64,
                )?
                .e_el
                .log10(),
            );
        }
        let hx: Vec<f64> = hs.iter().map(|h| f64::log10(*h)).collect();
        println!(
            "m={m}: slope in l {:.4} (2m+1 = {}), slope in h {:.4} (-(2m-1) = {})",
            slope(&lx, &el),
            2 * m + 1,
            slope(&hx, &elh),
            -(2 * m as i64 - 1)
        );
    }
    Ok(())
}
