//! Sweep, CSV round trip and a log–log plot with the reference slope.

use std::fs::File;
use std::path::PathBuf;

use twowell::experiment::{emit_plot, fit_rows, read_rows, sweep_upper, write_rows, SweepConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| ".".into()));
    let cfg = SweepConfig::parse("l = 1,0\neps_points = 12\n")?;
    let csv = dir.join("upper_m1.csv");
    write_rows(&sweep_upper(&cfg)?, File::create(&csv)?)?;
    let rows = read_rows(File::open(&csv)?)?;
    let fit = fit_rows(&rows, Some(cfg.order()))?;
    for ext in ["svg", "png"] {
        let p = dir.join(format!("upper_m1.{ext}"));
        emit_plot(&rows, &fit, &p)?;
        println!("wrote {}", p.display());
    }
    Ok(())
}
