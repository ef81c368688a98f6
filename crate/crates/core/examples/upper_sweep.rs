//! Optimizes N over an ε range and fits the upper-bound exponent.

use twowell::experiment::{fit_rows, sweep_upper, write_rows, SweepConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = SweepConfig::for_well(2, 0);
    let rows = sweep_upper(&cfg)?;
    write_rows(&rows, std::io::stdout().lock())?;
    let fit = fit_rows(&rows, Some(cfg.order()))?;
    eprintln!(
        "slope {:.4} vs {:.4}, R² {:.5}, windowed spread {:.3}",
        fit.slope,
        fit.theoretical().unwrap_or(f64::NAN),
        fit.r2,
        fit.spread()
    );
    Ok(())
}
