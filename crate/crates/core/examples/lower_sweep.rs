//! Fourier-side energy minimized over rasterized branching fields and
//! laminates, side by side with the upper sweep.

use twowell::experiment::{fit_rows, sweep_lower, sweep_upper, SweepConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut cfg = SweepConfig::for_well(1, 0);
    cfg.lower_grid = 256;
    let low = sweep_lower(&cfg)?;
    for c in low
        .candidates
        .iter()
        .filter(|c| c.label.starts_with("branching"))
    {
        println!("{:<20} E_el {:.3e} E_surf {:.2}", c.label, c.e_el, c.e_surf);
    }
    for s in &low.skipped {
        println!("skipped: {s}");
    }
    for r in low.rows.iter().step_by(4) {
        println!(
            "ε {:.2e}: N {:>3} E {:.4e}{}",
            r.epsilon,
            r.n,
            r.e_total,
            if r.flag { " (flag)" } else { "" }
        );
    }
    let lf = fit_rows(&low.rows, Some(low.order))?;
    let uf = fit_rows(&sweep_upper(&cfg)?, Some(low.order))?;
    println!(
        "slopes: upper {:.4}, lower {:.4}, reference {:.4}",
        uf.slope,
        lf.slope,
        lf.theoretical().unwrap_or(f64::NAN)
    );
    Ok(())
}
