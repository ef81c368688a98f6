//! Assembles a branching construction, reports its energy and discrete
//! residual, and writes its interface curves as an SVG figure.

use std::path::PathBuf;

use twowell::construction2d::{construction_energy, well_construction, FieldKind};
use twowell::experiment::emit_geometry_plot;

fn main() -> twowell::Result<()> {
    let out = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "branching.svg".into()),
    );
    let c = well_construction(2, 0, 4, 0.5, FieldKind::Curl)?;
    let b = c.branching_layout().expect("branching layout");
    println!("θ = {:.4}, j0 = {}", b.params().theta, b.j0());
    for g in b.generations() {
        println!(
            "  generation {:>2}: y0 {:.5} count {:>6}",
            g.index, g.y0, g.count
        );
    }
    let e = construction_energy(&c, 1e-4, 64)?;
    println!(
        "E_el {:.4e}, E_surf {:.4}, E_eps {:.4e}",
        e.e_el, e.e_surf, e.e_eps
    );

    for n in [256, 512] {
        let r = c.residual(n)?;
        println!(
            "residual on {n}²: max {:.3e}, relative {:.3e} over {} points",
            r.max_abs, r.relative, r.points
        );
    }

    emit_geometry_plot(&c.polylines(48, 2048), &out)?;
    println!("wrote {}", out.display());
    Ok(())
}
