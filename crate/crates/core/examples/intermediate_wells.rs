//! Wells with both exponents positive come from lifting a lower-order
//! construction; divergence wells from a component transform.

use twowell::construction2d::{
    construction_energy, divergence_alpha, lift_coefficient, well_construction, FieldKind,
};

fn main() -> twowell::Result<()> {
    let m = 3;
    for l in 2..=m {
        let c: Vec<String> = (m - l..=m)
            .map(|k| format!("{:+.4}", lift_coefficient(m, l, k)))
            .collect();
        println!("lift m={m} l={l}: {}", c.join(" "));
    }
    let alpha: Vec<String> = (0..=2)
        .map(|j| format!("{:+.3}", divergence_alpha(2, j)))
        .collect();
    println!("divergence coefficients m=2: {}", alpha.join(" "));

    for (l1, l2, kind) in [
        (2, 1, FieldKind::Curl),
        (1, 2, FieldKind::Curl),
        (2, 0, FieldKind::Divergence),
        (1, 1, FieldKind::Divergence),
    ] {
        let c = well_construction(l1, l2, 8, 0.5, kind)?;
        let e = construction_energy(&c, 1e-4, 48)?;
        println!(
            "{kind:?} ({l1},{l2}): base order {}, swapped {}, well {:?}, E_eps {:.4e}",
            c.base_order(),
            c.is_swapped(),
            c.well_components(),
            e.e_eps
        );
    }
    Ok(())
}
