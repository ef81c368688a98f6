//! Vanishing order of the Fourier multiplier at its zero set, for every
//! basis well with m ≤ 3 in two dimensions.

use twowell::multiplier::{
    curl_basis_well, div_basis_well, predicted_order, vanishing_order_estimate, zero_set,
    MultiplierPoly,
};
use twowell::operators::HomogeneousOperator;
use twowell::symtensor::MultiIndex;

fn main() -> twowell::Result<()> {
    println!(
        "{:>3} {:>6} {:>6} {:>10} {:>10} {:>8}",
        "m", "l", "op", "estimated", "predicted", "decay"
    );
    for m in 1..=3 {
        for l1 in (0..=m).rev() {
            let l = MultiIndex::new(vec![l1, m - l1]);
            for (name, op, w) in [
                (
                    "curl",
                    HomogeneousOperator::saint_venant(2, m),
                    curl_basis_well(&l),
                ),
                (
                    "div",
                    HomogeneousOperator::divergence(2, m, 1),
                    div_basis_well(&[1.0], &l),
                ),
            ] {
                let v = zero_set(&op, &w)?;
                let p = MultiplierPoly::new(op, w)?;
                let rep = vanishing_order_estimate(&p, &v, 2 * m + 2)?;
                println!(
                    "{m:>3} {:>6} {name:>6} {:>10} {:>10} {:>8.2}",
                    format!("{:?}", l.exponents()),
                    rep.order,
                    predicted_order(&op, &l),
                    rep.min_decay_factor_from(2)
                );
            }
        }
    }
    Ok(())
}
