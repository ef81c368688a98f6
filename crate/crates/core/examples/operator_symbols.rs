//! Symbols of the Saint-Venant and divergence operators, their kernels and
//! the wave-cone classification of a well difference.

use twowell::multiplier::{curl_basis_well, div_basis_well};
use twowell::operators::{kernel_basis, wave_cone_check, HomogeneousOperator};
use twowell::symtensor::{binomial, MultiIndex};

fn main() -> twowell::Result<()> {
    let xi = [0.6, 0.8, 0.0];
    for m in 1..=3 {
        let sv = HomogeneousOperator::saint_venant(3, m);
        let div = HomogeneousOperator::divergence(3, m, 2);
        let ks = kernel_basis(&sv, &xi, 1e-10)?.len();
        let kd = kernel_basis(&div, &xi, 1e-10)?.len();
        println!(
            "m={m}: dim ker curl {ks} (expected {}), dim ker div {kd} (expected {})",
            binomial(3 + m - 2, m - 1),
            2.0 * binomial(3 + m - 1, m) - 2.0
        );
    }

    let l = MultiIndex::new(vec![2, 0]);
    let sv = HomogeneousOperator::saint_venant(2, 2);
    let rep = wave_cone_check(&sv, &curl_basis_well(&l))?;
    println!(
        "curl, e1⊙e1: {:?}, best direction {:?}",
        rep.class, rep.best_direction
    );
    let div = HomogeneousOperator::divergence(2, 2, 1);
    let rep = wave_cone_check(&div, &div_basis_well(&[1.0], &l))?;
    println!(
        "div, e1⊙e1: {:?} (sampling only: {})",
        rep.class, rep.sampling_only
    );
    Ok(())
}
