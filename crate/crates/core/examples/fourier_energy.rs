//! Fourier-side energy of laminates and checkerboards, with the
//! frequency-splitting and slicing inequalities checked on each field.

use twowell::fourier_bound::{key_estimate_report, slicing_check, spectral_energy, PhaseField};
use twowell::multiplier::{curl_basis_well, zero_set};
use twowell::operators::HomogeneousOperator;
use twowell::symtensor::MultiIndex;

fn main() -> twowell::Result<()> {
    let (m, order) = (2, 2);
    let op = HomogeneousOperator::saint_venant(2, m);
    let v = zero_set(&op, &curl_basis_well(&MultiIndex::new(vec![2, 0])))?;

    println!("laminates normal to e1 (compatible) and e2:");
    for period in [0.5, 0.25, 0.125] {
        for axis in 0..2 {
            let f = PhaseField::laminate(2, 256, period, axis, 0.5)?;
            let e = spectral_energy(&f, &v, order, 1e-3)?;
            println!(
                "  period {period:<6} axis {axis}: E_el {:.3e}  E_surf {:.3e}",
                e.e_el, e.e_surf
            );
        }
    }

    println!("random checkerboards:");
    for seed in 0..3 {
        let f = PhaseField::checkerboard(2, 256, 8, 0.5, seed)?;
        let e = spectral_energy(&f, &v, order, 1e-3)?;
        let k = key_estimate_report(&f, &v, order, 16.0, 0.5)?;
        let s = slicing_check(&f, 1)?;
        println!(
            "  seed {seed}: E_eps {:.3e}, (i) {} (ii) {}, eta*high {:.3e}, slicing {}",
            e.e_eps,
            k.part_i.holds(),
            k.part_ii.holds(),
            k.eta_high_mass,
            s.pass
        );
    }
    Ok(())
}
