//! Symmetric tensors stored by multi-index class: products, norms and the
//! basis wells e₁^{⊙l₁} ⊙ e₂^{⊙l₂}.

use twowell::symtensor::{class_count, sym_product, MultiIndex, SymTensor};

fn main() -> twowell::Result<()> {
    for (d, m) in [(2, 3), (3, 2), (3, 4)] {
        println!(
            "Sym^{m}(R^{d}): {} independent components",
            class_count(d, m)
        );
    }

    // e₁ ⊙ e₁ ⊙ e₂ as a product of vectors and as a basis element.
    let e1 = SymTensor::unit(2, 0);
    let e2 = SymTensor::unit(2, 1);
    let prod = sym_product(&[e1.clone(), e1, e2])?;
    let basis = SymTensor::basis(&MultiIndex::new(vec![2, 1]));
    println!("e1⊙e1⊙e2 = {:?}", prod.components());
    println!("basis(2,1) = {:?}", basis.components());
    println!("|M|² = {:.6} (multiplicity-weighted)", prod.norm_sq());

    // The full tensor has 2³ entries; symmetrizing it gives back the class form.
    let full = prod.embed();
    println!(
        "full entries {}, |full|² = {:.6}",
        full.data().len(),
        full.norm_sq()
    );
    println!("round trip max diff {:.1e}", {
        let back = full.symmetrize();
        back.components()
            .iter()
            .zip(prod.components())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    });

    let a = MultiIndex::new(vec![2, 1, 1]);
    println!(
        "{a:?}: l! = {}, multinomial = {}, ξ^l at (1,2,3) = {}",
        a.factorial(),
        a.multinomial(),
        a.monomial(&[1.0, 2.0, 3.0])
    );
    Ok(())
}
