use proptest::prelude::*;
use twowell::symtensor::*;

/// All permutations of 0..n, by recursion.
fn perms(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in perms(n - 1) {
        for k in 0..=p.len() {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push(q);
        }
    }
    out
}

/// Oracle: average of the entries over all r! reorderings of each tuple.
fn brute_symmetrize(t: &FullTensor) -> FullTensor {
    let (d, r) = (t.dim(), t.order());
    let ps = perms(r);
    let mut out = FullTensor::zeros(d, r);
    let tuples: Vec<Vec<usize>> = t.tuples().collect();
    for tup in &tuples {
        let s: f64 = ps
            .iter()
            .map(|p| t.get(&p.iter().map(|&k| tup[k]).collect::<Vec<_>>()))
            .sum();
        out.set(tup, s / ps.len() as f64);
    }
    out
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn random_sym(d: usize, m: usize, seed: &[f64]) -> SymTensor {
    let n = class_count(d, m);
    SymTensor::from_components(
        d,
        m,
        (0..n)
            .map(|i| seed[i % seed.len()] * (1.0 + i as f64).sin())
            .collect(),
    )
    .unwrap()
}

#[test]
fn class_counts() {
    assert_eq!(class_count(2, 4), 5);
    assert_eq!(class_count(3, 3), 10);
    for d in 1..=4 {
        for m in 0..=5 {
            assert_eq!(class_count(d, m) as f64, binomial(d + m - 1, m));
            // Σ_l multinomial(l) = d^m
            let s: f64 = MultiIndex::all(d, m).iter().map(|l| l.multinomial()).sum();
            assert_eq!(s, (d as f64).powi(m as i32));
        }
    }
}

#[test]
fn e1_e1_is_basis_20() {
    let p = sym_product(&[SymTensor::unit(2, 0), SymTensor::unit(2, 0)]).unwrap();
    assert_eq!(p.basis_coefficients(), vec![1.0, 0.0, 0.0]);
}

#[test]
fn e1e2_e1_matches_permutation_oracle() {
    let (e1, e2) = (SymTensor::unit(2, 0), SymTensor::unit(2, 1));
    let p = sym_product(&[sym_product(&[e1.clone(), e2.clone()]).unwrap(), e1.clone()]).unwrap();
    let l = MultiIndex::new(vec![2, 1]);
    assert!((p.basis_coefficient(&l) - 1.0).abs() < 1e-15);
    let raw = e1
        .embed()
        .tensor(&e2.embed())
        .unwrap()
        .tensor(&e1.embed())
        .unwrap();
    let oracle = brute_symmetrize(&raw);
    assert!(max_diff(p.embed().data(), oracle.data()) < 1e-15);
}

#[test]
fn alt_examples() {
    assert!(alt_product(&[1.0, 0.0], &[1.0, 0.0]).unwrap().is_zero());
    let a = alt_product(&[1.0, 0.0], &[0.0, 1.0]).unwrap();
    assert!((a.norm_sq() - 0.5).abs() < 1e-15);
    let b = alt_product(&[2.0, 0.0], &[0.0, 1.0]).unwrap();
    assert!(max_diff(b.data(), a.scale(2.0).data()) == 0.0);
}

#[test]
fn sym_product_full_single_and_zero() {
    let a = alt_product(&[0.3, 0.7], &[-1.0, 0.2]).unwrap();
    assert_eq!(sym_product_full(std::slice::from_ref(&a)).unwrap(), a);
    let z = FullTensor::zeros(2, 2);
    assert!(sym_product_full(&[a, z]).unwrap().is_zero());
}

#[test]
fn alt_square_norm_matches_entry_expansion() {
    // (e1⊖e2)⊙(e1⊖e2): the two orderings coincide, so the product is the
    // plain tensor square; expand all 2⁴ entries by hand.
    let a = alt_product(&[1.0, 0.0], &[0.0, 1.0]).unwrap();
    let p = sym_product_full(&[a.clone(), a.clone()]).unwrap();
    let mut c2 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    let v = a.get(&[i, j]) * a.get(&[k, l]);
                    c2 += v * v;
                }
            }
        }
    }
    assert!((p.norm_sq() - c2).abs() < 1e-15);
    assert!((c2 - 0.25).abs() < 1e-15);
}

#[test]
fn norm_matches_embedding_exhaustive() {
    for d in 1..=3 {
        for m in 0..=4 {
            for l in MultiIndex::all(d, m) {
                let b = SymTensor::basis(&l);
                assert!((b.norm_sq() - b.embed().norm_sq()).abs() < 1e-14);
            }
            let t = random_sym(d, m, &[0.3, -1.1, 0.7]);
            assert!((t.norm_sq() - t.embed().norm_sq()).abs() < 1e-12 * t.norm_sq().max(1.0));
        }
    }
}

#[test]
fn symmetrize_full_matches_oracle() {
    let data: Vec<f64> = (0..27).map(|i| ((i * 7 % 11) as f64 - 5.0) / 3.0).collect();
    let t = FullTensor::from_data(3, 3, data).unwrap();
    let oracle = brute_symmetrize(&t);
    assert!(max_diff(t.symmetrize().embed().data(), oracle.data()) < 1e-14);
}

#[test]
fn polynomial_evaluation() {
    // M = e1⊙e2 has polynomial M(x,x) = x₁x₂.
    let p = sym_product(&[SymTensor::unit(2, 0), SymTensor::unit(2, 1)]).unwrap();
    assert!((p.eval_polynomial(&[3.0, -2.0]) + 6.0).abs() < 1e-14);
}

#[test]
fn mismatched_inputs() {
    assert!(SymTensor::from_components(2, 2, vec![1.0; 4]).is_err());
    assert!(FullTensor::from_data(2, 2, vec![1.0; 3]).is_err());
    assert!(sym_product(&[]).is_err());
}

fn arb_vec(d: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0..2.0f64, d)
}

proptest! {
    #[test]
    fn sym_product_permutation_invariant(a in arb_vec(3), b in arb_vec(3), c in arb_vec(3), order in 0usize..6) {
        let vs = [SymTensor::vector(&a), SymTensor::vector(&b), SymTensor::vector(&c)];
        let p = &perms(3)[order];
        let x = sym_product(&vs).unwrap();
        let y = sym_product(&[vs[p[0]].clone(), vs[p[1]].clone(), vs[p[2]].clone()]).unwrap();
        let scale = x.components().iter().fold(1e-300f64, |s, v| s.max(v.abs()));
        prop_assert!(max_diff(x.components(), y.components()) <= 1e-14 * scale.max(1.0));
    }

    #[test]
    fn sym_product_matches_brute_force(a in arb_vec(2), b in arb_vec(2), c in arb_vec(2)) {
        let vs = [SymTensor::vector(&a), SymTensor::vector(&b), SymTensor::vector(&c)];
        let raw = vs[0].embed().tensor(&vs[1].embed()).unwrap().tensor(&vs[2].embed()).unwrap();
        let oracle = brute_symmetrize(&raw);
        prop_assert!(max_diff(sym_product(&vs).unwrap().embed().data(), oracle.data()) < 1e-12);
    }

    #[test]
    fn symmetrize_embed_identity(d in 1usize..=3, m in 0usize..=4, seed in prop::collection::vec(-1.0..1.0f64, 1..8)) {
        let t = random_sym(d, m, &seed);
        prop_assert!(max_diff(t.embed().symmetrize().components(), t.components()) < 1e-14);
    }

    #[test]
    fn norm_is_homogeneous(s in -3.0..3.0f64, seed in prop::collection::vec(-1.0..1.0f64, 1..8)) {
        let t = random_sym(3, 3, &seed);
        prop_assert!((t.scale(s).norm() - s.abs() * t.norm()).abs() < 1e-12 * (1.0 + t.norm()));
    }
}
