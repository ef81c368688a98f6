//! Symmetric and full tensors on R^d.
//!
//! A [`SymTensor`] of order m stores one *component* value per exponent
//! class l (|l| = m). The component is the common value of every entry whose
//! index tuple contains `l[i]` copies of index i. Classes are ordered by
//! their sorted index tuples, lexicographically, so for d = 2 the position
//! of a class equals the number of twos in its index.
//!
//! Two coefficient readings exist and both are exposed:
//!
//! * `component(l)`: the entry value of the full embedding;
//! * `basis_coefficient(l) = binom(m, l) * component(l)`: the coefficient on
//!   e^{⊙l}, i.e. the coefficient of x^l in the polynomial x ↦ M(x, ..., x).
//!
//! With this, e1 ⊙ e2 has basis coefficient 1 and entries ½, and
//! ‖M‖² = Σ binom(m, l) component(l)² is the Frobenius norm of the embedding.

use crate::error::{check_dim, invalid, Error, Result};

/// n! as f64. Exact for n ≤ 22.
pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Binomial coefficient as f64, exact in the range used here.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1u128;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as f64
}

/// Exponent multi-index l ∈ N^d.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(exponents: Vec<usize>) -> Self {
        Self(exponents)
    }

    /// Exponent class of an index tuple (0-based indices).
    pub fn from_tuple(d: usize, tuple: &[usize]) -> Self {
        let mut l = vec![0; d];
        for &i in tuple {
            l[i] += 1;
        }
        Self(l)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn order(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn exponents(&self) -> &[usize] {
        &self.0
    }

    /// l! = Π l_i!.
    pub fn factorial(&self) -> f64 {
        self.0.iter().map(|&k| factorial(k)).product()
    }

    /// binom(m, l) = m!/l!, the number of index tuples in the class.
    pub fn multinomial(&self) -> f64 {
        let mut acc = 1.0;
        let mut n = 0;
        for &k in &self.0 {
            n += k;
            acc *= binomial(n, k);
        }
        acc
    }

    /// Sorted index tuple of the class.
    pub fn sorted_tuple(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(i, &k)| std::iter::repeat_n(i, k))
            .collect()
    }

    /// ξ^l.
    pub fn monomial(&self, xi: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(xi)
            .map(|(&k, &x)| x.powi(k as i32))
            .product()
    }

    /// All classes with |l| = m in canonical order.
    pub fn all(d: usize, m: usize) -> Vec<MultiIndex> {
        nondecreasing_tuples(d, m)
            .into_iter()
            .map(|t| MultiIndex::from_tuple(d, &t))
            .collect()
    }
}

/// Number of exponent classes, binom(d+m−1, m).
pub fn class_count(d: usize, m: usize) -> usize {
    binomial(d + m - 1, m) as usize
}

fn nondecreasing_tuples(d: usize, m: usize) -> Vec<Vec<usize>> {
    fn rec(d: usize, m: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for i in start..d {
            cur.push(i);
            rec(d, m, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, m, 0, &mut Vec::with_capacity(m), &mut out);
    out
}

/// Position of a class in canonical order.
fn class_position(l: &MultiIndex) -> usize {
    // Count sorted tuples that precede l's tuple lexicographically.
    let d = l.dim();
    let tuple = l.sorted_tuple();
    let m = tuple.len();
    let mut pos = 0;
    let mut start = 0;
    for (k, &ik) in tuple.iter().enumerate() {
        let rest = m - k - 1;
        for i in start..ik {
            // tuples with prefix fixed and entry i at slot k, remaining ≥ i
            pos += class_count(d - i, rest);
        }
        start = ik;
    }
    pos
}

/// Symmetric order-m tensor on R^d stored by exponent class.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTensor {
    d: usize,
    m: usize,
    comps: Vec<f64>,
}

impl SymTensor {
    pub fn zeros(d: usize, m: usize) -> Self {
        Self {
            d,
            m,
            comps: vec![0.0; class_count(d, m)],
        }
    }

    /// From component (entry) values in canonical class order.
    pub fn from_components(d: usize, m: usize, comps: Vec<f64>) -> Result<Self> {
        check_dim(class_count(d, m), comps.len())?;
        Ok(Self { d, m, comps })
    }

    /// From coefficients on the basis e^{⊙l}, canonical order.
    pub fn from_basis_coefficients(d: usize, m: usize, coeffs: &[f64]) -> Result<Self> {
        check_dim(class_count(d, m), coeffs.len())?;
        let comps = MultiIndex::all(d, m)
            .iter()
            .zip(coeffs)
            .map(|(l, c)| c / l.multinomial())
            .collect();
        Ok(Self { d, m, comps })
    }

    /// Order-1 tensor from a vector.
    pub fn vector(v: &[f64]) -> Self {
        Self {
            d: v.len(),
            m: 1,
            comps: v.to_vec(),
        }
    }

    /// e_i as an order-1 tensor (0-based i).
    pub fn unit(d: usize, i: usize) -> Self {
        let mut v = vec![0.0; d];
        v[i] = 1.0;
        Self::vector(&v)
    }

    /// e_1^{⊙l_1} ⊙ ... ⊙ e_d^{⊙l_d}.
    pub fn basis(l: &MultiIndex) -> Self {
        let mut t = Self::zeros(l.dim(), l.order());
        t.comps[class_position(l)] = 1.0 / l.multinomial();
        t
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn order(&self) -> usize {
        self.m
    }

    pub fn components(&self) -> &[f64] {
        &self.comps
    }

    pub fn classes(&self) -> Vec<MultiIndex> {
        MultiIndex::all(self.d, self.m)
    }

    pub fn index_of(&self, l: &MultiIndex) -> Result<usize> {
        check_dim(self.d, l.dim())?;
        if l.order() != self.m {
            return invalid(format!(
                "class of order {} in tensor of order {}",
                l.order(),
                self.m
            ));
        }
        Ok(class_position(l))
    }

    pub fn component(&self, l: &MultiIndex) -> f64 {
        self.comps[class_position(l)]
    }

    pub fn basis_coefficient(&self, l: &MultiIndex) -> f64 {
        l.multinomial() * self.component(l)
    }

    pub fn basis_coefficients(&self) -> Vec<f64> {
        self.classes()
            .iter()
            .zip(&self.comps)
            .map(|(l, c)| l.multinomial() * c)
            .collect()
    }

    /// Multiplicity-weighted norm² Σ binom(m,l) M_l².
    pub fn norm_sq(&self) -> f64 {
        self.classes()
            .iter()
            .zip(&self.comps)
            .map(|(l, c)| l.multinomial() * c * c)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            d: self.d,
            m: self.m,
            comps: self.comps.iter().map(|c| c * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dim(self.d, other.d)?;
        check_dim(self.m, other.m)?;
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            d: self.d,
            m: self.m,
            comps,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|&c| c == 0.0)
    }

    /// Entry at an arbitrary (unsorted) index tuple.
    pub fn entry(&self, tuple: &[usize]) -> f64 {
        self.component(&MultiIndex::from_tuple(self.d, tuple))
    }

    /// M(x, ..., x).
    pub fn eval_polynomial(&self, x: &[f64]) -> f64 {
        self.classes()
            .iter()
            .zip(&self.comps)
            .map(|(l, c)| l.multinomial() * c * l.monomial(x))
            .sum()
    }

    /// Multilinear evaluation M(w_1, ..., w_m) with sparse arguments
    /// given as lists of (index, value).
    pub fn eval_multilinear_sparse(&self, args: &[Vec<(usize, f64)>]) -> f64 {
        fn rec(
            t: &SymTensor,
            args: &[Vec<(usize, f64)>],
            k: usize,
            tuple: &mut Vec<usize>,
            w: f64,
        ) -> f64 {
            if k == args.len() {
                return w * t.entry(tuple);
            }
            let mut s = 0.0;
            for &(i, v) in &args[k] {
                if v != 0.0 {
                    tuple.push(i);
                    s += rec(t, args, k + 1, tuple, w * v);
                    tuple.pop();
                }
            }
            s
        }
        rec(self, args, 0, &mut Vec::with_capacity(args.len()), 1.0)
    }

    /// Full d^m embedding.
    pub fn embed(&self) -> FullTensor {
        let mut full = FullTensor::zeros(self.d, self.m);
        let tuples: Vec<Vec<usize>> = full.tuples().collect();
        for (flat, tuple) in tuples.iter().enumerate() {
            full.data[flat] = self.entry(tuple);
        }
        full
    }
}

/// Symmetrized tensor product of symmetric factors.
///
/// Uses M ↦ M(x, ..., x): the polynomial of a symmetrized product is the
/// product of the factors' polynomials.
pub fn sym_product(factors: &[SymTensor]) -> Result<SymTensor> {
    let first = factors
        .first()
        .ok_or_else(|| Error::InvalidInput("no factors".into()))?;
    let d = first.d;
    let mut acc_m = 0;
    // coefficient map keyed by exponents
    let mut acc: Vec<(Vec<usize>, f64)> = vec![(vec![0; d], 1.0)];
    for f in factors {
        check_dim(d, f.d)?;
        let fc: Vec<(Vec<usize>, f64)> = f
            .classes()
            .into_iter()
            .zip(f.basis_coefficients())
            .map(|(l, c)| (l.0, c))
            .collect();
        let mut next = std::collections::BTreeMap::<Vec<usize>, f64>::new();
        for (la, ca) in &acc {
            for (lb, cb) in &fc {
                let l: Vec<usize> = la.iter().zip(lb).map(|(a, b)| a + b).collect();
                *next.entry(l).or_insert(0.0) += ca * cb;
            }
        }
        acc = next.into_iter().collect();
        acc_m += f.m;
    }
    let mut out = SymTensor::zeros(d, acc_m);
    for (l, c) in acc {
        let l = MultiIndex(l);
        out.comps[class_position(&l)] = c / l.multinomial();
    }
    Ok(out)
}

/// Dense tensor of order r on R^d, row-major over index tuples.
#[derive(Debug, Clone, PartialEq)]
pub struct FullTensor {
    d: usize,
    r: usize,
    data: Vec<f64>,
}

impl FullTensor {
    pub fn zeros(d: usize, r: usize) -> Self {
        Self {
            d,
            r,
            data: vec![0.0; d.pow(r as u32)],
        }
    }

    pub fn from_data(d: usize, r: usize, data: Vec<f64>) -> Result<Self> {
        check_dim(d.pow(r as u32), data.len())?;
        Ok(Self { d, r, data })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn order(&self) -> usize {
        self.r
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn flat_index(&self, tuple: &[usize]) -> usize {
        tuple.iter().fold(0, |acc, &i| acc * self.d + i)
    }

    pub fn get(&self, tuple: &[usize]) -> f64 {
        self.data[self.flat_index(tuple)]
    }

    pub fn set(&mut self, tuple: &[usize], v: f64) {
        let k = self.flat_index(tuple);
        self.data[k] = v;
    }

    /// Index tuples in storage order.
    pub fn tuples(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        let (d, r) = (self.d, self.r);
        (0..self.data.len()).map(move |mut flat| {
            let mut t = vec![0; r];
            for slot in (0..r).rev() {
                t[slot] = flat % d;
                flat /= d;
            }
            t
        })
    }

    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            d: self.d,
            r: self.r,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0.0)
    }

    /// Average over all index permutations, returned by class.
    pub fn symmetrize(&self) -> SymTensor {
        let mut sums = vec![0.0; class_count(self.d, self.r)];
        for (flat, t) in self.tuples().enumerate() {
            sums[class_position(&MultiIndex::from_tuple(self.d, &t))] += self.data[flat];
        }
        let comps = MultiIndex::all(self.d, self.r)
            .iter()
            .zip(sums)
            .map(|(l, s)| s / l.multinomial())
            .collect();
        SymTensor {
            d: self.d,
            m: self.r,
            comps,
        }
    }

    /// Ordered tensor product a ⊗ b.
    pub fn tensor(&self, other: &FullTensor) -> Result<FullTensor> {
        check_dim(self.d, other.d)?;
        let mut data = Vec::with_capacity(self.data.len() * other.data.len());
        for a in &self.data {
            for b in &other.data {
                data.push(a * b);
            }
        }
        Ok(FullTensor {
            d: self.d,
            r: self.r + other.r,
            data,
        })
    }
}

/// a ⊖ b = ½(a ⊗ b − b ⊗ a).
pub fn alt_product(a: &[f64], b: &[f64]) -> Result<FullTensor> {
    check_dim(a.len(), b.len())?;
    let d = a.len();
    let mut t = FullTensor::zeros(d, 2);
    for i in 0..d {
        for j in 0..d {
            t.data[i * d + j] = 0.5 * (a[i] * b[j] - b[i] * a[j]);
        }
    }
    Ok(t)
}

/// Average over all orderings of the factors of their ordered tensor
/// product. Index slots of the result follow the factor slots in order.
pub fn sym_product_full(factors: &[FullTensor]) -> Result<FullTensor> {
    let first = factors
        .first()
        .ok_or_else(|| Error::InvalidInput("no factors".into()))?;
    for f in factors {
        check_dim(first.d, f.d)?;
    }
    let n = factors.len();
    let perms = permutations(n);
    let mut acc: Option<FullTensor> = None;
    for p in &perms {
        let mut t = factors[p[0]].clone();
        for &k in &p[1..] {
            t = t.tensor(&factors[k])?;
        }
        acc = Some(match acc {
            None => t,
            Some(mut a) => {
                for (x, y) in a.data.iter_mut().zip(&t.data) {
                    *x += y;
                }
                a
            }
        });
    }
    Ok(acc.expect("non-empty").scale(1.0 / perms.len() as f64))
}

pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}
