//! Homogeneous constant-coefficient operators of order m and their symbols.
//!
//! Two families are provided:
//!
//! * the generalized Saint-Venant operator (higher-order curl) acting on
//!   symmetric m-tensors, with symbol
//!   `[A(ξ)M]_{i1 j1 … im jm} = 2^{-m} M(w_1, …, w_m)`,
//!   `w_k = ξ_{jk} e_{ik} − ξ_{ik} e_{jk}`;
//! * the m-th order divergence acting on `R^k ⊗ Sym(R^d; m)`, with
//!   `[B(ξ)M]_a = Σ_l ξ^l M_{a,l}` (component values).
//!
//! Matrices use orthonormal coordinates on the input space,
//! `c_l = sqrt(binom(m,l)) · M_l`, so matrix norms equal tensor norms.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{check_dim, invalid, Error, Result};
use crate::symtensor::{
    alt_product, binomial, class_count, sym_product_full, FullTensor, MultiIndex, SymTensor,
};

/// Element of `R^k ⊗ Sym(R^d; m)`: `Σ_a e_a ⊗ parts[a]`.
///
/// The Saint-Venant operator uses k = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct VecSym {
    parts: Vec<SymTensor>,
}

impl VecSym {
    pub fn new(parts: Vec<SymTensor>) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidInput("empty VecSym".into()))?;
        for p in &parts {
            check_dim(first.dim(), p.dim())?;
            check_dim(first.order(), p.order())?;
        }
        Ok(Self { parts })
    }

    pub fn sym(m: SymTensor) -> Self {
        Self { parts: vec![m] }
    }

    /// v ⊗ M.
    pub fn outer(v: &[f64], m: &SymTensor) -> Self {
        Self {
            parts: v.iter().map(|&a| m.scale(a)).collect(),
        }
    }

    pub fn k(&self) -> usize {
        self.parts.len()
    }

    pub fn dim(&self) -> usize {
        self.parts[0].dim()
    }

    pub fn order(&self) -> usize {
        self.parts[0].order()
    }

    pub fn parts(&self) -> &[SymTensor] {
        &self.parts
    }

    pub fn norm_sq(&self) -> f64 {
        self.parts.iter().map(SymTensor::norm_sq).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.parts.iter().all(SymTensor::is_zero)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            parts: self.parts.iter().map(|p| p.scale(s)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_dim(self.k(), other.k())?;
        let parts = self
            .parts
            .iter()
            .zip(&other.parts)
            .map(|(a, b)| a.add(&b.scale(-1.0)))
            .collect::<Result<_>>()?;
        Ok(Self { parts })
    }

    /// Orthonormal coordinates, part-major.
    pub fn coords(&self) -> Vec<f64> {
        let classes = MultiIndex::all(self.dim(), self.order());
        self.parts
            .iter()
            .flat_map(|p| {
                classes
                    .iter()
                    .zip(p.components())
                    .map(|(l, c)| c * l.multinomial().sqrt())
                    .collect::<Vec<_>>()
            })
            .collect()
    }

    pub fn from_coords(k: usize, d: usize, m: usize, c: &[f64]) -> Result<Self> {
        let n = class_count(d, m);
        check_dim(k * n, c.len())?;
        let classes = MultiIndex::all(d, m);
        let parts = (0..k)
            .map(|a| {
                let comps = classes
                    .iter()
                    .enumerate()
                    .map(|(i, l)| c[a * n + i] / l.multinomial().sqrt())
                    .collect();
                SymTensor::from_components(d, m, comps)
            })
            .collect::<Result<_>>()?;
        Ok(Self { parts })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    SaintVenant,
    Divergence { k: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HomogeneousOperator {
    pub kind: OperatorKind,
    pub d: usize,
    pub m: usize,
}

impl HomogeneousOperator {
    pub fn saint_venant(d: usize, m: usize) -> Self {
        Self {
            kind: OperatorKind::SaintVenant,
            d,
            m,
        }
    }

    pub fn divergence(d: usize, m: usize, k: usize) -> Self {
        Self {
            kind: OperatorKind::Divergence { k },
            d,
            m,
        }
    }

    /// k of the input space `R^k ⊗ Sym`.
    pub fn k(&self) -> usize {
        match self.kind {
            OperatorKind::SaintVenant => 1,
            OperatorKind::Divergence { k } => k,
        }
    }

    pub fn input_dim(&self) -> usize {
        self.k() * class_count(self.d, self.m)
    }

    fn check_input(&self, xi: &[f64], m: &VecSym) -> Result<()> {
        check_dim(self.d, xi.len())?;
        check_dim(self.d, m.dim())?;
        check_dim(self.m, m.order())?;
        check_dim(self.k(), m.k())
    }

    /// p(ξ) = ‖symbol(ξ) M‖².
    pub fn symbol_norm_sq(&self, xi: &[f64], m: &VecSym) -> Result<f64> {
        self.check_input(xi, m)?;
        Ok(match self.kind {
            OperatorKind::SaintVenant => sv_norm_sq(xi, &m.parts[0]),
            OperatorKind::Divergence { .. } => div_symbol_apply(xi, m)?.iter().map(|x| x * x).sum(),
        })
    }

    /// Matrix of the symbol in orthonormal input coordinates.
    ///
    /// Saint-Venant rows: for d = 2 the single independent component
    /// scaled by sqrt(2^m) (the number of nonzero entries it stands for);
    /// for d = 3 all 3^{2m} entries of the image.
    pub fn symbol_matrix(&self, xi: &[f64]) -> Result<DMatrix<f64>> {
        check_dim(self.d, xi.len())?;
        let n = class_count(self.d, self.m);
        match self.kind {
            OperatorKind::SaintVenant => {
                if self.d < 2
                    || self.d > 3
                    || (self.d == 3 && self.m > 4)
                    || self.m > 12
                    || self.m == 0
                {
                    return Err(Error::Capability(format!(
                        "Saint-Venant symbol matrix supports d = 2 (m ≤ 12) and d = 3 (m ≤ 4), got d = {}, m = {}",
                        self.d, self.m
                    )));
                }
                if self.d == 2 {
                    let row = sv_reduced_row(xi, self.m);
                    let s = 2f64.powi(self.m as i32).sqrt();
                    return Ok(DMatrix::from_fn(1, n, |_, c| s * row[c]));
                }
                let classes = MultiIndex::all(self.d, self.m);
                let cols: Vec<Vec<f64>> = classes
                    .iter()
                    .map(|l| {
                        let b = SymTensor::basis(l).scale(1.0 / SymTensor::basis(l).norm());
                        sv_symbol_apply(xi, &b).map(|t| t.data().to_vec())
                    })
                    .collect::<Result<_>>()?;
                let rows = cols[0].len();
                Ok(DMatrix::from_fn(rows, n, |r, c| cols[c][r]))
            }
            OperatorKind::Divergence { k } => {
                if self.d > 3 || self.m > 4 || k > 3 {
                    return Err(Error::Capability(format!(
                        "divergence symbol matrix supports d ≤ 3, m ≤ 4, k ≤ 3, got d = {}, m = {}, k = {k}",
                        self.d, self.m
                    )));
                }
                let classes = MultiIndex::all(self.d, self.m);
                Ok(DMatrix::from_fn(k, k * n, |r, c| {
                    let (a, i) = (c / n, c % n);
                    if a == r {
                        classes[i].monomial(xi) / classes[i].multinomial().sqrt()
                    } else {
                        0.0
                    }
                }))
            }
        }
    }
}

/// Full Saint-Venant image `2^{-m} M(w_1, …, w_m)` as an order-2m tensor,
/// index layout (i1, j1, …, im, jm).
pub fn sv_symbol_apply(xi: &[f64], m: &SymTensor) -> Result<FullTensor> {
    check_dim(m.dim(), xi.len())?;
    let (d, ord) = (m.dim(), m.order());
    let mut out = FullTensor::zeros(d, 2 * ord);
    let scale = 0.5f64.powi(ord as i32);
    let tuples: Vec<Vec<usize>> = out.tuples().collect();
    for t in tuples {
        let args: Vec<Vec<(usize, f64)>> = (0..ord)
            .map(|k| {
                let (i, j) = (t[2 * k], t[2 * k + 1]);
                if i == j {
                    vec![]
                } else {
                    vec![(i, xi[j]), (j, -xi[i])]
                }
            })
            .collect();
        if args.iter().any(Vec::is_empty) {
            continue;
        }
        out.set(&t, scale * m.eval_multilinear_sparse(&args));
    }
    Ok(out)
}

/// Image of a pure product `a_1 ⊙ … ⊙ a_m` as `(a_1 ⊖ ξ) ⊙ … ⊙ (a_m ⊖ ξ)`.
pub fn sv_symbol_apply_product(xi: &[f64], factors: &[Vec<f64>]) -> Result<FullTensor> {
    let alts = factors
        .iter()
        .map(|a| alt_product(a, xi))
        .collect::<Result<Vec<_>>>()?;
    sym_product_full(&alts)
}

/// d = 2: the single independent component `[A(ξ)M]_{1212…12}` as a row
/// acting on orthonormal coordinates.
pub fn sv_reduced_row(xi: &[f64], m: usize) -> Vec<f64> {
    let s = 0.5f64.powi(m as i32);
    (0..=m)
        .map(|k| {
            // component ũ_k = c_k / sqrt(binom(m,k))
            let b = binomial(m, k);
            s * b * xi[1].powi((m - k) as i32) * (-xi[0]).powi(k as i32) / b.sqrt()
        })
        .collect()
}

/// d = 2 component `2^{-m} Σ_k binom(m,k) ξ2^{m−k} (−ξ1)^k ũ_k`.
pub fn sv_symbol_2d(xi: &[f64], m: &SymTensor) -> f64 {
    let ord = m.order();
    let s = 0.5f64.powi(ord as i32);
    m.components()
        .iter()
        .enumerate()
        .map(|(k, u)| {
            s * binomial(ord, k) * xi[1].powi((ord - k) as i32) * (-xi[0]).powi(k as i32) * u
        })
        .sum()
}

fn sv_norm_sq(xi: &[f64], m: &SymTensor) -> f64 {
    let d = m.dim();
    let ord = m.order();
    if d == 2 {
        let c = sv_symbol_2d(xi, m);
        return 2f64.powi(ord as i32) * c * c;
    }
    // Entries depend only on the multiset of (i, j) pairs; sum over
    // multisets with their multiplicities.
    let pairs: Vec<(usize, usize)> = (0..d)
        .flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let np = pairs.len();
    let scale = 0.25f64.powi(ord as i32);
    let mut total = 0.0;
    let mut sel = vec![0usize; ord];
    loop {
        let args: Vec<Vec<(usize, f64)>> = sel
            .iter()
            .map(|&p| {
                let (i, j) = pairs[p];
                vec![(i, xi[j]), (j, -xi[i])]
            })
            .collect();
        let v = m.eval_multilinear_sparse(&args);
        let mut mult = crate::symtensor::factorial(ord);
        let mut run = 1;
        for w in 1..=ord {
            if w < ord && sel[w] == sel[w - 1] {
                run += 1;
            } else {
                mult /= crate::symtensor::factorial(run);
                run = 1;
            }
        }
        total += mult * v * v;
        // next nondecreasing selection
        let mut pos = ord;
        loop {
            if pos == 0 {
                return scale * total;
            }
            pos -= 1;
            if sel[pos] + 1 < np {
                let nv = sel[pos] + 1;
                for s in sel.iter_mut().skip(pos) {
                    *s = nv;
                }
                break;
            }
        }
    }
}

/// `[B(ξ)M]_a = Σ_l ξ^l M_{a,l}`.
pub fn div_symbol_apply(xi: &[f64], m: &VecSym) -> Result<Vec<f64>> {
    check_dim(m.dim(), xi.len())?;
    let classes = MultiIndex::all(m.dim(), m.order());
    Ok(m.parts
        .iter()
        .map(|p| {
            classes
                .iter()
                .zip(p.components())
                .map(|(l, c)| l.monomial(xi) * c)
                .sum()
        })
        .collect())
}

/// Orthonormal basis of the numerical kernel of the symbol at ξ.
///
/// Singular values below `tol · σ_max` count as zero.
pub fn kernel_basis(op: &HomogeneousOperator, xi: &[f64], tol: f64) -> Result<Vec<VecSym>> {
    check_dim(op.d, xi.len())?;
    if xi.iter().all(|&x| x == 0.0) {
        return invalid("kernel_basis needs ξ ≠ 0");
    }
    let a = op.symbol_matrix(xi)?;
    let n = a.ncols();
    // Pad wide matrices so the SVD returns a full right basis.
    let a = if a.nrows() < n {
        let mut p = DMatrix::zeros(n, n);
        p.view_mut((0, 0), (a.nrows(), n)).copy_from(&a);
        p
    } else {
        a
    };
    let svd = a.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let smax = svd.singular_values.max();
    let cut = tol * smax;
    let mut out = Vec::new();
    for (r, &s) in svd.singular_values.iter().enumerate() {
        if s <= cut {
            let c: Vec<f64> = vt.row(r).iter().copied().collect();
            out.push(VecSym::from_coords(op.k(), op.d, op.m, &c)?);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConeClass {
    /// Zero for some direction and nonzero for another.
    Compatible,
    /// No direction with a nonzero image was found ("no counterexample").
    Supercompatible,
    /// Nonzero in every sampled direction.
    Incompatible,
}

#[derive(Debug, Clone)]
pub struct WaveConeReport {
    pub class: ConeClass,
    /// Unit direction attaining the smallest relative image norm.
    pub best_direction: Vec<f64>,
    /// min and max of ‖A(ξ)M‖/‖M‖ over the unit-sphere sample.
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub samples: usize,
    /// Set when the classification is a sampling result rather than a proof.
    pub sampling_only: bool,
}

/// Relative threshold on ‖A(ξ)M‖ / (‖M‖ |ξ|^m) for "zero".
pub const CONE_ZERO_TOL: f64 = 1e-8;

/// Classify M against the wave cone and the supercompatible set by
/// sampling the unit sphere (deterministic net plus seeded random points)
/// and refining the best candidates.
pub fn wave_cone_check(op: &HomogeneousOperator, m: &VecSym) -> Result<WaveConeReport> {
    if m.is_zero() {
        return invalid("wave_cone_check needs M ≠ 0");
    }
    check_dim(op.d, m.dim())?;
    let norm = m.norm();
    let ratio = |xi: &[f64]| -> f64 {
        let n = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
        let u: Vec<f64> = xi.iter().map(|x| x / n).collect();
        op.symbol_norm_sq(&u, m)
            .map(|p| p.sqrt() / norm)
            .unwrap_or(f64::NAN)
    };
    let mut pts = sphere_net(op.d, 1024);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    pts.extend((0..1000).map(|_| random_unit(op.d, &mut rng)));
    let vals: Vec<f64> = pts.par_iter().map(|p| ratio(p)).collect();
    let max_ratio = vals.iter().copied().fold(0.0, f64::max);

    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    let mut best = (vals[order[0]], pts[order[0]].clone());
    for &i in order.iter().take(8) {
        let (v, p) = refine_min(&pts[i], &ratio);
        if v < best.0 {
            best = (v, p);
        }
    }
    let class = if max_ratio <= CONE_ZERO_TOL {
        ConeClass::Supercompatible
    } else if best.0 <= CONE_ZERO_TOL {
        ConeClass::Compatible
    } else {
        ConeClass::Incompatible
    };
    Ok(WaveConeReport {
        class,
        best_direction: best.1,
        min_ratio: best.0,
        max_ratio,
        samples: pts.len(),
        sampling_only: class != ConeClass::Compatible,
    })
}

/// Deterministic net on the unit sphere: uniform angles on the half circle
/// (d = 2) or a Fibonacci lattice (d ≥ 3, using the first three axes).
pub fn sphere_net(d: usize, n: usize) -> Vec<Vec<f64>> {
    match d {
        1 => vec![vec![1.0]],
        2 => (0..n)
            .map(|i| {
                let t = std::f64::consts::PI * i as f64 / n as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        _ => {
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..n)
                .map(|i| {
                    let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
                    let r = (1.0 - z * z).sqrt();
                    let phi = golden * i as f64;
                    let mut v = vec![0.0; d];
                    v[0] = r * phi.cos();
                    v[1] = r * phi.sin();
                    v[2] = z;
                    v
                })
                .collect()
        }
    }
}

pub fn random_unit<R: Rng>(d: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-3 && n <= 1.0 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Pattern search on the sphere from a starting point.
fn refine_min(start: &[f64], f: &impl Fn(&[f64]) -> f64) -> (f64, Vec<f64>) {
    let d = start.len();
    let mut x = start.to_vec();
    let mut fx = f(&x);
    let mut step = 0.05;
    while step > 1e-14 {
        let mut improved = false;
        for i in 0..d {
            for s in [step, -step] {
                let mut y = x.clone();
                y[i] += s;
                let n = y.iter().map(|v| v * v).sum::<f64>().sqrt();
                y.iter_mut().for_each(|v| *v /= n);
                let fy = f(&y);
                if fy < fx {
                    x = y;
                    fx = fy;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
        if fx == 0.0 {
            break;
        }
    }
    (fx, x)
}

/// Wells A, B with volume fraction λ.
#[derive(Debug, Clone)]
pub struct WellPair {
    pub a: VecSym,
    pub b: VecSym,
    pub lambda: f64,
}

impl WellPair {
    pub fn new(a: VecSym, b: VecSym, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda < 1.0) {
            return invalid(format!("λ must lie in (0,1), got {lambda}"));
        }
        let w = Self { a, b, lambda };
        if w.difference()?.is_zero() {
            return invalid("wells must differ");
        }
        Ok(w)
    }

    /// A − B.
    pub fn difference(&self) -> Result<VecSym> {
        self.a.sub(&self.b)
    }

    /// F_λ = λA + (1−λ)B.
    pub fn f_lambda(&self) -> Result<VecSym> {
        let d = self.difference()?;
        let parts = self
            .b
            .parts()
            .iter()
            .zip(d.parts())
            .map(|(b, m)| b.add(&m.scale(self.lambda)))
            .collect::<Result<_>>()?;
        VecSym::new(parts)
    }

    pub fn compatibility(&self, op: &HomogeneousOperator) -> Result<WaveConeReport> {
        wave_cone_check(op, &self.difference()?)
    }
}

/// Row-major 2D grid, `data[j * nx + i]` with i along x.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid2 {
    pub nx: usize,
    pub ny: usize,
    pub data: Vec<f64>,
}

impl Grid2 {
    pub fn zeros(nx: usize, ny: usize) -> Self {
        Self {
            nx,
            ny,
            data: vec![0.0; nx * ny],
        }
    }

    pub fn from_fn(nx: usize, ny: usize, f: impl Fn(usize, usize) -> f64 + Sync) -> Self {
        let data = (0..nx * ny)
            .into_par_iter()
            .map(|p| f(p % nx, p / nx))
            .collect();
        Self { nx, ny, data }
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.nx + i]
    }

    /// Max |value| over finite entries.
    pub fn max_abs(&self) -> f64 {
        self.data
            .iter()
            .filter(|v| v.is_finite())
            .fold(0.0, |a, v| a.max(v.abs()))
    }
}

/// Centered difference along x (axis 0) or y (axis 1); boundary → NaN.
fn centered(g: &Grid2, axis: usize, h: f64) -> Grid2 {
    let (nx, ny) = (g.nx, g.ny);
    let inv = 0.5 / h;
    let data = (0..ny)
        .into_par_iter()
        .flat_map_iter(|j| {
            (0..nx).map(move |i| {
                let (lo, hi) = if axis == 0 {
                    (i == 0, i + 1 == nx)
                } else {
                    (j == 0, j + 1 == ny)
                };
                if lo || hi {
                    f64::NAN
                } else if axis == 0 {
                    (g.data[j * nx + i + 1] - g.data[j * nx + i - 1]) * inv
                } else {
                    (g.data[(j + 1) * nx + i] - g.data[(j - 1) * nx + i]) * inv
                }
            })
        })
        .collect();
    Grid2 { nx, ny, data }
}

fn mixed(g: &Grid2, nx_der: usize, ny_der: usize, h: f64) -> Grid2 {
    let mut out = g.clone();
    for _ in 0..nx_der {
        out = centered(&out, 0, h);
    }
    for _ in 0..ny_der {
        out = centered(&out, 1, h);
    }
    out
}

fn check_grids(comps: &[Grid2], m: usize) -> Result<(usize, usize)> {
    if comps.len() != m + 1 {
        return Err(Error::DimensionMismatch {
            expected: m + 1,
            got: comps.len(),
        });
    }
    let (nx, ny) = (comps[0].nx, comps[0].ny);
    for c in comps {
        if c.nx != nx || c.ny != ny {
            return invalid("component grids differ in shape");
        }
    }
    if nx < 2 * m + 1 || ny < 2 * m + 1 {
        return invalid(format!("grid {nx}×{ny} too small for order-{m} stencils"));
    }
    Ok((nx, ny))
}

/// Discrete `Σ_k (−1)^k 2^{-m} binom(m,k) ∂1^k ∂2^{m−k} ũ_k` with centered
/// differences composed m times. A margin of m points is NaN.
pub fn sv_residual_2d(comps: &[Grid2], h: f64) -> Result<Grid2> {
    let m = comps.len().saturating_sub(1);
    let (nx, ny) = check_grids(comps, m)?;
    let mut acc = Grid2::zeros(nx, ny);
    let s = 0.5f64.powi(m as i32);
    for (k, u) in comps.iter().enumerate() {
        let c = if k % 2 == 0 { 1.0 } else { -1.0 } * s * binomial(m, k);
        let t = mixed(u, k, m - k, h);
        acc.data
            .iter_mut()
            .zip(&t.data)
            .for_each(|(a, b)| *a += c * b);
    }
    Ok(acc)
}

/// Discrete `Σ_j ∂1^j ∂2^{m−j} ũ_{m−j}`, the d = 2 m-th order divergence of
/// a symmetric field stored by number of twos.
pub fn div_residual_2d(comps: &[Grid2], h: f64) -> Result<Grid2> {
    let m = comps.len().saturating_sub(1);
    let (nx, ny) = check_grids(comps, m)?;
    let mut acc = Grid2::zeros(nx, ny);
    for j in 0..=m {
        let t = mixed(&comps[m - j], j, m - j, h);
        acc.data.iter_mut().zip(&t.data).for_each(|(a, b)| *a += b);
    }
    Ok(acc)
}
