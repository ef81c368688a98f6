//! The multiplier p(ξ) = ‖A(ξ)(A−B)‖², its zero set and its maximal
//! vanishing order.
//!
//! The vanishing order is
//! `L = min{ℓ : inf_{S^{d−1}∖V} p / dist_V^{2ℓ} > 0}`.
//! Since dist_V ≤ 1 on the sphere the ratio grows with ℓ. Near V the
//! ratio for ℓ = L stabilizes, while the ratio for ℓ = L − 1 behaves like
//! dist_V² and shrinks by about 4 each time the distance halves. The
//! certificate records that shrinking sequence.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{check_dim, invalid, Error, Result};
use crate::operators::{random_unit, sphere_net, HomogeneousOperator, OperatorKind, VecSym};
use crate::symtensor::{MultiIndex, SymTensor};

const ORTHO_TOL: f64 = 1e-12;

/// Finite union of proper linear subspaces of R^d.
#[derive(Debug, Clone)]
pub struct SubspaceUnion {
    d: usize,
    /// d × k matrices with orthonormal columns.
    bases: Vec<DMatrix<f64>>,
}

impl SubspaceUnion {
    pub fn new(d: usize, bases: Vec<DMatrix<f64>>) -> Result<Self> {
        if bases.is_empty() {
            return invalid("empty subspace union");
        }
        for q in &bases {
            check_dim(d, q.nrows())?;
            if q.ncols() == 0 || q.ncols() >= d {
                return invalid(format!(
                    "subspace of dimension {} in R^{d} is not proper and nonzero",
                    q.ncols()
                ));
            }
            let g = q.transpose() * q - DMatrix::identity(q.ncols(), q.ncols());
            if g.amax() > ORTHO_TOL {
                return invalid("subspace basis is not orthonormal");
            }
        }
        Ok(Self { d, bases })
    }

    /// span{e_j : j ∈ axes}.
    pub fn coordinate(d: usize, axes: &[usize]) -> DMatrix<f64> {
        DMatrix::from_fn(d, axes.len(), |r, c| if r == axes[c] { 1.0 } else { 0.0 })
    }

    /// span(e_j)^⊥.
    pub fn hyperplane(d: usize, j: usize) -> DMatrix<f64> {
        let axes: Vec<usize> = (0..d).filter(|&i| i != j).collect();
        Self::coordinate(d, &axes)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn bases(&self) -> &[DMatrix<f64>] {
        &self.bases
    }

    /// min_j |ξ − P_j ξ|.
    pub fn dist(&self, xi: &[f64]) -> f64 {
        let x = DVector::from_column_slice(xi);
        self.bases
            .iter()
            .map(|q| (&x - q * (q.transpose() * &x)).norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// Nonzero pairwise (and iterated) intersections plus the subspaces
    /// themselves; these are the flats near which the ratio is sampled.
    pub fn flats(&self) -> Vec<DMatrix<f64>> {
        let mut out: Vec<DMatrix<f64>> = self.bases.clone();
        let mut frontier = out.clone();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for a in &frontier {
                for b in &self.bases {
                    if let Some(c) = intersection(a, b) {
                        if c.ncols() < a.ncols() && !out.iter().any(|o| same_subspace(o, &c)) {
                            out.push(c.clone());
                            next.push(c);
                        }
                    }
                }
            }
            frontier = next;
        }
        out
    }
}

fn same_subspace(a: &DMatrix<f64>, b: &DMatrix<f64>) -> bool {
    a.ncols() == b.ncols() && (b - a * (a.transpose() * b)).amax() < 1e-9
}

/// Orthonormal basis of span(a) ∩ span(b), or None if trivial.
fn intersection(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let (ka, kb) = (a.ncols(), b.ncols());
    let mut m = DMatrix::zeros(a.nrows().max(ka + kb), ka + kb);
    m.view_mut((0, 0), (a.nrows(), ka)).copy_from(a);
    m.view_mut((0, ka), (a.nrows(), kb)).copy_from(&(-b));
    let svd = m.svd(false, true);
    let vt = svd.v_t?;
    let mut cols = Vec::new();
    for (r, &s) in svd.singular_values.iter().enumerate() {
        if s < 1e-10 {
            let y = vt.row(r).columns(0, ka).transpose();
            cols.push(a * y);
        }
    }
    if cols.is_empty() {
        return None;
    }
    let m = DMatrix::from_columns(&cols);
    let q = m.qr().q();
    Some(q.columns(0, cols.len()).into_owned())
}

/// p(ξ) = ‖symbol(ξ) M‖² for a fixed operator and well difference.
#[derive(Debug, Clone)]
pub struct MultiplierPoly {
    pub op: HomogeneousOperator,
    pub m: VecSym,
}

impl MultiplierPoly {
    pub fn new(op: HomogeneousOperator, m: VecSym) -> Result<Self> {
        check_dim(op.d, m.dim())?;
        check_dim(op.m, m.order())?;
        check_dim(op.k(), m.k())?;
        Ok(Self { op, m })
    }

    pub fn degree(&self) -> usize {
        2 * self.op.m
    }

    pub fn eval(&self, xi: &[f64]) -> f64 {
        self.op
            .symbol_norm_sq(xi, &self.m)
            .expect("shapes checked at construction")
    }
}

/// dist_V(ξ).
pub fn dist_v(v: &SubspaceUnion, xi: &[f64]) -> f64 {
    v.dist(xi)
}

/// Exponent class l if M is `e^{⊙l}` (curl) or `v ⊗ e^{⊙l}` (divergence)
/// up to scaling.
fn basis_class(m: &VecSym) -> Option<MultiIndex> {
    let classes = MultiIndex::all(m.dim(), m.order());
    let mut found: Option<usize> = None;
    for p in m.parts() {
        for (i, &c) in p.components().iter().enumerate() {
            if c != 0.0 {
                match found {
                    None => found = Some(i),
                    Some(j) if j == i => {}
                    Some(_) => return None,
                }
            }
        }
    }
    found.map(|i| classes[i].clone())
}

/// Zero set of p for basis wells, checked against p on samples.
pub fn zero_set(op: &HomogeneousOperator, m: &VecSym) -> Result<SubspaceUnion> {
    let p = MultiplierPoly::new(*op, m.clone())?;
    let l = basis_class(m).ok_or_else(|| {
        Error::Capability(
            "zero set is only derived for basis wells; supply V and call vanishing_order_estimate"
                .into(),
        )
    })?;
    let d = op.d;
    let nz: Vec<usize> = (0..d).filter(|&j| l.exponents()[j] != 0).collect();
    let bases: Vec<DMatrix<f64>> = match op.kind {
        OperatorKind::SaintVenant => nz
            .iter()
            .map(|&j| SubspaceUnion::coordinate(d, &[j]))
            .collect(),
        OperatorKind::Divergence { .. } => nz
            .iter()
            .map(|&j| SubspaceUnion::hyperplane(d, j))
            .collect(),
    };
    let v = SubspaceUnion::new(d, bases)?;
    validate_zero_set(&p, &v)?;
    Ok(v)
}

/// p < 1e−20 on each subspace and p > 0 at distance ≥ 0.3 from V.
pub fn validate_zero_set(p: &MultiplierPoly, v: &SubspaceUnion) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for q in v.bases() {
        for _ in 0..32 {
            let y = random_unit(q.ncols().max(1), &mut rng);
            let x = q * DVector::from_column_slice(&y[..q.ncols()]);
            let val = p.eval(x.as_slice());
            if val >= 1e-20 {
                return Err(Error::InvalidInput(format!(
                    "p = {val:e} on a claimed zero subspace"
                )));
            }
        }
    }
    for xi in sphere_net(v.dim(), 512) {
        if v.dist(&xi) >= 0.3 && p.eval(&xi) <= 0.0 {
            return Err(Error::InvalidInput("p vanishes away from V".into()));
        }
    }
    Ok(())
}

/// Sample points with cached p and dist values.
#[derive(Debug, Clone)]
pub struct SphereSample {
    /// Layer 0 is the uniform net; layer k ≥ 1 sits at distance ≈ 2^{−k}.
    pub layers: Vec<Vec<(f64, f64)>>,
}

impl SphereSample {
    /// Evaluate p and dist_V on a uniform net of `n_base` points and on
    /// `boundary_layers` geometric layers of `per_layer` points
    /// `(v + ρw)/|v + ρw|`, v a unit vector in a flat of V, w ⊥ flat.
    /// The same (v, w) pairs are reused in every layer.
    pub fn build(
        p: &MultiplierPoly,
        v: &SubspaceUnion,
        n_base: usize,
        boundary_layers: usize,
        per_layer: usize,
    ) -> Self {
        let d = v.dim();
        let eval = |pts: Vec<Vec<f64>>| -> Vec<(f64, f64)> {
            pts.par_iter()
                .map(|x| (p.eval(x), v.dist(x)))
                .filter(|&(_, dist)| dist > 0.0)
                .collect()
        };
        let mut layers = vec![eval(sphere_net(d, n_base))];

        let flats = v.flats();
        let mut rng = ChaCha8Rng::seed_from_u64(0xda7a);
        let per_flat = (per_layer / flats.len()).max(1);
        let mut rays: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
        for f in &flats {
            let comp = complement(f);
            for _ in 0..per_flat {
                let a = random_unit(f.ncols(), &mut rng);
                let b = random_unit(comp.ncols(), &mut rng);
                let vv = f * DVector::from_column_slice(&a);
                let ww = &comp * DVector::from_column_slice(&b);
                rays.push((vv.as_slice().to_vec(), ww.as_slice().to_vec()));
            }
        }
        for k in 1..=boundary_layers {
            let rho = 0.5f64.powi(k as i32);
            let mut pts: Vec<Vec<f64>> = rays
                .iter()
                .map(|(a, b)| {
                    normalize(
                        &a.iter()
                            .zip(b)
                            .map(|(x, y)| x + rho * y)
                            .collect::<Vec<_>>(),
                    )
                })
                .collect();
            // Coordinate witness ξ_j = 1/n (j ≠ j0), n = 2^k.
            let n = 2f64.powi(k as i32);
            if (d as f64 - 1.0) / (n * n) < 1.0 {
                for j0 in 0..d {
                    let mut x = vec![1.0 / n; d];
                    x[j0] = (1.0 - (d as f64 - 1.0) / (n * n)).sqrt();
                    // only witnesses that actually sit at this layer's distance
                    if v.dist(&x) <= 2.0 * rho * (d as f64).sqrt() {
                        pts.push(x);
                    }
                }
            }
            layers.push(eval(pts));
        }
        Self { layers }
    }

    fn layer_min(&self, layer: usize, ell: usize) -> f64 {
        self.layers[layer]
            .iter()
            .map(|&(p, dist)| p / dist.powi(2 * ell as i32))
            .fold(f64::INFINITY, f64::min)
    }

    /// Minimum of p/dist^{2ℓ} per layer (index 0 = base net).
    pub fn layer_minima(&self, ell: usize) -> Vec<f64> {
        (0..self.layers.len())
            .map(|k| self.layer_min(k, ell))
            .collect()
    }

    pub fn p_max(&self) -> f64 {
        self.layers
            .iter()
            .flatten()
            .map(|&(p, _)| p)
            .fold(0.0, f64::max)
    }
}

fn normalize(x: &[f64]) -> Vec<f64> {
    let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.iter().map(|v| v / n).collect()
}

/// Orthonormal basis of span(q)^⊥.
fn complement(q: &DMatrix<f64>) -> DMatrix<f64> {
    let d = q.nrows();
    let p = DMatrix::identity(d, d) - q * q.transpose();
    let svd = p.svd(true, false);
    let u = svd.u.expect("requested U");
    let cols: Vec<_> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > 0.5)
        .map(|(i, _)| u.column(i).into_owned())
        .collect();
    DMatrix::from_columns(&cols)
}

/// Sampled infimum of p/dist_V^{2ℓ} over a layered sphere sample.
pub fn ratio_inf_sample(
    p: &MultiplierPoly,
    v: &SubspaceUnion,
    ell: usize,
    n_samples: usize,
    boundary_layers: usize,
) -> Result<f64> {
    if n_samples == 0 {
        return Err(Error::InsufficientData("empty sample set".into()));
    }
    let s = SphereSample::build(p, v, n_samples, boundary_layers, 256);
    Ok(s.layer_minima(ell)
        .into_iter()
        .fold(f64::INFINITY, f64::min))
}

/// Relative positivity threshold on the sampled infimum.
pub const POSITIVITY_REL: f64 = 1e-8;
/// Largest last-layer shrink factor still read as "bounded below".
pub const STABLE_FACTOR: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderRow {
    pub ell: usize,
    /// 0 = uniform net, k ≥ 1 = boundary layer at distance ≈ 2^{−k}.
    pub layer: usize,
    pub min_ratio: f64,
}

#[derive(Debug, Clone)]
pub struct VanishingOrderReport {
    pub order: usize,
    /// Sampled infimum of p/dist^{2L}.
    pub infimum: f64,
    pub threshold: f64,
    pub rows: Vec<OrderRow>,
    /// Boundary-layer minima of p/dist^{2(L−1)}, layers 1..; shrinks ≈ 4× per layer.
    pub witness_below: Vec<f64>,
    /// Boundary-layer minima of p/dist^{2(L+1)}, layers 1..; grows ≈ 4× per layer.
    pub witness_above: Vec<f64>,
}

impl VanishingOrderReport {
    /// Shrink factors between consecutive boundary layers of the
    /// ℓ = L − 1 ratio; entry k compares layer k+1 with layer k+2.
    pub fn decay_factors(&self) -> Vec<f64> {
        self.witness_below.windows(2).map(|w| w[0] / w[1]).collect()
    }

    /// Smallest shrink factor over all layer pairs.
    pub fn min_decay_factor(&self) -> f64 {
        self.decay_factors()
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    }

    /// Smallest shrink factor among layers at distance ≤ 2^{−first_layer}.
    pub fn min_decay_factor_from(&self, first_layer: usize) -> f64 {
        self.decay_factors()
            .into_iter()
            .skip(first_layer.saturating_sub(1))
            .fold(f64::INFINITY, f64::min)
    }
}

fn ell_passes(minima: &[f64], threshold: f64) -> bool {
    let inf = minima.iter().copied().fold(f64::INFINITY, f64::min);
    let n = minima.len();
    let last_factor = if n >= 3 {
        minima[n - 2] / minima[n - 1]
    } else {
        1.0
    };
    inf >= threshold && last_factor < STABLE_FACTOR
}

/// Smallest ℓ ≤ ℓ_max whose sampled infimum is positive: above
/// `POSITIVITY_REL · max p` and no longer shrinking at the finest layer.
pub fn vanishing_order_estimate(
    p: &MultiplierPoly,
    v: &SubspaceUnion,
    ell_max: usize,
) -> Result<VanishingOrderReport> {
    if ell_max < 1 {
        return invalid("ℓ_max must be ≥ 1");
    }
    let s = SphereSample::build(p, v, 4096, 8, 256);
    let threshold = POSITIVITY_REL * s.p_max();
    let mut rows = Vec::new();
    let push_rows = |ell: usize, minima: &[f64], rows: &mut Vec<OrderRow>| {
        for (layer, &min_ratio) in minima.iter().enumerate() {
            rows.push(OrderRow {
                ell,
                layer,
                min_ratio,
            });
        }
    };
    for ell in 0..=ell_max {
        let minima = s.layer_minima(ell);
        push_rows(ell, &minima, &mut rows);
        if ell >= 1 && ell_passes(&minima, threshold) {
            let above = s.layer_minima(ell + 1);
            push_rows(ell + 1, &above, &mut rows);
            return Ok(VanishingOrderReport {
                order: ell,
                infimum: minima.iter().copied().fold(f64::INFINITY, f64::min),
                threshold,
                rows,
                witness_below: s.layer_minima(ell - 1)[1..].to_vec(),
                witness_above: above[1..].to_vec(),
            });
        }
    }
    Err(Error::Capability(format!(
        "vanishing order exceeds cap {ell_max}"
    )))
}

/// Curl basis well e^{⊙l}.
pub fn curl_basis_well(l: &MultiIndex) -> VecSym {
    VecSym::sym(SymTensor::basis(l))
}

/// Divergence basis well v ⊗ e^{⊙l}.
pub fn div_basis_well(v: &[f64], l: &MultiIndex) -> VecSym {
    VecSym::outer(v, &SymTensor::basis(l))
}

/// (L_div, L_curl) = (m − min_j l_j, max_j l_j).
pub fn compare_curl_div(l: &MultiIndex) -> (usize, usize) {
    let e = l.exponents();
    let m = l.order();
    let min = e.iter().copied().min().unwrap_or(0);
    let max = e.iter().copied().max().unwrap_or(0);
    (m - min, max)
}

/// Closed-form vanishing order for basis wells.
pub fn predicted_order(op: &HomogeneousOperator, l: &MultiIndex) -> usize {
    let (ld, lc) = compare_curl_div(l);
    match op.kind {
        OperatorKind::SaintVenant => lc,
        OperatorKind::Divergence { .. } => ld,
    }
}
