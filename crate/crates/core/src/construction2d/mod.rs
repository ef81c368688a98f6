//! Explicit two-dimensional upper-bound constructions.
//!
//! A [`Construction2D`] is a base field (one cell, or a branching assembly
//! on Ω = (0,1)² mirrored across y = ½) followed by a chain of linear maps
//! on components: intermediate lifts, axis swaps and the divergence
//! transform. Each map sends every output component to a multiple of one
//! base component, so energies follow from per-component base integrals.
//!
//! Wells are normalized so that the phase value f ∈ {1−λ, −λ} multiplies
//! the well difference M and the exterior datum is 0.

mod branching;
mod cell;
mod profile;

pub use branching::{Branching, BranchingParams, Generation};
pub use cell::{
    bell_table, default_cutoff_kind, potential_coefficients, Cell, CutoffCell, PointValues,
    PotentialRule, UnitCell, UnitCellParams,
};
pub use profile::{cutoff_profile, GammaProfile, ProfileKind, Transition};

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::fourier_bound::PhaseField;
use crate::operators::{div_residual_2d, sv_residual_2d, Grid2};
use crate::symtensor::{binomial, factorial};

/// Which compatibility operator annihilates the field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    /// Saint-Venant (higher-order curl).
    Curl,
    /// m-th order divergence.
    Divergence,
}

#[derive(Debug, Clone, PartialEq)]
enum Layout {
    Cell(Cell),
    Branching(Branching),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Construction2D {
    layout: Layout,
    base_order: usize,
    m: usize,
    /// Output component k equals `coef · base_src`.
    map: Vec<Option<(usize, f64)>>,
    swapped: bool,
    kind: FieldKind,
}

/// Values of the final field at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldValues {
    pub f: f64,
    pub u: Vec<f64>,
    pub chi: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualStats {
    pub grid: usize,
    pub h_grid: f64,
    pub max_abs: f64,
    /// Largest single derivative term of the residual sum.
    pub scale: f64,
    pub relative: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport {
    pub e_el: f64,
    pub e_surf: f64,
    pub e_eps: f64,
    pub epsilon: f64,
    pub resolution: usize,
    /// Largest |ũ₀ − f| or |ũ_k| (0 < k < m) met at unit-cell quadrature points.
    pub intended_defect: f64,
    pub residual: Option<ResidualStats>,
}

/// Per-component integrals of the base error, the interface length and the
/// intended-component defect.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseIntegrals {
    pub components: Vec<f64>,
    pub length: f64,
    pub defect: f64,
}

fn identity_map(m: usize) -> Vec<Option<(usize, f64)>> {
    (0..=m).map(|k| Some((k, 1.0))).collect()
}

impl Construction2D {
    fn from_layout(layout: Layout, m: usize) -> Self {
        Self {
            layout,
            base_order: m,
            m,
            map: identity_map(m),
            swapped: false,
            kind: FieldKind::Curl,
        }
    }

    pub fn order(&self) -> usize {
        self.m
    }

    pub fn base_order(&self) -> usize {
        self.base_order
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn is_swapped(&self) -> bool {
        self.swapped
    }

    pub fn lambda(&self) -> f64 {
        match &self.layout {
            Layout::Cell(c) => c.lambda(),
            Layout::Branching(b) => b.params().lambda,
        }
    }

    pub fn cell(&self) -> Option<&Cell> {
        match &self.layout {
            Layout::Cell(c) => Some(c),
            Layout::Branching(_) => None,
        }
    }

    pub fn branching_layout(&self) -> Option<&Branching> {
        match &self.layout {
            Layout::Branching(b) => Some(b),
            Layout::Cell(_) => None,
        }
    }

    /// `(src, coef)` for each output component.
    pub fn component_map(&self) -> &[Option<(usize, f64)>] {
        &self.map
    }

    /// Upper corner of the domain `[0,a]×[0,b]` in final coordinates.
    pub fn domain(&self) -> (f64, f64) {
        let (a, b) = match &self.layout {
            Layout::Cell(c) => (c.width(), c.height()),
            Layout::Branching(_) => (1.0, 1.0),
        };
        if self.swapped {
            (b, a)
        } else {
            (a, b)
        }
    }

    /// Components of M: χ̃ = f · well_components().
    pub fn well_components(&self) -> Vec<f64> {
        self.map
            .iter()
            .map(|e| e.map_or(0.0, |(s, c)| if s == 0 { c } else { 0.0 }))
            .collect()
    }

    /// Multiplicity-weighted norm `(Σ binom(m,k) M_k²)^{1/2}`.
    pub fn well_norm(&self) -> f64 {
        self.well_components()
            .iter()
            .enumerate()
            .map(|(k, w)| binomial(self.m, k) * w * w)
            .sum::<f64>()
            .sqrt()
    }

    fn to_base(&self, x: f64, y: f64) -> (f64, f64) {
        if self.swapped {
            (y, x)
        } else {
            (x, y)
        }
    }

    /// Base values at a base-coordinate point; None outside the domain.
    fn base_eval(&self, x: f64, y: f64) -> Option<PointValues> {
        match &self.layout {
            Layout::Cell(c) => {
                if x < 0.0 || y < 0.0 || x > c.width() || y > c.height() {
                    return None;
                }
                Some(c.eval(x, y))
            }
            Layout::Branching(b) => {
                if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&y) {
                    return None;
                }
                let mirrored = y < 0.5;
                let yy = if mirrored { 1.0 - y } else { y };
                let (j, xl, yl) = b.locate(x, yy);
                let mut pv = b.generations()[j].cell.eval(xl, yl);
                if mirrored {
                    for (k, v) in pv.v.iter_mut().enumerate() {
                        if k % 2 == 1 {
                            *v = -*v;
                        }
                    }
                    for (k, u) in pv.u.iter_mut().enumerate() {
                        if k % 2 == 1 {
                            *u = -*u;
                        }
                    }
                }
                Some(pv)
            }
        }
    }

    /// Field and target at a point; None outside the domain, where u = χ = 0.
    pub fn eval(&self, x: f64, y: f64) -> Option<FieldValues> {
        let (bx, by) = self.to_base(x, y);
        let pv = self.base_eval(bx, by)?;
        let u = self
            .map
            .iter()
            .map(|e| e.map_or(0.0, |(s, c)| c * pv.u[s]))
            .collect();
        let chi = self.well_components().iter().map(|w| w * pv.f).collect();
        Some(FieldValues { f: pv.f, u, chi })
    }

    /// Base potential ṽ at a point (before any component maps).
    pub fn base_values(&self, x: f64, y: f64) -> Option<PointValues> {
        let (bx, by) = self.to_base(x, y);
        self.base_eval(bx, by)
    }

    pub fn phase(&self, x: f64, y: f64) -> f64 {
        let (bx, by) = self.to_base(x, y);
        match &self.layout {
            Layout::Cell(c) => {
                if bx < 0.0 || by < 0.0 || bx > c.width() || by > c.height() {
                    0.0
                } else {
                    c.phase(bx, by)
                }
            }
            Layout::Branching(b) => {
                if !(0.0..=1.0).contains(&bx) || !(0.0..=1.0).contains(&by) {
                    return 0.0;
                }
                let yy = if by < 0.5 { 1.0 - by } else { by };
                let (j, xl, yl) = b.locate(bx, yy);
                b.generations()[j].cell.phase(xl, yl)
            }
        }
    }

    /// Distance to the nearest interface, cell edge or domain edge.
    pub fn interface_distance(&self, x: f64, y: f64) -> f64 {
        let (bx, by) = self.to_base(x, y);
        match &self.layout {
            Layout::Cell(c) => c.edge_distance(bx, by),
            Layout::Branching(b) => {
                let yy = if by < 0.5 { 1.0 - by } else { by };
                let (j, xl, yl) = b.locate(bx, yy);
                let d = b.generations()[j].cell.edge_distance(xl, yl);
                d.min(bx).min(1.0 - bx).min(by).min(1.0 - by)
            }
        }
    }

    /// Base per-component error integrals over the whole domain.
    pub fn base_integrals(&self, resolution: usize) -> Result<BaseIntegrals> {
        if resolution < 8 {
            return invalid(format!(
                "quadrature resolution must be ≥ 8 nodes, got {resolution}"
            ));
        }
        let n = self.base_order + 1;
        Ok(match &self.layout {
            Layout::Cell(c) => {
                let (components, defect) = c.component_integrals(resolution);
                BaseIntegrals {
                    components,
                    length: c.interface_length(resolution),
                    defect,
                }
            }
            Layout::Branching(b) => {
                let parts: Vec<(Vec<f64>, f64, f64)> = b
                    .generations()
                    .par_iter()
                    .map(|g| {
                        let (ci, defect) = g.cell.component_integrals(resolution);
                        let w = 2.0 * g.count;
                        let ci = ci.into_iter().map(|v| v * w).collect();
                        (ci, g.cell.interface_length(resolution) * w, defect)
                    })
                    .collect();
                let mut components = vec![0.0; n];
                let (mut length, mut defect) = (0.0, 0.0f64);
                for (ci, len, d) in parts {
                    components.iter_mut().zip(&ci).for_each(|(a, b)| *a += b);
                    length += len;
                    defect = defect.max(d);
                }
                BaseIntegrals {
                    components,
                    length,
                    defect,
                }
            }
        })
    }

    /// Elastic and interfacial energies from precomputed base integrals.
    pub fn energies_from(&self, base: &BaseIntegrals) -> (f64, f64) {
        let e_el = self
            .map
            .iter()
            .enumerate()
            .map(|(k, e)| {
                e.map_or(0.0, |(s, c)| {
                    binomial(self.m, k) * c * c * base.components[s]
                })
            })
            .sum();
        (e_el, self.well_norm() * base.length)
    }

    /// Samples the final field on cell centers of an n-wide grid.
    pub fn sample_components(&self, n: usize) -> (Vec<Grid2>, f64, Vec<bool>) {
        let (a, b) = self.domain();
        let h = a / n as f64;
        let ny = ((b / h).round() as usize).max(1);
        let m = self.m;
        let pts: Vec<(Vec<f64>, f64)> = (0..n * ny)
            .into_par_iter()
            .map(|p| {
                let (x, y) = ((p % n) as f64 * h + 0.5 * h, (p / n) as f64 * h + 0.5 * h);
                let u = self.eval(x, y).map_or(vec![0.0; m + 1], |v| v.u);
                (u, self.interface_distance(x, y))
            })
            .collect();
        let comps = (0..=m)
            .map(|k| Grid2 {
                nx: n,
                ny,
                data: pts.iter().map(|(u, _)| u[k]).collect(),
            })
            .collect();
        let band = (m + 2) as f64 * h;
        let keep = pts.iter().map(|(_, d)| *d >= band).collect();
        (comps, h, keep)
    }

    /// Discrete compatibility residual on an n-wide grid, away from
    /// interfaces, cell edges and the domain boundary.
    pub fn residual(&self, n: usize) -> Result<ResidualStats> {
        let (comps, h, keep) = self.sample_components(n);
        let op = |c: &[Grid2]| match self.kind {
            FieldKind::Curl => sv_residual_2d(c, h),
            FieldKind::Divergence => div_residual_2d(c, h),
        };
        let total = op(&comps)?;
        let masked_max = |g: &Grid2| {
            g.data
                .iter()
                .zip(&keep)
                .filter(|(v, k)| **k && v.is_finite())
                .fold(0.0f64, |a, (v, _)| a.max(v.abs()))
        };
        let mut scale: f64 = 0.0;
        for k in 0..comps.len() {
            let single: Vec<Grid2> = comps
                .iter()
                .enumerate()
                .map(|(j, g)| {
                    if j == k {
                        g.clone()
                    } else {
                        Grid2::zeros(g.nx, g.ny)
                    }
                })
                .collect();
            scale = scale.max(masked_max(&op(&single)?));
        }
        let max_abs = masked_max(&total);
        let points = keep
            .iter()
            .zip(&total.data)
            .filter(|(k, v)| **k && v.is_finite())
            .count();
        if points == 0 {
            return Err(Error::InsufficientData(format!(
                "no grid point of the {n}-wide grid is away from interfaces"
            )));
        }
        Ok(ResidualStats {
            grid: n,
            h_grid: h,
            max_abs,
            scale,
            relative: if scale > 0.0 { max_abs / scale } else { 0.0 },
            points,
        })
    }

    /// Phase field of f on the padded box [−½, 3/2]² with `n_omega` cells
    /// across Ω. Only for constructions on the unit square.
    pub fn rasterize(&self, n_omega: usize) -> Result<PhaseField> {
        if self.domain() != (1.0, 1.0) {
            return invalid("rasterization needs a construction on the unit square");
        }
        PhaseField::padded_unit_box(2, n_omega, self.lambda(), |x| {
            let f = self.phase(x[0], x[1]);
            if f > 0.0 {
                1
            } else if f < 0.0 {
                -1
            } else {
                0
            }
        })
    }

    /// Interface curves in final coordinates. Generations with more than
    /// `max_cells` cells are skipped.
    pub fn polylines(&self, samples: usize, max_cells: usize) -> Vec<Vec<(f64, f64)>> {
        let mut out = Vec::new();
        match &self.layout {
            Layout::Cell(c) => out.extend(c.curves(samples)),
            Layout::Branching(b) => {
                for g in b.generations() {
                    if g.count > max_cells as f64 {
                        continue;
                    }
                    let l = g.cell.width();
                    let curves = g.cell.curves(samples);
                    for k in 0..g.count as usize {
                        for c in &curves {
                            let up: Vec<(f64, f64)> = c
                                .iter()
                                .map(|&(x, y)| (x + k as f64 * l, g.y0 + y))
                                .collect();
                            let down = up.iter().map(|&(x, y)| (x, 1.0 - y)).collect();
                            out.push(up);
                            out.push(down);
                        }
                    }
                }
            }
        }
        if self.swapped {
            for c in out.iter_mut() {
                for p in c.iter_mut() {
                    *p = (p.1, p.0);
                }
            }
        }
        out
    }
}

/// Single unit cell on (0,l)×(0,h).
pub fn unit_cell(params: UnitCellParams) -> Result<Construction2D> {
    let m = params.m;
    Ok(Construction2D::from_layout(
        Layout::Cell(Cell::Unit(UnitCell::new(params)?)),
        m,
    ))
}

/// Single cut-off layer on (0,l)×(0,h).
pub fn cutoff_layer(l: f64, h: f64, lambda: f64, m: usize) -> Result<Construction2D> {
    Ok(Construction2D::from_layout(
        Layout::Cell(Cell::Cutoff(CutoffCell::new(l, h, lambda, m)?)),
        m,
    ))
}

/// Branching assembly on Ω = (0,1)² for the well e₁^{⊙m}.
pub fn branching(params: BranchingParams) -> Result<Construction2D> {
    let m = params.m;
    Ok(Construction2D::from_layout(
        Layout::Branching(Branching::new(params)?),
        m,
    ))
}

/// Lifting coefficient `(−1)^{l−m} 2^{m−l} l! k! / (m! (k−(m−l))!)`.
pub fn lift_coefficient(m: usize, l: usize, k: usize) -> f64 {
    let s = m - l;
    let sign = if s.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * 2f64.powi(s as i32) * factorial(l) * factorial(k) / (factorial(m) * factorial(k - s))
}

/// Lifts an order-l curl-free construction for e₁^{⊙l} to order m, giving
/// the well direction e₁^{⊙l}⊙e₂^{⊙(m−l)}. Needs l ≥ m − l; use
/// [`swap_axes`] afterwards for the mirrored exponents.
pub fn intermediate_lift(w: &Construction2D, m: usize, l: usize) -> Result<Construction2D> {
    if w.kind != FieldKind::Curl {
        return invalid("lift applies to curl-free constructions");
    }
    if w.m != l {
        return Err(Error::DimensionMismatch {
            expected: l,
            got: w.m,
        });
    }
    if l == 0 || l >= m {
        return invalid(format!(
            "lift needs 0 < l < m, got l={l}, m={m}; use branching directly"
        ));
    }
    if l < m - l {
        return invalid(format!(
            "lift needs l ≥ m − l, got l={l}, m={m}; lift with m − l and swap axes"
        ));
    }
    let s = m - l;
    let map = (0..=m)
        .map(|k| {
            if k < s {
                None
            } else {
                w.map[k - s].map(|(src, c)| (src, c * lift_coefficient(m, l, k)))
            }
        })
        .collect();
    Ok(Construction2D {
        map,
        m,
        ..w.clone()
    })
}

/// Transposes x and y; component k becomes component m − k.
pub fn swap_axes(c: &Construction2D) -> Construction2D {
    let map = c.map.iter().rev().cloned().collect();
    Construction2D {
        map,
        swapped: !c.swapped,
        ..c.clone()
    }
}

/// `α(m,j) = (−1)^j 2^{−m} binom(m,j)`.
pub fn divergence_alpha(m: usize, j: usize) -> f64 {
    let sign = if j.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * 0.5f64.powi(m as i32) * binomial(m, j)
}

/// Maps a curl-free field to a divergence-free one: ũ_{m−j} = α(m,j) ũ′_j.
pub fn divergence_transform(c: &Construction2D) -> Result<Construction2D> {
    if c.kind != FieldKind::Curl {
        return invalid("divergence transform expects a curl-free construction");
    }
    let m = c.m;
    let map = (0..=m)
        .map(|k| c.map[m - k].map(|(s, v)| (s, v * divergence_alpha(m, m - k))))
        .collect();
    Ok(Construction2D {
        map,
        kind: FieldKind::Divergence,
        ..c.clone()
    })
}

/// Construction for the well e₁^{⊙l₁}⊙e₂^{⊙l₂} built from a branching
/// assembly of order max(l₁, l₂), with N coarse cells. A divergence-free
/// field for this well is the transform of the curl-free one for
/// e₁^{⊙l₂}⊙e₂^{⊙l₁}.
pub fn well_construction(
    l1: usize,
    l2: usize,
    n: usize,
    lambda: f64,
    kind: FieldKind,
) -> Result<Construction2D> {
    let big = l1.max(l2);
    if big == 0 {
        return invalid("well exponents must not both vanish");
    }
    well_construction_from(l1, l2, kind, BranchingParams::new(n, big, lambda)?)
}

/// As [`well_construction`] with explicit branching parameters of order
/// max(l₁, l₂).
pub fn well_construction_from(
    l1: usize,
    l2: usize,
    kind: FieldKind,
    params: BranchingParams,
) -> Result<Construction2D> {
    let (c1, c2) = match kind {
        FieldKind::Curl => (l1, l2),
        FieldKind::Divergence => (l2, l1),
    };
    let m = c1 + c2;
    let big = c1.max(c2);
    if params.m != big {
        return Err(Error::DimensionMismatch {
            expected: big,
            got: params.m,
        });
    }
    let base = branching(params)?;
    let mut c = if big == m {
        base
    } else {
        intermediate_lift(&base, m, big)?
    };
    if c2 > c1 {
        c = swap_axes(&c);
    }
    if kind == FieldKind::Divergence {
        c = divergence_transform(&c)?;
    }
    Ok(c)
}

/// Energies of a single cell.
pub fn cell_energy(c: &Construction2D, resolution: usize) -> Result<EnergyReport> {
    if c.cell().is_none() {
        return invalid("cell_energy expects a single unit cell or cut-off layer");
    }
    construction_energy(c, 0.0, resolution)
}

/// `E_ε = E_el + ε E_surf` by composite Gauss–Legendre quadrature.
pub fn construction_energy(
    c: &Construction2D,
    eps: f64,
    resolution: usize,
) -> Result<EnergyReport> {
    let base = c.base_integrals(resolution)?;
    let (e_el, e_surf) = c.energies_from(&base);
    Ok(EnergyReport {
        e_el,
        e_surf,
        e_eps: e_el + eps * e_surf,
        epsilon: eps,
        resolution,
        intended_defect: base.defect,
        residual: None,
    })
}

/// As [`construction_energy`], plus the residual on an `grid`-wide sampling.
pub fn construction_energy_with_residual(
    c: &Construction2D,
    eps: f64,
    resolution: usize,
    grid: usize,
) -> Result<EnergyReport> {
    let mut r = construction_energy(c, eps, resolution)?;
    r.residual = Some(c.residual(grid)?);
    Ok(r)
}
