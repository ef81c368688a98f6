//! ε sweeps of the upper-bound constructions and of the Fourier-side
//! lower-bound functional.

use rayon::prelude::*;

use crate::construction2d::{
    well_construction, well_construction_from, BranchingParams, FieldKind,
};
use crate::error::{Error, Result};
use crate::fourier_bound::{spectral_energy_with, PhaseField, PowerSpectrum};
use crate::multiplier::{curl_basis_well, predicted_order, zero_set};
use crate::operators::HomogeneousOperator;
use crate::symtensor::MultiIndex;

use super::config::{OperatorChoice, SweepConfig};
use super::fit::{fit_slope, ScalingFit};

/// One CSV row. Flagged rows are reported but left out of fits.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub epsilon: f64,
    pub n: usize,
    pub e_el: f64,
    pub e_surf: f64,
    pub e_total: f64,
    pub flag: bool,
}

/// Fewest pixels across a coarse cell for a rasterized candidate.
pub const MIN_CELL_PIXELS: usize = 8;

fn field_kind(op: OperatorChoice) -> FieldKind {
    match op {
        OperatorChoice::Curl => FieldKind::Curl,
        OperatorChoice::Divergence => FieldKind::Divergence,
    }
}

/// Runs `f` on a pool with the configured thread count.
pub fn with_pool<T: Send>(cfg: &SweepConfig, f: impl FnOnce() -> T + Send) -> Result<T> {
    match cfg.threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}

/// Candidate N around `ε^{−1/(2L+1)}`: factors ½, 1, 2 and the bracketing
/// powers of two, restricted to N ≥ 4. The flag is set when the nominal
/// N is below 4.
pub fn n_candidates(eps: f64, order: usize) -> (Vec<usize>, bool) {
    let t = eps.powf(-1.0 / (2.0 * order as f64 + 1.0));
    // ⌊·⌋ forgiving round-off, so that 1e-3^{−1/3} gives 10 and not 9
    let floor = |x: f64| (x * (1.0 + 1e-12)).floor();
    let flag = floor(t) < 4.0;
    let mut c: Vec<usize> = [0.5, 1.0, 2.0]
        .iter()
        .map(|s| floor(s * t) as usize)
        .collect();
    let p = t.log2();
    c.push(2f64.powf(p.floor()) as usize);
    c.push(2f64.powf(p.ceil()) as usize);
    c.retain(|&n| n >= 4);
    if c.is_empty() {
        c.push(4);
    }
    c.sort_unstable();
    c.dedup();
    (c, flag)
}

/// `(E_el, E_surf)` of the upper-bound construction with N coarse cells.
pub fn upper_energies(cfg: &SweepConfig, n: usize) -> Result<(f64, f64)> {
    let c = well_construction(cfg.l.0, cfg.l.1, n, cfg.lambda, field_kind(cfg.operator))?;
    let base = c.base_integrals(cfg.resolution)?;
    Ok(c.energies_from(&base))
}

/// Minimum over candidate N of E_ε for each ε, in ε order.
pub fn sweep_upper(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let order = cfg.order();
    let cands: Vec<(Vec<usize>, bool)> = cfg.eps.iter().map(|&e| n_candidates(e, order)).collect();
    let mut all: Vec<usize> = cands.iter().flat_map(|c| c.0.iter().copied()).collect();
    all.sort_unstable();
    all.dedup();
    let energies: Vec<(usize, (f64, f64))> = with_pool(cfg, || {
        all.par_iter()
            .map(|&n| upper_energies(cfg, n).map(|e| (n, e)))
            .collect::<Result<Vec<_>>>()
    })??;
    let lookup = |n: usize| {
        energies
            .iter()
            .find(|(k, _)| *k == n)
            .map(|(_, e)| *e)
            .expect("evaluated")
    };
    Ok(cfg
        .eps
        .iter()
        .zip(&cands)
        .map(|(&eps, (ns, flag))| {
            let mut best: Option<SweepRow> = None;
            for &n in ns {
                let (e_el, e_surf) = lookup(n);
                let row = SweepRow {
                    epsilon: eps,
                    n,
                    e_el,
                    e_surf,
                    e_total: e_el + eps * e_surf,
                    flag: *flag,
                };
                if best.as_ref().is_none_or(|b| row.e_total < b.e_total) {
                    best = Some(row);
                }
            }
            best.expect("non-empty candidate list")
        })
        .collect())
}

/// One rasterized lower-bound candidate with its spectral energy parts.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub label: String,
    pub n: usize,
    pub e_el: f64,
    pub e_surf: f64,
    /// Finest branching candidate the grid resolves.
    pub finest: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LowerSweep {
    pub rows: Vec<SweepRow>,
    pub candidates: Vec<Candidate>,
    /// Candidates left out because the grid cannot resolve them.
    pub skipped: Vec<String>,
    pub order: usize,
}

/// Last generation whose cut-off successor is still at least
/// `MIN_CELL_PIXELS / 2` pixels wide.
pub fn resolvable_generation(n: usize, n_omega: usize) -> usize {
    let mut j = 0;
    while n_omega as f64 / (n as f64 * 2f64.powi(j as i32 + 2)) >= (MIN_CELL_PIXELS / 2) as f64 {
        j += 1;
    }
    j
}

fn half_octaves(lo: usize, hi: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (0..)
        .map(|i| (lo as f64 * 2f64.powf(i as f64 / 2.0)).round() as usize)
        .take_while(|&n| n <= hi)
        .collect();
    v.dedup();
    v
}

/// Rasterized branching fields and laminates with their Fourier energies.
pub fn lower_candidates(cfg: &SweepConfig) -> Result<(Vec<Candidate>, Vec<String>, usize)> {
    cfg.validate()?;
    let (l1, l2) = cfg.l;
    let op = match cfg.operator {
        OperatorChoice::Curl => HomogeneousOperator::saint_venant(2, cfg.m),
        OperatorChoice::Divergence => HomogeneousOperator::divergence(2, cfg.m, 1),
    };
    let idx = MultiIndex::new(vec![l1, l2]);
    let v = zero_set(&op, &curl_basis_well(&idx))?;
    let order = predicted_order(&op, &idx);
    let n_omega = cfg.lower_grid;
    let n_max = n_omega / MIN_CELL_PIXELS;
    let mut skipped = Vec::new();
    for n in half_octaves(4, 4 * n_max)
        .into_iter()
        .filter(|&n| n > n_max)
    {
        skipped.push(format!(
            "branching N={n}: coarse cells narrower than {MIN_CELL_PIXELS} pixels"
        ));
    }
    let branch_ns = half_octaves(4, n_max);
    let kind = field_kind(cfg.operator);
    let mut jobs: Vec<(String, usize, bool, Option<(f64, usize)>)> = branch_ns
        .iter()
        .map(|&n| {
            (
                format!("branching N={n}"),
                n,
                n == *branch_ns.last().unwrap_or(&0),
                None,
            )
        })
        .collect();
    for k in half_octaves(2, n_max) {
        for axis in 0..2 {
            jobs.push((
                format!("laminate k={k} axis={axis}"),
                k,
                false,
                Some((1.0 / k as f64, axis)),
            ));
        }
    }
    let cands = with_pool(cfg, || {
        jobs.par_iter()
            .map(|(label, n, finest, lam)| {
                let field = match lam {
                    None => {
                        let mut p = BranchingParams::new(*n, l1.max(l2), cfg.lambda)?;
                        p.max_generation = Some(resolvable_generation(*n, n_omega));
                        well_construction_from(l1, l2, kind, p)?.rasterize(n_omega)?
                    }
                    Some((period, axis)) => {
                        PhaseField::laminate(2, n_omega, *period, *axis, cfg.lambda)?
                    }
                };
                let spec = PowerSpectrum::of(&field);
                let r = spectral_energy_with(&field, &spec, &v, order, 0.0);
                Ok(Candidate {
                    label: label.clone(),
                    n: *n,
                    e_el: r.e_el,
                    e_surf: r.e_surf,
                    finest: *finest,
                })
            })
            .collect::<Result<Vec<_>>>()
    })??;
    Ok((cands, skipped, order))
}

/// Minimum over the candidate family of Ẽ_el + ε Ẽ_surf for each ε. A row
/// is flagged when its minimizer is the finest resolvable branching field.
pub fn sweep_lower(cfg: &SweepConfig) -> Result<LowerSweep> {
    let (candidates, skipped, order) = lower_candidates(cfg)?;
    let rows = cfg
        .eps
        .iter()
        .map(|&eps| {
            let best = candidates
                .iter()
                .min_by(|a, b| (a.e_el + eps * a.e_surf).total_cmp(&(b.e_el + eps * b.e_surf)))
                .expect("non-empty family");
            SweepRow {
                epsilon: eps,
                n: best.n,
                e_el: best.e_el,
                e_surf: best.e_surf,
                e_total: best.e_el + eps * best.e_surf,
                flag: best.finest,
            }
        })
        .collect();
    Ok(LowerSweep {
        rows,
        candidates,
        skipped,
        order,
    })
}

/// Fit over the unflagged rows.
pub fn fit_rows(rows: &[SweepRow], order: Option<usize>) -> Result<ScalingFit> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| !r.flag)
        .map(|r| (r.epsilon, r.e_total))
        .collect();
    fit_slope(&pts, order)
}
