//! Self-similar refinement of unit cells towards the top edge of Ω₊.

use crate::error::{invalid, Result};

use super::cell::{default_cutoff_kind, Cell, CutoffCell, PotentialRule, UnitCell, UnitCellParams};
use super::profile::{GammaProfile, ProfileKind};

#[derive(Debug, Clone, PartialEq)]
pub struct BranchingParams {
    /// Number of cells in the coarsest generation.
    pub n: usize,
    pub theta: f64,
    pub m: usize,
    pub lambda: f64,
    pub gamma: GammaProfile,
    pub rule: PotentialRule,
    /// Profile of the cut-off layer φ.
    pub cutoff: ProfileKind,
    /// Caps the last unit-cell generation below j₀ (for grid-resolvable
    /// rasters); the cut-off layer then follows the capped generation.
    pub max_generation: Option<usize>,
}

impl BranchingParams {
    /// θ at the midpoint of its admissible interval, mollifier γ with δ = 0.1.
    pub fn new(n: usize, m: usize, lambda: f64) -> Result<Self> {
        let (lo, hi) = Self::theta_range(m);
        Self::with_theta(n, m, lambda, 0.5 * (lo + hi))
    }

    pub fn with_theta(n: usize, m: usize, lambda: f64, theta: f64) -> Result<Self> {
        let p = Self {
            n,
            theta,
            m,
            lambda,
            gamma: GammaProfile::mollifier(0.1, m.max(1) + 1)?,
            rule: PotentialRule::default(),
            cutoff: default_cutoff_kind(m),
            max_generation: None,
        };
        p.validate()?;
        Ok(p)
    }

    /// Open interval `(2^{−2m/(2m−1)}, ½)`.
    pub fn theta_range(m: usize) -> (f64, f64) {
        let m = m as f64;
        (2f64.powf(-2.0 * m / (2.0 * m - 1.0)), 0.5)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return invalid("tensor order must be ≥ 1");
        }
        if self.n < 4 {
            return invalid(format!("branching needs N ≥ 4, got {}", self.n));
        }
        let (lo, hi) = Self::theta_range(self.m);
        if !(self.theta > lo && self.theta < hi) {
            return invalid(format!("θ = {} outside ({lo}, {hi})", self.theta));
        }
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            return invalid(format!("λ must lie in (0,1), got {}", self.lambda));
        }
        Ok(())
    }

    pub fn width(&self, j: usize) -> f64 {
        0.5f64.powi(j as i32) / self.n as f64
    }

    /// `h_j = y_{j+1} − y_j = θ^j (1 − θ) / 2`, computed without cancellation.
    pub fn height(&self, j: usize) -> f64 {
        self.theta.powi(j as i32) * (1.0 - self.theta) / 2.0
    }

    pub fn y(&self, j: usize) -> f64 {
        1.0 - self.theta.powi(j as i32) / 2.0
    }

    /// Last generation built from unit cells.
    pub fn j0(&self) -> usize {
        let mut j = 0;
        while self.width(j + 1) < self.height(j + 1) {
            j += 1;
        }
        j
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Generation {
    pub index: usize,
    pub y0: f64,
    /// Distance from the top edge y = 1 to the bottom of this generation.
    pub top_gap: f64,
    pub count: f64,
    pub cell: Cell,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branching {
    params: BranchingParams,
    gens: Vec<Generation>,
}

impl Branching {
    pub fn new(params: BranchingParams) -> Result<Self> {
        params.validate()?;
        let j0 = params
            .max_generation
            .map_or(params.j0(), |g| g.min(params.j0()));
        let mut gens = Vec::with_capacity(j0 + 2);
        for j in 0..=j0 {
            let up = UnitCellParams {
                l: params.width(j),
                h: params.height(j),
                lambda: params.lambda,
                m: params.m,
                gamma: params.gamma.clone(),
                rule: params.rule,
            };
            gens.push(Generation {
                index: j,
                y0: params.y(j),
                top_gap: params.theta.powi(j as i32) / 2.0,
                count: params.n as f64 * 2f64.powi(j as i32),
                cell: Cell::Unit(UnitCell::new(up)?),
            });
        }
        let jc = j0 + 1;
        let hc = params.theta.powi(jc as i32) / 2.0;
        gens.push(Generation {
            index: jc,
            y0: params.y(jc),
            top_gap: hc,
            count: params.n as f64 * 2f64.powi(jc as i32),
            // Height θ^{j₀+1}/2 may exceed the width; the layer is used anyway.
            cell: Cell::Cutoff(CutoffCell::new_unchecked(
                params.width(jc),
                hc,
                params.lambda,
                params.m,
                params.cutoff,
            )?),
        });
        Ok(Self { params, gens })
    }

    pub fn params(&self) -> &BranchingParams {
        &self.params
    }

    pub fn generations(&self) -> &[Generation] {
        &self.gens
    }

    pub fn j0(&self) -> usize {
        self.gens.len() - 2
    }

    /// Locates a point of Ω₊ = [0,1]×[½,1]: generation index and local
    /// coordinates.
    pub fn locate(&self, x: f64, y: f64) -> (usize, f64, f64) {
        let s = (1.0 - y).max(0.0);
        let last = self.gens.len() - 1;
        let theta = self.params.theta;
        let mut j = if s > 0.0 {
            ((2.0 * s).ln() / theta.ln()).floor().max(0.0) as usize
        } else {
            last
        };
        j = j.min(last);
        while j > 0 && s > self.gens[j].top_gap {
            j -= 1;
        }
        while j < last && s <= self.gens[j + 1].top_gap {
            j += 1;
        }
        let g = &self.gens[j];
        let l = g.cell.width();
        let k = (x / l).floor().clamp(0.0, g.count - 1.0);
        (j, x - k * l, g.top_gap - s)
    }
}
