//! Single cells: the branching unit cell and the cut-off layer.
//!
//! Coordinates are local, `(x, y) ∈ [0,l]×[0,h]`. Component arrays follow the
//! d = 2 convention: entry k holds the tensor component with k twos.

use gauss_quad::GaussLegendre;

use crate::error::{invalid, Result};
use crate::symtensor::binomial;

use super::profile::{cutoff_profile, GammaProfile, ProfileKind, Transition};

/// Smoothstep of class C^{m+2}: enough smoothness for the order-m residual
/// and its O(h²) difference error, with moderate derivative constants.
pub fn default_cutoff_kind(m: usize) -> ProfileKind {
    ProfileKind::Smoothstep { class: m + 2 }
}

/// How the higher potential components ṽ_k are derived from ṽ₀.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PotentialRule {
    /// True y-derivatives of the moving-breakpoint antiderivatives (Faà di
    /// Bruno terms included). Then ũ = D^sym ṽ holds exactly a.e.
    #[default]
    Recursive,
    /// Antiderivatives in x of the classical piecewise ∂₂^k ṽ₀, which keeps
    /// only the first Faà di Bruno term.
    Iterated,
}

/// Values of one field at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointValues {
    /// Phase function, 1−λ, −λ or 0.
    pub f: f64,
    /// Potential components ṽ₀..ṽ_{m−1}.
    pub v: Vec<f64>,
    /// Field components ũ₀..ũ_m.
    pub u: Vec<f64>,
}

/// Partial Bell polynomials `B[n][k]` for n ≤ order, from `x[i] = x_{i+1}`.
pub fn bell_table(x: &[f64], order: usize) -> Vec<Vec<f64>> {
    let mut b = vec![vec![0.0; order + 1]; order + 1];
    b[0][0] = 1.0;
    for n in 1..=order {
        for k in 1..=n {
            let mut acc = 0.0;
            for i in 1..=n - k + 1 {
                acc += binomial(n - 1, i - 1) * x[i - 1] * b[n - i][k - 1];
            }
            b[n][k] = acc;
        }
    }
    b
}

/// `(t)_+^n / n!`, with `(t)_+^0` the Heaviside function (1 at t = 0).
fn ramp(t: f64, n: usize) -> f64 {
    if t < 0.0 {
        return 0.0;
    }
    let mut v = 1.0;
    for j in 1..=n {
        v *= t / j as f64;
    }
    v
}

/// `C_k = Π_{j=1}^k (−j/(m−j))`.
pub fn potential_coefficients(m: usize) -> Vec<f64> {
    let mut c = vec![1.0; m.max(1)];
    for k in 1..m {
        c[k] = c[k - 1] * (-(k as f64) / (m - k) as f64);
    }
    c
}

/// Gauss–Legendre nodes and weights on [−1, 1].
pub(crate) fn gl_rule(n: usize) -> Vec<(f64, f64)> {
    GaussLegendre::new(n.max(2))
        .expect("degree ≥ 2")
        .as_node_weight_pairs()
        .to_vec()
}

/// Composite rule on [a,b]: `panels` equal panels with the given base rule.
pub(crate) fn composite(rule: &[(f64, f64)], a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(rule.len() * panels);
    if b <= a || panels == 0 {
        return out;
    }
    let w = (b - a) / panels as f64;
    for p in 0..panels {
        let lo = a + p as f64 * w;
        for &(x, wt) in rule {
            out.push((lo + 0.5 * w * (x + 1.0), 0.5 * w * wt));
        }
    }
    out
}

pub(crate) const PANEL_NODES: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct UnitCellParams {
    pub l: f64,
    pub h: f64,
    pub lambda: f64,
    pub m: usize,
    pub gamma: GammaProfile,
    pub rule: PotentialRule,
}

impl UnitCellParams {
    /// Mollifier profile with offset δ and the default potential rule.
    pub fn new(l: f64, h: f64, lambda: f64, m: usize, delta: f64) -> Result<Self> {
        let p = Self {
            l,
            h,
            lambda,
            m,
            gamma: GammaProfile::mollifier(delta, m.max(1) + 1)?,
            rule: PotentialRule::default(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_rule(mut self, rule: PotentialRule) -> Self {
        self.rule = rule;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return invalid("tensor order must be ≥ 1");
        }
        if !(self.l > 0.0 && self.l < self.h && self.h <= 1.0) {
            return invalid(format!(
                "unit cell needs 0 < l < h ≤ 1, got l={} h={}",
                self.l, self.h
            ));
        }
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            return invalid(format!("λ must lie in (0,1), got {}", self.lambda));
        }
        Ok(())
    }
}

/// Signs of the four breakpoint jumps of f.
const SIGNS: [f64; 4] = [1.0, -1.0, 1.0, -1.0];

#[derive(Debug, Clone, PartialEq)]
pub struct UnitCell {
    p: UnitCellParams,
    alpha: [f64; 4],
    beta: [f64; 4],
    coef: Vec<f64>,
}

impl UnitCell {
    pub fn new(p: UnitCellParams) -> Result<Self> {
        p.validate()?;
        Ok(Self::new_unchecked(p))
    }

    pub(crate) fn new_unchecked(p: UnitCellParams) -> Self {
        let (l, lam) = (p.l, p.lambda);
        let alpha = [
            lam * l / 4.0,
            (2.0 - lam) * l / 4.0,
            (2.0 + lam) * l / 4.0,
            (4.0 - lam) * l / 4.0,
        ];
        let b = lam * l / 4.0;
        let beta = [b, b, -b, -b];
        let coef = potential_coefficients(p.m);
        Self {
            p,
            alpha,
            beta,
            coef,
        }
    }

    pub fn params(&self) -> &UnitCellParams {
        &self.p
    }

    /// `a_i^{(r)}(y)` for r = 0..=order, one row per curve.
    pub fn breakpoint_jets(&self, y: f64, order: usize) -> [Vec<f64>; 4] {
        let g = self.p.gamma.derivatives(y / self.p.h, order);
        std::array::from_fn(|i| {
            (0..=order)
                .map(|r| {
                    if r == 0 {
                        self.alpha[i] + self.beta[i] * g[0]
                    } else {
                        self.beta[i] * g[r] / self.p.h.powi(r as i32)
                    }
                })
                .collect()
        })
    }

    pub fn breakpoints(&self, y: f64) -> [f64; 4] {
        let j = self.breakpoint_jets(y, 0);
        [j[0][0], j[1][0], j[2][0], j[3][0]]
    }

    /// Positions where f actually jumps at height y.
    pub fn interfaces(&self, y: f64) -> Vec<f64> {
        let a = self.breakpoints(y);
        if a[2] > a[1] {
            a.to_vec()
        } else {
            vec![a[0], a[3]]
        }
    }

    pub fn phase(&self, x: f64, y: f64) -> f64 {
        let a = self.breakpoints(y);
        (1.0 - self.p.lambda)
            - a.iter()
                .zip(SIGNS)
                .map(|(&ai, s)| s * ramp(x - ai, 0))
                .sum::<f64>()
    }

    /// Evaluates `∂_y^k I^n f` for every needed (n, k) at once.
    fn kernel(
        &self,
        x: f64,
        jets: &[Vec<f64>; 4],
        bells: &[Vec<Vec<f64>>; 4],
        n: usize,
        k: usize,
    ) -> f64 {
        let mut s = 0.0;
        if k == 0 {
            s += (1.0 - self.p.lambda) * ramp(x, n);
            for i in 0..4 {
                s -= SIGNS[i] * ramp(x - jets[i][0], n);
            }
            return s;
        }
        let rmax = match self.p.rule {
            PotentialRule::Recursive => k.min(n),
            PotentialRule::Iterated => 1,
        };
        for i in 0..4 {
            let t = x - jets[i][0];
            if t < 0.0 {
                continue;
            }
            let mut inner = 0.0;
            for r in 1..=rmax {
                let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
                inner += sign * bells[i][k][r] * ramp(t, n - r);
            }
            s -= SIGNS[i] * inner;
        }
        s
    }

    fn bells(&self, jets: &[Vec<f64>; 4]) -> [Vec<Vec<f64>>; 4] {
        std::array::from_fn(|i| bell_table(&jets[i][1..], self.p.m))
    }

    pub fn eval(&self, x: f64, y: f64) -> PointValues {
        let m = self.p.m;
        let jets = self.breakpoint_jets(y, m);
        let bells = self.bells(&jets);
        let t = |n, k| self.kernel(x, &jets, &bells, n, k);
        let c = &self.coef;
        let v: Vec<f64> = (0..m).map(|k| c[k] * t(k + 1, k)).collect();
        let mut u = vec![0.0; m + 1];
        u[0] = t(0, 0);
        for k in 1..m {
            let tk = t(k, k);
            let d1 = c[k] * tk;
            let d2 = c[k - 1] * tk;
            u[k] = (m - k) as f64 / m as f64 * d1 + k as f64 / m as f64 * d2;
        }
        u[m] = c[m - 1] * t(m, m);
        PointValues {
            f: self.phase(x, y),
            v,
            u,
        }
    }

    /// Classical piecewise `∂₂^k ṽ₀(x, y)`.
    pub fn dy_v0(&self, x: f64, y: f64, k: usize) -> f64 {
        let jets = self.breakpoint_jets(y, k);
        if k == 0 {
            return self.eval(x, y).v[0];
        }
        jets.iter()
            .zip(SIGNS)
            .map(|(j, s)| if x >= j[0] { s * j[k] } else { 0.0 })
            .sum()
    }

    fn y_nodes(&self, resolution: usize) -> Vec<(f64, f64)> {
        let h = self.p.h;
        let d = self.p.gamma.delta();
        let rule = gl_rule(PANEL_NODES);
        let panels = resolution.div_ceil(PANEL_NODES);
        let mut ys = composite(&rule, 0.0, d * h, 1);
        ys.extend(composite(&rule, d * h, (1.0 - d) * h, panels));
        ys.extend(composite(&rule, (1.0 - d) * h, h, 1));
        ys
    }

    fn x_nodes(&self, y: f64) -> Vec<(f64, f64)> {
        let mut cuts = self.breakpoints(y).to_vec();
        cuts.push(0.0);
        cuts.push(self.p.l);
        cuts.sort_by(f64::total_cmp);
        let rule = gl_rule(self.p.m + 1);
        cuts.windows(2)
            .flat_map(|w| composite(&rule, w[0], w[1], 1))
            .collect()
    }

    /// `∬ (ũ_k − χ̃_k)²` per component, with χ̃ = (f, 0, …, 0), plus the
    /// largest defect of the components that must vanish.
    pub fn component_integrals(&self, resolution: usize) -> (Vec<f64>, f64) {
        let m = self.p.m;
        let mut acc = vec![0.0; m + 1];
        let mut defect: f64 = 0.0;
        for (y, wy) in self.y_nodes(resolution) {
            for (x, wx) in self.x_nodes(y) {
                let pv = self.eval(x, y);
                for k in 0..=m {
                    let e = if k == 0 { pv.u[0] - pv.f } else { pv.u[k] };
                    acc[k] += wy * wx * e * e;
                    if k < m {
                        defect = defect.max(e.abs());
                    }
                }
            }
        }
        (acc, defect)
    }

    /// Total length of the jump curves of f.
    pub fn interface_length(&self, resolution: usize) -> f64 {
        let h = self.p.h;
        let d = self.p.gamma.delta();
        let mut total = 0.0;
        for (y, w) in self.y_nodes(resolution) {
            let jets = self.breakpoint_jets(y, 1);
            let s = (1.0 + jets[0][1] * jets[0][1]).sqrt();
            // a₁, a₄ run the full height; a₂, a₃ exist only where γ < 1.
            total += 2.0 * w * s;
            if y > d * h {
                total += 2.0 * w * s;
            }
        }
        total
    }
}

/// The cut-off layer: a two-interface laminate whose potential is switched
/// off between ½h and ¾h.
#[derive(Debug, Clone, PartialEq)]
pub struct CutoffCell {
    l: f64,
    h: f64,
    lambda: f64,
    m: usize,
    phi: Transition,
}

impl CutoffCell {
    pub fn new(l: f64, h: f64, lambda: f64, m: usize) -> Result<Self> {
        Self::with_profile(l, h, lambda, m, default_cutoff_kind(m))
    }

    pub fn with_profile(l: f64, h: f64, lambda: f64, m: usize, kind: ProfileKind) -> Result<Self> {
        if !(h > 0.0 && h <= l) {
            return invalid(format!("cut-off layer needs 0 < h ≤ l, got l={l} h={h}"));
        }
        if m == 0 {
            return invalid("tensor order must be ≥ 1");
        }
        if !(lambda > 0.0 && lambda < 1.0) {
            return invalid(format!("λ must lie in (0,1), got {lambda}"));
        }
        Self::new_unchecked(l, h, lambda, m, kind)
    }

    /// Skips the `h ≤ l` requirement; used for the last branching generation.
    pub(crate) fn new_unchecked(
        l: f64,
        h: f64,
        lambda: f64,
        m: usize,
        kind: ProfileKind,
    ) -> Result<Self> {
        Ok(Self {
            l,
            h,
            lambda,
            m,
            phi: cutoff_profile(kind, 1)?,
        })
    }

    pub fn profile(&self) -> &Transition {
        &self.phi
    }

    pub fn width(&self) -> f64 {
        self.l
    }

    pub fn height(&self) -> f64 {
        self.h
    }

    pub fn interfaces(&self) -> [f64; 2] {
        [
            self.lambda * self.l / 2.0,
            (2.0 - self.lambda) * self.l / 2.0,
        ]
    }

    pub fn laminate(&self, x: f64) -> f64 {
        let [b1, b2] = self.interfaces();
        if x >= b1 && x < b2 {
            -self.lambda
        } else {
            1.0 - self.lambda
        }
    }

    /// `f̃(x) = ∫₀^x f_b`.
    pub fn antiderivative(&self, x: f64) -> f64 {
        let lam = self.lambda;
        let [b1, b2] = self.interfaces();
        if x < b1 {
            (1.0 - lam) * x
        } else if x < b2 {
            -lam * x + lam * self.l / 2.0
        } else {
            (1.0 - lam) * (x - self.l)
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> PointValues {
        let m = self.m;
        let p = self.phi.derivatives(y / self.h, 1);
        let fb = self.laminate(x);
        let ft = self.antiderivative(x);
        let mut v = vec![0.0; m];
        v[0] = p[0] * ft;
        let mut u = vec![0.0; m + 1];
        u[0] = p[0] * fb;
        u[1] += p[1] / self.h * ft / m as f64;
        PointValues { f: fb, v, u }
    }

    pub fn component_integrals(&self, resolution: usize) -> (Vec<f64>, f64) {
        let h = self.h;
        let rule = gl_rule(PANEL_NODES);
        let panels = resolution.div_ceil(PANEL_NODES);
        let mut ys = composite(&rule, 0.0, 0.5 * h, 1);
        ys.extend(composite(&rule, 0.5 * h, 0.75 * h, panels));
        ys.extend(composite(&rule, 0.75 * h, h, 1));
        let mut cuts = self.interfaces().to_vec();
        cuts.insert(0, 0.0);
        cuts.push(self.l);
        let xr = gl_rule(2);
        let xs: Vec<(f64, f64)> = cuts
            .windows(2)
            .flat_map(|w| composite(&xr, w[0], w[1], 1))
            .collect();
        let mut acc = vec![0.0; self.m + 1];
        for &(y, wy) in &ys {
            for &(x, wx) in &xs {
                let pv = self.eval(x, y);
                for k in 0..=self.m {
                    let e = if k == 0 { pv.u[0] - pv.f } else { pv.u[k] };
                    acc[k] += wy * wx * e * e;
                }
            }
        }
        (acc, 0.0)
    }

    pub fn interface_length(&self) -> f64 {
        2.0 * self.h
    }
}

/// Either kind of cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Unit(UnitCell),
    Cutoff(CutoffCell),
}

impl Cell {
    pub fn width(&self) -> f64 {
        match self {
            Cell::Unit(c) => c.p.l,
            Cell::Cutoff(c) => c.l,
        }
    }

    pub fn height(&self) -> f64 {
        match self {
            Cell::Unit(c) => c.p.h,
            Cell::Cutoff(c) => c.h,
        }
    }

    pub fn order(&self) -> usize {
        match self {
            Cell::Unit(c) => c.p.m,
            Cell::Cutoff(c) => c.m,
        }
    }

    pub fn lambda(&self) -> f64 {
        match self {
            Cell::Unit(c) => c.p.lambda,
            Cell::Cutoff(c) => c.lambda,
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> PointValues {
        match self {
            Cell::Unit(c) => c.eval(x, y),
            Cell::Cutoff(c) => c.eval(x, y),
        }
    }

    pub fn phase(&self, x: f64, y: f64) -> f64 {
        match self {
            Cell::Unit(c) => c.phase(x, y),
            Cell::Cutoff(c) => c.laminate(x),
        }
    }

    pub fn interfaces(&self, y: f64) -> Vec<f64> {
        match self {
            Cell::Unit(c) => c.interfaces(y),
            Cell::Cutoff(c) => c.interfaces().to_vec(),
        }
    }

    /// Distance from a local point to the nearest interface or cell edge,
    /// measured horizontally for curves.
    pub fn edge_distance(&self, x: f64, y: f64) -> f64 {
        let (l, h) = (self.width(), self.height());
        let mut d = x.min(l - x).min(y).min(h - y);
        let cuts: Vec<f64> = match self {
            Cell::Unit(c) => c.breakpoints(y).to_vec(),
            Cell::Cutoff(c) => c.interfaces().to_vec(),
        };
        for a in cuts {
            d = d.min((x - a).abs());
        }
        d
    }

    pub fn component_integrals(&self, resolution: usize) -> (Vec<f64>, f64) {
        match self {
            Cell::Unit(c) => c.component_integrals(resolution),
            Cell::Cutoff(c) => c.component_integrals(resolution),
        }
    }

    pub fn interface_length(&self, resolution: usize) -> f64 {
        match self {
            Cell::Unit(c) => c.interface_length(resolution),
            Cell::Cutoff(c) => c.interface_length(),
        }
    }

    /// Interface curves sampled at `n + 1` heights, as (x, y) polylines.
    pub fn curves(&self, n: usize) -> Vec<Vec<(f64, f64)>> {
        let h = self.height();
        match self {
            Cell::Unit(c) => {
                let d = c.p.gamma.delta();
                let mut out = vec![Vec::new(); 4];
                for s in 0..=n {
                    let y = h * s as f64 / n as f64;
                    let a = c.breakpoints(y);
                    out[0].push((a[0], y));
                    out[3].push((a[3], y));
                    if y >= d * h {
                        out[1].push((a[1], y));
                        out[2].push((a[2], y));
                    }
                }
                out
            }
            Cell::Cutoff(c) => c
                .interfaces()
                .iter()
                .map(|&b| vec![(b, 0.0), (b, h)])
                .collect(),
        }
    }
}
