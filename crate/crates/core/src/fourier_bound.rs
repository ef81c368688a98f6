//! Fourier-side lower-bound functionals on phase fields.
//!
//! # Normalization
//!
//! The continuum transform is unitary, `f̂(ξ) = (2π)^{-d/2} ∫ e^{-ix·ξ} f(x) dx`.
//! On a box of side lengths `L_a` sampled with cell size `h_a` the discrete
//! stand-in is
//!
//! ```text
//! f̂_k = (2π)^{-d/2} · Π h_a · e^{-i x_0·ξ_k} · DFT[f]_k,   ξ_k = 2π q / L,
//! ```
//!
//! with `q` the signed integer frequency and frequency cell `dξ = Π 2π/L_a`.
//! Then `Σ |f̂_k|² dξ = Π h_a · Σ |f|²` holds exactly (discrete Parseval),
//! and both `‖f̂‖_∞ ≤ (2π)^{-d/2} ‖f‖_1` and the slicing inequality carry
//! over with unchanged constants. Only `|f̂|²` is ever used, so the phase
//! factor is dropped.

use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{invalid, Error, Result};
use crate::multiplier::{MultiplierPoly, SubspaceUnion};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Phase indicator on a uniform grid over a box: each cell is +1 (value
/// 1−λ), −1 (value −λ) or 0 (outside Ω). Axis 0 varies fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseField {
    shape: Vec<usize>,
    lambda: f64,
    lo: Vec<f64>,
    hi: Vec<f64>,
    cells: Vec<i8>,
}

impl PhaseField {
    pub fn new(
        shape: Vec<usize>,
        lambda: f64,
        lo: Vec<f64>,
        hi: Vec<f64>,
        cells: Vec<i8>,
    ) -> Result<Self> {
        let d = shape.len();
        if !(2..=3).contains(&d) || lo.len() != d || hi.len() != d {
            return invalid("phase fields are 2D or 3D with matching box bounds");
        }
        if !(lambda > 0.0 && lambda < 1.0) {
            return invalid(format!("λ must lie in (0,1), got {lambda}"));
        }
        if shape.iter().product::<usize>() != cells.len() {
            return Err(Error::DimensionMismatch {
                expected: shape.iter().product(),
                got: cells.len(),
            });
        }
        if cells.iter().any(|c| !(-1..=1).contains(c)) {
            return invalid("cell values must be −1, 0 or +1");
        }
        if lo.iter().zip(&hi).any(|(a, b)| b <= a) {
            return invalid("empty box");
        }
        Ok(Self {
            shape,
            lambda,
            lo,
            hi,
            cells,
        })
    }

    /// Ω = (0,1)^d inside the padded box [−½, 3/2]^d with `n_omega` cells
    /// per unit length; `sign(x)` gives the cell label at cell centers.
    pub fn padded_unit_box(
        d: usize,
        n_omega: usize,
        lambda: f64,
        sign: impl Fn(&[f64]) -> i8 + Sync,
    ) -> Result<Self> {
        let n = 2 * n_omega;
        let shape = vec![n; d];
        let h = 1.0 / n_omega as f64;
        let total = n.pow(d as u32);
        let cells = (0..total)
            .into_par_iter()
            .map(|mut flat| {
                let mut x = vec![0.0; d];
                let mut inside = true;
                for xa in x.iter_mut() {
                    let i = flat % n;
                    flat /= n;
                    *xa = -0.5 + (i as f64 + 0.5) * h;
                    inside &= *xa > 0.0 && *xa < 1.0;
                }
                if inside {
                    sign(&x).signum()
                } else {
                    0
                }
            })
            .collect();
        Self::new(shape, lambda, vec![-0.5; d], vec![1.5; d], cells)
    }

    /// Random checkerboard on (0,1)^d with `k` blocks per side.
    pub fn checkerboard(
        d: usize,
        n_omega: usize,
        k: usize,
        lambda: f64,
        seed: u64,
    ) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let labels: Vec<i8> = (0..k.pow(d as u32))
            .map(|_| if rng.gen_bool(0.5) { 1 } else { -1 })
            .collect();
        Self::padded_unit_box(d, n_omega, lambda, |x| {
            let idx = x.iter().rev().fold(0, |acc, &xa| {
                acc * k + ((xa * k as f64) as usize).min(k - 1)
            });
            labels[idx]
        })
    }

    /// Laminate with volume fraction λ of the 1−λ phase, period `w`,
    /// oscillating along `axis`.
    pub fn laminate(
        d: usize,
        n_omega: usize,
        period: f64,
        axis: usize,
        lambda: f64,
    ) -> Result<Self> {
        Self::padded_unit_box(d, n_omega, lambda, |x| {
            let t = (x[axis] / period).fract();
            if t < lambda {
                1
            } else {
                -1
            }
        })
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn bounds(&self) -> (&[f64], &[f64]) {
        (&self.lo, &self.hi)
    }

    pub fn cells(&self) -> &[i8] {
        &self.cells
    }

    pub fn spacing(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|a| (self.hi[a] - self.lo[a]) / self.shape[a] as f64)
            .collect()
    }

    fn cell_volume(&self) -> f64 {
        self.spacing().iter().product()
    }

    pub fn value(&self, flat: usize) -> f64 {
        match self.cells[flat] {
            1 => 1.0 - self.lambda,
            -1 => -self.lambda,
            _ => 0.0,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.cells.len()).map(|i| self.value(i)).collect()
    }

    fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        self.shape
            .iter()
            .map(|&n| {
                let i = flat % n;
                flat /= n;
                i
            })
            .collect()
    }

    /// Bounding box of the Ω mask (cells ≠ 0) as (lo, hi) coordinates.
    pub fn mask_bounds(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        let d = self.dim();
        let h = self.spacing();
        let mut lo = vec![usize::MAX; d];
        let mut hi = vec![0usize; d];
        let mut any = false;
        for (flat, &c) in self.cells.iter().enumerate() {
            if c != 0 {
                any = true;
                for (a, i) in self.unflatten(flat).into_iter().enumerate() {
                    lo[a] = lo[a].min(i);
                    hi[a] = hi[a].max(i + 1);
                }
            }
        }
        any.then(|| {
            (
                (0..d).map(|a| self.lo[a] + lo[a] as f64 * h[a]).collect(),
                (0..d).map(|a| self.lo[a] + hi[a] as f64 * h[a]).collect(),
            )
        })
    }

    /// Diagonal of the mask's bounding box, an upper bound for diam Ω.
    pub fn omega_diameter(&self) -> f64 {
        self.mask_bounds()
            .map(|(lo, hi)| {
                lo.iter()
                    .zip(&hi)
                    .map(|(a, b)| (b - a) * (b - a))
                    .sum::<f64>()
                    .sqrt()
            })
            .unwrap_or(0.0)
    }

    /// Box side ≥ 2× Ω extent on every axis.
    pub fn is_padded(&self) -> bool {
        match self.mask_bounds() {
            None => true,
            Some((lo, hi)) => {
                (0..self.dim()).all(|a| self.hi[a] - self.lo[a] >= 2.0 * (hi[a] - lo[a]) - 1e-12)
            }
        }
    }

    /// Σ |f|² · cell volume.
    pub fn l2_mass(&self) -> f64 {
        self.values().iter().map(|v| v * v).sum::<f64>() * self.cell_volume()
    }

    /// Σ |f| · cell volume.
    pub fn l1_norm(&self) -> f64 {
        self.values().iter().map(|v| v.abs()).sum::<f64>() * self.cell_volume()
    }

    /// Forward-difference total variation over neighbor pairs inside Ω,
    /// each jump weighted by the area of the shared cell face.
    pub fn total_variation(&self) -> f64 {
        let d = self.dim();
        let h = self.spacing();
        let vol = self.cell_volume();
        let vals = self.values();
        let mut tv = 0.0;
        let mut stride = 1;
        for a in 0..d {
            let face = vol / h[a];
            let n = self.shape[a];
            let s: f64 = (0..self.cells.len())
                .into_par_iter()
                .filter(|&flat| (flat / stride) % n + 1 < n)
                .map(|flat| {
                    let nb = flat + stride;
                    if self.cells[flat] != 0 && self.cells[nb] != 0 {
                        (vals[nb] - vals[flat]).abs()
                    } else {
                        0.0
                    }
                })
                .sum();
            tv += s * face;
            stride *= n;
        }
        tv
    }

    /// Flat binary form: magic `TWPF`, u32 version, u32 d, d × u64 shape,
    /// f64 λ, d × f64 box low corner, d × f64 box high corner, then one
    /// signed byte per cell (axis 0 fastest). Little endian.
    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        w.write_all(b"TWPF")?;
        w.write_all(&1u32.to_le_bytes())?;
        w.write_all(&(self.dim() as u32).to_le_bytes())?;
        for &n in &self.shape {
            w.write_all(&(n as u64).to_le_bytes())?;
        }
        w.write_all(&self.lambda.to_le_bytes())?;
        for v in self.lo.iter().chain(&self.hi) {
            w.write_all(&v.to_le_bytes())?;
        }
        let bytes: Vec<u8> = self.cells.iter().map(|&c| c as u8).collect();
        w.write_all(&bytes)?;
        Ok(())
    }

    pub fn read_from(mut r: impl Read) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != b"TWPF" {
            return Err(Error::Format("not a phase-field file".into()));
        }
        let version = read_u32(&mut r)?;
        if version != 1 {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let d = read_u32(&mut r)? as usize;
        if !(2..=3).contains(&d) {
            return Err(Error::Format(format!("unsupported dimension {d}")));
        }
        let shape = (0..d)
            .map(|_| read_u64(&mut r).map(|n| n as usize))
            .collect::<Result<Vec<_>>>()?;
        let lambda = read_f64(&mut r)?;
        let lo = (0..d)
            .map(|_| read_f64(&mut r))
            .collect::<Result<Vec<_>>>()?;
        let hi = (0..d)
            .map(|_| read_f64(&mut r))
            .collect::<Result<Vec<_>>>()?;
        let mut bytes = vec![0u8; shape.iter().product()];
        r.read_exact(&mut bytes)?;
        Self::new(
            shape,
            lambda,
            lo,
            hi,
            bytes.into_iter().map(|b| b as i8).collect(),
        )
    }
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64(r: &mut impl Read) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64(r: &mut impl Read) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

/// |f̂|² on the discrete frequency grid.
#[derive(Debug, Clone)]
pub struct PowerSpectrum {
    shape: Vec<usize>,
    lengths: Vec<f64>,
    power: Vec<f64>,
}

impl PowerSpectrum {
    pub fn of(f: &PhaseField) -> Self {
        let shape = f.shape.clone();
        let mut data: Vec<Complex<f64>> = f
            .values()
            .into_iter()
            .map(|v| Complex::new(v, 0.0))
            .collect();
        fft_nd(&mut data, &shape);
        let d = shape.len() as i32;
        let norm = TWO_PI.powi(-d) * f.cell_volume().powi(2);
        let power = data.par_iter().map(|c| c.norm_sqr() * norm).collect();
        let lengths = (0..shape.len()).map(|a| f.hi[a] - f.lo[a]).collect();
        Self {
            shape,
            lengths,
            power,
        }
    }

    /// Spectrum of `f` extended by zero to `shape` cells per axis. Since f
    /// vanishes outside its box this samples the same transform more finely.
    pub fn zero_padded(f: &PhaseField, shape: &[usize]) -> Self {
        assert!(shape.len() == f.dim() && shape.iter().zip(&f.shape).all(|(a, b)| a >= b));
        let total: usize = shape.iter().product();
        let mut data = vec![Complex::new(0.0, 0.0); total];
        for (flat, v) in f.values().into_iter().enumerate() {
            if v != 0.0 {
                let (mut rest, mut out, mut stride) = (flat, 0, 1);
                for (a, &n) in f.shape.iter().enumerate() {
                    out += (rest % n) * stride;
                    rest /= n;
                    stride *= shape[a];
                }
                data[out] = Complex::new(v, 0.0);
            }
        }
        fft_nd(&mut data, shape);
        let norm = TWO_PI.powi(-(shape.len() as i32)) * f.cell_volume().powi(2);
        let power = data.par_iter().map(|c| c.norm_sqr() * norm).collect();
        let h = f.spacing();
        let lengths = shape.iter().zip(&h).map(|(&n, h)| n as f64 * h).collect();
        Self {
            shape: shape.to_vec(),
            lengths,
            power,
        }
    }

    pub fn len(&self) -> usize {
        self.power.len()
    }

    pub fn is_empty(&self) -> bool {
        self.power.is_empty()
    }

    pub fn power(&self) -> &[f64] {
        &self.power
    }

    pub fn dxi(&self) -> f64 {
        self.lengths.iter().map(|l| TWO_PI / l).product()
    }

    /// Signed integer frequencies of a flat index.
    pub fn q(&self, mut flat: usize) -> Vec<i64> {
        self.shape
            .iter()
            .map(|&n| {
                let k = flat % n;
                flat /= n;
                if k < n.div_ceil(2) {
                    k as i64
                } else {
                    k as i64 - n as i64
                }
            })
            .collect()
    }

    pub fn xi(&self, flat: usize) -> Vec<f64> {
        self.q(flat)
            .iter()
            .zip(&self.lengths)
            .map(|(&q, l)| TWO_PI * q as f64 / l)
            .collect()
    }

    /// Σ |f̂|² dξ.
    pub fn mass(&self) -> f64 {
        self.power.par_iter().sum::<f64>() * self.dxi()
    }

    /// Σ w(ξ) |f̂(ξ)|² dξ over ξ ≠ 0.
    pub fn weighted(&self, w: impl Fn(&[f64]) -> f64 + Sync) -> f64 {
        let s: f64 = (1..self.power.len())
            .into_par_iter()
            .map(|k| {
                let p = self.power[k];
                if p == 0.0 {
                    0.0
                } else {
                    w(&self.xi(k)) * p
                }
            })
            .sum();
        s * self.dxi()
    }
}

/// In-place unnormalized forward DFT over all axes (axis 0 fastest).
pub fn fft_nd(data: &mut [Complex<f64>], shape: &[usize]) {
    let mut planner = FftPlanner::new();
    let mut stride = 1;
    for &n in shape {
        let fft = planner.plan_fft_forward(n);
        let block = stride * n;
        if stride == 1 {
            data.par_chunks_mut(n).for_each(|line| fft.process(line));
        } else {
            data.par_chunks_mut(block).for_each(|chunk| {
                let mut line = vec![Complex::new(0.0, 0.0); n];
                for off in 0..stride {
                    for (i, c) in line.iter_mut().enumerate() {
                        *c = chunk[off + i * stride];
                    }
                    fft.process(&mut line);
                    for (i, c) in line.iter().enumerate() {
                        chunk[off + i * stride] = *c;
                    }
                }
            });
        }
        stride = block;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralEnergyReport {
    pub e_el: f64,
    pub e_surf: f64,
    pub e_eps: f64,
    /// Σ |f̂|² dξ.
    pub spectral_mass: f64,
    /// Σ |f|² dx.
    pub grid_mass: f64,
    /// Set when the box is not padded enough.
    pub warning: Option<String>,
}

fn report(f: &PhaseField, spec: &PowerSpectrum, e_el: f64, eps: f64) -> SpectralEnergyReport {
    let e_surf = f.total_variation();
    SpectralEnergyReport {
        e_el,
        e_surf,
        e_eps: e_el + eps * e_surf,
        spectral_mass: spec.mass(),
        grid_mass: f.l2_mass(),
        warning: (!f.is_padded()).then(|| {
            "box is less than twice the extent of Ω; periodic aliasing not controlled".into()
        }),
    }
}

/// `Ẽ_el = Σ_{ξ≠0} dist_V(ξ/|ξ|)^{2L} |f̂|² dξ`, `Ẽ_surf = TV(f)`.
pub fn spectral_energy(
    f: &PhaseField,
    v: &SubspaceUnion,
    l: usize,
    eps: f64,
) -> Result<SpectralEnergyReport> {
    let spec = PowerSpectrum::of(f);
    Ok(spectral_energy_with(f, &spec, v, l, eps))
}

/// As [`spectral_energy`] with a precomputed spectrum.
pub fn spectral_energy_with(
    f: &PhaseField,
    spec: &PowerSpectrum,
    v: &SubspaceUnion,
    l: usize,
    eps: f64,
) -> SpectralEnergyReport {
    let e_el = spec.weighted(|xi| dist_weight(v, xi, l));
    report(f, spec, e_el, eps)
}

/// dist_V(ξ/|ξ|)^{2L}.
pub fn dist_weight(v: &SubspaceUnion, xi: &[f64], l: usize) -> f64 {
    let n = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
    let u: Vec<f64> = xi.iter().map(|x| x / n).collect();
    v.dist(&u).powi(2 * l as i32)
}

/// p(ξ/|ξ|).
pub fn full_weight(p: &MultiplierPoly, xi: &[f64]) -> f64 {
    let n = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
    let u: Vec<f64> = xi.iter().map(|x| x / n).collect();
    p.eval(&u)
}

/// Same structure as [`spectral_energy`] with weight p(ξ/|ξ|).
pub fn full_multiplier_energy(
    f: &PhaseField,
    p: &MultiplierPoly,
    eps: f64,
) -> Result<SpectralEnergyReport> {
    if p.op.d != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: p.op.d,
        });
    }
    let spec = PowerSpectrum::of(f);
    let e_el = spec.weighted(|xi| full_weight(p, xi));
    Ok(report(f, &spec, e_el, eps))
}

/// Area of the unit sphere S^{s−1} in R^s.
pub fn sphere_area(s: usize) -> f64 {
    // 2 π^{s/2} / Γ(s/2)
    let half_gamma = if s.is_multiple_of(2) {
        crate::symtensor::factorial(s / 2 - 1)
    } else {
        // Γ(k + ½) = (2k)! √π / (4^k k!)
        let k = (s - 1) / 2;
        crate::symtensor::factorial(2 * k) * std::f64::consts::PI.sqrt()
            / (4f64.powi(k as i32) * crate::symtensor::factorial(k))
    };
    2.0 * std::f64::consts::PI.powf(s as f64 / 2.0) / half_gamma
}

/// Largest α with `C(s)(α diam Ω / 2π)^s ≤ δ/N` for every subspace, where
/// s is the codimension of the subspace and N the number of subspaces.
pub fn alpha_for(v: &SubspaceUnion, diam: f64, delta: f64) -> f64 {
    let n = v.bases().len() as f64;
    v.bases()
        .iter()
        .map(|q| {
            let s = v.dim() - q.ncols();
            TWO_PI / diam * (delta / (n * sphere_area(s))).powf(1.0 / s as f64)
        })
        .fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inequality {
    pub lhs: f64,
    pub rhs: f64,
}

impl Inequality {
    /// Relative slack for round-off in sums that are equal in exact
    /// arithmetic.
    pub const SLACK: f64 = 1e-12;

    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs * (1.0 + Self::SLACK) + f64::MIN_POSITIVE
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KeyEstimateReport {
    pub alpha: f64,
    pub eta: f64,
    /// `Σ_{dist_V(ξ) ≤ α} |f̂|² dξ ≤ δ Σ |f̂|² dξ`.
    pub part_i: Inequality,
    /// `Σ_{dist_V(ξ) ≥ α, |ξ| ≤ η} |f̂|² dξ ≤ (η/α)^{2L} Ẽ_el`.
    pub part_ii: Inequality,
    /// High-frequency mass `Σ_{|ξ| ≥ η} |f̂|² dξ`.
    pub high_mass: f64,
    /// η times the high-frequency mass; bounded in η when the bound holds.
    pub eta_high_mass: f64,
}

pub fn key_estimate_report(
    f: &PhaseField,
    v: &SubspaceUnion,
    l: usize,
    eta: f64,
    delta: f64,
) -> Result<KeyEstimateReport> {
    let spec = PowerSpectrum::of(f);
    key_estimate_with(f, &spec, v, l, eta, delta)
}

pub fn key_estimate_with(
    f: &PhaseField,
    spec: &PowerSpectrum,
    v: &SubspaceUnion,
    l: usize,
    eta: f64,
    delta: f64,
) -> Result<KeyEstimateReport> {
    if eta <= 1.0 {
        return invalid(format!("η must exceed 1, got {eta}"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return invalid(format!("δ must lie in (0,1), got {delta}"));
    }
    let diam = f.omega_diameter();
    let mass = spec.mass();
    if diam == 0.0 {
        let zero = Inequality { lhs: 0.0, rhs: 0.0 };
        return Ok(KeyEstimateReport {
            alpha: f64::INFINITY,
            eta,
            part_i: zero,
            part_ii: zero,
            high_mass: 0.0,
            eta_high_mass: 0.0,
        });
    }
    let alpha = alpha_for(v, diam, delta);
    let near = near_mass(f, v, alpha);
    let mid = spec.weighted(|xi| {
        let r = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
        if v.dist(xi) >= alpha && r <= eta {
            1.0
        } else {
            0.0
        }
    });
    let e_el = spec.weighted(|xi| dist_weight(v, xi, l));
    let high = spec.weighted(|xi| {
        if xi.iter().map(|x| x * x).sum::<f64>().sqrt() >= eta {
            1.0
        } else {
            0.0
        }
    });
    Ok(KeyEstimateReport {
        alpha,
        eta,
        part_i: Inequality {
            lhs: near,
            rhs: delta * mass,
        },
        part_ii: Inequality {
            lhs: mid,
            rhs: (eta / alpha).powi(2 * l as i32) * e_el,
        },
        high_mass: high,
        eta_high_mass: eta * high,
    })
}

/// Cap on the refined grid used for the near-V mass.
const NEAR_MAX_POINTS: usize = 1 << 23;

/// `Σ_{dist_V(ξ) ≤ α} |f̂|² dξ` on a zero-padded grid with spacing 2α/3, so
/// that the cells of the samples at 0, ±2α/3 tile a coordinate strip of
/// half-width α. On the box's own grid dξ can exceed α and the whole
/// ξ ∈ V slice would be counted with the wrong width.
fn near_mass(f: &PhaseField, v: &SubspaceUnion, alpha: f64) -> f64 {
    let h = f.spacing();
    let target: Vec<f64> = h
        .iter()
        .map(|h| 3.0 * std::f64::consts::PI / alpha / h)
        .collect();
    let want: f64 = target.iter().product();
    let shrink = (want / NEAR_MAX_POINTS as f64)
        .max(1.0)
        .powf(1.0 / h.len() as f64);
    let shape: Vec<usize> = target
        .iter()
        .zip(&f.shape)
        .map(|(t, &n)| ((t / shrink).round() as usize).max(n))
        .collect();
    let spec = PowerSpectrum::zero_padded(f, &shape);
    spec.weighted(|xi| if v.dist(xi) <= alpha { 1.0 } else { 0.0 }) + spec.power()[0] * spec.dxi()
}

/// Physical frequency of integer grid frequency q along axis 0.
pub fn grid_frequency(f: &PhaseField, q: usize) -> f64 {
    TWO_PI * q as f64 / (f.hi[0] - f.lo[0])
}

/// `(η, Σ_{|ξ|≥η} |f̂|² dξ, η · that)` for each η.
pub fn high_frequency_decay(f: &PhaseField, etas: &[f64]) -> Vec<(f64, f64, f64)> {
    let spec = PowerSpectrum::of(f);
    etas.iter()
        .map(|&eta| {
            let high = spec.weighted(|xi| {
                if xi.iter().map(|x| x * x).sum::<f64>().sqrt() >= eta {
                    1.0
                } else {
                    0.0
                }
            });
            (eta, high, eta * high)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlicingReport {
    pub s: usize,
    pub pass: bool,
    /// min over slices of RHS / LHS (∞ when every slice vanishes).
    pub worst_margin: f64,
    pub slices: usize,
    /// `(2π)^{-d/2} ‖f‖_1 / ‖f̂‖_∞`.
    pub linf_l1_margin: f64,
}

/// Check `max_{ξ'} |f̂(ξ',ξ'')|² ≤ (diam Ω/2π)^s Σ_{ξ'} |f̂(ξ',ξ'')|² dξ'`
/// for every ξ'' (ξ' = first s frequency axes).
pub fn slicing_check(f: &PhaseField, s: usize) -> Result<SlicingReport> {
    let d = f.dim();
    if s == 0 || s > d {
        return invalid(format!("slice dimension must lie in 1..={d}"));
    }
    let spec = PowerSpectrum::of(f);
    let inner: usize = f.shape[..s].iter().product();
    let dxi_inner: f64 = spec.lengths[..s].iter().map(|l| TWO_PI / l).product();
    let c = (f.omega_diameter() / TWO_PI).powi(s as i32);
    let margins: Vec<f64> = spec
        .power
        .par_chunks(inner)
        .map(|slice| {
            let max = slice.iter().copied().fold(0.0, f64::max);
            let sum: f64 = slice.iter().sum::<f64>() * dxi_inner;
            if max == 0.0 {
                f64::INFINITY
            } else {
                c * sum / max
            }
        })
        .collect();
    let worst = margins.iter().copied().fold(f64::INFINITY, f64::min);
    let linf = spec.power.iter().copied().fold(0.0, f64::max).sqrt();
    let l1 = TWO_PI.powf(-(d as f64) / 2.0) * f.l1_norm();
    Ok(SlicingReport {
        s,
        pass: worst >= 1.0 - Inequality::SLACK,
        worst_margin: worst,
        slices: margins.len(),
        linf_l1_margin: if linf == 0.0 {
            f64::INFINITY
        } else {
            l1 / linf
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(1) - 2.0).abs() < 1e-15);
        assert!((sphere_area(2) - TWO_PI).abs() < 1e-14);
        assert!((sphere_area(3) - 4.0 * std::f64::consts::PI).abs() < 1e-13);
    }

    #[test]
    fn fft_matches_direct_small() {
        let shape = [4usize, 3];
        let vals: Vec<f64> = (0..12).map(|i| (i as f64 * 0.7).sin()).collect();
        let mut data: Vec<Complex<f64>> = vals.iter().map(|&v| Complex::new(v, 0.0)).collect();
        fft_nd(&mut data, &shape);
        for k1 in 0..3 {
            for k0 in 0..4 {
                let mut acc = Complex::new(0.0, 0.0);
                for j1 in 0..3 {
                    for j0 in 0..4 {
                        let ph = -TWO_PI * (k0 * j0) as f64 / 4.0 - TWO_PI * (k1 * j1) as f64 / 3.0;
                        acc += vals[j1 * 4 + j0] * Complex::new(ph.cos(), ph.sin());
                    }
                }
                assert!((acc - data[k1 * 4 + k0]).norm() < 1e-12);
            }
        }
    }
}
