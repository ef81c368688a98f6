//! Smooth monotone transitions from 1 to 0 and their exact derivatives.

use crate::error::{invalid, Result};
use crate::symtensor::{binomial, factorial};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProfileKind {
    /// `H(hi − t) / (H(hi − t) + H(t − lo))` with `H(s) = e^{−1/s}` for s > 0.
    Mollifier,
    /// `1 − S_n((t − lo)/(hi − lo))` with the C^n smoothstep S_n.
    Smoothstep { class: usize },
}

/// Equal to 1 for t ≤ lo and to 0 for t ≥ hi.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    lo: f64,
    hi: f64,
    kind: ProfileKind,
    /// Mollifier: polynomials P_k with H^{(k)}(s) = P_k(1/s) e^{−1/s}.
    /// Smoothstep: coefficients of the polynomial on [0,1].
    poly: Vec<Vec<f64>>,
}

impl Transition {
    pub fn new(lo: f64, hi: f64, kind: ProfileKind, max_order: usize) -> Result<Self> {
        if !(lo < hi) {
            return invalid(format!("transition needs lo < hi, got [{lo}, {hi}]"));
        }
        let poly = match kind {
            ProfileKind::Mollifier => {
                // P_0 = 1, P_{k+1}(u) = u² (P_k(u) − P_k'(u))
                let mut ps = vec![vec![1.0]];
                for k in 0..max_order {
                    let p = &ps[k];
                    let mut next = vec![0.0; p.len() + 2];
                    for (j, &c) in p.iter().enumerate() {
                        next[j + 2] += c;
                        if j > 0 {
                            next[j + 1] -= j as f64 * c;
                        }
                    }
                    ps.push(next);
                }
                ps
            }
            ProfileKind::Smoothstep { class } => {
                if class < max_order {
                    return invalid(format!(
                        "smoothstep of class C^{class} cannot supply {max_order} derivatives"
                    ));
                }
                // S_n(x) = x^{n+1} Σ_k binom(n+k,k) binom(2n+1,n−k) (−x)^k
                let n = class;
                let mut c = vec![0.0; 2 * n + 2];
                for k in 0..=n {
                    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                    c[n + 1 + k] = sign * binomial(n + k, k) * binomial(2 * n + 1, n - k);
                }
                vec![c]
            }
        };
        Ok(Self { lo, hi, kind, poly })
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn value(&self, t: f64) -> f64 {
        self.derivatives(t, 0)[0]
    }

    /// `[g(t), g'(t), …, g^{(n)}(t)]`.
    pub fn derivatives(&self, t: f64, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n + 1];
        if t <= self.lo {
            out[0] = 1.0;
            return out;
        }
        if t >= self.hi {
            return out;
        }
        match self.kind {
            ProfileKind::Mollifier => {
                assert!(
                    n < self.poly.len(),
                    "derivative order {n} exceeds the prepared order"
                );
                // Taylor jets of A(t) = H(hi − t) and B(t) = H(t − lo).
                let a: Vec<f64> = (0..=n)
                    .map(|k| {
                        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                        sign * self.h_deriv(self.hi - t, k) / factorial(k)
                    })
                    .collect();
                let b: Vec<f64> = (0..=n)
                    .map(|k| self.h_deriv(t - self.lo, k) / factorial(k))
                    .collect();
                let s: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
                let mut g = vec![0.0; n + 1];
                for k in 0..=n {
                    let mut acc = a[k];
                    for j in 1..=k {
                        acc -= s[j] * g[k - j];
                    }
                    g[k] = acc / s[0];
                }
                for k in 0..=n {
                    out[k] = g[k] * factorial(k);
                }
            }
            ProfileKind::Smoothstep { .. } => {
                let w = self.hi - self.lo;
                let x = (t - self.lo) / w;
                let mut c = self.poly[0].clone();
                for (k, o) in out.iter_mut().enumerate() {
                    let v = c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci);
                    *o = -v / w.powi(k as i32);
                    c = c
                        .iter()
                        .enumerate()
                        .skip(1)
                        .map(|(j, &cj)| j as f64 * cj)
                        .collect();
                    if c.is_empty() {
                        c.push(0.0);
                    }
                }
                out[0] += 1.0;
            }
        }
        out
    }

    fn h_deriv(&self, s: f64, k: usize) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        let u = 1.0 / s;
        let e = (-u).exp();
        if e == 0.0 {
            return 0.0;
        }
        self.poly[k].iter().rev().fold(0.0, |acc, &c| acc * u + c) * e
    }

    /// Sampled sup |g^{(k)}| on a fine grid of [lo, hi].
    pub fn sup_derivative(&self, k: usize) -> f64 {
        let n = 4096;
        (0..=n)
            .map(|i| {
                let t = self.lo + (self.hi - self.lo) * i as f64 / n as f64;
                self.derivatives(t, k)[k].abs()
            })
            .fold(0.0, f64::max)
    }
}

/// The unit-cell profile γ on [0,1]: 1 for t ≤ δ, 0 for t ≥ 1 − δ.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaProfile {
    delta: f64,
    transition: Transition,
}

impl GammaProfile {
    /// `max_order` is the highest derivative that will be requested.
    pub fn new(delta: f64, kind: ProfileKind, max_order: usize) -> Result<Self> {
        if !(delta > 0.0 && delta < 0.25) {
            return invalid(format!("δ must lie in (0, ¼), got {delta}"));
        }
        Ok(Self {
            delta,
            transition: Transition::new(delta, 1.0 - delta, kind, max_order)?,
        })
    }

    pub fn mollifier(delta: f64, max_order: usize) -> Result<Self> {
        Self::new(delta, ProfileKind::Mollifier, max_order)
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn transition(&self) -> &Transition {
        &self.transition
    }

    pub fn derivatives(&self, t: f64, n: usize) -> Vec<f64> {
        self.transition.derivatives(t, n)
    }

    pub fn value(&self, t: f64) -> f64 {
        self.transition.value(t)
    }
}

/// Cut-off profile φ: 1 below ½, 0 above ¾.
pub fn cutoff_profile(kind: ProfileKind, max_order: usize) -> Result<Transition> {
    Transition::new(0.5, 0.75, kind, max_order)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_fd(tr: &Transition, n: usize) {
        for &t in &[0.2, 0.31, 0.5, 0.66, 0.8] {
            let d = tr.derivatives(t, n + 1);
            for k in 0..n {
                let e = 1e-5;
                let fd = (tr.derivatives(t + e, k)[k] - tr.derivatives(t - e, k)[k]) / (2.0 * e);
                let scale = 1.0 + d[k + 1].abs();
                assert!(
                    (fd - d[k + 1]).abs() < 1e-4 * scale,
                    "k={k} t={t}: {fd} vs {}",
                    d[k + 1]
                );
            }
        }
    }

    #[test]
    fn mollifier_derivatives_match_differences() {
        check_fd(
            &Transition::new(0.1, 0.9, ProfileKind::Mollifier, 6).unwrap(),
            4,
        );
    }

    #[test]
    fn smoothstep_derivatives_match_differences() {
        check_fd(
            &Transition::new(0.1, 0.9, ProfileKind::Smoothstep { class: 6 }, 5).unwrap(),
            4,
        );
    }

    #[test]
    fn endpoints() {
        for kind in [ProfileKind::Mollifier, ProfileKind::Smoothstep { class: 3 }] {
            let g = GammaProfile::new(0.1, kind, 3).unwrap();
            assert_eq!(g.value(0.05), 1.0);
            assert_eq!(g.value(0.95), 0.0);
            assert!((g.value(0.5) - 0.5).abs() < 1e-12);
            assert!((g.value(0.1 + 1e-9) - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn delta_range_enforced() {
        assert!(GammaProfile::mollifier(0.3, 2).is_err());
        assert!(GammaProfile::mollifier(0.0, 2).is_err());
    }
}
