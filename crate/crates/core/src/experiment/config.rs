//! Sweep configuration: flat `key = value` files with `#` comments.

use std::path::{Path, PathBuf};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorChoice {
    Curl,
    Divergence,
}

impl std::str::FromStr for OperatorChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "curl" | "saint-venant" | "sv" => Ok(Self::Curl),
            "div" | "divergence" => Ok(Self::Divergence),
            other => invalid(format!("unknown operator '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub operator: OperatorChoice,
    /// Spatial dimension; sweeps run in d = 2 only.
    pub d: usize,
    pub m: usize,
    /// Well exponents (l₁, l₂) with l₁ + l₂ = m.
    pub l: (usize, usize),
    pub lambda: f64,
    /// Ascending.
    pub eps: Vec<f64>,
    /// Quadrature nodes per cell in y.
    pub resolution: usize,
    /// Cells across Ω for rasterized lower-bound candidates.
    pub lower_grid: usize,
    pub threads: Option<usize>,
    pub out_dir: PathBuf,
}

/// `n` geometrically spaced values from `lo` to `hi` inclusive.
pub fn geometric(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            operator: OperatorChoice::Curl,
            d: 2,
            m: 1,
            l: (1, 0),
            lambda: 0.5,
            eps: geometric(1e-6, 1e-2, 24),
            resolution: 64,
            lower_grid: 512,
            threads: None,
            out_dir: PathBuf::from("out"),
        }
    }
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::InvalidInput(format!("bad value for '{key}': '{v}'")))
}

fn pair(key: &str, v: &str) -> Result<(usize, usize)> {
    let parts: Vec<&str> = v.split([',', ' ']).filter(|s| !s.is_empty()).collect();
    match parts.as_slice() {
        [a, b] => Ok((num(key, a)?, num(key, b)?)),
        _ => invalid(format!("'{key}' needs two exponents, got '{v}'")),
    }
}

impl SweepConfig {
    /// Config for the well e₁^{⊙l₁}⊙e₂^{⊙l₂}.
    pub fn for_well(l1: usize, l2: usize) -> Self {
        Self {
            m: l1 + l2,
            l: (l1, l2),
            ..Self::default()
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut c = Self::default();
        let (mut lo, mut hi, mut n) = (1e-6, 1e-2, 24);
        let mut explicit = None;
        let mut m_set = false;
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::InvalidInput(format!("line {}: expected key = value", no + 1))
            })?;
            let (k, v) = (k.trim(), v.trim());
            match k {
                "operator" => c.operator = v.parse()?,
                "d" => c.d = num(k, v)?,
                "m" => {
                    c.m = num(k, v)?;
                    m_set = true;
                }
                "l" | "well" => c.l = pair(k, v)?,
                "lambda" => c.lambda = num(k, v)?,
                "eps_min" => lo = num(k, v)?,
                "eps_max" => hi = num(k, v)?,
                "eps_points" => n = num(k, v)?,
                "eps" => {
                    explicit = Some(
                        v.split(',')
                            .map(|s| num::<f64>(k, s.trim()))
                            .collect::<Result<Vec<_>>>()?,
                    )
                }
                "resolution" => c.resolution = num(k, v)?,
                "lower_grid" => c.lower_grid = num(k, v)?,
                "threads" => c.threads = Some(num(k, v)?),
                "out_dir" => c.out_dir = PathBuf::from(v),
                other => return invalid(format!("line {}: unknown key '{other}'", no + 1)),
            }
        }
        if !m_set {
            c.m = c.l.0 + c.l.1;
        }
        c.eps = match explicit {
            Some(e) => e,
            None => geometric(lo, hi, n),
        };
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// `TWOWELL_THREADS` and `TWOWELL_OUT_DIR` override the file.
    pub fn apply_env(&mut self) -> Result<()> {
        if let Ok(t) = std::env::var("TWOWELL_THREADS") {
            self.threads = Some(num("TWOWELL_THREADS", &t)?);
        }
        if let Ok(d) = std::env::var("TWOWELL_OUT_DIR") {
            self.out_dir = PathBuf::from(d);
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.d != 2 {
            return invalid(format!("sweeps run in d = 2, got d = {}", self.d));
        }
        if self.l.0 + self.l.1 != self.m || self.m == 0 {
            return invalid(format!(
                "exponents {:?} do not sum to m = {}",
                self.l, self.m
            ));
        }
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            return invalid(format!("λ must lie in (0,1), got {}", self.lambda));
        }
        if self.eps.is_empty() || self.eps.iter().any(|e| !(*e > 0.0)) {
            return invalid("ε values must be positive");
        }
        if self.eps.windows(2).any(|w| w[0] >= w[1]) {
            return invalid("ε values must be strictly ascending");
        }
        if self.resolution < 8 {
            return invalid("resolution must be ≥ 8");
        }
        Ok(())
    }

    /// Vanishing order L = max(l₁, l₂) of the d = 2 basis well.
    pub fn order(&self) -> usize {
        self.l.0.max(self.l.1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_with_comments() {
        let c = SweepConfig::parse("# demo\noperator = div\nl = 2,1   # well\neps_points = 6\n")
            .unwrap();
        assert_eq!(c.operator, OperatorChoice::Divergence);
        assert_eq!((c.m, c.l), (3, (2, 1)));
        assert_eq!(c.eps.len(), 6);
        assert!((c.eps[5] - 1e-2).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(SweepConfig::parse("m = 3\nl = 1,1").is_err());
        assert!(SweepConfig::parse("eps = 0.1, 0.01").is_err());
        assert!(SweepConfig::parse("colour = red").is_err());
    }
}
