//! Design-point generation, the forward operator on step functions, and
//! synthetic dataset simulation.

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::signal::StepFunction;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// Sampling density on [0,1]: either uniform or a single linear segment
/// pinned by its endpoint values (which must be positive and average to
/// one so the density integrates to one).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "density", rename_all = "lowercase")]
pub enum DesignDensity {
    Uniform,
    Linear { at_zero: f64, at_one: f64 },
}

impl DesignDensity {
    pub fn linear(at_zero: f64, at_one: f64) -> Result<Self> {
        if !(at_zero > 0.0 && at_one > 0.0) {
            return Err(Error::InvalidConfig(
                "linear design density must be strictly positive".into(),
            ));
        }
        if ((at_zero + at_one) / 2.0 - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidConfig(format!(
                "linear design density must integrate to one: (h(0)+h(1))/2 = {}",
                (at_zero + at_one) / 2.0
            )));
        }
        Ok(DesignDensity::Linear { at_zero, at_one })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            DesignDensity::Uniform => Ok(()),
            DesignDensity::Linear { at_zero, at_one } => {
                DesignDensity::linear(at_zero, at_one).map(|_| ())
            }
        }
    }

    /// Density value h(x) for x in [0,1].
    pub fn pdf(&self, x: f64) -> f64 {
        match *self {
            DesignDensity::Uniform => 1.0,
            DesignDensity::Linear { at_zero, at_one } => at_zero + (at_one - at_zero) * x,
        }
    }

    /// H(x) = integral of h over [0, x].
    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            DesignDensity::Uniform => x,
            DesignDensity::Linear { at_zero, at_one } => {
                at_zero * x + 0.5 * (at_one - at_zero) * x * x
            }
        }
    }

    /// Inverse of `cdf` on [0,1].
    pub fn inverse_cdf(&self, u: f64) -> f64 {
        match *self {
            DesignDensity::Uniform => u,
            DesignDensity::Linear { at_zero, at_one } => {
                let s = at_one - at_zero;
                if s.abs() < 1e-14 {
                    return u;
                }
                // Positive root of (s/2) x^2 + at_zero x - u = 0.
                let disc = at_zero * at_zero + 2.0 * s * u;
                ((-at_zero) + disc.max(0.0).sqrt()) / s
            }
        }
    }

    /// The bounds [c_l, c_u] the density stays within on [0,1].
    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            DesignDensity::Uniform => (1.0, 1.0),
            DesignDensity::Linear { at_zero, at_one } => {
                (at_zero.min(at_one), at_zero.max(at_one))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DesignKind {
    Fixed,
    Random,
}

/// How design points are produced: a deterministic quantile grid of the
/// density (`Fixed`) or sorted i.i.d. draws from it (`Random`, seeded).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignSpec {
    pub kind: DesignKind,
    #[serde(flatten)]
    pub density: DesignDensity,
    #[serde(default)]
    pub seed: u64,
}

impl DesignSpec {
    pub fn fixed(density: DesignDensity) -> Self {
        DesignSpec { kind: DesignKind::Fixed, density, seed: 0 }
    }

    pub fn random(density: DesignDensity, seed: u64) -> Self {
        DesignSpec { kind: DesignKind::Random, density, seed }
    }
}

/// Generate `n` sorted design points in [0,1].
///
/// The fixed design places x_i at the (i - 1/2)/n quantile of the density,
/// so the empirical distribution function misses H by exactly 1/(2n) and
/// no point sits on the domain boundary.
pub fn generate_design(spec: &DesignSpec, n: usize) -> Vec<f64> {
    assert!(n >= 1, "design needs at least one point");
    match spec.kind {
        DesignKind::Fixed => (1..=n)
            .map(|i| spec.density.inverse_cdf((i as f64 - 0.5) / n as f64))
            .collect(),
        DesignKind::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            let mut pts: Vec<f64> = (0..n)
                .map(|_| spec.density.inverse_cdf(rng.random::<f64>()))
                .collect();
            pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            pts
        }
    }
}

/// The blurred step function at `x`: sum of level_i times the kernel mass
/// of the i-th segment, with the outer segments extending to +-inf.
pub fn forward_eval(kernel: &Kernel, f: &StepFunction, x: f64) -> f64 {
    let jumps = f.jump_set();
    let levels = f.levels();
    let mut prev = f64::NEG_INFINITY;
    let mut acc = 0.0;
    for (i, &level) in levels.iter().enumerate() {
        let next = if i < jumps.len() { jumps[i] } else { f64::INFINITY };
        acc += level * kernel.interval_mass(x, prev, next);
        prev = next;
    }
    acc
}

/// Observations of a blurred step function at sorted design points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub truth: Option<StepFunction>,
    pub noise_sd: Option<f64>,
    pub seed: u64,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn from_columns(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::Contract(format!(
                "x and y must have equal length, got {} and {}",
                x.len(),
                y.len()
            )));
        }
        if x.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Contract("x must be sorted ascending".into()));
        }
        Ok(Dataset { x, y, truth: None, noise_sd: None, seed: 0 })
    }

    /// Two-column CSV with an `x,y` header, full decimal precision.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.x.len() * 32 + 4);
        out.push_str("x,y\n");
        for (x, y) in self.x.iter().zip(&self.y) {
            out.push_str(&format!("{x},{y}\n"));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::Parse("empty CSV: expected an x,y header".into()))?;
        if header.trim() != "x,y" {
            return Err(Error::Parse(format!(
                "line 1: expected header 'x,y', got '{}'",
                header.trim()
            )));
        }
        let mut x = Vec::new();
        let mut y = Vec::new();
        for (idx, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split(',');
            let (a, b) = match (parts.next(), parts.next(), parts.next()) {
                (Some(a), Some(b), None) => (a, b),
                _ => {
                    return Err(Error::Parse(format!(
                        "line {}: expected two comma-separated values",
                        idx + 1
                    )))
                }
            };
            let xv: f64 = a.trim().parse().map_err(|_| {
                Error::Parse(format!("line {}: could not parse x value '{}'", idx + 1, a))
            })?;
            let yv: f64 = b.trim().parse().map_err(|_| {
                Error::Parse(format!("line {}: could not parse y value '{}'", idx + 1, b))
            })?;
            x.push(xv);
            y.push(yv);
        }
        if x.is_empty() {
            return Err(Error::Parse("CSV contains no observations".into()));
        }
        Dataset::from_columns(x, y)
    }
}

/// Simulate observations y_i = (blurred f)(x_i) + sigma * eps_i with
/// standard-normal noise from a seeded generator; deterministic given
/// (spec, n, sigma, seed).
pub fn simulate_dataset(
    kernel: &Kernel,
    f: &StepFunction,
    spec: &DesignSpec,
    n: usize,
    sigma: f64,
    seed: u64,
) -> Dataset {
    assert!(sigma >= 0.0, "noise level must be nonnegative");
    let design_spec = match spec.kind {
        // A random design draws its points from the dataset seed so one
        // seed fixes the whole dataset.
        DesignKind::Random => DesignSpec { seed: seed ^ 0x9e37_79b9_7f4a_7c15, ..*spec },
        DesignKind::Fixed => *spec,
    };
    let x = generate_design(&design_spec, n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let y: Vec<f64> = x
        .iter()
        .map(|&xi| {
            let eps: f64 = rng.sample(StandardNormal);
            forward_eval(kernel, f, xi) + sigma * eps
        })
        .collect();
    Dataset { x, y, truth: Some(f.clone()), noise_sd: Some(sigma), seed }
}

/// Empirical norm: sqrt(n^{-1} sum v_i^2).
pub fn empirical_norm(v: &[f64]) -> f64 {
    empirical_norm_sq(v).sqrt()
}

/// Squared empirical norm n^{-1} sum v_i^2.
pub fn empirical_norm_sq(v: &[f64]) -> f64 {
    assert!(!v.is_empty(), "empirical norm of an empty vector");
    v.iter().map(|a| a * a).sum::<f64>() / v.len() as f64
}

/// Empirical inner product n^{-1} sum u_i v_i.
pub fn empirical_inner(u: &[f64], v: &[f64]) -> f64 {
    assert_eq!(u.len(), v.len(), "empirical inner product needs equal lengths");
    assert!(!u.is_empty(), "empirical inner product of empty vectors");
    u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>() / u.len() as f64
}
