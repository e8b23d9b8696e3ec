//! Error function and standard-normal helpers.
//!
//! Self-contained so the crate does not pull a special-function dependency
//! for three routines. `erf` uses the positive-term confluent series for
//! small arguments (no cancellation) and the classical continued fraction
//! for the complementary function in the tail; both are accurate to a few
//! ulps. The quantile is a Newton iteration on `normal_cdf`.

use crate::error::{Error, Result};

const FRAC_2_SQRT_PI: f64 = 1.128_379_167_095_512_6; // 2/sqrt(pi)
const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// erf(x) for |x| <= 3 via erf(x) = 2x/sqrt(pi) * exp(-x^2) * sum_n (2x^2)^n / (2n+1)!!.
/// All terms are positive, so there is no cancellation.
fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut n = 1u32;
    loop {
        term *= 2.0 * x2 / (2 * n + 1) as f64;
        sum += term;
        if term < 1e-18 * sum || n > 200 {
            break;
        }
        n += 1;
    }
    FRAC_2_SQRT_PI * x * (-x2).exp() * sum
}

/// Scaled complementary error function erfc(x) * sqrt(pi) * exp(x^2)
/// for x >= 3, by the continued fraction 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))).
fn erfcx_cf(x: f64) -> f64 {
    let mut v = 0.0;
    for n in (1..=60).rev() {
        v = (n as f64 / 2.0) / (x + v);
    }
    1.0 / (x + v)
}

pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let a = x.abs();
    if a <= 3.0 {
        erf_series(x)
    } else {
        let e = 1.0 - erfc_tail(a);
        if x > 0.0 {
            e
        } else {
            -e
        }
    }
}

fn erfc_tail(x: f64) -> f64 {
    debug_assert!(x >= 3.0);
    // exp(-x^2) underflows near x = 26.6; erfc is 0 to double precision long before.
    if x > 27.0 {
        return 0.0;
    }
    erfcx_cf(x) * (-x * x).exp() / std::f64::consts::PI.sqrt()
}

pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x >= 3.0 {
        erfc_tail(x)
    } else if x <= -3.0 {
        2.0 - erfc_tail(-x)
    } else {
        1.0 - erf_series(x)
    }
}

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Standard normal distribution function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

/// Standard normal quantile, accurate to ~1e-13 (the interval contract
/// requires 1e-8). Newton iteration on `normal_cdf` from a crude start.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Contract(format!(
            "normal quantile requires p in (0,1), got {p}"
        )));
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    // Crude start: logistic approximation in the bulk, sqrt(-2 log p) in the tails.
    let mut z = if p < 0.02 {
        -(-2.0 * p.ln()).sqrt()
    } else if p > 0.98 {
        (-2.0 * (1.0 - p).ln()).sqrt()
    } else {
        -(1.0 / p - 1.0).ln() / 1.702
    };
    for _ in 0..40 {
        let err = normal_cdf(z) - p;
        let step = err / normal_pdf(z);
        // Halley-style damping keeps the first steps stable in the tails.
        let step = step / (1.0 + 0.5 * z * step).max(0.5);
        z -= step;
        if step.abs() < 1e-14 * (1.0 + z.abs()) {
            break;
        }
    }
    Ok(z)
}
