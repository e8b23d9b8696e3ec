//! Convolution kernel families and their partial-mass primitive.
//!
//! Every registry family comes with a closed-form antiderivative, so the
//! forward operator on step functions never needs quadrature. Quadrature
//! enters only as an independent cross-check and for the Gram diagnostics.
//!
//! The primitive everything downstream consumes is the oriented integral
//! `interval_mass(x, a, b)` = integral of phi(x - y) over y in [a, b],
//! i.e. the response at `x` of an indicator block on `[a, b)` after
//! blurring. `interval_response` extends it with the degenerate `b == a`
//! branch, which returns the point value phi(x - a).

use crate::error::{Error, Result};
use crate::quad;
use crate::special;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// A convolution kernel family together with its parameters.
///
/// All families are fixed-shape: user scaling is achieved by pre-scaling
/// the x-axis rather than by a bandwidth parameter, which keeps the
/// antiderivatives exact.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Kernel {
    /// (2*pi)^{-1/2} exp(-x^2/2).
    Gaussian,
    /// exp(-|x|)/2.
    Laplace,
    /// Indicator of [0, 1].
    Boxcar,
    /// x^p on [0, 1], zero elsewhere, integer degree p >= 0.
    Polynomial { degree: u32 },
    /// (1 - |x|)_+^p, integer p >= 2.
    TentPower { power: u32 },
    /// x^{-alpha} on (0, 1], zero elsewhere, alpha in (1/2, 1).
    ///
    /// The singular family: unbounded at the origin. The support is cut at
    /// 1 so the total mass stays finite; the faster localization rate is
    /// driven entirely by the singularity at 0.
    Abel { alpha: f64 },
}

impl Kernel {
    pub fn gaussian() -> Self {
        Kernel::Gaussian
    }

    pub fn laplace() -> Self {
        Kernel::Laplace
    }

    pub fn boxcar() -> Self {
        Kernel::Boxcar
    }

    pub fn polynomial(degree: u32) -> Self {
        Kernel::Polynomial { degree }
    }

    pub fn tent_power(power: u32) -> Result<Self> {
        if power < 2 {
            return Err(Error::InvalidKernel(format!(
                "tent-power kernel requires p >= 2, got {power}"
            )));
        }
        Ok(Kernel::TentPower { power })
    }

    /// The exponent must lie strictly inside (1/2, 1).
    pub fn abel(alpha: f64) -> Result<Self> {
        if !(alpha > 0.5 && alpha < 1.0) {
            return Err(Error::InvalidKernel(format!(
                "abel kernel requires alpha in (1/2, 1), got {alpha}"
            )));
        }
        Ok(Kernel::Abel { alpha })
    }

    pub fn name(&self) -> String {
        match self {
            Kernel::Gaussian => "gaussian".into(),
            Kernel::Laplace => "laplace".into(),
            Kernel::Boxcar => "boxcar".into(),
            Kernel::Polynomial { degree } => format!("polynomial(p={degree})"),
            Kernel::TentPower { power } => format!("tentpower(p={power})"),
            Kernel::Abel { alpha } => format!("abel(alpha={alpha})"),
        }
    }

    /// Total mass of the kernel; finite and positive for every family.
    pub fn total_mass(&self) -> f64 {
        match *self {
            Kernel::Gaussian | Kernel::Laplace | Kernel::Boxcar => 1.0,
            Kernel::Polynomial { degree } => 1.0 / (degree as f64 + 1.0),
            Kernel::TentPower { power } => 2.0 / (power as f64 + 1.0),
            Kernel::Abel { alpha } => 1.0 / (1.0 - alpha),
        }
    }

    /// Analytic supremum of the kernel; infinite for the singular family.
    pub fn sup_bound(&self) -> f64 {
        match *self {
            Kernel::Gaussian => 1.0 / (2.0 * std::f64::consts::PI).sqrt(),
            Kernel::Laplace => 0.5,
            Kernel::Boxcar | Kernel::Polynomial { .. } | Kernel::TentPower { .. } => 1.0,
            Kernel::Abel { .. } => f64::INFINITY,
        }
    }

    pub fn is_bounded(&self) -> bool {
        !matches!(self, Kernel::Abel { .. })
    }

    /// Whether the density has jump discontinuities (as opposed to mere
    /// kinks). Drives the choice of local refinement in the estimator.
    pub fn has_jump_discontinuities(&self) -> bool {
        match *self {
            Kernel::Boxcar | Kernel::Abel { .. } => true,
            // x^p jumps from 1 to 0 at the right support edge for every p,
            // and from 0 to 1 at the left edge when p = 0.
            Kernel::Polynomial { .. } => true,
            Kernel::Gaussian | Kernel::Laplace | Kernel::TentPower { .. } => false,
        }
    }

    /// Points where the density is not smooth (jumps or kinks).
    pub fn breakpoints(&self) -> Vec<f64> {
        match *self {
            Kernel::Gaussian => vec![],
            Kernel::Laplace => vec![0.0],
            Kernel::Boxcar | Kernel::Polynomial { .. } | Kernel::Abel { .. } => vec![0.0, 1.0],
            Kernel::TentPower { .. } => vec![-1.0, 0.0, 1.0],
        }
    }

    /// Confidence intervals need the normal limit law, which only the
    /// bounded families have.
    pub fn admits_inference(&self) -> bool {
        self.is_bounded()
    }

    /// Point evaluation phi(x).
    ///
    /// The singular family has a pole at the origin; evaluation there is a
    /// domain error.
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        match *self {
            Kernel::Abel { alpha } => {
                if x == 0.0 {
                    Err(Error::KernelPole)
                } else if x > 0.0 && x <= 1.0 {
                    Ok(x.powf(-alpha))
                } else {
                    Ok(0.0)
                }
            }
            _ => Ok(self.evaluate_bounded(x)),
        }
    }

    /// Point evaluation for the bounded families (never errors).
    fn evaluate_bounded(&self, x: f64) -> f64 {
        match *self {
            Kernel::Gaussian => special::normal_pdf(x),
            Kernel::Laplace => 0.5 * (-x.abs()).exp(),
            Kernel::Boxcar => {
                if (0.0..=1.0).contains(&x) {
                    1.0
                } else {
                    0.0
                }
            }
            Kernel::Polynomial { degree } => {
                if (0.0..=1.0).contains(&x) {
                    x.powi(degree as i32)
                } else {
                    0.0
                }
            }
            Kernel::TentPower { power } => {
                let a = x.abs();
                if a >= 1.0 {
                    0.0
                } else {
                    (1.0 - a).powi(power as i32)
                }
            }
            Kernel::Abel { .. } => unreachable!("abel handled by evaluate"),
        }
    }

    /// Mass of the kernel below `t`: integral of phi over (-inf, t].
    ///
    /// This is the closed-form antiderivative behind `interval_mass`.
    /// `mass_below(+inf) = total_mass`, `mass_below(-inf) = 0`.
    pub fn mass_below(&self, t: f64) -> f64 {
        if t == f64::INFINITY {
            return self.total_mass();
        }
        if t == f64::NEG_INFINITY {
            return 0.0;
        }
        match *self {
            Kernel::Gaussian => special::normal_cdf(t),
            Kernel::Laplace => {
                if t <= 0.0 {
                    0.5 * t.exp()
                } else {
                    1.0 - 0.5 * (-t).exp()
                }
            }
            Kernel::Boxcar => t.clamp(0.0, 1.0),
            Kernel::Polynomial { degree } => {
                let q = degree as f64 + 1.0;
                if t <= 0.0 {
                    0.0
                } else if t >= 1.0 {
                    1.0 / q
                } else {
                    t.powf(q) / q
                }
            }
            Kernel::TentPower { power } => {
                let q = power as f64 + 1.0;
                if t <= -1.0 {
                    0.0
                } else if t <= 0.0 {
                    (1.0 + t).powf(q) / q
                } else if t < 1.0 {
                    (2.0 - (1.0 - t).powf(q)) / q
                } else {
                    2.0 / q
                }
            }
            Kernel::Abel { alpha } => {
                let q = 1.0 - alpha;
                if t <= 0.0 {
                    0.0
                } else if t >= 1.0 {
                    1.0 / q
                } else {
                    t.powf(q) / q
                }
            }
        }
    }

    /// Oriented integral of phi(x - y) over y in [a, b]; endpoints may be
    /// infinite. Total for every family (the singularity is integrable).
    pub fn interval_mass(&self, x: f64, a: f64, b: f64) -> f64 {
        // Substituting u = x - y flips the orientation:
        //   int_a^b phi(x - y) dy = F(x - a) - F(x - b).
        self.mass_below(x - a) - self.mass_below(x - b)
    }

    /// The partial-mass map: `interval_mass` for a != b, the point value
    /// phi(x - a) in the degenerate case b == a.
    pub fn interval_response(&self, x: f64, a: f64, b: f64) -> Result<f64> {
        if a == b {
            self.evaluate(x - a)
        } else {
            Ok(self.interval_mass(x, a, b))
        }
    }

    /// Radius beyond which the tail mass (one side) drops below `eps`.
    /// Used to truncate infinite endpoints before quadrature.
    pub fn tail_radius(&self, eps: f64) -> f64 {
        match *self {
            Kernel::Gaussian => {
                // Phi(-t) <= eps  <=>  t >= -quantile(eps)
                -special::normal_quantile(eps.clamp(1e-300, 0.5)).unwrap_or(-40.0)
            }
            Kernel::Laplace => (1.0 / (2.0 * eps)).ln().max(1.0),
            Kernel::Boxcar | Kernel::Polynomial { .. } | Kernel::Abel { .. } => 1.0,
            Kernel::TentPower { .. } => 1.0,
        }
    }

    /// `interval_mass` by adaptive quadrature rather than the closed form.
    /// Infinite endpoints are truncated where the tail mass falls below
    /// `tol`; the known kink/jump locations are split out so each piece is
    /// smooth. Not supported for the singular family (pole in the
    /// integrand).
    pub fn interval_mass_quadrature(&self, x: f64, a: f64, b: f64, tol: f64) -> Result<f64> {
        if matches!(self, Kernel::Abel { .. }) {
            return Err(Error::InvalidKernel(
                "quadrature across the abel pole is unreliable; use the closed form".into(),
            ));
        }
        let (lo, hi, sign) = if a <= b { (a, b, 1.0) } else { (b, a, -1.0) };
        // phi(x - y) is nonzero only for y in [x - r, x + r].
        let r = self.tail_radius(0.25 * tol);
        let lo = lo.max(x - r);
        let hi = hi.min(x + r);
        if hi <= lo {
            return Ok(0.0);
        }
        // Breakpoints of phi at u map to y = x - u.
        let cuts: Vec<f64> = self.breakpoints().iter().map(|u| x - u).collect();
        let f = |y: f64| self.evaluate_bounded(x - y);
        let v = quad::integrate_split(f, lo, hi, &cuts, 0.5 * tol)?;
        Ok(sign * v)
    }
}

/// Result of the Gram identifiability diagnostic.
#[derive(Debug, Clone)]
pub struct IdentifiabilityReport {
    pub gram: DMatrix<f64>,
    pub min_eigenvalue: f64,
}

/// Gram matrix in L2([0,1]) of the partial-mass basis generated by an
/// explicit interval list (entries with a == b are point responses), with
/// its smallest eigenvalue. Strictly positive means the basis is
/// numerically linearly independent.
pub fn interval_basis_gram(
    kernel: &Kernel,
    intervals: &[(f64, f64)],
    tol: f64,
) -> Result<IdentifiabilityReport> {
    let m = intervals.len();
    if matches!(kernel, Kernel::Abel { .. }) && intervals.iter().any(|&(a, b)| a == b) {
        return Err(Error::InvalidKernel(
            "point response of the singular family is not square integrable".into(),
        ));
    }
    let kernel_cuts = kernel.breakpoints();
    // Each basis function inherits kinks at x = endpoint + breakpoint.
    let mut all_cuts: Vec<f64> = Vec::new();
    for &(a, b) in intervals {
        for &c in &kernel_cuts {
            if a.is_finite() {
                all_cuts.push(a + c);
            }
            if b.is_finite() {
                all_cuts.push(b + c);
            }
        }
    }
    let mut gram = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let (ai, bi) = intervals[i];
            let (aj, bj) = intervals[j];
            let f = |x: f64| {
                let u = kernel.interval_response(x, ai, bi).unwrap_or(f64::NAN);
                let v = kernel.interval_response(x, aj, bj).unwrap_or(f64::NAN);
                u * v
            };
            let val = quad::integrate_split(f, 0.0, 1.0, &all_cuts, tol)?;
            gram[(i, j)] = val;
            gram[(j, i)] = val;
        }
    }
    let eig = gram.clone().symmetric_eigen();
    let min_eigenvalue = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(IdentifiabilityReport { gram, min_eigenvalue })
}

/// Numerical check of the linear-independence condition behind
/// identifiability: builds the Gram matrix of the blurred-indicator basis
/// for a boundary configuration `taus` = (-inf, t_1, ..., t_m, +inf) with
/// interior points in (0,1), at most two consecutive entries equal (an
/// equal pair contributes the point response, i.e. the derivative
/// direction), and reports its smallest eigenvalue.
pub fn identifiability_diagnostic(
    kernel: &Kernel,
    taus: &[f64],
    tol: f64,
) -> Result<IdentifiabilityReport> {
    if taus.len() < 2 {
        return Err(Error::Contract(
            "configuration needs at least (-inf, +inf)".into(),
        ));
    }
    if taus[0] != f64::NEG_INFINITY || *taus.last().unwrap() != f64::INFINITY {
        return Err(Error::Contract(
            "configuration must start at -inf and end at +inf".into(),
        ));
    }
    let interior = &taus[1..taus.len() - 1];
    for &t in interior {
        if !(t > 0.0 && t < 1.0) {
            return Err(Error::Contract(format!(
                "interior points must lie in (0,1), got {t}"
            )));
        }
    }
    for w in interior.windows(2) {
        if w[1] < w[0] {
            return Err(Error::Contract("configuration must be non-decreasing".into()));
        }
    }
    for w in interior.windows(3) {
        if w[0] == w[1] && w[1] == w[2] {
            return Err(Error::Contract(
                "at most two consecutive entries may be equal".into(),
            ));
        }
    }
    let intervals: Vec<(f64, f64)> = taus.windows(2).map(|w| (w[0], w[1])).collect();
    interval_basis_gram(kernel, &intervals, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::DEFAULT_QUAD_TOL;
    use approx::assert_abs_diff_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn bounded_registry() -> Vec<Kernel> {
        vec![
            Kernel::gaussian(),
            Kernel::laplace(),
            Kernel::boxcar(),
            Kernel::polynomial(1),
            Kernel::polynomial(3),
            Kernel::tent_power(2).unwrap(),
            Kernel::tent_power(4).unwrap(),
        ]
    }

    #[test]
    fn point_values_match_closed_forms() {
        assert_abs_diff_eq!(Kernel::boxcar().evaluate(0.5).unwrap(), 1.0);
        // (2*pi)^{-1/2} at the mode
        assert_abs_diff_eq!(
            Kernel::gaussian().evaluate(0.0).unwrap(),
            0.3989422804014327,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(Kernel::laplace().evaluate(0.0).unwrap(), 0.5);
        assert_eq!(Kernel::boxcar().evaluate(-0.1).unwrap(), 0.0);
        assert_eq!(Kernel::boxcar().evaluate(1.1).unwrap(), 0.0);
    }

    #[test]
    fn abel_construction_rejects_out_of_range_exponents() {
        assert!(Kernel::abel(0.5).is_err());
        assert!(Kernel::abel(1.0).is_err());
        assert!(Kernel::abel(0.3).is_err());
        assert!(Kernel::abel(0.75).is_ok());
    }

    #[test]
    fn abel_pole_is_a_domain_error() {
        let k = Kernel::abel(0.75).unwrap();
        assert!(matches!(k.evaluate(0.0), Err(Error::KernelPole)));
        assert!(k.evaluate(0.5).unwrap() > 0.0);
        assert_eq!(k.evaluate(1.5).unwrap(), 0.0);
        assert!(matches!(k.interval_response(0.3, 0.3, 0.3), Err(Error::KernelPole)));
    }

    #[test]
    fn tent_power_rejects_small_exponents() {
        assert!(Kernel::tent_power(1).is_err());
        assert!(Kernel::tent_power(2).is_ok());
    }

    #[test]
    fn total_mass_finite_and_positive_for_every_family() {
        let mut all = bounded_registry();
        all.push(Kernel::abel(0.75).unwrap());
        for k in all {
            let m = k.total_mass();
            assert!(m.is_finite() && m > 0.0, "{}", k.name());
        }
    }

    #[test]
    fn interval_mass_examples() {
        let boxcar = Kernel::boxcar();
        // length of [-0.5, 0.5] inter [0, 1]
        assert_abs_diff_eq!(boxcar.interval_mass(0.5, 0.0, 1.0), 0.5, epsilon = 1e-15);
        // degenerate branch: point value
        assert_abs_diff_eq!(
            boxcar.interval_response(0.5, 0.2, 0.2).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        // half the unit mass by symmetry
        assert_abs_diff_eq!(
            Kernel::gaussian().interval_mass(0.0, f64::NEG_INFINITY, 0.0),
            0.5,
            epsilon = 1e-15
        );
    }

    #[test]
    fn orientation_flips_sign() {
        for k in bounded_registry() {
            let v = k.interval_mass(0.4, 0.1, 0.9);
            let w = k.interval_mass(0.4, 0.9, 0.1);
            assert_abs_diff_eq!(v, -w, epsilon = 1e-15);
        }
    }

    #[test]
    fn additivity_of_interval_mass() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut all = bounded_registry();
        all.push(Kernel::abel(0.75).unwrap());
        for k in &all {
            for _ in 0..200 {
                let x: f64 = rng.random_range(-1.0..2.0);
                let mut pts = [
                    rng.random_range(-2.0..3.0),
                    rng.random_range(-2.0..3.0),
                    rng.random_range(-2.0..3.0),
                ];
                pts.sort_by(|u, v| u.partial_cmp(v).unwrap());
                let [a, b, c] = pts;
                let whole = k.interval_mass(x, a, c);
                let parts = k.interval_mass(x, a, b) + k.interval_mass(x, b, c);
                assert_abs_diff_eq!(whole, parts, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn full_line_mass_equals_total_mass() {
        for k in bounded_registry() {
            for &x in &[-3.0, 0.0, 0.4, 1.0, 7.5] {
                assert_abs_diff_eq!(
                    k.interval_mass(x, f64::NEG_INFINITY, f64::INFINITY),
                    k.total_mass(),
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn symmetric_unit_mass_half_point() {
        // For symmetric unit-mass kernels the mass below the center is 1/2.
        for k in [Kernel::gaussian(), Kernel::laplace()] {
            for &t in &[-1.3, 0.0, 0.6, 2.0] {
                assert_abs_diff_eq!(
                    k.interval_mass(t, f64::NEG_INFINITY, t),
                    0.5,
                    epsilon = 1e-14
                );
            }
        }
    }

    #[test]
    fn closed_form_agrees_with_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for k in bounded_registry() {
            for _ in 0..100 {
                let x: f64 = rng.random_range(-1.5..2.5);
                let a: f64 = rng.random_range(-3.0..4.0);
                let b: f64 = rng.random_range(-3.0..4.0);
                let exact = k.interval_mass(x, a, b);
                let quadr = k.interval_mass_quadrature(x, a, b, DEFAULT_QUAD_TOL).unwrap();
                assert_abs_diff_eq!(exact, quadr, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn quadrature_handles_infinite_endpoints() {
        for k in bounded_registry() {
            let exact = k.interval_mass(0.3, f64::NEG_INFINITY, 0.6);
            let quadr = k
                .interval_mass_quadrature(0.3, f64::NEG_INFINITY, 0.6, DEFAULT_QUAD_TOL)
                .unwrap();
            assert_abs_diff_eq!(exact, quadr, epsilon = 1e-8);
        }
    }

    #[test]
    fn identifiability_boxcar_example() {
        let rep = identifiability_diagnostic(
            &Kernel::boxcar(),
            &[f64::NEG_INFINITY, 0.3, 0.7, f64::INFINITY],
            DEFAULT_QUAD_TOL,
        )
        .unwrap();
        assert!(rep.min_eigenvalue > 0.0, "min eig {}", rep.min_eigenvalue);
    }

    #[test]
    fn identifiability_gaussian_single_jump() {
        let rep = identifiability_diagnostic(
            &Kernel::gaussian(),
            &[f64::NEG_INFINITY, 0.5, f64::INFINITY],
            DEFAULT_QUAD_TOL,
        )
        .unwrap();
        assert!(rep.min_eigenvalue > 0.0);
    }

    #[test]
    fn duplicated_interval_gives_zero_eigenvalue() {
        let rep = interval_basis_gram(
            &Kernel::boxcar(),
            &[
                (f64::NEG_INFINITY, 0.4),
                (0.4, f64::INFINITY),
                (0.4, f64::INFINITY),
            ],
            DEFAULT_QUAD_TOL,
        )
        .unwrap();
        assert!(rep.min_eigenvalue.abs() < 1e-9, "min eig {}", rep.min_eigenvalue);
    }

    #[test]
    fn identifiability_rejects_bad_configurations() {
        let k = Kernel::boxcar();
        assert!(identifiability_diagnostic(&k, &[0.0, 1.0], 1e-9).is_err());
        assert!(identifiability_diagnostic(
            &k,
            &[f64::NEG_INFINITY, 0.5, 0.5, 0.5, f64::INFINITY],
            1e-9
        )
        .is_err());
        assert!(identifiability_diagnostic(
            &k,
            &[f64::NEG_INFINITY, 1.5, f64::INFINITY],
            1e-9
        )
        .is_err());
    }

    #[test]
    fn kernel_spec_round_trips_through_serde() {
        let k = Kernel::abel(0.75).unwrap();
        let s = serde_json::to_string(&k).unwrap();
        let back: Kernel = serde_json::from_str(&s).unwrap();
        assert_eq!(k, back);
    }
}
