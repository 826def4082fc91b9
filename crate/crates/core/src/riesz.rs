//! Candidate value functions built by integrating the resolvent kernel
//! against the representing density over a candidate stopping region, in one
//! dimension (closed form plus quadrature fallback), two dimensions, and
//! space-time for the finite-horizon put.

use serde::{Deserialize, Serialize};

use crate::amput::{crossing_prob, european_put, ExerciseBoundary, PutParams};
use crate::error::{Error, Result};
use crate::invest2d::EllipsoidBoundary;
use crate::kernels::Kernel2D;
use crate::model::GbmParams;
use crate::quad::{integrate_segments, QuadConfig, QuadResult};

/// Representing density of the stopped reward: the measure carried by the
/// stopping region is absolutely continuous with spatial density
/// σ(y) = rK + Σ (μ_i - r) y_i; finite-horizon problems additionally carry
/// a terminal mass with density (K - y) against the speed measure.
#[derive(Debug, Clone)]
pub struct RepresentingDensity {
    pub params: GbmParams,
    /// Whether the problem has a horizon and hence a terminal mass.
    pub terminal: bool,
}

impl RepresentingDensity {
    pub fn new(params: GbmParams, terminal: bool) -> Self {
        Self { params, terminal }
    }

    /// Spatial (interior) density.
    pub fn eval(&self, y: &[f64]) -> Result<f64> {
        sigma_density(y, &self.params)
    }

    /// Terminal mass density (K - y) on (0, K) at the horizon; zero
    /// elsewhere and absent for perpetual problems.
    pub fn terminal_mass(&self, y: f64) -> f64 {
        if self.terminal && y > 0.0 && y < self.params.strike {
            self.params.strike - y
        } else {
            0.0
        }
    }
}

/// Representing density of the reward inside the stopping region:
/// σ(y) = rK + Σ (μ_i - r) y_i, the rate at which discounting erodes the
/// stopped payoff (K - Σ y_i).
pub fn sigma_density(y: &[f64], params: &GbmParams) -> Result<f64> {
    if y.len() != params.dim() {
        return Err(Error::InvalidParameter("point dimension mismatch".into()));
    }
    let mut s = params.r * params.strike;
    for (yi, mi) in y.iter().zip(&params.mu) {
        s += (mi - params.r) * yi;
    }
    Ok(s)
}

/// Characteristic exponents (λ₊ > 0 > λ₋) of the discounted GBM, the roots of
/// ½a²λ(λ-1) + μλ - r = 0. For μ = r they are (1, -2r/a²).
pub fn exponents_1d(mu: f64, a: f64, r: f64) -> (f64, f64) {
    let half_a2 = 0.5 * a * a;
    let b = mu - half_a2;
    let disc = (b * b + 4.0 * half_a2 * r).sqrt();
    let lam_plus = (-b + disc) / (a * a);
    let lam_minus = (-b - disc) / (a * a);
    (lam_plus, lam_minus)
}

fn check_1d_inputs(threshold: f64, x: f64, params: &GbmParams) -> Result<()> {
    if params.dim() != 1 {
        return Err(Error::InvalidParameter("candidate_value_1d requires d = 1".into()));
    }
    if !(threshold > 0.0 && threshold < params.strike) {
        return Err(Error::Domain(format!(
            "threshold must lie in (0, K), got {threshold}"
        )));
    }
    if !(x > 0.0) {
        return Err(Error::Domain("evaluation point must be positive".into()));
    }
    Ok(())
}

/// Candidate value of the threshold rule "stop below `threshold`" at spot
/// `x`: the kernel integral over (0, threshold] in closed form.
pub fn candidate_value_1d(threshold: f64, x: f64, params: &GbmParams) -> Result<f64> {
    check_1d_inputs(threshold, x, params)?;
    let (mu, a, r, k) = (params.mu[0], params.a[0], params.r, params.strike);
    let (lp, lm) = exponents_1d(mu, a, r);
    let w = lp - lm;
    let pre = 2.0 / (a * a * w);
    let xb = threshold;

    if x >= xb {
        // Only the decaying solution contributes: x^λ₋ times moments of the
        // representing density against x^λ₊ over (0, x̄).
        let mut inner = r * k * xb.powf(-lm) / (-lm);
        if mu != r {
            inner += (mu - r) * xb.powf(1.0 - lm) / (1.0 - lm);
        }
        return Ok(pre * x.powf(lm) * inner);
    }

    // Below the threshold the integral splits at y = x.
    let lower = -r * k / lm + (mu - r) * x / (1.0 - lm);
    // ψ(x) ∫_x^x̄ φ σ dm; the (μ - r) term vanishes identically when μ = r
    // (λ₊ = 1 makes its denominator zero, coefficient zero first).
    let mut upper = r * k * (x.powf(-lp) - xb.powf(-lp)) / lp;
    if mu != r {
        upper += (mu - r) * (x.powf(1.0 - lp) - xb.powf(1.0 - lp)) / (lp - 1.0);
    }
    Ok(pre * (lower + x.powf(lp) * upper))
}

/// Same value by adaptive quadrature of kernel × density against the speed
/// measure; independent of the closed form except for the shared exponents.
pub fn candidate_value_1d_quad(
    threshold: f64,
    x: f64,
    params: &GbmParams,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    check_1d_inputs(threshold, x, params)?;
    let (mu, a, r) = (params.mu[0], params.a[0], params.r);
    let (lp, lm) = exponents_1d(mu, a, r);
    let w = lp - lm;
    let beta = 2.0 * mu / (a * a);
    let speed_pre = 2.0 / (a * a);
    let green = |u: f64, v: f64| -> f64 {
        let (lo, hi) = if u <= v { (u, v) } else { (v, u) };
        lo.powf(lp) * hi.powf(lm) / w
    };
    let integrand = |y: f64| {
        let sigma = r * params.strike + (mu - r) * y;
        green(x, y) * sigma * speed_pre * y.powf(beta - 2.0)
    };
    let mut points = vec![0.0];
    if x < threshold {
        points.push(x);
    }
    points.push(threshold);
    integrate_segments(integrand, &points, cfg)
}

/// Candidate value of a two-dimensional superellipse stopping region at spot
/// `x`, with the quadrature error estimate of the outer integral.
pub fn candidate_value_2d(
    boundary: &EllipsoidBoundary,
    x: (f64, f64),
    params: &GbmParams,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    if params.dim() != 2 {
        return Err(Error::InvalidParameter("candidate_value_2d requires d = 2".into()));
    }
    if !(x.0 > 0.0 && x.1 > 0.0) {
        return Err(Error::Domain("evaluation point must be positive".into()));
    }
    boundary.validate(params.strike)?;
    let kernel = Kernel2D::new(params)?;
    let (r, k) = (params.r, params.strike);
    let (mu1, mu2) = (params.mu[0], params.mu[1]);

    let inner_cfg = QuadConfig {
        rel_tol: 0.1 * cfg.rel_tol,
        abs_tol: 0.1 * cfg.abs_tol,
        max_subdivisions: cfg.max_subdivisions,
    };

    let inner = |y1: f64| -> f64 {
        let top = boundary.x2_of_x1(y1);
        if top <= 0.0 {
            return 0.0;
        }
        let f = |y2: f64| {
            let g = match kernel.resolvent(x, (y1, y2)) {
                Ok(v) => v,
                // The start point itself carries no mass.
                Err(Error::SingularKernel) => 0.0,
                Err(e) => panic!("unexpected kernel failure: {e}"),
            };
            g * (r * k + (mu1 - r) * y1 + (mu2 - r) * y2)
        };
        let mut pts = vec![0.0];
        // Splitting at the singular row sharpens the inner quadrature when
        // the start point lies inside the region.
        if x.1 < top {
            pts.push(x.1);
        }
        pts.push(top);
        integrate_segments(f, &pts, &inner_cfg)
            .map(|r| r.value)
            .unwrap_or(f64::NAN)
    };

    let mut pts = vec![0.0];
    if x.0 > 0.0 && x.0 < boundary.p1 {
        pts.push(x.0);
    }
    pts.push(boundary.p1);
    let res = integrate_segments(inner, &pts, cfg)?;
    if !res.value.is_finite() {
        return Err(Error::QuadratureTolerance {
            requested: cfg.rel_tol,
            achieved: f64::INFINITY,
        });
    }
    Ok(res)
}

/// Candidate value of a time-dependent boundary rule for the finite-horizon
/// put at (s, x): the space-time kernel integral collapses to a discounted
/// crossing-probability time integral plus the terminal (European) part.
pub fn candidate_value_spacetime(
    curve: &ExerciseBoundary,
    s: f64,
    x: f64,
    put: &PutParams,
    cfg: &QuadConfig,
) -> Result<f64> {
    if !(s >= 0.0 && s < put.horizon) {
        return Err(Error::Domain(format!("need 0 <= s < horizon, got s = {s}")));
    }
    if !(x > 0.0) {
        return Err(Error::Domain("spot must be positive".into()));
    }
    let integrand = |t: f64| {
        let level = curve.at(t);
        if level <= 0.0 {
            return 0.0;
        }
        (-put.r * (t - s)).exp() * crossing_prob(s, x, t, level, put).expect("t > s inside panel")
    };
    // Knots of the boundary curve are forced breakpoints of the quadrature.
    let mut pts = vec![s];
    for &t in &curve.t {
        if t > s + 1e-14 && t < put.horizon - 1e-14 {
            pts.push(t);
        }
    }
    pts.push(put.horizon);
    let premium = put.r * put.strike * integrate_segments(integrand, &pts, cfg)?.value;
    Ok(premium + european_put(s, x, put))
}

/// A candidate stopping region, serializable for the CLI outputs.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind")]
pub enum CandidateSet {
    /// d = 1: stop when the state falls to `threshold` or below.
    #[serde(rename = "threshold")]
    Threshold1D { threshold: f64 },
    /// d = 2: stop inside the superellipse region.
    #[serde(rename = "ellipse")]
    Ellipsoid2D { ellipse: EllipsoidBoundary },
    /// Finite horizon, d = 1: stop at or below the time-dependent level.
    #[serde(rename = "curve")]
    SpaceTimeCurve { t: Vec<f64>, b: Vec<f64> },
}

impl CandidateSet {
    /// Structural invariants relative to the strike: thresholds inside
    /// (0, K), regions inside the payoff support {Σ y_i < K}, curves
    /// positive, nondecreasing, and ending at K.
    pub fn validate(&self, strike: f64) -> Result<()> {
        match self {
            CandidateSet::Threshold1D { threshold } => {
                if !(*threshold > 0.0 && *threshold < strike) {
                    return Err(Error::InvalidParameter(format!(
                        "threshold must lie in (0, {strike}), got {threshold}"
                    )));
                }
            }
            CandidateSet::Ellipsoid2D { ellipse } => ellipse.validate(strike)?,
            CandidateSet::SpaceTimeCurve { t, b } => {
                if t.len() != b.len() || t.len() < 2 {
                    return Err(Error::InvalidParameter(
                        "curve needs matching t, b arrays with at least 2 knots".into(),
                    ));
                }
                if t.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::InvalidParameter("curve times must strictly increase".into()));
                }
                if b.iter().any(|&v| !(v > 0.0 && v <= strike)) {
                    return Err(Error::InvalidParameter(
                        "curve values must lie in (0, strike]".into(),
                    ));
                }
                if (b[b.len() - 1] - strike).abs() > 1e-9 * strike {
                    return Err(Error::InvalidParameter(
                        "curve must end at the strike".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}
