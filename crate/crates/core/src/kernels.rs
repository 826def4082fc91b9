//! Closed-form resolvent / Green kernels of the geometric Brownian motion:
//! the 1D perpetual kernel, the 2D kernel built from the modified Bessel
//! function K0, and the space-time kernel for finite-horizon problems.

use crate::error::{Error, Result};
use crate::model::{lognormal_density, GbmParams};
use crate::special::K0Evaluator;

/// 1D Green kernel of GBM with drift r, symmetric with respect to the speed
/// measure m(dx) = (2/a²) x^(γ-2) dx, γ = 2r/a².
#[derive(Debug, Clone, Copy)]
pub struct Kernel1D {
    pub gamma: f64,
    pub a: f64,
    pub r: f64,
}

impl Kernel1D {
    /// Requires d = 1 and drift equal to the discount rate.
    pub fn new(params: &GbmParams) -> Result<Self> {
        if params.dim() != 1 {
            return Err(Error::InvalidParameter("Kernel1D requires d = 1".into()));
        }
        if (params.mu[0] - params.r).abs() > 1e-12 {
            return Err(Error::InvalidParameter(
                "Kernel1D is the drift-r kernel; use the generalized exponents for mu != r".into(),
            ));
        }
        Ok(Self { gamma: params.gamma_1d()?, a: params.a[0], r: params.r })
    }

    /// G_r(x, y) = min(x,y) max(x,y)^(-γ) / (1 + γ).
    pub fn green(&self, x: f64, y: f64) -> Result<f64> {
        if !(x > 0.0) || !(y > 0.0) {
            return Err(Error::Domain("green_1d requires positive arguments".into()));
        }
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        Ok(lo * hi.powf(-self.gamma) / (1.0 + self.gamma))
    }

    /// Speed measure density (2/a²) x^(γ-2).
    pub fn speed_density(&self, x: f64) -> f64 {
        2.0 / (self.a * self.a) * x.powf(self.gamma - 2.0)
    }
}

/// Kernel value w.r.t. the speed measure.
pub fn green_1d(x: f64, y: f64, k: &Kernel1D) -> Result<f64> {
    k.green(x, y)
}

/// 2D resolvent kernel of the GBM with respect to Lebesgue measure.
///
/// Volatilities are normalized to be positive; a sign flip of a component is
/// absorbed into the correlation of the driving Brownian motions.
#[derive(Debug, Clone, Copy)]
pub struct Kernel2D {
    pub rho: f64,
    pub a1: f64,
    pub a2: f64,
    pub m1: f64,
    pub m2: f64,
    pub r: f64,
    pub r_hat: f64,
    k0: K0Evaluator,
}

impl Kernel2D {
    pub fn new(params: &GbmParams) -> Result<Self> {
        Self::with_rate(params, params.r)
    }

    /// Same dynamics, different discount rate (used by the resolvent-equation
    /// checks).
    pub fn with_rate(params: &GbmParams, r: f64) -> Result<Self> {
        if params.dim() != 2 {
            return Err(Error::InvalidParameter("Kernel2D requires d = 2".into()));
        }
        if !(r > 0.0) {
            return Err(Error::InvalidParameter("rate must be positive".into()));
        }
        let s1 = params.a[0].signum();
        let s2 = params.a[1].signum();
        let rho = s1 * s2 * params.sigma_corr[0][1];
        if rho.abs() >= 1.0 {
            return Err(Error::InvalidParameter("|rho| must be < 1".into()));
        }
        let a1 = params.a[0].abs();
        let a2 = params.a[1].abs();
        let m1 = (params.mu[0] - 0.5 * a1 * a1) / a1;
        let m2 = (params.mu[1] - 0.5 * a2 * a2) / a2;
        let r_hat = r + b_rho(m1, m2, rho) / (2.0 * (1.0 - rho * rho));
        Ok(Self { rho, a1, a2, m1, m2, r, r_hat, k0: K0Evaluator::default() })
    }

    /// Density at `point` of the discounted occupation measure started at
    /// `start`, w.r.t. Lebesgue measure in `point`.
    pub fn resolvent(&self, start: (f64, f64), point: (f64, f64)) -> Result<f64> {
        let (x1, x2) = start;
        let (u, v) = point;
        if !(x1 > 0.0 && x2 > 0.0 && u > 0.0 && v > 0.0) {
            return Err(Error::Domain("resolvent_2d requires positive coordinates".into()));
        }
        let u_hat = (u / x1).ln() / self.a1;
        let v_hat = (v / x2).ln() / self.a2;
        let density = self.log_space_density(u_hat, v_hat)?;
        Ok(density / (self.a1 * self.a2 * u * v))
    }

    /// Resolvent density expressed in the normalized log coordinates
    /// (û, v̂); the Lebesgue kernel is this divided by a1 a2 u v.
    pub fn log_space_density(&self, u_hat: f64, v_hat: f64) -> Result<f64> {
        let omr = 1.0 - self.rho * self.rho;
        let b = b_rho(u_hat, v_hat, self.rho);
        if b <= 0.0 {
            // B_rho is positive definite; zero only at the start point where
            // K0 blows up.
            return Err(Error::SingularKernel);
        }
        let a = a_rho(u_hat, v_hat, self.m1, self.m2, self.rho);
        let arg = (self.r_hat * 2.0 * b / omr).sqrt();
        let scaled = self.k0.eval_scaled(arg)?;
        Ok((-a / (2.0 * omr) - arg).exp() * scaled / (std::f64::consts::PI * omr.sqrt()))
    }
}

/// B_rho(x, y) = x² - 2 rho x y + y².
pub fn b_rho(x: f64, y: f64, rho: f64) -> f64 {
    x * x - 2.0 * rho * x * y + y * y
}

/// A_rho(x, y; m1, m2) = 2 rho (m2 x + m1 y) - 2 (m1 x + m2 y).
pub fn a_rho(x: f64, y: f64, m1: f64, m2: f64, rho: f64) -> f64 {
    2.0 * rho * (m2 * x + m1 * y) - 2.0 * (m1 * x + m2 * y)
}

/// Kernel value w.r.t. Lebesgue measure at `point`.
pub fn resolvent_2d(start: (f64, f64), point: (f64, f64), k: &Kernel2D) -> Result<f64> {
    k.resolvent(start, point)
}

/// Space-time kernel of the finite-horizon 1D problem, with respect to
/// dt · m(dy), m(dy) = (2/a²) y^(γ-2) dy.
#[derive(Debug, Clone, Copy)]
pub struct SpaceTimeKernel {
    pub r: f64,
    pub a: f64,
    pub mu: f64,
    pub horizon: f64,
}

impl SpaceTimeKernel {
    pub fn new(r: f64, a: f64, mu: f64, horizon: f64) -> Result<Self> {
        if !(r > 0.0 && a != 0.0 && horizon > 0.0) {
            return Err(Error::InvalidParameter("need r > 0, a != 0, horizon > 0".into()));
        }
        Ok(Self { r, a: a.abs(), mu, horizon })
    }

    pub fn gamma(&self) -> f64 {
        2.0 * self.r / (self.a * self.a)
    }

    /// Transition density with respect to the speed measure.
    pub fn density_wrt_speed(&self, dt: f64, x: f64, y: f64) -> f64 {
        let speed = 2.0 / (self.a * self.a) * y.powf(self.gamma() - 2.0);
        lognormal_density(dt, x, y, self.mu, self.a) / speed
    }

    /// Ḡ_r((s,x),(t,y)); the on-diagonal case t = s, x = y is signaled as
    /// singular rather than returned as a number.
    pub fn eval(&self, s: f64, x: f64, t: f64, y: f64) -> Result<f64> {
        if !(s >= 0.0 && s < self.horizon) {
            return Err(Error::Domain(format!("need 0 <= s < T, got s = {s}")));
        }
        if t > self.horizon {
            return Err(Error::Domain(format!("t = {t} exceeds the horizon {}", self.horizon)));
        }
        if !(x > 0.0 && y > 0.0) {
            return Err(Error::Domain("space-time kernel requires positive prices".into()));
        }
        if t <= s {
            if t == s && x == y {
                return Err(Error::SingularKernel);
            }
            return Ok(0.0);
        }
        Ok((-self.r * (t - s)).exp() * self.density_wrt_speed(t - s, x, y))
    }
}

/// Kernel value w.r.t. dt · m(dy).
pub fn spacetime_kernel(s: f64, x: f64, t: f64, y: f64, k: &SpaceTimeKernel) -> Result<f64> {
    k.eval(s, x, t, y)
}
