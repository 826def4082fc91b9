//! American put: exercise boundary from the backward value-matching integral
//! equation, the early-exercise-premium value decomposition, and an
//! independent binomial-tree oracle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots::bracketed_root;
use crate::special::norm_cdf;

/// Black–Scholes market under the martingale measure: drift = r.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PutParams {
    pub r: f64,
    pub vol: f64,
    pub strike: f64,
    pub horizon: f64,
}

impl PutParams {
    pub fn new(r: f64, vol: f64, strike: f64, horizon: f64) -> Result<Self> {
        if !(r > 0.0 && vol > 0.0 && strike > 0.0 && horizon > 0.0) {
            return Err(Error::InvalidParameter(
                "put parameters must satisfy r, vol, strike, horizon > 0".into(),
            ));
        }
        Ok(Self { r, vol, strike, horizon })
    }
}

/// Time grid with solved boundary values; `b` is nondecreasing with
/// `b[last] = strike`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExerciseBoundary {
    pub t: Vec<f64>,
    pub b: Vec<f64>,
}

impl ExerciseBoundary {
    /// Monotone piecewise-linear interpolation; clamps outside the grid.
    pub fn at(&self, time: f64) -> f64 {
        let n = self.t.len();
        if time <= self.t[0] {
            return self.b[0];
        }
        if time >= self.t[n - 1] {
            return self.b[n - 1];
        }
        let idx = self.t.partition_point(|&ti| ti <= time);
        let (t0, t1) = (self.t[idx - 1], self.t[idx]);
        let (b0, b1) = (self.b[idx - 1], self.b[idx]);
        b0 + (b1 - b0) * (time - t0) / (t1 - t0)
    }
}

/// Value split into the early exercise premium and the European part.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EepDecomposition {
    pub premium: f64,
    pub european: f64,
    pub total: f64,
}

/// Black–Scholes European put value at time s, spot x.
pub fn european_put(s: f64, x: f64, p: &PutParams) -> f64 {
    let tau = p.horizon - s;
    if tau <= 0.0 {
        return (p.strike - x).max(0.0);
    }
    let st = p.vol * tau.sqrt();
    let d1 = ((x / p.strike).ln() + (p.r + 0.5 * p.vol * p.vol) * tau) / st;
    let d2 = d1 - st;
    p.strike * (-p.r * tau).exp() * norm_cdf(-d2) - x * norm_cdf(-d1)
}

/// P(X_t < level | X_s = x) under the martingale measure.
pub fn crossing_prob(s: f64, x: f64, t: f64, level: f64, p: &PutParams) -> Result<f64> {
    if !(t > s) {
        return Err(Error::Domain(format!("crossing_prob needs t > s (s = {s}, t = {t})")));
    }
    if !(x > 0.0 && level > 0.0) {
        return Err(Error::Domain("crossing_prob requires positive prices".into()));
    }
    let tau = t - s;
    let z = ((level / x).ln() - (p.r - 0.5 * p.vol * p.vol) * tau) / (p.vol * tau.sqrt());
    Ok(norm_cdf(z))
}

/// Time discretization for the boundary solver.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GridConfig {
    pub steps: usize,
    /// Cluster nodes toward expiry proportionally to the square root of the
    /// time to maturity, where the boundary slope blows up.
    pub cluster_near_expiry: bool,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { steps: 200, cluster_near_expiry: false }
    }
}

fn time_grid(horizon: f64, cfg: &GridConfig) -> Vec<f64> {
    let n = cfg.steps;
    (0..=n)
        .map(|i| {
            let u = i as f64 / n as f64;
            if cfg.cluster_near_expiry {
                horizon * (1.0 - (1.0 - u) * (1.0 - u))
            } else {
                horizon * u
            }
        })
        .collect()
}

/// Discounted trapezoidal premium integral from `t[i0]` with the boundary
/// values `b[j]` on the tail grid; the j = i0 integrand limit is 1/2 when the
/// spot sits on the (continuous) boundary, and the crossing probability
/// otherwise.
fn premium_integral(
    t: &[f64],
    b: &[f64],
    i0: usize,
    spot: f64,
    on_boundary: bool,
    p: &PutParams,
) -> Result<f64> {
    let s = t[i0];
    let n = t.len() - 1;
    let mut integral = 0.0;
    let mut prev_val = if on_boundary {
        0.5
    } else {
        // t -> s+ limit of P(X_t < b(t)): step function of spot vs b(s).
        if spot < b[i0] {
            1.0
        } else {
            0.0
        }
    };
    let mut prev_t = s;
    for j in (i0 + 1)..=n {
        let val = (-p.r * (t[j] - s)).exp() * crossing_prob(s, spot, t[j], b[j], p)?;
        integral += 0.5 * (prev_val + val) * (t[j] - prev_t);
        prev_val = val;
        prev_t = t[j];
    }
    Ok(p.r * p.strike * integral)
}

/// Solves the boundary backward: b(T) = K, then at each earlier grid time the
/// scalar value-matching equation
/// `K - b = rK ∫ e^{-r(t-s)} P(X_t < b(t)) dt + europut(s, b)`
/// by bracketed bisection with secant polish.
pub fn solve_boundary(p: &PutParams, cfg: &GridConfig) -> Result<ExerciseBoundary> {
    if cfg.steps < 50 {
        return Err(Error::InvalidParameter("need at least 50 time steps".into()));
    }
    let t = time_grid(p.horizon, cfg);
    let n = t.len() - 1;
    let mut b = vec![0.0; n + 1];
    b[n] = p.strike;

    for i in (0..n).rev() {
        let residual = |beta: f64| -> f64 {
            let mut bb = b.clone();
            bb[i] = beta;
            let prem = premium_integral(&t, &bb, i, beta, true, p).expect("interior quadrature");
            (p.strike - beta) - prem - european_put(t[i], beta, p)
        };
        let lo = 1e-8 * p.strike;
        let hi = b[i + 1]; // boundary is nondecreasing
        let f_lo = residual(lo);
        let f_hi = residual(hi);
        if f_lo.signum() == f_hi.signum() {
            // Near expiry (and for vanishing volatility) the root can sit at
            // or marginally above b(t_{i+1}); monotonicity caps the boundary
            // there, so accept the cap when its residual is tiny.
            if f_hi.abs() < 1e-6 * p.strike && f_hi.abs() <= f_lo.abs() {
                b[i] = hi;
                continue;
            }
            return Err(Error::RootFinding(format!(
                "no bracket for b(t_{i}) in ({lo:e}, {hi}): residuals {f_lo:e}, {f_hi:e}"
            )));
        }
        b[i] = bracketed_root(residual, lo, hi, 1e-10)?;
    }

    Ok(ExerciseBoundary { t, b })
}

/// Early-exercise-premium decomposition of the put value at (s, x), using the
/// solved boundary and the same time quadrature as the solver.
pub fn eep_value(s: f64, x: f64, boundary: &ExerciseBoundary, p: &PutParams) -> Result<EepDecomposition> {
    if !(s >= 0.0 && s < p.horizon) {
        return Err(Error::Domain(format!("need 0 <= s < horizon, got s = {s}")));
    }
    let n = boundary.t.len() - 1;
    if boundary.t[0] > s + 1e-12 || boundary.t[n] < p.horizon - 1e-12 {
        return Err(Error::InvalidParameter("boundary grid does not cover [s, horizon]".into()));
    }
    // Tail grid starting exactly at s.
    let mut t = vec![s];
    let mut b = vec![boundary.at(s)];
    for (ti, bi) in boundary.t.iter().zip(&boundary.b) {
        if *ti > s + 1e-14 {
            t.push(*ti);
            b.push(*bi);
        }
    }
    let on_boundary = (x - b[0]).abs() < 1e-12 * p.strike;
    let premium = premium_integral(&t, &b, 0, x, on_boundary, p)?;
    let european = european_put(s, x, p);
    Ok(EepDecomposition { premium, european, total: premium + european })
}

/// Uniqueness gate outcome: value-matching residuals of the solved boundary
/// against vertically shifted copies.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundaryGateReport {
    /// Sup of |value-matching residual| over the probe times, solved boundary.
    pub solved_sup: f64,
    /// Same sup for each shifted copy (order matches the input shifts).
    pub shifted_sups: Vec<f64>,
    /// min(shifted sups) / max(solved sup, floor).
    pub ratio: f64,
    pub passed: bool,
}

/// Value-matching residual `(K - c(t_i)) - premium - european` of a boundary
/// curve at grid node `i`, with the spot on the curve.
fn value_matching_residual(curve: &ExerciseBoundary, i: usize, p: &PutParams) -> Result<f64> {
    let spot = curve.b[i];
    let prem = premium_integral(&curve.t, &curve.b, i, spot, true, p)?;
    Ok((p.strike - spot) - prem - european_put(curve.t[i], spot, p))
}

/// Checks that the solved boundary is the only nearby curve satisfying the
/// value-matching equation: shifting it vertically by `±shift_frac·K` must
/// blow the residual up by at least a factor 5 at every probe count of
/// `n_points` interior grid times.
pub fn boundary_residual_gate(
    boundary: &ExerciseBoundary,
    p: &PutParams,
    shift_frac: f64,
    n_points: usize,
) -> Result<BoundaryGateReport> {
    if !(shift_frac > 0.0 && shift_frac < 0.5) {
        return Err(Error::InvalidParameter("shift fraction must lie in (0, 0.5)".into()));
    }
    let n = boundary.t.len() - 1;
    if n_points == 0 || n_points >= n {
        return Err(Error::InvalidParameter("probe count must be in [1, steps)".into()));
    }
    let indices: Vec<usize> =
        (1..=n_points).map(|j| j * (n - 1) / (n_points + 1) + 1).collect();

    let sup = |curve: &ExerciseBoundary| -> Result<f64> {
        let mut s = 0.0f64;
        for &i in &indices {
            s = s.max(value_matching_residual(curve, i, p)?.abs());
        }
        Ok(s)
    };

    let solved_sup = sup(boundary)?;
    let mut shifted_sups = Vec::new();
    for &sign in &[-1.0, 1.0] {
        let shifted = ExerciseBoundary {
            t: boundary.t.clone(),
            b: boundary.b.iter().map(|&bi| bi + sign * shift_frac * p.strike).collect(),
        };
        shifted_sups.push(sup(&shifted)?);
    }
    let floor = 1e-9 * p.strike;
    let ratio = shifted_sups.iter().cloned().fold(f64::INFINITY, f64::min)
        / solved_sup.max(floor);
    Ok(BoundaryGateReport { solved_sup, shifted_sups, ratio, passed: ratio >= 5.0 })
}

/// Cox–Ross–Rubinstein backward induction for the American put: value at the
/// root plus the exercise boundary read off per time layer.
#[derive(Debug, Clone)]
pub struct BinomialOracle {
    pub params: PutParams,
    pub steps: usize,
}

#[derive(Debug, Clone)]
pub struct BinomialSolution {
    pub value: f64,
    pub european_value: f64,
    /// (time, highest exercise node price) per layer; the boundary
    /// approximation from below.
    pub boundary: Vec<(f64, f64)>,
}

impl BinomialOracle {
    pub fn new(params: PutParams, steps: usize) -> Result<Self> {
        if steps < 100 {
            return Err(Error::InvalidParameter("binomial oracle needs >= 100 steps".into()));
        }
        Ok(Self { params, steps })
    }

    pub fn solve(&self, spot: f64) -> BinomialSolution {
        let p = &self.params;
        let n = self.steps;
        let dt = p.horizon / n as f64;
        let up = (p.vol * dt.sqrt()).exp();
        let down = 1.0 / up;
        let disc = (-p.r * dt).exp();
        let q = ((p.r * dt).exp() - down) / (up - down);

        let payoff = |s: f64| (p.strike - s).max(0.0);

        let mut values: Vec<f64> = (0..=n)
            .map(|j| payoff(spot * up.powi(j as i32) * down.powi((n - j) as i32)))
            .collect();
        let mut euro = values.clone();
        let mut boundary = vec![(p.horizon, p.strike)];

        for i in (0..n).rev() {
            let mut layer_boundary = 0.0f64;
            for j in 0..=i {
                let s = spot * up.powi(j as i32) * down.powi((i - j) as i32);
                let cont = disc * (q * values[j + 1] + (1.0 - q) * values[j]);
                let ex = payoff(s);
                euro[j] = disc * (q * euro[j + 1] + (1.0 - q) * euro[j]);
                if ex >= cont && ex > 0.0 {
                    values[j] = ex;
                    layer_boundary = layer_boundary.max(s);
                } else {
                    values[j] = cont;
                }
            }
            boundary.push((i as f64 * dt, layer_boundary));
        }
        boundary.reverse();
        BinomialSolution { value: values[0], european_value: euro[0], boundary }
    }
}
