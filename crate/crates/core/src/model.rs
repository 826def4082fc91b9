//! Geometric Brownian motion model: parameters, the homogeneity reduction of
//! the investment problem, the duality measure, transition densities, and
//! exact path simulation.

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of a d-dimensional geometric Brownian motion stopping problem
/// with reward `(K - Σ x_i)^+` and discount rate `r`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GbmParams {
    /// Drift vector, length d.
    pub mu: Vec<f64>,
    /// Volatility vector, length d; every component nonzero.
    pub a: Vec<f64>,
    /// Correlation matrix of the driving Brownian motions (d x d,
    /// symmetric, unit diagonal, strictly positive definite).
    pub sigma_corr: Vec<Vec<f64>>,
    /// Discount rate, > 0.
    pub r: f64,
    /// Strike / installation cost, > 0.
    pub strike: f64,
}

impl GbmParams {
    pub fn new(
        mu: Vec<f64>,
        a: Vec<f64>,
        sigma_corr: Vec<Vec<f64>>,
        r: f64,
        strike: f64,
    ) -> Result<Self> {
        let d = mu.len();
        if d == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        if a.len() != d || sigma_corr.len() != d || sigma_corr.iter().any(|row| row.len() != d) {
            return Err(Error::InvalidParameter("mu, a, sigma_corr dimensions disagree".into()));
        }
        if !(r > 0.0) {
            return Err(Error::InvalidParameter(format!("discount rate must be positive, got {r}")));
        }
        if !(strike > 0.0) {
            return Err(Error::InvalidParameter(format!("strike must be positive, got {strike}")));
        }
        if a.iter().any(|&ai| ai == 0.0 || !ai.is_finite()) {
            return Err(Error::InvalidParameter("volatilities must be nonzero and finite".into()));
        }
        if mu.iter().any(|&mi| mi > r) {
            return Err(Error::InvalidParameter(
                "drifts must satisfy mu_i <= r (finite stopping problem)".into(),
            ));
        }
        for i in 0..d {
            if (sigma_corr[i][i] - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidParameter("correlation diagonal must be 1".into()));
            }
            for j in 0..d {
                if (sigma_corr[i][j] - sigma_corr[j][i]).abs() > 1e-12 {
                    return Err(Error::InvalidParameter("correlation matrix must be symmetric".into()));
                }
            }
        }
        let params = Self { mu, a, sigma_corr, r, strike };
        params.corr_cholesky()?; // positive definiteness
        Ok(params)
    }

    /// One-dimensional helper with trivial correlation.
    pub fn new_1d(mu: f64, a: f64, r: f64, strike: f64) -> Result<Self> {
        Self::new(vec![mu], vec![a], vec![vec![1.0]], r, strike)
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    pub fn corr_matrix(&self) -> DMatrix<f64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |i, j| self.sigma_corr[i][j])
    }

    pub fn corr_cholesky(&self) -> Result<Cholesky<f64, nalgebra::Dyn>> {
        Cholesky::new(self.corr_matrix()).ok_or_else(|| {
            Error::InvalidParameter("correlation matrix is not strictly positive definite".into())
        })
    }

    /// Normalized drift vector ((mu_i - a_i²/2) / a_i).
    pub fn mu_bar(&self) -> Vec<f64> {
        self.mu
            .iter()
            .zip(&self.a)
            .map(|(&m, &a)| (m - 0.5 * a * a) / a)
            .collect()
    }

    /// 2r/a² for one-dimensional problems.
    pub fn gamma_1d(&self) -> Result<f64> {
        if self.dim() != 1 {
            return Err(Error::InvalidParameter("gamma_1d requires d = 1".into()));
        }
        Ok(2.0 * self.r / (self.a[0] * self.a[0]))
    }
}

/// Outcome of eliminating the revenue factor from a (d+1)-factor investment
/// problem by the homogeneity measure change.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReducedProblem {
    pub base: GbmParams,
    /// Weight vector absorbed into the start point.
    pub alpha: Vec<f64>,
    /// Which transformation produced the reduced problem.
    pub note: String,
}

impl ReducedProblem {
    /// Maps a start point of the full (d+1)-factor problem to the start point
    /// of the reduced problem, together with the value prefactor x_0/K:
    /// `v_full(x) = prefactor * V_reduced(start)`.
    pub fn transform_start(&self, x_full: &[f64]) -> Result<(Vec<f64>, f64)> {
        let d = self.base.dim();
        if x_full.len() != d + 1 {
            return Err(Error::InvalidParameter(format!(
                "start point must have {} components",
                d + 1
            )));
        }
        let x0 = x_full[0];
        if !(x0 > 0.0) {
            return Err(Error::Domain("revenue factor start must be positive".into()));
        }
        let start: Vec<f64> = (0..d)
            .map(|i| self.base.strike * self.alpha[i] * x_full[i + 1] / x0)
            .collect();
        Ok((start, x0 / self.base.strike))
    }
}

/// Eliminates the revenue factor `X^(0)` from a (d+1)-factor problem. Index 0
/// of `mu`, `a`, `corr` is the revenue factor; its volatility may be zero
/// (constant revenue). Factors 1..=d keep their order.
pub fn reduce_problem(
    mu: &[f64],
    a: &[f64],
    corr: &[Vec<f64>],
    r: f64,
    strike: f64,
    alpha: &[f64],
) -> Result<ReducedProblem> {
    let n = mu.len();
    if n < 2 {
        return Err(Error::InvalidParameter("full problem needs at least 2 factors".into()));
    }
    let d = n - 1;
    if a.len() != n || corr.len() != n || alpha.len() != d {
        return Err(Error::InvalidParameter("reduce_problem input dimensions disagree".into()));
    }
    if alpha.iter().any(|&w| !(w > 0.0)) {
        return Err(Error::InvalidParameter("alpha must be strictly positive".into()));
    }
    if !(r > mu[0]) {
        return Err(Error::InvalidParameter(format!(
            "need r > mu_0 for a finite value function (r = {r}, mu_0 = {})",
            mu[0]
        )));
    }

    let mu0 = mu[0];
    let a0 = a[0];
    // Covariance of the log-increments of X^(i)/X^(0).
    let cov = |i: usize, j: usize| -> f64 {
        a[i + 1] * a[j + 1] * corr[i + 1][j + 1] - a[i + 1] * a0 * corr[i + 1][0]
            - a[j + 1] * a0 * corr[j + 1][0]
            + a0 * a0
    };
    let mut red_a = Vec::with_capacity(d);
    for i in 0..d {
        let v2 = cov(i, i);
        if !(v2 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "reduced squared volatility of factor {} is {v2}; factors are degenerate",
                i + 1
            )));
        }
        red_a.push(v2.sqrt());
    }
    let mut red_corr = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in 0..d {
            red_corr[i][j] = cov(i, j) / (red_a[i] * red_a[j]);
        }
    }
    let red_mu: Vec<f64> = (0..d).map(|i| mu[i + 1] - mu0).collect();
    let base = GbmParams::new(red_mu, red_a, red_corr, r - mu0, strike)?;
    Ok(ReducedProblem {
        base,
        alpha: alpha.to_vec(),
        note: format!("revenue factor eliminated (mu_0 = {mu0}, a_0 = {a0}); \
                       drifts shifted by -mu_0, rate shifted to r - mu_0"),
    })
}

/// Pointwise evaluator of the Lebesgue density of the duality measure m.
#[derive(Debug, Clone)]
pub struct DualDensity {
    params: GbmParams,
    corr_inv: DMatrix<f64>,
    mu_bar: DVector<f64>,
}

impl DualDensity {
    pub fn new(params: GbmParams) -> Result<Self> {
        let chol = params.corr_cholesky()?;
        let corr_inv = chol.inverse();
        let mu_bar = DVector::from_vec(params.mu_bar());
        Ok(Self { params, corr_inv, mu_bar })
    }

    /// h(y) = exp(-Σ log y_i + 2 μ̄ᵀ Σ⁻¹ ξ) with ξ_i = log(y_i)/a_i.
    ///
    /// In d = 1 with μ = r this reduces to y^(γ-2), γ = 2r/a², i.e. the speed
    /// measure density up to the conventional factor 2/a².
    pub fn eval(&self, y: &[f64]) -> Result<f64> {
        let d = self.params.dim();
        if y.len() != d {
            return Err(Error::InvalidParameter("point dimension mismatch".into()));
        }
        if y.iter().any(|&yi| !(yi > 0.0)) {
            return Err(Error::Domain("dual density requires strictly positive coordinates".into()));
        }
        let log_sum: f64 = y.iter().map(|yi| yi.ln()).sum();
        let xi = DVector::from_iterator(d, y.iter().zip(&self.params.a).map(|(&yi, &ai)| yi.ln() / ai));
        let quad = 2.0 * self.mu_bar.dot(&(&self.corr_inv * xi));
        Ok((-log_sum + quad).exp())
    }
}

/// Convenience wrapper around [`DualDensity`].
pub fn dual_density(y: &[f64], params: &GbmParams) -> Result<f64> {
    DualDensity::new(params.clone())?.eval(y)
}

/// Transition density of X_t with respect to Lebesgue measure, d = 1 or 2.
pub fn transition_density(t: f64, x: &[f64], y: &[f64], params: &GbmParams) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("transition density requires t > 0, got {t}")));
    }
    if x.iter().chain(y.iter()).any(|&c| !(c > 0.0)) {
        return Err(Error::Domain("transition density requires positive coordinates".into()));
    }
    match params.dim() {
        1 => Ok(lognormal_density(t, x[0], y[0], params.mu[0], params.a[0])),
        2 => {
            let rho = params.sigma_corr[0][1];
            let (a1, a2) = (params.a[0], params.a[1]);
            let mb = params.mu_bar();
            let u_hat = (y[0] / x[0]).ln() / a1;
            let v_hat = (y[1] / x[1]).ln() / a2;
            let fz = gaussian_2d_density(u_hat - mb[0] * t, v_hat - mb[1] * t, t, rho);
            Ok(fz / (a1.abs() * a2.abs() * y[0] * y[1]))
        }
        d => Err(Error::InvalidParameter(format!(
            "transition density implemented for d = 1, 2 only (got {d})"
        ))),
    }
}

/// Lognormal density of GBM(mu, a) at time t.
pub fn lognormal_density(t: f64, x: f64, y: f64, mu: f64, a: f64) -> f64 {
    let s = a.abs() * t.sqrt();
    let z = ((y / x).ln() - (mu - 0.5 * a * a) * t) / s;
    (-0.5 * z * z).exp() / ((2.0 * std::f64::consts::PI).sqrt() * s * y)
}

fn gaussian_2d_density(x: f64, y: f64, t: f64, rho: f64) -> f64 {
    let omr = 1.0 - rho * rho;
    let b = x * x - 2.0 * rho * x * y + y * y;
    (-b / (2.0 * t * omr)).exp() / (2.0 * std::f64::consts::PI * t * omr.sqrt())
}

/// Simulated paths at the requested grid times (start state prepended at
/// t = 0). `states[p][k][i]` is component i of path p at time `times[k]`.
#[derive(Debug, Clone)]
pub struct PathSet {
    pub times: Vec<f64>,
    pub states: Vec<Vec<Vec<f64>>>,
}

/// Seedable, stream-splittable generator: every (seed, stream) pair yields an
/// independent reproducible sequence. Path p of a simulation uses stream p,
/// so partitioning paths across workers cannot change the output.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Exact-in-distribution sampling of the GBM at the grid times via correlated
/// Gaussian increments (Cholesky factor of the correlation matrix).
pub fn sample_paths(
    params: &GbmParams,
    x0: &[f64],
    grid: &[f64],
    n: usize,
    seed: u64,
) -> Result<PathSet> {
    let d = params.dim();
    if x0.len() != d || x0.iter().any(|&c| !(c > 0.0)) {
        return Err(Error::InvalidParameter("start point must be strictly positive, dimension d".into()));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one path".into()));
    }
    let mut prev = 0.0;
    for &t in grid {
        if !(t > prev) {
            return Err(Error::InvalidParameter("grid must be strictly increasing from 0".into()));
        }
        prev = t;
    }
    let chol = params.corr_cholesky()?.l();

    let mut times = Vec::with_capacity(grid.len() + 1);
    times.push(0.0);
    times.extend_from_slice(grid);

    let states: Vec<Vec<Vec<f64>>> = (0..n as u64)
        .into_par_iter()
        .map(|p| {
            let mut rng = stream_rng(seed, p);
            let mut path = Vec::with_capacity(grid.len() + 1);
            let mut x = x0.to_vec();
            path.push(x.clone());
            let mut t_prev = 0.0;
            let mut z = vec![0.0f64; d];
            for &t in grid {
                let dt = t - t_prev;
                t_prev = t;
                let sdt = dt.sqrt();
                for zi in z.iter_mut() {
                    *zi = rng.sample::<f64, _>(StandardNormal);
                }
                for i in 0..d {
                    let mut dw = 0.0;
                    for j in 0..=i {
                        dw += chol[(i, j)] * z[j];
                    }
                    dw *= sdt;
                    x[i] *= (params.a[i] * dw + (params.mu[i] - 0.5 * params.a[i] * params.a[i]) * dt)
                        .exp();
                }
                path.push(x.clone());
            }
            path
        })
        .collect();

    Ok(PathSet { times, states })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fig2_params() -> GbmParams {
        GbmParams::new(
            vec![0.06, 0.06],
            vec![0.3, 0.3],
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            0.06,
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn constructor_rejects_bad_inputs() {
        assert!(GbmParams::new_1d(0.06, 0.0, 0.06, 1.0).is_err()); // zero vol
        assert!(GbmParams::new_1d(0.06, 0.3, -0.1, 1.0).is_err()); // negative rate
        assert!(GbmParams::new_1d(0.08, 0.3, 0.06, 1.0).is_err()); // mu > r
        assert!(GbmParams::new(
            vec![0.0, 0.0],
            vec![0.3, 0.3],
            vec![vec![1.0, 1.0], vec![1.0, 1.0]],
            0.06,
            1.0
        )
        .is_err()); // singular correlation
    }

    #[test]
    fn reduce_degenerate_revenue_factor_is_identity() {
        // a_0 = 0, mu_0 = 0: X^(0) constant, reduced params equal the inputs.
        let red = reduce_problem(
            &[0.0, 0.01, 0.02],
            &[0.0, 0.3, 0.4],
            &vec![
                vec![1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.5],
                vec![0.0, 0.5, 1.0],
            ],
            0.06,
            1.0,
            &[1.0, 1.0],
        )
        .unwrap();
        assert_eq!(red.base.mu, vec![0.01, 0.02]);
        assert!((red.base.a[0] - 0.3).abs() < 1e-15);
        assert!((red.base.a[1] - 0.4).abs() < 1e-15);
        assert!((red.base.sigma_corr[0][1] - 0.5).abs() < 1e-15);
        assert_eq!(red.base.r, 0.06);
    }

    #[test]
    fn reduce_matches_direct_formula() {
        // d = 1 full problem; reduced drift -0.01, squared vol 0.07.
        let red = reduce_problem(
            &[0.02, 0.01],
            &[0.2, 0.3],
            &vec![vec![1.0, 0.5], vec![0.5, 1.0]],
            0.06,
            1.0,
            &[1.0],
        )
        .unwrap();
        assert!((red.base.mu[0] - (-0.01)).abs() < 1e-15);
        assert!((red.base.a[0] * red.base.a[0] - 0.07).abs() < 1e-15);
        assert!((red.base.r - 0.04).abs() < 1e-15);
    }

    #[test]
    fn reduce_unit_alpha_start_transform_is_identity() {
        let red = reduce_problem(
            &[0.0, 0.01],
            &[0.0, 0.3],
            &vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            0.06,
            1.0,
            &[1.0],
        )
        .unwrap();
        let (start, pre) = red.transform_start(&[1.0, 0.4]).unwrap();
        assert!((start[0] - 0.4).abs() < 1e-15);
        assert!((pre - 1.0).abs() < 1e-15);
    }

    #[test]
    fn reduce_rejects_bad_inputs() {
        let corr = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        assert!(reduce_problem(&[0.0, 0.01], &[0.1, 0.3], &corr, 0.06, 1.0, &[0.0]).is_err());
        assert!(reduce_problem(&[0.08, 0.01], &[0.1, 0.3], &corr, 0.06, 1.0, &[1.0]).is_err());
    }

    #[test]
    fn dual_density_at_ones_is_one() {
        let h = dual_density(&[1.0, 1.0], &fig2_params()).unwrap();
        assert!((h - 1.0).abs() < 1e-14);
    }

    #[test]
    fn dual_density_1d_power_law() {
        // mu = r: h(y) = y^(gamma - 2).
        let p = GbmParams::new_1d(0.06, 0.3, 0.06, 1.0).unwrap();
        let gamma = p.gamma_1d().unwrap();
        for &y in &[0.3, 0.9, 2.5] {
            let h = dual_density(&[y], &p).unwrap();
            assert!((h - y.powf(gamma - 2.0)).abs() < 1e-12 * h);
        }
    }

    #[test]
    fn dual_density_2d_exponent_formula() {
        // Independent evaluation of the exponent for rho = 0.
        let p = fig2_params();
        let y = [2.0f64, 0.5];
        let mb = p.mu_bar();
        let expected = (-(y[0].ln() + y[1].ln())
            + 2.0 * (mb[0] * y[0].ln() / 0.3 + mb[1] * y[1].ln() / 0.3))
            .exp();
        let h = dual_density(&y, &p).unwrap();
        assert!((h - expected).abs() < 1e-14 * expected.abs());
    }

    #[test]
    fn dual_density_rejects_nonpositive_points() {
        assert!(dual_density(&[0.0, 1.0], &fig2_params()).is_err());
    }

    #[test]
    fn transition_density_2d_factorizes_when_uncorrelated_driftless() {
        // mu_i = a_i²/2 makes the normalized drifts vanish.
        let p = GbmParams::new(
            vec![0.045, 0.045],
            vec![0.3, 0.3],
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            0.06,
            1.0,
        )
        .unwrap();
        let t = 0.7;
        let x = [1.0, 1.2];
        let y = [0.9, 1.4];
        let joint = transition_density(t, &x, &y, &p).unwrap();
        let m1 = lognormal_density(t, x[0], y[0], p.mu[0], p.a[0]);
        let m2 = lognormal_density(t, x[1], y[1], p.mu[1], p.a[1]);
        assert!((joint - m1 * m2).abs() < 1e-12 * joint);
    }

    #[test]
    fn transition_density_chapman_kolmogorov() {
        // Integrating p(s, x, z) p(t, z, y) over z reproduces p(s+t, x, y).
        use crate::quad::{integrate, QuadConfig};
        let p = GbmParams::new_1d(0.02, 0.3, 0.06, 1.0).unwrap();
        let (s, t) = (0.4, 0.7);
        let x = [1.0];
        let cfg = QuadConfig { rel_tol: 1e-9, abs_tol: 1e-12, max_subdivisions: 2000 };
        for &yv in &[0.6, 1.0, 1.8] {
            let composed = integrate(
                |z| {
                    transition_density(s, &x, &[z], &p).unwrap()
                        * transition_density(t, &[z], &[yv], &p).unwrap()
                },
                1e-5,
                30.0,
                &cfg,
            )
            .unwrap()
            .value;
            let direct = transition_density(s + t, &x, &[yv], &p).unwrap();
            assert!(
                (composed - direct).abs() < 1e-4 * direct,
                "y = {yv}: {composed} vs {direct}"
            );
        }
    }

    #[test]
    fn transition_density_2d_integrates_to_one() {
        use crate::quad::{integrate, QuadConfig};
        let p = fig2_params();
        let t = 1.0;
        let x = [1.0, 1.0];
        let cfg = QuadConfig { rel_tol: 1e-8, abs_tol: 1e-10, max_subdivisions: 4000 };
        let outer = integrate(
            |u| {
                integrate(|v| transition_density(t, &x, &[u, v], &p).unwrap(), 1e-4, 20.0, &cfg)
                    .unwrap()
                    .value
            },
            1e-4,
            20.0,
            &cfg,
        )
        .unwrap();
        assert!((outer.value - 1.0).abs() < 1e-6, "mass {}", outer.value);
    }

    #[test]
    fn sample_paths_moments() {
        let p = fig2_params();
        let n = 40_000;
        let t = 1.0;
        let paths = sample_paths(&p, &[1.0, 1.0], &[t], n, 42).unwrap();
        for i in 0..2 {
            let mean: f64 = paths.states.iter().map(|s| s[1][i]).sum::<f64>() / n as f64;
            let var: f64 = paths
                .states
                .iter()
                .map(|s| (s[1][i] - mean).powi(2))
                .sum::<f64>()
                / (n as f64 - 1.0);
            let se = (var / n as f64).sqrt();
            let expected = (p.mu[i] * t).exp();
            assert!((mean - expected).abs() < 3.0 * se, "mean {mean} vs {expected} (se {se})");
        }
    }

    #[test]
    fn sample_paths_log_increment_correlation() {
        let p = GbmParams::new(
            vec![0.02, 0.03],
            vec![0.2, 0.4],
            vec![vec![1.0, 0.6], vec![0.6, 1.0]],
            0.06,
            1.0,
        )
        .unwrap();
        let n = 40_000;
        let paths = sample_paths(&p, &[1.0, 1.0], &[1.0], n, 7).unwrap();
        let logs: Vec<(f64, f64)> = paths
            .states
            .iter()
            .map(|s| (s[1][0].ln(), s[1][1].ln()))
            .collect();
        let m0 = logs.iter().map(|l| l.0).sum::<f64>() / n as f64;
        let m1 = logs.iter().map(|l| l.1).sum::<f64>() / n as f64;
        let mut c00 = 0.0;
        let mut c11 = 0.0;
        let mut c01 = 0.0;
        for (l0, l1) in &logs {
            c00 += (l0 - m0) * (l0 - m0);
            c11 += (l1 - m1) * (l1 - m1);
            c01 += (l0 - m0) * (l1 - m1);
        }
        let corr = c01 / (c00 * c11).sqrt();
        // SE of a correlation estimate at n = 40k is about 0.003.
        assert!((corr - 0.6).abs() < 0.01, "corr {corr}");
    }

    #[test]
    fn sample_paths_empty_grid_returns_start() {
        let p = GbmParams::new_1d(0.06, 0.3, 0.06, 1.0).unwrap();
        let paths = sample_paths(&p, &[2.0], &[], 3, 1).unwrap();
        assert_eq!(paths.times, vec![0.0]);
        assert!(paths.states.iter().all(|s| s.len() == 1 && s[0] == vec![2.0]));
    }

    #[test]
    fn sample_paths_reproducible_per_seed() {
        let p = fig2_params();
        let a = sample_paths(&p, &[1.0, 1.0], &[0.5, 1.0], 16, 99).unwrap();
        let b = sample_paths(&p, &[1.0, 1.0], &[0.5, 1.0], 16, 99).unwrap();
        assert_eq!(a.states, b.states);
    }

    proptest! {
        #[test]
        fn dual_density_positive_and_log_linear_in_scaling(
            y1 in 0.1f64..5.0, y2 in 0.1f64..5.0, c in 0.2f64..4.0
        ) {
            let p = fig2_params();
            let dd = DualDensity::new(p).unwrap();
            let h = dd.eval(&[y1, y2]).unwrap();
            prop_assert!(h > 0.0);
            // log h(c y) - log h(y) is linear in log c.
            let half = c.sqrt();
            let l_full = dd.eval(&[c * y1, c * y2]).unwrap().ln() - h.ln();
            let l_half = dd.eval(&[half * y1, half * y2]).unwrap().ln() - h.ln();
            prop_assert!((l_full - 2.0 * l_half).abs() < 1e-9);
        }
    }
}
