//! Exact Ising distributions ν_{G,β,h} as rational functions of x = e^{2β}
//! and y = e^{2h}: marginals, χ-sums, magnetization moments, and the exact
//! p-derivative at h = 0.
//!
//! The unnormalized weight of σ is x^{a(σ)} y^{‖σ‖} with a(σ) the number of
//! edges whose endpoints agree. This differs from the textbook density by a
//! σ-independent factor that cancels in Z, and keeps every exponent a
//! nonnegative integer.

use crate::error::{Error, Result};
use crate::graphs::Graph;
use crate::ratio::{self, Ratio};
use num::{One, Signed, Zero};

/// Model parameters x = e^{2β}, y = e^{2h}, both positive rationals.
/// x >= 1 encodes β >= 0; y = 1 encodes h = 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelParams {
    x: Ratio,
    y: Ratio,
}

impl ModelParams {
    pub fn new(x: Ratio, y: Ratio) -> Result<Self> {
        if !x.is_positive() || !y.is_positive() {
            return Err(Error::validation("model parameters x, y must be positive"));
        }
        Ok(ModelParams { x, y })
    }

    pub fn x(&self) -> &Ratio {
        &self.x
    }

    pub fn y(&self) -> &Ratio {
        &self.y
    }

    /// h = 0 slice with the same x.
    pub fn at_h0(&self) -> ModelParams {
        ModelParams {
            x: self.x.clone(),
            y: Ratio::one(),
        }
    }
}

/// A (possibly signed) measure on {0,1}^n, stored as unnormalized weights plus
/// their total. For the Ising measure the total is the partition function Z.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpinMeasure {
    n: usize,
    weights: Vec<Ratio>,
    z: Ratio,
}

impl SpinMeasure {
    /// Wraps raw values; the stored total makes probabilities exact quotients
    /// weight/Z.
    pub fn from_weights(n: usize, weights: Vec<Ratio>) -> Result<Self> {
        if weights.len() != 1 << n {
            return Err(Error::dimension("weights length must be 2^n"));
        }
        let z: Ratio = weights.iter().sum();
        Ok(SpinMeasure { n, weights, z })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn z(&self) -> &Ratio {
        &self.z
    }

    pub fn weight(&self, sigma: u32) -> &Ratio {
        &self.weights[sigma as usize]
    }

    /// ν(σ) as an exact rational.
    pub fn prob(&self, sigma: u32) -> Ratio {
        &self.weights[sigma as usize] / &self.z
    }

    pub fn probs(&self) -> Vec<Ratio> {
        (0..1u32 << self.n).map(|s| self.prob(s)).collect()
    }

    /// True iff Z > 0 and no weight is negative.
    pub fn is_probability(&self) -> bool {
        self.z.is_positive() && self.weights.iter().all(|w| !w.is_negative())
    }

    /// Exact equality as normalized measures.
    pub fn same_distribution(&self, other: &SpinMeasure) -> bool {
        self.n == other.n && (0..1u32 << self.n).all(|s| self.prob(s) == other.prob(s))
    }

    /// Permutation invariance: ν(σ) depends only on ‖σ‖.
    pub fn is_permutation_invariant(&self) -> bool {
        let mut class_rep: Vec<Option<Ratio>> = vec![None; self.n + 1];
        for s in 0..1u32 << self.n {
            let k = s.count_ones() as usize;
            let p = self.prob(s);
            match &class_rep[k] {
                None => class_rep[k] = Some(p),
                Some(q) if *q != p => return false,
                _ => {}
            }
        }
        true
    }
}

/// ν_{G,x,y} by direct enumeration of {0,1}^n. Guarded at n <= 20.
pub fn ising_measure(g: &Graph, params: &ModelParams) -> Result<SpinMeasure> {
    let n = g.n();
    if n > 20 {
        return Err(Error::size_limit(format!("ising_measure: n = {n} > 20")));
    }
    let mut xpow = Vec::with_capacity(g.edge_count() + 1);
    xpow.push(Ratio::one());
    for _ in 0..g.edge_count() {
        xpow.push(xpow.last().unwrap() * &params.x);
    }
    let mut ypow = Vec::with_capacity(n + 1);
    ypow.push(Ratio::one());
    for _ in 0..n {
        ypow.push(ypow.last().unwrap() * &params.y);
    }
    let mut weights = Vec::with_capacity(1 << n);
    for sigma in 0..1u32 << n {
        let aligned = g
            .edges()
            .iter()
            .filter(|&&(i, j)| (sigma >> (i - 1)) & 1 == (sigma >> (j - 1)) & 1)
            .count();
        weights.push(&xpow[aligned] * &ypow[sigma.count_ones() as usize]);
    }
    SpinMeasure::from_weights(n, weights)
}

/// K_n fast path: weights depend on σ only through k = ‖σ‖, as
/// x^{C(k,2)+C(n-k,2)} y^k.
pub fn kn_measure(n: usize, params: &ModelParams) -> Result<SpinMeasure> {
    if n == 0 || n > 20 {
        return Err(Error::size_limit(format!("kn_measure: n = {n} out of range")));
    }
    let class = kn_class_weights(n, params);
    let mut weights = Vec::with_capacity(1 << n);
    for sigma in 0..1u32 << n {
        weights.push(class[sigma.count_ones() as usize].clone());
    }
    SpinMeasure::from_weights(n, weights)
}

/// Per-spin weight of a Hamming class k on K_n (without the C(n,k) count).
fn kn_class_weights(n: usize, params: &ModelParams) -> Vec<Ratio> {
    (0..=n)
        .map(|k| {
            let exp = k * k.saturating_sub(1) / 2 + (n - k) * (n - k).saturating_sub(1) / 2;
            ratio::pow(&params.x, exp as i64) * ratio::pow(&params.y, k as i64)
        })
        .collect()
}

/// p = ν(1^{{1}}), the common one-dimensional marginal.
pub fn marginal_p(nu: &SpinMeasure) -> Ratio {
    let mut acc = Ratio::zero();
    for s in 0..1u32 << nu.n() {
        if s & 1 == 1 {
            acc += nu.weight(s);
        }
    }
    acc / nu.z()
}

/// ν(1^T) = P(σ|_T ≡ 1). `t_mask` bit i-1 is element i; empty mask gives 1.
pub fn up_marginal(nu: &SpinMeasure, t_mask: u32) -> Ratio {
    let mut acc = Ratio::zero();
    for s in 0..1u32 << nu.n() {
        if s & t_mask == t_mask {
            acc += nu.weight(s);
        }
    }
    acc / nu.z()
}

/// ν(0^S) = P(σ|_S ≡ 0).
pub fn down_marginal(nu: &SpinMeasure, s_mask: u32) -> Ratio {
    let mut acc = Ratio::zero();
    for s in 0..1u32 << nu.n() {
        if s & s_mask == 0 {
            acc += nu.weight(s);
        }
    }
    acc / nu.z()
}

/// χ_S(σ) = prod_{i in S} (-1)^{1(σ_i = 0)}.
pub fn chi(s_mask: u32, sigma: u32) -> i64 {
    if (s_mask & !sigma).count_ones() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Σ_σ χ_S(σ) ν(σ).
pub fn chi_sum(nu: &SpinMeasure, s_mask: u32) -> Ratio {
    let mut acc = Ratio::zero();
    for s in 0..1u32 << nu.n() {
        let w = nu.weight(s);
        if chi(s_mask, s) == 1 {
            acc += w;
        } else {
            acc -= w;
        }
    }
    acc / nu.z()
}

/// Σ_σ (2‖σ‖ - n) χ_S(σ) ν(σ).
pub fn weighted_chi_sum(nu: &SpinMeasure, s_mask: u32) -> Ratio {
    let n = nu.n() as i64;
    let mut acc = Ratio::zero();
    for s in 0..1u32 << nu.n() {
        let m = 2 * s.count_ones() as i64 - n;
        acc += ratio::int(m * chi(s_mask, s)) * nu.weight(s);
    }
    acc / nu.z()
}

/// Σ_σ (2‖σ‖ - n)^k ν(σ), the k-th magnetization moment.
pub fn magnetization_moment(nu: &SpinMeasure, k: usize) -> Ratio {
    let n = nu.n() as i64;
    let mut acc = Ratio::zero();
    for s in 0..1u32 << nu.n() {
        let m = ratio::int(2 * s.count_ones() as i64 - n);
        acc += ratio::pow(&m, k as i64) * nu.weight(s);
    }
    acc / nu.z()
}

/// dν_{G,β,h}(σ)/dp_{G,β} at h = 0, in the moment form
/// 2n (2‖σ‖-n) ν(σ) / Σ (2‖σ̂‖-n)² ν(σ̂). The denominator is positive for
/// any x > 0 (guarded anyway).
pub fn dnu_dp_at_h0(g: &Graph, x: &Ratio, sigma: u32) -> Result<Ratio> {
    let all = dnu_dp_measure(g, x)?;
    Ok(all[sigma as usize].clone())
}

/// All 2^n values of the p-derivative at once.
pub fn dnu_dp_measure(g: &Graph, x: &Ratio) -> Result<Vec<Ratio>> {
    let params = ModelParams::new(x.clone(), Ratio::one())?;
    let nu = ising_measure(g, &params)?;
    let m2 = magnetization_moment(&nu, 2);
    if m2.is_zero() {
        return Err(Error::SingularParameter(
            "zero second magnetization moment".into(),
        ));
    }
    let n = nu.n() as i64;
    let two_n = ratio::int(2 * n);
    Ok((0..1u32 << nu.n())
        .map(|s| {
            let m = ratio::int(2 * s.count_ones() as i64 - n);
            &two_n * m * nu.prob(s) / &m2
        })
        .collect())
}

/// Derivative of the up-marginal ν(1^T) in p at h = 0, from the pointwise
/// derivative vector.
pub fn dnu_dp_up_marginal(deriv: &[Ratio], t_mask: u32) -> Ratio {
    let mut acc = Ratio::zero();
    for (s, v) in deriv.iter().enumerate() {
        if s as u32 & t_mask == t_mask {
            acc += v;
        }
    }
    acc
}

/// The six moment identities relating χ-sums over [m] to magnetization
/// moments on K_n (m = 0..5): returns whether LHS = RHS exactly.
pub fn moment_identity_check(n: usize, params: &ModelParams, m: usize) -> Result<bool> {
    if m > 5 {
        return Err(Error::validation("moment identities cover m = 0..5"));
    }
    if n < m {
        return Err(Error::validation("need n >= m"));
    }
    if n > 12 {
        return Err(Error::size_limit("moment_identity_check: n > 12"));
    }
    let nu = kn_measure(n, params)?;
    let s_mask = (1u32 << m) - 1;
    let m2 = magnetization_moment(&nu, 2);
    let m4 = magnetization_moment(&nu, 4);
    let m6 = magnetization_moment(&nu, 6);
    let nr = ratio::int(n as i64);
    let ni = n as i64;
    let ok = match m {
        0 => chi_sum(&nu, 0) == Ratio::one(),
        1 => &nr * weighted_chi_sum(&nu, s_mask) == m2,
        2 => ratio::falling(n, 2) * chi_sum(&nu, s_mask) == &m2 - &nr,
        3 => {
            ratio::falling(n, 3) * weighted_chi_sum(&nu, s_mask)
                == &m4 - ratio::int(3 * ni - 2) * &m2
        }
        4 => {
            ratio::falling(n, 4) * chi_sum(&nu, s_mask)
                == &m4 - ratio::int(2 * (3 * ni - 4)) * &m2 + ratio::int(3 * (ni * ni - 2 * ni))
        }
        5 => {
            ratio::falling(n, 5) * weighted_chi_sum(&nu, s_mask)
                == &m6 - ratio::int(10 * (ni - 2)) * &m4
                    + ratio::int(15 * ni * ni - 50 * ni + 24) * &m2
        }
        _ => unreachable!(),
    };
    Ok(ok)
}

/// Float diagnostics for large K_n: Hamming-class sums with log-sum-exp.
/// Only the asymptotic-evidence paths use these; every exact claim goes
/// through the rational code above.
pub mod float_diag {
    fn ln_factorial(n: usize) -> f64 {
        (2..=n).map(|i| (i as f64).ln()).sum()
    }

    fn ln_binomial(n: usize, k: usize) -> f64 {
        ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
    }

    /// log-weights of the Hamming classes of K_n at (β, h), including the
    /// C(n,k) multiplicity.
    pub fn log_class_weights(n: usize, beta: f64, h: f64) -> Vec<f64> {
        (0..=n)
            .map(|k| {
                let edges =
                    k * k.saturating_sub(1) / 2 + (n - k) * (n - k).saturating_sub(1) / 2;
                ln_binomial(n, k) + 2.0 * beta * edges as f64 + 2.0 * h * k as f64
            })
            .collect()
    }

    fn normalized_class_probs(n: usize, beta: f64, h: f64) -> Vec<f64> {
        let lw = log_class_weights(n, beta, h);
        let m = lw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let z: f64 = lw.iter().map(|v| (v - m).exp()).sum();
        lw.iter().map(|v| (v - m).exp() / z).collect()
    }

    /// E[(2‖σ‖-n)^j].
    pub fn moment(n: usize, beta: f64, h: f64, j: u32) -> f64 {
        normalized_class_probs(n, beta, h)
            .iter()
            .enumerate()
            .map(|(k, p)| p * (2.0 * k as f64 - n as f64).powi(j as i32))
            .sum()
    }

    /// E[χ_{[m]}(σ)] via the hypergeometric conditional expectation
    /// E[χ_{[m]} | ‖σ‖ = k] = Σ_i (-1)^{m-i} C(m,i) k^(i) (n-k)^(m-i) / n^(m).
    pub fn chi_sum(n: usize, beta: f64, h: f64, m: usize) -> f64 {
        expectation_with(n, beta, h, m, |_k, _n| 1.0)
    }

    /// E[(2‖σ‖-n) χ_{[m]}(σ)].
    pub fn weighted_chi_sum(n: usize, beta: f64, h: f64, m: usize) -> f64 {
        expectation_with(n, beta, h, m, |k, n| 2.0 * k as f64 - n as f64)
    }

    fn expectation_with(
        n: usize,
        beta: f64,
        h: f64,
        m: usize,
        extra: fn(usize, usize) -> f64,
    ) -> f64 {
        let binom = |a: usize, b: usize| -> f64 {
            if b > a {
                0.0
            } else {
                let mut v = 1.0;
                for i in 0..b {
                    v = v * (a - i) as f64 / (i + 1) as f64;
                }
                v
            }
        };
        let falling = |a: f64, j: usize| -> f64 { (0..j).map(|i| a - i as f64).product() };
        normalized_class_probs(n, beta, h)
            .iter()
            .enumerate()
            .map(|(k, p)| {
                let cond: f64 = (0..=m)
                    .map(|i| {
                        let sgn = if (m - i) % 2 == 0 { 1.0 } else { -1.0 };
                        sgn * binom(m, i) * falling(k as f64, i) * falling((n - k) as f64, m - i)
                            / falling(n as f64, m)
                    })
                    .sum();
                p * cond * extra(k, n)
            })
            .sum()
    }
}
