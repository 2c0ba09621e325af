//! Linear one-layer GNN model of how a local-homophily shift turns into a
//! prediction gap between sensitive groups.
//!
//! Node features are `x = [±p, ±q]` with `p ~ N(mu_l, sigma)` carrying the
//! label and `q ~ N(mu_s, sigma)` carrying the sensitive attribute. A node of
//! degree `d` and homophily `h` aggregates to `(1 + d(2h - 1)) x`. A ridge
//! regression is fitted on `n` training nodes (`k` with `y = s = 0`, the rest
//! with `y = s = 1`) and applied to two label-0 test nodes with homophily
//! `h + alpha` that differ only in their sensitive attribute.
//!
//! Two closed forms are provided. [`expected_logit_gap`] is the published
//! expression; [`model_logit_gap`] is the gap the model above actually has,
//! which is exactly twice as large (the two test nodes differ by `2q` in the
//! sensitive coordinate).

use std::io::Write;

use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rounding::seeded_stream;
use crate::scalar::{Field, Real};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryParams<T> {
    pub n: u64,
    pub k: u64,
    pub d: u64,
    pub h: T,
    pub alpha: T,
    pub mu_l: T,
    pub mu_s: T,
    pub sigma: T,
    pub lambda: T,
}

type Mat2<T> = [[T; 2]; 2];

impl<T: Field> TheoryParams<T> {
    pub fn with_alpha(&self, alpha: T) -> Self {
        Self { alpha, ..self.clone() }
    }

    /// `1 + d(2h - 1)`, the factor a node's own features get scaled by after
    /// aggregation at homophily `h`.
    pub fn aggregation(&self, h: T) -> T {
        let one = T::one();
        let d = T::from_u64(self.d);
        one.clone() + d * (h.clone() + h - one)
    }

    pub fn validate(&self) -> Result<()> {
        let (zero, one) = (T::zero(), T::one());
        let bad = |m: &str| Err(Error::InvalidParameter(m.into()));
        if !(0 < self.k && self.k < self.n) {
            return bad("need 0 < k < n");
        }
        if self.d < 1 {
            return bad("degree must be at least 1");
        }
        if self.sigma < zero {
            return bad("sigma must be non-negative");
        }
        if !(self.h >= zero && self.h <= one) {
            return bad("h must lie in [0, 1]");
        }
        let shifted = self.h.clone() + self.alpha.clone();
        if !(shifted >= zero && shifted <= one) {
            return bad("h + alpha must lie in [0, 1]");
        }
        if !(self.lambda > zero) {
            return bad("lambda must be positive: the expected Gram matrix has rank 1");
        }
        if self.aggregation(self.h.clone()) == zero {
            return Err(Error::Singular("1 + d(2h - 1) = 0".into()));
        }
        Ok(())
    }

    /// `lambda + n (mu_l^2 + mu_s^2)`.
    fn ridge_scale(&self) -> T {
        let n = T::from_u64(self.n);
        let norm = self.mu_l.clone() * self.mu_l.clone() + self.mu_s.clone() * self.mu_s.clone();
        self.lambda.clone() + n * norm
    }
}

fn mul<T: Field>(a: &Mat2<T>, b: &Mat2<T>) -> Mat2<T> {
    let cell = |i: usize, j: usize| a[i][0].clone() * b[0][j].clone() + a[i][1].clone() * b[1][j].clone();
    [[cell(0, 0), cell(0, 1)], [cell(1, 0), cell(1, 1)]]
}

/// Expected ridge weights `E[W]` (rows: feature, columns: class).
pub fn expected_weights<T: Field>(params: &TheoryParams<T>) -> Result<Mat2<T>> {
    params.validate()?;
    let p = params;
    let n = T::from_u64(p.n);
    let k = T::from_u64(p.k);
    let rest = T::from_u64(p.n - p.k);
    let (l, s, lam) = (p.mu_l.clone(), p.mu_s.clone(), p.lambda.clone());
    let a = n.clone() * l.clone() * l.clone() + lam.clone();
    let c = n.clone() * s.clone() * s.clone() + lam;
    let b = n * l.clone() * s.clone();
    // (n l^2 + lam)(n s^2 + lam) - (n l s)^2, expanded to avoid cancellation
    let det = p.lambda.clone() * p.ridge_scale();
    if det == T::zero() {
        return Err(Error::Singular("regularized Gram matrix".into()));
    }
    let scale = T::one() / (p.aggregation(p.h.clone()) * det);
    let adjugate = [[c * scale.clone(), -b.clone() * scale.clone()], [-b * scale.clone(), a * scale]];
    let moments = [
        [-(k.clone() * l.clone()), rest.clone() * l],
        [-(k * s.clone()), rest * s],
    ];
    Ok(mul(&adjugate, &moments))
}

/// The published gap `mu_s^2 k (1 + d(2h + 2 alpha - 1)) / ((1 + d(2h - 1))
/// (lambda + (mu_l^2 + mu_s^2) n))`.
pub fn expected_logit_gap<T: Field>(params: &TheoryParams<T>) -> Result<T> {
    params.validate()?;
    let p = params;
    let k = T::from_u64(p.k);
    let numerator = p.mu_s.clone() * p.mu_s.clone() * k * p.aggregation(p.h.clone() + p.alpha.clone());
    Ok(numerator / (p.aggregation(p.h.clone()) * p.ridge_scale()))
}

/// Slope of [`expected_logit_gap`] in alpha: `2 d mu_s^2 k / denominator`.
pub fn gap_slope<T: Field>(params: &TheoryParams<T>) -> Result<T> {
    params.validate()?;
    let p = params;
    let two_d = T::from_u64(2 * p.d);
    let k = T::from_u64(p.k);
    Ok(two_d * p.mu_s.clone() * p.mu_s.clone() * k / (p.aggregation(p.h.clone()) * p.ridge_scale()))
}

/// Exact expected gap of the linearised model: `E[r_u - r_v] E[W]`, class-0
/// column, with `E[r_u] = -c' [mu_l, mu_s]` and `E[r_v] = c' [-mu_l, mu_s]`.
pub fn model_logit_gap<T: Field>(params: &TheoryParams<T>) -> Result<T> {
    let w = expected_weights(params)?;
    let c = params.aggregation(params.h.clone() + params.alpha.clone());
    let (l, s) = (params.mu_l.clone(), params.mu_s.clone());
    let r_u = [-(c.clone() * l.clone()), -(c.clone() * s.clone())];
    let r_v = [-(c.clone() * l), c * s];
    let logit = |r: &[T; 2]| r[0].clone() * w[0][0].clone() + r[1].clone() * w[1][0].clone();
    Ok(logit(&r_u) - logit(&r_v))
}

/// Aggregated training representations `R` (n x 2) and one-hot targets `Y`.
pub fn sample_training_representations<T, R>(params: &TheoryParams<T>, rng: &mut R) -> Result<(Vec<[T; 2]>, Vec<[T; 2]>)>
where
    T: Real + Field,
    StandardNormal: Distribution<T>,
    R: Rng + ?Sized,
{
    params.validate()?;
    let c = params.aggregation(params.h);
    let (label, sensitive) = feature_distributions(params)?;
    let mut reps = Vec::with_capacity(params.n as usize);
    let mut targets = Vec::with_capacity(params.n as usize);
    for i in 0..params.n {
        let (p, q) = (label.sample(rng), sensitive.sample(rng));
        if i < params.k {
            reps.push([-c * p, -c * q]);
            targets.push([T::one(), T::zero()]);
        } else {
            reps.push([c * p, c * q]);
            targets.push([T::zero(), T::one()]);
        }
    }
    Ok((reps, targets))
}

fn feature_distributions<T>(params: &TheoryParams<T>) -> Result<(Normal<T>, Normal<T>)>
where
    T: Real,
    StandardNormal: Distribution<T>,
{
    let make = |mean: T| Normal::new(mean, params.sigma).map_err(|e| Error::InvalidParameter(e.to_string()));
    Ok((make(params.mu_l)?, make(params.mu_s)?))
}

/// Ridge fit `W = (R^T R + c^2 lambda I)^{-1} R^T Y`, where `c` is the
/// training aggregation factor, so that at `sigma = 0` the fit equals
/// [`expected_weights`].
pub fn fit_weights<T: Real + Field>(params: &TheoryParams<T>, reps: &[[T; 2]], targets: &[[T; 2]]) -> Result<Mat2<T>> {
    let c = params.aggregation(params.h);
    let ridge = c * c * params.lambda;
    let mut gram = [[T::zero(); 2]; 2];
    let mut cross = [[T::zero(); 2]; 2];
    for (r, y) in reps.iter().zip(targets) {
        for i in 0..2 {
            for j in 0..2 {
                gram[i][j] += r[i] * r[j];
                cross[i][j] += r[i] * y[j];
            }
        }
    }
    gram[0][0] += ridge;
    gram[1][1] += ridge;
    let det = gram[0][0] * gram[1][1] - gram[0][1] * gram[1][0];
    let size = gram[0][0].abs().max(gram[1][1].abs());
    if !(det.abs() > size * size * T::epsilon() * T::of(16.0)) {
        return Err(Error::Singular(format!("ridge system has determinant {det}")));
    }
    let inverse = [
        [gram[1][1] / det, -gram[0][1] / det],
        [-gram[1][0] / det, gram[0][0] / det],
    ];
    Ok(mul(&inverse, &cross))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryResult<T> {
    /// Published closed form ([`expected_logit_gap`]).
    pub closed_form_gap: T,
    /// Exact expectation of the simulated model ([`model_logit_gap`]).
    pub model_gap: T,
    pub mc_gap_mean: T,
    pub mc_gap_stderr: T,
    pub trials: usize,
}

/// One simulated gap: fit on fresh training data, then score one fresh test
/// node per sensitive group.
pub fn simulate_gap<T, R>(params: &TheoryParams<T>, rng: &mut R) -> Result<T>
where
    T: Real + Field,
    StandardNormal: Distribution<T>,
    R: Rng + ?Sized,
{
    let (reps, targets) = sample_training_representations(params, rng)?;
    let w = fit_weights(params, &reps, &targets)?;
    let c = params.aggregation(params.h + params.alpha);
    let (label, sensitive) = feature_distributions(params)?;
    let r_u = [-c * label.sample(rng), -c * sensitive.sample(rng)];
    let r_v = [-c * label.sample(rng), c * sensitive.sample(rng)];
    let logit = |r: [T; 2]| r[0] * w[0][0] + r[1] * w[1][0];
    Ok(logit(r_u) - logit(r_v))
}

/// Mean and standard error of `trials` independent simulated gaps. Trial
/// `t` draws from stream `t` of `seed`.
pub fn monte_carlo_gap<T>(params: &TheoryParams<T>, trials: usize, seed: u64) -> Result<TheoryResult<T>>
where
    T: Real + Field,
    StandardNormal: Distribution<T>,
{
    if trials == 0 {
        return Err(Error::InvalidParameter("need at least one trial".into()));
    }
    let mut sum = T::zero();
    let mut sum_sq = T::zero();
    for t in 0..trials {
        let gap = simulate_gap(params, &mut seeded_stream(seed, t as u64))?;
        sum += gap;
        sum_sq += gap * gap;
    }
    let count = T::of_usize(trials);
    let mean = sum / count;
    let stderr = if trials > 1 {
        let var = ((sum_sq - count * mean * mean) / (count - T::one())).max(T::zero());
        (var / count).sqrt()
    } else {
        T::zero()
    };
    Ok(TheoryResult {
        closed_form_gap: expected_logit_gap(params)?,
        model_gap: model_logit_gap(params)?,
        mc_gap_mean: mean,
        mc_gap_stderr: stderr,
        trials,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow<T> {
    pub alpha: T,
    pub closed_form: T,
    pub mc_mean: T,
    pub mc_stderr: T,
    pub trials: usize,
}

/// One row per valid grid point; points with `h + alpha` outside `[0, 1]`
/// are skipped with a warning. Every grid point reuses the same seed.
pub fn sweep_alpha<T>(params: &TheoryParams<T>, grid: &[T], trials: usize, seed: u64) -> Result<Vec<SweepRow<T>>>
where
    T: Real + Field,
    StandardNormal: Distribution<T>,
{
    let mut rows = Vec::with_capacity(grid.len());
    for &alpha in grid {
        let shifted = params.h + alpha;
        if !(T::zero()..=T::one()).contains(&shifted) {
            log::warn!("skipping alpha = {alpha}: h + alpha = {shifted} is outside [0, 1]");
            continue;
        }
        let result = monte_carlo_gap(&params.with_alpha(alpha), trials, seed)?;
        rows.push(SweepRow {
            alpha,
            closed_form: result.closed_form_gap,
            mc_mean: result.mc_gap_mean,
            mc_stderr: result.mc_gap_stderr,
            trials,
        });
    }
    Ok(rows)
}

pub fn write_sweep_csv<T: Real, W: Write>(rows: &[SweepRow<T>], mut out: W) -> Result<()> {
    let io = |e| Error::Io { path: "<sweep csv>".into(), source: e };
    writeln!(out, "alpha,closed_form,mc_mean,mc_stderr,trials").map_err(io)?;
    for r in rows {
        writeln!(out, "{},{},{},{},{}", r.alpha, r.closed_form, r.mc_mean, r.mc_stderr, r.trials).map_err(io)?;
    }
    Ok(())
}

/// Least-squares line through `(x, y)`: `(slope, intercept, r_squared)`.
pub fn fit_line<T: Real>(x: &[T], y: &[T]) -> (T, T, T) {
    let n = T::of_usize(x.len());
    let mx = x.iter().copied().sum::<T>() / n;
    let my = y.iter().copied().sum::<T>() / n;
    let sxy: T = x.iter().zip(y).map(|(&a, &b)| (a - mx) * (b - my)).sum();
    let sxx: T = x.iter().map(|&a| (a - mx) * (a - mx)).sum();
    let syy: T = y.iter().map(|&b| (b - my) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == T::zero() { T::one() } else { sxy * sxy / (sxx * syy) };
    (slope, intercept, r2)
}
