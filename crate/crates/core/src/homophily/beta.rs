use serde::{Deserialize, Serialize};

use super::HomophilyHistogram;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Shape parameters of a Beta(alpha, beta) goal distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaGoal<T> {
    alpha: T,
    beta: T,
}

impl<T: Real> BetaGoal<T> {
    pub fn new(alpha: T, beta: T) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("beta", beta)] {
            if !(v.is_finite() && v > T::zero()) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    pub fn mean(&self) -> T {
        self.alpha / (self.alpha + self.beta)
    }

    pub fn variance(&self) -> T {
        let s = self.alpha + self.beta;
        self.alpha * self.beta / (s * s * (s + T::one()))
    }

    /// Unnormalized density, scaled so its peak is O(1) even for large shapes.
    fn scaled_density(&self) -> impl Fn(T) -> T {
        let (a1, b1) = (self.alpha - T::one(), self.beta - T::one());
        let log_kernel = move |x: T| a1 * x.ln() + b1 * (T::one() - x).ln();
        let shift = if a1 > T::zero() && b1 > T::zero() {
            log_kernel(a1 / (a1 + b1))
        } else {
            T::zero()
        };
        move |x: T| {
            if x <= T::zero() || x >= T::one() {
                T::zero()
            } else {
                (log_kernel(x) - shift).exp()
            }
        }
    }
}

/// Mass of Beta(alpha, beta) in each of `bins` equal-width bins.
///
/// Each bin is integrated with adaptive Gauss-Kronrod quadrature; the masses
/// are then renormalized, so the Beta normalization constant is never needed.
pub fn beta_goal_histogram<T: Real>(goal: &BetaGoal<T>, bins: usize) -> Result<HomophilyHistogram<T>> {
    if bins == 0 {
        return Err(Error::ZeroBins(bins));
    }
    if bins < 2 {
        return Err(Error::InvalidParameter("a goal histogram needs at least 2 bins".into()));
    }
    let density = goal.scaled_density();
    let rel_tol = (T::epsilon() * T::of(64.0)).max(T::of(1e-12));
    let b = T::of_usize(bins);
    let masses: Vec<T> = (0..bins)
        .map(|i| {
            let (lo, hi) = (T::of_usize(i) / b, T::of_usize(i + 1) / b);
            if i == 0 && goal.alpha < T::one() {
                // x = t^k removes the x^(alpha-1) singularity at 0
                let k = power_for(goal.alpha);
                let g = |t: T| k * t.powf(k - T::one()) * density(t.powf(k));
                adaptive_gauss_kronrod(&g, T::zero(), hi.powf(k.recip()), rel_tol)
            } else if i + 1 == bins && goal.beta < T::one() {
                let k = power_for(goal.beta);
                let g = |t: T| k * t.powf(k - T::one()) * density(T::one() - t.powf(k));
                adaptive_gauss_kronrod(&g, T::zero(), (T::one() - lo).powf(k.recip()), rel_tol)
            } else {
                adaptive_gauss_kronrod(&density, lo, hi, rel_tol)
            }
        })
        .collect();
    HomophilyHistogram::from_weights(masses)
}

fn power_for<T: Real>(shape: T) -> T {
    shape.recip().ceil()
}

// 7-point Gauss / 15-point Kronrod nodes and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Kronrod estimate and |Kronrod - Gauss| error estimate on `[a, b]`.
fn gk15<T: Real>(f: &impl Fn(T) -> T, a: T, b: T) -> (T, T) {
    let half = (b - a) * T::of(0.5);
    let mid = (a + b) * T::of(0.5);
    let fc = f(mid);
    let mut kronrod = fc * T::of(WGK[7]);
    let mut gauss = fc * T::of(WG[3]);
    for (j, (&x, &w)) in XGK.iter().zip(&WGK).take(7).enumerate() {
        let dx = half * T::of(x);
        let pair = f(mid - dx) + f(mid + dx);
        kronrod += pair * T::of(w);
        // odd Kronrod indices are the Gauss nodes
        if j % 2 == 1 {
            gauss += pair * T::of(WG[j / 2]);
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Globally adaptive quadrature: keep bisecting the interval with the largest
/// error estimate until the summed estimate meets `rel_tol`.
fn adaptive_gauss_kronrod<T: Real>(f: &impl Fn(T) -> T, a: T, b: T, rel_tol: T) -> T {
    const MAX_INTERVALS: usize = 4000;
    let (value, err) = gk15(f, a, b);
    let mut intervals = vec![(a, b, value, err)];
    loop {
        let total: T = intervals.iter().map(|iv| iv.2).sum();
        let error: T = intervals.iter().map(|iv| iv.3).sum();
        if error <= rel_tol * total.abs() || error <= T::min_positive_value() || intervals.len() >= MAX_INTERVALS {
            return total;
        }
        let worst = (0..intervals.len())
            .max_by(|&i, &j| intervals[i].3.partial_cmp(&intervals[j].3).unwrap_or(std::cmp::Ordering::Equal))
            .unwrap_or(0);
        let (lo, hi, _, _) = intervals.swap_remove(worst);
        let mid = (lo + hi) * T::of(0.5);
        if mid <= lo || mid >= hi {
            // interval can no longer be split at this precision
            intervals.push((lo, hi, T::zero(), T::zero()));
            let (v, _) = gk15(f, lo, hi);
            let last = intervals.len() - 1;
            intervals[last].2 = v;
            continue;
        }
        for (x0, x1) in [(lo, mid), (mid, hi)] {
            let (v, e) = gk15(f, x0, x1);
            intervals.push((x0, x1, v, e));
        }
    }
}
