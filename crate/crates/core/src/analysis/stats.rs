//! Exact binomial tails, Wilson intervals, least squares and the mean's
//! standard error.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

/// Two-sided 95% normal quantile used for Wilson intervals.
pub const Z95: f64 = 1.959963984540054;

/// Multiplier used for mean ± k·SEM intervals over models.
pub const SEM_MULTIPLIER: f64 = 1.96;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StatsError {
    #[error("binomial test needs 0 <= k <= n and n >= 1 (k = {k}, n = {n})")]
    Domain { k: u64, n: u64 },
    #[error("regression needs at least two points, got {0}")]
    TooFewPoints(usize),
    #[error("regression needs distinct x values")]
    DegenerateX,
    #[error("non-finite input")]
    NonFinite,
    #[error("mean of an empty sample")]
    EmptySample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tail {
    /// `P(X >= k)`
    Above,
    /// `P(X <= k)`
    Below,
}

/// `ln(n!) - ln(sqrt(2 pi n) (n/e)^n)`, exact table for small n, series beyond.
pub(crate) fn stirlerr(n: f64) -> f64 {
    #[allow(clippy::excessive_precision)]
    const TABLE: [f64; 16] = [
        0.0,
        0.081_061_466_795_327_258_22,
        0.041_340_695_955_409_294_09,
        0.027_677_925_684_998_339_15,
        0.020_790_672_103_765_093_11,
        0.016_644_691_189_821_192_16,
        0.013_876_128_823_070_747_99,
        0.011_896_709_945_891_770_10,
        0.010_411_265_261_972_096_50,
        0.009_255_462_182_712_732_92,
        0.008_330_563_433_362_871_26,
        0.007_573_675_487_951_840_79,
        0.006_942_840_107_209_529_87,
        0.006_408_994_188_004_207_07,
        0.005_951_370_112_758_847_74,
        0.005_554_733_551_962_801_37,
    ];
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    if n <= 15.0 {
        return TABLE[n as usize];
    }
    let nn = n * n;
    if n > 500.0 {
        (S0 - S1 / nn) / n
    } else if n > 80.0 {
        (S0 - (S1 - S2 / nn) / nn) / n
    } else if n > 35.0 {
        (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / n
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / n
    }
}

/// Deviance term `x ln(x/np) + np - x`, accurate when `x` is close to `np`.
pub(crate) fn bd0(x: f64, np: f64) -> f64 {
    if (x - np).abs() < 0.1 * (x + np) {
        let v = (x - np) / (x + np);
        let mut s = (x - np) * v;
        let mut ej = 2.0 * x * v;
        let v2 = v * v;
        let mut j = 1.0;
        loop {
            ej *= v2;
            let s1 = s + ej / (2.0 * j + 1.0);
            if s1 == s {
                return s1;
            }
            s = s1;
            j += 1.0;
        }
    }
    x * (x / np).ln() + np - x
}

/// `ln P(X = x)` for `X ~ Binomial(n, 1/2)`, by the saddle-point expansion.
fn ln_pmf_half(x: u64, n: u64) -> f64 {
    let (x, n) = (x as f64, n as f64);
    if x == 0.0 || x == n {
        return -n * LN_2;
    }
    let half = n / 2.0;
    let lc = stirlerr(n) - stirlerr(x) - stirlerr(n - x) - bd0(x, half) - bd0(n - x, half);
    let lf = (2.0 * PI).ln() + x.ln() + (-x / n).ln_1p();
    lc - 0.5 * lf
}

/// `ln P(X >= k)` for `k > n/2`: the anchor term times the sum of term
/// ratios, which decrease monotonically from 1.
fn ln_upper_tail(k: u64, n: u64) -> f64 {
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut comp = 0.0f64;
    for j in k..n {
        term *= (n - j) as f64 / (j + 1) as f64;
        // Neumaier summation.
        let t = sum + term;
        comp += if sum.abs() >= term.abs() {
            (sum - t) + term
        } else {
            (term - t) + sum
        };
        sum = t;
        if term < sum * 1e-20 {
            break;
        }
    }
    ln_pmf_half(k, n) + (sum + comp).ln()
}

/// `exp(l)` that is exact for `l = -n ln 2`: whole powers of two are split
/// off and applied by exponent arithmetic.
fn exp_exact_halves(l: f64) -> f64 {
    if l >= 0.0 {
        return l.exp();
    }
    let r = (-l / LN_2).round().min(1022.0);
    let scale = f64::from_bits(((1023.0 - r) as u64) << 52);
    (l + r * LN_2).exp() * scale
}

fn check(k: u64, n: u64) -> Result<(), StatsError> {
    if n == 0 || k > n {
        Err(StatsError::Domain { k, n })
    } else {
        Ok(())
    }
}

/// Natural log of the one-sided exact tail of `Binomial(n, 1/2)`.
pub fn ln_binomial_p(k: u64, n: u64, tail: Tail) -> Result<f64, StatsError> {
    check(k, n)?;
    // Reduce to an upper tail starting above the median; by symmetry
    // P(X <= k) = P(X >= n - k).
    let start = match tail {
        Tail::Above => k,
        Tail::Below => n - k,
    };
    if start == 0 {
        return Ok(0.0);
    }
    if 2 * start == n + 1 {
        return Ok(-LN_2);
    }
    if 2 * start > n {
        Ok(ln_upper_tail(start, n))
    } else {
        // Complement of the small tail P(X <= start - 1) = P(X >= n - start + 1).
        let small = ln_upper_tail(n - start + 1, n).exp();
        Ok((-small).ln_1p())
    }
}

/// One-sided exact binomial p-value against chance (p = 1/2).
pub fn binomial_p(k: u64, n: u64, tail: Tail) -> Result<f64, StatsError> {
    check(k, n)?;
    let start = match tail {
        Tail::Above => k,
        Tail::Below => n - k,
    };
    if start == 0 {
        return Ok(1.0);
    }
    // Odd n split at the median: exactly one half by symmetry.
    if 2 * start == n + 1 {
        return Ok(0.5);
    }
    if 2 * start > n {
        Ok(exp_exact_halves(ln_upper_tail(start, n)))
    } else {
        Ok(1.0 - exp_exact_halves(ln_upper_tail(n - start + 1, n)))
    }
}

/// Wilson score interval for `k` successes in `n` trials.
pub fn wilson(k: u64, n: u64, z: f64) -> Result<(f64, f64), StatsError> {
    check(k, n)?;
    let (kf, nf) = (k as f64, n as f64);
    let p = kf / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = z / denom * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt();
    let low = if k == 0 { 0.0 } else { (center - half).clamp(0.0, p) };
    let high = if k == n { 1.0 } else { (center + half).clamp(p, 1.0) };
    Ok((low, high))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionFit {
    /// Percentage points per billion parameters.
    pub slope: f64,
    pub intercept: f64,
    /// `(billions of parameters, accuracy in percent)`
    pub points: Vec<(f64, f64)>,
}

/// Ordinary least squares on centered sums. With two points the slope is
/// the secant `dy/dx` exactly.
pub fn fit_slope(points: &[(f64, f64)]) -> Result<RegressionFit, StatsError> {
    if points.len() < 2 {
        return Err(StatsError::TooFewPoints(points.len()));
    }
    if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    if points.iter().all(|p| p.0 == points[0].0) {
        return Err(StatsError::DegenerateX);
    }
    let (slope, intercept) = if let [(x1, y1), (x2, y2)] = points {
        let slope = (y2 - y1) / (x2 - x1);
        (slope, y1 - slope * x1)
    } else {
        let m = points.len() as f64;
        let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
        let my = points.iter().map(|p| p.1).sum::<f64>() / m;
        let sxy: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = points.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
        let slope = sxy / sxx;
        (slope, my - slope * mx)
    };
    Ok(RegressionFit {
        slope,
        intercept,
        points: points.to_vec(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanInterval {
    pub count: usize,
    pub mean: f64,
    /// Sample standard deviation over `sqrt(count)`; zero for one value.
    pub sem: f64,
    pub low: f64,
    pub high: f64,
}

/// Mean with a `mean ± 1.96·SEM` interval.
pub fn mean_sem(values: &[f64]) -> Result<MeanInterval, StatsError> {
    if values.is_empty() {
        return Err(StatsError::EmptySample);
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    let sem = if values.len() < 2 {
        0.0
    } else {
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m - 1.0);
        (var / m).sqrt()
    };
    Ok(MeanInterval {
        count: values.len(),
        mean,
        sem,
        low: mean - SEM_MULTIPLIER * sem,
        high: mean + SEM_MULTIPLIER * sem,
    })
}
