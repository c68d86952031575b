//! Additive arithmetic functions (`omega`, the threshold-restricted
//! `omega_star`), Erdős–Kac centering and scaling, empirical distributions
//! against the Gaussian, and the normal-CDF utilities shared by the
//! probability models.

use rayon::prelude::*;

use crate::primes::{distinct_prime_factors, factorize, sieve_primes};
use crate::{Error, Result};

/// Prime-divisor profile of a single integer.
///
/// `omega_star` counts only the prime divisors `p >= ln m / (ln ln m)^2`;
/// the boundary case `p == threshold` counts.
#[derive(Debug, Clone, PartialEq)]
pub struct AdditiveProfile {
    pub m: u64,
    pub omega: u64,
    pub omega_star: u64,
    pub threshold: f64,
}

/// Number of distinct prime factors, by full factorization.
pub fn omega(m: u64) -> u64 {
    factorize(m).len() as u64
}

/// `omega_star(m)`: distinct prime factors at least `ln m / (ln ln m)^2`.
/// Defined for `m >= 20` only.
pub fn omega_star(m: u64) -> Result<AdditiveProfile> {
    if m < 20 {
        return Err(Error::domain(format!(
            "omega_star requires m >= 20, got {}",
            m
        )));
    }
    let threshold = omega_star_threshold(m);
    let factors = distinct_prime_factors(m);
    let omega = factors.len() as u64;
    let omega_star = factors
        .iter()
        .filter(|&&p| p as f64 >= threshold)
        .count() as u64;
    Ok(AdditiveProfile {
        m,
        omega,
        omega_star,
        threshold,
    })
}

pub fn omega_star_threshold(m: u64) -> f64 {
    let log_m = (m as f64).ln();
    log_m / log_m.ln().powi(2)
}

/// A strongly additive function: `f(m) = sum of f(p) over distinct p | m`,
/// determined by its values at primes, which must stay in `[-1, 1]`.
pub trait StronglyAdditive {
    fn at_prime(&self, p: u64) -> f64;

    fn eval(&self, m: u64) -> f64 {
        distinct_prime_factors(m)
            .into_iter()
            .map(|p| self.at_prime(p))
            .sum()
    }
}

impl<F: Fn(u64) -> f64> StronglyAdditive for F {
    fn at_prime(&self, p: u64) -> f64 {
        self(p)
    }
}

/// Erdős–Kac centering `A(x)` and scaling `B(x)` for a strongly additive `f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EkNormalization {
    /// `sum of f(p)/p over p <= x`
    pub a: f64,
    /// `sqrt(sum of f(p)^2/p over p <= x)`
    pub b: f64,
    pub x: f64,
}

/// Computes `A(x) = sum f(p)/p` and `B(x) = sqrt(sum f(p)^2/p)` over primes
/// `p <= x`. The square root is taken of the whole variance sum, the scaling
/// under which the central limit theorem actually holds.
pub fn ek_normalization<F: StronglyAdditive>(f: &F, x: u64) -> Result<EkNormalization> {
    if x < 2 {
        return Err(Error::domain("ek_normalization requires x >= 2"));
    }
    let table = sieve_primes(x)?;
    let mut a = 0.0;
    let mut b2 = 0.0;
    for &p in table.primes() {
        let v = f.at_prime(p);
        if v.abs() > 1.0 {
            return Err(Error::domain(format!(
                "strongly additive spec out of range: |f({})| = {} > 1",
                p,
                v.abs()
            )));
        }
        a += v / p as f64;
        b2 += v * v / p as f64;
    }
    if b2 == 0.0 {
        return Err(Error::domain("ek_normalization: B(x) = 0"));
    }
    Ok(EkNormalization { a, b: b2.sqrt(), x: x as f64 })
}

/// Evaluates `stat` on every `m <= n` (in parallel, merged in order) and
/// keeps the finite values. Integers where the statistic is undefined
/// (`None`) are dropped from the sample.
pub fn statistic_samples<F>(n: u64, stat: F) -> Vec<f64>
where
    F: Fn(u64) -> Option<f64> + Sync,
{
    (1..=n)
        .into_par_iter()
        .filter_map(|m| stat(m))
        .collect()
}

/// Empirical CDF of `stat` over `m <= n`, evaluated at `z`.
pub fn empirical_clt<F>(stat: F, n: u64, z: f64) -> Result<f64>
where
    F: Fn(u64) -> Option<f64> + Sync,
{
    if n < 100 {
        return Err(Error::domain("empirical_clt requires N >= 100"));
    }
    let mut samples = statistic_samples(n, stat);
    samples.sort_unstable_by(f64::total_cmp);
    Ok(empirical_cdf(&samples, z))
}

/// Kolmogorov–Smirnov distance between the empirical distribution of `stat`
/// and the standard Gaussian, maximized over the supplied `z` grid.
pub fn ks_to_gaussian<F>(stat: F, n: u64, grid: &[f64]) -> Result<f64>
where
    F: Fn(u64) -> Option<f64> + Sync,
{
    if n < 100 {
        return Err(Error::domain("ks_to_gaussian requires N >= 100"));
    }
    let mut samples = statistic_samples(n, stat);
    samples.sort_unstable_by(f64::total_cmp);
    Ok(ks_distance(&samples, grid))
}

/// Empirical CDF at `z` for a sorted sample.
pub fn empirical_cdf(sorted: &[f64], z: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    sorted.partition_point(|&v| v <= z) as f64 / sorted.len() as f64
}

/// `max |F_n(z) - Phi(z)|` over the grid, for a sorted sample.
pub fn ks_distance(sorted: &[f64], grid: &[f64]) -> f64 {
    grid.iter()
        .map(|&z| (empirical_cdf(sorted, z) - normal_cdf(z)).abs())
        .fold(0.0, f64::max)
}

/// The pinned evaluation grid: -5.00, -4.99, ..., 5.00.
pub fn default_z_grid() -> Vec<f64> {
    (-500..=500).map(|i| i as f64 / 100.0).collect()
}

/// The Erdős–Kac statistic for `omega`:
/// `(omega(m) - ln ln m) / sqrt(ln ln m)`, defined for `m >= 3`.
pub fn omega_clt_statistic(m: u64, omega_m: u64) -> Option<f64> {
    if m < 3 {
        return None;
    }
    let loglog = (m as f64).ln().ln();
    if loglog <= 0.0 {
        return None;
    }
    Some((omega_m as f64 - loglog) / loglog.sqrt())
}

/// All `omega(m)` for `m <= n`, by a divisor-count sieve. Much faster than
/// factorizing each integer; the factorization route stays available as an
/// independent cross-check.
pub fn omega_sieve(n: u64) -> Result<Vec<u8>> {
    let n_usize = usize::try_from(n)
        .map_err(|_| Error::resource(format!("omega_sieve: {} exceeds address space", n)))?;
    let mut counts = vec![0u8; n_usize + 1];
    let mut p = 2usize;
    while p <= n_usize {
        if counts[p] == 0 {
            let mut m = p;
            while m <= n_usize {
                counts[m] += 1;
                m += p;
            }
        }
        p += 1;
    }
    Ok(counts)
}

/// Sorted sample of the `omega` statistic over `3 <= m <= n`.
pub fn omega_clt_samples(n: u64) -> Result<Vec<f64>> {
    let counts = omega_sieve(n)?;
    let mut samples: Vec<f64> = (3..=n)
        .filter_map(|m| omega_clt_statistic(m, counts[m as usize] as u64))
        .collect();
    samples.sort_unstable_by(f64::total_cmp);
    Ok(samples)
}

/// Standard normal CDF, accurate to about 1e-14 absolute.
///
/// Odd series around the origin for `|z| <= 3`, Mills-ratio continued
/// fraction in the tails.
pub fn normal_cdf(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    if z == f64::INFINITY {
        return 1.0;
    }
    if z == f64::NEG_INFINITY {
        return 0.0;
    }
    if z.abs() <= 3.0 {
        // Phi(z) = 1/2 + phi(z) * sum z^(2k+1) / (1*3*...*(2k+1)); all terms
        // share the sign of z, so there is no cancellation.
        let mut term = z;
        let mut sum = z;
        let mut k = 0u32;
        while term.abs() > 1e-18 * sum.abs().max(1.0) {
            k += 1;
            term *= z * z / (2 * k + 1) as f64;
            sum += term;
        }
        0.5 + normal_pdf(z) * sum
    } else if z > 0.0 {
        1.0 - normal_pdf(z) * mills_ratio(z)
    } else {
        normal_pdf(z) * mills_ratio(-z)
    }
}

fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Mills ratio `(1 - Phi(z)) / phi(z)` for `z >= 3` via the Stieltjes
/// continued fraction `1/(z + 1/(z + 2/(z + 3/(...))))`, evaluated with the
/// modified Lentz algorithm.
fn mills_ratio(z: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = TINY;
    let mut c = f;
    let mut d = 0.0;
    for k in 0..10_000u32 {
        let (a, b) = if k == 0 { (1.0, z) } else { (k as f64, z) };
        d = b + a * d;
        if d == 0.0 {
            d = TINY;
        }
        c = b + a / c;
        if c == 0.0 {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    f / TINY * TINY // keep the scale explicit; f already holds the value
}

/// `Phi(alpha + eps) - Phi(alpha - eps)`, the Gaussian mass of the interval
/// `(alpha - eps, alpha + eps)`. Requires `eps > 0` (infinite is allowed).
pub fn gaussian_mass(alpha: f64, eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::domain("gaussian_mass requires eps > 0"));
    }
    Ok(normal_cdf(alpha + eps) - normal_cdf(alpha - eps))
}
