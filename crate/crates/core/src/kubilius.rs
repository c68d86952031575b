//! The classic Kubilius model (divisibility cells of `1..=x` over the
//! primes up to `r`, frequency measure vs independent product measure) and
//! the shifted-prime variant whose sample space is `m0 + r M + u` over the
//! `r` making `m0 + r M` prime. All measures are exact rationals; the
//! Monte Carlo side is seeded and schedule-independent.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::primes::{factorize, is_prime_u64, sieve_primes};
use crate::{Error, Natural, Rational, Result};

/// Cells beyond this are refused (2^20 cells = 20 generating primes).
pub const MAX_MODEL_PRIMES: usize = 20;

fn ratio(n: BigUint, d: BigUint) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// The classic model: for each squarefree `k` dividing the primorial of
/// `r`, the cell `E_k` holds the `m <= x` divisible by exactly the primes
/// of `k` (among those up to `r`). Cells are indexed by bitmask over the
/// generating primes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KubiliusModel {
    x: u64,
    r: u64,
    primes: Vec<u64>,
    cells: Vec<u64>,
}

impl KubiliusModel {
    pub fn x(&self) -> u64 {
        self.x
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn mask_count(&self) -> usize {
        self.cells.len()
    }

    /// `|E_k|` for the cell selected by `mask`.
    pub fn cell_size(&self, mask: usize) -> u64 {
        self.cells[mask]
    }

    /// The squarefree divisor `k` the mask stands for.
    pub fn divisor(&self, mask: usize) -> Natural {
        mask_divisor(&self.primes, mask)
    }

    /// `D`, the product of all generating primes.
    pub fn modulus(&self) -> Natural {
        mask_divisor(&self.primes, self.cells.len() - 1)
    }

    /// Frequency measure `nu(E_k) = |E_k| / x`.
    pub fn nu(&self, mask: usize) -> Rational {
        ratio(BigUint::from(self.cells[mask]), BigUint::from(self.x))
    }

    /// Product measure `mu(E_k) = (1/k) * prod over p | D/k of (1 - 1/p)`,
    /// equivalently independent divisibility with weight `1/p` per prime.
    pub fn mu(&self, mask: usize) -> Rational {
        product_measure(&self.primes, mask, |p| {
            ratio(BigUint::one(), BigUint::from(p))
        })
    }

    /// Exact total-variation distance `sum |nu - mu| / 2`.
    pub fn total_variation(&self) -> Rational {
        let mut sum = Rational::zero();
        for mask in 0..self.cells.len() {
            sum += (self.nu(mask) - self.mu(mask)).abs();
        }
        sum / Rational::from_integer(BigInt::from(2))
    }

    /// All rows `(mask, k, |E_k|, nu, mu)` ordered by mask.
    pub fn measure_table(&self) -> Vec<MeasureRow> {
        (0..self.cells.len())
            .map(|mask| MeasureRow {
                mask,
                k: self.divisor(mask),
                cell: self.cells[mask],
                nu: self.nu(mask),
                mu: self.mu(mask),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureRow {
    pub mask: usize,
    #[serde(serialize_with = "crate::serde_util::biguint_dec")]
    pub k: Natural,
    pub cell: u64,
    #[serde(serialize_with = "crate::serde_util::rational_frac")]
    pub nu: Rational,
    #[serde(serialize_with = "crate::serde_util::rational_frac")]
    pub mu: Rational,
}

fn mask_divisor(primes: &[u64], mask: usize) -> Natural {
    let mut k = BigUint::one();
    for (i, &p) in primes.iter().enumerate() {
        if mask >> i & 1 == 1 {
            k *= BigUint::from(p);
        }
    }
    k
}

/// `prod over mask of w(p) * prod off mask of (1 - w(p))`.
fn product_measure(primes: &[u64], mask: usize, weight: impl Fn(u64) -> Rational) -> Rational {
    let mut acc = Rational::one();
    for (i, &p) in primes.iter().enumerate() {
        let w = weight(p);
        if mask >> i & 1 == 1 {
            acc *= w;
        } else {
            acc *= Rational::one() - w;
        }
    }
    acc
}

/// Builds the classic model by directly classifying `1..=x`.
pub fn build_classic(x: u64, r: u64) -> Result<KubiliusModel> {
    if r < 2 || r > x {
        return Err(Error::domain("build_classic requires 2 <= r <= x"));
    }
    let primes: Vec<u64> = sieve_primes(r)?.primes().to_vec();
    if primes.len() > MAX_MODEL_PRIMES {
        return Err(Error::resource(format!(
            "{} generating primes exceed the {}-prime cell ceiling",
            primes.len(),
            MAX_MODEL_PRIMES
        )));
    }
    let mut cells = vec![0u64; 1 << primes.len()];
    for m in 1..=x {
        let mut mask = 0usize;
        for (i, &p) in primes.iter().enumerate() {
            if m % p == 0 {
                mask |= 1 << i;
            }
        }
        cells[mask] += 1;
    }
    Ok(KubiliusModel { x, r, primes, cells })
}

/// One comparison row of cell count against the independent-model
/// prediction `(x/k) * prod (1 - 1/p)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub mask: usize,
    #[serde(serialize_with = "crate::serde_util::biguint_dec")]
    pub k: Natural,
    pub cell: u64,
    pub expected: f64,
    pub rel_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassicComparison {
    /// Rows restricted to `k <= sqrt(x)`.
    pub rows: Vec<ComparisonRow>,
    pub max_rel_error: f64,
    #[serde(serialize_with = "crate::serde_util::rational_frac")]
    pub total_variation: Rational,
    /// `exp(-(1/8)(ln x / ln r) ln(ln x / ln r)) + x^(-1/10)`
    pub l_value: f64,
    /// `l_value >= 1` makes the relative-error guarantee empty.
    pub vacuous: bool,
}

/// Per-cell relative error against the product-measure prediction, the
/// exact total-variation distance, and the error-scale quantity `L(x, r)`.
pub fn compare_classic(model: &KubiliusModel) -> ClassicComparison {
    let sqrt_x = BigUint::from((model.x as f64).sqrt().floor() as u64);
    let x_rat = Rational::from_integer(BigInt::from(model.x));
    let mut rows = Vec::new();
    let mut max_rel: f64 = 0.0;
    for mask in 0..model.mask_count() {
        let k = model.divisor(mask);
        if k > sqrt_x {
            continue;
        }
        // expected = (x/k) * prod over off-mask primes of (1 - 1/p)
        let off_product = product_off_mask(model.primes(), mask);
        let expected = &x_rat * &off_product / Rational::from_integer(BigInt::from(k.clone()));
        let ratio_minus_one =
            Rational::from_integer(BigInt::from(model.cell_size(mask))) / &expected
                - Rational::one();
        let rel = ratio_minus_one.to_f64().unwrap_or(f64::NAN);
        max_rel = max_rel.max(rel.abs());
        rows.push(ComparisonRow {
            mask,
            k,
            cell: model.cell_size(mask),
            expected: expected.to_f64().unwrap_or(f64::NAN),
            rel_error: rel,
        });
    }
    let l_value = l_quantity(model.x as f64, model.r as f64);
    ClassicComparison {
        rows,
        max_rel_error: max_rel,
        total_variation: model.total_variation(),
        l_value,
        vacuous: l_value >= 1.0,
    }
}

fn product_off_mask(primes: &[u64], mask: usize) -> Rational {
    let mut acc = Rational::one();
    for (i, &p) in primes.iter().enumerate() {
        if mask >> i & 1 == 0 {
            acc *= ratio(BigUint::from(p - 1), BigUint::from(p));
        }
    }
    acc
}

/// `L(x, r)`: the error scale of the cell-count approximation.
pub fn l_quantity(x: f64, r: f64) -> f64 {
    let t = x.ln() / r.ln();
    (-(t / 8.0) * t.ln()).exp() + x.powf(-0.1)
}

/// The shifted-prime model. The roster holds `m0 + r M + u` for the `r` in
/// the range making `m0 + r M` prime; cells classify the roster by which
/// window primes divide each element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftedModel {
    modulus: u64,
    m0: u64,
    shift: u64,
    r_range: (u64, u64),
    window: (u64, u64),
    window_primes: Vec<u64>,
    roster: Vec<u64>,
    cells: Vec<u64>,
}

impl ShiftedModel {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn m0(&self) -> u64 {
        self.m0
    }

    pub fn shift(&self) -> u64 {
        self.shift
    }

    pub fn r_range(&self) -> (u64, u64) {
        self.r_range
    }

    pub fn window(&self) -> (u64, u64) {
        self.window
    }

    pub fn window_primes(&self) -> &[u64] {
        &self.window_primes
    }

    pub fn roster(&self) -> &[u64] {
        &self.roster
    }

    pub fn roster_size(&self) -> u64 {
        self.roster.len() as u64
    }

    pub fn mask_count(&self) -> usize {
        self.cells.len()
    }

    pub fn cell_size(&self, mask: usize) -> u64 {
        self.cells[mask]
    }

    pub fn divisor(&self, mask: usize) -> Natural {
        mask_divisor(&self.window_primes, mask)
    }

    /// `D*`, the product of the window primes.
    pub fn d_star(&self) -> Natural {
        mask_divisor(&self.window_primes, self.cells.len() - 1)
    }

    /// Frequency measure `nu*(E*_k) = |E*_k| / |S*|`.
    pub fn nu_star(&self, mask: usize) -> Rational {
        ratio(
            BigUint::from(self.cells[mask]),
            BigUint::from(self.roster.len() as u64),
        )
    }

    /// The literal product form `(1/k) * prod over p | D*/k (1 - 1/(p-1))`.
    /// Its total mass over all cells is generally below 1; kept verbatim
    /// for inspection, never used for sampling.
    pub fn mu_star_literal(&self, mask: usize) -> Rational {
        let k = self.divisor(mask);
        let mut acc = Rational::new(BigInt::one(), BigInt::from(k));
        for (i, &p) in self.window_primes.iter().enumerate() {
            if mask >> i & 1 == 0 {
                acc *= Rational::one() - ratio(BigUint::one(), BigUint::from(p - 1));
            }
        }
        acc
    }

    /// The normalized independent measure: weight `1/(p-1)` per window
    /// prime (the density of `p | q + u` over primes `q`), which makes the
    /// cell masses sum to exactly 1.
    pub fn mu_star_normalized(&self, mask: usize) -> Rational {
        product_measure(&self.window_primes, mask, |p| {
            ratio(BigUint::one(), BigUint::from(p - 1))
        })
    }

    /// Sum of the literal masses; recorded because it usually is not 1.
    pub fn mu_star_literal_total(&self) -> Rational {
        (0..self.cells.len())
            .map(|m| self.mu_star_literal(m))
            .fold(Rational::zero(), |a, b| a + b)
    }

    /// Mean of `eta_star` under the normalized measure: `sum 1/(p-1)`.
    pub fn eta_mean(&self) -> f64 {
        self.window_primes
            .iter()
            .map(|&p| 1.0 / (p - 1) as f64)
            .sum()
    }

    /// Standard deviation of `eta_star` under the normalized measure.
    pub fn eta_sd(&self) -> f64 {
        self.window_primes
            .iter()
            .map(|&p| {
                let w = 1.0 / (p - 1) as f64;
                w * (1.0 - w)
            })
            .sum::<f64>()
            .sqrt()
    }

    pub fn measure_table(&self) -> Vec<ShiftedMeasureRow> {
        (0..self.cells.len())
            .map(|mask| ShiftedMeasureRow {
                mask,
                k: self.divisor(mask),
                cell: self.cells[mask],
                nu_star: self.nu_star(mask),
                mu_star_literal: self.mu_star_literal(mask),
                mu_star_normalized: self.mu_star_normalized(mask),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShiftedMeasureRow {
    pub mask: usize,
    #[serde(serialize_with = "crate::serde_util::biguint_dec")]
    pub k: Natural,
    pub cell: u64,
    #[serde(serialize_with = "crate::serde_util::rational_frac")]
    pub nu_star: Rational,
    #[serde(serialize_with = "crate::serde_util::rational_frac")]
    pub mu_star_literal: Rational,
    #[serde(serialize_with = "crate::serde_util::rational_frac")]
    pub mu_star_normalized: Rational,
}

/// Builds the shifted model from the toy modulus `M` (any squarefree
/// stand-in coprime to the window), the translate `m0`, the shift `u`, the
/// half-open `r` range `(lo, hi]` and the prime window `(lo, hi]`.
pub fn build_shifted(
    modulus: u64,
    m0: u64,
    shift: u64,
    r_range: (u64, u64),
    window: (u64, u64),
) -> Result<ShiftedModel> {
    if modulus < 1 || m0 < 1 {
        return Err(Error::domain("build_shifted requires M >= 1 and m0 >= 1"));
    }
    if num_integer::gcd(m0, modulus) != 1 {
        return Err(Error::domain("build_shifted requires gcd(m0, M) = 1"));
    }
    if r_range.0 >= r_range.1 {
        return Err(Error::domain("empty r range"));
    }
    if window.0 > window.1 {
        return Err(Error::domain("invalid prime window"));
    }
    let window_primes: Vec<u64> = sieve_primes(window.1)?
        .range(window.0 + 1, window.1)
        .to_vec();
    if window_primes.len() > MAX_MODEL_PRIMES {
        return Err(Error::resource(format!(
            "{} window primes exceed the {}-prime cell ceiling",
            window_primes.len(),
            MAX_MODEL_PRIMES
        )));
    }
    for &p in &window_primes {
        if modulus % p == 0 {
            return Err(Error::domain(format!(
                "window prime {} divides the modulus {}",
                p, modulus
            )));
        }
    }
    let mut roster = Vec::new();
    for r in r_range.0 + 1..=r_range.1 {
        let m1 = r
            .checked_mul(modulus)
            .and_then(|rm| rm.checked_add(m0))
            .ok_or_else(|| Error::resource("roster value overflows u64"))?;
        if is_prime_u64(m1) {
            let m2 = m1
                .checked_add(shift)
                .ok_or_else(|| Error::resource("roster value overflows u64"))?;
            roster.push(m2);
        }
    }
    if roster.is_empty() {
        return Err(Error::domain(
            "empty roster: no m0 + r M is prime in the given range",
        ));
    }
    let mut cells = vec![0u64; 1 << window_primes.len()];
    for &m in &roster {
        let mut mask = 0usize;
        for (i, &p) in window_primes.iter().enumerate() {
            if m % p == 0 {
                mask |= 1 << i;
            }
        }
        cells[mask] += 1;
    }
    Ok(ShiftedModel {
        modulus,
        m0,
        shift,
        r_range,
        window,
        window_primes,
        roster,
        cells,
    })
}

/// Number of window primes dividing `m`. Total as a counting function; the
/// model only gives it measure-theoretic meaning on roster elements.
pub fn eta_star(model: &ShiftedModel, m: u64) -> u64 {
    model
        .window_primes
        .iter()
        .filter(|&&p| m % p == 0)
        .count() as u64
}

/// Distinct prime factors of `m` in `(lo, hi]`; the tail that separates
/// `omega_star` from `eta_star`.
pub fn window_defect(m: u64, lo: u64, hi: u64) -> Result<u64> {
    if lo >= hi {
        return Err(Error::domain("window_defect requires lo < hi"));
    }
    Ok(factorize(m)
        .into_iter()
        .filter(|&(p, _)| p > lo && p <= hi)
        .count() as u64)
}

/// Outcome of a seeded Monte Carlo run of the normalized independent model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CltReport {
    pub n_samples: u64,
    pub seed: u64,
    pub centering: f64,
    pub scale: f64,
    pub alpha: f64,
    pub eps: f64,
    pub in_count: u64,
    pub empirical_fraction: f64,
    pub gaussian_mass: f64,
    /// `sqrt(mass (1 - mass) / n)`: the binomial standard error around the
    /// Gaussian target.
    pub binomial_se: f64,
}

const SIM_BATCH: u64 = 1024;

/// Draws `eta_star` as a sum of independent Bernoulli(`1/(p-1)`) variables
/// over the window primes, forms `(eta - centering) / scale` and counts
/// landings in the open interval `(alpha - eps, alpha + eps)`.
///
/// Sampling is batched: batch `b` uses stream `b` of a ChaCha generator
/// seeded with `seed`, so the outcome is bit-identical for every thread
/// count and across runs.
pub fn simulate_clt(
    model: &ShiftedModel,
    centering: f64,
    scale: f64,
    alpha: f64,
    eps: f64,
    n_samples: u64,
    seed: u64,
) -> Result<CltReport> {
    if !(scale > 0.0) {
        return Err(Error::domain("simulate_clt requires scale > 0"));
    }
    if n_samples < 1_000 {
        return Err(Error::domain("simulate_clt requires at least 10^3 samples"));
    }
    let mass = crate::additive::gaussian_mass(alpha, eps)?;
    let weights: Vec<f64> = model
        .window_primes
        .iter()
        .map(|&p| 1.0 / (p - 1) as f64)
        .collect();
    let n_batches = n_samples.div_ceil(SIM_BATCH);
    let in_count: u64 = (0..n_batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let lo = b * SIM_BATCH;
            let hi = ((b + 1) * SIM_BATCH).min(n_samples);
            let mut hits = 0u64;
            for _ in lo..hi {
                let mut eta = 0u64;
                for &w in &weights {
                    if rng.random::<f64>() < w {
                        eta += 1;
                    }
                }
                let t = (eta as f64 - centering) / scale;
                if t > alpha - eps && t < alpha + eps {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    Ok(CltReport {
        n_samples,
        seed,
        centering,
        scale,
        alpha,
        eps,
        in_count,
        empirical_fraction: in_count as f64 / n_samples as f64,
        gaussian_mass: mass,
        binomial_se: (mass * (1.0 - mass) / n_samples as f64).sqrt(),
    })
}
