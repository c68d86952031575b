//! Prime-gap enumeration, merit statistics, the historical growth-bound
//! evaluators, and the survey joining large-merit gaps with the
//! `omega_star` statistic.

use serde::Serialize;

use crate::additive::{gaussian_mass, omega_star};
use crate::primes::{sieve_primes, sieve_primes_with, SieveOptions};
use crate::{Error, Result};

/// One consecutive-prime gap. The merit is the gap normalized by the local
/// average spacing, `d / ln p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapRecord {
    /// 1-based gap index: record 1 is the gap from 2 to 3.
    pub index: u64,
    pub lower: u64,
    pub upper: u64,
    pub gap: u64,
    pub merit: f64,
}

/// Running merit statistics over the first `floor(x)` gaps: the mean `A`,
/// the maximum `G`, and where the maximum occurs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapStatistic {
    pub x: f64,
    pub mean_merit: f64,
    pub max_merit: f64,
    /// Smallest gap index attaining `max_merit`.
    pub argmax_index: u64,
}

/// Named lower-bound shapes for the largest gap below `x`, all evaluated
/// with natural logarithms and no implied constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GrowthVariant {
    /// `ln x * ln_3 x / ln_4 x`
    Westzynthius,
    /// `ln x * ln_2 x / (ln_3 x)^2`
    Erdos,
    /// `ln x * ln_2 x * ln_4 x / (ln_3 x)^2`
    Rankin,
    /// `ln x * ln_2 x * ln_4 x / ln_3 x`
    Fgkmt,
}

impl GrowthVariant {
    pub const ALL: [GrowthVariant; 4] = [
        GrowthVariant::Westzynthius,
        GrowthVariant::Erdos,
        GrowthVariant::Rankin,
        GrowthVariant::Fgkmt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GrowthVariant::Westzynthius => "westzynthius",
            GrowthVariant::Erdos => "erdos",
            GrowthVariant::Rankin => "rankin",
            GrowthVariant::Fgkmt => "fgkmt",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "westzynthius" => Ok(GrowthVariant::Westzynthius),
            "erdos" => Ok(GrowthVariant::Erdos),
            "rankin" => Ok(GrowthVariant::Rankin),
            "fgkmt" => Ok(GrowthVariant::Fgkmt),
            other => Err(Error::domain(format!("unknown growth variant: {}", other))),
        }
    }
}

/// One surveyed gap: the `omega_star` value at `lower + shift` and the
/// centered, scaled statistic `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TheoremSample {
    pub record: GapRecord,
    pub shift: u64,
    pub omega_star: u64,
    /// `(omega_star(p + shift) - ln ln p) / sqrt(ln ln p)`
    pub t: f64,
}

/// Survey of every gap with merit at or above a threshold, with the
/// empirical fraction of `t` values landing in `(alpha - eps, alpha + eps)`
/// next to the Gaussian mass of the same interval.
#[derive(Debug, Clone, Serialize)]
pub struct SurveyReport {
    pub samples: Vec<TheoremSample>,
    pub alpha: f64,
    pub eps: f64,
    pub fraction_in_interval: f64,
    pub gaussian_mass: f64,
    /// Gaps whose merit qualified but whose shifted value is below the
    /// `omega_star` domain (`p + u < 20`) or whose `ln ln p` is not positive.
    pub skipped: u64,
}

/// All gaps whose upper prime is `<= limit`, in increasing order.
pub fn scan_gaps(limit: u64) -> Result<Vec<GapRecord>> {
    scan_gaps_with(limit, &SieveOptions::default())
}

pub fn scan_gaps_with(limit: u64, opts: &SieveOptions) -> Result<Vec<GapRecord>> {
    if limit < 3 {
        return Err(Error::domain("scan_gaps requires limit >= 3"));
    }
    let table = sieve_primes_with(limit, opts)?;
    Ok(records_from_primes(table.primes()))
}

fn records_from_primes(primes: &[u64]) -> Vec<GapRecord> {
    primes
        .windows(2)
        .enumerate()
        .map(|(i, w)| gap_record(i as u64 + 1, w[0], w[1]))
        .collect()
}

fn gap_record(index: u64, lower: u64, upper: u64) -> GapRecord {
    let gap = upper - lower;
    GapRecord {
        index,
        lower,
        upper,
        gap,
        merit: gap as f64 / (lower as f64).ln(),
    }
}

/// Mean and maximum merit over the first `floor(x)` gaps.
///
/// "n <= x" counts gap indices, so `x = 4` covers the gaps ending at 3, 5,
/// 7 and 11. The mean divides by `floor(x)`.
pub fn merit_stats(x: f64) -> Result<GapStatistic> {
    if !(x >= 1.0) {
        return Err(Error::domain("merit_stats requires x >= 1"));
    }
    let count = x.floor() as u64;
    let primes = first_primes(count + 1)?;
    let mut sum = 0.0;
    let mut max = f64::NEG_INFINITY;
    let mut argmax = 0u64;
    for (i, w) in primes.windows(2).take(count as usize).enumerate() {
        let merit = (w[1] - w[0]) as f64 / (w[0] as f64).ln();
        sum += merit;
        if merit > max {
            max = merit;
            argmax = i as u64 + 1;
        }
    }
    Ok(GapStatistic {
        x,
        mean_merit: sum / count as f64,
        max_merit: max,
        argmax_index: argmax,
    })
}

/// At least the first `n` primes.
fn first_primes(n: u64) -> Result<Vec<u64>> {
    // p_n < n (ln n + ln ln n) for n >= 6; round up generously below that.
    let mut bound = if n < 6 {
        16
    } else {
        let nf = n as f64;
        (nf * (nf.ln() + nf.ln().ln())).ceil() as u64 + 16
    };
    loop {
        let table = sieve_primes(bound)?;
        if table.len() as u64 >= n {
            let mut primes = table.primes().to_vec();
            primes.truncate(n as usize);
            return Ok(primes);
        }
        bound = bound.saturating_mul(2);
    }
}

/// Iterated natural logarithm `ln_k x` with positivity checks on the way.
pub fn iterated_log(x: f64, k: u32) -> Result<f64> {
    let mut value = x;
    for level in 1..=k {
        if !(value > 0.0) {
            return Err(Error::domain(format!(
                "iterated log undefined: ln_{} requires ln_{} > 0 (x = {})",
                level,
                level - 1,
                x
            )));
        }
        value = value.ln();
    }
    Ok(value)
}

/// Evaluates the named growth expression at `x`.
pub fn growth_bound(x: f64, variant: GrowthVariant) -> Result<f64> {
    growth_bound_from_log(iterated_log(x, 1)?, variant)
}

/// Same, but takes `ln x` directly so towers like `x = e^(e^(e^e))` stay
/// representable.
pub fn growth_bound_from_log(log_x: f64, variant: GrowthVariant) -> Result<f64> {
    let l1 = log_x;
    let l2 = iterated_log(l1, 1)?;
    let l3 = iterated_log(l1, 2)?;
    let positive = |v: f64, name: &str| -> Result<f64> {
        if v > 0.0 {
            Ok(v)
        } else {
            Err(Error::domain(format!(
                "growth bound needs {} > 0 (got {})",
                name, v
            )))
        }
    };
    match variant {
        GrowthVariant::Westzynthius => {
            let l4 = iterated_log(l1, 3)?;
            Ok(positive(l1, "ln x")? * positive(l3, "ln_3 x")? / positive(l4, "ln_4 x")?)
        }
        GrowthVariant::Erdos => {
            let l3 = positive(l3, "ln_3 x")?;
            Ok(positive(l1, "ln x")? * positive(l2, "ln_2 x")? / (l3 * l3))
        }
        GrowthVariant::Rankin => {
            let l4 = iterated_log(l1, 3)?;
            let l3 = positive(l3, "ln_3 x")?;
            Ok(positive(l1, "ln x")? * positive(l2, "ln_2 x")? * positive(l4, "ln_4 x")?
                / (l3 * l3))
        }
        GrowthVariant::Fgkmt => {
            let l4 = iterated_log(l1, 3)?;
            Ok(positive(l1, "ln x")? * positive(l2, "ln_2 x")? * positive(l4, "ln_4 x")?
                / positive(l3, "ln_3 x")?)
        }
    }
}

/// Surveys gaps with merit `>= merit_threshold` (ties included) and upper
/// prime `<= limit`, computing `omega_star(lower + shift)` and the
/// normalized statistic for each.
///
/// The centering uses `ln ln p` of the gap's lower prime; at any scale where
/// the survey says something, `ln ln (p + shift)` is numerically identical.
/// Gaps with `lower + shift < 20` or `lower <= e` carry no statistic and are
/// counted in `skipped`.
pub fn theorem_survey(
    limit: u64,
    merit_threshold: f64,
    shift: u64,
    alpha: f64,
    eps: f64,
) -> Result<SurveyReport> {
    if limit < 100 {
        return Err(Error::domain("theorem_survey requires limit >= 100"));
    }
    if shift < 1 {
        return Err(Error::domain("theorem_survey requires u >= 1"));
    }
    let mass = gaussian_mass(alpha, eps)?;
    let mut samples = Vec::new();
    let mut skipped = 0u64;
    for record in scan_gaps(limit)? {
        if record.merit < merit_threshold {
            continue;
        }
        let m = record.lower + shift;
        let loglog = (record.lower as f64).ln().ln();
        if m < 20 || !(loglog > 0.0) {
            skipped += 1;
            continue;
        }
        let profile = omega_star(m)?;
        let t = (profile.omega_star as f64 - loglog) / loglog.sqrt();
        samples.push(TheoremSample {
            record,
            shift,
            omega_star: profile.omega_star,
            t,
        });
    }
    let in_interval = samples
        .iter()
        .filter(|s| s.t > alpha - eps && s.t < alpha + eps)
        .count();
    let fraction = if samples.is_empty() {
        0.0
    } else {
        in_interval as f64 / samples.len() as f64
    };
    Ok(SurveyReport {
        samples,
        alpha,
        eps,
        fraction_in_interval: fraction,
        gaussian_mass: mass,
        skipped,
    })
}

/// Records where the gap exceeds every earlier gap; the classical
/// "maximal gap" table.
pub fn maximal_gap_table(records: &[GapRecord]) -> Vec<GapRecord> {
    let mut best = 0u64;
    let mut table = Vec::new();
    for r in records {
        if r.gap > best {
            best = r.gap;
            table.push(*r);
        }
    }
    table
}
