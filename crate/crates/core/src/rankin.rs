//! The Erdős–Rankin construction at desk scale: residue classes covering
//! `(0, y]`, the CRT translate that turns a cover into a run of consecutive
//! composites, sifted windows, survivor counts over the prime window
//! `(x, y]`, the derived-parameter bundle, and the k-th-power class variants.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::primes::{euler_phi, is_prime, is_prime_u64, sieve_primes};
use crate::{Error, Natural, Result};

/// Product-of-moduli ceiling for the exhaustive cover search.
pub const DEFAULT_COVER_SEARCH_CEILING: u128 = 1_000_000_000;

/// One sieving class `h (mod p)` with prime modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ResidueClass {
    #[serde(rename = "p")]
    pub modulus: u64,
    #[serde(rename = "h")]
    pub residue: u64,
}

impl ResidueClass {
    pub fn new(modulus: u64, residue: u64) -> Result<Self> {
        if !is_prime_u64(modulus) {
            return Err(Error::domain(format!(
                "residue class modulus {} is not prime",
                modulus
            )));
        }
        if residue >= modulus {
            return Err(Error::domain(format!(
                "residue {} not reduced mod {}",
                residue, modulus
            )));
        }
        Ok(ResidueClass { modulus, residue })
    }

    pub fn hits(&self, v: u64) -> bool {
        v % self.modulus == self.residue
    }
}

/// A choice of at most one class per prime `p < x`, together with the part
/// of `(0, y]` it covers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoveringAssignment {
    pub x: u64,
    pub y: u64,
    /// Sorted by modulus; at most one class per prime.
    pub classes: Vec<ResidueClass>,
    pub uncovered: Vec<u64>,
}

impl CoveringAssignment {
    /// Builds an assignment from explicit classes, validating moduli and
    /// recomputing the covered set.
    pub fn from_classes(x: u64, y: u64, mut classes: Vec<ResidueClass>) -> Result<Self> {
        if x < 3 || y < 1 {
            return Err(Error::domain("covering assignment needs x >= 3, y >= 1"));
        }
        classes.sort_by_key(|c| c.modulus);
        for w in classes.windows(2) {
            if w[0].modulus == w[1].modulus {
                return Err(Error::domain(format!(
                    "two classes share the modulus {}",
                    w[0].modulus
                )));
            }
        }
        for c in &classes {
            if c.modulus >= x {
                return Err(Error::domain(format!(
                    "class modulus {} is not below x = {}",
                    c.modulus, x
                )));
            }
            if c.residue >= c.modulus {
                return Err(Error::domain("class residue not reduced"));
            }
            if !is_prime_u64(c.modulus) {
                return Err(Error::domain(format!(
                    "class modulus {} is not prime",
                    c.modulus
                )));
            }
        }
        let uncovered = uncovered_of(y, &classes);
        Ok(CoveringAssignment {
            x,
            y,
            classes,
            uncovered,
        })
    }

    pub fn is_full_cover(&self) -> bool {
        self.uncovered.is_empty()
    }

    pub fn covered_count(&self) -> u64 {
        self.y - self.uncovered.len() as u64
    }

    /// How many elements of `(0, y]` the class of `p` hits.
    pub fn hitting_number(&self, p: u64) -> u64 {
        self.classes
            .iter()
            .find(|c| c.modulus == p)
            .map(|c| class_hits(c.residue, c.modulus, self.y))
            .unwrap_or(0)
    }
}

fn uncovered_of(y: u64, classes: &[ResidueClass]) -> Vec<u64> {
    (1..=y)
        .filter(|&v| !classes.iter().any(|c| c.hits(v)))
        .collect()
}

/// Elements of `(0, y]` in the class `h (mod p)`.
fn class_hits(h: u64, p: u64, y: u64) -> u64 {
    if h == 0 {
        y / p
    } else if h <= y {
        (y - h) / p + 1
    } else {
        0
    }
}

/// Options shared by the cover-construction searches.
#[derive(Debug, Clone)]
pub struct CoverOptions {
    /// Whether `h = 0` classes may be used. The default is `false`: the CRT
    /// translate needs `m0 = -h (mod p)` coprime to the primorial, which a
    /// zero residue destroys.
    pub allow_zero: bool,
    /// Exhaustive search refuses to run past this product of moduli.
    pub search_ceiling: u128,
}

impl Default for CoverOptions {
    fn default() -> Self {
        CoverOptions {
            allow_zero: false,
            search_ceiling: DEFAULT_COVER_SEARCH_CEILING,
        }
    }
}

/// Greedy cover of `(0, y]` by classes over primes `p < x`.
///
/// Each step scans the still-unassigned primes, finds for each the residue
/// hitting the most uncovered elements (ties to the smallest residue), and
/// assigns the best prime (ties to the smallest prime). Stops on full cover
/// or when primes run out; a partial cover is a valid result.
pub fn greedy_cover(x: u64, y: u64) -> Result<CoveringAssignment> {
    greedy_cover_with(x, y, &CoverOptions::default())
}

pub fn greedy_cover_with(x: u64, y: u64, opts: &CoverOptions) -> Result<CoveringAssignment> {
    if x < 3 {
        return Err(Error::domain("greedy_cover requires x >= 3"));
    }
    if y < 1 {
        return Err(Error::domain("greedy_cover requires y >= 1"));
    }
    let primes: Vec<u64> = sieve_primes(x - 1)?.primes().to_vec();
    let mut covered = vec![false; y as usize + 1];
    let mut remaining = y;
    let mut unassigned: Vec<u64> = primes;
    let mut classes: Vec<ResidueClass> = Vec::new();

    while remaining > 0 && !unassigned.is_empty() {
        let mut best: Option<(u64, usize, u64)> = None; // (hits, prime index, residue)
        for (i, &p) in unassigned.iter().enumerate() {
            let start = if opts.allow_zero { 0 } else { 1 };
            for h in start..p {
                let hits = count_uncovered_hits(h, p, y, &covered);
                let candidate = (hits, i, h);
                best = Some(match best {
                    None => candidate,
                    Some(b) => {
                        // Highest hits; then smallest prime; then smallest
                        // residue. Primes are scanned ascending, residues
                        // ascending, so strict improvement is enough.
                        if hits > b.0 {
                            candidate
                        } else {
                            b
                        }
                    }
                });
            }
        }
        let (hits, idx, residue) = best.expect("unassigned primes nonempty");
        if hits == 0 {
            break;
        }
        let p = unassigned.remove(idx);
        let mut v = if residue == 0 { p } else { residue };
        while v <= y {
            if !covered[v as usize] {
                covered[v as usize] = true;
                remaining -= 1;
            }
            v += p;
        }
        classes.push(ResidueClass {
            modulus: p,
            residue,
        });
    }
    CoveringAssignment::from_classes(x, y, classes)
}

fn count_uncovered_hits(h: u64, p: u64, y: u64, covered: &[bool]) -> u64 {
    let mut v = if h == 0 { p } else { h };
    let mut hits = 0;
    while v <= y {
        if !covered[v as usize] {
            hits += 1;
        }
        v += p;
    }
    hits
}

/// Exhaustive search for a full cover, returning the lexicographically
/// least residue tuple over the primes `p < x` in ascending order, or
/// `None` when no full cover exists.
///
/// Branches on the residue of the largest prime in parallel; the least
/// tuple is selected after a full join, so the result is deterministic.
pub fn exhaustive_cover(x: u64, y: u64) -> Result<Option<CoveringAssignment>> {
    exhaustive_cover_with(x, y, &CoverOptions::default())
}

pub fn exhaustive_cover_with(
    x: u64,
    y: u64,
    opts: &CoverOptions,
) -> Result<Option<CoveringAssignment>> {
    if x < 3 {
        return Err(Error::domain("exhaustive_cover requires x >= 3"));
    }
    if y < 1 {
        return Err(Error::domain("exhaustive_cover requires y >= 1"));
    }
    let primes: Vec<u64> = sieve_primes(x - 1)?.primes().to_vec();
    let mut product: u128 = 1;
    for &p in &primes {
        product = product.saturating_mul(p as u128);
    }
    if product > opts.search_ceiling {
        return Err(Error::resource(format!(
            "cover search space {} exceeds ceiling {}",
            product, opts.search_ceiling
        )));
    }
    // A class of p hits at most ceil(y/p) elements, so a cover is impossible
    // unless the capacities add up to y.
    let capacity: u64 = primes.iter().map(|&p| y.div_ceil(p)).sum();
    if capacity < y {
        return Ok(None);
    }

    let (last, rest) = primes.split_last().expect("x >= 3 gives a prime");
    let residues: Vec<u64> = residue_range(*last, opts.allow_zero).collect();
    let best = residues
        .into_par_iter()
        .filter_map(|h_last| {
            let mut covered = vec![false; y as usize + 1];
            let mut remaining = y;
            mark(h_last, *last, y, &mut covered, &mut remaining);
            let mut chosen = vec![0u64; rest.len()];
            if dfs_cover(rest, 0, y, &mut covered, remaining, &mut chosen, opts.allow_zero) {
                chosen.push(h_last);
                Some(chosen)
            } else {
                None
            }
        })
        .min();
    match best {
        None => Ok(None),
        Some(tuple) => {
            let classes = primes
                .iter()
                .zip(&tuple)
                .map(|(&p, &h)| ResidueClass {
                    modulus: p,
                    residue: h,
                })
                .collect();
            let assignment = CoveringAssignment::from_classes(x, y, classes)?;
            debug_assert!(assignment.is_full_cover());
            Ok(Some(assignment))
        }
    }
}

fn residue_range(p: u64, allow_zero: bool) -> std::ops::Range<u64> {
    if allow_zero {
        0..p
    } else {
        1..p
    }
}

fn mark(h: u64, p: u64, y: u64, covered: &mut [bool], remaining: &mut u64) -> Vec<u64> {
    let mut v = if h == 0 { p } else { h };
    let mut marked = Vec::new();
    while v <= y {
        if !covered[v as usize] {
            covered[v as usize] = true;
            *remaining -= 1;
            marked.push(v);
        }
        v += p;
    }
    marked
}

fn dfs_cover(
    primes: &[u64],
    idx: usize,
    y: u64,
    covered: &mut Vec<bool>,
    remaining: u64,
    chosen: &mut Vec<u64>,
    allow_zero: bool,
) -> bool {
    if remaining == 0 {
        // Fill the unconstrained tail with the least allowed residues.
        for (slot, &p) in chosen.iter_mut().zip(primes).skip(idx).take(primes.len() - idx) {
            *slot = if allow_zero { 0 } else { 1 };
            let _ = p;
        }
        return true;
    }
    if idx == primes.len() {
        return false;
    }
    let capacity: u64 = primes[idx..].iter().map(|&p| y.div_ceil(p)).sum();
    if capacity < remaining {
        return false;
    }
    let p = primes[idx];
    for h in residue_range(p, allow_zero) {
        let mut rem = remaining;
        let marked = mark(h, p, y, covered, &mut rem);
        chosen[idx] = h;
        if dfs_cover(primes, idx + 1, y, covered, rem, chosen, allow_zero) {
            return true;
        }
        for v in marked {
            covered[v as usize] = false;
        }
    }
    false
}

/// The translate `m0` of a covering assignment: `m0 = -h_p (mod p)` for
/// every assigned prime, `m0 = 1 (mod p)` for the unassigned primes below
/// `x`, reduced into `[1, P(x))`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrtSolution {
    #[serde(rename = "M", serialize_with = "crate::serde_util::biguint_dec")]
    pub modulus: Natural,
    #[serde(serialize_with = "crate::serde_util::biguint_dec")]
    pub m0: Natural,
}

/// Solves the congruence system attached to a cover. Classes with `h = 0`
/// are rejected: they force `p | m0` and destroy the coprimality that the
/// composite-run argument needs.
pub fn crt_solve(assignment: &CoveringAssignment) -> Result<CrtSolution> {
    for c in &assignment.classes {
        if c.residue == 0 {
            return Err(Error::domain(format!(
                "class 0 (mod {}) forces {} | m0; coprimality to the primorial is impossible",
                c.modulus, c.modulus
            )));
        }
    }
    let primes: Vec<u64> = sieve_primes(assignment.x - 1)?.primes().to_vec();
    let mut residues: Vec<(u64, u64)> = Vec::with_capacity(primes.len());
    for &p in &primes {
        match assignment.classes.iter().find(|c| c.modulus == p) {
            Some(c) => residues.push((p, p - c.residue)),
            // Unassigned primes get 1, which is never -1-like zero, so the
            // solution stays coprime to the full primorial.
            None => residues.push((p, 1)),
        }
    }
    let (m0, modulus) = crt_combine(&residues);
    debug_assert!(m0 >= BigUint::one() && m0 < modulus);
    Ok(CrtSolution { modulus, m0 })
}

/// CRT for pairwise-coprime prime moduli.
fn crt_combine(residues: &[(u64, u64)]) -> (Natural, Natural) {
    let mut m = BigInt::from(residues[0].1);
    let mut modulus = BigInt::from(residues[0].0);
    for &(p, r) in &residues[1..] {
        let p_big = BigInt::from(p);
        let r_big = BigInt::from(r);
        // m + modulus * t = r (mod p)
        let inv = mod_inverse(&modulus, &p_big).expect("prime moduli are coprime");
        let t = ((&r_big - &m) * inv).mod_floor(&p_big);
        m += &modulus * t;
        modulus *= p_big;
        m = m.mod_floor(&modulus);
    }
    (
        m.to_biguint().expect("mod_floor keeps the value nonnegative"),
        modulus.to_biguint().expect("positive modulus"),
    )
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// Result of checking a composite run of length `y` at a representative of
/// `m0 (mod M)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunVerdict {
    /// Least representative above `y`; it lies in `(y, y + M]`.
    #[serde(serialize_with = "crate::serde_util::biguint_dec")]
    pub representative: Natural,
    pub run_ok: bool,
    /// First `v` with `representative + v` prime, if the run fails.
    pub first_failure: Option<u64>,
    /// The same check at the canonical representative in `[1, M]`; small
    /// translates routinely fail it, which is exactly why the
    /// representative above `y` is the one that matters.
    pub canonical_ok: bool,
    pub canonical_first_failure: Option<u64>,
}

/// Verifies that `m + v` is composite for `1 <= v <= y` where `m` is the
/// least representative of `m0 (mod M)` exceeding `y`; also reports the
/// same check for the canonical representative.
pub fn verify_composite_run(m0: &Natural, modulus: &Natural, y: u64) -> Result<RunVerdict> {
    if modulus.is_zero() {
        return Err(Error::domain("verify_composite_run: modulus must be positive"));
    }
    if m0.gcd(modulus) != BigUint::one() {
        return Err(Error::domain(
            "verify_composite_run requires gcd(m0, M) = 1",
        ));
    }
    let canonical = {
        let r = m0 % modulus;
        if r.is_zero() {
            modulus.clone()
        } else {
            r
        }
    };
    let y_big = BigUint::from(y);
    let representative = if canonical > y_big {
        canonical.clone()
    } else {
        let steps = (&y_big - &canonical) / modulus + BigUint::one();
        &canonical + steps * modulus
    };
    let (canonical_ok, canonical_first_failure) = run_check(&canonical, y);
    let (run_ok, first_failure) = if representative == canonical {
        (canonical_ok, canonical_first_failure)
    } else {
        run_check(&representative, y)
    };
    Ok(RunVerdict {
        representative,
        run_ok,
        first_failure,
        canonical_ok,
        canonical_first_failure,
    })
}

fn run_check(m: &Natural, y: u64) -> (bool, Option<u64>) {
    for v in 1..=y {
        let candidate = m + BigUint::from(v);
        if candidate <= BigUint::one() || is_prime(&candidate) {
            return (false, Some(v));
        }
    }
    (true, None)
}

/// An interval with the members of the given classes struck out.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SievedWindow {
    pub lo: u64,
    pub hi: u64,
    pub classes: Vec<ResidueClass>,
    pub survivors: Vec<u64>,
}

/// Survivors of `[lo, hi]` after removing every `v = h (mod p)`.
pub fn sifted_set(lo: u64, hi: u64, classes: &[ResidueClass]) -> Result<SievedWindow> {
    if lo > hi {
        return Err(Error::domain("sifted_set requires lo <= hi"));
    }
    let survivors = (lo..=hi)
        .filter(|&v| !classes.iter().any(|c| c.hits(v)))
        .collect();
    Ok(SievedWindow {
        lo,
        hi,
        classes: classes.to_vec(),
        survivors,
    })
}

/// Count of primes in `(x, y]` avoiding both class families, reported next
/// to `x / ln x` for comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurvivorReport {
    pub x: u64,
    pub y: u64,
    pub count: u64,
    pub x_over_log_x: f64,
    pub survivors: Vec<u64>,
}

pub fn survivor_count(
    x: u64,
    y: u64,
    a: &[ResidueClass],
    b: &[ResidueClass],
) -> Result<SurvivorReport> {
    if y < x {
        return Err(Error::domain("survivor_count requires y >= x"));
    }
    let table = sieve_primes(y)?;
    let survivors: Vec<u64> = table
        .range(x + 1, y)
        .iter()
        .copied()
        .filter(|&q| !a.iter().any(|c| c.hits(q)) && !b.iter().any(|c| c.hits(q)))
        .collect();
    Ok(SurvivorReport {
        x,
        y,
        count: survivors.len() as u64,
        x_over_log_x: x as f64 / (x as f64).ln(),
        survivors,
    })
}

/// Every derived parameter of the construction at `x`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelParams {
    pub x: f64,
    pub c0: f64,
    /// `C0 * x * ln x * ln_3 x / ln_2 x`
    pub y: f64,
    /// `x^(ln_3 x / (4 ln_2 x))`
    pub z: f64,
    /// Smooth-prime window `((ln x)^20, z]`
    pub s_window: (f64, f64),
    /// `(x/2, x]`
    pub p_window: (f64, f64),
    /// `(x, y]`
    pub q_window: (f64, f64),
    /// `(ln x)^2`
    pub g0: f64,
    /// `(ln x)^2 / (ln ln x)^(1/3)`
    pub sigma1: f64,
    /// `(ln x)^2 / (ln ln x)^(1/6)`
    pub sigma2: f64,
    /// `ln P(x)`, when the primorial is within sieve reach.
    pub ln_primorial: Option<f64>,
    /// `ln H = sigma1 * ln P(x)`
    pub ln_h: Option<f64>,
    /// `ln xi = sigma2 * ln P(x) / 2`
    pub ln_xi: Option<f64>,
}

/// Threshold below which `params` refuses to run without the toy flag:
/// `e^(e^e)`, where `ln_4` turns positive.
pub fn params_strict_threshold() -> f64 {
    1.0f64.exp().exp().exp()
}

const PRIMORIAL_LOG_REACH: f64 = 2e7;

/// Derives `y`, `z`, the three prime windows and the modulus exponents at
/// `x`. Full-strength mode insists on `x > e^(e^e)`; the toy flag lowers
/// the bar to `x > e` so small experiments can still get numbers.
pub fn params(x: f64, c0: f64, allow_toy: bool) -> Result<ModelParams> {
    if !allow_toy && !(x > params_strict_threshold()) {
        return Err(Error::domain(format!(
            "params requires x > e^(e^e) ~ {:.4e}; pass the toy flag to override",
            params_strict_threshold()
        )));
    }
    let l1 = crate::gaps::iterated_log(x, 1)?;
    let l2 = crate::gaps::iterated_log(x, 2)?;
    let l3 = crate::gaps::iterated_log(x, 3)?;
    let y = c0 * x * l1 * l3 / l2;
    let z = x.powf(l3 / (4.0 * l2));
    let g0 = l1 * l1;
    let sigma1 = g0 / l2.cbrt();
    let sigma2 = g0 / l2.powf(1.0 / 6.0);
    let ln_primorial = if x <= PRIMORIAL_LOG_REACH {
        let table = sieve_primes(x.floor() as u64)?;
        Some(
            table
                .primes()
                .iter()
                .take_while(|&&p| (p as f64) < x)
                .map(|&p| (p as f64).ln())
                .sum(),
        )
    } else {
        None
    };
    Ok(ModelParams {
        x,
        c0,
        y,
        z,
        s_window: (l1.powi(20), z),
        p_window: (x / 2.0, x),
        q_window: (x, y),
        g0,
        sigma1,
        sigma2,
        ln_primorial,
        ln_h: ln_primorial.map(|t| sigma1 * t),
        ln_xi: ln_primorial.map(|t| sigma2 * t / 2.0),
    })
}

/// The k-th-power residue `a = 1 - (c+1)^k (mod s)`; `c = -1 (mod s)` is
/// excluded because it would make the base row collide with the power
/// column.
pub fn kth_power_class(s: u64, c: u64, k: u64) -> Result<u64> {
    if !is_prime_u64(s) {
        return Err(Error::domain(format!("modulus {} is not prime", s)));
    }
    if c % s == s - 1 {
        return Err(Error::domain(format!(
            "c = {} is -1 (mod {}), which is excluded",
            c, s
        )));
    }
    let base = (c + 1) % s;
    let power = pow_mod_u64(base, k, s);
    Ok((1 + s - power) % s)
}

fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = (acc as u128 * base as u128 % m as u128) as u64;
        }
        base = (base as u128 * base as u128 % m as u128) as u64;
        exp >>= 1;
    }
    acc
}

/// Whether `a (mod s)` arises as `1 - (c+1)^k` for some admissible `c`.
pub fn class_in_power_family(class: &ResidueClass, k: u64) -> bool {
    (0..class.modulus)
        .filter(|&c| c != class.modulus - 1)
        .any(|c| kth_power_class(class.modulus, c, k).expect("c filtered") == class.residue)
}

/// Whether every component of the vector lies in the k-th-power family.
pub fn vector_in_power_family(classes: &[ResidueClass], k: u64) -> bool {
    classes.iter().all(|c| class_in_power_family(c, k))
}

/// The matrix entry `(m0 + 1 + r P)^k + v - 1`, exactly.
pub fn matrix_entry(m0: &Natural, primorial: &Natural, r: u64, v: u64, k: u32) -> Result<Natural> {
    if r < 1 || v < 1 {
        return Err(Error::domain("matrix_entry requires r >= 1 and v >= 1"));
    }
    let base = m0 + BigUint::one() + BigUint::from(r) * primorial;
    Ok(base.pow(k) + BigUint::from(v - 1))
}

/// Compositeness of the row entries for `2 <= v <= y`; the toy-scale
/// companion check for the matrix construction.
pub fn matrix_row_compositeness(
    m0: &Natural,
    primorial: &Natural,
    r: u64,
    k: u32,
    y: u64,
) -> Result<Vec<(u64, bool)>> {
    (2..=y)
        .map(|v| {
            let entry = matrix_entry(m0, primorial, r, v, k)?;
            Ok((v, entry > BigUint::one() && !is_prime(&entry)))
        })
        .collect()
}

/// The per-prime survivor bound comparison for `phi`: not part of the
/// construction, but handy when sizing windows.
pub fn phi_of(n: u64) -> u64 {
    euler_phi(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn classes(v: &[(u64, u64)]) -> Vec<ResidueClass> {
        v.iter()
            .map(|&(p, h)| ResidueClass::new(p, h).unwrap())
            .collect()
    }

    /// Oracle: plain nested enumeration of nonzero residue tuples over the
    /// primes below x, in lexicographic order, first full cover wins.
    fn oracle_lex_least_cover(primes: &[u64], y: u64) -> Option<Vec<u64>> {
        fn rec(primes: &[u64], idx: usize, y: u64, chosen: &mut Vec<u64>) -> Option<Vec<u64>> {
            if idx == primes.len() {
                let covered = (1..=y).all(|v| {
                    chosen
                        .iter()
                        .zip(primes)
                        .any(|(&h, &p)| v % p == h)
                });
                return if covered { Some(chosen.clone()) } else { None };
            }
            for h in 1..primes[idx] {
                chosen.push(h);
                if let Some(found) = rec(primes, idx + 1, y, chosen) {
                    return Some(found);
                }
                chosen.pop();
            }
            None
        }
        rec(primes, 0, y, &mut Vec::new())
    }

    #[test]
    fn greedy_cover_examples() {
        let full = greedy_cover(6, 4).unwrap();
        assert!(full.is_full_cover());
        assert!(full.classes.len() <= 3);

        let tiny = greedy_cover(3, 1).unwrap();
        assert!(tiny.is_full_cover());
        assert_eq!(tiny.classes, classes(&[(2, 1)]));

        let partial = greedy_cover(6, 6).unwrap();
        assert_eq!(partial.uncovered.len(), 1);
    }

    #[test]
    fn greedy_cover_reports_only_real_hits() {
        // Every covered element must actually be hit by an assigned class.
        for (x, y) in [(6u64, 4u64), (6, 6), (8, 9), (12, 12), (12, 20)] {
            let a = greedy_cover(x, y).unwrap();
            for v in 1..=y {
                let hit = a.classes.iter().any(|c| c.hits(v));
                let reported_uncovered = a.uncovered.contains(&v);
                assert_eq!(hit, !reported_uncovered, "x={} y={} v={}", x, y, v);
            }
        }
    }

    #[test]
    fn exhaustive_cover_matches_lex_oracle() {
        let found = exhaustive_cover(6, 5).unwrap().expect("coverable");
        assert!(found.is_full_cover());
        let oracle = oracle_lex_least_cover(&[2, 3, 5], 5).unwrap();
        let got: Vec<u64> = found.classes.iter().map(|c| c.residue).collect();
        assert_eq!(got, oracle);
        // The least tuple is (1, 1, 2): odds, 1 mod 3, 2 mod 5.
        assert_eq!(got, vec![1, 1, 2]);
    }

    #[test]
    fn exhaustive_cover_impossible_cases() {
        assert!(exhaustive_cover(6, 6).unwrap().is_none());
        assert_eq!(oracle_lex_least_cover(&[2, 3, 5], 6), None);
        // One class mod 2 cannot cover three elements.
        assert!(exhaustive_cover(3, 3).unwrap().is_none());
    }

    #[test]
    fn exhaustive_cover_respects_ceiling() {
        let opts = CoverOptions {
            allow_zero: false,
            search_ceiling: 10,
        };
        assert!(matches!(
            exhaustive_cover_with(8, 4, &opts),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn exhaustive_with_zero_allows_more_covers() {
        // (0, 0, 1) covers 1..4: evens, multiples of 3, then 1 mod 5. It is
        // lexicographically below every zero-free cover.
        let opts = CoverOptions {
            allow_zero: true,
            ..CoverOptions::default()
        };
        let found = exhaustive_cover_with(6, 4, &opts).unwrap().unwrap();
        assert!(found.is_full_cover());
        let got: Vec<u64> = found.classes.iter().map(|c| c.residue).collect();
        assert_eq!(got, vec![0, 0, 1]);
    }

    #[test]
    fn crt_solve_examples() {
        let a = CoveringAssignment::from_classes(6, 5, classes(&[(2, 1), (3, 2), (5, 4)])).unwrap();
        let sol = crt_solve(&a).unwrap();
        assert_eq!(sol.modulus, BigUint::from(30u32));
        assert_eq!(sol.m0, BigUint::from(1u32));

        // Prime 5 unassigned: m0 = 1 (2), 2 (3), 1 (5) -> 11. The sieving
        // primes are strictly below x, so x = 6 puts 5 in play.
        let b = CoveringAssignment::from_classes(6, 3, classes(&[(2, 1), (3, 1)])).unwrap();
        let sol_b = crt_solve(&b).unwrap();
        assert_eq!(sol_b.modulus, BigUint::from(30u32));
        assert_eq!(sol_b.m0, BigUint::from(11u32));

        let zero = CoveringAssignment::from_classes(3, 2, classes(&[(2, 0)])).unwrap();
        assert!(matches!(crt_solve(&zero), Err(Error::Domain(_))));
    }

    #[test]
    fn crt_solution_satisfies_congruences() {
        let a = CoveringAssignment::from_classes(12, 9, classes(&[(2, 1), (3, 2), (5, 1), (7, 3)]))
            .unwrap();
        let sol = crt_solve(&a).unwrap();
        for c in &a.classes {
            let p = BigUint::from(c.modulus);
            let want = BigUint::from(c.modulus - c.residue);
            assert_eq!(&sol.m0 % &p, want % &p, "p={}", c.modulus);
        }
        // Unassigned prime 11 got residue 1.
        assert_eq!(&sol.m0 % BigUint::from(11u32), BigUint::one());
        assert_eq!(sol.m0.gcd(&sol.modulus), BigUint::one());
    }

    #[test]
    fn verify_composite_run_examples() {
        let thirty = BigUint::from(30u32);
        let one = BigUint::from(1u32);
        let verdict = verify_composite_run(&one, &thirty, 5).unwrap();
        assert_eq!(verdict.representative, BigUint::from(31u32));
        assert!(verdict.run_ok);
        assert_eq!(verdict.first_failure, None);
        // The canonical representative 1 fails at once: 1 + 1 = 2 is prime.
        assert!(!verdict.canonical_ok);
        assert_eq!(verdict.canonical_first_failure, Some(1));

        let eleven = BigUint::from(11u32);
        let verdict2 = verify_composite_run(&eleven, &thirty, 2).unwrap();
        assert_eq!(verdict2.representative, BigUint::from(11u32));
        assert!(!verdict2.run_ok);
        assert_eq!(verdict2.first_failure, Some(2)); // 13 is prime

        let six = BigUint::from(6u32);
        assert!(matches!(
            verify_composite_run(&six, &thirty, 2),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn cover_to_run_pipeline_on_small_instances() {
        // The constructive heart: every exhaustive cover, pushed through the
        // CRT, certifies a run of y consecutive composites.
        for x in [4u64, 5, 6, 7, 8] {
            let mut y = 1;
            while let Some(cover) = exhaustive_cover(x, y).unwrap() {
                let sol = crt_solve(&cover).unwrap();
                let verdict = verify_composite_run(&sol.m0, &sol.modulus, y).unwrap();
                assert!(verdict.run_ok, "x={} y={}", x, y);
                y += 1;
            }
            assert!(y > 1, "x={} covered nothing", x);
        }
    }

    #[test]
    fn sifted_set_examples() {
        let evens = sifted_set(1, 10, &classes(&[(2, 0)])).unwrap();
        assert_eq!(evens.survivors, vec![1, 3, 5, 7, 9]);

        let two = sifted_set(1, 10, &classes(&[(2, 0), (3, 1)])).unwrap();
        assert_eq!(two.survivors, vec![3, 5, 9]);

        let point = sifted_set(5, 5, &classes(&[(5, 0)])).unwrap();
        assert!(point.survivors.is_empty());

        assert!(matches!(sifted_set(6, 5, &[]), Err(Error::Domain(_))));
    }

    #[test]
    fn survivor_count_examples() {
        let open = survivor_count(10, 30, &[], &[]).unwrap();
        assert_eq!(open.count, 6); // 11, 13, 17, 19, 23, 29

        let odd_killer = survivor_count(10, 30, &classes(&[(2, 1)]), &[]).unwrap();
        assert_eq!(odd_killer.count, 0);

        let one_class = survivor_count(10, 30, &classes(&[(3, 2)]), &[]).unwrap();
        assert_eq!(one_class.count, 2); // 13 and 19 survive
        assert_eq!(one_class.survivors, vec![13, 19]);
    }

    #[test]
    fn params_examples() {
        let x = 16f64.exp();
        let p = params(x, 1.0, false).unwrap();
        assert!((p.y / x - 5.885_27).abs() < 1e-3, "y/x = {}", p.y / x);
        assert_eq!(p.g0, 256.0);
        assert!((p.sigma1 - 256.0 / 2.772_588_722_239_781f64.cbrt()).abs() < 1e-9);
        // Primorial logs are in reach at this x.
        let theta = p.ln_primorial.unwrap();
        assert!(theta > 0.0);
        assert!((p.ln_h.unwrap() - p.sigma1 * theta).abs() < 1e-6);

        // Exactly at the threshold: refused without the toy flag.
        let boundary = params_strict_threshold();
        assert!(matches!(params(boundary, 1.0, false), Err(Error::Domain(_))));
        assert!(params(boundary, 1.0, true).is_ok());
        // The toy flag still needs the iterated logs to exist.
        assert!(matches!(params(2.0, 1.0, true), Err(Error::Domain(_))));
    }

    #[test]
    fn params_window_shapes() {
        let x = 16f64.exp();
        let p = params(x, 1.0, false).unwrap();
        assert_eq!(p.p_window, (x / 2.0, x));
        assert_eq!(p.q_window, (x, p.y));
        assert_eq!(p.s_window.1, p.z);
        assert_eq!(p.s_window.0, 16f64.powi(20));
    }

    #[test]
    fn kth_power_class_examples() {
        assert_eq!(kth_power_class(5, 1, 2).unwrap(), 2); // 1 - 4 = -3 = 2 (5)
        for (s, k) in [(5u64, 2u64), (7, 3), (11, 4)] {
            assert_eq!(kth_power_class(s, 0, k).unwrap(), 0);
        }
        assert!(matches!(kth_power_class(7, 6, 3), Err(Error::Domain(_))));
    }

    #[test]
    fn power_family_membership() {
        // k = 1: every residue arises as 1 - (c+1), except the one needing
        // c = -1, namely a = 1 - 0 ... c = s-1 maps to a = 1 - 0^1 = 1? No:
        // c runs over 0..s-2, c+1 over 1..s-1, a = 1-(c+1) covers all but 1.
        for a in 0..7u64 {
            let class = ResidueClass::new(7, a).unwrap();
            let expected = a != 1; // a = 1 would need (c+1)^1 = 0, i.e. c = -1
            assert_eq!(class_in_power_family(&class, 1), expected, "a={}", a);
        }
        // k = 2 (mod 5): (c+1)^2 ranges over {1, 4, 4, 1} for c = 0..3,
        // so a = 1 - q covers {0, 2}.
        let in_family: Vec<u64> = (0..5)
            .filter(|&a| class_in_power_family(&ResidueClass::new(5, a).unwrap(), 2))
            .collect();
        assert_eq!(in_family, vec![0, 2]);
        assert!(vector_in_power_family(
            &classes(&[(5, 0), (5, 2)]),
            2
        ));
        assert!(!vector_in_power_family(
            &classes(&[(5, 0), (5, 1)]),
            2
        ));
    }

    #[test]
    fn matrix_entry_examples() {
        let m0 = BigUint::from(1u32);
        let px = BigUint::from(30u32);
        assert_eq!(matrix_entry(&m0, &px, 1, 1, 1).unwrap(), BigUint::from(32u32));
        assert_eq!(matrix_entry(&m0, &px, 1, 1, 2).unwrap(), BigUint::from(1024u32));
        assert_eq!(matrix_entry(&m0, &px, 2, 3, 1).unwrap(), BigUint::from(64u32));
        assert!(matches!(
            matrix_entry(&m0, &px, 0, 1, 1),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn divisibility_transfers_to_matrix_entries() {
        // If m0 = e (mod p) and v = 1 - (e+1)^k (mod p) with p | P, then
        // p divides (m0 + 1 + rP)^k + v - 1.
        for p in [5u64, 7, 11, 13] {
            for k in 1..=4u64 {
                for e in 0..p - 1 {
                    let a = kth_power_class(p, e, k).unwrap();
                    let v = if a == 0 { p } else { a };
                    let m0 = BigUint::from(e);
                    let px = BigUint::from(p * 6);
                    for r in 1..=3u64 {
                        let entry = matrix_entry(&m0, &px, r, v, k as u32).unwrap();
                        assert!(
                            (entry % BigUint::from(p)).is_zero(),
                            "p={} k={} e={} r={}",
                            p,
                            k,
                            e,
                            r
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn counting_bound_prunes_immediately() {
        // ceil(3/2) = 2 < 3, so (3, 3) is decided without search.
        assert!(exhaustive_cover(3, 3).unwrap().is_none());
        // Capacity exactly y is necessary but not sufficient.
        let capacity: u64 = [2u64, 3, 5].iter().map(|&p| 6u64.div_ceil(p)).sum();
        assert!(capacity >= 6);
        assert!(exhaustive_cover(6, 6).unwrap().is_none());
    }

    #[test]
    fn hitting_numbers_are_reported() {
        let a = CoveringAssignment::from_classes(6, 5, classes(&[(2, 1), (3, 2), (5, 4)])).unwrap();
        assert_eq!(a.hitting_number(2), 3); // 1, 3, 5
        assert_eq!(a.hitting_number(3), 2); // 2, 5
        assert_eq!(a.hitting_number(5), 1); // 4
        assert_eq!(a.hitting_number(7), 0);
    }
}
