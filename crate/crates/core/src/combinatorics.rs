//! Compositions, multinomial coefficients, orbit sizes and super-Catalan numbers.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{OnceLock, RwLock};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Ordered tuple of positive integers.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Composition {
    parts: Vec<usize>,
}

impl Composition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() || parts.contains(&0) {
            return Err(Error::InvalidComposition(format!("{parts:?}")));
        }
        Ok(Composition { parts })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn total(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.parts.windows(2).all(|w| w[0] <= w[1])
    }

    pub fn factorization(&self) -> RepeatedFactorization {
        let mut sorted = self.parts.clone();
        sorted.sort_unstable();
        let mut values: Vec<usize> = Vec::new();
        let mut multiplicities: Vec<usize> = Vec::new();
        for r in sorted {
            if values.last() == Some(&r) {
                *multiplicities.last_mut().unwrap() += 1;
            } else {
                values.push(r);
                multiplicities.push(1);
            }
        }
        RepeatedFactorization {
            values,
            multiplicities,
        }
    }
}

/// Distinct values of a composition with their multiplicities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepeatedFactorization {
    pub values: Vec<usize>,
    pub multiplicities: Vec<usize>,
}

impl RepeatedFactorization {
    /// The nondecreasing composition with this multiset of parts.
    pub fn representative(&self) -> Composition {
        let parts = self
            .values
            .iter()
            .zip(&self.multiplicities)
            .flat_map(|(&v, &b)| std::iter::repeat_n(v, b))
            .collect();
        Composition { parts }
    }
}

pub fn factorial(n: usize) -> BigUint {
    (1..=n).map(BigUint::from).product()
}

fn check_range(k: usize, i: usize) -> Result<()> {
    if i == 0 || i > k {
        return Err(Error::InvalidComposition(format!("{i} parts of {k}")));
    }
    Ok(())
}

/// All `i`-part compositions of `k` in lexicographic order.
pub fn compositions(k: usize, i: usize) -> Result<Vec<Composition>> {
    check_range(k, i)?;
    fn go(rest: usize, slots: usize, cur: &mut Vec<usize>, out: &mut Vec<Composition>) {
        if slots == 1 {
            cur.push(rest);
            out.push(Composition { parts: cur.clone() });
            cur.pop();
            return;
        }
        for r in 1..=rest - (slots - 1) {
            cur.push(r);
            go(rest - r, slots - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(k, i, &mut Vec::with_capacity(i), &mut out);
    Ok(out)
}

/// Nondecreasing `i`-part compositions of `k` (partitions into exactly `i` parts).
pub fn partitions(k: usize, i: usize) -> Result<Vec<Composition>> {
    check_range(k, i)?;
    fn go(rest: usize, slots: usize, min: usize, cur: &mut Vec<usize>, out: &mut Vec<Composition>) {
        if slots == 1 {
            if rest >= min {
                cur.push(rest);
                out.push(Composition { parts: cur.clone() });
                cur.pop();
            }
            return;
        }
        let mut r = min;
        while r * slots <= rest {
            cur.push(r);
            go(rest - r, slots - 1, r, cur, out);
            cur.pop();
            r += 1;
        }
    }
    let mut out = Vec::new();
    go(k, i, 1, &mut Vec::with_capacity(i), &mut out);
    Ok(out)
}

/// `k! / (r₁! ⋯ r_i!)`.
pub fn multinomial(k: usize, parts: &Composition) -> Result<BigUint> {
    if parts.total() != k {
        return Err(Error::InvalidComposition(format!(
            "{:?} does not sum to {k}",
            parts.parts
        )));
    }
    Ok(parts
        .parts
        .iter()
        .fold(factorial(k), |acc, &r| acc / factorial(r)))
}

/// Number of distinct rearrangements: `i! / (b₁! ⋯ b_s!)`.
pub fn orbit_size(parts: &Composition) -> BigUint {
    parts
        .factorization()
        .multiplicities
        .iter()
        .fold(factorial(parts.len()), |acc, &b| acc / factorial(b))
}

/// Binomial coefficient `n choose k`.
pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Checks, for every `i`-part partition `p` of `k`, that the three weightings
/// of its rearrangements `r` agree:
/// `Σ (k−1)!/(r₁!⋯r_{i−1}!(r_i−1)!)/(i−1)!`, `Σ binom(k−1; r)·r_i/(i−1)!` and
/// `Σ binom(k; r)/i!`.
pub fn reorganization_identity(k: usize) -> Result<bool> {
    if k < 2 {
        return Err(Error::OutOfRange("reorganization needs k >= 2".into()));
    }
    let q = |n: BigUint| BigRational::from_integer(BigInt::from(n));
    for i in 2..=k {
        let mut sums: BTreeMap<Vec<usize>, [BigRational; 3]> = BTreeMap::new();
        for r in compositions(k, i)? {
            let key = r.factorization().representative().parts;
            let last = r.parts[i - 1];
            let head = r.parts[..i - 1]
                .iter()
                .fold(BigUint::one(), |acc, &x| acc * factorial(x));
            let a = q(factorial(k - 1)) / q(head.clone() * factorial(last - 1) * factorial(i - 1));
            let b = q(factorial(k - 1) * last) / q(head * factorial(last) * factorial(i - 1));
            let c = q(multinomial(k, &r)?) / q(factorial(i));
            let e = sums
                .entry(key)
                .or_insert_with(|| std::array::from_fn(|_| BigRational::zero()));
            e[0] += a;
            e[1] += b;
            e[2] += c;
        }
        for (key, [a, b, c]) in &sums {
            let orbit = q(orbit_size(&Composition { parts: key.clone() }));
            let m = q(multinomial(k, &Composition { parts: key.clone() })?) / q(factorial(i));
            if a != b || b != c || *c != orbit * m {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Default size of the memoized super-Catalan table.
pub const DEFAULT_CATALAN_CAP: usize = 200;

fn catalan_table() -> &'static RwLock<Vec<BigUint>> {
    static TABLE: OnceLock<RwLock<Vec<BigUint>>> = OnceLock::new();
    // index 0 unused
    TABLE.get_or_init(|| RwLock::new(vec![BigUint::zero(), BigUint::one(), BigUint::one()]))
}

fn catalan_extend(table: &mut Vec<BigUint>, k: usize) {
    // Splitting off the first factor of length r from a bracketing of k letters
    // leaves either a single further factor (weight C_{k-r}) or a word of at
    // least two further factors (weight C_{k-r} again), hence the factor 2 for
    // k - r >= 2.
    while table.len() <= k {
        let n = table.len();
        let mut sum = BigUint::zero();
        for r in 1..n {
            let m = n - r;
            let tail = if m == 1 {
                table[1].clone()
            } else {
                &table[m] * 2u32
            };
            sum += &table[r] * tail;
        }
        table.push(sum);
    }
}

static CATALAN_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_CATALAN_CAP);

/// Sets the memo-table cap used by [`super_catalan`].
pub fn set_catalan_cap(cap: usize) {
    CATALAN_CAP.store(cap, Ordering::Relaxed);
}

pub fn catalan_cap() -> usize {
    CATALAN_CAP.load(Ordering::Relaxed)
}

/// Super-Catalan number `C_k` under the current memo-table cap.
pub fn super_catalan(k: usize) -> Result<BigUint> {
    super_catalan_capped(k, catalan_cap())
}

/// Super-Catalan number `C_k`; values with `k <= cap` are memoized.
pub fn super_catalan_capped(k: usize, cap: usize) -> Result<BigUint> {
    if k == 0 {
        return Err(Error::OutOfRange(
            "super-Catalan index must be at least 1".into(),
        ));
    }
    {
        let table = catalan_table().read().unwrap_or_else(|e| e.into_inner());
        if k < table.len() {
            return Ok(table[k].clone());
        }
    }
    if k <= cap {
        let mut table = catalan_table().write().unwrap_or_else(|e| e.into_inner());
        catalan_extend(&mut table, k);
        return Ok(table[k].clone());
    }
    let mut local = catalan_table()
        .read()
        .unwrap_or_else(|e| e.into_inner())
        .clone();
    catalan_extend(&mut local, k);
    Ok(local[k].clone())
}

/// All bracketings of the word `1 2 … k` into factors, each with at least two
/// factors per bracket level; single letters are written `(j)`.
pub fn enumerate_bracketings(k: usize) -> Result<Vec<String>> {
    if k == 0 || k > 8 {
        return Err(Error::OutOfRange(format!(
            "bracketing enumeration needs 1 <= k <= 8, got {k}"
        )));
    }
    Ok(bracketings(1, k))
}

fn bracketings(lo: usize, hi: usize) -> Vec<String> {
    if lo == hi {
        return vec![format!("({lo})")];
    }
    // Words made of at least two factors; a factor is a letter or a bracketed word.
    let mut out = Vec::new();
    for split in factor_splits(lo, hi) {
        let mut partial = vec![String::new()];
        for (a, b) in split {
            let options = if a == b {
                vec![format!("({a})")]
            } else {
                bracketings(a, b)
                    .into_iter()
                    .map(|s| format!("({s})"))
                    .collect()
            };
            partial = partial
                .iter()
                .flat_map(|p| options.iter().map(move |o| format!("{p}{o}")))
                .collect();
        }
        out.extend(partial);
    }
    out
}

/// Ways to cut `lo..=hi` into at least two consecutive nonempty blocks.
fn factor_splits(lo: usize, hi: usize) -> Vec<Vec<(usize, usize)>> {
    fn go(
        start: usize,
        hi: usize,
        cur: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        if start > hi {
            if cur.len() >= 2 {
                out.push(cur.clone());
            }
            return;
        }
        for end in start..=hi {
            cur.push((start, end));
            go(end + 1, hi, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(lo, hi, &mut Vec::new(), &mut out);
    out
}

/// Counts bracketings of a word of `k` letters by explicit enumeration.
pub fn count_bracketings(k: usize) -> Result<BigUint> {
    Ok(BigUint::from(enumerate_bracketings(k)?.len()))
}

/// `C_{k+1} / C_k` as a float.
pub fn asymptotic_ratio_check(k: usize) -> Result<f64> {
    if k < 2 {
        return Err(Error::OutOfRange("ratio check needs k >= 2".into()));
    }
    let a = super_catalan(k + 1)?;
    let b = super_catalan(k)?;
    Ok(big_ratio(&a, &b))
}

/// Limit of `C_{k+1} / C_k`.
pub fn asymptotic_ratio() -> f64 {
    3.0 + 8f64.sqrt()
}

pub(crate) fn big_ratio(a: &BigUint, b: &BigUint) -> f64 {
    let shift = a.bits().max(b.bits()).saturating_sub(60);
    let a = (a >> shift).to_f64().unwrap_or(f64::INFINITY);
    let b = (b >> shift).to_f64().unwrap_or(f64::INFINITY);
    a / b
}

pub fn big_to_f64(a: &BigUint) -> f64 {
    a.to_f64().unwrap_or(f64::INFINITY)
}

/// `1 / (12 ‖h₁‖ α)`.
pub fn convergence_radius(h1_norm: f64, alpha: f64) -> Result<f64> {
    let p = h1_norm * alpha;
    if p.is_nan() || p <= 0.0 || h1_norm < 0.0 || alpha < 0.0 || !p.is_finite() {
        return Err(Error::DegenerateBound(p));
    }
    Ok(1.0 / (12.0 * p))
}
