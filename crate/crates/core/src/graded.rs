//! Graded vector spaces, sparse homogeneous elements, Koszul signs and
//! graded-symmetric multilinear brackets.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::scalar::{format_rational, to_f64, Rational, Scalar};

/// A basis vector: index `index` inside the degree-`degree` component.
///
/// Slots are totally ordered lexicographically by `(degree, index)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Slot {
    pub degree: i32,
    pub index: usize,
}

impl Slot {
    pub const fn new(degree: i32, index: usize) -> Self {
        Slot { degree, index }
    }

    pub fn is_odd(&self) -> bool {
        self.degree.rem_euclid(2) == 1
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.degree, self.index)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Component {
    dim: usize,
    labels: Option<Vec<String>>,
}

/// Finite-dimensional graded vector space `V = ⊕ V_i`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GradedSpace {
    components: BTreeMap<i32, Component>,
}

impl GradedSpace {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a space from `(degree, dim)` pairs. Zero dimensions are dropped.
    pub fn from_dims(dims: &[(i32, usize)]) -> Result<Self> {
        let mut space = Self::new();
        for &(d, n) in dims {
            space = space.with_degree(d, n)?;
        }
        Ok(space)
    }

    pub fn with_degree(mut self, degree: i32, dim: usize) -> Result<Self> {
        if self.components.contains_key(&degree) {
            return Err(Error::Parse(format!("degree {degree} declared twice")));
        }
        if dim > 0 {
            self.components
                .insert(degree, Component { dim, labels: None });
        }
        Ok(self)
    }

    pub fn with_labels(mut self, degree: i32, labels: Vec<String>) -> Result<Self> {
        let dim = self.dim(degree);
        if labels.len() != dim {
            return Err(Error::LengthMismatch {
                expected: dim,
                found: labels.len(),
            });
        }
        if let Some(c) = self.components.get_mut(&degree) {
            c.labels = Some(labels);
        }
        Ok(self)
    }

    pub fn dim(&self, degree: i32) -> usize {
        self.components.get(&degree).map_or(0, |c| c.dim)
    }

    pub fn total_dim(&self) -> usize {
        self.components.values().map(|c| c.dim).sum()
    }

    /// Degrees with nonzero dimension, increasing.
    pub fn degrees(&self) -> impl Iterator<Item = i32> + '_ {
        self.components.keys().copied()
    }

    pub fn labels(&self, degree: i32) -> Option<&[String]> {
        self.components
            .get(&degree)
            .and_then(|c| c.labels.as_deref())
    }

    pub fn contains(&self, slot: Slot) -> bool {
        slot.index < self.dim(slot.degree)
    }

    pub fn check(&self, slot: Slot) -> Result<()> {
        if self.contains(slot) {
            Ok(())
        } else {
            Err(Error::InvalidSlot(slot))
        }
    }

    /// Basis slots of one degree.
    pub fn slots(&self, degree: i32) -> impl Iterator<Item = Slot> {
        (0..self.dim(degree)).map(move |index| Slot { degree, index })
    }

    /// All basis slots in increasing order.
    pub fn all_slots(&self) -> Vec<Slot> {
        self.degrees().flat_map(|d| self.slots(d)).collect()
    }

    pub fn label(&self, slot: Slot) -> String {
        match self.labels(slot.degree) {
            Some(l) if slot.index < l.len() => l[slot.index].clone(),
            _ => slot.to_string(),
        }
    }

    pub fn find_label(&self, name: &str) -> Option<Slot> {
        self.components.iter().find_map(|(&degree, c)| {
            c.labels
                .as_ref()?
                .iter()
                .position(|l| l == name)
                .map(|index| Slot { degree, index })
        })
    }
}

/// Sparse vector of `V` with coefficients in `C`.
///
/// Elements carry no reference to their space; operations that need it take
/// the space explicitly and validate the slots.
#[derive(Clone, PartialEq)]
pub struct Element<C = Rational> {
    coords: BTreeMap<Slot, C>,
}

impl<C: Scalar> Default for Element<C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Scalar> Element<C> {
    pub fn zero() -> Self {
        Element {
            coords: BTreeMap::new(),
        }
    }

    pub fn basis(slot: Slot) -> Self {
        Self::term(slot, C::one())
    }

    pub fn term(slot: Slot, c: C) -> Self {
        let mut e = Self::zero();
        e.add_term(slot, c);
        e
    }

    pub fn from_terms(
        space: &GradedSpace,
        terms: impl IntoIterator<Item = (Slot, C)>,
    ) -> Result<Self> {
        let mut e = Self::zero();
        for (s, c) in terms {
            space.check(s)?;
            e.add_term(s, c);
        }
        Ok(e)
    }

    /// Element of degree `degree` with the given dense coordinates.
    pub fn from_dense(degree: i32, values: &[C]) -> Self {
        let mut e = Self::zero();
        for (index, c) in values.iter().enumerate() {
            e.add_term(Slot { degree, index }, c.clone());
        }
        e
    }

    pub fn validate(&self, space: &GradedSpace) -> Result<()> {
        self.coords.keys().try_for_each(|&s| space.check(s))
    }

    pub fn add_term(&mut self, slot: Slot, c: C) {
        if c.is_zero() {
            return;
        }
        match self.coords.remove(&slot) {
            Some(old) => {
                let v = old + c;
                if !v.is_zero() {
                    self.coords.insert(slot, v);
                }
            }
            None => {
                self.coords.insert(slot, c);
            }
        }
    }

    pub fn get(&self, slot: Slot) -> C {
        self.coords.get(&slot).cloned().unwrap_or_else(C::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (Slot, &C)> {
        self.coords.iter().map(|(&s, c)| (s, c))
    }

    pub fn support(&self) -> impl Iterator<Item = Slot> + '_ {
        self.coords.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    /// The common degree of all terms; `None` for zero or inhomogeneous elements.
    pub fn degree(&self) -> Option<i32> {
        let mut it = self.coords.keys().map(|s| s.degree);
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.degree().is_some()
    }

    /// True when the element is zero or homogeneous of degree `d`.
    pub fn has_degree(&self, d: i32) -> bool {
        self.coords.keys().all(|s| s.degree == d)
    }

    /// Projection onto the degree-`d` component.
    pub fn part(&self, d: i32) -> Self {
        Element {
            coords: self
                .coords
                .iter()
                .filter(|(s, _)| s.degree == d)
                .map(|(&s, c)| (s, c.clone()))
                .collect(),
        }
    }

    /// Dense coordinates of the degree-`d` component.
    pub fn dense(&self, space: &GradedSpace, d: i32) -> Vec<C> {
        (0..space.dim(d))
            .map(|i| self.get(Slot::new(d, i)))
            .collect()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (s, c) in rhs.terms() {
            out.add_term(s, c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (s, c) in rhs.terms() {
            out.add_term(s, -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Element {
            coords: self.coords.iter().map(|(&s, c)| (s, -c.clone())).collect(),
        }
    }

    pub fn scale(&self, q: &Rational) -> Self {
        self.mul_scalar(&C::from_rational(q))
    }

    pub fn mul_scalar(&self, c: &C) -> Self {
        let mut out = Self::zero();
        for (&s, v) in &self.coords {
            out.add_term(s, v.clone() * c.clone());
        }
        out
    }

    pub fn map<D: Scalar>(&self, f: impl Fn(&C) -> D) -> Element<D> {
        let mut out = Element::zero();
        for (&s, c) in &self.coords {
            out.add_term(s, f(c));
        }
        out
    }
}

impl Element<Rational> {
    pub fn to_f64(&self) -> Element<f64> {
        self.map(to_f64)
    }

    /// Max-absolute-coefficient norm.
    pub fn max_norm(&self) -> f64 {
        self.coords
            .values()
            .map(|c| to_f64(&c.abs()))
            .fold(0.0, f64::max)
    }

    pub fn display(&self, space: &GradedSpace) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.terms()
            .map(|(s, c)| format!("{}*{}", format_rational(c), space.label(s)))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl Element<f64> {
    pub fn max_norm(&self) -> f64 {
        self.coords.values().map(|c| c.abs()).fold(0.0, f64::max)
    }
}

impl<C: Scalar> fmt::Debug for Element<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.coords.iter().map(|(s, c)| (s.to_string(), c)))
            .finish()
    }
}

/// Koszul sign of a permutation acting on a word of homogeneous elements.
///
/// `perm` is 0-based: the permuted word is `v[perm[0]], …, v[perm[k-1]]` and
/// `degs[j]` is the degree of `v[j]`. The sign satisfies
/// `v[perm[0]] ⊙ ⋯ ⊙ v[perm[k-1]] = sign · v[0] ⊙ ⋯ ⊙ v[k-1]`.
pub fn koszul_sign(perm: &[usize], degs: &[i32]) -> Result<i32> {
    let k = perm.len();
    if degs.len() != k {
        return Err(Error::LengthMismatch {
            expected: k,
            found: degs.len(),
        });
    }
    let mut seen = vec![false; k];
    for &p in perm {
        if p >= k || std::mem::replace(&mut seen[p], true) {
            return Err(Error::NotAPermutation(k));
        }
    }
    let mut odd = 0u32;
    for p in 0..k {
        for q in p + 1..k {
            let (a, b) = (perm[p], perm[q]);
            if a > b && degs[a].rem_euclid(2) == 1 && degs[b].rem_euclid(2) == 1 {
                odd += 1;
            }
        }
    }
    Ok(if odd % 2 == 0 { 1 } else { -1 })
}

/// A tuple of slots in canonical nondecreasing order together with the sign
/// relating it to the original word. A sign of `0` means the word contains a
/// repeated odd slot and every graded-symmetric map vanishes on it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Canonical {
    pub slots: Vec<Slot>,
    pub sign: i32,
}

impl Canonical {
    pub fn is_annihilated(&self) -> bool {
        self.sign == 0
    }
}

/// Sorts `inputs` and returns the sign with `inputs = sign · sorted` in the
/// graded symmetric algebra.
pub fn canonicalize(space: &GradedSpace, inputs: &[Slot]) -> Result<Canonical> {
    inputs.iter().try_for_each(|&s| space.check(s))?;
    Ok(canonical_unchecked(inputs))
}

pub(crate) fn canonical_unchecked(inputs: &[Slot]) -> Canonical {
    let mut odd = 0u32;
    for p in 0..inputs.len() {
        for q in p + 1..inputs.len() {
            if inputs[p] > inputs[q] && inputs[p].is_odd() && inputs[q].is_odd() {
                odd += 1;
            }
        }
    }
    let mut slots = inputs.to_vec();
    slots.sort();
    let repeated_odd = slots.windows(2).any(|w| w[0] == w[1] && w[0].is_odd());
    let sign = if repeated_odd {
        0
    } else if odd % 2 == 0 {
        1
    } else {
        -1
    };
    Canonical { slots, sign }
}

/// Graded-symmetric `arity`-multilinear map of degree +1, stored on canonical
/// input tuples.
#[derive(Clone, PartialEq)]
pub struct Bracket {
    arity: usize,
    entries: BTreeMap<Vec<Slot>, Element>,
}

impl Bracket {
    pub fn new(arity: usize) -> Self {
        Bracket {
            arity,
            entries: BTreeMap::new(),
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&[Slot], &Element)> {
        self.entries.iter().map(|(k, v)| (k.as_slice(), v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Adds `output` to the value on `inputs` (in any order; the Koszul sign is applied).
    pub fn insert(&mut self, space: &GradedSpace, inputs: &[Slot], output: &Element) -> Result<()> {
        if inputs.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: inputs.len(),
            });
        }
        output.validate(space)?;
        let c = canonicalize(space, inputs)?;
        let expected = inputs.iter().map(|s| s.degree).sum::<i32>() + 1;
        if let Some(s) = output.support().find(|s| s.degree != expected) {
            return Err(Error::DegreeMismatch {
                expected,
                found: s.degree,
            });
        }
        if output.is_zero() {
            return Ok(());
        }
        if c.is_annihilated() {
            return Err(Error::Annihilated(inputs.to_vec()));
        }
        let value = if c.sign == 1 {
            output.clone()
        } else {
            output.neg()
        };
        let entry = self.entries.entry(c.slots.clone()).or_default();
        *entry = entry.add(&value);
        if entry.is_zero() {
            self.entries.remove(&c.slots);
        }
        Ok(())
    }

    pub fn insert_term(
        &mut self,
        space: &GradedSpace,
        inputs: &[Slot],
        output: Slot,
        coeff: Rational,
    ) -> Result<()> {
        self.insert(space, inputs, &Element::term(output, coeff))
    }

    /// Value on a basis word, in any order.
    pub fn value(&self, inputs: &[Slot]) -> Element {
        let c = canonical_unchecked(inputs);
        match (c.sign, self.entries.get(&c.slots)) {
            (0, _) | (_, None) => Element::zero(),
            (1, Some(v)) => v.clone(),
            (_, Some(v)) => v.neg(),
        }
    }

    /// Stored value on a canonical tuple.
    pub fn get(&self, canonical: &[Slot]) -> Option<&Element> {
        self.entries.get(canonical)
    }

    pub fn scale(&self, q: &Rational) -> Bracket {
        let mut out = Bracket::new(self.arity);
        if num_traits::Zero::is_zero(q) {
            return out;
        }
        out.entries = self
            .entries
            .iter()
            .map(|(k, v)| (k.clone(), v.scale(q)))
            .collect();
        out
    }

    /// Sum of two brackets of the same arity.
    pub fn add(&self, other: &Bracket) -> Result<Bracket> {
        if other.arity != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: other.arity,
            });
        }
        let mut out = self.clone();
        for (k, v) in &other.entries {
            let e = out.entries.entry(k.clone()).or_default();
            *e = e.add(v);
            if e.is_zero() {
                out.entries.remove(k);
            }
        }
        Ok(out)
    }

    /// Adds `value` on an already canonical tuple without validation.
    pub(crate) fn accumulate_canonical(&mut self, key: Vec<Slot>, value: &Element) {
        if value.is_zero() {
            return;
        }
        let e = self.entries.entry(key.clone()).or_default();
        *e = e.add(value);
        if e.is_zero() {
            self.entries.remove(&key);
        }
    }
}

impl fmt::Debug for Bracket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bracket<{}> ", self.arity)?;
        f.debug_map()
            .entries(self.entries.iter().map(|(k, v)| {
                (
                    k.iter().map(Slot::to_string).collect::<Vec<_>>().join(""),
                    v,
                )
            }))
            .finish()
    }
}

/// Evaluates `b(args[0], …, args[k-1])` by multilinear expansion.
pub fn eval_bracket<C: Scalar>(
    space: &GradedSpace,
    b: &Bracket,
    args: &[Element<C>],
) -> Result<Element<C>> {
    if args.len() != b.arity {
        return Err(Error::ArityMismatch {
            expected: b.arity,
            found: args.len(),
        });
    }
    for a in args {
        a.validate(space)?;
    }
    Ok(eval_unchecked(b, args))
}

pub(crate) fn eval_unchecked<C: Scalar>(b: &Bracket, args: &[Element<C>]) -> Element<C> {
    let mut out = Element::zero();
    if b.is_zero() {
        return out;
    }
    if args.is_empty() {
        if let Some(v) = b.entries.get(&Vec::new()) {
            for (s, c) in v.terms() {
                out.add_term(s, C::from_rational(c));
            }
        }
        return out;
    }
    if args.iter().any(Element::is_zero) {
        return out;
    }
    let supports: Vec<Vec<(Slot, &C)>> = args.iter().map(|a| a.terms().collect()).collect();
    let mut idx = vec![0usize; args.len()];
    let mut word = vec![Slot::new(0, 0); args.len()];
    'outer: loop {
        for (p, &i) in idx.iter().enumerate() {
            word[p] = supports[p][i].0;
        }
        let c = canonical_unchecked(&word);
        if c.sign != 0 {
            if let Some(v) = b.entries.get(&c.slots) {
                let mut coeff = supports[0][idx[0]].1.clone();
                for p in 1..args.len() {
                    coeff = coeff * supports[p][idx[p]].1.clone();
                }
                if c.sign < 0 {
                    coeff = -coeff;
                }
                for (s, q) in v.terms() {
                    out.add_term(s, coeff.scale(q));
                }
            }
        }
        for p in (0..args.len()).rev() {
            idx[p] += 1;
            if idx[p] < supports[p].len() {
                continue 'outer;
            }
            idx[p] = 0;
        }
        break;
    }
    out
}

/// Number of distinct orderings of a canonical tuple: `k! / Π (multiplicity)!`.
pub fn distinct_orderings(canonical: &[Slot]) -> u128 {
    let k = canonical.len() as u128;
    let mut n: u128 = (1..=k).product();
    let mut run = 1u128;
    for w in canonical.windows(2) {
        if w[0] == w[1] {
            run += 1;
            n /= run;
        } else {
            run = 1;
        }
    }
    n
}

/// All nondecreasing tuples of length `k` drawn from `slots` (assumed sorted)
/// that contain no repeated odd slot.
pub fn canonical_tuples(slots: &[Slot], k: usize) -> Vec<Vec<Slot>> {
    fn go(slots: &[Slot], start: usize, k: usize, cur: &mut Vec<Slot>, out: &mut Vec<Vec<Slot>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..slots.len() {
            let s = slots[i];
            let next = if s.is_odd() { i + 1 } else { i };
            cur.push(s);
            go(slots, next, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(slots, 0, k, &mut Vec::new(), &mut out);
    out
}
