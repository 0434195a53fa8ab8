//! Finite-dimensional N-strict curved L∞-algebras in the shifted convention:
//! every bracket has degree +1 and is graded symmetric.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::combinatorics::factorial;
use crate::error::{Error, Result};
use crate::graded::{
    canonical_tuples, eval_unchecked, koszul_sign, Bracket, Element, GradedSpace, Slot,
};
use crate::matrix::RationalMatrix;
use crate::scalar::{Rational, Scalar};

#[derive(Clone, PartialEq, Debug)]
pub struct LInftyAlgebra {
    space: GradedSpace,
    brackets: Vec<Bracket>,
    strictness: usize,
}

impl LInftyAlgebra {
    /// `brackets[k]` must have arity `k`; missing brackets below `strictness` are zero.
    pub fn new(space: GradedSpace, brackets: Vec<Bracket>, strictness: usize) -> Result<Self> {
        let mut slots: Vec<Bracket> = (0..strictness).map(Bracket::new).collect();
        for (k, b) in brackets.into_iter().enumerate() {
            if b.arity() != k {
                return Err(Error::ArityMismatch {
                    expected: k,
                    found: b.arity(),
                });
            }
            if b.is_zero() {
                continue;
            }
            if k >= strictness {
                return Err(Error::OutOfRange(format!(
                    "bracket of arity {k} is nonzero in a {strictness}-strict algebra"
                )));
            }
            for (inputs, out) in b.entries() {
                for &s in inputs {
                    space.check(s)?;
                }
                out.validate(&space)?;
                let expected = inputs.iter().map(|s| s.degree).sum::<i32>() + 1;
                if !out.has_degree(expected) {
                    return Err(Error::DegreeMismatch {
                        expected,
                        found: out.degree().unwrap_or(expected + 1),
                    });
                }
            }
            slots[k] = b;
        }
        Ok(LInftyAlgebra {
            space,
            brackets: slots,
            strictness,
        })
    }

    pub fn space(&self) -> &GradedSpace {
        &self.space
    }

    pub fn strictness(&self) -> usize {
        self.strictness
    }

    /// `ℓ_k`, or `None` when `k >= N`.
    pub fn bracket(&self, k: usize) -> Option<&Bracket> {
        self.brackets.get(k)
    }

    pub fn brackets(&self) -> &[Bracket] {
        &self.brackets
    }

    fn has(&self, k: usize) -> bool {
        self.brackets.get(k).is_some_and(|b| !b.is_zero())
    }

    pub fn curvature(&self) -> Element {
        self.brackets
            .first()
            .map(|b| eval_unchecked::<Rational>(b, &[]))
            .unwrap_or_default()
    }

    pub fn is_flat(&self) -> bool {
        !self.has(0)
    }

    /// `ℓ_k(args)`, zero for `k >= N`.
    pub fn eval<C: Scalar>(&self, k: usize, args: &[Element<C>]) -> Result<Element<C>> {
        if args.len() != k {
            return Err(Error::ArityMismatch {
                expected: k,
                found: args.len(),
            });
        }
        for a in args {
            a.validate(&self.space)?;
        }
        Ok(self.eval_unchecked(k, args))
    }

    pub(crate) fn eval_unchecked<C: Scalar>(&self, k: usize, args: &[Element<C>]) -> Element<C> {
        match self.brackets.get(k) {
            Some(b) => eval_unchecked(b, args),
            None => Element::zero(),
        }
    }

    /// Replaces the bracket of arity `k`; used for fault injection and scaling.
    pub fn with_bracket(&self, b: Bracket) -> Result<Self> {
        let mut brackets = self.brackets.clone();
        let k = b.arity();
        let strictness = self.strictness.max(if b.is_zero() { 0 } else { k + 1 });
        while brackets.len() < strictness {
            brackets.push(Bracket::new(brackets.len()));
        }
        if k < brackets.len() {
            brackets[k] = b;
        }
        LInftyAlgebra::new(self.space.clone(), brackets, strictness)
    }

    /// All brackets multiplied by `c`.
    pub fn scaled(&self, c: &Rational) -> Self {
        LInftyAlgebra {
            space: self.space.clone(),
            brackets: self.brackets.iter().map(|b| b.scale(c)).collect(),
            strictness: self.strictness,
        }
    }

    fn check_degree_zero<C: Scalar>(&self, u: &Element<C>) -> Result<()> {
        u.validate(&self.space)?;
        if !u.has_degree(0) {
            return Err(Error::DegreeMismatch {
                expected: 0,
                found: u.degree().unwrap_or(i32::MIN),
            });
        }
        Ok(())
    }
}

/// Twisted bracket `ℓ^u_p(args) = Σ_k (1/k!) ℓ_{p+k}(u, …, u, args)`.
pub fn twisted_eval<C: Scalar>(
    alg: &LInftyAlgebra,
    u: &Element<C>,
    args: &[Element<C>],
) -> Element<C> {
    let p = args.len();
    let mut out = Element::zero();
    for k in 0..alg.strictness.saturating_sub(p) {
        if !alg.has(p + k) || (k > 0 && u.is_zero()) {
            continue;
        }
        let mut full: Vec<Element<C>> = Vec::with_capacity(p + k);
        full.extend(std::iter::repeat_n(u.clone(), k));
        full.extend(args.iter().cloned());
        let v = alg.eval_unchecked(p + k, &full);
        let w = Rational::new(1.into(), factorial(k).into());
        out = out.add(&v.scale(&w));
    }
    out
}

/// `MC(u) = Σ_k (1/k!) ℓ_k(u, …, u)`.
pub fn mc_eval<C: Scalar>(alg: &LInftyAlgebra, u: &Element<C>) -> Result<Element<C>> {
    alg.check_degree_zero(u)?;
    Ok(twisted_eval(alg, u, &[]))
}

/// The twisted algebra `ℓ^u`; its curvature is `MC(u)`.
pub fn twist(alg: &LInftyAlgebra, u: &Element) -> Result<LInftyAlgebra> {
    alg.check_degree_zero(u)?;
    if u.is_zero() {
        return Ok(alg.clone());
    }
    let slots = alg.space.all_slots();
    let mut brackets = Vec::with_capacity(alg.strictness);
    for p in 0..alg.strictness {
        let mut b = Bracket::new(p);
        if (p..alg.strictness).any(|k| alg.has(k)) {
            let tuples: Vec<Vec<Slot>> = canonical_tuples(&slots, p)
                .into_iter()
                .filter(|t| alg.space.dim(t.iter().map(|s| s.degree).sum::<i32>() + 1) > 0)
                .collect();
            let values: Vec<(Vec<Slot>, Element)> = tuples
                .into_par_iter()
                .map(|t| {
                    let args: Vec<Element> = t.iter().map(|&s| Element::basis(s)).collect();
                    let v = twisted_eval(alg, u, &args);
                    (t, v)
                })
                .collect();
            for (t, v) in values {
                b.accumulate_canonical(t, &v);
            }
        }
        brackets.push(b);
    }
    LInftyAlgebra::new(alg.space.clone(), brackets, alg.strictness)
}

/// All `(p, q)`-unshuffles as 0-based permutations of `0..p+q`.
pub fn enumerate_unshuffles(p: usize, q: usize) -> Vec<Vec<usize>> {
    let n = p + q;
    let mut out = Vec::new();
    let mut chosen = Vec::with_capacity(p);
    fn go(start: usize, n: usize, p: usize, chosen: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if chosen.len() == p {
            let mut perm = chosen.clone();
            perm.extend((0..n).filter(|i| !chosen.contains(i)));
            out.push(perm);
            return;
        }
        for i in start..n {
            chosen.push(i);
            go(i + 1, n, p, chosen, out);
            chosen.pop();
        }
    }
    go(0, n, p, &mut chosen, &mut out);
    out
}

/// `Jac_n(v₁, …, v_n) = Σ_{i+j=n+1} Σ_σ ε_σ ℓ_j(ℓ_i(v_σ(1), …, v_σ(i)), v_σ(i+1), …)`
/// over `(i, n-i)`-unshuffles `σ`.
pub fn jacobiator(alg: &LInftyAlgebra, n: usize, args: &[Element]) -> Result<Element> {
    if args.len() != n {
        return Err(Error::ArityMismatch {
            expected: n,
            found: args.len(),
        });
    }
    let mut degs = Vec::with_capacity(n);
    for a in args {
        a.validate(&alg.space)?;
        if a.is_zero() {
            return Ok(Element::zero());
        }
        degs.push(a.degree().ok_or(Error::NotHomogeneous)?);
    }
    Ok(jacobiator_unchecked(alg, args, &degs))
}

fn jacobiator_unchecked(alg: &LInftyAlgebra, args: &[Element], degs: &[i32]) -> Element {
    let n = args.len();
    let mut out = Element::zero();
    for i in 0..=n {
        let j = n + 1 - i;
        if !alg.has(i) || !alg.has(j) {
            continue;
        }
        for sigma in enumerate_unshuffles(i, n - i) {
            let sign = koszul_sign(&sigma, degs).expect("unshuffle is a permutation");
            let inner_args: Vec<Element> = sigma[..i].iter().map(|&p| args[p].clone()).collect();
            let inner = alg.eval_unchecked(i, &inner_args);
            if inner.is_zero() {
                continue;
            }
            let mut outer_args = Vec::with_capacity(j);
            outer_args.push(inner);
            outer_args.extend(sigma[i..].iter().map(|&p| args[p].clone()));
            let v = alg.eval_unchecked(j, &outer_args);
            out = if sign > 0 { out.add(&v) } else { out.sub(&v) };
        }
    }
    out
}

/// Outcome of checking `Jac_n = 0` on all canonical basis tuples.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiCheck {
    pub n: usize,
    pub tuples_checked: usize,
    /// Largest absolute coefficient of any `Jac_n` value.
    pub max_violation: Rational,
    pub first_failure: Option<Vec<Slot>>,
    /// No pair of nonzero brackets contributes at this arity.
    pub vacuous: bool,
}

impl JacobiCheck {
    pub fn passed(&self) -> bool {
        Scalar::is_zero(&self.max_violation)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LInftyReport {
    pub checks: Vec<JacobiCheck>,
}

impl LInftyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(JacobiCheck::passed)
    }

    pub fn first_failing(&self) -> Option<usize> {
        self.checks.iter().find(|c| !c.passed()).map(|c| c.n)
    }
}

/// Checks `Jac_n = 0` for `0 <= n <= 2N-1`.
pub fn verify_linfty(alg: &LInftyAlgebra) -> LInftyReport {
    let slots = alg.space.all_slots();
    let n_max = (2 * alg.strictness).saturating_sub(1);
    let checks = (0..=n_max)
        .map(|n| {
            let vacuous = !(0..=n).any(|i| alg.has(i) && alg.has(n + 1 - i));
            if vacuous {
                return JacobiCheck {
                    n,
                    tuples_checked: 0,
                    max_violation: <Rational as Zero>::zero(),
                    first_failure: None,
                    vacuous,
                };
            }
            let tuples: Vec<Vec<Slot>> = canonical_tuples(&slots, n)
                .into_iter()
                .filter(|t| alg.space.dim(t.iter().map(|s| s.degree).sum::<i32>() + 2) > 0)
                .collect();
            let results: Vec<Rational> = tuples
                .par_iter()
                .map(|t| {
                    let args: Vec<Element> = t.iter().map(|&s| Element::basis(s)).collect();
                    let degs: Vec<i32> = t.iter().map(|s| s.degree).collect();
                    let v = jacobiator_unchecked(alg, &args, &degs);
                    v.terms()
                        .map(|(_, c)| c.abs())
                        .max()
                        .unwrap_or_else(<Rational as Zero>::zero)
                })
                .collect();
            let mut max_violation = <Rational as Zero>::zero();
            let mut first_failure = None;
            for (t, r) in tuples.iter().zip(results) {
                if !Scalar::is_zero(&r) && first_failure.is_none() {
                    first_failure = Some(t.clone());
                }
                if r > max_violation {
                    max_violation = r;
                }
            }
            JacobiCheck {
                n,
                tuples_checked: tuples.len(),
                max_violation,
                first_failure,
                vacuous,
            }
        })
        .collect();
    LInftyReport { checks }
}

/// Matrix of `ℓ₁ : V_d → V_{d+1}`, ignoring flatness.
pub fn differential_matrix(alg: &LInftyAlgebra, d: i32) -> RationalMatrix {
    let rows = alg.space.dim(d + 1);
    let cols = alg.space.dim(d);
    let mut m = RationalMatrix::zeros(rows, cols);
    if let Some(b) = alg.bracket(1) {
        for j in 0..cols {
            for (s, c) in b.value(&[Slot::new(d, j)]).terms() {
                m.set(s.index, j, c.clone());
            }
        }
    }
    m
}

fn require_flat(alg: &LInftyAlgebra) -> Result<()> {
    if alg.is_flat() {
        Ok(())
    } else {
        Err(Error::Curved)
    }
}

/// Blocks of `ℓ₁` keyed by source degree, for every degree of the space.
pub fn differential_blocks(alg: &LInftyAlgebra) -> Result<BTreeMap<i32, RationalMatrix>> {
    require_flat(alg)?;
    Ok(alg
        .space
        .degrees()
        .map(|d| (d, differential_matrix(alg, d)))
        .collect())
}

/// `dim ker δ_i − rank δ_{i−1}`.
pub fn cohomology_dim(alg: &LInftyAlgebra, i: i32) -> Result<usize> {
    require_flat(alg)?;
    let n = alg.space.dim(i);
    let out_rank = differential_matrix(alg, i).rank();
    let in_rank = differential_matrix(alg, i - 1).rank();
    Ok(n - out_rank - in_rank)
}

/// Homotopy operators in degree `i`: `δ_{i−1} h_low + h_high δ_i = Id` on `V_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct HomotopyPair {
    pub degree: i32,
    /// `V_i → V_{i−1}`.
    pub h_low: RationalMatrix,
    /// `V_{i+1} → V_i`.
    pub h_high: RationalMatrix,
    pub residual: RationalMatrix,
}

impl HomotopyPair {
    pub fn is_exact(&self) -> bool {
        self.residual.is_zero()
    }

    /// Applies `h_low` to the degree-`i` part of `v`.
    pub fn apply_low(&self, space: &GradedSpace, v: &Element) -> Element {
        apply_block(&self.h_low, space, v, self.degree, self.degree - 1)
    }

    /// Applies `h_high` to the degree-`(i+1)` part of `v`.
    pub fn apply_high(&self, space: &GradedSpace, v: &Element) -> Element {
        apply_block(&self.h_high, space, v, self.degree + 1, self.degree)
    }
}

pub(crate) fn apply_block(
    m: &RationalMatrix,
    space: &GradedSpace,
    v: &Element,
    from: i32,
    to: i32,
) -> Element {
    let x = v.dense(space, from);
    let y = m.apply(&x).expect("block dimensions match the space");
    Element::from_dense(to, &y)
}

fn selector(rows: usize, indices: &[usize]) -> RationalMatrix {
    let mut m = RationalMatrix::zeros(rows, indices.len());
    for (j, &i) in indices.iter().enumerate() {
        m.set(i, j, Rational::from_integer(1.into()));
    }
    m
}

fn hstack(a: &RationalMatrix, b: &RationalMatrix) -> RationalMatrix {
    let mut cols: Vec<Vec<Rational>> = (0..a.cols()).map(|j| a.column(j)).collect();
    cols.extend((0..b.cols()).map(|j| b.column(j)));
    RationalMatrix::from_columns(a.rows(), cols).expect("equal row counts")
}

fn top_rows(m: &RationalMatrix, r: usize) -> RationalMatrix {
    let mut out = RationalMatrix::zeros(r, m.cols());
    for i in 0..r {
        for j in 0..m.cols() {
            out.set(i, j, m.get(i, j).clone());
        }
    }
    out
}

/// Builds exact homotopy operators in degree `i` from pivot choices.
pub fn homotopy_operators(alg: &LInftyAlgebra, i: i32) -> Result<HomotopyPair> {
    let h = cohomology_dim(alg, i)?;
    if h != 0 {
        return Err(Error::NonzeroCohomology {
            degree: i,
            dimension: h,
        });
    }
    let d0 = differential_matrix(alg, i - 1);
    let d1 = differential_matrix(alg, i);
    Ok(homotopy_from_blocks(i, &d0, &d1))
}

pub(crate) fn homotopy_from_blocks(
    i: i32,
    d0: &RationalMatrix,
    d1: &RationalMatrix,
) -> HomotopyPair {
    let n = d0.rows();
    let pivots = d0.echelon().pivots;
    let r = pivots.len();
    let basis = RationalMatrix::from_columns(n, pivots.iter().map(|&p| d0.column(p)).collect())
        .expect("columns of d0");
    let comp = basis.complement_indices();
    let c = comp.len();
    let e_c = selector(n, &comp);

    let p = hstack(&basis, &e_c);
    let p_inv = p.inverse().expect("basis plus complement is invertible");
    let x = selector(d0.cols(), &pivots);
    let h_low = x.mul(&top_rows(&p_inv, r)).expect("shapes agree");

    let f = d1.mul(&e_c).expect("shapes agree");
    let comp_f = f.complement_indices();
    let q = hstack(&f, &selector(d1.rows(), &comp_f));
    let q_inv = q.inverse().expect("F has full column rank by exactness");
    let h_high = e_c.mul(&top_rows(&q_inv, c)).expect("shapes agree");

    let residual = d0
        .mul(&h_low)
        .and_then(|a| h_high.mul(d1).and_then(|b| a.add(&b)))
        .and_then(|s| s.sub(&RationalMatrix::identity(n)))
        .expect("square");
    HomotopyPair {
        degree: i,
        h_low,
        h_high,
        residual,
    }
}

/// Transports the brackets along degree-preserving invertible maps `g_d`:
/// `ℓ'_k(x₁, …) = g ℓ_k(g⁻¹x₁, …)`.
pub fn change_basis(
    alg: &LInftyAlgebra,
    maps: &BTreeMap<i32, RationalMatrix>,
) -> Result<LInftyAlgebra> {
    let space = &alg.space;
    let mut inverses = BTreeMap::new();
    for d in space.degrees() {
        let g = maps
            .get(&d)
            .ok_or_else(|| Error::Dimension(format!("no map for degree {d}")))?;
        if g.rows() != space.dim(d) || g.cols() != space.dim(d) {
            return Err(Error::Dimension(format!(
                "map for degree {d} has the wrong shape"
            )));
        }
        inverses.insert(d, g.inverse()?);
    }
    let apply = |m: &BTreeMap<i32, RationalMatrix>, v: &Element| -> Element {
        let mut out = Element::zero();
        for d in space.degrees() {
            out = out.add(&apply_block(&m[&d], space, v, d, d));
        }
        out
    };
    let slots = space.all_slots();
    let mut brackets = Vec::new();
    for (k, b) in alg.brackets.iter().enumerate() {
        let mut nb = Bracket::new(k);
        if !b.is_zero() {
            for t in canonical_tuples(&slots, k) {
                let args: Vec<Element> = t
                    .iter()
                    .map(|&s| apply(&inverses, &Element::basis(s)))
                    .collect();
                let v = eval_unchecked(b, &args);
                nb.accumulate_canonical(t, &apply(maps, &v));
            }
        }
        brackets.push(nb);
    }
    LInftyAlgebra::new(space.clone(), brackets, alg.strictness)
}
