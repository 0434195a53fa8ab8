//! Obstructions to extending Maurer-Cartan deformations, the recursive formal
//! solution, coefficient bounds and numeric summation.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::algebra::{
    differential_matrix, mc_eval, twist, twisted_eval, HomotopyPair, LInftyAlgebra,
};
use crate::combinatorics::{
    compositions, convergence_radius, factorial, multinomial, orbit_size, partitions,
    super_catalan, Composition,
};
use crate::error::{Error, Result};
use crate::graded::{distinct_orderings, Bracket, Element};
use crate::scalar::{to_f64, Poly, Rational};

/// Default cap on the number of series terms.
pub const DEFAULT_MAX_ORDER: usize = 40;

fn q(n: BigUint) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

fn inv_factorial(n: usize) -> Rational {
    Rational::new(BigInt::one(), BigInt::from(factorial(n)))
}

/// Which family of index tuples the obstruction sums run over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Reading {
    /// Nondecreasing representatives weighted by their orbit size.
    #[default]
    Partitions,
    /// Every composition, as literally displayed.
    Compositions,
}

/// `Σ_k u_k tᵏ/k!`, stored by its derivatives `u_k` at `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct FormalSeries {
    coeffs: Vec<Element>,
}

impl FormalSeries {
    pub fn new(coeffs: Vec<Element>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::OutOfRange(
                "a series needs at least the base point".into(),
            ));
        }
        for c in &coeffs {
            if !c.has_degree(0) {
                return Err(Error::DegreeMismatch {
                    expected: 0,
                    found: c.degree().unwrap_or(i32::MIN),
                });
            }
        }
        Ok(FormalSeries { coeffs })
    }

    pub fn coeffs(&self) -> &[Element] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Option<&Element> {
        self.coeffs.get(k)
    }

    pub fn base(&self) -> &Element {
        &self.coeffs[0]
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn truncated(&self, k: usize) -> FormalSeries {
        FormalSeries {
            coeffs: self.coeffs[..=k.min(self.order())].to_vec(),
        }
    }

    /// The series as a polynomial path, truncated at degree `cap`.
    pub fn to_poly(&self, cap: usize) -> Element<Poly> {
        let mut out = Element::zero();
        for (j, u) in self.coeffs.iter().enumerate().take(cap.saturating_add(1)) {
            let w = inv_factorial(j);
            out = out.add(&u.map(|c| Poly::monomial(c * &w, j, cap)));
        }
        out
    }

    /// Exact partial sum `Σ_{k ≤ K} u_k tᵏ/k!`.
    pub fn partial_sum(&self, t: &Rational, order: usize) -> Element {
        let mut out = Element::zero();
        let mut power = Rational::one();
        for (k, u) in self.coeffs.iter().enumerate().take(order + 1) {
            out = out.add(&u.scale(&(&power * inv_factorial(k))));
            power *= t;
        }
        out
    }
}

/// Twisted brackets at a base point, computed once and reused.
#[derive(Debug, Clone)]
pub struct Obstructions {
    base: Element,
    twisted: LInftyAlgebra,
    reading: Reading,
}

impl Obstructions {
    /// Requires `MC(u₀) = 0`.
    pub fn new(alg: &LInftyAlgebra, u0: &Element) -> Result<Self> {
        if !mc_eval(alg, u0)?.is_zero() {
            return Err(Error::BaseNotMaurerCartan);
        }
        Self::at(alg, u0)
    }

    /// No Maurer-Cartan requirement; the derivative formulas hold at any base point.
    pub fn at(alg: &LInftyAlgebra, u0: &Element) -> Result<Self> {
        Ok(Obstructions {
            base: u0.clone(),
            twisted: twist(alg, u0)?,
            reading: Reading::default(),
        })
    }

    pub fn with_reading(mut self, reading: Reading) -> Self {
        self.reading = reading;
        self
    }

    pub fn base(&self) -> &Element {
        &self.base
    }

    pub fn twisted(&self) -> &LInftyAlgebra {
        &self.twisted
    }

    fn l1(&self, v: &Element) -> Element {
        self.twisted.eval_unchecked(1, std::slice::from_ref(v))
    }

    /// `Σ_{i≥2} Σ_{r⃗_i = m} binom(m; r⃗)/i! ℓ^{u₀}_i(u_{r₁}, …, u_{r_i})`,
    /// which is `Obs^{m−1}`.
    fn weighted_sum(&self, coeffs: &[Element], m: usize) -> Element {
        let top = m.min(self.twisted.strictness().saturating_sub(1));
        let mut terms: Vec<(Composition, usize, Rational)> = Vec::new();
        for i in 2..=top {
            if self.twisted.bracket(i).is_none_or(Bracket::is_zero) {
                continue;
            }
            let family = match self.reading {
                Reading::Partitions => partitions(m, i),
                Reading::Compositions => compositions(m, i),
            }
            .expect("2 <= i <= m");
            for r in family {
                let mut w = q(multinomial(m, &r).expect("parts sum to m")) * inv_factorial(i);
                if self.reading == Reading::Partitions {
                    w *= q(orbit_size(&r));
                }
                terms.push((r, i, w));
            }
        }
        let values: Vec<Element> = terms
            .par_iter()
            .map(|(r, i, w)| {
                let args: Vec<Element> = r.parts().iter().map(|&p| coeffs[p].clone()).collect();
                self.twisted.eval_unchecked(*i, &args).scale(w)
            })
            .collect();
        values.iter().fold(Element::zero(), |acc, v| acc.add(v))
    }

    /// `Obs^k` of the prefix `u₀, …, u_k`.
    pub fn obstruction(&self, prefix: &[Element]) -> Result<Element> {
        let k = prefix
            .len()
            .checked_sub(1)
            .ok_or_else(|| Error::OutOfRange("empty prefix".into()))?;
        Ok(self.weighted_sum(prefix, k + 1))
    }

    /// `∂ᵏ MC(u_t)` at `t = 0` for `k = 0, …, K` via the obstruction formula.
    pub fn taylor_mc(&self, series: &FormalSeries, order: usize) -> Result<Vec<Element>> {
        check_order(series, order)?;
        let c = series.coeffs();
        let mut out = vec![self.twisted.curvature()];
        for k in 1..=order {
            out.push(self.l1(&c[k]).add(&self.weighted_sum(&c[..k], k)));
        }
        Ok(out)
    }
}

fn check_order(series: &FormalSeries, order: usize) -> Result<()> {
    if series.order() < order {
        return Err(Error::OutOfRange(format!(
            "series of order {} asked for order {order}",
            series.order()
        )));
    }
    Ok(())
}

/// `Obs^k` for the prefix `u₀, …, u_k`; the base point must be Maurer-Cartan.
pub fn obstruction(alg: &LInftyAlgebra, prefix: &[Element]) -> Result<Element> {
    let u0 = prefix
        .first()
        .ok_or_else(|| Error::OutOfRange("empty prefix".into()))?;
    Obstructions::new(alg, u0)?.obstruction(prefix)
}

/// `∂ᵏ MC(u_t)` at `t = 0`, `k ≤ K`, from `ℓ₁^{u₀}(u_k) + Obs^{k−1}`.
pub fn taylor_mc(alg: &LInftyAlgebra, series: &FormalSeries, order: usize) -> Result<Vec<Element>> {
    Obstructions::at(alg, series.base())?.taylor_mc(series, order)
}

/// The same derivatives by substituting the truncated polynomial path into `MC`.
pub fn taylor_mc_substitution(
    alg: &LInftyAlgebra,
    series: &FormalSeries,
    order: usize,
) -> Result<Vec<Element>> {
    check_order(series, order)?;
    let path = series.truncated(order).to_poly(order);
    let mc = twisted_eval(alg, &path, &[]);
    Ok((0..=order)
        .map(|k| mc.map(|p| p.derivative_at_zero(k)))
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObstructionReport {
    pub k: usize,
    pub value: Element,
    pub is_cocycle: bool,
    /// Whether the class vanishes, i.e. `Obs^k` lies in the image of `ℓ₁^{u₀}`.
    pub class_zero: Option<bool>,
}

/// Checks that `u₀, …, u_k` is a `k`-deformation and that `Obs^k` is a cocycle.
pub fn verify_cocycle(alg: &LInftyAlgebra, prefix: &[Element]) -> Result<ObstructionReport> {
    let series = FormalSeries::new(prefix.to_vec())?;
    let engine = Obstructions::new(alg, series.base())?;
    let k = series.order();
    if let Some(order) = engine
        .taylor_mc(&series, k)?
        .iter()
        .position(|d| !d.is_zero())
    {
        return Err(Error::NotDeformation { order });
    }
    let value = engine.obstruction(prefix)?;
    let is_cocycle = engine.l1(&value).is_zero();
    let space = engine.twisted.space();
    let d0 = differential_matrix(&engine.twisted, 0);
    let class_zero = d0.solve(&value.dense(space, 1)).ok().map(|s| s.is_some());
    Ok(ObstructionReport {
        k,
        value,
        is_cocycle,
        class_zero,
    })
}

/// The formal solution with `u₀ = 0`: `u_{k+1} = −h(Obs^k)`.
pub fn extend_formal(
    alg: &LInftyAlgebra,
    h: &HomotopyPair,
    u1: &Element,
    order: usize,
) -> Result<FormalSeries> {
    extend_formal_from(alg, &Element::zero(), h, u1, order)
}

/// The formal solution through `u₀`; `h` must be a degree-1 homotopy of `ℓ^{u₀}`.
pub fn extend_formal_from(
    alg: &LInftyAlgebra,
    u0: &Element,
    h: &HomotopyPair,
    u1: &Element,
    order: usize,
) -> Result<FormalSeries> {
    let engine = Obstructions::new(alg, u0)?;
    let space = alg.space();
    if h.degree != 1 || h.h_low.rows() != space.dim(0) || h.h_low.cols() != space.dim(1) {
        return Err(Error::Dimension(
            "extension needs homotopy operators in degree 1".into(),
        ));
    }
    u1.validate(space)?;
    if !u1.has_degree(0) {
        return Err(Error::DegreeMismatch {
            expected: 0,
            found: u1.degree().unwrap_or(i32::MIN),
        });
    }
    if !engine.l1(u1).is_zero() {
        return Err(Error::NotCocycle);
    }
    let mut coeffs = vec![u0.clone(), u1.clone()];
    for _ in 1..order {
        let obs = engine.obstruction(&coeffs)?;
        coeffs.push(h.apply_low(space, &obs).neg());
    }
    coeffs.truncate(order + 1);
    FormalSeries::new(coeffs)
}

/// Norm used for coefficients and operator bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Norm {
    /// Largest absolute coordinate.
    #[default]
    Max,
}

fn exact_max_norm(v: &Element) -> Rational {
    v.terms()
        .map(|(_, c)| c.abs())
        .max()
        .unwrap_or_else(Rational::zero)
}

/// Row-sum bound on `‖ℓ_k‖`: over output coordinates, the largest sum of
/// absolute coefficients counted with the number of orderings of each input tuple.
pub fn bracket_norm(b: &Bracket) -> Rational {
    let mut rows: std::collections::BTreeMap<_, Rational> = std::collections::BTreeMap::new();
    for (inputs, out) in b.entries() {
        let mult = Rational::from_integer(BigInt::from(distinct_orderings(inputs)));
        for (slot, c) in out.terms() {
            *rows.entry(slot).or_insert_with(Rational::zero) += c.abs() * &mult;
        }
    }
    rows.into_values().max().unwrap_or_else(Rational::zero)
}

fn alpha_exact(alg: &LInftyAlgebra) -> Rational {
    alg.brackets()
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, b)| bracket_norm(b) * inv_factorial(i))
        .sum()
}

/// `α = Σ_{i≥1} ‖ℓ_i‖/i!`.
pub fn alpha_bound(alg: &LInftyAlgebra, norm: Norm) -> f64 {
    match norm {
        Norm::Max => to_f64(&alpha_exact(alg)),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundRow {
    pub k: usize,
    /// `‖u_k‖/k!`, when a series is attached.
    pub computed: Option<f64>,
    /// `‖u₁‖ᵏ(‖h₁‖α)^{k−1} C_k`.
    pub bound: f64,
    /// Exact comparison `computed ≤ bound`.
    pub within: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceCertificate {
    pub h1_norm: f64,
    pub alpha: f64,
    pub u1_norm: f64,
    pub radius: f64,
    pub rows: Vec<BoundRow>,
    /// `(K, ‖MC(Σ_{k≤K})‖)` for summed series.
    pub residuals: Vec<(usize, f64)>,
}

impl ConvergenceCertificate {
    pub fn holds(&self) -> bool {
        self.rows.iter().all(|r| r.within)
    }

    /// Whether `|t|·‖u₁‖` lies strictly inside the certified radius.
    pub fn covers(&self, t: f64) -> bool {
        t.abs() * self.u1_norm < self.radius
    }

    /// Sum of the bound table beyond order `K` at parameter `t`, using
    /// `C_{k+1}/C_k < 3 + √8`; infinite when that ratio does not force decay.
    pub fn tail_estimate(&self, t: f64) -> f64 {
        let Some(last) = self.rows.last() else {
            return f64::INFINITY;
        };
        let ratio = (3.0 + 8f64.sqrt()) * self.h1_norm * self.alpha * self.u1_norm * t.abs();
        if ratio >= 1.0 {
            return f64::INFINITY;
        }
        last.bound * t.abs().powi(last.k as i32) * ratio / (1.0 - ratio)
    }
}

fn certificate(
    h1: &Rational,
    alpha: &Rational,
    u1: &Rational,
    computed: &[Option<Rational>],
) -> Result<ConvergenceCertificate> {
    if h1.is_negative() || alpha.is_negative() || u1.is_negative() {
        return Err(Error::DegenerateBound(to_f64(&(h1 * alpha))));
    }
    let radius = convergence_radius(to_f64(h1), to_f64(alpha))?;
    let p = h1 * alpha;
    let mut rows = Vec::with_capacity(computed.len());
    let mut u_pow = u1.clone();
    let mut p_pow = Rational::one();
    for (idx, c) in computed.iter().enumerate() {
        let k = idx + 1;
        let bound = &u_pow * &p_pow * q(super_catalan(k)?);
        let within = c.as_ref().is_none_or(|c| *c <= bound);
        rows.push(BoundRow {
            k,
            computed: c.as_ref().map(to_f64),
            bound: to_f64(&bound),
            within,
        });
        u_pow *= u1;
        p_pow *= &p;
    }
    Ok(ConvergenceCertificate {
        h1_norm: to_f64(h1),
        alpha: to_f64(alpha),
        u1_norm: to_f64(u1),
        radius,
        rows,
        residuals: Vec::new(),
    })
}

fn float_to_rational(x: f64) -> Result<Rational> {
    Rational::from_float(x).ok_or(Error::DegenerateBound(x))
}

/// Bound table for orders `1..=K` from the given norms.
pub fn coefficient_bounds(
    alg: &LInftyAlgebra,
    h1_norm: f64,
    u1_norm: f64,
    order: usize,
) -> Result<ConvergenceCertificate> {
    let h1 = float_to_rational(h1_norm)?;
    let u1 = float_to_rational(u1_norm)?;
    certificate(&h1, &alpha_exact(alg), &u1, &vec![None; order])
}

/// Bound table for a computed series, compared exactly against `‖u_k‖/k!`.
/// `h` and `α` refer to the brackets twisted at the base point.
pub fn certify(
    alg: &LInftyAlgebra,
    h: &HomotopyPair,
    series: &FormalSeries,
) -> Result<ConvergenceCertificate> {
    let twisted = twist(alg, series.base())?;
    let h1 = h.h_low.max_row_sum();
    let u1 = series
        .coeff(1)
        .map(exact_max_norm)
        .unwrap_or_else(Rational::zero);
    let computed: Vec<Option<Rational>> = series
        .coeffs()
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, u)| Some(exact_max_norm(u) * inv_factorial(k)))
        .collect();
    certificate(&h1, &alpha_exact(&twisted), &u1, &computed)
}

/// A numerically summed series.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSum {
    pub t: f64,
    pub value: Element<f64>,
    /// `‖u_k tᵏ/k!‖` for `k = 0, …, K`.
    pub term_norms: Vec<f64>,
    /// `‖MC(Σ_{j≤k})‖` for `k = 0, …, K`.
    pub residuals: Vec<f64>,
}

impl SeriesSum {
    pub fn residual(&self) -> f64 {
        *self.residuals.last().unwrap_or(&0.0)
    }

    /// Largest ratio between consecutive nonzero term norms from order `from` on.
    pub fn decay_ratio(&self, from: usize) -> Option<f64> {
        let norms: Vec<f64> = self
            .term_norms
            .iter()
            .skip(from)
            .copied()
            .filter(|&x| x > 0.0)
            .collect();
        norms.windows(2).map(|w| w[1] / w[0]).reduce(f64::max)
    }
}

/// Sums the series at `t`; partial sums are formed exactly at the binary value
/// of `t` and rounded once, and residuals are exact Maurer-Cartan norms.
pub fn sum_series(alg: &LInftyAlgebra, series: &FormalSeries, t: f64) -> Result<SeriesSum> {
    let tq = float_to_rational(t)?;
    let mut partial = Element::zero();
    let mut power = Rational::one();
    let mut term_norms = Vec::with_capacity(series.coeffs().len());
    let mut residuals = Vec::with_capacity(series.coeffs().len());
    for (k, u) in series.coeffs().iter().enumerate() {
        let term = u.scale(&(&power * inv_factorial(k)));
        term_norms.push(to_f64(&exact_max_norm(&term)));
        partial = partial.add(&term);
        residuals.push(to_f64(&exact_max_norm(&mc_eval(alg, &partial)?)));
        power *= &tq;
    }
    Ok(SeriesSum {
        t,
        value: partial.to_f64(),
        term_norms,
        residuals,
    })
}

/// `ψ(v)(t)` with its certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct Psi {
    pub series: FormalSeries,
    pub sum: SeriesSum,
    pub certificate: ConvergenceCertificate,
    pub certified: bool,
    pub tail_estimate: f64,
}

/// Extends `v` to order `K`, sums at `t` and certifies against the radius.
pub fn psi(
    alg: &LInftyAlgebra,
    h: &HomotopyPair,
    v: &Element,
    order: usize,
    t: f64,
) -> Result<Psi> {
    let series = extend_formal(alg, h, v, order)?;
    let mut certificate = certify(alg, h, &series)?;
    let sum = sum_series(alg, &series, t)?;
    certificate.residuals = sum.residuals.iter().copied().enumerate().collect();
    let certified = certificate.covers(t);
    let tail_estimate = certificate.tail_estimate(t);
    let n = sum.term_norms.len();
    if !certified && n >= 3 {
        let growing = sum.term_norms[n - 1] > sum.term_norms[n - 2]
            && sum.term_norms[n - 2] > sum.term_norms[n - 3];
        if growing && sum.residual() > sum.residuals[1] {
            return Err(Error::Divergent {
                order,
                residual: sum.residual(),
            });
        }
    }
    Ok(Psi {
        series,
        sum,
        certificate,
        certified,
        tail_estimate,
    })
}

/// Checks that the coefficients for `s·v` are `sᵏ` times those for `v`.
pub fn scaling_check(
    alg: &LInftyAlgebra,
    h: &HomotopyPair,
    v: &Element,
    s: &Rational,
    order: usize,
) -> Result<bool> {
    let a = extend_formal(alg, h, v, order)?;
    let b = extend_formal(alg, h, &v.scale(s), order)?;
    let mut power = Rational::one();
    for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
        if x.scale(&power) != *y {
            return Ok(false);
        }
        power *= s;
    }
    Ok(true)
}

/// Largest polynomial degree accepted by [`appendix_b_check`].
pub const DEGREE_BUDGET: usize = 256;

fn poly_degree(v: &Element<Poly>) -> usize {
    v.terms().filter_map(|(_, p)| p.degree()).max().unwrap_or(0)
}

fn derive(v: &Element<Poly>, k: usize) -> Element<Poly> {
    v.map(|p| p.derivative(k))
}

/// Compares both sides of
/// `∂ᵏ ℓ₁^{u_t}(v_t) = ℓ₁^{u_t}(∂ᵏv_t) + Σ binom(k; r⃗)/(i! j!) ℓ^{u_t}_{i+1}(∂^{r₁}u_t, …, ∂^{r_i}u_t, ∂ʲv_t)`
/// as exact polynomials in `t`.
pub fn appendix_b_check(
    alg: &LInftyAlgebra,
    u: &Element<Poly>,
    v: &Element<Poly>,
    k: usize,
) -> Result<bool> {
    u.validate(alg.space())?;
    v.validate(alg.space())?;
    if !u.has_degree(0) {
        return Err(Error::DegreeMismatch {
            expected: 0,
            found: u.degree().unwrap_or(i32::MIN),
        });
    }
    let n = alg.strictness().saturating_sub(1);
    let budget = poly_degree(u) * n + poly_degree(v);
    if budget > DEGREE_BUDGET {
        return Err(Error::DegreeBudget(format!(
            "paths reach degree {budget}, budget is {DEGREE_BUDGET}"
        )));
    }
    let lhs = derive(&twisted_eval(alg, u, std::slice::from_ref(v)), k);
    let derivs_u: Vec<Element<Poly>> = (0..=k).map(|r| derive(u, r)).collect();
    let derivs_v: Vec<Element<Poly>> = (0..=k).map(|j| derive(v, j)).collect();
    let mut rhs = twisted_eval(alg, u, &derivs_v[k..=k]);
    for i in 1..=k.min(n.saturating_sub(1)) {
        for j in 0..=(k - i) {
            for r in compositions(k - j, i)? {
                let w = q(factorial(k))
                    / q(r
                        .parts()
                        .iter()
                        .fold(factorial(j), |acc, &x| acc * factorial(x)))
                    * inv_factorial(i);
                let mut args: Vec<Element<Poly>> =
                    r.parts().iter().map(|&p| derivs_u[p].clone()).collect();
                args.push(derivs_v[j].clone());
                rhs = rhs.add(&twisted_eval(alg, u, &args).scale(&w));
            }
        }
    }
    Ok(lhs.sub(&rhs).is_zero())
}

/// The identity `ℓ₁^{u₀}(∂ᵏMC) + Σ binom(k; r⃗)/(i! j!) ℓ^{u₀}_{i+1}(u_{r₁}, …, u_{r_i}, ∂ʲMC) = 0` at `t = 0`.
pub fn lemma_dmc2_check(alg: &LInftyAlgebra, series: &FormalSeries, k: usize) -> Result<bool> {
    let engine = Obstructions::at(alg, series.base())?;
    let d = engine.taylor_mc(series, k)?;
    let c = series.coeffs();
    let n = alg.strictness().saturating_sub(1);
    let mut total = engine.l1(&d[k]);
    for i in 1..=k.min(n.saturating_sub(1)) {
        for j in 0..=(k - i) {
            if d[j].is_zero() {
                continue;
            }
            for r in compositions(k - j, i)? {
                let w = q(factorial(k))
                    / q(r
                        .parts()
                        .iter()
                        .fold(factorial(j), |acc, &x| acc * factorial(x)))
                    * inv_factorial(i);
                let mut args: Vec<Element> = r.parts().iter().map(|&p| c[p].clone()).collect();
                args.push(d[j].clone());
                total = total.add(&engine.twisted.eval_unchecked(i + 1, &args).scale(&w));
            }
        }
    }
    Ok(total.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::homotopy_operators;
    use crate::graded::{GradedSpace, Slot};
    use crate::instances::{conic, cubic, parabola, sl2_deformation};
    use crate::scalar::{int, ratio};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const X1: Slot = Slot::new(0, 0);
    const X2: Slot = Slot::new(0, 1);
    const Y: Slot = Slot::new(1, 0);

    fn el(terms: &[(Slot, Rational)]) -> Element {
        let mut e = Element::zero();
        for (s, c) in terms {
            e.add_term(*s, c.clone());
        }
        e
    }

    fn random_element(rng: &mut ChaCha8Rng, space: &GradedSpace, d: i32) -> Element {
        let mut e = Element::zero();
        for s in space.slots(d) {
            if rng.gen_bool(0.7) {
                e.add_term(s, ratio(rng.gen_range(-3..=3), rng.gen_range(1..=3)));
            }
        }
        e
    }

    fn random_series(rng: &mut ChaCha8Rng, space: &GradedSpace, order: usize) -> FormalSeries {
        FormalSeries::new((0..=order).map(|_| random_element(rng, space, 0)).collect()).unwrap()
    }

    #[test]
    fn low_order_obstructions() {
        let alg = cubic();
        let u1 = el(&[(X1, int(2)), (X2, int(1))]);
        let u2 = el(&[(X1, int(-1)), (X2, int(3))]);
        let z = Element::zero();
        let t = Obstructions::new(&alg, &z).unwrap();
        let l2 = |a: &Element, b: &Element| alg.eval(2, &[a.clone(), b.clone()]).unwrap();
        let l3 = alg.eval(3, &[u1.clone(), u1.clone(), u1.clone()]).unwrap();
        assert_eq!(
            t.obstruction(&[z.clone(), u1.clone()]).unwrap(),
            l2(&u1, &u1)
        );
        let expected = l2(&u1, &u2).scale(&int(3)).add(&l3);
        assert_eq!(
            t.obstruction(&[z.clone(), u1.clone(), u2.clone()]).unwrap(),
            expected
        );
        assert!(t
            .obstruction(&[z.clone(), Element::zero()])
            .unwrap()
            .is_zero());
        assert_eq!(
            obstruction(&alg, &[el(&[(X2, int(1))]), u1]).unwrap_err(),
            Error::BaseNotMaurerCartan
        );
    }

    #[test]
    fn readings_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let alg = cubic();
        for _ in 0..10 {
            let s = random_series(&mut rng, alg.space(), 6);
            let a = Obstructions::at(&alg, s.base()).unwrap();
            let b = a.clone().with_reading(Reading::Compositions);
            assert_eq!(a.taylor_mc(&s, 6).unwrap(), b.taylor_mc(&s, 6).unwrap());
        }
    }

    #[test]
    fn parabola_taylor_example() {
        let alg = parabola();
        let s = FormalSeries::new(vec![
            Element::zero(),
            el(&[(X1, int(1))]),
            el(&[(X2, int(-1))]),
        ])
        .unwrap();
        let d = taylor_mc(&alg, &s, 2).unwrap();
        assert!(d[0].is_zero());
        assert!(d[1].is_zero());
        assert!(d[2].is_zero());
        assert_eq!(d, taylor_mc_substitution(&alg, &s, 2).unwrap());
        let s1 = FormalSeries::new(vec![Element::zero(), el(&[(X2, int(1))])]).unwrap();
        assert_eq!(taylor_mc(&alg, &s1, 1).unwrap()[1], el(&[(Y, int(1))]));
    }

    #[test]
    fn oracle_agrees_on_cubic_with_nonzero_base() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let alg = cubic();
        for _ in 0..10 {
            let s = random_series(&mut rng, alg.space(), 5);
            assert_eq!(
                taylor_mc(&alg, &s, 5).unwrap(),
                taylor_mc_substitution(&alg, &s, 5).unwrap()
            );
        }
        assert!(taylor_mc(&alg, &random_series(&mut rng, alg.space(), 2), 3).is_err());
    }

    #[test]
    fn parabola_extension_terminates() {
        let alg = parabola();
        let h = homotopy_operators(&alg, 1).unwrap();
        let v = ratio(1, 20);
        let s = extend_formal(&alg, &h, &el(&[(X1, v.clone())]), 6).unwrap();
        assert_eq!(s.coeff(2).unwrap(), &el(&[(X2, -(&v * &v))]));
        for k in 3..=6 {
            assert!(s.coeff(k).unwrap().is_zero());
        }
        let sum = s.partial_sum(&int(1), 6);
        assert_eq!(sum, el(&[(X1, v.clone()), (X2, -(&v * &v) / int(2))]));
        assert!(extend_formal(&alg, &h, &Element::zero(), 4)
            .unwrap()
            .coeffs()
            .iter()
            .all(Element::is_zero));
        assert_eq!(
            extend_formal(&alg, &h, &el(&[(X2, int(1))]), 3).unwrap_err(),
            Error::NotCocycle
        );
    }

    #[test]
    fn cubic_extension_matches_closed_form() {
        let alg = cubic();
        let h = homotopy_operators(&alg, 1).unwrap();
        let v = ratio(-2, 7);
        let s = extend_formal(&alg, &h, &el(&[(X1, v.clone())]), 8).unwrap();
        let sum = s.partial_sum(&int(1), 8);
        let b = -(&v * &v / int(2) + &v * &v * &v / int(6));
        assert_eq!(sum, el(&[(X1, v), (X2, b)]));
        for k in 0..=7 {
            let report = verify_cocycle(&alg, &s.coeffs()[..=k]).unwrap();
            assert!(report.is_cocycle);
            assert_eq!(report.class_zero, Some(true));
        }
        assert!(taylor_mc(&alg, &s, 8).unwrap().iter().all(Element::is_zero));
    }

    #[test]
    fn fault_injection_reports_order() {
        let alg = cubic();
        let h = homotopy_operators(&alg, 1).unwrap();
        let s = extend_formal(&alg, &h, &el(&[(X1, int(1))]), 4).unwrap();
        let mut bad = s.coeffs().to_vec();
        bad[2] = bad[2].add(&el(&[(X2, int(1))]));
        assert_eq!(
            verify_cocycle(&alg, &bad).unwrap_err(),
            Error::NotDeformation { order: 2 }
        );
    }

    #[test]
    fn sl2_prefixes_are_cocycles() {
        let alg = sl2_deformation();
        let h = homotopy_operators(&alg, 1).unwrap();
        let d = differential_matrix(&alg, 0);
        let kernel = d.nullspace_basis();
        let u1 = Element::from_dense(0, &kernel[0])
            .add(&Element::from_dense(0, &kernel[1]).scale(&ratio(1, 3)));
        let s = extend_formal(&alg, &h, &u1, 4).unwrap();
        for k in 1..=4 {
            let r = verify_cocycle(&alg, &s.coeffs()[..=k]).unwrap();
            assert!(r.is_cocycle);
        }
        assert!(taylor_mc(&alg, &s, 4).unwrap().iter().all(Element::is_zero));
        for k in 0..=3 {
            assert!(lemma_dmc2_check(&alg, &s, k).unwrap());
        }
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(alpha_bound(&parabola(), Norm::Max), 1.5);
        assert_eq!(alpha_bound(&conic(), Norm::Max), 3.0);
        assert_eq!(alpha_bound(&parabola().scaled(&int(4)), Norm::Max), 6.0);
        let space = GradedSpace::from_dims(&[(0, 1), (1, 1)]).unwrap();
        let mut l1 = Bracket::new(1);
        l1.insert_term(&space, &[Slot::new(0, 0)], Slot::new(1, 0), int(1))
            .unwrap();
        let only = LInftyAlgebra::new(space, vec![Bracket::new(0), l1], 2).unwrap();
        assert_eq!(alpha_bound(&only, Norm::Max), 1.0);
    }

    #[test]
    fn bound_table_examples() {
        let c = coefficient_bounds(&parabola(), 1.0, 0.5, 3).unwrap();
        assert_eq!(c.rows[0].bound, 0.5);
        assert_eq!(c.rows[1].bound, 0.25 * 1.5);
        assert_eq!(c.rows[2].bound, 0.125 * 2.25 * 3.0);
        assert!(coefficient_bounds(&parabola(), 0.0, 0.5, 3).is_err());

        let alg = parabola();
        let h = homotopy_operators(&alg, 1).unwrap();
        let s = extend_formal(&alg, &h, &el(&[(X1, ratio(1, 10))]), 5).unwrap();
        let cert = certify(&alg, &h, &s).unwrap();
        assert!(cert.holds());
        assert_eq!(cert.rows[1].computed, Some(0.005));
        assert_eq!(cert.radius, 1.0 / 18.0);
    }

    #[test]
    fn psi_on_parabola_is_exact() {
        let alg = parabola();
        let h = homotopy_operators(&alg, 1).unwrap();
        let p = psi(&alg, &h, &el(&[(X1, ratio(1, 20))]), 10, 1.0).unwrap();
        assert_eq!(p.sum.residual(), 0.0);
        assert!(p.certified);
        assert_eq!(p.sum.value.get(X1), 0.05);
        assert_eq!(p.sum.value.get(X2), -0.00125);
        let zero = psi(&alg, &h, &Element::zero(), 5, 1.0).unwrap();
        assert!(zero.sum.value.is_zero());
    }

    #[test]
    fn conic_converges_inside_half_radius() {
        let alg = conic();
        let h = homotopy_operators(&alg, 1).unwrap();
        let p = psi(&alg, &h, &el(&[(X1, ratio(1, 72))]), DEFAULT_MAX_ORDER, 1.0).unwrap();
        assert!(p.certificate.holds());
        assert!(p.certified);
        assert!(p.sum.residual() <= 1e-10, "{}", p.sum.residual());
        assert!(p.sum.decay_ratio(1).unwrap() <= 0.9);
    }

    #[test]
    fn scaling_law() {
        let alg = conic();
        let h = homotopy_operators(&alg, 1).unwrap();
        let v = el(&[(X1, ratio(2, 5))]);
        assert!(scaling_check(&alg, &h, &v, &ratio(1, 2), 8).unwrap());
        assert!(scaling_check(&alg, &h, &v, &ratio(1, 3), 8).unwrap());
    }

    fn random_poly(rng: &mut ChaCha8Rng, deg: usize) -> Poly {
        Poly::new(
            (0..=deg)
                .map(|_| ratio(rng.gen_range(-3..=3), rng.gen_range(1..=2)))
                .collect(),
            Poly::UNBOUNDED,
        )
    }

    fn random_path(rng: &mut ChaCha8Rng, space: &GradedSpace, d: i32, deg: usize) -> Element<Poly> {
        let mut e = Element::zero();
        for s in space.slots(d) {
            e.add_term(s, random_poly(rng, deg));
        }
        e
    }

    #[test]
    fn appendix_b_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let alg = cubic();
        let c = |e: Element| e.map(|x| Poly::constant(x.clone(), Poly::UNBOUNDED));
        let u = c(el(&[(X1, int(2))]));
        let v = c(el(&[(X2, int(-1))]));
        for k in 1..=3 {
            assert!(appendix_b_check(&alg, &u, &v, k).unwrap());
        }
        for k in 1..=4 {
            let u = random_path(&mut rng, alg.space(), 0, 2);
            let v = random_path(&mut rng, alg.space(), 0, 3);
            assert!(appendix_b_check(&alg, &u, &v, k).unwrap());
        }
        let huge = Element::term(X1, Poly::monomial(int(1), 200, Poly::UNBOUNDED));
        assert!(matches!(
            appendix_b_check(&alg, &huge, &v, 1),
            Err(Error::DegreeBudget(_))
        ));
    }

    #[test]
    fn wrong_weights_break_appendix_b() {
        // ℓ₂ alone, k = 2: dropping the 1/j! factor doubles the ℓ₂(u', v') term.
        let alg = parabola();
        let u = Element::term(X1, Poly::new(vec![int(0), int(1)], Poly::UNBOUNDED));
        let v = Element::term(X1, Poly::new(vec![int(0), int(1)], Poly::UNBOUNDED));
        let lhs = derive(&twisted_eval(&alg, &u, std::slice::from_ref(&v)), 2);
        assert_eq!(
            lhs,
            Element::term(Y, Poly::constant(int(2), Poly::UNBOUNDED))
        );
        assert!(appendix_b_check(&alg, &u, &v, 2).unwrap());
    }

    #[test]
    fn lemma_on_parabola() {
        let alg = parabola();
        let h = homotopy_operators(&alg, 1).unwrap();
        let s = extend_formal(&alg, &h, &el(&[(X1, int(3))]), 4).unwrap();
        for k in 0..=4 {
            assert!(lemma_dmc2_check(&alg, &s, k).unwrap());
        }
    }
}
