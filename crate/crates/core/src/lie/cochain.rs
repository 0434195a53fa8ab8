//! Alternating cochains `C^k(g) = Hom(Λ^k g, g)` in the standard basis.
//!
//! The basis vector with index `rank(I) * n + m` sends `e_{i₁} ∧ ⋯ ∧ e_{i_k}`
//! (for the increasing tuple `I`) to `e_m`. Tuples are ranked lexicographically.

use std::fmt;

use crate::error::{Error, Result};
use crate::graded::{Element, Slot};
use crate::matrix::Matrix;
use crate::scalar::{Rational, Scalar};

pub(crate) fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Increasing `k`-tuples of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::with_capacity(binom(n, k));
    go(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Lexicographic rank of an increasing tuple among the `k`-subsets of `0..n`.
pub fn subset_rank(n: usize, tuple: &[usize]) -> usize {
    let k = tuple.len();
    let mut rank = 0;
    let mut next = 0;
    for (p, &v) in tuple.iter().enumerate() {
        for w in next..v {
            rank += binom(n - w - 1, k - p - 1);
        }
        next = v + 1;
    }
    rank
}

/// Sorts a tuple of indices; returns `None` on a repeat, else the sorted tuple and the permutation parity.
fn sort_with_sign(idx: &[usize]) -> Option<(Vec<usize>, bool)> {
    let mut v = idx.to_vec();
    let mut odd = false;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            odd = !odd;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some((v, odd))
    }
}

#[derive(Clone, PartialEq)]
pub struct Cochain<C = Rational> {
    n: usize,
    k: usize,
    data: Vec<C>,
}

impl<C: Scalar> Cochain<C> {
    pub fn dim(n: usize, k: usize) -> usize {
        binom(n, k) * n
    }

    pub fn zeros(n: usize, k: usize) -> Self {
        Cochain {
            n,
            k,
            data: vec![C::zero(); Self::dim(n, k)],
        }
    }

    pub fn basis(n: usize, k: usize, index: usize) -> Self {
        let mut c = Self::zeros(n, k);
        c.data[index] = C::one();
        c
    }

    pub fn from_data(n: usize, k: usize, data: Vec<C>) -> Result<Self> {
        if data.len() != Self::dim(n, k) {
            return Err(Error::LengthMismatch {
                expected: Self::dim(n, k),
                found: data.len(),
            });
        }
        Ok(Cochain { n, k, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arity(&self) -> usize {
        self.k
    }

    pub fn data(&self) -> &[C] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(C::is_zero)
    }

    /// Value on an increasing tuple with the given rank.
    fn row(&self, rank: usize) -> &[C] {
        &self.data[rank * self.n..(rank + 1) * self.n]
    }

    /// Value on basis vectors `e_{idx[0]}, …, e_{idx[k-1]}` in any order.
    pub fn eval_basis(&self, idx: &[usize]) -> Vec<C> {
        debug_assert_eq!(idx.len(), self.k);
        match sort_with_sign(idx) {
            None => vec![C::zero(); self.n],
            Some((sorted, odd)) => {
                let row = self.row(subset_rank(self.n, &sorted));
                if odd {
                    row.iter().map(|c| -c.clone()).collect()
                } else {
                    row.to_vec()
                }
            }
        }
    }

    /// Multilinear evaluation on arbitrary vectors.
    pub fn eval(&self, xs: &[&[C]]) -> Vec<C> {
        debug_assert_eq!(xs.len(), self.k);
        let mut out = vec![C::zero(); self.n];
        let mut idx = Vec::with_capacity(self.k);
        self.eval_rec(xs, &mut idx, C::one(), &mut out);
        out
    }

    fn eval_rec(&self, xs: &[&[C]], idx: &mut Vec<usize>, coeff: C, out: &mut [C]) {
        let p = idx.len();
        if p == self.k {
            if let Some((sorted, odd)) = sort_with_sign(idx) {
                let row = self.row(subset_rank(self.n, &sorted));
                let c = if odd { -coeff } else { coeff };
                for (o, r) in out.iter_mut().zip(row) {
                    if !r.is_zero() {
                        *o = o.clone() + c.clone() * r.clone();
                    }
                }
            }
            return;
        }
        for (i, x) in xs[p].iter().enumerate() {
            if x.is_zero() || idx.contains(&i) {
                continue;
            }
            idx.push(i);
            self.eval_rec(xs, idx, coeff.clone() * x.clone(), out);
            idx.pop();
        }
    }

    /// Builds a cochain from its values on increasing tuples.
    pub fn from_fn(n: usize, k: usize, f: impl Fn(&[usize]) -> Vec<C>) -> Self {
        let mut data = Vec::with_capacity(Self::dim(n, k));
        for t in subsets(n, k) {
            data.extend(f(&t));
        }
        Cochain { n, k, data }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a.clone() - b.clone())
    }

    fn zip(&self, other: &Self, f: impl Fn(&C, &C) -> C) -> Self {
        assert_eq!(
            (self.n, self.k),
            (other.n, other.k),
            "cochain shapes differ"
        );
        Cochain {
            n: self.n,
            k: self.k,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        Cochain {
            n: self.n,
            k: self.k,
            data: self.data.iter().map(|a| a.clone() * c.clone()).collect(),
        }
    }

    pub fn map<D: Scalar>(&self, f: impl Fn(&C) -> D) -> Cochain<D> {
        Cochain {
            n: self.n,
            k: self.k,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// The cochain as an element of the deformation space, degree `k - 2`.
    pub fn to_element(&self) -> Element<C> {
        Element::from_dense(self.k as i32 - 2, &self.data)
    }

    pub fn from_element(n: usize, k: usize, e: &Element<C>) -> Self {
        let d = k as i32 - 2;
        let data = (0..Self::dim(n, k))
            .map(|i| e.get(Slot::new(d, i)))
            .collect();
        Cochain { n, k, data }
    }

    /// An endomorphism (1-cochain) as an `n × n` matrix.
    pub fn to_matrix(&self) -> Matrix<C> {
        assert_eq!(self.k, 1, "only 1-cochains are endomorphisms");
        let mut m = Matrix::zeros(self.n, self.n);
        for b in 0..self.n {
            for a in 0..self.n {
                m.set(a, b, self.data[b * self.n + a].clone());
            }
        }
        m
    }

    pub fn from_matrix(m: &Matrix<C>) -> Self {
        let n = m.rows();
        let mut c = Self::zeros(n, 1);
        for b in 0..n {
            for a in 0..n {
                c.data[b * n + a] = m.get(a, b).clone();
            }
        }
        c
    }
}

impl Cochain<f64> {
    pub fn max_norm(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

impl Cochain<Rational> {
    pub fn to_f64(&self) -> Cochain<f64> {
        self.map(f64::from_rational)
    }
}

impl<C: Scalar> fmt::Debug for Cochain<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C^{}(n={}) {:?}", self.k, self.n, self.data)
    }
}

fn axpy<C: Scalar>(out: &mut [C], c: &C, x: &[C]) {
    for (o, v) in out.iter_mut().zip(x) {
        if !v.is_zero() {
            *o = o.clone() + c.clone() * v.clone();
        }
    }
}

/// `α(w, e_c)` for a 2-cochain `α`.
fn apply_first<C: Scalar>(alpha: &Cochain<C>, w: &[C], c: usize) -> Vec<C> {
    let mut out = vec![C::zero(); alpha.n];
    for (p, wp) in w.iter().enumerate() {
        if !wp.is_zero() && p != c {
            axpy(&mut out, wp, &alpha.eval_basis(&[p, c]));
        }
    }
    out
}

/// `K(α, β)(x, y, z) = α(β(x, y), z) + α(β(y, z), x) + α(β(z, x), y)`.
pub fn compose_k<C: Scalar>(alpha: &Cochain<C>, beta: &Cochain<C>) -> Cochain<C> {
    assert!(alpha.k == 2 && beta.k == 2 && alpha.n == beta.n);
    let n = alpha.n;
    Cochain::from_fn(n, 3, |t| {
        let (x, y, z) = (t[0], t[1], t[2]);
        let mut out = vec![C::zero(); n];
        for (a, b, c) in [(x, y, z), (y, z, x), (z, x, y)] {
            let w = beta.eval_basis(&[a, b]);
            let v = apply_first(alpha, &w, c);
            axpy(&mut out, &C::one(), &v);
        }
        out
    })
}

/// `Jac(μ) = K(μ, μ)`.
pub fn jacobiator_cochain<C: Scalar>(mu: &Cochain<C>) -> Cochain<C> {
    compose_k(mu, mu)
}

/// `(L_A X)(x₁, …, x_k) = Σ_i X(…, A x_i, …) − A X(x₁, …, x_k)` for `A ∈ C¹`.
pub fn lie_derivative<C: Scalar>(a: &Cochain<C>, x: &Cochain<C>) -> Cochain<C> {
    assert!(a.k == 1 && a.n == x.n);
    let n = x.n;
    let k = x.k;
    let cols: Vec<Vec<C>> = (0..n).map(|b| a.eval_basis(&[b])).collect();
    Cochain::from_fn(n, k, |t| {
        let mut out = vec![C::zero(); n];
        for i in 0..k {
            let mut idx = t.to_vec();
            for (p, cp) in cols[t[i]].iter().enumerate() {
                if cp.is_zero() {
                    continue;
                }
                idx[i] = p;
                axpy(&mut out, cp, &x.eval_basis(&idx));
            }
        }
        let xv = x.eval_basis(t);
        for (q, xq) in xv.iter().enumerate() {
            if !xq.is_zero() {
                axpy(&mut out, &(-xq.clone()), &cols[q]);
            }
        }
        out
    })
}

/// Chevalley-Eilenberg type operator on 3-cochains:
/// `δ_μ η(v₁..v₄) = Σ_i (−1)^{i+1} μ(v_i, η(…v̂_i…)) + Σ_{i<j} (−1)^{i+j} η(μ(v_i, v_j), …)`.
pub fn ce_differential<C: Scalar>(mu: &Cochain<C>, eta: &Cochain<C>) -> Cochain<C> {
    assert!(mu.k == 2 && eta.k == 3 && mu.n == eta.n);
    let n = mu.n;
    Cochain::from_fn(n, 4, |t| {
        let mut out = vec![C::zero(); n];
        for i in 0..4 {
            let rest: Vec<usize> = (0..4).filter(|&p| p != i).map(|p| t[p]).collect();
            let w = eta.eval_basis(&rest);
            let mut v = vec![C::zero(); n];
            for (p, wp) in w.iter().enumerate() {
                if !wp.is_zero() && p != t[i] {
                    axpy(&mut v, wp, &mu.eval_basis(&[t[i], p]));
                }
            }
            // 0-based i, so (−1)^{(i+1)+1} = (−1)^i
            let s = if i % 2 == 0 { C::one() } else { -C::one() };
            axpy(&mut out, &s, &v);
        }
        for i in 0..4 {
            for j in i + 1..4 {
                let m = mu.eval_basis(&[t[i], t[j]]);
                let rest: Vec<usize> = (0..4).filter(|&p| p != i && p != j).map(|p| t[p]).collect();
                let mut v = vec![C::zero(); n];
                for (p, mp) in m.iter().enumerate() {
                    if !mp.is_zero() {
                        axpy(&mut v, mp, &eta.eval_basis(&[p, rest[0], rest[1]]));
                    }
                }
                let s = if (i + j) % 2 == 0 {
                    C::one()
                } else {
                    -C::one()
                };
                axpy(&mut out, &s, &v);
            }
        }
        out
    })
}

/// `(η·A)(x₁, …, x_k) = A⁻¹ η(A x₁, …, A x_k)` given `A` and its inverse.
pub fn act<C: Scalar>(eta: &Cochain<C>, a: &Matrix<C>, a_inv: &Matrix<C>) -> Cochain<C> {
    let n = eta.n;
    let cols: Vec<Vec<C>> = (0..n).map(|j| a.column(j)).collect();
    Cochain::from_fn(n, eta.k, |t| {
        let args: Vec<&[C]> = t.iter().map(|&i| cols[i].as_slice()).collect();
        let v = eta.eval(&args);
        a_inv
            .apply(&v)
            .expect("square matrix of the algebra dimension")
    })
}

/// `η·A` with `A` inverted exactly.
pub fn gl_action(eta: &Cochain, a: &Matrix<Rational>) -> Result<Cochain> {
    if a.rows() != eta.n || a.cols() != eta.n {
        return Err(Error::Dimension(format!(
            "expected a {0}x{0} matrix",
            eta.n
        )));
    }
    let inv = a.inverse()?;
    Ok(act(eta, a, &inv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    #[test]
    fn ranks_match_enumeration() {
        for n in 0..=6 {
            for k in 0..=n {
                for (r, t) in subsets(n, k).iter().enumerate() {
                    assert_eq!(subset_rank(n, t), r);
                }
            }
        }
        assert_eq!(Cochain::<Rational>::dim(3, 2), 9);
        assert_eq!(Cochain::<Rational>::dim(4, 4), 4);
        assert_eq!(Cochain::<Rational>::dim(3, 4), 0);
    }

    #[test]
    fn alternating_evaluation() {
        let mut c = Cochain::<Rational>::zeros(3, 2);
        c.data[subset_rank(3, &[0, 2]) * 3 + 1] = int(5);
        assert_eq!(c.eval_basis(&[0, 2]), vec![int(0), int(5), int(0)]);
        assert_eq!(c.eval_basis(&[2, 0]), vec![int(0), int(-5), int(0)]);
        assert_eq!(c.eval_basis(&[2, 2]), vec![int(0); 3]);
        let x = [int(1), int(0), int(2)];
        let y = [int(3), int(1), int(1)];
        // c(x, y) = 5 (x0 y2 − x2 y0) e1
        assert_eq!(c.eval(&[&x, &y]), vec![int(0), int(5 * (1 - 6)), int(0)]);
    }

    #[test]
    fn endomorphism_round_trip() {
        let m = Matrix::from_rows(vec![vec![int(1), int(2)], vec![int(3), int(4)]]).unwrap();
        let c = Cochain::from_matrix(&m);
        assert_eq!(c.eval_basis(&[1]), vec![int(2), int(4)]);
        assert_eq!(c.to_matrix(), m);
    }
}
