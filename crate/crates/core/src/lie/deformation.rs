//! The deformation complex `C¹ → C² → C³ → C⁴` of a Lie structure and its
//! 3-strict L∞-algebra.

use nalgebra::DMatrix;

use crate::algebra::{cohomology_dim, homotopy_operators, HomotopyPair, LInftyAlgebra};
use crate::error::{Error, Result};
use crate::graded::{Bracket, Element, GradedSpace, Slot};
use crate::matrix::{Matrix, RationalMatrix};
use crate::scalar::{Rational, Scalar};

use super::cochain::{act, ce_differential, compose_k, lie_derivative, subsets, Cochain};
use super::LieStructure;

fn columns<C: Scalar>(rows: usize, cols: usize, f: impl Fn(usize) -> Vec<C>) -> Matrix<C> {
    let mut m = Matrix::zeros(rows, cols);
    for j in 0..cols {
        for (i, v) in f(j).into_iter().enumerate() {
            m.set(i, j, v);
        }
    }
    m
}

/// `A ↦ d_e m_μ(A) = μ(A·, ·) + μ(·, A·) − A μ`, as a matrix `C¹ → C²`.
pub fn action_derivative_matrix<C: Scalar>(mu: &Cochain<C>) -> Matrix<C> {
    let n = mu.n();
    columns(Cochain::<C>::dim(n, 2), Cochain::<C>::dim(n, 1), |j| {
        lie_derivative(&Cochain::basis(n, 1, j), mu).data().to_vec()
    })
}

/// `v ↦ K(μ, v) + K(v, μ)`, as a matrix `C² → C³`.
pub fn jac_derivative_matrix<C: Scalar>(mu: &Cochain<C>) -> Matrix<C> {
    let n = mu.n();
    columns(Cochain::<C>::dim(n, 3), Cochain::<C>::dim(n, 2), |j| {
        let e = Cochain::basis(n, 2, j);
        compose_k(mu, &e).add(&compose_k(&e, mu)).data().to_vec()
    })
}

/// `η ↦ δ_μ η`, as a matrix `C³ → C⁴`.
pub fn ce_matrix<C: Scalar>(mu: &Cochain<C>) -> Matrix<C> {
    let n = mu.n();
    columns(Cochain::<C>::dim(n, 4), Cochain::<C>::dim(n, 3), |j| {
        ce_differential(mu, &Cochain::basis(n, 3, j))
            .data()
            .to_vec()
    })
}

pub fn action_derivative(mu0: &LieStructure) -> RationalMatrix {
    action_derivative_matrix(&mu0.to_cochain())
}

pub fn jac_derivative(mu0: &LieStructure) -> RationalMatrix {
    jac_derivative_matrix(&mu0.to_cochain())
}

pub fn ce_stabilizer(mu0: &LieStructure) -> RationalMatrix {
    ce_matrix(&mu0.to_cochain())
}

/// `V₋₁ = C¹, V₀ = C², V₁ = C³, V₂ = C⁴` with basis labels `C{k}_{tuple}_{output}`.
pub fn deformation_space(n: usize) -> GradedSpace {
    let mut space = GradedSpace::new();
    for k in 1..=4usize {
        let dim = Cochain::<Rational>::dim(n, k);
        space = space
            .with_degree(k as i32 - 2, dim)
            .expect("distinct degrees");
        if dim > 0 {
            let labels = subsets(n, k)
                .iter()
                .flat_map(|t| {
                    let word: String = t.iter().map(|i| i.to_string()).collect();
                    (0..n).map(move |m| format!("C{k}_{word}_{m}"))
                })
                .collect();
            space = space
                .with_labels(k as i32 - 2, labels)
                .expect("label count matches");
        }
    }
    space
}

/// Second derivative of the Jacobiator, `(v, w) ↦ K(v, w) + K(w, v)` on `C² ⊙ C²`.
pub fn jac_second(mu0: &LieStructure) -> Bracket {
    let n = mu0.dim();
    let space = deformation_space(n);
    let mut b = Bracket::new(2);
    add_jac_second(&space, n, &mut b);
    b
}

fn add_jac_second(space: &GradedSpace, n: usize, b: &mut Bracket) {
    let d2 = Cochain::<Rational>::dim(n, 2);
    for v in 0..d2 {
        let ev = Cochain::basis(n, 2, v);
        for w in v..d2 {
            let ew = Cochain::basis(n, 2, w);
            let val = compose_k(&ev, &ew).add(&compose_k(&ew, &ev));
            b.insert(
                space,
                &[Slot::new(0, v), Slot::new(0, w)],
                &val.to_element(),
            )
            .expect("degrees are consistent");
        }
    }
}

/// The flat 3-strict L∞-algebra whose Maurer-Cartan elements are the `v`
/// with `Jac(μ₀ + v) = 0`.
pub fn build_deformation_linfty(mu0: &LieStructure) -> Result<LInftyAlgebra> {
    if !mu0.is_lie() {
        return Err(Error::NotLie);
    }
    let n = mu0.dim();
    let mu = mu0.to_cochain();
    let space = deformation_space(n);

    let mut l1 = Bracket::new(1);
    let blocks = [
        (-1, action_derivative_matrix(&mu)),
        (0, jac_derivative_matrix(&mu)),
        (1, ce_matrix(&mu)),
    ];
    for (d, m) in &blocks {
        for j in 0..m.cols() {
            let col = Element::from_dense(d + 1, &m.column(j));
            l1.insert(&space, &[Slot::new(*d, j)], &col)?;
        }
    }

    let mut l2 = Bracket::new(2);
    let d1 = Cochain::<Rational>::dim(n, 1);
    for a in 0..d1 {
        let ea = Cochain::basis(n, 1, a);
        for k in 1..=4usize {
            let start = if k == 1 { a + 1 } else { 0 };
            for x in start..Cochain::<Rational>::dim(n, k) {
                let val = lie_derivative(&ea, &Cochain::basis(n, k, x));
                l2.insert(
                    &space,
                    &[Slot::new(-1, a), Slot::new(k as i32 - 2, x)],
                    &val.to_element(),
                )?;
            }
        }
    }
    add_jac_second(&space, n, &mut l2);
    for v in 0..Cochain::<Rational>::dim(n, 2) {
        let ev = Cochain::basis(n, 2, v);
        for e in 0..Cochain::<Rational>::dim(n, 3) {
            let val = ce_differential(&ev, &Cochain::basis(n, 3, e));
            l2.insert(
                &space,
                &[Slot::new(0, v), Slot::new(1, e)],
                &val.to_element(),
            )?;
        }
    }
    LInftyAlgebra::new(space, vec![Bracket::new(0), l1, l2], 3)
}

/// Outcome of the infinitesimal rigidity test at the `C²` slot.
#[derive(Debug, Clone)]
pub struct Rigidity {
    pub algebra: LInftyAlgebra,
    pub cohomology_dim: usize,
    pub action_rank: usize,
    pub jac_kernel_dim: usize,
    /// `h₁ : C² → C¹` and `h₂ : C³ → C²` when the cohomology vanishes.
    pub homotopy: Option<HomotopyPair>,
}

impl Rigidity {
    pub fn is_rigid(&self) -> bool {
        self.homotopy.is_some()
    }
}

pub fn rigidity_check(mu0: &LieStructure) -> Result<Rigidity> {
    let algebra = build_deformation_linfty(mu0)?;
    let h = cohomology_dim(&algebra, 0)?;
    let action_rank = action_derivative(mu0).rank();
    let jac_kernel_dim = Cochain::<Rational>::dim(mu0.dim(), 2) - jac_derivative(mu0).rank();
    let homotopy = if h == 0 {
        Some(homotopy_operators(&algebra, 0)?)
    } else {
        None
    };
    Ok(Rigidity {
        algebra,
        cohomology_dim: h,
        action_rank,
        jac_kernel_dim,
        homotopy,
    })
}

/// Matrix exponential by scaling and squaring of a truncated Taylor series.
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let norm = a
        .row_iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut s = 0;
    while norm / 2f64.powi(s) > 0.5 {
        s += 1;
    }
    let b = a / 2f64.powi(s);
    let mut result = DMatrix::<f64>::identity(n, n);
    let mut term = DMatrix::<f64>::identity(n, n);
    for k in 1..=40 {
        term = &term * &b / k as f64;
        result += &term;
        if term.amax() <= 1e-17 * result.amax() {
            break;
        }
    }
    for _ in 0..s {
        result = &result * &result;
    }
    result
}

/// `ψ_h(v) = μ₀ · exp(h₁ v)` for `v ∈ C²` in float coordinates.
pub fn orbit_parametrization(
    mu0: &LieStructure,
    h: &HomotopyPair,
    v: &[f64],
) -> Result<Cochain<f64>> {
    let n = mu0.dim();
    if v.len() != h.h_low.cols() {
        return Err(Error::LengthMismatch {
            expected: h.h_low.cols(),
            found: v.len(),
        });
    }
    let x = h.h_low.to_f64() * nalgebra::DVector::from_column_slice(v);
    let gen = Cochain::from_data(n, 1, x.as_slice().to_vec())?
        .to_matrix()
        .to_nalgebra();
    let g = expm(&gen);
    let g_inv = expm(&(-gen));
    Ok(act(
        &mu0.to_cochain().to_f64(),
        &Matrix::from_nalgebra(&g),
        &Matrix::from_nalgebra(&g_inv),
    ))
}
