//! Lie algebra structures on `g = ℝⁿ` and their deformation theory.

pub mod cochain;
pub mod deformation;
pub mod transport;

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::{int, Rational};

pub use cochain::{
    act, ce_differential, compose_k, gl_action, jacobiator_cochain, lie_derivative, subsets,
    Cochain,
};
pub use deformation::{
    action_derivative, build_deformation_linfty, ce_stabilizer, deformation_space, expm,
    jac_derivative, jac_second, orbit_parametrization, rigidity_check, Rigidity,
};
pub use transport::{
    parallel_transport, perturbed_homotopies, ClosurePath, Connection, ConstantPath,
    DeformationPath, OrbitPath, PerturbedHomotopies, SampledPath, TransportResult,
};

/// Bilinear alternating bracket `μ(e_i, e_j) = Σ_k c_{ij}^k e_k`, stored for `i < j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LieStructure {
    dim: usize,
    constants: BTreeMap<(usize, usize, usize), Rational>,
}

impl LieStructure {
    pub fn new(
        dim: usize,
        constants: impl IntoIterator<Item = ((usize, usize, usize), Rational)>,
    ) -> Result<Self> {
        let mut map: BTreeMap<(usize, usize, usize), Rational> = BTreeMap::new();
        for ((i, j, k), c) in constants {
            if i >= j || j >= dim || k >= dim {
                return Err(Error::OutOfRange(format!(
                    "structure constant ({i},{j},{k}) needs i < j < {dim} and k < {dim}"
                )));
            }
            *map.entry((i, j, k)).or_insert_with(Rational::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        Ok(LieStructure {
            dim,
            constants: map,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn constants(&self) -> impl Iterator<Item = ((usize, usize, usize), &Rational)> {
        self.constants.iter().map(|(&k, v)| (k, v))
    }

    pub fn to_cochain(&self) -> Cochain {
        let n = self.dim;
        let mut data = vec![Rational::zero(); Cochain::<Rational>::dim(n, 2)];
        for (&(i, j, k), c) in &self.constants {
            data[cochain::subset_rank(n, &[i, j]) * n + k] = c.clone();
        }
        Cochain::from_data(n, 2, data).expect("dimension matches")
    }

    pub fn from_cochain(c: &Cochain) -> Result<Self> {
        if c.arity() != 2 {
            return Err(Error::ArityMismatch {
                expected: 2,
                found: c.arity(),
            });
        }
        let n = c.n();
        let mut constants = Vec::new();
        for (r, t) in subsets(n, 2).iter().enumerate() {
            for k in 0..n {
                let v = &c.data()[r * n + k];
                if !v.is_zero() {
                    constants.push(((t[0], t[1], k), v.clone()));
                }
            }
        }
        LieStructure::new(n, constants)
    }

    pub fn is_lie(&self) -> bool {
        jacobiator_lie(self).is_zero()
    }

    pub fn abelian(dim: usize) -> Self {
        LieStructure {
            dim,
            constants: BTreeMap::new(),
        }
    }

    /// `sl₂` in the basis `(e, f, h)`: `[e,f] = h`, `[h,e] = 2e`, `[h,f] = −2f`.
    pub fn sl2() -> Self {
        LieStructure::new(
            3,
            [
                ((0, 1, 2), int(1)),
                ((0, 2, 0), int(-2)),
                ((1, 2, 1), int(2)),
            ],
        )
        .expect("valid")
    }

    /// Heisenberg algebra: `[e₁, e₂] = e₃`.
    pub fn heisenberg() -> Self {
        LieStructure::new(3, [((0, 1, 2), int(1))]).expect("valid")
    }

    /// `[e₁, e_i] = e_i` for `i = 2, …, n`.
    pub fn solvable(dim: usize) -> Self {
        LieStructure::new(dim, (1..dim).map(|i| ((0, i, i), int(1)))).expect("valid")
    }
}

/// `Jac(μ)(x, y, z) = μ(μ(x, y), z) + μ(μ(y, z), x) + μ(μ(z, x), y)`.
pub fn jacobiator_lie(mu: &LieStructure) -> Cochain {
    jacobiator_cochain(&mu.to_cochain())
}
