//! Small algebras with known Maurer-Cartan loci.

use crate::algebra::LInftyAlgebra;
use crate::graded::{Bracket, GradedSpace, Slot};
use crate::lie::{build_deformation_linfty, LieStructure};
use crate::scalar::int;

const X1: Slot = Slot::new(0, 0);
const X2: Slot = Slot::new(0, 1);
const Y: Slot = Slot::new(1, 0);

fn plane() -> GradedSpace {
    GradedSpace::from_dims(&[(0, 2), (1, 1)])
        .and_then(|s| s.with_labels(0, vec!["x1".into(), "x2".into()]))
        .and_then(|s| s.with_labels(1, vec!["y".into()]))
        .expect("valid space")
}

fn base_brackets(space: &GradedSpace) -> (Bracket, Bracket) {
    let mut l1 = Bracket::new(1);
    l1.insert_term(space, &[X2], Y, int(1)).expect("valid");
    let mut l2 = Bracket::new(2);
    l2.insert_term(space, &[X1, X1], Y, int(1)).expect("valid");
    (l1, l2)
}

/// `ℓ₁x₂ = y`, `ℓ₂(x₁, x₁) = y`: `MC(a x₁ + b x₂) = (b + a²/2) y`.
pub fn parabola() -> LInftyAlgebra {
    let space = plane();
    let (l1, l2) = base_brackets(&space);
    LInftyAlgebra::new(space, vec![Bracket::new(0), l1, l2], 3).expect("valid")
}

/// The parabola plus `ℓ₃(x₁, x₁, x₁) = y`: `MC = (b + a²/2 + a³/6) y`.
pub fn cubic() -> LInftyAlgebra {
    let space = plane();
    let (l1, l2) = base_brackets(&space);
    let mut l3 = Bracket::new(3);
    l3.insert_term(&space, &[X1, X1, X1], Y, int(1))
        .expect("valid");
    LInftyAlgebra::new(space, vec![Bracket::new(0), l1, l2, l3], 4).expect("valid")
}

/// `ℓ₁x₂ = y` and `ℓ₂ = y` on every pair: `MC = (b + (a + b)²/2) y`, a series
/// with no vanishing orders.
pub fn conic() -> LInftyAlgebra {
    let space = plane();
    let (l1, mut l2) = base_brackets(&space);
    l2.insert_term(&space, &[X1, X2], Y, int(1)).expect("valid");
    l2.insert_term(&space, &[X2, X2], Y, int(1)).expect("valid");
    LInftyAlgebra::new(space, vec![Bracket::new(0), l1, l2], 3).expect("valid")
}

pub fn sl2_deformation() -> LInftyAlgebra {
    build_deformation_linfty(&LieStructure::sl2()).expect("sl2 is a Lie algebra")
}
