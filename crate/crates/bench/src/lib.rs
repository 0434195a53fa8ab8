//! Fixtures shared by the benchmarks.

use linfty::instances::{conic, sl2_deformation};
use linfty::lie::{Connection, OrbitPath};
use linfty::{
    extend_formal, homotopy_operators, ratio, Element, FormalSeries, LInftyAlgebra, LieStructure,
    Slot,
};
use nalgebra::DMatrix;

/// The conic with `u₁ = x₁/50`, whose series has no vanishing orders.
pub fn conic_series(order: usize) -> (LInftyAlgebra, FormalSeries) {
    let alg = conic();
    let h = homotopy_operators(&alg, 1).expect("H¹ = 0");
    let u1 = Element::term(Slot::new(0, 0), ratio(1, 50));
    let s = extend_formal(&alg, &h, &u1, order).expect("cocycle");
    (alg, s)
}

/// The deformation algebra of `sl₂` with a first-order term in `C²`.
pub fn sl2_series(order: usize) -> (LInftyAlgebra, FormalSeries) {
    let alg = sl2_deformation();
    let h = homotopy_operators(&alg, 1).expect("H¹ = 0");
    let slot = alg.space().find_label("C2_01_2").expect("label");
    let u1 = Element::term(slot, ratio(1, 100));
    let s = extend_formal(&alg, &h, &u1, order).expect("cocycle");
    (alg, s)
}

/// Connection at `sl₂` and a small orbit path.
pub fn sl2_orbit() -> (Connection, OrbitPath) {
    let conn = Connection::at(&LieStructure::sl2()).expect("sl₂ is rigid");
    let generator =
        DMatrix::from_row_slice(3, 3, &[0.01, 0.0, 0.02, 0.0, -0.01, 0.0, 0.0, 0.03, 0.0]);
    let path = OrbitPath {
        mu0: conn.mu0.clone(),
        generator,
    };
    (conn, path)
}
