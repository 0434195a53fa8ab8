use linfty::graded::canonical_tuples;
use linfty::instances::{conic, cubic, parabola};
use linfty::lie::{
    build_deformation_linfty, gl_action, jacobiator_cochain, Connection, DeformationPath, OrbitPath,
};
use linfty::obstruction::{certify, scaling_check};
use linfty::{
    appendix_b_check, extend_formal, homotopy_operators, mc_eval, ratio, taylor_mc,
    taylor_mc_substitution, verify_cocycle, Bracket, Cochain, Element, FormalSeries, GradedSpace,
    LInftyAlgebra, LieStructure, Matrix, Poly, Rational, Slot,
};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rational(rng: &mut ChaCha8Rng) -> Rational {
    ratio(rng.gen_range(-4..=4), rng.gen_range(1..=3))
}

fn random_algebra(rng: &mut ChaCha8Rng, max_n: usize) -> LInftyAlgebra {
    let mut dims = vec![(0, rng.gen_range(1..=3))];
    for d in [-1, 1, 2] {
        let n = rng.gen_range(0..=3);
        if n > 0 {
            dims.push((d, n));
        }
    }
    let space = GradedSpace::from_dims(&dims).unwrap();
    let strictness = rng.gen_range(2..=max_n);
    let slots = space.all_slots();
    let brackets = (0..strictness)
        .map(|k| {
            let mut b = Bracket::new(k);
            for t in canonical_tuples(&slots, k) {
                let d = t.iter().map(|s| s.degree).sum::<i32>() + 1;
                if space.dim(d) > 0 && rng.gen_bool(0.5) {
                    let mut out = Element::zero();
                    for s in space.slots(d) {
                        out.add_term(s, rational(rng));
                    }
                    if !out.is_zero() {
                        b.insert(&space, &t, &out).unwrap();
                    }
                }
            }
            b
        })
        .collect();
    LInftyAlgebra::new(space, brackets, strictness).unwrap()
}

fn degree0(rng: &mut ChaCha8Rng, space: &GradedSpace) -> Element {
    let mut e = Element::zero();
    for s in space.slots(0) {
        e.add_term(s, rational(rng));
    }
    e
}

fn path(rng: &mut ChaCha8Rng, space: &GradedSpace, d: i32) -> Element<Poly> {
    let deg = rng.gen_range(0..=3);
    let mut e = Element::zero();
    for s in space.slots(d) {
        e.add_term(
            s,
            Poly::new((0..=deg).map(|_| rational(rng)).collect(), Poly::UNBOUNDED),
        );
    }
    e
}

fn random_c2(rng: &mut ChaCha8Rng, n: usize) -> Cochain {
    let data = (0..Cochain::<Rational>::dim(n, 2))
        .map(|_| rational(rng))
        .collect();
    Cochain::from_data(n, 2, data).unwrap()
}

fn quadratic_instances() -> [LInftyAlgebra; 3] {
    [parabola(), cubic(), conic()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn oracle_agreement(seed in any::<u64>(), order in 0usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let alg = random_algebra(&mut rng, 4);
        let s = FormalSeries::new((0..=order).map(|_| degree0(&mut rng, alg.space())).collect()).unwrap();
        prop_assert_eq!(taylor_mc(&alg, &s, order).unwrap(), taylor_mc_substitution(&alg, &s, order).unwrap());
    }

    #[test]
    fn cocycle_residual_and_bound_laws(which in 0usize..3, p in -9i64..=9, q in 1i64..=9, order in 1usize..=10) {
        let alg = &quadratic_instances()[which];
        let h = homotopy_operators(alg, 1).unwrap();
        let u1 = Element::term(Slot::new(0, 0), ratio(p, q));
        let s = extend_formal(alg, &h, &u1, order).unwrap();
        prop_assert!(taylor_mc(alg, &s, order).unwrap().iter().all(Element::is_zero));
        for k in 0..=order {
            prop_assert!(verify_cocycle(alg, &s.coeffs()[..=k]).unwrap().is_cocycle);
        }
        if p != 0 {
            prop_assert!(certify(alg, &h, &s).unwrap().holds());
        }
    }

    #[test]
    fn scaling_law(which in 0usize..3, p in -5i64..=5, sp in -3i64..=3, sq in 1i64..=4) {
        let alg = &quadratic_instances()[which];
        let h = homotopy_operators(alg, 1).unwrap();
        let v = Element::term(Slot::new(0, 0), ratio(p, 3));
        prop_assert!(scaling_check(alg, &h, &v, &ratio(sp, sq), 7).unwrap());
    }

    #[test]
    fn appendix_b_identity(seed in any::<u64>(), k in 1usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let alg = random_algebra(&mut rng, 4);
        let u = path(&mut rng, alg.space(), 0);
        let v = path(&mut rng, alg.space(), 0);
        prop_assert!(appendix_b_check(&alg, &u, &v, k).unwrap());
    }

    #[test]
    fn mc_is_shifted_jacobiator(seed in any::<u64>(), which in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mu = [LieStructure::sl2(), LieStructure::heisenberg(), LieStructure::solvable(4)][which].clone();
        let alg = build_deformation_linfty(&mu).unwrap();
        let v = random_c2(&mut rng, mu.dim());
        let mc = mc_eval(&alg, &v.to_element()).unwrap();
        prop_assert_eq!(Cochain::from_element(mu.dim(), 3, &mc), jacobiator_cochain(&mu.to_cochain().add(&v)));
    }

    #[test]
    fn jacobiator_equivariance(seed in any::<u64>(), n in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mu = random_c2(&mut rng, n);
        let a = loop {
            let rows = (0..n).map(|_| (0..n).map(|_| rational(&mut rng)).collect()).collect();
            let m = Matrix::from_rows(rows).unwrap();
            if m.rank() == n {
                break m;
            }
        };
        prop_assert_eq!(
            jacobiator_cochain(&gl_action(&mu, &a).unwrap()),
            gl_action(&jacobiator_cochain(&mu), &a).unwrap()
        );
    }

    #[test]
    fn perturbed_homotopy_identity(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let conn = Connection::at(&LieStructure::sl2()).unwrap();
        let mut a = DMatrix::from_fn(3, 3, |_, _| rng.gen_range(-1.0..1.0));
        a /= a.amax() / 0.01;
        let mu = OrbitPath { mu0: conn.mu0.clone(), generator: a }.value(1.0);
        let ph = conn.perturb(&mu).unwrap();
        prop_assert!(ph.residual(&mu) <= 1e-10);
    }
}
