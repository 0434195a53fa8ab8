use std::time::{Duration, Instant};

use linfty::combinatorics::{
    asymptotic_ratio, compositions, count_bracketings, enumerate_bracketings, orbit_size,
    partitions, reorganization_identity, super_catalan,
};
use linfty::graded::canonical_tuples;
use linfty::instances::{conic, cubic, parabola, sl2_deformation};
use linfty::lie::{
    jacobiator_cochain, orbit_parametrization, parallel_transport, rigidity_check, Connection,
    OrbitPath,
};
use linfty::obstruction::{certify, psi, Obstructions, Reading, DEFAULT_MAX_ORDER};
use linfty::{
    appendix_b_check, differential_matrix, extend_formal, homotopy_operators, int,
    lemma_dmc2_check, ratio, taylor_mc, taylor_mc_substitution, verify_cocycle, Bracket, Cochain,
    Element, FormalSeries, GradedSpace, LInftyAlgebra, LieStructure, Poly, Rational, Slot,
};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    ratio(rng.gen_range(-3..=3), rng.gen_range(1..=3))
}

fn random_algebra(rng: &mut ChaCha8Rng) -> LInftyAlgebra {
    let mut dims = vec![(0, rng.gen_range(1..=3))];
    for d in [-1, 1, 2] {
        let n = rng.gen_range(0..=3);
        if n > 0 {
            dims.push((d, n));
        }
    }
    let space = GradedSpace::from_dims(&dims).unwrap();
    let strictness = rng.gen_range(2..=4);
    let slots = space.all_slots();
    let mut brackets = Vec::new();
    for k in 0..strictness {
        let mut b = Bracket::new(k);
        for t in canonical_tuples(&slots, k) {
            let out_deg = t.iter().map(|s| s.degree).sum::<i32>() + 1;
            if space.dim(out_deg) == 0 || !rng.gen_bool(if k == 0 { 0.3 } else { 0.4 }) {
                continue;
            }
            let mut out = Element::zero();
            for s in space.slots(out_deg) {
                out.add_term(s, random_rational(rng));
            }
            if !out.is_zero() {
                b.insert(&space, &t, &out).unwrap();
            }
        }
        brackets.push(b);
    }
    LInftyAlgebra::new(space, brackets, strictness).unwrap()
}

fn random_degree0(rng: &mut ChaCha8Rng, space: &GradedSpace) -> Element {
    let mut e = Element::zero();
    for s in space.slots(0) {
        if rng.gen_bool(0.8) {
            e.add_term(s, random_rational(rng));
        }
    }
    e
}

fn random_path(rng: &mut ChaCha8Rng, space: &GradedSpace, d: i32, deg: usize) -> Element<Poly> {
    let mut e = Element::zero();
    for s in space.slots(d) {
        let coeffs = (0..=deg).map(|_| random_rational(rng)).collect();
        e.add_term(s, Poly::new(coeffs, Poly::UNBOUNDED));
    }
    e
}

/// The formal solutions used by several criteria.
fn deformation_suite() -> Vec<(&'static str, LInftyAlgebra, FormalSeries)> {
    let x1 = Slot::new(0, 0);
    let mut out = Vec::new();
    for (name, alg, v, order) in [
        ("parabola", parabola(), ratio(1, 20), 8),
        ("cubic", cubic(), ratio(-3, 7), 8),
        ("conic", conic(), ratio(1, 72), 12),
    ] {
        let h = homotopy_operators(&alg, 1).unwrap();
        let s = extend_formal(&alg, &h, &Element::term(x1, v), order).unwrap();
        out.push((name, alg, s));
    }
    let alg = sl2_deformation();
    let h = homotopy_operators(&alg, 1).unwrap();
    let kernel = differential_matrix(&alg, 0).nullspace_basis();
    let mut u1 = Element::zero();
    for (i, k) in kernel.iter().enumerate() {
        u1 = u1.add(&Element::from_dense(0, k).scale(&ratio(1, 2 + i as i64)));
    }
    let s = extend_formal(&alg, &h, &u1.scale(&ratio(1, 50)), 6).unwrap();
    out.push(("sl2", alg, s));
    out
}

fn criterion_1() -> Outcome {
    let values: Vec<u64> = (1..=6)
        .map(|k| super_catalan(k).unwrap().try_into().unwrap())
        .collect();
    check(
        values == [1, 1, 3, 11, 45, 197],
        format!("C_1..C_6 = {values:?}"),
    )?;
    let three = enumerate_bracketings(3).unwrap();
    check(
        three.len() == 3,
        format!("bracketings of 3 letters: {three:?}"),
    )?;
    for k in 1..=8 {
        check(
            count_bracketings(k).unwrap() == super_catalan(k).unwrap(),
            format!("count mismatch at k = {k}"),
        )?;
    }
    let c30 = super_catalan(30).unwrap();
    let c29 = super_catalan(29).unwrap();
    let r = linfty::combinatorics::big_to_f64(&c30) / linfty::combinatorics::big_to_f64(&c29);
    let rel = (r - asymptotic_ratio()).abs() / asymptotic_ratio();
    check(
        rel <= 0.05,
        format!("C30/C29 = {r:.4}, relative gap {rel:.4}"),
    )?;
    Ok(format!(
        "C_1..6 = {values:?}, C30/C29 = {r:.4} (gap {:.3}%)",
        100.0 * rel
    ))
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut cases = 0;
    let mut algebras = 0;
    let mut nonzero = 0;
    while algebras < 60 {
        let alg = random_algebra(&mut rng);
        algebras += 1;
        for _ in 0..2 {
            let order = rng.gen_range(1..=6);
            let coeffs = (0..=order)
                .map(|_| random_degree0(&mut rng, alg.space()))
                .collect();
            let s = FormalSeries::new(coeffs).unwrap();
            let formula = taylor_mc(&alg, &s, order).unwrap();
            let literal = Obstructions::at(&alg, s.base())
                .unwrap()
                .with_reading(Reading::Compositions)
                .taylor_mc(&s, order)
                .unwrap();
            let oracle = taylor_mc_substitution(&alg, &s, order).unwrap();
            check(
                formula == oracle,
                format!("formula and substitution differ on case {cases}"),
            )?;
            check(
                literal == oracle,
                format!("composition reading differs on case {cases}"),
            )?;
            nonzero += oracle.iter().filter(|e| !e.is_zero()).count();
            cases += 1;
        }
    }
    Ok(format!(
        "{algebras} random algebras, {cases} series, {nonzero} nonzero derivatives, all equal"
    ))
}

fn criterion_3() -> Outcome {
    let mut prefixes = 0;
    for (name, alg, s) in deformation_suite() {
        let d = taylor_mc(&alg, &s, s.order()).map_err(|e| e.to_string())?;
        check(
            d.iter().all(Element::is_zero),
            format!("{name}: MC derivative nonzero"),
        )?;
        for k in 0..=s.order() {
            let r = verify_cocycle(&alg, &s.coeffs()[..=k]).map_err(|e| format!("{name}: {e}"))?;
            check(r.is_cocycle, format!("{name}: Obs^{k} is not a cocycle"))?;
            prefixes += 1;
        }
    }
    Ok(format!(
        "{prefixes} prefixes: every obstruction closed, every MC derivative zero"
    ))
}

fn criterion_4() -> Outcome {
    let x1 = Slot::new(0, 0);
    let x2 = Slot::new(0, 1);
    let v = ratio(1, 20);
    let alg = parabola();
    let h = homotopy_operators(&alg, 1).unwrap();
    let p = psi(&alg, &h, &Element::term(x1, v.clone()), 10, 1.0).map_err(|e| e.to_string())?;
    check(
        p.series.coeffs()[3..].iter().all(Element::is_zero),
        "parabola series does not terminate",
    )?;
    let exact = p.series.partial_sum(&int(1), 10);
    let mut want = Element::term(x1, v.clone());
    want.add_term(x2, -(&v * &v) / int(2));
    check(exact == want, format!("parabola sum {exact:?}"))?;
    check(
        p.sum.residual() == 0.0,
        format!("parabola residual {}", p.sum.residual()),
    )?;

    let alg = cubic();
    let h = homotopy_operators(&alg, 1).unwrap();
    let s =
        extend_formal(&alg, &h, &Element::term(x1, v.clone()), 10).map_err(|e| e.to_string())?;
    check(
        s.coeffs()[4..].iter().all(Element::is_zero),
        "cubic series does not terminate",
    )?;
    let mut want = Element::term(x1, v.clone());
    want.add_term(x2, -(&v * &v / int(2) + &v * &v * &v / int(6)));
    check(s.partial_sum(&int(1), 10) == want, "cubic sum differs")?;
    Ok("Ψ(v x₁) = v x₁ − v²/2 x₂ and the cubic correction v³/6, exact".into())
}

fn criterion_5() -> Outcome {
    let mut notes = Vec::new();
    for (name, alg, s) in deformation_suite() {
        let start = Instant::now();
        let h = homotopy_operators(&alg, 1).unwrap();
        let c = certify(&alg, &h, &s).map_err(|e| e.to_string())?;
        check(
            c.holds(),
            format!("{name}: coefficient bound violated: {:?}", c.rows),
        )?;
        check(
            start.elapsed() < Duration::from_secs(10),
            format!("{name}: too slow"),
        )?;
    }
    let start = Instant::now();
    let alg = conic();
    let h = homotopy_operators(&alg, 1).unwrap();
    let cert = linfty::coefficient_bounds(&alg, 1.0, 1.0, 1).map_err(|e| e.to_string())?;
    let v = cert.radius / 2.0;
    let vq = Rational::from_float(v).unwrap();
    let p = psi(
        &alg,
        &h,
        &Element::term(Slot::new(0, 0), vq),
        DEFAULT_MAX_ORDER,
        1.0,
    )
    .map_err(|e| e.to_string())?;
    check(p.certificate.holds(), "conic: bound violated")?;
    check(p.certified, "conic: not inside the radius")?;
    let res = p.sum.residual();
    check(res <= 1e-10, format!("conic: residual {res:e}"))?;
    let decay = p.sum.decay_ratio(1).unwrap_or(f64::INFINITY);
    check(decay <= 0.9, format!("conic: decay ratio {decay}"))?;
    check(
        start.elapsed() < Duration::from_secs(10),
        "conic summation too slow",
    )?;
    notes.push(format!(
        "conic at v = radius/2 = {v:.5}: residual {res:.1e}, decay ratio {decay:.3}"
    ));
    Ok(format!("bounds hold on 4 instances; {}", notes.join("; ")))
}

fn criterion_6() -> Outcome {
    let mu = LieStructure::sl2();
    let r = rigidity_check(&mu).map_err(|e| e.to_string())?;
    check(
        r.cohomology_dim == 0,
        format!("sl2 cohomology {}", r.cohomology_dim),
    )?;
    let h = r.homotopy.clone().ok_or("no homotopy")?;
    check(h.is_exact(), "homotopy identity not exact")?;
    check(
        r.jac_kernel_dim == 6 && r.action_rank == 6,
        format!("ker {} rank {}", r.jac_kernel_dim, r.action_rank),
    )?;

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst_jac: f64 = 0.0;
    for _ in 0..20 {
        let mut v: Vec<f64> = (0..9).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let m = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        v.iter_mut().for_each(|x| *x *= 1e-2 / m);
        let psi = orbit_parametrization(&mu, &h, &v).map_err(|e| e.to_string())?;
        worst_jac = worst_jac.max(jacobiator_cochain(&psi).max_norm());
    }
    check(
        worst_jac <= 1e-9,
        format!("Jacobiator on orbit {worst_jac:e}"),
    )?;

    let kernel = linfty::lie::jac_derivative(&mu).nullspace_basis();
    let step = 1e-5;
    let mut worst_fd: f64 = 0.0;
    for k in &kernel {
        let v: Vec<f64> = k.iter().map(linfty::scalar::to_f64).collect();
        let plus: Vec<f64> = v.iter().map(|x| x * step).collect();
        let minus: Vec<f64> = v.iter().map(|x| -x * step).collect();
        let a = orbit_parametrization(&mu, &h, &plus).unwrap();
        let b = orbit_parametrization(&mu, &h, &minus).unwrap();
        let fd = a.sub(&b).scale(&(1.0 / (2.0 * step)));
        let err = fd.sub(&Cochain::from_data(3, 2, v).unwrap()).max_norm();
        worst_fd = worst_fd.max(err);
    }
    check(
        worst_fd <= 1e-6,
        format!("finite-difference Jacobian error {worst_fd:e}"),
    )?;

    let heis = rigidity_check(&LieStructure::heisenberg()).map_err(|e| e.to_string())?;
    check(heis.cohomology_dim > 0, "Heisenberg cohomology vanishes")?;
    Ok(format!(
        "sl2: H = 0, rank 6 = dim ker 6, max Jac on orbit {worst_jac:.1e}, FD error {worst_fd:.1e}; Heisenberg H = {}",
        heis.cohomology_dim
    ))
}

fn criterion_7() -> Outcome {
    let conn = Connection::at(&LieStructure::sl2()).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut a = DMatrix::from_fn(3, 3, |_, _| rng.gen_range(-1.0..1.0));
    a /= a.amax() / 0.05;
    let path = OrbitPath {
        mu0: conn.mu0.clone(),
        generator: a,
    };
    let fine = parallel_transport(&conn, &path, 1.0, 1000).map_err(|e| e.to_string())?;
    let d = fine.final_defect();
    check(d <= 1e-6, format!("defect at 1000 steps {d:e}"))?;
    let coarse: Vec<f64> = [1, 2, 4]
        .iter()
        .map(|&n| parallel_transport(&conn, &path, 1.0, n).map(|r| r.final_defect()))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let ratios = [coarse[0] / coarse[1], coarse[1] / coarse[2]];
    check(
        ratios.iter().all(|&r| r >= 12.0),
        format!("step-halving ratios {ratios:?}"),
    )?;
    Ok(format!(
        "defect {d:.1e} at 1000 steps; halving 1→2→4 steps reduces defect by {:.1}× and {:.1}×",
        ratios[0], ratios[1]
    ))
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut cases = 0;
    while cases < 60 {
        let alg = random_algebra(&mut rng);
        let k = rng.gen_range(1..=5);
        let du = rng.gen_range(0..=3);
        let u = random_path(&mut rng, alg.space(), 0, du);
        let d = *[0, 1, -1].get(rng.gen_range(0..3)).unwrap();
        if alg.space().dim(d) == 0 {
            continue;
        }
        let dv = rng.gen_range(0..=3);
        let v = random_path(&mut rng, alg.space(), d, dv);
        check(
            appendix_b_check(&alg, &u, &v, k).map_err(|e| e.to_string())?,
            format!("case {cases} (k = {k}) fails"),
        )?;
        cases += 1;
    }
    let mut lemma = 0;
    for (name, alg, s) in deformation_suite() {
        for k in 0..=s.order() {
            check(
                lemma_dmc2_check(&alg, &s, k).map_err(|e| e.to_string())?,
                format!("{name}: lemma fails at k = {k}"),
            )?;
            lemma += 1;
        }
    }
    Ok(format!(
        "{cases} random path cases, {lemma} lemma instances"
    ))
}

fn criterion_9() -> Outcome {
    for k in 1..=10 {
        for i in 1..=k {
            let all = compositions(k, i).unwrap();
            let reps = partitions(k, i).unwrap();
            let total: u64 = reps
                .iter()
                .map(|p| u64::try_from(orbit_size(p)).unwrap())
                .sum();
            check(
                total == all.len() as u64,
                format!("orbit count mismatch at ({k}, {i})"),
            )?;
            for c in &all {
                let rep = c.factorization().representative();
                check(reps.contains(&rep), format!("{c:?} has no representative"))?;
            }
        }
    }
    for k in 2..=8 {
        check(
            reorganization_identity(k).unwrap(),
            format!("reorganization fails at k = {k}"),
        )?;
    }
    Ok("orbit sums match composition counts for k ≤ 10; reorganization holds for k ≤ 8".into())
}

fn main() {
    let criteria: [(usize, fn() -> Outcome); 9] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
    ];
    let limits = [
        1.0,
        30.0,
        f64::INFINITY,
        f64::INFINITY,
        f64::INFINITY,
        5.0,
        f64::INFINITY,
        f64::INFINITY,
        f64::INFINITY,
    ];
    let mut failed = 0;
    for (n, f) in criteria {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        let outcome = match outcome {
            Ok(msg) if secs > limits[n - 1] => {
                Err(format!("{msg}; took {secs:.2}s, limit {}s", limits[n - 1]))
            }
            other => other,
        };
        match outcome {
            Ok(msg) => println!("criterion {n}: PASS ({secs:.2}s) {msg}"),
            Err(msg) => {
                failed += 1;
                println!("criterion {n}: FAIL ({secs:.2}s) {msg}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
