use std::path::Path;

use anyhow::Context;
use serde_json::{json, Value};

use linfty::combinatorics::{catalan_cap, super_catalan};
use linfty::lie::{build_deformation_linfty, parallel_transport, rigidity_check, Connection};
use linfty::{
    cohomology_dim, homotopy_operators, psi, taylor_mc_substitution, verify_cocycle, verify_linfty,
    Error, FormalSeries, LInftyAlgebra, LInftyReport, Obstructions, Reading,
};

use crate::format::{
    element_json, float_element_json, matrix_json, parse_element, rational_json, AlgebraFile,
    LieFile, PathFile, SeriesFile,
};
use crate::report::{Report, Status};
use crate::{Cli, Command, InputError, Output};

/// Highest order compared by `--oracle`; polynomial substitution is costly.
const ORACLE_ORDER: usize = 10;

type Outcome = linfty::Result<(Status, Value)>;

struct Input {
    bytes: Vec<u8>,
}

fn read(path: &Path) -> Result<Input, InputError> {
    let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    Ok(Input { bytes })
}

fn text(input: &Input, path: &Path) -> Result<String, InputError> {
    Ok(String::from_utf8(input.bytes.clone())
        .with_context(|| format!("{} is not UTF-8", path.display()))?)
}

fn load_algebra(path: &Path) -> Result<(Input, LInftyAlgebra), InputError> {
    let input = read(path)?;
    let alg = AlgebraFile::parse(&text(&input, path)?)
        .and_then(|f| f.to_algebra())
        .with_context(|| format!("invalid algebra file {}", path.display()))?;
    Ok((input, alg))
}

fn load_lie(path: &Path) -> Result<(Input, linfty::LieStructure), InputError> {
    let input = read(path)?;
    let mu = LieFile::parse(&text(&input, path)?)
        .and_then(|f| f.to_structure())
        .with_context(|| format!("invalid Lie structure file {}", path.display()))?;
    Ok((input, mu))
}

/// Errors that reflect the mathematics of a valid input rather than the input itself.
fn is_math(e: &Error) -> bool {
    matches!(
        e,
        Error::Curved
            | Error::NonzeroCohomology { .. }
            | Error::BaseNotMaurerCartan
            | Error::NotDeformation { .. }
            | Error::NotCocycle
            | Error::Divergent { .. }
            | Error::NotLie
            | Error::OutsideNeighbourhood(_)
            | Error::DegenerateBound(_)
            | Error::DegreeBudget(_)
    )
}

fn kind(e: &Error) -> &'static str {
    match e {
        Error::Curved => "curved",
        Error::NonzeroCohomology { .. } => "nonzero_cohomology",
        Error::BaseNotMaurerCartan => "base_not_maurer_cartan",
        Error::NotDeformation { .. } => "not_deformation",
        Error::NotCocycle => "not_cocycle",
        Error::Divergent { .. } => "divergent",
        Error::NotLie => "not_lie",
        Error::OutsideNeighbourhood(_) => "outside_neighbourhood",
        Error::DegenerateBound(_) => "degenerate_bound",
        Error::DegreeBudget(_) => "degree_budget",
        _ => "input",
    }
}

fn finish(command: &str, inputs: &[&[u8]], out: Outcome) -> Result<Output, InputError> {
    let (status, results) = match out {
        Ok(r) => r,
        Err(e) if is_math(&e) => {
            let mut r = json!({ "error": e.to_string(), "kind": kind(&e) });
            if let Error::NonzeroCohomology { degree, dimension } = e {
                r["degree"] = json!(degree);
                r["dimension"] = json!(dimension);
            }
            (Status::Obstructed, r)
        }
        Err(e) => return Err(InputError(e.into())),
    };
    Ok(Output::Report(Report::new(
        command, inputs, status, results,
    )))
}

fn verify_json(alg: &LInftyAlgebra, r: &LInftyReport) -> Value {
    let checks: Vec<Value> = r
        .checks
        .iter()
        .map(|c| {
            json!({
                "n": c.n,
                "tuples_checked": c.tuples_checked,
                "max_violation": rational_json(&c.max_violation),
                "vacuous": c.vacuous,
                "passed": c.passed(),
                "first_failure": c.first_failure.as_ref().map(|t| {
                    t.iter().map(|s| alg.space().label(*s)).collect::<Vec<_>>()
                }),
            })
        })
        .collect();
    json!({
        "passed": r.passed(),
        "first_failing": r.first_failing(),
        "flat": alg.is_flat(),
        "checks": checks,
    })
}

/// Runs the Jacobi check first when `--strict-check` is set.
fn strict(cli: &Cli, alg: &LInftyAlgebra, body: impl FnOnce() -> Outcome) -> Outcome {
    if cli.strict_check {
        let r = verify_linfty(alg);
        if !r.passed() {
            return Ok((
                Status::Fail,
                json!({ "strict_check": verify_json(alg, &r) }),
            ));
        }
    }
    body()
}

pub fn run(cli: &Cli) -> Result<Output, InputError> {
    match &cli.command {
        Command::Verify { algebra } => {
            let (input, alg) = load_algebra(algebra)?;
            let r = verify_linfty(&alg);
            let status = if r.passed() { Status::Ok } else { Status::Fail };
            finish(
                "verify",
                &[&input.bytes],
                Ok((status, verify_json(&alg, &r))),
            )
        }
        Command::Cohomology { algebra, degree } => {
            let (input, alg) = load_algebra(algebra)?;
            let degrees: Vec<i32> = match degree {
                Some(d) => vec![*d],
                None => alg.space().degrees().collect(),
            };
            let out = strict(cli, &alg, || {
                let dims = degrees
                    .iter()
                    .map(|&d| Ok(json!({ "degree": d, "dim": cohomology_dim(&alg, d)? })))
                    .collect::<linfty::Result<Vec<_>>>()?;
                Ok((Status::Ok, json!({ "cohomology": dims })))
            });
            let params = format!("degree={degree:?}");
            finish("cohomology", &[&input.bytes, params.as_bytes()], out)
        }
        Command::Homotopy { algebra, degree } => {
            let (input, alg) = load_algebra(algebra)?;
            let out = strict(cli, &alg, || {
                let h = homotopy_operators(&alg, *degree)?;
                Ok((
                    Status::Ok,
                    json!({
                        "degree": h.degree,
                        "h_low": matrix_json(&h.h_low),
                        "h_high": matrix_json(&h.h_high),
                        "exact": h.is_exact(),
                        "h_low_norm": rational_json(&h.h_low.max_row_sum()),
                    }),
                ))
            });
            let params = format!("degree={degree}");
            finish("homotopy", &[&input.bytes, params.as_bytes()], out)
        }
        Command::Obstruction { algebra, series } => {
            let (input, alg) = load_algebra(algebra)?;
            let sinput = read(series)?;
            let sfile = SeriesFile::parse(&text(&sinput, series)?)?;
            let coeffs = sfile
                .coeffs
                .iter()
                .enumerate()
                .map(|(k, s)| parse_element(alg.space(), s).with_context(|| format!("coeffs[{k}]")))
                .collect::<anyhow::Result<Vec<_>>>()?;
            let prefix = FormalSeries::new(coeffs)?;
            let out = strict(cli, &alg, || obstruction(cli, &alg, &prefix));
            finish("obstruction", &[&input.bytes, &sinput.bytes], out)
        }
        Command::Deform { algebra, lie, u1 } => {
            let (input, alg) = match (algebra, lie) {
                (Some(p), None) => load_algebra(p)?,
                (None, Some(p)) => {
                    let (input, mu) = load_lie(p)?;
                    (input, build_deformation_linfty(&mu)?)
                }
                _ => {
                    return Err(InputError(anyhow::anyhow!(
                        "give either an algebra file or --lie"
                    )))
                }
            };
            let v = parse_element(alg.space(), u1).context("--u1")?;
            if !v.is_zero() && !v.has_degree(0) {
                return Err(InputError(anyhow::anyhow!("--u1 must have degree 0")));
            }
            let out = strict(cli, &alg, || deform(cli, &alg, &v));
            let params = format!(
                "u1={u1};order={};t={};lie={}",
                cli.order,
                cli.t,
                lie.is_some()
            );
            finish("deform", &[&input.bytes, params.as_bytes()], out)
        }
        Command::Rigidity { lie } => {
            let (input, mu) = load_lie(lie)?;
            let out = (|| {
                if !mu.is_lie() {
                    return Err(Error::NotLie);
                }
                let r = rigidity_check(&mu)?;
                let mut results = json!({
                    "dim": mu.dim(),
                    "cohomology_dim": r.cohomology_dim,
                    "action_rank": r.action_rank,
                    "jac_kernel_dim": r.jac_kernel_dim,
                    "rigid": r.is_rigid(),
                });
                if let Some(h) = &r.homotopy {
                    results["h1"] = matrix_json(&h.h_low);
                    results["h2"] = matrix_json(&h.h_high);
                    results["exact"] = json!(h.is_exact());
                }
                let status = if r.is_rigid() {
                    Status::Ok
                } else {
                    Status::Obstructed
                };
                Ok((status, results))
            })();
            finish("rigidity", &[&input.bytes], out)
        }
        Command::Transport { lie, path } => {
            let (input, mu) = load_lie(lie)?;
            let pinput = read(path)?;
            let pfile = PathFile::parse(&text(&pinput, path)?)?;
            let mu0 = mu.to_cochain().to_f64();
            let p = pfile.to_path(&mu0)?;
            let out = (|| {
                if !mu.is_lie() {
                    return Err(Error::NotLie);
                }
                let conn = Connection::at(&mu)?;
                let r = parallel_transport(&conn, p.as_ref(), cli.t, cli.steps)?;
                let last = r.transports.last().expect("at least one sample");
                let rows: Vec<Vec<f64>> = last
                    .row_iter()
                    .map(|row| row.iter().copied().collect())
                    .collect();
                let max_defect = r.defects.iter().copied().fold(0.0, f64::max);
                Ok((
                    Status::Ok,
                    json!({
                        "t": cli.t,
                        "steps": cli.steps,
                        "transport": rows,
                        "final_defect": r.final_defect(),
                        "max_defect": max_defect,
                    }),
                ))
            })();
            let params = format!("t={};steps={}", cli.t, cli.steps);
            finish(
                "transport",
                &[&input.bytes, &pinput.bytes, params.as_bytes()],
                out,
            )
        }
        Command::ExportLie { lie } => {
            let (_, mu) = load_lie(lie)?;
            let alg = build_deformation_linfty(&mu)?;
            Ok(Output::Text(
                AlgebraFile::from_algebra(&alg).to_canonical_string(),
            ))
        }
        Command::Canonical { algebra } => {
            let (_, alg) = load_algebra(algebra)?;
            Ok(Output::Text(
                AlgebraFile::from_algebra(&alg).to_canonical_string(),
            ))
        }
        Command::Catalan { k } => {
            let values = (1..=*k)
                .map(|i| super_catalan(i).map(|c| c.to_string()))
                .collect::<linfty::Result<Vec<_>>>()?;
            let params = format!("k={k}");
            finish(
                "catalan",
                &[params.as_bytes()],
                Ok((
                    Status::Ok,
                    json!({ "super_catalan": values, "memo_cap": catalan_cap() }),
                )),
            )
        }
    }
}

fn obstruction(cli: &Cli, alg: &LInftyAlgebra, prefix: &FormalSeries) -> Outcome {
    let r = verify_cocycle(alg, prefix.coeffs())?;
    let status = match (r.is_cocycle, r.class_zero) {
        (false, _) => Status::Fail,
        (true, Some(false)) => Status::Obstructed,
        _ => Status::Ok,
    };
    let mut results = json!({
        "k": r.k,
        "obstruction": element_json(alg.space(), &r.value),
        "is_cocycle": r.is_cocycle,
        "class_zero": r.class_zero,
        "extends": r.class_zero.unwrap_or(r.is_cocycle),
    });
    if cli.oracle {
        let agrees = oracle(alg, prefix, prefix.order())?;
        results["oracle"] = json!({ "order": prefix.order(), "agrees": agrees });
        if !agrees {
            return Ok((Status::Fail, results));
        }
    }
    Ok((status, results))
}

/// Both summation readings and polynomial substitution give the same derivatives.
fn oracle(alg: &LInftyAlgebra, series: &FormalSeries, order: usize) -> linfty::Result<bool> {
    let engine = Obstructions::at(alg, series.base())?;
    let partitions = engine.taylor_mc(series, order)?;
    let compositions = engine
        .with_reading(Reading::Compositions)
        .taylor_mc(series, order)?;
    let substitution = taylor_mc_substitution(alg, series, order)?;
    Ok(partitions == compositions && partitions == substitution)
}

fn deform(cli: &Cli, alg: &LInftyAlgebra, v: &linfty::Element) -> Outcome {
    let h = homotopy_operators(alg, 1)?;
    let p = psi(alg, &h, v, cli.order, cli.t)?;
    let space = alg.space();
    let c = &p.certificate;
    let rows: Vec<Value> = c
        .rows
        .iter()
        .map(|r| json!({ "k": r.k, "computed": r.computed, "bound": r.bound, "within": r.within }))
        .collect();
    let coeffs: Vec<Value> = p
        .series
        .coeffs()
        .iter()
        .map(|u| element_json(space, u))
        .collect();
    let mut results = json!({
        "order": cli.order,
        "t": cli.t,
        "coefficients": coeffs,
        "value": float_element_json(space, &p.sum.value),
        "residual": p.sum.residual(),
        "residuals": p.sum.residuals,
        "term_norms": p.sum.term_norms,
        "certificate": {
            "norm": "max",
            "h1_norm": c.h1_norm,
            "alpha": c.alpha,
            "u1_norm": c.u1_norm,
            "radius": c.radius,
            "holds": c.holds(),
            "rows": rows,
        },
        "certified": p.certified,
        "tail_estimate": if p.tail_estimate.is_finite() { json!(p.tail_estimate) } else { Value::Null },
    });
    if !p.certified {
        results["warning"] = json!(format!(
            "|t| = {} lies outside the certified radius {:.6e}",
            cli.t.abs(),
            c.radius
        ));
    }
    let mut status = if c.holds() { Status::Ok } else { Status::Fail };
    if cli.oracle {
        let k = cli.order.min(ORACLE_ORDER);
        let agrees = oracle(alg, &p.series, k)?;
        results["oracle"] = json!({ "order": k, "agrees": agrees });
        if !agrees {
            status = Status::Fail;
        }
    }
    Ok((status, results))
}
