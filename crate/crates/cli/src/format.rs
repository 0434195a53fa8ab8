//! JSON input formats: algebras, Lie structures, deformation paths and series.

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use linfty::lie::{ConstantPath, DeformationPath, OrbitPath, SampledPath};
use linfty::{
    format_rational, parse_rational, Bracket, Cochain, Element, GradedSpace, LInftyAlgebra,
    LieStructure, Rational, Slot,
};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraFile {
    pub format: u32,
    pub degrees: Vec<DegreeBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strictness: Option<usize>,
    pub brackets: Vec<BracketBlock>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DegreeBlock {
    pub degree: i32,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketBlock {
    pub arity: usize,
    pub terms: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub inputs: Vec<(i32, usize)>,
    pub output: (i32, usize),
    pub coeff: String,
}

fn slot((degree, index): (i32, usize)) -> Slot {
    Slot::new(degree, index)
}

impl AlgebraFile {
    pub fn parse(text: &str) -> Result<Self> {
        let file: AlgebraFile = serde_json::from_str(text).context("malformed algebra file")?;
        if file.format != FORMAT_VERSION {
            bail!(
                "unsupported format version {} (expected {FORMAT_VERSION})",
                file.format
            );
        }
        Ok(file)
    }

    pub fn to_algebra(&self) -> Result<LInftyAlgebra> {
        let mut space = GradedSpace::new();
        for (i, d) in self.degrees.iter().enumerate() {
            space = space
                .with_degree(d.degree, d.dim)
                .with_context(|| format!("degrees[{i}]"))?;
            if let Some(labels) = &d.labels {
                space = space
                    .with_labels(d.degree, labels.clone())
                    .with_context(|| format!("degrees[{i}].labels"))?;
            }
        }
        let top = self.brackets.iter().map(|b| b.arity).max();
        let strictness = self.strictness.unwrap_or_else(|| top.map_or(0, |k| k + 1));
        let mut brackets: Vec<Bracket> = (0..strictness.max(top.map_or(0, |k| k + 1)))
            .map(Bracket::new)
            .collect();
        for (b, block) in self.brackets.iter().enumerate() {
            for (t, term) in block.terms.iter().enumerate() {
                let at = || format!("brackets[{b}].terms[{t}]");
                if term.inputs.len() != block.arity {
                    bail!(
                        "{}: {} inputs for a bracket of arity {}",
                        at(),
                        term.inputs.len(),
                        block.arity
                    );
                }
                let coeff = parse_rational(&term.coeff).with_context(at)?;
                let inputs: Vec<Slot> = term.inputs.iter().copied().map(slot).collect();
                brackets[block.arity]
                    .insert_term(&space, &inputs, slot(term.output), coeff)
                    .with_context(at)?;
            }
        }
        Ok(LInftyAlgebra::new(space, brackets, strictness)?)
    }

    pub fn from_algebra(alg: &LInftyAlgebra) -> Self {
        let space = alg.space();
        let degrees = space
            .degrees()
            .map(|d| DegreeBlock {
                degree: d,
                dim: space.dim(d),
                labels: space.labels(d).map(<[String]>::to_vec),
            })
            .collect();
        let brackets = alg
            .brackets()
            .iter()
            .filter(|b| !b.is_zero())
            .map(|b| BracketBlock {
                arity: b.arity(),
                terms: b
                    .entries()
                    .flat_map(|(inputs, out)| {
                        out.terms().map(move |(s, c)| Term {
                            inputs: inputs.iter().map(|i| (i.degree, i.index)).collect(),
                            output: (s.degree, s.index),
                            coeff: format_rational(c),
                        })
                    })
                    .collect(),
            })
            .collect();
        AlgebraFile {
            format: FORMAT_VERSION,
            degrees,
            strictness: Some(alg.strictness()),
            brackets,
        }
    }

    pub fn to_canonical_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LieFile {
    pub dim: usize,
    pub constants: Vec<Constant>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constant {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub coeff: String,
}

impl LieFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).context("malformed Lie structure file")
    }

    pub fn to_structure(&self) -> Result<LieStructure> {
        let mut constants = Vec::with_capacity(self.constants.len());
        for (n, c) in self.constants.iter().enumerate() {
            let q = parse_rational(&c.coeff).with_context(|| format!("constants[{n}].coeff"))?;
            constants.push(((c.i, c.j, c.k), q));
        }
        Ok(LieStructure::new(self.dim, constants)?)
    }

    #[cfg(test)]
    pub fn from_structure(mu: &LieStructure) -> Self {
        LieFile {
            dim: mu.dim(),
            constants: mu
                .constants()
                .map(|((i, j, k), c)| Constant {
                    i,
                    j,
                    k,
                    coeff: format_rational(c),
                })
                .collect(),
        }
    }
}

/// A deformation path `t ↦ μ_t` in `C²(g)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PathFile {
    /// `μ_t = μ₀`.
    Constant,
    /// `μ_t = μ₀ · exp(tA)`, `A` given by rows.
    Orbit { generator: Vec<Vec<f64>> },
    /// Samples of `μ_t` in the standard `C²` coordinates.
    Samples {
        times: Vec<f64>,
        values: Vec<Vec<f64>>,
    },
}

impl PathFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).context("malformed path file")
    }

    pub fn to_path(&self, mu0: &Cochain<f64>) -> Result<Box<dyn DeformationPath>> {
        let n = mu0.n();
        Ok(match self {
            PathFile::Constant => Box::new(ConstantPath(mu0.clone())),
            PathFile::Orbit { generator } => {
                if generator.len() != n || generator.iter().any(|r| r.len() != n) {
                    bail!("generator must be a {n}x{n} matrix");
                }
                let flat: Vec<f64> = generator.iter().flatten().copied().collect();
                Box::new(OrbitPath {
                    mu0: mu0.clone(),
                    generator: nalgebra::DMatrix::from_row_slice(n, n, &flat),
                })
            }
            PathFile::Samples { times, values } => {
                let samples = values
                    .iter()
                    .enumerate()
                    .map(|(i, v)| {
                        Cochain::from_data(n, 2, v.clone()).with_context(|| format!("values[{i}]"))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Box::new(SampledPath::new(times.clone(), samples)?)
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesFile {
    /// `u₀, u₁, …` as element specs.
    pub coeffs: Vec<String>,
}

impl SeriesFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).context("malformed series file")
    }
}

/// Parses `label=value, …` where a label is a basis name or `(degree,index)`.
pub fn parse_element(space: &GradedSpace, input: &str) -> Result<Element> {
    let mut e = Element::zero();
    for part in split_terms(input) {
        let (name, value) = part
            .split_once('=')
            .ok_or_else(|| anyhow!("term {part:?} is not of the form label=value"))?;
        let name = name.trim();
        let s = match space.find_label(name) {
            Some(s) => s,
            None => parse_slot(name)?,
        };
        space.check(s)?;
        e.add_term(s, parse_rational(value)?);
    }
    Ok(e)
}

fn split_terms(input: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0;
    let mut start = 0;
    for (i, c) in input.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&input[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&input[start..]);
    out.into_iter().filter(|s| !s.trim().is_empty()).collect()
}

fn parse_slot(name: &str) -> Result<Slot> {
    let inner = name
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| anyhow!("unknown basis label {name:?}"))?;
    let (d, i) = inner
        .split_once(',')
        .ok_or_else(|| anyhow!("slot {name:?} must be (degree,index)"))?;
    Ok(Slot::new(d.trim().parse()?, i.trim().parse()?))
}

/// `[[label, "p/q"], …]` in slot order.
pub fn element_json(space: &GradedSpace, e: &Element) -> serde_json::Value {
    e.terms()
        .map(|(s, c)| serde_json::json!([space.label(s), format_rational(c)]))
        .collect()
}

pub fn float_element_json(space: &GradedSpace, e: &Element<f64>) -> serde_json::Value {
    e.terms()
        .map(|(s, c)| serde_json::json!([space.label(s), c]))
        .collect()
}

pub fn matrix_json(m: &linfty::RationalMatrix) -> serde_json::Value {
    (0..m.rows())
        .map(|i| {
            m.row(i)
                .iter()
                .map(format_rational)
                .collect::<Vec<String>>()
        })
        .collect()
}

pub fn rational_json(q: &Rational) -> serde_json::Value {
    serde_json::Value::String(format_rational(q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use linfty::instances::{parabola, sl2_deformation};

    #[test]
    fn algebra_round_trip_is_byte_identical() {
        for alg in [parabola(), sl2_deformation()] {
            let text = AlgebraFile::from_algebra(&alg).to_canonical_string();
            let parsed = AlgebraFile::parse(&text).unwrap().to_algebra().unwrap();
            assert_eq!(parsed, alg);
            assert_eq!(
                AlgebraFile::from_algebra(&parsed).to_canonical_string(),
                text
            );
        }
    }

    #[test]
    fn element_specs() {
        let space = parabola().space().clone();
        let e = parse_element(&space, "x1=1/2, (0,1)=-0.25").unwrap();
        assert_eq!(e.get(Slot::new(0, 0)), linfty::ratio(1, 2));
        assert_eq!(e.get(Slot::new(0, 1)), linfty::ratio(-1, 4));
        assert!(parse_element(&space, "").unwrap().is_zero());
        assert!(parse_element(&space, "z=1").is_err());
        assert!(parse_element(&space, "(3,0)=1").is_err());
    }

    #[test]
    fn lie_round_trip() {
        let mu = LieStructure::sl2();
        let f = LieFile::from_structure(&mu);
        let text = serde_json::to_string(&f).unwrap();
        assert_eq!(LieFile::parse(&text).unwrap().to_structure().unwrap(), mu);
    }

    #[test]
    fn rejects_bad_terms() {
        let text = r#"{"format":1,"degrees":[{"degree":0,"dim":1}],"brackets":[{"arity":1,"terms":[{"inputs":[[0,0]],"output":[0,0],"coeff":"1"}]}]}"#;
        let err = AlgebraFile::parse(text).unwrap().to_algebra().unwrap_err();
        assert!(format!("{err:#}").contains("brackets[0].terms[0]"));
        assert!(AlgebraFile::parse(r#"{"format":1}"#).is_err());
    }
}
