//! Problem-file schema: JSON with big integers as decimal strings (plain
//! numbers also accepted) and rationals as "num/den" strings.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::Deserialize;

use acnf_core::algebra::SuppliedFieldData;
use acnf_core::FieldSpec;

/// An integer that may arrive as a JSON number or a decimal string.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum IntVal {
    Num(i64),
    Str(String),
}

impl IntVal {
    pub fn to_bigint(&self) -> Result<BigInt, String> {
        match self {
            IntVal::Num(n) => Ok(BigInt::from(*n)),
            IntVal::Str(s) => s
                .trim()
                .parse::<BigInt>()
                .map_err(|_| format!("not an integer: {s:?}")),
        }
    }
}

fn parse_rational(s: &str) -> Result<BigRational, String> {
    let parts: Vec<&str> = s.split('/').collect();
    match parts.as_slice() {
        [n] => Ok(BigRational::from(
            n.trim()
                .parse::<BigInt>()
                .map_err(|_| format!("not a rational: {s:?}"))?,
        )),
        [n, d] => {
            let num = n
                .trim()
                .parse::<BigInt>()
                .map_err(|_| format!("not a rational: {s:?}"))?;
            let den = d
                .trim()
                .parse::<BigInt>()
                .map_err(|_| format!("not a rational: {s:?}"))?;
            if den == BigInt::from(0) {
                return Err(format!("zero denominator: {s:?}"));
            }
            Ok(BigRational::new(num, den))
        }
        _ => Err(format!("not a rational: {s:?}")),
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum RatVal {
    Num(i64),
    Str(String),
}

impl RatVal {
    pub fn to_rational(&self) -> Result<BigRational, String> {
        match self {
            RatVal::Num(n) => Ok(BigRational::from(BigInt::from(*n))),
            RatVal::Str(s) => parse_rational(s),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuppliedSpec {
    pub disc: IntVal,
    pub r1: usize,
    pub r2: usize,
    pub w: u64,
    pub h: IntVal,
    pub regulator: f64,
    pub integral_basis: Vec<Vec<RatVal>>,
    pub unit_generators: Vec<Vec<IntVal>>,
    pub torsion_generator: Vec<IntVal>,
    #[serde(default)]
    pub prime_norms: BTreeMap<String, Vec<IntVal>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldEntry {
    pub poly: Vec<IntVal>,
    #[serde(default)]
    pub supplied: Option<SuppliedSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum OrderSpec {
    Keyword(String),
    Generators {
        generators: Vec<Vec<IntVal>>,
    },
    Preset {
        preset: String,
        p: u64,
        #[serde(default)]
        copies: Option<usize>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(default)]
    pub fields: Vec<FieldEntry>,
    pub order: OrderSpec,
}

fn ints(v: &[IntVal]) -> Result<Vec<BigInt>, String> {
    v.iter().map(|x| x.to_bigint()).collect()
}

pub fn to_field_specs(problem: &ProblemFile) -> Result<Vec<FieldSpec>, String> {
    let mut specs = Vec::new();
    for f in &problem.fields {
        let supplied = match &f.supplied {
            None => None,
            Some(s) => {
                let mut prime_norms = BTreeMap::new();
                for (k, v) in &s.prime_norms {
                    let p: u64 = k
                        .parse()
                        .map_err(|_| format!("bad prime key {k:?} in prime_norms"))?;
                    prime_norms.insert(p, ints(v)?);
                }
                let integral_basis = s
                    .integral_basis
                    .iter()
                    .map(|row| row.iter().map(|x| x.to_rational()).collect())
                    .collect::<Result<Vec<Vec<BigRational>>, String>>()?;
                Some(SuppliedFieldData {
                    disc: s.disc.to_bigint()?,
                    r1: s.r1,
                    r2: s.r2,
                    w: s.w,
                    h: s.h.to_bigint()?,
                    regulator: s.regulator,
                    integral_basis,
                    unit_generators: s
                        .unit_generators
                        .iter()
                        .map(|g| ints(g))
                        .collect::<Result<_, _>>()?,
                    torsion_generator: ints(&s.torsion_generator)?,
                    prime_norms,
                })
            }
        };
        specs.push(FieldSpec {
            poly: ints(&f.poly)?,
            supplied,
        });
    }
    Ok(specs)
}

pub fn parse_generators(gens: &[Vec<IntVal>]) -> Result<Vec<Vec<BigInt>>, String> {
    gens.iter().map(|g| ints(g)).collect()
}

/// Render a rational as "num/den" (or plain integer when the denominator
/// is 1).
pub fn show_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}
