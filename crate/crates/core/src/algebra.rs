//! Construction of the ambient etale Q-algebra K = K_1 x ... x K_m and the
//! classical data of each component's maximal order.
//!
//! Components of degree 1 and 2 are computed internally (discriminant,
//! integral basis, roots of unity, class number via reduced binary quadratic
//! forms, fundamental unit via continued fractions). Components of degree
//! >= 3 must arrive with verified data supplied by the caller.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::{is_perfect_square, square_part, squarefree_part};
use crate::error::{internal, invalid, Result};
use crate::matrix::IntMat;
use crate::quadratic::{
    form_class_number, fundamental_unit, narrow_class_number_indefinite, QuadUnit,
};

/// A component field given by a monic integer polynomial, coefficients in
/// ascending degree order. Degree >= 3 requires `supplied` data.
#[derive(Clone, Debug)]
pub struct FieldSpec {
    pub poly: Vec<BigInt>,
    pub supplied: Option<SuppliedFieldData>,
}

/// Caller-supplied invariants for a component of degree >= 3.
#[derive(Clone, Debug)]
pub struct SuppliedFieldData {
    pub disc: BigInt,
    pub r1: usize,
    pub r2: usize,
    pub w: u64,
    pub h: BigInt,
    pub regulator: f64,
    /// Coordinates of the integral basis over the power basis of the
    /// defining polynomial; the first element must be 1.
    pub integral_basis: Vec<Vec<BigRational>>,
    /// Generators of the unit group modulo torsion, as integral-basis
    /// coordinates.
    pub unit_generators: Vec<Vec<BigInt>>,
    /// A root of unity of exact order `w`.
    pub torsion_generator: Vec<BigInt>,
    /// Norms of the primes above p in the maximal order, for the rational
    /// primes where this component meets a singularity.
    pub prime_norms: BTreeMap<u64, Vec<BigInt>>,
}

/// One infinite place: images of the component's integral basis elements.
#[derive(Clone, Debug)]
pub struct InfinitePlace {
    pub is_real: bool,
    /// complex value (re, im) of each basis element
    pub basis_images: Vec<(f64, f64)>,
}

/// Classical data of the maximal order of one component field.
#[derive(Clone, Debug)]
pub struct MaximalFieldData {
    pub degree: usize,
    pub disc: BigInt,
    pub r1: usize,
    pub r2: usize,
    pub w: u64,
    pub h: BigInt,
    pub regulator: f64,
    pub integral_basis: Vec<Vec<BigRational>>,
    pub unit_generators: Vec<Vec<BigInt>>,
    pub torsion_generator: Vec<BigInt>,
    /// e_i * e_j = sum_k mult_table[(i*degree + j)*degree + k] * e_k
    pub mult_table: Vec<BigInt>,
    /// Infinite places (one per real embedding and per conjugate pair);
    /// absent for supplied components.
    pub places: Option<Vec<InfinitePlace>>,
    pub prime_norms: BTreeMap<u64, Vec<BigInt>>,
    pub basis_names: Vec<String>,
}

impl MaximalFieldData {
    pub fn mult_entry(&self, i: usize, j: usize, k: usize) -> &BigInt {
        &self.mult_table[(i * self.degree + j) * self.degree + k]
    }

    /// Product of two coordinate vectors in the integral basis.
    pub fn mul(&self, x: &[BigInt], y: &[BigInt]) -> Vec<BigInt> {
        let d = self.degree;
        let mut out = vec![BigInt::zero(); d];
        for i in 0..d {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..d {
                if y[j].is_zero() {
                    continue;
                }
                let coeff = &x[i] * &y[j];
                for k in 0..d {
                    out[k] += &coeff * self.mult_entry(i, j, k);
                }
            }
        }
        out
    }

    /// Matrix of multiplication by `x` on the integral basis.
    pub fn mult_matrix(&self, x: &[BigInt]) -> IntMat {
        let d = self.degree;
        IntMat::from_fn(d, d, |k, j| {
            let mut acc = BigInt::zero();
            for i in 0..d {
                acc += &x[i] * self.mult_entry(i, j, k);
            }
            acc
        })
    }

    /// Field norm of an integral element.
    pub fn norm(&self, x: &[BigInt]) -> BigInt {
        self.mult_matrix(x).det()
    }

    pub fn one(&self) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.degree];
        v[0] = BigInt::one();
        v
    }
}

/// Signature data and maximal-order structure of K = K_1 x ... x K_m,
/// with the integral basis of the product assembled block-diagonally.
#[derive(Clone, Debug)]
pub struct EtaleAlgebra {
    pub components: Vec<MaximalFieldData>,
    pub n: usize,
    pub r1: usize,
    pub r2: usize,
    pub m: usize,
    /// unit rank r = r1 + r2 - m
    pub r: usize,
    /// Disc of the maximal order (product of component discriminants)
    pub disc: BigInt,
    offsets: Vec<usize>,
}

impl EtaleAlgebra {
    pub fn component_offset(&self, i: usize) -> usize {
        self.offsets[i]
    }

    pub fn component_range(&self, i: usize) -> std::ops::Range<usize> {
        self.offsets[i]..self.offsets[i] + self.components[i].degree
    }

    /// Multiplicative identity in integral-basis coordinates.
    pub fn one(&self) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.n];
        for &o in &self.offsets {
            v[o] = BigInt::one();
        }
        v
    }

    /// Componentwise product of coordinate vectors.
    pub fn mul(&self, x: &[BigInt], y: &[BigInt]) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.n];
        for (i, comp) in self.components.iter().enumerate() {
            let range = self.component_range(i);
            let prod = comp.mul(&x[range.clone()], &y[range.clone()]);
            out[range].clone_from_slice(&prod);
        }
        out
    }

    /// Matrix of multiplication by `x` on the integral basis (block diagonal).
    pub fn mult_matrix(&self, x: &[BigInt]) -> IntMat {
        let mut m = IntMat::zero(self.n, self.n);
        for (i, comp) in self.components.iter().enumerate() {
            let o = self.offsets[i];
            let block = comp.mult_matrix(&x[o..o + comp.degree]);
            for a in 0..comp.degree {
                for b in 0..comp.degree {
                    m[(o + a, o + b)] = block[(a, b)].clone();
                }
            }
        }
        m
    }

    pub fn trace(&self, x: &[BigInt]) -> BigInt {
        let mut acc = BigInt::zero();
        for (i, comp) in self.components.iter().enumerate() {
            let o = self.offsets[i];
            for j in 0..comp.degree {
                for idx in 0..comp.degree {
                    acc += &x[o + idx] * comp.mult_entry(idx, j, j);
                }
            }
        }
        acc
    }

    /// Gram matrix Tr(e_i e_j) of the trace form on the integral basis.
    pub fn trace_matrix(&self) -> IntMat {
        let mut t = IntMat::zero(self.n, self.n);
        for (c, comp) in self.components.iter().enumerate() {
            let o = self.offsets[c];
            for a in 0..comp.degree {
                for b in 0..comp.degree {
                    let mut x = vec![BigInt::zero(); comp.degree];
                    x[a] = BigInt::one();
                    let mut y = vec![BigInt::zero(); comp.degree];
                    y[b] = BigInt::one();
                    let p = comp.mul(&x, &y);
                    let mut acc = BigInt::zero();
                    for j in 0..comp.degree {
                        for idx in 0..comp.degree {
                            acc += &p[idx] * comp.mult_entry(idx, j, j);
                        }
                    }
                    t[(o + a, o + b)] = acc;
                }
            }
        }
        t
    }

    /// Embed a unit of component `i` (local coordinates) into the algebra,
    /// with identity in every other component.
    pub fn embed_unit(&self, i: usize, local: &[BigInt]) -> Vec<BigInt> {
        let mut v = self.one();
        let range = self.component_range(i);
        v[range].clone_from_slice(local);
        v
    }

    /// Flattened structure constants of the full integral basis
    /// (block diagonal across components).
    pub fn structure_constants(&self) -> Vec<BigInt> {
        let n = self.n;
        let mut table = vec![BigInt::zero(); n * n * n];
        for (c, comp) in self.components.iter().enumerate() {
            let o = self.offsets[c];
            for a in 0..comp.degree {
                for b in 0..comp.degree {
                    for k in 0..comp.degree {
                        table[((o + a) * n + (o + b)) * n + (o + k)] =
                            comp.mult_entry(a, b, k).clone();
                    }
                }
            }
        }
        table
    }

    /// Product over components of the numbers of roots of unity.
    pub fn w(&self) -> u64 {
        self.components.iter().map(|c| c.w).product()
    }

    /// Product over components of the class numbers.
    pub fn h(&self) -> BigInt {
        self.components.iter().map(|c| c.h.clone()).product()
    }

    /// Product over components of the regulators.
    pub fn regulator(&self) -> f64 {
        self.components.iter().map(|c| c.regulator).product()
    }
}

/// Build the data of one component field from its defining polynomial.
pub fn build_field(spec: &FieldSpec) -> Result<MaximalFieldData> {
    let poly = normalize_poly(&spec.poly)?;
    let degree = poly.len() - 1;
    match degree {
        0 => Err(invalid("constant polynomial does not define a field")),
        1 => {
            if spec.supplied.is_some() {
                return Err(invalid("supplied data is only accepted for degree >= 3"));
            }
            Ok(rational_field_data())
        }
        2 => {
            if spec.supplied.is_some() {
                return Err(invalid("supplied data is only accepted for degree >= 3"));
            }
            quadratic_field_data(&poly)
        }
        _ => {
            let supplied = spec.supplied.as_ref().ok_or_else(|| {
                invalid("components of degree >= 3 require supplied maximal-order data")
            })?;
            supplied_field_data(&poly, supplied)
        }
    }
}

/// Assemble the product algebra; component order is preserved from input.
pub fn build_algebra(specs: &[FieldSpec]) -> Result<EtaleAlgebra> {
    if specs.is_empty() {
        return Err(invalid(
            "an etale algebra needs at least one component (the zero ring is rejected)",
        ));
    }
    let components: Vec<MaximalFieldData> = specs.iter().map(build_field).collect::<Result<_>>()?;
    Ok(assemble(components))
}

pub fn assemble(components: Vec<MaximalFieldData>) -> EtaleAlgebra {
    let mut offsets = Vec::with_capacity(components.len());
    let mut n = 0usize;
    for c in &components {
        offsets.push(n);
        n += c.degree;
    }
    let r1: usize = components.iter().map(|c| c.r1).sum();
    let r2: usize = components.iter().map(|c| c.r2).sum();
    let m = components.len();
    let disc: BigInt = components.iter().map(|c| c.disc.clone()).product();
    EtaleAlgebra {
        n,
        r1,
        r2,
        m,
        r: r1 + r2 - m,
        disc,
        offsets,
        components,
    }
}

fn normalize_poly(coeffs: &[BigInt]) -> Result<Vec<BigInt>> {
    let mut poly = coeffs.to_vec();
    while poly.last().is_some_and(|c| c.is_zero()) {
        poly.pop();
    }
    if poly.len() < 2 {
        return Err(invalid("polynomial must have degree >= 1"));
    }
    if !poly.last().unwrap().is_one() {
        return Err(invalid("polynomial must be monic"));
    }
    Ok(poly)
}

fn rational_field_data() -> MaximalFieldData {
    MaximalFieldData {
        degree: 1,
        disc: BigInt::one(),
        r1: 1,
        r2: 0,
        w: 2,
        h: BigInt::one(),
        regulator: 1.0,
        integral_basis: vec![vec![BigRational::one()]],
        unit_generators: vec![],
        torsion_generator: vec![BigInt::from(-1)],
        mult_table: vec![BigInt::one()],
        places: Some(vec![InfinitePlace {
            is_real: true,
            basis_images: vec![(1.0, 0.0)],
        }]),
        prime_norms: BTreeMap::new(),
        basis_names: vec!["1".to_string()],
    }
}

/// Multiplication parameters of the quadratic order of discriminant D:
/// the basis is {1, w} with w^2 = t*w + m.
pub(crate) fn quadratic_tm(disc: &BigInt) -> (BigInt, BigInt) {
    if (disc % 4i32).is_zero() {
        (BigInt::zero(), disc / 4)
    } else {
        (BigInt::one(), (disc - 1) / 4)
    }
}

fn quadratic_field_data(poly: &[BigInt]) -> Result<MaximalFieldData> {
    let b = poly[1].clone();
    let c = poly[0].clone();
    let poly_disc = &b * &b - BigInt::from(4) * &c;
    if poly_disc.is_zero() || is_perfect_square(&poly_disc) {
        return Err(invalid(format!(
            "polynomial x^2 + ({b})x + ({c}) is reducible over Q"
        )));
    }
    let d = squarefree_part(&poly_disc)?;
    let s = square_part(&poly_disc)?;
    let rem = ((&d % 4i32) + 4i32) % 4i32;
    let disc = if rem.is_one() { d.clone() } else { &d * 4 };
    let (t, m) = quadratic_tm(&disc);

    // theta = (-b + s*sqrt(d))/2, so sqrt(d) = (2*theta + b)/s.
    // Coordinates of the integral basis {1, w} over {1, theta}.
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let omega_coords = if rem.is_one() {
        // w = (1 + sqrt(d))/2 = (s + b)/(2s) + theta/s
        vec![
            BigRational::new(&s + &b, &s * 2),
            BigRational::new(BigInt::one(), s.clone()),
        ]
    } else {
        // w = sqrt(d) = b/s + 2*theta/s
        vec![
            BigRational::new(b.clone(), s.clone()),
            BigRational::new(BigInt::from(2), s.clone()),
        ]
    };
    let _ = half;
    let integral_basis = vec![vec![BigRational::one(), BigRational::zero()], omega_coords];

    // mult table for {1, w}: w^2 = m*1 + t*w
    let mult_table: Vec<BigInt> = vec![
        BigInt::one(),
        BigInt::zero(), // 1*1
        BigInt::zero(),
        BigInt::one(), // 1*w
        BigInt::zero(),
        BigInt::one(), // w*1
        m.clone(),
        t.clone(), // w*w
    ];

    let imaginary = disc.is_negative();
    let (w, torsion_generator) = if imaginary {
        imaginary_torsion(&t, &m)?
    } else {
        (2u64, vec![BigInt::from(-1), BigInt::zero()])
    };

    let (r1, r2) = if imaginary { (0, 1) } else { (2, 0) };
    let (h, regulator, unit_generators, fundamental) = if imaginary {
        (BigInt::from(form_class_number(&disc)?), 1.0, vec![], None)
    } else {
        let eps = fundamental_unit(&disc)?;
        let narrow = narrow_class_number_indefinite(&disc)?;
        let h = if eps.norm() == BigInt::from(-1) {
            BigInt::from(narrow)
        } else {
            if narrow % 2 != 0 {
                return Err(internal(
                    "narrow class number must be even when the fundamental unit has norm +1",
                ));
            }
            BigInt::from(narrow / 2)
        };
        let reg = eps.to_f64().ln();
        let coords = unit_coords(&eps, &disc);
        (h, reg, vec![coords], Some(eps))
    };

    let places = Some(quadratic_places(&disc));
    let basis_names = vec!["1".to_string(), omega_name(&disc)];

    let data = MaximalFieldData {
        degree: 2,
        disc,
        r1,
        r2,
        w,
        h,
        regulator,
        integral_basis,
        unit_generators,
        torsion_generator,
        mult_table,
        places,
        prime_norms: BTreeMap::new(),
        basis_names,
    };
    if let Some(eps) = fundamental {
        debug_assert!(eps.to_f64() > 1.0);
    }
    Ok(data)
}

fn omega_name(disc: &BigInt) -> String {
    if (disc % 4i32).is_zero() {
        format!("sqrt({})", disc / 4)
    } else {
        format!("(1+sqrt({disc}))/2")
    }
}

/// Enumerate the roots of unity of an imaginary quadratic maximal order by
/// scanning the small coordinate box (all torsion elements have
/// coordinates in {-1,0,1} in the {1,w} basis) and return (w, generator).
fn imaginary_torsion(t: &BigInt, m: &BigInt) -> Result<(u64, Vec<BigInt>)> {
    let mut units = Vec::new();
    for a in -1i64..=1 {
        for bb in -1i64..=1 {
            let a = BigInt::from(a);
            let bb = BigInt::from(bb);
            // N(a + b*w) = a^2 + t*a*b - m*b^2
            let n = &a * &a + t * &a * &bb - m * &bb * &bb;
            if n.is_one() {
                units.push(vec![a, bb]);
            }
        }
    }
    let count = units.len() as u64;
    // generator: element of maximal multiplicative order
    let mul = |x: &[BigInt], y: &[BigInt]| -> Vec<BigInt> {
        // (a1 + b1 w)(a2 + b2 w) = a1a2 + m b1b2 + (a1b2 + a2b1 + t b1b2) w
        vec![
            &x[0] * &y[0] + m * &x[1] * &y[1],
            &x[0] * &y[1] + &x[1] * &y[0] + t * &x[1] * &y[1],
        ]
    };
    let one = vec![BigInt::one(), BigInt::zero()];
    let order_of = |u: &Vec<BigInt>| -> u64 {
        let mut acc = u.clone();
        let mut k = 1u64;
        while acc != one {
            acc = mul(&acc, u);
            k += 1;
            if k > 12 {
                break;
            }
        }
        k
    };
    let gen = units
        .iter()
        .max_by_key(|u| order_of(u))
        .cloned()
        .ok_or_else(|| internal("no torsion units found"))?;
    let w = order_of(&gen);
    if w != count {
        return Err(internal(format!(
            "torsion group of order {count} is not cyclic of order {w}"
        )));
    }
    Ok((count, gen))
}

fn unit_coords(eps: &QuadUnit, disc: &BigInt) -> Vec<BigInt> {
    if (disc % 4i32).is_zero() {
        // basis {1, sqrt(d')}: eps = x/2 + (y/2) sqrt(d') with x, y even
        vec![&eps.x / 2, &eps.y / 2]
    } else {
        // basis {1, (1+sqrt(d))/2}: (x + y sqrt(d))/2 = (x - y)/2 + y*w
        vec![(&eps.x - &eps.y) / 2, eps.y.clone()]
    }
}

fn quadratic_places(disc: &BigInt) -> Vec<InfinitePlace> {
    let d_f64 = crate::quadratic::bigint_f64(disc);
    if disc.is_negative() {
        let (re, im) = if (disc % 4i32).is_zero() {
            (0.0, (-d_f64 / 4.0).sqrt())
        } else {
            (0.5, (-d_f64).sqrt() / 2.0)
        };
        vec![InfinitePlace {
            is_real: false,
            basis_images: vec![(1.0, 0.0), (re, im)],
        }]
    } else {
        let (w1, w2) = if (disc % 4i32).is_zero() {
            let s = (d_f64 / 4.0).sqrt();
            (s, -s)
        } else {
            let s = d_f64.sqrt();
            ((1.0 + s) / 2.0, (1.0 - s) / 2.0)
        };
        vec![
            InfinitePlace {
                is_real: true,
                basis_images: vec![(1.0, 0.0), (w1, 0.0)],
            },
            InfinitePlace {
                is_real: true,
                basis_images: vec![(1.0, 0.0), (w2, 0.0)],
            },
        ]
    }
}

/// Validate supplied data for a degree >= 3 component and derive its
/// multiplication table from the integral basis and defining polynomial.
fn supplied_field_data(poly: &[BigInt], s: &SuppliedFieldData) -> Result<MaximalFieldData> {
    let degree = poly.len() - 1;
    if s.r1 + 2 * s.r2 != degree {
        return Err(invalid("supplied signature violates r1 + 2*r2 = degree"));
    }
    if s.unit_generators.len() != s.r1 + s.r2 - 1 {
        return Err(invalid("supplied unit generators must number r1 + r2 - 1"));
    }
    let expected_sign = if s.r2.is_multiple_of(2) { 1 } else { -1 };
    if s.disc.signum() != BigInt::from(expected_sign) {
        return Err(invalid("supplied discriminant sign must be (-1)^r2"));
    }
    if s.integral_basis.len() != degree || s.integral_basis.iter().any(|b| b.len() != degree) {
        return Err(invalid("integral basis must be square of the field degree"));
    }
    let mut first_is_one = s.integral_basis[0][0].is_one();
    for c in &s.integral_basis[0][1..] {
        first_is_one &= c.is_zero();
    }
    if !first_is_one {
        return Err(invalid("the first integral basis element must be 1"));
    }

    let mult_table = supplied_mult_table(poly, &s.integral_basis)?;
    let data = MaximalFieldData {
        degree,
        disc: s.disc.clone(),
        r1: s.r1,
        r2: s.r2,
        w: s.w,
        h: s.h.clone(),
        regulator: s.regulator,
        integral_basis: s.integral_basis.clone(),
        unit_generators: s.unit_generators.clone(),
        torsion_generator: s.torsion_generator.clone(),
        mult_table,
        places: None,
        prime_norms: s.prime_norms.clone(),
        basis_names: (0..degree)
            .map(|i| {
                if i == 0 {
                    "1".to_string()
                } else {
                    format!("b{i}")
                }
            })
            .collect(),
    };
    for (idx, u) in data.unit_generators.iter().enumerate() {
        if u.len() != degree {
            return Err(invalid("unit generator has wrong coordinate length"));
        }
        let n = data.norm(u);
        if !n.abs().is_one() {
            return Err(invalid(format!(
                "supplied unit generator {idx} has norm {n}, expected a unit"
            )));
        }
    }
    // torsion generator must have exact order w
    if data.torsion_generator.len() != degree {
        return Err(invalid("torsion generator has wrong coordinate length"));
    }
    let one = data.one();
    let mut acc = data.torsion_generator.clone();
    for k in 1..s.w {
        if acc == one {
            return Err(invalid(format!(
                "torsion generator has order {k}, expected {}",
                s.w
            )));
        }
        acc = data.mul(&acc, &data.torsion_generator);
    }
    if acc != one {
        return Err(invalid("torsion generator does not have order w"));
    }
    Ok(data)
}

/// Polynomial arithmetic over Q mod the defining polynomial, expressed in
/// the supplied integral basis; structure constants must come out integral.
fn supplied_mult_table(poly: &[BigInt], basis: &[Vec<BigRational>]) -> Result<Vec<BigInt>> {
    let degree = poly.len() - 1;
    // reduce a product polynomial (degree <= 2d-2) mod poly
    let reduce = |mut p: Vec<BigRational>| -> Vec<BigRational> {
        while p.len() > degree {
            let lead = p.pop().unwrap();
            if lead.is_zero() {
                continue;
            }
            let k = p.len() - degree; // subtract lead * x^k * poly
            for i in 0..degree {
                let sub = &lead * BigRational::from(poly[i].clone());
                p[k + i] -= sub;
            }
        }
        p.resize(degree, BigRational::zero());
        p
    };
    // invert the basis matrix (columns are basis vectors over the power basis)
    let den: BigInt = basis
        .iter()
        .flat_map(|b| b.iter().map(|c| c.denom().clone()))
        .product();
    let scaled = IntMat::from_fn(degree, degree, |i, j| {
        (&basis[j][i] * BigRational::from(den.clone())).to_integer()
    });
    let inv_scaled = crate::matrix::inverse_rational(&scaled)
        .map_err(|_| invalid("integral basis matrix is singular"))?;
    // basis_inv = inv(B) = inv_scaled * den
    let express = |p: &[BigRational]| -> Result<Vec<BigInt>> {
        let mut out = Vec::with_capacity(degree);
        for row in &inv_scaled {
            let mut acc = BigRational::zero();
            for (c, x) in row.iter().zip(p) {
                acc += c * x;
            }
            acc *= BigRational::from(den.clone());
            if !acc.is_integer() {
                return Err(invalid("integral basis is not closed under multiplication"));
            }
            out.push(acc.to_integer());
        }
        Ok(out)
    };

    let mut table = vec![BigInt::zero(); degree * degree * degree];
    for i in 0..degree {
        for j in 0..degree {
            let mut prod = vec![BigRational::zero(); 2 * degree - 1];
            for (a, ca) in basis[i].iter().enumerate() {
                if ca.is_zero() {
                    continue;
                }
                for (b, cb) in basis[j].iter().enumerate() {
                    prod[a + b] += ca * cb;
                }
            }
            let reduced = reduce(prod);
            let coords = express(&reduced)?;
            for k in 0..degree {
                table[(i * degree + j) * degree + k] = coords[k].clone();
            }
        }
    }
    Ok(table)
}
