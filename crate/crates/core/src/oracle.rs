//! Independent brute-force verifiers: form class numbers for imaginary
//! quadratic orders, regulators recomputed directly from the logarithmic
//! embedding, and the fiber-product preset order.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

pub use crate::quadratic::form_class_number;

use crate::algebra::{build_algebra, EtaleAlgebra, FieldSpec};
use crate::arith::is_prime;
use crate::error::{internal, invalid, unsupported, Result};
use crate::invariants::OrderAnalysis;
use crate::matrix::{hnf_basis, IntMat};
use crate::order::{order_from_generators, OrderLattice};
use crate::quotient::roots_of_unity;

/// Logarithmic embedding data of a set of units: lambda coordinates
/// (ln|x| at real places, 2 ln|x| at complex places) grouped per component,
/// and the projection to R^r that drops one coordinate per component.
#[derive(Clone, Debug)]
pub struct LogEmbedding {
    /// full lambda rows, one block of r1_i + r2_i coordinates per component
    pub unprojected: Vec<Vec<f64>>,
    /// rows with the last coordinate of each component block dropped
    pub rows: Vec<Vec<f64>>,
    /// |det| of the projected rows when they form a square matrix
    pub covolume: Option<f64>,
}

/// Lambda coordinates of one element (global integral coordinates).
fn log_vector(alg: &EtaleAlgebra, x: &[BigInt]) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (i, comp) in alg.components.iter().enumerate() {
        let places = comp.places.as_ref().ok_or_else(|| {
            unsupported("log embedding needs explicit infinite places (degree <= 2 components)")
        })?;
        let o = alg.component_offset(i);
        for place in places {
            let (mut re, mut im) = (0.0f64, 0.0f64);
            for (j, (br, bi)) in place.basis_images.iter().enumerate() {
                let c = x[o + j]
                    .to_f64()
                    .ok_or_else(|| invalid("coordinate too large"))?;
                re += c * br;
                im += c * bi;
            }
            let abs = (re * re + im * im).sqrt();
            if abs == 0.0 {
                return Err(invalid("log embedding of a zero divisor"));
            }
            let mult = if place.is_real { 1.0 } else { 2.0 };
            out.push(mult * abs.ln());
        }
    }
    Ok(out)
}

/// Build the embedding data for a list of units.
pub fn log_embedding(alg: &EtaleAlgebra, units: &[Vec<BigInt>]) -> Result<LogEmbedding> {
    let mut unprojected = Vec::new();
    let mut rows = Vec::new();
    for u in units {
        let full = log_vector(alg, u)?;
        let mut proj = Vec::new();
        let mut offset = 0usize;
        for comp in &alg.components {
            let block = comp.r1 + comp.r2;
            proj.extend_from_slice(&full[offset..offset + block - 1]);
            offset += block;
        }
        unprojected.push(full);
        rows.push(proj);
    }
    let covolume = if !rows.is_empty() && rows.len() == rows[0].len() {
        Some(det_f64(&rows).abs())
    } else {
        None
    };
    Ok(LogEmbedding {
        unprojected,
        rows,
        covolume,
    })
}

fn det_f64(rows: &[Vec<f64>]) -> f64 {
    let n = rows.len();
    let mut a: Vec<Vec<f64>> = rows.to_vec();
    let mut det = 1.0f64;
    for k in 0..n {
        let pivot = (k..n)
            .max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))
            .unwrap();
        if a[pivot][k] == 0.0 {
            return 0.0;
        }
        if pivot != k {
            a.swap(pivot, k);
            det = -det;
        }
        det *= a[k][k];
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
        }
    }
    det
}

/// Numerical rank of a set of rows with a pivot threshold.
pub fn numerical_rank(rows: &[Vec<f64>], tol: f64) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let mut a: Vec<Vec<f64>> = rows.to_vec();
    let cols = a[0].len();
    let mut rank = 0usize;
    for col in 0..cols {
        let Some(pivot) = (rank..a.len())
            .filter(|&i| a[i][col].abs() > tol)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
        else {
            continue;
        };
        a.swap(rank, pivot);
        for i in rank + 1..a.len() {
            let f = a[i][col] / a[rank][col];
            for j in col..cols {
                a[i][j] -= f * a[rank][j];
            }
        }
        rank += 1;
        if rank == a.len() {
            break;
        }
    }
    rank
}

/// Recompute the regulator of an order without the index formula: find the
/// exponent lattice of the units lying in the order by box enumeration and
/// take the covolume of its logarithmic image.
pub fn direct_regulator(analysis: &OrderAnalysis) -> Result<f64> {
    let alg = &analysis.algebra;
    let order = &analysis.order;
    let r = alg.r;
    if r == 0 {
        return Ok(1.0);
    }
    // fundamental units of the maximal order, embedded into the algebra
    let mut eps: Vec<Vec<BigInt>> = Vec::new();
    for (i, comp) in alg.components.iter().enumerate() {
        for u in &comp.unit_generators {
            eps.push(alg.embed_unit(i, u));
        }
    }
    if eps.len() != r {
        return Err(internal("unit generator count does not match the rank"));
    }
    let b = analysis
        .invariants
        .unit_index
        .to_u64()
        .ok_or_else(|| unsupported("unit index too large for box enumeration"))?;
    let torsion = roots_of_unity(alg, &OrderLattice::maximal(alg))?;

    // enumerate exponent vectors in [0, b)^r; the subgroup contains b*Z^r
    // because the b-th power of any unit lies in the order (Lagrange)
    let mut found: Vec<Vec<BigInt>> = Vec::new();
    for i in 0..r {
        let mut e = vec![BigInt::zero(); r];
        e[i] = BigInt::from(b);
        found.push(e);
    }
    let mut exps = vec![0u64; r];
    loop {
        let mut u = alg.one();
        for (j, &e) in exps.iter().enumerate() {
            for _ in 0..e {
                u = alg.mul(&u, &eps[j]);
            }
        }
        let in_order = torsion
            .elements
            .iter()
            .any(|t| order.contains(&alg.mul(&u, t)));
        if in_order {
            found.push(exps.iter().map(|&e| BigInt::from(e)).collect());
        }
        // odometer
        let mut carry = 0usize;
        loop {
            exps[carry] += 1;
            if exps[carry] < b {
                break;
            }
            exps[carry] = 0;
            carry += 1;
            if carry == r {
                break;
            }
        }
        if carry == r {
            break;
        }
    }
    let exp_lattice = hnf_basis(&IntMat::from_columns(r, &found));
    if exp_lattice.cols() != r {
        return Err(internal("unit exponent lattice is not full rank"));
    }
    // projected log rows of the sublattice basis
    let gen_logs = log_embedding(alg, &eps)?;
    let mut rows = Vec::new();
    for i in 0..r {
        let mut row = vec![0.0f64; r];
        for j in 0..r {
            let c = exp_lattice[(j, i)].to_f64().expect("small exponent");
            for (k, cell) in row.iter_mut().enumerate() {
                *cell += c * gen_logs.rows[j][k];
            }
        }
        rows.push(row);
    }
    Ok(det_f64(&rows).abs())
}

/// Preset congruence order {(a_1,...,a_k) : a_i = a_j mod p} in
/// Z x ... x Z (k copies), with its algebra.
pub fn fiber_product_order(p: u64, copies: usize) -> Result<(EtaleAlgebra, OrderLattice)> {
    if !is_prime(p) {
        return Err(invalid(format!("{p} is not prime")));
    }
    if copies < 2 {
        return Err(invalid("fiber product needs at least two copies"));
    }
    let specs: Vec<FieldSpec> = (0..copies)
        .map(|_| FieldSpec {
            poly: vec![BigInt::zero(), BigInt::one()],
            supplied: None,
        })
        .collect();
    let alg = build_algebra(&specs)?;
    let mut gens = Vec::new();
    for i in 0..copies - 1 {
        let mut g = vec![BigInt::zero(); copies];
        g[i] = BigInt::from(p);
        gens.push(g);
    }
    let ord = order_from_generators(&alg, &gens)?;
    let expected = BigInt::from(p).pow((copies - 1) as u32);
    if ord.index != expected {
        return Err(internal("fiber product order has unexpected index"));
    }
    Ok((alg, ord))
}
