//! Orders inside the maximal order, represented as full-rank sublattices of
//! Z^n in the integral-basis coordinates of the product of maximal orders.
//!
//! An order is closed under multiplication and contains 1; the conductor,
//! the singular maximal ideals, and the local quotients at those ideals are
//! all computed by exact lattice arithmetic.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::algebra::{EtaleAlgebra, MaximalFieldData};
use crate::arith::factor;
use crate::error::{internal, invalid, unsupported, Result};
use crate::matrix::{
    hnf_basis, hnf_det, lattice_contains, lattice_intersect, lattice_preimage, lattice_subset,
    IntMat,
};

/// A finite-index order in the algebra: canonical HNF basis (columns) over
/// the integral basis of the maximal order, and its index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderLattice {
    pub basis: IntMat,
    /// [maximal order : this order] = det(basis)
    pub index: BigInt,
}

impl OrderLattice {
    /// The maximal order itself.
    pub fn maximal(alg: &EtaleAlgebra) -> OrderLattice {
        OrderLattice {
            basis: IntMat::identity(alg.n),
            index: BigInt::one(),
        }
    }

    pub fn contains(&self, x: &[BigInt]) -> bool {
        lattice_contains(&self.basis, x)
    }

    /// Discriminant: index^2 times the discriminant of the maximal order.
    pub fn discriminant(&self, alg: &EtaleAlgebra) -> BigInt {
        &self.index * &self.index * &alg.disc
    }

    pub fn is_maximal(&self) -> bool {
        self.index.is_one()
    }
}

/// Smallest order containing the given elements: close the lattice spanned
/// by 1 and the generators under multiplication. Fails when the resulting
/// ring does not have full rank (finite index) in the algebra.
pub fn order_from_generators(alg: &EtaleAlgebra, gens: &[Vec<BigInt>]) -> Result<OrderLattice> {
    for g in gens {
        if g.len() != alg.n {
            return Err(invalid(format!(
                "generator has {} coordinates, algebra has degree {}",
                g.len(),
                alg.n
            )));
        }
    }
    let mut cols: Vec<Vec<BigInt>> = vec![alg.one()];
    cols.extend(gens.iter().cloned());
    let mut basis = hnf_basis(&IntMat::from_columns(alg.n, &cols));
    for round in 0.. {
        if round > 64 * alg.n {
            return Err(internal("multiplicative closure did not stabilize"));
        }
        let cur = basis.columns();
        let mut products = cur.clone();
        for (i, a) in cur.iter().enumerate() {
            for b in cur.iter().skip(i) {
                products.push(alg.mul(a, b));
            }
        }
        let next = hnf_basis(&IntMat::from_columns(alg.n, &products));
        if next == basis {
            break;
        }
        basis = next;
    }
    if basis.cols() < alg.n {
        return Err(invalid(
            "generators span a ring of infinite index (not full rank)",
        ));
    }
    let index = hnf_det(&basis);
    if !index.is_positive() {
        return Err(internal("order lattice with nonpositive determinant"));
    }
    Ok(OrderLattice { basis, index })
}

/// An order given directly by a full-rank lattice basis; verified to
/// contain 1 and be closed under multiplication.
pub fn order_from_basis(alg: &EtaleAlgebra, columns: &[Vec<BigInt>]) -> Result<OrderLattice> {
    if columns.len() != alg.n || columns.iter().any(|c| c.len() != alg.n) {
        return Err(invalid("order basis must be square of the algebra degree"));
    }
    let basis = hnf_basis(&IntMat::from_columns(alg.n, columns));
    if basis.cols() < alg.n {
        return Err(invalid("order basis is not full rank"));
    }
    if !lattice_contains(&basis, &alg.one()) {
        return Err(invalid("order must contain 1"));
    }
    let cols = basis.columns();
    for (i, a) in cols.iter().enumerate() {
        for b in cols.iter().skip(i) {
            if !lattice_contains(&basis, &alg.mul(a, b)) {
                return Err(invalid("lattice is not closed under multiplication"));
            }
        }
    }
    let index = hnf_det(&basis);
    Ok(OrderLattice { basis, index })
}

/// The conductor: the largest ideal of the maximal order contained in the
/// order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConductorIdeal {
    pub basis: IntMat,
    /// [maximal order : conductor]
    pub norm: BigInt,
}

/// Conductor of an order: {x : x * (maximal order) is inside the order},
/// computed as the intersection of the preimages of the order lattice
/// under multiplication by each integral basis element.
pub fn conductor(alg: &EtaleAlgebra, order: &OrderLattice) -> ConductorIdeal {
    let mut c = IntMat::identity(alg.n);
    for j in 0..alg.n {
        let mut e = vec![BigInt::zero(); alg.n];
        e[j] = BigInt::one();
        let pre = lattice_preimage(&alg.mult_matrix(&e), &order.basis);
        c = lattice_intersect(&c, &pre);
    }
    let norm = hnf_det(&c);
    debug_assert!(lattice_subset(&c, &order.basis));
    ConductorIdeal { basis: c, norm }
}

/// One singular maximal ideal of the order (one that contains the
/// conductor), with the data the class number formula needs locally.
#[derive(Clone, Debug)]
pub struct SingularPrimeData {
    /// the rational prime below
    pub p: u64,
    /// canonical HNF basis of the maximal ideal of the order
    pub ideal: IntMat,
    /// residue field size [order : ideal]
    pub norm: BigInt,
    /// size of (maximal order localized) / (order localized) at this ideal
    pub local_quotient: BigInt,
    /// norms of the maximal ideals of the maximal order lying over this one
    pub norms_above: Vec<BigInt>,
}

/// Maximal ideals of a degree <= 2 component over p, as (local HNF lattice,
/// norm) pairs.
fn component_primes(comp: &MaximalFieldData, p: u64) -> Result<Vec<(IntMat, BigInt)>> {
    let pb = BigInt::from(p);
    match comp.degree {
        1 => Ok(vec![(IntMat::from_columns(1, &[vec![pb.clone()]]), pb)]),
        2 => {
            let t = comp.mult_entry(1, 1, 1).clone();
            let m = comp.mult_entry(1, 1, 0).clone();
            let roots = quadratic_roots_mod_p(&t, &m, p)?;
            if roots.is_empty() {
                // inert: (p), norm p^2
                let lat = IntMat::from_fn(
                    2,
                    2,
                    |i, j| {
                        if i == j {
                            pb.clone()
                        } else {
                            BigInt::zero()
                        }
                    },
                );
                return Ok(vec![(lat, &pb * &pb)]);
            }
            let mut out = Vec::new();
            for r in roots {
                // ideal (p, w - r): spanned by p, pw, w - r, w(w - r)
                let rb = BigInt::from(r);
                let cols = vec![
                    vec![pb.clone(), BigInt::zero()],
                    vec![BigInt::zero(), pb.clone()],
                    vec![-rb.clone(), BigInt::one()],
                    vec![m.clone(), &t - &rb],
                ];
                let lat = hnf_basis(&IntMat::from_columns(2, &cols));
                if hnf_det(&lat) != pb {
                    return Err(internal("quadratic prime ideal has wrong norm"));
                }
                out.push((lat, pb.clone()));
            }
            Ok(out)
        }
        _ => Err(unsupported(
            "prime ideal lattices are only computed for components of degree <= 2",
        )),
    }
}

/// Roots of x^2 - t x - m modulo p (each distinct root once).
fn quadratic_roots_mod_p(t: &BigInt, m: &BigInt, p: u64) -> Result<Vec<u64>> {
    if p > 10_000_000 {
        return Err(unsupported(format!(
            "prime {p} too large for root enumeration"
        )));
    }
    let pb = BigInt::from(p);
    let tm = ((t % &pb) + &pb) % &pb;
    let mm = ((m % &pb) + &pb) % &pb;
    let t = tm.to_u128().expect("reduced residue fits u128");
    let m = mm.to_u128().expect("reduced residue fits u128");
    let p128 = p as u128;
    let mut roots = Vec::new();
    for x in 0..p as u128 {
        if (x * x % p128 + 2 * p128 - (t * x % p128) - m).is_multiple_of(p128) {
            roots.push(x as u64);
        }
    }
    Ok(roots)
}

/// Norms of the maximal ideals of the maximal order over p, across all
/// components; degree >= 3 components use supplied splitting data.
pub fn prime_norms_over(alg: &EtaleAlgebra, p: u64) -> Result<Vec<BigInt>> {
    let pb = BigInt::from(p);
    let mut out = Vec::new();
    for comp in &alg.components {
        if comp.degree == 1 {
            out.push(pb.clone());
        } else if comp.degree == 2 {
            // split type by the Kronecker symbol of the field discriminant
            match crate::arith::kronecker_prime(&comp.disc, p) {
                1 => {
                    out.push(pb.clone());
                    out.push(pb.clone());
                }
                0 => out.push(pb.clone()),
                _ => out.push(&pb * &pb),
            }
        } else if let Some(norms) = comp.prime_norms.get(&p) {
            let prod_check: BigInt = norms.iter().product();
            // residue degrees sum to at most the component degree
            if prod_check > BigInt::from(p).pow(comp.degree as u32) {
                return Err(invalid(format!(
                    "supplied prime norms over {p} exceed the component degree"
                )));
            }
            out.extend(norms.iter().cloned());
        } else {
            return Err(unsupported(format!(
                "splitting of {p} in a degree >= 3 component requires supplied data"
            )));
        }
    }
    Ok(out)
}

/// Norms of the maximal ideals of the order over p. Away from the index
/// this is the splitting in the maximal order; at primes dividing the index
/// the primes above are grouped by contraction, one merged ideal each.
pub fn order_prime_norms_over(
    alg: &EtaleAlgebra,
    order: &OrderLattice,
    cond: &ConductorIdeal,
    p: u64,
) -> Result<Vec<BigInt>> {
    if !(&order.index % BigInt::from(p)).is_zero() {
        return prime_norms_over(alg, p);
    }
    let mut out = Vec::new();
    let mut lattices: Vec<(IntMat, BigInt)> = Vec::new();
    for (ci, comp) in alg.components.iter().enumerate() {
        if comp.degree >= 3 {
            let block_in_conductor = alg.component_range(ci).all(|j| {
                let mut e = vec![BigInt::zero(); alg.n];
                e[j] = BigInt::one();
                lattice_contains(&cond.basis, &e)
            });
            if !block_in_conductor {
                return Err(unsupported(
                    "index primes meeting a degree >= 3 component are not supported",
                ));
            }
            // the order splits off this component, so its primes survive
            if let Some(norms) = comp.prime_norms.get(&p) {
                out.extend(norms.iter().cloned());
            } else {
                return Err(unsupported(format!(
                    "splitting of {p} in a degree >= 3 component requires supplied data"
                )));
            }
            continue;
        }
        for (local, norm) in component_primes(comp, p)? {
            lattices.push((globalize(alg, ci, &local), norm));
        }
    }
    let mut groups: Vec<(IntMat, Vec<BigInt>)> = Vec::new();
    for (lat, norm) in lattices {
        let contraction = lattice_intersect(&lat, &order.basis);
        match groups.iter_mut().find(|(c, _)| *c == contraction) {
            Some((_, norms)) => norms.push(norm),
            None => groups.push((contraction, vec![norm])),
        }
    }
    for (contraction, norms) in groups {
        let norm = hnf_det(&contraction) / &order.index;
        let singular = lattice_subset(&cond.basis, &contraction);
        if !singular && (norms.len() != 1 || norms[0] != norm) {
            return Err(internal(
                "nonsingular contraction does not match its unique prime above",
            ));
        }
        out.push(norm);
    }
    Ok(out)
}

/// Global lattice of a maximal ideal concentrated in component `ci`
/// (identity in every other block).
fn globalize(alg: &EtaleAlgebra, ci: usize, local: &IntMat) -> IntMat {
    let mut g = IntMat::identity(alg.n);
    let o = alg.component_offset(ci);
    for i in 0..local.rows() {
        for j in 0..local.cols() {
            g[(o + i, o + j)] = local[(i, j)].clone();
        }
    }
    hnf_basis(&g)
}

/// Stable saturation {x in the maximal order : x * ideal^k inside the order
/// for some k}, computed by iterating the ideal quotient until it stops
/// growing. Its index over the order is the local quotient size.
fn saturation_at(alg: &EtaleAlgebra, order: &OrderLattice, ideal: &IntMat) -> IntMat {
    let gens: Vec<IntMat> = (0..ideal.cols())
        .map(|j| alg.mult_matrix(&ideal.column(j)))
        .collect();
    let mut t = order.basis.clone();
    loop {
        let mut next = IntMat::identity(alg.n);
        for g in &gens {
            next = lattice_intersect(&next, &lattice_preimage(g, &t));
        }
        if next == t {
            return t;
        }
        t = next;
    }
}

/// The singular maximal ideals of the order (those containing the
/// conductor), grouped from the primes of the maximal order by contraction.
pub fn singular_primes(
    alg: &EtaleAlgebra,
    order: &OrderLattice,
    cond: &ConductorIdeal,
) -> Result<Vec<SingularPrimeData>> {
    let mut out = Vec::new();
    for (p, _) in factor(&order.index)? {
        // Maximal ideals of the maximal order over p, with global lattices.
        let mut above: Vec<(IntMat, BigInt)> = Vec::new();
        for (ci, comp) in alg.components.iter().enumerate() {
            if comp.degree >= 3 {
                // only allowed when the whole block sits inside the
                // conductor, i.e. the order splits off this component
                let block_in_conductor = alg.component_range(ci).all(|j| {
                    let mut e = vec![BigInt::zero(); alg.n];
                    e[j] = BigInt::one();
                    lattice_contains(&cond.basis, &e)
                });
                if !block_in_conductor {
                    return Err(unsupported(
                        "singular primes meeting a degree >= 3 component are not supported",
                    ));
                }
                continue;
            }
            for (local, norm) in component_primes(comp, p)? {
                above.push((globalize(alg, ci, &local), norm));
            }
        }
        // Group by contraction to the order.
        let mut groups: Vec<(IntMat, Vec<BigInt>)> = Vec::new();
        for (lat, norm) in above {
            let contraction = lattice_intersect(&lat, &order.basis);
            match groups.iter_mut().find(|(c, _)| *c == contraction) {
                Some((_, norms)) => norms.push(norm),
                None => groups.push((contraction, vec![norm])),
            }
        }
        for (ideal, norms_above) in groups {
            if !lattice_subset(&cond.basis, &ideal) {
                continue; // nonsingular: the order is locally maximal here
            }
            let norm = hnf_det(&ideal) / &order.index;
            let sat = saturation_at(alg, order, &ideal);
            let local_quotient = &order.index / hnf_det(&sat);
            if !(&order.index % &local_quotient).is_zero() {
                return Err(internal("local quotient size does not divide the index"));
            }
            out.push(SingularPrimeData {
                p,
                ideal,
                norm,
                local_quotient,
                norms_above,
            });
        }
    }
    // the local quotient sizes multiply to the index
    let total: BigInt = out.iter().map(|s| s.local_quotient.clone()).product();
    if total != order.index {
        return Err(internal(format!(
            "local quotients multiply to {total}, index is {}",
            order.index
        )));
    }
    Ok(out)
}
