//! Finite quotient rings of lattices by full-rank ideals, unit counts by
//! formula and by enumeration, and the local and global unit indices that
//! drive the class number formula.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::algebra::EtaleAlgebra;
use crate::error::{internal, invalid, Result};
use crate::matrix::{
    apply_rational, hnf_basis, hnf_det, inverse_rational, lattice_contains, lattice_subset,
    smith_normal_form, solve_columns, IntMat,
};
use crate::order::{ConductorIdeal, OrderLattice, SingularPrimeData};

/// Quotient of a full-rank lattice by a full-rank ideal sublattice, in
/// Smith-normal-form coordinates: residues are tuples y with 0 <= y_i < d_i.
#[derive(Clone, Debug)]
pub struct FiniteQuotientRing {
    /// basis of the ambient lattice (columns), in maximal-order coordinates
    pub ambient: IntMat,
    /// basis of the ideal being quotiented out
    pub ideal: IntMat,
    /// cyclic orders d_1 | d_2 | ... of the additive group
    pub divisors: Vec<BigInt>,
    pub size: BigInt,
    ambient_inv: Vec<Vec<BigRational>>,
    u: IntMat,
    u_inv: IntMat,
}

/// Present `lattice`/`ideal` additively via the SNF of the ideal written in
/// the coordinates of the lattice.
pub fn quotient_ring(lattice: &IntMat, ideal: &IntMat) -> Result<FiniteQuotientRing> {
    if !lattice_subset(ideal, lattice) {
        return Err(invalid("ideal is not contained in the lattice"));
    }
    let n = lattice.rows();
    if lattice.cols() != n || ideal.cols() != n {
        return Err(invalid("quotient needs full-rank square bases"));
    }
    let ambient_inv = inverse_rational(lattice)?;
    let mut rel = IntMat::zero(n, n);
    for j in 0..n {
        let col = apply_rational(&ambient_inv, &ideal.column(j))?;
        for i in 0..n {
            rel[(i, j)] = col[i].clone();
        }
    }
    let snf = smith_normal_form(&rel);
    if snf.divisors.iter().any(|d| d.is_zero()) {
        return Err(internal("quotient by a full-rank ideal must be finite"));
    }
    let size: BigInt = snf.divisors.iter().product();
    Ok(FiniteQuotientRing {
        ambient: lattice.clone(),
        ideal: ideal.clone(),
        divisors: snf.divisors,
        size,
        ambient_inv,
        u: snf.u,
        u_inv: snf.u_inv,
    })
}

impl FiniteQuotientRing {
    /// Canonical residue of an element of the ambient lattice.
    pub fn reduce(&self, x: &[BigInt]) -> Result<Vec<BigInt>> {
        let a = apply_rational(&self.ambient_inv, x)
            .map_err(|_| invalid("element is not in the ambient lattice"))?;
        let y = self.u.mul_vec(&a);
        Ok(y.iter()
            .zip(&self.divisors)
            .map(|(v, d)| v.mod_floor(d))
            .collect())
    }

    /// A representative in the ambient lattice (global coordinates).
    pub fn lift(&self, y: &[BigInt]) -> Vec<BigInt> {
        self.ambient.mul_vec(&self.u_inv.mul_vec(y))
    }

    pub fn one(&self, alg: &EtaleAlgebra) -> Result<Vec<BigInt>> {
        self.reduce(&alg.one())
    }

    pub fn mul(&self, alg: &EtaleAlgebra, a: &[BigInt], b: &[BigInt]) -> Result<Vec<BigInt>> {
        self.reduce(&alg.mul(&self.lift(a), &self.lift(b)))
    }

    /// A residue is a unit exactly when its representative generates the
    /// whole quotient as an ideal: x*ambient + ideal = ambient.
    pub fn is_unit(&self, alg: &EtaleAlgebra, y: &[BigInt]) -> bool {
        let x = self.lift(y);
        let xa = alg.mult_matrix(&x).mul(&self.ambient);
        let span = hnf_basis(&xa.hstack(&self.ideal));
        span.cols() == self.ambient.rows() && hnf_det(&span) == hnf_det(&hnf_basis(&self.ambient))
    }

    /// Multiplicative inverse, when it exists: solve x*a + c = 1 over the
    /// ambient lattice and the ideal.
    pub fn inverse(&self, alg: &EtaleAlgebra, y: &[BigInt]) -> Option<Vec<BigInt>> {
        let x = self.lift(y);
        let xa = alg.mult_matrix(&x).mul(&self.ambient);
        let sol = solve_columns(&xa.hstack(&self.ideal), &alg.one())?;
        let n = self.ambient.cols();
        let coeffs: Vec<BigInt> = sol[..n].to_vec();
        let inv = self.ambient.mul_vec(&coeffs);
        self.reduce(&inv).ok()
    }

    /// All residues, in odometer order over the SNF coordinates.
    pub fn elements(&self, bound: &BigInt) -> Result<Vec<Vec<BigInt>>> {
        if &self.size > bound {
            return Err(invalid(format!(
                "quotient of size {} exceeds enumeration bound {bound}",
                self.size
            )));
        }
        let mut out = vec![vec![]];
        for d in &self.divisors {
            let mut next = Vec::new();
            let mut k = BigInt::zero();
            while &k < d {
                for prefix in &out {
                    let mut e = prefix.clone();
                    e.push(k.clone());
                    next.push(e);
                }
                k += 1;
            }
            out = next;
        }
        Ok(out)
    }
}

/// Default enumeration bound for brute-force unit counting.
pub const BRUTE_BOUND: u64 = 1_000_000;

/// Count the units of the quotient by direct search.
pub fn unit_count_brute(alg: &EtaleAlgebra, ring: &FiniteQuotientRing) -> Result<BigInt> {
    let mut count = BigInt::zero();
    for y in ring.elements(&BigInt::from(BRUTE_BOUND))? {
        if ring.is_unit(alg, &y) {
            count += 1;
        }
    }
    Ok(count)
}

/// Local unit index [(maximal order)_p^x : (order)_p^x] by the closed-form
/// product over the primes above; the exact rational must be an integer.
pub fn local_unit_index(s: &SingularPrimeData) -> Result<BigInt> {
    let mut q = BigRational::from(s.local_quotient.clone());
    for np in &s.norms_above {
        q *= BigRational::one() - BigRational::new(BigInt::one(), np.clone());
    }
    q /= BigRational::one() - BigRational::new(BigInt::one(), s.norm.clone());
    if !q.is_integer() || !q.numer().is_positive() {
        return Err(internal(format!(
            "local unit index {q} at {} is not a positive integer",
            s.p
        )));
    }
    Ok(q.to_integer())
}

/// Global unit index [units of the maximal order : units of the order],
/// computed as the size of the image of the maximal order's unit group in
/// the coset space mod the conductor (or any ideal inside the order).
pub fn global_unit_index(
    alg: &EtaleAlgebra,
    order: &OrderLattice,
    cond: &ConductorIdeal,
) -> Result<BigInt> {
    let q = quotient_ring(&IntMat::identity(alg.n), &cond.basis)?;
    // generators of the unit group of the maximal order
    let mut gens: Vec<Vec<BigInt>> = Vec::new();
    for (i, comp) in alg.components.iter().enumerate() {
        gens.push(alg.embed_unit(i, &comp.torsion_generator));
        for u in &comp.unit_generators {
            gens.push(alg.embed_unit(i, u));
        }
    }
    let mut gen_pairs = Vec::new();
    for g in &gens {
        let res = q.reduce(g)?;
        let inv = q
            .inverse(alg, &res)
            .ok_or_else(|| internal("unit generator is not invertible mod the conductor"))?;
        gen_pairs.push((res, inv));
    }

    // coset of u represented by (u mod c, u^-1 mod c); cosets agree when
    // u v^-1 and v u^-1 both lift into the order
    let same_coset =
        |a: &(Vec<BigInt>, Vec<BigInt>), b: &(Vec<BigInt>, Vec<BigInt>)| -> Result<bool> {
            let ab = q.mul(alg, &a.0, &b.1)?;
            if !lattice_contains(&order.basis, &q.lift(&ab)) {
                return Ok(false);
            }
            let ba = q.mul(alg, &b.0, &a.1)?;
            Ok(lattice_contains(&order.basis, &q.lift(&ba)))
        };

    let one = q.one(alg)?;
    let mut cosets: Vec<(Vec<BigInt>, Vec<BigInt>)> = vec![(one.clone(), one)];
    let mut frontier = vec![0usize];
    while let Some(idx) = frontier.pop() {
        let current = cosets[idx].clone();
        for (g, g_inv) in &gen_pairs {
            let cand = (q.mul(alg, &current.0, g)?, q.mul(alg, &current.1, g_inv)?);
            let mut found = false;
            for existing in &cosets {
                if same_coset(existing, &cand)? {
                    found = true;
                    break;
                }
            }
            if !found {
                cosets.push(cand);
                frontier.push(cosets.len() - 1);
                if BigInt::from(cosets.len()) > q.size {
                    return Err(internal("unit coset closure exceeded the quotient size"));
                }
            }
        }
    }
    Ok(BigInt::from(cosets.len()))
}

/// The group of roots of unity of the order: the torsion elements of the
/// maximal order's unit group whose coordinates lie in the order lattice.
#[derive(Clone, Debug)]
pub struct RootsOfUnity {
    pub w: u64,
    pub elements: Vec<Vec<BigInt>>,
}

pub fn roots_of_unity(alg: &EtaleAlgebra, order: &OrderLattice) -> Result<RootsOfUnity> {
    // powers of the torsion generator in each component
    let mut powers: Vec<Vec<Vec<BigInt>>> = Vec::new();
    for comp in &alg.components {
        let mut pw = vec![comp.one()];
        let mut acc = comp.one();
        for _ in 1..comp.w {
            acc = comp.mul(&acc, &comp.torsion_generator);
            pw.push(acc.clone());
        }
        powers.push(pw);
    }
    // odometer over the tuples of exponents
    let mut elements = Vec::new();
    let mut idx = vec![0usize; alg.m];
    loop {
        let mut x = vec![BigInt::zero(); alg.n];
        for (i, &k) in idx.iter().enumerate() {
            let range = alg.component_range(i);
            x[range].clone_from_slice(&powers[i][k]);
        }
        if order.contains(&x) {
            elements.push(x);
        }
        let mut carry = 0usize;
        loop {
            idx[carry] += 1;
            if idx[carry] < alg.components[carry].w as usize {
                break;
            }
            idx[carry] = 0;
            carry += 1;
            if carry == alg.m {
                break;
            }
        }
        if carry == alg.m {
            break;
        }
    }
    let w = elements.len() as u64;
    let w_max = alg.w();
    if w == 0 || !w_max.is_multiple_of(w) {
        return Err(internal(format!(
            "number of roots of unity {w} does not divide {w_max}"
        )));
    }
    Ok(RootsOfUnity { w, elements })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{build_algebra, FieldSpec};
    use crate::order::{conductor, order_from_generators, OrderLattice};

    fn spec(coeffs: &[i64]) -> FieldSpec {
        FieldSpec {
            poly: coeffs.iter().map(|&c| BigInt::from(c)).collect(),
            supplied: None,
        }
    }

    fn v(x: &[i64]) -> Vec<BigInt> {
        x.iter().map(|&c| BigInt::from(c)).collect()
    }

    #[test]
    fn fiber_product_quotients() {
        let alg = build_algebra(&[spec(&[0, 1]), spec(&[0, 1])]).unwrap();
        let ord = order_from_generators(&alg, &[v(&[5, 0])]).unwrap();
        let c = conductor(&alg, &ord);
        let big = quotient_ring(&IntMat::identity(2), &c.basis).unwrap();
        assert_eq!(big.divisors, vec![BigInt::from(5), BigInt::from(5)]);
        let small = quotient_ring(&ord.basis, &c.basis).unwrap();
        assert_eq!(small.size, BigInt::from(5));
        // unit counts: (p-1)^2 and p-1
        assert_eq!(unit_count_brute(&alg, &big).unwrap(), BigInt::from(16));
        assert_eq!(unit_count_brute(&alg, &small).unwrap(), BigInt::from(4));
    }

    #[test]
    fn trivial_quotient() {
        let alg = build_algebra(&[spec(&[0, 1])]).unwrap();
        let ring = quotient_ring(&IntMat::identity(1), &IntMat::identity(1)).unwrap();
        assert_eq!(ring.size, BigInt::one());
        assert_eq!(unit_count_brute(&alg, &ring).unwrap(), BigInt::one());
    }

    #[test]
    fn eisenstein_order_quotients() {
        // Z[sqrt(-3)]: conductor 2*O~, quotients of order 4 and 2
        let alg = build_algebra(&[spec(&[3, 0, 1])]).unwrap();
        let ord = order_from_generators(&alg, &[v(&[-1, 2])]).unwrap();
        let c = conductor(&alg, &ord);
        assert_eq!(c.norm, BigInt::from(4));
        let big = quotient_ring(&IntMat::identity(2), &c.basis).unwrap();
        assert_eq!(big.size, BigInt::from(4));
        let small = quotient_ring(&ord.basis, &c.basis).unwrap();
        assert_eq!(small.size, BigInt::from(2));
        // (O~/2)^x has 3 elements (F_4 units), image of O/2 has 1
        assert_eq!(unit_count_brute(&alg, &big).unwrap(), BigInt::from(3));
        assert_eq!(unit_count_brute(&alg, &small).unwrap(), BigInt::one());
    }

    #[test]
    fn gaussian_brute_units() {
        // Z[i]/2Z[i] has 2 units
        let alg = build_algebra(&[spec(&[1, 0, 1])]).unwrap();
        let two = IntMat::from_fn(2, 2, |i, j| {
            if i == j {
                BigInt::from(2)
            } else {
                BigInt::zero()
            }
        });
        let ring = quotient_ring(&IntMat::identity(2), &two).unwrap();
        assert_eq!(unit_count_brute(&alg, &ring).unwrap(), BigInt::from(2));
    }

    #[test]
    fn quotient_mult_sane() {
        let alg = build_algebra(&[spec(&[3, 0, 1])]).unwrap();
        let two = IntMat::from_fn(2, 2, |i, j| {
            if i == j {
                BigInt::from(2)
            } else {
                BigInt::zero()
            }
        });
        let ring = quotient_ring(&IntMat::identity(2), &two).unwrap();
        let one = ring.one(&alg).unwrap();
        let els = ring.elements(&BigInt::from(100)).unwrap();
        for a in &els {
            assert_eq!(ring.mul(&alg, a, &one).unwrap(), *a);
            for b in &els {
                assert_eq!(ring.mul(&alg, a, b).unwrap(), ring.mul(&alg, b, a).unwrap());
                for c in &els {
                    let ab_c = ring.mul(&alg, &ring.mul(&alg, a, b).unwrap(), c).unwrap();
                    let a_bc = ring.mul(&alg, a, &ring.mul(&alg, b, c).unwrap()).unwrap();
                    assert_eq!(ab_c, a_bc);
                }
            }
        }
    }

    #[test]
    fn local_index_formula() {
        use crate::order::singular_primes;
        // fiber product p=5: local index p-1 = 4
        let alg = build_algebra(&[spec(&[0, 1]), spec(&[0, 1])]).unwrap();
        let ord = order_from_generators(&alg, &[v(&[5, 0])]).unwrap();
        let c = conductor(&alg, &ord);
        let sing = singular_primes(&alg, &ord, &c).unwrap();
        assert_eq!(local_unit_index(&sing[0]).unwrap(), BigInt::from(4));
        // Z[sqrt(-3)] at 2: 2*(1-1/4)/(1-1/2) = 3
        let alg = build_algebra(&[spec(&[3, 0, 1])]).unwrap();
        let ord = order_from_generators(&alg, &[v(&[-1, 2])]).unwrap();
        let c = conductor(&alg, &ord);
        let sing = singular_primes(&alg, &ord, &c).unwrap();
        assert_eq!(local_unit_index(&sing[0]).unwrap(), BigInt::from(3));
    }

    #[test]
    fn global_index_examples() {
        // fiber product: 2 for odd p, 1 for p=2
        let alg = build_algebra(&[spec(&[0, 1]), spec(&[0, 1])]).unwrap();
        for (p, expected) in [(5i64, 2i64), (2, 1), (7, 2)] {
            let ord = order_from_generators(&alg, &[v(&[p, 0])]).unwrap();
            let c = conductor(&alg, &ord);
            assert_eq!(
                global_unit_index(&alg, &ord, &c).unwrap(),
                BigInt::from(expected),
                "p = {p}"
            );
        }
        // Z[sqrt(-3)]: 3
        let alg = build_algebra(&[spec(&[3, 0, 1])]).unwrap();
        let ord = order_from_generators(&alg, &[v(&[-1, 2])]).unwrap();
        let c = conductor(&alg, &ord);
        assert_eq!(global_unit_index(&alg, &ord, &c).unwrap(), BigInt::from(3));
        // maximal order: 1
        let m = OrderLattice::maximal(&alg);
        let cm = conductor(&alg, &m);
        assert_eq!(global_unit_index(&alg, &m, &cm).unwrap(), BigInt::one());
    }

    #[test]
    fn global_index_with_larger_ideal() {
        // using index*O~ instead of the conductor gives the same answer
        let alg = build_algebra(&[spec(&[0, 1]), spec(&[0, 1])]).unwrap();
        let ord = order_from_generators(&alg, &[v(&[5, 0])]).unwrap();
        let scaled = IntMat::from_fn(2, 2, |i, j| {
            if i == j {
                BigInt::from(5)
            } else {
                BigInt::zero()
            }
        });
        let fake = ConductorIdeal {
            basis: scaled,
            norm: BigInt::from(25),
        };
        assert_eq!(
            global_unit_index(&alg, &ord, &fake).unwrap(),
            BigInt::from(2)
        );
    }

    #[test]
    fn torsion_of_orders() {
        // fiber product: w=2 odd p, w=4 at p=2
        let alg = build_algebra(&[spec(&[0, 1]), spec(&[0, 1])]).unwrap();
        let ord = order_from_generators(&alg, &[v(&[5, 0])]).unwrap();
        assert_eq!(roots_of_unity(&alg, &ord).unwrap().w, 2);
        let ord2 = order_from_generators(&alg, &[v(&[2, 0])]).unwrap();
        assert_eq!(roots_of_unity(&alg, &ord2).unwrap().w, 4);
        // Z[2i]: only ±1 of {±1, ±i}
        let alg = build_algebra(&[spec(&[1, 0, 1])]).unwrap();
        let ord = order_from_generators(&alg, &[v(&[0, 2])]).unwrap();
        assert_eq!(roots_of_unity(&alg, &ord).unwrap().w, 2);
        // maximal: w = 4
        let m = OrderLattice::maximal(&alg);
        assert_eq!(roots_of_unity(&alg, &m).unwrap().w, 4);
        // roots of unity form a group (closure under product)
        let r = roots_of_unity(&alg, &m).unwrap();
        for a in &r.elements {
            for b in &r.elements {
                let p = alg.mul(a, b);
                assert!(r.elements.contains(&p));
            }
        }
    }
}
