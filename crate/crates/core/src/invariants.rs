//! Assembly of the invariants of an order — index, conductor, discriminant,
//! roots of unity, unit index, class number, regulator — and verification
//! of the analytic class number formula
//!
//!   lim_{s->1} (s-1)^m zeta_O(s) = 2^r1 (2 pi)^r2 h(O) R(O) / (w(O) sqrt|Disc O|)
//!
//! by computing both sides through independent routes and comparing the
//! structured values exactly wherever exactness is possible.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

use crate::algebra::EtaleAlgebra;
use crate::arith::{primes_up_to, square_part};
use crate::error::{internal, invalid, Result};
use crate::order::{
    conductor, order_prime_norms_over, singular_primes, ConductorIdeal, OrderLattice,
    SingularPrimeData,
};
use crate::quotient::{global_unit_index, local_unit_index, roots_of_unity};

/// The classical invariants of an order.
#[derive(Clone, Debug)]
pub struct OrderInvariants {
    /// [maximal order : order]
    pub index: BigInt,
    /// conductor norm [maximal order : conductor]
    pub conductor_norm: BigInt,
    /// Disc of the order = index^2 * Disc of the maximal order
    pub disc: BigInt,
    /// number of roots of unity
    pub w: u64,
    /// [units of maximal order : units of order]
    pub unit_index: BigInt,
    /// class number (order of the Picard group)
    pub h: BigInt,
    /// covolume of the logarithmic unit lattice; exactly 1 when r = 0
    pub regulator: f64,
    /// exact rational R(order)/R(maximal order) = unit_index * w / w~
    pub regulator_ratio: BigRational,
}

/// Everything computed about one order, ready for verification.
#[derive(Clone, Debug)]
pub struct OrderAnalysis {
    pub algebra: EtaleAlgebra,
    pub order: OrderLattice,
    pub conductor: ConductorIdeal,
    pub singular: Vec<SingularPrimeData>,
    pub invariants: OrderInvariants,
}

/// Invariants of the maximal order itself (all correction factors trivial).
pub fn maximal_invariants(alg: &EtaleAlgebra) -> OrderInvariants {
    OrderInvariants {
        index: BigInt::one(),
        conductor_norm: BigInt::one(),
        disc: alg.disc.clone(),
        w: alg.w(),
        unit_index: BigInt::one(),
        h: alg.h(),
        regulator: if alg.r == 0 { 1.0 } else { alg.regulator() },
        regulator_ratio: BigRational::one(),
    }
}

/// Run the full pipeline on an order: conductor, singular primes, unit
/// indices, class number, regulator.
pub fn analyze(alg: &EtaleAlgebra, order: &OrderLattice) -> Result<OrderAnalysis> {
    // the trace form must reproduce the discriminant of the maximal order
    if alg.trace_matrix().det() != alg.disc {
        return Err(internal(
            "trace form determinant disagrees with the discriminant",
        ));
    }
    let cond = conductor(alg, order);
    if !crate::matrix::lattice_subset(&cond.basis, &order.basis) {
        return Err(internal("conductor not contained in the order"));
    }
    let singular = singular_primes(alg, order, &cond)?;
    let torsion = roots_of_unity(alg, order)?;
    let unit_index = global_unit_index(alg, order, &cond)?;
    let w_max = alg.w();

    // h(O) = h(O~) * prod of local unit indices / [O~^x : O^x]
    let mut h = BigRational::from(alg.h());
    for s in &singular {
        h *= BigRational::from(local_unit_index(s)?);
    }
    h /= BigRational::from(unit_index.clone());
    if !h.is_integer() || !h.numer().is_positive() {
        return Err(internal(format!(
            "class number {h} is not a positive integer"
        )));
    }
    let h = h.to_integer();

    // R(O) = R(O~) * unit_index * w(O)/w(O~); exactly 1 in rank 0
    let regulator_ratio =
        BigRational::new(&unit_index * BigInt::from(torsion.w), BigInt::from(w_max));
    let regulator = if alg.r == 0 {
        if !regulator_ratio.is_one() {
            return Err(internal("regulator ratio must be 1 in unit rank 0"));
        }
        1.0
    } else {
        alg.regulator() * rational_f64(&regulator_ratio)
    };

    let invariants = OrderInvariants {
        index: order.index.clone(),
        conductor_norm: cond.norm.clone(),
        disc: order.discriminant(alg),
        w: torsion.w,
        unit_index,
        h,
        regulator,
        regulator_ratio,
    };
    Ok(OrderAnalysis {
        algebra: alg.clone(),
        order: order.clone(),
        conductor: cond,
        singular,
        invariants,
    })
}

pub(crate) fn rational_f64(q: &BigRational) -> f64 {
    q.numer().to_f64().expect("finite numerator") / q.denom().to_f64().expect("finite denominator")
}

/// lim_{s->1} zeta_{O~}(s) / zeta_O(s): for each singular maximal ideal,
/// the merged Euler factor replaces the factors of the primes above it.
pub fn zeta_correction(analysis: &OrderAnalysis) -> BigRational {
    let mut c = BigRational::one();
    for s in &analysis.singular {
        c *= BigRational::one() - BigRational::new(BigInt::one(), s.norm.clone());
        for np in &s.norms_above {
            c /= BigRational::one() - BigRational::new(BigInt::one(), np.clone());
        }
    }
    c
}

/// One side of the class number formula in structured form: the value is
/// rational * pi^pi_exponent * regulator_factor / sqrt(abs_disc), with the
/// square part of abs_disc canonically extracted into the rational.
#[derive(Clone, Debug, PartialEq)]
pub struct LeadingTerm {
    pub rational: BigRational,
    pub pi_exponent: u32,
    pub regulator_factor: f64,
    pub abs_disc: BigInt,
}

impl LeadingTerm {
    fn canonical(
        rational: BigRational,
        pi_exponent: u32,
        regulator_factor: f64,
        abs_disc: BigInt,
    ) -> Result<LeadingTerm> {
        if !abs_disc.is_positive() {
            return Err(internal("leading term needs a positive |Disc|"));
        }
        let s = square_part(&abs_disc)?;
        Ok(LeadingTerm {
            rational: rational / BigRational::from(s.clone()),
            pi_exponent,
            regulator_factor,
            abs_disc: abs_disc / (&s * &s),
        })
    }

    pub fn float_value(&self) -> f64 {
        rational_f64(&self.rational)
            * std::f64::consts::PI.powi(self.pi_exponent as i32)
            * self.regulator_factor
            / self.abs_disc.to_f64().expect("finite |Disc|").sqrt()
    }

    /// Structured equality: exact on the rational, the pi exponent, and the
    /// radicand; regulator reals within relative tolerance.
    pub fn matches(&self, other: &LeadingTerm, tol: f64) -> bool {
        self.rational == other.rational
            && self.pi_exponent == other.pi_exponent
            && self.abs_disc == other.abs_disc
            && relative_diff(self.regulator_factor, other.regulator_factor) <= tol
    }
}

pub(crate) fn relative_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
    (a - b).abs() / scale
}

/// Right-hand side of the formula, from the order's own invariants:
/// 2^r1 (2 pi)^r2 h(O) R(O) / (w(O) sqrt|Disc O|).
pub fn leading_term_rhs(analysis: &OrderAnalysis) -> Result<LeadingTerm> {
    let alg = &analysis.algebra;
    let inv = &analysis.invariants;
    let two_pow = BigInt::one() << (alg.r1 + alg.r2);
    let rational =
        BigRational::from(two_pow) * BigRational::from(inv.h.clone()) * &inv.regulator_ratio
            / BigRational::from(BigInt::from(inv.w));
    LeadingTerm::canonical(
        rational,
        alg.r2 as u32,
        if alg.r == 0 { 1.0 } else { alg.regulator() },
        inv.disc.abs(),
    )
}

/// Left-hand side: the classical formula for the maximal order divided by
/// the exact zeta correction factor.
pub fn leading_term_lhs(analysis: &OrderAnalysis) -> Result<LeadingTerm> {
    let alg = &analysis.algebra;
    let two_pow = BigInt::one() << (alg.r1 + alg.r2);
    let maximal_rational = BigRational::from(two_pow) * BigRational::from(alg.h())
        / BigRational::from(BigInt::from(alg.w()));
    let rational = maximal_rational / zeta_correction(analysis);
    LeadingTerm::canonical(
        rational,
        alg.r2 as u32,
        if alg.r == 0 { 1.0 } else { alg.regulator() },
        alg.disc.abs(),
    )
}

/// Relative tolerance for regulator-bearing real comparisons.
pub const REG_TOL: f64 = 1e-9;

/// Machine-checkable outcome of verifying the class number formula for one
/// order.
#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub lhs: LeadingTerm,
    pub rhs: LeadingTerm,
    pub rational_equal: bool,
    pub pi_equal: bool,
    pub disc_equal: bool,
    pub regulator_rel_diff: f64,
    pub float_rel_diff: f64,
    pub pass: bool,
    pub invariants: OrderInvariants,
    pub maximal: OrderInvariants,
}

/// Verify the analytic class number formula: both sides must agree exactly
/// on their rational parts, pi exponents, and radicands, and to 1e-9
/// relative on the regulator reals.
pub fn verify_acnf(analysis: &OrderAnalysis) -> Result<VerificationReport> {
    let lhs = leading_term_lhs(analysis)?;
    let rhs = leading_term_rhs(analysis)?;
    let rational_equal = lhs.rational == rhs.rational;
    let pi_equal = lhs.pi_exponent == rhs.pi_exponent;
    let disc_equal = lhs.abs_disc == rhs.abs_disc;
    let regulator_rel_diff = relative_diff(lhs.regulator_factor, rhs.regulator_factor);
    let float_rel_diff = relative_diff(lhs.float_value(), rhs.float_value());
    let pass = rational_equal && pi_equal && disc_equal && regulator_rel_diff <= REG_TOL;
    Ok(VerificationReport {
        lhs,
        rhs,
        rational_equal,
        pi_equal,
        disc_equal,
        regulator_rel_diff,
        float_rel_diff,
        pass,
        invariants: analysis.invariants.clone(),
        maximal: maximal_invariants(&analysis.algebra),
    })
}

/// Partial Euler product of zeta_O at real s > 1 over the maximal ideals
/// with residue characteristic up to the bound.
pub fn zeta_partial(analysis: &OrderAnalysis, s: f64, prime_bound: u64) -> Result<f64> {
    if s <= 1.0 {
        return Err(invalid("zeta_partial needs s > 1"));
    }
    if prime_bound < 2 {
        return Err(invalid("prime bound must be at least 2"));
    }
    let mut product = 1.0f64;
    for p in primes_up_to(prime_bound) {
        for norm in
            order_prime_norms_over(&analysis.algebra, &analysis.order, &analysis.conductor, p)?
        {
            let n = norm.to_f64().expect("finite norm");
            product /= 1.0 - n.powf(-s);
        }
    }
    Ok(product)
}

/// The finite correction zeta_{O~}/zeta_O evaluated at real s over the
/// singular primes only (equal truncation sets cancel elsewhere).
pub fn zeta_correction_at(analysis: &OrderAnalysis, s: f64) -> f64 {
    let mut c = 1.0f64;
    for sp in &analysis.singular {
        let n = sp.norm.to_f64().expect("finite norm");
        c *= 1.0 - n.powf(-s);
        for np in &sp.norms_above {
            let n = np.to_f64().expect("finite norm");
            c /= 1.0 - n.powf(-s);
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{build_algebra, FieldSpec};
    use crate::order::order_from_generators;

    fn spec(coeffs: &[i64]) -> FieldSpec {
        FieldSpec {
            poly: coeffs.iter().map(|&c| BigInt::from(c)).collect(),
            supplied: None,
        }
    }

    fn v(x: &[i64]) -> Vec<BigInt> {
        x.iter().map(|&c| BigInt::from(c)).collect()
    }

    fn fiber(p: i64) -> OrderAnalysis {
        let alg = build_algebra(&[spec(&[0, 1]), spec(&[0, 1])]).unwrap();
        let ord = order_from_generators(&alg, &[v(&[p, 0])]).unwrap();
        analyze(&alg, &ord).unwrap()
    }

    #[test]
    fn fiber_product_invariants() {
        let a = fiber(11);
        assert_eq!(a.invariants.h, BigInt::from(5));
        assert_eq!(a.invariants.w, 2);
        assert_eq!(a.invariants.unit_index, BigInt::from(2));
        assert_eq!(a.invariants.disc, BigInt::from(121));
        assert_eq!(a.invariants.regulator, 1.0);
        let a2 = fiber(2);
        assert_eq!(a2.invariants.h, BigInt::one());
        assert_eq!(a2.invariants.w, 4);
        assert_eq!(a2.invariants.unit_index, BigInt::one());
    }

    #[test]
    fn fiber_product_both_sides_exact() {
        for p in [2i64, 3, 5, 7, 11, 13, 97] {
            let a = fiber(p);
            let r = verify_acnf(&a).unwrap();
            assert!(r.pass, "p = {p}");
            let expected = BigRational::new(BigInt::from(p - 1), BigInt::from(p));
            assert_eq!(r.lhs.rational, expected, "p = {p}");
            assert_eq!(r.rhs.rational, expected, "p = {p}");
            assert_eq!(r.lhs.abs_disc, BigInt::one());
        }
    }

    #[test]
    fn fiber_product_zeta_correction() {
        let a = fiber(5);
        let c = zeta_correction(&a);
        // (1 - 1/5)^{-1} = 5/4
        assert_eq!(c, BigRational::new(BigInt::from(5), BigInt::from(4)));
    }

    #[test]
    fn eisenstein_suborder() {
        // Z[sqrt(-3)]: h=1, w=2, correction 2/3, both sides pi/(2 sqrt 3)
        let alg = build_algebra(&[spec(&[3, 0, 1])]).unwrap();
        let ord = order_from_generators(&alg, &[v(&[-1, 2])]).unwrap();
        let a = analyze(&alg, &ord).unwrap();
        assert_eq!(a.invariants.h, BigInt::one());
        assert_eq!(a.invariants.w, 2);
        assert_eq!(a.invariants.unit_index, BigInt::from(3));
        assert_eq!(
            zeta_correction(&a),
            BigRational::new(BigInt::from(2), BigInt::from(3))
        );
        let r = verify_acnf(&a).unwrap();
        assert!(r.pass);
        assert_eq!(
            r.lhs.rational,
            BigRational::new(BigInt::one(), BigInt::from(2))
        );
        assert_eq!(r.lhs.abs_disc, BigInt::from(3));
        assert_eq!(r.lhs.pi_exponent, 1);
        // pi / (2 sqrt 3) numerically
        assert!((r.lhs.float_value() - 0.906899682117109).abs() < 1e-12);
    }

    #[test]
    fn golden_suborder_regulator() {
        // Z[sqrt(5)] in Z[(1+sqrt 5)/2]: unit index 3, R = ln(2+sqrt 5)
        let alg = build_algebra(&[spec(&[-5, 0, 1])]).unwrap();
        let ord = order_from_generators(&alg, &[v(&[-1, 2])]).unwrap();
        assert_eq!(ord.index, BigInt::from(2));
        let a = analyze(&alg, &ord).unwrap();
        assert_eq!(a.invariants.unit_index, BigInt::from(3));
        assert!((a.invariants.regulator - (2.0 + 5f64.sqrt()).ln()).abs() < 1e-12);
        let r = verify_acnf(&a).unwrap();
        assert!(r.pass);
        assert_eq!(r.lhs.rational, BigRational::from(BigInt::from(3)));
        assert_eq!(r.lhs.abs_disc, BigInt::from(5));
    }

    #[test]
    fn maximal_orders_pass() {
        for specs in [
            vec![spec(&[0, 1])],
            vec![spec(&[1, 0, 1])],
            vec![spec(&[-2, 0, 1])],
            vec![spec(&[0, 1]), spec(&[3, 0, 1]), spec(&[-13, 0, 1])],
        ] {
            let alg = build_algebra(&specs).unwrap();
            let ord = OrderLattice::maximal(&alg);
            let a = analyze(&alg, &ord).unwrap();
            assert_eq!(zeta_correction(&a), BigRational::one());
            let r = verify_acnf(&a).unwrap();
            assert!(r.pass);
            assert_eq!(r.lhs.rational, r.rhs.rational);
        }
    }

    #[test]
    fn zeta_partial_basel() {
        let alg = build_algebra(&[spec(&[0, 1])]).unwrap();
        let ord = OrderLattice::maximal(&alg);
        let a = analyze(&alg, &ord).unwrap();
        let z = zeta_partial(&a, 2.0, 100_000).unwrap();
        let basel = std::f64::consts::PI * std::f64::consts::PI / 6.0;
        assert!(relative_diff(z, basel) < 1e-6);
    }

    #[test]
    fn zeta_partial_correction_identity() {
        // partial zeta_O~ = partial zeta_O * correction(s), same truncation
        for a in [fiber(5), {
            let alg = build_algebra(&[spec(&[3, 0, 1])]).unwrap();
            let ord = order_from_generators(&alg, &[v(&[-1, 2])]).unwrap();
            analyze(&alg, &ord).unwrap()
        }] {
            let max = analyze(&a.algebra, &OrderLattice::maximal(&a.algebra)).unwrap();
            let z_o = zeta_partial(&a, 2.0, 1000).unwrap();
            let z_max = zeta_partial(&max, 2.0, 1000).unwrap();
            let c = zeta_correction_at(&a, 2.0);
            assert!(relative_diff(z_max, z_o * c) < 1e-9);
        }
    }

    #[test]
    fn double_congruence_class_number() {
        // {(a,b,c,d): a=b mod 3, c=d mod 3}: h = ((p-1)/2)^2 * 2 = 2*1*...
        // two singular ideals each contributing p-1 = 2; unit index:
        // units (e1,e2,e3,e4) with e1=e2, e3=e4 mod 3: 4 of 16 -> index 4
        // h = 1 * (2*2) / 4 = 1
        let alg =
            build_algebra(&[spec(&[0, 1]), spec(&[0, 1]), spec(&[0, 1]), spec(&[0, 1])]).unwrap();
        let ord = order_from_generators(
            &alg,
            &[v(&[3, 0, 0, 0]), v(&[0, 0, 3, 0]), v(&[1, 1, 0, 0])],
        )
        .unwrap();
        let a = analyze(&alg, &ord).unwrap();
        assert_eq!(a.invariants.unit_index, BigInt::from(4));
        assert_eq!(a.invariants.h, BigInt::one());
        assert_eq!(a.invariants.w, 4);
        assert!(verify_acnf(&a).unwrap().pass);
    }

    #[test]
    fn report_fields_consistent() {
        let a = fiber(7);
        let r = verify_acnf(&a).unwrap();
        assert!(r.rational_equal && r.pi_equal && r.disc_equal);
        assert!(r.float_rel_diff < 1e-12);
        assert!(r.lhs.float_value() > 0.0);
    }
}
