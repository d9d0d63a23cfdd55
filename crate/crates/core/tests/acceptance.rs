//! Acceptance suite: one test per criterion, each printing a PASS line.
//!
//! 1. fiber-product exactness for p in {2,3,5,7,11,13,97}
//! 2. class-number oracle equivalence for imaginary quadratic orders |Disc| <= 5000
//! 3. exact-sequence identity over the whole corpus
//! 4. local unit-index formula vs brute-force unit counting
//! 5. regulator formula vs direct log-lattice computation
//! 6. trace-form discriminant identity
//! 7. Euler-product consistency at s = 2
//! 8. rank of the logarithmic unit image

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use acnf_core::algebra::{build_algebra, EtaleAlgebra, FieldSpec};
use acnf_core::invariants::{
    analyze, verify_acnf, zeta_correction_at, zeta_partial, OrderAnalysis,
};
use acnf_core::matrix::{hnf_basis, lattice_sum, IntMat};
use acnf_core::oracle::{
    direct_regulator, fiber_product_order, form_class_number, log_embedding, numerical_rank,
};
use acnf_core::order::{order_from_generators, OrderLattice};
use acnf_core::quotient::{local_unit_index, quotient_ring, unit_count_brute};

fn spec(coeffs: &[i64]) -> FieldSpec {
    FieldSpec {
        poly: coeffs.iter().map(|&c| BigInt::from(c)).collect(),
        supplied: None,
    }
}

/// Defining polynomial of the quadratic field with fundamental
/// discriminant D.
fn quad_spec(d: i64) -> FieldSpec {
    if d.rem_euclid(4) == 1 {
        spec(&[(1 - d) / 4, -1, 1])
    } else {
        assert_eq!(d % 4, 0);
        spec(&[-d / 4, 0, 1])
    }
}

fn is_fundamental(d: i64) -> bool {
    fn squarefree(mut n: i64) -> bool {
        n = n.abs();
        let mut p = 2;
        while p * p <= n {
            if n % (p * p) == 0 {
                return false;
            }
            while n % p == 0 {
                n /= p;
            }
            p += 1;
        }
        true
    }
    if d == 0 || d == 1 {
        return false;
    }
    if d.rem_euclid(4) == 1 {
        squarefree(d)
    } else if d % 4 == 0 {
        let k = d / 4;
        matches!(k.rem_euclid(4), 2 | 3) && squarefree(k)
    } else {
        false
    }
}

/// The order Z + f * (maximal order), valid in any algebra: generated by
/// f times each integral basis element.
fn z_plus_f(alg: &EtaleAlgebra, f: i64) -> OrderLattice {
    let gens: Vec<Vec<BigInt>> = (0..alg.n)
        .map(|j| {
            let mut g = vec![BigInt::zero(); alg.n];
            g[j] = BigInt::from(f);
            g
        })
        .collect();
    order_from_generators(alg, &gens).unwrap()
}

/// The shared corpus: >= 50 orders over 1-, 2-, and 3-component algebras.
fn corpus() -> Vec<(String, OrderAnalysis)> {
    let mut out = Vec::new();
    let mut push = |name: String, alg: &EtaleAlgebra, ord: &OrderLattice| {
        out.push((name, analyze(alg, ord).unwrap()));
    };

    // one-component: Z + f*O for quadratic fields, plus Q itself
    let rational = build_algebra(&[spec(&[0, 1])]).unwrap();
    push(
        "Q maximal".into(),
        &rational,
        &OrderLattice::maximal(&rational),
    );
    for d in [-3i64, -4, -7, -8, -11, -15, -20, 5, 8, 12, 13, 17, 21, 24] {
        let alg = build_algebra(&[quad_spec(d)]).unwrap();
        for f in 1..=4i64 {
            let ord = z_plus_f(&alg, f);
            push(format!("Z+{f}*O(disc {d})"), &alg, &ord);
        }
    }

    // two-component: fiber products and mixed congruence orders
    for p in [2u64, 3, 5, 7, 11, 13, 97] {
        let (alg, ord) = fiber_product_order(p, 2).unwrap();
        push(format!("fiber p={p}"), &alg, &ord);
    }
    for d in [-3i64, -4, 5, 8] {
        let alg = build_algebra(&[spec(&[0, 1]), quad_spec(d)]).unwrap();
        for f in [2i64, 3] {
            let ord = z_plus_f(&alg, f);
            push(format!("Z+{f}*O(Q x disc {d})"), &alg, &ord);
        }
    }

    // three-component
    for p in [2u64, 3, 5] {
        let (alg, ord) = fiber_product_order(p, 3).unwrap();
        push(format!("fiber p={p} copies=3"), &alg, &ord);
    }
    for f in [2i64, 3] {
        let alg = build_algebra(&[spec(&[0, 1]), quad_spec(-3), quad_spec(5)]).unwrap();
        let ord = z_plus_f(&alg, f);
        push(format!("Z+{f}*O(Q x disc -3 x disc 5)"), &alg, &ord);
        let alg = build_algebra(&[spec(&[0, 1]), spec(&[0, 1]), quad_spec(-4)]).unwrap();
        let ord = z_plus_f(&alg, f);
        push(format!("Z+{f}*O(Q x Q x disc -4)"), &alg, &ord);
    }
    assert!(out.len() >= 50, "corpus has {} orders", out.len());
    out
}

#[test]
fn criterion_1_fiber_product_exactness() {
    for p in [2u64, 3, 5, 7, 11, 13, 97] {
        let (alg, ord) = fiber_product_order(p, 2).unwrap();
        let a = analyze(&alg, &ord).unwrap();
        let r = verify_acnf(&a).unwrap();
        let expected = BigRational::new(BigInt::from(p as i64 - 1), BigInt::from(p));
        assert!(r.pass, "p={p}");
        assert_eq!(r.lhs.rational, expected, "p={p} lhs");
        assert_eq!(r.rhs.rational, expected, "p={p} rhs");
        let h_expected = if p == 2 { 1 } else { (p - 1) / 2 };
        assert_eq!(a.invariants.h, BigInt::from(h_expected), "p={p} h");
        assert_eq!(a.invariants.w, if p == 2 { 4 } else { 2 }, "p={p} w");
        assert_eq!(a.invariants.disc, BigInt::from(p * p), "p={p} disc");
        assert_eq!(a.invariants.regulator, 1.0, "p={p} R");
    }
    println!("criterion 1: PASS — fiber products p in {{2,3,5,7,11,13,97}} give both sides exactly 1 - 1/p");
}

#[test]
fn criterion_2_imaginary_class_number_oracle() {
    let mut checked = 0usize;
    for d in (-5000i64..0).filter(|d| is_fundamental(*d)) {
        let alg = build_algebra(&[quad_spec(d)]).unwrap();
        let mut f = 1i64;
        while f * f * d.abs() <= 5000 {
            let ord = z_plus_f(&alg, f);
            let a = analyze(&alg, &ord).unwrap();
            let disc = &a.invariants.disc;
            assert_eq!(disc, &BigInt::from(f * f * d));
            let forms = form_class_number(disc).unwrap();
            assert_eq!(
                a.invariants.h,
                BigInt::from(forms),
                "disc {d} conductor {f}"
            );
            checked += 1;
            f += 1;
        }
    }
    assert!(checked > 1500, "only {checked} orders checked");
    println!("criterion 2: PASS — class number equals the form count for {checked} imaginary quadratic orders with |Disc| <= 5000");
}

#[test]
fn criterion_3_exact_sequence_identity() {
    let corpus = corpus();
    for (name, a) in &corpus {
        // h(O) * [O~^x : O^x] = h(O~) * #(O~/O) * prod of local factors
        let lhs = BigRational::from(&a.invariants.h * &a.invariants.unit_index);
        let mut rhs = BigRational::from(a.algebra.h() * &a.invariants.index);
        for s in &a.singular {
            for np in &s.norms_above {
                rhs *= BigRational::one() - BigRational::new(BigInt::one(), np.clone());
            }
            rhs /= BigRational::one() - BigRational::new(BigInt::one(), s.norm.clone());
        }
        assert_eq!(lhs, rhs, "{name}");
        assert!(a.invariants.h.is_positive(), "{name}");
    }
    println!(
        "criterion 3: PASS — exact-sequence identity holds as exact rationals for {} corpus orders",
        corpus.len()
    );
}

#[test]
fn criterion_4_local_unit_index_brute() {
    let mut checked = 0usize;
    for (name, a) in &corpus() {
        let mut primes: Vec<u64> = a.singular.iter().map(|s| s.p).collect();
        primes.dedup();
        for p in primes {
            // p-part of the conductor: c + p^K * O~ isolates the primes over p
            let k = {
                let mut k = 0u32;
                let mut idx = a.invariants.index.clone();
                let pb = BigInt::from(p);
                while (&idx % &pb).is_zero() {
                    idx /= &pb;
                    k += 1;
                }
                k + 1
            };
            let pk = BigInt::from(p).pow(k);
            let scaled = IntMat::from_fn(a.algebra.n, a.algebra.n, |i, j| {
                if i == j {
                    pk.clone()
                } else {
                    BigInt::zero()
                }
            });
            let ideal = lattice_sum(&a.conductor.basis, &scaled);
            let big = quotient_ring(&IntMat::identity(a.algebra.n), &ideal).unwrap();
            if big.size > BigInt::from(1_000_000u64) {
                continue;
            }
            let small_ideal = hnf_basis(&ideal);
            let small = quotient_ring(&a.order.basis, &small_ideal).unwrap();
            let units_big = unit_count_brute(&a.algebra, &big).unwrap();
            let units_small = unit_count_brute(&a.algebra, &small).unwrap();
            let formula: BigInt = a
                .singular
                .iter()
                .filter(|s| s.p == p)
                .map(|s| local_unit_index(s).unwrap())
                .product();
            assert_eq!(&units_big, &(&units_small * &formula), "{name} p={p}");
            checked += 1;
        }
    }
    assert!(checked >= 20);
    println!("criterion 4: PASS — formula unit indices match brute-force unit counts at {checked} singular prime sites");
}

#[test]
fn criterion_5_regulator_cross_check() {
    let mut checked = 0usize;
    for d in (2i64..=100).filter(|d| is_fundamental(*d)) {
        let alg = build_algebra(&[quad_spec(d)]).unwrap();
        for f in 1..=20i64 {
            let ord = z_plus_f(&alg, f);
            let a = analyze(&alg, &ord).unwrap();
            let direct = direct_regulator(&a).unwrap();
            let rel = (direct - a.invariants.regulator).abs() / a.invariants.regulator;
            assert!(rel <= 1e-9, "disc {d} conductor {f}: rel {rel}");
            checked += 1;
        }
    }
    println!("criterion 5: PASS — formula and direct log-lattice regulators agree to 1e-9 for {checked} real quadratic orders");
}

#[test]
fn criterion_6_trace_form_discriminant() {
    let corpus = corpus();
    for (name, a) in &corpus {
        let b = &a.order.basis;
        let gram = b.transpose().mul(&a.algebra.trace_matrix()).mul(b);
        let expected = &a.invariants.index * &a.invariants.index * &a.algebra.disc;
        assert_eq!(gram.det(), expected, "{name}");
    }
    println!(
        "criterion 6: PASS — trace-form determinant equals index^2 * Disc(maximal) for {} corpus orders",
        corpus.len()
    );
}

#[test]
fn criterion_7_euler_product_consistency() {
    // Basel: partial zeta_Z(2) with bound 1e5 is within 1e-6 of pi^2/6
    let alg = build_algebra(&[spec(&[0, 1])]).unwrap();
    let a = analyze(&alg, &OrderLattice::maximal(&alg)).unwrap();
    let z = zeta_partial(&a, 2.0, 100_000).unwrap();
    let basel = std::f64::consts::PI * std::f64::consts::PI / 6.0;
    assert!((z - basel).abs() / basel < 1e-6);

    // identical-truncation identity for representative corpus orders
    let mut names = Vec::new();
    for (name, a) in corpus().iter().step_by(9) {
        let max = analyze(&a.algebra, &OrderLattice::maximal(&a.algebra)).unwrap();
        let z_o = zeta_partial(a, 2.0, 100_000).unwrap();
        let z_max = zeta_partial(&max, 2.0, 100_000).unwrap();
        let c = zeta_correction_at(a, 2.0);
        let rel = (z_max - z_o * c).abs() / z_max;
        assert!(rel <= 1e-9, "{name}: rel {rel}");
        names.push(name.clone());
    }
    println!(
        "criterion 7: PASS — partial zeta identity at s=2, bound 1e5, for {} orders; zeta_Z(2) within 1e-6 of pi^2/6",
        names.len()
    );
}

#[test]
fn criterion_8_dirichlet_rank() {
    let corpus = corpus();
    for (name, a) in &corpus {
        let alg = &a.algebra;
        let mut units = Vec::new();
        for (i, comp) in alg.components.iter().enumerate() {
            for u in &comp.unit_generators {
                units.push(alg.embed_unit(i, u));
            }
        }
        // the order's unit group contains the unit_index-th powers, whose
        // log rows are positive multiples of these; rank is shared
        let emb = log_embedding(alg, &units).unwrap();
        assert_eq!(numerical_rank(&emb.rows, 1e-6), alg.r, "{name}");
    }
    println!(
        "criterion 8: PASS — logarithmic unit image has rank r1 + r2 - m for {} corpus orders",
        corpus.len()
    );
}
