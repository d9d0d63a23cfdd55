//! Binary quadratic forms and continued fractions for quadratic fields:
//! class numbers by enumeration of reduced forms, and fundamental units by
//! the continued-fraction expansion of a square root.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{is_perfect_square, isqrt64};
use crate::error::{invalid, unsupported, Result};

/// Class number of the quadratic order of discriminant `D < 0`, counted as
/// the number of primitive reduced forms (a,b,c) with b^2 - 4ac = D,
/// |b| <= a <= c, and b >= 0 when |b| = a or a = c.
pub fn form_class_number(d: &BigInt) -> Result<u64> {
    if !d.is_negative() {
        return Err(invalid(
            "form class number requires a negative discriminant",
        ));
    }
    let rem = d.mod_floor(&BigInt::from(4));
    if !(rem.is_zero() || rem.is_one()) {
        return Err(invalid("discriminant must be 0 or 1 mod 4"));
    }
    let abs_d = d
        .abs()
        .to_i64()
        .ok_or_else(|| unsupported("discriminant too large for form enumeration"))?;
    let mut h = 0u64;
    let mut b: i64 = if abs_d % 2 == 0 { 0 } else { 1 };
    while 3 * b * b <= abs_d {
        let t = (b * b + abs_d) / 4;
        let mut a = std::cmp::max(b, 1);
        while a * a <= t {
            if t % a == 0 {
                let c = t / a;
                if gcd3(a, b, c) == 1 {
                    // forms with 0 < b < a < c appear with both signs of b
                    h += if b == 0 || a == b || a == c { 1 } else { 2 };
                }
            }
            a += 1;
        }
        b += 2;
    }
    Ok(h)
}

fn gcd3(a: i64, b: i64, c: i64) -> i64 {
    a.gcd(&b).gcd(&c)
}

/// Narrow class number of the quadratic order of discriminant `D > 0`
/// (not a perfect square): the number of cycles of reduced primitive
/// indefinite forms.
pub fn narrow_class_number_indefinite(d: &BigInt) -> Result<u64> {
    if !d.is_positive() || is_perfect_square(d) {
        return Err(invalid("need a positive nonsquare discriminant"));
    }
    let disc = d
        .to_i64()
        .ok_or_else(|| unsupported("discriminant too large for cycle enumeration"))?;
    let sq = isqrt64(disc);
    let mut forms = Vec::new();
    // b has the parity of D (then b^2 = D mod 4 automatically)
    let mut bb: i64 = if disc % 2 == 0 { 2 } else { 1 };
    while bb <= sq {
        {
            // reduced: |sqrt(D) - 2|a|| < b < sqrt(D), i.e.
            // (sqrt(D) - b)/2 < |a| < (sqrt(D) + b)/2
            let lo = (sq - bb) / 2;
            let hi = (sq + bb + 1) / 2 + 1;
            for abs_a in std::cmp::max(lo, 1)..=hi {
                for a in [abs_a, -abs_a] {
                    let rem4 = bb * bb - disc;
                    if rem4 % (4 * a) != 0 {
                        continue;
                    }
                    let c = rem4 / (4 * a);
                    if c == 0 {
                        continue;
                    }
                    if is_reduced_indefinite(a, bb, c, disc) && gcd3(a, bb, c) == 1 {
                        forms.push((a, bb, c));
                    }
                }
            }
        }
        bb += 2;
    }
    forms.sort_unstable();
    forms.dedup();

    // Partition into rho-cycles.
    let mut seen = std::collections::HashSet::new();
    let mut cycles = 0u64;
    for &f in &forms {
        if seen.contains(&f) {
            continue;
        }
        cycles += 1;
        let mut g = f;
        loop {
            seen.insert(g);
            g = rho(g, disc);
            if g == f {
                break;
            }
        }
    }
    Ok(cycles)
}

fn is_reduced_indefinite(a: i64, b: i64, c: i64, disc: i64) -> bool {
    debug_assert_eq!(b * b - 4 * a * c, disc);
    if b <= 0 {
        return false;
    }
    // |sqrt(D) - 2|a|| < b < sqrt(D) without floating point:
    // b^2 < D and (2|a| - b)^2 < D < (2|a| + b)^2
    let two_a = 2 * a.abs();
    b * b < disc && (two_a - b) * (two_a - b) < disc && disc < (two_a + b) * (two_a + b)
}

/// Reduction step on indefinite forms: (a,b,c) -> (c,b',c') with
/// b' = -b mod 2|c| chosen so the result is reduced.
fn rho((_a, b, c): (i64, i64, i64), disc: i64) -> (i64, i64, i64) {
    let sq = isqrt64(disc);
    let two_c = 2 * c.abs();
    // unique b' = -b (mod 2|c|) with sq - 2|c| < b' <= sq
    let mut bp = (-b).rem_euclid(two_c);
    bp += two_c * ((sq - bp).div_euclid(two_c));
    let cp = (bp * bp - disc) / (4 * c);
    (c, bp, cp)
}

/// A fundamental unit `(x + y*sqrt(d))/2` of the real quadratic field of
/// discriminant `D`, with `d` the squarefree radicand: `x^2 - d y^2 = ±4`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadUnit {
    pub x: BigInt,
    pub y: BigInt,
    /// squarefree radicand
    pub d: BigInt,
}

impl QuadUnit {
    pub fn norm(&self) -> BigInt {
        (&self.x * &self.x - &self.d * &self.y * &self.y) / BigInt::from(4)
    }

    /// Product in the half-integer representation: stays integral because
    /// x and y*d have matching parity.
    pub fn mul(&self, other: &QuadUnit) -> QuadUnit {
        debug_assert_eq!(self.d, other.d);
        let x = (&self.x * &other.x + &self.d * &self.y * &other.y) / BigInt::from(2);
        let y = (&self.x * &other.y + &self.y * &other.x) / BigInt::from(2);
        QuadUnit {
            x,
            y,
            d: self.d.clone(),
        }
    }

    /// Value under the embedding sending sqrt(d) to the positive root.
    pub fn to_f64(&self) -> f64 {
        let x = bigint_f64(&self.x);
        let y = bigint_f64(&self.y);
        let d = bigint_f64(&self.d);
        (x + y * d.sqrt()) / 2.0
    }
}

pub(crate) fn bigint_f64(x: &BigInt) -> f64 {
    x.to_f64().expect("finite f64 rendering")
}

/// Fundamental solution of `p^2 - d q^2 = ±1` via the continued-fraction
/// expansion of `sqrt(d)`, for squarefree `d > 1`.
fn pell_fundamental(d: &BigInt) -> (BigInt, BigInt) {
    let a0 = d.sqrt();
    let mut p_prev = BigInt::one();
    let mut p = a0.clone();
    let mut q_prev = BigInt::zero();
    let mut q = BigInt::one();
    // surd state: (pp + sqrt(d)) / qq
    let mut pp = a0.clone();
    let mut qq: BigInt = d - &a0 * &a0;
    loop {
        let norm: BigInt = &p * &p - d * &q * &q;
        if norm.abs().is_one() {
            return (p, q);
        }
        let a = (&pp + &a0).div_floor(&qq);
        pp = &a * &qq - &pp;
        qq = (d - &pp * &pp) / &qq;
        let p_next = &a * &p + &p_prev;
        let q_next = &a * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
    }
}

/// Fundamental unit (> 1) of the maximal order of the real quadratic field
/// with fundamental discriminant `D`.
pub fn fundamental_unit(disc: &BigInt) -> Result<QuadUnit> {
    if !disc.is_positive() {
        return Err(invalid("need a positive discriminant"));
    }
    let four = BigInt::from(4);
    let rem = disc.mod_floor(&four);
    let d = if rem.is_zero() {
        disc / &four
    } else {
        disc.clone()
    };
    let (p, q) = pell_fundamental(&d);
    let u = QuadUnit {
        x: &p * 2,
        y: &q * 2,
        d: d.clone(),
    };
    if rem.is_zero() {
        return Ok(u);
    }
    // For D = d = 1 mod 4 the fundamental unit may be a half-integer cube
    // root of the Z[sqrt(d)] unit. Recover it from a float approximation
    // and verify exactly.
    let uf = u.to_f64();
    let ef = uf.powf(1.0 / 3.0);
    for norm in [1.0f64, -1.0] {
        let t = ef + norm / ef;
        let x = BigInt::from(t.round() as i64);
        let y2 = (&x * &x - BigInt::from(if norm > 0.0 { 4 } else { -4 })) / &d;
        if y2.is_negative() {
            continue;
        }
        let y = y2.sqrt();
        if &y * &y != y2 {
            continue;
        }
        let cand = QuadUnit { x, y, d: d.clone() };
        if ((&cand.x + &cand.y) % 2i32).is_zero() && cand.mul(&cand).mul(&cand) == u {
            return Ok(cand);
        }
    }
    Ok(u)
}
