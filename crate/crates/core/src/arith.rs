//! Elementary integer arithmetic: primes, factorization, Kronecker symbols,
//! squarefree parts.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{invalid, Result};

/// Primes up to `bound` inclusive, by sieve of Eratosthenes.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for p in 2..=n {
        if !composite[p] {
            primes.push(p as u64);
            let mut q = p * p;
            while q <= n {
                composite[q] = true;
                q += p;
            }
        }
    }
    primes
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Trial-division factorization of `|n|` into (prime, exponent) pairs,
/// sorted by prime.
pub fn factor(n: &BigInt) -> Result<Vec<(u64, u32)>> {
    let mut m = n.abs();
    if m.is_zero() {
        return Err(invalid("cannot factor zero"));
    }
    let one = BigInt::from(1);
    let mut out: Vec<(u64, u32)> = Vec::new();
    let mut p = 2u64;
    while m > one {
        let pb = BigInt::from(p);
        if (&pb * &pb) > m {
            break;
        }
        let mut e = 0u32;
        while (&m % &pb).is_zero() {
            m /= &pb;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += 1;
    }
    if m > BigInt::from(1) {
        let q = m
            .to_u64()
            .ok_or_else(|| invalid(format!("factor too large for trial division: {m}")))?;
        out.push((q, 1));
    }
    Ok(out)
}

/// Squarefree part of a nonzero integer, keeping the sign:
/// `n = s^2 * squarefree_part(n)`.
pub fn squarefree_part(n: &BigInt) -> Result<BigInt> {
    let mut sf = n.signum();
    for (p, e) in factor(n)? {
        if !e.is_multiple_of(2) {
            sf *= BigInt::from(p);
        }
    }
    Ok(sf)
}

/// Largest `s` with `s^2 | n` (for `n != 0`).
pub fn square_part(n: &BigInt) -> Result<BigInt> {
    let mut s = BigInt::from(1);
    for (p, e) in factor(n)? {
        for _ in 0..(e / 2) {
            s *= BigInt::from(p);
        }
    }
    Ok(s)
}

pub fn is_perfect_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}

fn pow_mod(base: u64, mut exp: u64, modulus: u64) -> u64 {
    let m = modulus as u128;
    let mut acc: u128 = 1;
    let mut b = (base % modulus) as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// Kronecker symbol (d/p) for a prime p.
///
/// For odd p this is the Legendre symbol of `d mod p`; for p = 2 it is
/// determined by `d mod 8` (0 when d is even, +1 for d = ±1, -1 for d = ±3).
pub fn kronecker_prime(d: &BigInt, p: u64) -> i32 {
    if p == 2 {
        let m = d.mod_floor(&BigInt::from(8)).to_u64().unwrap();
        return match m {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => 0,
        };
    }
    let m = ((d % BigInt::from(p)) + BigInt::from(p)) % BigInt::from(p);
    let m = m.to_u64().unwrap();
    if m == 0 {
        return 0;
    }
    let e = pow_mod(m, (p - 1) / 2, p);
    if e == 1 {
        1
    } else {
        -1
    }
}

/// Integer square root of a nonnegative i64.
pub fn isqrt64(n: i64) -> i64 {
    debug_assert!(n >= 0);
    let mut r = (n as f64).sqrt() as i64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sieve_small() {
        assert_eq!(primes_up_to(20), vec![2, 3, 5, 7, 11, 13, 17, 19]);
    }

    #[test]
    fn factor_and_squarefree() {
        assert_eq!(
            factor(&BigInt::from(360)).unwrap(),
            vec![(2, 3), (3, 2), (5, 1)]
        );
        assert_eq!(
            squarefree_part(&BigInt::from(-12)).unwrap(),
            BigInt::from(-3)
        );
        assert_eq!(square_part(&BigInt::from(2000)).unwrap(), BigInt::from(20));
    }

    #[test]
    fn kronecker_cases() {
        // -3 is 5 mod 8, so 2 is inert in Q(sqrt(-3))
        assert_eq!(kronecker_prime(&BigInt::from(-3), 2), -1);
        assert_eq!(kronecker_prime(&BigInt::from(-4), 2), 0);
        assert_eq!(kronecker_prime(&BigInt::from(5), 5), 0);
        assert_eq!(kronecker_prime(&BigInt::from(5), 11), 1);
        assert_eq!(kronecker_prime(&BigInt::from(5), 2), -1);
        assert_eq!(kronecker_prime(&BigInt::from(-3), 7), 1);
    }
}
