//! Shared integer helpers: primality, sieves, factorization of word-size and
//! big integers, exact determinants, and logs of huge integers.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

pub fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn powmod(mut b: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, b, m);
        }
        b = mulmod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin; the witness set covers all of u64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut r = 0u32;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..r - 1 {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(i, &b)| if b { Some(i as u64) } else { None })
        .collect()
}

pub fn next_prime(n: u64) -> u64 {
    let mut k = n + 1;
    while !is_prime(k) {
        k += 1;
    }
    k
}

fn pollard_rho(n: u64) -> u64 {
    // Brent's cycle form with deterministic restarts; n must be odd composite.
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mulmod(x, x, n) + c) % n;
        let mut x = 2u64;
        let mut y = 2u64;
        let mut d = 1u64;
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd_u64(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Prime factorization of a u64, ascending, with multiplicities.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    }
    let mut stack = vec![n];
    let mut found: Vec<u64> = Vec::new();
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime(m) {
            found.push(m);
            continue;
        }
        let mut d = m;
        let mut i = 37u64;
        // Short trial pass keeps rho off easy composites.
        while i * i <= m && i < 20_000 {
            if m % i == 0 {
                d = i;
                break;
            }
            i += 2;
        }
        if d == m {
            d = pollard_rho(m);
        }
        stack.push(d);
        stack.push(m / d);
    }
    found.sort_unstable();
    let mut i = 0;
    while i < found.len() {
        let p = found[i];
        let mut e = 0;
        while i < found.len() && found[i] == p {
            e += 1;
            i += 1;
        }
        out.push((p, e));
    }
    out.sort_unstable();
    out
}

/// Distinct prime divisors of |n|, ascending. Panics on zero.
pub fn prime_divisors_big(n: &BigInt) -> Vec<u64> {
    assert!(!n.is_zero(), "zero has no prime divisor set");
    let mut m = n.abs();
    let mut out = Vec::new();
    // Trial division keeps the remainder within u64 for desk-scale inputs.
    let mut p = 2u64;
    while p < 1_000_000 {
        if (&m % p).is_zero() {
            out.push(p);
            while (&m % p).is_zero() {
                m /= p;
            }
        }
        if m == BigInt::from(1) {
            return out;
        }
        p = if p == 2 { 3 } else { p + 2 };
    }
    let rest = m
        .to_u64()
        .expect("cofactor after trial division exceeds u64; inputs are desk-scale");
    for (q, _) in factor_u64(rest) {
        out.push(q);
    }
    out.sort_unstable();
    out.dedup();
    out
}

pub fn valuation_big(n: &BigInt, p: u64) -> u32 {
    assert!(!n.is_zero());
    let mut m = n.abs();
    let mut v = 0;
    while (&m % p).is_zero() {
        m /= p;
        v += 1;
    }
    v
}

/// ln of a positive BigInt, stable for values far beyond f64 range.
pub fn ln_big(n: &BigInt) -> f64 {
    assert!(n.is_positive());
    let bits = n.bits();
    if bits <= 960 {
        return n.to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    let top: BigInt = n >> shift;
    top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// Exact determinant by Bareiss fraction-free elimination. Consumes `m`.
pub fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::from(1);
    }
    debug_assert!(m.iter().all(|r| r.len() == n));
    let mut sign = 1i32;
    let mut prev = BigInt::from(1);
    for k in 0..n {
        if m[k][k].is_zero() {
            let swap = (k + 1..n).find(|&i| !m[i][k].is_zero());
            match swap {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = num / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    if sign < 0 {
        -m[n - 1][n - 1].clone()
    } else {
        m[n - 1][n - 1].clone()
    }
}
