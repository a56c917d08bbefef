//! Dense polynomials over a prime field F_p, coefficients stored constant term first.
//!
//! Only what field construction needs: multiplication and reduction modulo a
//! monic polynomial, powering, gcd, and Rabin's irreducibility test.

pub(crate) fn trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn inv_mod(a: u32, p: u32) -> u32 {
    // p is prime and a != 0 mod p
    let mut r = 1u64;
    let mut b = a as u64 % p as u64;
    let mut n = p - 2;
    while n > 0 {
        if n & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        n >>= 1;
    }
    r as u32
}

pub(crate) fn mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    let mut out: Vec<u32> = out.into_iter().map(|c| c as u32).collect();
    trim(&mut out);
    out
}

/// Remainder of `a` modulo the nonzero polynomial `m`.
pub(crate) fn rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = inv_mod(m[dm], p) as u64;
    while r.len() > dm {
        let top = r.len() - 1;
        let c = r[top] as u64 * lead_inv % p as u64;
        if c != 0 {
            let shift = top - dm;
            for (i, &mi) in m.iter().enumerate() {
                let sub = c * mi as u64 % p as u64;
                r[shift + i] = ((r[shift + i] as u64 + p as u64 - sub) % p as u64) as u32;
            }
        }
        trim(&mut r);
    }
    r
}

pub(crate) fn mulmod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    rem(&mul(a, b, p), m, p)
}

pub(crate) fn powmod(base: &[u32], mut n: u64, m: &[u32], p: u32) -> Vec<u32> {
    let mut result = vec![1u32];
    let mut b = rem(base, m, p);
    while n > 0 {
        if n & 1 == 1 {
            result = mulmod(&result, &b, m, p);
        }
        b = mulmod(&b, &b, m, p);
        n >>= 1;
    }
    rem(&result, m, p)
}

fn sub(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let n = a.len().max(b.len());
    let mut out: Vec<u32> = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(&mut out);
    out
}

pub(crate) fn gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub(crate) fn distinct_prime_factors(n: u64) -> Vec<u64> {
    prime_factors(n)
}

/// Rabin's test: a monic `f` of degree `e` is irreducible over F_p iff
/// `X^(p^e) = X mod f` and `gcd(X^(p^(e/r)) - X, f) = 1` for each prime `r | e`.
pub(crate) fn is_irreducible(f: &[u32], p: u32) -> bool {
    let e = f.len() - 1;
    if e == 0 {
        return false;
    }
    if e == 1 {
        return true;
    }
    let x = vec![0u32, 1];
    // frob[i] = X^(p^i) mod f
    let mut frob = Vec::with_capacity(e + 1);
    frob.push(rem(&x, f, p));
    for i in 1..=e {
        let next = powmod(&frob[i - 1], p as u64, f, p);
        frob.push(next);
    }
    if frob[e] != rem(&x, f, p) {
        return false;
    }
    for r in prime_factors(e as u64) {
        let i = e / r as usize;
        let diff = sub(&frob[i], &x, p);
        let g = gcd(&diff, f, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}
