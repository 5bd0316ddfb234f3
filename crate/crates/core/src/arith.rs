//! Small multiplicative number theory on `u64`.

use num_integer::{Integer, Roots};

/// Primes up to a bound, for repeated trial division.
#[derive(Clone, Debug)]
pub struct PrimeTable {
    primes: Vec<u64>,
    limit: u64,
}

impl PrimeTable {
    /// Sieve of Eratosthenes up to `limit` inclusive.
    pub fn new(limit: u64) -> Self {
        let n = limit as usize;
        let mut composite = vec![false; n + 1];
        let mut primes = Vec::new();
        for i in 2..=n {
            if composite[i] {
                continue;
            }
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
        PrimeTable { primes, limit }
    }

    /// A table able to factor anything up to `n`.
    pub fn for_values_up_to(n: u64) -> Self {
        PrimeTable::new(n.sqrt() + 1)
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Prime factorization as `(p, e)` pairs in increasing `p`.
    pub fn factor(&self, mut n: u64) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        if n < 2 {
            return out;
        }
        for &p in &self.primes {
            if p * p > n {
                break;
            }
            if n % p == 0 {
                let mut e = 0;
                while n % p == 0 {
                    n /= p;
                    e += 1;
                }
                out.push((p, e));
            }
        }
        // past the table: continue with odd trial divisors
        let mut d = (self.limit + 1) | 1;
        while d * d <= n {
            if n % d == 0 {
                let mut e = 0;
                while n % d == 0 {
                    n /= d;
                    e += 1;
                }
                out.push((d, e));
            }
            d += 2;
        }
        if n > 1 {
            out.push((n, 1));
        }
        out
    }
}

pub fn factor(n: u64) -> Vec<(u64, u32)> {
    PrimeTable::for_values_up_to(n).factor(n)
}

/// All divisors in increasing order, from a factorization.
pub fn divisors(fac: &[(u64, u32)]) -> Vec<u64> {
    let mut ds = vec![1u64];
    for &(p, e) in fac {
        let len = ds.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                ds.push(ds[i] * pk);
            }
        }
    }
    ds.sort_unstable();
    ds
}

pub fn mobius(n: u64) -> i64 {
    let fac = factor(n);
    if fac.iter().any(|&(_, e)| e > 1) {
        0
    } else if fac.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// The character `χ₋₄`: 0 on evens, `(−1)^{(p−1)/2}` on odd numbers.
pub fn chi_m4(p: u64) -> i64 {
    match p % 4 {
        1 => 1,
        3 => -1,
        _ => 0,
    }
}

pub fn gcd3(a: u64, b: u64, c: u64) -> u64 {
    a.gcd(&b).gcd(&c)
}
