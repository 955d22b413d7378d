use crate::error::{Error, Result};

/// Smallest-prime-factor table for `2..=limit`.
#[derive(Debug, Clone)]
pub struct FactorSieve {
    limit: u64,
    // spf[n] for n in 0..=limit; entries 0 and 1 are unused
    spf: Vec<u32>,
}

pub fn build_sieve(limit: u64) -> Result<FactorSieve> {
    FactorSieve::new(limit)
}

impl FactorSieve {
    pub fn new(limit: u64) -> Result<Self> {
        if limit < 2 {
            return Err(Error::InvalidArgument(format!(
                "sieve limit must be at least 2, got {limit}"
            )));
        }
        if limit > u32::MAX as u64 {
            return Err(Error::OutOfRange {
                what: "sieve limit",
                value: limit,
                limit: u32::MAX as u64,
            });
        }
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        for i in 2..=n {
            if spf[i] != 0 {
                continue;
            }
            spf[i] = i as u32;
            let mut j = i.saturating_mul(i);
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
        Ok(FactorSieve { limit, spf })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    fn check(&self, n: u64) -> Result<()> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be positive".into()));
        }
        if n > self.limit {
            return Err(Error::OutOfRange {
                what: "n",
                value: n,
                limit: self.limit,
            });
        }
        Ok(())
    }

    /// Smallest prime factor of `n >= 2`.
    pub fn spf(&self, n: u64) -> Result<u64> {
        self.check(n)?;
        if n < 2 {
            return Err(Error::InvalidArgument("spf is defined for n >= 2".into()));
        }
        Ok(self.spf[n as usize] as u64)
    }

    pub fn is_prime(&self, n: u64) -> Result<bool> {
        self.check(n)?;
        Ok(n >= 2 && self.spf[n as usize] as u64 == n)
    }

    /// Prime factorization as `(p, k)` pairs with increasing `p`.
    pub fn factorize(&self, n: u64) -> Result<Vec<(u64, u32)>> {
        self.check(n)?;
        let mut out: Vec<(u64, u32)> = Vec::new();
        let mut m = n as usize;
        while m > 1 {
            let p = self.spf[m] as usize;
            let mut k = 0;
            while m.is_multiple_of(p) {
                m /= p;
                k += 1;
            }
            out.push((p as u64, k));
        }
        Ok(out)
    }

    /// All divisors of `n`, sorted.
    pub fn divisors(&self, n: u64) -> Result<Vec<u64>> {
        let mut ds = vec![1u64];
        for (p, k) in self.factorize(n)? {
            let len = ds.len();
            let mut pk = 1;
            for _ in 0..k {
                pk *= p;
                for i in 0..len {
                    ds.push(ds[i] * pk);
                }
            }
        }
        ds.sort_unstable();
        Ok(ds)
    }

    pub fn liouville(&self, n: u64) -> Result<i8> {
        let omega: u32 = self.factorize(n)?.iter().map(|&(_, k)| k).sum();
        Ok(if omega.is_multiple_of(2) { 1 } else { -1 })
    }

    pub fn moebius(&self, n: u64) -> Result<i8> {
        let f = self.factorize(n)?;
        if f.iter().any(|&(_, k)| k > 1) {
            return Ok(0);
        }
        Ok(if f.len() % 2 == 0 { 1 } else { -1 })
    }

    /// `λ(n)` for `n in 1..=limit`, stored at index `n - 1`.
    pub fn liouville_table(&self) -> Vec<i8> {
        let n = self.limit as usize;
        let mut t = vec![1i8; n];
        for m in 2..=n {
            let p = self.spf[m] as usize;
            t[m - 1] = -t[m / p - 1];
        }
        t
    }

    /// `μ(n)` for `n in 1..=limit`, stored at index `n - 1`.
    pub fn moebius_table(&self) -> Vec<i8> {
        let n = self.limit as usize;
        let mut t = vec![1i8; n];
        for m in 2..=n {
            let p = self.spf[m] as usize;
            let q = m / p;
            t[m - 1] = if q.is_multiple_of(p) { 0 } else { -t[q - 1] };
        }
        t
    }
}

pub fn liouville(n: u64, sieve: &FactorSieve) -> Result<i8> {
    sieve.liouville(n)
}

pub fn moebius(n: u64, sieve: &FactorSieve) -> Result<i8> {
    sieve.moebius(n)
}

/// Factorization by trial division, for arguments beyond any sieve.
pub fn factorize_trial(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n.is_multiple_of(p) {
            let mut k = 0;
            while n.is_multiple_of(p) {
                n /= p;
                k += 1;
            }
            out.push((p, k));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}
