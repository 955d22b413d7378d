use std::sync::{Mutex, OnceLock};

use crate::error::{Error, Result};

/// Coefficients of `prod_{n>=1} (1 - x^n)` up to degree `deg`, from the
/// pentagonal number theorem.
fn euler_product(deg: usize) -> Vec<i128> {
    let mut c = vec![0i128; deg + 1];
    c[0] = 1;
    for k in 1i64.. {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        let g1 = (k * (3 * k - 1) / 2) as usize;
        let g2 = (k * (3 * k + 1) / 2) as usize;
        if g1 > deg {
            break;
        }
        c[g1] += sign;
        if g2 <= deg {
            c[g2] += sign;
        }
    }
    c
}

fn mul_truncated(a: &[i128], b: &[i128], deg: usize) -> Result<Vec<i128>> {
    let mut out = vec![0i128; deg + 1];
    for (i, &x) in a.iter().enumerate().take(deg + 1) {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(deg + 1 - i) {
            let t = x
                .checked_mul(y)
                .and_then(|t| out[i + j].checked_add(t))
                .ok_or_else(|| Error::Overflow(format!("tau expansion at degree {}", i + j)))?;
            out[i + j] = t;
        }
    }
    Ok(out)
}

fn compute_tau(limit: usize) -> Result<Vec<i128>> {
    let deg = limit - 1;
    let p1 = euler_product(deg);
    let p2 = mul_truncated(&p1, &p1, deg)?;
    let p4 = mul_truncated(&p2, &p2, deg)?;
    let p8 = mul_truncated(&p4, &p4, deg)?;
    let p16 = mul_truncated(&p8, &p8, deg)?;
    mul_truncated(&p16, &p8, deg)
}

static CACHE: OnceLock<Mutex<Vec<i128>>> = OnceLock::new();

/// `τ(1..=limit)`, the coefficients of `x prod (1 - x^n)^24`, at index `n - 1`.
pub fn ramanujan_tau(limit: usize) -> Result<Vec<i128>> {
    if limit == 0 {
        return Err(Error::InvalidArgument("limit must be at least 1".into()));
    }
    let cache = CACHE.get_or_init(|| Mutex::new(Vec::new()));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    if guard.len() < limit {
        let target = limit.max(2 * guard.len()).max(64);
        *guard = compute_tau(target)?;
    }
    Ok(guard[..limit].to_vec())
}

/// Single value `τ(n)`.
pub fn tau(n: u64) -> Result<i128> {
    if n == 0 {
        return Err(Error::InvalidArgument("tau is defined for n >= 1".into()));
    }
    let v = ramanujan_tau(n as usize)?;
    Ok(v[n as usize - 1])
}
