use crate::error::{Result, WalkError};

/// Largest `n` accepted by [`exact_binomial_tail`].
pub const EXACT_TAIL_MAX_N: u64 = 10_000;

/// `2 (n eps)^k`, an upper bound on `P(Bin(n, eps) > k)` whenever `n eps <= 1/2`.
pub fn bernoulli_tail_bound(n: u64, eps: f64, k: u32) -> f64 {
    2.0 * (n as f64 * eps).powi(k as i32)
}

/// `P(Bin(n, eps) > k)`.
///
/// Terms are generated by the ratio recurrence outward from the mode and the
/// tail is normalized by the total mass, so no single term has to be formed
/// from large powers and the relative error stays near the recurrence length
/// times machine epsilon.
pub fn exact_binomial_tail(n: u64, eps: f64, k: u64) -> Result<f64> {
    if n > EXACT_TAIL_MAX_N {
        return Err(WalkError::Range(format!("exact tail supports n <= {EXACT_TAIL_MAX_N}, got {n}")));
    }
    if !(0.0..=1.0).contains(&eps) {
        return Err(WalkError::Range(format!("probability {eps} outside [0, 1]")));
    }
    if k >= n || eps == 0.0 {
        return Ok(0.0);
    }
    if eps == 1.0 {
        return Ok(1.0);
    }
    let n_us = n as usize;
    let odds = eps / (1.0 - eps);
    let mode = (((n + 1) as f64 * eps).floor() as usize).min(n_us);
    // w[j] = P(X = j) / P(X = mode)
    let mut w = vec![0.0f64; n_us + 1];
    w[mode] = 1.0;
    for j in mode..n_us {
        w[j + 1] = w[j] * ((n_us - j) as f64 / (j + 1) as f64) * odds;
    }
    for j in (0..mode).rev() {
        w[j] = w[j + 1] * ((j + 1) as f64 / (n_us - j) as f64) / odds;
    }
    let tail: f64 = w[k as usize + 1..].iter().rev().sum();
    let total: f64 = tail + w[..=k as usize].iter().sum::<f64>();
    Ok(tail / total)
}
