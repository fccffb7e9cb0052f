use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Largest number of nonzero differences for which the exact null
/// distribution is used (ties force the normal approximation regardless).
pub const EXACT_MAX_N: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WilcoxonResult {
    /// Sum of the ranks of positive differences.
    pub w_plus: f64,
    /// Number of nonzero differences.
    pub n_effective: usize,
    /// One-sided p-value for "x is greater than y".
    pub p_value: f64,
    pub exact: bool,
}

/// One-sided paired Wilcoxon signed-rank test of `x` superior to `y`.
///
/// Zero differences are dropped. Without ties among `|d|` and with at most
/// [`EXACT_MAX_N`] nonzero differences the p-value is exact; otherwise it
/// comes from the normal approximation with tie and continuity correction.
/// If every difference is zero the p-value is 1.
pub fn wilcoxon_signed_rank_one_sided(x: &[f64], y: &[f64]) -> Result<WilcoxonResult> {
    signed_rank(x, y, false)
}

/// Same test, always using the normal approximation.
pub fn wilcoxon_signed_rank_normal(x: &[f64], y: &[f64]) -> Result<WilcoxonResult> {
    signed_rank(x, y, true)
}

fn signed_rank(x: &[f64], y: &[f64], force_normal: bool) -> Result<WilcoxonResult> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.is_empty() {
        return Err(Error::EmptyInput("Wilcoxon test needs at least one pair".into()));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::DegenerateInput("non-finite value in paired samples".into()));
    }
    let mut diffs: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).filter(|d| *d != 0.0).collect();
    let n = diffs.len();
    if n == 0 {
        return Ok(WilcoxonResult {
            w_plus: 0.0,
            n_effective: 0,
            p_value: 1.0,
            exact: !force_normal,
        });
    }
    diffs.sort_by(|a, b| a.abs().total_cmp(&b.abs()));

    // Average ranks of |d|, collecting tie group sizes.
    let mut w_plus = 0.0;
    let mut tie_term = 0.0;
    let mut has_ties = false;
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && diffs[j].abs() == diffs[i].abs() {
            j += 1;
        }
        let t = (j - i) as f64;
        if j - i > 1 {
            has_ties = true;
            tie_term += t * t * t - t;
        }
        let avg_rank = (i + 1 + j) as f64 / 2.0;
        w_plus += avg_rank * diffs[i..j].iter().filter(|d| **d > 0.0).count() as f64;
        i = j;
    }

    let exact = !force_normal && !has_ties && n <= EXACT_MAX_N;
    let p_value = if exact {
        exact_upper_tail(n, w_plus.round() as usize)
    } else {
        let nf = n as f64;
        let mean = nf * (nf + 1.0) / 4.0;
        let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term / 48.0;
        let z = (w_plus - mean - 0.5) / var.sqrt();
        (0.5 * erfc(z / std::f64::consts::SQRT_2)).clamp(f64::MIN_POSITIVE, 1.0)
    };
    Ok(WilcoxonResult {
        w_plus,
        n_effective: n,
        p_value,
        exact,
    })
}

/// `P(W >= w)` under the null for ranks `1..=n`: the share of the `2^n`
/// sign assignments whose positive-rank sum reaches `w`.
fn exact_upper_tail(n: usize, w: usize) -> f64 {
    let max = n * (n + 1) / 2;
    if w > max {
        return 0.0;
    }
    // counts[s] = number of subsets of {1..k} summing to s; exact in f64 up to 2^53.
    let mut counts = vec![0.0f64; max + 1];
    counts[0] = 1.0;
    for k in 1..=n {
        for s in (k..=max).rev() {
            counts[s] += counts[s - k];
        }
    }
    let tail: f64 = counts[w..].iter().sum();
    tail / 2f64.powi(n as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct enumeration of all sign patterns of the ranks 1..=n.
    fn brute_force(n: usize, w: f64) -> f64 {
        let mut hits = 0u64;
        for mask in 0u64..(1 << n) {
            let s: usize = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).sum();
            if s as f64 >= w {
                hits += 1;
            }
        }
        hits as f64 / (1u64 << n) as f64
    }

    #[test]
    fn all_positive_examples() {
        let r = wilcoxon_signed_rank_one_sided(&[1.0, 2.0, 3.0, 4.0, 5.0], &[0.0; 5]).unwrap();
        assert_eq!(r.w_plus, 15.0);
        assert!(r.exact);
        assert_eq!(r.p_value, 1.0 / 32.0);
        let r = wilcoxon_signed_rank_one_sided(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0], &[0.0; 6]).unwrap();
        assert_eq!(r.p_value, 1.0 / 64.0);
    }

    #[test]
    fn equal_samples_give_one() {
        let x = [0.3, 0.4, 0.5];
        let r = wilcoxon_signed_rank_one_sided(&x, &x).unwrap();
        assert_eq!(r.p_value, 1.0);
        assert_eq!(r.n_effective, 0);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            wilcoxon_signed_rank_one_sided(&[1.0], &[1.0, 2.0]),
            Err(Error::LengthMismatch(1, 2))
        ));
        assert!(wilcoxon_signed_rank_one_sided(&[], &[]).is_err());
    }

    #[test]
    fn zeros_are_dropped() {
        // differences 0, 1, 2 -> n' = 2, W+ = 3, p = 1/4
        let r = wilcoxon_signed_rank_one_sided(&[1.0, 2.0, 3.0], &[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(r.n_effective, 2);
        assert_eq!(r.p_value, 0.25);
    }

    #[test]
    fn exact_matches_enumeration() {
        for n in 1..=10 {
            for w in 0..=n * (n + 1) / 2 + 1 {
                assert!((exact_upper_tail(n, w) - brute_force(n, w as f64)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn tied_magnitudes_use_approximation() {
        // |d| = 1,1,2 with one negative: ranks 1.5,1.5,3 -> W+ = 4.5
        let r = wilcoxon_signed_rank_one_sided(&[1.0, 0.0, 2.0], &[0.0, 1.0, 0.0]).unwrap();
        assert!(!r.exact);
        assert_eq!(r.w_plus, 4.5);
        let var: f64 = 3.0 * 4.0 * 7.0 / 24.0 - 6.0 / 48.0;
        let z = (4.5 - 3.0 - 0.5) / var.sqrt();
        let expected = 0.5 * erfc(z / std::f64::consts::SQRT_2);
        assert!((r.p_value - expected).abs() < 1e-15);
    }

    #[test]
    fn direction_matters() {
        let x = [0.9, 0.8, 0.85, 0.95, 0.7, 0.75];
        let y = [0.5, 0.6, 0.55, 0.4, 0.45, 0.52];
        assert!(wilcoxon_signed_rank_one_sided(&x, &y).unwrap().p_value < 0.05);
        assert!(wilcoxon_signed_rank_one_sided(&y, &x).unwrap().p_value > 0.5);
    }
}
