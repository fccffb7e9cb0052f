use indexmap::IndexMap;

use crate::error::{Error, Result};

/// Ranks keyed by algorithm. Ranks may be fractional (average ties).
#[derive(Debug, Clone, PartialEq)]
pub struct RankList {
    ranks: IndexMap<String, f64>,
}

impl RankList {
    pub fn new<I, S>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        let mut ranks = IndexMap::new();
        for (k, r) in entries {
            let k = k.into();
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::DegenerateInput(format!("rank {r} of `{k}` is not positive")));
            }
            if ranks.insert(k.clone(), r).is_some() {
                return Err(Error::DegenerateInput(format!("duplicate key `{k}`")));
            }
        }
        if ranks.is_empty() {
            return Err(Error::EmptyInput("rank list".into()));
        }
        Ok(Self { ranks })
    }

    /// Keys `0, 1, ...` for quick construction from a plain vector.
    pub fn from_ranks(ranks: &[f64]) -> Result<Self> {
        Self::new(ranks.iter().enumerate().map(|(i, &r)| (format!("{i}"), r)))
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.ranks.get(key).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.ranks.iter().map(|(k, &r)| (k.as_str(), r))
    }

    /// Both lists' ranks aligned on `self`'s key order.
    fn aligned(&self, other: &RankList) -> Result<(Vec<f64>, Vec<f64>)> {
        if self.len() != other.len() {
            return Err(Error::KeyMismatch);
        }
        let mut a = Vec::with_capacity(self.len());
        let mut b = Vec::with_capacity(self.len());
        for (k, r) in self.iter() {
            a.push(r);
            b.push(other.get(k).ok_or(Error::KeyMismatch)?);
        }
        Ok((a, b))
    }
}

/// Kendall's tau-b on aligned slices; `None` when either side is all tied
/// or fewer than two items are given.
pub fn kendall_tau_slices(a: &[f64], b: &[f64]) -> Option<f64> {
    debug_assert_eq!(a.len(), b.len());
    let n = a.len();
    let (mut concordant, mut discordant, mut tied_a, mut tied_b) = (0u64, 0u64, 0u64, 0u64);
    for i in 0..n {
        for j in i + 1..n {
            let da = a[i] - a[j];
            let db = b[i] - b[j];
            match (da == 0.0, db == 0.0) {
                (true, true) => {}
                (true, false) => tied_a += 1,
                (false, true) => tied_b += 1,
                (false, false) => {
                    if (da > 0.0) == (db > 0.0) {
                        concordant += 1
                    } else {
                        discordant += 1
                    }
                }
            }
        }
    }
    let base = (concordant + discordant) as f64;
    let denom = ((base + tied_a as f64) * (base + tied_b as f64)).sqrt();
    if denom == 0.0 {
        return None;
    }
    Some((concordant as f64 - discordant as f64) / denom)
}

/// Kendall's tau-b between two rank lists over the same keys.
pub fn kendall_tau(a: &RankList, b: &RankList) -> Result<f64> {
    let (x, y) = a.aligned(b)?;
    if x.len() < 2 {
        return Err(Error::DegenerateInput("Kendall's tau needs at least 2 items".into()));
    }
    kendall_tau_slices(&x, &y).ok_or_else(|| Error::DegenerateInput("all ranks tied in one list".into()))
}

/// Sum of absolute rank differences.
pub fn spearman_footrule(a: &RankList, b: &RankList) -> Result<f64> {
    let (x, y) = a.aligned(b)?;
    Ok(x.iter().zip(&y).map(|(p, q)| (p - q).abs()).sum())
}

/// Sum of squared rank differences.
pub fn spearman_distance(a: &RankList, b: &RankList) -> Result<f64> {
    let (x, y) = a.aligned(b)?;
    Ok(x.iter().zip(&y).map(|(p, q)| (p - q).powi(2)).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rl(r: &[f64]) -> RankList {
        RankList::from_ranks(r).unwrap()
    }

    #[test]
    fn tau_examples() {
        let a = rl(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(kendall_tau(&a, &a).unwrap(), 1.0);
        assert_eq!(kendall_tau(&a, &rl(&[5.0, 4.0, 3.0, 2.0, 1.0])).unwrap(), -1.0);
        let t = kendall_tau(&rl(&[1.0, 2.0, 3.0, 4.0]), &rl(&[1.0, 3.0, 2.0, 4.0])).unwrap();
        assert!((t - 4.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn tau_key_alignment() {
        let a = RankList::new([("x", 1.0), ("y", 2.0), ("z", 3.0)]).unwrap();
        let b = RankList::new([("z", 3.0), ("x", 1.0), ("y", 2.0)]).unwrap();
        assert_eq!(kendall_tau(&a, &b).unwrap(), 1.0);
        let c = RankList::new([("x", 1.0), ("y", 2.0), ("w", 3.0)]).unwrap();
        assert!(matches!(kendall_tau(&a, &c), Err(Error::KeyMismatch)));
        assert!(matches!(spearman_footrule(&a, &c), Err(Error::KeyMismatch)));
    }

    #[test]
    fn tau_degenerate() {
        let a = rl(&[1.0, 1.0, 1.0]);
        let b = rl(&[1.0, 2.0, 3.0]);
        assert!(matches!(kendall_tau(&a, &b), Err(Error::DegenerateInput(_))));
        assert!(matches!(kendall_tau(&rl(&[1.0]), &rl(&[1.0])), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn tau_b_with_ties() {
        // pairs: (0,1) tied in a; (0,2),(1,2) concordant
        let t = kendall_tau_slices(&[1.0, 1.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        assert!((t - 2.0 / (2.0f64 * 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn spearman_examples() {
        let a = rl(&[1.0, 2.0, 3.0]);
        let r = rl(&[3.0, 2.0, 1.0]);
        assert_eq!(spearman_footrule(&a, &a).unwrap(), 0.0);
        assert_eq!(spearman_footrule(&a, &r).unwrap(), 4.0);
        assert_eq!(spearman_footrule(&rl(&[1.0, 2.0]), &rl(&[2.0, 1.0])).unwrap(), 2.0);
        assert_eq!(spearman_distance(&a, &a).unwrap(), 0.0);
        assert_eq!(spearman_distance(&a, &r).unwrap(), 8.0);
        assert_eq!(spearman_distance(&rl(&[1.0, 2.0]), &rl(&[2.0, 1.0])).unwrap(), 2.0);
    }

    #[test]
    fn rejects_bad_ranks() {
        assert!(RankList::from_ranks(&[]).is_err());
        assert!(RankList::from_ranks(&[0.0, 1.0]).is_err());
        assert!(RankList::new([("a", 1.0), ("a", 2.0)]).is_err());
    }
}
