use std::fmt;
use std::str::FromStr;

use crate::error::{MopError, Result};

/// A multi-index `(n_1, …, n_r)` with `r >= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() {
            return Err(MopError::InvalidInput("multi-index needs at least one component".into()));
        }
        Ok(MultiIndex(parts))
    }

    pub fn zero(r: usize) -> Self {
        MultiIndex(vec![0; r.max(1)])
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn r(&self) -> usize {
        self.0.len()
    }

    /// `|n| = Σ n_j`.
    pub fn size(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn max_part(&self) -> usize {
        self.0.iter().copied().max().unwrap_or(0)
    }

    /// `n + e_j`.
    pub fn plus(&self, j: usize) -> Self {
        let mut p = self.0.clone();
        p[j] += 1;
        MultiIndex(p)
    }

    /// `n − e_j`, if `n_j > 0`.
    pub fn minus(&self, j: usize) -> Option<Self> {
        let mut p = self.0.clone();
        p[j] = p[j].checked_sub(1)?;
        Some(MultiIndex(p))
    }

    /// Componentwise `self <= other`.
    pub fn dominated_by(&self, other: &Self) -> bool {
        self.r() == other.r() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Every index with `r` components and size at most `max_size`, ordered by
    /// size and then lexicographically.
    pub fn all_up_to(r: usize, max_size: usize) -> Vec<MultiIndex> {
        fn rec(r: usize, remaining: usize, prefix: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
            if prefix.len() == r {
                out.push(MultiIndex(prefix.clone()));
                return;
            }
            for v in 0..=remaining {
                prefix.push(v);
                rec(r, remaining - v, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        rec(r.max(1), max_size, &mut Vec::new(), &mut out);
        out.sort_by(|a, b| a.size().cmp(&b.size()).then_with(|| a.0.cmp(&b.0)));
        out
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl FromStr for MultiIndex {
    type Err = MopError;

    /// Parses `"2"`, `"1,1"` or `"(1,1)"`.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts = inner
            .split(',')
            .map(|p| p.trim().parse::<usize>().map_err(|_| MopError::Parse(format!("bad multi-index {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        MultiIndex::new(parts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let n: MultiIndex = "2,1".parse().unwrap();
        assert_eq!(n.size(), 3);
        assert_eq!(n.to_string(), "(2,1)");
        assert_eq!("(4)".parse::<MultiIndex>().unwrap().parts(), &[4]);
        assert!("a,1".parse::<MultiIndex>().is_err());
        assert!("".parse::<MultiIndex>().is_err());
    }

    #[test]
    fn enumeration_counts() {
        // C(s + r, r) indices of size <= s
        assert_eq!(MultiIndex::all_up_to(1, 6).len(), 7);
        assert_eq!(MultiIndex::all_up_to(2, 6).len(), 28);
        assert_eq!(MultiIndex::all_up_to(3, 6).len(), 84);
        let all = MultiIndex::all_up_to(2, 2);
        assert_eq!(all[0], MultiIndex::zero(2));
        assert!(all.windows(2).all(|w| w[0].size() <= w[1].size()));
    }

    #[test]
    fn neighbours() {
        let n = MultiIndex::new(vec![1, 0]).unwrap();
        assert_eq!(n.plus(1).parts(), &[1, 1]);
        assert_eq!(n.minus(0).unwrap().parts(), &[0, 0]);
        assert!(n.minus(1).is_none());
    }
}
