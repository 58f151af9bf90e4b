//! Permutations as order patterns.
//!
//! A [`Pattern`] `[p0, ..., p_{L-1}]` lists *time indices* in increasing value
//! order: it is realized by values `x_0, ..., x_{L-1}` when
//! `x_{p0} < x_{p1} < ... < x_{p_{L-1}}`. This bracket convention is the
//! canonical internal form; the rank-vector form is its [`Pattern::invert`].

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternError {
    #[error("pattern must have at least one entry")]
    Empty,
    #[error("pattern length {0} exceeds the supported maximum of 255")]
    TooLong(usize),
    #[error("entries {0:?} are not a permutation of 0..{1}")]
    NotAPermutation(Vec<u8>, usize),
    #[error("values at positions {i} and {j} compare equal")]
    DuplicateValues { i: usize, j: usize },
    #[error("window length {window} exceeds pattern length {len}")]
    LengthMismatch { window: usize, len: usize },
    #[error("target length {target} must exceed pattern length {len}")]
    TargetTooShort { target: usize, len: usize },
    #[error("pattern too short: need length at least {need}, got {got}")]
    TooShort { need: usize, got: usize },
    #[error("enumerating S_{m} exceeds the filter cap {cap} and direct construction is disabled")]
    CapExceeded { m: usize, cap: usize },
    #[error("bad pattern text {0:?}: {1}")]
    Parse(String, String),
    #[error("bound requires 2 <= L <= M, got L={l}, M={m}")]
    BadBoundArgs { l: usize, m: usize },
}

/// An order pattern: a permutation of `{0, ..., L-1}` in time-index form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Pattern {
    entries: Vec<u8>,
}

impl<'de> Deserialize<'de> for Pattern {
    fn deserialize<D>(deserializer: D) -> Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        let entries = Vec::<u8>::deserialize(deserializer)?;
        Pattern::new(entries).map_err(serde::de::Error::custom)
    }
}

impl Pattern {
    /// Validates that `entries` is a permutation of `{0, .., L-1}`, `L >= 1`.
    pub fn new(entries: Vec<u8>) -> Result<Self, PatternError> {
        let l = entries.len();
        if l == 0 {
            return Err(PatternError::Empty);
        }
        if l > 255 {
            return Err(PatternError::TooLong(l));
        }
        let mut seen = vec![false; l];
        for &e in &entries {
            if (e as usize) >= l || seen[e as usize] {
                return Err(PatternError::NotAPermutation(entries.clone(), l));
            }
            seen[e as usize] = true;
        }
        Ok(Pattern { entries })
    }

    /// Convenience constructor from any unsigned entries (test literals).
    pub fn from_slice(entries: &[usize]) -> Result<Self, PatternError> {
        if entries.iter().any(|&e| e > 255) {
            return Err(PatternError::TooLong(entries.len()));
        }
        Pattern::new(entries.iter().map(|&e| e as u8).collect())
    }

    pub fn identity(l: usize) -> Result<Self, PatternError> {
        if l == 0 {
            return Err(PatternError::Empty);
        }
        if l > 255 {
            return Err(PatternError::TooLong(l));
        }
        Ok(Pattern {
            entries: (0..l as u8).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        false // L >= 1 by construction
    }

    pub fn entries(&self) -> &[u8] {
        &self.entries
    }

    /// The inverse permutation: `invert(p)[p[i]] = i`.
    ///
    /// In the bracket convention this is the rank vector: entry `t` of the
    /// inverse is the rank of the orbit value at time `t`.
    pub fn invert(&self) -> Pattern {
        let mut inv = vec![0u8; self.len()];
        for (i, &v) in self.entries.iter().enumerate() {
            inv[v as usize] = i as u8;
        }
        Pattern { entries: inv }
    }

    /// Entries reversed. A point of type `p` maps, under symbol complement
    /// or orientation reversal, to a point of type `mirror(p)`.
    pub fn mirror(&self) -> Pattern {
        Pattern {
            entries: self.entries.iter().rev().copied().collect(),
        }
    }

    /// Smallest window start `i` such that `self[i..i+|tau|]` is
    /// order-isomorphic to `tau`, if any.
    pub fn contains_consecutive(&self, tau: &Pattern) -> Result<Option<usize>, PatternError> {
        let lt = tau.len();
        if lt > self.len() {
            return Err(PatternError::LengthMismatch {
                window: lt,
                len: self.len(),
            });
        }
        let target = rank_order(&tau.entries);
        for i in 0..=(self.len() - lt) {
            if rank_order(&self.entries[i..i + lt]) == target {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    /// Whether `self` is an outgrowth pattern of the strictly shorter `pi`:
    /// `invert(self)` contains `invert(pi)` as a consecutive pattern.
    pub fn is_outgrowth_of(&self, pi: &Pattern) -> Result<bool, PatternError> {
        if pi.len() >= self.len() {
            return Err(PatternError::LengthMismatch {
                window: pi.len(),
                len: self.len(),
            });
        }
        Ok(self
            .invert()
            .contains_consecutive(&pi.invert())?
            .is_some())
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.entries.iter().join(","))
    }
}

// Debug prints the bracket form; keeps assert_eq! failures readable.
impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Pattern {
    type Err = PatternError;

    /// Parses the bracketed text form, e.g. `"[2,1,0]"` (brackets optional).
    fn from_str(s: &str) -> Result<Self, PatternError> {
        let inner = s.trim();
        let inner = inner
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .unwrap_or(inner);
        let mut entries = Vec::new();
        for part in inner.split(',') {
            let part = part.trim();
            let v: u8 = part
                .parse()
                .map_err(|e| PatternError::Parse(s.to_string(), format!("{part:?}: {e}")))?;
            entries.push(v);
        }
        Pattern::new(entries)
    }
}

/// Sorting permutation of `xs` by index, i.e. `pattern_of_values` for exact
/// (totally ordered) values.
///
/// Returns `p` with `xs[p[0]] < xs[p[1]] < ...`; equal values are an error,
/// reported with the two original positions that tie.
pub fn pattern_of_values<T: Ord>(xs: &[T]) -> Result<Pattern, PatternError> {
    if xs.is_empty() {
        return Err(PatternError::Empty);
    }
    if xs.len() > 255 {
        return Err(PatternError::TooLong(xs.len()));
    }
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].cmp(&xs[b]));
    for w in idx.windows(2) {
        if xs[w[0]] == xs[w[1]] {
            let (i, j) = (w[0].min(w[1]), w[0].max(w[1]));
            return Err(PatternError::DuplicateValues { i, j });
        }
    }
    Ok(Pattern {
        entries: idx.into_iter().map(|i| i as u8).collect(),
    })
}

/// Rank vector of a slice of distinct entries (the pattern of the slice,
/// in time-index form). Entries are distinct by construction here.
fn rank_order(w: &[u8]) -> Vec<u8> {
    let mut idx: Vec<u8> = (0..w.len() as u8).collect();
    idx.sort_by_key(|&i| w[i as usize]);
    idx
}

/// All `L!` patterns of length `l`, in lexicographic order.
pub fn all_patterns(l: usize) -> impl Iterator<Item = Pattern> {
    assert!(l >= 1 && l <= 255, "pattern length out of range");
    (0..l as u8)
        .permutations(l)
        .map(|entries| Pattern { entries })
}

/// Default cap on brute-force enumeration of `S_M` in [`outgrowth_set`]:
/// `9! = 362,880` permutations.
pub const DEFAULT_FILTER_CAP: usize = 9;

/// All outgrowth patterns of `pi` of length `m`, sorted lexicographically.
///
/// For `m` up to the default filter cap this filters all of `S_m`; above it
/// the set is built directly by interleaving the shifted copy of `pi` with
/// wildcard values, then deduplicating.
pub fn outgrowth_set(pi: &Pattern, m: usize) -> Result<BTreeSet<Pattern>, PatternError> {
    outgrowth_set_with(pi, m, DEFAULT_FILTER_CAP, true)
}

/// [`outgrowth_set`] with an explicit filter cap and a switch for the direct
/// construction fallback.
pub fn outgrowth_set_with(
    pi: &Pattern,
    m: usize,
    filter_cap: usize,
    allow_construction: bool,
) -> Result<BTreeSet<Pattern>, PatternError> {
    let l = pi.len();
    if m <= l {
        return Err(PatternError::TargetTooShort { target: m, len: l });
    }
    if m > 255 {
        return Err(PatternError::TooLong(m));
    }
    if m <= filter_cap {
        let candidates: Vec<Vec<u8>> = (0..m as u8).permutations(m).collect_vec();
        let set = candidates
            .into_par_iter()
            .filter_map(|entries| {
                let sigma = Pattern { entries };
                match sigma.is_outgrowth_of(pi) {
                    Ok(true) => Some(sigma),
                    _ => None,
                }
            })
            .collect::<Vec<_>>();
        return Ok(set.into_iter().collect());
    }
    if !allow_construction {
        return Err(PatternError::CapExceeded { m, cap: filter_cap });
    }
    Ok(construct_outgrowths(pi, m))
}

/// Direct construction: for each shift `n` the entries `pi + n` appear in
/// bracket order and the remaining values `{0..n} ∪ {l+n..m}` fill the free
/// slots in every arrangement.
fn construct_outgrowths(pi: &Pattern, m: usize) -> BTreeSet<Pattern> {
    let l = pi.len();
    let mut out = BTreeSet::new();
    for n in 0..=(m - l) {
        let specials: Vec<u8> = pi.entries.iter().map(|&v| v + n as u8).collect();
        let wildcards: Vec<u8> = (0..n as u8)
            .chain((l + n) as u8..m as u8)
            .collect();
        let mut slots = vec![0u8; m];
        let mut used = vec![false; wildcards.len()];
        fill(
            &mut slots,
            0,
            &specials,
            0,
            &wildcards,
            &mut used,
            &mut out,
        );
    }
    out
}

fn fill(
    slots: &mut Vec<u8>,
    pos: usize,
    specials: &[u8],
    next_special: usize,
    wildcards: &[u8],
    used: &mut Vec<bool>,
    out: &mut BTreeSet<Pattern>,
) {
    if pos == slots.len() {
        out.insert(Pattern {
            entries: slots.clone(),
        });
        return;
    }
    let remaining_slots = slots.len() - pos;
    let remaining_specials = specials.len() - next_special;
    // always feasible to place the next special value now
    if remaining_specials > 0 {
        slots[pos] = specials[next_special];
        fill(slots, pos + 1, specials, next_special + 1, wildcards, used, out);
    }
    // or any unused wildcard, provided the specials still fit afterwards
    if remaining_slots > remaining_specials {
        for w in 0..wildcards.len() {
            if !used[w] {
                used[w] = true;
                slots[pos] = wildcards[w];
                fill(slots, pos + 1, specials, next_special, wildcards, used, out);
                used[w] = false;
            }
        }
    }
}

/// The `2(L+1)` length-`L+1` extensions of `pi`, Group A before Group B,
/// duplicates kept.
///
/// Group A appends the new time index `L` at every rank; Group B shifts all
/// time indices up by one and inserts the new time index `0` at every rank.
/// Every extension is an outgrowth of `pi`, and every length-`L+1` outgrowth
/// of `pi` arises this way.
pub fn elementary_extensions(pi: &Pattern) -> Vec<Pattern> {
    let l = pi.len() as u8;
    let mut out = Vec::with_capacity(2 * (pi.len() + 1));
    for i in 0..=pi.len() {
        let mut e = pi.entries.clone();
        e.insert(i, l);
        out.push(Pattern { entries: e });
    }
    for i in 0..=pi.len() {
        let mut e: Vec<u8> = pi.entries.iter().map(|&v| v + 1).collect();
        e.insert(i, 0);
        out.push(Pattern { entries: e });
    }
    out
}

/// The two patterns `sigma` elementarily extends: drop the largest time
/// index, and drop time index `0` shifting the rest down.
pub fn elementary_predecessors(sigma: &Pattern) -> Result<(Pattern, Pattern), PatternError> {
    let l = sigma.len();
    if l < 2 {
        return Err(PatternError::TooShort { need: 2, got: l });
    }
    let max = (l - 1) as u8;
    let a: Vec<u8> = sigma
        .entries
        .iter()
        .copied()
        .filter(|&v| v != max)
        .collect();
    let b: Vec<u8> = sigma
        .entries
        .iter()
        .copied()
        .filter(|&v| v != 0)
        .map(|v| v - 1)
        .collect();
    Ok((Pattern { entries: a }, Pattern { entries: b }))
}

/// The bound `(M-L+1) * M!/(M-L)!` on the number of length-`M` outgrowth
/// patterns of a length-`L` pattern, as an exact integer.
pub fn outgrowth_upper_bound(l: usize, m: usize) -> Result<BigUint, PatternError> {
    if l < 2 || l > m {
        return Err(PatternError::BadBoundArgs { l, m });
    }
    let mut acc = BigUint::from(m - l + 1);
    for k in (m - l + 1)..=m {
        acc *= BigUint::from(k);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pat(e: &[usize]) -> Pattern {
        Pattern::from_slice(e).unwrap()
    }

    #[test]
    fn values_sorted_by_hand() {
        // 0.2, 0.4, 0.8, 0.6 as scaled integers
        assert_eq!(pattern_of_values(&[2, 4, 8, 6]).unwrap(), pat(&[0, 1, 3, 2]));
        assert_eq!(pattern_of_values(&[5]).unwrap(), pat(&[0]));
    }

    #[test]
    fn values_reject_ties() {
        let err = pattern_of_values(&[1, 7, 1]).unwrap_err();
        assert_eq!(err, PatternError::DuplicateValues { i: 0, j: 2 });
    }

    #[test]
    fn invert_examples() {
        assert_eq!(pat(&[2, 0, 1]).invert(), pat(&[1, 2, 0]));
        assert_eq!(pat(&[4, 2, 1, 5, 3, 0]).invert(), pat(&[5, 2, 1, 4, 0, 3]));
        assert_eq!(pat(&[0, 1, 2]).invert(), pat(&[0, 1, 2]));
    }

    #[test]
    fn mirror_examples() {
        assert_eq!(pat(&[3, 1, 0, 2]).mirror(), pat(&[2, 0, 1, 3]));
        assert_eq!(pat(&[0, 1]).mirror(), pat(&[1, 0]));
        let p = pat(&[6, 10, 7, 11, 9, 8, 1, 2, 3, 5, 0, 4, 13, 12]);
        assert_eq!(p.mirror().mirror(), p);
    }

    #[test]
    fn consecutive_containment() {
        let sigma = pat(&[5, 2, 1, 4, 0, 3]);
        let tau = pat(&[1, 2, 0]);
        // window 1,4,0 starting at position 2
        assert_eq!(sigma.contains_consecutive(&tau).unwrap(), Some(2));
        assert_eq!(sigma.contains_consecutive(&sigma).unwrap(), Some(0));
        assert_eq!(
            pat(&[0, 1, 2, 3]).contains_consecutive(&pat(&[1, 0])).unwrap(),
            None
        );
        assert!(matches!(
            pat(&[1, 0]).contains_consecutive(&pat(&[0, 1, 2])),
            Err(PatternError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn outgrowth_examples() {
        assert!(pat(&[4, 2, 1, 5, 3, 0]).is_outgrowth_of(&pat(&[2, 0, 1])).unwrap());
        assert!(pat(&[3, 2, 1, 0]).is_outgrowth_of(&pat(&[2, 1, 0])).unwrap());
        assert!(!pat(&[0, 1, 3, 2]).is_outgrowth_of(&pat(&[2, 1, 0])).unwrap());
        assert!(matches!(
            pat(&[0, 1, 2]).is_outgrowth_of(&pat(&[0, 1, 2])),
            Err(PatternError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn outgrowth_set_of_210_in_s4() {
        let set = outgrowth_set(&pat(&[2, 1, 0]), 4).unwrap();
        let expected: BTreeSet<Pattern> = [
            [3, 2, 1, 0],
            [2, 3, 1, 0],
            [2, 1, 3, 0],
            [2, 1, 0, 3],
            [0, 3, 2, 1],
            [3, 0, 2, 1],
            [3, 2, 0, 1],
        ]
        .iter()
        .map(|e| pat(e))
        .collect();
        assert_eq!(set, expected);
        assert_eq!(set.len(), 7);
    }

    #[test]
    fn outgrowth_set_of_ascent_in_s3() {
        // filtering all 6 permutations: only [2,1,0] avoids a consecutive ascent
        let set = outgrowth_set(&pat(&[0, 1]), 3).unwrap();
        assert_eq!(set.len(), 5);
        assert!(!set.contains(&pat(&[2, 1, 0])));
    }

    #[test]
    fn outgrowth_set_within_bound() {
        let set = outgrowth_set(&pat(&[2, 1, 0]), 5).unwrap();
        assert_eq!(set.len(), 50);
        let bound = outgrowth_upper_bound(3, 5).unwrap();
        assert!(BigUint::from(set.len()) <= bound);
        assert_eq!(bound, BigUint::from(180u32));
    }

    #[test]
    fn construction_matches_filter() {
        for pi in [pat(&[0, 1]), pat(&[2, 0, 1]), pat(&[2, 1, 0])] {
            for m in (pi.len() + 1)..=6 {
                let filtered = outgrowth_set_with(&pi, m, 9, false).unwrap();
                let constructed = outgrowth_set_with(&pi, m, 0, true).unwrap();
                assert_eq!(filtered, constructed, "pi={pi} m={m}");
            }
        }
    }

    #[test]
    fn cap_exceeded_without_construction() {
        assert!(matches!(
            outgrowth_set_with(&pat(&[0, 1]), 5, 4, false),
            Err(PatternError::CapExceeded { m: 5, cap: 4 })
        ));
    }

    #[test]
    fn extensions_of_210() {
        let exts = elementary_extensions(&pat(&[2, 1, 0]));
        let expected: Vec<Pattern> = [
            [3, 2, 1, 0],
            [2, 3, 1, 0],
            [2, 1, 3, 0],
            [2, 1, 0, 3],
            [0, 3, 2, 1],
            [3, 0, 2, 1],
            [3, 2, 0, 1],
            [3, 2, 1, 0],
        ]
        .iter()
        .map(|e| pat(e))
        .collect();
        assert_eq!(exts, expected);
    }

    #[test]
    fn extensions_of_singleton() {
        let exts = elementary_extensions(&pat(&[0]));
        let expected: Vec<Pattern> = [[1, 0], [0, 1], [0, 1], [1, 0]].iter().map(|e| pat(e)).collect();
        assert_eq!(exts, expected);
    }

    #[test]
    fn extensions_are_outgrowths() {
        for pi in [pat(&[0]), pat(&[2, 1, 0]), pat(&[1, 3, 0, 2])] {
            for e in elementary_extensions(&pi) {
                assert!(e.is_outgrowth_of(&pi).unwrap(), "{e} of {pi}");
            }
        }
    }

    #[test]
    fn predecessors() {
        let (a, b) = elementary_predecessors(&pat(&[3, 1, 0, 2])).unwrap();
        assert_eq!(a, pat(&[1, 0, 2]));
        assert_eq!(b, pat(&[2, 0, 1]));
        let (a, b) = elementary_predecessors(&pat(&[3, 2, 1, 0])).unwrap();
        assert_eq!(a, pat(&[2, 1, 0]));
        assert_eq!(b, pat(&[2, 1, 0]));
        let sigma = pat(&[2, 3, 1, 0]);
        let (a, _) = elementary_predecessors(&sigma).unwrap();
        assert!(elementary_extensions(&a).contains(&sigma));
    }

    #[test]
    fn upper_bound_values() {
        assert_eq!(outgrowth_upper_bound(3, 4).unwrap(), BigUint::from(48u32));
        assert_eq!(outgrowth_upper_bound(3, 3).unwrap(), BigUint::from(6u32));
        assert!(outgrowth_upper_bound(1, 3).is_err());
    }

    #[test]
    fn parse_and_display() {
        let p: Pattern = "[2,1,0]".parse().unwrap();
        assert_eq!(p, pat(&[2, 1, 0]));
        assert_eq!(p.to_string(), "[2,1,0]");
        let q: Pattern = " 0, 2 , 1 ".parse().unwrap();
        assert_eq!(q, pat(&[0, 2, 1]));
        assert!("[2,2,0]".parse::<Pattern>().is_err());
        assert!("[]".parse::<Pattern>().is_err());
    }

    #[test]
    fn json_form_is_int_array() {
        let p = pat(&[2, 1, 0]);
        assert_eq!(serde_json::to_string(&p).unwrap(), "[2,1,0]");
        let back: Pattern = serde_json::from_str("[2,1,0]").unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<Pattern>("[2,2,0]").is_err());
    }
}
