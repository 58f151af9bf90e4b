//! Property-based tests for the pattern and sequence layers.

use proptest::collection::vec;
use proptest::prelude::*;

use ordpat::perm::{outgrowth_set_with, pattern_of_values, Pattern};
use ordpat::series::{ordinal_census, Series};
use ordpat::shift::SymbolSequence;

fn arb_pattern(max_len: usize) -> impl Strategy<Value = Pattern> {
    (1..=max_len).prop_flat_map(|l| {
        Just((0..l).collect::<Vec<usize>>())
            .prop_shuffle()
            .prop_map(|e| Pattern::from_slice(&e).unwrap())
    })
}

proptest! {
    /// Sorting distinct values yields a permutation whose inverse ranks them.
    #[test]
    fn values_pattern_ranks_correctly(values in vec(-1_000_000i64..1_000_000, 1..20)) {
        let mut dedup = values.clone();
        dedup.sort_unstable();
        dedup.dedup();
        prop_assume!(dedup.len() == values.len());
        let p = pattern_of_values(&values).unwrap();
        let entries = p.entries();
        for w in entries.windows(2) {
            prop_assert!(values[w[0] as usize] < values[w[1] as usize]);
        }
        // rank form: inverse lists the rank of each position
        let ranks = p.invert();
        let mut sorted = values.clone();
        sorted.sort_unstable();
        for (t, &r) in ranks.entries().iter().enumerate() {
            prop_assert_eq!(values[t], sorted[r as usize]);
        }
    }

    #[test]
    fn invert_and_mirror_involute(p in arb_pattern(20)) {
        prop_assert_eq!(p.invert().invert(), p.clone());
        prop_assert_eq!(p.mirror().mirror(), p);
    }

    #[test]
    fn pattern_text_roundtrip(p in arb_pattern(20)) {
        let text = p.to_string();
        let back: Pattern = text.parse().unwrap();
        prop_assert_eq!(back, p);
    }

    /// Enumeration filter and direct interleaving construction agree.
    #[test]
    fn outgrowth_routes_agree(p in arb_pattern(4), extra in 1usize..3) {
        let m = p.len() + extra;
        let filtered = outgrowth_set_with(&p, m, 9, false).unwrap();
        let constructed = outgrowth_set_with(&p, m, 0, true).unwrap();
        prop_assert_eq!(filtered, constructed);
    }

    /// Canonicalization never changes the infinite word.
    #[test]
    fn canonical_form_preserves_symbols(
        n in 2u8..5,
        pre in vec(0u8..4, 0..6),
        per in vec(0u8..4, 1..5),
    ) {
        let pre: Vec<u8> = pre.into_iter().map(|s| s % n).collect();
        let per: Vec<u8> = per.into_iter().map(|s| s % n).collect();
        let w = SymbolSequence::new(n, pre.clone(), per.clone()).unwrap();
        let naive = |i: usize| {
            if i < pre.len() { pre[i] } else { per[(i - pre.len()) % per.len()] }
        };
        for i in 0..(pre.len() + 3 * per.len() + 2) {
            prop_assert_eq!(w.symbol_at(i), naive(i));
        }
        // canonical: preperiod minimal, period primitive
        prop_assert!(w.preperiod().last() != w.period().last() || w.preperiod().is_empty());
    }

    /// Shifting commutes with symbol lookup.
    #[test]
    fn shift_drops_symbols(
        n in 2u8..5,
        pre in vec(0u8..4, 0..5),
        per in vec(0u8..4, 1..4),
        k in 0usize..12,
    ) {
        let pre: Vec<u8> = pre.into_iter().map(|s| s % n).collect();
        let per: Vec<u8> = per.into_iter().map(|s| s % n).collect();
        let w = SymbolSequence::new(n, pre, per).unwrap();
        let shifted = w.shift_by(k);
        for i in 0..10 {
            prop_assert_eq!(shifted.symbol_at(i), w.symbol_at(i + k));
        }
    }

    /// Census conservation: counted + tied = total windows.
    #[test]
    fn census_conserves_windows(values in vec(-100i32..100, 4..80), l in 2usize..6) {
        prop_assume!(l <= values.len());
        let series = Series::new(values.iter().map(|&v| v as f64).collect()).unwrap();
        let report = ordinal_census(&series, l).unwrap();
        let counted: u64 = report.counts.values().sum();
        prop_assert_eq!(counted + report.tie_windows, report.total_windows);
        let factorial: u64 = (2..=l as u64).product();
        prop_assert_eq!(report.missing_count, factorial - report.counts.len() as u64);
    }
}
