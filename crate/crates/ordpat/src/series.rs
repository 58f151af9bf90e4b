//! Ordinal analysis of finite series and reproducible generators.
//!
//! Windows with tied values are counted separately, never tie-broken: order
//! patterns are defined only for distinct values, and breaking ties by index
//! would manufacture patterns. The missing-pattern statistic is compared
//! against an i.i.d. uniform null model; the resulting exceedance fraction
//! is a heuristic, not a calibrated p-value.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::perm::{all_patterns, Pattern};
use crate::plmap::{rat, Rational};
use crate::rng::Xoshiro256PlusPlus;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("series value at index {0} is not finite")]
    NonFinite(usize),
    #[error("series must contain at least one value")]
    EmptySeries,
    #[error("window length {window} exceeds series length {len}")]
    WindowTooLong { window: usize, len: usize },
    #[error("window length must be between 2 and {max}, got {got}")]
    BadWindow { got: usize, max: usize },
    #[error("probabilities must be positive and sum to 1: {0}")]
    BadStochasticVector(String),
    #[error("transition matrix is not stationary for the start vector: {0}")]
    NonStationary(String),
    #[error("orbit points at indices {i} and {j} coincide")]
    DuplicatePoints { i: usize, j: usize },
    #[error("initial point outside the unit domain: {0}")]
    OutsideDomain(String),
    #[error("trial count must be at least 1")]
    NoTrials,
    #[error("bad series text at line {line}: {value:?}")]
    Parse { line: usize, value: String },
}

/// A finite series of binary64 values; non-finite values are rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    values: Vec<f64>,
}

impl Series {
    pub fn new(values: Vec<f64>) -> Result<Self, SeriesError> {
        if values.is_empty() {
            return Err(SeriesError::EmptySeries);
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(SeriesError::NonFinite(i));
        }
        Ok(Series { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false // nonempty by construction
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Parses one value per line (plain text or single-column CSV).
    pub fn parse_text(text: &str) -> Result<Self, SeriesError> {
        let mut values = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim().trim_end_matches(',');
            if line.is_empty() {
                continue;
            }
            let v: f64 = line.parse().map_err(|_| SeriesError::Parse {
                line: i + 1,
                value: line.to_string(),
            })?;
            values.push(v);
        }
        Series::new(values)
    }
}

/// Window census caps: patterns longer than this cannot be counted against
/// `L!` in a u64, and the missing list is only materialized when short.
pub const MAX_WINDOW: usize = 20;
pub const MISSING_LIST_MAX_WINDOW: usize = 8;

/// Sliding-window ordinal census of a series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CensusReport {
    pub window: usize,
    /// Occurrence count per realized pattern.
    pub counts: BTreeMap<Pattern, u64>,
    /// Number of patterns of `S_L` that never occur.
    pub missing_count: u64,
    /// The missing patterns themselves, when `L <=` [`MISSING_LIST_MAX_WINDOW`].
    pub missing: Vec<Pattern>,
    /// Windows containing tied values; counted, never assigned a pattern.
    pub tie_windows: u64,
    pub total_windows: u64,
}

fn factorial_u64(l: usize) -> u64 {
    (2..=l as u64).product()
}

fn finish_report(
    window: usize,
    counts: BTreeMap<Pattern, u64>,
    tie_windows: u64,
    total_windows: u64,
) -> CensusReport {
    let missing_count = factorial_u64(window) - counts.len() as u64;
    let missing = if window <= MISSING_LIST_MAX_WINDOW {
        all_patterns(window)
            .filter(|p| !counts.contains_key(p))
            .collect()
    } else {
        Vec::new()
    };
    CensusReport {
        window,
        counts,
        missing_count,
        missing,
        tie_windows,
        total_windows,
    }
}

/// Pattern of one float window, or `None` on any tie.
fn window_pattern(w: &[f64]) -> Option<Pattern> {
    let mut idx: Vec<usize> = (0..w.len()).collect();
    idx.sort_by(|&a, &b| w[a].partial_cmp(&w[b]).expect("finite values"));
    if idx.windows(2).any(|p| w[p[0]] == w[p[1]]) {
        return None;
    }
    Some(Pattern::from_slice(&idx).expect("indices form a permutation"))
}

/// Counts the pattern of every length-`l` window with distinct values;
/// tied windows are tallied separately.
pub fn ordinal_census(s: &Series, l: usize) -> Result<CensusReport, SeriesError> {
    if !(2..=MAX_WINDOW).contains(&l) {
        return Err(SeriesError::BadWindow { got: l, max: MAX_WINDOW });
    }
    if l > s.len() {
        return Err(SeriesError::WindowTooLong { window: l, len: s.len() });
    }
    let mut counts: BTreeMap<Pattern, u64> = BTreeMap::new();
    let mut ties = 0u64;
    for w in s.values.windows(l) {
        match window_pattern(w) {
            Some(p) => *counts.entry(p).or_insert(0) += 1,
            None => ties += 1,
        }
    }
    let total = (s.len() - l + 1) as u64;
    Ok(finish_report(l, counts, ties, total))
}

/// Ordinal census of a planar rational orbit under the two-sided order:
/// second coordinate first, first coordinate as tiebreak.
pub fn twodim_census(
    orbit: &[(Rational, Rational)],
    l: usize,
) -> Result<CensusReport, SeriesError> {
    if !(2..=MAX_WINDOW).contains(&l) {
        return Err(SeriesError::BadWindow { got: l, max: MAX_WINDOW });
    }
    if l > orbit.len() {
        return Err(SeriesError::WindowTooLong { window: l, len: orbit.len() });
    }
    for (offset, w) in orbit.windows(l).enumerate() {
        for i in 0..l {
            for j in (i + 1)..l {
                if w[i] == w[j] {
                    return Err(SeriesError::DuplicatePoints {
                        i: offset + i,
                        j: offset + j,
                    });
                }
            }
        }
    }
    let mut counts: BTreeMap<Pattern, u64> = BTreeMap::new();
    for w in orbit.windows(l) {
        let mut idx: Vec<usize> = (0..l).collect();
        idx.sort_by(|&a, &b| {
            let ka = (&w[a].1, &w[a].0);
            let kb = (&w[b].1, &w[b].0);
            ka.cmp(&kb)
        });
        let p = Pattern::from_slice(&idx).expect("indices form a permutation");
        *counts.entry(p).or_insert(0) += 1;
    }
    let total = (orbit.len() - l + 1) as u64;
    Ok(finish_report(l, counts, 0, total))
}

// ---------------------------------------------------------------------------
// generators
// ---------------------------------------------------------------------------

const STOCHASTIC_TOLERANCE: f64 = 1e-12;

fn check_probability_vector(p: &[f64]) -> Result<(), SeriesError> {
    if p.is_empty() || p.iter().any(|&x| !(x > 0.0)) {
        return Err(SeriesError::BadStochasticVector(format!("{p:?}")));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > STOCHASTIC_TOLERANCE {
        return Err(SeriesError::BadStochasticVector(format!(
            "entries sum to {sum}, expected 1"
        )));
    }
    Ok(())
}

fn sample_index(p: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, &w) in p.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    p.len() - 1
}

/// I.i.d. symbols with law `p`; stream 0 of `seed`.
pub fn bernoulli_word(p: &[f64], n: usize, seed: u64) -> Result<Vec<u8>, SeriesError> {
    check_probability_vector(p)?;
    let mut rng = Xoshiro256PlusPlus::stream(seed, 0);
    Ok((0..n)
        .map(|_| sample_index(p, rng.next_f64()) as u8)
        .collect())
}

/// Markov chain started from the stationary vector `p` with row-stochastic
/// transition matrix `rows`; requires `Σ_i p_i p_ij = p_j` within 1e-12.
pub fn markov_word(
    p: &[f64],
    rows: &[Vec<f64>],
    n: usize,
    seed: u64,
) -> Result<Vec<u8>, SeriesError> {
    check_probability_vector(p)?;
    if rows.len() != p.len() {
        return Err(SeriesError::BadStochasticVector(format!(
            "{} rows for {} states",
            rows.len(),
            p.len()
        )));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != p.len() || row.iter().any(|&x| x < 0.0) {
            return Err(SeriesError::BadStochasticVector(format!("row {i}: {row:?}")));
        }
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > STOCHASTIC_TOLERANCE {
            return Err(SeriesError::BadStochasticVector(format!(
                "row {i} sums to {sum}"
            )));
        }
    }
    for j in 0..p.len() {
        let flow: f64 = (0..p.len()).map(|i| p[i] * rows[i][j]).sum();
        if (flow - p[j]).abs() > STOCHASTIC_TOLERANCE {
            return Err(SeriesError::NonStationary(format!(
                "state {j}: inflow {flow} differs from p[{j}] = {}",
                p[j]
            )));
        }
    }
    let mut rng = Xoshiro256PlusPlus::stream(seed, 0);
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return Ok(out);
    }
    let mut state = sample_index(p, rng.next_f64());
    out.push(state as u8);
    for _ in 1..n {
        state = sample_index(&rows[state], rng.next_f64());
        out.push(state as u8);
    }
    Ok(out)
}

/// Maps with a fixed binary64 evaluation rule for float orbits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapKind {
    Tent,
    Logistic,
    Sawtooth(u8),
}

impl MapKind {
    fn eval(&self, x: f64) -> f64 {
        match self {
            MapKind::Tent => {
                if x < 0.5 {
                    2.0 * x
                } else {
                    2.0 - 2.0 * x
                }
            }
            MapKind::Logistic => 4.0 * x * (1.0 - x),
            MapKind::Sawtooth(n) => {
                let y = *n as f64 * x;
                y - y.floor()
            }
        }
    }
}

/// Binary64 orbit of a one-dimensional map; deterministic in `(map, x0, n)`.
pub fn map_orbit(map: MapKind, x0: f64, n: usize) -> Result<Series, SeriesError> {
    if !(0.0..=1.0).contains(&x0) {
        return Err(SeriesError::OutsideDomain(x0.to_string()));
    }
    let mut values = Vec::with_capacity(n.max(1));
    let mut x = x0;
    for _ in 0..n.max(1) {
        values.push(x);
        x = map.eval(x);
    }
    Series::new(values)
}

/// Exact rational orbit of the baker's map of the unit square.
pub fn baker_orbit(
    x0: &Rational,
    y0: &Rational,
    n: usize,
) -> Result<Vec<(Rational, Rational)>, SeriesError> {
    let in_unit = |v: &Rational| *v >= Rational::zero() && *v <= Rational::one();
    if !in_unit(x0) || !in_unit(y0) {
        return Err(SeriesError::OutsideDomain(format!("({x0}, {y0})")));
    }
    let half = rat(1, 2);
    let mut out = Vec::with_capacity(n);
    let mut x = x0.clone();
    let mut y = y0.clone();
    for _ in 0..n {
        out.push((x.clone(), y.clone()));
        if x < half {
            x = rat(2, 1) * &x;
            y = &y / rat(2, 1);
        } else {
            x = rat(2, 1) * &x - Rational::one();
            y = (&y + Rational::one()) / rat(2, 1);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// null model and determinism report
// ---------------------------------------------------------------------------

/// Empirical distribution of the missing-pattern count over i.i.d. uniform
/// series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NullDistribution {
    pub series_length: usize,
    pub window: usize,
    pub trials: u64,
    /// missing-pattern count -> number of trials observing it
    pub histogram: BTreeMap<u64, u64>,
    pub mean: f64,
}

/// Runs `trials` independent i.i.d.-uniform series of length `n` and records
/// each trial's missing-pattern count. Trial `k` uses stream `k` of `seed`,
/// so results do not depend on scheduling.
pub fn null_missing_distribution(
    n: usize,
    l: usize,
    trials: usize,
    seed: u64,
) -> Result<NullDistribution, SeriesError> {
    if trials == 0 {
        return Err(SeriesError::NoTrials);
    }
    if !(2..=MAX_WINDOW).contains(&l) {
        return Err(SeriesError::BadWindow { got: l, max: MAX_WINDOW });
    }
    if l > n {
        return Err(SeriesError::WindowTooLong { window: l, len: n });
    }
    let missing: Vec<u64> = (0..trials as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = Xoshiro256PlusPlus::stream(seed, k);
            let values: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();
            let series = Series::new(values).expect("uniform draws are finite");
            ordinal_census(&series, l).map(|r| r.missing_count)
        })
        .collect::<Result<_, _>>()?;
    let mut histogram: BTreeMap<u64, u64> = BTreeMap::new();
    for &m in &missing {
        *histogram.entry(m).or_insert(0) += 1;
    }
    let mean = missing.iter().sum::<u64>() as f64 / trials as f64;
    Ok(NullDistribution {
        series_length: n,
        window: l,
        trials: trials as u64,
        histogram,
        mean,
    })
}

/// Missing-pattern evidence for determinism, against the i.i.d. uniform null.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeterminismReport {
    pub window: usize,
    pub observed_missing: u64,
    /// Missing patterns of the observed series (when the window is short).
    pub missing: Vec<Pattern>,
    pub tie_windows: u64,
    /// Fraction of null trials with at least as many missing patterns.
    pub exceedance_fraction: f64,
    pub null: NullDistribution,
    pub warning: Option<String>,
    /// Always set: this statistic is heuristic evidence, not a calibrated
    /// significance level.
    pub note: &'static str,
}

pub const DETERMINISM_NOTE: &str =
    "heuristic: exceedance fraction against an i.i.d. uniform null, not a calibrated p-value";

pub fn determinism_report(
    s: &Series,
    l: usize,
    trials: usize,
    seed: u64,
) -> Result<DeterminismReport, SeriesError> {
    let report = ordinal_census(s, l)?;
    let null = null_missing_distribution(s.len(), l, trials, seed)?;
    let exceed = null
        .histogram
        .iter()
        .filter(|(&m, _)| m >= report.missing_count)
        .map(|(_, &c)| c)
        .sum::<u64>() as f64
        / null.trials as f64;
    let warning = if s.len() == l {
        Some("series has a single window; the report is degenerate".to_string())
    } else {
        None
    };
    Ok(DeterminismReport {
        window: l,
        observed_missing: report.missing_count,
        missing: report.missing,
        tie_windows: report.tie_windows,
        exceedance_fraction: exceed,
        null,
        warning,
        note: DETERMINISM_NOTE,
    })
}
