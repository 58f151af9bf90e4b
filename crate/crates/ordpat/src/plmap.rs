//! Exact rational arithmetic for piecewise-affine self-maps of `[0,1]`.
//!
//! The census engine enumerates order patterns exactly: the pattern of an
//! orbit `x, f(x), ..., f^{L-1}(x)` is constant between consecutive
//! *critical points* (breakpoints of the iterates and crossings of pairs of
//! iterates), so evaluating one midpoint per cell and merging equal
//! neighbours yields every realizing set `P_π` as an exact union of open
//! rational intervals. No sampling error is possible.
//!
//! The logistic map `4x(1-x)` is rational-closed and supported for point
//! orbits; census-level work goes through the tent map, whose crossings are
//! rational, and endpoints are carried to the logistic side through the
//! conjugacy `φ(x) = sin²(πx/2)` in binary64 (documented tolerance 1e-12).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::perm::{all_patterns, pattern_of_values, Pattern, PatternError};
use crate::shift::SymbolSequence;

pub type Rational = num_rational::BigRational;

/// Convenience constructor for small rationals.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlError {
    #[error("unknown builtin map {0:?}")]
    UnknownName(String),
    #[error("sawtooth map needs at least 2 symbols, got {0}")]
    BadSymbolCount(u32),
    #[error("invalid piecewise map: {0}")]
    InvalidMap(String),
    #[error("piece count {pieces} exceeds the cap {cap}")]
    CapExceeded { pieces: usize, cap: usize },
    #[error("orbit values at iterates {i} and {j} coincide (periodic point)")]
    PeriodicCollision { i: usize, j: usize },
    #[error("iterates {i} and {j} coincide on a whole interval; patterns are undefined there")]
    DegenerateIterates { i: usize, j: usize },
    #[error("census length must be between 2 and {max}, got {got}")]
    BadCensusLength { got: usize, max: usize },
    #[error("point {0} outside the domain [0,1]")]
    OutsideDomain(String),
    #[error("sequence lies in the excluded set (tail of maximal symbols); no value assigned")]
    ExcludedPoint,
    #[error("invalid thresholds: {0}")]
    InvalidThresholds(String),
    #[error("conjugacy expects a census of the {expected} map, got {got:?}")]
    WrongSourceMap { expected: &'static str, got: String },
    #[error("bad rational literal {0:?}")]
    BadRational(String),
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// One affine piece `x -> slope*x + intercept`.
#[derive(Debug, Clone, PartialEq)]
pub struct Affine {
    pub slope: Rational,
    pub intercept: Rational,
}

impl Affine {
    pub fn eval(&self, x: &Rational) -> Rational {
        &self.slope * x + &self.intercept
    }
}

/// A piecewise-affine self-map of `[0,1]` with exact rational breakpoints.
///
/// Piece `i` owns the half-open cell `[c_i, c_{i+1})`; the last piece also
/// owns `x = 1`. Every slope is nonzero (piecewise monotone).
#[derive(Debug, Clone, PartialEq)]
pub struct PlMap {
    breaks: Vec<Rational>,
    pieces: Vec<Affine>,
}

/// Default cap on the piece count of computed iterates.
pub const DEFAULT_PIECE_CAP: usize = 1_000_000;

/// Largest census length for which the forbidden complement (a subset of
/// `S_L`) is materialized.
pub const MAX_CENSUS_LEN: usize = 9;

impl PlMap {
    pub fn new(breaks: Vec<Rational>, pieces: Vec<Affine>) -> Result<Self, PlError> {
        if breaks.len() != pieces.len() + 1 || pieces.is_empty() {
            return Err(PlError::InvalidMap(format!(
                "{} breakpoints with {} pieces",
                breaks.len(),
                pieces.len()
            )));
        }
        if breaks[0] != Rational::zero() || breaks[breaks.len() - 1] != Rational::one() {
            return Err(PlError::InvalidMap(
                "breakpoints must start at 0 and end at 1".into(),
            ));
        }
        if breaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(PlError::InvalidMap(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        for (i, p) in pieces.iter().enumerate() {
            if p.slope.is_zero() {
                return Err(PlError::InvalidMap(format!("piece {i} has zero slope")));
            }
            for x in [&breaks[i], &breaks[i + 1]] {
                let v = p.eval(x);
                if v < Rational::zero() || v > Rational::one() {
                    return Err(PlError::InvalidMap(format!(
                        "piece {i} leaves [0,1] at its endpoint (value {v})"
                    )));
                }
            }
        }
        Ok(PlMap { breaks, pieces })
    }

    /// The tent map: `2x` on `[0,1/2)`, `2-2x` on `[1/2,1]`.
    pub fn tent() -> PlMap {
        PlMap {
            breaks: vec![rat(0, 1), rat(1, 2), rat(1, 1)],
            pieces: vec![
                Affine { slope: rat(2, 1), intercept: rat(0, 1) },
                Affine { slope: rat(-2, 1), intercept: rat(2, 1) },
            ],
        }
    }

    /// The sawtooth map `x -> Nx mod 1` with `n` full branches.
    ///
    /// Under the cell-ownership convention the point `x = 1` is fixed,
    /// matching the conjugated shift (the all-maximal digit sequence is a
    /// fixed point), rather than the bare `mod 1` formula.
    pub fn sawtooth(n: u32) -> Result<PlMap, PlError> {
        if n < 2 {
            return Err(PlError::BadSymbolCount(n));
        }
        let breaks = (0..=n).map(|i| rat(i as i64, n as i64)).collect();
        let pieces = (0..n)
            .map(|i| Affine {
                slope: rat(n as i64, 1),
                intercept: rat(-(i as i64), 1),
            })
            .collect();
        Ok(PlMap { breaks, pieces })
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breaks
    }

    pub fn pieces(&self) -> &[Affine] {
        &self.pieces
    }

    pub fn piece_count(&self) -> usize {
        self.pieces.len()
    }

    /// Index of the piece owning `x`.
    fn piece_index(&self, x: &Rational) -> usize {
        let idx = match self.breaks.binary_search(x) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        idx.min(self.pieces.len() - 1)
    }

    pub fn eval(&self, x: &Rational) -> Result<Rational, PlError> {
        if *x < Rational::zero() || *x > Rational::one() {
            return Err(PlError::OutsideDomain(x.to_string()));
        }
        Ok(self.pieces[self.piece_index(x)].eval(x))
    }
}

/// Builtin map lookup for the command-line surface.
pub fn builtin_map(name: &str, n: Option<u32>) -> Result<PlMap, PlError> {
    match name {
        "tent" => Ok(PlMap::tent()),
        "sawtooth" => PlMap::sawtooth(n.unwrap_or(2)),
        other => Err(PlError::UnknownName(other.to_string())),
    }
}

/// Exact `k`-fold composition of `f` with itself; `k = 0` is the identity.
pub fn iterate(f: &PlMap, k: usize) -> Result<PlMap, PlError> {
    iterate_with_cap(f, k, DEFAULT_PIECE_CAP)
}

pub fn iterate_with_cap(f: &PlMap, k: usize, cap: usize) -> Result<PlMap, PlError> {
    let mut cur = PlMap {
        breaks: vec![rat(0, 1), rat(1, 1)],
        pieces: vec![Affine { slope: rat(1, 1), intercept: rat(0, 1) }],
    };
    for _ in 0..k {
        cur = compose(f, &cur, cap)?;
    }
    Ok(cur)
}

/// `outer ∘ inner`, exact. Piece functions are valid on the interior of each
/// cell and at left endpoints; when the outer map is discontinuous at a value
/// hit by a decreasing inner piece's left endpoint, that single point may
/// disagree with the pointwise composition. Census evaluation only samples
/// cell interiors, so the convention never affects results.
fn compose(outer: &PlMap, inner: &PlMap, cap: usize) -> Result<PlMap, PlError> {
    let mut cuts: Vec<Rational> = inner.breaks.clone();
    for (i, piece) in inner.pieces.iter().enumerate() {
        let (a, b) = (&inner.breaks[i], &inner.breaks[i + 1]);
        for c in &outer.breaks {
            let x = (c - &piece.intercept) / &piece.slope;
            if x > *a && x < *b {
                cuts.push(x);
            }
        }
    }
    cuts.sort();
    cuts.dedup();
    if cuts.len() - 1 > cap {
        return Err(PlError::CapExceeded { pieces: cuts.len() - 1, cap });
    }
    let two = rat(2, 1);
    let mut breaks: Vec<Rational> = Vec::with_capacity(cuts.len());
    let mut pieces: Vec<Affine> = Vec::with_capacity(cuts.len() - 1);
    for w in cuts.windows(2) {
        let mid = (&w[0] + &w[1]) / &two;
        let pin = &inner.pieces[inner.piece_index(&mid)];
        let value = pin.eval(&mid);
        let pout = &outer.pieces[outer.piece_index(&value)];
        let composed = Affine {
            slope: &pout.slope * &pin.slope,
            intercept: &pout.slope * &pin.intercept + &pout.intercept,
        };
        // compact cells that continue the same affine law
        if let Some(last) = pieces.last() {
            if *last == composed {
                continue;
            }
        }
        breaks.push(w[0].clone());
        pieces.push(composed);
    }
    breaks.push(cuts.last().unwrap().clone());
    Ok(PlMap { breaks, pieces })
}

/// A map with exact rational orbits: any [`PlMap`], or the logistic map
/// `4x(1-x)` (rational-closed, though not piecewise affine).
#[derive(Debug, Clone)]
pub enum RationalMap {
    Pl(PlMap),
    Logistic,
}

impl RationalMap {
    pub fn eval(&self, x: &Rational) -> Result<Rational, PlError> {
        match self {
            RationalMap::Pl(f) => f.eval(x),
            RationalMap::Logistic => {
                if *x < Rational::zero() || *x > Rational::one() {
                    return Err(PlError::OutsideDomain(x.to_string()));
                }
                Ok(rat(4, 1) * x * (Rational::one() - x))
            }
        }
    }
}

/// The exact orbit `x, f(x), ..., f^{n-1}(x)`.
pub fn orbit(f: &RationalMap, x0: &Rational, n: usize) -> Result<Vec<Rational>, PlError> {
    let mut out = Vec::with_capacity(n);
    let mut x = x0.clone();
    for _ in 0..n {
        let next = f.eval(&x)?;
        out.push(x);
        x = next;
    }
    Ok(out)
}

/// Order pattern of the length-`l` orbit of `x`.
pub fn orbit_pattern_at(f: &RationalMap, x: &Rational, l: usize) -> Result<Pattern, PlError> {
    let orb = orbit(f, x, l)?;
    pattern_of_values(&orb).map_err(|e| match e {
        PatternError::DuplicateValues { i, j } => PlError::PeriodicCollision { i, j },
        other => PlError::Pattern(other),
    })
}

/// All breakpoints of `f^0, ..., f^{L-1}` plus every solution of
/// `f^i(x) = f^j(x)` on a common linearity cell, sorted and deduplicated.
/// The set may over-approximate (candidates on cell boundaries are kept);
/// over-refinement cannot change patterns on cells.
pub fn critical_points(f: &PlMap, l: usize) -> Result<Vec<Rational>, PlError> {
    if l < 2 {
        return Err(PlError::BadCensusLength { got: l, max: MAX_CENSUS_LEN });
    }
    let mut iterates = Vec::with_capacity(l);
    for k in 0..l {
        iterates.push(iterate(f, k)?);
    }
    let mut points: BTreeSet<Rational> = BTreeSet::new();
    for it in &iterates {
        points.extend(it.breaks.iter().cloned());
    }
    for i in 0..l {
        for j in (i + 1)..l {
            crossings(&iterates[i], &iterates[j], i, j, &mut points)?;
        }
    }
    Ok(points.into_iter().collect())
}

fn crossings(
    fi: &PlMap,
    fj: &PlMap,
    i: usize,
    j: usize,
    out: &mut BTreeSet<Rational>,
) -> Result<(), PlError> {
    let merged = merge_breaks(&fi.breaks, &fj.breaks);
    let mut pi = 0usize;
    let mut pj = 0usize;
    for w in merged.windows(2) {
        let (u, v) = (&w[0], &w[1]);
        while pi + 2 < fi.breaks.len() && fi.breaks[pi + 1] <= *u {
            pi += 1;
        }
        while pj + 2 < fj.breaks.len() && fj.breaks[pj + 1] <= *u {
            pj += 1;
        }
        let a = &fi.pieces[pi];
        let b = &fj.pieces[pj];
        if a.slope == b.slope {
            if a.intercept == b.intercept {
                return Err(PlError::DegenerateIterates { i, j });
            }
            continue;
        }
        let x = (&b.intercept - &a.intercept) / (&a.slope - &b.slope);
        if x >= *u && x <= *v {
            out.insert(x);
        }
    }
    Ok(())
}

fn merge_breaks(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut ia, mut ib) = (0, 0);
    while ia < a.len() || ib < b.len() {
        let next = if ib == b.len() || (ia < a.len() && a[ia] <= b[ib]) {
            ia += 1;
            &a[ia - 1]
        } else {
            ib += 1;
            &b[ib - 1]
        };
        if out.last() != Some(next) {
            out.push(next.clone());
        }
    }
    out
}

/// A finite union of disjoint open rational intervals, sorted.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IntervalUnion {
    intervals: Vec<(Rational, Rational)>,
}

impl IntervalUnion {
    /// Builds from sorted, pairwise-disjoint open intervals, merging
    /// intervals that share an endpoint.
    pub fn from_sorted(intervals: Vec<(Rational, Rational)>) -> Self {
        let mut out: Vec<(Rational, Rational)> = Vec::new();
        for (a, b) in intervals {
            debug_assert!(a < b);
            match out.last_mut() {
                Some(last) if last.1 == a => last.1 = b,
                _ => out.push((a, b)),
            }
        }
        IntervalUnion { intervals: out }
    }

    pub fn intervals(&self) -> &[(Rational, Rational)] {
        &self.intervals
    }

    pub fn components(&self) -> usize {
        self.intervals.len()
    }

    pub fn total_length(&self) -> Rational {
        self.intervals
            .iter()
            .fold(Rational::zero(), |acc, (a, b)| acc + (b - a))
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.intervals.iter().any(|(a, b)| a < x && x < b)
    }
}

/// The full length-`L` order-pattern census of a map: every realized pattern
/// with its exact realizing set, and the forbidden complement of `S_L`.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternCensus {
    pub length: usize,
    pub map: String,
    pub allowed: BTreeMap<Pattern, IntervalUnion>,
    pub forbidden: Vec<Pattern>,
}

impl PatternCensus {
    pub fn is_allowed(&self, p: &Pattern) -> bool {
        self.allowed.contains_key(p)
    }

    pub fn allowed_count(&self) -> usize {
        self.allowed.len()
    }

    /// Exact total measure of all realizing sets.
    pub fn total_length(&self) -> Rational {
        self.allowed
            .values()
            .fold(Rational::zero(), |acc, u| acc + u.total_length())
    }
}

/// Exact order-pattern census of `f` at length `l`.
///
/// Evaluates the orbit pattern at the midpoint of every pair of consecutive
/// critical points and merges equal neighbours. A tie at a midpoint would
/// mean a missed critical point and is reported as an internal error.
pub fn enumerate_allowed(f: &PlMap, l: usize, label: &str) -> Result<PatternCensus, PlError> {
    if !(2..=MAX_CENSUS_LEN).contains(&l) {
        return Err(PlError::BadCensusLength { got: l, max: MAX_CENSUS_LEN });
    }
    let points = critical_points(f, l)?;
    let map = RationalMap::Pl(f.clone());
    let two = rat(2, 1);
    let cell_patterns: Vec<Pattern> = points
        .par_windows(2)
        .map(|w| {
            let mid = (&w[0] + &w[1]) / &two;
            orbit_pattern_at(&map, &mid, l).map_err(|e| match e {
                PlError::PeriodicCollision { i, j } => PlError::Internal(format!(
                    "midpoint of ({}, {}) has tied iterates {i} and {j}; \
                     critical point set incomplete",
                    w[0], w[1]
                )),
                other => other,
            })
        })
        .collect::<Result<_, _>>()?;

    let mut per_pattern: BTreeMap<Pattern, Vec<(Rational, Rational)>> = BTreeMap::new();
    let mut run_start = 0usize;
    for idx in 1..=cell_patterns.len() {
        if idx == cell_patterns.len() || cell_patterns[idx] != cell_patterns[run_start] {
            per_pattern
                .entry(cell_patterns[run_start].clone())
                .or_default()
                .push((points[run_start].clone(), points[idx].clone()));
            run_start = idx;
        }
    }
    let allowed: BTreeMap<Pattern, IntervalUnion> = per_pattern
        .into_iter()
        .map(|(p, ivs)| (p, IntervalUnion::from_sorted(ivs)))
        .collect();
    let forbidden: Vec<Pattern> = all_patterns(l)
        .filter(|p| !allowed.contains_key(p))
        .collect();
    Ok(PatternCensus {
        length: l,
        map: label.to_string(),
        allowed,
        forbidden,
    })
}

/// Allowed-pattern count without materializing the forbidden complement.
fn allowed_count(f: &PlMap, l: usize) -> Result<u64, PlError> {
    let points = critical_points(f, l)?;
    let map = RationalMap::Pl(f.clone());
    let two = rat(2, 1);
    let patterns: BTreeSet<Pattern> = points
        .par_windows(2)
        .map(|w| {
            let mid = (&w[0] + &w[1]) / &two;
            orbit_pattern_at(&map, &mid, l)
        })
        .collect::<Result<_, _>>()?;
    Ok(patterns.len() as u64)
}

/// Allowed-pattern counts for `L = 2..=lmax` and successive log-count
/// differences (empirical growth-rate estimates; no convergence claim).
#[derive(Debug, Clone, Serialize)]
pub struct GrowthProfile {
    pub lengths: Vec<usize>,
    pub counts: Vec<u64>,
    pub log_ratios: Vec<f64>,
}

pub fn growth_profile(f: &PlMap, lmax: usize) -> Result<GrowthProfile, PlError> {
    if lmax < 2 {
        return Err(PlError::BadCensusLength { got: lmax, max: MAX_CENSUS_LEN });
    }
    let lengths: Vec<usize> = (2..=lmax).collect();
    let counts: Vec<u64> = lengths
        .iter()
        .map(|&l| allowed_count(f, l))
        .collect::<Result<_, _>>()?;
    let log_ratios = counts
        .windows(2)
        .map(|w| (w[1] as f64).ln() - (w[0] as f64).ln())
        .collect();
    Ok(GrowthProfile { lengths, counts, log_ratios })
}

/// Comparison tolerance documented for conjugated (logistic-side) endpoints.
pub const CONJUGACY_TOLERANCE: f64 = 1e-12;

/// The order-preserving conjugacy from the tent map to the logistic map.
pub fn phi_tent_to_logistic(x: &Rational) -> f64 {
    let xf = x.to_f64().expect("endpoint in [0,1] converts to f64");
    (std::f64::consts::FRAC_PI_2 * xf).sin().powi(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConjugacyDirection {
    TentToLogistic,
}

/// A census with endpoints pushed through a non-rational conjugacy; pattern
/// sets are unchanged, endpoints are binary64 within [`CONJUGACY_TOLERANCE`].
#[derive(Debug, Clone, Serialize)]
pub struct ConjugatedCensus {
    pub length: usize,
    pub map: String,
    pub allowed: Vec<(Pattern, Vec<(f64, f64)>)>,
    pub forbidden: Vec<Pattern>,
}

pub fn conjugate_endpoints(
    census: &PatternCensus,
    direction: ConjugacyDirection,
) -> Result<ConjugatedCensus, PlError> {
    match direction {
        ConjugacyDirection::TentToLogistic => {
            if census.map != "tent" {
                return Err(PlError::WrongSourceMap {
                    expected: "tent",
                    got: census.map.clone(),
                });
            }
            let allowed = census
                .allowed
                .iter()
                .map(|(p, u)| {
                    let ivs = u
                        .intervals()
                        .iter()
                        .map(|(a, b)| (phi_tent_to_logistic(a), phi_tent_to_logistic(b)))
                        .collect();
                    (p.clone(), ivs)
                })
                .collect();
            Ok(ConjugatedCensus {
                length: census.length,
                map: "logistic".to_string(),
                allowed,
                forbidden: census.forbidden.clone(),
            })
        }
    }
}

/// Symbolic coding of the orbit of `x` against threshold cells
/// `[t_i, t_{i+1})` (last cell closed at 1).
pub fn coding_word(
    f: &RationalMap,
    thresholds: &[Rational],
    x: &Rational,
    n: usize,
) -> Result<Vec<u8>, PlError> {
    if thresholds.len() < 2 {
        return Err(PlError::InvalidThresholds("need at least two thresholds".into()));
    }
    if thresholds[0] != Rational::zero() || *thresholds.last().unwrap() != Rational::one() {
        return Err(PlError::InvalidThresholds("thresholds must span [0,1]".into()));
    }
    if thresholds.windows(2).any(|w| w[0] >= w[1]) {
        return Err(PlError::InvalidThresholds("thresholds must be strictly increasing".into()));
    }
    let orb = orbit(f, x, n)?;
    Ok(orb
        .iter()
        .map(|v| {
            let idx = match thresholds.binary_search(v) {
                Ok(i) => i,
                Err(i) => i - 1,
            };
            idx.min(thresholds.len() - 2) as u8
        })
        .collect())
}

/// The value `Σ ω_n N^{-(n+1)}` of a digit sequence, exact.
///
/// Sequences ending in an infinite tail of the maximal symbol `N-1` are
/// excluded — including the constant maximal sequence, whose value 1 is
/// instead owned by the map convention (see [`PlMap::sawtooth`]).
pub fn psi_value(w: &SymbolSequence) -> Result<Rational, PlError> {
    if w.is_eventually_max() {
        return Err(PlError::ExcludedPoint);
    }
    let n = BigInt::from(w.alphabet_size());
    let mut pre_num = BigInt::zero();
    for &d in w.preperiod() {
        pre_num = &pre_num * &n + BigInt::from(d);
    }
    let m = w.preperiod().len();
    let mut per_num = BigInt::zero();
    for &d in w.period() {
        per_num = &per_num * &n + BigInt::from(d);
    }
    let p = w.period().len();
    let n_m = n.pow(m as u32);
    let n_p = n.pow(p as u32);
    // pre/N^m + per / (N^m (N^p - 1))
    let value = Rational::new(pre_num, n_m.clone())
        + Rational::new(per_num, n_m * (n_p - BigInt::one()));
    Ok(value)
}

/// Floor of a rational as a `BigInt`.
pub fn rational_floor(x: &Rational) -> BigInt {
    x.numer().div_floor(x.denom())
}

// ---------------------------------------------------------------------------
// serialization: exact "num/den" strings
// ---------------------------------------------------------------------------

pub fn rational_string(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn parse_rational(s: &str) -> Result<Rational, PlError> {
    let bad = || PlError::BadRational(s.to_string());
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AllowedEntryJson {
    pub pattern: Pattern,
    pub intervals: Vec<[String; 2]>,
}

/// Wire form of a census: rationals as exact `"num/den"` strings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CensusJson {
    pub length: usize,
    pub map: String,
    pub allowed: Vec<AllowedEntryJson>,
    pub forbidden: Vec<Pattern>,
}

impl PatternCensus {
    pub fn to_json(&self) -> CensusJson {
        CensusJson {
            length: self.length,
            map: self.map.clone(),
            allowed: self
                .allowed
                .iter()
                .map(|(p, u)| AllowedEntryJson {
                    pattern: p.clone(),
                    intervals: u
                        .intervals()
                        .iter()
                        .map(|(a, b)| [rational_string(a), rational_string(b)])
                        .collect(),
                })
                .collect(),
            forbidden: self.forbidden.clone(),
        }
    }

    pub fn from_json(j: &CensusJson) -> Result<PatternCensus, PlError> {
        let mut allowed = BTreeMap::new();
        for entry in &j.allowed {
            let ivs = entry
                .intervals
                .iter()
                .map(|[a, b]| Ok((parse_rational(a)?, parse_rational(b)?)))
                .collect::<Result<Vec<_>, PlError>>()?;
            allowed.insert(entry.pattern.clone(), IntervalUnion::from_sorted(ivs));
        }
        Ok(PatternCensus {
            length: j.length,
            map: j.map.clone(),
            allowed,
            forbidden: j.forbidden.clone(),
        })
    }

    /// CSV export: one `pattern,left,right` row per (pattern, interval).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("pattern,left,right\n");
        for (p, u) in &self.allowed {
            for (a, b) in u.intervals() {
                out.push_str(&format!(
                    "\"{}\",{},{}\n",
                    p,
                    rational_string(a),
                    rational_string(b)
                ));
            }
        }
        out
    }
}

impl fmt::Display for PatternCensus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "census of {} at length {}: {} allowed, {} forbidden",
            self.map,
            self.length,
            self.allowed.len(),
            self.forbidden.len()
        )?;
        for (p, u) in &self.allowed {
            let ivs: Vec<String> = u
                .intervals()
                .iter()
                .map(|(a, b)| format!("({}, {})", a, b))
                .collect();
            writeln!(f, "  {} on {}", p, ivs.join(" ∪ "))?;
        }
        if !self.forbidden.is_empty() {
            let fs: Vec<String> = self.forbidden.iter().map(|p| p.to_string()).collect();
            writeln!(f, "  forbidden: {}", fs.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pat(e: &[usize]) -> Pattern {
        Pattern::from_slice(e).unwrap()
    }

    #[test]
    fn builtin_shapes() {
        let t = PlMap::tent();
        assert_eq!(t.breakpoints(), &[rat(0, 1), rat(1, 2), rat(1, 1)]);
        assert_eq!(t.pieces()[0].slope, rat(2, 1));
        assert_eq!(t.pieces()[1].slope, rat(-2, 1));
        let s2 = PlMap::sawtooth(2).unwrap();
        assert_eq!(s2.pieces()[0].intercept, rat(0, 1));
        assert_eq!(s2.pieces()[1].intercept, rat(-1, 1));
        assert_eq!(s2.pieces()[1].slope, rat(2, 1));
        let s3 = PlMap::sawtooth(3).unwrap();
        assert_eq!(s3.eval(&rat(5, 9)).unwrap(), rat(2, 3));
        assert!(matches!(builtin_map("circle", None), Err(PlError::UnknownName(_))));
        assert!(PlMap::sawtooth(1).is_err());
    }

    #[test]
    fn rejects_bad_maps() {
        // off-domain image
        let r = PlMap::new(
            vec![rat(0, 1), rat(1, 1)],
            vec![Affine { slope: rat(3, 1), intercept: rat(0, 1) }],
        );
        assert!(matches!(r, Err(PlError::InvalidMap(_))));
        // zero slope
        let r = PlMap::new(
            vec![rat(0, 1), rat(1, 1)],
            vec![Affine { slope: rat(0, 1), intercept: rat(1, 2) }],
        );
        assert!(matches!(r, Err(PlError::InvalidMap(_))));
    }

    #[test]
    fn tent_second_iterate() {
        let t2 = iterate(&PlMap::tent(), 2).unwrap();
        assert_eq!(
            t2.breakpoints(),
            &[rat(0, 1), rat(1, 4), rat(1, 2), rat(3, 4), rat(1, 1)]
        );
        let slopes: Vec<Rational> = t2.pieces().iter().map(|p| p.slope.clone()).collect();
        assert_eq!(slopes, vec![rat(4, 1), rat(-4, 1), rat(4, 1), rat(-4, 1)]);
    }

    #[test]
    fn identity_iterate() {
        let t = PlMap::tent();
        let id = iterate(&t, 0).unwrap();
        assert_eq!(id.piece_count(), 1);
        assert_eq!(id.eval(&rat(3, 7)).unwrap(), rat(3, 7));
    }

    #[test]
    fn sawtooth_third_iterate() {
        let s = PlMap::sawtooth(2).unwrap();
        let s3 = iterate(&s, 3).unwrap();
        assert_eq!(s3.piece_count(), 8);
        assert!(s3.pieces().iter().all(|p| p.slope == rat(8, 1)));
    }

    #[test]
    fn iterate_cap() {
        let s = PlMap::sawtooth(3).unwrap();
        assert!(matches!(
            iterate_with_cap(&s, 5, 100),
            Err(PlError::CapExceeded { .. })
        ));
    }

    #[test]
    fn orbit_patterns() {
        let log = RationalMap::Logistic;
        let p = orbit_pattern_at(&log, &rat(3, 10), 3).unwrap();
        assert_eq!(p, pat(&[0, 2, 1]));
        let o = orbit(&log, &rat(3, 10), 3).unwrap();
        assert_eq!(o, vec![rat(3, 10), rat(21, 25), rat(336, 625)]);

        let s2 = RationalMap::Pl(PlMap::sawtooth(2).unwrap());
        assert_eq!(orbit_pattern_at(&s2, &rat(1, 5), 4).unwrap(), pat(&[0, 1, 3, 2]));

        let tent = RationalMap::Pl(PlMap::tent());
        assert_eq!(orbit_pattern_at(&tent, &rat(1, 2), 3).unwrap(), pat(&[2, 0, 1]));

        // fixed point of the sawtooth: collision
        assert!(matches!(
            orbit_pattern_at(&s2, &rat(0, 1), 2),
            Err(PlError::PeriodicCollision { .. })
        ));
    }

    #[test]
    fn tent_critical_points_l3() {
        let pts = critical_points(&PlMap::tent(), 3).unwrap();
        for expect in [rat(1, 4), rat(1, 2), rat(3, 4), rat(2, 5), rat(2, 3), rat(4, 5)] {
            assert!(pts.contains(&expect), "missing {expect}");
        }
        // always contains the breakpoints of the top iterate
        for b in iterate(&PlMap::tent(), 2).unwrap().breakpoints() {
            assert!(pts.contains(b));
        }
    }

    #[test]
    fn identity_is_degenerate() {
        let id = PlMap::new(
            vec![rat(0, 1), rat(1, 1)],
            vec![Affine { slope: rat(1, 1), intercept: rat(0, 1) }],
        )
        .unwrap();
        assert!(matches!(
            critical_points(&id, 2),
            Err(PlError::DegenerateIterates { i: 0, j: 1 })
        ));
    }

    #[test]
    fn tent_census_l3() {
        let c = enumerate_allowed(&PlMap::tent(), 3, "tent").unwrap();
        assert_eq!(c.allowed_count(), 5);
        assert_eq!(c.forbidden, vec![pat(&[2, 1, 0])]);
        let expect = [
            (pat(&[0, 1, 2]), (rat(0, 1), rat(1, 3))),
            (pat(&[0, 2, 1]), (rat(1, 3), rat(2, 5))),
            (pat(&[2, 0, 1]), (rat(2, 5), rat(2, 3))),
            (pat(&[1, 0, 2]), (rat(2, 3), rat(4, 5))),
            (pat(&[1, 2, 0]), (rat(4, 5), rat(1, 1))),
        ];
        for (p, iv) in expect {
            let u = &c.allowed[&p];
            assert_eq!(u.intervals(), &[iv], "interval of {p}");
        }
        assert_eq!(c.total_length(), Rational::one());
    }

    #[test]
    fn sawtooth2_census_l3_all_allowed() {
        let c = enumerate_allowed(&PlMap::sawtooth(2).unwrap(), 3, "sawtooth2").unwrap();
        assert_eq!(c.allowed_count(), 6);
        assert!(c.forbidden.is_empty());
        assert_eq!(c.total_length(), Rational::one());
    }

    #[test]
    fn growth_profile_counts() {
        let g = growth_profile(&PlMap::tent(), 4).unwrap();
        assert_eq!(g.counts, vec![2, 5, 12]);
        let g = growth_profile(&PlMap::sawtooth(2).unwrap(), 3).unwrap();
        assert_eq!(g.counts, vec![2, 6]);
        let g = growth_profile(&PlMap::sawtooth(3).unwrap(), 4).unwrap();
        assert_eq!(g.counts, vec![2, 6, 24]);
    }

    #[test]
    fn conjugacy_endpoints() {
        let c = enumerate_allowed(&PlMap::tent(), 3, "tent").unwrap();
        let cc = conjugate_endpoints(&c, ConjugacyDirection::TentToLogistic).unwrap();
        assert_eq!(cc.forbidden, c.forbidden);
        let sqrt5 = 5f64.sqrt();
        let expected = [
            (0.0, 0.25),
            (0.25, (5.0 - sqrt5) / 8.0),
            ((5.0 - sqrt5) / 8.0, 0.75),
            (0.75, (5.0 + sqrt5) / 8.0),
            ((5.0 + sqrt5) / 8.0, 1.0),
        ];
        let order = [
            pat(&[0, 1, 2]),
            pat(&[0, 2, 1]),
            pat(&[2, 0, 1]),
            pat(&[1, 0, 2]),
            pat(&[1, 2, 0]),
        ];
        for (p, (lo, hi)) in order.iter().zip(expected) {
            let row = cc.allowed.iter().find(|(q, _)| q == p).unwrap();
            let (a, b) = row.1[0];
            assert!((a - lo).abs() < CONJUGACY_TOLERANCE, "{p} left: {a} vs {lo}");
            assert!((b - hi).abs() < CONJUGACY_TOLERANCE, "{p} right: {b} vs {hi}");
        }
        // phi(2/3) = 3/4 in closed form
        assert!((phi_tent_to_logistic(&rat(2, 3)) - 0.75).abs() < CONJUGACY_TOLERANCE);
        // wrong source map rejected
        let s = enumerate_allowed(&PlMap::sawtooth(2).unwrap(), 3, "sawtooth2").unwrap();
        assert!(conjugate_endpoints(&s, ConjugacyDirection::TentToLogistic).is_err());
    }

    #[test]
    fn coding_words_for_logistic() {
        let log = RationalMap::Logistic;
        let half = [rat(0, 1), rat(1, 2), rat(1, 1)];
        assert_eq!(coding_word(&log, &half, &rat(1, 4), 5).unwrap(), vec![0, 1, 1, 1, 1]);
        assert_eq!(coding_word(&log, &half, &rat(1, 2), 4).unwrap(), vec![1, 1, 0, 0]);
        assert_eq!(coding_word(&log, &half, &rat(3, 4), 3).unwrap(), vec![1, 1, 1]);
        assert!(coding_word(&log, &[rat(0, 1)], &rat(1, 2), 1).is_err());
    }

    #[test]
    fn psi_values() {
        let w = SymbolSequence::new(2, vec![1], vec![0]).unwrap();
        assert_eq!(psi_value(&w).unwrap(), rat(1, 2));
        let w = SymbolSequence::new(2, vec![], vec![0, 1]).unwrap();
        assert_eq!(psi_value(&w).unwrap(), rat(1, 3));
        let excluded = SymbolSequence::new(2, vec![0], vec![1]).unwrap();
        assert!(matches!(psi_value(&excluded), Err(PlError::ExcludedPoint)));
        let constant_max = SymbolSequence::new(2, vec![], vec![1]).unwrap();
        assert!(matches!(psi_value(&constant_max), Err(PlError::ExcludedPoint)));
    }

    #[test]
    fn census_json_roundtrip() {
        let c = enumerate_allowed(&PlMap::tent(), 3, "tent").unwrap();
        let j = c.to_json();
        let text = serde_json::to_string(&j).unwrap();
        let back: CensusJson = serde_json::from_str(&text).unwrap();
        let c2 = PatternCensus::from_json(&back).unwrap();
        assert_eq!(c, c2);
        assert!(c.to_csv().lines().count() == 6); // header + 5 intervals
    }

    #[test]
    fn rational_literals() {
        assert_eq!(parse_rational("2/3").unwrap(), rat(2, 3));
        assert_eq!(parse_rational("5").unwrap(), rat(5, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(rational_string(&rat(1, 3)), "1/3");
        assert_eq!(rational_string(&rat(0, 1)), "0/1");
    }
}
