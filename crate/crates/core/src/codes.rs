//! Covering codes for permutation spaces.
//!
//! Three sources of codes live here, in descending order of scale:
//!
//! * A block construction for the Chebyshev metric with covering radius
//!   exactly `d` at any `n`, with `O(1)` size formula and lazy codeword
//!   streaming.
//! * A deterministic greedy cover for either metric (max new coverage,
//!   ties to the lexicographically smallest center), which lands within
//!   the Stein-Lovasz guarantee.
//! * Exact minimal covers by branch and bound at toy sizes, for both the
//!   worst-case and the average-distortion objectives; these are the
//!   ground truth the bounds are tested against.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_rational::{BigRational, Rational64};
use num_traits::{One, ToPrimitive, Zero};

use crate::ball::sphere_histogram_brute_force_capped;
use crate::error::{Error, Result};
use crate::numutil::{big_ratio, factorial};
use crate::perm::{
    enumerate_permutations_capped, lex_cmp, IndexSet, Metric, Permutation,
};

/// Full-scan covering radius / average distortion stop above this `n`.
pub const COVER_ORACLE_CAP: usize = 9;

/// Greedy holds an all-pairs distance matrix; 7! is where that stops
/// being a reasonable ask (5040^2 entries).
pub const GREEDY_CAP: usize = 7;

/// Exact minimal covers search S_n as 128-bit sets; 5! = 120 is the limit.
pub const EXACT_COVER_CAP: usize = 5;

/// Refuse to materialize codes larger than this.
pub const MATERIALIZE_CAP: u64 = 10_000_000;

/// The value blocks `A_i = {i(d+1)+1, ..., (i+1)(d+1)} ∩ [n]` underlying
/// the block code: a codeword is any permutation in which each block's
/// values appear in ascending position order.
#[derive(Clone, Debug)]
pub struct BlockStructure {
    n: usize,
    d: u64,
}

impl BlockStructure {
    pub fn new(n: usize, d: u64) -> Result<Self> {
        if n < 2 || d < 1 || d > n as u64 - 1 {
            return Err(Error::Domain(format!(
                "block construction needs 1 <= d <= n-1, got n = {n}, d = {d}"
            )));
        }
        Ok(BlockStructure { n, d })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    fn width(&self) -> usize {
        self.d as usize + 1
    }

    pub fn num_blocks(&self) -> usize {
        (self.n + self.width() - 1) / self.width()
    }

    /// Index of the block owning a one-indexed value.
    pub fn block_of(&self, value: u32) -> usize {
        (value as usize - 1) / self.width()
    }

    /// The blocks as one-indexed value sets (the last may be short).
    pub fn blocks(&self) -> Vec<IndexSet> {
        (0..self.num_blocks())
            .map(|i| {
                let lo = i * self.width() + 1;
                let hi = ((i + 1) * self.width()).min(self.n);
                IndexSet::new(self.n, &(lo as u32..=hi as u32).collect::<Vec<_>>()).unwrap()
            })
            .collect()
    }

    pub fn size(&self) -> BigUint {
        construction_size(self.n, self.d)
    }
}

/// `n! / ((d+1)!^floor(n/(d+1)) * (n mod (d+1))!)`.
pub fn construction_size(n: usize, d: u64) -> BigUint {
    let w = d as usize + 1;
    let mut denom = factorial(w).pow((n / w) as u32);
    denom *= factorial(n % w);
    factorial(n) / denom
}

/// Does each block's value set appear in ascending order?
pub fn is_codeword(p: &Permutation, bs: &BlockStructure) -> bool {
    if p.len() != bs.n {
        return false;
    }
    let mut last = vec![0u32; bs.num_blocks()];
    for v in p.one_line() {
        let b = bs.block_of(v);
        if last[b] > v {
            return false;
        }
        last[b] = v;
    }
    true
}

/// Nearest-codeword map: sort each block's values into the positions they
/// already occupy.  The result is a codeword within Chebyshev distance
/// `d` of the input, because a position keeps a value from the same
/// block of `d+1` consecutive integers.
pub fn project_to_codeword(p: &Permutation, bs: &BlockStructure) -> Result<Permutation> {
    if p.len() != bs.n {
        return Err(Error::LengthMismatch {
            left: p.len(),
            right: bs.n,
        });
    }
    let line = p.one_line();
    let mut positions: Vec<Vec<u32>> = vec![Vec::new(); bs.num_blocks()];
    for (i, &v) in line.iter().enumerate() {
        positions[bs.block_of(v)].push(i as u32);
    }
    let mut out = vec![0u32; bs.n];
    for (b, pos) in positions.iter().enumerate() {
        let first_value = (b * bs.width() + 1) as u32;
        for (k, &i) in pos.iter().enumerate() {
            out[i as usize] = first_value + k as u32;
        }
    }
    let result = Permutation::from_one_line(&out)?;
    assert!(is_codeword(&result, bs));
    assert!(crate::perm::chebyshev_distance(p, &result)? <= bs.d);
    Ok(result)
}

/// Streams the block code in lexicographic order, starting at the
/// identity.  Codewords correspond to arrangements of block labels over
/// positions, stepped by next-multiset-permutation.
pub struct CodewordStream {
    bs: BlockStructure,
    labels: Option<Vec<u32>>,
}

impl Iterator for CodewordStream {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let labels = self.labels.as_mut()?;
        let word = labels_to_codeword(labels, &self.bs);
        if !next_multiset_permutation(labels) {
            self.labels = None;
        }
        Some(word)
    }
}

fn labels_to_codeword(labels: &[u32], bs: &BlockStructure) -> Permutation {
    let mut next_value: Vec<u32> = (0..bs.num_blocks())
        .map(|b| (b * bs.width() + 1) as u32)
        .collect();
    let image: Vec<u32> = labels
        .iter()
        .map(|&b| {
            let v = next_value[b as usize];
            next_value[b as usize] += 1;
            v
        })
        .collect();
    Permutation::from_one_line(&image).unwrap()
}

fn next_multiset_permutation(a: &mut [u32]) -> bool {
    let n = a.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

pub fn construction_codewords(bs: &BlockStructure) -> CodewordStream {
    let mut labels = Vec::with_capacity(bs.n);
    for b in 0..bs.num_blocks() {
        let lo = b * bs.width();
        let hi = ((b + 1) * bs.width()).min(bs.n);
        labels.extend(std::iter::repeat(b as u32).take(hi - lo));
    }
    CodewordStream {
        bs: bs.clone(),
        labels: Some(labels),
    }
}

/// Where a covering code came from; carried for reporting.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Provenance {
    BlockConstruction,
    Greedy,
    ExactWorst,
    ExactAverage,
    Explicit,
}

impl Provenance {
    pub fn name(self) -> &'static str {
        match self {
            Provenance::BlockConstruction => "block-construction",
            Provenance::Greedy => "greedy",
            Provenance::ExactWorst => "exact-worst",
            Provenance::ExactAverage => "exact-average",
            Provenance::Explicit => "explicit",
        }
    }
}

impl std::str::FromStr for Provenance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "block-construction" => Ok(Provenance::BlockConstruction),
            "greedy" => Ok(Provenance::Greedy),
            "exact-worst" => Ok(Provenance::ExactWorst),
            "exact-average" => Ok(Provenance::ExactAverage),
            "explicit" => Ok(Provenance::Explicit),
            other => Err(Error::Parse(format!("unknown provenance {other:?}"))),
        }
    }
}

enum Words {
    Listed(Vec<Permutation>),
    Blocks(BlockStructure),
}

/// A code together with the distortion budget it claims to meet.
///
/// For `Listed` codes the claim is whatever produced them (greedy and the
/// exact oracles only emit verified covers); for the block construction
/// the claim is structural.
pub struct CoveringCode {
    pub metric: Metric,
    pub n: usize,
    /// Claimed worst-case distortion (for `ExactAverage`, the average).
    pub budget: u64,
    pub provenance: Provenance,
    words: Words,
}

impl CoveringCode {
    pub fn from_words(
        metric: Metric,
        n: usize,
        budget: u64,
        provenance: Provenance,
        words: Vec<Permutation>,
    ) -> Result<Self> {
        for w in &words {
            if w.len() != n {
                return Err(Error::LengthMismatch {
                    left: w.len(),
                    right: n,
                });
            }
        }
        if words.is_empty() {
            return Err(Error::Domain("empty code".into()));
        }
        let mut images: Vec<&Permutation> = words.iter().collect();
        images.sort_by(|a, b| lex_cmp(a, b));
        if images.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Domain("duplicate codeword".into()));
        }
        Ok(CoveringCode {
            metric,
            n,
            budget,
            provenance,
            words: Words::Listed(words),
        })
    }

    pub fn from_blocks(bs: BlockStructure) -> Self {
        CoveringCode {
            metric: Metric::Chebyshev,
            n: bs.n(),
            budget: bs.d(),
            provenance: Provenance::BlockConstruction,
            words: Words::Blocks(bs),
        }
    }

    pub fn block_structure(&self) -> Option<&BlockStructure> {
        match &self.words {
            Words::Blocks(bs) => Some(bs),
            Words::Listed(_) => None,
        }
    }

    pub fn size(&self) -> BigUint {
        match &self.words {
            Words::Listed(v) => BigUint::from(v.len()),
            Words::Blocks(bs) => bs.size(),
        }
    }

    pub fn iter(&self) -> Box<dyn Iterator<Item = Permutation> + '_> {
        match &self.words {
            Words::Listed(v) => Box::new(v.iter().cloned()),
            Words::Blocks(bs) => Box::new(construction_codewords(bs)),
        }
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        match &self.words {
            Words::Listed(v) => v.iter().any(|w| w == p),
            Words::Blocks(bs) => is_codeword(p, bs),
        }
    }

    pub fn materialize(&self, cap: u64) -> Result<Vec<Permutation>> {
        let size = self.size();
        if size > BigUint::from(cap) {
            return Err(Error::MaterializationCap { size, cap });
        }
        Ok(self.iter().collect())
    }
}

/// Exact covering radius by full scan (`n` within [`COVER_ORACLE_CAP`]),
/// except for the block construction, where the radius is certified at
/// any `n` in O(n): projecting any point moves it at most `d`, and no
/// codeword beats the projection at the reversal because every codeword's
/// final entry is some block's maximum, hence at least `d+1`.
pub fn covering_radius(code: &CoveringCode) -> Result<u64> {
    covering_radius_capped(code, COVER_ORACLE_CAP)
}

pub fn covering_radius_capped(code: &CoveringCode, cap: usize) -> Result<u64> {
    if let Words::Blocks(bs) = &code.words {
        return block_covering_radius(bs);
    }
    let n = code.n;
    if n > cap {
        return Err(Error::ScaleExceeded {
            what: "covering radius scan",
            n,
            cap,
        });
    }
    let words: Vec<Permutation> = code.iter().collect();
    let mut radius = 0u64;
    for p in enumerate_permutations_capped(n, cap)? {
        let mut best = u64::MAX;
        for w in &words {
            best = best.min(code.metric.distance(&p, w)?);
            if best <= radius {
                break;
            }
        }
        radius = radius.max(best);
    }
    Ok(radius)
}

fn block_covering_radius(bs: &BlockStructure) -> Result<u64> {
    let d = bs.d();
    let n = bs.n();
    // Projection moves every point at most d (asserted inside), so the
    // radius is at most d; the reversal shows it is no less.  A codeword's
    // value at the last position is the maximum of the block owning that
    // position, so against the reversal (which ends in 1) no codeword does
    // better there than the smallest block maximum minus one.
    let rev = Permutation::from_one_line(&(1..=n as u32).rev().collect::<Vec<_>>())?;
    let proj = project_to_codeword(&rev, bs)?;
    let at_reversal = crate::perm::chebyshev_distance(&rev, &proj)?;
    let min_block_max = bs
        .blocks()
        .iter()
        .map(|b| *b.one_indexed().last().unwrap() as u64)
        .min()
        .unwrap();
    if at_reversal > d || min_block_max - 1 < d {
        return Err(Error::Domain(format!(
            "block radius certificates disagree at n = {n}, d = {d}: \
             projection {at_reversal}, floor {}",
            min_block_max - 1
        )));
    }
    Ok(d)
}

/// Mean distance to the code over all of S_n, exact.
pub fn average_distortion(code: &CoveringCode) -> Result<BigRational> {
    average_distortion_capped(code, COVER_ORACLE_CAP)
}

pub fn average_distortion_capped(code: &CoveringCode, cap: usize) -> Result<BigRational> {
    let n = code.n;
    if n > cap {
        return Err(Error::ScaleExceeded {
            what: "average distortion scan",
            n,
            cap,
        });
    }
    let words: Vec<Permutation> = code.materialize(MATERIALIZE_CAP)?;
    let mut total = BigUint::zero();
    let mut count = 0u64;
    for p in enumerate_permutations_capped(n, cap)? {
        let mut best = u64::MAX;
        for w in &words {
            best = best.min(code.metric.distance(&p, w)?);
            if best == 0 {
                break;
            }
        }
        total += BigUint::from(best);
        count += 1;
    }
    Ok(big_ratio(total, BigUint::from(count)))
}

/// Greedy set-cover over S_n: repeatedly take the center covering the
/// most uncovered points, breaking ties toward the lexicographically
/// smallest center.  Deterministic; the first pick is always the
/// identity (all gains tie at `B(D)`).
pub fn greedy_cover(metric: Metric, n: usize, d: u64) -> Result<CoveringCode> {
    greedy_cover_capped(metric, n, d, GREEDY_CAP)
}

pub fn greedy_cover_capped(metric: Metric, n: usize, d: u64, cap: usize) -> Result<CoveringCode> {
    if n > cap {
        return Err(Error::ScaleExceeded {
            what: "greedy cover",
            n,
            cap,
        });
    }
    let perms: Vec<Permutation> = enumerate_permutations_capped(n, cap)?.collect();
    let m = perms.len();
    let mut dist = vec![0u8; m * m];
    for i in 0..m {
        for j in (i + 1)..m {
            let dd = metric.distance(&perms[i], &perms[j])? as u8;
            dist[i * m + j] = dd;
            dist[j * m + i] = dd;
        }
    }

    let mut uncovered: Vec<u32> = (0..m as u32).collect();
    let mut chosen: Vec<usize> = Vec::new();
    while !uncovered.is_empty() {
        let mut best_center = usize::MAX;
        let mut best_gain = 0usize;
        for c in 0..m {
            let row = &dist[c * m..(c + 1) * m];
            let gain = uncovered
                .iter()
                .filter(|&&u| row[u as usize] as u64 <= d)
                .count();
            if gain > best_gain {
                best_gain = gain;
                best_center = c;
            }
        }
        if best_center == usize::MAX {
            return Err(Error::Domain(format!(
                "no center makes progress at n = {n}, D = {d}"
            )));
        }
        let row = &dist[best_center * m..(best_center + 1) * m];
        uncovered.retain(|&u| row[u as usize] as u64 > d);
        chosen.push(best_center);
    }

    CoveringCode::from_words(
        metric,
        n,
        d,
        Provenance::Greedy,
        chosen.into_iter().map(|c| perms[c].clone()).collect(),
    )
}

/// Which quantity [`minimal_cover_exact`] minimizes the code size against.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CoverObjective {
    /// Worst-case distance at most `D` for every point.
    Worst,
    /// Mean distance over S_n at most `D`.
    Average,
}

impl std::str::FromStr for CoverObjective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "worst" => Ok(CoverObjective::Worst),
            "average" | "avg" => Ok(CoverObjective::Average),
            other => Err(Error::Parse(format!("unknown objective {other:?}"))),
        }
    }
}

/// Smallest code meeting the objective, by branch and bound over S_n
/// encoded as 128-bit sets (hence the hard `n <= 5` cap).  The identity
/// is pinned as the first codeword: right-translating any code by an
/// inverse codeword preserves both objectives, so some optimal code
/// contains it.  Deterministic output.
pub fn minimal_cover_exact(
    metric: Metric,
    n: usize,
    d: u64,
    objective: CoverObjective,
) -> Result<CoveringCode> {
    if n > EXACT_COVER_CAP {
        return Err(Error::ScaleExceeded {
            what: "exact minimal cover",
            n,
            cap: EXACT_COVER_CAP,
        });
    }
    if n < 2 || d < 1 {
        return Err(Error::Domain(format!(
            "exact cover needs n >= 2, D >= 1, got n = {n}, D = {d}"
        )));
    }
    let perms: Vec<Permutation> = enumerate_permutations_capped(n, EXACT_COVER_CAP)?.collect();
    let m = perms.len();
    let mut dist = vec![0u8; m * m];
    for i in 0..m {
        for j in (i + 1)..m {
            let dd = metric.distance(&perms[i], &perms[j])? as u8;
            dist[i * m + j] = dd;
            dist[j * m + i] = dd;
        }
    }

    let indices = match objective {
        CoverObjective::Worst => worst_case_minimum(&dist, m, d),
        CoverObjective::Average => average_case_minimum(&dist, m, d),
    };
    let provenance = match objective {
        CoverObjective::Worst => Provenance::ExactWorst,
        CoverObjective::Average => Provenance::ExactAverage,
    };
    CoveringCode::from_words(
        metric,
        n,
        d,
        provenance,
        indices.into_iter().map(|c| perms[c as usize].clone()).collect(),
    )
}

fn ball_mask(dist: &[u8], m: usize, center: usize, radius: u64) -> u128 {
    let row = &dist[center * m..(center + 1) * m];
    let mut mask = 0u128;
    for (j, &dd) in row.iter().enumerate() {
        if dd as u64 <= radius {
            mask |= 1u128 << j;
        }
    }
    mask
}

fn full_mask(m: usize) -> u128 {
    if m == 128 {
        u128::MAX
    } else {
        (1u128 << m) - 1
    }
}

/// Iterative deepening on the code size; within each budget, depth-first
/// element branching: pick the lowest uncovered point, try every center
/// whose ball contains it, best new coverage first.  Pruned by the
/// stronger of a counting bound and a greedy packing bound, a memo of
/// refuted coverage states, and sibling dominance (a candidate whose
/// fresh coverage sits inside another candidate's can be swapped out of
/// any solution at equal size).
fn worst_case_minimum(dist: &[u8], m: usize, d: u64) -> Vec<u32> {
    let balls: Vec<u128> = (0..m).map(|c| ball_mask(dist, m, c, d)).collect();
    let doubled: Vec<u128> = (0..m).map(|c| ball_mask(dist, m, c, 2 * d)).collect();
    let full = full_mask(m);
    let ball_size = balls[0].count_ones();
    let covers_point: Vec<Vec<u32>> = (0..m)
        .map(|e| {
            (0..m)
                .filter(|&c| balls[c] & (1u128 << e) != 0)
                .map(|c| c as u32)
                .collect()
        })
        .collect();

    const MEMO_CAP: usize = 2_000_000;

    struct Search<'a> {
        balls: &'a [u128],
        doubled: &'a [u128],
        covers_point: &'a [Vec<u32>],
        full: u128,
        ball_size: u32,
        chosen: Vec<u32>,
        best: Option<Vec<u32>>,
        // covered-state -> largest budget already refuted from it.
        refuted: HashMap<u128, u32>,
    }

    impl Search<'_> {
        fn lower_bound(&self, covered: u128) -> u32 {
            let uncovered = self.full & !covered;
            let counting = (uncovered.count_ones() + self.ball_size - 1) / self.ball_size;
            // Points pairwise more than 2D apart need distinct centers.
            let mut packing = 0u32;
            let mut rest = uncovered;
            while rest != 0 {
                let e = rest.trailing_zeros() as usize;
                packing += 1;
                rest &= !self.doubled[e];
            }
            counting.max(packing)
        }

        fn dfs(&mut self, covered: u128, budget: u32) -> bool {
            if covered == self.full {
                self.best = Some(self.chosen.clone());
                return true;
            }
            if budget == 0 || self.lower_bound(covered) > budget {
                return false;
            }
            if self.refuted.get(&covered).is_some_and(|&b| b >= budget) {
                return false;
            }
            let e = (self.full & !covered).trailing_zeros() as usize;
            let mut cands: Vec<(u32, u128)> = self.covers_point[e]
                .iter()
                .map(|&c| (c, self.balls[c as usize] & !covered))
                .collect();
            cands.sort_by_key(|&(c, fresh)| (std::cmp::Reverse(fresh.count_ones()), c));
            // Descending fresh size, so a dominating candidate is always kept
            // first; equal masks collapse onto the smaller index.
            let mut kept: Vec<(u32, u128)> = Vec::with_capacity(cands.len());
            'cands: for (c, fresh) in cands {
                for &(_, seen) in &kept {
                    if fresh & !seen == 0 {
                        continue 'cands;
                    }
                }
                kept.push((c, fresh));
            }
            for (c, fresh) in kept {
                self.chosen.push(c);
                if self.dfs(covered | fresh, budget - 1) {
                    return true;
                }
                self.chosen.pop();
            }
            if self.refuted.len() < MEMO_CAP {
                let slot = self.refuted.entry(covered).or_insert(0);
                *slot = (*slot).max(budget);
            }
            false
        }
    }

    let mut search = Search {
        balls: &balls,
        doubled: &doubled,
        covers_point: &covers_point,
        full,
        ball_size,
        chosen: vec![0],
        best: None,
        refuted: HashMap::new(),
    };
    let mut budget = search.lower_bound(balls[0]) + 1;
    loop {
        if search.dfs(balls[0], budget - 1) {
            return search.best.unwrap();
        }
        budget += 1;
    }
}

/// Same deepening scheme for the average objective: total distance over
/// S_n must come in at `<= D * n!`.  Binary branch and bound: take the
/// highest-marginal candidate, branch on including vs banning it.  Two
/// prunes: a capacity bound from sphere sizes (`k` future centers absorb
/// at most `k * S(t)` points at distance `t`), and a subadditivity bound
/// (a set of centers never reduces the total by more than the sum of its
/// members' individual reductions, so the top `k` surviving marginals
/// must close the gap).  Zero-marginal candidates are dropped: sizes
/// below the current budget are already refuted, so a witness may be
/// assumed to have no idle center.
fn average_case_minimum(dist: &[u8], m: usize, d: u64) -> Vec<u32> {
    let diam = dist.iter().copied().max().unwrap_or(0) as usize;
    // Sphere sizes around any center (the same for all by invariance).
    let mut sphere = vec![0u64; diam + 1];
    for &dd in &dist[0..m] {
        sphere[dd as usize] += 1;
    }
    let budget_total = d as u64 * m as u64;

    struct Search<'a> {
        dist: &'a [u8],
        m: usize,
        sphere: &'a [u64],
        budget_total: u64,
        chosen: Vec<u32>,
        best: Option<Vec<u32>>,
    }

    impl Search<'_> {
        /// Largest total-distance reduction `extra` future centers could
        /// achieve, via the capacity argument: at most `extra * S(t)`
        /// points may land at final distance `t`, farthest points served
        /// first.  `reserve` removes one level-`t` slot (a point already
        /// pegged there).
        fn capacity(&self, hist: &[u64], extra: u64, reserve: Option<usize>) -> u64 {
            let mut improvement = 0u64;
            let mut remaining: Vec<u64> = hist.to_vec();
            let mut hi = remaining.len() as i64 - 1;
            for t in 0..remaining.len() as i64 {
                let mut slots = extra * self.sphere[t as usize];
                if reserve == Some(t as usize) {
                    slots -= 1;
                }
                while slots > 0 && hi > t {
                    let take = remaining[hi as usize].min(slots);
                    improvement += take * (hi - t) as u64;
                    remaining[hi as usize] -= take;
                    slots -= take;
                    if remaining[hi as usize] == 0 {
                        hi -= 1;
                    }
                }
                if hi <= t {
                    break;
                }
            }
            improvement
        }

        fn marginal(&self, dists: &[u8], c: usize) -> u64 {
            let row = &self.dist[c * self.m..(c + 1) * self.m];
            dists
                .iter()
                .zip(row)
                .map(|(&have, &offer)| (have.saturating_sub(offer)) as u64)
                .sum()
        }

        fn include(&self, dists: &[u8], total: u64, c: usize) -> (Vec<u8>, u64) {
            let row = &self.dist[c * self.m..(c + 1) * self.m];
            let mut new_dists = dists.to_vec();
            let mut new_total = total;
            for (e, nd) in new_dists.iter_mut().enumerate() {
                if row[e] < *nd {
                    new_total -= (*nd - row[e]) as u64;
                    *nd = row[e];
                }
            }
            (new_dists, new_total)
        }

        /// When the capacity bound is exactly tight, any solution must
        /// serve the farthest point within a radius the pegging bound can
        /// compute: parking that point at final distance `t` caps the
        /// total gain at `(v - t)` plus the capacity of everything else
        /// with one level-`t` slot spent.  Radii whose cap falls short
        /// are impossible, which usually leaves a handful of candidate
        /// centers; branch on which of them is in the code.
        fn saturated_dfs(
            &mut self,
            dists: &[u8],
            total: u64,
            pool: &[u32],
            slots_left: u64,
            hist: &[u64],
            need: u64,
        ) -> Option<bool> {
            let e_star = (0..self.m).max_by_key(|&e| (dists[e], std::cmp::Reverse(e)))?;
            let v_star = dists[e_star] as usize;
            let mut hist_minus = hist.to_vec();
            hist_minus[v_star] -= 1;
            if self.capacity(&hist_minus, slots_left, None) >= need {
                // The relaxation can make quota without this point;
                // pegging forces nothing.
                return None;
            }
            let mut t_bar = None;
            for t in (0..v_star).rev() {
                let peg = (v_star - t) as u64 + self.capacity(&hist_minus, slots_left, Some(t));
                if peg >= need {
                    t_bar = Some(t);
                    break;
                }
            }
            let t_bar = match t_bar {
                Some(t) => t,
                None => return Some(false),
            };
            let row = &self.dist[e_star * self.m..(e_star + 1) * self.m];
            let mut cands: Vec<(u32, u64)> = pool
                .iter()
                .filter(|&&c| row[c as usize] as usize <= t_bar)
                .map(|&c| (c, self.marginal(dists, c as usize)))
                .collect();
            cands.sort_unstable_by_key(|&(c, imp)| (std::cmp::Reverse(imp), c));
            let mut remaining: Vec<u32> = pool.to_vec();
            for (c, _) in cands {
                let (new_dists, new_total) = self.include(dists, total, c as usize);
                remaining.retain(|&x| x != c);
                self.chosen.push(c);
                if self.dfs(&new_dists, new_total, &remaining, slots_left - 1) {
                    return Some(true);
                }
                self.chosen.pop();
            }
            Some(false)
        }

        fn dfs(&mut self, dists: &[u8], total: u64, pool: &[u32], slots_left: u64) -> bool {
            if total <= self.budget_total {
                self.best = Some(self.chosen.clone());
                return true;
            }
            if slots_left == 0 {
                return false;
            }
            let mut hist = vec![0u64; self.sphere.len()];
            for &dd in dists {
                hist[dd as usize] += 1;
            }
            let need = total - self.budget_total;
            let cap = self.capacity(&hist, slots_left, None);
            if cap < need {
                return false;
            }
            if cap == need {
                if let Some(hit) =
                    self.saturated_dfs(dists, total, pool, slots_left, &hist, need)
                {
                    return hit;
                }
            }
            let mut marginals: Vec<(u32, u64)> = pool
                .iter()
                .filter_map(|&c| {
                    let imp = self.marginal(dists, c as usize);
                    (imp > 0).then_some((c, imp))
                })
                .collect();
            marginals.sort_unstable_by_key(|&(c, imp)| (std::cmp::Reverse(imp), c));
            if marginals
                .iter()
                .take(slots_left as usize)
                .map(|&(_, imp)| imp)
                .sum::<u64>()
                < need
            {
                return false;
            }
            let (c, _) = marginals[0];
            let survivors: Vec<u32> = marginals[1..].iter().map(|&(c, _)| c).collect();

            let (new_dists, new_total) = self.include(dists, total, c as usize);
            self.chosen.push(c);
            if self.dfs(&new_dists, new_total, &survivors, slots_left - 1) {
                return true;
            }
            self.chosen.pop();
            self.dfs(dists, total, &survivors, slots_left)
        }
    }

    let id_dists: Vec<u8> = dist[0..m].to_vec();
    let id_total: u64 = id_dists.iter().map(|&x| x as u64).sum();
    let ball: u64 = sphere.iter().take(d as usize + 1).sum();
    let pool: Vec<u32> = (1..m as u32).collect();
    let mut search = Search {
        dist,
        m,
        sphere: &sphere,
        budget_total,
        chosen: vec![0],
        best: None,
    };
    // The average-distortion converse: strictly more than m/(B(D)(D+1)).
    let mut budget = (m as u64 / (ball * (d + 1))) + 1;
    loop {
        if search.dfs(&id_dists, id_total, &pool, budget - 1) {
            return search.best.unwrap();
        }
        budget += 1;
    }
}

/// Asymptotic rate of the block construction at relative distortion
/// `delta`: `H(delta floor(1/delta)) + delta floor(1/delta) lg floor(1/delta)`.
///
/// Takes `delta` exactly so the floor is computed without float drama on
/// grid values like 1/50.
pub fn construction_rate_asymptotic(delta: Rational64) -> Result<f64> {
    if delta <= Rational64::zero() || delta >= Rational64::one() {
        return Err(Error::Domain(format!(
            "need 0 < delta < 1, got {delta}"
        )));
    }
    let inv_floor = (delta.denom() / delta.numer()) as f64; // floor(1/delta), exact
    // delta * floor(1/delta) <= 1 exactly; keep the float product there too.
    let x = (delta.to_f64().unwrap() * inv_floor).min(1.0);
    Ok(binary_entropy(x) + x * inv_floor.log2())
}

fn binary_entropy(x: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&x));
    let mut h = 0.0;
    if x > 0.0 {
        h -= x * x.log2();
    }
    if x < 1.0 {
        h -= (1.0 - x) * (1.0 - x).log2();
    }
    h
}

/// Ordering helper for callers presenting codewords: lexicographic.
/// Text form of a code: `#`-prefixed header lines carrying the metadata,
/// then one codeword per line.
pub fn render_codeword_file(code: &CoveringCode) -> Result<String> {
    use std::fmt::Write;

    let words = code.materialize(MATERIALIZE_CAP)?;
    let mut out = String::new();
    writeln!(out, "# n: {}", code.n).unwrap();
    writeln!(out, "# d: {}", code.budget).unwrap();
    writeln!(out, "# metric: {}", code.metric.name()).unwrap();
    writeln!(out, "# provenance: {}", code.provenance.name()).unwrap();
    writeln!(out, "# size: {}", words.len()).unwrap();
    for w in &words {
        writeln!(out, "{w}").unwrap();
    }
    Ok(out)
}

/// Inverse of [`render_codeword_file`]; the size header, when present,
/// must match the number of codeword lines.
pub fn parse_codeword_file(text: &str) -> Result<CoveringCode> {
    let mut headers: HashMap<String, String> = HashMap::new();
    let mut words: Vec<Permutation> = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if let Some((key, value)) = rest.split_once(':') {
                headers.insert(key.trim().to_string(), value.trim().to_string());
            }
            continue;
        }
        words.push(line.parse()?);
    }
    let field = |key: &str| -> Result<&str> {
        headers
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| Error::Parse(format!("missing header {key:?}")))
    };
    let n: usize = field("n")?
        .parse()
        .map_err(|e| Error::Parse(format!("bad n header: {e}")))?;
    let d: u64 = field("d")?
        .parse()
        .map_err(|e| Error::Parse(format!("bad d header: {e}")))?;
    let metric: Metric = field("metric")?.parse()?;
    let provenance: Provenance = field("provenance")?.parse()?;
    if let Some(size) = headers.get("size") {
        if size != &words.len().to_string() {
            return Err(Error::Parse(format!(
                "size header says {size}, file lists {} codewords",
                words.len()
            )));
        }
    }
    CoveringCode::from_words(metric, n, d, provenance, words)
}

pub fn sort_codewords(words: &mut [Permutation]) {
    words.sort_by(lex_cmp);
}

/// Sphere sizes at every radius for the metric, by brute force;
/// re-exported here because cover search and its tests lean on it.
pub fn sphere_sizes(metric: Metric, n: usize, cap: usize) -> Result<Vec<u64>> {
    sphere_histogram_brute_force_capped(metric, n, cap)
}
