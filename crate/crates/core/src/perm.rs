//! Permutations of `{1, ..., n}`, the two metrics, and the combinatorial
//! plumbing the rest of the crate is built on.
//!
//! Conventions, fixed once here so every other module can rely on them:
//!
//! * One-line notation is one-indexed: `[6,1,3,5,2,4]` sends 1 -> 6, 2 -> 1,
//!   and so on.  Storage is zero-indexed but that never leaks through the API.
//! * Composition is right-to-left: `(p * q)(i) = p(q(i))`.
//! * The Kendall tau distance counts discordant pairs, equivalently the
//!   minimum number of adjacent transpositions turning one permutation into
//!   the other.  The Chebyshev distance is `max_i |p(i) - q(i)|`.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Hard cap for [`enumerate_permutations`]: 10! = 3.6M is the largest
/// factorial worth streaming on a desktop before callers should rethink.
pub const ENUMERATION_CAP: usize = 10;

/// A permutation of `{1, ..., n}` in one-line notation.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    /// `image[i] = sigma(i+1) - 1`; values are a rearrangement of `0..n`.
    image: Vec<u32>,
}

impl Permutation {
    /// The identity on `{1, ..., n}`.
    pub fn identity(n: usize) -> Self {
        Permutation {
            image: (0..n as u32).collect(),
        }
    }

    /// Builds from one-indexed one-line notation, validating bijectivity.
    pub fn from_one_line(values: &[u32]) -> Result<Self> {
        let n = values.len();
        let mut seen = vec![false; n];
        for &v in values {
            if v < 1 || v as usize > n {
                return Err(Error::InvalidPermutation(format!(
                    "value {v} out of range 1..={n}"
                )));
            }
            if seen[v as usize - 1] {
                return Err(Error::InvalidPermutation(format!("value {v} repeats")));
            }
            seen[v as usize - 1] = true;
        }
        Ok(Permutation {
            image: values.iter().map(|&v| v - 1).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    /// `sigma(i)` for one-indexed `i`.
    pub fn apply(&self, i: usize) -> usize {
        self.image[i - 1] as usize + 1
    }

    /// One-indexed one-line notation.
    pub fn one_line(&self) -> Vec<u32> {
        self.image.iter().map(|&v| v + 1).collect()
    }

    pub(crate) fn image(&self) -> &[u32] {
        &self.image
    }

    /// `(self * rhs)(i) = self(rhs(i))`.
    pub fn compose(&self, rhs: &Permutation) -> Result<Permutation> {
        if self.len() != rhs.len() {
            return Err(Error::LengthMismatch {
                left: self.len(),
                right: rhs.len(),
            });
        }
        Ok(Permutation {
            image: rhs.image.iter().map(|&v| self.image[v as usize]).collect(),
        })
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.len()];
        for (i, &v) in self.image.iter().enumerate() {
            inv[v as usize] = i as u32;
        }
        Permutation { image: inv }
    }

    /// Number of inversions: pairs `i < j` with `sigma(i) > sigma(j)`.
    pub fn inversions(&self) -> u64 {
        // Fenwick tree over values; O(n log n).
        let n = self.len();
        let mut tree = vec![0u32; n + 1];
        let mut count = 0u64;
        for (i, &v) in self.image.iter().enumerate() {
            // Values already placed that are greater than v.
            let mut k = v as usize + 1;
            let mut le = 0u32;
            while k > 0 {
                le += tree[k];
                k -= k & k.wrapping_neg();
            }
            count += i as u64 - le as u64;
            let mut k = v as usize + 1;
            while k <= n {
                tree[k] += 1;
                k += k & k.wrapping_neg();
            }
        }
        count
    }

    /// In-place successor in lexicographic order; false once at the maximum.
    fn next_lex(&mut self) -> bool {
        let a = &mut self.image;
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
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, &v) in self.image.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", v + 1)?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl std::str::FromStr for Permutation {
    type Err = Error;

    /// Parses `[6,1,3,5,2,4]` (brackets optional, whitespace ignored).
    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim().trim_start_matches('[').trim_end_matches(']');
        if trimmed.trim().is_empty() {
            return Err(Error::Parse("empty permutation".into()));
        }
        let values = trimmed
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|e| Error::Parse(format!("bad entry {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Permutation::from_one_line(&values)
    }
}

/// Which of the two metrics a computation runs under.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Metric {
    Kendall,
    Chebyshev,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Kendall => "kendall",
            Metric::Chebyshev => "chebyshev",
        }
    }

    /// Largest distance two permutations of length `n` can be apart.
    pub fn diameter(self, n: usize) -> u64 {
        match self {
            Metric::Kendall => (n as u64) * (n as u64 - 1) / 2,
            Metric::Chebyshev => n as u64 - 1,
        }
    }

    pub fn distance(self, p: &Permutation, q: &Permutation) -> Result<u64> {
        match self {
            Metric::Kendall => kendall_distance(p, q),
            Metric::Chebyshev => chebyshev_distance(p, q),
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "kendall" | "k" | "tau" => Ok(Metric::Kendall),
            "chebyshev" | "c" | "linf" => Ok(Metric::Chebyshev),
            other => Err(Error::Parse(format!("unknown metric {other:?}"))),
        }
    }
}

/// Kendall tau distance: the number of pairs ordered differently by `p`
/// and `q`, computed as the inversion count of `p * q^{-1}` in O(n log n).
pub fn kendall_distance(p: &Permutation, q: &Permutation) -> Result<u64> {
    Ok(p.compose(&q.inverse())?.inversions())
}

/// Chebyshev distance `max_i |p(i) - q(i)|`.
pub fn chebyshev_distance(p: &Permutation, q: &Permutation) -> Result<u64> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    Ok(p.image
        .iter()
        .zip(&q.image)
        .map(|(&a, &b)| (a as i64 - b as i64).unsigned_abs())
        .max()
        .unwrap_or(0))
}

/// The inversion table of a permutation: `x[i]` counts positions `j < i`
/// whose value exceeds `sigma(i)` (one-indexed `i`), so `0 <= x[i] <= i-1`
/// and the entries sum to the inversion count.  The map to permutations is
/// a bijection, which is what makes the Kendall ball a bounded-parts
/// composition count.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct InversionVector {
    x: Vec<u32>,
}

impl InversionVector {
    pub fn new(x: Vec<u32>) -> Result<Self> {
        for (i, &xi) in x.iter().enumerate() {
            if xi as usize > i {
                return Err(Error::InvalidInversionVector(format!(
                    "entry {} at one-indexed position {} exceeds {}",
                    xi,
                    i + 1,
                    i
                )));
            }
        }
        Ok(InversionVector { x })
    }

    pub fn entries(&self) -> &[u32] {
        &self.x
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Sum of entries = Kendall distance to the identity.
    pub fn weight(&self) -> u64 {
        self.x.iter().map(|&v| v as u64).sum()
    }
}

pub fn perm_to_inversion_vector(p: &Permutation) -> InversionVector {
    let img = p.image();
    let x = img
        .iter()
        .enumerate()
        .map(|(i, &v)| img[..i].iter().filter(|&&u| u > v).count() as u32)
        .collect();
    InversionVector { x }
}

/// Inverse of [`perm_to_inversion_vector`].
pub fn inversion_vector_to_perm(iv: &InversionVector) -> Permutation {
    // Decode right to left: at the last position every other value sits
    // earlier, so x[n-1] determines the value outright; recurse on the rest.
    let n = iv.x.len();
    let mut remaining: Vec<u32> = (0..n as u32).collect();
    let mut image = vec![0u32; n];
    for i in (0..n).rev() {
        let larger = iv.x[i] as usize;
        let v = remaining.remove(remaining.len() - 1 - larger);
        image[i] = v;
    }
    Permutation { image }
}

/// A nonempty subset of `{1, ..., n}`, kept sorted.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IndexSet {
    n: usize,
    /// Zero-based members, strictly increasing.
    members: Vec<u32>,
}

impl IndexSet {
    /// Builds from one-indexed members; duplicates and out-of-range reject.
    pub fn new(n: usize, members: &[u32]) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidIndexSet("empty set".into()));
        }
        let mut zero: Vec<u32> = Vec::with_capacity(members.len());
        for &m in members {
            if m < 1 || m as usize > n {
                return Err(Error::InvalidIndexSet(format!(
                    "member {m} out of range 1..={n}"
                )));
            }
            zero.push(m - 1);
        }
        zero.sort_unstable();
        if zero.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidIndexSet("duplicate member".into()));
        }
        Ok(IndexSet { n, members: zero })
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// One-indexed members in increasing order.
    pub fn one_indexed(&self) -> Vec<u32> {
        self.members.iter().map(|&m| m + 1).collect()
    }

    pub(crate) fn zero_based(&self) -> &[u32] {
        &self.members
    }

    /// Rank of a zero-based member within the set, if present.
    fn rank_of(&self, zero_based: u32) -> Option<u32> {
        self.members.binary_search(&zero_based).ok().map(|r| r as u32)
    }
}

/// `sigma|_A`: keep the positions in `A` (in increasing position order) and
/// relabel the surviving values by rank.
pub fn restrict_positions(p: &Permutation, a: &IndexSet) -> Result<Permutation> {
    if a.ambient() != p.len() {
        return Err(Error::LengthMismatch {
            left: p.len(),
            right: a.ambient(),
        });
    }
    let kept: Vec<u32> = a.zero_based().iter().map(|&pos| p.image[pos as usize]).collect();
    Ok(relabel_by_rank(&kept))
}

/// `sigma|^A`: keep the values in `A` (where they occur, in position order)
/// and relabel by rank.  Satisfies `sigma|^A = ((sigma^{-1})|_A)^{-1}`.
pub fn restrict_values(p: &Permutation, a: &IndexSet) -> Result<Permutation> {
    if a.ambient() != p.len() {
        return Err(Error::LengthMismatch {
            left: p.len(),
            right: a.ambient(),
        });
    }
    let ranks: Vec<u32> = p
        .image
        .iter()
        .filter_map(|&v| a.rank_of(v))
        .collect();
    Ok(Permutation {
        image: ranks,
    })
}

fn relabel_by_rank(values: &[u32]) -> Permutation {
    let mut sorted: Vec<u32> = values.to_vec();
    sorted.sort_unstable();
    let image = values
        .iter()
        .map(|v| sorted.binary_search(v).unwrap() as u32)
        .collect();
    Permutation { image }
}

/// Streams all of S_n in lexicographic order.  Refuses n above
/// [`ENUMERATION_CAP`]; use [`enumerate_permutations_capped`] to override
/// deliberately.
pub fn enumerate_permutations(n: usize) -> Result<PermutationStream> {
    enumerate_permutations_capped(n, ENUMERATION_CAP)
}

pub fn enumerate_permutations_capped(n: usize, cap: usize) -> Result<PermutationStream> {
    if n > cap {
        return Err(Error::ScaleExceeded {
            what: "enumeration",
            n,
            cap,
        });
    }
    Ok(PermutationStream {
        next: Some(Permutation::identity(n)),
    })
}

pub struct PermutationStream {
    next: Option<Permutation>,
}

impl Iterator for PermutationStream {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        if succ.next_lex() {
            self.next = Some(succ);
        }
        Some(current)
    }
}

/// Total order on permutations of equal length: lexicographic on one-line
/// notation.  Exposed for deterministic tie-breaking in the cover search.
pub fn lex_cmp(p: &Permutation, q: &Permutation) -> Ordering {
    p.image.cmp(&q.image)
}
