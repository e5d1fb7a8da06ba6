//! Rank maximization for matrices with a prescribed zero pattern.
//!
//! A pattern fixes which entries may be nonzero; free entries are sampled
//! i.i.d. uniformly over all of F_q (zeros included).  The combinatorial
//! ceiling for the rank of any row subset under the pattern is its *term
//! rank*: the size of a maximum bipartite matching between rows and columns
//! over the allowed positions.  No assignment can beat it, and a single
//! random draw achieves it for every subset of a requested collection
//! simultaneously with probability at least `1 - |collection|*a*b/q` on an
//! `a x b` pattern.  [`rank_maximize`] redraws until each subset's rank is
//! certified equal to its term rank, so the emitted matrix is
//! *rank-maximal by construction*, not just with high probability.
//!
//! [`rank_maximize_exhaustive`] is the independent slow path: it enumerates
//! every assignment of field values to the free positions, establishes each
//! subset's true maximum, and only then looks for one assignment meeting all
//! maxima at once.  It exists to cross-check the fast path at small sizes.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::gf::{Field, Matrix};
use crate::seed::SeedStream;
use crate::{Error, Result};

/// Redraw budget for [`rank_maximize`].
pub const RETRY_CAP: u32 = 64;

/// Default state-space cap for [`rank_maximize_exhaustive`].
pub const DEFAULT_ENUM_CAP: u64 = 10_000_000;

#[derive(Deserialize)]
struct RawPattern {
    rows: usize,
    cols: usize,
    bits: Vec<u8>,
    row_labels: Vec<String>,
}

/// A 0-1 occupancy pattern: `1` marks a position that may hold any field
/// value, `0` forces the entry to zero.  Rows carry labels (edge ids when
/// the pattern comes from a cut).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPattern")]
pub struct PatternMatrix {
    rows: usize,
    cols: usize,
    #[serde(serialize_with = "ser_bits")]
    bits: Vec<bool>,
    row_labels: Vec<String>,
}

fn ser_bits<S: serde::Serializer>(bits: &[bool], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(bits.iter().map(|&b| b as u8))
}

impl TryFrom<RawPattern> for PatternMatrix {
    type Error = Error;

    fn try_from(raw: RawPattern) -> Result<PatternMatrix> {
        if raw.bits.len() != raw.rows * raw.cols {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "pattern declared {}x{} but carries {} bits",
                    raw.rows,
                    raw.cols,
                    raw.bits.len()
                ),
            });
        }
        if raw.bits.iter().any(|&b| b > 1) {
            return Err(Error::Validation("pattern bits must be 0 or 1".into()));
        }
        if raw.row_labels.len() != raw.rows {
            return Err(Error::DimensionMismatch {
                context: "pattern row labels do not match row count".into(),
            });
        }
        Ok(PatternMatrix {
            rows: raw.rows,
            cols: raw.cols,
            bits: raw.bits.iter().map(|&b| b == 1).collect(),
            row_labels: raw.row_labels,
        })
    }
}

impl PatternMatrix {
    pub fn new(rows: usize, cols: usize) -> PatternMatrix {
        PatternMatrix {
            rows,
            cols,
            bits: vec![false; rows * cols],
            row_labels: (0..rows).map(|r| format!("r{r}")).collect(),
        }
    }

    /// Builds a pattern from rows of 0/1 values.
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<PatternMatrix> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch {
                context: "pattern rows of unequal length".into(),
            });
        }
        if rows.iter().flatten().any(|&b| b > 1) {
            return Err(Error::Validation("pattern bits must be 0 or 1".into()));
        }
        Ok(PatternMatrix {
            rows: rows.len(),
            cols,
            bits: rows.iter().flatten().map(|&b| b == 1).collect(),
            row_labels: (0..rows.len()).map(|r| format!("r{r}")).collect(),
        })
    }

    pub fn identity(n: usize) -> PatternMatrix {
        let mut p = PatternMatrix::new(n, n);
        for i in 0..n {
            p.set_bit(i, i, true);
        }
        p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn bit(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols, "index out of bounds");
        self.bits[r * self.cols + c]
    }

    pub fn set_bit(&mut self, r: usize, c: usize, v: bool) {
        assert!(r < self.rows && c < self.cols, "index out of bounds");
        self.bits[r * self.cols + c] = v;
    }

    pub fn ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn set_row_labels(&mut self, labels: Vec<String>) {
        assert_eq!(labels.len(), self.rows, "label count must match rows");
        self.row_labels = labels;
    }

    /// Support of one row: the column indices allowed to be nonzero.
    pub fn row_support(&self, r: usize) -> Vec<usize> {
        (0..self.cols).filter(|&c| self.bit(r, c)).collect()
    }

    /// Stacks `other` below `self` (column counts must agree).
    pub fn vstack(&self, other: &PatternMatrix) -> Result<PatternMatrix> {
        if self.cols != other.cols && self.rows != 0 && other.rows != 0 {
            return Err(Error::DimensionMismatch {
                context: format!("stacking {} pattern columns on {}", other.cols, self.cols),
            });
        }
        let mut bits = self.bits.clone();
        bits.extend_from_slice(&other.bits);
        let mut row_labels = self.row_labels.clone();
        row_labels.extend_from_slice(&other.row_labels);
        Ok(PatternMatrix {
            rows: self.rows + other.rows,
            cols: if self.rows == 0 { other.cols } else { self.cols },
            bits,
            row_labels,
        })
    }

    /// Pattern restricted to a row subset (all columns kept).
    pub fn select_rows(&self, rows: &[usize]) -> PatternMatrix {
        let mut bits = Vec::with_capacity(rows.len() * self.cols);
        let mut labels = Vec::with_capacity(rows.len());
        for &r in rows {
            assert!(r < self.rows, "row index out of bounds");
            bits.extend_from_slice(&self.bits[r * self.cols..(r + 1) * self.cols]);
            labels.push(self.row_labels[r].clone());
        }
        PatternMatrix {
            rows: rows.len(),
            cols: self.cols,
            bits,
            row_labels: labels,
        }
    }
}

/// A collection of row-index subsets of one pattern, each paired with all
/// columns, whose ranks are to be maximized simultaneously.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubmatrixCollection {
    subsets: Vec<Vec<usize>>,
}

impl SubmatrixCollection {
    /// Validates that every subset is nonempty and references rows of a
    /// pattern with `rows` rows.  Subsets are kept in the given order;
    /// within a subset, indices are sorted and deduplicated.
    pub fn new(subsets: Vec<Vec<usize>>, rows: usize) -> Result<SubmatrixCollection> {
        let mut cleaned = Vec::with_capacity(subsets.len());
        for s in subsets {
            if s.is_empty() {
                return Err(Error::Validation(
                    "submatrix collection contains an empty row subset".into(),
                ));
            }
            if let Some(&bad) = s.iter().find(|&&r| r >= rows) {
                return Err(Error::Validation(format!(
                    "row index {bad} out of range for a {rows}-row pattern"
                )));
            }
            let mut s = s;
            s.sort_unstable();
            s.dedup();
            cleaned.push(s);
        }
        Ok(SubmatrixCollection { subsets: cleaned })
    }

    pub fn len(&self) -> usize {
        self.subsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsets.is_empty()
    }

    pub fn subsets(&self) -> &[Vec<usize>] {
        &self.subsets
    }
}

/// Maximum bipartite matching between the given rows and all columns over
/// the pattern's 1-positions.  Classic augmenting-path search; rows are
/// processed in the order given and columns probed in ascending order, so
/// the matching (not just its size) is deterministic.  Returns matched
/// `(row, column)` pairs, rows in absolute indices.
pub fn maximum_matching(pattern: &PatternMatrix, rows: &[usize]) -> Vec<(usize, usize)> {
    let cols = pattern.cols();
    // col_match[c] = position in `rows` currently matched to column c
    let mut col_match: Vec<Option<usize>> = vec![None; cols];

    fn try_augment(
        pattern: &PatternMatrix,
        rows: &[usize],
        pos: usize,
        visited: &mut [bool],
        col_match: &mut [Option<usize>],
    ) -> bool {
        for c in 0..pattern.cols() {
            if !pattern.bit(rows[pos], c) || visited[c] {
                continue;
            }
            visited[c] = true;
            let free = match col_match[c] {
                None => true,
                Some(other) => try_augment(pattern, rows, other, visited, col_match),
            };
            if free {
                col_match[c] = Some(pos);
                return true;
            }
        }
        false
    }

    for pos in 0..rows.len() {
        let mut visited = vec![false; cols];
        try_augment(pattern, rows, pos, &mut visited, &mut col_match);
    }

    let mut pairs: Vec<(usize, usize)> = col_match
        .iter()
        .enumerate()
        .filter_map(|(c, m)| m.map(|pos| (rows[pos], c)))
        .collect();
    pairs.sort_unstable();
    pairs
}

/// Size of the maximum matching: the largest rank any assignment respecting
/// the zero pattern can give the selected rows.
pub fn term_rank(pattern: &PatternMatrix, rows: &[usize]) -> usize {
    maximum_matching(pattern, rows).len()
}

/// A concrete matrix over F_q respecting a zero pattern, together with the
/// certified rank of every requested row subset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankMaxMatrix {
    pub matrix: Matrix,
    pub pattern: PatternMatrix,
    pub collection: SubmatrixCollection,
    /// Certified rank per collection subset (equals the subset's term rank).
    pub subset_ranks: Vec<usize>,
    /// Draws taken by the randomized construction (0 for the exhaustive one).
    pub attempts: u32,
}

impl RankMaxMatrix {
    pub fn zero_pattern_respected(&self) -> bool {
        (0..self.pattern.rows()).all(|r| {
            (0..self.pattern.cols())
                .all(|c| self.pattern.bit(r, c) || self.matrix.get(r, c) == 0)
        })
    }
}

fn draw(pattern: &PatternMatrix, field: Field, rng: &mut impl Rng) -> Matrix {
    let mut m = Matrix::zero(field, pattern.rows(), pattern.cols());
    for r in 0..pattern.rows() {
        for c in 0..pattern.cols() {
            if pattern.bit(r, c) {
                m.set(r, c, rng.gen_range(0..field.modulus()));
            }
        }
    }
    m
}

fn subset_ranks(m: &Matrix, coll: &SubmatrixCollection) -> Vec<usize> {
    coll.subsets()
        .iter()
        .map(|s| m.select_rows(s).rank())
        .collect()
}

/// Draws pattern-respecting matrices until one attains every subset's term
/// rank, then returns it with the certified ranks.
///
/// A field with `q > |collection| * rows * cols` makes a single draw succeed
/// with probability at least `1 - |collection|*rows*cols/q`; smaller fields
/// are allowed (a warning is logged) and simply lean harder on the redraw
/// loop, up to [`RETRY_CAP`] attempts.
pub fn rank_maximize(
    pattern: &PatternMatrix,
    coll: &SubmatrixCollection,
    q: u64,
    seed: SeedStream,
) -> Result<RankMaxMatrix> {
    let field = Field::new(q)?;
    let threshold = (coll.len() * pattern.rows() * pattern.cols()) as u64;
    if q <= threshold {
        log::warn!(
            "field size {q} is not above the certification threshold {threshold}; \
             proceeding, but redraws are likely"
        );
    }
    let targets: Vec<usize> = coll
        .subsets()
        .iter()
        .map(|s| term_rank(pattern, s))
        .collect();
    let mut rng = seed.rng();
    let mut last_shortfall = String::new();
    for attempt in 1..=RETRY_CAP {
        let m = draw(pattern, field, &mut rng);
        let ranks = subset_ranks(&m, coll);
        if ranks == targets {
            return Ok(RankMaxMatrix {
                matrix: m,
                pattern: pattern.clone(),
                collection: coll.clone(),
                subset_ranks: ranks,
                attempts: attempt,
            });
        }
        last_shortfall = coll
            .subsets()
            .iter()
            .zip(ranks.iter().zip(targets.iter()))
            .filter(|(_, (got, want))| got != want)
            .map(|(s, (got, want))| format!("rows {s:?} reached rank {got} of {want}"))
            .collect::<Vec<_>>()
            .join("; ");
    }
    Err(Error::RetriesExhausted {
        q,
        attempts: RETRY_CAP,
        diagnostics: last_shortfall,
    })
}

/// Exhaustive rank maximization with the default state cap.
pub fn rank_maximize_exhaustive(
    pattern: &PatternMatrix,
    coll: &SubmatrixCollection,
    q: u64,
) -> Result<RankMaxMatrix> {
    rank_maximize_exhaustive_with_cap(pattern, coll, q, DEFAULT_ENUM_CAP)
}

/// Enumerates every assignment of F_q values to the pattern's free
/// positions.  A first sweep establishes the true maximum rank of each
/// subset independently; a second returns the first assignment attaining
/// all maxima at once, or [`Error::NoSimultaneousMaximizer`] if the field
/// is too small for any to exist.
pub fn rank_maximize_exhaustive_with_cap(
    pattern: &PatternMatrix,
    coll: &SubmatrixCollection,
    q: u64,
    cap: u64,
) -> Result<RankMaxMatrix> {
    let field = Field::new(q)?;
    let positions: Vec<(usize, usize)> = (0..pattern.rows())
        .flat_map(|r| (0..pattern.cols()).map(move |c| (r, c)))
        .filter(|&(r, c)| pattern.bit(r, c))
        .collect();
    let states = (q as u128).checked_pow(positions.len() as u32).unwrap_or(u128::MAX);
    if states > cap as u128 {
        return Err(Error::TooLarge { states, cap });
    }

    let assignment = |idx: u128| {
        let mut m = Matrix::zero(field, pattern.rows(), pattern.cols());
        let mut x = idx;
        for &(r, c) in &positions {
            m.set(r, c, (x % q as u128) as u64);
            x /= q as u128;
        }
        m
    };

    let mut maxima = vec![0usize; coll.len()];
    for idx in 0..states {
        let m = assignment(idx);
        for (slot, ranks) in maxima.iter_mut().zip(subset_ranks(&m, coll)) {
            *slot = (*slot).max(ranks);
        }
    }
    for idx in 0..states {
        let m = assignment(idx);
        if subset_ranks(&m, coll) == maxima {
            return Ok(RankMaxMatrix {
                matrix: m,
                pattern: pattern.clone(),
                collection: coll.clone(),
                subset_ranks: maxima,
                attempts: 0,
            });
        }
    }
    Err(Error::NoSimultaneousMaximizer { q, maxima })
}
