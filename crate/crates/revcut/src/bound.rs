//! Upper bounds on the secrecy rate across a cut, in the presence of
//! backward (sink-to-source direction) edges.
//!
//! For a cut with `x` forward and `y` backward crossing edges, stack the
//! forward edges' incoming-signal pattern on top of an identity block for
//! the backward edges, rank-maximize that pattern over F_q, and read off,
//! for every wiretap set `A`, the deficit `|A| - rank(Ū_A)` of its row
//! submatrix.  The secrecy rate across the cut is at most
//! `x - max_A deficit(A)`; minimizing over all cuts of the network gives
//! the usable bound.  Because certified ranks equal term ranks, the
//! reported values are deterministic and independent of the random draw.
//!
//! The module also produces, per wiretap set, a machine-checkable
//! block-labeling certificate splitting `A` into `A₁ ∪ A₂` with
//! `|f_{A₁}| + |A₂| = rank(Ū_A)`, where `f_{A₁}` is the set of backward
//! signals feeding `A₁`.  The certificate drives the conditional
//! key-entropy check used by the matching code construction.

use crate::gf::{next_prime, Field, Matrix};
use crate::network::{
    restrict_wiretap_sets, Capacity, Cut, CutSummary, Network, WiretapModel, WiretapSet,
};
use crate::rankmax::{
    maximum_matching, rank_maximize, term_rank, PatternMatrix, RankMaxMatrix, SubmatrixCollection,
};
use crate::seed::SeedStream;
use crate::{Error, Result};
use itertools::Itertools;
use serde::{Deserialize, Serialize};

/// A set of backward-signal indices (columns of the stacked cut matrix).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SignalSet {
    indices: Vec<usize>,
}

impl SignalSet {
    /// Validated constructor: indices must name one of `y` backward signals.
    pub fn new(mut indices: Vec<usize>, y: usize) -> Result<SignalSet> {
        indices.sort_unstable();
        indices.dedup();
        if let Some(&bad) = indices.iter().find(|&&i| i >= y) {
            return Err(Error::Validation(format!(
                "signal index {bad} out of range for {y} backward edges"
            )));
        }
        Ok(SignalSet { indices })
    }

    fn from_sorted(indices: Vec<usize>) -> SignalSet {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        SignalSet { indices }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    pub fn union(&self, other: &SignalSet) -> SignalSet {
        let mut v: Vec<usize> = self
            .indices
            .iter()
            .chain(other.indices.iter())
            .copied()
            .collect();
        v.sort_unstable();
        v.dedup();
        SignalSet::from_sorted(v)
    }

    pub fn difference(&self, other: &SignalSet) -> SignalSet {
        SignalSet::from_sorted(
            self.indices
                .iter()
                .copied()
                .filter(|&i| !other.contains(i))
                .collect(),
        )
    }
}

/// The signals an observer of one cut edge sees from the backward edges: a
/// backward edge carries its own signal; a forward edge sees the signals
/// whose heads can reach its tail inside the cut side.
pub fn edge_signals(net: &Network, cut: &Cut, edge_id: &str) -> Result<SignalSet> {
    let edge = net
        .edge_index(edge_id)
        .ok_or_else(|| Error::NotACutEdge(format!("{edge_id}: no such edge")))?;
    let row = cut
        .edge_row(edge)
        .ok_or_else(|| Error::NotACutEdge(format!("{edge_id}: edge does not cross the cut")))?;
    let pattern = stacked_pattern(net, cut);
    Ok(SignalSet::from_sorted(pattern.row_support(row)))
}

/// Union of [`edge_signals`] over a set of cut edges.
pub fn set_signals(net: &Network, cut: &Cut, edge_ids: &[String]) -> Result<SignalSet> {
    let mut out = SignalSet::default();
    for id in edge_ids {
        out = out.union(&edge_signals(net, cut, id)?);
    }
    Ok(out)
}

/// The `(x + y) × y` zero pattern governing what each cut edge can observe:
/// the connectivity rows for the forward edges stacked on an identity block
/// for the backward edges.  Rows are labeled with edge ids.
pub fn stacked_pattern(net: &Network, cut: &Cut) -> PatternMatrix {
    let mut ident = PatternMatrix::identity(cut.y());
    ident.set_row_labels(
        cut.backward()
            .iter()
            .map(|&e| net.edge_id(e).to_string())
            .collect(),
    );
    cut.connectivity()
        .vstack(&ident)
        .expect("connectivity and identity column counts agree by construction")
}

/// Role of a rectangle in a labeled wiretap submatrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlockLabel {
    /// Square block with 1s on its counter-diagonal (other entries free).
    CounterDiagonal,
    /// All entries are 0 by direct inspection.
    Zero,
    /// All entries are 0 as a consequence of rank maximality.
    ZeroStar,
    /// No column of the block is entirely 0.
    NonZero,
    /// No constraint.
    Arbitrary,
}

/// One labeled rectangle, in permuted coordinates, half-open on both axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledBlock {
    pub label: BlockLabel,
    pub rows: (usize, usize),
    pub cols: (usize, usize),
}

/// Proof object for the partition `A = A₁ ∪ A₂` with
/// `|f_{A₁}| + |A₂| = rank(Ū_A)`.
///
/// Permutations map permuted positions to original row/column indices of
/// the wiretap submatrix the certificate was built from; `blocks` tile the
/// permuted matrix exactly.  `A₂` holds the first `t` permuted rows; `A₁`
/// splits into its forward (`a_f`) and backward (`a_b`) rows.  All row and
/// signal indices are original (pre-permutation) indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionCertificate {
    /// Row labels (edge ids) of the submatrix, in original row order.
    pub edges: Vec<String>,
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
    /// Permuted row position -> original row index.
    pub row_perm: Vec<usize>,
    /// Permuted column position -> original column index.
    pub col_perm: Vec<usize>,
    pub blocks: Vec<LabeledBlock>,
    /// `|A₂|`; `A₂` is the first `t` permuted rows.
    pub t: usize,
    pub a2: Vec<usize>,
    pub a1: Vec<usize>,
    pub a_f: Vec<usize>,
    pub a_b: Vec<usize>,
    pub f_a1: SignalSet,
    pub f_af: SignalSet,
    pub f_ab: SignalSet,
    pub verified: bool,
}

impl PartitionCertificate {
    /// Re-checks every recorded claim against the pattern the certificate
    /// was built from.  Succeeds iff the permutations are genuine, the
    /// labels tile the matrix exactly and hold entrywise, and the partition
    /// data reproduces the rank identity.
    pub fn verify(&self, u: &PatternMatrix) -> Result<()> {
        let fail = |msg: String| Err(Error::Validation(msg));
        if u.rows() != self.rows || u.cols() != self.cols {
            return fail(format!(
                "certificate is for a {}x{} matrix, got {}x{}",
                self.rows,
                self.cols,
                u.rows(),
                u.cols()
            ));
        }
        if u.row_labels() != self.edges.as_slice() {
            return fail("row labels differ from the certified edge list".into());
        }
        for (perm, n, what) in [
            (&self.row_perm, self.rows, "row"),
            (&self.col_perm, self.cols, "column"),
        ] {
            let mut sorted = perm.to_vec();
            sorted.sort_unstable();
            if sorted != (0..n).collect::<Vec<_>>() {
                return fail(format!("{what} permutation is not a permutation of 0..{n}"));
            }
        }
        let all_rows: Vec<usize> = (0..self.rows).collect();
        if term_rank(u, &all_rows) != self.rank {
            return fail("recorded rank differs from the pattern's term rank".into());
        }

        // exact tiling
        let mut covered = vec![0u32; self.rows * self.cols];
        for b in &self.blocks {
            let ((r0, r1), (c0, c1)) = (b.rows, b.cols);
            if r0 >= r1 || c0 >= c1 || r1 > self.rows || c1 > self.cols {
                return fail(format!("degenerate or out-of-range block {b:?}"));
            }
            for i in r0..r1 {
                for j in c0..c1 {
                    covered[i * self.cols + j] += 1;
                }
            }
        }
        if covered.iter().any(|&c| c != 1) {
            return fail("labeled blocks do not tile the matrix exactly".into());
        }

        // label semantics on the permuted matrix
        let bit = |i: usize, j: usize| u.bit(self.row_perm[i], self.col_perm[j]);
        for b in &self.blocks {
            let ((r0, r1), (c0, c1)) = (b.rows, b.cols);
            match b.label {
                BlockLabel::CounterDiagonal => {
                    if r1 - r0 != c1 - c0 {
                        return fail(format!("counter-diagonal block {b:?} is not square"));
                    }
                    for d in 0..r1 - r0 {
                        if !bit(r1 - 1 - d, c0 + d) {
                            return fail(format!("missing counter-diagonal 1 in {b:?}"));
                        }
                    }
                }
                BlockLabel::Zero | BlockLabel::ZeroStar => {
                    for i in r0..r1 {
                        for j in c0..c1 {
                            if bit(i, j) {
                                return fail(format!("nonzero entry inside {b:?}"));
                            }
                        }
                    }
                }
                BlockLabel::NonZero => {
                    for j in c0..c1 {
                        if (r0..r1).all(|i| !bit(i, j)) {
                            return fail(format!("zero column inside non-zero block {b:?}"));
                        }
                    }
                }
                BlockLabel::Arbitrary => {}
            }
        }

        // the partition itself
        if self.t > self.rows || self.t > self.rank {
            return fail(format!("t = {} out of range", self.t));
        }
        let mut a2 = self.row_perm[..self.t].to_vec();
        a2.sort_unstable();
        if a2 != self.a2 {
            return fail("A2 does not match the first t permuted rows".into());
        }
        let mut a1 = self.row_perm[self.t..].to_vec();
        a1.sort_unstable();
        if a1 != self.a1 {
            return fail("A1 does not match the remaining permuted rows".into());
        }
        let mut split: Vec<usize> = self.a_f.iter().chain(self.a_b.iter()).copied().collect();
        split.sort_unstable();
        if split != self.a1 {
            return fail("A_F and A_B do not partition A1".into());
        }
        for (rows, set, what) in [
            (&self.a1, &self.f_a1, "A1"),
            (&self.a_f, &self.f_af, "A_F"),
            (&self.a_b, &self.f_ab, "A_B"),
        ] {
            let mut support: Vec<usize> = rows.iter().flat_map(|&r| u.row_support(r)).collect();
            support.sort_unstable();
            support.dedup();
            if support != set.indices() {
                return fail(format!("f_{what} does not match the union of row supports"));
            }
        }
        if self.f_a1.len() + self.t != self.rank {
            return fail(format!(
                "|f_A1| + |A2| = {} + {} does not equal rank {}",
                self.f_a1.len(),
                self.t,
                self.rank
            ));
        }
        // structural conclusion: A1's signals live in the first rank - t
        // permuted columns
        let head: std::collections::HashSet<usize> =
            self.col_perm[..self.rank - self.t].iter().copied().collect();
        if self.f_a1.indices().iter().any(|c| !head.contains(c)) {
            return fail("f_A1 escapes the leading permuted columns".into());
        }
        Ok(())
    }
}

/// Runs the block-labeling procedure on a wiretap submatrix pattern `u`
/// with certified rank `r`, producing the partition certificate.
///
/// `backward_rows[i]` marks whether row `i` of `u` is a backward edge (used
/// only to split `A₁` into `A_F`/`A_B`).  The procedure places `r`
/// independent 1s (a maximum matching) on the counter-diagonal of the
/// leading `r × r` block, then repeatedly classifies the columns under that
/// block: if all are nonzero the recursion ends with `t = 0`; if none are
/// (or there are no rows below) it ends with `t = k`; otherwise the nonzero
/// columns are moved left, the counter-diagonal is restored by a row
/// permutation of the first `k` rows, the handled rows and columns are
/// labeled, and the loop continues on the shrunken window.
///
/// Errors with [`Error::MaximalityViolated`] if `r` is not the pattern's
/// term rank, or if a block that rank maximality forces to zero contains a
/// 1 (impossible for a correctly certified `r`; kept as a defensive check).
pub fn label_partition(
    u: &PatternMatrix,
    r: usize,
    backward_rows: &[bool],
) -> Result<PartitionCertificate> {
    let a = u.rows();
    let y = u.cols();
    if backward_rows.len() != a {
        return Err(Error::DimensionMismatch {
            context: format!("{} backward-row flags for {a} rows", backward_rows.len()),
        });
    }
    let all_rows: Vec<usize> = (0..a).collect();
    let tr = term_rank(u, &all_rows);
    if r != tr {
        return Err(Error::MaximalityViolated(format!(
            "claimed rank {r} differs from the pattern's term rank {tr}"
        )));
    }

    let mut row_perm: Vec<usize> = Vec::with_capacity(a);
    let mut col_perm: Vec<usize> = Vec::with_capacity(y);
    let mut blocks: Vec<LabeledBlock> = Vec::new();
    let t;

    if r == 0 {
        // a zero pattern: identity permutations, everything is one zero
        // block, no rows are covered
        row_perm.extend(0..a);
        col_perm.extend(0..y);
        if a > 0 && y > 0 {
            blocks.push(LabeledBlock {
                label: BlockLabel::Zero,
                rows: (0, a),
                cols: (0, y),
            });
        }
        t = 0;
    } else {
        // place a maximum matching on the counter-diagonal of the leading
        // r x r block: matched pair j goes to permuted row r-1-j, column j
        let matching = maximum_matching(u, &all_rows);
        debug_assert_eq!(matching.len(), r);
        let mut matched_rows = vec![false; a];
        let mut matched_cols = vec![false; y];
        row_perm.resize(r, 0);
        for (j, &(row, col)) in matching.iter().enumerate() {
            row_perm[r - 1 - j] = row;
            col_perm.push(col);
            matched_rows[row] = true;
            matched_cols[col] = true;
        }
        row_perm.extend((0..a).filter(|&i| !matched_rows[i]));
        col_perm.extend((0..y).filter(|&j| !matched_cols[j]));

        // rank maximality forces the lower-right (a-r) x (y-r) block to 0
        for i in r..a {
            for j in r..y {
                if u.bit(row_perm[i], col_perm[j]) {
                    return Err(Error::MaximalityViolated(format!(
                        "entry at permuted ({i}, {j}) is 1, contradicting maximum rank {r}"
                    )));
                }
            }
        }
        if a > r && y > r {
            blocks.push(LabeledBlock {
                label: BlockLabel::Zero,
                rows: (r, a),
                cols: (r, y),
            });
        }

        let mut k = r; // side of the counter-diagonal window
        let mut m = a; // end of the row window
        let mut col_off = 0; // columns truncated so far (col_off + k == r)
        t = loop {
            let nonzero: Vec<bool> = (0..k)
                .map(|c| (k..m).any(|i| u.bit(row_perm[i], col_perm[col_off + c])))
                .collect();
            let u_cnt = nonzero.iter().filter(|&&b| b).count();

            if m > k && u_cnt == k {
                // every column below the window is nonzero
                blocks.push(LabeledBlock {
                    label: BlockLabel::NonZero,
                    rows: (k, m),
                    cols: (col_off, col_off + k),
                });
                blocks.push(LabeledBlock {
                    label: BlockLabel::CounterDiagonal,
                    rows: (0, k),
                    cols: (col_off, col_off + k),
                });
                if y > r {
                    for i in 0..k {
                        for j in r..y {
                            if u.bit(row_perm[i], col_perm[j]) {
                                return Err(Error::MaximalityViolated(format!(
                                    "entry at permuted ({i}, {j}) is 1 inside a block forced \
                                     to zero by maximum rank {r}"
                                )));
                            }
                        }
                    }
                    blocks.push(LabeledBlock {
                        label: BlockLabel::ZeroStar,
                        rows: (0, k),
                        cols: (r, y),
                    });
                }
                break 0;
            }

            if m == k || u_cnt == 0 {
                // nothing below the window (or only zeros)
                if m > k {
                    blocks.push(LabeledBlock {
                        label: BlockLabel::Zero,
                        rows: (k, m),
                        cols: (col_off, col_off + k),
                    });
                }
                blocks.push(LabeledBlock {
                    label: BlockLabel::CounterDiagonal,
                    rows: (0, k),
                    cols: (col_off, col_off + k),
                });
                if y > r {
                    blocks.push(LabeledBlock {
                        label: BlockLabel::Arbitrary,
                        rows: (0, k),
                        cols: (r, y),
                    });
                }
                break k;
            }

            // mixed: move the nonzero columns left (stable), then restore
            // the counter-diagonal by permuting the first k rows
            let v = k - u_cnt;
            let order: Vec<usize> = (0..k)
                .filter(|&c| nonzero[c])
                .chain((0..k).filter(|&c| !nonzero[c]))
                .collect();
            let mut pi = vec![0usize; k]; // old offset -> new offset
            for (new_off, &old_off) in order.iter().enumerate() {
                pi[old_off] = new_off;
            }
            let col_window: Vec<usize> = col_perm[col_off..col_off + k].to_vec();
            for (new_off, &old_off) in order.iter().enumerate() {
                col_perm[col_off + new_off] = col_window[old_off];
            }
            // the 1 of old column offset c sat in row k-1-c and now lives in
            // column offset pi[c], so that row must move to k-1-pi[c]
            let row_window: Vec<usize> = row_perm[..k].to_vec();
            for c in 0..k {
                row_perm[k - 1 - pi[c]] = row_window[k - 1 - c];
            }

            blocks.push(LabeledBlock {
                label: BlockLabel::NonZero,
                rows: (k, m),
                cols: (col_off, col_off + u_cnt),
            });
            blocks.push(LabeledBlock {
                label: BlockLabel::Zero,
                rows: (k, m),
                cols: (col_off + u_cnt, col_off + k),
            });
            blocks.push(LabeledBlock {
                label: BlockLabel::CounterDiagonal,
                rows: (v, k),
                cols: (col_off, col_off + u_cnt),
            });
            if v > 0 {
                blocks.push(LabeledBlock {
                    label: BlockLabel::Arbitrary,
                    rows: (0, v),
                    cols: (col_off, col_off + u_cnt),
                });
            }
            if y > r {
                for i in v..k {
                    for j in r..y {
                        if u.bit(row_perm[i], col_perm[j]) {
                            return Err(Error::MaximalityViolated(format!(
                                "entry at permuted ({i}, {j}) is 1 inside a block forced to \
                                 zero by maximum rank {r}"
                            )));
                        }
                    }
                }
                blocks.push(LabeledBlock {
                    label: BlockLabel::ZeroStar,
                    rows: (v, k),
                    cols: (r, y),
                });
            }

            m = k;
            k = v;
            col_off += u_cnt;
        };
    }

    let mut a2 = row_perm[..t].to_vec();
    a2.sort_unstable();
    let mut a1 = row_perm[t..].to_vec();
    a1.sort_unstable();
    let a_f: Vec<usize> = a1.iter().copied().filter(|&i| !backward_rows[i]).collect();
    let a_b: Vec<usize> = a1.iter().copied().filter(|&i| backward_rows[i]).collect();
    let support_of = |rows: &[usize]| {
        let mut s: Vec<usize> = rows.iter().flat_map(|&i| u.row_support(i)).collect();
        s.sort_unstable();
        s.dedup();
        SignalSet::from_sorted(s)
    };
    let mut cert = PartitionCertificate {
        edges: u.row_labels().to_vec(),
        rows: a,
        cols: y,
        rank: r,
        row_perm,
        col_perm,
        blocks,
        t,
        f_a1: support_of(&a1),
        f_af: support_of(&a_f),
        f_ab: support_of(&a_b),
        a2,
        a1,
        a_f,
        a_b,
        verified: false,
    };
    cert.verify(u)?;
    cert.verified = true;
    Ok(cert)
}

/// `H(f_{A_F} | f_{A_B})` in log-q units, for independent uniform backward
/// signals: the rank of the identity rows selecting `f_{A_F} ∪ f_{A_B}`
/// minus the rank of those selecting `f_{A_B}` (which equals
/// `|f_{A_F} \ f_{A_B}|`, computed here through the matrix route).
pub fn conditional_key_entropy(cert: &PartitionCertificate, q: u64) -> Result<usize> {
    let field = Field::new(q)?;
    let ident = Matrix::identity(field, cert.cols);
    let joint = cert.f_af.union(&cert.f_ab);
    let joint_rank = ident.select_rows(joint.indices()).rank();
    let given_rank = ident.select_rows(cert.f_ab.indices()).rank();
    Ok(joint_rank - given_rank)
}

/// Whether the certified partition keeps the conditional key entropy of the
/// forward part within `rank(Ū_A) - |A_B| - |A₂|`.
pub fn check_key_entropy_bound(cert: &PartitionCertificate, q: u64) -> Result<bool> {
    let h = conditional_key_entropy(cert, q)? as i64;
    Ok(h <= cert.rank as i64 - cert.a_b.len() as i64 - cert.t as i64)
}

/// Per-wiretap-set entry of a [`CutBoundReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetRecord {
    /// Edge ids of the wiretapped cut edges.
    pub edges: Vec<String>,
    /// Rows of the stacked cut matrix (forward rows first).
    pub rows: Vec<usize>,
    pub size: usize,
    /// Certified rank of the set's row submatrix.
    pub rank: usize,
    /// `rank - size`; never positive.
    pub slack: i64,
    pub certificate: PartitionCertificate,
    /// Result of [`check_key_entropy_bound`] on the certificate.
    pub key_entropy_ok: bool,
}

/// Everything computed for one cut: the rank-maximized matrix with its
/// certificates, the per-set slack table, and the bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutBoundReport {
    pub cut: CutSummary,
    pub q: u64,
    pub x: usize,
    pub y: usize,
    pub sets: Vec<SetRecord>,
    /// Minimum certified rank over the size-`z` sets (uniform adversaries
    /// only); the bound then also reads `x + k_b - z`.
    pub k_b: Option<usize>,
    /// Edge ids of the first size-`z` set attaining `k_b`.
    pub k_b_argmin: Option<Vec<String>>,
    /// `x` plus the worst slack; may be negative in principle.
    pub raw_value: i64,
    /// `raw_value` clamped below at 0 (a rate cannot be negative).
    pub value: u64,
    pub clamped: bool,
    /// The rank-maximized stacked matrix and its certified subset ranks.
    pub cbar: RankMaxMatrix,
    /// Index in `cbar`'s collection of the all-backward-rows subset, whose
    /// certification makes the bottom `y × y` block invertible.  Present
    /// whenever `y > 0`; may coincide with a wiretap set.
    pub backward_block_subset: Option<usize>,
}

fn build_record(
    net: &Network,
    cut: &Cut,
    pattern: &PatternMatrix,
    rows: &[usize],
    rank: usize,
    q: u64,
) -> Result<SetRecord> {
    let sub = pattern.select_rows(rows);
    let backward: Vec<bool> = rows.iter().map(|&r| r >= cut.x()).collect();
    let certificate = label_partition(&sub, rank, &backward)?;
    let key_entropy_ok = check_key_entropy_bound(&certificate, q)?;
    Ok(SetRecord {
        edges: rows
            .iter()
            .map(|&r| net.edge_id(cut.row_edge(r)).to_string())
            .collect(),
        rows: rows.to_vec(),
        size: rows.len(),
        rank,
        slack: rank as i64 - rows.len() as i64,
        certificate,
        key_entropy_ok,
    })
}

/// Appends the all-backward-rows subset to `subsets` unless already present,
/// returning its index (None when the cut has no backward edges).  Its
/// certification pins every diagonal entry of the bottom block to nonzero.
fn ensure_backward_block(cut: &Cut, subsets: &mut Vec<Vec<usize>>) -> Option<usize> {
    if cut.y() == 0 {
        return None;
    }
    let all_backward: Vec<usize> = (cut.x()..cut.x() + cut.y()).collect();
    if let Some(i) = subsets.iter().position(|s| *s == all_backward) {
        return Some(i);
    }
    subsets.push(all_backward);
    Some(subsets.len() - 1)
}

/// Evaluates the cut's bound against an explicit list of wiretap sets
/// (normally from [`restrict_wiretap_sets`]): rank-maximizes the stacked
/// pattern over all the sets at once, then reports `x` plus the worst
/// `rank - |A|` slack.  An empty list yields the unconstrained bound `x`.
pub fn cut_bound(
    net: &Network,
    cut: &Cut,
    sets: &[WiretapSet],
    q: u64,
    seed: SeedStream,
) -> Result<CutBoundReport> {
    let pattern = stacked_pattern(net, cut);
    let mut subsets: Vec<Vec<usize>> = sets.iter().map(|s| s.rows.clone()).collect();
    let backward_block_subset = ensure_backward_block(cut, &mut subsets);
    let coll = SubmatrixCollection::new(subsets, pattern.rows())?;
    let cbar = rank_maximize(&pattern, &coll, q, seed)?;

    let mut records = Vec::with_capacity(sets.len());
    for (i, s) in sets.iter().enumerate() {
        records.push(build_record(
            net,
            cut,
            &pattern,
            &s.rows,
            cbar.subset_ranks[i],
            q,
        )?);
    }
    let min_slack = records.iter().map(|r| r.slack).min().unwrap_or(0);
    let raw_value = cut.x() as i64 + min_slack;
    Ok(CutBoundReport {
        cut: cut.summary(net),
        q,
        x: cut.x(),
        y: cut.y(),
        sets: records,
        k_b: None,
        k_b_argmin: None,
        raw_value,
        value: raw_value.max(0) as u64,
        clamped: raw_value < 0,
        cbar,
        backward_block_subset,
    })
}

/// Evaluates the cut's bound for a uniform strength-`z` adversary through
/// the independent minimum-rank route: enumerate every size-`z` subset of
/// the cut's wiretappable rows, take `k_b` as the smallest certified rank,
/// and report `x + k_b - z`.
pub fn uniform_bound(
    net: &Network,
    cut: &Cut,
    z: usize,
    q: u64,
    seed: SeedStream,
) -> Result<CutBoundReport> {
    let unit_rows: Vec<usize> = (0..cut.x() + cut.y())
        .filter(|&r| net.edges()[cut.row_edge(r)].capacity == Capacity::Unit)
        .collect();
    if z > unit_rows.len() {
        return Err(Error::ZTooLarge {
            z,
            edges: unit_rows.len(),
        });
    }
    let pattern = stacked_pattern(net, cut);
    let picks: Vec<Vec<usize>> = if z == 0 {
        Vec::new()
    } else {
        unit_rows.iter().copied().combinations(z).collect()
    };
    let mut subsets = picks.clone();
    let backward_block_subset = ensure_backward_block(cut, &mut subsets);
    let coll = SubmatrixCollection::new(subsets, pattern.rows())?;
    let cbar = rank_maximize(&pattern, &coll, q, seed)?;

    let mut records = Vec::with_capacity(picks.len());
    for (i, rows) in picks.iter().enumerate() {
        records.push(build_record(net, cut, &pattern, rows, cbar.subset_ranks[i], q)?);
    }
    let (k_b, argmin_edges) = match records
        .iter()
        .enumerate()
        .min_by_key(|(i, r)| (r.rank, *i))
    {
        Some((_, r)) => (r.rank, r.edges.clone()),
        None => (0, Vec::new()),
    };
    let raw_value = cut.x() as i64 + k_b as i64 - z as i64;
    Ok(CutBoundReport {
        cut: cut.summary(net),
        q,
        x: cut.x(),
        y: cut.y(),
        sets: records,
        k_b: Some(k_b),
        k_b_argmin: Some(argmin_edges),
        raw_value,
        value: raw_value.max(0) as u64,
        clamped: raw_value < 0,
        cbar,
        backward_block_subset,
    })
}

/// The network-wide bound with its full per-cut evidence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestBound {
    pub value: u64,
    pub raw_value: i64,
    /// Index into `reports` of the minimizing cut (lowest bitmask on ties).
    pub best_cut: usize,
    /// One report per evaluated cut, in ascending-bitmask order.
    pub reports: Vec<CutBoundReport>,
}

fn crosses_unbounded(net: &Network, cut: &Cut) -> bool {
    cut.forward()
        .iter()
        .chain(cut.backward().iter())
        .any(|&e| net.edges()[e].capacity == Capacity::Unbounded)
}

/// Minimizes [`cut_bound`] over every cut of the network.  Cuts crossed by
/// an unbounded-capacity edge impose no finite constraint and are skipped.
/// For uniform adversaries each report also carries `k_b`.
pub fn best_bound(
    net: &Network,
    model: &WiretapModel,
    q: u64,
    seed: SeedStream,
    node_cap: usize,
) -> Result<BestBound> {
    let mut reports: Vec<CutBoundReport> = Vec::new();
    let mut best: Option<usize> = None;
    for cut in net.enumerate_cuts(node_cap)? {
        if crosses_unbounded(net, &cut) {
            log::debug!(
                "skipping cut with bitmask {}: crossed by an unbounded-capacity edge",
                cut.bitmask()
            );
            continue;
        }
        let sets = restrict_wiretap_sets(model, net, &cut);
        let mut rep = cut_bound(net, &cut, &sets, q, seed.child(cut.bitmask() as u64))?;
        if let WiretapModel::Uniform { z } = model {
            let unit = (0..cut.x() + cut.y())
                .filter(|&r| net.edges()[cut.row_edge(r)].capacity == Capacity::Unit)
                .count();
            if *z == 0 {
                rep.k_b = Some(0);
                rep.k_b_argmin = Some(Vec::new());
            } else if *z <= unit {
                let mut found: Option<(usize, Vec<String>)> = None;
                for s in rep.sets.iter().filter(|s| s.size == *z) {
                    if found.as_ref().map_or(true, |(rank, _)| s.rank < *rank) {
                        found = Some((s.rank, s.edges.clone()));
                    }
                }
                if let Some((rank, edges)) = found {
                    rep.k_b = Some(rank);
                    rep.k_b_argmin = Some(edges);
                }
            }
        }
        if best.map_or(true, |b: usize| rep.raw_value < reports[b].raw_value) {
            best = Some(reports.len());
        }
        reports.push(rep);
    }
    let best_cut = best.ok_or_else(|| {
        Error::Validation("every cut is crossed by an unbounded-capacity edge".into())
    })?;
    Ok(BestBound {
        value: reports[best_cut].value,
        raw_value: reports[best_cut].raw_value,
        best_cut,
        reports,
    })
}

/// Smallest prime strictly above every cut's certification product
/// `|subsets| * rows * cols`, making each rank maximization overwhelmingly
/// likely to certify on the first draw.
pub fn recommended_prime(net: &Network, model: &WiretapModel, node_cap: usize) -> Result<u64> {
    let mut worst: u128 = 1;
    for cut in net.enumerate_cuts(node_cap)? {
        if crosses_unbounded(net, &cut) {
            continue;
        }
        let sets = restrict_wiretap_sets(model, net, &cut);
        let subsets = sets.len() + usize::from(cut.y() > 0);
        let product = subsets as u128 * (cut.x() + cut.y()) as u128 * cut.y() as u128;
        worst = worst.max(product);
    }
    Ok(next_prime(u64::try_from(worst).unwrap_or(u64::MAX - 1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::parse_network;
    use crate::network::tests::fixture;
    use rand::Rng;

    fn cut_of(net: &Network, members: &[&str]) -> Cut {
        net.cut_from_members(&members.iter().map(|s| s.to_string()).collect::<Vec<_>>())
            .unwrap()
    }

    fn seed(n: u64) -> SeedStream {
        SeedStream::new(n)
    }

    // a network whose all-but-sink cut has one forward edge fed by backward
    // edges b1 and b3 but not b2 (b2's head cannot reach the forward tail)
    const THREE_FEEDS: &str = r#"{
        "nodes": ["S", "T", "P1", "P2", "P3", "D"],
        "edges": [
            {"id": "f1", "tail": "T", "head": "D"},
            {"id": "b1", "tail": "D", "head": "P1"},
            {"id": "b2", "tail": "D", "head": "P2"},
            {"id": "b3", "tail": "D", "head": "P3"},
            {"id": "i1", "tail": "P1", "head": "T"},
            {"id": "i3", "tail": "P3", "head": "T"},
            {"id": "s1", "tail": "S", "head": "T"}
        ],
        "source": "S", "sink": "D", "wiretap": {"z": 1}
    }"#;

    #[test]
    fn signals_follow_the_stacked_pattern_rows() {
        let (net, _) = parse_network(&fixture("backedge_useful.json")).unwrap();
        let cut = cut_of(&net, &["S"]);
        assert_eq!(edge_signals(&net, &cut, "e4").unwrap().indices(), &[0]);
        assert_eq!(edge_signals(&net, &cut, "e1").unwrap().indices(), &[0]);
        assert!(matches!(
            edge_signals(&net, &cut, "nope"),
            Err(Error::NotACutEdge(_))
        ));
        // e2 does not cross the cut {S}
        assert!(matches!(
            edge_signals(&net, &cut, "e2"),
            Err(Error::NotACutEdge(_))
        ));

        // forward edge with connectivity row [1, 0, 1]
        let (net, _) = parse_network(THREE_FEEDS).unwrap();
        let cut = cut_of(&net, &["S", "T", "P1", "P2", "P3"]);
        assert_eq!(edge_signals(&net, &cut, "f1").unwrap().indices(), &[0, 2]);
        assert_eq!(edge_signals(&net, &cut, "b2").unwrap().indices(), &[1]);
        let f_a = set_signals(&net, &cut, &["f1".into(), "b2".into()]).unwrap();
        assert_eq!(f_a.indices(), &[0, 1, 2]);

        // forward edge with an all-zero connectivity row sees nothing
        let (net, _) = parse_network(&fixture("backedge_useless.json")).unwrap();
        let cut = cut_of(&net, &["S", "A"]);
        assert!(edge_signals(&net, &cut, "e2").unwrap().is_empty());
    }

    #[test]
    fn stacked_pattern_orders_forward_rows_before_backward() {
        let (net, _) = parse_network(&fixture("backedge_useful.json")).unwrap();
        let cut = cut_of(&net, &["S"]);
        let p = stacked_pattern(&net, &cut);
        assert_eq!((p.rows(), p.cols()), (2, 1));
        assert_eq!(p.row_labels(), &["e1".to_string(), "e4".to_string()]);
        assert!(p.bit(0, 0) && p.bit(1, 0));
    }

    #[test]
    fn hand_checked_cut_bounds() {
        let (net, model) = parse_network(&fixture("backedge_useful.json")).unwrap();
        let cut = cut_of(&net, &["S"]);
        let sets = restrict_wiretap_sets(&model, &net, &cut);
        let rep = cut_bound(&net, &cut, &sets, 11, seed(1)).unwrap();
        assert_eq!((rep.x, rep.y), (1, 1));
        assert_eq!(rep.value, 1);
        assert_eq!(rep.raw_value, 1);
        assert!(!rep.clamped);
        assert_eq!(
            rep.sets.iter().map(|s| s.slack).collect::<Vec<_>>(),
            vec![0, 0]
        );

        let cut = cut_of(&net, &["S", "A"]);
        let sets = restrict_wiretap_sets(&model, &net, &cut);
        let rep = cut_bound(&net, &cut, &sets, 11, seed(2)).unwrap();
        assert_eq!((rep.x, rep.y), (2, 0));
        assert_eq!(rep.value, 1);

        let (net, model) = parse_network(&fixture("backedge_useless.json")).unwrap();
        let cut = cut_of(&net, &["S", "A"]);
        let sets = restrict_wiretap_sets(&model, &net, &cut);
        let rep = cut_bound(&net, &cut, &sets, 11, seed(3)).unwrap();
        assert_eq!(rep.value, 0);
        // the slack table: {e2} has a zero row; {e3} carries its own signal
        let by_edges: Vec<(Vec<String>, i64)> = rep
            .sets
            .iter()
            .map(|s| (s.edges.clone(), s.slack))
            .collect();
        assert_eq!(
            by_edges,
            vec![
                (vec!["e2".to_string()], -1),
                (vec!["e3".to_string()], 0)
            ]
        );
    }

    #[test]
    fn no_wiretap_sets_leaves_the_cut_capacity() {
        let (net, _) = parse_network(&fixture("backedge_useful.json")).unwrap();
        let cut = cut_of(&net, &["S"]);
        let rep = cut_bound(&net, &cut, &[], 7, seed(4)).unwrap();
        assert_eq!(rep.value, 1);
        assert!(rep.sets.is_empty());
        // the certification subset is still drawn for the backward block
        assert_eq!(rep.backward_block_subset, Some(0));
        assert_eq!(rep.cbar.collection.subsets(), &[vec![1]]);
        assert_eq!(rep.cbar.subset_ranks, vec![1]);
    }

    #[test]
    fn best_bound_fixture_values() {
        for (fix, want, want_cut_members) in [
            ("backedge_useful.json", 1, vec!["S"]),
            ("backedge_useless.json", 0, vec!["A", "S"]),
            ("two_node.json", 0, vec!["S"]),
            ("relay_feedback.json", 1, vec!["S"]),
        ] {
            let (net, model) = parse_network(&fixture(fix)).unwrap();
            let best = best_bound(&net, &model, 13, seed(5), 20).unwrap();
            assert_eq!(best.value, want, "{fix}");
            let mut v = best.reports[best.best_cut].cut.v.clone();
            v.sort();
            assert_eq!(
                v,
                want_cut_members
                    .iter()
                    .map(|s| s.to_string())
                    .collect::<Vec<_>>(),
                "{fix}"
            );
        }
    }

    #[test]
    fn subset_route_and_min_rank_route_agree() {
        for fix in [
            "backedge_useful.json",
            "backedge_useless.json",
            "two_node.json",
            "relay_feedback.json",
        ] {
            let (net, _) = parse_network(&fixture(fix)).unwrap();
            for cut in net.enumerate_cuts(20).unwrap() {
                for z in 1..=2usize.min(cut.x() + cut.y()) {
                    let sets =
                        restrict_wiretap_sets(&WiretapModel::Uniform { z }, &net, &cut);
                    let via_sets = cut_bound(&net, &cut, &sets, 17, seed(6)).unwrap();
                    let via_min_rank = uniform_bound(&net, &cut, z, 17, seed(7)).unwrap();
                    assert_eq!(
                        via_sets.raw_value, via_min_rank.raw_value,
                        "{fix} cut {:?} z={z}",
                        via_min_rank.cut.v
                    );
                }
            }
        }
    }

    #[test]
    fn min_rank_route_details() {
        let (net, _) = parse_network(&fixture("backedge_useful.json")).unwrap();
        let cut = cut_of(&net, &["S"]);
        let rep = uniform_bound(&net, &cut, 1, 11, seed(8)).unwrap();
        assert_eq!(rep.k_b, Some(1));
        assert_eq!(rep.value, 1);

        let (net, _) = parse_network(&fixture("backedge_useless.json")).unwrap();
        let cut = cut_of(&net, &["S", "A"]);
        let rep = uniform_bound(&net, &cut, 1, 11, seed(9)).unwrap();
        assert_eq!(rep.k_b, Some(0));
        assert_eq!(rep.k_b_argmin.as_deref(), Some(&["e2".to_string()][..]));
        assert_eq!(rep.value, 0);

        // z = 0 is the unconstrained cut capacity
        let rep = uniform_bound(&net, &cut, 0, 11, seed(10)).unwrap();
        assert_eq!((rep.k_b, rep.value), (Some(0), 1));

        let (net, _) = parse_network(&fixture("two_node.json")).unwrap();
        let cut = cut_of(&net, &["S"]);
        assert!(matches!(
            uniform_bound(&net, &cut, 2, 11, seed(11)),
            Err(Error::ZTooLarge { z: 2, edges: 1 })
        ));
    }

    /// Random two-layer networks: every edge runs source -> middle,
    /// middle -> sink, or source -> sink, so no cut has backward edges.
    fn two_layer(rng: &mut impl rand::RngCore) -> String {
        let rng = &mut *rng;
        let mids = rng.gen_range(0..=2usize);
        let mut nodes: Vec<String> = vec!["S".into()];
        for i in 0..mids {
            nodes.push(format!("w{i}"));
        }
        nodes.push("D".into());
        let mut edges: Vec<String> = Vec::new();
        for i in 0..mids {
            for _ in 0..rng.gen_range(1..=2) {
                edges.push(format!(
                    r#"{{"id":"e{}","tail":"S","head":"w{i}"}}"#,
                    edges.len()
                ));
            }
            for _ in 0..rng.gen_range(1..=2) {
                edges.push(format!(
                    r#"{{"id":"e{}","tail":"w{i}","head":"D"}}"#,
                    edges.len()
                ));
            }
        }
        let direct_min = usize::from(mids == 0);
        for _ in 0..rng.gen_range(direct_min..=2) {
            edges.push(format!(
                r#"{{"id":"e{}","tail":"S","head":"D"}}"#,
                edges.len()
            ));
        }
        format!(
            r#"{{"nodes":[{}],"edges":[{}],"source":"S","sink":"D","wiretap":{{"z":1}}}}"#,
            nodes
                .iter()
                .map(|n| format!("\"{n}\""))
                .collect::<Vec<_>>()
                .join(","),
            edges.join(",")
        )
    }

    #[test]
    fn without_backward_edges_the_bound_is_min_cut_minus_z() {
        let mut rng = seed(7001).rng();
        for trial in 0..30 {
            let (net, model) = parse_network(&two_layer(&mut rng)).unwrap();
            let cuts = net.enumerate_cuts(20).unwrap();
            assert!(cuts.iter().all(|c| c.y() == 0), "trial {trial}");
            let min_x = cuts.iter().map(Cut::x).min().unwrap();
            let best = best_bound(&net, &model, 11, seed(trial), 20).unwrap();
            assert_eq!(
                best.raw_value,
                min_x as i64 - 1,
                "trial {trial}: {}",
                net.to_document(&model, None)
            );
            assert_eq!(best.value as i64, (min_x as i64 - 1).max(0));
            for rep in &best.reports {
                // per-cut: the bound degenerates to x - z, and the k_b
                // fields reproduce it
                assert_eq!(rep.raw_value, rep.x as i64 - 1);
                assert_eq!(rep.k_b, Some(0));
                assert!(rep.raw_value >= 0 || rep.clamped);
            }
        }
    }

    #[test]
    fn labeling_terminal_cases() {
        // identity: no rows below the window, so everything lands in A2
        let ident = PatternMatrix::identity(2);
        let cert = label_partition(&ident, 2, &[true, true]).unwrap();
        assert_eq!(cert.t, 2);
        assert_eq!(cert.a2, vec![0, 1]);
        assert!(cert.a1.is_empty() && cert.f_a1.is_empty());
        assert!(cert.verified);

        // one useful row above a zero row
        let u = PatternMatrix::from_rows(&[vec![1, 1], vec![0, 0]]).unwrap();
        let cert = label_partition(&u, 1, &[false, false]).unwrap();
        assert_eq!(cert.t, 1);
        assert_eq!(cert.a2, vec![0]);
        assert_eq!(cert.a1, vec![1]);
        assert!(cert.f_a1.is_empty());

        // every column below the window nonzero: nothing joins A2
        let u = PatternMatrix::from_rows(&[vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap();
        let cert = label_partition(&u, 2, &[false, false, true]).unwrap();
        assert_eq!(cert.t, 0);
        assert!(cert.a2.is_empty());
        assert_eq!(cert.f_a1.indices(), &[0, 1]);

        // all-zero pattern: trivial certificate
        let u = PatternMatrix::new(2, 3);
        let cert = label_partition(&u, 0, &[false, false]).unwrap();
        assert_eq!((cert.t, cert.rank), (0, 0));
        assert!(cert.f_a1.is_empty());
    }

    #[test]
    fn wrong_rank_is_rejected() {
        let ident = PatternMatrix::identity(2);
        assert!(matches!(
            label_partition(&ident, 1, &[false, false]),
            Err(Error::MaximalityViolated(_))
        ));
    }

    /// Independent check: the smallest `|f_{A \ A₂}| + |A₂|` over all 2^|A|
    /// choices of A₂, straight from the definition.
    fn exhaustive_partition_minimum(u: &PatternMatrix) -> usize {
        let rows = u.rows();
        let mut best = usize::MAX;
        for mask in 0u32..(1 << rows) {
            let mut signals = std::collections::HashSet::new();
            let mut a2 = 0usize;
            for r in 0..rows {
                if mask & (1 << r) != 0 {
                    a2 += 1;
                } else {
                    signals.extend(u.row_support(r));
                }
            }
            best = best.min(signals.len() + a2);
        }
        best
    }

    #[test]
    fn partition_matches_the_exhaustive_minimum() {
        let mut rng = seed(905).rng();
        for trial in 0..200 {
            let rows = rng.gen_range(1..=5);
            let cols = rng.gen_range(0..=5);
            let mut u = PatternMatrix::new(rows, cols);
            for r in 0..rows {
                for c in 0..cols {
                    u.set_bit(r, c, rng.gen_bool(0.4));
                }
            }
            let r = term_rank(&u, &(0..rows).collect::<Vec<_>>());
            let cert = label_partition(&u, r, &vec![false; rows]).unwrap();
            assert!(cert.verify(&u).is_ok(), "trial {trial}");
            assert_eq!(cert.f_a1.len() + cert.t, r, "trial {trial}");
            assert_eq!(exhaustive_partition_minimum(&u), r, "trial {trial}");
        }
    }

    #[test]
    fn stacked_shapes_certify_and_satisfy_the_entropy_bound() {
        let mut rng = seed(906).rng();
        for trial in 0..200 {
            let x = rng.gen_range(0..=3);
            let y = rng.gen_range(1..=3);
            let mut conn = PatternMatrix::new(x, y);
            for r in 0..x {
                for c in 0..y {
                    conn.set_bit(r, c, rng.gen_bool(0.5));
                }
            }
            let stacked = conn.vstack(&PatternMatrix::identity(y)).unwrap();
            // random nonempty row subset
            let total = x + y;
            let rows: Vec<usize> =
                (0..total).filter(|_| rng.gen_bool(0.6)).collect();
            let rows = if rows.is_empty() { vec![0] } else { rows };
            let sub = stacked.select_rows(&rows);
            let backward: Vec<bool> = rows.iter().map(|&r| r >= x).collect();
            let r = term_rank(&sub, &(0..sub.rows()).collect::<Vec<_>>());
            let cert = label_partition(&sub, r, &backward).unwrap();
            assert_eq!(exhaustive_partition_minimum(&sub), r, "trial {trial}");
            assert!(check_key_entropy_bound(&cert, 11).unwrap(), "trial {trial}");
            // with per-edge backward signals the inequality is tight, and
            // the matrix-rank route agrees with direct set counting
            let h = conditional_key_entropy(&cert, 11).unwrap();
            assert_eq!(h, cert.f_af.difference(&cert.f_ab).len(), "trial {trial}");
            assert_eq!(
                h as i64,
                cert.rank as i64 - cert.a_b.len() as i64 - cert.t as i64,
                "trial {trial}"
            );
        }
    }

    #[test]
    fn enlarging_a_wiretap_set_never_raises_the_bound() {
        let (net, _) = parse_network(&fixture("relay_feedback.json")).unwrap();
        let cut = cut_of(&net, &["S", "P"]);
        for z in 1..(cut.x() + cut.y()) {
            let low = uniform_bound(&net, &cut, z, 23, seed(20)).unwrap();
            let high = uniform_bound(&net, &cut, z + 1, 23, seed(21)).unwrap();
            assert!(high.raw_value <= low.raw_value, "z={z}");
        }
        // explicit nested sets
        let small = WiretapSet {
            rows: vec![0],
            edges: vec![cut.row_edge(0)],
        };
        let large = WiretapSet {
            rows: vec![0, 1],
            edges: vec![cut.row_edge(0), cut.row_edge(1)],
        };
        let a = cut_bound(&net, &cut, &[small], 23, seed(22)).unwrap();
        let b = cut_bound(&net, &cut, &[large], 23, seed(23)).unwrap();
        assert!(b.raw_value <= a.raw_value);
    }

    #[test]
    fn identity_block_keeps_raw_values_nonnegative() {
        // backward rows contribute full rank, so the deficit never exceeds
        // the forward count; raw values stay >= 0 and clamping stays idle
        let mut rng = seed(907).rng();
        for _ in 0..20 {
            let (net, model) = parse_network(&two_layer(&mut rng)).unwrap();
            let best = best_bound(&net, &model, 11, seed(24), 20).unwrap();
            for rep in &best.reports {
                assert!(rep.raw_value >= 0);
                assert!(!rep.clamped);
            }
        }
        for fix in ["backedge_useful.json", "relay_feedback.json"] {
            let (net, model) = parse_network(&fixture(fix)).unwrap();
            let best = best_bound(&net, &model, 11, seed(25), 20).unwrap();
            assert!(best.reports.iter().all(|r| r.raw_value >= 0 && !r.clamped));
        }
    }

    #[test]
    fn reports_serialize_round_trip() {
        let (net, model) = parse_network(&fixture("backedge_useful.json")).unwrap();
        let best = best_bound(&net, &model, 13, seed(26), 20).unwrap();
        let text = serde_json::to_string(&best).unwrap();
        let back: BestBound = serde_json::from_str(&text).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
        assert_eq!(back.value, best.value);
        assert_eq!(back.reports.len(), best.reports.len());
    }

    #[test]
    fn same_seed_reproduces_and_values_ignore_the_seed() {
        let (net, model) = parse_network(&fixture("relay_feedback.json")).unwrap();
        let a = best_bound(&net, &model, 13, seed(30), 20).unwrap();
        let b = best_bound(&net, &model, 13, seed(30), 20).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        let c = best_bound(&net, &model, 13, seed(31), 20).unwrap();
        assert_eq!(a.value, c.value);
        assert_eq!(
            a.reports.iter().map(|r| r.raw_value).collect::<Vec<_>>(),
            c.reports.iter().map(|r| r.raw_value).collect::<Vec<_>>()
        );
    }

    #[test]
    fn tampered_certificates_fail_verification() {
        let u = PatternMatrix::from_rows(&[vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap();
        let cert = label_partition(&u, 2, &[false, false, false]).unwrap();
        assert!(cert.verify(&u).is_ok());

        let mut swapped = cert.clone();
        swapped.row_perm.swap(0, 2);
        assert!(swapped.verify(&u).is_err());

        let mut relabeled = cert.clone();
        let pos = relabeled
            .blocks
            .iter()
            .position(|b| b.label == BlockLabel::NonZero)
            .unwrap();
        relabeled.blocks[pos].label = BlockLabel::Zero;
        assert!(relabeled.verify(&u).is_err());

        let mut shifted = cert;
        shifted.t = 1;
        assert!(shifted.verify(&u).is_err());
    }

    #[test]
    fn recommended_prime_clears_every_cut_product() {
        for fix in ["backedge_useful.json", "relay_feedback.json"] {
            let (net, model) = parse_network(&fixture(fix)).unwrap();
            let q = recommended_prime(&net, &model, 20).unwrap();
            assert!(Field::new(q).is_ok());
            for cut in net.enumerate_cuts(20).unwrap() {
                let sets = restrict_wiretap_sets(&model, &net, &cut);
                let product = (sets.len() + usize::from(cut.y() > 0)) as u64
                    * (cut.x() + cut.y()) as u64
                    * cut.y() as u64;
                assert!(q > product, "{fix}: {q} vs {product}");
            }
        }
    }
}
