//! Block moves over machine sequences.
//!
//! All four neighborhood types relocate or exchange contiguous blocks of
//! jobs. A move is described by block starts `i`/`j` (1-based positions,
//! the dummy at position 0 never moves) and block lengths `l`/`l2`. The
//! rewritten sequences are expressed as span lists over the old sequences,
//! which gives every evaluator, the oracle and the apply step one shared
//! definition of what a move does.

use crate::model::{Cost, JobId, MachineId, Schedule};

/// Neighborhood instance selected by the RVND pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Neighborhood {
    /// Reinsert a block of `l` jobs elsewhere in the same machine
    /// (forward and backward directions together).
    InsertionIntra { l: usize },
    /// Exchange a block of `l` jobs with a later block of `l2` jobs in the
    /// same machine.
    SwapIntra { l: usize, l2: usize },
    /// Move a block of `l` jobs to another machine.
    InsertionInter { l: usize },
    /// Exchange a block of `l` jobs of one machine with a block of `l2`
    /// jobs of another.
    SwapInter { l: usize, l2: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum MoveKind {
    InsertIntraFwd,
    InsertIntraBwd,
    SwapIntra,
    InsertInter,
    SwapInter,
}

/// A fully specified move plus the total schedule cost after applying it.
///
/// Index semantics per kind (positions are 1-based, `n` = jobs on the
/// machine):
/// - `InsertIntraFwd`: block `[i, i+l)` goes right after old position `j`,
///   `i+l <= j <= n`.
/// - `InsertIntraBwd`: block `[i, i+l)` goes right after old position `j`,
///   `j <= i-2`.
/// - `SwapIntra`: block `[i, i+l)` swaps with disjoint later block
///   `[j, j+l2)`.
/// - `InsertInter`: block `[i, i+l)` of `machine` becomes positions
///   `[j, j+l)` of `other`, `1 <= j <= n_other + 1`.
/// - `SwapInter`: block `[i, i+l)` of `machine` swaps with block
///   `[j, j+l2)` of `other`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Move {
    pub kind: MoveKind,
    pub machine: MachineId,
    pub other: MachineId,
    pub i: usize,
    pub j: usize,
    pub l: usize,
    pub l2: usize,
    pub new_cost: Cost,
}

impl Move {
    /// Deterministic tie-break key: scans prefer the lowest cost and then
    /// the smallest key, so every evaluator picks the same move.
    pub fn tie_key(&self) -> (MoveKind, MachineId, MachineId, usize, usize, usize, usize) {
        (self.kind, self.machine, self.other, self.i, self.j, self.l, self.l2)
    }

    /// Strictly better under the shared tie rule.
    pub fn beats(&self, other: &Move) -> bool {
        (self.new_cost, self.tie_key()) < (other.new_cost, other.tie_key())
    }
}

/// Piece of a rewritten sequence: either a range of old positions
/// (inclusive, empty when `start > end`) or jobs imported from another
/// machine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Span {
    Old(usize, usize),
    Jobs(Vec<JobId>),
}

/// Span lists for every machine a move touches. The first span is always
/// the unchanged prefix `Old(0, ..)` and the last one the tail `Old(.., n)`
/// (possibly empty), which evaluators exploit.
pub fn edits(mv: &Move, schedule: &Schedule) -> Vec<(MachineId, Vec<Span>)> {
    let k = mv.machine;
    let (i, j, l, l2) = (mv.i, mv.j, mv.l, mv.l2);
    let n = schedule.len(k);
    match mv.kind {
        MoveKind::InsertIntraFwd => vec![(
            k,
            vec![Span::Old(0, i - 1), Span::Old(i + l, j), Span::Old(i, i + l - 1), Span::Old(j + 1, n)],
        )],
        MoveKind::InsertIntraBwd => vec![(
            k,
            vec![Span::Old(0, j), Span::Old(i, i + l - 1), Span::Old(j + 1, i - 1), Span::Old(i + l, n)],
        )],
        MoveKind::SwapIntra => vec![(
            k,
            vec![
                Span::Old(0, i - 1),
                Span::Old(j, j + l2 - 1),
                Span::Old(i + l, j - 1),
                Span::Old(i, i + l - 1),
                Span::Old(j + l2, n),
            ],
        )],
        MoveKind::InsertInter => {
            let block = schedule.seq[k][i..i + l].to_vec();
            let n2 = schedule.len(mv.other);
            vec![
                (k, vec![Span::Old(0, i - 1), Span::Old(i + l, n)]),
                (mv.other, vec![Span::Old(0, j - 1), Span::Jobs(block), Span::Old(j, n2)]),
            ]
        }
        MoveKind::SwapInter => {
            let block_k = schedule.seq[k][i..i + l].to_vec();
            let block_k2 = schedule.seq[mv.other][j..j + l2].to_vec();
            let n2 = schedule.len(mv.other);
            vec![
                (k, vec![Span::Old(0, i - 1), Span::Jobs(block_k2), Span::Old(i + l, n)]),
                (mv.other, vec![Span::Old(0, j - 1), Span::Jobs(block_k), Span::Old(j + l2, n2)]),
            ]
        }
    }
}

/// Rebuilds one machine sequence from its span list.
pub fn rewrite_sequence(old: &[JobId], spans: &[Span]) -> Vec<JobId> {
    let mut out = Vec::with_capacity(old.len() + 4);
    for span in spans {
        match span {
            Span::Old(a, b) => {
                if a <= b {
                    out.extend_from_slice(&old[*a..=*b]);
                }
            }
            Span::Jobs(jobs) => out.extend_from_slice(jobs),
        }
    }
    out
}

/// Mutates the schedule sequences according to the move. Start times and
/// cost are the calling engine's responsibility.
pub fn apply_to_sequences(mv: &Move, schedule: &mut Schedule) {
    for (k, spans) in edits(mv, schedule) {
        schedule.seq[k] = rewrite_sequence(&schedule.seq[k], &spans);
    }
}

/// Decomposition of a touched machine as prefix + explicit middle + suffix:
/// old positions `1..=prefix_end` stay, `middle` jobs follow, old positions
/// `suffix_start..` close the sequence. Derived from the span list.
pub struct ConcatParts {
    pub prefix_end: usize,
    pub middle: Vec<JobId>,
    pub suffix_start: usize,
}

pub fn concat_parts(old: &[JobId], spans: &[Span]) -> ConcatParts {
    let n = old.len() - 1;
    let prefix_end = match spans.first() {
        Some(Span::Old(0, b)) => *b,
        _ => unreachable!("span lists start with the old prefix"),
    };
    let suffix_start = match spans.last() {
        Some(Span::Old(a, b)) if *b == n => *a,
        _ => unreachable!("span lists end with the old tail"),
    };
    let mut middle = Vec::new();
    for span in &spans[1..spans.len() - 1] {
        match span {
            Span::Old(a, b) => {
                if a <= b {
                    middle.extend_from_slice(&old[*a..=*b]);
                }
            }
            Span::Jobs(jobs) => middle.extend_from_slice(jobs),
        }
    }
    ConcatParts { prefix_end, middle, suffix_start }
}

/// Enumerates every legal move of a neighborhood in ascending index order.
/// The cost field of the yielded moves is unset (zero); evaluators fill it.
pub fn for_each_move<F: FnMut(Move)>(schedule: &Schedule, neighborhood: Neighborhood, mut f: F) {
    let m = schedule.seq.len();
    match neighborhood {
        Neighborhood::InsertionIntra { l } => {
            for k in 0..m {
                let n = schedule.len(k);
                if n < l + 1 {
                    continue;
                }
                for i in 1..=n - l {
                    for j in i + l..=n {
                        f(Move { kind: MoveKind::InsertIntraFwd, machine: k, other: k, i, j, l, l2: 0, new_cost: 0 });
                    }
                }
                for i in 2..=n + 1 - l {
                    for j in 0..=i - 2 {
                        f(Move { kind: MoveKind::InsertIntraBwd, machine: k, other: k, i, j, l, l2: 0, new_cost: 0 });
                    }
                }
            }
        }
        Neighborhood::SwapIntra { l, l2 } => {
            for k in 0..m {
                let n = schedule.len(k);
                if n < l + l2 {
                    continue;
                }
                for i in 1..=n - l - l2 + 1 {
                    for j in i + l..=n - l2 + 1 {
                        f(Move { kind: MoveKind::SwapIntra, machine: k, other: k, i, j, l, l2, new_cost: 0 });
                    }
                }
            }
        }
        Neighborhood::InsertionInter { l } => {
            for k in 0..m {
                let n = schedule.len(k);
                if n < l {
                    continue;
                }
                for k2 in 0..m {
                    if k2 == k {
                        continue;
                    }
                    let n2 = schedule.len(k2);
                    for i in 1..=n - l + 1 {
                        for j in 1..=n2 + 1 {
                            f(Move { kind: MoveKind::InsertInter, machine: k, other: k2, i, j, l, l2: 0, new_cost: 0 });
                        }
                    }
                }
            }
        }
        Neighborhood::SwapInter { l, l2 } => {
            for k in 0..m {
                for k2 in k + 1..m {
                    let mut orientations = vec![(l, l2)];
                    if l != l2 {
                        orientations.push((l2, l));
                    }
                    for (la, lb) in orientations {
                        let n = schedule.len(k);
                        let n2 = schedule.len(k2);
                        if n < la || n2 < lb {
                            continue;
                        }
                        for i in 1..=n - la + 1 {
                            for j in 1..=n2 - lb + 1 {
                                f(Move {
                                    kind: MoveKind::SwapInter,
                                    machine: k,
                                    other: k2,
                                    i,
                                    j,
                                    l: la,
                                    l2: lb,
                                    new_cost: 0,
                                });
                            }
                        }
                    }
                }
            }
        }
    }
}

/// Inverse of a swap move at the same positions in the mutated schedule
/// (swaps are involutions when block sizes match).
pub fn inverse_swap(mv: &Move) -> Option<Move> {
    match mv.kind {
        MoveKind::SwapIntra if mv.l == mv.l2 => Some(mv.clone()),
        MoveKind::SwapInter if mv.l == mv.l2 => Some(mv.clone()),
        _ => None,
    }
}
