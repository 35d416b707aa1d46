//! Fast move evaluation for problems without idle time and without
//! sequence-dependent setup times.
//!
//! For every machine suffix starting at position `j` a piecewise-linear
//! tail-cost function `g[j]` gives the cost of running that suffix when its
//! first job starts at time `t`. Together with the cumulated prefix costs,
//! every block move decomposes into O(1) table lookups, two function
//! evaluations and one O(l) block re-chain. Scans order their queries so
//! the function cursors move monotonically, which keeps a full O(n^2)
//! neighborhood pass at amortized O(l_max) per move instead of O(n).

use crate::eval::direct::{chain_block_cost, prefix_costs, PrefixCosts};
use crate::eval::pl::PiecewiseFn;
use crate::model::{Cost, Instance, JobId, MachineId, Schedule, Time};
use crate::search::moves::{Move, MoveKind, Neighborhood};

/// Start-time penalty of job `j` on machine `k`: slope `-wE` until the
/// latest on-time start `d - p`, slope `+wT` afterwards. Release dates are
/// outside this engine's scope and enter as if zero.
pub fn penalty_fn(instance: &Instance, j: JobId, k: MachineId) -> PiecewiseFn {
    PiecewiseFn::vee(
        instance.weight_early(j),
        instance.weight_tardy(j),
        instance.due(j) - instance.processing(j, k),
    )
}

/// Tail-cost functions of one machine sequence.
///
/// `g[j]` covers positions `j..=n`; `g[n + 1]` is the zero function so
/// "suffix after the end" needs no special case. `psum[j]` accumulates
/// processing times of positions `1..=j`.
#[derive(Debug, Clone)]
pub struct GRow {
    pub g: Vec<PiecewiseFn>,
    pub psum: Vec<Time>,
}

/// Builds the tail functions by the suffix recursion
/// `g[j](t) = rho_j(t) + g[j+1](t + p_j)`, merging breakpoints as it sums.
pub fn build_g_tables(seq: &[JobId], instance: &Instance, k: MachineId) -> GRow {
    let n = seq.len() - 1;
    let mut g = vec![PiecewiseFn::zero(); n + 2];
    for j in (1..=n).rev() {
        let rho = penalty_fn(instance, seq[j], k);
        g[j] = if j == n {
            rho
        } else {
            g[j + 1].shift_arg(instance.processing(seq[j], k)).add(&rho)
        };
    }
    let mut psum = vec![0; n + 1];
    for j in 1..=n {
        psum[j] = psum[j - 1] + instance.processing(seq[j], k);
    }
    GRow { g, psum }
}

impl GRow {
    /// Cost of positions `i..stop` (exclusive) when the first starts at `t`,
    /// as the difference `g[i](t) - g[stop](t + sum p)`.
    pub fn block_cost_between(&self, i: usize, stop: usize, t: Time) -> Cost {
        debug_assert!(i >= 1 && i <= stop && stop < self.g.len());
        if i == stop {
            return 0;
        }
        let width = self.psum[stop - 1] - self.psum[i - 1];
        self.g[i].eval(t) - self.g[stop].eval(t + width)
    }
}

/// One block-start entry of a processing list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProcessingEntry {
    /// Position of the block's first job in the source sequence.
    pub pos: usize,
    /// Total processing time of the block on the target machine.
    pub p: Time,
}

/// Sliding-window block processing times for all blocks of size `l` of
/// `seq`, measured on `k_target`, sorted by descending processing time
/// (ties by ascending position). Scans iterate these entries so that the
/// tail-function query points move monotonically.
pub fn create_processing_list(
    seq: &[JobId],
    instance: &Instance,
    k_target: MachineId,
    l: usize,
) -> Vec<ProcessingEntry> {
    let n = seq.len() - 1;
    if n < l {
        return Vec::new();
    }
    let mut total: Time = seq[1..=l].iter().map(|&j| instance.processing(j, k_target)).sum();
    let mut entries = Vec::with_capacity(n - l + 1);
    for pos in 1..=n - l + 1 {
        entries.push(ProcessingEntry { pos, p: total });
        if pos + l <= n {
            total += instance.processing(seq[pos + l], k_target)
                - instance.processing(seq[pos], k_target);
        }
    }
    entries.sort_by(|a, b| b.p.cmp(&a.p).then(a.pos.cmp(&b.pos)));
    entries
}

/// Move-evaluation engine for no-idle, no-setup instances.
pub struct PiecewiseEngine<'a> {
    instance: &'a Instance,
    pub prefixes: Vec<PrefixCosts>,
    pub rows: Vec<GRow>,
    total: Cost,
}

impl<'a> PiecewiseEngine<'a> {
    pub fn new(instance: &'a Instance, schedule: &Schedule) -> Self {
        debug_assert!(!instance.flags().has_setups);
        debug_assert!(!instance.flags().has_release_dates);
        debug_assert!(!instance.flags().idle_allowed);
        let mut engine = PiecewiseEngine {
            instance,
            prefixes: Vec::new(),
            rows: Vec::new(),
            total: 0,
        };
        engine.rebuild_all(schedule);
        engine
    }

    pub fn total(&self) -> Cost {
        self.total
    }

    pub fn rebuild_all(&mut self, schedule: &Schedule) {
        let inst = self.instance;
        self.prefixes = schedule
            .seq
            .iter()
            .enumerate()
            .map(|(k, seq)| prefix_costs(seq, inst, k))
            .collect();
        self.rows = schedule
            .seq
            .iter()
            .enumerate()
            .map(|(k, seq)| build_g_tables(seq, inst, k))
            .collect();
        self.total = self.prefixes.iter().map(|p| p.total()).sum();
    }

    pub fn rebuild_machine(&mut self, schedule: &Schedule, k: MachineId) {
        self.total -= self.prefixes[k].total();
        self.prefixes[k] = prefix_costs(&schedule.seq[k], self.instance, k);
        self.rows[k] = build_g_tables(&schedule.seq[k], self.instance, k);
        self.total += self.prefixes[k].total();
    }

    fn offer(best: &mut Option<Move>, cand: Move) {
        if best.as_ref().is_none_or(|b| cand.beats(b)) {
            *best = Some(cand);
        }
    }

    /// Exhaustive best-improvement scan of one neighborhood. Returns the
    /// strictly improving move with the lowest cost (ties by the shared
    /// move key) or `None`.
    pub fn scan(&self, schedule: &Schedule, neighborhood: Neighborhood) -> Option<Move> {
        let mut best: Option<Move> = None;
        match neighborhood {
            Neighborhood::InsertionIntra { l } => {
                for k in 0..schedule.seq.len() {
                    self.scan_insertion_intra(schedule, k, l, &mut best);
                }
            }
            Neighborhood::SwapIntra { l, l2 } => {
                for k in 0..schedule.seq.len() {
                    self.scan_swap_intra(schedule, k, l, l2, &mut best);
                }
            }
            Neighborhood::InsertionInter { l } => {
                for k in 0..schedule.seq.len() {
                    for k2 in 0..schedule.seq.len() {
                        if k != k2 {
                            self.scan_insertion_inter(schedule, k, k2, l, &mut best);
                        }
                    }
                }
            }
            Neighborhood::SwapInter { l, l2 } => {
                for k in 0..schedule.seq.len() {
                    for k2 in k + 1..schedule.seq.len() {
                        self.scan_swap_inter(schedule, k, k2, l, l2, &mut best);
                        if l != l2 {
                            self.scan_swap_inter(schedule, k, k2, l2, l, &mut best);
                        }
                    }
                }
            }
        }
        best.filter(|mv| mv.new_cost < schedule.cost)
    }

    fn scan_insertion_intra(&self, schedule: &Schedule, k: MachineId, l: usize, best: &mut Option<Move>) {
        let seq = &schedule.seq[k];
        let n = schedule.len(k);
        if n < l + 1 {
            return;
        }
        let pre = &self.prefixes[k];
        let row = &self.rows[k];
        let plist = create_processing_list(seq, self.instance, k, l);
        let base = self.total - pre.w[n];
        for entry in &plist {
            let (i, p_block) = (entry.pos, entry.p);
            let block = &seq[i..i + l];
            // forward: the tail functions are queried at ascending times for
            // fixed i, and per fixed j descending over the processing list
            if i <= n - l {
                let shifted_head = row.g[i + l].eval(pre.c[i - 1]);
                for j in i + l..=n {
                    let t2 = pre.c[j] - p_block;
                    let (block_cost, _) = chain_block_cost(self.instance, k, seq[j], t2, block);
                    let new_k = pre.w[i - 1]
                        + (shifted_head - row.g[j + 1].eval(t2))
                        + block_cost
                        + (pre.w[n] - pre.w[j]);
                    Self::offer(best, Move {
                        kind: MoveKind::InsertIntraFwd,
                        machine: k,
                        other: k,
                        i,
                        j,
                        l,
                        l2: 0,
                        new_cost: base + new_k,
                    });
                }
            }
            // backward
            if i >= 2 {
                let tail_anchor = row.g[i].eval(pre.c[i - 1] + p_block);
                for j in 0..=i - 2 {
                    let t = pre.c[j];
                    let (block_cost, _) = chain_block_cost(self.instance, k, seq[j], t, block);
                    let new_k = pre.w[j]
                        + block_cost
                        + (row.g[j + 1].eval(t + p_block) - tail_anchor)
                        + (pre.w[n] - pre.w[i + l - 1]);
                    Self::offer(best, Move {
                        kind: MoveKind::InsertIntraBwd,
                        machine: k,
                        other: k,
                        i,
                        j,
                        l,
                        l2: 0,
                        new_cost: base + new_k,
                    });
                }
            }
        }
    }

    fn scan_swap_intra(&self, schedule: &Schedule, k: MachineId, l: usize, l2: usize, best: &mut Option<Move>) {
        let seq = &schedule.seq[k];
        let n = schedule.len(k);
        if n < l + l2 {
            return;
        }
        let pre = &self.prefixes[k];
        let row = &self.rows[k];
        let plist_first = create_processing_list(seq, self.instance, k, l);
        let plist_second = create_processing_list(seq, self.instance, k, l2);
        let base = self.total - pre.w[n];
        for ea in &plist_first {
            let (i, p_first) = (ea.pos, ea.p);
            if i > n - l - l2 + 1 {
                continue;
            }
            let first_block = &seq[i..i + l];
            for eb in &plist_second {
                let (j, p_second) = (eb.pos, eb.p);
                if j < i + l {
                    continue;
                }
                let second_block = &seq[j..j + l2];
                let t4 = pre.c[i - 1] + p_second;
                let t5 = pre.c[j + l2 - 1] - p_first;
                let (b4_cost, _) =
                    chain_block_cost(self.instance, k, seq[i - 1], pre.c[i - 1], second_block);
                let prev_for_first = if j > i + l { seq[j - 1] } else { seq[j + l2 - 1] };
                let (b2_cost, _) = chain_block_cost(self.instance, k, prev_for_first, t5, first_block);
                let new_k = pre.w[i - 1]
                    + b4_cost
                    + (row.g[i + l].eval(t4) - row.g[j].eval(t5))
                    + b2_cost
                    + (pre.w[n] - pre.w[j + l2 - 1]);
                Self::offer(best, Move {
                    kind: MoveKind::SwapIntra,
                    machine: k,
                    other: k,
                    i,
                    j,
                    l,
                    l2,
                    new_cost: base + new_k,
                });
            }
        }
    }

    fn scan_insertion_inter(&self, schedule: &Schedule, k: MachineId, k2: MachineId, l: usize, best: &mut Option<Move>) {
        let n = schedule.len(k);
        if n < l {
            return;
        }
        let n2 = schedule.len(k2);
        let (seq, pre, row) = (&schedule.seq[k], &self.prefixes[k], &self.rows[k]);
        let (pre2, row2) = (&self.prefixes[k2], &self.rows[k2]);
        let plist = create_processing_list(seq, self.instance, k2, l);
        let base = self.total - pre.w[n] - pre2.w[n2];
        for entry in &plist {
            let (i, p_on_k2) = (entry.pos, entry.p);
            let block = &seq[i..i + l];
            let removal = pre.w[i - 1] + row.g[i + l].eval(pre.c[i - 1]);
            for j in 1..=n2 + 1 {
                let t11 = pre2.c[j - 1];
                let (block_cost, _) =
                    chain_block_cost(self.instance, k2, schedule.seq[k2][j - 1], t11, block);
                let insertion = pre2.w[j - 1] + block_cost + row2.g[j].eval(t11 + p_on_k2);
                Self::offer(best, Move {
                    kind: MoveKind::InsertInter,
                    machine: k,
                    other: k2,
                    i,
                    j,
                    l,
                    l2: 0,
                    new_cost: base + removal + insertion,
                });
            }
        }
    }

    fn scan_swap_inter(&self, schedule: &Schedule, k: MachineId, k2: MachineId, la: usize, lb: usize, best: &mut Option<Move>) {
        let n = schedule.len(k);
        let n2 = schedule.len(k2);
        if n < la || n2 < lb {
            return;
        }
        let (seq, pre, row) = (&schedule.seq[k], &self.prefixes[k], &self.rows[k]);
        let (seq2, pre2, row2) = (&schedule.seq[k2], &self.prefixes[k2], &self.rows[k2]);
        let plist_a = create_processing_list(seq, self.instance, k2, la);
        let plist_b = create_processing_list(seq2, self.instance, k, lb);
        let base = self.total - pre.w[n] - pre2.w[n2];
        for ea in &plist_a {
            let (i, p_a_on_k2) = (ea.pos, ea.p);
            let block_a = &seq[i..i + la];
            for eb in &plist_b {
                let (j, p_b_on_k) = (eb.pos, eb.p);
                let block_b = &seq2[j..j + lb];
                let (in_k_cost, _) =
                    chain_block_cost(self.instance, k, seq[i - 1], pre.c[i - 1], block_b);
                let (in_k2_cost, _) =
                    chain_block_cost(self.instance, k2, seq2[j - 1], pre2.c[j - 1], block_a);
                let new_k = pre.w[i - 1] + in_k_cost + row.g[i + la].eval(pre.c[i - 1] + p_b_on_k);
                let new_k2 =
                    pre2.w[j - 1] + in_k2_cost + row2.g[j + lb].eval(pre2.c[j - 1] + p_a_on_k2);
                Self::offer(best, Move {
                    kind: MoveKind::SwapInter,
                    machine: k,
                    other: k2,
                    i,
                    j,
                    l: la,
                    l2: lb,
                    new_cost: base + new_k + new_k2,
                });
            }
        }
    }
}
