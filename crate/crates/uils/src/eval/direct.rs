//! Straightforward move evaluation for problems without idle time.
//!
//! Sequence costs follow the chain recurrence `C = max(C_prev + setup, r) + p`.
//! Cumulated prefix costs `w[j]` and completion times `c[j]` give the
//! unchanged head of a sequence in O(1); everything after the first edited
//! position is re-chained, so one move costs O(n_k). With release dates the
//! re-chaining stops early once completion times hit the old fixpoint.

use crate::model::{Cost, Instance, JobId, MachineId, Schedule, Time};
use crate::search::moves::{edits, Move, Span};

/// Cumulated cost `w[j]` and completion time `c[j]` of the first `j`
/// positions of one machine sequence (`w[0] = c[0] = 0` for the dummy).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixCosts {
    pub w: Vec<Cost>,
    pub c: Vec<Time>,
}

impl PrefixCosts {
    pub fn total(&self) -> Cost {
        *self.w.last().unwrap()
    }

    pub fn completion(&self) -> Time {
        *self.c.last().unwrap()
    }
}

/// Builds the prefix arrays for machine `k` in O(n_k).
pub fn prefix_costs(seq: &[JobId], instance: &Instance, k: MachineId) -> PrefixCosts {
    debug_assert_eq!(seq[0], crate::model::DUMMY);
    let mut w = Vec::with_capacity(seq.len());
    let mut c = Vec::with_capacity(seq.len());
    w.push(0);
    c.push(0);
    for pos in 1..seq.len() {
        let job = seq[pos];
        let completion = instance.chain_completion(seq[pos - 1], c[pos - 1], job, k);
        c.push(completion);
        w.push(w[pos - 1] + instance.job_cost(job, completion));
    }
    PrefixCosts { w, c }
}

/// Cost and final completion of chaining `jobs` on machine `k` after a
/// predecessor `prev` that finishes at `c_prev`.
pub fn chain_block_cost(
    instance: &Instance,
    k: MachineId,
    mut prev: JobId,
    mut completion: Time,
    jobs: &[JobId],
) -> (Cost, Time) {
    let mut cost = 0;
    for &job in jobs {
        completion = instance.chain_completion(prev, completion, job, k);
        cost += instance.job_cost(job, completion);
        prev = job;
    }
    (cost, completion)
}

/// Cost of the block at positions `a..=b` of `seq` when chained after the
/// job at position `b_prev` finishing at `c_at_b_prev`. An empty block
/// (`a > b`) costs nothing.
pub fn comp_cost_block(
    instance: &Instance,
    k: MachineId,
    seq: &[JobId],
    b_prev: usize,
    a: usize,
    b: usize,
    c_at_b_prev: Time,
) -> Cost {
    if a > b {
        return 0;
    }
    assert!(b < seq.len() && b_prev < seq.len(), "block indices out of range");
    assert!(a >= 1, "blocks never contain the dummy");
    chain_block_cost(instance, k, seq[b_prev], c_at_b_prev, &seq[a..=b]).0
}

/// Cost of one machine after rewriting it according to `spans`: the
/// unchanged prefix comes from `w`, the rest is re-chained. When
/// `fixpoint_exit` is set, re-chaining inside the final old-tail span stops
/// as soon as the chain state matches the stored prefix state.
pub fn machine_cost_after_edit(
    instance: &Instance,
    k: MachineId,
    old_seq: &[JobId],
    prefix: &PrefixCosts,
    spans: &[Span],
    fixpoint_exit: bool,
) -> Cost {
    let n = old_seq.len() - 1;
    let (mut cost, mut completion, mut prev) = match &spans[0] {
        Span::Old(0, b) => (prefix.w[*b], prefix.c[*b], old_seq[*b]),
        _ => unreachable!("span lists start with the old prefix"),
    };
    let last = spans.len() - 1;
    for (s_idx, span) in spans.iter().enumerate().skip(1) {
        match span {
            Span::Old(a, b) => {
                if a > b {
                    continue;
                }
                let tail = s_idx == last && *b == n;
                for pos in *a..=*b {
                    if tail
                        && fixpoint_exit
                        && completion == prefix.c[pos - 1]
                        && prev == old_seq[pos - 1]
                    {
                        return cost + (prefix.w[n] - prefix.w[pos - 1]);
                    }
                    let job = old_seq[pos];
                    completion = instance.chain_completion(prev, completion, job, k);
                    cost += instance.job_cost(job, completion);
                    prev = job;
                }
            }
            Span::Jobs(jobs) => {
                let (block_cost, block_end) = chain_block_cost(instance, k, prev, completion, jobs);
                cost += block_cost;
                completion = block_end;
                prev = *jobs.last().unwrap();
            }
        }
    }
    cost
}

/// Total schedule cost after `mv`, assembled from prefix lookups and block
/// re-chaining. Exactly equals `solution_cost` of the mutated schedule.
pub fn direct_move_cost(
    instance: &Instance,
    schedule: &Schedule,
    prefixes: &[PrefixCosts],
    mv: &Move,
) -> Cost {
    let fixpoint = instance.flags().has_release_dates;
    let mut total: Cost = prefixes.iter().map(|p| p.total()).sum();
    for (k, spans) in edits(mv, schedule) {
        total -= prefixes[k].total();
        total += machine_cost_after_edit(instance, k, &schedule.seq[k], &prefixes[k], &spans, fixpoint);
    }
    total
}

/// Move-evaluation engine built on the chain recurrence alone. Serves the
/// setup and release-date variants without idle time, and the idle variants
/// without earliness penalties (where starting every job as early as
/// possible is optimal).
pub struct DirectEngine<'a> {
    instance: &'a Instance,
    pub prefixes: Vec<PrefixCosts>,
    total: Cost,
}

impl<'a> DirectEngine<'a> {
    pub fn new(instance: &'a Instance, schedule: &Schedule) -> Self {
        let mut engine = DirectEngine { instance, prefixes: Vec::new(), total: 0 };
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
        self.total = self.prefixes.iter().map(|p| p.total()).sum();
    }

    pub fn rebuild_machine(&mut self, schedule: &Schedule, k: MachineId) {
        self.total -= self.prefixes[k].total();
        self.prefixes[k] = prefix_costs(&schedule.seq[k], self.instance, k);
        self.total += self.prefixes[k].total();
    }

    /// Earliest feasible start times for machine `k`, aligned with its
    /// sequence. Optimal whenever no job carries an earliness weight.
    pub fn earliest_starts(&self, schedule: &Schedule, k: MachineId) -> Vec<Time> {
        let seq = &schedule.seq[k];
        let pre = &self.prefixes[k];
        (0..seq.len())
            .map(|pos| pre.c[pos] - self.instance.processing(seq[pos], k))
            .collect()
    }

    pub fn scan(
        &self,
        schedule: &Schedule,
        neighborhood: crate::search::moves::Neighborhood,
    ) -> Option<Move> {
        let mut best: Option<Move> = None;
        crate::search::moves::for_each_move(schedule, neighborhood, |mut mv| {
            mv.new_cost = direct_move_cost(self.instance, schedule, &self.prefixes, &mv);
            if best.as_ref().is_none_or(|b| mv.beats(b)) {
                best = Some(mv);
            }
        });
        best.filter(|mv| mv.new_cost < schedule.cost)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::{five_job_single_machine, no_idle_schedule};
    use crate::model::{solution_cost, Instance, Job};
    use crate::search::moves::{apply_to_sequences, for_each_move, MoveKind, Neighborhood};

    #[test]
    fn prefix_costs_match_worked_values() {
        let inst = five_job_single_machine(false);
        let p = prefix_costs(&[0, 1, 2], &inst, 0);
        assert_eq!(p.c, vec![0, 3, 5]);
        assert_eq!(p.w, vec![0, 10, 12]);
        let dummy_only = prefix_costs(&[0], &inst, 0);
        assert_eq!(dummy_only.w, vec![0]);
        assert_eq!(dummy_only.c, vec![0]);
    }

    #[test]
    fn prefix_costs_with_initial_setup() {
        let mut setups = vec![vec![vec![0; 6]; 6]];
        setups[0][0][1] = 2;
        let base = five_job_single_machine(false);
        let jobs = (1..=5)
            .map(|j| Job {
                processing: vec![base.processing(j, 0)],
                due: base.due(j),
                release: 0,
                weight_early: base.weight_early(j),
                weight_tardy: base.weight_tardy(j),
            })
            .collect();
        let inst = Instance::new(1, jobs, Some(setups), false).unwrap();
        let p = prefix_costs(&[0, 1], &inst, 0);
        assert_eq!(p.c[1], 5);
        assert_eq!(p.w[1], 6);
    }

    #[test]
    fn comp_cost_block_worked_values() {
        let inst = five_job_single_machine(false);
        let seq = [0, 1, 2];
        // block (1..2) after the dummy starting from completion 0
        assert_eq!(comp_cost_block(&inst, 0, &seq, 0, 1, 2, 0), 12);
        // empty block
        assert_eq!(comp_cost_block(&inst, 0, &seq, 0, 2, 1, 0), 0);
        // block (2..2) after job 1 completing at 3
        assert_eq!(comp_cost_block(&inst, 0, &seq, 1, 2, 2, 3), 2);
    }

    #[test]
    #[should_panic(expected = "out of range")]
    fn comp_cost_block_rejects_bad_indices() {
        let inst = five_job_single_machine(false);
        comp_cost_block(&inst, 0, &[0, 1, 2], 0, 1, 7, 0);
    }

    #[test]
    fn incremental_consistency_from_any_position() {
        let inst = five_job_single_machine(false);
        let seq = [0, 4, 2, 5, 1, 3];
        let p = prefix_costs(&seq, &inst, 0);
        for start in 1..seq.len() {
            let (cost, completion) =
                chain_block_cost(&inst, 0, seq[start - 1], p.c[start - 1], &seq[start..]);
            assert_eq!(p.w.last().unwrap() - p.w[start - 1], cost);
            assert_eq!(*p.c.last().unwrap(), completion);
        }
    }

    #[test]
    fn identity_reinsertion_keeps_cost() {
        let inst = five_job_single_machine(false);
        let sched = no_idle_schedule(vec![vec![0, 1, 2, 3, 4, 5]]);
        let prefixes = vec![prefix_costs(&sched.seq[0], &inst, 0)];
        // moving block (i..i+l) right after position i+l-1 is not a legal
        // generated move, but reinserting at j = i + l keeps job order for
        // l = 1 swaps of adjacent equal jobs only; instead check the
        // backward/forward pair that reproduces the original order
        let mv = Move {
            kind: MoveKind::InsertIntraFwd,
            machine: 0,
            other: 0,
            i: 1,
            j: 2,
            l: 1,
            l2: 0,
            new_cost: 0,
        };
        let cost = direct_move_cost(&inst, &sched, &prefixes, &mv);
        let mut mutated = sched.clone();
        apply_to_sequences(&mv, &mut mutated);
        assert_eq!(cost, solution_cost(&mutated, &inst).unwrap());
    }

    #[test]
    fn table_move_matches_reference_cost() {
        let inst = five_job_single_machine(false);
        let sched = no_idle_schedule(vec![vec![0, 1, 2, 3, 4, 5]]);
        let prefixes = vec![prefix_costs(&sched.seq[0], &inst, 0)];
        // move job 4 right before job 1
        let mv = Move {
            kind: MoveKind::InsertIntraBwd,
            machine: 0,
            other: 0,
            i: 4,
            j: 0,
            l: 1,
            l2: 0,
            new_cost: 0,
        };
        let cost = direct_move_cost(&inst, &sched, &prefixes, &mv);
        let reference = no_idle_schedule(vec![vec![0, 4, 1, 2, 3, 5]]);
        assert_eq!(cost, solution_cost(&reference, &inst).unwrap());
    }

    #[test]
    fn all_neighborhood_moves_match_from_scratch_costs() {
        let inst = five_job_single_machine(false);
        let sched = no_idle_schedule(vec![vec![0, 5, 3, 1, 4, 2]]);
        let prefixes = vec![prefix_costs(&sched.seq[0], &inst, 0)];
        let neighborhoods = [
            Neighborhood::InsertionIntra { l: 1 },
            Neighborhood::InsertionIntra { l: 2 },
            Neighborhood::InsertionIntra { l: 3 },
            Neighborhood::SwapIntra { l: 1, l2: 1 },
            Neighborhood::SwapIntra { l: 1, l2: 2 },
            Neighborhood::SwapIntra { l: 2, l2: 2 },
        ];
        for neigh in neighborhoods {
            for_each_move(&sched, neigh, |mv| {
                let fast = direct_move_cost(&inst, &sched, &prefixes, &mv);
                let mut mutated = sched.clone();
                apply_to_sequences(&mv, &mut mutated);
                assert_eq!(
                    fast,
                    solution_cost(&mutated, &inst).unwrap(),
                    "move {mv:?} disagrees"
                );
            });
        }
    }

    #[test]
    fn release_dates_clamp_and_fixpoint_exit_stays_exact() {
        let jobs = vec![
            Job { processing: vec![2, 3], due: 6, release: 4, weight_early: 2, weight_tardy: 3 },
            Job { processing: vec![3, 2], due: 5, release: 0, weight_early: 1, weight_tardy: 4 },
            Job { processing: vec![1, 1], due: 9, release: 7, weight_early: 2, weight_tardy: 2 },
            Job { processing: vec![2, 2], due: 4, release: 1, weight_early: 0, weight_tardy: 5 },
            Job { processing: vec![4, 1], due: 12, release: 0, weight_early: 1, weight_tardy: 1 },
        ];
        let inst = Instance::new(2, jobs, None, false).unwrap();
        assert!(inst.flags().has_release_dates);
        let sched = no_idle_schedule(vec![vec![0, 2, 1, 3], vec![0, 4, 5]]);
        let prefixes: Vec<_> = (0..2).map(|k| prefix_costs(&sched.seq[k], &inst, k)).collect();
        for neigh in [
            Neighborhood::InsertionIntra { l: 1 },
            Neighborhood::SwapIntra { l: 1, l2: 1 },
            Neighborhood::InsertionInter { l: 1 },
            Neighborhood::InsertionInter { l: 2 },
            Neighborhood::SwapInter { l: 1, l2: 2 },
        ] {
            for_each_move(&sched, neigh, |mv| {
                let fast = direct_move_cost(&inst, &sched, &prefixes, &mv);
                let mut mutated = sched.clone();
                apply_to_sequences(&mv, &mut mutated);
                assert_eq!(fast, solution_cost(&mutated, &inst).unwrap(), "move {mv:?}");
            });
        }
    }
}
