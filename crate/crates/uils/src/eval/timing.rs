//! Optimal idle-time insertion for a fixed sequence, and move evaluation by
//! concatenating boundary functions.
//!
//! The timing problem is solved by a dynamic program over convex
//! piecewise-linear functions: a forward pass alternates "shift by the
//! processing/setup gap, clip at the release bound, add the completion
//! penalty" with a running-minimum flattening step. Forward functions give
//! the best cost of a prefix whose last job completes at or before `t`;
//! backward functions the best cost of a suffix whose first job starts at
//! or after `t`. A move is then costed as forward prefix + explicitly
//! re-chained middle jobs + backward suffix, joined by minimising the sum
//! of two convex functions, without re-running the full DP.
//!
//! Release dates are hard lower bounds on the DP domain rather than
//! penalised segments, which keeps all arithmetic exact.

use crate::eval::direct::chain_block_cost;
use crate::eval::pl::{min_sum_shifted, PiecewiseFn};
use crate::model::{Cost, Instance, JobId, MachineId, Schedule, Time, DUMMY};
use crate::search::moves::{concat_parts, edits, Move, Neighborhood};

/// Boundary functions of one machine sequence.
///
/// `forward[j]` covers positions `1..=j` (index 0 = empty prefix) as a
/// function of the completion bound of position `j`; `backward[j]` covers
/// positions `j..=n` (index `n + 1` = empty suffix) as a function of the
/// earliest allowed start of position `j`.
#[derive(Debug, Clone)]
pub struct MachineTiming {
    pub forward: Vec<PiecewiseFn>,
    pub backward: Vec<PiecewiseFn>,
    pub cost: Cost,
}

/// Unflattened completion-cost function of one more job appended to prefix
/// function `f`: domain shifts by setup + processing, clips at the earliest
/// feasible completion, and the job's completion penalty is added.
fn extend_forward(
    f: &PiecewiseFn,
    instance: &Instance,
    k: MachineId,
    prev: JobId,
    job: JobId,
) -> PiecewiseFn {
    let gap = instance.setup(prev, job, k) + instance.processing(job, k);
    let penalty = PiecewiseFn::vee(
        instance.weight_early(job),
        instance.weight_tardy(job),
        instance.due(job),
    );
    f.shift_arg(-gap)
        .clip_below(instance.release(job) + instance.processing(job, k))
        .add(&penalty)
}

/// Start-cost function of one more job prepended to suffix function
/// `b_next` (which belongs to `next`, if any).
fn prepend_backward(
    b_next: Option<(&PiecewiseFn, JobId)>,
    instance: &Instance,
    k: MachineId,
    job: JobId,
) -> PiecewiseFn {
    let p = instance.processing(job, k);
    let rho = PiecewiseFn::vee(
        instance.weight_early(job),
        instance.weight_tardy(job),
        instance.due(job) - p,
    );
    let chained = match b_next {
        Some((b, next)) => rho.add(&b.shift_arg(p + instance.setup(job, next, k))),
        None => rho,
    };
    chained.clip_below(instance.release(job)).suffix_min_flatten()
}

/// Builds forward and backward boundary functions for machine `k` in
/// O(n_k * delta_k) segment work.
pub fn build_boundary_fns(seq: &[JobId], instance: &Instance, k: MachineId) -> MachineTiming {
    debug_assert_eq!(seq[0], DUMMY);
    let n = seq.len() - 1;
    let mut forward = Vec::with_capacity(n + 1);
    forward.push(PiecewiseFn::zero());
    for pos in 1..=n {
        let h = extend_forward(&forward[pos - 1], instance, k, seq[pos - 1], seq[pos]);
        forward.push(h.prefix_min_flatten());
    }
    let mut backward = vec![PiecewiseFn::zero(); n + 2];
    for pos in (1..=n).rev() {
        let next = if pos == n { None } else { Some((&backward[pos + 1], seq[pos + 1])) };
        backward[pos] = prepend_backward(next, instance, k, seq[pos]);
    }
    let cost = forward[n].min_value();
    MachineTiming { forward, backward, cost }
}

/// Optimal start times for a fixed sequence and their total penalty.
///
/// The returned vector is aligned with `seq` (`starts[0] = 0` for the
/// dummy). Among optimal schedules, each backward-recovery step picks the
/// earliest optimal completion.
pub fn optimal_timing(seq: &[JobId], instance: &Instance, k: MachineId) -> (Vec<Time>, Cost) {
    debug_assert_eq!(seq[0], DUMMY);
    let n = seq.len() - 1;
    if n == 0 {
        return (vec![0], 0);
    }
    let mut unflattened = Vec::with_capacity(n + 1);
    unflattened.push(PiecewiseFn::zero());
    let mut flattened = PiecewiseFn::zero();
    for pos in 1..=n {
        let h = extend_forward(&flattened, instance, k, seq[pos - 1], seq[pos]);
        flattened = h.prefix_min_flatten();
        unflattened.push(h);
    }
    let (last, cost) = unflattened[n].earliest_argmin();
    let mut completion = vec![0; n + 1];
    completion[n] = last;
    for pos in (1..n).rev() {
        let gap = instance.setup(seq[pos], seq[pos + 1], k) + instance.processing(seq[pos + 1], k);
        let bound = completion[pos + 1] - gap;
        let (argmin, _) = unflattened[pos].earliest_argmin();
        completion[pos] = argmin.min(bound);
        debug_assert!(completion[pos] >= unflattened[pos].domain_start());
    }
    let mut starts = vec![0; n + 1];
    for pos in 1..=n {
        starts[pos] = completion[pos] - instance.processing(seq[pos], k);
    }
    (starts, cost)
}

/// Minimum penalty of `prefix (old positions 1..=prefix_end)` + `middle`
/// jobs + `suffix (old positions suffix_start..)`, composed from the
/// precomputed boundary functions. Exactly equals `optimal_timing` on the
/// assembled sequence.
pub fn eval_concat(
    instance: &Instance,
    k: MachineId,
    timing: &MachineTiming,
    old_seq: &[JobId],
    prefix_end: usize,
    middle: &[JobId],
    suffix_start: usize,
) -> Cost {
    let n = old_seq.len() - 1;
    let mut f = timing.forward[prefix_end].clone();
    let mut prev = old_seq[prefix_end];
    for &job in middle {
        f = extend_forward(&f, instance, k, prev, job).prefix_min_flatten();
        prev = job;
    }
    if suffix_start > n {
        return f.min_value();
    }
    let gap = instance.setup(prev, old_seq[suffix_start], k);
    min_sum_shifted(&f, &timing.backward[suffix_start], gap)
}

/// Total segment count of the job penalty functions on machine `k`; the
/// DP and concatenation costs scale with this number.
pub fn segment_budget(seq: &[JobId], instance: &Instance, k: MachineId) -> usize {
    seq[1..]
        .iter()
        .map(|&j| {
            PiecewiseFn::vee(
                instance.weight_early(j),
                instance.weight_tardy(j),
                instance.due(j) - instance.processing(j, k),
            )
            .segments()
            .len()
        })
        .sum()
}

/// Move-evaluation engine for problems with idle time and earliness
/// penalties.
pub struct TimingEngine<'a> {
    instance: &'a Instance,
    pub tables: Vec<MachineTiming>,
    total: Cost,
}

impl<'a> TimingEngine<'a> {
    pub fn new(instance: &'a Instance, schedule: &Schedule) -> Self {
        debug_assert!(instance.flags().idle_allowed);
        let mut engine = TimingEngine { instance, tables: Vec::new(), total: 0 };
        engine.rebuild_all(schedule);
        engine
    }

    pub fn total(&self) -> Cost {
        self.total
    }

    pub fn rebuild_all(&mut self, schedule: &Schedule) {
        let inst = self.instance;
        self.tables = schedule
            .seq
            .iter()
            .enumerate()
            .map(|(k, seq)| build_boundary_fns(seq, inst, k))
            .collect();
        self.total = self.tables.iter().map(|t| t.cost).sum();
    }

    pub fn rebuild_machine(&mut self, schedule: &Schedule, k: MachineId) {
        self.total -= self.tables[k].cost;
        self.tables[k] = build_boundary_fns(&schedule.seq[k], self.instance, k);
        self.total += self.tables[k].cost;
    }

    /// Total schedule cost after `mv`, with per-machine optimal timing.
    pub fn move_cost(&self, schedule: &Schedule, mv: &Move) -> Cost {
        let mut total = self.total;
        for (k, spans) in edits(mv, schedule) {
            let parts = concat_parts(&schedule.seq[k], &spans);
            total -= self.tables[k].cost;
            total += eval_concat(
                self.instance,
                k,
                &self.tables[k],
                &schedule.seq[k],
                parts.prefix_end,
                &parts.middle,
                parts.suffix_start,
            );
        }
        total
    }

    pub fn scan(&self, schedule: &Schedule, neighborhood: Neighborhood) -> Option<Move> {
        let mut best: Option<Move> = None;
        crate::search::moves::for_each_move(schedule, neighborhood, |mut mv| {
            mv.new_cost = self.move_cost(schedule, &mv);
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
    use crate::model::fixtures::five_job_single_machine;
    use crate::model::{solution_cost, Instance, Job, Schedule};
    use crate::search::moves::apply_to_sequences;

    #[test]
    fn single_job_meets_due_date_exactly() {
        let inst = five_job_single_machine(true);
        let (starts, cost) = optimal_timing(&[0, 1], &inst, 0);
        assert_eq!(cost, 0);
        assert_eq!(starts, vec![0, 5]);
    }

    #[test]
    fn two_jobs_pack_onto_their_due_dates() {
        let inst = five_job_single_machine(true);
        let (starts, cost) = optimal_timing(&[0, 4, 1], &inst, 0);
        assert_eq!(cost, 0);
        assert_eq!(starts, vec![0, 0, 5]);
    }

    #[test]
    fn earliest_optimal_start_is_chosen() {
        // one job with zero tardiness weight: any start >= d - p is optimal,
        // the earliest optimal completion is exactly d
        let inst = Instance::new(
            1,
            vec![Job { processing: vec![2], due: 7, release: 0, weight_early: 3, weight_tardy: 0 }],
            None,
            true,
        )
        .unwrap();
        let (starts, cost) = optimal_timing(&[0, 1], &inst, 0);
        assert_eq!(cost, 0);
        assert_eq!(starts[1], 5);
    }

    #[test]
    fn release_dates_are_hard_bounds() {
        let inst = Instance::new(
            1,
            vec![
                Job { processing: vec![2], due: 2, release: 4, weight_early: 5, weight_tardy: 7 },
                Job { processing: vec![3], due: 20, release: 0, weight_early: 1, weight_tardy: 1 },
            ],
            None,
            true,
        )
        .unwrap();
        let (starts, cost) = optimal_timing(&[0, 1, 2], &inst, 0);
        // job 1 cannot start before its release even though it is tardy
        assert_eq!(starts[1], 4);
        // job 2 waits for its due date
        assert_eq!(starts[2], 17);
        assert_eq!(cost, 7 * 4);
        let s = Schedule { seq: vec![vec![0, 1, 2]], starts: Some(vec![starts]), cost };
        assert_eq!(solution_cost(&s, &inst).unwrap(), cost);
    }

    #[test]
    fn boundary_fns_agree_with_full_dp() {
        let inst = five_job_single_machine(true);
        let seq = [0, 3, 1, 4, 2, 5];
        let timing = build_boundary_fns(&seq, &inst, 0);
        let (_, cost) = optimal_timing(&seq, &inst, 0);
        assert_eq!(timing.forward[5].min_value(), cost);
        assert_eq!(timing.cost, cost);
        // empty prefix and empty suffix are the zero function
        assert_eq!(timing.forward[0], PiecewiseFn::zero());
        assert_eq!(timing.backward[6], PiecewiseFn::zero());
        // forward functions flatten, backward functions plateau
        for f in &timing.forward {
            assert!(f.is_convex());
            assert!(f.segments().windows(2).all(|w| w[0].slope <= w[1].slope));
            assert!(f.segments().last().unwrap().slope == 0);
        }
        for b in &timing.backward {
            assert!(b.is_convex());
            assert!(b.segments().first().unwrap().slope == 0);
        }
    }

    #[test]
    fn concat_of_whole_prefix_reproduces_dp_cost() {
        let inst = five_job_single_machine(true);
        let seq = [0, 2, 4, 1, 5, 3];
        let timing = build_boundary_fns(&seq, &inst, 0);
        let (_, cost) = optimal_timing(&seq, &inst, 0);
        assert_eq!(eval_concat(&inst, 0, &timing, &seq, 5, &[], 6), cost);
        assert_eq!(eval_concat(&inst, 0, &timing, &seq, 0, &[], 1), cost);
        assert_eq!(eval_concat(&inst, 0, &timing, &seq, 2, &[], 3), cost);
    }

    #[test]
    fn concat_with_rechained_middle_matches_dp_on_mutation() {
        let inst = five_job_single_machine(true);
        let seq = vec![0, 5, 2, 3, 1, 4];
        let timing = build_boundary_fns(&seq, &inst, 0);
        // reinsert block (2..3) after position 4: prefix 1, middle 1 4 5 2...
        let mv = Move {
            kind: crate::search::moves::MoveKind::InsertIntraFwd,
            machine: 0,
            other: 0,
            i: 2,
            j: 4,
            l: 2,
            l2: 0,
            new_cost: 0,
        };
        let sched = Schedule { seq: vec![seq.clone()], starts: None, cost: 0 };
        let spans = &edits(&mv, &sched)[0].1;
        let parts = concat_parts(&seq, spans);
        let fast = eval_concat(&inst, 0, &timing, &seq, parts.prefix_end, &parts.middle, parts.suffix_start);
        let mut mutated = sched.clone();
        apply_to_sequences(&mv, &mut mutated);
        let (_, reference) = optimal_timing(&mutated.seq[0], &inst, 0);
        assert_eq!(fast, reference);
    }

    #[test]
    fn idle_never_costs_more_than_no_idle() {
        let inst = five_job_single_machine(true);
        let no_idle = five_job_single_machine(false);
        let perms: [[usize; 5]; 4] =
            [[1, 2, 3, 4, 5], [5, 4, 3, 2, 1], [3, 4, 2, 1, 5], [2, 1, 5, 3, 4]];
        for perm in perms {
            let mut seq = vec![0];
            seq.extend_from_slice(&perm);
            let (_, idle_cost) = optimal_timing(&seq, &inst, 0);
            let s = Schedule { seq: vec![seq], starts: None, cost: 0 };
            let chained = solution_cost(&s, &no_idle).unwrap();
            assert!(idle_cost <= chained, "{perm:?}: {idle_cost} > {chained}");
        }
    }

    #[test]
    fn setups_enter_as_fixed_gaps() {
        let mut setups = vec![vec![vec![0; 3]; 3]];
        setups[0][0][1] = 1;
        setups[0][1][2] = 3;
        setups[0][2][1] = 2;
        let inst = Instance::new(
            1,
            vec![
                Job { processing: vec![2], due: 5, release: 0, weight_early: 2, weight_tardy: 2 },
                Job { processing: vec![2], due: 30, release: 0, weight_early: 4, weight_tardy: 1 },
            ],
            Some(setups),
            true,
        )
        .unwrap();
        let (starts, cost) = optimal_timing(&[0, 1, 2], &inst, 0);
        // job 1 on time at start 3, job 2 waits for its due date
        assert_eq!(cost, 0);
        assert_eq!(starts, vec![0, 3, 28]);
        // start of job 2 respects completion + setup when pushed together
        let (starts2, cost2) = optimal_timing(&[0, 2, 1], &inst, 0);
        let s = Schedule { seq: vec![vec![0, 2, 1]], starts: Some(vec![starts2.clone()]), cost: cost2 };
        assert_eq!(solution_cost(&s, &inst).unwrap(), cost2);
        assert!(starts2[2] >= starts2[1] + 2 + 2);
    }

    #[test]
    fn segment_budget_counts_rho_segments() {
        let inst = five_job_single_machine(true);
        // jobs 1, 2, 3 and 5 have two-segment penalties; job 4 starts tardy
        // right away (d = p) and contributes a single ray
        assert_eq!(segment_budget(&[0, 1, 2, 3, 4, 5], &inst, 0), 9);
    }
}
