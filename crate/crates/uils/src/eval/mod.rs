//! Move-evaluation engines and their feature-based selection.
//!
//! Without idle time, setup times or release dates force the direct chain
//! evaluator; otherwise the piecewise tail-function engine applies. With
//! idle time the timing DP is needed exactly when earliness penalties
//! exist; otherwise starting every job as early as possible is optimal and
//! the direct evaluator covers the variant.

pub mod direct;
pub mod piecewise;
pub mod pl;
pub mod timing;

use crate::model::{Cost, FeatureFlags, Instance, Schedule};
use crate::search::moves::{apply_to_sequences, edits, Move, Neighborhood};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineKind {
    Direct,
    Piecewise,
    Timing,
}

/// Pure function of the feature flags.
pub fn select_engine(flags: FeatureFlags) -> EngineKind {
    if flags.idle_allowed {
        if flags.has_earliness {
            EngineKind::Timing
        } else {
            EngineKind::Direct
        }
    } else if flags.has_setups || flags.has_release_dates {
        EngineKind::Direct
    } else {
        EngineKind::Piecewise
    }
}

/// Cost of a schedule's sequences under the variant's timing policy:
/// optimal idle insertion when idle is allowed, chain completion otherwise.
pub fn sequence_policy_cost(schedule: &Schedule, instance: &Instance) -> Cost {
    if instance.idle_allowed() {
        (0..schedule.seq.len())
            .map(|k| timing::optimal_timing(&schedule.seq[k], instance, k).1)
            .sum()
    } else {
        (0..schedule.seq.len())
            .map(|k| direct::prefix_costs(&schedule.seq[k], instance, k).total())
            .sum()
    }
}

pub enum Engine<'a> {
    Direct(direct::DirectEngine<'a>),
    Piecewise(piecewise::PiecewiseEngine<'a>),
    Timing(timing::TimingEngine<'a>),
}

impl<'a> Engine<'a> {
    /// Builds the engine Fig-1-style from the instance features.
    pub fn new(instance: &'a Instance, schedule: &Schedule) -> Self {
        match select_engine(instance.flags()) {
            EngineKind::Direct => Engine::Direct(direct::DirectEngine::new(instance, schedule)),
            EngineKind::Piecewise => {
                Engine::Piecewise(piecewise::PiecewiseEngine::new(instance, schedule))
            }
            EngineKind::Timing => Engine::Timing(timing::TimingEngine::new(instance, schedule)),
        }
    }

    pub fn kind(&self) -> EngineKind {
        match self {
            Engine::Direct(_) => EngineKind::Direct,
            Engine::Piecewise(_) => EngineKind::Piecewise,
            Engine::Timing(_) => EngineKind::Timing,
        }
    }

    pub fn total(&self) -> Cost {
        match self {
            Engine::Direct(e) => e.total(),
            Engine::Piecewise(e) => e.total(),
            Engine::Timing(e) => e.total(),
        }
    }

    /// Best strictly improving move of the neighborhood, or `None`.
    pub fn scan(&self, schedule: &Schedule, neighborhood: Neighborhood) -> Option<Move> {
        match self {
            Engine::Direct(e) => e.scan(schedule, neighborhood),
            Engine::Piecewise(e) => e.scan(schedule, neighborhood),
            Engine::Timing(e) => e.scan(schedule, neighborhood),
        }
    }

    /// Rebuilds all caches from the schedule sequences and stamps the
    /// schedule with its cost and (for idle variants) start times.
    pub fn refresh(&mut self, instance: &Instance, schedule: &mut Schedule) {
        match self {
            Engine::Direct(e) => e.rebuild_all(schedule),
            Engine::Piecewise(e) => e.rebuild_all(schedule),
            Engine::Timing(e) => e.rebuild_all(schedule),
        }
        self.stamp(instance, schedule, None);
        schedule.cost = self.total();
    }

    /// Applies an accepted move: rewrites the sequences, refreshes caches of
    /// the touched machines only, and stamps cost and start times.
    pub fn apply(&mut self, instance: &Instance, schedule: &mut Schedule, mv: &Move) {
        let touched: Vec<usize> = edits(mv, schedule).iter().map(|(k, _)| *k).collect();
        apply_to_sequences(mv, schedule);
        for &k in &touched {
            match self {
                Engine::Direct(e) => e.rebuild_machine(schedule, k),
                Engine::Piecewise(e) => e.rebuild_machine(schedule, k),
                Engine::Timing(e) => e.rebuild_machine(schedule, k),
            }
        }
        self.stamp(instance, schedule, Some(&touched));
        schedule.cost = mv.new_cost;
        debug_assert_eq!(
            mv.new_cost,
            self.total(),
            "move cost must match rebuilt machine costs"
        );
        debug_assert_eq!(
            crate::model::solution_cost(schedule, instance).unwrap(),
            mv.new_cost,
            "move cost must match the from-scratch objective"
        );
    }

    /// Writes start times for idle variants (all machines, or only the
    /// listed ones).
    fn stamp(&self, instance: &Instance, schedule: &mut Schedule, touched: Option<&[usize]>) {
        if !instance.idle_allowed() {
            schedule.starts = None;
            return;
        }
        let m = schedule.seq.len();
        if schedule.starts.as_ref().is_none_or(|s| s.len() != m) || touched.is_none() {
            let rows = (0..m).map(|k| self.machine_starts(instance, schedule, k)).collect();
            schedule.starts = Some(rows);
            return;
        }
        let rows = schedule.starts.as_mut().unwrap();
        for &k in touched.unwrap() {
            rows[k] = self.machine_starts(instance, schedule, k);
        }
    }

    fn machine_starts(&self, instance: &Instance, schedule: &Schedule, k: usize) -> Vec<i64> {
        match self {
            Engine::Timing(_) => timing::optimal_timing(&schedule.seq[k], instance, k).0,
            Engine::Direct(e) => e.earliest_starts(schedule, k),
            Engine::Piecewise(_) => unreachable!("piecewise engine never runs idle variants"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{FeatureFlags, Instance, Job};

    fn flags(setups: bool, releases: bool, earliness: bool, idle: bool) -> FeatureFlags {
        FeatureFlags {
            has_setups: setups,
            has_release_dates: releases,
            has_earliness: earliness,
            idle_allowed: idle,
        }
    }

    #[test]
    fn engine_selection_follows_feature_flags() {
        assert_eq!(select_engine(flags(false, false, true, false)), EngineKind::Piecewise);
        assert_eq!(select_engine(flags(false, false, false, false)), EngineKind::Piecewise);
        assert_eq!(select_engine(flags(true, false, true, false)), EngineKind::Direct);
        assert_eq!(select_engine(flags(false, true, false, false)), EngineKind::Direct);
        assert_eq!(select_engine(flags(true, true, true, true)), EngineKind::Timing);
        assert_eq!(select_engine(flags(true, true, false, true)), EngineKind::Direct);
    }

    #[test]
    fn direct_engine_serves_idle_without_earliness() {
        let inst = Instance::new(
            1,
            vec![
                Job { processing: vec![2], due: 4, release: 3, weight_early: 0, weight_tardy: 2 },
                Job { processing: vec![1], due: 2, release: 0, weight_early: 0, weight_tardy: 5 },
            ],
            None,
            true,
        )
        .unwrap();
        let mut schedule = crate::model::Schedule {
            seq: vec![vec![0, 2, 1]],
            starts: None,
            cost: 0,
        };
        let mut engine = Engine::new(&inst, &schedule);
        assert_eq!(engine.kind(), EngineKind::Direct);
        engine.refresh(&inst, &mut schedule);
        // earliest starts are optimal without earliness weights
        assert_eq!(schedule.starts, Some(vec![vec![0, 0, 3]]));
        assert_eq!(
            schedule.cost,
            crate::model::solution_cost(&schedule, &inst).unwrap()
        );
        assert_eq!(schedule.cost, sequence_policy_cost(&schedule, &inst));
    }
}
