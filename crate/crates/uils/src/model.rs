//! Problem data, feature classification and the reference objective.
//!
//! An [`Instance`] describes jobs on unrelated parallel machines with
//! earliness/tardiness weights, due dates, release dates and optional
//! sequence-dependent setup times. Job `0` is a dummy that heads every
//! machine sequence so that an initial setup `s[0][j]` is representable.

use thiserror::Error;

/// Integer time unit. All schedule arithmetic is exact.
pub type Time = i64;
/// Objective value unit (wide integer, never floating point).
pub type Cost = i64;
/// Job index; `0` is the dummy job.
pub type JobId = usize;
/// Machine index, `0..m`.
pub type MachineId = usize;

/// Dummy job heading every machine sequence.
pub const DUMMY: JobId = 0;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("instance must have at least one job and one machine")]
    Empty,
    #[error("job {job}: processing time on machine {machine} must be >= 1")]
    NonPositiveProcessing { job: JobId, machine: MachineId },
    #[error("job {job}: negative {field}")]
    NegativeField { job: JobId, field: &'static str },
    #[error("setup matrix for machine {machine} must be ({dim} x {dim}), including the dummy row")]
    BadSetupShape { machine: MachineId, dim: usize },
    #[error("setup s[{from}][{to}] on machine {machine} is negative")]
    NegativeSetup { from: JobId, to: JobId, machine: MachineId },
    #[error("machine {machine}: speed must be >= 1")]
    BadSpeed { machine: MachineId },
}

#[derive(Debug, Error)]
pub enum ScheduleError {
    #[error("job {0} appears {1} times across machines (expected exactly once)")]
    JobMultiplicity(JobId, usize),
    #[error("machine {0}: sequence must start with the dummy job")]
    MissingDummy(MachineId),
    #[error("machine {machine} position {position}: start {start} violates {reason}")]
    StartViolation {
        machine: MachineId,
        position: usize,
        start: Time,
        reason: String,
    },
    #[error("machine {0}: start times required when idle time is allowed")]
    MissingStarts(MachineId),
}

/// Per-job data for one real job (machine-indexed processing times).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Job {
    pub processing: Vec<Time>,
    pub due: Time,
    pub release: Time,
    pub weight_early: Cost,
    pub weight_tardy: Cost,
}

/// Structural features that select the move-evaluation engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeatureFlags {
    pub has_setups: bool,
    pub has_release_dates: bool,
    /// Any job with a positive earliness weight.
    pub has_earliness: bool,
    /// Declared by the problem variant, not derived from the data.
    pub idle_allowed: bool,
}

/// Immutable problem instance. Arrays are dimensioned `(n + 1) x m`
/// with index 0 reserved for the dummy job.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    n: usize,
    m: usize,
    /// `p[j][k]`, processing time of job j on machine k; `p[0][k] = 0`.
    p: Vec<Vec<Time>>,
    d: Vec<Time>,
    r: Vec<Time>,
    weight_early: Vec<Cost>,
    weight_tardy: Vec<Cost>,
    /// `setups[k][i][j]`, setup before j when it follows i on machine k.
    setups: Option<Vec<Vec<Vec<Time>>>>,
    idle_allowed: bool,
    flags: FeatureFlags,
}

impl Instance {
    /// Builds and validates an instance from per-job data.
    ///
    /// `setups`, when present, is one `(n + 1) x (n + 1)` matrix per machine
    /// whose row 0 holds the initial setups `s[0][j]`.
    pub fn new(
        m: usize,
        jobs: Vec<Job>,
        setups: Option<Vec<Vec<Vec<Time>>>>,
        idle_allowed: bool,
    ) -> Result<Self, ModelError> {
        let n = jobs.len();
        if n == 0 || m == 0 {
            return Err(ModelError::Empty);
        }
        let mut p = vec![vec![0; m]];
        let mut d = vec![0];
        let mut r = vec![0];
        let mut weight_early = vec![0];
        let mut weight_tardy = vec![0];
        for (idx, job) in jobs.into_iter().enumerate() {
            let j = idx + 1;
            if job.processing.len() != m {
                return Err(ModelError::NonPositiveProcessing { job: j, machine: job.processing.len() });
            }
            for (k, &pt) in job.processing.iter().enumerate() {
                if pt < 1 {
                    return Err(ModelError::NonPositiveProcessing { job: j, machine: k });
                }
            }
            if job.due < 0 {
                return Err(ModelError::NegativeField { job: j, field: "due date" });
            }
            if job.release < 0 {
                return Err(ModelError::NegativeField { job: j, field: "release date" });
            }
            if job.weight_early < 0 {
                return Err(ModelError::NegativeField { job: j, field: "earliness weight" });
            }
            if job.weight_tardy < 0 {
                return Err(ModelError::NegativeField { job: j, field: "tardiness weight" });
            }
            p.push(job.processing);
            d.push(job.due);
            r.push(job.release);
            weight_early.push(job.weight_early);
            weight_tardy.push(job.weight_tardy);
        }
        if let Some(ref s) = setups {
            if s.len() != m {
                return Err(ModelError::BadSetupShape { machine: s.len(), dim: n + 1 });
            }
            for (k, mat) in s.iter().enumerate() {
                if mat.len() != n + 1 || mat.iter().any(|row| row.len() != n + 1) {
                    return Err(ModelError::BadSetupShape { machine: k, dim: n + 1 });
                }
                for (i, row) in mat.iter().enumerate() {
                    for (j, &v) in row.iter().enumerate() {
                        if v < 0 {
                            return Err(ModelError::NegativeSetup { from: i, to: j, machine: k });
                        }
                    }
                }
            }
        }
        let has_setups = setups
            .as_ref()
            .is_some_and(|s| s.iter().flatten().flatten().any(|&v| v > 0));
        let flags = FeatureFlags {
            has_setups,
            has_release_dates: r.iter().any(|&v| v > 0),
            has_earliness: weight_early.iter().any(|&v| v > 0),
            idle_allowed,
        };
        Ok(Instance {
            n,
            m,
            p,
            d,
            r,
            weight_early,
            weight_tardy,
            setups,
            idle_allowed,
            flags,
        })
    }

    /// Uniform-machine convenience constructor: machine k runs at `speeds[k]`,
    /// so `p[j][k] = ceil(base_p[j] / speeds[k])`, folding the Q variants into
    /// the unrelated-machine representation.
    pub fn uniform(
        speeds: &[Time],
        jobs: Vec<(Time, Time, Time, Cost, Cost)>,
        idle_allowed: bool,
    ) -> Result<Self, ModelError> {
        for (k, &s) in speeds.iter().enumerate() {
            if s < 1 {
                return Err(ModelError::BadSpeed { machine: k });
            }
        }
        let jobs = jobs
            .into_iter()
            .map(|(base_p, due, release, we, wt)| Job {
                processing: speeds.iter().map(|&s| (base_p + s - 1) / s).collect(),
                due,
                release,
                weight_early: we,
                weight_tardy: wt,
            })
            .collect();
        Instance::new(speeds.len(), jobs, None, idle_allowed)
    }

    pub fn jobs(&self) -> usize {
        self.n
    }

    pub fn machines(&self) -> usize {
        self.m
    }

    pub fn flags(&self) -> FeatureFlags {
        self.flags
    }

    pub fn idle_allowed(&self) -> bool {
        self.idle_allowed
    }

    /// Re-declares the idle policy (used by the CLI `--idle` override).
    pub fn with_idle(mut self, idle_allowed: bool) -> Self {
        self.idle_allowed = idle_allowed;
        self.flags.idle_allowed = idle_allowed;
        self
    }

    #[inline]
    pub fn processing(&self, j: JobId, k: MachineId) -> Time {
        self.p[j][k]
    }

    #[inline]
    pub fn due(&self, j: JobId) -> Time {
        self.d[j]
    }

    #[inline]
    pub fn release(&self, j: JobId) -> Time {
        self.r[j]
    }

    #[inline]
    pub fn weight_early(&self, j: JobId) -> Cost {
        self.weight_early[j]
    }

    #[inline]
    pub fn weight_tardy(&self, j: JobId) -> Cost {
        self.weight_tardy[j]
    }

    #[inline]
    pub fn setup(&self, from: JobId, to: JobId, k: MachineId) -> Time {
        match &self.setups {
            Some(s) => s[k][from][to],
            None => 0,
        }
    }

    pub fn setup_matrices(&self) -> Option<&Vec<Vec<Vec<Time>>>> {
        self.setups.as_ref()
    }

    /// Earliness/tardiness penalty of completing job `j` at time `completion`.
    #[inline]
    pub fn job_cost(&self, j: JobId, completion: Time) -> Cost {
        debug_assert!(completion >= 0);
        let lateness = completion - self.d[j];
        if lateness >= 0 {
            self.weight_tardy[j] * lateness
        } else {
            self.weight_early[j] * -lateness
        }
    }

    /// Completion time of `job` when chained after a predecessor finishing at
    /// `prev_completion`: setups apply first, release dates clamp the start.
    #[inline]
    pub fn chain_completion(
        &self,
        prev: JobId,
        prev_completion: Time,
        job: JobId,
        k: MachineId,
    ) -> Time {
        let start = (prev_completion + self.setup(prev, job, k)).max(self.r[job]);
        start + self.p[job][k]
    }

    /// Objective presets derived from the general earliness-tardiness form.
    pub fn apply_objective(mut self, objective: Objective) -> Self {
        match objective {
            Objective::WeightedEarlinessTardiness => {}
            Objective::WeightedTardiness => {
                for w in self.weight_early.iter_mut() {
                    *w = 0;
                }
            }
            Objective::WeightedCompletion => {
                for w in self.weight_early.iter_mut() {
                    *w = 0;
                }
                for d in self.d.iter_mut() {
                    *d = 0;
                }
            }
            Objective::WeightedFlow => {
                for w in self.weight_early.iter_mut() {
                    *w = 0;
                }
                for j in 0..=self.n {
                    self.d[j] = self.r[j];
                }
            }
        }
        self.flags.has_earliness = self.weight_early.iter().any(|&v| v > 0);
        self
    }
}

/// Objective presets: tardiness-only, completion time (`d := 0`) and flow
/// time (`d := r`) all arise from the weighted earliness-tardiness form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    WeightedEarlinessTardiness,
    WeightedTardiness,
    WeightedCompletion,
    WeightedFlow,
}

/// Feature classification driving evaluator selection.
pub fn classify(instance: &Instance) -> FeatureFlags {
    instance.flags()
}

/// One candidate solution: a job sequence per machine (each headed by the
/// dummy) plus explicit start times when idle time is allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    /// `seq[k][0] == DUMMY`; positions `1..` hold real jobs.
    pub seq: Vec<Vec<JobId>>,
    /// Start time per position, aligned with `seq`; present iff idle allowed.
    pub starts: Option<Vec<Vec<Time>>>,
    pub cost: Cost,
}

impl Schedule {
    /// Empty schedule (dummy-only sequences) for `m` machines.
    pub fn empty(m: usize) -> Self {
        Schedule {
            seq: vec![vec![DUMMY]; m],
            starts: None,
            cost: 0,
        }
    }

    /// Number of real jobs on machine `k`.
    #[inline]
    pub fn len(&self, k: MachineId) -> usize {
        self.seq[k].len() - 1
    }

    pub fn total_jobs(&self) -> usize {
        self.seq.iter().map(|s| s.len() - 1).sum()
    }
}

/// From-scratch recomputation of the objective. This is the reference
/// every incremental evaluator is tested against.
///
/// Without idle time, completion times follow the chain recurrence
/// `C = max(C_prev + setup, r) + p`. With idle time the given start times
/// are validated and used as-is.
pub fn solution_cost(schedule: &Schedule, instance: &Instance) -> Result<Cost, ScheduleError> {
    let mut seen = vec![0usize; instance.jobs() + 1];
    for (k, seq) in schedule.seq.iter().enumerate() {
        if seq.first() != Some(&DUMMY) {
            return Err(ScheduleError::MissingDummy(k));
        }
        for &j in &seq[1..] {
            seen[j] += 1;
        }
    }
    for (j, &count) in seen.iter().enumerate().skip(1) {
        if count != 1 {
            return Err(ScheduleError::JobMultiplicity(j, count));
        }
    }

    let mut total: Cost = 0;
    if instance.idle_allowed() {
        let starts = schedule
            .starts
            .as_ref()
            .ok_or(ScheduleError::MissingStarts(0))?;
        for (k, seq) in schedule.seq.iter().enumerate() {
            let row = starts.get(k).ok_or(ScheduleError::MissingStarts(k))?;
            if row.len() != seq.len() {
                return Err(ScheduleError::MissingStarts(k));
            }
            let mut prev_completion: Time = 0;
            for pos in 1..seq.len() {
                let job = seq[pos];
                let start = row[pos];
                let earliest = (prev_completion + instance.setup(seq[pos - 1], job, k))
                    .max(instance.release(job));
                if start < earliest {
                    return Err(ScheduleError::StartViolation {
                        machine: k,
                        position: pos,
                        start,
                        reason: format!("earliest feasible start {earliest}"),
                    });
                }
                prev_completion = start + instance.processing(job, k);
                total += instance.job_cost(job, prev_completion);
            }
        }
    } else {
        for (k, seq) in schedule.seq.iter().enumerate() {
            let mut completion: Time = 0;
            for pos in 1..seq.len() {
                let job = seq[pos];
                completion = instance.chain_completion(seq[pos - 1], completion, job, k);
                total += instance.job_cost(job, completion);
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// Five jobs, one machine: p = [3,2,1,3,1], d = [8,7,4,3,13],
    /// w' = [2,1,2,1,1], w = [4,2,4,3,1]. No setups or releases.
    pub fn five_job_single_machine(idle: bool) -> Instance {
        let p = [3, 2, 1, 3, 1];
        let d = [8, 7, 4, 3, 13];
        let we = [2, 1, 2, 1, 1];
        let wt = [4, 2, 4, 3, 1];
        let jobs = (0..5)
            .map(|j| Job {
                processing: vec![p[j]],
                due: d[j],
                release: 0,
                weight_early: we[j],
                weight_tardy: wt[j],
            })
            .collect();
        Instance::new(1, jobs, None, idle).unwrap()
    }

    pub fn no_idle_schedule(seq: Vec<Vec<JobId>>) -> Schedule {
        Schedule { seq, starts: None, cost: 0 }
    }
}
