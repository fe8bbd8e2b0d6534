//! Basic and quality scoring against ground truth.

use std::collections::{BTreeMap, BTreeSet};

use crate::aiger::{MetaInfo, Status};

use super::select::category_of;
use super::{Mode, RunRecord, RunVerdict};

pub const CORRECT_POINTS: i64 = 1;
pub const WRONG_PENALTY: i64 = 4;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigScore {
    /// Correct answers.
    pub solved: usize,
    pub wrong: usize,
    pub unique: usize,
    pub points: i64,
    pub quality: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Ranking {
    pub mode: Mode,
    pub per_config: BTreeMap<String, ConfigScore>,
    /// category -> config -> solved count
    pub per_category: BTreeMap<String, BTreeMap<String, usize>>,
    /// Ground truth used per benchmark; unknown ones are unscored.
    pub truth: BTreeMap<String, Status>,
    pub notes: Vec<String>,
}

impl Ranking {
    /// Configurations best first: points, then solved count, then name.
    pub fn order(&self) -> Vec<&str> {
        let mut names: Vec<&str> = self.per_config.keys().map(String::as_str).collect();
        names.sort_by(|a, b| {
            let (x, y) = (&self.per_config[*a], &self.per_config[*b]);
            y.points
                .cmp(&x.points)
                .then(y.solved.cmp(&x.solved))
                .then(a.cmp(b))
        });
        names
    }
}

/// `max(0, 2 - log10(new / ref))`, with sizes below one gate counted as one.
pub fn quality_points(size_new: u64, size_ref: u64) -> f64 {
    let new = size_new.max(1) as f64;
    let r = size_ref.max(1) as f64;
    (2.0 - (new.log10() - r.log10())).max(0.0)
}

/// Whether a record counts as a correct answer under `truth`.
pub(super) fn judge(r: &RunRecord, truth: Status, mode: Mode) -> Option<bool> {
    if !r.verdict.finished() || truth == Status::Unknown {
        return None;
    }
    let claims = if r.verdict == RunVerdict::Realizable {
        Status::Realizable
    } else {
        Status::Unrealizable
    };
    if claims != truth {
        return Some(false);
    }
    if mode == Mode::Synthesis && claims == Status::Realizable {
        // None: the model checker ran out of time, so neither right nor wrong
        return r.verified;
    }
    Some(true)
}

fn ground_truth(
    records: &[RunRecord],
    metas: &BTreeMap<String, MetaInfo>,
    mode: Mode,
    notes: &mut Vec<String>,
) -> BTreeMap<String, Status> {
    let benches: BTreeSet<&str> = records.iter().map(|r| r.benchmark.as_str()).collect();
    let mut truth = BTreeMap::new();
    for b in benches {
        let known = metas.get(b).map(|m| m.status).unwrap_or_default();
        if known != Status::Unknown {
            truth.insert(b.to_string(), known);
            continue;
        }
        let rs: Vec<&RunRecord> = records.iter().filter(|r| r.benchmark == b).collect();
        let verified = rs.iter().any(|r| r.verified == Some(true));
        let yes = rs.iter().filter(|r| r.verdict == RunVerdict::Realizable).count();
        let no = rs.iter().filter(|r| r.verdict == RunVerdict::Unrealizable).count();
        let status = if (mode == Mode::Synthesis && verified) || yes > no {
            Status::Realizable
        } else if no > yes {
            Status::Unrealizable
        } else {
            Status::Unknown
        };
        if status != Status::Unknown {
            notes.push(format!("{b}: previously unsolved, now {status}"));
        } else if yes + no > 0 {
            notes.push(format!("{b}: tied vote ({yes} realizable, {no} unrealizable), left unscored"));
        }
        truth.insert(b.to_string(), status);
    }
    truth
}

/// Scores one track. Basic points are +1 per correct and -4 per wrong answer.
/// The quality total (synthesis mode) replaces the +1 of a verified solution
/// by its size-dependent points and keeps the rest of the scheme.
pub fn score(records: &[RunRecord], metas: &BTreeMap<String, MetaInfo>, mode: Mode) -> Ranking {
    let mut notes = Vec::new();
    let truth = ground_truth(records, metas, mode, &mut notes);
    let mut per_config: BTreeMap<String, ConfigScore> = BTreeMap::new();
    let mut per_category: BTreeMap<String, BTreeMap<String, usize>> = BTreeMap::new();
    let mut solvers: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for r in records {
        per_config.entry(r.config.clone()).or_default();
        let cat = per_category.entry(category_of(&r.benchmark)).or_default();
        cat.entry(r.config.clone()).or_default();
        let t = truth.get(&r.benchmark).copied().unwrap_or_default();
        match judge(r, t, mode) {
            Some(true) => {
                let s = per_config.get_mut(&r.config).expect("inserted");
                s.solved += 1;
                s.points += CORRECT_POINTS;
                *cat.get_mut(&r.config).expect("inserted") += 1;
                solvers.entry(&r.benchmark).or_default().push(&r.config);
            }
            Some(false) => {
                let s = per_config.get_mut(&r.config).expect("inserted");
                s.wrong += 1;
                s.points -= WRONG_PENALTY;
                if mode == Mode::Synthesis {
                    s.quality -= WRONG_PENALTY as f64;
                }
                notes.push(format!("{}: wrong answer by {}", r.benchmark, r.config));
            }
            None => {}
        }
    }
    for cs in solvers.values() {
        if let [only] = cs.as_slice() {
            per_config.get_mut(*only).expect("inserted").unique += 1;
        }
    }
    if mode == Mode::Synthesis {
        for (b, t) in &truth {
            if *t != Status::Realizable {
                continue;
            }
            let from_meta = metas.get(b).and_then(|m| m.ref_size).filter(|&s| s > 0);
            let from_run = records
                .iter()
                .filter(|r| &r.benchmark == b && r.verified == Some(true))
                .filter_map(|r| r.solution_size)
                .min();
            let Some(reference) = from_meta.or(from_run) else {
                notes.push(format!("{b}: no verified solution and no reference size, excluded from quality"));
                continue;
            };
            for r in records.iter().filter(|r| &r.benchmark == b) {
                if judge(r, *t, mode) == Some(true) {
                    let size = r.solution_size.unwrap_or(0);
                    per_config.get_mut(&r.config).expect("inserted").quality += quality_points(size, reference);
                }
            }
        }
        for r in records {
            let t = truth.get(&r.benchmark).copied().unwrap_or_default();
            if t == Status::Unrealizable && judge(r, t, mode) == Some(true) {
                per_config.get_mut(&r.config).expect("inserted").quality += 1.0;
            }
        }
    }
    Ranking {
        mode,
        per_config,
        per_category,
        truth,
        notes,
    }
}

pub fn score_basic(records: &[RunRecord], metas: &BTreeMap<String, MetaInfo>) -> Ranking {
    score(records, metas, Mode::Realizability)
}

pub fn score_quality(records: &[RunRecord], metas: &BTreeMap<String, MetaInfo>) -> Ranking {
    score(records, metas, Mode::Synthesis)
}
