//! Statistics over lineup-assembly study logs.
//!
//! A study log is JSON Lines, one record per assembled lineup (rater x lineup):
//!
//! ```text
//! {"raterId":"r1","lineupId":"L01","suspectId":"P0042","suspectNationality":"Czech",
//!  "shown":[{"personId":"P0007","provenance":"VISUAL","cbRank":null,"visualRank":1}, ...],
//!  "selected":["P0007"]}
//! ```
//!
//! Provenance is one of `CB`, `VISUAL`, `BOTH`; ranks are 1-based.

pub mod alpha;
pub mod special;
pub mod ttest;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write as _;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::interleave::{MergedList, Provenance};
use crate::recommenders::Strategy;
use crate::{Error, Result};

pub use alpha::{nominal_alpha, AgreementResult};
pub use ttest::{paired_t_test, TTestResult, Tail};

/// In-group used by default when splitting lineups by suspect nationality.
pub const DEFAULT_CENTRAL_EUROPE: [&str; 6] = [
    "Czech",
    "Slovak",
    "Polish",
    "German",
    "Hungarian",
    "Austrian",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ShownEntry {
    pub person_id: String,
    pub provenance: Provenance,
    #[serde(default)]
    pub cb_rank: Option<u32>,
    #[serde(default)]
    pub visual_rank: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StudyRecord {
    pub rater_id: String,
    pub lineup_id: String,
    pub suspect_id: String,
    #[serde(default)]
    pub suspect_nationality: Option<String>,
    pub shown: Vec<ShownEntry>,
    pub selected: Vec<String>,
}

impl StudyRecord {
    pub fn shown_entry(&self, person_id: &str) -> Option<&ShownEntry> {
        self.shown.iter().find(|e| e.person_id == person_id)
    }

    /// Builds a record from a displayed merged list and the chosen fillers.
    pub fn from_merged(
        rater_id: impl Into<String>,
        lineup_id: impl Into<String>,
        suspect_nationality: Option<String>,
        shown: &MergedList,
        selected: Vec<String>,
    ) -> Self {
        StudyRecord {
            rater_id: rater_id.into(),
            lineup_id: lineup_id.into(),
            suspect_id: shown.suspect_id.clone(),
            suspect_nationality,
            shown: shown
                .entries
                .iter()
                .map(|e| ShownEntry {
                    person_id: e.person_id.clone(),
                    provenance: e.provenance,
                    cb_rank: shown.rank_for(e, Strategy::Cb),
                    visual_rank: shown.rank_for(e, Strategy::Visual),
                })
                .collect(),
            selected,
        }
    }

    fn validate(&self) -> std::result::Result<(), String> {
        let mut seen = HashSet::new();
        for e in &self.shown {
            if e.provenance == Provenance::Hybrid {
                return Err(format!(
                    "{:?}: provenance must be CB, VISUAL or BOTH",
                    e.person_id
                ));
            }
            if !seen.insert(e.person_id.as_str()) {
                return Err(format!("{:?} shown twice", e.person_id));
            }
        }
        let mut picked = HashSet::new();
        for s in &self.selected {
            if !seen.contains(s.as_str()) {
                return Err(format!("selected {s:?} was not shown"));
            }
            if !picked.insert(s.as_str()) {
                return Err(format!("{s:?} selected twice"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StudyLog {
    pub records: Vec<StudyRecord>,
}

impl StudyLog {
    pub fn new(records: Vec<StudyRecord>) -> Result<Self> {
        let mut keys = HashSet::new();
        for r in &records {
            r.validate().map_err(|e| {
                Error::StudyLog(format!(
                    "rater {:?}, lineup {:?}: {e}",
                    r.rater_id, r.lineup_id
                ))
            })?;
            if !keys.insert((r.rater_id.as_str(), r.lineup_id.as_str())) {
                return Err(Error::StudyLog(format!(
                    "duplicate record for rater {:?}, lineup {:?}",
                    r.rater_id, r.lineup_id
                )));
            }
        }
        Ok(StudyLog { records })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn raters(&self) -> BTreeSet<&str> {
        self.records.iter().map(|r| r.rater_id.as_str()).collect()
    }

    pub fn lineups(&self) -> BTreeSet<&str> {
        self.records.iter().map(|r| r.lineup_id.as_str()).collect()
    }
}

pub fn load_study_log<R: BufRead>(source: R) -> Result<StudyLog> {
    let mut records = Vec::new();
    for (i, line) in source.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let r: StudyRecord = serde_json::from_str(&line).map_err(|e| Error::malformed(i + 1, e))?;
        r.validate()
            .map_err(|e| Error::StudyLog(format!("line {}: {e}", i + 1)))?;
        records.push(r);
    }
    StudyLog::new(records)
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Summary {
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation (n - 1); 0 for fewer than two values.
    pub sd: f64,
}

impl Summary {
    pub fn of(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return Summary::default();
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        let sd = if n < 2 {
            0.0
        } else {
            (xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64).sqrt()
        };
        Summary { n, mean, sd }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SelectionStats {
    pub lineups: usize,
    pub total_selections: usize,
    pub cb: usize,
    pub visual: usize,
    pub both: usize,
    /// Percentages of all selections.
    pub cb_share: f64,
    pub visual_share: f64,
    pub both_share: f64,
    pub per_lineup: Summary,
    /// Ranks of CB-only selections in the CB list.
    pub cb_rank: Summary,
    /// Ranks of VISUAL-only selections in the visual list.
    pub visual_rank: Summary,
    /// BOTH selections, ranked in each list.
    pub both_cb_rank: Summary,
    pub both_visual_rank: Summary,
    /// Mean over distinct lineups of |CB list ∩ visual list| / list length, in percent.
    pub mean_intersection_share: f64,
}

pub fn selection_stats(log: &StudyLog) -> Result<SelectionStats> {
    if log.is_empty() {
        return Err(Error::StudyLog("empty study log".into()));
    }
    let (mut cb, mut visual, mut both) = (0usize, 0usize, 0usize);
    let mut ranks: [Vec<f64>; 4] = Default::default();
    let mut per_lineup = Vec::with_capacity(log.len());
    for r in &log.records {
        per_lineup.push(r.selected.len() as f64);
        for s in &r.selected {
            let e = r.shown_entry(s).expect("validated");
            match e.provenance {
                Provenance::Cb => {
                    cb += 1;
                    ranks[0].extend(e.cb_rank.map(f64::from));
                }
                Provenance::Visual => {
                    visual += 1;
                    ranks[1].extend(e.visual_rank.map(f64::from));
                }
                Provenance::Both => {
                    both += 1;
                    ranks[2].extend(e.cb_rank.map(f64::from));
                    ranks[3].extend(e.visual_rank.map(f64::from));
                }
                Provenance::Hybrid => unreachable!("validated"),
            }
        }
    }
    let total = cb + visual + both;
    let share = |c: usize| {
        if total == 0 {
            0.0
        } else {
            100.0 * c as f64 / total as f64
        }
    };

    let mut seen = HashSet::new();
    let mut intersections = Vec::new();
    for r in &log.records {
        if !seen.insert(r.lineup_id.as_str()) {
            continue;
        }
        let in_cb = r
            .shown
            .iter()
            .filter(|e| e.cb_rank.is_some() || e.provenance == Provenance::Cb);
        let len_cb = in_cb.count();
        let len_vis = r
            .shown
            .iter()
            .filter(|e| e.visual_rank.is_some() || e.provenance == Provenance::Visual)
            .count();
        let overlap = r
            .shown
            .iter()
            .filter(|e| e.provenance == Provenance::Both)
            .count();
        let k = len_cb.max(len_vis);
        if k > 0 {
            intersections.push(100.0 * overlap as f64 / k as f64);
        }
    }

    Ok(SelectionStats {
        lineups: log.len(),
        total_selections: total,
        cb,
        visual,
        both,
        cb_share: share(cb),
        visual_share: share(visual),
        both_share: share(both),
        per_lineup: Summary::of(&per_lineup),
        cb_rank: Summary::of(&ranks[0]),
        visual_rank: Summary::of(&ranks[1]),
        both_cb_rank: Summary::of(&ranks[2]),
        both_visual_rank: Summary::of(&ranks[3]),
        mean_intersection_share: Summary::of(&intersections).mean,
    })
}

/// Per-record selection counts of single-arm candidates, `(visual, cb)`.
/// BOTH selections are counted in neither.
pub fn arm_counts(log: &StudyLog) -> (Vec<f64>, Vec<f64>) {
    log.records
        .iter()
        .map(|r| {
            let count = |p: Provenance| {
                r.selected
                    .iter()
                    .filter(|s| r.shown_entry(s).is_some_and(|e| e.provenance == p))
                    .count() as f64
            };
            (count(Provenance::Visual), count(Provenance::Cb))
        })
        .unzip()
}

/// Units are `(lineup, shown person)`; a rater's value is 1 if they selected
/// the person and 0 if they saw it without selecting. Raters who did not
/// assemble the lineup (or were not shown the person) are missing.
/// `strategy` restricts units to shown persons with that provenance.
pub fn krippendorff_alpha(log: &StudyLog, strategy: Option<Provenance>) -> Result<AgreementResult> {
    let raters: Vec<&str> = log.raters().into_iter().collect();
    let rater_pos: BTreeMap<&str, usize> =
        raters.iter().enumerate().map(|(i, r)| (*r, i)).collect();
    // (lineup, person) -> values per rater
    let mut units: BTreeMap<(&str, &str), Vec<Option<u32>>> = BTreeMap::new();
    for r in &log.records {
        let selected: HashSet<&str> = r.selected.iter().map(String::as_str).collect();
        let ri = rater_pos[r.rater_id.as_str()];
        for e in &r.shown {
            if strategy.is_some_and(|p| p != e.provenance) {
                continue;
            }
            let cells = units
                .entry((r.lineup_id.as_str(), e.person_id.as_str()))
                .or_insert_with(|| vec![None; raters.len()]);
            cells[ri] = Some(u32::from(selected.contains(e.person_id.as_str())));
        }
    }
    let table: Vec<Vec<Option<u32>>> = units.into_values().collect();
    nominal_alpha(&table, raters.len())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubgroupSplit {
    pub inside: StudyLog,
    pub outside: StudyLog,
    /// Records without a suspect nationality, routed outside.
    pub unknown_nationality: usize,
}

/// Partitions records by whether the suspect's nationality is in `in_group`.
pub fn subgroup_split<S: AsRef<str>>(log: &StudyLog, in_group: &[S]) -> SubgroupSplit {
    let set: HashSet<&str> = in_group.iter().map(AsRef::as_ref).collect();
    let mut split = SubgroupSplit {
        inside: StudyLog::default(),
        outside: StudyLog::default(),
        unknown_nationality: 0,
    };
    for r in &log.records {
        match r.suspect_nationality.as_deref() {
            Some(n) if set.contains(n) => split.inside.records.push(r.clone()),
            Some(n) if !n.is_empty() => split.outside.records.push(r.clone()),
            _ => {
                split.unknown_nationality += 1;
                split.outside.records.push(r.clone());
            }
        }
    }
    if split.unknown_nationality > 0 {
        log::warn!(
            "{} record(s) without suspect nationality routed outside the in-group",
            split.unknown_nationality
        );
    }
    split
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupReport {
    pub label: String,
    pub stats: Option<SelectionStats>,
    pub t_test: Option<TTestResult>,
    pub alpha_visual: Option<AgreementResult>,
    pub alpha_cb: Option<AgreementResult>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyReport {
    pub groups: Vec<GroupReport>,
    pub raters: usize,
}

fn group_report(label: &str, log: &StudyLog, tail: Tail) -> GroupReport {
    let (vis, cb) = arm_counts(log);
    GroupReport {
        label: label.to_string(),
        stats: selection_stats(log).ok(),
        t_test: paired_t_test(&vis, &cb, tail).ok(),
        alpha_visual: krippendorff_alpha(log, Some(Provenance::Visual)).ok(),
        alpha_cb: krippendorff_alpha(log, Some(Provenance::Cb)).ok(),
    }
}

/// All lineups plus the in-group / out-group split.
pub fn study_report<S: AsRef<str>>(log: &StudyLog, in_group: &[S], tail: Tail) -> StudyReport {
    let split = subgroup_split(log, in_group);
    StudyReport {
        groups: vec![
            group_report("All lineups", log, tail),
            group_report(
                "Lineups with suspects from Central Europe",
                &split.inside,
                tail,
            ),
            group_report(
                "Lineups with suspects outside Central Europe",
                &split.outside,
                tail,
            ),
        ],
        raters: log.raters().len(),
    }
}

impl StudyReport {
    pub fn render(&self) -> String {
        let opt = |v: Option<f64>, prec: usize| match v {
            Some(x) if x != 0.0 && x.abs() < 1e-3 => format!("{x:.1e}"),
            Some(x) => format!("{x:.prec$}"),
            None => "-".to_string(),
        };
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<12} {:>13} {:>20} {:>14} {:>18}",
            "", "Total lineups", "Selected candidates", "Paired t-test", "Level of agreement"
        );
        for g in &self.groups {
            let _ = writeln!(s, "{}", g.label);
            let st = g.stats.as_ref();
            let row = |name: &str,
                       count: Option<usize>,
                       share: Option<f64>,
                       first: bool,
                       a: Option<f64>| {
                let sel = match (count, share) {
                    (Some(c), Some(p)) => format!("{c} ({p:.0}%)"),
                    _ => "-".into(),
                };
                let lineups = if first {
                    st.map_or("0".into(), |x| x.lineups.to_string())
                } else {
                    String::new()
                };
                let p = if first {
                    opt(g.t_test.as_ref().map(|t| t.p), 3)
                } else {
                    String::new()
                };
                format!(
                    "  {name:<10} {lineups:>13} {sel:>20} {p:>14} {:>18}\n",
                    opt(a, 3)
                )
            };
            s.push_str(&row(
                "Visual-RS",
                st.map(|x| x.visual),
                st.map(|x| x.visual_share),
                true,
                g.alpha_visual.as_ref().map(|a| a.alpha),
            ));
            s.push_str(&row(
                "CB-RS",
                st.map(|x| x.cb),
                st.map(|x| x.cb_share),
                false,
                g.alpha_cb.as_ref().map(|a| a.alpha),
            ));
        }
        if let Some(all) = self.groups.first().and_then(|g| g.stats.as_ref()) {
            let _ = writeln!(s);
            let _ = writeln!(s, "raters: {}", self.raters);
            let _ = writeln!(
                s,
                "selected fillers: {} (CB {}, VISUAL {}, BOTH {})",
                all.total_selections, all.cb, all.visual, all.both
            );
            let _ = writeln!(
                s,
                "selected per lineup: mean {:.1} (sd {:.1})",
                all.per_lineup.mean, all.per_lineup.sd
            );
            let _ = writeln!(
                s,
                "mean rank: Visual-RS {:.1} (sd {:.1}), CB-RS {:.1} (sd {:.1})",
                all.visual_rank.mean, all.visual_rank.sd, all.cb_rank.mean, all.cb_rank.sd
            );
            let _ = writeln!(
                s,
                "mean list intersection: {:.2}%",
                all.mean_intersection_share
            );
        }
        s
    }
}
