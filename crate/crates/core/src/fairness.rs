//! Lineup fairness estimated with simulated mock witnesses.
//!
//! A mock witness never saw the offender; it only knows a short attribute
//! description of the suspect. Each simulated witness picks the lineup member
//! sharing the most tokens with the description, breaking ties uniformly at
//! random. A fair lineup spreads picks across members; a biased one
//! concentrates them on the suspect.

use std::collections::BTreeSet;

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::catalog::{Catalog, PersonRecord};
use crate::par::{self, Execution};
use crate::session::LineupRecord;
use crate::{rng, Error, Result};

const RATE_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MockDescription {
    pub tokens: BTreeSet<String>,
}

impl MockDescription {
    pub fn new(tokens: impl IntoIterator<Item = impl Into<String>>) -> Result<Self> {
        let tokens: BTreeSet<String> = tokens.into_iter().map(Into::into).collect();
        if tokens.is_empty() {
            return Err(Error::InvalidParameter(
                "description needs at least one token".into(),
            ));
        }
        Ok(MockDescription { tokens })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// Draws an `m`-token description of `suspect`: nationality and age group
/// first (when known), the rest sampled from the appearance features.
pub fn sample_description(suspect: &PersonRecord, m: usize, seed: u64) -> Result<MockDescription> {
    if m == 0 {
        return Err(Error::InvalidParameter(
            "description size must be at least 1".into(),
        ));
    }
    let available = suspect.tokens().len();
    if m > available {
        return Err(Error::InvalidParameter(format!(
            "description size {m} exceeds the {available} tokens of {:?}",
            suspect.person_id
        )));
    }
    let mut tokens: Vec<String> = suspect
        .nationality_token()
        .into_iter()
        .chain(suspect.age_token())
        .take(m)
        .collect();
    let rest = m - tokens.len();
    if rest > 0 {
        let features: Vec<&String> = suspect.features.iter().collect();
        let mut rng = rng::seeded(seed);
        tokens.extend(
            features
                .choose_multiple(&mut rng, rest)
                .map(|s| (*s).clone()),
        );
    }
    MockDescription::new(tokens)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MemberPicks {
    pub person_id: String,
    pub overlap: usize,
    pub picks: u64,
    pub pick_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FairnessReport {
    pub suspect_id: String,
    /// In lineup order.
    pub members: Vec<MemberPicks>,
    pub suspect_pick_rate: f64,
    pub effective_size: f64,
    pub witnesses: u64,
    pub seed: u64,
    pub description: Vec<String>,
    /// The description matched no member, so every pick was a uniform guess.
    pub uninformative: bool,
}

/// `1 / sum(rate^2)`; rates must be non-negative and sum to 1.
pub fn effective_size(rates: &[f64]) -> Result<f64> {
    if rates.iter().any(|r| !r.is_finite() || *r < 0.0) {
        return Err(Error::InvalidParameter(
            "pick rates must be non-negative".into(),
        ));
    }
    let sum: f64 = rates.iter().sum();
    if (sum - 1.0).abs() > RATE_SUM_TOLERANCE {
        return Err(Error::InvalidParameter(format!(
            "pick rates sum to {sum}, expected 1"
        )));
    }
    Ok(1.0 / rates.iter().map(|r| r * r).sum::<f64>())
}

/// Simulates `witnesses` mock witnesses on a finalized lineup.
pub fn simulate_mock_witnesses(
    lineup: &LineupRecord,
    catalog: &Catalog,
    description: &MockDescription,
    witnesses: u64,
    seed: u64,
) -> Result<FairnessReport> {
    let members = lineup
        .member_ids()
        .map(|id| catalog.require(id))
        .collect::<Result<Vec<_>>>()?;
    simulate_members(
        &lineup.suspect_id,
        &members,
        description,
        witnesses,
        seed,
        Execution::default(),
    )
}

/// Simulation over an explicit member list that contains the suspect.
///
/// Tie-breaking indexes the tied members sorted by id, so permuting
/// `members` permutes the report without changing any member's rate.
pub fn simulate_members(
    suspect_id: &str,
    members: &[&PersonRecord],
    description: &MockDescription,
    witnesses: u64,
    seed: u64,
    exec: Execution,
) -> Result<FairnessReport> {
    if members.len() < 2 {
        return Err(Error::InvalidParameter(
            "a lineup needs at least two members".into(),
        ));
    }
    if witnesses == 0 {
        return Err(Error::InvalidParameter(
            "at least one witness is required".into(),
        ));
    }
    let ids: BTreeSet<&str> = members.iter().map(|p| p.person_id.as_str()).collect();
    if ids.len() != members.len() {
        return Err(Error::InvalidParameter(
            "lineup members must be distinct".into(),
        ));
    }
    if !ids.contains(suspect_id) {
        return Err(Error::InvalidParameter(format!(
            "suspect {suspect_id:?} is not a lineup member"
        )));
    }
    if description.is_empty() {
        return Err(Error::InvalidParameter("empty description".into()));
    }

    let overlaps: Vec<usize> = members
        .iter()
        .map(|p| p.tokens().intersection(&description.tokens).count())
        .collect();
    let best = *overlaps.iter().max().unwrap();
    // Tied member positions, ordered by person id.
    let mut ties: Vec<usize> = (0..members.len())
        .filter(|&i| overlaps[i] == best)
        .collect();
    ties.sort_by(|&a, &b| members[a].person_id.cmp(&members[b].person_id));

    let picks = par::map_range(exec, witnesses as usize, |w| {
        let mut r = rng::substream(seed, w as u64);
        ties[r.random_range(0..ties.len())]
    });
    let mut counts = vec![0u64; members.len()];
    for p in picks {
        counts[p] += 1;
    }

    let rates: Vec<f64> = counts
        .iter()
        .map(|&c| c as f64 / witnesses as f64)
        .collect();
    let suspect_pos = members
        .iter()
        .position(|p| p.person_id == suspect_id)
        .unwrap();
    Ok(FairnessReport {
        suspect_id: suspect_id.to_string(),
        suspect_pick_rate: rates[suspect_pos],
        effective_size: effective_size(&rates)?,
        members: members
            .iter()
            .zip(&overlaps)
            .zip(counts.iter().zip(&rates))
            .map(|((p, &overlap), (&picks, &pick_rate))| MemberPicks {
                person_id: p.person_id.clone(),
                overlap,
                picks,
                pick_rate,
            })
            .collect(),
        witnesses,
        seed,
        description: description.tokens.iter().cloned().collect(),
        uninformative: best == 0,
    })
}

impl FairnessReport {
    pub fn render(&self) -> String {
        use std::fmt::Write;
        let mut s = String::new();
        let _ = writeln!(
            s,
            "description: {}\nwitnesses: {}  seed: {}",
            self.description.join(", "),
            self.witnesses,
            self.seed
        );
        for m in &self.members {
            let tag = if m.person_id == self.suspect_id {
                " (suspect)"
            } else {
                ""
            };
            let _ = writeln!(
                s,
                "  {:<16} overlap {:>2}  picks {:>7}  rate {:.4}{tag}",
                m.person_id, m.overlap, m.picks, m.pick_rate
            );
        }
        let _ = writeln!(
            s,
            "suspect pick rate: {:.4}\neffective size: {:.3}",
            self.suspect_pick_rate, self.effective_size
        );
        if self.uninformative {
            let _ = writeln!(s, "note: description matches no member; picks are guesses");
        }
        s
    }
}
