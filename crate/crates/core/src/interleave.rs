//! Random interleaving of two ranked lists.
//!
//! A fair coin, seeded and recorded in the output, picks which arm supplies
//! the next display slot. Each arm is consumed strictly in order, so the
//! entries an arm contributes keep that arm's relative order. A candidate
//! proposed by both arms is shown once, with provenance [`Provenance::Both`].

use std::collections::{HashMap, HashSet};

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::recommenders::{RankedList, Strategy};
use crate::{rng, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Arm {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Provenance {
    Cb,
    Visual,
    Hybrid,
    Both,
}

impl From<Strategy> for Provenance {
    fn from(s: Strategy) -> Self {
        match s {
            Strategy::Cb => Provenance::Cb,
            Strategy::Visual => Provenance::Visual,
            Strategy::Hybrid => Provenance::Hybrid,
        }
    }
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Provenance::Cb => "CB",
            Provenance::Visual => "VISUAL",
            Provenance::Hybrid => "HYBRID",
            Provenance::Both => "BOTH",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MergedEntry {
    pub person_id: String,
    pub provenance: Provenance,
    /// The arm whose head produced this slot.
    pub drawn_from: Arm,
    /// 1-based rank in list A, if present there.
    pub rank_a: Option<u32>,
    /// 1-based rank in list B, if present there.
    pub rank_b: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MergedList {
    pub suspect_id: String,
    pub strategy_a: Strategy,
    pub strategy_b: Strategy,
    pub seed: u64,
    pub entries: Vec<MergedEntry>,
}

impl MergedList {
    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.person_id.as_str())
    }

    pub fn get(&self, person_id: &str) -> Option<&MergedEntry> {
        self.entries.iter().find(|e| e.person_id == person_id)
    }

    pub fn contains(&self, person_id: &str) -> bool {
        self.get(person_id).is_some()
    }

    /// Rank of `entry` in the source list of `strategy`, if that arm proposed it.
    pub fn rank_for(&self, entry: &MergedEntry, strategy: Strategy) -> Option<u32> {
        if self.strategy_a == strategy && entry.rank_a.is_some() {
            entry.rank_a
        } else if self.strategy_b == strategy {
            entry.rank_b
        } else {
            None
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn rank_map(list: &RankedList) -> Result<HashMap<&str, u32>> {
    let mut m = HashMap::with_capacity(list.len());
    for (i, id) in list.ids().enumerate() {
        if m.insert(id, i as u32 + 1).is_some() {
            return Err(Error::DuplicateInList(id.to_string()));
        }
    }
    Ok(m)
}

/// Interleaves with a ChaCha8 coin seeded by `seed`.
pub fn interleave_lists(a: &RankedList, b: &RankedList, seed: u64) -> Result<MergedList> {
    let mut rng = rng::seeded(seed);
    interleave_with_coin(a, b, seed, || {
        if rng.next_u32() >> 31 == 0 {
            Arm::A
        } else {
            Arm::B
        }
    })
}

/// Interleaves with an arbitrary coin. `seed` is only recorded.
///
/// The coin is flipped once per step while both arms have entries. A chosen
/// head that was already emitted through the other arm is skipped and the
/// same arm's next head is used within the same step. Once an arm runs out
/// the other is drained.
pub fn interleave_with_coin<F>(
    a: &RankedList,
    b: &RankedList,
    seed: u64,
    mut coin: F,
) -> Result<MergedList>
where
    F: FnMut() -> Arm,
{
    let ranks_a = rank_map(a)?;
    let ranks_b = rank_map(b)?;
    let prov_a = Provenance::from(a.strategy);
    let prov_b = Provenance::from(b.strategy);
    let (list_a, list_b): (Vec<&str>, Vec<&str>) = (a.ids().collect(), b.ids().collect());
    let (mut ia, mut ib) = (0usize, 0usize);
    let mut emitted: HashSet<&str> = HashSet::new();
    let mut entries = Vec::with_capacity(list_a.len() + list_b.len());

    let mut emit_from = |arm: Arm, ia: &mut usize, ib: &mut usize| {
        let (list, pos) = match arm {
            Arm::A => (&list_a, ia),
            Arm::B => (&list_b, ib),
        };
        while *pos < list.len() {
            let id = list[*pos];
            *pos += 1;
            if emitted.insert(id) {
                let rank_a = ranks_a.get(id).copied();
                let rank_b = ranks_b.get(id).copied();
                let provenance = match (rank_a, rank_b) {
                    (Some(_), Some(_)) => Provenance::Both,
                    (Some(_), None) => prov_a,
                    _ => prov_b,
                };
                entries.push(MergedEntry {
                    person_id: id.to_string(),
                    provenance,
                    drawn_from: arm,
                    rank_a,
                    rank_b,
                });
                return;
            }
        }
    };

    while ia < list_a.len() && ib < list_b.len() {
        let arm = coin();
        emit_from(arm, &mut ia, &mut ib);
    }
    while ia < list_a.len() {
        emit_from(Arm::A, &mut ia, &mut ib);
    }
    while ib < list_b.len() {
        emit_from(Arm::B, &mut ia, &mut ib);
    }

    Ok(MergedList {
        suspect_id: a.suspect_id.clone(),
        strategy_a: a.strategy,
        strategy_b: b.strategy,
        seed,
        entries,
    })
}
