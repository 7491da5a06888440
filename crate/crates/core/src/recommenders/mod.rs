//! Exact item-to-item similarity search over the two candidate indices.
//!
//! [`CbIndex`] holds binary-tf TF-IDF attribute vectors, [`DescriptorMatrix`]
//! holds dense visual descriptors. Both implement [`SimilarityIndex`], and
//! [`top_k`] scores every pool member against the suspect and keeps the best
//! `k` (ties broken by ascending person id).

mod cb;
mod hybrid;
mod visual;

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use cb::{build_cb_index, cosine_sparse, CbIndex, SparseVector};
pub use hybrid::{blend, hybrid_score, HybridIndex};
pub use visual::{cosine_dense, load_descriptors, DescriptorLoadReport, DescriptorMatrix};

use crate::par::{self, Execution};
use crate::{Error, Result};

/// Default list length per strategy.
pub const DEFAULT_K: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Strategy {
    Cb,
    Visual,
    Hybrid,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Cb => "CB",
            Strategy::Visual => "VISUAL",
            Strategy::Hybrid => "HYBRID",
        })
    }
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "CB" => Ok(Strategy::Cb),
            "VISUAL" => Ok(Strategy::Visual),
            "HYBRID" => Ok(Strategy::Hybrid),
            _ => Err(Error::InvalidParameter(format!("unknown strategy {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScoredCandidate {
    pub person_id: String,
    pub score: f64,
}

/// Candidates for one suspect, best first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RankedList {
    pub strategy: Strategy,
    pub suspect_id: String,
    pub entries: Vec<ScoredCandidate>,
}

impl RankedList {
    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.person_id.as_str())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// A candidate pool with a pairwise similarity.
///
/// Pool members are addressed by position; `pool()` is sorted ascending by id.
pub trait SimilarityIndex: Sync {
    fn strategy(&self) -> Strategy;

    fn pool(&self) -> &[String];

    fn similarity_at(&self, a: usize, b: usize) -> f64;

    fn position(&self, person_id: &str) -> Option<usize> {
        self.pool()
            .binary_search_by(|p| p.as_str().cmp(person_id))
            .ok()
    }

    /// Position of a query person, or the error explaining why it cannot be queried.
    fn query_position(&self, person_id: &str) -> Result<usize> {
        self.position(person_id)
            .ok_or_else(|| Error::UnknownPerson(person_id.to_string()))
    }

    fn similarity(&self, a: &str, b: &str) -> Result<f64> {
        Ok(self.similarity_at(self.query_position(a)?, self.query_position(b)?))
    }
}

/// Orders by descending score, then ascending id.
pub(crate) fn rank_order(a: &(usize, f64), b: &(usize, f64)) -> Ordering {
    b.1.partial_cmp(&a.1)
        .unwrap_or(Ordering::Equal)
        .then(a.0.cmp(&b.0))
}

/// Scores every pool member except `exclude` with `score` and keeps the best `k`.
///
/// Positions index the id-sorted pool, so comparing positions breaks ties by id.
pub(crate) fn rank_pool<I, F>(
    index: &I,
    suspect_id: &str,
    k: usize,
    exclude: &HashSet<usize>,
    exec: Execution,
    score: F,
) -> RankedList
where
    I: SimilarityIndex + ?Sized,
    F: Fn(usize) -> f64 + Sync + Send,
{
    let pool = index.pool();
    let scored = par::map_range(exec, pool.len(), |i| {
        if exclude.contains(&i) {
            None
        } else {
            Some((i, score(i)))
        }
    });
    let mut scored: Vec<(usize, f64)> = scored.into_iter().flatten().collect();
    if k < scored.len() {
        if k > 0 {
            scored.select_nth_unstable_by(k - 1, rank_order);
        }
        scored.truncate(k);
    }
    scored.sort_unstable_by(rank_order);
    RankedList {
        strategy: index.strategy(),
        suspect_id: suspect_id.to_string(),
        entries: scored
            .into_iter()
            .map(|(i, s)| ScoredCandidate {
                person_id: pool[i].clone(),
                score: s,
            })
            .collect(),
    }
}

/// The `k` pool members most similar to `suspect_id`, excluding the suspect.
pub fn top_k<I: SimilarityIndex + ?Sized>(
    index: &I,
    suspect_id: &str,
    k: usize,
) -> Result<RankedList> {
    top_k_with(index, suspect_id, k, Execution::default())
}

pub fn top_k_with<I: SimilarityIndex + ?Sized>(
    index: &I,
    suspect_id: &str,
    k: usize,
    exec: Execution,
) -> Result<RankedList> {
    let q = index.query_position(suspect_id)?;
    let exclude = HashSet::from([q]);
    Ok(rank_pool(index, suspect_id, k, &exclude, exec, |i| {
        index.similarity_at(q, i)
    }))
}
