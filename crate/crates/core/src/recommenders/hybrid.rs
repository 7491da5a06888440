use crate::{Error, Result};

use super::{CbIndex, DescriptorMatrix, SimilarityIndex, Strategy};

fn check_beta(beta: f64) -> Result<()> {
    if (0.0..=1.0).contains(&beta) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "beta {beta} outside [0, 1]"
        )))
    }
}

/// `beta * visual + (1 - beta) * cb`.
pub fn blend(visual: f64, cb: f64, beta: f64) -> f64 {
    beta * visual + (1.0 - beta) * cb
}

/// Blended score for one suspect/candidate pair.
pub fn hybrid_score(
    cb: &CbIndex,
    visual: &DescriptorMatrix,
    suspect_id: &str,
    candidate_id: &str,
    beta: f64,
) -> Result<f64> {
    check_beta(beta)?;
    let v = visual.similarity(suspect_id, candidate_id)?;
    let c = cb.similarity(suspect_id, candidate_id)?;
    Ok(blend(v, c, beta))
}

/// Blended index over persons that have a descriptor.
pub struct HybridIndex<'a> {
    cb: &'a CbIndex,
    visual: &'a DescriptorMatrix,
    cb_pos: Vec<usize>,
    beta: f64,
}

impl<'a> HybridIndex<'a> {
    pub fn new(cb: &'a CbIndex, visual: &'a DescriptorMatrix, beta: f64) -> Result<Self> {
        check_beta(beta)?;
        let cb_pos = visual
            .pool()
            .iter()
            .map(|id| cb.query_position(id))
            .collect::<Result<_>>()?;
        Ok(HybridIndex {
            cb,
            visual,
            cb_pos,
            beta,
        })
    }
}

impl SimilarityIndex for HybridIndex<'_> {
    fn strategy(&self) -> Strategy {
        Strategy::Hybrid
    }

    fn pool(&self) -> &[String] {
        self.visual.pool()
    }

    fn similarity_at(&self, a: usize, b: usize) -> f64 {
        blend(
            self.visual.similarity_at(a, b),
            self.cb.similarity_at(self.cb_pos[a], self.cb_pos[b]),
            self.beta,
        )
    }

    fn query_position(&self, person_id: &str) -> Result<usize> {
        self.visual.query_position(person_id)
    }
}
