use std::collections::{BTreeMap, HashMap};

use crate::catalog::Catalog;

use super::{SimilarityIndex, Strategy};

/// Sparse non-negative vector with strictly increasing indices.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseVector {
    entries: Vec<(u32, f64)>,
    norm: f64,
}

impl SparseVector {
    /// Builds a vector from `(index, weight)` pairs; pairs are sorted and
    /// must not repeat an index. Weights must be finite and non-negative.
    pub fn new(mut entries: Vec<(u32, f64)>) -> Self {
        entries.sort_unstable_by_key(|e| e.0);
        assert!(
            entries.windows(2).all(|w| w[0].0 < w[1].0),
            "duplicate sparse index"
        );
        assert!(
            entries.iter().all(|e| e.1.is_finite() && e.1 >= 0.0),
            "sparse weights must be finite and non-negative"
        );
        let norm = entries.iter().map(|e| e.1 * e.1).sum::<f64>().sqrt();
        SparseVector { entries, norm }
    }

    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn dot(&self, other: &SparseVector) -> f64 {
        let (a, b) = (&self.entries, &other.entries);
        let (mut i, mut j, mut acc) = (0, 0, 0.0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += a[i].1 * b[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }
}

/// Cosine similarity; 0 when either vector has zero norm. Clamped to [-1, 1].
pub fn cosine_sparse(u: &SparseVector, v: &SparseVector) -> f64 {
    if u.norm == 0.0 || v.norm == 0.0 {
        return 0.0;
    }
    (u.dot(v) / (u.norm * v.norm)).clamp(-1.0, 1.0)
}

/// Attribute index: one binary-tf TF-IDF vector per catalog person.
#[derive(Debug, Clone)]
pub struct CbIndex {
    tokens: Vec<String>,
    token_index: HashMap<String, u32>,
    document_frequency: Vec<usize>,
    idf: Vec<f64>,
    ids: Vec<String>,
    vectors: Vec<SparseVector>,
}

/// Builds the attribute index with `idf(t) = ln(N / df(t))` over appearance,
/// `nat:` and `age:` tokens.
pub fn build_cb_index(catalog: &Catalog) -> CbIndex {
    let mut df: BTreeMap<String, usize> = BTreeMap::new();
    let person_tokens: Vec<_> = catalog.persons().map(|p| p.tokens()).collect();
    for tokens in &person_tokens {
        for t in tokens {
            *df.entry(t.clone()).or_insert(0) += 1;
        }
    }
    let n = catalog.len() as f64;
    let tokens: Vec<String> = df.keys().cloned().collect();
    let token_index: HashMap<String, u32> = tokens
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), i as u32))
        .collect();
    let document_frequency: Vec<usize> = df.values().copied().collect();
    let idf: Vec<f64> = document_frequency
        .iter()
        .map(|&d| (n / d as f64).ln())
        .collect();
    let vectors = person_tokens
        .iter()
        .map(|ts| {
            SparseVector::new(
                ts.iter()
                    .map(|t| {
                        let i = token_index[t];
                        (i, idf[i as usize])
                    })
                    .collect(),
            )
        })
        .collect();
    CbIndex {
        tokens,
        token_index,
        document_frequency,
        idf,
        ids: catalog.ids().map(str::to_string).collect(),
        vectors,
    }
}

impl CbIndex {
    pub fn vocabulary(&self) -> &[String] {
        &self.tokens
    }

    pub fn idf(&self, token: &str) -> Option<f64> {
        self.token_index.get(token).map(|&i| self.idf[i as usize])
    }

    pub fn document_frequency(&self, token: &str) -> Option<usize> {
        self.token_index
            .get(token)
            .map(|&i| self.document_frequency[i as usize])
    }

    pub fn vector(&self, person_id: &str) -> Option<&SparseVector> {
        self.position(person_id).map(|i| &self.vectors[i])
    }
}

impl SimilarityIndex for CbIndex {
    fn strategy(&self) -> Strategy {
        Strategy::Cb
    }

    fn pool(&self) -> &[String] {
        &self.ids
    }

    fn similarity_at(&self, a: usize, b: usize) -> f64 {
        cosine_sparse(&self.vectors[a], &self.vectors[b])
    }
}
