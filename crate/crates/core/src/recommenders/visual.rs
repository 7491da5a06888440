use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;

use crate::catalog::Catalog;
use crate::descriptor_file::{read_descriptor_file, DescriptorFile};
use crate::{Error, Result};

use super::{SimilarityIndex, Strategy};

/// Cosine over dense vectors, accumulated in f64; 0 when either norm is 0.
pub fn cosine_dense(u: &[f32], v: &[f32]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            found: v.len(),
        });
    }
    Ok(cosine_with_norms(u, v, l2(u), l2(v)))
}

fn l2(v: &[f32]) -> f64 {
    v.iter()
        .map(|&x| f64::from(x) * f64::from(x))
        .sum::<f64>()
        .sqrt()
}

fn cosine_with_norms(u: &[f32], v: &[f32], nu: f64, nv: f64) -> f64 {
    if nu == 0.0 || nv == 0.0 {
        return 0.0;
    }
    let dot: f64 = u
        .iter()
        .zip(v)
        .map(|(&a, &b)| f64::from(a) * f64::from(b))
        .sum();
    (dot / (nu * nv)).clamp(-1.0, 1.0)
}

/// Visual descriptors for the catalog persons that have one.
///
/// Rows are stored exactly as ingested (no re-normalisation).
#[derive(Debug, Clone, PartialEq)]
pub struct DescriptorMatrix {
    dim: usize,
    ids: Vec<String>,
    data: Vec<f32>,
    norms: Vec<f64>,
    missing: BTreeSet<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DescriptorLoadReport {
    /// Entries whose person id is not in the catalog; dropped.
    pub unknown_ids: Vec<String>,
    /// Catalog persons without a descriptor.
    pub missing: usize,
}

impl DescriptorMatrix {
    /// Builds a matrix from `(personId, vector)` rows. When a catalog is
    /// given, rows for unknown persons are dropped (and reported) and catalog
    /// persons without a row are recorded as missing.
    pub fn from_rows(
        dim: usize,
        rows: impl IntoIterator<Item = (String, Vec<f32>)>,
        catalog: Option<&Catalog>,
    ) -> Result<(Self, DescriptorLoadReport)> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        let mut report = DescriptorLoadReport::default();
        let mut sorted: BTreeMap<String, Vec<f32>> = BTreeMap::new();
        for (id, v) in rows {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFiniteDescriptor(id));
            }
            if catalog.is_some_and(|c| !c.contains(&id)) {
                report.unknown_ids.push(id);
                continue;
            }
            if sorted.insert(id.clone(), v).is_some() {
                return Err(Error::DescriptorFormat(format!(
                    "duplicate descriptor for {id:?}"
                )));
            }
        }
        let missing: BTreeSet<String> = catalog
            .map(|c| {
                c.ids()
                    .filter(|id| !sorted.contains_key(*id))
                    .map(str::to_string)
                    .collect()
            })
            .unwrap_or_default();
        report.missing = missing.len();
        let mut ids = Vec::with_capacity(sorted.len());
        let mut data = Vec::with_capacity(sorted.len() * dim);
        let mut norms = Vec::with_capacity(sorted.len());
        for (id, v) in sorted {
            norms.push(l2(&v));
            data.extend_from_slice(&v);
            ids.push(id);
        }
        Ok((
            DescriptorMatrix {
                dim,
                ids,
                data,
                norms,
                missing,
            },
            report,
        ))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn get(&self, person_id: &str) -> Option<&[f32]> {
        self.position(person_id).map(|i| self.row(i))
    }

    /// Catalog persons without a descriptor; never part of the visual pool.
    pub fn missing(&self) -> &BTreeSet<String> {
        &self.missing
    }

    pub fn to_file(&self) -> DescriptorFile {
        DescriptorFile {
            dim: self.dim,
            entries: self
                .ids
                .iter()
                .enumerate()
                .map(|(i, id)| (id.clone(), self.row(i).to_vec()))
                .collect(),
        }
    }
}

/// Reads a descriptor file and aligns it with `catalog`.
pub fn load_descriptors<R: Read>(
    source: R,
    catalog: &Catalog,
) -> Result<(DescriptorMatrix, DescriptorLoadReport)> {
    let file = read_descriptor_file(source)?;
    let (m, report) = DescriptorMatrix::from_rows(file.dim, file.entries, Some(catalog))?;
    if !report.unknown_ids.is_empty() {
        log::warn!(
            "dropped {} descriptor(s) for persons not in the catalog",
            report.unknown_ids.len()
        );
    }
    if report.missing > 0 {
        log::warn!("{} catalog person(s) have no descriptor", report.missing);
    }
    Ok((m, report))
}

impl SimilarityIndex for DescriptorMatrix {
    fn strategy(&self) -> Strategy {
        Strategy::Visual
    }

    fn pool(&self) -> &[String] {
        &self.ids
    }

    fn similarity_at(&self, a: usize, b: usize) -> f64 {
        cosine_with_norms(self.row(a), self.row(b), self.norms[a], self.norms[b])
    }

    fn query_position(&self, person_id: &str) -> Result<usize> {
        match self.position(person_id) {
            Some(i) => Ok(i),
            None if self.missing.contains(person_id) => {
                Err(Error::MissingDescriptor(person_id.to_string()))
            }
            None => Err(Error::UnknownPerson(person_id.to_string())),
        }
    }
}
