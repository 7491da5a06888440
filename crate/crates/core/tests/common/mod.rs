//! Synthetic data and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use lineup_core::catalog::{Catalog, PersonRecord};
use lineup_core::recommenders::DescriptorMatrix;
use lineup_core::studylab::{ShownEntry, StudyLog, StudyRecord};
use lineup_core::Provenance;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub struct Synthetic {
    pub catalog: Catalog,
    pub descriptors: DescriptorMatrix,
    pub rows: BTreeMap<String, Vec<f32>>,
}

const NATIONALITIES: [&str; 5] = ["Czech", "Vietnamese", "Ukrainian", "Slovak", "Polish"];

/// Random catalog with up to `max_tokens` appearance tokens and `dim`-length descriptors.
pub fn synthetic(seed: u64, persons: usize, max_tokens: usize, dim: usize) -> Synthetic {
    let mut r = rng(seed);
    let vocab: Vec<String> = (0..max_tokens).map(|i| format!("t{i:02}")).collect();
    let mut records = Vec::with_capacity(persons);
    let mut rows = BTreeMap::new();
    for i in 0..persons {
        let id = format!("P{i:04}");
        let n_feat = r.random_range(0..=6.min(max_tokens));
        let feats: Vec<&String> = vocab.choose_multiple(&mut r, n_feat).collect();
        let nationality = if r.random_bool(0.9) {
            Some(NATIONALITIES.choose(&mut r).unwrap().to_string())
        } else {
            None
        };
        let age = if r.random_bool(0.85) {
            Some(r.random_range(10..80))
        } else {
            None
        };
        records.push(
            PersonRecord::new(
                id.clone(),
                nationality,
                age,
                feats.into_iter().cloned(),
                format!("photos/{id}.jpg"),
            )
            .unwrap(),
        );
        let v: Vec<f32> = (0..dim).map(|_| r.random_range(-1.0f32..1.0)).collect();
        rows.insert(id, v);
    }
    let catalog = Catalog::from_records(records).unwrap();
    let (descriptors, _) = DescriptorMatrix::from_rows(dim, rows.clone(), Some(&catalog)).unwrap();
    Synthetic {
        catalog,
        descriptors,
        rows,
    }
}

/// Score every candidate with `sim`, sort by (score desc, id asc), truncate.
pub fn exhaustive_top_k<F>(ids: &[String], suspect: &str, k: usize, sim: F) -> Vec<(String, f64)>
where
    F: Fn(&str) -> f64,
{
    let mut all: Vec<(String, f64)> = ids
        .iter()
        .filter(|id| id.as_str() != suspect)
        .map(|id| (id.clone(), sim(id)))
        .collect();
    all.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));
    all.truncate(k);
    all
}

fn dense_cosine(u: &[f64], v: &[f64]) -> f64 {
    let nu = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if nu == 0.0 || nv == 0.0 {
        return 0.0;
    }
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    (dot / (nu * nv)).clamp(-1.0, 1.0)
}

/// Dense TF-IDF vectors recomputed from the raw person tokens.
pub fn dense_tfidf(catalog: &Catalog) -> BTreeMap<String, Vec<f64>> {
    let mut df: BTreeMap<String, usize> = BTreeMap::new();
    for p in catalog.persons() {
        for t in p.tokens() {
            *df.entry(t).or_default() += 1;
        }
    }
    let n = catalog.len() as f64;
    let vocab: Vec<(&String, f64)> = df.iter().map(|(t, &d)| (t, (n / d as f64).ln())).collect();
    catalog
        .persons()
        .map(|p| {
            let toks = p.tokens();
            let v = vocab
                .iter()
                .map(|(t, idf)| if toks.contains(*t) { *idf } else { 0.0 })
                .collect();
            (p.person_id.clone(), v)
        })
        .collect()
}

pub fn cb_oracle(catalog: &Catalog, suspect: &str, k: usize) -> Vec<(String, f64)> {
    let vecs = dense_tfidf(catalog);
    let ids: Vec<String> = vecs.keys().cloned().collect();
    exhaustive_top_k(&ids, suspect, k, |c| dense_cosine(&vecs[suspect], &vecs[c]))
}

pub fn visual_oracle(
    rows: &BTreeMap<String, Vec<f32>>,
    suspect: &str,
    k: usize,
) -> Vec<(String, f64)> {
    let as64: BTreeMap<&String, Vec<f64>> = rows
        .iter()
        .map(|(id, v)| (id, v.iter().map(|&x| f64::from(x)).collect()))
        .collect();
    let ids: Vec<String> = rows.keys().cloned().collect();
    let s = &as64[&suspect.to_string()];
    exhaustive_top_k(&ids, suspect, k, |c| dense_cosine(s, &as64[&c.to_string()]))
}

/// Krippendorff's alpha by explicit pair enumeration over pooled values.
///
/// alpha = 1 - (n - 1) * sum_u [sum_{i != j in u} [v_i != v_j] / (m_u - 1)]
///                     / sum_{i != j over pooled values} [v_i != v_j]
pub fn brute_force_alpha(units: &[Vec<u32>]) -> Option<f64> {
    let pairable: Vec<&Vec<u32>> = units.iter().filter(|u| u.len() >= 2).collect();
    if pairable.is_empty() {
        return None;
    }
    let pooled: Vec<u32> = pairable.iter().flat_map(|u| u.iter().copied()).collect();
    let n = pooled.len() as f64;
    let mut within = 0.0;
    for u in &pairable {
        let mut d = 0.0;
        for i in 0..u.len() {
            for j in 0..u.len() {
                if i != j && u[i] != u[j] {
                    d += 1.0;
                }
            }
        }
        within += d / (u.len() - 1) as f64;
    }
    let mut between = 0.0;
    for i in 0..pooled.len() {
        for j in 0..pooled.len() {
            if i != j && pooled[i] != pooled[j] {
                between += 1.0;
            }
        }
    }
    if between == 0.0 {
        return Some(1.0);
    }
    Some(1.0 - (n - 1.0) * within / between)
}

/// Units of a study log as value lists, read directly from the records.
pub fn log_units(log: &StudyLog, filter: Option<Provenance>) -> Vec<Vec<u32>> {
    let mut units: BTreeMap<(String, String), Vec<u32>> = BTreeMap::new();
    for r in &log.records {
        for e in &r.shown {
            if filter.is_some_and(|f| f != e.provenance) {
                continue;
            }
            let v = u32::from(r.selected.contains(&e.person_id));
            units
                .entry((r.lineup_id.clone(), e.person_id.clone()))
                .or_default()
                .push(v);
        }
    }
    units.into_values().collect()
}

/// Small random study log: up to 4 raters, at most ~10 units.
pub fn random_small_log(seed: u64) -> StudyLog {
    let mut r = rng(seed);
    let raters = r.random_range(2..=4);
    let lineups = r.random_range(1..=3);
    let per_lineup = r.random_range(1..=(10 / lineups).min(4));
    let provs = [Provenance::Cb, Provenance::Visual, Provenance::Both];
    let mut records = Vec::new();
    for l in 0..lineups {
        let shown: Vec<ShownEntry> = (0..per_lineup)
            .map(|i| ShownEntry {
                person_id: format!("c{l}-{i}"),
                provenance: *provs.choose(&mut r).unwrap(),
                cb_rank: Some(i as u32 + 1),
                visual_rank: None,
            })
            .collect();
        let p_select = r.random_range(0.1..0.9);
        for rater in 0..raters {
            if !r.random_bool(0.8) {
                continue;
            }
            let selected = shown
                .iter()
                .filter(|_| r.random_bool(p_select))
                .map(|e| e.person_id.clone())
                .collect();
            records.push(StudyRecord {
                rater_id: format!("r{rater}"),
                lineup_id: format!("L{l}"),
                suspect_id: format!("s{l}"),
                suspect_nationality: Some("Czech".into()),
                shown: shown.clone(),
                selected,
            });
        }
    }
    StudyLog::new(records).unwrap()
}

pub fn ids(list: &[(String, f64)]) -> Vec<&str> {
    list.iter().map(|(id, _)| id.as_str()).collect()
}

pub fn token_union(catalog: &Catalog) -> BTreeSet<String> {
    catalog.persons().flat_map(|p| p.tokens()).collect()
}
