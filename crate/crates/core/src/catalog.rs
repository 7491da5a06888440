//! Person dataset: ingestion, vocabularies and summary statistics.
//!
//! The person file is UTF-8 JSON Lines, one record per line, with the
//! canonical field order `personId, nationality, age, features, photoRef`.
//! `nationality` and `age` may be omitted. Features are written sorted.
//!
//! ```text
//! {"personId":"P0001","nationality":"Czech","age":41,"features":["brown eyes","thin figure"],"photoRef":"photos/P0001.jpg"}
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Prefix of nationality tokens in the attribute vector space.
pub const NATIONALITY_PREFIX: &str = "nat:";
/// Prefix of age-group tokens in the attribute vector space.
pub const AGE_PREFIX: &str = "age:";

const KNOWN_FIELDS: [&str; 5] = ["personId", "nationality", "age", "features", "photoRef"];
const MAX_AGE: i64 = 130;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AgeGroup {
    #[serde(rename = "0-18")]
    Minor,
    #[serde(rename = "18-35")]
    Young,
    #[serde(rename = "35-55")]
    Middle,
    #[serde(rename = "55+")]
    Senior,
}

impl AgeGroup {
    pub const ALL: [AgeGroup; 4] = [
        AgeGroup::Minor,
        AgeGroup::Young,
        AgeGroup::Middle,
        AgeGroup::Senior,
    ];

    pub fn label(self) -> &'static str {
        match self {
            AgeGroup::Minor => "0-18",
            AgeGroup::Young => "18-35",
            AgeGroup::Middle => "35-55",
            AgeGroup::Senior => "55+",
        }
    }
}

impl fmt::Display for AgeGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Maps an age in years onto its group using half-open intervals
/// `[0,18) [18,35) [35,55) [55,inf)`.
pub fn age_group(age: i64) -> Result<AgeGroup> {
    match age {
        a if !(0..=MAX_AGE).contains(&a) => Err(Error::AgeOutOfRange(a)),
        a if a < 18 => Ok(AgeGroup::Minor),
        a if a < 35 => Ok(AgeGroup::Young),
        a if a < 55 => Ok(AgeGroup::Middle),
        _ => Ok(AgeGroup::Senior),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PersonRecord {
    pub person_id: String,
    pub nationality: Option<String>,
    pub age: Option<u32>,
    age_group: Option<AgeGroup>,
    pub features: BTreeSet<String>,
    pub photo_ref: String,
}

impl PersonRecord {
    pub fn new(
        person_id: impl Into<String>,
        nationality: Option<String>,
        age: Option<u32>,
        features: impl IntoIterator<Item = impl Into<String>>,
        photo_ref: impl Into<String>,
    ) -> Result<Self> {
        let person_id = person_id.into();
        if person_id.is_empty() {
            return Err(Error::InvalidParameter("empty personId".into()));
        }
        if let Some(n) = &nationality {
            if n.is_empty() {
                return Err(Error::InvalidParameter(format!(
                    "empty nationality for {person_id:?}"
                )));
            }
        }
        let age_group = age.map(|a| age_group(i64::from(a))).transpose()?;
        let features: BTreeSet<String> = features.into_iter().map(Into::into).collect();
        for f in &features {
            if f.is_empty() || f.starts_with(NATIONALITY_PREFIX) || f.starts_with(AGE_PREFIX) {
                return Err(Error::InvalidParameter(format!(
                    "invalid feature token {f:?} for {person_id:?}"
                )));
            }
        }
        Ok(PersonRecord {
            person_id,
            nationality,
            age,
            age_group,
            features,
            photo_ref: photo_ref.into(),
        })
    }

    pub fn age_group(&self) -> Option<AgeGroup> {
        self.age_group
    }

    pub fn nationality_token(&self) -> Option<String> {
        self.nationality
            .as_ref()
            .map(|n| format!("{NATIONALITY_PREFIX}{n}"))
    }

    pub fn age_token(&self) -> Option<String> {
        self.age_group.map(|g| format!("{AGE_PREFIX}{g}"))
    }

    /// Appearance features plus the derived `nat:` and `age:` tokens.
    pub fn tokens(&self) -> BTreeSet<String> {
        let mut tokens = self.features.clone();
        tokens.extend(self.nationality_token());
        tokens.extend(self.age_token());
        tokens
    }
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct PersonLine {
    person_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    nationality: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    age: Option<i64>,
    #[serde(default)]
    features: Vec<String>,
    #[serde(default)]
    photo_ref: String,
}

/// Non-fatal findings from ingestion.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestReport {
    pub records: usize,
    /// Number of unknown field occurrences that were ignored.
    pub unknown_fields: usize,
}

/// Immutable person dataset with token vocabularies.
///
/// Iteration is in ascending `personId` order regardless of input order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Catalog {
    persons: BTreeMap<String, PersonRecord>,
    feature_df: BTreeMap<String, usize>,
    nationality_df: BTreeMap<String, usize>,
}

/// Reads a person file. Unknown fields are ignored with a logged warning.
pub fn ingest_persons<R: BufRead>(source: R) -> Result<Catalog> {
    ingest_persons_with_report(source).map(|(c, _)| c)
}

pub fn ingest_persons_with_report<R: BufRead>(source: R) -> Result<(Catalog, IngestReport)> {
    let mut records = Vec::new();
    let mut report = IngestReport::default();
    for (i, line) in source.lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value =
            serde_json::from_str(&line).map_err(|e| Error::malformed(lineno, e))?;
        let obj = value
            .as_object()
            .ok_or_else(|| Error::malformed(lineno, "record is not an object"))?;
        report.unknown_fields += obj
            .keys()
            .filter(|k| !KNOWN_FIELDS.contains(&k.as_str()))
            .count();
        let raw: PersonLine =
            serde_json::from_value(value).map_err(|e| Error::malformed(lineno, e))?;
        let age = match raw.age {
            Some(a) => {
                age_group(a).map_err(|e| Error::malformed(lineno, e))?;
                Some(a as u32)
            }
            None => None,
        };
        let record = PersonRecord::new(
            raw.person_id,
            raw.nationality,
            age,
            raw.features,
            raw.photo_ref,
        )
        .map_err(|e| Error::malformed(lineno, e))?;
        records.push(record);
    }
    report.records = records.len();
    if report.unknown_fields > 0 {
        log::warn!(
            "ignored {} unknown field(s) in person file",
            report.unknown_fields
        );
    }
    Ok((Catalog::from_records(records)?, report))
}

impl Catalog {
    pub fn from_records(records: impl IntoIterator<Item = PersonRecord>) -> Result<Self> {
        let mut persons = BTreeMap::new();
        for r in records {
            if persons.contains_key(&r.person_id) {
                return Err(Error::DuplicatePerson(r.person_id));
            }
            persons.insert(r.person_id.clone(), r);
        }
        let mut feature_df = BTreeMap::new();
        let mut nationality_df = BTreeMap::new();
        for p in persons.values() {
            for f in &p.features {
                *feature_df.entry(f.clone()).or_insert(0) += 1;
            }
            if let Some(n) = &p.nationality {
                *nationality_df.entry(n.clone()).or_insert(0) += 1;
            }
        }
        Ok(Catalog {
            persons,
            feature_df,
            nationality_df,
        })
    }

    pub fn len(&self) -> usize {
        self.persons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.persons.is_empty()
    }

    pub fn get(&self, person_id: &str) -> Option<&PersonRecord> {
        self.persons.get(person_id)
    }

    pub fn require(&self, person_id: &str) -> Result<&PersonRecord> {
        self.get(person_id)
            .ok_or_else(|| Error::UnknownPerson(person_id.to_string()))
    }

    pub fn contains(&self, person_id: &str) -> bool {
        self.persons.contains_key(person_id)
    }

    pub fn persons(&self) -> impl ExactSizeIterator<Item = &PersonRecord> {
        self.persons.values()
    }

    pub fn ids(&self) -> impl ExactSizeIterator<Item = &str> {
        self.persons.keys().map(String::as_str)
    }

    /// Appearance-feature document frequencies.
    pub fn feature_vocabulary(&self) -> &BTreeMap<String, usize> {
        &self.feature_df
    }

    pub fn nationality_vocabulary(&self) -> &BTreeMap<String, usize> {
        &self.nationality_df
    }

    /// Writes the canonical person file; re-ingesting it reproduces `self`.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for p in self.persons.values() {
            let line = PersonLine {
                person_id: p.person_id.clone(),
                nationality: p.nationality.clone(),
                age: p.age.map(i64::from),
                features: p.features.iter().cloned().collect(),
                photo_ref: p.photo_ref.clone(),
            };
            serde_json::to_writer(&mut out, &line).map_err(std::io::Error::from)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// Shares are percentages of all persons in the catalog.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetStats {
    pub total_persons: usize,
    pub nationality_counts: BTreeMap<String, usize>,
    pub age_group_counts: BTreeMap<AgeGroup, usize>,
    pub feature_counts: BTreeMap<String, usize>,
    pub nationality_shares: BTreeMap<String, f64>,
    pub age_group_shares: BTreeMap<AgeGroup, f64>,
    pub feature_shares: BTreeMap<String, f64>,
}

pub fn dataset_stats(catalog: &Catalog) -> Result<DatasetStats> {
    if catalog.is_empty() {
        return Err(Error::EmptyCatalog);
    }
    let total = catalog.len();
    let share = |count: usize| 100.0 * count as f64 / total as f64;
    let mut age_group_counts: BTreeMap<AgeGroup, usize> =
        AgeGroup::ALL.iter().map(|&g| (g, 0)).collect();
    for g in catalog.persons().filter_map(PersonRecord::age_group) {
        *age_group_counts.entry(g).or_insert(0) += 1;
    }
    Ok(DatasetStats {
        total_persons: total,
        nationality_shares: catalog
            .nationality_df
            .iter()
            .map(|(k, &c)| (k.clone(), share(c)))
            .collect(),
        age_group_shares: age_group_counts
            .iter()
            .map(|(&g, &c)| (g, share(c)))
            .collect(),
        feature_shares: catalog
            .feature_df
            .iter()
            .map(|(k, &c)| (k.clone(), share(c)))
            .collect(),
        nationality_counts: catalog.nationality_df.clone(),
        age_group_counts,
        feature_counts: catalog.feature_df.clone(),
    })
}

/// Tokens sorted by descending count, then ascending name.
fn top_tokens(counts: &BTreeMap<String, usize>, n: usize) -> Vec<(&str, usize)> {
    let mut v: Vec<(&str, usize)> = counts.iter().map(|(k, &c)| (k.as_str(), c)).collect();
    v.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    v.truncate(n);
    v
}

impl DatasetStats {
    /// Plain-text summary laid out like the published dataset table.
    pub fn render_table(&self, top_nationalities: usize, top_features: usize) -> String {
        let pct = |c: usize| 100.0 * c as f64 / self.total_persons as f64;
        let mut s = String::new();
        let _ = writeln!(s, "Lineup dataset: {} persons", self.total_persons);
        let _ = writeln!(
            s,
            "Top nationalities ({} in total)",
            self.nationality_counts.len()
        );
        for (tok, c) in top_tokens(&self.nationality_counts, top_nationalities) {
            let _ = writeln!(s, "  {tok:<24} {:>5.1}%", pct(c));
        }
        let _ = writeln!(s, "Age groups");
        for (g, &c) in &self.age_group_counts {
            let _ = writeln!(s, "  {:<24} {:>5.1}%", g.label(), pct(c));
        }
        let _ = writeln!(
            s,
            "Top appearance features ({} in total)",
            self.feature_counts.len()
        );
        for (tok, c) in top_tokens(&self.feature_counts, top_features) {
            let _ = writeln!(s, "  {tok:<24} {:>5.1}%", pct(c));
        }
        s
    }
}
