#![allow(dead_code)]

use std::path::Path;

use lineup_core::catalog::{Catalog, PersonRecord};
use lineup_core::descriptor_file::{write_descriptor_file, DescriptorFile};

pub const PERSONS: usize = 40;
pub const DIM: usize = 8;

const FEATURES: [&str; 8] = [
    "short hair",
    "beard",
    "glasses",
    "brown eyes",
    "blue eyes",
    "tattoo",
    "scar",
    "bald",
];
const NATIONALITIES: [&str; 4] = ["Czech", "Vietnamese", "Slovak", "Ukrainian"];

fn mix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

pub fn catalog() -> Catalog {
    Catalog::from_records((0..PERSONS as u64).map(|i| {
        let h = mix(i);
        let features = FEATURES
            .iter()
            .enumerate()
            .filter(|(j, _)| (h >> j) & 3 == 0)
            .map(|(_, f)| *f);
        PersonRecord::new(
            format!("p{i:03}"),
            Some(NATIONALITIES[(h >> 20) as usize % 4].to_string()),
            Some(18 + (h >> 24) as u32 % 50),
            features,
            format!("photos/p{i:03}.jpg"),
        )
        .unwrap()
    }))
    .unwrap()
}

pub fn descriptors(catalog: &Catalog) -> DescriptorFile {
    DescriptorFile {
        dim: DIM,
        entries: catalog
            .ids()
            .enumerate()
            .map(|(i, id)| {
                let v = (0..DIM as u64)
                    .map(|d| (mix(i as u64 * 31 + d) % 1000) as f32 / 1000.0)
                    .collect();
                (id.to_string(), v)
            })
            .collect(),
    }
}

/// Writes `persons.jsonl` and `descriptors.bin` into `dir`.
pub fn write_data_dir(dir: &Path) {
    let c = catalog();
    let mut persons = Vec::new();
    c.write_jsonl(&mut persons).unwrap();
    std::fs::write(dir.join("persons.jsonl"), persons).unwrap();
    let mut bin = Vec::new();
    write_descriptor_file(&mut bin, &descriptors(&c)).unwrap();
    std::fs::write(dir.join("descriptors.bin"), bin).unwrap();
}
