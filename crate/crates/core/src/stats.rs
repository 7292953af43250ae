//! CSV exports of corpus and clustering statistics.

use std::fs::{self, File};
use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::model::Model;
use crate::text::is_relevant;

pub const TOP_FREQUENT: usize = 40;
pub const MEMBER_THRESHOLD: f64 = 0.5;
pub const NEAR_ONE: f64 = 0.999;

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterCounts {
    pub index: usize,
    pub center_stem: String,
    pub potential: f64,
    pub above_half: usize,
    pub exactly_one: usize,
    pub near_one: usize,
}

pub fn cluster_counts(model: &Model) -> Vec<ClusterCounts> {
    let u = &model.clusters.memberships;
    model
        .clusters
        .centers
        .iter()
        .zip(&model.clusters.center_potentials)
        .enumerate()
        .map(|(j, (&center, &potential))| {
            let col = u.column(j);
            ClusterCounts {
                index: j,
                center_stem: model.vocabulary.stem_of(center).to_string(),
                potential,
                above_half: col.iter().filter(|&&x| x > MEMBER_THRESHOLD).count(),
                exactly_one: col.iter().filter(|&&x| x == 1.0).count(),
                near_one: col.iter().filter(|&&x| x >= NEAR_ONE).count(),
            }
        })
        .collect()
}

/// Writes every statistics table into `outdir` and returns the file paths.
pub fn export(model: &Model, outdir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let outdir = outdir.as_ref();
    fs::create_dir_all(outdir)?;
    let mut written = Vec::new();

    for (name, limit) in [
        ("word_frequencies.csv", usize::MAX),
        ("word_frequencies_top40.csv", TOP_FREQUENT),
    ] {
        let path = outdir.join(name);
        let mut w = csv::Writer::from_writer(File::create(&path)?);
        w.write_record(["stem", "frequency", "relevant"])?;
        for (stem, freq) in model.term_frequencies.iter().take(limit) {
            w.write_record([
                stem.as_str(),
                &freq.to_string(),
                &is_relevant(stem, *freq).to_string(),
            ])?;
        }
        w.flush()?;
        written.push(path);
    }

    let path = outdir.join("distance_matrix.csv");
    model.distance_matrix().export_csv(&path)?;
    written.push(path);

    let path = outdir.join("memberships.csv");
    let mut w = csv::Writer::from_writer(File::create(&path)?);
    let mut header = vec!["stem".to_string()];
    header.extend((0..model.clusters.centers.len()).map(|j| format!("cluster_{j}")));
    w.write_record(&header)?;
    for (code, row) in model.clusters.memberships.rows().into_iter().enumerate() {
        let mut record = vec![model.vocabulary.stem_of(code).to_string()];
        record.extend(row.iter().map(|x| x.to_string()));
        w.write_record(&record)?;
    }
    w.flush()?;
    written.push(path);

    let path = outdir.join("clusters.csv");
    let mut w = csv::Writer::from_writer(File::create(&path)?);
    w.write_record([
        "cluster",
        "center_stem",
        "potential",
        "members_above_0.5",
        "members_exactly_1",
        "members_at_least_0.999",
    ])?;
    for c in cluster_counts(model) {
        w.write_record([
            c.index.to_string(),
            c.center_stem,
            c.potential.to_string(),
            c.above_half.to_string(),
            c.exactly_one.to_string(),
            c.near_one.to_string(),
        ])?;
    }
    w.flush()?;
    written.push(path);

    let path = outdir.join("cluster_members.csv");
    let mut w = csv::Writer::from_writer(File::create(&path)?);
    w.write_record(["cluster", "center_stem", "stem", "membership"])?;
    for report in model.cluster_reports(MEMBER_THRESHOLD) {
        for m in &report.members {
            w.write_record([
                report.index.to_string(),
                report.center_stem.clone(),
                m.stem.clone(),
                m.membership.to_string(),
            ])?;
        }
    }
    w.flush()?;
    written.push(path);

    Ok(written)
}
