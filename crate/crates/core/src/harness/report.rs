use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::Config;
use crate::criteria::Verdict;
use crate::error::Result;
use crate::operators::RatioRow;
use crate::tentnorm::{DecayProfile, NormRecord};

/// One acceptance rule and its outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedProfile {
    pub name: String,
    pub profile: DecayProfile,
}

/// Everything a suite computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub config: Config,
    pub checks: Vec<Check>,
    pub verdicts: Vec<Verdict>,
    pub ratios: Vec<RatioRow>,
    pub norms: Vec<NormRecord>,
    pub profiles: Vec<NamedProfile>,
    /// Cases that failed to evaluate; the run continues past them.
    pub errors: Vec<String>,
}

impl Report {
    pub fn new(suite: &str, config: &Config) -> Report {
        Report {
            suite: suite.to_string(),
            config: config.clone(),
            checks: Vec::new(),
            verdicts: Vec::new(),
            ratios: Vec::new(),
            norms: Vec::new(),
            profiles: Vec::new(),
            errors: Vec::new(),
        }
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), passed, detail: detail.into() });
    }

    pub fn profile(&mut self, name: impl Into<String>, profile: DecayProfile) {
        self.profiles.push(NamedProfile { name: name.into(), profile });
    }

    /// All checks passed and no case failed.
    pub fn passed(&self) -> bool {
        self.errors.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    pub fn merge(&mut self, other: Report) {
        self.checks.extend(other.checks);
        self.verdicts.extend(other.verdicts);
        self.ratios.extend(other.ratios);
        self.norms.extend(other.norms);
        self.profiles.extend(other.profiles);
        self.errors.extend(other.errors);
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Report> {
        Ok(serde_json::from_str(text)?)
    }

    /// Writes `<suite>.json`, `<suite>_checks.csv`, `<suite>_ratios.csv` and `<suite>_norms.csv`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let stem = file_stem(&self.suite);
        let json = dir.join(format!("{stem}.json"));
        fs::write(&json, self.to_json()?)?;

        let checks = dir.join(format!("{stem}_checks.csv"));
        let mut w = csv::Writer::from_path(&checks)?;
        for c in &self.checks {
            w.serialize(c)?;
        }
        if self.checks.is_empty() {
            w.write_record(["name", "passed", "detail"])?;
        }
        w.flush()?;

        let ratios = dir.join(format!("{stem}_ratios.csv"));
        let mut w = csv::Writer::from_path(&ratios)?;
        w.write_record(["f_id", "g_id", "params", "source_norm", "image_norm", "ratio"])?;
        for r in &self.ratios {
            w.write_record([
                r.f_id.clone(),
                r.g_id.clone(),
                r.params.clone(),
                fmt(r.source_norm),
                fmt(r.image_norm),
                fmt(r.ratio),
            ])?;
        }
        w.flush()?;

        let norms = dir.join(format!("{stem}_norms.csv"));
        let mut w = csv::Writer::from_path(&norms)?;
        w.write_record(["kind", "params", "value", "grid", "error_estimate"])?;
        for n in &self.norms {
            w.write_record([n.kind.clone(), n.params.clone(), fmt(n.value), n.grid.clone(), fmt(n.error_estimate)])?;
        }
        w.flush()?;
        Ok(vec![json, checks, ratios, norms])
    }
}

/// Shortest round-trip representation.
pub(crate) fn fmt(x: f64) -> String {
    if x.is_finite() {
        // shortest round-trip form; negative zero prints as 0
        if x == 0.0 {
            "0".into()
        } else {
            format!("{x}")
        }
    } else {
        x.to_string()
    }
}

pub(crate) fn file_stem(name: &str) -> String {
    name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.' { c } else { '_' }).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    pub file: String,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub suite: String,
    pub files: Vec<ManifestEntry>,
}

/// One `radius,value` CSV per profile (verdict profiles included) plus `manifest.json`.
pub fn emit_plotdata(report: &Report, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let stem = file_stem(&report.suite);
    let mut profiles: Vec<(String, DecayProfile)> =
        report.profiles.iter().map(|p| (p.name.clone(), p.profile.clone())).collect();
    for (i, v) in report.verdicts.iter().enumerate() {
        profiles.push((format!("verdict{i}_{:?}", v.criterion), v.decay_profile()));
    }
    let mut written = Vec::new();
    let mut files = Vec::new();
    for (name, profile) in profiles {
        let file = format!("{stem}_{}.csv", file_stem(&name));
        let path = dir.join(&file);
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["radius", "value"])?;
        for (r, v) in profile.radii.iter().zip(&profile.values) {
            w.write_record([fmt(*r), fmt(*v)])?;
        }
        w.flush()?;
        files.push(ManifestEntry { name, file, points: profile.radii.len() });
        written.push(path);
    }
    let manifest = dir.join("manifest.json");
    fs::write(&manifest, serde_json::to_string_pretty(&Manifest { suite: report.suite.clone(), files })? + "\n")?;
    written.push(manifest);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report_writes_manifest_only() {
        let dir = tempfile::tempdir().unwrap();
        let report = Report::new("empty", &Config::default());
        let files = emit_plotdata(&report, dir.path()).unwrap();
        assert_eq!(files.len(), 1);
        assert!(files[0].ends_with("manifest.json"));
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn plotdata_is_idempotent() {
        let dir = tempfile::tempdir().unwrap();
        let mut report = Report::new("demo", &Config::default());
        report.profile("decay", DecayProfile { radii: vec![0.5, 0.75], values: vec![1.0, 0.1] });
        let a = emit_plotdata(&report, dir.path()).unwrap();
        let first: Vec<Vec<u8>> = a.iter().map(|p| fs::read(p).unwrap()).collect();
        let b = emit_plotdata(&report, dir.path()).unwrap();
        let second: Vec<Vec<u8>> = b.iter().map(|p| fs::read(p).unwrap()).collect();
        assert_eq!(first, second);
        assert_eq!(a.len(), 2);
    }

    #[test]
    fn report_round_trips_through_json() {
        let mut report = Report::new("rt", &Config::default());
        report.check("a", true, "fine");
        let back = Report::from_json(&report.to_json().unwrap()).unwrap();
        assert_eq!(back, report);
        assert!(back.passed());
    }
}
