use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::OutputFormat;
use crate::blp::MonotonicityProfile;
use crate::error::Result;
use crate::witness::{Classification, WitnessPoint, WitnessSurface};

pub const SURFACE_COLUMNS: [&str; 10] = ["t", "tprime", "D_t", "D_tplus", "F", "B", "deltaD", "lower", "upper", "class"];
pub const PROFILE_COLUMNS: [&str; 3] = ["t", "D", "interval_flag"];

/// Fifteen significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.14e}")
}

#[derive(Serialize)]
struct SurfaceRecord {
    #[serde(skip_serializing_if = "Option::is_none")]
    r: Option<f64>,
    t: f64,
    tprime: f64,
    #[serde(rename = "D_t")]
    d_t: f64,
    #[serde(rename = "D_tplus")]
    d_tplus: f64,
    #[serde(rename = "F")]
    f: f64,
    #[serde(rename = "B")]
    b: f64,
    #[serde(rename = "deltaD")]
    delta_d: f64,
    lower: f64,
    upper: f64,
    class: &'static str,
}

impl SurfaceRecord {
    fn new(r: Option<f64>, p: &WitnessPoint) -> Self {
        Self {
            r,
            t: p.t,
            tprime: p.tprime,
            d_t: p.d_t,
            d_tplus: p.d_tplus,
            f: p.f,
            b: p.b,
            delta_d: p.delta_d,
            lower: p.lower,
            upper: p.upper,
            class: p.class.as_str(),
        }
    }
}

#[derive(Serialize)]
struct ProfileRecord {
    #[serde(skip_serializing_if = "Option::is_none")]
    r: Option<f64>,
    t: f64,
    #[serde(rename = "D")]
    d: f64,
    interval_flag: u8,
}

/// One labelled surface; `r` is set only inside an r-sweep.
pub struct Labelled<'a, T> {
    pub r: Option<f64>,
    pub item: &'a T,
}

fn header(columns: &[&str], with_r: bool) -> String {
    let mut h = if with_r { String::from("r,") } else { String::new() };
    h.push_str(&columns.join(","));
    h.push('\n');
    h
}

pub fn surface_text(surfaces: &[Labelled<WitnessSurface>], format: OutputFormat) -> Result<String> {
    let with_r = surfaces.iter().any(|s| s.r.is_some());
    match format {
        OutputFormat::Csv => {
            let mut out = header(&SURFACE_COLUMNS, with_r);
            for s in surfaces {
                for p in s.item.points() {
                    if let Some(r) = s.r {
                        let _ = write!(out, "{},", num(r));
                    }
                    let values = [p.t, p.tprime, p.d_t, p.d_tplus, p.f, p.b, p.delta_d, p.lower, p.upper];
                    for v in values {
                        out.push_str(&num(v));
                        out.push(',');
                    }
                    out.push_str(p.class.as_str());
                    out.push('\n');
                }
            }
            Ok(out)
        }
        OutputFormat::Json => {
            let records: Vec<SurfaceRecord> =
                surfaces.iter().flat_map(|s| s.item.points().map(move |p| SurfaceRecord::new(s.r, p))).collect();
            Ok(serde_json::to_string_pretty(&records).expect("records serialize") + "\n")
        }
    }
}

pub fn profile_text(profiles: &[Labelled<MonotonicityProfile>], format: OutputFormat) -> Result<String> {
    let with_r = profiles.iter().any(|s| s.r.is_some());
    let records: Vec<ProfileRecord> = profiles
        .iter()
        .flat_map(|s| {
            let flags = s.item.interval_flags();
            s.item.times.iter().zip(&s.item.d_values).zip(flags).map(move |((&t, &d), flag)| ProfileRecord {
                r: s.r,
                t,
                d,
                interval_flag: flag as u8,
            })
        })
        .collect();
    match format {
        OutputFormat::Csv => {
            let mut out = header(&PROFILE_COLUMNS, with_r);
            for rec in &records {
                if let Some(r) = rec.r {
                    let _ = write!(out, "{},", num(r));
                }
                let _ = writeln!(out, "{},{},{}", num(rec.t), num(rec.d), rec.interval_flag);
            }
            Ok(out)
        }
        OutputFormat::Json => Ok(serde_json::to_string_pretty(&records).expect("records serialize") + "\n"),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepEntry {
    pub r: f64,
    pub measure: f64,
    pub guaranteed_increase: usize,
    pub max_b: f64,
    /// `max (B − D − F)`; positive exactly when some point is above threshold.
    pub max_excess: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub scenario: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measure: Option<f64>,
    pub counts: BTreeMap<String, usize>,
    pub points: usize,
    pub max_violation: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub sweep: Vec<SweepEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub correlation_norm: Option<f64>,
}

impl RunSummary {
    pub fn new(scenario: &str) -> Self {
        Self {
            scenario: scenario.to_string(),
            measure: None,
            counts: Classification::ALL.iter().map(|c| (c.as_str().to_string(), 0)).collect(),
            points: 0,
            max_violation: 0.0,
            sweep: Vec::new(),
            correlation_norm: None,
        }
    }

    pub fn add_surface(&mut self, s: &WitnessSurface) {
        for p in s.points() {
            *self.counts.entry(p.class.as_str().to_string()).or_default() += 1;
            self.points += 1;
            self.max_violation = self.max_violation.max(p.sandwich_violation());
        }
    }

    pub fn count(&self, class: Classification) -> usize {
        self.counts.get(class.as_str()).copied().unwrap_or(0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes") + "\n"
    }
}

pub fn extension(format: OutputFormat) -> &'static str {
    match format {
        OutputFormat::Csv => "csv",
        OutputFormat::Json => "json",
    }
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, contents)?;
    Ok(path)
}
