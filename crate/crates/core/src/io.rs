//! Serialization helpers: fixed CSV schemas, key-sorted JSON, exact rationals
//! as `num/den`, and run manifests with SHA-256 digests of every data file.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::polarimetry::{CountSample, FringeCurve};
use crate::qccs::{rotations_label, CaseReport};
use crate::state::OutcomeDistribution;

pub const CURVE_HEADER: [&str; 4] = ["angle_or_outcome", "value", "count", "std_error"];
pub const CASE_HEADER: [&str; 9] = [
    "pattern",
    "rotations",
    "f0",
    "p_exact_num",
    "p_exact_den",
    "p_exact",
    "p_model",
    "p_mc",
    "p_mc_err",
];

pub fn rational_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn serialize_rational<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&rational_string(r))
}

/// Formats with 12 significant digits, `%g` style.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        let s = if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        };
        if s == "-0" {
            "0".into()
        } else {
            s
        }
    } else {
        let s = format!("{x:.11e}");
        let (mantissa, e) = s.split_once('e').expect("exponent form");
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        format!("{mantissa}e{e}")
    }
}

/// Key-sorted, pretty JSON with a trailing newline.
pub fn to_sorted_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    // serde_json::Map is a BTreeMap, so the round trip sorts every object
    let v = serde_json::to_value(value)?;
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

/// RFC-4180 CSV with a fixed header row.
pub fn csv_string(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn curve_rows(curve: &FringeCurve) -> Vec<Vec<String>> {
    (0..curve.len())
        .map(|i| {
            vec![
                fmt_num(curve.angles[i]),
                fmt_num(curve.values[i]),
                curve
                    .counts
                    .as_ref()
                    .map(|c| c[i].to_string())
                    .unwrap_or_default(),
                curve
                    .errors
                    .as_ref()
                    .map(|e| fmt_num(e[i]))
                    .unwrap_or_default(),
            ]
        })
        .collect()
}

/// Rows for a joint outcome table, `label` naming each outcome index.
pub fn distribution_rows(
    dist: &OutcomeDistribution,
    sample: Option<&CountSample>,
    label: impl Fn(usize) -> String,
) -> Vec<Vec<String>> {
    dist.probabilities()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            vec![
                label(i),
                fmt_num(*p),
                sample.map(|s| s.counts[i].to_string()).unwrap_or_default(),
                sample.map(|s| fmt_num(s.std_errors[i])).unwrap_or_default(),
            ]
        })
        .collect()
}

pub fn case_rows(reports: &[CaseReport]) -> Vec<Vec<String>> {
    reports
        .iter()
        .map(|r| {
            let (mc, mc_err) = match &r.monte_carlo {
                Some(m) => (fmt_num(m.rate), fmt_num(m.std_error)),
                None => (String::new(), String::new()),
            };
            vec![
                r.pattern.to_string(),
                rotations_label(&r.rotations),
                r.f0.to_string(),
                r.p_exact.numer().to_string(),
                r.p_exact.denom().to_string(),
                fmt_num(rational_to_f64(&r.p_exact)),
                fmt_num(r.p_model),
                mc,
                mc_err,
            ]
        })
        .collect()
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|source| Error::Io {
            path: parent.to_path_buf(),
            source,
        })?;
    }
    let mut f = fs::File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    f.write_all(contents.as_bytes()).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct OutputDigest {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest<C: Serialize> {
    pub config: C,
    pub version: String,
    pub duration_seconds: f64,
    pub outputs: Vec<OutputDigest>,
}

impl<C: Serialize> RunManifest<C> {
    pub fn new(config: C, duration_seconds: f64) -> Self {
        RunManifest {
            config,
            version: env!("CARGO_PKG_VERSION").to_string(),
            duration_seconds,
            outputs: Vec::new(),
        }
    }

    pub fn record(&mut self, path: &Path, contents: &str) {
        self.outputs.push(OutputDigest {
            path: path.display().to_string(),
            sha256: sha256_hex(contents.as_bytes()),
            bytes: contents.len(),
        });
    }
}

/// `out.csv` → `out.manifest.json`.
pub fn manifest_path(data: &Path) -> PathBuf {
    sibling_path(data, "manifest.json")
}

/// `out.csv` + `fit.json` → `out.fit.json`.
pub fn sibling_path(data: &Path, suffix: &str) -> PathBuf {
    let stem = data
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "output".into());
    data.with_file_name(format!("{stem}.{suffix}"))
}
