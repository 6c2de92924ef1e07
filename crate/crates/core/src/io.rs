// Copyright 2026 The urnvote Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! File formats: instance JSON, statistics JSON and CSV tables.
//!
//! An instance file holds one of
//!
//! ```json
//! {"probs": [0.25, "1/2", [3, 4]]}
//! {"rows": [["1/2", "1/2"], [0.9, 0.1]]}
//! {"lower_bound": {"n": 5, "eps": "1/5"}}
//! ```
//!
//! Every entry is read as an exact rational: JSON numbers by their decimal
//! text, strings as `"a/b"` or decimals, and pairs as numerator and
//! denominator.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::engine::TrialStats;
use crate::error::{Error, Result};
use crate::model::{BichromaticInstance, MulticolorInstance};
use crate::scalar::{parse_rational, Rational};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Instance {
    Bichromatic(BichromaticInstance<Rational>),
    Multicolor(MulticolorInstance<Rational>),
}

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

pub fn parse_value(v: &Value) -> Result<Rational> {
    let parsed = match v {
        Value::Number(n) => parse_rational(&n.to_string()),
        Value::String(s) => parse_rational(s),
        Value::Array(pair) if pair.len() == 2 => {
            let num = parse_value(&pair[0])?;
            let den = parse_value(&pair[1])?;
            if num.is_integer() && den.is_integer() && den != Rational::from_integer(0.into()) {
                Some(num / den)
            } else {
                None
            }
        }
        _ => None,
    };
    parsed.ok_or_else(|| parse_err(format!("not a number: {v}")))
}

fn parse_list(v: &Value, what: &str) -> Result<Vec<Rational>> {
    v.as_array()
        .ok_or_else(|| parse_err(format!("\"{what}\" must be an array")))?
        .iter()
        .map(parse_value)
        .collect()
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let doc: Value = serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))?;
    let obj = doc
        .as_object()
        .ok_or_else(|| parse_err("instance must be a JSON object"))?;
    if let Some(probs) = obj.get("probs") {
        return Ok(Instance::Bichromatic(BichromaticInstance::new(
            parse_list(probs, "probs")?,
        )?));
    }
    if let Some(rows) = obj.get("rows") {
        let rows = rows
            .as_array()
            .ok_or_else(|| parse_err("\"rows\" must be an array"))?
            .iter()
            .map(|r| parse_list(r, "rows"))
            .collect::<Result<Vec<_>>>()?;
        return Ok(Instance::Multicolor(MulticolorInstance::new(rows)?));
    }
    if let Some(lb) = obj.get("lower_bound") {
        let n = lb
            .get("n")
            .and_then(Value::as_u64)
            .ok_or_else(|| parse_err("\"lower_bound\" needs an integer \"n\""))?;
        let eps = parse_value(
            lb.get("eps")
                .ok_or_else(|| parse_err("\"lower_bound\" needs \"eps\""))?,
        )?;
        return Ok(Instance::Bichromatic(BichromaticInstance::lower_bound(
            n as usize, eps,
        )?));
    }
    Err(parse_err(
        "instance needs \"probs\", \"rows\" or \"lower_bound\"",
    ))
}

pub(crate) fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn load_instance(path: &Path) -> Result<Instance> {
    parse_instance(&read_file(path)?)
}

/// Instance JSON with every entry written as an exact `"a/b"` string.
pub fn instance_to_json(inst: &Instance) -> String {
    let strings = |v: &[Rational]| v.iter().map(ToString::to_string).collect::<Vec<_>>();
    let doc = match inst {
        Instance::Bichromatic(b) => serde_json::json!({ "probs": strings(b.probs()) }),
        Instance::Multicolor(m) => {
            serde_json::json!({ "rows": m.rows().iter().map(|r| strings(r)).collect::<Vec<_>>() })
        }
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("json values serialize");
    text.push('\n');
    text
}

/// The statistics file written by `simulate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub schema: u32,
    pub system: String,
    #[serde(flatten)]
    pub stats: TrialStats,
}

impl StatsReport {
    pub fn new(system: &str, stats: TrialStats) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            system: system.to_owned(),
            stats,
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("stats serialize");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let report: Self = serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))?;
        if report.schema != SCHEMA_VERSION {
            return Err(parse_err(format!("unsupported schema {}", report.schema)));
        }
        Ok(report)
    }
}

pub fn to_csv<S: Serialize>(rows: &[S]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| parse_err(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| parse_err(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| parse_err(e.to_string()))
}

pub fn from_csv<D: DeserializeOwned>(text: &str) -> Result<Vec<D>> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .map(|r| r.map_err(|e| parse_err(e.to_string())))
        .collect()
}

/// A square matrix as CSV with header `urn,1,2,...,n`.
pub fn matrix_to_csv(matrix: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["urn".to_owned()];
    header.extend((1..=matrix.len()).map(|j| j.to_string()));
    let err = |e: csv::Error| parse_err(e.to_string());
    w.write_record(&header).map_err(err)?;
    for (i, row) in matrix.iter().enumerate() {
        let mut record = vec![(i + 1).to_string()];
        record.extend(row.iter().cloned());
        w.write_record(&record).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| parse_err(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| parse_err(e.to_string()))
}

pub fn matrix_from_csv(text: &str) -> Result<Vec<Vec<String>>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.records()
        .map(|rec| {
            let rec = rec.map_err(|e| parse_err(e.to_string()))?;
            Ok(rec.iter().skip(1).map(str::to_owned).collect())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::condorcet::{CoeffEntry, CoeffTable};
    use crate::model::Urn;

    #[test]
    fn value_forms() {
        let q = Rational::new(3.into(), 4.into());
        for text in ["0.75", "\"3/4\"", "[3, 4]", "\"0.75\"", "7.5e-1"] {
            assert_eq!(
                parse_value(&serde_json::from_str(text).unwrap()).unwrap(),
                q,
                "{text}"
            );
        }
        for text in ["true", "[1, 0]", "[0.5, 2]", "\"a\""] {
            assert!(
                parse_value(&serde_json::from_str(text).unwrap()).is_err(),
                "{text}"
            );
        }
    }

    #[test]
    fn instance_kinds() {
        let Instance::Bichromatic(b) = parse_instance(r#"{"probs": [0.75, "1/4"]}"#).unwrap()
        else {
            panic!("expected two colors")
        };
        assert_eq!(b.probs()[0], Rational::new(1.into(), 4.into()));
        let Instance::Bichromatic(lb) =
            parse_instance(r#"{"lower_bound": {"n": 5, "eps": 0.2}}"#).unwrap()
        else {
            panic!("expected two colors")
        };
        assert_eq!(lb.len(), 5);
        assert!(matches!(
            parse_instance(r#"{"rows": [[0.5, 0.5], [0.9, 0.1]]}"#).unwrap(),
            Instance::Multicolor(_)
        ));
        assert!(parse_instance(r#"{"rows": [[0.5, 0.6], [0.9, 0.1]]}"#).is_err());
        assert!(parse_instance("[]").is_err());
        assert!(parse_instance("{}").is_err());
    }

    #[test]
    fn instances_round_trip() {
        for text in [
            r#"{"probs": ["1/3", 0.1, "2/3"]}"#,
            r#"{"rows": [["1/3", "2/3"], [0.9, 0.1]]}"#,
        ] {
            let inst = parse_instance(text).unwrap();
            assert_eq!(parse_instance(&instance_to_json(&inst)).unwrap(), inst);
        }
    }

    #[test]
    fn stats_round_trip() {
        let report = StatsReport::new(
            "plurality",
            TrialStats::new(100, 50, 3, 7, Urn::from_offset(2)),
        );
        let text = report.to_json();
        assert!(text.starts_with("{\n  \"schema\": 1,\n  \"system\": \"plurality\""));
        assert_eq!(StatsReport::from_json(&text).unwrap(), report);
        assert!(StatsReport::from_json(&text.replace("\"schema\": 1", "\"schema\": 2")).is_err());
    }

    #[test]
    fn coefficient_csv_round_trip() {
        let entries = CoeffTable::<Rational>::with_extent(3, 3).entries(3, 3);
        let text = to_csv(&entries).unwrap();
        assert!(text.starts_with("k,l,b,a\n0,0,1,1\n"));
        assert_eq!(from_csv::<CoeffEntry>(&text).unwrap(), entries);
    }

    #[test]
    fn matrix_csv_round_trip() {
        let m = vec![
            vec!["1/2".to_owned(), "1/2".to_owned()],
            vec!["0".to_owned(), "1".to_owned()],
        ];
        let text = matrix_to_csv(&m).unwrap();
        assert!(text.starts_with("urn,1,2\n1,1/2,1/2\n"));
        assert_eq!(matrix_from_csv(&text).unwrap(), m);
    }
}
