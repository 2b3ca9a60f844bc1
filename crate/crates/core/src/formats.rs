//! File formats: instance JSON, results CSV and small CSV helpers.
//!
//! Numbers are written in the shortest form that parses back to the same
//! `f64`, so files are stable under diff.

use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instances::{IsingInstance, Metadata, Spin};
use crate::qac::CodeFamily;
use crate::solvers::SampleSet;

#[derive(Serialize, Deserialize)]
struct LogicalDoc {
    n: usize,
    h: Vec<f64>,
    couplers: Vec<(usize, usize, f64)>,
}

#[derive(Serialize, Deserialize)]
struct CodeDoc {
    #[serde(flatten)]
    family: CodeFamily,
    logical: LogicalDoc,
}

#[derive(Serialize, Deserialize)]
struct InstanceDoc {
    version: String,
    n: usize,
    h: Vec<f64>,
    couplers: Vec<(usize, usize, f64)>,
    #[serde(default)]
    planted: Option<Vec<Spin>>,
    #[serde(default)]
    ground_energy: Option<f64>,
    #[serde(default)]
    code: Option<CodeDoc>,
    #[serde(default)]
    metadata: Metadata,
}

/// A parsed instance file. An encoded (physical) instance carries the code
/// and the logical instance needed to decode its samples.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceFile {
    pub instance: IsingInstance,
    pub code: Option<(CodeFamily, IsingInstance)>,
}

impl InstanceFile {
    pub fn plain(instance: IsingInstance) -> Self {
        InstanceFile { instance, code: None }
    }
}

fn couplers_of(instance: &IsingInstance) -> Vec<(usize, usize, f64)> {
    instance.couplers().iter().map(|c| (c.i, c.j, c.value)).collect()
}

fn format_err(e: impl std::fmt::Display) -> Error {
    Error::Format(e.to_string())
}

pub fn instance_to_json(file: &InstanceFile) -> String {
    let inst = &file.instance;
    let doc = InstanceDoc {
        version: crate::VERSION.to_string(),
        n: inst.n(),
        h: inst.h().to_vec(),
        couplers: couplers_of(inst),
        planted: inst.planted().map(<[Spin]>::to_vec),
        ground_energy: inst.known_ground_energy(),
        code: file.code.as_ref().map(|(family, logical)| CodeDoc {
            family: family.clone(),
            logical: LogicalDoc {
                n: logical.n(),
                h: logical.h().to_vec(),
                couplers: couplers_of(logical),
            },
        }),
        metadata: inst.metadata().clone(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("instance document serializes");
    text.push('\n');
    text
}

/// Parses an instance file. Every structural problem, including invalid
/// couplers or a planted state that contradicts the ground energy, is a
/// [`Error::Format`].
pub fn instance_from_json(text: &str) -> Result<InstanceFile> {
    let doc: InstanceDoc = serde_json::from_str(text).map_err(format_err)?;
    let mut inst = IsingInstance::new(doc.n, doc.h, doc.couplers)
        .map_err(format_err)?
        .with_metadata(doc.metadata);
    inst = match (doc.planted, doc.ground_energy) {
        (Some(p), Some(e)) => inst.with_planted(p, e).map_err(format_err)?,
        (Some(p), None) => {
            let e = inst.energy(&p).map_err(format_err)?;
            inst.with_planted(p, e).map_err(format_err)?
        }
        (None, e) => inst.with_ground_energy(e),
    };
    let code = match doc.code {
        None => None,
        Some(c) => {
            let logical = IsingInstance::new(c.logical.n, c.logical.h, c.logical.couplers).map_err(format_err)?;
            Some((c.family, logical))
        }
    };
    Ok(InstanceFile { instance: inst, code })
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<InstanceFile> {
    let mut text = String::new();
    std::fs::File::open(path)?.read_to_string(&mut text)?;
    instance_from_json(&text)
}

pub fn write_instance(path: impl AsRef<Path>, file: &InstanceFile) -> Result<()> {
    std::fs::write(path, instance_to_json(file))?;
    Ok(())
}

/// `1` for spin +1, `0` for −1.
pub fn state_bits(state: &[Spin]) -> String {
    state.iter().map(|&s| if s > 0 { '1' } else { '0' }).collect()
}

pub fn parse_state_bits(bits: &str) -> Result<Vec<Spin>> {
    bits.chars()
        .map(|c| match c {
            '1' => Ok(1),
            '0' => Ok(-1),
            other => Err(Error::Format(format!("invalid state bit {other:?}"))),
        })
        .collect()
}

/// Results CSV: `rep,energy,state_bits,wall_time_s`. Wall times are measured
/// and therefore not reproducible; unless `wall_time` is set the column is
/// left empty so reruns produce identical files.
pub fn results_csv(set: &SampleSet, wall_time: bool) -> String {
    let mut out = String::from("rep,energy,state_bits,wall_time_s\n");
    for (rep, (state, energy)) in set.states.iter().zip(&set.energies).enumerate() {
        let t = if wall_time {
            set.wall_times.get(rep).map_or(String::new(), f64::to_string)
        } else {
            String::new()
        };
        out.push_str(&format!("{rep},{energy},{},{t}\n", state_bits(state)));
    }
    out
}

/// Rows of a results CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultsTable {
    pub energies: Vec<f64>,
    pub states: Vec<Vec<Spin>>,
    pub wall_times: Vec<Option<f64>>,
}

pub fn parse_results_csv<R: Read>(reader: R) -> Result<ResultsTable> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if headers != ["rep", "energy", "state_bits", "wall_time_s"] {
        return Err(Error::Format(format!("unexpected results header {}", headers.join(","))));
    }
    let mut table = ResultsTable {
        energies: Vec::new(),
        states: Vec::new(),
        wall_times: Vec::new(),
    };
    for (k, row) in rdr.records().enumerate() {
        let row = row?;
        let num = |field: &str| -> Result<f64> {
            field
                .parse()
                .map_err(|_| Error::Format(format!("row {}: cannot parse {field:?}", k + 1)))
        };
        table.energies.push(num(&row[1])?);
        table.states.push(parse_state_bits(&row[2])?);
        table.wall_times.push(if row[3].is_empty() { None } else { Some(num(&row[3])?) });
    }
    Ok(table)
}

/// Joins rows into CSV text with the given header.
pub fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
