//! Versioned JSON artifacts and CSV emission.

use std::fs;
use std::path::Path;

use serde::{de::DeserializeOwned, Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CapfieldError, Result};
use crate::poisson::CapFunction;
use crate::sphere::net::{validate_net_family, Net};

pub const NETS_SCHEMA: &str = "capfield.nets.v1";
pub const CAPFN_SCHEMA: &str = "capfield.capfn.v1";
pub const CSV_SCHEMA: &str = "capfield.csv.v1";

/// Serialized net family with its provenance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetsFile {
    pub schema: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config_hash: Option<String>,
    pub nets: Vec<Net>,
}

/// Serialized cap function with its provenance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CapFunctionFile {
    pub schema: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config_hash: Option<String>,
    pub function: CapFunction,
}

pub fn sha256_hex(data: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(data);
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn io_err(path: &Path, e: std::io::Error) -> CapfieldError {
    CapfieldError::Io(format!("{}: {e}", path.display()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)
        .map_err(|e| CapfieldError::Serialization(e.to_string()))?;
    bytes.push(b'\n');
    fs::write(path, bytes).map_err(|e| io_err(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let bytes = fs::read(path).map_err(|e| io_err(path, e))?;
    serde_json::from_slice(&bytes).map_err(|e| CapfieldError::Serialization(e.to_string()))
}

/// Decodes the envelope only far enough to check the schema tag, so files of
/// an unknown version are rejected instead of misread.
fn checked_schema(path: &Path, expected: &str) -> Result<serde_json::Value> {
    let value: serde_json::Value = read_json(path)?;
    let schema = value
        .get("schema")
        .and_then(|s| s.as_str())
        .unwrap_or("(missing)")
        .to_string();
    if schema != expected {
        return Err(CapfieldError::UnsupportedSchema(schema));
    }
    Ok(value)
}

pub fn write_nets(path: &Path, nets: &[Net], config_hash: Option<String>) -> Result<()> {
    write_json(
        path,
        &NetsFile {
            schema: NETS_SCHEMA.into(),
            config_hash,
            nets: nets.to_vec(),
        },
    )
}

/// Reads and structurally revalidates a net family file.
pub fn read_nets(path: &Path) -> Result<NetsFile> {
    let value = checked_schema(path, NETS_SCHEMA)?;
    let file: NetsFile =
        serde_json::from_value(value).map_err(|e| CapfieldError::Serialization(e.to_string()))?;
    validate_net_family(&file.nets)?;
    Ok(file)
}

pub fn write_cap_function(path: &Path, f: &CapFunction, config_hash: Option<String>) -> Result<()> {
    write_json(
        path,
        &CapFunctionFile {
            schema: CAPFN_SCHEMA.into(),
            config_hash,
            function: f.clone(),
        },
    )
}

pub fn read_cap_function(path: &Path) -> Result<CapFunctionFile> {
    let value = checked_schema(path, CAPFN_SCHEMA)?;
    serde_json::from_value(value).map_err(|e| CapfieldError::Serialization(e.to_string()))
}

/// CSV text with a version comment line `# capfield.csv.v1 <name> config=<hash>`.
pub fn csv_string(name: &str, config_hash: &str, header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = format!("# {CSV_SCHEMA} {name} config={config_hash}\n");
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn write_csv(
    path: &Path,
    name: &str,
    config_hash: &str,
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<()> {
    fs::write(path, csv_string(name, config_hash, header, rows)).map_err(|e| io_err(path, e))
}

/// Parsed versioned CSV table.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub name: String,
    pub config_hash: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// Rejects files whose version line does not match the known schema.
pub fn read_csv(path: &Path) -> Result<CsvTable> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut lines = text.lines();
    let first = lines.next().unwrap_or("");
    let rest = first
        .strip_prefix(&format!("# {CSV_SCHEMA} "))
        .ok_or_else(|| CapfieldError::UnsupportedSchema(first.chars().take(64).collect()))?;
    let (name, tail) = rest
        .split_once(" config=")
        .ok_or_else(|| CapfieldError::UnsupportedSchema(first.chars().take(64).collect()))?;
    let header: Vec<String> = lines
        .next()
        .unwrap_or("")
        .split(',')
        .map(str::to_owned)
        .collect();
    let rows = lines
        .filter(|l| !l.is_empty())
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect();
    Ok(CsvTable {
        name: name.to_owned(),
        config_hash: tail.to_owned(),
        header,
        rows,
    })
}
