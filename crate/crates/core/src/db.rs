//! The `zkdb v1` text database of class representatives, and a JSON export.
//!
//! ```text
//! # zkdb v1
//! record k=4 n=1 lattice=zn type=I index=1
//! 2
//! end
//! ```
//!
//! One record per representative, sorted by `(k, n, lattice, canonical form)`,
//! each followed by its Howell generator rows and a closing `end`. LF line
//! endings only; rendering a parsed file reproduces it byte for byte.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::classify::ClassificationResult;
use crate::code::{CodeType, ZkCode};
use crate::error::{Result, ZkError};
use crate::lattice::LatticeClass;
use crate::linalg::{howell_form, ZkMatrix};

pub const HEADER: &str = "# zkdb v1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DbRecord {
    pub k: u32,
    pub n: usize,
    pub lattice: LatticeClass,
    pub code_type: CodeType,
    pub index: usize,
    pub code: ZkCode,
}

/// Flattens results into records in file order.
pub fn records(results: &[ClassificationResult]) -> Vec<DbRecord> {
    let mut sorted: Vec<&ClassificationResult> = results.iter().collect();
    sorted.sort_by_key(|r| (r.k, r.n, r.lattice));
    let mut out = Vec::new();
    for r in sorted {
        let mut reps = r.representatives.clone();
        reps.sort();
        for (i, code) in reps.into_iter().enumerate() {
            out.push(DbRecord {
                k: r.k,
                n: r.n,
                lattice: r.lattice,
                code_type: code.code_type(),
                index: i + 1,
                code,
            });
        }
    }
    out
}

pub fn render(records: &[DbRecord]) -> String {
    let mut out = String::from(HEADER);
    out.push('\n');
    for r in records {
        let ty = match r.code_type {
            CodeType::TypeII => "II",
            _ => "I",
        };
        out.push_str(&format!(
            "record k={} n={} lattice={} type={} index={}\n",
            r.k,
            r.n,
            r.lattice.tag(),
            ty,
            r.index
        ));
        out.push_str(&r.code.generator().to_string());
        out.push_str("end\n");
    }
    out
}

pub fn render_results(results: &[ClassificationResult]) -> String {
    render(&records(results))
}

/// Writes to a temporary sibling file and renames it into place.
pub fn export_db(results: &[ClassificationResult], dest: &Path) -> Result<()> {
    write_atomically(dest, render_results(results).as_bytes())
}

pub fn write_atomically(dest: &Path, bytes: &[u8]) -> Result<()> {
    let dir = dest.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = dest
        .file_name()
        .ok_or_else(|| ZkError::Io(format!("{} is not a file path", dest.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, dest).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })?;
    Ok(())
}

fn malformed(line: usize, msg: impl Into<String>) -> ZkError {
    ZkError::Malformed {
        line,
        msg: msg.into(),
    }
}

pub fn parse(text: &str) -> Result<Vec<DbRecord>> {
    if text.contains('\r') {
        return Err(malformed(1, "CR characters are not allowed"));
    }
    let mut lines = text.split('\n').enumerate().map(|(i, l)| (i + 1, l));
    match lines.next() {
        Some((_, HEADER)) => {}
        _ => return Err(malformed(1, format!("expected {HEADER:?}"))),
    }
    if !text.ends_with('\n') {
        return Err(malformed(text.lines().count(), "missing final newline"));
    }
    let mut out = Vec::new();
    while let Some((no, line)) = lines.next() {
        if line.is_empty() {
            if lines.next().is_some() {
                return Err(malformed(no, "blank line"));
            }
            break;
        }
        let (k, n, lattice, code_type, index) = parse_record_line(no, line)?;
        let mut rows: Vec<Vec<i64>> = Vec::new();
        loop {
            let (rno, row) = lines
                .next()
                .ok_or_else(|| malformed(no, "record without end"))?;
            if row == "end" {
                break;
            }
            let vals: Vec<i64> = row
                .split(' ')
                .map(|t| {
                    t.parse::<i64>()
                        .ok()
                        .filter(|&v| (0..k as i64).contains(&v) && t == v.to_string())
                        .ok_or_else(|| malformed(rno, format!("bad entry {t:?}")))
                })
                .collect::<Result<_>>()?;
            if vals.len() != n {
                return Err(malformed(rno, format!("expected {n} entries, found {}", vals.len())));
            }
            rows.push(vals);
        }
        let m = ZkMatrix::from_rows(k, n, &rows).map_err(|e| malformed(no, e.to_string()))?;
        if howell_form(&m) != m {
            return Err(malformed(no, "generator rows are not in Howell form"));
        }
        out.push(DbRecord {
            k,
            n,
            lattice,
            code_type,
            index,
            code: ZkCode::from_matrix(&m),
        });
    }
    Ok(out)
}

fn parse_record_line(no: usize, line: &str) -> Result<(u32, usize, LatticeClass, CodeType, usize)> {
    let mut parts = line.split(' ');
    if parts.next() != Some("record") {
        return Err(malformed(no, "expected a record line"));
    }
    let mut field = |name: &str| -> Result<&str> {
        parts
            .next()
            .and_then(|p| p.strip_prefix(name)?.strip_prefix('='))
            .ok_or_else(|| malformed(no, format!("expected field {name}")))
    };
    let num = |s: &str, no| -> Result<u64> {
        s.parse::<u64>()
            .ok()
            .filter(|v| s == v.to_string())
            .ok_or_else(|| malformed(no, format!("bad number {s:?}")))
    };
    let k = num(field("k")?, no)? as u32;
    let n = num(field("n")?, no)? as usize;
    let lattice = LatticeClass::from_tag(field("lattice")?, n).map_err(|e| malformed(no, e.to_string()))?;
    let code_type = match field("type")? {
        "I" => CodeType::TypeI,
        "II" => CodeType::TypeII,
        t => return Err(malformed(no, format!("bad type {t:?}"))),
    };
    let index = num(field("index")?, no)? as usize;
    if parts.next().is_some() {
        return Err(malformed(no, "trailing fields"));
    }
    if !(2..=crate::linalg::MAX_MODULUS).contains(&k) || n == 0 {
        return Err(malformed(no, "parameters out of range"));
    }
    Ok((k, n, lattice, code_type, index))
}

pub fn read_db(path: &Path) -> Result<Vec<DbRecord>> {
    parse(&fs::read_to_string(path)?)
}

/// Regroups records into results (timing zero).
pub fn to_results(records: &[DbRecord]) -> Vec<ClassificationResult> {
    let mut groups: BTreeMap<(u32, usize, LatticeClass), Vec<ZkCode>> = BTreeMap::new();
    for r in records {
        groups.entry((r.k, r.n, r.lattice)).or_default().push(r.code.clone());
    }
    groups
        .into_iter()
        .map(|((k, n, l), reps)| ClassificationResult::from_representatives(k, n, l, reps, 0.0))
        .collect()
}

#[derive(Serialize)]
struct JsonResult<'a> {
    k: u32,
    n: usize,
    lattice: &'a str,
    count: usize,
    type_i: usize,
    type_ii: usize,
    timing_secs: f64,
    representatives: Vec<Vec<Vec<u32>>>,
}

pub fn render_json(results: &[ClassificationResult]) -> String {
    let view: Vec<JsonResult> = results
        .iter()
        .map(|r| JsonResult {
            k: r.k,
            n: r.n,
            lattice: r.lattice.tag(),
            count: r.count,
            type_i: r.type_counts.0,
            type_ii: r.type_counts.1,
            timing_secs: r.timing_secs,
            representatives: r.representatives.iter().map(|c| c.generator().to_rows()).collect(),
        })
        .collect();
    serde_json::to_string_pretty(&view).expect("serializable") + "\n"
}
