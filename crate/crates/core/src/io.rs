//! CSV ingestion, population spec files and report writing.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::population::PopulationSpec;
use crate::regression::SampleData;

/// Name given to the prepended constant column.
pub const INTERCEPT: &str = "(intercept)";

/// Which CSV columns play which role.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnRoles {
    pub outcome: String,
    pub causes: Vec<String>,
    pub attributes: Vec<String>,
}

/// Parsed sample plus the attribute names in the order the fit uses.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvSample {
    pub data: SampleData,
    pub cause_names: Vec<String>,
    pub attribute_names: Vec<String>,
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

/// Reads the named columns. An all-ones attribute column is moved to the
/// front; without one, an intercept is prepended.
pub fn parse_csv(path: &Path, roles: &ColumnRoles, population_size: Option<usize>) -> Result<CsvSample> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| io_error(path, e))?;
    let headers = reader.headers().map_err(|e| io_error(path, e))?.clone();
    let index_of = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::InvalidInput(format!("missing column '{name}' in {}", path.display())))
    };
    let wanted: Vec<&str> = std::iter::once(roles.outcome.as_str())
        .chain(roles.causes.iter().map(String::as_str))
        .chain(roles.attributes.iter().map(String::as_str))
        .collect();
    let indices = wanted.iter().map(|n| index_of(n)).collect::<Result<Vec<_>>>()?;

    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); wanted.len()];
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| io_error(path, e))?;
        for (c, &idx) in indices.iter().enumerate() {
            let cell = record.get(idx).unwrap_or("");
            let value = cell.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| {
                Error::InvalidInput(format!(
                    "non-numeric cell at row {}, column '{}': '{cell}'",
                    row + 1,
                    wanted[c]
                ))
            })?;
            columns[c].push(value);
        }
    }

    let n = columns[0].len();
    let k = roles.causes.len();
    let mut attr_cols: Vec<Vec<f64>> = columns.split_off(1 + k);
    let mut attribute_names = roles.attributes.clone();
    match attr_cols.iter().position(|col| col.iter().all(|&v| v == 1.0)) {
        Some(pos) => {
            let col = attr_cols.remove(pos);
            attr_cols.insert(0, col);
            let name = attribute_names.remove(pos);
            attribute_names.insert(0, name);
        }
        None => {
            attr_cols.insert(0, vec![1.0; n]);
            attribute_names.insert(0, INTERCEPT.to_string());
        }
    }
    let q = attr_cols.len();
    if n < k + q + 1 {
        return Err(Error::InvalidInput(format!(
            "{n} data rows; {k} causes and {q} attributes need at least {}",
            k + q + 1
        )));
    }
    let y = columns.remove(0);
    let u = DMatrix::from_fn(n, k, |i, j| columns[j][i]);
    let z = DMatrix::from_fn(n, q, |i, j| attr_cols[j][i]);
    Ok(CsvSample {
        data: SampleData::new(y, u, z, population_size)?,
        cause_names: roles.causes.clone(),
        attribute_names,
    })
}

pub fn read_population_spec(path: &Path) -> Result<PopulationSpec> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    parse_population_spec(&text)
}

pub fn parse_population_spec(text: &str) -> Result<PopulationSpec> {
    serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("population spec: {e}")))
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| Error::InvalidInput(format!("cannot serialize report: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// Writes through a sibling temporary file and a rename, so a failed run
/// never leaves a partial file at `path`.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::Io(format!("{}: not a file path", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(file_name);
    tmp_name.push(format!(".{}.tmp", std::process::id()));
    let tmp: PathBuf = path.with_file_name(tmp_name);
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(io_error(path, e));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::population::{AssignmentDesign, CauseSpec, OutcomeSpec, SamplingDesign};
    use proptest::prelude::*;

    fn roles(outcome: &str, causes: &[&str], attributes: &[&str]) -> ColumnRoles {
        ColumnRoles {
            outcome: outcome.into(),
            causes: causes.iter().map(|s| s.to_string()).collect(),
            attributes: attributes.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn write(dir: &tempfile::TempDir, text: &str) -> PathBuf {
        let p = dir.path().join("data.csv");
        fs::write(&p, text).unwrap();
        p
    }

    #[test]
    fn auto_intercept() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "Y,X\n1,1\n2,1\n0,0\n2,0\n");
        let s = parse_csv(&p, &roles("Y", &["X"], &[]), None).unwrap();
        assert_eq!((s.data.len(), s.data.k(), s.data.q()), (4, 1, 1));
        assert_eq!(s.attribute_names, vec![INTERCEPT]);
        assert_eq!(s.data.y(), &[1.0, 2.0, 0.0, 2.0]);
    }

    #[test]
    fn existing_constant_column_moves_first() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "Y,X,W,one\n1,1,3,1\n2,1,1,1\n0,0,2,1\n2,0,5,1\n3,1,0,1\n");
        let s = parse_csv(&p, &roles("Y", &["X"], &["W", "one"]), Some(10)).unwrap();
        assert_eq!(s.attribute_names, vec!["one", "W"]);
        assert_eq!(s.data.z()[(0, 1)], 3.0);
    }

    #[test]
    fn reports_missing_column_and_bad_cell() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "Y,X\n1,1\n2,1\n0,0\n2,0\n");
        let e = parse_csv(&p, &roles("Y", &["D"], &[]), None).unwrap_err();
        assert!(e.to_string().contains("'D'"), "{e}");
        let p = write(&dir, "Y,X\n1,1\n2,abc\n0,0\n2,0\n");
        let e = parse_csv(&p, &roles("Y", &["X"], &[]), None).unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("row 2") && msg.contains("'X'"), "{msg}");
    }

    #[test]
    fn too_few_rows() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "Y,X\n1,1\n2,0\n");
        assert!(parse_csv(&p, &roles("Y", &["X"], &[]), None).is_err());
    }

    #[test]
    fn rank_deficient_attributes_still_parse() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "Y,X,A,B\n1,1,1,2\n2,1,2,4\n0,0,3,6\n2,0,4,8\n5,1,5,10\n");
        let s = parse_csv(&p, &roles("Y", &["X"], &["A", "B"]), None).unwrap();
        assert!(crate::regression::fit_ols(&s.data).unwrap_err().is_singular());
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.json");
        write_atomic(&p, "one").unwrap();
        write_atomic(&p, "two").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    fn specs() -> impl Strategy<Value = PopulationSpec> {
        (2usize..6).prop_flat_map(|n| {
            (
                prop::collection::vec(-5.0..5.0f64, n),
                prop::collection::vec(-5.0..5.0f64, n),
                prop::collection::vec(0.0..1.0f64, n),
                any::<bool>(),
                1usize..=n,
            )
                .prop_map(move |(y1, y0, p, srs, size)| PopulationSpec {
                    n,
                    outcomes: OutcomeSpec::Binary { y1, y0 },
                    attributes: vec![vec![1.0]; n],
                    causes: Some(CauseSpec::Bernoulli { p }),
                    sampling: if srs {
                        SamplingDesign::Srs { size }
                    } else {
                        SamplingDesign::Bernoulli { rate: size as f64 / n as f64 }
                    },
                    assignment: AssignmentDesign::Independent,
                })
        })
    }

    proptest! {
        #[test]
        fn population_spec_round_trip(spec in specs()) {
            let text = to_json(&spec).unwrap();
            prop_assert_eq!(parse_population_spec(&text).unwrap(), spec);
        }
    }
}
