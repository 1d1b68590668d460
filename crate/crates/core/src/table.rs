use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{CoreError, Result};
use crate::io::write_atomic;

/// Metadata columns that precede the feature columns in the CSV form.
pub const METADATA_COLUMNS: [&str; 4] = ["case_id", "cohort", "class_label", "phase"];

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub case_id: String,
    pub cohort: String,
    pub class_label: Option<u8>,
    pub phase: Option<String>,
    pub values: Vec<f64>,
}

/// How ED/ES rows of the same case are combined into one modeling row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseMerge {
    /// Feature-wise concatenation; columns get `_ed` / `_es` suffixes.
    #[default]
    Concat,
    /// Element-wise mean of the two phase vectors; column names unchanged.
    Mean,
}

impl std::str::FromStr for PhaseMerge {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "concat" => Ok(PhaseMerge::Concat),
            "mean" => Ok(PhaseMerge::Mean),
            other => Err(format!("unknown phase merge `{other}` (expected concat|mean)")),
        }
    }
}

/// Rows are cases (one per case and phase), columns are named real features.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    feature_names: Vec<String>,
    rows: Vec<FeatureRow>,
}

impl FeatureTable {
    pub fn new(feature_names: Vec<String>, rows: Vec<FeatureRow>) -> Result<Self> {
        let mut seen = HashSet::new();
        for name in &feature_names {
            if METADATA_COLUMNS.contains(&name.as_str()) {
                return Err(CoreError::invalid(
                    "feature table",
                    format!("feature column `{name}` collides with a metadata column"),
                ));
            }
            if !seen.insert(name.as_str()) {
                return Err(CoreError::invalid(
                    "feature table",
                    format!("duplicate feature column `{name}`"),
                ));
            }
        }
        let mut keys = HashSet::new();
        for row in &rows {
            if row.values.len() != feature_names.len() {
                return Err(CoreError::invalid(
                    "feature table",
                    format!(
                        "row `{}` has {} values for {} columns",
                        row.case_id,
                        row.values.len(),
                        feature_names.len()
                    ),
                ));
            }
            if let Some(j) = row.values.iter().position(|v| v.is_nan()) {
                return Err(CoreError::invalid(
                    "feature table",
                    format!("row `{}` has NaN in `{}`", row.case_id, feature_names[j]),
                ));
            }
            if matches!(row.class_label, Some(l) if l > 1) {
                return Err(CoreError::invalid(
                    "feature table",
                    format!("row `{}` has a non-binary class label", row.case_id),
                ));
            }
            if !keys.insert((row.case_id.as_str(), row.phase.as_deref())) {
                return Err(CoreError::invalid(
                    "feature table",
                    format!(
                        "duplicate row for case `{}` phase `{}`",
                        row.case_id,
                        row.phase.as_deref().unwrap_or("")
                    ),
                ));
            }
        }
        Ok(Self { feature_names, rows })
    }

    pub fn empty(feature_names: Vec<String>) -> Result<Self> {
        Self::new(feature_names, Vec::new())
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn rows(&self) -> &[FeatureRow] {
        &self.rows
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.feature_names.iter().position(|n| n == name)
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r.values[j]).collect()
    }

    /// Row-major copy of the feature values.
    pub fn matrix(&self) -> Vec<Vec<f64>> {
        self.rows.iter().map(|r| r.values.clone()).collect()
    }

    /// Class labels, failing if any row lacks one.
    pub fn labels(&self) -> Result<Vec<u8>> {
        self.rows
            .iter()
            .map(|r| {
                r.class_label.ok_or_else(|| {
                    CoreError::invalid("feature table", format!("row `{}` has no class_label", r.case_id))
                })
            })
            .collect()
    }

    pub fn cohorts(&self) -> Vec<String> {
        self.rows
            .iter()
            .map(|r| r.cohort.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    pub fn filter_rows(&self, keep: impl Fn(&FeatureRow) -> bool) -> Self {
        Self {
            feature_names: self.feature_names.clone(),
            rows: self.rows.iter().filter(|r| keep(r)).cloned().collect(),
        }
    }

    pub fn subset_rows(&self, indices: &[usize]) -> Self {
        Self {
            feature_names: self.feature_names.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
        }
    }

    pub fn select_features(&self, names: &[String]) -> Result<Self> {
        let idx: Vec<usize> = names
            .iter()
            .map(|n| {
                self.feature_index(n)
                    .ok_or_else(|| CoreError::invalid("feature table", format!("unknown feature `{n}`")))
            })
            .collect::<Result<_>>()?;
        let rows = self
            .rows
            .iter()
            .map(|r| FeatureRow {
                values: idx.iter().map(|&j| r.values[j]).collect(),
                ..r.clone()
            })
            .collect();
        Self::new(names.to_vec(), rows)
    }

    /// Same rows and metadata with replacement values (one vector per row).
    pub fn with_values(&self, values: Vec<Vec<f64>>) -> Result<Self> {
        if values.len() != self.rows.len() {
            return Err(CoreError::invalid(
                "feature table",
                format!("{} value rows for {} table rows", values.len(), self.rows.len()),
            ));
        }
        let rows = self
            .rows
            .iter()
            .zip(values)
            .map(|(r, v)| FeatureRow { values: v, ..r.clone() })
            .collect();
        Self::new(self.feature_names.clone(), rows)
    }

    /// Appends the rows of `other`, which must have identical columns.
    pub fn concat(&self, other: &FeatureTable) -> Result<Self> {
        if self.feature_names != other.feature_names {
            return Err(CoreError::invalid("feature table", "column schemas differ"));
        }
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Self::new(self.feature_names.clone(), rows)
    }

    /// Rows ordered by `(case_id, phase)`.
    pub fn sorted(&self) -> Self {
        let mut rows = self.rows.clone();
        rows.sort_by(|a, b| (&a.case_id, &a.phase).cmp(&(&b.case_id, &b.phase)));
        Self {
            feature_names: self.feature_names.clone(),
            rows,
        }
    }

    /// Collapses ED/ES rows of each case into one row. Rows without a phase are
    /// kept as they are; a case with a phase must have exactly `ED` and `ES`.
    pub fn merge_phases(&self, mode: PhaseMerge) -> Result<Self> {
        if self.rows.iter().all(|r| r.phase.is_none()) {
            return Ok(self.clone());
        }
        let mut by_case: BTreeMap<&str, Vec<&FeatureRow>> = BTreeMap::new();
        for r in &self.rows {
            by_case.entry(r.case_id.as_str()).or_default().push(r);
        }
        let names = match mode {
            PhaseMerge::Concat => self
                .feature_names
                .iter()
                .map(|n| format!("{n}_ed"))
                .chain(self.feature_names.iter().map(|n| format!("{n}_es")))
                .collect(),
            PhaseMerge::Mean => self.feature_names.clone(),
        };
        let mut rows = Vec::with_capacity(by_case.len());
        for (case, group) in by_case {
            let find = |p: &str| {
                group
                    .iter()
                    .copied()
                    .find(|r| r.phase.as_deref().is_some_and(|q| q.eq_ignore_ascii_case(p)))
            };
            let (ed, es) = match (group.len(), find("ED"), find("ES")) {
                (2, Some(ed), Some(es)) => (ed, es),
                _ => {
                    return Err(CoreError::invalid(
                        "feature table",
                        format!("case `{case}` does not have exactly one ED and one ES row"),
                    ))
                }
            };
            if ed.cohort != es.cohort || ed.class_label != es.class_label {
                return Err(CoreError::invalid(
                    "feature table",
                    format!("case `{case}` has inconsistent cohort/label across phases"),
                ));
            }
            let values = match mode {
                PhaseMerge::Concat => ed.values.iter().chain(&es.values).copied().collect(),
                PhaseMerge::Mean => ed.values.iter().zip(&es.values).map(|(a, b)| 0.5 * (a + b)).collect(),
            };
            rows.push(FeatureRow {
                case_id: case.to_string(),
                cohort: ed.cohort.clone(),
                class_label: ed.class_label,
                phase: None,
                values,
            });
        }
        Self::new(names, rows)
    }

    pub fn write_csv_to<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let csv_err = |e: csv::Error| CoreError::invalid("csv", e.to_string());
        let header: Vec<&str> = METADATA_COLUMNS
            .iter()
            .copied()
            .chain(self.feature_names.iter().map(String::as_str))
            .collect();
        w.write_record(&header).map_err(csv_err)?;
        for r in &self.rows {
            let mut rec: Vec<String> = Vec::with_capacity(header.len());
            rec.push(r.case_id.clone());
            rec.push(r.cohort.clone());
            rec.push(r.class_label.map(|l| l.to_string()).unwrap_or_default());
            rec.push(r.phase.clone().unwrap_or_default());
            // Debug formatting is the shortest string that parses back bit-exactly.
            rec.extend(r.values.iter().map(|v| format!("{v:?}")));
            w.write_record(&rec).map_err(csv_err)?;
        }
        w.flush().map_err(|e| CoreError::invalid("csv", e.to_string()))?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv_to(&mut buf)?;
        String::from_utf8(buf).map_err(|e| CoreError::invalid("csv", e.to_string()))
    }

    pub fn read_csv_from<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let csv_err = |e: csv::Error| CoreError::invalid("csv", e.to_string());
        let header = r.headers().map_err(csv_err)?.clone();
        for (i, want) in METADATA_COLUMNS.iter().enumerate() {
            match header.get(i) {
                Some(got) if got == *want => {}
                _ => {
                    return Err(CoreError::invalid(
                        "csv",
                        format!("missing required column `{want}` at position {}", i + 1),
                    ))
                }
            }
        }
        let names: Vec<String> = header.iter().skip(4).map(str::to_string).collect();
        let mut rows = Vec::new();
        for (line, rec) in r.records().enumerate() {
            let rec = rec.map_err(csv_err)?;
            let field = |i: usize| rec.get(i).unwrap_or("");
            let class_label = match field(2) {
                "" => None,
                "0" => Some(0),
                "1" => Some(1),
                other => {
                    return Err(CoreError::invalid(
                        "csv",
                        format!("row {}: class_label `{other}` is not 0/1", line + 2),
                    ))
                }
            };
            let phase = match field(3) {
                "" => None,
                p => Some(p.to_string()),
            };
            let values = (4..header.len())
                .map(|i| {
                    field(i).parse::<f64>().map_err(|_| {
                        CoreError::invalid("csv", format!("row {}: `{}` is not a number", line + 2, field(i)))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(FeatureRow {
                case_id: field(0).to_string(),
                cohort: field(1).to_string(),
                class_label,
                phase,
                values,
            });
        }
        Self::new(names, rows)
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let f = std::fs::File::open(path).map_err(|e| CoreError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        Self::read_csv_from(std::io::BufReader::new(f)).map_err(|e| CoreError::Format {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut buf = Vec::new();
        self.write_csv_to(&mut buf)?;
        write_atomic(path, &buf)
    }
}
