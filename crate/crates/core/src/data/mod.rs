//! Typed tabular data: schemas, datasets, design matrices, lock-box splits.
//!
//! A [`Schema`] declares each column's kind (continuous, binary,
//! categorical) and role (outcome, predictor, protected, ignored). A
//! [`Dataset`] holds the parsed columns and performs all cell-level
//! validation up front, so numerical code never sees a NaN, an out-of-range
//! category, or a binary cell that is not 0/1.
//!
//! Error coordinates: structural CSV problems report the 1-based physical
//! row in the file (header included); cell-level problems report the 1-based
//! data row (header excluded) plus the column name.

pub mod csv;
pub mod design;
pub mod lockbox;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Error;
use crate::Result;

/// Lowercase hex SHA-256 of `bytes`.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// Canonical text rendering of a float: `{:.16e}` (17 significant digits),
/// enough to round-trip any f64. Used wherever bytes are hashed.
pub(crate) fn canonical_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Statistical type of a column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnKind {
    Continuous,
    Binary,
    Categorical,
}

impl ColumnKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ColumnKind::Continuous => "continuous",
            ColumnKind::Binary => "binary",
            ColumnKind::Categorical => "categorical",
        }
    }
}

/// How a column may be used in audits and fits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Outcome,
    Predictor,
    Protected,
    Ignored,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Outcome => "outcome",
            Role::Predictor => "predictor",
            Role::Protected => "protected",
            Role::Ignored => "ignored",
        }
    }
}

/// Declaration of one column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColumnSchema {
    pub name: String,
    pub kind: ColumnKind,
    pub role: Role,
    /// Allowed labels for categorical columns; must be empty otherwise.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub categories: Vec<String>,
}

/// Ordered column declarations for a dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Schema {
    pub columns: Vec<ColumnSchema>,
}

impl Schema {
    /// Checks structural invariants: unique nonempty names, exactly one
    /// outcome column, category lists present exactly for categorical
    /// columns and free of duplicates.
    pub fn validate(&self) -> Result<()> {
        if self.columns.is_empty() {
            return Err(Error::Schema {
                message: "schema has no columns".into(),
            });
        }
        let mut seen = std::collections::BTreeSet::new();
        let mut outcomes = 0usize;
        for col in &self.columns {
            if col.name.is_empty() {
                return Err(Error::Schema {
                    message: "column with empty name".into(),
                });
            }
            if !seen.insert(col.name.as_str()) {
                return Err(Error::Schema {
                    message: format!("duplicate column name {:?}", col.name),
                });
            }
            if col.role == Role::Outcome {
                outcomes += 1;
            }
            match col.kind {
                ColumnKind::Categorical => {
                    if col.categories.len() < 2 {
                        return Err(Error::Schema {
                            message: format!(
                                "categorical column {:?} needs at least two categories",
                                col.name
                            ),
                        });
                    }
                    let mut cats = std::collections::BTreeSet::new();
                    for c in &col.categories {
                        if c.is_empty() {
                            return Err(Error::Schema {
                                message: format!("column {:?} has an empty category label", col.name),
                            });
                        }
                        if !cats.insert(c.as_str()) {
                            return Err(Error::Schema {
                                message: format!(
                                    "column {:?} lists category {:?} twice",
                                    col.name, c
                                ),
                            });
                        }
                    }
                }
                _ => {
                    if !col.categories.is_empty() {
                        return Err(Error::Schema {
                            message: format!(
                                "non-categorical column {:?} must not list categories",
                                col.name
                            ),
                        });
                    }
                }
            }
        }
        if outcomes != 1 {
            return Err(Error::Schema {
                message: format!("schema must declare exactly one outcome column, found {outcomes}"),
            });
        }
        Ok(())
    }

    /// Parses and validates a schema from JSON.
    pub fn from_json(text: &str) -> Result<Schema> {
        let schema: Schema = serde_json::from_str(text).map_err(|e| Error::Parse {
            what: "schema".into(),
            message: e.to_string(),
        })?;
        schema.validate()?;
        Ok(schema)
    }

    /// Pretty JSON rendering.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schema serializes")
    }

    /// Looks up a column by name, returning its index and declaration.
    pub fn column(&self, name: &str) -> Option<(usize, &ColumnSchema)> {
        self.columns
            .iter()
            .enumerate()
            .find(|(_, c)| c.name == name)
    }

    /// The unique outcome column (guaranteed by [`Schema::validate`]).
    pub fn outcome(&self) -> Result<&ColumnSchema> {
        self.columns
            .iter()
            .find(|c| c.role == Role::Outcome)
            .ok_or_else(|| Error::Schema {
                message: "schema has no outcome column".into(),
            })
    }
}

/// Storage for one parsed column.
#[derive(Debug, Clone, PartialEq)]
pub enum ColumnData {
    /// Continuous or binary values (binary validated to 0.0/1.0).
    Numeric(Vec<f64>),
    /// Indices into the column's schema category list.
    Categorical(Vec<u32>),
}

impl ColumnData {
    fn len(&self) -> usize {
        match self {
            ColumnData::Numeric(v) => v.len(),
            ColumnData::Categorical(v) => v.len(),
        }
    }
}

/// A fully validated, columnar dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    schema: Schema,
    columns: Vec<ColumnData>,
    n_rows: usize,
}

impl Dataset {
    /// Builds a dataset from parsed columns, enforcing every cell-level
    /// invariant (finiteness, 0/1 for binary, category codes in range).
    pub fn new(schema: Schema, columns: Vec<ColumnData>) -> Result<Dataset> {
        schema.validate()?;
        if columns.len() != schema.columns.len() {
            return Err(Error::Schema {
                message: format!(
                    "expected {} columns of data, got {}",
                    schema.columns.len(),
                    columns.len()
                ),
            });
        }
        let n_rows = columns.first().map(|c| c.len()).unwrap_or(0);
        for (decl, col) in schema.columns.iter().zip(&columns) {
            if col.len() != n_rows {
                return Err(Error::Schema {
                    message: format!(
                        "column {:?} has {} rows, expected {}",
                        decl.name,
                        col.len(),
                        n_rows
                    ),
                });
            }
            match (decl.kind, col) {
                (ColumnKind::Continuous, ColumnData::Numeric(vals)) => {
                    for (i, v) in vals.iter().enumerate() {
                        if !v.is_finite() {
                            return Err(Error::NonFinite {
                                row: i + 1,
                                column: decl.name.clone(),
                            });
                        }
                    }
                }
                (ColumnKind::Binary, ColumnData::Numeric(vals)) => {
                    for (i, v) in vals.iter().enumerate() {
                        if *v != 0.0 && *v != 1.0 {
                            return Err(Error::NotBinary {
                                row: i + 1,
                                column: decl.name.clone(),
                                value: v.to_string(),
                            });
                        }
                    }
                }
                (ColumnKind::Categorical, ColumnData::Categorical(codes)) => {
                    let n_cats = decl.categories.len() as u32;
                    for (i, c) in codes.iter().enumerate() {
                        if *c >= n_cats {
                            return Err(Error::UnknownCategory {
                                row: i + 1,
                                column: decl.name.clone(),
                                value: format!("code {c}"),
                            });
                        }
                    }
                }
                _ => {
                    return Err(Error::Schema {
                        message: format!(
                            "column {:?} storage does not match its declared kind",
                            decl.name
                        ),
                    });
                }
            }
        }
        Ok(Dataset {
            schema,
            columns,
            n_rows,
        })
    }

    /// Parses CSV text against `schema`. The header must contain exactly the
    /// schema's column names (any order); every cell is validated.
    pub fn from_csv(text: &str, schema: &Schema) -> Result<Dataset> {
        schema.validate()?;
        let records = csv::parse(text)?;
        if records.is_empty() {
            return Err(Error::Csv {
                row: 1,
                message: "empty file".into(),
            });
        }
        let header = &records[0];
        {
            let mut seen = std::collections::BTreeSet::new();
            for name in header {
                if !seen.insert(name.as_str()) {
                    return Err(Error::DuplicateHeader { name: name.clone() });
                }
            }
        }
        let header_set: std::collections::BTreeSet<&str> =
            header.iter().map(|s| s.as_str()).collect();
        let schema_set: std::collections::BTreeSet<&str> =
            schema.columns.iter().map(|c| c.name.as_str()).collect();
        if header_set != schema_set {
            let missing: Vec<String> = schema_set
                .difference(&header_set)
                .map(|s| s.to_string())
                .collect();
            let unexpected: Vec<String> = header_set
                .difference(&schema_set)
                .map(|s| s.to_string())
                .collect();
            return Err(Error::HeaderMismatch { missing, unexpected });
        }
        // Position of each schema column in the CSV header.
        let positions: Vec<usize> = schema
            .columns
            .iter()
            .map(|c| header.iter().position(|h| h == &c.name).unwrap())
            .collect();

        let data_rows = &records[1..];
        if data_rows.len() < 2 {
            return Err(Error::TooFewRows {
                needed: 2,
                got: data_rows.len(),
            });
        }
        for (i, rec) in data_rows.iter().enumerate() {
            if rec.len() != header.len() {
                return Err(Error::Csv {
                    row: i + 2,
                    message: format!("expected {} fields, got {}", header.len(), rec.len()),
                });
            }
        }

        let mut columns: Vec<ColumnData> = Vec::with_capacity(schema.columns.len());
        for (decl, &pos) in schema.columns.iter().zip(&positions) {
            match decl.kind {
                ColumnKind::Continuous | ColumnKind::Binary => {
                    let mut vals = Vec::with_capacity(data_rows.len());
                    for (i, rec) in data_rows.iter().enumerate() {
                        let cell = rec[pos].trim();
                        if cell.is_empty() {
                            return Err(Error::MissingCell {
                                row: i + 1,
                                column: decl.name.clone(),
                            });
                        }
                        let v: f64 = cell.parse().map_err(|_| Error::NonNumeric {
                            row: i + 1,
                            column: decl.name.clone(),
                            value: cell.to_string(),
                        })?;
                        if !v.is_finite() {
                            return Err(Error::NonFinite {
                                row: i + 1,
                                column: decl.name.clone(),
                            });
                        }
                        if decl.kind == ColumnKind::Binary && v != 0.0 && v != 1.0 {
                            return Err(Error::NotBinary {
                                row: i + 1,
                                column: decl.name.clone(),
                                value: cell.to_string(),
                            });
                        }
                        vals.push(v);
                    }
                    columns.push(ColumnData::Numeric(vals));
                }
                ColumnKind::Categorical => {
                    let mut codes = Vec::with_capacity(data_rows.len());
                    for (i, rec) in data_rows.iter().enumerate() {
                        let cell = rec[pos].as_str();
                        if cell.is_empty() {
                            return Err(Error::MissingCell {
                                row: i + 1,
                                column: decl.name.clone(),
                            });
                        }
                        let code = decl
                            .categories
                            .iter()
                            .position(|c| c == cell)
                            .ok_or_else(|| Error::UnknownCategory {
                                row: i + 1,
                                column: decl.name.clone(),
                                value: cell.to_string(),
                            })?;
                        codes.push(code as u32);
                    }
                    columns.push(ColumnData::Categorical(codes));
                }
            }
        }
        Dataset::new(schema.clone(), columns)
    }

    /// Renders the dataset as CSV in schema column order. Continuous cells
    /// use the shortest representation that parses back to the same f64, so
    /// `from_csv(to_csv(d)) == d` exactly.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = self.schema.columns.iter().map(|c| c.name.clone()).collect();
        csv::write_record(&mut out, &header);
        let mut fields = vec![String::new(); self.schema.columns.len()];
        for row in 0..self.n_rows {
            for (j, (decl, col)) in self.schema.columns.iter().zip(&self.columns).enumerate() {
                fields[j] = match col {
                    ColumnData::Numeric(vals) => {
                        let v = vals[row];
                        if decl.kind == ColumnKind::Binary {
                            if v == 1.0 { "1".into() } else { "0".into() }
                        } else {
                            format!("{v}")
                        }
                    }
                    ColumnData::Categorical(codes) => {
                        decl.categories[codes[row] as usize].clone()
                    }
                };
            }
            csv::write_record(&mut out, &fields);
        }
        out
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    /// Column declaration by name.
    pub fn column_schema(&self, name: &str) -> Result<&ColumnSchema> {
        self.schema
            .column(name)
            .map(|(_, c)| c)
            .ok_or_else(|| Error::UnknownColumn { name: name.into() })
    }

    fn column_data(&self, name: &str) -> Result<(&ColumnSchema, &ColumnData)> {
        let (idx, decl) = self
            .schema
            .column(name)
            .ok_or_else(|| Error::UnknownColumn { name: name.into() })?;
        Ok((decl, &self.columns[idx]))
    }

    /// Values of a continuous or binary column.
    pub fn numeric(&self, name: &str) -> Result<&[f64]> {
        let (decl, col) = self.column_data(name)?;
        match col {
            ColumnData::Numeric(vals) => Ok(vals),
            ColumnData::Categorical(_) => Err(Error::KindMismatch {
                column: decl.name.clone(),
                message: "expected a continuous or binary column".into(),
            }),
        }
    }

    /// Category codes of a categorical column.
    pub fn codes(&self, name: &str) -> Result<&[u32]> {
        let (decl, col) = self.column_data(name)?;
        match col {
            ColumnData::Categorical(codes) => Ok(codes),
            ColumnData::Numeric(_) => Err(Error::KindMismatch {
                column: decl.name.clone(),
                message: "expected a categorical column".into(),
            }),
        }
    }

    /// A binary column as booleans.
    pub fn binary_as_bool(&self, name: &str) -> Result<Vec<bool>> {
        let decl = self.column_schema(name)?;
        if decl.kind != ColumnKind::Binary {
            return Err(Error::KindMismatch {
                column: name.into(),
                message: "expected a binary column".into(),
            });
        }
        Ok(self.numeric(name)?.iter().map(|&v| v == 1.0).collect())
    }

    /// One grouping key per row for a binary ("0"/"1") or categorical
    /// (label) column. Continuous columns cannot be grouped directly.
    pub fn group_keys(&self, name: &str) -> Result<Vec<String>> {
        let (decl, col) = self.column_data(name)?;
        match (decl.kind, col) {
            (ColumnKind::Binary, ColumnData::Numeric(vals)) => Ok(vals
                .iter()
                .map(|&v| if v == 1.0 { "1".into() } else { "0".into() })
                .collect()),
            (ColumnKind::Categorical, ColumnData::Categorical(codes)) => Ok(codes
                .iter()
                .map(|&c| decl.categories[c as usize].clone())
                .collect()),
            _ => Err(Error::KindMismatch {
                column: decl.name.clone(),
                message: "grouping requires a binary or categorical column".into(),
            }),
        }
    }

    /// New dataset containing the given rows, in the given order.
    /// Indices must be in range.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        for &i in indices {
            assert!(i < self.n_rows, "row index {i} out of range");
        }
        let columns = self
            .columns
            .iter()
            .map(|col| match col {
                ColumnData::Numeric(vals) => {
                    ColumnData::Numeric(indices.iter().map(|&i| vals[i]).collect())
                }
                ColumnData::Categorical(codes) => {
                    ColumnData::Categorical(indices.iter().map(|&i| codes[i]).collect())
                }
            })
            .collect();
        Dataset {
            schema: self.schema.clone(),
            columns,
            n_rows: indices.len(),
        }
    }

    /// Canonical byte rendering of one row: cells in schema order, numeric
    /// cells as `{:.16e}`, labels CSV-quoted, joined by commas, `\n`
    /// terminated. This is the representation that lock-box digests hash.
    pub(crate) fn canonical_row(&self, row: usize) -> String {
        let mut parts: Vec<String> = Vec::with_capacity(self.columns.len());
        for (decl, col) in self.schema.columns.iter().zip(&self.columns) {
            match col {
                ColumnData::Numeric(vals) => parts.push(canonical_f64(vals[row])),
                ColumnData::Categorical(codes) => {
                    parts.push(csv::format_field(&decl.categories[codes[row] as usize]))
                }
            }
        }
        let mut line = parts.join(",");
        line.push('\n');
        line
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_schema() -> Schema {
        Schema {
            columns: vec![
                ColumnSchema {
                    name: "income".into(),
                    kind: ColumnKind::Continuous,
                    role: Role::Predictor,
                    categories: vec![],
                },
                ColumnSchema {
                    name: "device".into(),
                    kind: ColumnKind::Categorical,
                    role: Role::Predictor,
                    categories: vec!["desktop".into(), "mobile".into()],
                },
                ColumnSchema {
                    name: "default".into(),
                    kind: ColumnKind::Binary,
                    role: Role::Outcome,
                    categories: vec![],
                },
            ],
        }
    }

    #[test]
    fn schema_requires_exactly_one_outcome() {
        let mut s = toy_schema();
        s.columns[2].role = Role::Predictor;
        assert!(matches!(s.validate(), Err(Error::Schema { .. })));
        let mut s = toy_schema();
        s.columns[0].role = Role::Outcome;
        assert!(matches!(s.validate(), Err(Error::Schema { .. })));
    }

    #[test]
    fn schema_rejects_duplicate_names_and_bad_categories() {
        let mut s = toy_schema();
        s.columns[0].name = "device".into();
        assert!(s.validate().is_err());

        let mut s = toy_schema();
        s.columns[1].categories = vec!["desktop".into()];
        assert!(s.validate().is_err());

        let mut s = toy_schema();
        s.columns[0].categories = vec!["a".into(), "b".into()];
        assert!(s.validate().is_err());
    }

    #[test]
    fn schema_json_round_trip() {
        let s = toy_schema();
        let parsed = Schema::from_json(&s.to_json()).unwrap();
        assert_eq!(s, parsed);
    }

    #[test]
    fn loads_csv_with_reordered_header() {
        let csv = "default,income,device\n0,12.5,desktop\n1,3.25,mobile\n";
        let d = Dataset::from_csv(csv, &toy_schema()).unwrap();
        assert_eq!(d.n_rows(), 2);
        assert_eq!(d.numeric("income").unwrap(), &[12.5, 3.25]);
        assert_eq!(d.codes("device").unwrap(), &[0, 1]);
        assert_eq!(d.numeric("default").unwrap(), &[0.0, 1.0]);
    }

    #[test]
    fn reports_cell_coordinates_for_bad_number() {
        let csv = "income,device,default\n1.0,desktop,0\nabc,mobile,1\n";
        match Dataset::from_csv(csv, &toy_schema()) {
            Err(Error::NonNumeric { row, column, value }) => {
                assert_eq!(row, 2);
                assert_eq!(column, "income");
                assert_eq!(value, "abc");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn reports_unknown_category_with_coordinates() {
        let csv = "income,device,default\n1.0,desktop,0\n2.0,tablet,1\n";
        match Dataset::from_csv(csv, &toy_schema()) {
            Err(Error::UnknownCategory { row, column, value }) => {
                assert_eq!((row, column.as_str(), value.as_str()), (2, "device", "tablet"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_non_binary_outcome_cell() {
        let csv = "income,device,default\n1.0,desktop,0\n2.0,mobile,2\n";
        assert!(matches!(
            Dataset::from_csv(csv, &toy_schema()),
            Err(Error::NotBinary { row: 2, .. })
        ));
    }

    #[test]
    fn rejects_missing_cell_and_ragged_rows() {
        let csv = "income,device,default\n,desktop,0\n1.0,mobile,1\n";
        assert!(matches!(
            Dataset::from_csv(csv, &toy_schema()),
            Err(Error::MissingCell { row: 1, .. })
        ));

        let csv = "income,device,default\n1.0,desktop\n2.0,mobile,1\n";
        assert!(matches!(
            Dataset::from_csv(csv, &toy_schema()),
            Err(Error::Csv { row: 2, .. })
        ));
    }

    #[test]
    fn rejects_header_mismatch_and_duplicates() {
        let csv = "income,device,outcome\n1.0,desktop,0\n2.0,mobile,1\n";
        match Dataset::from_csv(csv, &toy_schema()) {
            Err(Error::HeaderMismatch { missing, unexpected }) => {
                assert_eq!(missing, vec!["default".to_string()]);
                assert_eq!(unexpected, vec!["outcome".to_string()]);
            }
            other => panic!("unexpected {other:?}"),
        }

        let csv = "income,income,device,default\n1,1,desktop,0\n2,2,mobile,1\n";
        assert!(matches!(
            Dataset::from_csv(csv, &toy_schema()),
            Err(Error::DuplicateHeader { .. })
        ));
    }

    #[test]
    fn requires_two_rows() {
        let csv = "income,device,default\n1.0,desktop,0\n";
        assert!(matches!(
            Dataset::from_csv(csv, &toy_schema()),
            Err(Error::TooFewRows { needed: 2, got: 1 })
        ));
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let csv = "income,device,default\n0.1,desktop,0\n-3.75e-7,mobile,1\n1234567.25,desktop,0\n";
        let d = Dataset::from_csv(csv, &toy_schema()).unwrap();
        let back = Dataset::from_csv(&d.to_csv(), &toy_schema()).unwrap();
        assert_eq!(d, back);
    }

    #[test]
    fn subset_picks_rows_in_order() {
        let csv = "income,device,default\n1,desktop,0\n2,mobile,1\n3,desktop,0\n";
        let d = Dataset::from_csv(csv, &toy_schema()).unwrap();
        let s = d.subset(&[2, 0]);
        assert_eq!(s.numeric("income").unwrap(), &[3.0, 1.0]);
        assert_eq!(s.n_rows(), 2);
    }

    #[test]
    fn group_keys_for_binary_and_categorical() {
        let csv = "income,device,default\n1,desktop,0\n2,mobile,1\n";
        let d = Dataset::from_csv(csv, &toy_schema()).unwrap();
        assert_eq!(d.group_keys("device").unwrap(), vec!["desktop", "mobile"]);
        assert_eq!(d.group_keys("default").unwrap(), vec!["0", "1"]);
        assert!(d.group_keys("income").is_err());
    }

    #[test]
    fn canonical_row_rendering() {
        let csv = "income,device,default\n0.5,desktop,0\n2,mobile,1\n";
        let d = Dataset::from_csv(csv, &toy_schema()).unwrap();
        assert_eq!(
            d.canonical_row(0),
            "5.0000000000000000e-1,desktop,0.0000000000000000e0\n"
        );
    }

    #[test]
    fn sha256_hex_known_value() {
        // SHA-256("abc") from the FIPS 180-2 test vectors.
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
