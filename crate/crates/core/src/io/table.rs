use crate::error::{LoadError, Result, Violation};

use super::{header_line, LineIndex};

/// Numeric columns read from a CSV table.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericColumns {
    pub names: Vec<String>,
    /// One row per data record; empty cells are `None`.
    pub rows: Vec<Vec<Option<f64>>>,
}

impl NumericColumns {
    /// Rows where every selected column has a value.
    pub fn complete_rows(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        self.rows
            .iter()
            .filter_map(|r| r.iter().copied().collect::<Option<Vec<f64>>>())
    }
}

/// Read the named columns of a headed CSV table as numbers. Any
/// non-numeric cell in a selected column is an error naming its line.
pub fn read_numeric_columns(text: &str, source_name: &str, columns: &[&str]) -> Result<NumericColumns> {
    let lines = LineIndex::new(text);
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let headers = rdr
        .headers()
        .map_err(|e| LoadError::single(source_name, 1, e.to_string()))?
        .clone();
    let header = header_line(text);
    let mut index = Vec::with_capacity(columns.len());
    let mut violations = Vec::new();
    for c in columns {
        match headers.iter().position(|h| h.trim_start_matches('\u{feff}') == *c) {
            Some(i) => index.push(i),
            None => violations.push(Violation {
                line: header,
                message: format!(
                    "no column `{c}` (columns: {})",
                    headers.iter().collect::<Vec<_>>().join(",")
                ),
            }),
        }
    }
    let mut rows = Vec::new();
    if violations.is_empty() {
        for rec in rdr.records() {
            let rec = match rec {
                Ok(r) => r,
                Err(e) => {
                    violations.push(Violation {
                        line: lines.of_error(&e),
                        message: e.to_string(),
                    });
                    continue;
                }
            };
            let line = lines.of_record(&rec);
            let mut row = Vec::with_capacity(index.len());
            for (&i, name) in index.iter().zip(columns) {
                let cell = rec.get(i).unwrap_or("");
                if cell.is_empty() || cell.eq_ignore_ascii_case("na") {
                    row.push(None);
                    continue;
                }
                match cell.parse::<f64>() {
                    Ok(v) if v.is_finite() => row.push(Some(v)),
                    _ => {
                        violations.push(Violation {
                            line,
                            message: format!("{name}: `{cell}` is not a finite number"),
                        });
                        row.push(None);
                    }
                }
            }
            rows.push(row);
        }
    }
    if !violations.is_empty() {
        return Err(LoadError {
            source_name: source_name.into(),
            violations,
        }
        .into());
    }
    Ok(NumericColumns {
        names: columns.iter().map(|c| c.to_string()).collect(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_selected_columns() {
        let text = "# note\nid,x,y\na,1,2\nb,,3\nc,4,NA\n";
        let t = read_numeric_columns(text, "t.csv", &["y", "x"]).unwrap();
        assert_eq!(t.rows[0], vec![Some(2.0), Some(1.0)]);
        assert_eq!(t.complete_rows().count(), 1);
    }

    #[test]
    fn bad_cells_and_missing_columns() {
        let err = read_numeric_columns("x\n1\n# c\nfoo\n", "t.csv", &["x"]).unwrap_err();
        assert!(err.to_string().contains("line 4"), "{err}");
        assert!(read_numeric_columns("x\n1\n", "t.csv", &["z"]).is_err());
    }
}
