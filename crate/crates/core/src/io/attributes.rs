use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use crate::attributes::{BankAttributes, FirmAttributes, NodeAttributes};
use crate::classify::{BankType, Region, Sector};
use crate::error::{Error, LoadError, Result, Violation};

use super::{fmt_amount, header_line, read_text, LineIndex};

const BANK_COLUMNS: [&str; 6] = ["bank_id", "name", "bank_type", "region", "capital", "asset"];
const FIRM_COLUMNS: [&str; 6] = ["firm_id", "name", "sector", "asset", "debt", "capital"];

pub fn load_attributes(path: &Path) -> Result<NodeAttributes> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_attributes(file, &path.display().to_string())
}

/// Read a bank or firm attribute table; the kind is told by the first header
/// column (`bank_id` or `firm_id`).
pub fn read_attributes<R: Read>(r: R, source_name: &str) -> Result<NodeAttributes> {
    let text = read_text(r, source_name)?;
    let lines = LineIndex::new(&text);
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let fail = |line: u64, msg: String| Error::from(LoadError::single(source_name, line, msg));
    let headers = rdr.headers().map_err(|e| fail(1, e.to_string()))?.clone();
    let header_line = header_line(&text);
    let names: Vec<&str> = headers.iter().map(|h| h.trim_start_matches('\u{feff}')).collect();
    let is_bank = match names.first() {
        Some(&"bank_id") => true,
        Some(&"firm_id") => false,
        _ => {
            return Err(fail(
                header_line,
                "attribute header must start with bank_id or firm_id".into(),
            ))
        }
    };
    let expected: &[&str] = if is_bank { &BANK_COLUMNS } else { &FIRM_COLUMNS };
    if names != expected {
        return Err(fail(
            header_line,
            format!("expected header `{}`, found `{}`", expected.join(","), names.join(",")),
        ));
    }

    let mut attrs = NodeAttributes::default();
    let mut violations = Vec::new();
    for rec in rdr.records() {
        let rec = match rec {
            Ok(r) => r,
            Err(e) => {
                let line = lines.of_error(&e);
                violations.push(Violation {
                    line,
                    message: e.to_string(),
                });
                continue;
            }
        };
        let line = lines.of_record(&rec);
        let parsed = if rec.len() != expected.len() {
            Err(format!("expected {} fields, found {}", expected.len(), rec.len()))
        } else if rec[0].is_empty() {
            Err(format!("empty {}", expected[0]))
        } else if is_bank {
            parse_bank(&rec).map(|b| {
                let dup = attrs.banks.insert(rec[0].to_owned(), b).is_some();
                dup.then(|| format!("duplicate bank_id `{}`", &rec[0]))
            })
        } else {
            parse_firm(&rec).map(|f| {
                let dup = attrs.firms.insert(rec[0].to_owned(), f).is_some();
                dup.then(|| format!("duplicate firm_id `{}`", &rec[0]))
            })
        };
        match parsed {
            Ok(None) => {}
            Ok(Some(message)) | Err(message) => violations.push(Violation { line, message }),
        }
    }
    if violations.is_empty() {
        Ok(attrs)
    } else {
        Err(LoadError {
            source_name: source_name.into(),
            violations,
        }
        .into())
    }
}

fn money(field: &str, name: &str, positive: bool) -> std::result::Result<Option<f64>, String> {
    if field.is_empty() {
        return Ok(None);
    }
    let v: f64 = field
        .parse()
        .ok()
        .filter(|v: &f64| v.is_finite())
        .ok_or_else(|| format!("{name}: `{field}` is not a number"))?;
    if positive && v <= 0.0 {
        return Err(format!("{name}: must be positive, got {field}"));
    }
    if v < 0.0 {
        return Err(format!("{name}: negative value {field}"));
    }
    Ok(Some(v))
}

fn signed(field: &str, name: &str) -> std::result::Result<Option<f64>, String> {
    if field.is_empty() {
        return Ok(None);
    }
    field
        .parse()
        .ok()
        .filter(|v: &f64| v.is_finite())
        .map(Some)
        .ok_or_else(|| format!("{name}: `{field}` is not a number"))
}

fn code(field: &str, name: &str) -> std::result::Result<u8, String> {
    field.parse().map_err(|_| format!("{name}: `{field}` is not a code"))
}

fn parse_bank(rec: &csv::StringRecord) -> std::result::Result<BankAttributes, String> {
    // Institutions outside the five named categories carry no code.
    let bank_type = if rec[2].is_empty() {
        BankType::Other
    } else {
        BankType::from_code(code(&rec[2], "bank_type")?).map_err(|e| format!("bank_type: {e}"))?
    };
    let region = if rec[3].is_empty() {
        Region::from_code(0).expect("code 0 exists")
    } else {
        Region::from_code(code(&rec[3], "region")?).map_err(|e| format!("region: {e}"))?
    };
    Ok(BankAttributes {
        name: rec[1].to_owned(),
        bank_type,
        region,
        capital: money(&rec[4], "capital", false)?,
        asset: money(&rec[5], "asset", true)?,
    })
}

fn parse_firm(rec: &csv::StringRecord) -> std::result::Result<FirmAttributes, String> {
    let sector: Sector = rec[2].parse().map_err(|e: Error| format!("sector: {e}"))?;
    Ok(FirmAttributes {
        name: rec[1].to_owned(),
        sector,
        asset: money(&rec[3], "asset", true)?,
        debt: money(&rec[4], "debt", false)?,
        // Negative for firms with debt above assets.
        capital: signed(&rec[5], "capital")?,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_amount).unwrap_or_default()
}

pub fn write_bank_attributes<W: Write>(attrs: &NodeAttributes, mut out: W) -> io::Result<()> {
    writeln!(out, "# {}", super::edges::UNIT_COMMENT)?;
    let mut w = csv::Writer::from_writer(&mut out);
    w.write_record(BANK_COLUMNS)?;
    for (id, b) in &attrs.banks {
        w.write_record([
            id.as_str(),
            &b.name,
            &b.bank_type.code().to_string(),
            &b.region.code().to_string(),
            &opt(b.capital),
            &opt(b.asset),
        ])?;
    }
    w.flush()
}

pub fn write_firm_attributes<W: Write>(attrs: &NodeAttributes, mut out: W) -> io::Result<()> {
    writeln!(out, "# {}", super::edges::UNIT_COMMENT)?;
    let mut w = csv::Writer::from_writer(&mut out);
    w.write_record(FIRM_COLUMNS)?;
    for (id, f) in &attrs.firms {
        w.write_record([
            id.as_str(),
            &f.name,
            f.sector.name(),
            &opt(f.asset),
            &opt(f.debt),
            &opt(f.capital),
        ])?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::SectorGroup;

    fn read(text: &str) -> Result<NodeAttributes> {
        read_attributes(text.as_bytes(), "attrs.csv")
    }

    #[test]
    fn bank_codes() {
        let a = read("bank_id,name,bank_type,region,capital,asset\nB1,Mizuho,2,2,100,2000\nB2,Misc,,,,\n").unwrap();
        let b = &a.banks["B1"];
        assert_eq!(b.bank_type, BankType::City);
        assert_eq!(b.region.name(), "Kantou");
        assert_eq!(b.capital_to_asset(), Some(0.05));
        assert_eq!(a.banks["B2"].bank_type, BankType::Other);
    }

    #[test]
    fn firm_sector_group() {
        let a = read("firm_id,name,sector,asset,debt,capital\nF1,Pharma,Drugs,10,4,6\n").unwrap();
        assert_eq!(a.firms["F1"].group(), SectorGroup::from_code(1).unwrap());
    }

    #[test]
    fn bad_values_name_the_field() {
        let err = read("firm_id,name,sector,asset,debt,capital\nF1,X,Banking,1,1,0\n").unwrap_err();
        assert!(err.to_string().contains("sector"), "{err}");
        let err = read("bank_id,name,bank_type,region,capital,asset\nB1,X,9,0,,\nB2,Y,1,8,,\n").unwrap_err();
        let text = err.to_string();
        assert!(text.contains("bank_type") && text.contains("region"), "{text}");
        assert!(read("bank_id,name,type\n").is_err());
    }

    #[test]
    fn round_trip() {
        let text = "bank_id,name,bank_type,region,capital,asset\nB1,\"A, Bank\",3,7,1.5,20\nB2,Misc,6,0,,\n";
        let a = read(text).unwrap();
        let mut out = Vec::new();
        write_bank_attributes(&a, &mut out).unwrap();
        assert_eq!(read(std::str::from_utf8(&out).unwrap()).unwrap(), a);

        let f = read("firm_id,name,sector,asset,debt,capital\nF1,X,Services,10,12,-2\n").unwrap();
        let mut out = Vec::new();
        write_firm_attributes(&f, &mut out).unwrap();
        assert_eq!(read(std::str::from_utf8(&out).unwrap()).unwrap(), f);
    }
}
