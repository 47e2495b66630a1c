//! Minimal RFC 4180 CSV reader/writer.
//!
//! Supports quoted fields, `""` escapes, embedded commas and line breaks,
//! and both `\n` and `\r\n` records. Errors carry the 1-based physical
//! record number so a bad cell can be located in the source file.

use crate::error::Error;
use crate::Result;

/// Parses CSV text into records of fields. Records are physical rows
/// (1-based in errors, counting the header if present).
pub fn parse(text: &str) -> Result<Vec<Vec<String>>> {
    let mut records: Vec<Vec<String>> = Vec::new();
    let mut fields: Vec<String> = Vec::new();
    let mut field = String::new();
    let mut row = 1usize;
    // True once the current record has any content; distinguishes a trailing
    // newline from an empty final record.
    let mut record_started = false;
    let mut chars = text.chars().peekable();

    while let Some(c) = chars.next() {
        match c {
            '"' => {
                if record_started && !field.is_empty() {
                    return Err(Error::Csv {
                        row,
                        message: "quote in the middle of an unquoted field".into(),
                    });
                }
                record_started = true;
                // Quoted field: read until the closing quote, honoring "".
                let mut closed = false;
                while let Some(qc) = chars.next() {
                    if qc == '"' {
                        if chars.peek() == Some(&'"') {
                            chars.next();
                            field.push('"');
                        } else {
                            closed = true;
                            break;
                        }
                    } else {
                        field.push(qc);
                    }
                }
                if !closed {
                    return Err(Error::Csv {
                        row,
                        message: "unterminated quoted field".into(),
                    });
                }
                match chars.peek() {
                    None | Some(',') | Some('\n') | Some('\r') => {}
                    Some(_) => {
                        return Err(Error::Csv {
                            row,
                            message: "data after closing quote".into(),
                        })
                    }
                }
            }
            ',' => {
                record_started = true;
                fields.push(std::mem::take(&mut field));
            }
            '\r' => {
                if chars.peek() == Some(&'\n') {
                    chars.next();
                }
                fields.push(std::mem::take(&mut field));
                records.push(std::mem::take(&mut fields));
                row += 1;
                record_started = false;
            }
            '\n' => {
                fields.push(std::mem::take(&mut field));
                records.push(std::mem::take(&mut fields));
                row += 1;
                record_started = false;
            }
            _ => {
                record_started = true;
                field.push(c);
            }
        }
    }
    if record_started || !fields.is_empty() {
        fields.push(field);
        records.push(fields);
    }
    Ok(records)
}

/// Renders one field, quoting only when required (comma, quote, CR or LF).
pub fn format_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        let mut out = String::with_capacity(s.len() + 2);
        out.push('"');
        for c in s.chars() {
            if c == '"' {
                out.push('"');
            }
            out.push(c);
        }
        out.push('"');
        out
    } else {
        s.to_string()
    }
}

/// Appends one record (fields joined by commas, `\n` terminated).
pub fn write_record(out: &mut String, fields: &[String]) {
    for (i, f) in fields.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&format_field(f));
    }
    out.push('\n');
}
