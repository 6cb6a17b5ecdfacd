use csv::{ReaderBuilder, StringRecord, Terminator, Trim, WriterBuilder};

use crate::error::{Error, Result};

/// A CSV file read without schema interpretation: header plus rows tagged with
/// their 1-based source line.
pub(crate) struct Table {
    pub header: Vec<String>,
    pub rows: Vec<(usize, StringRecord)>,
}

fn line_of(err: &csv::Error) -> usize {
    err.position().map_or(0, |p| p.line() as usize)
}

pub(crate) fn read_table(text: &str) -> Result<Table> {
    let mut reader = ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut records = reader.records();
    let header = match records.next() {
        Some(Ok(rec)) => rec.iter().map(str::to_string).collect(),
        Some(Err(e)) => return Err(Error::parse(line_of(&e), e.to_string())),
        None => return Err(Error::Header("input is empty".into())),
    };
    let mut rows = Vec::new();
    for rec in records {
        let rec = rec.map_err(|e| Error::parse(line_of(&e), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        rows.push((line, rec));
    }
    Ok(Table { header, rows })
}

/// Checks that `header` is `required` optionally followed by a prefix of
/// `optional`; returns the number of columns.
pub(crate) fn check_header(header: &[String], required: &[&str], optional: &[&str]) -> Result<usize> {
    let expected = || {
        let mut s = required.join(",");
        if !optional.is_empty() {
            s.push_str(&format!("[,{}]", optional.join(",")));
        }
        s
    };
    let ok = header.len() >= required.len()
        && header.len() <= required.len() + optional.len()
        && header.iter().zip(required.iter().chain(optional)).all(|(h, e)| h == e);
    if ok {
        Ok(header.len())
    } else {
        Err(Error::Header(format!(
            "found `{}`, expected `{}`",
            header.join(","),
            expected()
        )))
    }
}

pub(crate) fn write_table<I, R>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut writer = WriterBuilder::new()
        .terminator(Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    writer.write_record(header).expect("writing to memory");
    for row in rows {
        writer.write_record(row).expect("writing to memory");
    }
    String::from_utf8(writer.into_inner().expect("flushing to memory")).expect("utf-8 input")
}

pub(crate) fn opt_f64(line: usize, column: &str, raw: &str) -> Result<Option<f64>> {
    if raw.is_empty() {
        return Ok(None);
    }
    match raw.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Some(v)),
        _ => Err(Error::parse(line, format!("malformed number {column}=`{raw}`"))),
    }
}

pub(crate) fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}
