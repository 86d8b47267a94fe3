use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use echeight::bounds::{height_floor, BoundsError, FloorOptions};
use echeight::{Curve, CurveError};
use rayon::prelude::*;
use rug::Integer;
use serde_json::{Map, Value};

use crate::{parse_override_list, render, Failure};

struct Row {
    a4: String,
    a6: String,
    tamagawa: Option<String>,
}

pub fn run(input: &Path, output: Option<&Path>, t_max: u64, jobs: usize) -> Result<(), Failure> {
    let unreadable = |e: &dyn std::fmt::Display| Failure::Input(format!("cannot read {}: {e}", input.display()));
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(input).map_err(|e| unreadable(&e))?;
    let headers = reader.headers().map_err(|e| unreadable(&e))?.clone();
    let column = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let (Some(i4), Some(i6)) = (column("a4"), column("a6")) else {
        return Err(Failure::Input(format!("{} needs a4 and a6 columns", input.display())));
    };
    let it = column("tamagawa");

    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| unreadable(&e))?;
        let field = |i: usize| record.get(i).unwrap_or("").to_string();
        rows.push(Row { a4: field(i4), a6: field(i6), tamagawa: it.map(field).filter(|s| !s.is_empty()) });
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Failure::Effort(format!("cannot start workers: {e}")))?;
    let lines: Vec<String> = pool.install(|| rows.par_iter().map(|r| analyze_row(r, t_max).to_string()).collect());

    let mut out: Box<dyn Write> = match output {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let write_failed = |e: io::Error| Failure::Input(format!("write failed: {e}"));
    for line in lines {
        writeln!(out, "{line}").map_err(write_failed)?;
    }
    out.flush().map_err(write_failed)
}

fn analyze_row(row: &Row, t_max: u64) -> Value {
    let mut m = Map::new();
    let (status, body) = match row_report(row, t_max) {
        Ok(body) => ("ok".to_string(), body),
        Err((status, message)) => {
            let mut body = Map::new();
            body.insert("curve".into(), serde_json::json!({ "a4": row.a4, "a6": row.a6 }));
            body.insert("message".into(), Value::String(message));
            (status, body)
        }
    };
    m.insert("status".into(), Value::String(status));
    m.extend(body);
    Value::Object(m)
}

fn row_report(row: &Row, t_max: u64) -> Result<Map<String, Value>, (String, String)> {
    let parse = |s: &str| s.parse::<Integer>().map_err(|e| ("error:parse".to_string(), format!("bad integer {s:?}: {e}")));
    let (a4, a6) = (parse(&row.a4)?, parse(&row.a6)?);
    let curve = Curve::new(a4, a6).map_err(|e| match e {
        CurveError::Singular => ("error:singular".to_string(), e.to_string()),
        _ => ("error:input".to_string(), e.to_string()),
    })?;
    let tamagawa = row
        .tamagawa
        .as_deref()
        .map(|s| parse_override_list(s, ';'))
        .transpose()
        .map_err(|e| ("error:parse".to_string(), e))?;
    let report = height_floor(&curve, &FloorOptions { t_max, tamagawa, delta: None }).map_err(|e| {
        let status = match e {
            BoundsError::NoAdmissibleT(_) => "error:no_admissible_t",
            _ => "error:input",
        };
        (status.to_string(), e.to_string())
    })?;
    Ok(render::report_json(&report))
}
