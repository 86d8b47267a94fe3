//! Text and JSON renderings. Reals are written as decimal strings with ten
//! significant digits, exact rationals as `n/d` strings, big integers as
//! strings, so the JSON never loses precision and diffs stay stable.

use echeight::bounds::{BoundReport, Candidate};
use echeight::class_forms::QuadraticForm;
use echeight::heights::HeightEstimate;
use echeight::integrality::TamagawaData;
use echeight::pairing::PairingForm;
use echeight::Curve;
use rug::Rational;
use serde_json::{json, Map, Value};

/// `x` rounded to ten significant digits. Plain notation for exponents in
/// `[-5, 10)`, otherwise `d.ddddddddde±x`.
pub fn real(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.9e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..10).contains(&exp) {
        return format!("{mantissa}e{exp}");
    }
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let body = if exp >= 0 {
        let split = exp as usize + 1;
        format!("{}.{}", &digits[..split], &digits[split..])
    } else {
        format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

pub fn rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn curve_json(curve: &Curve) -> Value {
    json!({
        "a4": curve.a4().to_string(),
        "a6": curve.a6().to_string(),
        "discriminant": curve.discriminant().to_string(),
        "j_invariant": rational(&curve.j_invariant()),
    })
}

fn candidate_json(c: &Candidate) -> Value {
    json!({
        "t": c.t,
        "D": c.d.value(),
        "H": rational(&c.hurwitz),
        "T": real(c.t_value),
        "floor": real(c.floor),
        "trivial_floor": real(c.trivial_floor),
    })
}

pub fn tamagawa_json(data: &TamagawaData) -> Value {
    Value::Array(
        data.iter()
            .map(|(p, c, k)| {
                json!({
                    "p": p.to_string(),
                    "c": c,
                    "kodaira": k.map(|k| k.to_string()),
                })
            })
            .collect(),
    )
}

pub fn report_json(report: &BoundReport) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("curve".into(), curve_json(&report.curve));
    m.insert(
        "delta".into(),
        json!({ "value": real(report.delta.value), "provenance": report.delta.provenance.to_string() }),
    );
    m.insert("torsion".into(), json!(report.torsion_order));
    m.insert("tamagawa".into(), report.tamagawa.as_ref().map_or(Value::Null, tamagawa_json));
    m.insert("candidates".into(), Value::Array(report.candidates.iter().map(candidate_json).collect()));
    m.insert("best_t".into(), json!(report.best_t));
    m.insert("best_floor".into(), json!(real(report.best_floor)));
    m.insert("trivial_floor".into(), json!(real(report.trivial_floor)));
    m.insert("caveats".into(), json!(report.caveats));
    m
}

/// Candidates shown in text mode, best first.
const TEXT_ROWS: usize = 10;

pub fn report_text(report: &BoundReport) -> String {
    let mut out = String::new();
    let best = report.best();
    out += &format!("curve          {}\n", report.curve);
    out += &format!("delta          {} ({})\n", real(report.delta.value), report.delta.provenance);
    out += &format!("torsion        {}\n", report.torsion_order);
    out += &format!("candidates     {}\n", report.candidates.len());
    out += &format!(
        "best           t = {}, D = {}, H(-D) = {}, T = {}\n",
        best.t,
        best.d.value(),
        best.hurwitz,
        real(best.t_value)
    );
    out += &format!("best_floor     {}\n", real(report.best_floor));
    out += &format!("trivial_floor  {}\n", real(report.trivial_floor));
    let mut rows: Vec<&Candidate> = report.candidates.iter().collect();
    rows.sort_by(|a, b| b.floor.total_cmp(&a.floor).then(a.t.cmp(&b.t)));
    out += "\n       t            D         H(-D)              T          floor\n";
    for c in rows.iter().take(TEXT_ROWS) {
        out += &format!(
            "{:>8} {:>12} {:>13} {:>14} {:>14}\n",
            c.t,
            c.d.value(),
            c.hurwitz.to_string(),
            real(c.t_value),
            real(c.floor)
        );
    }
    if rows.len() > TEXT_ROWS {
        out += &format!("  ({} more)\n", rows.len() - TEXT_ROWS);
    }
    for c in &report.caveats {
        out += &format!("caveat: {c}\n");
    }
    out
}

pub fn height_json(est: &HeightEstimate, method: &str) -> Value {
    json!({
        "value": real(est.value),
        "error_radius": real(est.error_radius),
        "iterations": est.iterations_used,
        "method": method,
    })
}

pub fn height_text(est: &HeightEstimate, method: &str) -> String {
    format!(
        "{} +- {} ({method}, {} iterations)\n",
        real(est.value),
        real(est.error_radius),
        est.iterations_used
    )
}

pub fn form_json(f: &QuadraticForm) -> Value {
    json!([f.a().to_string(), f.b().to_string(), f.c().to_string()])
}

pub fn pairing_json(f: &PairingForm, d: u64, weight: &str) -> Value {
    json!({
        "D": d,
        "form": form_json(&f.reduced),
        "raw_form": form_json(&f.raw),
        "ell": f.ell.to_string(),
        "alpha": f.alpha.to_string(),
        "G": f.g.to_string(),
        "weight": weight,
    })
}

pub fn pairing_text(f: &PairingForm, d: u64, weight: &str) -> String {
    format!(
        "{}\nraw {}  ell = {}  alpha = {}  G = {}  D = {d}  ({weight})\n",
        f.reduced, f.raw, f.ell, f.alpha, f.g
    )
}
