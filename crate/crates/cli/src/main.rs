mod batch;
mod render;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use echeight::bounds::{height_floor, BoundsError, FloorOptions, DEFAULT_T_MAX};
use echeight::class_forms::{hurwitz_h, hurwitz_upper_bound, Discriminant};
use echeight::heights::{archimedean_height, canonical_height, delta_upper, delta_zero_report, HeightError};
use echeight::integrality::{tamagawa_numbers, IntegralityError, TamagawaData};
use echeight::pairing::{pairing_form, twist_point_from_t, MiddleWeight, PairingError};
use echeight::{Curve, CurveError, RationalPoint};
use rug::{Integer, Rational};
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "echeight", version, about = "Certified lower bounds for canonical heights on y^2 = x^3 + a4 x + a6")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug, Clone)]
struct CurveArgs {
    #[arg(long, allow_hyphen_values = true, value_parser = parse_integer)]
    a4: Integer,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_integer)]
    a6: Integer,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Height floor for every non-torsion point of the curve
    Analyze {
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long, default_value_t = DEFAULT_T_MAX)]
        t_max: u64,
        /// Tamagawa numbers as p:c,p:c,...
        #[arg(long, value_parser = parse_overrides)]
        tamagawa: Option<TamagawaData>,
        #[arg(long)]
        json: bool,
    },
    /// Canonical height of a rational point
    Height {
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_rational)]
        x: Rational,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_rational)]
        y: Rational,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Method::Doubling)]
        method: Method,
        #[arg(long)]
        json: bool,
    },
    /// Hurwitz class number H(-D)
    Hurwitz {
        #[arg(long)]
        d: u64,
        #[arg(long)]
        json: bool,
    },
    /// Reduced form of the class paired with P and Q = (-t, 1)
    Pair {
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_rational)]
        px: Rational,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_rational)]
        py: Rational,
        #[arg(long)]
        t: u64,
        #[arg(long)]
        json: bool,
    },
    /// Local reduction data and the vanishing test for the height gap
    Tamagawa {
        #[command(flatten)]
        curve: CurveArgs,
        /// Tamagawa numbers as p:c,p:c,...
        #[arg(long, value_parser = parse_overrides)]
        tamagawa: Option<TamagawaData>,
        #[arg(long)]
        json: bool,
    },
    /// Analyze every row of a CSV file (columns a4, a6, optional tamagawa)
    Batch {
        #[arg(long)]
        input: PathBuf,
        /// Defaults to standard output
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_T_MAX)]
        t_max: u64,
        /// Worker threads; 0 uses every core
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Method {
    /// Limit of 4^-n h(2^n P)
    Doubling,
    /// Weil height plus the archimedean series (needs the vanishing test to hold)
    Series,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Doubling => "doubling",
            Method::Series => "series",
        }
    }
}

/// A failed command and the exit code it maps to.
#[derive(Debug)]
pub enum Failure {
    /// Malformed, singular or off-curve input: exit 2.
    Input(String),
    /// Empty admissibility window: exit 3.
    NoWindow(String),
    /// Convergence or effort limits hit: exit 4.
    Effort(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::NoWindow(_) => 3,
            Failure::Effort(_) => 4,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(m) | Failure::NoWindow(m) | Failure::Effort(m) => f.write_str(m),
        }
    }
}

impl From<CurveError> for Failure {
    fn from(e: CurveError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<BoundsError> for Failure {
    fn from(e: BoundsError) -> Self {
        match e {
            BoundsError::NoAdmissibleT(_) => Failure::NoWindow(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<HeightError> for Failure {
    fn from(e: HeightError) -> Self {
        match e {
            HeightError::NoConvergence { .. } | HeightError::NonPositiveTerm(_) => Failure::Effort(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<IntegralityError> for Failure {
    fn from(e: IntegralityError) -> Self {
        match e {
            IntegralityError::EffortExceeded(_) | IntegralityError::Uncertified(_) => Failure::Effort(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<PairingError> for Failure {
    fn from(e: PairingError) -> Self {
        match e {
            PairingError::NoAdmissibleEll(_) => Failure::Effort(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

fn parse_integer(s: &str) -> Result<Integer, String> {
    s.trim().parse::<Integer>().map_err(|e| format!("bad integer {s:?}: {e}"))
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    s.trim().parse::<Rational>().map_err(|e| format!("bad rational {s:?}: {e}"))
}

/// `p:c` pairs separated by `sep`.
pub fn parse_override_list(s: &str, sep: char) -> Result<TamagawaData, String> {
    let mut pairs = Vec::new();
    for item in s.split(sep).map(str::trim).filter(|t| !t.is_empty()) {
        let (p, c) = item.split_once(':').ok_or_else(|| format!("expected p:c, got {item:?}"))?;
        let p = parse_integer(p)?;
        if p < 2 {
            return Err(format!("{p} is not a prime"));
        }
        let c: u32 = c.trim().parse().map_err(|e| format!("bad Tamagawa number {c:?}: {e}"))?;
        pairs.push((p, c));
    }
    TamagawaData::from_overrides(&pairs).map_err(|e| e.to_string())
}

fn parse_overrides(s: &str) -> Result<TamagawaData, String> {
    parse_override_list(s, ',')
}

fn curve_from(args: &CurveArgs) -> Result<Curve, Failure> {
    Ok(Curve::new(args.a4.clone(), args.a6.clone())?)
}

fn emit(json: bool, value: Value, text: String) {
    if json {
        println!("{value}");
    } else {
        print!("{text}");
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Analyze { curve, t_max, tamagawa, json } => {
            let curve = curve_from(&curve)?;
            let report = height_floor(&curve, &FloorOptions { t_max, tamagawa, delta: None })?;
            emit(json, Value::Object(render::report_json(&report)), render::report_text(&report));
        }
        Command::Height { curve, x, y, tol, method, json } => {
            let curve = curve_from(&curve)?;
            let p = curve.point(x, y)?;
            let est = match method {
                Method::Doubling => canonical_height(&p, &curve, tol)?,
                Method::Series => archimedean_height(&p, &curve, &tamagawa_numbers(&curve)?, tol)?,
            };
            let label = if curve.is_torsion(&p) { "torsion" } else { method.name() };
            emit(json, render::height_json(&est, label), render::height_text(&est, label));
        }
        Command::Hurwitz { d, json } => {
            let disc = Discriminant::new(d).map_err(|e| Failure::Input(e.to_string()))?;
            let h = hurwitz_h(disc);
            let bound = hurwitz_upper_bound(disc);
            emit(
                json,
                json!({ "D": d, "H": render::rational(&h), "upper_bound": render::real(bound) }),
                format!("{h}\n"),
            );
        }
        Command::Pair { curve, px, py, t, json } => {
            let curve = curve_from(&curve)?;
            let p: RationalPoint = curve.point(px, py)?;
            let (q, d) = twist_point_from_t(t, &curve)?;
            let f = pairing_form(&p, &q, d, &curve)?;
            let weight = MiddleWeight::One.to_string();
            emit(json, render::pairing_json(&f, d.value(), &weight), render::pairing_text(&f, d.value(), &weight));
        }
        Command::Tamagawa { curve, tamagawa, json } => {
            let curve = curve_from(&curve)?;
            let data = match tamagawa {
                Some(o) => tamagawa_numbers(&curve).map(|d| d.merged_with(&o)).unwrap_or(o),
                None => tamagawa_numbers(&curve)?,
            };
            tamagawa_command(&curve, &data, json)?;
        }
        Command::Batch { input, output, t_max, jobs } => batch::run(&input, output.as_deref(), t_max, jobs)?,
    }
    Ok(())
}

fn tamagawa_command(curve: &Curve, data: &TamagawaData, json: bool) -> Result<(), Failure> {
    let report = delta_zero_report(curve, data);
    let delta = delta_upper(curve, Some(data));
    let criterion = match &report {
        Ok(r) => json!({
            "holds": r.holds,
            "components": r.components,
            "tamagawa_all_one": r.tamagawa_all_one,
            "a4_nonpositive": r.a4_nonpositive,
            "intervals_negative": r.intervals_negative,
        }),
        Err(e) => json!({ "error": e.to_string() }),
    };
    let value = json!({
        "curve": render::curve_json(curve),
        "tamagawa": render::tamagawa_json(data),
        "product": data.product().to_string(),
        "criterion": criterion,
        "delta": { "value": render::real(delta.value), "provenance": delta.provenance.to_string() },
    });
    let mut text = format!("curve    {curve}\n\n       p  kodaira  c_p\n");
    for (p, c, k) in data.iter() {
        let k = k.map_or("-".to_string(), |k| k.to_string());
        text += &format!("{p:>8}  {k:>7}  {c:>3}\n");
    }
    text += "\n";
    match &report {
        Ok(r) => {
            text += &format!(
                "vanishing test  {} (components {}, all c_p = 1: {}, a4 <= 0: {}, q < 0 on the real locus: {})\n",
                if r.holds { "holds" } else { "fails" },
                r.components,
                r.tamagawa_all_one,
                r.a4_nonpositive,
                r.intervals_negative
            )
        }
        Err(e) => text += &format!("vanishing test  not applicable: {e}\n"),
    }
    text += &format!("delta           {} ({})\n", render::real(delta.value), delta.provenance);
    emit(json, value, text);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code())
        }
    }
}
