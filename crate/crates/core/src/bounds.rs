//! Height floors from class numbers of the discriminants `-D(t)`,
//! `D(t) = 4(t^3 + a4 t - a6)`.

use std::cmp::Ordering;
use std::f64::consts::PI;

use rayon::prelude::*;
use rug::{Integer, Rational};
use thiserror::Error;

use crate::class_forms::{hurwitz_h, Discriminant, MAX_COUNT_D};
use crate::curve::Curve;
use crate::heights::{delta_upper, ln_abs, DeltaBound, DeltaProvenance};
use crate::integrality::{tamagawa_numbers, torsion_order, TamagawaData};
use crate::pairing::d_of_t;

pub const DEFAULT_T_MAX: u64 = 1000;

pub const RANK_CAVEAT: &str = "vacuous if the curve has rank 0 (rank is not verified)";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("no admissible t up to {0}")]
    NoAdmissibleT(u64),
    #[error("t_max must be at least 1")]
    InvalidTMax,
    #[error("T(-{d}, {t}) = {value} is not positive")]
    WindowViolated { d: String, t: u64, value: f64 },
    #[error("t = {0} is not admissible")]
    Inadmissible(u64),
    #[error("delta must be finite and non-negative, got {0}")]
    InvalidDelta(f64),
}

/// `log(D / (4(t+1)^2)) - 4 delta`, rounded down a few ulps.
pub fn t_constant(d: &Integer, t: u64, delta: f64) -> Result<f64, BoundsError> {
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(BoundsError::InvalidDelta(delta));
    }
    let violated = |value| BoundsError::WindowViolated { d: d.to_string(), t, value };
    if d.cmp0() != Ordering::Greater {
        return Err(violated(f64::NAN));
    }
    let lower = Integer::from(t + 1).square() * 4u32;
    if delta == 0.0 && *d <= lower {
        return Err(violated(0.0));
    }
    let ln_d = ln_abs(d);
    let raw = ln_d - ln_abs(&lower) - 4.0 * delta;
    let value = raw - 16.0 * f64::EPSILON * (ln_d + 4.0 * delta + 1.0);
    if value > 0.0 {
        Ok(value)
    } else {
        Err(violated(raw))
    }
}

/// Whether `4(t+1)^2 exp(4 delta) < D(t) < t^2 (t+1)^2`. With `delta = 0`
/// both sides are compared exactly.
fn admissible(d: &Integer, t: u64, delta: f64) -> bool {
    let t1 = Integer::from(t + 1);
    let upper = Integer::from(t) * &t1 * Integer::from(t) * &t1;
    *d < upper && t_constant(d, t, delta).is_ok()
}

/// All `t <= t_max` inside the window, with their `D(t)`.
pub fn admissible_t(curve: &Curve, delta: f64, t_max: u64) -> Result<Vec<(u64, Integer)>, BoundsError> {
    if t_max == 0 {
        return Err(BoundsError::InvalidTMax);
    }
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(BoundsError::InvalidDelta(delta));
    }
    let out: Vec<_> = (1..=t_max)
        .filter_map(|t| {
            let d = d_of_t(&Integer::from(t), curve);
            admissible(&d, t, delta).then_some((t, d))
        })
        .collect();
    if out.is_empty() {
        return Err(BoundsError::NoAdmissibleT(t_max));
    }
    Ok(out)
}

/// `torsion^2 T / (H + torsion)^2`.
pub fn class_number_floor(hurwitz: &Rational, t_value: f64, torsion: u32) -> f64 {
    let tau = torsion as f64;
    let denom = hurwitz.to_f64() + tau;
    tau * tau * t_value / (denom * denom) * (1.0 - 8.0 * f64::EPSILON)
}

/// The same floor with `H(-D)` replaced by `sqrt(D)(log D + 2)/pi`.
pub fn closed_form_floor(d: &Integer, t_value: f64, torsion: u32) -> f64 {
    let tau = torsion as f64;
    let ln_d = ln_abs(d);
    let sqrt_d = (ln_d / 2.0).exp();
    let denom = (sqrt_d * (ln_d + 2.0) + PI * tau) * (1.0 + 8.0 * f64::EPSILON);
    PI * PI * tau * tau * t_value / (denom * denom) * (1.0 - 8.0 * f64::EPSILON)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub t: u64,
    pub d: Discriminant,
    pub hurwitz: Rational,
    pub t_value: f64,
    pub floor: f64,
    pub trivial_floor: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub curve: Curve,
    pub delta: DeltaBound,
    pub tamagawa: Option<TamagawaData>,
    pub torsion_order: u32,
    pub candidates: Vec<Candidate>,
    pub best_t: u64,
    pub best_floor: f64,
    /// Best closed-form floor over the same candidates.
    pub trivial_floor: f64,
    pub caveats: Vec<String>,
}

impl BoundReport {
    pub fn best(&self) -> &Candidate {
        self.candidates.iter().find(|c| c.t == self.best_t).expect("best candidate is listed")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FloorOptions {
    pub t_max: u64,
    /// Per-prime Tamagawa numbers that replace computed ones.
    pub tamagawa: Option<TamagawaData>,
    /// Use this delta bound instead of deriving one.
    pub delta: Option<f64>,
}

impl Default for FloorOptions {
    fn default() -> Self {
        FloorOptions { t_max: DEFAULT_T_MAX, tamagawa: None, delta: None }
    }
}

pub fn height_floor(curve: &Curve, opts: &FloorOptions) -> Result<BoundReport, BoundsError> {
    let mut caveats = vec![RANK_CAVEAT.to_string()];

    let tamagawa = match (tamagawa_numbers(curve), &opts.tamagawa) {
        (Ok(data), Some(o)) => Some(data.merged_with(o)),
        (Ok(data), None) => Some(data),
        (Err(e), Some(o)) => {
            caveats.push(format!("Tamagawa computation failed ({e}); using supplied values only"));
            Some(o.clone())
        }
        (Err(e), None) => {
            caveats.push(format!("Tamagawa computation failed ({e})"));
            None
        }
    };
    if let Some(data) = &tamagawa {
        if let Err(rest) = data.covers(&curve.discriminant()) {
            caveats.push(format!("Tamagawa data misses primes dividing {rest}"));
        }
    }

    let delta = match opts.delta {
        Some(value) => {
            if !(value.is_finite() && value >= 0.0) {
                return Err(BoundsError::InvalidDelta(value));
            }
            caveats.push("delta bound supplied by caller".to_string());
            DeltaBound { value, provenance: DeltaProvenance::Supplied }
        }
        None => delta_upper(curve, tamagawa.as_ref()),
    };

    // A smaller torsion count only lowers the floor, so 1 is a safe fallback.
    let torsion = torsion_order(curve).unwrap_or_else(|e| {
        caveats.push(format!("torsion computation failed ({e}); using 1"));
        1
    });

    let window = admissible_t(curve, delta.value, opts.t_max)?;
    let (countable, skipped): (Vec<_>, Vec<_>) =
        window.into_iter().partition(|(_, d)| d.to_u64().is_some_and(|d| d <= MAX_COUNT_D));
    if !skipped.is_empty() {
        caveats.push(format!("skipped {} candidate(s) with D above {MAX_COUNT_D}", skipped.len()));
    }
    if countable.is_empty() {
        return Err(BoundsError::NoAdmissibleT(opts.t_max));
    }

    let candidates: Vec<Candidate> = countable
        .par_iter()
        .map(|(t, d)| {
            let disc = Discriminant::from_integer(d).expect("D(t) = 0 mod 4 and positive");
            let hurwitz = hurwitz_h(disc);
            let t_value = t_constant(d, *t, delta.value).expect("admissible t has positive T");
            Candidate {
                t: *t,
                d: disc,
                floor: class_number_floor(&hurwitz, t_value, torsion),
                trivial_floor: closed_form_floor(d, t_value, torsion),
                hurwitz,
                t_value,
            }
        })
        .collect();

    let best = candidates
        .iter()
        .fold(None::<&Candidate>, |acc, c| match acc {
            Some(b) if b.floor >= c.floor => Some(b),
            _ => Some(c),
        })
        .expect("candidates are non-empty");
    let trivial_floor = candidates.iter().map(|c| c.trivial_floor).fold(0.0, f64::max);
    Ok(BoundReport {
        curve: curve.clone(),
        delta,
        tamagawa,
        torsion_order: torsion,
        best_t: best.t,
        best_floor: best.floor,
        trivial_floor,
        candidates,
        caveats,
    })
}

/// Closed-form floor at a single admissible `t`.
pub fn height_floor_trivial(curve: &Curve, t: u64, delta: f64) -> Result<f64, BoundsError> {
    let d = d_of_t(&Integer::from(t), curve);
    if !admissible(&d, t, delta) {
        return Err(BoundsError::Inadmissible(t));
    }
    let torsion = torsion_order(curve).unwrap_or(1);
    Ok(closed_form_floor(&d, t_constant(&d, t, delta)?, torsion))
}
