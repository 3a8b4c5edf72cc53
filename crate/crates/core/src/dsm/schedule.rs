//! Noise-level schedules `δ ↦ (a(δ), t_δ)`.
//!
//! A usable schedule drives `a → 0`, `δ/a → 0`, `t → ∞` and `a·t → ∞` as
//! `δ → 0`. The default is `a = sqrt(δ)`, `t = ln(1/δ)/a`, so that the noise term
//! `δ/a = sqrt(δ)` and the transient factor `e^{-at} = δ` both vanish.

use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

/// Shift used when the declared noise level is exactly zero.
pub const A_FLOOR: f64 = 1e-7;

/// Noise level substituted for `δ = 0` when evaluating the horizon rule.
pub const DELTA_FLOOR: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ShiftRule {
    /// `a = coeff · δ^exponent`
    Power {
        coeff: f64,
        exponent: f64,
    },
    Constant(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum HorizonRule {
    /// `t = coeff · ln(1/δ) / a`
    LogOverShift {
        coeff: f64,
    },
    Constant(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    pub shift: ShiftRule,
    pub horizon: HorizonRule,
    pub description: String,
}

impl Default for Schedule {
    fn default() -> Self {
        Self {
            shift: ShiftRule::Power {
                coeff: 1.0,
                exponent: 0.5,
            },
            horizon: HorizonRule::LogOverShift { coeff: 1.0 },
            description: "default: a = sqrt(delta), t = ln(1/delta)/a".into(),
        }
    }
}

impl Schedule {
    pub fn new(shift: ShiftRule, horizon: HorizonRule) -> Self {
        let description = format!("custom:a={},t={}", fmt_shift(&shift), fmt_horizon(&horizon));
        Self {
            shift,
            horizon,
            description,
        }
    }

    /// `(a, t)` for the declared noise level `delta`.
    ///
    /// `delta = 0` yields `a = A_FLOOR` with the horizon rule evaluated at
    /// [`DELTA_FLOOR`]; positive `delta` below the floor is raised to it.
    pub fn evaluate(&self, delta: f64) -> Result<(f64, f64)> {
        if !(delta >= 0.0) || !delta.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "noise level must be >= 0, got {delta}"
            )));
        }
        let d = delta.max(DELTA_FLOOR);
        let a = if delta == 0.0 {
            A_FLOOR
        } else {
            match self.shift {
                ShiftRule::Power { coeff, exponent } => coeff * d.powf(exponent),
                ShiftRule::Constant(a) => a,
            }
        };
        let t = match self.horizon {
            HorizonRule::LogOverShift { coeff } => coeff * (1.0 / d).ln() / a,
            HorizonRule::Constant(t) => t,
        };
        if !(a > 0.0) || !(t > 0.0) || !a.is_finite() || !t.is_finite() {
            return Err(Error::InvalidSchedule { a, t });
        }
        Ok((a, t))
    }

    /// Finite-sample check of the four limit conditions at one `δ ∈ (0, 1)`:
    /// `a > 0`, `t > 0`, `δ/a ≤ sqrt(δ)` and `a·t ≥ ln(1/δ)`, each up to a few ulps.
    pub fn satisfies_surrogates(&self, delta: f64) -> bool {
        let Ok((a, t)) = self.evaluate(delta) else {
            return false;
        };
        let slack = 1.0 + 8.0 * f64::EPSILON;
        a > 0.0
            && t > 0.0
            && delta / a <= delta.sqrt() * slack
            && a * t * slack >= (1.0 / delta).ln()
    }
}

fn fmt_shift(rule: &ShiftRule) -> String {
    match rule {
        ShiftRule::Power { coeff, exponent } => format!("{coeff}*delta^{exponent}"),
        ShiftRule::Constant(a) => format!("{a}"),
    }
}

fn fmt_horizon(rule: &HorizonRule) -> String {
    match rule {
        HorizonRule::LogOverShift { coeff } => format!("{coeff}*ln(1/delta)/a"),
        HorizonRule::Constant(t) => format!("{t}"),
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.description)
    }
}

fn parse_number(s: &str) -> Result<f64> {
    s.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::InvalidArgument(format!("bad number '{s}' in schedule")))
}

fn parse_shift(expr: &str) -> Result<ShiftRule> {
    if let Some(pos) = expr.find("delta^") {
        let coeff = match expr[..pos].strip_suffix('*') {
            Some(c) => parse_number(c)?,
            None if pos == 0 => 1.0,
            None => {
                return Err(Error::InvalidArgument(format!(
                    "bad shift expression '{expr}'"
                )))
            }
        };
        let exponent = parse_number(&expr[pos + "delta^".len()..])?;
        Ok(ShiftRule::Power { coeff, exponent })
    } else {
        Ok(ShiftRule::Constant(parse_number(expr)?))
    }
}

fn parse_horizon(expr: &str) -> Result<HorizonRule> {
    const LOG: &str = "ln(1/delta)/a";
    if let Some(head) = expr.strip_suffix(LOG) {
        let coeff = match head {
            "" => 1.0,
            _ => parse_number(head.strip_suffix('*').ok_or_else(|| {
                Error::InvalidArgument(format!("bad horizon expression '{expr}'"))
            })?)?,
        };
        Ok(HorizonRule::LogOverShift { coeff })
    } else {
        Ok(HorizonRule::Constant(parse_number(expr)?))
    }
}

/// Parses `default` or `custom:a=<expr>,t=<expr>` where the shift expression is
/// a constant or `[C*]delta^P` and the horizon expression is a constant or
/// `[K*]ln(1/delta)/a`.
impl FromStr for Schedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s == "default" {
            return Ok(Self::default());
        }
        let body = s
            .strip_prefix("custom:")
            .ok_or_else(|| Error::InvalidArgument(format!("unknown schedule '{s}'")))?;
        let (mut shift, mut horizon) = (None, None);
        for part in body.split(',') {
            match part.split_once('=') {
                Some(("a", e)) => shift = Some(parse_shift(e)?),
                Some(("t", e)) => horizon = Some(parse_horizon(e)?),
                _ => {
                    return Err(Error::InvalidArgument(format!(
                        "bad schedule term '{part}'"
                    )))
                }
            }
        }
        match (shift, horizon) {
            (Some(a), Some(t)) => Ok(Self::new(a, t)),
            _ => Err(Error::InvalidArgument(format!(
                "custom schedule needs both a= and t= terms: '{s}'"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn default_values() {
        let s = Schedule::default();
        let (a, t) = s.evaluate(1e-4).unwrap();
        assert_relative_eq!(a, 0.01, max_relative = 1e-15);
        assert_relative_eq!(t, 921.034_037_197_618, max_relative = 1e-12);

        let (a, t) = s.evaluate(1e-2).unwrap();
        assert_relative_eq!(a, 0.1, max_relative = 1e-15);
        assert_relative_eq!(t, 46.051_701_859_880_91, max_relative = 1e-12);
    }

    #[test]
    fn zero_delta_uses_floors() {
        let (a, t) = Schedule::default().evaluate(0.0).unwrap();
        assert_eq!(a, A_FLOOR);
        assert_relative_eq!(t, (1.0 / DELTA_FLOOR).ln() / A_FLOOR, max_relative = 1e-15);
    }

    #[test]
    fn default_satisfies_surrogates() {
        let s = Schedule::default();
        for k in 1..=12 {
            assert!(s.satisfies_surrogates(10f64.powi(-k)), "delta = 1e-{k}");
        }
    }

    #[test]
    fn constant_schedule_fails_surrogates_for_small_delta() {
        let s = Schedule::new(ShiftRule::Constant(0.1), HorizonRule::Constant(10.0));
        assert!(!s.satisfies_surrogates(1e-8));
    }

    #[test]
    fn rejects_nonpositive_output() {
        // ln(1/δ) <= 0 for δ >= 1
        let err = Schedule::default().evaluate(1.0).unwrap_err();
        assert!(matches!(err, Error::InvalidSchedule { .. }));
        assert!(Schedule::default().evaluate(-1.0).is_err());
    }

    #[test]
    fn parse_forms() {
        assert_eq!("default".parse::<Schedule>().unwrap(), Schedule::default());

        let s: Schedule = "custom:a=0.5*delta^0.25,t=2*ln(1/delta)/a".parse().unwrap();
        assert_eq!(
            s.shift,
            ShiftRule::Power {
                coeff: 0.5,
                exponent: 0.25
            }
        );
        assert_eq!(s.horizon, HorizonRule::LogOverShift { coeff: 2.0 });

        let s: Schedule = "custom:a=1e-3, t=2e4".parse().unwrap();
        assert_eq!(s.shift, ShiftRule::Constant(1e-3));
        assert_eq!(s.horizon, HorizonRule::Constant(2e4));
        assert_eq!(s.evaluate(0.3).unwrap(), (1e-3, 2e4));

        let s: Schedule = "custom:a=delta^0.5,t=ln(1/delta)/a".parse().unwrap();
        assert_eq!(
            s.evaluate(1e-4).unwrap(),
            Schedule::default().evaluate(1e-4).unwrap()
        );

        for bad in [
            "",
            "fancy",
            "custom:a=1",
            "custom:a=x,t=1",
            "custom:b=1,t=1",
            "custom:a=2delta^1,t=1",
        ] {
            assert!(bad.parse::<Schedule>().is_err(), "{bad}");
        }
    }

    #[test]
    fn description_round_trips() {
        let s: Schedule = "custom:a=0.5*delta^0.25,t=2*ln(1/delta)/a".parse().unwrap();
        assert_eq!(s.description.parse::<Schedule>().unwrap(), s);
    }
}
