//! Measures given by closed-form moment rules, and their Cauchy transforms.

use rug::float::Constant;
use rug::{Float, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{MopError, Result};
use crate::numerics::scalar::check_precision;
use crate::numerics::text::{format_rational, parse_rational};
use crate::series::LaurentSeries;

/// One measure on the real line.
#[derive(Debug, Clone, PartialEq)]
pub enum MeasureSpec {
    /// `dx` on `[0, 1]`.
    LebesgueUnit,
    /// `-log x dx` (power 1) or `½ log²x dx` (power 2) on `[0, 1]`.
    LogWeight { power: u8 },
    /// `exp(-s(x² - a x)) dx` on the real line. Moments are divided by the
    /// total mass `m₀ = √(π/s) exp(s a²/4)` so they stay rational.
    HermiteExternal { a: Rational, s: Rational },
    /// Explicit exact moments `m_0, m_1, …`.
    MomentTable(Vec<Rational>),
}

impl MeasureSpec {
    pub fn log_weight(power: u8) -> Result<Self> {
        match power {
            1 | 2 => Ok(MeasureSpec::LogWeight { power }),
            _ => Err(MopError::InvalidInput(format!("log weight power must be 1 or 2, got {power}"))),
        }
    }

    pub fn hermite_external(a: Rational, s: Rational) -> Result<Self> {
        if s.cmp0() != std::cmp::Ordering::Greater {
            return Err(MopError::InvalidInput(format!("hermite_external needs s > 0, got {s}")));
        }
        Ok(MeasureSpec::HermiteExternal { a, s })
    }

    /// Whether the moments are stored divided by the total mass.
    pub fn is_mass_normalized(&self) -> bool {
        matches!(self, MeasureSpec::HermiteExternal { .. })
    }

    /// Exact `k`-th moment (normalized for `HermiteExternal`).
    pub fn moment(&self, k: usize) -> Result<Rational> {
        match self {
            MeasureSpec::HermiteExternal { .. } => Ok(self.moments(k + 1)?.pop().expect("k+1 moments")),
            _ => self.direct_moment(k),
        }
    }

    fn direct_moment(&self, k: usize) -> Result<Rational> {
        let kp1 = rug::Integer::from(k + 1);
        match self {
            MeasureSpec::LebesgueUnit => Ok(Rational::from((1, kp1))),
            MeasureSpec::LogWeight { power } => Ok(Rational::from((1, rug::ops::Pow::pow(kp1, *power as u32 + 1)))),
            MeasureSpec::MomentTable(values) => {
                values.get(k).cloned().ok_or(MopError::TableExhausted { index: k, len: values.len() })
            }
            MeasureSpec::HermiteExternal { .. } => unreachable!("recursive family"),
        }
    }

    /// Moments `m_0 … m_{count-1}`.
    pub fn moments(&self, count: usize) -> Result<Vec<Rational>> {
        match self {
            MeasureSpec::HermiteExternal { a, s } => {
                // m_{k+1} = (a/2) m_k + k/(2s) m_{k-1}, m_0 = 1
                let half_a = Rational::from(a / 2u32);
                let inv_two_s = Rational::from(2u32 * s).recip();
                let mut m: Vec<Rational> = Vec::with_capacity(count);
                for k in 0..count {
                    let next = match k {
                        0 => Rational::from(1),
                        1 => half_a.clone(),
                        _ => {
                            let j = k - 1;
                            Rational::from(&half_a * &m[j]) + Rational::from(&inv_two_s * j as u32) * &m[j - 1]
                        }
                    };
                    m.push(next);
                }
                Ok(m)
            }
            _ => (0..count).map(|k| self.direct_moment(k)).collect(),
        }
    }

    /// `m₀` that the stored moments were divided by; 1 when they were not.
    pub fn normalizing_mass(&self, prec: u32) -> Result<Float> {
        check_precision(prec)?;
        match self {
            MeasureSpec::HermiteExternal { a, s } => {
                let s = Float::with_val(prec, s);
                let a = Float::with_val(prec, a);
                let root = Float::with_val(prec, Float::with_val(prec, Constant::Pi) / &s).sqrt();
                let expo = Float::with_val(prec, &s * Float::with_val(prec, a.square_ref())) / 4u32;
                Ok(root * expo.exp())
            }
            MeasureSpec::MomentTable(_) => Err(MopError::UnsupportedForTable),
            _ => Ok(Float::with_val(prec, 1)),
        }
    }

    /// Density `w(x)` with respect to Lebesgue measure.
    pub fn weight_value(&self, x: &Float, prec: u32) -> Result<Float> {
        check_precision(prec)?;
        let in_unit = |open_at_zero: bool| -> Result<()> {
            let above = if open_at_zero { *x > 0 } else { *x >= 0 };
            if above && *x <= 1 {
                Ok(())
            } else {
                Err(MopError::DomainError(format!("x = {} outside the support", x.to_string_radix(10, Some(12)))))
            }
        };
        match self {
            MeasureSpec::LebesgueUnit => {
                in_unit(false)?;
                Ok(Float::with_val(prec, 1))
            }
            MeasureSpec::LogWeight { power } => {
                in_unit(true)?;
                let l = Float::with_val(prec, x.ln_ref());
                Ok(if *power == 1 { -l } else { Float::with_val(prec, l.square_ref()) / 2u32 })
            }
            MeasureSpec::HermiteExternal { a, s } => {
                let x = Float::with_val(prec, x);
                let q = Float::with_val(prec, x.square_ref()) - Float::with_val(prec, &x * a);
                Ok(Float::with_val(prec, -(q * s)).exp())
            }
            MeasureSpec::MomentTable(_) => Err(MopError::UnsupportedForTable),
        }
    }

    /// Density of the measure whose moments [`moment`](Self::moment) returns.
    pub fn normalized_weight_value(&self, x: &Float, prec: u32) -> Result<Float> {
        let w = self.weight_value(x, prec)?;
        if self.is_mass_normalized() {
            Ok(w / self.normalizing_mass(prec)?)
        } else {
            Ok(w)
        }
    }
}

/// Cauchy transform `∫ dμ(x)/(z − x)` at infinity: tail `c_k = m_k`.
pub fn cauchy_series(spec: &MeasureSpec, terms: usize) -> Result<LaurentSeries<Rational>> {
    if terms == 0 {
        return Err(MopError::InvalidInput("cauchy_series needs at least one term".into()));
    }
    Ok(LaurentSeries::from_tail(spec.moments(terms)?))
}

pub fn lebesgue() -> Vec<MeasureSpec> {
    vec![MeasureSpec::LebesgueUnit]
}

/// `(dx, -log x dx)` on `[0, 1]`.
pub fn apery_pair() -> Vec<MeasureSpec> {
    vec![MeasureSpec::LebesgueUnit, MeasureSpec::LogWeight { power: 1 }]
}

/// `(dx, -log x dx, ½ log²x dx)` on `[0, 1]`, whose Cauchy transforms are the
/// functions in Apéry's ζ(3) construction.
pub fn apery_triple() -> Vec<MeasureSpec> {
    vec![MeasureSpec::LebesgueUnit, MeasureSpec::LogWeight { power: 1 }, MeasureSpec::LogWeight { power: 2 }]
}

/// Multiple Hermite weights `exp(-s(x² - a_j x))`, one per shift.
pub fn hermite_external(shifts: &[Rational], s: &Rational) -> Result<Vec<MeasureSpec>> {
    shifts.iter().map(|a| MeasureSpec::hermite_external(a.clone(), s.clone())).collect()
}

/// Resolves `lebesgue`, `apery-pair`, `apery-triple` or
/// `hermite-ext:a1,a2,...:s`.
pub fn preset(name: &str) -> Result<Vec<MeasureSpec>> {
    match name {
        "lebesgue" => Ok(lebesgue()),
        "apery-pair" => Ok(apery_pair()),
        "apery-triple" => Ok(apery_triple()),
        other => {
            let rest = other
                .strip_prefix("hermite-ext:")
                .ok_or_else(|| MopError::InvalidInput(format!("unknown preset {other:?}")))?;
            let (shifts, s) = rest
                .rsplit_once(':')
                .ok_or_else(|| MopError::InvalidInput(format!("expected hermite-ext:a1,a2,...:s, got {other:?}")))?;
            let shifts = shifts.split(',').map(parse_rational).collect::<Result<Vec<_>>>()?;
            hermite_external(&shifts, &parse_rational(s)?)
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
struct MeasureRecord {
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    power: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    a: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    s: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    values: Option<Vec<String>>,
}

impl MeasureRecord {
    fn from_spec(spec: &MeasureSpec) -> Self {
        let mut r = MeasureRecord { kind: String::new(), power: None, a: None, s: None, values: None };
        match spec {
            MeasureSpec::LebesgueUnit => r.kind = "lebesgue_unit".into(),
            MeasureSpec::LogWeight { power } => {
                r.kind = "log_weight".into();
                r.power = Some(*power);
            }
            MeasureSpec::HermiteExternal { a, s } => {
                r.kind = "hermite_external".into();
                r.a = Some(format_rational(a));
                r.s = Some(format_rational(s));
            }
            MeasureSpec::MomentTable(v) => {
                r.kind = "moment_table".into();
                r.values = Some(v.iter().map(format_rational).collect());
            }
        }
        r
    }

    fn into_spec(self) -> Result<MeasureSpec> {
        let missing = |field: &str| MopError::Parse(format!("{} measure needs {field:?}", self.kind));
        match self.kind.as_str() {
            "lebesgue_unit" => Ok(MeasureSpec::LebesgueUnit),
            "log_weight" => MeasureSpec::log_weight(self.power.ok_or_else(|| missing("power"))?),
            "hermite_external" => MeasureSpec::hermite_external(
                parse_rational(self.a.as_deref().ok_or_else(|| missing("a"))?)?,
                parse_rational(self.s.as_deref().ok_or_else(|| missing("s"))?)?,
            ),
            "moment_table" => Ok(MeasureSpec::MomentTable(
                self.values
                    .as_ref()
                    .ok_or_else(|| missing("values"))?
                    .iter()
                    .map(|v| parse_rational(v))
                    .collect::<Result<_>>()?,
            )),
            other => Err(MopError::Parse(format!("unknown measure kind {other:?}"))),
        }
    }
}

pub fn measure_to_json(spec: &MeasureSpec) -> serde_json::Value {
    serde_json::to_value(MeasureRecord::from_spec(spec)).expect("plain record")
}

pub fn measures_to_json(specs: &[MeasureSpec]) -> serde_json::Value {
    serde_json::Value::Array(specs.iter().map(measure_to_json).collect())
}

/// Parses one measure object or an array of them.
pub fn measures_from_json(text: &str) -> Result<Vec<MeasureSpec>> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let records: Vec<MeasureRecord> = match value {
        serde_json::Value::Array(_) => serde_json::from_value(value)?,
        other => vec![serde_json::from_value(other)?],
    };
    records.into_iter().map(MeasureRecord::into_spec).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn closed_forms() {
        for k in 0..=100usize {
            let m = MeasureSpec::LebesgueUnit.moment(k).unwrap();
            assert_eq!(m * Rational::from(k + 1), 1);
        }
        assert_eq!(MeasureSpec::LogWeight { power: 1 }.moment(3).unwrap(), q(1, 16));
        assert_eq!(MeasureSpec::LogWeight { power: 2 }.moment(2).unwrap(), q(1, 27));
    }

    #[test]
    fn hermite_moments() {
        let h = MeasureSpec::hermite_external(q(0, 1), q(1, 1)).unwrap();
        assert_eq!(h.moment(2).unwrap(), q(1, 2));
        for k in (1..40).step_by(2) {
            assert_eq!(h.moment(k).unwrap(), 0);
        }
        // s = 1, a = 1: mean 1/2, variance 1/2
        let h = MeasureSpec::hermite_external(q(1, 1), q(1, 1)).unwrap();
        assert_eq!(h.moment(1).unwrap(), q(1, 2));
        assert_eq!(h.moment(2).unwrap(), q(1, 4) + q(1, 2));
        assert!(MeasureSpec::hermite_external(q(1, 1), q(0, 1)).is_err());
    }

    #[test]
    fn tables() {
        let t = MeasureSpec::MomentTable(vec![q(1, 1), q(1, 3)]);
        assert_eq!(t.moment(1).unwrap(), q(1, 3));
        assert_eq!(t.moment(2), Err(MopError::TableExhausted { index: 2, len: 2 }));
        assert_eq!(cauchy_series(&t, 2).unwrap().tail, vec![q(1, 1), q(1, 3)]);
        assert!(cauchy_series(&t, 3).is_err());
        assert_eq!(t.weight_value(&Float::with_val(64, 0.5), 64), Err(MopError::UnsupportedForTable));
    }

    #[test]
    fn series_tails() {
        assert_eq!(cauchy_series(&MeasureSpec::LebesgueUnit, 3).unwrap().tail, vec![q(1, 1), q(1, 2), q(1, 3)]);
        assert_eq!(
            cauchy_series(&MeasureSpec::LogWeight { power: 1 }, 3).unwrap().tail,
            vec![q(1, 1), q(1, 4), q(1, 9)]
        );
        for spec in apery_triple() {
            let s = cauchy_series(&spec, 12).unwrap();
            for (k, c) in s.tail.iter().enumerate() {
                assert_eq!(*c, spec.moment(k).unwrap());
            }
        }
    }

    #[test]
    fn weights() {
        let half = Float::with_val(128, 0.5);
        assert_eq!(MeasureSpec::LebesgueUnit.weight_value(&half, 128).unwrap(), 1);
        let inv_e = Float::with_val(256, -1).exp();
        let w = MeasureSpec::LogWeight { power: 1 }.weight_value(&inv_e, 256).unwrap();
        assert!(Float::with_val(256, w - 1u32).abs() < 1e-70);
        let h = MeasureSpec::hermite_external(q(0, 1), q(1, 1)).unwrap();
        assert_eq!(h.weight_value(&Float::new(128), 128).unwrap(), 1);
        assert!(matches!(
            MeasureSpec::LebesgueUnit.weight_value(&Float::with_val(64, 1.5), 64),
            Err(MopError::DomainError(_))
        ));
    }

    #[test]
    fn presets_and_files() {
        assert_eq!(preset("apery-triple").unwrap().len(), 3);
        let h = preset("hermite-ext:1,-1:1").unwrap();
        assert_eq!(h[1], MeasureSpec::HermiteExternal { a: q(-1, 1), s: q(1, 1) });
        assert!(preset("nope").is_err());

        let mut specs = h.clone();
        specs.push(MeasureSpec::LogWeight { power: 2 });
        specs.push(MeasureSpec::MomentTable(vec![q(1, 1), q(-2, 7)]));
        let text = measures_to_json(&specs).to_string();
        assert!(text.contains("\"-2/7\""));
        assert_eq!(measures_from_json(&text).unwrap(), specs);
        assert_eq!(
            measures_from_json(r#"{"kind": "log_weight", "power": 2}"#).unwrap(),
            vec![MeasureSpec::LogWeight { power: 2 }]
        );
        assert!(measures_from_json(r#"{"kind": "moment_table", "values": ["0.5"]}"#).is_err());
        assert!(measures_from_json(r#"{"kind": "log_weight", "power": 3}"#).is_err());
    }
}
