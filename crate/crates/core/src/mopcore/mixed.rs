//! Mixed-type systems: several unknown polynomials tied together by linear
//! forms of moment conditions and point constraints.

use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{MopError, Result};
use crate::measures::MeasureSpec;
use crate::mopcore::systems::moment_table;
use crate::numerics::matrix::exact_solution_space;
use crate::numerics::text::{format_rational, parse_rational};
use crate::numerics::Polynomial;

#[derive(Debug, Clone, PartialEq)]
pub struct Unknown {
    pub name: String,
    pub max_degree: usize,
}

/// `coefficient · ∫ x^k · unknown(x) dμ_measure(x)`
#[derive(Debug, Clone, PartialEq)]
pub struct FormTerm {
    pub coefficient: Rational,
    pub measure: usize,
    pub unknown: usize,
}

/// The sum of `terms` vanishes for `k = 0, …, conditions − 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentForm {
    pub terms: Vec<FormTerm>,
    pub conditions: usize,
}

/// `unknown(point) = value`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointConstraint {
    pub unknown: usize,
    pub point: Rational,
    pub value: Rational,
}

/// Declared dimension of the solution set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolutionKind {
    Unique,
    /// A line through the origin; one representative is chosen by the
    /// normalization.
    OneDimensional,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// Integer coefficients with content 1, leading coefficient of the first
    /// unknown positive.
    IntegerContent,
    /// The given unknown is monic at its degree cap.
    Monic { unknown: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixedSystemSpec {
    pub unknowns: Vec<Unknown>,
    pub forms: Vec<MomentForm>,
    pub point_constraints: Vec<PointConstraint>,
    pub kind: SolutionKind,
    pub normalization: Normalization,
}

impl MixedSystemSpec {
    pub fn unknown_count(&self) -> usize {
        self.unknowns.iter().map(|u| u.max_degree + 1).sum()
    }

    pub fn constraint_count(&self) -> usize {
        self.forms.iter().map(|f| f.conditions).sum::<usize>() + self.point_constraints.len()
    }

    fn validate(&self, measures: usize) -> Result<()> {
        let bad = |m: String| Err(MopError::InvalidInput(m));
        if self.unknowns.is_empty() {
            return bad("mixed system without unknowns".into());
        }
        for f in &self.forms {
            for t in &f.terms {
                if t.unknown >= self.unknowns.len() || t.measure >= measures {
                    return bad(format!("form term refers to unknown {} / measure {}", t.unknown, t.measure));
                }
            }
        }
        if self.point_constraints.iter().any(|p| p.unknown >= self.unknowns.len()) {
            return bad("point constraint refers to a missing unknown".into());
        }
        if let Normalization::Monic { unknown } = self.normalization {
            if unknown >= self.unknowns.len() {
                return bad(format!("monic normalization on missing unknown {unknown}"));
            }
        }
        let (c, u) = (self.constraint_count(), self.unknown_count());
        match self.kind {
            SolutionKind::Unique if c != u => {
                bad(format!("unique solution declared with {c} constraints for {u} unknowns"))
            }
            SolutionKind::OneDimensional if c + 1 != u => {
                bad(format!("one-dimensional solution declared with {c} constraints for {u} unknowns"))
            }
            SolutionKind::OneDimensional if self.point_constraints.iter().any(|p| p.value.cmp0().is_ne()) => {
                bad("one-dimensional systems must be homogeneous".into())
            }
            _ => Ok(()),
        }
    }

    fn offsets(&self) -> Vec<usize> {
        let mut acc = 0;
        self.unknowns
            .iter()
            .map(|u| {
                let o = acc;
                acc += u.max_degree + 1;
                o
            })
            .collect()
    }
}

/// Solves a mixed system exactly and returns one polynomial per unknown.
pub fn mixed_solve(spec: &MixedSystemSpec, measures: &[MeasureSpec]) -> Result<Vec<Polynomial<Rational>>> {
    spec.validate(measures.len())?;
    let width = spec.unknown_count();
    let offsets = spec.offsets();
    let max_k = spec.forms.iter().map(|f| f.conditions).max().unwrap_or(0);
    let max_deg = spec.unknowns.iter().map(|u| u.max_degree).max().unwrap_or(0);
    let moments = moment_table(measures, max_k + max_deg + 1)?;

    let mut rows = Vec::with_capacity(spec.constraint_count());
    let mut rhs = Vec::with_capacity(spec.constraint_count());
    for form in &spec.forms {
        for k in 0..form.conditions {
            let mut row = vec![Rational::new(); width];
            for t in &form.terms {
                for i in 0..=spec.unknowns[t.unknown].max_degree {
                    row[offsets[t.unknown] + i] += Rational::from(&t.coefficient * &moments[t.measure][k + i]);
                }
            }
            rows.push(row);
            rhs.push(Rational::new());
        }
    }
    for pc in &spec.point_constraints {
        let mut row = vec![Rational::new(); width];
        let mut power = Rational::from(1);
        for i in 0..=spec.unknowns[pc.unknown].max_degree {
            row[offsets[pc.unknown] + i] = power.clone();
            power *= &pc.point;
        }
        rows.push(row);
        rhs.push(pc.value.clone());
    }

    let space = exact_solution_space(&rows, &rhs, width)
        .ok_or_else(|| MopError::NoSolution("inconsistent constraints".into()))?;
    let vector = match spec.kind {
        SolutionKind::Unique => {
            if space.dimension() > 0 {
                return Err(MopError::NonUnique(format!("solution space has dimension {}", space.dimension())));
            }
            space.particular
        }
        SolutionKind::OneDimensional => match space.dimension() {
            0 => return Err(MopError::NoSolution("only the trivial solution".into())),
            1 => space.null_basis.into_iter().next().expect("one basis vector"),
            d => return Err(MopError::NonUnique(format!("null space has dimension {d}"))),
        },
    };
    let polys: Vec<Polynomial<Rational>> = spec
        .unknowns
        .iter()
        .zip(&offsets)
        .map(|(u, &o)| Polynomial::new(vector[o..o + u.max_degree + 1].to_vec()))
        .collect();
    if spec.kind == SolutionKind::Unique {
        return Ok(polys);
    }
    normalize(polys, spec)
}

fn normalize(polys: Vec<Polynomial<Rational>>, spec: &MixedSystemSpec) -> Result<Vec<Polynomial<Rational>>> {
    let factor = match spec.normalization {
        Normalization::IntegerContent => {
            let lead = polys[0].leading().ok_or_else(|| {
                MopError::NoSolution(format!("unknown {} vanishes identically", spec.unknowns[0].name))
            })?;
            let mut l = Integer::from(1);
            for c in polys.iter().flat_map(|p| p.coeffs()) {
                l.lcm_mut(c.denom());
            }
            let mut g = Integer::new();
            for c in polys.iter().flat_map(|p| p.coeffs()) {
                g.gcd_mut(&(c.numer() * Integer::from(&l / c.denom())));
            }
            let f = Rational::from((l, g));
            if lead.cmp0().is_lt() {
                -f
            } else {
                f
            }
        }
        Normalization::Monic { unknown } => {
            let cap = spec.unknowns[unknown].max_degree;
            match polys[unknown].coeff(cap) {
                Some(c) => Rational::from(c.recip_ref()),
                None => {
                    return Err(MopError::NoSolution(format!(
                        "unknown {} has degree below {cap}; cannot make it monic",
                        spec.unknowns[unknown].name
                    )))
                }
            }
        }
    };
    Ok(polys.iter().map(|p| p.scale(&factor)).collect())
}

#[derive(Serialize, Deserialize)]
struct UnknownRecord {
    name: String,
    max_degree: usize,
}

#[derive(Serialize, Deserialize)]
struct TermRecord {
    coefficient: String,
    measure: usize,
    unknown: usize,
}

#[derive(Serialize, Deserialize)]
struct FormRecord {
    conditions: usize,
    terms: Vec<TermRecord>,
}

#[derive(Serialize, Deserialize)]
struct PointRecord {
    unknown: usize,
    point: String,
    value: String,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum NormalizationRecord {
    IntegerContent,
    Monic(usize),
}

#[derive(Serialize, Deserialize)]
struct MixedRecord {
    unknowns: Vec<UnknownRecord>,
    forms: Vec<FormRecord>,
    #[serde(default)]
    point_constraints: Vec<PointRecord>,
    kind: String,
    #[serde(default = "default_normalization")]
    normalization: NormalizationRecord,
}

fn default_normalization() -> NormalizationRecord {
    NormalizationRecord::IntegerContent
}

impl MixedSystemSpec {
    pub fn to_json(&self) -> serde_json::Value {
        let rec = MixedRecord {
            unknowns: self
                .unknowns
                .iter()
                .map(|u| UnknownRecord { name: u.name.clone(), max_degree: u.max_degree })
                .collect(),
            forms: self
                .forms
                .iter()
                .map(|f| FormRecord {
                    conditions: f.conditions,
                    terms: f
                        .terms
                        .iter()
                        .map(|t| TermRecord {
                            coefficient: format_rational(&t.coefficient),
                            measure: t.measure,
                            unknown: t.unknown,
                        })
                        .collect(),
                })
                .collect(),
            point_constraints: self
                .point_constraints
                .iter()
                .map(|p| PointRecord {
                    unknown: p.unknown,
                    point: format_rational(&p.point),
                    value: format_rational(&p.value),
                })
                .collect(),
            kind: match self.kind {
                SolutionKind::Unique => "unique".into(),
                SolutionKind::OneDimensional => "one_dimensional".into(),
            },
            normalization: match self.normalization {
                Normalization::IntegerContent => NormalizationRecord::IntegerContent,
                Normalization::Monic { unknown } => NormalizationRecord::Monic(unknown),
            },
        };
        serde_json::to_value(rec).expect("plain record")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let rec: MixedRecord = serde_json::from_str(text)?;
        Ok(MixedSystemSpec {
            unknowns: rec.unknowns.into_iter().map(|u| Unknown { name: u.name, max_degree: u.max_degree }).collect(),
            forms: rec
                .forms
                .into_iter()
                .map(|f| {
                    Ok(MomentForm {
                        conditions: f.conditions,
                        terms: f
                            .terms
                            .into_iter()
                            .map(|t| {
                                Ok(FormTerm {
                                    coefficient: parse_rational(&t.coefficient)?,
                                    measure: t.measure,
                                    unknown: t.unknown,
                                })
                            })
                            .collect::<Result<_>>()?,
                    })
                })
                .collect::<Result<_>>()?,
            point_constraints: rec
                .point_constraints
                .into_iter()
                .map(|p| {
                    Ok(PointConstraint {
                        unknown: p.unknown,
                        point: parse_rational(&p.point)?,
                        value: parse_rational(&p.value)?,
                    })
                })
                .collect::<Result<_>>()?,
            kind: match rec.kind.as_str() {
                "unique" => SolutionKind::Unique,
                "one_dimensional" => SolutionKind::OneDimensional,
                other => return Err(MopError::Parse(format!("unknown solution kind {other:?}"))),
            },
            normalization: match rec.normalization {
                NormalizationRecord::IntegerContent => Normalization::IntegerContent,
                NormalizationRecord::Monic(unknown) => Normalization::Monic { unknown },
            },
        })
    }
}

/// The type II conditions of index `n` written as a mixed system with one
/// monic unknown.
pub fn type_ii_as_mixed(n: &crate::mopcore::MultiIndex) -> MixedSystemSpec {
    MixedSystemSpec {
        unknowns: vec![Unknown { name: "P".into(), max_degree: n.size() }],
        forms: n
            .parts()
            .iter()
            .enumerate()
            .map(|(j, &nj)| MomentForm {
                terms: vec![FormTerm { coefficient: Rational::from(1), measure: j, unknown: 0 }],
                conditions: nj,
            })
            .collect(),
        point_constraints: Vec::new(),
        kind: SolutionKind::OneDimensional,
        normalization: Normalization::Monic { unknown: 0 },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{apery_pair, apery_triple};
    use crate::mopcore::{type_ii, MultiIndex};

    #[test]
    fn pure_type_ii_matches() {
        for s in ["1,0", "2,1", "2,2", "1,3"] {
            let n: MultiIndex = s.parse().unwrap();
            let via_mixed = mixed_solve(&type_ii_as_mixed(&n), &apery_pair()).unwrap();
            assert_eq!(via_mixed[0], type_ii::<Rational>(&apery_pair(), &n).unwrap().poly, "{s}");
        }
    }

    #[test]
    fn declared_counts_are_checked() {
        let mut spec = type_ii_as_mixed(&"2,1".parse().unwrap());
        spec.kind = SolutionKind::Unique;
        assert!(matches!(mixed_solve(&spec, &apery_pair()), Err(MopError::InvalidInput(_))));
    }

    #[test]
    fn duplicated_conditions_are_not_unique() {
        let spec = MixedSystemSpec {
            unknowns: vec![Unknown { name: "P".into(), max_degree: 2 }],
            forms: vec![
                MomentForm {
                    terms: vec![FormTerm { coefficient: Rational::from(1), measure: 0, unknown: 0 }],
                    conditions: 1,
                },
                MomentForm {
                    terms: vec![FormTerm { coefficient: Rational::from(2), measure: 0, unknown: 0 }],
                    conditions: 1,
                },
            ],
            point_constraints: vec![],
            kind: SolutionKind::OneDimensional,
            normalization: Normalization::IntegerContent,
        };
        assert!(matches!(mixed_solve(&spec, &apery_triple()), Err(MopError::NonUnique(_))));
    }

    #[test]
    fn unique_inhomogeneous() {
        // P of degree <= 1 with P(0) = 1, P(1) = 3
        let spec = MixedSystemSpec {
            unknowns: vec![Unknown { name: "P".into(), max_degree: 1 }],
            forms: vec![],
            point_constraints: vec![
                PointConstraint { unknown: 0, point: Rational::from(0), value: Rational::from(1) },
                PointConstraint { unknown: 0, point: Rational::from(1), value: Rational::from(3) },
            ],
            kind: SolutionKind::Unique,
            normalization: Normalization::IntegerContent,
        };
        assert_eq!(mixed_solve(&spec, &apery_pair()).unwrap()[0], Polynomial::from_ints(&[1, 2]));
        let text = spec.to_json().to_string();
        assert_eq!(MixedSystemSpec::from_json(&text).unwrap(), spec);
    }
}
