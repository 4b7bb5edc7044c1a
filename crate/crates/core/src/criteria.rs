//! Labelled error-bound conditions and audits of the implications between them.
//!
//! A condition holds when its quantity exceeds `γ` (open comparison with slack
//! [`CriteriaConfig::slack`]); condition (a) is different: it asserts an error
//! bound with some `τ > 0`, evaluated as `τ > zero_floor`.
//!
//! Implications come in two classes. *Exact* ones follow from pointwise
//! inequalities that also hold on every probe set and are audited always.
//! *Asymptotic* ones need a limiting argument (completeness, Ekeland, fuzzy
//! sums); on a discretization they are audited only under their hypotheses and
//! only when the antecedent clears `γ` by the relative `margin`. A failed audit
//! is an error, never a report entry.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::ext::ExtReal;

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CriteriaConfig {
    pub gamma: f64,
    /// Smallest value of `τ` read as a genuine error bound.
    pub zero_floor: f64,
    /// Relative margin an antecedent must clear in asymptotic audits.
    pub margin: f64,
    pub slack: f64,
}

impl CriteriaConfig {
    /// Default floor for grids, where a vanishing limit shows up as `O(h)`.
    pub const GRID_ZERO_FLOOR: f64 = 1e-2;
    /// Default floor for finite metric spaces, where values are exact.
    pub const FINITE_ZERO_FLOOR: f64 = 1e-9;

    pub fn new(gamma: f64) -> Self {
        CriteriaConfig { gamma, zero_floor: Self::GRID_ZERO_FLOOR, margin: 0.05, slack: 1e-9 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::Precondition(format!("gamma must be positive, got {}", self.gamma)));
        }
        Ok(())
    }

    fn exceeds(&self, v: ExtReal) -> bool {
        v.value() > self.gamma + self.slack
    }

    fn clears(&self, v: ExtReal) -> bool {
        v.value() > self.gamma * (1.0 + self.margin)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum AuditClass {
    Exact,
    Asymptotic,
}

/// Structural facts about a fixture that gate the audits.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Setting {
    pub normed: bool,
    pub complete: bool,
    pub lsc: bool,
    /// Euclidean stand-in for an Asplund space.
    pub asplund: bool,
    pub convex: bool,
    /// The range norm is smooth away from the origin.
    pub smooth_range: bool,
    /// The function is nonnegative on the probe set.
    pub nonnegative: bool,
    /// Subgradient data is the full (convex) subdifferential.
    pub exact_oracle: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Requires {
    Nothing,
    Normed,
    NormedExactOracle,
    CompleteLsc,
    Asplund,
    Convex,
    SmoothOrConvex,
}

impl Requires {
    fn met(self, s: &Setting) -> bool {
        match self {
            Requires::Nothing => true,
            Requires::Normed => s.normed,
            Requires::NormedExactOracle => s.normed && s.exact_oracle,
            Requires::CompleteLsc => s.complete && s.lsc,
            Requires::Asplund => s.asplund && s.complete && s.lsc,
            Requires::Convex => s.convex && s.complete && s.lsc,
            Requires::SmoothOrConvex => s.complete && s.lsc && s.asplund && (s.smooth_range || s.convex),
        }
    }
}

/// A condition with its underlying quantity.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConditionVerdict {
    pub label: char,
    pub description: String,
    /// `None` when the quantity needs data the fixture lacks.
    pub value: Option<ExtReal>,
    pub holds: Option<bool>,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AuditEntry {
    pub name: String,
    pub class: AuditClass,
    /// The hypotheses held and every involved condition was evaluable.
    pub audited: bool,
    pub antecedent: Option<bool>,
    pub consequent: Option<bool>,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Verdict {
    pub config: CriteriaConfig,
    pub setting: Setting,
    pub conditions: Vec<ConditionVerdict>,
    pub audits: Vec<AuditEntry>,
}

impl Verdict {
    pub fn condition(&self, label: char) -> &ConditionVerdict {
        self.conditions
            .iter()
            .find(|c| c.label == label)
            .expect("unknown condition label")
    }

    pub fn holds(&self, label: char) -> Option<bool> {
        self.condition(label).holds
    }
}

/// `from ⇒ to`, optionally guarded for an equivalence direction.
pub(crate) struct Rule {
    pub name: &'static str,
    pub from: char,
    pub to: char,
    pub class: AuditClass,
    pub requires: Requires,
}

pub(crate) const fn rule(name: &'static str, from: char, to: char, class: AuditClass, requires: Requires) -> Rule {
    Rule { name, from, to, class, requires }
}

/// Builds a verdict from `(label, description, value)` triples.
///
/// Label `'a'` is the error bound itself; `a_value` is its `τ`. An antecedent
/// `'a'` in a rule means `τ > γ`, and a consequent `'a'` in an asymptotic rule
/// means `τ ≥ γ`, matching "if γ < τ then (a) ⇒ (b)" and "(b) ⇒ (a) with τ = γ".
pub(crate) fn assemble(
    config: CriteriaConfig,
    setting: Setting,
    quantities: Vec<(char, &str, Option<ExtReal>)>,
    rules: &[Rule],
) -> Result<Verdict> {
    config.validate()?;
    let conditions: Vec<ConditionVerdict> = quantities
        .into_iter()
        .map(|(label, description, value)| ConditionVerdict {
            label,
            description: description.into(),
            value,
            holds: value.map(|v| {
                if label == 'a' {
                    v.value() > config.zero_floor
                } else {
                    config.exceeds(v)
                }
            }),
        })
        .collect();
    let value = |l: char| conditions.iter().find(|c| c.label == l).and_then(|c| c.value);

    let mut audits = Vec::with_capacity(rules.len());
    for r in rules {
        let (from, to) = (value(r.from), value(r.to));
        let antecedent = from.map(|v| match r.class {
            AuditClass::Exact => config.exceeds(v),
            AuditClass::Asymptotic => config.clears(v),
        });
        let consequent = to.map(|v| {
            if r.to == 'a' && r.class == AuditClass::Asymptotic {
                v.value() >= config.gamma - config.slack
            } else if r.to == 'a' {
                v.value() > config.zero_floor
            } else {
                config.exceeds(v)
            }
        });
        let audited = r.requires.met(&setting) && antecedent.is_some() && consequent.is_some();
        if audited && antecedent == Some(true) && consequent == Some(false) {
            return Err(Error::ImplicationViolated {
                name: r.name.into(),
                detail: format!(
                    "({}) = {} but ({}) = {} at gamma = {}",
                    r.from,
                    from.unwrap(),
                    r.to,
                    to.unwrap(),
                    config.gamma
                ),
            });
        }
        audits.push(AuditEntry {
            name: r.name.into(),
            class: r.class,
            audited,
            antecedent,
            consequent,
        });
    }
    Ok(Verdict { config, setting, conditions, audits })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    const RULES: [Rule; 2] = [
        rule("(c) => (e)", 'c', 'e', AuditClass::Exact, Requires::Nothing),
        rule("(b) => (a)", 'b', 'a', AuditClass::Asymptotic, Requires::CompleteLsc),
    ];

    #[test]
    fn violation_is_an_error() {
        let q = vec![
            ('a', "error bound", Some(ExtReal::finite(1.0))),
            ('b', "b", Some(ExtReal::finite(1.0))),
            ('c', "c", Some(ExtReal::finite(1.0))),
            ('e', "e", Some(ExtReal::finite(0.1))),
        ];
        let r = assemble(CriteriaConfig::new(0.5), Setting::default(), q, &RULES);
        assert!(matches!(r, Err(Error::ImplicationViolated { .. })));
    }

    #[test]
    fn asymptotic_audits_need_hypotheses() {
        let q = vec![
            ('a', "error bound", Some(ExtReal::finite(0.0))),
            ('b', "b", Some(ExtReal::finite(1.0))),
            ('c', "c", None),
            ('e', "e", Some(ExtReal::finite(1.0))),
        ];
        let v = assemble(CriteriaConfig::new(0.5), Setting::default(), q.clone(), &RULES).unwrap();
        assert!(!v.audits[1].audited);
        assert!(!v.audits[0].audited);
        assert_eq!(v.holds('c'), None);
        let s = Setting { complete: true, lsc: true, ..Setting::default() };
        assert!(assemble(CriteriaConfig::new(0.5), s, q, &RULES).is_err());
    }
}
