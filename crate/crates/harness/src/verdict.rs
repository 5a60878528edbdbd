//! The outcome of checking one instance.

use std::fmt::Display;

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;
use serde_json::{Map, Value};

/// Which alternative of a statement an instance falls into.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, PartialOrd, Ord)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// A power-product relation, a vanishing subsum or another structural
    /// alternative explains the instance.
    Relation,
    /// The quantitative bound is the alternative being asserted.
    GcdBound,
    /// A hypothesis could not be verified, so nothing is asserted.
    PreconditionUnmet,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Relation => "relation",
            Branch::GcdBound => "gcd-bound",
            Branch::PreconditionUnmet => "precondition-unmet",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, PartialOrd, Ord)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Pass,
    Relation,
    PreconditionUnmet,
    /// An asserted inequality or identity failed.
    #[serde(rename = "FINDING")]
    Finding,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Pass => "pass",
            Outcome::Relation => "relation",
            Outcome::PreconditionUnmet => "precondition-unmet",
            Outcome::Finding => "FINDING",
        }
    }
}

/// One checked instance.
///
/// `lhs`, `rhs` and `margin` are exact and serialized as strings. For
/// inequalities the convention is `lhs <= rhs` and `margin = rhs - lhs`;
/// for identities `margin` is the difference of the two sides, which must
/// vanish.
#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub id: String,
    pub check: String,
    pub instance: Value,
    pub lhs: Option<String>,
    pub rhs: Option<String>,
    pub margin: Option<String>,
    pub branch: Branch,
    pub outcome: Outcome,
    pub notes: Vec<String>,
    pub payload: Map<String, Value>,
}

impl Verdict {
    fn blank(check: &str, branch: Branch, outcome: Outcome) -> Self {
        Verdict {
            id: String::new(),
            check: check.to_string(),
            instance: Value::Null,
            lhs: None,
            rhs: None,
            margin: None,
            branch,
            outcome,
            notes: Vec::new(),
            payload: Map::new(),
        }
    }

    /// An asserted `lhs <= rhs`.
    pub fn inequality(check: &str, lhs: BigRational, rhs: BigRational) -> Self {
        let margin = &rhs - &lhs;
        let outcome = if margin >= BigRational::zero() { Outcome::Pass } else { Outcome::Finding };
        let mut v = Self::blank(check, Branch::GcdBound, outcome);
        v.lhs = Some(lhs.to_string());
        v.rhs = Some(rhs.to_string());
        v.margin = Some(margin.to_string());
        if outcome == Outcome::Finding {
            v.notes.push(format!("{check}: {lhs} <= {rhs} fails"));
        }
        v
    }

    /// An asserted identity whose sides have the given difference.
    pub fn identity(check: &str, lhs: impl Display, rhs: impl Display, difference: impl Display, holds: bool) -> Self {
        let outcome = if holds { Outcome::Pass } else { Outcome::Finding };
        let mut v = Self::blank(check, Branch::GcdBound, outcome);
        v.lhs = Some(lhs.to_string());
        v.rhs = Some(rhs.to_string());
        v.margin = Some(difference.to_string());
        if !holds {
            v.notes.push(format!("{check}: the two sides differ"));
        }
        v
    }

    /// The structural alternative of a statement, with nothing numeric
    /// asserted beyond what `assert_also` adds.
    pub fn relation(check: &str, reason: impl Into<String>) -> Self {
        let mut v = Self::blank(check, Branch::Relation, Outcome::Relation);
        v.notes.push(reason.into());
        v
    }

    pub fn unmet(check: &str, reason: impl Into<String>) -> Self {
        let mut v = Self::blank(check, Branch::PreconditionUnmet, Outcome::PreconditionUnmet);
        v.notes.push(reason.into());
        v
    }

    /// Records both sides of an inequality without asserting it.
    pub fn with_sides(mut self, lhs: &BigRational, rhs: &BigRational) -> Self {
        self.lhs = Some(lhs.to_string());
        self.rhs = Some(rhs.to_string());
        self.margin = Some((rhs - lhs).to_string());
        self
    }

    /// Moves an asserted verdict to the precondition-unmet branch, keeping
    /// the recorded sides for inspection.
    pub fn demote(mut self, reason: impl Into<String>) -> Self {
        self.branch = Branch::PreconditionUnmet;
        self.outcome = Outcome::PreconditionUnmet;
        self.notes.retain(|n| !n.ends_with("fails"));
        self.notes.push(reason.into());
        self
    }

    /// Moves the verdict to the relation branch.
    pub fn on_relation_branch(mut self, reason: impl Into<String>) -> Self {
        self.branch = Branch::Relation;
        if self.outcome != Outcome::Finding {
            self.outcome = Outcome::Relation;
        }
        self.notes.push(reason.into());
        self
    }

    /// Adds a further asserted fact; a false one turns the verdict into a
    /// finding.
    pub fn assert_also(mut self, name: &str, holds: bool) -> Self {
        self.payload.insert(format!("holds:{name}"), Value::Bool(holds));
        if !holds {
            self.outcome = Outcome::Finding;
            self.notes.push(format!("{name} fails"));
        }
        self
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.payload.insert(key.to_string(), value.into());
        self
    }

    pub fn note(mut self, text: impl Into<String>) -> Self {
        self.notes.push(text.into());
        self
    }

    pub fn with_instance(mut self, instance: Value) -> Self {
        self.instance = instance;
        self
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn is_finding(&self) -> bool {
        self.outcome == Outcome::Finding
    }

    /// The margin as an exact rational, when it is one.
    pub fn margin_value(&self) -> Option<BigRational> {
        self.margin.as_deref().and_then(parse_rational)
    }
}

pub fn parse_rational(s: &str) -> Option<BigRational> {
    s.parse::<BigRational>().ok()
}

pub fn int(v: impl Into<i64>) -> BigRational {
    BigRational::from_integer(v.into().into())
}

/// Counts per outcome over a report.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub pass: usize,
    pub relation: usize,
    #[serde(rename = "precondition-unmet")]
    pub precondition_unmet: usize,
    #[serde(rename = "FINDING")]
    pub finding: usize,
}

impl Summary {
    pub fn of<'a>(verdicts: impl IntoIterator<Item = &'a Verdict>) -> Self {
        let mut s = Summary::default();
        for v in verdicts {
            s.total += 1;
            match v.outcome {
                Outcome::Pass => s.pass += 1,
                Outcome::Relation => s.relation += 1,
                Outcome::PreconditionUnmet => s.precondition_unmet += 1,
                Outcome::Finding => s.finding += 1,
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn margins_are_exact() {
        let v = Verdict::inequality("x", "1/3".parse().unwrap(), "1/2".parse().unwrap());
        assert_eq!(v.margin.as_deref(), Some("1/6"));
        assert_eq!(v.outcome, Outcome::Pass);
        let v = Verdict::inequality("x", int(3), int(2));
        assert_eq!(v.margin_value(), Some(int(-1)));
        assert!(v.is_finding());
        let v = v.demote("below threshold");
        assert_eq!(v.outcome, Outcome::PreconditionUnmet);
        assert_eq!(v.margin.as_deref(), Some("-1"));
    }

    #[test]
    fn extra_assertions_turn_into_findings() {
        let v = Verdict::relation("r", "subsum").assert_also("height", true);
        assert_eq!(v.outcome, Outcome::Relation);
        let v = v.assert_also("other", false);
        assert!(v.is_finding());
        let s = Summary::of([&v, &Verdict::unmet("u", "cap exceeded")]);
        assert_eq!((s.total, s.finding, s.precondition_unmet), (2, 1, 1));
    }

    #[test]
    fn serialized_branch_names() {
        let json = serde_json::to_string(&Verdict::unmet("u", "x")).unwrap();
        assert!(json.contains("\"precondition-unmet\""));
        let json = serde_json::to_string(&Summary::default()).unwrap();
        assert!(json.contains("FINDING"));
    }
}
