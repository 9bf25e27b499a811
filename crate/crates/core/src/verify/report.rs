use std::collections::BTreeMap;

/// One bounded quantity. `margin` is the slack to the bound, so a check
/// passes exactly when `margin ≥ 0`; tolerances are folded into `limit`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    pub limit: f64,
    pub margin: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self::build(name.into(), value, Relation::AtMost, limit)
    }

    pub fn at_least(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self::build(name.into(), value, Relation::AtLeast, limit)
    }

    fn build(name: String, value: f64, relation: Relation, limit: f64) -> Self {
        let margin = match relation {
            Relation::AtMost => limit - value,
            Relation::AtLeast => value - limit,
        };
        // NaN compares false, so a NaN value fails.
        let pass = margin >= 0.0;
        Check {
            name,
            value,
            relation,
            limit,
            margin: if margin.is_nan() { f64::NEG_INFINITY } else { margin },
            pass,
        }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct EqualityCase {
    pub label: String,
    pub gap: f64,
}

/// Outcome of one verification suite.
///
/// Hypotheses are checked quantities like any other: a violated hypothesis
/// fails the report. `informational` entries are recorded but do not count.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct TheoremReport {
    pub name: String,
    pub pass: bool,
    pub worst_margin: f64,
    pub samples: usize,
    /// Samples dropped because the convexity guard or an embedding rejected them.
    pub skipped: usize,
    pub tolerances: BTreeMap<String, f64>,
    pub hypotheses: Vec<Check>,
    pub checks: Vec<Check>,
    pub informational: Vec<Check>,
    pub equality_cases: Vec<EqualityCase>,
    pub series: BTreeMap<String, Vec<f64>>,
    pub notes: Vec<String>,
}

impl TheoremReport {
    pub fn new(name: impl Into<String>) -> Self {
        TheoremReport {
            name: name.into(),
            pass: true,
            worst_margin: f64::INFINITY,
            samples: 0,
            skipped: 0,
            tolerances: BTreeMap::new(),
            hypotheses: Vec::new(),
            checks: Vec::new(),
            informational: Vec::new(),
            equality_cases: Vec::new(),
            series: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn tolerance(&mut self, name: &str, value: f64) -> &mut Self {
        self.tolerances.insert(name.to_string(), value);
        self
    }

    pub fn hypothesis(&mut self, c: Check) -> &mut Self {
        self.hypotheses.push(c);
        self.refresh();
        self
    }

    pub fn check(&mut self, c: Check) -> &mut Self {
        self.checks.push(c);
        self.refresh();
        self
    }

    pub fn info(&mut self, c: Check) -> &mut Self {
        self.informational.push(c);
        self
    }

    pub fn find(&self, name: &str) -> Option<&Check> {
        self.hypotheses
            .iter()
            .chain(&self.checks)
            .chain(&self.informational)
            .find(|c| c.name == name)
    }

    fn refresh(&mut self) {
        self.worst_margin = self
            .hypotheses
            .iter()
            .chain(&self.checks)
            .map(|c| c.margin)
            .fold(f64::INFINITY, f64::min);
        self.pass = self.hypotheses.iter().chain(&self.checks).all(|c| c.pass);
    }
}
