use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::numerics::{Index, NumericMode};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    /// Only for statements about limits, when the finite evidence is ambiguous.
    Inconclusive,
    /// The check's hypothesis does not hold for the subject, or it could not be evaluated.
    Skipped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
            Status::Skipped => "skipped",
        })
    }
}

/// Where a worst margin was observed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Witness {
    At(Index),
    Pair(Index, Index),
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::At(n) => write!(f, "{n}"),
            Witness::Pair(m, n) => write!(f, "{m}:{n}"),
        }
    }
}

/// Running minimum of normalized slacks. Positive margins mean the inequality
/// holds with room to spare.
#[derive(Clone, Debug)]
pub struct Tally {
    worst: f64,
    witness: Option<Witness>,
    count: u64,
    strict_failure: bool,
}

impl Default for Tally {
    fn default() -> Self {
        Tally { worst: f64::INFINITY, witness: None, count: 0, strict_failure: false }
    }
}

impl Tally {
    pub fn observe(&mut self, margin: f64, witness: Witness) {
        self.count += 1;
        let margin = if margin.is_nan() { f64::NEG_INFINITY } else { margin };
        if margin < self.worst || self.witness.is_none() {
            self.worst = margin;
            self.witness = Some(witness);
        }
    }

    /// A strict inequality: in exact arithmetic a zero margin already fails.
    pub fn observe_strict(&mut self, margin: f64, witness: Witness, mode: NumericMode) {
        if mode == NumericMode::Rational && margin <= 0.0 {
            self.strict_failure = true;
        }
        self.observe(margin, witness);
    }

    pub fn merge(&mut self, other: &Tally) {
        self.count += other.count;
        self.strict_failure |= other.strict_failure;
        if other.worst < self.worst || (self.witness.is_none() && other.witness.is_some()) {
            self.worst = other.worst;
            self.witness = other.witness.clone();
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn worst(&self) -> Option<f64> {
        (self.count > 0).then_some(self.worst)
    }

    pub fn witness(&self) -> Option<&Witness> {
        self.witness.as_ref()
    }

    pub fn status(&self, tol: f64) -> Status {
        if self.count == 0 {
            Status::Skipped
        } else if self.strict_failure || self.worst < -tol {
            Status::Fail
        } else {
            Status::Pass
        }
    }
}

/// A named sub-statement of a check, optionally indexed by construction stage.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Property {
    pub name: String,
    pub status: Status,
    pub worst_margin: Option<f64>,
    pub witness: Option<Witness>,
    pub sample_count: u64,
    /// Smallest stage from which the property holds at every built stage.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k0: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Property {
    pub fn from_tally(name: &str, tally: &Tally, tol: f64) -> Property {
        Property {
            name: name.into(),
            status: tally.status(tol),
            worst_margin: tally.worst(),
            witness: tally.witness().cloned(),
            sample_count: tally.count(),
            k0: None,
            note: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_id: String,
    pub subject: String,
    pub status: Status,
    pub worst_margin: Option<f64>,
    pub witness: Option<Witness>,
    pub sample_count: u64,
    pub horizon: Index,
    pub numeric_mode: NumericMode,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub properties: Vec<Property>,
    /// Measured constants (bands, ratios, thresholds).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub measurements: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn new(check_id: &str, subject: &str, horizon: Index, mode: NumericMode) -> Self {
        CheckReport {
            check_id: check_id.into(),
            subject: subject.into(),
            status: Status::Skipped,
            worst_margin: None,
            witness: None,
            sample_count: 0,
            horizon,
            numeric_mode: mode,
            properties: Vec::new(),
            measurements: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    /// Overall fields from the properties: fail if any fails, skipped if all skip,
    /// inconclusive if any is inconclusive and none fails.
    pub fn finish(mut self) -> Self {
        let mut tally = Tally::default();
        for p in &self.properties {
            if let (Some(m), Some(w)) = (p.worst_margin, &p.witness) {
                tally.observe(m, w.clone());
            }
        }
        self.worst_margin = tally.worst();
        self.witness = tally.witness().cloned();
        self.sample_count = self.properties.iter().map(|p| p.sample_count).sum();
        let statuses: Vec<Status> = self.properties.iter().map(|p| p.status).collect();
        self.status = if statuses.contains(&Status::Fail) {
            Status::Fail
        } else if statuses.contains(&Status::Inconclusive) {
            Status::Inconclusive
        } else if statuses.iter().all(|s| *s == Status::Skipped) {
            Status::Skipped
        } else {
            Status::Pass
        };
        self
    }

    pub fn skipped(check_id: &str, subject: &str, horizon: Index, mode: NumericMode, note: String) -> Self {
        let mut r = CheckReport::new(check_id, subject, horizon, mode);
        r.notes.push(note);
        r
    }

    pub fn measure(&mut self, key: &str, value: f64) {
        self.measurements.insert(key.into(), value);
    }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    check_id: &'a str,
    subject: &'a str,
    property: &'a str,
    status: Status,
    worst_margin: Option<f64>,
    witness: String,
    sample_count: u64,
    k0: Option<u64>,
    horizon: String,
    numeric_mode: NumericMode,
}

/// Reports as a JSON array.
pub fn reports_to_json(reports: &[CheckReport]) -> String {
    serde_json::to_string_pretty(reports).expect("reports serialize")
}

/// One CSV row per report and one per property (with the property column set).
pub fn reports_to_csv(reports: &[CheckReport]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in reports {
        let horizon = r.horizon.to_string();
        let witness = |w: &Option<Witness>| w.as_ref().map(ToString::to_string).unwrap_or_default();
        w.serialize(CsvRow {
            check_id: &r.check_id,
            subject: &r.subject,
            property: "",
            status: r.status,
            worst_margin: r.worst_margin,
            witness: witness(&r.witness),
            sample_count: r.sample_count,
            k0: None,
            horizon: horizon.clone(),
            numeric_mode: r.numeric_mode,
        })
        .expect("csv row");
        for p in &r.properties {
            w.serialize(CsvRow {
                check_id: &r.check_id,
                subject: &r.subject,
                property: &p.name,
                status: p.status,
                worst_margin: p.worst_margin,
                witness: witness(&p.witness),
                sample_count: p.sample_count,
                k0: p.k0,
                horizon: horizon.clone(),
                numeric_mode: r.numeric_mode,
            })
            .expect("csv row");
        }
    }
    String::from_utf8(w.into_inner().expect("csv flush")).expect("utf8 csv")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tally_status() {
        let mut t = Tally::default();
        assert_eq!(t.status(1e-9), Status::Skipped);
        t.observe(0.5, Witness::At(Index::new(3)));
        t.observe(-1e-12, Witness::At(Index::new(7)));
        assert_eq!(t.status(1e-9), Status::Pass);
        assert_eq!(t.status(0.0), Status::Fail);
        assert_eq!(t.witness(), Some(&Witness::At(Index::new(7))));
        let mut s = Tally::default();
        s.observe_strict(0.0, Witness::At(Index::new(1)), NumericMode::Rational);
        assert_eq!(s.status(0.0), Status::Fail);
        let mut s = Tally::default();
        s.observe_strict(0.0, Witness::At(Index::new(1)), NumericMode::Log);
        assert_eq!(s.status(1e-9), Status::Pass);
    }

    #[test]
    fn output_formats() {
        let mut r = CheckReport::new("x", "omega", Index::new(10), NumericMode::Log);
        let mut t = Tally::default();
        t.observe(0.25, Witness::Pair(Index::new(2), Index::new(4)));
        r.properties.push(Property::from_tally("p", &t, 1e-9));
        let r = r.finish();
        assert_eq!(r.status, Status::Pass);
        let json = reports_to_json(std::slice::from_ref(&r));
        assert!(json.contains("\"2\""));
        let back: Vec<CheckReport> = serde_json::from_str(&json).unwrap();
        assert_eq!(back[0], r);
        let csv = reports_to_csv(&[r]);
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.contains("2:4"));
    }
}
