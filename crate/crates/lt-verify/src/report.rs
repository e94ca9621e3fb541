//! NDJSON check records and the run summary.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::io::Write;

use lt_core::padic::EXACT;
use serde::Serialize;
use serde_json::Value;

use crate::config::Suite;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

/// Proof-grade failures fail the run; evidence-grade ones are reported only.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Grade {
    Proof,
    Evidence,
}

/// `certified` is the least certified valuation of the defect, `None` when the
/// defect is an exact zero.  The check passes iff `certified >= target - budget`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Precision {
    pub target: u32,
    pub budget: i32,
    pub certified: Option<i32>,
    /// realized loss `max(0, target - certified)`
    pub loss: i32,
}

impl Precision {
    pub fn new(target: u32, budget: i32, t: i32) -> Self {
        let certified = (t < EXACT / 2).then_some(t);
        let loss = certified.map_or(0, |t| (target as i32 - t).max(0));
        Precision { target, budget, certified, loss }
    }

    pub fn holds(&self) -> bool {
        self.loss <= self.budget
    }
}

pub type Params = BTreeMap<String, Value>;

#[derive(Clone, Debug, Serialize)]
pub struct Record {
    pub suite: Suite,
    pub name: String,
    pub params: Params,
    pub status: Status,
    pub grade: Grade,
    pub precision: Option<Precision>,
    pub details: Value,
    pub wall_ms: u64,
}

impl Record {
    pub fn new(suite: Suite, name: &str, params: Params) -> Self {
        Record {
            suite,
            name: name.to_string(),
            params,
            status: Status::Pass,
            grade: Grade::Proof,
            precision: None,
            details: Value::Object(Default::default()),
            wall_ms: 0,
        }
    }

    pub fn evidence(mut self) -> Self {
        self.grade = Grade::Evidence;
        self
    }

    /// Pass iff the defect valuation `t` meets `target - budget`.
    pub fn graded(mut self, target: u32, budget: i32, t: i32) -> Self {
        let pr = Precision::new(target, budget, t);
        self.status = if pr.holds() { Status::Pass } else { Status::Fail };
        self.precision = Some(pr);
        self
    }

    pub fn verdict(mut self, ok: bool) -> Self {
        self.status = if ok { Status::Pass } else { Status::Fail };
        self
    }

    pub fn status(mut self, s: Status) -> Self {
        self.status = s;
        self
    }

    pub fn detail(mut self, key: &str, v: impl Serialize) -> Self {
        let v = serde_json::to_value(v).expect("details serialize");
        if let Value::Object(m) = &mut self.details {
            m.insert(key.to_string(), v);
        }
        self
    }

    pub fn fails_run(&self) -> bool {
        self.status == Status::Fail && self.grade == Grade::Proof
    }

    fn key(&self) -> (usize, &str, &Params) {
        let i = Suite::ALL.iter().position(|s| *s == self.suite).unwrap_or(usize::MAX);
        (i, &self.name, &self.params)
    }
}

fn cmp_value(a: &Value, b: &Value) -> Ordering {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => {
            let (x, y) = (x.as_f64().unwrap_or(0.0), y.as_f64().unwrap_or(0.0));
            x.partial_cmp(&y).unwrap_or(Ordering::Equal)
        }
        (Value::String(x), Value::String(y)) => x.cmp(y),
        _ => a.to_string().cmp(&b.to_string()),
    }
}

fn cmp_params(a: &Params, b: &Params) -> Ordering {
    for ((ka, va), (kb, vb)) in a.iter().zip(b) {
        let o = ka.cmp(kb).then_with(|| cmp_value(va, vb));
        if o != Ordering::Equal {
            return o;
        }
    }
    a.len().cmp(&b.len())
}

/// Order by `(suite, check, params)`, numbers compared numerically.
pub fn sort_records(rs: &mut [Record]) {
    rs.sort_by(|a, b| {
        let (sa, na, pa) = a.key();
        let (sb, nb, pb) = b.key();
        sa.cmp(&sb).then_with(|| na.cmp(nb)).then_with(|| cmp_params(pa, pb))
    });
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub name: &'static str,
    pub total: usize,
    pub pass: usize,
    pub fail: usize,
    pub inconclusive: usize,
    pub proof_failures: usize,
    pub exit_code: i32,
    pub wall_ms: u64,
}

impl Summary {
    pub fn of(rs: &[Record], wall_ms: u64) -> Self {
        let count = |s: Status| rs.iter().filter(|r| r.status == s).count();
        let proof_failures = rs.iter().filter(|r| r.fails_run()).count();
        Summary {
            name: "summary",
            total: rs.len(),
            pass: count(Status::Pass),
            fail: count(Status::Fail),
            inconclusive: count(Status::Inconclusive),
            proof_failures,
            exit_code: if proof_failures == 0 { 0 } else { 1 },
            wall_ms,
        }
    }
}

pub fn write_ndjson(out: &mut impl Write, rs: &[Record], summary: &Summary) -> std::io::Result<()> {
    for r in rs {
        serde_json::to_writer(&mut *out, r)?;
        out.write_all(b"\n")?;
    }
    serde_json::to_writer(&mut *out, summary)?;
    out.write_all(b"\n")?;
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn params(k: i64) -> Params {
        [("k".to_string(), json!(k)), ("p".to_string(), json!(5))].into_iter().collect()
    }

    #[test]
    fn precision_rule() {
        let r = Record::new(Suite::Core, "x", params(1)).graded(10, 2, 8);
        assert_eq!(r.status, Status::Pass);
        assert_eq!(r.precision.unwrap().loss, 2);
        let r = Record::new(Suite::Core, "x", params(1)).graded(10, 2, 7);
        assert_eq!(r.status, Status::Fail);
        let r = Record::new(Suite::Core, "x", params(1)).graded(10, 0, EXACT);
        assert_eq!(r.precision.unwrap().certified, None);
        assert_eq!(r.status, Status::Pass);
    }

    #[test]
    fn order_is_numeric_in_params() {
        let mut rs = vec![
            Record::new(Suite::Lattice, "a", params(1)),
            Record::new(Suite::Core, "b", params(10)),
            Record::new(Suite::Core, "b", params(2)),
            Record::new(Suite::Core, "a", params(3)),
        ];
        sort_records(&mut rs);
        let got: Vec<(&str, i64)> = rs.iter().map(|r| (r.name.as_str(), r.params["k"].as_i64().unwrap())).collect();
        assert_eq!(got, vec![("a", 3), ("b", 2), ("b", 10), ("a", 1)]);
    }

    #[test]
    fn evidence_failures_do_not_fail_the_run() {
        let rs = vec![
            Record::new(Suite::Lattice, "attain", params(2)).evidence().verdict(false),
            Record::new(Suite::Lattice, "contain", params(2)).verdict(true),
        ];
        let s = Summary::of(&rs, 0);
        assert_eq!((s.fail, s.proof_failures, s.exit_code), (1, 0, 0));
        let mut buf = Vec::new();
        write_ndjson(&mut buf, &rs, &s).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.lines().last().unwrap().contains("\"exit_code\":0"));
    }
}
