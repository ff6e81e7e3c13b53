//! Line-delimited JSON report records.
//!
//! Every record carries `"schema": "speclab.report/v1"` and a `"record"`
//! discriminator. Wall-clock data appears only in fields named `elapsed_ms`.

use std::io::{self, Write};

use serde_json::{json, Value};
use speclab_core::analysis::{BcVerdict, FailureReason, Likelihood};
use speclab_core::filters::{BcEntry, FilterStep};

pub const SCHEMA: &str = "speclab.report/v1";

#[derive(Debug, Default)]
pub struct Report {
    records: Vec<Value>,
}

impl Report {
    pub fn push(&mut self, kind: &str, body: Value) {
        let mut rec = json!({ "schema": SCHEMA, "record": kind });
        if let (Value::Object(dst), Value::Object(src)) = (&mut rec, body) {
            dst.extend(src);
        }
        self.records.push(rec);
    }

    pub fn run(&mut self, command: &str, spec: &str, config: Value) {
        self.push(
            "run",
            json!({ "command": command, "spec": spec, "config": config }),
        );
    }

    pub fn edge(&mut self, kind: &str, from: &str, to: &str) {
        self.push("edge", json!({ "kind": kind, "from": from, "to": to }));
    }

    pub fn filter_steps(&mut self, stage: &str, steps: &[FilterStep]) {
        for (i, s) in steps.iter().enumerate() {
            let mut body = serde_json::to_value(s).expect("serializable step");
            body["stage"] = json!(stage);
            body["index"] = json!(i);
            self.push("filter-step", body);
        }
    }

    pub fn write_to(&self, out: &mut dyn Write) -> io::Result<()> {
        for r in &self.records {
            serde_json::to_writer(&mut *out, r)?;
            out.write_all(b"\n")?;
        }
        out.flush()
    }
}

pub fn verdict_json(v: &BcVerdict, goal_ids: &[String]) -> Value {
    let failure = v.failure.map(|f| match f {
        FailureReason::Inconsistency => "inconsistency".to_string(),
        FailureReason::Minimality(i) => format!("minimality:{}", goal_ids[i]),
        FailureReason::Triviality => "triviality".to_string(),
    });
    json!({
        "is_bc": v.is_bc,
        "inconsistency": v.inconsistency,
        "minimality": v.minimality.iter().map(|m| m.holds).collect::<Vec<_>>(),
        "non_triviality": v.non_triviality,
        "failure": failure,
    })
}

pub fn likelihood_json(l: &Likelihood) -> Value {
    json!({
        "numerator": l.numerator.to_string(),
        "denominator": l.denominator.to_string(),
        "value": l.value(),
        "k": l.k,
        "interpretation": l.interpretation.tag(),
    })
}

pub fn entry_json(e: &BcEntry) -> Value {
    json!({
        "id": e.id.0,
        "formula": e.formula.to_string(),
        "size": e.formula.size(),
        "source": e.provenance.source,
        "iteration": e.provenance.iteration,
    })
}

/// 1-based ranks: descending likelihood, then ascending size, then id.
/// Returns one rank per input, in input order.
pub fn rank(items: &[(&BcEntry, &Likelihood)]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by(|&a, &b| {
        let (ea, la) = items[a];
        let (eb, lb) = items[b];
        lb.cmp(la)
            .then(ea.formula.size().cmp(&eb.formula.size()))
            .then_with(|| ea.id.cmp(&eb.id))
    });
    let mut ranks = vec![0; items.len()];
    for (pos, &i) in order.iter().enumerate() {
        ranks[i] = pos + 1;
    }
    ranks
}
