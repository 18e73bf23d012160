//! Machine-readable run reports shared between the library and the CLI.
//!
//! Every extended-precision value is serialized as a decimal string, never a
//! binary float, so reports compare across runs and platforms.

use rug::Float;
use serde::{Deserialize, Serialize};

/// Full-precision decimal rendering of a Float (round-trippable at the
/// original mantissa size).
pub fn decimal_string(x: &Float) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x.is_sign_positive() {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    // digits to represent `prec` bits faithfully
    let digits = (x.prec() as f64 * std::f64::consts::LOG10_2).ceil() as usize + 2;
    x.to_string_radix(10, Some(digits))
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct CaseRecord {
    pub id: String,
    /// Inputs that make the case replayable (seed-independent parameters).
    pub inputs: serde_json::Value,
    /// Named computed quantities as decimal strings.
    pub computed: serde_json::Value,
    /// Named bounds the case checked against.
    pub bounds: serde_json::Value,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub millis: u128,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct Report {
    pub suite: String,
    pub precision_bits: u32,
    pub grid: usize,
    pub seed: u64,
    pub cases: Vec<CaseRecord>,
    pub passed: usize,
    pub failed: usize,
    pub toolchain: String,
}

impl Report {
    pub fn new(suite: &str, precision_bits: u32, grid: usize, seed: u64) -> Self {
        Report {
            suite: suite.to_string(),
            precision_bits,
            grid,
            seed,
            cases: Vec::new(),
            passed: 0,
            failed: 0,
            toolchain: format!("szegolab {}", env!("CARGO_PKG_VERSION")),
        }
    }

    pub fn push(&mut self, case: CaseRecord) {
        if case.pass {
            self.passed += 1;
        } else {
            self.failed += 1;
        }
        self.cases.push(case);
    }

    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }

    /// Flat per-case table: suite, case id, value, bound, pass.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("suite,case,value,bound,pass\n");
        for c in &self.cases {
            let value = first_scalar(&c.computed).unwrap_or_default();
            let bound = first_scalar(&c.bounds).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                self.suite, c.id, value, bound, c.pass
            ));
        }
        out
    }
}

fn first_scalar(v: &serde_json::Value) -> Option<String> {
    match v {
        serde_json::Value::Object(map) => map.values().next().and_then(first_scalar),
        serde_json::Value::String(s) => Some(s.clone()),
        serde_json::Value::Number(n) => Some(n.to_string()),
        serde_json::Value::Bool(b) => Some(b.to_string()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::PrecisionContext;

    #[test]
    fn decimal_string_roundtrips_at_precision() {
        let ctx = PrecisionContext::new(256);
        let x = ctx.real(2.0).sqrt() * ctx.real(1e-30);
        let s = decimal_string(&x);
        let back = Float::with_val(256, Float::parse(&s).unwrap());
        let diff = (back - &x).abs();
        assert!(diff <= ctx.eps() * x.clone().abs() * 8u32);
    }

    #[test]
    fn csv_has_one_row_per_case() {
        let mut r = Report::new("demo", 256, 1 << 14, 7);
        r.push(CaseRecord {
            id: "a".into(),
            inputs: serde_json::json!({}),
            computed: serde_json::json!({"v": "1.5"}),
            bounds: serde_json::json!({"b": "2"}),
            pass: true,
            error: None,
            millis: 1,
        });
        let csv = r.to_csv();
        assert_eq!(csv.lines().count(), 2);
        assert!(csv.contains("demo,a,1.5,2,true"));
    }
}
