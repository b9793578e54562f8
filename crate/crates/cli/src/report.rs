//! The JSON report shared by all commands, and float formatting.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::{CompactFormatter, Formatter};
use serde_json::Value;

use crate::config::RunConfig;

/// Outcome of a command; determines the exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Pass,
    Fail,
    NotApplicable,
    NoVerdict,
    Computed,
    ReachedRmax,
    HitFloor,
    StepFailure,
}

impl Outcome {
    pub fn exit_code(self) -> u8 {
        match self {
            Outcome::Pass | Outcome::Computed | Outcome::ReachedRmax | Outcome::HitFloor => 0,
            Outcome::Fail | Outcome::StepFailure => 1,
            Outcome::NotApplicable | Outcome::NoVerdict => 3,
        }
    }
}

impl From<gradest::verify::Verdict> for Outcome {
    fn from(v: gradest::verify::Verdict) -> Self {
        use gradest::verify::Verdict;
        match v {
            Verdict::Pass => Outcome::Pass,
            Verdict::Fail => Outcome::Fail,
            Verdict::NotApplicable => Outcome::NotApplicable,
            Verdict::NoVerdict => Outcome::NoVerdict,
        }
    }
}

impl From<gradest::solver::Termination> for Outcome {
    fn from(t: gradest::solver::Termination) -> Self {
        use gradest::solver::Termination;
        match t {
            Termination::ReachedRmax => Outcome::ReachedRmax,
            Termination::HitFloor => Outcome::HitFloor,
            Termination::StepFailure => Outcome::StepFailure,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Report<'a> {
    pub command: &'static str,
    pub config: &'a RunConfig,
    pub inputs: Value,
    pub hypotheses: Value,
    pub bound: Value,
    pub statistic: Value,
    pub margin: Option<f64>,
    pub verdict: Outcome,
}

impl<'a> Report<'a> {
    pub fn new(
        command: &'static str,
        config: &'a RunConfig,
        inputs: Value,
        verdict: Outcome,
    ) -> Self {
        Report {
            command,
            config,
            inputs,
            hypotheses: Value::Null,
            bound: Value::Null,
            statistic: Value::Null,
            margin: None,
            verdict,
        }
    }
}

/// Compact JSON with every float written to 17 significant digits.
struct Precise(CompactFormatter);

impl Formatter for Precise {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{}", fmt_f64(value))
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

pub fn fmt_f64(value: f64) -> String {
    format!("{value:.16e}")
}

pub fn to_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Precise(CompactFormatter));
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(out).expect("serde_json writes UTF-8"))
}

/// Embed a serializable value in a report.
pub fn value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}
