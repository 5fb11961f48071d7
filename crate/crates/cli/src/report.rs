//! The JSON run report every subcommand emits: a fixed envelope with an echo
//! of the inputs, the computed outputs, and machine-readable diagnostics.
//! Field order is fixed by the struct layout and `serde_json::Value` maps are
//! key-sorted, so reports are byte-identical for identical inputs.

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub inputs: Value,
    pub outputs: Value,
    pub diagnostics: Diagnostics,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

#[derive(Serialize, Default)]
pub struct Diagnostics {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gauss_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coupling_margin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fitted_a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fitted_q: Option<f64>,
    pub warnings: Vec<Warning>,
}

#[derive(Serialize)]
pub struct Warning {
    pub code: &'static str,
    pub message: String,
}

#[derive(Serialize)]
pub struct Timings {
    pub total_ms: f64,
}

impl Report {
    pub fn new(command: &str, inputs: Value, outputs: Value, diagnostics: Diagnostics) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            inputs,
            outputs,
            diagnostics,
            timings: None,
        }
    }

    pub fn render(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serialization");
        text.push('\n');
        text
    }
}

impl Diagnostics {
    pub fn warn(&mut self, code: &'static str, message: String) {
        self.warnings.push(Warning { code, message });
    }
}

/// Complex scalar as a `[re, im]` pair.
pub fn cjson(z: Complex64) -> Value {
    json!([z.re, z.im])
}

pub fn vjson(v: &Vector3<f64>) -> Value {
    json!([v.x, v.y, v.z])
}

pub fn cvecjson(v: &Vector3<Complex64>) -> Value {
    json!([cjson(v.x), cjson(v.y), cjson(v.z)])
}

pub fn tensorjson(t: &sbs_core::Tensor3) -> Value {
    Value::Array(
        (0..3)
            .map(|i| Value::Array((0..3).map(|j| json!(t[(i, j)])).collect()))
            .collect(),
    )
}
