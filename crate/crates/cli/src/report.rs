//! The JSON envelope printed by every subcommand except `export`.

use std::collections::BTreeMap;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

/// Inputs and caps recorded while a command runs.
#[derive(Default)]
pub struct Context {
    inputs: BTreeMap<String, Value>,
    caps: BTreeMap<String, Value>,
}

impl Context {
    /// Records the source string and the SHA-256 of the bytes read from it.
    pub fn input(&mut self, key: &str, source: &str, bytes: &[u8]) {
        let digest = hex::encode(Sha256::digest(bytes));
        self.inputs.insert(key.to_string(), json!({ "source": source, "sha256": digest }));
    }

    pub fn cap(&mut self, key: &str, value: Value) {
        self.caps.insert(key.to_string(), value);
    }
}

/// What a command found: the verdict, its data, and a witness when a check failed.
pub struct Outcome {
    pub passed: bool,
    pub result: Value,
    pub witness: Option<Value>,
    /// Printed verbatim instead of the envelope.
    pub raw: Option<String>,
}

impl Outcome {
    pub fn ok(result: Value) -> Self {
        Outcome { passed: true, result, witness: None, raw: None }
    }

    pub fn check(passed: bool, result: Value, witness: Option<Value>) -> Self {
        Outcome { passed, result, witness, raw: None }
    }

    pub fn raw(text: String) -> Self {
        Outcome { passed: true, result: Value::Null, witness: None, raw: Some(text) }
    }
}

/// Keys are sorted, so equal inputs print equal bytes.
pub fn render(command: &[String], ctx: Context, out: &Outcome) -> String {
    let report = json!({
        "command": command,
        "inputs": ctx.inputs,
        "caps": ctx.caps,
        "verdict": if out.passed { "pass" } else { "fail" },
        "result": out.result,
        "witness": out.witness,
    });
    serde_json::to_string_pretty(&report).expect("plain data serializes") + "\n"
}
