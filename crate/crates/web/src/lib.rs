//! WebAssembly bindings for the demo page. Every entry point returns a
//! JSON string shaped like the matching `relcat --format json` output,
//! with an `error` field instead when the input is rejected.

use std::collections::BTreeMap;

use relcat::dsl;
use relcat::protocols::{self, DHInstance, EquationVerdict};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn status(all_hold: bool) -> i32 {
    if all_hold {
        0
    } else {
        1
    }
}

fn error(msg: impl ToString) -> String {
    json!({ "error": msg.to_string(), "status": 2 }).to_string()
}

/// Runs every `check` in a source text.
#[wasm_bindgen]
pub fn check_source(text: &str) -> String {
    match dsl::check_source(text) {
        Ok(reports) => {
            let code = dsl::exit_code(&reports);
            json!({ "checks": reports, "status": code }).to_string()
        }
        Err(e) => {
            let (line, col) = e.position();
            let mut v: Value = serde_json::from_str(&error(&e)).expect("valid json");
            v["line"] = json!(line);
            v["column"] = json!(col);
            v.to_string()
        }
    }
}

/// All pad checks on the additive group of order `n`.
#[wasm_bindgen]
pub fn verify_otp_group(n: usize) -> String {
    let inst = match protocols::group_instance(n) {
        Ok(i) => i,
        Err(e) => return error(e),
    };
    let vs = protocols::verify_all(&inst);
    let keyed: BTreeMap<&str, &EquationVerdict> = vs.iter().map(|v| (v.name.as_str(), v)).collect();
    json!({
        "instance": format!("group {n}"),
        "sizes": [n, n, n],
        "verdicts": keyed,
        "status": status(vs.iter().all(|v| v.holds)),
    })
    .to_string()
}

/// Key exchange in the cyclic group of prime order `q`.
#[wasm_bindgen]
pub fn verify_dh(q: usize, include_identity: bool) -> String {
    let mut dh = match DHInstance::new(q) {
        Ok(d) => d,
        Err(e) => return error(e),
    };
    if include_identity {
        dh = dh.including_identity();
    }
    let v = protocols::check_dh(&dh);
    json!({
        "prime": q,
        "bases": dh.base_set,
        "status": status(v.holds),
        "verdict": v,
    })
    .to_string()
}

/// The single-bit pad written in the term language, used as the page's
/// starting text.
#[wasm_bindgen]
pub fn example_source() -> String {
    EXAMPLE.to_string()
}

const EXAMPLE: &str = "\
# one-bit pad: E adds key to plaintext, D subtracts it again
set P = 2
set K = 2
set C = 2
gen E : P . K -> [C] = {(0, 0) -> 0, (0, 1) -> 1, (1, 0) -> 1, (1, 1) -> 0}
builtin D = controlled(C, K, P, {0: {0 -> 0, 1 -> 1}, 1: {0 -> 1, 1 -> 0}})
def lhs = (id(P) . cup(K)) ; (E . id(K)) ; (left(C) . D)
check correctness: lhs == create_region(C) . id(P)
check S2: (id(P) . create(K)) ; E == delete(P) . create_region(C)
";

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn example_passes() {
        let v = parse(&check_source(&example_source()));
        assert_eq!(v["status"], 0, "{v}");
        assert_eq!(v["checks"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let v = parse(&check_source("set K = 2\ndef = ;"));
        assert_eq!(v["status"], 2);
        assert_eq!((v["line"].as_u64(), v["column"].as_u64()), (Some(2), Some(5)));
    }

    #[test]
    fn pad_and_exchange() {
        assert_eq!(parse(&verify_otp_group(3))["status"], 0);
        assert_eq!(parse(&verify_otp_group(0))["status"], 2);
        assert_eq!(parse(&verify_dh(5, false))["status"], 0);
        let bad = parse(&verify_dh(5, true));
        assert_eq!(bad["status"], 1);
        assert_eq!(bad["verdict"]["witness"]["base"], 0);
        assert_eq!(parse(&verify_dh(4, false))["status"], 2);
    }
}
