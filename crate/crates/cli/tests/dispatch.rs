//! The order dispatcher must agree with the shipped fixture tables.

use std::str::FromStr;

use netput_eff_cli::commands::{measure_name, rule_labels};
use netput_eff_core::PParameter;

#[test]
fn dispatcher_matches_fixture_tables() {
    let text = include_str!("fixtures/dispatch_tables.json");
    let fixture: serde_json::Value = serde_json::from_str(text).unwrap();

    for row in fixture["measures"].as_array().unwrap() {
        let p = PParameter::from_str(row["p"].as_str().unwrap()).unwrap();
        assert_eq!(measure_name(p), row["measure"].as_str().unwrap(), "measure row {row}");
    }

    for row in fixture["dual_dispatch"].as_array().unwrap() {
        let p = PParameter::from_str(row["p"].as_str().unwrap()).unwrap();
        let (criterion, normalization, convexity) = rule_labels(p);
        assert_eq!(criterion, row["criterion"].as_str().unwrap(), "criterion row {row}");
        assert_eq!(
            normalization,
            row["normalization"].as_str().unwrap(),
            "normalization row {row}"
        );
        assert_eq!(convexity, row["convexity"].as_bool().unwrap(), "convexity row {row}");
    }
}
