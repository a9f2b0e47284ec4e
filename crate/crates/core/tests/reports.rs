use parsearch_core::harness::{
    run_adversary_check, run_bound_table, run_maxload_check, run_search_experiment, BoundsCell,
    MaxloadConfig,
};
use parsearch_core::{ExperimentConfig, Fallback, Filler, Format, Report};

fn schema() -> jsonschema::Validator {
    let text = include_str!("../schema/report.schema.json");
    jsonschema::validator_for(&serde_json::from_str(text).unwrap()).unwrap()
}

fn reports() -> Vec<Report> {
    let mut zero = ExperimentConfig::new(8, 4, 3, 5, 2);
    zero.filler = Filler::Zero;
    zero.fallback = Fallback::Unknown;
    zero.t = Some(2);
    vec![
        Report::Search(run_search_experiment(&ExperimentConfig::new(8, 2, 2, 4, 1)).unwrap()),
        Report::Search(run_search_experiment(&zero).unwrap()),
        Report::Maxload(
            run_maxload_check(&MaxloadConfig {
                n: 8,
                d: 4,
                k: 8,
                t: 3,
                trials: 500,
                seed: 0,
            })
            .unwrap(),
        ),
        Report::Bounds(run_bound_table(&[BoundsCell { n: 8, d: 2, k: 4 }], 3, 0).unwrap()),
        Report::Bounds(run_bound_table(&[], 3, 0).unwrap()),
        Report::Adversary(run_adversary_check(2, 2, 2, 2).unwrap()),
    ]
}

#[test]
fn json_reports_validate_against_schema() {
    let validator = schema();
    for report in reports() {
        let value: serde_json::Value =
            serde_json::from_slice(&report.to_bytes(Format::Json).unwrap()).unwrap();
        let errors: Vec<String> = validator
            .iter_errors(&value)
            .map(|e| e.to_string())
            .collect();
        assert!(errors.is_empty(), "{errors:?}\n{value:#}");
        assert_eq!(value["spec_version"], "1.0");
    }
}

#[test]
fn reports_are_seed_deterministic() {
    let a: Vec<Vec<u8>> = reports()
        .iter()
        .map(|r| r.to_bytes(Format::Json).unwrap())
        .collect();
    let b: Vec<Vec<u8>> = reports()
        .iter()
        .map(|r| r.to_bytes(Format::Json).unwrap())
        .collect();
    assert_eq!(a, b);
    let other = run_search_experiment(&ExperimentConfig::new(8, 2, 2, 4, 2)).unwrap();
    assert_ne!(Report::Search(other).to_bytes(Format::Json).unwrap(), a[0]);
}

#[test]
fn csv_has_header_and_aggregate_rows() {
    for report in reports() {
        let text = String::from_utf8(report.to_bytes(Format::Csv).unwrap()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        let expected_rows = match &report {
            Report::Bounds(b) => b.rows.len(),
            _ => 1,
        };
        assert_eq!(lines.len(), expected_rows + 1, "{text}");
        let width = lines[0].split(',').count();
        assert!(lines.iter().all(|l| l.split(',').count() == width));
    }
}
