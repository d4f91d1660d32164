use proptest::prelude::*;
use steering::qubit::{NoClickPolicy, PauliString};
use steering::report::RunReport;
use steering::scenarios::{parse_grid, SweepConfig};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn pauli_parser_never_panics(s in "\\PC{0,20}") {
        if let Ok(p) = s.parse::<PauliString>() {
            prop_assert_eq!(p.to_string().parse::<PauliString>().unwrap(), p);
        }
    }

    #[test]
    fn pauli_round_trip(s in "[+-]?[IXYZ]{1,14}") {
        let p: PauliString = s.parse().unwrap();
        let again: PauliString = p.to_string().parse().unwrap();
        prop_assert_eq!(p, again);
    }

    #[test]
    fn policy_parser_never_panics(s in "(constant(-guess)?:|marginal-mean)?\\PC{0,16}") {
        if let Ok(p) = s.parse::<NoClickPolicy>() {
            prop_assert_eq!(p.to_string().parse::<NoClickPolicy>().unwrap(), p);
        }
    }

    #[test]
    fn policy_round_trip(g in -1.0f64..=1.0) {
        let p = NoClickPolicy::ConstantGuess(g);
        prop_assert_eq!(p.to_string().parse::<NoClickPolicy>().unwrap(), p);
    }

    #[test]
    fn grid_parser_never_panics(s in "[-0-9.e:a-z]{0,24}") {
        if let Ok(g) = parse_grid(&s) {
            prop_assert!(!g.is_empty());
            prop_assert!(g.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn grid_length(start in -5.0f64..5.0, steps in 0usize..200, step in 0.001f64..1.0) {
        let stop = start + steps as f64 * step;
        let expr = format!("{start}:{stop}:{step}");
        let g = parse_grid(&expr).unwrap();
        prop_assert!((g.len() as i64 - (steps as i64 + 1)).abs() <= 1, "{expr} -> {}", g.len());
    }

    #[test]
    fn sweep_config_parser_never_panics(s in "\\PC{0,64}") {
        let _ = SweepConfig::from_json(&s);
    }

    #[test]
    fn report_parser_never_panics(s in "\\PC{0,64}") {
        let _ = RunReport::from_json_lines(&s);
    }
}

#[test]
fn structured_garbage_is_rejected() {
    for text in [
        r#"{"backend":"qubit","scenario":"s","parameter":"noise_p","grid":[],"criterion":"two-obs"}"#,
        r#"{"backend":"qubit","scenario":"s","parameter":"noise_p","grid":[2.0],"criterion":"two-obs"}"#,
        r#"{"backend":"qubit","scenario":"s","parameter":"noise_p","grid":[0.5],"criterion":"eq6"}"#,
        r#"{"backend":"qubit","scenario":"s","parameter":"noise_p","grid":[0.5],"criterion":"result4","base":{"n":4}}"#,
        r#"{"backend":"cv","scenario":"s","parameter":"r","grid":[0.5],"criterion":"eq6","shots":1}"#,
        r#"{"backend":"cv","scenario":"s","parameter":"r","grid":[-0.5],"criterion":"eq6"}"#,
    ] {
        assert!(SweepConfig::from_json(text).is_err(), "{text}");
    }
    for text in [
        "{\"kind\":\"run\"}",
        "{\"kind\":\"run\",\"tool_version\":\"0\",\"scenario\":\"x\",\"parameters\":{}}\n{\"kind\":\"bogus\"}",
        "{\"kind\":\"run\",\"tool_version\":\"0\",\"scenario\":\"x\",\"parameters\":{\"a\":null}}",
    ] {
        assert!(RunReport::from_json_lines(text).is_err(), "{text}");
    }
    let ok = "{\"kind\":\"run\",\"tool_version\":\"0\",\"scenario\":\"x\",\"parameters\":{\"a\":1.5}}\n";
    assert_eq!(RunReport::from_json_lines(ok).unwrap().parameters["a"], 1.5);
}

fn corpus(target: &str) -> Vec<(String, String)> {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut seeds: Vec<_> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|entry| {
            let path = entry.unwrap().path();
            let text = std::fs::read_to_string(&path).unwrap();
            (path.file_name().unwrap().to_string_lossy().into_owned(), text)
        })
        .collect();
    seeds.sort();
    assert!(!seeds.is_empty(), "no seeds for {target}");
    seeds
}

// Same checks as the fuzz targets, applied to the checked-in seeds.
#[test]
fn fuzz_corpus_seeds() {
    let mut accepted = 0;
    for (_, text) in corpus("parse_sweep_config") {
        if let Ok(config) = SweepConfig::from_json(&text) {
            let again = serde_json::to_string(&config).unwrap();
            assert_eq!(SweepConfig::from_json(&again).unwrap(), config);
            accepted += 1;
        }
    }
    assert_eq!(accepted, 4);
    for (name, text) in corpus("parse_eta_grid") {
        let ok = parse_grid(&text).is_ok();
        assert_eq!(ok, !matches!(name.as_str(), "decreasing.txt" | "short.txt"), "{name}");
    }
    for (name, text) in corpus("parse_run_report") {
        let report = RunReport::from_json_lines(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        let emitted = report.to_json_lines().unwrap();
        assert_eq!(RunReport::from_json_lines(&emitted).unwrap(), report);
        if report.wall_time_ms.is_none() {
            assert_eq!(emitted, text, "{name}");
        }
    }
    for (name, text) in corpus("parse_pauli_string") {
        match text.parse::<PauliString>() {
            Ok(p) => assert_eq!(p.to_string().parse::<PauliString>().unwrap(), p),
            Err(_) => assert_eq!(name, "bad_char.txt"),
        }
    }
    for (name, text) in corpus("parse_policy") {
        match text.parse::<NoClickPolicy>() {
            Ok(p) => assert_eq!(p.to_string().parse::<NoClickPolicy>().unwrap(), p),
            Err(_) => assert_eq!(name, "nan.txt"),
        }
    }
}
