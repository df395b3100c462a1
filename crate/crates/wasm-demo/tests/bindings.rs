use exforce_wasm::{analyze_pa_json, fisher_ci_json, spread_curves_json};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn analyze_reports_every_node() {
    let v = parse(analyze_pa_json(200, 2, 0.4, 3, 2.0).unwrap());
    assert_eq!(v["nodes"], 200);
    assert_eq!(v["metrics"].as_array().unwrap().len(), 200);
    assert_eq!(v["edges"].as_array().unwrap().len(), v["edges_count"].as_u64().unwrap() as usize);
    for row in v["metrics"].as_array().unwrap() {
        assert!(row["exf"].as_f64().unwrap() >= 0.0);
        assert!(row["kshell"].as_u64().unwrap() <= row["degree"].as_u64().unwrap());
    }
    assert_eq!(analyze_pa_json(200, 2, 0.4, 3, 2.0).unwrap(), analyze_pa_json(200, 2, 0.4, 3, 2.0).unwrap());
}

#[test]
fn analyze_rejects_bad_input() {
    assert!(analyze_pa_json(1, 2, 0.4, 3, 2.0).is_err());
    assert!(analyze_pa_json(100, 2, 0.4, 3, 0.0).is_err());
    assert!(analyze_pa_json(100_000, 2, 0.4, 3, 2.0).is_err());
}

#[test]
fn curves_have_one_series_per_run() {
    for process in ["si", "sis", "sir"] {
        let v = parse(spread_curves_json(300, 2, 0.4, 1, process, 0, 4.0, 0.5, 100, 5, 9).unwrap());
        let infected = v["infected"].as_array().unwrap();
        assert_eq!(infected.len(), 5);
        for series in infected {
            let s = series.as_array().unwrap();
            assert!((s[0].as_f64().unwrap() - 1.0 / 300.0).abs() < 1e-12);
            assert!(s.iter().all(|x| (0.0..=1.0).contains(&x.as_f64().unwrap())));
        }
        assert_eq!(v["recovered"].as_array().unwrap().len(), if process == "sir" { 5 } else { 0 });
    }
    assert!(spread_curves_json(300, 2, 0.4, 1, "seir", 0, 4.0, 0.5, 100, 5, 9).is_err());
    assert!(spread_curves_json(300, 2, 0.4, 1, "si", 300, 4.0, 0.5, 100, 5, 9).is_err());
}

#[test]
fn interval_matches_table_rounding() {
    let v = parse(fisher_ci_json(0.71, 1000, 0.95).unwrap());
    assert_eq!(v["display"], "0.71 ± 0.03");
    assert!(v["lower"].as_f64().unwrap() < 0.71 && v["upper"].as_f64().unwrap() > 0.71);
    assert!(fisher_ci_json(1.5, 100, 0.95).is_err());
    assert!(fisher_ci_json(0.5, 3, 0.95).is_err());
}
