//! Browser bindings for the demo page: every function takes and returns
//! JSON strings so the JS side stays a thin canvas renderer. Errors come
//! back as `{"ok": false, "error": ...}` instead of panics.

use serde_json::{json, Value};
use wasm_bindgen::prelude::wasm_bindgen;

use opidyn::analysis;
use opidyn::dynamics::{simulate, SimOptions, UpdateRule};
use opidyn::scenario::{self, Scenario};
use opidyn::spectrum::{ConstantTarget, DeviationSpec, Opinion, OpinionSpectrum};

fn err(e: impl std::fmt::Display) -> String {
    json!({"ok": false, "error": e.to_string()}).to_string()
}

/// Names of the bundled presets, as a JSON array.
#[wasm_bindgen]
pub fn preset_names() -> String {
    json!(scenario::PRESET_NAMES).to_string()
}

/// The JSON text of a bundled preset.
#[wasm_bindgen]
pub fn preset_scenario(name: &str) -> String {
    match scenario::preset(name) {
        Some(text) => text.to_string(),
        None => err(format!("unknown preset `{name}`")),
    }
}

/// Run the updating process and return the whole trajectory as per-agent
/// series, plus the limit report. Discrete trajectories come back as label
/// indices with the labels listed separately.
#[wasm_bindgen]
pub fn simulate_scenario(scenario_json: &str, steps: usize, tol: f64) -> String {
    let scenario = match Scenario::from_json_str(scenario_json) {
        Ok(s) => s,
        Err(e) => return err(e),
    };
    let (graph, b0) = match scenario.build(false) {
        Ok(x) => x,
        Err(e) => return err(e),
    };
    let opts = SimOptions {
        t_max: steps.clamp(1, 100_000),
        tol: if tol > 0.0 { tol } else { 1e-9 },
        ..SimOptions::default()
    };
    let rule = UpdateRule::default_for(&graph);
    let (trajectory, report) = match simulate(&graph, &b0, rule, &opts) {
        Ok(x) => x,
        Err(e) => return err(e),
    };
    // per-agent numeric series for plotting
    let n = graph.n();
    let mut series: Vec<Vec<f64>> = vec![Vec::with_capacity(trajectory.steps.len()); n];
    for state in &trajectory.steps {
        for (i, slot) in series.iter_mut().enumerate() {
            let v = match state.get(i) {
                Opinion::Value(v) => v,
                Opinion::Label(k) => k as f64,
            };
            slot.push(v);
        }
    }
    json!({
        "ok": true,
        "n": n,
        "kind": if graph.spectrum().is_continuous() { "continuous" } else { "discrete" },
        "labels": graph.spectrum().labels(),
        "series": series,
        "limit": scenario::limit_report_to_json(graph.spectrum(), &report),
    })
    .to_string()
}

/// Classify the network's closed groups; same document as the CLI.
#[wasm_bindgen]
pub fn classify_scenario(scenario_json: &str) -> String {
    let scenario = match Scenario::from_json_str(scenario_json) {
        Ok(s) => s,
        Err(e) => return err(e),
    };
    let (graph, _) = match scenario.build(false) {
        Ok(x) => x,
        Err(e) => return err(e),
    };
    let mut doc = scenario::classification_to_json(&analysis::classify(&graph));
    doc.as_object_mut()
        .unwrap()
        .insert("ok".into(), Value::Bool(true));
    doc.to_string()
}

/// Sample a deviation function on [-1, 1] for the curve explorer.
/// `kind` is one of soft | hard | affine | constant | signed_power.
#[wasm_bindgen]
pub fn deviation_curve(
    kind: &str,
    a: f64,
    b: f64,
    p: f64,
    midpoint_to_upper: bool,
    samples: usize,
) -> String {
    let spec = match kind {
        "soft" => DeviationSpec::Soft,
        "hard" => DeviationSpec::Hard { midpoint_to_upper },
        "affine" => DeviationSpec::Affine { a, b },
        "constant" => DeviationSpec::Constant {
            target: ConstantTarget::Value(b),
        },
        "signed_power" => DeviationSpec::SignedPower { p },
        other => return err(format!("unknown deviation kind `{other}`")),
    };
    let spectrum = match OpinionSpectrum::interval(-1.0, 1.0) {
        Ok(s) => s,
        Err(e) => return err(e),
    };
    let problems = spec.binding_problems(&spectrum);
    if !problems.is_empty() {
        return err(problems.join("; "));
    }
    let samples = samples.clamp(2, 4_096);
    let mut xs = Vec::with_capacity(samples);
    let mut ys = Vec::with_capacity(samples);
    let fixed = spec.fixed_points(&spectrum);
    for i in 0..samples {
        let x = -1.0 + 2.0 * (i as f64) / (samples - 1) as f64;
        match spec.eval(&spectrum, Opinion::Value(x)) {
            Ok(Opinion::Value(y)) => {
                xs.push(x);
                ys.push(y);
            }
            Ok(_) => return err("unexpected label output"),
            Err(e) => return err(e),
        }
    }
    json!({
        "ok": true,
        "x": xs,
        "y": ys,
        "fixed_points": match fixed {
            opidyn::spectrum::FixedPointSet::Values(v) => json!(v),
            opidyn::spectrum::FixedPointSet::Empty => json!([]),
            _ => json!(null),
        },
    })
    .to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_exposed() {
        let names: Vec<String> = serde_json::from_str(&preset_names()).unwrap();
        assert!(names.contains(&"probinv2".to_string()));
        let text = preset_scenario("probinv2");
        assert!(text.contains("\"soft\""));
        let missing: Value = serde_json::from_str(&preset_scenario("nope")).unwrap();
        assert_eq!(missing["ok"], false);
    }

    #[test]
    fn simulation_returns_plottable_series() {
        let doc: Value =
            serde_json::from_str(&simulate_scenario(preset_scenario("probinv2").as_str(), 500, 1e-9))
                .unwrap();
        assert_eq!(doc["ok"], true);
        assert_eq!(doc["kind"], "continuous");
        let series = doc["series"].as_array().unwrap();
        assert_eq!(series.len(), 2);
        assert_eq!(series[0][0], 1.0);
        assert_eq!(doc["limit"]["status"], "converged");
    }

    #[test]
    fn discrete_simulation_carries_labels() {
        let doc: Value = serde_json::from_str(&simulate_scenario(
            preset_scenario("example_opp").as_str(),
            100,
            1e-9,
        ))
        .unwrap();
        assert_eq!(doc["ok"], true);
        assert_eq!(doc["kind"], "discrete");
        assert_eq!(doc["labels"][1], "unlikely");
        assert_eq!(doc["limit"]["status"], "oscillating");
    }

    #[test]
    fn classification_carries_verdicts() {
        let doc: Value =
            serde_json::from_str(&classify_scenario(preset_scenario("example_general").as_str()))
                .unwrap();
        assert_eq!(doc["ok"], true);
        assert_eq!(doc["groups"][0]["verdict"], "polarizes");
    }

    #[test]
    fn bad_scenarios_come_back_as_errors() {
        let doc: Value = serde_json::from_str(&simulate_scenario("{", 100, 1e-9)).unwrap();
        assert_eq!(doc["ok"], false);
    }

    #[test]
    fn curves_cover_the_interval() {
        let doc: Value =
            serde_json::from_str(&deviation_curve("soft", 0.0, 0.0, 1.0, true, 101)).unwrap();
        assert_eq!(doc["ok"], true);
        assert_eq!(doc["x"][0], -1.0);
        assert_eq!(doc["y"][0], 1.0);
        assert_eq!(doc["fixed_points"], serde_json::json!([0.0]));

        let doc: Value =
            serde_json::from_str(&deviation_curve("signed_power", 0.0, 0.0, 0.5, true, 11)).unwrap();
        assert_eq!(doc["ok"], true);

        let doc: Value =
            serde_json::from_str(&deviation_curve("affine", 2.0, 0.0, 1.0, true, 11)).unwrap();
        assert_eq!(doc["ok"], false, "slope 2 must be rejected");
    }
}
