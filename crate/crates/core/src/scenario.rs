//! The canonical scenario JSON format, bundled presets, and the JSON/CSV
//! emission of analysis artifacts.
//!
//! Agent indices in every external document are 1-based; internally the
//! crate is 0-based throughout.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::analysis::{BipartitionCertificate, CertificateKind, ClassificationResult};
use crate::dynamics::{LimitReport, LimitStatus, Trajectory};
use crate::graph::{OpinionVector, Relation, SignedMultigraph, ROW_SUM_TOL};
use crate::spectral::InfluenceReport;
use crate::spectrum::{DeviationSpec, Opinion, OpinionSpectrum};
use crate::{Error, Result};

/// Rows whose sums are off by no more than this are renormalized on ingest
/// (scenario files carry decimal rounding noise).
pub const INGEST_ROW_TOL: f64 = 1e-9;

pub const SCHEMA_VERSION: u32 = 1;

/// A self-contained scenario document: the signed multigraph plus an
/// initial opinion profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
    pub n: usize,
    pub spectrum: OpinionSpectrum,
    /// Row-major n x n intensity weights.
    pub weights: Vec<Vec<f64>>,
    /// n x n grid of "F" (follow) or deviation spec ids.
    pub relations: Vec<Vec<String>>,
    #[serde(default)]
    pub deviations: BTreeMap<String, DeviationSpec>,
    /// Length-n array of numbers (interval spectra) or labels (discrete).
    pub initial_opinions: Vec<Value>,
}

fn default_schema_version() -> u32 {
    SCHEMA_VERSION
}

impl Scenario {
    pub fn from_json_str(s: &str) -> Result<Scenario> {
        serde_json::from_str(s).map_err(|e| Error::Scenario(e.to_string()))
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// Materialize the graph and initial profile. Unless `strict`, rows
    /// summing to 1 within 1e-9 are renormalized to exact sums; `strict`
    /// demands exact row-stochasticity up front.
    pub fn build(&self, strict: bool) -> Result<(SignedMultigraph, OpinionVector)> {
        if self.n < 2 {
            return Err(Error::Scenario("scenarios need at least 2 agents".into()));
        }
        if self.weights.len() != self.n
            || self.weights.iter().any(|r| r.len() != self.n)
            || self.relations.len() != self.n
            || self.relations.iter().any(|r| r.len() != self.n)
        {
            return Err(Error::Scenario(format!(
                "weights and relations must both be {0} x {0}",
                self.n
            )));
        }

        let mut weights = self.weights.clone();
        for (i, row) in weights.iter_mut().enumerate() {
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() <= ROW_SUM_TOL {
                continue;
            }
            if strict {
                return Err(Error::Scenario(format!(
                    "row {} sums to {sum}; strict mode requires exact row-stochasticity",
                    i + 1
                )));
            }
            if (sum - 1.0).abs() <= INGEST_ROW_TOL && sum > 0.0 {
                for w in row.iter_mut() {
                    *w /= sum;
                }
            } else {
                return Err(Error::Scenario(format!(
                    "row {} sums to {sum}, outside the 1e-9 ingest tolerance",
                    i + 1
                )));
            }
        }

        let relations: Vec<Vec<Relation>> = self
            .relations
            .iter()
            .map(|row| {
                row.iter()
                    .map(|tok| {
                        if tok == "F" {
                            Relation::Follow
                        } else {
                            Relation::Deviate(tok.clone())
                        }
                    })
                    .collect()
            })
            .collect();

        let graph = SignedMultigraph::try_new(
            weights,
            relations,
            self.deviations.clone(),
            self.spectrum.clone(),
        )?;

        if self.initial_opinions.len() != self.n {
            return Err(Error::Scenario(format!(
                "initial_opinions must have length {}",
                self.n
            )));
        }
        let b0 = parse_opinions(&self.spectrum, &self.initial_opinions)?;
        graph.check_vector(&b0)?;
        Ok((graph, b0))
    }

    /// Reconstruct a scenario document from a graph and profile, e.g. for
    /// counterexample dumps.
    pub fn from_graph(g: &SignedMultigraph, b0: &OpinionVector, name: Option<String>) -> Scenario {
        Scenario {
            schema_version: SCHEMA_VERSION,
            name,
            notes: None,
            n: g.n(),
            spectrum: g.spectrum().clone(),
            weights: g.weights().to_vec(),
            relations: g
                .relations()
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|r| match r {
                            Relation::Follow => "F".to_string(),
                            Relation::Deviate(id) => id.clone(),
                        })
                        .collect()
                })
                .collect(),
            deviations: g.deviations().clone(),
            initial_opinions: opinion_vector_values(g.spectrum(), b0),
        }
    }
}

fn parse_opinions(spectrum: &OpinionSpectrum, raw: &[Value]) -> Result<OpinionVector> {
    match spectrum {
        OpinionSpectrum::Interval { .. } => {
            let mut out = Vec::with_capacity(raw.len());
            for (i, v) in raw.iter().enumerate() {
                let x = v.as_f64().ok_or_else(|| {
                    Error::Scenario(format!(
                        "initial opinion {} must be a number on an interval spectrum",
                        i + 1
                    ))
                })?;
                out.push(x);
            }
            Ok(OpinionVector::Continuous(out))
        }
        OpinionSpectrum::Discrete { .. } => {
            let mut out = Vec::with_capacity(raw.len());
            for (i, v) in raw.iter().enumerate() {
                let label = v.as_str().ok_or_else(|| {
                    Error::Scenario(format!(
                        "initial opinion {} must be a label on a discrete spectrum",
                        i + 1
                    ))
                })?;
                let k = spectrum.label_index(label).ok_or_else(|| {
                    Error::Scenario(format!("`{label}` is not a label of the spectrum"))
                })?;
                out.push(k);
            }
            Ok(OpinionVector::Discrete(out))
        }
    }
}

/// Opinions as JSON values: numbers, or label strings for discrete spectra.
pub fn opinion_vector_values(spectrum: &OpinionSpectrum, b: &OpinionVector) -> Vec<Value> {
    match b {
        OpinionVector::Continuous(v) => v.iter().map(|x| json!(x)).collect(),
        OpinionVector::Discrete(v) => v
            .iter()
            .map(|&k| {
                json!(spectrum
                    .labels()
                    .and_then(|l| l.get(k).cloned())
                    .unwrap_or_else(|| format!("#{k}")))
            })
            .collect(),
    }
}

fn opinion_value(spectrum: &OpinionSpectrum, x: &Opinion) -> Value {
    match x {
        Opinion::Value(v) => json!(v),
        Opinion::Label(k) => json!(spectrum
            .labels()
            .and_then(|l| l.get(*k).cloned())
            .unwrap_or_else(|| format!("#{k}"))),
    }
}

fn agents_1based(agents: &[usize]) -> Vec<usize> {
    agents.iter().map(|i| i + 1).collect()
}

fn certificate_json(cert: &BipartitionCertificate) -> Value {
    json!({
        "kind": match cert.kind {
            CertificateKind::Opposition => "opposition",
            CertificateKind::ReverseOpposition => "reverse_opposition",
        },
        "side1": agents_1based(&cert.side1),
        "side2": agents_1based(&cert.side2),
    })
}

/// Trajectory as CSV: header `t,b_1,...,b_n`, one row per step, labels
/// serialized as their spectrum symbols.
pub fn trajectory_to_csv(spectrum: &OpinionSpectrum, trajectory: &Trajectory) -> String {
    let n = trajectory.steps.first().map(|s| s.len()).unwrap_or(0);
    let mut out = String::from("t");
    for i in 1..=n {
        out.push_str(&format!(",b_{i}"));
    }
    out.push('\n');
    for (t, state) in trajectory.steps.iter().enumerate() {
        out.push_str(&t.to_string());
        match state {
            OpinionVector::Continuous(v) => {
                for x in v {
                    out.push_str(&format!(",{x}"));
                }
            }
            OpinionVector::Discrete(v) => {
                for &k in v {
                    let label = spectrum
                        .labels()
                        .and_then(|l| l.get(k).cloned())
                        .unwrap_or_else(|| format!("#{k}"));
                    out.push_str(&format!(",{label}"));
                }
            }
        }
        out.push('\n');
    }
    out
}

pub fn limit_report_to_json(spectrum: &OpinionSpectrum, report: &LimitReport) -> Value {
    let mut doc = json!({
        "schema_version": SCHEMA_VERSION,
        "tol": report.tol,
        "window": report.window,
    });
    let obj = doc.as_object_mut().unwrap();
    match &report.status {
        LimitStatus::Converged { limit, t_star } => {
            obj.insert("status".into(), json!("converged"));
            obj.insert("t_star".into(), json!(t_star));
            obj.insert(
                "limit".into(),
                Value::Array(opinion_vector_values(spectrum, limit)),
            );
        }
        LimitStatus::Oscillating { period, orbit } => {
            obj.insert("status".into(), json!("oscillating"));
            obj.insert("period".into(), json!(period));
            obj.insert(
                "orbit".into(),
                Value::Array(
                    orbit
                        .iter()
                        .map(|s| Value::Array(opinion_vector_values(spectrum, s)))
                        .collect(),
                ),
            );
        }
        LimitStatus::Undetermined { t_max } => {
            obj.insert("status".into(), json!("undetermined"));
            obj.insert("t_max".into(), json!(t_max));
        }
    }
    doc
}

pub fn classification_to_json(result: &ClassificationResult) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "groups": result.groups.iter().map(|grp| {
            json!({
                "members": agents_1based(&grp.members),
                "verdict": grp.verdict.map(|v| match v {
                    crate::analysis::Verdict::Polarizes => "polarizes",
                    crate::analysis::Verdict::Diverges => "diverges",
                    crate::analysis::Verdict::NeutralConsensus => "neutral_consensus",
                }),
                "out_of_theory": grp.out_of_theory,
                "problems": grp.problems,
                "period": grp.period,
                "certificate": grp.opposition.as_ref().map(certificate_json),
                "reverse_certificate": grp.reverse.as_ref().map(certificate_json),
            })
        }).collect::<Vec<_>>(),
        "rest": agents_1based(&result.rest),
        "overall_converges": result.overall_converges,
        "problems": result.problems,
    })
}

pub fn influence_to_json(
    spectrum: &OpinionSpectrum,
    report: &InfluenceReport,
    example_b0: Option<&[f64]>,
) -> Value {
    let example = example_b0.map(|b0| {
        let (a, limit) = report.predict(b0);
        json!({
            "b0": b0,
            "a": a,
            "limit": limit,
        })
    });
    let _ = spectrum;
    json!({
        "schema_version": SCHEMA_VERSION,
        "regime": "opposition_bipartite_aperiodic",
        "s": report.s,
        "g_signs": report.g_signs.iter().map(|g| *g as i32).collect::<Vec<_>>(),
        "certificate": certificate_json(&report.certificate),
        "example_prediction": example,
    })
}

/// Equilibria summary: the consensus characterization, constructed
/// equilibria when available, and an optional wisdom verdict.
pub fn equilibria_to_json(
    spectrum: &OpinionSpectrum,
    characterization: Option<&crate::equilibria::ConsensusCharacterization>,
    unavailable_reason: Option<&str>,
    polarization: Option<&OpinionVector>,
    oscillation: Option<&(OpinionVector, OpinionVector)>,
    brute_force: Option<&[OpinionVector]>,
    wisdom: Option<(&Opinion, crate::equilibria::WisdomVerdict)>,
) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "characterization": characterization.map(|c| json!({
            "strong_out_agents": agents_1based(&c.strong_out_agents),
            "threshold": c.threshold,
            "admissible": admissible_json(spectrum, &c.admissible),
            "persistent_disagreement": c.persistent_disagreement,
        })),
        "characterization_unavailable": unavailable_reason,
        "polarization": polarization.map(|p| Value::Array(opinion_vector_values(spectrum, p))),
        "oscillation_pair": oscillation.map(|(p, q)| json!([
            Value::Array(opinion_vector_values(spectrum, p)),
            Value::Array(opinion_vector_values(spectrum, q)),
        ])),
        "fixed_points": brute_force.map(|list| Value::Array(
            list.iter()
                .map(|p| Value::Array(opinion_vector_values(spectrum, p)))
                .collect(),
        )),
        "wisdom": wisdom.map(|(mu, verdict)| json!({
            "mu": opinion_value(spectrum, mu),
            "verdict": match verdict {
                crate::equilibria::WisdomVerdict::NeverWise => "never_wise",
                crate::equilibria::WisdomVerdict::WiseForAllInitial => "wise_for_all_initial",
                crate::equilibria::WisdomVerdict::ConditionallyWise => "conditionally_wise",
            },
        })),
    })
}

fn admissible_json(spectrum: &OpinionSpectrum, set: &crate::spectrum::FixedPointSet) -> Value {
    use crate::spectrum::FixedPointSet::*;
    match set {
        Empty => json!({"set": "empty"}),
        WholeSpectrum => json!({"set": "whole_spectrum"}),
        Values(vs) => json!({"set": "values", "values": vs}),
        Labels(ls) => json!({
            "set": "labels",
            "labels": ls.iter().map(|&k| {
                spectrum.labels().and_then(|l| l.get(k).cloned()).unwrap_or_else(|| format!("#{k}"))
            }).collect::<Vec<_>>(),
        }),
    }
}

/// Names of the bundled presets.
pub const PRESET_NAMES: [&str; 7] = [
    "probinv2",
    "probinv3",
    "complex_society",
    "example_general",
    "example_multiple",
    "example_bip",
    "example_opp",
];

/// The JSON text of a bundled preset, if the name is known. Presets are
/// data files under `presets/`, embedded at compile time.
pub fn preset(name: &str) -> Option<&'static str> {
    match name {
        "probinv2" => Some(include_str!("../presets/probinv2.json")),
        "probinv3" => Some(include_str!("../presets/probinv3.json")),
        "complex_society" => Some(include_str!("../presets/complex_society.json")),
        "example_general" => Some(include_str!("../presets/example_general.json")),
        "example_multiple" => Some(include_str!("../presets/example_multiple.json")),
        "example_bip" => Some(include_str!("../presets/example_bip.json")),
        "example_opp" => Some(include_str!("../presets/example_opp.json")),
        _ => None,
    }
}

/// Load a preset by name into a scenario.
pub fn load_preset(name: &str) -> Result<Scenario> {
    let text = preset(name)
        .ok_or_else(|| Error::Scenario(format!("unknown preset `{name}`")))?;
    Scenario::from_json_str(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{simulate, SimOptions, UpdateRule};

    #[test]
    fn every_preset_builds_into_a_valid_graph() {
        for name in PRESET_NAMES {
            let scenario = load_preset(name).unwrap_or_else(|e| panic!("{name}: {e}"));
            let (g, b0) = scenario.build(false).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(g.validate().is_valid(), "{name} invalid");
            assert_eq!(b0.len(), g.n());
        }
    }

    #[test]
    fn presets_roundtrip_through_serialization() {
        for name in PRESET_NAMES {
            let scenario = load_preset(name).unwrap();
            let text = scenario.to_json_string();
            let back = Scenario::from_json_str(&text).unwrap();
            assert_eq!(back, scenario, "{name} does not roundtrip");
            // and the rebuilt graph is identical
            let (g1, b1) = scenario.build(false).unwrap();
            let (g2, b2) = back.build(false).unwrap();
            assert_eq!(g1, g2);
            assert_eq!(b1, b2);
        }
    }

    #[test]
    fn two_agent_preset_carries_the_printed_constants() {
        let (g, b0) = load_preset("probinv2").unwrap().build(false).unwrap();
        assert_eq!(g.weight(0, 0), 2.0 / 3.0);
        assert_eq!(g.weight(0, 1), 1.0 / 3.0);
        assert_eq!(g.weight(1, 0), 1.0 / 3.0);
        assert_eq!(g.weight(1, 1), 2.0 / 3.0);
        assert_eq!(b0, OpinionVector::Continuous(vec![1.0, -1.0]));
        assert!(!g.relation(0, 1).is_follow());
        assert!(g.relation(1, 0).is_follow());
    }

    #[test]
    fn graph_scenario_roundtrip() {
        let (g, b0) = load_preset("example_multiple").unwrap().build(false).unwrap();
        let dumped = Scenario::from_graph(&g, &b0, Some("dump".into()));
        let (g2, b2) = dumped.build(false).unwrap();
        assert_eq!(g, g2);
        assert_eq!(b0, b2);
    }

    #[test]
    fn csv_lists_time_and_agents() {
        let (g, b0) = load_preset("probinv2").unwrap().build(false).unwrap();
        let (traj, _) = simulate(&g, &b0, UpdateRule::Continuous, &SimOptions::default()).unwrap();
        let csv = trajectory_to_csv(g.spectrum(), &traj);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "t,b_1,b_2");
        assert!(lines.next().unwrap().starts_with("0,1,-1"));
    }

    #[test]
    fn discrete_csv_uses_labels() {
        let (g, b0) = load_preset("example_bip").unwrap().build(false).unwrap();
        let (traj, _) = simulate(
            &g,
            &b0,
            UpdateRule::default_for(&g),
            &SimOptions::default(),
        )
        .unwrap();
        let csv = trajectory_to_csv(g.spectrum(), &traj);
        assert!(csv.lines().nth(1).unwrap().contains("unlikely"));
    }

    #[test]
    fn twelve_agent_preset_matches_the_fixture() {
        let (g, _) = load_preset("example_general").unwrap().build(false).unwrap();
        assert_eq!(g, crate::testutil::example_general());
    }

    #[test]
    fn heterogeneous_society_converges_to_a_polarized_profile() {
        use crate::dynamics::LimitStatus;
        let (g, b0) = load_preset("complex_society").unwrap().build(false).unwrap();
        let (_, report) =
            simulate(&g, &b0, UpdateRule::Continuous, &SimOptions::default()).unwrap();
        match report.status {
            LimitStatus::Converged { limit, .. } => {
                let l = limit.as_continuous().unwrap();
                // camps stabilize at their poles, moderates in between
                assert!((l[0] - 1.0).abs() < 1e-6 && (l[1] - 1.0).abs() < 1e-6);
                assert!((l[2] + 1.0).abs() < 1e-6);
                assert!(l[3].abs() < 0.5 && l[4].abs() < 0.5 && l[5].abs() < 0.5);
            }
            other => panic!("expected convergence, got {other:?}"),
        }
    }

    #[test]
    fn row_normalization_tolerance() {
        let mut scenario = load_preset("probinv2").unwrap();
        scenario.weights[0] = vec![0.66666666, 0.33333333]; // off by ~1e-8: rejected
        assert!(scenario.build(false).is_err());
        scenario.weights[0] = vec![0.6666666667, 0.3333333330]; // off by ~3e-10: renormalized
        let (g, _) = scenario.build(false).unwrap();
        let sum: f64 = g.weights()[0].iter().sum();
        assert!((sum - 1.0).abs() <= ROW_SUM_TOL);
        // the same file fails under --strict
        assert!(scenario.build(true).is_err());
    }

    #[test]
    fn classification_json_uses_one_based_agents() {
        let (g, _) = load_preset("example_general").unwrap().build(false).unwrap();
        let result = crate::analysis::classify(&g);
        let doc = classification_to_json(&result);
        assert_eq!(doc["groups"][0]["members"], json!([1, 2, 3]));
        assert_eq!(doc["groups"][0]["verdict"], json!("polarizes"));
        assert_eq!(doc["groups"][1]["verdict"], json!("diverges"));
        assert_eq!(doc["groups"][2]["verdict"], json!("neutral_consensus"));
        assert_eq!(doc["rest"], json!([12]));
        assert_eq!(doc["overall_converges"], json!(false));
    }
}
