//! Randomized agreement harness: samples symmetric soft-opposition
//! networks, then checks that graph-theoretic verdicts, spectral
//! membership, simulated behavior, constructed equilibria, and the
//! influence formula all agree. Failures are recorded as replayable
//! scenario dumps, never panics.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::{self, Verdict};
use crate::dynamics::{
    self, simulate, simulate_limit, LimitStatus, SimOptions, TieRule, UpdateRule,
};
use crate::equilibria;
use crate::graph::{OpinionVector, Relation, SignedMultigraph};
use crate::scenario::Scenario;
use crate::spectral::{self, EIG_MEMBERSHIP_TOL};
use crate::spectrum::{ConstantTarget, DeviationSpec, Opinion, OpinionSpectrum};
use crate::{Error, Result};

/// Relation pattern forced onto a sampled support, so that all three
/// regimes are exercised (uniform sampling makes exact balance rare).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimePattern {
    /// Bernoulli deviate edges with the configured probability.
    Random,
    /// Follow inside two random sides, deviate across: balanced.
    ForcedOpposition,
    /// Deviate inside the sides, follow across: anti-balanced.
    ForcedReverse,
    /// Resampled until neither certificate exists (needs n >= 4).
    ForcedImbalanced,
}

/// Harness configuration; the seed fully determines all randomness.
/// Sampled networks live on the interval [-1, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    /// Continuous-rule trials run only under `UpdateRule::Continuous`;
    /// the discrete and best-response suites run either way.
    pub rule: UpdateRule,
    pub trials: usize,
    pub n_min: usize,
    pub n_max: usize,
    pub edge_density: f64,
    pub sign_probability: f64,
    pub b0_samples_per_graph: usize,
    pub seed: u64,
    /// Simulation step tolerance (drives the convergence window).
    pub sim_tol: f64,
    /// Tolerance for limit values agreeing with predictions.
    pub agreement_tol: f64,
    /// Instances for the discrete limit-set-equals-fixed-point-set suite.
    pub discrete_configs: usize,
    /// Instances for the best-response consistency suite (per rule).
    pub best_response_instances: usize,
}

impl Default for TrialConfig {
    fn default() -> Self {
        TrialConfig {
            rule: UpdateRule::Continuous,
            trials: 500,
            n_min: 2,
            n_max: 8,
            edge_density: 0.5,
            sign_probability: 0.5,
            b0_samples_per_graph: 5,
            seed: 0xD15C_0BAD,
            sim_tol: 1e-12,
            agreement_tol: 1e-6,
            discrete_configs: 50,
            best_response_instances: 200,
        }
    }
}

/// Per-property tallies plus replayable dumps for every failure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyStats {
    pub name: String,
    pub pass: u64,
    pub fail: u64,
    pub counterexamples: Vec<Counterexample>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub trial: usize,
    pub description: String,
    pub scenario: Scenario,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub config: TrialConfig,
    pub properties: Vec<PropertyStats>,
}

impl AgreementReport {
    pub fn all_pass(&self) -> bool {
        self.properties.iter().all(|p| p.fail == 0)
    }

    pub fn property(&self, name: &str) -> Option<&PropertyStats> {
        self.properties.iter().find(|p| p.name == name)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

struct Tally {
    stats: Vec<PropertyStats>,
}

impl Tally {
    fn new(names: &[&str]) -> Tally {
        Tally {
            stats: names
                .iter()
                .map(|n| PropertyStats {
                    name: n.to_string(),
                    pass: 0,
                    fail: 0,
                    counterexamples: Vec::new(),
                })
                .collect(),
        }
    }

    fn pass(&mut self, name: &str) {
        self.entry(name).pass += 1;
    }

    fn fail(&mut self, name: &str, trial: usize, description: String, scenario: Scenario) {
        let entry = self.entry(name);
        entry.fail += 1;
        // cap the dump volume; tallies keep counting
        if entry.counterexamples.len() < 16 {
            entry.counterexamples.push(Counterexample {
                trial,
                description,
                scenario,
            });
        }
    }

    fn check(
        &mut self,
        name: &str,
        ok: bool,
        trial: usize,
        describe: impl FnOnce() -> (String, Scenario),
    ) {
        if ok {
            self.pass(name);
        } else {
            let (description, scenario) = describe();
            self.fail(name, trial, description, scenario);
        }
    }

    fn entry(&mut self, name: &str) -> &mut PropertyStats {
        self.stats
            .iter_mut()
            .find(|p| p.name == name)
            .expect("property registered")
    }
}

fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Residual target for the symmetric scaling; tighter than the graph's
/// row-sum tolerance so sampled graphs always validate.
const IPF_RESIDUAL: f64 = 1e-13;
const IPF_MAX_ITERS: usize = 2_000;

fn connected(adj: &[Vec<bool>]) -> bool {
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 1;
    while let Some(u) = stack.pop() {
        for v in 0..n {
            if adj[u][v] && !seen[v] {
                seen[v] = true;
                count += 1;
                stack.push(v);
            }
        }
    }
    count == n
}

/// Sample a connected symmetric support with zero diagonal, and scale a
/// random symmetric weight draw to uniform row sums by iterative
/// proportional fitting. Supports admitting no symmetric stochastic
/// scaling (stars, say) are resampled.
fn sample_symmetric_weights(
    n: usize,
    density: f64,
    rng: &mut ChaCha8Rng,
) -> Option<(Vec<Vec<f64>>, Vec<Vec<bool>>)> {
    'attempt: for _ in 0..1_000 {
        let mut adj = vec![vec![false; n]; n];
        let mut any = false;
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.gen_bool(density) {
                    adj[i][j] = true;
                    adj[j][i] = true;
                    any = true;
                }
            }
        }
        if !any || !connected(&adj) {
            continue;
        }
        let mut m = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                if adj[i][j] {
                    let w = rng.gen_range(0.2..1.0);
                    m[i][j] = w;
                    m[j][i] = w;
                }
            }
        }
        // symmetric scaling: find x with x_i * (M x)_i = 1 for all i
        let mut x = vec![1.0; n];
        let mut done = false;
        for _ in 0..IPF_MAX_ITERS {
            let mut worst = 0.0f64;
            for i in 0..n {
                let mx: f64 = (0..n).map(|j| m[i][j] * x[j]).sum();
                let r = x[i] * mx;
                if !r.is_finite() || r <= 0.0 {
                    continue 'attempt;
                }
                worst = worst.max((r - 1.0).abs());
                x[i] /= r.sqrt();
            }
            if worst < IPF_RESIDUAL {
                done = true;
                break;
            }
        }
        if !done {
            continue;
        }
        let mut w = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = x[i] * m[i][j] * x[j];
                w[i][j] = v;
                w[j][i] = v;
            }
        }
        return Some((w, adj));
    }
    None
}

fn soft_table() -> std::collections::BTreeMap<String, DeviationSpec> {
    [("soft".to_string(), DeviationSpec::Soft)].into_iter().collect()
}

/// Sample from the symmetric soft-opposition class on [-1, 1]: symmetric
/// zero-diagonal row-stochastic weights on a connected support, symmetric
/// relations with the given deviate probability, one soft spec.
pub fn random_sslss(
    n: usize,
    density: f64,
    sign_prob: f64,
    seed: u64,
) -> Result<SignedMultigraph> {
    random_sslss_patterned(n, density, sign_prob, RegimePattern::Random, seed)
}

/// [`random_sslss`] with a forced relation pattern.
pub fn random_sslss_patterned(
    n: usize,
    density: f64,
    sign_prob: f64,
    pattern: RegimePattern,
    seed: u64,
) -> Result<SignedMultigraph> {
    if n < 2 {
        return Err(Error::InvalidInput("need at least 2 agents".into()));
    }
    let mut rng = trial_rng(seed, 0);
    for _ in 0..1_000 {
        let Some((w, adj)) = sample_symmetric_weights(n, density, &mut rng) else {
            return Err(Error::InvalidInput(
                "could not sample a scalable connected support".into(),
            ));
        };
        let mut relations = vec![vec![Relation::Follow; n]; n];
        let set_deviate = |relations: &mut Vec<Vec<Relation>>, i: usize, j: usize| {
            relations[i][j] = Relation::Deviate("soft".into());
            relations[j][i] = Relation::Deviate("soft".into());
        };
        match pattern {
            RegimePattern::Random => {
                for i in 0..n {
                    for j in (i + 1)..n {
                        if adj[i][j] && rng.gen_bool(sign_prob) {
                            set_deviate(&mut relations, i, j);
                        }
                    }
                }
            }
            RegimePattern::ForcedOpposition | RegimePattern::ForcedReverse => {
                let side: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
                for i in 0..n {
                    for j in (i + 1)..n {
                        if !adj[i][j] {
                            continue;
                        }
                        let cross = side[i] != side[j];
                        let deviate = match pattern {
                            RegimePattern::ForcedOpposition => cross,
                            _ => !cross,
                        };
                        if deviate {
                            set_deviate(&mut relations, i, j);
                        }
                    }
                }
            }
            RegimePattern::ForcedImbalanced => {
                for i in 0..n {
                    for j in (i + 1)..n {
                        if adj[i][j] && rng.gen_bool(sign_prob) {
                            set_deviate(&mut relations, i, j);
                        }
                    }
                }
            }
        }
        let g = SignedMultigraph::try_new(
            w,
            relations,
            soft_table(),
            OpinionSpectrum::interval(-1.0, 1.0)?,
        )?;
        if pattern == RegimePattern::ForcedImbalanced {
            let all: Vec<usize> = (0..n).collect();
            if analysis::opposition_bipartition(&g, &all).is_some()
                || analysis::reverse_opposition_bipartition(&g, &all).is_some()
            {
                continue; // resample until genuinely imbalanced
            }
        }
        debug_assert!(g.is_sslss().is_sslss);
        return Ok(g);
    }
    Err(Error::InvalidInput(format!(
        "no {pattern:?} sample found for n = {n}"
    )))
}

/// Simulation step budget derived from the decay rate of the non-unit
/// spectrum, so slow near-critical graphs still settle below tolerance.
pub fn adaptive_sim_options(eig: &spectral::SymmetricEigen, tol: f64) -> SimOptions {
    let sub_rate = eig
        .values
        .iter()
        .map(|v| v.abs())
        .filter(|a| *a < 1.0 - EIG_MEMBERSHIP_TOL)
        .fold(0.0f64, f64::max);
    let t_max = if sub_rate < 1e-6 {
        2_000
    } else {
        let needed = (40.0 / -(sub_rate.ln())).ceil() as usize;
        needed.clamp(2_000, 4_000_000)
    };
    SimOptions {
        t_max,
        tol,
        ..SimOptions::default()
    }
}

fn random_b0(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn matrix_inf_norm(a: &[Vec<f64>]) -> f64 {
    a.iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Property names in report order.
const PROPERTIES: [&str; 11] = [
    "certificate_soundness",
    "relation_flip_duality",
    "periodicity_collapse",
    "gauge_balance",
    "gauge_isospectrality",
    "unit_eigenvalue_membership",
    "row_sum_radius_bound",
    "representation_fidelity",
    "classification_vs_simulation",
    "influence_formula",
    "spectral_consistency",
];

const EXTRA_PROPERTIES: [&str; 3] = [
    "discrete_limits_are_fixed_points",
    "best_response_continuous",
    "best_response_discrete",
];

/// Run the full property list. Deterministic given the config; failures
/// are data, never panics.
pub fn run_trials(config: &TrialConfig) -> AgreementReport {
    let continuous_trials = if matches!(config.rule, UpdateRule::Continuous) {
        config.trials
    } else {
        0
    };
    let mut names: Vec<&str> = Vec::new();
    if continuous_trials > 0 {
        names.extend(PROPERTIES);
    }
    if config.discrete_configs > 0 {
        names.push(EXTRA_PROPERTIES[0]);
    }
    if config.best_response_instances > 0 {
        names.push(EXTRA_PROPERTIES[1]);
        names.push(EXTRA_PROPERTIES[2]);
    }
    let mut tally = Tally::new(&names);

    for trial in 0..continuous_trials {
        run_sslss_trial(config, trial, &mut tally);
    }
    for instance in 0..config.discrete_configs {
        run_discrete_lim_fix(config, instance, &mut tally);
    }
    for instance in 0..config.best_response_instances {
        run_best_response(config, instance, &mut tally);
    }

    AgreementReport {
        config: config.clone(),
        properties: tally.stats,
    }
}

fn run_sslss_trial(config: &TrialConfig, trial: usize, tally: &mut Tally) {
    let mut rng = trial_rng(config.seed, 1 + trial as u64);
    let mut n = rng.gen_range(config.n_min..=config.n_max);
    let mut pattern = match trial % 4 {
        0 => RegimePattern::Random,
        1 => RegimePattern::ForcedOpposition,
        2 => RegimePattern::ForcedReverse,
        _ => RegimePattern::ForcedImbalanced,
    };
    if pattern == RegimePattern::ForcedImbalanced {
        if config.n_max < 4 {
            pattern = RegimePattern::Random;
        } else {
            n = n.max(4);
        }
    }
    let graph_seed = rng.gen::<u64>();
    let Ok(g) = random_sslss_patterned(
        n,
        config.edge_density,
        config.sign_probability,
        pattern,
        graph_seed,
    ) else {
        return; // sampling failure is not a property violation
    };
    let dump = |b0: Option<&OpinionVector>| -> Scenario {
        let b0 = b0.cloned().unwrap_or_else(|| {
            OpinionVector::Continuous(vec![0.0; g.n()])
        });
        Scenario::from_graph(&g, &b0, Some(format!("trial_{trial}")))
    };

    let all: Vec<usize> = (0..g.n()).collect();
    let opp = analysis::opposition_bipartition(&g, &all);
    let rev = analysis::reverse_opposition_bipartition(&g, &all);
    let per = match analysis::period(&g, &all) {
        Ok(p) => p,
        Err(e) => {
            tally.fail(
                "certificate_soundness",
                trial,
                format!("period failed on a connected sample: {e}"),
                dump(None),
            );
            return;
        }
    };

    // certificate soundness, edge by edge
    let mut sound = true;
    for cert in [opp.as_ref(), rev.as_ref()].into_iter().flatten() {
        for &i in &all {
            for &j in &all {
                if !g.is_edge(i, j) {
                    continue;
                }
                let same = cert.side_of(i) == cert.side_of(j);
                let follow = g.relation(i, j).is_follow();
                let want_same = match cert.kind {
                    analysis::CertificateKind::Opposition => follow,
                    analysis::CertificateKind::ReverseOpposition => !follow,
                };
                sound &= same == want_same;
            }
        }
    }
    tally.check("certificate_soundness", sound, trial, || {
        ("a certificate violates its edge conditions".into(), dump(None))
    });

    // flipping relations swaps the two certificate kinds
    match g.flip_relations("soft") {
        Ok(flipped) => {
            let ok = (opp.is_some()
                == analysis::reverse_opposition_bipartition(&flipped, &all).is_some())
                && (rev.is_some()
                    == analysis::opposition_bipartition(&flipped, &all).is_some());
            tally.check("relation_flip_duality", ok, trial, || {
                (
                    "certificate existence did not swap under relation flipping".into(),
                    dump(None),
                )
            });
        }
        Err(e) => tally.fail("relation_flip_duality", trial, e.to_string(), dump(None)),
    }

    // periodic: the two concepts coincide; aperiodic: at most one holds
    let construction_ok = if per == 1 {
        !(opp.is_some() && rev.is_some())
    } else {
        opp.is_some() == rev.is_some()
    };
    tally.check("periodicity_collapse", construction_ok, trial, || {
        (
            format!(
                "period {per}, opposition {:?}, reverse {:?}",
                opp.is_some(),
                rev.is_some()
            ),
            dump(None),
        )
    });

    let Ok(rep) = spectral::affine_representation(&g) else {
        tally.fail(
            "representation_fidelity",
            trial,
            "soft-only graph has no affine representation".into(),
            dump(None),
        );
        return;
    };

    // gauge existence tracks the opposition certificate; the conjugated
    // matrix equals |A| entrywise
    match spectral::gauge_matrix(&g) {
        Ok(gauge) => {
            let exists_ok = gauge.is_some() == opp.is_some();
            let mut conj_ok = true;
            if let Some(gauge) = &gauge {
                let conj = gauge.conjugate(&rep.a);
                let abs = spectral::abs_matrix(&rep.a);
                for i in 0..g.n() {
                    for j in 0..g.n() {
                        conj_ok &= (conj[i][j] - abs[i][j]).abs() <= 1e-12;
                    }
                }
            }
            tally.check("gauge_balance", exists_ok && conj_ok, trial, || {
                (
                    format!(
                        "gauge {:?} vs certificate {:?}, conjugation ok: {conj_ok}",
                        gauge.is_some(),
                        opp.is_some()
                    ),
                    dump(None),
                )
            });
        }
        Err(e) => tally.fail("gauge_balance", trial, e.to_string(), dump(None)),
    }

    let Ok(eig) = spectral::eigen_symmetric(&rep.a) else {
        tally.fail(
            "unit_eigenvalue_membership",
            trial,
            "sampled matrix rejected as asymmetric".into(),
            dump(None),
        );
        return;
    };

    // same spectra for A and |A| when the gauge exists
    if opp.is_some() {
        match spectral::eigen_symmetric(&spectral::abs_matrix(&rep.a)) {
            Ok(abs_eig) => {
                let ok = eig
                    .values
                    .iter()
                    .zip(&abs_eig.values)
                    .all(|(x, y)| (x - y).abs() <= 1e-8);
                tally.check("gauge_isospectrality", ok, trial, || {
                    (
                        format!("spectra differ: {:?} vs {:?}", eig.values, abs_eig.values),
                        dump(None),
                    )
                });
            }
            Err(e) => tally.fail("gauge_isospectrality", trial, e.to_string(), dump(None)),
        }
    }

    // +1 membership iff opposition bipartite, -1 iff reverse
    let has_plus = eig.contains(1.0, EIG_MEMBERSHIP_TOL);
    let has_minus = eig.contains(-1.0, EIG_MEMBERSHIP_TOL);
    let membership_ok = (has_plus == opp.is_some()) && (has_minus == rev.is_some());
    tally.check("unit_eigenvalue_membership", membership_ok, trial, || {
        (
            format!(
                "eigen membership (+1: {has_plus}, -1: {has_minus}) vs certificates \
                 (opp: {}, rev: {})",
                opp.is_some(),
                rev.is_some()
            ),
            dump(None),
        )
    });

    // spectral radius bounded by the max absolute row sum
    let rho = eig.spectral_radius();
    tally.check(
        "row_sum_radius_bound",
        rho <= matrix_inf_norm(&rep.a) + 1e-12,
        trial,
        || (format!("rho = {rho} exceeds the row-sum bound"), dump(None)),
    );

    // representation fidelity on random points
    let mut fidelity = true;
    for _ in 0..5 {
        let x = random_b0(g.n(), &mut rng);
        let by_dyn = dynamics::step_continuous(&g, &x).unwrap();
        let by_rep = rep.apply(&x);
        fidelity &= by_dyn
            .iter()
            .zip(&by_rep)
            .all(|(a, b)| (a - b).abs() <= 1e-12);
    }
    tally.check("representation_fidelity", fidelity, trial, || {
        ("dynamics and affine representation disagree".into(), dump(None))
    });

    // verdict vs simulated behavior
    let verdict = if opp.is_some() && per == 1 {
        Verdict::Polarizes
    } else if rev.is_some() {
        Verdict::Diverges
    } else {
        Verdict::NeutralConsensus
    };
    let classified = analysis::classify(&g);
    if classified.groups.len() != 1 || classified.groups[0].verdict != Some(verdict) {
        tally.fail(
            "classification_vs_simulation",
            trial,
            format!("classify disagrees with the direct verdict {verdict:?}"),
            dump(None),
        );
        return;
    }

    let opts = adaptive_sim_options(&eig, config.sim_tol);
    let influence = (verdict == Verdict::Polarizes)
        .then(|| spectral::influence_report(&g))
        .and_then(|r| r.ok());
    if verdict == Verdict::Polarizes && influence.is_none() {
        tally.fail(
            "influence_formula",
            trial,
            "no influence report for a polarizing network".into(),
            dump(None),
        );
    }

    let mut oscillating_count = 0usize;
    let mut all_converged = true;
    let mut behavior_ok = true;
    let mut behavior_msg = String::new();
    let mut bad_b0: Option<OpinionVector> = None;

    for _ in 0..config.b0_samples_per_graph {
        let b0 = random_b0(g.n(), &mut rng);
        let b0v = OpinionVector::Continuous(b0.clone());
        let Ok(report) = simulate_limit(&g, &b0v, UpdateRule::Continuous, &opts) else {
            behavior_ok = false;
            behavior_msg = "simulation error".into();
            bad_b0 = Some(b0v);
            break;
        };
        match (&verdict, &report.status) {
            (Verdict::Polarizes, LimitStatus::Converged { limit, .. }) => {
                let l = limit.as_continuous().unwrap();
                let cert = opp.as_ref().unwrap();
                let signs: Vec<f64> =
                    (0..g.n()).map(|i| cert.sign_of(i).unwrap()).collect();
                // least-squares polarization value over the certificate
                let a_fit: f64 =
                    signs.iter().zip(l).map(|(s, x)| s * x).sum::<f64>() / g.n() as f64;
                let split_ok = signs
                    .iter()
                    .zip(l)
                    .all(|(s, x)| (x - s * a_fit).abs() <= config.agreement_tol);
                if !split_ok {
                    behavior_ok = false;
                    behavior_msg = format!("limit not split as +-a by the certificate: {l:?}");
                    bad_b0 = Some(b0v.clone());
                }
                if let Some(inf) = &influence {
                    let (_, predicted) = inf.predict(&b0);
                    let ok = l
                        .iter()
                        .zip(&predicted)
                        .all(|(x, y)| (x - y).abs() <= config.agreement_tol);
                    tally.check("influence_formula", ok, trial, || {
                        (
                            format!("simulated limit {l:?} vs prediction {predicted:?}"),
                            Scenario::from_graph(&g, &b0v, Some(format!("trial_{trial}"))),
                        )
                    });
                }
            }
            (Verdict::NeutralConsensus, LimitStatus::Converged { limit, .. }) => {
                let l = limit.as_continuous().unwrap();
                if !l.iter().all(|x| x.abs() <= config.agreement_tol) {
                    behavior_ok = false;
                    behavior_msg = format!("expected the zero consensus, got {l:?}");
                    bad_b0 = Some(b0v.clone());
                }
            }
            (Verdict::Diverges, LimitStatus::Oscillating { period, .. }) => {
                all_converged = false;
                if *period == 2 {
                    oscillating_count += 1;
                } else {
                    behavior_ok = false;
                    behavior_msg = format!("divergent regime with period {period}, expected 2");
                    bad_b0 = Some(b0v.clone());
                }
            }
            (Verdict::Diverges, LimitStatus::Converged { limit, .. }) => {
                // possible only on the measure-zero alignment with decaying
                // eigenspaces; the limit must then be the zero vector
                let l = limit.as_continuous().unwrap();
                if !l.iter().all(|x| x.abs() <= config.agreement_tol) {
                    behavior_ok = false;
                    behavior_msg = format!("divergent regime converged to nonzero {l:?}");
                    bad_b0 = Some(b0v.clone());
                }
            }
            (_, LimitStatus::Oscillating { .. }) => {
                all_converged = false;
                behavior_ok = false;
                behavior_msg = format!("{verdict:?} regime oscillated");
                bad_b0 = Some(b0v.clone());
            }
            (_, LimitStatus::Undetermined { t_max }) => {
                all_converged = false;
                behavior_ok = false;
                behavior_msg = format!("undetermined after {t_max} steps");
                bad_b0 = Some(b0v.clone());
            }
        }
    }

    if verdict == Verdict::Diverges {
        // the certified two-step orbit must exist and verify
        let cert = rev.as_ref().unwrap();
        let orbit_ok = equilibria::build_oscillation_pair(
            &g,
            cert,
            Opinion::Value(1.0),
            Opinion::Value(-1.0),
        )
        .is_ok();
        if !orbit_ok {
            behavior_ok = false;
            behavior_msg = "certified oscillation pair failed to verify".into();
        }
        // generic initial profiles must actually oscillate
        if oscillating_count + 1 < config.b0_samples_per_graph {
            behavior_ok = false;
            behavior_msg = format!(
                "only {oscillating_count}/{} sampled starts oscillated",
                config.b0_samples_per_graph
            );
        }
    }
    tally.check("classification_vs_simulation", behavior_ok, trial, || {
        (
            format!("verdict {verdict:?}: {behavior_msg}"),
            Scenario::from_graph(
                &g,
                bad_b0
                    .as_ref()
                    .unwrap_or(&OpinionVector::Continuous(vec![0.0; g.n()])),
                Some(format!("trial_{trial}")),
            ),
        )
    });

    // limits exist for all tested starts iff rho < 1, or +1 present and
    // -1 absent (symmetric, so the unit eigenvalue is semisimple)
    let spectral_predicts_convergence =
        rho < 1.0 - EIG_MEMBERSHIP_TOL || (has_plus && !has_minus);
    tally.check(
        "spectral_consistency",
        spectral_predicts_convergence == all_converged,
        trial,
        || {
            (
                format!(
                    "spectral convergence prediction {spectral_predicts_convergence} vs \
                     simulated {all_converged} (rho = {rho})"
                ),
                dump(None),
            )
        },
    );
}

/// All limits of the discrete model are fixed points, and all consensus
/// limits are admissible: checked exhaustively on tiny instances.
fn run_discrete_lim_fix(config: &TrialConfig, instance: usize, tally: &mut Tally) {
    let mut rng = trial_rng(config.seed, 0x1000_0000 + instance as u64);
    let n = rng.gen_range(2..=3usize);
    let k = rng.gen_range(2..=3usize);
    let labels: Vec<String> = (0..k).map(|i| format!("s{i}")).collect();
    let spectrum = OpinionSpectrum::discrete(labels.clone()).unwrap();

    // per-agent single deviation functions, as the characterization needs
    let mut deviations = std::collections::BTreeMap::new();
    let mut agent_spec_ids = Vec::new();
    for i in 0..n {
        let spec = match rng.gen_range(0..4) {
            0 => DeviationSpec::Soft,
            1 => DeviationSpec::Hard {
                midpoint_to_upper: true,
            },
            2 => DeviationSpec::Constant {
                target: ConstantTarget::Label(labels[rng.gen_range(0..k)].clone()),
            },
            _ => {
                // a random non-identity total map
                loop {
                    let map: std::collections::BTreeMap<String, String> = labels
                        .iter()
                        .map(|l| (l.clone(), labels[rng.gen_range(0..k)].clone()))
                        .collect();
                    if map.iter().any(|(a, b)| a != b) {
                        break DeviationSpec::Table { map };
                    }
                }
            }
        };
        let id = format!("d{i}");
        deviations.insert(id.clone(), spec);
        agent_spec_ids.push(id);
    }

    let mut weights = vec![vec![0.0; n]; n];
    let mut relations = vec![vec![Relation::Follow; n]; n];
    for i in 0..n {
        let mut row: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
        let sum: f64 = row.iter().sum();
        row.iter_mut().for_each(|w| *w /= sum);
        weights[i] = row;
        for j in 0..n {
            if rng.gen_bool(0.5) {
                relations[i][j] = Relation::Deviate(agent_spec_ids[i].clone());
            }
        }
    }
    let Ok(g) = SignedMultigraph::try_new(weights, relations, deviations, spectrum) else {
        return;
    };

    let rule = UpdateRule::Discrete(TieRule::KeepCurrent);
    let Ok(fixed) = equilibria::brute_force_fixed_points(&g, TieRule::KeepCurrent) else {
        return;
    };
    let Ok(characterization) = equilibria::consensus_fixed_points(&g, rule) else {
        return;
    };
    let opts = SimOptions {
        t_max: 200,
        ..SimOptions::default()
    };

    let mut ok = true;
    let mut msg = String::new();
    let total = k.pow(n as u32);
    let mut bad_b0 = None;
    for code in 0..total {
        let mut b = vec![0usize; n];
        let mut c = code;
        for slot in b.iter_mut() {
            *slot = c % k;
            c /= k;
        }
        let b0 = OpinionVector::Discrete(b);
        let (_, report) = simulate(&g, &b0, rule, &opts).unwrap();
        if let LimitStatus::Converged { limit, .. } = &report.status {
            if !fixed.contains(limit) {
                ok = false;
                msg = format!("limit {limit:?} is not a fixed point");
                bad_b0 = Some(b0.clone());
                break;
            }
            let v = limit.as_discrete().unwrap();
            if v.iter().all(|&x| x == v[0])
                && !characterization.admissible.contains(&Opinion::Label(v[0]))
            {
                ok = false;
                msg = format!("consensus label {} is not admissible", v[0]);
                bad_b0 = Some(b0.clone());
                break;
            }
        }
    }
    tally.check("discrete_limits_are_fixed_points", ok, instance, || {
        (
            msg,
            Scenario::from_graph(
                &g,
                bad_b0
                    .as_ref()
                    .unwrap_or(&OpinionVector::Discrete(vec![0; n])),
                Some(format!("discrete_{instance}")),
            ),
        )
    });
}

/// Both update rules are per-agent best responses on zero-diagonal graphs:
/// the continuous step equals the closed-form quadratic minimizer, the
/// discrete step maximizes the matching utility over all labels.
fn run_best_response(config: &TrialConfig, instance: usize, tally: &mut Tally) {
    let mut rng = trial_rng(config.seed, 0x2000_0000 + instance as u64);
    let n = rng.gen_range(2..=6usize);

    // a zero-diagonal row-stochastic weight draw shared by both rules
    let mut weights = vec![vec![0.0; n]; n];
    for i in 0..n {
        let mut row: Vec<f64> = (0..n)
            .map(|j| if j == i { 0.0 } else { rng.gen_range(0.05..1.0) })
            .collect();
        let sum: f64 = row.iter().sum();
        row.iter_mut().for_each(|w| *w /= sum);
        weights[i] = row;
    }

    // continuous instance with a mix of deviation kinds
    {
        let specs = [
            ("soft", DeviationSpec::Soft),
            (
                "hard",
                DeviationSpec::Hard {
                    midpoint_to_upper: true,
                },
            ),
            ("halve", DeviationSpec::Affine { a: 0.5, b: 0.0 }),
            (
                "pin",
                DeviationSpec::Constant {
                    target: ConstantTarget::Value(0.3),
                },
            ),
            ("amplify", DeviationSpec::SignedPower { p: 2.0 }),
        ];
        let table: std::collections::BTreeMap<String, DeviationSpec> = specs
            .iter()
            .map(|(k, v)| (k.to_string(), v.clone()))
            .collect();
        let mut relations = vec![vec![Relation::Follow; n]; n];
        for (i, row) in relations.iter_mut().enumerate() {
            for (j, rel) in row.iter_mut().enumerate() {
                if i != j && rng.gen_bool(0.5) {
                    *rel = Relation::Deviate(specs[rng.gen_range(0..specs.len())].0.to_string());
                }
            }
        }
        let spectrum = OpinionSpectrum::interval(-1.0, 1.0).unwrap();
        if let Ok(g) = SignedMultigraph::try_new(weights.clone(), relations, table, spectrum) {
            let b = random_b0(n, &mut rng);
            let stepped = dynamics::step_continuous(&g, &b).unwrap();
            let mut ok = true;
            for i in 0..n {
                // closed-form argmax of the quadratic utility in b_i
                let mut best = 0.0;
                for j in 0..n {
                    let w = g.weight(i, j);
                    if w == 0.0 {
                        continue;
                    }
                    best += w * g.signal_value(i, j, b[j]).unwrap();
                }
                ok &= (stepped[i] - best).abs() <= 1e-10;
            }
            tally.check("best_response_continuous", ok, instance, || {
                (
                    "continuous step is not the utility argmax".into(),
                    Scenario::from_graph(
                        &g,
                        &OpinionVector::Continuous(b.clone()),
                        Some(format!("br_cont_{instance}")),
                    ),
                )
            });
        }
    }

    // discrete instance: the chosen label maximizes the matching utility
    {
        let k = rng.gen_range(2..=4usize);
        let labels: Vec<String> = (0..k).map(|i| format!("s{i}")).collect();
        let spectrum = OpinionSpectrum::discrete(labels).unwrap();
        let table: std::collections::BTreeMap<String, DeviationSpec> = [
            ("soft".to_string(), DeviationSpec::Soft),
            (
                "hard".to_string(),
                DeviationSpec::Hard {
                    midpoint_to_upper: true,
                },
            ),
        ]
        .into_iter()
        .collect();
        let mut relations = vec![vec![Relation::Follow; n]; n];
        for (i, row) in relations.iter_mut().enumerate() {
            for (j, rel) in row.iter_mut().enumerate() {
                if i != j && rng.gen_bool(0.5) {
                    let id = if rng.gen_bool(0.5) { "soft" } else { "hard" };
                    *rel = Relation::Deviate(id.to_string());
                }
            }
        }
        if let Ok(g) = SignedMultigraph::try_new(weights, relations, table, spectrum) {
            let b: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
            let stepped = dynamics::step_discrete(&g, &b, TieRule::KeepCurrent).unwrap();
            let mut ok = true;
            for i in 0..n {
                let mut trial_b = b.clone();
                let mut best_u = f64::NEG_INFINITY;
                for label in 0..k {
                    trial_b[i] = label;
                    best_u = best_u.max(dynamics::utility_discrete(&g, &trial_b, i).unwrap());
                }
                trial_b[i] = stepped[i];
                let chosen_u = dynamics::utility_discrete(&g, &trial_b, i).unwrap();
                ok &= chosen_u >= best_u; // exact: both are sums of weights
            }
            tally.check("best_response_discrete", ok, instance, || {
                (
                    "discrete step does not maximize the matching utility".into(),
                    Scenario::from_graph(
                        &g,
                        &OpinionVector::Discrete(b.clone()),
                        Some(format!("br_disc_{instance}")),
                    ),
                )
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forced_two_agent_sample() {
        let g = random_sslss(2, 1.0, 1.0, 7).unwrap();
        assert_eq!(g.weight(0, 0), 0.0);
        assert_eq!(g.weight(1, 1), 0.0);
        assert!((g.weight(0, 1) - 1.0).abs() <= 1e-12);
        assert!((g.weight(1, 0) - 1.0).abs() <= 1e-12);
        assert!(!g.relation(0, 1).is_follow());
        assert!(!g.relation(1, 0).is_follow());
    }

    #[test]
    fn same_seed_same_graph() {
        let a = random_sslss(6, 0.5, 0.5, 123).unwrap();
        let b = random_sslss(6, 0.5, 0.5, 123).unwrap();
        assert_eq!(a, b);
        let c = random_sslss(6, 0.5, 0.5, 124).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn samples_are_in_the_symmetric_soft_class() {
        for seed in 0..20 {
            let g = random_sslss(6, 0.5, 0.5, seed).unwrap();
            let report = g.is_sslss();
            assert!(report.is_sslss, "{:?}", report.problems);
            assert!(g.validate().is_valid());
        }
    }

    #[test]
    fn forced_patterns_have_their_certificates() {
        let all: Vec<usize> = (0..5).collect();
        for seed in 0..10 {
            let g =
                random_sslss_patterned(5, 0.6, 0.5, RegimePattern::ForcedOpposition, seed).unwrap();
            assert!(analysis::opposition_bipartition(&g, &all).is_some());
            let g =
                random_sslss_patterned(5, 0.6, 0.5, RegimePattern::ForcedReverse, seed).unwrap();
            assert!(analysis::reverse_opposition_bipartition(&g, &all).is_some());
            let g =
                random_sslss_patterned(5, 0.6, 0.5, RegimePattern::ForcedImbalanced, seed)
                    .unwrap();
            assert!(analysis::opposition_bipartition(&g, &all).is_none());
            assert!(analysis::reverse_opposition_bipartition(&g, &all).is_none());
        }
    }

    #[test]
    fn zero_trials_give_an_empty_report() {
        let config = TrialConfig {
            trials: 0,
            discrete_configs: 0,
            best_response_instances: 0,
            ..TrialConfig::default()
        };
        let report = run_trials(&config);
        assert!(report.properties.is_empty());
        assert!(report.all_pass());
    }

    #[test]
    fn small_run_passes_and_replays_identically() {
        let config = TrialConfig {
            trials: 40,
            discrete_configs: 10,
            best_response_instances: 20,
            ..TrialConfig::default()
        };
        let r1 = run_trials(&config);
        assert!(
            r1.all_pass(),
            "failures: {:?}",
            r1.properties
                .iter()
                .filter(|p| p.fail > 0)
                .map(|p| (&p.name, &p.counterexamples))
                .collect::<Vec<_>>()
        );
        let r2 = run_trials(&config);
        assert_eq!(r1.to_json_string(), r2.to_json_string());
    }

    #[test]
    fn counterexamples_replay_as_scenarios() {
        // force a fake failure record path by dumping a valid scenario and
        // rebuilding it
        let g = random_sslss(4, 0.7, 0.5, 5).unwrap();
        let b0 = OpinionVector::Continuous(vec![0.1, -0.2, 0.3, -0.4]);
        let dump = Scenario::from_graph(&g, &b0, Some("counterexample".into()));
        let (g2, b2) = dump.build(false).unwrap();
        assert_eq!(g, g2);
        assert_eq!(b0, b2);
    }
}
