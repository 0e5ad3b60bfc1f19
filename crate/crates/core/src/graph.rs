//! The signed multigraph: intensity weights W, relation matrix F, and
//! structural predicates.
//!
//! F is stored densely for all pairs, including zero-weight ones; structural
//! predicates only read relations on edges with `W_ij > EDGE_EPS`, mirroring
//! the fact that a relation is irrelevant when the weight is zero.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::spectrum::{DeviationSpec, Opinion, OpinionSpectrum};
use crate::{Error, Result, EDGE_EPS};

/// Row-stochasticity is enforced to this tolerance on validated graphs.
pub const ROW_SUM_TOL: f64 = 1e-12;

/// Tolerance for the symmetry check of the signed weight matrix.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Directed relation of agent `i` toward agent `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Relation {
    Follow,
    /// Deviate, applying the referenced deviation spec to `j`'s opinion.
    Deviate(String),
}

impl Relation {
    pub fn is_follow(&self) -> bool {
        matches!(self, Relation::Follow)
    }

    pub fn spec_id(&self) -> Option<&str> {
        match self {
            Relation::Follow => None,
            Relation::Deviate(id) => Some(id),
        }
    }
}

/// Parse a whitespace-separated relation grid: token `F` means follow, any
/// other token is a deviation spec id.
pub fn parse_relation_grid(rows: &[&str]) -> Vec<Vec<Relation>> {
    rows.iter()
        .map(|row| {
            row.split_whitespace()
                .map(|tok| {
                    if tok == "F" {
                        Relation::Follow
                    } else {
                        Relation::Deviate(tok.to_string())
                    }
                })
                .collect()
        })
        .collect()
}

/// A single validation finding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub code: ViolationCode,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationCode {
    TooFewAgents,
    Shape,
    NegativeWeight,
    RowSum,
    DanglingSpec,
    InvalidDeviation,
}

/// Report-style validation outcome; empty iff the graph is valid.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, code: ViolationCode) -> bool {
        self.violations.iter().any(|v| v.code == code)
    }
}

/// A length-n opinion profile, matching the graph's spectrum kind.
#[derive(Debug, Clone, PartialEq)]
pub enum OpinionVector {
    Continuous(Vec<f64>),
    Discrete(Vec<usize>),
}

impl OpinionVector {
    pub fn len(&self) -> usize {
        match self {
            OpinionVector::Continuous(v) => v.len(),
            OpinionVector::Discrete(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, i: usize) -> Opinion {
        match self {
            OpinionVector::Continuous(v) => Opinion::Value(v[i]),
            OpinionVector::Discrete(v) => Opinion::Label(v[i]),
        }
    }

    pub fn as_continuous(&self) -> Option<&[f64]> {
        match self {
            OpinionVector::Continuous(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_discrete(&self) -> Option<&[usize]> {
        match self {
            OpinionVector::Discrete(v) => Some(v),
            _ => None,
        }
    }

    /// Sup-norm distance. Discrete vectors are at distance 0 when equal and
    /// infinity otherwise, so tolerance comparisons work uniformly.
    pub fn sup_distance(&self, other: &OpinionVector) -> f64 {
        match (self, other) {
            (OpinionVector::Continuous(a), OpinionVector::Continuous(b)) => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max),
            (OpinionVector::Discrete(a), OpinionVector::Discrete(b)) => {
                if a == b {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            _ => f64::INFINITY,
        }
    }
}

/// The social network `W (.) F` over a fixed opinion spectrum.
///
/// Immutable after construction; freely shareable across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedMultigraph {
    n: usize,
    weights: Vec<Vec<f64>>,
    relations: Vec<Vec<Relation>>,
    deviations: BTreeMap<String, DeviationSpec>,
    spectrum: OpinionSpectrum,
    /// Per spec id, the resolved label map for discrete spectra.
    label_maps: BTreeMap<String, Vec<usize>>,
}

impl SignedMultigraph {
    /// Build and validate; the combined report becomes the error on failure.
    pub fn try_new(
        weights: Vec<Vec<f64>>,
        relations: Vec<Vec<Relation>>,
        deviations: BTreeMap<String, DeviationSpec>,
        spectrum: OpinionSpectrum,
    ) -> Result<Self> {
        let g = Self::new_unchecked(weights, relations, deviations, spectrum);
        let report = g.validate();
        if report.is_valid() {
            Ok(g)
        } else {
            let msgs: Vec<String> = report.violations.iter().map(|v| v.message.clone()).collect();
            Err(Error::Scenario(msgs.join("; ")))
        }
    }

    /// Build without validation, so broken inputs can still be inspected
    /// through [`validate`](Self::validate).
    pub fn new_unchecked(
        weights: Vec<Vec<f64>>,
        relations: Vec<Vec<Relation>>,
        deviations: BTreeMap<String, DeviationSpec>,
        spectrum: OpinionSpectrum,
    ) -> Self {
        let n = weights.len();
        let mut label_maps = BTreeMap::new();
        if let Some(labels) = spectrum.labels() {
            for (id, spec) in &deviations {
                let map: Option<Vec<usize>> = (0..labels.len())
                    .map(|k| spec.eval_label(&spectrum, labels, k).ok())
                    .collect();
                if let Some(map) = map {
                    label_maps.insert(id.clone(), map);
                }
            }
        }
        SignedMultigraph {
            n,
            weights,
            relations,
            deviations,
            spectrum,
            label_maps,
        }
    }

    /// List every violated construction invariant; empty iff valid.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        fn push(violations: &mut Vec<Violation>, code: ViolationCode, message: String) {
            violations.push(Violation { code, message });
        }

        if self.n < 2 {
            push(
                &mut violations,
                ViolationCode::TooFewAgents,
                format!("need at least 2 agents, got {}", self.n),
            );
        }
        if self.weights.iter().any(|r| r.len() != self.n) || self.relations.len() != self.n {
            push(&mut violations, ViolationCode::Shape, "weight matrix must be square n x n".into());
        }
        if self
            .relations
            .iter()
            .any(|r| r.len() != self.n)
        {
            push(&mut violations, ViolationCode::Shape, "relation matrix must be square n x n".into());
        }
        if !violations.is_empty() && violations.iter().any(|v| v.code == ViolationCode::Shape) {
            // Row-level checks below index by [i][j]; bail on ragged input.
            return ValidationReport { violations };
        }

        for (i, row) in self.weights.iter().enumerate() {
            for (j, &w) in row.iter().enumerate() {
                if !w.is_finite() || w < 0.0 {
                    push(
                        &mut violations,
                        ViolationCode::NegativeWeight,
                        format!("W[{}][{}] = {w} must be finite and nonnegative", i + 1, j + 1),
                    );
                }
            }
            let sum: f64 = row.iter().sum();
            if !sum.is_finite() || (sum - 1.0).abs() > ROW_SUM_TOL {
                push(
                    &mut violations,
                    ViolationCode::RowSum,
                    format!("row {} sums to {sum}, not 1", i + 1),
                );
            }
        }

        let mut checked: BTreeMap<&str, bool> = BTreeMap::new();
        for i in 0..self.n {
            for j in 0..self.n {
                if let Relation::Deviate(id) = &self.relations[i][j] {
                    match self.deviations.get(id) {
                        None => {
                            if checked.insert(id, false).is_none() {
                                push(
                                    &mut violations,
                                    ViolationCode::DanglingSpec,
                                    format!("relation ({},{}) references unknown spec `{id}`", i + 1, j + 1),
                                );
                            }
                        }
                        Some(spec) => {
                            if checked.insert(id, true).is_none() {
                                for problem in spec.binding_problems(&self.spectrum) {
                                    push(
                                        &mut violations,
                                        ViolationCode::InvalidDeviation,
                                        format!("spec `{id}`: {problem}"),
                                    );
                                }
                            }
                        }
                    }
                }
            }
        }

        ValidationReport { violations }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn spectrum(&self) -> &OpinionSpectrum {
        &self.spectrum
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i][j]
    }

    pub fn relation(&self, i: usize, j: usize) -> &Relation {
        &self.relations[i][j]
    }

    pub fn relations(&self) -> &[Vec<Relation>] {
        &self.relations
    }

    pub fn deviations(&self) -> &BTreeMap<String, DeviationSpec> {
        &self.deviations
    }

    pub fn deviation(&self, id: &str) -> Option<&DeviationSpec> {
        self.deviations.get(id)
    }

    /// True iff the directed edge `i -> j` exists (weight above noise).
    pub fn is_edge(&self, i: usize, j: usize) -> bool {
        self.weights[i][j] > EDGE_EPS
    }

    /// `Out(i)`: agents `i` deviates from, by relation kind alone
    /// (zero-weight neighbors included, as defined).
    pub fn out_group(&self, i: usize) -> Vec<usize> {
        (0..self.n)
            .filter(|&j| !self.relations[i][j].is_follow())
            .collect()
    }

    /// `In(i)`: agents `i` follows.
    pub fn in_group(&self, i: usize) -> Vec<usize> {
        (0..self.n)
            .filter(|&j| self.relations[i][j].is_follow())
            .collect()
    }

    /// Total weight mass `i` assigns to a set of agents.
    pub fn weight_mass(&self, i: usize, agents: &[usize]) -> f64 {
        agents.iter().map(|&j| self.weights[i][j]).sum()
    }

    /// `W_{i,Out(i)}`, the out-group weight of agent `i`.
    pub fn out_weight(&self, i: usize) -> f64 {
        self.weight_mass(i, &self.out_group(i))
    }

    /// The continuous signal `F_ij(x)` that agent `i` reads from `j`.
    pub fn signal_value(&self, i: usize, j: usize, x: f64) -> Result<f64> {
        match &self.relations[i][j] {
            Relation::Follow => Ok(x),
            Relation::Deviate(id) => {
                let spec = self.deviations.get(id).ok_or_else(|| {
                    Error::Scenario(format!("dangling deviation spec `{id}`"))
                })?;
                spec.eval_value(&self.spectrum, x)
            }
        }
    }

    /// The discrete signal `F_ij(A_k)` (as a label index).
    pub fn signal_label(&self, i: usize, j: usize, k: usize) -> Result<usize> {
        match &self.relations[i][j] {
            Relation::Follow => Ok(k),
            Relation::Deviate(id) => self
                .label_maps
                .get(id)
                .and_then(|m| m.get(k).copied())
                .ok_or_else(|| Error::Scenario(format!("deviation spec `{id}` unusable here"))),
        }
    }

    /// Distinct deviation spec ids appearing on edges with positive weight.
    pub fn used_spec_ids(&self) -> Vec<&str> {
        let mut ids: Vec<&str> = Vec::new();
        for i in 0..self.n {
            for j in 0..self.n {
                if self.is_edge(i, j) {
                    if let Relation::Deviate(id) = &self.relations[i][j] {
                        if !ids.contains(&id.as_str()) {
                            ids.push(id);
                        }
                    }
                }
            }
        }
        ids.sort_unstable();
        ids
    }

    /// Signed weight matrix: `+W_ij` on follow edges, `-W_ij` on deviate
    /// edges. Coincides with the affine representation `A` when the only
    /// deviation in play is soft opposition on a symmetric spectrum.
    pub fn signed_weights(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| match &self.relations[i][j] {
                        Relation::Follow => self.weights[i][j],
                        Relation::Deviate(_) => -self.weights[i][j],
                    })
                    .collect()
            })
            .collect()
    }

    /// Membership test for the simple symmetric soft-opposition class the
    /// classification theory is stated on: zero diagonal, only soft
    /// opposition in use, a symmetric spectrum, and a symmetric signed
    /// weight matrix.
    pub fn is_sslss(&self) -> SslsReport {
        let mut problems = Vec::new();
        for i in 0..self.n {
            if self.weights[i][i] > EDGE_EPS {
                problems.push(format!("self-loop: W[{0}][{0}] = {1}", i + 1, self.weights[i][i]));
            }
        }
        if !self.spectrum.is_symmetric_interval() {
            problems.push(format!(
                "spectrum {} is not a symmetric interval or the real line",
                self.spectrum
            ));
        }
        for id in self.used_spec_ids() {
            match self.deviations.get(id) {
                Some(DeviationSpec::Soft) => {}
                Some(other) => problems.push(format!(
                    "deviation `{id}` is {}, not soft opposition",
                    other.kind_name()
                )),
                None => problems.push(format!("dangling deviation spec `{id}`")),
            }
        }
        let a = self.signed_weights();
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                worst = worst.max((a[i][j] - a[j][i]).abs());
            }
        }
        if worst > SYMMETRY_TOL {
            problems.push(format!(
                "signed weight matrix is asymmetric (max |A_ij - A_ji| = {worst:e})"
            ));
        }
        SslsReport {
            is_sslss: problems.is_empty(),
            problems,
        }
    }

    /// Subgraph induced by `subset` (0-based, deduplicated order preserved),
    /// with rows renormalized over the subset. Errors if some row loses all
    /// of its mass.
    pub fn induced_subgraph(&self, subset: &[usize]) -> Result<SignedMultigraph> {
        if subset.len() < 2 {
            return Err(Error::InvalidInput(
                "induced subgraph needs at least 2 agents".into(),
            ));
        }
        if subset.iter().any(|&i| i >= self.n) {
            return Err(Error::InvalidInput("subset index out of range".into()));
        }
        let mut weights = Vec::with_capacity(subset.len());
        let mut relations = Vec::with_capacity(subset.len());
        for &i in subset {
            let mass: f64 = subset.iter().map(|&j| self.weights[i][j]).sum();
            if mass <= EDGE_EPS {
                return Err(Error::InvalidInput(format!(
                    "agent {} has no weight mass inside the subset",
                    i + 1
                )));
            }
            weights.push(subset.iter().map(|&j| self.weights[i][j] / mass).collect());
            relations.push(subset.iter().map(|&j| self.relations[i][j].clone()).collect());
        }
        Ok(SignedMultigraph::new_unchecked(
            weights,
            relations,
            self.deviations.clone(),
            self.spectrum.clone(),
        ))
    }

    /// The complementary relation pattern: every follow edge becomes a
    /// deviate edge carrying `spec_id`, every deviate edge becomes follow.
    pub fn flip_relations(&self, spec_id: &str) -> Result<SignedMultigraph> {
        if !self.deviations.contains_key(spec_id) {
            return Err(Error::InvalidInput(format!(
                "unknown deviation spec `{spec_id}`"
            )));
        }
        let relations = self
            .relations
            .iter()
            .map(|row| {
                row.iter()
                    .map(|r| match r {
                        Relation::Follow => Relation::Deviate(spec_id.to_string()),
                        Relation::Deviate(_) => Relation::Follow,
                    })
                    .collect()
            })
            .collect();
        Ok(SignedMultigraph::new_unchecked(
            self.weights.clone(),
            relations,
            self.deviations.clone(),
            self.spectrum.clone(),
        ))
    }

    /// Check an opinion vector against the graph's size and spectrum.
    pub fn check_vector(&self, b: &OpinionVector) -> Result<()> {
        if b.len() != self.n {
            return Err(Error::InvalidInput(format!(
                "opinion vector has length {}, graph has {} agents",
                b.len(),
                self.n
            )));
        }
        for i in 0..self.n {
            let x = b.get(i);
            if !self.spectrum.contains(&x) {
                return Err(Error::OutOfSpectrum {
                    value: format!("b[{}]", i + 1),
                    spectrum: self.spectrum.to_string(),
                });
            }
        }
        Ok(())
    }
}

/// Outcome of the simple/symmetric/soft-opposition membership test.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SslsReport {
    pub is_sslss: bool,
    pub problems: Vec<String>,
}
