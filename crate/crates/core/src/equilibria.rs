//! Fixed points, consensus characterization, constructed equilibria
//! (polarizations, multipolarizations, oscillation pairs), exhaustive
//! discrete search, and wisdom verdicts.

use serde::{Deserialize, Serialize};

use crate::analysis::{
    self, BipartitionCertificate, CertificateKind,
};
use crate::dynamics::{self, step, TieRule, UpdateRule};
use crate::graph::{OpinionVector, Relation, SignedMultigraph};
use crate::spectrum::{DeviationSpec, FixedPointSet, Opinion};
use crate::{Error, Result, EDGE_EPS};

/// Default tolerance for continuous fixed-point checks.
pub const FIXED_POINT_TOL: f64 = 1e-10;

/// Which consensus values can survive in the long run: exactly the common
/// fixed points of the deviation functions of agents whose out-group weight
/// exceeds the threshold (0 continuous, 1/2 discrete).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsensusCharacterization {
    /// A = agents with out-group weight above the threshold.
    pub strong_out_agents: Vec<usize>,
    pub threshold: f64,
    /// Intersection of their deviation fixed-point sets; the whole spectrum
    /// when A is empty.
    pub admissible: FixedPointSet,
    /// Set iff the admissible set is empty: no consensus can ever form.
    pub persistent_disagreement: bool,
}

/// The single deviation spec agent `i` applies on positively weighted
/// deviate edges; `Ok(None)` when it has none, an error when it mixes
/// several distinct functions (the characterization is then unavailable).
fn agent_deviation(
    g: &SignedMultigraph,
    i: usize,
) -> Result<Option<(&str, &DeviationSpec)>> {
    let mut found: Option<(&str, &DeviationSpec)> = None;
    for j in 0..g.n() {
        if !g.is_edge(i, j) {
            continue;
        }
        if let Relation::Deviate(id) = g.relation(i, j) {
            let spec = g
                .deviation(id)
                .ok_or_else(|| Error::Scenario(format!("dangling spec `{id}`")))?;
            match &found {
                None => found = Some((id, spec)),
                Some((_, prev)) if *prev == spec => {}
                Some((prev_id, _)) => {
                    return Err(Error::Unavailable(format!(
                        "agent {} applies distinct deviation functions `{prev_id}` and `{id}`; \
                         per-pair heterogeneity has no consensus characterization",
                        i + 1
                    )))
                }
            }
        }
    }
    Ok(found)
}

/// Characterize all consensus values reachable in the long run.
/// Requires each agent to apply a single deviation function.
pub fn consensus_fixed_points(
    g: &SignedMultigraph,
    rule: UpdateRule,
) -> Result<ConsensusCharacterization> {
    let threshold = match rule {
        UpdateRule::Continuous => 0.0,
        UpdateRule::Discrete(_) => 0.5,
    };
    let mut specs = Vec::with_capacity(g.n());
    for i in 0..g.n() {
        specs.push(agent_deviation(g, i)?);
    }
    let mut strong = Vec::new();
    let mut admissible = FixedPointSet::WholeSpectrum;
    for i in 0..g.n() {
        let out_weight = g.out_weight(i);
        if out_weight > f64::max(threshold, EDGE_EPS) {
            strong.push(i);
            if let Some((_, spec)) = specs[i] {
                admissible = admissible.intersect(&spec.fixed_points(g.spectrum()));
            }
        }
    }
    let persistent_disagreement = admissible.is_empty();
    Ok(ConsensusCharacterization {
        strong_out_agents: strong,
        threshold,
        admissible,
        persistent_disagreement,
    })
}

/// True iff one update step returns `b` (exactly for discrete states,
/// within `tol` for continuous ones).
pub fn is_fixed_point(
    g: &SignedMultigraph,
    b: &OpinionVector,
    rule: UpdateRule,
    tol: f64,
) -> Result<bool> {
    let next = step(g, b, rule)?;
    Ok(next.sup_distance(b) <= tol)
}

/// The single deviation function in play on positively weighted edges,
/// falling back to any spec in the table for all-follow graphs.
fn graph_deviation(g: &SignedMultigraph) -> Result<Option<&DeviationSpec>> {
    let ids = g.used_spec_ids();
    let mut unique: Option<&DeviationSpec> = None;
    for id in &ids {
        let spec = g
            .deviation(id)
            .ok_or_else(|| Error::Scenario(format!("dangling spec `{id}`")))?;
        match unique {
            None => unique = Some(spec),
            Some(prev) if prev == spec => {}
            Some(_) => {
                return Err(Error::InvalidInput(
                    "the construction needs a single deviation function".into(),
                ))
            }
        }
    }
    if unique.is_none() {
        unique = g.deviations().values().next();
    }
    Ok(unique)
}

fn certificate_covers_all(g: &SignedMultigraph, cert: &BipartitionCertificate) -> Result<()> {
    if cert.side1.len() + cert.side2.len() != g.n() {
        return Err(Error::InvalidInput(
            "certificate must cover every agent of the graph".into(),
        ));
    }
    Ok(())
}

fn opposing_or_error(g: &SignedMultigraph, x: Opinion, y: Opinion) -> Result<()> {
    if !g.spectrum().contains(&x) || !g.spectrum().contains(&y) {
        return Err(Error::InvalidInput("opinions outside the spectrum".into()));
    }
    match graph_deviation(g)? {
        Some(spec) => {
            if spec.are_opposing_viewpoints(g.spectrum(), x, y) {
                Ok(())
            } else {
                Err(Error::InvalidInput(
                    "the two opinions are not opposing viewpoints of the deviation function"
                        .into(),
                ))
            }
        }
        None => {
            if x.approx_eq(&y) {
                Ok(())
            } else {
                Err(Error::InvalidInput(
                    "without deviate edges only equal opinions can polarize".into(),
                ))
            }
        }
    }
}

fn vector_from_sides(
    g: &SignedMultigraph,
    cert: &BipartitionCertificate,
    x: Opinion,
    y: Opinion,
) -> OpinionVector {
    if g.spectrum().is_continuous() {
        let mut v = vec![0.0; g.n()];
        for &i in &cert.side1 {
            v[i] = x.as_value().unwrap();
        }
        for &i in &cert.side2 {
            v[i] = y.as_value().unwrap();
        }
        OpinionVector::Continuous(v)
    } else {
        let mut v = vec![0usize; g.n()];
        for &i in &cert.side1 {
            v[i] = x.as_label().unwrap();
        }
        for &i in &cert.side2 {
            v[i] = y.as_label().unwrap();
        }
        OpinionVector::Discrete(v)
    }
}

fn rule_for(g: &SignedMultigraph) -> UpdateRule {
    UpdateRule::default_for(g)
}

/// Place opposing viewpoints `x` on side 1 and `y` on side 2 of an
/// opposition bipartition; the result is a fixed point, which is asserted.
pub fn build_polarization(
    g: &SignedMultigraph,
    cert: &BipartitionCertificate,
    x: Opinion,
    y: Opinion,
) -> Result<OpinionVector> {
    if cert.kind != CertificateKind::Opposition {
        return Err(Error::InvalidInput(
            "polarization needs an opposition certificate".into(),
        ));
    }
    certificate_covers_all(g, cert)?;
    opposing_or_error(g, x, y)?;
    let p = vector_from_sides(g, cert, x, y);
    if !is_fixed_point(g, &p, rule_for(g), FIXED_POINT_TOL)? {
        return Err(Error::InvalidInput(
            "constructed polarization is not a fixed point; certificate or opinions invalid"
                .into(),
        ));
    }
    Ok(p)
}

/// Assign target `s_l` to every agent of part `l` of a verified opposition
/// k-partition. Needs group-specific deviation functions with
/// `D_i(s_j) = s_i` for all `i != j`, which is checked by evaluation.
pub fn build_multipolarization(
    g: &SignedMultigraph,
    partition: &[Vec<usize>],
    targets: &[Opinion],
) -> Result<OpinionVector> {
    if targets.len() != partition.len() {
        return Err(Error::InvalidInput(
            "one target opinion per part is required".into(),
        ));
    }
    if !analysis::verify_k_partition(g, partition)? {
        return Err(Error::InvalidInput(
            "the partition is not an opposition k-partition".into(),
        ));
    }
    // one deviation function per part, read off its members' deviate edges
    let mut part_specs: Vec<Option<&DeviationSpec>> = Vec::new();
    for (l, part) in partition.iter().enumerate() {
        let mut spec: Option<&DeviationSpec> = None;
        for &i in part {
            if let Some((_, s)) = agent_deviation(g, i)? {
                match spec {
                    None => spec = Some(s),
                    Some(prev) if prev == s => {}
                    Some(_) => {
                        return Err(Error::InvalidInput(format!(
                            "part {} mixes distinct deviation functions",
                            l + 1
                        )))
                    }
                }
            }
        }
        part_specs.push(spec);
    }
    for (l, spec) in part_specs.iter().enumerate() {
        let Some(spec) = spec else { continue };
        for (m, target) in targets.iter().enumerate() {
            if l == m {
                continue;
            }
            let image = spec.eval(g.spectrum(), *target)?;
            if !image.approx_eq(&targets[l]) {
                return Err(Error::InvalidInput(format!(
                    "deviation of part {} maps target of part {} away from its own target",
                    l + 1,
                    m + 1
                )));
            }
        }
    }

    let p = if g.spectrum().is_continuous() {
        let mut v = vec![0.0; g.n()];
        for (part, target) in partition.iter().zip(targets) {
            for &i in part {
                v[i] = target.as_value().ok_or_else(|| {
                    Error::InvalidInput("continuous spectrum needs value targets".into())
                })?;
            }
        }
        OpinionVector::Continuous(v)
    } else {
        let mut v = vec![0usize; g.n()];
        for (part, target) in partition.iter().zip(targets) {
            for &i in part {
                v[i] = target.as_label().ok_or_else(|| {
                    Error::InvalidInput("discrete spectrum needs label targets".into())
                })?;
            }
        }
        OpinionVector::Discrete(v)
    };
    if !is_fixed_point(g, &p, rule_for(g), FIXED_POINT_TOL)? {
        return Err(Error::InvalidInput(
            "constructed multipolarization is not a fixed point".into(),
        ));
    }
    Ok(p)
}

/// Complementary pair on a reverse opposition bipartition: `x` on side 1
/// and `y` on side 2, and the swap. One step maps each onto the other,
/// which is asserted. Equal neutral opinions give the degenerate 1-cycle.
pub fn build_oscillation_pair(
    g: &SignedMultigraph,
    cert: &BipartitionCertificate,
    x: Opinion,
    y: Opinion,
) -> Result<(OpinionVector, OpinionVector)> {
    if cert.kind != CertificateKind::ReverseOpposition {
        return Err(Error::InvalidInput(
            "oscillation pairs need a reverse opposition certificate".into(),
        ));
    }
    certificate_covers_all(g, cert)?;
    opposing_or_error(g, x, y)?;
    let p = vector_from_sides(g, cert, x, y);
    let p_bar = vector_from_sides(g, cert, y, x);
    let rule = rule_for(g);
    let to_bar = step(g, &p, rule)?;
    let back = step(g, &p_bar, rule)?;
    if to_bar.sup_distance(&p_bar) > FIXED_POINT_TOL || back.sup_distance(&p) > FIXED_POINT_TOL {
        return Err(Error::InvalidInput(
            "constructed pair is not a two-step orbit".into(),
        ));
    }
    Ok((p, p_bar))
}

/// Exhaustively enumerate all discrete opinion vectors and keep the fixed
/// points. Refuses when `K^n` exceeds the bound.
pub const BRUTE_FORCE_BOUND: u128 = 1_000_000;

pub fn brute_force_fixed_points(
    g: &SignedMultigraph,
    tie: TieRule,
) -> Result<Vec<OpinionVector>> {
    let k = g.spectrum().label_count().ok_or_else(|| {
        Error::WrongRule("exhaustive search is for discrete spectra only".into())
    })?;
    let n = g.n();
    let states = (k as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if states > BRUTE_FORCE_BOUND {
        return Err(Error::SizeBound {
            states,
            bound: BRUTE_FORCE_BOUND,
        });
    }
    let mut fixed = Vec::new();
    let mut b = vec![0usize; n];
    loop {
        if dynamics::step_discrete(g, &b, tie)? == b {
            fixed.push(OpinionVector::Discrete(b.clone()));
        }
        // odometer increment
        let mut pos = 0;
        loop {
            if pos == n {
                return Ok(fixed);
            }
            b[pos] += 1;
            if b[pos] < k {
                break;
            }
            b[pos] = 0;
            pos += 1;
        }
    }
}

/// Can society's long-run opinion coincide with an exogenous value `mu`?
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WisdomVerdict {
    /// `mu` is outside the admissible consensus set: never attained, for
    /// any initial profile.
    NeverWise,
    /// Strongly connected symmetric soft-opposition network that is neither
    /// opposition nor reverse opposition bipartite: the neutral consensus 0
    /// is reached from every initial profile.
    WiseForAllInitial,
    /// `mu` is admissible but no covered statement guarantees attainment.
    ConditionallyWise,
}

pub fn wisdom_verdict(
    g: &SignedMultigraph,
    mu: Opinion,
    rule: UpdateRule,
) -> Result<WisdomVerdict> {
    if !g.spectrum().contains(&mu) {
        return Err(Error::OutOfSpectrum {
            value: format!("{mu:?}"),
            spectrum: g.spectrum().to_string(),
        });
    }
    let characterization = consensus_fixed_points(g, rule)?;
    if !characterization.admissible.contains(&mu) {
        return Ok(WisdomVerdict::NeverWise);
    }
    let all: Vec<usize> = (0..g.n()).collect();
    let neutral_zero = mu.as_value().map(|v| v.abs() <= 1e-12).unwrap_or(false);
    if neutral_zero
        && g.is_sslss().is_sslss
        && analysis::is_strongly_connected(g, &all)
        && analysis::opposition_bipartition(g, &all).is_none()
        && analysis::reverse_opposition_bipartition(g, &all).is_none()
    {
        return Ok(WisdomVerdict::WiseForAllInitial);
    }
    Ok(WisdomVerdict::ConditionallyWise)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_relation_grid;
    use crate::spectrum::OpinionSpectrum;
    use crate::testutil::*;
    use std::collections::BTreeMap;

    #[test]
    fn soft_opposition_admits_only_the_neutral_consensus() {
        let g = deviate_triangle();
        let c = consensus_fixed_points(&g, UpdateRule::Continuous).unwrap();
        assert_eq!(c.strong_out_agents, vec![0, 1, 2]);
        assert_eq!(c.admissible, FixedPointSet::Values(vec![0.0]));
        assert!(!c.persistent_disagreement);
    }

    #[test]
    fn clashing_neutral_opinions_mean_persistent_disagreement() {
        // the first five agents of the heterogeneous society: fixed points
        // {1}, {1}, {-1}, {0}, {0} have empty intersection
        let g = complex_society().induced_subgraph(&[0, 1, 2, 3, 4]).unwrap();
        let c = consensus_fixed_points(&g, UpdateRule::Continuous).unwrap();
        assert!(c.persistent_disagreement);
        assert!(c.admissible.is_empty());
    }

    #[test]
    fn all_follow_admits_every_consensus() {
        let g = complete_follow(3);
        let c = consensus_fixed_points(&g, UpdateRule::Continuous).unwrap();
        assert!(c.strong_out_agents.is_empty());
        assert_eq!(c.admissible, FixedPointSet::WholeSpectrum);
    }

    #[test]
    fn per_pair_heterogeneity_has_no_characterization() {
        // agent 6 mixes mirror and amplify deviations
        let g = complex_society();
        assert!(matches!(
            consensus_fixed_points(&g, UpdateRule::Continuous),
            Err(Error::Unavailable(_))
        ));
    }

    #[test]
    fn discrete_threshold_is_one_half() {
        // agent 1 deviates with weight exactly 1/2: not counted
        let g = SignedMultigraph::try_new(
            vec![vec![0.5, 0.5], vec![0.0, 1.0]],
            parse_relation_grid(&["F soft", "F F"]),
            soft_specs(),
            OpinionSpectrum::discrete(["0", "1"]).unwrap(),
        )
        .unwrap();
        let c = consensus_fixed_points(&g, UpdateRule::Discrete(TieRule::KeepCurrent)).unwrap();
        assert!(c.strong_out_agents.is_empty());
        assert_eq!(c.threshold, 0.5);
    }

    #[test]
    fn fixed_point_checks() {
        let g = example_multiple();
        // (L, L, L, M, R, R)
        let p = OpinionVector::Discrete(vec![0, 0, 0, 1, 2, 2]);
        assert!(is_fixed_point(&g, &p, UpdateRule::Discrete(TieRule::KeepCurrent), 0.0).unwrap());

        let g = two_agent_soft();
        let zero = OpinionVector::Continuous(vec![0.0, 0.0]);
        assert!(is_fixed_point(&g, &zero, UpdateRule::Continuous, FIXED_POINT_TOL).unwrap());
        let split = OpinionVector::Continuous(vec![1.0, -1.0]);
        assert!(!is_fixed_point(&g, &split, UpdateRule::Continuous, FIXED_POINT_TOL).unwrap());
    }

    #[test]
    fn polarization_on_the_discrete_block_example() {
        let g = example_bip();
        let cert = analysis::opposition_bipartition(&g, &[0, 1, 2, 3]).unwrap();
        // "unlikely" = 1, "likely" = 3 under soft label reversal
        let p = build_polarization(&g, &cert, Opinion::Label(1), Opinion::Label(3)).unwrap();
        assert_eq!(p, OpinionVector::Discrete(vec![1, 1, 3, 3]));
    }

    #[test]
    fn polarization_on_the_balanced_triangle() {
        let g = example_general().induced_subgraph(&[0, 1, 2]).unwrap();
        let cert = analysis::opposition_bipartition(&g, &[0, 1, 2]).unwrap();
        let p = build_polarization(&g, &cert, Opinion::Value(1.0), Opinion::Value(-1.0)).unwrap();
        assert_eq!(p, OpinionVector::Continuous(vec![1.0, -1.0, -1.0]));
    }

    #[test]
    fn degenerate_polarization_is_a_neutral_consensus() {
        let g = complete_follow(3);
        let cert = analysis::opposition_bipartition(&g, &[0, 1, 2]).unwrap();
        assert!(cert.side2.is_empty());
        let p = build_polarization(&g, &cert, Opinion::Value(0.0), Opinion::Value(0.0)).unwrap();
        assert_eq!(p, OpinionVector::Continuous(vec![0.0, 0.0, 0.0]));
    }

    #[test]
    fn non_opposing_opinions_are_rejected() {
        let g = example_general().induced_subgraph(&[0, 1, 2]).unwrap();
        let cert = analysis::opposition_bipartition(&g, &[0, 1, 2]).unwrap();
        let err = build_polarization(&g, &cert, Opinion::Value(1.0), Opinion::Value(0.5));
        assert!(matches!(err, Err(Error::InvalidInput(_))));
    }

    #[test]
    fn multipolarization_of_the_three_camp_society() {
        let g = example_multiple();
        let partition = vec![vec![0, 1, 2], vec![3], vec![4, 5]];
        let targets = [Opinion::Label(0), Opinion::Label(1), Opinion::Label(2)];
        let p = build_multipolarization(&g, &partition, &targets).unwrap();
        assert_eq!(p, OpinionVector::Discrete(vec![0, 0, 0, 1, 2, 2]));
    }

    #[test]
    fn multipolarization_with_two_parts_matches_polarization() {
        let g = example_bip();
        let partition = vec![vec![0, 1], vec![2, 3]];
        let targets = [Opinion::Label(1), Opinion::Label(3)];
        let via_multi = build_multipolarization(&g, &partition, &targets).unwrap();
        let cert = analysis::opposition_bipartition(&g, &[0, 1, 2, 3]).unwrap();
        let via_pol = build_polarization(&g, &cert, Opinion::Label(1), Opinion::Label(3)).unwrap();
        assert_eq!(via_multi, via_pol);
    }

    #[test]
    fn violated_target_condition_identifies_the_parts() {
        let g = example_multiple();
        let partition = vec![vec![0, 1, 2], vec![3], vec![4, 5]];
        // part 1 deviates everything to L, so target M for part 1 fails
        let targets = [Opinion::Label(1), Opinion::Label(1), Opinion::Label(2)];
        match build_multipolarization(&g, &partition, &targets) {
            Err(Error::InvalidInput(msg)) => {
                assert!(msg.contains("part 1"), "got: {msg}");
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn oscillation_pair_on_the_reverse_block_example() {
        let g = example_opp();
        let cert = analysis::reverse_opposition_bipartition(&g, &[0, 1, 2, 3]).unwrap();
        let (p, p_bar) =
            build_oscillation_pair(&g, &cert, Opinion::Label(1), Opinion::Label(3)).unwrap();
        assert_eq!(p, OpinionVector::Discrete(vec![1, 1, 3, 3]));
        assert_eq!(p_bar, OpinionVector::Discrete(vec![3, 3, 1, 1]));
    }

    #[test]
    fn oscillation_pair_on_the_mutual_deviate_pair() {
        // both agents deviate from each other; the reverse certificate puts
        // them on one side, so the orbit alternates all-ones/all-minus-ones
        let g = SignedMultigraph::try_new(
            vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            parse_relation_grid(&["F soft", "soft F"]),
            soft_specs(),
            unit_interval(),
        )
        .unwrap();
        let cert = analysis::reverse_opposition_bipartition(&g, &[0, 1]).unwrap();
        assert_eq!(cert.side1, vec![0, 1]);
        let (p, p_bar) =
            build_oscillation_pair(&g, &cert, Opinion::Value(1.0), Opinion::Value(-1.0)).unwrap();
        assert_eq!(p, OpinionVector::Continuous(vec![1.0, 1.0]));
        assert_eq!(p_bar, OpinionVector::Continuous(vec![-1.0, -1.0]));
    }

    #[test]
    fn degenerate_oscillation_is_a_consensus() {
        let g = example_opp();
        let cert = analysis::reverse_opposition_bipartition(&g, &[0, 1, 2, 3]).unwrap();
        // "possible" (index 2) is the neutral middle label
        let (p, p_bar) =
            build_oscillation_pair(&g, &cert, Opinion::Label(2), Opinion::Label(2)).unwrap();
        assert_eq!(p, p_bar);
    }

    #[test]
    fn brute_force_on_mutual_followers() {
        let g = SignedMultigraph::try_new(
            vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            parse_relation_grid(&["F F", "F F"]),
            soft_specs(),
            OpinionSpectrum::discrete(["0", "1"]).unwrap(),
        )
        .unwrap();
        let fixed = brute_force_fixed_points(&g, TieRule::KeepCurrent).unwrap();
        assert_eq!(
            fixed,
            vec![
                OpinionVector::Discrete(vec![0, 0]),
                OpinionVector::Discrete(vec![1, 1]),
            ]
        );
    }

    #[test]
    fn tie_rule_stabilizes_extra_states_under_self_weight() {
        let g = SignedMultigraph::try_new(
            vec![vec![0.5, 0.5], vec![0.5, 0.5]],
            parse_relation_grid(&["F F", "F F"]),
            soft_specs(),
            OpinionSpectrum::discrete(["0", "1"]).unwrap(),
        )
        .unwrap();
        let fixed = brute_force_fixed_points(&g, TieRule::KeepCurrent).unwrap();
        // ties freeze every profile here
        assert_eq!(fixed.len(), 4);
        let fixed = brute_force_fixed_points(&g, TieRule::LowestLabel).unwrap();
        assert_eq!(fixed.len(), 2);
    }

    #[test]
    fn brute_force_on_mutual_anti_conformists() {
        let g = SignedMultigraph::try_new(
            vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            parse_relation_grid(&["F soft", "soft F"]),
            soft_specs(),
            OpinionSpectrum::discrete(["0", "1"]).unwrap(),
        )
        .unwrap();
        let fixed = brute_force_fixed_points(&g, TieRule::KeepCurrent).unwrap();
        assert_eq!(
            fixed,
            vec![
                OpinionVector::Discrete(vec![1, 0]),
                OpinionVector::Discrete(vec![0, 1]),
            ]
        );
    }

    #[test]
    fn brute_force_finds_the_multipolarization() {
        let g = example_multiple();
        let fixed = brute_force_fixed_points(&g, TieRule::KeepCurrent).unwrap();
        assert!(fixed.contains(&OpinionVector::Discrete(vec![0, 0, 0, 1, 2, 2])));
    }

    #[test]
    fn brute_force_respects_the_size_bound() {
        let g = SignedMultigraph::try_new(
            vec![vec![1.0 / 21.0; 22]; 22],
            vec![vec![Relation::Follow; 22]; 22],
            soft_specs(),
            OpinionSpectrum::discrete(["0", "1"]).unwrap(),
        );
        // 22 agents: 2^22 > 1e6
        let g = match g {
            Ok(g) => g,
            Err(_) => {
                // rows of 22 equal entries do not sum to 1 exactly; build
                // unchecked since only the size bound matters here
                let mut w = vec![vec![1.0 / 21.0; 22]; 22];
                for (i, row) in w.iter_mut().enumerate() {
                    row[i] = 0.0;
                    let sum: f64 = row.iter().sum();
                    for x in row.iter_mut() {
                        *x /= sum;
                    }
                }
                SignedMultigraph::try_new(
                    w,
                    vec![vec![Relation::Follow; 22]; 22],
                    soft_specs(),
                    OpinionSpectrum::discrete(["0", "1"]).unwrap(),
                )
                .unwrap()
            }
        };
        assert!(matches!(
            brute_force_fixed_points(&g, TieRule::KeepCurrent),
            Err(Error::SizeBound { .. })
        ));
    }

    #[test]
    fn every_simulated_discrete_limit_is_a_brute_force_fixed_point() {
        use crate::dynamics::{simulate, LimitStatus, SimOptions};
        let g = example_multiple();
        let rule = UpdateRule::Discrete(TieRule::KeepCurrent);
        let fixed = brute_force_fixed_points(&g, TieRule::KeepCurrent).unwrap();
        let characterization = consensus_fixed_points(&g, rule).unwrap();
        let opts = SimOptions::default();
        // exhaustive over all 3^6 initial vectors
        let mut b = vec![0usize; 6];
        loop {
            let (_, report) = simulate(&g, &OpinionVector::Discrete(b.clone()), rule, &opts).unwrap();
            if let LimitStatus::Converged { limit, .. } = &report.status {
                assert!(fixed.contains(limit), "limit {limit:?} not a fixed point");
                let v = limit.as_discrete().unwrap();
                if v.iter().all(|&x| x == v[0]) {
                    assert!(
                        characterization.admissible.contains(&Opinion::Label(v[0])),
                        "consensus {v:?} outside the admissible set"
                    );
                }
            }
            let mut pos = 0;
            loop {
                if pos == 6 {
                    return;
                }
                b[pos] += 1;
                if b[pos] < 3 {
                    break;
                }
                b[pos] = 0;
                pos += 1;
            }
        }
    }

    #[test]
    fn common_neutral_opinions_give_consensus_fixed_points() {
        // every deviation fixes 0, so the zero consensus is fixed
        let g = deviate_triangle();
        let zero = OpinionVector::Continuous(vec![0.0; 3]);
        assert!(is_fixed_point(&g, &zero, UpdateRule::Continuous, FIXED_POINT_TOL).unwrap());

        // discrete: a table swapping a/b and fixing c
        let map: BTreeMap<String, String> = [("a", "b"), ("b", "a"), ("c", "c")]
            .iter()
            .map(|(x, y)| (x.to_string(), y.to_string()))
            .collect();
        let devs: BTreeMap<String, DeviationSpec> =
            [("swap".to_string(), DeviationSpec::Table { map })].into_iter().collect();
        let g = SignedMultigraph::try_new(
            vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            parse_relation_grid(&["F swap", "swap F"]),
            devs,
            OpinionSpectrum::discrete(["a", "b", "c"]).unwrap(),
        )
        .unwrap();
        let c_consensus = OpinionVector::Discrete(vec![2, 2]);
        assert!(is_fixed_point(
            &g,
            &c_consensus,
            UpdateRule::Discrete(TieRule::KeepCurrent),
            0.0
        )
        .unwrap());
    }

    #[test]
    fn nash_consistency_at_continuous_fixed_points() {
        // at a fixed point of a zero-diagonal graph no agent can improve:
        // the quadratic best response, recomputed from the signals, equals
        // the agent's own opinion
        let g = example_general().induced_subgraph(&[0, 1, 2]).unwrap();
        let p = vec![1.0, -1.0, -1.0];
        for i in 0..3 {
            let mut best = 0.0;
            for j in 0..3 {
                let w = g.weight(i, j);
                if w == 0.0 {
                    continue;
                }
                best += w * g.signal_value(i, j, p[j]).unwrap();
            }
            assert!((best - p[i]).abs() <= FIXED_POINT_TOL);
            // golden-section spot check on the utility itself
            let (mut lo, mut hi) = (-1.0f64, 1.0f64);
            for _ in 0..80 {
                let m1 = lo + (hi - lo) / 3.0;
                let m2 = hi - (hi - lo) / 3.0;
                let mut bm = p.clone();
                bm[i] = m1;
                let u1 = dynamics::utility_continuous(&g, &bm, i).unwrap();
                bm[i] = m2;
                let u2 = dynamics::utility_continuous(&g, &bm, i).unwrap();
                if u1 < u2 {
                    lo = m1;
                } else {
                    hi = m2;
                }
            }
            assert!((0.5 * (lo + hi) - p[i]).abs() < 1e-6);
        }
    }

    #[test]
    fn wisdom_examples() {
        // out-group weight present and mu not neutral: never wise
        let g = deviate_triangle();
        assert_eq!(
            wisdom_verdict(&g, Opinion::Value(0.3), UpdateRule::Continuous).unwrap(),
            WisdomVerdict::NeverWise
        );
        // imbalanced strongly connected soft network, mu = 0: always wise
        let block = example_general().induced_subgraph(&[7, 8, 9, 10]).unwrap();
        assert_eq!(
            wisdom_verdict(&block, Opinion::Value(0.0), UpdateRule::Continuous).unwrap(),
            WisdomVerdict::WiseForAllInitial
        );
        assert_eq!(
            wisdom_verdict(&block, Opinion::Value(0.3), UpdateRule::Continuous).unwrap(),
            WisdomVerdict::NeverWise
        );
        // plain averaging reaches profile-dependent consensus: conditional
        let g = complete_follow(3);
        assert_eq!(
            wisdom_verdict(&g, Opinion::Value(0.4), UpdateRule::Continuous).unwrap(),
            WisdomVerdict::ConditionallyWise
        );
    }
}
