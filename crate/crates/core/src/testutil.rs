//! Shared graph fixtures for unit tests.

use std::collections::BTreeMap;

use crate::graph::{parse_relation_grid, Relation, SignedMultigraph};
use crate::spectrum::{ConstantTarget, DeviationSpec, OpinionSpectrum};

pub fn unit_interval() -> OpinionSpectrum {
    OpinionSpectrum::interval(-1.0, 1.0).unwrap()
}

pub fn soft_specs() -> BTreeMap<String, DeviationSpec> {
    [("soft".to_string(), DeviationSpec::Soft)].into_iter().collect()
}

/// Complete graph, all follow, uniform off-diagonal weights, zero diagonal.
pub fn complete_follow(n: usize) -> SignedMultigraph {
    let w = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { 0.0 } else { 1.0 / (n - 1) as f64 })
                .collect()
        })
        .collect();
    let f = vec![vec![Relation::Follow; n]; n];
    SignedMultigraph::try_new(w, f, soft_specs(), unit_interval()).unwrap()
}

/// Symmetric positive triangle (all follow), weights 1/2.
pub fn symmetric_triangle() -> SignedMultigraph {
    complete_follow(3)
}

/// Two agents joined by a single symmetric follow edge.
pub fn single_edge_pair() -> SignedMultigraph {
    SignedMultigraph::try_new(
        vec![vec![0.0, 1.0], vec![1.0, 0.0]],
        parse_relation_grid(&["F F", "F F"]),
        soft_specs(),
        unit_interval(),
    )
    .unwrap()
}

/// Two agents mutually deviating via hard opposition (out of theory).
pub fn hard_pair() -> SignedMultigraph {
    let devs: BTreeMap<String, DeviationSpec> = [(
        "hard".to_string(),
        DeviationSpec::Hard {
            midpoint_to_upper: true,
        },
    )]
    .into_iter()
    .collect();
    SignedMultigraph::try_new(
        vec![vec![0.0, 1.0], vec![1.0, 0.0]],
        parse_relation_grid(&["F hard", "hard F"]),
        devs,
        unit_interval(),
    )
    .unwrap()
}

/// Triangle whose three symmetric edges all deviate: no two-coloring exists.
pub fn deviate_triangle() -> SignedMultigraph {
    SignedMultigraph::try_new(
        vec![
            vec![0.0, 0.5, 0.5],
            vec![0.5, 0.0, 0.5],
            vec![0.5, 0.5, 0.0],
        ],
        parse_relation_grid(&["F soft soft", "soft F soft", "soft soft F"]),
        soft_specs(),
        unit_interval(),
    )
    .unwrap()
}

/// A directed 3-chain 1 -> 2 -> 3 with a terminal self-loop.
pub fn directed_chain3() -> SignedMultigraph {
    SignedMultigraph::try_new(
        vec![vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0], vec![0.0, 0.0, 1.0]],
        vec![vec![Relation::Follow; 3]; 3],
        soft_specs(),
        unit_interval(),
    )
    .unwrap()
}

/// Two disjoint symmetric follow pairs.
pub fn two_disjoint_blocks() -> SignedMultigraph {
    SignedMultigraph::try_new(
        vec![
            vec![0.0, 1.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 1.0],
            vec![0.0, 0.0, 1.0, 0.0],
        ],
        vec![vec![Relation::Follow; 4]; 4],
        soft_specs(),
        unit_interval(),
    )
    .unwrap()
}

/// A periodic six-node multigraph: a positive 4-cycle joined to a positive
/// pair by two deviate edges; every simple cycle has even length.
pub fn periodic_six() -> SignedMultigraph {
    // nodes 0-1-3-2-0 positive 4-cycle, 4-5 positive edge,
    // deviate edges 2-4 and 3-5
    let adj: [(usize, usize, bool); 7] = [
        (0, 1, true),
        (0, 2, true),
        (1, 3, true),
        (2, 3, true),
        (4, 5, true),
        (2, 4, false),
        (3, 5, false),
    ];
    let n = 6;
    let mut w = vec![vec![0.0; n]; n];
    let mut f = vec![vec![Relation::Follow; n]; n];
    for &(i, j, follow) in &adj {
        w[i][j] = 1.0;
        w[j][i] = 1.0;
        if !follow {
            f[i][j] = Relation::Deviate("soft".into());
            f[j][i] = Relation::Deviate("soft".into());
        }
    }
    for i in 0..n {
        let deg: f64 = w[i].iter().sum();
        for j in 0..n {
            w[i][j] /= deg;
        }
    }
    SignedMultigraph::try_new(w, f, soft_specs(), unit_interval()).unwrap()
}

/// Discrete likelihood spectrum used by the four-agent block examples.
pub fn likelihood_spectrum() -> OpinionSpectrum {
    OpinionSpectrum::discrete(["impossible", "unlikely", "possible", "likely", "certain"])
        .unwrap()
}

/// Four agents, uniform weights, follow inside {1,2} and {3,4}, deviate
/// across: opposition bipartite.
pub fn example_bip() -> SignedMultigraph {
    SignedMultigraph::try_new(
        vec![vec![0.25; 4]; 4],
        parse_relation_grid(&[
            "F F soft soft",
            "F F soft soft",
            "soft soft F F",
            "soft soft F F",
        ]),
        soft_specs(),
        likelihood_spectrum(),
    )
    .unwrap()
}

/// The complementary pattern: deviate inside the sides, follow across:
/// reverse opposition bipartite.
pub fn example_opp() -> SignedMultigraph {
    SignedMultigraph::try_new(
        vec![vec![0.25; 4]; 4],
        parse_relation_grid(&[
            "soft soft F F",
            "soft soft F F",
            "F F soft soft",
            "F F soft soft",
        ]),
        soft_specs(),
        likelihood_spectrum(),
    )
    .unwrap()
}

/// Six agents over {L, M, R}, uniform weights, opposition 3-partite with
/// group-specific constant deviation functions.
pub fn example_multiple() -> SignedMultigraph {
    let devs: BTreeMap<String, DeviationSpec> = [
        (
            "to_left".to_string(),
            DeviationSpec::Constant {
                target: ConstantTarget::Label("L".into()),
            },
        ),
        (
            "to_mid".to_string(),
            DeviationSpec::Constant {
                target: ConstantTarget::Label("M".into()),
            },
        ),
        (
            "to_right".to_string(),
            DeviationSpec::Constant {
                target: ConstantTarget::Label("R".into()),
            },
        ),
    ]
    .into_iter()
    .collect();
    SignedMultigraph::try_new(
        vec![vec![1.0 / 6.0; 6]; 6],
        parse_relation_grid(&[
            "F F F to_left to_left to_left",
            "F F F to_left to_left to_left",
            "F F F to_left to_left to_left",
            "to_mid to_mid to_mid F to_mid to_mid",
            "to_right to_right to_right to_right F F",
            "to_right to_right to_right to_right F F",
        ]),
        devs,
        OpinionSpectrum::discrete(["L", "M", "R"]).unwrap(),
    )
    .unwrap()
}

/// Twelve agents on the real line: an opposition-bipartite triangle, a
/// reverse-opposition-bipartite 4-clique, an imbalanced 4-clique, and one
/// agent listening to the first and third blocks.
pub fn example_general() -> SignedMultigraph {
    let n = 12;
    let mut w = vec![vec![0.0; n]; n];
    let mut f = vec![vec![Relation::Follow; n]; n];
    let mut sym = |w: &mut Vec<Vec<f64>>, f: &mut Vec<Vec<Relation>>, i: usize, j: usize, weight: f64, follow: bool| {
        w[i][j] = weight;
        w[j][i] = weight;
        if !follow {
            f[i][j] = Relation::Deviate("soft".into());
            f[j][i] = Relation::Deviate("soft".into());
        }
    };
    // block {1,2,3}: deviate 1-2, 1-3; follow 2-3
    sym(&mut w, &mut f, 0, 1, 0.5, false);
    sym(&mut w, &mut f, 0, 2, 0.5, false);
    sym(&mut w, &mut f, 1, 2, 0.5, true);
    // block {4,5,6,7}: complete, deviate pairs 4-6 and 5-7
    for i in 3..7 {
        for j in (i + 1)..7 {
            let follow = !((i, j) == (3, 5) || (i, j) == (4, 6));
            sym(&mut w, &mut f, i, j, 1.0 / 3.0, follow);
        }
    }
    // block {8,9,10,11}: complete, deviate pair 10-11
    for i in 7..11 {
        for j in (i + 1)..11 {
            let follow = (i, j) != (9, 10);
            sym(&mut w, &mut f, i, j, 1.0 / 3.0, follow);
        }
    }
    // agent 12 deviates from agent 3 (weight 0.6) and follows agent 9 (0.4)
    w[11][2] = 0.6;
    f[11][2] = Relation::Deviate("soft".into());
    w[11][8] = 0.4;

    SignedMultigraph::try_new(w, f, soft_specs(), OpinionSpectrum::real_line()).unwrap()
}

/// n = 2 fixture: W = [[2/3, 1/3], [1/3, 2/3]], agent 1 softly deviates
/// from agent 2.
pub fn two_agent_soft() -> SignedMultigraph {
    SignedMultigraph::try_new(
        vec![vec![2.0 / 3.0, 1.0 / 3.0], vec![1.0 / 3.0, 2.0 / 3.0]],
        parse_relation_grid(&["F soft", "F F"]),
        soft_specs(),
        unit_interval(),
    )
    .unwrap()
}

/// Six agents in four mutually opposing camps with heterogeneous deviation
/// functions; agent 6 carries per-pair specs.
pub fn complex_society() -> SignedMultigraph {
    let devs: BTreeMap<String, DeviationSpec> = [
        (
            "all_right".to_string(),
            DeviationSpec::Constant {
                target: ConstantTarget::Value(1.0),
            },
        ),
        (
            "all_left".to_string(),
            DeviationSpec::Constant {
                target: ConstantTarget::Value(-1.0),
            },
        ),
        ("halve".to_string(), DeviationSpec::Affine { a: 0.5, b: 0.0 }),
        ("mirror".to_string(), DeviationSpec::Soft),
        ("amplify".to_string(), DeviationSpec::SignedPower { p: 0.5 }),
    ]
    .into_iter()
    .collect();
    SignedMultigraph::try_new(
        vec![vec![1.0 / 6.0; 6]; 6],
        parse_relation_grid(&[
            "F F all_right all_right all_right all_right",
            "F F all_right all_right all_right all_right",
            "all_left all_left F all_left all_left all_left",
            "halve halve halve F F halve",
            "halve halve halve F F halve",
            "mirror mirror mirror amplify amplify F",
        ]),
        devs,
        unit_interval(),
    )
    .unwrap()
}
