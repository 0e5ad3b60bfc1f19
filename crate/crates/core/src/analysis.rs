//! Graph-theoretic structure: strongly connected components, closed groups,
//! (reverse-)opposition bipartiteness, periodicity, and the classification
//! of long-run behavior.
//!
//! All predicates read relations only on edges with positive weight.

use serde::{Deserialize, Serialize};

use crate::graph::{Relation, SignedMultigraph};
use crate::{Error, Result};

/// Partition into closed strongly connected groups and the rest of the
/// world (agents outside every closed group).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructurePartition {
    pub groups: Vec<Vec<usize>>,
    pub rest: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    /// Follow inside the sides, deviate across: the balanced pattern.
    Opposition,
    /// Deviate inside the sides, follow across: the divergence-inducing
    /// pattern.
    ReverseOpposition,
}

/// A two-coloring witnessing (reverse-)opposition bipartiteness of a subset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipartitionCertificate {
    pub kind: CertificateKind,
    /// Agents on side 1, ascending.
    pub side1: Vec<usize>,
    /// Agents on side 2, ascending; may be empty (all-follow networks are
    /// opposition bipartite with an empty second side).
    pub side2: Vec<usize>,
}

impl BipartitionCertificate {
    /// Side (1 or 2) of an agent, if covered by this certificate.
    pub fn side_of(&self, agent: usize) -> Option<u8> {
        if self.side1.contains(&agent) {
            Some(1)
        } else if self.side2.contains(&agent) {
            Some(2)
        } else {
            None
        }
    }

    /// +1 for side 1, -1 for side 2.
    pub fn sign_of(&self, agent: usize) -> Option<f64> {
        self.side_of(agent).map(|s| if s == 1 { 1.0 } else { -1.0 })
    }
}

/// Long-run regime of a closed group per the trichotomy for connected
/// symmetric soft-opposition networks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Polarizes,
    Diverges,
    NeutralConsensus,
}

/// Per-group classification outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupReport {
    pub members: Vec<usize>,
    /// None when the group is out of theory.
    pub verdict: Option<Verdict>,
    pub out_of_theory: bool,
    /// Why the group is out of theory, empty otherwise.
    pub problems: Vec<String>,
    /// gcd of directed cycle lengths; 0 for a single node without self-loop.
    pub period: usize,
    pub opposition: Option<BipartitionCertificate>,
    pub reverse: Option<BipartitionCertificate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationResult {
    pub groups: Vec<GroupReport>,
    pub rest: Vec<usize>,
    /// None when some group (or the network as a whole) is out of theory.
    pub overall_converges: Option<bool>,
    /// Network-level reasons the convergence statement does not apply.
    pub problems: Vec<String>,
}

/// Strongly connected components of the positive-weight digraph (Tarjan),
/// each sorted ascending.
pub fn strongly_connected_components(g: &SignedMultigraph) -> Vec<Vec<usize>> {
    struct State<'a> {
        g: &'a SignedMultigraph,
        index: usize,
        idx: Vec<Option<usize>>,
        low: Vec<usize>,
        stack: Vec<usize>,
        on_stack: Vec<bool>,
        comps: Vec<Vec<usize>>,
    }

    fn connect(v: usize, st: &mut State) {
        st.idx[v] = Some(st.index);
        st.low[v] = st.index;
        st.index += 1;
        st.stack.push(v);
        st.on_stack[v] = true;

        for w in 0..st.g.n() {
            if !st.g.is_edge(v, w) {
                continue;
            }
            if st.idx[w].is_none() {
                connect(w, st);
                st.low[v] = st.low[v].min(st.low[w]);
            } else if st.on_stack[w] {
                st.low[v] = st.low[v].min(st.idx[w].unwrap());
            }
        }

        if st.low[v] == st.idx[v].unwrap() {
            let mut comp = Vec::new();
            loop {
                let w = st.stack.pop().unwrap();
                st.on_stack[w] = false;
                comp.push(w);
                if w == v {
                    break;
                }
            }
            comp.sort_unstable();
            st.comps.push(comp);
        }
    }

    let n = g.n();
    let mut st = State {
        g,
        index: 0,
        idx: vec![None; n],
        low: vec![0; n],
        stack: Vec::new(),
        on_stack: vec![false; n],
        comps: Vec::new(),
    };
    for v in 0..n {
        if st.idx[v].is_none() {
            connect(v, &mut st);
        }
    }
    st.comps
}

/// Closed strongly connected groups plus the rest of the world. Groups are
/// ordered by their smallest member.
pub fn structure_partition(g: &SignedMultigraph) -> StructurePartition {
    let comps = strongly_connected_components(g);
    let mut groups = Vec::new();
    let mut rest = Vec::new();
    for comp in comps {
        let closed = comp
            .iter()
            .all(|&i| (0..g.n()).all(|j| !g.is_edge(i, j) || comp.contains(&j)));
        if closed {
            groups.push(comp);
        } else {
            rest.extend(comp);
        }
    }
    groups.sort_by_key(|c| c[0]);
    rest.sort_unstable();
    StructurePartition { groups, rest }
}

/// Parity constraint of an edge: `false` = endpoints on the same side,
/// `true` = endpoints on opposite sides.
fn edge_parity(rel: &Relation, kind: CertificateKind) -> bool {
    match kind {
        CertificateKind::Opposition => !rel.is_follow(),
        CertificateKind::ReverseOpposition => rel.is_follow(),
    }
}

fn bipartition(
    g: &SignedMultigraph,
    subset: &[usize],
    kind: CertificateKind,
) -> Option<BipartitionCertificate> {
    let n = g.n();
    let mut in_subset = vec![false; n];
    for &i in subset {
        in_subset[i] = true;
    }

    // parity propagation over the undirectionalized positive-weight edges
    let mut color: Vec<Option<bool>> = vec![None; n];
    for &root in subset {
        if color[root].is_some() {
            continue;
        }
        color[root] = Some(false);
        let mut queue = vec![root];
        while let Some(u) = queue.pop() {
            let cu = color[u].unwrap();
            for v in 0..n {
                if !in_subset[v] {
                    continue;
                }
                for (a, b) in [(u, v), (v, u)] {
                    if !g.is_edge(a, b) {
                        continue;
                    }
                    let want = cu ^ edge_parity(g.relation(a, b), kind);
                    match color[v] {
                        None => {
                            color[v] = Some(want);
                            queue.push(v);
                        }
                        Some(cv) if cv != want => return None,
                        Some(_) => {}
                    }
                }
            }
        }
    }

    // directed inputs: re-check every positive-weight edge edgewise
    for &i in subset {
        for &j in subset {
            if !g.is_edge(i, j) {
                continue;
            }
            let parity = edge_parity(g.relation(i, j), kind);
            if (color[i].unwrap() ^ color[j].unwrap()) != parity {
                return None;
            }
        }
    }

    let mut side1 = Vec::new();
    let mut side2 = Vec::new();
    for &i in subset {
        if color[i] == Some(false) {
            side1.push(i);
        } else {
            side2.push(i);
        }
    }
    side1.sort_unstable();
    side2.sort_unstable();
    Some(BipartitionCertificate { kind, side1, side2 })
}

/// Certificate that `subset` is opposition bipartite (follow inside sides,
/// deviate across), if one exists. The degenerate all-follow case yields an
/// empty second side.
pub fn opposition_bipartition(
    g: &SignedMultigraph,
    subset: &[usize],
) -> Option<BipartitionCertificate> {
    bipartition(g, subset, CertificateKind::Opposition)
}

/// Certificate that `subset` is reverse opposition bipartite (deviate inside
/// sides, follow across), if one exists. Same search with the follow/deviate
/// roles swapped, which is what flipping every relation and delegating
/// amounts to.
pub fn reverse_opposition_bipartition(
    g: &SignedMultigraph,
    subset: &[usize],
) -> Option<BipartitionCertificate> {
    bipartition(g, subset, CertificateKind::ReverseOpposition)
}

/// True iff `partition` witnesses opposition k-partiteness: every
/// positive-weight edge inside a part is follow, every cross-part edge is
/// deviate. The partition must cover all agents disjointly.
pub fn verify_k_partition(g: &SignedMultigraph, partition: &[Vec<usize>]) -> Result<bool> {
    let n = g.n();
    let mut part_of = vec![usize::MAX; n];
    for (p, part) in partition.iter().enumerate() {
        for &i in part {
            if i >= n {
                return Err(Error::InvalidInput(format!("agent {} out of range", i + 1)));
            }
            if part_of[i] != usize::MAX {
                return Err(Error::InvalidInput(format!(
                    "agent {} appears in two parts",
                    i + 1
                )));
            }
            part_of[i] = p;
        }
    }
    if part_of.contains(&usize::MAX) {
        return Err(Error::InvalidInput("partition must cover all agents".into()));
    }
    for i in 0..n {
        for j in 0..n {
            if !g.is_edge(i, j) {
                continue;
            }
            let same = part_of[i] == part_of[j];
            let follow = g.relation(i, j).is_follow();
            if same != follow {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Period of a strongly connected subset: the gcd of its directed cycle
/// lengths, computed from level discrepancies of a BFS tree. A single node
/// is assigned period 0 without a self-loop and 1 with one.
pub fn period(g: &SignedMultigraph, subset: &[usize]) -> Result<usize> {
    if subset.is_empty() {
        return Err(Error::InvalidInput("period of an empty subset".into()));
    }
    if !is_strongly_connected(g, subset) {
        return Err(Error::InvalidInput(
            "period is defined on strongly connected subsets only".into(),
        ));
    }
    let n = g.n();
    let mut level: Vec<Option<i64>> = vec![None; n];
    let root = subset[0];
    level[root] = Some(0);
    let mut queue = std::collections::VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for &v in subset {
            if g.is_edge(u, v) && level[v].is_none() {
                level[v] = Some(level[u].unwrap() + 1);
                queue.push_back(v);
            }
        }
    }
    let mut d: i64 = 0;
    for &i in subset {
        for &j in subset {
            if g.is_edge(i, j) {
                let disc = level[i].unwrap() + 1 - level[j].unwrap();
                d = gcd(d, disc.abs());
            }
        }
    }
    Ok(d as usize)
}

pub fn is_aperiodic(g: &SignedMultigraph, subset: &[usize]) -> Result<bool> {
    Ok(period(g, subset)? == 1)
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Strong connectivity of the positive-weight digraph restricted to `subset`.
pub fn is_strongly_connected(g: &SignedMultigraph, subset: &[usize]) -> bool {
    if subset.is_empty() {
        return false;
    }
    if subset.len() == 1 {
        return true;
    }
    let reach = |forward: bool| -> usize {
        let mut seen = vec![false; g.n()];
        seen[subset[0]] = true;
        let mut queue = vec![subset[0]];
        let mut count = 1;
        while let Some(u) = queue.pop() {
            for &v in subset {
                if seen[v] {
                    continue;
                }
                let linked = if forward { g.is_edge(u, v) } else { g.is_edge(v, u) };
                if linked {
                    seen[v] = true;
                    count += 1;
                    queue.push(v);
                }
            }
        }
        count
    };
    reach(true) == subset.len() && reach(false) == subset.len()
}

/// Why a closed group falls outside the symmetric soft-opposition theory;
/// empty iff it is covered.
fn group_theory_problems(g: &SignedMultigraph, group: &[usize]) -> Vec<String> {
    let mut problems = Vec::new();
    if group.len() < 2 {
        problems.push("singleton group: the theory requires n >= 2".into());
    }
    if !g.spectrum().is_symmetric_interval() {
        problems.push(format!(
            "spectrum {} is not a symmetric interval or the real line",
            g.spectrum()
        ));
    }
    for &i in group {
        if g.weight(i, i) > crate::EDGE_EPS {
            problems.push(format!("self-loop at agent {}", i + 1));
        }
    }
    let a = g.signed_weights();
    for (pos, &i) in group.iter().enumerate() {
        for &j in group.iter().skip(pos + 1) {
            if (a[i][j] - a[j][i]).abs() > crate::graph::SYMMETRY_TOL {
                problems.push(format!(
                    "asymmetric pair ({}, {}): {} vs {}",
                    i + 1,
                    j + 1,
                    a[i][j],
                    a[j][i]
                ));
            }
        }
    }
    for &i in group {
        for &j in group {
            if !g.is_edge(i, j) {
                continue;
            }
            if let Relation::Deviate(id) = g.relation(i, j) {
                match g.deviation(id) {
                    Some(crate::spectrum::DeviationSpec::Soft) => {}
                    Some(other) => problems.push(format!(
                        "deviation `{id}` on edge ({}, {}) is {}, not soft",
                        i + 1,
                        j + 1,
                        other.kind_name()
                    )),
                    None => problems.push(format!("dangling spec `{id}`")),
                }
            }
        }
    }
    problems.dedup();
    problems
}

/// Classify every closed group of the network: polarizes iff opposition
/// bipartite and aperiodic, diverges iff reverse opposition bipartite,
/// neutral consensus otherwise. Groups outside the symmetric
/// soft-opposition theory get certificates and structure only, flagged
/// out-of-theory. The network converges for every initial profile iff no
/// group diverges.
pub fn classify(g: &SignedMultigraph) -> ClassificationResult {
    let partition = structure_partition(g);
    let mut groups = Vec::new();
    let mut any_out = false;
    let mut any_diverges = false;

    for members in &partition.groups {
        let opposition = opposition_bipartition(g, members);
        let reverse = reverse_opposition_bipartition(g, members);
        let per = period(g, members).unwrap_or(0);
        let problems = group_theory_problems(g, members);
        let out = !problems.is_empty();
        let verdict = if out {
            None
        } else if opposition.is_some() && per == 1 {
            Some(Verdict::Polarizes)
        } else if reverse.is_some() {
            Some(Verdict::Diverges)
        } else {
            Some(Verdict::NeutralConsensus)
        };
        any_out |= out;
        any_diverges |= verdict == Some(Verdict::Diverges);
        groups.push(GroupReport {
            members: members.clone(),
            verdict,
            out_of_theory: out,
            problems,
            period: per,
            opposition,
            reverse,
        });
    }

    // The convergence statement needs soft opposition everywhere, including
    // the rest of the world.
    let mut problems = Vec::new();
    if !g.spectrum().is_symmetric_interval() {
        problems.push(format!("spectrum {} is outside the theory", g.spectrum()));
    }
    for id in g.used_spec_ids() {
        if !matches!(g.deviation(id), Some(crate::spectrum::DeviationSpec::Soft)) {
            problems.push(format!("deviation `{id}` is not soft opposition"));
        }
    }
    let overall_converges = if any_out || !problems.is_empty() {
        None
    } else {
        Some(!any_diverges)
    };

    ClassificationResult {
        groups,
        rest: partition.rest,
        overall_converges,
        problems,
    }
}
