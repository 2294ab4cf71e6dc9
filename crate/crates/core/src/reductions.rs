//! Constructive reductions and their brute-force verifiers:
//! bipartite independent-set counting → s-t unreliability with vertex
//! failures, vertex failures → edge failures, and DAG connected-subgraph
//! counting → counting accepting strings of an NFA.

use crate::graph::Dag;
use crate::instance::RawInstance;
use std::collections::{BTreeSet, HashMap};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ReductionError {
    #[error("edge ({0}, {1}) leaves the declared bipartition")]
    BadBipartiteEdge(usize, usize),
    #[error("{0} vertices above the enumeration cap {1}")]
    TooManyVertices(usize, usize),
    #[error("string length {0} above the enumeration cap {1}")]
    LengthAboveCap(usize, usize),
}

/// A bipartite graph with an explicit (L, R) partition; edges are
/// (left index, right index).
#[derive(Debug, Clone, PartialEq)]
pub struct Bipartite {
    pub left: usize,
    pub right: usize,
    pub edges: Vec<(usize, usize)>,
}

/// s-t reliability instance where vertices rather than edges fail:
/// every vertex except s and t fails independently with its probability.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexFailureInstance {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub s: usize,
    pub t: usize,
    /// Failure probability per vertex; 0 at s and t.
    pub fail: Vec<f64>,
}

/// Bipartite G → DAG with s → L, R → t, and each {u, v} directed L → R;
/// all interior vertices fail with probability 1/2. Independent sets of G
/// then biject with vertex subsets that disconnect s from t.
pub fn bis_to_unreliability(g: &Bipartite) -> Result<VertexFailureInstance, ReductionError> {
    for &(u, v) in &g.edges {
        if u >= g.left || v >= g.right {
            return Err(ReductionError::BadBipartiteEdge(u, v));
        }
    }
    let n = g.left + g.right + 2;
    let s = 0;
    let t = n - 1;
    let l = |u: usize| 1 + u;
    let r = |v: usize| 1 + g.left + v;
    let mut edges = Vec::new();
    for u in 0..g.left {
        edges.push((s, l(u)));
    }
    for &(u, v) in &g.edges {
        edges.push((l(u), r(v)));
    }
    for v in 0..g.right {
        edges.push((r(v), t));
    }
    let mut fail = vec![0.5; n];
    fail[s] = 0.0;
    fail[t] = 0.0;
    Ok(VertexFailureInstance { n, edges, s, t, fail })
}

/// How surviving (never-failing) edges are realized in the edge-failure
/// instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SplitMode {
    /// Keep them as single q = 0 edges: reliability is preserved exactly.
    KeepZero,
    /// Replace each by k parallel edges of probability q (uniform-q
    /// output); the bundle fails with probability q^k.
    Bundle { k: usize, q: f64 },
}

/// Vertex failures → edge failures: each interior vertex v becomes v → v'
/// carrying v's failure probability; incoming edges enter v, outgoing edges
/// leave v'.
pub fn vertex_to_edge_failures(inst: &VertexFailureInstance, mode: SplitMode) -> RawInstance {
    let interior: Vec<bool> = (0..inst.n).map(|v| v != inst.s && v != inst.t).collect();
    let mut labels = Vec::new();
    let mut v_in = vec![0usize; inst.n];
    let mut v_out = vec![0usize; inst.n];
    for v in 0..inst.n {
        v_in[v] = labels.len();
        labels.push(format!("u{v}"));
        if interior[v] {
            v_out[v] = labels.len();
            labels.push(format!("u{v}'"));
        } else {
            v_out[v] = v_in[v];
        }
    }
    let mut edges = Vec::new();
    for v in 0..inst.n {
        if interior[v] {
            edges.push((v_in[v], v_out[v], inst.fail[v]));
        }
    }
    for &(u, v) in &inst.edges {
        match mode {
            SplitMode::KeepZero => edges.push((v_out[u], v_in[v], 0.0)),
            SplitMode::Bundle { k, q } => {
                for _ in 0..k {
                    edges.push((v_out[u], v_in[v], q));
                }
            }
        }
    }
    RawInstance { labels, edges, s: v_in[inst.s], t: v_in[inst.t] }
}

const VERTEX_CAP: usize = 20;

/// Number of interior subsets S such that s cannot reach t in the subgraph
/// induced on S ∪ {s, t}.
pub fn count_disconnected_subsets_bruteforce(
    inst: &VertexFailureInstance,
) -> Result<u64, ReductionError> {
    let interior: Vec<usize> =
        (0..inst.n).filter(|&v| v != inst.s && v != inst.t).collect();
    if interior.len() > VERTEX_CAP {
        return Err(ReductionError::TooManyVertices(interior.len(), VERTEX_CAP));
    }
    let mut count = 0;
    for mask in 0u64..1 << interior.len() {
        if !vertex_subset_connects(inst, &interior, mask) {
            count += 1;
        }
    }
    Ok(count)
}

fn vertex_subset_connects(inst: &VertexFailureInstance, interior: &[usize], mask: u64) -> bool {
    let mut alive = vec![false; inst.n];
    alive[inst.s] = true;
    alive[inst.t] = true;
    for (bit, &v) in interior.iter().enumerate() {
        alive[v] = mask >> bit & 1 == 1;
    }
    // BFS from s over alive vertices.
    let mut seen = vec![false; inst.n];
    seen[inst.s] = true;
    let mut queue = vec![inst.s];
    while let Some(u) = queue.pop() {
        for &(a, b) in &inst.edges {
            if a == u && alive[b] && !seen[b] {
                seen[b] = true;
                queue.push(b);
            }
        }
    }
    seen[inst.t]
}

/// Exact s-t reliability of a vertex-failure instance by enumeration.
pub fn exact_vertex_reliability(inst: &VertexFailureInstance) -> Result<f64, ReductionError> {
    let interior: Vec<usize> =
        (0..inst.n).filter(|&v| v != inst.s && v != inst.t).collect();
    if interior.len() > VERTEX_CAP {
        return Err(ReductionError::TooManyVertices(interior.len(), VERTEX_CAP));
    }
    let mut total = 0.0;
    for mask in 0u64..1 << interior.len() {
        if vertex_subset_connects(inst, &interior, mask) {
            let mut w = 1.0;
            for (bit, &v) in interior.iter().enumerate() {
                w *= if mask >> bit & 1 == 1 { 1.0 - inst.fail[v] } else { inst.fail[v] };
            }
            total += w;
        }
    }
    Ok(total)
}

/// Exact #IS including the empty set, by enumeration over all vertex
/// subsets of the bipartite graph.
pub fn count_independent_sets_bruteforce(g: &Bipartite) -> Result<u64, ReductionError> {
    let n = g.left + g.right;
    if n > VERTEX_CAP {
        return Err(ReductionError::TooManyVertices(n, VERTEX_CAP));
    }
    let mut count = 0;
    for mask in 0u64..1 << n {
        let independent = g.edges.iter().all(|&(u, v)| {
            let lu = mask >> u & 1 == 1;
            let rv = mask >> (g.left + v) & 1 == 1;
            !(lu && rv)
        });
        if independent {
            count += 1;
        }
    }
    Ok(count)
}

/// NFA over {0, 1} whose accepting strings of length `len` are exactly the
/// indicator vectors (plus a final mandatory 1) of s-t connected subgraphs.
#[derive(Debug, Clone, PartialEq)]
pub struct Nfa {
    pub states: usize,
    pub start: usize,
    pub accept: usize,
    pub failure: usize,
    /// Required input length (m + 1).
    pub len: usize,
    /// (from, symbol, to) with symbol ∈ {0, 1}, deduplicated and sorted.
    pub transitions: Vec<(usize, u8, usize)>,
}

/// Builds the automaton for counting s-t connected subgraphs of a DAG whose
/// vertex ids are topological positions (s = 0, t = n−1) and whose edges
/// are sorted by (head, tail) — i.e. a preprocessed instance's DAG.
///
/// Edge k (1-based: position k of the input string) gets a state e_k; the
/// start state plays the role of e_0, the accept state of e_{m+1}. For each
/// consecutive pair e_i → e_j on a potential path, auxiliary states absorb
/// the bits of the skipped positions i+1..j−1, and the transition into e_j
/// reads a 1 (the edge must be present) while 0 leads to the failure state.
pub fn dag_to_nfa(dag: &Dag) -> Nfa {
    let m = dag.edge_count();
    let n = dag.vertex_count();
    for w in dag.edges().windows(2) {
        let (a, b) = (w[0], w[1]);
        assert!((a.1, a.0) <= (b.1, b.0), "edges must be sorted by (head, tail)");
    }
    for &(u, v) in dag.edges() {
        assert!(u < v, "vertex ids must be topological positions");
    }

    // 0 = start, 1..=m = edge states, m+1 = accept, m+2 = failure.
    let start = 0;
    let accept = m + 1;
    let failure = m + 2;
    let mut states = m + 3;
    let mut transitions: BTreeSet<(usize, u8, usize)> = BTreeSet::new();
    transitions.insert((failure, 0, failure));
    transitions.insert((failure, 1, failure));

    // head of e_i (the vertex a path continues from); tail of e_j.
    let head = |i: usize| if i == 0 { 0 } else { dag.edge(i - 1).1 };
    let tail = |j: usize| if j == m + 1 { n - 1 } else { dag.edge(j - 1).0 };

    for i in 0..=m {
        for j in i + 1..=m + 1 {
            if head(i) != tail(j) {
                continue;
            }
            // Chain from e_i through positions i+1..j−1, then a 1 into e_j.
            let mut prev = if i == 0 { start } else { i };
            for _k in i + 1..j {
                let aux = states;
                states += 1;
                transitions.insert((prev, 0, aux));
                transitions.insert((prev, 1, aux));
                prev = aux;
            }
            let target = if j == m + 1 { accept } else { j };
            transitions.insert((prev, 1, target));
            transitions.insert((prev, 0, failure));
        }
    }

    Nfa {
        states,
        start,
        accept,
        failure,
        len: m + 1,
        transitions: transitions.into_iter().collect(),
    }
}

const LENGTH_CAP: usize = 24;

/// Exact number of accepted {0,1}-strings of the given length, by an
/// on-the-fly subset-construction DP: strings map to deterministic
/// state-subset trajectories, so summing multiplicities over accepting
/// subsets counts strings (not paths).
pub fn count_accepting_strings(nfa: &Nfa, len: usize) -> Result<u128, ReductionError> {
    if len > LENGTH_CAP {
        return Err(ReductionError::LengthAboveCap(len, LENGTH_CAP));
    }
    let mut delta: HashMap<(usize, u8), Vec<usize>> = HashMap::new();
    for &(from, sym, to) in &nfa.transitions {
        delta.entry((from, sym)).or_default().push(to);
    }
    let mut layer: HashMap<Vec<usize>, u128> = HashMap::new();
    layer.insert(vec![nfa.start], 1);
    for _ in 0..len {
        let mut next: HashMap<Vec<usize>, u128> = HashMap::new();
        for (subset, count) in &layer {
            for sym in [0u8, 1] {
                let mut out: BTreeSet<usize> = BTreeSet::new();
                for &q in subset {
                    if let Some(ts) = delta.get(&(q, sym)) {
                        out.extend(ts);
                    }
                }
                let key: Vec<usize> = out.into_iter().collect();
                // An empty subset is a dead branch, but it still represents
                // real strings; keeping it is harmless and keeps the DP total
                // at 2^len.
                *next.entry(key).or_insert(0) += count;
            }
        }
        layer = next;
    }
    Ok(layer
        .iter()
        .filter(|(subset, _)| subset.binary_search(&nfa.accept).is_ok())
        .map(|(_, count)| count)
        .sum())
}

/// All accepted strings of the given length, as bit vectors (index k =
/// input position k+1). Brute force, for cross-checking the DP.
pub fn enumerate_accepted(nfa: &Nfa, len: usize) -> Result<Vec<Vec<u8>>, ReductionError> {
    if len > 20 {
        return Err(ReductionError::LengthAboveCap(len, 20));
    }
    let mut delta: HashMap<(usize, u8), Vec<usize>> = HashMap::new();
    for &(from, sym, to) in &nfa.transitions {
        delta.entry((from, sym)).or_default().push(to);
    }
    let mut accepted = Vec::new();
    for mask in 0u64..1 << len {
        let bits: Vec<u8> = (0..len).map(|k| (mask >> k & 1) as u8).collect();
        let mut current: BTreeSet<usize> = BTreeSet::new();
        current.insert(nfa.start);
        for &b in &bits {
            let mut next = BTreeSet::new();
            for &q in &current {
                if let Some(ts) = delta.get(&(q, b)) {
                    next.extend(ts);
                }
            }
            current = next;
        }
        if current.contains(&nfa.accept) {
            accepted.push(bits);
        }
    }
    Ok(accepted)
}

pub fn render_nfa(nfa: &Nfa) -> String {
    let mut out = String::new();
    out.push_str(&format!("nfa {} 01 {}\n", nfa.states, nfa.len));
    out.push_str(&format!("start {}\n", nfa.start));
    out.push_str(&format!("accept {}\n", nfa.accept));
    out.push_str(&format!("failure {}\n", nfa.failure));
    for &(from, sym, to) in &nfa.transitions {
        out.push_str(&format!("{from} {sym} {to}\n"));
    }
    out
}

#[derive(Debug, Error, PartialEq)]
pub enum NfaParseError {
    #[error("line {0}: expected `{1}`")]
    Expected(usize, &'static str),
    #[error("missing {0} declaration")]
    Missing(&'static str),
}

pub fn parse_nfa(text: &str) -> Result<Nfa, NfaParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (ln, header) = lines.next().ok_or(NfaParseError::Missing("nfa"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    let (states, len) = match toks.as_slice() {
        ["nfa", s, "01", l] => match (s.parse(), l.parse()) {
            (Ok(s), Ok(l)) => (s, l),
            _ => return Err(NfaParseError::Expected(ln, "nfa <#states> 01 <len>")),
        },
        _ => return Err(NfaParseError::Expected(ln, "nfa <#states> 01 <len>")),
    };
    let mut decl = |keyword: &'static str| -> Result<usize, NfaParseError> {
        let (ln, line) = lines.next().ok_or(NfaParseError::Missing(keyword))?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            [k, id] if *k == keyword => {
                id.parse().map_err(|_| NfaParseError::Expected(ln, "<keyword> <state>"))
            }
            _ => Err(NfaParseError::Expected(ln, "<keyword> <state>")),
        }
    };
    let start = decl("start")?;
    let accept = decl("accept")?;
    let failure = decl("failure")?;
    let mut transitions = Vec::new();
    for (ln, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            [f, s, t] => match (f.parse(), s.parse::<u8>(), t.parse()) {
                (Ok(f), Ok(s), Ok(t)) if s <= 1 => transitions.push((f, s, t)),
                _ => return Err(NfaParseError::Expected(ln, "<from> <0|1> <to>")),
            },
            _ => return Err(NfaParseError::Expected(ln, "<from> <0|1> <to>")),
        }
    }
    Ok(Nfa { states, start, accept, failure, len, transitions })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitset::BitSet;
    use crate::exact::{exact_reliability, ExactCtx, DEFAULT_EDGE_CAP};
    use crate::instance::{preprocess, Instance};
    use crate::testutil::{diamond_instance, series_path_instance, single_edge_instance};

    fn whole_reliability(inst: &Instance) -> f64 {
        let ctx = ExactCtx::new(&inst.dag, &inst.q, inst.t);
        let v = BitSet::full(inst.vertex_count());
        let e = BitSet::full(inst.edge_count());
        let l = BitSet::singleton(inst.vertex_count(), inst.s);
        exact_reliability(ctx, &v, &e, &l, DEFAULT_EDGE_CAP).unwrap()
    }

    #[test]
    fn bis_single_edge_has_three_disconnected_subsets() {
        let g = Bipartite { left: 1, right: 1, edges: vec![(0, 0)] };
        let d = bis_to_unreliability(&g).unwrap();
        assert_eq!(count_disconnected_subsets_bruteforce(&d).unwrap(), 3);
        assert_eq!(count_independent_sets_bruteforce(&g).unwrap(), 3);
    }

    #[test]
    fn bis_isolated_vertices_all_subsets_disconnected() {
        for k in 1..=4 {
            let g = Bipartite { left: k, right: 0, edges: vec![] };
            let d = bis_to_unreliability(&g).unwrap();
            assert_eq!(count_disconnected_subsets_bruteforce(&d).unwrap(), 1 << k);
        }
    }

    #[test]
    fn bis_star_and_k22() {
        let k12 = Bipartite { left: 1, right: 2, edges: vec![(0, 0), (0, 1)] };
        assert_eq!(count_independent_sets_bruteforce(&k12).unwrap(), 5);
        let d = bis_to_unreliability(&k12).unwrap();
        assert_eq!(count_disconnected_subsets_bruteforce(&d).unwrap(), 5);
        let k22 =
            Bipartite { left: 2, right: 2, edges: vec![(0, 0), (0, 1), (1, 0), (1, 1)] };
        assert_eq!(count_independent_sets_bruteforce(&k22).unwrap(), 7);
        let d = bis_to_unreliability(&k22).unwrap();
        assert_eq!(count_disconnected_subsets_bruteforce(&d).unwrap(), 7);
    }

    #[test]
    fn bad_bipartite_edge_rejected() {
        let g = Bipartite { left: 1, right: 1, edges: vec![(0, 1)] };
        assert_eq!(bis_to_unreliability(&g).unwrap_err(), ReductionError::BadBipartiteEdge(0, 1));
    }

    #[test]
    fn disconnected_count_matches_unreliability() {
        // #disconnected subsets = 2^k · (1 − R) at uniform 1/2 failures.
        let g = Bipartite { left: 2, right: 2, edges: vec![(0, 0), (1, 1)] };
        let d = bis_to_unreliability(&g).unwrap();
        let r = exact_vertex_reliability(&d).unwrap();
        let count = count_disconnected_subsets_bruteforce(&d).unwrap();
        assert!((count as f64 - 16.0 * (1.0 - r)).abs() < 1e-9);
    }

    #[test]
    fn vertex_split_single_vertex_path() {
        // s → v → t, v fails w.p. 1/2: reliability exactly 1/2.
        let inst = VertexFailureInstance {
            n: 3,
            edges: vec![(0, 1), (1, 2)],
            s: 0,
            t: 2,
            fail: vec![0.0, 0.5, 0.0],
        };
        let raw = vertex_to_edge_failures(&inst, SplitMode::KeepZero);
        let edge_inst = preprocess(&raw, 0.5).unwrap().ready().unwrap();
        assert!((whole_reliability(&edge_inst) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn vertex_split_preserves_reliability() {
        let g = Bipartite { left: 2, right: 2, edges: vec![(0, 0), (0, 1), (1, 1)] };
        let d = bis_to_unreliability(&g).unwrap();
        let truth = exact_vertex_reliability(&d).unwrap();
        let raw = vertex_to_edge_failures(&d, SplitMode::KeepZero);
        let edge_inst = preprocess(&raw, 0.5).unwrap().ready().unwrap();
        assert!((whole_reliability(&edge_inst) - truth).abs() < 1e-12);
    }

    #[test]
    fn bundle_error_within_bound() {
        // k = 20, q = 1/2: |R_bundle − R_direct| ≤ m·2⁻²⁰.
        let g = Bipartite { left: 1, right: 2, edges: vec![(0, 0), (0, 1)] };
        let d = bis_to_unreliability(&g).unwrap();
        let raw_direct = vertex_to_edge_failures(&d, SplitMode::KeepZero);
        let direct = whole_reliability(&preprocess(&raw_direct, 0.5).unwrap().ready().unwrap());
        let raw_bundle =
            vertex_to_edge_failures(&d, SplitMode::Bundle { k: 20, q: 0.5 });
        let bundle = whole_reliability(&preprocess(&raw_bundle, 0.5).unwrap().ready().unwrap());
        let m = d.edges.len() as f64;
        assert!((bundle - direct).abs() <= m * 0.5f64.powi(20) + 1e-15);
    }

    #[test]
    fn nfa_single_edge_accepts_only_11() {
        let inst = single_edge_instance(0.5);
        let nfa = dag_to_nfa(&inst.dag);
        assert_eq!(nfa.len, 2);
        assert_eq!(count_accepting_strings(&nfa, 2).unwrap(), 1);
        let accepted = enumerate_accepted(&nfa, 2).unwrap();
        assert_eq!(accepted, vec![vec![1, 1]]);
    }

    #[test]
    fn nfa_series_path_accepts_only_111() {
        let inst = series_path_instance(0.5);
        let nfa = dag_to_nfa(&inst.dag);
        assert_eq!(count_accepting_strings(&nfa, 3).unwrap(), 1);
        assert_eq!(enumerate_accepted(&nfa, 3).unwrap(), vec![vec![1, 1, 1]]);
    }

    #[test]
    fn nfa_diamond_counts_seven() {
        let inst = diamond_instance(0.5);
        let nfa = dag_to_nfa(&inst.dag);
        assert_eq!(count_accepting_strings(&nfa, 5).unwrap(), 7);
        let accepted = enumerate_accepted(&nfa, 5).unwrap();
        assert_eq!(accepted.len(), 7);
        for s in &accepted {
            assert_eq!(*s.last().unwrap(), 1, "accepting strings must end in 1");
        }
    }

    #[test]
    fn nfa_equality_matches_reliability() {
        // count(len m+1) = 2^m · R at q ≡ 1/2, as an exact integer.
        for inst in [diamond_instance(0.5), series_path_instance(0.5)] {
            let m = inst.edge_count();
            let nfa = dag_to_nfa(&inst.dag);
            let count = count_accepting_strings(&nfa, m + 1).unwrap();
            let expected = (whole_reliability(&inst) * (1u64 << m) as f64).round() as u128;
            assert_eq!(count, expected);
        }
    }

    #[test]
    fn nfa_failure_state_only_self_loops() {
        let nfa = dag_to_nfa(&diamond_instance(0.5).dag);
        for &(from, _, to) in &nfa.transitions {
            if from == nfa.failure {
                assert_eq!(to, nfa.failure);
            }
        }
        // State count is small: m+3 core states plus short auxiliary chains.
        assert!(nfa.states <= 4 * 4 + 3 + 4);
    }

    #[test]
    fn nfa_round_trip() {
        let nfa = dag_to_nfa(&diamond_instance(0.5).dag);
        assert_eq!(parse_nfa(&render_nfa(&nfa)).unwrap(), nfa);
    }

    #[test]
    fn caps_enforced() {
        let g = Bipartite { left: 11, right: 10, edges: vec![] };
        assert_eq!(
            count_independent_sets_bruteforce(&g).unwrap_err(),
            ReductionError::TooManyVertices(21, 20)
        );
        let nfa = dag_to_nfa(&diamond_instance(0.5).dag);
        assert!(count_accepting_strings(&nfa, 25).is_err());
    }
}
