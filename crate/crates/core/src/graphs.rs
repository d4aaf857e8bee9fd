//! The four branching graphs and their comparisons: the graded graph of
//! nilpotent gl orbits with bordered-matrix edge counts, its unitary
//! counterpart, and the two Hall-Littlewood-weighted Young graphs (single
//! boxes with psi weights at t = 1/q; two-box moves with xi weights at
//! parameter -1/q). Similarity gauges f with tau_1 = tau_2 f(mu)/f(lambda)
//! are found by propagation from the root and checked on every edge.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::orbit::{count_k, count_l};
use crate::partition::Partition;
use crate::ratio::{q_ratio, q_to_string, Q};
use crate::symfunc::{psi_coeff, xi_coeff, TParam};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GraphKind {
    /// nilpotent gl orbits, edge weights L(lambda, mu); level n = partitions of n
    Glb0,
    /// nilpotent unitary orbits, edge weights K(lambda, mu); level n = partitions of 2n
    Ub0,
    /// Young graph with psi_{lambda/mu}(t) weights
    Yhl,
    /// even Young graph with xi_{lambda/mu}(-t) weights
    YhlEven,
}

impl GraphKind {
    pub fn name(&self) -> &'static str {
        match self {
            GraphKind::Glb0 => "glb0",
            GraphKind::Ub0 => "ub0",
            GraphKind::Yhl => "yhl",
            GraphKind::YhlEven => "yhl-even",
        }
    }

    pub fn parse(s: &str) -> Result<GraphKind> {
        match s {
            "glb0" => Ok(GraphKind::Glb0),
            "ub0" => Ok(GraphKind::Ub0),
            "yhl" => Ok(GraphKind::Yhl),
            "yhl-even" => Ok(GraphKind::YhlEven),
            _ => Err(Error::Schema(format!("unknown graph kind '{s}'"))),
        }
    }

    /// Vertex size at a level: n or 2n.
    fn vertex_size(&self, level: usize) -> u32 {
        match self {
            GraphKind::Glb0 | GraphKind::Yhl => level as u32,
            GraphKind::Ub0 | GraphKind::YhlEven => 2 * level as u32,
        }
    }
}

/// A finite truncation of a branching graph: vertices per level and strictly
/// positive weights on edges (absent key = not an edge).
pub struct BranchingGraph {
    pub kind: GraphKind,
    pub q: u64,
    pub levels: usize,
    pub vertices: Vec<Vec<Partition>>,
    /// keyed (mu, lambda) with mu on the lower level
    pub weights: BTreeMap<(Partition, Partition), Q>,
}

impl BranchingGraph {
    pub fn weight(&self, mu: &Partition, lambda: &Partition) -> Q {
        self.weights
            .get(&(mu.clone(), lambda.clone()))
            .cloned()
            .unwrap_or_else(Q::zero)
    }

    pub fn edges(&self) -> impl Iterator<Item = (&Partition, &Partition, &Q)> {
        self.weights.iter().map(|((m, l), w)| (m, l, w))
    }
}

/// Build one of the four graphs up to the given level. The brute-force
/// graphs are capped at their verification scale (glb0: N <= 4, q in
/// {2, 3}; ub0: N <= 2, q = 3); the Hall-Littlewood graphs at degree 8.
pub fn build_graph(
    kind: GraphKind,
    field: &Arc<FieldSpec>,
    levels: usize,
    t_override: Option<Q>,
) -> Result<BranchingGraph> {
    let q = field.q();
    match kind {
        GraphKind::Glb0 => {
            if levels > 4 || !(q == 2 || q == 3) {
                return Err(Error::Infeasible(
                    "the gl orbit graph is verified at N <= 4, q in {2, 3}".into(),
                ));
            }
        }
        GraphKind::Ub0 => {
            if levels > 2 || field.base_q() != Some(3) {
                return Err(Error::Infeasible(
                    "the unitary orbit graph is verified at N <= 2, q = 3".into(),
                ));
            }
        }
        GraphKind::Yhl => {
            if levels > 8 {
                return Err(Error::Infeasible("psi graph capped at degree 8".into()));
            }
        }
        GraphKind::YhlEven => {
            if 2 * levels > 8 {
                return Err(Error::Infeasible("xi graph capped at degree 8".into()));
            }
        }
    }
    let t_value = match (&t_override, kind) {
        (Some(t), _) => t.clone(),
        (None, GraphKind::Yhl) => q_ratio(1, q as i64),
        (None, GraphKind::YhlEven) => {
            let q0 = field.base_q().unwrap_or(q);
            q_ratio(1, q0 as i64)
        }
        (None, _) => Q::zero(),
    };
    let vertices: Vec<Vec<Partition>> = (0..=levels)
        .map(|n| Partition::all_of(kind.vertex_size(n)))
        .collect();
    let mut weights = BTreeMap::new();
    for n in 0..levels {
        for mu in &vertices[n] {
            for lambda in &vertices[n + 1] {
                let w: Q = match kind {
                    GraphKind::Glb0 => {
                        Q::from_integer(count_l(lambda, mu, field)?.into())
                    }
                    GraphKind::Ub0 => Q::from_integer(count_k(lambda, mu, field)?.into()),
                    GraphKind::Yhl => {
                        let p = psi_coeff(lambda, mu, &TParam::Evaluated(t_value.clone()));
                        p.as_constant().expect("evaluated psi")
                    }
                    GraphKind::YhlEven => xi_coeff(lambda, mu, &t_value)?,
                };
                if w < Q::zero() {
                    return Err(Error::Schema(format!(
                        "parameter yields a negative edge weight at ({mu}, {lambda})"
                    )));
                }
                if !w.is_zero() {
                    weights.insert((mu.clone(), lambda.clone()), w);
                }
            }
        }
    }
    let graph = BranchingGraph { kind, q, levels, vertices, weights };
    // branching-graph shape: every vertex has an upward edge, and every
    // vertex off the root level has a downward edge
    for n in 0..=graph.levels {
        for v in &graph.vertices[n] {
            if n < graph.levels && !graph.vertices[n + 1].iter().any(|w| !graph.weight(v, w).is_zero()) {
                return Err(Error::Schema(format!("vertex {v} has no upward edge")));
            }
            if n > 0 && !graph.vertices[n - 1].iter().any(|u| !graph.weight(u, v).is_zero()) {
                return Err(Error::Schema(format!("vertex {v} has no downward edge")));
            }
        }
    }
    Ok(graph)
}

/// The outcome of a similarity-gauge search.
pub enum GaugeOutcome {
    /// f with tau_1(lambda, mu) = tau_2(lambda, mu) f(mu) / f(lambda) on all
    /// edges, normalized f(root) = 1.
    Found(BTreeMap<Partition, Q>),
    /// Edge sets differ or an edge is inconsistent with the propagated f.
    Failed { reason: String },
}

/// Find a similarity gauge between two graphs on the same vertex set, by
/// propagation along a spanning tree and verification of every edge.
pub fn similarity_gauge(g1: &BranchingGraph, g2: &BranchingGraph) -> GaugeOutcome {
    if g1.vertices != g2.vertices {
        return GaugeOutcome::Failed { reason: "vertex sets differ".into() };
    }
    let e1: Vec<_> = g1.weights.keys().collect();
    let e2: Vec<_> = g2.weights.keys().collect();
    if e1 != e2 {
        return GaugeOutcome::Failed { reason: "edge sets differ".into() };
    }
    let mut f: BTreeMap<Partition, Q> = BTreeMap::new();
    for root in &g1.vertices[0] {
        f.insert(root.clone(), Q::one());
    }
    for n in 0..g1.levels {
        for lambda in &g1.vertices[n + 1] {
            // first parent with an edge
            let parent = g1.vertices[n]
                .iter()
                .find(|mu| g1.weights.contains_key(&((*mu).clone(), lambda.clone())));
            let Some(mu) = parent else {
                return GaugeOutcome::Failed {
                    reason: format!("vertex {lambda} has no downward edge"),
                };
            };
            let t1 = g1.weight(mu, lambda);
            let t2 = g2.weight(mu, lambda);
            let fmu = f[mu].clone();
            // tau1 = tau2 f(mu)/f(lambda) => f(lambda) = f(mu) tau2 / tau1
            f.insert(lambda.clone(), fmu * t2 / t1);
        }
    }
    // verify every edge
    for ((mu, lambda), t1) in &g1.weights {
        let t2 = g2.weight(mu, lambda);
        let expect = &t2 * &f[mu] / &f[lambda];
        if *t1 != expect {
            return GaugeOutcome::Failed {
                reason: format!("edge ({mu} -> {lambda}) is inconsistent"),
            };
        }
    }
    GaugeOutcome::Found(f)
}

/// The closed-form gauge q^{sum (i-1) lambda_i - C(|lambda|, 2)} between the
/// gl orbit graph and the psi graph at t = 1/q.
pub fn glb_gauge_closed_form(lambda: &Partition, q: u64) -> Q {
    let size = lambda.size() as i64;
    let exp = lambda.weighted_row_sum() as i64 - size * (size - 1) / 2;
    crate::ratio::q_pow(q, exp)
}

/// Harmonicity residual report: for each vertex v below the top level, the
/// pair (F(v), sum_w tau(w, v) F(w)).
pub struct HarmonicityReport {
    pub residuals: Vec<(Partition, Q, Q)>,
}

impl HarmonicityReport {
    pub fn passed(&self) -> bool {
        self.residuals.iter().all(|(_, a, b)| a == b)
    }

    pub fn failures(&self) -> Vec<&(Partition, Q, Q)> {
        self.residuals.iter().filter(|(_, a, b)| a != b).collect()
    }
}

/// Check F(v) = sum_w tau(w, v) F(w) for all v up to level N-1; values
/// default to zero where the function is not defined.
pub fn harmonicity_check(
    f: &BTreeMap<Partition, Q>,
    graph: &BranchingGraph,
    n: usize,
) -> Result<HarmonicityReport> {
    if n > graph.levels {
        return Err(Error::Infeasible(format!(
            "harmonicity through level {n} needs a graph with at least that many levels"
        )));
    }
    let mut residuals = Vec::new();
    let zero = Q::zero();
    for level in 0..n {
        for v in &graph.vertices[level] {
            let lhs = f.get(v).unwrap_or(&zero).clone();
            let mut rhs = Q::zero();
            for w in &graph.vertices[level + 1] {
                let tau = graph.weight(v, w);
                if !tau.is_zero() {
                    rhs += tau * f.get(w).unwrap_or(&zero);
                }
            }
            residuals.push((v.clone(), lhs, rhs));
        }
    }
    Ok(HarmonicityReport { residuals })
}

// ---------------------------------------------------------------------------
// JSON.
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct EdgeJson {
    from: Vec<u32>,
    to: Vec<u32>,
    w: String,
}

#[derive(Serialize)]
struct GraphJson {
    schema: &'static str,
    graph: &'static str,
    q: u64,
    levels: usize,
    edges: Vec<EdgeJson>,
}

/// {"graph":"ub0","q":3,"levels":2,"edges":[{"from":[..],"to":[..],"w":"num/den"}]}
/// with "from" the lower vertex of each edge.
pub fn graph_json(g: &BranchingGraph) -> serde_json::Value {
    let edges = g
        .edges()
        .map(|(mu, lambda, w)| EdgeJson {
            from: mu.parts().to_vec(),
            to: lambda.parts().to_vec(),
            w: q_to_string(w),
        })
        .collect();
    serde_json::to_value(GraphJson {
        schema: "graph/1",
        graph: g.kind.name(),
        q: g.q,
        levels: g.levels,
        edges,
    })
    .expect("serializable")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::q_int;

    fn pt(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec())
    }

    #[test]
    fn yhl_weights() {
        let f3 = FieldSpec::new(3, 1).unwrap();
        let g = build_graph(GraphKind::Yhl, &f3, 3, None).unwrap();
        // edge (1) -> (2) has weight 1 - 1/3 = 2/3
        assert_eq!(g.weight(&pt(&[1]), &pt(&[2])), q_ratio(2, 3));
        assert_eq!(g.weight(&pt(&[1]), &pt(&[1, 1])), q_int(1));
    }

    #[test]
    fn glb0_weights() {
        let f3 = FieldSpec::new(3, 1).unwrap();
        let g = build_graph(GraphKind::Glb0, &f3, 2, None).unwrap();
        assert_eq!(g.weight(&pt(&[1]), &pt(&[2])), q_int(2));
        assert_eq!(g.weight(&pt(&[1]), &pt(&[1, 1])), q_int(1));
    }

    #[test]
    fn yhl_even_weights() {
        let f9 = FieldSpec::new(3, 2).unwrap();
        let g = build_graph(GraphKind::YhlEven, &f9, 1, None).unwrap();
        assert_eq!(g.weight(&Partition::empty(), &pt(&[1, 1])), q_int(1));
        assert_eq!(g.weight(&Partition::empty(), &pt(&[2])), q_ratio(2, 3));
    }

    #[test]
    fn glb0_yhl_gauge_matches_closed_form() {
        let f3 = FieldSpec::new(3, 1).unwrap();
        let g1 = build_graph(GraphKind::Glb0, &f3, 3, None).unwrap();
        let g2 = build_graph(GraphKind::Yhl, &f3, 3, None).unwrap();
        match similarity_gauge(&g1, &g2) {
            GaugeOutcome::Found(f) => {
                for (lam, v) in &f {
                    assert_eq!(*v, glb_gauge_closed_form(lam, 3), "gauge at {lam}");
                }
            }
            GaugeOutcome::Failed { reason } => panic!("gauge failed: {reason}"),
        }
    }

    #[test]
    fn harmonicity_failure_case() {
        // the delta function at the root extended by zero is not harmonic
        let f3 = FieldSpec::new(3, 1).unwrap();
        let g = build_graph(GraphKind::Yhl, &f3, 2, None).unwrap();
        let mut f = BTreeMap::new();
        f.insert(Partition::empty(), q_int(1));
        let rep = harmonicity_check(&f, &g, 1).unwrap();
        assert!(!rep.passed());
    }

    #[test]
    fn edge_support_is_cover_relation() {
        let f3 = FieldSpec::new(3, 1).unwrap();
        let g = build_graph(GraphKind::Glb0, &f3, 3, None).unwrap();
        for n in 0..g.levels {
            for mu in &g.vertices[n] {
                for lambda in &g.vertices[n + 1] {
                    let has_edge = !g.weight(mu, lambda).is_zero();
                    assert_eq!(has_edge, Partition::covers(mu, lambda));
                }
            }
        }
        let f9 = FieldSpec::new(3, 2).unwrap();
        let g = build_graph(GraphKind::Ub0, &f9, 2, None).unwrap();
        for n in 0..g.levels {
            for mu in &g.vertices[n] {
                for lambda in &g.vertices[n + 1] {
                    let has_edge = !g.weight(mu, lambda).is_zero();
                    assert_eq!(
                        has_edge,
                        Partition::double_covers(mu, lambda),
                        "edge ({mu}, {lambda})"
                    );
                }
            }
        }
    }
}
