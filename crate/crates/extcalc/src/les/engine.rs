//! The exact-sequence reasoning engine.
//!
//! A [`Graph`] holds Ext-group nodes (identified by module pair,
//! filtration, and a degree expression in `p^n q`), directed map edges,
//! and *exactness triples*: statements that at a given node, the image of
//! the incoming edge equals the kernel of the outgoing one. Chains
//! instantiated from the long exact sequences register a triple at each of
//! their interior nodes; a node shared by several chains carries one
//! triple per chain.
//!
//! Saturation applies a fixed set of sound rules to a fixed point. Every
//! assignment remembers its origin (an ingested fact or an earlier step),
//! so each derivation can be replayed and every conclusion traced back to
//! the cited facts that support it.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LesError {
    #[error("contradiction: {message}; premises: {premises:?}")]
    Contradiction {
        message: String,
        premises: Vec<String>,
    },
    #[error("unknown fact target: {0}")]
    UnknownTarget(String),
    #[error("unknown proposition {0:?}")]
    UnknownProposition(String),
}

/// First or second argument of an Ext group: the cohomology of one of the
/// spectra in play.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, Hash)]
pub enum Spectrum {
    S,
    M,
    K,
    V2,
}

impl fmt::Display for Spectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Spectrum::S => write!(f, "S"),
            Spectrum::M => write!(f, "M"),
            Spectrum::K => write!(f, "K"),
            Spectrum::V2 => write!(f, "V(2)"),
        }
    }
}

/// Internal degree of the form `c0 + c1 * p^n * q`, with `p, q` fixed
/// numerals and `n` a free symbol. Two expressions denote the same degree
/// for all `n` exactly when their coefficients agree, so equality of
/// coefficients is how nodes are identified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, Hash)]
pub struct DegExpr {
    #[serde(rename = "const")]
    pub c0: i64,
    /// Coefficient of `p^n q`.
    #[serde(rename = "pn_coeff")]
    pub c1: i64,
}

impl DegExpr {
    pub fn constant(c0: i64) -> DegExpr {
        DegExpr { c0, c1: 0 }
    }

    pub fn pnq_plus(c0: i64) -> DegExpr {
        DegExpr { c0, c1: 1 }
    }

    pub fn shift(&self, delta: i64) -> DegExpr {
        DegExpr {
            c0: self.c0 + delta,
            c1: self.c1,
        }
    }

    /// Evaluate at a concrete `n`.
    pub fn eval(&self, p: u32, n: u32) -> i64 {
        let q = 2 * (p as i64 - 1);
        self.c0 + self.c1 * (p as i64).pow(n) * q
    }
}

impl fmt::Display for DegExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.c1, self.c0) {
            (0, c0) => write!(f, "{c0}"),
            (1, 0) => write!(f, "p^n q"),
            (1, c0) if c0 > 0 => write!(f, "p^n q + {c0}"),
            (1, c0) => write!(f, "p^n q - {}", -c0),
            (c1, 0) => write!(f, "{c1} p^n q"),
            (c1, c0) if c0 > 0 => write!(f, "{c1} p^n q + {c0}"),
            (c1, c0) => write!(f, "{c1} p^n q - {}", -c0),
        }
    }
}

/// An Ext group `Ext^{s,t}(H*x, H*y)` (suspensions folded into `t`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, Hash)]
pub struct NodeKey {
    pub x: Spectrum,
    pub y: Spectrum,
    pub s: i32,
    pub t: DegExpr,
}

impl fmt::Display for NodeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ext^({},{})({},{})", self.s, self.t, self.x, self.y)
    }
}

/// Where a status assignment came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Origin {
    Fact(usize),
    Step(usize),
}

pub type NodeId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, Default)]
struct NodeState {
    dim: Option<(u32, Origin)>,
    upper_bound: Option<(u32, Origin)>,
}

#[derive(Debug, Clone, Default)]
struct EdgeState {
    zero: Option<Origin>,
    injective: Option<Origin>,
    surjective: Option<Origin>,
}

#[derive(Debug, Clone)]
struct EdgeData {
    src: NodeId,
    dst: NodeId,
    label: String,
    state: EdgeState,
}

/// One recorded rule application.
#[derive(Debug, Clone, Serialize)]
pub struct Step {
    pub rule: &'static str,
    pub premises: Vec<String>,
    pub conclusion: String,
    #[serde(skip)]
    pub premise_origins: Vec<Origin>,
}

/// The saturated state of a graph, with the full derivation log.
#[derive(Debug, Clone, Serialize)]
pub struct Derivation {
    pub steps: Vec<Step>,
}

impl Derivation {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.steps).expect("derivation serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, step) in self.steps.iter().enumerate() {
            out.push_str(&format!("{:>4}. {}", i + 1, step.conclusion));
            if !step.premises.is_empty() {
                out.push_str(&format!(
                    "  [{}; by {}]",
                    step.premises.join("; "),
                    step.rule
                ));
            } else {
                out.push_str(&format!("  [by {}]", step.rule));
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Default)]
pub struct Graph {
    keys: Vec<NodeKey>,
    node_index: BTreeMap<NodeKey, NodeId>,
    nodes: Vec<NodeState>,
    edges: Vec<EdgeData>,
    edge_index: BTreeMap<(NodeId, NodeId, String), EdgeId>,
    /// Exactness: at `node`, image of `in_edge` = kernel of `out_edge`.
    triples: Vec<(EdgeId, NodeId, EdgeId)>,
}

impl Graph {
    pub fn new() -> Graph {
        Graph::default()
    }

    pub fn node(&mut self, key: NodeKey) -> NodeId {
        if let Some(&id) = self.node_index.get(&key) {
            return id;
        }
        let id = self.nodes.len();
        self.keys.push(key);
        self.nodes.push(NodeState::default());
        self.node_index.insert(key, id);
        id
    }

    pub fn lookup(&self, key: &NodeKey) -> Option<NodeId> {
        self.node_index.get(key).copied()
    }

    pub fn key(&self, id: NodeId) -> &NodeKey {
        &self.keys[id]
    }

    pub fn edge(&mut self, src: NodeId, dst: NodeId, label: &str) -> EdgeId {
        let k = (src, dst, label.to_string());
        if let Some(&id) = self.edge_index.get(&k) {
            return id;
        }
        let id = self.edges.len();
        self.edges.push(EdgeData {
            src,
            dst,
            label: label.to_string(),
            state: EdgeState::default(),
        });
        self.edge_index.insert(k, id);
        id
    }

    /// Find the unique edge with the given source node and label.
    pub fn edge_by_source_label(&self, src: &NodeKey, label: &str) -> Option<EdgeId> {
        let src_id = self.node_index.get(src)?;
        let mut found = None;
        for (id, e) in self.edges.iter().enumerate() {
            if e.src == *src_id && e.label == label {
                assert!(found.is_none(), "ambiguous edge {label} from {src}");
                found = Some(id);
            }
        }
        found
    }

    /// Register exactness of `in_edge -> node -> out_edge`.
    pub fn exact_triple(&mut self, in_edge: EdgeId, node: NodeId, out_edge: EdgeId) {
        debug_assert_eq!(self.edges[in_edge].dst, node);
        debug_assert_eq!(self.edges[out_edge].src, node);
        if !self.triples.contains(&(in_edge, node, out_edge)) {
            self.triples.push((in_edge, node, out_edge));
        }
    }

    pub fn dim_of(&self, key: &NodeKey) -> Option<u32> {
        let id = self.lookup(key)?;
        self.nodes[id].dim.map(|(d, _)| d)
    }

    pub fn edge_status(&self, id: EdgeId) -> (bool, bool, bool) {
        let st = &self.edges[id].state;
        (
            st.zero.is_some(),
            st.injective.is_some(),
            st.surjective.is_some(),
        )
    }

    fn describe_edge(&self, id: EdgeId) -> String {
        let e = &self.edges[id];
        format!("{}: {} -> {}", e.label, self.keys[e.src], self.keys[e.dst])
    }

    /// Assert a node dimension from an external fact.
    pub fn assert_dim(
        &mut self,
        key: NodeKey,
        dim: u32,
        origin: Origin,
        steps: &[Step],
    ) -> Result<(), LesError> {
        let id = self.node(key);
        self.set_dim(id, dim, origin, steps)
    }

    /// Assert an edge status ("zero" | "injective" | "surjective" | "iso")
    /// from an external fact. The edge must already exist in some chain.
    pub fn assert_edge_status(
        &mut self,
        src: &NodeKey,
        label: &str,
        status: &str,
        origin: Origin,
    ) -> Result<(), LesError> {
        let id = self
            .edge_by_source_label(src, label)
            .ok_or_else(|| LesError::UnknownTarget(format!("edge {label} from {src}")))?;
        match status {
            "zero" => self.edges[id].state.zero.get_or_insert(origin),
            "injective" => self.edges[id].state.injective.get_or_insert(origin),
            "surjective" => self.edges[id].state.surjective.get_or_insert(origin),
            "iso" => {
                self.edges[id].state.injective.get_or_insert(origin);
                self.edges[id].state.surjective.get_or_insert(origin)
            }
            other => {
                return Err(LesError::UnknownTarget(format!(
                    "unknown edge status {other:?}"
                )))
            }
        };
        Ok(())
    }

    fn premises_of(&self, origins: &[Origin]) -> Vec<String> {
        origins
            .iter()
            .map(|o| match o {
                Origin::Fact(i) => format!("fact #{i}"),
                Origin::Step(i) => format!("step #{}", i + 1),
            })
            .collect::<Vec<_>>()
            .tap_dedup()
    }

    fn set_dim(
        &mut self,
        id: NodeId,
        dim: u32,
        origin: Origin,
        steps: &[Step],
    ) -> Result<(), LesError> {
        if let Some((old, old_origin)) = self.nodes[id].dim {
            if old != dim {
                return Err(self.contradiction(
                    format!(
                        "{} assigned dim {dim} but already has dim {old}",
                        self.keys[id]
                    ),
                    &[old_origin, origin],
                    steps,
                ));
            }
            return Ok(());
        }
        if let Some((bound, bound_origin)) = self.nodes[id].upper_bound {
            if dim > bound {
                return Err(self.contradiction(
                    format!(
                        "{} assigned dim {dim} above its upper bound {bound}",
                        self.keys[id]
                    ),
                    &[bound_origin, origin],
                    steps,
                ));
            }
        }
        self.nodes[id].dim = Some((dim, origin));
        Ok(())
    }

    fn contradiction(&self, message: String, origins: &[Origin], steps: &[Step]) -> LesError {
        // walk back to the facts supporting the clash
        let mut facts = Vec::new();
        let mut stack: Vec<Origin> = origins.to_vec();
        let mut seen_steps = std::collections::BTreeSet::new();
        while let Some(o) = stack.pop() {
            match o {
                Origin::Fact(i) => {
                    let tag = format!("fact #{i}");
                    if !facts.contains(&tag) {
                        facts.push(tag);
                    }
                }
                Origin::Step(i) => {
                    if seen_steps.insert(i) {
                        stack.extend(steps[i].premise_origins.iter().copied());
                    }
                }
            }
        }
        facts.sort();
        LesError::Contradiction {
            message,
            premises: facts,
        }
    }

    /// Rank of an edge when it is forced by current knowledge.
    fn edge_rank(&self, id: EdgeId) -> Option<(u32, Vec<Origin>)> {
        let e = &self.edges[id];
        if let Some(o) = e.state.zero {
            return Some((0, vec![o]));
        }
        if let Some(oi) = e.state.injective {
            if let Some((d, od)) = self.nodes[e.src].dim {
                return Some((d, vec![oi, od]));
            }
        }
        if let Some(os) = e.state.surjective {
            if let Some((d, od)) = self.nodes[e.dst].dim {
                return Some((d, vec![os, od]));
            }
        }
        None
    }

    /// Saturate with the rule set; `shuffle_seed` permutes the scan order
    /// (the fixed point is the same; see the confluence tests).
    pub fn saturate(
        &mut self,
        shuffle_seed: Option<u64>,
        steps: &mut Vec<Step>,
    ) -> Result<(), LesError> {
        let mut rng = shuffle_seed.map(XorShift64::new);
        loop {
            let mut edge_order: Vec<EdgeId> = (0..self.edges.len()).collect();
            let mut triple_order: Vec<usize> = (0..self.triples.len()).collect();
            if let Some(r) = rng.as_mut() {
                r.shuffle(&mut edge_order);
                r.shuffle(&mut triple_order);
            }
            let mut changed = false;

            // vanishing endpoints force zero edges
            for &eid in &edge_order {
                let e = &self.edges[eid];
                if e.state.zero.is_some() {
                    continue;
                }
                if let Some((0, o)) = self.nodes[e.src].dim {
                    let step = self.push_step(
                        steps,
                        "zero-source",
                        vec![o],
                        format!(
                            "the map {} is zero (its source vanishes)",
                            self.describe_edge(eid)
                        ),
                    );
                    self.edges[eid].state.zero = Some(step);
                    changed = true;
                } else if let Some((0, o)) = self.nodes[e.dst].dim {
                    let step = self.push_step(
                        steps,
                        "zero-target",
                        vec![o],
                        format!(
                            "the map {} is zero (its target vanishes)",
                            self.describe_edge(eid)
                        ),
                    );
                    self.edges[eid].state.zero = Some(step);
                    changed = true;
                }
            }

            // exactness transfers along triples
            for &ti in &triple_order {
                let (a, node, b) = self.triples[ti];
                // zero in => injective out
                if let Some(o) = self.edges[a].state.zero {
                    if self.edges[b].state.injective.is_none() {
                        let step = self.push_step(
                            steps,
                            "exact: zero in, injective out",
                            vec![o],
                            format!(
                                "the map {} is injective (the incoming map at {} vanishes)",
                                self.describe_edge(b),
                                self.keys[node]
                            ),
                        );
                        self.edges[b].state.injective = Some(step);
                        changed = true;
                    }
                }
                // zero out => surjective in
                if let Some(o) = self.edges[b].state.zero {
                    if self.edges[a].state.surjective.is_none() {
                        let step = self.push_step(
                            steps,
                            "exact: zero out, surjective in",
                            vec![o],
                            format!(
                                "the map {} is surjective (the outgoing map at {} vanishes)",
                                self.describe_edge(a),
                                self.keys[node]
                            ),
                        );
                        self.edges[a].state.surjective = Some(step);
                        changed = true;
                    }
                }
                // injective out => zero in
                if let Some(o) = self.edges[b].state.injective {
                    if self.edges[a].state.zero.is_none() {
                        let step = self.push_step(
                            steps,
                            "exact: injective out, zero in",
                            vec![o],
                            format!(
                                "the map {} is zero (the outgoing map at {} is injective)",
                                self.describe_edge(a),
                                self.keys[node]
                            ),
                        );
                        self.edges[a].state.zero = Some(step);
                        changed = true;
                    }
                }
                // surjective in => zero out
                if let Some(o) = self.edges[a].state.surjective {
                    if self.edges[b].state.zero.is_none() {
                        let step = self.push_step(
                            steps,
                            "exact: surjective in, zero out",
                            vec![o],
                            format!(
                                "the map {} is zero (the incoming map at {} is surjective)",
                                self.describe_edge(b),
                                self.keys[node]
                            ),
                        );
                        self.edges[b].state.zero = Some(step);
                        changed = true;
                    }
                }
                // rank additivity: dim node = rank(in) + rank(out)
                if self.nodes[node].dim.is_none() {
                    if let (Some((ra, oa)), Some((rb, ob))) = (self.edge_rank(a), self.edge_rank(b))
                    {
                        let mut origins = oa;
                        origins.extend(ob);
                        let step = self.push_step(
                            steps,
                            "exact: rank additivity",
                            origins,
                            format!(
                                "dim {} = {} (image rank {} plus kernel rank {})",
                                self.keys[node],
                                ra + rb,
                                ra,
                                rb
                            ),
                        );
                        self.set_dim(node, ra + rb, step, steps)?;
                        changed = true;
                    }
                }
            }

            // iso transport of dimensions, and upper bounds
            for &eid in &edge_order {
                let e = self.edges[eid].clone();
                let iso = e.state.injective.zip(e.state.surjective);
                if let Some((oi, os)) = iso {
                    match (self.nodes[e.src].dim, self.nodes[e.dst].dim) {
                        (Some((d, od)), None) => {
                            let step = self.push_step(
                                steps,
                                "iso transport",
                                vec![oi, os, od],
                                format!(
                                    "dim {} = {d} (isomorphic to {} via {})",
                                    self.keys[e.dst], self.keys[e.src], e.label
                                ),
                            );
                            self.set_dim(e.dst, d, step, steps)?;
                            changed = true;
                        }
                        (None, Some((d, od))) => {
                            let step = self.push_step(
                                steps,
                                "iso transport",
                                vec![oi, os, od],
                                format!(
                                    "dim {} = {d} (isomorphic to {} via {})",
                                    self.keys[e.src], self.keys[e.dst], e.label
                                ),
                            );
                            self.set_dim(e.src, d, step, steps)?;
                            changed = true;
                        }
                        _ => {}
                    }
                }
                // zero + injective forces the source to vanish
                if let (Some(oz), Some(oi)) = (e.state.zero, e.state.injective) {
                    if self.nodes[e.src].dim.is_none() {
                        let step = self.push_step(
                            steps,
                            "zero injection",
                            vec![oz, oi],
                            format!(
                                "dim {} = 0 (an injective map {} is zero)",
                                self.keys[e.src], e.label
                            ),
                        );
                        self.set_dim(e.src, 0, step, steps)?;
                        changed = true;
                    }
                }
                if let (Some(oz), Some(os)) = (e.state.zero, e.state.surjective) {
                    if self.nodes[e.dst].dim.is_none() {
                        let step = self.push_step(
                            steps,
                            "zero surjection",
                            vec![oz, os],
                            format!(
                                "dim {} = 0 (a surjective map {} is zero)",
                                self.keys[e.dst], e.label
                            ),
                        );
                        self.set_dim(e.dst, 0, step, steps)?;
                        changed = true;
                    }
                }
                // upper bounds through injections/surjections
                if let (Some(oi), Some((d, od))) = (e.state.injective, self.nodes[e.dst].dim) {
                    if self.improves_bound(e.src, d) {
                        let step = self.push_step(
                            steps,
                            "bound: injects into",
                            vec![oi, od],
                            format!("dim {} <= {d} (injects via {})", self.keys[e.src], e.label),
                        );
                        self.set_bound(e.src, d, step, steps)?;
                        changed = true;
                    }
                }
                if let (Some(os), Some((d, od))) = (e.state.surjective, self.nodes[e.src].dim) {
                    if self.improves_bound(e.dst, d) {
                        let step = self.push_step(
                            steps,
                            "bound: surjected onto",
                            vec![os, od],
                            format!(
                                "dim {} <= {d} (surjected onto via {})",
                                self.keys[e.dst], e.label
                            ),
                        );
                        self.set_bound(e.dst, d, step, steps)?;
                        changed = true;
                    }
                }
            }

            // final consistency audit of fully-known triples
            for &(a, node, b) in &self.triples {
                if let (Some((d, od)), Some((ra, oa)), Some((rb, ob))) =
                    (self.nodes[node].dim, self.edge_rank(a), self.edge_rank(b))
                {
                    if d != ra + rb {
                        let mut origins = vec![od];
                        origins.extend(oa);
                        origins.extend(ob);
                        return Err(self.contradiction(
                            format!(
                                "exactness fails at {}: dim {d} != rank {ra} + rank {rb}",
                                self.keys[node]
                            ),
                            &origins,
                            steps,
                        ));
                    }
                }
            }

            if !changed {
                return Ok(());
            }
        }
    }

    fn improves_bound(&self, id: NodeId, bound: u32) -> bool {
        if self.nodes[id].dim.is_some() {
            return false;
        }
        match self.nodes[id].upper_bound {
            Some((b, _)) => bound < b,
            None => true,
        }
    }

    fn set_bound(
        &mut self,
        id: NodeId,
        bound: u32,
        origin: Origin,
        steps: &mut Vec<Step>,
    ) -> Result<(), LesError> {
        self.nodes[id].upper_bound = Some((bound, origin));
        if bound == 0 {
            let step = self.push_step(
                steps,
                "bound zero",
                vec![origin],
                format!("dim {} = 0 (its upper bound is zero)", self.keys[id]),
            );
            self.set_dim(id, 0, step, steps)?;
        }
        Ok(())
    }

    fn push_step(
        &self,
        steps: &mut Vec<Step>,
        rule: &'static str,
        origins: Vec<Origin>,
        conclusion: String,
    ) -> Origin {
        let premises = self.premises_of(&origins);
        steps.push(Step {
            rule,
            premises,
            conclusion,
            premise_origins: origins,
        });
        Origin::Step(steps.len() - 1)
    }

    /// All known node dimensions, in key order.
    pub fn known_dims(&self) -> Vec<(NodeKey, u32)> {
        let mut out: Vec<(NodeKey, u32)> = self
            .keys
            .iter()
            .zip(&self.nodes)
            .filter_map(|(k, st)| st.dim.map(|(d, _)| (*k, d)))
            .collect();
        out.sort();
        out
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
}

trait TapDedup {
    fn tap_dedup(self) -> Self;
}

impl TapDedup for Vec<String> {
    fn tap_dedup(mut self) -> Self {
        let mut seen = std::collections::BTreeSet::new();
        self.retain(|x| seen.insert(x.clone()));
        self
    }
}

/// Small deterministic shuffler for the confluence tests.
struct XorShift64(u64);

impl XorShift64 {
    fn new(seed: u64) -> XorShift64 {
        XorShift64(seed.max(1))
    }

    fn next(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    fn shuffle<T>(&mut self, v: &mut [T]) {
        for i in (1..v.len()).rev() {
            let j = (self.next() % (i as u64 + 1)) as usize;
            v.swap(i, j);
        }
    }
}

/// Which of the two long exact sequence families a chain comes from:
/// varying the first argument (maps `i_*, j_*` and the connecting
/// `alpha^{(n)}_*`) or the second (maps `j^*, i^*` and `alpha^{(n)*}`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    Covariant,
    Contravariant,
}

/// Map labels for cofibration `n` (0, 1, 2): the triple
/// (into-middle, out-of-middle, connecting).
pub fn edge_labels(family: Family, cofib: u32) -> (&'static str, &'static str, &'static str) {
    match (family, cofib) {
        (Family::Covariant, 0) => ("i_*", "j_*", "p_*"),
        (Family::Covariant, 1) => ("i'_*", "j'_*", "alpha_*"),
        (Family::Covariant, 2) => ("ibar_*", "jbar_*", "beta_*"),
        (Family::Contravariant, 0) => ("j^*", "i^*", "p^*"),
        (Family::Contravariant, 1) => ("j'^*", "i'^*", "alpha^*"),
        (Family::Contravariant, 2) => ("jbar^*", "ibar^*", "beta^*"),
        _ => panic!("cofibration index {cofib} out of range"),
    }
}

/// The boundary and middle modules of cofibration `n`.
pub fn cofibration_modules(cofib: u32) -> (Spectrum, Spectrum) {
    match cofib {
        0 => (Spectrum::S, Spectrum::M),
        1 => (Spectrum::M, Spectrum::K),
        2 => (Spectrum::K, Spectrum::V2),
        _ => panic!("cofibration index {cofib} out of range"),
    }
}

/// Instantiate a window of one of the two long exact sequences.
///
/// For the covariant family with boundary module `B`, middle `T`, degree
/// shift `d = 2p^cofib - 1` and fixed `box_mod` in the second slot, the
/// period at filtration `s` is
/// `Ext^{s,t}(B) -> Ext^{s,t}(T) -> Ext^{s,t-d}(B) -> Ext^{s+1,t}(B)`.
/// For the contravariant family (`box_mod` in the first slot) it is
/// `Ext^{s,t+d}(B) -> Ext^{s,t}(T) -> Ext^{s,t}(B) -> Ext^{s+1,t+d}(B)`.
/// Exactness triples are registered at every interior node of the window.
#[allow(clippy::too_many_arguments)]
pub fn instantiate_les(
    graph: &mut Graph,
    p: u32,
    family: Family,
    cofib: u32,
    box_mod: Spectrum,
    t: DegExpr,
    s_lo: i32,
    s_hi: i32,
) {
    assert!(s_lo <= s_hi);
    let d = 2 * (p as i64).pow(cofib) - 1;
    let (b_mod, t_mod) = cofibration_modules(cofib);
    let (into_mid, out_mid, delta) = edge_labels(family, cofib);
    let node = |s: i32, t: DegExpr, is_middle: bool| -> NodeKey {
        let m = if is_middle { t_mod } else { b_mod };
        match family {
            Family::Covariant => NodeKey {
                x: m,
                y: box_mod,
                s,
                t,
            },
            Family::Contravariant => NodeKey {
                x: box_mod,
                y: m,
                s,
                t,
            },
        }
    };
    // path of node keys for s in s_lo..=s_hi plus the first node of the
    // next period, with matching edge labels
    let mut path: Vec<(NodeKey, &'static str)> = Vec::new();
    for s in s_lo..=s_hi {
        match family {
            Family::Covariant => {
                path.push((node(s, t, false), into_mid));
                path.push((node(s, t, true), out_mid));
                path.push((node(s, t.shift(-d), false), delta));
            }
            Family::Contravariant => {
                path.push((node(s, t.shift(d), false), into_mid));
                path.push((node(s, t, true), out_mid));
                path.push((node(s, t, false), delta));
            }
        }
    }
    let closing = match family {
        Family::Covariant => node(s_hi + 1, t, false),
        Family::Contravariant => node(s_hi + 1, t.shift(d), false),
    };
    path.push((closing, ""));

    let mut edge_ids = Vec::new();
    for w in path.windows(2) {
        let (src_key, label) = (&w[0].0, w[0].1);
        let dst_key = &w[1].0;
        let src = graph.node(*src_key);
        let dst = graph.node(*dst_key);
        edge_ids.push(graph.edge(src, dst, label));
    }
    for i in 1..path.len() - 1 {
        let node_id = graph.node(path[i].0);
        graph.exact_triple(edge_ids[i - 1], node_id, edge_ids[i]);
    }
}
