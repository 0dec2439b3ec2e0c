//! The fact base: cited Ext dimensions and map facts imported from the
//! literature, shipped as data so the trust boundary is explicit.
//!
//! Every non-derived fact carries a citation string. Node facts assert the
//! dimension of one Ext group at a degree expression `const + pn_coeff *
//! p^n q`; edge facts assert a status of one map in an instantiated chain,
//! identified by its source node and label. `note` entries record cited
//! statements that the engine does not consume (they exist so downstream
//! arguments can reference them); they are carried through loading
//! untouched.

use serde::{Deserialize, Serialize};

use super::engine::NodeKey;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    #[default]
    Cited,
    Computed,
    Derived,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Fact {
    Node {
        target: NodeKey,
        dim: u32,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        generators: Vec<String>,
        citation: String,
        #[serde(default)]
        provenance: Provenance,
    },
    Edge {
        /// Source node of the map inside an instantiated chain.
        target: NodeKey,
        label: String,
        /// "zero" | "injective" | "surjective" | "iso"
        status: String,
        citation: String,
        #[serde(default)]
        provenance: Provenance,
    },
    /// A cited statement carried as data only (never consumed by rules).
    Note { statement: String, citation: String },
}

impl Fact {
    pub fn citation(&self) -> &str {
        match self {
            Fact::Node { citation, .. } => citation,
            Fact::Edge { citation, .. } => citation,
            Fact::Note { citation, .. } => citation,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactBase {
    pub p: u32,
    pub facts: Vec<Fact>,
}

impl FactBase {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("fact base serializes")
    }

    pub fn from_json_str(s: &str) -> Result<FactBase, serde_json::Error> {
        serde_json::from_str(s)
    }

    pub fn node_fact(&self, key: &NodeKey) -> Option<&Fact> {
        self.facts
            .iter()
            .find(|f| matches!(f, Fact::Node { target, .. } if target == key))
    }

    pub fn edge_fact(&self, key: &NodeKey, label: &str) -> Option<&Fact> {
        self.facts.iter().find(
            |f| matches!(f, Fact::Edge { target, label: l, .. } if target == key && l == label),
        )
    }
}

/// Citations used by the standard base.
pub const CIT_LIU: &str = "Liulevicius, The factorization of cyclic reduced powers by secondary cohomology operations (Ext^1, Ext^2 tables)";
pub const CIT_AIKAWA_81: &str =
    "Aikawa, 3-dimensional cohomology of the mod p Steenrod algebra, Table 8.1";
pub const CIT_AIKAWA_82: &str =
    "Aikawa, 3-dimensional cohomology of the mod p Steenrod algebra, Table 8.2";
pub const CIT_LIN: &str = "Lin, Some results on stable homotopy groups of spheres, Proposition 2.1";
pub const CIT_WANG: &str = "Wang, The secondary differentials on the third line of the Adams spectral sequence, Theorem 4.1";

/// The fact base backing the shipped `data/fact_base_p5.json`: the Ext
/// dimensions and map facts the long-exact-sequence replays consume, each
/// with its literature citation. Degrees are expressions in `p^n q` with
/// `n >= 3` free.
pub fn standard_fact_base(p: u32) -> FactBase {
    let q = 2 * (p as i64 - 1);
    let v = p as i64 * q; // p q
    let u = (p as i64 + 1) * q; // (p+1) q
    let w = (p as i64 + 2) * q; // (p+2) q
    let s_ = super::engine::Spectrum::S;
    let m_ = super::engine::Spectrum::M;
    let node = |x, y, s: i32, c0: i64| NodeKey {
        x,
        y,
        s,
        t: super::engine::DegExpr { c0, c1: 1 },
    };
    let nf = |key: NodeKey, dim: u32, generators: Vec<&str>, citation: &str| Fact::Node {
        target: key,
        dim,
        generators: generators.into_iter().map(String::from).collect(),
        citation: citation.to_string(),
        provenance: Provenance::Cited,
    };
    let ef = |key: NodeKey, label: &str, status: &str, citation: &str| Fact::Edge {
        target: key,
        label: label.to_string(),
        status: status.to_string(),
        citation: citation.to_string(),
        provenance: Provenance::Cited,
    };
    let facts = vec![
        // Aikawa, Table 8.1: third-line dimensions near p^n q
        nf(node(s_, s_, 3, w + 1), 0, vec![], CIT_AIKAWA_81),
        nf(node(s_, s_, 3, w + 2), 0, vec![], CIT_AIKAWA_81),
        nf(node(s_, s_, 3, w), 1, vec!["h_n g_0"], CIT_AIKAWA_81),
        nf(node(s_, s_, 2, w - 1), 0, vec![], CIT_AIKAWA_81),
        nf(node(s_, s_, 3, w - 1), 0, vec![], CIT_AIKAWA_81),
        nf(node(s_, s_, 3, u + 3), 0, vec![], CIT_AIKAWA_81),
        nf(node(s_, s_, 3, u + 2), 0, vec![], CIT_AIKAWA_81),
        nf(node(s_, s_, 3, u + 1), 0, vec![], CIT_AIKAWA_81),
        nf(node(s_, s_, 3, u), 0, vec![], CIT_AIKAWA_81),
        nf(node(s_, s_, 3, v + 1), 1, vec!["a_0 h_1 h_n"], CIT_AIKAWA_81),
        nf(node(s_, s_, 3, v + 2), 0, vec![], CIT_AIKAWA_81),
        nf(node(s_, s_, 2, v), 1, vec!["h_1 h_n"], CIT_AIKAWA_81),
        nf(
            node(s_, s_, 3, v),
            2,
            vec!["b_0 h_n", "h_1 b_{n-1}"],
            CIT_AIKAWA_81,
        ),
        nf(node(s_, s_, 2, v - 1), 0, vec![], CIT_AIKAWA_81),
        nf(node(s_, s_, 2, v + 1), 0, vec![], CIT_AIKAWA_81),
        // Liulevicius: first and second lines
        nf(node(s_, s_, 1, v - 1), 0, vec![], CIT_LIU),
        nf(node(s_, s_, 2, w), 0, vec![], CIT_LIU),
        nf(node(s_, s_, 2, u), 0, vec![], CIT_LIU),
        nf(node(s_, s_, 2, u + 1), 0, vec![], CIT_LIU),
        nf(node(s_, s_, 2, u + 2), 0, vec![], CIT_LIU),
        // Lin: fourth-line dimensions
        nf(node(s_, s_, 4, w + 1), 0, vec![], CIT_LIN),
        nf(node(s_, s_, 4, w + 2), 0, vec![], CIT_LIN),
        nf(
            node(s_, s_, 4, v + 2),
            1,
            vec!["a_0 a_0 h_1 h_n"],
            &format!("{CIT_WANG}; also {CIT_LIN}"),
        ),
        nf(
            node(s_, s_, 4, v + 1),
            2,
            vec!["a_0 b_0 h_n", "a_0 h_1 b_{n-1}"],
            CIT_LIN,
        ),
        // map facts: connecting maps of the Bockstein cofibration act as
        // multiplication by a_0 on Ext(S, S)
        ef(
            node(s_, s_, 2, v),
            "p_*",
            "iso",
            &format!("a_0 . h_1 h_n = a_0 h_1 h_n != 0; {CIT_AIKAWA_81}"),
        ),
        ef(
            node(s_, s_, 3, v),
            "p_*",
            "iso",
            &format!("a_0-multiplication carries {{b_0 h_n, h_1 b_{{n-1}}}} to {{a_0 b_0 h_n, a_0 h_1 b_{{n-1}}}} independently; {CIT_AIKAWA_82}"),
        ),
        ef(
            node(s_, s_, 3, v + 1),
            "p_*",
            "iso",
            &format!("a_0 . a_0 h_1 h_n = a_0 a_0 h_1 h_n != 0; {CIT_AIKAWA_82}"),
        ),
        ef(
            node(s_, m_, 3, w - 1),
            "p_*",
            "zero",
            &format!("p_* j^*(h_n g_0) = j^* p^*(g_0 h_n) = 0 since a_0 g_0 = 0; {CIT_AIKAWA_82} (p_* = p^* on these bimodule groups)"),
        ),
        // recorded for reference by downstream differential arguments;
        // never consumed by the rules
        Fact::Note {
            statement: "d_2(i_* j_* W) has nonzero image under i^*, where W generates Ext^(3, p^n q + (p+2)q + 1)(M, M)".into(),
            citation: format!("{CIT_LIN} and Lin, p. 488 (d_2(i_*(h_n g_0)) != 0)"),
        },
        Fact::Note {
            statement: "d_2(j^* i^* W) != 0 for the same W (via d_2(h_n g_0) = alpha_2 b_0 h_n != 0)".into(),
            citation: format!("{CIT_LIN}; a_0 g_0 = 0 from {CIT_AIKAWA_82}"),
        },
    ];
    FactBase { p, facts }
}
