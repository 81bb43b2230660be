//! Protocol trees and their declarative JSON format.
//!
//! A protocol is a tree of two node kinds: `Generate` leaves that produce
//! elementary entanglement in heralded attempts (one timestep each), and
//! `RestartUntilSuccess` nodes that wait for all children, attempt a
//! probabilistic operation (swap, fusion, distillation), and force full
//! regeneration of every child on failure. Only leaves advance the clock;
//! the operations themselves take no time.
//!
//! `bound_mode` marks a node whose success probability is a lower bound
//! rather than a constant (distillation is the canonical case, with floor
//! 1/2). Results computed from such trees are upper-bound models, not exact.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Which elementary-link model the closed-form bounds should assume.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenModel {
    /// Discrete heralded attempts (geometric completion time).
    Discrete,
    /// Continuous approximation (exponential completion time).
    Exponential,
}

/// A node of a protocol tree.
#[derive(Debug, Clone, PartialEq)]
pub enum ProtocolNode<R: Real = f64> {
    Generate {
        p: R,
        label: Option<String>,
    },
    RestartUntilSuccess {
        p: R,
        bound_mode: bool,
        children: Vec<ProtocolNode<R>>,
        label: Option<String>,
    },
}

impl<R: Real> ProtocolNode<R> {
    pub fn generate(p: R) -> Result<Self> {
        check_probability(p)?;
        Ok(ProtocolNode::Generate { p, label: None })
    }

    pub fn restart(p: R, children: Vec<ProtocolNode<R>>) -> Result<Self> {
        Self::restart_inner(p, false, children)
    }

    pub fn restart_bound_mode(p: R, children: Vec<ProtocolNode<R>>) -> Result<Self> {
        Self::restart_inner(p, true, children)
    }

    /// Distillation node: success probability floored at 1/2, bound mode.
    pub fn distill(children: Vec<ProtocolNode<R>>) -> Result<Self> {
        Self::restart_inner(R::half(), true, children)
    }

    fn restart_inner(p: R, bound_mode: bool, children: Vec<ProtocolNode<R>>) -> Result<Self> {
        check_probability(p)?;
        if children.is_empty() {
            return Err(Error::Semantic(
                "restart-until-success node needs at least one child".into(),
            ));
        }
        Ok(ProtocolNode::RestartUntilSuccess {
            p,
            bound_mode,
            children,
            label: None,
        })
    }

    pub fn with_label(mut self, text: impl Into<String>) -> Self {
        match &mut self {
            ProtocolNode::Generate { label, .. } => *label = Some(text.into()),
            ProtocolNode::RestartUntilSuccess { label, .. } => *label = Some(text.into()),
        }
        self
    }

    pub fn p(&self) -> R {
        match self {
            ProtocolNode::Generate { p, .. } => *p,
            ProtocolNode::RestartUntilSuccess { p, .. } => *p,
        }
    }

    pub fn label(&self) -> Option<&str> {
        match self {
            ProtocolNode::Generate { label, .. } => label.as_deref(),
            ProtocolNode::RestartUntilSuccess { label, .. } => label.as_deref(),
        }
    }

    pub fn children(&self) -> &[ProtocolNode<R>] {
        match self {
            ProtocolNode::Generate { .. } => &[],
            ProtocolNode::RestartUntilSuccess { children, .. } => children,
        }
    }

    pub fn is_generate(&self) -> bool {
        matches!(self, ProtocolNode::Generate { .. })
    }

    /// True if any node in the tree has `bound_mode` set, in which case
    /// computed results are upper-bound models rather than exact laws.
    pub fn has_bound_mode(&self) -> bool {
        match self {
            ProtocolNode::Generate { .. } => false,
            ProtocolNode::RestartUntilSuccess {
                bound_mode,
                children,
                ..
            } => *bound_mode || children.iter().any(|c| c.has_bound_mode()),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            ProtocolNode::Generate { .. } => 1,
            ProtocolNode::RestartUntilSuccess { children, .. } => {
                children.iter().map(|c| c.leaf_count()).sum()
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            ProtocolNode::Generate { .. } => 0,
            ProtocolNode::RestartUntilSuccess { children, .. } => {
                1 + children.iter().map(|c| c.depth()).max().unwrap_or(0)
            }
        }
    }

    /// Re-checks all structural invariants (useful for trees built by hand).
    pub fn validate(&self) -> Result<()> {
        check_probability(self.p())?;
        match self {
            ProtocolNode::Generate { .. } => Ok(()),
            ProtocolNode::RestartUntilSuccess { children, .. } => {
                if children.is_empty() {
                    return Err(Error::Semantic(
                        "restart-until-success node needs at least one child".into(),
                    ));
                }
                children.iter().try_for_each(|c| c.validate())
            }
        }
    }
}

fn check_probability<R: Real>(p: R) -> Result<()> {
    if !(p > R::zero() && p <= R::one()) {
        return Err(Error::Semantic(format!(
            "probability {} out of range (0, 1]",
            p.to_f64().unwrap_or(f64::NAN)
        )));
    }
    Ok(())
}

/// Symmetric nested repeater: the entanglement span doubles at each of the
/// `nesting_levels` levels, so the chain covers `2^n` segments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepeaterSpec<R: Real = f64> {
    pub nesting_levels: u32,
    pub p_gen: R,
    pub p_swap: R,
    pub gen_model: GenModel,
}

impl<R: Real> RepeaterSpec<R> {
    pub fn new(nesting_levels: u32, p_gen: R, p_swap: R, gen_model: GenModel) -> Result<Self> {
        check_probability(p_gen)?;
        check_probability(p_swap)?;
        Ok(RepeaterSpec {
            nesting_levels,
            p_gen,
            p_swap,
            gen_model,
        })
    }
}

/// Star switch: `arms` identical subnetworks feed a single fusion node.
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchSpec<R: Real = f64> {
    pub arms: u32,
    pub p_fuse: R,
    pub arm: ProtocolNode<R>,
}

impl<R: Real> SwitchSpec<R> {
    pub fn new(arms: u32, p_fuse: R, arm: ProtocolNode<R>) -> Result<Self> {
        if arms < 2 {
            return Err(Error::invalid("arms", arms as f64, "switch needs k >= 2 arms"));
        }
        check_probability(p_fuse)?;
        arm.validate()?;
        Ok(SwitchSpec { arms, p_fuse, arm })
    }
}

/// Builds the symmetric nested repeater tree: `n = 0` is a single elementary
/// link; each further level swaps two copies of the level below.
pub fn build_repeater<R: Real>(spec: &RepeaterSpec<R>) -> ProtocolNode<R> {
    fn level<R: Real>(n: u32, p_gen: R, p_swap: R) -> ProtocolNode<R> {
        if n == 0 {
            ProtocolNode::Generate {
                p: p_gen,
                label: None,
            }
        } else {
            let child = level(n - 1, p_gen, p_swap);
            ProtocolNode::RestartUntilSuccess {
                p: p_swap,
                bound_mode: false,
                children: vec![child.clone(), child],
                label: None,
            }
        }
    }
    level(spec.nesting_levels, spec.p_gen, spec.p_swap)
}

/// Builds the star-switch tree: one fusion node over `arms` copies of `arm`.
pub fn build_switch<R: Real>(spec: &SwitchSpec<R>) -> ProtocolNode<R> {
    ProtocolNode::RestartUntilSuccess {
        p: spec.p_fuse,
        bound_mode: false,
        children: vec![spec.arm.clone(); spec.arms as usize],
        label: None,
    }
}

// ---------------------------------------------------------------------------
// JSON document format
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeDoc {
    kind: String,
    p: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bound_mode: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    children: Option<Vec<NodeDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

/// Parses a protocol document (UTF-8 JSON) into a validated tree.
pub fn parse_protocol<R: Real>(text: &str) -> Result<ProtocolNode<R>> {
    let doc: NodeDoc = serde_json::from_str(text).map_err(|e| {
        Error::Syntax(format!("line {}, column {}: {}", e.line(), e.column(), e))
    })?;
    doc_to_node(&doc)
}

fn doc_to_node<R: Real>(doc: &NodeDoc) -> Result<ProtocolNode<R>> {
    if !(doc.p > 0.0 && doc.p <= 1.0) {
        return Err(Error::Semantic(format!(
            "probability {} out of range (0, 1]",
            doc.p
        )));
    }
    let p = R::of_f64(doc.p);
    match doc.kind.as_str() {
        "generate" => {
            if doc.children.is_some() {
                return Err(Error::Semantic(
                    "\"generate\" nodes must not have children".into(),
                ));
            }
            if doc.bound_mode == Some(true) {
                return Err(Error::Semantic(
                    "bound_mode is only meaningful on \"rus\" nodes".into(),
                ));
            }
            Ok(ProtocolNode::Generate {
                p,
                label: doc.label.clone(),
            })
        }
        "rus" => {
            let children = doc
                .children
                .as_ref()
                .ok_or_else(|| Error::Semantic("\"rus\" nodes require children".into()))?;
            if children.is_empty() {
                return Err(Error::Semantic(
                    "\"rus\" nodes require at least one child".into(),
                ));
            }
            let children = children
                .iter()
                .map(doc_to_node)
                .collect::<Result<Vec<_>>>()?;
            Ok(ProtocolNode::RestartUntilSuccess {
                p,
                bound_mode: doc.bound_mode.unwrap_or(false),
                children,
                label: doc.label.clone(),
            })
        }
        other => Err(Error::Semantic(format!(
            "unknown node kind {other:?} (expected \"generate\" or \"rus\")"
        ))),
    }
}

fn node_to_doc<R: Real>(node: &ProtocolNode<R>) -> NodeDoc {
    match node {
        ProtocolNode::Generate { p, label } => NodeDoc {
            kind: "generate".into(),
            p: p.to_f64().unwrap(),
            bound_mode: None,
            children: None,
            label: label.clone(),
        },
        ProtocolNode::RestartUntilSuccess {
            p,
            bound_mode,
            children,
            label,
        } => NodeDoc {
            kind: "rus".into(),
            p: p.to_f64().unwrap(),
            bound_mode: if *bound_mode { Some(true) } else { None },
            children: Some(children.iter().map(node_to_doc).collect()),
            label: label.clone(),
        },
    }
}

/// Serializes a tree back to its JSON document form.
pub fn serialize_protocol<R: Real>(node: &ProtocolNode<R>) -> String {
    serde_json::to_string_pretty(&node_to_doc(node)).expect("tree serialization cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_minimal_generate() {
        let node: ProtocolNode = parse_protocol(r#"{"kind":"generate","p":0.5}"#).unwrap();
        assert!(node.is_generate());
        assert_eq!(node.p(), 0.5);
    }

    #[test]
    fn parse_distill_then_swap_tree() {
        // two generates distilled, then swapped with a third generate
        let text = r#"{
            "kind": "rus", "p": 0.5, "label": "swap",
            "children": [
                {"kind": "rus", "p": 0.5, "bound_mode": true, "children": [
                    {"kind": "generate", "p": 0.5},
                    {"kind": "generate", "p": 0.5}
                ]},
                {"kind": "generate", "p": 0.5}
            ]
        }"#;
        let node: ProtocolNode = parse_protocol(text).unwrap();
        assert_eq!(node.leaf_count(), 3);
        assert!(node.has_bound_mode());
        assert_eq!(node.label(), Some("swap"));
        assert!(!node.children()[1].has_bound_mode());
    }

    #[test]
    fn parse_rejects_out_of_range_probability() {
        let err = parse_protocol::<f64>(r#"{"kind":"generate","p":1.5}"#).unwrap_err();
        assert!(matches!(err, Error::Semantic(_)), "{err}");
    }

    #[test]
    fn parse_rejects_unknown_fields() {
        let err =
            parse_protocol::<f64>(r#"{"kind":"generate","p":0.5,"extra":1}"#).unwrap_err();
        assert!(matches!(err, Error::Syntax(_)), "{err}");
    }

    #[test]
    fn parse_rejects_generate_with_children() {
        let err = parse_protocol::<f64>(
            r#"{"kind":"generate","p":0.5,"children":[{"kind":"generate","p":0.5}]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Semantic(_)), "{err}");
    }

    #[test]
    fn parse_rejects_rus_without_children() {
        let err = parse_protocol::<f64>(r#"{"kind":"rus","p":0.5}"#).unwrap_err();
        assert!(matches!(err, Error::Semantic(_)), "{err}");
        let err = parse_protocol::<f64>(r#"{"kind":"rus","p":0.5,"children":[]}"#).unwrap_err();
        assert!(matches!(err, Error::Semantic(_)), "{err}");
    }

    #[test]
    fn parse_reports_syntax_location() {
        let err = parse_protocol::<f64>("{\"kind\":").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line"), "{msg}");
    }

    #[test]
    fn repeater_level_zero_is_a_leaf() {
        let spec = RepeaterSpec::new(0, 0.5, 0.5, GenModel::Discrete).unwrap();
        let tree = build_repeater(&spec);
        assert!(tree.is_generate());
    }

    #[test]
    fn repeater_level_one_swaps_two_leaves() {
        let spec = RepeaterSpec::new(1, 0.3, 0.7, GenModel::Discrete).unwrap();
        let tree = build_repeater(&spec);
        assert_eq!(tree.p(), 0.7);
        assert_eq!(tree.children().len(), 2);
        assert!(tree.children().iter().all(|c| c.is_generate()));
    }

    #[test]
    fn repeater_level_four_has_sixteen_leaves() {
        let spec = RepeaterSpec::new(4, 0.5, 0.5, GenModel::Discrete).unwrap();
        let tree = build_repeater(&spec);
        assert_eq!(tree.leaf_count(), 16);
        assert_eq!(tree.depth(), 4);
    }

    #[test]
    fn switch_with_generate_arms() {
        let arm = ProtocolNode::generate(0.5).unwrap();
        let spec = SwitchSpec::new(3, 0.5, arm).unwrap();
        let tree = build_switch(&spec);
        assert_eq!(tree.children().len(), 3);
        assert_eq!(tree.leaf_count(), 3);
        assert!(tree.children().windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn two_armed_switch_equals_one_level_repeater() {
        let arm = ProtocolNode::generate(0.4).unwrap();
        let switch = build_switch(&SwitchSpec::new(2, 0.6, arm).unwrap());
        let repeater = build_repeater(&RepeaterSpec::new(1, 0.4, 0.6, GenModel::Discrete).unwrap());
        assert_eq!(switch, repeater);
    }

    #[test]
    fn switch_over_repeater_arms() {
        let arm = build_repeater(&RepeaterSpec::new(2, 0.5, 0.5, GenModel::Discrete).unwrap());
        let tree = build_switch(&SwitchSpec::new(3, 0.5, arm).unwrap());
        assert_eq!(tree.leaf_count(), 12);
    }

    #[test]
    fn round_trip_preserves_structure() {
        let tree: ProtocolNode = ProtocolNode::restart(
            0.7,
            vec![
                ProtocolNode::distill(vec![
                    ProtocolNode::generate(0.25).unwrap(),
                    ProtocolNode::generate(0.25).unwrap(),
                ])
                .unwrap(),
                ProtocolNode::generate(0.9).unwrap().with_label("east"),
            ],
        )
        .unwrap();
        let text = serialize_protocol(&tree);
        let back: ProtocolNode = parse_protocol(&text).unwrap();
        assert_eq!(back, tree);
    }

    #[test]
    fn switch_spec_rejects_single_arm() {
        let arm = ProtocolNode::generate(0.5).unwrap();
        assert!(SwitchSpec::new(1, 0.5, arm).is_err());
    }
}
