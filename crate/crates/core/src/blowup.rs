//! Affine blow-up charts along variable centers, exceptional factoring, and
//! the iterated Fitting-ideal blow-up driver.
//!
//! Chart coordinates reuse the names of the root coordinates: in the chart
//! of `v` for the center `(v, u_1, ..., u_k)` the old `u_i` becomes `v * u_i`
//! and the new coordinate is again called `u_i`.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::diagonal::{diagonalize_local, DiagonalForm, Diagonalization};
use crate::error::{Error, Result};
use crate::fitting::{norm_ideal, rank_profile, NormIdeal, Presentation};
use crate::ideal::{IdealGens, MonomialIdeal};
use crate::poly::{Monomial, Poly, VarSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChartStep {
    pub center: Vec<String>,
    pub generator: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chart {
    pub path: Vec<ChartStep>,
    pub vars: VarSet,
    /// Root variable to its expression in chart coordinates.
    pub subst: BTreeMap<String, Poly>,
    pub exceptional: Vec<Monomial>,
}

impl Chart {
    pub fn root(vars: &VarSet) -> Self {
        Chart {
            path: Vec::new(),
            vars: vars.clone(),
            subst: vars
                .names()
                .iter()
                .map(|v| (v.clone(), Poly::var(v)))
                .collect(),
            exceptional: Vec::new(),
        }
    }

    /// Chosen generators along the path, e.g. `["b", "a"]`.
    pub fn labels(&self) -> Vec<String> {
        self.path.iter().map(|s| s.generator.clone()).collect()
    }

    pub fn substitution_text(&self, vars: &VarSet) -> BTreeMap<String, String> {
        self.subst
            .iter()
            .map(|(k, p)| (k.clone(), p.render(vars)))
            .collect()
    }
}

/// The substitution of a single chart step: `u -> v * u` for the other
/// center variables `u`.
pub fn chart_step(center: &[String], v: &str) -> BTreeMap<String, Poly> {
    center
        .iter()
        .filter(|u| u.as_str() != v)
        .map(|u| (u.clone(), &Poly::var(v) * &Poly::var(u)))
        .collect()
}

/// One chart per center generator, in center order.
pub fn blowup_variable_center(c: &Chart, center: &[String]) -> Result<Vec<Chart>> {
    if center.is_empty() {
        return Err(Error::EmptyCenter);
    }
    let mut seen = BTreeSet::new();
    for v in center {
        if !c.vars.contains(v) {
            return Err(Error::UnknownVariable(v.clone()));
        }
        if !seen.insert(v) {
            return Err(Error::RepeatedCenterVariable);
        }
    }
    Ok(center
        .iter()
        .map(|v| {
            let step = chart_step(center, v);
            let mut path = c.path.clone();
            path.push(ChartStep {
                center: center.to_vec(),
                generator: v.clone(),
            });
            let mut exceptional = c.exceptional.clone();
            exceptional.push(Monomial::var(v));
            Chart {
                path,
                vars: c.vars.clone(),
                subst: c
                    .subst
                    .iter()
                    .map(|(k, p)| (k.clone(), p.substitute(&step)))
                    .collect(),
                exceptional,
            }
        })
        .collect())
}

/// Total transform `monomial * residual` of an ideal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factored {
    pub monomial: Monomial,
    pub residual: IdealGens,
}

/// Splits off the common monomial content of a generator list.
pub fn factor_content(ideal: &IdealGens) -> Factored {
    let content = ideal
        .gens()
        .iter()
        .map(|g| g.monomial_content().expect("non-zero generator"))
        .reduce(|a, b| a.gcd(&b))
        .unwrap_or_else(Monomial::one);
    let residual = IdealGens::new(
        ideal
            .gens()
            .iter()
            .map(|g| g.div_monomial(&content).expect("content divides")),
    );
    Factored {
        monomial: content,
        residual,
    }
}

/// Pulls root-ring generators into the chart and factors their content.
pub fn pull_and_factor(c: &Chart, ideal: &IdealGens) -> Factored {
    factor_content(&ideal.substitute(&c.subst))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeStatus {
    Open,
    DiagonalCertified,
    UnsupportedCenter(String),
}

impl NodeStatus {
    pub fn name(&self) -> &'static str {
        match self {
            NodeStatus::Open => "open",
            NodeStatus::DiagonalCertified => "diagonal-certified",
            NodeStatus::UnsupportedCenter(_) => "unsupported-center",
        }
    }
}

/// The ideal blown up at a node: `F_index = content * (center)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlownUp {
    pub index: usize,
    pub content: Monomial,
    pub center: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChartNode {
    pub chart: Chart,
    pub presentation: Presentation,
    /// `F_0, ..., F_q` of the pulled-back presentation; empty when the rank
    /// profile could not be computed.
    pub fitting: Vec<IdealGens>,
    pub generic_rank: Option<usize>,
    pub maximal_rank: Option<usize>,
    pub status: NodeStatus,
    pub blown_up: Option<BlownUp>,
    pub diagonal: Option<DiagonalForm>,
    pub children: Vec<ChartNode>,
}

impl ChartNode {
    pub fn leaves(&self) -> Vec<&ChartNode> {
        if self.children.is_empty() {
            vec![self]
        } else {
            self.children.iter().flat_map(ChartNode::leaves).collect()
        }
    }

    pub fn nodes(&self) -> Vec<&ChartNode> {
        let mut out = vec![self];
        for c in &self.children {
            out.extend(c.nodes());
        }
        out
    }

    pub fn to_json(&self, vars: &VarSet) -> Value {
        let fitting: Vec<String> = self.fitting.iter().map(|f| f.render(vars)).collect();
        let mut node = json!({
            "path": self.chart.labels(),
            "substitution": self.chart.substitution_text(vars),
            "exceptional": self.chart.exceptional.iter().map(|m| m.render(vars)).collect::<Vec<_>>(),
            "presentation": self.presentation.render(vars),
            "fitting": fitting,
            "generic_rank": self.generic_rank,
            "maximal_rank": self.maximal_rank,
            "status": self.status.name(),
        });
        if let NodeStatus::UnsupportedCenter(reason) = &self.status {
            node["reason"] = json!(reason);
        }
        if let Some(b) = &self.blown_up {
            node["blown_up"] = json!({
                "fitting_index": b.index,
                "content": b.content.render(vars),
                "center": b.center,
            });
        }
        if let Some(d) = &self.diagonal {
            node["diagonal"] = json!(d.entries.iter().map(|p| p.render(vars)).collect::<Vec<_>>());
        }
        node["children"] = Value::Array(self.children.iter().map(|c| c.to_json(vars)).collect());
        node
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChartTree {
    pub root_presentation: Presentation,
    pub vars: VarSet,
    pub root_generic_rank: usize,
    pub max_rounds: usize,
    pub root: ChartNode,
}

/// Where the next center comes from, or why there is none.
enum Next {
    Certified,
    Center(BlownUp),
    Unsupported(String),
}

fn next_center(fitting: &[IdealGens], generic: usize, maximal: usize) -> Next {
    for (i, f) in fitting.iter().enumerate().take(maximal).skip(generic) {
        match f.is_principal() {
            Ok(true) => continue,
            Ok(false) => {}
            Err(e) => return Next::Unsupported(format!("F_{i}: {e}")),
        }
        let Some(m) = f.as_monomial() else {
            return Next::Unsupported(format!("F_{i} is not a monomial ideal"));
        };
        let content = m.gcd().expect("non-zero ideal");
        let residual = m.div_monomial(&content).expect("gcd divides");
        let center: Option<Vec<String>> = residual
            .gens()
            .iter()
            .map(|g| g.as_variable().map(str::to_owned))
            .collect();
        return match center {
            Some(center) => Next::Center(BlownUp {
                index: i,
                content,
                center,
            }),
            None => Next::Unsupported(format!(
                "F_{i} residual {residual} is not generated by variables"
            )),
        };
    }
    Next::Certified
}

fn expand(root: &Presentation, chart: Chart, round: usize, max_rounds: usize) -> ChartNode {
    let presentation = root.base_change(&chart.subst);
    let mut node = ChartNode {
        chart,
        presentation,
        fitting: Vec::new(),
        generic_rank: None,
        maximal_rank: None,
        status: NodeStatus::Open,
        blown_up: None,
        diagonal: None,
        children: Vec::new(),
    };
    let profile = match rank_profile(&node.presentation) {
        Ok(p) => p,
        Err(e) => {
            node.status = NodeStatus::UnsupportedCenter(e.to_string());
            return node;
        }
    };
    node.generic_rank = Some(profile.generic_rank);
    node.maximal_rank = Some(profile.maximal_rank);
    node.fitting = profile.ideals;
    match next_center(&node.fitting, profile.generic_rank, profile.maximal_rank) {
        Next::Certified => {
            node.status = NodeStatus::DiagonalCertified;
            if let Diagonalization::Diagonal(d) = diagonalize_local(&node.presentation) {
                node.diagonal = Some(d);
            }
        }
        Next::Unsupported(reason) => node.status = NodeStatus::UnsupportedCenter(reason),
        Next::Center(b) => {
            if round >= max_rounds {
                node.status = NodeStatus::Open;
            } else {
                let charts = blowup_variable_center(&node.chart, &b.center)
                    .expect("center variables come from the chart ring");
                node.children = charts
                    .into_par_iter()
                    .map(|c| expand(root, c, round + 1, max_rounds))
                    .collect();
                node.status = NodeStatus::Open;
            }
            node.blown_up = Some(b);
        }
    }
    node
}

/// Repeatedly blows up the first non-principal Fitting ideal (after removing
/// its monomial content) in every chart, for at most `max_rounds` rounds
/// along any branch. Charts are expanded in parallel; the result does not
/// depend on scheduling.
pub fn huli_driver(a: &Presentation, vars: &VarSet, max_rounds: usize) -> Result<ChartTree> {
    let vars = vars.extended(a.variables().names().iter().cloned());
    let profile = rank_profile(a)?;
    let root = expand(a, Chart::root(&vars), 0, max_rounds);
    Ok(ChartTree {
        root_presentation: a.clone(),
        vars,
        root_generic_rank: profile.generic_rank,
        max_rounds,
        root,
    })
}

impl ChartTree {
    pub fn to_json(&self) -> Value {
        json!({
            "root_generic_rank": self.root_generic_rank,
            "max_rounds": self.max_rounds,
            "certificate": self.certificate().to_json(),
            "tree": self.root.to_json(&self.vars),
        })
    }

    pub fn certificate(&self) -> Certificate {
        diagonal_certificate(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub certified: bool,
    /// Leaf paths with the reason they fail.
    pub failures: Vec<(Vec<String>, String)>,
}

impl Certificate {
    pub fn to_json(&self) -> Value {
        json!({
            "certified": self.certified,
            "failures": self.failures.iter().map(|(p, r)| json!({"path": p, "reason": r})).collect::<Vec<_>>(),
        })
    }
}

/// Every leaf certified with the generic rank of the root.
pub fn diagonal_certificate(t: &ChartTree) -> Certificate {
    let mut failures = Vec::new();
    for leaf in t.root.leaves() {
        let path = leaf.chart.labels();
        if leaf.status != NodeStatus::DiagonalCertified {
            failures.push((path, leaf.status.name().to_string()));
        } else if leaf.generic_rank != Some(t.root_generic_rank) {
            failures.push((path, "generic rank changed".to_string()));
        }
    }
    Certificate {
        certified: failures.is_empty(),
        failures,
    }
}

/// The norm ideal as a blow-up center: content times a variable center when
/// possible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormCenter {
    pub norm: NormIdeal,
    pub factored: Factored,
    /// Variables of the residual center; `None` when it is not generated by
    /// distinct variables (only the ideal is reported then).
    pub center: Option<Vec<String>>,
    pub charts: Vec<Chart>,
}

pub fn norm_blowup(a: &Presentation, vars: &VarSet) -> Result<NormCenter> {
    let norm = norm_ideal(a)?;
    let factored = factor_content(&norm.ideal);
    let root = Chart::root(&vars.extended(a.variables().names().iter().cloned()));
    let center: Option<Vec<String>> = match factored.residual.as_monomial() {
        Some(m) if m.is_unit() => Some(Vec::new()),
        Some(m) => m
            .gens()
            .iter()
            .map(|g| g.as_variable().map(str::to_owned))
            .collect(),
        None => None,
    };
    let charts = match &center {
        Some(c) if !c.is_empty() => blowup_variable_center(&root, c)?,
        Some(_) => vec![root],
        None => Vec::new(),
    };
    Ok(NormCenter {
        norm,
        factored,
        center,
        charts,
    })
}

/// The monomial ideal generated by variables, for convenience in reports.
pub fn center_ideal(center: &[String]) -> MonomialIdeal {
    MonomialIdeal::variables(center)
}
