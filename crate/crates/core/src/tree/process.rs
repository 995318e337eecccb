//! The iterated blow-up along `I_gamma` and its chart report.

use std::collections::BTreeSet;

use serde_json::{json, Value};

use super::{z_var, WTree};
use crate::blowup::{blowup_variable_center, chart_step, pull_and_factor, Chart, Factored};
use crate::error::{Error, Result};
use crate::ideal::IdealGens;
use crate::poly::{Monomial, Poly, VarSet};

/// One chart of the process. `phi` and `j` are the equation and ideal of the
/// input tree pulled back to this chart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VzNode {
    pub chart: Chart,
    pub tree: WTree,
    pub path_tree: bool,
    pub phi: (Monomial, Poly),
    pub j: Factored,
    pub principal: bool,
    pub snc: bool,
    pub children: Vec<VzNode>,
}

impl VzNode {
    pub fn labels(&self) -> Vec<String> {
        self.chart.labels()
    }

    /// Charts whose tree is a path tree.
    pub fn terminal_charts(&self) -> Vec<&VzNode> {
        if self.children.is_empty() {
            vec![self]
        } else {
            self.children
                .iter()
                .flat_map(VzNode::terminal_charts)
                .collect()
        }
    }

    pub fn nodes(&self) -> Vec<&VzNode> {
        let mut out = vec![self];
        for c in &self.children {
            out.extend(c.nodes());
        }
        out
    }

    /// Looks up a chart by its generator labels, e.g. `["a", "b", "c"]`.
    pub fn find(&self, labels: &[&str]) -> Option<&VzNode> {
        let mut node = self;
        for l in labels {
            let z = z_var(l);
            node = node
                .children
                .iter()
                .find(|c| c.chart.path.last().is_some_and(|s| s.generator == z))?;
        }
        Some(node)
    }

    pub fn to_json(&self, vars: &VarSet) -> Value {
        let labels: Vec<String> = self
            .labels()
            .iter()
            .map(|z| z.strip_prefix("z_").unwrap_or(z).to_string())
            .collect();
        json!({
            "chart": labels,
            "tree": self.tree.to_string(),
            "path_tree": self.path_tree,
            "phi": {
                "monomial": self.phi.0.render(vars),
                "residual": self.phi.1.render(vars),
            },
            "j": {
                "monomial": self.j.monomial.render(vars),
                "residual": self.j.residual.render(vars),
            },
            "principal": self.principal,
            "snc": self.snc,
            "children": self.children.iter().map(|c| c.to_json(vars)).collect::<Vec<_>>(),
        })
    }
}

/// True when some term of `residual` is a bare `w` variable with
/// coefficient one that divides no other term.
pub fn snc_check(residual: &Poly, w_vars: &BTreeSet<String>) -> bool {
    residual.terms().any(|(m, c)| {
        let Some(w) = m.as_variable() else {
            return false;
        };
        c == &num_rational::BigRational::from_integer(1.into())
            && w_vars.contains(w)
            && residual.terms().all(|(n, _)| n == m || n.exponent(w) == 0)
    })
}

fn w_vars(vars: &VarSet) -> BTreeSet<String> {
    vars.names()
        .iter()
        .filter(|v| v.starts_with("w_"))
        .cloned()
        .collect()
}

/// Splits off the largest monomial in the `z` coordinates dividing every
/// term; the `w` coordinates stay in the residual.
pub fn factor_phi(phi: &Poly) -> (Monomial, Poly) {
    let full = phi.monomial_content().expect("equation is non-zero");
    let content = Monomial::from_pairs(full.iter().filter(|(v, _)| !v.starts_with("w_")));
    let residual = phi.div_monomial(&content).expect("content divides");
    (content, residual)
}

fn node(root: &WTree, chart: Chart, tree: WTree, depth: usize, max_depth: usize) -> Result<VzNode> {
    let (content, residual) = factor_phi(&root.phi().substitute(&chart.subst));
    let j = pull_and_factor(&chart, &IdealGens::from(root.j_ideal()));
    let principal = j.residual == IdealGens::unit();
    let snc = snc_check(&residual, &w_vars(&chart.vars));
    let path_tree = tree.is_path_tree();
    let mut children = Vec::new();
    if !path_tree {
        if depth >= max_depth {
            return Err(Error::DepthExhausted(max_depth));
        }
        let center: Vec<String> = tree.branch_children().iter().map(|a| z_var(a)).collect();
        let charts = blowup_variable_center(&chart, &center)?;
        for (c, (_, t)) in charts.into_iter().zip(tree.monoidal_transforms()) {
            children.push(node(root, c, t, depth + 1, max_depth)?);
        }
    }
    Ok(VzNode {
        chart,
        tree,
        path_tree,
        phi: (content, residual),
        j,
        principal,
        snc,
        children,
    })
}

/// Blows up `I_gamma`, follows each chart with the matching monoidal
/// transform, and recurses until every chart carries a path tree.
pub fn vz_process(g: &WTree, max_depth: usize) -> Result<VzNode> {
    node(g, Chart::root(&g.vars()), g.clone(), 0, max_depth)
}

/// Compares the pullback of `Phi_gamma` to the chart of `a` with
/// `Phi_{gamma_a}`.
pub fn check_advancing_identity(g: &WTree, a: &str) -> Result<bool> {
    let children = g.branch_children();
    if !children.iter().any(|c| c == a) {
        if !g.labels().contains(&a) {
            return Err(Error::UnknownVertex(a.to_string()));
        }
        return Err(Error::NotBranchChild(a.to_string()));
    }
    let ga = g.advance(a)?;
    if ga.is_path_tree() {
        return Err(Error::AdvancesToPathTree(a.to_string()));
    }
    let center: Vec<String> = children.iter().map(|c| z_var(c)).collect();
    let pulled = g.phi().substitute(&chart_step(&center, &z_var(a)));
    Ok(pulled == ga.phi())
}
