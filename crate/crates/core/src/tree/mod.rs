//! Terminally weighted rooted trees, their ideals and local equations, and
//! the pruning / advancing surgeries.
//!
//! Non-root vertex `a` contributes the coordinate `z_a`; each terminal
//! vertex `v` contributes `w_v`. For a terminal `v`, `z_[v,o]` is the product
//! of `z_a` over the vertices `a` on the path from the root (excluded) to `v`.

mod process;

pub use process::{check_advancing_identity, factor_phi, snc_check, vz_process, VzNode};

use std::collections::BTreeSet;
use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::ideal::MonomialIdeal;
use crate::poly::{Monomial, Poly, VarSet};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Vertex {
    pub label: String,
    pub weight: u64,
    pub children: Vec<Vertex>,
}

impl Vertex {
    pub fn leaf(label: &str, weight: u64) -> Self {
        Vertex {
            label: label.to_string(),
            weight,
            children: Vec::new(),
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    fn total_weight(&self) -> u64 {
        self.weight + self.children.iter().map(Vertex::total_weight).sum::<u64>()
    }

    fn labels<'a>(&'a self, out: &mut Vec<&'a str>) {
        out.push(&self.label);
        for c in &self.children {
            c.labels(out);
        }
    }

    fn render(&self, out: &mut String) {
        if self.is_leaf() {
            out.push_str(&self.label);
            if self.weight != 1 {
                out.push_str(&format!(":{}", self.weight));
            }
            return;
        }
        out.push('[');
        out.push_str(&self.label);
        for c in &self.children {
            out.push(' ');
            c.render(out);
        }
        out.push(']');
    }

    fn to_json(&self) -> Value {
        json!({
            "label": self.label,
            "weight": self.weight,
            "children": self.children.iter().map(Vertex::to_json).collect::<Vec<_>>(),
        })
    }
}

/// Rooted tree; children keep their written order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WTree {
    pub root: Vertex,
}

pub fn z_var(label: &str) -> String {
    format!("z_{label}")
}

pub fn w_var(label: &str) -> String {
    format!("w_{label}")
}

impl WTree {
    pub fn new(root: Vertex) -> Result<Self> {
        let t = WTree { root };
        t.validate()?;
        Ok(t)
    }

    fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for l in self.labels() {
            if !seen.insert(l) {
                return Err(Error::DuplicateLabel(l.to_string()));
            }
        }
        fn check(v: &Vertex, is_root: bool) -> Result<()> {
            if !v.is_leaf() && v.weight != 0 {
                return Err(Error::WeightOnInternalVertex(v.label.clone()));
            }
            if v.is_leaf() && !is_root && v.weight == 0 {
                return Err(Error::NonPositiveTerminalWeight(v.label.clone()));
            }
            v.children.iter().try_for_each(|c| check(c, false))
        }
        check(&self.root, true)
    }

    /// Labels in preorder, root first.
    pub fn labels(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.root.labels(&mut out);
        out
    }

    /// Terminal (non-root leaf) vertices in preorder, each with its path
    /// from the root (root excluded, the vertex included).
    pub fn terminals(&self) -> Vec<(String, Vec<String>)> {
        fn go(v: &Vertex, path: &mut Vec<String>, out: &mut Vec<(String, Vec<String>)>) {
            for c in &v.children {
                path.push(c.label.clone());
                if c.is_leaf() {
                    out.push((c.label.clone(), path.clone()));
                } else {
                    go(c, path, out);
                }
                path.pop();
            }
        }
        let mut out = Vec::new();
        go(&self.root, &mut Vec::new(), &mut out);
        out
    }

    pub fn terminal_weights(&self) -> Vec<u64> {
        fn go(v: &Vertex, root: bool, out: &mut Vec<u64>) {
            if v.is_leaf() && !root {
                out.push(v.weight);
            }
            for c in &v.children {
                go(c, false, out);
            }
        }
        let mut out = Vec::new();
        go(&self.root, true, &mut out);
        out
    }

    pub fn total_weight(&self) -> u64 {
        self.root.total_weight()
    }

    /// `z` coordinates of the non-root vertices, then `w` coordinates of the
    /// terminals, both in preorder.
    pub fn vars(&self) -> VarSet {
        let z = self.labels().into_iter().skip(1).map(z_var);
        let w = self.terminals().into_iter().map(|(l, _)| w_var(&l));
        VarSet::new(z.chain(w).collect::<Vec<_>>()).expect("labels are unique")
    }

    /// Last vertex of the trunk when it has children.
    pub fn branch_vertex(&self) -> Option<&Vertex> {
        let mut v = &self.root;
        while v.children.len() == 1 {
            v = &v.children[0];
        }
        (!v.is_leaf()).then_some(v)
    }

    pub fn is_path_tree(&self) -> bool {
        self.branch_vertex().is_none()
    }

    /// Immediate descendants of the branch vertex, in written order.
    pub fn branch_children(&self) -> Vec<String> {
        self.branch_vertex()
            .map(|b| b.children.iter().map(|c| c.label.clone()).collect())
            .unwrap_or_default()
    }

    /// `z_[v,o]` for a terminal with the given path.
    fn path_monomial(path: &[String]) -> Monomial {
        Monomial::from_pairs(path.iter().map(|l| (z_var(l), 1)))
    }

    pub fn i_ideal(&self) -> Option<MonomialIdeal> {
        self.branch_vertex()
            .map(|b| MonomialIdeal::variables(b.children.iter().map(|c| z_var(&c.label))))
    }

    pub fn j_ideal(&self) -> MonomialIdeal {
        MonomialIdeal::new(
            self.terminals()
                .iter()
                .map(|(_, path)| WTree::path_monomial(path)),
        )
    }

    /// `sum over terminals v of z_[v,o] * w_v`.
    pub fn phi(&self) -> Poly {
        self.terminals()
            .iter()
            .fold(Poly::zero(), |acc, (l, path)| {
                let m = &WTree::path_monomial(path) * &Monomial::var(&w_var(l));
                &acc + &Poly::from(m)
            })
    }

    fn find_path(&self, label: &str) -> Option<Vec<usize>> {
        fn go(v: &Vertex, label: &str, path: &mut Vec<usize>) -> bool {
            if v.label == label {
                return true;
            }
            for (i, c) in v.children.iter().enumerate() {
                path.push(i);
                if go(c, label, path) {
                    return true;
                }
                path.pop();
            }
            false
        }
        let mut path = Vec::new();
        go(&self.root, label, &mut path).then_some(path)
    }

    fn vertex_mut(&mut self, path: &[usize]) -> &mut Vertex {
        path.iter().fold(&mut self.root, |v, &i| &mut v.children[i])
    }

    /// Removes every descendant of `label`, adding their weights to it.
    pub fn prune(&self, label: &str) -> Result<WTree> {
        let path = self
            .find_path(label)
            .ok_or_else(|| Error::UnknownVertex(label.to_string()))?;
        let mut out = self.clone();
        let v = out.vertex_mut(&path);
        v.weight = v.total_weight();
        v.children.clear();
        Ok(out)
    }

    /// Prunes positively weighted non-terminal vertices until none remain.
    fn prune_all(mut self) -> WTree {
        fn find(v: &Vertex, path: &mut Vec<usize>) -> bool {
            if v.weight > 0 && !v.is_leaf() {
                return true;
            }
            for (i, c) in v.children.iter().enumerate() {
                path.push(i);
                if find(c, path) {
                    return true;
                }
                path.pop();
            }
            false
        }
        loop {
            let mut path = Vec::new();
            if !find(&self.root, &mut path) {
                return self;
            }
            let v = self.vertex_mut(&path);
            v.weight = v.total_weight();
            v.children.clear();
        }
    }

    /// The siblings of `label` become its children (those written before it
    /// first, then its own children, then those written after), followed by
    /// pruning.
    pub fn advance(&self, label: &str) -> Result<WTree> {
        let path = self
            .find_path(label)
            .ok_or_else(|| Error::UnknownVertex(label.to_string()))?;
        let Some((&idx, parent_path)) = path.split_last() else {
            return Err(Error::RootVertex(label.to_string()));
        };
        let mut out = self.clone();
        let parent = out.vertex_mut(parent_path);
        let siblings = std::mem::take(&mut parent.children);
        let mut before = Vec::new();
        let mut after = Vec::new();
        let mut v = None;
        for (i, s) in siblings.into_iter().enumerate() {
            match i.cmp(&idx) {
                std::cmp::Ordering::Less => before.push(s),
                std::cmp::Ordering::Equal => v = Some(s),
                std::cmp::Ordering::Greater => after.push(s),
            }
        }
        let mut v = v.expect("index from find_path");
        let own = std::mem::take(&mut v.children);
        v.children = before.into_iter().chain(own).chain(after).collect();
        parent.children = vec![v];
        Ok(out.prune_all())
    }

    /// Advancings of the immediate descendants of the branch vertex.
    pub fn monoidal_transforms(&self) -> Vec<(String, WTree)> {
        self.branch_children()
            .into_iter()
            .map(|a| {
                let t = self.advance(&a).expect("branch child exists");
                (a, t)
            })
            .collect()
    }

    pub fn to_json(&self) -> Value {
        self.root.to_json()
    }
}

impl fmt::Display for WTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        if self.root.is_leaf() {
            s.push('[');
            s.push_str(&self.root.label);
            s.push(']');
        } else {
            self.root.render(&mut s);
        }
        f.write_str(&s)
    }
}

struct TreeParser {
    chars: Vec<char>,
    pos: usize,
}

impl TreeParser {
    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            position: self.pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn label(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        while self
            .chars
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_alphanumeric() || *c == '_' || *c == '\'')
        {
            self.pos += 1;
        }
        if start == self.pos {
            return self.error("expected vertex label");
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    /// Optional `:weight` directly after a label.
    fn weight(&mut self) -> Result<Option<u64>> {
        if self.chars.get(self.pos) != Some(&':') {
            return Ok(None);
        }
        self.pos += 1;
        let start = self.pos;
        if self.chars.get(self.pos) == Some(&'-') {
            self.pos += 1;
        }
        while self.chars.get(self.pos).is_some_and(char::is_ascii_digit) {
            self.pos += 1;
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        match text.parse::<i64>() {
            Ok(w) if w >= 0 => Ok(Some(w as u64)),
            Ok(_) => Ok(Some(0)),
            Err(_) => {
                self.pos = start;
                self.error("expected weight")
            }
        }
    }

    fn vertex(&mut self) -> Result<(Vertex, Option<u64>)> {
        match self.peek() {
            Some('[') => {
                self.pos += 1;
                let label = self.label()?;
                let weight = self.weight()?;
                let mut children = Vec::new();
                loop {
                    match self.peek() {
                        Some(']') => {
                            self.pos += 1;
                            break;
                        }
                        None => return self.error("unclosed `[`"),
                        _ => {
                            let (c, cw) = self.vertex()?;
                            children.push(finish_vertex(c, cw, false)?);
                        }
                    }
                }
                Ok((
                    Vertex {
                        label,
                        weight: 0,
                        children,
                    },
                    weight,
                ))
            }
            Some(_) => {
                let label = self.label()?;
                let weight = self.weight()?;
                Ok((Vertex::leaf(&label, 0), weight))
            }
            None => self.error("expected tree"),
        }
    }
}

/// Applies the written weight: leaves default to 1, internal vertices
/// must not carry one.
fn finish_vertex(mut v: Vertex, written: Option<u64>, is_root: bool) -> Result<Vertex> {
    if v.is_leaf() {
        v.weight = match written {
            Some(0) if !is_root => return Err(Error::NonPositiveTerminalWeight(v.label)),
            Some(w) => w,
            None if is_root => 0,
            None => 1,
        };
    } else if written.is_some() {
        return Err(Error::WeightOnInternalVertex(v.label));
    }
    Ok(v)
}

/// Parses `[label children...]`; a child is a bare label (a leaf) or a
/// bracketed subtree, and leaves may carry `:weight` (default 1).
pub fn parse_tree(text: &str) -> Result<WTree> {
    let mut p = TreeParser {
        chars: text.chars().collect(),
        pos: 0,
    };
    if p.peek() != Some('[') {
        return p.error("expected `[`");
    }
    let (root, w) = p.vertex()?;
    if let Some(c) = p.peek() {
        return p.error(format!("unexpected `{c}`"));
    }
    if root.is_leaf() {
        return Err(Error::Syntax {
            position: 0,
            message: "tree needs at least one non-root vertex".into(),
        });
    }
    WTree::new(finish_vertex(root, w, true)?)
}
