use std::fmt;

use serde::Serialize;

use crate::admg::{SegmentGraph, VertexId, VertexSet};
use crate::ident::Hedge;

/// Which of the two nested forests a violation refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Forest {
    F,
    Fprime,
}

impl fmt::Display for Forest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Forest::F => write!(f, "F"),
            Forest::Fprime => write!(f, "F'"),
        }
    }
}

/// A single failed hedge condition. The validator reports all of them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Violation {
    VertexOutsideGraph(VertexId),
    FprimeNotSubsetOfF,
    XNotInDifference(VertexId),
    RootsOutsideForest(Forest, VertexId),
    NotBidirectedConnected(Forest),
    MissingChild(Forest, VertexId),
    RootHasChild(Forest, VertexId),
    ChildOutsideForest(Forest, VertexId, VertexId),
    NotAnEdge(Forest, VertexId, VertexId),
    RootNotAncestral(VertexId),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            VertexOutsideGraph(v) => write!(f, "hedge vertex {v} lies outside the graph"),
            FprimeNotSubsetOfF => write!(f, "V(F') is not a subset of V(F)"),
            XNotInDifference(v) => {
                write!(f, "treatment vertex {v} is not in V(F) \\ V(F')")
            }
            RootsOutsideForest(w, v) => write!(f, "root {v} is not a vertex of {w}"),
            NotBidirectedConnected(w) => {
                write!(f, "{w} is not connected by its own bidirected edges")
            }
            MissingChild(w, v) => write!(f, "non-root {v} of {w} has no assigned child"),
            RootHasChild(w, v) => write!(f, "root {v} has an assigned child in {w}"),
            ChildOutsideForest(w, u, v) => {
                write!(f, "child {v} of {u} lies outside {w}")
            }
            NotAnEdge(w, u, v) => {
                write!(f, "assigned child edge {u} -> {v} of {w} is not a graph edge")
            }
            RootNotAncestral(v) => {
                write!(f, "root {v} is not an ancestor of y in the x-mutilated graph")
            }
        }
    }
}

/// Checks every hedge condition for the query `(x, y)` in `g` and returns
/// all failures; an empty list means the hedge is valid.
pub fn validate_hedge(
    g: &SegmentGraph,
    x: &VertexSet,
    y: &VertexSet,
    h: &Hedge,
) -> Vec<Violation> {
    let mut out = Vec::new();

    for &v in h.f_vertices.iter() {
        if !g.contains(&v) {
            out.push(Violation::VertexOutsideGraph(v));
        }
    }
    if !out.is_empty() {
        // everything downstream assumes membership
        return out;
    }

    if !h.fprime_vertices.is_subset(&h.f_vertices) {
        out.push(Violation::FprimeNotSubsetOfF);
    }

    let diff = h.f_vertices.difference(&h.fprime_vertices);
    for &v in x.iter() {
        if !diff.contains(&v) {
            out.push(Violation::XNotInDifference(v));
        }
    }

    check_forest(g, &h.f_vertices, &h.f_child, &h.roots, Forest::F, &mut out);
    check_forest(
        g,
        &h.fprime_vertices,
        &h.fprime_child,
        &h.roots,
        Forest::Fprime,
        &mut out,
    );

    match ancestral_roots(g, x, y, &h.roots) {
        Ok(bad) => out.extend(bad.into_iter().map(Violation::RootNotAncestral)),
        Err(_) => {
            // x or y mentions vertices outside g; every root check is moot
            out.extend(h.roots.iter().map(|&r| Violation::RootNotAncestral(r)));
        }
    }

    out
}

fn check_forest(
    g: &SegmentGraph,
    vertices: &VertexSet,
    child: &std::collections::BTreeMap<VertexId, VertexId>,
    roots: &VertexSet,
    which: Forest,
    out: &mut Vec<Violation>,
) {
    for &r in roots.iter() {
        if !vertices.contains(&r) {
            out.push(Violation::RootsOutsideForest(which, r));
        }
        if child.contains_key(&r) {
            out.push(Violation::RootHasChild(which, r));
        }
    }
    for &v in vertices.iter() {
        if !roots.contains(&v) {
            match child.get(&v) {
                None => out.push(Violation::MissingChild(which, v)),
                Some(&c) => {
                    if !vertices.contains(&c) {
                        out.push(Violation::ChildOutsideForest(which, v, c));
                    } else if !g.has_directed_edge(&v, &c) {
                        out.push(Violation::NotAnEdge(which, v, c));
                    }
                }
            }
        }
    }
    // a forest on a DAG terminates in its childless vertices, so the child
    // map checks above suffice; connectivity is the remaining condition
    if !bidirected_connected(g, vertices) {
        out.push(Violation::NotBidirectedConnected(which));
    }
}

fn bidirected_connected(g: &SegmentGraph, s: &VertexSet) -> bool {
    let Some(&start) = s.iter().next() else {
        return false; // an empty forest has no root set
    };
    let mut seen = VertexSet::singleton(start);
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for &w in g.spouses_of(&v) {
            if s.contains(&w) && seen.insert(w) {
                stack.push(w);
            }
        }
    }
    seen.len() == s.len()
}

/// Roots of `roots` that fail R ⊆ An(y, G_x̄).
fn ancestral_roots(
    g: &SegmentGraph,
    x: &VertexSet,
    y: &VertexSet,
    roots: &VertexSet,
) -> crate::error::Result<Vec<VertexId>> {
    let an = g.mutilate_incoming(x)?.ancestors(y)?;
    Ok(roots.iter().copied().filter(|r| !an.contains(r)).collect())
}
