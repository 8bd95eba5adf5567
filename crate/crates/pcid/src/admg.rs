//! Finite acyclic directed mixed graph core: storage, reachability,
//! C-components, mutilation.
//!
//! All types are immutable after construction; every operation is a pure
//! function of its inputs.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A vertex of a segment graph, written `row@time`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct VertexId {
    pub row: u32,
    pub time: u32,
}

impl VertexId {
    pub fn new(row: u32, time: u32) -> Self {
        VertexId { row, time }
    }
}

// Canonical order is (time, row) so that set-valued outputs are
// deterministic and diffable (layer-major).
impl Ord for VertexId {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.time, self.row).cmp(&(other.time, other.row))
    }
}

impl PartialOrd for VertexId {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.row, self.time)
    }
}

impl fmt::Debug for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.row, self.time)
    }
}

impl FromStr for VertexId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (row, time) = s
            .split_once('@')
            .ok_or_else(|| Error::Parse(format!("expected row@time, got `{s}`")))?;
        let row = row
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad row in `{s}`")))?;
        let time = time
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad time in `{s}`")))?;
        Ok(VertexId { row, time })
    }
}

impl Serialize for VertexId {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for VertexId {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A set of vertices with layer bookkeeping.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexSet(pub BTreeSet<VertexId>);

impl VertexSet {
    pub fn new() -> Self {
        VertexSet(BTreeSet::new())
    }

    pub fn singleton(v: VertexId) -> Self {
        VertexSet(BTreeSet::from([v]))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, v: &VertexId) -> bool {
        self.0.contains(v)
    }

    pub fn insert(&mut self, v: VertexId) -> bool {
        self.0.insert(v)
    }

    pub fn iter(&self) -> impl Iterator<Item = &VertexId> {
        self.0.iter()
    }

    /// Smallest layer index; `None` when empty.
    pub fn tmin(&self) -> Option<u32> {
        self.0.iter().map(|v| v.time).min()
    }

    /// Largest layer index; `None` when empty.
    pub fn tmax(&self) -> Option<u32> {
        self.0.iter().map(|v| v.time).max()
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.0.union(&other.0).copied().collect())
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.0.intersection(&other.0).copied().collect())
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.0.difference(&other.0).copied().collect())
    }
}

impl FromIterator<VertexId> for VertexSet {
    fn from_iter<I: IntoIterator<Item = VertexId>>(iter: I) -> Self {
        VertexSet(iter.into_iter().collect())
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}

/// A finite ADMG over vertices `(row, time)` within a time window.
///
/// Directed edges never go backward in time (contemporaneous allowed);
/// the directed part is acyclic. Vertices may be an arbitrary subset of
/// the `width x window` grid (induced subgraphs keep the parent window).
#[derive(Clone, PartialEq, Eq)]
pub struct SegmentGraph {
    width: u32,
    window: (u32, u32),
    vertices: BTreeSet<VertexId>,
    directed: BTreeSet<(VertexId, VertexId)>,
    bidirected: BTreeSet<(VertexId, VertexId)>,
    // adjacency indexes, derived from the edge sets
    children: BTreeMap<VertexId, Vec<VertexId>>,
    parents: BTreeMap<VertexId, Vec<VertexId>>,
    spouses: BTreeMap<VertexId, Vec<VertexId>>,
}

impl SegmentGraph {
    /// Builds a segment over the full `width x [lo, hi]` grid.
    pub fn new(
        width: u32,
        window: (u32, u32),
        directed: impl IntoIterator<Item = (VertexId, VertexId)>,
        bidirected: impl IntoIterator<Item = (VertexId, VertexId)>,
    ) -> Result<Self> {
        let (lo, hi) = window;
        if lo > hi {
            return Err(Error::InvalidWindow(lo, hi));
        }
        let vertices: BTreeSet<VertexId> = (lo..=hi)
            .flat_map(|t| (0..width).map(move |i| VertexId::new(i, t)))
            .collect();
        Self::with_vertices(width, window, vertices, directed, bidirected)
    }

    /// Builds a segment over an explicit vertex set.
    pub fn with_vertices(
        width: u32,
        window: (u32, u32),
        vertices: BTreeSet<VertexId>,
        directed: impl IntoIterator<Item = (VertexId, VertexId)>,
        bidirected: impl IntoIterator<Item = (VertexId, VertexId)>,
    ) -> Result<Self> {
        let (lo, hi) = window;
        if lo > hi {
            return Err(Error::InvalidWindow(lo, hi));
        }
        for v in &vertices {
            if v.row >= width || v.time < lo || v.time > hi {
                return Err(Error::VertexOutsideGraph(*v));
            }
        }
        let mut dir = BTreeSet::new();
        for (u, v) in directed {
            if !vertices.contains(&u) {
                return Err(Error::VertexOutsideGraph(u));
            }
            if !vertices.contains(&v) {
                return Err(Error::VertexOutsideGraph(v));
            }
            if u == v {
                return Err(Error::InvalidSpec(format!("self-loop at {u}")));
            }
            if u.time > v.time {
                return Err(Error::InvalidSpec(format!(
                    "directed edge {u} -> {v} goes backward in time"
                )));
            }
            dir.insert((u, v));
        }
        let mut bi = BTreeSet::new();
        for (u, v) in bidirected {
            if !vertices.contains(&u) {
                return Err(Error::VertexOutsideGraph(u));
            }
            if !vertices.contains(&v) {
                return Err(Error::VertexOutsideGraph(v));
            }
            if u == v {
                return Err(Error::InvalidSpec(format!("bidirected self-loop at {u}")));
            }
            bi.insert(if u < v { (u, v) } else { (v, u) });
        }

        let mut g = SegmentGraph {
            width,
            window,
            vertices,
            directed: dir,
            bidirected: bi,
            children: BTreeMap::new(),
            parents: BTreeMap::new(),
            spouses: BTreeMap::new(),
        };
        g.rebuild_adjacency();
        // acyclicity: cross-layer edges always go forward, so only
        // contemporaneous edges can form a cycle
        g.check_in_layer_acyclic()?;
        Ok(g)
    }

    fn rebuild_adjacency(&mut self) {
        self.children.clear();
        self.parents.clear();
        self.spouses.clear();
        for &(u, v) in &self.directed {
            self.children.entry(u).or_default().push(v);
            self.parents.entry(v).or_default().push(u);
        }
        for &(u, v) in &self.bidirected {
            self.spouses.entry(u).or_default().push(v);
            self.spouses.entry(v).or_default().push(u);
        }
    }

    fn check_in_layer_acyclic(&self) -> Result<()> {
        // Kahn over contemporaneous edges, one layer at a time.
        let mut by_layer: BTreeMap<u32, Vec<(VertexId, VertexId)>> = BTreeMap::new();
        for &(u, v) in &self.directed {
            if u.time == v.time {
                by_layer.entry(u.time).or_default().push((u, v));
            }
        }
        for (t, edges) in by_layer {
            let mut indeg: BTreeMap<VertexId, usize> = BTreeMap::new();
            let mut out: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
            for &(u, v) in &edges {
                *indeg.entry(v).or_insert(0) += 1;
                indeg.entry(u).or_insert(0);
                out.entry(u).or_default().push(v);
            }
            let mut queue: VecDeque<VertexId> = indeg
                .iter()
                .filter(|(_, &d)| d == 0)
                .map(|(&v, _)| v)
                .collect();
            let mut seen = 0;
            while let Some(u) = queue.pop_front() {
                seen += 1;
                for v in out.get(&u).into_iter().flatten() {
                    let d = indeg.get_mut(v).unwrap();
                    *d -= 1;
                    if *d == 0 {
                        queue.push_back(*v);
                    }
                }
            }
            if seen != indeg.len() {
                return Err(Error::InLayerCycle(t));
            }
        }
        Ok(())
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn window(&self) -> (u32, u32) {
        self.window
    }

    pub fn vertices(&self) -> &BTreeSet<VertexId> {
        &self.vertices
    }

    pub fn vertex_set(&self) -> VertexSet {
        VertexSet(self.vertices.clone())
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn contains(&self, v: &VertexId) -> bool {
        self.vertices.contains(v)
    }

    pub fn directed_edges(&self) -> &BTreeSet<(VertexId, VertexId)> {
        &self.directed
    }

    pub fn bidirected_edges(&self) -> &BTreeSet<(VertexId, VertexId)> {
        &self.bidirected
    }

    pub fn has_directed_edge(&self, u: &VertexId, v: &VertexId) -> bool {
        self.directed.contains(&(*u, *v))
    }

    pub fn has_bidirected_edge(&self, u: &VertexId, v: &VertexId) -> bool {
        let key = if u < v { (*u, *v) } else { (*v, *u) };
        self.bidirected.contains(&key)
    }

    pub fn children_of(&self, v: &VertexId) -> &[VertexId] {
        self.children.get(v).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn parents_of(&self, v: &VertexId) -> &[VertexId] {
        self.parents.get(v).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn spouses_of(&self, v: &VertexId) -> &[VertexId] {
        self.spouses.get(v).map(Vec::as_slice).unwrap_or(&[])
    }

    fn require_members(&self, set: &VertexSet) -> Result<()> {
        for v in set.iter() {
            if !self.vertices.contains(v) {
                return Err(Error::VertexOutsideGraph(*v));
            }
        }
        Ok(())
    }

    /// Induced graph on `keep`: exactly the edges with both endpoints in `keep`.
    pub fn induced_subgraph(&self, keep: &VertexSet) -> Result<SegmentGraph> {
        self.require_members(keep)?;
        let directed = self
            .directed
            .iter()
            .filter(|(u, v)| keep.contains(u) && keep.contains(v))
            .copied();
        let bidirected = self
            .bidirected
            .iter()
            .filter(|(u, v)| keep.contains(u) && keep.contains(v))
            .copied();
        SegmentGraph::with_vertices(
            self.width,
            self.window,
            keep.0.clone(),
            directed.collect::<Vec<_>>(),
            bidirected.collect::<Vec<_>>(),
        )
    }

    /// All vertices with a directed path (length >= 0) to some target.
    pub fn ancestors(&self, targets: &VertexSet) -> Result<VertexSet> {
        self.require_members(targets)?;
        let mut seen: BTreeSet<VertexId> = targets.0.clone();
        let mut queue: VecDeque<VertexId> = targets.0.iter().copied().collect();
        while let Some(v) = queue.pop_front() {
            for p in self.parents_of(&v) {
                if seen.insert(*p) {
                    queue.push_back(*p);
                }
            }
        }
        Ok(VertexSet(seen))
    }

    /// Copy of the graph without directed edges whose head is in `x`.
    /// Bidirected edges are untouched.
    pub fn mutilate_incoming(&self, x: &VertexSet) -> Result<SegmentGraph> {
        self.require_members(x)?;
        let mut g = self.clone();
        g.directed.retain(|(_, v)| !x.contains(v));
        g.rebuild_adjacency();
        Ok(g)
    }

    /// Partition of the vertices into maximal bidirected-connected classes,
    /// sorted by smallest member.
    pub fn c_components(&self) -> Vec<VertexSet> {
        let mut seen: BTreeSet<VertexId> = BTreeSet::new();
        let mut comps = Vec::new();
        for &start in &self.vertices {
            if seen.contains(&start) {
                continue;
            }
            let mut comp = BTreeSet::new();
            let mut queue = VecDeque::from([start]);
            seen.insert(start);
            comp.insert(start);
            while let Some(v) = queue.pop_front() {
                for s in self.spouses_of(&v) {
                    if seen.insert(*s) {
                        comp.insert(*s);
                        queue.push_back(*s);
                    }
                }
            }
            comps.push(VertexSet(comp));
        }
        // BTreeSet iteration makes this sorted by smallest VertexId already
        comps
    }

    /// Topological order of the directed part; ties broken by (time, row).
    pub fn topological_order(&self) -> Result<Vec<VertexId>> {
        let mut indeg: BTreeMap<VertexId, usize> = self
            .vertices
            .iter()
            .map(|&v| (v, self.parents_of(&v).len()))
            .collect();
        let mut heap: BTreeSet<VertexId> = indeg
            .iter()
            .filter(|(_, &d)| d == 0)
            .map(|(&v, _)| v)
            .collect();
        let mut order = Vec::with_capacity(self.vertices.len());
        while let Some(&v) = heap.iter().next() {
            heap.remove(&v);
            order.push(v);
            for c in self.children_of(&v) {
                let d = indeg.get_mut(c).unwrap();
                *d -= 1;
                if *d == 0 {
                    heap.insert(*c);
                }
            }
        }
        if order.len() != self.vertices.len() {
            // only contemporaneous edges can cycle; report the smallest
            // unplaced layer
            let t = indeg
                .iter()
                .filter(|(v, _)| !order.contains(v))
                .map(|(v, _)| v.time)
                .min()
                .unwrap_or(0);
            return Err(Error::InLayerCycle(t));
        }
        Ok(order)
    }
}

impl fmt::Debug for SegmentGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SegmentGraph")
            .field("width", &self.width)
            .field("window", &self.window)
            .field("vertices", &self.vertices.len())
            .field("directed", &self.directed.len())
            .field("bidirected", &self.bidirected.len())
            .finish()
    }
}

#[cfg(test)]
pub(crate) fn vs(items: &[(u32, u32)]) -> VertexSet {
    items.iter().map(|&(r, t)| VertexId::new(r, t)).collect()
}
