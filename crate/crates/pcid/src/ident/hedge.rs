use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::admg::{VertexId, VertexSet};

/// A hedge witness: two nested C-forests F' ⊆ F sharing a root set.
///
/// Each forest is a vertex set plus a child map assigning every non-root
/// exactly one directed child inside the forest; roots select no child.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hedge {
    pub f_vertices: VertexSet,
    pub f_child: BTreeMap<VertexId, VertexId>,
    pub fprime_vertices: VertexSet,
    pub fprime_child: BTreeMap<VertexId, VertexId>,
    pub roots: VertexSet,
    /// When the witness certifies only a surviving sub-query of the original
    /// one (its x and y recorded here), rather than the query as posed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sub_query: Option<(VertexSet, VertexSet)>,
}

impl Hedge {
    /// Layer span of the witness: (tmin, tmax) over V(F).
    pub fn span(&self) -> Option<(u32, u32)> {
        Some((self.f_vertices.tmin()?, self.f_vertices.tmax()?))
    }
}
