use std::collections::BTreeMap;

use crate::graph::VertexId;

/// A set of possibly overlapping communities.
///
/// Stored canonically: members ascending, communities ordered by their
/// member lists (so by smallest member first).
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Cover {
    communities: Vec<Vec<VertexId>>,
}

impl Cover {
    pub fn new(communities: impl IntoIterator<Item = Vec<VertexId>>) -> Self {
        let mut communities: Vec<Vec<VertexId>> = communities
            .into_iter()
            .map(|mut c| {
                c.sort_unstable();
                c.dedup();
                c
            })
            .filter(|c| !c.is_empty())
            .collect();
        communities.sort();
        Self { communities }
    }

    pub fn communities(&self) -> &[Vec<VertexId>] {
        &self.communities
    }

    pub fn len(&self) -> usize {
        self.communities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.communities.is_empty()
    }

    /// Vertex → indices of the communities containing it.
    pub fn membership(&self) -> BTreeMap<VertexId, Vec<usize>> {
        let mut out: BTreeMap<VertexId, Vec<usize>> = BTreeMap::new();
        for (c, members) in self.communities.iter().enumerate() {
            for &v in members {
                out.entry(v).or_default().push(c);
            }
        }
        out
    }

    /// Every vertex that belongs to at least one community, ascending.
    pub fn vertices(&self) -> Vec<VertexId> {
        self.membership().into_keys().collect()
    }

    /// Drops exact duplicate communities.
    pub fn dedup(mut self) -> Self {
        self.communities.dedup();
        self
    }
}
