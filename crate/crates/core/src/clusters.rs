//! Open-cluster labelling.

use alloc::vec;
use alloc::vec::Vec;

use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::lattice::{LatticeGraph, Roles};
use crate::unionfind::DisjointSets;

/// Cluster id per vertex plus cluster sizes.
///
/// Ids are assigned in order of first appearance in the row-major vertex
/// order. For site models a vertex whose state differs from the labelled
/// state is not a member; it still receives its own singleton id so every
/// vertex has a label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterLabeling {
    pub labels: Vec<u32>,
    pub sizes: Vec<u32>,
    pub member: Vec<bool>,
}

impl ClusterLabeling {
    pub fn cluster_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn size_of(&self, v: usize) -> usize {
        self.sizes[self.labels[v] as usize] as usize
    }

    /// Sizes of member clusters in decreasing order.
    pub fn member_sizes(&self) -> Vec<u32> {
        let mut seen = vec![false; self.sizes.len()];
        let mut out = Vec::new();
        for (v, &l) in self.labels.iter().enumerate() {
            if self.member[v] && !seen[l as usize] {
                seen[l as usize] = true;
                out.push(self.sizes[l as usize]);
            }
        }
        out.sort_unstable_by(|a, b| b.cmp(a));
        out
    }
}

pub(crate) fn check_carrier(graph: &LatticeGraph, omega: &Configuration) -> Result<()> {
    if omega.len() == graph.carrier_len() {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected: graph.carrier_len(), got: omega.len() })
    }
}

#[inline]
pub(crate) fn is_member(graph: &LatticeGraph, omega: &Configuration, v: usize, state: bool) -> bool {
    graph.model().is_bond() || omega.get(v) == state
}

/// Union-find over vertices joined by carrier elements in `state`.
pub(crate) fn union_state(graph: &LatticeGraph, omega: &Configuration, state: bool) -> DisjointSets {
    let mut ds = DisjointSets::new(graph.vertex_count());
    if graph.model().is_bond() {
        for (i, e) in graph.edges().iter().enumerate() {
            if omega.get(i) == state {
                ds.union(e[0] as usize, e[1] as usize);
            }
        }
    } else {
        for e in graph.edges() {
            let (a, b) = (e[0] as usize, e[1] as usize);
            if omega.get(a) == state && omega.get(b) == state {
                ds.union(a, b);
            }
        }
    }
    ds
}

fn label(graph: &LatticeGraph, omega: &Configuration, state: bool) -> ClusterLabeling {
    let n = graph.vertex_count();
    let mut ds = union_state(graph, omega, state);
    let mut id_of_root = vec![u32::MAX; n];
    let mut labels = Vec::with_capacity(n);
    let mut sizes = Vec::new();
    let mut member = Vec::with_capacity(n);
    for v in 0..n {
        let r = ds.find(v);
        if id_of_root[r] == u32::MAX {
            id_of_root[r] = sizes.len() as u32;
            sizes.push(0);
        }
        let id = id_of_root[r];
        sizes[id as usize] += 1;
        labels.push(id);
        member.push(is_member(graph, omega, v, state));
    }
    ClusterLabeling { labels, sizes, member }
}

/// Open clusters: bond models join the endpoints of open edges, site models
/// join adjacent open sites.
pub fn clusters(graph: &LatticeGraph, omega: &Configuration) -> Result<ClusterLabeling> {
    check_carrier(graph, omega)?;
    Ok(label(graph, omega, true))
}

/// Clusters of closed sites (site models only).
pub fn closed_clusters(graph: &LatticeGraph, omega: &Configuration) -> Result<ClusterLabeling> {
    check_carrier(graph, omega)?;
    if graph.model().is_bond() {
        return Err(Error::domain("closed clusters are defined for site models only"));
    }
    Ok(label(graph, omega, false))
}

/// Whether a cluster of `state` elements joins a `from` vertex to a `to`
/// vertex. For site models both end vertices must be in `state`.
pub fn connects(graph: &LatticeGraph, omega: &Configuration, state: bool, from: Roles, to: Roles) -> bool {
    let mut ds = union_state(graph, omega, state);
    let n = graph.vertex_count();
    let mut marked = vec![false; n];
    for v in 0..n {
        if graph.roles(v).contains(from) && is_member(graph, omega, v, state) {
            let r = ds.find(v);
            marked[r] = true;
        }
    }
    (0..n).any(|v| graph.roles(v).contains(to) && is_member(graph, omega, v, state) && marked[ds.find(v)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{BoxSpec, Model};

    fn b11() -> LatticeGraph {
        LatticeGraph::build_box(Model::BondZ2, BoxSpec::new(1, 1)).unwrap()
    }

    #[test]
    fn all_open_and_all_closed() {
        let g = b11();
        let open = clusters(&g, &Configuration::open(12)).unwrap();
        assert_eq!(open.cluster_count(), 1);
        assert_eq!(open.sizes, vec![9]);
        let closed = clusters(&g, &Configuration::closed(12)).unwrap();
        assert_eq!(closed.cluster_count(), 9);
        assert!(closed.sizes.iter().all(|&s| s == 1));
    }

    #[test]
    fn bottom_row() {
        let g = b11();
        let mut omega = Configuration::closed(12);
        for (i, e) in g.edges().iter().enumerate() {
            if g.coords(e[0] as usize)[1] == 0 && g.coords(e[1] as usize)[1] == 0 {
                omega.set(i, true);
            }
        }
        let c = clusters(&g, &omega).unwrap();
        assert_eq!(c.member_sizes(), vec![3, 1, 1, 1, 1, 1, 1]);
        assert!(connects(&g, &omega, true, Roles::LEFT, Roles::RIGHT));
        assert!(!connects(&g, &omega, true, Roles::BOTTOM, Roles::TOP));
    }

    #[test]
    fn site_membership() {
        let g = LatticeGraph::build_box(Model::SiteZ2, BoxSpec::new(1, 1)).unwrap();
        let omega = Configuration::from_bits(&[true, true, true, false, false, false, false, false, false]);
        let c = clusters(&g, &omega).unwrap();
        assert_eq!(c.member_sizes(), vec![3]);
        let closed = closed_clusters(&g, &omega).unwrap();
        assert_eq!(closed.member_sizes(), vec![6]);
        assert!(closed_clusters(&b11(), &Configuration::open(12)).is_err());
        assert!(clusters(&g, &Configuration::open(12)).is_err());
    }
}
