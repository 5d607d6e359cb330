//! Geometric events on lattice graphs: box crossings and annulus circuits.

use alloc::vec;
use alloc::vec::Vec;

use crate::clusters::{check_carrier, connects, is_member, union_state};
use crate::config::Configuration;
use crate::cube::Event;
use crate::error::{Error, Result};
use crate::lattice::{LatticeGraph, Model, Roles, Shape};
use crate::unionfind::DisjointSets;

/// An open path from a `from` vertex to a `to` vertex. With `LEFT`/`RIGHT`
/// on a box `B(m, n)` this is the left–right crossing `LR(m, n)`.
#[derive(Clone, Copy, Debug)]
pub struct Crossing<'g> {
    graph: &'g LatticeGraph,
    from: Roles,
    to: Roles,
}

impl<'g> Crossing<'g> {
    pub fn new(graph: &'g LatticeGraph, from: Roles, to: Roles) -> Result<Self> {
        if !graph.has_role(from) || !graph.has_role(to) {
            return Err(Error::domain("graph lacks the boundary roles of the crossing"));
        }
        Ok(Crossing { graph, from, to })
    }

    pub fn left_right(graph: &'g LatticeGraph) -> Result<Self> {
        Self::new(graph, Roles::LEFT, Roles::RIGHT)
    }

    pub fn graph(&self) -> &'g LatticeGraph {
        self.graph
    }

    /// Per-root flags: bit 0 touches `from`, bit 1 touches `to`.
    fn root_flags(&self, ds: &mut DisjointSets, omega: &Configuration) -> Vec<u8> {
        let g = self.graph;
        let mut flags = vec![0u8; g.vertex_count()];
        for v in 0..g.vertex_count() {
            if !is_member(g, omega, v, true) {
                continue;
            }
            let f = self.role_flags(v);
            if f != 0 {
                let r = ds.find(v);
                flags[r] |= f;
            }
        }
        flags
    }

    #[inline]
    fn role_flags(&self, v: usize) -> u8 {
        let r = self.graph.roles(v);
        u8::from(r.contains(self.from)) | u8::from(r.contains(self.to)) << 1
    }

    /// Pivotal elements when the crossing is absent: closed elements whose
    /// opening merges a `from`-cluster with a `to`-cluster.
    fn pivotal_absent(&self, omega: &Configuration, ds: &mut DisjointSets, flags: &[u8], out: &mut Vec<usize>) {
        let g = self.graph;
        if g.model().is_bond() {
            for (i, e) in g.edges().iter().enumerate() {
                if omega.get(i) {
                    continue;
                }
                let f = flags[ds.find(e[0] as usize)] | flags[ds.find(e[1] as usize)];
                if f == 3 {
                    out.push(i);
                }
            }
        } else {
            for v in 0..g.vertex_count() {
                if omega.get(v) {
                    continue;
                }
                let mut f = self.role_flags(v);
                for &(w, _) in g.neighbors(v) {
                    if omega.get(w as usize) {
                        f |= flags[ds.find(w as usize)];
                    }
                }
                if f == 3 {
                    out.push(v);
                }
            }
        }
    }

    /// Pivotal elements when the crossing is present: open edges that are
    /// bridges between a super-source `S` (joined to every `from` vertex)
    /// and a super-sink `T` (joined to every `to` vertex), or open sites that
    /// are cut vertices between them.
    fn pivotal_present(&self, omega: &Configuration, out: &mut Vec<usize>) {
        let g = self.graph;
        let bond = g.model().is_bond();
        let nv = g.vertex_count();
        let ne = g.edge_count();
        let (s, t) = (nv, nv + 1);
        let sources: Vec<u32> =
            (0..nv).filter(|&v| self.role_flags(v) & 1 != 0 && is_member(g, omega, v, true)).map(|v| v as u32).collect();
        let sinks: Vec<u32> = (0..nv).filter(|&v| self.role_flags(v) & 2 != 0 && is_member(g, omega, v, true)).map(|v| v as u32).collect();

        // Neighbour `pos` of `node` in the auxiliary graph as (node, edge id),
        // or `Skip` for a closed neighbour, or `Done`.
        enum Step {
            Next(usize, usize),
            Skip,
            Done,
        }
        let step = |node: usize, pos: usize| -> Step {
            if node == s {
                return sources.get(pos).map_or(Step::Done, |&v| Step::Next(v as usize, ne + v as usize));
            }
            if node == t {
                return sinks.get(pos).map_or(Step::Done, |&v| Step::Next(v as usize, ne + nv + v as usize));
            }
            let nbrs = g.neighbors(node);
            if pos < nbrs.len() {
                let (w, id) = nbrs[pos];
                let open = if bond { omega.get(id as usize) } else { omega.get(w as usize) };
                return if open { Step::Next(w as usize, id as usize) } else { Step::Skip };
            }
            let f = self.role_flags(node);
            match pos - nbrs.len() {
                0 if f & 1 != 0 => Step::Next(s, ne + node),
                0 => Step::Skip,
                1 if f & 2 != 0 => Step::Next(t, ne + nv + node),
                1 => Step::Skip,
                _ => Step::Done,
            }
        };

        const UNSEEN: u32 = u32::MAX;
        let total = nv + 2;
        let mut disc = vec![UNSEEN; total];
        let mut low = vec![0u32; total];
        let mut end = vec![0u32; total];
        let mut parent_edge = vec![usize::MAX; total];
        // (child, parent) pairs closing a candidate separation.
        let mut candidates: Vec<(usize, usize)> = Vec::new();
        let mut timer = 0u32;
        let mut stack: Vec<(usize, usize)> = vec![(s, 0)];
        disc[s] = timer;
        low[s] = timer;
        timer += 1;
        while let Some(top) = stack.last_mut() {
            let (v, pos) = *top;
            top.1 += 1;
            match step(v, pos) {
                Step::Skip => {}
                Step::Next(w, id) => {
                    if id == parent_edge[v] {
                        continue;
                    }
                    if disc[w] == UNSEEN {
                        disc[w] = timer;
                        low[w] = timer;
                        timer += 1;
                        parent_edge[w] = id;
                        stack.push((w, 0));
                    } else {
                        low[v] = low[v].min(disc[w]);
                    }
                }
                Step::Done => {
                    stack.pop();
                    end[v] = timer;
                    if let Some(&(p, _)) = stack.last() {
                        low[p] = low[p].min(low[v]);
                        let separates = if bond { low[v] > disc[p] } else { low[v] >= disc[p] };
                        if separates {
                            candidates.push((v, p));
                        }
                    }
                }
            }
        }
        if disc[t] == UNSEEN {
            return;
        }
        let dt = disc[t];
        for (child, parent) in candidates {
            if !(disc[child] <= dt && dt < end[child]) {
                continue;
            }
            if bond {
                let id = parent_edge[child];
                if id < ne {
                    out.push(id);
                }
            } else if parent < nv {
                out.push(parent);
            }
        }
        out.sort_unstable();
        out.dedup();
    }
}

impl Event for Crossing<'_> {
    fn size(&self) -> usize {
        self.graph.carrier_len()
    }

    fn occurs(&self, omega: &Configuration) -> bool {
        connects(self.graph, omega, true, self.from, self.to)
    }

    fn pivotal_elements(&self, omega: &Configuration, out: &mut Vec<usize>) {
        out.clear();
        let mut ds = union_state(self.graph, omega, true);
        let flags = self.root_flags(&mut ds, omega);
        if flags.contains(&3) {
            self.pivotal_present(omega, out);
        } else {
            self.pivotal_absent(omega, &mut ds, &flags, out);
        }
    }
}

/// `LR(m, n)`: open left–right crossing of the graph's box.
pub fn lr_crossing(graph: &LatticeGraph, omega: &Configuration) -> Result<bool> {
    check_carrier(graph, omega)?;
    Ok(Crossing::left_right(graph)?.occurs(omega))
}

/// `A_n`: an open circuit in the annulus surrounding the hole.
///
/// Decided by planar duality. The dual nodes are the unit faces of the
/// annulus plus one node for the hole and one for the unbounded face; each
/// primal edge is crossed by the dual edge joining its two faces. An open
/// circuit around the hole exists iff no path of dual edges crossing closed
/// primal edges joins the hole node to the outer node.
#[derive(Clone, Debug)]
pub struct AnnulusCircuit<'g> {
    graph: &'g LatticeGraph,
    faces: usize,
    dual: Vec<[u32; 2]>,
}

impl<'g> AnnulusCircuit<'g> {
    pub fn new(graph: &'g LatticeGraph) -> Result<Self> {
        let n = match (graph.shape(), graph.model()) {
            (Shape::Annulus { n }, Model::BondZ2) => n as i32,
            _ => return Err(Error::domain("annulus circuit needs a bond-z2 annulus graph")),
        };
        let side = 6 * n;
        let faces = (side * side) as usize;
        let hole = faces as u32;
        let outer = hole + 1;
        let face = |fx: i32, fy: i32| -> u32 {
            if fx < -3 * n || fx >= 3 * n || fy < -3 * n || fy >= 3 * n {
                outer
            } else if (-n..n).contains(&fx) && (-n..n).contains(&fy) {
                hole
            } else {
                ((fy + 3 * n) * side + fx + 3 * n) as u32
            }
        };
        let dual = graph
            .edges()
            .iter()
            .map(|e| {
                let a = graph.coords(e[0] as usize);
                let b = graph.coords(e[1] as usize);
                if a[1] == b[1] {
                    let x = a[0].min(b[0]);
                    [face(x, a[1] - 1), face(x, a[1])]
                } else {
                    let y = a[1].min(b[1]);
                    [face(a[0] - 1, y), face(a[0], y)]
                }
            })
            .collect();
        Ok(AnnulusCircuit { graph, faces, dual })
    }
}

impl Event for AnnulusCircuit<'_> {
    fn size(&self) -> usize {
        self.graph.carrier_len()
    }

    fn occurs(&self, omega: &Configuration) -> bool {
        let mut ds = DisjointSets::new(self.faces + 2);
        for (i, d) in self.dual.iter().enumerate() {
            if !omega.get(i) {
                ds.union(d[0] as usize, d[1] as usize);
            }
        }
        !ds.same(self.faces, self.faces + 1)
    }
}

pub fn annulus_cycle(graph: &LatticeGraph, omega: &Configuration) -> Result<bool> {
    check_carrier(graph, omega)?;
    Ok(AnnulusCircuit::new(graph)?.occurs(omega))
}
