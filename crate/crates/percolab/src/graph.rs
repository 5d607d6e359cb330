//! JSON dump of a lattice graph for golden tests.

use percolab_core::LatticeGraph;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphDump {
    pub model: String,
    pub vertices: Vec<[i32; 3]>,
    pub edges: Vec<[u32; 2]>,
    /// Label of carrier element `i`: edges for bond models, sites
    /// otherwise, in index order.
    pub carrier: Vec<String>,
    /// Role names per vertex, omitted for vertices without roles.
    pub roles: Vec<VertexRoles>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexRoles {
    pub vertex: usize,
    pub roles: Vec<String>,
}

impl GraphDump {
    pub fn of(g: &LatticeGraph) -> Self {
        GraphDump {
            model: g.model().name().to_string(),
            vertices: g.all_coords().to_vec(),
            edges: g.edges().to_vec(),
            carrier: (0..g.carrier_len()).filter_map(|i| g.carrier_label(i)).collect(),
            roles: g
                .all_roles()
                .iter()
                .enumerate()
                .filter(|(_, r)| r.bits() != 0)
                .map(|(v, r)| VertexRoles { vertex: v, roles: r.names().map(str::to_string).collect() })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use percolab_core::lattice::BoxSpec;
    use percolab_core::Model;

    #[test]
    fn unit_box_dump() {
        let g = LatticeGraph::build_box(Model::BondZ2, BoxSpec::new(1, 1)).unwrap();
        let d = GraphDump::of(&g);
        assert_eq!(d.model, "bond-z2");
        assert_eq!(d.vertices.len(), 9);
        assert_eq!(d.edges.len(), 12);
        assert_eq!(d.carrier.len(), 12);
        assert_eq!(d.carrier[0], "e(0,0,0)+x");
        assert_eq!(d.vertices[0], [0, 0, 0]);
        assert!(d.roles.iter().any(|r| r.vertex == 0 && r.roles == ["left", "bottom"]));
        let back: GraphDump = serde_json::from_str(&serde_json::to_string(&d).unwrap()).unwrap();
        assert_eq!(back, d);
    }
}
