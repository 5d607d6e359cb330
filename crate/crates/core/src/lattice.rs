//! Finite lattice geometries.
//!
//! Indexing is row-major throughout: vertices are listed with `x` varying
//! fastest, then `y`, then `z`. Edges are listed by scanning the vertices in
//! that order and emitting, for each vertex, its edges towards the model's
//! positive offsets (`+x`, `+y`, then `+z`; the matching lattice adds the
//! diagonals `(+1,+1)` and `(-1,+1)`) whenever the neighbour lies in the
//! region. The percolation carrier is the edge list for bond models and the
//! vertex list for site models, so carrier element `i` is edge `i` or
//! vertex `i` respectively.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::config::GroundSet;
use crate::error::{Error, Result};

/// Largest vertex count a builder will produce.
pub const MAX_VERTICES: usize = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Model {
    BondZ2,
    SiteZ2,
    /// Site percolation on the square lattice with both diagonals of every
    /// face added.
    SiteZ2Matching,
    BondZ3,
    SiteZ3,
}

const Z2_OFFSETS: [[i32; 3]; 2] = [[1, 0, 0], [0, 1, 0]];
const MATCHING_OFFSETS: [[i32; 3]; 4] = [[1, 0, 0], [0, 1, 0], [1, 1, 0], [-1, 1, 0]];
const Z3_OFFSETS: [[i32; 3]; 3] = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];

impl Model {
    pub const ALL: [Model; 5] = [Model::BondZ2, Model::SiteZ2, Model::SiteZ2Matching, Model::BondZ3, Model::SiteZ3];

    pub fn dims(self) -> usize {
        match self {
            Model::BondZ2 | Model::SiteZ2 | Model::SiteZ2Matching => 2,
            Model::BondZ3 | Model::SiteZ3 => 3,
        }
    }

    pub fn is_bond(self) -> bool {
        matches!(self, Model::BondZ2 | Model::BondZ3)
    }

    pub fn offsets(self) -> &'static [[i32; 3]] {
        match self {
            Model::BondZ2 | Model::SiteZ2 => &Z2_OFFSETS,
            Model::SiteZ2Matching => &MATCHING_OFFSETS,
            Model::BondZ3 | Model::SiteZ3 => &Z3_OFFSETS,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Model::BondZ2 => "bond-z2",
            Model::SiteZ2 => "site-z2",
            Model::SiteZ2Matching => "site-z2-matching",
            Model::BondZ3 => "bond-z3",
            Model::SiteZ3 => "site-z3",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Model::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| {
            Error::domain(format!("unknown model `{s}` (expected one of bond-z2, site-z2, site-z2-matching, bond-z3, site-z3)"))
        })
    }
}

/// Boundary and marker tags of a vertex.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Roles(u16);

impl Roles {
    pub const NONE: Roles = Roles(0);
    pub const LEFT: Roles = Roles(1 << 0);
    pub const RIGHT: Roles = Roles(1 << 1);
    pub const BOTTOM: Roles = Roles(1 << 2);
    pub const TOP: Roles = Roles(1 << 3);
    pub const BACK: Roles = Roles(1 << 4);
    pub const FRONT: Roles = Roles(1 << 5);
    pub const INNER: Roles = Roles(1 << 6);
    pub const OUTER: Roles = Roles(1 << 7);
    pub const ORIGIN: Roles = Roles(1 << 8);

    const NAMES: [(Roles, &'static str); 9] = [
        (Roles::LEFT, "left"),
        (Roles::RIGHT, "right"),
        (Roles::BOTTOM, "bottom"),
        (Roles::TOP, "top"),
        (Roles::BACK, "back"),
        (Roles::FRONT, "front"),
        (Roles::INNER, "inner"),
        (Roles::OUTER, "outer"),
        (Roles::ORIGIN, "origin"),
    ];

    #[inline]
    pub fn contains(self, other: Roles) -> bool {
        self.0 & other.0 == other.0
    }

    #[inline]
    pub fn intersects(self, other: Roles) -> bool {
        self.0 & other.0 != 0
    }

    #[inline]
    pub fn bits(self) -> u16 {
        self.0
    }

    pub fn names(self) -> impl Iterator<Item = &'static str> {
        Self::NAMES.into_iter().filter(move |(r, _)| self.contains(*r)).map(|(_, n)| n)
    }
}

impl core::ops::BitOr for Roles {
    type Output = Roles;
    fn bitor(self, rhs: Roles) -> Roles {
        Roles(self.0 | rhs.0)
    }
}

impl core::ops::BitOrAssign for Roles {
    fn bitor_assign(&mut self, rhs: Roles) {
        self.0 |= rhs.0;
    }
}

/// `B(m, n) = [0, 2m] × [0, 2n]`, optionally extruded to `[0, depth]` in `z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoxSpec {
    pub m: u32,
    pub n: u32,
    pub depth: Option<u32>,
}

impl BoxSpec {
    pub fn new(m: u32, n: u32) -> Self {
        BoxSpec { m, n, depth: None }
    }
}

/// `[-3n, 3n]² \ (-n, n)²`: vertices with max-norm in `[n, 3n]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AnnulusSpec {
    pub n: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    /// `[0, w] × [0, h] (× [0, d])`.
    Rect {
        extent: [u32; 3],
    },
    /// `[-r, r]^d` with the origin marked.
    Centered {
        radius: u32,
    },
    Annulus {
        n: u32,
    },
}

/// A carrier element described geometrically.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum CarrierElement {
    Site {
        at: [i32; 3],
    },
    /// Edge from `at` to `at + offsets[axis]`.
    Edge {
        at: [i32; 3],
        axis: u8,
    },
}

const KEY_BIAS: i64 = 1 << 19;

pub(crate) fn pack_key(at: [i32; 3], kind: u8) -> u64 {
    let f = |c: i32| (i64::from(c) + KEY_BIAS) as u64 & 0xf_ffff;
    (f(at[0]) | f(at[1]) << 20 | f(at[2]) << 40) << 3 | u64::from(kind)
}

#[derive(Clone, Debug)]
pub struct LatticeGraph {
    model: Model,
    shape: Shape,
    coords: Vec<[i32; 3]>,
    roles: Vec<Roles>,
    edges: Vec<[u32; 2]>,
    edge_axis: Vec<u8>,
    adj_start: Vec<u32>,
    adj: Vec<(u32, u32)>,
    carrier_keys: Vec<u64>,
    lookup: BTreeMap<[i32; 3], u32>,
    origin: Option<u32>,
}

impl LatticeGraph {
    fn build(
        model: Model,
        shape: Shape,
        lo: [i32; 3],
        hi: [i32; 3],
        member: impl Fn([i32; 3]) -> bool,
        role_of: impl Fn([i32; 3]) -> Roles,
    ) -> Result<Self> {
        let span = |i: usize| (i64::from(hi[i]) - i64::from(lo[i]) + 1).max(0) as u128;
        let requested = span(0) * span(1) * span(2);
        if requested > MAX_VERTICES as u128 {
            return Err(Error::SizeLimit { requested: requested.min(usize::MAX as u128) as usize, limit: MAX_VERTICES });
        }
        if lo.iter().chain(hi.iter()).any(|c| i64::from(c.abs()) >= KEY_BIAS) {
            return Err(Error::domain("lattice coordinates exceed the supported range"));
        }

        let mut coords = Vec::new();
        let mut roles = Vec::new();
        let mut lookup = BTreeMap::new();
        let mut origin = None;
        for z in lo[2]..=hi[2] {
            for y in lo[1]..=hi[1] {
                for x in lo[0]..=hi[0] {
                    let at = [x, y, z];
                    if !member(at) {
                        continue;
                    }
                    let r = role_of(at);
                    if r.contains(Roles::ORIGIN) {
                        origin = Some(coords.len() as u32);
                    }
                    lookup.insert(at, coords.len() as u32);
                    coords.push(at);
                    roles.push(r);
                }
            }
        }

        let offsets = model.offsets();
        let mut edges = Vec::new();
        let mut edge_axis = Vec::new();
        for (u, at) in coords.iter().enumerate() {
            for (axis, off) in offsets.iter().enumerate() {
                let nb = [at[0] + off[0], at[1] + off[1], at[2] + off[2]];
                if let Some(&v) = lookup.get(&nb) {
                    edges.push([u as u32, v]);
                    edge_axis.push(axis as u8);
                }
            }
        }

        let mut degree = alloc::vec![0u32; coords.len() + 1];
        for e in &edges {
            degree[e[0] as usize + 1] += 1;
            degree[e[1] as usize + 1] += 1;
        }
        for i in 1..degree.len() {
            degree[i] += degree[i - 1];
        }
        let adj_start = degree;
        let mut fill = adj_start.clone();
        let mut adj = alloc::vec![(0u32, 0u32); edges.len() * 2];
        for (id, e) in edges.iter().enumerate() {
            let [a, b] = *e;
            adj[fill[a as usize] as usize] = (b, id as u32);
            fill[a as usize] += 1;
            adj[fill[b as usize] as usize] = (a, id as u32);
            fill[b as usize] += 1;
        }

        let carrier_keys = if model.is_bond() {
            edges.iter().zip(&edge_axis).map(|(e, &ax)| pack_key(coords[e[0] as usize], ax + 1)).collect()
        } else {
            coords.iter().map(|&at| pack_key(at, 0)).collect()
        };

        Ok(LatticeGraph { model, shape, coords, roles, edges, edge_axis, adj_start, adj, carrier_keys, lookup, origin })
    }

    /// `[0, w] × [0, h]` for planar models, `[0, w] × [0, h] × [0, d]` for
    /// three-dimensional ones. Faces carry `LEFT/RIGHT` (x), `BOTTOM/TOP`
    /// (y) and `BACK/FRONT` (z).
    pub fn rect(model: Model, extent: [u32; 3]) -> Result<Self> {
        let dims = model.dims();
        if extent[..dims].contains(&0) {
            return Err(Error::domain("box extents must be positive"));
        }
        let ext = [extent[0] as i32, extent[1] as i32, if dims == 3 { extent[2] as i32 } else { 0 }];
        let role_of = move |at: [i32; 3]| {
            let mut r = Roles::NONE;
            let faces = [(Roles::LEFT, Roles::RIGHT), (Roles::BOTTOM, Roles::TOP), (Roles::BACK, Roles::FRONT)];
            for (i, (low, high)) in faces.iter().enumerate().take(dims) {
                if at[i] == 0 {
                    r |= *low;
                }
                if at[i] == ext[i] {
                    r |= *high;
                }
            }
            r
        };
        let shape = Shape::Rect { extent: [extent[0], extent[1], if dims == 3 { extent[2] } else { 0 }] };
        Self::build(model, shape, [0; 3], ext, |_| true, role_of)
    }

    /// The box `B(m, n)` of a planar model, or its extrusion for 3D models.
    pub fn build_box(model: Model, spec: BoxSpec) -> Result<Self> {
        if spec.m == 0 || spec.n == 0 {
            return Err(Error::domain("B(m, n) needs m, n >= 1"));
        }
        let depth = match (model.dims(), spec.depth) {
            (2, _) => 0,
            (_, Some(d)) if d > 0 => d,
            _ => return Err(Error::domain("three-dimensional boxes need a positive depth")),
        };
        Self::rect(model, [2 * spec.m, 2 * spec.n, depth])
    }

    /// `[0, side]^3` for a three-dimensional model.
    pub fn cube(model: Model, side: u32) -> Result<Self> {
        if model.dims() != 3 {
            return Err(Error::domain("cube needs a three-dimensional model"));
        }
        Self::rect(model, [side, side, side])
    }

    /// `[-r, r]^d`. The origin carries `ORIGIN`; vertices at max-norm `r`
    /// carry `OUTER` plus their face roles.
    pub fn centered(model: Model, radius: u32) -> Result<Self> {
        if radius == 0 {
            return Err(Error::domain("box radius must be at least 1"));
        }
        let dims = model.dims();
        let r = radius as i32;
        let hi = [r, r, if dims == 3 { r } else { 0 }];
        let lo = [-r, -r, if dims == 3 { -r } else { 0 }];
        let role_of = move |at: [i32; 3]| {
            let mut roles = Roles::NONE;
            let faces = [(Roles::LEFT, Roles::RIGHT), (Roles::BOTTOM, Roles::TOP), (Roles::BACK, Roles::FRONT)];
            for (i, (low, high)) in faces.iter().enumerate().take(dims) {
                if at[i] == -r {
                    roles |= *low | Roles::OUTER;
                }
                if at[i] == r {
                    roles |= *high | Roles::OUTER;
                }
            }
            if at == [0, 0, 0] {
                roles |= Roles::ORIGIN;
            }
            roles
        };
        Self::build(model, Shape::Centered { radius }, lo, hi, |_| true, role_of)
    }

    /// The annulus `[-3n, 3n]² \ (-n, n)²` of a planar model. Vertices at
    /// max-norm `n` are `INNER`, at `3n` are `OUTER`.
    pub fn build_annulus(spec: AnnulusSpec, model: Model) -> Result<Self> {
        if spec.n == 0 {
            return Err(Error::domain("annulus needs n >= 1"));
        }
        if model.dims() != 2 {
            return Err(Error::domain("annulus needs a planar model"));
        }
        let n = spec.n as i32;
        let norm = |at: [i32; 3]| at[0].abs().max(at[1].abs());
        let member = move |at: [i32; 3]| norm(at) >= n;
        let role_of = move |at: [i32; 3]| {
            let d = norm(at);
            if d == n {
                Roles::INNER
            } else if d == 3 * n {
                Roles::OUTER
            } else {
                Roles::NONE
            }
        };
        Self::build(model, Shape::Annulus { n: spec.n }, [-3 * n, -3 * n, 0], [3 * n, 3 * n, 0], member, role_of)
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn vertex_count(&self) -> usize {
        self.coords.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Number of percolation carrier elements (edges or sites).
    pub fn carrier_len(&self) -> usize {
        if self.model.is_bond() {
            self.edges.len()
        } else {
            self.coords.len()
        }
    }

    pub fn coords(&self, v: usize) -> [i32; 3] {
        self.coords[v]
    }

    pub fn all_coords(&self) -> &[[i32; 3]] {
        &self.coords
    }

    pub fn roles(&self, v: usize) -> Roles {
        self.roles[v]
    }

    pub fn all_roles(&self) -> &[Roles] {
        &self.roles
    }

    pub fn edges(&self) -> &[[u32; 2]] {
        &self.edges
    }

    pub fn edge_axis(&self, e: usize) -> u8 {
        self.edge_axis[e]
    }

    /// `(neighbour, edge id)` pairs of `v`.
    #[inline]
    pub fn neighbors(&self, v: usize) -> &[(u32, u32)] {
        &self.adj[self.adj_start[v] as usize..self.adj_start[v + 1] as usize]
    }

    pub fn degree(&self, v: usize) -> usize {
        (self.adj_start[v + 1] - self.adj_start[v]) as usize
    }

    pub fn vertex_at(&self, at: [i32; 3]) -> Option<usize> {
        self.lookup.get(&at).map(|&v| v as usize)
    }

    pub fn origin(&self) -> Option<usize> {
        self.origin.map(|o| o as usize)
    }

    pub fn has_role(&self, role: Roles) -> bool {
        self.roles.iter().any(|r| r.contains(role))
    }

    pub fn vertices_with(&self, role: Roles) -> impl Iterator<Item = usize> + '_ {
        self.roles.iter().enumerate().filter(move |(_, r)| r.contains(role)).map(|(i, _)| i)
    }

    /// Geometric keys of the carrier elements. They depend only on position
    /// (and orientation), so nested regions draw identical uniforms for the
    /// elements they share.
    pub fn carrier_keys(&self) -> &[u64] {
        &self.carrier_keys
    }

    pub fn carrier_element(&self, i: usize) -> Option<CarrierElement> {
        if self.model.is_bond() {
            let e = self.edges.get(i)?;
            Some(CarrierElement::Edge { at: self.coords[e[0] as usize], axis: self.edge_axis[i] })
        } else {
            self.coords.get(i).map(|&at| CarrierElement::Site { at })
        }
    }

    pub fn carrier_index(&self, element: &CarrierElement) -> Option<usize> {
        match (*element, self.model.is_bond()) {
            (CarrierElement::Site { at }, false) => self.vertex_at(at),
            (CarrierElement::Edge { at, axis }, true) => {
                let off = self.model.offsets().get(axis as usize)?;
                let u = self.vertex_at(at)?;
                let v = self.vertex_at([at[0] + off[0], at[1] + off[1], at[2] + off[2]])?;
                self.edge_between(u, v)
            }
            _ => None,
        }
    }

    pub fn edge_between(&self, u: usize, v: usize) -> Option<usize> {
        self.neighbors(u).iter().find(|(w, _)| *w as usize == v).map(|&(_, id)| id as usize)
    }

    /// Human-readable label of a carrier element, e.g. `e(1,0,0)+x` or `s(2,3,0)`.
    pub fn carrier_label(&self, i: usize) -> Option<String> {
        const AXES: [&str; 4] = ["+x", "+y", "+xy", "-x+y"];
        const AXES3: [&str; 3] = ["+x", "+y", "+z"];
        Some(match self.carrier_element(i)? {
            CarrierElement::Site { at } => format!("s({},{},{})", at[0], at[1], at[2]),
            CarrierElement::Edge { at, axis } => {
                let name = if self.model.dims() == 3 { AXES3[axis as usize] } else { AXES[axis as usize] };
                format!("e({},{},{}){}", at[0], at[1], at[2], name)
            }
        })
    }

    pub fn ground_set(&self) -> Result<GroundSet> {
        GroundSet::with_labels((0..self.carrier_len()).filter_map(|i| self.carrier_label(i)).collect())
    }

    /// The carrier permutation induced by a map of coordinates, if the map
    /// sends the graph onto itself.
    pub fn carrier_permutation(&self, map: impl Fn([i32; 3]) -> [i32; 3]) -> Option<Vec<usize>> {
        let vmap: Vec<usize> = self.coords.iter().map(|&at| self.vertex_at(map(at))).collect::<Option<_>>()?;
        if self.model.is_bond() {
            self.edges.iter().map(|e| self.edge_between(vmap[e[0] as usize], vmap[e[1] as usize])).collect()
        } else {
            let mut image: Vec<usize> = vmap.clone();
            image.sort_unstable();
            image.dedup();
            if image.len() != vmap.len() {
                return None;
            }
            for e in &self.edges {
                self.edge_between(vmap[e[0] as usize], vmap[e[1] as usize])?;
            }
            Some(vmap)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bond_box_counts() {
        let g = LatticeGraph::build_box(Model::BondZ2, BoxSpec::new(1, 1)).unwrap();
        assert_eq!(g.vertex_count(), 9);
        assert_eq!(g.edge_count(), 12);
        assert_eq!(g.carrier_len(), 12);
        for (m, n) in [(1u32, 2u32), (3, 1), (4, 4), (6, 4)] {
            let g = LatticeGraph::build_box(Model::BondZ2, BoxSpec::new(m, n)).unwrap();
            let (m, n) = (m as usize, n as usize);
            assert_eq!(g.vertex_count(), (2 * m + 1) * (2 * n + 1));
            assert_eq!(g.edge_count(), 2 * m * (2 * n + 1) + 2 * n * (2 * m + 1));
        }
    }

    #[test]
    fn matching_box_counts() {
        let g = LatticeGraph::build_box(Model::SiteZ2Matching, BoxSpec::new(1, 1)).unwrap();
        assert_eq!(g.vertex_count(), 9);
        assert_eq!(g.edge_count(), 20);
        assert_eq!(g.carrier_len(), 9);
    }

    #[test]
    fn row_major_indexing() {
        let g = LatticeGraph::build_box(Model::BondZ2, BoxSpec::new(1, 1)).unwrap();
        assert_eq!(g.coords(0), [0, 0, 0]);
        assert_eq!(g.coords(1), [1, 0, 0]);
        assert_eq!(g.coords(3), [0, 1, 0]);
        // first edges: (0,0)+x, (0,0)+y, (1,0)+x, ...
        assert_eq!(g.edges()[0], [0, 1]);
        assert_eq!(g.edges()[1], [0, 3]);
        assert_eq!(g.carrier_label(0).unwrap(), "e(0,0,0)+x");
        assert_eq!(g.carrier_label(1).unwrap(), "e(0,0,0)+y");
    }

    #[test]
    fn annulus_counts() {
        let a1 = LatticeGraph::build_annulus(AnnulusSpec { n: 1 }, Model::BondZ2).unwrap();
        assert_eq!(a1.vertex_count(), 48);
        assert_eq!(a1.vertices_with(Roles::INNER).count(), 8);
        assert_eq!(a1.vertices_with(Roles::OUTER).count(), 24);
        assert_eq!(a1.edge_count(), 80);
        let a2 = LatticeGraph::build_annulus(AnnulusSpec { n: 2 }, Model::BondZ2).unwrap();
        assert_eq!(a2.vertex_count(), 160);
        assert!(LatticeGraph::build_annulus(AnnulusSpec { n: 0 }, Model::BondZ2).is_err());
        assert!(LatticeGraph::build_annulus(AnnulusSpec { n: 1 }, Model::BondZ3).is_err());
    }

    #[test]
    fn interior_degrees() {
        let g = LatticeGraph::build_box(Model::BondZ2, BoxSpec::new(2, 2)).unwrap();
        let c = g.vertex_at([2, 2, 0]).unwrap();
        assert_eq!(g.degree(c), 4);
        assert_eq!(g.degree(g.vertex_at([0, 0, 0]).unwrap()), 2);
        let m = LatticeGraph::build_box(Model::SiteZ2Matching, BoxSpec::new(2, 2)).unwrap();
        assert_eq!(m.degree(m.vertex_at([2, 2, 0]).unwrap()), 8);
        let z = LatticeGraph::cube(Model::BondZ3, 2).unwrap();
        assert_eq!(z.degree(z.vertex_at([1, 1, 1]).unwrap()), 6);
        assert_eq!(z.edge_count(), 54);
    }

    #[test]
    fn box_roles() {
        let g = LatticeGraph::build_box(Model::BondZ2, BoxSpec::new(2, 1)).unwrap();
        assert!(g.vertices_with(Roles::LEFT).all(|v| g.coords(v)[0] == 0));
        assert!(g.vertices_with(Roles::RIGHT).all(|v| g.coords(v)[0] == 4));
        assert_eq!(g.vertices_with(Roles::LEFT).count(), 3);
        assert_eq!(g.vertices_with(Roles::TOP).count(), 5);
        let c = LatticeGraph::centered(Model::BondZ2, 3).unwrap();
        assert_eq!(c.coords(c.origin().unwrap()), [0, 0, 0]);
        assert_eq!(c.vertices_with(Roles::OUTER).count(), 24);
    }

    #[test]
    fn carrier_round_trip() {
        for model in Model::ALL {
            let g = if model.dims() == 3 {
                LatticeGraph::cube(model, 2).unwrap()
            } else {
                LatticeGraph::build_box(model, BoxSpec::new(2, 1)).unwrap()
            };
            for i in 0..g.carrier_len() {
                let el = g.carrier_element(i).unwrap();
                assert_eq!(g.carrier_index(&el), Some(i), "{model} element {i}");
            }
            let mut keys = g.carrier_keys().to_vec();
            keys.sort_unstable();
            keys.dedup();
            assert_eq!(keys.len(), g.carrier_len());
            assert_eq!(g.ground_set().unwrap().size(), g.carrier_len());
        }
    }

    #[test]
    fn nested_boxes_share_keys() {
        let small = LatticeGraph::centered(Model::BondZ2, 2).unwrap();
        let big = LatticeGraph::centered(Model::BondZ2, 4).unwrap();
        for i in 0..small.carrier_len() {
            let j = big.carrier_index(&small.carrier_element(i).unwrap()).unwrap();
            assert_eq!(small.carrier_keys()[i], big.carrier_keys()[j]);
        }
    }

    #[test]
    fn diagonal_reflection_is_an_automorphism() {
        let g = LatticeGraph::build_box(Model::BondZ2, BoxSpec::new(3, 3)).unwrap();
        let perm = g.carrier_permutation(|[x, y, z]| [y, x, z]).unwrap();
        let mut sorted = perm.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..g.carrier_len()).collect::<Vec<_>>());
        // Involution.
        assert!(perm.iter().enumerate().all(|(i, &j)| perm[j] == i));
        let rect = LatticeGraph::build_box(Model::BondZ2, BoxSpec::new(2, 1)).unwrap();
        assert!(rect.carrier_permutation(|[x, y, z]| [y, x, z]).is_none());
    }

    #[test]
    fn model_names_parse() {
        for m in Model::ALL {
            assert_eq!(m.name().parse::<Model>().unwrap(), m);
        }
        assert!("hex".parse::<Model>().is_err());
    }

    #[test]
    fn size_limit() {
        assert!(matches!(LatticeGraph::rect(Model::SiteZ3, [400, 400, 400]), Err(Error::SizeLimit { .. })));
    }
}
