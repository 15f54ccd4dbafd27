//! Combinatorial triangulations with disk topology, their straight-line
//! drawings, and target polygons.

use std::cmp::Ordering;
use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact;
use crate::geom::{self, Point};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MeshError {
    #[error("face {face} references vertex {vertex} outside 0..{n}")]
    IndexOutOfRange { face: usize, vertex: usize, n: usize },
    #[error("face {0} repeats a vertex")]
    DegenerateFace(usize),
    #[error("faces {0} and {1} are identical")]
    DuplicateFace(usize, usize),
    #[error("edge ({0}, {1}) belongs to three or more faces")]
    NonManifoldEdge(usize, usize),
    #[error("faces cannot be oriented consistently")]
    NonOrientable,
    #[error("boundary edges do not form a single simple cycle")]
    MultipleBoundaryLoops,
    #[error("removing vertices {0} and {1} disconnects the mesh")]
    NotThreeConnected(usize, usize),
    #[error("not a disk: {0}")]
    NotDisk(String),
    #[error("vertex {0} is not referenced by any face")]
    UnreferencedVertex(usize),
    #[error("mesh has no faces")]
    Empty,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("expected {expected} coordinates, got {got}")]
    CoordinateCount { expected: usize, got: usize },
    #[error("coordinate {0} is not finite")]
    NonFinite(usize),
    #[error("polygon needs at least three vertices")]
    TooFewVertices,
    #[error("polygon vertices {0} and {1} coincide")]
    DegenerateBoundary(usize, usize),
    #[error("polygon is not simple")]
    NotSimple,
    #[error("polygon is not counter-clockwise")]
    NotCounterClockwise,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct BuildOptions {
    /// Accept vertices that belong to no face.
    pub allow_unreferenced: bool,
}

/// A validated triangulation of a disk.
///
/// Faces are stored with a consistent orientation, so every interior edge
/// appears once in each direction. The boundary cycle follows the face
/// orientation and starts at its smallest vertex index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triangulation {
    n: usize,
    faces: Vec<[usize; 3]>,
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    boundary: Vec<usize>,
    boundary_pos: Vec<Option<usize>>,
    referenced: Vec<bool>,
}

fn undirected(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn face_edges(f: &[usize; 3]) -> [(usize, usize); 3] {
    [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])]
}

/// Build and validate a triangulation from unordered vertex triples.
pub fn build_triangulation(faces: &[[usize; 3]], n: usize) -> Result<Triangulation, MeshError> {
    Triangulation::build(faces, n, BuildOptions::default())
}

impl Triangulation {
    pub fn build(faces: &[[usize; 3]], n: usize, opts: BuildOptions) -> Result<Self, MeshError> {
        if faces.is_empty() {
            return Err(MeshError::Empty);
        }
        for (fi, f) in faces.iter().enumerate() {
            for &v in f {
                if v >= n {
                    return Err(MeshError::IndexOutOfRange { face: fi, vertex: v, n });
                }
            }
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(MeshError::DegenerateFace(fi));
            }
        }
        let mut seen: HashMap<[usize; 3], usize> = HashMap::new();
        for (fi, f) in faces.iter().enumerate() {
            let mut key = *f;
            key.sort_unstable();
            if let Some(&other) = seen.get(&key) {
                return Err(MeshError::DuplicateFace(other, fi));
            }
            seen.insert(key, fi);
        }

        let mut edge_faces: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (fi, f) in faces.iter().enumerate() {
            for (a, b) in face_edges(f) {
                let e = edge_faces.entry(undirected(a, b)).or_default();
                e.push(fi);
                if e.len() >= 3 {
                    return Err(MeshError::NonManifoldEdge(a.min(b), a.max(b)));
                }
            }
        }

        // Propagate the winding of face 0 across shared edges.
        let mut oriented: Vec<Option<[usize; 3]>> = vec![None; faces.len()];
        oriented[0] = Some(faces[0]);
        let mut queue = VecDeque::from([0usize]);
        let mut reached = 1;
        while let Some(fi) = queue.pop_front() {
            let f = oriented[fi].expect("queued faces are oriented");
            for (a, b) in face_edges(&f) {
                for &g in &edge_faces[&undirected(a, b)] {
                    if g == fi {
                        continue;
                    }
                    // g must traverse the shared edge as b -> a.
                    let raw = faces[g];
                    let has_ba = face_edges(&raw).contains(&(b, a));
                    let want = if has_ba { raw } else { [raw[0], raw[2], raw[1]] };
                    match oriented[g] {
                        None => {
                            oriented[g] = Some(want);
                            reached += 1;
                            queue.push_back(g);
                        }
                        Some(existing) => {
                            if !face_edges(&existing).contains(&(b, a)) {
                                return Err(MeshError::NonOrientable);
                            }
                        }
                    }
                }
            }
        }
        if reached != faces.len() {
            return Err(MeshError::NotDisk("faces form more than one component".into()));
        }
        let faces: Vec<[usize; 3]> = oriented.into_iter().map(|f| f.unwrap()).collect();

        let mut referenced = vec![false; n];
        for f in &faces {
            for &v in f {
                referenced[v] = true;
            }
        }
        if !opts.allow_unreferenced {
            if let Some(v) = referenced.iter().position(|r| !r) {
                return Err(MeshError::UnreferencedVertex(v));
            }
        }

        let mut next_on_boundary: Vec<Option<usize>> = vec![None; n];
        let mut boundary_edges = 0usize;
        for f in &faces {
            for (a, b) in face_edges(f) {
                if edge_faces[&undirected(a, b)].len() == 1 {
                    if next_on_boundary[a].is_some() {
                        return Err(MeshError::MultipleBoundaryLoops);
                    }
                    next_on_boundary[a] = Some(b);
                    boundary_edges += 1;
                }
            }
        }
        if boundary_edges == 0 {
            return Err(MeshError::NotDisk("no boundary edges".into()));
        }
        let start = next_on_boundary.iter().position(|x| x.is_some()).unwrap();
        let mut boundary = vec![start];
        let mut cur = next_on_boundary[start].unwrap();
        while cur != start {
            if boundary.len() > boundary_edges {
                return Err(MeshError::MultipleBoundaryLoops);
            }
            boundary.push(cur);
            cur = next_on_boundary[cur].ok_or(MeshError::MultipleBoundaryLoops)?;
        }
        if boundary.len() != boundary_edges {
            return Err(MeshError::MultipleBoundaryLoops);
        }

        let n_ref = referenced.iter().filter(|r| **r).count() as i64;
        let euler = n_ref - edge_faces.len() as i64 + faces.len() as i64;
        if euler != 1 {
            return Err(MeshError::NotDisk(format!("Euler characteristic {euler} != 1")));
        }

        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(a, b) in edge_faces.keys() {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut neighbors = Vec::with_capacity(2 * edge_faces.len());
        offsets.push(0);
        for row in &mut adj {
            row.sort_unstable();
            neighbors.extend_from_slice(row);
            offsets.push(neighbors.len());
        }
        let mut boundary_pos = vec![None; n];
        for (k, &v) in boundary.iter().enumerate() {
            boundary_pos[v] = Some(k);
        }

        let tri = Triangulation {
            n,
            faces,
            offsets,
            neighbors,
            boundary,
            boundary_pos,
            referenced,
        };
        if let Some((u, v)) = tri.two_separator() {
            return Err(MeshError::NotThreeConnected(u, v));
        }
        Ok(tri)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Position of the directed edge `(i, j)` in the flat edge array, which
    /// is ordered by source vertex and then by target index.
    pub fn edge_slot(&self, i: usize, j: usize) -> Option<usize> {
        self.neighbors(i).binary_search(&j).ok().map(|k| self.offsets[i] + k)
    }

    pub fn slot_range(&self, i: usize) -> std::ops::Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    pub fn directed_edge_count(&self) -> usize {
        self.neighbors.len()
    }

    /// Directed edges in slot order.
    pub fn directed_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| self.neighbors(i).iter().map(move |&j| (i, j)))
    }

    /// Undirected edges `(a, b)` with `a < b`, sorted.
    pub fn undirected_edges(&self) -> Vec<(usize, usize)> {
        self.directed_edges().filter(|(a, b)| a < b).collect()
    }

    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    pub fn boundary_position(&self, v: usize) -> Option<usize> {
        self.boundary_pos[v]
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.boundary_pos[v].is_some()
    }

    pub fn is_referenced(&self, v: usize) -> bool {
        self.referenced[v]
    }

    pub fn interior_vertices(&self) -> Vec<usize> {
        (0..self.n).filter(|&v| self.referenced[v] && !self.is_boundary(v)).collect()
    }

    /// Predecessor and successor of a boundary vertex along the cycle.
    pub fn boundary_neighbors(&self, v: usize) -> Option<(usize, usize)> {
        let k = self.boundary_pos[v]?;
        let m = self.boundary.len();
        Some((self.boundary[(k + m - 1) % m], self.boundary[(k + 1) % m]))
    }

    /// Reverse the winding of every face (and with it the boundary cycle).
    pub fn reversed(&self) -> Triangulation {
        let faces: Vec<[usize; 3]> = self.faces.iter().map(|f| [f[0], f[2], f[1]]).collect();
        let mut boundary = Vec::with_capacity(self.boundary.len());
        boundary.push(self.boundary[0]);
        boundary.extend(self.boundary[1..].iter().rev());
        let mut boundary_pos = vec![None; self.n];
        for (k, &v) in boundary.iter().enumerate() {
            boundary_pos[v] = Some(k);
        }
        Triangulation {
            faces,
            boundary,
            boundary_pos,
            ..self.clone()
        }
    }

    /// Orient faces counter-clockwise with respect to a reference drawing:
    /// the sum of signed face areas equals the boundary polygon's signed
    /// area, and it is made positive.
    pub fn oriented_like(self, coords: &[Point]) -> Triangulation {
        let poly: Vec<Point> = self.boundary.iter().map(|&v| coords[v]).collect();
        if exact::polygon_orientation(&poly) == Ordering::Less {
            self.reversed()
        } else {
            self
        }
    }

    /// Find a vertex pair whose removal disconnects the referenced graph.
    ///
    /// For each removed vertex `u`, the articulation points of `G - u` are
    /// exactly the partners `v` of a 2-cut `{u, v}`.
    pub fn two_separator(&self) -> Option<(usize, usize)> {
        let verts: Vec<usize> = (0..self.n).filter(|&v| self.referenced[v]).collect();
        if verts.len() <= 3 {
            return None;
        }
        for &u in &verts {
            let start = verts.iter().copied().find(|&v| v != u).unwrap();
            if let Some(v) = self.articulation_point_without(u, start, verts.len() - 1) {
                return Some((u.min(v), u.max(v)));
            }
        }
        None
    }

    /// Iterative Tarjan lowpoint search on `G - removed`. Returns a vertex
    /// `v` such that `G - {removed, v}` is disconnected, if one exists.
    fn articulation_point_without(&self, removed: usize, root: usize, expect: usize) -> Option<usize> {
        const UNSEEN: usize = usize::MAX;
        let mut disc = vec![UNSEEN; self.n];
        let mut low = vec![0usize; self.n];
        let mut parent = vec![UNSEEN; self.n];
        let mut time = 0usize;
        let mut root_children = 0usize;
        // (vertex, next neighbor cursor)
        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        disc[root] = 0;
        low[root] = 0;
        time += 1;
        while let Some(top) = stack.len().checked_sub(1) {
            let (v, cursor) = stack[top];
            let nb = self.neighbors(v);
            if cursor < nb.len() {
                stack[top].1 += 1;
                let w = nb[cursor];
                if w == removed {
                    continue;
                }
                if disc[w] == UNSEEN {
                    parent[w] = v;
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    if v == root {
                        root_children += 1;
                    }
                    stack.push((w, 0));
                } else if w != parent[v] {
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if let Some(&(p, _)) = stack.last() {
                    low[p] = low[p].min(low[v]);
                    if p != root && low[v] >= disc[p] {
                        return Some(p);
                    }
                }
            }
        }
        if time < expect {
            // G - removed is already disconnected. Removing a vertex from a
            // component of size >= 2 keeps it disconnected.
            if time >= 2 {
                return Some(root);
            }
            return (0..self.n).find(|&w| w != removed && self.referenced[w] && disc[w] == UNSEEN);
        }
        if root_children > 1 {
            return Some(root);
        }
        None
    }
}

/// A straight-line drawing: one point per vertex of a triangulation.
#[derive(Clone, Debug)]
pub struct PlanarDrawing {
    tri: Arc<Triangulation>,
    coords: Vec<Point>,
}

impl PlanarDrawing {
    /// Points must be finite and one per vertex. Distinctness of points is
    /// not a construction requirement; the certifier reports coincidences.
    pub fn new(tri: Arc<Triangulation>, coords: Vec<Point>) -> Result<Self, GeometryError> {
        if coords.len() != tri.vertex_count() {
            return Err(GeometryError::CoordinateCount {
                expected: tri.vertex_count(),
                got: coords.len(),
            });
        }
        if let Some(i) = coords.iter().position(|p| !geom::is_finite(p)) {
            return Err(GeometryError::NonFinite(i));
        }
        Ok(PlanarDrawing { tri, coords })
    }

    pub fn triangulation(&self) -> &Arc<Triangulation> {
        &self.tri
    }

    pub fn coords(&self) -> &[Point] {
        &self.coords
    }

    pub fn point(&self, v: usize) -> Point {
        self.coords[v]
    }

    pub fn boundary_polygon(&self) -> Vec<Point> {
        self.tri.boundary().iter().map(|&v| self.coords[v]).collect()
    }

    pub fn same_mesh(&self, other: &PlanarDrawing) -> bool {
        Arc::ptr_eq(&self.tri, &other.tri) || *self.tri == *other.tri
    }

    pub fn diameter(&self) -> f64 {
        geom::diameter(&self.boundary_polygon())
    }
}

/// Turn classification of a polygon vertex.
///
/// `Straight` vertices have internal angle exactly pi and count as both
/// convex and reflex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexClass {
    StrictlyConvex,
    Straight,
    StrictlyReflex,
}

impl VertexClass {
    pub fn is_reflex(self) -> bool {
        matches!(self, VertexClass::Straight | VertexClass::StrictlyReflex)
    }

    pub fn is_convex(self) -> bool {
        matches!(self, VertexClass::Straight | VertexClass::StrictlyConvex)
    }
}

/// Classify each vertex of a closed counter-clockwise polygon by the sign
/// of its turn.
pub fn classify_polygon(poly: &[Point]) -> Result<Vec<VertexClass>, GeometryError> {
    let n = poly.len();
    if n < 3 {
        return Err(GeometryError::TooFewVertices);
    }
    for i in 0..n {
        if poly[i] == poly[(i + 1) % n] {
            return Err(GeometryError::DegenerateBoundary(i, (i + 1) % n));
        }
    }
    Ok((0..n)
        .map(|i| {
            let prev = &poly[(i + n - 1) % n];
            let next = &poly[(i + 1) % n];
            match exact::orient(prev, &poly[i], next) {
                Ordering::Greater => VertexClass::StrictlyConvex,
                Ordering::Equal => VertexClass::Straight,
                Ordering::Less => VertexClass::StrictlyReflex,
            }
        })
        .collect())
}

/// Labels of the boundary vertices of a drawing, in boundary-cycle order.
pub fn classify_boundary_vertices(drawing: &PlanarDrawing) -> Result<Vec<(usize, VertexClass)>, GeometryError> {
    let classes = classify_polygon(&drawing.boundary_polygon())?;
    Ok(drawing.triangulation().boundary().iter().copied().zip(classes).collect())
}

/// A simple counter-clockwise polygon.
#[derive(Clone, Debug, PartialEq)]
pub struct TargetPolygon {
    vertices: Vec<Point>,
    classes: Vec<VertexClass>,
}

impl TargetPolygon {
    pub fn new(vertices: Vec<Point>) -> Result<Self, GeometryError> {
        if vertices.len() < 3 {
            return Err(GeometryError::TooFewVertices);
        }
        if let Some(i) = vertices.iter().position(|p| !geom::is_finite(p)) {
            return Err(GeometryError::NonFinite(i));
        }
        let classes = classify_polygon(&vertices)?;
        if !exact::polygon_is_simple(&vertices) {
            return Err(GeometryError::NotSimple);
        }
        if exact::polygon_orientation(&vertices) != Ordering::Greater {
            return Err(GeometryError::NotCounterClockwise);
        }
        Ok(TargetPolygon { vertices, classes })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn classes(&self) -> &[VertexClass] {
        &self.classes
    }

    pub fn reflex_flags(&self) -> Vec<bool> {
        self.classes.iter().map(|c| *c == VertexClass::StrictlyReflex).collect()
    }

    /// No strictly reflex vertex.
    pub fn is_convex(&self) -> bool {
        self.classes.iter().all(|c| c.is_convex())
    }

    pub fn diameter(&self) -> f64 {
        geom::diameter(&self.vertices)
    }
}
