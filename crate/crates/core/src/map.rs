//! Bipartite combinatorial maps on oriented surfaces, given by rotation
//! systems: two permutations of the edge set whose cycles are the clockwise
//! edge orders around black and white nodes.
//!
//! With clockwise rotations, faces are the cycles of σ_∞ = (σ_B σ_W)⁻¹
//! (right-action product). A face cycle of length k is a 2k-gon whose
//! boundary walk alternates black→white and white→black edge traversals;
//! [`CombinatorialMap::face_walks`] materializes those walks, which drive
//! the Kasteleyn sign conditions, the homology cocycles and the R-charge
//! face constraints downstream.

use crate::perm::{Perm, PermError};
use crate::quiver::{validate_quiver, Arrow, Quiver, QuiverError, Term};
use crate::snf::smith_normal_form;
use num::{BigInt, Signed};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MapError {
    #[error("map has genus {found}, expected {expected}")]
    Genus { found: i64, expected: i64 },
    #[error("map has {faces} faces but the quiver has {nodes} nodes")]
    FaceMismatch { faces: usize, nodes: usize },
    #[error("map is disconnected")]
    Disconnected,
    #[error("quiver fails preconditions: {0}")]
    Precondition(String),
    #[error("duplicate edge id `{0}`")]
    DuplicateEdge(String),
    #[error("cycle references unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("rotation system invalid: {0}")]
    Rotation(#[from] PermError),
    #[error("homology computation failed: {0}")]
    Homology(String),
    #[error(transparent)]
    Quiver(#[from] QuiverError),
    #[error("json: {0}")]
    Json(String),
}

/// Bipartite map on a closed oriented surface.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinatorialMap {
    pub edges: Vec<String>,
    /// Clockwise edge order around black nodes (cycles = nodes).
    pub sigma_black: Perm,
    /// Clockwise edge order around white nodes.
    pub sigma_white: Perm,
}

/// One step of a face boundary walk: the edge and whether it is traversed
/// black→white.
pub type Dart = (usize, bool);

impl CombinatorialMap {
    pub fn new(
        edges: Vec<String>,
        black_cycles: &[Vec<String>],
        white_cycles: &[Vec<String>],
    ) -> Result<Self, MapError> {
        let mut index = BTreeMap::new();
        for (i, e) in edges.iter().enumerate() {
            if index.insert(e.clone(), i).is_some() {
                return Err(MapError::DuplicateEdge(e.clone()));
            }
        }
        let to_indices = |cycles: &[Vec<String>]| -> Result<Vec<Vec<usize>>, MapError> {
            cycles
                .iter()
                .map(|c| {
                    c.iter()
                        .map(|id| {
                            index
                                .get(id)
                                .copied()
                                .ok_or_else(|| MapError::UnknownEdge(id.clone()))
                        })
                        .collect()
                })
                .collect()
        };
        let sigma_black = Perm::from_cycles(edges.len(), &to_indices(black_cycles)?)?;
        let sigma_white = Perm::from_cycles(edges.len(), &to_indices(white_cycles)?)?;
        Ok(CombinatorialMap {
            edges,
            sigma_black,
            sigma_white,
        })
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e == id)
    }

    /// Clockwise cycles at black nodes, sorted by smallest edge index.
    pub fn black_nodes(&self) -> Vec<Vec<usize>> {
        self.sigma_black.cycles()
    }

    pub fn white_nodes(&self) -> Vec<Vec<usize>> {
        self.sigma_white.cycles()
    }

    pub fn is_connected(&self) -> bool {
        self.edge_count() == 0 || Perm::transitive(&[&self.sigma_black, &self.sigma_white])
    }

    /// σ_∞ = (σ_B σ_W)⁻¹; its cycles are the faces.
    pub fn face_permutation(&self) -> Perm {
        self.sigma_black.then(&self.sigma_white).inverse()
    }

    pub fn face_count(&self) -> usize {
        self.face_permutation().cycle_count()
    }

    /// Full boundary walks, one per face, alternating (e, black→white) and
    /// (e', white→black) steps. Every edge occurs exactly once in each
    /// direction across all walks.
    pub fn face_walks(&self) -> Vec<Vec<Dart>> {
        let sw_inv = self.sigma_white.inverse();
        self.face_permutation()
            .cycles()
            .into_iter()
            .map(|cycle| {
                let mut walk = Vec::with_capacity(2 * cycle.len());
                for &e in &cycle {
                    walk.push((e, true));
                    walk.push((sw_inv.apply(e), false));
                }
                walk
            })
            .collect()
    }

    /// Euler-characteristic genus. Errors on disconnected maps.
    pub fn genus(&self) -> Result<i64, MapError> {
        if !self.is_connected() {
            return Err(MapError::Disconnected);
        }
        let v = (self.sigma_black.cycle_count() + self.sigma_white.cycle_count()) as i64;
        let e = self.edge_count() as i64;
        let f = self.face_count() as i64;
        let chi = v - e + f;
        debug_assert!(chi % 2 == 0, "odd Euler characteristic");
        Ok((2 - chi) / 2)
    }

    fn require_genus_one(&self) -> Result<(), MapError> {
        let g = self.genus()?;
        if g != 1 {
            return Err(MapError::Genus {
                found: g,
                expected: 1,
            });
        }
        Ok(())
    }

    /// For each edge, the black-node and white-node indices (positions in
    /// `black_nodes()` / `white_nodes()`).
    pub fn edge_endpoints(&self) -> Vec<(usize, usize)> {
        let mut black_of = vec![usize::MAX; self.edge_count()];
        for (b, cycle) in self.black_nodes().iter().enumerate() {
            for &e in cycle {
                black_of[e] = b;
            }
        }
        let mut white_of = vec![usize::MAX; self.edge_count()];
        for (w, cycle) in self.white_nodes().iter().enumerate() {
            for &e in cycle {
                white_of[e] = w;
            }
        }
        black_of.into_iter().zip(white_of).collect()
    }

    /// Signed boundary vector of each face over the edge space (orientation
    /// black→white positive).
    pub fn face_boundaries(&self) -> Vec<Vec<i64>> {
        self.face_walks()
            .iter()
            .map(|walk| {
                let mut v = vec![0i64; self.edge_count()];
                for &(e, fwd) in walk {
                    v[e] += if fwd { 1 } else { -1 };
                }
                v
            })
            .collect()
    }

    pub fn from_json(text: &str) -> Result<(Self, MapJsonExtras), MapError> {
        let mj: MapJson = serde_json::from_str(text).map_err(|e| MapError::Json(e.to_string()))?;
        let map = CombinatorialMap::new(mj.edges, &mj.sigma_black, &mj.sigma_white)?;
        let weights = match mj.weights {
            None => None,
            Some(ws) => {
                let mut v = vec![(0i64, 0i64); map.edge_count()];
                for (id, pair) in ws {
                    let i = map
                        .edge_index(&id)
                        .ok_or_else(|| MapError::UnknownEdge(id.clone()))?;
                    v[i] = (pair[0], pair[1]);
                }
                Some(v)
            }
        };
        let signs = match mj.signs {
            None => None,
            Some(ss) => {
                let mut v = vec![1i8; map.edge_count()];
                for (id, s) in ss {
                    let i = map
                        .edge_index(&id)
                        .ok_or_else(|| MapError::UnknownEdge(id.clone()))?;
                    v[i] = s;
                }
                Some(v)
            }
        };
        Ok((map, MapJsonExtras { weights, signs }))
    }

    pub fn to_json(&self) -> String {
        self.to_json_with(None, None)
    }

    pub fn to_json_with(&self, weights: Option<&[(i64, i64)]>, signs: Option<&[i8]>) -> String {
        let name = |e: usize| self.edges[e].clone();
        let mj = MapJson {
            edges: self.edges.clone(),
            sigma_black: self
                .black_nodes()
                .iter()
                .map(|c| c.iter().map(|&e| name(e)).collect())
                .collect(),
            sigma_white: self
                .white_nodes()
                .iter()
                .map(|c| c.iter().map(|&e| name(e)).collect())
                .collect(),
            weights: weights.map(|ws| {
                ws.iter()
                    .enumerate()
                    .map(|(e, &(a, b))| (name(e), [a, b]))
                    .collect()
            }),
            signs: signs.map(|ss| ss.iter().enumerate().map(|(e, &s)| (name(e), s)).collect()),
        };
        serde_json::to_string_pretty(&mj).unwrap()
    }
}

/// Optional pinned data carried by map JSON (used by fixtures that
/// transcribe a published figure, not part of the required schema).
pub struct MapJsonExtras {
    pub weights: Option<Vec<(i64, i64)>>,
    pub signs: Option<Vec<i8>>,
}

#[derive(Serialize, Deserialize)]
struct MapJson {
    edges: Vec<String>,
    sigma_black: Vec<Vec<String>>,
    sigma_white: Vec<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    weights: Option<BTreeMap<String, [i64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    signs: Option<BTreeMap<String, i8>>,
}

// --- Quiver <-> map ------------------------------------------------------

/// Dual bipartite map of a toric quiver: one black node per +term with
/// clockwise edge order equal to the word, one white node per −term with
/// the reversed word, one edge per arrow.
pub fn quiver_to_map(q: &Quiver) -> Result<CombinatorialMap, MapError> {
    let report = validate_quiver(q);
    for name in ["toric", "cycles"] {
        let check = report.check(name).unwrap();
        if !check.passed {
            return Err(MapError::Precondition(format!(
                "{} check failed: {}",
                name, check.detail
            )));
        }
    }
    let edges: Vec<String> = q.arrows.iter().map(|a| a.id.clone()).collect();
    let black: Vec<Vec<String>> = q
        .superpotential
        .iter()
        .filter(|t| t.sign > 0)
        .map(|t| t.word.clone())
        .collect();
    let white: Vec<Vec<String>> = q
        .superpotential
        .iter()
        .filter(|t| t.sign < 0)
        .map(|t| {
            let mut w = t.word.clone();
            w.reverse();
            w
        })
        .collect();
    let m = CombinatorialMap::new(edges, &black, &white)?;
    m.require_genus_one()?;
    let faces = m.face_count();
    if faces != q.nodes.len() {
        return Err(MapError::FaceMismatch {
            faces,
            nodes: q.nodes.len(),
        });
    }
    Ok(m)
}

/// Inverse of [`quiver_to_map`]: faces become nodes; each edge becomes the
/// arrow crossing it, oriented with the black endpoint on the left:
/// from the face whose walk traverses the edge white→black to the face
/// traversing it black→white. This is the orientation for which the
/// words read off the rotation systems compose and the round trip is
/// the identity.
pub fn map_to_quiver(m: &CombinatorialMap) -> Result<Quiver, MapError> {
    m.require_genus_one()?;
    let walks = m.face_walks();
    let nodes: Vec<String> = (1..=walks.len()).map(|i| i.to_string()).collect();
    let mut face_of_dart: BTreeMap<Dart, usize> = BTreeMap::new();
    for (f, walk) in walks.iter().enumerate() {
        for &dart in walk {
            face_of_dart.insert(dart, f);
        }
    }
    let arrows: Vec<Arrow> = (0..m.edge_count())
        .map(|e| Arrow {
            id: m.edges[e].clone(),
            from: nodes[face_of_dart[&(e, false)]].clone(),
            to: nodes[face_of_dart[&(e, true)]].clone(),
        })
        .collect();
    let mut terms = Vec::new();
    for cycle in m.black_nodes() {
        terms.push(Term::new(
            1,
            cycle.iter().map(|&e| m.edges[e].clone()).collect(),
        ));
    }
    for cycle in m.white_nodes() {
        let word: Vec<String> = cycle.iter().rev().map(|&e| m.edges[e].clone()).collect();
        terms.push(Term::new(-1, word));
    }
    Ok(Quiver::new(nodes, arrows, terms)?)
}

// --- Homology weights ----------------------------------------------------

/// Per-edge signed intersection numbers with two chosen homology paths of
/// the torus. A cocycle (face sums vanish) whose two components descend to
/// a basis of first homology.
#[derive(Debug, Clone)]
pub struct HomologyWeights {
    /// (h_z, h_w) per edge, oriented black→white.
    pub weights: Vec<(i64, i64)>,
    /// Two cycles (edge-coefficient vectors) forming the dual homology
    /// basis: pairing of weights against these is the identity matrix.
    pub basis_cycles: [Vec<i64>; 2],
}

impl HomologyWeights {
    /// Cocycle condition: signed weight sum around every face vanishes.
    pub fn is_cocycle(weights: &[(i64, i64)], m: &CombinatorialMap) -> bool {
        m.face_boundaries().iter().all(|b| {
            let (mut z, mut w) = (0i64, 0i64);
            for (e, &c) in b.iter().enumerate() {
                z += c * weights[e].0;
                w += c * weights[e].1;
            }
            z == 0 && w == 0
        })
    }

    /// Pairing of a weight assignment against this weight system's basis
    /// cycles; |det| = 1 means the assignment is itself a homology basis.
    pub fn period_matrix(&self, weights: &[(i64, i64)]) -> [[i64; 2]; 2] {
        let mut p = [[0i64; 2]; 2];
        for (a, row) in p.iter_mut().enumerate() {
            for (b, entry) in row.iter_mut().enumerate() {
                *entry = self.basis_cycles[b]
                    .iter()
                    .enumerate()
                    .map(|(e, &c)| c * if a == 0 { weights[e].0 } else { weights[e].1 })
                    .sum();
            }
        }
        p
    }

    pub fn unimodular(&self, weights: &[(i64, i64)]) -> bool {
        let p = self.period_matrix(weights);
        (p[0][0] * p[1][1] - p[0][1] * p[1][0]).abs() == 1
    }
}

/// Canonical homology weights: vanish on a BFS spanning tree of the
/// underlying graph; the quotient of the edge-cocycle lattice by face
/// boundaries is computed by Smith normal form and a unimodular basis
/// returned.
pub fn homology_weights(m: &CombinatorialMap) -> Result<HomologyWeights, MapError> {
    m.require_genus_one()?;
    let e_count = m.edge_count();
    let endpoints = m.edge_endpoints();
    let n_black = m.black_nodes().len();
    let n_vertices = n_black + m.white_nodes().len();
    let vert = |e: usize| -> (usize, usize) {
        let (b, w) = endpoints[e];
        (b, n_black + w)
    };

    // BFS spanning tree; path_to[v] = edge-coefficient vector of the tree
    // path root → v (black→white traversal counted +1).
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n_vertices];
    for e in 0..e_count {
        let (b, w) = vert(e);
        adjacency[b].push(e);
        adjacency[w].push(e);
    }
    for list in adjacency.iter_mut() {
        list.sort_unstable();
    }
    let mut path_to: Vec<Option<Vec<i64>>> = vec![None; n_vertices];
    path_to[0] = Some(vec![0; e_count]);
    let mut in_tree = vec![false; e_count];
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        for &e in &adjacency[v] {
            let (b, w) = vert(e);
            let other = if v == b { w } else { b };
            if path_to[other].is_none() {
                let mut path = path_to[v].clone().unwrap();
                path[e] += if v == b { 1 } else { -1 };
                path_to[other] = Some(path);
                in_tree[e] = true;
                queue.push_back(other);
            }
        }
    }
    if path_to.iter().any(|p| p.is_none()) {
        return Err(MapError::Disconnected);
    }

    // Fundamental cycles of the non-tree edges.
    let non_tree: Vec<usize> = (0..e_count).filter(|&e| !in_tree[e]).collect();
    let fundamental: Vec<Vec<i64>> = non_tree
        .iter()
        .map(|&e| {
            let (b, w) = vert(e);
            let mut c = vec![0i64; e_count];
            for (j, v) in path_to[b].as_ref().unwrap().iter().enumerate() {
                c[j] += v;
            }
            c[e] += 1;
            for (j, v) in path_to[w].as_ref().unwrap().iter().enumerate() {
                c[j] -= v;
            }
            c
        })
        .collect();

    // Face boundaries in fundamental-cycle coordinates: a cycle's
    // coordinates are its coefficients on the non-tree edges.
    let boundaries = m.face_boundaries();
    let k = non_tree.len();
    let matrix: Vec<Vec<BigInt>> = (0..k)
        .map(|i| {
            boundaries
                .iter()
                .map(|b| BigInt::from(b[non_tree[i]]))
                .collect()
        })
        .collect();
    let s = smith_normal_form(matrix);
    if k - s.rank != 2 {
        return Err(MapError::Homology(format!(
            "cocycle quotient has rank {}, expected 2",
            k - s.rank
        )));
    }
    for d in s.diag.iter().take(s.rank) {
        if d.abs() != BigInt::from(1) {
            return Err(MapError::Homology(format!(
                "torsion {} in homology quotient",
                d
            )));
        }
    }

    let to_i64 = |v: &BigInt| -> Result<i64, MapError> {
        i64::try_from(v.clone()).map_err(|_| MapError::Homology("entry overflow".into()))
    };

    // Kernel rows of U give tree-vanishing cocycles; quotient-basis columns
    // of U⁻¹ give dual homology cycles. The pairing is the identity by
    // construction; asserted below.
    let mut weights = vec![(0i64, 0i64); e_count];
    for (a, row) in s.u[s.rank..s.rank + 2].iter().enumerate() {
        for (i, v) in row.iter().enumerate() {
            let val = to_i64(v)?;
            if a == 0 {
                weights[non_tree[i]].0 = val;
            } else {
                weights[non_tree[i]].1 = val;
            }
        }
    }
    let mut basis_cycles = [vec![0i64; e_count], vec![0i64; e_count]];
    for (b, cycle) in basis_cycles.iter_mut().enumerate() {
        for (i, fc) in fundamental.iter().enumerate() {
            let coeff = to_i64(&s.u_inv[i][s.rank + b])?;
            for (j, v) in fc.iter().enumerate() {
                cycle[j] += coeff * v;
            }
        }
    }

    let hw = HomologyWeights {
        weights,
        basis_cycles,
    };
    debug_assert!(HomologyWeights::is_cocycle(&hw.weights, m));
    debug_assert_eq!(hw.period_matrix(&hw.weights), [[1, 0], [0, 1]]);
    Ok(hw)
}
