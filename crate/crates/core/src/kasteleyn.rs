//! Kasteleyn machinery: edge sign assignment by a parity solve over GF(2),
//! the homology-weighted adjacency matrix, its exact Laurent determinant,
//! and a brute-force perfect-matching enumerator used as the independent
//! oracle for the determinant's coefficients.

use crate::map::{CombinatorialMap, MapError};
use crate::poly::{toric_diagram, Exp, LaurentPoly2, ToricDiagram};
use num::BigInt;
use std::collections::{BTreeMap, HashMap};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum KasteleynError {
    #[error("sign parity system has no solution (malformed map)")]
    NoSolution,
    #[error("matrix is {white} white x {black} black; need a square matrix")]
    Dimension { white: usize, black: usize },
    #[error("map has no perfect matching")]
    NoMatching,
    #[error(transparent)]
    Map(#[from] MapError),
}

/// Per-face parity targets: product of boundary signs must be +1 when the
/// face has E ≡ 2 (mod 4) boundary incidences and −1 when E ≡ 0 (mod 4).
fn face_parity_system(m: &CombinatorialMap) -> (Vec<Vec<bool>>, Vec<bool>) {
    let walks = m.face_walks();
    let mut rows = Vec::with_capacity(walks.len());
    let mut rhs = Vec::with_capacity(walks.len());
    for walk in &walks {
        let mut row = vec![false; m.edge_count()];
        for &(e, _) in walk {
            row[e] ^= true;
        }
        rows.push(row);
        // Boundary incidence count is even; E mod 4 is 0 or 2.
        rhs.push(walk.len() % 4 == 0);
    }
    (rows, rhs)
}

/// Solve for a sign assignment (one bit per edge; bit set means −1) with
/// the free variables fixed by `free_choice` bits in elimination order.
pub fn kasteleyn_signs_with(
    m: &CombinatorialMap,
    free_choice: &[bool],
) -> Result<Vec<i8>, KasteleynError> {
    require_genus_one(m)?;
    let (mut rows, mut rhs) = face_parity_system(m);
    let n = m.edge_count();
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; n];
    let mut rank = 0;
    for col in 0..n {
        let Some(r) = (rank..rows.len()).find(|&r| rows[r][col]) else {
            continue;
        };
        rows.swap(rank, r);
        rhs.swap(rank, r);
        for r2 in 0..rows.len() {
            if r2 != rank && rows[r2][col] {
                let (head, tail) = rows.split_at_mut(rank.max(r2));
                let (a, b) = if r2 > rank {
                    (&head[rank], &mut tail[0])
                } else {
                    (&tail[0], &mut head[r2])
                };
                for j in 0..n {
                    b[j] ^= a[j];
                }
                rhs[r2] ^= rhs[rank];
            }
        }
        pivot_of_col[col] = Some(rank);
        rank += 1;
    }
    // Zero rows with nonzero rhs mean the face parities are inconsistent.
    if rhs[rank..].iter().any(|&bit| bit) {
        return Err(KasteleynError::NoSolution);
    }
    let mut bits = vec![false; n];
    let mut free_idx = 0;
    for col in 0..n {
        if pivot_of_col[col].is_none() {
            bits[col] = free_choice.get(free_idx).copied().unwrap_or(false);
            free_idx += 1;
        }
    }
    for col in (0..n).rev() {
        if let Some(r) = pivot_of_col[col] {
            let mut v = rhs[r];
            for j in col + 1..n {
                if rows[r][j] {
                    v ^= bits[j];
                }
            }
            bits[col] = v;
        }
    }
    Ok(bits.iter().map(|&b| if b { -1 } else { 1 }).collect())
}

/// Canonical sign solution (all free variables +1).
pub fn kasteleyn_signs(m: &CombinatorialMap) -> Result<Vec<i8>, KasteleynError> {
    kasteleyn_signs_with(m, &[])
}

/// Check a sign assignment against the face parity conditions.
pub fn signs_valid(m: &CombinatorialMap, signs: &[i8]) -> bool {
    m.face_walks().iter().all(|walk| {
        let product: i32 = walk.iter().map(|&(e, _)| i32::from(signs[e])).product();
        let want = if walk.len() % 4 == 0 { -1 } else { 1 };
        product == want
    })
}

fn require_genus_one(m: &CombinatorialMap) -> Result<(), MapError> {
    match m.genus()? {
        1 => Ok(()),
        g => Err(MapError::Genus {
            found: g,
            expected: 1,
        }),
    }
}

/// Signed, homology-weighted adjacency matrix: rows indexed by white
/// nodes, columns by black nodes; entry (i,j) sums sign(e)·z^{h_z}·w^{h_w}
/// over the edges joining white i to black j.
#[derive(Debug, Clone)]
pub struct KasteleynMatrix {
    pub entries: Vec<Vec<LaurentPoly2>>,
}

impl KasteleynMatrix {
    pub fn size(&self) -> usize {
        self.entries.len()
    }
}

pub fn kasteleyn_matrix(
    m: &CombinatorialMap,
    signs: &[i8],
    weights: &[(i64, i64)],
) -> Result<KasteleynMatrix, KasteleynError> {
    let black = m.black_nodes();
    let white = m.white_nodes();
    if black.len() != white.len() || black.is_empty() {
        return Err(KasteleynError::Dimension {
            white: white.len(),
            black: black.len(),
        });
    }
    let endpoints = m.edge_endpoints();
    let mut entries = vec![vec![LaurentPoly2::zero(); black.len()]; white.len()];
    for (e, &(b, w)) in endpoints.iter().enumerate() {
        entries[w][b].add_term(weights[e], BigInt::from(signs[e]));
    }
    Ok(KasteleynMatrix { entries })
}

/// Exact determinant by cofactor expansion along the first remaining row,
/// memoized on the surviving column set.
pub fn laurent_det(k: &KasteleynMatrix) -> LaurentPoly2 {
    let n = k.size();
    assert!(n <= 63, "determinant restricted to desk-scale matrices");
    let full: u64 = if n == 64 { u64::MAX } else { (1 << n) - 1 };
    let mut memo: HashMap<u64, LaurentPoly2> = HashMap::new();
    det_rec(k, full, n, &mut memo)
}

fn det_rec(
    k: &KasteleynMatrix,
    mask: u64,
    n: usize,
    memo: &mut HashMap<u64, LaurentPoly2>,
) -> LaurentPoly2 {
    if mask == 0 {
        return LaurentPoly2::constant(1);
    }
    if let Some(p) = memo.get(&mask) {
        return p.clone();
    }
    let row = n - (mask.count_ones() as usize);
    let mut acc = LaurentPoly2::zero();
    let mut parity = 0;
    for col in 0..n {
        if mask & (1 << col) == 0 {
            continue;
        }
        let entry = &k.entries[row][col];
        if !entry.is_zero() {
            let minor = det_rec(k, mask & !(1 << col), n, memo);
            let contribution = entry.mul(&minor);
            if parity % 2 == 0 {
                acc = acc.add(&contribution);
            } else {
                acc = acc.sub(&contribution);
            }
        }
        parity += 1;
    }
    memo.insert(mask, acc.clone());
    acc
}

/// All perfect matchings with their lattice points (weight sums relative
/// to a reference matching).
#[derive(Debug, Clone)]
pub struct MatchingSet {
    /// Each matching as a sorted list of edge indices.
    pub matchings: Vec<(Vec<usize>, Exp)>,
    /// The reference matching whose lattice point is the origin.
    pub reference: Vec<usize>,
}

impl MatchingSet {
    pub fn len(&self) -> usize {
        self.matchings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matchings.is_empty()
    }

    /// Lattice multiplicity map, translated so minimal exponents are 0.
    pub fn diagram(&self) -> ToricDiagram {
        let mut counts: BTreeMap<Exp, u64> = BTreeMap::new();
        for (_, p) in &self.matchings {
            *counts.entry(*p).or_insert(0) += 1;
        }
        ToricDiagram::from_points(counts).normalized()
    }
}

/// Exhaustive recursion over black-node pairings. `reference` selects the
/// matching whose weight sum becomes the origin; `None` means the first
/// matching found.
pub fn enumerate_matchings(
    m: &CombinatorialMap,
    weights: &[(i64, i64)],
    reference: Option<&[usize]>,
) -> Result<MatchingSet, KasteleynError> {
    require_genus_one(m)?;
    let black = m.black_nodes();
    let white = m.white_nodes();
    if black.len() != white.len() {
        return Err(KasteleynError::Dimension {
            white: white.len(),
            black: black.len(),
        });
    }
    let endpoints = m.edge_endpoints();
    // Incident edges per black node, ascending, for a deterministic order.
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); black.len()];
    for (e, &(b, _)) in endpoints.iter().enumerate() {
        incident[b].push(e);
    }
    for list in incident.iter_mut() {
        list.sort_unstable();
    }
    let mut used_white = vec![false; white.len()];
    let mut current: Vec<usize> = Vec::new();
    let mut found: Vec<Vec<usize>> = Vec::new();
    recurse(
        0,
        &incident,
        &endpoints,
        &mut used_white,
        &mut current,
        &mut found,
    );
    if found.is_empty() {
        return Err(KasteleynError::NoMatching);
    }
    let weight_sum = |edges: &[usize]| -> Exp {
        edges.iter().fold((0, 0), |acc, &e| {
            (acc.0 + weights[e].0, acc.1 + weights[e].1)
        })
    };
    let reference: Vec<usize> = match reference {
        Some(r) => {
            let mut r = r.to_vec();
            r.sort_unstable();
            r
        }
        None => found[0].clone(),
    };
    let origin = weight_sum(&reference);
    let matchings = found
        .into_iter()
        .map(|edges| {
            let p = weight_sum(&edges);
            (edges, (p.0 - origin.0, p.1 - origin.1))
        })
        .collect();
    Ok(MatchingSet {
        matchings,
        reference,
    })
}

fn recurse(
    b: usize,
    incident: &[Vec<usize>],
    endpoints: &[(usize, usize)],
    used_white: &mut Vec<bool>,
    current: &mut Vec<usize>,
    found: &mut Vec<Vec<usize>>,
) {
    if b == incident.len() {
        found.push(current.clone());
        return;
    }
    for &e in &incident[b] {
        let w = endpoints[e].1;
        if !used_white[w] {
            used_white[w] = true;
            current.push(e);
            recurse(b + 1, incident, endpoints, used_white, current, found);
            current.pop();
            used_white[w] = false;
        }
    }
}

/// Coefficient magnitudes of det K equal the matching multiplicities per
/// lattice point after one global translation.
pub fn determinant_matches_matchings(det: &LaurentPoly2, matchings: &MatchingSet) -> bool {
    match toric_diagram(det) {
        Ok(d) => d.normalized() == matchings.diagram(),
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::map::{homology_weights, quiver_to_map};
    use crate::poly::canonical_polygon;

    fn pipeline(m: &CombinatorialMap) -> (Vec<i8>, Vec<(i64, i64)>, LaurentPoly2) {
        let hw = homology_weights(m).unwrap();
        let signs = kasteleyn_signs(m).unwrap();
        let k = kasteleyn_matrix(m, &signs, &hw.weights).unwrap();
        let det = laurent_det(&k);
        (signs, hw.weights, det)
    }

    #[test]
    fn honeycomb_all_plus_is_valid() {
        let m = quiver_to_map(&fixtures::clover()).unwrap();
        assert!(signs_valid(&m, &[1, 1, 1]));
        let (signs, _, det) = pipeline(&m);
        assert!(signs_valid(&m, &signs));
        // det is the C3 triangle polynomial up to gauge.
        let d = toric_diagram(&det).unwrap();
        assert_eq!(d.len(), 3);
        assert!(d.points().all(|(_, &m)| m == 1));
    }

    #[test]
    fn conifold_signs_have_odd_minus_count() {
        let m = quiver_to_map(&fixtures::conifold()).unwrap();
        let signs = kasteleyn_signs(&m).unwrap();
        assert!(signs_valid(&m, &signs));
        let minus = signs.iter().filter(|&&s| s == -1).count();
        assert_eq!(minus % 2, 1);
        // Both square faces must multiply to −1.
        for walk in m.face_walks() {
            let p: i32 = walk.iter().map(|&(e, _)| i32::from(signs[e])).product();
            assert_eq!(p, -1);
        }
    }

    #[test]
    fn f0_parity_products() {
        let m = quiver_to_map(&fixtures::f0_phase1()).unwrap();
        let signs = kasteleyn_signs(&m).unwrap();
        for walk in m.face_walks() {
            let p: i32 = walk.iter().map(|&(e, _)| i32::from(signs[e])).product();
            assert_eq!(p, -1, "square faces need product -1");
        }
    }

    #[test]
    fn hand_expanded_two_by_two() {
        let two_by_two = |top_right: LaurentPoly2, bottom_left: LaurentPoly2| KasteleynMatrix {
            entries: vec![
                vec![LaurentPoly2::constant(1), top_right],
                vec![bottom_left, LaurentPoly2::constant(1)],
            ],
        };
        // det [[1, z], [w, 1]] = 1 - zw
        let k = two_by_two(
            LaurentPoly2::monomial(BigInt::from(1), (1, 0)),
            LaurentPoly2::monomial(BigInt::from(1), (0, 1)),
        );
        assert_eq!(laurent_det(&k).to_string(), "1 - z*w");
        // det [[1, -z], [w, 1]] = 1 + zw
        let k = two_by_two(
            LaurentPoly2::monomial(BigInt::from(-1), (1, 0)),
            LaurentPoly2::monomial(BigInt::from(1), (0, 1)),
        );
        assert_eq!(laurent_det(&k).to_string(), "1 + z*w");
    }

    #[test]
    fn one_by_one_det_is_entry() {
        let k = KasteleynMatrix {
            entries: vec![vec![LaurentPoly2::constant(7)]],
        };
        assert_eq!(laurent_det(&k), LaurentPoly2::constant(7));
    }

    #[test]
    fn empty_map_dimension_error() {
        let m = CombinatorialMap::new(vec![], &[], &[]).unwrap();
        let err = kasteleyn_matrix(&m, &[], &[]);
        assert!(matches!(err, Err(KasteleynError::Dimension { .. })));
    }

    #[test]
    fn unbalanced_torus_map_has_no_sign_solution() {
        // One black and two white nodes on a torus: a single octagonal
        // face whose parity equation sums inconsistently. (Color-balanced
        // maps always have an even number of faces needing product −1,
        // so this only happens on maps that cannot carry a dimer.)
        let e = |i: usize| format!("e{}", i);
        let m = CombinatorialMap::new(
            (1..=4).map(e).collect(),
            &[vec![e(1), e(2), e(3), e(4)]],
            &[vec![e(1), e(3)], vec![e(2), e(4)]],
        )
        .unwrap();
        assert_eq!(m.genus().unwrap(), 1);
        assert_eq!(m.face_count(), 1);
        assert!(matches!(
            kasteleyn_signs(&m),
            Err(KasteleynError::NoSolution)
        ));
    }

    #[test]
    fn dp3_reproduces_reference_determinant() {
        let f = fixtures::dp3();
        let m = f.map().unwrap();
        let weights = f.pinned_weights().unwrap();
        let signs = f.pinned_signs().unwrap();
        assert!(signs_valid(&m, &signs));
        let k = kasteleyn_matrix(&m, &signs, &weights).unwrap();
        assert_eq!(
            k.entries
                .iter()
                .flat_map(|row| row.iter().map(|p| p.term_count()))
                .sum::<usize>(),
            12,
            "12 monomials across the matrix"
        );
        let det = laurent_det(&k);
        assert_eq!(det.to_string(), "z^-1*w^-1 - z^-1 - w^-1 - 6 - w - z + z*w");
    }

    #[test]
    fn matching_counts_per_fixture() {
        let cases = [("c3", 3usize), ("conifold", 4), ("f0-I", 8), ("dp3", 12)];
        for (name, count) in cases {
            let f = fixtures::by_name(name).unwrap();
            let m = f.map().unwrap();
            let weights = f
                .pinned_weights()
                .unwrap_or_else(|| homology_weights(&m).unwrap().weights);
            let ms = enumerate_matchings(&m, &weights, None).unwrap();
            assert_eq!(ms.len(), count, "{}", name);
        }
    }

    #[test]
    fn honeycomb_matchings_form_triangle() {
        let m = quiver_to_map(&fixtures::clover()).unwrap();
        let hw = homology_weights(&m).unwrap();
        let ms = enumerate_matchings(&m, &hw.weights, None).unwrap();
        let d = ms.diagram();
        assert_eq!(d.len(), 3);
        assert!(d.points().all(|(_, &mult)| mult == 1));
    }

    #[test]
    fn c3z3_diagram_is_the_orbifold_triangle() {
        use crate::poly::ToricDiagram;
        // Triangle of area 3/2 with a single triple interior point.
        let f = fixtures::by_name("c3z3").unwrap();
        let m = f.map().unwrap();
        let hw = homology_weights(&m).unwrap();
        let signs = kasteleyn_signs(&m).unwrap();
        let det = laurent_det(&kasteleyn_matrix(&m, &signs, &hw.weights).unwrap());
        let d = toric_diagram(&det).unwrap();
        let reference = ToricDiagram::from_points([
            ((1, 0), 1),
            ((0, 1), 1),
            ((-1, -1), 1),
            ((0, 0), 3),
        ]);
        assert_eq!(canonical_polygon(&d), canonical_polygon(&reference));
        let ms = enumerate_matchings(&m, &hw.weights, None).unwrap();
        assert_eq!(ms.len(), 6);
    }

    #[test]
    fn conifold_matchings_form_unit_square() {
        use crate::poly::ToricDiagram;
        let m = quiver_to_map(&fixtures::conifold()).unwrap();
        let hw = homology_weights(&m).unwrap();
        let ms = enumerate_matchings(&m, &hw.weights, None).unwrap();
        // One matching per edge; the four lattice points are the unit
        // square up to the homology basis choice.
        assert_eq!(ms.len(), 4);
        let square =
            ToricDiagram::from_points([((0, 0), 1), ((1, 0), 1), ((0, 1), 1), ((1, 1), 1)]);
        assert_eq!(canonical_polygon(&ms.diagram()), canonical_polygon(&square));
    }

    #[test]
    fn dp3_matching_multiplicities() {
        let f = fixtures::dp3();
        let m = f.map().unwrap();
        let ms = enumerate_matchings(&m, &f.pinned_weights().unwrap(), None).unwrap();
        let d = ms.diagram();
        // Hexagon corners once each, interior point six times.
        let mut mults: Vec<u64> = d.points().map(|(_, &m)| m).collect();
        mults.sort_unstable();
        assert_eq!(mults, vec![1, 1, 1, 1, 1, 1, 6]);
    }

    #[test]
    fn oracle_matches_determinant_on_all_fixtures() {
        for f in fixtures::all() {
            let m = f.map().unwrap();
            let weights = f
                .pinned_weights()
                .unwrap_or_else(|| homology_weights(&m).unwrap().weights);
            let signs = f
                .pinned_signs()
                .unwrap_or_else(|| kasteleyn_signs(&m).unwrap());
            let k = kasteleyn_matrix(&m, &signs, &weights).unwrap();
            let det = laurent_det(&k);
            let ms = enumerate_matchings(&m, &weights, None).unwrap();
            assert!(
                determinant_matches_matchings(&det, &ms),
                "{}: |det| vs matchings",
                f.name
            );
        }
    }

    #[test]
    fn determinant_gauge_invariance() {
        use rand::seq::SliceRandom;
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        for f in fixtures::all() {
            let m = f.map().unwrap();
            let base = {
                let hw = homology_weights(&m).unwrap();
                let signs = kasteleyn_signs(&m).unwrap();
                let det = laurent_det(&kasteleyn_matrix(&m, &signs, &hw.weights).unwrap());
                canonical_polygon(&toric_diagram(&det).unwrap())
            };
            for _ in 0..3 {
                // Random edge relabeling changes the spanning tree, the
                // elimination pivots and the node ordering at once; random
                // free bits change the sign solution.
                let mut order: Vec<usize> = (0..m.edge_count()).collect();
                order.shuffle(&mut rng);
                let edges: Vec<String> = order.iter().map(|&e| m.edges[e].clone()).collect();
                let relabeled = CombinatorialMap::new(
                    edges,
                    &m.black_nodes()
                        .iter()
                        .map(|c| c.iter().map(|&e| m.edges[e].clone()).collect())
                        .collect::<Vec<_>>(),
                    &m.white_nodes()
                        .iter()
                        .map(|c| c.iter().map(|&e| m.edges[e].clone()).collect())
                        .collect::<Vec<_>>(),
                )
                .unwrap();
                let hw = homology_weights(&relabeled).unwrap();
                let free: Vec<bool> = (0..relabeled.edge_count()).map(|_| rng.gen()).collect();
                let signs = kasteleyn_signs_with(&relabeled, &free).unwrap();
                assert!(signs_valid(&relabeled, &signs));
                let det = laurent_det(&kasteleyn_matrix(&relabeled, &signs, &hw.weights).unwrap());
                let canon = canonical_polygon(&toric_diagram(&det).unwrap());
                assert_eq!(canon, base, "{}: gauge dependence detected", f.name);
            }
        }
    }
}
