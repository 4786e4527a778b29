//! Built-in models: the clover quiver (C³ honeycomb), the C³/Z₃ orbifold,
//! the conifold, the two cluster-dual F0 phases, and the dP3 tiling.
//!
//! All fixtures except dp3 store a quiver and derive their map; dp3 is a
//! transcription of a published worked example and stores the map directly,
//! together with the homology weights and Kasteleyn signs that figure
//! fixes (an algorithmic weight choice is only canonical up to GL(2,Z), so
//! reproducing the reference determinant verbatim needs the pinned data).

use crate::map::{self, CombinatorialMap, MapError};
use crate::quiver::{Arrow, Quiver, Term};

#[derive(Clone)]
enum Source {
    Quiver(Quiver),
    Map {
        map: CombinatorialMap,
        weights: Vec<(i64, i64)>,
        signs: Vec<i8>,
    },
}

/// Optional reference values a fixture carries for reporting.
#[derive(Clone, Default)]
pub struct Expected {
    pub passport: Option<&'static str>,
    /// Multiset of R-charges as (value, multiplicity) pairs.
    pub rcharges: Option<&'static [(f64, usize)]>,
    /// Normalized Klein invariant J = j/1728.
    pub j_normalized: Option<f64>,
}

#[derive(Clone)]
pub struct Fixture {
    pub name: &'static str,
    source: Source,
    pub expected: Expected,
}

impl Fixture {
    pub fn quiver(&self) -> Result<Quiver, MapError> {
        match &self.source {
            Source::Quiver(q) => Ok(q.clone()),
            Source::Map { map, .. } => map::map_to_quiver(map),
        }
    }

    pub fn map(&self) -> Result<CombinatorialMap, MapError> {
        match &self.source {
            Source::Quiver(q) => map::quiver_to_map(q),
            Source::Map { map, .. } => Ok(map.clone()),
        }
    }

    pub fn stores_map(&self) -> bool {
        matches!(self.source, Source::Map { .. })
    }

    pub fn pinned_weights(&self) -> Option<Vec<(i64, i64)>> {
        match &self.source {
            Source::Map { weights, .. } => Some(weights.clone()),
            Source::Quiver(_) => None,
        }
    }

    pub fn pinned_signs(&self) -> Option<Vec<i8>> {
        match &self.source {
            Source::Map { signs, .. } => Some(signs.clone()),
            Source::Quiver(_) => None,
        }
    }
}

fn arrow(id: &str, from: &str, to: &str) -> Arrow {
    Arrow {
        id: id.into(),
        from: from.into(),
        to: to.into(),
    }
}

fn term(sign: i8, word: &[&str]) -> Term {
    Term::new(sign, word.iter().map(|s| s.to_string()).collect())
}

/// One node, three loops, W = XYZ − XZY. The dual map is the honeycomb.
pub fn clover() -> Quiver {
    Quiver::new(
        vec!["1".into()],
        vec![
            arrow("X", "1", "1"),
            arrow("Y", "1", "1"),
            arrow("Z", "1", "1"),
        ],
        vec![term(1, &["X", "Y", "Z"]), term(-1, &["X", "Z", "Y"])],
    )
    .unwrap()
}

/// Three nodes, nine arrows, W = ε_{αβγ} X12^α X23^β X31^γ.
pub fn c3z3() -> Quiver {
    let mut arrows = Vec::new();
    for (pair, from, to) in [("12", "1", "2"), ("23", "2", "3"), ("31", "3", "1")] {
        for sup in 1..=3 {
            arrows.push(arrow(&format!("X{}_{}", pair, sup), from, to));
        }
    }
    // Even permutations of (1,2,3) carry +, odd carry −.
    let eps: [([usize; 3], i8); 6] = [
        ([1, 2, 3], 1),
        ([2, 3, 1], 1),
        ([3, 1, 2], 1),
        ([1, 3, 2], -1),
        ([3, 2, 1], -1),
        ([2, 1, 3], -1),
    ];
    let terms = eps
        .iter()
        .map(|([a, b, g], sign)| {
            term(
                *sign,
                &[
                    &format!("X12_{}", a),
                    &format!("X23_{}", b),
                    &format!("X31_{}", g),
                ],
            )
        })
        .collect();
    Quiver::new(vec!["1".into(), "2".into(), "3".into()], arrows, terms).unwrap()
}

/// Two nodes, four arrows, W = A1 B1 A2 B2 − A1 B2 A2 B1.
pub fn conifold() -> Quiver {
    Quiver::new(
        vec!["1".into(), "2".into()],
        vec![
            arrow("A1", "1", "2"),
            arrow("B1", "2", "1"),
            arrow("A2", "1", "2"),
            arrow("B2", "2", "1"),
        ],
        vec![
            term(1, &["A1", "B1", "A2", "B2"]),
            term(-1, &["A1", "B2", "A2", "B1"]),
        ],
    )
    .unwrap()
}

/// First F0 phase: four nodes around a square, two arrows per side,
/// W = ε^{ij} ε^{kl} X12^i X23^k X34^j X41^l. The dual map is the square
/// tiling of the torus.
pub fn f0_phase1() -> Quiver {
    let mut arrows = Vec::new();
    for (pair, from, to) in [
        ("12", "1", "2"),
        ("23", "2", "3"),
        ("34", "3", "4"),
        ("41", "4", "1"),
    ] {
        for sup in 1..=2 {
            arrows.push(arrow(&format!("X{}_{}", pair, sup), from, to));
        }
    }
    let x = |pair: &str, sup: usize| format!("X{}_{}", pair, sup);
    let mut terms = Vec::new();
    for (i, j) in [(1usize, 2usize), (2, 1)] {
        for (k, l) in [(1usize, 2usize), (2, 1)] {
            let sign = if (i < j) == (k < l) { 1 } else { -1 };
            terms.push(term(
                sign,
                &[&x("12", i), &x("23", k), &x("34", j), &x("41", l)],
            ));
        }
    }
    Quiver::new(
        vec!["1".into(), "2".into(), "3".into(), "4".into()],
        arrows,
        terms,
    )
    .unwrap()
}

/// Second F0 phase, the cluster dual of the first at node 1. The meson
/// Y42_lk composes the reverses of X41_l and X12_k; the term set below is
/// the one whose dual map is the square-octagon tiling of the torus
/// (genus 1 with faces [2,2,4,4]).
pub fn f0_phase2() -> Quiver {
    let mut arrows = vec![
        arrow("Y21_1", "2", "1"),
        arrow("Y21_2", "2", "1"),
        arrow("Y14_1", "1", "4"),
        arrow("Y14_2", "1", "4"),
    ];
    for l in 1..=2 {
        for k in 1..=2 {
            arrows.push(arrow(&format!("Y42_{}{}", l, k), "4", "2"));
        }
    }
    arrows.push(arrow("X23_1", "2", "3"));
    arrows.push(arrow("X23_2", "2", "3"));
    arrows.push(arrow("X34_1", "3", "4"));
    arrows.push(arrow("X34_2", "3", "4"));

    let terms = vec![
        term(1, &["Y42_21", "X23_1", "X34_2"]),
        term(-1, &["Y42_11", "X23_2", "X34_2"]),
        term(-1, &["Y42_22", "X23_1", "X34_1"]),
        term(1, &["Y42_12", "X23_2", "X34_1"]),
        term(-1, &["Y42_21", "Y21_1", "Y14_2"]),
        term(1, &["Y42_11", "Y21_1", "Y14_1"]),
        term(1, &["Y42_22", "Y21_2", "Y14_2"]),
        term(-1, &["Y42_12", "Y21_2", "Y14_1"]),
    ];
    Quiver::new(
        vec!["1".into(), "2".into(), "3".into(), "4".into()],
        arrows,
        terms,
    )
    .unwrap()
}

/// The dP3 tiling: three black and three white nodes, twelve edges, six
/// square faces, stored with the reference homology weights and signs.
pub fn dp3_fixture() -> Fixture {
    let edges: Vec<String> = (1..=12).map(|i| format!("e{}", i)).collect();
    let cyc = |ids: &[usize]| -> Vec<String> { ids.iter().map(|i| format!("e{}", i)).collect() };
    let map = CombinatorialMap::new(
        edges,
        &[
            cyc(&[1, 2, 3, 4, 5, 6]),
            cyc(&[7, 8, 9]),
            cyc(&[10, 11, 12]),
        ],
        &[
            cyc(&[9, 4, 10, 1]),
            cyc(&[12, 5, 8, 2]),
            cyc(&[7, 6, 11, 3]),
        ],
    )
    .unwrap();
    let weights = vec![
        (0, 1),  // e1
        (1, 1),  // e2
        (1, 0),  // e3
        (0, 0),  // e4
        (0, 0),  // e5
        (0, 0),  // e6
        (0, -1), // e7
        (0, 0),  // e8
        (0, 0),  // e9
        (-1, 0), // e10
        (0, 0),  // e11
        (0, 0),  // e12
    ];
    let signs = vec![1, -1, 1, 1, 1, 1, -1, -1, 1, -1, 1, -1];
    Fixture {
        name: "dp3",
        source: Source::Map {
            map,
            weights,
            signs,
        },
        expected: Expected::default(),
    }
}

pub fn dp3() -> Fixture {
    dp3_fixture()
}

const R_23: f64 = 2.0 / 3.0;

pub fn all() -> Vec<Fixture> {
    vec![
        Fixture {
            name: "c3",
            source: Source::Quiver(clover()),
            expected: Expected {
                passport: Some("[3 | 3 | 3]"),
                rcharges: Some(&[(R_23, 3)]),
                j_normalized: Some(0.0),
            },
        },
        Fixture {
            name: "c3z3",
            source: Source::Quiver(c3z3()),
            expected: Expected {
                passport: Some("[3,3,3 | 3,3,3 | 3,3,3]"),
                rcharges: None,
                j_normalized: None,
            },
        },
        Fixture {
            name: "conifold",
            source: Source::Quiver(conifold()),
            expected: Expected {
                passport: Some("[4 | 4 | 2,2]"),
                rcharges: Some(&[(0.5, 4)]),
                j_normalized: Some(1.0),
            },
        },
        Fixture {
            name: "f0-I",
            source: Source::Quiver(f0_phase1()),
            expected: Expected {
                passport: Some("[4,4 | 4,4 | 2,2,2,2]"),
                rcharges: Some(&[(0.5, 8)]),
                j_normalized: Some(1.0),
            },
        },
        Fixture {
            name: "f0-II",
            source: Source::Quiver(f0_phase2()),
            expected: Expected {
                passport: Some("[3,3,3,3 | 3,3,3,3 | 2,2,4,4]"),
                rcharges: Some(&[(0.5, 8), (1.0, 4)]),
                j_normalized: Some(1.0),
            },
        },
        dp3_fixture(),
    ]
}

pub fn by_name(name: &str) -> Option<Fixture> {
    all().into_iter().find(|f| f.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::validate_quiver;

    #[test]
    fn every_quiver_fixture_validates() {
        for f in all() {
            if !f.stores_map() {
                let rep = validate_quiver(&f.quiver().unwrap());
                assert!(rep.all_passed(), "{}: {}", f.name, rep);
            }
        }
    }

    #[test]
    fn every_fixture_is_genus_one() {
        for f in all() {
            assert_eq!(f.map().unwrap().genus().unwrap(), 1, "{}", f.name);
        }
    }

    #[test]
    fn dp3_map_shape() {
        let f = dp3_fixture();
        let m = f.map().unwrap();
        assert_eq!(m.edge_count(), 12);
        assert_eq!(m.black_nodes().len(), 3);
        assert_eq!(m.white_nodes().len(), 3);
        assert_eq!(m.face_count(), 6);
        // All faces are squares.
        assert!(m.face_walks().iter().all(|w| w.len() == 4));
        // The derived quiver has six nodes and passes validation.
        let q = f.quiver().unwrap();
        assert_eq!(q.counts(), (6, 12, 6));
        assert!(validate_quiver(&q).all_passed());
    }

    #[test]
    fn dp3_pinned_weights_are_valid() {
        let f = dp3_fixture();
        let m = f.map().unwrap();
        let pinned = f.pinned_weights().unwrap();
        let canonical = crate::map::homology_weights(&m).unwrap();
        assert!(crate::map::HomologyWeights::is_cocycle(&pinned, &m));
        assert!(canonical.unimodular(&pinned));
    }
}
