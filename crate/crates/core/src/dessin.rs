//! Dessin combinatorics of a bipartite map: the permutation triple
//! σ_B σ_W σ_∞ = Id, its passport, and the Riemann-Hurwitz genus.

use crate::map::{CombinatorialMap, MapError};
use crate::perm::Perm;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DessinError {
    #[error("map is disconnected")]
    Disconnected,
    #[error("2g-2 = d - (B+W+I) is odd: d={d}, B+W+I={bwi} (invalid triple)")]
    NonIntegerGenus { d: usize, bwi: usize },
    #[error(transparent)]
    Map(#[from] MapError),
}

/// σ_B, σ_W, σ_∞ on the edge set, with σ_B σ_W σ_∞ = Id (right action)
/// and the generated group transitive.
#[derive(Debug, Clone)]
pub struct PermutationTriple {
    pub sigma_black: Perm,
    pub sigma_white: Perm,
    pub sigma_infinity: Perm,
}

impl PermutationTriple {
    pub fn degree(&self) -> usize {
        self.sigma_black.degree()
    }

    pub fn product_is_identity(&self) -> bool {
        self.sigma_black
            .then(&self.sigma_white)
            .then(&self.sigma_infinity)
            .is_identity()
    }

    pub fn is_transitive(&self) -> bool {
        Perm::transitive(&[&self.sigma_black, &self.sigma_white])
    }
}

impl fmt::Display for PermutationTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |p: &Perm| -> String {
            p.cycles()
                .iter()
                .map(|c| {
                    let inner: Vec<String> = c.iter().map(|e| (e + 1).to_string()).collect();
                    format!("({})", inner.join(" "))
                })
                .collect::<Vec<_>>()
                .join("")
        };
        writeln!(f, "sigma_B   = {}", show(&self.sigma_black))?;
        writeln!(f, "sigma_W   = {}", show(&self.sigma_white))?;
        write!(f, "sigma_inf = {}", show(&self.sigma_infinity))
    }
}

/// Three multisets of cycle lengths [r₀ | r₁ | r_∞], each summing to the
/// degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Passport {
    pub black: Vec<usize>,
    pub white: Vec<usize>,
    pub faces: Vec<usize>,
}

impl Passport {
    pub fn degree(&self) -> usize {
        self.black.iter().sum()
    }

    pub fn rows_sum_to_degree(&self) -> bool {
        let d = self.degree();
        self.white.iter().sum::<usize>() == d && self.faces.iter().sum::<usize>() == d
    }
}

impl fmt::Display for Passport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[usize]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(
            f,
            "[{} | {} | {}]",
            join(&self.black),
            join(&self.white),
            join(&self.faces)
        )
    }
}

/// Read the triple off a connected map: σ_B and σ_W are the clockwise
/// rotations, σ_∞ = (σ_B σ_W)⁻¹.
pub fn permutation_triple(m: &CombinatorialMap) -> Result<PermutationTriple, DessinError> {
    if !m.is_connected() {
        return Err(DessinError::Disconnected);
    }
    let triple = PermutationTriple {
        sigma_black: m.sigma_black.clone(),
        sigma_white: m.sigma_white.clone(),
        sigma_infinity: m.face_permutation(),
    };
    debug_assert!(triple.product_is_identity());
    Ok(triple)
}

/// Cycle-type multisets of the triple, ascending within each row.
pub fn passport(t: &PermutationTriple) -> Passport {
    Passport {
        black: t.sigma_black.cycle_type(),
        white: t.sigma_white.cycle_type(),
        faces: t.sigma_infinity.cycle_type(),
    }
}

/// Genus from 2g − 2 = d − (B + W + I).
pub fn rh_genus(t: &PermutationTriple) -> Result<i64, DessinError> {
    let d = t.degree();
    let bwi =
        t.sigma_black.cycle_count() + t.sigma_white.cycle_count() + t.sigma_infinity.cycle_count();
    let num = d as i64 - bwi as i64 + 2;
    if num % 2 != 0 {
        return Err(DessinError::NonIntegerGenus { d, bwi });
    }
    Ok(num / 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::map::quiver_to_map;

    #[test]
    fn honeycomb_triple() {
        let m = quiver_to_map(&fixtures::clover()).unwrap();
        let t = permutation_triple(&m).unwrap();
        assert!(t.product_is_identity());
        assert!(t.is_transitive());
        let p = passport(&t);
        assert_eq!(p.to_string(), "[3 | 3 | 3]");
        assert_eq!(rh_genus(&t).unwrap(), 1);
    }

    #[test]
    fn single_edge_sphere() {
        let m = CombinatorialMap::new(vec!["e".into()], &[vec!["e".into()]], &[vec!["e".into()]])
            .unwrap();
        let t = permutation_triple(&m).unwrap();
        assert!(t.sigma_black.is_identity());
        assert!(t.sigma_infinity.is_identity());
        assert_eq!(rh_genus(&t).unwrap(), 0);
    }

    #[test]
    fn f0_passports() {
        let m1 = quiver_to_map(&fixtures::f0_phase1()).unwrap();
        let t1 = permutation_triple(&m1).unwrap();
        assert_eq!(passport(&t1).to_string(), "[4,4 | 4,4 | 2,2,2,2]");
        assert_eq!(rh_genus(&t1).unwrap(), 1);

        let m2 = quiver_to_map(&fixtures::f0_phase2()).unwrap();
        let t2 = permutation_triple(&m2).unwrap();
        assert_eq!(passport(&t2).to_string(), "[3,3,3,3 | 3,3,3,3 | 2,2,4,4]");
        assert_eq!(rh_genus(&t2).unwrap(), 1);
    }

    #[test]
    fn balanced_and_consistent_on_fixtures() {
        for f in fixtures::all() {
            let m = f.map().unwrap();
            let t = permutation_triple(&m).unwrap();
            let p = passport(&t);
            assert!(p.rows_sum_to_degree(), "{}", f.name);
            assert_eq!(p.black.len(), p.white.len(), "{}: balanced", f.name);
            assert_eq!(rh_genus(&t).unwrap(), m.genus().unwrap(), "{}", f.name);
            // Face cycle lengths are half the boundary walk lengths.
            let mut walk_halves: Vec<usize> = m.face_walks().iter().map(|w| w.len() / 2).collect();
            walk_halves.sort_unstable();
            assert_eq!(p.faces, walk_halves, "{}", f.name);
            if let Some(expected) = f.expected.passport {
                assert_eq!(p.to_string(), expected, "{}", f.name);
            }
        }
    }

    #[test]
    fn disconnected_rejected() {
        let m = CombinatorialMap::new(
            vec!["a".into(), "b".into()],
            &[vec!["a".into()], vec!["b".into()]],
            &[vec!["a".into()], vec!["b".into()]],
        )
        .unwrap();
        assert!(matches!(
            permutation_triple(&m),
            Err(DessinError::Disconnected)
        ));
    }
}
