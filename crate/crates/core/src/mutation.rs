//! Seiberg duality / cluster mutation on quivers, mass-term (2-cycle)
//! reduction, urban renewal on maps as the conjugated operation, and the
//! toric-diagram invariance check across dual phases.

use crate::kasteleyn::{kasteleyn_matrix, kasteleyn_signs, laurent_det, KasteleynError};
use crate::map::{homology_weights, map_to_quiver, quiver_to_map, CombinatorialMap, MapError};
use crate::poly::{canonical_polygon, toric_diagram, PolyError, ToricDiagram};
use crate::quiver::{validate_quiver, Arrow, Quiver, QuiverError, Term};
use num::BigRational;
use serde::Serialize;
use std::collections::HashSet;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MutationError {
    #[error(
        "node `{node}` has {incoming} incoming / {outgoing} outgoing arrows; mutation needs 2/2"
    )]
    NotDualizable {
        node: String,
        incoming: usize,
        outgoing: usize,
    },
    #[error("term {term} visits node `{node}` more than once")]
    MultiVisit { node: String, term: usize },
    #[error("mutation cannot restore the toric condition: {0}")]
    ToricViolation(String),
    #[error("mass reduction splice failed: {0}")]
    Splice(String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error(transparent)]
    Quiver(#[from] QuiverError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Kasteleyn(#[from] KasteleynError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// What a mutation did: enough to audit or undo it.
#[derive(Debug, Clone, Serialize)]
pub struct MutationRecord {
    pub node: String,
    /// (meson id, incoming arrow consumed, outgoing arrow consumed).
    pub mesons: Vec<(String, String, String)>,
    /// (old arrow id, reversed arrow id).
    pub reversed: Vec<(String, String)>,
    /// 2-cycle arrow pairs removed by a subsequent mass reduction.
    pub removed_pairs: Vec<(String, String)>,
    pub terms_before: usize,
    pub terms_after: usize,
}

fn fresh_id(base: String, taken: &HashSet<String>) -> String {
    if !taken.contains(&base) {
        return base;
    }
    let mut k = 2;
    loop {
        let cand = format!("{}_{}", base, k);
        if !taken.contains(&cand) {
            return cand;
        }
        k += 1;
    }
}

/// Mutate at a node with exactly two incoming and two outgoing arrows:
/// arrows at the node are reversed, a meson is composed for each
/// (incoming, outgoing) pair, adjacent passes through the node are
/// replaced by the meson, and a cubic partner term with the opposite sign
/// is appended per meson.
pub fn seiberg_mutate(q: &Quiver, node: &str) -> Result<(Quiver, MutationRecord), MutationError> {
    if q.node_index(node).is_none() {
        return Err(MutationError::UnknownNode(node.to_string()));
    }
    let report = validate_quiver(q);
    if !report.all_passed() {
        return Err(MutationError::ToricViolation(format!(
            "input fails validation: {}",
            report
        )));
    }
    let incoming: Vec<Arrow> = q.arrows.iter().filter(|a| a.to == node).cloned().collect();
    let outgoing: Vec<Arrow> = q
        .arrows
        .iter()
        .filter(|a| a.from == node)
        .cloned()
        .collect();
    let loops = incoming.iter().filter(|a| a.from == node).count();
    if incoming.len() != 2 || outgoing.len() != 2 || loops > 0 {
        return Err(MutationError::NotDualizable {
            node: node.to_string(),
            incoming: incoming.len(),
            outgoing: outgoing.len(),
        });
    }
    let incoming_ids: HashSet<&str> = incoming.iter().map(|a| a.id.as_str()).collect();

    let mut taken: HashSet<String> = q.arrows.iter().map(|a| a.id.clone()).collect();
    let mut reversed: Vec<(String, String)> = Vec::new();
    let mut new_arrows: Vec<Arrow> = q
        .arrows
        .iter()
        .filter(|a| a.from != node && a.to != node)
        .cloned()
        .collect();
    for a in incoming.iter().chain(outgoing.iter()) {
        let id = fresh_id(format!("{}_rev", a.id), &taken);
        taken.insert(id.clone());
        reversed.push((a.id.clone(), id.clone()));
        new_arrows.push(Arrow {
            id,
            from: a.to.clone(),
            to: a.from.clone(),
        });
    }
    let reversed_id = |id: &str| -> String {
        reversed
            .iter()
            .find(|(old, _)| old == id)
            .map(|(_, new)| new.clone())
            .unwrap()
    };

    // One meson per (incoming, outgoing) pair.
    let mut mesons: Vec<(String, String, String)> = Vec::new();
    for a in &incoming {
        for b in &outgoing {
            let id = fresh_id(format!("m_{}_{}", a.id, b.id), &taken);
            taken.insert(id.clone());
            new_arrows.push(Arrow {
                id: id.clone(),
                from: a.from.clone(),
                to: b.to.clone(),
            });
            mesons.push((id, a.id.clone(), b.id.clone()));
        }
    }
    let meson_id = |a: &str, b: &str| -> String {
        mesons
            .iter()
            .find(|(_, ma, mb)| ma == a && mb == b)
            .map(|(id, _, _)| id.clone())
            .unwrap()
    };

    // Substitute each pass through the node by the meson of its pair.
    let mut new_terms: Vec<Term> = Vec::new();
    let mut partner_terms: Vec<(String, i8, String, String)> = Vec::new();
    let mut substituted: Vec<String> = Vec::new();
    for (k, t) in q.superpotential.iter().enumerate() {
        let visits: Vec<usize> = t
            .word
            .iter()
            .enumerate()
            .filter(|(_, id)| incoming_ids.contains(id.as_str()))
            .map(|(i, _)| i)
            .collect();
        match visits.len() {
            0 => new_terms.push(t.clone()),
            1 => {
                let i = visits[0];
                let a = t.word[i].clone();
                let b = t.word[(i + 1) % t.word.len()].clone();
                let m = meson_id(&a, &b);
                let mut word: Vec<String> = vec![m.clone()];
                let mut pos = (i + 2) % t.word.len();
                while pos != i {
                    word.push(t.word[pos].clone());
                    pos = (pos + 1) % t.word.len();
                }
                partner_terms.push((m.clone(), -t.sign, b, a));
                substituted.push(m);
                new_terms.push(Term {
                    sign: t.sign,
                    coeff: t.coeff.clone(),
                    word,
                });
            }
            _ => {
                return Err(MutationError::MultiVisit {
                    node: node.to_string(),
                    term: k,
                })
            }
        }
    }
    // Every meson must have been consumed exactly once.
    let distinct: HashSet<&String> = substituted.iter().collect();
    if substituted.len() != 4 || distinct.len() != 4 {
        return Err(MutationError::ToricViolation(
            "the four (incoming, outgoing) pairs were not substituted exactly once each".into(),
        ));
    }
    // Cubic partner terms m · rev(b) · rev(a), sign opposite the
    // substituted occurrence.
    for (m, sign, b, a) in partner_terms {
        new_terms.push(Term::new(sign, vec![m, reversed_id(&b), reversed_id(&a)]));
    }

    let terms_before = q.superpotential.len();
    let terms_after = new_terms.len();
    let out = Quiver::new(q.nodes.clone(), new_arrows, new_terms)?;
    let rep = validate_quiver(&out);
    if !rep.all_passed() {
        return Err(MutationError::ToricViolation(format!(
            "mutated quiver fails validation: {}",
            rep
        )));
    }
    Ok((
        out,
        MutationRecord {
            node: node.to_string(),
            mesons,
            reversed,
            removed_pairs: Vec::new(),
            terms_before,
            terms_after,
        },
    ))
}

/// Integrate out mass terms: while some term is exactly a 2-cycle (X, Y),
/// splice the complement of X in its partner term into Y's partner term
/// and delete X, Y and the two consumed terms.
pub fn reduce_mass_terms(q: &Quiver) -> Result<Quiver, MutationError> {
    Ok(reduce_mass_terms_with_record(q)?.0)
}

pub fn reduce_mass_terms_with_record(
    q: &Quiver,
) -> Result<(Quiver, Vec<(String, String)>), MutationError> {
    let report = validate_quiver(q);
    if !report.all_passed() {
        return Err(MutationError::ToricViolation(format!(
            "input fails validation: {}",
            report
        )));
    }
    let mut terms: Vec<Term> = q.superpotential.clone();
    let mut arrows: Vec<Arrow> = q.arrows.clone();
    let mut removed: Vec<(String, String)> = Vec::new();

    while let Some(cycle_idx) = terms.iter().position(|t| t.word.len() == 2) {
        let (x, y) = {
            let w = &terms[cycle_idx].word;
            (w[0].clone(), w[1].clone())
        };
        let partner = |arrow: &str, skip: usize, terms: &[Term]| -> Option<usize> {
            (0..terms.len()).find(|&i| i != skip && terms[i].word.iter().any(|w| w == arrow))
        };
        let Some(tx) = partner(&x, cycle_idx, &terms) else {
            return Err(MutationError::Splice(format!(
                "no partner term for `{}`",
                x
            )));
        };
        let Some(ty) = partner(&y, cycle_idx, &terms) else {
            return Err(MutationError::Splice(format!(
                "no partner term for `{}`",
                y
            )));
        };
        if tx == ty {
            return Err(MutationError::Splice(format!(
                "2-cycle partners of `{}` and `{}` coincide",
                x, y
            )));
        }
        // Complement of the massive arrow in its partner: rotate it to the
        // front and drop it; the remainders concatenate at the shared
        // endpoints into one closed word.
        let rotate_front = |word: &[String], id: &str| -> Vec<String> {
            let i = word.iter().position(|w| w == id).unwrap();
            let mut w = word.to_vec();
            w.rotate_left(i);
            w[1..].to_vec()
        };
        let mut word = rotate_front(&terms[tx].word, &x);
        word.extend(rotate_front(&terms[ty].word, &y));
        if word.is_empty() {
            return Err(MutationError::Splice(
                "splice produced an empty word".into(),
            ));
        }
        let coeff: BigRational = &terms[tx].coeff * &terms[ty].coeff / &terms[cycle_idx].coeff;
        let spliced = Term {
            sign: terms[ty].sign,
            coeff,
            word,
        };
        let mut drop: Vec<usize> = vec![cycle_idx, tx, ty];
        drop.sort_unstable();
        for &i in drop.iter().rev() {
            terms.remove(i);
        }
        terms.push(spliced);
        arrows.retain(|a| a.id != x && a.id != y);
        removed.push((x, y));
    }

    let out = Quiver::new(q.nodes.clone(), arrows, terms)?;
    let rep = validate_quiver(&out);
    if !rep.all_passed() {
        return Err(MutationError::Splice(format!(
            "reduced quiver fails validation: {}",
            rep
        )));
    }
    Ok((out, removed))
}

/// Mutation seen on the tiling: dualize the quiver node dual to `face`
/// (0-based face index), reduce, and convert back.
pub fn urban_renewal(
    m: &CombinatorialMap,
    face: usize,
) -> Result<(CombinatorialMap, MutationRecord), MutationError> {
    let q = map_to_quiver(m)?;
    let node = (face + 1).to_string();
    if q.node_index(&node).is_none() {
        return Err(MutationError::UnknownNode(format!("face {}", face)));
    }
    let (mutated, mut record) = seiberg_mutate(&q, &node)?;
    let (reduced, removed) = reduce_mass_terms_with_record(&mutated)?;
    record.removed_pairs = removed;
    record.terms_after = reduced.superpotential.len();
    let map = quiver_to_map(&reduced)?;
    Ok((map, record))
}

/// Shape comparison of two phases: canonical polygons of the Kasteleyn
/// determinants, with interior multiplicities masked (they are not
/// invariants of the duality class; support and boundary multiplicities
/// are).
#[derive(Debug, Clone, Serialize)]
pub struct InvarianceReport {
    pub first_polygon: String,
    pub second_polygon: String,
    pub equal: bool,
}

pub fn check_duality_invariance(
    q1: &Quiver,
    q2: &Quiver,
) -> Result<InvarianceReport, MutationError> {
    let d1 = phase_polygon(q1)?;
    let d2 = phase_polygon(q2)?;
    Ok(InvarianceReport {
        equal: d1 == d2,
        first_polygon: d1.to_text(),
        second_polygon: d2.to_text(),
    })
}

/// Canonical support+boundary polygon of a quiver's toric diagram.
pub fn phase_polygon(q: &Quiver) -> Result<ToricDiagram, MutationError> {
    let m = quiver_to_map(q)?;
    let hw = homology_weights(&m)?;
    let signs = kasteleyn_signs(&m)?;
    let k = kasteleyn_matrix(&m, &signs, &hw.weights)?;
    let det = laurent_det(&k);
    let d = toric_diagram(&det)?;
    Ok(canonical_polygon(&d.support_and_boundary()))
}
