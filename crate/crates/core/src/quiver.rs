//! Quivers with superpotential.
//!
//! A quiver here is a finite directed multigraph (loops and parallel arrows
//! allowed) together with a superpotential: a signed sum of cyclic words in
//! the arrows. The toric condition (every arrow occurs in exactly two
//! terms, once with each sign, exactly once per term) combined with the
//! Euler relation N0 − N1 + N2 = 0 is what lets the whole structure be
//! redrawn as a bipartite graph on a torus (see [`crate::map`]).

use num::{BigRational, One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum QuiverError {
    #[error("arrow `{arrow}` references undeclared node `{node}`")]
    UndeclaredNode { arrow: String, node: String },
    #[error("duplicate arrow id `{0}`")]
    DuplicateArrow(String),
    #[error("duplicate node id `{0}`")]
    DuplicateNode(String),
    #[error("term {term} references unknown arrow `{arrow}`")]
    UnknownArrow { term: usize, arrow: String },
    #[error("term {0} has an empty word")]
    EmptyWord(usize),
    #[error("term {0} has zero coefficient")]
    ZeroCoeff(usize),
    #[error("term {0} has sign {1}; expected +1 or -1")]
    BadSign(usize, i8),
    #[error("cannot parse rational `{0}`")]
    BadRational(String),
    #[error("json: {0}")]
    Json(String),
}

/// One monomial of the superpotential: a signed cyclic word in arrow ids.
/// The word is stored with a fixed starting arrow but compared
/// rotation-invariantly; reflections are not quotiented.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub sign: i8,
    pub coeff: BigRational,
    pub word: Vec<String>,
}

impl Term {
    pub fn new(sign: i8, word: Vec<String>) -> Self {
        Term {
            sign,
            coeff: BigRational::one(),
            word,
        }
    }

    /// Lexicographically minimal rotation of the word; the canonical form
    /// used for rotation-invariant comparison.
    pub fn canonical_word(&self) -> Vec<String> {
        canonical_rotation(&self.word)
    }

    /// Equality as signed cyclic words.
    pub fn cyclic_eq(&self, other: &Term) -> bool {
        self.sign == other.sign
            && self.coeff == other.coeff
            && self.canonical_word() == other.canonical_word()
    }
}

pub fn canonical_rotation(word: &[String]) -> Vec<String> {
    if word.is_empty() {
        return Vec::new();
    }
    (0..word.len())
        .map(|r| {
            let mut w = word.to_vec();
            w.rotate_left(r);
            w
        })
        .min()
        .unwrap()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arrow {
    pub id: String,
    pub from: String,
    pub to: String,
}

/// A quiver with superpotential.
#[derive(Debug, Clone)]
pub struct Quiver {
    pub nodes: Vec<String>,
    pub arrows: Vec<Arrow>,
    pub superpotential: Vec<Term>,
}

impl Quiver {
    /// Structural construction checks: declared endpoints, unique ids,
    /// known arrows in every word, nonzero coefficients, legal signs.
    /// Cycle closure and the toric condition are diagnostics, reported by
    /// [`validate_quiver`] rather than rejected here.
    pub fn new(
        nodes: Vec<String>,
        arrows: Vec<Arrow>,
        superpotential: Vec<Term>,
    ) -> Result<Self, QuiverError> {
        let mut node_set = HashSet::new();
        for n in &nodes {
            if !node_set.insert(n.clone()) {
                return Err(QuiverError::DuplicateNode(n.clone()));
            }
        }
        let mut arrow_set = HashSet::new();
        for a in &arrows {
            if !arrow_set.insert(a.id.clone()) {
                return Err(QuiverError::DuplicateArrow(a.id.clone()));
            }
            for node in [&a.from, &a.to] {
                if !node_set.contains(node) {
                    return Err(QuiverError::UndeclaredNode {
                        arrow: a.id.clone(),
                        node: node.clone(),
                    });
                }
            }
        }
        for (k, t) in superpotential.iter().enumerate() {
            if t.word.is_empty() {
                return Err(QuiverError::EmptyWord(k));
            }
            if t.coeff.is_zero() {
                return Err(QuiverError::ZeroCoeff(k));
            }
            if t.sign != 1 && t.sign != -1 {
                return Err(QuiverError::BadSign(k, t.sign));
            }
            for id in &t.word {
                if !arrow_set.contains(id) {
                    return Err(QuiverError::UnknownArrow {
                        term: k,
                        arrow: id.clone(),
                    });
                }
            }
        }
        Ok(Quiver {
            nodes,
            arrows,
            superpotential,
        })
    }

    pub fn arrow(&self, id: &str) -> Option<&Arrow> {
        self.arrows.iter().find(|a| a.id == id)
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n == id)
    }

    /// (N0, N1, N2) = (#nodes, #arrows, #terms).
    pub fn counts(&self) -> (usize, usize, usize) {
        (
            self.nodes.len(),
            self.arrows.len(),
            self.superpotential.len(),
        )
    }

    /// Is the word a closed cycle: target of each arrow = source of the
    /// next, cyclically?
    fn word_closes(&self, word: &[String]) -> bool {
        word.iter().zip(word.iter().cycle().skip(1)).all(|(a, b)| {
            let (a, b) = (self.arrow(a).unwrap(), self.arrow(b).unwrap());
            a.to == b.from
        })
    }
}

/// One pass/fail check with an explanatory message.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Diagnostics from [`validate_quiver`]; never an error.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub counts: (usize, usize, usize),
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (n0, n1, n2) = self.counts;
        writeln!(f, "N0={} N1={} N2={}", n0, n1, n2)?;
        for c in &self.checks {
            writeln!(
                f,
                "  [{}] {}: {}",
                if c.passed { "pass" } else { "FAIL" },
                c.name,
                c.detail
            )?;
        }
        Ok(())
    }
}

/// Report the toric condition, the Euler relation N0 − N1 + N2 = 0, and
/// cycle closure of every term.
pub fn validate_quiver(q: &Quiver) -> ValidationReport {
    let (n0, n1, n2) = q.counts();
    let mut checks = Vec::new();

    // Toric: every arrow in exactly two terms, once per term, opposite signs.
    let mut occurrences: BTreeMap<&str, Vec<(usize, i8, usize)>> = BTreeMap::new();
    for (k, t) in q.superpotential.iter().enumerate() {
        for id in &t.word {
            let count = t.word.iter().filter(|w| *w == id).count();
            occurrences
                .entry(id.as_str())
                .or_default()
                .push((k, t.sign, count));
        }
    }
    let mut toric_failures = Vec::new();
    for a in &q.arrows {
        let occ = occurrences.get(a.id.as_str()).cloned().unwrap_or_default();
        let mut by_term: BTreeMap<usize, (i8, usize)> = BTreeMap::new();
        for (k, sign, count) in occ {
            by_term.insert(k, (sign, count));
        }
        let ok = by_term.len() == 2
            && by_term.values().all(|&(_, count)| count == 1)
            && by_term.values().map(|&(s, _)| i32::from(s)).sum::<i32>() == 0;
        if !ok {
            toric_failures.push(a.id.clone());
        }
    }
    checks.push(Check {
        name: "toric".into(),
        passed: toric_failures.is_empty(),
        detail: if toric_failures.is_empty() {
            "every arrow appears in exactly two terms with opposite signs".into()
        } else {
            format!("violated by arrows: {}", toric_failures.join(", "))
        },
    });

    let euler = n0 as i64 - n1 as i64 + n2 as i64;
    checks.push(Check {
        name: "euler".into(),
        passed: euler == 0,
        detail: format!("N0 - N1 + N2 = {}", euler),
    });

    let open: Vec<usize> = q
        .superpotential
        .iter()
        .enumerate()
        .filter(|(_, t)| !q.word_closes(&t.word))
        .map(|(k, _)| k)
        .collect();
    checks.push(Check {
        name: "cycles".into(),
        passed: open.is_empty(),
        detail: if open.is_empty() {
            "all terms are closed cycles".into()
        } else {
            format!(
                "terms not closing: {}",
                open.iter()
                    .map(|k| k.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            )
        },
    });

    ValidationReport {
        counts: (n0, n1, n2),
        checks,
    }
}

/// Node-arrow incidence matrix: column per arrow with −1 at the source row
/// and +1 at the target row; loops give all-zero columns.
pub fn incidence_matrix(q: &Quiver) -> Vec<Vec<i64>> {
    let mut m = vec![vec![0i64; q.arrows.len()]; q.nodes.len()];
    for (j, a) in q.arrows.iter().enumerate() {
        let from = q.node_index(&a.from).unwrap();
        let to = q.node_index(&a.to).unwrap();
        if from != to {
            m[from][j] -= 1;
            m[to][j] += 1;
        }
    }
    m
}

/// Graph isomorphism respecting signs, coefficients and cyclic words, by
/// backtracking over node and arrow bijections. Exponential in the worst
/// case; fixtures stay at or below 16 arrows.
pub fn quivers_isomorphic(a: &Quiver, b: &Quiver) -> bool {
    find_isomorphism(a, b).is_some()
}

/// The arrow bijection of an isomorphism, if one exists (a-arrow id → b-arrow id).
pub fn find_isomorphism(a: &Quiver, b: &Quiver) -> Option<HashMap<String, String>> {
    if a.nodes.len() != b.nodes.len()
        || a.arrows.len() != b.arrows.len()
        || a.superpotential.len() != b.superpotential.len()
    {
        return None;
    }
    // Degree signature (in, out, loops) prunes node candidates.
    let sig = |q: &Quiver, n: &str| -> (usize, usize, usize) {
        let outs = q.arrows.iter().filter(|x| x.from == n && x.to != n).count();
        let ins = q.arrows.iter().filter(|x| x.to == n && x.from != n).count();
        let loops = q.arrows.iter().filter(|x| x.from == n && x.to == n).count();
        (ins, outs, loops)
    };
    let b_sigs: Vec<(usize, usize, usize)> = b.nodes.iter().map(|n| sig(b, n)).collect();
    let a_sigs: Vec<(usize, usize, usize)> = a.nodes.iter().map(|n| sig(a, n)).collect();

    let mut node_map = vec![usize::MAX; a.nodes.len()];
    let mut used = vec![false; b.nodes.len()];
    backtrack_nodes(a, b, &a_sigs, &b_sigs, 0, &mut node_map, &mut used)
}

fn backtrack_nodes(
    a: &Quiver,
    b: &Quiver,
    a_sigs: &[(usize, usize, usize)],
    b_sigs: &[(usize, usize, usize)],
    idx: usize,
    node_map: &mut Vec<usize>,
    used: &mut Vec<bool>,
) -> Option<HashMap<String, String>> {
    if idx == a.nodes.len() {
        return match_arrows(a, b, node_map);
    }
    for cand in 0..b.nodes.len() {
        if used[cand] || a_sigs[idx] != b_sigs[cand] {
            continue;
        }
        node_map[idx] = cand;
        used[cand] = true;
        if let Some(m) = backtrack_nodes(a, b, a_sigs, b_sigs, idx + 1, node_map, used) {
            return Some(m);
        }
        used[cand] = false;
        node_map[idx] = usize::MAX;
    }
    None
}

fn match_arrows(a: &Quiver, b: &Quiver, node_map: &[usize]) -> Option<HashMap<String, String>> {
    // Group parallel arrows by (mapped from, mapped to); the bijection is a
    // product of per-group bijections.
    let mut a_groups: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (j, arr) in a.arrows.iter().enumerate() {
        let from = node_map[a.node_index(&arr.from).unwrap()];
        let to = node_map[a.node_index(&arr.to).unwrap()];
        a_groups.entry((from, to)).or_default().push(j);
    }
    let mut b_groups: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (j, arr) in b.arrows.iter().enumerate() {
        let from = b.node_index(&arr.from).unwrap();
        let to = b.node_index(&arr.to).unwrap();
        b_groups.entry((from, to)).or_default().push(j);
    }
    if a_groups.len() != b_groups.len() {
        return None;
    }
    for (key, grp) in &a_groups {
        if b_groups.get(key).map(|g| g.len()) != Some(grp.len()) {
            return None;
        }
    }
    let groups: Vec<(&Vec<usize>, &Vec<usize>)> = a_groups
        .iter()
        .map(|(key, grp)| (grp, b_groups.get(key).unwrap()))
        .collect();
    let mut arrow_map: HashMap<String, String> = HashMap::new();
    permute_groups(a, b, &groups, 0, &mut arrow_map)
}

fn permute_groups(
    a: &Quiver,
    b: &Quiver,
    groups: &[(&Vec<usize>, &Vec<usize>)],
    g: usize,
    arrow_map: &mut HashMap<String, String>,
) -> Option<HashMap<String, String>> {
    if g == groups.len() {
        return if terms_match(a, b, arrow_map) {
            Some(arrow_map.clone())
        } else {
            None
        };
    }
    let (a_grp, b_grp) = groups[g];
    let mut perm: Vec<usize> = (0..b_grp.len()).collect();
    loop {
        for (i, &pi) in perm.iter().enumerate() {
            arrow_map.insert(
                a.arrows[a_grp[i]].id.clone(),
                b.arrows[b_grp[pi]].id.clone(),
            );
        }
        if let Some(m) = permute_groups(a, b, groups, g + 1, arrow_map) {
            return Some(m);
        }
        for &i in a_grp {
            arrow_map.remove(&a.arrows[i].id);
        }
        if !next_permutation(&mut perm) {
            return None;
        }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

fn terms_match(a: &Quiver, b: &Quiver, arrow_map: &HashMap<String, String>) -> bool {
    let mut b_canon: Vec<(i8, BigRational, Vec<String>)> = b
        .superpotential
        .iter()
        .map(|t| (t.sign, t.coeff.clone(), t.canonical_word()))
        .collect();
    b_canon.sort_by(|x, y| (x.0, &x.2).cmp(&(y.0, &y.2)));
    let mut a_mapped: Vec<(i8, BigRational, Vec<String>)> = a
        .superpotential
        .iter()
        .map(|t| {
            let word: Vec<String> = t.word.iter().map(|id| arrow_map[id].clone()).collect();
            (t.sign, t.coeff.clone(), canonical_rotation(&word))
        })
        .collect();
    a_mapped.sort_by(|x, y| (x.0, &x.2).cmp(&(y.0, &y.2)));
    a_mapped == b_canon
}

// --- JSON schema ---------------------------------------------------------
//
// {"nodes":[...],
//  "arrows":[{"id":..,"from":..,"to":..}],
//  "W":[{"sign":1|-1,"coeff":"p/q","word":["a1",...]}]}

#[derive(Serialize, Deserialize)]
struct TermJson {
    sign: i8,
    #[serde(default = "one_string")]
    coeff: String,
    word: Vec<String>,
}

fn one_string() -> String {
    "1".into()
}

#[derive(Serialize, Deserialize)]
struct QuiverJson {
    nodes: Vec<String>,
    arrows: Vec<ArrowJson>,
    #[serde(rename = "W")]
    w: Vec<TermJson>,
}

#[derive(Serialize, Deserialize)]
struct ArrowJson {
    id: String,
    from: String,
    to: String,
}

pub fn parse_rational(s: &str) -> Result<BigRational, QuiverError> {
    let parse_int = |t: &str| {
        t.trim()
            .parse::<num::BigInt>()
            .map_err(|_| QuiverError::BadRational(s.to_string()))
    };
    match s.split_once('/') {
        Some((num_part, den_part)) => {
            let d = parse_int(den_part)?;
            if d.is_zero() {
                return Err(QuiverError::BadRational(s.to_string()));
            }
            Ok(BigRational::new(parse_int(num_part)?, d))
        }
        None => Ok(BigRational::from(parse_int(s)?)),
    }
}

pub fn rational_to_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl Quiver {
    pub fn from_json(text: &str) -> Result<Self, QuiverError> {
        let qj: QuiverJson =
            serde_json::from_str(text).map_err(|e| QuiverError::Json(e.to_string()))?;
        let arrows = qj
            .arrows
            .into_iter()
            .map(|a| Arrow {
                id: a.id,
                from: a.from,
                to: a.to,
            })
            .collect();
        let mut terms = Vec::new();
        for t in qj.w {
            terms.push(Term {
                sign: t.sign,
                coeff: parse_rational(&t.coeff)?,
                word: t.word,
            });
        }
        Quiver::new(qj.nodes, arrows, terms)
    }

    pub fn to_json(&self) -> String {
        let qj = QuiverJson {
            nodes: self.nodes.clone(),
            arrows: self
                .arrows
                .iter()
                .map(|a| ArrowJson {
                    id: a.id.clone(),
                    from: a.from.clone(),
                    to: a.to.clone(),
                })
                .collect(),
            w: self
                .superpotential
                .iter()
                .map(|t| TermJson {
                    sign: t.sign,
                    coeff: rational_to_string(&t.coeff),
                    word: t.word.clone(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&qj).unwrap()
    }
}
