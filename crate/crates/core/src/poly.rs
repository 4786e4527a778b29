//! Bivariate Laurent polynomials with exact big-integer coefficients, and
//! lattice-point diagrams with multiplicities (the supports of such
//! polynomials). Includes the GL(2,Z)+translation canonical form used to
//! compare diagrams that are only defined up to a lattice basis change.

use num::{BigInt, One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("polynomial is zero")]
    ZeroPolynomial,
    #[error("coefficient list has {given} entries for {points} lattice points")]
    Arity { given: usize, points: usize },
    #[error("coefficient does not fit the diagram multiplicity type")]
    MultiplicityOverflow,
}

/// Exponent pair (power of z, power of w).
pub type Exp = (i64, i64);

/// A Laurent polynomial in z and w over Z; no zero coefficients stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LaurentPoly2 {
    terms: BTreeMap<Exp, BigInt>,
}

impl LaurentPoly2 {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: i64) -> Self {
        Self::monomial(c.into(), (0, 0))
    }

    pub fn monomial(c: BigInt, exp: Exp) -> Self {
        let mut p = Self::zero();
        p.add_term(exp, c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, exp: Exp, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exp).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn coeff(&self, exp: Exp) -> BigInt {
        self.terms.get(&exp).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exp, &BigInt)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&e, c) in &other.terms {
            out.add_term(e, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        LaurentPoly2 {
            terms: self.terms.iter().map(|(&e, c)| (e, -c.clone())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (&(a1, b1), c1) in &self.terms {
            for (&(a2, b2), c2) in &other.terms {
                out.add_term((a1 + a2, b1 + b2), c1 * c2);
            }
        }
        out
    }

    pub fn min_exponents(&self) -> Option<Exp> {
        if self.is_zero() {
            return None;
        }
        let a = self.terms.keys().map(|e| e.0).min().unwrap();
        let b = self.terms.keys().map(|e| e.1).min().unwrap();
        Some((a, b))
    }

    /// Multiply by z^da w^db.
    pub fn shift(&self, (da, db): Exp) -> Self {
        LaurentPoly2 {
            terms: self
                .terms
                .iter()
                .map(|(&(a, b), c)| ((a + da, b + db), c.clone()))
                .collect(),
        }
    }

    /// Equality up to a unit monomial factor ± z^a w^b.
    pub fn eq_up_to_unit_monomial(&self, other: &Self) -> bool {
        if self.is_zero() || other.is_zero() {
            return self.is_zero() == other.is_zero();
        }
        let normalize = |p: &Self| {
            let (a, b) = p.min_exponents().unwrap();
            p.shift((-a, -b))
        };
        let p = normalize(self);
        let q = normalize(other);
        p == q || p == q.neg()
    }

    /// Substitute z -> ±z, w -> ±w.
    pub fn flip_signs(&self, z_neg: bool, w_neg: bool) -> Self {
        LaurentPoly2 {
            terms: self
                .terms
                .iter()
                .map(|(&(a, b), c)| {
                    let mut c = c.clone();
                    if z_neg && a % 2 != 0 {
                        c = -c;
                    }
                    if w_neg && b % 2 != 0 {
                        c = -c;
                    }
                    ((a, b), c)
                })
                .collect(),
        }
    }
}

impl fmt::Display for LaurentPoly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (&(a, b), c)) in self.terms.iter().enumerate() {
            let mag = c.abs();
            if i == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut parts: Vec<String> = Vec::new();
            if !mag.is_one() || (a == 0 && b == 0) {
                parts.push(mag.to_string());
            }
            for (sym, e) in [("z", a), ("w", b)] {
                match e {
                    0 => {}
                    1 => parts.push(sym.into()),
                    _ => parts.push(format!("{}^{}", sym, e)),
                }
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

/// Lattice points with positive multiplicities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToricDiagram {
    points: BTreeMap<Exp, u64>,
}

impl ToricDiagram {
    pub fn from_points(points: impl IntoIterator<Item = (Exp, u64)>) -> Self {
        let mut map = BTreeMap::new();
        for (p, m) in points {
            if m > 0 {
                *map.entry(p).or_insert(0) += m;
            }
        }
        ToricDiagram { points: map }
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> impl Iterator<Item = (&Exp, &u64)> {
        self.points.iter()
    }

    pub fn multiplicity(&self, p: Exp) -> u64 {
        self.points.get(&p).copied().unwrap_or(0)
    }

    pub fn support(&self) -> BTreeSet<Exp> {
        self.points.keys().copied().collect()
    }

    pub fn total_multiplicity(&self) -> u64 {
        self.points.values().sum()
    }

    /// Largest coordinate extent over both axes.
    pub fn span(&self) -> i64 {
        if self.points.is_empty() {
            return 0;
        }
        let xs: Vec<i64> = self.points.keys().map(|p| p.0).collect();
        let ys: Vec<i64> = self.points.keys().map(|p| p.1).collect();
        let dx = xs.iter().max().unwrap() - xs.iter().min().unwrap();
        let dy = ys.iter().max().unwrap() - ys.iter().min().unwrap();
        dx.max(dy)
    }

    /// Translate so minimal exponents are zero.
    pub fn normalized(&self) -> Self {
        if self.points.is_empty() {
            return self.clone();
        }
        let ax = self.points.keys().map(|p| p.0).min().unwrap();
        let ay = self.points.keys().map(|p| p.1).min().unwrap();
        ToricDiagram {
            points: self
                .points
                .iter()
                .map(|(&(x, y), &m)| ((x - ax, y - ay), m))
                .collect(),
        }
    }

    pub fn transformed(&self, u: [[i64; 2]; 2]) -> Self {
        ToricDiagram {
            points: self
                .points
                .iter()
                .map(|(&(x, y), &m)| ((u[0][0] * x + u[0][1] * y, u[1][0] * x + u[1][1] * y), m))
                .collect(),
        }
    }

    /// Points on the boundary of the convex hull (for ≤ 2 points or a
    /// collinear diagram, every point).
    pub fn boundary_points(&self) -> BTreeSet<Exp> {
        let pts: Vec<Exp> = self.points.keys().copied().collect();
        let hull = convex_hull(&pts);
        if hull.len() < 3 {
            return pts.into_iter().collect();
        }
        pts.into_iter()
            .filter(|&p| {
                (0..hull.len()).any(|i| {
                    let a = hull[i];
                    let b = hull[(i + 1) % hull.len()];
                    on_segment(a, b, p)
                })
            })
            .collect()
    }

    /// Interior multiplicities masked to 1; the shape invariant compared
    /// across cluster-dual phases.
    pub fn support_and_boundary(&self) -> Self {
        let boundary = self.boundary_points();
        ToricDiagram {
            points: self
                .points
                .iter()
                .map(|(&p, &m)| (p, if boundary.contains(&p) { m } else { 1 }))
                .collect(),
        }
    }

    /// Text format: one line "a b multiplicity" per point, sorted.
    pub fn to_text(&self) -> String {
        self.points
            .iter()
            .map(|(&(a, b), m)| format!("{} {} {}", a, b, m))
            .collect::<Vec<_>>()
            .join("\n")
    }

    pub fn from_text(text: &str) -> Result<Self, String> {
        let mut points = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(format!("line {}: expected `a b multiplicity`", lineno + 1));
            }
            let a: i64 = fields[0]
                .parse()
                .map_err(|_| format!("line {}", lineno + 1))?;
            let b: i64 = fields[1]
                .parse()
                .map_err(|_| format!("line {}", lineno + 1))?;
            let m: u64 = fields[2]
                .parse()
                .map_err(|_| format!("line {}", lineno + 1))?;
            if m == 0 {
                return Err(format!("line {}: zero multiplicity", lineno + 1));
            }
            *points.entry((a, b)).or_insert(0) += m;
        }
        Ok(ToricDiagram { points })
    }
}

fn cross(o: Exp, a: Exp, b: Exp) -> i64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

fn on_segment(a: Exp, b: Exp, p: Exp) -> bool {
    cross(a, b, p) == 0
        && p.0 >= a.0.min(b.0)
        && p.0 <= a.0.max(b.0)
        && p.1 >= a.1.min(b.1)
        && p.1 <= a.1.max(b.1)
}

/// Andrew's monotone chain; returns hull vertices in counterclockwise
/// order, or fewer than 3 points when degenerate.
pub fn convex_hull(points: &[Exp]) -> Vec<Exp> {
    let mut pts: Vec<Exp> = points.to_vec();
    pts.sort_unstable();
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<Exp> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Exp> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() < 3 {
        // All collinear.
        return pts;
    }
    lower
}

/// Support of a nonzero polynomial, translated so minimal exponents are 0;
/// multiplicities are the absolute coefficient values.
pub fn toric_diagram(p: &LaurentPoly2) -> Result<ToricDiagram, PolyError> {
    if p.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let (ax, ay) = p.min_exponents().unwrap();
    let mut points = BTreeMap::new();
    for (&(x, y), c) in p.terms() {
        let m = u64::try_from(c.abs()).map_err(|_| PolyError::MultiplicityOverflow)?;
        points.insert((x - ax, y - ay), m);
    }
    Ok(ToricDiagram { points })
}

/// Newton polynomial of a diagram: Σ α_i z^{a_i} w^{b_i} with α_i the
/// multiplicities unless explicit coefficients (one per point, in sorted
/// point order) are supplied.
pub fn newton_polynomial(
    d: &ToricDiagram,
    coeffs: Option<&[BigInt]>,
) -> Result<LaurentPoly2, PolyError> {
    if d.is_empty() {
        return Err(PolyError::ZeroPolynomial);
    }
    if let Some(cs) = coeffs {
        if cs.len() != d.len() {
            return Err(PolyError::Arity {
                given: cs.len(),
                points: d.len(),
            });
        }
    }
    let mut p = LaurentPoly2::zero();
    for (i, (&exp, &m)) in d.points().enumerate() {
        let c = match coeffs {
            Some(cs) => cs[i].clone(),
            None => BigInt::from(m),
        };
        p.add_term(exp, c);
    }
    Ok(p)
}

/// The local mirror equation "uv = P(z,w)" as a display string.
pub fn mirror_equation(d: &ToricDiagram, coeffs: Option<&[BigInt]>) -> Result<String, PolyError> {
    Ok(format!("uv = {}", newton_polynomial(d, coeffs)?))
}

/// Canonical representative of a diagram under GL(2,Z) × translations:
/// enumerate unimodular matrices with entries bounded by 2·span+1, apply,
/// translate to the nonnegative quadrant touching both axes, and keep the
/// lexicographically minimal sorted (point, multiplicity) list.
pub fn canonical_polygon(d: &ToricDiagram) -> ToricDiagram {
    if d.is_empty() {
        return d.clone();
    }
    let bound = 2 * d.span() + 1;
    let mut best: Option<Vec<(Exp, u64)>> = None;
    for a in -bound..=bound {
        for b in -bound..=bound {
            for c in -bound..=bound {
                // a*e - b*c = ±1 fixes e up to two candidates per (a,b,c).
                for e in -bound..=bound {
                    if (a * e - b * c).abs() != 1 {
                        continue;
                    }
                    let cand = d.transformed([[a, b], [c, e]]).normalized();
                    let key: Vec<(Exp, u64)> = cand.points.into_iter().collect();
                    if best.as_ref().is_none_or(|k| key < *k) {
                        best = Some(key);
                    }
                }
            }
        }
    }
    ToricDiagram {
        points: best.unwrap().into_iter().collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(terms: &[(i64, i64, i64)]) -> LaurentPoly2 {
        let mut p = LaurentPoly2::zero();
        for &(a, b, c) in terms {
            p.add_term((a, b), c.into());
        }
        p
    }

    #[test]
    fn display_matches_reference_format() {
        let det = poly(&[
            (-1, -1, 1),
            (-1, 0, -1),
            (0, -1, -1),
            (0, 0, -6),
            (0, 1, -1),
            (1, 0, -1),
            (1, 1, 1),
        ]);
        assert_eq!(det.to_string(), "z^-1*w^-1 - z^-1 - w^-1 - 6 - w - z + z*w");
        // Exponent pairs sort lexicographically: (0,1) = w before (1,0) = z.
        assert_eq!(
            poly(&[(0, 0, 1), (1, 0, 1), (0, 1, 1)]).to_string(),
            "1 + w + z"
        );
        assert_eq!(LaurentPoly2::zero().to_string(), "0");
    }

    #[test]
    fn diagram_from_polynomial() {
        let p = poly(&[(0, 0, 1), (1, 0, 1), (0, 1, 1)]);
        let d = toric_diagram(&p).unwrap();
        assert_eq!(d.len(), 3);
        assert_eq!(d.multiplicity((0, 0)), 1);

        let c = LaurentPoly2::constant(5);
        let d = toric_diagram(&c).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.multiplicity((0, 0)), 5);

        assert_eq!(
            toric_diagram(&LaurentPoly2::zero()),
            Err(PolyError::ZeroPolynomial)
        );
    }

    #[test]
    fn newton_of_square() {
        let d = ToricDiagram::from_points([((0, 0), 1), ((1, 0), 1), ((0, 1), 1), ((1, 1), 1)]);
        let p = newton_polynomial(&d, None).unwrap();
        assert_eq!(p.to_string(), "1 + w + z + z*w");
        assert_eq!(mirror_equation(&d, None).unwrap(), "uv = 1 + w + z + z*w");
        let single = ToricDiagram::from_points([((0, 0), 1)]);
        assert_eq!(mirror_equation(&single, None).unwrap(), "uv = 1");
        assert!(matches!(
            newton_polynomial(&d, Some(&[BigInt::from(1)])),
            Err(PolyError::Arity {
                given: 1,
                points: 4
            })
        ));
        assert!(matches!(
            newton_polynomial(&ToricDiagram::from_points([]), None),
            Err(PolyError::ZeroPolynomial)
        ));
    }

    #[test]
    fn canonical_polygon_examples() {
        let triangle = ToricDiagram::from_points([((0, 0), 1), ((1, 0), 1), ((0, 1), 1)]);
        let canon = canonical_polygon(&triangle);
        assert_eq!(canonical_polygon(&canon), canon, "idempotent");

        // Shear by [[1,1],[0,1]] is undone.
        let sheared = triangle.transformed([[1, 1], [0, 1]]);
        assert_eq!(canonical_polygon(&sheared), canon);

        // Rotation by [[0,-1],[1,0]] is undone.
        let rotated = triangle.transformed([[0, -1], [1, 0]]);
        assert_eq!(canonical_polygon(&rotated), canon);
    }

    #[test]
    fn boundary_and_interior() {
        // dP3 hexagon with its interior point.
        let hex = ToricDiagram::from_points([
            ((0, 0), 1),
            ((1, 0), 1),
            ((0, 1), 1),
            ((2, 1), 1),
            ((1, 2), 1),
            ((2, 2), 1),
            ((1, 1), 6),
        ]);
        let boundary = hex.boundary_points();
        assert_eq!(boundary.len(), 6);
        assert!(!boundary.contains(&(1, 1)));
        let masked = hex.support_and_boundary();
        assert_eq!(masked.multiplicity((1, 1)), 1);
        assert_eq!(masked.multiplicity((0, 0)), 1);
    }

    #[test]
    fn eq_up_to_monomial() {
        let p = poly(&[(0, 0, 1), (1, 0, 2)]);
        let shifted = p.shift((3, -2));
        assert!(p.eq_up_to_unit_monomial(&shifted));
        assert!(p.eq_up_to_unit_monomial(&shifted.neg()));
        assert!(!p.eq_up_to_unit_monomial(&poly(&[(0, 0, 1), (1, 0, 3)])));
    }

    #[test]
    fn text_roundtrip() {
        let hex = ToricDiagram::from_points([((0, 0), 1), ((1, 1), 6)]);
        let text = hex.to_text();
        assert_eq!(ToricDiagram::from_text(&text).unwrap(), hex);
        assert!(ToricDiagram::from_text("1 2").is_err());
    }
}
