//! Numerical sampling of the curve P(z,w) = 0 and its two real
//! projections: the amoeba (log|z|, log|w|) and the coamoeba
//! (arg z, arg w). Points come from slicing the curve over a grid of z
//! values (and again with the roles swapped), solving the resulting
//! univariate polynomial by simultaneous (Durand-Kerner) iteration.

use crate::poly::{Exp, LaurentPoly2};
use num::complex::Complex64;
use num::ToPrimitive;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum AmoebaError {
    #[error("polynomial is a monomial; the curve misses the torus (C*)^2")]
    Degenerate,
    #[error("coefficient override targets ({0}, {1}) outside the support")]
    UnknownPoint(i64, i64),
}

/// A Laurent polynomial with complex coefficients, as sampled geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPoly {
    terms: BTreeMap<Exp, Complex64>,
}

impl ComplexPoly {
    pub fn from_integer_poly(p: &LaurentPoly2) -> Self {
        ComplexPoly {
            terms: p
                .terms()
                .map(|(&e, c)| (e, Complex64::new(c.to_f64().unwrap_or(0.0), 0.0)))
                .collect(),
        }
    }

    /// Replace the coefficient at a support point.
    pub fn with_override(mut self, exp: Exp, c: Complex64) -> Result<Self, AmoebaError> {
        match self.terms.get_mut(&exp) {
            Some(slot) => {
                *slot = c;
                Ok(self)
            }
            None => Err(AmoebaError::UnknownPoint(exp.0, exp.1)),
        }
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn eval(&self, z: Complex64, w: Complex64) -> Complex64 {
        self.terms
            .iter()
            .map(|(&(a, b), &c)| c * z.powi(a as i32) * w.powi(b as i32))
            .sum()
    }

    /// Largest monomial magnitude at (z, w): the scale for residuals.
    pub fn max_monomial(&self, z: Complex64, w: Complex64) -> f64 {
        self.terms
            .iter()
            .map(|(&(a, b), &c)| (c * z.powi(a as i32) * w.powi(b as i32)).norm())
            .fold(0.0, f64::max)
    }

    /// Swap the roles of z and w.
    pub fn swapped(&self) -> Self {
        ComplexPoly {
            terms: self.terms.iter().map(|(&(a, b), &c)| ((b, a), c)).collect(),
        }
    }

    /// Coefficients of the univariate polynomial in w obtained by fixing z
    /// and clearing the denominator w^{-min}; ascending in degree.
    fn w_fiber(&self, z: Complex64) -> Vec<Complex64> {
        let min_b = self.terms.keys().map(|e| e.1).min().unwrap();
        let max_b = self.terms.keys().map(|e| e.1).max().unwrap();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); (max_b - min_b + 1) as usize];
        for (&(a, b), &c) in &self.terms {
            coeffs[(b - min_b) as usize] += c * z.powi(a as i32);
        }
        coeffs
    }
}

/// Grid of z values: |log z| ranges over [−range, range] with `resolution`
/// steps, arg z over [0, 2π) with `resolution` steps.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub range: f64,
    pub resolution: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            range: 4.0,
            resolution: 200,
        }
    }
}

/// One curve point in both projections.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplePoint {
    pub rho_z: f64,
    pub rho_w: f64,
    pub phi_z: f64,
    pub phi_w: f64,
    /// |P(z,w)| relative to the largest monomial magnitude at the point.
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct CurveSamples {
    pub points: Vec<SamplePoint>,
    /// Fibers where the univariate polynomial vanished identically (the
    /// curve contains the whole fiber) and were skipped.
    pub degenerate_fibers: usize,
}

const RESIDUAL_BOUND: f64 = 1e-8;

/// Sample the curve over the grid, both by z-fibers and w-fibers, and keep
/// every root that meets the relative residual bound 1e-8. Output order is
/// canonicalized by sorting, so the cloud is deterministic.
pub fn sample_curve(p: &ComplexPoly, grid: &GridSpec) -> Result<CurveSamples, AmoebaError> {
    if p.term_count() < 2 {
        return Err(AmoebaError::Degenerate);
    }
    let mut points = Vec::new();
    let mut degenerate = 0;
    collect_fibers(p, grid, false, &mut points, &mut degenerate);
    collect_fibers(&p.swapped(), grid, true, &mut points, &mut degenerate);
    points.sort_by(|a, b| {
        (a.rho_z, a.rho_w, a.phi_z, a.phi_w)
            .partial_cmp(&(b.rho_z, b.rho_w, b.phi_z, b.phi_w))
            .unwrap()
    });
    points.dedup_by(|a, b| {
        (a.rho_z - b.rho_z).abs() < 1e-12
            && (a.rho_w - b.rho_w).abs() < 1e-12
            && (a.phi_z - b.phi_z).abs() < 1e-12
            && (a.phi_w - b.phi_w).abs() < 1e-12
    });
    Ok(CurveSamples {
        points,
        degenerate_fibers: degenerate,
    })
}

fn collect_fibers(
    p: &ComplexPoly,
    grid: &GridSpec,
    swapped: bool,
    points: &mut Vec<SamplePoint>,
    degenerate: &mut usize,
) {
    let n = grid.resolution.max(1);
    for i in 0..n {
        let rho = if n == 1 {
            0.0
        } else {
            -grid.range + 2.0 * grid.range * (i as f64) / ((n - 1) as f64)
        };
        for k in 0..n {
            let phi = 2.0 * PI * (k as f64) / (n as f64);
            let z = Complex64::from_polar(rho.exp(), phi);
            let coeffs = p.w_fiber(z);
            let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
            if scale <= 1e-14 {
                *degenerate += 1;
                continue;
            }
            for w in polynomial_roots(&coeffs) {
                if w.norm() < 1e-14 {
                    continue;
                }
                let residual = p.eval(z, w).norm() / p.max_monomial(z, w).max(1e-300);
                if residual >= RESIDUAL_BOUND {
                    continue;
                }
                let (zq, wq) = if swapped { (w, z) } else { (z, w) };
                points.push(SamplePoint {
                    rho_z: zq.norm().ln(),
                    rho_w: wq.norm().ln(),
                    phi_z: wrap_angle(zq.arg()),
                    phi_w: wrap_angle(wq.arg()),
                    residual,
                });
            }
        }
    }
}

fn wrap_angle(a: f64) -> f64 {
    let mut x = a % (2.0 * PI);
    if x < 0.0 {
        x += 2.0 * PI;
    }
    x
}

/// All roots of Σ c_k x^k = 0 by Durand-Kerner simultaneous iteration.
/// Leading/trailing coefficients that are negligible relative to the
/// largest are trimmed first (roots at 0 and infinity are not curve points
/// on the torus).
pub fn polynomial_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale <= 0.0 {
        return Vec::new();
    }
    let tol = 1e-14 * scale;
    let lo = coeffs.iter().position(|c| c.norm() > tol);
    let hi = coeffs.iter().rposition(|c| c.norm() > tol);
    let (lo, hi) = match (lo, hi) {
        (Some(lo), Some(hi)) if hi > lo => (lo, hi),
        _ => return Vec::new(),
    };
    let lead = coeffs[hi];
    let monic: Vec<Complex64> = coeffs[lo..=hi].iter().map(|c| c / lead).collect();
    let degree = monic.len() - 1;

    let eval = |x: Complex64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in monic.iter().rev() {
            acc = acc * x + c;
        }
        acc
    };
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..degree).map(|k| seed.powu(k as u32 + 1)).collect();
    for _ in 0..500 {
        let mut moved: f64 = 0.0;
        for i in 0..degree {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..degree {
                if i != j {
                    denom *= roots[i] - roots[j];
                }
            }
            if denom.norm() < 1e-280 {
                denom = Complex64::new(1e-280, 0.0);
            }
            let delta = eval(roots[i]) / denom;
            roots[i] -= delta;
            moved = moved.max(delta.norm() / (1.0 + roots[i].norm()));
        }
        if moved < 1e-13 {
            break;
        }
    }
    roots.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    roots
}

/// CSV with header "rho_z,rho_w,phi_z,phi_w,residual".
pub fn to_csv(samples: &CurveSamples) -> String {
    let mut out = String::from("rho_z,rho_w,phi_z,phi_w,residual\n");
    for p in &samples.points {
        out.push_str(&format!(
            "{:.12},{:.12},{:.12},{:.12},{:.3e}\n",
            p.rho_z, p.rho_w, p.phi_z, p.phi_w, p.residual
        ));
    }
    out
}
