//! R-charges and the shape of the torus.
//!
//! Each edge carries R ∈ (0,2) with ΣR = 2 around every node and
//! Σ(1−R) = 2 around every face (boundary incidences counted with
//! multiplicity). Maximizing a(R) = Σ(R−1)³ over that affine set picks the
//! isoradial (rhombic) embedding: every edge spans a unit-side rhombus
//! with angle 2θ at its endpoints, θ = πR/2. The embedding's periods along
//! a homology basis give the modulus τ and from it the Klein invariant,
//! normalized here as J = j/1728 so J(i) = 1.

use crate::map::{homology_weights, CombinatorialMap, MapError};
use num::complex::Complex64;
use num::{BigRational, One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::VecDeque;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("R-charge constraint system is infeasible")]
    Infeasible,
    #[error("no optimizer run reached gradient norm < 1e-10 (best {gradient_norm:.3e})")]
    Convergence { gradient_norm: f64 },
    #[error("embedding inconsistency: {0}")]
    Consistency(String),
    #[error("q-series truncation tail {tail:.3e} exceeds 1e-10")]
    Precision { tail: f64 },
    #[error(transparent)]
    Map(#[from] MapError),
}

pub const DEFAULT_SEED: u64 = 0x5EED;
const BOX_EPS: f64 = 1e-9;
const RESTARTS: usize = 32;
const MAX_ITERS: usize = 100_000;

/// Exact linear system A·R = c for the node and face constraints, with a
/// particular solution and a nullspace basis from rational elimination.
#[derive(Debug, Clone)]
pub struct ConstraintSystem {
    pub matrix: Vec<Vec<BigRational>>,
    pub rhs: Vec<BigRational>,
    /// Leading rows are node constraints; the rest are face constraints.
    pub node_rows: usize,
    pub rank: usize,
    pub particular: Vec<BigRational>,
    pub nullspace: Vec<Vec<BigRational>>,
}

impl ConstraintSystem {
    pub fn dimension(&self) -> usize {
        self.nullspace.len()
    }

    /// Largest constraint residual |A·r − c| at a floating point.
    pub fn residual(&self, r: &[f64]) -> f64 {
        self.matrix
            .iter()
            .zip(&self.rhs)
            .map(|(row, c)| {
                let lhs: f64 = row
                    .iter()
                    .zip(r)
                    .map(|(a, x)| a.to_f64().unwrap() * x)
                    .sum();
                (lhs - c.to_f64().unwrap()).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// One row per node (ΣR = 2) and per face (ΣR over boundary incidences =
/// E_f − 2), incidences counted with multiplicity.
pub fn rcharge_constraints(m: &CombinatorialMap) -> Result<ConstraintSystem, GeometryError> {
    match m.genus()? {
        1 => {}
        g => {
            return Err(GeometryError::Map(MapError::Genus {
                found: g,
                expected: 1,
            }))
        }
    }
    let e = m.edge_count();
    let mut matrix: Vec<Vec<BigRational>> = Vec::new();
    let mut rhs: Vec<BigRational> = Vec::new();
    let two = BigRational::from_integer(2.into());
    for cycle in m.black_nodes().iter().chain(m.white_nodes().iter()) {
        let mut row = vec![BigRational::zero(); e];
        for &edge in cycle {
            row[edge] += BigRational::one();
        }
        matrix.push(row);
        rhs.push(two.clone());
    }
    let node_rows = matrix.len();
    for walk in m.face_walks() {
        let mut row = vec![BigRational::zero(); e];
        for &(edge, _) in &walk {
            row[edge] += BigRational::one();
        }
        matrix.push(row);
        rhs.push(BigRational::from_integer((walk.len() as i64 - 2).into()));
    }

    let (rank, particular, nullspace) = solve_exact(&matrix, &rhs)?;
    Ok(ConstraintSystem {
        matrix,
        rhs,
        node_rows,
        rank,
        particular,
        nullspace,
    })
}

/// Gauss-Jordan over the rationals: rank, one particular solution (free
/// variables zero), and a nullspace basis (one vector per free variable).
#[allow(clippy::type_complexity)]
fn solve_exact(
    matrix: &[Vec<BigRational>],
    rhs: &[BigRational],
) -> Result<(usize, Vec<BigRational>, Vec<Vec<BigRational>>), GeometryError> {
    let rows = matrix.len();
    let cols = if rows == 0 { 0 } else { matrix[0].len() };
    let mut a: Vec<Vec<BigRational>> = matrix
        .iter()
        .zip(rhs)
        .map(|(row, c)| {
            let mut r = row.clone();
            r.push(c.clone());
            r
        })
        .collect();
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut r = 0;
    for col in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = BigRational::one() / a[r][col].clone();
        for v in a[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][col].is_zero() {
                let factor = a[i][col].clone();
                let pivot_row = a[r].clone();
                for (x, p) in a[i].iter_mut().zip(&pivot_row) {
                    *x -= &factor * p;
                }
            }
        }
        pivot_cols.push(col);
        r += 1;
        if r == rows {
            break;
        }
    }
    for row in a.iter().skip(r) {
        if !row[cols].is_zero() {
            return Err(GeometryError::Infeasible);
        }
    }
    let mut particular = vec![BigRational::zero(); cols];
    for (i, &col) in pivot_cols.iter().enumerate() {
        particular[col] = a[i][cols].clone();
    }
    let mut nullspace = Vec::new();
    for free in 0..cols {
        if pivot_cols.contains(&free) {
            continue;
        }
        let mut v = vec![BigRational::zero(); cols];
        v[free] = BigRational::one();
        for (i, &col) in pivot_cols.iter().enumerate() {
            v[col] = -a[i][free].clone();
        }
        nullspace.push(v);
    }
    Ok((r, particular, nullspace))
}

/// An R-charge assignment with its derived rhombus half-angles and the
/// achieved objective.
#[derive(Debug, Clone)]
pub struct RChargeAssignment {
    pub r: Vec<f64>,
    pub theta: Vec<f64>,
    pub objective: f64,
    pub gradient_norm: f64,
    /// Set when a second run matched the best objective at a point farther
    /// than 1e-6 away, contradicting uniqueness of the maximum.
    pub uniqueness_warning: bool,
}

fn objective(x: &[f64]) -> f64 {
    x.iter().map(|&v| (v - 1.0).powi(3)).sum()
}

struct Subspace {
    /// Orthonormal basis of the nullspace (possibly empty).
    basis: Vec<Vec<f64>>,
}

impl Subspace {
    fn project(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; v.len()];
        for b in &self.basis {
            let dot: f64 = b.iter().zip(v).map(|(a, c)| a * c).sum();
            for (o, bi) in out.iter_mut().zip(b) {
                *o += dot * bi;
            }
        }
        out
    }
}

fn orthonormalize(vectors: &[Vec<BigRational>]) -> Subspace {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let mut w: Vec<f64> = v.iter().map(|c| c.to_f64().unwrap()).collect();
        for _ in 0..2 {
            for b in &basis {
                let dot: f64 = b.iter().zip(&w).map(|(a, c)| a * c).sum();
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= dot * bi;
                }
            }
        }
        let norm: f64 = w.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 1e-12 {
            for wi in w.iter_mut() {
                *wi /= norm;
            }
            basis.push(w);
        }
    }
    Subspace { basis }
}

fn in_box(x: &[f64]) -> bool {
    x.iter().all(|&v| (BOX_EPS..=2.0 - BOX_EPS).contains(&v))
}

/// Maximize a(R) = Σ(R−1)³ over the constraint set intersected with
/// [ε, 2−ε] by projected gradient ascent with an exact cubic line search
/// and a backtracking fallback, from 32 seeded pseudo-random starts.
pub fn maximize_a(m: &CombinatorialMap) -> Result<RChargeAssignment, GeometryError> {
    maximize_a_seeded(m, DEFAULT_SEED)
}

pub fn maximize_a_seeded(
    m: &CombinatorialMap,
    seed: u64,
) -> Result<RChargeAssignment, GeometryError> {
    let cs = rcharge_constraints(m)?;
    let e = m.edge_count();
    let p: Vec<f64> = cs.particular.iter().map(|c| c.to_f64().unwrap()).collect();
    let sub = orthonormalize(&cs.nullspace);

    // Affine point closest to the box centre R = 1.
    let center: Vec<f64> = {
        let shift: Vec<f64> = (0..e).map(|i| 1.0 - p[i]).collect();
        let proj = sub.project(&shift);
        (0..e).map(|i| p[i] + proj[i]).collect()
    };
    if !in_box(&center) {
        return Err(GeometryError::Consistency(
            "no interior feasible starting point found".into(),
        ));
    }
    if sub.basis.is_empty() {
        let r = center;
        let theta = r.iter().map(|&v| PI * v / 2.0).collect();
        return Ok(RChargeAssignment {
            objective: objective(&r),
            gradient_norm: 0.0,
            uniqueness_warning: false,
            r,
            theta,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut runs: Vec<(Vec<f64>, f64, f64)> = Vec::new();
    for _ in 0..RESTARTS {
        let mut x = random_interior_start(&center, &sub, e, &mut rng);
        let mut grad_norm = f64::INFINITY;
        for iter in 0..MAX_ITERS {
            let g: Vec<f64> = x.iter().map(|&v| 3.0 * (v - 1.0) * (v - 1.0)).collect();
            let d = sub.project(&g);
            grad_norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
            if grad_norm < 1e-12 {
                break;
            }
            let mut t_box = f64::INFINITY;
            for i in 0..e {
                if d[i] > 1e-300 {
                    t_box = t_box.min((2.0 - BOX_EPS - x[i]) / d[i]);
                } else if d[i] < -1e-300 {
                    t_box = t_box.min((BOX_EPS - x[i]) / d[i]);
                }
            }
            if !t_box.is_finite() {
                t_box = 1.0;
            }
            t_box = t_box.max(0.0);
            let t = line_search(&x, &d, t_box);
            if t <= 0.0 {
                break;
            }
            for i in 0..e {
                x[i] += t * d[i];
            }
            if iter % 512 == 511 {
                // Counter f64 drift off the affine set.
                let shift: Vec<f64> = (0..e).map(|i| x[i] - p[i]).collect();
                let proj = sub.project(&shift);
                for i in 0..e {
                    x[i] = (p[i] + proj[i]).clamp(BOX_EPS, 2.0 - BOX_EPS);
                }
            }
        }
        runs.push((x.clone(), objective(&x), grad_norm));
    }

    // Best objective; ties resolved toward the lexicographically smallest R.
    runs.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap()
            .then_with(|| a.0.partial_cmp(&b.0).unwrap())
    });
    let (best_x, best_obj, best_grad) = runs[0].clone();
    if best_grad >= 1e-10 {
        return Err(GeometryError::Convergence {
            gradient_norm: best_grad,
        });
    }
    let uniqueness_warning = runs.iter().any(|(x, obj, grad)| {
        *grad < 1e-10
            && (best_obj - obj).abs() <= 1e-9
            && x.iter().zip(&best_x).any(|(a, b)| (a - b).abs() > 1e-6)
    });
    let residual = cs.residual(&best_x);
    if residual > 1e-9 {
        return Err(GeometryError::Consistency(format!(
            "constraint residual {:.3e} after optimization",
            residual
        )));
    }
    let theta = best_x.iter().map(|&v| PI * v / 2.0).collect();
    Ok(RChargeAssignment {
        r: best_x,
        theta,
        objective: best_obj,
        gradient_norm: best_grad,
        uniqueness_warning,
    })
}

fn random_interior_start(
    center: &[f64],
    sub: &Subspace,
    e: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    loop {
        let coords: Vec<f64> = (0..sub.basis.len())
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect();
        let mut step = vec![0.0; e];
        for (b, &u) in sub.basis.iter().zip(&coords) {
            for (s, bi) in step.iter_mut().zip(b) {
                *s += u * bi;
            }
        }
        let mut scale = 1.0;
        while scale > 1e-6 {
            let cand: Vec<f64> = (0..e).map(|i| center[i] + scale * step[i]).collect();
            if in_box(&cand) {
                return cand;
            }
            scale *= 0.5;
        }
    }
}

/// Maximize φ(t) = a(x + t·d) over [0, t_box]. φ is a cubic in t, so its
/// stationary points are roots of a quadratic; backtracking halving is the
/// fallback when no candidate improves.
fn line_search(x: &[f64], d: &[f64], t_box: f64) -> f64 {
    let base = objective(x);
    let eval = |t: f64| -> f64 {
        x.iter()
            .zip(d)
            .map(|(&xi, &di)| (xi - 1.0 + t * di).powi(3))
            .sum()
    };
    let mut candidates: Vec<f64> = vec![t_box];
    let a: f64 = d.iter().map(|&di| di * di * di).sum::<f64>() * 3.0;
    let b: f64 = x
        .iter()
        .zip(d)
        .map(|(&xi, &di)| di * di * (xi - 1.0))
        .sum::<f64>()
        * 6.0;
    let c: f64 = x
        .iter()
        .zip(d)
        .map(|(&xi, &di)| di * (xi - 1.0) * (xi - 1.0))
        .sum::<f64>()
        * 3.0;
    if a.abs() > 1e-300 {
        let disc = b * b - 4.0 * a * c;
        if disc >= 0.0 {
            let s = disc.sqrt();
            for root in [(-b - s) / (2.0 * a), (-b + s) / (2.0 * a)] {
                if root > 0.0 && root <= t_box {
                    candidates.push(root);
                }
            }
        }
    } else if b.abs() > 1e-300 {
        let root = -c / b;
        if root > 0.0 && root <= t_box {
            candidates.push(root);
        }
    }
    let mut best_t = 0.0;
    let mut best_gain = 0.0;
    for &t in &candidates {
        let gain = eval(t) - base;
        if gain > best_gain {
            best_gain = gain;
            best_t = t;
        }
    }
    if best_t > 0.0 {
        return best_t;
    }
    let mut t = t_box.min(1.0);
    for _ in 0..80 {
        if t <= 0.0 {
            break;
        }
        if eval(t) > base {
            return t;
        }
        t *= 0.5;
    }
    0.0
}

// --- Isoradial embedding and periods --------------------------------------

/// Rhombic-embedding periods along the two homology basis cycles.
///
/// Edge directions are propagated from an arbitrary seed using the
/// clockwise rotation systems: consecutive edges around any node differ by
/// −(θ_cur + θ_next). The node and face angle sums forced by the R-charge
/// constraints make the propagation consistent; closure is checked on
/// every relation (including the ones closing homology cycles).
pub fn isoradial_periods(
    m: &CombinatorialMap,
    r: &[f64],
) -> Result<(Complex64, Complex64), GeometryError> {
    let cs = rcharge_constraints(m)?;
    let residual = cs.residual(r);
    if residual > 1e-9 {
        return Err(GeometryError::Consistency(format!(
            "R-charges violate constraints by {:.3e}",
            residual
        )));
    }
    let e = m.edge_count();
    let theta: Vec<f64> = r.iter().map(|&v| PI * v / 2.0).collect();
    let length: Vec<f64> = theta.iter().map(|&t| 2.0 * t.cos()).collect();

    let mut relations: Vec<(usize, usize, f64)> = Vec::new();
    for cycle in m.black_nodes().iter().chain(m.white_nodes().iter()) {
        for i in 0..cycle.len() {
            let cur = cycle[i];
            let next = cycle[(i + 1) % cycle.len()];
            relations.push((cur, next, -(theta[cur] + theta[next])));
        }
    }
    let mut adjacency: Vec<Vec<(usize, f64)>> = vec![Vec::new(); e];
    for &(from, to, shift) in &relations {
        adjacency[from].push((to, shift));
        adjacency[to].push((from, -shift));
    }
    let mut phi = vec![f64::NAN; e];
    phi[0] = 0.0;
    let mut queue = VecDeque::from([0usize]);
    while let Some(cur) = queue.pop_front() {
        for &(next, shift) in &adjacency[cur] {
            if phi[next].is_nan() {
                phi[next] = phi[cur] + shift;
                queue.push_back(next);
            }
        }
    }
    if phi.iter().any(|v| v.is_nan()) {
        return Err(GeometryError::Map(MapError::Disconnected));
    }
    let wrap = |x: f64| -> f64 {
        let mut y = x % (2.0 * PI);
        if y > PI {
            y -= 2.0 * PI;
        }
        if y < -PI {
            y += 2.0 * PI;
        }
        y
    };
    let mut max_dev: f64 = 0.0;
    for &(from, to, shift) in &relations {
        max_dev = max_dev.max(wrap(phi[to] - phi[from] - shift).abs());
    }
    if max_dev > 1e-6 {
        return Err(GeometryError::Consistency(format!(
            "angle propagation fails closure by {:.3e}",
            max_dev
        )));
    }

    let embed = |edge: usize| -> Complex64 { Complex64::from_polar(length[edge], phi[edge]) };
    for boundary in m.face_boundaries() {
        let total: Complex64 = boundary
            .iter()
            .enumerate()
            .map(|(edge, &cnt)| embed(edge) * cnt as f64)
            .sum();
        if total.norm() > 1e-6 {
            return Err(GeometryError::Consistency(format!(
                "face fails to close by {:.3e}",
                total.norm()
            )));
        }
    }

    let hw = homology_weights(m)?;
    let period = |cycle: &[i64]| -> Complex64 {
        cycle
            .iter()
            .enumerate()
            .map(|(edge, &cnt)| embed(edge) * cnt as f64)
            .sum()
    };
    Ok((period(&hw.basis_cycles[0]), period(&hw.basis_cycles[1])))
}

/// τ = ω2/ω1 normalized to the upper half plane (conjugating if needed).
pub fn torus_modulus(omega1: Complex64, omega2: Complex64) -> Result<Complex64, GeometryError> {
    if omega1.norm() < 1e-12 {
        return Err(GeometryError::Consistency("vanishing period".into()));
    }
    let mut tau = omega2 / omega1;
    if !tau.is_finite() || tau.im.abs() < 1e-12 {
        return Err(GeometryError::Consistency(format!(
            "degenerate modulus {}",
            tau
        )));
    }
    if tau.im < 0.0 {
        tau = tau.conj();
    }
    Ok(tau)
}

/// Gauss reduction by T: τ→τ+1 and S: τ→−1/τ into the fundamental domain
/// |Re τ| ≤ 1/2, |τ| ≥ 1 (ties: the Re = −1/2 edge, and Re ≤ 0 on |τ| = 1).
pub fn tau_reduce(tau: Complex64) -> Complex64 {
    assert!(tau.im > 0.0, "tau must be in the upper half plane");
    let shift = |t: &mut Complex64| {
        // Re into [-1/2, 1/2); floor avoids oscillation at the half-edges.
        t.re -= (t.re + 0.5).floor();
    };
    let mut t = tau;
    for _ in 0..4096 {
        shift(&mut t);
        if t.norm_sqr() < 1.0 - 1e-12 {
            t = -t.inv();
        } else {
            break;
        }
    }
    // Boundary conventions, with slack for accumulated float noise: points
    // on the unit circle go to the Re <= 0 arc, and Re = +1/2 to -1/2.
    if (t.norm_sqr() - 1.0).abs() < 1e-9 && t.re > 1e-12 {
        t = -t.inv();
        shift(&mut t);
    }
    if (t.re - 0.5).abs() < 1e-9 {
        t.re = -0.5;
    }
    t
}

const Q_SERIES_TERMS: usize = 64;

fn divisor_power_sum(n: u64, k: u32) -> f64 {
    let mut total = 0.0;
    for d in 1..=n {
        if n.is_multiple_of(d) {
            total += (d as f64).powi(k as i32);
        }
    }
    total
}

/// Klein invariant via Eisenstein q-series truncated at n = 64, after
/// internal reduction to the fundamental domain. Returns (j, J = j/1728).
pub fn klein_j(tau: Complex64) -> Result<(Complex64, Complex64), GeometryError> {
    let t = tau_reduce(tau);
    let q = (Complex64::new(0.0, 2.0 * PI) * t).exp();
    let tail =
        504.0 * ((Q_SERIES_TERMS + 1) as f64).powi(6) * q.norm().powi(Q_SERIES_TERMS as i32 + 1)
            / (1.0 - q.norm()).max(1e-3);
    if tail > 1e-10 {
        return Err(GeometryError::Precision { tail });
    }
    let mut e4 = Complex64::new(1.0, 0.0);
    let mut e6 = Complex64::new(1.0, 0.0);
    let mut q_pow = Complex64::new(1.0, 0.0);
    for n in 1..=Q_SERIES_TERMS as u64 {
        q_pow *= q;
        e4 += 240.0 * divisor_power_sum(n, 3) * q_pow;
        e6 -= 504.0 * divisor_power_sum(n, 5) * q_pow;
    }
    let e4_cubed = e4 * e4 * e4;
    let disc = e4_cubed - e6 * e6;
    let j = 1728.0 * e4_cubed / disc;
    Ok((j, j / 1728.0))
}

/// Periods, modulus, reduced modulus and Klein invariant in one record.
#[derive(Debug, Clone)]
pub struct ModularData {
    pub omega1: Complex64,
    pub omega2: Complex64,
    pub tau: Complex64,
    pub tau_reduced: Complex64,
    pub j: Complex64,
    pub j_normalized: Complex64,
}

pub fn modular_data(m: &CombinatorialMap, r: &[f64]) -> Result<ModularData, GeometryError> {
    let (omega1, omega2) = isoradial_periods(m, r)?;
    let tau = torus_modulus(omega1, omega2)?;
    let tau_reduced = tau_reduce(tau);
    let (j, j_normalized) = klein_j(tau)?;
    Ok(ModularData {
        omega1,
        omega2,
        tau,
        tau_reduced,
        j,
        j_normalized,
    })
}
