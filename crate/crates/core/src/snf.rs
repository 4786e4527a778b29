//! Smith normal form over the integers, with the left transform and its
//! inverse tracked so callers can read off kernels and quotient bases.

use num::{BigInt, Signed, Zero};

pub struct Smith {
    /// Diagonal entries of D (length min(rows, cols)), divisibility-chained.
    pub diag: Vec<BigInt>,
    pub rank: usize,
    /// U with U·M·V = D.
    pub u: Vec<Vec<BigInt>>,
    /// U⁻¹.
    pub u_inv: Vec<Vec<BigInt>>,
}

/// Compute the Smith normal form of `m` (rows × cols). Only the row
/// transform is returned; the column transform is applied but discarded.
pub fn smith_normal_form(mut m: Vec<Vec<BigInt>>) -> Smith {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut u = identity(rows);
    let mut u_inv = identity(rows);

    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pi, pj)) = pivot(&m, t) else { break };
        swap_rows(&mut m, &mut u, &mut u_inv, t, pi);
        swap_cols(&mut m, t, pj);
        loop {
            // Clear column t below/above the pivot.
            let mut dirty = false;
            for i in 0..rows {
                if i != t && !m[i][t].is_zero() {
                    let q = div_round(&m[i][t], &m[t][t]);
                    if !q.is_zero() {
                        row_op(&mut m, &mut u, &mut u_inv, i, t, &q);
                    }
                    if !m[i][t].is_zero() {
                        // Remainder smaller than pivot: swap up and restart.
                        swap_rows(&mut m, &mut u, &mut u_inv, t, i);
                        dirty = true;
                    }
                }
            }
            for j in 0..cols {
                if j != t && !m[t][j].is_zero() {
                    let q = div_round(&m[t][j], &m[t][t]);
                    if !q.is_zero() {
                        col_op(&mut m, t, j, &q);
                    }
                    if !m[t][j].is_zero() {
                        swap_cols(&mut m, t, j);
                        dirty = true;
                    }
                }
            }
            if !dirty {
                break;
            }
        }
        if m[t][t].is_negative() {
            negate_row(&mut m, &mut u, &mut u_inv, t);
        }
        t += 1;
    }

    // Enforce the divisibility chain d_i | d_{i+1}.
    let n = rows.min(cols);
    let mut changed = true;
    while changed {
        changed = false;
        for i in 0..n.saturating_sub(1) {
            if m[i + 1][i + 1].is_zero() || m[i][i].is_zero() {
                continue;
            }
            if (&m[i + 1][i + 1] % &m[i][i]).is_zero() {
                continue;
            }
            // Fold row i+1 into row i and re-reduce the 2x2 block.
            let one = BigInt::from(1);
            row_op_add(&mut m, &mut u, &mut u_inv, i, i + 1, &one);
            reduce_block(&mut m, &mut u, &mut u_inv, i);
            changed = true;
        }
    }

    for i in 0..n {
        if m[i][i].is_negative() {
            negate_row(&mut m, &mut u, &mut u_inv, i);
        }
    }
    let diag: Vec<BigInt> = (0..n).map(|i| m[i][i].clone()).collect();
    let rank = diag.iter().filter(|d| !d.is_zero()).count();
    Smith {
        diag,
        rank,
        u,
        u_inv,
    }
}

fn reduce_block(m: &mut [Vec<BigInt>], u: &mut [Vec<BigInt>], u_inv: &mut [Vec<BigInt>], t: usize) {
    // Same elimination loop as the main pass, restricted to re-clearing
    // the block starting at t after a divisibility fix-up.
    let rows = m.len();
    let cols = m[0].len();
    loop {
        let mut dirty = false;
        for i in 0..rows {
            if i != t && !m[i][t].is_zero() {
                let q = div_round(&m[i][t], &m[t][t]);
                if !q.is_zero() {
                    row_op(m, u, u_inv, i, t, &q);
                }
                if !m[i][t].is_zero() {
                    swap_rows(m, u, u_inv, t, i);
                    dirty = true;
                }
            }
        }
        for j in 0..cols {
            if j != t && !m[t][j].is_zero() {
                let q = div_round(&m[t][j], &m[t][t]);
                if !q.is_zero() {
                    col_op(m, t, j, &q);
                }
                if !m[t][j].is_zero() {
                    swap_cols(m, t, j);
                    dirty = true;
                }
            }
        }
        if !dirty {
            break;
        }
    }
    if m[t][t].is_negative() {
        negate_row(m, u, u_inv, t);
    }
}

fn identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| BigInt::from(u8::from(i == j)))
                .collect::<Vec<_>>()
        })
        .collect()
}

fn pivot(m: &[Vec<BigInt>], t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (i, row) in m.iter().enumerate().skip(t) {
        for (j, v) in row.iter().enumerate().skip(t) {
            if !v.is_zero() {
                let better = match best {
                    None => true,
                    Some((bi, bj)) => v.abs() < m[bi][bj].abs(),
                };
                if better {
                    best = Some((i, j));
                }
            }
        }
    }
    best
}

fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    // Round-to-nearest quotient keeps remainders at most |b|/2.
    let two = BigInt::from(2);
    let (q, r) = num::Integer::div_rem(a, b);
    if &r.abs() * &two > b.abs() {
        if (r >= BigInt::zero()) == (b >= &BigInt::zero()) {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

fn swap_rows(
    m: &mut [Vec<BigInt>],
    u: &mut [Vec<BigInt>],
    u_inv: &mut [Vec<BigInt>],
    a: usize,
    b: usize,
) {
    if a == b {
        return;
    }
    m.swap(a, b);
    u.swap(a, b);
    // Column swap on U⁻¹.
    for row in u_inv.iter_mut() {
        row.swap(a, b);
    }
}

fn swap_cols(m: &mut [Vec<BigInt>], a: usize, b: usize) {
    if a == b {
        return;
    }
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

/// col_j -= q * col_t (on M only; the column transform is discarded).
fn col_op(m: &mut [Vec<BigInt>], t: usize, j: usize, q: &BigInt) {
    for row in m.iter_mut() {
        let d = q * &row[t];
        row[j] -= d;
    }
}

/// row_i -= q * row_t (on M and U); U⁻¹ gets the inverse column op.
fn row_op(
    m: &mut [Vec<BigInt>],
    u: &mut [Vec<BigInt>],
    u_inv: &mut [Vec<BigInt>],
    i: usize,
    t: usize,
    q: &BigInt,
) {
    for j in 0..m[i].len() {
        let d = q * &m[t][j];
        m[i][j] -= d;
    }
    for j in 0..u[i].len() {
        let d = q * &u[t][j];
        u[i][j] -= d;
    }
    for row in u_inv.iter_mut() {
        let d = q * &row[i];
        row[t] += d;
    }
}

/// row_i += q * row_t.
fn row_op_add(
    m: &mut [Vec<BigInt>],
    u: &mut [Vec<BigInt>],
    u_inv: &mut [Vec<BigInt>],
    i: usize,
    t: usize,
    q: &BigInt,
) {
    let neg = -q.clone();
    row_op(m, u, u_inv, i, t, &neg);
}

fn negate_row(m: &mut [Vec<BigInt>], u: &mut [Vec<BigInt>], u_inv: &mut [Vec<BigInt>], t: usize) {
    for v in m[t].iter_mut() {
        *v = -v.clone();
    }
    for v in u[t].iter_mut() {
        *v = -v.clone();
    }
    for row in u_inv.iter_mut() {
        row[t] = -row[t].clone();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(m: &[&[i64]]) -> Vec<Vec<BigInt>> {
        m.iter()
            .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
            .collect()
    }

    fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
        let n = a.len();
        let k = b.len();
        let m = b[0].len();
        (0..n)
            .map(|i| {
                (0..m)
                    .map(|j| (0..k).map(|t| &a[i][t] * &b[t][j]).sum())
                    .collect()
            })
            .collect()
    }

    #[test]
    fn u_and_inverse_agree() {
        let m = big(&[&[2, 4, 4], &[-6, 6, 12], &[10, 4, 16]]);
        let s = smith_normal_form(m);
        let prod = mat_mul(&s.u, &s.u_inv);
        for (i, row) in prod.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                assert_eq!(*v, BigInt::from(u8::from(i == j)));
            }
        }
        assert_eq!(s.rank, 3);
        // Classic example: diag 2, 2, 156 up to the divisibility chain.
        assert_eq!(s.diag[0], BigInt::from(2));
        let det: BigInt = s.diag.iter().product();
        assert_eq!(det.abs(), BigInt::from(2 * 2 * 156).abs());
    }

    #[test]
    fn kernel_rows_annihilate() {
        // Rank-1 matrix: kernel of left multiplication has rank 2.
        let m = big(&[&[1, 2], &[2, 4], &[3, 6]]);
        let s = smith_normal_form(m.clone());
        assert_eq!(s.rank, 1);
        for i in s.rank..3 {
            // (row i of U) * M = 0
            let row = &s.u[i];
            let product: Vec<BigInt> = (0..m[0].len())
                .map(|col| (0..3).map(|t| &row[t] * &m[t][col]).sum())
                .collect();
            assert!(product.iter().all(|v| v.is_zero()));
        }
    }

    #[test]
    fn divisibility_chain() {
        let m = big(&[&[2, 0], &[0, 3]]);
        let s = smith_normal_form(m);
        assert_eq!(s.diag, vec![BigInt::from(1), BigInt::from(6)]);
    }
}
