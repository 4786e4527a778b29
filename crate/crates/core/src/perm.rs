//! Permutations on `{0..n}` given by their cycle decompositions.
//!
//! Products use the right-action convention throughout the crate:
//! `a.then(b)` maps `x` to `b(a(x))`, so the dessin relation
//! σ_B σ_W σ_∞ = Id reads "apply σ_B, then σ_W, then σ_∞".

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PermError {
    #[error("cycles must partition 0..{n}: element {elem} {problem}")]
    NotAPartition {
        n: usize,
        elem: usize,
        problem: &'static str,
    },
}

/// A permutation of `{0, 1, .., n-1}` stored by images.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Perm {
    image: Vec<usize>,
}

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm {
            image: (0..n).collect(),
        }
    }

    /// Build from a cycle decomposition. Every element of `0..n` must occur
    /// exactly once across the cycles (fixed points as singleton cycles).
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Self, PermError> {
        let mut image = vec![usize::MAX; n];
        let mut seen = vec![false; n];
        for cycle in cycles {
            for (k, &x) in cycle.iter().enumerate() {
                if x >= n {
                    return Err(PermError::NotAPartition {
                        n,
                        elem: x,
                        problem: "is out of range",
                    });
                }
                if seen[x] {
                    return Err(PermError::NotAPartition {
                        n,
                        elem: x,
                        problem: "occurs twice",
                    });
                }
                seen[x] = true;
                image[x] = cycle[(k + 1) % cycle.len()];
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(PermError::NotAPartition {
                n,
                elem: missing,
                problem: "is missing",
            });
        }
        Ok(Perm { image })
    }

    pub fn degree(&self) -> usize {
        self.image.len()
    }

    pub fn apply(&self, x: usize) -> usize {
        self.image[x]
    }

    pub fn inverse(&self) -> Perm {
        let mut image = vec![0; self.image.len()];
        for (x, &y) in self.image.iter().enumerate() {
            image[y] = x;
        }
        Perm { image }
    }

    /// Right-action product: `self.then(other)` sends x to other(self(x)).
    pub fn then(&self, other: &Perm) -> Perm {
        assert_eq!(self.degree(), other.degree());
        Perm {
            image: self.image.iter().map(|&y| other.apply(y)).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(x, &y)| x == y)
    }

    /// Cycle decomposition, each cycle rotated to start at its smallest
    /// element, cycles sorted by that element. Fixed points included.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut x = self.apply(start);
            while x != start {
                seen[x] = true;
                cycle.push(x);
                x = self.apply(x);
            }
            out.push(cycle);
        }
        out
    }

    /// Multiset of cycle lengths in ascending order.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut lens: Vec<usize> = self.cycles().iter().map(|c| c.len()).collect();
        lens.sort_unstable();
        lens
    }

    pub fn cycle_count(&self) -> usize {
        self.cycles().len()
    }

    /// Conjugate by `g`: returns g⁻¹ · self · g (right-action order), the
    /// permutation acting on relabelled points x ↦ g(x).
    pub fn conjugate(&self, g: &Perm) -> Perm {
        g.inverse().then(self).then(g)
    }

    /// True when the group generated by `perms` acts transitively on 0..n.
    pub fn transitive(perms: &[&Perm]) -> bool {
        let n = match perms.first() {
            Some(p) => p.degree(),
            None => return true,
        };
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(x) = stack.pop() {
            for p in perms {
                for y in [p.apply(x), p.inverse().apply(x)] {
                    if !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        seen.iter().all(|&s| s)
    }
}
