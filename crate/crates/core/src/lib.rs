//! Exact-arithmetic toolkit for quivers with superpotential, the bipartite
//! torus maps (brane tilings) dual to them, and the affine toric Calabi-Yau
//! geometry both encode.
//!
//! The pipeline, end to end:
//!
//! 1. [`quiver`]: quivers with superpotential, the toric and Euler checks,
//!    and the dual bipartite map on T² ([`map`]).
//! 2. [`kasteleyn`]: sign assignment, homology-weighted adjacency matrix,
//!    exact Laurent determinant, toric diagram, and a brute-force perfect
//!    matching oracle.
//! 3. [`mutation`]: Seiberg duality / cluster mutation on the quiver,
//!    mass-term reduction, urban renewal on the map, and toric-diagram
//!    invariance checks.
//! 4. [`geometry`]: R-charge constraints, a-maximization, the isoradial
//!    (rhombic) embedding, torus periods, τ and the Klein j-invariant.
//! 5. [`dessin`]: permutation triples, passports, Riemann-Hurwitz genus.
//! 6. [`plethystics`]: exact truncated power series, plethystic
//!    exponential/logarithm.
//! 7. [`amoeba`]: numerical sampling of P(z,w)=0 into amoeba/coamoeba
//!    point clouds.
//!
//! All combinatorial and algebraic operations are exact (big integers and
//! rationals); floating point appears only in `geometry`'s optimizer and
//! embedding and in `amoeba`.

pub mod amoeba;
pub mod dessin;
pub mod fixtures;
pub mod geometry;
pub mod kasteleyn;
pub mod map;
pub mod mutation;
pub mod perm;
pub mod plethystics;
pub mod poly;
pub mod quiver;
mod snf;

pub use map::CombinatorialMap;
pub use poly::{LaurentPoly2, ToricDiagram};
pub use quiver::{Quiver, Term};
