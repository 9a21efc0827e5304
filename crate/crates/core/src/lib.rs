//! Computational toolkit for homological mirror symmetry of `A_{n-1}` stacky fans.
//!
//! * [`lattice`] — exact integer linear algebra (Smith form, cokernels, affine sublattices).
//! * [`fan`] — stacky fans, support functions, Picard groups, FLTZ components.
//! * [`cech`] — Čech cohomology of line bundles, degree by degree.
//! * [`equivariant`] — character-graded complexes over `k[x,y]` with `Z/n` weights `(1, n−1)`.
//! * [`graph`] — embedded graphs on the cylinder: faces, areas, Legendrian lifts, flux.
//! * [`transport`] — power diagrams and semi-discrete optimal transport on the cylinder.
//! * [`braid`] — the annular braid group acting on `K₀` and on Bondal–Thomsen labels.

pub mod braid;
pub mod cech;
pub mod equivariant;
pub mod fan;
pub mod graph;
pub mod lattice;
pub mod rational;
pub mod transport;
