//! Combinatorics of tight contact structures over a fixed triangulation.
//!
//! The crate walks the whole pipeline from a triangulated 3-manifold down to
//! the finite generating data of the structures it can carry:
//!
//! 1. [`tri`] — triangulations of (possibly singular) closed oriented
//!    3-manifolds with face gluings, and their derived skeleta.
//! 2. [`dividing`] — dividing sets as non-crossing chord diagrams on the
//!    triangle faces, relative Thurston–Bennequin numbers, and the global
//!    `TB` functional.
//! 3. [`normalize`] — TB-increasing edge-isotopy (bypass) moves driving a
//!    dividing set to its normal form, then packing of parallel arc families
//!    into fibered prisms.
//! 4. [`branched`] — abstract branched surfaces with fibered-neighborhood
//!    semantics: assembly from prisms, validation, and boundary amputation.
//! 5. [`diophantine`] — the branch equations `x_i = x_j + x_k` and the
//!    Hilbert basis of their nonnegative solution monoid, with an exhaustive
//!    box-enumeration oracle.
//! 6. [`carried`] — reconstruction of the surface carried by a weight
//!    vector: components, Euler characteristic, orientability, and the
//!    torus / Klein bottle verdict.
//! 7. [`lutz`] — the weight calculus of generalized Lutz modifications:
//!    decomposition over the Hilbert basis, derived torus generators with
//!    π-twist base offsets, and finite-generation cover checks.
//!
//! File formats (`.tri`, `.div`, `.bs`, `.eqs`, `.plan`) are line-based and
//! bit-exact under `serialize ∘ load` on canonical files; see the individual
//! modules and the `carrier` binary for the grammars.



pub mod dividing;


pub mod normalize;



pub mod tri;



// pub use dividing::{DividingSet, FaceDiagram};


// pub use normalize::{extract_prisms, normalize, PrismCoordinates};
// pub use tri::Triangulation;
