//! Isotropic random walks on rank-2 incidence geometries and on the special
//! vertices of the C̃₂ lattice.
//!
//! The crate has three independent computational routes to the same transition
//! probabilities, which is the point: they cross-validate each other.
//!
//! * **Algebraic route** ([`hecke`]): the walk operator lives in an
//!   Iwahori–Hecke algebra over a finite Coxeter system ([`coxeter`]); n-step
//!   distributions come from exact sparse products in the `T_w` basis.
//! * **Spectral route** ([`polygon`] for rank 2, [`affine`] for C̃₂):
//!   irreducible representations, characters and multiplicities give closed
//!   character sums for the rank-2 case; Gelfand transforms and a Plancherel
//!   integral over the torus give quadrature values for the C̃₂ vertex walk,
//!   plus mixing bounds and the long-horizon return asymptote.
//! * **Brute-force route** ([`models`]): explicit finite geometries
//!   (projective planes over prime fields, symplectic quadrangles, complete
//!   bipartite digons) whose flags are walked directly — by matrix power and
//!   by seeded Monte Carlo.
//!
//! Every engine is generic over the coefficient scalar (see [`scalar::Scalar`]):
//! exact big-rational arithmetic is the default for integer thickness
//! parameters, a small exact tower ℚ(√2,√3) ([`qext::Quad23`]) carries the
//! character arithmetic, and `f64` is available for sweeps and long horizons.

pub mod affine;
pub mod coxeter;
pub mod error;
pub mod hecke;
pub mod models;
pub mod polygon;
pub mod qext;
pub mod report;
pub mod scalar;

pub use error::Error;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;

/// Exact rational scalar — the default coefficient type for integer parameters.
pub type Rational = num_rational::BigRational;

/// Exact real quadratic tower ℚ(√2,√3) — carries character arithmetic.
pub type Tower = qext::Quad23;

/// Complex double — the spectral quadrature scalar.
pub type Complex64 = num_complex::Complex<f64>;

/// Hecke-algebra element with exact rational coefficients.
pub type ExactHecke = hecke::HeckeElement<Rational>;

/// Hecke-algebra element with floating coefficients.
pub type FloatHecke = hecke::HeckeElement<f64>;

/// Walk specification with exact rational coefficients.
pub type ExactWalk = hecke::WalkSpec<Rational>;

/// Vertex-lattice distribution with exact rational coefficients.
pub type ExactLattice = affine::LatticeDistribution<Rational>;

/// Vertex-lattice distribution with floating coefficients.
pub type FloatLattice = affine::LatticeDistribution<f64>;
