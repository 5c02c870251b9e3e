//! Sharp Gabor frame bounds over phase-space lattices.
//!
//! A Gabor system is built from a window `g` and a lattice `Λ ⊂ R^{2d}` by
//! applying symmetric time-frequency shifts `ρ(λ)` to `g`.  For lattices whose
//! density is an even integer, the frame operator diagonalises as a Fourier
//! series in phase space: its symbol is the real-valued, `Λ`-periodic function
//!
//! ```text
//! φ(z) = vol(Λ)^{-1} · Σ_{λ° ∈ Λ°}  ⟨g, ρ(λ°) g⟩ · e^{2πi σ(λ°, z)}
//! ```
//!
//! summed over the adjoint lattice `Λ°`, with `σ` the standard symplectic
//! form.  The sharp frame bounds are the essential extrema of `φ`.  This crate
//! computes that series from quadrature-evaluated ambiguity functions, bounds
//! its truncation tail, and extracts the extrema on refined fundamental-domain
//! grids; an independent finite-section (Gram matrix) route covers lattices the
//! series route does not.  The same machinery verifies the vanishing identity
//! that forces `φ(0) = 0` — hence a vanishing lower bound — for odd windows on
//! symplectic lattices of density `2^d`.
//!
//! Module map:
//! - [`lattice`]: lattices in `R^{2d}`, symplectic form, dual/adjoint lattices,
//!   point enumeration, fundamental-domain grids.
//! - [`windows`]: normalised Hermite, Gaussian and sampled windows with parity
//!   and decay metadata.
//! - [`phase_space`]: STFT, ambiguity and Wigner transforms, gridded symplectic
//!   Fourier transform, phase-space dilation.
//! - [`summation`]: tail-controlled lattice sums, Poisson-summation checks, the
//!   vanishing-sum check, pointwise evaluation of `φ`.
//! - [`frame_bounds`]: the Fourier-series bound computation, the Gram
//!   finite-section bound computation, separable cross-check, the no-frame
//!   verifier, lattice-shape scans.
//! - [`runner`]: config-driven entry points shared by the CLI.

pub mod error;
pub mod frame_bounds;
pub mod lattice;
pub mod phase_space;
pub mod quadrature;
pub mod runner;
pub mod summation;
pub mod windows;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
