//! Lattices in phase space `R^{2d}` and their symplectic structure.
//!
//! A lattice is `Λ = M Z^{2d}` for an invertible generator `M`; its volume is
//! `|det M|`.  Phase-space points are split as `λ = (x, ω)` with `x, ω ∈ R^d`,
//! and the standard symplectic form is `σ(λ, λ') = x·ω' − ω·x' = λ · (J λ')`
//! with `J = [[0, I], [-I, 0]]`.  Alongside the dual lattice `Λ⊥ = M^{-T}Z^{2d}`
//! this module exposes the adjoint lattice `Λ° = J M^{-T} Z^{2d}`, the index
//! set of the frame operator's Fourier series.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::Error;
use crate::Result;

/// Default cap on enumerated or gridded point counts.
pub const DEFAULT_POINT_CAP: u64 = 10_000_000;

/// Default max-norm tolerance for symplectic residuals.
pub const SYMPLECTIC_TOL: f64 = 1e-9;

/// Default radius used when comparing two lattices as point sets.
pub const POINT_SET_RADIUS: f64 = 5.0;

/// Default coordinate tolerance for point-set comparison.
pub const POINT_SET_TOL: f64 = 1e-10;

/// A point `λ = (x, ω)` in phase space `R^d × R^d`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseSpacePoint {
    pub x: Vec<f64>,
    pub omega: Vec<f64>,
}

impl PhaseSpacePoint {
    /// Builds a point from split coordinates; both halves must share a length.
    pub fn new(x: Vec<f64>, omega: Vec<f64>) -> Result<Self> {
        if x.len() != omega.len() || x.is_empty() {
            return Err(Error::DimensionMismatch(format!(
                "phase-space point needs equal nonempty halves, got {} and {}",
                x.len(),
                omega.len()
            )));
        }
        if x.iter().chain(&omega).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("phase-space point coordinate".into()));
        }
        Ok(Self { x, omega })
    }

    /// Convenience constructor for `d = 1`.
    pub fn new_1d(x: f64, omega: f64) -> Self {
        Self { x: vec![x], omega: vec![omega] }
    }

    /// Builds a point from a flat vector `(x_1..x_d, ω_1..ω_d)`.
    pub fn from_flat(coords: &[f64]) -> Result<Self> {
        if coords.len() % 2 != 0 || coords.is_empty() {
            return Err(Error::DimensionMismatch(format!(
                "flat phase-space vector must have even positive length, got {}",
                coords.len()
            )));
        }
        let d = coords.len() / 2;
        Self::new(coords[..d].to_vec(), coords[d..].to_vec())
    }

    pub fn dim_d(&self) -> usize {
        self.x.len()
    }

    /// Flat coordinates `(x_1..x_d, ω_1..ω_d)`.
    pub fn flat(&self) -> Vec<f64> {
        self.x.iter().chain(&self.omega).copied().collect()
    }

    /// Euclidean norm of the full `2d`-vector.
    pub fn norm(&self) -> f64 {
        self.x
            .iter()
            .chain(&self.omega)
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            x: self.x.iter().map(|v| s * v).collect(),
            omega: self.omega.iter().map(|v| s * v).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            x: self.x.iter().zip(&other.x).map(|(a, b)| a + b).collect(),
            omega: self.omega.iter().zip(&other.omega).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scaled(-1.0)
    }
}

/// The symplectic form `σ(λ, λ') = x·ω' − ω·x'`.
pub fn symplectic_form(a: &PhaseSpacePoint, b: &PhaseSpacePoint) -> f64 {
    debug_assert_eq!(a.dim_d(), b.dim_d());
    let xw: f64 = a.x.iter().zip(&b.omega).map(|(x, w)| x * w).sum();
    let wx: f64 = a.omega.iter().zip(&b.x).map(|(w, x)| w * x).sum();
    xw - wx
}

/// The standard symplectic matrix `J = [[0, I], [-I, 0]]` of size `2d × 2d`.
pub fn standard_j(d: usize) -> DMatrix<f64> {
    let n = 2 * d;
    let mut j = DMatrix::zeros(n, n);
    for i in 0..d {
        j[(i, d + i)] = 1.0;
        j[(d + i, i)] = -1.0;
    }
    j
}

/// Result of testing whether a matrix is a scalar multiple of a symplectic
/// matrix.
#[derive(Debug, Clone, Serialize)]
pub struct SymplecticCheck {
    pub is_symplectic: bool,
    /// The positive scale `c = |det S|^{1/2d}` (present whenever `S` is
    /// invertible).
    pub scale_c: Option<f64>,
    /// Max-norm of `(S/c)ᵀ J (S/c) − J`.
    pub residual: f64,
}

/// Tests whether `S = c·S₀` for some `c > 0` and symplectic `S₀`.
///
/// The scale is recovered as `c = |det S|^{1/2d}` and the residual is the
/// max-norm of `(S/c)ᵀ J (S/c) − J`.  Matrices with negative determinant are
/// never scalar multiples of symplectic matrices; see
/// [`Lattice::symplectic_lattice_check`] for the point-set-level question.
pub fn is_symplectic_matrix(s: &DMatrix<f64>, tol: f64) -> Result<SymplecticCheck> {
    let n = s.nrows();
    if s.ncols() != n || n == 0 || n % 2 != 0 {
        return Err(Error::DimensionMismatch(format!(
            "symplectic test needs a square even-dimensional matrix, got {n}×{}",
            s.ncols()
        )));
    }
    if s.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("matrix entry".into()));
    }
    let d = n / 2;
    let det = s.clone().determinant();
    if det.abs() < 1e-300 {
        return Err(Error::SingularMatrix("determinant is zero".into()));
    }
    let c = det.abs().powf(1.0 / n as f64);
    let scaled = s / c;
    let j = standard_j(d);
    let resid_mat = scaled.transpose() * &j * &scaled - &j;
    let residual = resid_mat.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(SymplecticCheck { is_symplectic: residual <= tol, scale_c: Some(c), residual })
}

/// A full-rank lattice `Λ = M Z^{2d}` in phase space.
#[derive(Debug, Clone)]
pub struct Lattice {
    d: usize,
    generator: DMatrix<f64>,
    volume: f64,
}

impl Lattice {
    /// Wraps a generator matrix; it must be square of even size and invertible.
    pub fn new(generator: DMatrix<f64>) -> Result<Self> {
        let n = generator.nrows();
        if generator.ncols() != n || n == 0 || n % 2 != 0 {
            return Err(Error::DimensionMismatch(format!(
                "lattice generator must be square of even size, got {n}×{}",
                generator.ncols()
            )));
        }
        if generator.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("lattice generator entry".into()));
        }
        let det = generator.clone().determinant();
        if det.abs() < 1e-300 {
            return Err(Error::SingularMatrix("lattice generator".into()));
        }
        Ok(Self { d: n / 2, generator, volume: det.abs() })
    }

    /// Builds a generator from row slices (used by the `matrix:PATH` input).
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(
                "generator rows must form a square matrix".into(),
            ));
        }
        let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        Self::new(m)
    }

    /// Square lattice of the given volume in `d = 1`: `√v · Z²`.
    pub fn square(volume: f64) -> Result<Self> {
        if !(volume.is_finite() && volume > 0.0) {
            return Err(Error::InvalidConfig(format!("volume must be positive, got {volume}")));
        }
        Self::new(DMatrix::identity(2, 2) * volume.sqrt())
    }

    /// Hexagonal lattice of the given volume in `d = 1`:
    /// `c·[[1, 1/2], [0, √3/2]]` with `c = √(2v/√3)`.
    pub fn hexagonal(volume: f64) -> Result<Self> {
        if !(volume.is_finite() && volume > 0.0) {
            return Err(Error::InvalidConfig(format!("volume must be positive, got {volume}")));
        }
        let c = (2.0 * volume / 3.0f64.sqrt()).sqrt();
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 3.0f64.sqrt() / 2.0]) * c;
        Self::new(m)
    }

    pub fn dim_d(&self) -> usize {
        self.d
    }

    pub fn generator(&self) -> &DMatrix<f64> {
        &self.generator
    }

    /// Covolume `|det M|`, cached at construction.
    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// Redundancy `vol(Λ)^{-1/d}`.
    pub fn redundancy(&self) -> f64 {
        self.volume.powf(-1.0 / self.d as f64)
    }

    /// The lattice point `M k`.
    pub fn point(&self, k: &[i64]) -> PhaseSpacePoint {
        debug_assert_eq!(k.len(), 2 * self.d);
        let n = 2 * self.d;
        let mut flat = vec![0.0; n];
        for (i, f) in flat.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (j, kj) in k.iter().enumerate() {
                acc += self.generator[(i, j)] * *kj as f64;
            }
            *f = acc;
        }
        PhaseSpacePoint::from_flat(&flat).expect("generator rows are finite")
    }

    /// The lattice scaled by `s` (generator `s·M`).
    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::new(&self.generator * s)
    }

    /// Dual lattice `Λ⊥ = M^{-T} Z^{2d}`.
    pub fn dual(&self) -> Result<Self> {
        let inv = self
            .generator
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::SingularMatrix("lattice generator".into()))?;
        Self::new(inv.transpose())
    }

    /// Adjoint lattice `Λ° = J M^{-T} Z^{2d}`.
    pub fn adjoint(&self) -> Result<Self> {
        let dual = self.dual()?;
        Self::new(standard_j(self.d) * dual.generator)
    }

    /// Matrix-level symplectic test of the generator as given.
    pub fn symplectic_matrix_check(&self, tol: f64) -> Result<SymplecticCheck> {
        is_symplectic_matrix(&self.generator, tol)
    }

    /// Point-set-level symplectic test: the generator is reduced modulo the
    /// orientation of its basis before testing.
    ///
    /// Negating one basis vector leaves the point set unchanged but flips the
    /// determinant's sign, and no negative-determinant matrix is a multiple of
    /// a symplectic one; the test therefore canonicalises to a positive
    /// determinant first.  In `d = 1` every lattice passes.  For `d > 1` a
    /// pathological basis of a symplectic lattice can still fail (the test
    /// does not search all unimodular basis changes).
    pub fn symplectic_lattice_check(&self, tol: f64) -> Result<SymplecticCheck> {
        let det = self.generator.clone().determinant();
        if det >= 0.0 {
            return is_symplectic_matrix(&self.generator, tol);
        }
        let n = 2 * self.d;
        let mut flipped = self.generator.clone();
        for i in 0..n {
            flipped[(i, n - 1)] = -flipped[(i, n - 1)];
        }
        is_symplectic_matrix(&flipped, tol)
    }

    /// All lattice points with `‖M k‖ ≤ radius`, in lexicographic order of the
    /// integer coordinates `k`.  The origin is always included.
    ///
    /// Fails if the number of points would exceed `cap`.
    pub fn enumerate_points(&self, radius: f64, cap: u64) -> Result<Vec<LatticePoint>> {
        if !(radius.is_finite() && radius >= 0.0) {
            return Err(Error::NonFinite("enumeration radius".into()));
        }
        let n = 2 * self.d;
        let inv = self
            .generator
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::SingularMatrix("lattice generator".into()))?;
        // |k_i| = |⟨row_i(M⁻¹), λ⟩| ≤ ‖row_i(M⁻¹)‖·radius on the ball.
        let slack = 1e-9 * radius.max(1.0);
        let mut bounds = vec![0i64; n];
        for i in 0..n {
            let row_norm: f64 = (0..n).map(|j| inv[(i, j)] * inv[(i, j)]).sum::<f64>().sqrt();
            bounds[i] = (row_norm * radius + slack).floor() as i64;
        }
        // Coarse a-priori estimate: ball volume over covolume, with margin.
        let ball = ball_volume(n, radius + slack);
        let estimate = (ball / self.volume).ceil() as u64 + 1;
        if estimate / 4 > cap {
            return Err(Error::PointCapExceeded { needed: estimate, cap });
        }
        let mut out = Vec::new();
        let mut k = vec![0i64; n];
        enumerate_box(&mut k, 0, &bounds, &mut |k| {
            let p = self.point(k);
            if p.norm() <= radius + slack {
                out.push(LatticePoint { index: k.to_vec(), point: p });
            }
            if out.len() as u64 > cap {
                return Err(Error::PointCapExceeded { needed: out.len() as u64, cap });
            }
            Ok(())
        })?;
        Ok(out)
    }

    /// The grid `{ M·(j/res) : j ∈ {0..res-1}^{2d} }` covering one fundamental
    /// domain, in lexicographic order of `j`.
    pub fn fundamental_domain_grid(&self, res: u32, cap: u64) -> Result<Vec<PhaseSpacePoint>> {
        if res == 0 {
            return Err(Error::InvalidConfig("grid resolution must be positive".into()));
        }
        let n = 2 * self.d;
        let total = (res as u64).checked_pow(n as u32).unwrap_or(u64::MAX);
        if total > cap {
            return Err(Error::PointCapExceeded { needed: total, cap });
        }
        let mut out = Vec::with_capacity(total as usize);
        let mut j = vec![0u32; n];
        loop {
            let frac: Vec<f64> = j.iter().map(|v| *v as f64 / res as f64).collect();
            let mut flat = vec![0.0; n];
            for (i, f) in flat.iter_mut().enumerate() {
                *f = (0..n).map(|c| self.generator[(i, c)] * frac[c]).sum();
            }
            out.push(PhaseSpacePoint::from_flat(&flat)?);
            // Odometer increment, last coordinate fastest.
            let mut axis = n;
            loop {
                if axis == 0 {
                    return Ok(out);
                }
                axis -= 1;
                j[axis] += 1;
                if j[axis] < res {
                    break;
                }
                j[axis] = 0;
            }
        }
    }

    /// Whether two lattices coincide as point sets, compared inside a ball.
    ///
    /// Both lattices are enumerated within `radius` and matched pairwise
    /// within coordinate tolerance `tol`.
    pub fn same_point_set(&self, other: &Lattice, radius: f64, tol: f64) -> Result<bool> {
        if self.d != other.d {
            return Ok(false);
        }
        let a = self.enumerate_points(radius, DEFAULT_POINT_CAP)?;
        let b = other.enumerate_points(radius, DEFAULT_POINT_CAP)?;
        if a.len() != b.len() {
            return Ok(false);
        }
        let mut used = vec![false; b.len()];
        for pa in &a {
            let fa = pa.point.flat();
            let mut found = false;
            for (i, pb) in b.iter().enumerate() {
                if used[i] {
                    continue;
                }
                let fb = pb.point.flat();
                if fa.iter().zip(&fb).all(|(u, v)| (u - v).abs() <= tol) {
                    used[i] = true;
                    found = true;
                    break;
                }
            }
            if !found {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// A lattice point together with its integer coordinates.
#[derive(Debug, Clone)]
pub struct LatticePoint {
    pub index: Vec<i64>,
    pub point: PhaseSpacePoint,
}

/// Volume of the Euclidean ball of the given radius in `n` dimensions.
fn ball_volume(n: usize, radius: f64) -> f64 {
    // vol = π^{n/2} r^n / Γ(n/2 + 1); n is even here so Γ is a factorial.
    let half = n / 2;
    let mut gamma = 1.0;
    for k in 1..=half {
        gamma *= k as f64;
    }
    std::f64::consts::PI.powi(half as i32) * radius.powi(n as i32) / gamma
}

/// Lexicographic walk over the box `|k_i| ≤ bounds[i]`.
fn enumerate_box(
    k: &mut Vec<i64>,
    axis: usize,
    bounds: &[i64],
    visit: &mut impl FnMut(&[i64]) -> Result<()>,
) -> Result<()> {
    if axis == bounds.len() {
        return visit(k);
    }
    for v in -bounds[axis]..=bounds[axis] {
        k[axis] = v;
        enumerate_box(k, axis + 1, bounds, visit)?;
    }
    Ok(())
}
