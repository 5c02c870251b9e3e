//! Sharp Gabor frame bounds over phase-space lattices.
//!
//! Two independent numerical routes are provided and cross-checked:
//!
//! 1. **Fourier-series route** ([`frame_bounds_janssen`]): for a lattice whose
//!    redundancy `vol(Λ)^{-1/d}` is an even integer, the frame operator is a
//!    multiplication by the Λ-periodic symbol
//!
//!    ```text
//!    φ(z) = vol(Λ)^{-1} Σ_{λ°∈Λ°} A_g g(λ°) e^{2πi σ(λ°, z)}
//!    ```
//!
//!    in a suitable phase-space representation, so the sharp bounds are its
//!    essential extrema: `A = ess inf φ`, `B = ess sup φ`.  The symbol is
//!    evaluated exactly (up to coefficient accuracy) on fundamental-domain
//!    grids: writing `z = M(j/res)` and `λ° = J M^{-T} k` gives
//!    `σ(λ°, z) = k·j/res`, so the grid values form a sparse inverse DFT of
//!    the coefficient array and need no transcendental calls in the inner
//!    loops.  The grid is refined dyadically until both extrema settle.
//!
//! 2. **Gram finite-section route** ([`frame_bounds_gram`]): by Ron–Shen/
//!    Janssen duality the frame bounds of `(g, Λ)` equal the Riesz bounds of
//!    the adjoint system `{vol(Λ)^{-1/2} ρ(λ°) g : λ° ∈ Λ°}`, i.e. the
//!    essential spectrum edges of its bi-infinite Gram matrix.  Truncating
//!    the adjoint system to a ball gives finite sections whose extreme
//!    eigenvalues converge monotonically (by Cauchy interlacing) to the
//!    bounds: minima from above, maxima from below.  This route needs no
//!    integrality of the redundancy and serves as the fallback for general
//!    lattices.
//!
//! A third, structurally different evaluation ([`janssen_separable`]) covers
//! rectangular lattices `αZ × βZ` through short-time Fourier transform
//! samples; it must agree with the general series whenever both apply, which
//! makes it a useful independent witness.
//!
//! [`verify_no_frame`] packages the main negative result: an odd window on a
//! symplectic lattice of covolume `2^{-d}` has `φ(0) = 0`, hence a vanishing
//! lower frame bound — no Gabor frame.  [`scan_lattices`] sweeps a shear ×
//! aspect-ratio grid of lattice shapes at fixed density and reports the
//! bounds per cell.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Error;
use crate::lattice::{
    symplectic_form, Lattice, LatticePoint, PhaseSpacePoint, DEFAULT_POINT_CAP, SYMPLECTIC_TOL,
};
use crate::phase_space::{ambiguity, stft};
use crate::summation::{
    check_even_redundancy, lattice_terms, phi_series, LatticeTerms, PHI_IMAGINARY_TOL,
};
use crate::windows::{Parity, Window};
use crate::Result;

/// Default starting resolution for the symbol grid.
pub const DEFAULT_GRID_RES: usize = 64;
/// Resolution ceiling for one-dimensional windows (two phase-space axes).
pub const GRID_RES_CAP_2D: usize = 8192;
/// Resolution ceiling for two-dimensional windows (four phase-space axes).
pub const GRID_RES_CAP_4D: usize = 64;
/// Both grid extrema must move less than this between dyadic refinements.
pub const EXTREMA_MOVEMENT_TOL: f64 = 1e-6;
/// Default truncation radius for the Gram finite sections.
pub const DEFAULT_SECTION_RADIUS: f64 = 6.0;
/// Successive section extrapolants must agree to this fraction of `upper_B`
/// for the Gram route to report convergence.
pub const SECTION_MOVEMENT_REL_TOL: f64 = 1e-2;
/// `|φ(0)|` at or below this counts as a vanishing symbol.
pub const PHI_ZERO_TOL: f64 = 1e-8;
/// `lower_A ≤ this × upper_B` counts as a vanishing lower bound.
pub const LOWER_BOUND_REL_TOL: f64 = 1e-6;

/// The coefficient at the origin must equal the (unit) squared window norm.
const ORIGIN_COEFF_TOL: f64 = 1e-8;
/// Coefficients must satisfy `c(-k) = conj(c(k))` to this accuracy.
const HERMITIAN_SYMMETRY_TOL: f64 = 1e-9;
/// Grid minima below minus this (or minus the certified truncation error,
/// whichever is larger) indicate an inconsistent series.
const NEGATIVE_SYMBOL_TOL: f64 = 1e-9;
/// Smallest admissible finite section.
const MIN_SECTION_POINTS: usize = 9;
/// Nested comparison sections use these fractions of the full radius.
const INNER_SECTION_FRACTIONS: [f64; 2] = [0.64, 0.8];
/// Imaginary parts at or below this let the Gram matrix be treated as real.
const REAL_SPECTRUM_TOL: f64 = 1e-13;
/// Numerical slack allowed in the interlacing check between nested sections.
const INTERLACING_SLACK: f64 = 1e-8;
/// Admissible deviation of the covolume from `2^{-d}` in the verification.
const EXPECTED_COVOLUME_TOL: f64 = 1e-10;

/// Resolution ceiling for the symbol grid in `two_d` phase-space axes.
pub fn grid_res_cap(two_d: usize) -> usize {
    if two_d <= 2 {
        GRID_RES_CAP_2D
    } else {
        GRID_RES_CAP_4D
    }
}

/// How lattice translates combine in the series: with even redundancy all
/// phase factors are `+1`; odd integer redundancies would interleave signs
/// depending on the traversal and are not supported by the series route.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseMode {
    /// All phase factors equal `+1`.
    Trivial,
    /// Alternating signs (odd integer redundancy); rejected at construction.
    Alternating,
}

/// Extrema of the symbol over one evaluation grid, before clamping.
#[derive(Debug, Clone, Copy)]
pub struct GridExtrema {
    /// Smallest real part seen on the grid.
    pub min: f64,
    /// Largest real part seen on the grid.
    pub max: f64,
    /// Largest `|Im|` seen on the grid (must be at noise level).
    pub max_imag: f64,
}

/// Generator matrix of a lattice, row by row, as stored in result artifacts.
#[derive(Debug, Clone, Serialize)]
pub struct LatticeArtifact {
    #[serde(rename = "M")]
    pub m: Vec<Vec<f64>>,
}

impl LatticeArtifact {
    fn from_lattice(lattice: &Lattice) -> Self {
        let g = lattice.generator();
        let m = (0..g.nrows())
            .map(|i| g.row(i).iter().copied().collect())
            .collect();
        LatticeArtifact { m }
    }
}

/// Sharp-bound estimates for one Gabor system, with the diagnostics needed
/// to reproduce them.  Serializes to the stable artifact layout
/// `{method, lattice, A, B, converged, grid_res, truncation_radius}`.
#[derive(Debug, Clone, Serialize)]
pub struct FrameBoundsResult {
    /// `"janssen_series"`, `"gram_finite_section"` or `"janssen_separable"`.
    pub method: String,
    /// Generator of the lattice the bounds belong to.
    pub lattice: LatticeArtifact,
    /// Sharp lower frame bound estimate (nonnegative).
    #[serde(rename = "A")]
    pub lower_a: f64,
    /// Sharp upper frame bound estimate.
    #[serde(rename = "B")]
    pub upper_b: f64,
    /// Whether the refinement settled within its tolerance before the cap.
    pub converged: bool,
    /// Final grid resolution (0 for the section route, which uses none).
    pub grid_res: usize,
    /// Truncation radius of the series ball or section ball.
    pub truncation_radius: f64,
}

/// The coefficient side of the series route: ambiguity-function samples of
/// the window over the adjoint lattice, validated and ready to evaluate.
#[derive(Debug, Clone)]
pub struct JanssenSeries {
    lattice: Lattice,
    adjoint: Lattice,
    terms: Vec<(Vec<i64>, Complex64)>,
    coefficients: HashMap<Vec<i64>, Complex64>,
    coeff_l1: f64,
    truncation_radius: f64,
    tail_estimate: f64,
    phase_mode: PhaseMode,
    redundancy: u64,
}

impl JanssenSeries {
    /// The lattice the system lives on.
    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    /// The adjoint lattice the coefficients are sampled on.
    pub fn adjoint(&self) -> &Lattice {
        &self.adjoint
    }

    /// Integer redundancy `vol(Λ)^{-1/d}`.
    pub fn redundancy(&self) -> u64 {
        self.redundancy
    }

    pub fn phase_mode(&self) -> PhaseMode {
        self.phase_mode
    }

    /// Coefficients in deterministic order (norm, then index).
    pub fn terms(&self) -> &[(Vec<i64>, Complex64)] {
        &self.terms
    }

    /// Coefficient at one adjoint index, if inside the truncation ball.
    pub fn coefficient(&self, index: &[i64]) -> Option<Complex64> {
        self.coefficients.get(index).copied()
    }

    /// `Σ |c_k|` over the truncation ball.
    pub fn coefficient_l1(&self) -> f64 {
        self.coeff_l1
    }

    /// Radius of the coefficient truncation ball.
    pub fn truncation_radius(&self) -> f64 {
        self.truncation_radius
    }

    /// Certified bound on the absolute mass of the omitted coefficients.
    pub fn tail_estimate(&self) -> f64 {
        self.tail_estimate
    }

    /// `(Σ|c_k| + tail) / vol(Λ)` — an a-priori upper bound dominating the
    /// sharp `upper_B`.
    pub fn upper_bound_estimate(&self) -> f64 {
        (self.coeff_l1 + self.tail_estimate) / self.lattice.volume()
    }

    /// Extrema of the symbol over the fundamental-domain grid `M(j/res)`,
    /// `j ∈ {0..res-1}^{2d}`.
    ///
    /// On these grids `σ(λ°(k), M(j/res)) = k·j/res` exactly, so the values
    /// are computed as a sparse inverse DFT: coefficients are folded modulo
    /// `res` axis by axis against a precomputed table of `res`-th roots of
    /// unity, and only the final axis is streamed.
    pub fn extrema_on_grid(&self, res: usize) -> Result<GridExtrema> {
        dft_grid_extrema(
            &self.terms,
            2 * self.lattice.dim_d(),
            res,
            1.0 / self.lattice.volume(),
        )
    }
}

/// Samples `A_g g` over the adjoint lattice with a certified tail and
/// validates the structure the series route relies on: the origin
/// coefficient is the unit window norm and the coefficient family is
/// Hermitian (`c(-k) = conj(c(k))`).
///
/// Only even integer redundancies are accepted: odd ones would need
/// alternating phase factors (rejected), non-integer ones have no Laurent
/// structure at all.
pub fn janssen_coefficients(
    g: &Window,
    lattice: &Lattice,
    target_tail: f64,
) -> Result<JanssenSeries> {
    if g.dim_d() != lattice.dim_d() {
        return Err(Error::DimensionMismatch(format!(
            "window dimension {} on a lattice of dimension {}",
            g.dim_d(),
            lattice.dim_d()
        )));
    }
    let redundancy = check_even_redundancy(lattice)?;
    let adjoint = lattice.adjoint()?;
    let sums = lattice_terms(&adjoint, |p| ambiguity(g, g, p), target_tail)?;
    build_series(lattice, adjoint, sums, redundancy)
}

fn build_series(
    lattice: &Lattice,
    adjoint: Lattice,
    sums: LatticeTerms,
    redundancy: u64,
) -> Result<JanssenSeries> {
    let mut coefficients: HashMap<Vec<i64>, Complex64> = HashMap::with_capacity(sums.terms.len());
    for t in &sums.terms {
        coefficients.insert(t.index.clone(), t.value);
    }
    let zero = vec![0i64; 2 * lattice.dim_d()];
    let origin = coefficients.get(&zero).ok_or_else(|| {
        Error::SeriesInvariant("the coefficient at the origin is missing from the truncation".into())
    })?;
    if (origin - Complex64::new(1.0, 0.0)).norm() > ORIGIN_COEFF_TOL {
        return Err(Error::SeriesInvariant(format!(
            "origin coefficient {origin} differs from the unit squared window norm"
        )));
    }
    for t in &sums.terms {
        let neg: Vec<i64> = t.index.iter().map(|k| -k).collect();
        match coefficients.get(&neg) {
            None => {
                return Err(Error::SeriesInvariant(format!(
                    "truncation ball is not symmetric: {:?} present, its negative missing",
                    t.index
                )))
            }
            Some(cm) => {
                if (cm - t.value.conj()).norm() > HERMITIAN_SYMMETRY_TOL {
                    return Err(Error::SeriesInvariant(format!(
                        "coefficients at ±{:?} are not Hermitian partners (defect {:.3e})",
                        t.index,
                        (cm - t.value.conj()).norm()
                    )));
                }
            }
        }
    }
    let coeff_l1 = sums.terms.iter().map(|t| t.value.norm()).sum();
    let terms = sums
        .terms
        .iter()
        .map(|t| (t.index.clone(), t.value))
        .collect();
    Ok(JanssenSeries {
        lattice: lattice.clone(),
        adjoint,
        terms,
        coefficients,
        coeff_l1,
        truncation_radius: sums.truncation_radius,
        tail_estimate: sums.tail_estimate,
        phase_mode: PhaseMode::Trivial,
        redundancy,
    })
}

/// Sparse inverse DFT of a coefficient family over `{0..res-1}^{two_d}`,
/// returning only the extrema of the (scaled) values.
///
/// The coefficient array is contracted one trailing axis at a time into
/// dense blocks keyed by the remaining index prefix; the leading axis is
/// streamed in parallel with a per-thread row buffer, so the full
/// `res^{two_d}` value array is never materialised.
fn dft_grid_extrema(
    terms: &[(Vec<i64>, Complex64)],
    two_d: usize,
    res: usize,
    scale: f64,
) -> Result<GridExtrema> {
    if res < 2 {
        return Err(Error::InvalidConfig(format!(
            "grid resolution must be at least 2, got {res}"
        )));
    }
    let r = res as i64;
    let roots: Vec<Complex64> = (0..res)
        .map(|m| Complex64::from_polar(1.0, 2.0 * PI * m as f64 / res as f64))
        .collect();

    // Fold coefficients whose indices agree modulo `res` (their grid phases
    // coincide exactly).
    let mut table: BTreeMap<Vec<i64>, Vec<Complex64>> = BTreeMap::new();
    for (k, c) in terms {
        debug_assert_eq!(k.len(), two_d);
        let key: Vec<i64> = k.iter().map(|ki| ki.rem_euclid(r)).collect();
        table
            .entry(key)
            .and_modify(|block| block[0] += c)
            .or_insert_with(|| vec![*c]);
    }

    // Contract the trailing axes one at a time.
    let mut block_len = 1usize;
    for _ in 1..two_d {
        let mut next: BTreeMap<Vec<i64>, Vec<Complex64>> = BTreeMap::new();
        for (key, block) in table {
            let (head, last) = key.split_at(key.len() - 1);
            let last = last[0] as usize;
            let target = next
                .entry(head.to_vec())
                .or_insert_with(|| vec![Complex64::new(0.0, 0.0); block_len * res]);
            for j in 0..res {
                let phase = roots[(last * j) % res];
                let offset = j * block_len;
                for (i, b) in block.iter().enumerate() {
                    target[offset + i] += phase * b;
                }
            }
        }
        table = next;
        block_len *= res;
    }

    // Stream the leading axis, scanning each row for extrema as it is built.
    let slabs: Vec<(usize, Vec<Complex64>)> = table
        .into_iter()
        .map(|(k, v)| (k[0] as usize, v))
        .collect();
    let (min, max, max_imag) = (0..res)
        .into_par_iter()
        .map(|j0| {
            let mut row = vec![Complex64::new(0.0, 0.0); block_len];
            for (k0, slab) in &slabs {
                let phase = roots[(k0 * j0) % res];
                for (acc, s) in row.iter_mut().zip(slab) {
                    *acc += phase * s;
                }
            }
            let mut min = f64::INFINITY;
            let mut max = f64::NEG_INFINITY;
            let mut imag = 0.0f64;
            for v in &row {
                min = min.min(v.re);
                max = max.max(v.re);
                imag = imag.max(v.im.abs());
            }
            (min, max, imag)
        })
        .reduce(
            || (f64::INFINITY, f64::NEG_INFINITY, 0.0),
            |a, b| (a.0.min(b.0), a.1.max(b.1), a.2.max(b.2)),
        );
    Ok(GridExtrema {
        min: min * scale,
        max: max * scale,
        max_imag: max_imag * scale,
    })
}

/// Doubles the grid resolution until both extrema move by less than `tol`
/// or the cap blocks further refinement.  Returns the last extrema, the
/// resolution they were computed at, and whether the movement criterion was
/// met.
fn refine_extrema<F>(eval: F, start: usize, cap: usize, tol: f64) -> Result<(GridExtrema, usize, bool)>
where
    F: Fn(usize) -> Result<GridExtrema>,
{
    if start < 2 {
        return Err(Error::InvalidConfig(format!(
            "starting grid resolution must be at least 2, got {start}"
        )));
    }
    if start > cap {
        return Err(Error::InvalidConfig(format!(
            "grid resolution {start} exceeds the cap {cap} for this dimension"
        )));
    }
    let mut res = start;
    let mut prev = eval(res)?;
    while res * 2 <= cap {
        res *= 2;
        let cur = eval(res)?;
        let movement = (cur.min - prev.min).abs().max((cur.max - prev.max).abs());
        prev = cur;
        if movement <= tol {
            return Ok((prev, res, true));
        }
    }
    Ok((prev, res, false))
}

fn finish_series_result(
    method: &str,
    lattice: &Lattice,
    ext: GridExtrema,
    grid_res: usize,
    converged: bool,
    truncation_radius: f64,
    tail_estimate: f64,
) -> Result<FrameBoundsResult> {
    if !(ext.min.is_finite() && ext.max.is_finite()) {
        return Err(Error::NonFinite("symbol extrema on the grid".into()));
    }
    if ext.max_imag > PHI_IMAGINARY_TOL {
        return Err(Error::SeriesInvariant(format!(
            "imaginary part {:.3e} of the symbol on the grid exceeds {:.0e}",
            ext.max_imag, PHI_IMAGINARY_TOL
        )));
    }
    let floor = NEGATIVE_SYMBOL_TOL.max(4.0 * tail_estimate / lattice.volume());
    if ext.min < -floor {
        return Err(Error::SeriesInvariant(format!(
            "grid minimum {:.3e} is more negative than the certified truncation error allows ({:.1e})",
            ext.min, floor
        )));
    }
    Ok(FrameBoundsResult {
        method: method.into(),
        lattice: LatticeArtifact::from_lattice(lattice),
        lower_a: ext.min.max(0.0),
        upper_b: ext.max,
        converged,
        grid_res,
        truncation_radius,
    })
}

/// Sharp frame bounds through the Fourier-series route.
///
/// Requires even integer redundancy.  Starts the fundamental-domain grid at
/// `grid_res` and doubles it until both extrema move by less than
/// [`EXTREMA_MOVEMENT_TOL`]; `converged = false` in the result means the
/// dimensional resolution cap was reached first.
pub fn frame_bounds_janssen(
    g: &Window,
    lattice: &Lattice,
    grid_res: usize,
    target_tail: f64,
) -> Result<FrameBoundsResult> {
    let series = janssen_coefficients(g, lattice, target_tail)?;
    let cap = grid_res_cap(2 * lattice.dim_d());
    let (ext, res, converged) = refine_extrema(
        |r| series.extrema_on_grid(r),
        grid_res,
        cap,
        EXTREMA_MOVEMENT_TOL,
    )?;
    finish_series_result(
        "janssen_series",
        lattice,
        ext,
        res,
        converged,
        series.truncation_radius(),
        series.tail_estimate(),
    )
}

/// Unscaled Gram matrix of the truncated adjoint system
/// `{ρ(λ°) g : λ° ∈ Λ°, ‖λ°‖ ≤ section_radius}`, together with the points
/// indexing its rows.
///
/// Entries are `G[i,j] = e^{πi σ(λ_i, λ_j)} A_g g(λ_i − λ_j)`; the matrix is
/// Hermitian with unit diagonal (the window norm).  The frame bounds of the
/// full system are the spectrum edges of `vol(Λ)^{-1} G` in the limit of
/// growing sections.
pub fn gram_matrix(
    g: &Window,
    lattice: &Lattice,
    section_radius: f64,
) -> Result<(DMatrix<Complex64>, Vec<LatticePoint>)> {
    if g.dim_d() != lattice.dim_d() {
        return Err(Error::DimensionMismatch(format!(
            "window dimension {} on a lattice of dimension {}",
            g.dim_d(),
            lattice.dim_d()
        )));
    }
    let adjoint = lattice.adjoint()?;
    let points = adjoint.enumerate_points(section_radius, DEFAULT_POINT_CAP)?;
    if points.len() < MIN_SECTION_POINTS {
        return Err(Error::SectionTooSmall {
            points: points.len(),
            min: MIN_SECTION_POINTS,
        });
    }
    let cache = coefficient_cache(g, &adjoint, &points)?;
    let h = assemble_section(&points, &cache);
    Ok((h, points))
}

/// Ambiguity samples for every index difference occurring in the section,
/// evaluated once each (in parallel over a deterministically sorted key
/// list).
fn coefficient_cache(
    g: &Window,
    adjoint: &Lattice,
    points: &[LatticePoint],
) -> Result<HashMap<Vec<i64>, Complex64>> {
    let mut wanted: HashSet<Vec<i64>> = HashSet::new();
    for (i, pi) in points.iter().enumerate() {
        for pj in &points[i..] {
            let diff: Vec<i64> = pi
                .index
                .iter()
                .zip(&pj.index)
                .map(|(a, b)| a - b)
                .collect();
            wanted.insert(diff);
        }
    }
    let mut keys: Vec<Vec<i64>> = wanted.into_iter().collect();
    keys.sort();
    let values: Vec<Result<Complex64>> = keys
        .par_iter()
        .map(|k| ambiguity(g, g, &adjoint.point(k)))
        .collect();
    let mut cache = HashMap::with_capacity(keys.len());
    for (k, v) in keys.into_iter().zip(values) {
        let v = v?;
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite(format!("ambiguity sample at index {k:?}")));
        }
        cache.insert(k, v);
    }
    Ok(cache)
}

fn assemble_section(
    points: &[LatticePoint],
    cache: &HashMap<Vec<i64>, Complex64>,
) -> DMatrix<Complex64> {
    let n = points.len();
    let zero = vec![0i64; points[0].index.len()];
    let origin = cache[&zero];
    let mut h = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for i in 0..n {
        // The diagonal is the squared window norm: real by construction.
        h[(i, i)] = Complex64::new(origin.re, 0.0);
        for j in (i + 1)..n {
            let diff: Vec<i64> = points[i]
                .index
                .iter()
                .zip(&points[j].index)
                .map(|(a, b)| a - b)
                .collect();
            let sigma = symplectic_form(&points[i].point, &points[j].point);
            let value = Complex64::from_polar(1.0, PI * sigma) * cache[&diff];
            h[(i, j)] = value;
            h[(j, i)] = value.conj();
        }
    }
    h
}

/// Extreme eigenvalues of a Hermitian matrix.
///
/// Matrices that are real to within noise are handed to the real symmetric
/// solver directly; genuinely complex ones go through the standard
/// `[[S, -K], [K, S]]` embedding (for `H = S + iK`), whose spectrum is that
/// of `H` with every eigenvalue doubled.
fn hermitian_eigen_range(h: &DMatrix<Complex64>) -> Result<(f64, f64)> {
    let n = h.nrows();
    let max_im = h.iter().map(|z| z.im.abs()).fold(0.0f64, f64::max);
    let eigenvalues = if max_im <= REAL_SPECTRUM_TOL {
        let m = DMatrix::from_fn(n, n, |i, j| h[(i, j)].re);
        nalgebra::SymmetricEigen::new(m).eigenvalues
    } else {
        let mut big = DMatrix::<f64>::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                let z = h[(i, j)];
                big[(i, j)] = z.re;
                big[(n + i, n + j)] = z.re;
                big[(i, n + j)] = -z.im;
                big[(n + i, j)] = z.im;
            }
        }
        nalgebra::SymmetricEigen::new(big).eigenvalues
    };
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for e in eigenvalues.iter() {
        if !e.is_finite() {
            return Err(Error::Eigen("eigensolver returned non-finite values".into()));
        }
        min = min.min(*e);
        max = max.max(*e);
    }
    Ok((min, max))
}

/// Sharp frame bounds through Gram finite sections of the adjoint system.
///
/// Works for any lattice (no integrality condition).  Finite sections carry
/// an `O(radius^{-2})` boundary bias — the smallest eigenvalue approaches the
/// lower bound from above and the largest the upper bound from below, both
/// far too slowly to use raw.  Three nested sections are therefore solved
/// (radii `0.64·R`, `0.8·R`, `R`), checked for eigenvalue interlacing, and
/// the returned bounds are the Richardson extrapolants of the outer pair.
/// The result is `converged` when the two successive extrapolants agree to
/// [`SECTION_MOVEMENT_REL_TOL`] × `upper_B`.
pub fn frame_bounds_gram(
    g: &Window,
    lattice: &Lattice,
    section_radius: f64,
) -> Result<FrameBoundsResult> {
    if !(section_radius.is_finite() && section_radius > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "section radius must be positive and finite, got {section_radius}"
        )));
    }
    if g.dim_d() != lattice.dim_d() {
        return Err(Error::DimensionMismatch(format!(
            "window dimension {} on a lattice of dimension {}",
            g.dim_d(),
            lattice.dim_d()
        )));
    }
    let adjoint = lattice.adjoint()?;
    let points = adjoint.enumerate_points(section_radius, DEFAULT_POINT_CAP)?;
    let radii: Vec<f64> = INNER_SECTION_FRACTIONS
        .iter()
        .map(|f| f * section_radius)
        .chain([section_radius])
        .collect();
    let smallest = points.iter().filter(|p| p.point.norm() <= radii[0]).count();
    if smallest < MIN_SECTION_POINTS {
        return Err(Error::SectionTooSmall {
            points: smallest,
            min: MIN_SECTION_POINTS,
        });
    }
    // Every nested-section difference is also a full-section difference, so
    // one coefficient cache serves all three solves.
    let cache = coefficient_cache(g, &adjoint, &points)?;
    let vol = lattice.volume();
    let mut edges = Vec::with_capacity(radii.len());
    for r in &radii {
        let subset: Vec<LatticePoint> =
            points.iter().filter(|p| p.point.norm() <= *r).cloned().collect();
        let h = assemble_section(&subset, &cache);
        let (raw_min, raw_max) = hermitian_eigen_range(&h)?;
        edges.push((raw_min / vol, raw_max / vol));
    }
    for w in edges.windows(2) {
        let ((a_in, b_in), (a_out, b_out)) = (w[0], w[1]);
        if a_out > a_in + INTERLACING_SLACK || b_out < b_in - INTERLACING_SLACK {
            return Err(Error::Eigen(format!(
                "nested sections failed to interlace: lower {a_out:.6e} vs {a_in:.6e}, upper {b_out:.6e} vs {b_in:.6e}"
            )));
        }
    }
    let (a_raw, b_raw) = edges[2];
    if a_raw < -INTERLACING_SLACK {
        return Err(Error::Eigen(format!(
            "Gram section has a significantly negative eigenvalue: {a_raw:.3e}"
        )));
    }

    // v(r) = v∞ + c/r² across a nested pair isolates v∞.
    let extrapolate = |(v_in, r_in): (f64, f64), (v_out, r_out): (f64, f64)| -> f64 {
        (v_out * r_out * r_out - v_in * r_in * r_in) / (r_out * r_out - r_in * r_in)
    };
    let first = (
        extrapolate((edges[0].0, radii[0]), (edges[1].0, radii[1])),
        extrapolate((edges[0].1, radii[0]), (edges[1].1, radii[1])),
    );
    let second = (
        extrapolate((edges[1].0, radii[1]), (edges[2].0, radii[2])),
        extrapolate((edges[1].1, radii[1]), (edges[2].1, radii[2])),
    );
    // The raw edges still bracket the spectrum, so the extrapolants are
    // clipped back into the bracket (and the lower bound to 0) rather than
    // being allowed to overshoot it.
    let lower_a = second.0.clamp(0.0, a_raw.max(0.0));
    let upper_b = second.1.max(b_raw);
    let movement = (second.0 - first.0).abs().max((second.1 - first.1).abs());
    let converged = movement <= SECTION_MOVEMENT_REL_TOL * upper_b.max(f64::MIN_POSITIVE);

    Ok(FrameBoundsResult {
        method: "gram_finite_section".into(),
        lattice: LatticeArtifact::from_lattice(lattice),
        lower_a,
        upper_b,
        converged,
        grid_res: 0,
        truncation_radius: section_radius,
    })
}

/// Sharp frame bounds for the rectangular lattice `αZ × βZ` through
/// short-time Fourier transform samples of the window.
///
/// An independent witness for [`frame_bounds_janssen`]: with `(αβ)^{-1}` an
/// even integer the STFT and ambiguity samples coincide on the shift grid,
/// so both routes must agree to coefficient accuracy — but this one reaches
/// its coefficients through a different transform and phase convention.
pub fn janssen_separable(
    g: &Window,
    alpha: f64,
    beta: f64,
    grid_res: usize,
    target_tail: f64,
) -> Result<FrameBoundsResult> {
    if g.dim_d() != 1 {
        return Err(Error::UnsupportedDimension(g.dim_d()));
    }
    if !(alpha.is_finite() && alpha > 0.0 && beta.is_finite() && beta > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "lattice parameters must be positive and finite, got α = {alpha}, β = {beta}"
        )));
    }
    let lattice = Lattice::from_rows(&[vec![alpha, 0.0], vec![0.0, beta]])?;
    let redundancy = check_even_redundancy(&lattice)?;
    let adjoint = lattice.adjoint()?;
    let sums = lattice_terms(&adjoint, |p| stft(g, g, p), target_tail)?;
    let series = build_series(&lattice, adjoint, sums, redundancy)?;
    let (ext, res, converged) = refine_extrema(
        |r| series.extrema_on_grid(r),
        grid_res,
        GRID_RES_CAP_2D,
        EXTREMA_MOVEMENT_TOL,
    )?;
    finish_series_result(
        "janssen_separable",
        &lattice,
        ext,
        res,
        converged,
        series.truncation_radius(),
        series.tail_estimate(),
    )
}

/// Outcome of checking the no-frame statement for one window/lattice pair.
///
/// The hypotheses are: odd window parity, symplectic lattice, covolume
/// `2^{-d}`.  When they hold the series route applies (the redundancy is
/// the even integer 2), and the verdict is positive iff the symbol vanishes
/// at the origin, the lower bound is negligible against the upper one, and
/// the grid refinement converged.  When they fail, nothing is asserted.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub hypotheses_met: bool,
    /// `"even"`, `"odd"` or `"neither"`.
    pub window_parity: String,
    pub lattice_symplectic: bool,
    pub covolume: f64,
    pub expected_covolume: f64,
    /// Series value at the origin (absent when the series route does not
    /// apply to this lattice).
    pub phi_at_zero: Option<f64>,
    #[serde(rename = "lower_A")]
    pub lower_a: Option<f64>,
    #[serde(rename = "upper_B")]
    pub upper_b: Option<f64>,
    pub converged: Option<bool>,
    /// Verdict under the hypotheses; `None` when they do not hold.
    pub confirmed: Option<bool>,
    pub conclusion: String,
    /// Full bounds artifact, when the series route applied.
    pub bounds: Option<FrameBoundsResult>,
}

impl VerificationReport {
    /// `true` unless the hypotheses held and the numerics failed to confirm
    /// the vanishing lower bound.
    pub fn passed(&self) -> bool {
        self.confirmed != Some(false)
    }
}

/// Checks numerically that an odd window on a symplectic lattice of
/// covolume `2^{-d}` admits no Gabor frame: the series symbol vanishes at
/// the origin, so the sharp lower bound is zero.
///
/// Pairs that do not satisfy the hypotheses are reported as such (with the
/// bounds still computed when possible) rather than rejected, so the check
/// doubles as a sanity probe for windows that *do* generate frames.
pub fn verify_no_frame(
    g: &Window,
    lattice: &Lattice,
    grid_res: usize,
    target_tail: f64,
) -> Result<VerificationReport> {
    let d = lattice.dim_d();
    if g.dim_d() != d {
        return Err(Error::DimensionMismatch(format!(
            "window dimension {} on a lattice of dimension {d}",
            g.dim_d()
        )));
    }
    let parity = g.parity();
    let window_parity = match parity {
        Parity::Even => "even",
        Parity::Odd => "odd",
        Parity::Neither => "neither",
    }
    .to_string();
    let check = lattice.symplectic_lattice_check(SYMPLECTIC_TOL)?;
    let expected_covolume = 0.5f64.powi(d as i32);
    let covolume = lattice.volume();
    let covolume_ok = (covolume - expected_covolume).abs() <= EXPECTED_COVOLUME_TOL;
    let hypotheses_met = parity == Parity::Odd && check.is_symplectic && covolume_ok;

    let series_applies = check_even_redundancy(lattice).is_ok();
    let (phi_at_zero, bounds) = if series_applies {
        let zero = PhaseSpacePoint::new(vec![0.0; d], vec![0.0; d])?;
        let phi0 = phi_series(g, lattice, &zero, target_tail)?;
        let b = frame_bounds_janssen(g, lattice, grid_res, target_tail)?;
        (Some(phi0), Some(b))
    } else {
        (None, None)
    };

    let confirmed = if hypotheses_met {
        match (&phi_at_zero, &bounds) {
            (Some(phi0), Some(b)) => Some(
                phi0.abs() <= PHI_ZERO_TOL
                    && b.lower_a <= LOWER_BOUND_REL_TOL * b.upper_b
                    && b.converged,
            ),
            _ => Some(false),
        }
    } else {
        None
    };

    let conclusion = match (&confirmed, &bounds) {
        (Some(true), Some(b)) => format!(
            "no frame: the symbol vanishes at the origin (φ(0) = {:.2e}) and the lower bound {:.2e} is at most {:.0e} × the upper bound {:.6}",
            phi_at_zero.unwrap(),
            b.lower_a,
            LOWER_BOUND_REL_TOL,
            b.upper_b
        ),
        (Some(_), _) => format!(
            "inconclusive: the hypotheses hold but the numerical evidence is incomplete (φ(0) = {:?}, lower_A = {:?}, converged = {:?})",
            phi_at_zero,
            bounds.as_ref().map(|b| b.lower_a),
            bounds.as_ref().map(|b| b.converged)
        ),
        (None, _) => format!(
            "hypotheses not satisfied (window parity: {window_parity}, symplectic lattice: {}, covolume {covolume:.6} vs expected {expected_covolume:.6}); nothing is asserted",
            check.is_symplectic
        ),
    };

    Ok(VerificationReport {
        hypotheses_met,
        window_parity,
        lattice_symplectic: check.is_symplectic,
        covolume,
        expected_covolume,
        phi_at_zero,
        lower_a: bounds.as_ref().map(|b| b.lower_a),
        upper_b: bounds.as_ref().map(|b| b.upper_b),
        converged: bounds.as_ref().map(|b| b.converged),
        confirmed,
        conclusion,
        bounds,
    })
}

/// Lattice-shape grid for [`scan_lattices`]: shears `τ` (outer loop) ×
/// heights `h` (inner loop).  Each cell is the lattice generated by the
/// rows `s(1, τ)`, `s(0, h)` with `s = √(vol/h)`, so every cell has the
/// same covolume.
#[derive(Debug, Clone)]
pub struct ShapeGrid {
    pub taus: Vec<f64>,
    pub heights: Vec<f64>,
}

impl Default for ShapeGrid {
    /// 11 shears `0, 0.05, …, 0.5` × 11 heights placed so that the
    /// hexagonal aspect ratio `√3/2` and the square aspect ratio `1` are
    /// both on the grid exactly (at indices 2 and 8).
    fn default() -> Self {
        let taus = (0..11).map(|i| i as f64 * 0.05).collect();
        let hex = 3f64.sqrt() / 2.0;
        let step = (1.0 - hex) / 6.0;
        let heights = (0..11).map(|i| hex + (i as f64 - 2.0) * step).collect();
        ShapeGrid { taus, heights }
    }
}

/// Numerical knobs shared by every cell of a scan.
#[derive(Debug, Clone)]
pub struct ScanNumerics {
    pub grid_res: usize,
    pub target_tail: f64,
    pub section_radius: f64,
}

impl Default for ScanNumerics {
    fn default() -> Self {
        ScanNumerics {
            grid_res: DEFAULT_GRID_RES,
            target_tail: crate::summation::DEFAULT_TAIL_TARGET,
            section_radius: DEFAULT_SECTION_RADIUS,
        }
    }
}

/// One row of a lattice-shape scan.  Rows never disappear on failure: a
/// cell whose computation errors out keeps its place with NaN bounds and
/// `converged = false`.
#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    pub s: f64,
    pub tau: f64,
    pub h: f64,
    #[serde(rename = "A")]
    pub lower_a: f64,
    #[serde(rename = "B")]
    pub upper_b: f64,
    pub converged: bool,
}

/// Sharp bounds for every lattice shape in the grid at a fixed density
/// (`vol = 1/density`, one-dimensional windows).
///
/// Even integer densities go through the series route; all others fall back
/// to Gram finite sections at `numerics.section_radius`.  Cells are
/// evaluated in parallel but reported in deterministic order (shears outer,
/// heights inner).
pub fn scan_lattices(
    g: &Window,
    density: f64,
    shape: &ShapeGrid,
    numerics: &ScanNumerics,
) -> Result<Vec<ScanRow>> {
    if g.dim_d() != 1 {
        return Err(Error::UnsupportedDimension(g.dim_d()));
    }
    if !(density.is_finite() && density > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "density must be positive and finite, got {density}"
        )));
    }
    if shape.taus.is_empty() || shape.heights.is_empty() {
        return Err(Error::InvalidConfig("empty shape grid".into()));
    }
    if let Some(h) = shape.heights.iter().find(|h| !(h.is_finite() && **h > 0.0)) {
        return Err(Error::InvalidConfig(format!("invalid cell height {h}")));
    }
    let volume = 1.0 / density;
    let rounded = density.round();
    let series_route = (density - rounded).abs() <= 1e-9 && rounded >= 2.0
        && (rounded as u64) % 2 == 0;

    let cells: Vec<(f64, f64)> = shape
        .taus
        .iter()
        .flat_map(|&tau| shape.heights.iter().map(move |&h| (tau, h)))
        .collect();
    let rows = cells
        .par_iter()
        .map(|&(tau, h)| {
            let s = (volume / h).sqrt();
            let bounds = Lattice::from_rows(&[vec![s, s * tau], vec![0.0, s * h]]).and_then(|lat| {
                if series_route {
                    frame_bounds_janssen(g, &lat, numerics.grid_res, numerics.target_tail)
                } else {
                    frame_bounds_gram(g, &lat, numerics.section_radius)
                }
            });
            match bounds {
                Ok(b) => ScanRow {
                    s,
                    tau,
                    h,
                    lower_a: b.lower_a,
                    upper_b: b.upper_b,
                    converged: b.converged,
                },
                Err(_) => ScanRow {
                    s,
                    tau,
                    h,
                    lower_a: f64::NAN,
                    upper_b: f64::NAN,
                    converged: false,
                },
            }
        })
        .collect();
    Ok(rows)
}

/// Writes scan rows as CSV with the header `s,tau,h,A,B,converged`.
pub fn write_scan_csv<W: std::io::Write>(rows: &[ScanRow], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn theta_references() -> (f64, f64) {
        // Independent alternating/plain Gaussian lattice sums: the sharp
        // bounds of the Gaussian on the square lattice of covolume 1/2.
        let mut plain = 0.0;
        let mut alternating = 0.0;
        for k1 in -6i64..=6 {
            for k2 in -6i64..=6 {
                let term = (-PI * (k1 * k1 + k2 * k2) as f64).exp();
                plain += term;
                alternating += if (k1 + k2) % 2 == 0 { term } else { -term };
            }
        }
        (2.0 * alternating, 2.0 * plain)
    }

    #[test]
    fn gaussian_coefficients_on_the_square_lattice_are_gaussian() {
        let g = Window::hermite(&[0]).unwrap();
        let lattice = Lattice::square(0.5).unwrap();
        let series = janssen_coefficients(&g, &lattice, 1e-10).unwrap();
        assert_eq!(series.redundancy(), 2);
        assert_eq!(series.phase_mode(), PhaseMode::Trivial);
        let c0 = series.coefficient(&[0, 0]).unwrap();
        assert!((c0 - Complex64::new(1.0, 0.0)).norm() <= 1e-9);
        // The adjoint of (1/√2)Z² is √2 Z², so the first shell sits at
        // distance √2 and carries e^{-π·2/2} = e^{-π}.
        let c01 = series.coefficient(&[0, 1]).unwrap();
        assert!(
            (c01 - Complex64::new((-PI).exp(), 0.0)).norm() <= 1e-9,
            "c(0,1) = {c01}"
        );
        let c = series.coefficient(&[1, 0]).unwrap();
        let cm = series.coefficient(&[-1, 0]).unwrap();
        assert!((cm - c.conj()).norm() <= 1e-9);
    }

    #[test]
    fn odd_or_non_integer_redundancy_is_refused_by_the_series_route() {
        let g = Window::hermite(&[0]).unwrap();
        let unit = Lattice::square(1.0).unwrap();
        assert!(matches!(
            janssen_coefficients(&g, &unit, 1e-10),
            Err(Error::AlternatingPhaseUnsupported(1))
        ));
        let awkward = Lattice::square(0.7).unwrap();
        assert!(matches!(
            janssen_coefficients(&g, &awkward, 1e-10),
            Err(Error::NonIntegerRedundancy { .. })
        ));
    }

    #[test]
    fn gaussian_bounds_on_the_square_lattice_match_theta_sums() {
        let (a_ref, b_ref) = theta_references();
        let g = Window::hermite(&[0]).unwrap();
        let lattice = Lattice::square(0.5).unwrap();
        let r = frame_bounds_janssen(&g, &lattice, 64, 1e-10).unwrap();
        assert_eq!(r.method, "janssen_series");
        assert!(r.converged);
        // Both extrema land on grid points, so the first doubling already
        // reproduces them and the refinement stops at 128.
        assert_eq!(r.grid_res, 128);
        assert!(
            (r.lower_a - a_ref).abs() <= 1e-8,
            "lower {:.12} vs reference {a_ref:.12}",
            r.lower_a
        );
        assert!(
            (r.upper_b - b_ref).abs() <= 1e-8,
            "upper {:.12} vs reference {b_ref:.12}",
            r.upper_b
        );
    }

    #[test]
    fn grid_extrema_match_direct_series_evaluation_on_a_coarse_grid() {
        // Exercises the inverse-DFT identity on a genuinely sheared lattice:
        // the streamed evaluator must reproduce naive term-by-term sums with
        // explicit symplectic-form phases.
        let g = Window::hermite(&[2]).unwrap();
        let lattice = Lattice::hexagonal(0.5).unwrap();
        let series = janssen_coefficients(&g, &lattice, 1e-10).unwrap();
        let res = 8usize;
        let gen = lattice.generator().clone();
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for j1 in 0..res {
            for j2 in 0..res {
                let t = nalgebra::DVector::from_vec(vec![
                    j1 as f64 / res as f64,
                    j2 as f64 / res as f64,
                ]);
                let flat = &gen * t;
                let z = PhaseSpacePoint::from_flat(flat.as_slice()).unwrap();
                let mut acc = Complex64::new(0.0, 0.0);
                for (index, c) in series.terms() {
                    let point = series.adjoint().point(index);
                    let phase =
                        Complex64::from_polar(1.0, 2.0 * PI * symplectic_form(&point, &z));
                    acc += c * phase;
                }
                let value = acc / lattice.volume();
                assert!(value.im.abs() <= 1e-9);
                min = min.min(value.re);
                max = max.max(value.re);
            }
        }
        let ext = series.extrema_on_grid(res).unwrap();
        assert!((ext.min - min).abs() <= 1e-9, "{} vs {min}", ext.min);
        assert!((ext.max - max).abs() <= 1e-9, "{} vs {max}", ext.max);
    }

    #[test]
    fn first_hermite_loses_the_lower_bound_on_the_square_lattice() {
        let g = Window::hermite(&[1]).unwrap();
        let lattice = Lattice::square(0.5).unwrap();
        let r = frame_bounds_janssen(&g, &lattice, 64, 1e-10).unwrap();
        assert!(r.lower_a <= 1e-8, "lower bound {:.3e}", r.lower_a);
        assert!(r.lower_a >= 0.0);
        assert!((3.0..4.5).contains(&r.upper_b), "upper bound {}", r.upper_b);
        assert!(r.converged);
    }

    #[test]
    fn two_dimensional_gaussian_bounds_factor_over_the_product_lattice() {
        let (a_ref, b_ref) = theta_references();
        let g = Window::gaussian(2).unwrap();
        let c = 0.25f64.powf(0.25);
        let lattice = Lattice::new(DMatrix::<f64>::identity(4, 4) * c).unwrap();
        assert!((lattice.volume() - 0.25).abs() <= 1e-12);
        let r = frame_bounds_janssen(&g, &lattice, 16, 1e-10).unwrap();
        assert!(r.converged);
        assert!(
            (r.lower_a - a_ref * a_ref).abs() <= 1e-6,
            "lower {:.9} vs product reference {:.9}",
            r.lower_a,
            a_ref * a_ref
        );
        assert!(
            (r.upper_b - b_ref * b_ref).abs() <= 1e-6,
            "upper {:.9} vs product reference {:.9}",
            r.upper_b,
            b_ref * b_ref
        );
    }

    #[test]
    fn upper_bound_is_dominated_by_the_coefficient_mass() {
        let g = Window::hermite(&[2]).unwrap();
        let lattice = Lattice::hexagonal(0.5).unwrap();
        let series = janssen_coefficients(&g, &lattice, 1e-10).unwrap();
        let r = frame_bounds_janssen(&g, &lattice, 64, 1e-10).unwrap();
        assert!(r.upper_b <= series.upper_bound_estimate() + 1e-12);
        // The symbol of the second Hermite window vanishes at the deep holes
        // of the hexagonal cell (the thirds of the long diagonal): the first
        // few coefficient shells cancel there exactly, so the lower bound
        // collapses even though the window is even.  A 40-digit independent
        // evaluation puts the minimum at 0 and the maximum at 6.1313787.
        assert!(r.lower_a <= 1e-5, "hexagonal lower bound {}", r.lower_a);
        assert!(
            (6.0..6.3).contains(&r.upper_b),
            "hexagonal upper bound {}",
            r.upper_b
        );
        assert!(r.converged);
    }

    #[test]
    fn gram_matrix_is_hermitian_with_unit_diagonal() {
        let g = Window::hermite(&[0]).unwrap();
        let lattice = Lattice::square(0.5).unwrap();
        let (h, points) = gram_matrix(&g, &lattice, 6.0).unwrap();
        assert!(points.len() >= MIN_SECTION_POINTS);
        for i in 0..h.nrows() {
            assert!((h[(i, i)] - Complex64::new(1.0, 0.0)).norm() <= 1e-9);
            for j in 0..h.ncols() {
                assert!((h[(i, j)] - h[(j, i)].conj()).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn gram_estimates_are_stable_across_section_radii() {
        let g = Window::hermite(&[0]).unwrap();
        let lattice = Lattice::square(0.5).unwrap();
        let small = frame_bounds_gram(&g, &lattice, 8.0).unwrap();
        let large = frame_bounds_gram(&g, &lattice, 11.0).unwrap();
        assert_eq!(small.method, "gram_finite_section");
        // The extrapolated edges should already have settled at radius 8.
        assert!((small.lower_a - large.lower_a).abs() <= 5e-3);
        assert!((small.upper_b - large.upper_b).abs() <= 5e-3);
        assert_eq!(small.grid_res, 0);
    }

    #[test]
    fn gram_sections_reproduce_the_series_bounds_for_the_gaussian() {
        let g = Window::hermite(&[0]).unwrap();
        let lattice = Lattice::square(0.5).unwrap();
        let series = frame_bounds_janssen(&g, &lattice, 64, 1e-10).unwrap();
        let sections = frame_bounds_gram(&g, &lattice, 12.0).unwrap();
        assert!(sections.converged);
        assert!(
            (sections.lower_a - series.lower_a).abs() <= 5e-3,
            "lower: sections {} vs series {}",
            sections.lower_a,
            series.lower_a
        );
        assert!(
            (sections.upper_b - series.upper_b).abs() <= 5e-3,
            "upper: sections {} vs series {}",
            sections.upper_b,
            series.upper_b
        );
    }

    #[test]
    fn complex_embedding_reproduces_known_eigenvalues() {
        let mut h = DMatrix::from_element(2, 2, Complex64::new(0.0, 0.0));
        h[(0, 0)] = Complex64::new(2.0, 0.0);
        h[(1, 1)] = Complex64::new(2.0, 0.0);
        h[(0, 1)] = Complex64::new(0.0, 1.0);
        h[(1, 0)] = Complex64::new(0.0, -1.0);
        let (min, max) = hermitian_eigen_range(&h).unwrap();
        assert!((min - 1.0).abs() <= 1e-12);
        assert!((max - 3.0).abs() <= 1e-12);
    }

    #[test]
    fn asymmetric_sampled_window_goes_through_the_complex_gram_path() {
        // A window with no parity on a lattice with non-integer redundancy:
        // only the section route applies, and the phases are genuinely
        // complex.  The scaled Gram has unit trace density vol^{-1}, so the
        // spectrum must straddle 1/0.8 = 1.25.
        let n = 501;
        let ts: Vec<f64> = (0..n).map(|i| -5.0 + 10.0 * i as f64 / (n - 1) as f64).collect();
        let values: Vec<Complex64> = ts
            .iter()
            .map(|&t| {
                let v = (-PI * t * t).exp() * (1.0 + 0.35 * (3.0 * t).sin());
                Complex64::new(v, 0.0)
            })
            .collect();
        let g = Window::sampled(&ts, &values).unwrap();
        assert_eq!(g.parity(), Parity::Neither);
        let lattice = Lattice::square(0.8).unwrap();
        let r = frame_bounds_gram(&g, &lattice, 6.0).unwrap();
        assert!(r.lower_a >= 0.0);
        assert!(r.lower_a <= 1.25 + 1e-9, "lower bound {}", r.lower_a);
        assert!(r.upper_b >= 1.25 - 1e-9, "upper bound {}", r.upper_b);
        assert!(r.upper_b.is_finite());
    }

    #[test]
    fn separable_route_matches_the_general_series_for_the_gaussian() {
        let g = Window::hermite(&[0]).unwrap();
        let alpha = 0.5f64.sqrt();
        let separable = janssen_separable(&g, alpha, alpha, 64, 1e-10).unwrap();
        assert_eq!(separable.method, "janssen_separable");
        let lattice = Lattice::square(0.5).unwrap();
        let series = frame_bounds_janssen(&g, &lattice, 64, 1e-10).unwrap();
        assert!(
            (separable.lower_a - series.lower_a).abs() <= 1e-8,
            "lower {} vs {}",
            separable.lower_a,
            series.lower_a
        );
        assert!(
            (separable.upper_b - series.upper_b).abs() <= 1e-8,
            "upper {} vs {}",
            separable.upper_b,
            series.upper_b
        );
    }

    #[test]
    fn diagonal_lattices_of_even_redundancy_satisfy_the_bound_ordering() {
        let g = Window::hermite(&[0]).unwrap();
        for &alpha in &[0.55, 0.65, 0.75, 0.9, 1.1] {
            let beta = 1.0 / (2.0 * alpha);
            let lattice = Lattice::from_rows(&[vec![alpha, 0.0], vec![0.0, beta]]).unwrap();
            let series = janssen_coefficients(&g, &lattice, 1e-10).unwrap();
            let r = frame_bounds_janssen(&g, &lattice, 64, 1e-10).unwrap();
            assert!(r.lower_a >= 0.0);
            assert!(r.lower_a <= r.upper_b);
            assert!(r.upper_b <= series.upper_bound_estimate() + 1e-12);
        }
    }

    #[test]
    fn verification_confirms_the_vanishing_lower_bound_for_an_odd_window() {
        let g = Window::hermite(&[1]).unwrap();
        let lattice = Lattice::square(0.5).unwrap();
        let report = verify_no_frame(&g, &lattice, 64, 1e-10).unwrap();
        assert!(report.hypotheses_met);
        assert_eq!(report.window_parity, "odd");
        assert_eq!(report.confirmed, Some(true));
        assert!(report.phi_at_zero.unwrap().abs() <= PHI_ZERO_TOL);
        assert!(report.passed());
        assert!(report.conclusion.starts_with("no frame"));
    }

    #[test]
    fn verification_asserts_nothing_for_an_even_window() {
        let g = Window::hermite(&[0]).unwrap();
        let lattice = Lattice::square(0.5).unwrap();
        let report = verify_no_frame(&g, &lattice, 64, 1e-10).unwrap();
        assert!(!report.hypotheses_met);
        assert_eq!(report.confirmed, None);
        assert!(report.passed());
        // The bounds are still computed: the lattice itself is admissible.
        let lower = report.lower_a.unwrap();
        assert!(lower > 1.0, "Gaussian lower bound {lower}");
        assert!(report.conclusion.contains("hypotheses not satisfied"));
    }

    #[test]
    fn verification_survives_lattices_outside_the_series_route() {
        let g = Window::hermite(&[1]).unwrap();
        let lattice = Lattice::square(1.0).unwrap();
        let report = verify_no_frame(&g, &lattice, 64, 1e-10).unwrap();
        assert!(!report.hypotheses_met);
        assert_eq!(report.phi_at_zero, None);
        assert_eq!(report.lower_a, None);
        assert!(report.passed());
    }

    #[test]
    fn scan_reproduces_the_square_and_hexagonal_presets() {
        let g = Window::hermite(&[0]).unwrap();
        let shape = ShapeGrid {
            taus: vec![0.0, 0.5],
            heights: vec![3f64.sqrt() / 2.0, 1.0],
        };
        let rows = scan_lattices(&g, 2.0, &shape, &ScanNumerics::default()).unwrap();
        assert_eq!(rows.len(), 4);
        // Shears outer, heights inner.
        assert_eq!((rows[0].tau, rows[1].tau), (0.0, 0.0));
        assert_eq!((rows[2].tau, rows[3].tau), (0.5, 0.5));
        assert!(rows.iter().all(|r| r.converged));

        let square = frame_bounds_janssen(&g, &Lattice::square(0.5).unwrap(), 64, 1e-10).unwrap();
        assert!((rows[1].lower_a - square.lower_a).abs() <= 1e-12);
        assert!((rows[1].upper_b - square.upper_b).abs() <= 1e-12);
        let hex = frame_bounds_janssen(&g, &Lattice::hexagonal(0.5).unwrap(), 64, 1e-10).unwrap();
        assert!((rows[2].lower_a - hex.lower_a).abs() <= 1e-12);
        assert!((rows[2].upper_b - hex.upper_b).abs() <= 1e-12);
    }

    #[test]
    fn scan_csv_has_the_pinned_header_and_row_count() {
        let g = Window::hermite(&[0]).unwrap();
        let shape = ShapeGrid {
            taus: vec![0.0],
            heights: vec![1.0],
        };
        let rows = scan_lattices(&g, 2.0, &shape, &ScanNumerics::default()).unwrap();
        let mut out = Vec::new();
        write_scan_csv(&rows, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("s,tau,h,A,B,converged"));
        assert_eq!(lines.count(), 1);
    }

    #[test]
    fn json_artifact_has_the_pinned_field_order() {
        let g = Window::hermite(&[0]).unwrap();
        let lattice = Lattice::square(0.5).unwrap();
        let r = frame_bounds_janssen(&g, &lattice, 64, 1e-10).unwrap();
        let first = serde_json::to_string(&r).unwrap();
        assert!(first.starts_with("{\"method\":\"janssen_series\",\"lattice\":{\"M\":[["));
        let keys = [
            "\"method\"",
            "\"lattice\"",
            "\"A\"",
            "\"B\"",
            "\"converged\"",
            "\"grid_res\"",
            "\"truncation_radius\"",
        ];
        let mut last = 0;
        for key in keys {
            let pos = first.find(key).unwrap_or_else(|| panic!("missing {key}"));
            assert!(pos >= last, "field {key} out of order");
            last = pos;
        }
        let second = serde_json::to_string(&r).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn refinement_reports_non_convergence_at_the_resolution_cap() {
        let g = Window::hermite(&[0]).unwrap();
        let lattice = Lattice::square(0.5).unwrap();
        let r = frame_bounds_janssen(&g, &lattice, GRID_RES_CAP_2D, 1e-10).unwrap();
        assert!(!r.converged);
        assert_eq!(r.grid_res, GRID_RES_CAP_2D);
        assert!(matches!(
            frame_bounds_janssen(&g, &lattice, GRID_RES_CAP_2D * 2, 1e-10),
            Err(Error::InvalidConfig(_))
        ));
    }
}
