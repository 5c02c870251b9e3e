//! Phase-space transforms of windows: STFT, ambiguity and Wigner functions
//! evaluated pointwise by quadrature, and a gridded symplectic Fourier
//! transform acting on sampled phase-space functions.
//!
//! Conventions (for `f, g` on `R^d`, `λ = (x, ω)`):
//!
//! ```text
//! V_g f(x, ω) = ∫ f(t) conj(g(t − x)) e^{-2πi ω·t} dt
//! A_g f(x, ω) = ∫ f(t + x/2) conj(g(t − x/2)) e^{-2πi ω·t} dt = e^{πi ω·x} V_g f(x, ω)
//! W_g f(x, ω) = ∫ f(x + t/2) conj(g(x − t/2)) e^{-2πi ω·t} dt = 2^d A_{g∨} f(2x, 2ω)
//! ```
//!
//! The symplectic Fourier transform `F_σ F(λ) = ∬ F(λ') e^{-2πi σ(λ, λ')} dλ'`
//! swaps the ambiguity and Wigner pictures; on samples it is computed by
//! separable quadrature over the input grid, one `(x_i, ω_i)` pair at a time.

use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::lattice::PhaseSpacePoint;
use crate::quadrature::PanelQuadrature;
use crate::windows::Window;
use crate::Result;

/// Relative boundary-decay requirement for gridded transforms.
pub const BOUNDARY_DECAY_LIMIT: f64 = 1e-8;

/// One uniform sampling axis with inclusive endpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl AxisSpec {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) {
            return Err(Error::NonFinite("axis extent".into()));
        }
        if count < 2 || max <= min {
            return Err(Error::InvalidConfig(format!(
                "axis needs max > min and count ≥ 2, got [{min}, {max}] with {count}"
            )));
        }
        Ok(Self { min, max, count })
    }

    pub fn spacing(&self) -> f64 {
        (self.max - self.min) / (self.count - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        self.min + i as f64 * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.point(i)).collect()
    }

    /// Largest absolute coordinate on the axis.
    pub fn abs_max(&self) -> f64 {
        self.min.abs().max(self.max.abs())
    }
}

/// A rectangular grid in `R^{2d}`, axes ordered `(x_1..x_d, ω_1..ω_d)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub axes: Vec<AxisSpec>,
}

impl GridSpec {
    pub fn new(axes: Vec<AxisSpec>) -> Result<Self> {
        if axes.is_empty() || axes.len() % 2 != 0 {
            return Err(Error::DimensionMismatch(format!(
                "grid needs an even positive number of axes, got {}",
                axes.len()
            )));
        }
        Ok(Self { axes })
    }

    /// Centred square grid: every axis is `[-extent, extent]` with `count`
    /// points.
    pub fn centred(two_d: usize, extent: f64, count: usize) -> Result<Self> {
        let axis = AxisSpec::new(-extent, extent, count)?;
        Self::new(vec![axis; two_d])
    }

    pub fn dim_2d(&self) -> usize {
        self.axes.len()
    }

    pub fn total_points(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    /// Decodes a flat row-major index (axis 0 slowest) into per-axis indices.
    fn unravel(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.axes.len()];
        for (i, axis) in self.axes.iter().enumerate().rev() {
            idx[i] = flat % axis.count;
            flat /= axis.count;
        }
        idx
    }

    /// The phase-space point at the given per-axis indices.
    fn point_at(&self, idx: &[usize]) -> PhaseSpacePoint {
        let coords: Vec<f64> = idx.iter().zip(&self.axes).map(|(i, a)| a.point(*i)).collect();
        PhaseSpacePoint::from_flat(&coords).expect("grid axes are even in number")
    }
}

/// A complex-valued function sampled on a rectangular phase-space grid.
#[derive(Debug, Clone)]
pub struct PhaseSpaceFunctionSample {
    pub grid: GridSpec,
    /// Row-major values, axis 0 slowest.
    pub values: Vec<Complex64>,
    /// Free-form label describing what was sampled, carried into
    /// serialised artifacts.
    pub meta: String,
}

impl PhaseSpaceFunctionSample {
    /// Samples a closure on every grid point (parallel, deterministic order).
    pub fn from_fn<F>(grid: GridSpec, meta: impl Into<String>, f: F) -> Result<Self>
    where
        F: Fn(&PhaseSpacePoint) -> Result<Complex64> + Sync,
    {
        let total = grid.total_points();
        let values: Result<Vec<Complex64>> = (0..total)
            .into_par_iter()
            .map(|flat| {
                let idx = grid.unravel(flat);
                f(&grid.point_at(&idx))
            })
            .collect();
        Ok(Self { grid, values: values?, meta: meta.into() })
    }

    /// The sampled value at per-axis indices.
    pub fn value_at(&self, idx: &[usize]) -> Complex64 {
        let mut flat = 0;
        for (i, axis) in idx.iter().zip(&self.grid.axes) {
            flat = flat * axis.count + i;
        }
        self.values[flat]
    }

    /// Largest magnitude over all samples.
    pub fn peak(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest magnitude over grid boundary points (any axis index at an end).
    pub fn boundary_peak(&self) -> f64 {
        let mut peak = 0.0f64;
        for (flat, v) in self.values.iter().enumerate() {
            let idx = self.grid.unravel(flat);
            let on_boundary = idx
                .iter()
                .zip(&self.grid.axes)
                .any(|(i, a)| *i == 0 || *i + 1 == a.count);
            if on_boundary {
                peak = peak.max(v.norm());
            }
        }
        peak
    }

    /// Writes the sample as CSV plus a JSON sidecar with the grid metadata.
    ///
    /// Columns are `x,omega,re,im` for `2d = 2` and `x1,x2,w1,w2,re,im` for
    /// `2d = 4`; the sidecar replaces the data file's extension with `.json`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let two_d = self.grid.dim_2d();
        let header: &[&str] = match two_d {
            2 => &["x", "omega", "re", "im"],
            4 => &["x1", "x2", "w1", "w2", "re", "im"],
            other => return Err(Error::UnsupportedDimension(other)),
        };
        let mut writer = csv::Writer::from_path(path)?;
        writer.write_record(header)?;
        for (flat, v) in self.values.iter().enumerate() {
            let idx = self.grid.unravel(flat);
            let pt = self.grid.point_at(&idx);
            let mut record: Vec<String> = pt.flat().iter().map(|c| format!("{c}")).collect();
            record.push(format!("{}", v.re));
            record.push(format!("{}", v.im));
            writer.write_record(&record)?;
        }
        writer.flush()?;
        let sidecar = path.with_extension("json");
        let meta = serde_json::json!({ "axes": self.grid.axes, "meta": self.meta });
        std::fs::write(sidecar, serde_json::to_string_pretty(&meta)?)?;
        Ok(())
    }
}

/// Checks windows share a dimension supported by the quadrature backend.
fn check_pair(f: &Window, g: &Window) -> Result<usize> {
    let d = f.dim_d();
    if g.dim_d() != d {
        return Err(Error::DimensionMismatch(format!(
            "window dimensions differ: {d} vs {}",
            g.dim_d()
        )));
    }
    if d > 2 {
        return Err(Error::UnsupportedDimension(2 * d));
    }
    Ok(d)
}

/// Intersection of per-axis truncation intervals; `None` when empty.
fn intersect(a: (f64, f64), b: (f64, f64)) -> Option<(f64, f64)> {
    let lo = a.0.max(b.0);
    let hi = a.1.min(b.1);
    (lo < hi).then_some((lo, hi))
}

/// Both windows' smoothness knots mapped into the integration variable
/// (`d = 1` only; analytic windows contribute nothing).
fn merged_breaks(
    d: usize,
    to_t_f: impl Fn(f64) -> f64,
    f: &Window,
    to_t_g: impl Fn(f64) -> f64,
    g: &Window,
) -> Vec<f64> {
    if d != 1 {
        return Vec::new();
    }
    let mut out: Vec<f64> = f.breakpoints().into_iter().map(to_t_f).collect();
    out.extend(g.breakpoints().into_iter().map(to_t_g));
    out
}

/// Shared driver: integrates `f_shift(t)·conj(g_shift(t))·e^{-2πi ω_eff·t}`
/// over the intersection of the windows' truncated supports.
///
/// `sup_f`/`sup_g` give each factor's support interval per axis; `omega_eff`
/// the oscillation vector.  `t_breaks` lists the integrand's smoothness
/// breakpoints in the integration variable (sampled windows only, `d = 1`).
fn transform_integral(
    f: &Window,
    g: &Window,
    d: usize,
    sup_f: &dyn Fn(usize) -> (f64, f64),
    sup_g: &dyn Fn(usize) -> (f64, f64),
    arg_f: &dyn Fn(&[f64]) -> Vec<f64>,
    arg_g: &dyn Fn(&[f64]) -> Vec<f64>,
    omega_eff: &[f64],
    t_breaks: Vec<f64>,
) -> Result<Complex64> {
    let mut intervals = Vec::with_capacity(d);
    for axis in 0..d {
        match intersect(sup_f(axis), sup_g(axis)) {
            Some(iv) => intervals.push(iv),
            None => return Ok(Complex64::new(0.0, 0.0)),
        }
    }
    let quad = PanelQuadrature::default();
    let phase = |t: &[f64]| -> Complex64 {
        let dot: f64 = omega_eff.iter().zip(t).map(|(w, ti)| w * ti).sum();
        Complex64::new(0.0, -2.0 * std::f64::consts::PI * dot).exp()
    };
    match d {
        1 => quad.integrate_with_breaks(
            |t| {
                let tv = [t];
                f.evaluate(&arg_f(&tv)) * g.evaluate(&arg_g(&tv)).conj() * phase(&tv)
            },
            intervals[0].0,
            intervals[0].1,
            omega_eff[0].abs(),
            &t_breaks,
        ),
        2 => quad.integrate2(
            |t1, t2| {
                let tv = [t1, t2];
                f.evaluate(&arg_f(&tv)) * g.evaluate(&arg_g(&tv)).conj() * phase(&tv)
            },
            intervals[0],
            intervals[1],
            (omega_eff[0].abs(), omega_eff[1].abs()),
        ),
        _ => unreachable!("dimensions checked by caller"),
    }
}

/// Short-time Fourier transform `V_g f(λ)`.
pub fn stft(f: &Window, g: &Window, at: &PhaseSpacePoint) -> Result<Complex64> {
    let d = check_pair(f, g)?;
    if at.dim_d() != d {
        return Err(Error::DimensionMismatch("evaluation point dimension".into()));
    }
    let rf = f.decay_radius();
    let rg = g.decay_radius();
    let x = at.x.clone();
    let breaks = merged_breaks(d, |u| u, f, |u| u + x[0], g);
    transform_integral(
        f,
        g,
        d,
        &|_axis| (-rf, rf),
        &|axis| (x[axis] - rg, x[axis] + rg),
        &|t| t.to_vec(),
        &|t| t.iter().zip(&x).map(|(ti, xi)| ti - xi).collect(),
        &at.omega,
        breaks,
    )
}

/// Cross-ambiguity function `A_g f(λ)` (symmetric time shift).
pub fn ambiguity(f: &Window, g: &Window, at: &PhaseSpacePoint) -> Result<Complex64> {
    let d = check_pair(f, g)?;
    if at.dim_d() != d {
        return Err(Error::DimensionMismatch("evaluation point dimension".into()));
    }
    let rf = f.decay_radius();
    let rg = g.decay_radius();
    let x = at.x.clone();
    let breaks = merged_breaks(d, |u| u - x[0] / 2.0, f, |u| u + x[0] / 2.0, g);
    transform_integral(
        f,
        g,
        d,
        &|axis| (-rf - x[axis] / 2.0, rf - x[axis] / 2.0),
        &|axis| (-rg + x[axis] / 2.0, rg + x[axis] / 2.0),
        &|t| t.iter().zip(&x).map(|(ti, xi)| ti + xi / 2.0).collect(),
        &|t| t.iter().zip(&x).map(|(ti, xi)| ti - xi / 2.0).collect(),
        &at.omega,
        breaks,
    )
}

/// Cross-Wigner distribution `W_g f(λ)`.
pub fn wigner(f: &Window, g: &Window, at: &PhaseSpacePoint) -> Result<Complex64> {
    let d = check_pair(f, g)?;
    if at.dim_d() != d {
        return Err(Error::DimensionMismatch("evaluation point dimension".into()));
    }
    let rf = f.decay_radius();
    let rg = g.decay_radius();
    let x = at.x.clone();
    let breaks = merged_breaks(d, |u| 2.0 * (u - x[0]), f, |u| 2.0 * (x[0] - u), g);
    transform_integral(
        f,
        g,
        d,
        &|axis| (-2.0 * (rf + x[axis]), 2.0 * (rf - x[axis])),
        &|axis| (2.0 * (x[axis] - rg), 2.0 * (x[axis] + rg)),
        &|t| t.iter().zip(&x).map(|(ti, xi)| xi + ti / 2.0).collect(),
        &|t| t.iter().zip(&x).map(|(ti, xi)| xi - ti / 2.0).collect(),
        &at.omega,
        breaks,
    )
}

/// Wigner distribution through the algebraic route
/// `W_g f(λ) = 2^d · A_{g∨} f(2λ)`.
pub fn wigner_via_ambiguity(f: &Window, g: &Window, at: &PhaseSpacePoint) -> Result<Complex64> {
    let d = check_pair(f, g)?;
    let reflected = g.reflect();
    let doubled = at.scaled(2.0);
    Ok(ambiguity(f, &reflected, &doubled)? * 2.0f64.powi(d as i32))
}

/// Samples `A_g f` on a grid.
pub fn sample_ambiguity(
    f: &Window,
    g: &Window,
    grid: GridSpec,
    meta: impl Into<String>,
) -> Result<PhaseSpaceFunctionSample> {
    check_pair(f, g)?;
    let meta = meta.into();
    PhaseSpaceFunctionSample::from_fn(grid, meta, |p| ambiguity(f, g, p))
}

/// Samples `W_g f` on a grid.
pub fn sample_wigner(
    f: &Window,
    g: &Window,
    grid: GridSpec,
    meta: impl Into<String>,
) -> Result<PhaseSpaceFunctionSample> {
    check_pair(f, g)?;
    let meta = meta.into();
    PhaseSpaceFunctionSample::from_fn(grid, meta, |p| wigner(f, g, p))
}

/// Phase-space dilation `D_α F(λ) = F(αλ)` of a sample.
///
/// The grid point `λ` of the output carries the input's value at `αλ`, so the
/// stored values are untouched and each axis extent shrinks by `α`.
pub fn dilate(sample: &PhaseSpaceFunctionSample, alpha: f64) -> Result<PhaseSpaceFunctionSample> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::InvalidConfig(format!("dilation factor must be positive, got {alpha}")));
    }
    let axes = sample
        .grid
        .axes
        .iter()
        .map(|a| AxisSpec::new(a.min / alpha, a.max / alpha, a.count))
        .collect::<Result<Vec<_>>>()?;
    Ok(PhaseSpaceFunctionSample {
        grid: GridSpec::new(axes)?,
        values: sample.values.clone(),
        meta: format!("dilate({alpha})·{}", sample.meta),
    })
}

/// Gridded symplectic Fourier transform.
///
/// Requires `2d ∈ {2, 4}`, input values decaying below
/// [`BOUNDARY_DECAY_LIMIT`] (relative to the peak) on the grid boundary, and
/// input sampling fine enough for the requested output extent (Nyquist).  The
/// integral is evaluated by separable Riemann–trapezoid sums, one `(x_i, ω_i)`
/// pair at a time.
pub fn symplectic_fourier(
    sample: &PhaseSpaceFunctionSample,
    out_grid: &GridSpec,
) -> Result<PhaseSpaceFunctionSample> {
    let two_d = sample.grid.dim_2d();
    if two_d != 2 && two_d != 4 {
        return Err(Error::UnsupportedDimension(two_d));
    }
    if out_grid.dim_2d() != two_d {
        return Err(Error::DimensionMismatch(format!(
            "output grid has {} axes, input has {two_d}",
            out_grid.dim_2d()
        )));
    }
    let peak = sample.peak();
    if peak == 0.0 {
        return Err(Error::InvalidSamples("sample is identically zero".into()));
    }
    let boundary = sample.boundary_peak();
    if boundary > BOUNDARY_DECAY_LIMIT * peak {
        return Err(Error::InsufficientDecay {
            boundary: boundary / peak,
            limit: BOUNDARY_DECAY_LIMIT,
        });
    }
    let d = two_d / 2;
    // Nyquist: sampling along x_i' must resolve phases up to the output ω_i
    // extent and vice versa.
    for i in 0..d {
        let dx = sample.grid.axes[i].spacing();
        let needed_w = out_grid.axes[d + i].abs_max();
        if needed_w > 0.0 && dx > 1.0 / (2.0 * needed_w) {
            return Err(Error::GridTooCoarse {
                axis: i,
                spacing: dx,
                nyquist: 1.0 / (2.0 * dx),
                needed: needed_w,
            });
        }
        let dw = sample.grid.axes[d + i].spacing();
        let needed_x = out_grid.axes[i].abs_max();
        if needed_x > 0.0 && dw > 1.0 / (2.0 * needed_x) {
            return Err(Error::GridTooCoarse {
                axis: d + i,
                spacing: dw,
                nyquist: 1.0 / (2.0 * dw),
                needed: needed_x,
            });
        }
    }

    let mut dims: Vec<usize> = sample.grid.axes.iter().map(|a| a.count).collect();
    let mut values = sample.values.clone();
    for i in 0..d {
        let in_x = sample.grid.axes[i].points();
        let in_w = sample.grid.axes[d + i].points();
        let out_x = out_grid.axes[i].points();
        let out_w = out_grid.axes[d + i].points();
        let weight = sample.grid.axes[i].spacing() * sample.grid.axes[d + i].spacing();
        let (next, next_dims) =
            pair_transform(&values, &dims, i, d + i, &in_x, &in_w, &out_x, &out_w, weight);
        values = next;
        dims = next_dims;
    }
    Ok(PhaseSpaceFunctionSample {
        grid: out_grid.clone(),
        values,
        meta: format!("symplectic_fourier({})", sample.meta),
    })
}

/// Replaces one `(x, ω)` axis pair by its symplectic-Fourier conjugate pair.
///
/// For each setting of the remaining axes this computes
/// `out[a, b] = Δ · Σ_{i,j} in[i, j] e^{-2πi x_out[a] ω'[j]} e^{2πi ω_out[b] x'[i]}`
/// in two separable stages.
#[allow(clippy::too_many_arguments)]
fn pair_transform(
    values: &[Complex64],
    dims: &[usize],
    ax_x: usize,
    ax_w: usize,
    in_x: &[f64],
    in_w: &[f64],
    out_x: &[f64],
    out_w: &[f64],
    weight: f64,
) -> (Vec<Complex64>, Vec<usize>) {
    let n = dims.len();
    let strides = row_major_strides(dims);
    // Phase tables.
    let tau = 2.0 * std::f64::consts::PI;
    let ph_xw: Vec<Complex64> = out_x
        .iter()
        .flat_map(|xa| in_w.iter().map(move |wj| Complex64::new(0.0, -tau * xa * wj).exp()))
        .collect();
    let ph_wx: Vec<Complex64> = out_w
        .iter()
        .flat_map(|wb| in_x.iter().map(move |xi| Complex64::new(0.0, tau * wb * xi).exp()))
        .collect();

    let mut out_dims = dims.to_vec();
    out_dims[ax_x] = out_x.len();
    out_dims[ax_w] = out_w.len();
    let out_strides = row_major_strides(&out_dims);
    let mut out = vec![Complex64::new(0.0, 0.0); out_dims.iter().product()];

    // Iterate over the other axes.
    let mut other_axes: Vec<usize> = (0..n).filter(|a| *a != ax_x && *a != ax_w).collect();
    other_axes.sort_unstable();
    let mut other_idx = vec![0usize; other_axes.len()];
    loop {
        let mut base_in = 0;
        let mut base_out = 0;
        for (pos, &axis) in other_axes.iter().enumerate() {
            base_in += other_idx[pos] * strides[axis];
            base_out += other_idx[pos] * out_strides[axis];
        }
        // Stage 1: contract the ω' axis against out_x phases.
        // T[a][i] for a over out_x, i over in_x.
        let mut t = vec![Complex64::new(0.0, 0.0); out_x.len() * in_x.len()];
        for (a, trow) in t.chunks_mut(in_x.len()).enumerate() {
            let ph = &ph_xw[a * in_w.len()..(a + 1) * in_w.len()];
            for (i, tv) in trow.iter_mut().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                let row = base_in + i * strides[ax_x];
                for (j, phj) in ph.iter().enumerate() {
                    acc += values[row + j * strides[ax_w]] * phj;
                }
                *tv = acc;
            }
        }
        // Stage 2: contract the x' axis against out_w phases.
        for (a, trow) in t.chunks(in_x.len()).enumerate() {
            for b in 0..out_w.len() {
                let ph = &ph_wx[b * in_x.len()..(b + 1) * in_x.len()];
                let mut acc = Complex64::new(0.0, 0.0);
                for (i, phi) in ph.iter().enumerate() {
                    acc += trow[i] * phi;
                }
                out[base_out + a * out_strides[ax_x] + b * out_strides[ax_w]] = acc * weight;
            }
        }
        // Odometer over the other axes.
        let mut pos = other_axes.len();
        loop {
            if pos == 0 {
                return (out, out_dims);
            }
            pos -= 1;
            other_idx[pos] += 1;
            if other_idx[pos] < dims[other_axes[pos]] {
                break;
            }
            other_idx[pos] = 0;
        }
    }
}

fn row_major_strides(dims: &[usize]) -> Vec<usize> {
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    strides
}
