//! Window functions: normalised Hermite functions, the standard Gaussian, and
//! user-supplied sampled windows.
//!
//! The Hermite family used throughout is orthonormal in `L²(R)` and built
//! against the weight `e^{-πt²}`, so that `h₀(t) = 2^{1/4} e^{-πt²}` and
//!
//! ```text
//! h_{n+1}(t) = 2·√(π/(n+1)) · t · h_n(t) − √(n/(n+1)) · h_{n-1}(t).
//! ```
//!
//! In `d` variables windows are tensor products over coordinates, so a
//! multi-index selects one Hermite factor per axis; the parity of the window
//! is the parity of the index sum.  Sampled windows live on a uniform grid
//! symmetric about 0 with an odd sample count, are normalised to unit `L²`
//! norm of their cubic interpolant, and are zero outside the grid.

use std::path::Path;

use num_complex::Complex64;

use crate::error::Error;
use crate::quadrature::GaussLegendre;
use crate::Result;

/// Per-coordinate cap on the Hermite order.
pub const HERMITE_ORDER_CAP: usize = 20;

/// Truncation radius beyond which analytic windows are numerically zero.
pub const ANALYTIC_DECAY_RADIUS: f64 = 8.0;

/// Tolerance for sampled-window parity detection.
pub const PARITY_TOL: f64 = 1e-8;

/// Reflection-invariant window parity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
    Neither,
}

/// Uniform symmetric sample grid with values, already normalised.
#[derive(Debug, Clone)]
pub struct SampledData {
    /// Grid spacing.
    step: f64,
    /// Samples sit at `t = j·step` for `j ∈ [-half, half]`.
    half: usize,
    /// `2·half + 1` normalised sample values.
    values: Vec<Complex64>,
}

#[derive(Debug, Clone)]
enum WindowKind {
    Hermite { index: Vec<usize> },
    Gaussian { d: usize },
    Sampled(SampledData),
}

/// A normalised window with parity and decay metadata.
#[derive(Debug, Clone)]
pub struct Window {
    kind: WindowKind,
    parity: Parity,
    decay_ok: bool,
    /// When set, the window is evaluated at `-t` (the reflection `g∨`).
    reflected: bool,
}

impl Window {
    /// Tensor-product Hermite window for a multi-index (one order per axis).
    pub fn hermite(index: &[usize]) -> Result<Self> {
        if index.is_empty() {
            return Err(Error::DimensionMismatch("hermite index must be nonempty".into()));
        }
        if let Some(&order) = index.iter().find(|&&n| n > HERMITE_ORDER_CAP) {
            return Err(Error::HermiteOrderCap { order, cap: HERMITE_ORDER_CAP });
        }
        let parity = if index.iter().sum::<usize>() % 2 == 0 { Parity::Even } else { Parity::Odd };
        Ok(Self {
            kind: WindowKind::Hermite { index: index.to_vec() },
            parity,
            decay_ok: true,
            reflected: false,
        })
    }

    /// The standard Gaussian `2^{d/4} e^{-π|t|²}` (the order-zero Hermite
    /// window in every coordinate).
    pub fn gaussian(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::DimensionMismatch("dimension must be positive".into()));
        }
        Ok(Self { kind: WindowKind::Gaussian { d }, parity: Parity::Even, decay_ok: true, reflected: false })
    }

    /// A one-dimensional sampled window.
    ///
    /// `ts` must be a uniform grid symmetric about 0 with an odd number of
    /// points; `values` must not be identically zero.  The stored samples are
    /// scaled so the cubic interpolant has unit `L²` norm.
    pub fn sampled(ts: &[f64], values: &[Complex64]) -> Result<Self> {
        if ts.len() != values.len() {
            return Err(Error::InvalidSamples(format!(
                "{} grid points but {} values",
                ts.len(),
                values.len()
            )));
        }
        if ts.len() < 5 {
            return Err(Error::InvalidSamples("need at least 5 samples".into()));
        }
        if ts.len() % 2 == 0 {
            return Err(Error::InvalidSamples("sample count must be odd".into()));
        }
        if ts.iter().any(|t| !t.is_finite())
            || values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(Error::NonFinite("window sample".into()));
        }
        let n = ts.len();
        let half = n / 2;
        let step = ts[1] - ts[0];
        if step <= 0.0 {
            return Err(Error::InvalidSamples("grid must be strictly increasing".into()));
        }
        for w in ts.windows(2) {
            if ((w[1] - w[0]) - step).abs() > 1e-9 * step {
                return Err(Error::InvalidSamples("grid spacing is not uniform".into()));
            }
        }
        if (ts[half]).abs() > 1e-9 * step || (ts[0] + ts[n - 1]).abs() > 1e-9 * step {
            return Err(Error::InvalidSamples("grid is not symmetric about 0".into()));
        }
        let peak = values.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
        if peak == 0.0 {
            return Err(Error::InvalidSamples("all samples are zero".into()));
        }

        let mut data = SampledData { step, half, values: values.to_vec() };
        let norm = data.interpolant_l2_norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidSamples("samples have no finite positive norm".into()));
        }
        for v in &mut data.values {
            *v /= norm;
        }

        let parity = data.detect_parity();
        let decay_ok = data.decay_ok();
        Ok(Self { kind: WindowKind::Sampled(data), parity, decay_ok, reflected: false })
    }

    /// Reads a sampled window from a CSV file with header `t,re,im`.
    pub fn sampled_from_csv(path: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
        {
            let headers = reader.headers()?;
            let expect = ["t", "re", "im"];
            if headers.len() != 3 || headers.iter().zip(expect).any(|(h, e)| h.trim() != e) {
                return Err(Error::InvalidSamples(format!(
                    "expected CSV header t,re,im, got {:?}",
                    headers.iter().collect::<Vec<_>>()
                )));
            }
        }
        let mut ts = Vec::new();
        let mut vals = Vec::new();
        for record in reader.records() {
            let record = record?;
            let parse = |i: usize| -> Result<f64> {
                record
                    .get(i)
                    .ok_or_else(|| Error::InvalidSamples("short CSV row".into()))?
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::InvalidSamples(format!("bad number in CSV: {e}")))
            };
            ts.push(parse(0)?);
            vals.push(Complex64::new(parse(1)?, parse(2)?));
        }
        Self::sampled(&ts, &vals)
    }

    /// Number of variables.
    pub fn dim_d(&self) -> usize {
        match &self.kind {
            WindowKind::Hermite { index } => index.len(),
            WindowKind::Gaussian { d } => *d,
            WindowKind::Sampled(_) => 1,
        }
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    /// Whether the window decays fast enough for tail-controlled summation.
    pub fn decay_ok(&self) -> bool {
        self.decay_ok
    }

    /// The reflected window `g∨(t) = g(-t)`.
    pub fn reflect(&self) -> Self {
        let mut w = self.clone();
        w.reflected = !w.reflected;
        w
    }

    /// Radius beyond which the window is numerically negligible (used to
    /// truncate quadrature domains).
    pub fn decay_radius(&self) -> f64 {
        match &self.kind {
            WindowKind::Hermite { .. } | WindowKind::Gaussian { .. } => ANALYTIC_DECAY_RADIUS,
            WindowKind::Sampled(s) => s.step * s.half as f64,
        }
    }

    /// Knots where the window is only piecewise smooth (empty for analytic
    /// windows).  Quadrature aligns panel edges with these so the cubic
    /// interpolant is integrated exactly instead of chasing its kinks.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.kind {
            WindowKind::Sampled(s) => {
                let h = s.half as i64;
                (-h..=h).map(|j| j as f64 * s.step).collect()
            }
            _ => Vec::new(),
        }
    }

    /// Evaluates the window at a point of its native dimension.
    pub fn evaluate(&self, t: &[f64]) -> Complex64 {
        debug_assert_eq!(t.len(), self.dim_d());
        let sign = if self.reflected { -1.0 } else { 1.0 };
        match &self.kind {
            WindowKind::Hermite { index } => {
                let mut acc = 1.0;
                for (n, ti) in index.iter().zip(t) {
                    acc *= hermite_value(*n, sign * ti);
                }
                Complex64::new(acc, 0.0)
            }
            WindowKind::Gaussian { .. } => {
                let norm2: f64 = t.iter().map(|v| v * v).sum();
                let amp = 2.0f64.powf(t.len() as f64 / 4.0)
                    * (-std::f64::consts::PI * norm2).exp();
                Complex64::new(amp, 0.0)
            }
            WindowKind::Sampled(s) => s.interpolate(sign * t[0]),
        }
    }

    /// Convenience for `d = 1`.
    pub fn evaluate_1d(&self, t: f64) -> Complex64 {
        self.evaluate(&[t])
    }
}

/// Value of the orthonormal Hermite function of order `n` (weight `e^{-πt²}`).
pub fn hermite_value(n: usize, t: f64) -> f64 {
    let h0 = 2.0f64.powf(0.25) * (-std::f64::consts::PI * t * t).exp();
    if n == 0 {
        return h0;
    }
    let mut prev = h0;
    let mut cur = 2.0 * (std::f64::consts::PI).sqrt() * t * h0;
    for k in 1..n {
        let kf = k as f64;
        let next = 2.0 * (std::f64::consts::PI / (kf + 1.0)).sqrt() * t * cur
            - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

impl SampledData {
    /// Cubic (Catmull–Rom) interpolation on the uniform grid; zero outside.
    fn interpolate(&self, t: f64) -> Complex64 {
        let n = self.values.len();
        let u = t / self.step + self.half as f64;
        if u < 0.0 || u > (n - 1) as f64 {
            return Complex64::new(0.0, 0.0);
        }
        let i = (u.floor() as usize).min(n - 2);
        let frac = u - i as f64;
        let at = |j: isize| -> Complex64 {
            if j < 0 || j as usize >= n {
                Complex64::new(0.0, 0.0)
            } else {
                self.values[j as usize]
            }
        };
        let p0 = at(i as isize - 1);
        let p1 = at(i as isize);
        let p2 = at(i as isize + 1);
        let p3 = at(i as isize + 2);
        let f = frac;
        let f2 = f * f;
        let f3 = f2 * f;
        0.5 * ((2.0 * p1)
            + (p2 - p0) * f
            + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * f2
            + (3.0 * (p1 - p2) + p3 - p0) * f3)
    }

    /// Exact `L²` norm of the piecewise-cubic interpolant.
    ///
    /// Integrates `|g|²` cell by cell with an 8-point rule; the integrand is a
    /// polynomial of degree 6 per cell, so each cell is integrated exactly.
    fn interpolant_l2_norm(&self) -> f64 {
        let rule = GaussLegendre::new(8);
        let n = self.values.len();
        let mut acc = 0.0;
        for cell in 0..(n - 1) {
            let lo = (cell as f64 - self.half as f64) * self.step;
            let mid = lo + 0.5 * self.step;
            for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                let t = mid + 0.5 * self.step * x;
                acc += self.interpolate(t).norm_sqr() * w * 0.5 * self.step;
            }
        }
        acc.sqrt()
    }

    /// Even/odd detection by comparing mirrored samples.
    fn detect_parity(&self) -> Parity {
        let n = self.values.len();
        let mut even_dev = 0.0f64;
        let mut odd_dev = 0.0f64;
        for j in 0..n {
            let a = self.values[j];
            let b = self.values[n - 1 - j];
            even_dev = even_dev.max((a - b).norm());
            odd_dev = odd_dev.max((a + b).norm());
        }
        if even_dev <= PARITY_TOL {
            Parity::Even
        } else if odd_dev <= PARITY_TOL {
            Parity::Odd
        } else {
            Parity::Neither
        }
    }

    /// True when the outer 10% of samples on each side are below `1e-6` of
    /// the peak magnitude.
    fn decay_ok(&self) -> bool {
        let n = self.values.len();
        let peak = self.values.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
        let margin = (n / 10).max(1);
        let limit = 1e-6 * peak;
        let head = self.values.iter().take(margin);
        let tail = self.values.iter().rev().take(margin);
        head.chain(tail).all(|v| v.norm() < limit)
    }
}
