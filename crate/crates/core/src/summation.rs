//! Absolutely convergent sums over lattice point sets with certified
//! truncation, plus the identities built on them: Poisson summation in its
//! classical (dual-lattice) and symplectic (adjoint-lattice) forms, the
//! vanishing of `Σ_{λ∈Λ} W_g f(λ)` and `Σ_{λ°∈Λ°} A_g f(λ°)` for odd `g`
//! on symplectic lattices of covolume `2^{-d}`, and the real-valued series
//!
//! ```text
//! φ(z) = vol(Λ)^{-1} Σ_{λ°∈Λ°} A_g g(λ°) e^{2πi σ(λ°, z)}
//! ```
//!
//! whose essential extrema are the sharp frame bounds of the associated
//! Gabor system when the redundancy `vol(Λ)^{-1/d}` is an even integer.
//!
//! Truncation control: terms are summed (Neumaier-compensated, in the fixed
//! order "norm, then index") inside a growing ball; the remainder is bounded
//! by fitting `C e^{-a r²}` to the magnitudes in the outer shell and
//! integrating that envelope over the exterior, normalised by the lattice
//! covolume.

use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::Error;
use crate::lattice::{symplectic_form, Lattice, PhaseSpacePoint, DEFAULT_POINT_CAP, SYMPLECTIC_TOL};
use crate::phase_space::{ambiguity, wigner};
use crate::windows::{Parity, Window};
use crate::Result;

/// Default certified-tail target for lattice sums.
pub const DEFAULT_TAIL_TARGET: f64 = 1e-10;

/// First truncation radius tried.
const INITIAL_RADIUS: f64 = 4.0;
/// Multiplicative radius growth between passes.
const RADIUS_GROWTH: f64 = 1.4;
/// Hard ceiling on the truncation radius.
const MAX_RADIUS: f64 = 260.0;
/// Minimum number of points wanted in the tail-fit shell.
const MIN_SHELL_POINTS: usize = 8;
/// Tolerance for treating the lattice covolume as `2^{-d}`.
const COVOLUME_TOL: f64 = 1e-10;
/// Largest acceptable imaginary part of the (real) series `φ`.
pub const PHI_IMAGINARY_TOL: f64 = 1e-9;

/// Outcome of a truncated lattice sum.
#[derive(Debug, Clone)]
pub struct LatticeSumResult {
    pub value: Complex64,
    /// Ball radius the sum was truncated at.
    pub truncation_radius: f64,
    /// Certified bound on the dropped remainder.
    pub tail_estimate: f64,
    pub terms_used: usize,
}

/// One retained term of a truncated lattice sum.
#[derive(Debug, Clone)]
pub struct LatticeTerm {
    pub index: Vec<i64>,
    pub point: PhaseSpacePoint,
    pub value: Complex64,
}

/// The terms of a truncated lattice sum, in the deterministic summation
/// order (point norm, then index), with the certified tail.
#[derive(Debug, Clone)]
pub struct LatticeTerms {
    pub terms: Vec<LatticeTerm>,
    pub truncation_radius: f64,
    pub tail_estimate: f64,
}

/// Compensated scalar accumulator (Neumaier variant of Kahan summation).
#[derive(Debug, Default, Clone, Copy)]
struct Compensated {
    sum: f64,
    correction: f64,
}

impl Compensated {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.correction += (self.sum - t) + v;
        } else {
            self.correction += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.correction
    }
}

/// Fits `C e^{-a r²}` to shell magnitudes and bounds the exterior sum.
///
/// Returns `f64::INFINITY` when no certifying fit exists (too few points,
/// no decay).  Magnitudes that underflowed to zero are ignored; an entirely
/// zero shell certifies a zero tail.
fn estimate_tail(shell: &[(f64, f64)], radius: f64, covolume: f64, two_d: usize) -> f64 {
    let data: Vec<(f64, f64)> = shell
        .iter()
        .filter(|(_, m)| *m > 1e-300)
        .map(|(r, m)| (r * r, m.ln()))
        .collect();
    if data.is_empty() {
        return 0.0;
    }
    if data.len() < 2 {
        return f64::INFINITY;
    }
    let n = data.len() as f64;
    let mean_x: f64 = data.iter().map(|(x, _)| x).sum::<f64>() / n;
    let mean_y: f64 = data.iter().map(|(_, y)| y).sum::<f64>() / n;
    let sxx: f64 = data.iter().map(|(x, _)| (x - mean_x).powi(2)).sum();
    if sxx < 1e-12 {
        return f64::INFINITY;
    }
    let sxy: f64 = data.iter().map(|(x, y)| (x - mean_x) * (y - mean_y)).sum();
    let slope = sxy / sxx;
    let a = -slope;
    if !(a.is_finite() && a > 1e-6) {
        return f64::INFINITY;
    }
    let ln_c = mean_y + a * mean_x;
    // ∫_{|λ|>R} C e^{-a|λ|²} dλ / covol, for 2d ∈ {2, 4}.
    let ln_envelope = match two_d {
        2 => ln_c - a * radius * radius + (std::f64::consts::PI / (a * covolume)).ln(),
        4 => {
            let u = a * radius * radius;
            ln_c - u
                + (std::f64::consts::PI.powi(2) * (u + 1.0) / (a * a * covolume)).ln()
        }
        _ => return f64::INFINITY,
    };
    ln_envelope.exp()
}

/// Collects the terms of `Σ_{λ∈Λ} f(λ)` inside a ball large enough that the
/// fitted remainder drops below `tail_target`.
///
/// Point values are cached across radius passes, so `f` is evaluated once
/// per lattice point even though the ball grows.  Evaluation is parallel;
/// the returned terms are in the deterministic order (norm, then index).
pub fn lattice_terms<F>(lattice: &Lattice, f: F, tail_target: f64) -> Result<LatticeTerms>
where
    F: Fn(&PhaseSpacePoint) -> Result<Complex64> + Sync,
{
    if !(tail_target.is_finite() && tail_target > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "tail target must be positive and finite, got {tail_target}"
        )));
    }
    let two_d = 2 * lattice.dim_d();
    let mut cache: HashMap<Vec<i64>, Complex64> = HashMap::new();
    let mut radius = INITIAL_RADIUS;
    let mut last_tail = f64::INFINITY;
    loop {
        let points = match lattice.enumerate_points(radius, DEFAULT_POINT_CAP) {
            Ok(p) => p,
            Err(Error::PointCapExceeded { .. }) => {
                return Err(Error::TailNotReached {
                    tail: last_tail,
                    target: tail_target,
                    radius,
                })
            }
            Err(e) => return Err(e),
        };
        let missing: Vec<_> = points.iter().filter(|p| !cache.contains_key(&p.index)).collect();
        let fresh: Result<Vec<Complex64>> =
            missing.par_iter().map(|p| f(&p.point)).collect();
        for (p, v) in missing.iter().zip(fresh?) {
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::NonFinite(format!("summand at index {:?}", p.index)));
            }
            cache.insert(p.index.clone(), v);
        }

        let mut ordered: Vec<&crate::lattice::LatticePoint> = points.iter().collect();
        ordered.sort_by(|a, b| {
            a.point
                .norm()
                .partial_cmp(&b.point.norm())
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| a.index.cmp(&b.index))
        });

        let mut shell_lo = 0.75 * radius;
        let mut shell: Vec<(f64, f64)> = Vec::new();
        loop {
            shell.clear();
            shell.extend(ordered.iter().filter_map(|p| {
                let r = p.point.norm();
                (r >= shell_lo).then(|| (r, cache[&p.index].norm()))
            }));
            if shell.len() >= MIN_SHELL_POINTS || shell_lo <= 0.25 * radius {
                break;
            }
            shell_lo *= 0.8;
        }
        let tail = estimate_tail(&shell, radius, lattice.volume(), two_d);
        if tail <= tail_target {
            let terms = ordered
                .into_iter()
                .map(|p| LatticeTerm {
                    index: p.index.clone(),
                    point: p.point.clone(),
                    value: cache[&p.index],
                })
                .collect();
            return Ok(LatticeTerms { terms, truncation_radius: radius, tail_estimate: tail });
        }
        last_tail = tail;
        if radius >= MAX_RADIUS {
            return Err(Error::TailNotReached { tail, target: tail_target, radius });
        }
        radius = (radius * RADIUS_GROWTH).min(MAX_RADIUS);
    }
}

/// Sums `f` over the lattice with a certified truncation tail.
///
/// Accumulation is compensated (Neumaier) and sequential in the fixed
/// deterministic order produced by [`lattice_terms`].
pub fn lattice_sum<F>(lattice: &Lattice, f: F, tail_target: f64) -> Result<LatticeSumResult>
where
    F: Fn(&PhaseSpacePoint) -> Result<Complex64> + Sync,
{
    let collected = lattice_terms(lattice, f, tail_target)?;
    let mut re = Compensated::default();
    let mut im = Compensated::default();
    for term in &collected.terms {
        re.add(term.value.re);
        im.add(term.value.im);
    }
    Ok(LatticeSumResult {
        value: Complex64::new(re.total(), im.total()),
        truncation_radius: collected.truncation_radius,
        tail_estimate: collected.tail_estimate,
        terms_used: collected.terms.len(),
    })
}

/// Both sides of a Poisson-summation identity and their difference.
#[derive(Debug, Clone)]
pub struct PoissonCheck {
    /// `Σ_{λ∈Λ} f(λ)`.
    pub direct: Complex64,
    /// `vol(Λ)^{-1} Σ_{μ}` of the transformed function over the paired lattice.
    pub dual_side: Complex64,
    pub residual: f64,
}

/// Classical Poisson summation: `Σ_{λ∈Λ} f(λ) = vol(Λ)^{-1} Σ_{μ∈Λ⊥} f̂(μ)`.
///
/// The caller supplies both `f` and its Fourier transform `f̂`.
pub fn poisson_check<F, G>(
    lattice: &Lattice,
    f: F,
    f_hat: G,
    tail_target: f64,
) -> Result<PoissonCheck>
where
    F: Fn(&PhaseSpacePoint) -> Result<Complex64> + Sync,
    G: Fn(&PhaseSpacePoint) -> Result<Complex64> + Sync,
{
    let direct = lattice_sum(lattice, f, tail_target)?.value;
    let dual = lattice.dual()?;
    let dual_side = lattice_sum(&dual, f_hat, tail_target)?.value / lattice.volume();
    Ok(PoissonCheck { direct, dual_side, residual: (direct - dual_side).norm() })
}

/// Symplectic Poisson summation:
/// `Σ_{λ∈Λ} F(λ) = vol(Λ)^{-1} Σ_{μ∈Λ°} F_σF(μ)` over the adjoint lattice.
pub fn symplectic_poisson_check<F, G>(
    lattice: &Lattice,
    f: F,
    f_sigma: G,
    tail_target: f64,
) -> Result<PoissonCheck>
where
    F: Fn(&PhaseSpacePoint) -> Result<Complex64> + Sync,
    G: Fn(&PhaseSpacePoint) -> Result<Complex64> + Sync,
{
    let direct = lattice_sum(lattice, f, tail_target)?.value;
    let adjoint = lattice.adjoint()?;
    let dual_side = lattice_sum(&adjoint, f_sigma, tail_target)?.value / lattice.volume();
    Ok(PoissonCheck { direct, dual_side, residual: (direct - dual_side).norm() })
}

/// The two sides of the vanishing-sum identity: the Wigner cross-transform
/// summed over the lattice itself, and the ambiguity function summed over
/// its adjoint.
#[derive(Debug, Clone)]
pub struct VanishingSums {
    /// `Σ_{λ∈Λ} W_g f(λ)`.
    pub wigner_sum: LatticeSumResult,
    /// `Σ_{λ°∈Λ°} A_g f(λ°)`.
    pub ambiguity_sum: LatticeSumResult,
}

/// Sums `W_g f` over a symplectic lattice with covolume `2^{-d}` and
/// `A_g f` over its adjoint, for odd `g` — two sums that vanish
/// identically.  The two series are evaluated through independent
/// quadrature routes, so each acts as a cross-check on the other.
///
/// The preconditions are enforced, not assumed: a window without definite
/// odd parity, a non-symplectic lattice, or a covolume away from `2^{-d}`
/// is rejected.
pub fn vanishing_sum_check(
    f: &Window,
    g: &Window,
    lattice: &Lattice,
    tail_target: f64,
) -> Result<VanishingSums> {
    if g.parity() != Parity::Odd {
        return Err(Error::WindowPrecondition(
            "the analysis window must be odd for the vanishing-sum identity".into(),
        ));
    }
    let d = lattice.dim_d();
    if f.dim_d() != d || g.dim_d() != d {
        return Err(Error::DimensionMismatch(format!(
            "windows of dimension {}/{} on a lattice of dimension {d}",
            f.dim_d(),
            g.dim_d()
        )));
    }
    let check = lattice.symplectic_lattice_check(SYMPLECTIC_TOL)?;
    if !check.is_symplectic {
        return Err(Error::LatticePrecondition(format!(
            "lattice is not symplectic (residual {:.3e})",
            check.residual
        )));
    }
    let expected = 0.5f64.powi(d as i32);
    if (lattice.volume() - expected).abs() > COVOLUME_TOL {
        return Err(Error::LatticePrecondition(format!(
            "covolume {} is not 2^-d = {expected}",
            lattice.volume()
        )));
    }
    let adjoint = lattice.adjoint()?;
    let wigner_sum = lattice_sum(lattice, |p| wigner(f, g, p), tail_target)?;
    let ambiguity_sum = lattice_sum(&adjoint, |p| ambiguity(f, g, p), tail_target)?;
    Ok(VanishingSums { wigner_sum, ambiguity_sum })
}

/// Evaluates `φ(z) = vol(Λ)^{-1} Σ_{λ°∈Λ°} A_g g(λ°) e^{2πi σ(λ°, z)}`.
///
/// Defined (as a frame-operator symbol) only when the redundancy
/// `vol(Λ)^{-1/d}` is an even integer; odd integer redundancies would need
/// alternating phase factors and are rejected.  The series is real up to
/// quadrature noise; a larger imaginary part is reported as an error.
pub fn phi_series(
    g: &Window,
    lattice: &Lattice,
    z: &PhaseSpacePoint,
    tail_target: f64,
) -> Result<f64> {
    let d = lattice.dim_d();
    if g.dim_d() != d || z.dim_d() != d {
        return Err(Error::DimensionMismatch(format!(
            "window dimension {} and point dimension {} on a lattice of dimension {d}",
            g.dim_d(),
            z.dim_d()
        )));
    }
    check_even_redundancy(lattice)?;
    let adjoint = lattice.adjoint()?;
    let sum = lattice_sum(
        &adjoint,
        |p| {
            let phase =
                Complex64::new(0.0, 2.0 * std::f64::consts::PI * symplectic_form(p, z)).exp();
            Ok(ambiguity(g, g, p)? * phase)
        },
        tail_target,
    )?;
    let value = sum.value / lattice.volume();
    if value.im.abs() > PHI_IMAGINARY_TOL {
        return Err(Error::SeriesInvariant(format!(
            "imaginary part {:.3e} exceeds {PHI_IMAGINARY_TOL:.0e}",
            value.im
        )));
    }
    Ok(value.re)
}

/// Requires `vol(Λ)^{-1/d}` to be an even integer (within `1e-9`).
pub fn check_even_redundancy(lattice: &Lattice) -> Result<u64> {
    let red = lattice.redundancy();
    let rounded = red.round();
    if !(rounded >= 1.0 && (red - rounded).abs() <= 1e-9) {
        return Err(Error::NonIntegerRedundancy { value: red });
    }
    let n = rounded as u64;
    if n % 2 != 0 {
        return Err(Error::AlternatingPhaseUnsupported(n));
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Lattice;
    use nalgebra::DMatrix;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    const PI: f64 = std::f64::consts::PI;

    fn gaussian_2d(p: &PhaseSpacePoint) -> Result<Complex64> {
        let r2: f64 = p.flat().iter().map(|c| c * c).sum();
        Ok(Complex64::new((-PI * r2).exp(), 0.0))
    }

    /// Random sheared-and-rotated planar lattice with volume in `[0.3, 3]`.
    fn random_lattice(rng: &mut StdRng) -> Lattice {
        let vol: f64 = rng.gen_range(0.3..3.0);
        let theta: f64 = rng.gen_range(0.0..PI);
        let shear: f64 = rng.gen_range(-1.0..1.0);
        let (s, c) = theta.sin_cos();
        let rot = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
        let sh = DMatrix::from_row_slice(2, 2, &[1.0, shear, 0.0, 1.0]);
        Lattice::new(rot * sh * vol.sqrt()).unwrap()
    }

    #[test]
    fn classical_poisson_for_the_gaussian() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..5 {
            let lattice = random_lattice(&mut rng);
            let check = poisson_check(&lattice, gaussian_2d, gaussian_2d, 1e-12).unwrap();
            assert!(
                check.residual <= 1e-9,
                "volume {} residual {:.3e}",
                lattice.volume(),
                check.residual
            );
        }
    }

    #[test]
    fn classical_poisson_for_a_scaled_gaussian() {
        // f = e^{-πs|λ|²} on R², f̂ = s^{-1} e^{-π|λ|²/s}.
        let s = 1.7;
        let f = move |p: &PhaseSpacePoint| {
            let r2: f64 = p.flat().iter().map(|c| c * c).sum();
            Ok(Complex64::new((-PI * s * r2).exp(), 0.0))
        };
        let f_hat = move |p: &PhaseSpacePoint| {
            let r2: f64 = p.flat().iter().map(|c| c * c).sum();
            Ok(Complex64::new((-PI * r2 / s).exp() / s, 0.0))
        };
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..3 {
            let lattice = random_lattice(&mut rng);
            let check = poisson_check(&lattice, f, f_hat, 1e-12).unwrap();
            assert!(check.residual <= 1e-9, "residual {:.3e}", check.residual);
        }
    }

    #[test]
    fn symplectic_poisson_for_the_gaussian() {
        // e^{-π|λ|²} is fixed by the symplectic Fourier transform.
        for lattice in [
            Lattice::square(0.7).unwrap(),
            Lattice::hexagonal(1.3).unwrap(),
            Lattice::from_rows(&[vec![0.9, 0.4], vec![-0.2, 1.1]]).unwrap(),
        ] {
            let check =
                symplectic_poisson_check(&lattice, gaussian_2d, gaussian_2d, 1e-12).unwrap();
            assert!(check.residual <= 1e-10, "residual {:.3e}", check.residual);
        }
    }

    #[test]
    fn tail_estimate_is_honest_for_the_gaussian() {
        let lattice = Lattice::square(1.0).unwrap();
        let result = lattice_sum(&lattice, gaussian_2d, 1e-10).unwrap();
        // Direct reference over a comfortably larger box.
        let mut reference = 0.0;
        for i in -12i64..=12 {
            for j in -12i64..=12 {
                reference += (-PI * (i * i + j * j) as f64).exp();
            }
        }
        assert!(result.tail_estimate <= 1e-10);
        assert!(
            (result.value.re - reference).abs() <= result.tail_estimate + 1e-13,
            "sum {} vs reference {reference}, certified tail {:.3e}",
            result.value.re,
            result.tail_estimate
        );
        assert!(result.value.im.abs() < 1e-15);
        assert!(result.terms_used >= 49);
    }

    #[test]
    fn sum_does_not_depend_on_the_generator_choice() {
        // Same point set through a unimodular change of basis.
        let a = Lattice::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let b = Lattice::from_rows(&[vec![1.0, 0.0], vec![3.0, 1.0]]).unwrap();
        let sa = lattice_sum(&a, gaussian_2d, 1e-10).unwrap();
        let sb = lattice_sum(&b, gaussian_2d, 1e-10).unwrap();
        assert!((sa.value - sb.value).norm() < 1e-12);
    }

    #[test]
    fn slow_decay_cannot_be_certified() {
        let lattice = Lattice::square(1.0).unwrap();
        let f = |p: &PhaseSpacePoint| {
            let r2: f64 = p.flat().iter().map(|c| c * c).sum();
            Ok(Complex64::new((1.0 + r2).powf(-1.5), 0.0))
        };
        match lattice_sum(&lattice, f, 1e-10) {
            Err(Error::TailNotReached { .. }) => {}
            other => panic!("expected a tail-certification failure, got {other:?}"),
        }
    }

    #[test]
    fn vanishing_sum_for_odd_windows_on_admissible_lattices() {
        let h0 = Window::hermite(&[0]).unwrap();
        let h1 = Window::hermite(&[1]).unwrap();
        let h2 = Window::hermite(&[2]).unwrap();
        let h3 = Window::hermite(&[3]).unwrap();
        let h4 = Window::hermite(&[4]).unwrap();
        let gauss = Window::gaussian(1).unwrap();
        let square = Lattice::square(0.5).unwrap();
        let hex = Lattice::hexagonal(0.5).unwrap();
        let combos: [(&Window, &Window, &Lattice); 10] = [
            (&h1, &h1, &square),
            (&h0, &h1, &square),
            (&h2, &h1, &square),
            (&h3, &h3, &square),
            (&h2, &h3, &square),
            (&gauss, &h1, &square),
            (&h1, &h3, &square),
            (&h4, &h1, &square),
            (&h1, &h1, &hex),
            (&h0, &h3, &hex),
        ];
        for (f, g, lattice) in combos {
            let sums = vanishing_sum_check(f, g, lattice, 1e-10).unwrap();
            assert!(
                sums.ambiguity_sum.value.norm() <= 1e-8,
                "nonzero adjoint-side sum {:.3e} for a combination that must cancel",
                sums.ambiguity_sum.value.norm()
            );
            assert!(
                sums.wigner_sum.value.norm() <= 1e-8,
                "nonzero lattice-side sum {:.3e} for a combination that must cancel",
                sums.wigner_sum.value.norm()
            );
        }
    }

    #[test]
    fn vanishing_sum_preconditions_are_enforced() {
        let h1 = Window::hermite(&[1]).unwrap();
        let h2 = Window::hermite(&[2]).unwrap();
        let square_half = Lattice::square(0.5).unwrap();
        // Even window.
        assert!(matches!(
            vanishing_sum_check(&h1, &h2, &square_half, 1e-10),
            Err(Error::WindowPrecondition(_))
        ));
        // Wrong covolume.
        let square_one = Lattice::square(1.0).unwrap();
        assert!(matches!(
            vanishing_sum_check(&h1, &h1, &square_one, 1e-10),
            Err(Error::LatticePrecondition(_))
        ));
        // Non-symplectic lattice in d = 2 with the right covolume.
        let c = (0.25f64 / 2.0).powf(0.25);
        let gen = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            2.0 * c,
            c,
            c,
            c,
        ]));
        let lattice = Lattice::new(gen).unwrap();
        assert!((lattice.volume() - 0.25).abs() < 1e-12);
        let g = Window::hermite(&[1, 0]).unwrap();
        assert!(matches!(
            vanishing_sum_check(&g, &g, &lattice, 1e-10),
            Err(Error::LatticePrecondition(_))
        ));
    }

    #[test]
    fn phi_at_zero_vanishes_for_the_first_hermite() {
        let h1 = Window::hermite(&[1]).unwrap();
        let lattice = Lattice::square(0.5).unwrap();
        let phi0 = phi_series(&h1, &lattice, &PhaseSpacePoint::new_1d(0.0, 0.0), 1e-10).unwrap();
        assert!(phi0.abs() <= 1e-8, "φ(0) = {phi0:.3e}");
    }

    #[test]
    fn phi_at_zero_for_the_gaussian_matches_a_direct_sum() {
        // Λ = 2^{-1/2} Z², Λ° = √2 Z², A g(λ) = e^{-π|λ|²/2}: the series at
        // z = 0 is 2 Σ_{k∈Z²} e^{-π|√2 k|²/2} computed directly here.
        let g = Window::gaussian(1).unwrap();
        let lattice = Lattice::square(0.5).unwrap();
        let phi0 = phi_series(&g, &lattice, &PhaseSpacePoint::new_1d(0.0, 0.0), 1e-10).unwrap();
        let mut direct = 0.0;
        for i in -8i64..=8 {
            for j in -8i64..=8 {
                direct += (-PI * (i * i + j * j) as f64).exp();
            }
        }
        direct *= 2.0;
        assert!(
            (phi0 - direct).abs() <= 1e-9,
            "series {phi0} vs direct {direct}"
        );
        assert!(phi0 > 2.3 && phi0 < 2.4);
    }

    #[test]
    fn phi_is_periodic_over_the_lattice() {
        let h2 = Window::hermite(&[2]).unwrap();
        let lattice = Lattice::square(0.5).unwrap();
        let z = PhaseSpacePoint::new_1d(0.13, -0.27);
        let shift = lattice.point(&[1, -2]);
        let z_shifted = z.add(&shift);
        let a = phi_series(&h2, &lattice, &z, 1e-10).unwrap();
        let b = phi_series(&h2, &lattice, &z_shifted, 1e-10).unwrap();
        assert!((a - b).abs() <= 1e-9, "φ(z) = {a} vs φ(z + Λ) = {b}");
    }

    #[test]
    fn phi_rejects_inadmissible_redundancies() {
        let g = Window::gaussian(1).unwrap();
        let z = PhaseSpacePoint::new_1d(0.0, 0.0);
        // Redundancy 1 (odd integer).
        let square_one = Lattice::square(1.0).unwrap();
        assert!(matches!(
            phi_series(&g, &square_one, &z, 1e-10),
            Err(Error::AlternatingPhaseUnsupported(1))
        ));
        // Non-integer redundancy.
        let square_07 = Lattice::square(0.7).unwrap();
        assert!(matches!(
            phi_series(&g, &square_07, &z, 1e-10),
            Err(Error::NonIntegerRedundancy { .. })
        ));
    }
}
