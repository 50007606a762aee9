//! Empirical constants and tolerances.
//!
//! The continuum estimates behind the model state inequalities with unknown
//! constants. These routines measure the ratios on random fields so that
//! boundedness across resolutions can be checked, and compute the
//! tolerances used for properties that hold only approximately after
//! truncation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::dynamics::DiagnosticsRecord;
use crate::eigensolver::EigenBasis;
use crate::error::Result;
use crate::mesh::{gradient, Mesh, VectorField};
use crate::spectral_ops::{
    b_norm_proxy, commutator, cordoba_defect, project, reconstruct, ConvexFn, Extension,
    SpectralField,
};
use crate::stokes::{nonlinear_term, StokesBasis};

/// Standard normal coefficients for the first `active` of `len` modes,
/// damped by `1/j`. Sample `index` of a sweep seeded with `seed`.
pub fn random_coeffs(seed: u64, index: u64, active: usize, len: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    (0..len)
        .map(|j| {
            if j < active {
                let z: f64 = StandardNormal.sample(&mut rng);
                z / (j + 1) as f64
            } else {
                0.0
            }
        })
        .collect()
}

/// `−∂_zΦ₂` at `z = 0` by the one-sided second-order difference
/// `(3Φ(0) − 4Φ(dz) + Φ(2dz)) / (2dz)`.
pub fn normal_derivative_at_zero(q: &SpectralField<'_>, dz: f64) -> Vec<f64> {
    let p0 = q.poisson_extension(0.0, Extension::Potential).from_coeffs();
    let p1 = q.poisson_extension(dz, Extension::Potential).from_coeffs();
    let p2 = q
        .poisson_extension(2.0 * dz, Extension::Potential)
        .from_coeffs();
    (0..p0.len())
        .map(|i| (3.0 * p0[i] - 4.0 * p1[i] + p2[i]) / (2.0 * dz))
        .collect()
}

/// Relative weighted `L²` error of [`normal_derivative_at_zero`] against `q`.
pub fn jump_error(mesh: &Mesh, q: &SpectralField<'_>, dz: f64) -> f64 {
    let d = normal_derivative_at_zero(q, dz);
    let qg = q.from_coeffs();
    let diff: Vec<f64> = d.iter().zip(&qg).map(|(a, b)| a - b).collect();
    mesh.norm_l2(&diff) / mesh.norm_l2(&qg)
}

/// Least-squares slope of `log e` against `log h`.
pub fn convergence_order(h: &[f64], e: &[f64]) -> f64 {
    assert_eq!(h.len(), e.len());
    assert!(h.len() >= 2);
    let x: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = e.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Negative part of the Córdoba defect relative to its natural scale
/// `‖defect‖_∞ + ‖Λˢf‖²_∞·h`; zero when the defect is nonnegative.
pub fn cordoba_violation(
    basis: &EigenBasis,
    mesh: &Mesh,
    f: &[f64],
    phi: ConvexFn,
    s: f64,
) -> Result<f64> {
    let defect = cordoba_defect(basis, f, phi, s)?;
    let min = defect.iter().copied().fold(f64::INFINITY, f64::min);
    if min >= 0.0 {
        return Ok(0.0);
    }
    let sup = defect.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let lam = SpectralField::from_coefficients(basis, project(basis, f)?)?
        .apply_fractional(s)?
        .from_coeffs();
    let lam_sup = lam.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = sup + lam_sup * lam_sup * mesh.min_spacing();
    Ok(-min / scale)
}

/// Largest [`cordoba_violation`] over fields, convex functions and exponents.
pub fn cordoba_tau(
    basis: &EigenBasis,
    mesh: &Mesh,
    fields: &[Vec<f64>],
    phis: &[ConvexFn],
    exponents: &[f64],
) -> Result<f64> {
    let cases: Vec<(usize, ConvexFn, f64)> = (0..fields.len())
        .flat_map(|i| {
            phis.iter()
                .flat_map(move |&p| exponents.iter().map(move |&s| (i, p, s)))
        })
        .collect();
    let taus: Vec<f64> = cases
        .par_iter()
        .map(|&(i, p, s)| cordoba_violation(basis, mesh, &fields[i], p, s))
        .collect::<Result<_>>()?;
    Ok(taus.into_iter().fold(0.0, f64::max))
}

/// Empirical tolerance for `‖q(t)‖ ≤ ‖q₀‖`: the largest increase of a norm
/// over any earlier value in the series, relative to the initial value.
pub fn monotonicity_excess(series: &[f64]) -> f64 {
    let Some(&first) = series.first() else {
        return 0.0;
    };
    if first == 0.0 {
        return if series.iter().all(|&v| v == 0.0) {
            0.0
        } else {
            f64::INFINITY
        };
    }
    let mut lowest = f64::INFINITY;
    let mut worst = 0.0f64;
    for &v in series {
        lowest = lowest.min(v);
        worst = worst.max(v - lowest);
    }
    worst / first
}

/// Maximum-principle tolerances `(τ₁, τ₂, τ₄, τ_∞)` of a trajectory.
pub fn lp_tolerances(records: &[DiagnosticsRecord]) -> [f64; 4] {
    let col = |f: fn(&DiagnosticsRecord) -> f64| -> Vec<f64> { records.iter().map(f).collect() };
    [
        monotonicity_excess(&col(|r| r.q_l1)),
        monotonicity_excess(&col(|r| r.q_l2)),
        monotonicity_excess(&col(|r| r.q_l4)),
        monotonicity_excess(&col(|r| r.q_linf)),
    ]
}

/// `‖[u·∇, Λ]f‖_{1/2,D} / (‖u‖_B ‖f‖_{3/2,D})` for a velocity and a charge
/// given in coefficients.
pub fn commutator_ratio(
    mesh: &Mesh,
    basis: &EigenBasis,
    u: &VectorField,
    f_coeffs: &[f64],
) -> Result<f64> {
    let f = reconstruct(basis, f_coeffs);
    let c = commutator(basis, mesh, u, &f)?;
    let num = SpectralField::from_coefficients(basis, project(basis, &c)?)?.dnorm(0.5)?;
    let den = b_norm_proxy(mesh, u)
        * SpectralField::from_coefficients(basis, f_coeffs.to_vec())?.dnorm(1.5)?;
    Ok(num / den)
}

/// Commutator ratios for `samples` random pairs drawn from the first
/// `active` modes of each basis.
pub fn commutator_sweep(
    mesh: &Mesh,
    basis: &EigenBasis,
    stokes: &StokesBasis,
    samples: usize,
    active: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    (0..samples as u64)
        .into_par_iter()
        .map(|k| {
            let a = random_coeffs(seed, 2 * k, active, stokes.len());
            let b = random_coeffs(seed, 2 * k + 1, active, basis.len());
            commutator_ratio(mesh, basis, &stokes.reconstruct(&a), &b)
        })
        .collect()
}

/// `‖f‖_{L⁴} / ‖f‖_{1/2,D}` over random span fields.
pub fn lfour_sweep(
    mesh: &Mesh,
    basis: &EigenBasis,
    samples: usize,
    active: usize,
    seed: u64,
) -> Vec<f64> {
    (0..samples as u64)
        .into_par_iter()
        .map(|k| {
            let b = random_coeffs(seed, k, active, basis.len());
            let sf = SpectralField::from_coefficients(basis, b).expect("length matches");
            mesh.norm_lp(&sf.from_coeffs(), 4.0) / sf.dnorm(0.5).expect("in range")
        })
        .collect()
}

/// Ratios of the two-dimensional velocity inequalities for one state.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct VelocityRatios {
    /// `‖u‖_{L⁴} / (‖u‖^{1/2}‖∇u‖^{1/2})`
    pub ulfour: f64,
    /// `‖∇u‖_{L⁴} / (‖∇u‖^{1/2}‖Au‖^{1/2})`
    pub naulfour: f64,
    /// `‖B(u,u)‖ / (‖u‖^{1/2}‖∇u‖‖Au‖^{1/2})`
    pub buuau: f64,
    /// `‖A^{1/2}B(u,u)‖ / (‖u‖^{1/2}‖Au‖^{3/2} + ‖∇u‖‖Au‖)`
    pub abuu: f64,
}

impl VelocityRatios {
    pub fn max(self, o: VelocityRatios) -> VelocityRatios {
        VelocityRatios {
            ulfour: self.ulfour.max(o.ulfour),
            naulfour: self.naulfour.max(o.naulfour),
            buuau: self.buuau.max(o.buuau),
            abuu: self.abuu.max(o.abuu),
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.ulfour, self.naulfour, self.buuau, self.abuu]
    }
}

pub fn velocity_ratios(mesh: &Mesh, stokes: &StokesBasis, a: &[f64]) -> VelocityRatios {
    let lam = stokes.values();
    let u_h = stokes.norm_h(a);
    let grad = stokes.norm_power(a, 1.0);
    let au = stokes.norm_power(a, 2.0);
    let u = stokes.reconstruct(a);
    let gx = gradient(mesh, &u.x);
    let gy = gradient(mesh, &u.y);
    let gmag: Vec<f64> = (0..u.len())
        .map(|i| (gx.x[i].powi(2) + gx.y[i].powi(2) + gy.x[i].powi(2) + gy.y[i].powi(2)).sqrt())
        .collect();
    let b = nonlinear_term(stokes, mesh, a);
    let b_h = b.iter().map(|c| c * c).sum::<f64>().sqrt();
    let ab = b
        .iter()
        .zip(lam)
        .map(|(c, l)| l * c * c)
        .sum::<f64>()
        .sqrt();
    VelocityRatios {
        ulfour: mesh.norm_lp(&u.magnitude(), 4.0) / (u_h * grad).sqrt(),
        naulfour: mesh.norm_lp(&gmag, 4.0) / (grad * au).sqrt(),
        buuau: b_h / (u_h.sqrt() * grad * au.sqrt()),
        abuu: ab / (u_h.sqrt() * au.powf(1.5) + grad * au),
    }
}

/// Largest velocity-inequality ratios over random states.
pub fn velocity_sweep(
    mesh: &Mesh,
    stokes: &StokesBasis,
    samples: usize,
    active: usize,
    seed: u64,
) -> VelocityRatios {
    (0..samples as u64)
        .into_par_iter()
        .map(|k| velocity_ratios(mesh, stokes, &random_coeffs(seed, k, active, stokes.len())))
        .reduce(VelocityRatios::default, VelocityRatios::max)
}
