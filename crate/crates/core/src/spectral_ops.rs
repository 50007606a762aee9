//! Functional calculus of the Dirichlet Laplacian on the span of an
//! [`EigenBasis`].
//!
//! A field is represented by its weighted projections `f_j = ⟨f, φ_j⟩_w`.
//! Every operator here acts on those coefficients: `Λˢ` multiplies the j-th
//! coefficient by `μ_j^{s/2}`, the Poisson semigroup by `e^{-z√μ_j}`. Grid
//! fields are projected onto the span before any fractional power is applied,
//! so the component outside the span is dropped, never inverted.

use nalgebra::DVector;

use crate::eigensolver::EigenBasis;
use crate::error::{Error, Result};
use crate::mesh::{gradient, hessian_norm, Mesh, VectorField};

/// Exponents outside this range are rejected.
pub const EXPONENT_RANGE: (f64, f64) = (-2.0, 3.0);

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField<'b> {
    basis: &'b EigenBasis,
    coeffs: Vec<f64>,
}

/// Weighted projection of a grid field onto the basis.
pub fn to_coeffs<'b>(basis: &'b EigenBasis, f: &[f64]) -> Result<SpectralField<'b>> {
    Ok(SpectralField {
        basis,
        coeffs: project(basis, f)?,
    })
}

/// Raw coefficient projection `Φᵀ W f`.
pub fn project(basis: &EigenBasis, f: &[f64]) -> Result<Vec<f64>> {
    if f.len() != basis.dimension() {
        return Err(Error::DimensionMismatch {
            expected: basis.dimension(),
            found: f.len(),
        });
    }
    let wf = DVector::from_iterator(f.len(), f.iter().zip(basis.weights()).map(|(v, w)| v * w));
    Ok(basis.vectors().tr_mul(&wf).iter().copied().collect())
}

/// `Σ_j c_j φ_j` on the grid.
pub fn reconstruct(basis: &EigenBasis, coeffs: &[f64]) -> Vec<f64> {
    assert_eq!(coeffs.len(), basis.len());
    let c = DVector::from_column_slice(coeffs);
    (basis.vectors() * c).iter().copied().collect()
}

fn check_exponent(s: f64) -> Result<()> {
    if !(EXPONENT_RANGE.0..=EXPONENT_RANGE.1).contains(&s) {
        return Err(Error::ExponentOutOfRange(s));
    }
    Ok(())
}

/// What [`SpectralField::poisson_extension`] returns at height `z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extension {
    /// The potential `e^{-zΛ}Λ⁻¹q`.
    Potential,
    /// The plain Poisson semigroup `e^{-zΛ}q`.
    Semigroup,
}

impl<'b> SpectralField<'b> {
    pub fn from_coefficients(basis: &'b EigenBasis, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != basis.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                found: coeffs.len(),
            });
        }
        Ok(SpectralField { basis, coeffs })
    }

    pub fn zeros(basis: &'b EigenBasis) -> Self {
        SpectralField {
            basis,
            coeffs: vec![0.0; basis.len()],
        }
    }

    pub fn basis(&self) -> &'b EigenBasis {
        self.basis
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// Evaluate the finite eigenfunction sum on the grid.
    pub fn from_coeffs(&self) -> Vec<f64> {
        reconstruct(self.basis, &self.coeffs)
    }

    fn map(&self, factor: impl Fn(f64) -> f64) -> SpectralField<'b> {
        SpectralField {
            basis: self.basis,
            coeffs: self
                .coeffs
                .iter()
                .zip(self.basis.values())
                .map(|(c, &mu)| c * factor(mu))
                .collect(),
        }
    }

    /// `Λˢ = (−Δ)^{s/2}`
    pub fn apply_fractional(&self, s: f64) -> Result<SpectralField<'b>> {
        check_exponent(s)?;
        if s == 0.0 {
            return Ok(self.clone());
        }
        Ok(self.map(|mu| mu.powf(0.5 * s)))
    }

    /// `‖f‖_{s,D} = (Σ μ_j^s f_j²)^{1/2}`
    pub fn dnorm(&self, s: f64) -> Result<f64> {
        check_exponent(s)?;
        Ok(self
            .coeffs
            .iter()
            .zip(self.basis.values())
            .map(|(c, mu)| mu.powf(s) * c * c)
            .sum::<f64>()
            .sqrt())
    }

    /// `e^{-zΛ}Λ⁻¹q` or `e^{-zΛ}q` for `z ≥ 0`.
    pub fn poisson_extension(&self, z: f64, kind: Extension) -> SpectralField<'b> {
        assert!(z >= 0.0, "extension height must be nonnegative, got {z}");
        match kind {
            Extension::Potential => self.map(|mu| {
                let root = mu.sqrt();
                (-z * root).exp() / root
            }),
            Extension::Semigroup => self.map(|mu| (-z * mu.sqrt()).exp()),
        }
    }

    pub fn add(&self, other: &SpectralField<'_>) -> SpectralField<'b> {
        SpectralField {
            basis: self.basis,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

/// `‖f − P f‖_w`: how much of a grid field lies outside the span.
pub fn projection_residual(basis: &EigenBasis, f: &[f64]) -> Result<f64> {
    let back = reconstruct(basis, &project(basis, f)?);
    Ok(f.iter()
        .zip(&back)
        .zip(basis.weights())
        .map(|((a, b), w)| w * (a - b).powi(2))
        .sum::<f64>()
        .sqrt())
}

/// Bounded-domain Riesz transform `R q = ∇Λ⁻¹q`.
pub fn riesz(mesh: &Mesh, sf: &SpectralField<'_>) -> VectorField {
    let inv = sf.apply_fractional(-1.0).expect("exponent -1 is in range");
    gradient(mesh, &inv.from_coeffs())
}

/// Convex functions with `Φ(0) = 0` accepted by [`cordoba_defect`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ConvexFn {
    /// `Φ(f) = f²`
    Square,
    /// `Φ(f) = f^{2k}`, `k ≥ 1`
    EvenPower(u32),
    /// `Φ(f) = max(f − c, 0)³` with threshold `c ≥ 0`
    SmoothHinge(f64),
}

impl ConvexFn {
    pub fn value(&self, x: f64) -> f64 {
        match *self {
            ConvexFn::Square => x * x,
            ConvexFn::EvenPower(k) => x.powi(2 * k as i32),
            ConvexFn::SmoothHinge(c) => (x - c).max(0.0).powi(3),
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match *self {
            ConvexFn::Square => 2.0 * x,
            ConvexFn::EvenPower(k) => 2.0 * k as f64 * x.powi(2 * k as i32 - 1),
            ConvexFn::SmoothHinge(c) => 3.0 * (x - c).max(0.0).powi(2),
        }
    }
}

/// Pointwise defect `Φ'(f)Λˢf − Λˢ(Φ(f))`, with `f` projected onto the span
/// first and `Φ(f)` projected again before `Λˢ` acts on it.
pub fn cordoba_defect(basis: &EigenBasis, f: &[f64], phi: ConvexFn, s: f64) -> Result<Vec<f64>> {
    if !(0.0..=2.0).contains(&s) {
        return Err(Error::ExponentOutOfRange(s));
    }
    if let ConvexFn::SmoothHinge(c) = phi {
        assert!(
            c >= 0.0,
            "hinge threshold must be nonnegative so that Φ(0) = 0"
        );
    }
    let sf = to_coeffs(basis, f)?;
    let fp = sf.from_coeffs();
    let lam_f = sf.apply_fractional(s)?.from_coeffs();
    let phi_f: Vec<f64> = fp.iter().map(|&v| phi.value(v)).collect();
    let lam_phi = to_coeffs(basis, &phi_f)?.apply_fractional(s)?.from_coeffs();
    Ok(fp
        .iter()
        .zip(lam_f.iter().zip(&lam_phi))
        .map(|(&v, (a, b))| phi.derivative(v) * a - b)
        .collect())
}

/// Convective derivative `u·∇f` with centered differences.
pub fn convective(mesh: &Mesh, u: &VectorField, f: &[f64]) -> Vec<f64> {
    let g = gradient(mesh, f);
    (0..f.len())
        .map(|i| u.x[i] * g.x[i] + u.y[i] * g.y[i])
        .collect()
}

/// Commutator `[u·∇, Λ]f = u·∇(Λf) − Λ(u·∇f)`, each `Λ` acting after a
/// projection onto the span. The result is a grid field.
pub fn commutator(basis: &EigenBasis, mesh: &Mesh, u: &VectorField, f: &[f64]) -> Result<Vec<f64>> {
    mesh.check_len(f)?;
    let sf = to_coeffs(basis, f)?;
    let lam_f = sf.apply_fractional(1.0)?.from_coeffs();
    let first = convective(mesh, u, &lam_f);
    let adv = convective(mesh, u, &sf.from_coeffs());
    let second = to_coeffs(basis, &adv)?.apply_fractional(1.0)?.from_coeffs();
    Ok(first.iter().zip(&second).map(|(a, b)| a - b).collect())
}

/// Computable stand-in for `‖u‖_{B(Ω)}`: `‖u‖_{W^{1,∞}} + ‖u‖_{W^{2,4}}`,
/// all derivatives by finite differences.
pub fn b_norm_proxy(mesh: &Mesh, u: &VectorField) -> f64 {
    let n = mesh.dimension();
    let gx = gradient(mesh, &u.x);
    let gy = gradient(mesh, &u.y);
    let hx = hessian_norm(mesh, &u.x);
    let hy = hessian_norm(mesh, &u.y);
    let mag = u.magnitude();
    let grad: Vec<f64> = (0..n)
        .map(|i| (gx.x[i].powi(2) + gx.y[i].powi(2) + gy.x[i].powi(2) + gy.y[i].powi(2)).sqrt())
        .collect();
    let hess: Vec<f64> = (0..n).map(|i| hx[i].hypot(hy[i])).collect();
    let w1inf = mesh.norm_lp(&mag, f64::INFINITY) + mesh.norm_lp(&grad, f64::INFINITY);
    let p4 = |f: &[f64]| mesh.norm_lp(f, 4.0).powi(4);
    let w24 = (p4(&mag) + p4(&grad) + p4(&hess)).powf(0.25);
    w1inf + w24
}
