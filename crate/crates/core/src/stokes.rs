//! Divergence-free velocity eigenbasis, Leray projection onto it, and the
//! skew-symmetric advection operator.
//!
//! Velocities are parametrized by a stream function, `w = ∇⊥ψ = (−∂_yψ, ∂_xψ)`,
//! with the same centered differences used everywhere else. Because the two
//! difference operators commute, the discrete divergence of every such field
//! vanishes identically, and since the divergence is the negative adjoint of
//! the gradient, these fields are exactly orthogonal to discrete gradients.
//!
//! The Stokes eigenproblem becomes the pencil
//!
//! ```text
//! (Gᵀ K G) ψ = λ (Gᵀ W G) ψ,      G = ∇⊥,
//! ```
//!
//! a discrete biharmonic against a discrete `−Δ`. No-slip enters through the
//! homogeneous Dirichlet data of the componentwise Laplacian `K`, which
//! clamps `ψ` at the walls. On the annulus `ψ` vanishes on both circles, so
//! the circulation mode is excluded.
//!
//! Centered differences with zero boundary data have a small kernel on grids
//! with an odd number of interior nodes per line (a checkerboard-like
//! pattern). Those stream functions produce no velocity at all; one
//! coordinate per kernel vector is pinned to zero before solving.

use nalgebra::{DMatrix, DVector};

use crate::eigensolver::{generalized_lowest, EigenOptions};
use crate::error::{Error, Result};
use crate::mesh::{assemble_laplacian, divergence, gradient, Mesh, MeshSpec, VectorField};
use crate::sparse::CsrMatrix;

/// Coefficients `a_j = ⟨u, w_j⟩_w` of a velocity in the Stokes basis.
pub type VelocityCoeffs = Vec<f64>;

#[derive(Clone, Debug)]
pub struct StokesBasis {
    values: Vec<f64>,
    stream: DMatrix<f64>,
    vel_x: DMatrix<f64>,
    vel_y: DMatrix<f64>,
    weights: Vec<f64>,
}

/// `∇⊥` as a `2N × N` matrix, x-components on top.
pub fn perp_gradient_matrix(mesh: &Mesh) -> CsrMatrix {
    let (gx, gy) = mesh.gradient_matrices();
    let n = mesh.dimension();
    let neg_gy = gy.scaled(&vec![-1.0; n], &vec![1.0; n]);
    CsrMatrix::vstack(&[&neg_gy, gx])
}

/// Stream functions killed by the centered gradient, with the node where each
/// is pinned.
fn gradient_kernel(mesh: &Mesh) -> Vec<(usize, Vec<f64>)> {
    let (m1, m2) = mesh.counts();
    // 1D kernel of the centered difference with zero ends: (1,0,1,…,1), odd length only
    let line = |len: usize| -> Option<Vec<f64>> {
        (len % 2 == 1).then(|| {
            (0..len)
                .map(|i| if i % 2 == 0 { 1.0 } else { 0.0 })
                .collect()
        })
    };
    let tensor = |a: &[f64], b: &[f64]| -> Vec<f64> {
        let mut v = Vec::with_capacity(a.len() * b.len());
        for bj in b {
            for ai in a {
                v.push(ai * bj);
            }
        }
        v
    };
    match mesh.spec() {
        MeshSpec::Rectangle { .. } => match (line(m1), line(m2)) {
            (Some(a), Some(b)) => vec![(mesh.node(0, 0), tensor(&a, &b))],
            _ => vec![],
        },
        MeshSpec::Annulus { .. } => {
            let Some(a) = line(m1) else {
                return vec![];
            };
            if m2 % 2 == 0 {
                let even: Vec<f64> = (0..m2).map(|k| ((k + 1) % 2) as f64).collect();
                let odd: Vec<f64> = (0..m2).map(|k| (k % 2) as f64).collect();
                vec![
                    (mesh.node(0, 0), tensor(&a, &even)),
                    (mesh.node(0, 1), tensor(&a, &odd)),
                ]
            } else {
                vec![(mesh.node(0, 0), tensor(&a, &vec![1.0; m2]))]
            }
        }
    }
}

/// Lowest `m` Stokes eigenpairs `(λ_j, w_j)`, velocities orthonormal in the
/// weighted `L²` inner product.
pub fn stokes_basis(mesh: &Mesh, m: usize) -> Result<StokesBasis> {
    stokes_basis_with(mesh, m, &EigenOptions::default())
}

pub fn stokes_basis_with(mesh: &Mesh, m: usize, opts: &EigenOptions) -> Result<StokesBasis> {
    let n = mesh.dimension();
    if m == 0 || m > n / 4 {
        return Err(Error::TooManyModes {
            requested: m,
            dimension: n / 4,
        });
    }
    let lap = assemble_laplacian(mesh);
    let k = lap.stiffness();
    let mut k2 = Vec::with_capacity(2 * k.nnz());
    for i in 0..n {
        for (j, v) in k.row(i) {
            k2.push((i, j, v));
            k2.push((i + n, j + n, v));
        }
    }
    let k2 = CsrMatrix::from_triplets(2 * n, 2 * n, &k2);
    let mut w2 = mesh.weights().to_vec();
    w2.extend_from_slice(mesh.weights());

    let g = perp_gradient_matrix(mesh);
    let gt = g.transpose();
    let mass = gt.matmul(&g.scaled(&w2, &vec![1.0; n]));
    let stiff = gt.matmul(&k2.matmul(&g));

    let pinned: Vec<usize> = gradient_kernel(mesh).iter().map(|(p, _)| *p).collect();
    let keep: Vec<usize> = (0..n).filter(|i| !pinned.contains(i)).collect();
    let pencil = generalized_lowest(
        &stiff.principal_submatrix(&keep),
        &mass.principal_submatrix(&keep),
        m,
        opts,
    )?;

    let mut stream = DMatrix::zeros(n, m);
    for (r, &node) in keep.iter().enumerate() {
        for c in 0..m {
            stream[(node, c)] = pencil.vectors[(r, c)];
        }
    }
    StokesBasis::from_stream(mesh, pencil.values, stream)
}

impl StokesBasis {
    /// Rebuild from stored eigenvalues and stream functions (one per column).
    pub fn from_stream(mesh: &Mesh, values: Vec<f64>, stream: DMatrix<f64>) -> Result<Self> {
        let n = mesh.dimension();
        if stream.nrows() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: stream.nrows(),
            });
        }
        if stream.ncols() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: values.len(),
                found: stream.ncols(),
            });
        }
        let g = perp_gradient_matrix(mesh);
        let m = values.len();
        let mut vel_x = DMatrix::zeros(n, m);
        let mut vel_y = DMatrix::zeros(n, m);
        for c in 0..m {
            let psi: Vec<f64> = stream.column(c).iter().copied().collect();
            let w = g.mul_vec(&psi);
            vel_x.set_column(c, &DVector::from_column_slice(&w[..n]));
            vel_y.set_column(c, &DVector::from_column_slice(&w[n..]));
        }
        Ok(StokesBasis {
            values,
            stream,
            vel_x,
            vel_y,
            weights: mesh.weights().to_vec(),
        })
    }

    pub fn stream_functions(&self) -> &DMatrix<f64> {
        &self.stream
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.weights.len()
    }

    /// Eigenvalues `λ_j` of the Stokes operator.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn stream_function(&self, j: usize) -> Vec<f64> {
        self.stream.column(j).iter().copied().collect()
    }

    pub fn velocity(&self, j: usize) -> VectorField {
        VectorField {
            x: self.vel_x.column(j).iter().copied().collect(),
            y: self.vel_y.column(j).iter().copied().collect(),
        }
    }

    /// `u = Σ a_j w_j`
    pub fn reconstruct(&self, a: &[f64]) -> VectorField {
        assert_eq!(a.len(), self.len());
        let a = DVector::from_column_slice(a);
        VectorField {
            x: (&self.vel_x * &a).iter().copied().collect(),
            y: (&self.vel_y * &a).iter().copied().collect(),
        }
    }

    /// Stream function `Σ a_j ψ_j` of a velocity in the span.
    pub fn reconstruct_stream(&self, a: &[f64]) -> Vec<f64> {
        (&self.stream * DVector::from_column_slice(a))
            .iter()
            .copied()
            .collect()
    }

    /// Weighted projection onto the span (`P_m` composed with Leray).
    pub fn project(&self, v: &VectorField) -> Result<VelocityCoeffs> {
        if v.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                found: v.len(),
            });
        }
        let wx = DVector::from_iterator(v.len(), v.x.iter().zip(&self.weights).map(|(a, w)| a * w));
        let wy = DVector::from_iterator(v.len(), v.y.iter().zip(&self.weights).map(|(a, w)| a * w));
        let c = self.vel_x.tr_mul(&wx) + self.vel_y.tr_mul(&wy);
        Ok(c.iter().copied().collect())
    }

    /// `‖u‖_H` for coefficients in the span.
    pub fn norm_h(&self, a: &[f64]) -> f64 {
        a.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// `‖A^{s/2} u‖_H = (Σ λ_j^s a_j²)^{1/2}`
    pub fn norm_power(&self, a: &[f64], s: f64) -> f64 {
        a.iter()
            .zip(&self.values)
            .map(|(c, l)| l.powf(s) * c * c)
            .sum::<f64>()
            .sqrt()
    }

    /// Largest deviation of the velocity Gram matrix from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let w = DVector::from_column_slice(&self.weights);
        let mut wx = self.vel_x.clone();
        let mut wy = self.vel_y.clone();
        for mut c in wx.column_iter_mut() {
            c.component_mul_assign(&w);
        }
        for mut c in wy.column_iter_mut() {
            c.component_mul_assign(&w);
        }
        let gram = self.vel_x.transpose() * wx + self.vel_y.transpose() * wy;
        (gram - DMatrix::identity(self.len(), self.len()))
            .abs()
            .max()
    }
}

/// Leray projection onto the Galerkin space: `a_j = ⟨v, w_j⟩_w`.
pub fn leray_project(basis: &StokesBasis, v: &VectorField) -> Result<VelocityCoeffs> {
    basis.project(v)
}

/// Skew-symmetric advection `½[u·∇f + ∇·(u f)]` of a scalar field.
/// `⟨advect(u, f), f⟩_w` vanishes identically for any `u`.
pub fn advect(mesh: &Mesh, u: &VectorField, f: &[f64]) -> Vec<f64> {
    let g = gradient(mesh, f);
    let flux = VectorField {
        x: u.x.iter().zip(f).map(|(a, b)| a * b).collect(),
        y: u.y.iter().zip(f).map(|(a, b)| a * b).collect(),
    };
    let div = divergence(mesh, &flux);
    (0..f.len())
        .map(|i| 0.5 * (u.x[i] * g.x[i] + u.y[i] * g.y[i] + div[i]))
        .collect()
}

/// Componentwise skew-symmetric advection of a vector field.
pub fn advect_vec(mesh: &Mesh, u: &VectorField, v: &VectorField) -> VectorField {
    VectorField {
        x: advect(mesh, u, &v.x),
        y: advect(mesh, u, &v.y),
    }
}

/// `P_m B(u_m, u_m)` in Stokes coefficients.
pub fn nonlinear_term(basis: &StokesBasis, mesh: &Mesh, a: &[f64]) -> VelocityCoeffs {
    let u = basis.reconstruct(a);
    let adv = advect_vec(mesh, &u, &u);
    basis.project(&adv).expect("basis and mesh share the grid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigensolver::lowest_eigenpairs;
    use crate::mesh::{build_annulus_mesh, build_rectangle_mesh};

    #[test]
    fn kernel_vectors_produce_no_velocity() {
        for mesh in [
            build_rectangle_mesh(8, 6, 1.0, 1.0).unwrap(),
            build_annulus_mesh(8, 16, 1.0, 2.0).unwrap(),
            build_annulus_mesh(8, 15, 1.0, 2.0).unwrap(),
        ] {
            let g = perp_gradient_matrix(&mesh);
            let kernel = gradient_kernel(&mesh);
            assert!(!kernel.is_empty());
            for (pin, v) in kernel {
                assert_eq!(v[pin], 1.0);
                assert!(g.mul_vec(&v).iter().all(|x| x.abs() < 1e-12));
            }
        }
        // even interior counts: no kernel
        assert!(gradient_kernel(&build_rectangle_mesh(9, 9, 1.0, 1.0).unwrap()).is_empty());
    }

    #[test]
    fn basis_is_orthonormal_and_divergence_free() {
        for mesh in [
            build_rectangle_mesh(16, 16, 1.0, 1.0).unwrap(),
            build_annulus_mesh(12, 32, 1.0, 2.0).unwrap(),
        ] {
            let sb = stokes_basis(&mesh, 6).unwrap();
            assert!(sb.orthonormality_defect() < 1e-8);
            for j in 0..6 {
                let div = divergence(&mesh, &sb.velocity(j));
                assert!(div.iter().all(|d| d.abs() <= 1e-10), "mode {j}");
            }
        }
    }

    #[test]
    fn stokes_bounded_below_by_dirichlet() {
        let mesh = build_annulus_mesh(12, 32, 1.0, 2.0).unwrap();
        let sb = stokes_basis(&mesh, 3).unwrap();
        let db = lowest_eigenpairs(&assemble_laplacian(&mesh), 1).unwrap();
        assert!(sb.values()[0] >= db.values()[0]);
    }

    #[test]
    fn too_many_modes_rejected() {
        let mesh = build_rectangle_mesh(6, 6, 1.0, 1.0).unwrap();
        assert!(stokes_basis(&mesh, 10).is_err());
    }

    #[test]
    fn projection_of_basis_vector_and_zero() {
        let mesh = build_rectangle_mesh(14, 14, 1.0, 1.0).unwrap();
        let sb = stokes_basis(&mesh, 5).unwrap();
        let a = leray_project(&sb, &sb.velocity(1)).unwrap();
        for (j, v) in a.iter().enumerate() {
            assert!((v - if j == 1 { 1.0 } else { 0.0 }).abs() < 1e-10);
        }
        let z = leray_project(&sb, &VectorField::zeros(mesh.dimension())).unwrap();
        assert!(z.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn single_mode_nonlinearity_vanishes() {
        let mesh = build_rectangle_mesh(14, 14, 1.0, 1.0).unwrap();
        let sb = stokes_basis(&mesh, 1).unwrap();
        let b = nonlinear_term(&sb, &mesh, &[1.0]);
        assert!(b[0].abs() < 1e-12);
        let sb = stokes_basis(&mesh, 4).unwrap();
        assert!(nonlinear_term(&sb, &mesh, &[0.0; 4])
            .iter()
            .all(|&v| v == 0.0));
    }

    #[test]
    fn zero_velocity_advects_nothing() {
        let mesh = build_annulus_mesh(6, 12, 1.0, 2.0).unwrap();
        let f: Vec<f64> = (0..mesh.dimension()).map(|i| i as f64).collect();
        assert!(advect(&mesh, &VectorField::zeros(mesh.dimension()), &f)
            .iter()
            .all(|&v| v == 0.0));
    }
}
