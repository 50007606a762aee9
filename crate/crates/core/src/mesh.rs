//! Structured finite-difference grids on a rectangle or an annulus.
//!
//! Only interior nodes carry unknowns. Every scalar field is implicitly zero
//! on the boundary, so the Laplacian assembled here is the homogeneous
//! Dirichlet operator and every difference stencil that reaches a boundary
//! node reads a zero there.
//!
//! All inner products are quadrature sums `Σ w_i f_i g_i` with the node
//! weights of the mesh (`h_x h_y` on the rectangle, `r h_r h_θ` on the
//! annulus). The stiffness matrix `K` is symmetric, and the Laplacian acting
//! on fields is `L = W⁻¹K`, which is therefore symmetric in the weighted
//! inner product.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

/// Shape and resolution of a mesh, as it appears in run configurations and
/// output sidecars.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeshSpec {
    Rectangle {
        nx: usize,
        ny: usize,
        lx: f64,
        ly: f64,
    },
    Annulus {
        nr: usize,
        ntheta: usize,
        r_inner: f64,
        r_outer: f64,
    },
}

impl MeshSpec {
    pub fn unit_square(n: usize) -> Self {
        MeshSpec::Rectangle {
            nx: n,
            ny: n,
            lx: 1.0,
            ly: 1.0,
        }
    }

    pub fn build(&self) -> Result<Mesh> {
        match *self {
            MeshSpec::Rectangle { nx, ny, lx, ly } => build_rectangle_mesh(nx, ny, lx, ly),
            MeshSpec::Annulus {
                nr,
                ntheta,
                r_inner,
                r_outer,
            } => build_annulus_mesh(nr, ntheta, r_inner, r_outer),
        }
    }

    /// Short identifier used for cache keys and file names.
    pub fn slug(&self) -> String {
        match *self {
            MeshSpec::Rectangle { nx, ny, lx, ly } => format!("rect_{nx}x{ny}_{lx}x{ly}"),
            MeshSpec::Annulus {
                nr,
                ntheta,
                r_inner,
                r_outer,
            } => format!("annulus_{nr}x{ntheta}_{r_inner}-{r_outer}"),
        }
    }
}

/// Cartesian components of a vector field on the interior nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl VectorField {
    pub fn zeros(n: usize) -> Self {
        VectorField {
            x: vec![0.0; n],
            y: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Pointwise Euclidean magnitude.
    pub fn magnitude(&self) -> Vec<f64> {
        self.x
            .iter()
            .zip(&self.y)
            .map(|(a, b)| a.hypot(*b))
            .collect()
    }

    pub fn scale(&mut self, s: f64) {
        self.x.iter_mut().for_each(|v| *v *= s);
        self.y.iter_mut().for_each(|v| *v *= s);
    }
}

#[derive(Clone, Debug)]
pub struct Mesh {
    spec: MeshSpec,
    /// grid spacings (h_x, h_y) or (h_r, h_θ)
    spacing: (f64, f64),
    /// interior node counts along the two grid directions
    counts: (usize, usize),
    points: Vec<[f64; 2]>,
    weights: Vec<f64>,
    grad_x: CsrMatrix,
    grad_y: CsrMatrix,
}

/// Uniform grid on `[0, lx] × [0, ly]` with `nx × ny` cells.
pub fn build_rectangle_mesh(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Mesh> {
    if nx < 3 || ny < 3 {
        return Err(Error::InvalidMesh(format!(
            "rectangle needs at least 3 cells per direction, got {nx}x{ny}"
        )));
    }
    if !(lx > 0.0 && ly > 0.0 && lx.is_finite() && ly.is_finite()) {
        return Err(Error::InvalidMesh(format!(
            "rectangle side lengths must be positive, got {lx} x {ly}"
        )));
    }
    let (hx, hy) = (lx / nx as f64, ly / ny as f64);
    let (mx, my) = (nx - 1, ny - 1);
    let idx = |i: usize, j: usize| j * mx + i;
    let mut points = Vec::with_capacity(mx * my);
    for j in 0..my {
        for i in 0..mx {
            points.push([(i + 1) as f64 * hx, (j + 1) as f64 * hy]);
        }
    }
    let weights = vec![hx * hy; mx * my];

    let mut gx = Vec::new();
    let mut gy = Vec::new();
    for j in 0..my {
        for i in 0..mx {
            let p = idx(i, j);
            if i + 1 < mx {
                gx.push((p, idx(i + 1, j), 0.5 / hx));
            }
            if i > 0 {
                gx.push((p, idx(i - 1, j), -0.5 / hx));
            }
            if j + 1 < my {
                gy.push((p, idx(i, j + 1), 0.5 / hy));
            }
            if j > 0 {
                gy.push((p, idx(i, j - 1), -0.5 / hy));
            }
        }
    }
    let n = mx * my;
    Ok(Mesh {
        spec: MeshSpec::Rectangle { nx, ny, lx, ly },
        spacing: (hx, hy),
        counts: (mx, my),
        points,
        weights,
        grad_x: CsrMatrix::from_triplets(n, n, &gx),
        grad_y: CsrMatrix::from_triplets(n, n, &gy),
    })
}

/// Polar grid on `r_inner < r < r_outer`, periodic in θ, with `nr` radial
/// cells and `ntheta` angular nodes.
pub fn build_annulus_mesh(nr: usize, ntheta: usize, r_inner: f64, r_outer: f64) -> Result<Mesh> {
    if !(r_inner > 0.0 && r_inner < r_outer && r_outer.is_finite()) {
        return Err(Error::InvalidMesh(format!(
            "annulus radii must satisfy 0 < r_inner < r_outer, got {r_inner}, {r_outer}"
        )));
    }
    if nr < 3 || ntheta < 8 {
        return Err(Error::InvalidMesh(format!(
            "annulus needs nr >= 3 and ntheta >= 8, got {nr}, {ntheta}"
        )));
    }
    let hr = (r_outer - r_inner) / nr as f64;
    let ht = 2.0 * PI / ntheta as f64;
    let mr = nr - 1;
    let idx = |i: usize, k: usize| k * mr + i;
    let radius = |i: usize| r_inner + (i + 1) as f64 * hr;

    let mut points = Vec::with_capacity(mr * ntheta);
    let mut weights = Vec::with_capacity(mr * ntheta);
    for k in 0..ntheta {
        let theta = k as f64 * ht;
        for i in 0..mr {
            let r = radius(i);
            points.push([r * theta.cos(), r * theta.sin()]);
            weights.push(r * hr * ht);
        }
    }

    let mut gx = Vec::new();
    let mut gy = Vec::new();
    for k in 0..ntheta {
        let theta = k as f64 * ht;
        let (s, c) = theta.sin_cos();
        let kp = (k + 1) % ntheta;
        let km = (k + ntheta - 1) % ntheta;
        for i in 0..mr {
            let p = idx(i, k);
            let r = radius(i);
            // ∂_r
            if i + 1 < mr {
                gx.push((p, idx(i + 1, k), c * 0.5 / hr));
                gy.push((p, idx(i + 1, k), s * 0.5 / hr));
            }
            if i > 0 {
                gx.push((p, idx(i - 1, k), -c * 0.5 / hr));
                gy.push((p, idx(i - 1, k), -s * 0.5 / hr));
            }
            // r⁻¹ ∂_θ
            let a = 0.5 / (ht * r);
            gx.push((p, idx(i, kp), -s * a));
            gx.push((p, idx(i, km), s * a));
            gy.push((p, idx(i, kp), c * a));
            gy.push((p, idx(i, km), -c * a));
        }
    }
    let n = mr * ntheta;
    Ok(Mesh {
        spec: MeshSpec::Annulus {
            nr,
            ntheta,
            r_inner,
            r_outer,
        },
        spacing: (hr, ht),
        counts: (mr, ntheta),
        points,
        weights,
        grad_x: CsrMatrix::from_triplets(n, n, &gx),
        grad_y: CsrMatrix::from_triplets(n, n, &gy),
    })
}

impl Mesh {
    pub fn spec(&self) -> &MeshSpec {
        &self.spec
    }

    pub fn is_annulus(&self) -> bool {
        matches!(self.spec, MeshSpec::Annulus { .. })
    }

    /// Number of interior nodes (unknowns per scalar field).
    pub fn dimension(&self) -> usize {
        self.weights.len()
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `(h_x, h_y)` or `(h_r, h_θ)`.
    pub fn spacing(&self) -> (f64, f64) {
        self.spacing
    }

    /// Interior node counts along the two grid directions.
    pub fn counts(&self) -> (usize, usize) {
        self.counts
    }

    /// Smallest physical distance between neighbouring nodes.
    pub fn min_spacing(&self) -> f64 {
        match self.spec {
            MeshSpec::Rectangle { .. } => self.spacing.0.min(self.spacing.1),
            MeshSpec::Annulus { r_inner, .. } => {
                let (hr, ht) = self.spacing;
                hr.min((r_inner + hr) * ht)
            }
        }
    }

    /// Exact area of the continuum domain.
    pub fn domain_area(&self) -> f64 {
        match self.spec {
            MeshSpec::Rectangle { lx, ly, .. } => lx * ly,
            MeshSpec::Annulus {
                r_inner, r_outer, ..
            } => PI * (r_outer * r_outer - r_inner * r_inner),
        }
    }

    /// Radius of each node (annulus) or `None` on the rectangle.
    pub fn radius(&self, node: usize) -> Option<f64> {
        match self.spec {
            MeshSpec::Annulus { r_inner, .. } => {
                let i = node % self.counts.0;
                Some(r_inner + (i + 1) as f64 * self.spacing.0)
            }
            MeshSpec::Rectangle { .. } => None,
        }
    }

    /// Node index of grid position `(i, j)`: `(x, y)` on the rectangle, `(r, θ)`
    /// on the annulus, both counted over interior nodes from zero.
    pub fn node(&self, i: usize, j: usize) -> usize {
        j * self.counts.0 + i
    }

    pub(crate) fn check_len(&self, f: &[f64]) -> Result<()> {
        if f.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                found: f.len(),
            });
        }
        Ok(())
    }

    /// Centered-difference gradient matrices `(∂_x, ∂_y)`.
    pub fn gradient_matrices(&self) -> (&CsrMatrix, &CsrMatrix) {
        (&self.grad_x, &self.grad_y)
    }

    pub fn inner(&self, f: &[f64], g: &[f64]) -> f64 {
        self.weights
            .iter()
            .zip(f.iter().zip(g))
            .map(|(w, (a, b))| w * a * b)
            .sum()
    }

    pub fn inner_vec(&self, u: &VectorField, v: &VectorField) -> f64 {
        self.inner(&u.x, &v.x) + self.inner(&u.y, &v.y)
    }

    pub fn norm_l2(&self, f: &[f64]) -> f64 {
        self.inner(f, f).sqrt()
    }

    pub fn norm_l2_vec(&self, u: &VectorField) -> f64 {
        self.inner_vec(u, u).sqrt()
    }

    /// Quadrature `L^p` norm; `p = f64::INFINITY` gives the grid maximum.
    pub fn norm_lp(&self, f: &[f64], p: f64) -> f64 {
        if p.is_infinite() {
            return f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        }
        let s: f64 = self
            .weights
            .iter()
            .zip(f)
            .map(|(w, v)| w * v.abs().powf(p))
            .sum();
        s.powf(1.0 / p)
    }

    /// `L^p` norm of the pointwise magnitude of a vector field.
    pub fn norm_lp_vec(&self, u: &VectorField, p: f64) -> f64 {
        self.norm_lp(&u.magnitude(), p)
    }
}

/// Dirichlet Laplacian `L = W⁻¹K` on the interior nodes.
#[derive(Clone, Debug)]
pub struct SparseSymmetricOperator {
    stiffness: CsrMatrix,
    weights: Vec<f64>,
}

impl SparseSymmetricOperator {
    pub fn new(stiffness: CsrMatrix, weights: Vec<f64>) -> Self {
        assert_eq!(stiffness.nrows(), weights.len());
        SparseSymmetricOperator { stiffness, weights }
    }

    pub fn dimension(&self) -> usize {
        self.weights.len()
    }

    /// The symmetric matrix `K = W L`.
    pub fn stiffness(&self) -> &CsrMatrix {
        &self.stiffness
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        let mut y = self.stiffness.mul_vec(f);
        for (v, w) in y.iter_mut().zip(&self.weights) {
            *v /= w;
        }
        y
    }

    /// Componentwise action on a vector field.
    pub fn apply_vec(&self, u: &VectorField) -> VectorField {
        VectorField {
            x: self.apply(&u.x),
            y: self.apply(&u.y),
        }
    }

    /// `⟨L f, g⟩_w = fᵀ K g`
    pub fn form(&self, f: &[f64], g: &[f64]) -> f64 {
        let kg = self.stiffness.mul_vec(g);
        f.iter().zip(&kg).map(|(a, b)| a * b).sum()
    }
}

/// Second-order 5-point Laplacian (polar 5-point in conservative form on the
/// annulus) with Dirichlet rows eliminated.
pub fn assemble_laplacian(mesh: &Mesh) -> SparseSymmetricOperator {
    let (m1, m2) = mesh.counts;
    let mut t = Vec::with_capacity(5 * mesh.dimension());
    match mesh.spec {
        MeshSpec::Rectangle { .. } => {
            let (hx, hy) = mesh.spacing;
            // K = hx hy L
            let cx = hy / hx;
            let cy = hx / hy;
            for j in 0..m2 {
                for i in 0..m1 {
                    let p = mesh.node(i, j);
                    t.push((p, p, 2.0 * cx + 2.0 * cy));
                    if i > 0 {
                        t.push((p, mesh.node(i - 1, j), -cx));
                    }
                    if i + 1 < m1 {
                        t.push((p, mesh.node(i + 1, j), -cx));
                    }
                    if j > 0 {
                        t.push((p, mesh.node(i, j - 1), -cy));
                    }
                    if j + 1 < m2 {
                        t.push((p, mesh.node(i, j + 1), -cy));
                    }
                }
            }
        }
        MeshSpec::Annulus { r_inner, .. } => {
            let (hr, ht) = mesh.spacing;
            let ntheta = m2;
            for k in 0..ntheta {
                let kp = (k + 1) % ntheta;
                let km = (k + ntheta - 1) % ntheta;
                for i in 0..m1 {
                    let p = mesh.node(i, k);
                    let r = r_inner + (i + 1) as f64 * hr;
                    let r_plus = r + 0.5 * hr;
                    let r_minus = r - 0.5 * hr;
                    // K = r hr hθ L, with L = -(1/r)∂r(r∂r) - r⁻²∂θθ
                    let a_plus = ht * r_plus / hr;
                    let a_minus = ht * r_minus / hr;
                    let b = hr / (r * ht);
                    t.push((p, p, a_plus + a_minus + 2.0 * b));
                    if i + 1 < m1 {
                        t.push((p, mesh.node(i + 1, k), -a_plus));
                    }
                    if i > 0 {
                        t.push((p, mesh.node(i - 1, k), -a_minus));
                    }
                    t.push((p, mesh.node(i, kp), -b));
                    t.push((p, mesh.node(i, km), -b));
                }
            }
        }
    }
    let n = mesh.dimension();
    SparseSymmetricOperator::new(CsrMatrix::from_triplets(n, n, &t), mesh.weights.clone())
}

/// Centered second-order gradient in Cartesian components. On the annulus the
/// polar derivatives `(∂_r, r⁻¹∂_θ)` are rotated into `(x, y)`.
pub fn gradient(mesh: &Mesh, f: &[f64]) -> VectorField {
    VectorField {
        x: mesh.grad_x.mul_vec(f),
        y: mesh.grad_y.mul_vec(f),
    }
}

/// Discrete divergence, defined as the negative weighted adjoint of
/// [`gradient`]: `⟨div u, f⟩_w = -⟨u, ∇f⟩_w` holds exactly.
pub fn divergence(mesh: &Mesh, u: &VectorField) -> Vec<f64> {
    let wx: Vec<f64> = u.x.iter().zip(&mesh.weights).map(|(a, w)| a * w).collect();
    let wy: Vec<f64> = u.y.iter().zip(&mesh.weights).map(|(a, w)| a * w).collect();
    let gx = mesh.grad_x.tr_mul_vec(&wx);
    let gy = mesh.grad_y.tr_mul_vec(&wy);
    gx.iter()
        .zip(&gy)
        .zip(&mesh.weights)
        .map(|((a, b), w)| -(a + b) / w)
        .collect()
}

/// Quadrature sum `Σ w_i f_i`.
pub fn integrate(mesh: &Mesh, f: &[f64]) -> f64 {
    mesh.weights.iter().zip(f).map(|(w, v)| w * v).sum()
}

/// Pointwise Frobenius norm of the Hessian, computed from function values
/// only (three-point and cross differences), so the zero boundary values
/// enter exactly.
pub fn hessian_norm(mesh: &Mesh, f: &[f64]) -> Vec<f64> {
    let (m1, m2) = mesh.counts;
    let at = |i: isize, j: isize| -> f64 {
        match mesh.spec {
            MeshSpec::Rectangle { .. } => {
                if i < 0 || j < 0 || i >= m1 as isize || j >= m2 as isize {
                    0.0
                } else {
                    f[mesh.node(i as usize, j as usize)]
                }
            }
            MeshSpec::Annulus { .. } => {
                if i < 0 || i >= m1 as isize {
                    0.0
                } else {
                    let k = j.rem_euclid(m2 as isize) as usize;
                    f[mesh.node(i as usize, k)]
                }
            }
        }
    };
    let (h1, h2) = mesh.spacing;
    let mut out = Vec::with_capacity(mesh.dimension());
    for j in 0..m2 as isize {
        for i in 0..m1 as isize {
            let c = at(i, j);
            let d11 = (at(i + 1, j) - 2.0 * c + at(i - 1, j)) / (h1 * h1);
            let d22 = (at(i, j + 1) - 2.0 * c + at(i, j - 1)) / (h2 * h2);
            let d12 = (at(i + 1, j + 1) - at(i + 1, j - 1) - at(i - 1, j + 1) + at(i - 1, j - 1))
                / (4.0 * h1 * h2);
            let sq = match mesh.spec {
                MeshSpec::Rectangle { .. } => d11 * d11 + 2.0 * d12 * d12 + d22 * d22,
                MeshSpec::Annulus { r_inner, .. } => {
                    let r = r_inner + (i + 1) as f64 * h1;
                    let d1 = (at(i + 1, j) - at(i - 1, j)) / (2.0 * h1);
                    let d2 = (at(i, j + 1) - at(i, j - 1)) / (2.0 * h2);
                    let hrr = d11;
                    let hrt = d12 / r - d2 / (r * r);
                    let htt = d22 / (r * r) + d1 / r;
                    hrr * hrr + 2.0 * hrt * hrt + htt * htt
                }
            };
            out.push(sq.sqrt());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_by_four_square() {
        let m = build_rectangle_mesh(4, 4, 1.0, 1.0).unwrap();
        assert_eq!(m.dimension(), 9);
        assert!(m.weights().iter().all(|&w| w == 1.0 / 16.0));
    }

    #[test]
    fn sixty_four_square_total_weight() {
        let m = build_rectangle_mesh(64, 64, 1.0, 1.0).unwrap();
        // 63² cells of area 1/64² each
        let total = integrate(&m, &vec![1.0; m.dimension()]);
        assert!((total - 3969.0 / 4096.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_rectangles() {
        assert!(build_rectangle_mesh(2, 8, 1.0, 1.0).is_err());
        assert!(build_rectangle_mesh(8, 8, 0.0, 1.0).is_err());
        assert!(build_rectangle_mesh(8, 8, 1.0, -1.0).is_err());
    }

    #[test]
    fn small_annulus_counts() {
        let m = build_annulus_mesh(3, 8, 1.0, 2.0).unwrap();
        assert_eq!(m.dimension(), 16);
        assert!(m.weights().iter().all(|&w| w > 0.0));
    }

    #[test]
    fn rejects_inverted_annulus() {
        assert!(build_annulus_mesh(8, 16, 2.0, 1.0).is_err());
        assert!(build_annulus_mesh(8, 16, 0.0, 1.0).is_err());
        assert!(build_annulus_mesh(2, 16, 1.0, 2.0).is_err());
        assert!(build_annulus_mesh(8, 4, 1.0, 2.0).is_err());
    }

    #[test]
    fn interior_nodes_strictly_inside() {
        let m = build_annulus_mesh(10, 24, 1.0, 2.0).unwrap();
        for p in m.points() {
            let r = p[0].hypot(p[1]);
            assert!(r > 1.0 && r < 2.0);
        }
        let m = build_rectangle_mesh(7, 5, 2.0, 1.0).unwrap();
        for p in m.points() {
            assert!(p[0] > 0.0 && p[0] < 2.0 && p[1] > 0.0 && p[1] < 1.0);
        }
    }

    #[test]
    fn zero_field_maps_to_zero() {
        let m = build_annulus_mesh(6, 12, 1.0, 2.0).unwrap();
        let l = assemble_laplacian(&m);
        let z = vec![0.0; m.dimension()];
        assert!(l.apply(&z).iter().all(|&v| v == 0.0));
        let g = gradient(&m, &z);
        assert!(g.x.iter().chain(&g.y).all(|&v| v == 0.0));
    }

    #[test]
    fn stiffness_is_symmetric() {
        for mesh in [
            build_rectangle_mesh(9, 7, 1.3, 0.7).unwrap(),
            build_annulus_mesh(7, 12, 1.0, 2.0).unwrap(),
        ] {
            let l = assemble_laplacian(&mesh);
            assert!(l.stiffness().asymmetry() < 1e-15);
        }
    }

    #[test]
    fn divergence_is_negative_adjoint_of_gradient() {
        let mesh = build_annulus_mesh(7, 12, 1.0, 2.0).unwrap();
        let n = mesh.dimension();
        let f: Vec<f64> = (0..n).map(|i| ((i * 7) % 11) as f64 - 5.0).collect();
        let u = VectorField {
            x: (0..n).map(|i| ((i * 3) % 5) as f64).collect(),
            y: (0..n).map(|i| ((i * 5) % 7) as f64 - 3.0).collect(),
        };
        let lhs = mesh.inner(&divergence(&mesh, &u), &f);
        let rhs = -mesh.inner_vec(&u, &gradient(&mesh, &f));
        assert!((lhs - rhs).abs() < 1e-12 * rhs.abs().max(1.0));
    }

    #[test]
    fn hessian_of_quadratic_bump() {
        // f = x(1-x) y(1-y) is exactly reproduced by three-point differences
        let mesh = build_rectangle_mesh(16, 16, 1.0, 1.0).unwrap();
        let f: Vec<f64> = mesh
            .points()
            .iter()
            .map(|p| p[0] * (1.0 - p[0]) * p[1] * (1.0 - p[1]))
            .collect();
        let h = hessian_norm(&mesh, &f);
        for (p, hv) in mesh.points().iter().zip(&h) {
            let (x, y) = (p[0], p[1]);
            let fxx = -2.0 * y * (1.0 - y);
            let fyy = -2.0 * x * (1.0 - x);
            let fxy = (1.0 - 2.0 * x) * (1.0 - 2.0 * y);
            let exact = (fxx * fxx + 2.0 * fxy * fxy + fyy * fyy).sqrt();
            assert!((hv - exact).abs() < 1e-12);
        }
    }
}
