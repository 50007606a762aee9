//! Time integration of the coupled Galerkin system
//!
//! ```text
//! a' = −λ∘a − P_m B(u, u) + P_m(−q Rq)
//! b' = −√μ∘b − P_n(u·∇q)
//! ```
//!
//! with `u = Σ a_j w_j` and `q = Σ b_j φ_j`. The diagonal dissipation is
//! integrated exactly; the remaining terms use an explicit midpoint rule
//! under the integrating factor.

use serde::Serialize;

use crate::eigensolver::EigenBasis;
use crate::error::{Error, Result};
use crate::mesh::{gradient, Mesh, VectorField};
use crate::spectral_ops::{project, reconstruct, riesz, SpectralField};
use crate::stokes::{advect, StokesBasis, VelocityCoeffs};

/// `dt·‖u‖_∞/h` above this is rejected.
pub const CFL_LIMIT: f64 = 0.5;
/// A run aborts once a tracked norm exceeds this multiple of the initial
/// composite bound.
pub const BLOWUP_FACTOR: f64 = 1e8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Toggles {
    /// Electric force `−qRq` in the momentum equation.
    pub coupling_on: bool,
    /// Advection of the charge by the velocity.
    pub transport_on: bool,
    /// Velocity self-advection `B(u, u)`.
    pub nonlinear_on: bool,
}

impl Default for Toggles {
    fn default() -> Self {
        Toggles {
            coupling_on: true,
            transport_on: true,
            nonlinear_on: true,
        }
    }
}

impl Toggles {
    /// Pure dissipation: every coefficient decays independently.
    pub fn decoupled() -> Self {
        Toggles {
            coupling_on: false,
            transport_on: false,
            nonlinear_on: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimState {
    pub t: f64,
    /// Velocity coefficients in the Stokes basis.
    pub a: Vec<f64>,
    /// Charge coefficients in the Dirichlet basis.
    pub b: Vec<f64>,
}

impl SimState {
    pub fn zeros(m: usize, n: usize) -> Self {
        SimState {
            t: 0.0,
            a: vec![0.0; m],
            b: vec![0.0; n],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.a.iter().chain(&self.b).all(|v| v.is_finite())
    }
}

/// One row of the diagnostics CSV.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub u_h: f64,
    pub grad_u_l2: f64,
    pub au_h: f64,
    pub q_l1: f64,
    pub q_l2: f64,
    pub q_l4: f64,
    pub q_linf: f64,
    pub q_d05: f64,
    pub q_d1: f64,
    pub q_d15: f64,
    pub q_d2: f64,
    pub lam_q_l4: f64,
    /// `‖a‖² − ‖a₀‖² + 2∫Σλa² − 2∫⟨F, a⟩`
    pub energy_residual: f64,
    /// `∫‖∇u‖²`
    pub dissipation_u: f64,
    /// `∫‖Λ^{1/2}q‖²`
    pub dissipation_q: f64,
}

impl DiagnosticsRecord {
    pub const HEADER: &'static str = "t,u_H,grad_u_L2,Au_H,q_L1,q_L2,q_L4,q_Linf,q_D05,q_D1,q_D15,q_D2,lam_q_L4,energy_residual,dissipation_u,dissipation_q";

    pub fn values(&self) -> [f64; 16] {
        [
            self.t,
            self.u_h,
            self.grad_u_l2,
            self.au_h,
            self.q_l1,
            self.q_l2,
            self.q_l4,
            self.q_linf,
            self.q_d05,
            self.q_d1,
            self.q_d15,
            self.q_d2,
            self.lam_q_l4,
            self.energy_residual,
            self.dissipation_u,
            self.dissipation_q,
        ]
    }

    pub fn from_values(v: [f64; 16]) -> Self {
        DiagnosticsRecord {
            t: v[0],
            u_h: v[1],
            grad_u_l2: v[2],
            au_h: v[3],
            q_l1: v[4],
            q_l2: v[5],
            q_l4: v[6],
            q_linf: v[7],
            q_d05: v[8],
            q_d1: v[9],
            q_d15: v[10],
            q_d2: v[11],
            lam_q_l4: v[12],
            energy_residual: v[13],
            dissipation_u: v[14],
            dissipation_q: v[15],
        }
    }

    /// `‖Au‖_H + ‖q‖_{2,D}`, the strong norms the global bound controls.
    pub fn composite(&self) -> f64 {
        self.au_h + self.q_d2
    }

    fn largest_norm(&self) -> f64 {
        [
            self.u_h,
            self.grad_u_l2,
            self.au_h,
            self.q_l1,
            self.q_l2,
            self.q_l4,
            self.q_linf,
            self.q_d2,
            self.lam_q_l4,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Time integrals accumulated by the trapezoid rule alongside the state.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EnergyLedger {
    pub energy0: f64,
    pub dissipation_u: f64,
    pub dissipation_q: f64,
    pub work: f64,
}

impl EnergyLedger {
    pub fn residual(&self, a: &[f64]) -> f64 {
        sq(a) - self.energy0 + 2.0 * self.dissipation_u - 2.0 * self.work
    }
}

fn sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Electric force `P_m(−q Rq)` in Stokes coefficients.
pub fn force_term(q: &SpectralField<'_>, sbasis: &StokesBasis, mesh: &Mesh) -> VelocityCoeffs {
    let grid = q.from_coeffs();
    let rq = riesz(mesh, q);
    let f = VectorField {
        x: grid.iter().zip(&rq.x).map(|(a, b)| -a * b).collect(),
        y: grid.iter().zip(&rq.y).map(|(a, b)| -a * b).collect(),
    };
    sbasis
        .project(&f)
        .expect("charge basis and Stokes basis share the mesh")
}

/// `P_n(u·∇q)` in skew form, as Dirichlet coefficients.
pub fn transport_term<'b>(
    q: &SpectralField<'b>,
    a: &[f64],
    sbasis: &StokesBasis,
    mesh: &Mesh,
) -> SpectralField<'b> {
    let u = sbasis.reconstruct(a);
    transport_of(q.basis(), &u, &q.from_coeffs(), mesh)
}

fn transport_of<'b>(
    basis: &'b EigenBasis,
    u: &VectorField,
    q: &[f64],
    mesh: &Mesh,
) -> SpectralField<'b> {
    let coeffs = project(basis, &advect(mesh, u, q)).expect("shared mesh");
    SpectralField::from_coefficients(basis, coeffs).expect("length matches basis")
}

/// Nonlinear right-hand side at one state.
#[derive(Clone, Debug)]
struct Eval {
    da: Vec<f64>,
    db: Vec<f64>,
    umax: f64,
    /// `⟨F, a⟩`
    work: f64,
}

/// The Galerkin system: mesh, both bases and the active terms.
#[derive(Clone, Debug)]
pub struct GalerkinSystem {
    mesh: Mesh,
    stokes: StokesBasis,
    charge: EigenBasis,
    toggles: Toggles,
    root_mu: Vec<f64>,
}

impl GalerkinSystem {
    pub fn new(
        mesh: Mesh,
        stokes: StokesBasis,
        charge: EigenBasis,
        toggles: Toggles,
    ) -> Result<Self> {
        if stokes.dimension() != mesh.dimension() || charge.dimension() != mesh.dimension() {
            return Err(Error::DimensionMismatch {
                expected: mesh.dimension(),
                found: if stokes.dimension() != mesh.dimension() {
                    stokes.dimension()
                } else {
                    charge.dimension()
                },
            });
        }
        let root_mu = charge.values().iter().map(|m| m.sqrt()).collect();
        Ok(GalerkinSystem {
            mesh,
            stokes,
            charge,
            toggles,
            root_mu,
        })
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn stokes(&self) -> &StokesBasis {
        &self.stokes
    }

    pub fn charge(&self) -> &EigenBasis {
        &self.charge
    }

    pub fn toggles(&self) -> Toggles {
        self.toggles
    }

    pub fn set_toggles(&mut self, toggles: Toggles) {
        self.toggles = toggles;
    }

    pub fn m(&self) -> usize {
        self.stokes.len()
    }

    pub fn n(&self) -> usize {
        self.charge.len()
    }

    pub fn velocity(&self, a: &[f64]) -> VectorField {
        self.stokes.reconstruct(a)
    }

    pub fn charge_field(&self, b: &[f64]) -> Vec<f64> {
        reconstruct(&self.charge, b)
    }

    /// `∂_x u_y − ∂_y u_x` on the grid.
    pub fn vorticity(&self, a: &[f64]) -> Vec<f64> {
        let u = self.velocity(a);
        let gx = gradient(&self.mesh, &u.x);
        let gy = gradient(&self.mesh, &u.y);
        gy.x.iter().zip(&gx.y).map(|(a, b)| a - b).collect()
    }

    fn check_state(&self, s: &SimState) -> Result<()> {
        if s.a.len() != self.m() {
            return Err(Error::DimensionMismatch {
                expected: self.m(),
                found: s.a.len(),
            });
        }
        if s.b.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: s.b.len(),
            });
        }
        Ok(())
    }

    fn evaluate(&self, a: &[f64], b: &[f64]) -> Eval {
        let t = self.toggles;
        let u = self.stokes.reconstruct(a);
        let umax = u.magnitude().into_iter().fold(0.0, f64::max);
        let mut da = vec![0.0; a.len()];
        let mut db = vec![0.0; b.len()];
        let mut work = 0.0;
        if t.nonlinear_on {
            let adv = VectorField {
                x: advect(&self.mesh, &u, &u.x),
                y: advect(&self.mesh, &u, &u.y),
            };
            let nl = self.stokes.project(&adv).expect("shared mesh");
            da.iter_mut().zip(&nl).for_each(|(d, v)| *d -= v);
        }
        if t.coupling_on || t.transport_on {
            let q =
                SpectralField::from_coefficients(&self.charge, b.to_vec()).expect("checked length");
            if t.coupling_on {
                let f = force_term(&q, &self.stokes, &self.mesh);
                work = dot(&f, a);
                da.iter_mut().zip(&f).for_each(|(d, v)| *d += v);
            }
            if t.transport_on {
                let tr = transport_of(&self.charge, &u, &q.from_coeffs(), &self.mesh);
                db.iter_mut().zip(tr.coeffs()).for_each(|(d, v)| *d -= v);
            }
        }
        Eval { da, db, umax, work }
    }

    fn decay(&self, h: f64) -> (Vec<f64>, Vec<f64>) {
        (
            self.stokes
                .values()
                .iter()
                .map(|l| (-l * h).exp())
                .collect(),
            self.root_mu.iter().map(|r| (-r * h).exp()).collect(),
        )
    }

    fn advance(&self, s: &SimState, k1: &Eval, dt: f64) -> Result<SimState> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::config(
                "time.dt",
                format!("time step must be positive, got {dt}"),
            ));
        }
        let h = self.mesh.min_spacing();
        let ratio = dt * k1.umax / h;
        let advecting = self.toggles.transport_on || self.toggles.nonlinear_on;
        if advecting && ratio > CFL_LIMIT {
            return Err(Error::Cfl {
                ratio,
                suggested_dt: CFL_LIMIT * h / k1.umax,
            });
        }
        let (ea_half, eb_half) = self.decay(0.5 * dt);
        let (ea, eb) = self.decay(dt);
        let mid = |y: &[f64], k: &[f64], e: &[f64]| -> Vec<f64> {
            y.iter()
                .zip(k)
                .zip(e)
                .map(|((y, k), e)| e * (y + 0.5 * dt * k))
                .collect()
        };
        let a_mid = mid(&s.a, &k1.da, &ea_half);
        let b_mid = mid(&s.b, &k1.db, &eb_half);
        let k2 = self.evaluate(&a_mid, &b_mid);
        let next = |y: &[f64], k: &[f64], e: &[f64], eh: &[f64]| -> Vec<f64> {
            (0..y.len())
                .map(|i| e[i] * y[i] + dt * eh[i] * k[i])
                .collect()
        };
        let out = SimState {
            t: s.t + dt,
            a: next(&s.a, &k2.da, &ea, &ea_half),
            b: next(&s.b, &k2.db, &eb, &eb_half),
        };
        if !out.is_finite() {
            return Err(Error::BlowUp {
                time: out.t,
                reason: "non-finite coefficients".into(),
                last_good: Box::new(None),
            });
        }
        Ok(out)
    }

    /// One integrating-factor midpoint step.
    pub fn step(&self, state: &SimState, dt: f64) -> Result<SimState> {
        self.check_state(state)?;
        let k1 = self.evaluate(&state.a, &state.b);
        self.advance(state, &k1, dt)
    }

    pub fn diagnostics(&self, state: &SimState, ledger: &EnergyLedger) -> DiagnosticsRecord {
        let lam = self.stokes.values();
        let a = &state.a;
        let q = SpectralField::from_coefficients(&self.charge, state.b.clone())
            .expect("checked length");
        let grid = q.from_coeffs();
        let lam_q = q.apply_fractional(1.0).expect("in range").from_coeffs();
        let mesh = &self.mesh;
        let dn = |s: f64| q.dnorm(s).expect("in range");
        DiagnosticsRecord {
            t: state.t,
            u_h: sq(a).sqrt(),
            grad_u_l2: a
                .iter()
                .zip(lam)
                .map(|(c, l)| l * c * c)
                .sum::<f64>()
                .sqrt(),
            au_h: a
                .iter()
                .zip(lam)
                .map(|(c, l)| (l * c).powi(2))
                .sum::<f64>()
                .sqrt(),
            q_l1: mesh.norm_lp(&grid, 1.0),
            q_l2: mesh.norm_lp(&grid, 2.0),
            q_l4: mesh.norm_lp(&grid, 4.0),
            q_linf: mesh.norm_lp(&grid, f64::INFINITY),
            q_d05: dn(0.5),
            q_d1: dn(1.0),
            q_d15: dn(1.5),
            q_d2: dn(2.0),
            lam_q_l4: mesh.norm_lp(&lam_q, 4.0),
            energy_residual: ledger.residual(a),
            dissipation_u: ledger.dissipation_u,
            dissipation_q: ledger.dissipation_q,
        }
    }

    fn dissipation_rates(&self, s: &SimState) -> (f64, f64) {
        let du =
            s.a.iter()
                .zip(self.stokes.values())
                .map(|(c, l)| l * c * c)
                .sum();
        let dq = s.b.iter().zip(&self.root_mu).map(|(c, r)| r * c * c).sum();
        (du, dq)
    }

    /// Integrate from `init` according to `settings`.
    pub fn run(&self, init: &SimState, settings: &RunSettings) -> Result<Trajectory> {
        self.check_state(init)?;
        let steps = settings.steps()?;
        let dt = settings.dt;
        let mut ledger = EnergyLedger {
            energy0: sq(&init.a),
            ..Default::default()
        };
        let mut state = init.clone();
        let mut eval = self.evaluate(&state.a, &state.b);
        let mut rates = self.dissipation_rates(&state);
        let first = self.diagnostics(&state, &ledger);
        let limit = BLOWUP_FACTOR * first.composite();
        let mut records = vec![first];
        let mut last_good = records[0].clone();
        let mut snapshots = Vec::new();
        let mut pending: Vec<f64> = settings.snapshot_times.clone();
        pending.sort_by(f64::total_cmp);
        let mut pending = pending.into_iter().peekable();
        let eps = 1e-9 * dt;
        while pending.peek().is_some_and(|&ts| ts <= eps) {
            snapshots.extend(self.snapshot(&state, pending.next().unwrap()));
        }

        for k in 1..=steps {
            let next = match self.advance(&state, &eval, dt) {
                Ok(s) => s,
                Err(Error::BlowUp { time, reason, .. }) => {
                    return Err(Error::BlowUp {
                        time,
                        reason,
                        last_good: Box::new(Some(last_good)),
                    })
                }
                Err(e) => return Err(e),
            };
            state = SimState {
                t: k as f64 * dt,
                ..next
            };
            let next_eval = self.evaluate(&state.a, &state.b);
            let next_rates = self.dissipation_rates(&state);
            ledger.dissipation_u += 0.5 * dt * (rates.0 + next_rates.0);
            ledger.dissipation_q += 0.5 * dt * (rates.1 + next_rates.1);
            ledger.work += 0.5 * dt * (eval.work + next_eval.work);
            eval = next_eval;
            rates = next_rates;

            if k % settings.diag_every == 0 || k == steps {
                let rec = self.diagnostics(&state, &ledger);
                let big = rec.largest_norm();
                if limit > 0.0 && big > limit {
                    return Err(Error::BlowUp {
                        time: state.t,
                        reason: format!("tracked norm {big:e} exceeds {limit:e}"),
                        last_good: Box::new(Some(last_good)),
                    });
                }
                last_good = rec.clone();
                records.push(rec);
            }
            while pending.peek().is_some_and(|&ts| ts <= state.t + eps) {
                snapshots.extend(self.snapshot(&state, pending.next().unwrap()));
            }
        }
        Ok(Trajectory {
            records,
            snapshots,
            final_state: state,
            ledger,
        })
    }

    fn snapshot(&self, state: &SimState, requested: f64) -> [Snapshot; 2] {
        [
            Snapshot {
                time: state.t,
                requested_time: requested,
                field_name: "charge".into(),
                values: self.charge_field(&state.b),
            },
            Snapshot {
                time: state.t,
                requested_time: requested,
                field_name: "vorticity".into(),
                values: self.vorticity(&state.a),
            },
        ]
    }
}

/// Time stepping parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct RunSettings {
    pub dt: f64,
    pub t_end: f64,
    /// Diagnostics every k-th step (the first and last state are always kept).
    pub diag_every: usize,
    pub snapshot_times: Vec<f64>,
}

impl RunSettings {
    pub fn new(dt: f64, t_end: f64) -> Self {
        RunSettings {
            dt,
            t_end,
            diag_every: 1,
            snapshot_times: Vec::new(),
        }
    }

    /// Number of steps; `t_end` must be an integer multiple of `dt`.
    pub fn steps(&self) -> Result<usize> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::config(
                "time.dt",
                format!("must be positive, got {}", self.dt),
            ));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::config(
                "time.t_end",
                format!("must be nonnegative, got {}", self.t_end),
            ));
        }
        if self.diag_every == 0 {
            return Err(Error::config("time.diag_every", "must be at least 1"));
        }
        let steps = (self.t_end / self.dt).round();
        if (steps * self.dt - self.t_end).abs() > 1e-9 * self.t_end.max(self.dt) {
            return Err(Error::config(
                "time.t_end",
                format!(
                    "t_end = {} is not a multiple of dt = {}",
                    self.t_end, self.dt
                ),
            ));
        }
        Ok(steps as usize)
    }
}

/// A grid field captured during a run.
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    /// Time of the captured state.
    pub time: f64,
    pub requested_time: f64,
    pub field_name: String,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub records: Vec<DiagnosticsRecord>,
    pub snapshots: Vec<Snapshot>,
    pub final_state: SimState,
    pub ledger: EnergyLedger,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigensolver::lowest_eigenpairs;
    use crate::mesh::{assemble_laplacian, build_rectangle_mesh};
    use crate::stokes::stokes_basis;

    fn system(m: usize, n: usize, toggles: Toggles) -> GalerkinSystem {
        let mesh = build_rectangle_mesh(12, 12, 1.0, 1.0).unwrap();
        let sb = stokes_basis(&mesh, m).unwrap();
        let cb = lowest_eigenpairs(&assemble_laplacian(&mesh), n).unwrap();
        GalerkinSystem::new(mesh, sb, cb, toggles).unwrap()
    }

    #[test]
    fn header_has_sixteen_columns() {
        assert_eq!(DiagnosticsRecord::HEADER.split(',').count(), 16);
    }

    #[test]
    fn single_modes_decay_exactly() {
        let sys = system(1, 1, Toggles::decoupled());
        let s0 = SimState {
            t: 0.0,
            a: vec![1.0],
            b: vec![1.0],
        };
        let traj = sys.run(&s0, &RunSettings::new(0.01, 0.5)).unwrap();
        let s = traj.final_state;
        let la = sys.stokes().values()[0];
        let mu = sys.charge().values()[0];
        assert!((s.a[0] / (-la * 0.5).exp() - 1.0).abs() < 1e-12);
        assert!((s.b[0] / (-mu.sqrt() * 0.5).exp() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_velocity_mode_ignores_self_advection() {
        let toggles = Toggles {
            nonlinear_on: true,
            ..Toggles::decoupled()
        };
        let sys = system(1, 1, toggles);
        let s0 = SimState {
            t: 0.0,
            a: vec![2.0],
            b: vec![0.0],
        };
        let s = sys.step(&s0, 1e-3).unwrap();
        let la = sys.stokes().values()[0];
        assert!((s.a[0] - 2.0 * (-la * 1e-3).exp()).abs() < 1e-12);
    }

    #[test]
    fn zero_data_stays_zero() {
        let sys = system(4, 4, Toggles::default());
        let traj = sys
            .run(&SimState::zeros(4, 4), &RunSettings::new(0.01, 0.1))
            .unwrap();
        for r in &traj.records {
            assert!(r.values()[1..].iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn force_is_even_in_charge() {
        let sys = system(4, 4, Toggles::default());
        let b = vec![1.0, -0.5, 0.25, 0.1];
        let neg: Vec<f64> = b.iter().map(|v| -v).collect();
        let q = SpectralField::from_coefficients(sys.charge(), b).unwrap();
        let nq = SpectralField::from_coefficients(sys.charge(), neg).unwrap();
        let f1 = force_term(&q, sys.stokes(), sys.mesh());
        let f2 = force_term(&nq, sys.stokes(), sys.mesh());
        assert!(f1.iter().any(|v| v.abs() > 1e-8));
        for (x, y) in f1.iter().zip(&f2) {
            assert!((x - y).abs() < 1e-14);
        }
        assert!(force_term(
            &SpectralField::zeros(sys.charge()),
            sys.stokes(),
            sys.mesh()
        )
        .iter()
        .all(|&v| v == 0.0));
    }

    #[test]
    fn cfl_violation_suggests_dt() {
        let sys = system(2, 2, Toggles::default());
        let s0 = SimState {
            t: 0.0,
            a: vec![50.0, 0.0],
            b: vec![0.0, 0.0],
        };
        match sys.step(&s0, 1.0) {
            Err(Error::Cfl {
                ratio,
                suggested_dt,
            }) => {
                assert!(ratio > CFL_LIMIT);
                assert!(sys.step(&s0, suggested_dt * 0.99).is_ok());
            }
            other => panic!("expected CFL error, got {other:?}"),
        }
    }

    #[test]
    fn dnorm_of_first_mode_is_eigenvalue() {
        let sys = system(2, 3, Toggles::default());
        let s = SimState {
            t: 0.0,
            a: vec![0.0, 1.0],
            b: vec![1.0, 0.0, 0.0],
        };
        let r = sys.diagnostics(&s, &EnergyLedger::default());
        assert!((r.q_d2 - sys.charge().values()[0]).abs() < 1e-12 * r.q_d2);
        assert!((r.au_h - sys.stokes().values()[1]).abs() < 1e-12 * r.au_h);
    }

    #[test]
    fn settings_validation() {
        assert!(RunSettings::new(0.0, 1.0).steps().is_err());
        assert!(RunSettings::new(0.3, 1.0).steps().is_err());
        assert_eq!(RunSettings::new(0.1, 1.0).steps().unwrap(), 10);
    }
}
