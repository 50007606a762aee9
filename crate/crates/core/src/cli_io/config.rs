use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::dynamics::{GalerkinSystem, RunSettings, SimState, Toggles};
use crate::eigensolver::{lowest_eigenpairs_with, EigenBasis, EigenCache, EigenOptions};
use crate::error::{Error, Result};
use crate::mesh::{assemble_laplacian, Mesh, MeshSpec, VectorField};
use crate::spectral_ops::project;
use crate::stokes::{perp_gradient_matrix, stokes_basis_with, StokesBasis};

/// Largest grid on which `full_grid_charge` is accepted; the full basis is
/// computed densely.
pub const FULL_GRID_LIMIT: usize = 1600;

/// Everything a simulation run needs. Every field has a default, and unknown
/// keys anywhere in the document are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub mesh: MeshSpec,
    pub modes: Modes,
    pub time: TimeConfig,
    pub initial_data: InitialData,
    pub toggles: ToggleConfig,
    pub output: OutputConfig,
    /// Base seed for the eigensolver start block and the `random` presets.
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Modes {
    pub m_velocity: usize,
    pub n_charge: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeConfig {
    pub dt: f64,
    pub t_end: f64,
    pub diag_every: usize,
    pub snapshot_times: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialData {
    /// Stream-function preset for `u₀`.
    pub velocity: String,
    /// Preset for `q₀`.
    pub charge: String,
    pub velocity_scale: f64,
    pub charge_scale: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToggleConfig {
    pub coupling_on: bool,
    pub transport_on: bool,
    pub nonlinear_on: bool,
    /// Use every discrete Dirichlet mode for the charge, so that charge
    /// equation is solved on the full grid space rather than truncated.
    pub full_grid_charge: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    /// `diagnostics.csv` plus snapshot CSV/JSON pairs.
    Csv,
    /// `diagnostics.json`, the records as an array of objects.
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub directory: PathBuf,
    pub formats: Vec<OutputFormat>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mesh: MeshSpec::unit_square(32),
            modes: Modes::default(),
            time: TimeConfig::default(),
            initial_data: InitialData::default(),
            toggles: ToggleConfig::default(),
            output: OutputConfig::default(),
            seed: 0,
        }
    }
}

impl Default for Modes {
    fn default() -> Self {
        Modes {
            m_velocity: 16,
            n_charge: 16,
        }
    }
}

impl Default for TimeConfig {
    fn default() -> Self {
        TimeConfig {
            dt: 1e-3,
            t_end: 1.0,
            diag_every: 10,
            snapshot_times: Vec::new(),
        }
    }
}

impl Default for InitialData {
    fn default() -> Self {
        InitialData {
            velocity: "zero".into(),
            charge: "eigen:1".into(),
            velocity_scale: 1.0,
            charge_scale: 1.0,
        }
    }
}

impl Default for ToggleConfig {
    fn default() -> Self {
        ToggleConfig {
            coupling_on: true,
            transport_on: true,
            nonlinear_on: true,
            full_grid_charge: false,
        }
    }
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            directory: PathBuf::from("out"),
            formats: vec![OutputFormat::Csv],
        }
    }
}

/// Named initial-data presets.
#[derive(Clone, Debug, PartialEq)]
pub enum Preset {
    Zero,
    /// The j-th basis function, counted from 1.
    Eigen(usize),
    GaussianBlob {
        x0: f64,
        y0: f64,
        sigma: f64,
        amplitude: f64,
    },
    /// Coefficients `z_j j^{-decay}` with standard normal `z_j`.
    Random {
        seed: u64,
        decay: f64,
    },
}

impl Preset {
    pub fn parse(text: &str) -> std::result::Result<Preset, String> {
        let t = text.trim();
        if t == "zero" {
            return Ok(Preset::Zero);
        }
        if let Some(j) = t.strip_prefix("eigen:") {
            let j: usize = j
                .trim()
                .parse()
                .map_err(|_| format!("`{t}`: expected eigen:<positive integer>"))?;
            if j == 0 {
                return Err(format!("`{t}`: modes are counted from 1"));
            }
            return Ok(Preset::Eigen(j));
        }
        let args = |name: &str| -> Option<std::result::Result<Vec<f64>, String>> {
            let inner = t.strip_prefix(name)?.strip_prefix('(')?.strip_suffix(')')?;
            Some(
                inner
                    .split(',')
                    .map(|s| {
                        s.trim()
                            .parse::<f64>()
                            .map_err(|_| format!("`{t}`: bad number `{}`", s.trim()))
                    })
                    .collect(),
            )
        };
        if let Some(v) = args("gaussian-blob") {
            let v = v?;
            let [x0, y0, sigma, amplitude] = v[..] else {
                return Err(format!(
                    "`{t}`: gaussian-blob takes (x0, y0, sigma, amplitude)"
                ));
            };
            if sigma.is_nan() || sigma <= 0.0 {
                return Err(format!("`{t}`: sigma must be positive"));
            }
            return Ok(Preset::GaussianBlob {
                x0,
                y0,
                sigma,
                amplitude,
            });
        }
        if let Some(v) = args("random") {
            let v = v?;
            let [seed, decay] = v[..] else {
                return Err(format!("`{t}`: random takes (seed, decay_rate)"));
            };
            if seed < 0.0 || seed.fract() != 0.0 {
                return Err(format!("`{t}`: seed must be a nonnegative integer"));
            }
            return Ok(Preset::Random {
                seed: seed as u64,
                decay,
            });
        }
        Err(format!(
            "unknown preset `{t}` (expected zero, eigen:j, gaussian-blob(x0,y0,sigma,amplitude) or random(seed,decay_rate))"
        ))
    }

    fn random_coeffs(seed: u64, stream: u64, decay: f64, len: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        (1..=len)
            .map(|j| {
                let z: f64 = StandardNormal.sample(&mut rng);
                z * (j as f64).powf(-decay)
            })
            .collect()
    }

    fn blob(mesh: &Mesh, x0: f64, y0: f64, sigma: f64, amplitude: f64) -> Vec<f64> {
        mesh.points()
            .iter()
            .map(|p| {
                let r2 = (p[0] - x0).powi(2) + (p[1] - y0).powi(2);
                amplitude * (-r2 / (2.0 * sigma * sigma)).exp()
            })
            .collect()
    }

    /// Velocity coefficients, the preset read as a stream function.
    pub fn velocity_coeffs(
        &self,
        mesh: &Mesh,
        basis: &StokesBasis,
        base_seed: u64,
    ) -> std::result::Result<Vec<f64>, String> {
        let m = basis.len();
        Ok(match *self {
            Preset::Zero => vec![0.0; m],
            Preset::Eigen(j) => unit(j, m)?,
            Preset::GaussianBlob {
                x0,
                y0,
                sigma,
                amplitude,
            } => {
                let psi = Self::blob(mesh, x0, y0, sigma, amplitude);
                let w = perp_gradient_matrix(mesh).mul_vec(&psi);
                let n = mesh.dimension();
                let u = VectorField {
                    x: w[..n].to_vec(),
                    y: w[n..].to_vec(),
                };
                basis.project(&u).map_err(|e| e.to_string())?
            }
            Preset::Random { seed, decay } => Self::random_coeffs(base_seed, seed, decay, m),
        })
    }

    pub fn charge_coeffs(
        &self,
        mesh: &Mesh,
        basis: &EigenBasis,
        base_seed: u64,
    ) -> std::result::Result<Vec<f64>, String> {
        let n = basis.len();
        Ok(match *self {
            Preset::Zero => vec![0.0; n],
            Preset::Eigen(j) => unit(j, n)?,
            Preset::GaussianBlob {
                x0,
                y0,
                sigma,
                amplitude,
            } => project(basis, &Self::blob(mesh, x0, y0, sigma, amplitude))
                .map_err(|e| e.to_string())?,
            // distinct stream from the velocity preset with the same seed
            Preset::Random { seed, decay } => {
                Self::random_coeffs(base_seed, seed ^ (1 << 63), decay, n)
            }
        })
    }
}

fn unit(j: usize, len: usize) -> std::result::Result<Vec<f64>, String> {
    if j > len {
        return Err(format!("eigen:{j} exceeds the {len} available modes"));
    }
    let mut v = vec![0.0; len];
    v[j - 1] = 1.0;
    Ok(v)
}

/// Parse and validate a JSON run configuration. Errors name the offending
/// field as a dotted path.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::config(
            if path == "." { String::new() } else { path },
            e.into_inner().to_string(),
        )
    })?;
    cfg.validate()?;
    Ok(cfg)
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.mesh
            .build()
            .map_err(|e| Error::config("mesh", e.to_string()))?;
        if self.modes.m_velocity == 0 {
            return Err(Error::config("modes.m_velocity", "must be positive"));
        }
        if self.modes.n_charge == 0 && !self.toggles.full_grid_charge {
            return Err(Error::config("modes.n_charge", "must be positive"));
        }
        self.settings().steps()?;
        for (i, &ts) in self.time.snapshot_times.iter().enumerate() {
            if !(0.0..=self.time.t_end).contains(&ts) {
                return Err(Error::config(
                    format!("time.snapshot_times[{i}]"),
                    format!("{ts} is outside [0, t_end]"),
                ));
            }
        }
        for (path, text) in [
            ("initial_data.velocity", &self.initial_data.velocity),
            ("initial_data.charge", &self.initial_data.charge),
        ] {
            Preset::parse(text).map_err(|m| Error::config(path, m))?;
        }
        for (path, v) in [
            (
                "initial_data.velocity_scale",
                self.initial_data.velocity_scale,
            ),
            ("initial_data.charge_scale", self.initial_data.charge_scale),
        ] {
            if !v.is_finite() {
                return Err(Error::config(path, "must be finite"));
            }
        }
        Ok(())
    }

    pub fn settings(&self) -> RunSettings {
        RunSettings {
            dt: self.time.dt,
            t_end: self.time.t_end,
            diag_every: self.time.diag_every,
            snapshot_times: self.time.snapshot_times.clone(),
        }
    }

    pub fn toggles(&self) -> Toggles {
        Toggles {
            coupling_on: self.toggles.coupling_on,
            transport_on: self.toggles.transport_on,
            nonlinear_on: self.toggles.nonlinear_on,
        }
    }

    pub fn eigen_options(&self) -> EigenOptions {
        EigenOptions {
            seed: EigenOptions::default().seed ^ self.seed,
            ..EigenOptions::default()
        }
    }

    /// Assemble mesh and bases, reading and filling the cache when given.
    pub fn build_system(&self, cache: Option<&EigenCache>) -> Result<GalerkinSystem> {
        let mesh = self.mesh.build()?;
        let opts = self.eigen_options();
        let n = if self.toggles.full_grid_charge {
            if mesh.dimension() > FULL_GRID_LIMIT {
                return Err(Error::config(
                    "toggles.full_grid_charge",
                    format!(
                        "the full grid space has {} unknowns; at most {} are supported",
                        mesh.dimension(),
                        FULL_GRID_LIMIT
                    ),
                ));
            }
            mesh.dimension()
        } else {
            self.modes.n_charge
        };
        let charge = dirichlet_basis(&mesh, n, &opts, cache)?;
        let stokes = stokes_basis_cached(&mesh, self.modes.m_velocity, &opts, cache)?;
        GalerkinSystem::new(mesh, stokes, charge, self.toggles())
    }

    pub fn initial_state(&self, sys: &GalerkinSystem) -> Result<SimState> {
        let id = &self.initial_data;
        let vel =
            Preset::parse(&id.velocity).map_err(|m| Error::config("initial_data.velocity", m))?;
        let chg = Preset::parse(&id.charge).map_err(|m| Error::config("initial_data.charge", m))?;
        let mut a = vel
            .velocity_coeffs(sys.mesh(), sys.stokes(), self.seed)
            .map_err(|m| Error::config("initial_data.velocity", m))?;
        let mut b = chg
            .charge_coeffs(sys.mesh(), sys.charge(), self.seed)
            .map_err(|m| Error::config("initial_data.charge", m))?;
        a.iter_mut().for_each(|v| *v *= id.velocity_scale);
        b.iter_mut().for_each(|v| *v *= id.charge_scale);
        Ok(SimState { t: 0.0, a, b })
    }
}

/// Dirichlet eigenbasis, through the cache when one is given.
pub fn dirichlet_basis(
    mesh: &Mesh,
    n: usize,
    opts: &EigenOptions,
    cache: Option<&EigenCache>,
) -> Result<EigenBasis> {
    let key = format!("{}-dirichlet-{n}", mesh.spec().slug());
    if let Some(c) = cache {
        if let Some((values, vectors)) = c.load(&key)? {
            return Ok(EigenBasis::new(values, vectors, mesh.weights().to_vec()));
        }
    }
    let basis = lowest_eigenpairs_with(&assemble_laplacian(mesh), n, opts)?;
    if let Some(c) = cache {
        c.store(&key, basis.values(), basis.vectors())?;
    }
    Ok(basis)
}

/// Stokes basis, through the cache when one is given. Only the stream
/// functions are stored; velocities are recomputed from them.
pub fn stokes_basis_cached(
    mesh: &Mesh,
    m: usize,
    opts: &EigenOptions,
    cache: Option<&EigenCache>,
) -> Result<StokesBasis> {
    let key = format!("{}-stokes-{m}", mesh.spec().slug());
    if let Some(c) = cache {
        if let Some((values, stream)) = c.load(&key)? {
            return StokesBasis::from_stream(mesh, values, stream);
        }
    }
    let basis = stokes_basis_with(mesh, m, opts)?;
    if let Some(c) = cache {
        c.store(&key, basis.values(), basis.stream_functions())?;
    }
    Ok(basis)
}
