use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use electroconvection::cli_io::{
    dirichlet_basis, parse_config, parse_mesh_flag, run_simulation, stokes_basis_cached,
    write_table, RunConfig,
};
use electroconvection::eigensolver::{EigenCache, EigenOptions};
use electroconvection::measure::{commutator_sweep, lfour_sweep, random_coeffs, velocity_ratios};
use electroconvection::mesh::MeshSpec;
use electroconvection::verify::{format_table, rectangle_spectrum, run_suite, SuiteSize};
use electroconvection::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_VERIFY: u8 = 2;
const EXIT_BLOWUP: u8 = 3;

/// Spectral Galerkin electroconvection simulator.
#[derive(Parser, Debug)]
#[command(name = "electroconvect", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Mesh override: square, square:N, rect:NX:NY:LX:LY, annulus:NR:NTHETA[:R_IN:R_OUT]
    #[arg(long)]
    mesh: Option<String>,
    /// Number of velocity (Stokes) modes
    #[arg(long)]
    m: Option<usize>,
    /// Number of charge (Dirichlet) modes
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for cached eigenpairs
    #[arg(long)]
    cache: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate a configured run and write diagnostics and snapshots
    Run {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Compute (and cache) eigenpairs and print the spectra
    Eig {
        #[command(flatten)]
        common: Common,
    },
    /// Run the invariant suite and print a pass/fail table
    Verify {
        #[command(flatten)]
        common: Common,
    },
    /// Measure commutator and inequality ratios over random samples
    Sweep {
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Number of leading modes the random samples are drawn from
        #[arg(long, default_value_t = 8)]
        active: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

fn mesh_of(common: &Common) -> Result<MeshSpec, Error> {
    match &common.mesh {
        Some(m) => parse_mesh_flag(m),
        None => Ok(MeshSpec::unit_square(32)),
    }
}

fn cache_of(common: &Common) -> Option<EigenCache> {
    common.cache.as_ref().map(EigenCache::new)
}

fn cmd_run(config: Option<PathBuf>, out: Option<PathBuf>, common: Common) -> Result<(), Error> {
    let mut cfg = match &config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Io {
                path: p.clone(),
                source: e,
            })?;
            parse_config(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(m) = &common.mesh {
        cfg.mesh = parse_mesh_flag(m)?;
    }
    if let Some(m) = common.m {
        cfg.modes.m_velocity = m;
    }
    if let Some(n) = common.n {
        cfg.modes.n_charge = n;
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(o) = out {
        cfg.output.directory = o;
    }
    cfg.validate()?;
    let cache = cache_of(&common);
    let res = run_simulation(&cfg, cache.as_ref())?;
    let last = res
        .trajectory
        .records
        .last()
        .expect("a run records its initial state");
    println!(
        "t = {}  |u|_H = {:.6e}  |q|_L2 = {:.6e}  energy residual = {:.3e}",
        last.t, last.u_h, last.q_l2, last.energy_residual
    );
    for f in &res.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn cmd_eig(common: Common) -> Result<(), Error> {
    let spec = mesh_of(&common)?;
    let mesh = spec.build()?;
    let opts = EigenOptions {
        seed: EigenOptions::default().seed ^ common.seed.unwrap_or(0),
        ..EigenOptions::default()
    };
    let cache = cache_of(&common);
    let m = common.m.unwrap_or(5);
    let basis = dirichlet_basis(&mesh, m, &opts, cache.as_ref())?;
    let exact = match spec {
        MeshSpec::Rectangle { nx, ny, lx, ly } => Some(rectangle_spectrum(nx, ny, lx, ly, m)),
        MeshSpec::Annulus { .. } => None,
    };
    println!("# dirichlet eigenvalues on {}", spec.slug());
    for (j, mu) in basis.values().iter().enumerate() {
        match &exact {
            Some(e) => println!("{:>4}  {:.15e}  closed form {:.15e}", j + 1, mu, e[j]),
            None => println!("{:>4}  {:.15e}", j + 1, mu),
        }
    }
    if let Some(n) = common.n {
        let sb = stokes_basis_cached(&mesh, n, &opts, cache.as_ref())?;
        println!("# stokes eigenvalues");
        for (j, l) in sb.values().iter().enumerate() {
            println!("{:>4}  {:.15e}", j + 1, l);
        }
    }
    Ok(())
}

fn cmd_verify(common: Common) -> Result<bool, Error> {
    let mesh = mesh_of(&common)?.build()?;
    let mut size = SuiteSize::default();
    if let Some(n) = common.n {
        size.dirichlet_modes = n;
    }
    if let Some(m) = common.m {
        size.stokes_modes = m;
    }
    if let Some(s) = common.seed {
        size.seed = s;
    }
    let checks = run_suite(&mesh, &size)?;
    print!("{}", format_table(&checks));
    let failed = checks.iter().filter(|c| !c.passed()).count();
    println!("{} checks, {} failed", checks.len(), failed);
    Ok(failed == 0)
}

fn cmd_sweep(
    samples: usize,
    active: usize,
    out: Option<PathBuf>,
    common: Common,
) -> Result<(), Error> {
    let spec = mesh_of(&common)?;
    let mesh = spec.build()?;
    let opts = EigenOptions::default();
    let cache = cache_of(&common);
    let basis = dirichlet_basis(&mesh, common.n.unwrap_or(64), &opts, cache.as_ref())?;
    let sb = stokes_basis_cached(&mesh, common.m.unwrap_or(16), &opts, cache.as_ref())?;
    let seed = common.seed.unwrap_or(0);
    let active_u = active.min(sb.len());
    let active_q = active.min(basis.len());
    let dir = out.unwrap_or_else(|| PathBuf::from("out"));
    let slug = spec.slug();

    let (comm, (lfour, vel)) = rayon::join(
        || commutator_sweep(&mesh, &basis, &sb, samples, active_u.min(active_q), seed),
        || {
            rayon::join(
                || lfour_sweep(&mesh, &basis, samples, active_q, seed),
                || {
                    (0..samples as u64)
                        .map(|k| {
                            velocity_ratios(&mesh, &sb, &random_coeffs(seed, k, active_u, sb.len()))
                        })
                        .collect::<Vec<_>>()
                },
            )
        },
    );
    let comm = comm?;
    let idx = |k: usize| k as f64;
    write_table(
        &["sample", "commutator_ratio"],
        &comm
            .iter()
            .enumerate()
            .map(|(k, r)| vec![idx(k), *r])
            .collect::<Vec<_>>(),
        &dir.join(format!("sweep_commutator_{slug}.csv")),
    )?;
    write_table(
        &["sample", "lfour_ratio"],
        &lfour
            .iter()
            .enumerate()
            .map(|(k, r)| vec![idx(k), *r])
            .collect::<Vec<_>>(),
        &dir.join(format!("sweep_lfour_{slug}.csv")),
    )?;
    write_table(
        &["sample", "ulfour", "naulfour", "buuau", "abuu"],
        &vel.iter()
            .enumerate()
            .map(|(k, r)| {
                let mut row = vec![idx(k)];
                row.extend(r.as_array());
                row
            })
            .collect::<Vec<_>>(),
        &dir.join(format!("sweep_velocity_{slug}.csv")),
    )?;
    let max = |v: &mut dyn Iterator<Item = f64>| v.fold(0.0f64, f64::max);
    println!(
        "commutator ratio max {:.6e}",
        max(&mut comm.iter().copied())
    );
    println!(
        "lfour ratio max      {:.6e}",
        max(&mut lfour.iter().copied())
    );
    for (i, name) in ["ulfour", "naulfour", "buuau", "abuu"].iter().enumerate() {
        println!(
            "{name:<10} max {:.6e}",
            max(&mut vel.iter().map(|r| r.as_array()[i]))
        );
    }
    println!("wrote sweep tables to {}", dir.display());
    Ok(())
}

fn configure_threads() -> Result<(), String> {
    if let Ok(v) = std::env::var("ELECTROCONVECT_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| format!("ELECTROCONVECT_THREADS must be a positive integer, got `{v}`"))?;
        if n == 0 {
            return Err("ELECTROCONVECT_THREADS must be at least 1".into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn report(e: Error) -> ExitCode {
    eprintln!("error: {e}");
    match e {
        Error::BlowUp { last_good, .. } => {
            if let Some(r) = last_good.as_ref() {
                eprintln!(
                    "last good record: t = {}, |Au|_H = {:e}, |q|_D2 = {:e}",
                    r.t, r.au_h, r.q_d2
                );
            }
            ExitCode::from(EXIT_BLOWUP)
        }
        _ => ExitCode::from(EXIT_USAGE),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_USAGE);
    }
    let result = match cli.command {
        Command::Run {
            config,
            out,
            common,
        } => cmd_run(config, out, common),
        Command::Eig { common } => cmd_eig(common),
        Command::Verify { common } => match cmd_verify(common) {
            Ok(true) => Ok(()),
            Ok(false) => return ExitCode::from(EXIT_VERIFY),
            Err(e) => Err(e),
        },
        Command::Sweep {
            samples,
            active,
            out,
            common,
        } => cmd_sweep(samples, active, out, common),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report(e),
    }
}
