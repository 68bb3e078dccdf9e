use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use biotvem::geometry::{
    build_structured_cube, load_mesh, mesh_size, quality_report, BoxDomain, MeshFormat, PolyMesh,
};
use biotvem::system::{AssemblyOptions, Simulation, TimeGrid};
use biotvem::verify::{
    convergence_study, footing_config, write_errors_csv, write_state_vtk, ConfigError,
    ManufacturedCase, RunConfig,
};
use biotvem::Error;

#[derive(Parser)]
#[command(name = "biotvem", version, about = "Virtual element solver for Biot poroelasticity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Case {
    Test1,
    Test2,
}

#[derive(Subcommand)]
enum Command {
    /// Manufactured-solution convergence study.
    Convergence {
        #[arg(long, value_enum)]
        case: Case,
        /// `structured:n1,n2,...` or a comma separated list of mesh files.
        #[arg(long)]
        meshes: String,
        /// Time step (defaults to the case's own).
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        out: PathBuf,
        /// Symmetrize the block system before factorization.
        #[arg(long)]
        symmetrize: bool,
    },
    /// Run a configuration file (`builtin:footing` for the bundled footing).
    Solve {
        #[arg(long)]
        config: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        symmetrize: bool,
    },
    /// Print counts, mesh size and quality of a mesh.
    MeshInfo {
        /// Mesh file or `structured:n`.
        mesh: String,
    },
}

fn structured(list: &str) -> Result<Vec<usize>, Error> {
    list.split(',')
        .map(|s| match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(ConfigError::Invalid(format!("bad structured mesh size '{s}'")).into()),
        })
        .collect()
}

fn load(path: &Path) -> Result<PolyMesh, Error> {
    let format = MeshFormat::from_path(path).ok_or_else(|| {
        ConfigError::Invalid(format!("unknown mesh format for {}", path.display()))
    })?;
    Ok(load_mesh(path, format)?)
}

fn meshes(spec: &str) -> Result<Vec<PolyMesh>, Error> {
    match spec.strip_prefix("structured:") {
        Some(list) => Ok(structured(list)?
            .into_iter()
            .map(|n| build_structured_cube(n, &BoxDomain::unit()))
            .collect()),
        None => spec.split(',').map(|p| load(Path::new(p.trim()))).collect(),
    }
}

fn create_dir(out: &Path) -> Result<(), Error> {
    std::fs::create_dir_all(out).map_err(|source| Error::Io {
        path: out.display().to_string(),
        source,
    })
}

fn convergence(
    case: Case,
    mesh_spec: &str,
    dt: Option<f64>,
    out: &Path,
    symmetrize: bool,
) -> Result<(), Error> {
    let mut case = match case {
        Case::Test1 => ManufacturedCase::test1(),
        Case::Test2 => ManufacturedCase::test2(),
    };
    if let Some(dt) = dt {
        case.time = TimeGrid::new(case.time.t0, case.time.tf, dt)?;
    }
    let options = AssemblyOptions {
        symmetrize,
        ..Default::default()
    };
    let report = convergence_study(&case, meshes(mesh_spec)?, options)?;
    create_dir(out)?;
    let csv = out.join(format!("{}.csv", case.name));
    write_errors_csv(&report, &csv)?;
    println!("{:>10} {:>11} {:>11} {:>11} {:>11}", "h", "E_u", "E_sigma", "E_p", "E_w");
    for (row, r) in report.rows.iter().zip(report.rates()) {
        let e = row.values();
        print!("{:>10.4e} {:>11.4e} {:>11.4e} {:>11.4e} {:>11.4e}", row.h, e[0], e[1], e[2], e[3]);
        if let Some(r) = r {
            print!("   rates {:.2} {:.2} {:.2} {:.2}", r[0], r[1], r[2], r[3]);
        }
        println!();
    }
    println!("wrote {}", csv.display());
    Ok(())
}

fn solve(config: &str, out: &Path, symmetrize: bool) -> Result<(), Error> {
    let cfg = match config {
        "builtin:footing" => footing_config(),
        path => RunConfig::load(path)?,
    };
    let spec = cfg.to_problem()?;
    let options = AssemblyOptions {
        symmetrize,
        ..Default::default()
    };
    let sim = Simulation::new(&spec, options)?;
    create_dir(out)?;
    let every = cfg.output.vtk_every;
    let steps = spec.time.steps;
    let mut max_residual: f64 = 0.0;
    let last = sim.run(|state, info| {
        max_residual = max_residual.max(info.report.relative_residual);
        if info.step % every == 0 || info.step == steps {
            let path = out.join(format!("state_{:04}.vtk", info.step));
            write_state_vtk(&spec.mesh, sim.discretization(), state, None, path)?;
        }
        Ok(())
    })?;
    write_state_vtk(
        &spec.mesh,
        sim.discretization(),
        &last,
        Some(1.0),
        out.join("final_deformed.vtk"),
    )?;
    let (imax, pmax) = last
        .p
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    let x = spec.mesh.cell_geometry(imax).barycenter;
    println!("t = {}, {} steps, max residual {:.3e}", last.t, steps, max_residual);
    println!(
        "max pressure {:.6e} in cell {} at ({:.4}, {:.4}, {:.4})",
        pmax, imax, x.x, x.y, x.z
    );
    println!("wrote {}", out.display());
    Ok(())
}

fn mesh_info(spec: &str) -> Result<(), Error> {
    let mesh = match spec.strip_prefix("structured:") {
        Some(n) => {
            let n = structured(n)?;
            if n.len() != 1 {
                return Err(ConfigError::Invalid("mesh-info takes one mesh".into()).into());
            }
            build_structured_cube(n[0], &BoxDomain::unit())
        }
        None => load(Path::new(spec))?,
    };
    let q = quality_report(&mesh);
    println!("vertices {}", mesh.num_vertices());
    println!("faces    {}", mesh.num_faces());
    println!("cells    {}", mesh.num_cells());
    println!("boundary faces {}", mesh.boundary_faces().count());
    let tags: Vec<&str> = mesh.tags().into_iter().collect();
    println!("tags     {}", tags.join(", "));
    println!("h        {:.6}", mesh_size(&mesh));
    println!("min inradius ratio      {:.4}", q.min_inradius_ratio);
    println!("min face inradius ratio {:.4}", q.min_face_inradius_ratio);
    println!("min edge ratio          {:.4}", q.min_edge_ratio);
    println!("gamma    {:.4} (cell {})", q.gamma, q.worst_cell);
    Ok(())
}

fn threads() -> Result<(), String> {
    let Ok(v) = std::env::var("BIOTVEM_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .map_err(|_| format!("BIOTVEM_THREADS must be a non-negative integer, got '{v}'"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Err(e) = threads() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    let result = match &cli.command {
        Command::Convergence {
            case,
            meshes,
            dt,
            out,
            symmetrize,
        } => convergence(*case, meshes, *dt, out, *symmetrize),
        Command::Solve {
            config,
            out,
            symmetrize,
        } => solve(config, out, *symmetrize),
        Command::MeshInfo { mesh } => mesh_info(mesh),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 2 } else { 1 })
        }
    }
}
