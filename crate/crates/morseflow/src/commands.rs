//! Subcommand implementations. Each writes its outputs and returns the
//! exit code plus what the manifest should record.

use std::path::{Path, PathBuf};
use std::time::Instant;

use morseflow_core::connections::{
    build_morse_family, check_dynamically_gradient, energy_order_violations, zero_count_violations,
    MorseDistanceTable, ProbeSettings,
};
use morseflow_core::equilibria::{enumerate_equilibria, ConvergenceCriteria, ShootSettings};
use morseflow_core::grid::Grid;
use morseflow_core::morse::{
    check_morse_order, is_dynamically_gradient, reorder_morse, robustness_sweep, ReorderOutcome,
};
use morseflow_core::pde::{integrate_for, integrate_until_capture, CaptureSettings};
use morseflow_core::timemap::TimeMap;
use morseflow_core::Sign;
use serde::Serialize;

use crate::cli::{
    Cli, Command, ConnectionsArgs, EquilibriaArgs, GraphArgs, GraphCommand, MorseSweepArgs,
    SimulateArgs, Spacing, SweepArgs, TimemapArgs,
};
use crate::error::{CliError, Result, EXIT_OK, EXIT_PROPERTY};
use crate::formats::{dot, ensure_dir, real, write_csv, write_json, write_records, write_text};
use crate::graph_file::GraphFile;
use crate::init::default_seed;
use crate::manifest::{manifest_path, RunManifest};
use crate::parallel;
use crate::reports::{
    distance_header, CheckJson, DigraphJson, ProfileEntry, ReorderJson, SimulationSummary, SweepJson,
};

/// What a finished command produced.
#[derive(Debug, Default)]
pub struct Outcome {
    pub exit_code: i32,
    /// Output directory or single output file; no manifest when `None`.
    pub primary: Option<(PathBuf, bool)>,
    pub outputs: Vec<PathBuf>,
    pub manifest: RunManifest,
    /// One-line summaries for the terminal.
    pub messages: Vec<String>,
}

impl Outcome {
    fn file(path: &Path) -> Self {
        Outcome {
            primary: Some((path.to_path_buf(), false)),
            outputs: vec![path.to_path_buf()],
            ..Outcome::default()
        }
    }

    fn dir(path: &Path) -> Self {
        Outcome {
            primary: Some((path.to_path_buf(), true)),
            ..Outcome::default()
        }
    }

    fn fail_if(&mut self, failed: bool, message: String) {
        if failed {
            self.exit_code = EXIT_PROPERTY;
            self.messages.push(message);
        }
    }
}

/// Runs `cli`, writes the manifest next to the outputs and returns the
/// exit code.
pub fn run(cli: &Cli, argv: &[String]) -> Result<Outcome> {
    let start = Instant::now();
    let pool = parallel::pool(cli.jobs)?;
    let mut outcome = match &cli.command {
        Command::Timemap(a) => timemap(&pool, a)?,
        Command::Equilibria(a) => equilibria(a)?,
        Command::Sweep(a) => sweep(&pool, a)?,
        Command::Simulate(a) => simulate(a)?,
        Command::Connections(a) => connections(&pool, a)?,
        Command::MorseSweep(a) => morse_sweep(&pool, a)?,
        Command::Graph { command } => graph(command)?,
    };
    if let Some((primary, is_dir)) = outcome.primary.clone() {
        let mut manifest = std::mem::take(&mut outcome.manifest);
        manifest.command_line = argv.to_vec();
        manifest.exit_code = outcome.exit_code;
        manifest.wall_time_s = start.elapsed().as_secs_f64();
        manifest.write(&manifest_path(&primary, is_dir), &outcome.outputs)?;
    }
    Ok(outcome)
}

fn energy_grid(a: &TimemapArgs) -> Result<Vec<f64>> {
    if !(a.emin > 0.0 && a.emax > a.emin && a.emax.is_finite()) {
        return Err(CliError::Input("need 0 < emin < emax".into()));
    }
    if a.points < 2 {
        return Err(CliError::Input("need at least 2 points".into()));
    }
    let last = (a.points - 1) as f64;
    Ok((0..a.points)
        .map(|i| {
            let t = i as f64 / last;
            match a.spacing {
                Spacing::Log => a.emin * (a.emax / a.emin).powf(t),
                Spacing::Linear => a.emin + t * (a.emax - a.emin),
            }
        })
        .collect())
}

fn timemap(pool: &rayon::ThreadPool, a: &TimemapArgs) -> Result<Outcome> {
    let energies = energy_grid(a)?;
    let tm = TimeMap::new(a.model);
    let samples = parallel::timemap_samples(pool, &tm, &energies)?;
    write_csv(
        &a.out,
        &["E", "tau_plus", "tau_minus", "quad_error_estimate"],
        samples
            .iter()
            .map(|s| vec![s.energy, s.tau_plus, s.tau_minus, s.quad_error_estimate]),
    )?;
    let mut out = Outcome::file(&a.out);
    out.manifest.model = Some(a.model.to_string());
    let q = &tm.settings().quadrature;
    out.manifest.tolerances.insert("quadrature_rel_tol".into(), q.rel_tol);
    if a.check_monotone {
        for sign in [Sign::Plus, Sign::Minus] {
            let check = tm.check_monotone(sign, &energies)?;
            let at = check.first_violation.map(|v| v.energies.0);
            out.fail_if(
                !check.holds,
                format!("tau_{sign} is not increasing near E = {at:?}"),
            );
        }
    }
    out.messages.push(format!("wrote {} samples to {}", samples.len(), a.out.display()));
    Ok(out)
}

fn profile_file(id: &str) -> String {
    let stem: String = id
        .chars()
        .map(|c| match c {
            '+' => 'p',
            '-' => 'm',
            c => c,
        })
        .collect();
    format!("{stem}.csv")
}

fn equilibria(a: &EquilibriaArgs) -> Result<Outcome> {
    let shoot = ShootSettings::default();
    let eqs = enumerate_equilibria(&TimeMap::new(a.model), a.interior, &shoot)?;
    ensure_dir(&a.out_dir)?;
    let mut out = Outcome::dir(&a.out_dir);
    let mut index = Vec::new();
    for p in &eqs {
        let name = profile_file(&p.id.to_string());
        let path = a.out_dir.join(&name);
        write_csv(
            &path,
            &["x", "u"],
            p.values.iter().enumerate().map(|(i, &u)| vec![p.grid.x(i), u]),
        )?;
        out.outputs.push(path);
        index.push(ProfileEntry::new(p, name));
    }
    #[derive(Serialize)]
    struct Index {
        model: String,
        interior: usize,
        count: usize,
        profiles: Vec<ProfileEntry>,
    }
    let path = a.out_dir.join("index.json");
    write_json(
        &path,
        &Index {
            model: a.model.to_string(),
            interior: a.interior,
            count: eqs.len(),
            profiles: index,
        },
    )?;
    out.outputs.push(path);
    out.manifest.model = Some(a.model.to_string());
    out.manifest.tolerances.insert("bc_tol".into(), shoot.bc_tol);
    out.manifest.tolerances.insert("hamiltonian_tol".into(), shoot.hamiltonian_tol);
    out.messages.push(format!("{} equilibria in {}", eqs.len(), a.out_dir.display()));
    Ok(out)
}

fn sweep(pool: &rayon::ThreadPool, a: &SweepArgs) -> Result<Outcome> {
    let shoot = ShootSettings::default();
    let criteria = ConvergenceCriteria {
        conv_tol: a.conv_tol,
        ..ConvergenceCriteria::default()
    };
    let s = parallel::convergence_sweep(pool, &a.eps, a.n, a.sign.into(), a.interior, &shoot, &criteria)?;
    write_csv(
        &a.out,
        &["eps", "dist_l2", "dist_h10"],
        s.rows.iter().map(|r| vec![r.eps, r.dist_l2, r.dist_h10]),
    )?;
    let mut out = Outcome::file(&a.out);
    out.manifest.tolerances.insert("conv_tol".into(), criteria.conv_tol);
    out.manifest.tolerances.insert("zero_floor".into(), criteria.zero_floor);
    out.fail_if(!s.terminal_ok, format!("terminal distance is not below {}", criteria.conv_tol));
    out.fail_if(
        !s.trend_ok,
        format!("distance does not decrease at row {:?}", s.first_trend_break),
    );
    out.fail_if(!s.away_from_zero, format!("profile comes within {} of zero", criteria.zero_floor));
    Ok(out)
}

fn simulate(a: &SimulateArgs) -> Result<Outcome> {
    if !(a.t_end > 0.0 && a.t_end.is_finite()) {
        return Err(CliError::Input("t-end must be positive".into()));
    }
    let grid = Grid::new(a.interior)?;
    let seed = default_seed()?;
    let u0 = a.init.build(grid, seed)?;
    let rec = if a.capture {
        let eqs = enumerate_equilibria(&TimeMap::new(a.model), a.interior, &ShootSettings::default())?;
        let settings = CaptureSettings {
            t_max: a.t_end,
            dt: a.dt,
            ..CaptureSettings::default()
        };
        integrate_until_capture(&a.model, &u0, &eqs, &settings)?
    } else {
        let dt = CaptureSettings {
            dt: a.dt,
            ..CaptureSettings::default()
        }
        .step_size(&a.model);
        integrate_for(&a.model, &u0, a.t_end, dt)?
    };
    ensure_dir(&a.out_dir)?;
    let mut out = Outcome::dir(&a.out_dir);
    let snaps = a.out_dir.join("snapshots.csv");
    write_csv(
        &snaps,
        &["time", "l2_sq", "h10_sq", "lyapunov", "h10_integral"],
        rec.snapshots
            .iter()
            .map(|s| vec![s.time, s.l2_sq, s.h10_sq, s.lyapunov, s.h10_integral]),
    )?;
    let fin = a.out_dir.join("final.csv");
    let f = &rec.final_state;
    write_csv(
        &fin,
        &["x", "u"],
        f.values.iter().enumerate().map(|(i, &u)| vec![f.grid.x(i), u]),
    )?;
    let init_text = a.init.to_string();
    let summary = SimulationSummary::new(a.model.to_string(), init_text, a.init.seed(seed), &rec, a.window);
    let sum = a.out_dir.join("summary.json");
    write_json(&sum, &summary)?;
    out.outputs = vec![snaps, fin, sum];
    out.manifest.model = Some(a.model.to_string());
    if let Some(s) = a.init.seed(seed) {
        out.manifest.seeds.insert("init".into(), s);
    }
    out.manifest.tolerances.insert("dt".into(), rec.dt);
    out.fail_if(!summary.lyapunov_monotone, "Lyapunov functional increased".into());
    out.fail_if(!summary.l2_bound.holds, "L2 absorbing bound failed".into());
    Ok(out)
}

fn connections(pool: &rayon::ThreadPool, a: &ConnectionsArgs) -> Result<Outcome> {
    let eqs = enumerate_equilibria(&TimeMap::new(a.model), a.interior, &ShootSettings::default())?;
    let settings = ProbeSettings {
        amps: a.amps.clone(),
        modes: a.modes.clone(),
        capture: CaptureSettings {
            capture_tol: a.capture_tol,
            dwell: a.dwell,
            t_max: a.t_max,
            dt: None,
        },
    };
    let g = parallel::probe_connections(pool, &a.model, &eqs, &settings)?;
    let family = build_morse_family(&eqs, a.cut)?;
    let verdict = check_dynamically_gradient(&g, &family);
    let zero_bad = zero_count_violations(&g);
    let energy_bad = energy_order_violations(&g);
    ensure_dir(&a.out_dir)?;
    let mut out = Outcome::dir(&a.out_dir);
    let json = a.out_dir.join("digraph.json");
    write_json(
        &json,
        &DigraphJson::new(a.model.to_string(), &g, &family, &verdict, &zero_bad, &energy_bad),
    )?;
    let dot_path = a.out_dir.join("digraph.dot");
    let nodes: Vec<String> = g.nodes.iter().map(|n| n.to_string()).collect();
    let edges: Vec<_> = g
        .edges
        .iter()
        .map(|e| (e.src.to_string(), e.dst.to_string(), Some(format!("k={} a={}", e.mode, e.amp))))
        .collect();
    write_text(&dot_path, &dot("connections", &nodes, &edges))?;
    out.outputs = vec![json, dot_path];
    out.manifest.model = Some(a.model.to_string());
    out.manifest.tolerances.insert("capture_tol".into(), a.capture_tol);
    out.manifest.tolerances.insert("dwell".into(), a.dwell);
    out.manifest.tolerances.insert("t_max".into(), a.t_max);
    out.messages.push(format!(
        "{} probes, {} edges, {} uncaptured",
        g.probes,
        g.edges.len(),
        g.uncaptured.len()
    ));
    out.fail_if(!verdict.passed, "family is not dynamically gradient (empirical)".into());
    out.fail_if(
        !zero_bad.is_empty(),
        format!("{} edges do not lower the zero count", zero_bad.len()),
    );
    Ok(out)
}

fn morse_sweep(pool: &rayon::ThreadPool, a: &MorseSweepArgs) -> Result<Outcome> {
    let table = parallel::morse_distance_sweep(pool, &a.eps, a.cut, a.interior, &ShootSettings::default(), a.tol)?;
    write_distance_csv(&a.out, &table)?;
    let members = a.out.with_extension("members.csv");
    write_records(
        &members,
        &["eps", "member", "dist_h10"],
        table.rows.iter().flat_map(|r| {
            r.member_distances
                .iter()
                .map(move |(id, d)| vec![real(r.eps), id.to_string(), real(*d)])
        }),
    )?;
    let mut out = Outcome::file(&a.out);
    out.outputs.push(members);
    out.manifest.tolerances.insert("sweep_tol".into(), a.tol);
    out.messages.push(MorseDistanceTable::NOTE.to_string());
    out.fail_if(!table.final_ok, format!("final distances are not below {}", a.tol));
    out.fail_if(
        !table.trend_breaks.is_empty(),
        format!("distances fail to decrease at (row, set) {:?}", table.trend_breaks),
    );
    Ok(out)
}

fn write_distance_csv(path: &Path, table: &MorseDistanceTable) -> Result<()> {
    let header = distance_header(&table.labels);
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    write_csv(
        path,
        &header,
        table.rows.iter().map(|r| {
            std::iter::once(r.eps)
                .chain(r.set_distances.iter().copied())
                .collect()
        }),
    )
}

fn emit<T: Serialize>(a: &GraphArgs, report: &T, out: &mut Outcome) -> Result<()> {
    match &a.out {
        Some(path) => {
            write_json(path, report)?;
            out.primary = Some((path.clone(), false));
            out.outputs = vec![path.clone()];
        }
        None => {
            let text = serde_json::to_string_pretty(report)
                .map_err(|e| CliError::Input(format!("cannot serialize report: {e}")))?;
            println!("{text}");
        }
    }
    Ok(())
}

fn graph(cmd: &GraphCommand) -> Result<Outcome> {
    let (a, which) = match cmd {
        GraphCommand::Check(a) => (a, 0),
        GraphCommand::Reorder(a) => (a, 1),
        GraphCommand::Sweep(a) => (a, 2),
    };
    let loaded = GraphFile::read(&a.input)?.load()?;
    let (g, fam) = (&loaded.graph, &loaded.family);
    let mut out = Outcome::default();
    match which {
        0 => {
            let report = is_dynamically_gradient(g, fam);
            let json = CheckJson::new(g, fam, &report);
            emit(a, &json, &mut out)?;
            if let Some(w) = &json.homoclinic {
                out.messages.push(format!("homoclinic cycle {:?} via {:?}", w.sets, w.walks));
            }
            out.fail_if(!report.holds(), "family is not dynamically gradient".into());
        }
        1 => match reorder_morse(g, fam)? {
            ReorderOutcome::Ordered { family, .. } => {
                let check = check_morse_order(g, &family);
                emit(a, &ReorderJson::ordered(g, &family, &check), &mut out)?;
                out.fail_if(!check.holds(), "reordered family fails the Morse checks".into());
            }
            ReorderOutcome::Failed(f) => {
                emit(a, &ReorderJson::failed(fam, &f), &mut out)?;
                out.fail_if(true, f.reason.clone());
            }
        },
        _ => {
            let report = robustness_sweep(g, fam, &loaded.neighbors, &loaded.perturbed)?;
            emit(a, &SweepJson::new(g, fam, &report), &mut out)?;
            out.messages.push(format!("eta0 = {}", report.eta0));
            out.fail_if(
                report.first_failure.is_some(),
                format!("not dynamically gradient at eta = {:?}", report.first_failure),
            );
        }
    }
    if out.exit_code == EXIT_OK {
        out.messages.push("pass".into());
    }
    Ok(out)
}
