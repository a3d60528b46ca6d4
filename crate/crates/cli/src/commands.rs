use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use optomech::model::{DEFAULT_MAX_ITER, DEFAULT_TOLERANCE};
use optomech::{
    build_full_matrix, build_rwa_matrix, compare_full_vs_rwa, design_drives, effective_params,
    scan_steady_state_branches, solve_steady_state, stability, sweep, sweep_rwa, SteadyState,
};

use crate::config::{Angle, Mode, ModelSpec, RunConfig};
use crate::error::CliError;
use crate::output::{self, num, CsvKind, Written};

/// Samples used when scanning for coexisting steady-state branches.
const BRANCH_SAMPLES: usize = 4001;
/// Round-trip tolerances for `design-drives`.
const DESIGN_G_TOL: f64 = 0.1;
const DESIGN_THETA_TOL: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    SteadyState,
    Stability,
    Sweep,
    Circulator,
    DesignDrives,
    CompareRwa,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::SteadyState,
        Command::Stability,
        Command::Sweep,
        Command::Circulator,
        Command::DesignDrives,
        Command::CompareRwa,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::SteadyState => "steady-state",
            Command::Stability => "stability",
            Command::Sweep => "sweep",
            Command::Circulator => "circulator",
            Command::DesignDrives => "design-drives",
            Command::CompareRwa => "compare-rwa",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| CliError::Validation(format!("unknown command `{s}`")))
    }
}

/// Files written by a run plus the first deferred failure, if any.
///
/// Instability and singular points do not stop a sweep: the CSV is written
/// with its failure marker and the error is reported afterwards.
#[derive(Debug, Default)]
pub struct RunReport {
    pub written: Vec<Written>,
    pub deferred: Option<CliError>,
}

impl RunReport {
    /// Keeps the first failure, except that a singular point outranks
    /// instability since its rows hold no numbers at all.
    pub fn defer(&mut self, e: CliError) {
        match (&self.deferred, &e) {
            (None, _) | (Some(CliError::Instability(_)), CliError::Singular(_)) => self.deferred = Some(e),
            _ => {}
        }
    }

    fn write(&mut self, path: PathBuf, kind: CsvKind, contents: &str) -> Result<(), CliError> {
        output::write_file(&path, contents)?;
        println!("wrote {}", path.display());
        self.written.push(Written { path, kind });
        Ok(())
    }
}

fn solve_physical(config: &RunConfig) -> Result<(optomech::SystemParams, SteadyState), CliError> {
    let p = config.system_params()?;
    let s = solve_steady_state(&p, DEFAULT_TOLERANCE, DEFAULT_MAX_ITER)?;
    Ok((p, s))
}

fn models(config: &RunConfig) -> Result<Vec<ModelSpec>, CliError> {
    match config.mode {
        Mode::Effective => config.effective_models(),
        Mode::Physical => {
            let (params, s) = solve_physical(config)?;
            Ok(vec![ModelSpec {
                label: "physical".into(),
                eff: effective_params(&params, &s),
                params,
            }])
        }
    }
}

fn complex(z: num_complex::Complex64) -> String {
    format!("{} {}", num(z.re), num(z.im))
}

fn print_effective(spec: &ModelSpec) {
    let e = &spec.eff;
    println!("delta_a_eff={}", num(e.delta_a_eff));
    println!("delta_b_eff={}", num(e.delta_b_eff));
    println!("G_a={}", complex(e.coupling_a));
    println!("G_b={}", complex(e.coupling_b));
    println!("theta={}", num(e.theta));
}

fn steady_state(config: &RunConfig) -> Result<(), CliError> {
    match config.mode {
        Mode::Physical => {
            let (p, s) = solve_physical(config)?;
            println!("alpha={}", complex(s.alpha));
            println!("beta={}", complex(s.beta));
            println!("xi={}", complex(s.xi));
            let spec = ModelSpec {
                label: "physical".into(),
                eff: effective_params(&p, &s),
                params: p,
            };
            print_effective(&spec);
            println!("residual={}", num(s.residual));
            println!("iterations={}", s.iterations);
            let scan = scan_steady_state_branches(&p, BRANCH_SAMPLES)?;
            println!("branches={}", scan.sign_changes);
            if scan.is_multistable() {
                log::warn!("{} steady-state branches coexist; reporting the one reached from x = 0", scan.sign_changes);
            }
        }
        Mode::Effective => {
            for spec in config.effective_models()? {
                println!("model={}", spec.label);
                print_effective(&spec);
            }
        }
    }
    Ok(())
}

fn stability_cmd(config: &RunConfig, report: &mut RunReport) -> Result<(), CliError> {
    for spec in models(config)? {
        let r = stability(&build_full_matrix(&spec.eff, &spec.params))?;
        println!("model={} stable={} margin={}", spec.label, r.stable, num(r.margin));
        let eig: Vec<String> = r.eigenvalues.iter().map(|z| complex(*z)).collect();
        println!("eigenvalues={}", eig.join(", "));
        if !r.stable {
            report.defer(optomech::Error::Unstable { margin: r.margin }.into());
        }
    }
    Ok(())
}

fn file_name(prefix: &str, spec: &ModelSpec, mode: Mode) -> String {
    match mode {
        Mode::Physical => format!("{prefix}.csv"),
        Mode::Effective => format!("{prefix}_theta_{}.csv", spec.label),
    }
}

fn note_failures(report: &mut RunReport, label: &str, stable: bool, margin: f64, table: &optomech::SweepTable) {
    if !stable {
        log::warn!("model {label} is unstable (margin {margin:e}); rows carry stable_flag 0");
        report.defer(optomech::Error::Unstable { margin }.into());
    }
    if let Some(e) = table.rows.iter().find_map(|r| r.as_ref().err()) {
        log::warn!("model {label}: {} singular point(s)", table.failures());
        report.defer(e.clone().into());
    }
}

fn sweep_cmd(config: &RunConfig, out: &Path, report: &mut RunReport) -> Result<(), CliError> {
    let grid = config.grid();
    for spec in models(config)? {
        let model = build_full_matrix(&spec.eff, &spec.params);
        let st = stability(&model)?;
        let table = sweep(&model, &grid)?;
        report.write(
            out.join(file_name("sweep", &spec, config.mode)),
            CsvKind::Sweep,
            &output::sweep_csv(&table, st.stable),
        )?;
        note_failures(report, &spec.label, st.stable, st.margin, &table);
    }
    Ok(())
}

fn circulator_cmd(config: &RunConfig, out: &Path, report: &mut RunReport) -> Result<(), CliError> {
    if config.mode != Mode::Effective {
        return Err(CliError::Validation("circulator needs effective mode".into()));
    }
    let grid = config.grid();
    let thetas = ["pi/2", "3pi/2"].map(|t| Angle::parse(t).expect("literal angle"));
    for spec in config.effective_models_for(&thetas) {
        let model = build_full_matrix(&spec.eff, &spec.params);
        let rwa = build_rwa_matrix(&spec.eff, &spec.params);
        let st = stability(&model)?;
        let full = sweep(&model, &grid)?;
        let approx = sweep_rwa(&rwa, &grid)?;
        report.write(
            out.join(file_name("circulator", &spec, Mode::Effective)),
            CsvKind::Circulator,
            &output::circulator_csv(&full, &approx, st.stable),
        )?;
        println!("model={} rwa_regime={}", spec.label, rwa.regime_ok);
        note_failures(report, &spec.label, st.stable, st.margin, &full);
    }
    Ok(())
}

fn design_cmd(config: &RunConfig) -> Result<(), CliError> {
    let p = config.system_params()?;
    let target = config
        .target_coupling()
        .ok_or_else(|| CliError::Validation("design-drives needs parameter `target_G`".into()))?;
    let thetas = if config.theta.is_empty() {
        vec![Angle::parse("pi/2").expect("literal angle")]
    } else {
        config.theta.clone()
    };
    for theta in thetas {
        let d = design_drives(target, theta.radians, &p)?;
        println!("target_theta={} target_G={}", num(theta.radians), num(target));
        println!("eps_a={} eps_b={}", num(d.eps_a), num(d.eps_b));
        println!("phi_a={} phi_b={}", num(d.phi_a), num(d.phi_b));
        let driven = d.apply(&p);
        let s = solve_steady_state(&driven, DEFAULT_TOLERANCE, DEFAULT_MAX_ITER)?;
        let eff = effective_params(&driven, &s);
        let g_err = ((eff.coupling_a.norm() - target).abs()).max((eff.coupling_b.norm() - target).abs())
            / target.max(f64::MIN_POSITIVE);
        let want = optomech::normalize_phase(theta.radians);
        let diff = (eff.theta - want).rem_euclid(std::f64::consts::TAU);
        let theta_err = diff.min(std::f64::consts::TAU - diff);
        println!(
            "round_trip |G_a|={} |G_b|={} theta={} delta_a_eff={} delta_b_eff={}",
            num(eff.coupling_a.norm()),
            num(eff.coupling_b.norm()),
            num(eff.theta),
            num(eff.delta_a_eff),
            num(eff.delta_b_eff)
        );
        println!(
            "round_trip_ok={} relative_G_error={} theta_error={}",
            g_err <= DESIGN_G_TOL && theta_err <= DESIGN_THETA_TOL,
            num(g_err),
            num(theta_err)
        );
    }
    Ok(())
}

fn compare_cmd(config: &RunConfig, out: &Path, report: &mut RunReport) -> Result<(), CliError> {
    let grid = config.grid();
    for spec in models(config)? {
        let dev = compare_full_vs_rwa(&spec.eff, &spec.params, &grid)?;
        report.write(
            out.join(file_name("compare_rwa", &spec, config.mode)),
            CsvKind::Deviation,
            &output::deviation_csv(&dev),
        )?;
        println!(
            "summary model={} max_abs_T_deviation={} worst_omega={} regime_warning={}",
            spec.label,
            num(dev.max_abs_t_deviation),
            num(dev.worst_frequency),
            dev.regime_warning
        );
    }
    Ok(())
}

/// Runs one command, writing any CSVs into `out`.
pub fn run(config: &RunConfig, command: Command, out: &Path) -> Result<RunReport, CliError> {
    let mut report = RunReport::default();
    match command {
        Command::SteadyState => steady_state(config)?,
        Command::Stability => stability_cmd(config, &mut report)?,
        Command::Sweep => sweep_cmd(config, out, &mut report)?,
        Command::Circulator => circulator_cmd(config, out, &mut report)?,
        Command::DesignDrives => design_cmd(config)?,
        Command::CompareRwa => compare_cmd(config, out, &mut report)?,
    }
    Ok(report)
}
