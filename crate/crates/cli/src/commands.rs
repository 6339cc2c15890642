//! The four subcommands.

use std::fmt;
use std::fmt::Write as _;
use std::path::PathBuf;

use squeezamp::engine::{compose_protocol, predicted_max_phonons};
use squeezamp::metrology::{
    msp_nbar, nbar_single, qfi_closed, sweep as run_sweep, ProtocolKind, QfiKind, SweepAxis, SweepGrid,
};
use squeezamp::oracle::{
    evolve_exact, evolve_trotter, fidelity, plus_population, qfi_pure, simulate_protocol, spin_down_population,
    trajectory_max_phonon, OracleConfig, SpinFockState,
};
use squeezamp::parallel::{with_thread_cap, Execution};
use squeezamp::protocol::{ProtocolSpec, SegmentSpec};
use squeezamp::validation::{run_all, trotter_errors, ValidationOptions};
use squeezamp::Error;

use crate::config::{ConfigError, Format, ProtocolChoice, RunConfig};
use crate::output::{emit, fmt9, join_row};
use crate::CommonArgs;

pub const THREADS_ENV: &str = "SQUEEZAMP_THREADS";

#[derive(Debug, Clone, PartialEq)]
pub enum Failure {
    Validation(String),
    Config(String),
    Truncation(String),
    Mismatch(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 1,
            Failure::Config(_) => 2,
            Failure::Truncation(_) => 3,
            Failure::Mismatch(_) => 4,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Validation(m) => write!(f, "validation failed: {m}"),
            Failure::Config(m) | Failure::Truncation(m) | Failure::Mismatch(m) => f.write_str(m),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Truncation { .. } => Failure::Truncation(e.to_string()),
            Error::Mismatch { .. } => Failure::Mismatch(e.to_string()),
            other => Failure::Config(other.to_string()),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn load(args: &CommonArgs) -> Result<RunConfig, Failure> {
    let mut cfg = match &args.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(d) = args.dim {
        cfg.dim = d;
    }
    if let Some(n) = args.trotter {
        cfg.trotter_steps = n;
    }
    if let Some(f) = args.format {
        cfg.format = f;
    }
    if let Some(o) = &args.out {
        cfg.output_path = Some(o.clone());
    }
    Ok(cfg)
}

fn write_out(text: &str, path: Option<&PathBuf>) -> CmdResult {
    emit(text, path.map(|p| p.as_path()))
        .map_err(|e| Failure::Config(format!("cannot write output: {e}")))
}

fn oracle_config(dim: usize, protocol: &ProtocolSpec) -> Result<OracleConfig, Failure> {
    if dim == 0 {
        Ok(OracleConfig::for_protocol(protocol))
    } else {
        Ok(OracleConfig::new(dim)?)
    }
}

/// Closed-form peak phonon number where the protocol has one.
fn closed_form_peak(cfg: &RunConfig, p: &ProtocolSpec) -> Option<f64> {
    let first = p.segments.first()?;
    match cfg.protocol {
        ProtocolChoice::Single if p.segments.len() == 2 => {
            nbar_single(first.eta, first.alpha, first.g, p.total_t).ok()
        }
        ProtocolChoice::Msp => msp_nbar(first.eta, first.alpha, first.g, p.total_t).ok(),
        _ => None,
    }
}

fn trotter_state(p: &ProtocolSpec, steps: usize, oc: &OracleConfig) -> Result<SpinFockState, Error> {
    p.segments.iter().try_fold(SpinFockState::plus_vacuum(oc.dim)?, |s, seg: &SegmentSpec| {
        evolve_trotter(&s, seg, steps, oc)
    })
}

pub fn simulate(args: &CommonArgs) -> CmdResult {
    let cfg = load(args)?;
    let protocol = cfg.protocol_spec()?;
    let oc = oracle_config(cfg.dim, &protocol)?;
    let engine = compose_protocol(&protocol);
    let oracle = simulate_protocol(&protocol, &oc)?;
    let predicted = SpinFockState::from_engine(&engine, oc.dim)?;
    let infidelity = 1.0 - fidelity(&predicted, &oracle);
    let peak = trajectory_max_phonon(&protocol, 16, &oc)?;

    let mut rows: Vec<(&str, String)> = vec![
        ("protocol", protocol.name.clone()),
        ("segments", protocol.segments.len().to_string()),
        ("total_T", fmt9(protocol.total_t)),
        ("dim", oc.dim.to_string()),
        ("signal_phase", fmt9(engine.signal_phase)),
        ("residual_entanglement", fmt9(engine.residual_entanglement)),
        ("p_down_engine", fmt9(engine.ideal_population())),
        ("p_down_oracle", fmt9(spin_down_population(&oracle))),
        ("p_plus_oracle", fmt9(plus_population(&oracle))),
        ("fidelity", fmt9(1.0 - infidelity)),
        ("infidelity", fmt9(infidelity)),
        ("leakage", fmt9(oracle.leakage())),
        ("peak_phonons_oracle", fmt9(peak.mean_phonon)),
        ("peak_time_oracle", fmt9(peak.time)),
        ("peak_phonons_engine", fmt9(predicted_max_phonons(&protocol, 16))),
    ];
    if let Some(n) = closed_form_peak(&cfg, &protocol) {
        rows.push(("peak_phonons_closed_form", fmt9(n)));
    }
    if cfg.trotter_steps > 0 {
        let t = trotter_state(&protocol, cfg.trotter_steps, &oc)?;
        rows.push(("trotter_steps_per_segment", cfg.trotter_steps.to_string()));
        rows.push(("trotter_infidelity", fmt9(1.0 - fidelity(&t, &oracle))));
    }
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut text = String::new();
    for (k, v) in &rows {
        let _ = writeln!(text, "{k:<width$}  {v}");
    }
    write_out(&text, cfg.output_path.as_ref())?;

    if infidelity > oc.fidelity_tol {
        return Err(Error::Mismatch {
            fidelity: 1.0 - infidelity,
            tolerance: oc.fidelity_tol,
        }
        .into());
    }
    Ok(())
}

pub const SWEEP_HEADER: [&str; 13] = [
    "protocol",
    "alpha",
    "eta",
    "g",
    "T",
    "delta_eta",
    "delta_beta",
    "n_bar",
    "sql",
    "hl",
    "gain_db",
    "k",
    "flags",
];

fn thread_cap() -> Result<Option<usize>, Failure> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Failure::Config(format!("{THREADS_ENV} must be a positive integer, got '{v}'"))),
        },
    }
}

fn sweep_grid(cfg: &RunConfig) -> Result<SweepGrid, Failure> {
    let protocol = match cfg.protocol {
        ProtocolChoice::Single => ProtocolKind::Single,
        ProtocolChoice::Msp => ProtocolKind::Msp,
        ProtocolChoice::Custom => return Err(Failure::Config("sweep supports protocol = single or msp".into())),
    };
    let g_list = cfg
        .g_list
        .clone()
        .ok_or_else(|| Failure::Config("sweep needs g_list".into()))?;
    if g_list.is_empty() {
        return Err(Failure::Config("g_list is empty".into()));
    }
    let axis = match (&cfg.t_list, &cfg.nbar_list) {
        (Some(t), None) => SweepAxis::Time(t.clone()),
        (None, Some(n)) => SweepAxis::PhononBudget(n.clone()),
        _ => return Err(Failure::Config("sweep needs exactly one of T_list and nbar_list".into())),
    };
    let empty = match &axis {
        SweepAxis::Time(v) | SweepAxis::PhononBudget(v) => v.is_empty(),
    };
    if empty {
        return Err(Failure::Config("T_list / nbar_list is empty".into()));
    }
    Ok(SweepGrid {
        protocol,
        alpha: cfg.alpha(),
        eta: cfg.eta(),
        g_list,
        axis,
    })
}

pub fn sweep_table(grid: &SweepGrid, format: Format, threads: Option<usize>) -> Result<String, Failure> {
    let rows = with_thread_cap(threads, || run_sweep(grid, Execution::default()))?;
    let mut text = join_row(&SWEEP_HEADER.map(String::from), format);
    text.push('\n');
    for r in &rows {
        let cells = vec![
            r.protocol.to_string(),
            fmt9(r.alpha),
            fmt9(r.eta),
            fmt9(r.g),
            fmt9(r.t),
            fmt9(r.delta_eta),
            fmt9(r.delta_beta),
            fmt9(r.n_bar),
            fmt9(r.sql),
            fmt9(r.hl),
            fmt9(r.gain_db),
            fmt9(r.k),
            r.flags_label(),
        ];
        text.push_str(&join_row(&cells, format));
        text.push('\n');
    }
    Ok(text)
}

pub fn sweep(args: &CommonArgs) -> CmdResult {
    let cfg = load(args)?;
    let grid = sweep_grid(&cfg)?;
    let text = sweep_table(&grid, cfg.format, thread_cap()?)?;
    write_out(&text, cfg.output_path.as_ref())
}

pub fn validate(args: &CommonArgs) -> CmdResult {
    let cfg = load(args)?;
    let report = run_all(&ValidationOptions::default());
    let mut text = String::new();
    for o in &report.outcomes {
        let _ = writeln!(text, "{o}");
    }
    if let Some(n) = args.trotter.filter(|&n| n > 0) {
        let steps = [n, 2 * n, 4 * n];
        match trotter_errors(&steps) {
            Ok(e) => {
                let orders: Vec<String> = e.windows(2).map(|w| fmt9((w[0] / w[1]).log2())).collect();
                let _ = writeln!(
                    text,
                    "info: Trotter steps {n}/{}/{} on the first P1 segment: errors {} {} {}, observed orders {}",
                    2 * n,
                    4 * n,
                    fmt9(e[0]),
                    fmt9(e[1]),
                    fmt9(e[2]),
                    orders.join(" ")
                );
            }
            Err(e) => {
                let _ = writeln!(text, "info: Trotter comparison with {n} steps failed: {e}");
            }
        }
    }
    let _ = writeln!(text, "{}", report.summary());
    write_out(&text, cfg.output_path.as_ref())?;
    if report.all_passed() {
        Ok(())
    } else {
        Err(Failure::Validation(report.summary()))
    }
}

pub fn qfi(args: &CommonArgs) -> CmdResult {
    let cfg = load(args)?;
    let fock_dim = if cfg.dim == 0 { 64 } else { cfg.dim };
    let sq_dim = if cfg.dim == 0 { 160 } else { cfg.dim };
    let header = ["state", "param", "dim", "closed", "oracle", "abs_diff"].map(String::from);
    let mut text = join_row(&header, cfg.format);
    text.push('\n');
    let mut push = |state: &str, param: f64, dim: usize, closed: f64, oracle: f64| {
        let cells = vec![
            state.to_string(),
            fmt9(param),
            dim.to_string(),
            fmt9(closed),
            fmt9(oracle),
            fmt9((closed - oracle).abs()),
        ];
        text.push_str(&join_row(&cells, cfg.format));
        text.push('\n');
    };
    for n in 0..=10u32 {
        if n as usize >= fock_dim {
            break;
        }
        let s = SpinFockState::plus_fock(fock_dim, n as usize)?;
        push("fock", f64::from(n), fock_dim, qfi_closed(QfiKind::Fock(n))?, qfi_pure(&s));
    }
    let oc = OracleConfig::new(sq_dim)?;
    for r in [0.5, 1.0] {
        // pd = −1 for time r gives S(r), anti-squeezed along the generator
        let seg = SegmentSpec::new(0.0, 0, 0.0, -1, 1.0, r);
        let s = evolve_exact(&SpinFockState::plus_vacuum(sq_dim)?, &seg, &oc)?;
        push("squeezed", r, sq_dim, qfi_closed(QfiKind::Squeezed(r))?, qfi_pure(&s));
    }
    write_out(&text, cfg.output_path.as_ref())
}
