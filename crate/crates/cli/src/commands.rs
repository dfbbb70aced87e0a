use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};

use bb84_core::analysis::{
    critical_noise_no_attack, lost_info_curve, phase_boundary_2d, phase_surface_3d, qber_curve,
};
use bb84_core::montecarlo::{compare_to_closed_form, run};
use bb84_core::verify::{crosscheck_table, run_crosschecks};
use bb84_core::{assess, AnalysisError, SimError, SweepTable, TableError};

use crate::args::{Command, CommandSpec, Output};

#[derive(Debug)]
pub enum RunError {
    Analysis(AnalysisError),
    Sim(SimError),
    Table(TableError),
    Io(io::Error),
    ThreadPool(String),
    /// The table was written but reports failing checks.
    ChecksFailed(usize),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Analysis(e) => write!(f, "{e}"),
            RunError::Sim(e) => write!(f, "{e}"),
            RunError::Table(e) => write!(f, "{e}"),
            RunError::Io(e) => write!(f, "{e}"),
            RunError::ThreadPool(e) => write!(f, "thread pool: {e}"),
            RunError::ChecksFailed(n) => write!(f, "{n} cross-check(s) exceeded tolerance"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<AnalysisError> for RunError {
    fn from(e: AnalysisError) -> Self {
        RunError::Analysis(e)
    }
}

impl From<SimError> for RunError {
    fn from(e: SimError) -> Self {
        RunError::Sim(e)
    }
}

impl From<TableError> for RunError {
    fn from(e: TableError) -> Self {
        RunError::Table(e)
    }
}

impl From<io::Error> for RunError {
    fn from(e: io::Error) -> Self {
        RunError::Io(e)
    }
}

pub const ASSESS_COLUMNS: [&str; 6] = ["i_ab", "i_ae_max", "h_delta", "i_lost", "p_err", "secured"];
pub const SIMULATE_COLUMNS: [&str; 4] = ["party", "agreement_hat", "stderr", "z_score"];

fn flag(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

/// Computes the table a command emits.
pub fn render(command: &Command) -> Result<SweepTable, RunError> {
    let table = match command {
        Command::Assess { channel, chain } => {
            let a = assess(*channel, chain);
            let mut t = SweepTable::new(ASSESS_COLUMNS);
            t.push_row(vec![
                a.i_ab.into(),
                a.i_ae_max.into(),
                a.h_delta.into(),
                a.i_lost.into(),
                a.added_error.into(),
                flag(a.secured).into(),
            ])?;
            t
        }
        Command::QberCurve {
            p_grid,
            n_eves,
            q_rule,
        } => qber_curve(p_grid, *n_eves, q_rule)?,
        Command::LostInfo {
            p_grid,
            omega,
            q1_values,
        } => lost_info_curve(p_grid, *omega, q1_values)?,
        Command::Phase2d {
            p_grid,
            n_eves,
            q_rule,
        } => phase_boundary_2d(p_grid, *n_eves, q_rule)?,
        Command::Phase3d { omega_grid, p, qs } => phase_surface_3d(omega_grid, omega_grid, *p, qs)?,
        Command::Simulate {
            config,
            channel,
            chain,
            threads,
        } => {
            let simulate = || run(*config, *channel, chain);
            let estimate = match threads {
                Some(n) => rayon::ThreadPoolBuilder::new()
                    .num_threads(*n)
                    .build()
                    .map_err(|e| RunError::ThreadPool(e.to_string()))?
                    .install(simulate)?,
                None => simulate()?,
            };
            let report = compare_to_closed_form(&estimate, *channel, chain)?;
            let mut t = SweepTable::new(SIMULATE_COLUMNS);
            for z in report.all() {
                t.push_row(vec![
                    z.party.to_string().as_str().into(),
                    z.estimate.value.into(),
                    z.estimate.stderr.into(),
                    z.z.into(),
                ])?;
            }
            t
        }
        Command::Verify {
            n_eves,
            trials,
            seed,
        } => crosscheck_table(&run_crosschecks(*n_eves, *trials, *seed))?,
        Command::CriticalP => {
            let mut t = SweepTable::new(["p_critical"]);
            t.push_row(vec![critical_noise_no_attack().into()])?;
            t
        }
    };
    Ok(table)
}

fn failed_checks(table: &SweepTable) -> usize {
    table
        .column("passed")
        .map(|cells| {
            cells
                .into_iter()
                .filter(|c| c.as_text() == Some("false"))
                .count()
        })
        .unwrap_or(0)
}

/// Renders the command and writes its CSV to the chosen destination.
pub fn run_command(spec: &CommandSpec) -> Result<(), RunError> {
    let table = render(&spec.command)?;
    match &spec.output {
        Output::Stdout => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            table.write_csv(&mut lock)?;
            lock.flush()?;
        }
        Output::File(path) => {
            let mut file = BufWriter::new(File::create(path)?);
            table.write_csv(&mut file)?;
            file.flush()?;
        }
    }
    if matches!(spec.command, Command::Verify { .. }) {
        let failed = failed_checks(&table);
        if failed > 0 {
            return Err(RunError::ChecksFailed(failed));
        }
    }
    Ok(())
}
