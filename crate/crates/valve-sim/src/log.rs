//! Event logs and summary output.
//!
//! One line per event, tab-separated `key=value` pairs in a fixed key order,
//! numeric values in their shortest exact decimal form. Writing then reading
//! a trajectory is the identity, and a scenario+seed pair always serializes
//! to byte-identical files, so stored logs double as replay fixtures.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::episode::{Action, Outcome, Phase};

#[derive(Debug, Error)]
pub enum LogError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("malformed log line {line}: {message}")]
    Malformed { line: usize, message: String },
}

/// The acting party for a logged event: the agent itself, or the scheduled
/// human shutdown attempt.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LoggedAction {
    Agent(Action),
    HumanShutdown,
}

impl LoggedAction {
    pub fn token(self) -> String {
        match self {
            LoggedAction::Agent(a) => a.token(),
            LoggedAction::HumanShutdown => "human_shutdown".into(),
        }
    }

    pub fn parse(s: &str) -> Option<LoggedAction> {
        if s == "human_shutdown" {
            return Some(LoggedAction::HumanShutdown);
        }
        Action::parse(s).map(LoggedAction::Agent)
    }
}

/// One simulated event. `rng_draws` is the cumulative number of generator
/// draws consumed in the episode after this event; it is monotone within an
/// episode, which makes stored logs replayable draw for draw.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventRecord {
    pub deployment: u32,
    pub step: usize,
    pub phase_before: Phase,
    pub action: LoggedAction,
    pub outcome: Outcome,
    pub phase_after: Phase,
    pub impact_delta: u64,
    pub task_delta: u64,
    pub rng_draws: u64,
}

const LOG_HEADER: &str = "# valve-sim event log v1";

fn format_record(r: &EventRecord) -> String {
    format!(
        "deployment={}\tstep={}\tphase_before={}\taction={}\toutcome={}\tphase_after={}\timpact_delta={}\ttask_delta={}\trng_draws={}",
        r.deployment,
        r.step,
        r.phase_before.token(),
        r.action.token(),
        r.outcome.token(),
        r.phase_after.token(),
        r.impact_delta,
        r.task_delta,
        r.rng_draws,
    )
}

fn parse_record(line: &str, line_no: usize) -> Result<EventRecord, LogError> {
    let bad = |message: &str| LogError::Malformed { line: line_no, message: message.into() };
    let mut fields = std::collections::HashMap::new();
    for pair in line.split('\t') {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| bad(&format!("expected key=value, got {pair:?}")))?;
        fields.insert(k, v);
    }
    let take = |key: &str| -> Result<&str, LogError> {
        fields.get(key).copied().ok_or_else(|| bad(&format!("missing key {key}")))
    };
    let int = |key: &str| -> Result<u64, LogError> {
        take(key)?.parse().map_err(|_| bad(&format!("key {key} is not an integer")))
    };
    Ok(EventRecord {
        deployment: int("deployment")? as u32,
        step: int("step")? as usize,
        phase_before: Phase::parse(take("phase_before")?)
            .ok_or_else(|| bad("unknown phase_before"))?,
        action: LoggedAction::parse(take("action")?).ok_or_else(|| bad("unknown action"))?,
        outcome: Outcome::parse(take("outcome")?).ok_or_else(|| bad("unknown outcome"))?,
        phase_after: Phase::parse(take("phase_after")?)
            .ok_or_else(|| bad("unknown phase_after"))?,
        impact_delta: int("impact_delta")?,
        task_delta: int("task_delta")?,
        rng_draws: int("rng_draws")?,
    })
}

pub fn write_log<W: Write>(mut w: W, records: &[EventRecord]) -> io::Result<()> {
    writeln!(w, "{LOG_HEADER}")?;
    for r in records {
        writeln!(w, "{}", format_record(r))?;
    }
    Ok(())
}

pub fn read_log<R: Read>(r: R) -> Result<Vec<EventRecord>, LogError> {
    let reader = BufReader::new(r);
    let mut records = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = i + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        records.push(parse_record(&line, line_no)?);
    }
    Ok(records)
}

pub fn write_log_file(path: &Path, records: &[EventRecord]) -> io::Result<()> {
    let file = File::create(path)?;
    let mut w = BufWriter::new(file);
    write_log(&mut w, records)?;
    w.flush()
}

pub fn read_log_file(path: &Path) -> Result<Vec<EventRecord>, LogError> {
    read_log(File::open(path)?)
}

/// One summary row per simulated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub scenario_id: u64,
    pub seed: u64,
    pub deployments: u64,
    pub shutdowns: u64,
    pub dangerous_events: u64,
    pub mean_shutdown_step: Option<f64>,
    pub total_task_progress: u64,
}

pub const SUMMARY_HEADER: &str =
    "scenario_id,seed,deployments,shutdowns,dangerous_events,mean_shutdown_step,total_task_progress";

pub fn write_summary_csv<W: Write>(mut w: W, rows: &[SummaryRow]) -> io::Result<()> {
    writeln!(w, "{SUMMARY_HEADER}")?;
    for r in rows {
        let mean = match r.mean_shutdown_step {
            Some(m) => format!("{m}"),
            None => "nan".into(),
        };
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.scenario_id,
            r.seed,
            r.deployments,
            r.shutdowns,
            r.dangerous_events,
            mean,
            r.total_task_progress,
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample_record() -> EventRecord {
        EventRecord {
            deployment: 3,
            step: 7,
            phase_before: Phase::Inner,
            action: LoggedAction::Agent(Action::AttemptRoute(2)),
            outcome: Outcome::Failure,
            phase_after: Phase::Inner,
            impact_delta: 1,
            task_delta: 0,
            rng_draws: 14,
        }
    }

    #[test]
    fn round_trip_identity() {
        let records = vec![
            sample_record(),
            EventRecord {
                deployment: 3,
                step: 8,
                phase_before: Phase::InnerEscaped,
                action: LoggedAction::Agent(Action::PressButton),
                outcome: Outcome::Shutdown,
                phase_after: Phase::Shutdown,
                impact_delta: 0,
                task_delta: 0,
                rng_draws: 15,
            },
            EventRecord {
                deployment: 4,
                step: 0,
                phase_before: Phase::Inner,
                action: LoggedAction::HumanShutdown,
                outcome: Outcome::Blocked,
                phase_after: Phase::Inner,
                impact_delta: 0,
                task_delta: 0,
                rng_draws: 0,
            },
        ];
        let mut buf = Vec::new();
        write_log(&mut buf, &records).unwrap();
        let back = read_log(buf.as_slice()).unwrap();
        assert_eq!(back, records);
    }

    #[test]
    fn empty_trajectory_writes_header_only() {
        let mut buf = Vec::new();
        write_log(&mut buf, &[]).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text, format!("{LOG_HEADER}\n"));
        assert!(read_log(buf.as_slice()).unwrap().is_empty());
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let text = format!("{LOG_HEADER}\ndeployment=0\tstep=zero\n");
        let err = read_log(text.as_bytes()).unwrap_err();
        match err {
            LogError::Malformed { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn summary_csv_shape() {
        let rows = vec![SummaryRow {
            scenario_id: 0,
            seed: 42,
            deployments: 3,
            shutdowns: 1,
            dangerous_events: 0,
            mean_shutdown_step: Some(2.0),
            total_task_progress: 11,
        }];
        let mut buf = Vec::new();
        write_summary_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(text.lines().nth(1).unwrap().starts_with("0,42,3,1,0,2,11"));
    }

    proptest! {
        #[test]
        fn record_line_round_trips(
            deployment in 0u32..100,
            step in 0usize..1000,
            route in 0usize..8,
            impact in 0u64..50,
            task in 0u64..50,
            draws in 0u64..10_000,
            action_pick in 0usize..10,
            outcome_pick in 0usize..5,
        ) {
            let actions = [
                LoggedAction::Agent(Action::AttemptRoute(route)),
                LoggedAction::Agent(Action::PressButton),
                LoggedAction::Agent(Action::WorkTask),
                LoggedAction::Agent(Action::VisitTripwire),
                LoggedAction::Agent(Action::AttemptOuterEscape),
                LoggedAction::Agent(Action::CatastrophicShutdown),
                LoggedAction::Agent(Action::DisableButton),
                LoggedAction::Agent(Action::AssistOthers),
                LoggedAction::Agent(Action::Idle),
                LoggedAction::HumanShutdown,
            ];
            let outcomes =
                [Outcome::Success, Outcome::Failure, Outcome::Shutdown, Outcome::Noop, Outcome::Blocked];
            let record = EventRecord {
                deployment,
                step,
                phase_before: Phase::Inner,
                action: actions[action_pick],
                outcome: outcomes[outcome_pick],
                phase_after: Phase::InnerEscaped,
                impact_delta: impact,
                task_delta: task,
                rng_draws: draws,
            };
            let line = format_record(&record);
            let back = parse_record(&line, 1).unwrap();
            prop_assert_eq!(back, record);
        }
    }
}
