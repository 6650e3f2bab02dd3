//! Experiment harness: configuration, sweeps, summaries and CSV output.

pub mod config;
mod summary;
mod sweep;

use std::io::Write;

pub use summary::{summarize, SummaryError, SummaryRow};
pub use sweep::{linspace, run_single, run_sweep, Execution, SampleRow, SweepError};

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

/// `algorithm,variability,seed,time_s,value,true_count`
pub fn write_samples<W: Write>(out: W, rows: &[SampleRow]) -> csv::Result<()> {
    let mut w = writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    if rows.is_empty() {
        w.write_record(["algorithm", "variability", "seed", "time_s", "value", "true_count"])?;
    }
    w.flush()?;
    Ok(())
}

/// `algorithm,variability,mean_value,mean_abs_rel_error,window_start,window_end`
pub fn write_summary<W: Write>(out: W, rows: &[SummaryRow]) -> csv::Result<()> {
    let mut w = writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
