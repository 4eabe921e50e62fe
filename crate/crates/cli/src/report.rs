//! Plain-text and CSV output.

use std::io::Write;

use chaindist::bench::{SimulationConfig, SimulationResult};
use chaindist::bench::simulation::sample_cohort;
use chaindist::SquareMatrix;

use crate::error::{CliError, Result};

pub const RESULTS_HEADER: &str = "t,metric,mean_ari,std_ari,reps";

/// Shortest decimal form that parses back to the same `f64`.
pub fn number(x: f64) -> String {
    format!("{x}")
}

fn sorted_cells(result: &SimulationResult) -> Vec<&chaindist::bench::SimulationCell> {
    let mut cells: Vec<_> = result.cells.iter().collect();
    cells.sort_by(|a, b| a.t.total_cmp(&b.t).then_with(|| a.metric.tag().cmp(b.metric.tag())));
    cells
}

pub fn results_csv(result: &SimulationResult) -> String {
    let mut out = String::from(RESULTS_HEADER);
    out.push('\n');
    for c in sorted_cells(result) {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            number(c.t),
            c.metric.tag(),
            number(c.mean_ari),
            number(c.std_ari),
            c.reps
        ));
    }
    out
}

/// Side-by-side mean of the standard index and the trace-form diagnostic.
pub fn diagnostics_csv(result: &SimulationResult) -> String {
    let mut out = String::from("t,metric,mean_ari,mean_trace_form\n");
    for c in sorted_cells(result) {
        out.push_str(&format!(
            "{},{},{},{}\n",
            number(c.t),
            c.metric.tag(),
            number(c.mean_ari),
            number(c.mean_trace_form)
        ));
    }
    out
}

/// Every sampled Dirichlet row, one line each, for external plotting.
pub fn write_samples<W: Write>(config: &SimulationConfig, out: W) -> Result<()> {
    let io = |e: std::io::Error| CliError::Io(e.to_string());
    let mut out = std::io::BufWriter::new(out);
    let coords: Vec<String> = (0..config.state_count).map(|j| format!("x{j}")).collect();
    writeln!(out, "t,rep,cluster,member,row,{}", coords.join(",")).map_err(io)?;
    for step in 0..=config.steps {
        for rep in 0..config.repetitions {
            let (matrices, labels) = sample_cohort(config, step, rep)?;
            for (idx, (m, k)) in matrices.iter().zip(&labels).enumerate() {
                let member = idx % config.cluster_size;
                for row in 0..m.dim() {
                    let values: Vec<String> = m.row(row).iter().map(|&v| number(v)).collect();
                    writeln!(
                        out,
                        "{},{rep},{k},{member},{row},{}",
                        number(config.t(step)),
                        values.join(",")
                    )
                    .map_err(io)?;
                }
            }
        }
    }
    out.flush().map_err(io)
}
