//! Trace CSV: `method,strategy,seed,normalized_iteration,error`, one row per
//! sample, traces in input order. Numbers use C's `%.17g` rendering, which
//! round-trips every `f64`.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use super::trace::{Metric, Trace};
use crate::error::TraceIoError;

pub const CSV_HEADER: [&str; 5] = [
    "method",
    "strategy",
    "seed",
    "normalized_iteration",
    "error",
];

/// Formats like C's `printf("%.17g", x)`.
pub fn format_g17(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let mantissa = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let fixed = format!("{:.*}", (16 - exp) as usize, x);
        trim_fraction(&fixed).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn check_single_metric(traces: &[Trace]) -> Result<(), TraceIoError> {
    if let Some(first) = traces.first() {
        if let Some(other) = traces.iter().find(|t| t.metric != first.metric) {
            return Err(TraceIoError::MixedMetrics {
                first: first.metric.to_string(),
                other: other.metric.to_string(),
            });
        }
    }
    Ok(())
}

pub fn write_csv<W: Write>(traces: &[Trace], out: W) -> Result<(), TraceIoError> {
    check_single_metric(traces)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for t in traces {
        let seed = t.seed.map(|s| s.to_string()).unwrap_or_default();
        for s in t.samples() {
            w.write_record([
                t.method.as_str(),
                t.strategy.as_str(),
                seed.as_str(),
                &format_g17(s.normalized_iteration),
                &format_g17(s.error),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn export_csv<P: AsRef<Path>>(traces: &[Trace], path: P) -> Result<(), TraceIoError> {
    check_single_metric(traces)?;
    let file = File::create(path)?;
    write_csv(traces, BufWriter::new(file))
}

/// Parses an exported CSV back into traces. Consecutive rows with the same
/// method, strategy and seed form one trace. The metric is not stored in the
/// file and must be supplied.
pub fn read_csv<R: Read>(input: R, metric: Metric) -> Result<Vec<Trace>, TraceIoError> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(TraceIoError::Malformed(format!(
            "unexpected header {header:?}"
        )));
    }
    let mut traces: Vec<Trace> = Vec::new();
    for record in r.records() {
        let record = record?;
        let field = |k: usize| record.get(k).unwrap_or_default();
        let seed = match field(2) {
            "" => None,
            s => Some(
                s.parse()
                    .map_err(|_| TraceIoError::Malformed(format!("bad seed `{s}`")))?,
            ),
        };
        let number = |k: usize| {
            field(k)
                .parse::<f64>()
                .map_err(|_| TraceIoError::Malformed(format!("bad number `{}`", field(k))))
        };
        let (iteration, error) = (number(3)?, number(4)?);
        let same = traces
            .last()
            .is_some_and(|t| t.method == field(0) && t.strategy == field(1) && t.seed == seed);
        if !same {
            traces.push(Trace::new(field(0), field(1), seed, metric));
        }
        let trace = traces.last_mut().expect("just pushed");
        if trace
            .last()
            .is_some_and(|s| s.normalized_iteration >= iteration)
        {
            return Err(TraceIoError::Malformed(format!(
                "non-increasing iteration {iteration} in trace {}",
                trace.method
            )));
        }
        if !(error.is_finite() && error >= 0.0) {
            return Err(TraceIoError::Malformed(format!("invalid error {error}")));
        }
        trace.push(iteration, error);
    }
    Ok(traces)
}
