//! Result files. Data files carry only result-relevant config, so two runs of
//! the same config produce identical bytes; `meta.json` holds the rest.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Value};
use walklab_core::stats::{MetricSummary, RunSummary};

use crate::config::{ExperimentConfig, OutputFormat, Preset};
use crate::error::CliError;
use crate::experiment::ExperimentOutput;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
/// Half-width, in standard errors, of the intervals in `aggregate.csv`.
pub const CI_Z: f64 = 3.0;

pub const REPLICAS_HEADER: &str =
    "replica,epsilon,n,final_x,final_y,fresh_visits,gap_final,tan_count,envelope_max_ratio,progress_min";
pub const AGGREGATE_HEADER: &str = "metric,count,mean,stderr,ci_low,ci_high,min,max";
pub const FIT_HEADER: &str = "metric,slope,intercept,r_squared,points";
pub const LEMMA_B_HEADER: &str = "n,n_epsilon,epsilon,k,exact_tail,bound,holds";

pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn preamble(config: &ExperimentConfig) -> String {
    let keys: Vec<String> = config
        .result_keys()
        .into_iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect();
    format!("# walklab {VERSION}\n# config: {}\n", keys.join(" "))
}

fn replica_line(r: &RunSummary) -> String {
    [
        r.replica_index.to_string(),
        r.epsilon.to_string(),
        r.n.to_string(),
        r.final_x.to_string(),
        r.final_y.to_string(),
        opt(r.fresh_visit_count),
        opt(r.gap_final),
        opt(r.tan_count_total),
        r.max_envelope_ratio.map(fmt_f64).unwrap_or_default(),
        opt(r.windowed_progress_min),
    ]
    .join(",")
}

fn aggregate_line(name: &str, m: &MetricSummary) -> String {
    let (lo, hi) = m.ci(CI_Z);
    format!(
        "{name},{},{},{},{},{},{},{}",
        m.count,
        fmt_f64(m.mean),
        fmt_f64(m.stderr()),
        fmt_f64(lo),
        fmt_f64(hi),
        fmt_f64(m.min),
        fmt_f64(m.max)
    )
}

pub fn replicas_csv(config: &ExperimentConfig, out: &ExperimentOutput) -> String {
    let mut s = preamble(config);
    s.push_str(REPLICAS_HEADER);
    s.push('\n');
    for r in &out.replicas {
        s.push_str(&replica_line(r));
        s.push('\n');
    }
    s
}

pub fn aggregate_csv(config: &ExperimentConfig, out: &ExperimentOutput) -> String {
    let mut s = preamble(config);
    s.push_str(AGGREGATE_HEADER);
    s.push('\n');
    for (name, m) in &out.aggregate.metrics {
        s.push_str(&aggregate_line(name, m));
        s.push('\n');
    }
    s
}

pub fn fit_csv(config: &ExperimentConfig, out: &ExperimentOutput) -> String {
    let mut s = preamble(config);
    s.push_str(FIT_HEADER);
    s.push('\n');
    for f in &out.fits {
        let points: Vec<String> = f
            .points
            .iter()
            .map(|(n, v)| format!("{n}:{}", fmt_f64(*v)))
            .collect();
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            f.metric,
            fmt_f64(f.fit.slope),
            fmt_f64(f.fit.intercept),
            fmt_f64(f.fit.r_squared),
            points.join(";")
        );
    }
    s
}

pub fn lemma_b_csv(config: &ExperimentConfig, out: &ExperimentOutput) -> String {
    let mut s = preamble(config);
    s.push_str(LEMMA_B_HEADER);
    s.push('\n');
    for r in &out.lemma_b {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.n,
            fmt_f64(r.n_epsilon),
            fmt_f64(r.epsilon),
            r.k,
            fmt_f64(r.exact_tail),
            fmt_f64(r.bound),
            r.holds
        );
    }
    s
}

fn summary_json(m: &MetricSummary) -> Value {
    let (lo, hi) = m.ci(CI_Z);
    json!({
        "count": m.count,
        "mean": m.mean,
        "stderr": m.stderr(),
        "ci_low": lo,
        "ci_high": hi,
        "min": m.min,
        "max": m.max,
        "median": m.sketch.quantile(0.5),
    })
}

pub fn results_json(config: &ExperimentConfig, out: &ExperimentOutput) -> Value {
    let cfg: serde_json::Map<String, Value> = config
        .result_keys()
        .into_iter()
        .map(|(k, v)| (k.to_string(), Value::String(v)))
        .collect();
    let aggregate: serde_json::Map<String, Value> = out
        .aggregate
        .metrics
        .iter()
        .map(|(k, m)| (k.clone(), summary_json(m)))
        .collect();
    let fit: serde_json::Map<String, Value> = out
        .fits
        .iter()
        .map(|f| {
            let v = json!({
                "slope": f.fit.slope,
                "intercept": f.fit.intercept,
                "r_squared": f.fit.r_squared,
                "points": f.points,
            });
            (f.metric.clone(), v)
        })
        .collect();
    let mut v = json!({
        "version": VERSION,
        "config": cfg,
        "replicas": out.replicas,
        "aggregate": aggregate,
        "fit": fit,
    });
    if config.preset == Preset::LemmaB {
        v["lemma_b"] = json!(out.lemma_b);
    }
    v
}

pub fn meta_json(config: &ExperimentConfig) -> Value {
    let ts = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    json!({
        "version": VERSION,
        "unix_time": ts,
        "config": config,
    })
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

/// Writes every result file into `config.out`, returning the paths written.
pub fn write_outputs(config: &ExperimentConfig, out: &ExperimentOutput) -> Result<Vec<PathBuf>, CliError> {
    let dir = &config.out;
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut written = Vec::new();
    match config.format {
        OutputFormat::Csv => {
            written.push(write(dir, "replicas.csv", &replicas_csv(config, out))?);
            written.push(write(dir, "aggregate.csv", &aggregate_csv(config, out))?);
            written.push(write(dir, "fit.csv", &fit_csv(config, out))?);
            if config.preset == Preset::LemmaB {
                written.push(write(dir, "lemma_b.csv", &lemma_b_csv(config, out))?);
            }
        }
        OutputFormat::Json => {
            let text = serde_json::to_string_pretty(&results_json(config, out)).expect("results serialize");
            written.push(write(dir, "results.json", &(text + "\n"))?);
        }
    }
    let meta = serde_json::to_string_pretty(&meta_json(config)).expect("meta serializes");
    written.push(write(dir, "meta.json", &(meta + "\n"))?);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format() {
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
        assert_eq!(fmt_f64(f64::NAN), "nan");
    }

    #[test]
    fn aggregate_row_layout() {
        let m = MetricSummary::from_values([1.0, 3.0]);
        let line = aggregate_line("x|eps=0|n=2", &m);
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), AGGREGATE_HEADER.split(',').count());
        assert_eq!(fields[1], "2");
        assert_eq!(fields[2], fmt_f64(2.0));
    }

    #[test]
    fn replica_row_has_empty_unmeasured_fields() {
        let r = RunSummary::new("0.1".parse().unwrap(), 10, 3, 4, -2);
        assert_eq!(replica_line(&r), "3,0.1,10,4,-2,,,,,");
    }
}
