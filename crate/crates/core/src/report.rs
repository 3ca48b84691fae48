//! Writes a [`ReportBundle`] to disk as `summary.json`, `trials.csv` and one
//! `cdf_<algo>.csv` per algorithm. Output depends only on the bundle.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::Result;
use crate::experiment::ReportBundle;

#[derive(Serialize)]
struct Summary<'a> {
    network: &'a str,
    algorithms: Vec<&'static str>,
    dag_count: usize,
    mean_makespan_s: BTreeMap<&'static str, f64>,
    /// keyed `a_vs_b`: `(mean_b - mean_a) / mean_b`
    reduction: BTreeMap<String, f64>,
    runtime_total_s: BTreeMap<&'static str, f64>,
}

pub fn summary_json(bundle: &ReportBundle) -> Result<String> {
    let mut dags: Vec<usize> = bundle.trials.iter().map(|t| t.dag_id).collect();
    dags.dedup();
    let summary = Summary {
        network: &bundle.network,
        algorithms: bundle.algorithms.iter().map(|a| a.name()).collect(),
        dag_count: dags.len(),
        mean_makespan_s: bundle
            .mean_makespan
            .iter()
            .map(|(a, m)| (a.name(), *m))
            .collect(),
        reduction: bundle
            .reduction
            .iter()
            .map(|((a, b), r)| (format!("{a}_vs_{b}"), *r))
            .collect(),
        runtime_total_s: bundle
            .runtime_total_s
            .iter()
            .map(|(a, t)| (a.name(), *t))
            .collect(),
    };
    Ok(serde_json::to_string_pretty(&summary)? + "\n")
}

pub fn trials_csv(bundle: &ReportBundle) -> String {
    let mut out = String::from("dag_id,algo,makespan_s,runtime_s,dag_size\n");
    for t in &bundle.trials {
        writeln!(
            out,
            "{},{},{},{},{}",
            t.dag_id, t.algo, t.makespan_s, t.runtime_s, t.dag_size
        )
        .unwrap();
    }
    out
}

/// Writes every report file into `dir`, creating it if needed, and returns
/// the paths written.
pub fn emit_report(bundle: &ReportBundle, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut put = |name: String, body: String| -> Result<()> {
        let path = dir.join(name);
        fs::write(&path, body)?;
        written.push(path);
        Ok(())
    };
    put("summary.json".into(), summary_json(bundle)?)?;
    put("trials.csv".into(), trials_csv(bundle))?;
    for (algo, points) in &bundle.cdf {
        let mut body = String::from("makespan_s,fraction\n");
        for p in points {
            writeln!(body, "{},{}", p.makespan_s, p.fraction).unwrap();
        }
        put(format!("cdf_{algo}.csv"), body)?;
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::{Algorithm, TrialRecord};

    fn bundle() -> ReportBundle {
        let trials = (0..3)
            .map(|dag_id| TrialRecord {
                dag_id,
                algo: Algorithm::Dpe,
                makespan_s: 1.5 + dag_id as f64,
                runtime_s: 0.0,
                dag_size: 2,
                network: "abc".into(),
            })
            .collect();
        ReportBundle::from_trials("abc".into(), &[Algorithm::Dpe], trials)
    }

    #[test]
    fn trials_file_has_header_and_rows() {
        let dir = tempfile::tempdir().unwrap();
        emit_report(&bundle(), dir.path()).unwrap();
        let text = fs::read_to_string(dir.path().join("trials.csv")).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "dag_id,algo,makespan_s,runtime_s,dag_size");
        assert_eq!(lines[1], "0,dpe,1.5,0,2");
        let cdf = fs::read_to_string(dir.path().join("cdf_dpe.csv")).unwrap();
        assert_eq!(cdf.lines().last().unwrap(), "3.5,1");
    }

    #[test]
    fn identical_bundles_identical_files() {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let wa = emit_report(&bundle(), a.path()).unwrap();
        emit_report(&bundle(), b.path()).unwrap();
        for path in wa {
            let name = path.file_name().unwrap();
            assert_eq!(
                fs::read(&path).unwrap(),
                fs::read(b.path().join(name)).unwrap()
            );
        }
    }

    #[test]
    fn summary_fields() {
        let s: serde_json::Value = serde_json::from_str(&summary_json(&bundle()).unwrap()).unwrap();
        assert_eq!(s["dag_count"], 3);
        assert_eq!(s["mean_makespan_s"]["dpe"], 2.5);
    }
}
