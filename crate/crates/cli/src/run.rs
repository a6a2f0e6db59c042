//! Dispatch of a validated scenario and report emission.

use std::fs;
use std::path::Path;

use bellcorr::{BoundParams, SamplerOptions, StateSpec, VerifyOptions};
use serde_json::{json, Value};

use crate::scenario::{PairConfig, Scenario, Task};
use crate::{fmt_g, CliError};

const SQRT2: f64 = std::f64::consts::SQRT_2;
/// Slack on the Tsirelson bound before a value counts as a violation.
const BOUND_SLACK: f64 = 1e-9;

/// How a completed run ended. Outputs are written in every case.
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Success,
    Convergence(String),
    Violation(String),
}

#[derive(Debug, Clone)]
pub struct ReportBundle {
    pub csv_name: &'static str,
    pub csv: String,
    pub summary: Value,
    pub outcome: Outcome,
}

impl ReportBundle {
    /// Writes the CSV and `summary.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join(self.csv_name), &self.csv)?;
        let mut summary = serde_json::to_string_pretty(&self.summary).expect("summary serializes");
        summary.push('\n');
        fs::write(dir.join("summary.json"), summary)?;
        Ok(())
    }

    /// Process exit code for this run.
    pub fn exit_code(&self) -> i32 {
        match self.outcome {
            Outcome::Success => 0,
            Outcome::Convergence(_) => 3,
            Outcome::Violation(_) => 4,
        }
    }
}

fn table(header: &[&str], rows: Vec<Vec<String>>) -> Result<String, CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn flag(b: bool) -> String {
    if b { "true" } else { "false" }.to_string()
}

/// Worst outcome wins: violations over convergence failures.
fn combine(problems: Vec<Outcome>) -> Outcome {
    let mut out = Outcome::Success;
    for p in problems {
        match (&out, p) {
            (Outcome::Violation(_), _) => {}
            (_, v @ Outcome::Violation(_)) => out = v,
            (Outcome::Success, c @ Outcome::Convergence(_)) => out = c,
            _ => {}
        }
    }
    out
}

pub fn run_scenario(s: &Scenario) -> Result<ReportBundle, CliError> {
    match s.task {
        Task::Beta => run_beta(s),
        Task::Invariant => run_invariant(s),
        Task::Cluster => run_cluster(s),
        Task::ChainCurve => run_chain(s),
        Task::VerifySuite => run_verify(s),
    }
}

fn run_beta(s: &Scenario) -> Result<ReportBundle, CliError> {
    let (a, b) = s.pair.as_ref().expect("validated").build()?;
    let state = s.state.as_ref().expect("validated").build(s.seed)?;
    let report = bellcorr::maximize_bell(&state, &a, &b, &s.optimizer_options())?;
    let diag = bellcorr::structural_diagnostics(&state, &report)?;
    let csv = table(
        &["beta", "iterations", "restarts_used", "converged"],
        vec![vec![
            fmt_g(report.beta),
            report.iterations.to_string(),
            report.restarts_used.to_string(),
            flag(report.converged),
        ]],
    )?;
    let mut problems = Vec::new();
    if report.beta > SQRT2 + BOUND_SLACK {
        problems.push(Outcome::Violation(format!(
            "beta {} exceeds the Tsirelson bound",
            report.beta
        )));
    }
    if !report.converged {
        problems.push(Outcome::Convergence("see-saw did not converge".into()));
    }
    Ok(ReportBundle {
        csv_name: "beta.csv",
        csv,
        summary: json!({
            "task": "beta",
            "seed": s.seed,
            "beta": report.beta,
            "converged": report.converged,
            "iterations": report.iterations,
            "diagnostics_max_residual": diag.max_residual(),
        }),
        outcome: combine(problems),
    })
}

fn run_invariant(s: &Scenario) -> Result<ReportBundle, CliError> {
    let pairs: Vec<&PairConfig> = s.pair.iter().chain(&s.pairs).collect();
    let opts = s.optimizer_options();
    let mut rows = Vec::new();
    let mut entries = Vec::new();
    let mut problems = Vec::new();
    for (id, p) in pairs.iter().enumerate() {
        let (a, b) = p.build()?;
        let r = bellcorr::minimax(&a, &b, &opts)?;
        let (star, inf, gap) = (r.star.value, r.inf.value, r.gap());
        rows.push(vec![
            id.to_string(),
            fmt_g(star),
            fmt_g(inf),
            fmt_g(gap),
            flag(r.converged()),
        ]);
        entries.push(json!({
            "pair_id": id,
            "beta_star": star,
            "beta_inf": inf,
            "gap": gap,
            "converged": r.converged(),
        }));
        if star > SQRT2 + BOUND_SLACK || star > inf + 1e-6 {
            problems.push(Outcome::Violation(format!(
                "pair {id}: bracket [{star}, {inf}] is inconsistent"
            )));
        }
        if !r.converged() {
            problems.push(Outcome::Convergence(format!("pair {id}: bracket did not close")));
        }
    }
    Ok(ReportBundle {
        csv_name: "invariant.csv",
        csv: table(&["pair_id", "beta_star", "beta_inf", "gap", "converged"], rows)?,
        summary: json!({"task": "invariant", "seed": s.seed, "pairs": entries}),
        outcome: combine(problems),
    })
}

fn run_cluster(s: &Scenario) -> Result<ReportBundle, CliError> {
    let c = s.cluster.as_ref().expect("validated");
    let mut rows = Vec::new();
    for &d in &c.distances {
        let p = BoundParams::new(c.mass_gap, d)?;
        rows.push(vec![
            fmt_g(d),
            fmt_g(bellcorr::vacuum_decay_bound(&p)),
            fmt_g(bellcorr::distance_bound(&p)),
        ]);
    }
    let mut summary = json!({
        "task": "cluster",
        "seed": s.seed,
        "mass_gap": c.mass_gap,
        "distance_bound_limit": bellcorr::distance_bound_limit::<f64>(),
    });
    let mut outcome = Outcome::Success;
    if let (Some(st), Some(pair)) = (&s.state, &s.pair) {
        let state = st.build(s.seed)?;
        let (a, b) = pair.build()?;
        let gamma = c.gamma.expect("validated");
        let sampler = SamplerOptions {
            samples: c.samples,
            refinement_passes: c.refinement_passes,
            seed: s.seed,
            ..SamplerOptions::default()
        };
        let est = bellcorr::clustering_coefficient(&state, &a, &b, &sampler)?;
        let check = bellcorr::verify_cluster_bound(
            &state,
            &a,
            &b,
            gamma,
            &VerifyOptions {
                optimizer: s.optimizer_options(),
                ..VerifyOptions::default()
            },
        )?;
        summary["gamma"] = json!(gamma);
        summary["gamma_hat"] = json!(est.gamma_hat);
        summary["gamma_hat_is_lower_estimate"] = json!(est.is_lower_estimate);
        summary["beta"] = json!(check.beta);
        summary["bound"] = json!(check.bound);
        summary["holds"] = json!(check.holds);
        if !check.holds {
            outcome = Outcome::Violation(format!("beta {} above the bound {}", check.beta, check.bound));
        }
    }
    Ok(ReportBundle {
        csv_name: "cluster.csv",
        csv: table(&["d", "vacuum_decay", "distance_bound"], rows)?,
        summary,
        outcome,
    })
}

fn run_chain(s: &Scenario) -> Result<ReportBundle, CliError> {
    let c = s.chain.as_ref().expect("validated");
    let chain = bellcorr::build_chain(c.sites, c.coupling, c.field)?;
    let curve = bellcorr::separation_curve(&chain, c.width, &c.separations, c.tol, &s.optimizer_options())?;
    let rows = curve
        .iter()
        .map(|p| vec![p.separation.to_string(), fmt_g(p.beta), flag(p.converged)])
        .collect();
    let mut csv = table(&["a", "beta", "converged"], rows)?;
    let points: Vec<(f64, f64)> = curve.iter().map(|p| (p.separation as f64, p.beta)).collect();
    let fit = bellcorr::fit_decay(&points);
    let fit_json = match &fit {
        Ok(f) => {
            csv.push_str(&format!(
                "# fit rate={} amplitude={} residual={}\n",
                fmt_g(f.rate),
                fmt_g(f.amplitude),
                fmt_g(f.residual)
            ));
            json!({"rate": f.rate, "amplitude": f.amplitude, "residual": f.residual})
        }
        Err(e) => {
            csv.push_str(&format!("# {e}\n"));
            json!({"error": e.to_string()})
        }
    };
    let mut problems = Vec::new();
    for p in &curve {
        if !(1.0 - BOUND_SLACK..=SQRT2 + BOUND_SLACK).contains(&p.beta) {
            problems.push(Outcome::Violation(format!(
                "beta({}) = {} out of range",
                p.separation, p.beta
            )));
        }
        if !p.converged {
            problems.push(Outcome::Convergence(format!("beta({}) did not converge", p.separation)));
        }
    }
    Ok(ReportBundle {
        csv_name: "chain.csv",
        csv,
        summary: json!({
            "task": "chain_curve",
            "seed": s.seed,
            "sites": c.sites,
            "coupling": c.coupling,
            "field": c.field,
            "width": c.width,
            "curve": curve.iter().map(|p| json!({"a": p.separation, "beta": p.beta, "converged": p.converged})).collect::<Vec<_>>(),
            "fit": fit_json,
        }),
        outcome: combine(problems),
    })
}

fn run_verify(s: &Scenario) -> Result<ReportBundle, CliError> {
    let v = s.verify.as_ref().expect("validated");
    let (a, b) = bellcorr::Algebra::matrix_pair(2)?;
    let opts = VerifyOptions {
        optimizer: s.optimizer_options(),
        slack: v.slack,
    };
    let mut cases = Vec::new();
    for &w in &v.werner {
        cases.push((
            format!("werner:{}", fmt_g(w)),
            bellcorr::make_state(StateSpec::Werner { w })?,
            w,
        ));
    }
    for i in 0..v.random_states {
        let st = bellcorr::make_state(StateSpec::Random {
            seed: s.seed.wrapping_add(i as u64),
            dim: 4,
            rank: 1 + i % 4,
        })?;
        cases.push((format!("random:{i}"), st, 1.0));
    }
    let mut rows = Vec::new();
    let mut failures = 0usize;
    for (name, st, gamma) in &cases {
        let c = bellcorr::verify_cluster_bound(st, &a, &b, *gamma, &opts)?;
        if !c.holds {
            failures += 1;
        }
        rows.push(vec![
            name.clone(),
            fmt_g(*gamma),
            fmt_g(c.beta),
            fmt_g(c.bound),
            flag(c.holds),
        ]);
    }
    let outcome = if failures > 0 {
        Outcome::Violation(format!("{failures} of {} cases broke the bound", cases.len()))
    } else {
        Outcome::Success
    };
    Ok(ReportBundle {
        csv_name: "verify.csv",
        csv: table(&["case", "gamma", "beta", "bound", "holds"], rows)?,
        summary: json!({"task": "verify_suite", "seed": s.seed, "cases": cases.len(), "failures": failures}),
        outcome,
    })
}
