//! Scenario runner behind the `bellcorr` binary.

// Negated comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod run;
pub mod scenario;

pub use run::{run_scenario, ReportBundle};
pub use scenario::{parse_scenario, Scenario, Task};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {}", .0.join("; "))]
    Config(Vec<String>),
    #[error("convergence failure: {0}")]
    Convergence(String),
    #[error("invariant violation: {0}")]
    Violation(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Convergence(_) => 3,
            CliError::Violation(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

impl From<bellcorr::Error> for CliError {
    fn from(e: bellcorr::Error) -> Self {
        use bellcorr::Error as E;
        match e {
            E::Eigensolver(_) | E::Estimation(_) | E::Fit(_) => CliError::Convergence(e.to_string()),
            _ => CliError::Config(vec![e.to_string()]),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}

/// `printf("%.9g")`: nine significant digits, trailing zeros dropped.
pub fn fmt_g(x: f64) -> String {
    const P: i32 = 9;
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", (P - 1) as usize, x);
    let (mant, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if (-4..P).contains(&exp) {
        let s = format!("{:.*}", (P - 1 - exp) as usize, x);
        trim_zeros(&s).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mant), exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
