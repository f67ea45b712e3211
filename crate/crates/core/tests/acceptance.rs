//! Acceptance suite: one PASS/FAIL line per criterion, with the measured
//! value, the threshold and the wall-clock time. Exits non-zero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use neumann_core::harness::verify::{
    bound_k_exactness, extreme_edge_ks, fredholm_convergence, halting_bound_audit, jue_batch,
    jue_edges, jue_scaling, log_gap_grid, refined_vs_unrefined, sharpness, tail_norm_oracle, Check,
};
use neumann_core::Result;

struct Outcome {
    label: &'static str,
    checks: Vec<Check>,
    elapsed: Duration,
    budget: Option<Duration>,
}

impl Outcome {
    fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed) && self.budget.is_none_or(|b| self.elapsed < b)
    }

    fn print(&self, index: usize) {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        let budget = match self.budget {
            Some(b) => format!(" (budget {:.0}s)", b.as_secs_f64()),
            None => String::new(),
        };
        println!(
            "[{status}] {index:>2}. {} in {:.2}s{budget}",
            self.label,
            self.elapsed.as_secs_f64()
        );
        for c in &self.checks {
            let op = match c.comparison {
                neumann_core::harness::verify::Comparison::Below => "<",
                neumann_core::harness::verify::Comparison::AtMost => "<=",
            };
            println!(
                "         {} {}: {} {op} {} ({})",
                if c.passed { "ok  " } else { "FAIL" },
                c.name,
                show(c.value),
                c.threshold,
                c.detail
            );
        }
    }
}

fn show(v: f64) -> String {
    if v != 0.0 && v.abs() < 1e-3 {
        format!("{v:.3e}")
    } else {
        format!("{v:.6}")
    }
}

fn timed(
    label: &'static str,
    budget: Option<Duration>,
    f: impl FnOnce() -> Result<Vec<Check>>,
) -> Outcome {
    let start = Instant::now();
    let checks =
        f().unwrap_or_else(|e| vec![Check::at_most(label, f64::NAN, 0.0, format!("error: {e}"))]);
    Outcome {
        label,
        checks,
        elapsed: start.elapsed(),
        budget,
    }
}

fn secs(s: u64) -> Option<Duration> {
    Some(Duration::from_secs(s))
}

fn main() -> ExitCode {
    let mut outcomes = vec![
        timed("tail norm matches brute-force power sums", secs(10), || {
            Ok(vec![tail_norm_oracle(200, 41)?])
        }),
        timed("closed-form K_eps equals direct search", secs(1), || {
            Ok(vec![bound_k_exactness(100, 42)?])
        }),
        timed(
            "measured halting times never exceed the bounds",
            secs(60),
            || Ok(vec![halting_bound_audit(100, 50, 25)?]),
        ),
        timed(
            "top-eigenvector right-hand side attains K_eps",
            None,
            || Ok(vec![sharpness(50, 26)?]),
        ),
        timed(
            "uniform-ensemble edges converge to Exp(1/2)",
            secs(30),
            || extreme_edge_ks(10_000, 2000, 34),
        ),
        timed(
            "refined statistic beats the plain reciprocal",
            secs(60),
            || refined_vs_unrefined(1000, 1000, 1e-3, 7),
        ),
        timed(
            "Fredholm determinant converges and is monotone",
            secs(10),
            fredholm_convergence,
        ),
    ];

    // one JUE batch serves both hard-edge criteria
    let start = Instant::now();
    let batch = jue_batch(200, 500, 35);
    let sampling = start.elapsed();
    let mut edges = timed(
        "JUE extreme eigenvalues match the hard-edge law",
        secs(900),
        || jue_edges(batch.as_ref().map_err(clone_err)?, 60),
    );
    edges.elapsed += sampling;
    outcomes.push(edges);
    outcomes.push(timed(
        "reciprocal-log gap bound on a log grid",
        secs(1),
        || Ok(vec![log_gap_grid()]),
    ));
    outcomes.push(timed(
        "JUE reciprocal halting statistic near the hard-edge law",
        None,
        || jue_scaling(batch.as_ref().map_err(clone_err)?, 60),
    ));

    println!();
    for (i, o) in outcomes.iter().enumerate() {
        o.print(i + 1);
    }
    let failed = outcomes.iter().filter(|o| !o.passed()).count();
    println!(
        "\nacceptance: {} passed, {failed} failed",
        outcomes.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn clone_err(e: &neumann_core::Error) -> neumann_core::Error {
    neumann_core::Error::Precondition(format!("JUE sampling failed: {e}"))
}
