use std::fmt::Write as _;
use std::path::Path;

use hyers_ulam::fixpoint::Outcome;
use hyers_ulam::kernel::{LipschitzOutcome, SampleDomain};
use hyers_ulam::mtfunc::{
    check_local_cap_with, check_nonincreasing_sequence, Endpoints, LocalCap, MtFunc, MtKind,
};
use hyers_ulam::volterra::{
    certify, read_candidate, residual_theta, solve, write_table, LipschitzStatus, QUADRATURE,
};
use hyers_ulam::{KernelProblem, StabilityCertificate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{describe_phi, ProblemConfig};
use crate::{CliError, Exit, Report};

/// Appends `  label  value` with the label padded to a fixed column.
fn row(out: &mut String, label: &str, value: impl std::fmt::Display) {
    writeln!(out, "  {label:<18}{value}").expect("writing to a String");
}

struct Machine {
    theta: f64,
    delta: f64,
    bound: f64,
    iterations: usize,
    outcome: &'static str,
}

impl Machine {
    fn render(&self, prob: &KernelProblem) -> String {
        let g = prob.grid();
        format!(
            "theta = {:?}\ndelta = {:?}\nbound = {:?}\ngrid.a = {:?}\ngrid.b = {:?}\ngrid.n = {}\niterations = {}\noutcome = {}\n",
            self.theta,
            self.delta,
            self.bound,
            g.a(),
            g.b(),
            g.n(),
            self.iterations,
            self.outcome
        )
    }
}

fn caveat(out: &mut String, prob: &KernelProblem, lipschitz: &str) {
    let g = prob.grid();
    out.push_str("\ncaveat\n");
    row(
        out,
        "grid",
        format!(
            "[{:?}, {:?}] with n = {} (h = {:?})",
            g.a(),
            g.b(),
            g.n(),
            g.spacing()
        ),
    );
    row(out, "quadrature", QUADRATURE);
    row(out, "disk radius", format!("{:?}", prob.disk_radius()));
    row(out, "domain", prob.domain().name());
    row(out, "lipschitz", lipschitz);
    out.push_str(
        "  The bound is for the discretized equation on this grid, and holds only while\n  \
         iterates stay inside the disk (on the real segment for real problems).\n",
    );
}

fn verification(
    cfg: &ProblemConfig,
    seed: u64,
) -> Result<(LipschitzOutcome, LipschitzStatus), CliError> {
    let out = cfg
        .problem()
        .verify_lipschitz(cfg.lipschitz_samples, seed)?;
    let status = match out {
        LipschitzOutcome::Verified { samples } => LipschitzStatus::Verified { samples, seed },
        LipschitzOutcome::CounterSample(_) => LipschitzStatus::Skipped,
    };
    Ok((out, status))
}

fn describe_verification(out: &LipschitzOutcome, seed: u64) -> String {
    match out {
        LipschitzOutcome::Verified { samples } => {
            format!("verified on {samples} samples (seed {seed})")
        }
        LipschitzOutcome::CounterSample(cs) => format!(
            "COUNTER-SAMPLE at x = {:?}, tau = {:?}, y = {}, z = {}: {:?} > {:?}",
            cs.x, cs.tau, cs.y, cs.z, cs.lhs, cs.rhs
        ),
    }
}

pub fn solve_cmd(cfg: &ProblemConfig, machine: bool) -> Result<Report, CliError> {
    let prob = cfg.problem();
    let sol = solve(prob, None, cfg.opts)?;
    let delta = prob.delta();
    let theta = residual_theta(prob, &sol.y0)?;
    let cert = certify(prob, theta)?;
    let trace = &sol.trace;
    let (outcome, exit) = match trace.outcome {
        Outcome::Converged => ("converged", Exit::Ok),
        Outcome::BudgetExhausted => ("budget-exhausted", Exit::BudgetExhausted),
        Outcome::CaseA => ("all-increments-infinite", Exit::BudgetExhausted),
    };
    if machine {
        let m = Machine {
            theta,
            delta,
            bound: cert.bound,
            iterations: trace.iterations_used,
            outcome,
        };
        return Ok(Report {
            text: m.render(prob),
            exit,
        });
    }

    let mut out = String::from("solve\n");
    row(&mut out, "kernel", &cfg.kernel_src);
    row(&mut out, "phi", describe_phi(prob.phi()));
    row(&mut out, "delta", format!("{delta:?}"));
    row(&mut out, "outcome", outcome);
    row(&mut out, "iterations", trace.iterations_used);
    row(
        &mut out,
        "final increment",
        format!("{:?}", trace.final_increment().to_f64()),
    );
    row(
        &mut out,
        "tail estimate",
        format!(
            "{:?}  (increment * delta / (1 - delta))",
            sol.tail_estimate(delta).to_f64()
        ),
    );
    row(&mut out, "residual theta", format!("{theta:?}"));
    row(
        &mut out,
        "bound",
        format!("{:?}  (theta / (1 - delta))", cert.bound),
    );
    caveat(&mut out, prob, "not checked by solve (see verify-kernel)");

    out.push_str("\nincrements\n");
    for (n, d) in trace.increments.iter().enumerate() {
        writeln!(out, "  {n:>6}  {:?}", d.to_f64()).expect("writing to a String");
    }
    out.push_str("\ny0\n");
    out.push_str(&write_table(&sol.y0));
    Ok(Report { text: out, exit })
}

pub fn certify_cmd(
    cfg: &ProblemConfig,
    candidate: &Path,
    seed: u64,
    machine: bool,
) -> Result<Report, CliError> {
    let prob = cfg.problem();
    let text = std::fs::read_to_string(candidate).map_err(|source| CliError::Io {
        path: candidate.display().to_string(),
        source,
    })?;
    let y = read_candidate(&text, prob.grid()).map_err(|source| CliError::Candidate {
        path: candidate.display().to_string(),
        source,
    })?;
    let theta = residual_theta(prob, &y)?;
    let (lipschitz, status) = verification(cfg, seed)?;
    let cert: StabilityCertificate = certify(prob, theta)?.with_verification(status);
    let refuted = matches!(lipschitz, LipschitzOutcome::CounterSample(_));
    let exit = if refuted {
        Exit::CounterExample
    } else {
        Exit::Ok
    };

    if machine {
        let m = Machine {
            theta: cert.theta,
            delta: cert.delta,
            bound: cert.bound,
            iterations: 0,
            outcome: if refuted {
                "counter-sample"
            } else {
                "certified"
            },
        };
        return Ok(Report {
            text: m.render(prob),
            exit,
        });
    }

    let mut out = String::from("certify\n");
    row(&mut out, "kernel", &cfg.kernel_src);
    row(&mut out, "phi", describe_phi(prob.phi()));
    row(&mut out, "candidate", candidate.display());
    row(&mut out, "theta", format!("{:?}", cert.theta));
    row(&mut out, "delta", format!("{:?}", cert.delta));
    row(
        &mut out,
        "bound",
        format!("{:?}  (theta / (1 - delta))", cert.bound),
    );
    if refuted {
        out.push_str(
            "  The kernel is not phi-Lipschitz on the sampled region; the bound is void.\n",
        );
    }
    caveat(&mut out, prob, &describe_verification(&lipschitz, seed));
    Ok(Report { text: out, exit })
}

pub fn verify_kernel_cmd(
    cfg: &ProblemConfig,
    seed: u64,
    machine: bool,
) -> Result<Report, CliError> {
    let prob = cfg.problem();
    let (lipschitz, _) = verification(cfg, seed)?;
    let (outcome, exit) = match lipschitz {
        LipschitzOutcome::Verified { .. } => ("verified", Exit::Ok),
        LipschitzOutcome::CounterSample(_) => ("counter-sample", Exit::CounterExample),
    };
    let text = if machine {
        format!(
            "outcome = {outcome}\nsamples = {}\nseed = {seed}\n",
            cfg.lipschitz_samples
        )
    } else {
        let mut out = String::from("verify-kernel\n");
        row(&mut out, "kernel", &cfg.kernel_src);
        row(&mut out, "phi", describe_phi(prob.phi()));
        row(
            &mut out,
            "region",
            match prob.domain() {
                SampleDomain::Complex => format!("|y| <= {:?}", prob.disk_radius()),
                SampleDomain::Real => format!("y real, |y| <= {:?}", prob.disk_radius()),
            },
        );
        let g = prob.grid();
        row(&mut out, "x, tau", format!("[{:?}, {:?}]", g.a(), g.b()));
        row(&mut out, "result", describe_verification(&lipschitz, seed));
        out
    };
    Ok(Report { text, exit })
}

struct Batteries {
    nonincreasing: Vec<Vec<f64>>,
    strictly_decreasing: Vec<Vec<f64>>,
    points: Vec<f64>,
    eps_grid: Vec<f64>,
}

fn batteries(phi: &MtFunc, seed: u64) -> Batteries {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut anchors = vec![0.0];
    if let MtKind::Table { breakpoints, .. } = phi.kind() {
        anchors.extend(breakpoints.iter().copied().filter(|t| *t > 0.0));
    }

    let mut strict: Vec<Vec<f64>> = vec![
        (1..=1_000_000).map(|n| 1.0 / n as f64).collect(),
        (0..=60).map(|n| 2f64.powi(-n)).collect(),
    ];
    for &t in &anchors {
        strict.push((1..=50).map(|k| t + 2f64.powi(-k)).collect());
    }
    let mut loose = Vec::new();
    for i in 0..32 {
        let mut x = 10f64.powf(rng.random_range(-2.0..3.0));
        let mut xs = Vec::with_capacity(100);
        for _ in 0..100 {
            xs.push(x);
            if i % 2 == 1 && rng.random_bool(0.25) {
                continue;
            }
            x *= rng.random_range(0.5..1.0);
        }
        if xs.windows(2).all(|w| w[1] < w[0]) {
            strict.push(xs);
        } else {
            loose.push(xs);
        }
    }
    for &t in &anchors {
        loose.push(vec![t + 1.0, t + 1.0, t + 0.5, t, t]);
    }

    let mut points = anchors;
    points.extend((0..16).map(|_| 10f64.powf(rng.random_range(-3.0..2.0))));
    Batteries {
        nonincreasing: strict.iter().chain(&loose).cloned().collect(),
        strictly_decreasing: strict,
        points,
        eps_grid: (0..=8).map(|k| 10f64.powi(-k)).collect(),
    }
}

pub fn check_mt_cmd(phi: &MtFunc, seed: u64, machine: bool) -> Result<Report, CliError> {
    let b = batteries(phi, seed);
    let mut lines = Vec::new();
    let mut all_pass = true;

    for (key, label, seqs) in [
        ("nonincreasing", "nonincreasing sequences", &b.nonincreasing),
        (
            "strictly_decreasing",
            "strictly decreasing sequences",
            &b.strictly_decreasing,
        ),
    ] {
        let mut worst: Option<(f64, f64)> = None;
        let mut pass = true;
        for xs in seqs {
            let res =
                check_nonincreasing_sequence(phi, xs).map_err(|e| CliError::Mt(e.to_string()))?;
            pass &= res.passes;
            if worst.is_none_or(|(v, _)| res.sup_observed > v) {
                worst = Some((res.sup_observed, res.witness));
            }
        }
        let (v, x) = worst.expect("batteries are nonempty");
        all_pass &= pass;
        lines.push((
            key,
            label,
            pass,
            format!("{} sequences, sup phi = {v:?} at x = {x:?}", seqs.len()),
        ));
    }

    for ends in Endpoints::ALL {
        let (key, label) = match ends {
            Endpoints::Open => ("local_cap.open", "local cap on (t, t+eps)"),
            Endpoints::Closed => ("local_cap.closed", "local cap on [t, t+eps]"),
            Endpoints::RightClosed => ("local_cap.right_closed", "local cap on (t, t+eps]"),
            Endpoints::LeftClosed => ("local_cap.left_closed", "local cap on [t, t+eps)"),
        };
        let mut pass = true;
        let mut worst_r = 0.0f64;
        let mut counter = None;
        for &t in &b.points {
            match check_local_cap_with(phi, t, &b.eps_grid, ends)
                .map_err(|e| CliError::Mt(e.to_string()))?
            {
                LocalCap::Capped { r, .. } => worst_r = worst_r.max(r),
                LocalCap::CounterSample { s, value } => {
                    pass = false;
                    counter.get_or_insert((t, s, value));
                }
            }
        }
        all_pass &= pass;
        let detail = match counter {
            None => format!("{} points, max cap r = {worst_r:?}", b.points.len()),
            Some((t, s, value)) => format!("near t = {t:?}: phi({s:?}) = {value:?}"),
        };
        lines.push((key, label, pass, detail));
    }

    let exit = if all_pass {
        Exit::Ok
    } else {
        Exit::CounterExample
    };
    let text = if machine {
        let mut out = format!("outcome = {}\n", if all_pass { "pass" } else { "fail" });
        for (key, _, pass, _) in &lines {
            writeln!(out, "{key} = {}", if *pass { "pass" } else { "fail" })
                .expect("writing to a String");
        }
        out
    } else {
        let mut out = String::from("check-mt\n");
        row(&mut out, "phi", describe_phi(phi));
        row(&mut out, "seed", seed);
        out.push('\n');
        for (_, label, pass, detail) in &lines {
            writeln!(
                out,
                "  {label:<32}{}  {detail}",
                if *pass { "PASS" } else { "FAIL" }
            )
            .expect("writing to a String");
        }
        out.push_str(if all_pass {
            "\nno sample violates the MT property (sampled checks cannot prove it)\n"
        } else {
            "\nnot an MT-function: some sample comes within 1e-12 of 1 or exceeds the declared cap\n"
        });
        out
    };
    Ok(Report { text, exit })
}
