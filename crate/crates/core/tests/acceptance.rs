//! End-to-end acceptance checks. Each check prints one `[PASS]`/`[FAIL]` line;
//! the process exits nonzero if any fails.

mod support;

use std::process::ExitCode;
use std::time::Instant;

use hyers_ulam::fixpoint::{iterate, Alternative, IterationOptions, Outcome};
use hyers_ulam::kernel::{parse, BinOp, Func, KernelExpr, SampleDomain, Var};
use hyers_ulam::metric::{sup_distance, ulp};
use hyers_ulam::mtfunc::{
    check_local_cap_with, check_nonincreasing_sequence, check_strictly_decreasing_sequence,
    Endpoints, LocalCap, RegistryEntry,
};
use hyers_ulam::problems::{bundled, by_name};
use hyers_ulam::volterra::{
    apply_operator, certify, grid_refinement, residual_theta, restrict_to, solve,
};
use hyers_ulam::{Grid, GridFunction, KernelProblem, MtFunc};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::{halve_plus_root2, RationalOffset, Surd, Q};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_function(
    rng: &mut ChaCha8Rng,
    grid: Grid,
    domain: SampleDomain,
    radius: f64,
) -> GridFunction {
    let values = (0..grid.n()).map(|_| domain.draw(rng, radius)).collect();
    GridFunction::new(grid, values).unwrap()
}

fn constant_phi_certificate() -> Check {
    let mut r = rng(1);
    let mut cases = 0;
    for l in [0.1, 0.3, 0.5, 0.9] {
        for k in [0.5, 1.0, 2.0] {
            if k * l >= 1.0 {
                continue;
            }
            let prob = KernelProblem::new(
                parse(&format!("{l:?}*y")).unwrap(),
                MtFunc::constant(l).unwrap(),
                Grid::new(0.0, k, 101).unwrap(),
                10.0,
                SampleDomain::Complex,
            )
            .map_err(|e| e.to_string())?;
            let thetas = [0.0, 1e-12, 1e-3, 0.5, 1.0, 7.25]
                .into_iter()
                .chain((0..20).map(|_| 10f64.powf(r.random_range(-8.0..2.0))));
            for theta in thetas {
                let cert = certify(&prob, theta).map_err(|e| e.to_string())?;
                let direct = theta / (1.0 - k * l);
                ensure(cert.bound.to_bits() == direct.to_bits(), || {
                    format!("K={k} L={l} theta={theta}: {} != {direct}", cert.bound)
                })?;
                ensure(cert.delta.to_bits() == (k * l).to_bits(), || {
                    format!("K={k} L={l}: delta {}", cert.delta)
                })?;
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} (K, L, theta) cases bit-exact"))
}

fn discrete_contraction() -> Check {
    let mut worst = 0.0f64;
    let mut worst_excess = f64::NEG_INFINITY;
    let mut total = 0;
    for (idx, b) in bundled().into_iter().enumerate() {
        let prob = b.problem();
        let grid = prob.grid();
        let mut r = rng(100 + idx as u64);
        for i in 0..1000 {
            let r1 = 5.0 * r.random::<f64>();
            let r2 = 5.0 * 10f64.powf(r.random_range(-6.0..0.0));
            let f = random_function(&mut r, grid, prob.domain(), r1);
            // Every other pair differs by a constant shift, where the bound is nearly tight.
            let delta = if i % 2 == 0 {
                random_function(&mut r, grid, prob.domain(), r2)
            } else {
                GridFunction::constant(grid, prob.domain().draw(&mut r, r2))
            };
            let g = GridFunction::new(
                grid,
                f.values()
                    .iter()
                    .zip(delta.values())
                    .map(|(a, d)| a + d)
                    .collect(),
            )
            .unwrap();
            let tf = apply_operator(&prob, &f).map_err(|e| e.to_string())?;
            let tg = apply_operator(&prob, &g).map_err(|e| e.to_string())?;
            let d = sup_distance(&f, &g).unwrap().to_f64();
            let lhs = sup_distance(&tf, &tg).unwrap().to_f64();
            let rhs = prob.k() * prob.phi().eval(d).unwrap() * d;
            // Tf − Tg is a difference of two rounded sums, so it carries
            // rounding at the size of Tf and Tg, not of the difference.
            let scale = rhs.max(tf.max_abs()).max(tg.max_abs());
            let excess = (lhs - rhs) / ulp(scale);
            ensure(excess <= 4.0, || {
                format!("{} pair {i}: {lhs} > {rhs} by {excess:.2} ulp", b.name)
            })?;
            worst_excess = worst_excess.max(excess);
            if rhs > 0.0 {
                worst = worst.max(lhs / rhs);
            }
            total += 1;
        }
    }
    Ok(format!(
        "{total} pairs, 0 violations, max lhs/rhs = {worst:.6}, max excess {:.3} ulp",
        worst_excess.max(0.0)
    ))
}

fn closed_form_solve() -> Check {
    let prob = by_name("cos-tau").unwrap().at(1001);
    let sol = solve(&prob, None, IterationOptions::default()).map_err(|e| e.to_string())?;
    let err = sol
        .y0
        .grid()
        .nodes()
        .zip(sol.y0.values())
        .map(|(x, v)| (v - Complex64::new(x.sin(), 0.0)).norm())
        .fold(0.0, f64::max);
    ensure(sol.converged(), || "did not converge".into())?;
    ensure(err <= 1e-6, || format!("max |y - sin| = {err:e}"))?;
    ensure(sol.trace.iterations_used == 1, || {
        format!("{} iterations", sol.trace.iterations_used)
    })?;
    Ok(format!("max |y - sin| = {err:.3e}, 1 iteration"))
}

fn linear_collapse() -> Check {
    let prob = by_name("linear-half").unwrap().problem();
    let cap = 0.5 + 2.0 * ulp(0.5);
    let mut max_y = 0.0f64;
    let mut max_ratio = 0.0f64;
    for seed in 0..10 {
        let start = random_function(
            &mut rng(200 + seed),
            prob.grid(),
            SampleDomain::Complex,
            1.0,
        );
        let sol =
            solve(&prob, Some(start), IterationOptions::default()).map_err(|e| e.to_string())?;
        ensure(sol.converged(), || format!("start {seed} did not converge"))?;
        max_y = max_y.max(sol.y0.max_abs());
        for w in sol.trace.increments.windows(2) {
            let (a, b) = (w[0].to_f64(), w[1].to_f64());
            if a > 0.0 && w[1].is_finite() {
                let ratio = b / a;
                ensure(ratio <= cap, || format!("start {seed}: ratio {ratio}"))?;
                max_ratio = max_ratio.max(ratio);
            }
        }
    }
    ensure(max_y <= 1e-9, || format!("max |y0| = {max_y:e}"))?;
    Ok(format!(
        "max |y0| = {max_y:.3e}, max increment ratio = {max_ratio:.6}"
    ))
}

fn certificate_soundness() -> Check {
    let opts = IterationOptions::default();
    let mut worst_margin = f64::INFINITY;
    for (idx, b) in bundled().into_iter().enumerate() {
        let prob = b.problem();
        let grid = prob.grid();
        let reference = solve(&b.at(10_001), None, opts).map_err(|e| e.to_string())?;
        let y_ref = restrict_to(&reference.y0, grid).map_err(|e| e.to_string())?;
        let y0 = solve(&prob, None, opts).map_err(|e| e.to_string())?.y0;
        let mut r = rng(300 + idx as u64);
        for i in 0..100 {
            let g = random_function(&mut r, grid, prob.domain(), 1.0);
            let target = 10f64.powf(r.random_range(-3.0..0.0));
            let mut c = target;
            let (mut y, mut theta) = (y0.clone(), 0.0);
            for _ in 0..8 {
                y = GridFunction::new(
                    grid,
                    y0.values()
                        .iter()
                        .zip(g.values())
                        .map(|(a, gv)| a + gv * c)
                        .collect(),
                )
                .unwrap();
                theta = residual_theta(&prob, &y).map_err(|e| e.to_string())?;
                if (1e-3..=1.0).contains(&theta) {
                    break;
                }
                c *= target / theta;
            }
            ensure((1e-3..=1.0).contains(&theta), || {
                format!(
                    "{} perturbation {i}: could not place theta, got {theta}",
                    b.name
                )
            })?;
            let cert = certify(&prob, theta).map_err(|e| e.to_string())?;
            let dist = sup_distance(&y, &y_ref).unwrap().to_f64();
            let allowed = cert.bound + 1e-4;
            ensure(dist <= allowed, || {
                format!(
                    "{} perturbation {i}: {dist} > {allowed} (theta {theta})",
                    b.name
                )
            })?;
            worst_margin = worst_margin.min(allowed - dist);
        }
    }
    Ok(format!(
        "400 perturbations, smallest margin {worst_margin:.3e}"
    ))
}

fn alternative_classification() -> Check {
    let opts = IterationOptions {
        stop_tol: 1e-10,
        max_iter: 50,
    };
    let trace = iterate(&RationalOffset, halve_plus_root2, Surd::zero(), opts).unwrap();
    // Oracle: x_n = 2√2(1 − 2⁻ⁿ), so x_{n+1} − x_n = 2⁻ⁿ√2 has zero rational
    // part and nonzero √2 part for every n.
    for (n, d) in trace.increments.iter().enumerate() {
        let step = Q::new(1, 1i128 << n);
        ensure(step != Q::from(0) && d.is_inf(), || {
            format!("toy increment {n} = {d}")
        })?;
    }
    ensure(trace.increments.len() == 50, || {
        "toy budget not used".into()
    })?;
    ensure(
        trace.outcome == Outcome::CaseA && trace.alternative() == Alternative::CaseA,
        || format!("toy space classified {:?}", trace.alternative()),
    )?;
    for b in bundled() {
        let sol =
            solve(&b.problem(), None, IterationOptions::default()).map_err(|e| e.to_string())?;
        ensure(
            sol.trace.alternative() == Alternative::CaseB { ell: 0 },
            || format!("{} classified {:?}", b.name, sol.trace.alternative()),
        )?;
    }
    Ok("toy space CaseA over 50 steps; bundled problems CaseB(0)".into())
}

fn mt_batteries() -> Check {
    let eps_grid: Vec<f64> = (0..8).map(|k| 10f64.powi(-k)).collect();
    let decreasing: Vec<Vec<f64>> = vec![
        (1..=2000).map(|n| 1.0 / n as f64).collect(),
        (0..200).map(|n| 3.0 + 0.9f64.powi(n)).collect(),
        (0..60).map(|n| 2.0f64.powi(-n)).collect(),
        vec![100.0, 10.0, 1.0, 0.5, 0.25, 0.0],
    ];
    let nonincreasing: Vec<Vec<f64>> = vec![
        vec![5.0, 5.0, 5.0, 2.0, 2.0, 1.0, 1.0, 0.0, 0.0],
        vec![0.5; 10],
        (0..300).map(|n| 1.0 + 1.0 / (1 + n / 3) as f64).collect(),
    ];
    let points = [0.0, 1e-9, 0.5, 1.0, 2.0, 3.0, 1e3];

    let mut phis = Vec::new();
    for c in [0.0, 0.5, 0.999] {
        phis.push((format!("constant {c}"), MtFunc::constant(c).unwrap()));
    }
    phis.push((
        "nondecreasing table".into(),
        MtFunc::table(vec![0.0, 0.5, 1.0, 2.0], vec![0.1, 0.3, 0.6, 0.95], 0.95).unwrap(),
    ));
    phis.push((
        "nonincreasing table".into(),
        MtFunc::table(vec![0.0, 1.0, 3.0], vec![0.99, 0.5, 0.1], 0.99).unwrap(),
    ));

    let mut checks = 0;
    for (name, phi) in &phis {
        for xs in &decreasing {
            let res = check_strictly_decreasing_sequence(phi, xs).map_err(|e| e.to_string())?;
            ensure(res.passes, || {
                format!("{name}: strictly decreasing battery failed {res:?}")
            })?;
            checks += 1;
        }
        for xs in decreasing.iter().chain(&nonincreasing) {
            let res = check_nonincreasing_sequence(phi, xs).map_err(|e| e.to_string())?;
            ensure(res.passes, || {
                format!("{name}: nonincreasing battery failed {res:?}")
            })?;
            checks += 1;
        }
        for t in points {
            for ends in Endpoints::ALL {
                let res =
                    check_local_cap_with(phi, t, &eps_grid, ends).map_err(|e| e.to_string())?;
                ensure(matches!(res, LocalCap::Capped { .. }), || {
                    format!("{name}: local cap at {t} ({ends:?}) gave {res:?}")
                })?;
                checks += 1;
            }
        }
    }

    let bad = MtFunc::registry(RegistryEntry::OneMinusS);
    let xs: Vec<f64> = (1..=1_000_000).map(|n| 1.0 / n as f64).collect();
    let res = check_nonincreasing_sequence(&bad, &xs).map_err(|e| e.to_string())?;
    ensure(!res.passes, || {
        "one-minus-s passed the sequence battery".into()
    })?;
    ensure(
        res.witness <= 1e-6 && res.sup_observed >= 1.0 - 1e-6,
        || format!("weak sequence witness {res:?}"),
    )?;
    let local =
        check_local_cap_with(&bad, 0.0, &eps_grid, Endpoints::Open).map_err(|e| e.to_string())?;
    let LocalCap::CounterSample { s, value } = local else {
        return Err(format!("one-minus-s capped at 0: {local:?}"));
    };
    ensure(s <= 1e-6 && value >= 1.0 - 1e-6, || {
        format!("weak local witness s={s} value={value}")
    })?;
    Ok(format!(
        "{checks} passing checks; one-minus-s rejected at s = {:e} (value {}) and s = {s:e}",
        res.witness, res.sup_observed
    ))
}

fn grid_refinement_order() -> Check {
    let b = by_name("cos-sin").unwrap();
    let opts = IterationOptions::default();
    let reference = solve(&b.at(10_001), None, opts)
        .map_err(|e| e.to_string())?
        .y0;
    let error = |n: usize| -> Result<f64, String> {
        let sol = solve(&b.at(n), None, opts).map_err(|e| e.to_string())?;
        let r = restrict_to(&reference, sol.y0.grid()).map_err(|e| e.to_string())?;
        Ok(sup_distance(&sol.y0, &r).unwrap().to_f64())
    };
    let (coarse, fine) = (error(501)?, error(1001)?);
    let ratio = coarse / fine;
    let pair = grid_refinement(&b.at(501), opts).map_err(|e| e.to_string())?;
    ensure((3.0..=5.0).contains(&ratio), || {
        format!("error ratio {ratio} (e501 = {coarse:e}, e1001 = {fine:e})")
    })?;
    Ok(format!(
        "e501 = {coarse:.3e}, e1001 = {fine:.3e}, ratio = {ratio:.3}; shared-node diff {:.3e}",
        pair.max_diff
    ))
}

fn random_literal(r: &mut ChaCha8Rng) -> f64 {
    match r.random_range(0..4) {
        0 => f64::from(r.random_range(0u32..1000)),
        1 => r.random_range(0.0..1e6),
        2 => r.random_range(0.0..1e-3),
        _ => loop {
            let v = f64::from_bits(r.random::<u64>() >> 1);
            if v.is_finite() {
                break v;
            }
        },
    }
}

fn random_ast(r: &mut ChaCha8Rng, depth: u32) -> KernelExpr {
    if depth == 0 || r.random_bool(0.3) {
        return match r.random_range(0..3) {
            0 => KernelExpr::Real(random_literal(r)),
            1 => KernelExpr::Imag(random_literal(r)),
            _ => KernelExpr::Var(Var::ALL[r.random_range(0..Var::ALL.len())]),
        };
    }
    match r.random_range(0..3) {
        0 => KernelExpr::neg(random_ast(r, depth - 1)),
        1 => KernelExpr::call(
            Func::ALL[r.random_range(0..Func::ALL.len())],
            random_ast(r, depth - 1),
        ),
        _ => {
            let op = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div][r.random_range(0..4)];
            KernelExpr::binary(op, random_ast(r, depth - 1), random_ast(r, depth - 1))
        }
    }
}

fn parser_round_trip() -> Check {
    let mut r = rng(9);
    for i in 0..10_000 {
        let ast = random_ast(&mut r, 8);
        let printed = ast.to_string();
        let back = parse(&printed).map_err(|e| format!("ast {i}: {printed:?}: {e}"))?;
        ensure(back == ast, || format!("ast {i} changed: {printed:?}"))?;
    }
    let corpus: [(&str, usize); 18] = [
        ("x*(", 3),
        ("", 0),
        ("   ", 3),
        ("x +", 3),
        ("2x", 1),
        ("sin y", 4),
        ("foo(x)", 0),
        ("(x", 2),
        ("x)", 1),
        ("x $ y", 2),
        ("cos(tau))", 8),
        ("2 i", 2),
        ("*y", 0),
        ("x(1)", 1),
        (".", 0),
        ("y ** 2", 3),
        ("conj()", 5),
        ("y*1e999", 2),
    ];
    for (src, offset) in corpus {
        match parse(src) {
            Ok(ast) => return Err(format!("{src:?} parsed as {ast}")),
            Err(e) => ensure(e.offset == offset, || {
                format!("{src:?}: offset {} != {offset}", e.offset)
            })?,
        }
    }
    Ok(format!(
        "10000 round trips, {} malformed inputs located",
        corpus.len()
    ))
}

fn main() -> ExitCode {
    let checks: [Criterion; 9] = [
        (
            "constant phi: certificate equals theta/(1 - K*L)",
            constant_phi_certificate,
        ),
        ("discrete contraction on random pairs", discrete_contraction),
        (
            "cos(tau) solve matches sin in one iteration",
            closed_form_solve,
        ),
        (
            "0.5*y collapses to zero from random starts",
            linear_collapse,
        ),
        (
            "certificate bound holds for perturbed solutions",
            certificate_soundness,
        ),
        ("alternative classification", alternative_classification),
        ("MT-function batteries", mt_batteries),
        ("second-order grid refinement", grid_refinement_order),
        ("parser round trip and error offsets", parser_round_trip),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let start = Instant::now();
        let res = check();
        let secs = start.elapsed().as_secs_f64();
        match res {
            Ok(detail) => println!("[PASS] {}. {name}: {detail} ({secs:.2}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {}. {name}: {why} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!(
        "{} of {} acceptance checks passed",
        checks.len() - failed,
        checks.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
