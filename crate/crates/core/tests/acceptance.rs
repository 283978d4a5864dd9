//! Acceptance suite: eight criteria, one pass/fail line each.
//!
//! Run with `cargo test --test acceptance`. The process exits nonzero if any
//! criterion fails or exceeds its time budget.

use std::time::{Duration, Instant};

use stokes_ext::extended::ZMode;
use stokes_ext::verify::algebra::{equivalence_check, negative_control, recovery_check, solvability_sweep};
use stokes_ext::verify::cases::manufactured_stokes;
use stokes_ext::verify::studies::{
    alpha_sweep, convergence_study, dual_norm_study, operator_rate_study, oracle_comparison, AlphaSweep,
};
use stokes_ext::verify::thresholds::*;

struct Outcome {
    passed: bool,
    detail: String,
}

fn run(id: usize, title: &str, budget: Duration, f: impl FnOnce() -> stokes_ext::Result<Outcome>) -> bool {
    let start = Instant::now();
    let res = f();
    let elapsed = start.elapsed();
    let (passed, detail) = match res {
        Ok(o) => (o.passed, o.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    let in_time = elapsed <= budget;
    let ok = passed && in_time;
    println!(
        "[{}] {id}. {title} ({:.1}s of {}s{}) {detail}",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        budget.as_secs(),
        if in_time { "" } else { ", over budget" },
    );
    ok
}

fn fmt_order(o: Option<f64>) -> String {
    o.map_or("non-monotone".into(), |v| format!("{v:.3}"))
}

fn criterion_1() -> stokes_ext::Result<Outcome> {
    let rates = operator_rate_study(&[8, 16, 32, 64])?;
    let mut passed = true;
    let mut parts = Vec::new();
    for r in &rates {
        let floor = if r.operator == "l2_projection" {
            PROJECTION_L2_ORDER_MIN
        } else {
            OPERATOR_H1_ORDER_MIN
        };
        let ok = r.fit.order().is_some_and(|o| o >= floor);
        passed &= ok;
        parts.push(format!("{} {} order {} (>= {floor})", r.operator, r.norm, fmt_order(r.fit.order())));
    }
    Ok(Outcome { passed, detail: parts.join("; ") })
}

fn criterion_2() -> stokes_ext::Result<Outcome> {
    let rates = dual_norm_study(&[8, 16, 32])?;
    let mut passed = true;
    let mut parts = Vec::new();
    for r in &rates {
        let ok = r
            .fit
            .order()
            .is_some_and(|o| (DUAL_NORM_ORDER_MIN..=DUAL_NORM_ORDER_MAX).contains(&o));
        passed &= ok;
        let same = r.same_mesh.iter().fold(0.0f64, |m, v| m.max(*v));
        parts.push(format!(
            "{} order {} (window [{DUAL_NORM_ORDER_MIN}, {DUAL_NORM_ORDER_MAX}]), same-mesh surrogate max {same:.1e}",
            r.field,
            fmt_order(r.fit.order())
        ));
    }
    Ok(Outcome { passed, detail: parts.join("; ") })
}

fn criterion_3() -> stokes_ext::Result<Outcome> {
    let case = manufactured_stokes("stream4")?;
    let alphas = [-2.0, -1.0, 0.0, 0.5, 2.0, 5.0];
    let pts = solvability_sweep(&case, &alphas, &[4, 8, 16, 32], &[ZMode::Interior, ZMode::Full])?;
    let mut parts = Vec::new();
    for mode in [ZMode::Interior, ZMode::Full] {
        let sel: Vec<_> = pts.iter().filter(|p| p.mode == mode).collect();
        let failed: Vec<_> = sel.iter().filter(|p| !p.passed()).collect();
        let max_res = sel.iter().map(|p| p.residual).fold(0.0, f64::max);
        let min_ratio = sel.iter().map(|p| p.sigma_ratio).fold(f64::INFINITY, f64::min);
        parts.push(format!(
            "{mode}: {}/{} pass, max residual {max_res:.1e} (<= {SOLVE_RESIDUAL_MAX:e}), min sigma ratio {min_ratio:.1e}{}",
            sel.len() - failed.len(),
            sel.len(),
            if failed.is_empty() {
                String::new()
            } else {
                format!(
                    ", singular at e.g. alpha={} n={}",
                    failed[0].alpha, failed[0].n
                )
            }
        ));
    }
    let neg = negative_control(8, NEGATIVE_CONTROL_RATIO_MAX)?;
    let neg_ok = neg.ratio <= NEGATIVE_CONTROL_RATIO_MAX;
    parts.push(format!(
        "negative control n=8 sigma ratio {:.1e} (<= {NEGATIVE_CONTROL_RATIO_MAX:e}), {} null modes",
        neg.ratio, neg.null_dimension
    ));
    Ok(Outcome {
        passed: pts.iter().all(|p| p.passed()) && neg_ok,
        detail: parts.join("; "),
    })
}

fn criterion_4() -> stokes_ext::Result<Outcome> {
    let case = manufactured_stokes("stream4")?;
    let t = convergence_study(&case, 0.0, &[8, 16, 32, 64], ZMode::Interior)?;
    let r = &t.rates;
    let orders = [
        ("u H1", r.err_u_h1.order()),
        ("p L2", r.err_p_l2.order()),
        ("div u L2", r.div_u_l2.order()),
    ];
    let passed = t.monotone() && orders.iter().all(|(_, o)| o.is_some_and(|o| o >= STOKES_ORDER_MIN));
    let last = t.rows.last().expect("four meshes");
    Ok(Outcome {
        passed,
        detail: format!(
            "{} (>= {STOKES_ORDER_MIN}), monotone {}, n=64 errors u_H1 {:.2e} p_L2 {:.2e} div {:.2e}",
            orders.iter().map(|(k, o)| format!("{k} order {}", fmt_order(*o))).collect::<Vec<_>>().join(", "),
            t.monotone(),
            last.err_u_h1,
            last.err_p_l2,
            last.div_u_l2
        ),
    })
}

fn criterion_5() -> stokes_ext::Result<Outcome> {
    let case = manufactured_stokes("stream4")?;
    let r = equivalence_check(&case, 0.0, 8)?;
    Ok(Outcome {
        passed: r.max_difference() <= EQUIVALENCE_MAX,
        detail: format!(
            "monolithic vs reduced: u {:.1e} p {:.1e}; condensed vs reduced: u {:.1e} p {:.1e} ({} GMRES its); monolithic max|r| {:.1e} (all <= {EQUIVALENCE_MAX:e})",
            r.monolithic_vs_reduced_u,
            r.monolithic_vs_reduced_p,
            r.condensed_vs_reduced_u,
            r.condensed_vs_reduced_p,
            r.condensed_iterations,
            r.monolithic_r_max
        ),
    })
}

fn criterion_6() -> stokes_ext::Result<Outcome> {
    let case = manufactured_stokes("stream4")?;
    let s = alpha_sweep(&case, &[8, 16, 32, 64], &[0.0, 2.0])?;
    let d = s.p_pair(0, 1);
    let red = AlphaSweep::reductions(&d);
    let passed = d[0] > ALPHA_DIFFERENCE_MIN && red.iter().all(|&q| q <= ALPHA_REDUCTION_MAX);
    Ok(Outcome {
        passed,
        detail: format!(
            "|p(0)-p(2)| = {} ; reductions {} (coarse > {ALPHA_DIFFERENCE_MIN:e}, each <= {ALPHA_REDUCTION_MAX})",
            d.iter().map(|v| format!("{v:.2e}")).collect::<Vec<_>>().join(", "),
            red.iter().map(|v| format!("{v:.2}")).collect::<Vec<_>>().join(", ")
        ),
    })
}

fn criterion_7() -> stokes_ext::Result<Outcome> {
    let case = manufactured_stokes("stream4")?;
    let r = recovery_check(&case, 0.0, 8)?;
    let worst = r
        .equations
        .iter()
        .filter(|e| e.relative > RECOVERY_RESIDUAL_MAX)
        .map(|e| format!("'{}' {:.1e}", e.equation, e.relative))
        .collect::<Vec<_>>();
    let passed = worst.is_empty() && r.r_max <= RECOVERY_RESIDUAL_MAX && r.t_defect <= PROJECTION_DEFECT_MAX;
    Ok(Outcome {
        passed,
        detail: format!(
            "max equation residual {:.1e} (<= {RECOVERY_RESIDUAL_MAX:e}){}; max|r| {:.1e}; |t - pi_h f| {:.1e} (<= {PROJECTION_DEFECT_MAX:e})",
            r.max_equation_residual(),
            if worst.is_empty() { String::new() } else { format!(", violated by {}", worst.join(", ")) },
            r.r_max,
            r.t_defect
        ),
    })
}

fn criterion_8() -> stokes_ext::Result<Outcome> {
    let case = manufactured_stokes("stream4")?;
    let c = oracle_comparison(&case, 0.0, 32)?;
    let passed = c.ratio <= ORACLE_BAND && c.ratio >= 1.0 / ORACLE_BAND;
    Ok(Outcome {
        passed,
        detail: format!(
            "extended u_H1 error {:.3e}, oracle {:.3e}, ratio {:.2} (within factor {ORACLE_BAND})",
            c.extended_h1, c.oracle_h1, c.ratio
        ),
    })
}

fn main() {
    print!("{}", thresholds_table());
    let s = Duration::from_secs;
    let results = [
        run(1, "operator-catalog rates", s(30), criterion_1),
        run(2, "pi_0h dual-norm estimate", s(10), criterion_2),
        run(3, "family solvability", s(60), criterion_3),
        run(4, "Stokes convergence", s(120), criterion_4),
        run(5, "equivalence of formulations", s(10), criterion_5),
        run(6, "alpha-family behavior", s(60), criterion_6),
        run(7, "recovered-state identities", s(10), criterion_7),
        run(8, "oracle sanity band", s(20), criterion_8),
    ];
    let passed = results.iter().filter(|&&r| r).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
