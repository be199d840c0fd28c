//! The `reproduce` report: every headline quantity recomputed from scratch
//! and compared against its expected value.

use std::time::Instant;

use serde::Serialize;

use qsd_core::catalog::{domino_row_mixtures, effective_guess_operators, problem};
use qsd_core::helstrom::{check_helstrom_conditions, subset_success_probability};
use qsd_core::locc::{builtin_protocols, evaluate_exact};
use qsd_core::matrix::Party;
use qsd_core::model::validate_povm;
use qsd_core::optimizer::{
    oneway_bound_analyses, reference, solve_symmetric_gamma, verify_guess_function_optimality,
};
use qsd_core::{catalog::sigma_operators, Error};

/// How a row's computed value is judged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    /// `|computed - expected| <= tolerance`.
    Within,
    /// `computed > expected`.
    Exceeds,
    /// `computed <= expected`.
    AtMost,
    /// Context only; never affects the overall verdict.
    DisplayOnly,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReproduceRow {
    pub name: String,
    pub computed: Option<f64>,
    pub expected: Option<f64>,
    pub tolerance: Option<f64>,
    pub check: Check,
    pub pass: bool,
    pub note: String,
}

impl ReproduceRow {
    fn within(name: &str, computed: f64, expected: f64, tolerance: f64, note: &str) -> Self {
        ReproduceRow {
            name: name.into(),
            computed: Some(computed),
            expected: Some(expected),
            tolerance: Some(tolerance),
            check: Check::Within,
            pass: (computed - expected).abs() <= tolerance,
            note: note.into(),
        }
    }

    fn exceeds(name: &str, computed: f64, threshold: f64, note: &str) -> Self {
        ReproduceRow {
            name: name.into(),
            computed: Some(computed),
            expected: Some(threshold),
            tolerance: None,
            check: Check::Exceeds,
            pass: computed > threshold,
            note: note.into(),
        }
    }

    fn at_most(name: &str, computed: f64, threshold: f64, note: &str) -> Self {
        ReproduceRow {
            name: name.into(),
            computed: Some(computed),
            expected: Some(threshold),
            tolerance: None,
            check: Check::AtMost,
            pass: computed <= threshold,
            note: note.into(),
        }
    }

    fn display(name: &str, value: f64, note: &str) -> Self {
        ReproduceRow {
            name: name.into(),
            computed: None,
            expected: Some(value),
            tolerance: None,
            check: Check::DisplayOnly,
            pass: true,
            note: note.into(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReproduceReport {
    pub rows: Vec<ReproduceRow>,
    pub overall_pass: bool,
    pub tool_version: String,
    pub wall_clock_seconds: f64,
}

/// Runs the full pipeline. `tol_override` replaces the default tolerance of
/// every value-comparison row.
pub fn build_report(tol_override: Option<f64>) -> Result<ReproduceReport, Error> {
    let started = Instant::now();
    let t = |default: f64| tol_override.unwrap_or(default);
    let mut rows = Vec::new();

    let protocols = builtin_protocols()?;
    let by_name = |name: &str| {
        protocols
            .iter()
            .find(|b| b.name == name)
            .expect("built-in protocol present")
    };
    let ensemble_of = |name: &str| problem(name).expect("catalog ensemble present").ensemble;

    let gv = ensemble_of("gv");
    let gv_forward = evaluate_exact(&by_name("gv_forward").protocol, &gv)?;
    rows.push(ReproduceRow::within(
        "gv_forward",
        gv_forward,
        1.0,
        t(1e-12),
        "one-way A→B protocol is perfect",
    ));

    let backward = evaluate_exact(&by_name("gv_backward_breidbart").protocol, &gv)?;
    rows.push(ReproduceRow::within(
        "gv_backward_breidbart",
        backward,
        reference::COS2_PI_8,
        t(1e-9),
        "optimal B→A value cos²(π/8) = (1+1/√2)/2",
    ));

    let alternate = evaluate_exact(&by_name("gv_backward_alternate").protocol, &gv)?;
    rows.push(ReproduceRow::within(
        "gv_backward_degeneracy_gap",
        (backward - alternate).abs(),
        0.0,
        t(1e-12),
        "the two intermediate bases perform identically",
    ));

    let twofour = ensemble_of("twofour");
    let two_way = by_name("twofour_two_way");
    rows.push(ReproduceRow::within(
        "twofour_two_way",
        evaluate_exact(&two_way.protocol, &twofour)?,
        1.0,
        t(1e-12),
        "perfect with two messages",
    ));
    rows.push(ReproduceRow::within(
        "twofour_two_way_messages",
        two_way.protocol.validate()?.messages as f64,
        2.0,
        0.5,
        "exactly two rounds of classical communication",
    ));

    let analyses = oneway_bound_analyses()?;
    for (name, analysis) in [
        ("oneway_bound_gv_backward", &analyses.gv_backward),
        ("oneway_bound_twofour_AB", &analyses.twofour_forward),
        ("oneway_bound_twofour_BA", &analyses.twofour_backward),
    ] {
        rows.push(ReproduceRow::within(
            name,
            analysis.optimizer_value,
            reference::COS2_PI_8,
            t(1e-6),
            "iterative optimizer on the reduction problem",
        ));
    }

    let solution = solve_symmetric_gamma()?;
    rows.push(ReproduceRow::within(
        "domino_p",
        solution.p,
        0.110,
        t(5e-4),
        "rounded reference value (exact: (51+√1953)/864)",
    ));
    rows.push(ReproduceRow::within(
        "domino_q",
        solution.q,
        0.093,
        t(5e-4),
        "rounded reference value (exact: (63+√1953)/1152)",
    ));

    let domino = ensemble_of("domino");
    let domino_value = evaluate_exact(&by_name("domino_oneway").protocol, &domino)?;
    rows.push(ReproduceRow::within(
        "domino_oneway_success",
        domino_value,
        reference::DOMINO_ONEWAY_SUCCESS,
        t(1e-9),
        "protocol value vs closed form (597+11√1953)/1296",
    ));
    rows.push(ReproduceRow::within(
        "domino_oneway_success_rounded",
        domino_value,
        0.836,
        t(5e-4),
        "rounded reference value (8/3)(2p+q)",
    ));
    rows.push(ReproduceRow::exceeds(
        "domino_oneway_error",
        1.0 - domino_value,
        0.16,
        "best one-way strategy errs on more than 16%",
    ));
    // consistency: protocol value equals the subset formula
    let formula = subset_success_probability(&sigma_operators(), &solution.povm)?;
    rows.push(ReproduceRow::within(
        "domino_protocol_equals_formula",
        (domino_value - formula).abs(),
        0.0,
        t(1e-10),
        "sequential protocol value equals (8/3)Σ Tr(σ_k π_k)/8",
    ));

    let a_gs = effective_guess_operators(&domino_row_mixtures(), Party::B)?;
    let guess_report = verify_guess_function_optimality(&solution.gamma, &a_gs)?;
    rows.push(ReproduceRow::within(
        "guess_function_kernel_hits",
        guess_report.kernel_hits as f64,
        8.0,
        0.5,
        format!(
            "{} strictly positive, {} PSD failures over all 27 guess functions",
            guess_report.strictly_positive, guess_report.psd_failures
        )
        .as_str(),
    ));

    let povm_check = validate_povm(solution.povm.effects(), 1e-10)?;
    rows.push(ReproduceRow::at_most(
        "domino_povm_completeness_residual",
        povm_check.max_completeness_residual,
        1e-10,
        "‖Σ π_k − I‖_F for the 8-outcome measurement",
    ));
    let helstrom = check_helstrom_conditions(&ensemble_of("domino-sigma"), &solution.povm, 1e-9)?;
    rows.push(ReproduceRow::within(
        "domino_helstrom_pass",
        if helstrom.pass { 1.0 } else { 0.0 },
        1.0,
        0.5,
        "Helstrom conditions at tolerance 1e-9 on the σ ensemble",
    ));

    rows.push(ReproduceRow::display(
        "two_way_error_bound_prior_work",
        1.9e-8,
        "known two-way error bound from prior analysis; displayed for comparison, \
         not computed by this tool",
    ));

    let overall_pass = rows.iter().all(|r| r.pass);
    Ok(ReproduceReport {
        rows,
        overall_pass,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    })
}

pub fn print_table(report: &ReproduceReport) {
    println!(
        "{:<6} {:<36} {:>22} {:>22} {:>10}",
        "", "quantity", "computed", "expected", "tolerance"
    );
    for row in &report.rows {
        let status = if row.pass { "PASS" } else { "FAIL" };
        let computed = row
            .computed
            .map(|v| format!("{v:.15}"))
            .unwrap_or_else(|| "-".into());
        let expected = match (row.check, row.expected) {
            (Check::Exceeds, Some(v)) => format!("> {v}"),
            (Check::AtMost, Some(v)) => format!("<= {v:e}"),
            (Check::DisplayOnly, Some(v)) => format!("{v:e}"),
            (_, Some(v)) => format!("{v}"),
            (_, None) => "-".into(),
        };
        let tolerance = row
            .tolerance
            .map(|v| format!("{v:e}"))
            .unwrap_or_else(|| "-".into());
        println!(
            "{:<6} {:<36} {:>22} {:>22} {:>10}   {}",
            status, row.name, computed, expected, tolerance, row.note
        );
    }
    println!(
        "\noverall: {}  (v{}, {:.2} s)",
        if report.overall_pass { "PASS" } else { "FAIL" },
        report.tool_version,
        report.wall_clock_seconds
    );
}
