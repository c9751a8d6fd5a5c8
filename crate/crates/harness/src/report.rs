//! Markdown summary of a results directory.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{HarnessError, Result};
use crate::fit::{estimate_constant, fit_rate, fit_rate_robust};
use crate::sweep::{Row, read_metadata, read_rows, series};
use crate::verify::{CriterionResult, VERIFY_FILE};

pub const REPORT_FILE: &str = "report.md";

/// Exponent and prefactor tolerances for rows compared against a formula.
const EXPONENT_TOL: f64 = 0.05;
const PREFACTOR_TOL: f64 = 0.15;

/// Oracle quantity and the formula it is compared with.
const PAIRS: &[(&str, &str, &str)] = &[
    ("a_11_11", "pred_a_11_11", "capacity, translation 1"),
    ("a_11_22", "pred_a_11_22", "capacity, translation 2"),
    ("a_11_33", "pred_a_11_33", "capacity, rotation"),
    ("cdiff_1", "pred_cdiff_1", "constant difference 1"),
    ("cdiff_2", "pred_cdiff_2", "constant difference 2"),
    ("grad_center_12", "pred_grad_center_12", "gradient (1,2) at the center"),
    ("grad_center_22", "pred_grad_center_22", "gradient (2,2) at the center"),
    ("mu_star", "pred_mu_star", "effective shear modulus"),
    ("e_star", "pred_e_star", "effective extensional modulus"),
];

/// Positive magnitudes when the series has one strict sign.
fn magnitudes(s: &[(f64, f64)]) -> Option<Vec<(f64, f64)>> {
    let pos = s.iter().all(|p| p.1 > 0.0);
    let neg = s.iter().all(|p| p.1 < 0.0);
    (s.len() >= 3 && (pos || neg)).then(|| s.iter().map(|&(e, v)| (e, v.abs())).collect())
}

fn smallest_eps_value(s: &[(f64, f64)]) -> Option<f64> {
    s.iter().min_by(|a, b| a.0.total_cmp(&b.0)).map(|p| p.1)
}

/// Successive differences `|v(eps) - v(eps/2)|` attached to the coarser eps.
pub fn cauchy_differences(s: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut pts = s.to_vec();
    pts.sort_by(|a, b| b.0.total_cmp(&a.0));
    pts.windows(2).map(|w| (w[0].0, (w[0].1 - w[1].1).abs())).collect()
}

fn pass(ok: bool) -> &'static str {
    if ok { "pass" } else { "FAIL" }
}

fn comparison_table(rows: &[Row], h: f64, out: &mut String) {
    out.push_str("| quantity | law | fitted exponent | expected exponent | prefactor ratio | result |\n");
    out.push_str("|---|---|---|---|---|---|\n");
    for &(q, pred, label) in PAIRS {
        let (Some(sq), Some(sp)) = (magnitudes(&series(rows, q, h)), magnitudes(&series(rows, pred, h))) else {
            continue;
        };
        let (Ok(fq), Ok(fp)) = (fit_rate_robust(&sq), fit_rate(&sp)) else {
            continue;
        };
        let ratio = smallest_eps_value(&sq).unwrap() / smallest_eps_value(&sp).unwrap();
        let ok = (fq.exponent - fp.exponent).abs() <= EXPONENT_TOL && (ratio - 1.0).abs() <= PREFACTOR_TOL;
        let _ = writeln!(
            out,
            "| {q} ({label}) | power | {:.4} ± {:.3} | {:.4} | {ratio:.4} | {} |",
            fq.exponent,
            fq.half_width,
            fp.exponent,
            pass(ok)
        );
    }
    // components that vanish by symmetry carry only solver noise
    let scale = ["b1_1", "b1_2"].iter().flat_map(|q| series(rows, q, h)).fold(0.0f64, |m, p| m.max(p.1.abs()));
    for q in ["b1_1", "b1_2"] {
        let s = series(rows, q, h);
        if s.iter().all(|p| p.1.abs() <= 1e-6 * scale) {
            continue;
        }
        let diffs = cauchy_differences(&s);
        if let Some(d) = magnitudes(&diffs).and_then(|d| fit_rate(&d).ok()) {
            let _ = writeln!(out, "| {q} (Cauchy differences) | decay | {:.4} | >= 0.4 | - | {} |", d.exponent, pass(d.exponent >= 0.4));
        }
    }
    let gaps = series(rows, "c_path_gap", h);
    if !gaps.is_empty() {
        let worst = gaps.iter().fold(0.0f64, |m, p| m.max(p.1));
        let _ = writeln!(out, "| c_path_gap (system vs direct constants) | identity | - | - | {worst:.2e} | {} |", pass(worst <= 1e-8));
    }
}

fn constant_section(rows: &[Row], h: f64, out: &mut String) {
    for (q, pred) in [("a_11_11", "pred_a_11_11"), ("mu_star", "pred_mu_star")] {
        let s = series(rows, q, h);
        let sp = series(rows, pred, h);
        if s.len() < 3 || sp.len() != s.len() {
            continue;
        }
        let lead = |e: f64| sp.iter().find(|p| p.0 == e).map(|p| p.1).unwrap_or(f64::NAN);
        if let Ok(c) = estimate_constant(&s, lead) {
            let trend = if c.trend_growing { "growing (check the law)" } else { "not growing" };
            let _ = writeln!(out, "- {q} minus leading term: constant {:.4}, residual trend {trend}", c.constant);
        }
    }
}

/// Builds the report text for `dir`. Errors when no sweep output is there.
pub fn render(dir: &Path) -> Result<String> {
    let rows = read_rows(dir)?;
    if rows.is_empty() {
        return Err(HarnessError::Missing(format!("{} has no rows", dir.display())));
    }
    let mut out = String::from("# Sweep report\n\n");
    if let Ok(meta) = read_metadata(dir) {
        let _ = writeln!(out, "config hash `{}`, version {}, {} rows\n", meta.config_hash, meta.version, meta.n_rows);
        for f in &meta.failures {
            let _ = writeln!(out, "- failed point eps={} h={}: {}", f.epsilon, f.mesh_h, f.message);
        }
        if !meta.failures.is_empty() {
            out.push('\n');
        }
    }
    let mut levels: Vec<f64> = rows.iter().map(|r| r.mesh_h).collect();
    levels.sort_by(|a, b| b.total_cmp(a));
    levels.dedup();
    for &h in &levels {
        let _ = writeln!(out, "## Mesh size {h}\n");
        comparison_table(&rows, h, &mut out);
        out.push('\n');
        constant_section(&rows, h, &mut out);
        out.push('\n');
    }
    // verify writes each sweep one level below its own output
    let verify = [Some(dir), dir.parent()].into_iter().flatten().map(|d| d.join(VERIFY_FILE)).find(|p| p.is_file());
    if let Some(verify) = verify {
        let results: Vec<CriterionResult> = serde_json::from_reader(std::fs::File::open(verify)?)?;
        out.push_str("## Acceptance criteria\n\n");
        for r in &results {
            let _ = writeln!(out, "- {}", r.line());
        }
    }
    Ok(out)
}

/// Renders and writes `report.md`, returning the text.
pub fn write_report(dir: &Path) -> Result<String> {
    let text = render(dir)?;
    std::fs::write(dir.join(REPORT_FILE), &text)?;
    Ok(text)
}
