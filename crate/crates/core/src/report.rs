//! Output files: iteration CSV, topology snapshots, run report, batch
//! summary and SVG charts.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use crate::constraints::ConstraintReport;
use crate::experiment::{Algorithm, BatchRow, BatchSummary, OracleRow, RunOutput};
use crate::model::{BsState, NetworkState};
use crate::scalar::Scalar;
use crate::scenario::{coverage_audit, CoverageAudit, ScenarioConfig, GENERATOR_IDENTITY};
use crate::sleeping::{convergence_iteration, IterationRecord};

pub const ITERATIONS_HEADER: &str = "iteration,active_bs,ee_bits_per_hz_per_watt,event";

/// Formats `v` with 9 significant digits, plain decimal notation when the
/// magnitude allows it.
pub fn sig9(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let exp = v.abs().log10().floor() as i32;
    if !(-5..9).contains(&exp) {
        return format!("{v:.8e}");
    }
    let decimals = (8 - exp).max(0) as usize;
    let s = format!("{v:.decimals$}");
    // rounding can carry into a new digit (9.99999999995 -> 10.00000000)
    let digits = s.chars().filter(char::is_ascii_digit).collect::<String>();
    let significant = digits.trim_start_matches('0').len();
    if significant > 9 && decimals > 0 {
        let d = decimals - 1;
        return format!("{v:.d$}");
    }
    s
}

pub fn iterations_csv<T: Scalar>(records: &[IterationRecord<T>]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(ITERATIONS_HEADER);
    out.push('\n');
    for r in records {
        let ee = r.ee.to_f64().unwrap_or(f64::NAN);
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.iteration,
            r.active_count,
            sig9(ee),
            r.event
        );
    }
    out
}

#[derive(Serialize)]
struct TopoBs<T> {
    id: usize,
    x: T,
    y: T,
    radius: T,
    state: BsState,
    load: usize,
}

#[derive(Serialize)]
struct TopoUe<T> {
    id: usize,
    x: T,
    y: T,
    serving: Option<usize>,
}

#[derive(Serialize)]
struct Topology<T> {
    base_stations: Vec<TopoBs<T>>,
    user_equipments: Vec<TopoUe<T>>,
    /// `[bs, ue]` pairs.
    links: Vec<(usize, usize)>,
}

pub fn topology_json<T: Scalar>(state: &NetworkState<T>) -> Result<String> {
    let topo = Topology {
        base_stations: state
            .base_stations
            .iter()
            .map(|b| TopoBs {
                id: b.id,
                x: b.position.x,
                y: b.position.y,
                radius: b.radius,
                state: b.state,
                load: state.connections.row_count(b.id),
            })
            .collect(),
        user_equipments: state
            .user_equipments
            .iter()
            .map(|u| TopoUe {
                id: u.id,
                x: u.position.x,
                y: u.position.y,
                serving: state.connections.serving(u.id),
            })
            .collect(),
        links: state.connections.links().collect(),
    };
    Ok(serde_json::to_string_pretty(&topo)?)
}

#[derive(Serialize)]
#[serde(bound = "T: Scalar")]
struct RunReport<'a, T> {
    algorithm: Algorithm,
    seed: u64,
    generator: &'static str,
    constraints: &'a ConstraintReport<T>,
    o1_ee: T,
    o2_active: usize,
    iterations: usize,
    convergence_iteration: usize,
    unserved_after_association: &'a [usize],
    coverage: CoverageAudit<T>,
    config: &'a ScenarioConfig<T>,
}

pub fn run_report_json<T: Scalar>(
    cfg: &ScenarioConfig<T>,
    algorithm: Algorithm,
    out: &RunOutput<T>,
) -> Result<String> {
    let report = RunReport {
        algorithm,
        seed: cfg.seed,
        generator: GENERATOR_IDENTITY,
        constraints: &out.report,
        o1_ee: out.report.o1_ee,
        o2_active: out.report.o2_active,
        iterations: out.records.len().saturating_sub(1),
        convergence_iteration: convergence_iteration(&out.records),
        unserved_after_association: &out.connection.unserved,
        coverage: coverage_audit(&out.initial, cfg.area, 101),
        config: cfg,
    };
    Ok(serde_json::to_string_pretty(&report)?)
}

fn write(dir: &Path, name: &str, body: &str) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, body).with_context(|| format!("writing {}", path.display()))
}

/// Writes every per-run file into `dir`, creating it if needed.
pub fn write_run<T: Scalar>(
    dir: &Path,
    cfg: &ScenarioConfig<T>,
    algorithm: Algorithm,
    out: &RunOutput<T>,
    svg: bool,
) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    write(dir, "iterations.csv", &iterations_csv(&out.records))?;
    write(dir, "topology_initial.json", &topology_json(&out.initial)?)?;
    write(
        dir,
        "topology_connected.json",
        &topology_json(&out.connected)?,
    )?;
    write(
        dir,
        "topology_final.json",
        &topology_json(&out.final_state)?,
    )?;
    write(dir, "report.json", &run_report_json(cfg, algorithm, out)?)?;
    if svg {
        write(dir, "charts.svg", &charts_svg(&out.records))?;
    }
    Ok(())
}

pub fn summary_csv(rows: &[BatchRow]) -> String {
    let mut out = String::from(
        "seed,algorithm,final_active,convergence_iteration,initial_ee,final_ee,unserved,constraints_ok\n",
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.seed,
            r.algorithm.as_str(),
            r.final_active,
            r.convergence_iteration,
            sig9(r.initial_ee),
            sig9(r.final_ee),
            r.unserved,
            r.core_constraints_ok
        );
    }
    out
}

pub fn write_batch(dir: &Path, rows: &[BatchRow], summary: &BatchSummary) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    write(dir, "summary.csv", &summary_csv(rows))?;
    write(dir, "summary.json", &serde_json::to_string_pretty(summary)?)
}

pub fn oracle_csv(rows: &[OracleRow]) -> String {
    let mut out = String::from("instance,served_ues,heuristic,optimum,gap\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.instance, r.served, r.heuristic, r.optimum, r.gap
        );
    }
    out
}

/// Two stacked line charts: active BS count and EE per iteration.
pub fn charts_svg<T: Scalar>(records: &[IterationRecord<T>]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 220.0;
    const PAD: f64 = 44.0;
    let n = records.len().max(2) - 1;
    let xs = |i: usize| PAD + (W - 2.0 * PAD) * i as f64 / n as f64;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{}" viewBox="0 0 {W} {}" font-family="sans-serif" font-size="11">"#,
        2.0 * H,
        2.0 * H
    );
    svg.push_str(r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
    svg.push('\n');

    let series: [(&str, &str, Vec<f64>); 2] = [
        (
            "Active BSs",
            "#1f5fa8",
            records.iter().map(|r| r.active_count as f64).collect(),
        ),
        (
            "EE (bit/s/Hz/W)",
            "#b5442c",
            records
                .iter()
                .map(|r| r.ee.to_f64().unwrap_or(0.0))
                .collect(),
        ),
    ];
    for (panel, (title, colour, values)) in series.iter().enumerate() {
        let top = panel as f64 * H;
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let (lo, hi) = if values.is_empty() {
            (0.0, 1.0)
        } else if hi > lo {
            (lo, hi)
        } else {
            (lo - 1.0, hi + 1.0)
        };
        let ys = |v: f64| top + H - PAD - (H - 2.0 * PAD) * (v - lo) / (hi - lo);
        let _ = writeln!(
            svg,
            r##"<g><text x="{PAD}" y="{:.1}" font-weight="bold">{title}</text><line x1="{PAD}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="#444"/><line x1="{PAD}" y1="{:.1}" x2="{PAD}" y2="{:.1}" stroke="#444"/><text x="4" y="{:.1}">{}</text><text x="4" y="{:.1}">{}</text><text x="{:.1}" y="{:.1}" text-anchor="end">iteration {n}</text></g>"##,
            top + 18.0,
            top + H - PAD,
            W - PAD,
            top + H - PAD,
            top + PAD,
            top + H - PAD,
            top + PAD + 4.0,
            sig9(hi).trim_end_matches('0').trim_end_matches('.'),
            top + H - PAD + 4.0,
            sig9(lo).trim_end_matches('0').trim_end_matches('.'),
            W - PAD,
            top + H - PAD + 16.0,
        );
        let points: Vec<String> = values
            .iter()
            .enumerate()
            .map(|(i, &v)| format!("{:.1},{:.1}", xs(i), ys(v)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#,
            points.join(" ")
        );
    }
    svg.push_str("</svg>\n");
    svg
}
