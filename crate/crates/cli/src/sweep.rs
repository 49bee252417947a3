//! Lattice simulations over a power grid and the fitted DoF slope.

use std::time::{SystemTime, UNIX_EPOCH};

use gifc_core::bounds::{dof_slope_estimate, SlopeFit};
use gifc_core::lattice::{simulate_symbol_error, LatticeSimConfig, SimulationReport};
use gifc_core::seed::derive_seed;
use gifc_core::GainMatrix;
use serde_json::json;

use crate::config::{ExperimentConfig, Format};
use crate::error::CliError;
use crate::output::{csv, json_num, num, pretty_json};

/// One simulated grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointResult {
    pub power: f64,
    /// `derive_seed(master seed, grid index)`.
    pub seed: u64,
    pub report: SimulationReport,
}

/// Simulates every power of the grid with its own derived seed.
pub fn simulate_grid(h: &GainMatrix, cfg: &ExperimentConfig) -> Result<Vec<PointResult>, CliError> {
    cfg.power_grid
        .iter()
        .enumerate()
        .map(|(i, &power)| {
            let seed = derive_seed(cfg.seed, i as u64);
            let sim = LatticeSimConfig {
                power,
                epsilon: cfg.epsilon,
                trials: cfg.trials,
                seed,
                noise_variance: cfg.noise_variance,
                s_range: cfg.s_range,
            };
            Ok(PointResult { power, seed, report: simulate_symbol_error(h, &sim)? })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub power: f64,
    pub epsilon: f64,
    pub trials: u64,
    pub seed: u64,
    pub cardinality: u64,
    /// Smallest scaled gap over all receivers.
    pub min_gap: f64,
    pub separation_ok: bool,
    /// Worst receiver.
    pub empirical_error: f64,
    pub analytic_error_bound: f64,
    pub sum_rate: f64,
    /// `sum_rate / (½·log₂P)`.
    pub dof_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub seed: u64,
    pub timestamp_unix: u64,
    pub config: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    /// Present with two or more grid points.
    pub fit: Option<SlopeFit>,
    pub metadata: Metadata,
}

pub fn run_sweep(h: &GainMatrix, cfg: &ExperimentConfig) -> Result<SweepResult, CliError> {
    let points = simulate_grid(h, cfg)?;
    let rows: Vec<SweepRow> = points
        .iter()
        .map(|pt| {
            let r = &pt.report;
            let sum_rate = r.sum_rate();
            let half_log = 0.5 * pt.power.log2();
            SweepRow {
                power: pt.power,
                epsilon: cfg.epsilon,
                trials: cfg.trials,
                seed: pt.seed,
                cardinality: r.lattice.cardinality(),
                min_gap: r.users.iter().map(|u| u.separation.min_gap).fold(f64::INFINITY, f64::min),
                separation_ok: r.users.iter().all(|u| u.separation.satisfied),
                empirical_error: r.users.iter().map(|u| u.empirical_error).fold(0.0, f64::max),
                analytic_error_bound: r.analytic_error_bound,
                sum_rate,
                dof_ratio: if half_log > 0.0 { sum_rate / half_log } else { 0.0 },
            }
        })
        .collect();
    let fit = if rows.len() >= 2 {
        Some(dof_slope_estimate(&rows.iter().map(|r| (r.power, r.sum_rate)).collect::<Vec<_>>())?)
    } else {
        None
    };
    let timestamp_unix = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    Ok(SweepResult {
        rows,
        fit,
        metadata: Metadata {
            tool: "gifc",
            version: gifc_core::VERSION,
            seed: cfg.seed,
            timestamp_unix,
            config: cfg.to_toml(),
        },
    })
}

pub const SWEEP_HEADER: &str = "kind,P,epsilon,trials,seed,cardinality,min_gap,p_eps_threshold,separation_ok,\
empirical_error,analytic_error_bound,sum_rate,dof_ratio,dof_slope";

impl SweepResult {
    /// The result file; metadata (which carries a timestamp) is kept out
    /// so reruns are byte-identical.
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => pretty_json(&self.to_json()),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut lines: Vec<String> = self
            .rows
            .iter()
            .map(|r| {
                format!(
                    "point,{},{},{},{},{},{},{},{},{},{},{},{},",
                    num(r.power),
                    num(r.epsilon),
                    r.trials,
                    r.seed,
                    r.cardinality,
                    num(r.min_gap),
                    num(r.power.powf(r.epsilon)),
                    r.separation_ok,
                    num(r.empirical_error),
                    num(r.analytic_error_bound),
                    num(r.sum_rate),
                    num(r.dof_ratio)
                )
            })
            .collect();
        if let Some(fit) = &self.fit {
            lines.push(format!("summary,,,,,,,,,,,,,{}", num(fit.slope)));
        }
        csv(SWEEP_HEADER, lines)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<_> = self
            .rows
            .iter()
            .map(|r| {
                json!({
                    "P": json_num(r.power),
                    "epsilon": json_num(r.epsilon),
                    "trials": r.trials,
                    "seed": r.seed,
                    "cardinality": r.cardinality,
                    "min_gap": json_num(r.min_gap),
                    "p_eps_threshold": json_num(r.power.powf(r.epsilon)),
                    "separation_ok": r.separation_ok,
                    "empirical_error": json_num(r.empirical_error),
                    "analytic_error_bound": json_num(r.analytic_error_bound),
                    "sum_rate": json_num(r.sum_rate),
                    "dof_ratio": json_num(r.dof_ratio),
                })
            })
            .collect();
        let summary = self.fit.as_ref().map(|f| {
            json!({
                "dof_slope": json_num(f.slope),
                "intercept": json_num(f.intercept),
                "residuals": f.residuals.iter().map(|&v| json_num(v)).collect::<Vec<_>>(),
            })
        });
        json!({ "rows": rows, "summary": summary })
    }

    pub fn metadata_json(&self) -> String {
        let m = &self.metadata;
        pretty_json(&json!({
            "tool": m.tool,
            "version": m.version,
            "seed": m.seed,
            "timestamp_unix": m.timestamp_unix,
            "config": m.config,
        }))
    }
}
