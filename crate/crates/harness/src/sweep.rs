//! Epsilon sweeps over the finite element oracle.

use std::path::Path;

use gapstress_core::{
    BlowUpFactorVector, InclusionPairGeometry, LameParams, Outer, VectorAuxField, a11_leading, c_diff_leading,
    effective_moduli, grad_u_asymptotic,
};
use gapstress_fem::{
    FunctionalRecord, Oracle, Probe, b_tilde, b1_from_constants, b1_from_ub, b1_star, capacity, cell_moduli,
    constants_from_system, pair_index, solve_cell, solve_full, solve_limit, solve_v_family, u_b,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{GeometryKind, SweepConfig};
use crate::error::{HarnessError, Result};

/// One CSV row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub epsilon: f64,
    pub d: usize,
    pub m: u32,
    pub quantity: String,
    pub value: f64,
    pub mesh_h: f64,
    pub dofs: usize,
}

impl Row {
    /// Index digits embedded in the quantity id, e.g. `a_12_31 -> [1,2,3,1]`.
    pub fn indices(&self) -> Vec<usize> {
        self.quantity.chars().filter_map(|c| c.to_digit(10)).map(|v| v as usize).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let ok_id = !self.quantity.is_empty()
            && self.quantity.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_');
        let problem = if !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            "epsilon outside (0, 1/2)"
        } else if !(self.d == 2 || self.d == 3) {
            "dimension"
        } else if self.m < 2 {
            "convexity order"
        } else if !ok_id {
            "quantity id"
        } else if !self.value.is_finite() {
            "non-finite value"
        } else if !(self.mesh_h > 0.0 && self.mesh_h.is_finite()) {
            "mesh size"
        } else if self.dofs == 0 {
            "dof count"
        } else {
            return Ok(());
        };
        Err(HarnessError::Config(format!("row schema violation ({problem}): {self:?}")))
    }
}

/// A sweep point that could not be computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub epsilon: f64,
    pub mesh_h: f64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<Row>,
    pub failures: Vec<Failure>,
}

impl SweepResult {
    /// `(eps, value)` series of one quantity at one mesh level.
    pub fn series(&self, quantity: &str, mesh_h: f64) -> Vec<(f64, f64)> {
        series(&self.rows, quantity, mesh_h)
    }

    pub fn finest_h(&self) -> Option<f64> {
        self.rows.iter().map(|r| r.mesh_h).min_by(f64::total_cmp)
    }
}

pub fn series(rows: &[Row], quantity: &str, mesh_h: f64) -> Vec<(f64, f64)> {
    rows.iter().filter(|r| r.quantity == quantity && r.mesh_h == mesh_h).map(|r| (r.epsilon, r.value)).collect()
}

/// Touching-limit data shared by every eps of one mesh level.
#[derive(Debug, Clone, Copy)]
struct Limit {
    bstar: [f64; 3],
    cstar: [f64; 3],
    dofs: usize,
}

struct Point<'a> {
    g: &'a InclusionPairGeometry,
    eps: f64,
    h: f64,
    dofs: usize,
    rows: Vec<Row>,
}

impl Point<'_> {
    fn push(&mut self, quantity: impl Into<String>, value: f64) {
        let dofs = self.dofs;
        self.push_with(quantity, value, dofs);
    }

    fn push_with(&mut self, quantity: impl Into<String>, value: f64, dofs: usize) {
        self.rows.push(Row {
            epsilon: self.eps,
            d: self.g.d(),
            m: self.g.m(),
            quantity: quantity.into(),
            value,
            mesh_h: self.h,
            dofs,
        });
    }

    fn finish(self) -> Result<Vec<Row>> {
        if let Some(r) = self.rows.iter().find(|r| !r.value.is_finite()) {
            return Err(HarnessError::Fit(format!("{} is not finite", r.quantity)));
        }
        Ok(self.rows)
    }
}

fn limit_data(cfg: &SweepConfig, p: &LameParams, h: f64) -> Result<Limit> {
    let g = cfg.geometry_at(cfg.sweep.eps[0])?;
    let o = Oracle::touching(&g, p, &cfg.mesh_options(h), cfg.sweep.order)?;
    let preset = cfg.sweep.preset;
    let lim = solve_limit(&o, &move |x| preset.eval(x))?;
    Ok(Limit { bstar: b1_star(&o, &lim)?, cstar: lim.constants[0], dofs: o.n_dofs() })
}

fn pair_point(cfg: &SweepConfig, p: &LameParams, h: f64, eps: f64, limit: Option<&Limit>) -> Result<Vec<Row>> {
    let g = cfg.geometry_at(eps)?;
    let o = Oracle::new(&g, p, &cfg.mesh_options(h), cfg.sweep.order)?;
    let preset = cfg.sweep.preset;
    let phi = move |x: [f64; 2]| preset.eval(x);
    let vf = solve_v_family(&o, &phi)?;
    let a = capacity(&o, &vf)?;
    let bt = b_tilde(&o, &vf)?;
    let c = constants_from_system(&a, &bt)?;
    let full = solve_full(&o, &phi)?;
    let b1 = b1_from_constants(&a, &c);
    let b1ub = b1_from_ub(&o, &vf, &u_b(&vf, &c))?;
    let mut pt = Point { g: &g, eps, h, dofs: o.n_dofs(), rows: Vec::new() };

    for i in 1..=2 {
        for alpha in 1..=3 {
            for j in 1..=2 {
                for beta in 1..=3 {
                    if pair_index(j, beta) >= pair_index(i, alpha) {
                        pt.push(format!("a_{i}{j}_{alpha}{beta}"), a[pair_index(i, alpha)][pair_index(j, beta)]);
                    }
                }
            }
            pt.push(format!("btilde_{i}_{alpha}"), bt[pair_index(i, alpha)]);
            pt.push(format!("c_{i}_{alpha}"), c[i - 1][alpha - 1]);
            pt.push(format!("cfull_{i}_{alpha}"), full.constants[i - 1][alpha - 1]);
        }
    }
    for alpha in 1..=3 {
        if let Ok(lead) = a11_leading(p, &g, alpha) {
            pt.push(format!("pred_a_11_{alpha}{alpha}"), lead.value());
        }
        pt.push(format!("cdiff_{alpha}"), c[0][alpha - 1] - c[1][alpha - 1]);
        pt.push(format!("b1_{alpha}"), b1[alpha - 1]);
        pt.push(format!("b1ub_{alpha}"), b1ub[alpha - 1]);
    }
    let scale = full.constants.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    let gap = (0..2)
        .flat_map(|i| (0..3).map(move |k| (i, k)))
        .fold(0.0f64, |m, (i, k)| m.max((c[i][k] - full.constants[i][k]).abs()));
    pt.push("c_path_gap", if scale > 0.0 { gap / scale } else { gap });

    let probe = Probe::new(o.space());
    let center = probe.gradients(&full.u, &[[0.0, 0.0]])?[0];
    for r in 0..2 {
        for col in 0..2 {
            pt.push(format!("grad_center_{}{}", r + 1, col + 1), center.get(r, col));
        }
    }
    if let Some(lim) = limit {
        let bstar = BlowUpFactorVector::new(2, lim.bstar.to_vec())?;
        let pred = grad_u_asymptotic(p, &g, &bstar, &[0.0, 0.0])?;
        for r in 0..2 {
            for col in 0..2 {
                pt.push(format!("pred_grad_center_{}{}", r + 1, col + 1), pred.get(r, col));
            }
        }
        for (k, v) in c_diff_leading(p, &g, &bstar)?.into_iter().enumerate() {
            if let Some(v) = v {
                pt.push(format!("pred_cdiff_{}", k + 1), v);
            }
        }
        for k in 0..3 {
            pt.push_with(format!("b1star_{}", k + 1), lim.bstar[k], lim.dofs);
            pt.push_with(format!("cstar_{}", k + 1), lim.cstar[k], lim.dofs);
        }
    }

    let aux = VectorAuxField::new(*p, g.clone(), 1)?;
    let pts: Vec<[f64; 2]> = g.narrow_region_samples(cfg.sweep.probes).into_iter().map(|v| [v[0], v[1]]).collect();
    let (mut diff, mut mag) = (0.0f64, 0.0f64);
    for (q, gv) in pts.iter().zip(probe.gradients(vf.get(1, 1), &pts)?) {
        diff = diff.max(gv.sub(&aux.gradient(q)?).frobenius());
        mag = mag.max(gv.frobenius());
    }
    pt.push("probe_grad_v11_max", mag);
    pt.push("probe_grad_diff_v11_max", diff);
    pt.push("residual", vf.residual.max(full.residual));
    pt.push("energy", o.energy(&full.u, &full.u)?);
    pt.finish()
}

fn cell_point(cfg: &SweepConfig, p: &LameParams, h: f64, eps: f64) -> Result<Vec<Row>> {
    let g = cfg.geometry_at(eps)?;
    let o = Oracle::new(&g, p, &cfg.mesh_options(h), cfg.sweep.order)?;
    let cell = solve_cell(&o)?;
    let (mu_star, e_star) = cell_moduli(&o, &cell)?;
    let Outer::Rect { half_width, half_height } = g.outer() else {
        return Err(HarnessError::Config("cell sweep needs a rectangular cell".into()));
    };
    let lead = effective_moduli(p, g.m(), half_width, half_height, g.kappa(), eps)?;
    let mut pt = Point { g: &g, eps, h, dofs: o.n_dofs(), rows: Vec::new() };
    pt.push("mu_star", mu_star);
    pt.push("e_star", e_star);
    pt.push("pred_mu_star", lead.mu_star);
    pt.push("pred_e_star", lead.e_star);
    pt.push("cell_energy_1", cell.energies[0]);
    pt.push("cell_energy_2", cell.energies[1]);
    pt.push("residual", cell.residual);
    pt.finish()
}

/// Runs every `(mesh level, eps)` pair on `jobs` threads (all cores when
/// `None`). Failures are recorded per point and the sweep goes on. Rows come
/// out ordered by decreasing eps, then decreasing mesh size.
pub fn run_sweep(cfg: &SweepConfig, jobs: Option<usize>) -> Result<SweepResult> {
    cfg.validate()?;
    let p = cfg.params()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))?;
    let mut levels = cfg.sweep.h_levels.clone();
    levels.sort_by(|a, b| b.total_cmp(a));
    levels.dedup();
    let cell = cfg.geometry.kind == GeometryKind::Cell;

    pool.install(|| {
        let limits: Vec<Option<std::result::Result<Limit, String>>> = levels
            .par_iter()
            .map(|&h| (!cell).then(|| limit_data(cfg, &p, h).map_err(|e| e.to_string())))
            .collect();
        let items: Vec<(usize, f64)> =
            (0..levels.len()).flat_map(|l| cfg.sweep.eps.iter().map(move |&e| (l, e))).collect();
        let outcomes: Vec<Result<Vec<Row>>> = items
            .par_iter()
            .map(|&(l, eps)| {
                let h = levels[l];
                if cell {
                    cell_point(cfg, &p, h, eps)
                } else {
                    let lim = limits[l].as_ref().and_then(|r| r.as_ref().ok());
                    pair_point(cfg, &p, h, eps, lim)
                }
            })
            .collect();

        let mut out = SweepResult::default();
        for (l, lim) in limits.iter().enumerate() {
            if let Some(Err(msg)) = lim {
                out.failures.push(Failure { epsilon: cfg.sweep.eps[0], mesh_h: levels[l], message: format!("touching limit: {msg}") });
            }
        }
        for (&(l, eps), res) in items.iter().zip(outcomes) {
            match res {
                Ok(rows) => out.rows.extend(rows),
                Err(e) => out.failures.push(Failure { epsilon: eps, mesh_h: levels[l], message: e.to_string() }),
            }
        }
        out.rows.sort_by(|a, b| b.epsilon.total_cmp(&a.epsilon).then(b.mesh_h.total_cmp(&a.mesh_h)));
        Ok(out)
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Metadata {
    pub config_hash: String,
    pub config: SweepConfig,
    /// Workspace version shared by all crates.
    pub version: String,
    pub n_rows: usize,
    pub failures: Vec<Failure>,
}

pub const ROWS_FILE: &str = "rows.csv";
pub const METADATA_FILE: &str = "metadata.json";
pub const FUNCTIONALS_FILE: &str = "functionals.json";

pub fn write_rows_csv<W: std::io::Write>(rows: &[Row], w: W) -> Result<()> {
    for r in rows {
        r.validate()?;
    }
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_rows(dir: &Path) -> Result<Vec<Row>> {
    let path = dir.join(ROWS_FILE);
    if !path.is_file() {
        return Err(HarnessError::Missing(path.display().to_string()));
    }
    let mut rd = csv::Reader::from_path(path)?;
    let rows = rd.deserialize().collect::<std::result::Result<Vec<Row>, _>>()?;
    Ok(rows)
}

pub fn read_metadata(dir: &Path) -> Result<Metadata> {
    let path = dir.join(METADATA_FILE);
    if !path.is_file() {
        return Err(HarnessError::Missing(path.display().to_string()));
    }
    Ok(serde_json::from_reader(std::fs::File::open(path)?)?)
}

/// Writes rows, functional records and metadata into `dir`.
pub fn write_outputs(cfg: &SweepConfig, result: &SweepResult, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    write_rows_csv(&result.rows, std::fs::File::create(dir.join(ROWS_FILE))?)?;
    let records: Vec<FunctionalRecord> = result
        .rows
        .iter()
        .map(|r| FunctionalRecord {
            epsilon: r.epsilon,
            quantity: r.quantity.clone(),
            indices: r.indices(),
            value: r.value,
            mesh_h: r.mesh_h,
            dofs: r.dofs,
        })
        .collect();
    gapstress_fem::io::write_records_json(&records, std::fs::File::create(dir.join(FUNCTIONALS_FILE))?)?;
    let meta = Metadata {
        config_hash: cfg.hash(),
        config: cfg.clone(),
        version: env!("CARGO_PKG_VERSION").into(),
        n_rows: result.rows.len(),
        failures: result.failures.clone(),
    };
    serde_json::to_writer_pretty(std::fs::File::create(dir.join(METADATA_FILE))?, &meta)?;
    Ok(())
}
