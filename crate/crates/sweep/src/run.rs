//! Grid execution: Hamiltonian → Liouvillian → steady state → observables at
//! every point, on a worker pool, collected back in grid order.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use blockade::dynamics::{
    build_liouvillian, relative_residual, steady_state_direct_with, steady_state_evolve, DirectOptions,
    EvolveOptions,
};
use blockade::observables::ObservableSet;
use blockade::{build_hamiltonian, Error, ModelParams, Param, Result, Truncation};
use rayon::prelude::*;

use crate::config::{Method, SolverProfile, SweepConfig};

pub const THREADS_ENV: &str = "BLOCKADE_THREADS";

/// The observable columns, in CSV order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Column {
    NA,
    NB,
    NC,
    G2A,
    G2B,
    G2C,
    G3A,
}

impl Column {
    pub const ALL: [Column; 7] = [Column::NA, Column::NB, Column::NC, Column::G2A, Column::G2B, Column::G2C, Column::G3A];

    pub fn name(self) -> &'static str {
        match self {
            Column::NA => "N_a",
            Column::NB => "N_b",
            Column::NC => "N_c",
            Column::G2A => "g2_a",
            Column::G2B => "g2_b",
            Column::G2C => "g2_c",
            Column::G3A => "g3_a",
        }
    }

    pub fn value(self, obs: &ObservableSet) -> Option<f64> {
        match self {
            Column::NA => Some(obs.n_a),
            Column::NB => Some(obs.n_b),
            Column::NC => Some(obs.n_c),
            Column::G2A => obs.g2_a,
            Column::G2B => obs.g2_b,
            Column::G2C => obs.g2_c,
            Column::G3A => obs.g3_a,
        }
    }
}

impl fmt::Display for Column {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Column {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Column::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Plot(format!("unknown column {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointOutcome {
    pub observables: ObservableSet,
    /// `‖L vec ρ‖/‖L‖_F`
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct SweepRecord {
    pub index: usize,
    pub coords: Vec<f64>,
    pub params: ModelParams,
    pub truncation: Truncation,
    pub wall_time: Duration,
    /// `Err` carries the failure diagnostic; such records are never
    /// reported as data.
    pub outcome: std::result::Result<PointOutcome, String>,
}

impl SweepRecord {
    pub fn failed(&self) -> bool {
        self.outcome.is_err()
    }

    pub fn observables(&self) -> Option<&ObservableSet> {
        self.outcome.as_ref().ok().map(|o| &o.observables)
    }

    pub fn value(&self, column: Column) -> Option<f64> {
        self.observables().and_then(|o| column.value(o))
    }
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub name: Option<String>,
    pub axes: Vec<Param>,
    pub records: Vec<SweepRecord>,
}

impl SweepResult {
    pub fn failed_indices(&self) -> Vec<usize> {
        self.records.iter().filter(|r| r.failed()).map(|r| r.index).collect()
    }
}

/// Solves one parameter point with the given profile.
pub fn solve_point(params: &ModelParams, solver: &SolverProfile) -> Result<PointOutcome> {
    let mut params = *params;
    params.truncation = solver.truncation;
    params.validate()?;
    let space = params.truncation.space()?;
    let h = build_hamiltonian(&space, &params)?;
    let l = build_liouvillian(&space, &h, &params)?;
    let (rho, residual) = match solver.method {
        Method::Direct => {
            let opts = DirectOptions { residual_tolerance: solver.tolerance, ..Default::default() };
            let ss = steady_state_direct_with(&l, opts)?;
            (ss.rho, ss.residual)
        }
        Method::Evolve => {
            let opts = EvolveOptions { tolerance: solver.evolve_rate, t_max: solver.t_max, ..Default::default() };
            let out = steady_state_evolve(&space, &h, &params, &opts)?;
            let residual = relative_residual(&l, &out.rho);
            if !(residual < solver.tolerance) {
                return Err(Error::NoConvergence { iterations: out.steps, residual });
            }
            (out.rho, residual)
        }
    };
    let observables = ObservableSet::compute(&rho, &space)?;
    Ok(PointOutcome { observables, residual })
}

/// Worker count: explicit value, else `BLOCKADE_THREADS`, else the number of
/// available cores.
pub fn resolve_threads(explicit: Option<usize>) -> usize {
    explicit
        .or_else(|| std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse().ok()))
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

pub fn run_sweep(config: &SweepConfig) -> Result<SweepResult> {
    config.validate()?;
    let grid = config.grid();
    let threads = resolve_threads(config.solver.threads);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::param("threads", e.to_string()))?;
    let solve = |(index, coords): (usize, &Vec<f64>)| {
        let params = config.point(coords);
        let start = Instant::now();
        let outcome = solve_point(&params, &config.solver).map_err(|e| e.to_string());
        SweepRecord {
            index,
            coords: coords.clone(),
            params,
            truncation: config.solver.truncation,
            wall_time: start.elapsed(),
            outcome,
        }
    };
    // par_iter().collect() keeps grid order whatever order points finish in
    let records: Vec<SweepRecord> = pool.install(|| grid.par_iter().enumerate().map(solve).collect());
    if records.iter().all(SweepRecord::failed) {
        return Err(Error::AllPointsFailed(records.len()));
    }
    Ok(SweepResult {
        name: config.name.clone(),
        axes: config.axes().iter().map(|a| a.param).collect(),
        records,
    })
}
