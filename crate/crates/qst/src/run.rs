use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use qst_core::{
    integrate_memory_kernel, sin_law, Basis, ChainSpec, ClosedChain, EnsembleConfig,
    FidelitySeries, IntegratorSettings, OpenEnsemble, ReservoirSpec, TimeGrid,
};

use crate::config::{Mode, ScenarioConfig};
use crate::error::CliError;

/// Column-labelled numeric table; every row has one value per column.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl ResultTable {
    fn from_columns(names: Vec<String>, columns: Vec<Vec<f64>>) -> Self {
        let len = columns[0].len();
        let rows = (0..len)
            .map(|k| columns.iter().map(|c| c[k]).collect())
            .collect();
        ResultTable {
            columns: names,
            rows,
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeakSummary {
    #[serde(rename = "N")]
    pub chains: usize,
    pub peak_fidelity: f64,
    pub time_of_peak: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub mode: Mode,
    pub peak_fidelity: Option<f64>,
    pub time_of_peak: Option<f64>,
    /// Largest |analytic - oracle| fidelity difference (compare mode).
    pub max_deviation: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub sweep: Vec<PeakSummary>,
}

impl Summary {
    fn new(mode: Mode) -> Self {
        Summary {
            mode,
            peak_fidelity: None,
            time_of_peak: None,
            max_deviation: None,
            sweep: Vec::new(),
        }
    }

    fn with_peak(mut self, times: &[f64], values: &[f64]) -> Self {
        let (t, f) = peak(times, values);
        self.peak_fidelity = Some(f);
        self.time_of_peak = Some(t);
        self
    }

    /// One line for the terminal.
    pub fn line(&self) -> String {
        let mut parts = vec![format!(
            "mode={}",
            serde_json::to_value(self.mode).unwrap().as_str().unwrap()
        )];
        if let (Some(f), Some(t)) = (self.peak_fidelity, self.time_of_peak) {
            parts.push(format!("peak_fidelity={f:.9} at t={t:.6}"));
        }
        if let Some(d) = self.max_deviation {
            parts.push(format!("max_deviation={d:.3e}"));
        }
        for s in &self.sweep {
            parts.push(format!(
                "N={}: peak={:.9} at t={:.6}",
                s.chains, s.peak_fidelity, s.time_of_peak
            ));
        }
        parts.join(", ")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub table: ResultTable,
    pub summary: Summary,
}

fn peak(times: &[f64], values: &[f64]) -> (f64, f64) {
    let series = FidelitySeries {
        times: times.to_vec(),
        values: values.to_vec(),
        amplitudes: None,
    };
    series.peak()
}

fn ensemble(config: &ScenarioConfig, chains: usize) -> Result<EnsembleConfig, CliError> {
    Ok(EnsembleConfig::new(
        ChainSpec::with_parameter(config.sites, config.omega0, config.p)?,
        ReservoirSpec::new(config.gamma0, config.lambda)?,
        chains,
    )?)
}

fn analytic(config: &ScenarioConfig, chains: usize, grid: &TimeGrid) -> Result<Vec<f64>, CliError> {
    Ok(OpenEnsemble::new(ensemble(config, chains)?)
        .fidelity_series(grid)
        .values)
}

fn numeric(config: &ScenarioConfig, grid: &TimeGrid) -> Result<Vec<f64>, CliError> {
    let cfg = ensemble(config, config.chains[0])?;
    let limit = IntegratorSettings::max_dt(&cfg);
    if config.dt > limit {
        return Err(CliError::validation(
            "dt",
            format!(
                "dt = {} exceeds the resolution limit {limit:.3e} for this reservoir",
                config.dt
            ),
        ));
    }
    let settings = IntegratorSettings::for_grid(config.t_max, grid.len() - 1, config.dt)?;
    let open = OpenEnsemble::new(cfg);
    let init = open.initial_coefficients(Complex64::new(1.0, 0.0))?;
    let trajectory = integrate_memory_kernel(&cfg, &init, &settings, config.kernel_variant.into())?;
    Ok(trajectory
        .to_basis(Basis::Site, open.basis())
        .end_site_fidelity()?)
}

/// Worker count for sweeps: `QST_THREADS`, or all available cores.
pub fn sweep_threads() -> Result<usize, CliError> {
    match std::env::var("QST_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(CliError::validation(
                "QST_THREADS",
                format!("expected a positive integer, got `{v}`"),
            )),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

pub fn run_scenario(config: &ScenarioConfig) -> Result<RunOutput, CliError> {
    let grid = TimeGrid::linspace(config.t_max, config.num_points)?;
    let times = grid.points().to_vec();
    let names = |cols: &[&str]| cols.iter().map(|c| c.to_string()).collect::<Vec<_>>();
    let summary = Summary::new(config.mode);
    let out = match config.mode {
        Mode::Closed => {
            let chain = ClosedChain::new(ChainSpec::with_parameter(
                config.sites,
                config.omega0,
                config.p,
            )?);
            let fidelity = chain.fidelity_series(&grid).values;
            let law = times.iter().map(|t| sin_law(config.sites, *t)).collect();
            RunOutput {
                summary: summary.with_peak(&times, &fidelity),
                table: ResultTable::from_columns(
                    names(&["t", "fidelity", "sin_law"]),
                    vec![times, fidelity, law],
                ),
            }
        }
        Mode::Open => {
            let fidelity = analytic(config, config.chains[0], &grid)?;
            RunOutput {
                summary: summary.with_peak(&times, &fidelity),
                table: ResultTable::from_columns(names(&["t", "fidelity"]), vec![times, fidelity]),
            }
        }
        Mode::Oracle => {
            let fidelity = numeric(config, &grid)?;
            RunOutput {
                summary: summary.with_peak(&times, &fidelity),
                table: ResultTable::from_columns(
                    names(&["t", "fidelity_numeric"]),
                    vec![times, fidelity],
                ),
            }
        }
        Mode::Compare => {
            let exact = analytic(config, config.chains[0], &grid)?;
            let approx = numeric(config, &grid)?;
            let deviation: Vec<f64> = exact
                .iter()
                .zip(&approx)
                .map(|(a, b)| (a - b).abs())
                .collect();
            let mut summary = summary.with_peak(&times, &exact);
            summary.max_deviation = Some(deviation.iter().fold(0.0, |m, d| m.max(*d)));
            RunOutput {
                summary,
                table: ResultTable::from_columns(
                    names(&[
                        "t",
                        "fidelity_analytic",
                        "fidelity_numeric",
                        "abs_deviation",
                    ]),
                    vec![times, exact, approx, deviation],
                ),
            }
        }
        Mode::Sweep => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(sweep_threads()?)
                .build()
                .map_err(|e| CliError::validation("QST_THREADS", e.to_string()))?;
            // collect() on an indexed parallel iterator keeps input order
            let columns: Vec<Vec<f64>> = pool.install(|| {
                config
                    .chains
                    .par_iter()
                    .map(|&n| analytic(config, n, &grid))
                    .collect::<Result<_, _>>()
            })?;
            let mut summary = summary;
            summary.sweep = config
                .chains
                .iter()
                .zip(&columns)
                .map(|(&n, values)| {
                    let (t, f) = peak(&times, values);
                    PeakSummary {
                        chains: n,
                        peak_fidelity: f,
                        time_of_peak: t,
                    }
                })
                .collect();
            let mut header = vec!["t".to_string()];
            header.extend(config.chains.iter().map(|n| format!("fidelity_N{n}")));
            let mut all = vec![times];
            all.extend(columns);
            RunOutput {
                summary,
                table: ResultTable::from_columns(header, all),
            }
        }
    };
    Ok(out)
}
