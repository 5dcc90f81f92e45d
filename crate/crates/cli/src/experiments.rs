//! The five experiments, returning typed results. Tables are built in `output`.

use holonomy::invariants::{egp, egp_links, zak_phase};
use holonomy::rng::derive_seed;
use holonomy::{
    chern, zak_winding, ChernOptions, ChernResult64, Error, LinkExpectations64, LinkSet, Mode,
    ModelParams64, NoiseModel64, OverlapField64, ShotPlan,
};

use crate::config::ExperimentConfig;
use crate::error::CliError;

/// Cached link expectations for one `(mu, eps1)` point plus the shot plan.
pub struct Measurement {
    pub params: ModelParams64,
    expectations: LinkExpectations64,
    plan: Option<ShotPlan>,
    modulus_floor: f64,
}

impl Measurement {
    pub fn new(cfg: &ExperimentConfig, mu: f64, eps1: f64, set: LinkSet) -> Result<Self, CliError> {
        Self::with_mode(cfg, cfg.mode, mu, eps1, set)
    }

    pub fn with_mode(
        cfg: &ExperimentConfig,
        mode: Mode,
        mu: f64,
        eps1: f64,
        set: LinkSet,
    ) -> Result<Self, CliError> {
        let params = ModelParams64::new(1.0, 1.0, mu)?;
        let noise = NoiseModel64::new(eps1, cfg.eps2_for(eps1))?;
        let expectations = LinkExpectations64::compute(&params, cfg.mesh, mode, &noise, set)?;
        let plan = if mode.is_sampled() {
            let seed = derive_seed(cfg.seed, &[mu.to_bits(), eps1.to_bits()]);
            Some(ShotPlan::new(cfg.shots, seed)?)
        } else {
            None
        };
        Ok(Self {
            params,
            expectations,
            plan,
            modulus_floor: cfg.modulus_floor,
        })
    }

    pub fn field(&self, trial: u32) -> OverlapField64 {
        let mut f = self
            .expectations
            .field(self.plan.as_ref(), u64::from(trial))
            .expect("plan present for sampled modes");
        f.modulus_floor = self.modulus_floor;
        f
    }

    pub fn chern(&self, trial: u32) -> Result<ChernResult64, Error> {
        chern(&self.field(trial), &ChernOptions::default())
    }
}

/// Errors that make a trial count as failed for the exit code.
pub fn is_measurement_failure(e: &Error) -> bool {
    matches!(e, Error::NotQuantized { .. } | Error::DegenerateLink { .. })
}

pub struct ChernTrial {
    pub mu: f64,
    pub trial: u32,
    pub outcome: Result<ChernResult64, Error>,
}

pub fn run_chern(cfg: &ExperimentConfig) -> Result<Vec<ChernTrial>, CliError> {
    let mut out = Vec::new();
    for &mu in &cfg.mu_list {
        let m = Measurement::new(cfg, mu, cfg.eps1, LinkSet::LowerBand)?;
        for trial in 0..cfg.trials {
            out.push(ChernTrial { mu, trial, outcome: m.chern(trial) });
        }
    }
    Ok(out)
}

/// Chern number of the exact oracle on the configured mesh.
pub fn reference_chern(cfg: &ExperimentConfig, mu: f64) -> Result<i64, CliError> {
    let m = Measurement::with_mode(cfg, Mode::ExactOracle, mu, 0.0, LinkSet::LowerBand)?;
    Ok(m.chern(0)?.chern)
}

pub struct MistakeRow {
    pub eps1: f64,
    pub eps2: f64,
    pub mistakes: u32,
    pub trials: u32,
    pub outcomes: Vec<Result<ChernResult64, Error>>,
}

impl MistakeRow {
    pub fn ratio(&self) -> f64 {
        f64::from(self.mistakes) / f64::from(self.trials)
    }
}

/// Counts, per eps1, the trials whose Chern number is wrong or not measurable.
pub fn run_mistake_ratio(cfg: &ExperimentConfig) -> Result<Vec<MistakeRow>, CliError> {
    let mu = cfg.mu();
    let exact = reference_chern(cfg, mu)?;
    let mut rows = Vec::new();
    for eps1 in cfg.eps1_values() {
        let m = Measurement::new(cfg, mu, eps1, LinkSet::LowerBand)?;
        let outcomes: Vec<_> = (0..cfg.trials).map(|t| m.chern(t)).collect();
        let mistakes = outcomes
            .iter()
            .filter(|o| o.as_ref().map_or(true, |r| r.chern != exact))
            .count() as u32;
        rows.push(MistakeRow {
            eps1,
            eps2: cfg.eps2_for(eps1),
            mistakes,
            trials: cfg.trials,
            outcomes,
        });
    }
    Ok(rows)
}

/// `n(k)` map of a single trial.
pub fn run_nfield(cfg: &ExperimentConfig) -> Result<ChernResult64, CliError> {
    let m = Measurement::new(cfg, cfg.mu(), cfg.eps1, LinkSet::LowerBand)?;
    Ok(m.chern(0)?)
}

/// One phase profile: a phase per `ky` row plus its winding.
pub struct PhaseTrial {
    pub trial: u32,
    pub ky: Vec<f64>,
    pub phi: Vec<Result<f64, Error>>,
    pub winding: Result<i64, Error>,
}

impl PhaseTrial {
    fn new(trial: u32, ky: Vec<f64>, phi: Vec<Result<f64, Error>>) -> Self {
        let winding = match phi.iter().find_map(|p| p.as_ref().err()) {
            Some(e) => Err(e.clone()),
            None => {
                let values: Vec<f64> = phi.iter().map(|p| *p.as_ref().unwrap()).collect();
                zak_winding(&values)
            }
        };
        Self { trial, ky, phi, winding }
    }

    /// Phases as plain values, if every row was measured.
    pub fn values(&self) -> Option<Vec<f64>> {
        self.phi.iter().map(|p| p.as_ref().ok().copied()).collect()
    }

    pub fn failed(&self) -> bool {
        self.phi.iter().any(|p| matches!(p, Err(e) if is_measurement_failure(e)))
    }
}

fn ky_values(cfg: &ExperimentConfig) -> Vec<f64> {
    (0..cfg.mesh.n_ky).map(|j| cfg.mesh.ky(j)).collect()
}

pub fn run_zak(cfg: &ExperimentConfig) -> Result<Vec<PhaseTrial>, CliError> {
    let m = Measurement::new(cfg, cfg.mu(), cfg.eps1, LinkSet::LowerBand)?;
    Ok((0..cfg.trials)
        .map(|trial| {
            let u = m.field(trial);
            let phi = (0..cfg.mesh.n_ky).map(|j| zak_phase(&u, j)).collect();
            PhaseTrial::new(trial, ky_values(cfg), phi)
        })
        .collect())
}

pub fn run_egp(cfg: &ExperimentConfig) -> Result<Vec<PhaseTrial>, CliError> {
    let m = Measurement::new(cfg, cfg.mu(), cfg.eps1, LinkSet::TransportX)?;
    Ok((0..cfg.trials)
        .map(|trial| {
            let u = m.field(trial);
            let phi = (0..cfg.mesh.n_ky)
                .map(|j| egp(&egp_links(&u, &m.params, j)?, cfg.beta, cfg.loop_sign))
                .collect();
            PhaseTrial::new(trial, ky_values(cfg), phi)
        })
        .collect())
}
