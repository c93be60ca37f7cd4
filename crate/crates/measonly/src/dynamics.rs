//! Trajectory evolution and ensemble averaging.
//!
//! A *layer* applies `ring` measurements drawn independently from an
//! [`EnsembleSpec`]. A trajectory starts from the all-Z product state,
//! equilibrates for a fixed number of layers, then averages observables over
//! a measurement window. Every trajectory owns a counter-derived RNG stream,
//! so ensemble results depend only on the master seed and the trajectory
//! count — never on thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensemble::{EnsembleSpec, ProbPath, RangeDist};
use crate::error::{Error, Result};
use crate::scaling::SweepSeries;
use crate::stabilizer::{Region, StabilizerState};

/// Equilibration layers per site used when a run is built from defaults.
pub const DEFAULT_EQUILIBRATE_FACTOR: usize = 4;
/// Measurement-window layers per site used when a run is built from defaults.
pub const DEFAULT_MEASURE_FACTOR: usize = 2;
/// Default number of trajectories in an ensemble average.
pub const DEFAULT_TRAJECTORIES: usize = 100;
/// Default arc fraction for the tripartite observable (arcs of length L/4).
pub const DEFAULT_I3_DIVISOR: usize = 4;
/// Default number of ring translations averaged into the entropy profile.
pub const DEFAULT_PROFILE_TRANSLATIONS: usize = 4;

/// Observables recorded during the measurement window of a trajectory.
///
/// The steady half-chain entropy is always recorded; these flags enable the
/// optional (more expensive) diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    /// Half-chain entropy after every layer, including the initial state.
    HalfChainSeries,
    /// Steady entanglement entropy of arcs of every length 1..=L/2, averaged
    /// over the window and over ring translations.
    EntropyProfile,
    /// Steady mutual information between two antipodal arcs of length L/8.
    MutualInfoAntipodal,
    /// Steady tripartite information of three consecutive arcs (length
    /// L/divisor each).
    TripartiteI3,
}

/// Full description of one ensemble-averaged run at a single parameter point.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub spec: EnsembleSpec,
    /// Layers applied before observables are recorded.
    pub steps_equilibrate: usize,
    /// Layers in the averaging window; must be positive.
    pub steps_measure: usize,
    pub trajectories: usize,
    pub master_seed: u64,
    pub observables: Vec<Observable>,
    /// Arc length divisor for [`Observable::TripartiteI3`]; arcs have length
    /// `ring / i3_divisor`.
    pub i3_divisor: usize,
    /// Translations averaged into [`Observable::EntropyProfile`].
    pub profile_translations: usize,
}

impl RunConfig {
    /// Defaults scaled to the ring size: 4L equilibration layers, a 2L
    /// measurement window, and 100 trajectories. No optional observables.
    pub fn new(spec: EnsembleSpec, master_seed: u64) -> Self {
        let ring = spec.ring();
        RunConfig {
            spec,
            steps_equilibrate: DEFAULT_EQUILIBRATE_FACTOR * ring,
            steps_measure: DEFAULT_MEASURE_FACTOR * ring,
            trajectories: DEFAULT_TRAJECTORIES,
            master_seed,
            observables: Vec::new(),
            i3_divisor: DEFAULT_I3_DIVISOR,
            profile_translations: DEFAULT_PROFILE_TRANSLATIONS,
        }
    }

    pub fn wants(&self, obs: Observable) -> bool {
        self.observables.contains(&obs)
    }

    pub fn validate(&self) -> Result<()> {
        let ring = self.spec.ring();
        if self.steps_measure == 0 {
            return Err(Error::Config("steps_measure must be positive".into()));
        }
        if self.trajectories == 0 {
            return Err(Error::Config("trajectories must be positive".into()));
        }
        if self.wants(Observable::MutualInfoAntipodal) && ring % 8 != 0 {
            return Err(Error::Config(format!(
                "antipodal mutual information uses arcs of length ring/8; \
                 ring {ring} is not divisible by 8"
            )));
        }
        if self.wants(Observable::TripartiteI3) {
            if self.i3_divisor < 3 {
                return Err(Error::Config(format!(
                    "tripartite arcs need i3_divisor >= 3, got {}",
                    self.i3_divisor
                )));
            }
            if ring % self.i3_divisor != 0 {
                return Err(Error::Config(format!(
                    "tripartite arcs of length ring/{} need ring {ring} \
                     divisible by {}",
                    self.i3_divisor, self.i3_divisor
                )));
            }
        }
        if self.wants(Observable::EntropyProfile) {
            if self.profile_translations == 0 {
                return Err(Error::Config(
                    "profile_translations must be positive".into(),
                ));
            }
            if ring % self.profile_translations != 0 {
                return Err(Error::Config(format!(
                    "profile translation offsets need ring {ring} divisible \
                     by profile_translations {}",
                    self.profile_translations
                )));
            }
        }
        Ok(())
    }
}

/// Observables of a single trajectory. Steady values are means over the
/// final `steps_measure` layers.
#[derive(Debug, Clone, Serialize)]
pub struct TrajectoryRecord {
    pub seed: u64,
    /// Half-chain entropy after each layer, starting with the initial state
    /// (length `steps_equilibrate + steps_measure + 1`). Present only when
    /// [`Observable::HalfChainSeries`] was requested.
    pub series: Option<Vec<f64>>,
    pub steady_half_chain: f64,
    /// Steady arc entropies for arc lengths 1..=L/2, translation-averaged.
    pub profile: Option<Vec<f64>>,
    pub steady_mutual_info: Option<f64>,
    pub steady_tripartite: Option<f64>,
}

/// Mean and standard error of one scalar over trajectories.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalarStats {
    pub mean: f64,
    /// Sample standard deviation over sqrt(n); zero when n < 2.
    pub std_error: f64,
    pub n: usize,
}

/// Pointwise trajectory statistics of a curve (a time series or an entropy
/// profile); `x` carries the layer index or the arc length.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesStats {
    pub x: Vec<f64>,
    pub mean: Vec<f64>,
    pub std_error: Vec<f64>,
}

/// Trajectory-averaged observables of one run.
#[derive(Debug, Clone, Serialize)]
pub struct EnsembleStats {
    pub ring: usize,
    pub trajectories: usize,
    pub half_chain: ScalarStats,
    pub series: Option<SeriesStats>,
    pub profile: Option<SeriesStats>,
    pub mutual_info: Option<ScalarStats>,
    pub tripartite: Option<ScalarStats>,
}

/// Stateless per-index stream seed: a 64-bit finalizer over the master seed
/// and the index, so any subset of trajectories can be reproduced without
/// generating the others.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(index.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One layer: `ring` independent draws, measured in draw order.
fn apply_layer(
    state: &mut StabilizerState,
    spec: &EnsembleSpec,
    rng: &mut ChaCha8Rng,
) -> Result<()> {
    for _ in 0..spec.ring() {
        let op = spec.sample(rng);
        state.measure(&op)?;
    }
    Ok(())
}

/// Evolve one trajectory with its own RNG stream and record the configured
/// observables.
pub fn run_trajectory(config: &RunConfig, seed: u64) -> Result<TrajectoryRecord> {
    let ring = config.spec.ring();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = StabilizerState::product_state(ring)?;
    let half = Region::arc(ring, 0, ring / 2)?;

    let mi_regions = if config.wants(Observable::MutualInfoAntipodal) {
        let arc = ring / 8;
        Some((Region::arc(ring, 0, arc)?, Region::arc(ring, ring / 2, arc)?))
    } else {
        None
    };
    let i3_regions = if config.wants(Observable::TripartiteI3) {
        let arc = ring / config.i3_divisor;
        Some((
            Region::arc(ring, 0, arc)?,
            Region::arc(ring, arc, arc)?,
            Region::arc(ring, 2 * arc, arc)?,
        ))
    } else {
        None
    };
    // profile_regions[len - 1] holds the translated copies of the length-len arc
    let profile_regions = if config.wants(Observable::EntropyProfile) {
        let step = ring / config.profile_translations;
        let mut all = Vec::with_capacity(ring / 2);
        for len in 1..=ring / 2 {
            let mut row = Vec::with_capacity(config.profile_translations);
            for k in 0..config.profile_translations {
                row.push(Region::arc(ring, k * step, len)?);
            }
            all.push(row);
        }
        Some(all)
    } else {
        None
    };

    let mut series = if config.wants(Observable::HalfChainSeries) {
        let mut s = Vec::with_capacity(config.steps_equilibrate + config.steps_measure + 1);
        s.push(state.entanglement_entropy(&half)? as f64);
        Some(s)
    } else {
        None
    };

    for _ in 0..config.steps_equilibrate {
        apply_layer(&mut state, &config.spec, &mut rng)?;
        if let Some(s) = series.as_mut() {
            s.push(state.entanglement_entropy(&half)? as f64);
        }
    }

    let mut acc_half = 0.0;
    let mut acc_mi = 0.0;
    let mut acc_i3 = 0.0;
    let mut acc_profile = vec![0.0; profile_regions.as_ref().map_or(0, Vec::len)];
    for _ in 0..config.steps_measure {
        apply_layer(&mut state, &config.spec, &mut rng)?;
        let s_half = state.entanglement_entropy(&half)? as f64;
        if let Some(s) = series.as_mut() {
            s.push(s_half);
        }
        acc_half += s_half;
        if let Some((a, b)) = &mi_regions {
            acc_mi += state.mutual_information(a, b)? as f64;
        }
        if let Some((a, b, c)) = &i3_regions {
            acc_i3 += state.tripartite_information(a, b, c)? as f64;
        }
        if let Some(rows) = &profile_regions {
            for (len_idx, row) in rows.iter().enumerate() {
                for region in row {
                    acc_profile[len_idx] += state.entanglement_entropy(region)? as f64;
                }
            }
        }
    }

    let window = config.steps_measure as f64;
    Ok(TrajectoryRecord {
        seed,
        series,
        steady_half_chain: acc_half / window,
        profile: profile_regions.map(|rows| {
            acc_profile
                .iter()
                .zip(&rows)
                .map(|(sum, row)| sum / (window * row.len() as f64))
                .collect()
        }),
        steady_mutual_info: mi_regions.map(|_| acc_mi / window),
        steady_tripartite: i3_regions.map(|_| acc_i3 / window),
    })
}

fn scalar_stats(values: &[f64]) -> ScalarStats {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let std_error = if n < 2 {
        0.0
    } else {
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
        (var / n as f64).sqrt()
    };
    ScalarStats { mean, std_error, n }
}

/// Pointwise stats over per-trajectory curves of identical length.
fn curve_stats(x: Vec<f64>, curves: Vec<&Vec<f64>>) -> SeriesStats {
    let cols = x.len();
    let mut mean = Vec::with_capacity(cols);
    let mut std_error = Vec::with_capacity(cols);
    let mut column = Vec::with_capacity(curves.len());
    for j in 0..cols {
        column.clear();
        column.extend(curves.iter().map(|c| c[j]));
        let s = scalar_stats(&column);
        mean.push(s.mean);
        std_error.push(s.std_error);
    }
    SeriesStats { x, mean, std_error }
}

/// Run all trajectories (in parallel when a rayon pool provides workers) and
/// reduce to trajectory means with standard errors. The reduction is
/// performed in trajectory order, so the result is bit-identical for any
/// worker count.
pub fn run_ensemble_average(config: &RunConfig) -> Result<EnsembleStats> {
    config.validate()?;
    let records: Vec<TrajectoryRecord> = (0..config.trajectories)
        .into_par_iter()
        .map(|t| run_trajectory(config, derive_seed(config.master_seed, t as u64)))
        .collect::<Result<Vec<_>>>()?;
    Ok(reduce_records(config, &records))
}

fn reduce_records(config: &RunConfig, records: &[TrajectoryRecord]) -> EnsembleStats {
    let ring = config.spec.ring();
    let half_values: Vec<f64> = records.iter().map(|r| r.steady_half_chain).collect();

    let series = records[0].series.as_ref().map(|first| {
        let x = (0..first.len()).map(|t| t as f64).collect();
        curve_stats(x, records.iter().map(|r| r.series.as_ref().unwrap()).collect())
    });
    let profile = records[0].profile.as_ref().map(|first| {
        let x = (1..=first.len()).map(|l| l as f64).collect();
        curve_stats(x, records.iter().map(|r| r.profile.as_ref().unwrap()).collect())
    });
    let mutual_info = records[0].steady_mutual_info.map(|_| {
        scalar_stats(&records.iter().map(|r| r.steady_mutual_info.unwrap()).collect::<Vec<_>>())
    });
    let tripartite = records[0].steady_tripartite.map(|_| {
        scalar_stats(&records.iter().map(|r| r.steady_tripartite.unwrap()).collect::<Vec<_>>())
    });

    EnsembleStats {
        ring,
        trajectories: records.len(),
        half_chain: scalar_stats(&half_values),
        series,
        profile,
        mutual_info,
        tripartite,
    }
}

/// A one-parameter family of ensembles: the tuning path fixes the letter
/// probabilities, the template fixes everything else except the ring size.
#[derive(Debug, Clone, PartialEq)]
pub enum EnsembleTemplate {
    /// Independent letters at each supported site.
    Factorizable { range: RangeDist, path: ProbPath },
    /// Uniform single-letter strings of a fixed range.
    Xyz { range: usize, path: ProbPath },
}

impl EnsembleTemplate {
    /// Concrete ensemble at path parameter `param` on a ring of `ring` sites.
    pub fn spec_at(&self, param: f64, ring: usize) -> Result<EnsembleSpec> {
        match self {
            EnsembleTemplate::Factorizable { range, path } => {
                EnsembleSpec::factorizable(ring, path.probs_at(param)?, range.clone())
            }
            EnsembleTemplate::Xyz { range, path } => {
                EnsembleSpec::xyz(ring, path.probs_at(param)?, *range)
            }
        }
    }

    pub fn path(&self) -> &ProbPath {
        match self {
            EnsembleTemplate::Factorizable { path, .. } | EnsembleTemplate::Xyz { path, .. } => {
                path
            }
        }
    }
}

/// A grid of ensemble-averaged runs over path parameters and ring sizes.
#[derive(Debug, Clone)]
pub struct SweepPlan {
    pub template: EnsembleTemplate,
    pub params: Vec<f64>,
    pub sizes: Vec<usize>,
    pub trajectories: usize,
    /// Equilibration layers = factor * ring.
    pub equilibrate_factor: usize,
    /// Measurement-window layers = factor * ring; must be positive.
    pub measure_factor: usize,
    pub observables: Vec<Observable>,
    pub master_seed: u64,
    pub i3_divisor: usize,
}

impl SweepPlan {
    /// Defaults: 100 trajectories, 4L/2L layer schedule, antipodal mutual
    /// information as the recorded observable.
    pub fn new(
        template: EnsembleTemplate,
        params: Vec<f64>,
        sizes: Vec<usize>,
        master_seed: u64,
    ) -> Self {
        SweepPlan {
            template,
            params,
            sizes,
            trajectories: DEFAULT_TRAJECTORIES,
            equilibrate_factor: DEFAULT_EQUILIBRATE_FACTOR,
            measure_factor: DEFAULT_MEASURE_FACTOR,
            observables: vec![Observable::MutualInfoAntipodal],
            master_seed,
            i3_divisor: DEFAULT_I3_DIVISOR,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.params.is_empty() {
            return Err(Error::Config("sweep needs at least one parameter value".into()));
        }
        if self.sizes.is_empty() {
            return Err(Error::Config("sweep needs at least one ring size".into()));
        }
        if self.measure_factor == 0 {
            return Err(Error::Config("measure_factor must be positive".into()));
        }
        if self.trajectories == 0 {
            return Err(Error::Config("trajectories must be positive".into()));
        }
        Ok(())
    }
}

/// One sweep grid point.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub param: f64,
    pub size: usize,
    pub half_chain: ScalarStats,
    pub mutual_info: Option<ScalarStats>,
    pub tripartite: Option<ScalarStats>,
}

/// Run the full grid. Each (param, size) point gets an independent seed
/// derived from the master seed and its grid position, so single points can
/// be reproduced in isolation.
pub fn sweep(plan: &SweepPlan) -> Result<Vec<SweepRow>> {
    plan.validate()?;
    let mut rows = Vec::with_capacity(plan.params.len() * plan.sizes.len());
    for (pi, &param) in plan.params.iter().enumerate() {
        let param_seed = derive_seed(plan.master_seed, pi as u64);
        for (si, &size) in plan.sizes.iter().enumerate() {
            let spec = plan.template.spec_at(param, size)?;
            let mut config = RunConfig::new(spec, derive_seed(param_seed, si as u64));
            config.steps_equilibrate = plan.equilibrate_factor * size;
            config.steps_measure = plan.measure_factor * size;
            config.trajectories = plan.trajectories;
            config.observables = plan.observables.clone();
            config.i3_divisor = plan.i3_divisor;
            let stats = run_ensemble_average(&config)?;
            log::info!(
                "sweep point param={param} size={size}: half_chain={:.4}",
                stats.half_chain.mean
            );
            rows.push(SweepRow {
                param,
                size,
                half_chain: stats.half_chain,
                mutual_info: stats.mutual_info,
                tripartite: stats.tripartite,
            });
        }
    }
    Ok(rows)
}

/// Which sweep observable to arrange into per-size curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepColumn {
    HalfChain,
    MutualInfo,
    Tripartite,
}

/// Group sweep rows into per-size curves of trajectory means, ready for
/// crossing extraction or scaling collapse.
pub fn sweep_series(rows: &[SweepRow], column: SweepColumn) -> Result<Vec<SweepSeries>> {
    let mut by_size = std::collections::BTreeMap::<usize, Vec<(f64, f64)>>::new();
    for row in rows {
        let value = match column {
            SweepColumn::HalfChain => row.half_chain.mean,
            SweepColumn::MutualInfo => {
                row.mutual_info
                    .as_ref()
                    .ok_or_else(|| {
                        Error::Config("sweep did not record mutual information".into())
                    })?
                    .mean
            }
            SweepColumn::Tripartite => {
                row.tripartite
                    .as_ref()
                    .ok_or_else(|| {
                        Error::Config("sweep did not record tripartite information".into())
                    })?
                    .mean
            }
        };
        by_size.entry(row.size).or_default().push((row.param, value));
    }
    by_size
        .into_iter()
        .map(|(size, points)| SweepSeries::new(size, points))
        .collect()
}
