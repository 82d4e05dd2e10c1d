//! Simulation studies: how often the true graph satisfies each assumption,
//! and how often `algorithm1` recovers the true skeleton.
//!
//! Every (cell, trial) pair draws its model from its own ChaCha stream and
//! every sample size its data from another, so outputs do not depend on
//! scheduling or thread count.

use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::path::PathBuf;
use std::str::FromStr;

use log::{error, warn};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::citest::{estimate_ci, CiTestConfig, DEFAULT_ALPHA};
use crate::error::{Error, Result};
use crate::graph::{Dcg, PairSet};
use crate::scm::{
    population_ci, random_dcg_scm, structured_scm, LinearScm, Structure, POPULATION_TOL,
};
use crate::selection::{
    Assumption, DsepTable, SearchSpace, SelectOptions, SelectionReport, SpaceKind,
};
use crate::sepset::SepSet;

use super::algorithm1_from_report;

/// Model generation attempts per trial before the run is abandoned.
const GENERATION_ATTEMPTS: usize = 100;

/// One column of a study: random graphs at an expected neighbourhood size,
/// or a fixed five-node structure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CellSpec {
    Ens(f64),
    Structure(Structure),
}

impl fmt::Display for CellSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CellSpec::Ens(e) => write!(f, "ens={e}"),
            CellSpec::Structure(s) => write!(f, "{s}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CiSource {
    /// Fisher-z tests on sampled data.
    #[default]
    Sample,
    /// Exact partial correlations of the model covariance.
    Population,
}

impl FromStr for CiSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sample" => Ok(CiSource::Sample),
            "population" | "oracle" => Ok(CiSource::Population),
            _ => Err(Error::arg(format!(
                "unknown CI source `{s}` (sample|population)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub trials: usize,
    pub sample_sizes: Vec<usize>,
    pub cells: Vec<CellSpec>,
    pub assumptions: Vec<Assumption>,
    pub space: SpaceKind,
    pub p: usize,
    pub alpha: f64,
    pub seed: u64,
    pub ci_source: CiSource,
    pub output: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            trials: 20,
            sample_sizes: vec![100, 1000],
            cells: vec![CellSpec::Ens(1.0), CellSpec::Ens(2.0), CellSpec::Ens(3.0)],
            assumptions: vec![
                Assumption::Cfc,
                Assumption::Mdr,
                Assumption::SmrIdentifiable,
                Assumption::PMin,
            ],
            space: SpaceKind::AllDcgs,
            p: 5,
            alpha: DEFAULT_ALPHA,
            seed: 0,
            ci_source: CiSource::Sample,
            output: None,
        }
    }
}

fn list<T: FromStr>(ln: usize, v: &str) -> Result<Vec<T>> {
    v.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse()
                .map_err(|_| Error::parse(ln, format!("bad list item `{t}`")))
        })
        .collect()
}

impl ExperimentConfig {
    /// Parses `key = value` lines; unknown keys are errors. Keys: `trials`,
    /// `sample_sizes`, `ens`, `structures`, `assumptions`, `space`, `p`,
    /// `alpha`, `seed`, `ci`, `output`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        let mut cells: Vec<CellSpec> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let ln = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::parse(ln, format!("expected `key = value`, found `{line}`"))
            })?;
            let (key, value) = (key.trim(), value.trim());
            let num = |what: &str| Error::parse(ln, format!("bad {what} `{value}`"));
            match key {
                "trials" => cfg.trials = value.parse().map_err(|_| num("trial count"))?,
                "sample_sizes" | "n" => cfg.sample_sizes = list(ln, value)?,
                "ens" => cells.extend(list::<f64>(ln, value)?.into_iter().map(CellSpec::Ens)),
                "structures" | "structure" => cells.extend(
                    list::<Structure>(ln, value)?
                        .into_iter()
                        .map(CellSpec::Structure),
                ),
                "assumptions" => cfg.assumptions = list(ln, value)?,
                "space" => cfg.space = value.parse().map_err(|_| num("space"))?,
                "p" => cfg.p = value.parse().map_err(|_| num("node count"))?,
                "alpha" => cfg.alpha = value.parse().map_err(|_| num("alpha"))?,
                "seed" => cfg.seed = value.parse().map_err(|_| num("seed"))?,
                "ci" => cfg.ci_source = value.parse().map_err(|_| num("CI source"))?,
                "output" => cfg.output = Some(PathBuf::from(value)),
                _ => return Err(Error::parse(ln, format!("unknown key `{key}`"))),
            }
        }
        if !cells.is_empty() {
            cfg.cells = cells;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::arg("trials must be at least 1"));
        }
        if self.cells.is_empty() || self.assumptions.is_empty() {
            return Err(Error::arg("need at least one cell and one assumption"));
        }
        if self.ci_source == CiSource::Sample && self.sample_sizes.is_empty() {
            return Err(Error::arg("need at least one sample size"));
        }
        if self.sample_sizes.contains(&0) {
            return Err(Error::arg("sample sizes must be positive"));
        }
        if self.space == SpaceKind::Explicit {
            return Err(Error::arg("experiments need an exhaustive space (dcg|dag)"));
        }
        CiTestConfig::with_alpha(self.alpha).validate()?;
        for c in &self.cells {
            match c {
                CellSpec::Ens(e) => {
                    crate::scm::edge_probability(self.p, *e)?;
                }
                CellSpec::Structure(_) if self.p != 5 => {
                    return Err(Error::arg("fixed structures have five nodes; set p = 5"));
                }
                CellSpec::Structure(_) => {}
            }
        }
        Ok(())
    }

    fn sizes(&self) -> Vec<SampleSize> {
        match self.ci_source {
            CiSource::Sample => self
                .sample_sizes
                .iter()
                .map(|&n| SampleSize::Finite(n))
                .collect(),
            CiSource::Population => vec![SampleSize::Population],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SampleSize {
    Finite(usize),
    Population,
}

impl fmt::Display for SampleSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SampleSize::Finite(n) => write!(f, "{n}"),
            SampleSize::Population => f.write_str("population"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialRow {
    pub assumption: Assumption,
    pub n: SampleSize,
    pub cell: String,
    pub trial: usize,
    /// 0/1 membership flag, or 0/1 exact skeleton match.
    pub value: f64,
    /// Skeleton precision and recall (recovery runs only; NaN when undefined).
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    /// The CI set equals `D_sep` of the true graph.
    pub faithful: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub assumption: Assumption,
    pub n: SampleSize,
    pub cell: String,
    pub trials: usize,
    pub mean: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Study {
    Proportions,
    Recovery,
}

#[derive(Clone, Debug)]
pub struct ExperimentResult {
    pub rows: Vec<TrialRow>,
    pub summary: Vec<SummaryRow>,
    /// Models redrawn after generation failures.
    pub regenerations: usize,
    /// Trials where CFC ⇒ MDR ⇒ P-min failed for the true graph.
    pub monotonicity_violations: usize,
    study: Study,
    seed: u64,
    ci_source: CiSource,
    alpha: f64,
    space: SpaceKind,
}

fn fmt_f(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.6}")
    }
}

impl ExperimentResult {
    fn header(&self, s: &mut String) {
        let study = match self.study {
            Study::Proportions => "assumption-proportions",
            Study::Recovery => "skeleton-recovery",
        };
        let _ = writeln!(s, "# study={study}");
        let _ = writeln!(
            s,
            "# seed={} space={} alpha={} ci={:?}",
            self.seed, self.space, self.alpha, self.ci_source
        );
        match self.study {
            Study::Proportions => {
                let _ = writeln!(
                    s,
                    "# flag: the true graph belongs to the set selected under the assumption"
                );
            }
            Study::Recovery => {
                let _ = writeln!(
                    s,
                    "# accuracy: algorithm1 returns exactly the true skeleton"
                );
            }
        }
        let _ = writeln!(
            s,
            "# regenerations={} monotonicity_violations={}",
            self.regenerations, self.monotonicity_violations
        );
    }

    /// One row per (assumption, n, cell, trial).
    pub fn long_csv(&self) -> String {
        let mut s = String::new();
        self.header(&mut s);
        s.push_str("assumption,n,ens_or_structure,trial,flag_or_accuracy,faithful");
        if self.study == Study::Recovery {
            s.push_str(",precision,recall");
        }
        s.push('\n');
        for r in &self.rows {
            let _ = write!(
                s,
                "{},{},{},{},{},{}",
                r.assumption,
                r.n,
                r.cell,
                r.trial,
                fmt_f(r.value),
                u8::from(r.faithful)
            );
            if self.study == Study::Recovery {
                let _ = write!(
                    s,
                    ",{},{}",
                    fmt_f(r.precision.unwrap_or(f64::NAN)),
                    fmt_f(r.recall.unwrap_or(f64::NAN))
                );
            }
            s.push('\n');
        }
        s
    }

    /// One row per (assumption, n, cell) with the mean over trials.
    pub fn summary_csv(&self) -> String {
        let mut s = String::new();
        self.header(&mut s);
        let what = match self.study {
            Study::Proportions => "proportion",
            Study::Recovery => "accuracy",
        };
        let _ = writeln!(s, "assumption,n,ens_or_structure,trials,{what}");
        for r in &self.summary {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                r.assumption,
                r.n,
                r.cell,
                r.trials,
                fmt_f(r.mean)
            );
        }
        s
    }

    pub fn mean(&self, a: Assumption, n: SampleSize, cell: &str) -> Option<f64> {
        self.summary
            .iter()
            .find(|r| r.assumption == a && r.n == n && r.cell == cell)
            .map(|r| r.mean)
    }
}

/// `ChaCha8` stream `tag` under the run seed.
fn stream(seed: u64, tag: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tag);
    rng
}

fn tag(kind: u64, cell: usize, trial: usize, size: usize) -> u64 {
    (kind << 60) | ((cell as u64) << 40) | ((trial as u64) << 16) | size as u64
}

fn draw_model(cell: CellSpec, p: usize, rng: &mut ChaCha8Rng) -> Result<(LinearScm, usize)> {
    let mut last = None;
    for attempt in 0..GENERATION_ATTEMPTS {
        let drawn = match cell {
            CellSpec::Ens(e) => random_dcg_scm(p, e, rng),
            CellSpec::Structure(s) => structured_scm(s, rng),
        };
        match drawn {
            Ok(scm) => return Ok((scm, attempt)),
            Err(e @ Error::Generation(_)) => {
                warn!("model generation failed ({e}); redrawing");
                last = Some(e);
            }
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap_or_else(|| Error::Generation("no model drawn".into())))
}

fn precision_recall(est: PairSet, truth: PairSet) -> (f64, f64) {
    let hit = est.intersection_len(&truth) as f64;
    let prec = if est.is_empty() {
        f64::NAN
    } else {
        hit / est.len() as f64
    };
    let rec = if truth.is_empty() {
        f64::NAN
    } else {
        hit / truth.len() as f64
    };
    (prec, rec)
}

struct TaskOut {
    rows: Vec<TrialRow>,
    regenerations: usize,
    violations: usize,
}

fn run_task(
    cfg: &ExperimentConfig,
    study: Study,
    table: &DsepTable,
    cell_idx: usize,
    trial: usize,
) -> Result<TaskOut> {
    let cell = cfg.cells[cell_idx];
    let mut model_rng = stream(cfg.seed, tag(1, cell_idx, trial, 0));
    let (scm, regenerations) = draw_model(cell, cfg.p, &mut model_rng)?;
    let truth: Dcg = scm.graph();
    let truth_id = truth.code().expect("p within code range");
    let truth_dsep = crate::dsep::all_dsep(&truth)?;
    let truth_skel = truth.skeleton().pairs;
    let test_cfg = CiTestConfig::with_alpha(cfg.alpha);

    let mut rows = Vec::new();
    let mut violations = 0;
    for (si, n) in cfg.sizes().into_iter().enumerate() {
        let ci: SepSet = match n {
            SampleSize::Population => population_ci(scm.sigma(), POPULATION_TOL)?,
            SampleSize::Finite(n) => {
                let seed = tag(2, cell_idx, trial, si);
                let mut data_rng = stream(cfg.seed, seed);
                let data = scm.sample(n, &mut data_rng, seed)?;
                estimate_ci(&data, &test_cfg)?
            }
        };
        let faithful = ci == truth_dsep;
        let report = SelectionReport::analyze(&ci, table, SelectOptions::default())?;
        let member = |a| report.contains(a, truth_id);
        if (member(Assumption::Cfc) && !member(Assumption::Mdr))
            || (member(Assumption::Mdr) && !member(Assumption::PMin))
        {
            error!("assumption flags not monotone at cell {cell}, trial {trial}, n {n}");
            violations += 1;
        }
        for &a in &cfg.assumptions {
            let row = match study {
                Study::Proportions => TrialRow {
                    assumption: a,
                    n,
                    cell: cell.to_string(),
                    trial,
                    value: f64::from(u8::from(member(a))),
                    precision: None,
                    recall: None,
                    faithful,
                },
                Study::Recovery => {
                    let out = algorithm1_from_report(&report, a);
                    let (value, precision, recall) = match out.skeleton {
                        Some(sk) => {
                            let (pr, rc) = precision_recall(sk, truth_skel);
                            (f64::from(u8::from(sk == truth_skel)), pr, rc)
                        }
                        None => (0.0, f64::NAN, f64::NAN),
                    };
                    TrialRow {
                        assumption: a,
                        n,
                        cell: cell.to_string(),
                        trial,
                        value,
                        precision: Some(precision),
                        recall: Some(recall),
                        faithful,
                    }
                }
            };
            rows.push(row);
        }
    }
    Ok(TaskOut {
        rows,
        regenerations,
        violations,
    })
}

fn run(
    cfg: &ExperimentConfig,
    study: Study,
    table: Option<&DsepTable>,
) -> Result<ExperimentResult> {
    cfg.validate()?;
    let owned;
    let table = match table {
        Some(t) if t.p() == cfg.p && t.kind() == cfg.space => t,
        Some(_) => {
            return Err(Error::arg(
                "prebuilt table does not match the configured space",
            ))
        }
        None => {
            owned = DsepTable::build(&SearchSpace::of_kind(cfg.space, cfg.p)?)?;
            &owned
        }
    };
    let tasks: Vec<(usize, usize)> = (0..cfg.cells.len())
        .flat_map(|c| (0..cfg.trials).map(move |t| (c, t)))
        .collect();
    let outs: Vec<TaskOut> = tasks
        .par_iter()
        .map(|&(c, t)| run_task(cfg, study, table, c, t))
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    let (mut regenerations, mut violations) = (0, 0);
    for o in outs {
        rows.extend(o.rows);
        regenerations += o.regenerations;
        violations += o.violations;
    }
    // Summary in config order: cell, then n, then assumption.
    let mut acc: HashMap<(usize, SampleSize, Assumption), (f64, usize)> = HashMap::new();
    let cell_names: Vec<String> = cfg.cells.iter().map(|c| c.to_string()).collect();
    for r in &rows {
        let ci = cell_names
            .iter()
            .position(|c| *c == r.cell)
            .expect("known cell");
        let e = acc.entry((ci, r.n, r.assumption)).or_insert((0.0, 0));
        e.0 += r.value;
        e.1 += 1;
    }
    let mut summary = Vec::new();
    for (ci, name) in cell_names.iter().enumerate() {
        for n in cfg.sizes() {
            for &a in &cfg.assumptions {
                if let Some(&(sum, count)) = acc.get(&(ci, n, a)) {
                    summary.push(SummaryRow {
                        assumption: a,
                        n,
                        cell: name.clone(),
                        trials: count,
                        mean: sum / count as f64,
                    });
                }
            }
        }
    }
    Ok(ExperimentResult {
        rows,
        summary,
        regenerations,
        monotonicity_violations: violations,
        study,
        seed: cfg.seed,
        ci_source: cfg.ci_source,
        alpha: cfg.alpha,
        space: cfg.space,
    })
}

/// Fraction of trials in which the true graph lies in each assumption's
/// selected set. Pass a prebuilt table for the configured space to skip
/// rebuilding it.
pub fn run_assumption_proportions(
    cfg: &ExperimentConfig,
    table: Option<&DsepTable>,
) -> Result<ExperimentResult> {
    run(cfg, Study::Proportions, table)
}

/// Fraction of trials in which `algorithm1` returns the true skeleton.
pub fn run_skeleton_recovery(
    cfg: &ExperimentConfig,
    table: Option<&DsepTable>,
) -> Result<ExperimentResult> {
    run(cfg, Study::Recovery, table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            trials: 3,
            sample_sizes: vec![200],
            cells: vec![CellSpec::Ens(1.0)],
            p: 3,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn config_parsing() {
        let cfg = ExperimentConfig::parse(
            "# desk run\ntrials = 5\nsample_sizes = 100, 1000\nens = 1,2\nassumptions = cfc,mdr\nspace = dag\nseed = 9\nci = population\n",
        )
        .unwrap();
        assert_eq!(cfg.trials, 5);
        assert_eq!(cfg.sample_sizes, vec![100, 1000]);
        assert_eq!(cfg.cells, vec![CellSpec::Ens(1.0), CellSpec::Ens(2.0)]);
        assert_eq!(cfg.assumptions, vec![Assumption::Cfc, Assumption::Mdr]);
        assert_eq!(
            (cfg.space, cfg.seed, cfg.ci_source),
            (SpaceKind::AllDags, 9, CiSource::Population)
        );
        assert!(matches!(
            ExperimentConfig::parse("bogus = 1"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(ExperimentConfig::parse("trials = 0").is_err());
        assert!(ExperimentConfig::parse("structures = cycle5\np = 4").is_err());
    }

    #[test]
    fn rows_and_summary_shape() {
        let cfg = small();
        let res = run_assumption_proportions(&cfg, None).unwrap();
        assert_eq!(res.rows.len(), 3 * 4);
        assert_eq!(res.summary.len(), 4);
        assert_eq!(res.monotonicity_violations, 0);
        let again = run_assumption_proportions(&cfg, None).unwrap();
        assert_eq!(res.long_csv(), again.long_csv());
        assert!(res
            .summary_csv()
            .lines()
            .any(|l| l.starts_with("assumption,n,")));
    }

    #[test]
    fn population_mode_recovers_faithful_draws() {
        let cfg = ExperimentConfig {
            trials: 6,
            ci_source: CiSource::Population,
            assumptions: vec![Assumption::Cfc, Assumption::Mdr],
            ..small()
        };
        let res = run_skeleton_recovery(&cfg, None).unwrap();
        for r in res
            .rows
            .iter()
            .filter(|r| r.faithful && r.assumption == Assumption::Mdr)
        {
            assert_eq!(r.value, 1.0);
        }
    }

    #[test]
    fn desk_grid_emits_one_summary_row_per_cell() {
        let cfg = ExperimentConfig {
            assumptions: vec![Assumption::Mdr],
            space: SpaceKind::AllDags,
            ..ExperimentConfig::default()
        };
        let res = run_assumption_proportions(&cfg, None).unwrap();
        assert_eq!(res.summary.len(), 6);
        assert!(res.summary.iter().all(|r| r.trials == 20));
    }

    #[test]
    fn structure_cells_are_labelled() {
        let cfg = ExperimentConfig {
            trials: 2,
            sample_sizes: vec![500],
            cells: vec![
                CellSpec::Structure(Structure::Cycle5),
                CellSpec::Structure(Structure::Tree1),
            ],
            assumptions: vec![Assumption::Mdr],
            space: SpaceKind::AllDags,
            ..ExperimentConfig::default()
        };
        let res = run_skeleton_recovery(&cfg, None).unwrap();
        let cells: Vec<&str> = res.summary.iter().map(|r| r.cell.as_str()).collect();
        assert_eq!(cells, ["cycle5", "tree1"]);
        assert!(res.long_csv().contains("\nmdr,500,cycle5,1,"));
    }
}
