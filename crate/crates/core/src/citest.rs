//! Gaussian conditional-independence testing with partial correlations and
//! Fisher's z-transform.

use log::warn;
use nalgebra::DMatrix;
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::nodeset::NodeSet;
use crate::scm::Dataset;
use crate::sepset::{statement_count, SepSet};

pub const DEFAULT_ALPHA: f64 = 0.001;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CiTestConfig {
    /// Significance level of each test.
    pub alpha: f64,
    /// Largest conditioning set tested; `None` tests every size up to `p - 2`.
    pub max_cond_size: Option<usize>,
    /// Minimum degrees of freedom `n - |S| - 3` for a test to run. Statements
    /// below it are recorded as dependent.
    pub min_df: usize,
}

impl Default for CiTestConfig {
    fn default() -> Self {
        CiTestConfig {
            alpha: DEFAULT_ALPHA,
            max_cond_size: None,
            min_df: 1,
        }
    }
}

impl CiTestConfig {
    pub fn with_alpha(alpha: f64) -> Self {
        CiTestConfig {
            alpha,
            ..CiTestConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::arg(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        Ok(())
    }

    /// Two-sided rejection threshold `Phi^-1(1 - alpha/2)`.
    pub fn critical_value(&self) -> f64 {
        Normal::standard().inverse_cdf(1.0 - self.alpha / 2.0)
    }
}

/// `rho(j, k | cond)` from a covariance or correlation matrix, read off the
/// inverse of the `{j, k} ∪ cond` submatrix.
pub fn partial_correlation(cov: &DMatrix<f64>, j: usize, k: usize, cond: NodeSet) -> Result<f64> {
    let p = cov.nrows();
    if cov.ncols() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            got: cov.ncols(),
        });
    }
    for v in [j, k].into_iter().chain(cond.iter()) {
        if v >= p {
            return Err(Error::NodeOutOfRange { node: v, p });
        }
    }
    if j == k || cond.contains(j) || cond.contains(k) {
        return Err(Error::arg(
            "partial correlation needs distinct j, k outside the conditioning set",
        ));
    }
    let idx: Vec<usize> = [j, k].into_iter().chain(cond.iter()).collect();
    let sub = DMatrix::from_fn(idx.len(), idx.len(), |a, b| cov[(idx[a], idx[b])]);
    let chol = sub.cholesky().ok_or_else(|| {
        Error::Numerical(format!(
            "submatrix over {} is not positive definite",
            NodeSet::from_iter(idx.iter().copied())
        ))
    })?;
    let prec = chol.inverse();
    let r = -prec[(0, 1)] / (prec[(0, 0)] * prec[(1, 1)]).sqrt();
    Ok(r.clamp(-1.0, 1.0))
}

/// Fisher z statistic `sqrt(n - |S| - 3) * atanh(r)`.
pub fn fisher_z(r: f64, n: usize, cond_size: usize) -> f64 {
    let df = n as f64 - cond_size as f64 - 3.0;
    df.max(0.0).sqrt() * r.atanh()
}

/// Sample correlation matrix of the data columns.
pub fn correlation(data: &Dataset) -> Result<DMatrix<f64>> {
    let x = data.values();
    let (n, p) = x.shape();
    if n < 2 {
        return Err(Error::Data(format!("need at least 2 samples, got {n}")));
    }
    let means: Vec<f64> = (0..p).map(|c| x.column(c).mean()).collect();
    let mut cov = DMatrix::zeros(p, p);
    for a in 0..p {
        for b in a..p {
            let s: f64 = x
                .column(a)
                .iter()
                .zip(x.column(b).iter())
                .map(|(u, v)| (u - means[a]) * (v - means[b]))
                .sum();
            cov[(a, b)] = s;
            cov[(b, a)] = s;
        }
    }
    for c in 0..p {
        let var = cov[(c, c)];
        if var.is_nan() || var <= f64::EPSILON * n as f64 * (1.0 + means[c] * means[c]) {
            return Err(Error::Data(format!("column X{} has zero variance", c + 1)));
        }
    }
    let sd: Vec<f64> = (0..p).map(|c| cov[(c, c)].sqrt()).collect();
    Ok(DMatrix::from_fn(p, p, |a, b| {
        if a == b {
            1.0
        } else {
            cov[(a, b)] / (sd[a] * sd[b])
        }
    }))
}

#[derive(Clone, Debug)]
pub struct CiEstimate {
    pub ci: SepSet,
    /// Statements recorded as dependent because the degrees of freedom fell
    /// below the configured minimum.
    pub underpowered: usize,
    /// Statements skipped because their conditioning set exceeded the cap.
    pub capped: usize,
}

/// Tests every statement `(j, k, S)`; independent statements are included.
pub fn estimate_ci(data: &Dataset, cfg: &CiTestConfig) -> Result<SepSet> {
    estimate_ci_detailed(data, cfg).map(|e| e.ci)
}

pub fn estimate_ci_detailed(data: &Dataset, cfg: &CiTestConfig) -> Result<CiEstimate> {
    cfg.validate()?;
    let p = data.p();
    let mut ci = SepSet::new(p)?;
    let corr = correlation(data)?;
    let n = data.n();
    let crit = cfg.critical_value();
    let max_cond = cfg.max_cond_size.unwrap_or(p - 2);

    #[derive(Clone, Copy)]
    enum Verdict {
        Independent,
        Dependent,
        Underpowered,
        Capped,
    }
    let verdicts: Vec<Verdict> = (0..statement_count(p))
        .into_par_iter()
        .map(|idx| {
            let st = SepSet::statement_at(p, idx);
            let s = st.cond().len();
            if s > max_cond {
                return Ok(Verdict::Capped);
            }
            if n < s + 3 + cfg.min_df {
                return Ok(Verdict::Underpowered);
            }
            let r = partial_correlation(&corr, st.j(), st.k(), st.cond())?;
            Ok(if fisher_z(r, n, s).abs() <= crit {
                Verdict::Independent
            } else {
                Verdict::Dependent
            })
        })
        .collect::<Result<_>>()?;

    let (mut underpowered, mut capped) = (0, 0);
    for (idx, v) in verdicts.into_iter().enumerate() {
        match v {
            Verdict::Independent => ci.set_bit(idx),
            Verdict::Dependent => {}
            Verdict::Underpowered => underpowered += 1,
            Verdict::Capped => capped += 1,
        }
    }
    if underpowered > 0 {
        warn!(
            "{underpowered} statements had n - |S| - 3 < {} and were treated as dependent",
            cfg.min_df
        );
    }
    Ok(CiEstimate {
        ci,
        underpowered,
        capped,
    })
}
