//! Gaussian linear structural equation models `X = B^T X + e`, `e ~ N(0, I)`,
//! over possibly cyclic graphs.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::citest::partial_correlation;
use crate::error::{Error, Result};
use crate::graph::Dcg;
use crate::sepset::{statement_count, SepSet};

/// Largest accepted condition number of `I - B^T`.
pub const CONDITION_LIMIT: f64 = 1e8;
/// Weight redraws allowed before generation gives up.
pub const WEIGHT_RETRIES: usize = 200;
/// Direction redraws allowed for bipartite graphs.
pub const DIRECTION_RETRIES: usize = 10_000;
/// Default tolerance on `|rho|` for [`population_ci`].
pub const POPULATION_TOL: f64 = 1e-9;

pub const WEIGHT_MIN: f64 = 0.25;
pub const WEIGHT_MAX: f64 = 1.0;

#[derive(Clone, Debug, PartialEq)]
pub struct LinearScm {
    b: DMatrix<f64>,
    /// `(I - B^T)^-1`
    mix: DMatrix<f64>,
    sigma: DMatrix<f64>,
}

impl LinearScm {
    /// `b[(j, k)]` is the weight of edge `j -> k`.
    pub fn new(b: DMatrix<f64>) -> Result<Self> {
        let p = b.nrows();
        if b.ncols() != p {
            return Err(Error::DimensionMismatch {
                expected: p,
                got: b.ncols(),
            });
        }
        if !(2..=crate::nodeset::MAX_NODES).contains(&p) {
            return Err(Error::arg(format!(
                "an SCM needs 2..=16 variables, got {p}"
            )));
        }
        if let Some(j) = (0..p).find(|&j| b[(j, j)] != 0.0) {
            return Err(Error::arg(format!("self-loop weight on X{}", j + 1)));
        }
        if b.iter().any(|w| !w.is_finite()) {
            return Err(Error::arg("edge weights must be finite"));
        }
        let mix = solve_matrix(&b)?;
        let sigma = &mix * mix.transpose();
        Ok(LinearScm { b, mix, sigma })
    }

    /// From 0-based weighted edges `(j, k, w)`.
    pub fn from_edges(p: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut b = DMatrix::zeros(p, p);
        for &(j, k, w) in edges {
            if j >= p || k >= p {
                return Err(Error::NodeOutOfRange { node: j.max(k), p });
            }
            b[(j, k)] = w;
        }
        LinearScm::new(b)
    }

    pub fn p(&self) -> usize {
        self.b.nrows()
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn sigma(&self) -> &DMatrix<f64> {
        &self.sigma
    }

    /// Nonzero pattern of `B`.
    pub fn graph(&self) -> Dcg {
        let p = self.p();
        let mut g = Dcg::empty(p).expect("p validated");
        for j in 0..p {
            for k in 0..p {
                if self.b[(j, k)] != 0.0 {
                    g.add_edge(j, k).expect("off-diagonal");
                }
            }
        }
        g
    }

    /// Weighted edges in lexicographic order.
    pub fn weighted_edges(&self) -> Vec<(usize, usize, f64)> {
        self.graph()
            .edges()
            .map(|(j, k)| (j, k, self.b[(j, k)]))
            .collect()
    }

    /// `n` i.i.d. draws of the equilibrium `x = (I - B^T)^-1 e`; noise is
    /// consumed row by row, variable by variable.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R, seed: u64) -> Result<Dataset> {
        if n == 0 {
            return Err(Error::arg("sample size must be at least 1"));
        }
        let p = self.p();
        let mut values = DMatrix::zeros(n, p);
        let mut eps = vec![0.0; p];
        for row in 0..n {
            for e in eps.iter_mut() {
                *e = rng.sample(StandardNormal);
            }
            for a in 0..p {
                values[(row, a)] = (0..p).map(|c| self.mix[(a, c)] * eps[c]).sum();
            }
        }
        Ok(Dataset { values, seed })
    }
}

fn solve_matrix(b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let p = b.nrows();
    let m = DMatrix::<f64>::identity(p, p) - b.transpose();
    let sv = m.clone().singular_values();
    let (lo, hi) = (sv.min(), sv.max());
    if lo.is_nan() || lo <= 0.0 || hi / lo > CONDITION_LIMIT {
        return Err(Error::Generation(format!(
            "I - B^T is singular or ill-conditioned (condition number {:.3e})",
            hi / lo
        )));
    }
    m.try_inverse()
        .ok_or_else(|| Error::Generation("I - B^T is not invertible".into()))
}

/// Exact covariance `(I - B^T)^-1 (I - B^T)^-T`.
pub fn covariance(b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let mix = solve_matrix(b)?;
    Ok(&mix * mix.transpose())
}

/// Samples in rows, variables in columns.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    values: DMatrix<f64>,
    seed: u64,
}

impl Dataset {
    pub fn new(values: DMatrix<f64>, seed: u64) -> Result<Self> {
        if values.nrows() == 0 {
            return Err(Error::Data("dataset has no rows".into()));
        }
        if values.ncols() < 2 {
            return Err(Error::Data("dataset needs at least 2 columns".into()));
        }
        Ok(Dataset { values, seed })
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn p(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Per-pair edge probability `q` with `(p-1)(1 - (1-q)^2) = ens`, i.e. the
/// expected number of really adjacent neighbours per node is `ens`.
pub fn edge_probability(p: usize, ens: f64) -> Result<f64> {
    if p < 2 {
        return Err(Error::arg("need p >= 2"));
    }
    let deg = (p - 1) as f64;
    if !(ens > 0.0 && ens <= deg) {
        return Err(Error::arg(format!(
            "expected neighbourhood size must lie in (0, {deg}], got {ens}"
        )));
    }
    Ok((1.0 - (1.0 - ens / deg).max(0.0).sqrt()).clamp(0.0, 1.0))
}

fn draw_weight<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let w = rng.random_range(WEIGHT_MIN..=WEIGHT_MAX);
    if rng.random_bool(0.5) {
        -w
    } else {
        w
    }
}

/// Draws weights for `g` until `I - B^T` is well conditioned.
pub fn weighted_scm<R: Rng + ?Sized>(g: &Dcg, rng: &mut R) -> Result<LinearScm> {
    let p = g.p();
    let edges: Vec<(usize, usize)> = g.edges().collect();
    let mut last = None;
    for _ in 0..WEIGHT_RETRIES {
        let mut b = DMatrix::zeros(p, p);
        for &(j, k) in &edges {
            b[(j, k)] = draw_weight(rng);
        }
        match LinearScm::new(b) {
            Ok(scm) => return Ok(scm),
            Err(e) => last = Some(e),
        }
    }
    Err(Error::Generation(format!(
        "no well-conditioned weights for {} edges after {WEIGHT_RETRIES} draws (last: {})",
        edges.len(),
        last.map(|e| e.to_string()).unwrap_or_default()
    )))
}

/// Random graph where each ordered pair is an edge with
/// [`edge_probability`], then random weights.
pub fn random_dcg_scm<R: Rng + ?Sized>(p: usize, ens: f64, rng: &mut R) -> Result<LinearScm> {
    let q = edge_probability(p, ens)?;
    let mut g = Dcg::empty(p)?;
    for j in 0..p {
        for k in 0..p {
            if j != k && rng.random_bool(q) {
                g.add_edge(j, k)?;
            }
        }
    }
    weighted_scm(&g, rng)
}

/// Fixed five-node skeletons.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Structure {
    /// 1-2, 1-3, 2-4, 2-5
    Tree1,
    /// Star centred at 1.
    Tree2,
    /// 1-{2,3,4}, {2,3,4}-5
    Bipartite,
    /// 1 -> 2 -> 3 -> 4 -> 5 -> 1
    Cycle5,
}

impl Structure {
    pub const ALL: [Structure; 4] = [
        Structure::Tree1,
        Structure::Tree2,
        Structure::Bipartite,
        Structure::Cycle5,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Structure::Tree1 => "tree1",
            Structure::Tree2 => "tree2",
            Structure::Bipartite => "bipartite",
            Structure::Cycle5 => "cycle5",
        }
    }

    /// Undirected skeleton, 0-based.
    pub fn skeleton(self) -> &'static [(usize, usize)] {
        match self {
            Structure::Tree1 => &[(0, 1), (0, 2), (1, 3), (1, 4)],
            Structure::Tree2 => &[(0, 1), (0, 2), (0, 3), (0, 4)],
            Structure::Bipartite => &[(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4)],
            Structure::Cycle5 => &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)],
        }
    }
}

impl FromStr for Structure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Structure::ALL
            .into_iter()
            .find(|k| k.label() == s.to_ascii_lowercase())
            .ok_or_else(|| {
                Error::arg(format!(
                    "unknown structure `{s}` (tree1|tree2|bipartite|cycle5)"
                ))
            })
    }
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Orients the fixed skeleton of `kind` and draws weights.
pub fn structured_graph<R: Rng + ?Sized>(kind: Structure, rng: &mut R) -> Result<Dcg> {
    let orient = |rng: &mut R| -> Dcg {
        let mut g = Dcg::empty(5).expect("p = 5");
        for &(a, b) in kind.skeleton() {
            let (j, k) = if rng.random_bool(0.5) { (a, b) } else { (b, a) };
            g.add_edge(j, k).expect("valid edge");
        }
        g
    };
    match kind {
        Structure::Cycle5 => Dcg::from_edges(5, kind.skeleton()),
        Structure::Tree1 | Structure::Tree2 => Ok(orient(rng)),
        Structure::Bipartite => (0..DIRECTION_RETRIES)
            .map(|_| orient(rng))
            .find(|g| !g.is_acyclic())
            .ok_or_else(|| Error::Generation("no cyclic bipartite orientation found".into())),
    }
}

pub fn structured_scm<R: Rng + ?Sized>(kind: Structure, rng: &mut R) -> Result<LinearScm> {
    let g = structured_graph(kind, rng)?;
    weighted_scm(&g, rng)
}

/// Every statement whose partial correlation under `sigma` is below `tol`
/// in magnitude.
pub fn population_ci(sigma: &DMatrix<f64>, tol: f64) -> Result<SepSet> {
    let p = sigma.nrows();
    if sigma.ncols() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            got: sigma.ncols(),
        });
    }
    let mut ci = SepSet::new(p)?;
    if sigma.clone().cholesky().is_none() {
        return Err(Error::Numerical(
            "covariance is not positive definite".into(),
        ));
    }
    for idx in 0..statement_count(p) {
        let st = SepSet::statement_at(p, idx);
        if partial_correlation(sigma, st.j(), st.k(), st.cond())?.abs() < tol {
            ci.set_bit(idx);
        }
    }
    Ok(ci)
}
