//! Structure learning for linear directed cyclic graphs: d-separation,
//! exhaustive Markov-set scans, identifiability-assumption selection,
//! linear SEM simulation and Fisher-z CI testing.

pub mod citest;
pub mod dsep;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod io;
pub mod nodeset;
pub mod scm;
pub mod selection;
pub mod sepset;

pub use citest::{estimate_ci, partial_correlation, CiTestConfig};
pub use dsep::{
    all_dsep, d_connected, d_connected_oracle, markov_equivalent, satisfies_cfc, satisfies_cmc,
    DsepGraph,
};
pub use error::{Error, Result};
pub use experiments::{
    algorithm1, algorithm1_with, verify_fixtures, Algorithm1Output, ExperimentConfig, FixtureReport,
};
pub use graph::{Adjacency, Dcg, GraphId, PairSet, Skeleton, TripleAdjacency, TripleClass};
pub use nodeset::NodeSet;
pub use scm::{
    covariance, population_ci, random_dcg_scm, structured_scm, Dataset, LinearScm, Structure,
};
pub use selection::{
    Assumption, DsepTable, SearchSpace, SelectOptions, SelectionReport, SgsMode, SgsReading,
    SpaceKind,
};
pub use sepset::{SepSet, SepStatement};
