//! `algorithm1` (select by an assumption, report the shared equivalence
//! class and skeleton), simulation studies and the fixture corpus.

pub mod fixtures;
mod runs;

use std::time::{Duration, Instant};

use crate::error::Result;
use crate::graph::{Dcg, GraphId, PairSet};
use crate::selection::{Assumption, DsepTable, SearchSpace, SelectOptions, SelectionReport};
use crate::sepset::SepSet;

pub use fixtures::{verify_fixtures, verify_fixtures_with, FixtureReport, FixtureTables};
pub use runs::{
    run_assumption_proportions, run_skeleton_recovery, CellSpec, CiSource, ExperimentConfig,
    ExperimentResult, SampleSize, SummaryRow, TrialRow,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Algorithm1Output {
    pub assumption: Assumption,
    /// Graphs satisfying the assumption, in space order.
    pub selected: Vec<GraphId>,
    /// The equivalence class shared by every selected graph, if there is one.
    pub mec: Option<Vec<GraphId>>,
    /// The skeleton shared by every selected graph, if there is one.
    pub skeleton: Option<PairSet>,
    pub elapsed: Duration,
}

/// Reads `algorithm1` outputs off an existing selection report.
pub fn algorithm1_from_report(report: &SelectionReport, a: Assumption) -> Algorithm1Output {
    let start = Instant::now();
    let outcome = report.outcome(a);
    let selected = report.ids(a);
    let mec = match outcome.members.first() {
        Some(&first)
            if outcome
                .members
                .iter()
                .all(|&i| report.markov[i].mec == report.markov[first].mec) =>
        {
            let block = report.markov[first].mec;
            Some(
                report.mecs[block]
                    .iter()
                    .map(|&i| report.markov[i].id)
                    .collect(),
            )
        }
        _ => None,
    };
    let skeleton = outcome.unique_skeleton.then(|| {
        Dcg::from_code(report.p, selected[0])
            .expect("valid code")
            .skeleton()
            .pairs
    });
    Algorithm1Output {
        assumption: a,
        selected,
        mec,
        skeleton,
        elapsed: start.elapsed(),
    }
}

/// Selection and reporting against a prebuilt table.
pub fn algorithm1_with(ci: &SepSet, table: &DsepTable, a: Assumption) -> Result<Algorithm1Output> {
    let start = Instant::now();
    let report = SelectionReport::analyze(ci, table, SelectOptions::default())?;
    let mut out = algorithm1_from_report(&report, a);
    out.elapsed = start.elapsed();
    Ok(out)
}

pub fn algorithm1(ci: &SepSet, space: &SearchSpace, a: Assumption) -> Result<Algorithm1Output> {
    let start = Instant::now();
    let table = DsepTable::build(space)?;
    let mut out = algorithm1_with(ci, &table, a)?;
    out.elapsed = start.elapsed();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsep::all_dsep;

    #[test]
    fn faithful_input_recovers_skeleton_at_p3() {
        let table = DsepTable::build(&SearchSpace::all_dcgs(3)).unwrap();
        for i in 0..table.len() {
            let g = table.graph(i);
            let ci = all_dsep(&g).unwrap();
            let out = algorithm1_with(&ci, &table, Assumption::Mdr).unwrap();
            assert_eq!(out.skeleton, Some(g.skeleton().pairs), "{g:?}");
            assert!(out.mec.unwrap().contains(&g.code().unwrap()));
        }
    }

    #[test]
    fn empty_selection_gives_empty_outputs() {
        let table = DsepTable::build(&SearchSpace::all_dcgs(3)).unwrap();
        // 1 _||_ 2 | - together with 1 _||_ 2 | 3 and nothing else: no faithful graph.
        let ci = crate::io::parse_sepset("p=3\n1 _||_ 2 | -\n1 _||_ 2 | 3\n").unwrap();
        let out = algorithm1_with(&ci, &table, Assumption::Cfc).unwrap();
        assert!(out.selected.is_empty());
        assert_eq!((out.mec, out.skeleton), (None, None));
    }
}
