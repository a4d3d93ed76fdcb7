use diagseq::bench::{
    pool_scenarios, read_runs_csv, read_scenario_csv, render_report, run_cell, run_grid, summarize_runs,
    write_runs_csv, write_scenario_csv, FactorGrid,
};
use diagseq::generator::{generate_dpi, DpiParams};
use diagseq::logic::Dpi;
use diagseq::oracle::OracleKind;
use diagseq::prob::DistributionKind;
use diagseq::qsm::Measure;

fn small_grid() -> FactorGrid {
    let dpis = (0..2u64)
        .map(|i| {
            let p = DpiParams::new(10, 2, (2, 3), 70 + i);
            (format!("d{i}"), generate_dpi(&p).unwrap())
        })
        .collect();
    let mut grid = FactorGrid::new(dpis, 5);
    grid.measures = vec![Measure::Ent, Measure::Mps, Measure::Rnd];
    grid.dists = vec![DistributionKind::Eq, DistributionKind::Mod];
    grid.prob_choices = 2;
    grid.strategies = vec![OracleKind::Plausible, OracleKind::Random];
    grid.ld_values = vec![6];
    grid.runs_per_cell = 5;
    grid
}

#[test]
fn a_single_cell_matches_the_grid_run() {
    let grid = small_grid();
    let out = run_grid(&grid, 2).unwrap();
    assert_eq!(out.cells.len(), grid.cells().len());
    for (key, cell) in grid.cells().iter().zip(&out.cells) {
        assert_eq!(&cell.key, key);
        assert_eq!(&run_cell(&grid, key).unwrap(), cell);
    }
    assert_eq!(summarize_runs(&out.runs), out.cells);
}

#[test]
fn csv_files_round_trip() {
    let grid = small_grid();
    let out = run_grid(&grid, 1).unwrap();
    let dir = tempfile::tempdir().unwrap();

    let runs_path = dir.path().join("runs.csv");
    write_runs_csv(&out.runs, &runs_path).unwrap();
    assert_eq!(read_runs_csv(&runs_path).unwrap(), out.runs);

    let summaries = pool_scenarios(&out.cells);
    let scenario_path = dir.path().join("scenario.csv");
    write_scenario_csv(&summaries, &scenario_path).unwrap();
    let back = read_scenario_csv(&scenario_path).unwrap();
    assert_eq!(back.len(), summaries.len());
    assert_eq!(render_report(&back), render_report(&summaries));
}

#[test]
fn contradiction_pair_needs_one_query_per_run() {
    let dpi = Dpi::from_axioms(["A", "(not A)"]).unwrap();
    let mut grid = FactorGrid::new(vec![("pair".into(), dpi)], 1);
    grid.dists = vec![DistributionKind::Eq];
    grid.prob_choices = 1;
    grid.ld_values = vec![6];
    grid.runs_per_cell = 6;
    let out = run_grid(&grid, 1).unwrap();
    for s in pool_scenarios(&out.cells) {
        assert_eq!(s.mean_q, Some(1.0), "{:?}", s.key);
        // Only two possible targets survive deduplication.
        assert!(s.n_runs <= 2 && s.n_runs >= 1);
    }
    assert!(out.runs.iter().all(|r| r.n_queries == 1 && !r.aborted));
}
