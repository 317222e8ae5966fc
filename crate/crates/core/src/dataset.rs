//! Dataset grids, difficulty annotation and JSONL persistence.
//!
//! A dataset file holds one JSON object per line, one line per pair. Every
//! record carries `schema_version`; readers reject versions they do not
//! know. Formulas are stored as DIMACS text.
//!
//! Difficulty counters come from this crate's own engine and oracles, so
//! their absolute values are not comparable to other solvers' statistics.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cnf::{parse_dimacs, serialize_dimacs};
use crate::engine::{self, SolverStats};
use crate::generator::{gen_cnf_pair, CnfPair, GenError, GenParams};
use crate::oracles;

pub const SCHEMA_VERSION: u32 = 1;

/// Variable counts, pairs per count and `m = 4n` for the evaluation grid.
pub const EVAL_VARS: std::ops::RangeInclusive<usize> = 3..=16;
pub const EVAL_PAIRS_PER_CELL: usize = 10;
/// Variable counts, ratios (in tenths) and pairs per cell for the RFT grid.
pub const RFT_VARS: std::ops::RangeInclusive<usize> = 3..=8;
pub const RFT_RATIO_TENTHS: std::ops::RangeInclusive<usize> = 21..=40;
pub const RFT_PAIRS_PER_CELL: usize = 25;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: unsupported schema version {found} (expected {SCHEMA_VERSION})")]
    Schema { line: usize, found: String },
    #[error("line {line}: corrupt record: {msg}")]
    Corrupt { line: usize, msg: String },
    #[error("record {pair_id}: {msg}")]
    InvalidPair { pair_id: String, msg: String },
    #[error("unknown pair id `{0}`")]
    UnknownPair(String),
    #[error(transparent)]
    Gen(#[from] GenError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DifficultyStats {
    /// Engine run on the satisfiable member (SATDP-sat / SATSP).
    pub sat: SolverStats,
    /// Engine run on the unsatisfiable member (SATDP-unsat).
    pub unsat: SolverStats,
    pub maxsat_nodes: u64,
    pub mcs_solver_calls: u64,
    pub mus_solver_calls: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub schema_version: u32,
    pub pair_id: String,
    pub params: GenParams,
    /// Clause-to-variable ratio of the grid cell, when the grid has one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    pub flip_count: u32,
    pub sat_dimacs: String,
    pub unsat_dimacs: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stats: Option<DifficultyStats>,
}

impl DatasetRecord {
    pub fn from_pair(pair_id: impl Into<String>, pair: &CnfPair, ratio: Option<f64>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            pair_id: pair_id.into(),
            params: pair.params,
            ratio,
            flip_count: pair.flip_count,
            sat_dimacs: serialize_dimacs(&pair.sat),
            unsat_dimacs: serialize_dimacs(&pair.unsat),
            stats: None,
        }
    }

    /// Re-parses both members and checks every pair invariant.
    pub fn pair(&self) -> Result<CnfPair, DatasetError> {
        let invalid = |msg: String| DatasetError::InvalidPair {
            pair_id: self.pair_id.clone(),
            msg,
        };
        let sat = parse_dimacs(&self.sat_dimacs).map_err(|e| invalid(format!("sat member: {e}")))?;
        let unsat = parse_dimacs(&self.unsat_dimacs).map_err(|e| invalid(format!("unsat member: {e}")))?;
        let pair = CnfPair {
            sat,
            unsat,
            params: self.params,
            flip_count: self.flip_count,
        };
        validate_pair(&pair).map_err(invalid)?;
        Ok(pair)
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    pub fn m(&self) -> usize {
        self.params.m
    }
}

/// SAT/UNSAT verdicts plus shared structure: same n, m and clause widths.
pub fn validate_pair(pair: &CnfPair) -> Result<(), String> {
    let (sat, unsat) = (&pair.sat, &pair.unsat);
    if sat.num_vars() != pair.params.n || unsat.num_vars() != pair.params.n {
        return Err(format!("variable count differs from n = {}", pair.params.n));
    }
    if sat.num_clauses() != pair.params.m || unsat.num_clauses() != pair.params.m {
        return Err(format!("clause count differs from m = {}", pair.params.m));
    }
    if sat.width_multiset() != unsat.width_multiset() {
        return Err("clause widths differ between members".into());
    }
    if !engine::is_satisfiable(sat) {
        return Err("sat member is unsatisfiable".into());
    }
    if engine::is_satisfiable(unsat) {
        return Err("unsat member is satisfiable".into());
    }
    Ok(())
}

pub fn annotate_difficulty(record: &DatasetRecord) -> Result<DatasetRecord, DatasetError> {
    let pair = record.pair()?;
    let oracle_err = |e: oracles::OracleError| DatasetError::InvalidPair {
        pair_id: record.pair_id.clone(),
        msg: e.to_string(),
    };
    let stats = DifficultyStats {
        sat: engine::solve(&pair.sat).stats,
        unsat: engine::solve(&pair.unsat).stats,
        maxsat_nodes: oracles::maxsat_optimum(&pair.unsat).nodes,
        mcs_solver_calls: oracles::find_one_mcs_counted(&pair.unsat)
            .map_err(oracle_err)?
            .solver_calls,
        mus_solver_calls: oracles::find_one_mus_counted(&pair.unsat)
            .map_err(oracle_err)?
            .solver_calls,
    };
    Ok(DatasetRecord {
        stats: Some(stats),
        ..record.clone()
    })
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    pub records: Vec<DatasetRecord>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, pair_id: &str) -> Result<&DatasetRecord, DatasetError> {
        self.records
            .iter()
            .find(|r| r.pair_id == pair_id)
            .ok_or_else(|| DatasetError::UnknownPair(pair_id.to_string()))
    }

    /// Annotates every record in parallel, keeping record order.
    pub fn annotate(&self) -> Result<Dataset, DatasetError> {
        let records = self
            .records
            .par_iter()
            .map(annotate_difficulty)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Dataset { records })
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for record in &self.records {
            out.push_str(&serde_json::to_string(record).expect("records serialize"));
            out.push('\n');
        }
        out
    }

    /// Parses JSONL and validates every pair.
    pub fn from_jsonl(text: &str) -> Result<Dataset, DatasetError> {
        let mut records = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            let value: serde_json::Value = serde_json::from_str(line).map_err(|e| DatasetError::Corrupt {
                line: line_no,
                msg: e.to_string(),
            })?;
            match value.get("schema_version") {
                Some(v) if v.as_u64() == Some(u64::from(SCHEMA_VERSION)) => {}
                Some(v) => {
                    return Err(DatasetError::Schema {
                        line: line_no,
                        found: v.to_string(),
                    })
                }
                None => {
                    return Err(DatasetError::Schema {
                        line: line_no,
                        found: "none".into(),
                    })
                }
            }
            let record: DatasetRecord = serde_json::from_value(value).map_err(|e| DatasetError::Corrupt {
                line: line_no,
                msg: e.to_string(),
            })?;
            records.push(record);
        }
        records.par_iter().try_for_each(|r| r.pair().map(drop))?;
        Ok(Dataset { records })
    }
}

pub fn write_dataset(path: impl AsRef<Path>, dataset: &Dataset) -> Result<(), DatasetError> {
    fs::write(path, dataset.to_jsonl())?;
    Ok(())
}

pub fn read_dataset(path: impl AsRef<Path>) -> Result<Dataset, DatasetError> {
    Dataset::from_jsonl(&fs::read_to_string(path)?)
}

struct Cell {
    pair_id: String,
    params: GenParams,
    ratio: Option<f64>,
}

fn build(cells: Vec<Cell>) -> Result<Dataset, DatasetError> {
    let records = cells
        .into_par_iter()
        .map(|cell| {
            let pair = gen_cnf_pair(&cell.params)?;
            Ok(DatasetRecord::from_pair(cell.pair_id, &pair, cell.ratio))
        })
        .collect::<Result<Vec<_>, DatasetError>>()?;
    Ok(Dataset { records })
}

/// 14 variable counts (3..=16) x 10 pairs, m = 4n. Pair `i` uses RNG
/// stream `i` of `seed`.
pub fn build_eval_grid(seed: u64) -> Result<Dataset, DatasetError> {
    let mut cells = Vec::new();
    for n in EVAL_VARS {
        let m = 4 * n;
        for k in 0..EVAL_PAIRS_PER_CELL {
            let stream = cells.len() as u64;
            cells.push(Cell {
                pair_id: format!("eval-n{n}-m{m}-{k}"),
                params: GenParams::new(n, m, seed).with_stream(stream),
                ratio: None,
            });
        }
    }
    build(cells)
}

/// `m = round(ratio * n)` with halves rounded up and at least `n + 1`.
pub fn rft_clause_count(n: usize, ratio_tenths: usize) -> usize {
    ((ratio_tenths * n + 5) / 10).max(n + 1)
}

/// 6 variable counts (3..=8) x 20 ratios (2.1..=4.0) x 25 pairs. Ratios that
/// round to the same m stay separate cells.
pub fn build_rft_grid(seed: u64) -> Result<Dataset, DatasetError> {
    let mut cells = Vec::new();
    for n in RFT_VARS {
        for tenths in RFT_RATIO_TENTHS {
            let m = rft_clause_count(n, tenths);
            for k in 0..RFT_PAIRS_PER_CELL {
                let stream = cells.len() as u64;
                cells.push(Cell {
                    pair_id: format!("rft-n{n}-r{}.{}-m{m}-{k}", tenths / 10, tenths % 10),
                    params: GenParams::new(n, m, seed).with_stream(stream),
                    ratio: Some(tenths as f64 / 10.0),
                });
            }
        }
    }
    build(cells)
}

/// Per-n medians of the difficulty counters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub n: usize,
    pub pairs: usize,
    pub sat_decisions: f64,
    pub unsat_decisions: f64,
    pub unsat_conflicts: f64,
    pub unsat_propagations: f64,
    pub maxsat_nodes: f64,
    pub mcs_solver_calls: f64,
    pub mus_solver_calls: f64,
}

pub fn median(values: &mut [u64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.sort_unstable();
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid] as f64
    } else {
        (values[mid - 1] as f64 + values[mid] as f64) / 2.0
    }
}

/// Aggregates difficulty per variable count, ascending in n. Records
/// without stats are annotated on the fly.
pub fn profile(dataset: &Dataset) -> Result<Vec<ProfileRow>, DatasetError> {
    let stats: Vec<(usize, DifficultyStats)> = dataset
        .records
        .par_iter()
        .map(|r| match r.stats {
            Some(s) => Ok((r.n(), s)),
            None => annotate_difficulty(r).map(|a| (r.n(), a.stats.expect("annotated"))),
        })
        .collect::<Result<_, DatasetError>>()?;
    let mut by_n: BTreeMap<usize, Vec<DifficultyStats>> = BTreeMap::new();
    for (n, s) in stats {
        by_n.entry(n).or_default().push(s);
    }
    Ok(by_n
        .into_iter()
        .map(|(n, group)| {
            let med = |f: fn(&DifficultyStats) -> u64| median(&mut group.iter().map(f).collect::<Vec<_>>());
            ProfileRow {
                n,
                pairs: group.len(),
                sat_decisions: med(|s| s.sat.decisions),
                unsat_decisions: med(|s| s.unsat.decisions),
                unsat_conflicts: med(|s| s.unsat.conflicts),
                unsat_propagations: med(|s| s.unsat.propagations),
                maxsat_nodes: med(|s| s.maxsat_nodes),
                mcs_solver_calls: med(|s| s.mcs_solver_calls),
                mus_solver_calls: med(|s| s.mus_solver_calls),
            }
        })
        .collect())
}
