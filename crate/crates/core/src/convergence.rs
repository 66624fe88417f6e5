//! Grid-refinement ladders and empirical convergence rates.
//!
//! For three successive levels `2dt, dt, dt/2` at a fixed physical node,
//!
//! ```text
//! R = (f(dt) - f(2dt)) / (f(dt/2) - f(dt)),   p = log2 R
//! ```
//!
//! and the rate is reported against the middle level `dt`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::problem::ProblemSpec;
use crate::solver::{solve_with, SolveError, SolveOptions};

/// Relative size below which a ladder difference counts as zero.
pub const DEGENERATE_TOLERANCE: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RateError {
    #[error("a rate needs at least 3 ladder values, got {0}")]
    TooShort(usize),
    #[error("degenerate ladder at level {level}: successive values do not change")]
    DegenerateLadder { level: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StudyError {
    #[error("grid list is empty")]
    EmptyLadder,
    #[error("grid sizes must strictly double: {prev} is followed by {next}")]
    NotDoubling { prev: usize, next: usize },
    #[error("probe {probe} does not fall on a node of the n = {n} grid")]
    ProbeOffGrid { probe: ProbeFraction, n: usize },
    #[error("solve failed for n = {n}: {source}")]
    Solve {
        n: usize,
        #[source]
        source: SolveError,
    },
    #[error("rate estimation failed at probe {probe}: {source}")]
    Rate {
        probe: ProbeFraction,
        #[source]
        source: RateError,
    },
}

/// Probe location as an exact fraction `num/den` of the domain length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ProbeFraction {
    num: usize,
    den: usize,
}

impl ProbeFraction {
    /// Requires `0 <= num <= den` and `den > 0`.
    pub fn new(num: usize, den: usize) -> Option<Self> {
        (den > 0 && num <= den).then_some(Self { num, den })
    }

    pub fn num(&self) -> usize {
        self.num
    }

    pub fn den(&self) -> usize {
        self.den
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Node index `n * num / den`, if it is an integer.
    pub fn node_index(&self, n: usize) -> Option<usize> {
        let scaled = n.checked_mul(self.num)?;
        (scaled % self.den == 0).then(|| scaled / self.den)
    }

    /// The default probes 1/4, 1/2, 3/4.
    pub fn quartiles() -> Vec<Self> {
        vec![Self { num: 1, den: 4 }, Self { num: 1, den: 2 }, Self { num: 3, den: 4 }]
    }
}

impl fmt::Display for ProbeFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid probe `{0}`: expected a fraction `num/den` in [0, 1]")]
pub struct ProbeParseError(String);

impl FromStr for ProbeFraction {
    type Err = ProbeParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ProbeParseError(s.to_string());
        let (num, den) = s.trim().split_once('/').ok_or_else(err)?;
        let num = num.trim().parse().map_err(|_| err())?;
        let den = den.trim().parse().map_err(|_| err())?;
        Self::new(num, den).ok_or_else(err)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LadderLevel {
    pub n: usize,
    pub dt: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRecord {
    pub probe: ProbeFraction,
    pub ladder: Vec<LadderLevel>,
    /// `ratios[k]` and `rates[k]` belong to `ladder[k + 1]`.
    pub ratios: Vec<f64>,
    pub rates: Vec<f64>,
}

impl ConvergenceRecord {
    /// Rate reported beside ladder level `level`, if it has both neighbours.
    pub fn rate_at(&self, level: usize) -> Option<f64> {
        level.checked_sub(1).and_then(|k| self.rates.get(k).copied())
    }
}

/// Ratios `R` for each middle level of the ladder.
pub fn ratios_from_ladder(values: &[f64]) -> Result<Vec<f64>, RateError> {
    if values.len() < 3 {
        return Err(RateError::TooShort(values.len()));
    }
    values
        .windows(3)
        .enumerate()
        .map(|(k, w)| {
            let coarse = w[1] - w[0];
            let fine = w[2] - w[1];
            let scale = w[1].abs().max(w[2].abs());
            if fine.abs() <= DEGENERATE_TOLERANCE * scale || !(fine.is_finite() && coarse.is_finite()) {
                return Err(RateError::DegenerateLadder { level: k + 1 });
            }
            Ok(coarse / fine)
        })
        .collect()
}

/// Rates `p = log2 R` for each middle level of the ladder (ordered from the
/// coarsest grid to the finest).
pub fn rate_from_ladder(values: &[f64]) -> Result<Vec<f64>, RateError> {
    Ok(ratios_from_ladder(values)?.into_iter().map(f64::log2).collect())
}

/// Checks that `n_list` doubles and that every probe lands on a node.
pub fn validate_study(n_list: &[usize], probes: &[ProbeFraction]) -> Result<(), StudyError> {
    if n_list.is_empty() {
        return Err(StudyError::EmptyLadder);
    }
    for w in n_list.windows(2) {
        if w[0].checked_mul(2) != Some(w[1]) {
            return Err(StudyError::NotDoubling { prev: w[0], next: w[1] });
        }
    }
    for &n in n_list {
        for &probe in probes {
            if probe.node_index(n).is_none() {
                return Err(StudyError::ProbeOffGrid { probe, n });
            }
        }
    }
    Ok(())
}

/// Solves independently on each grid of `n_list` and tabulates probe values
/// and rates. Ladders with fewer than three levels carry no rates.
pub fn run_study(
    spec: &ProblemSpec,
    n_list: &[usize],
    probes: &[ProbeFraction],
) -> Result<Vec<ConvergenceRecord>, StudyError> {
    run_study_with(spec, n_list, probes, SolveOptions::default())
}

pub fn run_study_with(
    spec: &ProblemSpec,
    n_list: &[usize],
    probes: &[ProbeFraction],
    options: SolveOptions,
) -> Result<Vec<ConvergenceRecord>, StudyError> {
    validate_study(n_list, probes)?;
    let mut ladders: Vec<Vec<LadderLevel>> = vec![Vec::with_capacity(n_list.len()); probes.len()];
    for &n in n_list {
        let solution = solve_with(spec, n, options).map_err(|source| StudyError::Solve { n, source })?;
        let dt = solution.grid().dt();
        for (ladder, probe) in ladders.iter_mut().zip(probes) {
            let index = probe.node_index(n).expect("validated probe");
            ladder.push(LadderLevel { n, dt, value: solution.at(index) });
        }
    }

    probes
        .iter()
        .zip(ladders)
        .map(|(&probe, ladder)| {
            let (ratios, rates) = if ladder.len() >= 3 {
                let values: Vec<f64> = ladder.iter().map(|l| l.value).collect();
                let ratios =
                    ratios_from_ladder(&values).map_err(|source| StudyError::Rate { probe, source })?;
                let rates = ratios.iter().map(|r| r.log2()).collect();
                (ratios, rates)
            } else {
                (Vec::new(), Vec::new())
            };
            Ok(ConvergenceRecord { probe, ladder, ratios, rates })
        })
        .collect()
}
