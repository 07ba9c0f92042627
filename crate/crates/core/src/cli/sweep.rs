//! Regime/sum-GDoF sweep over the symmetric two-cell family.

use std::io;

use thiserror::Error;

use crate::network::{canonicalize, symmetric_two_cell_unordered};
use crate::polytope::sum_gdof;
use crate::rational::{q, Rational};
use crate::regime::{is_ctin, is_tin};

/// Sum-GDoF of multi-cell interference alignment on the symmetric two-cell
/// network at `alpha = 1/2` under perfect CSIT (Suh & Tse). Used only as a
/// benchmark constant on those rows.
pub fn ia_benchmark() -> Rational {
    q(4, 3)
}

const DECIMAL_DIGITS: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepOutput {
    Regime,
    SumGdof,
    IaGap,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Range {
    pub min: Rational,
    pub max: Rational,
    pub step: Rational,
}

impl Range {
    pub fn values(&self) -> Vec<Rational> {
        let count = ((self.max - self.min) / self.step).floor();
        (0..=count)
            .map(|i| self.min + self.step * Rational::from_integer(i))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepSpec {
    pub alpha: Range,
    pub beta: Range,
    pub outputs: Vec<SweepOutput>,
}

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("{0} step must be positive")]
    Step(&'static str),
    #[error("{0} range must satisfy 0 <= min <= max <= 1")]
    Range(&'static str),
    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] io::Error),
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), SweepError> {
        for (name, r) in [("alpha", &self.alpha), ("beta", &self.beta)] {
            if !r.step.is_positive() {
                return Err(SweepError::Step(name));
            }
            if r.min.is_negative() || r.min > r.max || r.max > Rational::ONE {
                return Err(SweepError::Range(name));
            }
        }
        Ok(())
    }

    fn wants(&self, o: SweepOutput) -> bool {
        self.outputs.contains(&o)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepRow {
    pub alpha: Rational,
    pub beta: Rational,
    /// `None` when `beta > alpha` or the output was not requested.
    pub ctin: Option<bool>,
    pub tin: Option<bool>,
    pub sum_gdof: Option<Rational>,
    pub ia_gap: Option<Rational>,
}

pub fn sweep_row(spec: &SweepSpec, alpha: Rational, beta: Rational) -> SweepRow {
    let mut row = SweepRow {
        alpha,
        beta,
        ctin: None,
        tin: None,
        sum_gdof: None,
        ia_gap: None,
    };
    if beta > alpha {
        return row;
    }
    let net = symmetric_two_cell_unordered(alpha, beta).expect("strengths in [0, 1]");
    let (net, _) = canonicalize(&net);
    if spec.wants(SweepOutput::Regime) {
        row.ctin = Some(is_ctin(&net).expect("canonical").regime_holds);
        row.tin = Some(is_tin(&net).expect("canonical").regime_holds);
    }
    let total = if spec.wants(SweepOutput::SumGdof) || spec.wants(SweepOutput::IaGap) {
        sum_gdof(&net).ok()
    } else {
        None
    };
    if spec.wants(SweepOutput::SumGdof) {
        row.sum_gdof = total;
    }
    if spec.wants(SweepOutput::IaGap) && alpha == q(1, 2) {
        row.ia_gap = total.map(|s| ia_benchmark() - s);
    }
    row
}

pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>, SweepError> {
    use rayon::prelude::*;
    spec.validate()?;
    let alphas = spec.alpha.values();
    let betas = spec.beta.values();
    let pairs: Vec<(Rational, Rational)> = alphas
        .iter()
        .flat_map(|&a| betas.iter().map(move |&b| (a, b)))
        .collect();
    Ok(pairs
        .par_iter()
        .map(|&(a, b)| sweep_row(spec, a, b))
        .collect())
}

fn cell(v: Option<String>) -> String {
    v.unwrap_or_else(|| "n/a".to_string())
}

fn yes_no(b: bool) -> String {
    if b { "yes" } else { "no" }.to_string()
}

pub fn render(r: Rational) -> String {
    r.to_display_string(DECIMAL_DIGITS)
}

pub fn write_sweep_csv<W: io::Write>(rows: &[SweepRow], out: W) -> Result<(), SweepError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["alpha", "beta", "ctin", "tin", "sum_gdof", "ia_gap"])?;
    for r in rows {
        w.write_record([
            render(r.alpha),
            render(r.beta),
            cell(r.ctin.map(yes_no)),
            cell(r.tin.map(yes_no)),
            cell(r.sum_gdof.map(render)),
            cell(r.ia_gap.map(render)),
        ])?;
    }
    w.flush()?;
    Ok(())
}
