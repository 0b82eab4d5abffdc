//! Parameter sweeps over threshold, beamwidth or LOS fraction, and the search for the
//! coverage-maximizing beamwidth.

use std::fmt;

use rayon::prelude::*;

use crate::coverage::{coverage, Alignment, CoverageMode, CoverageQuery, CoverageResult};
use crate::error::{Error, Result};
use crate::netmodel::{db_to_linear, AntennaMode, BlockageModel, NetworkConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    ThresholdDb,
    BeamwidthDeg,
    LosFraction,
}

impl SweepAxis {
    /// CSV column name of the axis.
    pub fn column(&self) -> &'static str {
        match self {
            SweepAxis::ThresholdDb => "threshold_db",
            SweepAxis::BeamwidthDeg => "beamwidth_deg",
            SweepAxis::LosFraction => "los_fraction",
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.column())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: NetworkConfig,
    pub axis: SweepAxis,
    /// Strictly increasing axis values in axis units.
    pub grid: Vec<f64>,
    /// Threshold used when the axis is not the threshold.
    pub threshold_db: f64,
    pub modes: Vec<(CoverageMode, Alignment)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub axis_value: f64,
    pub threshold_db: f64,
    pub result: CoverageResult,
}

impl SweepSpec {
    fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::domain("sweep grid", "must not be empty"));
        }
        if self.grid.windows(2).any(|w| !(w[1] > w[0])) || self.grid.iter().any(|v| !v.is_finite())
        {
            return Err(Error::domain(
                "sweep grid",
                "values must be finite and strictly increasing",
            ));
        }
        if self.modes.is_empty() {
            return Err(Error::domain(
                "sweep modes",
                "at least one mode is required",
            ));
        }
        Ok(())
    }

    /// Network and threshold (dB) at one grid point.
    fn point(&self, value: f64) -> Result<(NetworkConfig, f64)> {
        Ok(match self.axis {
            SweepAxis::ThresholdDb => (self.base.clone(), value),
            SweepAxis::BeamwidthDeg => (
                self.base.with_beamwidth(value.to_radians())?,
                self.threshold_db,
            ),
            SweepAxis::LosFraction => (
                self.base
                    .with_blockage(BlockageModel::new(value, self.base.blockage.los_radius)?),
                self.threshold_db,
            ),
        })
    }
}

/// One row per grid point and mode, ordered by (axis value, position in `modes`).
pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let jobs: Vec<(f64, CoverageMode, Alignment)> = spec
        .grid
        .iter()
        .flat_map(|&v| spec.modes.iter().map(move |&(m, a)| (v, m, a)))
        .collect();
    jobs.par_iter()
        .map(|&(value, mode, alignment)| {
            let (network, threshold_db) = spec.point(value)?;
            let query = CoverageQuery::new(&network, db_to_linear(threshold_db), mode, alignment);
            Ok(SweepRow {
                axis_value: value,
                threshold_db,
                result: coverage(&query)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RangeBoundary {
    Lower,
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamwidthOptimum {
    /// Maximizing beamwidth, radians.
    pub beamwidth: f64,
    pub coverage: f64,
    /// Set when the maximum sits on an end of the search range.
    pub boundary: Option<RangeBoundary>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizeOptions {
    pub mode: CoverageMode,
    /// Coarse grid spacing, radians.
    pub grid_step: f64,
    /// Final bracket width of the golden-section refinement, radians.
    pub tolerance: f64,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self {
            mode: CoverageMode::PaperLiteral,
            grid_step: 0.5f64.to_radians(),
            tolerance: 0.1f64.to_radians(),
        }
    }
}

/// Maximizes coverage (with alignment errors) over a common BS/UE beamwidth.
///
/// Main-lobe gain and alignment probability both move with the beamwidth, so the
/// antennas must be in derived mode and the steering error must be positive. A coarse
/// grid locates the best cell, then golden-section search refines inside it.
pub fn optimal_beamwidth(
    base: &NetworkConfig,
    threshold: f64,
    range: (f64, f64),
    opts: &OptimizeOptions,
) -> Result<BeamwidthOptimum> {
    if base.bs_pattern.mode() != AntennaMode::Derived
        || base.ue_pattern.mode() != AntennaMode::Derived
    {
        return Err(Error::domain(
            "antenna mode",
            "beamwidth optimization needs derived antenna patterns",
        ));
    }
    if !(base.steering_sigma > 0.0) {
        return Err(Error::domain(
            "steering_sigma",
            "beamwidth optimization needs a positive steering error",
        ));
    }
    let (lo, hi) = range;
    if !(lo > 0.0 && hi >= lo && hi < 2.0 * std::f64::consts::PI) {
        return Err(Error::domain(
            "beamwidth range",
            format!("need 0 < lo ≤ hi < 2π rad, got ({lo}, {hi})"),
        ));
    }
    let eval = |w: f64| -> Result<f64> {
        let net = base.with_beamwidth(w)?;
        Ok(coverage(&CoverageQuery::new(
            &net,
            threshold,
            opts.mode,
            Alignment::WithErrors,
        ))?
        .p_cov)
    };
    if hi == lo {
        return Ok(BeamwidthOptimum {
            beamwidth: lo,
            coverage: eval(lo)?,
            boundary: None,
        });
    }

    let cells = ((hi - lo) / opts.grid_step).ceil().max(1.0) as usize;
    let grid: Vec<f64> = (0..=cells)
        .map(|i| lo + (hi - lo) * i as f64 / cells as f64)
        .collect();
    let values: Vec<f64> = grid.par_iter().map(|&w| eval(w)).collect::<Result<_>>()?;
    let best = values
        .iter()
        .enumerate()
        .fold(0, |b, (i, v)| if *v > values[b] { i } else { b });

    let (mut a, mut b) = (grid[best.saturating_sub(1)], grid[(best + 1).min(cells)]);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = eval(x1)?;
    let mut f2 = eval(x2)?;
    while b - a > opts.tolerance {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = eval(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = eval(x2)?;
        }
    }
    let (mut beamwidth, mut value) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    if values[best] > value {
        beamwidth = grid[best];
        value = values[best];
    }

    let boundary = if values[0] >= value {
        beamwidth = lo;
        value = values[0];
        Some(RangeBoundary::Lower)
    } else if values[cells] >= value {
        beamwidth = hi;
        value = values[cells];
        Some(RangeBoundary::Upper)
    } else {
        None
    };
    Ok(BeamwidthOptimum {
        beamwidth,
        coverage: value,
        boundary,
    })
}
