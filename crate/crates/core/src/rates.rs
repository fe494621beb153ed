//! Convergence-rate fits over sweep histories.
//!
//! Linear convergence `gapₜ₊₁ ≤ r·gapₜ` shows as a straight line in
//! `log gap` against `t`; power-law decay `valueₜ ~ t^κ` as a straight line
//! in `log value` against `log t`. Both fits are plain least squares over a
//! tail window, with no randomness.

use std::fmt;
use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::model::DualPoint;
use crate::oracle::tight_instance;
use crate::solver::HISTORY_COLUMNS;

/// Minimum series length accepted by [`fit_linear_ratio`].
pub const MIN_LINEAR_LEN: usize = 20;
/// Minimum window length accepted by [`fit_power_law`].
pub const MIN_POWER_WINDOW: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateMode {
    Linear,
    PowerLaw,
}

impl fmt::Display for RateMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Linear => "linear",
            Self::PowerLaw => "power_law",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    pub mode: RateMode,
    /// Ratio `r̂` for linear fits, exponent `κ̂` for power-law fits.
    pub parameter: f64,
    /// Coefficient of determination of the fit in log space, in `[0, 1]`.
    pub r_squared: f64,
    /// Root-mean-square residual of the log-space fit.
    pub fit_residual: f64,
    /// First and last index (inclusive) of the fitted window.
    pub window: (usize, usize),
}

impl RateReport {
    /// Whether the fitted model decays: `r̂ < 1` or `κ̂ < 0`.
    pub fn is_convergent(&self) -> bool {
        match self.mode {
            RateMode::Linear => self.parameter < 1.0,
            RateMode::PowerLaw => self.parameter < 0.0,
        }
    }
}

struct LineFit {
    slope: f64,
    r_squared: f64,
    rms: f64,
}

fn least_squares(xs: &[f64], ys: &[f64]) -> LineFit {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let r_squared = if syy > 0.0 {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    } else if ss_res <= f64::EPSILON * (1.0 + my * my) * n {
        1.0
    } else {
        0.0
    };
    LineFit {
        slope,
        r_squared,
        rms: (ss_res / n).sqrt(),
    }
}

/// Gaps below this are rounding noise for an optimal value `d_star`.
pub fn gap_noise_floor(d_star: f64) -> f64 {
    1e2 * f64::EPSILON * d_star.abs()
}

/// [`fit_linear_ratio_above`] with no noise floor beyond positivity.
pub fn fit_linear_ratio(gaps: &[f64]) -> Result<RateReport> {
    fit_linear_ratio_above(gaps, 0.0)
}

/// Fits `log gapₜ ≈ c + t·log r̂` over the last half of the series, after
/// cutting it at the first entry `≤ floor` (or non-finite).
pub fn fit_linear_ratio_above(gaps: &[f64], floor: f64) -> Result<RateReport> {
    let usable = gaps
        .iter()
        .position(|g| !(g.is_finite() && *g > floor))
        .unwrap_or(gaps.len());
    if usable < MIN_LINEAR_LEN {
        return Err(Error::InvalidArgument(format!(
            "linear fit needs at least {MIN_LINEAR_LEN} gaps above {floor:e}, got {usable}"
        )));
    }
    let start = usable / 2;
    let xs: Vec<f64> = (start..usable).map(|t| t as f64).collect();
    let ys: Vec<f64> = gaps[start..usable].iter().map(|g| g.ln()).collect();
    let fit = least_squares(&xs, &ys);
    Ok(RateReport {
        mode: RateMode::Linear,
        parameter: fit.slope.exp(),
        r_squared: fit.r_squared,
        fit_residual: fit.rms,
        window: (start, usable - 1),
    })
}

/// Fits `log valueᵢ ≈ c + κ̂·log(i + 1)` over indices `skip..`, i.e. entry
/// `i` is taken to be the value after `i + 1` iterations.
pub fn fit_power_law(values: &[f64], skip: usize) -> Result<RateReport> {
    if values.len() < skip + MIN_POWER_WINDOW {
        return Err(Error::InvalidArgument(format!(
            "power-law fit needs at least {MIN_POWER_WINDOW} values after skipping {skip}, got {}",
            values.len().saturating_sub(skip)
        )));
    }
    let window = &values[skip..];
    if let Some(i) = window.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "power-law fit needs positive values; entry {} is {}",
            skip + i,
            window[i]
        )));
    }
    let xs: Vec<f64> = (skip..values.len()).map(|i| ((i + 1) as f64).ln()).collect();
    let ys: Vec<f64> = window.iter().map(|v| v.ln()).collect();
    let fit = least_squares(&xs, &ys);
    Ok(RateReport {
        mode: RateMode::PowerLaw,
        parameter: fit.slope,
        r_squared: fit.r_squared,
        fit_residual: fit.rms,
        window: (skip, values.len() - 1),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathExponentFit {
    /// Fitted exponent of `d(y^ε) − d*` against `ε`.
    pub exponent: f64,
    /// `p/(p − 1)`
    pub expected: f64,
    /// Fitted exponent of `dist(y^ε, Argmin d)` against `ε`.
    pub dist_exponent: f64,
    pub r_squared: f64,
}

/// Evaluates the dual objective of the tight p-ball instance along
/// `y^ε = (1, ε)` and fits the growth exponents of the gap and of the
/// distance to the minimizer `(1, 0)`.
pub fn fit_path_exponent(p: f64, eps_grid: &[f64]) -> Result<PathExponentFit> {
    if !(p > 1.0 && p <= 2.0) {
        return Err(Error::InvalidArgument(format!("p must lie in (1, 2], got {p}")));
    }
    if eps_grid.len() < 6 {
        return Err(Error::InvalidArgument("eps grid needs at least 6 points".into()));
    }
    if eps_grid.iter().any(|e| !(*e > 0.0 && *e <= 0.1)) {
        return Err(Error::InvalidArgument("eps grid must lie in (0, 0.1]".into()));
    }
    let ratio = eps_grid[1] / eps_grid[0];
    if eps_grid
        .windows(2)
        .any(|w| ((w[1] / w[0]) / ratio - 1.0).abs() > 1e-6)
        || ratio == 1.0
    {
        return Err(Error::InvalidArgument("eps grid must be geometric".into()));
    }

    let inst = tight_instance(p)?;
    let y_star = DualPoint::new(vec![vec![1.0, 0.0]]);
    let d_star = inst
        .dual_objective(&y_star)?
        .finite()
        .ok_or_else(|| Error::InvalidArgument("dual objective is infinite at (1, 0)".into()))?;
    let mut log_eps = Vec::with_capacity(eps_grid.len());
    let mut log_gap = Vec::with_capacity(eps_grid.len());
    let mut log_dist = Vec::with_capacity(eps_grid.len());
    for &eps in eps_grid {
        let y = DualPoint::new(vec![vec![1.0, eps]]);
        let d = inst.dual_objective(&y)?.finite().ok_or_else(|| {
            Error::InvalidArgument(format!("dual objective is infinite at (1, {eps})"))
        })?;
        let gap = d - d_star;
        if !(gap > gap_noise_floor(d_star)) {
            return Err(Error::InvalidArgument(format!(
                "gap {gap:e} at eps = {eps} is below the rounding floor; use a coarser grid"
            )));
        }
        log_eps.push(eps.ln());
        log_gap.push(gap.ln());
        log_dist.push(y.dist(&y_star).ln());
    }
    let gap_fit = least_squares(&log_eps, &log_gap);
    let dist_fit = least_squares(&log_eps, &log_dist);
    Ok(PathExponentFit {
        exponent: gap_fit.slope,
        expected: p / (p - 1.0),
        dist_exponent: dist_fit.slope,
        r_squared: gap_fit.r_squared,
    })
}

/// Columns of a solver history CSV.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct History {
    pub sweep: Vec<usize>,
    pub d_value: Vec<f64>,
    pub step_norm: Vec<f64>,
    pub residual_norm: Vec<f64>,
    pub gap: Vec<Option<f64>>,
    pub dist_argmin: Vec<Option<f64>>,
}

impl History {
    pub fn len(&self) -> usize {
        self.sweep.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sweep.is_empty()
    }

    /// The gap column when every row has one.
    pub fn gaps(&self) -> Option<Vec<f64>> {
        self.gap.iter().copied().collect()
    }

    pub fn dists(&self) -> Option<Vec<f64>> {
        self.dist_argmin.iter().copied().collect()
    }

    /// `d*` implied by the first row carrying both `d_value` and `gap`.
    pub fn implied_d_star(&self) -> Option<f64> {
        self.d_value
            .iter()
            .zip(&self.gap)
            .find_map(|(d, g)| g.filter(|_| d.is_finite()).map(|g| d - g))
    }
}

fn parse_err(path: String, message: impl Into<String>) -> Error {
    Error::Parse {
        path,
        message: message.into(),
    }
}

fn parse_number(text: &str, row: usize, col: &str) -> Result<f64> {
    match text {
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => text
            .parse()
            .map_err(|_| parse_err(format!("row {row}/{col}"), format!("not a number: `{text}`"))),
    }
}

fn parse_optional(text: &str, row: usize, col: &str) -> Result<Option<f64>> {
    if text.is_empty() {
        Ok(None)
    } else {
        parse_number(text, row, col).map(Some)
    }
}

/// Reads a history written by [`crate::solver::write_history_csv`].
pub fn read_history_csv<R: Read>(input: R) -> Result<History> {
    let mut reader = csv::ReaderBuilder::new().flexible(false).from_reader(input);
    let header = reader
        .headers()
        .map_err(|e| parse_err("header".into(), e.to_string()))?
        .clone();
    if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
        return Err(parse_err("header".into(), "empty history"));
    }
    if header.len() < HISTORY_COLUMNS.len()
        || header.iter().zip(HISTORY_COLUMNS).any(|(h, want)| h != want)
    {
        return Err(parse_err(
            "header".into(),
            format!("expected columns {}", HISTORY_COLUMNS.join(",")),
        ));
    }
    let mut h = History::default();
    for (i, rec) in reader.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| parse_err(format!("row {row}"), e.to_string()))?;
        h.sweep.push(
            rec[0]
                .parse()
                .map_err(|_| parse_err(format!("row {row}/sweep"), format!("not an integer: `{}`", &rec[0])))?,
        );
        h.d_value.push(parse_number(&rec[1], row, "d_value")?);
        h.step_norm.push(parse_number(&rec[2], row, "step_norm")?);
        h.residual_norm.push(parse_number(&rec[3], row, "residual_norm")?);
        h.gap.push(parse_optional(&rec[4], row, "gap")?);
        h.dist_argmin.push(parse_optional(&rec[5], row, "dist_argmin")?);
    }
    if h.is_empty() {
        return Err(parse_err("rows".into(), "history has no rows"));
    }
    Ok(h)
}

/// Writes `mode,parameter,r_squared,window_start,window_end`.
pub fn write_rate_report_csv<W: Write>(report: &RateReport, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(["mode", "parameter", "r_squared", "window_start", "window_end"])?;
    w.write_record([
        report.mode.to_string(),
        format!("{:.16e}", report.parameter),
        format!("{:.16e}", report.r_squared),
        report.window.0.to_string(),
        report.window.1.to_string(),
    ])?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_geometric_sequence() {
        let gaps: Vec<f64> = (0..40).map(|t| 0.5f64.powi(t)).collect();
        let r = fit_linear_ratio(&gaps).unwrap();
        assert!((r.parameter - 0.5).abs() < 1e-12);
        assert!(r.r_squared > 1.0 - 1e-12);
        assert_eq!(r.window, (20, 39));
        assert!(r.is_convergent());
    }

    #[test]
    fn constant_sequence_is_not_convergent() {
        let r = fit_linear_ratio(&[3.0; 30]).unwrap();
        assert!((r.parameter - 1.0).abs() < 1e-15);
        assert!(!r.is_convergent());
    }

    #[test]
    fn floor_truncates_series() {
        let mut gaps: Vec<f64> = (0..30).map(|t| 0.8f64.powi(t)).collect();
        gaps.extend([1e-20, 5e-19, 2e-20]);
        let r = fit_linear_ratio_above(&gaps, 1e-16).unwrap();
        assert_eq!(r.window.1, 29);
        assert!((r.parameter - 0.8).abs() < 1e-12);
    }

    #[test]
    fn short_or_nonpositive_input_is_rejected() {
        assert!(fit_linear_ratio(&[1.0; 10]).is_err());
        let mut gaps = vec![1.0; 30];
        gaps[5] = 0.0;
        assert!(fit_linear_ratio(&gaps).is_err());
        assert!(fit_power_law(&[1.0; 40], 0).is_err());
        let mut v = vec![1.0; 80];
        v[70] = -1.0;
        assert!(fit_power_law(&v, 10).is_err());
    }

    #[test]
    fn inverse_sequence_has_unit_exponent() {
        let v: Vec<f64> = (0..500).map(|t| 1.0 / (t as f64 + 1.0)).collect();
        let r = fit_power_law(&v, 0).unwrap();
        assert!((r.parameter + 1.0).abs() < 1e-6);
        assert!(r.is_convergent());
    }

    #[test]
    fn path_exponent_input_checks() {
        let grid: Vec<f64> = (0..8).map(|k| 0.1 * 0.5f64.powi(k)).collect();
        assert!(fit_path_exponent(3.0, &grid).is_err());
        assert!(fit_path_exponent(1.5, &grid[..4]).is_err());
        let mut bad = grid.clone();
        bad[3] *= 1.1;
        assert!(fit_path_exponent(1.5, &bad).is_err());
        assert!(fit_path_exponent(1.5, &[0.2, 0.1, 0.05, 0.025, 0.0125, 0.00625]).is_err());
        // ε¹¹ vanishes below double precision long before ε = 1e-3
        assert!(fit_path_exponent(1.1, &grid).is_err());
    }

    #[test]
    fn history_reader_rejects_bad_input() {
        assert!(read_history_csv("".as_bytes()).is_err());
        assert!(read_history_csv("a,b,c\n1,2,3\n".as_bytes()).is_err());
        let header = HISTORY_COLUMNS.join(",");
        assert!(read_history_csv(format!("{header}\n").as_bytes()).is_err());
        let h = read_history_csv(format!("{header}\n1,inf,0.5,0.25,,\n").as_bytes()).unwrap();
        assert_eq!(h.d_value, vec![f64::INFINITY]);
        assert_eq!(h.gap, vec![None]);
        assert!(read_history_csv(format!("{header}\n1,x,0.5,0.25,,\n").as_bytes()).is_err());
    }

    #[test]
    fn report_csv_format() {
        let r = RateReport {
            mode: RateMode::PowerLaw,
            parameter: -1.0,
            r_squared: 0.5,
            fit_residual: 0.0,
            window: (999, 99_999),
        };
        let mut buf = Vec::new();
        write_rate_report_csv(&r, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "mode,parameter,r_squared,window_start,window_end\npower_law,-1.0000000000000000e0,5.0000000000000000e-1,999,99999\n"
        );
    }
}
