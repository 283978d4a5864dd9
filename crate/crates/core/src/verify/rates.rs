//! Convergence-order fitting and the tabulated results of a mesh study.

use serde::Serialize;

use crate::error::{Error, Result};

/// Fitted orders of one error sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateFit {
    /// Least-squares slope of `log e` against `log h` over all points.
    pub least_squares: Option<f64>,
    /// Slope over the last refinement interval.
    pub last_interval: Option<f64>,
    /// Whether the errors decrease strictly under refinement.
    pub monotone: bool,
}

impl RateFit {
    /// The order used for acceptance: the last-interval slope of a
    /// monotone sequence.
    pub fn order(&self) -> Option<f64> {
        self.last_interval
    }
}

/// Fits convergence orders. `h` must be strictly decreasing and the errors
/// positive. A sequence that grows somewhere is flagged instead of fitted.
pub fn fit_rate(h: &[f64], errors: &[f64]) -> Result<RateFit> {
    if h.len() != errors.len() || h.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "rate fit needs at least two (h, error) pairs of equal length, got {} and {}",
            h.len(),
            errors.len()
        )));
    }
    if h.windows(2).any(|w| w[1] >= w[0]) || h.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::InvalidArgument("mesh sizes must be positive and strictly decreasing".into()));
    }
    if errors.iter().any(|&e| !(e > 0.0) || !e.is_finite()) {
        return Err(Error::InvalidArgument("errors must be positive and finite".into()));
    }
    let monotone = errors.windows(2).all(|w| w[1] < w[0]);
    if !monotone {
        return Ok(RateFit {
            least_squares: None,
            last_interval: None,
            monotone,
        });
    }
    let lx: Vec<f64> = h.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = errors.iter().map(|x| x.ln()).collect();
    let k = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / k, ly.iter().sum::<f64>() / k);
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    let m = lx.len();
    Ok(RateFit {
        least_squares: Some(sxy / sxx),
        last_interval: Some((ly[m - 1] - ly[m - 2]) / (lx[m - 1] - lx[m - 2])),
        monotone,
    })
}

/// Errors of one Stokes solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateRow {
    pub n: usize,
    pub h: f64,
    pub err_u_h1: f64,
    pub err_u_l2: f64,
    pub err_p_l2: f64,
    pub div_u_l2: f64,
}

/// Fitted orders for every norm of a [`RateTable`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormRates {
    pub err_u_h1: RateFit,
    pub err_u_l2: RateFit,
    pub err_p_l2: RateFit,
    pub div_u_l2: RateFit,
}

/// Errors per mesh and the orders fitted from them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateTable {
    pub rows: Vec<RateRow>,
    pub rates: NormRates,
}

pub const RATE_CSV_HEADER: &str = "n,h,err_u_H1,err_u_L2,err_p_L2,div_u_L2";

impl RateTable {
    /// Builds the table; `rows` must have strictly increasing `n`.
    pub fn new(mut rows: Vec<RateRow>) -> Result<Self> {
        rows.sort_by_key(|r| r.n);
        if rows.windows(2).any(|w| w[0].n == w[1].n) {
            return Err(Error::InvalidArgument("mesh resolutions must be distinct".into()));
        }
        let h: Vec<f64> = rows.iter().map(|r| r.h).collect();
        let fit = |f: fn(&RateRow) -> f64| fit_rate(&h, &rows.iter().map(f).collect::<Vec<_>>());
        let rates = NormRates {
            err_u_h1: fit(|r| r.err_u_h1)?,
            err_u_l2: fit(|r| r.err_u_l2)?,
            err_p_l2: fit(|r| r.err_p_l2)?,
            div_u_l2: fit(|r| r.div_u_l2)?,
        };
        Ok(Self { rows, rates })
    }

    /// True if every error sequence decreases strictly.
    pub fn monotone(&self) -> bool {
        let r = &self.rates;
        r.err_u_h1.monotone && r.err_u_l2.monotone && r.err_p_l2.monotone && r.div_u_l2.monotone
    }

    pub fn to_csv(&self) -> String {
        let mut s = format!("{RATE_CSV_HEADER}\n");
        for r in &self.rows {
            s += &format!(
                "{},{:e},{:e},{:e},{:e},{:e}\n",
                r.n, r.h, r.err_u_h1, r.err_u_l2, r.err_p_l2, r.div_u_l2
            );
        }
        s
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
