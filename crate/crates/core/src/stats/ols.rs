//! Ordinary least squares with classical (homoskedastic) inference.
//!
//! The normal equations are solved with a pivoted Cholesky factorization of
//! the column-equilibrated cross-product matrix. A pivot below
//! [`RANK_TOLERANCE`] (condition estimate above 1e12) is reported as rank
//! deficiency, naming the columns that were left unpivoted.

use serde::{Deserialize, Serialize};

use super::data::DataMatrix;
use super::special::{f_sf, t_two_sided_p};
use super::StatsError;

pub const INTERCEPT: &str = "(Intercept)";
/// Smallest admissible squared pivot of the unit-diagonal cross-product matrix.
pub const RANK_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub name: String,
    pub estimate: f64,
    pub std_error: Option<f64>,
    pub t_value: Option<f64>,
    pub p_value: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FTestResult {
    pub f_value: f64,
    pub df1: usize,
    pub df2: usize,
    pub p_value: f64,
}

impl FTestResult {
    fn new(f_value: f64, df1: usize, df2: usize) -> Result<Self, StatsError> {
        let f_value = f_value.max(0.0);
        let p_value = if df1 == 0 || f_value == 0.0 {
            1.0
        } else {
            f_sf(f_value, df1 as f64, df2 as f64)?
        };
        Ok(Self {
            f_value,
            df1,
            df2,
            p_value,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OlsFit {
    pub response: String,
    /// Intercept first, then predictors in the order requested.
    pub coefficients: Vec<Coefficient>,
    pub n: usize,
    pub df_model: usize,
    pub df_resid: usize,
    pub rss: f64,
    pub tss: f64,
    pub r_squared: f64,
    /// Residual variance estimate; `None` when the fit has no residual df.
    pub sigma2: Option<f64>,
    /// Overall F test against the intercept-only model.
    pub f_test: Option<FTestResult>,
    #[serde(skip)]
    pub xtx_inverse: Vec<Vec<f64>>,
    #[serde(skip)]
    pub fitted: Vec<f64>,
    #[serde(skip)]
    pub residuals: Vec<f64>,
}

impl OlsFit {
    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.coefficients.iter().map(|c| c.name.as_str())
    }

    pub fn coefficient(&self, name: &str) -> Option<&Coefficient> {
        self.coefficients.iter().find(|c| c.name == name)
    }

    /// Estimates in coefficient order.
    pub fn estimates(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c.estimate).collect()
    }

    /// Builds a combination vector from `(name, weight)` pairs.
    pub fn combination(&self, weights: &[(&str, f64)]) -> Result<Vec<f64>, StatsError> {
        let mut out = vec![0.0; self.coefficients.len()];
        for (name, w) in weights {
            let idx = self
                .coefficients
                .iter()
                .position(|c| c.name == *name)
                .ok_or_else(|| StatsError::UnknownColumn(name.to_string()))?;
            out[idx] += w;
        }
        Ok(out)
    }

    /// Estimated covariance matrix of the coefficients, `sigma2 * (X'X)^-1`.
    pub fn covariance(&self) -> Option<Vec<Vec<f64>>> {
        let s2 = self.sigma2?;
        Some(
            self.xtx_inverse
                .iter()
                .map(|row| row.iter().map(|v| v * s2).collect())
                .collect(),
        )
    }

    pub fn response_values(&self) -> Vec<f64> {
        self.fitted.iter().zip(&self.residuals).map(|(f, r)| f + r).collect()
    }
}

/// `***` for p <= .001, `*` for p <= .05, nothing otherwise.
pub fn significance_stars(p: f64) -> &'static str {
    if p <= 0.001 {
        "***"
    } else if p <= 0.05 {
        "*"
    } else {
        ""
    }
}

struct Factorization {
    /// Lower-triangular factor of the permuted, equilibrated matrix.
    lower: Vec<Vec<f64>>,
    /// `perm[k]` is the original column at pivot position `k`.
    perm: Vec<usize>,
}

/// Pivoted Cholesky of a symmetric matrix with unit diagonal.
fn pivoted_cholesky(a: &[Vec<f64>]) -> Result<Factorization, Vec<usize>> {
    let p = a.len();
    let mut work: Vec<Vec<f64>> = a.to_vec();
    let mut perm: Vec<usize> = (0..p).collect();
    let mut lower = vec![vec![0.0; p]; p];
    for k in 0..p {
        let (best, best_val) = (k..p)
            .map(|j| (j, work[j][j]))
            .fold((k, f64::NEG_INFINITY), |acc, (j, v)| if v > acc.1 { (j, v) } else { acc });
        if best_val < RANK_TOLERANCE {
            return Err(perm[k..].to_vec());
        }
        if best != k {
            work.swap(k, best);
            for row in work.iter_mut() {
                row.swap(k, best);
            }
            lower.swap(k, best);
            perm.swap(k, best);
        }
        let pivot = work[k][k].sqrt();
        lower[k][k] = pivot;
        for i in (k + 1)..p {
            lower[i][k] = work[i][k] / pivot;
        }
        for i in (k + 1)..p {
            for j in (k + 1)..=i {
                let update = lower[i][k] * lower[j][k];
                work[i][j] -= update;
                work[j][i] = work[i][j];
            }
        }
    }
    Ok(Factorization { lower, perm })
}

impl Factorization {
    /// Solves `A x = b` in original column order.
    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let p = b.len();
        let pb: Vec<f64> = self.perm.iter().map(|&j| b[j]).collect();
        let mut z = vec![0.0; p];
        for i in 0..p {
            let s: f64 = (0..i).map(|k| self.lower[i][k] * z[k]).sum();
            z[i] = (pb[i] - s) / self.lower[i][i];
        }
        let mut y = vec![0.0; p];
        for i in (0..p).rev() {
            let s: f64 = ((i + 1)..p).map(|k| self.lower[k][i] * y[k]).sum();
            y[i] = (z[i] - s) / self.lower[i][i];
        }
        let mut x = vec![0.0; p];
        for (k, &j) in self.perm.iter().enumerate() {
            x[j] = y[k];
        }
        x
    }

    fn inverse(&self) -> Vec<Vec<f64>> {
        let p = self.perm.len();
        let mut inv = vec![vec![0.0; p]; p];
        for j in 0..p {
            let mut e = vec![0.0; p];
            e[j] = 1.0;
            let col = self.solve(&e);
            for i in 0..p {
                inv[i][j] = col[i];
            }
        }
        inv
    }
}

/// Fits `response ~ 1 + predictors` by least squares.
///
/// Needs at least as many rows as parameters. Standard errors and F tests
/// are only produced when residual degrees of freedom remain.
pub fn ols_fit(data: &DataMatrix, predictors: &[&str], response: &str) -> Result<OlsFit, StatsError> {
    let y = data.column(response)?;
    let mut names = vec![INTERCEPT.to_string()];
    let mut columns: Vec<Vec<f64>> = vec![vec![1.0; data.n_rows()]];
    for name in predictors {
        if names.iter().any(|n| n == name) {
            return Err(StatsError::Shape(format!("predictor {name:?} listed twice")));
        }
        columns.push(data.column(name)?.to_vec());
        names.push(name.to_string());
    }
    let n = y.len();
    let p = columns.len();
    if n < p {
        return Err(StatsError::TooFewObservations { needed: p, got: n });
    }

    let mut xtx = vec![vec![0.0; p]; p];
    for i in 0..p {
        for j in 0..=i {
            let v: f64 = columns[i].iter().zip(&columns[j]).map(|(a, b)| a * b).sum();
            xtx[i][j] = v;
            xtx[j][i] = v;
        }
    }
    let xty: Vec<f64> = columns.iter().map(|c| c.iter().zip(y).map(|(a, b)| a * b).sum()).collect();

    let zero_columns: Vec<String> = (0..p).filter(|&i| xtx[i][i] == 0.0).map(|i| names[i].clone()).collect();
    if !zero_columns.is_empty() {
        return Err(StatsError::RankDeficient(zero_columns));
    }
    let scale: Vec<f64> = (0..p).map(|i| 1.0 / xtx[i][i].sqrt()).collect();
    let equilibrated: Vec<Vec<f64>> = (0..p)
        .map(|i| (0..p).map(|j| xtx[i][j] * scale[i] * scale[j]).collect())
        .collect();
    let factor = pivoted_cholesky(&equilibrated)
        .map_err(|cols| StatsError::RankDeficient(cols.into_iter().map(|i| names[i].clone()).collect()))?;

    let scaled_rhs: Vec<f64> = xty.iter().zip(&scale).map(|(v, s)| v * s).collect();
    let beta: Vec<f64> = factor.solve(&scaled_rhs).iter().zip(&scale).map(|(z, s)| z * s).collect();
    let scaled_inverse = factor.inverse();
    let xtx_inverse: Vec<Vec<f64>> = (0..p)
        .map(|i| (0..p).map(|j| scaled_inverse[i][j] * scale[i] * scale[j]).collect())
        .collect();

    let fitted: Vec<f64> = (0..n).map(|r| (0..p).map(|j| columns[j][r] * beta[j]).sum()).collect();
    let residuals: Vec<f64> = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();
    let rss: f64 = residuals.iter().map(|e| e * e).sum();
    let y_mean = y.iter().sum::<f64>() / n as f64;
    let tss: f64 = y.iter().map(|v| (v - y_mean).powi(2)).sum();
    let r_squared = if tss > 0.0 { (1.0 - rss / tss).clamp(0.0, 1.0) } else { 1.0 };

    let df_model = p - 1;
    let df_resid = n - p;
    let sigma2 = (df_resid > 0).then(|| rss / df_resid as f64);

    let mut coefficients = Vec::with_capacity(p);
    for j in 0..p {
        let (std_error, t_value, p_value) = match sigma2 {
            Some(s2) => {
                let se = (s2 * xtx_inverse[j][j]).sqrt();
                let t = beta[j] / se;
                let pv = if se == 0.0 {
                    if beta[j] == 0.0 { 1.0 } else { 0.0 }
                } else {
                    t_two_sided_p(t, df_resid as f64)?
                };
                (Some(se), Some(t), Some(pv))
            }
            None => (None, None, None),
        };
        coefficients.push(Coefficient {
            name: names[j].clone(),
            estimate: beta[j],
            std_error,
            t_value,
            p_value,
        });
    }

    let f_test = match (df_model, df_resid) {
        (0, _) | (_, 0) => None,
        _ => {
            let f = if rss == 0.0 {
                f64::INFINITY
            } else {
                ((tss - rss) / df_model as f64) / (rss / df_resid as f64)
            };
            Some(FTestResult::new(f, df_model, df_resid)?)
        }
    };

    Ok(OlsFit {
        response: response.to_string(),
        coefficients,
        n,
        df_model,
        df_resid,
        rss,
        tss,
        r_squared,
        sigma2,
        f_test,
        xtx_inverse,
        fitted,
        residuals,
    })
}

/// F test of a reduced model against the full model containing all of its predictors.
pub fn nested_f_test(full: &OlsFit, reduced: &OlsFit) -> Result<FTestResult, StatsError> {
    if full.response != reduced.response || full.n != reduced.n {
        return Err(StatsError::NotNested("models were fitted on different data".into()));
    }
    let yf = full.response_values();
    let yr = reduced.response_values();
    let scale = yf.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    if yf.iter().zip(&yr).any(|(a, b)| (a - b).abs() > 1e-9 * scale) {
        return Err(StatsError::NotNested("response values differ between models".into()));
    }
    let full_names: Vec<&str> = full.names().collect();
    if let Some(extra) = reduced.names().find(|n| !full_names.contains(n)) {
        return Err(StatsError::NotNested(format!("{extra:?} is not in the full model")));
    }
    if full.df_resid == 0 {
        return Err(StatsError::TooFewObservations {
            needed: full.coefficients.len() + 1,
            got: full.n,
        });
    }
    let delta_df = reduced.df_resid - full.df_resid;
    if delta_df == 0 {
        return FTestResult::new(0.0, 0, full.df_resid);
    }
    let f = ((reduced.rss - full.rss) / delta_df as f64) / (full.rss / full.df_resid as f64);
    FTestResult::new(f, delta_df, full.df_resid)
}

/// Wald F test of `H0: combination . b = target` for a single linear restriction.
pub fn linear_hypothesis(fit: &OlsFit, combination: &[f64], target: f64) -> Result<FTestResult, StatsError> {
    let p = fit.coefficients.len();
    if combination.len() != p {
        return Err(StatsError::Shape(format!(
            "combination has {} weights for {p} coefficients",
            combination.len()
        )));
    }
    let sigma2 = fit.sigma2.ok_or(StatsError::TooFewObservations { needed: p + 1, got: fit.n })?;
    let estimate: f64 = combination.iter().zip(&fit.coefficients).map(|(c, b)| c * b.estimate).sum();
    let mut quad = 0.0;
    for i in 0..p {
        for j in 0..p {
            quad += combination[i] * fit.xtx_inverse[i][j] * combination[j];
        }
    }
    let variance = sigma2 * quad;
    if !(variance > 0.0) {
        return Err(StatsError::SingularRestriction);
    }
    let diff = estimate - target;
    FTestResult::new(diff * diff / variance, 1, fit.df_resid)
}
