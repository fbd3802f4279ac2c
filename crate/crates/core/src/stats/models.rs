//! The three quality models and the tests comparing them.
//!
//! - Model 1: all structure, integration and engagement predictors plus group size.
//! - Model 2: Model 1 without the member fraction.
//! - Model 3: determinism and degeneracy replaced by effective information.
//!
//! Model 3 is Model 2 under the restriction `b_det + b_deg = 0` (because
//! `ei = det - deg`), so the comparison of Models 2 and 3 is the linear
//! hypothesis test on Model 2.

use serde::{Deserialize, Serialize};

use super::data::DataMatrix;
use super::ols::{linear_hypothesis, nested_f_test, ols_fit, FTestResult, OlsFit};
use super::StatsError;

pub const RESPONSE: &str = "quality_log";
pub const FRACTION: &str = "fraction";
pub const DETERMINISM: &str = "det_norm";
pub const DEGENERACY: &str = "deg_norm";
pub const EFFECTIVE_INFORMATION: &str = "ei_norm";
pub const STRENGTH: &str = "strength_log";
pub const MEMBERS: &str = "members_log";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModelSpec {
    pub name: &'static str,
    pub predictors: Vec<&'static str>,
}

pub fn model_specs() -> [ModelSpec; 3] {
    [
        ModelSpec {
            name: "Model 1",
            predictors: vec![FRACTION, DETERMINISM, DEGENERACY, STRENGTH, MEMBERS],
        },
        ModelSpec {
            name: "Model 2",
            predictors: vec![DETERMINISM, DEGENERACY, STRENGTH, MEMBERS],
        },
        ModelSpec {
            name: "Model 3",
            predictors: vec![EFFECTIVE_INFORMATION, STRENGTH, MEMBERS],
        },
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityModels {
    pub model1: OlsFit,
    pub model2: OlsFit,
    pub model3: OlsFit,
    /// Model 2 against Model 1 (dropping the member fraction).
    pub drop_fraction: FTestResult,
    /// `H0: b_det + b_deg = 0` on Model 2; equivalently Model 3 against Model 2.
    pub det_plus_deg: FTestResult,
}

pub fn fit_quality_models(data: &DataMatrix) -> Result<QualityModels, StatsError> {
    let [s1, s2, s3] = model_specs();
    let model1 = ols_fit(data, &s1.predictors, RESPONSE)?;
    let model2 = ols_fit(data, &s2.predictors, RESPONSE)?;
    let model3 = ols_fit(data, &s3.predictors, RESPONSE)?;
    let drop_fraction = nested_f_test(&model1, &model2)?;
    let combination = model2.combination(&[(DETERMINISM, 1.0), (DEGENERACY, 1.0)])?;
    let det_plus_deg = linear_hypothesis(&model2, &combination, 0.0)?;
    Ok(QualityModels {
        model1,
        model2,
        model3,
        drop_fraction,
        det_plus_deg,
    })
}
