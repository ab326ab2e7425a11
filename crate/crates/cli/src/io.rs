//! File formats and number formatting for the `qhb` command.

use anyhow::{bail, Context};
use qhb_core::sampling::RegionResult;
use qhb_core::{HVector, Quaternion, SolverConfig, SolverResult, WeightedPoints};
use serde::{Deserialize, Serialize};
use serde_json::Value;

fn default_weight() -> f64 {
    1.0
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointEntry {
    pub coords: HVector,
    #[serde(default = "default_weight")]
    pub weight: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSetFile {
    pub dimension: usize,
    pub points: Vec<PointEntry>,
}

impl PointSetFile {
    pub fn into_points(self) -> anyhow::Result<WeightedPoints> {
        if self.dimension == 0 {
            bail!("InvalidConfig: dimension must be at least 1");
        }
        for (index, p) in self.points.iter().enumerate() {
            if p.coords.dim() != self.dimension {
                bail!(
                    "DimensionMismatch: point at index {index} has {} quaternion coordinates, expected {}",
                    p.coords.dim(),
                    self.dimension
                );
            }
        }
        let (points, weights) = self.points.into_iter().map(|p| (p.coords, p.weight)).unzip();
        Ok(WeightedPoints::new(points, weights)?)
    }
}

/// Extra fields reported for sampled regions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionInfo {
    pub total_mass_estimate: f64,
    pub mass_standard_error: f64,
    pub moment_estimate: f64,
    pub standard_error: f64,
    pub seed: u64,
    pub samples: u64,
    pub accepted: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultFile {
    pub barycenter: HVector,
    pub residual_norm: f64,
    pub energy: f64,
    pub iterations: usize,
    pub converged: bool,
    pub config: SolverConfig,
    #[serde(flatten, skip_serializing_if = "Option::is_none")]
    pub region: Option<RegionInfo>,
}

impl ResultFile {
    pub fn from_solver(r: SolverResult, config: &SolverConfig) -> Self {
        Self {
            barycenter: r.barycenter,
            residual_norm: r.residual_norm,
            energy: r.energy,
            iterations: r.iterations,
            converged: r.converged,
            config: config.clone(),
            region: None,
        }
    }

    pub fn from_region(r: RegionResult, config: &SolverConfig) -> Self {
        let region = RegionInfo {
            total_mass_estimate: r.total_mass_estimate,
            mass_standard_error: r.mass_standard_error,
            moment_estimate: r.moment_estimate,
            standard_error: r.standard_error,
            seed: r.seed,
            samples: r.samples,
            accepted: r.accepted,
        };
        Self {
            region: Some(region),
            ..Self::from_solver(r.solver, config)
        }
    }
}

/// Parse a point given on the command line.
///
/// Accepted forms: a single number (a real point in ℍ¹), a flat list of reals
/// whose length is 1 or a multiple of 4, or a list of `[w, x, y, z]` arrays.
pub fn parse_point(text: &str) -> anyhow::Result<HVector> {
    let value: Value = serde_json::from_str(text.trim()).with_context(|| format!("cannot parse point {text:?}"))?;
    match &value {
        Value::Number(x) => Ok(HVector::new(vec![Quaternion::real(x.as_f64().unwrap_or(f64::NAN))])),
        Value::Array(items) if items.iter().all(Value::is_number) => {
            let reals: Vec<f64> = items.iter().map(|v| v.as_f64().unwrap_or(f64::NAN)).collect();
            if reals.len() == 1 {
                Ok(HVector::new(vec![Quaternion::real(reals[0])]))
            } else if !reals.is_empty() && reals.len().is_multiple_of(4) {
                Ok(HVector::from_reals(&reals)?)
            } else {
                bail!(
                    "point {text:?} must have 1 or a multiple of 4 real coordinates, found {}",
                    reals.len()
                )
            }
        }
        _ => serde_json::from_value(value).with_context(|| format!("point {text:?} is not a list of [w,x,y,z] arrays")),
    }
}

/// Format like C's `%.17g`: enough digits to round-trip every double.
pub fn format_g17(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp) as usize;
        strip_zeros(format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", strip_zeros(mantissa.to_string()), exp.abs())
    }
}

fn strip_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g17_matches_c_printf() {
        assert_eq!(format_g17(3f64.ln()), "1.0986122886681098");
        assert_eq!(format_g17(0.0), "0");
        assert_eq!(format_g17(0.5), "0.5");
        assert_eq!(format_g17(0.1), "0.10000000000000001");
        assert_eq!(format_g17(1e-7), "9.9999999999999995e-08");
        assert_eq!(format_g17(1e20), "1e+20");
        assert_eq!(format_g17(-2.0), "-2");
        assert_eq!(format_g17(123456.75), "123456.75");
    }

    #[test]
    fn g17_round_trips() {
        for x in [std::f64::consts::PI, 1.0 / 3.0, 2.0 / 7.0, 1e-300, 6.02e23, -0.000123] {
            assert_eq!(format_g17(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn point_forms() {
        assert_eq!(parse_point("0.5").unwrap().to_reals(), vec![0.5, 0.0, 0.0, 0.0]);
        assert_eq!(parse_point("[0.5]").unwrap().to_reals(), vec![0.5, 0.0, 0.0, 0.0]);
        assert_eq!(parse_point("[0, 0.1, 0, 0, 0.2, 0, 0, 0]").unwrap().dim(), 2);
        assert_eq!(
            parse_point("[[0,0,0.3,0]]").unwrap().to_reals(),
            vec![0.0, 0.0, 0.3, 0.0]
        );
        assert!(parse_point("[0.1, 0.2]").is_err());
        assert!(parse_point("[]").is_err());
        assert!(parse_point("abc").is_err());
    }

    #[test]
    fn point_file_reports_index() {
        let file: PointSetFile = serde_json::from_str(
            r#"{"dimension": 1, "points": [{"coords": [[0.1,0,0,0]]}, {"coords": [[0.2,0,0,0]], "weight": -1}]}"#,
        )
        .unwrap();
        assert_eq!(file.points[0].weight, 1.0);
        let err = file.into_points().unwrap_err().to_string();
        assert!(err.contains("index 1"), "{err}");

        let file: PointSetFile = serde_json::from_str(
            r#"{"dimension": 2, "points": [{"coords": [[0,0,0,0],[0,0,0,0]]}, {"coords": [[0.2,0,0,0]]}]}"#,
        )
        .unwrap();
        let err = file.into_points().unwrap_err().to_string();
        assert!(err.contains("index 1"), "{err}");
    }

    #[test]
    fn result_file_round_trip() {
        let r = ResultFile {
            barycenter: HVector::from_real(&[2.0 / 7.0]),
            residual_norm: 1e-17,
            energy: 0.25,
            iterations: 3,
            converged: true,
            config: SolverConfig::default(),
            region: Some(RegionInfo {
                total_mass_estimate: 10.7,
                mass_standard_error: 0.01,
                moment_estimate: 5.0,
                standard_error: 0.001,
                seed: 7,
                samples: 100,
                accepted: 60,
            }),
        };
        let text = serde_json::to_string(&r).unwrap();
        assert_eq!(serde_json::from_str::<ResultFile>(&text).unwrap(), r);
    }
}
