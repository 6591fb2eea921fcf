use std::path::Path;
use std::sync::Arc;

use htv_core::fixtures;
use htv_core::smooth::SmoothFn;

use crate::error::CliError;
use crate::parse::{centers_file, Params};

pub const NAMES: &str = "bowl, cubic, affine, gaussian, rbf, pyramid, hat";

/// Builds a named function of dimension `dim`. The second value is false for
/// kinked functions that only the grid oracle may evaluate.
pub fn build(name: &str, mut params: Params, dim: usize) -> Result<(SmoothFn, bool), CliError> {
    let wrong_dim = |need: usize| CliError::Parse(format!("{name} is {need}-dimensional but the box has {dim} axes"));
    let vector = |v: Option<Vec<f64>>, key: &str| -> Result<Vec<f64>, CliError> {
        match v {
            None => Ok(vec![0.0; dim]),
            Some(v) if v.len() == dim => Ok(v),
            Some(v) => Err(CliError::Parse(format!("{key} has {} components, expected {dim}", v.len()))),
        }
    };
    let (f, smooth) = match name {
        "bowl" => (SmoothFn::quadratic_bowl(dim), true),
        "cubic" => {
            let axis = params.num("axis", 0.0)?;
            if axis.fract() != 0.0 || axis < 0.0 || axis as usize >= dim {
                return Err(CliError::Parse(format!("axis {axis} is not an axis of a {dim}-dimensional box")));
            }
            (SmoothFn::cubic(dim, axis as usize), true)
        }
        "affine" => {
            let g = params.list("gradient")?;
            let b = params.num("offset", 0.0)?;
            (SmoothFn::affine(vector(g, "gradient")?, b), true)
        }
        "gaussian" => {
            let c = params.list("center")?;
            let sigma = params.num("sigma", 1.0)?;
            let weight = params.num("weight", 1.0)?;
            (SmoothFn::gaussian_bump(vector(c, "center")?, sigma, weight)?, true)
        }
        "rbf" => {
            let path = params
                .take("centers")
                .ok_or_else(|| CliError::Parse("rbf needs centers=FILE".into()))?;
            let sigma = params.num("sigma", 1.0)?;
            let c = centers_file(Path::new(&path))?;
            (SmoothFn::rbf_mixture(c.centers, c.weights, sigma)?, true)
        }
        "pyramid" => {
            if dim != 2 {
                return Err(wrong_dim(2));
            }
            (SmoothFn::new(2, "pyramid", Arc::new(fixtures::pyramid_fn), None), false)
        }
        "hat" => {
            if dim != 1 {
                return Err(wrong_dim(1));
            }
            (SmoothFn::new(1, "hat", Arc::new(fixtures::hat_fn), None), false)
        }
        other => return Err(CliError::Parse(format!("unknown function '{other}' (one of {NAMES})"))),
    };
    params.finish(name)?;
    Ok((f, smooth))
}
