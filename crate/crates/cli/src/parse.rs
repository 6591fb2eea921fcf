//! Argument mini-languages: boxes, Schatten orders, transform chains,
//! `K=V` parameters, width lists and centre files.

use std::collections::BTreeMap;
use std::path::Path;

use htv_core::domain::BoxDomain;
use htv_core::matnorm::SchattenOrder;
use htv_core::transforms::DomainTransform;
use serde::Deserialize;

use crate::error::CliError;

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Parse(msg.into())
}

pub fn number(s: &str, what: &str) -> Result<f64, CliError> {
    let x: f64 = s.trim().parse().map_err(|_| bad(format!("{what}: '{s}' is not a number")))?;
    if !x.is_finite() {
        return Err(bad(format!("{what}: '{s}' is not finite")));
    }
    Ok(x)
}

fn numbers(s: &str, what: &str) -> Result<Vec<f64>, CliError> {
    s.split(',').map(|t| number(t, what)).collect()
}

/// `1`, `1.5`, `2`, `inf`.
pub fn order(s: &str) -> Result<SchattenOrder, CliError> {
    let p = match s.trim().to_ascii_lowercase().as_str() {
        "inf" | "infinity" | "∞" => f64::INFINITY,
        other => other.parse().map_err(|_| bad(format!("p: '{s}' is not a number or 'inf'")))?,
    };
    Ok(SchattenOrder::new(p)?)
}

pub fn order_label(p: SchattenOrder) -> String {
    match p {
        SchattenOrder::Infinity => "inf".into(),
        SchattenOrder::Finite(p) => format!("{p}"),
    }
}

/// `lo:hi,lo:hi,...`, one range per axis.
pub fn box_spec(s: &str) -> Result<BoxDomain, CliError> {
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for axis in s.split(',') {
        let (lo, hi) = axis.split_once(':').ok_or_else(|| bad(format!("box: axis '{axis}' is not lo:hi")))?;
        lower.push(number(lo, "box")?);
        upper.push(number(hi, "box")?);
    }
    Ok(BoxDomain::new(lower, upper)?)
}

/// `/`-separated steps applied to the function left to right:
/// `rot:30deg[@i,j]`, `rot:0.5rad`, `scale:α`, `shift:x,y,...`.
pub fn transform(s: &str, dim: usize) -> Result<DomainTransform, CliError> {
    let mut total = DomainTransform::identity(dim);
    for step in s.split('/') {
        let (op, arg) = step.split_once(':').ok_or_else(|| bad(format!("transform: step '{step}' has no ':'")))?;
        let t = match op {
            "rot" => {
                let (angle, plane) = match arg.split_once('@') {
                    Some((a, p)) => (a, Some(p)),
                    None => (arg, None),
                };
                let radians = if let Some(deg) = angle.strip_suffix("deg") {
                    number(deg, "rotation")?.to_radians()
                } else if let Some(rad) = angle.strip_suffix("rad") {
                    number(rad, "rotation")?
                } else {
                    return Err(bad(format!("transform: angle '{angle}' needs a deg or rad suffix")));
                };
                let (i, j) = match plane {
                    None => (0, 1),
                    Some(p) => {
                        let (i, j) = p.split_once(',').ok_or_else(|| bad(format!("transform: plane '{p}' is not i,j")))?;
                        let axis = |t: &str| t.trim().parse::<usize>().map_err(|_| bad(format!("transform: bad axis '{t}'")));
                        (axis(i)?, axis(j)?)
                    }
                };
                DomainTransform::rotation(dim, i, j, radians)?
            }
            "scale" => DomainTransform::scaling(dim, number(arg, "scale")?)?,
            "shift" => DomainTransform::translation(numbers(arg, "shift")?)?,
            other => return Err(bad(format!("transform: unknown step '{other}' (rot, scale, shift)"))),
        };
        total = total.then(&t)?;
    }
    Ok(total)
}

/// `K=V` pairs; repeated keys are rejected.
pub fn params(items: &[String]) -> Result<Params, CliError> {
    let mut map = BTreeMap::new();
    for item in items {
        let (k, v) = item.split_once('=').ok_or_else(|| bad(format!("params: '{item}' is not K=V")))?;
        if map.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
            return Err(bad(format!("params: '{k}' given twice")));
        }
    }
    Ok(Params(map))
}

#[derive(Debug, Default)]
pub struct Params(BTreeMap<String, String>);

impl Params {
    pub fn take(&mut self, key: &str) -> Option<String> {
        self.0.remove(key)
    }

    pub fn num(&mut self, key: &str, default: f64) -> Result<f64, CliError> {
        self.take(key).map_or(Ok(default), |v| number(&v, key))
    }

    pub fn list(&mut self, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        self.take(key).map(|v| numbers(&v, key)).transpose()
    }

    /// Fails on anything the function did not consume.
    pub fn finish(self, name: &str) -> Result<(), CliError> {
        match self.0.keys().next() {
            Some(k) => Err(bad(format!("params: '{k}' is not a parameter of {name}"))),
            None => Ok(()),
        }
    }
}

/// Comma-separated positive widths.
pub fn widths(s: &str) -> Result<Vec<f64>, CliError> {
    let w = numbers(s, "widths")?;
    if w.iter().any(|&x| x <= 0.0) {
        return Err(bad("widths: every width must be positive"));
    }
    Ok(w)
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Centers {
    pub centers: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

pub fn centers_file(path: &Path) -> Result<Centers, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| bad(format!("{}: {e}", path.display())))?;
    let c: Centers = serde_json::from_str(&text)
        .map_err(|e| bad(format!("{}: line {}, column {}: {e}", path.display(), e.line(), e.column())))?;
    if c.centers.is_empty() || c.centers.len() != c.weights.len() {
        return Err(bad(format!(
            "{}: {} centers but {} weights",
            path.display(),
            c.centers.len(),
            c.weights.len()
        )));
    }
    Ok(c)
}
