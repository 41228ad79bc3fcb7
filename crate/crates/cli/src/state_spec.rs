//! State specifications given on the command line.
//!
//! ```text
//! gaussian a=1
//! skew_gaussian b=0.671
//! power_exp c=1.51 b=0.24
//! power_exp_truncated c=1.51 b=0.24 match_at=6 zero_at=15
//! file=psi.csv            (x,re,im rows; anything else is read as binary)
//! y=0,0,0,1               (a moment vector y_0..y_n)
//! moments=vector.json     ({"order":n,"values":[...],"mass":m,"hbar":h})
//! ```
//!
//! `a` defaults to the configured length scale and `skew_gaussian`'s `b` to 0.

use std::collections::BTreeMap;
use std::path::PathBuf;

use freemoments::wavefunction::{Family, FAMILY_NAMES};

#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Family(Family),
    File(PathBuf),
    Moments(Vec<f64>),
    MomentsFile(PathBuf),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpecError {
    #[error("empty state specification")]
    Empty,
    #[error("unknown state '{0}'; expected one of {families}, file=<path>, y=<v0,v1,...> or moments=<path>", families = FAMILY_NAMES.join(", "))]
    UnknownState(String),
    #[error("expected key=value, got '{0}'")]
    NotKeyValue(String),
    #[error("{family} has no parameter '{key}'")]
    UnknownKey { family: &'static str, key: String },
    #[error("parameter '{0}' given twice")]
    Duplicate(String),
    #[error("{family} needs parameter '{key}'")]
    Missing { family: &'static str, key: &'static str },
    #[error("'{key}' must be a finite number, got '{value}'")]
    BadNumber { key: String, value: String },
    #[error("'{0}' takes no further arguments")]
    Trailing(String),
    #[error("invalid {family} parameters: {reason}")]
    Domain { family: &'static str, reason: String },
}

fn number(key: &str, value: &str) -> Result<f64, SpecError> {
    match value.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(SpecError::BadNumber {
            key: key.to_string(),
            value: value.to_string(),
        }),
    }
}

/// Parses the whitespace-separated words of a state specification.
pub fn parse_state_spec<S: AsRef<str>>(words: &[S], length_scale: f64) -> Result<StateSpec, SpecError> {
    let (head, rest) = words.split_first().ok_or(SpecError::Empty)?;
    let head = head.as_ref();
    let single = |spec: StateSpec| {
        if let Some(extra) = rest.first() {
            Err(SpecError::Trailing(extra.as_ref().to_string()))
        } else {
            Ok(spec)
        }
    };
    if let Some(path) = head.strip_prefix("file=") {
        return single(StateSpec::File(PathBuf::from(path)));
    }
    if let Some(path) = head.strip_prefix("moments=") {
        return single(StateSpec::MomentsFile(PathBuf::from(path)));
    }
    if let Some(list) = head.strip_prefix("y=") {
        let values = list.split(',').map(|v| number("y", v)).collect::<Result<Vec<_>, _>>()?;
        return single(StateSpec::Moments(values));
    }

    let (family, keys): (&'static str, &[&'static str]) = match head {
        "gaussian" => ("gaussian", &["a"]),
        "skew_gaussian" => ("skew_gaussian", &["b", "a"]),
        "power_exp" => ("power_exp", &["c", "b", "a"]),
        "power_exp_truncated" => ("power_exp_truncated", &["c", "b", "a", "match_at", "zero_at"]),
        "abs_exp" => ("abs_exp", &["a"]),
        "sqrt_exp" => ("sqrt_exp", &["a"]),
        other => return Err(SpecError::UnknownState(other.to_string())),
    };
    let mut params = BTreeMap::new();
    for word in rest {
        let word = word.as_ref();
        let (key, value) = word.split_once('=').ok_or_else(|| SpecError::NotKeyValue(word.to_string()))?;
        let key = keys.iter().find(|k| **k == key).ok_or_else(|| SpecError::UnknownKey {
            family,
            key: key.to_string(),
        })?;
        if params.insert(*key, number(key, value)?).is_some() {
            return Err(SpecError::Duplicate(key.to_string()));
        }
    }
    let get = |key: &'static str| params.get(key).copied().ok_or(SpecError::Missing { family, key });
    let a = params.get("a").copied().unwrap_or(length_scale);
    let parsed = match family {
        "gaussian" => Family::Gaussian { a },
        "skew_gaussian" => Family::SkewGaussian {
            b: params.get("b").copied().unwrap_or(0.0),
            a,
        },
        "power_exp" => Family::PowerExp {
            c: get("c")?,
            b: get("b")?,
            a,
        },
        "power_exp_truncated" => Family::PowerExpTruncated {
            c: get("c")?,
            b: get("b")?,
            a,
            match_at: get("match_at")?,
            zero_at: get("zero_at")?,
        },
        "abs_exp" => Family::AbsExp { a },
        _ => Family::SqrtExp { a },
    };
    parsed.validate().map_err(|e| SpecError::Domain {
        family,
        reason: e.to_string(),
    })?;
    Ok(StateSpec::Family(parsed))
}
