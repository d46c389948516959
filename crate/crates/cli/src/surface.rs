//! Mini-language for analytic test surfaces: `name:key=value,key=value`.
//!
//! Vector values separate components with `;` and a single number is
//! broadcast to every axis.
//!
//! | surface     | keys                                   |
//! |-------------|----------------------------------------|
//! | `sphere`    | `r` radius, `c` center (default origin) |
//! | `ellipsoid` | `a` semi-axes, `c` center              |
//! | `plane`     | `n` normal, `d` offset (default 0)     |

use std::collections::BTreeMap;

use mctrace::AnalyticManifold;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SurfaceError {
    #[error("expected `name:key=value,...`, got {0:?}")]
    Syntax(String),
    #[error("unknown surface {0:?} (known: sphere, ellipsoid, plane)")]
    UnknownSurface(String),
    #[error("unknown key {key:?} for {surface}")]
    UnknownKey { surface: &'static str, key: String },
    #[error("missing key {key:?} for {surface}")]
    MissingKey {
        surface: &'static str,
        key: &'static str,
    },
    #[error("key {key:?}: {msg}")]
    Value { key: String, msg: String },
}

fn vector(key: &str, raw: &str, dim: usize) -> Result<Vec<f64>, SurfaceError> {
    let bad = |msg: String| SurfaceError::Value {
        key: key.to_string(),
        msg,
    };
    let parts: Vec<f64> = raw
        .split(';')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| bad(format!("cannot parse {t:?}")))
        })
        .collect::<Result<_, _>>()?;
    if parts.iter().any(|x| !x.is_finite()) {
        return Err(bad("values must be finite".into()));
    }
    match parts.len() {
        1 => Ok(vec![parts[0]; dim]),
        l if l == dim => Ok(parts),
        l => Err(bad(format!("expected 1 or {dim} components, got {l}"))),
    }
}

fn scalar(key: &str, raw: &str) -> Result<f64, SurfaceError> {
    match raw.trim().parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(SurfaceError::Value {
            key: key.to_string(),
            msg: format!("cannot parse {raw:?}"),
        }),
    }
}

fn positive(key: &str, values: &[f64]) -> Result<(), SurfaceError> {
    if values.iter().all(|&x| x > 0.0) {
        Ok(())
    } else {
        Err(SurfaceError::Value {
            key: key.to_string(),
            msg: "must be positive".into(),
        })
    }
}

/// Parses a surface description for an ambient dimension of `dim`.
pub fn parse_surface(desc: &str, dim: usize) -> Result<AnalyticManifold, SurfaceError> {
    let (name, rest) = desc.split_once(':').unwrap_or((desc, ""));
    let mut keys = BTreeMap::new();
    for item in rest.split(',').filter(|s| !s.trim().is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| SurfaceError::Syntax(desc.to_string()))?;
        keys.insert(k.trim().to_string(), v.trim().to_string());
    }
    let (surface, allowed): (&'static str, &[&str]) = match name.trim() {
        "sphere" => ("sphere", &["r", "c"]),
        "ellipsoid" => ("ellipsoid", &["a", "c"]),
        "plane" => ("plane", &["n", "d"]),
        other => return Err(SurfaceError::UnknownSurface(other.to_string())),
    };
    if let Some(k) = keys.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(SurfaceError::UnknownKey {
            surface,
            key: k.clone(),
        });
    }
    let required = |key: &'static str| {
        keys.get(key)
            .ok_or(SurfaceError::MissingKey { surface, key })
    };
    let center = match keys.get("c") {
        Some(raw) => vector("c", raw, dim)?,
        None => vec![0.0; dim],
    };
    Ok(match surface {
        "sphere" => {
            let radius = scalar("r", required("r")?)?;
            positive("r", &[radius])?;
            AnalyticManifold::Sphere { center, radius }
        }
        "ellipsoid" => {
            let semi_axes = vector("a", required("a")?, dim)?;
            positive("a", &semi_axes)?;
            AnalyticManifold::Ellipsoid { center, semi_axes }
        }
        _ => {
            let normal = vector("n", required("n")?, dim)?;
            if normal.iter().all(|&x| x == 0.0) {
                return Err(SurfaceError::Value {
                    key: "n".into(),
                    msg: "normal must be non-zero".into(),
                });
            }
            let offset = keys
                .get("d")
                .map(|raw| scalar("d", raw))
                .transpose()?
                .unwrap_or(0.0);
            AnalyticManifold::Plane { normal, offset }
        }
    })
}

/// Half-width of a centered cube that comfortably contains the bounded surfaces.
pub fn default_extent(m: &AnalyticManifold) -> f64 {
    let reach = |center: &[f64], size: f64| {
        center.iter().fold(0.0f64, |acc, c| acc.max(c.abs())) + 1.5 * size
    };
    match m {
        AnalyticManifold::Sphere { center, radius } => reach(center, *radius),
        AnalyticManifold::Ellipsoid { center, semi_axes } => {
            reach(center, semi_axes.iter().fold(0.0f64, |a, &b| a.max(b)))
        }
        AnalyticManifold::Plane { .. } => 2.0,
    }
}
