use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Vite,
    Vqnhite,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Vite => "vite",
            Method::Vqnhite => "vqnhite",
        }
    }

    /// Label used in figures.
    pub fn label(self) -> &'static str {
        match self {
            Method::Vite => "VITE",
            Method::Vqnhite => "VQNHITE",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "vite" => Ok(Method::Vite),
            "vqnhite" => Ok(Method::Vqnhite),
            _ => Err(Error::Argument(format!("unknown method {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub beta: f64,
    pub fidelity: f64,
    pub energy: f64,
}

/// Fidelity and energy of one run at `β = δβ, 2δβ, …`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub method: Method,
    pub points: Vec<TracePoint>,
    /// Flattened parameters at each recorded β, when requested.
    pub snapshots: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn final_point(&self) -> Option<&TracePoint> {
        self.points.last()
    }

    /// Point closest to `beta`.
    pub fn at(&self, beta: f64) -> Option<&TracePoint> {
        self.points
            .iter()
            .min_by(|a, b| (a.beta - beta).abs().total_cmp(&(b.beta - beta).abs()))
    }
}
