use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::degree_sequence::{validate, DegreeSequence, ThetaParams};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BuilderKind {
    Binary,
    GeometricTail,
    HubsBinary,
}

impl std::str::FromStr for BuilderKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "binary" => Ok(BuilderKind::Binary),
            "geometric-tail" => Ok(BuilderKind::GeometricTail),
            "hubs+binary" | "hubs-binary" => Ok(BuilderKind::HubsBinary),
            _ => Err(Error::Invalid(format!("unknown builder kind {s}"))),
        }
    }
}

/// Degree sequence with about `n` vertices and its scale `b_n`.
///
/// * `binary`: `{0: k+1, 2: k}` with `2k+1 <= n`, `b_n = sqrt(V)`.
/// * `geometric-tail`: `N_i ≈ n 2^{-(i+1)}` for `i >= 1`, `N_0` fixed by the
///   tree constraint, `b_n = sqrt(sum (i-1)^2 N_i)`.
/// * `hubs+binary`: hubs with `ceil(beta_i b_n)` children on a binary bulk,
///   `b_n = sqrt(n / sigma^2)`, `N_0` fixed by the tree constraint.
pub fn build_degree_sequence(
    kind: BuilderKind,
    n: u64,
    theta: &ThetaParams,
) -> Result<(DegreeSequence, f64)> {
    if n < 10 {
        return Err(Error::Infeasible(format!("n = {n} < 10")));
    }
    match kind {
        BuilderKind::Binary => {
            let k = (n - 1) / 2;
            let ds = validate(&BTreeMap::from([(0, k + 1), (2, k)]))?;
            let b = ds.centered_square_sum().sqrt();
            Ok((ds, b))
        }
        BuilderKind::GeometricTail => {
            let mut counts = BTreeMap::new();
            let mut i = 1u64;
            loop {
                let c = (n as f64 * 0.5f64.powi(i as i32 + 1)).round() as u64;
                if c == 0 {
                    break;
                }
                counts.insert(i, c);
                i += 1;
            }
            let n0 = 1 + counts.iter().map(|(&i, &c)| (i - 1) * c).sum::<u64>();
            counts.insert(0, n0);
            let ds = validate(&counts)?;
            let b = ds.centered_square_sum().sqrt();
            Ok((ds, b))
        }
        BuilderKind::HubsBinary => {
            if theta.sigma <= 0.0 {
                return Err(Error::Infeasible("hubs+binary needs sigma > 0".into()));
            }
            let b = (n as f64 / (theta.sigma * theta.sigma)).sqrt();
            let hubs: Vec<u64> = theta
                .betas
                .iter()
                .filter(|&&x| x > 0.0)
                .map(|&x| (x * b).ceil() as u64)
                .collect();
            let hub_total: u64 = hubs.iter().sum();
            if hub_total + 3 > n {
                return Err(Error::Infeasible(format!(
                    "hubs need {hub_total} children but n = {n}"
                )));
            }
            let k = (n - 1 - hub_total) / 2;
            if k == 0 {
                return Err(Error::Infeasible("no room for the binary bulk".into()));
            }
            let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
            for &h in &hubs {
                *counts.entry(h).or_insert(0) += 1;
            }
            *counts.entry(2).or_insert(0) += k;
            let n0 = 1 + counts.iter().map(|(&i, &c)| (i - 1) * c).sum::<u64>();
            *counts.entry(0).or_insert(0) += n0;
            let ds = validate(&counts)?;
            Ok((ds, b))
        }
    }
}
