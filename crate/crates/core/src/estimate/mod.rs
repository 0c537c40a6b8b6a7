//! Monte Carlo estimates of one- and two-point correlations over many
//! realizations, with standard errors against the analytic values.
//!
//! Realization `r` is the one produced by
//! [`sample_realization`](crate::simulate::sample_realization) with the same
//! plan, so estimates can be reproduced point by point. Products are centered
//! with the analytic mean.

use crate::covariance::kernel;
use crate::simulate::{Expansion, SimulateError, SimulationPlan};
use crate::FieldSpec;
use crate::Vec3;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use thiserror::Error;

/// Entries with a standardized deviation above this are flagged.
pub const FLAG_Z: f64 = 4.0;

const CHUNK: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimateError {
    #[error("need at least 2 realizations, got {0}")]
    TooFew(usize),
    #[error(transparent)]
    Simulate(#[from] SimulateError),
}

/// Estimate of `⟨C(x), C(y)⟩` for one pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PairEstimate {
    pub x: Vec3,
    pub y: Vec3,
    pub estimate: DMatrix<f64>,
    pub stderr: DMatrix<f64>,
    pub expected: DMatrix<f64>,
    pub z: DMatrix<f64>,
}

/// An entry with `|z| > FLAG_Z`. `pair` is `None` for the mean.
#[derive(Debug, Clone, PartialEq)]
pub struct Flag {
    pub pair: Option<usize>,
    pub row: usize,
    pub col: usize,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorReport {
    pub realizations: usize,
    /// Point at which the mean was estimated: the first `x`, or the origin.
    pub mean_point: Vec3,
    pub mean: DVector<f64>,
    pub mean_stderr: DVector<f64>,
    pub mean_expected: DVector<f64>,
    pub mean_z: DVector<f64>,
    pub pairs: Vec<PairEstimate>,
    pub mean_z_max: f64,
    pub cov_z_max: f64,
    /// Largest `|z|` over mean and covariance entries.
    pub z_max: f64,
    pub flagged: Vec<Flag>,
}

impl EstimatorReport {
    pub fn passes(&self, z: f64) -> bool {
        self.z_max <= z
    }
}

/// Sums of centered values and their squares over a run of realizations.
#[derive(Clone)]
struct Acc {
    m1: DVector<f64>,
    m2: DVector<f64>,
    c1: Vec<DMatrix<f64>>,
    c2: Vec<DMatrix<f64>>,
}

impl Acc {
    fn zeros(d: usize, pairs: usize) -> Self {
        Acc {
            m1: DVector::zeros(d),
            m2: DVector::zeros(d),
            c1: vec![DMatrix::zeros(d, d); pairs],
            c2: vec![DMatrix::zeros(d, d); pairs],
        }
    }

    fn add(mut self, o: &Acc) -> Self {
        self.m1 += &o.m1;
        self.m2 += &o.m2;
        for (a, b) in self.c1.iter_mut().zip(&o.c1) {
            *a += b;
        }
        for (a, b) in self.c2.iter_mut().zip(&o.c2) {
            *a += b;
        }
        self
    }
}

fn pairwise_sum(mut v: Vec<Acc>) -> Acc {
    while v.len() > 1 {
        let mut next = Vec::with_capacity(v.len().div_ceil(2));
        let mut it = v.into_iter();
        while let Some(a) = it.next() {
            next.push(match it.next() {
                Some(b) => a.add(&b),
                None => a,
            });
        }
        v = next;
    }
    v.pop().unwrap()
}

fn z_score(est: f64, want: f64, se: f64) -> f64 {
    let diff = est - want;
    if se > 0.0 {
        diff / se
    } else if diff.abs() <= 1e-12 * (1.0 + want.abs()) {
        0.0
    } else {
        f64::INFINITY.copysign(diff)
    }
}

/// Standard error of the mean of `n` samples with sums `s1`, `s2`.
fn stderr(s1: f64, s2: f64, n: f64) -> f64 {
    let m = s1 / n;
    ((s2 / n - m * m).max(0.0) * n / (n - 1.0) / n).sqrt()
}

/// Sample mean at the first pair point and sample covariances at `pairs`
/// over realizations `0..n` of `plan`. Only `l_max`, `seed` and `tolerance`
/// are taken from the plan.
pub fn mc_estimate(spec: &FieldSpec, plan: &SimulationPlan, n: usize, pairs: &[(Vec3, Vec3)]) -> Result<EstimatorReport, EstimateError> {
    if n < 2 {
        return Err(EstimateError::TooFew(n));
    }
    let mut check = plan.clone();
    check.points = pairs.iter().flat_map(|&(x, y)| [x, y]).collect();
    let tail = crate::simulate::tail_bound(spec, &check);
    if let Some(tol) = plan.tolerance {
        if tail > tol {
            return Err(SimulateError::Truncation { tail, tol }.into());
        }
    }
    let exp = Expansion::new(spec, plan)?;
    let mu = exp.mean().clone();
    let d = mu.len();
    let mean_point = pairs.first().map_or(Vec3::zeros(), |p| p.0);
    let mut rows = vec![exp.carriers_at(&mean_point)];
    for (x, y) in pairs {
        rows.push(exp.carriers_at(x));
        rows.push(exp.carriers_at(y));
    }

    let chunks: Vec<Acc> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut acc = Acc::zeros(d, pairs.len());
            for r in c * CHUNK..((c + 1) * CHUNK).min(n) {
                let v: Vec<DVector<f64>> = exp.evaluate(&rows, &exp.draw(plan.seed, r as u64)).into_iter().map(|v| v - &mu).collect();
                acc.m1 += &v[0];
                acc.m2 += v[0].component_mul(&v[0]);
                for k in 0..pairs.len() {
                    let p = &v[1 + 2 * k] * v[2 + 2 * k].transpose();
                    acc.c2[k] += p.component_mul(&p);
                    acc.c1[k] += p;
                }
            }
            acc
        })
        .collect();
    let acc = pairwise_sum(chunks);

    let nf = n as f64;
    let mut flagged = Vec::new();
    let mean = &mu + &acc.m1 / nf;
    let mean_stderr = DVector::from_fn(d, |i, _| stderr(acc.m1[i], acc.m2[i], nf));
    let mean_z = DVector::from_fn(d, |i, _| z_score(acc.m1[i] / nf, 0.0, mean_stderr[i]));
    for (i, z) in mean_z.iter().enumerate() {
        if z.abs() > FLAG_Z {
            flagged.push(Flag { pair: None, row: i, col: 0, z: *z });
        }
    }
    let mut out = Vec::with_capacity(pairs.len());
    for (k, &(x, y)) in pairs.iter().enumerate() {
        let expected = kernel(spec, &x, &y).map_err(SimulateError::from)?;
        let estimate = &acc.c1[k] / nf;
        let se = DMatrix::from_fn(d, d, |i, j| stderr(acc.c1[k][(i, j)], acc.c2[k][(i, j)], nf));
        let z = DMatrix::from_fn(d, d, |i, j| z_score(estimate[(i, j)], expected[(i, j)], se[(i, j)]));
        for i in 0..d {
            for j in 0..d {
                if z[(i, j)].abs() > FLAG_Z {
                    flagged.push(Flag { pair: Some(k), row: i, col: j, z: z[(i, j)] });
                }
            }
        }
        out.push(PairEstimate { x, y, estimate, stderr: se, expected, z });
    }
    let mean_z_max = mean_z.amax();
    let cov_z_max = out.iter().map(|p| p.z.amax()).fold(0.0, f64::max);
    Ok(EstimatorReport {
        realizations: n,
        mean_point,
        mean,
        mean_stderr,
        mean_expected: mu,
        mean_z,
        pairs: out,
        mean_z_max,
        cov_z_max,
        z_max: mean_z_max.max(cov_z_max),
        flagged,
    })
}
