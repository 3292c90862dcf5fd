//! Coordinate-function frames `X_{F_i}(x)` near a submanifold in Darboux
//! coordinates, and the differential of `a -> phi^1_{sum a_i F_i}(x)`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::charts::{ContactChart, Point};
use crate::dynamics::field::ScalarField;
use crate::dynamics::flow::flow_endpoint;
use crate::dynamics::vector_field::contact_field_at;
use crate::error::{ContactError, Result};
use crate::linalg;
use crate::submanifolds::patch::LocalModel;

/// A Darboux coordinate function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FrameFunction {
    /// `x_m`, 1-based.
    X(usize),
    /// `y_m`, 1-based.
    Y(usize),
    Z,
}

impl FrameFunction {
    pub fn axis(self, n: usize) -> Result<usize> {
        match self {
            FrameFunction::X(m) if (1..=n).contains(&m) => Ok(m - 1),
            FrameFunction::Y(m) if (1..=n).contains(&m) => Ok(n + m - 1),
            FrameFunction::Z => Ok(2 * n),
            other => Err(ContactError::Input(format!("{other:?} is not a coordinate of darboux:{n}"))),
        }
    }
}

/// The coordinate functions cutting out a local model: `x_1..x_k`, `y_1..y_{n-k}`
/// and `z` for the first model; `x_1..x_{k+1}`, `y_1..y_{n-k}` for the second.
pub fn model_frame(model: LocalModel, n: usize, k: usize) -> Vec<FrameFunction> {
    let xs = match model {
        LocalModel::WithZ => k,
        LocalModel::WithoutZ => k + 1,
    };
    let mut f: Vec<FrameFunction> = (1..=xs).map(FrameFunction::X).chain((1..=n - k).map(FrameFunction::Y)).collect();
    if model == LocalModel::WithZ {
        f.push(FrameFunction::Z);
    }
    f
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameRank {
    pub vectors: Vec<Vec<f64>>,
    pub singular_values: Vec<f64>,
    pub rank: usize,
}

fn darboux_n(chart: &ContactChart) -> Result<usize> {
    match chart {
        ContactChart::Darboux { n } => Ok(*n),
        other => Err(ContactError::Input(format!("frame ranks are defined on Darboux charts, not `{other}`"))),
    }
}

/// Evaluate `X_{F_i}(x)` for each frame function and return their numerical rank.
pub fn local_frame_rank(chart: &ContactChart, x: &Point, frame: &[FrameFunction], rank_tol: f64) -> Result<FrameRank> {
    let n = darboux_n(chart)?;
    let d = chart.dimension();
    let vectors = frame
        .iter()
        .map(|f| Ok(contact_field_at(chart, &ScalarField::coordinate(d, f.axis(n)?), 0.0, x)?.components))
        .collect::<Result<Vec<_>>>()?;
    let m = linalg::columns(&vectors, d);
    Ok(FrameRank { singular_values: linalg::singular_values(&m), rank: linalg::numerical_rank(&m, rank_tol), vectors })
}

/// Central-difference differential at `a = 0` of `a -> phi^1_{sum a_i F_i}(x)`.
pub fn embedding_differential(chart: &ContactChart, x: &Point, frame: &[FrameFunction], fd_step: f64, step: f64) -> Result<DMatrix<f64>> {
    let n = darboux_n(chart)?;
    let d = chart.dimension();
    let mut cols = Vec::with_capacity(frame.len());
    for f in frame {
        let coord = ScalarField::coordinate(d, f.axis(n)?);
        let plus = flow_endpoint(chart, &coord.scaled(fd_step), &x.coords, 0.0, 1.0, step)?.point;
        let minus = flow_endpoint(chart, &coord.scaled(-fd_step), &x.coords, 0.0, 1.0, step)?.point;
        cols.push(chart.coord_delta(&minus, &plus).into_iter().map(|v| v / (2.0 * fd_step)).collect::<Vec<_>>());
    }
    Ok(linalg::columns(&cols, d))
}
