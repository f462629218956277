//! Kohonen self-organizing maps on a rectangular lattice.
//!
//! Random draws use ChaCha8 (`rand_chacha`) seeded with `seed_from_u64`:
//! stream 0 initializes the weights, stream 1 picks training rows.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{append_attribute, AttributeSchema, Relation, ScalerParams, Value};
use crate::error::{Error, Result};
use crate::num::Scalar;

/// Slack allowed around [0,1] when checking that training data is normalized.
pub const NORMALIZED_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SomParams<T> {
    pub grid_width: usize,
    pub grid_height: usize,
    /// NI
    pub iterations: usize,
    /// σ₀
    pub initial_radius: T,
    /// RM
    pub map_radius: T,
    /// L₀
    pub initial_rate: T,
    pub seed: u64,
}

impl<T: Scalar> SomParams<T> {
    /// Defaults: σ₀ = max(width, height)/2, RM = σ₀, L₀ = 0.1, NI = 500.
    pub fn new(grid_width: usize, grid_height: usize, seed: u64) -> Self {
        let sigma = T::from_count(grid_width.max(grid_height)) / T::from_f64_lossy(2.0);
        SomParams {
            grid_width,
            grid_height,
            iterations: 500,
            initial_radius: sigma,
            map_radius: sigma,
            initial_rate: T::from_f64_lossy(0.1),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.grid_width == 0 || self.grid_height == 0 {
            return bad(format!("grid {}x{} has no cells", self.grid_height, self.grid_width));
        }
        if self.iterations == 0 {
            return bad("iterations must be at least 1".into());
        }
        let longest = T::from_count(self.grid_width.max(self.grid_height));
        if !(self.initial_radius > T::zero() && self.initial_radius <= longest) {
            return bad(format!("initial radius {} outside (0, {longest}]", self.initial_radius));
        }
        if !(self.map_radius > T::zero() && self.map_radius.is_finite()) {
            return bad(format!("map radius {} must be positive", self.map_radius));
        }
        if !(self.initial_rate > T::zero() && self.initial_rate <= T::one()) {
            return bad(format!("learning rate {} outside (0, 1]", self.initial_rate));
        }
        Ok(())
    }

    pub fn cells(&self) -> usize {
        self.grid_width * self.grid_height
    }
}

/// Zero-based lattice coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
}

impl Cell {
    pub fn grid_distance<T: Scalar>(self, other: Cell) -> T {
        let dr = T::from_count(self.row.abs_diff(other.row));
        let dc = T::from_count(self.col.abs_diff(other.col));
        (dr * dr + dc * dc).sqrt()
    }

    /// `{prefix}_{row}{col}` with one-based indices; an underscore separates
    /// the indices once either exceeds 9.
    pub fn label(self, prefix: &str) -> String {
        let (r, c) = (self.row + 1, self.col + 1);
        if r > 9 || c > 9 {
            format!("{prefix}_{r}_{c}")
        } else {
            format!("{prefix}_{r}{c}")
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SomGrid<T> {
    pub params: SomParams<T>,
    pub dim: usize,
    /// Row-major cells, `dim` components each.
    pub weights: Vec<T>,
}

impl<T: Scalar> SomGrid<T> {
    pub fn cell_count(&self) -> usize {
        self.params.cells()
    }

    pub fn cell(&self, index: usize) -> Cell {
        Cell {
            row: index / self.params.grid_width,
            col: index % self.params.grid_width,
        }
    }

    pub fn index(&self, cell: Cell) -> usize {
        cell.row * self.params.grid_width + cell.col
    }

    pub fn weights_of(&self, cell: Cell) -> &[T] {
        let i = self.index(cell) * self.dim;
        &self.weights[i..i + self.dim]
    }

    fn check_dim(&self, input: &[T]) -> Result<()> {
        if input.len() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                found: input.len(),
            });
        }
        Ok(())
    }

    /// BMU and its squared distance.
    fn nearest(&self, input: &[T]) -> (usize, T) {
        let mut best = (0, T::infinity());
        for (i, w) in self.weights.chunks_exact(self.dim).enumerate() {
            let d = sq_dist(input, w);
            if d < best.1 {
                best = (i, d);
            }
        }
        best
    }
}

fn sq_dist<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum()
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Weights drawn uniformly from [0,1].
pub fn init_grid<T: Scalar>(params: &SomParams<T>, dim: usize) -> Result<SomGrid<T>> {
    params.validate()?;
    if dim == 0 {
        return Err(Error::InvalidArgument("feature dimension must be at least 1".into()));
    }
    let mut rng = stream_rng(params.seed, 0);
    let weights = (0..params.cells() * dim)
        .map(|_| T::from_f64_lossy(rng.gen::<f64>()))
        .collect();
    Ok(SomGrid {
        params: params.clone(),
        dim,
        weights,
    })
}

/// `Σ (I_i − W_i)²`, without the square root.
pub fn squared_distance<T: Scalar>(input: &[T], weights: &[T]) -> Result<T> {
    if input.len() != weights.len() {
        return Err(Error::Dimension {
            expected: weights.len(),
            found: input.len(),
        });
    }
    Ok(sq_dist(input, weights))
}

/// Cell closest to `input`; the first in row-major order wins ties.
pub fn find_bmu<T: Scalar>(grid: &SomGrid<T>, input: &[T]) -> Result<Cell> {
    grid.check_dim(input)?;
    Ok(grid.cell(grid.nearest(input).0))
}

/// λ = NI / RM.
pub fn time_constant<T: Scalar>(iterations: usize, map_radius: T) -> Result<T> {
    if !(map_radius > T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "map radius {map_radius} must be positive"
        )));
    }
    if iterations == 0 {
        return Err(Error::InvalidArgument("iterations must be at least 1".into()));
    }
    Ok(T::from_count(iterations) / map_radius)
}

/// σ(t) = σ₀·exp(−t/λ).
pub fn radius<T: Scalar>(t: usize, initial_radius: T, lambda: T) -> T {
    initial_radius * (-T::from_count(t) / lambda).exp()
}

/// L(t) = L₀·exp(−t/λ).
pub fn learning_rate<T: Scalar>(t: usize, initial_rate: T, lambda: T) -> T {
    initial_rate * (-T::from_count(t) / lambda).exp()
}

/// Θ = exp(−d²/(2σ²)) for a lattice distance `d` to the BMU.
pub fn influence<T: Scalar>(dist_bmu: T, sigma: T) -> Result<T> {
    if !(sigma > T::zero()) {
        return Err(Error::InvalidArgument(format!("radius {sigma} must be positive")));
    }
    if !(dist_bmu >= T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "distance {dist_bmu} must be non-negative"
        )));
    }
    let two = T::from_f64_lossy(2.0);
    Ok((-(dist_bmu * dist_bmu) / (two * sigma * sigma)).exp())
}

fn check_data<T: Scalar>(data: &[Vec<T>]) -> Result<usize> {
    let first = data
        .first()
        .ok_or_else(|| Error::InvalidArgument("no training rows".into()))?;
    let dim = first.len();
    let lo = T::from_f64_lossy(-NORMALIZED_SLACK);
    let hi = T::from_f64_lossy(1.0 + NORMALIZED_SLACK);
    for (i, row) in data.iter().enumerate() {
        if row.len() != dim {
            return Err(Error::Dimension {
                expected: dim,
                found: row.len(),
            });
        }
        if let Some(x) = row.iter().find(|&&x| !(x >= lo && x <= hi)) {
            return Err(Error::InvalidArgument(format!(
                "row {}: value {x} is not normalized to [0,1]",
                i + 1
            )));
        }
    }
    Ok(dim)
}

/// Runs NI steps of: draw a row, find its BMU, shrink the radius and pull
/// every cell within the radius toward the row.
pub fn train<T: Scalar>(data: &[Vec<T>], params: &SomParams<T>) -> Result<SomGrid<T>> {
    let dim = check_data(data)?;
    let mut grid = init_grid(params, dim)?;
    let lambda = time_constant(params.iterations, params.map_radius)?;
    let mut rng = stream_rng(params.seed, 1);
    let cells: Vec<Cell> = (0..grid.cell_count()).map(|i| grid.cell(i)).collect();
    for t in 0..params.iterations {
        let input = &data[rng.gen_range(0..data.len())];
        let bmu = grid.cell(grid.nearest(input).0);
        let sigma = radius(t, params.initial_radius, lambda);
        let rate = learning_rate(t, params.initial_rate, lambda);
        for (i, &cell) in cells.iter().enumerate() {
            let d: T = cell.grid_distance(bmu);
            if d > sigma {
                continue;
            }
            let step = influence(d, sigma)? * rate;
            for (w, &x) in grid.weights[i * dim..(i + 1) * dim].iter_mut().zip(input) {
                *w += step * (x - *w);
            }
        }
    }
    Ok(grid)
}

/// Mean Euclidean distance from each row to its BMU.
pub fn quantization_error<T: Scalar>(grid: &SomGrid<T>, data: &[Vec<T>]) -> Result<T> {
    if data.is_empty() {
        return Err(Error::InvalidArgument("no rows to measure".into()));
    }
    let mut total = T::zero();
    for row in data {
        grid.check_dim(row)?;
        total += grid.nearest(row).1.sqrt();
    }
    Ok(total / T::from_count(data.len()))
}

/// Feature matrix of `features`, mapped through `scaler`.
pub fn feature_matrix<T: Scalar>(rel: &Relation, features: &[&str], scaler: &ScalerParams) -> Result<Vec<Vec<T>>> {
    let mut columns = Vec::with_capacity(features.len());
    for &f in features {
        let attr = rel.attribute(f)?;
        if !attr.is_continuous() {
            return Err(Error::KindMismatch {
                attr: f.to_string(),
                expected: "continuous",
                found: attr.kind.name(),
            });
        }
        let col = rel.numeric_column(f)?;
        let scaled = col
            .into_iter()
            .map(|x| scaler.scale(f, x).map(T::from_f64_lossy))
            .collect::<Result<Vec<T>>>()?;
        columns.push(scaled);
    }
    Ok((0..rel.len()).map(|r| columns.iter().map(|c| c[r]).collect()).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SomAssignment {
    pub attr: String,
    pub grid_width: usize,
    pub grid_height: usize,
    /// BMU of each record, in record order.
    pub cells: Vec<Cell>,
    /// Record count per cell, row-major.
    pub counts: Vec<usize>,
}

impl SomAssignment {
    pub fn count(&self, cell: Cell) -> usize {
        self.counts[cell.row * self.grid_width + cell.col]
    }

    pub fn labels(&self) -> Vec<String> {
        (0..self.grid_height)
            .flat_map(|row| (0..self.grid_width).map(move |col| Cell { row, col }))
            .map(|c| c.label(&self.attr))
            .collect()
    }

    /// Lattice table with the record count beside every cell label.
    pub fn table(&self) -> String {
        let labels = self.labels();
        let mut rows: Vec<Vec<String>> = vec![std::iter::once(String::new())
            .chain((1..=self.grid_width).map(|c| format!("{}_i{c}", self.attr)))
            .collect()];
        for r in 0..self.grid_height {
            let mut row = vec![format!("{}_{}j", self.attr, r + 1)];
            for c in 0..self.grid_width {
                let i = r * self.grid_width + c;
                row.push(format!("{} ({})", labels[i], self.counts[i]));
            }
            rows.push(row);
        }
        let widths: Vec<usize> = (0..=self.grid_width)
            .map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for row in rows {
            let mut line = String::new();
            for (c, cell) in row.iter().enumerate() {
                if c > 0 {
                    line.push_str("  ");
                }
                let _ = write!(line, "{cell:<w$}", w = widths[c]);
            }
            out.push_str(line.trim_end());
            out.push('\n');
        }
        out
    }
}

/// Maps every record to its BMU and appends the cell label as a new
/// categorical attribute `out_attr`.
pub fn assign<T: Scalar>(
    grid: &SomGrid<T>,
    rel: &Relation,
    features: &[&str],
    scaler: &ScalerParams,
    out_attr: &str,
) -> Result<(Relation, SomAssignment)> {
    if features.len() != grid.dim {
        return Err(Error::Dimension {
            expected: grid.dim,
            found: features.len(),
        });
    }
    let data = feature_matrix::<T>(rel, features, scaler)?;
    let mut counts = vec![0usize; grid.cell_count()];
    let mut cells = Vec::with_capacity(data.len());
    let mut values = Vec::with_capacity(data.len());
    for row in &data {
        let idx = grid.nearest(row).0;
        counts[idx] += 1;
        cells.push(grid.cell(idx));
        values.push(Value::Category(idx));
    }
    let assignment = SomAssignment {
        attr: out_attr.to_string(),
        grid_width: grid.params.grid_width,
        grid_height: grid.params.grid_height,
        cells,
        counts,
    };
    let attr = AttributeSchema::categorical(out_attr, assignment.labels());
    let out = append_attribute(rel, attr, values)?;
    Ok((out, assignment))
}
