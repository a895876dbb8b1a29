//! Uniform cell-centered grids, scalar fields and error metrics.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Uniform cell-centered Cartesian grid.
///
/// Cell `(i, j)` has its center at `(xmin + (i + 0.5) dx, ymin + (j + 0.5) dy)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
}

impl Grid2D {
    pub fn new(xmin: f64, xmax: f64, ymin: f64, ymax: f64, nx: usize, ny: usize) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2x2 cells, got {nx}x{ny}")));
        }
        if !(xmin.is_finite() && xmax.is_finite() && ymin.is_finite() && ymax.is_finite()) {
            return Err(Error::InvalidGrid("non-finite extent".into()));
        }
        if xmax <= xmin || ymax <= ymin {
            return Err(Error::InvalidGrid(format!(
                "empty extent [{xmin}, {xmax}] x [{ymin}, {ymax}]"
            )));
        }
        Ok(Self {
            xmin,
            xmax,
            ymin,
            ymax,
            nx,
            ny,
            dx: (xmax - xmin) / nx as f64,
            dy: (ymax - ymin) / ny as f64,
        })
    }

    /// Square grid `[lo, hi]²` with `n × n` cells.
    pub fn square(lo: f64, hi: f64, n: usize) -> Result<Self> {
        Self::new(lo, hi, lo, hi, n, n)
    }

    #[inline]
    pub fn x_center(&self, i: usize) -> f64 {
        self.xmin + (i as f64 + 0.5) * self.dx
    }

    #[inline]
    pub fn y_center(&self, j: usize) -> f64 {
        self.ymin + (j as f64 + 0.5) * self.dy
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_area(&self) -> f64 {
        self.dx * self.dy
    }

    /// The transposed grid: x and y swapped.
    pub fn transposed(&self) -> Self {
        Self {
            xmin: self.ymin,
            xmax: self.ymax,
            ymin: self.xmin,
            ymax: self.xmax,
            nx: self.ny,
            ny: self.nx,
            dx: self.dy,
            dy: self.dx,
        }
    }

    pub(crate) fn ensure_same(&self, other: &Grid2D) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch {
                left: self.to_string(),
                right: other.to_string(),
            })
        }
    }
}

impl fmt::Display for Grid2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}x{} on [{}, {}]x[{}, {}]",
            self.nx, self.ny, self.xmin, self.xmax, self.ymin, self.ymax
        )
    }
}

/// Scalar field sampled at cell centers, stored row-major (y rows, x columns).
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField2D {
    grid: Grid2D,
    values: Vec<f64>,
}

impl ScalarField2D {
    pub fn zeros(grid: Grid2D) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: Grid2D, c: f64) -> Self {
        Self {
            grid,
            values: vec![c; grid.len()],
        }
    }

    pub fn from_values(grid: Grid2D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::ShapeMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        let field = Self { grid, values };
        field.check_finite()?;
        Ok(field)
    }

    /// Evaluates `f` at every cell center.
    pub fn sample<F>(grid: Grid2D, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> f64,
    {
        let mut values = Vec::with_capacity(grid.len());
        for j in 0..grid.ny {
            let y = grid.y_center(j);
            for i in 0..grid.nx {
                let v = f(grid.x_center(i), y);
                if !v.is_finite() {
                    return Err(Error::NonFinite { i, j, value: v });
                }
                values.push(v);
            }
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.grid.nx + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.values[j * self.grid.nx + i] = v;
    }

    pub fn row(&self, j: usize) -> &[f64] {
        let nx = self.grid.nx;
        &self.values[j * nx..(j + 1) * nx]
    }

    pub fn check_finite(&self) -> Result<()> {
        let nx = self.grid.nx;
        match self.values.iter().position(|v| !v.is_finite()) {
            None => Ok(()),
            Some(k) => Err(Error::NonFinite {
                i: k % nx,
                j: k / nx,
                value: self.values[k],
            }),
        }
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Plain Euclidean norm of the value vector.
    pub fn l2_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Euclidean dot product of the value vectors.
    pub fn dot(&self, other: &ScalarField2D) -> Result<f64> {
        self.grid.ensure_same(&other.grid)?;
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum())
    }

    /// `self - other`, element-wise.
    pub fn sub(&self, other: &ScalarField2D) -> Result<ScalarField2D> {
        self.zip_with(other, |a, b| a - b)
    }

    /// `self + other`, element-wise.
    pub fn add(&self, other: &ScalarField2D) -> Result<ScalarField2D> {
        self.zip_with(other, |a, b| a + b)
    }

    /// `self += alpha * other`.
    pub fn axpy(&mut self, alpha: f64, other: &ScalarField2D) -> Result<()> {
        self.grid.ensure_same(&other.grid)?;
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += alpha * b;
        }
        Ok(())
    }

    pub fn scaled(&self, alpha: f64) -> ScalarField2D {
        self.map(|v| alpha * v)
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> ScalarField2D {
        ScalarField2D {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_with<F: Fn(f64, f64) -> f64>(&self, other: &ScalarField2D, f: F) -> Result<ScalarField2D> {
        self.grid.ensure_same(&other.grid)?;
        Ok(ScalarField2D {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    /// Swaps the axes: the result's row `i` is this field's column `i`.
    pub fn transposed(&self) -> ScalarField2D {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let mut values = vec![0.0; nx * ny];
        transpose_into(&self.values, nx, ny, &mut values);
        ScalarField2D {
            grid: self.grid.transposed(),
            values,
        }
    }

    /// Bilinear interpolant through the four surrounding cell centers.
    ///
    /// Queries outside the rectangle spanned by the outermost cell centers are
    /// clamped onto it.
    pub fn bilinear(&self, x: f64, y: f64) -> f64 {
        let g = &self.grid;
        let (i0, wx) = bracket((x - g.xmin) / g.dx - 0.5, g.nx);
        let (j0, wy) = bracket((y - g.ymin) / g.dy - 0.5, g.ny);
        let v00 = self.get(i0, j0);
        let v10 = self.get(i0 + 1, j0);
        let v01 = self.get(i0, j0 + 1);
        let v11 = self.get(i0 + 1, j0 + 1);
        (1.0 - wy) * ((1.0 - wx) * v00 + wx * v10) + wy * ((1.0 - wx) * v01 + wx * v11)
    }

    /// Writes the field in the plain-text dump format: a header line
    /// `nx ny xmin xmax ymin ymax`, then the values row by row.
    pub fn to_dump(&self) -> String {
        let g = &self.grid;
        let mut out = format!("{} {} {} {} {} {}\n", g.nx, g.ny, g.xmin, g.xmax, g.ymin, g.ymax);
        for j in 0..g.ny {
            let row: Vec<String> = self.row(j).iter().map(|v| format!("{v:e}")).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_dump(text: &str) -> Result<Self> {
        text.parse()
    }
}

impl FromStr for ScalarField2D {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let bad = |what: &str| Error::InvalidParameter {
            name: "field dump",
            reason: what.to_string(),
        };
        let mut tokens = text.split_whitespace();
        let mut next = |what: &str| tokens.next().ok_or_else(|| bad(&format!("missing {what}")));
        let nx: usize = next("nx")?.parse().map_err(|_| bad("bad nx"))?;
        let ny: usize = next("ny")?.parse().map_err(|_| bad("bad ny"))?;
        let mut ext = [0.0; 4];
        for e in ext.iter_mut() {
            *e = next("extent")?.parse().map_err(|_| bad("bad extent"))?;
        }
        let grid = Grid2D::new(ext[0], ext[1], ext[2], ext[3], nx, ny)?;
        let values = tokens
            .map(|t| t.parse::<f64>().map_err(|_| bad(&format!("bad value {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::from_values(grid, values)
    }
}

/// Lower bracketing index and weight for a fractional index, clamped to `[0, n-1]`.
#[inline]
pub(crate) fn bracket(s: f64, n: usize) -> (usize, f64) {
    let s = s.clamp(0.0, (n - 1) as f64);
    let k = (s.floor() as usize).min(n - 2);
    (k, s - k as f64)
}

/// Blocked transpose of an `ny × nx` row-major array into `nx × ny`.
pub(crate) fn transpose_into(src: &[f64], nx: usize, ny: usize, dst: &mut [f64]) {
    const B: usize = 32;
    for jb in (0..ny).step_by(B) {
        for ib in (0..nx).step_by(B) {
            for j in jb..(jb + B).min(ny) {
                for i in ib..(ib + B).min(nx) {
                    dst[i * ny + j] = src[j * nx + i];
                }
            }
        }
    }
}

/// Root-mean-square difference over all cells.
pub fn rms_error(numeric: &ScalarField2D, exact: &ScalarField2D) -> Result<f64> {
    numeric.grid.ensure_same(&exact.grid)?;
    let n = numeric.values.len() as f64;
    let sum: f64 = numeric
        .values
        .iter()
        .zip(&exact.values)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok((sum / n).sqrt())
}

/// Euclidean norm of the difference divided by the cell count, i.e.
/// `rms_error / √N`. Some published forward checks use this scaling.
pub fn l2_per_cell_error(numeric: &ScalarField2D, exact: &ScalarField2D) -> Result<f64> {
    Ok(rms_error(numeric, exact)? / (numeric.values.len() as f64).sqrt())
}

/// Observed order from errors at spacing `2h` (coarse) and `h` (fine).
pub fn order_of_accuracy(e_coarse: f64, e_fine: f64) -> Result<f64> {
    if !(e_coarse > 0.0 && e_fine > 0.0) {
        return Err(Error::NonPositiveError {
            coarse: e_coarse,
            fine: e_fine,
        });
    }
    Ok((e_coarse / e_fine).log2())
}
