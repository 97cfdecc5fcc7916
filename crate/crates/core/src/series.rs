use crate::error::{Error, Result};

/// A multi-dimensional time series stored row-major: one row per time step,
/// one column per channel.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiSeries {
    values: Vec<f64>,
    len: usize,
    dims: usize,
}

impl MultiSeries {
    /// Builds a series from a flat row-major buffer.
    pub fn new(values: Vec<f64>, len: usize, dims: usize) -> Result<Self> {
        if len == 0 || dims == 0 {
            return Err(Error::EmptySeries);
        }
        if values.len() != len * dims {
            return Err(Error::DimensionMismatch {
                left: values.len(),
                right: len * dims,
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / dims,
                col: pos % dims,
            });
        }
        Ok(Self { values, len, dims })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let first = rows.first().ok_or(Error::EmptySeries)?;
        let dims = first.as_ref().len();
        let mut values = Vec::with_capacity(rows.len() * dims);
        for row in rows {
            let row = row.as_ref();
            if row.len() != dims {
                return Err(Error::DimensionMismatch {
                    left: dims,
                    right: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        Self::new(values, rows.len(), dims)
    }

    /// One-dimensional series from scalar samples.
    pub fn from_scalars(samples: &[f64]) -> Result<Self> {
        Self::new(samples.to_vec(), samples.len(), 1)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    /// Always false for a constructed series; present for API symmetry.
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.dims..(i + 1) * self.dims]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> {
        self.values.chunks_exact(self.dims)
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.dims + col]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    /// New series made of the given columns, in the given order.
    pub fn select_columns(&self, columns: &[usize]) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::EmptySeries);
        }
        if let Some(&bad) = columns.iter().find(|&&c| c >= self.dims) {
            return Err(Error::DimensionMismatch {
                left: bad,
                right: self.dims,
            });
        }
        let mut values = Vec::with_capacity(self.len * columns.len());
        for row in self.rows() {
            values.extend(columns.iter().map(|&c| row[c]));
        }
        Ok(Self {
            values,
            len: self.len,
            dims: columns.len(),
        })
    }

    /// Every entry multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.values.iter().map(|v| v * factor).collect(), self.len, self.dims)
    }
}
