//! Datasets, centering, empirical moments and ordinary least squares.
//!
//! CSV files are comma separated with a header row; the last column is the
//! response and every other column a predictor.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::linalg::{max_abs, sym_eigen_desc, symmetrize};
use crate::{Error, Result};

/// Reciprocal condition number of the centered Gram matrix below which the
/// design is treated as singular by [`ols_fit`].
pub const RCOND_THRESHOLD: f64 = 1e-12;

/// An `n × p` predictor block with an `n`-vector response.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    x: DMatrix<f64>,
    y: DVector<f64>,
}

impl Dataset {
    pub fn new(x: DMatrix<f64>, y: DVector<f64>) -> Result<Self> {
        if x.nrows() == 0 {
            return Err(Error::ZeroRows);
        }
        if x.ncols() == 0 {
            return Err(Error::InvalidDataset("no predictor columns".into()));
        }
        if x.nrows() != y.len() {
            return Err(Error::Shape(format!(
                "x has {} rows but y has {} entries",
                x.nrows(),
                y.len()
            )));
        }
        if let Some(i) = x.iter().position(|v| !v.is_finite()) {
            let (r, c) = (i % x.nrows(), i / x.nrows());
            return Err(Error::InvalidDataset(format!(
                "non-finite predictor at row {}, column {}",
                r + 1,
                c + 1
            )));
        }
        if let Some(r) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidDataset(format!(
                "non-finite response at row {}",
                r + 1
            )));
        }
        Ok(Self { x, y })
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn y(&self) -> &DVector<f64> {
        &self.y
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    /// Rows selected by `rows`, in that order.
    pub fn select_rows(&self, rows: &[usize]) -> Dataset {
        Dataset {
            x: self.x.select_rows(rows),
            y: DVector::from_iterator(rows.len(), rows.iter().map(|&r| self.y[r])),
        }
    }

    /// Subtracts column means of `x` and the mean of `y`.
    pub fn center(&self) -> (Dataset, Means) {
        let means = Means::of(self);
        let mut x = self.x.clone();
        for (j, mut col) in x.column_iter_mut().enumerate() {
            col.add_scalar_mut(-means.x[j]);
        }
        let y = self.y.add_scalar(-means.y);
        (Dataset { x, y }, means)
    }

    pub fn sample_moments(&self) -> Result<Moments> {
        self.moments(Denominator::Unbiased)
    }

    pub fn moments(&self, denominator: Denominator) -> Result<Moments> {
        let n = self.n();
        if n < 2 {
            return Err(Error::InsufficientRows(n));
        }
        let (c, means) = self.center();
        let scale = 1.0 / denominator.value(n);
        let cov_xx = symmetrize(&(c.x.transpose() * &c.x)) * scale;
        let cov_xy = c.x.transpose() * &c.y * scale;
        let var_y = c.y.dot(&c.y) * scale;
        Ok(Moments {
            mean_x: means.x,
            mean_y: means.y,
            cov_xx,
            cov_xy,
            var_y,
        })
    }

    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let columns = rdr.headers()?.len();
        if columns < 2 {
            return Err(Error::TooFewColumns(columns));
        }
        let mut values = Vec::new();
        let mut rows = 0;
        for (r, record) in rdr.records().enumerate() {
            let record = record?;
            if record.len() != columns {
                return Err(Error::Shape(format!(
                    "row {} has {} fields, header has {}",
                    r + 1,
                    record.len(),
                    columns
                )));
            }
            for (c, field) in record.iter().enumerate() {
                let value = field
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::Parse {
                        row: r + 1,
                        column: c + 1,
                        value: field.to_string(),
                    })?;
                values.push(value);
            }
            rows += 1;
        }
        if rows == 0 {
            return Err(Error::ZeroRows);
        }
        let all = DMatrix::from_row_slice(rows, columns, &values);
        let x = all.columns(0, columns - 1).into_owned();
        let y = all.column(columns - 1).into_owned();
        Dataset::new(x, y)
    }

    /// Writes the header `x1,...,xp,y` followed by one line per row. Values
    /// use the shortest representation that parses back to the same `f64`.
    pub fn to_csv_writer<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        let mut header: Vec<String> = (1..=self.p()).map(|j| format!("x{j}")).collect();
        header.push("y".into());
        wtr.write_record(&header)?;
        for i in 0..self.n() {
            let mut row: Vec<String> = self.x.row(i).iter().map(|v| v.to_string()).collect();
            row.push(self.y[i].to_string());
            wtr.write_record(&row)?;
        }
        wtr.flush().map_err(|source| Error::Io {
            path: "<writer>".into(),
            source,
        })?;
        Ok(())
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        self.to_csv_writer(file)
    }
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Dataset::from_csv_reader(file)
}

/// Column means of `x` and the mean of `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct Means {
    pub x: DVector<f64>,
    pub y: f64,
}

impl Means {
    fn of(d: &Dataset) -> Self {
        let n = d.n() as f64;
        let x = DVector::from_iterator(d.p(), d.x.column_iter().map(|c| c.sum() / n));
        Means { x, y: d.y.sum() / n }
    }
}

/// Divisor used for empirical second moments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Denominator {
    /// `n − 1`
    #[default]
    Unbiased,
    /// `n`
    Population,
}

impl Denominator {
    pub fn value(self, n: usize) -> f64 {
        match self {
            Denominator::Unbiased => (n - 1) as f64,
            Denominator::Population => n as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    pub mean_x: DVector<f64>,
    pub mean_y: f64,
    pub cov_xx: DMatrix<f64>,
    pub cov_xy: DVector<f64>,
    pub var_y: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    pub beta: DVector<f64>,
    pub intercept: f64,
    /// `λ_min / λ_max` of the centered Gram matrix.
    pub rcond: f64,
}

impl OlsFit {
    pub fn predict(&self, x0: &DVector<f64>) -> f64 {
        self.intercept + self.beta.dot(x0)
    }
}

/// Least squares with intercept: `β̂ = (XcᵀXc)⁻¹Xcᵀyc` on centered data,
/// computed through a QR factorization of `Xc`.
pub fn ols_fit(d: &Dataset) -> Result<OlsFit> {
    let (c, means) = d.center();
    let gram = symmetrize(&(c.x.transpose() * &c.x));
    let (eigenvalues, _) = sym_eigen_desc(&gram);
    let largest = eigenvalues[0];
    let smallest = eigenvalues[eigenvalues.len() - 1];
    let rcond = if largest > 0.0 { smallest / largest } else { 0.0 };
    if rcond.is_nan() || rcond < RCOND_THRESHOLD {
        return Err(Error::Collinear { rcond });
    }
    let qr = c.x.clone().qr();
    let rhs = qr.q().transpose() * &c.y;
    let beta = qr
        .r()
        .solve_upper_triangular(&rhs)
        .ok_or(Error::Collinear { rcond })?;
    let intercept = means.y - beta.dot(&means.x);
    Ok(OlsFit {
        beta,
        intercept,
        rcond,
    })
}

/// Max-abs entry of a matrix, used as a data scale in tolerance checks.
pub fn data_scale(x: &DMatrix<f64>) -> f64 {
    max_abs(x)
}
