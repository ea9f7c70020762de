//! Coordinate charts, tensor fields, and curvature built on jet arithmetic.
//!
//! A field is a closure from seeded coordinate jets to component jets; every
//! derivative a downstream operator needs is carried by the jets themselves,
//! so there is no finite-difference step anywhere in the evaluation path.

mod curvature;
mod operators;
mod tensor;

pub use curvature::{
    christoffel_data, curvature_package, curvature_values, ricci_jets, CurvaturePack,
    CurvatureValues, RicciJets,
};
pub use operators::{
    check_div_identity, conformal_metric, conformal_scalar, div_sym2, grad_values, hessian,
    hessian_jets, hypersurface_mean_curvature, inner_sym2, laplacian_gradsq, DivIdentityCheck,
};
pub use tensor::{JetMatrix, Rank2, Rank3, Rank4};

use std::sync::Arc;

use crate::jet::{Jet, JetError};

/// Condition-number ceiling beyond which a metric value matrix is treated as
/// numerically degenerate.
pub const DEGENERACY_CONDITION_LIMIT: f64 = 1e12;

#[derive(Debug, thiserror::Error)]
pub enum GeomError {
    #[error("jet arithmetic failed: {0}")]
    Jet(#[from] JetError),
    #[error("point {point:?} lies outside the chart domain")]
    PointOutsideChart { point: Vec<f64> },
    #[error("metric is numerically degenerate (condition {condition:.3e})")]
    DegenerateMetric { condition: f64 },
    #[error("{context}: expected dimension {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("operation requires jet order >= {needed}, field was evaluated at {got}")]
    OrderTooLow { needed: usize, got: usize },
    #[error("{0}")]
    Unsupported(String),
}

/// Open coordinate box with named axes.
///
/// `minus_signs` records how many directions of the model signature are
/// timelike: 0 for Riemannian data, 1 for a static spacetime chart.
#[derive(Clone, Debug)]
pub struct Chart {
    pub names: Vec<String>,
    pub domain: Vec<(f64, f64)>,
    pub minus_signs: usize,
}

impl Chart {
    pub fn riemannian(names: &[&str], domain: &[(f64, f64)]) -> Chart {
        assert_eq!(names.len(), domain.len());
        Chart {
            names: names.iter().map(|s| s.to_string()).collect(),
            domain: domain.to_vec(),
            minus_signs: 0,
        }
    }

    pub fn lorentzian(names: &[&str], domain: &[(f64, f64)]) -> Chart {
        let mut c = Chart::riemannian(names, domain);
        c.minus_signs = 1;
        c
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn contains(&self, coords: &[f64]) -> bool {
        coords.len() == self.dim()
            && coords
                .iter()
                .zip(&self.domain)
                .all(|(&x, &(lo, hi))| x > lo && x < hi)
    }

    /// Box shrunk toward its center by `margin` on each side, for sampling
    /// well away from chart edges. Infinite ends are clamped first.
    pub fn sample_box(&self, margin: f64) -> Vec<(f64, f64)> {
        self.domain
            .iter()
            .map(|&(lo, hi)| {
                let lo = lo.max(-1e3);
                let hi = hi.min(1e3);
                let w = hi - lo;
                (lo + margin * w, hi - margin * w)
            })
            .collect()
    }
}

/// A coordinate point, assumed to lie strictly inside its chart's box.
#[derive(Clone, Debug, PartialEq)]
pub struct Point(pub Vec<f64>);

impl Point {
    pub fn new(coords: &[f64]) -> Point {
        Point(coords.to_vec())
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }
}

type ScalarFn = dyn Fn(&[Jet]) -> Result<Jet, GeomError> + Send + Sync;
type MatrixFn = dyn Fn(&[Jet]) -> Result<JetMatrix, GeomError> + Send + Sync;

/// Scalar field given by a jet closure on a chart.
#[derive(Clone)]
pub struct ScalarField {
    chart: Arc<Chart>,
    f: Arc<ScalarFn>,
}

impl ScalarField {
    pub fn from_fn(
        chart: Chart,
        f: impl Fn(&[Jet]) -> Result<Jet, GeomError> + Send + Sync + 'static,
    ) -> ScalarField {
        ScalarField {
            chart: Arc::new(chart),
            f: Arc::new(f),
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn jet(&self, p: &Point, order: usize) -> Result<Jet, GeomError> {
        let seeds = seed_chart_point(&self.chart, p, order)?;
        (self.f)(&seeds)
    }

    pub fn eval_on(&self, seeds: &[Jet]) -> Result<Jet, GeomError> {
        (self.f)(seeds)
    }

    pub fn value(&self, p: &Point) -> Result<f64, GeomError> {
        Ok(self.jet(p, 1)?.value())
    }

    /// Share the underlying closure without re-wrapping it.
    pub fn closure(&self) -> Arc<ScalarFn> {
        Arc::clone(&self.f)
    }
}

/// Symmetric 2-tensor field (not assumed invertible).
#[derive(Clone)]
pub struct Sym2Field {
    chart: Arc<Chart>,
    f: Arc<MatrixFn>,
}

impl Sym2Field {
    pub fn from_fn(
        chart: Chart,
        f: impl Fn(&[Jet]) -> Result<JetMatrix, GeomError> + Send + Sync + 'static,
    ) -> Sym2Field {
        Sym2Field {
            chart: Arc::new(chart),
            f: Arc::new(f),
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn jets(&self, p: &Point, order: usize) -> Result<JetMatrix, GeomError> {
        let seeds = seed_chart_point(&self.chart, p, order)?;
        (self.f)(&seeds)
    }

    pub fn eval_on(&self, seeds: &[Jet]) -> Result<JetMatrix, GeomError> {
        (self.f)(seeds)
    }

    /// Share the underlying closure without re-wrapping it.
    pub fn closure(&self) -> Arc<MatrixFn> {
        Arc::clone(&self.f)
    }
}

/// Metric field; evaluation rejects numerically degenerate value matrices.
#[derive(Clone)]
pub struct MetricField {
    chart: Arc<Chart>,
    f: Arc<MatrixFn>,
}

impl MetricField {
    pub fn from_fn(
        chart: Chart,
        f: impl Fn(&[Jet]) -> Result<JetMatrix, GeomError> + Send + Sync + 'static,
    ) -> MetricField {
        MetricField {
            chart: Arc::new(chart),
            f: Arc::new(f),
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn jets(&self, p: &Point, order: usize) -> Result<JetMatrix, GeomError> {
        let seeds = seed_chart_point(&self.chart, p, order)?;
        self.eval_on(&seeds)
    }

    pub fn eval_on(&self, seeds: &[Jet]) -> Result<JetMatrix, GeomError> {
        let g = (self.f)(seeds)?;
        let cond = condition_number(&g.values());
        if !(cond < DEGENERACY_CONDITION_LIMIT) {
            return Err(GeomError::DegenerateMetric { condition: cond });
        }
        Ok(g)
    }

    /// Share the underlying closure without re-wrapping it.
    pub fn closure(&self) -> Arc<MatrixFn> {
        Arc::clone(&self.f)
    }
}

pub(crate) fn seed_chart_point(
    chart: &Chart,
    p: &Point,
    order: usize,
) -> Result<Vec<Jet>, GeomError> {
    if !chart.contains(p.coords()) {
        return Err(GeomError::PointOutsideChart {
            point: p.coords().to_vec(),
        });
    }
    Ok(Jet::seed_point(p.coords(), order))
}

/// Ratio of extreme singular values of a small value matrix.
pub fn condition_number(m: &Rank2) -> f64 {
    let n = m.n();
    let dm = nalgebra::DMatrix::from_fn(n, n, |i, j| m.get(i, j));
    let svd = dm.svd(false, false);
    let max = svd.singular_values.iter().fold(0.0f64, |a, &b| a.max(b));
    let min = svd
        .singular_values
        .iter()
        .fold(f64::INFINITY, |a, &b| a.min(b));
    max / min
}

/// Deterministic low-discrepancy interior points of a chart.
pub fn sample_points(chart: &Chart, count: usize, margin: f64) -> Vec<Point> {
    let boxv = chart.sample_box(margin);
    (0..count)
        .map(|k| {
            let u = crate::numeric::halton(k, chart.dim());
            Point(crate::numeric::into_box(&u, &boxv, 0.0))
        })
        .collect()
}

/// Monomial term list with coefficients drawn from a low-discrepancy stream,
/// for reproducible polynomial test fields.
pub fn quasirandom_polynomial(
    dim: usize,
    degree: usize,
    amplitude: f64,
    stream: usize,
) -> Vec<(Vec<u8>, f64)> {
    let table = crate::jet::table::table(dim, degree);
    (0..table.len())
        .map(|t| {
            let u = crate::numeric::halton(stream * 733 + t, 2)[1];
            (table.indices[t].clone(), amplitude * (2.0 * u - 1.0))
        })
        .collect()
}

/// Evaluate a monomial term list on seeded coordinates.
pub fn polynomial_jet(terms: &[(Vec<u8>, f64)], seeds: &[Jet]) -> Jet {
    let dim = seeds[0].dim();
    let order = seeds[0].order();
    let mut acc = Jet::constant(0.0, dim, order);
    for (powers, coeff) in terms {
        let mut term = Jet::constant(*coeff, dim, order);
        for (axis, &p) in powers.iter().enumerate() {
            for _ in 0..p {
                term = &term * &seeds[axis];
            }
        }
        acc += &term;
    }
    acc
}

/// Scalar field from a monomial term list.
pub fn polynomial_scalar_field(chart: Chart, terms: Vec<(Vec<u8>, f64)>) -> ScalarField {
    ScalarField::from_fn(chart, move |seeds| Ok(polynomial_jet(&terms, seeds)))
}

/// Symmetric tensor field with one monomial term list per upper-triangle slot.
pub fn polynomial_sym2_field(chart: Chart, comps: Vec<Vec<(Vec<u8>, f64)>>) -> Sym2Field {
    let n = chart.dim();
    assert_eq!(comps.len(), n * (n + 1) / 2);
    Sym2Field::from_fn(chart, move |seeds| {
        let dim = seeds[0].dim();
        let order = seeds[0].order();
        let mut m = JetMatrix::from_fn(n, |_, _| Jet::constant(0.0, dim, order));
        let mut slot = 0;
        for i in 0..n {
            for j in i..n {
                let e = polynomial_jet(&comps[slot], seeds);
                if i != j {
                    m.set(j, i, e.clone());
                }
                m.set(i, j, e);
                slot += 1;
            }
        }
        Ok(m)
    })
}
