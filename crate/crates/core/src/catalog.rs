//! Built-in exact geometries: hyperbolic space, AdS in boundary-adapted
//! coordinates, Schwarzschild-AdS, the AdS soliton, and the two structural
//! lifts of a static triple (Lorentzian spacetime and Riemannian double).
//!
//! All charts are open boxes kept a constructor-enforced margin away from
//! coordinate degeneracies (the polar axis, horizons, the r = 2 limit of the
//! boundary-adapted chart).

use std::sync::Arc;

use crate::geometry::{Chart, GeomError, JetMatrix, MetricField, ScalarField};
use crate::jet::Jet;
use crate::numeric::bisect;

pub const HORIZON_MARGIN: f64 = 1e-3;

#[derive(Debug, thiserror::Error)]
pub enum CatalogError {
    #[error("spatial dimension {0} unsupported (need 2 <= n <= 5)")]
    UnsupportedDimension(usize),
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
}

/// Topology of conformal infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryTopology {
    Sphere,
    /// Product of a contractible circle with flat directions (soliton).
    Torus,
}

/// Univariate jet closure for one radial coefficient.
pub type RadialFn = Arc<dyn Fn(&Jet) -> Result<Jet, GeomError> + Send + Sync>;

/// Warped-product description g = grr(rho) drho^2 + warp_sq(rho) h0 with
/// lapse(rho), h0 the unit round sphere. Closures must be smooth on
/// (lo, infinity); `lo` already includes any safety margin.
#[derive(Clone)]
pub struct RadialProfile {
    pub lo: f64,
    pub grr: RadialFn,
    pub warp_sq: RadialFn,
    pub lapse: RadialFn,
}

/// A static vacuum candidate: spatial metric and positive lapse.
#[derive(Clone)]
pub struct StaticTriple {
    pub n: usize,
    pub g: MetricField,
    pub v: ScalarField,
    pub label: String,
    pub params: Vec<(String, f64)>,
    /// Warped-product data for gauge construction, when the metric is given
    /// in radial-polar form.
    pub radial: Option<RadialProfile>,
    /// True when the chart is already boundary-adapted (conformal infinity
    /// at r = 0 with g = r^{-2}(dr^2 + ...)).
    pub fg_native: bool,
    pub boundary: BoundaryTopology,
    /// True when the chart ends at an inner boundary (horizon margin) rather
    /// than closing up smoothly.
    pub inner_boundary: bool,
}

/// A Lorentzian metric with one timelike direction.
#[derive(Clone)]
pub struct LorentzMetric {
    pub metric: MetricField,
    pub label: String,
    pub params: Vec<(String, f64)>,
    /// Period of the contractible angle, when one exists.
    pub phi_period: Option<f64>,
    pub boundary: BoundaryTopology,
}

/// Riemannian double V^2 dtheta^2 + g on S^1 x M.
#[derive(Clone)]
pub struct DoubledMetric {
    pub metric: MetricField,
    pub theta_period: f64,
}

fn check_dim(n: usize) -> Result<(), CatalogError> {
    if (2..=5).contains(&n) {
        Ok(())
    } else {
        Err(CatalogError::UnsupportedDimension(n))
    }
}

/// Coordinate names r, theta1, ..., phi for an n-dimensional polar chart.
fn polar_names(n: usize) -> Vec<String> {
    let mut names = vec!["r".to_string()];
    for k in 1..n.saturating_sub(1) {
        names.push(format!("theta{k}"));
    }
    if n >= 2 {
        names.push("phi".to_string());
    }
    names
}

fn polar_domain(n: usize, r_lo: f64, r_hi: f64) -> Vec<(f64, f64)> {
    let mut dom = vec![(r_lo, r_hi)];
    for _ in 1..n.saturating_sub(1) {
        dom.push((0.0, std::f64::consts::PI));
    }
    if n >= 2 {
        dom.push((0.0, 2.0 * std::f64::consts::PI));
    }
    dom
}

pub(crate) fn polar_chart(n: usize, r_lo: f64, r_hi: f64) -> Chart {
    let names = polar_names(n);
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    Chart::riemannian(&refs, &polar_domain(n, r_lo, r_hi))
}

/// Diagonal of the unit round metric on S^m in nested polar angles starting
/// at seed slot `first`: entry k is prod_{j<k} sin^2(angle_j).
pub(crate) fn round_sphere_diag(seeds: &[Jet], first: usize, m: usize) -> Vec<Jet> {
    let dim = seeds[0].dim();
    let order = seeds[0].order();
    let mut out = Vec::with_capacity(m);
    let mut acc = Jet::constant(1.0, dim, order);
    for k in 0..m {
        out.push(acc.clone());
        if k + 1 < m {
            let s = seeds[first + k].sin();
            acc = &acc * &(&s * &s);
        }
    }
    out
}

pub(crate) fn diagonal_metric(entries: Vec<Jet>) -> JetMatrix {
    let n = entries.len();
    let dim = entries[0].dim();
    let order = entries[0].order();
    JetMatrix::from_fn(n, |i, j| {
        if i == j {
            entries[i].clone()
        } else {
            Jet::constant(0.0, dim, order)
        }
    })
}

/// Hyperbolic space dr^2 + sinh^2(r) h0 with lapse cosh r.
pub fn make_hyperbolic(n: usize) -> Result<StaticTriple, CatalogError> {
    check_dim(n)?;
    let chart = polar_chart(n, 1e-3, 4.0);
    let g = MetricField::from_fn(chart.clone(), move |seeds| {
        let sh = seeds[0].sinh();
        let warp = &sh * &sh;
        let mut diag = vec![Jet::constant(1.0, seeds[0].dim(), seeds[0].order())];
        for h in round_sphere_diag(seeds, 1, n - 1) {
            diag.push(&warp * &h);
        }
        Ok(diagonal_metric(diag))
    });
    let v = ScalarField::from_fn(chart, |seeds| Ok(seeds[0].cosh()));
    let radial = RadialProfile {
        lo: 1e-3,
        grr: Arc::new(|r: &Jet| Ok(Jet::constant(1.0, r.dim(), r.order()))),
        warp_sq: Arc::new(|r: &Jet| {
            let sh = r.sinh();
            Ok(&sh * &sh)
        }),
        lapse: Arc::new(|r: &Jet| Ok(r.cosh())),
    };
    Ok(StaticTriple {
        n,
        g,
        v,
        label: "hyperbolic".into(),
        params: vec![],
        radial: Some(radial),
        fg_native: false,
        boundary: BoundaryTopology::Sphere,
        inner_boundary: false,
    })
}

/// AdS in boundary-adapted coordinates:
/// g = r^{-2}(dr^2 + (1 - r^2/4)^2 h0), V = 1/r + r/4.
pub fn make_ads_fg(n: usize) -> Result<StaticTriple, CatalogError> {
    check_dim(n)?;
    let chart = polar_chart(n, 4e-3, 1.9);
    let g = MetricField::from_fn(chart.clone(), move |seeds| {
        let rinv = seeds[0].recip()?;
        let rinv2 = &rinv * &rinv;
        let dim = seeds[0].dim();
        let order = seeds[0].order();
        let w = &Jet::constant(1.0, dim, order) - &(&seeds[0] * &seeds[0]).scale(0.25);
        let warp = &rinv2 * &(&w * &w);
        let mut diag = vec![rinv2.clone()];
        for h in round_sphere_diag(seeds, 1, n - 1) {
            diag.push(&warp * &h);
        }
        Ok(diagonal_metric(diag))
    });
    let v = ScalarField::from_fn(chart, |seeds| {
        let rinv = seeds[0].recip()?;
        Ok(&rinv + &seeds[0].scale(0.25))
    });
    Ok(StaticTriple {
        n,
        g,
        v,
        label: "ads-fg".into(),
        params: vec![],
        radial: None,
        fg_native: true,
        boundary: BoundaryTopology::Sphere,
        inner_boundary: false,
    })
}

/// Largest zero of f(r) = 1 + r^2 - M / r^{n-2}, or 0 when f has no root.
pub fn schwarzschild_horizon(n: usize, m: f64) -> f64 {
    let f = |r: f64| 1.0 + r * r - m / r.powi(n as i32 - 2);
    if m <= 0.0 || f(1e-8) >= 0.0 {
        return 0.0;
    }
    bisect(f, 1e-8, m + 2.0, 1e-13)
}

/// Schwarzschild-AdS with f(r) = 1 + r^2 - M/r^{n-2}, V = sqrt(f), on a
/// chart starting a fixed margin above the horizon.
pub fn make_schwarzschild_ads(n: usize, m: f64) -> Result<StaticTriple, CatalogError> {
    make_schwarzschild_ads_with_rmax(n, m, 12.0)
}

/// Same triple on an enlarged radial interval, for far-field sampling.
pub fn make_schwarzschild_ads_with_rmax(
    n: usize,
    m: f64,
    r_max: f64,
) -> Result<StaticTriple, CatalogError> {
    check_dim(n)?;
    if !(m >= 0.0) {
        return Err(CatalogError::InvalidParameter {
            name: "M",
            value: m,
            reason: "mass parameter must be nonnegative",
        });
    }
    let r_h = schwarzschild_horizon(n, m);
    let r_lo = (r_h + HORIZON_MARGIN).max(1e-3);
    let chart = polar_chart(n, r_lo, r_max);

    let f_jet = move |r: &Jet| -> Result<Jet, GeomError> {
        let dim = r.dim();
        let order = r.order();
        let mut f = &Jet::constant(1.0, dim, order) + &(r * r);
        if m != 0.0 {
            let rinv = r.recip()?;
            let mut p = Jet::constant(1.0, dim, order);
            for _ in 0..n - 2 {
                p = &p * &rinv;
            }
            f -= &p.scale(m);
        }
        Ok(f)
    };

    let g = MetricField::from_fn(chart.clone(), move |seeds| {
        let f = f_jet(&seeds[0])?;
        let warp = &seeds[0] * &seeds[0];
        let mut diag = vec![f.recip()?];
        for h in round_sphere_diag(seeds, 1, n - 1) {
            diag.push(&warp * &h);
        }
        Ok(diagonal_metric(diag))
    });
    let v = ScalarField::from_fn(chart, move |seeds| Ok(f_jet(&seeds[0])?.sqrt()?));
    let radial = RadialProfile {
        lo: r_lo,
        grr: Arc::new(move |r: &Jet| f_jet(r)?.recip().map_err(GeomError::from)),
        warp_sq: Arc::new(|r: &Jet| Ok(r * r)),
        lapse: Arc::new(move |r: &Jet| f_jet(r)?.sqrt().map_err(GeomError::from)),
    };
    Ok(StaticTriple {
        n,
        g,
        v,
        label: "schwarzschild-ads".into(),
        params: vec![("M".into(), m)],
        radial: Some(radial),
        fg_native: false,
        boundary: BoundaryTopology::Sphere,
        inner_boundary: r_h > 0.0,
    })
}

/// The AdS soliton, Lorentzian only:
/// ds^2 = -r^2 dt^2 + V^{-1} dr^2 + V dphi^2 + r^2 (flat T^{n-2}),
/// V(r) = r^2 (1 - r0^n / r^n), phi periodic with period 4 pi / (n r0).
pub fn make_ads_soliton(n: usize, r0: f64) -> Result<LorentzMetric, CatalogError> {
    check_dim(n)?;
    if !(r0 > 0.0) {
        return Err(CatalogError::InvalidParameter {
            name: "r0",
            value: r0,
            reason: "tip radius must be positive",
        });
    }
    let phi_period = 4.0 * std::f64::consts::PI / (n as f64 * r0);
    let mut names: Vec<String> = vec!["t".into(), "r".into(), "phi".into()];
    let mut dom = vec![(-4.0, 4.0), (r0 + HORIZON_MARGIN, 8.0), (0.0, phi_period)];
    for k in 1..=n - 2 {
        names.push(format!("x{k}"));
        dom.push((-4.0, 4.0));
    }
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let chart = Chart::lorentzian(&refs, &dom);

    let metric = MetricField::from_fn(chart, move |seeds| {
        let dim = seeds[1].dim();
        let order = seeds[1].order();
        let r = &seeds[1];
        let r2 = r * r;
        // V = r^2 - r0^n / r^{n-2}
        let rinv = r.recip()?;
        let mut p = Jet::constant(r0.powi(n as i32), dim, order);
        for _ in 0..n - 2 {
            p = &p * &rinv;
        }
        let v = &r2 - &p;
        let mut diag = vec![r2.scale(-1.0), v.recip()?, v];
        for _ in 1..=n - 2 {
            diag.push(r2.clone());
        }
        Ok(diagonal_metric(diag))
    });
    Ok(LorentzMetric {
        metric,
        label: "ads-soliton".into(),
        params: vec![("r0".into(), r0)],
        phi_period: Some(phi_period),
        boundary: BoundaryTopology::Torus,
    })
}

/// Lorentzian lift -V^2 dt^2 + g of a static triple.
pub fn spacetime_metric(s: &StaticTriple) -> LorentzMetric {
    let n = s.n;
    let mut names = vec!["t".to_string()];
    names.extend(s.g.chart().names.iter().cloned());
    let mut dom = vec![(-4.0, 4.0)];
    dom.extend(s.g.chart().domain.iter().cloned());
    let refs: Vec<&str> = names.iter().map(|x| x.as_str()).collect();
    let chart = Chart::lorentzian(&refs, &dom);
    let gf = s.g.closure();
    let vf = s.v.closure();
    let metric = MetricField::from_fn(chart, move |seeds| {
        let spatial = &seeds[1..];
        let gs = gf(spatial)?;
        let v = vf(spatial)?;
        let tt = (&v * &v).scale(-1.0);
        let dim = seeds[0].dim();
        let order = seeds[0].order();
        Ok(JetMatrix::from_fn(n + 1, |i, j| match (i, j) {
            (0, 0) => tt.clone(),
            (0, _) | (_, 0) => Jet::constant(0.0, dim, order),
            _ => gs.get(i - 1, j - 1).clone(),
        }))
    });
    LorentzMetric {
        metric,
        label: format!("{}-spacetime", s.label),
        params: s.params.clone(),
        phi_period: None,
        boundary: s.boundary,
    }
}

/// Riemannian double V^2 dtheta^2 + g on S^1 x M, theta-period 2 pi.
pub fn doubled_riemannian(s: &StaticTriple) -> DoubledMetric {
    let n = s.n;
    let mut names = vec!["theta".to_string()];
    names.extend(s.g.chart().names.iter().cloned());
    let mut dom = vec![(0.0, 2.0 * std::f64::consts::PI)];
    dom.extend(s.g.chart().domain.iter().cloned());
    let refs: Vec<&str> = names.iter().map(|x| x.as_str()).collect();
    let chart = Chart::riemannian(&refs, &dom);
    let gf = s.g.closure();
    let vf = s.v.closure();
    let metric = MetricField::from_fn(chart, move |seeds| {
        let spatial = &seeds[1..];
        let gs = gf(spatial)?;
        let v = vf(spatial)?;
        let tt = &v * &v;
        let dim = seeds[0].dim();
        let order = seeds[0].order();
        Ok(JetMatrix::from_fn(n + 1, |i, j| match (i, j) {
            (0, 0) => tt.clone(),
            (0, _) | (_, 0) => Jet::constant(0.0, dim, order),
            _ => gs.get(i - 1, j - 1).clone(),
        }))
    });
    DoubledMetric {
        metric,
        theta_period: 2.0 * std::f64::consts::PI,
    }
}

/// Flat metric in Cartesian coordinates, for tests and auxiliary checks.
pub fn euclidean_cartesian(n: usize) -> MetricField {
    let names = ["x1", "x2", "x3", "x4", "x5", "x6"];
    let chart = Chart::riemannian(&names[..n], &vec![(-5.0, 5.0); n]);
    MetricField::from_fn(chart, move |seeds| {
        let dim = seeds[0].dim();
        let order = seeds[0].order();
        Ok(JetMatrix::from_fn(n, |i, j| {
            Jet::constant(if i == j { 1.0 } else { 0.0 }, dim, order)
        }))
    })
}

/// Flat metric in polar coordinates dr^2 + r^2 h0.
pub fn euclidean_polar(n: usize) -> MetricField {
    let chart = polar_chart(n, 1e-3, 10.0);
    MetricField::from_fn(chart, move |seeds| {
        let warp = &seeds[0] * &seeds[0];
        let mut diag = vec![Jet::constant(1.0, seeds[0].dim(), seeds[0].order())];
        for h in round_sphere_diag(seeds, 1, n - 1) {
            diag.push(&warp * &h);
        }
        Ok(diagonal_metric(diag))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{curvature_package, laplacian_gradsq, sample_points, Point};

    #[test]
    fn hyperbolic_values_and_curvature() {
        let s = make_hyperbolic(3).unwrap();
        let p = Point::new(&[1.0, 1.2, 0.7]);
        let gj = s.g.jets(&p, 2).unwrap();
        let sh2 = 1.0f64.sinh().powi(2);
        assert!((gj.get(1, 1).value() - sh2).abs() < 1e-12);
        assert!((s.v.value(&p).unwrap() - 1.0f64.cosh()).abs() < 1e-12);
        for q in sample_points(s.g.chart(), 10, 0.05) {
            let pack = curvature_package(&s.g, &q).unwrap();
            assert!((pack.scalar + 6.0).abs() < 1e-9, "scalar {}", pack.scalar);
        }
    }

    #[test]
    fn hyperbolic_n4_einstein() {
        let s = make_hyperbolic(4).unwrap();
        for q in sample_points(s.g.chart(), 20, 0.05) {
            let pack = curvature_package(&s.g, &q).unwrap();
            for i in 0..4 {
                for j in 0..4 {
                    assert!(
                        (pack.ricci.get(i, j) + 3.0 * pack.g.get(i, j)).abs() < 1e-10,
                        "Ric + 3g at {:?}",
                        q
                    );
                }
            }
        }
    }

    #[test]
    fn ads_fg_lapse_and_eikonal() {
        let s = make_ads_fg(3).unwrap();
        let p = Point::new(&[0.1, 1.0, 1.0]);
        assert!((s.v.value(&p).unwrap() - 10.025).abs() < 1e-12);
        // |grad V|^2 = V^2 - 1 for this lapse.
        for q in sample_points(s.g.chart(), 10, 0.05) {
            let (_, grad2) = laplacian_gradsq(&s.v, &s.g, &q).unwrap();
            let v = s.v.value(&q).unwrap();
            assert!((grad2 - v * v + 1.0).abs() < 1e-10 * v * v);
        }
    }

    #[test]
    fn schwarzschild_values_and_horizon() {
        let s = make_schwarzschild_ads(3, 1.0).unwrap();
        let p = Point::new(&[2.0, 1.0, 1.0]);
        let gj = s.g.jets(&p, 2).unwrap();
        assert!((gj.get(0, 0).value() - 1.0 / 4.5).abs() < 1e-13);
        assert!((s.v.value(&p).unwrap() - 4.5f64.sqrt()).abs() < 1e-13);
        let rh = schwarzschild_horizon(3, 1.0);
        assert!((rh - 0.6823278038).abs() < 1e-9);
        // Chart refuses points at or below the horizon.
        assert!(s.g.jets(&Point::new(&[rh, 1.0, 1.0]), 2).is_err());
    }

    #[test]
    fn massless_schwarzschild_is_hyperbolic() {
        let s0 = make_schwarzschild_ads(3, 0.0).unwrap();
        let hy = make_hyperbolic(3).unwrap();
        // V^2 = 1 + r^2 exactly.
        for q in sample_points(s0.g.chart(), 10, 0.05) {
            let v = s0.v.value(&q).unwrap();
            let r = q.coords()[0];
            assert!((v * v - 1.0 - r * r).abs() < 1e-12);
        }
        // Matched radii r = sinh(rho): same scalar invariants.
        for rho in [0.5, 1.0, 1.8] {
            let q_h = Point::new(&[rho, 1.1, 0.9]);
            let q_s = Point::new(&[rho.sinh(), 1.1, 0.9]);
            let a = curvature_package(&hy.g, &q_h).unwrap();
            let b = curvature_package(&s0.g, &q_s).unwrap();
            assert!((a.scalar - b.scalar).abs() < 1e-9);
            let rsq = |p: &crate::geometry::CurvaturePack| {
                crate::geometry::inner_sym2(&p.ricci, &p.ricci, &p.ginv)
            };
            assert!((rsq(&a) - rsq(&b)).abs() < 1e-9);
        }
    }

    #[test]
    fn soliton_values_and_einstein() {
        let lm = make_ads_soliton(4, 1.0).unwrap();
        assert!((lm.phi_period.unwrap() - std::f64::consts::PI).abs() < 1e-15);
        let p = Point::new(&[0.3, 2.0, 1.0, 0.2, -0.4]);
        let gj = lm.metric.jets(&p, 2).unwrap();
        assert!((gj.get(2, 2).value() - 3.75).abs() < 1e-13);
        assert!((gj.get(0, 0).value() + 4.0).abs() < 1e-13);
        for q in sample_points(lm.metric.chart(), 20, 0.05) {
            let pack = curvature_package(&lm.metric, &q).unwrap();
            for i in 0..5 {
                for j in 0..5 {
                    assert!(
                        (pack.ricci.get(i, j) + 4.0 * pack.g.get(i, j)).abs() < 1e-8,
                        "Ric + 4g fails at {:?}: {} vs {}",
                        q,
                        pack.ricci.get(i, j),
                        -4.0 * pack.g.get(i, j)
                    );
                }
            }
        }
    }

    #[test]
    fn spacetime_lift_blocks() {
        let s = make_hyperbolic(3).unwrap();
        let lm = spacetime_metric(&s);
        let p = Point::new(&[0.2, 1.0, 1.2, 0.7]);
        let gj = lm.metric.jets(&p, 2).unwrap();
        let c2 = 1.0f64.cosh().powi(2);
        assert!((gj.get(0, 0).value() + c2).abs() < 1e-12);
        for i in 1..4 {
            assert_eq!(gj.get(0, i).value(), 0.0);
        }
        // Spacetime of a vacuum triple is Einstein: Ric = -3 gbar.
        let ads = make_ads_fg(3).unwrap();
        let lm = spacetime_metric(&ads);
        for q in sample_points(lm.metric.chart(), 20, 0.05) {
            let pack = curvature_package(&lm.metric, &q).unwrap();
            for i in 0..4 {
                for j in 0..4 {
                    assert!(
                        (pack.ricci.get(i, j) + 3.0 * pack.g.get(i, j)).abs() < 1e-8,
                        "point {:?}",
                        q
                    );
                }
            }
        }
    }

    #[test]
    fn doubled_metric_properties() {
        let ads = make_ads_fg(3).unwrap();
        let dm = doubled_riemannian(&ads);
        assert!((dm.theta_period - 2.0 * std::f64::consts::PI).abs() < 1e-15);
        // theta-theta coefficient is V^2; (V r)^2 = (1 + r^2/4)^2.
        let p = Point::new(&[0.5, 0.2, 1.0, 1.0]);
        let gj = dm.metric.jets(&p, 2).unwrap();
        let vr2 = gj.get(0, 0).value() * 0.2 * 0.2;
        assert!((vr2 - 1.0201).abs() < 1e-12);
        // Double of the hyperbolic triple is Einstein with Ric = -3 gtilde.
        let hy = make_hyperbolic(3).unwrap();
        let dm = doubled_riemannian(&hy);
        for q in sample_points(dm.metric.chart(), 20, 0.05) {
            let pack = curvature_package(&dm.metric, &q).unwrap();
            for i in 0..4 {
                for j in 0..4 {
                    assert!(
                        (pack.ricci.get(i, j) + 3.0 * pack.g.get(i, j)).abs() < 1e-8,
                        "point {:?}",
                        q
                    );
                }
            }
        }
    }

    #[test]
    fn doubled_flat_product_is_flat() {
        // V = 1 over flat space is not a vacuum triple; its double is the
        // flat product metric.
        let g = euclidean_cartesian(3);
        let chart = g.chart().clone();
        let s = StaticTriple {
            n: 3,
            g,
            v: ScalarField::from_fn(chart, |seeds| {
                Ok(Jet::constant(1.0, seeds[0].dim(), seeds[0].order()))
            }),
            label: "flat-unit".into(),
            params: vec![],
            radial: None,
            fg_native: false,
            boundary: BoundaryTopology::Sphere,
            inner_boundary: false,
        };
        let dm = doubled_riemannian(&s);
        let pack = curvature_package(&dm.metric, &Point::new(&[1.0, 0.3, -0.2, 0.8])).unwrap();
        assert!(pack.riemann.max_abs() < 1e-13);
    }

    #[test]
    fn parameter_validation() {
        assert!(matches!(
            make_hyperbolic(1),
            Err(CatalogError::UnsupportedDimension(1))
        ));
        assert!(matches!(
            make_hyperbolic(6),
            Err(CatalogError::UnsupportedDimension(6))
        ));
        assert!(matches!(
            make_schwarzschild_ads(3, -1.0),
            Err(CatalogError::InvalidParameter { name: "M", .. })
        ));
        assert!(matches!(
            make_ads_soliton(4, 0.0),
            Err(CatalogError::InvalidParameter { name: "r0", .. })
        ));
    }
}
