//! Covariant differential operators evaluated through jets.

use crate::jet::Jet;

use super::curvature::{christoffel, curvature_values};
use super::{GeomError, JetMatrix, MetricField, Point, Rank2, ScalarField, Sym2Field};

/// Covariant Hessian (D^2 f)_{ij} = d_i d_j f - Gamma^k_{ij} d_k f at a point.
pub fn hessian(f: &ScalarField, g: &MetricField, p: &Point) -> Result<Rank2, GeomError> {
    let n = g.dim();
    let fj = f.jet(p, 2)?;
    let gj = g.jets(p, 2)?;
    let chr = christoffel(&gj)?;
    let gamma = chr.gamma_values(n);
    Ok(Rank2::from_fn(n, |i, j| {
        let mut v = fj.d2(i, j);
        for k in 0..n {
            v -= gamma.get(k, i, j) * fj.d1(k);
        }
        v
    }))
}

/// Hessian entries as jets. `fj` must have order >= 3 and `gj` at least the
/// same order, so the result (order of f minus 2) is still a usable jet.
pub fn hessian_jets(fj: &Jet, gj: &JetMatrix) -> Result<JetMatrix, GeomError> {
    let n = gj.n();
    let order = fj.order();
    if order < 3 {
        return Err(GeomError::OrderTooLow {
            needed: 3,
            got: order,
        });
    }
    if gj.order() < order {
        return Err(GeomError::OrderTooLow {
            needed: order,
            got: gj.order(),
        });
    }
    let chr = christoffel(&gj.truncate(order))?;
    let low = order - 2;
    let df: Vec<Jet> = (0..n)
        .map(|i| fj.derivative(i).map_err(GeomError::from))
        .collect::<Result<_, _>>()?;
    let df_low: Vec<Jet> = df.iter().map(|j| j.truncate(low)).collect();
    let mut h = JetMatrix::from_fn(n, |_, _| Jet::constant(0.0, fj.dim(), low));
    for i in 0..n {
        for j in i..n {
            let mut e = df[i].derivative(j)?;
            for k in 0..n {
                e -= &(&chr.gamma(n, k, i, j).truncate(low) * &df_low[k]);
            }
            if i != j {
                h.set(j, i, e.clone());
            }
            h.set(i, j, e);
        }
    }
    Ok(h)
}

/// Laplacian and squared gradient norm of f at a point:
/// (Delta f, |grad f|^2) = (g^{ij} (D^2 f)_{ij}, g^{ij} d_i f d_j f).
pub fn laplacian_gradsq(
    f: &ScalarField,
    g: &MetricField,
    p: &Point,
) -> Result<(f64, f64), GeomError> {
    let n = g.dim();
    let fj = f.jet(p, 2)?;
    let gj = g.jets(p, 2)?;
    let chr = christoffel(&gj)?;
    let gamma = chr.gamma_values(n);
    let ginv = chr.ginv.values();
    let mut lap = 0.0;
    let mut grad2 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut hij = fj.d2(i, j);
            for k in 0..n {
                hij -= gamma.get(k, i, j) * fj.d1(k);
            }
            lap += ginv.get(i, j) * hij;
            grad2 += ginv.get(i, j) * fj.d1(i) * fj.d1(j);
        }
    }
    Ok((lap, grad2))
}

/// Gradient vector (index raised) of f at a point.
pub fn grad_values(f: &ScalarField, g: &MetricField, p: &Point) -> Result<Vec<f64>, GeomError> {
    let n = g.dim();
    let fj = f.jet(p, 1)?;
    let ginv = g.jets(p, 2)?.inverse()?.values();
    Ok((0..n)
        .map(|i| (0..n).map(|j| ginv.get(i, j) * fj.d1(j)).sum())
        .collect())
}

/// Full metric contraction of two symmetric 2-tensors:
/// <T, S> = g^{ia} g^{jb} T_{ij} S_{ab}.
pub fn inner_sym2(t: &Rank2, s: &Rank2, ginv: &Rank2) -> f64 {
    let n = ginv.n();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            for a in 0..n {
                for b in 0..n {
                    acc += ginv.get(i, a) * ginv.get(j, b) * t.get(i, j) * s.get(a, b);
                }
            }
        }
    }
    acc
}

/// Divergence of a symmetric 2-tensor, as a 1-form:
/// (div T)_i = g^{jk} (d_k T_{ji} - Gamma^m_{kj} T_{mi} - Gamma^m_{ki} T_{jm}).
pub fn div_sym2(t: &Sym2Field, g: &MetricField, p: &Point) -> Result<Vec<f64>, GeomError> {
    let n = g.dim();
    let tj = t.jets(p, 1)?;
    let gj = g.jets(p, 2)?;
    let chr = christoffel(&gj)?;
    let gamma = chr.gamma_values(n);
    let ginv = chr.ginv.values();
    let tv = tj.values();
    let mut out = vec![0.0; n];
    for i in 0..n {
        let mut acc = 0.0;
        for j in 0..n {
            for k in 0..n {
                let mut cov = tj.get(j, i).d1(k);
                for m in 0..n {
                    cov -= gamma.get(m, k, j) * tv.get(m, i);
                    cov -= gamma.get(m, k, i) * tv.get(j, m);
                }
                acc += ginv.get(j, k) * cov;
            }
        }
        out[i] = acc;
    }
    Ok(out)
}

/// Two-sided evaluation of the pointwise integration-by-parts identity
/// <T, D^2 f> = div(T(grad f, .)) - <df, div T>.
pub struct DivIdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub relative: f64,
}

pub fn check_div_identity(
    g: &MetricField,
    t: &Sym2Field,
    f: &ScalarField,
    p: &Point,
) -> Result<DivIdentityCheck, GeomError> {
    let n = g.dim();
    let fj = f.jet(p, 2)?;
    let gj = g.jets(p, 2)?;
    let chr = christoffel(&gj)?;
    let gamma = chr.gamma_values(n);
    let ginv_j = chr.ginv.truncate(1);
    let ginv = chr.ginv.values();
    let tj = t.jets(p, 1)?;
    let tv = tj.values();

    // Left side: full contraction of T with the Hessian of f.
    let hess = Rank2::from_fn(n, |i, j| {
        let mut v = fj.d2(i, j);
        for k in 0..n {
            v -= gamma.get(k, i, j) * fj.d1(k);
        }
        v
    });
    let lhs = inner_sym2(&tv, &hess, &ginv);

    // One-form omega_j = T_{jk} g^{kl} d_l f, kept as jets for its divergence.
    let df: Vec<Jet> = (0..n)
        .map(|l| fj.derivative(l).map_err(GeomError::from))
        .collect::<Result<_, _>>()?;
    let omega: Vec<Jet> = (0..n)
        .map(|j| {
            let mut acc = Jet::constant(0.0, fj.dim(), 1);
            for k in 0..n {
                for l in 0..n {
                    acc += &(&(tj.get(j, k) * ginv_j.get(k, l)) * &df[l]);
                }
            }
            acc
        })
        .collect();
    // div omega = g^{ij} (d_i omega_j - Gamma^k_{ij} omega_k).
    let mut div_omega = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut cov = omega[j].d1(i);
            for k in 0..n {
                cov -= gamma.get(k, i, j) * omega[k].value();
            }
            div_omega += ginv.get(i, j) * cov;
        }
    }

    let divt = div_sym2(t, g, p)?;
    let mut pairing = 0.0;
    for i in 0..n {
        for j in 0..n {
            pairing += ginv.get(i, j) * fj.d1(i) * divt[j];
        }
    }

    let rhs = div_omega - pairing;
    let residual = (lhs - rhs).abs();
    let relative = residual / lhs.abs().max(rhs.abs()).max(1.0);
    Ok(DivIdentityCheck {
        lhs,
        rhs,
        residual,
        relative,
    })
}

/// The metric (V + 1)^{-2} g, sharing the closures of its ingredients.
pub fn conformal_metric(g: &MetricField, v: &ScalarField) -> MetricField {
    let gf = g.closure();
    let vf = v.closure();
    MetricField::from_fn(g.chart().clone(), move |seeds| {
        let gj = gf(seeds)?;
        let vj = vf(seeds)?;
        let one = Jet::constant(1.0, vj.dim(), vj.order());
        let w = (&vj + &one).recip()?;
        let w2 = &w * &w;
        Ok(gj.map(|e| e * &w2))
    })
}

/// Scalar curvature of (V + 1)^{-2} g computed two independent ways:
/// `.0` from the conformal transformation law
///   (V+1)^2 R + 2(n-1)(V+1) Delta V - n(n-1) |grad V|^2,
/// `.1` directly from the curvature of the rescaled metric.
pub fn conformal_scalar(
    g: &MetricField,
    v: &ScalarField,
    p: &Point,
) -> Result<(f64, f64), GeomError> {
    let n = g.dim() as f64;
    let gj = g.jets(p, 2)?;
    let scal = curvature_values(&gj)?.scalar;
    let (lap, grad2) = laplacian_gradsq(v, g, p)?;
    let w = v.value(p)? + 1.0;
    let formula = w * w * scal + 2.0 * (n - 1.0) * w * lap - n * (n - 1.0) * grad2;

    let gbar = conformal_metric(g, v);
    let direct = curvature_values(&gbar.jets(p, 2)?)?.scalar;
    Ok((formula, direct))
}

/// Mean curvature H = div(N) at p of the level set {x^axis = p[axis]},
/// with unit normal N chosen toward increasing (or decreasing) coordinate.
pub fn hypersurface_mean_curvature(
    g: &MetricField,
    p: &Point,
    axis: usize,
    toward_increasing: bool,
) -> Result<f64, GeomError> {
    let n = g.dim();
    let gj = g.jets(p, 2)?;
    let chr = christoffel(&gj)?;
    let gamma = chr.gamma_values(n);
    let ginv1 = chr.ginv.truncate(1);
    let norm_inv = ginv1.get(axis, axis).sqrt()?.recip()?;
    let nvec: Vec<Jet> = (0..n).map(|i| ginv1.get(i, axis) * &norm_inv).collect();
    // div N = d_i N^i + Gamma^i_{im} N^m.
    let mut h = 0.0;
    for i in 0..n {
        h += nvec[i].d1(i);
        for m in 0..n {
            h += gamma.get(i, i, m) * nvec[m].value();
        }
    }
    Ok(if toward_increasing { h } else { -h })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{
        polynomial_scalar_field, polynomial_sym2_field, quasirandom_polynomial, Chart,
        MetricField, Point, ScalarField,
    };
    use crate::jet::Jet;

    fn euclid(dim: usize) -> MetricField {
        let names = ["x", "y", "z"];
        let chart = Chart::riemannian(&names[..dim], &vec![(-5.0, 5.0); dim]);
        MetricField::from_fn(chart, move |s| {
            let d = s[0].dim();
            let order = s[0].order();
            Ok(JetMatrix::from_fn(d, |i, j| {
                Jet::constant(if i == j { 1.0 } else { 0.0 }, d, order)
            }))
        })
    }

    fn polar2() -> MetricField {
        let chart = Chart::riemannian(&["r", "theta"], &[(0.0, 10.0), (-10.0, 10.0)]);
        MetricField::from_fn(chart, |s| {
            let dim = s[0].dim();
            let order = s[0].order();
            Ok(JetMatrix::from_fn(2, |i, j| match (i, j) {
                (0, 0) => Jet::constant(1.0, dim, order),
                (1, 1) => &s[0] * &s[0],
                _ => Jet::constant(0.0, dim, order),
            }))
        })
    }

    #[test]
    fn hessian_flat_polynomial() {
        // f = x^2 + 3xy on flat R^2: Hessian [[2, 3], [3, 0]].
        let g = euclid(2);
        let f = polynomial_scalar_field(
            g.chart().clone(),
            vec![(vec![2, 0], 1.0), (vec![1, 1], 3.0)],
        );
        let h = hessian(&f, &g, &Point::new(&[0.7, -0.3])).unwrap();
        assert!((h.get(0, 0) - 2.0).abs() < 1e-14);
        assert!((h.get(0, 1) - 3.0).abs() < 1e-14);
        assert!((h.get(1, 0) - 3.0).abs() < 1e-14);
        assert!(h.get(1, 1).abs() < 1e-14);
    }

    #[test]
    fn laplacian_in_polar_coordinates() {
        // f = r^2 in the flat plane: Delta f = 4, |grad f|^2 = 4 r^2.
        let g = polar2();
        let f = polynomial_scalar_field(g.chart().clone(), vec![(vec![2, 0], 1.0)]);
        let (lap, grad2) = laplacian_gradsq(&f, &g, &Point::new(&[1.3, 0.4])).unwrap();
        assert!((lap - 4.0).abs() < 1e-12);
        assert!((grad2 - 4.0 * 1.3 * 1.3).abs() < 1e-12);
    }

    #[test]
    fn hessian_jets_agree_with_values() {
        let g = polar2();
        let p = Point::new(&[1.1, 0.6]);
        let f = polynomial_scalar_field(
            g.chart().clone(),
            vec![(vec![2, 0], 1.0), (vec![1, 2], 0.5), (vec![0, 3], -0.2)],
        );
        let hv = hessian(&f, &g, &p).unwrap();
        let fj = f.jet(&p, 3).unwrap();
        let gj = g.jets(&p, 3).unwrap();
        let hj = hessian_jets(&fj, &gj).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((hj.get(i, j).value() - hv.get(i, j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn divergence_identity_on_curved_polynomial_data() {
        // Perturbed flat metric, polynomial T and f: both sides of
        // <T, D^2 f> = div(T(grad f, .)) - <df, div T> agree to round-off.
        let dim = 3;
        let chart = Chart::riemannian(&["x", "y", "z"], &[(-1.0, 1.0); 3]);
        let comps: Vec<_> = (0..6)
            .map(|s| quasirandom_polynomial(dim, 2, 0.08, 11 + s))
            .collect();
        let pert = polynomial_sym2_field(chart.clone(), comps);
        let g = MetricField::from_fn(chart.clone(), move |s| {
            let d = s[0].dim();
            let order = s[0].order();
            let mut m = pert.eval_on(s)?;
            for i in 0..3 {
                let e = m.get(i, i) + &Jet::constant(1.0, d, order);
                m.set(i, i, e);
            }
            Ok(m)
        });
        let t = polynomial_sym2_field(
            chart.clone(),
            (0..6)
                .map(|s| quasirandom_polynomial(dim, 3, 1.0, 101 + s))
                .collect(),
        );
        let f = polynomial_scalar_field(chart, quasirandom_polynomial(dim, 3, 1.0, 301));
        for (k, pt) in crate::geometry::sample_points(g.chart(), 12, 0.1)
            .into_iter()
            .enumerate()
        {
            let chk = check_div_identity(&g, &t, &f, &pt).unwrap();
            assert!(
                chk.relative < 1e-12,
                "point {k}: lhs {} rhs {} rel {}",
                chk.lhs,
                chk.rhs,
                chk.relative
            );
        }
    }

    #[test]
    fn conformal_scalar_two_paths_agree() {
        let g = polar2();
        let v = ScalarField::from_fn(g.chart().clone(), |s| {
            // V = r^2 / 4, smooth and > -1 on the chart.
            Ok((&s[0] * &s[0]).scale(0.25))
        });
        for pt in [[0.8, 0.1], [1.7, -0.9], [2.4, 2.0]] {
            let (formula, direct) = conformal_scalar(&g, &v, &Point::new(&pt)).unwrap();
            assert!(
                (formula - direct).abs() < 1e-10 * formula.abs().max(1.0),
                "formula {formula} direct {direct}"
            );
        }
    }

    #[test]
    fn mean_curvature_of_euclidean_spheres() {
        // In polar coordinates the circle r = r0 in the plane has H = 1/r0
        // toward increasing r; with a 3d round factor it would be 2/r0.
        let g = polar2();
        let h = hypersurface_mean_curvature(&g, &Point::new(&[2.0, 0.3]), 0, true).unwrap();
        assert!((h - 0.5).abs() < 1e-13);
        let h_in = hypersurface_mean_curvature(&g, &Point::new(&[2.0, 0.3]), 0, false).unwrap();
        assert!((h_in + 0.5).abs() < 1e-13);
    }

    #[test]
    fn div_sym2_of_metric_vanishes() {
        // The metric itself is parallel, so div g = 0 in any chart.
        let g = polar2();
        let gf = g.closure();
        let t = crate::geometry::Sym2Field::from_fn(g.chart().clone(), move |s| gf(s));
        let d = div_sym2(&t, &g, &Point::new(&[1.9, 1.2])).unwrap();
        for v in d {
            assert!(v.abs() < 1e-13);
        }
    }
}
