//! Residual checks for the static vacuum equations and the pointwise
//! identities built on top of them (Bach/Cotton, Lindblom, Bochner, and the
//! conformal boundary checks).
//!
//! Every check computes its two sides through independent code paths and
//! reports both an absolute and a relative residual, where the relative
//! normalization is |lhs - rhs| / max(1, |lhs|, |rhs|).

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::catalog::{LorentzMetric, StaticTriple};
use crate::geometry::{
    christoffel_data, conformal_metric, conformal_scalar, curvature_values, ricci_jets,
    sample_points, GeomError, JetMatrix, MetricField, Point, Rank2, Rank3, Rank4, Sym2Field,
};
use crate::jet::Jet;
use crate::numeric::{halton, into_box, richardson};

/// Below this value of W = |grad V|^2 the Lindblom quotient is unreliable.
pub const W_FLOOR: f64 = 1e-8;

/// Inner-boundary levels used by the conformal-compactification checks.
pub const FERMAT_EPS_LEVELS: [f64; 4] = [0.1, 0.05, 0.025, 0.0125];

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Jet(#[from] crate::jet::JetError),
    #[error("lapse is not positive at the sample point (V = {value})")]
    NonPositiveLapse { value: f64 },
    #[error("|grad V|^2 = {w} is below the floor {W_FLOOR}; too close to a critical point")]
    CriticalPoint { w: f64 },
    #[error("metric is not a vacuum solution here (residual {residual}); check preconditions")]
    NotVacuum { residual: f64 },
    #[error("chart is not boundary-adapted (gauge deviation {deviation}); convert the gauge first")]
    NotBoundaryAdapted { deviation: f64 },
    #[error("operation needs dimension {expected}, metric has {got}")]
    Dimension { expected: usize, got: usize },
}

/// Aggregate outcome of one identity checked over a batch of points.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub name: String,
    pub points: usize,
    pub max_abs_residual: f64,
    pub max_rel_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl IdentityReport {
    pub fn from_residuals(name: &str, tolerance: f64, residuals: &[(f64, f64)]) -> Self {
        let max_abs = residuals.iter().fold(0.0f64, |m, r| m.max(r.0));
        let max_rel = residuals.iter().fold(0.0f64, |m, r| m.max(r.1));
        IdentityReport {
            name: name.to_string(),
            points: residuals.len(),
            max_abs_residual: max_abs,
            max_rel_residual: max_rel,
            tolerance,
            pass: max_rel <= tolerance,
        }
    }
}

/// Residual of one identity at one sample point, for per-point report rows.
#[derive(Debug, Clone, Serialize)]
pub struct PointResidual {
    pub index: usize,
    pub abs: f64,
    pub rel: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteResult {
    pub report: IdentityReport,
    pub per_point: Vec<PointResidual>,
}

fn relative(lhs: f64, rhs: f64) -> f64 {
    (lhs - rhs).abs() / 1.0f64.max(lhs.abs()).max(rhs.abs())
}

fn run_suite(
    name: &str,
    tolerance: f64,
    count: usize,
    mut eval: impl FnMut(usize) -> Result<(f64, f64), VerifyError>,
) -> Result<SuiteResult, VerifyError> {
    let mut per_point = Vec::with_capacity(count);
    let mut pairs = Vec::with_capacity(count);
    for k in 0..count {
        let (abs, rel) = eval(k)?;
        per_point.push(PointResidual { index: k, abs, rel });
        pairs.push((abs, rel));
    }
    Ok(SuiteResult {
        report: IdentityReport::from_residuals(name, tolerance, &pairs),
        per_point,
    })
}

/// Max-norm residuals of the two static vacuum field equations at p:
/// the Ricci equation V Ric - D^2 V + n V g = 0 (scaled by 1/V) and the
/// lapse equation Delta V = n V.
pub fn residual_static(s: &StaticTriple, p: &Point) -> Result<(f64, f64), VerifyError> {
    let n = s.n;
    let vj = s.v.jet(p, 2)?;
    let vval = vj.value();
    if vval <= 0.0 {
        return Err(VerifyError::NonPositiveLapse { value: vval });
    }
    let gj = s.g.jets(p, 2)?;
    let cv = curvature_values(&gj)?;
    let mut res_ricci = 0.0f64;
    let mut lap = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut hij = vj.d2(i, j);
            for k in 0..n {
                hij -= cv.gamma.get(k, i, j) * vj.d1(k);
            }
            lap += cv.ginv.get(i, j) * hij;
            let t = cv.ricci.get(i, j) + n as f64 * cv.g.get(i, j) - hij / vval;
            res_ricci = res_ricci.max(t.abs());
        }
    }
    let res_lapse = (lap - n as f64 * vval).abs();
    Ok((res_ricci, res_lapse))
}

/// Max-norm residual of Ric(g) + n g = 0 for an (n+1)-dimensional metric.
pub fn residual_einstein_spacetime(m: &LorentzMetric, p: &Point) -> Result<f64, VerifyError> {
    let d = m.metric.chart().dim();
    let n = (d - 1) as f64;
    let gj = m.metric.jets(p, 2)?;
    let cv = curvature_values(&gj)?;
    let mut res = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            res = res.max((cv.ricci.get(i, j) + n * cv.g.get(i, j)).abs());
        }
    }
    Ok(res)
}

/// The tensor T = Ric + (n-1) g computed two ways: from curvature alone and
/// from the lapse via T = V^{-1} D^2 V - g. The two agree exactly on static
/// vacuum solutions.
pub fn einstein_tensor(s: &StaticTriple, p: &Point) -> Result<(Rank2, Rank2), VerifyError> {
    let n = s.n;
    let vj = s.v.jet(p, 2)?;
    let vval = vj.value();
    if vval <= 0.0 {
        return Err(VerifyError::NonPositiveLapse { value: vval });
    }
    let gj = s.g.jets(p, 2)?;
    let cv = curvature_values(&gj)?;
    let mut geom = Rank2::zeros(n);
    let mut lapse = Rank2::zeros(n);
    for i in 0..n {
        for j in 0..n {
            geom.set(i, j, cv.ricci.get(i, j) + (n as f64 - 1.0) * cv.g.get(i, j));
            let mut hij = vj.d2(i, j);
            for k in 0..n {
                hij -= cv.gamma.get(k, i, j) * vj.d1(k);
            }
            lapse.set(i, j, hij / vval - cv.g.get(i, j));
        }
    }
    Ok((geom, lapse))
}

/// T = Ric + (n-1) g as a tensor field, for use as a quadrature integrand.
/// The closure re-seeds coordinates two orders higher internally, so callers
/// may request jets up to order 2.
pub fn einstein_tensor_field(s: &StaticTriple) -> Sym2Field {
    let n = s.n;
    let gf = s.g.closure();
    Sym2Field::from_fn(s.g.chart().clone(), move |seeds| {
        let order = seeds[0].order();
        let coords: Vec<f64> = seeds.iter().map(|j| j.value()).collect();
        let hi = Jet::seed_point(&coords, order + 2);
        let rj = ricci_jets(&gf(&hi)?)?;
        Ok(JetMatrix::from_fn(n, |i, j| {
            &rj.ricci.get(i, j).truncate(order) + &(rj.g.get(i, j).truncate(order) * (n as f64 - 1.0))
        }))
    })
}

fn grad_square_values(vj: &Jet, ginv: &Rank2) -> f64 {
    let n = ginv.n();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += ginv.get(i, j) * vj.d1(i) * vj.d1(j);
        }
    }
    acc
}

/// u = |grad V|^2 - V^2 + 1 at p. Vanishes identically in the model case and
/// has a sign controlled by the maximum principle on complete manifolds.
pub fn max_principle_scalar(s: &StaticTriple, p: &Point) -> Result<f64, VerifyError> {
    let vj = s.v.jet(p, 1)?;
    let ginv = s.g.jets(p, 2)?.inverse()?.values();
    Ok(grad_square_values(&vj, &ginv) - vj.value() * vj.value() + 1.0)
}

/// Conformal Cotton-type tensor of a 3-metric:
/// B_{ijk} = nabla_k R_{ij} - nabla_j R_{ik}
///         + (1/4)(d_j S g_{ik} - d_k S g_{ij}).
/// Antisymmetric in (j, k); vanishes exactly when g is conformally flat.
pub fn bach_tensor(g: &MetricField, p: &Point) -> Result<Rank3, VerifyError> {
    let n = g.chart().dim();
    if n != 3 {
        return Err(VerifyError::Dimension { expected: 3, got: n });
    }
    let gj = g.jets(p, 3)?;
    let rj = ricci_jets(&gj)?;
    let gv = rj.g.values();
    let nabla = covariant_ricci_derivative(&rj, n);
    let mut b = Rank3::zeros(n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let v = nabla.get(i, j, k) - nabla.get(i, k, j)
                    + 0.25 * (rj.scalar.d1(j) * gv.get(i, k) - rj.scalar.d1(k) * gv.get(i, j));
                b.set(i, j, k, v);
            }
        }
    }
    Ok(b)
}

/// nabla_k R_{ij}, packed as (i, j, k).
fn covariant_ricci_derivative(rj: &crate::geometry::RicciJets, n: usize) -> Rank3 {
    let gamma = |k: usize, i: usize, j: usize| rj.gamma[(k * n + i) * n + j].value();
    let mut out = Rank3::zeros(n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut v = rj.ricci.get(i, j).d1(k);
                for m in 0..n {
                    v -= gamma(m, k, i) * rj.ricci.get(m, j).value();
                    v -= gamma(m, k, j) * rj.ricci.get(i, m).value();
                }
                out.set(i, j, k, v);
            }
        }
    }
    out
}

/// In three dimensions the full curvature tensor is determined by Ricci:
/// R_{ijkl} = R_{ik} g_{jl} - R_{il} g_{jk} + g_{ik} R_{jl} - g_{il} R_{jk}
///          - (S/2)(g_{ik} g_{jl} - g_{il} g_{jk}).
/// Returns (reconstructed, direct, max-abs difference).
pub fn riemann_from_ricci_3d(
    g: &MetricField,
    p: &Point,
) -> Result<(Rank4, Rank4, f64), VerifyError> {
    let n = g.chart().dim();
    if n != 3 {
        return Err(VerifyError::Dimension { expected: 3, got: n });
    }
    let cv = curvature_values(&g.jets(p, 2)?)?;
    let (gv, rc, s) = (&cv.g, &cv.ricci, cv.scalar);
    let mut rebuilt = Rank4::zeros(n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let v = rc.get(i, k) * gv.get(j, l) - rc.get(i, l) * gv.get(j, k)
                        + gv.get(i, k) * rc.get(j, l)
                        - gv.get(i, l) * rc.get(j, k)
                        - 0.5 * s * (gv.get(i, k) * gv.get(j, l) - gv.get(i, l) * gv.get(j, k));
                    rebuilt.set(i, j, k, l, v);
                }
            }
        }
    }
    let mut gap = 0.0f64;
    for (a, b) in rebuilt.as_slice().iter().zip(cv.riemann.as_slice()) {
        gap = gap.max((a - b).abs());
    }
    Ok((rebuilt, cv.riemann, gap))
}

/// On a 3-dimensional static vacuum triple, the Cotton tensor in a
/// g-orthonormal frame reduces to an expression in V alone:
/// B_{abc} = V^{-2} [ (V_{bl} V_l - 3 V V_b) delta_{ac}
///                  - (V_{cl} V_l - 3 V V_c) delta_{ab}
///                  + 2 (V_{ac} V_b - V_{ab} V_c) ].
/// Returns (formula frame components, direct frame components, max gap).
/// Fails unless the triple satisfies the vacuum equations at p.
pub fn bach_static_formula(
    s: &StaticTriple,
    p: &Point,
) -> Result<(Rank3, Rank3, f64), VerifyError> {
    let n = s.n;
    if n != 3 {
        return Err(VerifyError::Dimension { expected: 3, got: n });
    }
    let (r1, r2) = residual_static(s, p)?;
    if r1.max(r2) > 1e-6 {
        return Err(VerifyError::NotVacuum { residual: r1.max(r2) });
    }

    let vj = s.v.jet(p, 2)?;
    let vval = vj.value();
    let gj = s.g.jets(p, 2)?;
    let cv = curvature_values(&gj)?;

    // Orthonormal frame from the Cholesky factor of g: columns of L^{-T}.
    let gm = nalgebra::DMatrix::from_fn(n, n, |i, j| cv.g.get(i, j));
    let chol = gm
        .cholesky()
        .ok_or(GeomError::DegenerateMetric { condition: f64::INFINITY })?;
    let frame = chol
        .l()
        .transpose()
        .solve_upper_triangular(&nalgebra::DMatrix::identity(n, n))
        .ok_or(GeomError::DegenerateMetric { condition: f64::INFINITY })?;

    // Lapse derivatives in the frame.
    let mut hess = Rank2::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let mut hij = vj.d2(i, j);
            for k in 0..n {
                hij -= cv.gamma.get(k, i, j) * vj.d1(k);
            }
            hess.set(i, j, hij);
        }
    }
    let mut dv = vec![0.0; n];
    let mut ddv = Rank2::zeros(n);
    for a in 0..n {
        for i in 0..n {
            dv[a] += frame[(i, a)] * vj.d1(i);
        }
        for b in 0..n {
            let mut acc = 0.0;
            for i in 0..n {
                for j in 0..n {
                    acc += frame[(i, a)] * frame[(j, b)] * hess.get(i, j);
                }
            }
            ddv.set(a, b, acc);
        }
    }

    let direct_coord = bach_tensor(&s.g, p)?;
    let mut direct = Rank3::zeros(n);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let mut acc = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        for k in 0..n {
                            acc += frame[(i, a)]
                                * frame[(j, b)]
                                * frame[(k, c)]
                                * direct_coord.get(i, j, k);
                        }
                    }
                }
                direct.set(a, b, c, acc);
            }
        }
    }

    let vinv2 = 1.0 / (vval * vval);
    let mix = |b: usize| -> f64 {
        let contr: f64 = (0..n).map(|l| ddv.get(b, l) * dv[l]).sum();
        contr - 3.0 * vval * dv[b]
    };
    let mut formula = Rank3::zeros(n);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let mut v = 2.0 * (ddv.get(a, c) * dv[b] - ddv.get(a, b) * dv[c]);
                if a == c {
                    v += mix(b);
                }
                if a == b {
                    v -= mix(c);
                }
                formula.set(a, b, c, vinv2 * v);
            }
        }
    }

    let mut gap = 0.0f64;
    for (x, y) in formula.as_slice().iter().zip(direct.as_slice()) {
        gap = gap.max((x - y).abs());
    }
    Ok((formula, direct, gap))
}

#[derive(Debug, Clone, Serialize)]
pub struct LindblomCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub relative: f64,
    pub w: f64,
    pub w_minus_w0: f64,
}

/// Divergence identity for W = |grad V|^2 against W_0 = V^2 - 1 on
/// 3-dimensional static vacuum triples:
/// div(V^{-1} grad(W - W_0)) = (1/4) V^3 W^{-1} |B|^2
///                           + (3/4) V^{-1} W^{-1} |grad(W - W_0)|^2.
pub fn check_lindblom(s: &StaticTriple, p: &Point) -> Result<LindblomCheck, VerifyError> {
    let n = s.n;
    if n != 3 {
        return Err(VerifyError::Dimension { expected: 3, got: n });
    }
    let vj = s.v.jet(p, 3)?;
    let vval = vj.value();
    if vval <= 0.0 {
        return Err(VerifyError::NonPositiveLapse { value: vval });
    }
    let gj = s.g.jets(p, 3)?;
    let (ginv, gamma) = christoffel_data(&gj)?;
    let ginv2 = ginv.truncate(2);

    // q = W - W_0 as an order-2 jet.
    let dv: Vec<Jet> = (0..n).map(|i| vj.derivative(i).unwrap()).collect();
    let mut w = Jet::constant(0.0, n, 2);
    for i in 0..n {
        for j in 0..n {
            w += &(&(ginv2.get(i, j) * &dv[i]) * &dv[j]);
        }
    }
    let wval = w.value();
    if wval < W_FLOOR {
        return Err(VerifyError::CriticalPoint { w: wval });
    }
    let v2 = &vj.truncate(2) * &vj.truncate(2);
    let q = &w - &(&v2 - &Jet::constant(1.0, n, 2));

    // lhs: divergence of X = V^{-1} grad q, via order-1 jets of X.
    let vinv1 = vj.truncate(1).recip()?;
    let ginv1 = ginv.truncate(1);
    let dq: Vec<Jet> = (0..n).map(|i| q.derivative(i).unwrap()).collect();
    let x: Vec<Jet> = (0..n)
        .map(|i| {
            let mut xi = Jet::constant(0.0, n, 1);
            for j in 0..n {
                xi += &(&(ginv1.get(i, j) * &dq[j]) * &vinv1);
            }
            xi
        })
        .collect();
    let mut div = 0.0;
    for i in 0..n {
        div += x[i].d1(i);
        for m in 0..n {
            div += gamma[(i * n + i) * n + m].value() * x[m].value();
        }
    }
    let lhs = div;

    // rhs: |B|^2 and |grad q|^2 with all indices raised by g^{-1}.
    let b = bach_tensor(&s.g, p)?;
    let gv = ginv.values();
    let mut b2 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for a in 0..n {
                    for bb in 0..n {
                        for c in 0..n {
                            b2 += gv.get(i, a)
                                * gv.get(j, bb)
                                * gv.get(k, c)
                                * b.get(i, j, k)
                                * b.get(a, bb, c);
                        }
                    }
                }
            }
        }
    }
    let mut dq2 = 0.0;
    for i in 0..n {
        for j in 0..n {
            dq2 += gv.get(i, j) * q.d1(i) * q.d1(j);
        }
    }
    let rhs = 0.25 * vval.powi(3) / wval * b2 + 0.75 / (vval * wval) * dq2;
    Ok(LindblomCheck {
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
        relative: relative(lhs, rhs),
        w: wval,
        w_minus_w0: q.value(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BochnerCheck {
    pub lhs: f64,
    pub rhs_minus: f64,
    pub rhs_plus: f64,
    pub residual: f64,
    pub relative: f64,
}

/// Bochner identity for u = |grad V|^2 - V^2 + 1 on static vacuum triples:
/// Delta u - V^{-1} <grad V, grad u> = 2 |D^2 V - V g|^2.
/// `rhs_plus` reports 2 |D^2 V + V g|^2 with the opposite sign choice, which
/// is *not* the identity's right-hand side; it is returned for diagnostics.
pub fn check_bochner(s: &StaticTriple, p: &Point) -> Result<BochnerCheck, VerifyError> {
    let n = s.n;
    let vj = s.v.jet(p, 3)?;
    let vval = vj.value();
    if vval <= 0.0 {
        return Err(VerifyError::NonPositiveLapse { value: vval });
    }
    let gj = s.g.jets(p, 3)?;
    let (ginv, gamma) = christoffel_data(&gj)?;
    let ginv2 = ginv.truncate(2);

    // u as an order-2 jet.
    let dv: Vec<Jet> = (0..n).map(|i| vj.derivative(i).unwrap()).collect();
    let mut u = Jet::constant(1.0, n, 2);
    for i in 0..n {
        for j in 0..n {
            u += &(&(ginv2.get(i, j) * &dv[i]) * &dv[j]);
        }
    }
    u -= &(&vj.truncate(2) * &vj.truncate(2));

    let gam = |k: usize, i: usize, j: usize| gamma[(k * n + i) * n + j].value();
    let gv = ginv.values();
    let mut lap_u = 0.0;
    let mut cross = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut hij = u.d2(i, j);
            for k in 0..n {
                hij -= gam(k, i, j) * u.d1(k);
            }
            lap_u += gv.get(i, j) * hij;
            cross += gv.get(i, j) * vj.d1(i) * u.d1(j);
        }
    }
    let lhs = lap_u - cross / vval;

    // Hessian of V by an independent route (value-level Christoffel).
    let mut minus = Rank2::zeros(n);
    let mut plus = Rank2::zeros(n);
    let gvals = gj.values();
    for i in 0..n {
        for j in 0..n {
            let mut hij = vj.d2(i, j);
            for k in 0..n {
                hij -= gam(k, i, j) * vj.d1(k);
            }
            minus.set(i, j, hij - vval * gvals.get(i, j));
            plus.set(i, j, hij + vval * gvals.get(i, j));
        }
    }
    let rhs_minus = 2.0 * crate::geometry::inner_sym2(&minus, &minus, &gv);
    let rhs_plus = 2.0 * crate::geometry::inner_sym2(&plus, &plus, &gv);
    Ok(BochnerCheck {
        lhs,
        rhs_minus,
        rhs_plus,
        residual: (lhs - rhs_minus).abs(),
        relative: relative(lhs, rhs_minus),
    })
}

/// Conformal-compactification data for a boundary-adapted triple.
#[derive(Debug, Clone, Serialize)]
pub struct FermatData {
    pub eps_levels: Vec<f64>,
    /// Extremes of the compactified scalar curvature over all samples.
    pub rbar_min: f64,
    pub rbar_max_abs: f64,
    /// Largest value of u = |grad V|^2 - V^2 + 1 over all samples.
    pub u_max: f64,
    /// Mean curvature of the inner-boundary spheres, extrapolated to r = 0.
    pub hbar: f64,
    /// Worst deviation of the extrapolated induced metric from the round one.
    pub boundary_dev: f64,
    /// Two-path agreement gap for the compactified scalar curvature.
    pub conformal_gap: f64,
    /// Per level: (eps, mean over directions of r (V + 1)).
    pub phi: Vec<(f64, f64)>,
}

/// Checks the Fermat compactification gbar = (V+1)^{-2} g of a
/// boundary-adapted triple near r = 0: sign of the compactified scalar
/// curvature, convergence of the induced boundary metric to the round
/// sphere, and convergence of the boundary mean curvature to n - 1.
pub fn fermat_check(
    s: &StaticTriple,
    boundary_samples: usize,
) -> Result<(FermatData, Vec<IdentityReport>), VerifyError> {
    let n = s.n;
    let chart = s.g.chart();

    // The chart must be boundary-adapted: g_rr r^2 = 1 and no radial cross
    // terms near r = 0.
    let probe_angles: Vec<f64> = chart.sample_box(0.25)[1..]
        .iter()
        .map(|(lo, hi)| 0.5 * (lo + hi))
        .collect();
    let mut probe = vec![0.05];
    probe.extend_from_slice(&probe_angles);
    let probe = Point(probe);
    let gv = s.g.jets(&probe, 2)?.values();
    let mut deviation = (gv.get(0, 0) * 0.05 * 0.05 - 1.0).abs();
    for a in 1..n {
        deviation = deviation.max(gv.get(0, a).abs());
    }
    if deviation > 1e-9 {
        return Err(VerifyError::NotBoundaryAdapted { deviation });
    }

    let gbar = conformal_metric(&s.g, &s.v);
    let ang_box: Vec<(f64, f64)> = chart.sample_box(0.05)[1..].to_vec();
    let directions: Vec<Vec<f64>> = (0..boundary_samples)
        .map(|k| into_box(&halton(k, n - 1), &ang_box, 0.0))
        .collect();

    let levels = FERMAT_EPS_LEVELS.to_vec();
    let mut rbar_min = f64::INFINITY;
    let mut rbar_max_abs = 0.0f64;
    let mut u_max = f64::NEG_INFINITY;
    let mut conformal_gap = 0.0f64;
    let mut boundary_dev = 0.0f64;
    let mut hbar_sum = 0.0;
    let mut hbar_dev = 0.0f64;
    let mut phi = vec![(0.0, 0.0); levels.len()];

    for dir in &directions {
        // Round-sphere components at this direction: diag(1, s1, s1 s2, ...)
        // with s_k = sin^2(theta_k).
        let mut h0 = vec![1.0; n - 1];
        for a in 1..n - 1 {
            h0[a] = h0[a - 1] * dir[a - 1].sin().powi(2);
        }

        let mut induced = vec![vec![0.0; levels.len()]; (n - 1) * (n - 1)];
        let mut hbar_levels = vec![0.0; levels.len()];
        for (li, &eps) in levels.iter().enumerate() {
            let mut coords = vec![eps];
            coords.extend_from_slice(dir);
            let p = Point(coords);

            let (formula, direct) = conformal_scalar(&s.g, &s.v, &p)?;
            conformal_gap = conformal_gap.max((formula - direct).abs());
            rbar_min = rbar_min.min(direct);
            rbar_max_abs = rbar_max_abs.max(direct.abs());

            let u = max_principle_scalar(s, &p)?;
            u_max = u_max.max(u);

            let gb = gbar.jets(&p, 2)?.values();
            for a in 0..n - 1 {
                for b in 0..n - 1 {
                    induced[a * (n - 1) + b][li] = gb.get(a + 1, b + 1);
                }
            }
            hbar_levels[li] =
                crate::geometry::hypersurface_mean_curvature(&gbar, &p, 0, false)?;

            let vval = s.v.jet(&p, 1)?.value();
            phi[li].0 = eps;
            phi[li].1 += eps * (vval + 1.0) / boundary_samples as f64;
        }

        for a in 0..n - 1 {
            for b in 0..n - 1 {
                let ext = richardson(&induced[a * (n - 1) + b], 2.0, &[1, 2, 3]);
                let target = if a == b { h0[a] } else { 0.0 };
                boundary_dev = boundary_dev.max((ext - target).abs() / 1.0f64.max(target.abs()));
            }
        }
        let hext = richardson(&hbar_levels, 2.0, &[1, 2, 3]);
        hbar_sum += hext / boundary_samples as f64;
        hbar_dev = hbar_dev.max((hext - (n as f64 - 1.0)).abs());
    }

    let data = FermatData {
        eps_levels: levels.clone(),
        rbar_min,
        rbar_max_abs,
        u_max,
        hbar: hbar_sum,
        boundary_dev,
        conformal_gap,
        phi,
    };
    let sample_count = boundary_samples * levels.len();
    let scalar_violation = (-rbar_min).max(0.0);
    let reports = vec![
        IdentityReport {
            name: "fermat-scalar-sign".to_string(),
            points: sample_count,
            max_abs_residual: scalar_violation,
            max_rel_residual: scalar_violation,
            tolerance: 1e-7,
            pass: scalar_violation <= 1e-7,
        },
        IdentityReport {
            name: "fermat-boundary-metric".to_string(),
            points: boundary_samples,
            max_abs_residual: boundary_dev,
            max_rel_residual: boundary_dev,
            tolerance: 1e-4,
            pass: boundary_dev <= 1e-4,
        },
        IdentityReport {
            name: "fermat-mean-curvature".to_string(),
            points: boundary_samples,
            max_abs_residual: hbar_dev,
            max_rel_residual: hbar_dev,
            tolerance: 1e-4,
            pass: hbar_dev <= 1e-4,
        },
    ];
    Ok((data, reports))
}

/// Both static field equations over `count` quasirandom chart points.
/// Returns the Ricci-equation and lapse-equation suites in that order.
pub fn suite_static(
    s: &StaticTriple,
    count: usize,
    tolerance: f64,
) -> Result<[SuiteResult; 2], VerifyError> {
    let pts = sample_points(s.g.chart(), count, 0.05);
    let mut ricci = Vec::with_capacity(count);
    let mut lapse = Vec::with_capacity(count);
    for (k, p) in pts.iter().enumerate() {
        let (r1, r2) = residual_static(s, p)?;
        ricci.push(PointResidual { index: k, abs: r1, rel: r1 });
        lapse.push(PointResidual { index: k, abs: r2, rel: r2 });
    }
    let pack = |name: &str, pts: Vec<PointResidual>| SuiteResult {
        report: IdentityReport::from_residuals(
            name,
            tolerance,
            &pts.iter().map(|r| (r.abs, r.rel)).collect::<Vec<_>>(),
        ),
        per_point: pts,
    };
    Ok([pack("static-ricci", ricci), pack("static-lapse", lapse)])
}

pub fn suite_spacetime(
    m: &LorentzMetric,
    count: usize,
    tolerance: f64,
) -> Result<SuiteResult, VerifyError> {
    let pts = sample_points(m.metric.chart(), count, 0.05);
    run_suite("einstein-spacetime", tolerance, count, |k| {
        let r = residual_einstein_spacetime(m, &pts[k])?;
        Ok((r, r))
    })
}

/// Integration-by-parts identity <T, D^2 f> = div(T(grad f, .)) - <df, div T>
/// over `pairs` quasirandom polynomial tensor/function pairs, each checked at
/// `points_per_pair` chart points.
pub fn suite_div_identity(
    g: &MetricField,
    pairs: usize,
    points_per_pair: usize,
    tolerance: f64,
) -> Result<SuiteResult, VerifyError> {
    let n = g.chart().dim();
    let pts = sample_points(g.chart(), pairs * points_per_pair, 0.1);
    run_suite("divergence-identity", tolerance, pairs, |k| {
        let comps: Vec<Vec<(Vec<u8>, f64)>> = (0..n * (n + 1) / 2)
            .map(|c| crate::geometry::quasirandom_polynomial(n, 3, 0.5, 7 * k + c + 1))
            .collect();
        let t = crate::geometry::polynomial_sym2_field(g.chart().clone(), comps);
        let f = crate::geometry::polynomial_scalar_field(
            g.chart().clone(),
            crate::geometry::quasirandom_polynomial(n, 3, 1.0, 311 * k + 5),
        );
        let mut worst = (0.0f64, 0.0f64);
        for p in &pts[k * points_per_pair..(k + 1) * points_per_pair] {
            let chk = crate::geometry::check_div_identity(g, &t, &f, p)?;
            if chk.relative > worst.1 {
                worst = (chk.residual, chk.relative);
            }
        }
        Ok(worst)
    })
}

pub fn suite_lindblom(
    s: &StaticTriple,
    points: &[Point],
    tolerance: f64,
) -> Result<SuiteResult, VerifyError> {
    run_suite("lindblom", tolerance, points.len(), |k| {
        let c = check_lindblom(s, &points[k])?;
        Ok((c.residual, c.relative))
    })
}

pub fn suite_bochner(
    s: &StaticTriple,
    points: &[Point],
    tolerance: f64,
) -> Result<SuiteResult, VerifyError> {
    run_suite("bochner", tolerance, points.len(), |k| {
        let c = check_bochner(s, &points[k])?;
        Ok((c.residual, c.relative))
    })
}

pub fn suite_bach_vanishing(
    g: &MetricField,
    count: usize,
    tolerance: f64,
) -> Result<SuiteResult, VerifyError> {
    let pts = sample_points(g.chart(), count, 0.05);
    run_suite("bach-vanishing", tolerance, count, |k| {
        let b = bach_tensor(g, &pts[k])?;
        let m = b.max_abs();
        Ok((m, m))
    })
}

/// Shared handle type for building scalar integrands out of a triple.
pub type ScalarAt = Arc<dyn Fn(&Point) -> Result<f64, VerifyError> + Send + Sync>;

/// V |T|^2 with T = Ric + (n-1) g, the bulk density of the mass identity.
pub fn mass_density(s: &StaticTriple) -> ScalarAt {
    let g = s.g.clone();
    let v = s.v.clone();
    let n = s.n;
    Arc::new(move |p: &Point| {
        let gj = g.jets(p, 2)?;
        let cv = curvature_values(&gj)?;
        let mut t = Rank2::zeros(n);
        for i in 0..n {
            for j in 0..n {
                t.set(i, j, cv.ricci.get(i, j) + (n as f64 - 1.0) * cv.g.get(i, j));
            }
        }
        let t2 = crate::geometry::inner_sym2(&t, &t, &cv.ginv);
        Ok(v.jet(p, 1)?.value() * t2)
    })
}
