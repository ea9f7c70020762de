//! Christoffel symbols and Riemann/Ricci/scalar curvature from metric jets.
//!
//! Index conventions, fixed once for the whole crate:
//!   Gamma^k_{ij} = (1/2) g^{kl} (d_i g_{jl} + d_j g_{il} - d_l g_{ij})
//!   R^r_{s a b}  = d_a Gamma^r_{bs} - d_b Gamma^r_{as}
//!                  + Gamma^r_{am} Gamma^m_{bs} - Gamma^r_{bm} Gamma^m_{as}
//!   R_{isab}     = g_{ir} R^r_{sab}
//!   Ric_{sb}     = R^a_{sab},   Scal = g^{sb} Ric_{sb}
//!
//! With these signs the unit round sphere has Scal = +2 and hyperbolic space
//! has sectional curvature -1.

use crate::jet::Jet;

use super::{GeomError, JetMatrix, MetricField, Point, Rank2, Rank3, Rank4};

/// Christoffel data shared by the curvature and operator routines.
pub(crate) struct Christoffel {
    /// Inverse metric at the full input order.
    pub ginv: JetMatrix,
    /// Gamma^k_{ij} at one order below the metric, flattened (k*n + i)*n + j.
    pub gamma: Vec<Jet>,
}

impl Christoffel {
    #[inline]
    pub fn gamma(&self, n: usize, k: usize, i: usize, j: usize) -> &Jet {
        &self.gamma[(k * n + i) * n + j]
    }

    pub fn gamma_values(&self, n: usize) -> Rank3 {
        let mut out = Rank3::zeros(n);
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    out.set(k, i, j, self.gamma(n, k, i, j).value());
                }
            }
        }
        out
    }
}

pub(crate) fn christoffel(g: &JetMatrix) -> Result<Christoffel, GeomError> {
    let n = g.n();
    let order = g.order();
    if order < 2 {
        return Err(GeomError::OrderTooLow {
            needed: 2,
            got: order,
        });
    }
    let ginv = g.inverse()?;
    let ginv_low = ginv.truncate(order - 1);

    // dg[(a*n + b)*n + c] = d_a g_{bc}; mirror (b, c) to avoid recomputing.
    let mut dg: Vec<Jet> = Vec::with_capacity(n * n * n);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if c < b {
                    dg.push(dg[(a * n + c) * n + b].clone());
                } else {
                    dg.push(g.get(b, c).derivative(a)?);
                }
            }
        }
    }

    let dim = g.get(0, 0).dim();
    let mut gamma: Vec<Jet> = Vec::with_capacity(n * n * n);
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if j < i {
                    gamma.push(gamma[(k * n + j) * n + i].clone());
                    continue;
                }
                let mut acc = Jet::constant(0.0, dim, order - 1);
                for l in 0..n {
                    let sym = &(&dg[(i * n + j) * n + l] + &dg[(j * n + i) * n + l])
                        - &dg[(l * n + i) * n + j];
                    acc += &(ginv_low.get(k, l) * &sym);
                }
                gamma.push(acc.scale(0.5));
            }
        }
    }
    Ok(Christoffel { ginv, gamma })
}

/// Inverse-metric jets (full order) and Christoffel jets (one order lower,
/// flattened (k*n + i)*n + j), for operators that contract them directly.
pub fn christoffel_data(gj: &JetMatrix) -> Result<(JetMatrix, Vec<Jet>), GeomError> {
    let chr = christoffel(gj)?;
    Ok((chr.ginv, chr.gamma))
}

/// Pointwise curvature of a metric from jets of order >= 2.
pub struct CurvatureValues {
    pub g: Rank2,
    pub ginv: Rank2,
    pub gamma: Rank3,
    /// Fully lowered R_{ijkl}.
    pub riemann: Rank4,
    pub ricci: Rank2,
    pub scalar: f64,
}

pub fn curvature_values(gj: &JetMatrix) -> Result<CurvatureValues, GeomError> {
    let n = gj.n();
    let chr = christoffel(gj)?;
    let gamma = chr.gamma_values(n);

    let mut riem_up = Rank4::zeros(n);
    for r in 0..n {
        for s in 0..n {
            for a in 0..n {
                for b in 0..=a {
                    if a == b {
                        continue;
                    }
                    let mut v =
                        chr.gamma(n, r, b, s).d1(a) - chr.gamma(n, r, a, s).d1(b);
                    for m in 0..n {
                        v += gamma.get(r, a, m) * gamma.get(m, b, s)
                            - gamma.get(r, b, m) * gamma.get(m, a, s);
                    }
                    riem_up.set(r, s, a, b, v);
                    riem_up.set(r, s, b, a, -v);
                }
            }
        }
    }

    let g = gj.values();
    let ginv = chr.ginv.values();
    let mut riemann = Rank4::zeros(n);
    for i in 0..n {
        for s in 0..n {
            for a in 0..n {
                for b in 0..n {
                    let mut v = 0.0;
                    for r in 0..n {
                        v += g.get(i, r) * riem_up.get(r, s, a, b);
                    }
                    riemann.set(i, s, a, b, v);
                }
            }
        }
    }

    let mut ricci = Rank2::zeros(n);
    for s in 0..n {
        for b in 0..n {
            let mut v = 0.0;
            for a in 0..n {
                v += riem_up.get(a, s, a, b);
            }
            ricci.set(s, b, v);
        }
    }

    let mut scalar = 0.0;
    for s in 0..n {
        for b in 0..n {
            scalar += ginv.get(s, b) * ricci.get(s, b);
        }
    }

    Ok(CurvatureValues {
        g,
        ginv,
        gamma,
        riemann,
        ricci,
        scalar,
    })
}

/// Jet-valued Ricci data; the metric jets must have order >= 3 so the Ricci
/// entries are themselves differentiable jets (order K - 2).
pub struct RicciJets {
    pub g: JetMatrix,
    pub ginv: JetMatrix,
    /// Gamma^k_{ij} at order K - 1, flattened (k*n + i)*n + j.
    pub gamma: Vec<Jet>,
    pub ricci: JetMatrix,
    pub scalar: Jet,
}

pub fn ricci_jets(gj: &JetMatrix) -> Result<RicciJets, GeomError> {
    let n = gj.n();
    let order = gj.order();
    if order < 3 {
        return Err(GeomError::OrderTooLow {
            needed: 3,
            got: order,
        });
    }
    let chr = christoffel(gj)?;
    let dim = gj.get(0, 0).dim();
    let low = order - 2;
    let gamma_low: Vec<Jet> = chr.gamma.iter().map(|j| j.truncate(low)).collect();

    let mut ricci = JetMatrix::from_fn(n, |_, _| Jet::constant(0.0, dim, low));
    for s in 0..n {
        for b in 0..=s {
            let mut acc = Jet::constant(0.0, dim, low);
            for a in 0..n {
                acc += &chr.gamma(n, a, b, s).derivative(a)?;
                acc -= &chr.gamma(n, a, a, s).derivative(b)?;
                for m in 0..n {
                    acc += &(&gamma_low[(a * n + a) * n + m] * &gamma_low[(m * n + b) * n + s]);
                    acc -= &(&gamma_low[(a * n + b) * n + m] * &gamma_low[(m * n + a) * n + s]);
                }
            }
            if s != b {
                ricci.set(b, s, acc.clone());
            }
            ricci.set(s, b, acc);
        }
    }

    let ginv_low = chr.ginv.truncate(low);
    let mut scalar = Jet::constant(0.0, dim, low);
    for s in 0..n {
        for b in 0..n {
            scalar += &(ginv_low.get(s, b) * ricci.get(s, b));
        }
    }

    Ok(RicciJets {
        g: gj.clone(),
        ginv: chr.ginv,
        gamma: chr.gamma,
        ricci,
        scalar,
    })
}

/// All curvature data of a metric field at one point.
pub struct CurvaturePack {
    pub point: Point,
    pub g: Rank2,
    pub ginv: Rank2,
    pub gamma: Rank3,
    pub riemann: Rank4,
    pub ricci: Rank2,
    pub scalar: f64,
}

pub fn curvature_package(g: &MetricField, p: &Point) -> Result<CurvaturePack, GeomError> {
    let gj = g.jets(p, 2)?;
    let cv = curvature_values(&gj)?;
    Ok(CurvaturePack {
        point: p.clone(),
        g: cv.g,
        ginv: cv.ginv,
        gamma: cv.gamma,
        riemann: cv.riemann,
        ricci: cv.ricci,
        scalar: cv.scalar,
    })
}
