//! Deterministic quadrature over round spheres and radial annuli, and the
//! integral form of the divergence identity on annular domains.
//!
//! All rules are open (no endpoint or pole evaluations) and fully determined
//! by a refinement level, so repeated runs produce identical digits.

use std::f64::consts::PI;

use serde::Serialize;
use thiserror::Error;

use crate::geometry::{
    div_sym2, hessian, inner_sym2, GeomError, MetricField, Point, Rank2, ScalarField, Sym2Field,
};
use crate::numeric::{gauss_legendre, pairwise_sum};

/// Refinement level used when nothing else is requested: 64 radial nodes,
/// 16 polar nodes per angle, 32 azimuthal nodes.
pub const DEFAULT_LEVEL: usize = 3;

#[derive(Debug, Error)]
pub enum IntegrateError {
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error("quadrature supports ambient dimension 2..=6, got {0}")]
    Dimension(usize),
    #[error("annulus radii must satisfy 0 < r_in < r_out, got [{0}, {1}]")]
    BadAnnulus(f64, f64),
    #[error("domain has an inner boundary; an inner cutoff radius is required")]
    MissingInnerBoundary,
    #[error("computed boundary normal deviates from -r d/dr by {0}")]
    NormalMismatch(f64),
    #[error(transparent)]
    Verify(#[from] crate::verify::VerifyError),
}

/// Gamma(k/2) for positive integer k.
fn gamma_half(k: usize) -> f64 {
    match k {
        0 => f64::INFINITY,
        1 => PI.sqrt(),
        2 => 1.0,
        _ => (k as f64 / 2.0 - 1.0) * gamma_half(k - 2),
    }
}

/// Area of the unit sphere S^{n-1} in R^n.
pub fn sphere_area(n: usize) -> f64 {
    2.0 * PI.powf(n as f64 / 2.0) / gamma_half(n)
}

/// Tensor-product quadrature on the round unit sphere S^{n-1}, in polar
/// coordinates (theta_1, ..., theta_{n-2}, phi): Gauss-Legendre in each polar
/// angle with the sin-power Jacobian absorbed into the weights, midpoint in
/// the azimuth. Node counts per axis double with each level.
#[derive(Debug, Clone, Serialize)]
pub struct SphereRule {
    pub n: usize,
    pub level: usize,
    /// Angle coordinates per node.
    pub nodes: Vec<Vec<f64>>,
    /// Weights including the round area Jacobian; they sum to sphere_area(n).
    pub weights: Vec<f64>,
    /// The Jacobian factor absorbed into each weight, so coordinate-box
    /// quadrature can divide it back out.
    pub jacobian: Vec<f64>,
}

impl SphereRule {
    pub fn new(n: usize, level: usize) -> Result<SphereRule, IntegrateError> {
        if !(2..=6).contains(&n) {
            return Err(IntegrateError::Dimension(n));
        }
        let n_theta = 2usize << level;
        let m_phi = 4usize << level;
        let (gl_x, gl_w) = gauss_legendre(n_theta);
        let theta: Vec<f64> = gl_x.iter().map(|x| 0.5 * PI * (x + 1.0)).collect();
        let theta_w: Vec<f64> = gl_w.iter().map(|w| 0.5 * PI * w).collect();

        let polar = n - 2;
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let mut jacobian = Vec::new();
        let mut idx = vec![0usize; polar];
        loop {
            for kphi in 0..m_phi {
                let phi = 2.0 * PI * (kphi as f64 + 0.5) / m_phi as f64;
                let mut node = Vec::with_capacity(polar + 1);
                let mut w = 2.0 * PI / m_phi as f64;
                let mut jac = 1.0;
                for (a, &ia) in idx.iter().enumerate() {
                    node.push(theta[ia]);
                    w *= theta_w[ia];
                    jac *= theta[ia].sin().powi((n - 2 - a) as i32);
                }
                node.push(phi);
                nodes.push(node);
                weights.push(w * jac);
                jacobian.push(jac);
            }
            // odometer over the polar indices
            let mut a = 0;
            loop {
                if a == polar {
                    return Ok(SphereRule { n, level, nodes, weights, jacobian });
                }
                idx[a] += 1;
                if idx[a] < n_theta {
                    break;
                }
                idx[a] = 0;
                a += 1;
            }
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Unit vector in R^n for a node's angles.
    pub fn embed(&self, node: &[f64]) -> Vec<f64> {
        let mut x = Vec::with_capacity(self.n);
        let mut sines = 1.0;
        for &th in &node[..node.len() - 1] {
            x.push(sines * th.cos());
            sines *= th.sin();
        }
        let phi = node[node.len() - 1];
        x.push(sines * phi.cos());
        x.push(sines * phi.sin());
        x
    }
}

/// Integral of a function of the angle coordinates over the round sphere.
pub fn integrate_sphere(
    rule: &SphereRule,
    mut f: impl FnMut(&[f64]) -> Result<f64, IntegrateError>,
) -> Result<f64, IntegrateError> {
    let mut terms = Vec::with_capacity(rule.node_count());
    for (node, &w) in rule.nodes.iter().zip(&rule.weights) {
        terms.push(w * f(node)?);
    }
    Ok(pairwise_sum(&terms))
}

/// Radial annulus [r_in, r_out] x S^{n-1} in a polar chart.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AnnulusDomain {
    pub r_in: f64,
    pub r_out: f64,
    pub level: usize,
}

impl AnnulusDomain {
    pub fn new(r_in: f64, r_out: f64, level: usize) -> Result<AnnulusDomain, IntegrateError> {
        if !(r_in > 0.0 && r_in < r_out && r_out.is_finite()) {
            return Err(IntegrateError::BadAnnulus(r_in, r_out));
        }
        Ok(AnnulusDomain { r_in, r_out, level })
    }

    pub fn radial_nodes(&self) -> usize {
        8 << self.level
    }
}

fn values_and_det(g: &MetricField, p: &Point) -> Result<(Rank2, f64), IntegrateError> {
    let gv = g.jets(p, 1)?.values();
    let n = gv.n();
    let det = nalgebra::DMatrix::from_fn(n, n, |i, j| gv.get(i, j)).determinant();
    Ok((gv, det))
}

/// Integral of f against the metric volume measure sqrt(det g) over an
/// annulus. The integrand is evaluated pointwise; radial nodes are
/// Gauss-Legendre, angular nodes come from the sphere rule with the round
/// Jacobian divided back out (the metric determinant supplies it).
pub fn integrate_annulus(
    g: &MetricField,
    dom: &AnnulusDomain,
    mut f: impl FnMut(&Point) -> Result<f64, IntegrateError>,
) -> Result<f64, IntegrateError> {
    let n = g.chart().dim();
    let rule = SphereRule::new(n, dom.level)?;
    let (gl_x, gl_w) = gauss_legendre(dom.radial_nodes());
    let mid = 0.5 * (dom.r_in + dom.r_out);
    let half = 0.5 * (dom.r_out - dom.r_in);
    let mut terms = Vec::with_capacity(gl_x.len() * rule.node_count());
    for (x, wr) in gl_x.iter().zip(&gl_w) {
        let r = mid + half * x;
        for (k, node) in rule.nodes.iter().enumerate() {
            let mut coords = Vec::with_capacity(n);
            coords.push(r);
            coords.extend_from_slice(node);
            let p = Point(coords);
            let (_, det) = values_and_det(g, &p)?;
            let w = half * wr * rule.weights[k] / rule.jacobian[k];
            terms.push(w * det.abs().sqrt() * f(&p)?);
        }
    }
    Ok(pairwise_sum(&terms))
}

/// An integral value together with the same integral at half the node
/// spacing, as a convergence diagnostic.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Refined {
    pub value: f64,
    pub refined: f64,
    pub gap: f64,
}

pub fn integrate_annulus_refined(
    g: &MetricField,
    dom: &AnnulusDomain,
    mut f: impl FnMut(&Point) -> Result<f64, IntegrateError>,
) -> Result<Refined, IntegrateError> {
    let value = integrate_annulus(g, dom, &mut f)?;
    let fine = AnnulusDomain { level: dom.level + 1, ..*dom };
    let refined = integrate_annulus(g, &fine, &mut f)?;
    Ok(Refined { value, refined, gap: (value - refined).abs() })
}

/// Flux of T(grad f, nu) through the sphere {r = const}, with nu the unit
/// normal in the radial direction times `sign` (+1 for increasing r).
fn sphere_flux(
    g: &MetricField,
    t: &Sym2Field,
    f: &ScalarField,
    r: f64,
    sign: f64,
    rule: &SphereRule,
) -> Result<f64, IntegrateError> {
    let n = g.chart().dim();
    let mut terms = Vec::with_capacity(rule.node_count());
    for (k, node) in rule.nodes.iter().enumerate() {
        let mut coords = Vec::with_capacity(n);
        coords.push(r);
        coords.extend_from_slice(node);
        let p = Point(coords);
        let gj = g.jets(&p, 1)?;
        let gv = gj.values();
        let ginv = nalgebra::DMatrix::from_fn(n, n, |i, j| gv.get(i, j))
            .try_inverse()
            .ok_or(GeomError::DegenerateMetric { condition: f64::INFINITY })?;
        let tv = t.jets(&p, 1)?.values();
        let fj = f.jet(&p, 1)?;

        let grad: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|a| ginv[(i, a)] * fj.d1(a)).sum())
            .collect();
        let nu: Vec<f64> = (0..n)
            .map(|i| sign * ginv[(i, 0)] / ginv[(0, 0)].sqrt())
            .collect();
        let mut flux = 0.0;
        for i in 0..n {
            for j in 0..n {
                flux += tv.get(i, j) * grad[i] * nu[j];
            }
        }

        let ang = nalgebra::DMatrix::from_fn(n - 1, n - 1, |a, b| gv.get(a + 1, b + 1));
        let area = ang.determinant().abs().sqrt();
        terms.push(rule.weights[k] / rule.jacobian[k] * area * flux);
    }
    Ok(pairwise_sum(&terms))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct StokesCheck {
    /// Integral of <T, D^2 f> over the annulus.
    pub volume_lhs: f64,
    /// Flux of T(grad f, nu) through both boundary spheres, outward normals.
    pub boundary_rhs: f64,
    /// Integral of <df, div T>.
    pub bianchi_term: f64,
    /// Relative defect of volume_lhs = boundary_rhs - bianchi_term.
    pub gap: f64,
}

/// Integration-by-parts identity on an annulus:
/// int <T, D^2 f> = flux of T(grad f, nu) - int <df, div T>.
/// Both boundary spheres carry their outward orientation.
pub fn stokes_check(
    g: &MetricField,
    t: &Sym2Field,
    f: &ScalarField,
    dom: &AnnulusDomain,
) -> Result<StokesCheck, IntegrateError> {
    let n = g.chart().dim();
    let volume_lhs = integrate_annulus(g, dom, |p| {
        let h = hessian(f, g, p)?;
        let tv = t.jets(p, 1)?.values();
        let ginv = g.jets(p, 2)?.inverse()?.values();
        Ok(inner_sym2(&tv, &h, &ginv))
    })?;
    let bianchi_term = integrate_annulus(g, dom, |p| {
        let divt = div_sym2(t, g, p)?;
        let fj = f.jet(p, 1)?;
        let ginv = g.jets(p, 2)?.inverse()?.values();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += ginv.get(i, j) * fj.d1(i) * divt[j];
            }
        }
        Ok(acc)
    })?;
    let rule = SphereRule::new(n, dom.level)?;
    let outer = sphere_flux(g, t, f, dom.r_out, 1.0, &rule)?;
    let inner = sphere_flux(g, t, f, dom.r_in, -1.0, &rule)?;
    let boundary_rhs = outer + inner;
    let gap = (volume_lhs - boundary_rhs + bianchi_term).abs()
        / 1.0f64.max(volume_lhs.abs()).max(boundary_rhs.abs());
    Ok(StokesCheck { volume_lhs, boundary_rhs, bianchi_term, gap })
}

/// One evaluation of the cutoff mass identity on a boundary-adapted triple:
/// the bulk integral of V |T|^2 over the annulus between the boundary cutoff
/// sphere r = eps and an interior cutoff, against the two flux terms of
/// T(grad V, nu) and the boundary limit read from the expansion data.
#[derive(Debug, Clone, Serialize)]
pub struct MassIdentity {
    pub eps: f64,
    pub inner_radius: f64,
    pub bulk: f64,
    pub outer_boundary: f64,
    pub inner_boundary: f64,
    /// (n(n-2)/2) * integral of alpha over the boundary sphere.
    pub fg_limit: f64,
    /// Deviation of the cutoff-sphere normals from +/- r d/dr.
    pub normal_gap: f64,
    /// |bulk - outer - inner| / max(1, |bulk|, |outer + inner|).
    pub gap: f64,
}

pub fn mass_identity_check(
    fg: &crate::asymptotics::FGGauge,
    ma: &crate::asymptotics::MassAspect,
    eps: f64,
    r_inner: Option<f64>,
    level: usize,
) -> Result<MassIdentity, IntegrateError> {
    let s = &fg.triple;
    let n = fg.n;
    if s.inner_boundary && r_inner.is_none() {
        return Err(IntegrateError::MissingInnerBoundary);
    }
    let r_big = r_inner.unwrap_or_else(|| {
        let (lo, hi) = s.g.chart().domain[0];
        hi - 0.05 * (hi - lo)
    });
    if !(eps > 0.0 && eps < r_big) {
        return Err(IntegrateError::BadAnnulus(eps, r_big));
    }
    let rule = SphereRule::new(n, level)?;

    // The chart is boundary-adapted, so both cutoff normals must be
    // +/- r d/dr; anything else means the flux orientations are wrong.
    let mut normal_gap = 0.0f64;
    let stride = (rule.node_count() / 8).max(1);
    for r in [eps, r_big] {
        for node in rule.nodes.iter().step_by(stride) {
            let mut coords = vec![r];
            coords.extend_from_slice(node);
            let gv = s.g.jets(&Point(coords), 1)?.values();
            let ginv = nalgebra::DMatrix::from_fn(n, n, |i, j| gv.get(i, j))
                .try_inverse()
                .ok_or(GeomError::DegenerateMetric { condition: f64::INFINITY })?;
            normal_gap = normal_gap.max((ginv[(0, 0)] / (r * r) - 1.0).abs());
            for i in 1..n {
                normal_gap = normal_gap.max(ginv[(0, i)].abs());
            }
        }
    }
    if normal_gap > 1e-10 {
        return Err(IntegrateError::NormalMismatch(normal_gap));
    }

    let t = crate::verify::einstein_tensor_field(s);
    let density = crate::verify::mass_density(s);
    let dom = AnnulusDomain::new(eps, r_big, level)?;
    let bulk = integrate_annulus(&s.g, &dom, |p| Ok(density(p)?))?;
    let outer_boundary = sphere_flux(&s.g, &t, &s.v, eps, -1.0, &rule)?;
    let inner_boundary = sphere_flux(&s.g, &t, &s.v, r_big, 1.0, &rule)?;
    let fg_limit = 0.5 * (n * (n - 2)) as f64
        * pairwise_sum(
            &ma.weights
                .iter()
                .zip(&ma.alpha)
                .map(|(w, a)| w * a)
                .collect::<Vec<_>>(),
        );
    let through = outer_boundary + inner_boundary;
    let gap = (bulk - through).abs() / 1.0f64.max(bulk.abs()).max(through.abs());
    Ok(MassIdentity {
        eps,
        inner_radius: r_big,
        bulk,
        outer_boundary,
        inner_boundary,
        fg_limit,
        normal_gap,
        gap,
    })
}
