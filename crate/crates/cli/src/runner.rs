//! Command implementations: metric construction, identity selection, and
//! report assembly.

use std::collections::BTreeMap;

use thiserror::Error;

use statvac::asymptotics::{
    check_bm, extract_expansion, mass_functional, to_fg_gauge, validate_ah, AsympError,
};
use statvac::catalog::{
    make_ads_fg, make_ads_soliton, make_hyperbolic, make_schwarzschild_ads, spacetime_metric,
    CatalogError, LorentzMetric, StaticTriple,
};
use statvac::geometry::Point;
use statvac::integrate::{mass_identity_check, IntegrateError, SphereRule};
use statvac::numeric::{halton, into_box};
use statvac::verify::{
    check_bochner, fermat_check, suite_bach_vanishing, suite_bochner, suite_div_identity,
    suite_lindblom, suite_spacetime, suite_static, IdentityReport, SuiteResult, VerifyError,
};

use crate::config::RunConfig;
use crate::report::{write_report, ConvergenceEntry, CsvRow, MassBlock, Report, Sample};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("unknown metric id {0:?}; run `statvac catalog` for the list")]
    UnknownMetric(String),
    #[error("unknown identity {0:?}")]
    UnknownIdentity(String),
    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
    #[error("identity {0} is not applicable to {1}")]
    NotApplicable(&'static str, String),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error(transparent)]
    Asymp(#[from] AsympError),
    #[error(transparent)]
    Integrate(#[from] IntegrateError),
    #[error("cannot write report: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Identity {
    Static,
    Spacetime,
    Divergence,
    Lindblom,
    Bochner,
    BochnerPlus,
    Bach,
    Fermat,
}

impl Identity {
    fn name(self) -> &'static str {
        match self {
            Identity::Static => "static",
            Identity::Spacetime => "einstein-spacetime",
            Identity::Divergence => "divergence-identity",
            Identity::Lindblom => "lindblom",
            Identity::Bochner => "bochner",
            Identity::BochnerPlus => "bochner-plus",
            Identity::Bach => "bach-vanishing",
            Identity::Fermat => "fermat",
        }
    }

    fn parse(name: &str) -> Option<Identity> {
        Some(match name {
            "static" | "static-ricci" | "static-lapse" => Identity::Static,
            "spacetime" | "einstein-spacetime" => Identity::Spacetime,
            "divergence" | "div-identity" | "divergence-identity" => Identity::Divergence,
            "lindblom" => Identity::Lindblom,
            "bochner" => Identity::Bochner,
            "bochner-plus" => Identity::BochnerPlus,
            "bach" | "bach-vanishing" => Identity::Bach,
            "fermat" => Identity::Fermat,
            _ => return None,
        })
    }
}

fn build_static(cfg: &RunConfig) -> Result<Option<StaticTriple>, RunError> {
    match cfg.metric.as_str() {
        "hyperbolic" => Ok(Some(make_hyperbolic(cfg.n)?)),
        "ads-fg" => Ok(Some(make_ads_fg(cfg.n)?)),
        "schwarzschild-ads" => Ok(Some(make_schwarzschild_ads(cfg.n, cfg.mass)?)),
        "ads-soliton" => Ok(None),
        _ => Err(RunError::UnknownMetric(cfg.metric.clone())),
    }
}

fn build_lorentz(cfg: &RunConfig, s: Option<&StaticTriple>) -> Result<LorentzMetric, RunError> {
    match s {
        Some(t) => Ok(spacetime_metric(t)),
        None => Ok(make_ads_soliton(cfg.n, cfg.r0)?),
    }
}

fn params_of(cfg: &RunConfig) -> BTreeMap<String, f64> {
    let mut p = BTreeMap::new();
    p.insert("n".into(), cfg.n as f64);
    match cfg.metric.as_str() {
        "schwarzschild-ads" => {
            p.insert("M".into(), cfg.mass);
        }
        "ads-soliton" => {
            p.insert("r0".into(), cfg.r0);
        }
        _ => {}
    }
    p
}

fn applicable(cfg: &RunConfig, s: Option<&StaticTriple>) -> Vec<Identity> {
    match s {
        None => vec![Identity::Spacetime],
        Some(_) => {
            let mut v = vec![
                Identity::Static,
                Identity::Spacetime,
                Identity::Divergence,
                Identity::Bochner,
            ];
            if cfg.n == 3 {
                v.push(Identity::Bach);
                if cfg.metric == "schwarzschild-ads" && cfg.mass > 0.0 {
                    v.push(Identity::Lindblom);
                }
            }
            v.push(Identity::Fermat);
            v
        }
    }
}

fn select(cfg: &RunConfig, menu: &[Identity]) -> Result<Vec<Identity>, RunError> {
    if let Some(name) = &cfg.identity {
        let id = Identity::parse(name).ok_or_else(|| RunError::UnknownIdentity(name.clone()))?;
        // bochner-plus is the deliberate sign discriminator; allow it
        // anywhere bochner itself runs.
        let base = if id == Identity::BochnerPlus { Identity::Bochner } else { id };
        if !menu.contains(&base) {
            return Err(RunError::NotApplicable(id.name(), cfg.metric.clone()));
        }
        return Ok(vec![id]);
    }
    match cfg.suite.as_str() {
        "all" => Ok(menu.to_vec()),
        other => match Identity::parse(other) {
            Some(id) => {
                let base = if id == Identity::BochnerPlus { Identity::Bochner } else { id };
                if !menu.contains(&base) {
                    return Err(RunError::NotApplicable(id.name(), cfg.metric.clone()));
                }
                Ok(vec![id])
            }
            None => Err(RunError::UnknownSuite(other.to_string())),
        },
    }
}

/// Deterministic interior sample points, offset by the configured seed.
fn seeded_points(s: &StaticTriple, count: usize, seed: usize) -> Vec<Point> {
    let chart = s.g.chart();
    let boxv = chart.sample_box(0.0);
    (0..count)
        .map(|k| Point(into_box(&halton(seed + k, chart.dim()), &boxv, 0.05)))
        .collect()
}

fn push_suite(r: SuiteResult, identities: &mut Vec<IdentityReport>, rows: &mut Vec<CsvRow>) {
    for p in &r.per_point {
        rows.push(CsvRow {
            identity: r.report.name.clone(),
            point: p.index,
            abs: p.abs,
            rel: p.rel,
        });
    }
    identities.push(r.report);
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<bool, RunError> {
    let s = build_static(cfg)?;
    let selections = select(cfg, &applicable(cfg, s.as_ref()))?;

    let mut identities = Vec::new();
    let mut rows = Vec::new();
    let mut convergence = Vec::new();

    for id in selections {
        match id {
            Identity::Static => {
                let t = s.as_ref().expect("static triple");
                let tol = cfg.tol.unwrap_or(1e-9);
                for r in suite_static(t, cfg.points, tol)? {
                    push_suite(r, &mut identities, &mut rows);
                }
            }
            Identity::Spacetime => {
                let lm = build_lorentz(cfg, s.as_ref())?;
                let tol = cfg.tol.unwrap_or(1e-8);
                push_suite(
                    suite_spacetime(&lm, cfg.points, tol)?,
                    &mut identities,
                    &mut rows,
                );
            }
            Identity::Divergence => {
                let t = s.as_ref().expect("static triple");
                let tol = cfg.tol.unwrap_or(1e-9);
                push_suite(
                    suite_div_identity(&t.g, cfg.points, 3, tol)?,
                    &mut identities,
                    &mut rows,
                );
            }
            Identity::Lindblom => {
                let t = s.as_ref().expect("static triple");
                let pts = seeded_points(t, cfg.points, cfg.seed);
                let tol = cfg.tol.unwrap_or(1e-8);
                push_suite(suite_lindblom(t, &pts, tol)?, &mut identities, &mut rows);
            }
            Identity::Bochner => {
                let t = s.as_ref().expect("static triple");
                let pts = seeded_points(t, cfg.points, cfg.seed);
                let tol = cfg.tol.unwrap_or(1e-8);
                push_suite(suite_bochner(t, &pts, tol)?, &mut identities, &mut rows);
            }
            Identity::BochnerPlus => {
                let t = s.as_ref().expect("static triple");
                let pts = seeded_points(t, cfg.points, cfg.seed);
                let tol = cfg.tol.unwrap_or(1e-8);
                let mut pairs = Vec::with_capacity(pts.len());
                for (k, p) in pts.iter().enumerate() {
                    let c = check_bochner(t, p)?;
                    let abs = (c.lhs - c.rhs_plus).abs();
                    let rel = abs / 1.0f64.max(c.lhs.abs()).max(c.rhs_plus.abs());
                    pairs.push((abs, rel));
                    rows.push(CsvRow {
                        identity: "bochner-plus".into(),
                        point: k,
                        abs,
                        rel,
                    });
                }
                identities.push(IdentityReport::from_residuals("bochner-plus", tol, &pairs));
            }
            Identity::Bach => {
                let t = s.as_ref().expect("static triple");
                let tol = cfg.tol.unwrap_or(1e-9);
                push_suite(
                    suite_bach_vanishing(&t.g, cfg.points, tol)?,
                    &mut identities,
                    &mut rows,
                );
            }
            Identity::Fermat => {
                let t = s.as_ref().expect("static triple");
                let adapted = if t.fg_native {
                    t.clone()
                } else {
                    to_fg_gauge(t)?.triple
                };
                let (data, reports) = fermat_check(&adapted, 8)?;
                for r in reports {
                    rows.push(CsvRow {
                        identity: r.name.clone(),
                        point: 0,
                        abs: r.max_abs_residual,
                        rel: r.max_rel_residual,
                    });
                    identities.push(r);
                }
                convergence.push(ConvergenceEntry {
                    name: "fermat-phi".into(),
                    parameter: "eps".into(),
                    samples: data
                        .phi
                        .iter()
                        .map(|&(h, value)| Sample { h, value })
                        .collect(),
                });
            }
        }
    }

    let pass = identities.iter().all(|r| r.pass);
    let report = Report {
        metric: cfg.metric.clone(),
        params: params_of(cfg),
        identities,
        mass: None,
        convergence,
    };
    write_report(&cfg.output, cfg.format, &report, &rows)?;
    Ok(pass)
}

pub fn cmd_mass(cfg: &RunConfig) -> Result<bool, RunError> {
    let s = build_static(cfg)?.ok_or(RunError::Asymp(AsympError::UnsupportedTopology))?;
    let fg = to_fg_gauge(&s)?;
    let rule = SphereRule::new(cfg.n, cfg.level)?;
    let ma = extract_expansion(&fg, &rule)?;
    let mf = mass_functional(&ma, &rule);
    let ah = validate_ah(&fg, &rule)?;
    let bm = check_bm(&fg, &ma, &[0.2, 0.1, 0.05, 0.025, 0.0125])?;

    let r_inner = if fg.triple.inner_boundary {
        s.radial.as_ref().map(|prof| fg.fg_radius(prof.lo + 0.5))
    } else {
        None
    };
    let eps_levels = [0.1, 0.05, 0.025];
    let mut checks = Vec::new();
    for eps in eps_levels {
        checks.push(mass_identity_check(&fg, &ma, eps, r_inner, cfg.level)?);
    }

    let mut identities = Vec::new();
    let mut rows = Vec::new();

    let pairs: Vec<(f64, f64)> = checks
        .iter()
        .map(|c| {
            (
                (c.bulk - c.outer_boundary - c.inner_boundary).abs(),
                c.gap,
            )
        })
        .collect();
    identities.push(IdentityReport::from_residuals("mass-identity", 1e-5, &pairs));
    for (k, (abs, rel)) in pairs.iter().enumerate() {
        rows.push(CsvRow {
            identity: "mass-identity".into(),
            point: k,
            abs: *abs,
            rel: *rel,
        });
    }

    identities.push(IdentityReport::from_residuals(
        "boundary-roundness",
        1e-4,
        &[(ma.round_dev, ma.round_dev)],
    ));
    identities.push(IdentityReport::from_residuals(
        "expansion-consistency",
        1e-4,
        &[(ma.tr_consistency, ma.tr_consistency)],
    ));
    let bm_worst = bm.u_dev.max(bm.du_dev);
    identities.push(IdentityReport::from_residuals(
        "asymptotic-decay",
        1e-4,
        &[(bm_worst, bm_worst)],
    ));
    identities.push(IdentityReport {
        name: "expansion-remainder".into(),
        points: rule.node_count(),
        max_abs_residual: ah.second_derivative_dev,
        max_rel_residual: ah.remainder_ratio,
        tolerance: 0.75 * 0.5f64.powi(cfg.n as i32 - 1),
        pass: ah.pass,
    });

    for (k, (a, tr)) in ma.alpha.iter().zip(&ma.tr_tau).enumerate() {
        rows.push(CsvRow {
            identity: "mass-aspect".into(),
            point: k,
            abs: *a,
            rel: (a + tr).abs(),
        });
    }

    let convergence = vec![
        ConvergenceEntry {
            name: "mass-bulk".into(),
            parameter: "eps".into(),
            samples: checks
                .iter()
                .map(|c| Sample { h: c.eps, value: c.bulk })
                .collect(),
        },
        ConvergenceEntry {
            name: "mass-outer-flux".into(),
            parameter: "eps".into(),
            samples: checks
                .iter()
                .map(|c| Sample { h: c.eps, value: c.outer_boundary })
                .collect(),
        },
        ConvergenceEntry {
            name: "mass-inner-flux".into(),
            parameter: "eps".into(),
            samples: checks
                .iter()
                .map(|c| Sample { h: c.eps, value: c.inner_boundary })
                .collect(),
        },
        ConvergenceEntry {
            name: "mass-fg-limit".into(),
            parameter: "eps".into(),
            samples: vec![Sample { h: 0.0, value: checks[0].fg_limit }],
        },
    ];

    let pass = identities.iter().all(|r| r.pass);
    let report = Report {
        metric: cfg.metric.clone(),
        params: params_of(cfg),
        identities,
        mass: Some(MassBlock {
            alpha_mean: ma.alpha_mean,
            alpha_spread: ma.alpha_spread,
            scalar_mass: mf.scalar,
            vector_mass: mf.vector_norm,
            inequality: mf.inequality_holds,
        }),
        convergence,
    };
    write_report(&cfg.output, cfg.format, &report, &rows)?;
    Ok(pass)
}

pub fn cmd_catalog() {
    println!("id                 dims    params      description");
    println!(
        "hyperbolic         2..=5   (none)      g = drho^2 + sinh^2(rho) h0, V = cosh(rho); complete"
    );
    println!(
        "ads-fg             2..=5   (none)      g = r^-2 (dr^2 + (1 - r^2/4)^2 h0), V = 1/r + r/4; boundary-adapted chart"
    );
    println!(
        "schwarzschild-ads  2..=5   M >= 0      g = f^-1 dr^2 + r^2 h0, V = sqrt(f), f = 1 + r^2 - M/r^(n-2); horizon cutoff when M > 0"
    );
    println!(
        "ads-soliton        2..=5   r0 > 0      Lorentzian, contractible circle of period 4 pi/(n r0); no static triple"
    );
}
