//! Jet arithmetic against closed forms and finite differences.

use approx::{assert_abs_diff_eq, assert_relative_eq};
use statvac::Jet;

fn seeds(coords: &[f64], order: usize) -> Vec<Jet> {
    Jet::seed_point(coords, order)
}

#[test]
fn polynomial_partials_are_exact() {
    // f = (1 + 2x - y)^3; all partials follow from powers of u = 1 + 2x - y.
    let s = seeds(&[0.3, -0.2], 3);
    let u = Jet::constant(1.0, 2, 3)
        .checked_add(&s[0].scale(2.0))
        .unwrap()
        .checked_add(&s[1].scale(-1.0))
        .unwrap();
    let f = &(&u * &u) * &u;

    let uv: f64 = 1.0 + 2.0 * 0.3 + 0.2;
    assert_relative_eq!(f.value(), uv.powi(3), max_relative = 1e-14);
    assert_relative_eq!(f.partial(&[1, 0]).unwrap(), 6.0 * uv * uv, max_relative = 1e-14);
    assert_relative_eq!(f.partial(&[0, 1]).unwrap(), -3.0 * uv * uv, max_relative = 1e-14);
    assert_relative_eq!(f.partial(&[2, 0]).unwrap(), 24.0 * uv, max_relative = 1e-14);
    assert_relative_eq!(f.partial(&[1, 1]).unwrap(), -12.0 * uv, max_relative = 1e-14);
    assert_relative_eq!(f.partial(&[0, 2]).unwrap(), 6.0 * uv, max_relative = 1e-14);
    assert_relative_eq!(f.partial(&[3, 0]).unwrap(), 48.0, max_relative = 1e-14);
    assert_relative_eq!(f.partial(&[2, 1]).unwrap(), -24.0, max_relative = 1e-14);
}

#[test]
fn elementary_functions_match_derivative_formulas() {
    let x = 0.7;
    let j = Jet::variable(x, 0, 1, 3);

    let e = j.exp();
    for k in 0..=3 {
        assert_relative_eq!(e.partial(&[k]).unwrap(), x.exp(), max_relative = 1e-14);
    }

    let s = j.sin();
    assert_relative_eq!(s.partial(&[1]).unwrap(), x.cos(), max_relative = 1e-13);
    assert_relative_eq!(s.partial(&[2]).unwrap(), -x.sin(), max_relative = 1e-13);
    assert_relative_eq!(s.partial(&[3]).unwrap(), -x.cos(), max_relative = 1e-13);

    // (1 + x)^p with p = -3/2.
    let p = -1.5f64;
    let base = Jet::constant(1.0, 1, 3).checked_add(&j).unwrap();
    let w = base.powf(p).unwrap();
    let b = 1.0 + x;
    assert_relative_eq!(w.partial(&[1]).unwrap(), p * b.powf(p - 1.0), max_relative = 1e-13);
    assert_relative_eq!(
        w.partial(&[2]).unwrap(),
        p * (p - 1.0) * b.powf(p - 2.0),
        max_relative = 1e-13
    );
    assert_relative_eq!(
        w.partial(&[3]).unwrap(),
        p * (p - 1.0) * (p - 2.0) * b.powf(p - 3.0),
        max_relative = 1e-13
    );
}

/// exp(sin(x) y) built from jets versus central finite differences.
#[test]
fn composite_function_matches_finite_differences() {
    let eval = |x: f64, y: f64| (x.sin() * y).exp();
    let build = |x: f64, y: f64| {
        let s = seeds(&[x, y], 2);
        (&s[0].sin() * &s[1]).exp()
    };

    let (x, y) = (0.9, -0.4);
    let j = build(x, y);
    let h = 1e-5;

    let dx = (eval(x + h, y) - eval(x - h, y)) / (2.0 * h);
    let dy = (eval(x, y + h) - eval(x, y - h)) / (2.0 * h);
    assert_abs_diff_eq!(j.d1(0), dx, epsilon = 1e-8);
    assert_abs_diff_eq!(j.d1(1), dy, epsilon = 1e-8);

    let dxx = (eval(x + h, y) - 2.0 * eval(x, y) + eval(x - h, y)) / (h * h);
    let dyy = (eval(x, y + h) - 2.0 * eval(x, y) + eval(x, y - h)) / (h * h);
    let dxy = (eval(x + h, y + h) - eval(x + h, y - h) - eval(x - h, y + h)
        + eval(x - h, y - h))
        / (4.0 * h * h);
    assert_abs_diff_eq!(j.d2(0, 0), dxx, epsilon = 1e-5);
    assert_abs_diff_eq!(j.d2(1, 1), dyy, epsilon = 1e-5);
    assert_abs_diff_eq!(j.d2(0, 1), dxy, epsilon = 1e-5);
}

#[test]
fn inverse_pairs_cancel_at_every_coefficient() {
    let s = seeds(&[0.8, 0.3], 3);
    let j = Jet::constant(0.9, 2, 3)
        .checked_add(&s[0])
        .unwrap()
        .checked_add(&(&s[1] * &s[1]).scale(0.5))
        .unwrap();

    let sq = j.sqrt().unwrap();
    let back = &sq * &sq;
    for (a, b) in back.coeffs().iter().zip(j.coeffs()) {
        assert_abs_diff_eq!(a, b, epsilon = 1e-13);
    }

    let one = &j * &j.recip().unwrap();
    for (slot, c) in one.coeffs().iter().enumerate() {
        let expected = if slot == 0 { 1.0 } else { 0.0 };
        assert_abs_diff_eq!(*c, expected, epsilon = 1e-13);
    }

    let le = j.ln().unwrap().exp();
    for (a, b) in le.coeffs().iter().zip(j.coeffs()) {
        assert_abs_diff_eq!(a, b, epsilon = 1e-13);
    }
}

#[test]
fn antiderivative_inverts_derivative() {
    let s = seeds(&[0.4, 1.2], 2);
    let j = (&s[0] * &s[1])
        .checked_add(&s[0].scale(3.0))
        .unwrap()
        .checked_add(&Jet::constant(-2.0, 2, 2))
        .unwrap();

    let up = j.antiderivative(0).unwrap();
    assert_eq!(up.order(), 3);
    let down = up.derivative(0).unwrap();
    for (a, b) in down.coeffs().iter().zip(j.coeffs()) {
        assert_abs_diff_eq!(a, b, epsilon = 1e-14);
    }
}

#[test]
fn series_composition_matches_builtin_elementary() {
    let s = seeds(&[0.25, -0.6], 3);
    let j = Jet::constant(1.4, 2, 3)
        .checked_add(&s[0].scale(0.7))
        .unwrap()
        .checked_add(&(&s[0] * &s[1]).scale(-0.2))
        .unwrap();

    // cos via explicit Taylor coefficients at the jet's value.
    let a = j.value();
    let series = [a.cos(), -a.sin(), -a.cos() / 2.0, a.sin() / 6.0];
    let by_series = j.compose_series(&series);
    let builtin = j.cos();
    for (x, y) in by_series.coeffs().iter().zip(builtin.coeffs()) {
        assert_abs_diff_eq!(x, y, epsilon = 1e-14);
    }
}

#[test]
fn order_bounds_are_enforced() {
    // Differentiating an order-1 jet would leave no derivative information;
    // integrating an order-4 jet would exceed the supported window.
    assert!(Jet::variable(1.0, 0, 2, 1).derivative(0).is_err());
    assert!(Jet::variable(2.0, 0, 2, 4).antiderivative(0).is_err());
}
