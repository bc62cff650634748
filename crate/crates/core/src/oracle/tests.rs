use proptest::prelude::*;
use rug::Rational;

use super::*;
use crate::moments::{ModelParams, Weight};
use crate::numerics::{HalfLineIntegrand, Mode, Scalar};
use crate::Error;

fn q(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

fn cfg(n: usize, target: Target, t: Rational) -> OracleConfig {
    let params = ModelParams::laguerre(q(0, 1), q(1, 1), 1, 1, t, Mode::real(30)).unwrap();
    OracleConfig { n, target, params, tol: 1e-8 }
}

#[test]
fn size_one_integrals_are_moments() {
    let r = andreief_partition(&cfg(1, Target::Tau, q(0, 1))).unwrap();
    assert!((r.quadrature - 0.5).abs() < 1e-9, "{}", r.quadrature);
    let r = andreief_partition(&cfg(1, Target::Xi, q(0, 1))).unwrap();
    assert!((r.quadrature - 1.0 / 3.0).abs() < 1e-9, "{}", r.quadrature);
    for target in Target::ALL {
        let r = andreief_partition(&cfg(1, target, q(1, 4))).unwrap();
        assert!(r.passed, "{target:?}: gap {:e}", r.gap);
    }
}

#[test]
fn size_two_partition_function() {
    let r = andreief_partition(&cfg(2, Target::Tau, q(0, 1))).unwrap();
    assert!(r.passed, "gap {:e}", r.gap);
    assert!(r.estimated_error < 1e-8);
    assert!((r.determinant - 1.0 / 36.0).abs() < 1e-15);
    assert!(r.levels.windows(2).all(|w| w[1].nodes_x > w[0].nodes_x));
}

#[test]
fn refinement_does_not_grow_the_gap() {
    let mut c = cfg(1, Target::Sigma, q(0, 1));
    c.tol = 1e-8;
    let r = andreief_partition(&c).unwrap();
    let gaps: Vec<f64> = r.levels.iter().map(|l| l.gap).collect();
    assert!(gaps.windows(2).all(|w| w[1] <= w[0] * 1.01 || w[1] < 1e-14), "{gaps:?}");
}

#[test]
fn custom_weights() {
    let x = HalfLineIntegrand { power: q(1, 2), rate: q(1, 1), poly: vec![q(1, 1), q(1, 1)] };
    let y = HalfLineIntegrand { power: q(0, 1), rate: q(2, 1), poly: vec![q(1, 1)] };
    let params = ModelParams::new(Weight::Custom { x, y }, 1, 1, q(0, 1), Mode::real(30)).unwrap();
    for target in [Target::Tau, Target::Sigma, Target::XiHat] {
        let r = andreief_partition(&OracleConfig { n: 1, target, params: params.clone(), tol: 1e-8 }).unwrap();
        assert!(r.passed, "{target:?}: gap {:e}", r.gap);
    }
}

#[test]
fn config_contract() {
    assert!(matches!(andreief_partition(&cfg(3, Target::Tau, q(0, 1))), Err(Error::Domain(_))));
    let mut c = cfg(1, Target::Tau, q(0, 1));
    c.params = ModelParams::laguerre(q(0, 1), q(1, 1), 2, 1, q(0, 1), Mode::real(30)).unwrap();
    assert!(matches!(andreief_partition(&c), Err(Error::Domain(_))));
    let json = serde_json::to_string(&cfg(2, Target::SigmaHat, q(0, 1))).unwrap();
    assert!(json.contains("\"sigma_hat\""));
    let r = andreief_partition(&cfg(1, Target::Tau, q(0, 1))).unwrap();
    let back: OracleReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
    assert_eq!(back, r);
}

#[test]
fn andreief_identity_examples() {
    let m = Mode::Exact;
    let one = IdentityMeasure::UnitInterval { poly: vec![q(1, 1)] };
    let r = andreief_identity_check(&[2], &[1], &one).unwrap();
    assert_eq!((r.lhs.clone(), r.rhs.clone()), (m.ratio(1, 4), m.ratio(1, 4)));
    let lag = IdentityMeasure::HalfLine(HalfLineIntegrand::gamma_weight(q(0, 1)));
    let r = andreief_identity_check(&[0, 1], &[0, 1], &lag).unwrap();
    assert!((r.rhs.to_f64() - 1.0).abs() < 1e-25);
    assert!(r.residual.abs().to_f64() < 1e-12, "{}", r.residual);
    let r = andreief_identity_check(&[0, 2, 3], &[1, 2, 4], &lag).unwrap();
    assert!((r.residual.clone() / &r.rhs).abs().to_f64() < 1e-12);
    let poly = IdentityMeasure::UnitInterval { poly: vec![q(1, 2), q(-1, 3), q(2, 1)] };
    let r = andreief_identity_check(&[0, 1, 3], &[0, 2, 5], &poly).unwrap();
    assert!(r.residual.is_zero() && !r.rhs.is_zero());
    assert!(andreief_identity_check(&[0, 1], &[0], &poly).is_err());
}

#[test]
fn vandermonde_examples() {
    let m = Mode::Exact;
    let pts = [m.ratio(2, 3), m.ratio(-5, 2)];
    assert!(vandermonde_sum_identity(&pts).unwrap().is_zero());
    let rep = [m.ratio(1, 3), m.ratio(1, 3), m.int(4)];
    assert!(vandermonde_sum_identity(&rep).unwrap().is_zero());
}

proptest! {
    #[test]
    fn vandermonde_sum_on_random_rationals(pts in prop::collection::vec((-20i64..20, 1i64..9), 1..6)) {
        let v: Vec<Scalar> = pts.iter().map(|&(a, b)| Mode::Exact.ratio(a, b)).collect();
        prop_assert!(vandermonde_sum_identity(&v).unwrap().is_zero());
    }

    #[test]
    fn andreief_on_random_polynomial_measures(
        c in prop::collection::vec((-5i64..6, 1i64..5), 1..4),
        f in prop::collection::btree_set(0u32..6, 3),
        g in prop::collection::btree_set(0u32..6, 3),
    ) {
        let measure = IdentityMeasure::UnitInterval { poly: c.iter().map(|&(a, b)| q(a, b)).collect() };
        let f: Vec<u32> = f.into_iter().collect();
        let g: Vec<u32> = g.into_iter().collect();
        prop_assert!(andreief_identity_check(&f, &g, &measure).unwrap().residual.is_zero());
    }
}
