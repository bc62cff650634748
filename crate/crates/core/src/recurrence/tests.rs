use proptest::prelude::*;
use rug::Rational;

use super::*;
use crate::biorth::pairing;
use crate::moments::{build_table, ModelParams, MomentTable, TimeJet, Transposed, Weight};
use crate::numerics::{HalfLineIntegrand, Mode, Scalar};
use crate::report::{ResidualReport, SiteStatus};
use crate::Error;

fn q(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

fn exact_params(a: i64, b: i64, t: Rational) -> ModelParams {
    ModelParams::laguerre(q(a, 1), q(b, 1), 1, 1, t, Mode::Exact).unwrap()
}

fn sized(p: &ModelParams, n_top: usize, depth: usize) -> MomentTable {
    build_table(p, required_n_max(n_top, p.k1, p.k2), depth).unwrap()
}

fn real_params(k1: u32, k2: u32, digits: u32) -> ModelParams {
    ModelParams::laguerre(q(1, 2), q(1, 3), k1, k2, q(0, 1), Mode::real(digits)).unwrap()
}

fn max_log10(v: &[Scalar]) -> f64 {
    v.iter().map(Scalar::log10_abs).fold(f64::NEG_INFINITY, f64::max)
}

#[test]
fn a_examples() {
    let t = sized(&exact_params(0, 0, q(0, 1)), 2, 0);
    assert_eq!(a_coeff(0, &t).unwrap(), Mode::Exact.ratio(-1, 2));
    for n in 0..=2 {
        assert_eq!(a_coeff(n, &t).unwrap(), a_hat_coeff(n, &t).unwrap());
    }
}

#[test]
fn vanishing_integral_is_an_error() {
    let t = sized(&exact_params(0, 0, q(0, 1)), 1, 0);
    let mut doc = t.to_document();
    doc.single_x[0] = "0".into();
    let bad = MomentTable::from_document(&doc).unwrap();
    assert!(matches!(a_coeff(0, &bad), Err(Error::Degeneracy { .. })));
}

#[test]
fn four_term_reference_values() {
    let m = Mode::Exact;
    let t = sized(&exact_params(0, 1, q(0, 1)), 3, 0);
    let data = RecurrenceData::build(&t, 3).unwrap();
    assert_eq!(*data.a(0).unwrap(), m.ratio(-1, 3));
    assert_eq!(data.eta(0, 1).unwrap(), m.ratio(7, 5));
    assert_eq!(data.eta(0, 0).unwrap(), m.ratio(1, 3));
    let want = [
        (1, (-3, 5), (15, 7), (1, 1), (1, 15)),
        (2, (-6, 7), (26, 9), (72, 35), (54, 175)),
        (3, (-10, 9), (40, 11), (220, 63), (40, 49)),
    ];
    for (n, a, b, c, d) in want {
        assert_eq!(*data.a(n).unwrap(), m.ratio(a.0, a.1), "a_{n}");
        assert_eq!(data.eta(n, n + 2).unwrap(), m.one());
        assert_eq!(data.eta(n, n + 1).unwrap(), m.ratio(b.0, b.1), "b_{n}");
        assert_eq!(data.eta(n, n).unwrap(), m.ratio(c.0, c.1), "c_{n}");
        assert_eq!(data.eta(n, n - 1).unwrap(), m.ratio(d.0, d.1), "d_{n}");
    }
}

#[test]
fn eta_index_contract() {
    let t = sized(&exact_params(0, 0, q(0, 1)), 3, 0);
    assert_eq!(eta_coeff(2, 4, &t).unwrap(), Mode::Exact.one());
    assert!(matches!(eta_coeff(3, 1, &t), Err(Error::Range { .. })));
    assert!(matches!(eta_coeff(1, 4, &t), Err(Error::Range { .. })));
    assert_eq!(eta_hat_coeff(1, 3, &t).unwrap(), Mode::Exact.one());
}

#[test]
fn eta_vanishes_below_the_band() {
    let t = sized(&exact_params(2, 0, q(1, 3)), 5, 0);
    let data = RecurrenceData::build(&t, 5).unwrap();
    for n in 2..=5 {
        for m in 0..n - 1 {
            assert!(data.eta_by_pairing(&t, n, m).unwrap().is_zero(), "η_{n},{m}");
        }
    }
    let p = real_params(2, 3, 50);
    let t = sized(&p, 6, 0);
    let data = RecurrenceData::build(&t, 6).unwrap();
    for n in 4..=6 {
        for m in 0..n - 3 {
            let v = data.eta_by_pairing(&t, n, m).unwrap();
            assert!(v.log10_abs() < -30.0, "η_{n},{m} = {v}");
        }
    }
}

#[test]
fn orthogonality_vanishing_via_inner_products() {
    let p = real_params(1, 2, 50);
    let t = sized(&p, 5, 0);
    let data = RecurrenceData::build(&t, 5).unwrap();
    for n in 3..=5 {
        let mut shifted = vec![p.mode.zero(); 1];
        shifted.extend(data.combination(n).unwrap());
        for m in 0..n - 2 {
            let v = pairing(&shifted, data.family().q(m).unwrap(), &t).unwrap();
            assert!(v.log10_abs() < -30.0);
        }
    }
}

#[test]
fn exact_recurrence_residuals_vanish() {
    let t = sized(&exact_params(0, 1, q(1, 3)), 5, 0);
    for n in 0..=5 {
        assert!(recurrence_residual(n, &t).unwrap().is_identically_zero());
        assert!(dual_recurrence_residual(n, &t).unwrap().is_identically_zero());
    }
}

#[test]
fn real_recurrence_residuals_vanish() {
    for (k1, k2) in [(1, 1), (1, 2), (2, 3)] {
        let t = sized(&real_params(k1, k2, 50), 5, 0);
        let fwd = RecurrenceData::build(&t, 5).unwrap();
        let dual = RecurrenceData::build(&Transposed(&t), 5).unwrap();
        for n in 0..=5 {
            assert!(max_log10(&fwd.residual_coeffs(n).unwrap()) < -20.0, "({k1},{k2}) n={n}");
            assert!(max_log10(&dual.residual_coeffs(n).unwrap()) < -20.0, "dual ({k1},{k2}) n={n}");
        }
    }
}

#[test]
fn spectral_operator_structure() {
    let m = Mode::Exact;
    let t = sized(&exact_params(0, 1, q(0, 1)), 4, 0);
    let op = build_spectral_operator(5, &t).unwrap();
    assert_eq!(op.m_bandwidths(), (0, 1));
    assert_eq!(op.l_bandwidths(), (1, 2));
    assert_eq!(op.l_nonzero_diagonals(), 4);
    for n in 0..5 {
        assert_eq!(*op.m.get(n, n + 1), m.one());
        assert_eq!(*op.m.get(n, n), a_coeff(n, &t).unwrap());
    }
    let data = RecurrenceData::build(&t, 4).unwrap();
    for n in 0..5 {
        assert!(op.site_residual(n, &data).unwrap().iter().all(Scalar::is_zero));
    }
    assert_eq!(*op.l.get(1, 0), m.ratio(1, 15));
    assert_eq!(*op.l.get(1, 2), m.ratio(15, 7));

    let p = real_params(2, 3, 50);
    let t = sized(&p, 4, 0);
    let data = RecurrenceData::build(&t, 4).unwrap();
    let op = SpectralOperator::from_data(&data, p.mode, 5).unwrap();
    assert_eq!(op.l_bandwidths(), (3, 3));
    assert_eq!(op.l_nonzero_diagonals(), 2 + 3 + 2);
    for n in 0..5 {
        assert!(max_log10(&op.site_residual(n, &data).unwrap()) < -20.0);
    }
}

#[test]
fn xi_chain() {
    let t = sized(&exact_params(0, 1, q(0, 1)), 4, 1);
    let data = jets(&TimeJet::new(&t).unwrap(), 4).unwrap();
    let n = 3;
    let f = evolution_data(&data, n).unwrap().f.unwrap();
    let xi = solve_xi_chain(&data, n, &f).unwrap();
    assert_eq!(xi.len(), 1 + 1 + 2);
    assert_eq!(*xi.last().unwrap(), Mode::Exact.one());
    let want = data.eta(n, n + 1).unwrap().value + f * &data.eta(n - 1, n + 1).unwrap().value
        - data.a(n + 1).unwrap().value.clone();
    assert_eq!(xi[xi.len() - 2], want);
}

#[test]
fn evolution_equation_holds() {
    let t = sized(&exact_params(1, 3, q(1, 3)), 4, 1);
    let data = jets(&TimeJet::new(&t).unwrap(), 4).unwrap();
    for n in 0..=4 {
        assert!(evolution_residual(&data, n).unwrap().iter().all(Scalar::is_zero));
    }
    let t = sized(&real_params(2, 1, 50), 4, 1);
    let data = jets(&TimeJet::new(&t).unwrap(), 4).unwrap();
    for n in 0..=4 {
        assert!(max_log10(&evolution_residual(&data, n).unwrap()) < -30.0);
    }
}

fn assert_checked(r: &ResidualReport, sites: &[usize]) {
    for s in &r.sites {
        assert_eq!(s.status == SiteStatus::Checked, sites.contains(&s.n), "site {}", s.n);
    }
}

#[test]
fn exact_compatibility_system() {
    for tt in [q(0, 1), q(1, 3)] {
        let t = sized(&exact_params(0, 1, tt), 4, 1);
        let r = gct_residual(4, &t).unwrap();
        assert_checked(&r, &[2, 3, 4]);
        assert!(r.passes(0.0));
        assert_eq!(r.sites[2].residuals.len(), 5);
        assert!(dual_gct_residual(4, &t).unwrap().passes(0.0));
    }
}

#[test]
fn real_compatibility_system() {
    for (k1, k2) in [(1, 1), (1, 2), (2, 1)] {
        let t = sized(&real_params(k1, k2, 60), 4, 1);
        let r = gct_residual(4, &t).unwrap();
        let interior: Vec<usize> = (k2 as usize + 1..=4).collect();
        assert_checked(&r, &interior);
        assert!(r.passes(-18.0), "({k1},{k2}): {:?}", r.max_log10());
        let d = dual_gct_residual(4, &t).unwrap();
        assert!(d.passes(-18.0), "dual ({k1},{k2}): {:?}", d.max_log10());
    }
}

#[test]
fn symmetric_weights_give_matching_dual_residuals() {
    let w = HalfLineIntegrand { power: q(1, 2), rate: q(3, 2), poly: vec![q(1, 1), q(0, 1), q(1, 3)] };
    let p = ModelParams::new(Weight::Custom { x: w.clone(), y: w }, 2, 2, q(0, 1), Mode::real(40)).unwrap();
    let t = sized(&p, 4, 1);
    let r = gct_residual(4, &t).unwrap();
    let d = dual_gct_residual(4, &t).unwrap();
    assert_eq!(r.sites, d.sites);
    assert!(r.passes(-18.0));
}

#[test]
fn gct_needs_interior_sites_and_jets() {
    let t = sized(&exact_params(0, 1, q(0, 1)), 3, 1);
    let data = jets(&TimeJet::new(&t).unwrap(), 3).unwrap();
    assert!(matches!(gct_site(&data, 1), Err(Error::Range { .. })));
    let flat = sized(&exact_params(0, 1, q(0, 1)), 3, 0);
    assert!(gct_residual(3, &flat).is_err());
}

#[test]
fn report_round_trip() {
    let t = sized(&exact_params(0, 1, q(0, 1)), 3, 1);
    let r = gct_residual(3, &t).unwrap();
    let back: ResidualReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
    assert_eq!(back, r);
    assert_eq!(back.skipped().count(), 2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn exact_recurrences_vanish_for_random_parameters(a in 0i64..4, b in 0i64..4, tn in -3i64..3, n in 0usize..4) {
        let t = sized(&exact_params(a, b, q(tn, 4)), 3, 0);
        prop_assert!(recurrence_residual(n, &t).unwrap().is_identically_zero());
        prop_assert!(dual_recurrence_residual(n, &t).unwrap().is_identically_zero());
    }
}

#[test]
fn recurrence_report_covers_both_families() {
    let p = exact_params(0, 1, q(0, 1));
    let r = recurrence_report(3, &sized(&p, 3, 0)).unwrap();
    assert!(r.passes(0.0));
    assert!(r.sites[0].residuals.iter().any(|e| e.equation.starts_with('Q')));
}
