use proptest::prelude::*;
use rug::Rational;

use super::*;
use crate::moments::{build_table, ModelParams, MomentTable};
use crate::numerics::{DenseMatrix, Mode, Scalar};
use crate::recurrence::{required_n_max, RecurrenceData};
use crate::report::SiteStatus;
use crate::Error;

fn q(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

fn exact(a: i64, b: i64, t: Rational) -> ModelParams {
    ModelParams::laguerre(q(a, 1), q(b, 1), 1, 1, t, Mode::Exact).unwrap()
}

fn real(digits: u32) -> ModelParams {
    ModelParams::laguerre(q(1, 2), q(1, 3), 1, 1, q(0, 1), Mode::real(digits)).unwrap()
}

fn table(p: &ModelParams, n_top: usize) -> MomentTable {
    lattice_table(p, n_top, 1).unwrap()
}

#[test]
fn low_order_determinants() {
    let t = table(&exact(0, 1, q(0, 1)), 2);
    let f = tau_family(1, &t).unwrap();
    let m = Mode::Exact;
    assert_eq!(f.tau, m.ratio(1, 2));
    assert_eq!(f.xi, m.ratio(1, 3));
    assert_eq!(f.xi_hat, m.ratio(2, 3));
    let f0 = tau_family(0, &t).unwrap();
    assert_eq!(f0.tau, m.one());
    assert!(f0.xi.is_zero() && f0.xi_hat.is_zero());
    assert_eq!(f0.sigma, m.one());
    assert_eq!(f0.sigma_hat, m.one());
}

#[test]
fn derivative_formulas_are_exact() {
    for t0 in [q(0, 1), q(1, 3), q(-1, 2)] {
        let t = table(&exact(0, 1, t0), 4);
        for n in 0..=4 {
            for (name, r) in DERIVATIVE_FORMULAS.iter().zip(derivative_formula_residuals(n, &t).unwrap()) {
                assert!(r.is_zero(), "{name} at n = {n}: {r}");
            }
        }
    }
}

#[test]
fn bilinear_equations_are_exact() {
    for t0 in [q(0, 1), q(1, 3)] {
        for (a, b) in [(0, 1), (2, 0), (1, 3)] {
            let r = bilinear_report(4, &table(&exact(a, b, t0.clone()), 4)).unwrap();
            assert!(r.passes(0.0), "(a, b) = ({a}, {b}), t = {t0}");
            assert_eq!(r.checked_count(), 5);
            assert_eq!(r.sites[0].skipped_equations.len(), 2);
        }
    }
}

#[test]
fn bilinear_equations_at_finite_precision() {
    let r = bilinear_report(4, &table(&real(50), 4)).unwrap();
    assert!(r.passes(-40.0), "{:?}", r.max_log10());
}

#[test]
fn nonlinear_system_is_exact() {
    for t0 in [q(0, 1), q(1, 4)] {
        let t = table(&exact(0, 1, t0), 5);
        let r = nonlinear_report(3, &t).unwrap();
        assert!(r.passes(0.0));
        assert_eq!(r.checked_count(), 3);
        assert!(matches!(r.sites[0].status, SiteStatus::BoundarySkipped { .. }));
    }
}

#[test]
fn four_term_coefficients_match_the_recurrence() {
    let p = exact(0, 1, q(0, 1));
    let m = Mode::Exact;
    let t = table(&p, 5);
    let data = RecurrenceData::build(&build_table(&p, required_n_max(4, 1, 1), 0).unwrap(), 4).unwrap();
    let tr = RecurrenceData::build(&build_table(&p.transposed(), required_n_max(4, 1, 1), 0).unwrap(), 4).unwrap();
    for n in 0..=3 {
        let (pc, qc) = four_term_coeffs(n, &t).unwrap();
        for (c, d) in [(&pc, &data), (&qc, &tr)] {
            assert_eq!(c.a, *d.a(n).unwrap(), "a at n = {n}");
            assert_eq!(c.b, d.eta(n, n + 1).unwrap(), "b at n = {n}");
            assert_eq!(c.c, d.eta(n, n).unwrap(), "c at n = {n}");
            if n >= 1 {
                assert_eq!(c.d.clone().unwrap(), d.eta(n, n - 1).unwrap(), "d at n = {n}");
            } else {
                assert!(c.d.is_none());
            }
        }
    }
    let (p0, _) = four_term_coeffs(0, &t).unwrap();
    assert_eq!((p0.a, p0.b, p0.c), (m.ratio(-1, 3), m.ratio(7, 5), m.ratio(1, 3)));
    let (p2, _) = four_term_coeffs(2, &t).unwrap();
    assert_eq!((p2.a, p2.b, p2.c, p2.d.unwrap()), (m.ratio(-6, 7), m.ratio(26, 9), m.ratio(72, 35), m.ratio(54, 175)));
}

#[test]
fn symmetric_degeneration() {
    let p = exact(1, 1, q(0, 1));
    let t = lattice_table(&p, 4, 2).unwrap();
    let r = degeneration_report(3, &t).unwrap();
    assert!(r.passes(0.0));
    assert_eq!(r.sites[1].residuals.len(), 6);
    let asym = lattice_table(&exact(0, 1, q(0, 1)), 4, 2).unwrap();
    assert!(!degeneration_report(3, &asym).unwrap().passes(0.0));
}

#[test]
fn structural_checks_for_every_application() {
    let t = table(&exact(0, 1, q(1, 5)), 4);
    for app in JacobiApplication::ALL {
        for n in app.min_site()..=3 {
            let c = structural_check(app, n, &t).unwrap();
            assert!(c.identity_residual.is_zero(), "{} at {n}", app.name());
            for (k, g) in c.term_gaps.iter().enumerate() {
                assert!(g.is_zero(), "{} term {k} at {n}: {g}", app.name());
            }
            assert!(c.relation_residual.is_zero(), "{} relation at {n}", app.name());
        }
    }
    assert!(matches!(structural_check(JacobiApplication::D2, 0, &t), Err(Error::Range { .. })));
}

fn random_matrix(size: usize, entries: &[(i64, i64)]) -> DenseMatrix {
    let m = Mode::Exact;
    DenseMatrix::from_fn(size, size, |i, j| {
        let (n, d) = entries[(i * size + j) % entries.len()];
        m.ratio(n + (i as i64) * (j as i64), d)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]
    #[test]
    fn jacobi_identity_on_random_rational_matrices(
        size in 2usize..=6,
        entries in prop::collection::vec((-9i64..10, 1i64..7), 36),
        picks in (0usize..6, 0usize..6, 0usize..6, 0usize..6),
    ) {
        let m = random_matrix(size, &entries);
        let (a, b, c, d) = picks;
        let (i1, i2) = (a % (size - 1), (a % (size - 1)) + 1 + b % (size - 1 - a % (size - 1)));
        let (j1, j2) = (c % (size - 1), (c % (size - 1)) + 1 + d % (size - 1 - c % (size - 1)));
        prop_assert!(jacobi_identity_check(&m, i1, i2, j1, j2).unwrap().is_zero());
    }
}

#[test]
fn evolve_tracks_the_determinant_solution() {
    let p = ModelParams::laguerre(q(0, 1), q(1, 1), 1, 1, q(0, 1), Mode::real(40)).unwrap();
    let c = rk4_order_check(&p, 1, 3, &q(1, 5), 64).unwrap();
    assert!(c.error_coarse < 1e-10, "error {:e}", c.error_coarse);
    assert!((3.7..=4.3).contains(&c.order), "order {}", c.order);
}

#[test]
fn zero_interval_evolve_is_the_identity() {
    let p = ModelParams::laguerre(q(0, 1), q(1, 1), 1, 1, q(0, 1), Mode::real(30)).unwrap();
    let s = lattice_state(1, 2, &table(&p, 2)).unwrap();
    let mut b = tau_fed_boundary(&p, 1, 2);
    let r = evolve_nonlinear(&s, &q(0, 1), 10, &mut b).unwrap();
    assert_eq!(r.trajectory, vec![s]);
}

#[test]
fn blowup_is_an_integration_error() {
    let p = ModelParams::laguerre(q(0, 1), q(1, 1), 1, 1, q(0, 1), Mode::real(30)).unwrap();
    let mut s = lattice_state(1, 2, &table(&p, 2)).unwrap();
    s.c[0] = Mode::real(30).parse("1e90").unwrap();
    let mut b = tau_fed_boundary(&p, 1, 2);
    let e = evolve_nonlinear(&s, &q(1, 5), 8, &mut b).unwrap_err();
    assert!(matches!(e, Error::Integration { .. }), "{e}");
}

#[test]
fn tau_and_a_stay_positive() {
    for t0 in [q(-2, 1), q(0, 1), q(1, 2)] {
        let t = table(&exact(1, 2, t0), 4);
        let s = lattice_state(1, 4, &t).unwrap();
        assert!(s.a.iter().all(|a| a.signum() > 0));
        for n in 0..=5 {
            assert!(tau_family(n, &t).unwrap().tau.signum() > 0);
        }
    }
}

#[test]
fn tower_rates_match_the_determinants_exactly() {
    let p = exact(0, 1, q(1, 7));
    let y = tower_initial_state(3, &p).unwrap();
    let dy = tower_rates(&p, &p.t, &y).unwrap();
    let jets = tau_jets(3, &table(&p, 3)).unwrap();
    for n in 1..=3 {
        assert_eq!(dy[n - 1], jets[n].dtau, "τ' at {n}");
        assert_eq!(dy[3 + n - 1], jets[n].dxi, "ξ' at {n}");
        assert_eq!(dy[6 + n - 1], jets[n].dxi_hat, "ξ̂' at {n}");
    }
}

#[test]
fn tower_integration_converges() {
    let p = ModelParams::laguerre(q(0, 1), q(1, 1), 1, 1, q(0, 1), Mode::real(40)).unwrap();
    let t1 = q(1, 5);
    let tr = bilinear_tower_integrate(3, &t1, 64, &p).unwrap();
    let want = tau_jets(3, &table(&p.at_time(t1.clone()).unwrap(), 3)).unwrap();
    let end = tr.terminal();
    let rel = |x: &Scalar, y: &Scalar| ((x.clone() - y) / y).abs().to_f64();
    assert!(rel(&end[1].tau, &want[2].tau) < 1e-8);
    for n in 1..=3 {
        let l = &end[n - 1];
        assert!(rel(&l.tau, &want[n].tau) < 1e-8, "τ_{n}");
        assert!(rel(&l.xi, &want[n].xi) < 1e-8, "ξ_{n}");
        assert!(rel(&l.xi_hat, &want[n].xi_hat) < 1e-8, "ξ̂_{n}");
        assert!(rel(&(l.xi.clone() + &l.xi_hat), &l.dtau) < 1e-8, "ξ+ξ̂ vs τ' at {n}");
    }
    assert_eq!(tr.times.len(), 65);
    assert_eq!(tower_csv_rows(&tr).len(), 65 * 9);
}

#[test]
fn corrupted_moments_break_the_identities() {
    let t = table(&exact(0, 1, q(0, 1)), 4);
    let bad = t.with_bi_entry(1, 2, Mode::Exact.ratio(7, 3)).unwrap();
    assert!(!bilinear_report(3, &bad).unwrap().passes(0.0));
    assert!(!nonlinear_report(3, &bad).unwrap().passes(0.0));
}

#[test]
fn non_lattice_parameters_are_rejected() {
    let p = ModelParams::laguerre(q(1, 2), q(1, 3), 2, 1, q(0, 1), Mode::real(30)).unwrap();
    assert!(matches!(lattice_table(&p, 2, 1), Err(Error::Domain(_))));
}

#[test]
fn summary_and_csv() {
    let t = table(&exact(0, 1, q(0, 1)), 4);
    let reports = [bilinear_report(3, &t).unwrap(), nonlinear_report(3, &t).unwrap()];
    let s = summary(&reports);
    assert!(s.max_log10.values().all(Option::is_none));
    assert_eq!(s.checked_sites, 4 + 3);
    assert_eq!(s.skipped_sites, 1);
    let rows = state_csv_rows(&lattice_state(1, 2, &t).unwrap());
    assert_eq!(rows.len(), 10);
    assert_eq!(rows[0].quantity, "A");
    assert_eq!(rows[0].precision, None);
    assert_eq!(csv_header().len(), 6);
}

#[test]
fn jacobi_report_lists_early_sites() {
    let r = jacobi_report(2, &table(&exact(0, 1, q(0, 1)), 2)).unwrap();
    assert!(r.passes(0.0));
    assert_eq!(r.sites[0].skipped_equations.len(), 4);
    assert_eq!(r.sites[1].residuals.len(), 7 * 8);
}
