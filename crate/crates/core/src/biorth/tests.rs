use rug::Rational;

use super::*;
use crate::moments::{build_table, ModelParams, MomentTable, Side, Weight};
use crate::numerics::{det, gamma, Mode, Scalar};
use crate::Error;

fn q(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

fn exact_lag(a: i64, b: i64, t: Rational) -> ModelParams {
    ModelParams::laguerre(q(a, 1), q(b, 1), 1, 1, t, Mode::Exact).unwrap()
}

fn real_lag(a: Rational, b: Rational, k1: u32, k2: u32, digits: u32) -> ModelParams {
    ModelParams::laguerre(a, b, k1, k2, q(0, 1), Mode::real(digits)).unwrap()
}

fn rel(a: &Scalar, b: &Scalar) -> f64 {
    ((a.clone() - b.clone()) / b.clone()).abs().log10_abs()
}

/// Coefficients of Pₙ from the bordered determinant, expanded along the
/// column of monomials.
fn bordered_p(table: &MomentTable, n: usize) -> Vec<Scalar> {
    let tau = table.tau(n).unwrap();
    let cols: Vec<usize> = (0..n).collect();
    (0..=n)
        .map(|l| {
            let rows: Vec<usize> = (0..=n).filter(|&r| r != l).collect();
            let minor = if n == 0 { table.mode().one() } else { det(&table.grid().select(&rows, &cols)).unwrap() };
            let signed = if (n + l) % 2 == 1 { -minor } else { minor };
            signed / tau.clone()
        })
        .collect()
}

#[test]
fn low_degree_examples() {
    let m = Mode::Exact;
    let t = build_table(&exact_lag(0, 0, q(0, 1)), 3, 0).unwrap();
    let p0 = cauchy_P(0, &t).unwrap();
    let q0 = cauchy_Q(0, &t).unwrap();
    assert_eq!(p0.coeffs, vec![m.one()]);
    assert_eq!(q0.coeffs, vec![m.one()]);
    let p1 = cauchy_P(1, &t).unwrap();
    assert_eq!(p1.coeffs, vec![m.ratio(-1, 2), m.one()]);
    let fam = cauchy_family(&t, 2).unwrap();
    assert_eq!(*fam.h(1).unwrap(), m.ratio(1, 12));
    assert_eq!(inner_product(&p0, &q0, &t).unwrap(), *fam.h(0).unwrap());
    assert!(inner_product(&p1, &q0, &t).unwrap().is_zero());
    let q1 = cauchy_Q(1, &t).unwrap();
    assert_eq!(inner_product(&p1, &q1, &t).unwrap(), m.ratio(1, 12));
    assert!(matches!(inner_product(&q1, &p1, &t), Err(Error::Domain(_))));
    assert!(matches!(cauchy_P(9, &t), Err(Error::Range { .. })));
}

#[test]
fn family_matches_bordered_determinants() {
    let t = build_table(&exact_lag(0, 1, q(1, 3)), 5, 0).unwrap();
    let fam = cauchy_family(&t, 5).unwrap();
    let tt = t.transposed();
    for n in 0..=5 {
        assert_eq!(fam.p(n).unwrap(), bordered_p(&t, n).as_slice(), "P_{n}");
        assert_eq!(fam.q(n).unwrap(), bordered_p(&tt, n).as_slice(), "Q_{n}");
        assert_eq!(*fam.h(n).unwrap(), t.tau(n + 1).unwrap() / t.tau(n).unwrap());
    }
}

#[test]
fn exact_orthogonality_and_monicity() {
    let t = build_table(&exact_lag(2, 1, q(0, 1)), 8, 0).unwrap();
    let fam = cauchy_family(&t, 8).unwrap();
    for n in 0..=8 {
        let p = fam.poly_p(n).unwrap();
        assert_eq!(*p.leading(), Mode::Exact.one());
        for m in 0..=8 {
            let ip = inner_product(&p, &fam.poly_q(m).unwrap(), &t).unwrap();
            let want = if n == m { fam.h(n).unwrap().clone() } else { Mode::Exact.zero() };
            assert_eq!(ip, want, "<P_{n}, Q_{m}>");
        }
    }
}

#[test]
fn real_orthogonality_at_fractional_theta() {
    let digits = 60;
    let t = build_table(&real_lag(q(1, 2), q(1, 3), 2, 3, digits), 8, 0).unwrap();
    let fam = cauchy_family(&t, 8).unwrap();
    let bound = -((digits - 30) as f64);
    for n in 0..=8 {
        let p = fam.poly_p(n).unwrap();
        for m in 0..=8 {
            let ip = inner_product(&p, &fam.poly_q(m).unwrap(), &t).unwrap();
            let h = fam.h(n).unwrap();
            let gap = if n == m { ip - h.clone() } else { ip };
            assert!((gap / h.clone()).abs().log10_abs() < bound, "<P_{n}, Q_{m}>");
        }
    }
}

#[test]
fn jacobi_examples() {
    let m = Mode::Exact;
    let p = ModelParams::new(Weight::JacobiCore { a: q(0, 1), b: q(0, 1) }, 1, 1, q(0, 1), m).unwrap();
    assert_eq!(jacobi_xi(0, &p).unwrap().coeffs, vec![m.one()]);
    assert_eq!(jacobi_xi(1, &p).unwrap().coeffs, vec![m.one(), m.int(-2)]);
    assert_eq!(jacobi_h_tilde(0, &p).unwrap(), m.one());
    let p2 = ModelParams::new(Weight::JacobiCore { a: q(1, 2), b: q(1, 3) }, 2, 3, q(0, 1), m).unwrap();
    assert_eq!(jacobi_h_tilde(0, &p2).unwrap(), m.ratio(6, 11));
}

#[test]
fn jacobi_biorthogonality_is_exact() {
    for (a, b, k1, k2) in [(q(1, 2), q(1, 3), 2, 3), (q(0, 1), q(2, 1), 1, 1), (q(-1, 3), q(3, 4), 3, 2)] {
        let p = ModelParams::new(Weight::JacobiCore { a, b }, k1, k2, q(0, 1), Mode::Exact).unwrap();
        for n in 0..=8 {
            let xi = jacobi_xi(n, &p).unwrap();
            for m in 0..=8 {
                let v = jacobi_biorth_product(&xi, &jacobi_psi(m, &p).unwrap(), &p).unwrap();
                let want = if n == m { jacobi_h_tilde(n, &p).unwrap() } else { Mode::Exact.zero() };
                assert_eq!(v, want);
            }
        }
    }
}

#[test]
fn jacobi_core_family_is_the_monic_jacobi_system() {
    let p = ModelParams::new(Weight::JacobiCore { a: q(1, 2), b: q(1, 3) }, 2, 3, q(0, 1), Mode::Exact).unwrap();
    let t = build_table(&p, 6, 0).unwrap();
    let fam = cauchy_family(&t, 6).unwrap();
    for n in 0..=6 {
        let xi = jacobi_xi(n, &p).unwrap();
        let lead = xi.leading().clone();
        let monic: Vec<Scalar> = xi.coeffs.iter().map(|c| c.clone() / lead.clone()).collect();
        assert_eq!(fam.p(n).unwrap(), monic.as_slice());
        let psi = jacobi_psi(n, &p).unwrap();
        let h = jacobi_h_tilde(n, &p).unwrap() / (lead * psi.leading().clone());
        assert_eq!(*fam.h(n).unwrap(), h);
    }
}

#[test]
fn hat_polynomials() {
    let m = Mode::Exact;
    let p = exact_lag(0, 0, q(0, 1));
    assert_eq!(hat_P(0, &p).unwrap().coeffs, vec![m.one()]);
    let p3 = exact_lag(3, 0, q(0, 1));
    assert_eq!(hat_P(0, &p3).unwrap().coeffs, vec![m.ratio(1, 6)]);
    // c₁,₁/Γ(2) = −2
    assert_eq!(hat_P(1, &p).unwrap().coeffs, vec![m.one(), m.int(-2)]);
    let t = build_table(&p, 3, 0).unwrap();
    let ip = inner_product(&hat_P(0, &p).unwrap(), &hat_Q(1, &p).unwrap(), &t).unwrap();
    assert!(ip.is_zero());
    let frac = ModelParams::laguerre(q(1, 2), q(0, 1), 1, 1, q(0, 1), Mode::real(30)).unwrap();
    assert!(hat_P(2, &frac).is_ok());
    let frac_exact = ModelParams::new(Weight::JacobiCore { a: q(1, 2), b: q(0, 1) }, 1, 1, q(0, 1), m).unwrap();
    assert!(matches!(hat_P(1, &frac_exact), Err(Error::Domain(_))));
}

#[test]
fn hat_biorthogonality_under_laguerre_pairing() {
    let p = exact_lag(1, 2, q(0, 1));
    let t = build_table(&p, 6, 0).unwrap();
    for n in 0..=6 {
        for m in 0..=6 {
            let v = inner_product(&hat_P(m, &p).unwrap(), &hat_Q(n, &p).unwrap(), &t).unwrap();
            let want = if n == m { jacobi_h_tilde(n, &p).unwrap() } else { Mode::Exact.zero() };
            assert_eq!(v, want);
        }
    }
    let digits = 50;
    let pr = real_lag(q(1, 2), q(1, 3), 2, 3, digits);
    let tr = build_table(&pr, 6, 0).unwrap();
    for n in 0..=6 {
        for m in 0..=6 {
            let v = inner_product(&hat_P(m, &pr).unwrap(), &hat_Q(n, &pr).unwrap(), &tr).unwrap();
            let h = jacobi_h_tilde(n, &pr).unwrap();
            let gap = if n == m { v - h.clone() } else { v };
            assert!((gap / h).abs().log10_abs() < -30.0);
        }
    }
}

/// The Γ-ratio display for the monic conversion, taken literally.
fn displayed_monic_factor(n: usize, a: &Rational, b: &Rational, th1: &Rational, th2: &Rational, mode: Mode) -> Scalar {
    let g = |x: Rational| gamma(&x, mode).unwrap();
    let n_r = Rational::from(n as u32);
    let s = Rational::from(a + b) + 1u32;
    g(n_r.clone() + 1u32)
        * g((a + Rational::from(th1 * &n_r)) + 1u32)
        * g((s.clone() + Rational::from(th1 * &n_r)) / th2.clone())
        / g((s + ((th1.clone() + th2) * &n_r)) / th2.clone())
}

#[test]
fn monic_factor_examples_and_sign() {
    let m = Mode::Exact;
    let p = exact_lag(0, 0, q(0, 1));
    assert_eq!(monic_factor(0, Side::X, &p).unwrap(), m.one());
    assert_eq!(monic_factor(1, Side::X, &p).unwrap(), m.ratio(-1, 2));
    for n in 0..=5 {
        let f = monic_factor(n, Side::X, &p).unwrap();
        assert_eq!(f.clone() * hat_P(n, &p).unwrap().leading().clone(), m.one());
        let shown = displayed_monic_factor(n, &q(0, 1), &q(0, 1), &q(1, 1), &q(1, 1), m);
        let sign = if n % 2 == 1 { -m.one() } else { m.one() };
        assert_eq!(f, sign * shown);
    }
}

#[test]
fn monic_conversion_reproduces_the_determinant_family() {
    let digits = 60;
    let p = real_lag(q(1, 2), q(1, 3), 2, 3, digits);
    let t = build_table(&p, 6, 0).unwrap();
    let fam = cauchy_family(&t, 6).unwrap();
    for n in 0..=6 {
        let f = monic_factor(n, Side::X, &p).unwrap();
        let hat = hat_P(n, &p).unwrap();
        for (l, c) in fam.p(n).unwrap().iter().enumerate() {
            let via_hat = f.clone() * hat.coeffs[l].clone();
            assert!((via_hat - c.clone()).abs().log10_abs() < -30.0 + c.log10_abs().max(0.0));
        }
        let g = monic_factor(n, Side::Y, &p).unwrap();
        let hq = hat_Q(n, &p).unwrap();
        assert!(rel(&(g * hq.leading().clone()), &Mode::real(digits).one()) < -50.0);
    }
}

#[test]
fn closed_form_h() {
    let m = Mode::Exact;
    let p = exact_lag(0, 0, q(0, 1));
    assert_eq!(laguerre_h(0, &p).unwrap(), m.one());
    assert_eq!(laguerre_h(1, &p).unwrap(), m.ratio(1, 12));
    let pt = exact_lag(2, 1, q(1, 3));
    let t = build_table(&pt, 6, 0).unwrap();
    for n in 0..=6 {
        assert_eq!(laguerre_h(n, &pt).unwrap(), t.tau(n + 1).unwrap() / t.tau(n).unwrap());
    }
    let digits = 60;
    let pr = real_lag(q(1, 2), q(1, 3), 2, 3, digits);
    let tr = build_table(&pr, 8, 0).unwrap();
    let fam = cauchy_family(&tr, 8).unwrap();
    for n in 0..=8 {
        assert!(rel(&laguerre_h(n, &pr).unwrap(), fam.h(n).unwrap()) < -25.0);
    }
}

#[test]
fn residue_examples() {
    let m = Mode::Exact;
    let p = exact_lag(0, 0, q(0, 1));
    assert_eq!(residue_eval_hatP(0, &m.int(3), &p).unwrap(), m.one());
    let p2 = exact_lag(2, 0, q(0, 1));
    assert_eq!(residue_eval_hatP(0, &m.int(3), &p2).unwrap(), m.ratio(1, 2));
    let want = hat_P(1, &p).unwrap().evaluate(&m.one()).unwrap();
    assert_eq!(residue_eval_hatP(1, &m.one(), &p).unwrap(), want);
    assert!(residue_eval_hatP(1, &m.zero(), &p).is_err());
}

#[test]
fn residues_match_coefficients_term_by_term() {
    let p = real_lag(q(1, 2), q(1, 3), 2, 3, 50);
    for n in 0..=4 {
        let terms = residue_terms_hatP(n, &p).unwrap();
        let hat = hat_P(n, &p).unwrap();
        for (r, c) in terms.iter().zip(&hat.coeffs) {
            assert!(rel(r, c) < -20.0);
        }
        for x in [q(1, 2), q(1, 1), q(2, 1)] {
            let x = p.mode.rational(&x);
            assert!(rel(&residue_eval_hatP(n, &x, &p).unwrap(), &hat.evaluate(&x).unwrap()) < -20.0);
            let hq = hat_Q(n, &p).unwrap();
            assert!(rel(&residue_eval_hatQ(n, &x, &p).unwrap(), &hq.evaluate(&x).unwrap()) < -20.0);
        }
    }
}

#[test]
fn evaluation_contract() {
    let m = Mode::Exact;
    let p = BiorthPoly { kind: PolyKind::P, side: Side::X, n: 2, k: 2, coeffs: vec![m.int(3), m.int(-1), m.one()] };
    assert_eq!(p.evaluate(&m.zero()).unwrap(), m.int(3));
    // x = 9: x^{1/2} = 3, so 3 − 3 + 9
    assert_eq!(p.evaluate(&m.int(9)).unwrap(), m.int(9));
    assert!(p.evaluate(&m.int(2)).is_err());
    assert!(p.evaluate(&m.int(-1)).is_err());
    let r = Mode::real(30);
    let pr = BiorthPoly { coeffs: p.coeffs.iter().map(|c| r.converted(c).unwrap()).collect(), ..p.clone() };
    assert!((pr.evaluate(&r.int(2)).unwrap().to_f64() - (5.0 - 2f64.sqrt())).abs() < 1e-14);
}

#[test]
fn poly_json_round_trip() {
    let t = build_table(&exact_lag(0, 1, q(0, 1)), 4, 0).unwrap();
    let p = cauchy_P(3, &t).unwrap();
    let doc = p.to_document();
    let s = serde_json::to_string(&doc).unwrap();
    let back = BiorthPoly::from_document(&serde_json::from_str(&s).unwrap(), Mode::Exact).unwrap();
    assert_eq!(back, p);
}

#[test]
fn orthogonality_report_is_exact() {
    let p = ModelParams::laguerre(q(0, 1), q(1, 1), 1, 1, q(1, 3), Mode::Exact).unwrap();
    let r = orthogonality_report(4, &build_table(&p, 4, 0).unwrap()).unwrap();
    assert!(r.passes(0.0));
    assert_eq!(r.entries().count(), 25);
}
