use rug::Rational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{lattice_table, tau_family};
use crate::moments::{ModelParams, Side};
use crate::numerics::quad::expsinh_rule_f64;
use crate::numerics::{det, DenseMatrix, HalfLineIntegrand, Mode, Scalar};

pub const ORACLE_SCHEMA: &str = "cbop.oracle-report/1";

/// Which determinant of the tower the integral represents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Tau,
    Sigma,
    SigmaHat,
    Xi,
    XiHat,
}

impl Target {
    pub const ALL: [Target; 5] = [Target::Tau, Target::Sigma, Target::SigmaHat, Target::Xi, Target::XiHat];

    /// Number of `x` and `y` variables at size `n`.
    fn dims(self, n: usize) -> (usize, usize) {
        match self {
            Target::Sigma => (n, n + 1),
            Target::SigmaHat => (n + 1, n),
            _ => (n, n),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    pub n: usize,
    pub target: Target,
    pub params: ModelParams,
    /// Relative tolerance on the quadrature/determinant gap.
    pub tol: f64,
}

impl OracleConfig {
    fn validate(&self) -> Result<()> {
        if !(1..=2).contains(&self.n) {
            return Err(Error::Domain(format!("the quadrature oracle covers n = 1, 2 only, got {}", self.n)));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::Domain(format!("tolerance {} must be positive", self.tol)));
        }
        if self.params.k1 != 1 || self.params.k2 != 1 || !self.params.has_time_flow() {
            return Err(Error::Domain("the matrix integrals are stated for k1 = k2 = 1 half-line weights".into()));
        }
        Ok(())
    }
}

/// One refinement level of the tensor rule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleLevel {
    pub step: f64,
    pub nodes_x: usize,
    pub nodes_y: usize,
    pub value: f64,
    /// Relative gap to the determinant.
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub schema: String,
    pub target: Target,
    pub n: usize,
    pub params: ModelParams,
    pub quadrature: f64,
    pub determinant: f64,
    pub gap: f64,
    /// Error estimate of the finest level from the last two refinements.
    pub estimated_error: f64,
    pub tol: f64,
    pub passed: bool,
    pub levels: Vec<OracleLevel>,
}

struct Rule {
    x: Vec<f64>,
    w: Vec<f64>,
}

fn density_f64(d: &HalfLineIntegrand, x: f64) -> f64 {
    let p = d.poly.iter().rev().fold(0.0, |acc, c| acc * x + c.to_f64());
    x.powf(d.power.to_f64()) * p * (-d.rate.to_f64() * x).exp()
}

/// Exp-sinh nodes with the density folded into the weights; negligible
/// nodes are dropped.
fn rule(d: &HalfLineIntegrand, h: f64) -> Rule {
    let (lo, hi) = d.t_window(8);
    let pts: Vec<(f64, f64)> =
        expsinh_rule_f64(h, lo, hi).into_iter().map(|(x, w)| (x, w * density_f64(d, x))).collect();
    let big = pts.iter().map(|p| p.1.abs()).fold(0.0, f64::max);
    let (x, w) = pts.into_iter().filter(|p| p.1.abs() > big * 1e-20).unzip();
    Rule { x, w }
}

fn for_each_combo(len: usize, m: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(len: usize, m: usize, start: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == m {
            f(cur);
            return;
        }
        for k in start..len {
            cur.push(k);
            rec(len, m, k + 1, cur, f);
            cur.pop();
        }
    }
    rec(len, m, 0, &mut Vec::with_capacity(m), f);
}

/// `Σ_{k₁<…<k_m} Δ²(x_k)·∏g_k·(Σx_k if weighted)`.
fn combo_sum(x: &[f64], g: &[f64], m: usize, weighted: bool) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec(
        x: &[f64],
        g: &[f64],
        m: usize,
        start: usize,
        chosen: &mut [usize; 3],
        depth: usize,
        acc: f64,
        s: f64,
        weighted: bool,
    ) -> f64 {
        if depth == m {
            return if weighted { acc * s } else { acc };
        }
        let mut total = 0.0;
        for k in start..x.len() {
            let mut a = acc * g[k];
            for &j in &chosen[..depth] {
                let d = x[k] - x[j];
                a *= d * d;
            }
            chosen[depth] = k;
            total += rec(x, g, m, k + 1, chosen, depth + 1, a, s + x[k], weighted);
        }
        total
    }
    rec(x, g, m, 0, &mut [0; 3], 0, 1.0, 0.0, weighted)
}

/// `∫ Δ²(x)Δ²(y)/∏(x_j+y_k) [Σ] ∏dμ₁dμ₂ / (nx!·ny!)`. The integrand is
/// symmetric in each group, so summing over strictly increasing node tuples
/// absorbs the factorials; coincident nodes contribute zero.
fn matrix_integral(rx: &Rule, ry: &Rule, nx: usize, ny: usize, sum_x: bool, sum_y: bool) -> f64 {
    let (outer, inner, no, ni, so, si) =
        if nx <= ny { (rx, ry, nx, ny, sum_x, sum_y) } else { (ry, rx, ny, nx, sum_y, sum_x) };
    let mut total = 0.0;
    let mut g = vec![0.0; inner.x.len()];
    for_each_combo(outer.x.len(), no, &mut |c| {
        let mut w = 1.0;
        let mut s = 0.0;
        for (a, &i) in c.iter().enumerate() {
            w *= outer.w[i];
            s += outer.x[i];
            for &j in &c[..a] {
                let d = outer.x[i] - outer.x[j];
                w *= d * d;
            }
        }
        if so {
            w *= s;
        }
        for (k, gk) in g.iter_mut().enumerate() {
            *gk = c.iter().fold(inner.w[k], |acc, &i| acc / (outer.x[i] + inner.x[k]));
        }
        total += w * combo_sum(&inner.x, &g, ni, si);
    });
    total
}

const STEPS: [f64; 4] = [0.4, 0.2, 0.1, 0.05];

/// Quadrature of the matrix-integral form of `cfg.target` at size `cfg.n`,
/// refined until two levels agree to well inside the tolerance, and
/// compared with the bordered determinant.
pub fn andreief_partition(cfg: &OracleConfig) -> Result<OracleReport> {
    cfg.validate()?;
    let p = &cfg.params;
    let (dx, dy) = (p.density(Side::X)?, p.density(Side::Y)?);
    let fam = tau_family(cfg.n, &lattice_table(p, cfg.n, 1)?)?;
    let determinant = match cfg.target {
        Target::Tau => fam.tau,
        Target::Sigma => fam.sigma,
        Target::SigmaHat => fam.sigma_hat,
        Target::Xi => fam.xi,
        Target::XiHat => fam.xi_hat,
    }
    .to_f64();
    let (nx, ny) = cfg.target.dims(cfg.n);
    let (sx, sy) = (cfg.target == Target::Xi, cfg.target == Target::XiHat);
    let mut levels: Vec<OracleLevel> = Vec::new();
    let mut changes: Vec<f64> = Vec::new();
    let mut estimate = f64::INFINITY;
    for h in STEPS {
        let (rx, ry) = (rule(&dx, h), rule(&dy, h));
        let value = matrix_integral(&rx, &ry, nx, ny, sx, sy);
        let gap = ((value - determinant) / determinant).abs();
        if let Some(l) = levels.last() {
            changes.push(((value - l.value) / value).abs());
        }
        levels.push(OracleLevel { step: h, nodes_x: rx.x.len(), nodes_y: ry.x.len(), value, gap });
        // halving the step squares the error of a double-exponential rule
        estimate = match changes[..] {
            [.., d0, d1] if d0 > 0.0 => d1 * d1 / d0,
            [.., d1] => d1,
            [] => f64::INFINITY,
        };
        if estimate < cfg.tol * 1e-2 {
            break;
        }
    }
    let last = levels.last().expect("at least one level");
    if estimate >= cfg.tol {
        return Err(Error::Quadrature(format!(
            "{:?} at n = {}: estimated relative error {:e} at step {}",
            cfg.target, cfg.n, estimate, last.step
        )));
    }
    Ok(OracleReport {
        schema: ORACLE_SCHEMA.into(),
        target: cfg.target,
        n: cfg.n,
        params: p.clone(),
        quadrature: last.value,
        determinant,
        gap: last.gap,
        estimated_error: estimate,
        tol: cfg.tol,
        passed: last.gap < cfg.tol,
        levels: levels.clone(),
    })
}

/// Measure for the Andréief identity.
#[derive(Clone, Debug, PartialEq)]
pub enum IdentityMeasure {
    /// A half-line density, integrated by double-precision quadrature.
    HalfLine(HalfLineIntegrand),
    /// `poly(x)dx` on `[0, 1]` with rational coefficients, integrated exactly.
    UnitInterval { poly: Vec<Rational> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdentityCheck {
    pub n: usize,
    /// `(1/n!)∫det[f_i(x_j)]det[g_i(x_j)]∏dμ(x_j)`.
    pub lhs: Scalar,
    /// `det[∫f_i g_j dμ]`.
    pub rhs: Scalar,
    pub residual: Scalar,
    /// Quadrature nodes per dimension; `None` for the exact measure.
    pub nodes: Option<usize>,
}

/// Permutations of `0..n` with their signs.
fn permutations(n: usize) -> Vec<(Vec<usize>, i64)> {
    if n == 0 {
        return vec![(vec![], 1)];
    }
    let mut out = Vec::new();
    for (p, s) in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            let sign = if (p.len() - pos) % 2 == 0 { s } else { -s };
            out.push((q, sign));
        }
    }
    out
}

fn det_small(m: &[Vec<f64>]) -> f64 {
    permutations(m.len())
        .iter()
        .map(|(p, s)| *s as f64 * p.iter().enumerate().map(|(i, &j)| m[i][j]).product::<f64>())
        .sum()
}

/// Both sides of the Andréief identity for the monomial families
/// `f_i = x^{f[i]}`, `g_i = x^{g[i]}`, `n ≤ 3`.
pub fn andreief_identity_check(f: &[u32], g: &[u32], measure: &IdentityMeasure) -> Result<IdentityCheck> {
    let n = f.len();
    if n != g.len() || n == 0 || n > 3 {
        return Err(Error::Shape(format!("need two families of equal size 1..=3, got {} and {}", f.len(), g.len())));
    }
    match measure {
        IdentityMeasure::UnitInterval { poly } => {
            let mode = Mode::Exact;
            let moment = |k: u32| -> Scalar {
                poly.iter()
                    .enumerate()
                    .fold(mode.zero(), |acc, (m, c)| acc + mode.rational(&Rational::from(c / (k + m as u32 + 1))))
            };
            let perms = permutations(n);
            let mut lhs = mode.zero();
            for (sp, ss) in &perms {
                for (pp, ps) in &perms {
                    let term = (0..n).fold(mode.int(ss * ps), |acc, j| acc * moment(f[sp[j]] + g[pp[j]]));
                    lhs = lhs + term;
                }
            }
            let fact: i64 = (1..=n as i64).product();
            let lhs = lhs / mode.int(fact);
            let rhs = det(&DenseMatrix::from_fn(n, n, |i, j| moment(f[i] + g[j])))?;
            Ok(IdentityCheck { n, residual: lhs.clone() - &rhs, lhs, rhs, nodes: None })
        }
        IdentityMeasure::HalfLine(d) => {
            d.validate()?;
            let r = rule(d, 0.05);
            let mut lhs = 0.0;
            for_each_combo(r.x.len(), n, &mut |c| {
                let fm: Vec<Vec<f64>> = f.iter().map(|&e| c.iter().map(|&k| r.x[k].powi(e as i32)).collect()).collect();
                let gm: Vec<Vec<f64>> = g.iter().map(|&e| c.iter().map(|&k| r.x[k].powi(e as i32)).collect()).collect();
                lhs += det_small(&fm) * det_small(&gm) * c.iter().map(|&k| r.w[k]).product::<f64>();
            });
            let mode = Mode::real(30);
            let entries = DenseMatrix::try_from_fn(n, n, |i, j| {
                d.shifted(&Rational::from(f[i] + g[j]), &Rational::new()).exact_integral(mode)
            })?;
            let rhs = det(&entries)?;
            let lhs = mode.from_f64(lhs)?;
            Ok(IdentityCheck { n, residual: lhs.clone() - &rhs, lhs, rhs, nodes: Some(r.x.len()) })
        }
    }
}
