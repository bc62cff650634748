use super::bordered::{moments, shifted, Bordered, ColSpec, RowSpec};
use super::tau::{check_lattice_table, tau_family, tau_jet};
use crate::error::{Error, Result};
use crate::moments::MomentTable;
use crate::numerics::{det, jacobi_identity_residual, minor_det, DenseMatrix, Scalar};

use ColSpec as C;
use RowSpec as R;

/// The Desnanot–Jacobi identity residual on any square matrix.
pub fn jacobi_identity_check(m: &DenseMatrix, i1: usize, i2: usize, j1: usize, j2: usize) -> Result<Scalar> {
    jacobi_identity_residual(m, i1, i2, j1, j2)
}

/// The bordered matrices whose Jacobi identities give the bilinear
/// equations, one per relation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JacobiApplication {
    /// `D_tτ_{n+1}·τₙ = σₙσ̂ₙ`
    D1,
    /// `D_tξₙ·τₙ = σ̂ₙσ_{n−1}`
    D2,
    /// `D_tξ̂ₙ·τₙ = σₙσ̂_{n−1}`
    D3,
    /// `τₙξ′_{n+1} = ξ_{n+1}τ′ₙ + σₙα̂ₙ`
    D41,
    /// `ξ̂ₙτ′_{n+1} = τ_{n+1}ξ̂′ₙ + σₙβ̂ₙ`
    D42,
    /// `τₙξ̂′_{n+1} = ξ̂_{n+1}τ′ₙ + σ̂ₙαₙ`
    D51,
    /// `ξₙτ′_{n+1} = τ_{n+1}ξ′ₙ + σ̂ₙβₙ`
    D52,
}

impl JacobiApplication {
    pub const ALL: [JacobiApplication; 7] = [Self::D1, Self::D2, Self::D3, Self::D41, Self::D42, Self::D51, Self::D52];

    pub fn name(self) -> &'static str {
        match self {
            Self::D1 => "D1",
            Self::D2 => "D2",
            Self::D3 => "D3",
            Self::D41 => "D4,1",
            Self::D42 => "D4,2",
            Self::D51 => "D5,1",
            Self::D52 => "D5,2",
        }
    }

    /// Smallest site the layout makes sense at.
    pub fn min_site(self) -> usize {
        match self {
            Self::D2 | Self::D3 | Self::D42 | Self::D52 => 1,
            _ => 0,
        }
    }

    /// Layout and the zero-based `(i₁, i₂; j₁, j₂)` at site `n`.
    pub fn layout(self, n: usize) -> (Bordered, [usize; 4]) {
        let rows1 = || moments(n + 1, R::Moment);
        let cols1 = || moments(n + 1, C::Moment);
        let push_r = |mut v: Vec<RowSpec>, x: &[RowSpec]| {
            v.extend_from_slice(x);
            v
        };
        let push_c = |mut v: Vec<ColSpec>, x: &[ColSpec]| {
            v.extend_from_slice(x);
            v
        };
        let full = || Bordered::new(push_r(rows1(), &[R::Phi]), push_c(cols1(), &[C::PhiHat]));
        match self {
            Self::D1 => (full(), [n, n + 1, n, n + 1]),
            Self::D2 => (
                Bordered::new(push_r(rows1(), &[R::Phi]), push_c(moments(n, C::Moment), &[C::PhiHat, C::Unit])),
                [n - 1, n, n, n + 1],
            ),
            Self::D3 => (
                Bordered::new(push_r(moments(n, R::Moment), &[R::Phi, R::Unit]), push_c(cols1(), &[C::PhiHat])),
                [n, n + 1, n - 1, n],
            ),
            Self::D41 => (
                Bordered::new(push_r(shifted(n + 1, R::Moment), &[R::Phi]), push_c(cols1(), &[C::PhiHat])),
                [n, n + 1, n, n + 1],
            ),
            Self::D42 => (full(), [n, n + 1, n - 1, n + 1]),
            Self::D51 => (
                Bordered::new(push_r(rows1(), &[R::Phi]), push_c(shifted(n + 1, C::Moment), &[C::PhiHat])),
                [n, n + 1, n, n + 1],
            ),
            Self::D52 => (full(), [n - 1, n + 1, n, n + 1]),
        }
    }
}

/// The Jacobi identity on one application, together with how far each of
/// the six determinants it involves is from the tower quantity it should
/// equal (`D`, `D(i₁i₂;j₁j₂)`, `D(i₁;j₁)`, `D(i₂;j₂)`, `D(i₁;j₂)`,
/// `D(i₂;j₁)`).
#[derive(Clone, Debug)]
pub struct StructuralCheck {
    pub application: JacobiApplication,
    pub n: usize,
    pub identity_residual: Scalar,
    pub term_gaps: [Scalar; 6],
    /// `D·D₁₂ − (D₁₁D₂₂ − D₁₂ₓD₂₁)` with every minor replaced by its
    /// tower quantity: the bilinear relation in determinant form.
    pub relation_residual: Scalar,
}

pub fn structural_check(app: JacobiApplication, n: usize, table: &MomentTable) -> Result<StructuralCheck> {
    check_lattice_table(table)?;
    if n < app.min_site() {
        return Err(Error::Range { what: "Jacobi application site", index: n, available: app.min_site() });
    }
    let (layout, [i1, i2, j1, j2]) = app.layout(n);
    let m = layout.matrix(table)?;
    let identity_residual = jacobi_identity_residual(&m, i1, i2, j1, j2)?;
    let actual = [
        det(&m)?,
        minor_det(&m, &[i1, i2], &[j1, j2])?,
        minor_det(&m, &[i1], &[j1])?,
        minor_det(&m, &[i2], &[j2])?,
        minor_det(&m, &[i1], &[j2])?,
        minor_det(&m, &[i2], &[j1])?,
    ];
    let (f, j, j1_) = (tau_family(n, table)?, tau_jet(n, table)?, tau_jet(n + 1, table)?);
    let fam1 = tau_family(n + 1, table)?;
    let prev = if n >= 1 { Some(tau_family(n - 1, table)?) } else { None };
    let neg = |x: &Scalar| -x.clone();
    let expected: [Scalar; 6] = match app {
        JacobiApplication::D1 => {
            [neg(&j1_.dtau), f.tau.clone(), neg(&j.dtau), j1_.tau.clone(), f.sigma.clone(), f.sigma_hat.clone()]
        }
        JacobiApplication::D2 => {
            [f.sigma_hat.clone(), prev.expect("n ≥ 1").sigma, f.xi.clone(), neg(&j.dtau), neg(&j.dxi), f.tau.clone()]
        }
        JacobiApplication::D3 => [
            f.sigma.clone(),
            prev.expect("n ≥ 1").sigma_hat,
            f.xi_hat.clone(),
            neg(&j.dtau),
            f.tau.clone(),
            neg(&j.dxi_hat),
        ],
        JacobiApplication::D41 => {
            [neg(&j1_.dxi), f.tau.clone(), neg(&j.dtau), fam1.xi.clone(), f.sigma.clone(), f.alpha_hat.clone()]
        }
        JacobiApplication::D42 => {
            [neg(&j1_.dtau), f.xi_hat.clone(), neg(&j.dxi_hat), j1_.tau.clone(), f.sigma.clone(), f.beta_hat.clone()]
        }
        JacobiApplication::D51 => {
            [neg(&j1_.dxi_hat), f.tau.clone(), neg(&j.dtau), fam1.xi_hat.clone(), f.alpha.clone(), f.sigma_hat.clone()]
        }
        JacobiApplication::D52 => {
            [neg(&j1_.dtau), f.xi.clone(), neg(&j.dxi), j1_.tau.clone(), f.beta.clone(), f.sigma_hat.clone()]
        }
    };
    let term_gaps = std::array::from_fn(|k| actual[k].clone() - &expected[k]);
    let [d, d12, d11, d22, d12x, d21] = expected;
    let relation_residual = d * d12 - (d11 * d22 - d12x * d21);
    Ok(StructuralCheck { application: app, n, identity_residual, term_gaps, relation_residual })
}

/// Structural checks of every application at sites `min_site..=n_top`.
pub fn jacobi_report(n_top: usize, table: &MomentTable) -> Result<crate::report::ResidualReport> {
    use crate::report::{ResidualEntry, ResidualReport, SiteReport};
    let mut sites = Vec::with_capacity(n_top + 1);
    for n in 0..=n_top {
        let mut site = SiteReport::checked(n, Vec::new());
        for app in JacobiApplication::ALL {
            if n < app.min_site() {
                site.skipped_equations.push(format!("{}: needs n ≥ {}", app.name(), app.min_site()));
                continue;
            }
            let c = structural_check(app, n, table)?;
            site.residuals.push(ResidualEntry::new(format!("{}.identity", app.name()), &c.identity_residual));
            site.residuals.push(ResidualEntry::new(format!("{}.relation", app.name()), &c.relation_residual));
            for (k, g) in c.term_gaps.iter().enumerate() {
                site.residuals.push(ResidualEntry::new(format!("{}.term{k}", app.name()), g));
            }
        }
        sites.push(site);
    }
    Ok(ResidualReport::new("jacobi", table.mode(), sites))
}
