//! Homogeneous group cochains valued in forms on R^n, the boundary
//! delta-bar, covariance checking, homogeneous/inhomogeneous conversion,
//! and total-complex closedness verification (symbolic and randomized).

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::chern::{chern_cocycle, Mode};
use crate::consts::total_d_sign;
use crate::error::CoreError;
use crate::form::{BiForm, Gen};
use crate::jet::JetDiffeo;
use crate::localized::{den_label, den_poly};
use crate::poly::{Rational, Var};
use crate::sample::{random_diffeo, random_x_point};

type Evaluator = Arc<dyn Fn(&[JetDiffeo]) -> Result<BiForm, CoreError> + Send + Sync>;

/// Homogeneous group cochain of degree p: a pure dx-form-valued function
/// of p+1 diffeomorphisms.
#[derive(Clone)]
pub struct GroupCochain {
    n: u8,
    p: u8,
    tag: String,
    eval: Evaluator,
}

impl GroupCochain {
    pub fn new(
        n: u8,
        p: u8,
        tag: &str,
        eval: impl Fn(&[JetDiffeo]) -> Result<BiForm, CoreError> + Send + Sync + 'static,
    ) -> Self {
        GroupCochain {
            n,
            p,
            tag: tag.to_string(),
            eval: Arc::new(eval),
        }
    }

    pub fn zero(n: u8, p: u8) -> Self {
        GroupCochain::new(n, p, "0", move |_| Ok(BiForm::zero(n, 0)))
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn p(&self) -> u8 {
        self.p
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn evaluate(&self, tuple: &[JetDiffeo]) -> Result<BiForm, CoreError> {
        if tuple.len() != self.p as usize + 1 {
            return Err(CoreError::DimensionMismatch(format!(
                "cochain of degree {} expects {} diffeomorphisms, got {}",
                self.p,
                self.p + 1,
                tuple.len()
            )));
        }
        let out = (self.eval)(tuple)?;
        if out
            .terms()
            .any(|(g, _)| g.iter().any(|gen| !matches!(gen, Gen::Dx(_))))
        {
            return Err(CoreError::Internal(format!(
                "cochain `{}` produced non-dx components",
                self.tag
            )));
        }
        Ok(out)
    }

    /// Group boundary: alternating sum over entry omissions.
    pub fn delta_bar(&self) -> GroupCochain {
        let inner = self.eval.clone();
        let p = self.p;
        GroupCochain::new(
            self.n,
            p + 1,
            &format!("delta_bar({})", self.tag),
            move |tuple| {
                let n0 = tuple[0].n();
                let mut acc = BiForm::zero(n0, 0);
                for i in 0..tuple.len() {
                    let sub: Vec<JetDiffeo> = tuple
                        .iter()
                        .enumerate()
                        .filter(|&(r, _)| r != i)
                        .map(|(_, f)| f.clone())
                        .collect();
                    let v = inner(&sub)?;
                    acc = if i % 2 == 0 { acc.add(&v) } else { acc.sub(&v) };
                }
                Ok(acc)
            },
        )
    }
}

/// Structural regular-differentiability: every coefficient denominator is
/// a registered Jacobian-determinant power in the base variables only.
pub fn assert_regular_differentiable(f: &BiForm) -> Result<(), CoreError> {
    for (_, c) in f.terms() {
        for id in c.denominators().keys() {
            let d = den_poly(*id);
            if d.depends_on(|v| !matches!(v, Var::X(_) | Var::Jet { .. })) {
                return Err(CoreError::Internal(format!(
                    "denominator `{}` involves non-base variables",
                    den_label(*id)
                )));
            }
            if !den_label(*id).contains("det(") {
                return Err(CoreError::Internal(format!(
                    "denominator `{}` is not a Jacobian determinant",
                    den_label(*id)
                )));
            }
        }
    }
    Ok(())
}

/// The level-p component of the Chern group cocycle C_J as a cochain.
pub fn chern_cochain(n: u8, j_parts: &[u8], p: u8, mode: Mode) -> GroupCochain {
    let parts = j_parts.to_vec();
    let total: u32 = parts.iter().map(|&q| q as u32).sum();
    let tag = format!("C_{:?} level {}", parts, p);
    GroupCochain::new(n, p, &tag, move |tuple| {
        if p as u32 > 2 * total {
            return Ok(BiForm::zero(tuple[0].n(), 0));
        }
        let out = chern_cocycle(&parts, tuple, mode)?;
        assert_regular_differentiable(&out)?;
        Ok(out)
    })
}

/// Inverse-free covariance check: c(rho_0 rho, .., rho_p rho) must equal
/// rho^*(c(rho_0, .., rho_p)).  Returns None on success, the residual
/// witness on failure.
pub fn covariance_check(
    c: &GroupCochain,
    rho: &JetDiffeo,
    tuple: &[JetDiffeo],
) -> Result<Option<BiForm>, CoreError> {
    let shifted: Vec<JetDiffeo> = tuple
        .iter()
        .map(|f| f.compose(rho))
        .collect::<Result<_, _>>()?;
    let lhs = c.evaluate(&shifted)?;
    let rhs = c.evaluate(tuple)?.pullback(rho)?;
    let residual = lhs.sub(&rhs);
    if residual.is_zero() {
        Ok(None)
    } else {
        Ok(Some(residual))
    }
}

/// Inhomogeneous cochain of degree p: takes p group arguments.
#[derive(Clone)]
pub struct InhomCochain {
    n: u8,
    p: u8,
    tag: String,
    eval: Evaluator,
}

impl InhomCochain {
    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn p(&self) -> u8 {
        self.p
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn evaluate(&self, args: &[JetDiffeo]) -> Result<BiForm, CoreError> {
        if args.len() != self.p as usize {
            return Err(CoreError::DimensionMismatch(format!(
                "inhomogeneous cochain of degree {} expects {} arguments, got {}",
                self.p,
                self.p,
                args.len()
            )));
        }
        (self.eval)(args)
    }
}

/// Homogeneous -> inhomogeneous: c(phi_1, .., phi_p) =
/// c-bar(phi_1 .. phi_p, phi_2 .. phi_p, .., phi_p, e).
pub fn to_inhomogeneous(c: &GroupCochain) -> InhomCochain {
    let inner = c.clone();
    let n = c.n();
    let p = c.p();
    InhomCochain {
        n,
        p,
        tag: format!("inhom({})", c.tag()),
        eval: Arc::new(move |args| {
            // build rho_i = phi_{i+1} o .. o phi_p from the right
            let mut tail = JetDiffeo::identity(n);
            let mut rev = vec![tail.clone()];
            for phi in args.iter().rev() {
                tail = phi.compose(&tail)?;
                rev.push(tail.clone());
            }
            rev.reverse();
            inner.evaluate(&rev)
        }),
    }
}

/// Value of the homogeneous cochain at the tuple described by its
/// successive quotients: rho_i = q_{i+1} o .. o q_p o base, rho_p = base.
/// No diffeomorphism inversion is performed; callers without the quotient
/// data get an unsupported-input error.
pub fn homogeneous_value(
    c: &GroupCochain,
    quotients: &[JetDiffeo],
    base: &JetDiffeo,
) -> Result<BiForm, CoreError> {
    if quotients.len() != c.p() as usize {
        return Err(CoreError::Unsupported(
            "homogeneous evaluation requires all successive quotients".into(),
        ));
    }
    to_inhomogeneous(c).evaluate(quotients)?.pullback(base)
}

#[derive(Clone, Copy, Debug)]
pub enum ClosednessMode {
    /// Generic symbolic jets of the given order (exact polynomial identity).
    Symbolic { order: u8 },
    /// Random rational diffeomorphism tuples evaluated at random rational
    /// points; singular points are resampled, never skipped.
    Randomized { points: usize, seed: u64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct BidegreeReport {
    pub level: u8,
    pub ok: bool,
    pub residual: Option<String>,
    pub points: usize,
    pub degree_bound: u64,
}

/// Verify delta_bar(C^{(p)}) + (-1)^p d C^{(p+1)} = 0 for p = 0..2|J|.
pub fn total_closedness(
    n: u8,
    j_parts: &[u8],
    mode: ClosednessMode,
) -> Result<Vec<BidegreeReport>, CoreError> {
    let total: u8 = j_parts.iter().sum();
    let mut reports = Vec::new();
    for p in 0..=2 * total {
        let c_p = chern_cochain(n, j_parts, p, Mode::Base);
        let c_next = if p + 1 <= 2 * total {
            chern_cochain(n, j_parts, p + 1, Mode::Base)
        } else {
            GroupCochain::zero(n, p + 1)
        };
        let residual_at = |tuple: &[JetDiffeo]| -> Result<BiForm, CoreError> {
            let a = c_p.delta_bar().evaluate(tuple)?;
            let b = c_next.evaluate(tuple)?.d();
            Ok(if total_d_sign(p) > 0 {
                a.add(&b)
            } else {
                a.sub(&b)
            })
        };
        let report = match mode {
            ClosednessMode::Symbolic { order } => {
                let tuple: Vec<JetDiffeo> = (0..p + 2)
                    .map(|r| JetDiffeo::generic(n, r, order))
                    .collect();
                let res = residual_at(&tuple)?;
                let degree_bound = residual_degree(&res);
                BidegreeReport {
                    level: p,
                    ok: res.is_zero(),
                    residual: if res.is_zero() {
                        None
                    } else {
                        Some(res.to_string())
                    },
                    points: 0,
                    degree_bound,
                }
            }
            ClosednessMode::Randomized { points, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (p as u64) << 8);
                let tuple: Vec<JetDiffeo> = (0..p + 2)
                    .map(|r| random_diffeo(n, 2, &mut rng, &format!("rand{}", r)))
                    .collect();
                let res = residual_at(&tuple)?;
                let degree_bound = residual_degree(&res);
                let mut ok = true;
                let mut witness = None;
                let mut evaluated = 0usize;
                while evaluated < points {
                    let point = random_x_point(n, &mut rng);
                    match evaluate_form_at(&res, &point) {
                        Err(CoreError::SingularPoint(_)) => continue, // resample
                        Err(e) => return Err(e),
                        Ok(vals) => {
                            evaluated += 1;
                            if vals.iter().any(|(_, v)| !v.eq(&Rational::from_integer(0.into()))) {
                                ok = false;
                                witness = Some(format!(
                                    "nonzero residual at {:?}: {:?}",
                                    point, vals
                                ));
                                break;
                            }
                        }
                    }
                }
                BidegreeReport {
                    level: p,
                    ok,
                    residual: witness,
                    points: evaluated,
                    degree_bound,
                }
            }
        };
        reports.push(report);
    }
    Ok(reports)
}

fn residual_degree(f: &BiForm) -> u64 {
    f.terms()
        .map(|(_, c)| c.numerator().total_degree())
        .max()
        .unwrap_or(0)
}

fn evaluate_form_at(
    f: &BiForm,
    point: &BTreeMap<Var, Rational>,
) -> Result<Vec<(String, Rational)>, CoreError> {
    let mut out = Vec::new();
    for (gens, c) in f.terms() {
        let v = c.evaluate(point)?;
        let key = gens
            .iter()
            .map(|g| g.to_string())
            .collect::<Vec<_>>()
            .join("^");
        out.push((key, v));
    }
    Ok(out)
}

/// Draw a random rational point for n x-variables plus anything else the
/// form needs (jets are not expected here).
pub fn resampling_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
