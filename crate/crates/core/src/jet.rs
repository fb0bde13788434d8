//! Polynomial diffeomorphisms of R^n: Jacobians, composition, prolongation
//! to the frame bundle, and the jet coordinates gamma^i_{jk l1..lr}(phi).
//!
//! Components may carry symbolic jet coefficients `J(a;i;mu)`, which is how
//! generic diffeomorphisms enter the symbolic verification mode.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::localized::{register, DenId, LocalizedPoly};
use crate::poly::{rat_int, Monomial, MultiIdx, Poly, Rational, Var};

/// Polynomial diffeomorphism of R^n with invertible linear part.
#[derive(Clone, Debug, PartialEq)]
pub struct JetDiffeo {
    n: u8,
    /// components[i] is phi^{i+1} as a polynomial in x (and jet symbols).
    components: Vec<Poly>,
    det_id: DenId,
    label: String,
}

/// n x n matrix with localized-polynomial entries.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMatrix {
    n: u8,
    entries: Vec<LocalizedPoly>, // row-major
}

impl PolyMatrix {
    pub fn new(n: u8, entries: Vec<LocalizedPoly>) -> Self {
        assert_eq!(entries.len(), (n as usize) * (n as usize));
        PolyMatrix { n, entries }
    }

    pub fn identity(n: u8) -> Self {
        let mut entries = vec![LocalizedPoly::zero(); (n as usize) * (n as usize)];
        for i in 0..n as usize {
            entries[i * n as usize + i] = LocalizedPoly::one();
        }
        PolyMatrix { n, entries }
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn at(&self, i: u8, j: u8) -> &LocalizedPoly {
        // 1-based indices
        &self.entries[((i - 1) as usize) * self.n as usize + (j - 1) as usize]
    }

    pub fn set(&mut self, i: u8, j: u8, v: LocalizedPoly) {
        self.entries[((i - 1) as usize) * self.n as usize + (j - 1) as usize] = v;
    }

    pub fn mul(&self, other: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = PolyMatrix::new(n, vec![LocalizedPoly::zero(); (n as usize).pow(2)]);
        for i in 1..=n {
            for j in 1..=n {
                let mut acc = LocalizedPoly::zero();
                for k in 1..=n {
                    acc = acc.add(&self.at(i, k).mul(other.at(k, j)));
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn det(&self) -> LocalizedPoly {
        det_by_expansion(self.n, &|i, j| self.at(i, j).clone())
    }

    /// Adjugate matrix (transpose of cofactors), so adj * M = det * I.
    pub fn adjugate(&self) -> PolyMatrix {
        let n = self.n;
        let mut out = PolyMatrix::new(n, vec![LocalizedPoly::zero(); (n as usize).pow(2)]);
        for i in 1..=n {
            for j in 1..=n {
                let minor = det_by_expansion(n - 1, &|r, c| {
                    let rr = if r < j { r } else { r + 1 };
                    let cc = if c < i { c } else { c + 1 };
                    self.at(rr, cc).clone()
                });
                let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
                out.set(i, j, minor.scale(&rat_int(sign)));
            }
        }
        out
    }
}

fn det_by_expansion(n: u8, at: &dyn Fn(u8, u8) -> LocalizedPoly) -> LocalizedPoly {
    if n == 0 {
        return LocalizedPoly::one();
    }
    if n == 1 {
        return at(1, 1);
    }
    let mut acc = LocalizedPoly::zero();
    for j in 1..=n {
        let sub = det_by_expansion(n - 1, &|r, c| {
            let cc = if c < j { c } else { c + 1 };
            at(r + 1, cc)
        });
        let term = at(1, j).mul(&sub);
        if j % 2 == 1 {
            acc = acc.add(&term);
        } else {
            acc = acc.sub(&term);
        }
    }
    acc
}

fn poly_det(n: u8, at: &dyn Fn(u8, u8) -> Poly) -> Poly {
    if n == 1 {
        return at(1, 1);
    }
    let mut acc = Poly::zero();
    for j in 1..=n {
        let sub = poly_det(n - 1, &|r, c| {
            let cc = if c < j { c } else { c + 1 };
            at(r + 1, cc)
        });
        let term = at(1, j).mul(&sub);
        acc = if j % 2 == 1 { acc.add(&term) } else { acc.sub(&term) };
    }
    acc
}

impl JetDiffeo {
    /// Build from explicit components; registers det(phi') for localization.
    pub fn new(n: u8, components: Vec<Poly>, label: &str) -> Result<Self, CoreError> {
        if components.len() != n as usize {
            return Err(CoreError::DimensionMismatch(format!(
                "expected {} components, got {}",
                n,
                components.len()
            )));
        }
        // Jacobian determinant as a plain polynomial
        let det = poly_det(n, &|i, j| components[(i - 1) as usize].partial(Var::X(j)));
        if det.is_zero() {
            return Err(CoreError::SingularLinearPart);
        }
        // linear part must be invertible: det of the x-linear coefficients,
        // i.e. det(phi') at x = 0 with jet symbols left in place
        let mut at_zero = BTreeMap::new();
        for i in 1..=n {
            at_zero.insert(Var::X(i), Poly::zero());
        }
        let lin_det = det.subst(&at_zero);
        if lin_det.is_zero() {
            return Err(CoreError::SingularLinearPart);
        }
        let det_id = register(&det, &format!("det({}')", label))?;
        Ok(JetDiffeo {
            n,
            components,
            det_id,
            label: label.to_string(),
        })
    }

    /// The identity map of R^n.
    pub fn identity(n: u8) -> Self {
        let components = (1..=n).map(|i| Poly::var(Var::X(i))).collect();
        JetDiffeo::new(n, components, "id").unwrap()
    }

    /// From a coefficient table c(i; mu), mu a monomial multi-index in x.
    pub fn from_coeffs(
        n: u8,
        coeffs: &[Vec<(Vec<u32>, Rational)>],
        label: &str,
    ) -> Result<Self, CoreError> {
        let mut components = Vec::with_capacity(n as usize);
        for comp in coeffs {
            let mut p = Poly::zero();
            for (mu, c) in comp {
                if mu.len() != n as usize {
                    return Err(CoreError::DimensionMismatch(
                        "monomial exponent arity != n".into(),
                    ));
                }
                let pairs = mu
                    .iter()
                    .enumerate()
                    .map(|(i, &e)| (Var::X(i as u8 + 1), e))
                    .collect();
                p.add_term(Monomial::from_pairs(pairs), c.clone());
            }
            components.push(p);
        }
        JetDiffeo::new(n, components, label)
    }

    /// Generic diffeomorphism with symbolic jets up to the given order:
    /// phi^i = sum_{1 <= |mu| <= order} J(a;i;mu) x^mu / mu!.
    pub fn generic(n: u8, diffeo_index: u8, order: u8) -> Self {
        let mut components = Vec::new();
        for i in 1..=n {
            let mut p = Poly::zero();
            for mu in multi_indices(n, order) {
                let sym = Var::Jet {
                    diffeo: diffeo_index,
                    comp: i,
                    mu,
                };
                let mut mono = vec![(sym, 1)];
                for &d in mu.dirs() {
                    mono.push((Var::X(d), 1));
                }
                let coeff = Rational::one() / mu.factorial();
                p.add_term(Monomial::from_pairs(mono), coeff);
            }
            components.push(p);
        }
        JetDiffeo::new(n, components, &format!("generic{}", diffeo_index)).unwrap()
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn component(&self, i: u8) -> &Poly {
        &self.components[(i - 1) as usize]
    }

    pub fn components(&self) -> &[Poly] {
        &self.components
    }

    pub fn det_id(&self) -> DenId {
        self.det_id
    }

    pub fn is_identity(&self) -> bool {
        (1..=self.n).all(|i| self.component(i) == &Poly::var(Var::X(i)))
    }

    /// Jacobian matrix (d_j phi^i) as plain polynomials.
    pub fn jacobian(&self) -> PolyMatrix {
        let n = self.n;
        let mut entries = Vec::with_capacity((n as usize).pow(2));
        for i in 1..=n {
            for j in 1..=n {
                entries.push(LocalizedPoly::from(self.component(i).partial(Var::X(j))));
            }
        }
        PolyMatrix::new(n, entries)
    }

    /// Inverse Jacobian adj(phi')/det(phi').
    pub fn jacobian_inv(&self) -> PolyMatrix {
        let adj = self.jacobian().adjugate();
        let n = self.n;
        let mut out = PolyMatrix::new(n, vec![LocalizedPoly::zero(); (n as usize).pow(2)]);
        for i in 1..=n {
            for j in 1..=n {
                out.set(i, j, adj.at(i, j).div_registered(self.det_id, 1));
            }
        }
        out
    }

    /// Exact composition self . other (apply `other` first).
    pub fn compose(&self, other: &JetDiffeo) -> Result<JetDiffeo, CoreError> {
        if self.n != other.n {
            return Err(CoreError::DimensionMismatch("compose: n differs".into()));
        }
        let map = other.subst_map();
        let components = self
            .components
            .iter()
            .map(|c| c.subst(&map))
            .collect();
        JetDiffeo::new(
            self.n,
            components,
            &format!("({}).({})", self.label, other.label),
        )
    }

    /// Substitution map x^i -> phi^i.
    pub fn subst_map(&self) -> BTreeMap<Var, Poly> {
        (1..=self.n)
            .map(|i| (Var::X(i), self.component(i).clone()))
            .collect()
    }

    /// Substitution map of the prolongation (x, y) -> (phi(x), phi'(x) y).
    pub fn prolong_map(&self) -> BTreeMap<Var, Poly> {
        let mut map = self.subst_map();
        let jac = self.jacobian();
        for i in 1..=self.n {
            for j in 1..=self.n {
                let mut img = Poly::zero();
                for mu in 1..=self.n {
                    img = img.add(&jac.at(i, mu).numerator().mul(&Poly::var(Var::Y(mu, j))));
                }
                map.insert(Var::Y(i, j), img);
            }
        }
        map
    }

    /// gamma^i_{jk l1..lr}(phi), the jet coordinate of Eq-style
    /// (y^{-1} phi'^{-1} d_mu phi' y)^i_j y^mu_k, with higher orders by
    /// repeated application of the horizontal fields X_l = y^m_l d/dx^m.
    /// With `frame` false the result is evaluated at y = 1.
    pub fn gamma_coeff(
        &self,
        i: u8,
        j: u8,
        k: u8,
        ls: &[u8],
        frame: bool,
    ) -> Result<LocalizedPoly, CoreError> {
        let mut g = self.gamma_base_frame(i, j, k)?;
        for &l in ls {
            g = horizontal_apply(self.n, l, &g);
        }
        if frame {
            Ok(g)
        } else {
            let map = y_identity_map(self.n);
            g.subst(&map)
        }
    }

    /// The frame-mode gamma^i_{jk}(phi)(x, y).
    fn gamma_base_frame(&self, i: u8, j: u8, k: u8) -> Result<LocalizedPoly, CoreError> {
        let n = self.n;
        let jac_inv = self.jacobian_inv();
        let jac = self.jacobian();
        let y_inv = y_inverse(n)?;
        let mut acc = LocalizedPoly::zero();
        // (y^{-1} . phi'^{-1} . d_mu phi' . y)^i_j y^mu_k
        for mu in 1..=n {
            // d_mu phi' entrywise
            let mut inner = PolyMatrix::new(n, vec![LocalizedPoly::zero(); (n as usize).pow(2)]);
            for a in 1..=n {
                for b in 1..=n {
                    inner.set(
                        a,
                        b,
                        LocalizedPoly::from(jac.at(a, b).numerator().partial(Var::X(mu))),
                    );
                }
            }
            let m = y_inv.mul(&jac_inv).mul(&inner).mul(&y_matrix(n));
            acc = acc.add(&m.at(i, j).mul(&LocalizedPoly::var(Var::Y(mu, k))));
        }
        Ok(acc)
    }

    /// Matrix of 1-form coefficients: Gamma(phi)^i_j = (phi'^{-1} d_mu phi')^i_j dx^mu;
    /// this returns the coefficient of dx^mu at entry (i, j).
    pub fn gamma_form_coeff(&self, i: u8, j: u8, mu: u8) -> LocalizedPoly {
        let jac_inv = self.jacobian_inv();
        let jac = self.jacobian();
        let n = self.n;
        let mut acc = LocalizedPoly::zero();
        for s in 1..=n {
            let d = jac.at(s, j).numerator().partial(Var::X(mu));
            acc = acc.add(&jac_inv.at(i, s).mul_poly(&d));
        }
        acc
    }
}

/// Apply the horizontal vector field X_l = y^m_l d/dx^m.
pub fn horizontal_apply(n: u8, l: u8, f: &LocalizedPoly) -> LocalizedPoly {
    let mut acc = LocalizedPoly::zero();
    for m in 1..=n {
        acc = acc.add(&f.partial(Var::X(m)).mul(&LocalizedPoly::var(Var::Y(m, l))));
    }
    acc
}

/// Apply the vertical vector field Y^i_j = y^m_i d/dy^m_j.
pub fn vertical_apply(n: u8, i: u8, j: u8, f: &LocalizedPoly) -> LocalizedPoly {
    let mut acc = LocalizedPoly::zero();
    for m in 1..=n {
        acc = acc.add(&f.partial(Var::Y(m, j)).mul(&LocalizedPoly::var(Var::Y(m, i))));
    }
    acc
}

pub fn y_matrix(n: u8) -> PolyMatrix {
    let mut m = PolyMatrix::new(n, vec![LocalizedPoly::zero(); (n as usize).pow(2)]);
    for i in 1..=n {
        for j in 1..=n {
            m.set(i, j, LocalizedPoly::var(Var::Y(i, j)));
        }
    }
    m
}

/// det(y), registered once per dimension.
pub fn det_y_id(n: u8) -> Result<DenId, CoreError> {
    let dety = poly_det(n, &|i, j| Poly::var(Var::Y(i, j)));
    register(&dety, &format!("det(y)[n={}]", n))
}

/// y^{-1} = adj(y)/det(y).
pub fn y_inverse(n: u8) -> Result<PolyMatrix, CoreError> {
    let id = det_y_id(n)?;
    let adj = y_matrix(n).adjugate();
    let mut out = PolyMatrix::new(n, vec![LocalizedPoly::zero(); (n as usize).pow(2)]);
    for i in 1..=n {
        for j in 1..=n {
            out.set(i, j, adj.at(i, j).div_registered(id, 1));
        }
    }
    Ok(out)
}

/// Substitution y^i_j -> delta^i_j.
pub fn y_identity_map(n: u8) -> BTreeMap<Var, Poly> {
    let mut map = BTreeMap::new();
    for i in 1..=n {
        for j in 1..=n {
            map.insert(Var::Y(i, j), if i == j { Poly::one() } else { Poly::zero() });
        }
    }
    map
}

/// All multi-indices over directions 1..=n with 1 <= order <= max_order.
pub fn multi_indices(n: u8, max_order: u8) -> Vec<MultiIdx> {
    let mut out = Vec::new();
    let mut stack: Vec<Vec<u8>> = vec![vec![]];
    for _ in 0..max_order {
        let mut next = Vec::new();
        for prefix in &stack {
            let start = prefix.last().copied().unwrap_or(1);
            for d in start..=n {
                let mut m = prefix.clone();
                m.push(d);
                out.push(MultiIdx::new(&m));
                next.push(m);
            }
        }
        stack = next;
    }
    out
}

// --- JSON schema -----------------------------------------------------------

#[derive(Serialize, Deserialize)]
pub struct DiffeoJson {
    pub n: u8,
    pub components: Vec<Vec<TermJson>>,
}

#[derive(Serialize, Deserialize)]
pub struct TermJson {
    pub monomial: Vec<u32>,
    pub coeff: String,
}

fn parse_rational(s: &str) -> Result<Rational, CoreError> {
    let parts: Vec<&str> = s.split('/').collect();
    let bad = || CoreError::Parse(format!("bad rational `{}`", s));
    match parts.len() {
        1 => parts[0]
            .trim()
            .parse::<num_bigint::BigInt>()
            .map(Rational::from_integer)
            .map_err(|_| bad()),
        2 => {
            let n = parts[0]
                .trim()
                .parse::<num_bigint::BigInt>()
                .map_err(|_| bad())?;
            let d = parts[1]
                .trim()
                .parse::<num_bigint::BigInt>()
                .map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        _ => Err(bad()),
    }
}

impl JetDiffeo {
    pub fn from_json(json: &DiffeoJson, label: &str) -> Result<Self, CoreError> {
        let mut coeffs = Vec::new();
        for comp in &json.components {
            let mut terms = Vec::new();
            for t in comp {
                terms.push((t.monomial.clone(), parse_rational(&t.coeff)?));
            }
            coeffs.push(terms);
        }
        JetDiffeo::from_coeffs(json.n, &coeffs, label)
    }

    pub fn to_json(&self) -> DiffeoJson {
        let n = self.n;
        let components = self
            .components
            .iter()
            .map(|p| {
                p.terms()
                    .map(|(m, c)| {
                        let mut exps = vec![0u32; n as usize];
                        for &(v, e) in m.pairs() {
                            if let Var::X(i) = v {
                                exps[(i - 1) as usize] = e;
                            }
                        }
                        TermJson {
                            monomial: exps,
                            coeff: if c.denom().is_one() {
                                format!("{}", c.numer())
                            } else {
                                format!("{}/{}", c.numer(), c.denom())
                            },
                        }
                    })
                    .collect()
            })
            .collect();
        DiffeoJson { n, components }
    }
}
