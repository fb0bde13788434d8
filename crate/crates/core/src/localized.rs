//! Localization of the polynomial ring at registered nonzero polynomials.
//!
//! Denominators are multisets of registered polynomials (Jacobian
//! determinants, det(y), their pullbacks).  Equality is decided by
//! cross-multiplication; gcd-style cancellation against registered factors
//! is a lazy, optional pass (`normalize`).

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Mutex;

use num_traits::{One, Zero};
use once_cell::sync::Lazy;

use crate::error::CoreError;
use crate::poly::{Poly, Rational, Var};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct DenId(u32);

struct Registry {
    polys: Vec<(Poly, String)>,
    index: HashMap<Poly, DenId>,
}

static REGISTRY: Lazy<Mutex<Registry>> = Lazy::new(|| {
    Mutex::new(Registry {
        polys: Vec::new(),
        index: HashMap::new(),
    })
});

/// Register a nonzero polynomial as a localization denominator.
/// Registration is idempotent on the polynomial's content.
pub fn register(p: &Poly, label: &str) -> Result<DenId, CoreError> {
    if p.is_zero() {
        return Err(CoreError::ZeroDenominator(label.to_string()));
    }
    let mut reg = REGISTRY.lock().unwrap();
    if let Some(&id) = reg.index.get(p) {
        return Ok(id);
    }
    let id = DenId(reg.polys.len() as u32);
    reg.polys.push((p.clone(), label.to_string()));
    reg.index.insert(p.clone(), id);
    Ok(id)
}

pub fn den_poly(id: DenId) -> Poly {
    REGISTRY.lock().unwrap().polys[id.0 as usize].0.clone()
}

pub fn den_label(id: DenId) -> String {
    REGISTRY.lock().unwrap().polys[id.0 as usize].1.clone()
}

/// Look up an already-registered polynomial.
pub fn lookup(p: &Poly) -> Option<DenId> {
    REGISTRY.lock().unwrap().index.get(p).copied()
}

/// Exact fraction num / prod_i den_i^{e_i} with registered denominators.
#[derive(Clone, Debug)]
pub struct LocalizedPoly {
    num: Poly,
    den: BTreeMap<DenId, u32>,
}

impl LocalizedPoly {
    pub fn zero() -> Self {
        LocalizedPoly {
            num: Poly::zero(),
            den: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Poly::one().into()
    }

    pub fn constant(c: Rational) -> Self {
        Poly::constant(c).into()
    }

    pub fn var(v: Var) -> Self {
        Poly::var(v).into()
    }

    pub fn from_parts(num: Poly, den: BTreeMap<DenId, u32>) -> Self {
        if num.is_zero() {
            return LocalizedPoly::zero();
        }
        let den = den.into_iter().filter(|&(_, e)| e > 0).collect();
        LocalizedPoly { num, den }
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominators(&self) -> &BTreeMap<DenId, u32> {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Denominator expanded to an explicit polynomial.
    pub fn den_expanded(&self) -> Poly {
        let mut d = Poly::one();
        for (&id, &e) in &self.den {
            d = d.mul(&den_poly(id).pow(e));
        }
        d
    }

    pub fn add(&self, other: &LocalizedPoly) -> LocalizedPoly {
        // common denominator: max exponent per registered factor
        let mut common: BTreeMap<DenId, u32> = self.den.clone();
        for (&id, &e) in &other.den {
            let slot = common.entry(id).or_insert(0);
            if *slot < e {
                *slot = e;
            }
        }
        let scale_up = |f: &LocalizedPoly| -> Poly {
            let mut n = f.num.clone();
            for (&id, &e) in &common {
                let have = f.den.get(&id).copied().unwrap_or(0);
                if e > have {
                    n = n.mul(&den_poly(id).pow(e - have));
                }
            }
            n
        };
        LocalizedPoly::from_parts(scale_up(self).add(&scale_up(other)), common)
    }

    pub fn neg(&self) -> LocalizedPoly {
        LocalizedPoly {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &LocalizedPoly) -> LocalizedPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &LocalizedPoly) -> LocalizedPoly {
        if self.is_zero() || other.is_zero() {
            return LocalizedPoly::zero();
        }
        let mut den = self.den.clone();
        for (&id, &e) in &other.den {
            *den.entry(id).or_insert(0) += e;
        }
        LocalizedPoly::from_parts(self.num.mul(&other.num), den)
    }

    pub fn scale(&self, c: &Rational) -> LocalizedPoly {
        LocalizedPoly::from_parts(self.num.scale(c), self.den.clone())
    }

    pub fn mul_poly(&self, p: &Poly) -> LocalizedPoly {
        LocalizedPoly::from_parts(self.num.mul(p), self.den.clone())
    }

    /// Divide by a registered denominator.
    pub fn div_registered(&self, id: DenId, e: u32) -> LocalizedPoly {
        let mut den = self.den.clone();
        *den.entry(id).or_insert(0) += e;
        LocalizedPoly::from_parts(self.num.clone(), den)
    }

    /// Integer power.  Negative exponents require the value to be invertible
    /// in the localized ring: a constant times a product of registered
    /// denominator powers.
    pub fn pow(&self, e: i64) -> Result<LocalizedPoly, CoreError> {
        if e >= 0 {
            let mut out = LocalizedPoly::one();
            for _ in 0..e {
                out = out.mul(self);
            }
            return Ok(out);
        }
        let inv = self.invert()?;
        inv.pow(-e)
    }

    /// Multiplicative inverse, defined only when the numerator factors over
    /// registered denominators (up to a constant).
    pub fn invert(&self) -> Result<LocalizedPoly, CoreError> {
        if self.is_zero() {
            return Err(CoreError::NotInvertible("zero".to_string()));
        }
        // numerator must be c * prod(registered^e)
        let mut rest = self.num.clone();
        let mut num_den: BTreeMap<DenId, u32> = BTreeMap::new();
        'outer: while rest.as_constant().is_none() {
            let ids: Vec<DenId> = {
                let reg = REGISTRY.lock().unwrap();
                (0..reg.polys.len() as u32).map(DenId).collect()
            };
            for id in ids {
                let d = den_poly(id);
                if d.as_constant().is_some() {
                    continue;
                }
                if let Some(q) = rest.div_exact(&d) {
                    *num_den.entry(id).or_insert(0) += 1;
                    rest = q;
                    continue 'outer;
                }
            }
            return Err(CoreError::NotInvertible(self.num.to_string()));
        }
        let c = rest.as_constant().unwrap();
        if c.is_zero() {
            return Err(CoreError::NotInvertible("zero".to_string()));
        }
        // inverse = den_expanded / (c * prod registered)
        let mut new_num = Poly::constant(Rational::one() / c);
        for (&id, &e) in &self.den {
            new_num = new_num.mul(&den_poly(id).pow(e));
        }
        Ok(LocalizedPoly::from_parts(new_num, num_den))
    }

    /// Lazy cancellation pass: cancel registered factors dividing the
    /// numerator exactly.
    pub fn normalize(&self) -> LocalizedPoly {
        let mut num = self.num.clone();
        let mut den = BTreeMap::new();
        for (&id, &e) in &self.den {
            let d = den_poly(id);
            let mut left = e;
            while left > 0 {
                match num.div_exact(&d) {
                    Some(q) => {
                        num = q;
                        left -= 1;
                    }
                    None => break,
                }
            }
            if left > 0 {
                den.insert(id, left);
            }
        }
        LocalizedPoly::from_parts(num, den)
    }

    pub fn partial(&self, v: Var) -> LocalizedPoly {
        // d(N / D) with D = prod d_i^{e_i}:
        //   N' / D  -  N * sum_i e_i d_i' / (d_i * D)
        let mut out = LocalizedPoly::from_parts(self.num.partial(v), self.den.clone());
        for (&id, &e) in &self.den {
            let d = den_poly(id);
            let dp = d.partial(v);
            if dp.is_zero() {
                continue;
            }
            let mut den = self.den.clone();
            *den.get_mut(&id).unwrap() += 1;
            let num = self.num.mul(&dp).scale(&Rational::from_integer((e as i64).into()));
            out = out.sub(&LocalizedPoly::from_parts(num, den));
        }
        out
    }

    /// Exact evaluation; errors when a registered denominator vanishes at
    /// the point, naming the offending determinant.
    pub fn evaluate(&self, point: &BTreeMap<Var, Rational>) -> Result<Rational, CoreError> {
        let mut val = self
            .num
            .eval(point)
            .map_err(|v| CoreError::UnboundVariable(v.to_string()))?;
        for (&id, &e) in &self.den {
            let dv = den_poly(id)
                .eval(point)
                .map_err(|v| CoreError::UnboundVariable(v.to_string()))?;
            if dv.is_zero() {
                return Err(CoreError::SingularPoint(den_label(id)));
            }
            for _ in 0..e {
                val /= &dv;
            }
        }
        Ok(val)
    }

    /// Substitute polynomials for variables.  Denominators are substituted
    /// and re-registered; a denominator collapsing to a constant is folded
    /// into the numerator, collapsing to zero is an error.
    pub fn subst(&self, map: &BTreeMap<Var, Poly>) -> Result<LocalizedPoly, CoreError> {
        let mut num = self.num.subst(map);
        let mut den = BTreeMap::new();
        for (&id, &e) in &self.den {
            let d2 = den_poly(id).subst(map);
            if let Some(c) = d2.as_constant() {
                if c.is_zero() {
                    return Err(CoreError::SingularPoint(den_label(id)));
                }
                let mut inv = Rational::one();
                for _ in 0..e {
                    inv /= &c;
                }
                num = num.scale(&inv);
            } else {
                // Factor the substituted denominator over already-registered
                // polynomials so later cancellations stay visible (e.g. a
                // pulled-back det(y) splits as det(phi') * det(y)).
                let mut rest = d2;
                let mut parts: Vec<DenId> = Vec::new();
                'factor: while rest.as_constant().is_none() {
                    let ids: Vec<DenId> = {
                        let reg = REGISTRY.lock().unwrap();
                        (0..reg.polys.len() as u32).map(DenId).collect()
                    };
                    for fid in ids {
                        let d = den_poly(fid);
                        if d.as_constant().is_some() {
                            continue;
                        }
                        if let Some(q) = rest.div_exact(&d) {
                            parts.push(fid);
                            rest = q;
                            continue 'factor;
                        }
                    }
                    break;
                }
                match rest.as_constant() {
                    Some(c) => {
                        let mut inv = Rational::one();
                        for _ in 0..e {
                            inv /= &c;
                        }
                        num = num.scale(&inv);
                    }
                    None => {
                        let label = format!("{}|subst", den_label(id));
                        parts.push(register(&rest, &label)?);
                    }
                }
                for fid in parts {
                    *den.entry(fid).or_insert(0) += e;
                }
            }
        }
        Ok(LocalizedPoly::from_parts(num, den))
    }

    pub fn depends_on(&self, pred: impl Fn(Var) -> bool + Copy) -> bool {
        if self.num.depends_on(pred) {
            return true;
        }
        self.den.keys().any(|&id| den_poly(id).depends_on(pred))
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut vs = self.num.vars();
        for &id in self.den.keys() {
            vs.extend(den_poly(id).vars());
        }
        vs.sort();
        vs.dedup();
        vs
    }

    pub fn as_constant(&self) -> Option<Rational> {
        let n = self.normalize();
        if n.den.is_empty() {
            n.num.as_constant()
        } else {
            None
        }
    }
}

impl From<Poly> for LocalizedPoly {
    fn from(num: Poly) -> Self {
        LocalizedPoly {
            num,
            den: BTreeMap::new(),
        }
    }
}

impl PartialEq for LocalizedPoly {
    fn eq(&self, other: &Self) -> bool {
        if self.den == other.den {
            return self.num == other.num;
        }
        // cross-multiply over the union denominator
        self.sub(other).num.is_zero()
    }
}

impl Eq for LocalizedPoly {}

impl fmt::Display for LocalizedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() {
            return write!(f, "({})", self.num);
        }
        write!(f, "(({}) / (", self.num)?;
        let mut first = true;
        for (&id, &e) in &self.den {
            if !first {
                write!(f, " * ")?;
            }
            first = false;
            if e == 1 {
                write!(f, "({})", den_poly(id))?;
            } else {
                write!(f, "({})^{}", den_poly(id), e)?;
            }
        }
        write!(f, "))")
    }
}
