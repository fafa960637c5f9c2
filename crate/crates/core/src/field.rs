//! Exact coefficient fields.
//!
//! Three kinds of field are supported, all with exact arithmetic and
//! canonical representations:
//!
//! - the rationals `Q` (arbitrary-precision),
//! - number-field towers over `Q` of depth at most 2 and total degree at
//!   most 8, given by monic minimal polynomials,
//! - rational function fields `Q(t)` and `Q(t,tstar)` (or the same over a
//!   number field), represented as reduced fractions of sparse polynomials
//!   in the transcendentals.
//!
//! Elements are immutable; a [`Field`] is a cheaply clonable context handle.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::poly::{self, MultiPoly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("minimal polynomial for {0} is reducible over its level")]
    ReducibleMinimalPolynomial(String),
    #[error("minimal polynomial for {0} must be monic of degree >= 2")]
    BadMinimalPolynomial(String),
    #[error("cannot validate irreducibility of the minimal polynomial for {0}; pass assume_irreducible")]
    UnvalidatedMinimalPolynomial(String),
    #[error("tower depth is limited to 2 and total degree to 8")]
    TowerTooLarge,
    #[error("at most two transcendentals are supported")]
    TooManyTranscendentals,
    #[error("function fields take Q or a number field as base")]
    BadFunctionFieldBase,
    #[error("division by zero")]
    DivisionByZero,
    #[error("non-invertible element {0}: a minimal polynomial taken on trust is reducible")]
    NotInvertible(String),
    #[error("cannot lift element {0} into field {1}")]
    BadLift(String, String),
    #[error("duplicate generator name {0}")]
    DuplicateGenerator(String),
}

/// One extension step of a number-field tower: a generator name and the
/// non-leading coefficients `c_0..c_{d-1}` of its monic minimal polynomial
/// `x^d + c_{d-1} x^{d-1} + ... + c_0` over the level below.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Level {
    name: String,
    minpoly: Vec<AlgRep>,
}

impl Level {
    fn degree(&self) -> usize {
        self.minpoly.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Kind {
    /// Number-field tower over Q; an empty tower is Q itself.
    Tower { levels: Vec<Level> },
    /// Rational functions in `tvars` over a tower base.
    Function { base: Field, tvars: Arc<Vec<String>> },
}

#[derive(Debug, PartialEq, Eq)]
pub struct FieldInner {
    kind: Kind,
}

/// A coefficient field context. Clones share the same descriptor.
#[derive(Debug, Clone)]
pub struct Field(Arc<FieldInner>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}
impl Eq for Field {}

/// Canonical representation of a tower element: depth 0 is a reduced
/// rational; depth k is the coefficient vector (length = level degree) of a
/// residue polynomial in the level-k generator, entries one level down.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum AlgRep {
    Rat(BigRational),
    Ext(Vec<AlgRep>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Rep {
    Alg(AlgRep),
    /// Reduced fraction of polynomials in the transcendentals over the base
    /// tower; gcd is 1 and the denominator's leading graded-lex coefficient
    /// is 1.
    Fun { num: MultiPoly, den: MultiPoly },
}

/// An element of a [`Field`]. Representation is canonical, so equality is
/// structural and representation-independent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldElement {
    ctx: Field,
    rep: Rep,
}

// ---------------------------------------------------------------------------
// tower (AlgRep) arithmetic
// ---------------------------------------------------------------------------

fn alg_zero(levels: &[Level]) -> AlgRep {
    match levels.split_last() {
        None => AlgRep::Rat(BigRational::zero()),
        Some((top, lower)) => AlgRep::Ext(vec![alg_zero(lower); top.degree()]),
    }
}

fn alg_from_rat(levels: &[Level], q: BigRational) -> AlgRep {
    match levels.split_last() {
        None => AlgRep::Rat(q),
        Some((top, lower)) => {
            let mut v = vec![alg_zero(lower); top.degree()];
            v[0] = alg_from_rat(lower, q);
            AlgRep::Ext(v)
        }
    }
}

fn alg_is_zero(a: &AlgRep) -> bool {
    match a {
        AlgRep::Rat(q) => q.is_zero(),
        AlgRep::Ext(v) => v.iter().all(alg_is_zero),
    }
}

fn alg_add(levels: &[Level], a: &AlgRep, b: &AlgRep) -> AlgRep {
    match (levels.split_last(), a, b) {
        (None, AlgRep::Rat(x), AlgRep::Rat(y)) => AlgRep::Rat(x + y),
        (Some((_, lower)), AlgRep::Ext(va), AlgRep::Ext(vb)) => AlgRep::Ext(
            va.iter()
                .zip(vb.iter())
                .map(|(x, y)| alg_add(lower, x, y))
                .collect(),
        ),
        _ => unreachable!("malformed tower element"),
    }
}

fn alg_neg(levels: &[Level], a: &AlgRep) -> AlgRep {
    match (levels.split_last(), a) {
        (None, AlgRep::Rat(x)) => AlgRep::Rat(-x),
        (Some((_, lower)), AlgRep::Ext(v)) => {
            AlgRep::Ext(v.iter().map(|x| alg_neg(lower, x)).collect())
        }
        _ => unreachable!("malformed tower element"),
    }
}

fn alg_sub(levels: &[Level], a: &AlgRep, b: &AlgRep) -> AlgRep {
    alg_add(levels, a, &alg_neg(levels, b))
}

fn alg_mul(levels: &[Level], a: &AlgRep, b: &AlgRep) -> AlgRep {
    match (levels.split_last(), a, b) {
        (None, AlgRep::Rat(x), AlgRep::Rat(y)) => AlgRep::Rat(x * y),
        (Some((top, lower)), AlgRep::Ext(va), AlgRep::Ext(vb)) => {
            let d = top.degree();
            let mut conv = vec![alg_zero(lower); 2 * d - 1];
            for (i, x) in va.iter().enumerate() {
                if alg_is_zero(x) {
                    continue;
                }
                for (j, y) in vb.iter().enumerate() {
                    if alg_is_zero(y) {
                        continue;
                    }
                    let p = alg_mul(lower, x, y);
                    conv[i + j] = alg_add(lower, &conv[i + j], &p);
                }
            }
            // reduce modulo the monic minimal polynomial
            for i in (d..2 * d - 1).rev() {
                if alg_is_zero(&conv[i]) {
                    continue;
                }
                let c = std::mem::replace(&mut conv[i], alg_zero(lower));
                for (j, m) in top.minpoly.iter().enumerate() {
                    if alg_is_zero(m) {
                        continue;
                    }
                    let p = alg_mul(lower, &c, m);
                    conv[i - d + j] = alg_sub(lower, &conv[i - d + j], &p);
                }
            }
            conv.truncate(d);
            AlgRep::Ext(conv)
        }
        _ => unreachable!("malformed tower element"),
    }
}

// Variable-length polynomials over a tower level, used for the extended
// Euclidean inverse. No trailing zeros.

fn pv_norm(lower: &[Level], mut v: Vec<AlgRep>) -> Vec<AlgRep> {
    let _ = lower;
    while v.last().map_or(false, alg_is_zero) {
        v.pop();
    }
    v
}

fn pv_sub(lower: &[Level], a: &[AlgRep], b: &[AlgRep]) -> Vec<AlgRep> {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i).cloned().unwrap_or_else(|| alg_zero(lower));
        let y = b.get(i).cloned().unwrap_or_else(|| alg_zero(lower));
        out.push(alg_sub(lower, &x, &y));
    }
    pv_norm(lower, out)
}

fn pv_mul(lower: &[Level], a: &[AlgRep], b: &[AlgRep]) -> Vec<AlgRep> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![alg_zero(lower); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if alg_is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if alg_is_zero(y) {
                continue;
            }
            let p = alg_mul(lower, x, y);
            out[i + j] = alg_add(lower, &out[i + j], &p);
        }
    }
    pv_norm(lower, out)
}

fn pv_scale(lower: &[Level], a: &[AlgRep], c: &AlgRep) -> Vec<AlgRep> {
    pv_norm(lower, a.iter().map(|x| alg_mul(lower, x, c)).collect())
}

/// Division with remainder of polynomials over the level below; the divisor
/// must be nonzero. Fails only if a leading coefficient is not invertible,
/// which signals a reducible trusted minimal polynomial.
fn pv_divrem(
    lower: &[Level],
    a: &[AlgRep],
    b: &[AlgRep],
) -> Result<(Vec<AlgRep>, Vec<AlgRep>), ()> {
    let db = b.len() - 1;
    let lb_inv = alg_inv(lower, &b[db]).ok_or(())?;
    let mut rem: Vec<AlgRep> = a.to_vec();
    let mut quo: Vec<AlgRep> = Vec::new();
    loop {
        rem = pv_norm(lower, rem);
        if rem.len() < b.len() {
            return Ok((pv_norm(lower, quo), rem));
        }
        let dr = rem.len() - 1;
        let c = alg_mul(lower, &rem[dr], &lb_inv);
        let shift = dr - db;
        if quo.len() <= shift {
            quo.resize(shift + 1, alg_zero(lower));
        }
        quo[shift] = alg_add(lower, &quo[shift], &c);
        for (j, m) in b.iter().enumerate() {
            let p = alg_mul(lower, &c, m);
            rem[shift + j] = alg_sub(lower, &rem[shift + j], &p);
        }
    }
}

/// Multiplicative inverse at the given tower, `None` for zero.
fn alg_inv(levels: &[Level], a: &AlgRep) -> Option<AlgRep> {
    if alg_is_zero(a) {
        return None;
    }
    match (levels.split_last(), a) {
        (None, AlgRep::Rat(q)) => Some(AlgRep::Rat(q.recip())),
        (Some((top, lower)), AlgRep::Ext(va)) => {
            let d = top.degree();
            let a_poly = pv_norm(lower, va.clone());
            if a_poly.len() == 1 {
                let mut v = vec![alg_zero(lower); d];
                v[0] = alg_inv(lower, &a_poly[0])?;
                return Some(AlgRep::Ext(v));
            }
            // extended Euclid between the minimal polynomial and a_poly,
            // tracking only the a-side cofactor
            let mut m_full = top.minpoly.clone();
            m_full.push(alg_from_rat(lower, BigRational::one()));
            let mut r0 = m_full;
            let mut r1 = a_poly;
            let mut s0: Vec<AlgRep> = Vec::new();
            let mut s1: Vec<AlgRep> = vec![alg_from_rat(lower, BigRational::one())];
            loop {
                let (q, r) = pv_divrem(lower, &r0, &r1).ok()?;
                let s = pv_sub(lower, &s0, &pv_mul(lower, &q, &s1));
                r0 = std::mem::replace(&mut r1, r);
                s0 = std::mem::replace(&mut s1, s);
                if r1.is_empty() {
                    // gcd(r0) is nonconstant: minimal polynomial was reducible
                    if r0.len() == 1 {
                        let c_inv = alg_inv(lower, &r0[0])?;
                        let mut out = pv_scale(lower, &s0, &c_inv);
                        out.resize(d, alg_zero(lower));
                        return Some(AlgRep::Ext(out));
                    }
                    return None;
                }
                if r1.len() == 1 {
                    let c_inv = alg_inv(lower, &r1[0])?;
                    let mut out = pv_scale(lower, &s1, &c_inv);
                    out.resize(d, alg_zero(lower));
                    return Some(AlgRep::Ext(out));
                }
            }
        }
        _ => unreachable!("malformed tower element"),
    }
}

/// Flattens a tower element to its Q-coordinate vector (length = product of
/// the level degrees).
fn alg_flatten(levels: &[Level], a: &AlgRep, out: &mut Vec<BigRational>) {
    match (levels.split_last(), a) {
        (None, AlgRep::Rat(q)) => out.push(q.clone()),
        (Some((_, lower)), AlgRep::Ext(v)) => {
            for x in v {
                alg_flatten(lower, x, out);
            }
        }
        _ => unreachable!("malformed tower element"),
    }
}

// ---------------------------------------------------------------------------
// Field construction and element constructors
// ---------------------------------------------------------------------------

impl Field {
    pub fn rationals() -> Field {
        Field(Arc::new(FieldInner {
            kind: Kind::Tower { levels: Vec::new() },
        }))
    }

    fn tower_levels(&self) -> Option<&[Level]> {
        match &self.0.kind {
            Kind::Tower { levels } => Some(levels),
            Kind::Function { .. } => None,
        }
    }

    pub fn is_rationals(&self) -> bool {
        matches!(&self.0.kind, Kind::Tower { levels } if levels.is_empty())
    }

    pub fn is_tower(&self) -> bool {
        matches!(&self.0.kind, Kind::Tower { .. })
    }

    pub fn is_function_field(&self) -> bool {
        matches!(&self.0.kind, Kind::Function { .. })
    }

    /// The base tower of a function field, or self for a tower.
    pub fn tower_base(&self) -> Field {
        match &self.0.kind {
            Kind::Tower { .. } => self.clone(),
            Kind::Function { base, .. } => base.clone(),
        }
    }

    pub fn transcendental_names(&self) -> Vec<String> {
        match &self.0.kind {
            Kind::Tower { .. } => Vec::new(),
            Kind::Function { tvars, .. } => tvars.as_ref().clone(),
        }
    }

    /// Names of all adjoined generators (tower generators, then
    /// transcendentals).
    pub fn generator_names(&self) -> Vec<String> {
        match &self.0.kind {
            Kind::Tower { levels } => levels.iter().map(|l| l.name.clone()).collect(),
            Kind::Function { base, tvars } => {
                let mut v = base.generator_names();
                v.extend(tvars.iter().cloned());
                v
            }
        }
    }

    /// Total degree of the tower over Q (1 for Q itself).
    pub fn tower_degree(&self) -> usize {
        match &self.0.kind {
            Kind::Tower { levels } => levels.iter().map(Level::degree).product::<usize>().max(1),
            Kind::Function { base, .. } => base.tower_degree(),
        }
    }

    /// Number of tower levels (0 for Q).
    pub fn tower_depth(&self) -> usize {
        match &self.0.kind {
            Kind::Tower { levels } => levels.len(),
            Kind::Function { base, .. } => base.tower_depth(),
        }
    }

    /// The subtower consisting of the first `k` levels.
    pub fn tower_prefix(&self, k: usize) -> Field {
        let levels = self.tower_levels().expect("tower field");
        assert!(k <= levels.len());
        Field(Arc::new(FieldInner {
            kind: Kind::Tower {
                levels: levels[..k].to_vec(),
            },
        }))
    }

    /// Degree of tower level `k` (0-based).
    pub fn level_degree(&self, k: usize) -> usize {
        self.tower_levels().expect("tower field")[k].degree()
    }

    /// Full monic coefficient list of level k's minimal polynomial, as
    /// elements of the prefix subtower.
    pub fn level_minpoly(&self, k: usize) -> Vec<FieldElement> {
        let levels = self.tower_levels().expect("tower field");
        let prefix = self.tower_prefix(k);
        let mut out: Vec<FieldElement> = levels[k]
            .minpoly
            .iter()
            .map(|c| FieldElement {
                ctx: prefix.clone(),
                rep: Rep::Alg(c.clone()),
            })
            .collect();
        out.push(prefix.one());
        out
    }

    /// Coefficient vector of a tower element over powers of the top
    /// generator, as elements of the prefix subtower. Requires depth >= 1.
    pub fn top_coefficients(&self, e: &FieldElement) -> Vec<FieldElement> {
        assert_eq!(&e.ctx, self);
        let levels = self.tower_levels().expect("tower field");
        assert!(!levels.is_empty(), "top_coefficients needs an extension");
        let prefix = self.tower_prefix(levels.len() - 1);
        match &e.rep {
            Rep::Alg(AlgRep::Ext(v)) => v
                .iter()
                .map(|c| FieldElement {
                    ctx: prefix.clone(),
                    rep: Rep::Alg(c.clone()),
                })
                .collect(),
            _ => unreachable!("extension elements have Ext representation"),
        }
    }

    /// Q-coordinate vector of a tower element (length = tower degree).
    pub fn flatten_to_q(&self, e: &FieldElement) -> Vec<BigRational> {
        assert_eq!(&e.ctx, self);
        let levels = self.tower_levels().expect("tower field");
        let mut out = Vec::new();
        match &e.rep {
            Rep::Alg(a) => alg_flatten(levels, a, &mut out),
            Rep::Fun { .. } => panic!("flatten_to_q requires a tower element"),
        }
        out
    }

    /// Extends a tower by a generator with the given monic minimal
    /// polynomial, supplied as its full coefficient list `c_0..c_d` over
    /// `self` (constant term first, leading coefficient last).
    pub fn extend(
        &self,
        name: &str,
        minpoly_coeffs: &[FieldElement],
        assume_irreducible: bool,
    ) -> Result<Field, FieldError> {
        let levels = self
            .tower_levels()
            .ok_or(FieldError::BadFunctionFieldBase)?;
        if levels.len() >= 2 {
            return Err(FieldError::TowerTooLarge);
        }
        if self.generator_names().iter().any(|n| n == name) {
            return Err(FieldError::DuplicateGenerator(name.to_string()));
        }
        let deg = minpoly_coeffs.len().saturating_sub(1);
        if deg < 2 {
            return Err(FieldError::BadMinimalPolynomial(name.to_string()));
        }
        let lead = &minpoly_coeffs[deg];
        if !lead.is_one() {
            return Err(FieldError::BadMinimalPolynomial(name.to_string()));
        }
        if self.tower_degree() * deg > 8 {
            return Err(FieldError::TowerTooLarge);
        }
        let coeffs: Vec<AlgRep> = minpoly_coeffs[..deg]
            .iter()
            .map(|e| match (&e.ctx == self, &e.rep) {
                (true, Rep::Alg(a)) => Ok(a.clone()),
                _ => Err(FieldError::BadMinimalPolynomial(name.to_string())),
            })
            .collect::<Result<_, _>>()?;
        validate_irreducible(levels, name, &coeffs, assume_irreducible)?;
        let mut new_levels = levels.to_vec();
        new_levels.push(Level {
            name: name.to_string(),
            minpoly: coeffs,
        });
        Ok(Field(Arc::new(FieldInner {
            kind: Kind::Tower { levels: new_levels },
        })))
    }

    /// Builds the rational function field over `self` in the given
    /// transcendental variable names.
    pub fn function_field(&self, tvars: &[&str]) -> Result<Field, FieldError> {
        if !self.is_tower() {
            return Err(FieldError::BadFunctionFieldBase);
        }
        if tvars.is_empty() || tvars.len() > 2 {
            return Err(FieldError::TooManyTranscendentals);
        }
        let mut names = Vec::new();
        for v in tvars {
            if self.generator_names().iter().any(|n| n == v) || names.contains(&v.to_string()) {
                return Err(FieldError::DuplicateGenerator(v.to_string()));
            }
            names.push(v.to_string());
        }
        Ok(Field(Arc::new(FieldInner {
            kind: Kind::Function {
                base: self.clone(),
                tvars: Arc::new(names),
            },
        })))
    }

    pub fn zero(&self) -> FieldElement {
        match &self.0.kind {
            Kind::Tower { levels } => FieldElement {
                ctx: self.clone(),
                rep: Rep::Alg(alg_zero(levels)),
            },
            Kind::Function { base, tvars } => {
                let vars: Vec<String> = tvars.as_ref().clone();
                FieldElement {
                    ctx: self.clone(),
                    rep: Rep::Fun {
                        num: MultiPoly::zero(base.clone(), &vars),
                        den: MultiPoly::one(base.clone(), &vars),
                    },
                }
            }
        }
    }

    pub fn one(&self) -> FieldElement {
        self.from_rational(BigRational::one())
    }

    pub fn from_rational(&self, q: BigRational) -> FieldElement {
        match &self.0.kind {
            Kind::Tower { levels } => FieldElement {
                ctx: self.clone(),
                rep: Rep::Alg(alg_from_rat(levels, q)),
            },
            Kind::Function { base, tvars } => {
                let vars: Vec<String> = tvars.as_ref().clone();
                FieldElement {
                    ctx: self.clone(),
                    rep: Rep::Fun {
                        num: MultiPoly::constant(base.clone(), &vars, base.from_rational(q)),
                        den: MultiPoly::one(base.clone(), &vars),
                    },
                }
            }
        }
    }

    pub fn from_i64(&self, n: i64) -> FieldElement {
        self.from_rational(BigRational::from(BigInt::from(n)))
    }

    pub fn from_bigint(&self, n: BigInt) -> FieldElement {
        self.from_rational(BigRational::from(n))
    }

    /// The named adjoined generator as an element, if declared.
    pub fn generator(&self, name: &str) -> Option<FieldElement> {
        match &self.0.kind {
            Kind::Tower { levels } => {
                let idx = levels.iter().position(|l| l.name == name)?;
                // generator of level idx, lifted through the levels above
                let mut rep = {
                    let lower = &levels[..idx];
                    let d = levels[idx].degree();
                    let mut v = vec![alg_zero(lower); d];
                    v[1] = alg_from_rat(lower, BigRational::one());
                    AlgRep::Ext(v)
                };
                for k in idx + 1..levels.len() {
                    let lower = &levels[..k];
                    let d = levels[k].degree();
                    let mut v = vec![alg_zero(lower); d];
                    v[0] = rep;
                    rep = AlgRep::Ext(v);
                    let _ = &lower;
                }
                Some(FieldElement {
                    ctx: self.clone(),
                    rep: Rep::Alg(rep),
                })
            }
            Kind::Function { base, tvars } => {
                let vars: Vec<String> = tvars.as_ref().clone();
                if tvars.iter().any(|t| t == name) {
                    Some(FieldElement {
                        ctx: self.clone(),
                        rep: Rep::Fun {
                            num: MultiPoly::var(base.clone(), &vars, name),
                            den: MultiPoly::one(base.clone(), &vars),
                        },
                    })
                } else {
                    let g = base.generator(name)?;
                    Some(FieldElement {
                        ctx: self.clone(),
                        rep: Rep::Fun {
                            num: MultiPoly::constant(base.clone(), &vars, g),
                            den: MultiPoly::one(base.clone(), &vars),
                        },
                    })
                }
            }
        }
    }

    /// Lifts an element of a subfield (Q, a tower prefix, or the base of a
    /// function field) into this field.
    pub fn lift(&self, e: &FieldElement) -> Result<FieldElement, FieldError> {
        if &e.ctx == self {
            return Ok(e.clone());
        }
        if let Some(q) = e.as_rational() {
            return Ok(self.from_rational(q));
        }
        match (&self.0.kind, &e.ctx.0.kind) {
            (Kind::Tower { levels }, Kind::Tower { levels: sub }) => {
                if levels.len() > sub.len() && levels[..sub.len()] == sub[..] {
                    let Rep::Alg(mut rep) = e.rep.clone() else {
                        unreachable!()
                    };
                    for k in sub.len()..levels.len() {
                        let lower = &levels[..k];
                        let d = levels[k].degree();
                        let mut v = vec![alg_zero(lower); d];
                        v[0] = rep;
                        rep = AlgRep::Ext(v);
                    }
                    return Ok(FieldElement {
                        ctx: self.clone(),
                        rep: Rep::Alg(rep),
                    });
                }
                Err(FieldError::BadLift(e.to_string(), self.describe()))
            }
            (Kind::Function { base, tvars }, Kind::Tower { .. }) => {
                let inner = base.lift(e)?;
                let vars: Vec<String> = tvars.as_ref().clone();
                Ok(FieldElement {
                    ctx: self.clone(),
                    rep: Rep::Fun {
                        num: MultiPoly::constant(base.clone(), &vars, inner),
                        den: MultiPoly::one(base.clone(), &vars),
                    },
                })
            }
            _ => Err(FieldError::BadLift(e.to_string(), self.describe())),
        }
    }

    /// Short human-readable description, e.g. `Q(alpha)` or `Q(t,tstar)`.
    pub fn describe(&self) -> String {
        let gens = self.generator_names();
        if gens.is_empty() {
            "Q".to_string()
        } else {
            format!("Q({})", gens.join(","))
        }
    }

    /// Degree over Q of the subfield of the tower generated by the given
    /// elements, computed by closing the Q-span under multiplication.
    pub fn subfield_degree(&self, elems: &[FieldElement]) -> u64 {
        let levels = match self.tower_levels() {
            Some(l) => l,
            None => panic!("subfield_degree requires a number-field tower"),
        };
        let dim: usize = levels.iter().map(Level::degree).product::<usize>().max(1);
        let gens: Vec<AlgRep> = elems
            .iter()
            .map(|e| match &e.rep {
                Rep::Alg(a) => a.clone(),
                Rep::Fun { .. } => panic!("subfield_degree requires tower elements"),
            })
            .collect();

        // echelon basis of the span over Q, plus the elements it came from
        let mut rows: Vec<Vec<BigRational>> = Vec::new();
        let mut basis: Vec<AlgRep> = Vec::new();
        let reduce = |rows: &Vec<Vec<BigRational>>, mut v: Vec<BigRational>| -> Vec<BigRational> {
            for r in rows {
                let piv = r.iter().position(|c| !c.is_zero()).unwrap();
                if !v[piv].is_zero() {
                    let f = &v[piv] / &r[piv];
                    for i in 0..v.len() {
                        let d = &f * &r[i];
                        v[i] -= d;
                    }
                }
            }
            v
        };
        let mut pending = vec![alg_from_rat(levels, BigRational::one())];
        while let Some(x) = pending.pop() {
            let mut flat = Vec::with_capacity(dim);
            alg_flatten(levels, &x, &mut flat);
            let red = reduce(&rows, flat);
            if red.iter().all(|c| c.is_zero()) {
                continue;
            }
            rows.push(red);
            basis.push(x.clone());
            for g in &gens {
                pending.push(alg_mul(levels, &x, g));
            }
        }
        basis.len() as u64
    }

    /// Exact square root in this field, if one exists. Implemented for
    /// rationals and for depth-1 quadratic towers.
    pub fn sqrt(&self, e: &FieldElement) -> Option<FieldElement> {
        assert_eq!(&e.ctx, self, "sqrt: element of a different field");
        if let Some(q) = e.as_rational() {
            if let Some(r) = rational_sqrt(&q) {
                return Some(self.from_rational(r));
            }
            // fall through: a rational may still be a square of an
            // irrational element of the tower
        }
        let levels = self.tower_levels()?;
        if levels.len() != 1 || levels[0].degree() != 2 {
            return None;
        }
        let (a, b) = match &e.rep {
            Rep::Alg(AlgRep::Ext(v)) => match (&v[0], &v[1]) {
                (AlgRep::Rat(a), AlgRep::Rat(b)) => (a.clone(), b.clone()),
                _ => unreachable!(),
            },
            _ => return None,
        };
        let (c0, c1) = match (&levels[0].minpoly[0], &levels[0].minpoly[1]) {
            (AlgRep::Rat(c0), AlgRep::Rat(c1)) => (c0.clone(), c1.clone()),
            _ => unreachable!(),
        };
        // (x + y g)^2 = (x^2 - y^2 c0) + (2xy - y^2 c1) g  with g^2 = -c0 - c1 g
        // y != 0 case: with Y = y^2,
        //   (c1^2 - 4 c0) Y^2 + (2 b c1 - 4 a) Y + b^2 = 0
        let qa = &c1 * &c1 - BigRational::from(BigInt::from(4)) * &c0;
        let qb = BigRational::from(BigInt::from(2)) * &b * &c1
            - BigRational::from(BigInt::from(4)) * &a;
        let qc = &b * &b;
        let two = BigRational::from(BigInt::from(2));
        let candidates: Vec<BigRational> = if qa.is_zero() {
            if qb.is_zero() {
                Vec::new()
            } else {
                vec![-&qc / &qb]
            }
        } else {
            let disc = &qb * &qb - BigRational::from(BigInt::from(4)) * &qa * &qc;
            match rational_sqrt(&disc) {
                None => Vec::new(),
                Some(s) => vec![(-&qb + &s) / (&two * &qa), (-&qb - &s) / (&two * &qa)],
            }
        };
        for y2 in candidates {
            if let Some(y) = rational_sqrt(&y2) {
                if y.is_zero() {
                    continue;
                }
                let x = (&b + &c1 * &y2) / (&two * &y);
                let cand = {
                    let lower: &[Level] = &[];
                    AlgRep::Ext(vec![
                        alg_from_rat(lower, x.clone()),
                        alg_from_rat(lower, y.clone()),
                    ])
                };
                let sq = alg_mul(levels, &cand, &cand);
                if let Rep::Alg(target) = &e.rep {
                    if &sq == target {
                        return Some(FieldElement {
                            ctx: self.clone(),
                            rep: Rep::Alg(cand),
                        });
                    }
                }
            }
        }
        None
    }
}

/// Exact square root of a nonnegative rational, if it is a perfect square.
pub fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer();
    let d = q.denom();
    let sn = n.sqrt();
    let sd = d.sqrt();
    if &(&sn * &sn) == n && &(&sd * &sd) == d {
        Some(BigRational::new(sn, sd.clone()))
    } else {
        None
    }
}

// ---------------------------------------------------------------------------
// irreducibility validation (degree <= 4 over Q; degree 2 over a tower)
// ---------------------------------------------------------------------------

fn validate_irreducible(
    levels: &[Level],
    name: &str,
    coeffs: &[AlgRep],
    assume: bool,
) -> Result<(), FieldError> {
    let deg = coeffs.len();
    if levels.is_empty() {
        // over Q
        let rat: Option<Vec<BigRational>> = coeffs
            .iter()
            .map(|c| match c {
                AlgRep::Rat(q) => Some(q.clone()),
                _ => None,
            })
            .collect();
        let rat = rat.expect("tower coefficients at level 0 are rational");
        if deg <= 4 {
            if rational_poly_reducible(&rat) {
                return Err(FieldError::ReducibleMinimalPolynomial(name.to_string()));
            }
            return Ok(());
        }
        if assume {
            return Ok(());
        }
        return Err(FieldError::UnvalidatedMinimalPolynomial(name.to_string()));
    }
    // over a nontrivial tower level
    if deg == 2 {
        // reducible iff the discriminant is a square in the level
        let tower_field = Field(Arc::new(FieldInner {
            kind: Kind::Tower {
                levels: levels.to_vec(),
            },
        }));
        let c0 = FieldElement {
            ctx: tower_field.clone(),
            rep: Rep::Alg(coeffs[0].clone()),
        };
        let c1 = FieldElement {
            ctx: tower_field.clone(),
            rep: Rep::Alg(coeffs[1].clone()),
        };
        let four = tower_field.from_i64(4);
        let disc = &(&c1 * &c1) - &(&four * &c0);
        if tower_field.sqrt(&disc).is_some() {
            return Err(FieldError::ReducibleMinimalPolynomial(name.to_string()));
        }
        return Ok(());
    }
    if assume {
        return Ok(());
    }
    Err(FieldError::UnvalidatedMinimalPolynomial(name.to_string()))
}

/// Reducibility over Q of a monic polynomial of degree <= 4 given by its
/// non-leading coefficients, via integer root and quadratic-factor search.
fn rational_poly_reducible(coeffs: &[BigRational]) -> bool {
    let deg = coeffs.len();
    debug_assert!((2..=4).contains(&deg));
    // scale x = y/c to a monic integer polynomial in y
    let mut lcm = BigInt::one();
    for c in coeffs {
        lcm = num_integer::lcm(lcm, c.denom().clone());
    }
    // q(y) = c^deg p(y/c): coefficient of y^i is a_i c^(deg-i)
    let mut int_coeffs: Vec<BigInt> = Vec::with_capacity(deg);
    for (i, c) in coeffs.iter().enumerate() {
        let scaled = c * BigRational::from(lcm.pow((deg - i) as u32));
        debug_assert!(scaled.denom().is_one());
        int_coeffs.push(scaled.to_integer());
    }
    let eval = |x: &BigInt| -> BigInt {
        let mut acc = BigInt::one();
        let mut val = BigInt::zero();
        for c in int_coeffs.iter() {
            val += c * &acc;
            acc *= x;
        }
        val + acc
    };
    if int_coeffs[0].is_zero() {
        return true; // root 0
    }
    for d in divisors(int_coeffs[0].magnitude().to_owned()) {
        let d = BigInt::from(d);
        if eval(&d).is_zero() || eval(&(-&d)).is_zero() {
            return true;
        }
    }
    if deg == 4 {
        // search integer factorizations (y^2+py+q)(y^2+ry+s)
        let a = &int_coeffs[3];
        let b = &int_coeffs[2];
        let c = &int_coeffs[1];
        let d0 = &int_coeffs[0];
        for q in signed_divisors(d0) {
            if (&q).is_zero() {
                continue;
            }
            let (s, rem) = num_integer::div_rem(d0.clone(), q.clone());
            if !rem.is_zero() {
                continue;
            }
            // p + r = a, pr = b - q - s, ps + qr = c
            let sum = a.clone();
            let prod = b - &q - &s;
            let disc = &sum * &sum - BigInt::from(4) * &prod;
            if disc.is_negative() {
                continue;
            }
            let sq = disc.sqrt();
            if &sq * &sq != disc {
                continue;
            }
            for p in [(&sum + &sq) / 2, (&sum - &sq) / 2] {
                let r = &sum - &p;
                if &p * &s + &q * &r == *c {
                    return true;
                }
            }
        }
    }
    false
}

fn divisors(n: num_bigint::BigUint) -> Vec<u64> {
    // positive divisors up to a search bound; minimal polynomials at desk
    // scale have small constant terms
    use num_traits::ToPrimitive;
    let n = match n.to_u64() {
        Some(v) => v,
        None => return (1..=1_000_000u64).collect(),
    };
    let mut out = Vec::new();
    let mut i = 1u64;
    while i * i <= n {
        if n % i == 0 {
            out.push(i);
            out.push(n / i);
        }
        i += 1;
    }
    out.sort_unstable();
    out.dedup();
    out
}

fn signed_divisors(n: &BigInt) -> Vec<BigInt> {
    let mut out = Vec::new();
    for d in divisors(n.magnitude().to_owned()) {
        out.push(BigInt::from(d));
        out.push(-BigInt::from(d));
    }
    out
}

// ---------------------------------------------------------------------------
// element operations
// ---------------------------------------------------------------------------

fn fun_normalize(num: MultiPoly, den: MultiPoly) -> (MultiPoly, MultiPoly) {
    assert!(!den.is_zero(), "function-field denominator is zero");
    if num.is_zero() {
        let one = MultiPoly::one(num.field().clone(), num.var_names());
        return (num, one);
    }
    let g = poly::gcd(&num, &den);
    let mut num = num.exact_div(&g).expect("gcd divides numerator");
    let mut den = den.exact_div(&g).expect("gcd divides denominator");
    let lc = den.leading_coefficient().expect("nonzero denominator");
    if !lc.is_one() {
        let inv = lc.inv().expect("leading coefficient invertible");
        num = num.scale(&inv);
        den = den.scale(&inv);
    }
    (num, den)
}

impl FieldElement {
    pub fn field(&self) -> &Field {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        match &self.rep {
            Rep::Alg(a) => alg_is_zero(a),
            Rep::Fun { num, .. } => num.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        self == &self.ctx.one()
    }

    /// The rational value of this element if it lies in Q.
    pub fn as_rational(&self) -> Option<BigRational> {
        fn alg_as_rat(a: &AlgRep) -> Option<BigRational> {
            match a {
                AlgRep::Rat(q) => Some(q.clone()),
                AlgRep::Ext(v) => {
                    for x in &v[1..] {
                        if !alg_is_zero(x) {
                            return None;
                        }
                    }
                    alg_as_rat(&v[0])
                }
            }
        }
        match &self.rep {
            Rep::Alg(a) => alg_as_rat(a),
            Rep::Fun { num, den } => {
                let n = num.constant_value()?;
                let d = den.constant_value()?;
                let q = n.div(&d).ok()?;
                q.as_rational()
            }
        }
    }

    fn check_ctx(&self, other: &FieldElement) {
        assert!(
            self.ctx == other.ctx,
            "field mismatch: {} vs {}",
            self.ctx.describe(),
            other.ctx.describe()
        );
    }

    pub fn add(&self, other: &FieldElement) -> FieldElement {
        self.check_ctx(other);
        match (&self.rep, &other.rep) {
            (Rep::Alg(a), Rep::Alg(b)) => {
                let levels = self.ctx.tower_levels().unwrap();
                FieldElement {
                    ctx: self.ctx.clone(),
                    rep: Rep::Alg(alg_add(levels, a, b)),
                }
            }
            (Rep::Fun { num: n1, den: d1 }, Rep::Fun { num: n2, den: d2 }) => {
                let num = &(n1 * d2) + &(n2 * d1);
                let den = d1 * d2;
                let (num, den) = fun_normalize(num, den);
                FieldElement {
                    ctx: self.ctx.clone(),
                    rep: Rep::Fun { num, den },
                }
            }
            _ => unreachable!("mismatched representations in one field"),
        }
    }

    pub fn neg(&self) -> FieldElement {
        match &self.rep {
            Rep::Alg(a) => {
                let levels = self.ctx.tower_levels().unwrap();
                FieldElement {
                    ctx: self.ctx.clone(),
                    rep: Rep::Alg(alg_neg(levels, a)),
                }
            }
            Rep::Fun { num, den } => FieldElement {
                ctx: self.ctx.clone(),
                rep: Rep::Fun {
                    num: num.neg(),
                    den: den.clone(),
                },
            },
        }
    }

    pub fn sub(&self, other: &FieldElement) -> FieldElement {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &FieldElement) -> FieldElement {
        self.check_ctx(other);
        match (&self.rep, &other.rep) {
            (Rep::Alg(a), Rep::Alg(b)) => {
                let levels = self.ctx.tower_levels().unwrap();
                FieldElement {
                    ctx: self.ctx.clone(),
                    rep: Rep::Alg(alg_mul(levels, a, b)),
                }
            }
            (Rep::Fun { num: n1, den: d1 }, Rep::Fun { num: n2, den: d2 }) => {
                let (num, den) = fun_normalize(n1 * n2, d1 * d2);
                FieldElement {
                    ctx: self.ctx.clone(),
                    rep: Rep::Fun { num, den },
                }
            }
            _ => unreachable!("mismatched representations in one field"),
        }
    }

    pub fn inv(&self) -> Result<FieldElement, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        match &self.rep {
            Rep::Alg(a) => {
                let levels = self.ctx.tower_levels().unwrap();
                let inv = alg_inv(levels, a)
                    .ok_or_else(|| FieldError::NotInvertible(self.to_string()))?;
                Ok(FieldElement {
                    ctx: self.ctx.clone(),
                    rep: Rep::Alg(inv),
                })
            }
            Rep::Fun { num, den } => {
                let (num, den) = fun_normalize(den.clone(), num.clone());
                Ok(FieldElement {
                    ctx: self.ctx.clone(),
                    rep: Rep::Fun { num, den },
                })
            }
        }
    }

    pub fn div(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, mut e: u32) -> FieldElement {
        let mut base = self.clone();
        let mut acc = self.ctx.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// True when the canonical display needs parentheses as a coefficient.
    pub fn is_composite_display(&self) -> bool {
        self.as_rational().is_none()
    }
}

impl std::ops::Add for &FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &FieldElement) -> FieldElement {
        FieldElement::add(self, rhs)
    }
}
impl std::ops::Sub for &FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &FieldElement) -> FieldElement {
        FieldElement::sub(self, rhs)
    }
}
impl std::ops::Mul for &FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        FieldElement::mul(self, rhs)
    }
}
impl std::ops::Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement::neg(self)
    }
}

fn fmt_alg(levels: &[Level], a: &AlgRep, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match (levels.split_last(), a) {
        (None, AlgRep::Rat(q)) => write!(f, "{q}"),
        (Some((top, lower)), AlgRep::Ext(v)) => {
            let mut first = true;
            for (i, c) in v.iter().enumerate() {
                if alg_is_zero(c) {
                    continue;
                }
                if !first {
                    write!(f, "+")?;
                }
                first = false;
                let composite = match c {
                    AlgRep::Rat(_) => false,
                    AlgRep::Ext(w) => w.iter().filter(|x| !alg_is_zero(x)).count() > 1,
                };
                if composite {
                    write!(f, "(")?;
                }
                fmt_alg(lower, c, f)?;
                if composite {
                    write!(f, ")")?;
                }
                if i >= 1 {
                    write!(f, "*{}", top.name)?;
                    if i >= 2 {
                        write!(f, "^{i}")?;
                    }
                }
            }
            if first {
                write!(f, "0")?;
            }
            Ok(())
        }
        _ => unreachable!("malformed tower element"),
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.rep {
            Rep::Alg(a) => {
                let levels = self.ctx.tower_levels().unwrap();
                fmt_alg(levels, a, f)
            }
            Rep::Fun { num, den } => {
                if den.is_one() {
                    write!(f, "{num}")
                } else {
                    write!(f, "({num})/({den})")
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q() -> Field {
        Field::rationals()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    /// Q(alpha) with alpha^2 = 2.
    fn q_sqrt2() -> Field {
        let f = q();
        let coeffs = vec![f.from_i64(-2), f.from_i64(0), f.from_i64(1)];
        f.extend("alpha", &coeffs, false).unwrap()
    }

    #[test]
    fn rational_arithmetic() {
        let f = q();
        let half = f.from_rational(rat(1, 2));
        let third = f.from_rational(rat(1, 3));
        assert_eq!(half.add(&third), f.from_rational(rat(5, 6)));
    }

    #[test]
    fn quadratic_extension_arithmetic() {
        let f = q_sqrt2();
        let alpha = f.generator("alpha").unwrap();
        let one = f.one();
        // (1+alpha)(1-alpha) = 1 - alpha^2 = -1
        let prod = (&(&one + &alpha)).mul(&(&one - &alpha));
        assert_eq!(prod, f.from_i64(-1));
        // inverse check: alpha * alpha/2 = 1
        let inv = alpha.inv().unwrap();
        assert_eq!(alpha.mul(&inv), one);
    }

    #[test]
    fn reducible_minimal_polynomial_rejected() {
        let f = q();
        let coeffs = vec![f.from_i64(-1), f.from_i64(0), f.from_i64(1)]; // x^2 - 1
        let err = f.extend("alpha", &coeffs, false).unwrap_err();
        assert!(matches!(err, FieldError::ReducibleMinimalPolynomial(_)));
        // x^4 - 4 = (x^2-2)(x^2+2) has no rational root but factors
        let coeffs = vec![
            f.from_i64(-4),
            f.from_i64(0),
            f.from_i64(0),
            f.from_i64(0),
            f.from_i64(1),
        ];
        let err = f.extend("beta", &coeffs, false).unwrap_err();
        assert!(matches!(err, FieldError::ReducibleMinimalPolynomial(_)));
        // x^4 - 2 is irreducible (Eisenstein at 2)
        let coeffs = vec![
            f.from_i64(-2),
            f.from_i64(0),
            f.from_i64(0),
            f.from_i64(0),
            f.from_i64(1),
        ];
        assert!(f.extend("gamma", &coeffs, false).is_ok());
    }

    #[test]
    fn depth_two_tower() {
        let f1 = q_sqrt2();
        // x^2 - 3 over Q(sqrt2): disc 12 has no square root there
        let coeffs = vec![f1.from_i64(-3), f1.from_i64(0), f1.from_i64(1)];
        let f2 = f1.extend("beta", &coeffs, false).unwrap();
        let a = f2.generator("alpha").unwrap();
        let b = f2.generator("beta").unwrap();
        let prod = a.mul(&b);
        // (alpha*beta)^2 = 6
        assert_eq!(prod.mul(&prod), f2.from_i64(6));
        assert_eq!(f2.tower_degree(), 4);
        // x^2 - 2 over Q(sqrt2) is reducible (disc 8 = (2 alpha)^2)
        let coeffs = vec![f1.from_i64(-2), f1.from_i64(0), f1.from_i64(1)];
        assert!(matches!(
            f1.extend("beta", &coeffs, false),
            Err(FieldError::ReducibleMinimalPolynomial(_))
        ));
    }

    #[test]
    fn function_field_arithmetic() {
        let f = q().function_field(&["t"]).unwrap();
        let t = f.generator("t").unwrap();
        let one = f.one();
        // t/(t+1) + 1/(t+1) = 1
        let tp1 = &t + &one;
        let r = t.div(&tp1).unwrap().add(&one.div(&tp1).unwrap());
        assert_eq!(r, one);
        let sq = t.mul(&t);
        let back = sq.div(&t).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn two_transcendentals() {
        let f = q().function_field(&["t", "tstar"]).unwrap();
        let t = f.generator("t").unwrap();
        let s = f.generator("tstar").unwrap();
        // (t^2 - tstar^2)/(t - tstar) = t + tstar
        let num = &t.mul(&t) - &s.mul(&s);
        let den = &t - &s;
        assert_eq!(num.div(&den).unwrap(), &t + &s);
    }

    #[test]
    fn sqrt_in_fields() {
        let f = q();
        assert_eq!(
            f.sqrt(&f.from_rational(rat(9, 4))),
            Some(f.from_rational(rat(3, 2)))
        );
        assert_eq!(f.sqrt(&f.from_i64(2)), None);
        let e = q_sqrt2();
        let two = e.from_i64(2);
        let root = e.sqrt(&two).unwrap();
        assert_eq!(root.mul(&root), two);
        // 3 + 2 alpha = (1 + alpha)^2
        let alpha = e.generator("alpha").unwrap();
        let x = &e.from_i64(3) + &e.from_i64(2).mul(&alpha);
        let r = e.sqrt(&x).unwrap();
        assert_eq!(r.mul(&r), x);
        assert_eq!(e.sqrt(&e.from_i64(3)), None);
    }

    #[test]
    fn subfield_degrees() {
        let e = q_sqrt2();
        let alpha = e.generator("alpha").unwrap();
        assert_eq!(e.subfield_degree(&[]), 1);
        assert_eq!(e.subfield_degree(&[e.from_i64(7)]), 1);
        assert_eq!(e.subfield_degree(&[alpha.clone()]), 2);
        assert_eq!(e.subfield_degree(&[e.from_i64(1), alpha]), 2);
    }

    #[test]
    fn lift_across_fields() {
        let f = q();
        let e = q_sqrt2();
        let x = f.from_rational(rat(3, 7));
        assert_eq!(e.lift(&x).unwrap(), e.from_rational(rat(3, 7)));
        let ff = f.function_field(&["t"]).unwrap();
        assert_eq!(ff.lift(&x).unwrap(), ff.from_rational(rat(3, 7)));
    }

    fn random_element(f: &Field, rng: &mut ChaCha8Rng) -> FieldElement {
        let small = |rng: &mut ChaCha8Rng| {
            let n = rng.gen_range(-6i64..=6);
            let d = rng.gen_range(1i64..=4);
            rat(n, d)
        };
        match &f.0.kind {
            Kind::Tower { levels } if levels.is_empty() => f.from_rational(small(rng)),
            Kind::Tower { .. } => {
                let mut acc = f.from_rational(small(rng));
                for name in f.generator_names() {
                    let g = f.generator(&name).unwrap();
                    let c = f.from_rational(small(rng));
                    acc = acc.add(&c.mul(&g));
                }
                acc
            }
            Kind::Function { .. } => {
                let names = f.transcendental_names();
                let vars: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
                let mk = |rng: &mut ChaCha8Rng| {
                    let mut src = String::new();
                    for (i, v) in vars.iter().enumerate() {
                        let c = rng.gen_range(-3i64..=3);
                        if i > 0 {
                            src.push('+');
                        }
                        src.push_str(&format!("({c})*{v}"));
                    }
                    let c0 = rng.gen_range(-3i64..=3);
                    src.push_str(&format!("+({c0})"));
                    src
                };
                let names2 = f.transcendental_names();
                let num = parse_poly(&f.tower_base(), &names2, &mk(rng)).unwrap();
                let mut den;
                loop {
                    den = parse_poly(&f.tower_base(), &names2, &mk(rng)).unwrap();
                    if !den.is_zero() {
                        break;
                    }
                }
                let (num, den) = fun_normalize(num, den);
                FieldElement {
                    ctx: f.clone(),
                    rep: Rep::Fun { num, den },
                }
            }
        }
    }

    #[test]
    fn field_axioms_randomized() {
        // associativity, distributivity, inverses on random triples for all
        // three field kinds
        let fields = vec![q(), q_sqrt2(), q().function_field(&["t", "tstar"]).unwrap()];
        for (fi, f) in fields.iter().enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(42 + fi as u64);
            for _ in 0..1000 {
                let a = random_element(f, &mut rng);
                let b = random_element(f, &mut rng);
                let c = random_element(f, &mut rng);
                assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
                assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
                assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
                assert_eq!(a.add(&b), b.add(&a));
                assert_eq!(a.mul(&b), b.mul(&a));
                if !a.is_zero() {
                    assert_eq!(a.mul(&a.inv().unwrap()), f.one());
                }
                assert!(a.sub(&a).is_zero());
            }
        }
    }

    #[test]
    fn display_canonical() {
        let f = q_sqrt2();
        let alpha = f.generator("alpha").unwrap();
        let x = &f.from_i64(1) + &f.from_i64(2).mul(&alpha);
        assert_eq!(x.to_string(), "1+2*alpha");
        assert_eq!(f.zero().to_string(), "0");
        let ff = q().function_field(&["t"]).unwrap();
        let t = ff.generator("t").unwrap();
        let e = t.div(&(&t + &ff.one())).unwrap();
        assert_eq!(e.to_string(), "(t)/(t+1)");
    }
}
