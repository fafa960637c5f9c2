//! Divisorial valuations of the plane at the origin, encoded as chains of
//! infinitely near points.
//!
//! A valuation is built from a list of steps. Step k picks the next point on
//! the exceptional divisor of blowup k: `Free(c)` is the point at chart
//! coordinate `c` (the slope at the first level, the reciprocal direction
//! afterwards, so that `Free(0)` at level >= 2 is the satellite point on the
//! strict transform of the previous exceptional), and `AtInfinity` is the
//! remaining chart-2 origin. The last step marks the follow point on the
//! final exceptional; it does not change the valuation's values but enters
//! the residue degree and curvette geometry.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::field::{Field, FieldElement};
use crate::poly::{self, MultiPoly};
use crate::value::ValOrInf;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlaneError {
    #[error("step constant lies outside the declared field")]
    ConstantOutsideField,
    #[error("valuations require at least one step")]
    EmptySteps,
    #[error("plane valuations are defined over Q or a number field")]
    NonTowerField,
    #[error("testing curves require origin order exactly 1")]
    NotUnitOrder,
    #[error("degenerate curvette constant {0}")]
    DegenerateConstant(String),
    #[error("polynomial must be bivariate")]
    NotBivariate,
}

/// One step of an infinitely-near point chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    Free(FieldElement),
    AtInfinity,
}

impl Step {
    pub fn constant(&self) -> Option<&FieldElement> {
        match self {
            Step::Free(c) => Some(c),
            Step::AtInfinity => None,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Step::Free(c) => format!("free({c})"),
            Step::AtInfinity => "infinity".to_string(),
        }
    }
}

/// The substitution of blowup `level` with the chart recentered according to
/// the step, expressing the old chart coordinates in the new ones.
fn sigma(field: &Field, level: usize, step: &Step) -> (MultiPoly, MultiPoly) {
    let vars: Vec<String> = vec!["u".into(), "v".into()];
    let p = |s: &str| poly::parse_poly(field, &vars, s).expect("chart substitution");
    let u = p("u");
    let v = p("v");
    match (level, step) {
        (1, Step::Free(c)) => {
            let cpoly = MultiPoly::constant(field.clone(), &vars, c.clone());
            (u.clone(), u.mul(&v.add(&cpoly)))
        }
        (1, Step::AtInfinity) => (p("u*v"), u),
        (_, Step::Free(c)) => {
            let cpoly = MultiPoly::constant(field.clone(), &vars, c.clone());
            (u.mul(&v.add(&cpoly)), u)
        }
        (_, Step::AtInfinity) => (u, p("u*v")),
    }
}

/// An infinitely-near point chain with its chart bookkeeping.
#[derive(Debug, Clone)]
pub struct PointSequence {
    field: Field,
    steps: Vec<Step>,
    /// Composed substitution expressing X, Y in the final chart coordinates
    /// (u, v); the last exceptional divisor is always {u = 0}.
    phi: (MultiPoly, MultiPoly),
    /// For the point located by step k (k >= 1, point p_{k+1}): the earlier
    /// level it is additionally proximate to, if it is a satellite.
    extra_prox: Vec<Option<usize>>,
}

impl PointSequence {
    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn depth(&self) -> usize {
        self.steps.len()
    }

    pub fn phi(&self) -> (&MultiPoly, &MultiPoly) {
        (&self.phi.0, &self.phi.1)
    }
}

/// A divisorial valuation: a point chain with multiplicity vector and
/// residue degree.
#[derive(Debug, Clone)]
pub struct PlaneValuation {
    seq: PointSequence,
    mults: Vec<u64>,
    chi: u64,
    name: Option<String>,
}

pub fn valuation_build(
    field: &Field,
    steps: Vec<Step>,
    name: Option<String>,
) -> Result<PlaneValuation, PlaneError> {
    if steps.is_empty() {
        return Err(PlaneError::EmptySteps);
    }
    if !field.is_tower() {
        return Err(PlaneError::NonTowerField);
    }
    for s in &steps {
        if let Step::Free(c) = s {
            if c.field() != field {
                return Err(PlaneError::ConstantOutsideField);
            }
        }
    }
    let vars: Vec<String> = vec!["u".into(), "v".into()];
    let mut phi = (
        MultiPoly::var(field.clone(), &vars, "u"),
        MultiPoly::var(field.clone(), &vars, "v"),
    );
    let mut extra_prox: Vec<Option<usize>> = Vec::new();
    // which earlier exceptional divisor the current chart's {v = 0} is the
    // strict transform of, if any
    let mut vcurve: Option<usize> = None;
    for (k0, step) in steps.iter().enumerate() {
        let level = k0 + 1;
        let (su, sv) = sigma(field, level, step);
        let mut images = BTreeMap::new();
        images.insert("u".to_string(), su);
        images.insert("v".to_string(), sv);
        phi = (
            phi.0.substitute(&images).expect("chart substitution"),
            phi.1.substitute(&images).expect("chart substitution"),
        );
        if level == 1 {
            extra_prox.push(None);
            vcurve = None;
        } else {
            match step {
                Step::Free(c) => {
                    if c.is_zero() {
                        // satellite: the located point also lies on the
                        // strict transform of the previous exceptional
                        extra_prox.push(Some(level - 1));
                        vcurve = Some(level - 1);
                    } else {
                        extra_prox.push(None);
                        vcurve = None;
                    }
                }
                Step::AtInfinity => {
                    extra_prox.push(vcurve);
                    // {v = 0} keeps tracking the same old exceptional
                }
            }
        }
    }
    let n = steps.len();
    // multiplicities from proximity: point p_{j+1} (located by step j,
    // 1-based) is proximate to p_j and possibly to an earlier point
    let mut mults = vec![0u64; n];
    mults[n - 1] = 1;
    for i in (1..n).rev() {
        // m_i (1-based) = sum of m_j over chain points p_j proximate to p_i
        let mut s = mults[i]; // p_{i+1} is proximate to p_i
        for j in i + 2..=n {
            // p_j located by step j-1; its extra proximity target
            if extra_prox[j - 2] == Some(i) {
                s += mults[j - 1];
            }
        }
        mults[i - 1] = s;
    }
    let constants: Vec<FieldElement> = steps
        .iter()
        .filter_map(|s| s.constant().cloned())
        .collect();
    let chi = field.subfield_degree(&constants);
    Ok(PlaneValuation {
        seq: PointSequence {
            field: field.clone(),
            steps,
            phi,
            extra_prox,
        },
        mults,
        chi,
        name,
    })
}

impl PlaneValuation {
    pub fn steps(&self) -> &[Step] {
        self.seq.steps()
    }

    pub fn field(&self) -> &Field {
        self.seq.field()
    }

    pub fn depth(&self) -> usize {
        self.seq.depth()
    }

    pub fn mults(&self) -> &[u64] {
        &self.mults
    }

    pub fn chi(&self) -> u64 {
        self.chi
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn sequence(&self) -> &PointSequence {
        &self.seq
    }

    /// Degree over Q of the subfield generated by the constants of the
    /// first `k` steps.
    pub fn chi_prefix(&self, k: usize) -> u64 {
        let constants: Vec<FieldElement> = self.seq.steps[..k.min(self.depth())]
            .iter()
            .filter_map(|s| s.constant().cloned())
            .collect();
        self.seq.field.subfield_degree(&constants)
    }

    /// Whether the chain point p_j (1-based, j >= 2) is proximate to p_i.
    pub fn proximate(&self, j: usize, i: usize) -> bool {
        if j <= i || j > self.depth() {
            return false;
        }
        if i + 1 == j {
            return true;
        }
        self.seq.extra_prox[j - 2] == Some(i)
    }

    /// Order along the last exceptional divisor of the total transform.
    pub fn value(&self, f: &MultiPoly) -> ValOrInf {
        let f = self.prepare(f);
        if f.is_zero() {
            return ValOrInf::Inf;
        }
        let mut images = BTreeMap::new();
        images.insert(f.var_names()[0].clone(), self.seq.phi.0.clone());
        images.insert(f.var_names()[1].clone(), self.seq.phi.1.clone());
        let pulled = f.substitute(&images).expect("pullback");
        pulled.var_order("u")
    }

    /// Lifts a bivariate polynomial over a subfield into this valuation's
    /// field.
    fn prepare(&self, f: &MultiPoly) -> MultiPoly {
        assert_eq!(f.var_names().len(), 2, "plane polynomials are bivariate");
        if f.field() == self.field() {
            f.clone()
        } else {
            f.lift_to_field(self.field())
                .expect("coefficients lift into the valuation's field")
        }
    }

    /// Independent evaluation: the Noether sum of chain multiplicities times
    /// the origin orders of the successive strict transforms.
    pub fn value_by_transforms(&self, f: &MultiPoly) -> ValOrInf {
        let f = self.prepare(f);
        if f.is_zero() {
            return ValOrInf::Inf;
        }
        let vars: Vec<String> = vec!["u".into(), "v".into()];
        let mut g = f.rename_vars(&vars);
        let mut total = 0u64;
        let field = self.field().clone();
        let upoly = MultiPoly::var(field.clone(), &vars, "u");
        for (k0, step) in self.seq.steps.iter().enumerate() {
            let mult = g
                .origin_order()
                .expect_finite("strict transform of a nonzero polynomial");
            total += self.mults[k0] * mult;
            let (su, sv) = sigma(&field, k0 + 1, step);
            let mut images = BTreeMap::new();
            images.insert("u".to_string(), su);
            images.insert("v".to_string(), sv);
            g = g.substitute(&images).expect("chart substitution");
            g = g
                .exact_div(&upoly.pow(mult as u32))
                .expect("total transform divisible by the exceptional");
        }
        ValOrInf::Fin(total)
    }
}

/// A curvette: the image of a generic transversal arc through the chain,
/// with its implicit equation.
#[derive(Debug, Clone)]
pub struct Curvette {
    pub constant: FieldElement,
    pub param: (MultiPoly, MultiPoly),
    pub implicit: MultiPoly,
}

/// Builds a curvette of the valuation for the given generic constant.
pub fn curvette(v: &PlaneValuation, cstar: &FieldElement) -> Result<Curvette, PlaneError> {
    let field = v.field().clone();
    if cstar.field() != &field {
        return Err(PlaneError::ConstantOutsideField);
    }
    let tau_vars: Vec<String> = vec!["tau".into()];
    let tau = MultiPoly::var(field.clone(), &tau_vars, "tau");
    let cpoly = MultiPoly::constant(field.clone(), &tau_vars, cstar.clone());
    let mut images = BTreeMap::new();
    images.insert("u".to_string(), tau);
    images.insert("v".to_string(), cpoly);
    let px = v.seq.phi.0.substitute(&images).expect("parametrization");
    let py = v.seq.phi.1.substitute(&images).expect("parametrization");
    // eliminate tau from (X - px, Y - py)
    let vars3: Vec<String> = vec!["X".into(), "Y".into(), "tau".into()];
    let ext = |p: &MultiPoly| {
        p.rename_vars(&["tau".to_string()])
            .extend_vars(&["X".to_string(), "Y".to_string()])
            .substitute(&{
                let mut im = BTreeMap::new();
                im.insert(
                    "tau".to_string(),
                    MultiPoly::var(field.clone(), &vars3, "tau"),
                );
                im.insert("X".to_string(), MultiPoly::var(field.clone(), &vars3, "X"));
                im.insert("Y".to_string(), MultiPoly::var(field.clone(), &vars3, "Y"));
                im
            })
            .expect("variable reorder")
    };
    let xpoly = MultiPoly::var(field.clone(), &vars3, "X");
    let ypoly = MultiPoly::var(field.clone(), &vars3, "Y");
    let a = &xpoly - &ext(&px);
    let b = &ypoly - &ext(&py);
    let res = poly::resultant(&a, &b, "tau");
    let vars2: Vec<String> = vec!["X".into(), "Y".into()];
    let implicit = poly::monic(&res.restrict_vars(&vars2));
    if implicit.is_constant() {
        return Err(PlaneError::DegenerateConstant(cstar.to_string()));
    }
    if !implicit.constant_term().is_zero() {
        return Err(PlaneError::DegenerateConstant(cstar.to_string()));
    }
    // the implicit equation must vanish on the parametrization
    let mut im = BTreeMap::new();
    im.insert("X".to_string(), px.clone());
    im.insert("Y".to_string(), py.clone());
    if !implicit.substitute(&im).expect("check").is_zero() {
        return Err(PlaneError::DegenerateConstant(cstar.to_string()));
    }
    if implicit.origin_order() != ValOrInf::Fin(v.mults()[0]) {
        return Err(PlaneError::DegenerateConstant(cstar.to_string()));
    }
    Ok(Curvette {
        constant: cstar.clone(),
        param: (px, py),
        implicit,
    })
}

/// Product of the conjugates of a bivariate polynomial over its tower,
/// yielding a polynomial over Q (up to sign, which values never see). Each
/// tower level is eliminated by a resultant with its minimal polynomial.
pub fn norm_to_rationals(p: &MultiPoly) -> MultiPoly {
    let mut cur = p.clone();
    loop {
        let field = cur.field().clone();
        let depth = field.tower_depth();
        if depth == 0 {
            return cur;
        }
        let lower = field.tower_prefix(depth - 1);
        let base_vars = cur.var_names().to_vec();
        let mut vars3 = base_vars.clone();
        vars3.push("w".to_string());
        let widx = vars3.len() - 1;
        let minpoly = field.level_minpoly(depth - 1);
        let mut mp_in_w = MultiPoly::zero(lower.clone(), &vars3);
        for (i, c) in minpoly.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut exps = vec![0u32; vars3.len()];
            exps[widx] = i as u32;
            mp_in_w = mp_in_w.add(&MultiPoly::monomial(lower.clone(), &vars3, exps, c.clone()));
        }
        // rewrite cur with the top generator replaced by w
        let mut rewritten = MultiPoly::zero(lower.clone(), &vars3);
        for (m, c) in cur.terms() {
            for (i, ci) in field.top_coefficients(c).into_iter().enumerate() {
                if ci.is_zero() {
                    continue;
                }
                let mut exps = m.0.clone();
                exps.push(i as u32);
                rewritten = rewritten.add(&MultiPoly::monomial(lower.clone(), &vars3, exps, ci));
            }
        }
        let res = poly::resultant(&mp_in_w, &rewritten, "w");
        cur = res.restrict_vars(&base_vars);
    }
}

/// W_t(theta): the order of theta in the local ring one blowup past the
/// direction t (None encodes the vertical direction).
pub fn testing_curve_value(
    theta: &MultiPoly,
    t: Option<&FieldElement>,
) -> Result<u64, PlaneError> {
    if theta.origin_order() != ValOrInf::Fin(1) {
        return Err(PlaneError::NotUnitOrder);
    }
    let field = theta.field().clone();
    let first = match t {
        Some(c) => Step::Free(c.neg()),
        None => Step::AtInfinity,
    };
    let w = valuation_build(&field, vec![first, Step::Free(field.zero())], None)?;
    Ok(w.value(theta).expect_finite("nonzero testing curve"))
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

    fn xy() -> Vec<String> {
        vec!["X".into(), "Y".into()]
    }

    fn p(src: &str) -> MultiPoly {
        parse_poly(&q(), &xy(), src).unwrap()
    }

    fn free(c: i64) -> Step {
        Step::Free(q().from_i64(c))
    }

    fn build(steps: Vec<Step>) -> PlaneValuation {
        valuation_build(&q(), steps, None).unwrap()
    }

    fn origin_val() -> PlaneValuation {
        build(vec![free(0)])
    }

    fn cusp() -> PlaneValuation {
        build(vec![free(0), free(0), Step::AtInfinity])
    }

    #[test]
    fn order_valuation() {
        let v = origin_val();
        assert_eq!(v.mults(), &[1]);
        assert_eq!(v.chi(), 1);
        assert_eq!(v.value(&p("Y^2-X^3")), ValOrInf::Fin(2));
        assert_eq!(v.value(&p("1+X")), ValOrInf::Fin(0));
        assert_eq!(v.value(&p("0")), ValOrInf::Inf);
    }

    #[test]
    fn cusp_valuation() {
        let v = cusp();
        assert_eq!(v.mults(), &[2, 1, 1]);
        assert_eq!(v.value(&p("X")), ValOrInf::Fin(2));
        assert_eq!(v.value(&p("Y")), ValOrInf::Fin(3));
        assert_eq!(v.value(&p("Y^2-X^3")), ValOrInf::Fin(6));
        // p3 is proximate to both p2 and p1
        assert!(v.proximate(3, 2));
        assert!(v.proximate(3, 1));
        assert!(v.proximate(2, 1));
    }

    #[test]
    fn chi_over_extension() {
        let e = q()
            .extend(
                "alpha",
                &[
                    Field::rationals().from_i64(-2),
                    Field::rationals().from_i64(0),
                    Field::rationals().from_i64(1),
                ],
                false,
            )
            .unwrap();
        // lift coefficients: extend() expects elements of the base field
        let alpha = e.generator("alpha").unwrap();
        let v = valuation_build(&e, vec![Step::Free(alpha)], None).unwrap();
        assert_eq!(v.chi(), 2);
        assert_eq!(v.mults(), &[1]);
        // constant from the wrong field is rejected
        let err = valuation_build(&e, vec![Step::Free(q().from_i64(1))], None).unwrap_err();
        assert_eq!(err, PlaneError::ConstantOutsideField);
    }

    #[test]
    fn proximity_equalities_random_chains() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..60 {
            let n = rng.gen_range(1..=5);
            let steps: Vec<Step> = (0..n)
                .map(|_| match rng.gen_range(0..4) {
                    0 => Step::AtInfinity,
                    k => free((k as i64) - 2),
                })
                .collect();
            let v = build(steps);
            let n = v.depth();
            assert_eq!(v.mults()[n - 1], 1);
            for i in 1..n {
                let sum: u64 = (i + 1..=n)
                    .filter(|&j| v.proximate(j, i))
                    .map(|j| v.mults()[j - 1])
                    .sum();
                assert_eq!(v.mults()[i - 1], sum, "chain {:?}", v.steps());
            }
        }
    }

    #[test]
    fn valuation_axioms_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let rand_poly = |rng: &mut ChaCha8Rng| {
            let field = q();
            let vars = xy();
            let mut acc = MultiPoly::zero(field.clone(), &vars);
            for _ in 0..rng.gen_range(1..5) {
                let exps: Vec<u32> = (0..2).map(|_| rng.gen_range(0..4)).collect();
                let c = field.from_i64(rng.gen_range(-4i64..=4));
                acc = acc.add(&MultiPoly::monomial(field.clone(), &vars, exps, c));
            }
            acc
        };
        let vals = vec![
            origin_val(),
            cusp(),
            build(vec![free(1), free(0)]),
            build(vec![Step::AtInfinity, free(2), Step::AtInfinity]),
        ];
        for v in &vals {
            for _ in 0..40 {
                let f = rand_poly(&mut rng);
                let g = rand_poly(&mut rng);
                assert_eq!(v.value(&f.mul(&g)), v.value(&f) + v.value(&g));
                let s = f.add(&g);
                let lhs = v.value(&s);
                assert!(lhs >= v.value(&f).min(v.value(&g)));
                assert_eq!(v.value(&f) == ValOrInf::Inf, f.is_zero());
            }
            // units have value 0
            assert_eq!(v.value(&p("1+X+Y")), ValOrInf::Fin(0));
        }
    }

    #[test]
    fn noether_decomposition_agrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let vals = vec![
            origin_val(),
            cusp(),
            build(vec![free(0), free(1)]),
            build(vec![free(0), free(0), free(0)]),
            build(vec![Step::AtInfinity, free(0), Step::AtInfinity, free(3)]),
        ];
        let rand_poly = |rng: &mut ChaCha8Rng| {
            let field = q();
            let vars = xy();
            let mut acc = MultiPoly::zero(field.clone(), &vars);
            while acc.is_zero() {
                for _ in 0..rng.gen_range(1..5) {
                    let exps: Vec<u32> = (0..2).map(|_| rng.gen_range(0..4)).collect();
                    let c = field.from_i64(rng.gen_range(-4i64..=4));
                    acc = acc.add(&MultiPoly::monomial(field.clone(), &vars, exps, c));
                }
            }
            acc
        };
        for v in &vals {
            for _ in 0..30 {
                let f = rand_poly(&mut rng);
                assert_eq!(v.value(&f), v.value_by_transforms(&f), "V={:?}", v.steps());
            }
            assert_eq!(v.value(&p("Y^2-X^3")), v.value_by_transforms(&p("Y^2-X^3")));
        }
    }

    #[test]
    fn curvette_examples() {
        // o(R): smooth curve through the origin
        let v = origin_val();
        let c = curvette(&v, &q().from_i64(1)).unwrap();
        assert_eq!(c.implicit.origin_order(), ValOrInf::Fin(1));
        assert_eq!(v.value(&c.implicit), ValOrInf::Fin(1));

        // cusp: origin order 2, self-value 6
        let v = cusp();
        let c = curvette(&v, &q().from_i64(1)).unwrap();
        assert_eq!(c.implicit.origin_order(), ValOrInf::Fin(2));
        assert_eq!(v.value(&c.implicit), ValOrInf::Fin(6));

        // depth-2 free chain: smooth, self-value 1 + 1 = 2
        let v = build(vec![free(0), free(1)]);
        let c = curvette(&v, &q().from_i64(1)).unwrap();
        assert_eq!(c.implicit.origin_order(), ValOrInf::Fin(1));
        assert_eq!(v.value(&c.implicit), ValOrInf::Fin(2));

        // self-contact is independent of the generic constant
        let v = cusp();
        let c1 = curvette(&v, &q().from_i64(2)).unwrap();
        let c2 = curvette(&v, &q().from_i64(3)).unwrap();
        assert_eq!(v.value(&c1.implicit), v.value(&c2.implicit));
    }

    #[test]
    fn self_contact_equals_sum_of_squares() {
        let chains = vec![
            vec![free(0)],
            vec![free(0), free(1)],
            vec![free(0), free(0), Step::AtInfinity],
            vec![free(2), free(0), free(0)],
        ];
        for steps in chains {
            let v = build(steps);
            let expected: u64 = v.mults().iter().map(|m| m * m).sum();
            let c = curvette(&v, &q().from_i64(5)).unwrap();
            assert_eq!(v.value(&c.implicit), ValOrInf::Fin(expected));
        }
    }

    #[test]
    fn testing_curve_table() {
        let theta = p("Y+3*X");
        let t3 = q().from_i64(3);
        let t5 = q().from_i64(5);
        assert_eq!(testing_curve_value(&theta, Some(&t3)).unwrap(), 2);
        assert_eq!(testing_curve_value(&theta, Some(&t5)).unwrap(), 1);
        assert_eq!(testing_curve_value(&p("X"), None).unwrap(), 2);
        assert_eq!(testing_curve_value(&p("Y"), None).unwrap(), 1);
        let t0 = q().from_i64(0);
        assert_eq!(testing_curve_value(&p("Y"), Some(&t0)).unwrap(), 2);
        assert!(matches!(
            testing_curve_value(&p("X^2"), Some(&t0)),
            Err(PlaneError::NotUnitOrder)
        ));
    }

    #[test]
    fn norm_of_extension_curvette() {
        let e = q()
            .extend(
                "alpha",
                &[q().from_i64(-2), q().from_i64(0), q().from_i64(1)],
                false,
            )
            .unwrap();
        let alpha = e.generator("alpha").unwrap();
        let v = valuation_build(&e, vec![Step::Free(alpha)], None).unwrap();
        let c = curvette(&v, &e.from_i64(1)).unwrap();
        // the curvette is a line over Q(alpha); its norm is a conic over Q
        let n = norm_to_rationals(&c.implicit);
        assert!(n.field().is_rationals());
        assert_eq!(n.origin_order(), ValOrInf::Fin(2));
        // the order valuation sees the norm with multiplicity chi = 2
        let o = origin_val();
        assert_eq!(o.value(&n), ValOrInf::Fin(2));
    }
}
