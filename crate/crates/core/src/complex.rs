//! The cochain complex of a factorisation: (m,n)-cochains A^m (x) B^n -> X
//! with edge rows valued in A and B, the two coboundaries d_A and d_B, and
//! the total differential D = (-1)^m d_B + d_A.
//!
//! Argument order is fixed as f(a_m, ..., a_1, b^1, ..., b^n): the A-slots
//! carry descending labels left to right, the B-slots ascending. The
//! coboundary index arithmetic is sensitive to this convention.

use crate::algebra::{AlgElement, BasedAlgebra, Monomial};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::twist::{
    twist_chain_left, twist_chain_right, x_multiply, Side, TensorElement, TwistMap,
};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// An algebra factorisation X(B,A): the two based algebras and the twisting
/// map between them.
#[derive(Clone, Debug)]
pub struct Factorisation<K: Scalar> {
    pub a: Arc<BasedAlgebra<K>>,
    pub b: Arc<BasedAlgebra<K>>,
    pub twist: TwistMap<K>,
}

impl<K: Scalar> Factorisation<K> {
    pub fn new(twist: TwistMap<K>) -> Self {
        Factorisation {
            a: twist.algebra_a().clone(),
            b: twist.algebra_b().clone(),
            twist,
        }
    }

    pub fn is_finite_dimensional(&self) -> bool {
        self.a.shape().finite_dimension().is_some() && self.b.shape().finite_dimension().is_some()
    }

    /// Enumerates (a_m, ..., a_1; b^1, ..., b^n) basis tuples of total degree
    /// <= `cap` (finite bases: all tuples).
    pub fn enumerate_tuples(
        &self,
        m: usize,
        n: usize,
        cap: u32,
    ) -> Vec<(Vec<Monomial>, Vec<Monomial>)> {
        let finite = self.is_finite_dimensional();
        let a_basis = self.a.shape().enumerate(cap);
        let b_basis = self.b.shape().enumerate(cap);
        let mut out = Vec::new();
        let mut a_tuple = Vec::with_capacity(m);
        let mut b_tuple = Vec::with_capacity(n);
        fill_tuples(
            &a_basis, &b_basis, &self.a, &self.b, m, n, cap, finite, &mut a_tuple, &mut b_tuple,
            0, &mut out,
        );
        out
    }
}

#[allow(clippy::too_many_arguments)]
fn fill_tuples<K: Scalar>(
    a_basis: &[Monomial],
    b_basis: &[Monomial],
    a: &BasedAlgebra<K>,
    b: &BasedAlgebra<K>,
    m: usize,
    n: usize,
    cap: u32,
    finite: bool,
    a_tuple: &mut Vec<Monomial>,
    b_tuple: &mut Vec<Monomial>,
    used: u32,
    out: &mut Vec<(Vec<Monomial>, Vec<Monomial>)>,
) {
    if a_tuple.len() < m {
        for x in a_basis {
            let d = a.degree(x);
            if !finite && used + d > cap {
                continue;
            }
            a_tuple.push(x.clone());
            fill_tuples(a_basis, b_basis, a, b, m, n, cap, finite, a_tuple, b_tuple, used + d, out);
            a_tuple.pop();
        }
    } else if b_tuple.len() < n {
        for y in b_basis {
            let d = b.degree(y);
            if !finite && used + d > cap {
                continue;
            }
            b_tuple.push(y.clone());
            fill_tuples(a_basis, b_basis, a, b, m, n, cap, finite, a_tuple, b_tuple, used + d, out);
            b_tuple.pop();
        }
    } else {
        out.push((a_tuple.clone(), b_tuple.clone()));
    }
}

/// Bidegree (m, n) of a cochain; (0,0) is excluded — the complex starts in
/// total degree 1.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct BiDegree {
    pub m: usize,
    pub n: usize,
}

impl BiDegree {
    pub fn new(m: usize, n: usize) -> Self {
        assert!(m + n >= 1, "bidegree (0,0) is outside the complex");
        BiDegree { m, n }
    }

    pub fn total(&self) -> usize {
        self.m + self.n
    }

    /// Edge rows are valued in the algebras themselves; interior cochains in X.
    pub fn sort(&self) -> ValueSort {
        if self.n == 0 {
            ValueSort::EdgeA
        } else if self.m == 0 {
            ValueSort::EdgeB
        } else {
            ValueSort::Interior
        }
    }

    pub fn value_signature(&self) -> Vec<Side> {
        match self.sort() {
            ValueSort::EdgeA => vec![Side::A],
            ValueSort::EdgeB => vec![Side::B],
            ValueSort::Interior => vec![Side::B, Side::A],
        }
    }
}

impl fmt::Display for BiDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.m, self.n)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ValueSort {
    EdgeA,
    EdgeB,
    Interior,
}

type CochainFn<K> = dyn Fn(&[Monomial], &[Monomial]) -> TensorElement<K> + Send + Sync;
type CochainTable<K> = BTreeMap<(Vec<Monomial>, Vec<Monomial>), TensorElement<K>>;

#[derive(Clone)]
enum CochainRule<K: Scalar> {
    Zero,
    Table(Arc<CochainTable<K>>),
    Closure(Arc<CochainFn<K>>),
}

/// A multilinear map defined by its values on basis tuples. Values are
/// lazily computed; unspecified tuples of a table cochain are zero.
#[derive(Clone)]
pub struct Cochain<K: Scalar> {
    bidegree: BiDegree,
    rule: CochainRule<K>,
}

impl<K: Scalar> fmt::Debug for Cochain<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.rule {
            CochainRule::Zero => "zero",
            CochainRule::Table(_) => "table",
            CochainRule::Closure(_) => "closure",
        };
        write!(f, "Cochain{}[{kind}]", self.bidegree)
    }
}

impl<K: Scalar> Cochain<K> {
    pub fn zero(bidegree: BiDegree) -> Self {
        Cochain {
            bidegree,
            rule: CochainRule::Zero,
        }
    }

    pub fn from_table(bidegree: BiDegree, table: CochainTable<K>) -> Self {
        Cochain {
            bidegree,
            rule: CochainRule::Table(Arc::new(table)),
        }
    }

    pub fn from_closure(
        bidegree: BiDegree,
        rule: impl Fn(&[Monomial], &[Monomial]) -> TensorElement<K> + Send + Sync + 'static,
    ) -> Self {
        Cochain {
            bidegree,
            rule: CochainRule::Closure(Arc::new(rule)),
        }
    }

    pub fn bidegree(&self) -> BiDegree {
        self.bidegree
    }

    pub fn is_zero_rule(&self) -> bool {
        matches!(self.rule, CochainRule::Zero)
    }

    /// Value on a basis tuple, in the cochain's own value sort.
    pub fn eval(&self, a_args: &[Monomial], b_args: &[Monomial]) -> TensorElement<K> {
        debug_assert_eq!(a_args.len(), self.bidegree.m);
        debug_assert_eq!(b_args.len(), self.bidegree.n);
        match &self.rule {
            CochainRule::Zero => TensorElement::zero(self.bidegree.value_signature()),
            CochainRule::Table(t) => t
                .get(&(a_args.to_vec(), b_args.to_vec()))
                .cloned()
                .unwrap_or_else(|| TensorElement::zero(self.bidegree.value_signature())),
            CochainRule::Closure(f) => f(a_args, b_args),
        }
    }

    /// Multilinear extension to tuples of elements.
    pub fn eval_elements(&self, a_args: &[AlgElement<K>], b_args: &[AlgElement<K>]) -> TensorElement<K> {
        let mut out = TensorElement::zero(self.bidegree.value_signature());
        let mut a_tuple: Vec<Monomial> = Vec::with_capacity(a_args.len());
        let mut b_tuple: Vec<Monomial> = Vec::with_capacity(b_args.len());
        expand_multilinear(self, a_args, b_args, &mut a_tuple, &mut b_tuple, &K::one(), &mut out);
        out
    }

    /// Value as an element of X, applying the edge inclusions f -> 1_B (x) f
    /// and g -> g (x) 1_A where needed.
    pub fn eval_as_x(
        &self,
        fac: &Factorisation<K>,
        a_args: &[Monomial],
        b_args: &[Monomial],
    ) -> TensorElement<K> {
        include_in_x(fac, self.bidegree.sort(), &self.eval(a_args, b_args))
    }

    pub fn map_coeffs<S: Scalar>(
        &self,
        f: impl Fn(&K) -> S + Send + Sync + Clone + 'static,
    ) -> Cochain<S> {
        let bidegree = self.bidegree;
        match &self.rule {
            CochainRule::Zero => Cochain::zero(bidegree),
            CochainRule::Table(t) => {
                let table = t
                    .iter()
                    .map(|(k, v)| (k.clone(), v.map_coeffs(&f)))
                    .collect();
                Cochain::from_table(bidegree, table)
            }
            CochainRule::Closure(rule) => {
                let rule = rule.clone();
                Cochain::from_closure(bidegree, move |a_args, b_args| {
                    rule(a_args, b_args).map_coeffs(&f)
                })
            }
        }
    }

    /// Materialize the values on the given tuples into a table cochain.
    pub fn tabulate(&self, tuples: &[(Vec<Monomial>, Vec<Monomial>)]) -> Cochain<K> {
        let mut table = BTreeMap::new();
        for (a_args, b_args) in tuples {
            let v = self.eval(a_args, b_args);
            if !v.is_zero() {
                table.insert((a_args.clone(), b_args.clone()), v);
            }
        }
        Cochain::from_table(self.bidegree, table)
    }
}

fn expand_multilinear<K: Scalar>(
    f: &Cochain<K>,
    a_args: &[AlgElement<K>],
    b_args: &[AlgElement<K>],
    a_tuple: &mut Vec<Monomial>,
    b_tuple: &mut Vec<Monomial>,
    coeff: &K,
    out: &mut TensorElement<K>,
) {
    if coeff.is_zero() {
        return;
    }
    if a_tuple.len() < a_args.len() {
        for (m, c) in a_args[a_tuple.len()].terms() {
            a_tuple.push(m.clone());
            expand_multilinear(f, a_args, b_args, a_tuple, b_tuple, &coeff.mul(c), out);
            a_tuple.pop();
        }
    } else if b_tuple.len() < b_args.len() {
        for (m, c) in b_args[b_tuple.len()].terms() {
            b_tuple.push(m.clone());
            expand_multilinear(f, a_args, b_args, a_tuple, b_tuple, &coeff.mul(c), out);
            b_tuple.pop();
        }
    } else {
        let v = f.eval(a_tuple, b_tuple).scale(coeff);
        for (t, c) in v.terms() {
            out.add_term(t.clone(), c);
        }
    }
}

/// Interprets a cochain value as an element of X = B (x) A.
pub fn include_in_x<K: Scalar>(
    fac: &Factorisation<K>,
    sort: ValueSort,
    v: &TensorElement<K>,
) -> TensorElement<K> {
    match sort {
        ValueSort::Interior => v.clone(),
        ValueSort::EdgeA => {
            // 1_B (x) f
            let unit_b = fac.b.unit();
            let mut out = TensorElement::zero(vec![Side::B, Side::A]);
            for (t, c) in v.terms() {
                out.add_term(vec![unit_b.clone(), t[0].clone()], c);
            }
            out
        }
        ValueSort::EdgeB => {
            // g (x) 1_A
            let unit_a = fac.a.unit();
            let mut out = TensorElement::zero(vec![Side::B, Side::A]);
            for (t, c) in v.terms() {
                out.add_term(vec![t[0].clone(), unit_a.clone()], c);
            }
            out
        }
    }
}

/// Pointwise linear combination helpers.
pub fn cochain_add<K: Scalar>(f: &Cochain<K>, g: &Cochain<K>) -> Result<Cochain<K>> {
    if f.bidegree() != g.bidegree() {
        return Err(Error::BidegreeMismatch {
            ma: f.bidegree().m,
            na: f.bidegree().n,
            mb: g.bidegree().m,
            nb: g.bidegree().n,
        });
    }
    if f.is_zero_rule() {
        return Ok(g.clone());
    }
    if g.is_zero_rule() {
        return Ok(f.clone());
    }
    let (f, g) = (f.clone(), g.clone());
    Ok(Cochain::from_closure(f.bidegree(), move |a_args, b_args| {
        f.eval(a_args, b_args).add(&g.eval(a_args, b_args)).unwrap()
    }))
}

pub fn cochain_scale<K: Scalar>(f: &Cochain<K>, s: &K) -> Cochain<K> {
    if s.is_zero() || f.is_zero_rule() {
        return Cochain::zero(f.bidegree());
    }
    let (f, s) = (f.clone(), s.clone());
    Cochain::from_closure(f.bidegree(), move |a_args, b_args| {
        f.eval(a_args, b_args).scale(&s)
    })
}

pub fn cochain_sub<K: Scalar>(f: &Cochain<K>, g: &Cochain<K>) -> Result<Cochain<K>> {
    cochain_add(f, &cochain_scale(g, &K::one().neg()))
}

/// d_A: C^{m,n} -> C^{m+1,n}. The three-part formula: left X-multiplication
/// by the new outer argument, the alternating interior merges, and the last
/// argument twisted right past every B slot and multiplied from the right.
/// For n = 0 this is the Hochschild coboundary of A valued in A; for m = 0
/// the B-valued edge cochain is included into X first.
pub fn d_a<K: Scalar>(fac: &Factorisation<K>, f: &Cochain<K>) -> Cochain<K> {
    let bd = f.bidegree();
    let out_bd = BiDegree::new(bd.m + 1, bd.n);
    let fac = fac.clone();
    let f = f.clone();
    Cochain::from_closure(out_bd, move |a_args, b_args| {
        eval_d_a(&fac, &f, a_args, b_args).expect("d_A evaluation")
    })
}

fn eval_d_a<K: Scalar>(
    fac: &Factorisation<K>,
    f: &Cochain<K>,
    a_args: &[Monomial],
    b_args: &[Monomial],
) -> Result<TensorElement<K>> {
    let bd = f.bidegree();
    let m = bd.m;
    let n = bd.n;
    debug_assert_eq!(a_args.len(), m + 1);
    debug_assert_eq!(b_args.len(), n);

    if n == 0 {
        // Hochschild coboundary of A, valued in A
        let mut out = AlgElement::zero();
        let head = f.eval(&a_args[1..], &[]);
        let head: AlgElement<K> = tensor_to_alg(&head);
        acc_alg(&mut out, &fac.a.multiply(&AlgElement::basis(a_args[0].clone()), &head), &K::one());
        for i in 0..m {
            let sign = sign_of(i as i64 + 1);
            let merged = fac.a.basis_product(&a_args[i], &a_args[i + 1]);
            let mut elems: Vec<AlgElement<K>> = Vec::with_capacity(m);
            elems.extend(a_args[..i].iter().cloned().map(AlgElement::basis));
            elems.push(merged);
            elems.extend(a_args[i + 2..].iter().cloned().map(AlgElement::basis));
            let v = tensor_to_alg(&f.eval_elements(&elems, &[]));
            acc_alg(&mut out, &v, &sign);
        }
        let sign = sign_of(m as i64 + 1);
        let tail = tensor_to_alg(&f.eval(&a_args[..m], &[]));
        let v = fac.a.multiply(&tail, &AlgElement::basis(a_args[m].clone()));
        acc_alg(&mut out, &v, &sign);
        return Ok(alg_to_tensor(&out, Side::A));
    }

    let mut out = TensorElement::zero(vec![Side::B, Side::A]);

    // (i) a_{m+1} . f(a_m, ..., a_1, b^1, ..., b^n)
    let head = include_in_x(fac, bd.sort(), &f.eval(&a_args[1..], b_args));
    let left = TensorElement::x_basis(fac.b.unit(), a_args[0].clone());
    out = out.add(&x_multiply(&fac.twist, &left, &head)?)?;

    // (ii) alternating interior merges
    for i in 0..m {
        let sign = sign_of(i as i64 + 1);
        let merged = fac.a.basis_product(&a_args[i], &a_args[i + 1]);
        let mut elems: Vec<AlgElement<K>> = Vec::with_capacity(m);
        elems.extend(a_args[..i].iter().cloned().map(AlgElement::basis));
        elems.push(merged);
        elems.extend(a_args[i + 2..].iter().cloned().map(AlgElement::basis));
        let b_elems: Vec<AlgElement<K>> = b_args.iter().cloned().map(AlgElement::basis).collect();
        let v = include_in_x(fac, bd.sort(), &f.eval_elements(&elems, &b_elems));
        out = out.add(&v.scale(&sign))?;
    }

    // (iii) (-1)^{m+1} sum over the chain moving a_1 right past b^1..b^n
    let sign: K = sign_of(m as i64 + 1);
    let chain = twist_chain_right(&fac.twist, &a_args[m], b_args)?;
    for (tuple, c) in chain.terms() {
        let b_part = &tuple[..n];
        let a_last = &tuple[n];
        let v = include_in_x(fac, bd.sort(), &f.eval(&a_args[..m], b_part));
        // right multiplication by 1_B (x) a_last
        let mut shifted = TensorElement::zero(vec![Side::B, Side::A]);
        for (bt, at, cv) in v.x_terms() {
            let prod = fac.a.basis_product(at, a_last);
            for (ma, ka) in prod.terms() {
                shifted.add_term(vec![bt.clone(), ma.clone()], &cv.mul(ka));
            }
        }
        out = out.add(&shifted.scale(&sign.mul(c)))?;
    }

    Ok(out)
}

/// d_B: C^{m,n} -> C^{m,n+1}. Mirror of d_A: the first B argument twisted
/// left past every A slot and multiplied from the left, the alternating
/// interior merges, and right multiplication by the new last argument.
/// For m = 0 this is the Hochschild coboundary of B valued in B; for n = 0
/// the A-valued edge cochain is included into X first.
pub fn d_b<K: Scalar>(fac: &Factorisation<K>, f: &Cochain<K>) -> Cochain<K> {
    let bd = f.bidegree();
    let out_bd = BiDegree::new(bd.m, bd.n + 1);
    let fac = fac.clone();
    let f = f.clone();
    Cochain::from_closure(out_bd, move |a_args, b_args| {
        eval_d_b(&fac, &f, a_args, b_args).expect("d_B evaluation")
    })
}

fn eval_d_b<K: Scalar>(
    fac: &Factorisation<K>,
    f: &Cochain<K>,
    a_args: &[Monomial],
    b_args: &[Monomial],
) -> Result<TensorElement<K>> {
    let bd = f.bidegree();
    let m = bd.m;
    let n = bd.n;
    debug_assert_eq!(a_args.len(), m);
    debug_assert_eq!(b_args.len(), n + 1);

    if m == 0 {
        // Hochschild coboundary of B, valued in B
        let mut out = AlgElement::zero();
        let head = tensor_to_alg(&f.eval(&[], &b_args[1..]));
        acc_alg(&mut out, &fac.b.multiply(&AlgElement::basis(b_args[0].clone()), &head), &K::one());
        for i in 1..=n {
            let sign = sign_of(i as i64);
            let merged = fac.b.basis_product(&b_args[i - 1], &b_args[i]);
            let mut elems: Vec<AlgElement<K>> = Vec::with_capacity(n);
            elems.extend(b_args[..i - 1].iter().cloned().map(AlgElement::basis));
            elems.push(merged);
            elems.extend(b_args[i + 1..].iter().cloned().map(AlgElement::basis));
            let v = tensor_to_alg(&f.eval_elements(&[], &elems));
            acc_alg(&mut out, &v, &sign);
        }
        let sign = sign_of(n as i64 + 1);
        let tail = tensor_to_alg(&f.eval(&[], &b_args[..n]));
        let v = fac.b.multiply(&tail, &AlgElement::basis(b_args[n].clone()));
        acc_alg(&mut out, &v, &sign);
        return Ok(alg_to_tensor(&out, Side::B));
    }

    let mut out = TensorElement::zero(vec![Side::B, Side::A]);

    // (i) sum over the chain moving b^1 left past a_m..a_1
    let chain = twist_chain_left(&fac.twist, a_args, &b_args[0])?;
    for (tuple, c) in chain.terms() {
        let b_moved = &tuple[0];
        let a_part = &tuple[1..];
        let v = include_in_x(fac, bd.sort(), &f.eval(a_part, &b_args[1..]));
        //  left multiplication by b_moved (x) 1_A
        let mut shifted = TensorElement::zero(vec![Side::B, Side::A]);
        for (bt, at, cv) in v.x_terms() {
            let prod = fac.b.basis_product(b_moved, bt);
            for (mb, kb) in prod.terms() {
                shifted.add_term(vec![mb.clone(), at.clone()], &cv.mul(kb));
            }
        }
        out = out.add(&shifted.scale(c))?;
    }

    // (ii) alternating interior merges over b^i b^{i+1}
    for i in 1..=n {
        let sign = sign_of(i as i64);
        let merged = fac.b.basis_product(&b_args[i - 1], &b_args[i]);
        let mut elems: Vec<AlgElement<K>> = Vec::with_capacity(n);
        elems.extend(b_args[..i - 1].iter().cloned().map(AlgElement::basis));
        elems.push(merged);
        elems.extend(b_args[i + 1..].iter().cloned().map(AlgElement::basis));
        let a_elems: Vec<AlgElement<K>> = a_args.iter().cloned().map(AlgElement::basis).collect();
        let v = include_in_x(fac, bd.sort(), &f.eval_elements(&a_elems, &elems));
        out = out.add(&v.scale(&sign))?;
    }

    // (iii) (-1)^{n+1} f(...) . b^{n+1}
    let sign = sign_of(n as i64 + 1);
    let v = include_in_x(fac, bd.sort(), &f.eval(a_args, &b_args[..n]));
    let right = TensorElement::x_basis(b_args[n].clone(), fac.a.unit());
    let v = x_multiply(&fac.twist, &v, &right)?;
    out = out.add(&v.scale(&sign))?;

    Ok(out)
}

fn sign_of<K: Scalar>(e: i64) -> K {
    if e.rem_euclid(2) == 0 {
        K::one()
    } else {
        K::one().neg()
    }
}

/// Collapses a one-slot tensor value to an algebra element.
pub fn tensor_to_alg<K: Scalar>(v: &TensorElement<K>) -> AlgElement<K> {
    debug_assert_eq!(v.signature().len(), 1);
    let mut out = AlgElement::zero();
    for (t, c) in v.terms() {
        out.add_term(t[0].clone(), c);
    }
    out
}

/// Wraps an algebra element as a one-slot tensor value.
pub fn alg_to_tensor<K: Scalar>(v: &AlgElement<K>, side: Side) -> TensorElement<K> {
    let mut out = TensorElement::zero(vec![side]);
    for (m, c) in v.terms() {
        out.add_term(vec![m.clone()], c);
    }
    out
}

fn acc_alg<K: Scalar>(acc: &mut AlgElement<K>, v: &AlgElement<K>, scale: &K) {
    for (m, c) in v.terms() {
        acc.add_term(m.clone(), &c.mul(scale));
    }
}

/// An element of the total complex C^k = Hom(A^k,A) + sum Hom(A^m (x) B^n, X)
/// + Hom(B^k,B); missing components are zero.
#[derive(Clone, Debug)]
pub struct TotalCochain<K: Scalar> {
    degree: usize,
    components: BTreeMap<BiDegree, Cochain<K>>,
}

impl<K: Scalar> TotalCochain<K> {
    pub fn new(degree: usize) -> Self {
        assert!(degree >= 1);
        TotalCochain {
            degree,
            components: BTreeMap::new(),
        }
    }

    pub fn with_component(mut self, c: Cochain<K>) -> Self {
        self.set_component(c);
        self
    }

    pub fn set_component(&mut self, c: Cochain<K>) {
        assert_eq!(c.bidegree().total(), self.degree, "component degree mismatch");
        self.components.insert(c.bidegree(), c);
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn component(&self, m: usize, n: usize) -> Cochain<K> {
        let bd = BiDegree::new(m, n);
        assert_eq!(bd.total(), self.degree);
        self.components
            .get(&bd)
            .cloned()
            .unwrap_or_else(|| Cochain::zero(bd))
    }

    pub fn components(&self) -> impl Iterator<Item = (&BiDegree, &Cochain<K>)> {
        self.components.iter()
    }

    pub fn bidegrees(degree: usize) -> Vec<BiDegree> {
        (0..=degree)
            .map(|n| BiDegree::new(degree - n, n))
            .collect()
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        assert_eq!(self.degree, rhs.degree);
        let mut out = TotalCochain::new(self.degree);
        for bd in Self::bidegrees(self.degree) {
            let f = self.component(bd.m, bd.n);
            let g = rhs.component(bd.m, bd.n);
            if f.is_zero_rule() && g.is_zero_rule() {
                continue;
            }
            out.set_component(cochain_add(&f, &g)?);
        }
        Ok(out)
    }

    pub fn scale(&self, s: &K) -> Self {
        let mut out = TotalCochain::new(self.degree);
        for (_, c) in self.components() {
            out.set_component(cochain_scale(c, s));
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.add(&rhs.scale(&K::one().neg()))
    }
}

/// The total differential: component (m,n) contributes d_A into (m+1,n) and
/// (-1)^m d_B into (m,n+1).
pub fn total_d<K: Scalar>(fac: &Factorisation<K>, c: &TotalCochain<K>) -> Result<TotalCochain<K>> {
    let mut out = TotalCochain::new(c.degree() + 1);
    for (bd, f) in c.components() {
        if f.is_zero_rule() {
            continue;
        }
        let da = d_a(fac, f);
        let existing = out.component(bd.m + 1, bd.n);
        out.set_component(cochain_add(&existing, &da)?);

        let db = cochain_scale(&d_b(fac, f), &sign_of(bd.m as i64));
        let existing = out.component(bd.m, bd.n + 1);
        out.set_component(cochain_add(&existing, &db)?);
    }
    Ok(out)
}

/// Evaluates every component of a total cochain on all tuples within the
/// degree cap; returns the first nonzero value found, if any.
pub fn total_cochain_nonzero_witness<K: Scalar>(
    fac: &Factorisation<K>,
    c: &TotalCochain<K>,
    cap: u32,
) -> Option<(BiDegree, Vec<Monomial>, Vec<Monomial>, String)> {
    for bd in TotalCochain::<K>::bidegrees(c.degree()) {
        let f = c.component(bd.m, bd.n);
        if f.is_zero_rule() {
            continue;
        }
        for (a_args, b_args) in fac.enumerate_tuples(bd.m, bd.n, cap) {
            let v = f.eval(&a_args, &b_args);
            if !v.is_zero() {
                let shown = crate::twist::format_x(&fac.a, &fac.b, &v);
                return Some((bd, a_args, b_args, shown));
            }
        }
    }
    None
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::algebra::BasedAlgebra;
    use crate::scalar::Rat;
    use crate::twist::{extend_from_generators, TensorElement};

    fn mono(exps: &[u32]) -> Monomial {
        Monomial(exps.to_vec())
    }

    pub(crate) fn quaternion_fac() -> Factorisation<Rat> {
        let one = AlgElement::basis(mono(&[0]));
        let i = AlgElement::basis(mono(&[1]));
        let table = vec![vec![one.clone(), i.clone()], vec![i.clone(), one.neg()]];
        let c1 = Arc::new(BasedAlgebra::table("C_i", &["1", "i"], 0, table.clone()).unwrap());
        let c2 = Arc::new(BasedAlgebra::table("C_j", &["1", "j"], 0, table).unwrap());
        let mut rules = BTreeMap::new();
        rules.insert(
            (mono(&[1]), mono(&[1])),
            TensorElement::x_term(mono(&[1]), mono(&[1]), Rat::from_int(-1)),
        );
        Factorisation::new(extend_from_generators(c1, c2, rules, 2).unwrap())
    }

    fn plane_fac() -> Factorisation<Rat> {
        let a = Arc::new(BasedAlgebra::commutative_poly("A", &["a", "abar"]).unwrap());
        let b = Arc::new(BasedAlgebra::commutative_poly("B", &["b"]).unwrap());
        Factorisation::new(crate::twist::TwistMap::flip(a, b))
    }

    fn identity_cochain_a() -> Cochain<Rat> {
        Cochain::from_closure(BiDegree::new(1, 0), |a_args, _| {
            TensorElement::term(vec![Side::A], vec![a_args[0].clone()], Rat::one())
        })
    }

    #[test]
    fn d_a_of_identity_is_the_product() {
        // d_A(id)(a2, a1) = a2 a1 on the quaternion factorisation
        let fac = quaternion_fac();
        let d = d_a(&fac, &identity_cochain_a());
        for (a_args, _) in fac.enumerate_tuples(2, 0, 2) {
            let got = d.eval(&a_args, &[]);
            let want = alg_to_tensor(&fac.a.basis_product(&a_args[0], &a_args[1]), Side::A);
            assert_eq!(got, want, "{a_args:?}");
        }
    }

    #[test]
    fn d_a_on_edge_b_matches_direct_formula() {
        // beta in Hom(B,B): d_A beta(a, b) = a beta(b) - sum_nu beta(b_nu) a^nu
        let fac = quaternion_fac();
        let beta = Cochain::from_closure(BiDegree::new(0, 1), |_, b_args| {
            // beta(b) = b + 2*1
            let mut v = TensorElement::term(vec![Side::B], vec![b_args[0].clone()], Rat::one());
            v.add_term(vec![mono(&[0])], &Rat::from_int(2));
            v
        });
        let d = d_a(&fac, &beta);
        for (a_args, b_args) in fac.enumerate_tuples(1, 1, 2) {
            let got = d.eval(&a_args, &b_args);
            // direct: a * (beta(b) (x) 1) - sum_nu (beta(b_nu) (x) 1) * a^nu
            let beta_b = include_in_x(&fac, ValueSort::EdgeB, &beta.eval(&[], &b_args));
            let left = x_multiply(
                &fac.twist,
                &TensorElement::x_basis(fac.b.unit(), a_args[0].clone()),
                &beta_b,
            )
            .unwrap();
            let twisted = fac.twist.apply_basis(&a_args[0], &b_args[0]).unwrap();
            let mut right = TensorElement::zero(vec![Side::B, Side::A]);
            for (b_nu, a_nu, c) in twisted.x_terms() {
                let v = include_in_x(&fac, ValueSort::EdgeB, &beta.eval(&[], &[b_nu.clone()]));
                for (bt, at, cv) in v.x_terms() {
                    let prod = fac.a.basis_product(at, a_nu);
                    for (ma, ka) in prod.terms() {
                        right.add_term(vec![bt.clone(), ma.clone()], &cv.mul(ka).mul(c));
                    }
                }
            }
            let want = left.sub(&right).unwrap();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn d_b_on_edge_a_matches_direct_formula() {
        // alpha in Hom(A,A): d_B alpha(a, b) = sum_nu b_nu alpha(a^nu) - alpha(a) b
        let fac = quaternion_fac();
        let alpha = Cochain::from_closure(BiDegree::new(1, 0), |a_args, _| {
            // alpha(a) = 3a
            TensorElement::term(vec![Side::A], vec![a_args[0].clone()], Rat::from_int(3))
        });
        let d = d_b(&fac, &alpha);
        for (a_args, b_args) in fac.enumerate_tuples(1, 1, 2) {
            let got = d.eval(&a_args, &b_args);
            let twisted = fac.twist.apply_basis(&a_args[0], &b_args[0]).unwrap();
            let mut first = TensorElement::zero(vec![Side::B, Side::A]);
            for (b_nu, a_nu, c) in twisted.x_terms() {
                let v = include_in_x(&fac, ValueSort::EdgeA, &alpha.eval(&[a_nu.clone()], &[]));
                for (bt, at, cv) in v.x_terms() {
                    let prod = fac.b.basis_product(b_nu, bt);
                    for (mb, kb) in prod.terms() {
                        first.add_term(vec![mb.clone(), at.clone()], &cv.mul(kb).mul(c));
                    }
                }
            }
            let alpha_a = include_in_x(&fac, ValueSort::EdgeA, &alpha.eval(&a_args, &[]));
            let second = x_multiply(
                &fac.twist,
                &alpha_a,
                &TensorElement::x_basis(b_args[0].clone(), fac.a.unit()),
            )
            .unwrap();
            let want = first.sub(&second).unwrap();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn zero_cochains_have_zero_coboundaries() {
        let fac = plane_fac();
        let z = Cochain::<Rat>::zero(BiDegree::new(1, 1));
        let da = d_a(&fac, &z);
        let db = d_b(&fac, &z);
        for (a_args, b_args) in fac.enumerate_tuples(2, 1, 3) {
            assert!(da.eval(&a_args, &b_args).is_zero());
        }
        for (a_args, b_args) in fac.enumerate_tuples(1, 2, 3) {
            assert!(db.eval(&a_args, &b_args).is_zero());
        }
    }

    #[test]
    fn differentials_square_to_zero_and_commute() {
        // d_A d_A = 0, d_B d_B = 0, d_A d_B = d_B d_A on a (1,1) cochain
        let fac = plane_fac();
        let f = Cochain::from_closure(BiDegree::new(1, 1), |a_args, b_args| {
            // f(a^k abar^l, b^r) = (k+r) * b^{r+1} (x) a^k abar^l  + l * 1 (x) 1
            let (k, l) = (a_args[0].0[0], a_args[0].0[1]);
            let r = b_args[0].0[0];
            let mut v = TensorElement::x_term(
                Monomial(vec![r + 1]),
                a_args[0].clone(),
                Rat::from_int((k + r) as i64),
            );
            v.add_term(
                vec![Monomial(vec![0]), Monomial(vec![0, 0])],
                &Rat::from_int(l as i64),
            );
            v
        });
        let dada = d_a(&fac, &d_a(&fac, &f));
        for (a_args, b_args) in fac.enumerate_tuples(3, 1, 4) {
            assert!(dada.eval(&a_args, &b_args).is_zero(), "{a_args:?} {b_args:?}");
        }
        let dbdb = d_b(&fac, &d_b(&fac, &f));
        for (a_args, b_args) in fac.enumerate_tuples(1, 3, 4) {
            assert!(dbdb.eval(&a_args, &b_args).is_zero());
        }
        let dadb = d_a(&fac, &d_b(&fac, &f));
        let dbda = d_b(&fac, &d_a(&fac, &f));
        for (a_args, b_args) in fac.enumerate_tuples(2, 2, 4) {
            assert_eq!(dadb.eval(&a_args, &b_args), dbda.eval(&a_args, &b_args));
        }
    }

    #[test]
    fn total_d_mixed_component_is_da_minus_db() {
        // D(alpha + beta) at (1,1) equals d_A beta - d_B alpha
        let fac = quaternion_fac();
        let alpha = identity_cochain_a();
        let beta = Cochain::from_closure(BiDegree::new(0, 1), |_, b_args| {
            TensorElement::term(vec![Side::B], vec![b_args[0].clone()], Rat::from_int(2))
        });
        let tc = TotalCochain::new(1)
            .with_component(alpha.clone())
            .with_component(beta.clone());
        let d = total_d(&fac, &tc).unwrap();
        let mixed = d.component(1, 1);
        let want = cochain_sub(&d_a(&fac, &beta), &d_b(&fac, &alpha)).unwrap();
        for (a_args, b_args) in fac.enumerate_tuples(1, 1, 2) {
            assert_eq!(mixed.eval(&a_args, &b_args), want.eval(&a_args, &b_args));
        }
        // edge components: (2,0) is d_A alpha, (0,2) is (+1) d_B beta
        let e20 = d.component(2, 0);
        let wa = d_a(&fac, &alpha);
        for (a_args, _) in fac.enumerate_tuples(2, 0, 2) {
            assert_eq!(e20.eval(&a_args, &[]), wa.eval(&a_args, &[]));
        }
        let e02 = d.component(0, 2);
        let wb = d_b(&fac, &beta);
        for (_, b_args) in fac.enumerate_tuples(0, 2, 2) {
            assert_eq!(e02.eval(&[], &b_args), wb.eval(&[], &b_args));
        }
    }

    #[test]
    fn total_d_squares_to_zero_on_quaternions() {
        let fac = quaternion_fac();
        // a cochain with all three degree-1... degree-2 components present
        let f20 = Cochain::from_closure(BiDegree::new(2, 0), |a_args, _| {
            let d = (a_args[0].0[0] + a_args[1].0[0]) as i64;
            TensorElement::term(vec![Side::A], vec![a_args[1].clone()], Rat::from_int(d))
        });
        let f11 = Cochain::from_closure(BiDegree::new(1, 1), |a_args, b_args| {
            TensorElement::x_term(b_args[0].clone(), a_args[0].clone(), Rat::from_int(5))
        });
        let f02 = Cochain::from_closure(BiDegree::new(0, 2), |_, b_args| {
            let d = (b_args[0].0[0] * b_args[1].0[0]) as i64;
            TensorElement::term(vec![Side::B], vec![Monomial(vec![0])], Rat::from_int(d))
        });
        let tc = TotalCochain::new(2)
            .with_component(f20)
            .with_component(f11)
            .with_component(f02);
        let dd = total_d(&fac, &total_d(&fac, &tc).unwrap()).unwrap();
        assert!(total_cochain_nonzero_witness(&fac, &dd, 4).is_none());
    }

    #[test]
    fn cochain_arith_is_pointwise() {
        let fac = plane_fac();
        let f = Cochain::from_closure(BiDegree::new(1, 1), |a_args, b_args| {
            TensorElement::x_term(b_args[0].clone(), a_args[0].clone(), Rat::from_int(3))
        });
        let zero = Cochain::zero(BiDegree::new(1, 1));
        let two = Rat::from_int(2);
        let sum = cochain_add(&f, &zero).unwrap();
        let diff = cochain_sub(&f, &f).unwrap();
        let scaled = cochain_scale(&cochain_add(&f, &f).unwrap(), &two);
        let four_f = cochain_scale(&f, &Rat::from_int(4));
        for (a_args, b_args) in fac.enumerate_tuples(1, 1, 3) {
            assert_eq!(sum.eval(&a_args, &b_args), f.eval(&a_args, &b_args));
            assert!(diff.eval(&a_args, &b_args).is_zero());
            assert_eq!(scaled.eval(&a_args, &b_args), four_f.eval(&a_args, &b_args));
        }
        assert!(cochain_add(&f, &Cochain::zero(BiDegree::new(2, 0))).is_err());
    }
}
