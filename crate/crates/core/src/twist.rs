//! Twisting maps Psi: A (x) B -> B (x) A: construction from generator rules,
//! verification of the factorisation axioms, the product of X(B,A), and the
//! iterated-twist chain operators the coboundaries are built from.
//!
//! Conventions. Psi(a (x) b) = sum_nu b_nu (x) a^nu. The two axioms read
//!   Psi(mu_A (x) B) = (B (x) mu_A)(Psi (x) A)(A (x) Psi),
//!   Psi(A (x) mu_B) = (mu_B (x) A)(B (x) Psi)(Psi (x) B),
//! together with Psi(1_A (x) b) = b (x) 1_A and Psi(a (x) 1_B) = 1_B (x) a.
//! The second equation's leading factor is the type-correct (mu_B (x) A):
//! composability forces it, and the worked table examples confirm it.

use crate::algebra::{AlgElement, BasedAlgebra, Monomial};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::sync::{Arc, Mutex};

/// Which algebra a tensor slot belongs to.
#[derive(Clone, Copy, PartialEq, Eq, Debug, PartialOrd, Ord)]
pub enum Side {
    B,
    A,
}

/// Ordered list of component algebras, e.g. `[B, A]` for X or `[B, B, A]`
/// for a chain output.
pub type Signature = Vec<Side>;

fn signature_str(sig: &Signature) -> String {
    sig.iter()
        .map(|s| match s {
            Side::A => "A",
            Side::B => "B",
        })
        .collect::<Vec<_>>()
        .join(",")
}

/// A finite linear combination of basis tensors over a fixed signature.
/// Elements of X are the `[B, A]` case.
#[derive(Clone, PartialEq, Debug)]
pub struct TensorElement<K: Scalar> {
    signature: Signature,
    terms: BTreeMap<Vec<Monomial>, K>,
}

impl<K: Scalar> TensorElement<K> {
    pub fn zero(signature: Signature) -> Self {
        TensorElement {
            signature,
            terms: BTreeMap::new(),
        }
    }

    pub fn term(signature: Signature, tuple: Vec<Monomial>, coeff: K) -> Self {
        debug_assert_eq!(signature.len(), tuple.len());
        let mut out = TensorElement::zero(signature);
        out.add_term(tuple, &coeff);
        out
    }

    /// A single basis tensor b (x) a of X.
    pub fn x_basis(b: Monomial, a: Monomial) -> Self {
        TensorElement::term(vec![Side::B, Side::A], vec![b, a], K::one())
    }

    pub fn x_term(b: Monomial, a: Monomial, coeff: K) -> Self {
        TensorElement::term(vec![Side::B, Side::A], vec![b, a], coeff)
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Monomial>, &K)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add_term(&mut self, tuple: Vec<Monomial>, coeff: &K) {
        debug_assert_eq!(tuple.len(), self.signature.len());
        if coeff.is_zero() {
            return;
        }
        match self.terms.get_mut(&tuple) {
            Some(c) => {
                let s = c.add(coeff);
                if s.is_zero() {
                    self.terms.remove(&tuple);
                } else {
                    *c = s;
                }
            }
            None => {
                self.terms.insert(tuple, coeff.clone());
            }
        }
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        if self.signature != rhs.signature {
            return Err(Error::SignatureMismatch {
                expected: signature_str(&self.signature),
                got: signature_str(&rhs.signature),
            });
        }
        let mut out = self.clone();
        for (t, c) in rhs.terms() {
            out.add_term(t.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        TensorElement {
            signature: self.signature.clone(),
            terms: self.terms.iter().map(|(t, c)| (t.clone(), c.neg())).collect(),
        }
    }

    pub fn scale(&self, s: &K) -> Self {
        if s.is_zero() {
            return TensorElement::zero(self.signature.clone());
        }
        let mut out = TensorElement::zero(self.signature.clone());
        for (t, c) in self.terms() {
            out.add_term(t.clone(), &c.mul(s));
        }
        out
    }

    pub fn map_coeffs<S: Scalar>(&self, f: &impl Fn(&K) -> S) -> TensorElement<S> {
        let mut out = TensorElement::zero(self.signature.clone());
        for (t, c) in self.terms() {
            out.add_term(t.clone(), &f(c));
        }
        out
    }

    /// Splits an X element into (b, a, coeff) triples.
    pub fn x_terms(&self) -> impl Iterator<Item = (&Monomial, &Monomial, &K)> {
        debug_assert_eq!(self.signature, vec![Side::B, Side::A]);
        self.terms.iter().map(|(t, c)| (&t[0], &t[1], c))
    }
}

/// b (x) a from elements rather than monomials.
pub fn tensor_of_elements<K: Scalar>(b: &AlgElement<K>, a: &AlgElement<K>) -> TensorElement<K> {
    let mut out = TensorElement::zero(vec![Side::B, Side::A]);
    for (mb, cb) in b.terms() {
        for (ma, ca) in a.terms() {
            out.add_term(vec![mb.clone(), ma.clone()], &cb.mul(ca));
        }
    }
    out
}

type TwistFn<K> = dyn Fn(&Monomial, &Monomial) -> TensorElement<K> + Send + Sync;

#[derive(Clone)]
enum TwistKind<K: Scalar> {
    /// Psi(a (x) b) = b (x) a.
    Flip,
    /// Psi(a^k abar^l (x) b^r) = q^{l r} b^r (x) a^k abar^l.
    QFlip { q: K },
    /// Recursive extension of rules on generator pairs.
    Generators {
        rules: Arc<BTreeMap<(Monomial, Monomial), TensorElement<K>>>,
        watermark: u32,
    },
    /// Arbitrary rule on basis pairs; used for closed-form deformed twists.
    Closure(Arc<TwistFn<K>>),
}

/// The twisting map of a factorisation, defined on basis pairs and extended
/// bilinearly. Values are memoized per basis pair.
#[derive(Clone)]
pub struct TwistMap<K: Scalar> {
    a: Arc<BasedAlgebra<K>>,
    b: Arc<BasedAlgebra<K>>,
    kind: TwistKind<K>,
    memo: Arc<Mutex<HashMap<(Monomial, Monomial), TensorElement<K>>>>,
}

impl<K: Scalar> fmt::Debug for TwistMap<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.kind {
            TwistKind::Flip => "flip",
            TwistKind::QFlip { .. } => "q-flip",
            TwistKind::Generators { .. } => "generator-extension",
            TwistKind::Closure(_) => "closure",
        };
        write!(f, "TwistMap[{kind}] on ({}, {})", self.a.name, self.b.name)
    }
}

impl<K: Scalar> TwistMap<K> {
    pub fn flip(a: Arc<BasedAlgebra<K>>, b: Arc<BasedAlgebra<K>>) -> Self {
        TwistMap {
            a,
            b,
            kind: TwistKind::Flip,
            memo: Arc::new(Mutex::new(HashMap::new())),
        }
    }

    /// The weighted flip of the quantum plane: A must be the two-generator
    /// plane, B a one-generator polynomial algebra.
    pub fn q_flip(a: Arc<BasedAlgebra<K>>, b: Arc<BasedAlgebra<K>>, q: K) -> Self {
        TwistMap {
            a,
            b,
            kind: TwistKind::QFlip { q },
            memo: Arc::new(Mutex::new(HashMap::new())),
        }
    }

    pub fn from_closure(
        a: Arc<BasedAlgebra<K>>,
        b: Arc<BasedAlgebra<K>>,
        rule: impl Fn(&Monomial, &Monomial) -> TensorElement<K> + Send + Sync + 'static,
    ) -> Self {
        TwistMap {
            a,
            b,
            kind: TwistKind::Closure(Arc::new(rule)),
            memo: Arc::new(Mutex::new(HashMap::new())),
        }
    }

    pub fn algebra_a(&self) -> &Arc<BasedAlgebra<K>> {
        &self.a
    }

    /// Coarse constructor kind; used by document export.
    pub fn descriptor(&self) -> TwistDescriptor {
        match &self.kind {
            TwistKind::Flip => TwistDescriptor::Flip,
            TwistKind::QFlip { .. } => TwistDescriptor::QFlip,
            TwistKind::Generators { .. } => TwistDescriptor::Generators,
            TwistKind::Closure(_) => TwistDescriptor::Closure,
        }
    }

    pub fn algebra_b(&self) -> &Arc<BasedAlgebra<K>> {
        &self.b
    }

    /// True when chain outputs use exactly the input monomials (flip-like
    /// twists); the capped solver relies on this to keep its rows exact.
    pub fn degree_preserving(&self) -> bool {
        match &self.kind {
            TwistKind::Flip | TwistKind::QFlip { .. } => true,
            // finite bases are enumerated whole, so preservation is moot
            TwistKind::Generators { .. } | TwistKind::Closure(_) => {
                self.a.shape().finite_dimension().is_some()
                    && self.b.shape().finite_dimension().is_some()
            }
        }
    }

    /// Psi on a basis pair.
    pub fn apply_basis(&self, ma: &Monomial, mb: &Monomial) -> Result<TensorElement<K>> {
        match &self.kind {
            TwistKind::Flip => Ok(TensorElement::x_basis(mb.clone(), ma.clone())),
            TwistKind::QFlip { q } => {
                let l = ma.0[1] as u64;
                let r = mb.0[0] as u64;
                let w = crate::algebra::pow_scalar(q, l * r);
                Ok(TensorElement::x_term(mb.clone(), ma.clone(), w))
            }
            TwistKind::Closure(rule) => Ok(rule(ma, mb)),
            TwistKind::Generators { rules, watermark } => {
                if let Some(hit) = self.memo.lock().unwrap().get(&(ma.clone(), mb.clone())) {
                    return Ok(hit.clone());
                }
                let mut in_progress = HashSet::new();
                self.extend_pair(ma, mb, rules, *watermark, &mut in_progress, SplitChoice::First)
            }
        }
    }

    /// Bilinear extension to element pairs.
    pub fn apply_elements(&self, a: &AlgElement<K>, b: &AlgElement<K>) -> Result<TensorElement<K>> {
        let mut out = TensorElement::zero(vec![Side::B, Side::A]);
        for (ma, ca) in a.terms() {
            for (mb, cb) in b.terms() {
                let v = self.apply_basis(ma, mb)?.scale(&ca.mul(cb));
                out = out.add(&v)?;
            }
        }
        Ok(out)
    }

    fn extend_pair(
        &self,
        ma: &Monomial,
        mb: &Monomial,
        rules: &BTreeMap<(Monomial, Monomial), TensorElement<K>>,
        watermark: u32,
        in_progress: &mut HashSet<(Monomial, Monomial)>,
        split: SplitChoice,
    ) -> Result<TensorElement<K>> {
        let key = (ma.clone(), mb.clone());
        if split == SplitChoice::First {
            if let Some(hit) = self.memo.lock().unwrap().get(&key) {
                return Ok(hit.clone());
            }
        }
        if self.a.degree(ma) + self.b.degree(mb) > watermark || !in_progress.insert(key.clone()) {
            return Err(Error::NonTerminating {
                a: self.a.shape().format_monomial(ma),
                b: self.b.shape().format_monomial(mb),
                watermark,
            });
        }
        let value = self.extend_pair_inner(ma, mb, rules, watermark, in_progress, split)?;
        in_progress.remove(&key);
        if split == SplitChoice::First {
            self.memo.lock().unwrap().insert(key, value.clone());
        }
        Ok(value)
    }

    fn extend_pair_inner(
        &self,
        ma: &Monomial,
        mb: &Monomial,
        rules: &BTreeMap<(Monomial, Monomial), TensorElement<K>>,
        watermark: u32,
        in_progress: &mut HashSet<(Monomial, Monomial)>,
        split: SplitChoice,
    ) -> Result<TensorElement<K>> {
        // unit conditions anchor the recursion
        if *ma == self.a.unit() {
            return Ok(TensorElement::x_basis(mb.clone(), self.a.unit()));
        }
        if *mb == self.b.unit() {
            return Ok(TensorElement::x_basis(self.b.unit(), ma.clone()));
        }
        if self.a.degree(ma) >= 2 {
            // split ma = c * (g * rest) and use
            // Psi(g rest (x) b) = (B (x) mu_A)(Psi (x) A)(A (x) Psi)(g (x) rest (x) b)
            let (g, rest, c) = split_monomial(&self.a, ma, split)?;
            let c_inv = c.try_inv().ok_or(Error::DivisionByZero)?;
            let inner = self.extend_pair(&rest, mb, rules, watermark, in_progress, split)?;
            let mut out = TensorElement::zero(vec![Side::B, Side::A]);
            for (b_nu, a_nu, c_nu) in inner.x_terms() {
                let outer = self.extend_pair(&g, b_nu, rules, watermark, in_progress, split)?;
                for (b_mu, a_mu, c_mu) in outer.x_terms() {
                    let prod = self.a.basis_product(a_mu, a_nu);
                    let coeff = c_inv.mul(&c_nu.mul(c_mu));
                    for (m, k) in prod.terms() {
                        out.add_term(vec![b_mu.clone(), m.clone()], &k.mul(&coeff));
                    }
                }
            }
            Ok(out)
        } else if self.b.degree(mb) >= 2 {
            // split mb = c * (h * rest) and use
            // Psi(a (x) h rest) = (mu_B (x) A)(B (x) Psi)(Psi (x) B)(a (x) h (x) rest)
            let (h, rest, c) = split_monomial(&self.b, mb, split)?;
            let c_inv = c.try_inv().ok_or(Error::DivisionByZero)?;
            let first = self.extend_pair(ma, &h, rules, watermark, in_progress, split)?;
            let mut out = TensorElement::zero(vec![Side::B, Side::A]);
            for (b_nu, a_nu, c1) in first.x_terms() {
                let second = self.extend_pair(a_nu, &rest, rules, watermark, in_progress, split)?;
                for (b_mu, a_mu, c2) in second.x_terms() {
                    let prod = self.b.basis_product(b_nu, b_mu);
                    let coeff = c_inv.mul(&c1.mul(c2));
                    for (m, k) in prod.terms() {
                        out.add_term(vec![m.clone(), a_mu.clone()], &k.mul(&coeff));
                    }
                }
            }
            Ok(out)
        } else {
            // a generator pair
            rules.get(&(ma.clone(), mb.clone())).cloned().ok_or_else(|| {
                Error::MissingGeneratorRule {
                    a_gen: self.a.shape().format_monomial(ma),
                    b_gen: self.b.shape().format_monomial(mb),
                }
            })
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TwistDescriptor {
    Flip,
    QFlip,
    Generators,
    Closure,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum SplitChoice {
    /// Peel the first generator in canonical order (the memoized default).
    First,
    /// Peel the last generator; used to detect ambiguous extensions.
    Last,
}

/// Writes `m = c * (g * rest)` with `g` a single generator, i.e. finds `g`
/// and `rest` with `basis_product(g, rest) = c * m` for an invertible `c`.
fn split_monomial<K: Scalar>(
    alg: &BasedAlgebra<K>,
    m: &Monomial,
    split: SplitChoice,
) -> Result<(Monomial, Monomial, K)> {
    let gens = alg.generators();
    let candidates: Vec<(Monomial, Monomial)> = match alg.shape() {
        crate::algebra::BasisShape::Poly { .. } => {
            let pick = |idx: usize| {
                let mut g = vec![0u32; m.0.len()];
                g[idx] = 1;
                let mut rest = m.0.clone();
                rest[idx] -= 1;
                (Monomial(g), Monomial(rest))
            };
            let nonzero: Vec<usize> =
                (0..m.0.len()).filter(|&i| m.0[i] > 0).collect();
            match split {
                SplitChoice::First => vec![pick(nonzero[0])],
                SplitChoice::Last => vec![pick(*nonzero.last().unwrap())],
            }
        }
        crate::algebra::BasisShape::Table { .. } => {
            // search generator x slot pairs whose product is a multiple of m
            let mut found = Vec::new();
            for (_, g) in &gens {
                for slot in alg.shape().enumerate(0) {
                    let p = alg.basis_product(g, &slot);
                    if p.num_terms() == 1 {
                        let (pm, _) = p.terms().next().unwrap();
                        if pm == m {
                            found.push((g.clone(), slot));
                        }
                    }
                }
            }
            match split {
                SplitChoice::First => found.into_iter().take(1).collect(),
                SplitChoice::Last => {
                    let last = found.pop();
                    last.into_iter().collect()
                }
            }
        }
    };
    let (g, rest) = candidates.into_iter().next().ok_or_else(|| {
        Error::InvalidInput(format!(
            "cannot split monomial {}",
            alg.shape().format_monomial(m)
        ))
    })?;
    let p = alg.basis_product(&g, &rest);
    if p.num_terms() != 1 {
        return Err(Error::InvalidInput(format!(
            "splitting {} is not a single basis term",
            alg.shape().format_monomial(m)
        )));
    }
    let (pm, c) = p.terms().next().unwrap();
    if pm != m {
        return Err(Error::InvalidInput(format!(
            "splitting {} does not reproduce it",
            alg.shape().format_monomial(m)
        )));
    }
    Ok((g, rest, c.clone()))
}

/// Builds a twisting map from rules on generator pairs by recursively
/// splitting monomials through the two factorisation axioms. Independence of
/// the splitting order is verified on construction up to `verify_degree`;
/// disagreement is an `AmbiguousExtension` error.
pub fn extend_from_generators<K: Scalar>(
    a: Arc<BasedAlgebra<K>>,
    b: Arc<BasedAlgebra<K>>,
    gen_rules: BTreeMap<(Monomial, Monomial), TensorElement<K>>,
    verify_degree: u32,
) -> Result<TwistMap<K>> {
    for (name, g) in a.generators() {
        for (bname, h) in b.generators() {
            if !gen_rules.contains_key(&(g.clone(), h.clone())) {
                return Err(Error::MissingGeneratorRule {
                    a_gen: name.clone(),
                    b_gen: bname,
                });
            }
        }
    }
    let watermark = 16 + 4 * verify_degree;
    let twist = TwistMap {
        a: a.clone(),
        b: b.clone(),
        kind: TwistKind::Generators {
            rules: Arc::new(gen_rules.clone()),
            watermark,
        },
        memo: Arc::new(Mutex::new(HashMap::new())),
    };
    // splitting-independence check
    for ma in a.shape().enumerate(verify_degree) {
        for mb in b.shape().enumerate(verify_degree) {
            if a.degree(&ma) + b.degree(&mb) > verify_degree {
                continue;
            }
            let first = twist.apply_basis(&ma, &mb)?;
            let mut in_progress = HashSet::new();
            let last = twist.extend_pair(
                &ma,
                &mb,
                match &twist.kind {
                    TwistKind::Generators { rules, .. } => rules,
                    _ => unreachable!(),
                },
                watermark,
                &mut in_progress,
                SplitChoice::Last,
            )?;
            if first != last {
                return Err(Error::AmbiguousExtension {
                    a: a.shape().format_monomial(&ma),
                    b: b.shape().format_monomial(&mb),
                });
            }
        }
    }
    Ok(twist)
}

/// The product of X(B,A): (b (x) a)(b' (x) a') = sum_nu (b b'_nu) (x) (a^nu a').
pub fn x_multiply<K: Scalar>(
    twist: &TwistMap<K>,
    x: &TensorElement<K>,
    y: &TensorElement<K>,
) -> Result<TensorElement<K>> {
    let mut out = TensorElement::zero(vec![Side::B, Side::A]);
    for (bx, ax, cx) in x.x_terms() {
        for (by, ay, cy) in y.x_terms() {
            let twisted = twist.apply_basis(ax, by)?;
            let c = cx.mul(cy);
            for (b_nu, a_nu, c_nu) in twisted.x_terms() {
                let bprod = twist.b.basis_product(bx, b_nu);
                let aprod = twist.a.basis_product(a_nu, ay);
                for (mb, kb) in bprod.terms() {
                    for (ma, ka) in aprod.terms() {
                        let coeff = c.mul(c_nu).mul(&kb.mul(ka));
                        out.add_term(vec![mb.clone(), ma.clone()], &coeff);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Left multiplication x . v in X by a single basis tensor factor.
pub fn x_left_multiply_basis<K: Scalar>(
    twist: &TwistMap<K>,
    b: &Monomial,
    a: &Monomial,
    v: &TensorElement<K>,
) -> Result<TensorElement<K>> {
    x_multiply(twist, &TensorElement::x_basis(b.clone(), a.clone()), v)
}

/// Moves a string of A factors left past one B factor:
/// input a_m (x) ... (x) a_1 (x) b, output sum b' (x) a_m' (x) ... (x) a_1'
/// by m applications of Psi, innermost (a_1) first.
pub fn twist_chain_left<K: Scalar>(
    twist: &TwistMap<K>,
    a_args: &[Monomial],
    b: &Monomial,
) -> Result<TensorElement<K>> {
    let m = a_args.len();
    if m == 0 {
        return Err(Error::InvalidInput("chain needs at least one A factor".into()));
    }
    let mut sig = vec![Side::B];
    sig.extend(std::iter::repeat(Side::A).take(m));
    // start from Psi(a_1 (x) b), then peel a_2, ..., a_m
    let base = twist.apply_basis(&a_args[m - 1], b)?;
    let mut acc = TensorElement::zero(vec![Side::B, Side::A]);
    acc = acc.add(&base)?;
    let mut current: Vec<(Vec<Monomial>, K)> = acc
        .terms()
        .map(|(t, c)| (t.clone(), c.clone()))
        .collect();
    for step in 1..m {
        let a_next = &a_args[m - 1 - step];
        let mut next: Vec<(Vec<Monomial>, K)> = Vec::new();
        for (tuple, coeff) in &current {
            let twisted = twist.apply_basis(a_next, &tuple[0])?;
            for (b_mu, a_mu, c_mu) in twisted.x_terms() {
                let mut t = Vec::with_capacity(tuple.len() + 1);
                t.push(b_mu.clone());
                t.push(a_mu.clone());
                t.extend(tuple[1..].iter().cloned());
                next.push((t, coeff.mul(c_mu)));
            }
        }
        current = next;
    }
    let mut out = TensorElement::zero(sig);
    for (t, c) in current {
        out.add_term(t, &c);
    }
    Ok(out)
}

/// Moves one A factor right past a string of B factors:
/// input a (x) b^1 (x) ... (x) b^n, output sum b^1' (x) ... (x) b^n' (x) a'
/// by n applications of Psi, leftmost (b^1) first.
pub fn twist_chain_right<K: Scalar>(
    twist: &TwistMap<K>,
    a: &Monomial,
    b_args: &[Monomial],
) -> Result<TensorElement<K>> {
    let n = b_args.len();
    if n == 0 {
        return Err(Error::InvalidInput("chain needs at least one B factor".into()));
    }
    let mut sig: Signature = std::iter::repeat(Side::B).take(n).collect();
    sig.push(Side::A);
    // tuples hold the already-twisted b factors followed by the moving a
    let mut current: Vec<(Vec<Monomial>, K)> = vec![(vec![a.clone()], K::one())];
    for b in b_args {
        let mut next = Vec::new();
        for (tuple, coeff) in &current {
            let moving = tuple.last().unwrap();
            let twisted = twist.apply_basis(moving, b)?;
            for (b_nu, a_nu, c_nu) in twisted.x_terms() {
                let mut t = tuple.clone();
                t.pop();
                t.push(b_nu.clone());
                t.push(a_nu.clone());
                next.push((t, coeff.mul(c_nu)));
            }
        }
        current = next;
    }
    let mut out = TensorElement::zero(sig);
    for (t, c) in current {
        out.add_term(t, &c);
    }
    Ok(out)
}

/// Witness of a failed axiom check: which condition, on which inputs, and
/// both sides' values. For series scalars `first_series_order` is the lowest
/// power of t where the two sides disagree.
#[derive(Clone, Debug)]
pub struct AxiomWitness {
    pub axiom: &'static str,
    pub inputs: Vec<String>,
    pub lhs: String,
    pub rhs: String,
    pub first_series_order: Option<usize>,
}

/// Lowest t-order carried by any coefficient of the element.
pub fn element_t_order<K: Scalar>(v: &TensorElement<K>) -> Option<usize> {
    v.terms().filter_map(|(_, c)| c.lowest_t_order()).min()
}

#[derive(Clone, Debug)]
pub enum AxiomReport {
    Pass { checked: usize },
    Fail(AxiomWitness),
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        matches!(self, AxiomReport::Pass { .. })
    }
}

/// Verifies both factorisation axioms and both unit conditions on basis
/// tuples of total degree <= `degree_bound` (finite bases: all tuples).
pub fn check_axioms<K: Scalar>(twist: &TwistMap<K>, degree_bound: u32) -> Result<AxiomReport> {
    let a = twist.algebra_a().clone();
    let b = twist.algebra_b().clone();
    check_axioms_with_units(twist, &a.unit_element(), &b.unit_element(), degree_bound)
}

/// Axiom check against explicitly supplied unit elements; deformation checks
/// pass the deformed units here.
pub fn check_axioms_with_units<K: Scalar>(
    twist: &TwistMap<K>,
    unit_a: &AlgElement<K>,
    unit_b: &AlgElement<K>,
    degree_bound: u32,
) -> Result<AxiomReport> {
    let a = twist.algebra_a().clone();
    let b = twist.algebra_b().clone();
    let finite = a.shape().finite_dimension().is_some() && b.shape().finite_dimension().is_some();
    let a_basis = a.shape().enumerate(degree_bound);
    let b_basis = b.shape().enumerate(degree_bound);
    let within = |total: u32| finite || total <= degree_bound;
    let mut checked = 0;

    let fmt_a = |m: &Monomial| a.shape().format_monomial(m);
    let fmt_b = |m: &Monomial| b.shape().format_monomial(m);
    let fmt_x = |v: &TensorElement<K>| format_x(&a, &b, v);

    // unit conditions
    for mb in &b_basis {
        let lhs = twist.apply_elements(unit_a, &AlgElement::basis(mb.clone()))?;
        let rhs = tensor_of_elements(&AlgElement::basis(mb.clone()), unit_a);
        checked += 1;
        if lhs != rhs {
            let diff = lhs.sub(&rhs)?;
            return Ok(AxiomReport::Fail(AxiomWitness {
                axiom: "unit-A",
                inputs: vec![fmt_b(mb)],
                lhs: fmt_x(&lhs),
                rhs: fmt_x(&rhs),
                first_series_order: element_t_order(&diff),
            }));
        }
    }
    for ma in &a_basis {
        let lhs = twist.apply_elements(&AlgElement::basis(ma.clone()), unit_b)?;
        let rhs = tensor_of_elements(unit_b, &AlgElement::basis(ma.clone()));
        checked += 1;
        if lhs != rhs {
            let diff = lhs.sub(&rhs)?;
            return Ok(AxiomReport::Fail(AxiomWitness {
                axiom: "unit-B",
                inputs: vec![fmt_a(ma)],
                lhs: fmt_x(&lhs),
                rhs: fmt_x(&rhs),
                first_series_order: element_t_order(&diff),
            }));
        }
    }

    // Psi(mu_A (x) B) = (B (x) mu_A)(Psi (x) A)(A (x) Psi) on (x, y, b)
    for x in &a_basis {
        for y in &a_basis {
            for mb in &b_basis {
                if !within(a.degree(x) + a.degree(y) + b.degree(mb)) {
                    continue;
                }
                let lhs = twist.apply_elements(&a.basis_product(x, y), &AlgElement::basis(mb.clone()))?;
                let inner = twist.apply_basis(y, mb)?;
                let mut rhs = TensorElement::zero(vec![Side::B, Side::A]);
                for (b_nu, a_nu, c_nu) in inner.x_terms() {
                    let outer = twist.apply_basis(x, b_nu)?;
                    for (b_mu, a_mu, c_mu) in outer.x_terms() {
                        let prod = a.basis_product(a_mu, a_nu);
                        for (m, k) in prod.terms() {
                            rhs.add_term(vec![b_mu.clone(), m.clone()], &k.mul(&c_nu.mul(c_mu)));
                        }
                    }
                }
                checked += 1;
                if lhs != rhs {
                    let diff = lhs.sub(&rhs)?;
                    return Ok(AxiomReport::Fail(AxiomWitness {
                        axiom: "product-A",
                        inputs: vec![fmt_a(x), fmt_a(y), fmt_b(mb)],
                        lhs: fmt_x(&lhs),
                        rhs: fmt_x(&rhs),
                        first_series_order: element_t_order(&diff),
                    }));
                }
            }
        }
    }

    // Psi(A (x) mu_B) = (mu_B (x) A)(B (x) Psi)(Psi (x) B) on (x, b, b')
    for x in &a_basis {
        for mb in &b_basis {
            for mb2 in &b_basis {
                if !within(a.degree(x) + b.degree(mb) + b.degree(mb2)) {
                    continue;
                }
                let lhs = twist.apply_elements(&AlgElement::basis(x.clone()), &b.basis_product(mb, mb2))?;
                let first = twist.apply_basis(x, mb)?;
                let mut rhs = TensorElement::zero(vec![Side::B, Side::A]);
                for (b_nu, a_nu, c1) in first.x_terms() {
                    let second = twist.apply_basis(a_nu, mb2)?;
                    for (b_mu, a_mu, c2) in second.x_terms() {
                        let prod = b.basis_product(b_nu, b_mu);
                        for (m, k) in prod.terms() {
                            rhs.add_term(vec![m.clone(), a_mu.clone()], &k.mul(&c1.mul(c2)));
                        }
                    }
                }
                checked += 1;
                if lhs != rhs {
                    let diff = lhs.sub(&rhs)?;
                    return Ok(AxiomReport::Fail(AxiomWitness {
                        axiom: "product-B",
                        inputs: vec![fmt_a(x), fmt_b(mb), fmt_b(mb2)],
                        lhs: fmt_x(&lhs),
                        rhs: fmt_x(&rhs),
                        first_series_order: element_t_order(&diff),
                    }));
                }
            }
        }
    }

    Ok(AxiomReport::Pass { checked })
}

pub fn format_x<K: Scalar>(
    a: &BasedAlgebra<K>,
    b: &BasedAlgebra<K>,
    v: &TensorElement<K>,
) -> String {
    if v.is_zero() {
        return "0".into();
    }
    v.terms()
        .map(|(t, c)| {
            let slots: Vec<String> = t
                .iter()
                .zip(v.signature())
                .map(|(m, side)| match side {
                    Side::A => a.shape().format_monomial(m),
                    Side::B => b.shape().format_monomial(m),
                })
                .collect();
            format!("{}*({})", c, slots.join(" (x) "))
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{QRat, Rat, TSeries};

    fn mono(exps: &[u32]) -> Monomial {
        Monomial(exps.to_vec())
    }

    fn plane() -> (Arc<BasedAlgebra<Rat>>, Arc<BasedAlgebra<Rat>>) {
        let a = Arc::new(BasedAlgebra::commutative_poly("A", &["a", "abar"]).unwrap());
        let b = Arc::new(BasedAlgebra::commutative_poly("B", &["b"]).unwrap());
        (a, b)
    }

    /// The quaternion factorisation H(C, C) with Psi(i (x) j) = -j (x) i.
    pub(crate) fn quaternions() -> TwistMap<Rat> {
        let one = AlgElement::basis(mono(&[0]));
        let i = AlgElement::basis(mono(&[1]));
        let table = vec![
            vec![one.clone(), i.clone()],
            vec![i.clone(), one.neg()],
        ];
        let c1 = Arc::new(BasedAlgebra::table("C_i", &["1", "i"], 0, table.clone()).unwrap());
        let c2 = Arc::new(BasedAlgebra::table("C_j", &["1", "j"], 0, table).unwrap());
        let mut rules = BTreeMap::new();
        rules.insert(
            (mono(&[1]), mono(&[1])),
            TensorElement::x_term(mono(&[1]), mono(&[1]), Rat::from_int(-1)),
        );
        extend_from_generators(c1, c2, rules, 2).unwrap()
    }

    #[test]
    fn flip_extension_is_the_flip() {
        let (a, b) = plane();
        let mut rules = BTreeMap::new();
        for (_, g) in a.generators() {
            for (_, h) in b.generators() {
                rules.insert((g.clone(), h.clone()), TensorElement::x_basis(h, g.clone()));
            }
        }
        let psi = extend_from_generators(a.clone(), b.clone(), rules, 4).unwrap();
        for ma in a.shape().enumerate(5) {
            for mb in b.shape().enumerate(5) {
                assert_eq!(
                    psi.apply_basis(&ma, &mb).unwrap(),
                    TensorElement::x_basis(mb.clone(), ma.clone())
                );
            }
        }
    }

    #[test]
    fn quaternion_rule_extends_to_full_basis() {
        let psi = quaternions();
        let i = mono(&[1]);
        let j = mono(&[1]);
        let one = mono(&[0]);
        assert_eq!(
            psi.apply_basis(&i, &j).unwrap(),
            TensorElement::x_term(j.clone(), i.clone(), Rat::from_int(-1))
        );
        assert_eq!(
            psi.apply_basis(&one, &j).unwrap(),
            TensorElement::x_basis(j.clone(), one.clone())
        );
        assert_eq!(
            psi.apply_basis(&i, &one).unwrap(),
            TensorElement::x_basis(one.clone(), i.clone())
        );
        assert!(check_axioms(&psi, 2).unwrap().passed());
    }

    #[test]
    fn heisenberg_extension_matches_closed_form() {
        // A = k[p], B = k[x], Psi_t(p (x) x) = x (x) p + t * 1 (x) 1 at order 5;
        // the closed form is Psi_t(p^m (x) x^n) =
        //   sum_i i! C(m,i) C(n,i) t^i x^{n-i} (x) p^{m-i}.
        type S = TSeries<Rat>;
        let order = 5;
        let a = Arc::new(BasedAlgebra::<S>::commutative_poly("A", &["p"]).unwrap());
        let b = Arc::new(BasedAlgebra::<S>::commutative_poly("B", &["x"]).unwrap());
        let mut rules = BTreeMap::new();
        let mut rule = TensorElement::x_basis(mono(&[1]), mono(&[1]));
        rule.add_term(vec![mono(&[0]), mono(&[0])], &S::t_power(order, 1));
        rules.insert((mono(&[1]), mono(&[1])), rule);
        let psi = extend_from_generators(a, b, rules, 5).unwrap();
        for m in 0..=5u32 {
            for n in 0..=5u32 {
                let got = psi.apply_basis(&mono(&[m]), &mono(&[n])).unwrap();
                let mut want = TensorElement::zero(vec![Side::B, Side::A]);
                for i in 0..=m.min(n) {
                    let c = crate::scalar::factorial(i)
                        .mul(&crate::scalar::binomial(m, i))
                        .mul(&crate::scalar::binomial(n, i));
                    let coeff = S::t_power(order, i as usize).mul(&S::from_rat(&c));
                    want.add_term(vec![mono(&[n - i]), mono(&[m - i])], &coeff);
                }
                assert_eq!(got, want, "p^{m} x^{n}");
            }
        }
    }

    #[test]
    fn check_axioms_pass_and_fail() {
        // quantum plane twist at formal q, bound 6
        let q = QRat::gen();
        let a = Arc::new(BasedAlgebra::q_plane("A", q.clone()));
        let b = Arc::new(BasedAlgebra::commutative_poly("B", &["b"]).unwrap());
        let psi = TwistMap::q_flip(a.clone(), b.clone(), q);
        assert!(check_axioms(&psi, 6).unwrap().passed());

        // corrupted flip: Psi(a (x) b) = 2 b (x) a on that single pair only
        let (a, b) = plane();
        let bad = TwistMap::from_closure(a, b, |ma, mb| {
            let coeff = if ma.0 == [1, 0] && mb.0 == [1] {
                Rat::from_int(2)
            } else {
                Rat::one()
            };
            TensorElement::x_term(mb.clone(), ma.clone(), coeff)
        });
        match check_axioms(&bad, 3).unwrap() {
            AxiomReport::Fail(w) => {
                assert_eq!(w.axiom, "product-A");
                assert_ne!(w.lhs, w.rhs);
            }
            AxiomReport::Pass { .. } => panic!("expected failure"),
        }
    }

    #[test]
    fn x_multiply_on_quaternions() {
        let psi = quaternions();
        let i = mono(&[1]);
        let j = mono(&[1]);
        let one = mono(&[0]);
        // (1 (x) i)(j (x) 1) = -j (x) i
        let p = x_multiply(
            &psi,
            &TensorElement::x_basis(one.clone(), i.clone()),
            &TensorElement::x_basis(j.clone(), one.clone()),
        )
        .unwrap();
        assert_eq!(p, TensorElement::x_term(j.clone(), i.clone(), Rat::from_int(-1)));
        // associativity on all basis triples of X
        let basis: Vec<TensorElement<Rat>> = [&one, &i]
            .iter()
            .flat_map(|b| {
                [&one, &i]
                    .iter()
                    .map(|a| TensorElement::x_basis((**b).clone(), (**a).clone()))
                    .collect::<Vec<_>>()
            })
            .collect();
        for x in &basis {
            for y in &basis {
                for z in &basis {
                    let xy_z = x_multiply(&psi, &x_multiply(&psi, x, y).unwrap(), z).unwrap();
                    let x_yz = x_multiply(&psi, x, &x_multiply(&psi, y, z).unwrap()).unwrap();
                    assert_eq!(xy_z, x_yz);
                }
            }
        }
    }

    #[test]
    fn x_multiply_unit_twist_case() {
        let (a, b) = plane();
        let psi = TwistMap::flip(a, b);
        // (b (x) 1)(b' (x) a') = b b' (x) a'
        let p = x_multiply(
            &psi,
            &TensorElement::x_basis(mono(&[1]), mono(&[0, 0])),
            &TensorElement::x_basis(mono(&[2]), mono(&[1, 1])),
        )
        .unwrap();
        assert_eq!(p, TensorElement::x_basis(mono(&[3]), mono(&[1, 1])));
    }

    #[test]
    fn chains_reduce_to_psi_and_weight_correctly() {
        let (a, b) = plane();
        let flip = TwistMap::flip(a, b);
        // n = 1: both chains are Psi itself
        let left = twist_chain_left(&flip, &[mono(&[1, 0])], &mono(&[2])).unwrap();
        assert_eq!(left, flip.apply_basis(&mono(&[1, 0]), &mono(&[2])).unwrap());
        let right = twist_chain_right(&flip, &mono(&[1, 0]), &[mono(&[2])]).unwrap();
        assert_eq!(right, flip.apply_basis(&mono(&[1, 0]), &mono(&[2])).unwrap());
        // flip: (a2, a1, b) -> b (x) a2 (x) a1
        let v = twist_chain_left(&flip, &[mono(&[2, 0]), mono(&[0, 1])], &mono(&[1])).unwrap();
        assert_eq!(
            v,
            TensorElement::term(
                vec![Side::B, Side::A, Side::A],
                vec![mono(&[1]), mono(&[2, 0]), mono(&[0, 1])],
                Rat::one()
            )
        );

        // quantum plane: (abar, abar, b) -> q^2 b (x) abar (x) abar
        let q = QRat::gen();
        let qa = Arc::new(BasedAlgebra::q_plane("A", q.clone()));
        let qb = Arc::new(BasedAlgebra::commutative_poly("B", &["b"]).unwrap());
        let qpsi = TwistMap::q_flip(qa, qb, q.clone());
        let abar = mono(&[0, 1]);
        let v = twist_chain_left(&qpsi, &[abar.clone(), abar.clone()], &mono(&[1])).unwrap();
        let q2 = q.mul(&q);
        assert_eq!(
            v,
            TensorElement::term(
                vec![Side::B, Side::A, Side::A],
                vec![mono(&[1]), abar.clone(), abar.clone()],
                q2.clone()
            )
        );
        // (abar, b, b) -> q^2 b (x) b (x) abar
        let v = twist_chain_right(&qpsi, &abar, &[mono(&[1]), mono(&[1])]).unwrap();
        assert_eq!(
            v,
            TensorElement::term(
                vec![Side::B, Side::B, Side::A],
                vec![mono(&[1]), mono(&[1]), abar],
                q2
            )
        );
    }

    #[test]
    fn ambiguous_extension_is_detected() {
        // Psi(x (x) b) = b^2 (x) x doubles the B-degree while
        // Psi(y (x) b) = 2 b (x) y scales it, so peeling xy by x first gives
        // 2 b^2 (x) xy but by y first gives 4 b^2 (x) xy.
        let a = Arc::new(BasedAlgebra::<Rat>::commutative_poly("A", &["x", "y"]).unwrap());
        let b = Arc::new(BasedAlgebra::<Rat>::commutative_poly("B", &["b"]).unwrap());
        let mut rules = BTreeMap::new();
        rules.insert(
            (mono(&[1, 0]), mono(&[1])),
            TensorElement::x_basis(mono(&[2]), mono(&[1, 0])),
        );
        rules.insert(
            (mono(&[0, 1]), mono(&[1])),
            TensorElement::x_term(mono(&[1]), mono(&[0, 1]), Rat::from_int(2)),
        );
        let r = extend_from_generators(a, b, rules, 3);
        assert!(matches!(r, Err(Error::AmbiguousExtension { .. })));
    }
}
