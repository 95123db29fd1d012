//! Based algebras: explicit monomial bases with exact structure constants.
//! Houses the products, units and degree functions of the algebra families
//! the engine works with, and the element arithmetic built on top of them.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// Index of a basis element: an exponent vector, one slot per generator.
/// Table algebras use a single slot holding the basis index.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn unit(len: usize) -> Self {
        Monomial(vec![0; len])
    }

    pub fn exponent_sum(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_unit_vector(&self) -> bool {
        self.exponent_sum() == 0
    }
}

/// Canonical term order: total degree, then lexicographic on exponents.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.exponent_sum()
            .cmp(&other.exponent_sum())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Linear combination of basis monomials. Canonical form: no zero
/// coefficients, terms ordered by the monomial order.
#[derive(Clone, PartialEq, Debug)]
pub struct AlgElement<K: Scalar> {
    terms: BTreeMap<Monomial, K>,
}

impl<K: Scalar> AlgElement<K> {
    pub fn zero() -> Self {
        AlgElement {
            terms: BTreeMap::new(),
        }
    }

    pub fn basis(m: Monomial) -> Self {
        AlgElement::term(m, K::one())
    }

    pub fn term(m: Monomial, coeff: K) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(m, coeff);
        }
        AlgElement { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &K)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> K {
        self.terms.get(m).cloned().unwrap_or_else(K::zero)
    }

    pub fn add_term(&mut self, m: Monomial, coeff: &K) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(c) => {
                let s = c.add(coeff);
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *c = s;
                }
            }
            None => {
                self.terms.insert(m, coeff.clone());
            }
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in rhs.terms() {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        AlgElement {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect(),
        }
    }

    pub fn scale(&self, s: &K) -> Self {
        if s.is_zero() {
            return AlgElement::zero();
        }
        AlgElement::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), c.mul(s))))
    }

    pub fn from_terms(it: impl IntoIterator<Item = (Monomial, K)>) -> Self {
        let mut out = AlgElement::zero();
        for (m, c) in it {
            out.add_term(m, &c);
        }
        out
    }

    /// Map coefficients into another scalar ring (e.g. lift to t-series).
    pub fn map_coeffs<S: Scalar>(&self, f: &impl Fn(&K) -> S) -> AlgElement<S> {
        AlgElement::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }
}

/// The scalar-independent part of a based algebra: its basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BasisShape {
    /// Monomials in named generators (exponent vectors).
    Poly { generators: Vec<String> },
    /// Finitely many named slots; `unit` is the index of the unit slot.
    Table { names: Vec<String>, unit: usize },
}

impl BasisShape {
    pub fn arity(&self) -> usize {
        match self {
            BasisShape::Poly { generators } => generators.len(),
            BasisShape::Table { .. } => 1,
        }
    }

    pub fn unit_monomial(&self) -> Monomial {
        match self {
            BasisShape::Poly { generators } => Monomial::unit(generators.len()),
            BasisShape::Table { unit, .. } => Monomial(vec![*unit as u32]),
        }
    }

    /// Degree used to truncate test domains: total exponent for monomial
    /// bases; 0 for the unit slot and 1 otherwise for table bases.
    pub fn degree(&self, m: &Monomial) -> u32 {
        match self {
            BasisShape::Poly { .. } => m.exponent_sum(),
            BasisShape::Table { unit, .. } => {
                if m.0 == [*unit as u32] {
                    0
                } else {
                    1
                }
            }
        }
    }

    pub fn finite_dimension(&self) -> Option<usize> {
        match self {
            BasisShape::Poly { .. } => None,
            BasisShape::Table { names, .. } => Some(names.len()),
        }
    }

    /// Basis monomials of degree <= cap, in canonical order. Finite bases
    /// enumerate every slot regardless of the cap.
    pub fn enumerate(&self, cap: u32) -> Vec<Monomial> {
        match self {
            BasisShape::Poly { generators } => {
                let mut out = Vec::new();
                let mut current = vec![0u32; generators.len()];
                enumerate_exponents(&mut current, 0, cap, &mut out);
                out.sort();
                out
            }
            BasisShape::Table { names, .. } => {
                (0..names.len() as u32).map(|i| Monomial(vec![i])).collect()
            }
        }
    }

    pub fn format_monomial(&self, m: &Monomial) -> String {
        match self {
            BasisShape::Poly { generators } => {
                let parts: Vec<String> = generators
                    .iter()
                    .zip(&m.0)
                    .filter(|(_, &e)| e > 0)
                    .map(|(g, &e)| if e == 1 { g.clone() } else { format!("{g}^{e}") })
                    .collect();
                if parts.is_empty() {
                    "1".into()
                } else {
                    parts.join("*")
                }
            }
            BasisShape::Table { names, .. } => names
                .get(m.0[0] as usize)
                .cloned()
                .unwrap_or_else(|| format!("slot{}", m.0[0])),
        }
    }
}

fn enumerate_exponents(current: &mut Vec<u32>, pos: usize, budget: u32, out: &mut Vec<Monomial>) {
    if pos == current.len() {
        out.push(Monomial(current.clone()));
        return;
    }
    for e in 0..=budget {
        current[pos] = e;
        enumerate_exponents(current, pos + 1, budget - e, out);
    }
    current[pos] = 0;
}

type ProductFn<K> = dyn Fn(&Monomial, &Monomial) -> AlgElement<K> + Send + Sync;

/// Structure constants: the product of two basis monomials.
#[derive(Clone)]
pub enum ProductRule<K: Scalar> {
    /// Commuting variables: exponents add.
    AddExponents,
    /// Two-generator normal order with a weight:
    /// (a^k abar^l)(a^m abar^n) = q^{l*m} a^{k+m} abar^{l+n}.
    QWeighted { q: K },
    /// Dense structure-constant table.
    Table { table: Arc<Vec<Vec<AlgElement<K>>>> },
    /// Arbitrary rule; used for deformed products.
    Closure(Arc<ProductFn<K>>),
}

impl<K: Scalar> fmt::Debug for ProductRule<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProductRule::AddExponents => write!(f, "AddExponents"),
            ProductRule::QWeighted { q } => write!(f, "QWeighted(q={q})"),
            ProductRule::Table { .. } => write!(f, "Table"),
            ProductRule::Closure(_) => write!(f, "Closure"),
        }
    }
}

/// An algebra presented by a monomial basis and an exact basis product.
#[derive(Clone, Debug)]
pub struct BasedAlgebra<K: Scalar> {
    pub name: String,
    shape: Arc<BasisShape>,
    product: ProductRule<K>,
}

impl<K: Scalar> BasedAlgebra<K> {
    /// Polynomials in commuting variables; the product adds exponents.
    pub fn commutative_poly(name: &str, generators: &[&str]) -> Result<Self> {
        let gens: Vec<String> = generators.iter().map(|s| s.to_string()).collect();
        if gens.is_empty() {
            return Err(Error::InvalidInput("empty generator list".into()));
        }
        let mut seen = gens.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != gens.len() {
            return Err(Error::InvalidInput("duplicate generator names".into()));
        }
        Ok(BasedAlgebra {
            name: name.into(),
            shape: Arc::new(BasisShape::Poly { generators: gens }),
            product: ProductRule::AddExponents,
        })
    }

    /// The quantum plane k<a, abar>/(abar a - q a abar) in the normal-order
    /// basis a^k abar^l. At q = 1 this is the commutative plane.
    pub fn q_plane(name: &str, q: K) -> Self {
        BasedAlgebra {
            name: name.into(),
            shape: Arc::new(BasisShape::Poly {
                generators: vec!["a".into(), "abar".into()],
            }),
            product: ProductRule::QWeighted { q },
        }
    }

    /// Finite-dimensional algebra from a dense structure-constant table.
    /// Validates the unit laws; associativity is *not* assumed (see
    /// [`associativity_check`]).
    pub fn table(name: &str, names: &[&str], unit: usize, table: Vec<Vec<AlgElement<K>>>) -> Result<Self> {
        let dim = names.len();
        if unit >= dim {
            return Err(Error::InvalidInput("no unit slot".into()));
        }
        if table.len() != dim || table.iter().any(|row| row.len() != dim) {
            return Err(Error::InvalidInput(format!(
                "malformed table: expected {dim}x{dim}"
            )));
        }
        let alg = BasedAlgebra {
            name: name.into(),
            shape: Arc::new(BasisShape::Table {
                names: names.iter().map(|s| s.to_string()).collect(),
                unit,
            }),
            product: ProductRule::Table {
                table: Arc::new(table),
            },
        };
        for m in alg.shape.enumerate(0) {
            let x = AlgElement::basis(m.clone());
            if alg.basis_product(&alg.unit(), &m) != x || alg.basis_product(&m, &alg.unit()) != x {
                return Err(Error::InvalidInput(format!(
                    "malformed table: unit law fails on slot {}",
                    alg.shape.format_monomial(&m)
                )));
            }
        }
        Ok(alg)
    }

    /// Same basis, replacement product; used for deformed algebras.
    pub fn with_product(
        &self,
        name: &str,
        product: impl Fn(&Monomial, &Monomial) -> AlgElement<K> + Send + Sync + 'static,
    ) -> BasedAlgebra<K> {
        BasedAlgebra {
            name: name.into(),
            shape: self.shape.clone(),
            product: ProductRule::Closure(Arc::new(product)),
        }
    }

    /// Same basis and product, coefficients mapped into another scalar ring.
    pub fn map_scalars<S: Scalar>(
        &self,
        f: impl Fn(&K) -> S + Send + Sync + Clone + 'static,
    ) -> BasedAlgebra<S> {
        let product = match &self.product {
            ProductRule::AddExponents => ProductRule::AddExponents,
            ProductRule::QWeighted { q } => ProductRule::QWeighted { q: f(q) },
            ProductRule::Table { table } => ProductRule::Table {
                table: Arc::new(
                    table
                        .iter()
                        .map(|row| row.iter().map(|e| e.map_coeffs(&f)).collect())
                        .collect(),
                ),
            },
            ProductRule::Closure(rule) => {
                let rule = rule.clone();
                let f = f.clone();
                ProductRule::Closure(Arc::new(move |x: &Monomial, y: &Monomial| {
                    rule(x, y).map_coeffs(&f)
                }))
            }
        };
        BasedAlgebra {
            name: self.name.clone(),
            shape: self.shape.clone(),
            product,
        }
    }

    pub fn shape(&self) -> &BasisShape {
        &self.shape
    }

    /// Which product rule backs this algebra; used by document export.
    pub fn product_rule(&self) -> &ProductRule<K> {
        &self.product
    }

    pub fn unit(&self) -> Monomial {
        self.shape.unit_monomial()
    }

    pub fn unit_element(&self) -> AlgElement<K> {
        AlgElement::basis(self.unit())
    }

    pub fn degree(&self, m: &Monomial) -> u32 {
        self.shape.degree(m)
    }

    pub fn generators(&self) -> Vec<(String, Monomial)> {
        match self.shape.as_ref() {
            BasisShape::Poly { generators } => generators
                .iter()
                .enumerate()
                .map(|(i, g)| {
                    let mut exps = vec![0u32; generators.len()];
                    exps[i] = 1;
                    (g.clone(), Monomial(exps))
                })
                .collect(),
            BasisShape::Table { names, unit } => names
                .iter()
                .enumerate()
                .filter(|(i, _)| i != unit)
                .map(|(i, n)| (n.clone(), Monomial(vec![i as u32])))
                .collect(),
        }
    }

    /// Whether products of basis monomials never lower the degree (true for
    /// exponent-based rules; trivially true for finite tables, which are
    /// enumerated whole). Used by the capped linear solver.
    pub fn degree_monotone(&self) -> bool {
        matches!(
            self.product,
            ProductRule::AddExponents | ProductRule::QWeighted { .. } | ProductRule::Table { .. }
        )
    }

    /// Product of two basis monomials.
    pub fn basis_product(&self, x: &Monomial, y: &Monomial) -> AlgElement<K> {
        debug_assert_eq!(x.0.len(), self.shape.arity());
        debug_assert_eq!(y.0.len(), self.shape.arity());
        match &self.product {
            ProductRule::AddExponents => {
                let exps = x.0.iter().zip(&y.0).map(|(a, b)| a + b).collect();
                AlgElement::basis(Monomial(exps))
            }
            ProductRule::QWeighted { q } => {
                let (k, l) = (x.0[0], x.0[1]);
                let (m, n) = (y.0[0], y.0[1]);
                let weight = pow_scalar(q, (l as u64) * (m as u64));
                AlgElement::term(Monomial(vec![k + m, l + n]), weight)
            }
            ProductRule::Table { table } => table[x.0[0] as usize][y.0[0] as usize].clone(),
            ProductRule::Closure(rule) => rule(x, y),
        }
    }

    /// Bilinear extension of the basis product.
    pub fn multiply(&self, x: &AlgElement<K>, y: &AlgElement<K>) -> AlgElement<K> {
        let mut out = AlgElement::zero();
        for (mx, cx) in x.terms() {
            for (my, cy) in y.terms() {
                let c = cx.mul(cy);
                for (m, k) in self.basis_product(mx, my).terms() {
                    out.add_term(m.clone(), &k.mul(&c));
                }
            }
        }
        out
    }

    pub fn format_element(&self, x: &AlgElement<K>) -> String {
        if x.is_zero() {
            return "0".into();
        }
        x.terms()
            .map(|(m, c)| format!("{}*{}", c, self.shape.format_monomial(m)))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

pub(crate) fn pow_scalar<K: Scalar>(base: &K, mut e: u64) -> K {
    let mut acc = K::one();
    let mut b = base.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(&b);
        }
        e >>= 1;
        if e > 0 {
            b = b.mul(&b);
        }
    }
    acc
}

/// Outcome of an exhaustive associativity scan.
#[derive(Clone, Debug)]
pub enum AssociativityReport {
    Pass { triples_checked: usize },
    Fail {
        witness: (Monomial, Monomial, Monomial),
        left: String,
        right: String,
    },
}

impl AssociativityReport {
    pub fn passed(&self) -> bool {
        matches!(self, AssociativityReport::Pass { .. })
    }
}

/// Checks (xy)z = x(yz) on all basis triples of total degree <= `degree_bound`
/// (finite bases: all slots). Failure is a report with a witness, not an error.
pub fn associativity_check<K: Scalar>(alg: &BasedAlgebra<K>, degree_bound: u32) -> AssociativityReport {
    let basis = alg.shape().enumerate(degree_bound);
    // finite bases are scanned whole; the degree filter is for monomial bases
    let filter = alg.shape().finite_dimension().is_none();
    let mut checked = 0;
    for x in &basis {
        for y in &basis {
            if filter && alg.degree(x) + alg.degree(y) > degree_bound {
                continue;
            }
            let xy = alg.basis_product(x, y);
            for z in &basis {
                if filter && alg.degree(x) + alg.degree(y) + alg.degree(z) > degree_bound {
                    continue;
                }
                let left = alg.multiply(&xy, &AlgElement::basis(z.clone()));
                let right = alg.multiply(&AlgElement::basis(x.clone()), &alg.basis_product(y, z));
                checked += 1;
                if left != right {
                    return AssociativityReport::Fail {
                        witness: (x.clone(), y.clone(), z.clone()),
                        left: alg.format_element(&left),
                        right: alg.format_element(&right),
                    };
                }
            }
        }
    }
    AssociativityReport::Pass {
        triples_checked: checked,
    }
}

/// Checks the two unit laws on every basis element within the bound.
pub fn unit_law_check<K: Scalar>(alg: &BasedAlgebra<K>, degree_bound: u32) -> Option<Monomial> {
    let unit = alg.unit();
    for m in alg.shape().enumerate(degree_bound) {
        let x = AlgElement::basis(m.clone());
        if alg.basis_product(&unit, &m) != x || alg.basis_product(&m, &unit) != x {
            return Some(m);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{QRat, Rat};

    fn mono(exps: &[u32]) -> Monomial {
        Monomial(exps.to_vec())
    }

    /// C = R[i]/(i^2+1) as a table algebra over the rationals.
    pub(crate) fn complex_table() -> BasedAlgebra<Rat> {
        let one = AlgElement::basis(mono(&[0]));
        let i = AlgElement::basis(mono(&[1]));
        let table = vec![
            vec![one.clone(), i.clone()],
            vec![i.clone(), one.neg()],
        ];
        BasedAlgebra::table("C", &["1", "i"], 0, table).unwrap()
    }

    #[test]
    fn commutative_poly_products() {
        let b = BasedAlgebra::<Rat>::commutative_poly("B", &["b"]).unwrap();
        assert_eq!(
            b.basis_product(&mono(&[2]), &mono(&[3])),
            AlgElement::basis(mono(&[5]))
        );
        let a = BasedAlgebra::<Rat>::commutative_poly("A", &["a", "abar"]).unwrap();
        let aabar = mono(&[1, 1]);
        assert_eq!(
            a.basis_product(&aabar, &aabar),
            AlgElement::basis(mono(&[2, 2]))
        );
        assert!(unit_law_check(&a, 8).is_none());
        assert!(BasedAlgebra::<Rat>::commutative_poly("X", &["x", "x"]).is_err());
        assert!(BasedAlgebra::<Rat>::commutative_poly("X", &[]).is_err());
    }

    #[test]
    fn q_plane_normal_ordering() {
        let q = QRat::gen();
        let a = BasedAlgebra::q_plane("A", q.clone());
        // abar * a = q * a abar
        assert_eq!(
            a.basis_product(&mono(&[0, 1]), &mono(&[1, 0])),
            AlgElement::term(mono(&[1, 1]), q.clone())
        );
        // a * abar is already normal-ordered
        assert_eq!(
            a.basis_product(&mono(&[1, 0]), &mono(&[0, 1])),
            AlgElement::basis(mono(&[1, 1]))
        );
        // (a^2 abar)(a abar) = q^{1*1} a^3 abar^2
        assert_eq!(
            a.basis_product(&mono(&[2, 1]), &mono(&[1, 1])),
            AlgElement::term(mono(&[3, 2]), q.clone())
        );
        // (a abar)(a abar) = q a^2 abar^2
        assert_eq!(
            a.basis_product(&mono(&[1, 1]), &mono(&[1, 1])),
            AlgElement::term(mono(&[2, 2]), q)
        );
    }

    #[test]
    fn q_plane_at_one_is_commutative() {
        let qp = BasedAlgebra::q_plane("A", Rat::one());
        let cp = BasedAlgebra::<Rat>::commutative_poly("A", &["a", "abar"]).unwrap();
        for x in qp.shape().enumerate(6) {
            for y in qp.shape().enumerate(6) {
                if qp.degree(&x) + qp.degree(&y) > 6 {
                    continue;
                }
                assert_eq!(qp.basis_product(&x, &y), cp.basis_product(&x, &y));
            }
        }
    }

    #[test]
    fn complex_table_products() {
        let c = complex_table();
        // i * i = -1
        assert_eq!(
            c.basis_product(&mono(&[1]), &mono(&[1])),
            AlgElement::term(mono(&[0]), Rat::from_int(-1))
        );
        // 1 * i = i
        assert_eq!(
            c.basis_product(&mono(&[0]), &mono(&[1])),
            AlgElement::basis(mono(&[1]))
        );
        // (a+bi)(c+di): real part ac - bd, with a=1,b=2,c=3,d=5
        let x = AlgElement::from_terms(vec![
            (mono(&[0]), Rat::from_int(1)),
            (mono(&[1]), Rat::from_int(2)),
        ]);
        let y = AlgElement::from_terms(vec![
            (mono(&[0]), Rat::from_int(3)),
            (mono(&[1]), Rat::from_int(5)),
        ]);
        let p = c.multiply(&x, &y);
        assert_eq!(p.coeff(&mono(&[0])), Rat::from_int(3 - 10));
        assert_eq!(p.coeff(&mono(&[1])), Rat::from_int(5 + 6));
    }

    #[test]
    fn associativity_reports() {
        assert!(associativity_check(&complex_table(), 1).passed());
        let qp = BasedAlgebra::q_plane("A", QRat::gen());
        assert!(associativity_check(&qp, 6).passed());

        // A deliberately non-associative table: x*x = y, x*y = 1, y*_ = 0.
        let one = AlgElement::<Rat>::basis(mono(&[0]));
        let x = AlgElement::basis(mono(&[1]));
        let y = AlgElement::basis(mono(&[2]));
        let zero = AlgElement::zero();
        let table = vec![
            vec![one.clone(), x.clone(), y.clone()],
            vec![x.clone(), y.clone(), one.clone()],
            vec![y.clone(), zero.clone(), zero.clone()],
        ];
        let bad = BasedAlgebra::table("bad", &["1", "x", "y"], 0, table).unwrap();
        match associativity_check(&bad, 1) {
            AssociativityReport::Fail { witness: (x, y, z), .. } => {
                let left = bad.multiply(&bad.basis_product(&x, &y), &AlgElement::basis(z.clone()));
                let right = bad.multiply(&AlgElement::basis(x), &bad.basis_product(&y, &z));
                assert_ne!(left, right, "witness must violate associativity");
            }
            AssociativityReport::Pass { .. } => panic!("expected failure"),
        }
    }

    #[test]
    fn table_validation() {
        let one = AlgElement::<Rat>::basis(mono(&[0]));
        // unit slot out of range
        assert!(BasedAlgebra::table("X", &["1"], 3, vec![vec![one.clone()]]).is_err());
        // broken unit law
        let bad = vec![
            vec![one.clone(), one.clone()],
            vec![one.clone(), one.clone()],
        ];
        assert!(BasedAlgebra::<Rat>::table("X", &["1", "i"], 0, bad).is_err());
    }

    #[test]
    fn multiply_is_bilinear() {
        let a = BasedAlgebra::q_plane("A", QRat::gen());
        let x = AlgElement::from_terms(vec![
            (mono(&[1, 0]), QRat::from_int(2)),
            (mono(&[0, 1]), QRat::from_int(-1)),
        ]);
        let x2 = AlgElement::term(mono(&[1, 1]), QRat::gen());
        let y = AlgElement::from_terms(vec![
            (mono(&[2, 0]), QRat::from_int(1)),
            (mono(&[0, 2]), QRat::from_int(3)),
        ]);
        let lhs = a.multiply(&x.add(&x2), &y);
        let rhs = a.multiply(&x, &y).add(&a.multiply(&x2, &y));
        assert_eq!(lhs, rhs);
    }
}
