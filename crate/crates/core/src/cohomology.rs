//! Exact linear algebra over the complex: delta-cochain bases, the matrix of
//! the total differential, fraction-free elimination, cohomology dimensions,
//! and the coboundary solver used for obstruction removal and triviality
//! questions.

use crate::algebra::Monomial;
use crate::complex::{
    cochain_sub, total_cochain_nonzero_witness, total_d, BiDegree, Cochain, Factorisation,
    TotalCochain, ValueSort,
};
use crate::error::{Error, Result};
use crate::scalar::{FieldScalar, Scalar};
use crate::twist::TensorElement;
use std::collections::BTreeMap;

/// Output slot of a delta cochain: a single basis element of the value space.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum OutIndex {
    /// Edge rows: one monomial of A (for (m,0)) or of B (for (0,n)).
    Edge(Monomial),
    /// Interior: a basis tensor b (x) a of X.
    Interior(Monomial, Monomial),
}

/// A coordinate on the cochain space C^k: value 1 on one input tuple and one
/// output basis element, 0 elsewhere.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct CochainBasisIndex {
    pub bidegree: BiDegree,
    pub a_args: Vec<Monomial>,
    pub b_args: Vec<Monomial>,
    pub out: OutIndex,
}

impl CochainBasisIndex {
    /// The delta cochain this coordinate indexes.
    pub fn delta<K: Scalar>(&self) -> Cochain<K> {
        let mut table = BTreeMap::new();
        let sig = self.bidegree.value_signature();
        let value = match &self.out {
            OutIndex::Edge(m) => TensorElement::term(sig, vec![m.clone()], K::one()),
            OutIndex::Interior(b, a) => {
                TensorElement::term(sig, vec![b.clone(), a.clone()], K::one())
            }
        };
        table.insert((self.a_args.clone(), self.b_args.clone()), value);
        Cochain::from_table(self.bidegree, table)
    }
}

/// Deterministically ordered list of coordinates with reverse lookup.
#[derive(Clone, Debug, Default)]
pub struct DeltaBasis {
    pub indices: Vec<CochainBasisIndex>,
    lookup: BTreeMap<CochainBasisIndex, usize>,
}

impl DeltaBasis {
    pub fn from_indices(indices: Vec<CochainBasisIndex>) -> Self {
        let lookup = indices
            .iter()
            .enumerate()
            .map(|(i, ix)| (ix.clone(), i))
            .collect();
        DeltaBasis { indices, lookup }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn position(&self, ix: &CochainBasisIndex) -> Option<usize> {
        self.lookup.get(ix).copied()
    }
}

/// Degree caps for working over infinite-dimensional algebras. `input` bounds
/// enumerated input tuples, `output` bounds enumerated output monomials.
#[derive(Clone, Copy, Debug)]
pub struct Caps {
    pub input: u32,
    pub output: u32,
}

/// Enumerates the delta basis of C^k. Finite factorisations are enumerated
/// whole; infinite ones require caps.
pub fn delta_basis<K: Scalar>(
    fac: &Factorisation<K>,
    k: usize,
    caps: Option<Caps>,
) -> Result<DeltaBasis> {
    let finite = fac.is_finite_dimensional();
    let caps = match (finite, caps) {
        (true, _) => Caps { input: u32::MAX, output: u32::MAX },
        (false, Some(c)) => c,
        (false, None) => {
            return Err(Error::CapsRequired(
                "infinite-dimensional algebras need degree caps".into(),
            ))
        }
    };
    let (in_cap, out_cap) = if finite {
        (1, 1)
    } else {
        (caps.input, caps.output)
    };
    let mut indices = Vec::new();
    for bd in TotalCochain::<K>::bidegrees(k) {
        let tuples = fac.enumerate_tuples(bd.m, bd.n, in_cap);
        match bd.sort() {
            ValueSort::EdgeA => {
                let outs = fac.a.shape().enumerate(out_cap);
                for (a_args, b_args) in tuples {
                    for o in &outs {
                        indices.push(CochainBasisIndex {
                            bidegree: bd,
                            a_args: a_args.clone(),
                            b_args: b_args.clone(),
                            out: OutIndex::Edge(o.clone()),
                        });
                    }
                }
            }
            ValueSort::EdgeB => {
                let outs = fac.b.shape().enumerate(out_cap);
                for (a_args, b_args) in tuples {
                    for o in &outs {
                        indices.push(CochainBasisIndex {
                            bidegree: bd,
                            a_args: a_args.clone(),
                            b_args: b_args.clone(),
                            out: OutIndex::Edge(o.clone()),
                        });
                    }
                }
            }
            ValueSort::Interior => {
                let outs_b = fac.b.shape().enumerate(out_cap);
                let outs_a = fac.a.shape().enumerate(out_cap);
                for (a_args, b_args) in tuples {
                    for ob in &outs_b {
                        for oa in &outs_a {
                            indices.push(CochainBasisIndex {
                                bidegree: bd,
                                a_args: a_args.clone(),
                                b_args: b_args.clone(),
                                out: OutIndex::Interior(ob.clone(), oa.clone()),
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(DeltaBasis::from_indices(indices))
}

/// Sparse exact matrix with deterministic (row, col) ordering.
#[derive(Clone, Debug)]
pub struct ExactMatrix<K: Scalar> {
    pub rows: usize,
    pub cols: usize,
    entries: BTreeMap<(usize, usize), K>,
}

impl<K: Scalar> ExactMatrix<K> {
    pub fn new(rows: usize, cols: usize) -> Self {
        ExactMatrix {
            rows,
            cols,
            entries: BTreeMap::new(),
        }
    }

    pub fn set(&mut self, r: usize, c: usize, v: K) {
        debug_assert!(r < self.rows && c < self.cols);
        if v.is_zero() {
            self.entries.remove(&(r, c));
        } else {
            self.entries.insert((r, c), v);
        }
    }

    pub fn add_to(&mut self, r: usize, c: usize, v: &K) {
        let cur = self.get(r, c);
        self.set(r, c, cur.add(v));
    }

    pub fn get(&self, r: usize, c: usize) -> K {
        self.entries
            .get(&(r, c))
            .cloned()
            .unwrap_or_else(K::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &K)> {
        self.entries.iter()
    }

    pub fn num_entries(&self) -> usize {
        self.entries.len()
    }

    fn row_maps(&self) -> Vec<BTreeMap<usize, K>> {
        let mut rows = vec![BTreeMap::new(); self.rows];
        for ((r, c), v) in &self.entries {
            rows[*r].insert(*c, v.clone());
        }
        rows
    }
}

/// Result of fraction-free elimination on an (optionally augmented) system.
pub struct Echelon<K: Scalar> {
    pub rank: usize,
    pub cols: usize,
    /// (echelon row position, pivot column), in elimination order.
    pub pivots: Vec<(usize, usize)>,
    rows: Vec<(BTreeMap<usize, K>, K)>,
}

/// Fraction-free (Bareiss) elimination with deterministic pivoting: columns
/// in order, pivot is the first remaining row with a nonzero entry. The
/// division by the previous pivot is exact, which keeps intermediate entries
/// from blowing up over the rational-function field.
pub fn eliminate<K: FieldScalar>(
    row_data: Vec<(BTreeMap<usize, K>, K)>,
    cols: usize,
) -> Echelon<K> {
    let mut rows = row_data;
    let mut rank = 0usize;
    let mut pivots = Vec::new();
    let mut prev = K::one();
    for col in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&i| rows[i].0.get(&col).is_some_and(|v| !v.is_zero()))
        else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].0.get(&col).unwrap().clone();
        let (head, tail) = rows.split_at_mut(rank + 1);
        let pivot_row = &head[rank];
        for row in tail.iter_mut() {
            let factor = row.0.get(&col).cloned().unwrap_or_else(K::zero);
            // row := (pivot * row - factor * pivot_row) / prev
            let mut next: BTreeMap<usize, K> = BTreeMap::new();
            for (c, v) in row.0.iter() {
                let t = pivot.mul(v);
                if !t.is_zero() {
                    next.insert(*c, t);
                }
            }
            if !factor.is_zero() {
                for (c, v) in pivot_row.0.iter() {
                    let t = factor.mul(v);
                    if t.is_zero() {
                        continue;
                    }
                    let cur = next.get(c).cloned().unwrap_or_else(K::zero);
                    let s = cur.sub(&t);
                    if s.is_zero() {
                        next.remove(c);
                    } else {
                        next.insert(*c, s);
                    }
                }
            }
            let prev_inv = prev.try_inv().expect("previous pivot is nonzero");
            row.0 = next
                .into_iter()
                .map(|(c, v)| (c, v.mul(&prev_inv)))
                .collect();
            let rhs = pivot
                .mul(&row.1)
                .sub(&factor.mul(&pivot_row.1))
                .mul(&prev_inv);
            row.1 = rhs;
        }
        pivots.push((rank, col));
        prev = pivot;
        rank += 1;
    }
    Echelon {
        rank,
        cols,
        pivots,
        rows,
    }
}

impl<K: FieldScalar> Echelon<K> {
    /// A row that reduced to 0 = nonzero, if any.
    pub fn inconsistent_row(&self) -> Option<usize> {
        (self.rank..self.rows.len()).find(|&i| !self.rows[i].1.is_zero())
    }

    fn pivot_cols(&self) -> Vec<usize> {
        self.pivots.iter().map(|&(_, c)| c).collect()
    }

    /// Basis of the kernel of the coefficient matrix, one vector per free
    /// column, in column order.
    pub fn kernel_basis(&self) -> Vec<Vec<K>> {
        let pivot_cols = self.pivot_cols();
        let is_pivot: Vec<bool> = {
            let mut v = vec![false; self.cols];
            for &c in &pivot_cols {
                v[c] = true;
            }
            v
        };
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if is_pivot[free] {
                continue;
            }
            let mut x = vec![K::zero(); self.cols];
            x[free] = K::one();
            for &(ri, pc) in self.pivots.iter().rev() {
                let row = &self.rows[ri].0;
                let mut acc = K::zero();
                for (&c, v) in row.iter() {
                    if c > pc {
                        let xc = &x[c];
                        if !xc.is_zero() {
                            acc = acc.add(&v.mul(xc));
                        }
                    }
                }
                let piv = row.get(&pc).unwrap();
                x[pc] = acc.neg().div(piv).expect("pivot nonzero");
            }
            basis.push(x);
        }
        basis
    }

    /// Particular solution with free columns set to zero; `None` when the
    /// system is inconsistent.
    pub fn particular_solution(&self) -> Option<Vec<K>> {
        if self.inconsistent_row().is_some() {
            return None;
        }
        let mut x = vec![K::zero(); self.cols];
        for &(ri, pc) in self.pivots.iter().rev() {
            let (row, rhs) = &self.rows[ri];
            let mut acc = rhs.clone();
            for (&c, v) in row.iter() {
                if c > pc && !x[c].is_zero() {
                    acc = acc.sub(&v.mul(&x[c]));
                }
            }
            let piv = row.get(&pc).unwrap();
            x[pc] = acc.div(piv).expect("pivot nonzero");
        }
        Some(x)
    }
}

/// Rank and kernel of an exact matrix.
pub fn rank_and_kernel<K: FieldScalar>(m: &ExactMatrix<K>) -> (usize, Vec<Vec<K>>) {
    let rows = m
        .row_maps()
        .into_iter()
        .map(|r| (r, K::zero()))
        .collect();
    let ech = eliminate(rows, m.cols);
    let kernel = ech.kernel_basis();
    (ech.rank, kernel)
}

/// The matrix of D: C^k -> C^{k+1} in the delta bases, with the bases.
pub struct AssembledD<K: Scalar> {
    pub matrix: ExactMatrix<K>,
    pub cols: DeltaBasis,
    pub rows: DeltaBasis,
    /// Output terms that fell outside the enumerated row range (capped mode
    /// only); a nonzero count means the matrix is a sub-complex restriction.
    pub escaped: usize,
}

/// Assembles D as an exact matrix. Finite factorisations give the exact
/// differential; capped mode gives the restriction to the enumerated window
/// and counts the terms that escape it.
pub fn assemble_d<K: FieldScalar>(
    fac: &Factorisation<K>,
    k: usize,
    caps: Option<Caps>,
) -> Result<AssembledD<K>> {
    let cols = delta_basis(fac, k, caps)?;
    let rows = delta_basis(fac, k + 1, caps)?;
    let mut matrix = ExactMatrix::new(rows.len(), cols.len());
    let mut escaped = 0usize;
    // group row tuples by bidegree for evaluation
    let mut row_tuples: BTreeMap<BiDegree, Vec<(Vec<Monomial>, Vec<Monomial>)>> = BTreeMap::new();
    for ix in &rows.indices {
        row_tuples
            .entry(ix.bidegree)
            .or_default()
            .push((ix.a_args.clone(), ix.b_args.clone()));
    }
    for (bd, tuples) in row_tuples.iter_mut() {
        tuples.sort();
        tuples.dedup();
        let _ = bd;
    }
    for (j, col_ix) in cols.indices.iter().enumerate() {
        let delta = TotalCochain::new(k).with_component(col_ix.delta::<K>());
        let image = total_d(fac, &delta)?;
        for (bd, tuples) in &row_tuples {
            let comp = image.component(bd.m, bd.n);
            if comp.is_zero_rule() {
                continue;
            }
            for (a_args, b_args) in tuples {
                let v = comp.eval(a_args, b_args);
                for (t, c) in v.terms() {
                    let out = match bd.sort() {
                        ValueSort::Interior => OutIndex::Interior(t[0].clone(), t[1].clone()),
                        _ => OutIndex::Edge(t[0].clone()),
                    };
                    let row_ix = CochainBasisIndex {
                        bidegree: *bd,
                        a_args: a_args.clone(),
                        b_args: b_args.clone(),
                        out,
                    };
                    match rows.position(&row_ix) {
                        Some(i) => matrix.add_to(i, j, c),
                        None => escaped += 1,
                    }
                }
            }
        }
    }
    Ok(AssembledD {
        matrix,
        cols,
        rows,
        escaped,
    })
}

/// dim H^k = dim ker D_k - rank D_{k-1}, by exact elimination. Exact only for
/// finite-dimensional factorisations; the complex starts in degree 1, so the
/// k = 1 case has no incoming differential.
pub fn cohomology_dim<K: FieldScalar>(fac: &Factorisation<K>, k: usize) -> Result<usize> {
    if !fac.is_finite_dimensional() {
        return Err(Error::CapsRequired(
            "cohomology dimensions are exact only for finite-dimensional factorisations".into(),
        ));
    }
    let upper = assemble_d(fac, k, None)?;
    let (rank_k, kernel_k) = rank_and_kernel(&upper.matrix);
    debug_assert_eq!(rank_k + kernel_k.len(), upper.cols.len());
    let rank_below = if k == 1 {
        0
    } else {
        let lower = assemble_d(fac, k - 1, None)?;
        let (r, _) = rank_and_kernel(&lower.matrix);
        r
    };
    Ok(kernel_k.len() - rank_below)
}

/// Writes a total cochain in coordinates over a delta basis; terms outside
/// the basis are reported as an error.
pub fn vectorize<K: Scalar>(
    fac: &Factorisation<K>,
    tc: &TotalCochain<K>,
    basis: &DeltaBasis,
) -> Result<Vec<K>> {
    let mut v = vec![K::zero(); basis.len()];
    let mut tuples: BTreeMap<BiDegree, Vec<(Vec<Monomial>, Vec<Monomial>)>> = BTreeMap::new();
    for ix in &basis.indices {
        tuples
            .entry(ix.bidegree)
            .or_default()
            .push((ix.a_args.clone(), ix.b_args.clone()));
    }
    for t in tuples.values_mut() {
        t.sort();
        t.dedup();
    }
    let _ = fac;
    for (bd, tuple_list) in &tuples {
        let comp = tc.component(bd.m, bd.n);
        if comp.is_zero_rule() {
            continue;
        }
        for (a_args, b_args) in tuple_list {
            let val = comp.eval(a_args, b_args);
            for (t, c) in val.terms() {
                let out = match bd.sort() {
                    ValueSort::Interior => OutIndex::Interior(t[0].clone(), t[1].clone()),
                    _ => OutIndex::Edge(t[0].clone()),
                };
                let ix = CochainBasisIndex {
                    bidegree: *bd,
                    a_args: a_args.clone(),
                    b_args: b_args.clone(),
                    out,
                };
                match basis.position(&ix) {
                    Some(i) => v[i] = v[i].add(c),
                    None => {
                        return Err(Error::CapsRequired(format!(
                            "value at {bd} escapes the enumerated basis"
                        )))
                    }
                }
            }
        }
    }
    Ok(v)
}

/// Builds a total cochain of degree `k` from delta-basis coordinates.
pub fn cochain_from_coordinates<K: Scalar>(
    k: usize,
    entries: &[(CochainBasisIndex, K)],
) -> TotalCochain<K> {
    let mut tables: BTreeMap<BiDegree, BTreeMap<(Vec<Monomial>, Vec<Monomial>), TensorElement<K>>> =
        BTreeMap::new();
    for (ix, c) in entries {
        if c.is_zero() {
            continue;
        }
        let sig = ix.bidegree.value_signature();
        let tuple = match &ix.out {
            OutIndex::Edge(m) => vec![m.clone()],
            OutIndex::Interior(b, a) => vec![b.clone(), a.clone()],
        };
        let table = tables.entry(ix.bidegree).or_default();
        let key = (ix.a_args.clone(), ix.b_args.clone());
        let entry = table
            .entry(key)
            .or_insert_with(|| TensorElement::zero(sig));
        entry.add_term(tuple, c);
    }
    let mut tc = TotalCochain::new(k);
    for (bd, table) in tables {
        tc.set_component(Cochain::from_table(bd, table));
    }
    tc
}

/// Scalar multiple s with z cohomologous to s * generator; exact for
/// finite-dimensional factorisations with dim H^k = 1. The gauge cochain w
/// with z - D(w) = s * generator is returned alongside.
pub fn normalize_representative<K: FieldScalar>(
    fac: &Factorisation<K>,
    z: &TotalCochain<K>,
    generator: &TotalCochain<K>,
) -> Result<(K, TotalCochain<K>)> {
    if !fac.is_finite_dimensional() {
        return Err(Error::Unsupported(
            "representative normalization needs a finite-dimensional factorisation".into(),
        ));
    }
    let k = z.degree();
    // must be a cocycle
    let dz = total_d(fac, z)?;
    if total_cochain_nonzero_witness(fac, &dz, 1).is_some() {
        return Err(Error::NotACocycle);
    }
    let assembled = assemble_d(fac, k - 1, None)?;
    let z_vec = vectorize(fac, z, &assembled.rows)?;
    let gen_vec = vectorize(fac, generator, &assembled.rows)?;
    let ncols = assembled.cols.len();
    // unknowns: w (ncols) followed by the multiple s
    let mut rows_data: Vec<(BTreeMap<usize, K>, K)> = Vec::with_capacity(assembled.rows.len());
    let row_maps = assembled.matrix.row_maps();
    for (r, mut row) in row_maps.into_iter().enumerate() {
        if !gen_vec[r].is_zero() {
            row.insert(ncols, gen_vec[r].clone());
        }
        rows_data.push((row, z_vec[r].clone()));
    }
    let ech = eliminate(rows_data, ncols + 1);
    let solution = ech.particular_solution().ok_or_else(|| {
        Error::Internal("cocycle is not in the span of coboundaries and the generator".into())
    })?;
    let s = solution[ncols].clone();
    let w_entries: Vec<(CochainBasisIndex, K)> = assembled
        .cols
        .indices
        .iter()
        .cloned()
        .zip(solution.into_iter().take(ncols))
        .collect();
    let w = cochain_from_coordinates(k - 1, &w_entries);
    // z - D(w) = s * generator by construction; verify exactly
    let dw = total_d(fac, &w)?;
    let residual = z.sub(&dw)?.sub(&generator.scale(&s))?;
    if total_cochain_nonzero_witness(fac, &residual, 1).is_some() {
        return Err(Error::Internal("normalization residual is nonzero".into()));
    }
    Ok((s, w))
}

/// Outcome of solving D(x) = target over the capped delta basis of C^k.
pub enum SolveOutcome<K: Scalar> {
    Solved {
        particular: TotalCochain<K>,
        particular_coords: Vec<(CochainBasisIndex, K)>,
        kernel: Vec<Vec<(CochainBasisIndex, K)>>,
        /// Equation tuples the solution was verified against.
        equations: usize,
    },
    /// The enumerated rows are provably inconsistent; no solution exists
    /// (globally valid: every enumerated row is an exact equation).
    Inconsistent { witness: String },
    Inconclusive { reason: String },
}

/// Caps for the coboundary solver over infinite-dimensional factorisations.
#[derive(Clone, Copy, Debug)]
pub struct SolveCaps {
    /// Bound on input tuples carrying unknown values.
    pub input_degree: u32,
    /// Bound on the equation tuples D(x) is matched on.
    pub equation_degree: u32,
    /// Bound on output monomial degrees of the unknowns.
    pub output_degree: u32,
}

/// Solves D(x) = target for x in C^k, exactly.
///
/// Finite-dimensional factorisations are solved in the full delta basis.
/// Infinite-dimensional ones use the multidegree grading when every structure
/// map preserves it (exponent-based products, flip-type twists): the system
/// splits into one small exact block per multidegree shift present in the
/// target, and inconsistency of any block rules out a solution globally.
pub fn solve_coboundary<K: FieldScalar>(
    fac: &Factorisation<K>,
    k: usize,
    target: &TotalCochain<K>,
    caps: Option<SolveCaps>,
) -> Result<SolveOutcome<K>> {
    debug_assert_eq!(target.degree(), k + 1);
    if fac.is_finite_dimensional() {
        return solve_finite(fac, k, target);
    }
    let graded = fac.a.degree_monotone()
        && fac.b.degree_monotone()
        && fac.twist.degree_preserving()
        && matches!(fac.a.shape(), crate::algebra::BasisShape::Poly { .. })
        && matches!(fac.b.shape(), crate::algebra::BasisShape::Poly { .. });
    if !graded {
        return Ok(SolveOutcome::Inconclusive {
            reason: "factorisation is neither finite-dimensional nor multidegree-graded".into(),
        });
    }
    let caps = caps.ok_or_else(|| {
        Error::CapsRequired("solving over infinite-dimensional algebras needs caps".into())
    })?;
    if caps.input_degree < caps.equation_degree {
        return Err(Error::InvalidInput(
            "input cap must be at least the equation cap".into(),
        ));
    }
    solve_graded(fac, k, target, caps)
}

fn solve_finite<K: FieldScalar>(
    fac: &Factorisation<K>,
    k: usize,
    target: &TotalCochain<K>,
) -> Result<SolveOutcome<K>> {
    let assembled = assemble_d(fac, k, None)?;
    let rhs = vectorize(fac, target, &assembled.rows)?;
    let row_maps = assembled.matrix.row_maps();
    let rows_data: Vec<(BTreeMap<usize, K>, K)> = row_maps
        .into_iter()
        .zip(rhs.into_iter())
        .collect();
    let n_eq = assembled.rows.len();
    let ech = eliminate(rows_data, assembled.cols.len());
    match ech.particular_solution() {
        Some(sol) => {
            let coords: Vec<(CochainBasisIndex, K)> = assembled
                .cols
                .indices
                .iter()
                .cloned()
                .zip(sol)
                .filter(|(_, c)| !c.is_zero())
                .collect();
            let kernel = ech
                .kernel_basis()
                .into_iter()
                .map(|v| {
                    assembled
                        .cols
                        .indices
                        .iter()
                        .cloned()
                        .zip(v)
                        .filter(|(_, c)| !c.is_zero())
                        .collect()
                })
                .collect();
            Ok(SolveOutcome::Solved {
                particular: cochain_from_coordinates(k, &coords),
                particular_coords: coords,
                kernel,
                equations: n_eq,
            })
        }
        None => {
            let witness = ech
                .inconsistent_row()
                .map(|i| format!("echelon row {i} reduced to 0 = nonzero"))
                .unwrap_or_default();
            Ok(SolveOutcome::Inconsistent { witness })
        }
    }
}

/// Combined multidegree of monomials: A exponents followed by B exponents.
fn multidegree<K: Scalar>(
    fac: &Factorisation<K>,
    a_monos: &[&Monomial],
    b_monos: &[&Monomial],
) -> Vec<i64> {
    let na = fac.a.shape().arity();
    let nb = fac.b.shape().arity();
    let mut v = vec![0i64; na + nb];
    for m in a_monos {
        for (i, e) in m.0.iter().enumerate() {
            v[i] += *e as i64;
        }
    }
    for m in b_monos {
        for (i, e) in m.0.iter().enumerate() {
            v[na + i] += *e as i64;
        }
    }
    v
}

fn shift_of<K: Scalar>(
    fac: &Factorisation<K>,
    bd: BiDegree,
    a_args: &[Monomial],
    b_args: &[Monomial],
    out_tuple: &[Monomial],
) -> Vec<i64> {
    let input = multidegree(
        fac,
        &a_args.iter().collect::<Vec<_>>(),
        &b_args.iter().collect::<Vec<_>>(),
    );
    let output = match bd.sort() {
        ValueSort::EdgeA => multidegree(fac, &[&out_tuple[0]], &[]),
        ValueSort::EdgeB => multidegree(fac, &[], &[&out_tuple[0]]),
        ValueSort::Interior => multidegree(fac, &[&out_tuple[1]], &[&out_tuple[0]]),
    };
    output
        .iter()
        .zip(input.iter())
        .map(|(o, i)| o - i)
        .collect()
}

/// The unique output at multidegree `input + shift`, when it exists with
/// nonnegative exponents and the right edge support.
fn pinned_output<K: Scalar>(
    fac: &Factorisation<K>,
    bd: BiDegree,
    a_args: &[Monomial],
    b_args: &[Monomial],
    shift: &[i64],
) -> Option<OutIndex> {
    let input = multidegree(
        fac,
        &a_args.iter().collect::<Vec<_>>(),
        &b_args.iter().collect::<Vec<_>>(),
    );
    let target: Vec<i64> = input.iter().zip(shift.iter()).map(|(i, s)| i + s).collect();
    if target.iter().any(|&e| e < 0) {
        return None;
    }
    let na = fac.a.shape().arity();
    let a_part: Vec<u32> = target[..na].iter().map(|&e| e as u32).collect();
    let b_part: Vec<u32> = target[na..].iter().map(|&e| e as u32).collect();
    match bd.sort() {
        ValueSort::EdgeA => {
            if b_part.iter().any(|&e| e > 0) {
                None
            } else {
                Some(OutIndex::Edge(Monomial(a_part)))
            }
        }
        ValueSort::EdgeB => {
            if a_part.iter().any(|&e| e > 0) {
                None
            } else {
                Some(OutIndex::Edge(Monomial(b_part)))
            }
        }
        ValueSort::Interior => Some(OutIndex::Interior(Monomial(b_part), Monomial(a_part))),
    }
}

fn solve_graded<K: FieldScalar>(
    fac: &Factorisation<K>,
    k: usize,
    target: &TotalCochain<K>,
    caps: SolveCaps,
) -> Result<SolveOutcome<K>> {
    // equation tuples and the shifts present in the target on them
    let mut equations: Vec<(BiDegree, Vec<Monomial>, Vec<Monomial>)> = Vec::new();
    for bd in TotalCochain::<K>::bidegrees(k + 1) {
        for (a_args, b_args) in fac.enumerate_tuples(bd.m, bd.n, caps.equation_degree) {
            equations.push((bd, a_args, b_args));
        }
    }
    let mut shifts: Vec<Vec<i64>> = Vec::new();
    let mut rhs_values: BTreeMap<(usize, Vec<i64>), K> = BTreeMap::new();
    for (eq_idx, (bd, a_args, b_args)) in equations.iter().enumerate() {
        let comp = target.component(bd.m, bd.n);
        if comp.is_zero_rule() {
            continue;
        }
        let v = comp.eval(a_args, b_args);
        for (t, c) in v.terms() {
            let s = shift_of(fac, *bd, a_args, b_args, t);
            if !shifts.contains(&s) {
                shifts.push(s.clone());
            }
            let key = (eq_idx, s);
            let cur = rhs_values.get(&key).cloned().unwrap_or_else(K::zero);
            rhs_values.insert(key, cur.add(c));
        }
    }
    shifts.sort();

    let mut all_coords: Vec<(CochainBasisIndex, K)> = Vec::new();
    let mut all_kernel: Vec<Vec<(CochainBasisIndex, K)>> = Vec::new();
    for shift in &shifts {
        // columns: unknown tuples with a valid pinned output within caps
        let mut cols: Vec<CochainBasisIndex> = Vec::new();
        for bd in TotalCochain::<K>::bidegrees(k) {
            for (a_args, b_args) in fac.enumerate_tuples(bd.m, bd.n, caps.input_degree) {
                if let Some(out) = pinned_output(fac, bd, &a_args, &b_args, shift) {
                    let out_deg = match &out {
                        OutIndex::Edge(m) => match bd.sort() {
                            ValueSort::EdgeA => fac.a.degree(m),
                            _ => fac.b.degree(m),
                        },
                        OutIndex::Interior(b, a) => fac.b.degree(b) + fac.a.degree(a),
                    };
                    if out_deg > caps.output_degree {
                        continue;
                    }
                    cols.push(CochainBasisIndex {
                        bidegree: bd,
                        a_args,
                        b_args,
                        out,
                    });
                }
            }
        }
        // rows: one per equation tuple with a valid pinned output coordinate
        let mut rows_data: Vec<(BTreeMap<usize, K>, K)> = Vec::new();
        let mut row_of_eq: Vec<Option<usize>> = vec![None; equations.len()];
        for (eq_idx, (bd, a_args, b_args)) in equations.iter().enumerate() {
            if pinned_output(fac, *bd, a_args, b_args, shift).is_none() {
                // the coordinate does not exist; the rhs must not hit it either
                if rhs_values.contains_key(&(eq_idx, shift.clone())) {
                    return Err(Error::Internal(
                        "target has a term at a nonexistent coordinate".into(),
                    ));
                }
                continue;
            }
            let rhs = rhs_values
                .get(&(eq_idx, shift.clone()))
                .cloned()
                .unwrap_or_else(K::zero);
            row_of_eq[eq_idx] = Some(rows_data.len());
            rows_data.push((BTreeMap::new(), rhs));
        }
        // matrix entries from D of each column delta
        for (j, col_ix) in cols.iter().enumerate() {
            let delta = TotalCochain::new(k).with_component(col_ix.delta::<K>());
            let image = total_d(fac, &delta)?;
            for (eq_idx, (bd, a_args, b_args)) in equations.iter().enumerate() {
                let Some(row) = row_of_eq[eq_idx] else { continue };
                let comp = image.component(bd.m, bd.n);
                if comp.is_zero_rule() {
                    continue;
                }
                let v = comp.eval(a_args, b_args);
                for (t, c) in v.terms() {
                    debug_assert_eq!(&shift_of(fac, *bd, a_args, b_args, t), shift);
                    let cur = rows_data[row].0.get(&j).cloned().unwrap_or_else(K::zero);
                    let s = cur.add(c);
                    if s.is_zero() {
                        rows_data[row].0.remove(&j);
                    } else {
                        rows_data[row].0.insert(j, s);
                    }
                }
            }
        }
        let ech = eliminate(rows_data, cols.len());
        match ech.particular_solution() {
            Some(sol) => {
                for (ix, c) in cols.iter().zip(sol.into_iter()) {
                    if !c.is_zero() {
                        all_coords.push((ix.clone(), c));
                    }
                }
                for kv in ech.kernel_basis() {
                    let entry: Vec<(CochainBasisIndex, K)> = cols
                        .iter()
                        .cloned()
                        .zip(kv)
                        .filter(|(_, c)| !c.is_zero())
                        .collect();
                    all_kernel.push(entry);
                }
            }
            None => {
                return Ok(SolveOutcome::Inconsistent {
                    witness: format!("no solution at multidegree shift {shift:?}"),
                });
            }
        }
    }
    let particular = cochain_from_coordinates(k, &all_coords);
    // exact verification on every enumerated equation tuple
    let image = total_d(fac, &particular)?;
    let residual_tc = |bd: &BiDegree, a_args: &[Monomial], b_args: &[Monomial]| -> Result<bool> {
        let got = image.component(bd.m, bd.n);
        let want = target.component(bd.m, bd.n);
        let diff = cochain_sub(&got, &want)?;
        Ok(diff.eval(a_args, b_args).is_zero())
    };
    for (bd, a_args, b_args) in &equations {
        if !residual_tc(bd, a_args, b_args)? {
            return Ok(SolveOutcome::Inconclusive {
                reason: format!(
                    "solution fails verification at {bd} on {:?}/{:?}; caps too small",
                    a_args, b_args
                ),
            });
        }
    }
    Ok(SolveOutcome::Solved {
        particular,
        particular_coords: all_coords,
        kernel: all_kernel,
        equations: equations.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rat;

    fn rat_matrix(rows: usize, cols: usize, data: &[(usize, usize, i64)]) -> ExactMatrix<Rat> {
        let mut m = ExactMatrix::new(rows, cols);
        for &(r, c, v) in data {
            m.set(r, c, Rat::from_int(v));
        }
        m
    }

    #[test]
    fn identity_and_zero_ranks() {
        let id = rat_matrix(3, 3, &[(0, 0, 1), (1, 1, 1), (2, 2, 1)]);
        let (rank, kernel) = rank_and_kernel(&id);
        assert_eq!(rank, 3);
        assert!(kernel.is_empty());
        let zero = rat_matrix(3, 3, &[]);
        let (rank, kernel) = rank_and_kernel(&zero);
        assert_eq!(rank, 0);
        assert_eq!(kernel.len(), 3);
    }

    #[test]
    fn rank_is_column_permutation_invariant() {
        // a fixed 5x7 rational matrix vs the same with permuted columns
        let data: Vec<(usize, usize, i64)> = vec![
            (0, 0, 2), (0, 3, -1), (0, 6, 5),
            (1, 1, 1), (1, 3, 4), (1, 5, -3),
            (2, 0, 2), (2, 1, 1), (2, 3, 3), (2, 5, -3), (2, 6, 5),
            (3, 2, 7), (3, 4, -2),
            (4, 2, 7), (4, 4, -2), (4, 6, 1),
        ];
        let m = rat_matrix(5, 7, &data);
        let perm = [6usize, 2, 4, 0, 5, 1, 3];
        let permuted: Vec<(usize, usize, i64)> =
            data.iter().map(|&(r, c, v)| (r, perm[c], v)).collect();
        let mp = rat_matrix(5, 7, &permuted);
        let (r1, k1) = rank_and_kernel(&m);
        let (r2, k2) = rank_and_kernel(&mp);
        assert_eq!(r1, r2);
        assert_eq!(k1.len(), k2.len());
        // kernel vectors are genuine null vectors
        for v in &k1 {
            for row in 0..5 {
                let mut acc = Rat::zero();
                for col in 0..7 {
                    acc = acc.add(&m.get(row, col).mul(&v[col]));
                }
                assert!(acc.is_zero());
            }
        }
    }

    #[test]
    fn solve_with_rhs() {
        // x + y = 3, x - y = 1  ->  x = 2, y = 1
        let mut rows = Vec::new();
        rows.push((
            BTreeMap::from([(0, Rat::from_int(1)), (1, Rat::from_int(1))]),
            Rat::from_int(3),
        ));
        rows.push((
            BTreeMap::from([(0, Rat::from_int(1)), (1, Rat::from_int(-1))]),
            Rat::from_int(1),
        ));
        let ech = eliminate(rows, 2);
        let sol = ech.particular_solution().unwrap();
        assert_eq!(sol, vec![Rat::from_int(2), Rat::from_int(1)]);

        // inconsistent: x + y = 1, x + y = 2
        let rows = vec![
            (
                BTreeMap::from([(0, Rat::one()), (1, Rat::one())]),
                Rat::from_int(1),
            ),
            (
                BTreeMap::from([(0, Rat::one()), (1, Rat::one())]),
                Rat::from_int(2),
            ),
        ];
        let ech = eliminate(rows, 2);
        assert!(ech.particular_solution().is_none());
        assert!(ech.inconsistent_row().is_some());
    }

    #[test]
    fn quaternion_matrix_shapes() {
        let fac = crate::complex::tests::quaternion_fac();
        let d1 = assemble_d(&fac, 1, None).unwrap();
        assert_eq!(d1.cols.len(), 8);
        assert_eq!(d1.rows.len(), 32);
        assert_eq!(d1.escaped, 0);
        let d2 = assemble_d(&fac, 2, None).unwrap();
        assert_eq!(d2.cols.len(), 32);
        assert_eq!(d2.rows.len(), 96);
    }

    #[test]
    fn image_lands_in_kernel() {
        // rank(D_k) + dim ker(D_k) = dim C^k and im D_1 is annihilated by D_2
        let fac = crate::complex::tests::quaternion_fac();
        let d1 = assemble_d(&fac, 1, None).unwrap();
        let d2 = assemble_d(&fac, 2, None).unwrap();
        let (r1, k1) = rank_and_kernel(&d1.matrix);
        assert_eq!(r1 + k1.len(), 8);
        for j in 0..d1.cols.len() {
            // image vector of column j
            let img: Vec<Rat> = (0..d1.rows.len()).map(|i| d1.matrix.get(i, j)).collect();
            for r2row in 0..d2.rows.len() {
                let mut acc = Rat::zero();
                for c in 0..d2.cols.len() {
                    let e = d2.matrix.get(r2row, c);
                    if !e.is_zero() && !img[c].is_zero() {
                        acc = acc.add(&e.mul(&img[c]));
                    }
                }
                assert!(acc.is_zero(), "D_2 D_1 has a nonzero entry");
            }
        }
    }

    #[test]
    fn quaternion_h2_is_one() {
        let fac = crate::complex::tests::quaternion_fac();
        assert_eq!(cohomology_dim(&fac, 2).unwrap(), 1);
    }

    #[test]
    fn elimination_is_deterministic() {
        let data: Vec<(usize, usize, i64)> = vec![
            (0, 0, 3), (0, 2, 1), (1, 1, -2), (1, 2, 4), (2, 0, 3), (2, 1, -2),
        ];
        let m = rat_matrix(3, 3, &data);
        let (r1, k1) = rank_and_kernel(&m);
        let (r2, k2) = rank_and_kernel(&m);
        assert_eq!(r1, r2);
        assert_eq!(k1, k2);
    }
}
