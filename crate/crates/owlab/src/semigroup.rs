//! Concrete semigroups: integer lattices, the free commutative monoid ℕ^d,
//! the discrete Heisenberg group, and finite multiplication tables.
//!
//! The table family is deliberately allowed to be non-cancellative so that
//! negative examples (e.g. an idempotent absorbing element) are executable.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};

/// A point of a concrete semigroup.
///
/// Lattice, monoid, and Heisenberg elements carry an integer coordinate
/// vector (arbitrary precision); table elements carry an index. The derived
/// `Ord` is lexicographic on the payload, which fixes the canonical order
/// used everywhere (greedy passes, set iteration, rendering).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Element {
    Table(usize),
    Point(Vec<BigInt>),
}

impl Element {
    pub fn point<I: Into<BigInt> + Clone>(coords: &[I]) -> Self {
        Element::Point(coords.iter().cloned().map(Into::into).collect())
    }

    pub fn coords(&self) -> Option<&[BigInt]> {
        match self {
            Element::Point(v) => Some(v),
            Element::Table(_) => None,
        }
    }

    pub fn table_index(&self) -> Option<usize> {
        match self {
            Element::Table(i) => Some(*i),
            Element::Point(_) => None,
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Table(i) => write!(f, "s{i}"),
            Element::Point(v) => {
                write!(f, "(")?;
                for (i, c) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// A canonical, duplicate-free finite set of elements.
///
/// Backed by a `BTreeSet`, so iteration is always in the fixed total order
/// and construction from any permutation with duplicates yields the same
/// value. All set operations are exact.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FinSubset {
    elems: BTreeSet<Element>,
}

impl FinSubset {
    pub fn empty() -> Self {
        FinSubset::default()
    }

    pub fn singleton(e: Element) -> Self {
        let mut elems = BTreeSet::new();
        elems.insert(e);
        FinSubset { elems }
    }

    pub fn from_elements<I: IntoIterator<Item = Element>>(iter: I) -> Self {
        FinSubset {
            elems: iter.into_iter().collect(),
        }
    }

    /// The half-open box `[lo, hi)` in ℤ^d (componentwise). Any collapsed
    /// coordinate (`hi_i <= lo_i`) gives the empty set.
    pub fn lattice_box(lo: &[BigInt], hi: &[BigInt]) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::Domain(
                "box bounds must be non-empty vectors of equal length".into(),
            ));
        }
        let mut total = BigInt::from(1u32);
        for (l, h) in lo.iter().zip(hi) {
            if h <= l {
                return Ok(FinSubset::empty());
            }
            total *= h - l;
        }
        if total > BigInt::from(MAX_BOX_CARD) {
            return Err(Error::Domain(format!(
                "box with {total} elements exceeds the in-memory limit of {MAX_BOX_CARD}"
            )));
        }
        let mut elems = BTreeSet::new();
        let mut cur: Vec<BigInt> = lo.to_vec();
        loop {
            elems.insert(Element::Point(cur.clone()));
            let mut i = cur.len();
            loop {
                if i == 0 {
                    return Ok(FinSubset { elems });
                }
                i -= 1;
                cur[i] += 1u32;
                if cur[i] < hi[i] {
                    break;
                }
                cur[i] = lo[i].clone();
            }
        }
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn contains(&self, e: &Element) -> bool {
        self.elems.contains(e)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Element> {
        self.elems.iter()
    }

    pub fn insert(&mut self, e: Element) -> bool {
        self.elems.insert(e)
    }

    pub fn union(&self, other: &FinSubset) -> FinSubset {
        FinSubset {
            elems: self.elems.union(&other.elems).cloned().collect(),
        }
    }

    pub fn intersection(&self, other: &FinSubset) -> FinSubset {
        FinSubset {
            elems: self.elems.intersection(&other.elems).cloned().collect(),
        }
    }

    pub fn difference(&self, other: &FinSubset) -> FinSubset {
        FinSubset {
            elems: self.elems.difference(&other.elems).cloned().collect(),
        }
    }

    pub fn is_subset(&self, other: &FinSubset) -> bool {
        self.elems.is_subset(&other.elems)
    }

    pub fn is_disjoint(&self, other: &FinSubset) -> bool {
        self.elems.is_disjoint(&other.elems)
    }
}

impl FromIterator<Element> for FinSubset {
    fn from_iter<I: IntoIterator<Item = Element>>(iter: I) -> Self {
        FinSubset::from_elements(iter)
    }
}

const MAX_BOX_CARD: u64 = 8_000_000;

/// A finite semigroup given by its full multiplication table.
///
/// `table[i][j]` is the index of `s_i · s_j`. Associativity is checked
/// exhaustively at construction, and per-element cancellability flags are
/// precomputed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteTable {
    table: Vec<Vec<usize>>,
    left_cancellable: Vec<bool>,
    right_cancellable: Vec<bool>,
}

impl FiniteTable {
    pub fn new(table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::InvalidTable("table must be non-empty".into()));
        }
        for row in &table {
            if row.len() != n {
                return Err(Error::InvalidTable(format!(
                    "table must be {n}x{n}, found a row of length {}",
                    row.len()
                )));
            }
            if let Some(&bad) = row.iter().find(|&&v| v >= n) {
                return Err(Error::InvalidTable(format!(
                    "entry {bad} out of range for a table of size {n}"
                )));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::InvalidTable(format!(
                            "not associative at (s{a},s{b},s{c})"
                        )));
                    }
                }
            }
        }
        let left_cancellable = (0..n)
            .map(|i| {
                let mut seen = vec![false; n];
                table[i].iter().all(|&v| !std::mem::replace(&mut seen[v], true))
            })
            .collect();
        let right_cancellable = (0..n)
            .map(|i| {
                let mut seen = vec![false; n];
                (0..n).all(|j| !std::mem::replace(&mut seen[table[j][i]], true))
            })
            .collect();
        Ok(FiniteTable {
            table,
            left_cancellable,
            right_cancellable,
        })
    }

    pub fn size(&self) -> usize {
        self.table.len()
    }

    pub fn product(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }
}

/// Specification of a concrete semigroup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Semigroup {
    /// (ℤ^d, +), a group.
    IntLattice(usize),
    /// (ℕ^d, +), a cancellative monoid that is not a group.
    NatMonoid(usize),
    /// Discrete Heisenberg group on integer triples with the fixed
    /// convention (a,b,c)·(a',b',c') = (a+a', b+b', c+c'+a·b').
    Heisenberg,
    /// Finite semigroup given by a multiplication table.
    FiniteTable(FiniteTable),
}

impl Semigroup {
    pub fn int_lattice(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Domain("dimension must be positive".into()));
        }
        Ok(Semigroup::IntLattice(d))
    }

    pub fn nat_monoid(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Domain("dimension must be positive".into()));
        }
        Ok(Semigroup::NatMonoid(d))
    }

    pub fn heisenberg() -> Self {
        Semigroup::Heisenberg
    }

    /// A short name matching the CLI grammar.
    pub fn name(&self) -> String {
        match self {
            Semigroup::IntLattice(d) => format!("zd:{d}"),
            Semigroup::NatMonoid(d) => format!("nat:{d}"),
            Semigroup::Heisenberg => "heis".into(),
            Semigroup::FiniteTable(t) => format!("table[{}]", t.size()),
        }
    }

    pub fn validate(&self, e: &Element) -> Result<()> {
        match (self, e) {
            (Semigroup::IntLattice(d), Element::Point(v)) if v.len() == *d => Ok(()),
            (Semigroup::NatMonoid(d), Element::Point(v)) if v.len() == *d => {
                if v.iter().any(|c| c < &BigInt::zero()) {
                    Err(Error::InvalidElement(format!(
                        "{e} has a negative coordinate in {}",
                        self.name()
                    )))
                } else {
                    Ok(())
                }
            }
            (Semigroup::Heisenberg, Element::Point(v)) if v.len() == 3 => Ok(()),
            (Semigroup::FiniteTable(t), Element::Table(i)) if *i < t.size() => Ok(()),
            _ => Err(Error::InvalidElement(format!(
                "{e} does not belong to {}",
                self.name()
            ))),
        }
    }

    pub fn validate_set(&self, a: &FinSubset) -> Result<()> {
        a.iter().try_for_each(|e| self.validate(e))
    }

    pub fn mul(&self, a: &Element, b: &Element) -> Result<Element> {
        self.validate(a)?;
        self.validate(b)?;
        match (self, a, b) {
            (Semigroup::IntLattice(_) | Semigroup::NatMonoid(_), Element::Point(x), Element::Point(y)) => {
                Ok(Element::Point(x.iter().zip(y).map(|(u, v)| u + v).collect()))
            }
            (Semigroup::Heisenberg, Element::Point(x), Element::Point(y)) => Ok(Element::Point(vec![
                &x[0] + &y[0],
                &x[1] + &y[1],
                &x[2] + &y[2] + &x[0] * &y[1],
            ])),
            (Semigroup::FiniteTable(t), Element::Table(i), Element::Table(j)) => {
                Ok(Element::Table(t.product(*i, *j)))
            }
            _ => unreachable!("validated"),
        }
    }

    /// The right translate As = { a·s : a ∈ A }, canonicalized.
    pub fn right_translate(&self, a: &FinSubset, s: &Element) -> Result<FinSubset> {
        a.iter().map(|x| self.mul(x, s)).collect()
    }

    /// The left translate sA = { s·a : a ∈ A }, canonicalized.
    pub fn left_translate(&self, s: &Element, a: &FinSubset) -> Result<FinSubset> {
        a.iter().map(|x| self.mul(s, x)).collect()
    }

    /// Solves a·s = b for s. Returns `None` when no solution exists.
    ///
    /// For a table element that is not left-cancellable the solution may be
    /// non-unique, which is an error: the caller must enumerate the table
    /// instead.
    pub fn left_divide(&self, a: &Element, b: &Element) -> Result<Option<Element>> {
        self.validate(a)?;
        self.validate(b)?;
        match (self, a, b) {
            (Semigroup::IntLattice(_), Element::Point(x), Element::Point(y)) => {
                Ok(Some(Element::Point(x.iter().zip(y).map(|(u, v)| v - u).collect())))
            }
            (Semigroup::NatMonoid(_), Element::Point(x), Element::Point(y)) => {
                let diff: Vec<BigInt> = x.iter().zip(y).map(|(u, v)| v - u).collect();
                if diff.iter().any(|c| c < &BigInt::zero()) {
                    Ok(None)
                } else {
                    Ok(Some(Element::Point(diff)))
                }
            }
            (Semigroup::Heisenberg, Element::Point(x), Element::Point(y)) => {
                // (a1,a2,a3)·(s1,s2,s3) = (a1+s1, a2+s2, a3+s3+a1·s2)
                let s1 = &y[0] - &x[0];
                let s2 = &y[1] - &x[1];
                let s3 = &y[2] - &x[2] - &x[0] * &s2;
                Ok(Some(Element::Point(vec![s1, s2, s3])))
            }
            (Semigroup::FiniteTable(t), Element::Table(i), Element::Table(j)) => {
                if !t.left_cancellable[*i] {
                    let solutions: Vec<usize> =
                        (0..t.size()).filter(|&s| t.product(*i, s) == *j).collect();
                    if solutions.len() > 1 {
                        return Err(Error::MultipleSolutions(format!(
                            "s{i}·x = s{j} has {} solutions",
                            solutions.len()
                        )));
                    }
                    return Ok(solutions.first().map(|&s| Element::Table(s)));
                }
                Ok((0..t.size())
                    .find(|&s| t.product(*i, s) == *j)
                    .map(Element::Table))
            }
            _ => unreachable!("validated"),
        }
    }

    pub fn is_left_cancellable(&self, e: &Element) -> Result<bool> {
        self.validate(e)?;
        Ok(match (self, e) {
            (Semigroup::FiniteTable(t), Element::Table(i)) => t.left_cancellable[*i],
            _ => true,
        })
    }

    pub fn is_right_cancellable(&self, e: &Element) -> Result<bool> {
        self.validate(e)?;
        Ok(match (self, e) {
            (Semigroup::FiniteTable(t), Element::Table(i)) => t.right_cancellable[*i],
            _ => true,
        })
    }

    /// Whether every element of the semigroup is cancellable.
    pub fn is_cancellative(&self) -> bool {
        match self {
            Semigroup::FiniteTable(t) => {
                t.left_cancellable.iter().all(|&b| b) && t.right_cancellable.iter().all(|&b| b)
            }
            _ => true,
        }
    }

    /// All elements of a finite-table semigroup.
    pub fn all_elements(&self) -> Option<FinSubset> {
        match self {
            Semigroup::FiniteTable(t) => {
                Some((0..t.size()).map(Element::Table).collect())
            }
            _ => None,
        }
    }
}

/// The verdict for one element of a cancellativity probe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CancellabilityVerdict {
    pub element: Element,
    pub left_cancellable: bool,
    pub right_cancellable: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeReport {
    /// True when the verdicts were computed exhaustively (finite tables);
    /// false for sample-based injectivity checks on infinite families.
    pub exhaustive: bool,
    pub verdicts: Vec<CancellabilityVerdict>,
}

/// Per-element left/right cancellability verdicts.
///
/// For a finite table the check is exhaustive; otherwise injectivity of
/// `L_s` and `R_s` is tested on the sample itself.
pub fn cancellativity_probe(sg: &Semigroup, sample: &FinSubset) -> Result<ProbeReport> {
    if sample.is_empty() {
        return Err(Error::Domain("cancellativity probe needs a non-empty sample".into()));
    }
    sg.validate_set(sample)?;
    match sg {
        Semigroup::FiniteTable(t) => Ok(ProbeReport {
            exhaustive: true,
            verdicts: sample
                .iter()
                .map(|e| {
                    let i = e.table_index().expect("validated");
                    CancellabilityVerdict {
                        element: e.clone(),
                        left_cancellable: t.left_cancellable[i],
                        right_cancellable: t.right_cancellable[i],
                    }
                })
                .collect(),
        }),
        _ => {
            let mut verdicts = Vec::with_capacity(sample.len());
            for s in sample.iter() {
                let left = sg.left_translate(s, sample)?.len() == sample.len();
                let right = sg.right_translate(sample, s)?.len() == sample.len();
                verdicts.push(CancellabilityVerdict {
                    element: s.clone(),
                    left_cancellable: left,
                    right_cancellable: right,
                });
            }
            Ok(ProbeReport {
                exhaustive: false,
                verdicts,
            })
        }
    }
}

/// The two-element monoid {s0, s1} with identity s0 and s1² = s1.
///
/// This is the standard non-left-cancellative counterexample; s1 collapses
/// translate sums.
pub fn idempotent_pair() -> Semigroup {
    Semigroup::FiniteTable(
        FiniteTable::new(vec![vec![0, 1], vec![1, 1]]).expect("associative by inspection"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zint(v: &[i64]) -> Element {
        Element::point(v)
    }

    #[test]
    fn lattice_mul_is_addition() {
        let sg = Semigroup::int_lattice(1).unwrap();
        assert_eq!(sg.mul(&zint(&[3]), &zint(&[4])).unwrap(), zint(&[7]));
    }

    #[test]
    fn heisenberg_mul_matches_convention() {
        let sg = Semigroup::heisenberg();
        assert_eq!(
            sg.mul(&zint(&[1, 0, 0]), &zint(&[0, 1, 0])).unwrap(),
            zint(&[1, 1, 1])
        );
    }

    #[test]
    fn table_idempotent_squares_to_itself() {
        let sg = idempotent_pair();
        assert_eq!(
            sg.mul(&Element::Table(1), &Element::Table(1)).unwrap(),
            Element::Table(1)
        );
    }

    #[test]
    fn right_translate_shifts_boxes() {
        let sg = Semigroup::int_lattice(1).unwrap();
        let a = FinSubset::lattice_box(&[0.into()], &[10.into()]).unwrap();
        let shifted = sg.right_translate(&a, &zint(&[5])).unwrap();
        let expected = FinSubset::lattice_box(&[5.into()], &[15.into()]).unwrap();
        assert_eq!(shifted, expected);
    }

    #[test]
    fn right_translate_collapses_in_table() {
        let sg = idempotent_pair();
        let a = FinSubset::from_elements([Element::Table(0), Element::Table(1)]);
        let t = sg.right_translate(&a, &Element::Table(1)).unwrap();
        assert_eq!(t, FinSubset::singleton(Element::Table(1)));
    }

    #[test]
    fn heisenberg_left_translate_skews() {
        let sg = Semigroup::heisenberg();
        let a: FinSubset = (0..2)
            .flat_map(|b| (0..2).map(move |c| zint(&[0, b, c])))
            .collect();
        let t = sg.left_translate(&zint(&[1, 0, 0]), &a).unwrap();
        let expected: FinSubset = (0..2)
            .flat_map(|b| (0..2).map(move |c| zint(&[1, b, c + b])))
            .collect();
        assert_eq!(t, expected);
    }

    #[test]
    fn left_divide_examples() {
        let z = Semigroup::int_lattice(1).unwrap();
        assert_eq!(z.left_divide(&zint(&[3]), &zint(&[10])).unwrap(), Some(zint(&[7])));
        let n = Semigroup::nat_monoid(1).unwrap();
        assert_eq!(n.left_divide(&zint(&[5]), &zint(&[3])).unwrap(), None);
        let h = Semigroup::heisenberg();
        let s = h.left_divide(&zint(&[1, 0, 0]), &zint(&[1, 1, 1])).unwrap().unwrap();
        assert_eq!(h.mul(&zint(&[1, 0, 0]), &s).unwrap(), zint(&[1, 1, 1]));
        assert_eq!(s, zint(&[0, 1, 0]));
    }

    #[test]
    fn left_divide_round_trip_on_random_heisenberg() {
        let h = Semigroup::heisenberg();
        for a in -3i64..3 {
            for b in -3i64..3 {
                let x = zint(&[a, b, a * b]);
                let y = zint(&[b, a, 1 - a]);
                let s = h.left_divide(&x, &y).unwrap().unwrap();
                assert_eq!(h.mul(&x, &s).unwrap(), y);
            }
        }
    }

    #[test]
    fn probe_flags_idempotent_as_non_cancellable() {
        let sg = idempotent_pair();
        let sample = sg.all_elements().unwrap();
        let report = cancellativity_probe(&sg, &sample).unwrap();
        assert!(report.exhaustive);
        let s1 = report
            .verdicts
            .iter()
            .find(|v| v.element == Element::Table(1))
            .unwrap();
        assert!(!s1.left_cancellable);
        assert!(!s1.right_cancellable);
    }

    #[test]
    fn probe_samples_lattice_and_monoid_as_cancellable() {
        for sg in [Semigroup::int_lattice(2).unwrap(), Semigroup::nat_monoid(1).unwrap()] {
            let d = match &sg {
                Semigroup::IntLattice(d) | Semigroup::NatMonoid(d) => *d,
                _ => unreachable!(),
            };
            let sample = FinSubset::lattice_box(
                &vec![BigInt::from(0); d],
                &vec![BigInt::from(3); d],
            )
            .unwrap();
            let report = cancellativity_probe(&sg, &sample).unwrap();
            assert!(!report.exhaustive);
            assert!(report
                .verdicts
                .iter()
                .all(|v| v.left_cancellable && v.right_cancellable));
        }
    }

    #[test]
    fn nat_monoid_rejects_negative_coordinates() {
        let n = Semigroup::nat_monoid(2).unwrap();
        assert!(n.validate(&zint(&[1, -1])).is_err());
    }

    #[test]
    fn non_associative_table_rejected() {
        // s_i · s_j := i (left projection) is associative; tweak one entry.
        let bad = FiniteTable::new(vec![vec![0, 0], vec![1, 0]]);
        assert!(bad.is_err());
    }

    #[test]
    fn box_set_is_canonical_and_half_open() {
        let a = FinSubset::lattice_box(&[0.into(), 0.into()], &[2.into(), 3.into()]).unwrap();
        assert_eq!(a.len(), 6);
        let empty = FinSubset::lattice_box(&[1.into()], &[1.into()]).unwrap();
        assert!(empty.is_empty());
    }
}
