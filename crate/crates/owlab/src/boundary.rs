//! Right K-interior, right K-boundary, the amenability constant α(A,K),
//! and translate sums Σ_s |As ∩ B|.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::semigroup::{FinSubset, Semigroup};

/// An exact, unreduced ratio of cardinalities. `value()` reduces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactRatio {
    pub num: u64,
    pub den: u64,
}

/// α(A,K) = |∂_K(A)|/|A|, kept unreduced so the raw cardinalities survive
/// into reports.
pub type AmenabilityConstant = ExactRatio;

impl ExactRatio {
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0, "ratio denominator must be positive");
        ExactRatio { num, den }
    }

    pub fn zero(den: u64) -> Self {
        ExactRatio::new(0, den)
    }

    pub fn value(&self) -> BigRational {
        BigRational::new(BigInt::from(self.num), BigInt::from(self.den))
    }

    /// Exact comparison against an arbitrary rational bound.
    pub fn le_rational(&self, bound: &BigRational) -> bool {
        &self.value() <= bound
    }
}

impl PartialOrd for ExactRatio {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExactRatio {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // cross-multiplication in u128 is exact for u64 operands
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

impl std::fmt::Display for ExactRatio {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// int_K(A) = { s ∈ A : Ks ⊆ A }. For K = ∅ the condition is vacuous and
/// the interior is all of A.
pub fn interior(sg: &Semigroup, a: &FinSubset, k: &FinSubset) -> Result<FinSubset> {
    sg.validate_set(a)?;
    sg.validate_set(k)?;
    let mut out = FinSubset::empty();
    's: for s in a.iter() {
        for kk in k.iter() {
            if !a.contains(&sg.mul(kk, s)?) {
                continue 's;
            }
        }
        out.insert(s.clone());
    }
    Ok(out)
}

/// ∂_K(A) = A \ int_K(A), computed by the membership scan.
pub fn boundary(sg: &Semigroup, a: &FinSubset, k: &FinSubset) -> Result<FinSubset> {
    Ok(a.difference(&interior(sg, a, k)?))
}

/// α(A,K) = |∂_K(A)|/|A| as an exact rational in [0,1].
pub fn alpha(sg: &Semigroup, a: &FinSubset, k: &FinSubset) -> Result<AmenabilityConstant> {
    if a.is_empty() {
        return Err(Error::Domain("alpha(A,K) needs a non-empty A".into()));
    }
    let b = boundary(sg, a, k)?;
    Ok(ExactRatio::new(b.len() as u64, a.len() as u64))
}

/// Σ_{s∈S} |As ∩ B|.
///
/// For a finite table, s ranges over the whole semigroup. For the infinite
/// families the support { s : As ∩ B ≠ ∅ } is enumerated through
/// `left_divide` over all pairs (a,b) ∈ A×B; every element of those
/// families is left-cancellable, so the divisions are single-valued.
pub fn translate_sum(sg: &Semigroup, a: &FinSubset, b: &FinSubset) -> Result<u64> {
    sg.validate_set(a)?;
    sg.validate_set(b)?;
    let support: FinSubset = match sg.all_elements() {
        Some(all) => all,
        None => {
            let mut support = FinSubset::empty();
            for x in a.iter() {
                for y in b.iter() {
                    if let Some(s) = sg.left_divide(x, y)? {
                        support.insert(s);
                    }
                }
            }
            support
        }
    };
    let mut total = 0u64;
    for s in support.iter() {
        total += sg.right_translate(a, s)?.intersection(b).len() as u64;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::Element;
    use crate::semigroup::idempotent_pair;

    fn zbox(lo: i64, hi: i64) -> FinSubset {
        FinSubset::lattice_box(&[lo.into()], &[hi.into()]).unwrap()
    }

    #[test]
    fn interior_of_interval() {
        let sg = Semigroup::int_lattice(1).unwrap();
        let a = zbox(0, 10);
        let k: FinSubset = (0..3).map(|i| Element::point(&[i])).collect();
        assert_eq!(interior(&sg, &a, &k).unwrap(), zbox(0, 8));
        assert_eq!(
            boundary(&sg, &a, &k).unwrap(),
            FinSubset::from_elements([Element::point(&[8]), Element::point(&[9])])
        );
    }

    #[test]
    fn interior_in_nat_square() {
        let sg = Semigroup::nat_monoid(2).unwrap();
        let a = FinSubset::lattice_box(&[0.into(), 0.into()], &[3.into(), 3.into()]).unwrap();
        let k = FinSubset::from_elements([
            Element::point(&[0, 0]),
            Element::point(&[1, 0]),
            Element::point(&[0, 1]),
        ]);
        let expected =
            FinSubset::lattice_box(&[0.into(), 0.into()], &[2.into(), 2.into()]).unwrap();
        assert_eq!(interior(&sg, &a, &k).unwrap(), expected);
        assert_eq!(boundary(&sg, &a, &k).unwrap().len(), 5);
    }

    #[test]
    fn empty_k_is_vacuous() {
        let sg = Semigroup::int_lattice(1).unwrap();
        let a = zbox(0, 10);
        assert_eq!(interior(&sg, &a, &FinSubset::empty()).unwrap(), a);
        assert!(boundary(&sg, &a, &FinSubset::empty()).unwrap().is_empty());
        assert_eq!(alpha(&sg, &a, &FinSubset::empty()).unwrap(), ExactRatio::new(0, 10));
    }

    #[test]
    fn alpha_of_square_boxes() {
        let sg = Semigroup::int_lattice(2).unwrap();
        let a = FinSubset::lattice_box(&[0.into(), 0.into()], &[10.into(), 10.into()]).unwrap();
        let k = FinSubset::lattice_box(&[0.into(), 0.into()], &[3.into(), 3.into()]).unwrap();
        assert_eq!(alpha(&sg, &a, &k).unwrap(), ExactRatio::new(36, 100));

        let z = Semigroup::int_lattice(1).unwrap();
        assert_eq!(
            alpha(&z, &zbox(0, 100), &zbox(0, 10)).unwrap(),
            ExactRatio::new(9, 100)
        );
    }

    #[test]
    fn alpha_of_empty_set_is_domain_error() {
        let sg = Semigroup::int_lattice(1).unwrap();
        assert!(alpha(&sg, &FinSubset::empty(), &zbox(0, 2)).is_err());
    }

    #[test]
    fn translate_sum_remark_cases() {
        // group case: equality with |A||B|
        let z = Semigroup::int_lattice(1).unwrap();
        let a = FinSubset::from_elements([Element::point(&[0]), Element::point(&[1])]);
        let b = FinSubset::from_elements([Element::point(&[5]), Element::point(&[6])]);
        assert_eq!(translate_sum(&z, &a, &b).unwrap(), 4);

        // strict inequality in ℕ when max B < min A
        let n = Semigroup::nat_monoid(1).unwrap();
        let a = FinSubset::singleton(Element::point(&[5]));
        let b = FinSubset::from_elements([Element::point(&[1]), Element::point(&[2])]);
        assert_eq!(translate_sum(&n, &a, &b).unwrap(), 0);

        // failure of the bound without left-cancellability
        let t = idempotent_pair();
        let s1 = FinSubset::singleton(Element::Table(1));
        assert_eq!(translate_sum(&t, &s1, &s1).unwrap(), 2);
    }

    #[test]
    fn exact_ratio_ordering_is_cross_multiplied() {
        assert!(ExactRatio::new(1, 3) < ExactRatio::new(2, 5));
        assert_eq!(
            ExactRatio::new(2, 4).cmp(&ExactRatio::new(1, 2)),
            std::cmp::Ordering::Equal
        );
    }
}
