//! Builtin Følner sequences and the quantified Følner condition.
//!
//! Standard box sequences for the lattice families, skewed boxes for the
//! Heisenberg group (a,b in [0,n), c in [0,n²) to absorb the a·b' twist),
//! and shifted boxes [n,3n)^d used to test net-independence of limits.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::boundary::{alpha, AmenabilityConstant, ExactRatio};
use crate::error::{Error, Result};
use crate::semigroup::{Element, FinSubset, Semigroup};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FolnerKind {
    /// F_n = [0,n)^d on a lattice or monoid.
    Boxes,
    /// F_n = { (a,b,c) : 0 ≤ a,b < n, 0 ≤ c < n² } on the Heisenberg group.
    HeisBoxes,
    /// F_n = [n,3n)^d on ℤ^d; same cardinalities as `Boxes`, different sets.
    ShiftedBoxes,
}

impl FolnerKind {
    pub fn parse(kind: &str) -> Result<Self> {
        match kind {
            "boxes" => Ok(FolnerKind::Boxes),
            "heis_boxes" => Ok(FolnerKind::HeisBoxes),
            "shifted_boxes" => Ok(FolnerKind::ShiftedBoxes),
            other => Err(Error::Config(format!("unknown Følner kind `{other}`"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FolnerKind::Boxes => "boxes",
            FolnerKind::HeisBoxes => "heis_boxes",
            FolnerKind::ShiftedBoxes => "shifted_boxes",
        }
    }
}

/// An indexed family n ↦ F_n of non-empty finite subsets.
#[derive(Clone, Debug)]
pub struct FolnerSequence {
    sg: Semigroup,
    kind: FolnerKind,
    description: String,
}

/// Builds one of the builtin sequences, rejecting unsupported
/// (semigroup, kind) pairs.
pub fn builtin_folner(sg: &Semigroup, kind: FolnerKind) -> Result<FolnerSequence> {
    let ok = matches!(
        (sg, kind),
        (Semigroup::IntLattice(_) | Semigroup::NatMonoid(_), FolnerKind::Boxes)
            | (Semigroup::Heisenberg, FolnerKind::HeisBoxes)
            | (Semigroup::IntLattice(_), FolnerKind::ShiftedBoxes)
    );
    if !ok {
        return Err(Error::Config(format!(
            "Følner kind `{}` is not available for {}",
            kind.name(),
            sg.name()
        )));
    }
    Ok(FolnerSequence {
        description: format!("{} on {}", kind.name(), sg.name()),
        sg: sg.clone(),
        kind,
    })
}

impl FolnerSequence {
    pub fn semigroup(&self) -> &Semigroup {
        &self.sg
    }

    pub fn kind(&self) -> FolnerKind {
        self.kind
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    /// The n-th member F_n, n ≥ 1.
    pub fn set(&self, n: u64) -> Result<FinSubset> {
        if n == 0 {
            return Err(Error::Domain("Følner index must be ≥ 1".into()));
        }
        let n = BigInt::from(n);
        match (&self.sg, self.kind) {
            (Semigroup::IntLattice(d) | Semigroup::NatMonoid(d), FolnerKind::Boxes) => {
                FinSubset::lattice_box(&vec![BigInt::from(0); *d], &vec![n; *d])
            }
            (Semigroup::IntLattice(d), FolnerKind::ShiftedBoxes) => {
                FinSubset::lattice_box(&vec![n.clone(); *d], &vec![&n * 3; *d])
            }
            (Semigroup::Heisenberg, FolnerKind::HeisBoxes) => FinSubset::lattice_box(
                &[BigInt::from(0), BigInt::from(0), BigInt::from(0)],
                &[n.clone(), n.clone(), &n * &n],
            ),
            _ => unreachable!("checked in builtin_folner"),
        }
    }
}

/// The Følner defect |sF \ F| / |F|, exact and unreduced.
pub fn defect(sg: &Semigroup, f: &FinSubset, s: &Element) -> Result<ExactRatio> {
    if f.is_empty() {
        return Err(Error::Domain("defect needs a non-empty F".into()));
    }
    let escaped = sg.left_translate(s, f)?.difference(f).len() as u64;
    Ok(ExactRatio::new(escaped, f.len() as u64))
}

#[derive(Clone, Debug)]
pub struct FolnerRow {
    pub index: u64,
    pub card: u64,
    pub alpha: AmenabilityConstant,
    pub max_defect: ExactRatio,
}

/// One row per index: (n, |F_n|, α(F_n,K), max_{k∈K} defect(F_n,k)).
pub fn folner_report(
    seq: &FolnerSequence,
    k: &FinSubset,
    indices: &[u64],
) -> Result<Vec<FolnerRow>> {
    if indices.is_empty() {
        return Err(Error::Domain("folner_report needs at least one index".into()));
    }
    let sg = seq.semigroup();
    sg.validate_set(k)?;
    let mut rows = Vec::with_capacity(indices.len());
    for &n in indices {
        let f = seq.set(n)?;
        let card = f.len() as u64;
        let a = alpha(sg, &f, k)?;
        let mut max_defect = ExactRatio::zero(card);
        for kk in k.iter() {
            let d = defect(sg, &f, kk)?;
            if d > max_defect {
                max_defect = d;
            }
        }
        rows.push(FolnerRow {
            index: n,
            card,
            alpha: a,
            max_defect,
        });
    }
    Ok(rows)
}

/// The Følner condition witness: |kF \ F| ≤ ε|F| for all k ∈ K.
pub fn fc_witness_check(
    sg: &Semigroup,
    f: &FinSubset,
    k: &FinSubset,
    eps: &BigRational,
) -> Result<bool> {
    if f.is_empty() {
        return Err(Error::Domain("fc_witness_check needs a non-empty F".into()));
    }
    if eps <= &BigRational::from(BigInt::from(0)) {
        return Err(Error::Domain("fc_witness_check needs ε > 0".into()));
    }
    for kk in k.iter() {
        if !defect(sg, f, kk)?.le_rational(eps) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rational(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn builtin_cardinalities() {
        let z2 = Semigroup::int_lattice(2).unwrap();
        let seq = builtin_folner(&z2, FolnerKind::Boxes).unwrap();
        assert_eq!(seq.set(10).unwrap().len(), 100);

        let n1 = Semigroup::nat_monoid(1).unwrap();
        let seq = builtin_folner(&n1, FolnerKind::Boxes).unwrap();
        let f5 = seq.set(5).unwrap();
        assert_eq!(f5.len(), 5);
        assert!(f5.contains(&Element::point(&[4])));

        let h = Semigroup::heisenberg();
        let seq = builtin_folner(&h, FolnerKind::HeisBoxes).unwrap();
        assert_eq!(seq.set(4).unwrap().len(), 256);
    }

    #[test]
    fn unsupported_pair_rejected() {
        let h = Semigroup::heisenberg();
        assert!(builtin_folner(&h, FolnerKind::Boxes).is_err());
        let n1 = Semigroup::nat_monoid(1).unwrap();
        assert!(builtin_folner(&n1, FolnerKind::ShiftedBoxes).is_err());
    }

    #[test]
    fn defect_of_box_column() {
        let z2 = Semigroup::int_lattice(2).unwrap();
        let f = builtin_folner(&z2, FolnerKind::Boxes).unwrap().set(10).unwrap();
        let d = defect(&z2, &f, &Element::point(&[1, 0])).unwrap();
        assert_eq!(d, ExactRatio::new(10, 100));
    }

    #[test]
    fn heisenberg_defect_is_82_over_256() {
        let h = Semigroup::heisenberg();
        let f = builtin_folner(&h, FolnerKind::HeisBoxes).unwrap().set(4).unwrap();
        let d = defect(&h, &f, &Element::point(&[1, 0, 0])).unwrap();
        assert_eq!(d, ExactRatio::new(82, 256));
    }

    #[test]
    fn identity_has_zero_defect() {
        let n1 = Semigroup::nat_monoid(1).unwrap();
        let f = builtin_folner(&n1, FolnerKind::Boxes).unwrap().set(7).unwrap();
        assert_eq!(defect(&n1, &f, &Element::point(&[0])).unwrap(), ExactRatio::new(0, 7));
    }

    #[test]
    fn report_matches_closed_form() {
        let z2 = Semigroup::int_lattice(2).unwrap();
        let seq = builtin_folner(&z2, FolnerKind::Boxes).unwrap();
        let k = FinSubset::lattice_box(&[0.into(), 0.into()], &[3.into(), 3.into()]).unwrap();
        let rows = folner_report(&seq, &k, &[10, 100]).unwrap();
        assert_eq!(rows[0].alpha, ExactRatio::new(36, 100));
        assert_eq!(rows[1].alpha, ExactRatio::new(396, 10000));
    }

    #[test]
    fn report_identity_k_gives_zero_alpha() {
        let z1 = Semigroup::int_lattice(1).unwrap();
        let seq = builtin_folner(&z1, FolnerKind::Boxes).unwrap();
        let k = FinSubset::singleton(Element::point(&[0]));
        for row in folner_report(&seq, &k, &[3, 9, 27]).unwrap() {
            assert_eq!(row.alpha.num, 0);
        }
    }

    #[test]
    fn fc_witness_thresholds() {
        let z1 = Semigroup::int_lattice(1).unwrap();
        let f = FinSubset::lattice_box(&[0.into()], &[100.into()]).unwrap();
        let k = FinSubset::from_elements([Element::point(&[1]), Element::point(&[2])]);
        assert!(fc_witness_check(&z1, &f, &k, &rational(1, 10)).unwrap());
        assert!(!fc_witness_check(&z1, &f, &k, &rational(1, 100)).unwrap());
        assert!(fc_witness_check(&z1, &f, &FinSubset::empty(), &rational(1, 1000)).unwrap());
    }

    #[test]
    fn box_alpha_decreases_along_sequence() {
        let z1 = Semigroup::int_lattice(1).unwrap();
        let seq = builtin_folner(&z1, FolnerKind::Boxes).unwrap();
        let k = FinSubset::lattice_box(&[0.into()], &[2.into()]).unwrap();
        let rows = folner_report(&seq, &k, &[10, 100, 1000]).unwrap();
        assert!(rows[0].alpha.value() > rows[1].alpha.value());
        assert!(rows[1].alpha.value() > rows[2].alpha.value());
    }
}
