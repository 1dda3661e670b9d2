//! Seeded random elements and finite subsets of the builtin semigroups,
//! used by property spot-checks and the randomized test corpora.

use num_bigint::BigInt;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::semigroup::{Element, FinSubset, Semigroup};

pub struct Sampler {
    sg: Semigroup,
    rng: ChaCha8Rng,
    coord_range: i64,
    max_card: usize,
}

impl Sampler {
    pub fn new(sg: &Semigroup, seed: u64) -> Self {
        Sampler {
            sg: sg.clone(),
            rng: ChaCha8Rng::seed_from_u64(seed),
            coord_range: 12,
            max_card: 12,
        }
    }

    pub fn with_bounds(mut self, coord_range: i64, max_card: usize) -> Self {
        self.coord_range = coord_range.max(1);
        self.max_card = max_card.max(1);
        self
    }

    pub fn semigroup(&self) -> &Semigroup {
        &self.sg
    }

    pub fn element(&mut self) -> Element {
        let r = self.coord_range;
        match &self.sg {
            Semigroup::IntLattice(d) => Element::Point(
                (0..*d)
                    .map(|_| BigInt::from(self.rng.gen_range(-r..=r)))
                    .collect(),
            ),
            Semigroup::NatMonoid(d) => Element::Point(
                (0..*d)
                    .map(|_| BigInt::from(self.rng.gen_range(0..=r)))
                    .collect(),
            ),
            Semigroup::Heisenberg => Element::Point(
                (0..3)
                    .map(|_| BigInt::from(self.rng.gen_range(-r..=r)))
                    .collect(),
            ),
            Semigroup::FiniteTable(t) => Element::Table(self.rng.gen_range(0..t.size())),
        }
    }

    /// A non-empty subset with at most `max_card` elements.
    pub fn subset(&mut self) -> FinSubset {
        let card = self.rng.gen_range(1..=self.max_card);
        (0..card).map(|_| self.element()).collect()
    }

    pub fn subset_with_card_at_most(&mut self, max_card: usize) -> FinSubset {
        let card = self.rng.gen_range(1..=max_card.max(1));
        (0..card).map(|_| self.element()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampler_respects_domains() {
        let n2 = Semigroup::nat_monoid(2).unwrap();
        let mut sampler = Sampler::new(&n2, 7);
        for _ in 0..50 {
            let a = sampler.subset();
            assert!(!a.is_empty());
            assert!(n2.validate_set(&a).is_ok());
        }
    }

    #[test]
    fn sampler_is_deterministic_per_seed() {
        let h = Semigroup::heisenberg();
        let a: Vec<_> = {
            let mut s = Sampler::new(&h, 3);
            (0..10).map(|_| s.element()).collect()
        };
        let b: Vec<_> = {
            let mut s = Sampler::new(&h, 3);
            (0..10).map(|_| s.element()).collect()
        };
        assert_eq!(a, b);
    }
}
