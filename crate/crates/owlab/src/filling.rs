//! ε-disjoint families with explicit disjointness witnesses, the greedy
//! filling-pattern construction, and the iterative quasi-tiling process
//! with its n₀(ε) gate.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::boundary::{alpha, interior, AmenabilityConstant};
use crate::error::{Error, Result};
use crate::semigroup::{FinSubset, Semigroup};

fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// A family (A_j, B_j) with B_j ⊆ A_j pairwise disjoint and
/// |B_j| ≥ (1−ε)|A_j|: the witnesses certify ε-disjointness of (A_j).
#[derive(Clone, Debug)]
pub struct WitnessedFamily {
    pub members: Vec<(FinSubset, FinSubset)>,
    pub eps: BigRational,
}

/// Checks all three witness invariants, plus the ε-disjoint-union
/// corollary (1−ε)Σ|A_j| ≤ |⋃A_j| as a sanity cross-check.
pub fn eps_disjoint_verify(fam: &WitnessedFamily) -> bool {
    // |B| ≥ (1−ε)|A|  ⇔  |B|·den ≥ (den−num)·|A| for ε = num/den
    let num = fam.eps.numer();
    let den = fam.eps.denom();
    let mut union = FinSubset::empty();
    let mut seen = FinSubset::empty();
    let mut card_sum = BigInt::zero();
    for (a, b) in &fam.members {
        if !b.is_subset(a) {
            return false;
        }
        if !seen.is_disjoint(b) {
            return false;
        }
        if BigInt::from(b.len()) * den < (den - num) * BigInt::from(a.len()) {
            return false;
        }
        seen = seen.union(b);
        union = union.union(a);
        card_sum += BigInt::from(a.len());
    }
    (den - num) * card_sum <= BigInt::from(union.len()) * den
}

/// An (ε,K)-filling pattern for Ω, together with the per-element witnesses
/// produced by the greedy pass and the covered region KP.
#[derive(Clone, Debug)]
pub struct FillingPattern {
    pub pattern: FinSubset,
    pub tile: FinSubset,
    pub omega: FinSubset,
    pub witnesses: WitnessedFamily,
    pub coverage: FinSubset,
    pub omega_alpha: AmenabilityConstant,
}

impl FillingPattern {
    /// The lower bound ε(1−α(Ω,K))|Ω| holds with exact arithmetic:
    /// |KP|·εden ≥ εnum·(|Ω| − |∂_K(Ω)|).
    pub fn coverage_bound_holds(&self) -> bool {
        let num = self.witnesses.eps.numer();
        let den = self.witnesses.eps.denom();
        let interior_card = BigInt::from(self.omega_alpha.den - self.omega_alpha.num);
        BigInt::from(self.coverage.len()) * den >= num * interior_card
    }
}

/// Single ascending-order greedy pass over int_K(Ω): admit s whenever
/// |Ks \ B| ≥ (1−ε)|Ks| against the running coverage B, taking Ks \ B as
/// the disjointness witness. The result is a maximal (ε,K)-filling pattern
/// with |KP| ≥ ε(1−α(Ω,K))|Ω|.
pub fn greedy_filling(
    sg: &Semigroup,
    omega: &FinSubset,
    k: &FinSubset,
    eps: &BigRational,
) -> Result<FillingPattern> {
    if omega.is_empty() || k.is_empty() {
        return Err(Error::Domain("greedy_filling needs non-empty Ω and K".into()));
    }
    if eps <= &BigRational::zero() || eps > &BigRational::one() {
        return Err(Error::Domain("greedy_filling needs ε in (0,1]".into()));
    }
    if !sg.is_cancellative() {
        return Err(Error::Domain(
            "greedy_filling is only defined on cancellative semigroups".into(),
        ));
    }
    let omega_alpha = alpha(sg, omega, k)?;
    let int = interior(sg, omega, k)?;
    let num = eps.numer();
    let den = eps.denom();
    let mut pattern = FinSubset::empty();
    let mut coverage = FinSubset::empty();
    let mut members = Vec::new();
    for s in int.iter() {
        let ks = sg.right_translate(k, s)?;
        let fresh = ks.difference(&coverage);
        // admit iff |Ks \ B| ≥ (1−ε)|Ks|
        if BigInt::from(fresh.len()) * den >= (den - num) * BigInt::from(ks.len()) {
            coverage = coverage.union(&ks);
            pattern.insert(s.clone());
            members.push((ks, fresh));
        }
    }
    Ok(FillingPattern {
        pattern,
        tile: k.clone(),
        omega: omega.clone(),
        witnesses: WitnessedFamily {
            members,
            eps: eps.clone(),
        },
        coverage,
        omega_alpha,
    })
}

/// The least r ≥ 1 with (2r+1)ε^{r+1} ≤ 1/2 and (1−ε/2)^r ≤ ε, in exact
/// rational arithmetic. Both sides are decreasing in r for ε ≤ 1/2, so the
/// least such r bounds all larger ones.
pub fn compute_n0(eps: &BigRational) -> Result<u32> {
    if eps <= &BigRational::zero() || eps > &rational(1, 2) {
        return Err(Error::Domain("compute_n0 needs ε in (0, 1/2]".into()));
    }
    let half = rational(1, 2);
    let decay = BigRational::one() - eps / BigInt::from(2);
    // eps^{r+1} and (1−ε/2)^r updated incrementally
    let mut eps_pow = eps * eps; // ε^{r+1} at r = 1
    let mut decay_pow = decay.clone(); // (1−ε/2)^r at r = 1
    for r in 1u32.. {
        let first = BigRational::from(BigInt::from(2 * r + 1)) * &eps_pow <= half;
        let second = decay_pow <= *eps;
        if first && second {
            return Ok(r);
        }
        eps_pow *= eps;
        decay_pow *= &decay;
    }
    unreachable!("both sequences tend to zero")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TilingMode {
    /// Enforce n ≥ n₀(ε) and the α hypotheses; conclusions (T1)-(T3) are
    /// then guaranteed.
    Strict,
    /// Run the same process without enforcing the hypotheses; (T1) and
    /// (T2) still hold and the achieved residual ratio is reported.
    BestEffort,
}

/// One exact hypothesis check: α(lhs) against its bound.
#[derive(Clone, Debug)]
pub struct HypothesisCheck {
    pub description: String,
    pub alpha: AmenabilityConstant,
    pub bound: BigRational,
    pub ok: bool,
}

#[derive(Clone, Debug)]
pub struct TilingResult {
    /// The input tiles K_1, ..., K_n.
    pub tiles: Vec<FinSubset>,
    /// Patterns P_1, ..., P_n in tile order; early-stopped steps carry
    /// empty patterns.
    pub patterns: Vec<FillingPattern>,
    /// D' = D \ ⋃_j K_jP_j.
    pub residual: FinSubset,
    /// Cardinalities |D_0|, |D_1|, ... of the shrinking working sets.
    pub transcript: Vec<u64>,
    pub hypothesis_report: Vec<HypothesisCheck>,
    pub mode: TilingMode,
    pub domain: FinSubset,
    pub eps: BigRational,
}

impl TilingResult {
    pub fn coverage(&self) -> FinSubset {
        self.patterns
            .iter()
            .fold(FinSubset::empty(), |acc, p| acc.union(&p.coverage))
    }

    /// Whether the (T3) conclusion |D'| ≤ ε|D| was achieved.
    pub fn residual_bound_holds(&self) -> bool {
        BigInt::from(self.residual.len()) * self.eps.denom()
            <= self.eps.numer() * BigInt::from(self.domain.len())
    }
}

fn check_hypotheses(
    sg: &Semigroup,
    d: &FinSubset,
    tiles: &[FinSubset],
    eps: &BigRational,
) -> Result<Vec<HypothesisCheck>> {
    let n = tiles.len();
    let eps_2n = num_traits::pow::pow(eps.clone(), 2 * n);
    let mut report = Vec::new();
    for j in 0..n {
        for k in (j + 1)..n {
            let a = alpha(sg, &tiles[k], &tiles[j])?;
            let bound = &eps_2n / BigInt::from(tiles[j].len());
            report.push(HypothesisCheck {
                description: format!("alpha(K_{}, K_{}) <= eps^{}/|K_{}|", k + 1, j + 1, 2 * n, j + 1),
                ok: a.le_rational(&bound),
                alpha: a,
                bound,
            });
        }
    }
    for (j, tile) in tiles.iter().enumerate() {
        let a = alpha(sg, d, tile)?;
        report.push(HypothesisCheck {
            description: format!("alpha(D, K_{}) <= eps^{}", j + 1, 2 * n),
            ok: a.le_rational(&eps_2n),
            alpha: a,
            bound: eps_2n.clone(),
        });
    }
    Ok(report)
}

fn empty_pattern(k: &FinSubset, omega: &FinSubset, eps: &BigRational, omega_alpha: AmenabilityConstant) -> FillingPattern {
    FillingPattern {
        pattern: FinSubset::empty(),
        tile: k.clone(),
        omega: omega.clone(),
        witnesses: WitnessedFamily {
            members: Vec::new(),
            eps: eps.clone(),
        },
        coverage: FinSubset::empty(),
        omega_alpha,
    }
}

/// The iterative filling process: D_0 = D, and at step k the tile
/// K_{n−k+1} is greedily filled into D_{k−1}; the process stops early,
/// with all remaining patterns empty, once |D_k| ≤ ε|D_{k−1}|.
pub fn filling_theorem_run(
    sg: &Semigroup,
    d: &FinSubset,
    tiles: &[FinSubset],
    eps: &BigRational,
    mode: TilingMode,
) -> Result<TilingResult> {
    if d.is_empty() || tiles.is_empty() || tiles.iter().any(FinSubset::is_empty) {
        return Err(Error::Domain(
            "filling_theorem_run needs non-empty D and tiles".into(),
        ));
    }
    if eps <= &BigRational::zero() || eps > &rational(1, 2) {
        return Err(Error::Domain("filling_theorem_run needs ε in (0, 1/2]".into()));
    }
    let n = tiles.len();
    let hypothesis_report = check_hypotheses(sg, d, tiles, eps)?;
    if mode == TilingMode::Strict {
        let n0 = compute_n0(eps)?;
        if (n as u32) < n0 {
            return Err(Error::Domain(format!(
                "strict mode needs n ≥ n₀(ε) = {n0}, got n = {n}"
            )));
        }
        if let Some(bad) = hypothesis_report.iter().find(|c| !c.ok) {
            return Err(Error::Domain(format!(
                "strict-mode hypothesis violated: {} (alpha = {}, bound = {})",
                bad.description, bad.alpha, bad.bound
            )));
        }
    }

    let mut patterns: Vec<Option<FillingPattern>> = vec![None; n];
    let mut transcript = vec![d.len() as u64];
    let mut current = d.clone();
    let mut stopped = false;
    for k in 1..=n {
        let tile_idx = n - k; // tile K_{n-k+1}
        if stopped || current.is_empty() {
            let a = AmenabilityConstant::new(0, 1);
            patterns[tile_idx] = Some(empty_pattern(&tiles[tile_idx], &current, eps, a));
            continue;
        }
        let prev_card = current.len();
        let p = greedy_filling(sg, &current, &tiles[tile_idx], eps)?;
        current = current.difference(&p.coverage);
        transcript.push(current.len() as u64);
        patterns[tile_idx] = Some(p);
        // stop rule of step k+1: |D_k| ≤ ε|D_{k-1}|
        if BigInt::from(current.len()) * eps.denom() <= eps.numer() * BigInt::from(prev_card) {
            stopped = true;
        }
    }

    Ok(TilingResult {
        tiles: tiles.to_vec(),
        patterns: patterns.into_iter().map(Option::unwrap).collect(),
        residual: current,
        transcript,
        hypothesis_report,
        mode,
        domain: d.clone(),
        eps: eps.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::Element;

    fn zbox(lo: i64, hi: i64) -> FinSubset {
        FinSubset::lattice_box(&[lo.into()], &[hi.into()]).unwrap()
    }

    fn z1() -> Semigroup {
        Semigroup::int_lattice(1).unwrap()
    }

    #[test]
    fn witness_verification_thresholds() {
        let fam = |eps| WitnessedFamily {
            members: vec![
                (zbox(0, 10), zbox(0, 10)),
                (zbox(5, 15), zbox(10, 15)),
            ],
            eps,
        };
        assert!(eps_disjoint_verify(&fam(rational(1, 2))));
        assert!(!eps_disjoint_verify(&fam(rational(1, 4))));
        let singleton = WitnessedFamily {
            members: vec![(zbox(0, 3), zbox(0, 3))],
            eps: rational(1, 100),
        };
        assert!(eps_disjoint_verify(&singleton));
    }

    #[test]
    fn witness_rejects_non_subset_and_overlap() {
        let non_subset = WitnessedFamily {
            members: vec![(zbox(0, 4), zbox(2, 6))],
            eps: rational(1, 2),
        };
        assert!(!eps_disjoint_verify(&non_subset));
        let overlapping = WitnessedFamily {
            members: vec![(zbox(0, 4), zbox(0, 4)), (zbox(0, 8), zbox(0, 8))],
            eps: rational(1, 2),
        };
        assert!(!eps_disjoint_verify(&overlapping));
    }

    #[test]
    fn greedy_on_z_admits_every_fifth_point() {
        let p = greedy_filling(&z1(), &zbox(0, 100), &zbox(0, 10), &rational(1, 2)).unwrap();
        let expected: FinSubset = (0..19).map(|i| Element::point(&[5 * i])).collect();
        assert_eq!(p.pattern, expected);
        assert_eq!(p.coverage, zbox(0, 100));
        assert!(p.coverage_bound_holds());
        assert!(eps_disjoint_verify(&p.witnesses));
    }

    #[test]
    fn greedy_with_empty_interior_gives_empty_pattern() {
        let p = greedy_filling(&z1(), &zbox(0, 10), &zbox(0, 20), &rational(1, 2)).unwrap();
        assert!(p.pattern.is_empty());
        assert!(p.coverage_bound_holds()); // bound is 0 since alpha = 1
    }

    #[test]
    fn greedy_with_identity_tile_takes_everything() {
        let n1 = Semigroup::nat_monoid(1).unwrap();
        let omega = zbox(0, 12);
        let k = FinSubset::singleton(Element::point(&[0]));
        let p = greedy_filling(&n1, &omega, &k, &rational(1, 3)).unwrap();
        assert_eq!(p.pattern, omega);
        assert_eq!(p.coverage, omega);
    }

    #[test]
    fn greedy_rejects_non_cancellative() {
        let t = crate::semigroup::idempotent_pair();
        let a = t.all_elements().unwrap();
        assert!(greedy_filling(&t, &a, &a, &rational(1, 2)).is_err());
    }

    #[test]
    fn n0_values() {
        assert_eq!(compute_n0(&rational(1, 2)).unwrap(), 3);
        assert_eq!(compute_n0(&rational(3, 10)).unwrap(), 8);
        assert!(compute_n0(&rational(3, 4)).is_err());
        assert!(compute_n0(&rational(0, 1)).is_err());
    }

    #[test]
    fn n0_is_minimal() {
        for (num, den) in [(1i64, 2i64), (3, 10), (1, 4), (2, 5)] {
            let eps = rational(num, den);
            let r = compute_n0(&eps).unwrap();
            assert!(r >= 1);
            if r > 1 {
                let prev = r - 1;
                let first = BigRational::from(BigInt::from(2 * prev + 1))
                    * num_traits::pow::pow(eps.clone(), (prev + 1) as usize)
                    <= rational(1, 2);
                let second = num_traits::pow::pow(
                    BigRational::one() - &eps / BigInt::from(2),
                    prev as usize,
                ) <= eps;
                assert!(!(first && second), "n0 not minimal for {eps}");
            }
        }
    }

    #[test]
    fn best_effort_single_tile_covers_interval() {
        let r = filling_theorem_run(
            &z1(),
            &zbox(0, 64),
            &[zbox(0, 2)],
            &rational(1, 2),
            TilingMode::BestEffort,
        )
        .unwrap();
        assert_eq!(r.patterns[0].pattern, zbox(0, 63));
        assert!(r.residual.is_empty());
        assert!(r.residual_bound_holds());
        assert_eq!(r.transcript, vec![64, 0]);
    }

    #[test]
    fn strict_mode_gates_on_n0() {
        let err = filling_theorem_run(
            &z1(),
            &zbox(0, 64),
            &[zbox(0, 2), zbox(0, 4)],
            &rational(1, 2),
            TilingMode::Strict,
        )
        .unwrap_err();
        assert!(err.to_string().contains("n₀"), "{err}");
    }

    #[test]
    fn best_effort_identity_tile() {
        let d = zbox(0, 20);
        let k = FinSubset::singleton(Element::point(&[0]));
        let r = filling_theorem_run(&z1(), &d, &[k], &rational(1, 2), TilingMode::BestEffort)
            .unwrap();
        assert_eq!(r.patterns[0].pattern, d);
        assert!(r.residual.is_empty());
    }

    #[test]
    fn tiling_invariants_hold_in_best_effort() {
        let d = zbox(0, 100);
        let tiles = [zbox(0, 2), zbox(0, 4), zbox(0, 8)];
        let r =
            filling_theorem_run(&z1(), &d, &tiles, &rational(1, 2), TilingMode::BestEffort)
                .unwrap();
        // (T2) pairwise disjoint coverages inside D
        for i in 0..r.patterns.len() {
            assert!(r.patterns[i].coverage.is_subset(&d));
            for j in (i + 1)..r.patterns.len() {
                assert!(r.patterns[i].coverage.is_disjoint(&r.patterns[j].coverage));
            }
        }
        // residual identity
        assert_eq!(r.residual, d.difference(&r.coverage()));
    }
}
