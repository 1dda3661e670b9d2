//! Subadditive right-subinvariant set functions, sampled property checks,
//! the Ornstein-Weiss ratio estimator along a Følner sequence, the Fekete
//! lift of subadditive sequences, and the numeric certificate for the
//! (λ+ε)/(1−ε) + Mε inequality chain.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::filling::TilingResult;
use crate::folner::FolnerSequence;
use crate::sample::Sampler;
use crate::semigroup::{Element, FinSubset};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PropertyFlags {
    pub subadditive: bool,
    pub right_subinvariant: bool,
    pub nondecreasing: bool,
}

impl PropertyFlags {
    pub fn all() -> Self {
        PropertyFlags {
            subadditive: true,
            right_subinvariant: true,
            nondecreasing: true,
        }
    }

    pub fn subadditive_subinvariant() -> Self {
        PropertyFlags {
            subadditive: true,
            right_subinvariant: true,
            nondecreasing: false,
        }
    }
}

type EvalFn = dyn Fn(&FinSubset) -> Result<f64> + Send + Sync;

/// A set function h : 𝒫_fin(S) → ℝ with its declared properties and
/// singleton bound M. h(∅) = 0 is enforced here.
pub struct SetFunction {
    name: String,
    singleton_bound: f64,
    flags: PropertyFlags,
    eval: Box<EvalFn>,
}

impl SetFunction {
    pub fn new(
        name: impl Into<String>,
        singleton_bound: f64,
        flags: PropertyFlags,
        eval: impl Fn(&FinSubset) -> Result<f64> + Send + Sync + 'static,
    ) -> Self {
        SetFunction {
            name: name.into(),
            singleton_bound,
            flags,
            eval: Box::new(eval),
        }
    }

    pub fn eval(&self, a: &FinSubset) -> Result<f64> {
        if a.is_empty() {
            return Ok(0.0);
        }
        (self.eval)(a)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn singleton_bound(&self) -> f64 {
        self.singleton_bound
    }

    pub fn flags(&self) -> PropertyFlags {
        self.flags
    }
}

/// h(A) = c|A|; subadditive, right-subinvariant, and non-decreasing.
pub fn card_multiple(c: f64) -> SetFunction {
    SetFunction::new(format!("card:{c}"), c, PropertyFlags::all(), move |a| {
        Ok(c * a.len() as f64)
    })
}

/// h(A) = (1 + max A)^{-1} |A| on finite subsets of ℕ: subadditive and
/// right-subinvariant but strictly decreasing under some right translates.
pub fn inv_max_card() -> SetFunction {
    SetFunction::new(
        "invmax",
        1.0,
        PropertyFlags::subadditive_subinvariant(),
        |a| {
            let max = a
                .iter()
                .map(|e| {
                    e.coords()
                        .and_then(|c| c.first())
                        .ok_or_else(|| Error::Domain("invmax needs integer points".into()))
                })
                .try_fold(None::<BigInt>, |acc, c| {
                    let c = c?.clone();
                    Ok::<_, Error>(Some(match acc {
                        Some(m) if m >= c => m,
                        _ => c,
                    }))
                })?
                .expect("non-empty");
            let denom = (max + 1u32).to_f64().ok_or_else(|| {
                Error::Domain("invmax coordinate too large for f64".into())
            })?;
            Ok(a.len() as f64 / denom)
        },
    )
}

/// Caches h evaluations per canonical subset for one estimator run.
pub struct MemoizedEval<'a> {
    f: &'a SetFunction,
    cache: HashMap<FinSubset, f64>,
}

impl<'a> MemoizedEval<'a> {
    pub fn new(f: &'a SetFunction) -> Self {
        MemoizedEval {
            f,
            cache: HashMap::new(),
        }
    }

    pub fn eval(&mut self, a: &FinSubset) -> Result<f64> {
        if let Some(&v) = self.cache.get(a) {
            return Ok(v);
        }
        let v = self.f.eval(a)?;
        self.cache.insert(a.clone(), v);
        Ok(v)
    }
}

#[derive(Clone, Debug)]
pub struct SubadditivityViolation {
    pub a: FinSubset,
    pub b: FinSubset,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Clone, Debug)]
pub struct SubinvarianceViolation {
    pub a: FinSubset,
    pub s: Element,
    pub lhs: f64,
    pub rhs: f64,
}

/// Default slack for sampled property checks on float-valued h.
pub const CHECK_TOLERANCE: f64 = 1e-12;

/// Samples pairs (A,B) and reports every h(A∪B) > h(A) + h(B) beyond
/// `tol`.
pub fn check_subadditive(
    h: &SetFunction,
    sampler: &mut Sampler,
    trials: usize,
    tol: f64,
) -> Result<Vec<SubadditivityViolation>> {
    let mut violations = Vec::new();
    for _ in 0..trials {
        let a = sampler.subset();
        let b = sampler.subset();
        let lhs = h.eval(&a.union(&b))?;
        let rhs = h.eval(&a)? + h.eval(&b)?;
        if lhs > rhs + tol {
            violations.push(SubadditivityViolation { a, b, lhs, rhs });
        }
    }
    Ok(violations)
}

/// Samples pairs (A,s) and reports every h(As) > h(A) beyond `tol`.
pub fn check_right_subinvariant(
    h: &SetFunction,
    sampler: &mut Sampler,
    trials: usize,
    tol: f64,
) -> Result<Vec<SubinvarianceViolation>> {
    let sg = sampler.semigroup().clone();
    let mut violations = Vec::new();
    for _ in 0..trials {
        let a = sampler.subset();
        let s = sampler.element();
        let lhs = h.eval(&sg.right_translate(&a, &s)?)?;
        let rhs = h.eval(&a)?;
        if lhs > rhs + tol {
            violations.push(SubinvarianceViolation { a, s, lhs, rhs });
        }
    }
    Ok(violations)
}

#[derive(Clone, Debug)]
pub struct OWRow {
    pub index: u64,
    pub card: u64,
    pub value: f64,
    pub ratio: f64,
}

/// The convergence table for h(F_n)/|F_n| with trailing-window diagnostics.
///
/// `lambda_hat` is the mean ratio over the trailing window and `cauchy_gap`
/// the max-min spread there; no extrapolation is attempted since the
/// underlying theorem gives no rate.
#[derive(Clone, Debug)]
pub struct OWEstimate {
    pub rows: Vec<OWRow>,
    pub lambda_hat: f64,
    pub cauchy_gap: f64,
    pub window: usize,
    pub warnings: Vec<String>,
}

/// Evaluates h along F_1, ..., F_max and summarizes the trailing window.
///
/// If h does not declare (H1)/(H2), a light sampled spot-check runs first;
/// violations are recorded as warnings, not errors.
pub fn ow_estimate(
    h: &SetFunction,
    seq: &FolnerSequence,
    max_index: u64,
    window: usize,
) -> Result<OWEstimate> {
    if window < 2 || max_index < window as u64 {
        return Err(Error::Domain(
            "ow_estimate needs max_index ≥ window ≥ 2".into(),
        ));
    }
    let mut warnings = Vec::new();
    let flags = h.flags();
    if !flags.subadditive || !flags.right_subinvariant {
        let mut sampler = Sampler::new(seq.semigroup(), OW_SPOT_SEED).with_bounds(8, 8);
        if !flags.subadditive {
            let v = check_subadditive(h, &mut sampler, 25, CHECK_TOLERANCE)?;
            if !v.is_empty() {
                warnings.push(format!(
                    "subadditivity spot-check failed on {} of 25 samples",
                    v.len()
                ));
            }
        }
        if !flags.right_subinvariant {
            let v = check_right_subinvariant(h, &mut sampler, 25, CHECK_TOLERANCE)?;
            if !v.is_empty() {
                warnings.push(format!(
                    "right-subinvariance spot-check failed on {} of 25 samples",
                    v.len()
                ));
            }
        }
    }

    let mut memo = MemoizedEval::new(h);
    let mut rows = Vec::with_capacity(max_index as usize);
    for n in 1..=max_index {
        let f = seq.set(n)?;
        let card = f.len() as u64;
        let value = memo.eval(&f)?;
        rows.push(OWRow {
            index: n,
            card,
            value,
            ratio: value / card as f64,
        });
    }
    let tail = &rows[rows.len() - window..];
    let lambda_hat = tail.iter().map(|r| r.ratio).sum::<f64>() / window as f64;
    let max = tail.iter().map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max);
    let min = tail.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    Ok(OWEstimate {
        rows,
        lambda_hat,
        cauchy_gap: max - min,
        window,
        warnings,
    })
}

const OW_SPOT_SEED: u64 = 0x5eed_0a11;

/// The Fekete lift h(A) := u_{|A|} of a non-decreasing subadditive
/// sequence. Subadditivity of u is validated on all pairs m+n ≤ check_max
/// (up to 200) or on 2000 sampled pairs beyond that.
pub fn fekete_lift(
    u: impl Fn(u64) -> f64 + Send + Sync + 'static,
    check_max: u64,
) -> Result<SetFunction> {
    if check_max < 2 {
        return Err(Error::Construction("fekete_lift needs check_max ≥ 2".into()));
    }
    if u(1) < 0.0 {
        return Err(Error::Construction("fekete_lift needs u_1 ≥ 0".into()));
    }
    for n in 1..check_max {
        if u(n + 1) + CHECK_TOLERANCE < u(n) {
            return Err(Error::Construction(format!(
                "sequence is decreasing at n = {n}: u_{} = {} < u_{n} = {}",
                n + 1,
                u(n + 1),
                u(n)
            )));
        }
    }
    let check = |m: u64, n: u64| -> Result<()> {
        if u(m + n) > u(m) + u(n) + CHECK_TOLERANCE {
            return Err(Error::Construction(format!(
                "subadditivity fails at (m,n) = ({m},{n}): u_{} = {} > {}",
                m + n,
                u(m + n),
                u(m) + u(n)
            )));
        }
        Ok(())
    };
    if check_max <= 200 {
        for m in 1..check_max {
            for n in 1..=(check_max - m) {
                check(m, n)?;
            }
        }
    } else {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xFE_4E7E);
        for _ in 0..2000 {
            let m = rng.gen_range(1..check_max);
            let n = rng.gen_range(1..=(check_max - m));
            check(m, n)?;
        }
    }
    let m_bound = u(1);
    Ok(SetFunction::new(
        "fekete_lift",
        m_bound,
        PropertyFlags::all(),
        move |a| Ok(u(a.len() as u64)),
    ))
}

#[derive(Clone, Debug)]
pub struct CertLink {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// The evaluated inequality chain behind h(D)/|D| ≤ (λ+ε)/(1−ε) + Mε.
#[derive(Clone, Debug)]
pub struct Certificate {
    pub links: Vec<CertLink>,
    pub ratio: f64,
    pub final_bound: f64,
    pub pass: bool,
}

fn link(name: impl Into<String>, lhs: f64, rhs: f64) -> CertLink {
    // small float slack so exactly-tight links do not flicker
    let pass = lhs <= rhs + 1e-9 * rhs.abs().max(1.0);
    CertLink {
        name: name.into(),
        lhs,
        rhs,
        pass,
    }
}

/// Evaluates every inequality of the final-bound chain on a concrete
/// tiling. Preconditions (residual bound achieved; every tile has
/// h(K_j)/|K_j| ≤ λ̂ + ε) refuse the certificate when violated.
pub fn ow_certificate(
    h: &SetFunction,
    tiling: &TilingResult,
    lambda_hat: f64,
    eps: &BigRational,
) -> Result<Certificate> {
    let eps_f = eps
        .to_f64()
        .ok_or_else(|| Error::Domain("ε out of f64 range".into()))?;
    if !tiling.residual_bound_holds() {
        return Err(Error::CertificateRefused {
            link: "residual".into(),
            reason: format!(
                "|D'| = {} exceeds ε|D| = {}·{}",
                tiling.residual.len(),
                eps_f,
                tiling.domain.len()
            ),
        });
    }
    let mut memo = MemoizedEval::new(h);
    for (j, k) in tiling.tiles.iter().enumerate() {
        let tile_ratio = memo.eval(k)? / k.len() as f64;
        if tile_ratio > lambda_hat + eps_f + 1e-9 {
            return Err(Error::CertificateRefused {
                link: format!("tile_ratio[{}]", j + 1),
                reason: format!(
                    "h(K_{})/|K_{}| = {tile_ratio} > λ̂ + ε = {}",
                    j + 1,
                    j + 1,
                    lambda_hat + eps_f
                ),
            });
        }
    }

    let m = h.singleton_bound();
    let d = &tiling.domain;
    let d_card = d.len() as f64;
    let h_d = memo.eval(d)?;
    let h_resid = memo.eval(&tiling.residual)?;
    let density = (lambda_hat + eps_f) / (1.0 - eps_f);

    let mut links = Vec::new();
    let mut h_pieces = 0.0;
    let mut coverage_card = 0.0;
    for (j, p) in tiling.patterns.iter().enumerate() {
        let h_cov = memo.eval(&p.coverage)?;
        h_pieces += h_cov;
        coverage_card += p.coverage.len() as f64;
        links.push(link(
            format!("piece[{}]: h(K_jP_j) <= (lambda+eps)/(1-eps)*|K_jP_j|", j + 1),
            h_cov,
            density * p.coverage.len() as f64,
        ));
    }
    links.push(link(
        "split: h(D) <= sum_j h(K_jP_j) + h(D')",
        h_d,
        h_pieces + h_resid,
    ));
    links.push(link(
        "pieces: sum_j h(K_jP_j) <= (lambda+eps)/(1-eps)*|D|",
        h_pieces,
        density * d_card,
    ));
    links.push(link(
        "coverage: sum_j |K_jP_j| <= |D|",
        coverage_card,
        d_card,
    ));
    links.push(link("residual: h(D') <= M*eps*|D|", h_resid, m * eps_f * d_card));
    let ratio = h_d / d_card;
    let final_bound = density + m * eps_f;
    links.push(link(
        "final: h(D)/|D| <= (lambda+eps)/(1-eps) + M*eps",
        ratio,
        final_bound,
    ));
    let pass = links.iter().all(|l| l.pass);
    Ok(Certificate {
        links,
        ratio,
        final_bound,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filling::{filling_theorem_run, TilingMode};
    use crate::folner::{builtin_folner, FolnerKind};
    use crate::semigroup::Semigroup;

    fn rational(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn card_multiple_has_constant_ratio() {
        let z = Semigroup::int_lattice(1).unwrap();
        let seq = builtin_folner(&z, FolnerKind::Boxes).unwrap();
        let est = ow_estimate(&card_multiple(2.0), &seq, 10, 4).unwrap();
        assert!(est.rows.iter().all(|r| r.ratio == 2.0));
        assert_eq!(est.lambda_hat, 2.0);
        assert_eq!(est.cauchy_gap, 0.0);
        assert!(est.warnings.is_empty());
    }

    #[test]
    fn invmax_ratios_are_one_over_n() {
        let n1 = Semigroup::nat_monoid(1).unwrap();
        let seq = builtin_folner(&n1, FolnerKind::Boxes).unwrap();
        let est = ow_estimate(&inv_max_card(), &seq, 20, 5).unwrap();
        for row in &est.rows {
            // h([0,n)) = n/(1+(n-1)) = 1 exactly, so the ratio is 1/n
            assert_eq!(row.value, 1.0);
            assert_eq!(row.ratio, 1.0 / row.index as f64);
        }
        assert!(est.lambda_hat < 0.06);
    }

    #[test]
    fn invmax_strictly_drops_under_translation() {
        let n1 = Semigroup::nat_monoid(1).unwrap();
        let h = inv_max_card();
        let a = FinSubset::singleton(Element::point(&[0]));
        let shifted = n1.right_translate(&a, &Element::point(&[1])).unwrap();
        assert_eq!(h.eval(&a).unwrap(), 1.0);
        assert_eq!(h.eval(&shifted).unwrap(), 0.5);
    }

    #[test]
    fn property_checks_find_planted_counterexamples() {
        let n1 = Semigroup::nat_monoid(1).unwrap();
        let mut sampler = Sampler::new(&n1, 42);
        let quadratic = SetFunction::new(
            "card_squared",
            1.0,
            PropertyFlags::default(),
            |a| Ok((a.len() * a.len()) as f64),
        );
        assert!(!check_subadditive(&quadratic, &mut sampler, 200, CHECK_TOLERANCE)
            .unwrap()
            .is_empty());

        let min_elem = SetFunction::new("min", 100.0, PropertyFlags::default(), |a| {
            Ok(a.iter()
                .next()
                .and_then(|e| e.coords())
                .and_then(|c| c[0].to_f64())
                .unwrap())
        });
        assert!(
            !check_right_subinvariant(&min_elem, &mut sampler, 200, CHECK_TOLERANCE)
                .unwrap()
                .is_empty()
        );

        // and no false positives on the good fixtures
        assert!(check_subadditive(&inv_max_card(), &mut sampler, 200, CHECK_TOLERANCE)
            .unwrap()
            .is_empty());
        assert!(
            check_right_subinvariant(&inv_max_card(), &mut sampler, 200, CHECK_TOLERANCE)
                .unwrap()
                .is_empty()
        );
    }

    #[test]
    fn fekete_lift_limits() {
        let z = Semigroup::int_lattice(1).unwrap();
        let seq = builtin_folner(&z, FolnerKind::Boxes).unwrap();
        let ident = fekete_lift(|n| n as f64, 100).unwrap();
        let est = ow_estimate(&ident, &seq, 10, 3).unwrap();
        assert_eq!(est.lambda_hat, 1.0);

        let sqrt_excess = fekete_lift(|n| n as f64 + (n as f64).sqrt().ceil(), 400).unwrap();
        let est = ow_estimate(&sqrt_excess, &seq, 300, 5).unwrap();
        assert!((est.lambda_hat - 1.0).abs() < 0.07);

        let bad = fekete_lift(|n| if n == 2 { 10.0 } else { n as f64 }, 50);
        assert!(bad.is_err());
    }

    #[test]
    fn certificate_for_cardinality() {
        let z = Semigroup::int_lattice(1).unwrap();
        let d = FinSubset::lattice_box(&[0.into()], &[64.into()]).unwrap();
        let k = FinSubset::lattice_box(&[0.into()], &[8.into()]).unwrap();
        let eps = rational(1, 2);
        let tiling =
            filling_theorem_run(&z, &d, &[k], &eps, TilingMode::BestEffort).unwrap();
        let h = card_multiple(1.0);
        let cert = ow_certificate(&h, &tiling, 1.0, &eps).unwrap();
        assert!(cert.pass, "{:#?}", cert.links);
        assert!(cert.final_bound >= cert.ratio);
    }

    #[test]
    fn certificate_refuses_hot_tiles() {
        let z = Semigroup::int_lattice(1).unwrap();
        let d = FinSubset::lattice_box(&[0.into()], &[64.into()]).unwrap();
        let k = FinSubset::lattice_box(&[0.into()], &[8.into()]).unwrap();
        let eps = rational(1, 2);
        let tiling =
            filling_theorem_run(&z, &d, &[k], &eps, TilingMode::BestEffort).unwrap();
        let h = card_multiple(1.0);
        // lambda_hat far below the true density: tile ratio 1 > 0.1 + 0.5
        let refused = ow_certificate(&h, &tiling, 0.1, &eps);
        assert!(matches!(refused, Err(Error::CertificateRefused { .. })));
    }
}
