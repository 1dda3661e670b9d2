//! Symbolic-dynamics entropy as set functions: locally admissible pattern
//! counts for subshifts of finite type, and product/Markov measure
//! entropies on finite coordinate sets.
//!
//! Pattern counting uses a sliding-window transfer DP over the bounding
//! box of F: in one dimension this degenerates to the usual transfer
//! recurrence, in two dimensions to a row-profile transfer matrix, and for
//! anything wider it is a guarded memoized backtracking.

use std::collections::{BTreeMap, HashMap};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::semigroup::FinSubset;
use crate::subadditive::{PropertyFlags, SetFunction};

/// Default work budget for pattern counting; override per call or through
/// the CLI's OWLAB_BUDGET.
pub const DEFAULT_BUDGET: u64 = 200_000_000;

/// A forbidden pattern: a finite shape in ℤ^d with one symbol per cell.
/// Canonical form translates the shape so its componentwise minimum is the
/// origin and sorts cells lexicographically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForbiddenPattern {
    cells: Vec<Vec<i64>>,
    symbols: Vec<usize>,
}

impl ForbiddenPattern {
    pub fn new(cells: Vec<Vec<i64>>, symbols: Vec<usize>) -> Result<Self> {
        if cells.is_empty() || cells.len() != symbols.len() {
            return Err(Error::Domain(
                "forbidden pattern needs matching non-empty cells and symbols".into(),
            ));
        }
        let dim = cells[0].len();
        if cells.iter().any(|c| c.len() != dim) {
            return Err(Error::Domain("forbidden pattern cells of mixed dimension".into()));
        }
        let mins: Vec<i64> = (0..dim)
            .map(|i| cells.iter().map(|c| c[i]).min().unwrap())
            .collect();
        let mut paired: Vec<(Vec<i64>, usize)> = cells
            .into_iter()
            .map(|c| c.iter().zip(&mins).map(|(x, m)| x - m).collect())
            .zip(symbols)
            .collect();
        paired.sort();
        paired.dedup_by(|a, b| a.0 == b.0);
        let (cells, symbols): (Vec<_>, Vec<_>) = paired.into_iter().unzip();
        Ok(ForbiddenPattern { cells, symbols })
    }

    pub fn cells(&self) -> &[Vec<i64>] {
        &self.cells
    }

    pub fn symbols(&self) -> &[usize] {
        &self.symbols
    }
}

/// A subshift of finite type over ℤ^d.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SftSpec {
    alphabet: usize,
    dim: usize,
    forbidden: Vec<ForbiddenPattern>,
}

impl SftSpec {
    pub fn new(alphabet: usize, dim: usize, forbidden: Vec<ForbiddenPattern>) -> Result<Self> {
        if alphabet == 0 || dim == 0 {
            return Err(Error::Domain("SFT needs alphabet ≥ 1 and dim ≥ 1".into()));
        }
        if alphabet >= ABSENT as usize {
            return Err(Error::Domain(format!("alphabet larger than {} unsupported", ABSENT - 1)));
        }
        for p in &forbidden {
            if p.cells[0].len() != dim {
                return Err(Error::Domain(format!(
                    "forbidden pattern of dimension {} in a {dim}-dimensional SFT",
                    p.cells[0].len()
                )));
            }
            if p.symbols.iter().any(|&s| s >= alphabet) {
                return Err(Error::Domain("forbidden pattern symbol out of range".into()));
            }
        }
        Ok(SftSpec {
            alphabet,
            dim,
            forbidden,
        })
    }

    /// Full shift on `alphabet` symbols: nothing forbidden.
    pub fn full_shift(alphabet: usize, dim: usize) -> Result<Self> {
        SftSpec::new(alphabet, dim, Vec::new())
    }

    /// Golden-mean shift on ℤ: binary, no two adjacent 1s.
    pub fn golden_mean() -> Self {
        SftSpec::new(
            2,
            1,
            vec![ForbiddenPattern::new(vec![vec![0], vec![1]], vec![1, 1]).unwrap()],
        )
        .unwrap()
    }

    /// Hard squares on ℤ²: binary, no two orthogonally adjacent 1s.
    pub fn hard_squares() -> Self {
        SftSpec::new(
            2,
            2,
            vec![
                ForbiddenPattern::new(vec![vec![0, 0], vec![1, 0]], vec![1, 1]).unwrap(),
                ForbiddenPattern::new(vec![vec![0, 0], vec![0, 1]], vec![1, 1]).unwrap(),
            ],
        )
        .unwrap()
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

const ABSENT: u8 = u8::MAX;

struct Check<'a> {
    /// cell offsets as lex indices relative to the pattern's lex-last
    /// cell (all ≤ 0)
    offsets: Vec<isize>,
    symbols: &'a [usize],
    /// whether the pattern, anchored with its lex-last cell at box index
    /// i, lies geometrically inside the bounding box (index arithmetic
    /// alone would wrap across rows)
    anchored: Vec<bool>,
}

struct CountState<'a> {
    sft: &'a SftSpec,
    /// bounding-box points in lex order; `in_f[i]` marks membership in F
    in_f: Vec<bool>,
    checks: Vec<Check<'a>>,
    window: usize,
    memo: HashMap<(usize, Vec<u8>), BigUint>,
    work: u64,
    budget: u64,
}

impl CountState<'_> {
    fn count(&mut self, i: usize, window: &[u8]) -> Result<BigUint> {
        if i == self.in_f.len() {
            return Ok(BigUint::one());
        }
        let key = (i, window.to_vec());
        if let Some(v) = self.memo.get(&key) {
            return Ok(v.clone());
        }
        self.work += 1;
        if self.work > self.budget {
            return Err(Error::Resource {
                work: self.work,
                budget: self.budget,
            });
        }
        let push = |w: &[u8], sym: u8| -> Vec<u8> {
            let mut next = w.to_vec();
            next.rotate_left(1);
            *next.last_mut().unwrap() = sym;
            next
        };
        let total = if !self.in_f[i] {
            let next = push(window, ABSENT);
            self.count(i + 1, &next)?
        } else {
            let mut acc = BigUint::zero();
            'symbol: for sym in 0..self.sft.alphabet as u8 {
                // reject iff some forbidden pattern whose lex-last cell is
                // here matches entirely inside F
                for Check {
                    offsets,
                    symbols,
                    anchored,
                } in &self.checks
                {
                    if !anchored[i] {
                        continue;
                    }
                    let mut matches = true;
                    for (off, &want) in offsets.iter().zip(*symbols) {
                        let have = if *off == 0 {
                            sym
                        } else {
                            let back = (-off) as usize;
                            if back > window.len() {
                                matches = false;
                                break;
                            }
                            window[window.len() - back]
                        };
                        if have == ABSENT || have != want as u8 {
                            matches = false;
                            break;
                        }
                    }
                    if matches {
                        continue 'symbol;
                    }
                }
                let next = push(window, sym);
                acc += self.count(i + 1, &next)?;
            }
            acc
        };
        self.memo.insert(key, total.clone());
        Ok(total)
    }
}

/// The number of locally admissible patterns on F: assignments
/// F → alphabet containing no forbidden pattern whose translated shape
/// lies entirely inside F. F = ∅ counts as 1.
pub fn pattern_count(sft: &SftSpec, f: &FinSubset, budget: u64) -> Result<BigUint> {
    if f.is_empty() {
        return Ok(BigUint::one());
    }
    let points: Vec<Vec<i64>> = f
        .iter()
        .map(|e| {
            let coords = e
                .coords()
                .ok_or_else(|| Error::Domain("pattern_count needs lattice points".into()))?;
            if coords.len() != sft.dim {
                return Err(Error::Domain(format!(
                    "point of dimension {} in a {}-dimensional SFT",
                    coords.len(),
                    sft.dim
                )));
            }
            coords
                .iter()
                .map(|c| {
                    c.to_i64()
                        .ok_or_else(|| Error::Domain("coordinate out of i64 range".into()))
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let dim = sft.dim;
    let lo: Vec<i64> = (0..dim).map(|i| points.iter().map(|p| p[i]).min().unwrap()).collect();
    let hi: Vec<i64> = (0..dim).map(|i| points.iter().map(|p| p[i]).max().unwrap()).collect();
    let mut extents = Vec::with_capacity(dim);
    let mut box_card: u64 = 1;
    for i in 0..dim {
        let e = (hi[i] - lo[i] + 1) as u64;
        box_card = box_card.saturating_mul(e);
        extents.push(e as i64);
    }
    if box_card > budget {
        return Err(Error::Resource {
            work: box_card,
            budget,
        });
    }
    // strides for lex order on box offsets
    let mut strides = vec![1i64; dim];
    for i in (0..dim - 1).rev() {
        strides[i] = strides[i + 1] * extents[i + 1];
    }
    let index_of = |p: &[i64]| -> usize {
        (0..dim)
            .map(|i| (p[i] - lo[i]) * strides[i])
            .sum::<i64>() as usize
    };
    let mut in_f = vec![false; box_card as usize];
    for p in &points {
        in_f[index_of(p)] = true;
    }

    // coordinates of a box point from its lex index
    let coords_of = |i: usize| -> Vec<i64> {
        (0..dim)
            .map(|j| lo[j] + (i as i64 / strides[j]) % extents[j])
            .collect()
    };

    // each forbidden shape, expressed as offsets back from its lex-last
    // cell, with a per-anchor fit table (index arithmetic alone would
    // wrap across box rows)
    let mut window = 1usize;
    let mut checks = Vec::new();
    for pat in &sft.forbidden {
        let idx: Vec<i64> = pat
            .cells
            .iter()
            .map(|c| (0..dim).map(|i| c[i] * strides[i]).sum::<i64>())
            .collect();
        let (last_pos, &last) = idx
            .iter()
            .enumerate()
            .max_by_key(|(_, &v)| v)
            .unwrap();
        let span = (last - idx.iter().min().unwrap()) as usize;
        let deltas: Vec<Vec<i64>> = pat
            .cells
            .iter()
            .map(|c| (0..dim).map(|i| pat.cells[last_pos][i] - c[i]).collect())
            .collect();
        let anchored: Vec<bool> = (0..box_card as usize)
            .map(|i| {
                let p = coords_of(i);
                deltas.iter().all(|delta| {
                    (0..dim).all(|j| {
                        let c = p[j] - delta[j];
                        lo[j] <= c && c <= hi[j]
                    })
                })
            })
            .collect();
        if !anchored.iter().any(|&b| b) {
            continue; // shape never fits inside the bounding box
        }
        if span + 1 > window {
            window = span + 1;
        }
        let offsets: Vec<isize> = idx.iter().map(|&v| (v - last) as isize).collect();
        checks.push(Check {
            offsets,
            symbols: pat.symbols.as_slice(),
            anchored,
        });
    }

    let mut state = CountState {
        sft,
        in_f,
        checks,
        window,
        memo: HashMap::new(),
        work: 0,
        budget,
    };
    let start = vec![ABSENT; state.window];
    state.count(0, &start)
}

/// h(F) = log pattern_count(F), with M = log alphabet. Translation
/// invariance of the forbidden list makes this right-invariant, and local
/// admissibility makes it exactly subadditive and non-decreasing for SFTs
/// with a safe symbol.
pub fn sft_entropy_h(sft: SftSpec, budget: u64) -> SetFunction {
    let m = (sft.alphabet as f64).ln();
    let name = format!("sft[{}^{}]", sft.alphabet, sft.dim);
    SetFunction::new(name, m, PropertyFlags::all(), move |f| {
        let count = pattern_count(&sft, f, budget)?;
        let bits = count.bits();
        // ln via f64 when it fits, else via the top bits plus an exponent
        if bits <= 1023 {
            Ok(count.to_f64().expect("fits").ln())
        } else {
            let shift = bits - 53;
            let top: BigUint = count >> shift;
            Ok(top.to_f64().expect("53 bits").ln() + (shift as f64) * std::f64::consts::LN_2)
        }
    })
}

/// Accumulates entropy contributions −Σ q·ln(x) with exact rational
/// coefficients, merging terms with equal log argument before any float
/// rounding. Keeps algebraically equal entropies bit-identical.
#[derive(Default)]
struct EntropyTerms {
    terms: BTreeMap<BigRational, BigRational>,
}

impl EntropyTerms {
    fn add(&mut self, coeff: BigRational, x: BigRational) {
        if coeff.is_zero() || x.is_zero() {
            return; // 0·log 0 = 0 convention
        }
        *self.terms.entry(x).or_insert_with(BigRational::zero) += coeff;
    }

    fn value(&self) -> f64 {
        let mut total = 0.0;
        for (x, q) in &self.terms {
            if q.is_zero() {
                continue;
            }
            total -= q.to_f64().unwrap() * x.to_f64().unwrap().ln();
        }
        total
    }
}

fn validate_distribution(p: &[BigRational]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::Domain("empty probability vector".into()));
    }
    if p.iter().any(|x| x.is_negative()) {
        return Err(Error::Domain("negative probability".into()));
    }
    let total: BigRational = p.iter().sum();
    if !total.is_one() {
        return Err(Error::Domain(format!("probabilities sum to {total}, not 1")));
    }
    Ok(())
}

/// Shannon entropy −Σ p_i ln p_i of an exact distribution.
pub fn shannon_entropy(p: &[BigRational]) -> f64 {
    let mut terms = EntropyTerms::default();
    for x in p {
        terms.add(x.clone(), x.clone());
    }
    terms.value()
}

/// h(F) = |F| · H(p): the partition entropy of a product (Bernoulli)
/// measure over any index set. Right-invariant on cancellative families.
pub fn bernoulli_entropy_h(p: Vec<BigRational>) -> Result<SetFunction> {
    validate_distribution(&p)?;
    let m = shannon_entropy(&p);
    Ok(SetFunction::new(
        format!("bernoulli[{}]", p.len()),
        m,
        PropertyFlags::all(),
        move |f| {
            let card = BigRational::from(BigInt::from(f.len()));
            let mut terms = EntropyTerms::default();
            for x in &p {
                terms.add(&card * x, x.clone());
            }
            Ok(terms.value())
        },
    ))
}

/// A stationary finite-state Markov chain with exact rational transition
/// matrix and stationary vector (πP = π is validated exactly).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkovSpec {
    transition: Vec<Vec<BigRational>>,
    stationary: Vec<BigRational>,
}

impl MarkovSpec {
    pub fn new(transition: Vec<Vec<BigRational>>, stationary: Vec<BigRational>) -> Result<Self> {
        let k = transition.len();
        if k == 0 || stationary.len() != k {
            return Err(Error::Domain(
                "Markov spec needs a square matrix and a matching stationary vector".into(),
            ));
        }
        for row in &transition {
            if row.len() != k {
                return Err(Error::Domain("transition matrix is not square".into()));
            }
            validate_distribution(row)?;
        }
        validate_distribution(&stationary)?;
        for j in 0..k {
            let image: BigRational = (0..k).map(|i| &stationary[i] * &transition[i][j]).sum();
            if image != stationary[j] {
                return Err(Error::Domain(format!(
                    "vector is not stationary: (πP)_{j} = {image} ≠ π_{j} = {}",
                    stationary[j]
                )));
            }
        }
        Ok(MarkovSpec {
            transition,
            stationary,
        })
    }

    /// The i.i.d. chain with every row equal to p (stationary vector p).
    pub fn iid(p: Vec<BigRational>) -> Result<Self> {
        let k = p.len();
        MarkovSpec::new(vec![p.clone(); k], p)
    }

    pub fn states(&self) -> usize {
        self.stationary.len()
    }

    pub fn transition(&self) -> &[Vec<BigRational>] {
        &self.transition
    }

    pub fn stationary(&self) -> &[BigRational] {
        &self.stationary
    }

    /// −Σ_i π_i Σ_j P_ij ln P_ij, the entropy rate of the chain.
    pub fn entropy_rate(&self) -> f64 {
        conditional_entropy(&self.stationary, &self.transition)
    }
}

/// Exact rational matrix power by repeated squaring.
pub fn matrix_power(m: &[Vec<BigRational>], mut e: u64) -> Vec<Vec<BigRational>> {
    let k = m.len();
    let mut result: Vec<Vec<BigRational>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    if i == j {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect()
        })
        .collect();
    let mut base = m.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            result = mat_mul(&result, &base);
        }
        e >>= 1;
        if e > 0 {
            base = mat_mul(&base, &base);
        }
    }
    result
}

fn mat_mul(a: &[Vec<BigRational>], b: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let k = a.len();
    (0..k)
        .map(|i| {
            (0..k)
                .map(|j| (0..k).map(|l| &a[i][l] * &b[l][j]).sum())
                .collect()
        })
        .collect()
}

fn conditional_entropy(pi: &[BigRational], q: &[Vec<BigRational>]) -> f64 {
    let mut terms = EntropyTerms::default();
    for (p_i, row) in pi.iter().zip(q) {
        for x in row {
            terms.add(p_i * x, x.clone());
        }
    }
    terms.value()
}

/// Kolmogorov-Sinai entropy of the coordinate partition on a finite
/// F ⊂ ℤ: for F = {a_1 < ... < a_m} with gaps g_j, the exact chain rule
/// gives h(F) = H(π) + Σ_j H_cond(P^{g_j}).
pub fn markov_entropy_h(spec: MarkovSpec) -> SetFunction {
    let m = shannon_entropy(&spec.stationary);
    SetFunction::new(format!("markov[{}]", spec.states()), m, PropertyFlags::all(), move |f| {
        let positions = sorted_positions(f)?;
        let mut gap_counts: BTreeMap<u64, u64> = BTreeMap::new();
        for w in positions.windows(2) {
            *gap_counts.entry((w[1] - w[0]) as u64).or_insert(0) += 1;
        }
        // merged-term accumulation so algebraically equal gap
        // contributions collapse before float evaluation
        let mut terms = EntropyTerms::default();
        for x in &spec.stationary {
            terms.add(x.clone(), x.clone());
        }
        for (&gap, &count) in &gap_counts {
            let q = matrix_power(&spec.transition, gap);
            let mult = BigRational::from(BigInt::from(count));
            for (p_i, row) in spec.stationary.iter().zip(&q) {
                for x in row {
                    terms.add(&mult * &(p_i * x), x.clone());
                }
            }
        }
        Ok(terms.value())
    })
}

fn sorted_positions(f: &FinSubset) -> Result<Vec<i64>> {
    f.iter()
        .map(|e| {
            let coords = e
                .coords()
                .filter(|c| c.len() == 1)
                .ok_or_else(|| Error::Domain("Markov entropy needs subsets of ℤ".into()))?;
            coords[0]
                .to_i64()
                .ok_or_else(|| Error::Domain("coordinate out of i64 range".into()))
        })
        .collect()
}
