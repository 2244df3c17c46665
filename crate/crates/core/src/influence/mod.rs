//! Variance and influence of boolean functions under semi-uniform
//! distributions, decision trees, and the influential-variable fixing
//! algorithm.
//!
//! Coordinates are 0-based. `Var_D(F) = Pr_{x,y~D}[F(x) != F(y)]` and
//! `Inf_D(j, F) = Pr_{x~D}[F(x) != F(x xor e_j)]`.

mod algorithm;
mod tree;

use alloc::vec::Vec;

use rand::RngCore;

use crate::bits::Bits;
use crate::games::{Letter, Word};
use crate::strategies::Prob;

pub use algorithm::{
    algorithm_a, AlgorithmA, AlgorithmError, AlgorithmOutcome, AlgorithmParams, InfluenceSchedule,
    Status,
};
pub use tree::{DecisionTree, Node, TreeFunction, TreeParseError};

/// Most free coordinates an exact enumeration will visit.
pub const MAX_FREE: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InfluenceError {
    #[error("{free} free coordinates exceed the enumeration bound")]
    EnumerationTooLarge { free: usize },
}

/// A partial map `g: [N] ⇀ B`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PartialAssignment {
    mask: Bits,
    values: Bits,
}

impl PartialAssignment {
    pub fn empty(len: usize) -> Self {
        PartialAssignment {
            mask: Bits::zeros(len),
            values: Bits::zeros(len),
        }
    }

    pub fn len(&self) -> usize {
        self.mask.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mask.is_empty()
    }

    pub fn get(&self, j: usize) -> Option<bool> {
        self.mask.get(j).then(|| self.values.get(j))
    }

    pub fn is_fixed(&self, j: usize) -> bool {
        self.mask.get(j)
    }

    pub fn fix(&mut self, j: usize, b: bool) {
        self.mask.set(j, true);
        self.values.set(j, b);
    }

    pub(crate) fn unfix(&mut self, j: usize) {
        self.mask.set(j, false);
        self.values.set(j, false);
    }

    pub fn with(&self, j: usize, b: bool) -> Self {
        let mut g = self.clone();
        g.fix(j, b);
        g
    }

    /// `|dom g|`.
    pub fn dom_size(&self) -> usize {
        self.mask.count_ones()
    }

    pub fn domain(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&j| self.mask.get(j))
    }

    pub fn free(&self) -> Vec<usize> {
        (0..self.len()).filter(|&j| !self.mask.get(j)).collect()
    }

    /// Whether `x` agrees with `g` on `dom g`.
    pub fn consistent(&self, x: &Bits) -> bool {
        self.mask
            .words()
            .iter()
            .zip(x.words())
            .zip(self.values.words())
            .all(|((m, x), v)| m & (x ^ v) == 0)
    }

    /// A point of `U_g`.
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> Bits {
        let mut x = Bits::random(self.len(), rng);
        self.overwrite(&mut x);
        x
    }

    /// Sets the coordinates of `dom g` in `x` to their fixed values.
    pub fn overwrite(&self, x: &mut Bits) {
        let m = self.mask.words();
        let v = self.values.words();
        for (k, w) in x.words_mut().iter_mut().enumerate() {
            *w = (*w & !m[k]) | v[k];
        }
    }

    /// Ternary encoding, `⊥` on free coordinates.
    pub fn to_word(&self) -> Word {
        Word(
            (0..self.len())
                .map(|j| match self.get(j) {
                    Some(b) => Letter::from_bit(b),
                    None => Letter::Bottom,
                })
                .collect(),
        )
    }

    pub fn from_word(w: &Word) -> Self {
        let mut g = PartialAssignment::empty(w.len());
        for (j, l) in w.0.iter().enumerate() {
            if let Some(b) = l.as_bit() {
                g.fix(j, b);
            }
        }
        g
    }

    /// Every point of `U_g`, in increasing order of the free coordinates
    /// read as a binary counter.
    pub fn points(&self) -> Result<impl Iterator<Item = Bits> + '_, InfluenceError> {
        let free = self.free();
        if free.len() > MAX_FREE {
            return Err(InfluenceError::EnumerationTooLarge { free: free.len() });
        }
        let mut base = Bits::zeros(self.len());
        self.overwrite(&mut base);
        Ok((0u64..1 << free.len()).map(move |k| {
            let mut x = base.clone();
            for (bit, &j) in free.iter().enumerate() {
                if (k >> bit) & 1 == 1 {
                    x.set(j, true);
                }
            }
            x
        }))
    }

    /// `U_g(x)`.
    pub fn mass(&self, x: &Bits) -> Prob {
        if self.consistent(x) {
            Prob::new(1, 1u128 << (self.len() - self.dom_size()))
        } else {
            Prob::new(0, 1)
        }
    }
}

impl core::fmt::Display for PartialAssignment {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}", self.to_word())
    }
}

/// The semi-uniform distribution `U_g`.
pub type SemiUniform = PartialAssignment;

fn count_ones(
    d: &SemiUniform,
    f: &mut dyn FnMut(&Bits) -> bool,
) -> Result<(u128, u128), InfluenceError> {
    let mut ones = 0u128;
    let mut total = 0u128;
    for x in d.points()? {
        total += 1;
        ones += f(&x) as u128;
    }
    Ok((ones, total))
}

/// `Var_{U_g}(F)` by enumerating the free coordinates.
pub fn variance_exact(
    d: &SemiUniform,
    mut f: impl FnMut(&Bits) -> bool,
) -> Result<Prob, InfluenceError> {
    let (ones, total) = count_ones(d, &mut f)?;
    Ok(Prob::new(2 * ones * (total - ones), total * total))
}

/// `Inf_{U_g}(j, F)` by enumerating the free coordinates.
pub fn influence_exact(
    d: &SemiUniform,
    j: usize,
    mut f: impl FnMut(&Bits) -> bool,
) -> Result<Prob, InfluenceError> {
    let mut flips = 0u128;
    let mut total = 0u128;
    for mut x in d.points()? {
        total += 1;
        let a = f(&x);
        x.flip(j);
        flips += (a != f(&x)) as u128;
    }
    Ok(Prob::new(flips, total))
}

/// `Δ_{D,S}(T)`: expected number of queries of `tree` outside `outside`
/// on `x ~ D`, by enumeration.
pub fn avg_query_complexity(
    tree: &DecisionTree,
    d: &SemiUniform,
    inside: &[usize],
) -> Result<Prob, InfluenceError> {
    let mut queries = 0u128;
    let mut total = 0u128;
    for x in d.points()? {
        total += 1;
        queries += tree.queries_on(&x).filter(|i| !inside.contains(i)).count() as u128;
    }
    Ok(Prob::new(queries, total))
}

/// Hoeffding sample count for accuracy `acc` with failure probability
/// `gamma`: `⌈ln(2/gamma) / (2 acc²)⌉`.
pub fn hoeffding_samples(acc: f64, gamma: f64) -> u64 {
    libm::ceil(libm::log(2.0 / gamma) / (2.0 * acc * acc)) as u64
}

/// Hoeffding radius of a mean of `m` samples at failure probability
/// `gamma`.
pub fn hoeffding_radius(m: u64, gamma: f64) -> f64 {
    libm::sqrt(libm::log(2.0 / gamma) / (2.0 * m as f64))
}

/// Monte-Carlo `Var_{U_g}(F)` over independent pairs.
pub fn estimate_var<R: RngCore + ?Sized>(
    d: &SemiUniform,
    mut f: impl FnMut(&Bits) -> bool,
    acc: f64,
    gamma: f64,
    rng: &mut R,
) -> f64 {
    let m = hoeffding_samples(acc, gamma);
    let mut hits = 0u64;
    for _ in 0..m {
        let x = d.sample(rng);
        let y = d.sample(rng);
        hits += (f(&x) != f(&y)) as u64;
    }
    hits as f64 / m as f64
}

/// Monte-Carlo `Inf_{U_g}(j, F)`.
pub fn estimate_inf<R: RngCore + ?Sized>(
    d: &SemiUniform,
    j: usize,
    mut f: impl FnMut(&Bits) -> bool,
    acc: f64,
    gamma: f64,
    rng: &mut R,
) -> f64 {
    let m = hoeffding_samples(acc, gamma);
    let mut hits = 0u64;
    for _ in 0..m {
        let mut x = d.sample(rng);
        let a = f(&x);
        x.flip(j);
        hits += (a != f(&x)) as u64;
    }
    hits as f64 / m as f64
}

/// Query access to `F: {0,1}^N -> {0,1}^L`, counting queries.
pub trait BoolFunOracle {
    fn input_len(&self) -> usize;
    fn output_len(&self) -> usize;
    fn query(&mut self, x: &Bits) -> Bits;
    fn query_count(&self) -> u64;
}

#[cfg(test)]
mod tests;
