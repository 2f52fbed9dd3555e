//! Finite-`N` ground truth for simple loops.
//!
//! - Exact moments `E[tr(H^{-m}) tr(H^n)]` of the holonomy of a simple loop
//!   splitting the sphere into areas `(a, b)`, as a truncated sum over the
//!   highest weights of `U(N)`.
//! - A Metropolis sampler for the discrete β-ensemble (β = 2) on
//!   `N⁻¹ℤ_sym` and the contour observable `I_n^a` whose ensemble averages
//!   reproduce the same moments.
//!
//! Lattice points are stored as `2ν` with `ν = Nλ`, so half-integer
//! lattices (even `N`) stay in integer arithmetic.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // unused when a dependency links std
use num_traits::Float;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::equilibrium::EquilibriumMeasure;
use crate::specfun::{contour_integrate, integrate, ContourOptions, Ellipse, QuadratureRule};
use crate::{Error, Result};

/// Largest `N` accepted by the character sum.
pub const MAX_CHARSUM_N: usize = 6;
/// Tail estimates above this are reported as unreliable.
pub const TAIL_WARNING: f64 = 1e-10;
const MAX_TUPLES: f64 = 2e9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacterSumConfig {
    pub n: usize,
    pub t: f64,
    pub a: f64,
    pub b: f64,
    /// Bound on `|ν_j|`; `None` picks one from the Gaussian tail.
    pub cutoff: Option<u32>,
}

impl CharacterSumConfig {
    pub fn new(n: usize, t: f64, a: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("N must be at least 1".into()));
        }
        if !(t > 0.0 && t.is_finite()) || !(0.0..=t).contains(&a) {
            return Err(Error::Domain(alloc::format!("need 0 <= a <= T, T > 0 (T = {t}, a = {a})")));
        }
        Ok(Self { n, t, a, b: t - a, cutoff: None })
    }

    pub fn with_cutoff(mut self, cutoff: u32) -> Self {
        self.cutoff = Some(cutoff);
        self
    }

    /// Log of the one-coordinate envelope of a summand at `|ν| = x`.
    fn envelope(&self, x: f64, growth: f64) -> f64 {
        let n = self.n as f64;
        -x * x * self.t / (2.0 * n) + growth * x / n + 2.0 * (n - 1.0) * (x + n).ln()
    }

    /// Smallest cutoff past which the envelope has dropped by `1e-16`
    /// relative to its maximum and keeps decreasing. `growth` bounds the
    /// linear exponent `(|m| a + |n| b)` of the observable.
    pub fn resolved_cutoff(&self, growth: f64) -> u32 {
        if let Some(c) = self.cutoff {
            return c;
        }
        let peak = (0..4096).map(|x| self.envelope(x as f64, growth)).fold(f64::NEG_INFINITY, f64::max);
        let mut c = self.n as u32;
        loop {
            let x = c as f64;
            let falling = self.envelope(x + 1.0, growth) < self.envelope(x, growth);
            if falling && self.envelope(x, growth) - peak < (1e-16f64).ln() {
                return c;
            }
            c += 1;
        }
    }

    /// Relative size of the first dropped shell, summed over the next few
    /// hundred shells.
    fn tail_estimate(&self, cutoff: u32, growth: f64) -> f64 {
        let peak = (0..4096).map(|x| self.envelope(x as f64, growth)).fold(f64::NEG_INFINITY, f64::max);
        let shells: f64 = (1..=400).map(|d| (self.envelope((cutoff + d) as f64, growth) - peak).exp()).sum();
        self.n as f64 * shells
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacterSum {
    pub value: f64,
    pub tail_estimate: f64,
    pub cutoff: u32,
    pub terms: u64,
}

impl CharacterSum {
    pub fn tail_warning(&self) -> bool {
        self.tail_estimate > TAIL_WARNING
    }
}

/// Lattice `ℤ_sym` within `|ν| ≤ cutoff`, as `2ν`, decreasing.
fn lattice(n: usize, cutoff: u32) -> Vec<i64> {
    let c = 2 * cutoff as i64;
    let start = if n % 2 == 1 { c } else { c - 1 };
    (0..).map(|i| start - 2 * i).take_while(|&x| x >= -c).collect()
}

/// `J(ν, m, a)` with `ν` given as `2ν`.
fn j_factor(twice: &[i64], m: i64, a: f64) -> f64 {
    if m == 0 {
        return 1.0;
    }
    let n = twice.len() as f64;
    let mf = m as f64;
    let mut s = 0.0;
    for (j, &x) in twice.iter().enumerate() {
        let mut prod = 1.0;
        for (i, &y) in twice.iter().enumerate() {
            if i != j {
                prod *= (x + 2 * m - y) as f64 / (x - y) as f64;
            }
        }
        s += (-mf * a * x as f64 / (2.0 * n)).exp() * prod;
    }
    (-mf * mf * a / (2.0 * n)).exp() * s / n
}

/// `E[tr(H^{-m}) tr(H^n)]` at finite `N`.
pub fn charsum_moment(cfg: &CharacterSumConfig, m: i64, n: i64) -> Result<CharacterSum> {
    Ok(charsum_moments(cfg, &[(m, n)])?[0])
}

/// Several moments from one pass over the weights.
pub fn charsum_moments(cfg: &CharacterSumConfig, moments: &[(i64, i64)]) -> Result<Vec<CharacterSum>> {
    let n = cfg.n;
    if n > MAX_CHARSUM_N {
        return Err(Error::Guard(alloc::format!("character sum limited to N <= {MAX_CHARSUM_N}, got N = {n}")));
    }
    if n == 0 {
        return Err(Error::Domain("N must be at least 1".into()));
    }
    let growth = moments
        .iter()
        .map(|&(m, k)| m.unsigned_abs() as f64 * cfg.a + k.unsigned_abs() as f64 * cfg.b)
        .fold(0.0, f64::max);
    let cutoff = cfg.resolved_cutoff(growth);
    let vals = lattice(n, cutoff);
    if (vals.len() as f64) < n as f64 {
        return Err(Error::Domain(alloc::format!("cutoff {cutoff} leaves fewer than N lattice points")));
    }
    let tuples = binomial(vals.len(), n);
    if tuples > MAX_TUPLES {
        return Err(Error::Guard(alloc::format!("{tuples:e} weights needed; T is too small for the character sum")));
    }
    // per-coordinate Gaussian factor, rescaled around the ground state
    let scale = -((n * n) as f64 * cfg.t / 24.0);
    let gauss: Vec<f64> = vals
        .iter()
        .map(|&x| (-(x * x) as f64 * cfg.t / (8.0 * n as f64) - scale / n as f64).exp())
        .collect();

    let mut idx: Vec<usize> = (0..n).collect();
    let mut tuple = vec![0i64; n];
    let mut z = 0.0;
    let mut sums = vec![0.0; moments.len()];
    let mut terms = 0u64;
    loop {
        for (k, &i) in idx.iter().enumerate() {
            tuple[k] = vals[i];
        }
        let mut w = 1.0;
        for k in 0..n {
            w *= gauss[idx[k]];
            for i in 0..k {
                let d = (tuple[i] - tuple[k]) as f64;
                w *= d * d;
            }
        }
        z += w;
        for (s, &(m, k)) in sums.iter_mut().zip(moments) {
            *s += w * (j_factor(&tuple, m, cfg.a) * j_factor(&tuple, k, cfg.b));
        }
        terms += 1;
        if !next_combination(&mut idx, vals.len()) {
            break;
        }
    }
    if !z.is_finite() || z <= 0.0 {
        return Err(Error::NoConvergence("character-sum weights overflowed".into()));
    }
    let tail = cfg.tail_estimate(cutoff, growth);
    Ok(sums.iter().map(|s| CharacterSum { value: s / z, tail_estimate: tail, cutoff, terms }).collect())
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Advance to the next increasing index tuple in lexicographic order.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Configuration of the discrete β-ensemble: `λ_j = ν_j / N`, strictly
/// decreasing, `ν_j ∈ ℤ_sym`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BetaEnsembleState {
    twice_nu: Vec<i64>,
}

impl BetaEnsembleState {
    /// The Weyl vector `ρ / N`, the densest configuration.
    pub fn ground(n: usize) -> Self {
        Self { twice_nu: (0..n).map(|j| n as i64 - 1 - 2 * j as i64).collect() }
    }

    /// From `2ν`; checks parity and strict ordering.
    pub fn from_twice_scaled(twice_nu: Vec<i64>) -> Result<Self> {
        let n = twice_nu.len();
        if n == 0 {
            return Err(Error::Domain("empty configuration".into()));
        }
        let parity = (n as i64 - 1).rem_euclid(2);
        if twice_nu.iter().any(|x| x.rem_euclid(2) != parity) {
            return Err(Error::Domain("positions are off the lattice".into()));
        }
        if twice_nu.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::Domain("positions must be strictly decreasing".into()));
        }
        Ok(Self { twice_nu })
    }

    pub fn n(&self) -> usize {
        self.twice_nu.len()
    }

    pub fn twice_scaled(&self) -> &[i64] {
        &self.twice_nu
    }

    pub fn positions(&self) -> Vec<f64> {
        let n = self.n() as f64;
        self.twice_nu.iter().map(|&x| x as f64 / (2.0 * n)).collect()
    }

    /// `log P(λ)` up to the normalising constant.
    pub fn log_weight(&self, t: f64) -> f64 {
        let n = self.n() as f64;
        let mut w = 0.0;
        for (k, &x) in self.twice_nu.iter().enumerate() {
            w -= (x * x) as f64 * t / (8.0 * n);
            for &y in &self.twice_nu[..k] {
                w += 2.0 * ((y - x) as f64).ln();
            }
        }
        w
    }

    /// Change of `log P` when particle `k` moves by `up ? +1/N : −1/N`;
    /// `None` if the move breaks the strict ordering.
    pub fn log_weight_change(&self, k: usize, up: bool, t: f64) -> Option<f64> {
        let x = self.twice_nu[k];
        let y = if up { x + 2 } else { x - 2 };
        if (k > 0 && y >= self.twice_nu[k - 1]) || (k + 1 < self.n() && y <= self.twice_nu[k + 1]) {
            return None;
        }
        let n = self.n() as f64;
        let mut d = -((y * y - x * x) as f64) * t / (8.0 * n);
        for (i, &z) in self.twice_nu.iter().enumerate() {
            if i != k {
                d += 2.0 * (((y - z) as f64).abs().ln() - ((x - z) as f64).abs().ln());
            }
        }
        Some(d)
    }

    /// Metropolis acceptance probability of the move.
    pub fn acceptance(&self, k: usize, up: bool, t: f64) -> f64 {
        self.log_weight_change(k, up, t).map_or(0.0, |d| d.min(0.0).exp())
    }

    fn apply(&mut self, k: usize, up: bool) {
        self.twice_nu[k] += if up { 2 } else { -2 };
    }
}

/// One Metropolis chain. Each step picks a particle uniformly and proposes
/// a move of `±1/N` with equal probability.
#[derive(Debug, Clone)]
pub struct BetaChain {
    state: BetaEnsembleState,
    t: f64,
    rng: ChaCha8Rng,
    pub proposed: u64,
    pub accepted: u64,
}

impl BetaChain {
    /// Chain started at the ground state. Chains with the same seed and
    /// different `stream` are independent.
    pub fn new(n: usize, t: f64, seed: u64, stream: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain("the sampler needs N >= 2".into()));
        }
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Domain(alloc::format!("T must be positive, got {t}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Ok(Self { state: BetaEnsembleState::ground(n), t, rng, proposed: 0, accepted: 0 })
    }

    pub fn state(&self) -> &BetaEnsembleState {
        &self.state
    }

    pub fn step(&mut self) {
        let k = self.rng.random_range(0..self.state.n());
        let up = self.rng.random::<bool>();
        let u = self.rng.random::<f64>();
        self.proposed += 1;
        if let Some(d) = self.state.log_weight_change(k, up, self.t) {
            if d >= 0.0 || u < d.exp() {
                self.state.apply(k, up);
                self.accepted += 1;
            }
        }
    }

    /// `N` steps.
    pub fn sweep(&mut self) {
        for _ in 0..self.state.n() {
            self.step();
        }
    }
}

/// `sweeps` sweeps after `burn_in`, keeping one state every `N` sweeps.
pub fn mcmc_chain(n: usize, t: f64, sweeps: usize, burn_in: usize, seed: u64, stream: u64) -> Result<Vec<BetaEnsembleState>> {
    if sweeps == 0 || burn_in == 0 {
        return Err(Error::Domain("sweeps and burn_in must be at least 1".into()));
    }
    let mut chain = BetaChain::new(n, t, seed, stream)?;
    for _ in 0..burn_in {
        chain.sweep();
    }
    let mut out = Vec::with_capacity(sweeps / n + 1);
    for s in 1..=sweeps {
        chain.sweep();
        if s % n == 0 {
            out.push(chain.state().clone());
        }
    }
    Ok(out)
}

/// A single chain on stream 0.
pub fn mcmc_sample(n: usize, t: f64, sweeps: usize, burn_in: usize, seed: u64) -> Result<Vec<BetaEnsembleState>> {
    mcmc_chain(n, t, sweeps, burn_in, seed, 0)
}

/// `I_n^a(λ)` as a contour integral of
/// `e^{-an²/2N}/(n) · e^{-naz} Π_j (1 + n/(N(z − λ_j)))` around the support.
pub fn contour_observable(state: &BetaEnsembleState, n: i64, a: f64) -> Result<Complex64> {
    contour_observable_margin(state, n, a, 1.0)
}

/// [`contour_observable`] with the contour margin scaled by `stretch ≥ 1`.
pub fn contour_observable_margin(state: &BetaEnsembleState, n: i64, a: f64, stretch: f64) -> Result<Complex64> {
    if n == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let big_n = state.n() as f64;
    let lam = state.positions();
    let nf = n as f64;
    let w = nf.abs() / big_n;
    let contour = Ellipse::around_segment(lam[lam.len() - 1] - 2.0 * w, lam[0] + 2.0 * w, stretch * w);
    let opts = ContourOptions { initial_nodes: 32, abs_tol: 1e-14, rel_tol: 1e-13, max_nodes: 1 << 16 };
    let v = contour_integrate(
        |z| {
            let mut p = (-nf * a * z).exp();
            for &l in &lam {
                p *= 1.0 + w.copysign(nf) / (z - l);
            }
            p
        },
        &contour,
        &opts,
    )?;
    Ok(v * ((-a * nf * nf / (2.0 * big_n)).exp() / nf))
}

/// `I_n^a(λ)` by its residue sum.
pub fn residue_observable(state: &BetaEnsembleState, n: i64, a: f64) -> f64 {
    j_factor(state.twice_scaled(), n, a)
}

/// Mean and batch-means standard error.
pub fn batch_means(values: &[f64], batches: usize) -> (f64, f64) {
    let len = values.len();
    let mean = values.iter().sum::<f64>() / len as f64;
    let b = batches.min(len).max(2);
    let size = len / b;
    if size == 0 {
        return (mean, f64::NAN);
    }
    let means: Vec<f64> = (0..b).map(|i| values[i * size..(i + 1) * size].iter().sum::<f64>() / size as f64).collect();
    let bm = means.iter().sum::<f64>() / b as f64;
    let var = means.iter().map(|m| (m - bm).powi(2)).sum::<f64>() / (b - 1) as f64;
    (mean, (var / b as f64).sqrt())
}

/// MCMC estimate of `E[I_m^a I_n^b]` with its batch-means error (100
/// batches). Observables are computed once per distinct state.
pub fn mcmc_moment(states: &[BetaEnsembleState], m: i64, n: i64, a: f64, b: f64) -> Result<(f64, f64)> {
    if states.is_empty() {
        return Err(Error::Domain("no samples".into()));
    }
    let mut cache: BTreeMap<&BetaEnsembleState, f64> = BTreeMap::new();
    let mut values = Vec::with_capacity(states.len());
    for s in states {
        let v = match cache.get(s) {
            Some(&v) => v,
            None => {
                let v = (contour_observable(s, m, a)? * contour_observable(s, n, b)?).re;
                cache.insert(s, v);
                v
            }
        };
        values.push(v);
    }
    Ok(batch_means(&values, 100))
}

/// Kolmogorov distance between the empirical law of all particle
/// positions in `states` and the equilibrium measure.
pub fn kolmogorov_distance(states: &[BetaEnsembleState], eq: &EquilibriumMeasure) -> Result<f64> {
    let mut xs: Vec<f64> = states.iter().flat_map(|s| s.positions()).collect();
    if xs.is_empty() {
        return Err(Error::Domain("no samples".into()));
    }
    xs.sort_by(f64::total_cmp);
    let total = xs.len() as f64;
    let rule = QuadratureRule::gauss_kronrod(1e-12, 1e-10);
    let mut cdf = 0.0;
    let mut last = -eq.beta;
    let mut dist = 0.0f64;
    let mut i = 0;
    while i < xs.len() {
        let x = xs[i];
        let mut j = i;
        while j < xs.len() && xs[j] == x {
            j += 1;
        }
        let upto = x.clamp(-eq.beta, eq.beta);
        if upto > last {
            cdf += integrate(|y| eq.density(y), last, upto, &rule)?.0;
            last = upto;
        }
        dist = dist.max((cdf - i as f64 / total).abs()).max((cdf - j as f64 / total).abs());
        i = j;
    }
    Ok(dist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::solve_equilibrium;
    use crate::simple_field::phi_simple;
    use std::println;

    #[test]
    fn normalisation_and_single_particle() {
        let cfg = CharacterSumConfig::new(3, 1.0, 0.4).unwrap();
        assert_eq!(charsum_moment(&cfg, 0, 0).unwrap().value, 1.0);
        // N = 1: theta-function ratio, written with either area
        let (t, a) = (1.3, 0.45);
        let cfg = CharacterSumConfig::new(1, t, a).unwrap();
        let v = charsum_moment(&cfg, 0, 1).unwrap().value;
        let b = t - a;
        let theta = |s: f64| (-60..=60).map(|k| (-(k * k) as f64 * t / 2.0 - s * k as f64).exp()).sum::<f64>();
        let with_a = (-a / 2.0).exp() * theta(a) / theta(0.0);
        let with_b = (-b / 2.0).exp() * theta(b) / theta(0.0);
        assert!((v - with_a).abs() < 1e-14, "{v} vs {with_a}");
        assert!((v - with_b).abs() < 1e-14, "{v} vs {with_b}");
    }

    #[test]
    fn swapping_areas_and_powers_is_exact() {
        let cfg = CharacterSumConfig::new(3, 2.0, 0.7).unwrap();
        let swapped = CharacterSumConfig::new(3, 2.0, 1.3).unwrap();
        for (m, n) in [(0, 1), (1, 2), (2, 1), (1, 1), (-1, 2)] {
            let x = charsum_moment(&cfg, m, n).unwrap().value;
            let y = charsum_moment(&swapped, n, m).unwrap().value;
            assert_eq!(x, y, "(m, n) = ({m}, {n})");
        }
    }

    #[test]
    fn cutoff_is_converged() {
        for n in [2, 3, 4] {
            let cfg = CharacterSumConfig::new(n, 1.0, 0.5).unwrap();
            let auto = charsum_moment(&cfg, 1, 1).unwrap();
            assert!(auto.tail_estimate < TAIL_WARNING);
            let wider = charsum_moment(&cfg.with_cutoff(auto.cutoff + 6), 1, 1).unwrap();
            assert!((auto.value - wider.value).abs() < 1e-13, "N={n}: {} vs {}", auto.value, wider.value);
            let narrow = charsum_moment(&cfg.with_cutoff(n as u32 + 1), 1, 1).unwrap();
            assert!(narrow.tail_warning());
        }
    }

    #[test]
    fn guard_above_six() {
        let cfg = CharacterSumConfig::new(7, 1.0, 0.5).unwrap();
        assert!(matches!(charsum_moment(&cfg, 0, 1), Err(Error::Guard(_))));
    }

    #[test]
    fn approaches_the_master_field() {
        let target = phi_simple(1, 0.5, 1.0).unwrap();
        let mut last = f64::INFINITY;
        for n in 2..=5 {
            let cfg = CharacterSumConfig::new(n, 1.0, 0.5).unwrap();
            let v = charsum_moment(&cfg, 0, 1).unwrap().value;
            let err = (v - target).abs();
            println!("N={n}: {v} (error {err:e})");
            assert!(err < last);
            last = err;
        }
    }

    #[test]
    fn residue_and_contour_observables_agree() {
        let s = BetaEnsembleState::from_twice_scaled(vec![9, 3, 1, -5]).unwrap();
        for n in [-2, -1, 1, 2, 3] {
            let c = contour_observable(&s, n, 0.4).unwrap();
            let r = residue_observable(&s, n, 0.4);
            assert!((c.re - r).abs() < 1e-12 * r.abs().max(1.0), "n={n}: {c} vs {r}");
            assert!(c.im.abs() < 1e-12);
            let wide = contour_observable_margin(&s, n, 0.4, 3.0).unwrap();
            assert!((wide - c).norm() < 1e-8);
        }
        assert_eq!(contour_observable(&s, 0, 0.4).unwrap(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn states_are_checked() {
        assert!(BetaEnsembleState::from_twice_scaled(vec![3, 1, -1]).is_err());
        assert!(BetaEnsembleState::from_twice_scaled(vec![1, 3]).is_err());
        assert!(BetaEnsembleState::from_twice_scaled(vec![3, -1]).is_ok());
        assert_eq!(BetaEnsembleState::ground(4).positions(), vec![0.375, 0.125, -0.125, -0.375]);
    }

    #[test]
    fn blocked_moves_are_rejected() {
        let s = BetaEnsembleState::ground(3);
        assert_eq!(s.acceptance(1, true, 1.0), 0.0);
        assert_eq!(s.acceptance(1, false, 1.0), 0.0);
        assert!(s.acceptance(0, true, 1.0) > 0.0);
    }

    #[test]
    fn kernel_satisfies_detailed_balance() {
        // all N = 2 states with |ν| ≤ 4
        let t = 1.3;
        let states: Vec<BetaEnsembleState> = (-9..=9)
            .step_by(2)
            .flat_map(|x: i64| (-9..x).step_by(2).map(move |y| BetaEnsembleState::from_twice_scaled(vec![x, y]).unwrap()))
            .collect();
        let p = |from: &BetaEnsembleState, to: &BetaEnsembleState| -> f64 {
            let mut total = 0.0;
            for k in 0..2 {
                for up in [true, false] {
                    let mut s = from.clone();
                    if from.log_weight_change(k, up, t).is_some() {
                        s.apply(k, up);
                        if &s == to {
                            total += 0.25 * from.acceptance(k, up, t);
                        }
                    }
                }
            }
            total
        };
        let mut pairs = 0;
        for x in &states {
            for y in &states {
                let lhs = x.log_weight(t).exp() * p(x, y);
                let rhs = y.log_weight(t).exp() * p(y, x);
                assert!((lhs - rhs).abs() <= 1e-14 * lhs.max(rhs), "{x:?} {y:?}");
                if lhs > 0.0 && x != y {
                    pairs += 1;
                }
            }
        }
        assert!(pairs > 20);
    }

    #[test]
    fn chain_is_reproducible_and_centred() {
        let a = mcmc_sample(3, 1.0, 3000, 100, 42).unwrap();
        let b = mcmc_sample(3, 1.0, 3000, 100, 42).unwrap();
        assert_eq!(a, b);
        let c = mcmc_chain(3, 1.0, 3000, 100, 42, 1).unwrap();
        assert_ne!(a, c);
        let s = mcmc_sample(3, 1.0, 60_000, 500, 5).unwrap();
        let centre: Vec<f64> = s.iter().map(|x| x.positions().iter().sum::<f64>() / 3.0).collect();
        let (m, se) = batch_means(&centre, 100);
        assert!(m.abs() < 3.0 * se + 1e-12, "{m} ± {se}");
        assert!(mcmc_sample(1, 1.0, 10, 10, 0).is_err());
    }

    #[test]
    fn empirical_frequencies_match_weights() {
        let t = 2.0;
        let s = mcmc_sample(2, t, 400_000, 100, 9).unwrap();
        let mut counts: BTreeMap<Vec<i64>, usize> = BTreeMap::new();
        for x in &s {
            *counts.entry(x.twice_scaled().to_vec()).or_default() += 1;
        }
        let cfg = CharacterSumConfig::new(2, t, 1.0).unwrap();
        let c = cfg.resolved_cutoff(0.0);
        let lat = lattice(2, c);
        let mut z = 0.0;
        for (i, &x) in lat.iter().enumerate() {
            for &y in &lat[i + 1..] {
                z += BetaEnsembleState::from_twice_scaled(vec![x, y]).unwrap().log_weight(t).exp();
            }
        }
        let ground = BetaEnsembleState::ground(2);
        let p = ground.log_weight(t).exp() / z;
        let f = counts[&ground.twice_scaled().to_vec()] as f64 / s.len() as f64;
        assert!((f - p).abs() < 0.02, "{f} vs {p}");
    }

    #[test]
    fn kolmogorov_distance_sees_a_packed_state() {
        let eq = solve_equilibrium(1.0).unwrap();
        let d = kolmogorov_distance(&[BetaEnsembleState::ground(2)], &eq).unwrap();
        assert!(d > 0.2);
    }
}
