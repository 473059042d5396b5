use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{GraphError, PriceFunction, WeightedDigraph};
use crate::ratnum::{BigRational, Integer};

/// Distribution of edge weights for [`gen_random`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightClass {
    /// Integers in `0..=max`.
    Integer { max: u64 },
    /// `a / b` with `a` in `0..=max_num`, `b` in `1..=max_den`.
    Rational { max_num: u64, max_den: u64 },
    /// Non-negative fractions that are 1-short for a `bits`-bit word.
    Word { bits: u32 },
}

impl WeightClass {
    fn validate(&self) -> Result<(), GraphError> {
        let ok = match *self {
            WeightClass::Integer { .. } => true,
            WeightClass::Rational { max_den, .. } => max_den >= 1,
            WeightClass::Word { bits } => (2..=64).contains(&bits),
        };
        if ok {
            Ok(())
        } else {
            Err(GraphError::BadParameters(format!("weight class {self:?}")))
        }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> BigRational {
        match *self {
            WeightClass::Integer { max } => BigRational::from_integer(rng.gen_range(0..=max)),
            WeightClass::Rational { max_num, max_den } => {
                BigRational::new(rng.gen_range(0..=max_num), rng.gen_range(1..=max_den)).unwrap()
            }
            WeightClass::Word { bits } => {
                let lim = 1u64 << (bits - 1);
                BigRational::new(rng.gen_range(0..lim), rng.gen_range(1..lim)).unwrap()
            }
        }
    }

    /// Same magnitude distribution with a random sign.
    pub fn sample_signed<R: Rng>(&self, rng: &mut R) -> BigRational {
        let x = self.sample(rng);
        if rng.gen_bool(0.5) {
            -x
        } else {
            x
        }
    }

    /// Smallest positive value the class produces.
    fn unit(&self) -> BigRational {
        match *self {
            WeightClass::Integer { .. } => BigRational::one(),
            WeightClass::Rational { max_den, .. } => BigRational::new(1, max_den).unwrap(),
            WeightClass::Word { bits } => BigRational::new(1, (1u64 << (bits - 1)) - 1).unwrap(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NegativeMode {
    None,
    /// Reweight a non-negative graph by a random potential: negative edges
    /// appear but every cycle keeps its non-negative weight.
    Priced,
}

fn sample_pairs<R: Rng>(n: usize, m: usize, rng: &mut R) -> Vec<(usize, usize)> {
    let total = n * n.saturating_sub(1);
    if 2 * m > total {
        let mut all: Vec<(usize, usize)> =
            (0..n).flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v))).collect();
        all.shuffle(rng);
        all.truncate(m);
        all
    } else {
        let mut seen = HashSet::with_capacity(m);
        let mut out = Vec::with_capacity(m);
        while out.len() < m {
            let u = rng.gen_range(0..n);
            let v = rng.gen_range(0..n);
            if u != v && seen.insert((u, v)) {
                out.push((u, v));
            }
        }
        out
    }
}

fn random_with_prices(
    n: usize,
    m: usize,
    seed: u64,
    class: WeightClass,
    mode: NegativeMode,
) -> Result<(WeightedDigraph, PriceFunction), GraphError> {
    class.validate()?;
    if m > n * n.saturating_sub(1) {
        return Err(GraphError::BadParameters(format!("m = {m} exceeds n(n-1) for n = {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs = sample_pairs(n, m, &mut rng);
    let prices = match mode {
        NegativeMode::None => PriceFunction::zero(n),
        NegativeMode::Priced => PriceFunction((0..n).map(|_| class.sample_signed(&mut rng)).collect()),
    };
    let mut g = WeightedDigraph::new(n);
    for (u, v) in pairs {
        let w = class.sample(&mut rng) + &prices.0[u] - &prices.0[v];
        g.add_edge(u, v, w)?;
    }
    if n > 0 {
        g.set_source(0)?;
    }
    Ok((g, prices))
}

/// Random simple digraph with `m` distinct non-loop edges and source 0,
/// a pure function of its arguments.
pub fn gen_random(
    n: usize,
    m: usize,
    seed: u64,
    class: WeightClass,
    mode: NegativeMode,
) -> Result<WeightedDigraph, GraphError> {
    random_with_prices(n, m, seed, class, mode).map(|(g, _)| g)
}

/// A priced random graph plus a cycle of `cycle_len` vertices whose weight
/// is negative, reachable from source 0.
pub fn gen_planted_negative_cycle(
    n: usize,
    m: usize,
    seed: u64,
    class: WeightClass,
    cycle_len: usize,
) -> Result<WeightedDigraph, GraphError> {
    if cycle_len == 0 || cycle_len > n {
        return Err(GraphError::BadParameters(format!("cycle length {cycle_len} for n = {n}")));
    }
    let (mut g, p) = random_with_prices(n, m, seed, class, NegativeMode::Priced)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut verts: Vec<usize> = (0..n).collect();
    verts.shuffle(&mut rng);
    verts.truncate(cycle_len);
    if verts[0] != 0 {
        let w = class.sample(&mut rng) + p.get(0) - p.get(verts[0]);
        g.add_edge(0, verts[0], w)?;
    }
    let mut xs: Vec<BigRational> = (0..cycle_len - 1).map(|_| class.sample(&mut rng)).collect();
    let total: BigRational = xs.iter().cloned().sum();
    xs.push(-(total + class.unit()));
    for i in 0..cycle_len {
        let (a, b) = (verts[i], verts[(i + 1) % cycle_len]);
        g.add_edge(a, b, &xs[i] + p.get(a) - p.get(b))?;
    }
    Ok(g)
}

/// One two-path gadget: the light and heavy path carry the reciprocal sums
/// of two prime sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gadget {
    pub light_primes: Vec<u64>,
    pub heavy_primes: Vec<u64>,
    pub light: BigRational,
    pub heavy: BigRational,
    /// Vertices of the light path, both ends included.
    pub light_path: Vec<usize>,
}

impl Gadget {
    pub fn gap(&self) -> BigRational {
        &self.heavy - &self.light
    }
}

#[derive(Debug, Clone)]
pub struct SmallDiff {
    pub graph: WeightedDigraph,
    pub source: usize,
    pub target: usize,
    pub gadgets: Vec<Gadget>,
}

impl SmallDiff {
    /// Exact `δ(source, target)`.
    pub fn distance(&self) -> BigRational {
        self.gadgets.iter().map(|g| g.light.clone()).sum()
    }

    pub fn gap(&self) -> BigRational {
        self.gadgets.iter().map(Gadget::gap).min().expect("at least one gadget")
    }
}

fn is_prime(x: u64) -> bool {
    x >= 2 && (2..).take_while(|d| d * d <= x).all(|d| !x.is_multiple_of(d))
}

const MAX_PRIMES: usize = 22;

/// The two closest distinct subset sums of `1/p` over `primes`.
fn closest_subsets(primes: &[u64]) -> (Vec<u64>, Vec<u64>) {
    let k = primes.len();
    let lcm: Integer = primes.iter().fold(Integer::from(1), |a, &p| a * p);
    let parts: Vec<Integer> = primes.iter().map(|&p| Integer::from(&lcm / p)).collect();
    let mut sums: Vec<Integer> = Vec::with_capacity(1 << k);
    sums.push(Integer::new());
    for mask in 1usize..(1 << k) {
        let low = mask.trailing_zeros() as usize;
        let v = Integer::from(&sums[mask & (mask - 1)] + &parts[low]);
        sums.push(v);
    }
    let mut idx: Vec<usize> = (0..sums.len()).collect();
    idx.sort_by(|&a, &b| sums[a].cmp(&sums[b]).then(a.cmp(&b)));
    let mut best: Option<(Integer, usize, usize)> = None;
    for w in idx.windows(2) {
        let d = Integer::from(&sums[w[1]] - &sums[w[0]]);
        if d > 0 && best.as_ref().is_none_or(|(b, _, _)| d < *b) {
            best = Some((d, w[0], w[1]));
        }
    }
    let (_, lo, hi) = best.expect("two distinct subsets");
    let pick = |mask: usize| (0..k).filter(|i| mask >> i & 1 == 1).map(|i| primes[i]).collect();
    (pick(lo), pick(hi))
}

fn recip_sum(ps: &[u64]) -> BigRational {
    ps.iter().map(|&p| BigRational::new(1, p).unwrap()).sum()
}

fn add_path(g: &mut WeightedDigraph, from: usize, to: usize, weights: &[BigRational], next: &mut usize) -> Vec<usize> {
    let mut path = vec![from];
    for (i, w) in weights.iter().enumerate() {
        let v = if i + 1 == weights.len() {
            to
        } else {
            *next += 1;
            *next - 1
        };
        g.add_edge(*path.last().unwrap(), v, w.clone()).expect("vertex in range");
        path.push(v);
    }
    path
}

fn hop_weights(ps: &[u64], hops: usize) -> Vec<BigRational> {
    let mut w: Vec<BigRational> = ps.iter().map(|&p| BigRational::new(1, p).unwrap()).collect();
    w.resize(hops, BigRational::zero());
    w
}

/// Two `s -> t` paths weighted by the closest pair of distinct subset sums
/// of `1/p` over the primes below `prime_bound`.
pub fn gen_small_diff(prime_bound: u64, padding: bool) -> Result<SmallDiff, GraphError> {
    gen_small_diff_chain(prime_bound, padding, 1, false)
}

/// `copies` gadgets in series. With `fresh_primes`, gadget `i` uses the
/// `i`-th block of as many primes as lie below `prime_bound`, so exact
/// distances accumulate ever larger denominators.
pub fn gen_small_diff_chain(
    prime_bound: u64,
    padding: bool,
    copies: usize,
    fresh_primes: bool,
) -> Result<SmallDiff, GraphError> {
    if prime_bound < 3 || copies == 0 {
        return Err(GraphError::BadParameters(format!(
            "prime bound {prime_bound} with {copies} copies yields no two distinct subsets"
        )));
    }
    let base: Vec<u64> = (2..prime_bound).filter(|&x| is_prime(x)).collect();
    if base.len() > MAX_PRIMES {
        return Err(GraphError::BadParameters(format!("{} primes is too many to enumerate", base.len())));
    }
    let mut blocks = vec![base.clone()];
    if fresh_primes {
        let mut x = *base.last().unwrap();
        for _ in 1..copies {
            let mut block = Vec::with_capacity(base.len());
            while block.len() < base.len() {
                x += 1;
                if is_prime(x) {
                    block.push(x);
                }
            }
            blocks.push(block);
        }
    }
    let mut plans = Vec::with_capacity(copies);
    for i in 0..copies {
        let primes = &blocks[if fresh_primes { i } else { 0 }];
        if i == 0 || fresh_primes {
            let (a, b) = closest_subsets(primes);
            plans.push((a, b));
        } else {
            plans.push(plans[0].clone());
        }
    }
    let hops = |a: &[u64], b: &[u64]| {
        let (ha, hb) = (a.len().max(2), b.len().max(2));
        if padding {
            (ha.max(hb), ha.max(hb))
        } else {
            (ha, hb)
        }
    };
    let n: usize = 1 + plans
        .iter()
        .map(|(a, b)| {
            let (ha, hb) = hops(a, b);
            ha + hb - 1
        })
        .sum::<usize>();
    let mut g = WeightedDigraph::new(n);
    let mut next = 1usize;
    let mut s = 0usize;
    let mut gadgets = Vec::with_capacity(copies);
    for (a, b) in plans {
        let (ha, hb) = hops(&a, &b);
        let t = next;
        next += 1;
        let light_path = add_path(&mut g, s, t, &hop_weights(&a, ha), &mut next);
        add_path(&mut g, s, t, &hop_weights(&b, hb), &mut next);
        gadgets.push(Gadget { light: recip_sum(&a), heavy: recip_sum(&b), light_primes: a, heavy_primes: b, light_path });
        s = t;
    }
    debug_assert_eq!(next, n);
    g.set_source(0)?;
    Ok(SmallDiff { graph: g, source: 0, target: s, gadgets })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::bf_exact;
    use crate::ratnum::rat;

    #[test]
    fn gadget_bound_six() {
        let sd = gen_small_diff(6, true).unwrap();
        let gd = &sd.gadgets[0];
        assert_eq!(gd.light_primes, vec![2]);
        assert_eq!(gd.heavy_primes, vec![3, 5]);
        assert_eq!((gd.light.clone(), gd.heavy.clone()), (rat(1, 2), rat(8, 15)));
        assert_eq!(sd.gap(), rat(1, 30));
        let d = bf_exact(&sd.graph, 0, None);
        assert_eq!(d.distances().unwrap()[sd.target], Some(rat(1, 2)));
    }

    #[test]
    fn gadget_bound_three() {
        let sd = gen_small_diff(3, false).unwrap();
        assert_eq!(sd.gadgets[0].light, rat(0, 1));
        assert_eq!(sd.gadgets[0].heavy, rat(1, 2));
        assert!(gen_small_diff(2, false).is_err());
    }

    #[test]
    fn chained_fresh_primes() {
        let sd = gen_small_diff_chain(8, true, 3, true).unwrap();
        assert_eq!(sd.gadgets[1].light_primes.iter().chain(&sd.gadgets[1].heavy_primes).all(|p| *p > 7), true);
        let d = bf_exact(&sd.graph, 0, None);
        assert_eq!(d.distances().unwrap()[sd.target], Some(sd.distance()));
    }

    #[test]
    fn random_determinism_and_shape() {
        let c = WeightClass::Rational { max_num: 9, max_den: 4 };
        let a = gen_random(30, 100, 7, c, NegativeMode::Priced).unwrap();
        let b = gen_random(30, 100, 7, c, NegativeMode::Priced).unwrap();
        assert_eq!(a.edges(), b.edges());
        assert_eq!(a.m(), 100);
        assert_eq!(gen_random(5, 0, 1, c, NegativeMode::None).unwrap().m(), 0);
        assert!(gen_random(3, 7, 1, c, NegativeMode::None).is_err());
        assert_eq!(gen_random(4, 12, 1, c, NegativeMode::None).unwrap().m(), 12);
    }

    #[test]
    fn planted_cycle_is_found() {
        let c = WeightClass::Rational { max_num: 9, max_den: 4 };
        for seed in 0..20 {
            let g = gen_planted_negative_cycle(12, 30, seed, c, 4).unwrap();
            assert!(bf_exact(&g, 0, None).distances().is_none(), "seed {seed}");
        }
    }
}
