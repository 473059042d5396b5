//! The countdown game bounding lazy heap reinsertions.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("turn {turn}: {reason}")]
    IllegalMove { turn: usize, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BobStrategy {
    /// Uniform `c`, values scattered over random indices.
    Random,
    /// One index set to 1 each turn, cycling through the indices.
    GreedySingle,
    /// `c = ⌈√n⌉`, with `1..=c` placed on the indices holding the largest values.
    FrontLoaded,
}

impl std::str::FromStr for BobStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "random" => Ok(BobStrategy::Random),
            "greedy" | "greedy-single" => Ok(BobStrategy::GreedySingle),
            "front" | "front-loaded" => Ok(BobStrategy::FrontLoaded),
            _ => Err(format!("unknown strategy `{s}`")),
        }
    }
}

/// Plays `n` turns. `None` stands for `∞`. Each turn Alice lowers every
/// finite value by one and pays for each that hits zero; then `bob(turn, a)`
/// answers with a move `b`, which must be `(1, …, c, ∞, …)` up to order.
pub fn game_play<F>(n: usize, mut bob: F) -> Result<u64, GameError>
where
    F: FnMut(usize, &[Option<u32>]) -> Vec<Option<u32>>,
{
    let mut a: Vec<Option<u32>> = vec![None; n];
    let mut dollars = 0u64;
    for turn in 0..n {
        for x in a.iter_mut() {
            if let Some(v) = x {
                *v -= 1;
                if *v == 0 {
                    dollars += 1;
                    *x = None;
                }
            }
        }
        let b = bob(turn, &a);
        check_move(n, turn, &b)?;
        for (x, y) in a.iter_mut().zip(&b) {
            if let Some(y) = y {
                if x.is_none_or(|v| *y < v) {
                    *x = Some(*y);
                }
            }
        }
    }
    Ok(dollars)
}

fn check_move(n: usize, turn: usize, b: &[Option<u32>]) -> Result<(), GameError> {
    let bad = |reason: String| GameError::IllegalMove { turn, reason };
    if b.len() != n {
        return Err(bad(format!("move has {} entries, expected {n}", b.len())));
    }
    let mut finite: Vec<u32> = b.iter().flatten().copied().collect();
    finite.sort_unstable();
    if finite.is_empty() {
        return Err(bad("move needs c >= 1".into()));
    }
    if finite.iter().enumerate().any(|(i, &x)| x != i as u32 + 1) {
        return Err(bad(format!("finite values {finite:?} are not 1..=c")));
    }
    Ok(())
}

pub fn game_simulate(n: usize, strategy: BobStrategy, seed: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let root = ((n as f64).sqrt().ceil() as usize).clamp(1, n.max(1));
    game_play(n, |turn, a| {
        let mut b = vec![None; n];
        match strategy {
            BobStrategy::Random => {
                let c = rng.gen_range(1..=n);
                let mut idx: Vec<usize> = (0..n).collect();
                idx.shuffle(&mut rng);
                for (i, &j) in idx.iter().take(c).enumerate() {
                    b[j] = Some(i as u32 + 1);
                }
            }
            BobStrategy::GreedySingle => b[turn % n] = Some(1),
            BobStrategy::FrontLoaded => {
                let mut idx: Vec<usize> = (0..n).collect();
                // ∞ first, then larger finite values, then lower index
                idx.sort_by_key(|&i| (a[i].map_or(0, |v| u64::MAX - v as u64), i));
                for (i, &j) in idx.iter().take(root).enumerate() {
                    b[j] = Some(i as u32 + 1);
                }
            }
        }
        b
    })
    .expect("built-in strategies play legal moves")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn greedy_single_pays_every_turn_but_the_first() {
        assert_eq!(game_simulate(10, BobStrategy::GreedySingle, 0), 9);
    }

    #[test]
    fn bounds() {
        for st in [BobStrategy::Random, BobStrategy::GreedySingle, BobStrategy::FrontLoaded] {
            assert!(game_simulate(1, st, 3) <= 2);
            assert!(game_simulate(100, st, 3) <= 2000);
        }
    }

    #[test]
    fn illegal_moves() {
        let r = game_play(3, |_, _| vec![Some(2), None, None]);
        assert!(matches!(r, Err(GameError::IllegalMove { turn: 0, .. })));
        let r = game_play(3, |_, _| vec![None, None, None]);
        assert!(r.is_err());
        let r = game_play(3, |_, _| vec![Some(1), Some(1), None]);
        assert!(r.is_err());
    }
}
