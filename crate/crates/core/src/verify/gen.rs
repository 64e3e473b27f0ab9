//! Graph streams for the verification suite.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dag::Dag;
use crate::structure::has_active_cycle;

use super::VerifyError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GenMode {
    /// Every labeled DAG on `n` nodes.
    Exhaustive { n: usize },
    /// `count` DAGs: a random node order, then each pair joined with
    /// probability `p`, oriented along the order.
    Random {
        n: usize,
        p: f64,
        seed: u64,
        count: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub mode: GenMode,
    pub require_no_active_cycle: bool,
}

impl GenSpec {
    pub fn exhaustive(n: usize) -> GenSpec {
        GenSpec {
            mode: GenMode::Exhaustive { n },
            require_no_active_cycle: false,
        }
    }

    pub fn random(n: usize, p: f64, seed: u64, count: usize) -> GenSpec {
        GenSpec {
            mode: GenMode::Random { n, p, seed, count },
            require_no_active_cycle: false,
        }
    }

    pub fn without_active_cycles(mut self) -> GenSpec {
        self.require_no_active_cycle = true;
        self
    }

    fn validate(&self) -> Result<(), VerifyError> {
        let n = match self.mode {
            GenMode::Exhaustive { n } => n,
            GenMode::Random { n, p, .. } => {
                if !(0.0..=1.0).contains(&p) {
                    return Err(VerifyError::InvalidSpec(format!("p = {p} is not in [0, 1]")));
                }
                n
            }
        };
        if n == 0 {
            return Err(VerifyError::InvalidSpec("n must be at least 1".into()));
        }
        if let GenMode::Exhaustive { n } = self.mode {
            // 3^(n(n-1)/2) orientation maps must fit in a u64 counter
            if n * (n - 1) / 2 > 40 {
                return Err(VerifyError::InvalidSpec(format!("exhaustive n = {n} is too large")));
            }
        }
        Ok(())
    }
}

/// The graphs described by `spec`, in a deterministic order.
pub fn generate(spec: &GenSpec) -> Result<Box<dyn Iterator<Item = Dag> + Send>, VerifyError> {
    spec.validate()?;
    let stream: Box<dyn Iterator<Item = Dag> + Send> = match spec.mode {
        GenMode::Exhaustive { n } => Box::new(Exhaustive::new(n)),
        GenMode::Random { n, p, seed, count } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Box::new((0..count).map(move |_| random_dag(&mut rng, n, p)))
        }
    };
    Ok(if spec.require_no_active_cycle {
        Box::new(stream.filter(|d| !has_active_cycle(d)))
    } else {
        stream
    })
}

fn random_dag(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Dag {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut arcs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                arcs.push((order[i], order[j]));
            }
        }
    }
    Dag::new(n, &arcs, None).expect("arcs follow a total order")
}

/// Base-3 counter over the unordered pairs `{i < j}` in lexicographic
/// order, the first pair being the least significant digit: 0 = no arc,
/// 1 = `i -> j`, 2 = `j -> i`. Cyclic assignments are dropped.
struct Exhaustive {
    n: usize,
    pairs: Vec<(usize, usize)>,
    next: u64,
    end: u64,
}

impl Exhaustive {
    fn new(n: usize) -> Exhaustive {
        let pairs: Vec<(usize, usize)> =
            (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        Exhaustive {
            n,
            end: 3u64.pow(pairs.len() as u32),
            pairs,
            next: 0,
        }
    }
}

impl Iterator for Exhaustive {
    type Item = Dag;

    fn next(&mut self) -> Option<Dag> {
        while self.next < self.end {
            let mut code = self.next;
            self.next += 1;
            let mut arcs = Vec::new();
            for &(i, j) in &self.pairs {
                match code % 3 {
                    1 => arcs.push((i, j)),
                    2 => arcs.push((j, i)),
                    _ => {}
                }
                code /= 3;
            }
            if let Ok(d) = Dag::new(self.n, &arcs, None) {
                return Some(d);
            }
        }
        None
    }
}
