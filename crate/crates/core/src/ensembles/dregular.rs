//! Random d-regular graphs: pairing model, double-edge-swap repair of loops and
//! multi-edges, then randomizing swaps. Approximately uniform.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::rng::Rng;

const RESTARTS: usize = 20;

struct Multigraph {
    edges: Vec<(usize, usize)>,
    count: HashMap<(usize, usize), usize>,
}

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl Multigraph {
    fn new(edges: Vec<(usize, usize)>) -> Self {
        let mut count = HashMap::with_capacity(edges.len());
        for &(a, b) in &edges {
            *count.entry(key(a, b)).or_insert(0) += 1;
        }
        Self { edges, count }
    }

    fn is_bad(&self, k: usize) -> bool {
        let (a, b) = self.edges[k];
        a == b || self.count[&key(a, b)] > 1
    }

    fn first_bad(&self) -> Option<usize> {
        (0..self.edges.len()).find(|&k| self.is_bad(k))
    }

    fn present(&self, a: usize, b: usize) -> bool {
        self.count.get(&key(a, b)).is_some_and(|&c| c > 0)
    }

    fn remove(&mut self, a: usize, b: usize) {
        let c = self.count.get_mut(&key(a, b)).expect("edge present");
        *c -= 1;
        if *c == 0 {
            self.count.remove(&key(a, b));
        }
    }

    /// Replaces edges `i, j` by a rewiring of their endpoints when the result
    /// has no loop and no repeated edge. Returns whether the swap happened.
    fn try_swap(&mut self, i: usize, j: usize, cross: bool) -> bool {
        if i == j {
            return false;
        }
        let (a, b) = self.edges[i];
        let (c, d) = self.edges[j];
        let (e1, e2) = if cross { ((a, c), (b, d)) } else { ((a, d), (b, c)) };
        if e1.0 == e1.1 || e2.0 == e2.1 || key(e1.0, e1.1) == key(e2.0, e2.1) {
            return false;
        }
        self.remove(a, b);
        self.remove(c, d);
        if self.present(e1.0, e1.1) || self.present(e2.0, e2.1) {
            *self.count.entry(key(a, b)).or_insert(0) += 1;
            *self.count.entry(key(c, d)).or_insert(0) += 1;
            return false;
        }
        *self.count.entry(key(e1.0, e1.1)).or_insert(0) += 1;
        *self.count.entry(key(e2.0, e2.1)).or_insert(0) += 1;
        self.edges[i] = e1;
        self.edges[j] = e2;
        true
    }
}

/// Edge list of a simple `d`-regular graph on `n` vertices.
pub(crate) fn dregular_edges(n: usize, d: usize, rng: &mut Rng) -> Result<Vec<(usize, usize)>> {
    if !(d > 0 && d < n) || (n * d) % 2 != 0 {
        return Err(Error::spec(format!("d-regular needs 0 < d < N and N·d even, got N={n}, d={d}")));
    }
    let m = n * d / 2;
    for _ in 0..RESTARTS {
        let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
        stubs.shuffle(rng);
        let mut g = Multigraph::new(stubs.chunks(2).map(|c| (c[0], c[1])).collect());
        let mut budget = 50 * n * d + 1000;
        let mut ok = true;
        while let Some(k) = g.first_bad() {
            if budget == 0 {
                ok = false;
                break;
            }
            budget -= 1;
            let other = rng.random_range(0..m);
            let cross = rng.random::<bool>();
            g.try_swap(k, other, cross);
        }
        if !ok {
            continue;
        }
        for _ in 0..10 * n * d {
            let i = rng.random_range(0..m);
            let j = rng.random_range(0..m);
            let cross = rng.random::<bool>();
            g.try_swap(i, j, cross);
        }
        return Ok(g.edges);
    }
    Err(Error::DRegularGenerationFailure { n, d, attempts: RESTARTS })
}
