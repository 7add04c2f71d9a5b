//! Permutations of spectral labels.
//!
//! A permutation maps a label at one end of a step (or loop) to the label at
//! the other end. `a.then(&b)` is "first a, then b", i.e. `b ∘ a`.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    /// `images[j]` is the image of label `j` (0-based). `None` if not a bijection.
    pub fn from_images(images: Vec<usize>) -> Option<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return None;
            }
            seen[i] = true;
        }
        Some(Self(images))
    }

    /// Builds a permutation of `n` labels from 1-based cycles.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Option<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        for cyc in cycles {
            for (k, &a) in cyc.iter().enumerate() {
                let b = cyc[(k + 1) % cyc.len()];
                if a == 0 || b == 0 || a > n || b > n {
                    return None;
                }
                images[a - 1] = b - 1;
            }
        }
        Self::from_images(images)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, j: usize) -> usize {
        self.0[j]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(j, &i)| i == j)
    }

    /// First `self`, then `next`.
    pub fn then(&self, next: &Permutation) -> Permutation {
        assert_eq!(self.len(), next.len());
        Self(self.0.iter().map(|&i| next.0[i]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (j, &i) in self.0.iter().enumerate() {
            inv[i] = j;
        }
        Self(inv)
    }

    pub fn pow(&self, k: usize) -> Permutation {
        let mut out = Self::identity(self.len());
        for _ in 0..k {
            out = out.then(self);
        }
        out
    }

    /// Cycles as 0-based label lists, each starting at its smallest element, fixed points included.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cyc = vec![start];
            seen[start] = true;
            let mut j = self.0[start];
            while j != start {
                seen[j] = true;
                cyc.push(j);
                j = self.0[j];
            }
            out.push(cyc);
        }
        out
    }

    /// Minimal k ≥ 1 with σ^k(j) = j, per label.
    pub fn periods(&self) -> Vec<usize> {
        let mut p = vec![1; self.len()];
        for cyc in self.cycles() {
            for &j in &cyc {
                p[j] = cyc.len();
            }
        }
        p
    }

    pub fn order(&self) -> usize {
        self.cycles().iter().map(|c| c.len()).fold(1, lcm)
    }

    /// 1-based cycle notation; `id` for the identity.
    pub fn cycle_notation(&self) -> String {
        self.to_string()
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "id");
        }
        for cyc in self.cycles() {
            let body: Vec<String> = cyc.iter().map(|j| (j + 1).to_string()).collect();
            write!(f, "({})", body.join(" "))?;
        }
        Ok(())
    }
}

/// Closure of the subgroup of 𝔖_n generated by `gens` (breadth-first).
pub fn generate_group(n: usize, gens: &[Permutation]) -> BTreeSet<Permutation> {
    let mut group = BTreeSet::new();
    let id = Permutation::identity(n);
    group.insert(id.clone());
    let mut queue = VecDeque::from([id]);
    while let Some(g) = queue.pop_front() {
        for s in gens {
            let h = g.then(s);
            if group.insert(h.clone()) {
                queue.push_back(h);
            }
        }
    }
    group
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn notation() {
        assert_eq!(Permutation::identity(3).to_string(), "id");
        let t = Permutation::from_cycles(2, &[&[1, 2]]).unwrap();
        assert_eq!(t.to_string(), "(1 2)");
        let s = Permutation::from_cycles(3, &[&[2, 3]]).unwrap();
        assert_eq!(s.to_string(), "(1)(2 3)");
        assert_eq!(s.periods(), vec![1, 2, 2]);
    }

    #[test]
    fn three_cycle() {
        let c = Permutation::from_cycles(3, &[&[1, 2, 3]]).unwrap();
        assert_eq!(c.periods(), vec![3, 3, 3]);
        assert!(c.pow(3).is_identity());
        assert!(!c.pow(2).is_identity());
        assert_eq!(generate_group(3, &[c]).len(), 3);
    }

    #[test]
    fn composition_convention() {
        let a = Permutation::from_cycles(3, &[&[1, 2]]).unwrap();
        let b = Permutation::from_cycles(3, &[&[2, 3]]).unwrap();
        // label 1 --a--> 2 --b--> 3
        assert_eq!(a.then(&b).apply(0), 2);
        assert_eq!(generate_group(3, &[a, b]).len(), 6);
    }
}
