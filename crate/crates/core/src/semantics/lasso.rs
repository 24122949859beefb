use std::collections::BTreeSet;

use thiserror::Error;

/// A set of signal names holding at one position.
pub type Valuation = BTreeSet<String>;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum LassoError {
    #[error("lasso loop must be nonempty")]
    EmptyLoop,
    #[error("aligned loop length {needed} exceeds the cap of {cap}")]
    AlignmentCap { needed: usize, cap: usize },
}

/// An ultimately periodic sequence `prefix · cycle^ω`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lasso<T> {
    prefix: Vec<T>,
    cycle: Vec<T>,
}

/// A lasso over valuations of named signals.
pub type LassoTrace = Lasso<Valuation>;

pub fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

impl<T: Clone> Lasso<T> {
    pub fn new(prefix: Vec<T>, cycle: Vec<T>) -> Result<Self, LassoError> {
        if cycle.is_empty() {
            return Err(LassoError::EmptyLoop);
        }
        Ok(Lasso { prefix, cycle })
    }

    /// `value^ω`
    pub fn constant(value: T) -> Self {
        Lasso {
            prefix: Vec::new(),
            cycle: vec![value],
        }
    }

    pub fn prefix(&self) -> &[T] {
        &self.prefix
    }

    pub fn cycle(&self) -> &[T] {
        &self.cycle
    }

    pub fn prefix_len(&self) -> usize {
        self.prefix.len()
    }

    pub fn cycle_len(&self) -> usize {
        self.cycle.len()
    }

    pub fn at(&self, i: usize) -> &T {
        if i < self.prefix.len() {
            &self.prefix[i]
        } else {
            &self.cycle[(i - self.prefix.len()) % self.cycle.len()]
        }
    }

    /// Same word, written with the given prefix length and a loop of length
    /// `cycle_len`. Requires `prefix_len >= self.prefix_len()` and `cycle_len`
    /// a multiple of `self.cycle_len()`.
    pub fn unrolled(&self, prefix_len: usize, cycle_len: usize) -> Self {
        assert!(prefix_len >= self.prefix.len() && cycle_len.is_multiple_of(self.cycle.len()));
        Lasso {
            prefix: (0..prefix_len).map(|i| self.at(i).clone()).collect(),
            cycle: (prefix_len..prefix_len + cycle_len)
                .map(|i| self.at(i).clone())
                .collect(),
        }
    }

    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> Lasso<U> {
        Lasso {
            prefix: self.prefix.iter().map(&mut f).collect(),
            cycle: self.cycle.iter().map(&mut f).collect(),
        }
    }

    /// Pointwise combination of two lassos on their common alignment.
    pub fn zip_with<U: Clone, V>(
        &self,
        other: &Lasso<U>,
        cap: usize,
        mut f: impl FnMut(&T, &U) -> V,
    ) -> Result<Lasso<V>, LassoError> {
        let p = self.prefix.len().max(other.prefix.len());
        let l = lcm(self.cycle.len(), other.cycle.len());
        if l > cap {
            return Err(LassoError::AlignmentCap { needed: l, cap });
        }
        Ok(Lasso {
            prefix: (0..p).map(|i| f(self.at(i), other.at(i))).collect(),
            cycle: (p..p + l).map(|i| f(self.at(i), other.at(i))).collect(),
        })
    }
}

impl<T: Clone + PartialEq> Lasso<T> {
    /// Shortest representation: primitive loop, prefix rolled back as far as possible.
    pub fn canonical(&self) -> Self {
        let n = self.cycle.len();
        let period = (1..=n)
            .find(|&d| n.is_multiple_of(d) && (d..n).all(|i| self.cycle[i] == self.cycle[i - d]))
            .unwrap_or(n);
        let mut prefix = self.prefix.clone();
        let mut cycle: Vec<T> = self.cycle[..period].to_vec();
        while let Some(last) = prefix.last() {
            if *last != cycle[period - 1] {
                break;
            }
            let v = prefix.pop().unwrap();
            cycle.pop();
            cycle.insert(0, v);
        }
        Lasso { prefix, cycle }
    }

    /// Equality of the denoted infinite words.
    pub fn same_word(&self, other: &Self) -> bool {
        let p = self.prefix.len().max(other.prefix.len());
        let l = lcm(self.cycle.len(), other.cycle.len());
        (0..p + l).all(|i| self.at(i) == other.at(i))
    }
}

impl LassoTrace {
    /// Builds a lasso from per-position lists of signal names.
    pub fn from_names(prefix: &[&[&str]], cycle: &[&[&str]]) -> Result<Self, LassoError> {
        let conv = |vals: &[&[&str]]| -> Vec<Valuation> {
            vals.iter().map(|v| v.iter().map(|s| s.to_string()).collect()).collect()
        };
        Lasso::new(conv(prefix), conv(cycle))
    }

    /// Signals occurring anywhere on the trace.
    pub fn signals(&self) -> BTreeSet<String> {
        self.prefix
            .iter()
            .chain(&self.cycle)
            .flat_map(|v| v.iter().cloned())
            .collect()
    }
}

/// Overwrites signal `q` of `t` with the `q`-sequence of `tq`; all other signals
/// are taken from `t`.
pub fn replace(t: &LassoTrace, q: &str, tq: &LassoTrace, cap: usize) -> Result<LassoTrace, LassoError> {
    t.zip_with(tq, cap, |a, b| {
        let mut v: Valuation = a.iter().filter(|s| *s != q).cloned().collect();
        if b.contains(q) {
            v.insert(q.to_string());
        }
        v
    })
}
