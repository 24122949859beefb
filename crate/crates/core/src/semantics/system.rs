use thiserror::Error;

use super::lasso::{Lasso, LassoTrace};
use super::traceset::TraceSet;
use crate::machine::{names_of, MachineError, MooreSystem};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SystemTraceError {
    #[error(transparent)]
    Machine(#[from] MachineError),
    #[error("loop bound must be at least 1")]
    ZeroLoop,
}

/// Loop lengths `l <= max_loop` with no proper multiple `<= max_loop`. Every
/// lasso with loop length at most `max_loop` can be written with one of them.
pub fn maximal_loop_lengths(max_loop: usize) -> Vec<usize> {
    (1..=max_loop).filter(|l| 2 * l > max_loop).collect()
}

/// Enumerates the input lassos covering every input word with prefix
/// `<= max_prefix` and loop `<= max_loop`: prefix of exactly `max_prefix`
/// letters and loops of the lengths from [`maximal_loop_lengths`]. Letters are
/// bit sets over `inputs` input signals.
#[derive(Clone, Debug)]
pub struct InputLassos {
    letters: u64,
    prefix: usize,
    loops: Vec<usize>,
    loop_idx: usize,
    counter: u128,
    total: u128,
}

impl InputLassos {
    pub fn new(inputs: usize, max_prefix: usize, max_loop: usize) -> Result<Self, SystemTraceError> {
        if max_loop == 0 {
            return Err(SystemTraceError::ZeroLoop);
        }
        let letters = 1u64 << inputs;
        let loops = maximal_loop_lengths(max_loop);
        let mut it = InputLassos {
            letters,
            prefix: max_prefix,
            loops,
            loop_idx: 0,
            counter: 0,
            total: 0,
        };
        it.total = it.block_size(0);
        Ok(it)
    }

    fn block_size(&self, idx: usize) -> u128 {
        (self.letters as u128).pow((self.prefix + self.loops[idx]) as u32)
    }

    /// Number of lassos the iterator produces.
    pub fn count_total(&self) -> u128 {
        (0..self.loops.len()).map(|i| self.block_size(i)).sum()
    }
}

impl Iterator for InputLassos {
    type Item = Lasso<u64>;

    fn next(&mut self) -> Option<Lasso<u64>> {
        while self.counter == self.total {
            self.loop_idx += 1;
            if self.loop_idx >= self.loops.len() {
                return None;
            }
            self.counter = 0;
            self.total = self.block_size(self.loop_idx);
        }
        let mut c = self.counter;
        self.counter += 1;
        let len = self.prefix + self.loops[self.loop_idx];
        let letters = self.letters as u128;
        let mut word = Vec::with_capacity(len);
        for _ in 0..len {
            word.push((c % letters) as u64);
            c /= letters;
        }
        let cycle = word.split_off(self.prefix);
        Some(Lasso::new(word, cycle).expect("loop length >= 1"))
    }
}

/// Traces of `m` as bit-set lassos over `m.signals()`, one per enumerated input
/// lasso (duplicates are not removed).
pub fn system_trace_stream(
    m: &MooreSystem,
    max_prefix: usize,
    max_loop: usize,
) -> Result<impl Iterator<Item = Lasso<u64>> + '_, SystemTraceError> {
    m.validate()?;
    Ok(InputLassos::new(m.inputs.len(), max_prefix, max_loop)?.map(move |i| m.run(&i)))
}

pub fn bits_to_trace(t: &Lasso<u64>, signals: &[String]) -> LassoTrace {
    t.map(|&v| names_of(v, signals).into_iter().collect())
}

/// The trace set of `m` generated by input lassos with prefix `<= max_prefix`
/// and loop `<= max_loop`, canonicalized and deduplicated.
pub fn system_traces(m: &MooreSystem, max_prefix: usize, max_loop: usize) -> Result<TraceSet, SystemTraceError> {
    let signals = m.signals();
    let mut words: Vec<Lasso<u64>> = system_trace_stream(m, max_prefix, max_loop)?
        .map(|t| t.canonical())
        .collect();
    words.sort();
    words.dedup();
    Ok(TraceSet {
        traces: words.iter().map(|t| bits_to_trace(t, &signals)).collect(),
        signals,
    })
}
