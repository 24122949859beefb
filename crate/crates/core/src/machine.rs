//! Finite-state implementations: Moore systems and autonomous witness generators.
//!
//! Valuations are bit sets: bit `k` of an input valuation is `inputs[k]`, bit
//! `k` of an output valuation is `outputs[k]`.

use std::fmt::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::semantics::Lasso;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum MachineError {
    #[error("machine has no states")]
    NoStates,
    #[error("initial state {0} out of range")]
    BadInitial(usize),
    #[error("state {state}: expected {expected} successors (one per input valuation), found {found}")]
    Incomplete {
        state: usize,
        expected: usize,
        found: usize,
    },
    #[error("state {state}: successor {target} out of range")]
    BadTarget { state: usize, target: usize },
    #[error("state {state}: unknown signal {signal}")]
    UnknownSignal { state: usize, signal: String },
    #[error("too many signals ({0}); at most 16 inputs and 64 outputs are supported")]
    TooManySignals(usize),
    #[error("generator loop target {0} out of range")]
    BadLoop(usize),
    #[error("invalid machine file: {0}")]
    Format(String),
}

/// A deterministic, complete Moore machine. Outputs are attached to states, so
/// the valuation at step `i` is the label of the current state together with
/// the `i`-th input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MooreSystem {
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub initial: usize,
    /// `next[s][v]`: successor of state `s` under input valuation `v`.
    pub next: Vec<Vec<usize>>,
    /// Output valuation of each state.
    pub labels: Vec<u64>,
}

impl MooreSystem {
    pub fn new(
        inputs: Vec<String>,
        outputs: Vec<String>,
        initial: usize,
        next: Vec<Vec<usize>>,
        labels: Vec<u64>,
    ) -> Result<Self, MachineError> {
        let m = MooreSystem {
            inputs,
            outputs,
            initial,
            next,
            labels,
        };
        m.validate()?;
        Ok(m)
    }

    /// A one-state machine emitting `label` forever.
    pub fn constant(inputs: Vec<String>, outputs: Vec<String>, label: u64) -> Self {
        let width = 1usize << inputs.len();
        MooreSystem {
            inputs,
            outputs,
            initial: 0,
            next: vec![vec![0; width]],
            labels: vec![label],
        }
    }

    pub fn validate(&self) -> Result<(), MachineError> {
        if self.inputs.len() > 16 || self.outputs.len() > 64 {
            return Err(MachineError::TooManySignals(self.inputs.len() + self.outputs.len()));
        }
        let n = self.next.len();
        if n == 0 {
            return Err(MachineError::NoStates);
        }
        if self.initial >= n {
            return Err(MachineError::BadInitial(self.initial));
        }
        if self.labels.len() != n {
            return Err(MachineError::Format(format!(
                "{} labels for {n} states",
                self.labels.len()
            )));
        }
        let width = self.input_valuations();
        for (s, row) in self.next.iter().enumerate() {
            if row.len() != width {
                return Err(MachineError::Incomplete {
                    state: s,
                    expected: width,
                    found: row.len(),
                });
            }
            if let Some(&t) = row.iter().find(|&&t| t >= n) {
                return Err(MachineError::BadTarget { state: s, target: t });
            }
        }
        Ok(())
    }

    pub fn states(&self) -> usize {
        self.next.len()
    }

    /// Number of input valuations, `2^|inputs|`.
    pub fn input_valuations(&self) -> usize {
        1usize << self.inputs.len()
    }

    pub fn step(&self, state: usize, input: usize) -> usize {
        self.next[state][input]
    }

    /// Signal names of a trace: inputs followed by outputs.
    pub fn signals(&self) -> Vec<String> {
        self.inputs.iter().chain(&self.outputs).cloned().collect()
    }

    /// The trace produced by an input lasso, as bit sets over [`Self::signals`].
    pub fn run(&self, input: &Lasso<u64>) -> Lasso<u64> {
        let ni = self.inputs.len();
        let mut state = self.initial;
        let mut word = Vec::new();
        for &i in input.prefix() {
            word.push(i | (self.labels[state] << ni));
            state = self.step(state, i as usize);
        }
        let p = word.len();
        // Run whole rounds of the input loop until a round starts in a state seen before.
        let mut starts = vec![state];
        loop {
            for &i in input.cycle() {
                word.push(i | (self.labels[state] << ni));
                state = self.step(state, i as usize);
            }
            if let Some(k) = starts.iter().position(|&s| s == state) {
                let c = input.cycle_len();
                let cycle = word.split_off(p + k * c);
                return Lasso::new(word, cycle).expect("nonempty loop");
            }
            starts.push(state);
        }
    }

    /// States reachable from the initial state.
    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.states()];
        let mut stack = vec![self.initial];
        seen[self.initial] = true;
        while let Some(s) = stack.pop() {
            for &t in &self.next[s] {
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        seen
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self, MachineError> {
        let file: SystemFile = serde_json::from_str(text).map_err(|e| MachineError::Format(e.to_string()))?;
        Self::from_file(&file)
    }

    fn to_file(&self) -> SystemFile {
        SystemFile {
            inputs: self.inputs.clone(),
            outputs: self.outputs.clone(),
            initial: self.initial,
            states: (0..self.states())
                .map(|s| StateEntry {
                    label: names_of(self.labels[s], &self.outputs),
                    next: self.next[s].clone(),
                })
                .collect(),
        }
    }

    fn from_file(f: &SystemFile) -> Result<Self, MachineError> {
        let labels = f
            .states
            .iter()
            .enumerate()
            .map(|(s, e)| bits_of(&e.label, &f.outputs, s))
            .collect::<Result<Vec<_>, _>>()?;
        MooreSystem::new(
            f.inputs.clone(),
            f.outputs.clone(),
            f.initial,
            f.states.iter().map(|e| e.next.clone()).collect(),
            labels,
        )
    }

    /// Graphviz rendering; edges are labeled with input valuations.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph system {\n  rankdir=LR;\n  init [shape=point];\n");
        for s in 0..self.states() {
            let label = names_of(self.labels[s], &self.outputs).join(",");
            let _ = writeln!(out, "  s{s} [shape=box,label=\"s{s}\\n{{{label}}}\"];");
        }
        let _ = writeln!(out, "  init -> s{};", self.initial);
        for s in 0..self.states() {
            let mut targets: Vec<usize> = self.next[s].clone();
            targets.sort();
            targets.dedup();
            for t in targets {
                let guards: Vec<String> = (0..self.input_valuations())
                    .filter(|&v| self.next[s][v] == t)
                    .map(|v| format!("{{{}}}", names_of(v as u64, &self.inputs).join(",")))
                    .collect();
                let _ = writeln!(out, "  s{s} -> s{t} [label=\"{}\"];", guards.join(" "));
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Signal names whose bit is set in `bits`.
pub fn names_of(bits: u64, names: &[String]) -> Vec<String> {
    names
        .iter()
        .enumerate()
        .filter(|(k, _)| bits >> k & 1 == 1)
        .map(|(_, n)| n.clone())
        .collect()
}

fn bits_of(set: &[String], names: &[String], state: usize) -> Result<u64, MachineError> {
    let mut bits = 0;
    for s in set {
        let k = names
            .iter()
            .position(|n| n == s)
            .ok_or_else(|| MachineError::UnknownSignal {
                state,
                signal: s.clone(),
            })?;
        bits |= 1 << k;
    }
    Ok(bits)
}

/// An input-free machine producing one lasso per existential trace copy.
///
/// States form the chain `0 → 1 → … → m-1` closed by an edge back to
/// `loop_target`. State `e` emits `labels[e][c]` on copy `c`, a bit set over
/// `signals`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExistGenerator {
    pub copies: Vec<String>,
    pub signals: Vec<String>,
    pub loop_target: usize,
    pub labels: Vec<Vec<u64>>,
}

impl ExistGenerator {
    pub fn new(
        copies: Vec<String>,
        signals: Vec<String>,
        loop_target: usize,
        labels: Vec<Vec<u64>>,
    ) -> Result<Self, MachineError> {
        let g = ExistGenerator {
            copies,
            signals,
            loop_target,
            labels,
        };
        g.validate()?;
        Ok(g)
    }

    /// A generator for zero existential copies.
    pub fn empty(signals: Vec<String>) -> Self {
        ExistGenerator {
            copies: Vec::new(),
            signals,
            loop_target: 0,
            labels: vec![Vec::new()],
        }
    }

    pub fn validate(&self) -> Result<(), MachineError> {
        if self.labels.is_empty() {
            return Err(MachineError::NoStates);
        }
        if self.signals.len() > 64 {
            return Err(MachineError::TooManySignals(self.signals.len()));
        }
        if self.loop_target >= self.labels.len() {
            return Err(MachineError::BadLoop(self.loop_target));
        }
        if let Some(s) = self.labels.iter().position(|l| l.len() != self.copies.len()) {
            return Err(MachineError::Format(format!(
                "generator state {s} labels {} copies, expected {}",
                self.labels[s].len(),
                self.copies.len()
            )));
        }
        Ok(())
    }

    pub fn states(&self) -> usize {
        self.labels.len()
    }

    pub fn successor(&self, e: usize) -> usize {
        if e + 1 == self.states() {
            self.loop_target
        } else {
            e + 1
        }
    }

    /// The lasso emitted on copy `c`.
    pub fn lasso(&self, c: usize) -> Lasso<u64> {
        let word: Vec<u64> = self.labels.iter().map(|l| l[c]).collect();
        Lasso::new(word[..self.loop_target].to_vec(), word[self.loop_target..].to_vec()).expect("loop target in range")
    }

    /// The lasso of a single signal on copy `c`.
    pub fn signal_lasso(&self, c: usize, signal: usize) -> Lasso<bool> {
        self.lasso(c).map(|v| v >> signal & 1 == 1)
    }

    pub fn copy_index(&self, copy: &str) -> Option<usize> {
        self.copies.iter().position(|c| c == copy)
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph generator {\n  rankdir=LR;\n  init [shape=point];\n");
        for e in 0..self.states() {
            let label: Vec<String> = self
                .copies
                .iter()
                .enumerate()
                .map(|(c, name)| format!("{name}: {{{}}}", names_of(self.labels[e][c], &self.signals).join(",")))
                .collect();
            let _ = writeln!(out, "  e{e} [shape=box,label=\"e{e}\\n{}\"];", label.join("\\n"));
        }
        out.push_str("  init -> e0;\n");
        for e in 0..self.states() {
            let _ = writeln!(out, "  e{e} -> e{};", self.successor(e));
        }
        out.push_str("}\n");
        out
    }

    fn to_file(&self) -> GeneratorFile {
        GeneratorFile {
            copies: self.copies.clone(),
            signals: self.signals.clone(),
            loop_target: self.loop_target,
            states: self
                .labels
                .iter()
                .map(|row| row.iter().map(|&b| names_of(b, &self.signals)).collect())
                .collect(),
        }
    }

    fn from_file(f: &GeneratorFile) -> Result<Self, MachineError> {
        let labels = f
            .states
            .iter()
            .enumerate()
            .map(|(e, row)| {
                row.iter()
                    .map(|set| bits_of(set, &f.signals, e))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        ExistGenerator::new(f.copies.clone(), f.signals.clone(), f.loop_target, labels)
    }
}

#[derive(Serialize, Deserialize)]
struct StateEntry {
    label: Vec<String>,
    next: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct SystemFile {
    inputs: Vec<String>,
    outputs: Vec<String>,
    initial: usize,
    states: Vec<StateEntry>,
}

#[derive(Serialize, Deserialize)]
struct GeneratorFile {
    copies: Vec<String>,
    signals: Vec<String>,
    loop_target: usize,
    /// `states[e][c]`: signals set on copy `c` in state `e`.
    states: Vec<Vec<Vec<String>>>,
}

#[derive(Serialize, Deserialize)]
struct BundleFile {
    system: SystemFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    generator: Option<GeneratorFile>,
}

/// A synthesized pair as stored on disk.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MachineBundle {
    pub system: MooreSystem,
    pub generator: Option<ExistGenerator>,
}

impl MachineBundle {
    pub fn to_json(&self) -> String {
        let file = BundleFile {
            system: self.system.to_file(),
            generator: self.generator.as_ref().map(ExistGenerator::to_file),
        };
        serde_json::to_string_pretty(&file).expect("serializable")
    }

    /// Accepts either a bundle or a bare system object.
    pub fn from_json(text: &str) -> Result<Self, MachineError> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| MachineError::Format(e.to_string()))?;
        if value.get("system").is_some() {
            let file: BundleFile = serde_json::from_value(value).map_err(|e| MachineError::Format(e.to_string()))?;
            Ok(MachineBundle {
                system: MooreSystem::from_file(&file.system)?,
                generator: file.generator.as_ref().map(ExistGenerator::from_file).transpose()?,
            })
        } else {
            let file: SystemFile = serde_json::from_value(value).map_err(|e| MachineError::Format(e.to_string()))?;
            Ok(MachineBundle {
                system: MooreSystem::from_file(&file)?,
                generator: None,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toggler() -> MooreSystem {
        MooreSystem::new(
            vec!["i".into()],
            vec!["o".into()],
            0,
            vec![vec![1, 1], vec![0, 0]],
            vec![0, 1],
        )
        .unwrap()
    }

    #[test]
    fn json_round_trip() {
        let m = toggler();
        assert_eq!(MooreSystem::from_json(&m.to_json()).unwrap(), m);
        let g = ExistGenerator::new(
            vec!["pq".into()],
            vec!["i".into(), "o".into()],
            1,
            vec![vec![1], vec![0], vec![3]],
        )
        .unwrap();
        let b = MachineBundle {
            system: m,
            generator: Some(g),
        };
        assert_eq!(MachineBundle::from_json(&b.to_json()).unwrap(), b);
    }

    #[test]
    fn incomplete_is_rejected() {
        let err = MooreSystem::new(vec!["i".into()], vec![], 0, vec![vec![0]], vec![0]).unwrap_err();
        assert!(matches!(err, MachineError::Incomplete { .. }));
    }

    #[test]
    fn run_finds_the_lasso() {
        let m = toggler();
        let t = m.run(&Lasso::new(vec![], vec![0]).unwrap());
        assert_eq!(t.prefix_len(), 0);
        assert_eq!(t.cycle(), &[0, 2]);
        let t = m.run(&Lasso::new(vec![1], vec![0, 1, 0]).unwrap());
        assert_eq!(t.prefix_len(), 1);
        assert_eq!(t.cycle_len(), 6);
    }

    #[test]
    fn generator_lasso() {
        let g = ExistGenerator::new(vec!["p".into()], vec!["a".into()], 1, vec![vec![1], vec![0], vec![1]]).unwrap();
        let l = g.lasso(0);
        assert_eq!(l.prefix(), &[1]);
        assert_eq!(l.cycle(), &[0, 1]);
        assert_eq!(g.successor(2), 1);
        assert!(g.to_dot().contains("e2 -> e1"));
    }
}
