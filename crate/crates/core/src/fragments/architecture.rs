use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Process {
    pub name: String,
    pub inputs: BTreeSet<String>,
    pub outputs: BTreeSet<String>,
}

/// A distributed architecture: processes with input and output signal sets,
/// one of which is the environment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Architecture {
    pub processes: Vec<Process>,
    pub env: usize,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ArchitectureError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("no environment process")]
    NoEnvironment,
    #[error("more than one environment process")]
    SeveralEnvironments,
    #[error("environment {0} must not have inputs")]
    EnvironmentInputs(String),
    #[error("signal {signal} is output by both {first} and {second}")]
    SharedOutput {
        signal: String,
        first: String,
        second: String,
    },
    #[error("process {0} declared twice")]
    DuplicateProcess(String),
}

/// An information fork `(P', V', p, p')` with the processes `q`, `q'` that feed
/// `p` and `p'` incomparable information.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfoFork {
    pub subgraph: BTreeSet<String>,
    pub variables: BTreeSet<String>,
    pub p: String,
    pub p_prime: String,
    pub q: String,
    pub q_prime: String,
}

impl fmt::Display for InfoFork {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let set = |s: &BTreeSet<String>| s.iter().cloned().collect::<Vec<_>>().join(",");
        write!(
            f,
            "P'={{{}}} V'={{{}}} p={} p'={} q={} q'={}",
            set(&self.subgraph),
            set(&self.variables),
            self.p,
            self.p_prime,
            self.q,
            self.q_prime
        )
    }
}

impl Architecture {
    pub fn new(processes: Vec<Process>, env: usize) -> Result<Self, ArchitectureError> {
        let a = Architecture { processes, env };
        a.validate()?;
        Ok(a)
    }

    pub fn validate(&self) -> Result<(), ArchitectureError> {
        let env = self.processes.get(self.env).ok_or(ArchitectureError::NoEnvironment)?;
        if !env.inputs.is_empty() {
            return Err(ArchitectureError::EnvironmentInputs(env.name.clone()));
        }
        for (i, p) in self.processes.iter().enumerate() {
            for q in &self.processes[i + 1..] {
                if p.name == q.name {
                    return Err(ArchitectureError::DuplicateProcess(p.name.clone()));
                }
                if let Some(s) = p.outputs.intersection(&q.outputs).next() {
                    return Err(ArchitectureError::SharedOutput {
                        signal: s.clone(),
                        first: p.name.clone(),
                        second: q.name.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Label of the edge `from → to`: signals written by `from` and read by `to`.
    pub fn edge(&self, from: usize, to: usize) -> BTreeSet<String> {
        self.processes[from]
            .outputs
            .intersection(&self.processes[to].inputs)
            .cloned()
            .collect()
    }

    /// Every signal of the architecture.
    pub fn signals(&self) -> BTreeSet<String> {
        self.processes
            .iter()
            .flat_map(|p| p.inputs.iter().chain(&p.outputs).cloned())
            .collect()
    }

    /// Whether `(q → p, q' → p')` carries incomparable information.
    fn incomparable(&self, q: usize, p: usize, q2: usize, p2: usize) -> bool {
        let (ip, ip2) = (&self.processes[p].inputs, &self.processes[p2].inputs);
        !self.edge(q, p).is_subset(ip2) && !self.edge(q2, p2).is_subset(ip)
    }

    /// Searches for an information fork. Taking all processes reachable from
    /// the environment as the subgraph makes every candidate `q` available, so
    /// only pairs of processes and their feeding processes need to be tried.
    pub fn has_info_fork(&self) -> Option<InfoFork> {
        let n = self.processes.len();
        // BFS tree from the environment over nonempty edges.
        let mut parent: Vec<Option<usize>> = vec![None; n];
        let mut reached = vec![false; n];
        reached[self.env] = true;
        let mut queue = std::collections::VecDeque::from([self.env]);
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                if !reached[v] && !self.edge(u, v).is_empty() {
                    reached[v] = true;
                    parent[v] = Some(u);
                    queue.push_back(v);
                }
            }
        }
        for p in 0..n {
            for p2 in 0..n {
                if p == p2 {
                    continue;
                }
                for q in (0..n).filter(|&q| reached[q]) {
                    for q2 in (0..n).filter(|&q| reached[q]) {
                        if self.edge(q, p).is_empty() || self.edge(q2, p2).is_empty() {
                            continue;
                        }
                        if !self.incomparable(q, p, q2, p2) {
                            continue;
                        }
                        let mut nodes = BTreeSet::from([p, p2]);
                        let mut vars: BTreeSet<String> = self.edge(q, p);
                        vars.extend(self.edge(q2, p2));
                        for start in [q, q2] {
                            let mut cur = start;
                            nodes.insert(cur);
                            while let Some(up) = parent[cur] {
                                vars.extend(self.edge(up, cur));
                                nodes.insert(up);
                                cur = up;
                            }
                        }
                        let name = |i: usize| self.processes[i].name.clone();
                        return Some(InfoFork {
                            subgraph: nodes.into_iter().map(name).collect(),
                            variables: vars,
                            p: name(p),
                            p_prime: name(p2),
                            q: name(q),
                            q_prime: name(q2),
                        });
                    }
                }
            }
        }
        None
    }

    /// Literal search over every tuple `(P', V', p, p', q, q')`. Exponential;
    /// meant for cross-checking [`Self::has_info_fork`] on small architectures.
    pub fn has_info_fork_brute_force(&self) -> bool {
        let n = self.processes.len();
        let signals: Vec<String> = self.signals().into_iter().collect();
        assert!(n <= 12 && signals.len() <= 16, "brute force is for small architectures");
        for sub in 0u32..(1 << n) {
            if sub >> self.env & 1 == 0 {
                continue;
            }
            for vmask in 0u32..(1 << signals.len()) {
                let vars: BTreeSet<&String> = signals
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| vmask >> k & 1 == 1)
                    .map(|(_, s)| s)
                    .collect();
                if !self.rooted(sub, &vars) {
                    continue;
                }
                for p in 0..n {
                    for p2 in 0..n {
                        if p == p2 {
                            continue;
                        }
                        for q in (0..n).filter(|&q| sub >> q & 1 == 1) {
                            for q2 in (0..n).filter(|&q| sub >> q & 1 == 1) {
                                if !self.edge(q, p).is_empty()
                                    && !self.edge(q2, p2).is_empty()
                                    && self.incomparable(q, p, q2, p2)
                                {
                                    return true;
                                }
                            }
                        }
                    }
                }
            }
        }
        false
    }

    /// Whether every member of `sub` is reachable from the environment inside
    /// `sub` along edges whose label meets `vars`.
    fn rooted(&self, sub: u32, vars: &BTreeSet<&String>) -> bool {
        let n = self.processes.len();
        let mut seen = 1u32 << self.env;
        let mut stack = vec![self.env];
        while let Some(u) = stack.pop() {
            for v in 0..n {
                if sub >> v & 1 == 1 && seen >> v & 1 == 0 && self.edge(u, v).iter().any(|s| vars.contains(s)) {
                    seen |= 1 << v;
                    stack.push(v);
                }
            }
        }
        seen == sub
    }

    /// Whether the input sets of the non-environment processes form a chain under ⊆.
    pub fn inputs_linearly_ordered(&self) -> bool {
        let ps: Vec<&Process> = self
            .processes
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != self.env)
            .map(|(_, p)| p)
            .collect();
        ps.iter().all(|a| {
            ps.iter()
                .all(|b| a.inputs.is_subset(&b.inputs) || b.inputs.is_subset(&a.inputs))
        })
    }
}

fn parse_set(text: &str, line: usize) -> Result<(BTreeSet<String>, &str), ArchitectureError> {
    let err = |m: &str| ArchitectureError::Syntax {
        line,
        message: m.to_string(),
    };
    let text = text.trim_start();
    let inner = text.strip_prefix('{').ok_or_else(|| err("expected `{`"))?;
    let close = inner.find('}').ok_or_else(|| err("expected `}`"))?;
    let set = inner[..close]
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(String::from)
        .collect();
    Ok((set, &inner[close + 1..]))
}

impl FromStr for Architecture {
    type Err = ArchitectureError;

    /// One process per line: `name : inputs {a, b} outputs {c}`. The
    /// environment is the process named `env`, or any line prefixed with the
    /// marker `env`, as in `env world : inputs {} outputs {i}`.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut processes = Vec::new();
        let mut env = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let err = |m: &str| ArchitectureError::Syntax {
                line,
                message: m.to_string(),
            };
            let (head, rest) = body.split_once(':').ok_or_else(|| err("expected `name :`"))?;
            let words: Vec<&str> = head.split_whitespace().collect();
            let (name, marked) = match words.as_slice() {
                [name] => (name.to_string(), *name == "env"),
                ["env", name] => (name.to_string(), true),
                _ => return Err(err("expected a process name")),
            };
            let rest = rest.trim_start();
            let rest = rest
                .strip_prefix("inputs")
                .ok_or_else(|| err("expected `inputs {…}`"))?;
            let (inputs, rest) = parse_set(rest, line)?;
            let rest = rest
                .trim_start()
                .strip_prefix("outputs")
                .ok_or_else(|| err("expected `outputs {…}`"))?;
            let (outputs, rest) = parse_set(rest, line)?;
            if !rest.trim().is_empty() {
                return Err(err("trailing characters"));
            }
            if marked {
                if env.is_some() {
                    return Err(ArchitectureError::SeveralEnvironments);
                }
                env = Some(processes.len());
            }
            processes.push(Process { name, inputs, outputs });
        }
        Architecture::new(processes, env.ok_or(ArchitectureError::NoEnvironment)?)
    }
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let set = |s: &BTreeSet<String>| s.iter().cloned().collect::<Vec<_>>().join(", ");
        for (i, p) in self.processes.iter().enumerate() {
            let marker = if i == self.env && p.name != "env" { "env " } else { "" };
            writeln!(
                f,
                "{marker}{} : inputs {{{}}} outputs {{{}}}",
                p.name,
                set(&p.inputs),
                set(&p.outputs)
            )?;
        }
        Ok(())
    }
}
