use std::fmt::Write as _;
use std::io::{self, Write};

use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum DimacsError {
    #[error("line {0}: missing or malformed `p cnf` header")]
    Header(usize),
    #[error("line {line}: bad literal `{token}`")]
    Literal { line: usize, token: String },
    #[error("literal {lit} exceeds the declared {vars} variables")]
    Range { lit: i64, vars: u32 },
    #[error("last clause is not terminated by 0")]
    Unterminated,
}

/// A propositional formula in conjunctive normal form with DIMACS literals.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Cnf {
    vars: u32,
    /// Clauses stored back to back, each terminated by `0`.
    lits: Vec<i32>,
    clauses: usize,
}

impl Cnf {
    pub fn new() -> Self {
        Cnf::default()
    }

    pub fn new_var(&mut self) -> i32 {
        self.vars += 1;
        self.vars as i32
    }

    pub fn vars(&self) -> u32 {
        self.vars
    }

    pub fn clause_count(&self) -> usize {
        self.clauses
    }

    pub fn add(&mut self, clause: &[i32]) {
        debug_assert!(clause.iter().all(|&l| l != 0 && l.unsigned_abs() <= self.vars));
        self.lits.extend_from_slice(clause);
        self.lits.push(0);
        self.clauses += 1;
    }

    pub fn clauses(&self) -> impl Iterator<Item = &[i32]> {
        self.lits.split(|&l| l == 0).take(self.clauses)
    }

    pub fn write_dimacs(&self, out: &mut impl Write) -> io::Result<()> {
        writeln!(out, "p cnf {} {}", self.vars, self.clauses)?;
        let mut line = String::new();
        for c in self.clauses() {
            line.clear();
            for l in c {
                let _ = write!(line, "{l} ");
            }
            line.push_str("0\n");
            out.write_all(line.as_bytes())?;
        }
        Ok(())
    }

    /// Reads a DIMACS CNF file; comment lines are skipped.
    pub fn from_dimacs(text: &str) -> Result<Cnf, DimacsError> {
        let mut cnf = Cnf::new();
        let mut header = false;
        let mut clause = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            if !header {
                let parts: Vec<&str> = line.split_whitespace().collect();
                match parts.as_slice() {
                    ["p", "cnf", v, _] => {
                        cnf.vars = v.parse().map_err(|_| DimacsError::Header(i + 1))?;
                        header = true;
                        continue;
                    }
                    _ => return Err(DimacsError::Header(i + 1)),
                }
            }
            for tok in line.split_whitespace() {
                let lit: i64 = tok.parse().map_err(|_| DimacsError::Literal {
                    line: i + 1,
                    token: tok.to_string(),
                })?;
                if lit == 0 {
                    cnf.add(&clause);
                    clause.clear();
                } else if lit.unsigned_abs() > cnf.vars as u64 {
                    return Err(DimacsError::Range { lit, vars: cnf.vars });
                } else {
                    clause.push(lit as i32);
                }
            }
        }
        if !header {
            return Err(DimacsError::Header(0));
        }
        if !clause.is_empty() {
            return Err(DimacsError::Unterminated);
        }
        Ok(cnf)
    }

    pub fn to_dimacs(&self) -> String {
        let mut buf = Vec::new();
        self.write_dimacs(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("ascii")
    }

    /// The same constraints as a pure Boolean SMT-LIB v2 script, variable `k`
    /// named `b{k}`.
    pub fn write_smtlib(&self, out: &mut impl Write) -> io::Result<()> {
        writeln!(out, "(set-logic QF_UF)")?;
        writeln!(out, "(set-option :produce-models true)")?;
        for v in 1..=self.vars {
            writeln!(out, "(declare-const b{v} Bool)")?;
        }
        let mut line = String::new();
        for c in self.clauses() {
            line.clear();
            line.push_str("(assert (or");
            if c.is_empty() {
                line.push_str(" false");
            }
            for &l in c {
                if l > 0 {
                    let _ = write!(line, " b{l}");
                } else {
                    let _ = write!(line, " (not b{})", -l);
                }
            }
            line.push_str("))\n");
            out.write_all(line.as_bytes())?;
        }
        writeln!(out, "(check-sat)")?;
        writeln!(out, "(get-model)")?;
        Ok(())
    }

    pub fn to_smtlib(&self) -> String {
        let mut buf = Vec::new();
        self.write_smtlib(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("ascii")
    }

    /// Whether `model` (indexed by variable, entry 0 unused) satisfies every clause.
    pub fn satisfied_by(&self, model: &[bool]) -> bool {
        self.clauses().all(|c| {
            c.iter()
                .any(|&l| model.get(l.unsigned_abs() as usize).copied().unwrap_or(false) == (l > 0))
        })
    }
}

/// Result reported by a solver.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SatAnswer {
    /// Model indexed by variable; entry 0 is unused.
    Sat(Vec<bool>),
    Unsat,
}

impl SatAnswer {
    /// Competition-style solver output: an `s` line and, if satisfiable, `v` lines.
    pub fn to_dimacs_output(&self) -> String {
        match self {
            SatAnswer::Unsat => "s UNSATISFIABLE\n".to_string(),
            SatAnswer::Sat(model) => {
                let mut out = String::from("s SATISFIABLE\n");
                let lits: Vec<String> = (1..model.len())
                    .map(|v| if model[v] { v.to_string() } else { format!("-{v}") })
                    .chain(std::iter::once("0".to_string()))
                    .collect();
                for chunk in lits.chunks(16) {
                    let _ = writeln!(out, "v {}", chunk.join(" "));
                }
                out
            }
        }
    }
}

/// Parses the output of a DIMACS solver (`s` and `v` lines).
pub fn parse_dimacs_answer(text: &str, vars: u32) -> Option<SatAnswer> {
    let mut status = None;
    let mut model = vec![false; vars as usize + 1];
    for line in text.lines() {
        let line = line.trim();
        if let Some(s) = line.strip_prefix("s ") {
            status = match s.trim() {
                "SATISFIABLE" => Some(true),
                "UNSATISFIABLE" => Some(false),
                _ => None,
            };
        } else if let Some(v) = line.strip_prefix("v ") {
            for tok in v.split_whitespace() {
                let l: i64 = tok.parse().ok()?;
                if l > 0 && (l as usize) < model.len() {
                    model[l as usize] = true;
                }
            }
        }
    }
    match status? {
        true => Some(SatAnswer::Sat(model)),
        false => Some(SatAnswer::Unsat),
    }
}

/// Parses the answer of an SMT solver to a script from [`Cnf::write_smtlib`].
pub fn parse_smtlib_answer(text: &str, vars: u32) -> Option<SatAnswer> {
    let first = text.lines().map(str::trim).find(|l| !l.is_empty())?;
    match first {
        "unsat" => return Some(SatAnswer::Unsat),
        "sat" => {}
        _ => return None,
    }
    let mut model = vec![false; vars as usize + 1];
    let mut rest = text;
    while let Some(i) = rest.find("(define-fun ") {
        rest = &rest[i + "(define-fun ".len()..];
        let mut toks = rest
            .split(|c: char| c.is_whitespace() || c == '(' || c == ')')
            .filter(|t| !t.is_empty());
        let name = toks.next()?;
        let _sort = toks.next()?;
        let value = toks.next()?;
        if let Some(k) = name.strip_prefix('b').and_then(|k| k.parse::<usize>().ok()) {
            if k < model.len() {
                model[k] = value == "true";
            }
        }
    }
    Some(SatAnswer::Sat(model))
}
