use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use super::lasso::{Lasso, LassoTrace, Valuation};

/// A finite set of lasso traces over a common signal set.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TraceSet {
    pub signals: Vec<String>,
    pub traces: Vec<LassoTrace>,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct TraceSetParseError {
    pub line: usize,
    pub message: String,
}

impl TraceSet {
    /// Builds a set over the signals occurring in `traces` (sorted), removing
    /// duplicate words.
    pub fn from_traces(traces: Vec<LassoTrace>) -> Self {
        let mut signals: Vec<String> = traces
            .iter()
            .flat_map(|t| t.signals())
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        signals.sort();
        Self::with_signals(signals, traces)
    }

    pub fn with_signals(signals: Vec<String>, traces: Vec<LassoTrace>) -> Self {
        let mut set = TraceSet {
            signals,
            traces: Vec::new(),
        };
        for t in traces {
            set.insert(t);
        }
        set
    }

    /// Adds a trace in canonical form unless the same word is present.
    pub fn insert(&mut self, t: LassoTrace) -> bool {
        let c = t.canonical();
        if self.traces.contains(&c) {
            return false;
        }
        self.traces.push(c);
        true
    }

    pub fn len(&self) -> usize {
        self.traces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }
}

fn write_valuation(v: &Valuation, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    f.write_str("{")?;
    for (i, s) in v.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        f.write_str(s)?;
    }
    f.write_str("}")
}

/// Writes one trace as `prefix | loop`.
pub fn write_lasso(t: &LassoTrace, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    for v in t.prefix() {
        write_valuation(v, f)?;
        f.write_str(" ")?;
    }
    f.write_str("|")?;
    for v in t.cycle() {
        f.write_str(" ")?;
        write_valuation(v, f)?;
    }
    Ok(())
}

/// Display adapter for a single trace.
pub struct LassoDisplay<'a>(pub &'a LassoTrace);

impl fmt::Display for LassoDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_lasso(self.0, f)
    }
}

impl fmt::Display for TraceSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "signals: {}", self.signals.join(", "))?;
        for t in &self.traces {
            write_lasso(t, f)?;
            writeln!(f)?;
        }
        Ok(())
    }
}

fn parse_valuations(text: &str, line: usize) -> Result<Vec<Valuation>, TraceSetParseError> {
    let err = |message: String| TraceSetParseError { line, message };
    let mut out = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let Some(inner) = rest.strip_prefix('{') else {
            return Err(err(format!("expected `{{` at `{rest}`")));
        };
        let Some(close) = inner.find('}') else {
            return Err(err("unterminated valuation".into()));
        };
        let names = &inner[..close];
        let v: Valuation = names
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(String::from)
            .collect();
        out.push(v);
        rest = inner[close + 1..].trim_start();
    }
    Ok(out)
}

/// Parses one `prefix | loop` line.
pub fn parse_lasso(text: &str, line: usize) -> Result<LassoTrace, TraceSetParseError> {
    let Some((p, l)) = text.split_once('|') else {
        return Err(TraceSetParseError {
            line,
            message: "expected `prefix | loop`".into(),
        });
    };
    let prefix = parse_valuations(p, line)?;
    let cycle = parse_valuations(l, line)?;
    Lasso::new(prefix, cycle).map_err(|e| TraceSetParseError {
        line,
        message: e.to_string(),
    })
}

impl FromStr for TraceSet {
    type Err = TraceSetParseError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut signals = None;
        let mut traces = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("signals:") {
                signals = Some(
                    rest.split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(String::from)
                        .collect::<Vec<_>>(),
                );
                continue;
            }
            traces.push(parse_lasso(line, idx + 1)?);
        }
        Ok(match signals {
            Some(s) => {
                for (i, t) in traces.iter().enumerate() {
                    if let Some(bad) = t.signals().into_iter().find(|x| !s.contains(x)) {
                        return Err(TraceSetParseError {
                            line: i + 1,
                            message: format!("signal {bad} not declared"),
                        });
                    }
                }
                TraceSet::with_signals(s, traces)
            }
            None => TraceSet::from_traces(traces),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let text = "signals: a, b\n{a} {} | {a,b} {b}\n| {}\n";
        let set: TraceSet = text.parse().unwrap();
        assert_eq!(set.len(), 2);
        assert_eq!(set.to_string(), text);
        let again: TraceSet = set.to_string().parse().unwrap();
        assert_eq!(again, set);
    }

    #[test]
    fn duplicates_are_merged() {
        let set: TraceSet = "{a} | {a}\n| {a} {a}\n".parse().unwrap();
        assert_eq!(set.len(), 1);
        assert_eq!(set.signals, vec!["a".to_string()]);
    }

    #[test]
    fn rejects_empty_loop() {
        assert!("{a} |".parse::<TraceSet>().is_err());
    }
}
