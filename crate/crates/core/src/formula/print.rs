use std::fmt::{self, Write};

use super::ast::{Formula, Kind};
use super::SpecDocument;

// Binary operands are parenthesized unless atomic, unary operands unless atomic
// or unary. This keeps the output unambiguous under every precedence level.

fn write_formula(f: &Formula, out: &mut impl Write) -> fmt::Result {
    match &f.kind {
        Kind::True => out.write_str("true"),
        Kind::False => out.write_str("false"),
        Kind::TraceAtom { prop, trace } => write!(out, "{prop}[{trace}]"),
        Kind::PropAtom(v) => out.write_str(v),
        Kind::Quant(q, v, body) => {
            let (quant, sort) = q.keyword();
            write!(out, "{quant} {v}:{sort}. ")?;
            write_formula(body, out)
        }
        Kind::Unary(op, body) => {
            out.write_str(op.symbol())?;
            if op.symbol() != "!" {
                out.write_char(' ')?;
            }
            write_unary_operand(body, out)
        }
        Kind::Knowledge {
            agents, trace, body, ..
        } => {
            write!(out, "K{{{}}}[{trace}] ", agents.join(","))?;
            write_unary_operand(body, out)
        }
        Kind::Binary(op, l, r) => {
            write_binary_operand(l, out)?;
            write!(out, " {} ", op.symbol())?;
            write_binary_operand(r, out)
        }
    }
}

fn write_unary_operand(f: &Formula, out: &mut impl Write) -> fmt::Result {
    if f.is_atomic() || matches!(f.kind, Kind::Unary(..) | Kind::Knowledge { .. }) {
        write_formula(f, out)
    } else {
        parenthesized(f, out)
    }
}

fn write_binary_operand(f: &Formula, out: &mut impl Write) -> fmt::Result {
    if f.is_atomic() {
        write_formula(f, out)
    } else {
        parenthesized(f, out)
    }
}

fn parenthesized(f: &Formula, out: &mut impl Write) -> fmt::Result {
    out.write_char('(')?;
    write_formula(f, out)?;
    out.write_char(')')
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(self, f)
    }
}

/// Prints a formula in the concrete grammar accepted by [`super::parse_formula`].
pub fn print(f: &Formula) -> String {
    f.to_string()
}

impl fmt::Display for SpecDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "inputs: {}", self.inputs.join(", "))?;
        writeln!(f, "outputs: {}", self.outputs.join(", "))?;
        writeln!(f, "{}", self.formula)
    }
}
