use thiserror::Error;

use super::ast::{BinOp, Formula, Kind, QuantKind, Span, UnOp};
use super::wf::{check_well_formed, Diagnostic};
use super::SpecDocument;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("{span}: syntax error: {message}")]
    Syntax { span: Span, message: String },
    #[error("{0}")]
    Invalid(Diagnostic),
}

impl ParseError {
    pub fn span(&self) -> Span {
        match self {
            ParseError::Syntax { span, .. } => *span,
            ParseError::Invalid(d) => d.span,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Colon,
    Dot,
    Bang,
    Amp,
    Pipe,
    Arrow,
    DArrow,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Bang => "`!`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::DArrow => "`<->`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

const KEYWORDS: &[&str] = &["X", "F", "G", "U", "W", "R", "K", "forall", "exists", "true", "false"];

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn lex(text: &str, first_line: u32) -> Result<Vec<(Tok, Span)>, ParseError> {
    let mut toks = Vec::new();
    let mut line = first_line;
    let mut col = 1u32;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let span = Span::new(line, col);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars<'_>>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        if c == '#' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                bump(&mut chars);
            }
            continue;
        }
        if is_ident_start(c) {
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if !is_ident_char(c) {
                    break;
                }
                s.push(bump(&mut chars));
            }
            toks.push((Tok::Ident(s), span));
            continue;
        }
        bump(&mut chars);
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            ',' => Tok::Comma,
            ':' => Tok::Colon,
            '.' => Tok::Dot,
            '!' => Tok::Bang,
            '&' => Tok::Amp,
            '|' => Tok::Pipe,
            '-' if chars.peek() == Some(&'>') => {
                bump(&mut chars);
                Tok::Arrow
            }
            '<' if chars.peek() == Some(&'-') => {
                bump(&mut chars);
                if chars.peek() != Some(&'>') {
                    return Err(ParseError::Syntax {
                        span,
                        message: "expected `<->`".into(),
                    });
                }
                bump(&mut chars);
                Tok::DArrow
            }
            other => {
                return Err(ParseError::Syntax {
                    span,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        toks.push((tok, span));
    }
    toks.push((Tok::Eof, Span::new(line, col)));
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn advance(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            span: self.span(),
            message: message.into(),
        })
    }

    fn expect(&mut self, tok: Tok) -> Result<Span, ParseError> {
        if *self.peek() == tok {
            Ok(self.advance().1)
        } else {
            self.error(format!("expected {}, found {}", tok.describe(), self.peek().describe()))
        }
    }

    fn peek_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.advance();
                Ok(s)
            }
            other => self.error(format!("expected identifier, found {}", other.describe())),
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        self.iff()
    }

    fn iff(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.implication()?;
        while *self.peek() == Tok::DArrow {
            let span = self.advance().1;
            let rhs = self.implication()?;
            lhs = Formula::with_span(Kind::Binary(BinOp::Iff, Box::new(lhs), Box::new(rhs)), span);
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            let span = self.advance().1;
            let rhs = self.implication()?;
            return Ok(Formula::with_span(
                Kind::Binary(BinOp::Implies, Box::new(lhs), Box::new(rhs)),
                span,
            ));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::Pipe {
            let span = self.advance().1;
            let rhs = self.conjunction()?;
            lhs = Formula::with_span(Kind::Binary(BinOp::Or, Box::new(lhs), Box::new(rhs)), span);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.temporal()?;
        while *self.peek() == Tok::Amp {
            let span = self.advance().1;
            let rhs = self.temporal()?;
            lhs = Formula::with_span(Kind::Binary(BinOp::And, Box::new(lhs), Box::new(rhs)), span);
        }
        Ok(lhs)
    }

    fn temporal(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.unary()?;
        let op = match self.peek() {
            Tok::Ident(s) if s == "U" => BinOp::Until,
            Tok::Ident(s) if s == "W" => BinOp::WeakUntil,
            Tok::Ident(s) if s == "R" => BinOp::Release,
            _ => return Ok(lhs),
        };
        let span = self.advance().1;
        let rhs = self.temporal()?;
        Ok(Formula::with_span(Kind::Binary(op, Box::new(lhs), Box::new(rhs)), span))
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let span = self.span();
        let op = match self.peek() {
            Tok::Bang => Some(UnOp::Not),
            Tok::Ident(s) if s == "X" => Some(UnOp::Next),
            Tok::Ident(s) if s == "F" => Some(UnOp::Eventually),
            Tok::Ident(s) if s == "G" => Some(UnOp::Globally),
            _ => None,
        };
        if let Some(op) = op {
            self.advance();
            let body = self.unary()?;
            return Ok(Formula::with_span(Kind::Unary(op, Box::new(body)), span));
        }
        if self.peek_keyword("K") {
            self.advance();
            self.expect(Tok::LBrace)?;
            let mut agents = Vec::new();
            if *self.peek() != Tok::RBrace {
                agents.push(self.ident()?);
                while *self.peek() == Tok::Comma {
                    self.advance();
                    agents.push(self.ident()?);
                }
            }
            self.expect(Tok::RBrace)?;
            self.expect(Tok::LBracket)?;
            let trace = self.ident()?;
            self.expect(Tok::RBracket)?;
            let body = self.unary()?;
            return Ok(Formula::with_span(
                Kind::Knowledge {
                    agents,
                    trace,
                    polarity: None,
                    body: Box::new(body),
                },
                span,
            ));
        }
        if self.peek_keyword("forall") || self.peek_keyword("exists") {
            return self.quantified();
        }
        self.primary()
    }

    fn quantified(&mut self) -> Result<Formula, ParseError> {
        let (tok, span) = self.advance();
        let universal = tok == Tok::Ident("forall".into());
        let var = self.ident()?;
        self.expect(Tok::Colon)?;
        let trace = match self.peek() {
            Tok::Ident(s) if s == "trace" => true,
            Tok::Ident(s) if s == "prop" => false,
            other => return self.error(format!("expected `trace` or `prop`, found {}", other.describe())),
        };
        self.advance();
        self.expect(Tok::Dot)?;
        let body = self.formula()?;
        let kind = match (universal, trace) {
            (true, true) => QuantKind::TraceForall,
            (false, true) => QuantKind::TraceExists,
            (true, false) => QuantKind::PropForall,
            (false, false) => QuantKind::PropExists,
        };
        Ok(Formula::with_span(Kind::Quant(kind, var, Box::new(body)), span))
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        let span = self.span();
        match self.peek().clone() {
            Tok::LParen => {
                self.advance();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(s) if s == "true" => {
                self.advance();
                Ok(Formula::with_span(Kind::True, span))
            }
            Tok::Ident(s) if s == "false" => {
                self.advance();
                Ok(Formula::with_span(Kind::False, span))
            }
            Tok::Ident(_) => {
                let name = self.ident()?;
                if *self.peek() == Tok::LBracket {
                    self.advance();
                    let trace = self.ident()?;
                    self.expect(Tok::RBracket)?;
                    Ok(Formula::with_span(Kind::TraceAtom { prop: name, trace }, span))
                } else {
                    Ok(Formula::with_span(Kind::PropAtom(name), span))
                }
            }
            other => self.error(format!("expected a formula, found {}", other.describe())),
        }
    }
}

fn parse_formula_at(text: &str, first_line: u32) -> Result<Formula, ParseError> {
    let toks = lex(text, first_line)?;
    let mut p = Parser { toks, pos: 0 };
    let f = p.formula()?;
    if *p.peek() != Tok::Eof {
        return p.error(format!("unexpected {}", p.peek().describe()));
    }
    Ok(f)
}

/// Parses a bare formula without any scoping checks.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    parse_formula_at(text, 1)
}

fn header_names(rest: &str, line: u32) -> Result<Vec<String>, ParseError> {
    let mut names = Vec::new();
    for (idx, part) in rest.split(',').enumerate() {
        let name = part.trim();
        if name.is_empty() {
            if idx == 0 && rest.trim().is_empty() {
                break;
            }
            return Err(ParseError::Syntax {
                span: Span::new(line, 1),
                message: "empty name in header".into(),
            });
        }
        if !name.starts_with(is_ident_start) || !name.chars().all(is_ident_char) {
            return Err(ParseError::Syntax {
                span: Span::new(line, 1),
                message: format!("invalid proposition name `{name}`"),
            });
        }
        names.push(name.to_string());
    }
    Ok(names)
}

/// Parses a document without well-formedness checks.
///
/// Leading `inputs:` / `outputs:` lines declare the signals. Without either
/// header, every trace-indexed proposition is taken to be an output.
pub fn parse_document_unchecked(text: &str) -> Result<SpecDocument, ParseError> {
    let mut inputs = None;
    let mut outputs = None;
    let mut body_start = 0;
    let mut line_no = 1u32;
    for line in text.split_inclusive('\n') {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            body_start += line.len();
            line_no += 1;
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("inputs:") {
            inputs = Some(header_names(rest, line_no)?);
        } else if let Some(rest) = trimmed.strip_prefix("outputs:") {
            outputs = Some(header_names(rest, line_no)?);
        } else {
            break;
        }
        body_start += line.len();
        line_no += 1;
    }
    let formula = parse_formula_at(&text[body_start..], line_no)?;
    let (inputs, outputs) = match (inputs, outputs) {
        (None, None) => (Vec::new(), formula.trace_propositions()),
        (i, o) => (i.unwrap_or_default(), o.unwrap_or_default()),
    };
    Ok(SpecDocument {
        inputs,
        outputs,
        formula,
    })
}

/// Parses a specification and rejects it on the first well-formedness diagnostic.
pub fn parse(text: &str) -> Result<SpecDocument, ParseError> {
    let doc = parse_document_unchecked(text)?;
    if let Some(d) = check_well_formed(&doc).into_iter().next() {
        return Err(ParseError::Invalid(d));
    }
    Ok(doc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::wf::DiagnosticKind;

    #[test]
    fn single_production() {
        let doc = parse("forall pi:trace. G a[pi]").unwrap();
        assert_eq!(
            doc.formula,
            Formula::forall_trace("pi", Formula::globally(Formula::trace_atom("a", "pi")))
        );
        assert_eq!(doc.outputs, vec!["a".to_string()]);
    }

    #[test]
    fn unbound_trace_variable() {
        let err = parse("forall pi:trace. a[pi2]").unwrap_err();
        match err {
            ParseError::Invalid(d) => {
                assert_eq!(d.kind, DiagnosticKind::UnboundTraceVariable("pi2".into()));
                assert_eq!(d.span, Span::new(1, 18));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn precedence() {
        let f = parse_formula("a[p] U b[p] & c[p] | d[p] -> e[p] <-> f[p]").unwrap();
        let a = || Formula::trace_atom("a", "p");
        let expected = Formula::iff(
            Formula::implies(
                Formula::or(
                    Formula::and(
                        Formula::until(a(), Formula::trace_atom("b", "p")),
                        Formula::trace_atom("c", "p"),
                    ),
                    Formula::trace_atom("d", "p"),
                ),
                Formula::trace_atom("e", "p"),
            ),
            Formula::trace_atom("f", "p"),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn until_and_implication_are_right_associative() {
        let f = parse_formula("a U b U c").unwrap();
        assert_eq!(
            f,
            Formula::until(
                Formula::prop("a"),
                Formula::until(Formula::prop("b"), Formula::prop("c"))
            )
        );
        let g = parse_formula("a -> b -> c").unwrap();
        assert_eq!(
            g,
            Formula::implies(
                Formula::prop("a"),
                Formula::implies(Formula::prop("b"), Formula::prop("c"))
            )
        );
    }

    #[test]
    fn knowledge_operator() {
        let f = parse_formula("K{a,b}[pi] F c[pi]").unwrap();
        assert_eq!(
            f,
            Formula::knowledge(["a", "b"], "pi", Formula::eventually(Formula::trace_atom("c", "pi")))
        );
    }

    #[test]
    fn header_and_position_of_errors() {
        let err = parse("inputs: i\noutputs: o\nforall pi:trace. G (o[pi] &)").unwrap_err();
        assert_eq!(err.span(), Span::new(3, 28));
    }

    #[test]
    fn unknown_proposition() {
        let err = parse("inputs: i\noutputs: o\nforall pi:trace. G x[pi]").unwrap_err();
        assert!(matches!(
            err,
            ParseError::Invalid(Diagnostic { kind: DiagnosticKind::UnknownProposition(ref n), .. }) if n == "x"
        ));
    }

    #[test]
    fn duplicate_variable_is_rejected() {
        let err = parse("exists q:prop. exists q:prop. q").unwrap_err();
        assert!(matches!(
            err,
            ParseError::Invalid(Diagnostic {
                kind: DiagnosticKind::DuplicateVariable(_),
                ..
            })
        ));
    }
}
