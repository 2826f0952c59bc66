//! Datalog-style syntax for Boolean conjunctive queries and denial
//! constraints.
//!
//! ```text
//! Q :- S(x), R(x,y), S(y)      # a query (any head name)
//! :- P(x), Q(x,y)              # a denial constraint (headless)
//! ```
//!
//! One rule per line, `#` starts a comment, a trailing `.` is allowed.

use super::{is_variable_name, Atom, BooleanQuery, DenialConstraint, RelError, Schema, Term};

pub fn parse_query(text: &str, schema: &Schema) -> Result<BooleanQuery, RelError> {
    let mut qs = parse_queries(text, schema)?;
    match qs.len() {
        1 => Ok(qs.pop().unwrap()),
        0 => Err(syntax(1, 1, "expected a query")),
        n => Err(syntax(1, 1, &format!("expected one query, found {n}"))),
    }
}

pub fn parse_queries(text: &str, schema: &Schema) -> Result<Vec<BooleanQuery>, RelError> {
    parse_rules(text)?
        .into_iter()
        .map(|r| match r.head {
            Some(_) => BooleanQuery::new(r.body, schema),
            None => Err(syntax(r.line, 1, "query needs a head, e.g. `Q :- ...`")),
        })
        .collect()
}

pub fn parse_constraint(text: &str, schema: &Schema) -> Result<DenialConstraint, RelError> {
    let mut dcs = parse_constraints(text, schema)?;
    match dcs.len() {
        1 => Ok(dcs.pop().unwrap()),
        0 => Err(syntax(1, 1, "expected a denial constraint")),
        n => Err(syntax(1, 1, &format!("expected one constraint, found {n}"))),
    }
}

pub fn parse_constraints(text: &str, schema: &Schema) -> Result<Vec<DenialConstraint>, RelError> {
    parse_rules(text)?
        .into_iter()
        .map(|r| match r.head {
            None => DenialConstraint::new(r.body, schema),
            Some(_) => Err(syntax(r.line, 1, "denial constraints are headless: `:- ...`")),
        })
        .collect()
}

fn syntax(line: usize, col: usize, msg: &str) -> RelError {
    RelError::Syntax { line, col, msg: msg.to_string() }
}

struct Rule {
    line: usize,
    head: Option<String>,
    body: Vec<Atom>,
}

fn parse_rules(text: &str) -> Result<Vec<Rule>, RelError> {
    let mut rules = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let mut p = LineParser { chars: raw.chars().collect(), pos: 0, line: i + 1 };
        p.skip_ws();
        if p.at_end() {
            continue;
        }
        rules.push(p.rule()?);
    }
    Ok(rules)
}

struct LineParser {
    chars: Vec<char>,
    pos: usize,
    line: usize,
}

impl LineParser {
    fn err(&self, msg: &str) -> RelError {
        syntax(self.line, self.pos + 1, msg)
    }

    fn at_end(&self) -> bool {
        self.pos >= self.chars.len() || self.chars[self.pos] == '#'
    }

    fn peek(&self) -> Option<char> {
        if self.at_end() {
            None
        } else {
            Some(self.chars[self.pos])
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: char) -> Result<(), RelError> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected `{c}`")))
        }
    }

    fn rule(&mut self) -> Result<Rule, RelError> {
        let line = self.line;
        let head = if self.peek() == Some(':') {
            None
        } else {
            let h = self.ident()?;
            self.skip_ws();
            if self.peek() == Some('(') {
                self.pos += 1;
                self.expect(')')?;
            }
            Some(h)
        };
        self.expect(':')?;
        if self.peek() != Some('-') {
            return Err(self.err("expected `:-`"));
        }
        self.pos += 1;
        let mut body = vec![self.atom()?];
        loop {
            self.skip_ws();
            match self.peek() {
                Some(',') => {
                    self.pos += 1;
                    body.push(self.atom()?);
                }
                Some('.') => {
                    self.pos += 1;
                    self.skip_ws();
                    if !self.at_end() {
                        return Err(self.err("unexpected input after `.`"));
                    }
                    break;
                }
                None => break,
                Some(_) => return Err(self.err("expected `,` or end of rule")),
            }
        }
        Ok(Rule { line, head, body })
    }

    fn ident(&mut self) -> Result<String, RelError> {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || c == '_' {
                self.pos += 1;
            } else {
                break;
            }
        }
        if start == self.pos || !self.chars[start].is_alphabetic() {
            self.pos = start;
            return Err(self.err("expected an identifier"));
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn atom(&mut self) -> Result<Atom, RelError> {
        let pred = self.ident()?;
        self.expect('(')?;
        let mut terms = vec![self.term()?];
        loop {
            self.skip_ws();
            match self.peek() {
                Some(',') => {
                    self.pos += 1;
                    terms.push(self.term()?);
                }
                Some(')') => {
                    self.pos += 1;
                    break;
                }
                _ => return Err(self.err("expected `,` or `)`")),
            }
        }
        Ok(Atom { pred, terms })
    }

    fn term(&mut self) -> Result<Term, RelError> {
        self.skip_ws();
        match self.peek() {
            Some(q @ ('\'' | '"')) => {
                self.pos += 1;
                let mut s = String::new();
                loop {
                    match self.chars.get(self.pos) {
                        None => return Err(self.err("unterminated string")),
                        Some('\\') if self.chars.get(self.pos + 1).is_some() => {
                            s.push(self.chars[self.pos + 1]);
                            self.pos += 2;
                        }
                        Some(&c) if c == q => {
                            self.pos += 1;
                            return Ok(Term::Const(s));
                        }
                        Some(&c) => {
                            s.push(c);
                            self.pos += 1;
                        }
                    }
                }
            }
            Some('?') => {
                self.pos += 1;
                let name = self.ident()?;
                Ok(Term::Var(name))
            }
            Some(_) => {
                let start = self.pos;
                while let Some(c) = self.peek() {
                    if c.is_alphanumeric() || matches!(c, '_' | '.' | '-' | '\'') {
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                if start == self.pos {
                    return Err(self.err("expected a term"));
                }
                let tok: String = self.chars[start..self.pos].iter().collect();
                if is_variable_name(&tok) {
                    Ok(Term::Var(tok))
                } else {
                    Ok(Term::Const(tok))
                }
            }
            None => Err(self.err("expected a term")),
        }
    }
}
