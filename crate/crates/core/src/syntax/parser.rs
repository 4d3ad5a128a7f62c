use super::ast::{Formula, Primitive, Program, Term, Var};
use super::lexer::{tokenize, Spanned, Tok};
use crate::error::{Error, Result};

const RESERVED: &[&str] = &[
    "T", "F", "u", "halt", "SKIP", "ABORT", "IF", "THEN", "ELSE", "WHILE", "DO",
];

pub fn is_reserved(name: &str) -> bool {
    RESERVED.contains(&name)
}

pub fn parse_program(src: &str) -> Result<Program> {
    let mut p = Parser::new(src)?;
    let prog = p.program()?;
    p.finish()?;
    Ok(prog)
}

pub fn parse_formula(src: &str) -> Result<Formula> {
    let mut p = Parser::new(src)?;
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

pub fn parse_term(src: &str) -> Result<Term> {
    let mut p = Parser::new(src)?;
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

/// Token-stream parser shared by the DL, toy-language and PGA front ends.
pub(crate) struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    /// Accept `v := t` as a formula atom (toy-language Boolean expressions).
    pub bare_assign: bool,
}

impl Parser {
    pub fn new(src: &str) -> Result<Self> {
        Ok(Parser { toks: tokenize(src)?, pos: 0, bare_assign: false })
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    pub fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    pub fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub fn mark(&self) -> usize {
        self.pos
    }

    pub fn reset(&mut self, m: usize) {
        self.pos = m;
    }

    pub fn error(&self, msg: impl Into<String>) -> Error {
        let s = &self.toks[self.pos];
        Error::Syntax { line: s.line, col: s.col, msg: msg.into() }
    }

    pub fn unexpected(&self, wanted: &str) -> Error {
        self.error(format!("expected {wanted}, found {}", self.peek().describe()))
    }

    pub fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, t: &Tok, wanted: &str) -> Result<()> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.unexpected(wanted))
        }
    }

    pub fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    pub fn expect_keyword(&mut self, kw: &str) -> Result<()> {
        if self.is_keyword(kw) {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(kw))
        }
    }

    pub fn finish(&self) -> Result<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    pub fn ident(&mut self) -> Result<Var> {
        match self.peek().clone() {
            Tok::Ident(s) if !is_reserved(&s) => {
                self.bump();
                Ok(Var::new(&s))
            }
            _ => Err(self.unexpected("a variable")),
        }
    }

    // program := seq ["u" program]
    pub fn program(&mut self) -> Result<Program> {
        let left = self.seq()?;
        if self.is_keyword("u") {
            self.bump();
            let right = self.program()?;
            return Ok(Program::union(left, right));
        }
        Ok(left)
    }

    fn seq(&mut self) -> Result<Program> {
        let mut units = vec![self.unit()?];
        while self.eat(&Tok::Semi) {
            units.push(self.unit()?);
        }
        Ok(Program::seq_all(units))
    }

    fn unit(&mut self) -> Result<Program> {
        match self.peek().clone() {
            Tok::Ident(s) if s == "halt" => {
                self.bump();
                Ok(Program::Halt)
            }
            Tok::Ident(s) if !is_reserved(&s) && *self.peek_at(1) == Tok::ColonEq => {
                self.bump();
                self.bump();
                let t = self.term()?;
                Ok(Program::Assign(Var::new(&s), t))
            }
            Tok::Write(body) => {
                self.bump();
                Ok(Program::Write(body))
            }
            Tok::Question => {
                self.bump();
                self.expect(&Tok::LParen, "'(' after '?'")?;
                let f = self.formula()?;
                self.expect(&Tok::RParen, "')' closing the test")?;
                Ok(Program::Test(f))
            }
            Tok::LParen => {
                let m = self.mark();
                self.bump();
                let first_err = match self.program() {
                    Ok(p) if self.eat(&Tok::RParen) => {
                        if self.eat(&Tok::Star) {
                            return Ok(Program::star(p));
                        }
                        return Ok(p);
                    }
                    Ok(_) => self.unexpected("')'"),
                    Err(e) => e,
                };
                self.reset(m);
                match self.primitive() {
                    Ok(p) => Ok(Program::Instr(p)),
                    Err(_) => Err(first_err),
                }
            }
            _ => self.primitive().map(Program::Instr),
        }
    }

    pub fn primitive(&mut self) -> Result<Primitive> {
        let f = self.atom()?;
        match f.as_primitive() {
            Some(p) => Ok(p),
            None => Err(self.error(format!("{f} is not a primitive formula"))),
        }
    }

    // formula := disj ["<|" formula "|>" formula]
    pub fn formula(&mut self) -> Result<Formula> {
        let then = self.disj()?;
        if self.eat(&Tok::CondL) {
            let cond = self.formula()?;
            self.expect(&Tok::CondR, "'|>'")?;
            let else_ = self.formula()?;
            return Ok(Formula::cond(then, cond, else_));
        }
        Ok(then)
    }

    fn disj(&mut self) -> Result<Formula> {
        let mut f = self.conj()?;
        while self.eat(&Tok::OrOr) {
            f = Formula::or(f, self.conj()?);
        }
        Ok(f)
    }

    fn conj(&mut self) -> Result<Formula> {
        let mut f = self.atomneg()?;
        while self.eat(&Tok::AndAnd) {
            f = Formula::and(f, self.atomneg()?);
        }
        Ok(f)
    }

    fn atomneg(&mut self) -> Result<Formula> {
        if self.eat(&Tok::Bang) {
            return Ok(Formula::not(self.atomneg()?));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Formula> {
        match self.peek().clone() {
            Tok::Ident(s) if s == "T" => {
                self.bump();
                Ok(Formula::Top)
            }
            Tok::Ident(s) if s == "F" => {
                self.bump();
                Ok(Formula::Bot)
            }
            Tok::LBrack => {
                self.bump();
                let v = self.ident()?;
                self.expect(&Tok::ColonEq, "':='")?;
                let t = self.term()?;
                self.expect(&Tok::RBrack, "']'")?;
                self.expect_keyword("T")?;
                Ok(Formula::Assign(v, t))
            }
            Tok::Ident(s)
                if self.bare_assign && !is_reserved(&s) && *self.peek_at(1) == Tok::ColonEq =>
            {
                self.bump();
                self.bump();
                let t = self.term()?;
                Ok(Formula::Assign(Var::new(&s), t))
            }
            Tok::LParen => {
                let m = self.mark();
                if let Ok(f) = self.relation() {
                    return Ok(f);
                }
                self.reset(m);
                self.bump();
                let f = self.formula()?;
                self.expect(&Tok::RParen, "')'")?;
                Ok(f)
            }
            _ => self.relation(),
        }
    }

    fn relation(&mut self) -> Result<Formula> {
        let l = self.term()?;
        if self.eat(&Tok::Eq) {
            Ok(Formula::Eq(l, self.term()?))
        } else if self.eat(&Tok::Le) {
            Ok(Formula::Le(l, self.term()?))
        } else {
            Err(self.unexpected("'=' or '<='"))
        }
    }

    // term := factor (("+"|"-") factor)*
    pub fn term(&mut self) -> Result<Term> {
        let mut t = self.factor()?;
        loop {
            if self.eat(&Tok::Plus) {
                t = Term::add(t, self.factor()?);
            } else if self.eat(&Tok::Minus) {
                t = Term::monus(t, self.factor()?);
            } else {
                return Ok(t);
            }
        }
    }

    fn factor(&mut self) -> Result<Term> {
        let mut t = self.prim()?;
        while self.eat(&Tok::Star) {
            t = Term::mul(t, self.prim()?);
        }
        Ok(t)
    }

    fn prim(&mut self) -> Result<Term> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                Ok(Term::Num(n))
            }
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(&Tok::RParen, "')'")?;
                Ok(t)
            }
            _ => Ok(Term::Var(self.ident()?)),
        }
    }
}
