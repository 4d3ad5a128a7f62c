use std::fmt::{self, Display, Formatter, Write};

use super::ast::{Formula, Primitive, Program, Term};

fn term_prec(t: &Term) -> u8 {
    match t {
        Term::Add(..) | Term::Monus(..) => 0,
        Term::Mul(..) => 1,
        _ => 2,
    }
}

fn write_term(f: &mut Formatter<'_>, t: &Term, min: u8) -> fmt::Result {
    let paren = term_prec(t) < min;
    if paren {
        f.write_char('(')?;
    }
    match t {
        Term::Num(n) => write!(f, "{n}")?,
        Term::Var(v) => write!(f, "{v}")?,
        Term::Add(l, r) => {
            write_term(f, l, 0)?;
            f.write_char('+')?;
            write_term(f, r, 1)?;
        }
        Term::Monus(l, r) => {
            write_term(f, l, 0)?;
            f.write_char('-')?;
            write_term(f, r, 1)?;
        }
        Term::Mul(l, r) => {
            write_term(f, l, 1)?;
            f.write_char('*')?;
            write_term(f, r, 2)?;
        }
    }
    if paren {
        f.write_char(')')?;
    }
    Ok(())
}

impl Display for Term {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_term(f, self, 0)
    }
}

// 0: conditional, 1: disjunction, 2: conjunction, 3: negation and atoms
fn formula_prec(x: &Formula) -> u8 {
    match x {
        Formula::Cond(..) => 0,
        Formula::Or(..) => 1,
        Formula::And(..) => 2,
        _ => 3,
    }
}

fn write_formula(f: &mut Formatter<'_>, x: &Formula, min: u8) -> fmt::Result {
    let paren = formula_prec(x) < min;
    if paren {
        f.write_char('(')?;
    }
    match x {
        Formula::Top => f.write_str("T")?,
        Formula::Bot => f.write_str("F")?,
        Formula::Eq(l, r) => write!(f, "{l}={r}")?,
        Formula::Le(l, r) => write!(f, "{l}<={r}")?,
        Formula::Assign(v, t) => write!(f, "[{v}:={t}]T")?,
        Formula::Not(g) => {
            f.write_char('!')?;
            if matches!(**g, Formula::Eq(..) | Formula::Le(..)) {
                write!(f, "({g})")?;
            } else {
                write_formula(f, g, 3)?;
            }
        }
        Formula::And(l, r) => {
            write_formula(f, l, 2)?;
            f.write_str(" && ")?;
            write_formula(f, r, 3)?;
        }
        Formula::Or(l, r) => {
            write_formula(f, l, 1)?;
            f.write_str(" || ")?;
            write_formula(f, r, 2)?;
        }
        Formula::Cond(t, c, e) => {
            write_formula(f, t, 1)?;
            f.write_str(" <| ")?;
            write_formula(f, c, 1)?;
            f.write_str(" |> ")?;
            write_formula(f, e, 1)?;
        }
    }
    if paren {
        f.write_char(')')?;
    }
    Ok(())
}

impl Display for Formula {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_formula(f, self, 0)
    }
}

impl Display for Primitive {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        self.to_formula().fmt(f)
    }
}

// 0: union, 1: concatenation, 2: unit
fn program_prec(p: &Program) -> u8 {
    match p {
        Program::Union(..) => 0,
        Program::Seq(..) => 1,
        _ => 2,
    }
}

fn write_program(f: &mut Formatter<'_>, p: &Program, min: u8) -> fmt::Result {
    let paren = program_prec(p) < min;
    if paren {
        f.write_char('(')?;
    }
    match p {
        Program::Assign(v, t) => write!(f, "{v}:={t}")?,
        Program::Test(x) => write!(f, "?({x})")?,
        Program::Halt => f.write_str("halt")?,
        Program::Instr(x) => match x {
            // a bare relation starting with '(' would read as a parenthesized program
            Primitive::Eq(l, _) | Primitive::Le(l, _) if term_prec(l) < 2 => write!(f, "({x})")?,
            _ => write!(f, "{x}")?,
        },
        Program::Write(s) => write!(f, "w[{s}]")?,
        Program::Seq(l, r) => {
            write_program(f, l, 2)?;
            f.write_str("; ")?;
            write_program(f, r, 1)?;
        }
        Program::Union(l, r) => {
            write_program(f, l, 1)?;
            f.write_str(" u ")?;
            write_program(f, r, 0)?;
        }
        Program::Star(b) => {
            f.write_char('(')?;
            write_program(f, b, 0)?;
            f.write_str(")*")?;
        }
    }
    if paren {
        f.write_char(')')?;
    }
    Ok(())
}

impl Display for Program {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_program(f, self, 0)
    }
}

macro_rules! serialize_as_text {
    ($($t:ty),*) => {$(
        impl serde::Serialize for $t {
            fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }
    )*};
}

serialize_as_text!(Term, Formula, Primitive, Program);
