//! Abstract syntax, concrete grammar, printing and normal forms.

mod ast;
pub(crate) mod lexer;
mod normal;
pub(crate) mod parser;
mod print;

pub use ast::{Formula, FormulaPath, Primitive, Program, Step, Term, Var};
pub use normal::{eliminate_connectives, is_normal_form, negate, to_normal_form};
pub use parser::{is_reserved, parse_formula, parse_program, parse_term};
