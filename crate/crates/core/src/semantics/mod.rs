//! Valuations, actual and expected evaluation.

mod eval;
mod machine;
mod valuation;

pub use eval::{eval_term, expected_truth, extract_programs, holds, holds_expected, holds_mut};
pub use machine::{
    instruction_trace, run, run_expected, EvalOutcome, ExpectationPolicy, StepBudget, TraceItem,
};
pub use valuation::Valuation;
