//! Ground-truth semantics over finite sets of ultimately periodic traces.

mod eval;
mod lasso;
mod system;
mod traceset;

pub use eval::{
    check_forall_stream, eval, eval_knowledge, holds, in_witness_class, signal_lasso, witness_prefix_bound, Assignment,
    CompiledFormula, EvalError, EvalOptions, StreamVerdict, Verdict, DEFAULT_ALIGN_CAP, DEFAULT_PROP_BOUND,
};
pub use lasso::{gcd, lcm, replace, Lasso, LassoError, LassoTrace, Valuation};
pub use system::{
    bits_to_trace, maximal_loop_lengths, system_trace_stream, system_traces, InputLassos, SystemTraceError,
};
pub use traceset::{parse_lasso, LassoDisplay, TraceSet, TraceSetParseError};
