//! Extract Method suggestion pipeline.
//!
//! Candidate fragments come from a language model (or a recorded replay of
//! one); static analysis over a lexical statement model decides which of
//! them can be extracted at all, which are worth extracting, adjusts them,
//! ranks them and finally performs the extraction.

pub mod enhance;
pub mod eval;
pub mod extract;
pub mod filter;
pub mod llm;
pub mod model;
pub mod pipeline;
pub mod rank;
pub mod suggestion;

pub use filter::{triage, FilterConfig, Triage};
pub use model::{parse_method, LineSpan, LongMethod, ParseError, Statement, StmtKind};
pub use suggestion::{ExtractSuggestion, ReasonCode, SuggestionSet, Verdict, VerdictClass};
