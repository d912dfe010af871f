//! Black-box stateful fuzzing of REST APIs guided by the tree formed by
//! their endpoint paths.
//!
//! The pipeline: [`spec`] parses an OpenAPI or Swagger document, [`tree`]
//! arranges its operations into a path forest, [`generation`] turns the
//! forest into test cases bound from the [`pool`] of earlier responses
//! (matched by [`matching`]), [`execution`] sends them, and [`campaign`]
//! drives the loop and writes reports. [`mock`] holds in-process targets.

pub mod campaign;
pub mod error;
pub mod execution;
pub mod generation;
pub mod matching;
pub mod mock;
pub mod pool;
pub mod spec;
pub mod sweep;
pub mod tree;

pub use campaign::{run, run_campaign, RunConfig, RunMetrics, RunOutcome};
pub use error::{AnnotationError, ConfigError, RequestError, RunError, SpecError};
pub use generation::{GenOptions, Session, Strategy, StrategyKind, TestCase};
pub use matching::{AnnotationTable, PairStore, ScoreParams};
pub use spec::{parse_spec, ApiSpec, FormatHint, Method};
pub use tree::ApiForest;
