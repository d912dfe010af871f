//! Request composition, rate-limited sending, and response processing.

pub mod bugs;
pub mod limiter;
pub mod process;
pub mod request;
pub mod transport;

pub use bugs::{BugLog, BugReport};
pub use limiter::{Clock, SystemClock, TokenBucket, VirtualClock};
pub use process::{deleted_resource, extract_tuples, process_result, update_scores, Deleted};
pub use request::{compose_request, AuthHeader, HttpRequest};
pub use transport::{
    execute, probe, ExecutionResult, HttpResponse, HttpTransport, StatusClass, Transport, TransportError,
};
