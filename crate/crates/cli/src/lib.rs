//! File formats, reports and the batch runner behind the `turnpike` binary.

pub mod error;
pub mod model_file;
pub mod profile_csv;
pub mod report;
pub mod run;

pub use error::Error;
pub use model_file::{load_model, parse_model, save_model, to_json};
pub use run::{run, Command, RunConfig};
