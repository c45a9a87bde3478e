//! Command-line front end for `rndunit`: scenario documents, the run
//! pipeline and its CSV/JSON outputs.

pub mod demo;
pub mod error;
pub mod json;
pub mod output;
pub mod run;
pub mod scenario;

pub use error::CliError;

/// Environment variable capping the worker threads used for time sampling.
pub const THREADS_ENV: &str = "RNDUNIT_THREADS";

/// Thread pool sized by [`THREADS_ENV`], or rayon's default when unset.
pub fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(value) = std::env::var(THREADS_ENV) {
        let n: usize = value
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Config(format!("{THREADS_ENV}: expected a positive integer, got `{value}`")))?;
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| CliError::Config(format!("cannot start worker threads: {e}")))
}
