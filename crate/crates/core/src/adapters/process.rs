use std::io::Read;
use std::path::Path;
use std::process::{Command, Stdio};
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use wait_timeout::ChildExt;

use crate::error::{Error, Result};

/// Default per-invocation limit for external backends.
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(120);

/// An external executable plus its argument template.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommandSpec {
    pub program: String,
    pub args: Vec<String>,
}

impl CommandSpec {
    /// Splits a command line on whitespace. No shell quoting is interpreted.
    pub fn parse(line: &str) -> Result<Self> {
        let mut parts = line.split_whitespace().map(str::to_string);
        let program = parts
            .next()
            .ok_or_else(|| Error::config("empty backend command"))?;
        Ok(Self {
            program,
            args: parts.collect(),
        })
    }
}

pub(crate) struct Captured {
    pub stdout: String,
    pub stderr: String,
}

/// Runs `program args...` inside `work_dir`, capturing both streams.
/// A non-zero exit is reported with the captured stderr.
pub(crate) fn run_captured(
    program: &str,
    args: &[String],
    work_dir: &Path,
    timeout: Duration,
) -> Result<Captured> {
    let mut child = Command::new(program)
        .args(args)
        .current_dir(work_dir)
        .env("EFF_WORK_DIR", work_dir)
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| Error::Backend {
            message: format!("failed to start '{program}': {e}"),
            stderr: String::new(),
        })?;

    let mut stdout = child.stdout.take().expect("piped stdout");
    let mut stderr = child.stderr.take().expect("piped stderr");
    let out_reader = thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = stdout.read_to_end(&mut buf);
        buf
    });
    let err_reader = thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = stderr.read_to_end(&mut buf);
        buf
    });

    let status = match child.wait_timeout(timeout)? {
        Some(status) => status,
        None => {
            let _ = child.kill();
            let _ = child.wait();
            return Err(Error::Timeout(timeout));
        }
    };
    let stdout = String::from_utf8_lossy(&out_reader.join().unwrap_or_default()).into_owned();
    let stderr = String::from_utf8_lossy(&err_reader.join().unwrap_or_default()).into_owned();
    if !status.success() {
        return Err(Error::Backend {
            message: format!("'{program}' exited with {status}"),
            stderr,
        });
    }
    Ok(Captured { stdout, stderr })
}
