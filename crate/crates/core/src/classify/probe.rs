//! Removal/replacement probe execution.
//!
//! A probe is an external command run inside an isolated staging copy of the
//! tree. Staging never touches the original tree; the command is the only
//! side-effecting part of the whole system.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Transcript bound: anything beyond this is dropped from the evidence trail.
pub const TRANSCRIPT_CAP: usize = 64 * 1024;

#[derive(Debug, Error)]
pub enum ProbeError {
    #[error("probe command template still contains placeholder `{0}` after substitution")]
    UnresolvedPlaceholder(String),
    #[error("probe timeout must be greater than zero")]
    ZeroTimeout,
    #[error("invalid probe success pattern: {0}")]
    BadPattern(#[from] regex::Error),
    #[error("probe staging failed for `{file}`: {source}")]
    Staging {
        file: String,
        source: std::io::Error,
    },
    #[error("probe spawn failed: {0}")]
    Spawn(std::io::Error),
}

/// How probe success is judged: the string `"exit0"` or `{ regex = "..." }`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SuccessRepr", into = "SuccessRepr")]
pub enum SuccessCriterion {
    /// Exit code zero.
    #[default]
    ExitZero,
    /// The combined output matches a pattern.
    Regex { regex: String },
}

#[derive(Serialize, Deserialize, Clone)]
#[serde(untagged)]
enum SuccessRepr {
    Name(String),
    Regex { regex: String },
}

impl TryFrom<SuccessRepr> for SuccessCriterion {
    type Error = String;

    fn try_from(repr: SuccessRepr) -> Result<Self, Self::Error> {
        match repr {
            SuccessRepr::Name(s) if s == "exit0" => Ok(SuccessCriterion::ExitZero),
            SuccessRepr::Name(s) => Err(format!(
                "unknown success criterion `{s}` (expected \"exit0\" or {{ regex = \"...\" }})"
            )),
            SuccessRepr::Regex { regex } => Ok(SuccessCriterion::Regex { regex }),
        }
    }
}

impl From<SuccessCriterion> for SuccessRepr {
    fn from(c: SuccessCriterion) -> Self {
        match c {
            SuccessCriterion::ExitZero => SuccessRepr::Name("exit0".to_string()),
            SuccessCriterion::Regex { regex } => SuccessRepr::Regex { regex },
        }
    }
}

/// An external probe command plus its workspace recipe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeSpec {
    /// Command template; `{root}` is replaced by the staged workspace path.
    pub command: String,
    /// Prefix for staging directories; system temp dir when `None`.
    pub staging_prefix: Option<PathBuf>,
    pub success: SuccessCriterion,
    pub timeout: Duration,
}

impl ProbeSpec {
    pub fn new(command: impl Into<String>, timeout_s: u64) -> Self {
        Self {
            command: command.into(),
            staging_prefix: None,
            success: SuccessCriterion::ExitZero,
            timeout: Duration::from_secs(timeout_s),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProbeOutcome {
    Pass,
    Fail,
    Timeout,
}

/// Result of one probe run, transcript capped at [`TRANSCRIPT_CAP`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeReport {
    pub outcome: ProbeOutcome,
    pub exit_code: Option<i32>,
    pub transcript: String,
}

fn copy_tree(src: &Path, dst: &Path, skip: Option<&str>) -> std::io::Result<()> {
    for entry in walkdir::WalkDir::new(src).sort_by_file_name() {
        let entry = entry?;
        let rel = entry
            .path()
            .strip_prefix(src)
            .expect("walkdir yields paths under src");
        if rel.as_os_str().is_empty() {
            continue;
        }
        let rel_str = rel.to_string_lossy().replace('\\', "/");
        if Some(rel_str.as_str()) == skip {
            continue;
        }
        let target = dst.join(rel);
        if entry.file_type().is_dir() {
            fs::create_dir_all(&target)?;
        } else if entry.file_type().is_file() {
            if let Some(parent) = target.parent() {
                fs::create_dir_all(parent)?;
            }
            fs::copy(entry.path(), &target)?;
        }
    }
    Ok(())
}

fn staging_dir(spec: &ProbeSpec) -> std::io::Result<tempfile::TempDir> {
    let mut builder = tempfile::Builder::new();
    builder.prefix("mereoscan-probe-");
    match &spec.staging_prefix {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            builder.tempdir_in(dir)
        }
        None => builder.tempdir(),
    }
}

/// Stages a copy of `root` with `file` removed.
pub fn stage_without(
    root: &Path,
    file: &str,
    spec: &ProbeSpec,
) -> Result<tempfile::TempDir, ProbeError> {
    let dir = staging_dir(spec).map_err(|source| ProbeError::Staging {
        file: file.to_string(),
        source,
    })?;
    copy_tree(root, dir.path(), Some(file)).map_err(|source| ProbeError::Staging {
        file: file.to_string(),
        source,
    })?;
    Ok(dir)
}

/// Stages a copy of `root` with `file` replaced by the stub's contents.
pub fn stage_with_stub(
    root: &Path,
    file: &str,
    stub: &Path,
    spec: &ProbeSpec,
) -> Result<tempfile::TempDir, ProbeError> {
    let dir = stage_without(root, file, spec)?;
    let target = dir.path().join(file);
    let io = |source| ProbeError::Staging {
        file: file.to_string(),
        source,
    };
    if let Some(parent) = target.parent() {
        fs::create_dir_all(parent).map_err(io)?;
    }
    fs::copy(stub, &target).map_err(io)?;
    Ok(dir)
}

/// Executes the probe command inside `staged_root`.
///
/// The command runs under `sh -c` with `{root}` substituted; a missing
/// command therefore surfaces as a failing exit status (127), not an error.
pub fn run_probe(spec: &ProbeSpec, staged_root: &Path) -> Result<ProbeReport, ProbeError> {
    if spec.timeout.is_zero() {
        return Err(ProbeError::ZeroTimeout);
    }
    let command = spec
        .command
        .replace("{root}", &staged_root.to_string_lossy());
    if let Some(open) = command.find('{') {
        let close = command[open..].find('}').map(|c| open + c + 1).unwrap_or(command.len());
        return Err(ProbeError::UnresolvedPlaceholder(
            command[open..close].to_string(),
        ));
    }
    let matcher = match &spec.success {
        SuccessCriterion::Regex { regex } => Some(Regex::new(regex)?),
        SuccessCriterion::ExitZero => None,
    };

    let mut cmd = Command::new("sh");
    cmd.arg("-c")
        .arg(&command)
        .current_dir(staged_root)
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped());
    // the probe gets its own process group so a timeout can take down any
    // grandchildren still holding the output pipes
    #[cfg(unix)]
    {
        use std::os::unix::process::CommandExt;
        cmd.process_group(0);
    }
    let mut child = cmd.spawn().map_err(ProbeError::Spawn)?;

    // drain each pipe fully (closing early would SIGPIPE chatty probes) but
    // retain only the first TRANSCRIPT_CAP bytes
    let read_capped = |stream: Option<Box<dyn Read + Send>>| {
        std::thread::spawn(move || {
            let mut buf = Vec::new();
            let Some(mut s) = stream else {
                return buf;
            };
            let mut chunk = [0u8; 8192];
            loop {
                match s.read(&mut chunk) {
                    Ok(0) | Err(_) => break,
                    Ok(n) => {
                        if buf.len() < TRANSCRIPT_CAP {
                            let keep = (TRANSCRIPT_CAP - buf.len()).min(n);
                            buf.extend_from_slice(&chunk[..keep]);
                        }
                    }
                }
            }
            buf
        })
    };
    let stdout = read_capped(child.stdout.take().map(|s| Box::new(s) as _));
    let stderr = read_capped(child.stderr.take().map(|s| Box::new(s) as _));

    let deadline = Instant::now() + spec.timeout;
    let status = loop {
        match child.try_wait().map_err(ProbeError::Spawn)? {
            Some(status) => break Some(status),
            None if Instant::now() >= deadline => {
                #[cfg(unix)]
                unsafe {
                    libc::kill(-(child.id() as i32), libc::SIGKILL);
                }
                let _ = child.kill();
                let _ = child.wait();
                break None;
            }
            None => std::thread::sleep(Duration::from_millis(10)),
        }
    };

    let mut transcript_bytes = stdout.join().unwrap_or_default();
    transcript_bytes.extend(stderr.join().unwrap_or_default());
    transcript_bytes.truncate(TRANSCRIPT_CAP);
    let transcript = String::from_utf8_lossy(&transcript_bytes).into_owned();

    let report = match status {
        None => ProbeReport {
            outcome: ProbeOutcome::Timeout,
            exit_code: None,
            transcript,
        },
        Some(status) => {
            let passed = match &matcher {
                Some(re) => re.is_match(&transcript),
                None => status.success(),
            };
            ProbeReport {
                outcome: if passed {
                    ProbeOutcome::Pass
                } else {
                    ProbeOutcome::Fail
                },
                exit_code: status.code(),
                transcript,
            }
        }
    };
    Ok(report)
}
