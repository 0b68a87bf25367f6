use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use regcode::construction::CodeSpec;
use regcode::designs::BlockDesign;

/// Why a command stopped. Domain and I/O problems exit with 1, usage with 2.
#[derive(Debug)]
pub enum Failure {
    Domain(regcode::Error),
    Io(String),
    Usage(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Domain(_) | Failure::Io(_) => 1,
            Failure::Usage(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Domain(e) => write!(f, "{e}"),
            Failure::Io(s) | Failure::Usage(s) => f.write_str(s),
        }
    }
}

impl From<regcode::Error> for Failure {
    fn from(e: regcode::Error) -> Self {
        Failure::Domain(e)
    }
}

pub fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

pub fn read_bytes(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

/// Writes to `out` if given, else stdout. A trailing newline is added for stdout.
pub fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => write_bytes(p, text.as_bytes()),
        None => {
            if text.ends_with('\n') {
                print!("{text}");
            } else {
                println!("{text}");
            }
            Ok(())
        }
    }
}

pub fn load_design(path: &Path) -> Result<BlockDesign, Failure> {
    Ok(BlockDesign::from_json(&read_text(path)?)?)
}

pub fn load_spec(path: &Path) -> Result<CodeSpec, Failure> {
    Ok(CodeSpec::from_json(&read_text(path)?)?)
}

pub fn load_message(path: &Path) -> Result<Vec<u64>, Failure> {
    serde_json::from_str(&read_text(path)?)
        .map_err(|e| Failure::Io(format!("{}: expected a JSON array of integers: {e}", path.display())))
}

pub fn share_path(dir: &Path, disk: u32) -> PathBuf {
    dir.join(format!("disk_{disk}.rgc"))
}

pub fn pretty(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}
