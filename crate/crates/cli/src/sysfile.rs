//! Input files: a `vars:` header line, then one polynomial per line.
//!
//! ```text
//! vars: x,y
//! # comments and blank lines are skipped
//! -8*x^2 - x*y - 7*y^2 + 5238*x - 11582*y - 7696
//! 4*x*y - 10*y^2 - 2313*x - 16372*y - 6462
//! ```

use std::fmt;
use std::path::Path;

use fieldprobe::mpoly::PolyError;
use fieldprobe::PolySystem;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemFile {
    pub vars: Vec<String>,
    pub system: PolySystem,
}

/// Parse failure with a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for FileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

fn at(line: usize, column: usize, message: impl Into<String>) -> FileError {
    FileError {
        line,
        column,
        message: message.into(),
    }
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn parse_header(line: &str) -> Result<Vec<String>, FileError> {
    let Some(rest) = line.strip_prefix("vars:") else {
        return Err(at(1, 1, "first line must be `vars: x,y,...`"));
    };
    let mut column = "vars:".len() + 1;
    let mut vars: Vec<String> = Vec::new();
    for raw in rest.split(',') {
        let lead = raw.len() - raw.trim_start().len();
        let name = raw.trim();
        if !valid_name(name) {
            return Err(at(1, column + lead, format!("invalid variable name `{name}`")));
        }
        if vars.iter().any(|v| v == name) {
            return Err(at(1, column + lead, format!("duplicate variable `{name}`")));
        }
        vars.push(name.to_string());
        column += raw.chars().count() + 1;
    }
    Ok(vars)
}

impl SystemFile {
    pub fn parse(text: &str) -> Result<Self, FileError> {
        let text = text.strip_prefix('\u{feff}').unwrap_or(text);
        let mut lines = text.split('\n').map(|l| l.strip_suffix('\r').unwrap_or(l));
        let header = lines.next().unwrap_or_default();
        let vars = parse_header(header)?;
        let mut polys = Vec::new();
        for (i, line) in lines.enumerate() {
            let lineno = i + 2;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let f = fieldprobe::mpoly::parse(line, &vars).map_err(|e| match e {
                PolyError::Syntax { column, message } => at(lineno, column, message),
                PolyError::UnknownVariable { name, column } => {
                    at(lineno, column, format!("unknown variable `{name}`"))
                }
                other => at(lineno, 1, other.to_string()),
            })?;
            polys.push(f);
        }
        let system = PolySystem::new(vars.len(), polys).map_err(|e| at(1, 1, e.to_string()))?;
        Ok(SystemFile { vars, system })
    }

    pub fn read(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Self::parse(&text).map_err(|e| format!("{}:{e}", path.display()))
    }
}
