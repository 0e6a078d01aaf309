use std::fs;
use std::path::Path;

use crate::CliError;

pub fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Whitespace-separated integers, any number per line.
pub fn integers(text: &str) -> Result<Vec<i64>, CliError> {
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        for word in line.split_whitespace() {
            let v = word
                .parse::<i64>()
                .map_err(|_| CliError::Parse { line: no + 1, message: format!("expected an integer, got `{word}`") })?;
            out.push(v);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integers_report_the_line() {
        assert_eq!(integers("1 2\n\n-3\t4\n").unwrap(), vec![1, 2, -3, 4]);
        match integers("1\n2 x") {
            Err(CliError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }
}
