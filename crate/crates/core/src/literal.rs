//! `key=value` literals whose values may contain spaces.

use crate::error::{Error, Result};

/// Splits `text` into fields; a token without `=` continues the previous
/// value. Keys must come from `keys` and appear at most once.
pub(crate) fn key_values<'a>(
    text: &'a str,
    keys: &[&str],
    what: &str,
) -> Result<Vec<(&'a str, String)>> {
    let mut fields: Vec<(&str, String)> = Vec::new();
    for token in text.split_whitespace() {
        match token.split_once('=') {
            Some((key, value)) if keys.contains(&key) => {
                if fields.iter().any(|(k, _)| *k == key) {
                    return Err(Error::Syntax(format!("repeated {what} field `{key}`")));
                }
                fields.push((key, value.to_string()));
            }
            Some((key, _)) => return Err(Error::Syntax(format!("unknown {what} field `{key}`"))),
            None => match fields.last_mut() {
                Some((_, value)) => {
                    value.push(' ');
                    value.push_str(token);
                }
                None => {
                    return Err(Error::Syntax(format!(
                        "expected `key=value`, found `{token}`"
                    )))
                }
            },
        }
    }
    Ok(fields)
}

pub(crate) fn get<'a>(fields: &'a [(&str, String)], key: &str) -> Option<&'a str> {
    fields
        .iter()
        .find(|(k, _)| *k == key)
        .map(|(_, v)| v.as_str())
}
