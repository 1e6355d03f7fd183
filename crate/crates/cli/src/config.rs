//! Run configuration files.
//!
//! Each command's options double as its configuration record. A `--config`
//! JSON file supplies values; options given on the command line take
//! precedence. After defaults are filled in, the complete record is written
//! to `run_config.json` in the output directory.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, CliResult};
use crate::formats::{read_json, write_json};

pub const RUN_CONFIG_FILE: &str = "run_config.json";

/// Command-line values count as given unless they are null, `false` or an empty list.
fn is_unset(v: &Value) -> bool {
    matches!(v, Value::Null | Value::Bool(false)) || v.as_array().is_some_and(|a| a.is_empty())
}

/// Overlays the options given on the command line onto the config file.
pub fn merge<T: Serialize + DeserializeOwned>(flags: T, config: Option<&Path>) -> CliResult<T> {
    let Some(path) = config else {
        return Ok(flags);
    };
    let mut base: Value = read_json(path)?;
    let Some(base_map) = base.as_object_mut() else {
        return Err(CliError::input(format!("{}: config must be a JSON object", path.display())));
    };
    base_map.remove("command");
    let over = serde_json::to_value(&flags).expect("options serialize");
    if let Value::Object(over) = over {
        for (key, value) in over {
            if !is_unset(&value) {
                base_map.insert(key, value);
            }
        }
    }
    serde_json::from_value(base).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

#[derive(Serialize)]
struct Emitted<'a, T> {
    command: &'a str,
    #[serde(flatten)]
    options: &'a T,
}

pub fn emit<T: Serialize>(dir: &Path, command: &str, options: &T) -> CliResult<()> {
    write_json(&dir.join(RUN_CONFIG_FILE), &Emitted { command, options })
}
