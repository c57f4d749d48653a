//! Versioned JSON container shared by the model file formats.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Envelope<T> {
    format: String,
    version: u32,
    scalar: String,
    body: T,
}

fn scalar_name<F>() -> String {
    std::any::type_name::<F>().to_string()
}

/// Wraps `body` with a format tag, version and scalar type name.
pub fn to_json<F, T: Serialize>(format: &str, body: &T) -> Result<String> {
    let env = Envelope {
        format: format.to_string(),
        version: FORMAT_VERSION,
        scalar: scalar_name::<F>(),
        body,
    };
    serde_json::to_string(&env).map_err(|e| Error::Model(e.to_string()))
}

pub fn from_json<F, T: DeserializeOwned>(format: &str, text: &str) -> Result<T> {
    let env: Envelope<T> = serde_json::from_str(text).map_err(|e| Error::Model(e.to_string()))?;
    if env.format != format {
        return Err(Error::Model(format!("expected a `{}` file, found `{}`", format, env.format)));
    }
    if env.version != FORMAT_VERSION {
        return Err(Error::Model(format!("unsupported version {}", env.version)));
    }
    if env.scalar != scalar_name::<F>() {
        return Err(Error::Model(format!(
            "file stores {} values, {} requested",
            env.scalar,
            scalar_name::<F>()
        )));
    }
    Ok(env.body)
}
