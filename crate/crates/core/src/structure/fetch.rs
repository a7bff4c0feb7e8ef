use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use super::StructureError;

/// Public archive download path; `{id}` is replaced by the structure code.
pub const DEFAULT_ENDPOINT: &str = "https://files.rcsb.org/download/{id}.pdb";

/// Minimal HTTP GET abstraction so retrieval can be stubbed in tests.
pub trait Transport {
    fn get(&self, url: &str) -> Result<Vec<u8>, String>;
}

/// Blocking HTTP transport.
#[derive(Debug, Default, Clone, Copy)]
pub struct UreqTransport;

impl Transport for UreqTransport {
    fn get(&self, url: &str) -> Result<Vec<u8>, String> {
        let response = ureq::get(url).call().map_err(|e| e.to_string())?;
        let mut body = Vec::new();
        response
            .into_reader()
            .read_to_end(&mut body)
            .map_err(|e| e.to_string())?;
        Ok(body)
    }
}

#[derive(Debug, Clone)]
pub struct FetchOptions {
    pub endpoint: String,
    pub cache_dir: PathBuf,
    pub offline: bool,
}

impl FetchOptions {
    pub fn new(cache_dir: impl Into<PathBuf>) -> Self {
        Self {
            endpoint: DEFAULT_ENDPOINT.to_string(),
            cache_dir: cache_dir.into(),
            offline: false,
        }
    }

    pub fn cache_path(&self, structure_id: &str) -> PathBuf {
        self.cache_dir
            .join(format!("{}.pdb", structure_id.to_ascii_uppercase()))
    }
}

/// Accepts `[0-9][A-Za-z0-9]{3}`.
pub fn validate_structure_id(id: &str) -> Result<(), StructureError> {
    let bytes = id.as_bytes();
    let ok = bytes.len() == 4
        && bytes[0].is_ascii_digit()
        && bytes[1..].iter().all(|b| b.is_ascii_alphanumeric());
    if ok {
        Ok(())
    } else {
        Err(StructureError::Id(id.to_string()))
    }
}

fn write_atomic(path: &Path, body: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir)?;
    let file_name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = dir.join(format!(".{file_name}.{}.tmp", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(body)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

/// Returns the cached file when present; otherwise performs one GET,
/// stores the body in the cache and returns it.
pub fn fetch_structure(
    structure_id: &str,
    options: &FetchOptions,
    transport: &dyn Transport,
) -> Result<String, StructureError> {
    validate_structure_id(structure_id)?;
    let id = structure_id.to_ascii_uppercase();
    let path = options.cache_path(&id);
    if path.is_file() {
        return Ok(fs::read_to_string(&path)?);
    }
    let fail = |message: String| StructureError::Fetch {
        id: id.clone(),
        message,
    };
    if options.offline {
        return Err(fail(format!("offline and {} is not cached", path.display())));
    }
    let url = options.endpoint.replace("{id}", &id);
    let body = transport.get(&url).map_err(|e| fail(format!("GET {url}: {e}")))?;
    let text = String::from_utf8(body).map_err(|_| fail("response is not UTF-8".into()))?;
    if text.trim().is_empty() {
        return Err(fail("empty response body".into()));
    }
    write_atomic(&path, text.as_bytes())?;
    Ok(text)
}
