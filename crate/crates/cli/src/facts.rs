use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use neurovariety::bounds::{DimensionFact, FactsRegistry};

/// Reads a facts file; a missing file is an empty registry.
pub fn load(path: &Path) -> Result<FactsRegistry> {
    let mut registry = FactsRegistry::new();
    if !path.exists() {
        return Ok(registry);
    }
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let facts: Vec<DimensionFact> =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    for f in &facts {
        f.check().with_context(|| format!("fact for {} in {}", f.arch, path.display()))?;
    }
    registry.merge_all(facts)?;
    Ok(registry)
}

/// Writes through a sibling temporary file and a rename, so readers never
/// see a partial file.
pub fn save(path: &Path, registry: &FactsRegistry) -> Result<()> {
    let json = serde_json::to_string_pretty(&registry.to_json())?;
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp{}", std::process::id()));
    let tmp = Path::new(&tmp);
    let mut file = fs::File::create(tmp).with_context(|| format!("creating {}", tmp.display()))?;
    file.write_all(json.as_bytes())?;
    file.write_all(b"\n")?;
    file.sync_all()?;
    fs::rename(tmp, path).with_context(|| format!("replacing {}", path.display()))?;
    Ok(())
}
