//! Test and suite files on disk.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

use super::HarnessError;
use crate::scenario::ConcreteTest;
use crate::testgen::AbstractTestSequence;

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<(), HarnessError> {
    let mut body = serde_json::to_string_pretty(value).map_err(|e| HarnessError::io(path, e))?;
    body.push('\n');
    std::fs::write(path, body).map_err(|e| HarnessError::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| HarnessError::io(path, e))
}

/// `dir/abstract/<id>.json` and `dir/concrete/<id>.json`.
pub fn write_tests(
    dir: &Path,
    abstracts: &[AbstractTestSequence],
    concrete: &[ConcreteTest],
) -> Result<Vec<PathBuf>, HarnessError> {
    let mut out = Vec::new();
    for (sub, items) in [
        ("abstract", abstracts.iter().map(|a| (&a.id, serde_json::to_value(a))).collect::<Vec<_>>()),
        ("concrete", concrete.iter().map(|c| (&c.id, serde_json::to_value(c))).collect()),
    ] {
        let d = dir.join(sub);
        std::fs::create_dir_all(&d).map_err(|e| HarnessError::io(&d, e))?;
        for (id, value) in items {
            let path = d.join(format!("{id}.json"));
            write_json(&path, &value.map_err(|e| HarnessError::io(&path, e))?)?;
            out.push(path);
        }
    }
    Ok(out)
}

/// Concrete tests from a file or from every `*.json` in a directory, in
/// file-name order.
pub fn load_tests(path: &Path) -> Result<Vec<ConcreteTest>, HarnessError> {
    if !path.exists() {
        return Err(HarnessError::MissingSuite(path.display().to_string()));
    }
    if path.is_file() {
        return Ok(vec![read_json(path)?]);
    }
    let mut files: Vec<PathBuf> = std::fs::read_dir(path)
        .map_err(|e| HarnessError::io(path, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    files.iter().map(|p| read_json(p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testgen::{concretize, random_generate, Generator};

    #[test]
    fn write_then_load() {
        let dir = tempfile::tempdir().unwrap();
        let abs: Vec<AbstractTestSequence> = (1..=3)
            .map(|k| AbstractTestSequence {
                id: format!("rnd-{k:03}"),
                generator: Generator::Random,
                beliefs: None,
                actions: random_generate(&[], 1..=6, k).unwrap(),
            })
            .collect();
        let conc: Vec<ConcreteTest> = abs.iter().map(|a| concretize(a, 7)).collect();
        let files = write_tests(dir.path(), &abs, &conc).unwrap();
        assert_eq!(files.len(), 6);
        assert_eq!(load_tests(&dir.path().join("concrete")).unwrap(), conc);
        assert!(matches!(
            load_tests(&dir.path().join("nope")),
            Err(HarnessError::MissingSuite(_))
        ));
    }
}
