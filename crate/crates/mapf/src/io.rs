//! Loading movingai `.map` / `.scen` pairs from disk.

use std::fs;
use std::path::{Path, PathBuf};

use mapf_core::instance::{
    build_instance, parse_map, parse_scen, AgentSpec, Graph, InstanceError, MapParseError, ScenParseError,
};
use mapf_core::MapfInstance;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}")]
    Map {
        path: PathBuf,
        #[source]
        source: MapParseError,
    },
    #[error("{path}")]
    Scen {
        path: PathBuf,
        #[source]
        source: ScenParseError,
    },
    #[error("{path}")]
    Instance {
        path: PathBuf,
        #[source]
        source: InstanceError,
    },
    #[error("{0}: scenario names no map")]
    NoMapName(PathBuf),
}

impl LoadError {
    /// Malformed input, as opposed to a missing or unreadable file.
    pub fn is_parse_error(&self) -> bool {
        !matches!(self, LoadError::Io { .. })
    }
}

fn read(path: &Path) -> Result<String, LoadError> {
    fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_map(path: &Path) -> Result<Graph, LoadError> {
    parse_map(&read(path)?).map_err(|source| LoadError::Map {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_scen(path: &Path) -> Result<Vec<AgentSpec>, LoadError> {
    parse_scen(&read(path)?).map_err(|source| LoadError::Scen {
        path: path.to_path_buf(),
        source,
    })
}

/// Instance built from the first `agents` entries of a scenario.
pub fn load_instance(map: &Path, scen: &Path, agents: usize) -> Result<MapfInstance, LoadError> {
    let graph = load_map(map)?;
    let specs = load_scen(scen)?;
    build_instance(graph, &specs, agents).map_err(|source| LoadError::Instance {
        path: scen.to_path_buf(),
        source,
    })
}

/// The map a scenario refers to, resolved next to the scenario file.
pub fn paired_map(scen: &Path) -> Result<PathBuf, LoadError> {
    let specs = load_scen(scen)?;
    let name = specs
        .first()
        .map(|s| s.map_name.clone())
        .ok_or_else(|| LoadError::NoMapName(scen.to_path_buf()))?;
    let file = Path::new(&name).file_name().map(PathBuf::from).unwrap_or_else(|| PathBuf::from(&name));
    Ok(scen.parent().unwrap_or(Path::new(".")).join(file))
}

/// Identifier used in reports: the scenario's file stem.
pub fn instance_id(scen: &Path) -> String {
    scen.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loads_a_pair() {
        let dir = tempfile::tempdir().unwrap();
        let map = dir.path().join("m.map");
        let scen = dir.path().join("m.scen");
        fs::write(&map, "type octile\nheight 2\nwidth 2\nmap\n..\n..\n").unwrap();
        fs::write(&scen, "version 1\n0\tm.map\t2\t2\t0\t0\t1\t1\t2\n0\tm.map\t2\t2\t1\t1\t0\t0\t2\n").unwrap();
        assert_eq!(paired_map(&scen).unwrap(), map);
        let inst = load_instance(&map, &scen, 2).unwrap();
        assert_eq!(inst.agent_count(), 2);
        assert_eq!(instance_id(&scen), "m");
    }

    #[test]
    fn error_kinds() {
        let dir = tempfile::tempdir().unwrap();
        let missing = load_map(&dir.path().join("none.map")).unwrap_err();
        assert!(!missing.is_parse_error());
        let bad = dir.path().join("bad.map");
        fs::write(&bad, "type octile\nheight 1\nwidth 1\nmap\n?\n").unwrap();
        let err = load_map(&bad).unwrap_err();
        assert!(err.is_parse_error());
        let cause = std::error::Error::source(&err).unwrap().to_string();
        assert!(cause.contains("line 5"), "{cause}");
    }
}
