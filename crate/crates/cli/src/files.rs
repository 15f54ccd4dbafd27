//! Reading inputs and writing outputs atomically.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use cone_tutte::harmonic::{weight_scheme, EdgeWeights, WeightScheme};
use cone_tutte::io::{self, Artifact, DrawingFile, MeshFile, PolygonFile, WeightsFile};
use cone_tutte::mesh::{PlanarDrawing, TargetPolygon, Triangulation};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Default range for `--weights random` without explicit bounds.
const RANDOM_WEIGHT_RANGE: (f64, f64) = (0.1, 10.0);

/// Fail before any work when an input is missing or an output directory
/// does not exist.
pub fn validate_paths(inputs: &[&Path], outputs: &[&Path]) -> Result<()> {
    for p in inputs {
        if !p.is_file() {
            bail!("input file {} does not exist", p.display());
        }
    }
    for p in outputs {
        let dir = parent_dir(p);
        if !dir.is_dir() {
            bail!("output directory {} does not exist", dir.display());
        }
    }
    Ok(())
}

fn parent_dir(p: &Path) -> PathBuf {
    match p.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn read_artifact<T: Artifact + DeserializeOwned>(path: &Path) -> Result<T> {
    io::from_json(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

/// Write through a temporary file in the target directory, then rename, so
/// a failed run never leaves a partial file behind.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let mut tmp = tempfile::NamedTempFile::new_in(parent_dir(path))
        .with_context(|| format!("creating a temporary file next to {}", path.display()))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Emit to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, contents: &str) -> Result<()> {
    match path {
        Some(p) => write_atomic(p, contents),
        None => {
            std::io::stdout().write_all(contents.as_bytes())?;
            Ok(())
        }
    }
}

pub fn emit_artifact<T: Artifact + Serialize>(path: Option<&Path>, value: &T) -> Result<()> {
    emit(path, &io::to_json(value)?)
}

/// A mesh given as OFF, a mesh artifact or a drawing artifact. Drawings and
/// OFF files also carry positions.
pub enum MeshInput {
    Combinatorial(Triangulation),
    Drawn(PlanarDrawing),
}

impl MeshInput {
    pub fn triangulation(&self) -> Arc<Triangulation> {
        match self {
            MeshInput::Combinatorial(t) => Arc::new(t.clone()),
            MeshInput::Drawn(d) => d.triangulation().clone(),
        }
    }
}

pub fn read_mesh(path: &Path) -> Result<MeshInput> {
    let text = read(path)?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("off")) {
        let (points, faces) = io::read_off(&text).with_context(|| format!("parsing {}", path.display()))?;
        let tri = Triangulation::build(&faces, points.len(), Default::default())?;
        return Ok(MeshInput::Drawn(PlanarDrawing::new(Arc::new(tri), points)?));
    }
    if let Ok(d) = io::from_json::<DrawingFile>(&text) {
        return Ok(MeshInput::Drawn(d.drawing()?));
    }
    let m: MeshFile = io::from_json(&text).with_context(|| format!("parsing {} as a mesh or drawing", path.display()))?;
    Ok(MeshInput::Combinatorial(m.triangulation()?))
}

pub fn read_drawing(path: &Path) -> Result<PlanarDrawing> {
    match read_mesh(path)? {
        MeshInput::Drawn(d) => Ok(d),
        MeshInput::Combinatorial(_) => bail!("{} holds a mesh without positions", path.display()),
    }
}

pub fn read_polygon(path: &Path) -> Result<TargetPolygon> {
    Ok(read_artifact::<PolygonFile>(path)?.polygon()?)
}

/// Parse a weight scheme: `uniform`, `random` (run seed, default range),
/// `random:SEED:LO:HI`, or a path to a weights artifact.
pub fn weights(scheme: &str, tri: &Arc<Triangulation>, seed: u64) -> Result<EdgeWeights> {
    let parsed = if scheme == "uniform" {
        WeightScheme::Uniform
    } else if scheme == "random" {
        let (lo, hi) = RANDOM_WEIGHT_RANGE;
        WeightScheme::RandomPositive { seed, lo, hi }
    } else if let Some(rest) = scheme.strip_prefix("random:") {
        let parts: Vec<&str> = rest.split(':').collect();
        let [s, lo, hi] = parts[..] else { bail!("expected random:SEED:LO:HI, got {scheme}") };
        WeightScheme::RandomPositive {
            seed: s.parse().context("weight seed")?,
            lo: lo.parse().context("weight lower bound")?,
            hi: hi.parse().context("weight upper bound")?,
        }
    } else {
        let path = Path::new(scheme);
        return Ok(read_artifact::<WeightsFile>(path)?.weights(tri.clone())?);
    };
    Ok(weight_scheme(parsed, tri)?)
}

/// Paths named by a weight scheme, for up-front validation.
pub fn weight_scheme_path(scheme: &str) -> Option<&Path> {
    (scheme != "uniform" && scheme != "random" && !scheme.starts_with("random:")).then(|| Path::new(scheme))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_replaces_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.json");
        write_atomic(&p, "one").unwrap();
        write_atomic(&p, "two").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn weight_specs_parse() {
        let tri = Arc::new(cone_tutte::mesh::build_triangulation(&[[0, 1, 3], [1, 2, 3], [2, 0, 3]], 4).unwrap());
        assert!(weights("uniform", &tri, 0).unwrap().triples().iter().all(|t| t.2 == 1.0));
        let w = weights("random:5:2:3", &tri, 0).unwrap();
        assert!(w.triples().iter().all(|t| (2.0..=3.0).contains(&t.2)));
        assert!(weights("random:5:2", &tri, 0).is_err());
        assert_eq!(weight_scheme_path("random"), None);
        assert_eq!(weight_scheme_path("w.json"), Some(Path::new("w.json")));
    }
}
