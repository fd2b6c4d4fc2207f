//! JSON codecs for simplicial sets and maps.
//!
//! A set document:
//!
//! ```json
//! { "dim_bound": 1,
//!   "complete": true,
//!   "cells": { "0": ["a", "b"], "1": ["ab"] },
//!   "faces": { "ab": [[[0], "b"], [[0], "a"]] } }
//! ```
//!
//! Each face is `[word, base]` where `word` lists the values of the surjective
//! degeneracy word (`[0, 1]` for a non-degenerate edge, `[0, 0]` for a degenerate
//! one) and `base` names a non-degenerate cell. Faces are listed by index `i`
//! ascending. `complete` defaults to `true`.
//!
//! A map document has `source`, `target` (each a path relative to the document or an
//! inline set document) and `assignment` from source identifiers to `[word, base]`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{Cell, SetBuilder, SimplicialMap, SimplicialSet};
use crate::delta::OrdinalMap;
use crate::error::{Error, Result};

/// A cell written as `[word, base identifier]`.
pub type CellRef = (Vec<usize>, String);

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetFile {
    pub dim_bound: usize,
    #[serde(default = "yes")]
    pub complete: bool,
    pub cells: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub faces: BTreeMap<String, Vec<CellRef>>,
}

/// A set given by path or inline.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SetSource {
    Path(String),
    Inline(Box<SetFile>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapFile {
    pub source: SetSource,
    pub target: SetSource,
    pub assignment: BTreeMap<String, CellRef>,
}

/// `[word, base name]` for a cell.
pub fn cell_ref(x: &SimplicialSet, c: &Cell) -> CellRef {
    (c.word.values_usize(), x.name(c.base_dim(), c.base).to_string())
}

/// Reads `[word, base name]` back, checking the word is surjective.
pub fn parse_cell_ref(x: &SimplicialSet, r: &CellRef) -> Result<Cell> {
    let (d, base) = x.lookup(&r.1).ok_or_else(|| Error::Parse(format!("unknown identifier {}", r.1)))?;
    let word = OrdinalMap::new(r.0.len(), d + 1, &r.0)?;
    if !word.is_surjective() {
        return Err(Error::NotSurjective(format!("word {:?} on {} is not surjective", r.0, r.1)));
    }
    Ok(Cell { word, base })
}

impl SetFile {
    pub fn from_set(x: &SimplicialSet) -> SetFile {
        let mut cells = BTreeMap::new();
        let mut faces = BTreeMap::new();
        for d in 0..=x.dim_bound() {
            cells.insert(d.to_string(), x.names(d).to_vec());
            if d == 0 {
                continue;
            }
            for i in 0..x.count(d) as u32 {
                let fs = x.faces_of(d, i).iter().map(|c| cell_ref(x, c)).collect();
                faces.insert(x.name(d, i).to_string(), fs);
            }
        }
        SetFile { dim_bound: x.dim_bound(), complete: x.is_complete(), cells, faces }
    }

    /// Builds the set; face normal forms are checked, simplicial identities are not
    /// (see [`SimplicialSet::validate`]).
    pub fn to_set(&self) -> Result<SimplicialSet> {
        let mut by_dim: Vec<&Vec<String>> = Vec::new();
        let empty = Vec::new();
        for d in 0..=self.dim_bound {
            by_dim.push(self.cells.get(&d.to_string()).unwrap_or(&empty));
        }
        for k in self.cells.keys() {
            match k.parse::<usize>() {
                Ok(d) if d <= self.dim_bound => {}
                _ => return Err(Error::Parse(format!("cell dimension key {k} is invalid"))),
            }
        }
        let mut b = SetBuilder::new(self.dim_bound, self.complete);
        for (d, names) in by_dim.iter().enumerate() {
            for name in names.iter() {
                let faces = if d == 0 {
                    Vec::new()
                } else {
                    let refs = self.faces.get(name).ok_or_else(|| Error::Parse(format!("no faces for {name}")))?;
                    let mut out = Vec::with_capacity(refs.len());
                    for r in refs {
                        let (fd, base) = b.lookup(&r.1).ok_or_else(|| {
                            Error::Parse(format!("face {} of {name} is not a lower-dimensional cell", r.1))
                        })?;
                        let word = OrdinalMap::new(r.0.len(), fd + 1, &r.0)?;
                        out.push(Cell { word, base });
                    }
                    out
                };
                b.add_cell(d, name.clone(), faces)?;
            }
        }
        for name in self.faces.keys() {
            if b.lookup(name).is_none() {
                return Err(Error::Parse(format!("faces given for unknown cell {name}")));
            }
        }
        Ok(b.build())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("set documents serialize")
    }

    pub fn from_json(s: &str) -> Result<SetFile> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

impl SetSource {
    /// Loads the set, resolving relative paths against `base`.
    pub fn load(&self, base: &Path) -> Result<SimplicialSet> {
        match self {
            SetSource::Path(p) => load_set(&resolve(base, p)),
            SetSource::Inline(f) => f.to_set(),
        }
    }
}

fn resolve(base: &Path, p: &str) -> PathBuf {
    let p = Path::new(p);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn load_set(path: &Path) -> Result<SimplicialSet> {
    SetFile::from_json(&read(path)?)?.to_set()
}

impl MapFile {
    pub fn from_map(f: &SimplicialMap, source: SetSource, target: SetSource) -> MapFile {
        let mut assignment = BTreeMap::new();
        for (d, i) in f.source.nondeg_cells() {
            assignment.insert(f.source.name(d, i).to_string(), cell_ref(&f.target, &f.at(d, i)));
        }
        MapFile { source, target, assignment }
    }

    /// A self-contained document with both sets inline.
    pub fn inline(f: &SimplicialMap) -> MapFile {
        MapFile::from_map(
            f,
            SetSource::Inline(Box::new(SetFile::from_set(&f.source))),
            SetSource::Inline(Box::new(SetFile::from_set(&f.target))),
        )
    }

    /// Builds the map between already-loaded sets, checking face compatibility.
    pub fn to_map_between(&self, source: Arc<SimplicialSet>, target: Arc<SimplicialSet>) -> Result<SimplicialMap> {
        let mut asg = Vec::new();
        for d in 0..=source.dim_bound() {
            let mut row = Vec::new();
            for name in source.names(d) {
                let r = self
                    .assignment
                    .get(name)
                    .ok_or_else(|| Error::Parse(format!("no image for source cell {name}")))?;
                row.push(parse_cell_ref(&target, r)?);
            }
            asg.push(row);
        }
        for name in self.assignment.keys() {
            if source.lookup(name).is_none() {
                return Err(Error::Parse(format!("image given for unknown cell {name}")));
            }
        }
        SimplicialMap::new(source, target, asg)
    }

    pub fn to_map(&self, base: &Path) -> Result<SimplicialMap> {
        let s = Arc::new(self.source.load(base)?);
        let t = Arc::new(self.target.load(base)?);
        self.to_map_between(s, t)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("map documents serialize")
    }

    pub fn from_json(s: &str) -> Result<MapFile> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Loads a map document; relative set paths resolve against its directory.
pub fn load_map(path: &Path) -> Result<SimplicialMap> {
    let base = path.parent().unwrap_or(Path::new("."));
    MapFile::from_json(&read(path)?)?.to_map(base)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sset::{generator, product, simplex, GeneratorKind};

    #[test]
    fn sets_round_trip() {
        let x = product(&Arc::new(simplex(1)), &Arc::new(simplex(2))).unwrap().set;
        let f = SetFile::from_set(&x);
        let text = f.to_json();
        let back = SetFile::from_json(&text).unwrap().to_set().unwrap();
        assert_eq!(back, *x);
        assert_eq!(SetFile::from_set(&back).to_json(), text);
    }

    #[test]
    fn maps_round_trip() {
        let (_, inc) = generator(GeneratorKind::Horn, 3, Some(2)).unwrap();
        let inc = inc.unwrap();
        let doc = MapFile::inline(&inc);
        let text = doc.to_json();
        let back = MapFile::from_json(&text).unwrap().to_map(Path::new(".")).unwrap();
        assert_eq!(back, inc);
        assert_eq!(MapFile::inline(&back).to_json(), text);
    }

    #[test]
    fn malformed_documents_are_rejected() {
        let bad = r#"{"dim_bound":1,"cells":{"0":["a"],"1":["e"]},"faces":{"e":[[[0],"a"],[[0],"zz"]]}}"#;
        assert!(SetFile::from_json(bad).unwrap().to_set().is_err());
        let bad = r#"{"dim_bound":1,"cells":{"0":["a"],"1":["e"]},"faces":{"e":[[[0,0],"a"],[[0],"a"]]}}"#;
        assert!(SetFile::from_json(bad).unwrap().to_set().is_err());
    }
}
