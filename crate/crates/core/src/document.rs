//! JSON persistence of a [`DiscTree`].
//!
//! The document stores one flat array of records per level; each record
//! names its parent by index into the previous level's array, so arbitrarily
//! deep trees never nest. Keys are written in sorted order and floats in the
//! shortest decimal that parses back to the same double, which makes saving
//! byte-reproducible and `load(save(t)) == t` exact.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Disc, Point, Region};
use crate::hierarchy::{DiscTree, LevelSpec, Node};
use crate::packing::SAFETY_SHRINK;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error("unsupported format_version {0} (this build reads {FORMAT_VERSION})")]
    UnsupportedVersion(u32),
}

impl From<serde_json::Error> for DocumentError {
    fn from(e: serde_json::Error) -> Self {
        if e.is_io() {
            DocumentError::Io(e.into())
        } else {
            DocumentError::Malformed(e.to_string())
        }
    }
}

fn malformed(msg: impl Into<String>) -> DocumentError {
    DocumentError::Malformed(msg.into())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BuildParams {
    pub per_level_counts: Vec<usize>,
    pub safety_shrink: f64,
}

/// One disc. `cx, cy, r` are absolute; `lx, ly, lr` place the disc in its
/// parent's unit frame (the root frame for level 1) and are authoritative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscRecord {
    pub cx: f64,
    pub cy: f64,
    pub r: f64,
    pub lx: f64,
    pub ly: f64,
    pub lr: f64,
    pub parent_index: Option<usize>,
    pub seq_index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeDocument {
    pub format_version: u32,
    pub region: Region,
    pub params: BuildParams,
    pub levels: Vec<Vec<DiscRecord>>,
}

impl TreeDocument {
    pub fn from_tree(tree: &DiscTree) -> Self {
        let levels = (1..=tree.depth())
            .map(|k| {
                let prev_start = tree.level(k.saturating_sub(1)).start;
                tree.level(k)
                    .map(|id| {
                        let n = tree.node(id);
                        DiscRecord {
                            cx: n.disc.center.x,
                            cy: n.disc.center.y,
                            r: n.disc.radius,
                            lx: n.local.center.x,
                            ly: n.local.center.y,
                            lr: n.local.radius,
                            parent_index: n.parent.map(|p| p - prev_start),
                            seq_index: n.seq_index,
                        }
                    })
                    .collect()
            })
            .collect();
        TreeDocument {
            format_version: FORMAT_VERSION,
            region: *tree.root_region(),
            params: BuildParams {
                per_level_counts: tree.spec().counts().to_vec(),
                safety_shrink: SAFETY_SHRINK,
            },
            levels,
        }
    }

    /// Rebuilds the tree. Checks structure (version, indices, grouping by
    /// parent, positive finite radii), not geometry; geometric invariants
    /// are the business of verification.
    pub fn into_tree(self) -> Result<DiscTree, DocumentError> {
        if self.format_version != FORMAT_VERSION {
            return Err(DocumentError::UnsupportedVersion(self.format_version));
        }
        if let Region::Disc { center, radius } = self.region {
            Disc::new(center, radius).map_err(|e| malformed(format!("region: {e}")))?;
        }
        let spec = LevelSpec::new(self.params.per_level_counts.clone())
            .map_err(|e| malformed(e.to_string()))?;
        if self.levels.len() != spec.levels() {
            return Err(malformed(format!(
                "{} levels stored, parameters announce {}",
                self.levels.len(),
                spec.levels()
            )));
        }

        let mut nodes: Vec<Node> = Vec::new();
        let mut ranges: Vec<std::ops::Range<usize>> = Vec::with_capacity(self.levels.len());
        for (depth, records) in self.levels.iter().enumerate() {
            let level = depth + 1;
            let start = nodes.len();
            let prev = if depth == 0 { 0..0 } else { ranges[depth - 1].clone() };
            let mut last_parent: Option<usize> = None;
            let mut position = 0usize;
            for (i, rec) in records.iter().enumerate() {
                let at = |msg: &str| malformed(format!("level {level}, record {i}: {msg}"));
                let disc = Disc::new(Point::new(rec.cx, rec.cy), rec.r)
                    .map_err(|e| at(&e.to_string()))?;
                let local = Disc::new(Point::new(rec.lx, rec.ly), rec.lr)
                    .map_err(|e| at(&e.to_string()))?;
                let parent = match (depth, rec.parent_index) {
                    (0, None) => None,
                    (0, Some(_)) => return Err(at("level-1 discs have no parent")),
                    (_, None) => return Err(at("missing parent_index")),
                    (_, Some(p)) => {
                        if p >= prev.len() {
                            return Err(at("parent_index out of range"));
                        }
                        Some(prev.start + p)
                    }
                };
                if parent != last_parent {
                    if let (Some(a), Some(b)) = (last_parent, parent) {
                        if b < a {
                            return Err(at("records are not grouped by parent"));
                        }
                    }
                    last_parent = parent;
                    position = 0;
                    if let Some(p) = parent {
                        let here = nodes.len();
                        let n: &mut Node = &mut nodes[p];
                        n.children = here..here;
                    }
                }
                position += 1;
                if rec.seq_index == 0 {
                    return Err(at("seq_index starts at 1"));
                }
                nodes.push(Node {
                    level,
                    parent,
                    local,
                    disc,
                    seq_index: rec.seq_index,
                    level_index: position,
                    children: 0..0,
                });
                if let Some(p) = parent {
                    nodes[p].children.end = nodes.len();
                }
            }
            ranges.push(start..nodes.len());
        }
        Ok(DiscTree {
            root_region: self.region,
            spec,
            nodes,
            levels: ranges,
        })
    }

    /// Canonical serialization: sorted keys, shortest round-trip floats,
    /// trailing newline.
    pub fn to_canonical_string(&self) -> String {
        // serde_json's Map is ordered by key unless `preserve_order` is on
        let value = serde_json::to_value(self).expect("tree documents serialize");
        let mut s = serde_json::to_string(&value).expect("values serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, DocumentError> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        match value.get("format_version").and_then(|v| v.as_u64()) {
            None => return Err(malformed("missing format_version")),
            Some(v) if v != FORMAT_VERSION as u64 => {
                return Err(DocumentError::UnsupportedVersion(v as u32))
            }
            Some(_) => {}
        }
        Ok(serde_json::from_value(value)?)
    }
}

pub fn save_tree<W: Write>(tree: &DiscTree, mut out: W) -> Result<(), DocumentError> {
    out.write_all(TreeDocument::from_tree(tree).to_canonical_string().as_bytes())?;
    Ok(())
}

pub fn load_tree<R: Read>(mut input: R) -> Result<DiscTree, DocumentError> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    TreeDocument::from_json(&text)?.into_tree()
}

pub fn save_tree_to_path(tree: &DiscTree, path: &Path) -> Result<(), DocumentError> {
    std::fs::write(path, TreeDocument::from_tree(tree).to_canonical_string())?;
    Ok(())
}

pub fn load_tree_from_path(path: &Path) -> Result<DiscTree, DocumentError> {
    load_tree(std::fs::File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hierarchy::{build_hierarchy, build_hierarchy_in};

    fn tree(counts: &[usize]) -> DiscTree {
        build_hierarchy(&LevelSpec::new(counts.to_vec()).unwrap()).unwrap()
    }

    #[test]
    fn round_trip_is_exact() {
        for t in [
            tree(&[1]),
            tree(&[30, 5, 3]),
            build_hierarchy_in(
                Region::Disc { center: Point::new(0.3, -0.7), radius: 2.5 },
                &LevelSpec::new(vec![12, 2]).unwrap(),
                1000,
            )
            .unwrap(),
        ] {
            let text = TreeDocument::from_tree(&t).to_canonical_string();
            let back = TreeDocument::from_json(&text).unwrap().into_tree().unwrap();
            assert_eq!(back, t);
            assert_eq!(TreeDocument::from_tree(&back).to_canonical_string(), text);
        }
    }

    #[test]
    fn keys_are_sorted() {
        let text = TreeDocument::from_tree(&tree(&[1])).to_canonical_string();
        let f = text.find("\"format_version\"").unwrap();
        let l = text.find("\"levels\"").unwrap();
        let p = text.find("\"params\"").unwrap();
        let r = text.find("\"region\"").unwrap();
        assert!(f < l && l < p && p < r);
        assert!(text.contains("\"cx\":-1.0"));
    }

    #[test]
    fn rejects_other_versions() {
        let text = TreeDocument::from_tree(&tree(&[2])).to_canonical_string();
        let bumped = text.replace("\"format_version\":1", "\"format_version\":2");
        assert!(matches!(
            TreeDocument::from_json(&bumped),
            Err(DocumentError::UnsupportedVersion(2))
        ));
        let missing = text.replace("\"format_version\":1,", "");
        assert!(matches!(TreeDocument::from_json(&missing), Err(DocumentError::Malformed(_))));
    }

    #[test]
    fn rejects_broken_structure() {
        let mut doc = TreeDocument::from_tree(&tree(&[3, 2]));
        doc.levels[1][0].parent_index = Some(7);
        assert!(matches!(doc.into_tree(), Err(DocumentError::Malformed(_))));

        let mut doc = TreeDocument::from_tree(&tree(&[3, 2]));
        doc.levels[1].swap(0, 5);
        assert!(matches!(doc.into_tree(), Err(DocumentError::Malformed(_))));

        let mut doc = TreeDocument::from_tree(&tree(&[3]));
        doc.levels[0][1].r = -1.0;
        assert!(matches!(doc.into_tree(), Err(DocumentError::Malformed(_))));

        assert!(matches!(TreeDocument::from_json("{not json"), Err(DocumentError::Malformed(_))));
    }
}
