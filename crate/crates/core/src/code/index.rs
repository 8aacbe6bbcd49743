use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use thiserror::Error;

use super::entity::{CodeEntity, EntityId, EntityKind};
use super::Profile;
use crate::digest;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IndexError {
    #[error("unknown entity {0}")]
    UnknownEntity(EntityId),
    #[error("invalid containment tree: {0}")]
    InvalidTree(String),
}

/// A file that could not be scanned. It still has a file entity, without children.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Diagnostic {
    pub file_path: String,
    pub line: u32,
    pub message: String,
}

/// Immutable index over a source tree.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeIndex {
    root_dir: String,
    source_digest: String,
    root: EntityId,
    entities: Vec<CodeEntity>,
    slots: BTreeMap<EntityId, usize>,
    depth: Vec<u32>,
    name_map: BTreeMap<String, Vec<EntityId>>,
    qname_map: BTreeMap<String, Vec<EntityId>>,
    diagnostics: Vec<Diagnostic>,
}

impl CodeIndex {
    /// Rebuilds an index from its entity list, checking the tree invariants.
    pub fn from_parts(
        root_dir: impl Into<String>,
        source_digest: impl Into<String>,
        mut entities: Vec<CodeEntity>,
        diagnostics: Vec<Diagnostic>,
    ) -> Result<Self, IndexError> {
        entities.sort_by_key(|e| e.entity_id);
        let mut slots = BTreeMap::new();
        for (i, e) in entities.iter().enumerate() {
            if slots.insert(e.entity_id, i).is_some() {
                return Err(IndexError::InvalidTree(format!("duplicate id {}", e.entity_id)));
            }
        }
        let mut roots = entities.iter().filter(|e| e.parent_id.is_none());
        let root = match (roots.next(), roots.next()) {
            (Some(r), None) if r.kind == EntityKind::Package => r.entity_id,
            (None, _) => return Err(IndexError::InvalidTree("no root".into())),
            (Some(r), None) => {
                return Err(IndexError::InvalidTree(format!("root {} is not a package", r.entity_id)))
            }
            _ => return Err(IndexError::InvalidTree("more than one root".into())),
        };

        for e in &entities {
            if e.name.is_empty() {
                return Err(IndexError::InvalidTree(format!("entity {} has no name", e.entity_id)));
            }
            let positioned = e.kind != EntityKind::Package;
            if positioned && (e.line_start == 0 || e.line_start > e.line_end) {
                return Err(IndexError::InvalidTree(format!("entity {} has bad lines", e.entity_id)));
            }
            let Some(pid) = e.parent_id else { continue };
            let parent = slots
                .get(&pid)
                .map(|&i| &entities[i])
                .ok_or_else(|| IndexError::InvalidTree(format!("dangling parent {pid}")))?;
            if !parent.kind.may_contain(e.kind) {
                return Err(IndexError::InvalidTree(format!(
                    "{} {} cannot contain {} {}",
                    parent.kind.name(),
                    pid,
                    e.kind.name(),
                    e.entity_id
                )));
            }
            if !parent.kind.is_container()
                && (e.line_start < parent.line_start || e.line_end > parent.line_end)
            {
                return Err(IndexError::InvalidTree(format!(
                    "entity {} extends beyond its parent",
                    e.entity_id
                )));
            }
        }

        // Depths, which also proves every entity reaches the root.
        const UNSET: u32 = u32::MAX;
        let mut depth = alloc::vec![UNSET; entities.len()];
        for start in 0..entities.len() {
            let mut chain = Vec::new();
            let mut cur = start;
            while depth[cur] == UNSET {
                if chain.len() > entities.len() {
                    return Err(IndexError::InvalidTree("cycle".into()));
                }
                chain.push(cur);
                match entities[cur].parent_id {
                    Some(p) => cur = slots[&p],
                    None => {
                        depth[cur] = 0;
                        chain.pop();
                        break;
                    }
                }
            }
            let mut d = depth[cur];
            while let Some(i) = chain.pop() {
                d += 1;
                depth[i] = d;
            }
        }

        let mut name_map: BTreeMap<String, Vec<EntityId>> = BTreeMap::new();
        let mut qname_map: BTreeMap<String, Vec<EntityId>> = BTreeMap::new();
        for e in &entities {
            name_map.entry(e.name.clone()).or_default().push(e.entity_id);
            qname_map.entry(e.qualified_name.clone()).or_default().push(e.entity_id);
        }

        Ok(CodeIndex {
            root_dir: root_dir.into(),
            source_digest: source_digest.into(),
            root,
            entities,
            slots,
            depth,
            name_map,
            qname_map,
            diagnostics,
        })
    }

    /// An index holding nothing but a root package.
    pub fn empty(root_name: &str) -> Self {
        IndexBuilder::new(root_name, root_name).finish()
    }

    pub fn root_dir(&self) -> &str {
        &self.root_dir
    }

    pub fn source_digest(&self) -> &str {
        &self.source_digest
    }

    pub fn root(&self) -> &CodeEntity {
        self.entity(self.root).expect("root is always present")
    }

    /// All entities, ordered by id.
    pub fn entities(&self) -> &[CodeEntity] {
        &self.entities
    }

    pub fn len(&self) -> usize {
        self.entities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty()
    }

    pub fn diagnostics(&self) -> &[Diagnostic] {
        &self.diagnostics
    }

    pub fn name_map(&self) -> &BTreeMap<String, Vec<EntityId>> {
        &self.name_map
    }

    pub fn qname_map(&self) -> &BTreeMap<String, Vec<EntityId>> {
        &self.qname_map
    }

    pub fn entity(&self, id: EntityId) -> Option<&CodeEntity> {
        self.slots.get(&id).map(|&i| &self.entities[i])
    }

    pub fn get(&self, id: EntityId) -> Result<&CodeEntity, IndexError> {
        self.entity(id).ok_or(IndexError::UnknownEntity(id))
    }

    pub fn contains(&self, id: EntityId) -> bool {
        self.slots.contains_key(&id)
    }

    pub fn parent(&self, id: EntityId) -> Option<&CodeEntity> {
        self.entity(id)?.parent_id.and_then(|p| self.entity(p))
    }

    /// Entities from `id` (inclusive) up to the root.
    pub fn ancestors(&self, id: EntityId) -> impl Iterator<Item = &CodeEntity> {
        core::iter::successors(self.entity(id), move |e| e.parent_id.and_then(|p| self.entity(p)))
    }

    /// Number of entities of each kind.
    pub fn count_by_kind(&self) -> BTreeMap<EntityKind, usize> {
        let mut counts = BTreeMap::new();
        for e in &self.entities {
            *counts.entry(e.kind).or_insert(0) += 1;
        }
        counts
    }

    /// The file entity for a repository-relative path.
    pub fn file_entity(&self, path: &str) -> Option<&CodeEntity> {
        let stem = path.rsplit('/').next()?.split('.').next()?;
        self.name_map
            .get(stem)
            .into_iter()
            .flatten()
            .filter_map(|&id| self.entity(id))
            .find(|e| e.kind == EntityKind::File && e.file_path == path)
            .or_else(|| {
                self.entities
                    .iter()
                    .find(|e| e.kind == EntityKind::File && e.file_path == path)
            })
    }

    /// Finds entities named by `identifier`.
    ///
    /// Tries, in order, exact qualified names, qualified-name suffixes on
    /// whole dot-separated components, and exact simple names; the first stage
    /// with any hit wins. In the suffix and simple-name stages, declarations
    /// shadow package and file entities that match the same text. Results are
    /// ordered by file path, first line, qualified name, then id.
    pub fn lookup(&self, identifier: &str) -> Vec<EntityId> {
        if identifier.is_empty() {
            return Vec::new();
        }
        if let Some(ids) = self.qname_map.get(identifier) {
            return self.sorted(ids.clone());
        }

        let simple = identifier.rsplit('.').next().unwrap_or(identifier);
        let suffix: Vec<EntityId> = self
            .name_map
            .get(simple)
            .into_iter()
            .flatten()
            .copied()
            .filter(|&id| {
                let q = &self.entity(id).expect("name_map is consistent").qualified_name;
                q.len() > identifier.len()
                    && q.ends_with(identifier)
                    && q.as_bytes()[q.len() - identifier.len() - 1] == b'.'
            })
            .collect();
        if !suffix.is_empty() {
            return self.sorted(self.shadow(suffix));
        }

        match self.name_map.get(identifier) {
            Some(ids) => self.sorted(self.shadow(ids.clone())),
            None => Vec::new(),
        }
    }

    fn shadow(&self, ids: Vec<EntityId>) -> Vec<EntityId> {
        let declares = |id: &EntityId| !self.entity(*id).map_or(true, |e| e.kind.is_container());
        if ids.iter().any(declares) {
            ids.into_iter().filter(declares).collect()
        } else {
            ids
        }
    }

    fn sorted(&self, mut ids: Vec<EntityId>) -> Vec<EntityId> {
        ids.sort_by(|a, b| {
            let ea = self.entity(*a).expect("map ids exist");
            let eb = self.entity(*b).expect("map ids exist");
            ea.position_key().cmp(&eb.position_key())
        });
        ids.dedup();
        ids
    }

    /// Length of the tree path between two entities.
    pub fn containment_distance(&self, a: EntityId, b: EntityId) -> Result<u32, IndexError> {
        let mut x = *self.slots.get(&a).ok_or(IndexError::UnknownEntity(a))?;
        let mut y = *self.slots.get(&b).ok_or(IndexError::UnknownEntity(b))?;
        let mut steps = 0;
        while self.depth[x] > self.depth[y] {
            x = self.parent_slot(x);
            steps += 1;
        }
        while self.depth[y] > self.depth[x] {
            y = self.parent_slot(y);
            steps += 1;
        }
        while x != y {
            x = self.parent_slot(x);
            y = self.parent_slot(y);
            steps += 2;
        }
        Ok(steps)
    }

    fn parent_slot(&self, slot: usize) -> usize {
        let parent = self.entities[slot].parent_id.expect("non-root has a parent");
        self.slots[&parent]
    }

    /// The innermost package containing `id` (itself, if it is one).
    pub fn innermost_package(&self, id: EntityId) -> Option<&CodeEntity> {
        self.ancestors(id).find(|e| e.kind == EntityKind::Package)
    }
}

/// Collects source files and produces a [`CodeIndex`].
#[derive(Debug, Clone)]
pub struct IndexBuilder {
    root_dir: String,
    root_name: String,
    files: Vec<(String, Vec<u8>, Profile)>,
}

impl IndexBuilder {
    /// `root_dir` is recorded as given; `root_name` names the root package.
    pub fn new(root_dir: impl Into<String>, root_name: impl Into<String>) -> Self {
        IndexBuilder {
            root_dir: root_dir.into(),
            root_name: root_name.into(),
            files: Vec::new(),
        }
    }

    /// Adds one source file. `path` is repository-relative with `/` separators.
    pub fn add_file(&mut self, path: impl Into<String>, contents: impl Into<Vec<u8>>, profile: Profile) -> &mut Self {
        self.files.push((path.into(), contents.into(), profile));
        self
    }

    pub fn finish(mut self) -> CodeIndex {
        self.files.sort_by(|a, b| a.0.cmp(&b.0));
        let root_name = if self.root_name.is_empty() { "root".to_string() } else { self.root_name };
        let mut entities = alloc::vec![CodeEntity {
            entity_id: EntityId(0),
            kind: EntityKind::Package,
            name: root_name.clone(),
            qualified_name: root_name,
            file_path: String::new(),
            line_start: 0,
            line_end: 0,
            parent_id: None,
        }];
        let mut packages: BTreeMap<String, EntityId> = BTreeMap::new();
        let mut diagnostics = Vec::new();
        let mut hashes = Vec::new();

        for (path, bytes, profile) in &self.files {
            hashes.push((path.clone(), digest::sha256_hex(bytes)));
            let text = String::from_utf8_lossy(bytes);
            let parsed = profile.scan(&text);

            let dirs: Vec<&str> = {
                let mut parts: Vec<&str> = path.split('/').collect();
                parts.pop();
                parts.retain(|p| !p.is_empty() && *p != ".");
                parts
            };
            let declared = match &parsed {
                Ok(p) if *profile == Profile::Java => p.package.clone(),
                _ => None,
            };
            let components: Vec<&str> = match &declared {
                Some(pkg) => pkg.split('.').filter(|s| !s.is_empty()).collect(),
                None => dirs,
            };

            let mut parent = EntityId(0);
            let mut prefix = String::new();
            for comp in components {
                if !prefix.is_empty() {
                    prefix.push('.');
                }
                prefix.push_str(comp);
                parent = *packages.entry(prefix.clone()).or_insert_with(|| {
                    let id = EntityId(entities.len() as u32);
                    entities.push(CodeEntity {
                        entity_id: id,
                        kind: EntityKind::Package,
                        name: comp.to_string(),
                        qualified_name: prefix.clone(),
                        file_path: String::new(),
                        line_start: 0,
                        line_end: 0,
                        parent_id: Some(parent),
                    });
                    id
                });
            }

            let file_name = path.rsplit('/').next().unwrap_or(path);
            let stem = file_name.rsplit_once('.').map_or(file_name, |(s, _)| s).to_string();
            let file_qname = if prefix.is_empty() { stem.clone() } else { format!("{prefix}.{stem}") };
            let file_id = EntityId(entities.len() as u32);
            let line_count = text.lines().count().max(1) as u32;
            entities.push(CodeEntity {
                entity_id: file_id,
                kind: EntityKind::File,
                name: stem,
                qualified_name: file_qname,
                file_path: path.clone(),
                line_start: 1,
                line_end: line_count,
                parent_id: Some(parent),
            });

            let parsed = match parsed {
                Ok(p) => p,
                Err(err) => {
                    diagnostics.push(Diagnostic {
                        file_path: path.clone(),
                        line: err.line,
                        message: err.message,
                    });
                    continue;
                }
            };

            let mut ids: Vec<Option<EntityId>> = Vec::with_capacity(parsed.decls.len());
            for decl in &parsed.decls {
                let parent_id = match decl.parent {
                    None => Some(file_id),
                    Some(i) => ids.get(i).copied().flatten(),
                };
                let Some(parent_id) = parent_id else {
                    ids.push(None);
                    continue;
                };
                let parent = &entities[parent_id.0 as usize];
                let fits = parent.kind.may_contain(decl.kind)
                    && decl.line_start >= 1
                    && decl.line_start <= decl.line_end
                    && decl.line_end <= line_count
                    && (parent.kind.is_container()
                        || (parent.line_start <= decl.line_start && decl.line_end <= parent.line_end));
                if !fits {
                    ids.push(None);
                    continue;
                }
                let id = EntityId(entities.len() as u32);
                let qualified_name = format!("{}.{}", parent.qualified_name, decl.name);
                entities.push(CodeEntity {
                    entity_id: id,
                    kind: decl.kind,
                    name: decl.name.clone(),
                    qualified_name,
                    file_path: path.clone(),
                    line_start: decl.line_start,
                    line_end: decl.line_end,
                    parent_id: Some(parent_id),
                });
                ids.push(Some(id));
            }
        }

        let source_digest = digest::tree_digest(hashes.iter().map(|(p, h)| (p.as_str(), h.as_str())));
        CodeIndex::from_parts(self.root_dir, source_digest, entities, diagnostics)
            .expect("builder emits a valid tree")
    }
}
