use alloc::string::String;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EntityId(pub u32);

impl core::fmt::Display for EntityId {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntityKind {
    Package,
    File,
    TypeDef,
    Function,
    Field,
    Variable,
    Parameter,
}

impl EntityKind {
    pub fn name(self) -> &'static str {
        match self {
            EntityKind::Package => "package",
            EntityKind::File => "file",
            EntityKind::TypeDef => "type_def",
            EntityKind::Function => "function",
            EntityKind::Field => "field",
            EntityKind::Variable => "variable",
            EntityKind::Parameter => "parameter",
        }
    }

    /// Whether an entity of this kind may directly contain one of `child`.
    pub fn may_contain(self, child: EntityKind) -> bool {
        use EntityKind::*;
        matches!(
            (self, child),
            (Package, Package | File)
                | (File, TypeDef | Function | Variable)
                | (TypeDef, TypeDef | Function | Field)
                | (Function, Parameter | Variable | Function)
        )
    }

    /// Packages and files group declarations rather than declare anything.
    pub fn is_container(self) -> bool {
        matches!(self, EntityKind::Package | EntityKind::File)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeEntity {
    pub entity_id: EntityId,
    pub kind: EntityKind,
    pub name: String,
    pub qualified_name: String,
    /// Repository-relative with `/` separators; empty for packages.
    pub file_path: String,
    /// 1-based inclusive; `0`/`0` for packages.
    pub line_start: u32,
    pub line_end: u32,
    pub parent_id: Option<EntityId>,
}

impl CodeEntity {
    /// Ordering key shared by lookup results and disambiguation tie-breaks.
    pub fn position_key(&self) -> (&str, u32, &str, EntityId) {
        (&self.file_path, self.line_start, &self.qualified_name, self.entity_id)
    }
}
