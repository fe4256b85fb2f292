//! The universe file: a JSON document with one table of named sections.

use std::collections::BTreeMap;
use std::fmt;
use std::marker::PhantomData;
use std::path::Path;

use serde::de::{Deserializer, MapAccess, Visitor};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// A map that refuses duplicate keys when parsed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct UniqueMap<V>(pub BTreeMap<String, V>);

impl<V> Default for UniqueMap<V> {
    fn default() -> Self {
        UniqueMap(BTreeMap::new())
    }
}

impl<V> std::ops::Deref for UniqueMap<V> {
    type Target = BTreeMap<String, V>;

    fn deref(&self) -> &Self::Target {
        &self.0
    }
}

impl<V> FromIterator<(String, V)> for UniqueMap<V> {
    fn from_iter<I: IntoIterator<Item = (String, V)>>(iter: I) -> Self {
        UniqueMap(iter.into_iter().collect())
    }
}

impl<'de, V: Deserialize<'de>> Deserialize<'de> for UniqueMap<V> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct Unique<V>(PhantomData<V>);

        impl<'de, V: Deserialize<'de>> Visitor<'de> for Unique<V> {
            type Value = UniqueMap<V>;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map with distinct keys")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<Self::Value, A::Error> {
                let mut map = BTreeMap::new();
                while let Some((key, value)) = access.next_entry::<String, V>()? {
                    if map.contains_key(&key) {
                        return Err(serde::de::Error::custom(format!("duplicate identifier `{key}`")));
                    }
                    map.insert(key, value);
                }
                Ok(UniqueMap(map))
            }
        }

        deserializer.deserialize_map(Unique(PhantomData))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Presentation {
    /// Identities and the full composition table are listed.
    #[default]
    Table,
    /// Morphisms are edges of a DAG; the category is its path category.
    Free,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismDecl {
    pub id: String,
    pub dom: String,
    pub cod: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CategoryDecl {
    #[serde(default)]
    pub presentation: Presentation,
    pub objects: Vec<String>,
    #[serde(default)]
    pub morphisms: Vec<MorphismDecl>,
    #[serde(default)]
    pub identities: UniqueMap<String>,
    #[serde(default)]
    pub compose: Vec<[String; 3]>,
}

/// Object images, plus any morphism images that cannot be inferred.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctorDecl {
    pub objects: UniqueMap<String>,
    #[serde(default)]
    pub morphisms: UniqueMap<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformationDecl {
    pub source: String,
    pub target: String,
    pub components: UniqueMap<String>,
}

/// One level of a tower: all endofunctors of the level below, or the
/// monoid spanned by the listed generators.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelDecl {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<String>>,
    /// Functors defined on the level below; level 1 may also name functors
    /// from the top-level `functors` section.
    #[serde(default)]
    pub functors: UniqueMap<FunctorDecl>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TowerDecl {
    pub levels: Vec<LevelDecl>,
    pub seeds: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorDecl {
    pub eigen: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MutationDecl {
    pub source: String,
    pub target: String,
    pub components: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsiDecl {
    pub objects: UniqueMap<String>,
    #[serde(default)]
    pub morphisms: UniqueMap<String>,
    #[serde(default)]
    pub gamma: UniqueMap<String>,
}

/// States of `End(X)`; `generators` picks a sub-monoid of `End(X)`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsiSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<String>>,
    #[serde(default)]
    pub states: UniqueMap<PsiDecl>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellDecl {
    pub morphism: String,
    pub flavor: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryDecl {
    pub i: usize,
    pub j: usize,
    pub cells: Vec<CellDecl>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CubeDecl {
    pub source: String,
    pub target: String,
    pub entries: Vec<EntryDecl>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmalgamSection {
    #[serde(default)]
    pub objects: UniqueMap<Vec<String>>,
    #[serde(default)]
    pub morphisms: UniqueMap<CubeDecl>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquivalenceDecl {
    pub from: String,
    pub to: String,
    pub pairs: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CarrierMap {
    pub carrier: String,
    #[serde(default)]
    pub elements: UniqueMap<String>,
}

/// A state: how it moves stacks (for matrices) and carriers (for strings).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateActionDecl {
    #[serde(default)]
    pub stacks: UniqueMap<String>,
    #[serde(default)]
    pub carriers: UniqueMap<CarrierMap>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UniverseFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub category: Option<CategoryDecl>,
    #[serde(default)]
    pub functors: UniqueMap<FunctorDecl>,
    #[serde(default)]
    pub transformations: UniqueMap<TransformationDecl>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tower: Option<TowerDecl>,
    #[serde(default)]
    pub basis: Vec<String>,
    #[serde(default)]
    pub operators: UniqueMap<OperatorDecl>,
    #[serde(default)]
    pub mutations: UniqueMap<MutationDecl>,
    #[serde(default)]
    pub state_maps: UniqueMap<Vec<String>>,
    #[serde(default)]
    pub laws: UniqueMap<Vec<String>>,
    #[serde(default)]
    pub stacks: UniqueMap<UniqueMap<String>>,
    #[serde(default)]
    pub cw_library: UniqueMap<Vec<Vec<String>>>,
    #[serde(default)]
    pub realizations: UniqueMap<String>,
    #[serde(default)]
    pub psi_endos: PsiSection,
    #[serde(default)]
    pub amalgams: AmalgamSection,
    #[serde(default)]
    pub equivalences: UniqueMap<EquivalenceDecl>,
    #[serde(default)]
    pub stack_actions: UniqueMap<UniqueMap<CarrierMap>>,
    #[serde(default)]
    pub state_actions: UniqueMap<StateActionDecl>,
}

impl UniverseFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<(Self, Vec<u8>), CliError> {
        let bytes = std::fs::read(path).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        let text = std::str::from_utf8(&bytes).map_err(|e| CliError::Parse {
            line: 0,
            column: e.valid_up_to(),
            message: "file is not UTF-8".to_string(),
        })?;
        Ok((Self::parse(text)?, bytes))
    }

    /// Pretty JSON with sorted keys.
    pub fn canonical(&self) -> String {
        let value = serde_json::to_value(self).expect("universe serializes");
        let mut out = serde_json::to_string_pretty(&value).expect("value serializes");
        out.push('\n');
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_keys_are_rejected() {
        let err = UniverseFile::parse(r#"{"laws": {"A": ["a"], "A": ["b"]}}"#).unwrap_err();
        assert!(err.to_string().contains("duplicate identifier `A`"), "{err}");
    }

    #[test]
    fn parse_error_has_position() {
        match UniverseFile::parse("{\n  \"laws\": {\n    \"A\" [\"a\"]\n  }\n}") {
            Err(CliError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_section_is_rejected() {
        assert!(UniverseFile::parse(r#"{"lawz": {}}"#).is_err());
    }

    #[test]
    fn canonical_round_trip() {
        let text = r#"{"laws": {"B": ["y"], "A": ["a"]}, "category": {"objects": ["x"],
            "morphisms": [{"id": "id_x", "dom": "x", "cod": "x"}], "identities": {"x": "id_x"},
            "compose": [["id_x", "id_x", "id_x"]]}}"#;
        let u = UniverseFile::parse(text).unwrap();
        let canon = u.canonical();
        assert_eq!(UniverseFile::parse(&canon).unwrap(), u);
        assert!(canon.find("\"A\"").unwrap() < canon.find("\"B\"").unwrap());
    }
}
