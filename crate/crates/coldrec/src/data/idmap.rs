use std::collections::HashMap;

use crate::{Error, Result};

/// Bijective mapping between external identifier strings and dense indices.
///
/// Indices are contiguous from 0 and assigned in first-seen order, so the
/// mapping is stable for a given input sequence regardless of id format.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IdMap {
    ids: Vec<String>,
    index: HashMap<String, u32>,
}

impl IdMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the index for `id`, inserting it if unseen.
    pub fn intern(&mut self, id: &str) -> u32 {
        if let Some(&i) = self.index.get(id) {
            return i;
        }
        let i = self.ids.len() as u32;
        self.ids.push(id.to_owned());
        self.index.insert(id.to_owned(), i);
        i
    }

    pub fn get(&self, id: &str) -> Option<u32> {
        self.index.get(id).copied()
    }

    pub fn id(&self, index: u32) -> Option<&str> {
        self.ids.get(index as usize).map(String::as_str)
    }

    pub fn require(&self, id: &str) -> Result<u32> {
        self.get(id)
            .ok_or_else(|| Error::invalid(format!("unknown identifier `{id}`")))
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    /// Builds a map from an ordered id list, rejecting duplicates.
    pub fn from_ids<I, S>(ids: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut map = Self::new();
        for id in ids {
            let id = id.as_ref();
            if map.get(id).is_some() {
                return Err(Error::invalid(format!("duplicate identifier `{id}`")));
            }
            map.intern(id);
        }
        Ok(map)
    }
}
