//! Mode bookkeeping: the six system modes of the setup plus one fresh
//! environment mode per lossy element port.

use std::collections::HashSet;
use std::fmt;

use crate::error::{FockError, Result};

/// Number of system modes. Labels run 1..=6 and map to ids 0..=5.
pub const SYSTEM_MODES: u8 = 6;

/// Stable identifier of a mode.
///
/// Ids are never reused, so a `ModeId` stays meaningful after a registry is
/// narrowed (for example when measured modes are removed).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeId(pub u16);

impl ModeId {
    /// System mode by its 1-based label.
    ///
    /// # Panics
    /// If `label` is not in `1..=6`.
    pub const fn system(label: u8) -> Self {
        assert!(
            label >= 1 && label <= SYSTEM_MODES,
            "system labels are 1..=6"
        );
        ModeId(label as u16 - 1)
    }

    pub fn system_label(self) -> Option<u8> {
        (self.0 < SYSTEM_MODES as u16).then(|| self.0 as u8 + 1)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for ModeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.system_label() {
            Some(label) => write!(f, "m{label}"),
            None => write!(f, "e{}", self.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ModeKind {
    System(u8),
    /// Bath of an absorbing element. `port` is the system mode whose
    /// photons leak into it.
    Environment {
        element: String,
        port: ModeId,
    },
}

impl ModeKind {
    pub fn is_environment(&self) -> bool {
        matches!(self, ModeKind::Environment { .. })
    }
}

/// Ordered set of modes. Occupation vectors index into it positionally.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeRegistry {
    modes: Vec<(ModeId, ModeKind)>,
    next_env: u16,
}

impl Default for ModeRegistry {
    fn default() -> Self {
        Self::new()
    }
}

impl ModeRegistry {
    /// All six system modes, no environment.
    pub fn new() -> Self {
        Self::with_system_modes(1..=SYSTEM_MODES)
    }

    /// A registry holding only the given system labels, in ascending order.
    pub fn with_system_modes(labels: impl IntoIterator<Item = u8>) -> Self {
        let mut labels: Vec<u8> = labels.into_iter().collect();
        labels.sort_unstable();
        labels.dedup();
        let modes = labels
            .into_iter()
            .map(|l| (ModeId::system(l), ModeKind::System(l)))
            .collect();
        ModeRegistry {
            modes,
            next_env: SYSTEM_MODES as u16,
        }
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = ModeId> + '_ {
        self.modes.iter().map(|(id, _)| *id)
    }

    pub fn iter(&self) -> impl Iterator<Item = (ModeId, &ModeKind)> + '_ {
        self.modes.iter().map(|(id, kind)| (*id, kind))
    }

    pub fn position(&self, id: ModeId) -> Option<usize> {
        self.modes.iter().position(|(m, _)| *m == id)
    }

    pub fn require(&self, id: ModeId) -> Result<usize> {
        self.position(id).ok_or(FockError::UnknownMode(id))
    }

    pub fn kind(&self, id: ModeId) -> Option<&ModeKind> {
        self.modes.iter().find(|(m, _)| *m == id).map(|(_, k)| k)
    }

    pub fn contains(&self, id: ModeId) -> bool {
        self.position(id).is_some()
    }

    pub fn find_environment(&self, element: &str, port: ModeId) -> Option<ModeId> {
        self.modes.iter().find_map(|(id, kind)| match kind {
            ModeKind::Environment {
                element: e,
                port: p,
            } if e == element && *p == port => Some(*id),
            _ => None,
        })
    }

    /// Allocate a fresh environment mode for `(element, port)`.
    ///
    /// The new mode is appended, so existing occupation vectors extend with a
    /// trailing vacuum entry.
    pub fn register_environment_mode(&mut self, element: &str, port: ModeId) -> Result<ModeId> {
        if self.find_environment(element, port).is_some() {
            return Err(FockError::DuplicateEnvironment {
                element: element.to_owned(),
                port,
            });
        }
        let id = ModeId(self.next_env);
        self.next_env += 1;
        self.modes.push((
            id,
            ModeKind::Environment {
                element: element.to_owned(),
                port,
            },
        ));
        Ok(id)
    }

    /// Registry with `removed` dropped; remaining order is preserved.
    pub fn without(&self, removed: &[ModeId]) -> ModeRegistry {
        ModeRegistry {
            modes: self
                .modes
                .iter()
                .filter(|(id, _)| !removed.contains(id))
                .cloned()
                .collect(),
            next_env: self.next_env,
        }
    }

    /// Sub-registry holding exactly `keep`, in the order given.
    pub fn restricted_to(&self, keep: &[ModeId]) -> Result<ModeRegistry> {
        let modes = keep
            .iter()
            .map(|id| {
                self.kind(*id)
                    .cloned()
                    .map(|k| (*id, k))
                    .ok_or(FockError::UnknownMode(*id))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ModeRegistry {
            modes,
            next_env: self.next_env,
        })
    }

    /// Concatenate two registries with disjoint ids. Environment ids of the
    /// right-hand side are kept, so both must have been allocated against a
    /// common id space (system ids are global; environment ids are not
    /// shared between independent registries unless renumbered).
    pub(crate) fn joined(&self, other: &ModeRegistry) -> Result<ModeRegistry> {
        let seen: HashSet<ModeId> = self.ids().collect();
        if let Some(dup) = other.ids().find(|id| seen.contains(id)) {
            return Err(FockError::OverlappingModes(dup));
        }
        let mut modes = self.modes.clone();
        modes.extend(other.modes.iter().cloned());
        Ok(ModeRegistry {
            modes,
            next_env: self.next_env.max(other.next_env),
        })
    }

    /// True when both registries list the same mode ids with the same kinds,
    /// in the same order.
    pub fn same_layout(&self, other: &ModeRegistry) -> bool {
        self.modes == other.modes
    }
}
