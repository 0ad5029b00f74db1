use rand::seq::SliceRandom;

use crate::error::{invalid, Result};
use crate::rng::RngStream;

/// The distributor's secret bijection from GHZ slots to users.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GhzAssignment {
    distributor: usize,
    slot_to_user: Vec<usize>,
    user_to_slot: Vec<usize>,
}

impl GhzAssignment {
    pub fn from_mapping(distributor: usize, slot_to_user: Vec<usize>) -> Result<Self> {
        let n = slot_to_user.len();
        if distributor >= n {
            return invalid(format!("distributor {distributor} out of range for {n} users"));
        }
        let mut user_to_slot = vec![usize::MAX; n];
        for (slot, &user) in slot_to_user.iter().enumerate() {
            if user >= n || user_to_slot[user] != usize::MAX {
                return invalid("slot mapping is not a bijection");
            }
            user_to_slot[user] = slot;
        }
        Ok(Self {
            distributor,
            slot_to_user,
            user_to_slot,
        })
    }

    /// Slot `s` held by user `s`.
    pub fn identity(n: usize, distributor: usize) -> Result<Self> {
        Self::from_mapping(distributor, (0..n).collect())
    }

    pub fn distributor(&self) -> usize {
        self.distributor
    }

    pub fn n(&self) -> usize {
        self.slot_to_user.len()
    }

    /// `Φ(slot)`.
    pub fn user_at(&self, slot: usize) -> usize {
        self.slot_to_user[slot]
    }

    /// `Φ⁻¹(user)`: the one piece of the mapping each holder learns.
    pub fn slot_of(&self, user: usize) -> usize {
        self.user_to_slot[user]
    }

    pub fn mapping(&self) -> &[usize] {
        &self.slot_to_user
    }
}

/// Draws a uniformly random slot-to-user bijection for `distributor`'s GHZ.
pub fn assign_ghz(n: usize, distributor: usize, rng: &mut RngStream) -> Result<GhzAssignment> {
    if n < 2 {
        return invalid(format!("need at least 2 users, got {n}"));
    }
    let mut mapping: Vec<usize> = (0..n).collect();
    mapping.shuffle(rng);
    GhzAssignment::from_mapping(distributor, mapping)
}
