//! Additive angle shares modulo 2π.
//!
//! Shares are classical values; only their arithmetic enters the protocol.
//! The distributor of a GHZ state receives a share that is generated but
//! never applied, so the *participating* shares are the ones that sum to the
//! effective target.

use std::f64::consts::TAU;

use crate::error::{invalid, Result};
use crate::rng::RngStream;

/// Tolerance for modular angle identities.
pub const ANGLE_TOL: f64 = 1e-9;

/// Reduces an angle into `[0, 2π)`.
pub fn wrap_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs.
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Circular distance between two angles, in `[0, π]`.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    let d = wrap_angle(a - b);
    d.min(TAU - d)
}

#[derive(Clone, Debug, PartialEq)]
pub struct AngleShareSet {
    ghz_index: usize,
    shares: Vec<f64>,
    target: f64,
    participating: Vec<bool>,
}

impl AngleShareSet {
    /// All shares zero, every user except `excluded` participating.
    pub fn zero(n: usize, ghz_index: usize, excluded: Option<usize>) -> Result<Self> {
        let participating = participation(n, excluded)?;
        Ok(Self {
            ghz_index,
            shares: vec![0.0; n],
            target: 0.0,
            participating,
        })
    }

    /// Wraps explicit shares. `target` is recomputed from the participants.
    pub fn from_shares(ghz_index: usize, shares: Vec<f64>, excluded: Option<usize>) -> Result<Self> {
        if shares.iter().any(|s| !s.is_finite()) {
            return invalid("shares must be finite");
        }
        let participating = participation(shares.len(), excluded)?;
        let shares: Vec<f64> = shares.into_iter().map(wrap_angle).collect();
        let mut set = Self {
            ghz_index,
            shares,
            target: 0.0,
            participating,
        };
        set.target = reconstruct(&set);
        Ok(set)
    }

    pub fn ghz_index(&self) -> usize {
        self.ghz_index
    }

    /// Same shares relabelled for another GHZ index. The participation mask is
    /// rebuilt so the new distributor is excluded.
    pub fn reassigned(&self, ghz_index: usize, excluded: Option<usize>) -> Result<Self> {
        Self::from_shares(ghz_index, self.shares.clone(), excluded)
    }

    pub fn len(&self) -> usize {
        self.shares.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shares.is_empty()
    }

    pub fn share(&self, user: usize) -> f64 {
        self.shares[user]
    }

    pub fn shares(&self) -> &[f64] {
        &self.shares
    }

    pub fn target(&self) -> f64 {
        self.target
    }

    pub fn is_participating(&self, user: usize) -> bool {
        self.participating[user]
    }

    pub fn participation_mask(&self) -> &[bool] {
        &self.participating
    }

    pub fn excluded(&self) -> Option<usize> {
        self.participating.iter().position(|&p| !p)
    }
}

fn participation(n: usize, excluded: Option<usize>) -> Result<Vec<bool>> {
    if n < 2 {
        return invalid(format!("need at least 2 users, got {n}"));
    }
    if let Some(e) = excluded {
        if e >= n {
            return invalid(format!("excluded user {e} out of range for {n} users"));
        }
    }
    Ok((0..n).map(|i| Some(i) != excluded).collect())
}

/// Draws uniform shares for every user, then fixes the last participating
/// share so the participating sum is `effective_target` mod 2π.
pub fn generate_shares(
    n: usize,
    ghz_index: usize,
    effective_target: f64,
    excluded: Option<usize>,
    rng: &mut RngStream,
) -> Result<AngleShareSet> {
    if !effective_target.is_finite() {
        return invalid("target angle must be finite");
    }
    let participating = participation(n, excluded)?;
    let target = wrap_angle(effective_target);
    let last = participating
        .iter()
        .rposition(|&p| p)
        .expect("at least one participant when n >= 2");
    let mut shares: Vec<f64> = (0..n).map(|_| rng.uniform_in(0.0, TAU)).collect();
    let partial: f64 = (0..n)
        .filter(|&i| participating[i] && i != last)
        .map(|i| shares[i])
        .sum();
    shares[last] = wrap_angle(target - partial);
    Ok(AngleShareSet {
        ghz_index,
        shares,
        target,
        participating,
    })
}

/// Participating sum mod 2π.
pub fn reconstruct(set: &AngleShareSet) -> f64 {
    wrap_angle(
        set.shares
            .iter()
            .zip(&set.participating)
            .filter(|(_, &p)| p)
            .map(|(s, _)| s)
            .sum(),
    )
}
