use std::fmt;

use serde::{Deserialize, Serialize};

/// Maximum number of players a [`Coalition`] can hold.
pub const MAX_PLAYERS: usize = 64;

/// A set of players `0..d`, stored as a single 64-bit word.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Coalition(u64);

impl Coalition {
    pub const EMPTY: Coalition = Coalition(0);

    pub const fn from_bits(bits: u64) -> Self {
        Coalition(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    /// The grand coalition `{0, .., d-1}`.
    pub const fn full(d: usize) -> Self {
        if d >= 64 {
            Coalition(u64::MAX)
        } else {
            Coalition((1u64 << d) - 1)
        }
    }

    pub fn singleton(player: usize) -> Self {
        debug_assert!(player < MAX_PLAYERS);
        Coalition(1u64 << player)
    }

    pub fn from_players<I: IntoIterator<Item = usize>>(players: I) -> Self {
        players.into_iter().fold(Coalition::EMPTY, |acc, p| acc.with(p))
    }

    pub const fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub const fn contains(self, player: usize) -> bool {
        player < 64 && self.0 & (1u64 << player) != 0
    }

    #[must_use]
    pub fn with(self, player: usize) -> Self {
        Coalition(self.0 | (1u64 << player))
    }

    #[must_use]
    pub fn without(self, player: usize) -> Self {
        Coalition(self.0 & !(1u64 << player))
    }

    #[must_use]
    pub const fn union(self, other: Coalition) -> Self {
        Coalition(self.0 | other.0)
    }

    #[must_use]
    pub const fn intersection(self, other: Coalition) -> Self {
        Coalition(self.0 & other.0)
    }

    #[must_use]
    pub const fn difference(self, other: Coalition) -> Self {
        Coalition(self.0 & !other.0)
    }

    pub const fn is_subset(self, other: Coalition) -> bool {
        self.0 & !other.0 == 0
    }

    pub const fn is_disjoint(self, other: Coalition) -> bool {
        self.0 & other.0 == 0
    }

    /// Members in increasing order.
    pub fn iter(self) -> Members {
        Members(self.0)
    }

    /// Every subset of `self`, including `∅` and `self`.
    pub fn subsets(self) -> Subsets {
        Subsets {
            mask: self.0,
            next: Some(0),
        }
    }
}

impl fmt::Debug for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<usize> for Coalition {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        Coalition::from_players(iter)
    }
}

impl IntoIterator for Coalition {
    type Item = usize;
    type IntoIter = Members;

    fn into_iter(self) -> Members {
        self.iter()
    }
}

#[derive(Clone, Debug)]
pub struct Members(u64);

impl Iterator for Members {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let low = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(low)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Members {}

/// Enumerates submasks of a fixed mask in increasing numeric order.
#[derive(Clone, Debug)]
pub struct Subsets {
    mask: u64,
    next: Option<u64>,
}

impl Iterator for Subsets {
    type Item = Coalition;

    fn next(&mut self) -> Option<Coalition> {
        let cur = self.next?;
        // standard submask successor: (cur - mask) & mask, wrapping back to 0 at the end
        let succ = cur.wrapping_sub(self.mask) & self.mask;
        self.next = if succ == 0 { None } else { Some(succ) };
        Some(Coalition(cur))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_enumerate_powerset() {
        let c = Coalition::from_players([1, 3, 4]);
        let subs: Vec<_> = c.subsets().collect();
        assert_eq!(subs.len(), 8);
        assert!(subs.iter().all(|s| s.is_subset(c)));
        assert_eq!(subs[0], Coalition::EMPTY);
        assert_eq!(*subs.last().unwrap(), c);
    }

    #[test]
    fn full_handles_word_width() {
        assert_eq!(Coalition::full(0), Coalition::EMPTY);
        assert_eq!(Coalition::full(3).bits(), 0b111);
        assert_eq!(Coalition::full(64).len(), 64);
    }

    #[test]
    fn members_are_sorted() {
        let c = Coalition::from_players([5, 0, 63]);
        assert_eq!(c.iter().collect::<Vec<_>>(), vec![0, 5, 63]);
        assert_eq!(c.without(5).len(), 2);
    }
}
