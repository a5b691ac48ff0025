use super::{mask, Subspace, Word, MAX_HALF_WIDTH};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Decomposition of `V` into `b` bricks of `s` bits each. Brick 1 occupies
/// the lowest `s` bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BrickLayout {
    s: u32,
    b: u32,
}

impl BrickLayout {
    pub fn new(s: u32, b: u32) -> Result<Self> {
        if s == 0 || b == 0 || s * b > MAX_HALF_WIDTH {
            return Err(Error::InvalidLayout { s, b });
        }
        Ok(BrickLayout { s, b })
    }

    #[inline]
    pub fn brick_width(&self) -> u32 {
        self.s
    }

    #[inline]
    pub fn bricks(&self) -> u32 {
        self.b
    }

    #[inline]
    pub fn width(&self) -> u32 {
        self.s * self.b
    }

    /// Bits of brick `j` (0-based).
    #[inline]
    pub fn brick_mask(&self, j: u32) -> Word {
        mask(self.s) << (j * self.s)
    }

    #[inline]
    pub fn brick_value(&self, x: Word, j: u32) -> Word {
        (x >> (j * self.s)) & mask(self.s)
    }

    /// Every wall, by increasing member bitmask.
    pub fn walls(&self) -> impl Iterator<Item = Wall> + '_ {
        let full = (1u32 << self.b) - 1;
        (1..full).map(move |members| Wall {
            layout: *self,
            members,
        })
    }
}

/// A direct sum of a non-empty proper subset of bricks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Wall {
    layout: BrickLayout,
    /// Bit `j` set iff brick `j + 1` is a member.
    members: u32,
}

impl Wall {
    pub fn new(layout: BrickLayout, members: u32) -> Result<Self> {
        let full = (1u32 << layout.b) - 1;
        if members == 0 || members & !full != 0 || members == full {
            return Err(Error::NotAWall(members));
        }
        Ok(Wall { layout, members })
    }

    pub fn layout(&self) -> BrickLayout {
        self.layout
    }

    pub fn members(&self) -> u32 {
        self.members
    }

    /// 1-based brick indices.
    pub fn member_list(&self) -> Vec<u32> {
        (0..self.layout.b)
            .filter(|j| (self.members >> j) & 1 == 1)
            .map(|j| j + 1)
            .collect()
    }

    pub fn bit_mask(&self) -> Word {
        (0..self.layout.b)
            .filter(|j| (self.members >> j) & 1 == 1)
            .fold(0, |m, j| m | self.layout.brick_mask(j))
    }

    pub fn subspace(&self) -> Subspace {
        let m = self.bit_mask();
        Subspace::span(
            self.layout.width(),
            (0..32).filter(|i| (m >> i) & 1 == 1).map(|i| 1 << i),
        )
    }
}

impl fmt::Display for Wall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.member_list().iter().map(|j| format!("V{j}")).collect();
        write!(f, "{}", names.join("+"))
    }
}

/// The wall on the member set `members` (bit `j` = brick `j + 1`).
pub fn wall_subspace(layout: BrickLayout, members: u32) -> Result<Subspace> {
    Ok(Wall::new(layout, members)?.subspace())
}

/// Member set of `u` if it is a wall of `layout`.
pub fn as_wall(layout: BrickLayout, u: &Subspace) -> Option<u32> {
    if u.width() != layout.width() {
        return None;
    }
    let members = (0..layout.b)
        .filter(|&j| {
            let bm = layout.brick_mask(j);
            (0..32)
                .filter(|i| (bm >> i) & 1 == 1)
                .all(|i| u.contains(1 << i))
        })
        .fold(0, |m, j| m | (1 << j));
    let wall = Wall::new(layout, members).ok()?;
    (wall.subspace() == *u).then_some(members)
}
