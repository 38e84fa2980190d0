use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    C,
    H,
    W,
}

/// Storage order of a sparse matrix. The first letter is the axis stored in
/// each node's index; segments run along the second.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AxisOrder2 {
    /// One segment per row (height), nodes indexed by column (width).
    Wh,
    /// One segment per column (width), nodes indexed by row (height).
    Hw,
}

impl AxisOrder2 {
    pub fn transposed(self) -> Self {
        match self {
            AxisOrder2::Wh => AxisOrder2::Hw,
            AxisOrder2::Hw => AxisOrder2::Wh,
        }
    }
}

/// Storage order of a sparse 3-D tensor, innermost axis first: `Chw` keeps
/// channel fibers contiguous, visited height-major within each width.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AxisOrder3 {
    Whc,
    Wch,
    Hwc,
    Hcw,
    Chw,
    Cwh,
}

impl AxisOrder3 {
    pub const ALL: [AxisOrder3; 6] = [
        AxisOrder3::Whc,
        AxisOrder3::Wch,
        AxisOrder3::Hwc,
        AxisOrder3::Hcw,
        AxisOrder3::Chw,
        AxisOrder3::Cwh,
    ];

    /// `[inner, middle, outer]`: nodes index the inner axis, segments run
    /// over the middle axis and constituent matrices over the outer axis.
    pub fn axes(self) -> [Axis; 3] {
        use Axis::*;
        match self {
            AxisOrder3::Whc => [W, H, C],
            AxisOrder3::Wch => [W, C, H],
            AxisOrder3::Hwc => [H, W, C],
            AxisOrder3::Hcw => [H, C, W],
            AxisOrder3::Chw => [C, H, W],
            AxisOrder3::Cwh => [C, W, H],
        }
    }

    /// Tag byte used by the binary codec.
    pub fn tag(self) -> u8 {
        match self {
            AxisOrder3::Whc => 0,
            AxisOrder3::Wch => 1,
            AxisOrder3::Hwc => 2,
            AxisOrder3::Hcw => 3,
            AxisOrder3::Chw => 4,
            AxisOrder3::Cwh => 5,
        }
    }

    pub fn from_tag(tag: u8) -> Result<Self> {
        AxisOrder3::ALL
            .get(tag as usize)
            .copied()
            .ok_or_else(|| Error::format(format!("unknown axis order tag {tag}")))
    }

    pub fn name(self) -> &'static str {
        match self {
            AxisOrder3::Whc => "whc",
            AxisOrder3::Wch => "wch",
            AxisOrder3::Hwc => "hwc",
            AxisOrder3::Hcw => "hcw",
            AxisOrder3::Chw => "chw",
            AxisOrder3::Cwh => "cwh",
        }
    }
}

impl std::str::FromStr for AxisOrder3 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim_start_matches("O_").trim_start_matches("o_");
        AxisOrder3::ALL
            .into_iter()
            .find(|o| o.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::format(format!("unsupported axis order {s:?}")))
    }
}
