//! Certified numerics: outward-rounded real intervals, complex disks, point
//! tuples, root enclosures and rigorous rational brackets for exp/ln.

pub mod bracket;
mod complex;
mod interval;
mod roots;

pub use complex::{ComplexBox, PointTuple};
pub use interval::RealInterval;
pub use roots::{coeff_boxes, complex_roots, eval_box, mahler_measure};

/// Working precision for rational brackets, in bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Precision {
    pub start_bits: u32,
    pub ceiling_bits: u32,
}

impl Default for Precision {
    fn default() -> Self {
        Precision { start_bits: 64, ceiling_bits: 4096 }
    }
}

impl Precision {
    pub fn with_ceiling(ceiling_bits: u32) -> Self {
        Precision { start_bits: 64.min(ceiling_bits), ceiling_bits }
    }
}
