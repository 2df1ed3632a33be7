//! Scalar abstraction for vector math.
//!
//! Embeddings and the vector index are generic over the element type so the
//! same code serves compact `f32` storage and full-precision `f64` analysis.
//! Scoring always happens in `f64`: widening an `f32` is exact, so results
//! are deterministic for either storage width.

use num_traits::{Float, FromPrimitive};

/// Element type of embedding vectors: `f32` or `f64`.
pub trait Scalar: Float + FromPrimitive + Send + Sync + std::fmt::Debug + 'static {
    /// Serialized width in bytes (little-endian IEEE 754).
    const WIDTH: u8;

    fn to_f64(self) -> f64;
    fn from_f64(v: f64) -> Self;
    fn write_le(self, buf: &mut Vec<u8>);
    fn read_le(bytes: &[u8]) -> Self;
}

impl Scalar for f32 {
    const WIDTH: u8 = 4;

    #[inline]
    fn to_f64(self) -> f64 {
        self as f64
    }

    #[inline]
    fn from_f64(v: f64) -> Self {
        v as f32
    }

    fn write_le(self, buf: &mut Vec<u8>) {
        buf.extend_from_slice(&self.to_le_bytes());
    }

    fn read_le(bytes: &[u8]) -> Self {
        f32::from_le_bytes(bytes[..4].try_into().expect("scalar width"))
    }
}

impl Scalar for f64 {
    const WIDTH: u8 = 8;

    #[inline]
    fn to_f64(self) -> f64 {
        self
    }

    #[inline]
    fn from_f64(v: f64) -> Self {
        v
    }

    fn write_le(self, buf: &mut Vec<u8>) {
        buf.extend_from_slice(&self.to_le_bytes());
    }

    fn read_le(bytes: &[u8]) -> Self {
        f64::from_le_bytes(bytes[..8].try_into().expect("scalar width"))
    }
}
