//! Shapes and the broadcast condition.
//!
//! Shapes of different orders are aligned by appending trailing ones:
//! `3×4`, `3×4×1` and `3×4×1×1` all denote the same shape. Leading ones are
//! never inserted, so `2×3` and `1×2×3` are unrelated shapes.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Ordered list of positive mode lengths.
///
/// An order-0 (scalar) shape is represented as `(1)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Shape(Vec<usize>);

impl Shape {
    pub fn new(dims: impl Into<Vec<usize>>) -> Result<Self> {
        let mut dims = dims.into();
        if let Some(pos) = dims.iter().position(|&d| d == 0) {
            return Err(Error::InvalidShape(format!(
                "mode {} has length 0; every mode length must be at least 1",
                pos + 1
            )));
        }
        if dims.is_empty() {
            dims.push(1);
        }
        Ok(Shape(dims))
    }

    pub fn scalar() -> Self {
        Shape(vec![1])
    }

    pub fn dims(&self) -> &[usize] {
        &self.0
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    /// Total number of elements.
    pub fn numel(&self) -> usize {
        self.0.iter().product()
    }

    /// Length of `mode` (0-based), treating modes past the end as trailing ones.
    pub fn dim(&self, mode: usize) -> usize {
        self.0.get(mode).copied().unwrap_or(1)
    }

    /// Pads with trailing ones up to `order`. Never removes modes.
    pub fn padded(&self, order: usize) -> Shape {
        let mut dims = self.0.clone();
        if dims.len() < order {
            dims.resize(order, 1);
        }
        Shape(dims)
    }

    /// Equal up to trailing ones.
    pub fn is_equivalent(&self, other: &Shape) -> bool {
        let n = self.order().max(other.order());
        (0..n).all(|m| self.dim(m) == other.dim(m))
    }

    /// Column-major strides: mode 1 varies fastest.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = Vec::with_capacity(self.0.len());
        let mut acc = 1;
        for &d in &self.0 {
            strides.push(acc);
            acc *= d;
        }
        strides
    }

    /// Per-mode maximum of two compatible shapes (the broadcast product's shape).
    pub fn broadcast_with(&self, other: &Shape) -> Result<Shape> {
        let (a, b) = normalize_orders(self, other);
        let mut dims = Vec::with_capacity(a.order());
        for (m, (&i, &j)) in a.0.iter().zip(&b.0).enumerate() {
            if i != j && i != 1 && j != 1 {
                return Err(Error::Incompatible {
                    left: self.clone(),
                    right: other.clone(),
                    mode: m + 1,
                });
            }
            dims.push(i.max(j));
        }
        Ok(Shape(dims))
    }

    /// Per-mode minimum of two compatible shapes (the marginalized shape).
    pub fn marginal_with(&self, other: &Shape) -> Result<Shape> {
        self.broadcast_with(other)?;
        let (a, b) = normalize_orders(self, other);
        Ok(Shape(a.0.iter().zip(&b.0).map(|(&i, &j)| i.min(j)).collect()))
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "×")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses `"2,3,4"` (commas, `x` or whitespace as separators).
impl FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let dims = s
            .split(|c: char| c == ',' || c == 'x' || c == '×' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|e| Error::InvalidShape(format!("{t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if dims.is_empty() {
            return Err(Error::InvalidShape(format!("no mode lengths in {s:?}")));
        }
        Shape::new(dims)
    }
}

impl TryFrom<Vec<usize>> for Shape {
    type Error = Error;

    fn try_from(dims: Vec<usize>) -> Result<Self> {
        Shape::new(dims)
    }
}

impl TryFrom<&[usize]> for Shape {
    type Error = Error;

    fn try_from(dims: &[usize]) -> Result<Self> {
        Shape::new(dims.to_vec())
    }
}

/// Pads the shorter shape with trailing ones so both have the larger order.
pub fn normalize_orders(a: &Shape, b: &Shape) -> (Shape, Shape) {
    let n = a.order().max(b.order());
    (a.padded(n), b.padded(n))
}

/// Every mode has equal lengths or one of the lengths is 1.
pub fn broadcast_compatible(a: &Shape, b: &Shape) -> bool {
    let (a, b) = normalize_orders(a, b);
    a.0.iter()
        .zip(&b.0)
        .all(|(&i, &j)| i == j || i == 1 || j == 1)
}

/// Classification of modes for the least-squares problem `min ‖X − W ⊡ H‖`.
///
/// With `D` the shape of the unknown `W` and `F` the shape of the known `H`:
/// `left` holds modes with `D > 1, F = 1`, `shared` holds modes with `D = F`
/// (including `D = F = 1`), `right` holds modes with `D = 1, F > 1`.
/// Mode indices are 0-based and sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModePartition {
    pub left: Vec<usize>,
    pub shared: Vec<usize>,
    pub right: Vec<usize>,
}

impl ModePartition {
    pub fn order(&self) -> usize {
        self.left.len() + self.shared.len() + self.right.len()
    }

    /// Mode ordering `(left, shared, right)` used to reduce to a third-order problem.
    pub fn permutation(&self) -> Vec<usize> {
        self.left
            .iter()
            .chain(&self.shared)
            .chain(&self.right)
            .copied()
            .collect()
    }
}

impl fmt::Display for ModePartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |modes: &[usize]| {
            modes
                .iter()
                .map(|m| (m + 1).to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(
            f,
            "L={{{}}} S={{{}}} R={{{}}}",
            show(&self.left),
            show(&self.shared),
            show(&self.right)
        )
    }
}
