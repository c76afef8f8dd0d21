//! Quadrature rules on triangles in barycentric coordinates.

use alloc::vec::Vec;

/// Quadrature used for the element integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum QuadratureRule {
    /// One point at the centroid (exact for linear integrands).
    #[default]
    Barycenter,
    /// Trapezoidal rule on the three vertices.
    Vertex,
    /// Three edge midpoints (exact for quadratics).
    EdgeMidpoint,
    /// Seven-point rule exact for polynomials of degree 5.
    HighOrder,
}

/// A quadrature point: barycentric coordinates and weight (weights sum to 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraturePoint {
    pub bary: [f64; 3],
    pub weight: f64,
}

impl QuadratureRule {
    pub fn points(self) -> Vec<QuadraturePoint> {
        let p = |bary: [f64; 3], weight: f64| QuadraturePoint { bary, weight };
        let third = 1.0 / 3.0;
        match self {
            Self::Barycenter => alloc::vec![p([third; 3], 1.0)],
            Self::Vertex => {
                alloc::vec![p([1.0, 0.0, 0.0], third), p([0.0, 1.0, 0.0], third), p([0.0, 0.0, 1.0], third),]
            }
            Self::EdgeMidpoint => {
                alloc::vec![p([0.5, 0.5, 0.0], third), p([0.0, 0.5, 0.5], third), p([0.5, 0.0, 0.5], third),]
            }
            Self::HighOrder => {
                let s = crate::math::sqrt(15.0);
                let a1 = (6.0 - s) / 21.0;
                let a2 = (6.0 + s) / 21.0;
                let w1 = (155.0 - s) / 1200.0;
                let w2 = (155.0 + s) / 1200.0;
                let b1 = 1.0 - 2.0 * a1;
                let b2 = 1.0 - 2.0 * a2;
                alloc::vec![
                    p([third; 3], 9.0 / 40.0),
                    p([a1, a1, b1], w1),
                    p([a1, b1, a1], w1),
                    p([b1, a1, a1], w1),
                    p([a2, a2, b2], w2),
                    p([a2, b2, a2], w2),
                    p([b2, a2, a2], w2),
                ]
            }
        }
    }

    /// Polynomial degree integrated exactly.
    pub fn degree(self) -> u32 {
        match self {
            Self::Barycenter | Self::Vertex => 1,
            Self::EdgeMidpoint => 2,
            Self::HighOrder => 5,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Barycenter => "barycenter",
            Self::Vertex => "vertex",
            Self::EdgeMidpoint => "edge-midpoint",
            Self::HighOrder => "high-order",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "barycenter" | "midpoint" => Some(Self::Barycenter),
            "vertex" => Some(Self::Vertex),
            "edge-midpoint" | "edge_midpoint" => Some(Self::EdgeMidpoint),
            "high-order" | "high_order" | "exact" => Some(Self::HighOrder),
            _ => None,
        }
    }
}
