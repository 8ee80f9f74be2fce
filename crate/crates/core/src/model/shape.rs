use serde::Serialize;

/// A triangle of shape X matched to a triangle of shape Y, identified by
/// three vertex indices on each side. Repeated indices denote degenerate
/// triangles (edges or vertices).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct TriangleProduct {
    pub x: [usize; 3],
    pub y: [usize; 3],
}

impl TriangleProduct {
    pub fn is_degenerate_x(&self) -> bool {
        has_repeat(&self.x)
    }

    pub fn is_degenerate_y(&self) -> bool {
        has_repeat(&self.y)
    }

    /// Variable name `x_a1_a2_a3__b1_b2_b3`.
    pub fn variable_name(&self) -> String {
        format!(
            "x_{}_{}_{}__{}_{}_{}",
            self.x[0], self.x[1], self.x[2], self.y[0], self.y[1], self.y[2]
        )
    }
}

fn has_repeat(t: &[usize; 3]) -> bool {
    t[0] == t[1] || t[1] == t[2] || t[0] == t[2]
}
