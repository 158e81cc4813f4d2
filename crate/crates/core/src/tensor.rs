use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Cartesian 3x3 complex tensor, indexed `[i][j]` with `0, 1, 2 = x, y, z`.
pub type Tensor3 = [[Complex64; 3]; 3];

pub const ZERO: Tensor3 = [[Complex64::new(0.0, 0.0); 3]; 3];

pub fn add(a: &Tensor3, b: &Tensor3) -> Tensor3 {
    let mut out = ZERO;
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[i][j] + b[i][j];
        }
    }
    out
}

pub fn scale(a: &Tensor3, s: Complex64) -> Tensor3 {
    let mut out = *a;
    out.iter_mut().flatten().for_each(|v| *v *= s);
    out
}

pub fn transpose(a: &Tensor3) -> Tensor3 {
    let mut out = ZERO;
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[j][i];
        }
    }
    out
}

/// `R * T * R^T` for a real rotation matrix `R`.
pub fn rotate(rot: &[[f64; 3]; 3], t: &Tensor3) -> Tensor3 {
    let mut out = ZERO;
    for i in 0..3 {
        for j in 0..3 {
            let mut acc = Complex64::new(0.0, 0.0);
            for a in 0..3 {
                for b in 0..3 {
                    acc += t[a][b] * (rot[i][a] * rot[j][b]);
                }
            }
            out[i][j] = acc;
        }
    }
    out
}

/// Rotation about `z` by `angle`.
pub fn rotation_z(angle: f64) -> [[f64; 3]; 3] {
    let (s, c) = angle.sin_cos();
    [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]
}

/// Largest entry magnitude.
pub fn max_abs(t: &Tensor3) -> f64 {
    t.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Largest entry-wise difference relative to the larger of the two norms.
pub fn rel_diff(a: &Tensor3, b: &Tensor3) -> f64 {
    let scale = max_abs(a).max(max_abs(b));
    if scale == 0.0 {
        return 0.0;
    }
    let mut worst = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            worst = worst.max((a[i][j] - b[i][j]).norm());
        }
    }
    worst / scale
}

/// A single tensor entry `V_ij`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Component {
    pub i: usize,
    pub j: usize,
}

impl Component {
    pub const XX: Component = Component { i: 0, j: 0 };
    pub const YY: Component = Component { i: 1, j: 1 };
    pub const ZZ: Component = Component { i: 2, j: 2 };
    pub const XY: Component = Component { i: 0, j: 1 };
    pub const XZ: Component = Component { i: 0, j: 2 };
    pub const YZ: Component = Component { i: 1, j: 2 };

    /// The six independent entries of a symmetric tensor.
    pub const SIX: [Component; 6] = [
        Component::XX,
        Component::YY,
        Component::ZZ,
        Component::XY,
        Component::XZ,
        Component::YZ,
    ];

    pub fn new(i: usize, j: usize) -> Option<Component> {
        (i < 3 && j < 3).then_some(Component { i, j })
    }

    pub fn transposed(self) -> Component {
        Component { i: self.j, j: self.i }
    }

    pub fn get(self, t: &Tensor3) -> Complex64 {
        t[self.i][self.j]
    }

    pub fn is_diagonal(self) -> bool {
        self.i == self.j
    }
}

const AXES: [char; 3] = ['x', 'y', 'z'];

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", AXES[self.i], AXES[self.j])
    }
}

impl FromStr for Component {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        let axis = |c: char| AXES.iter().position(|&a| a == c.to_ascii_lowercase());
        let mut chars = s.trim().chars();
        match (chars.next().and_then(axis), chars.next().and_then(axis), chars.next()) {
            (Some(i), Some(j), None) => Ok(Component { i, j }),
            _ => Err(crate::Error::InvalidInput(format!("unknown tensor component '{s}'"))),
        }
    }
}

impl TryFrom<String> for Component {
    type Error = crate::Error;
    fn try_from(s: String) -> crate::Result<Self> {
        s.parse()
    }
}

impl From<Component> for String {
    fn from(c: Component) -> String {
        c.to_string()
    }
}

/// Cavity coupling tensor with its RD/NRD split and truncation metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingResult {
    /// Sum of the terms with `p^2 > k^2` (propagating modes).
    pub rd: Tensor3,
    /// Sum of the terms with `p^2 < k^2` (evanescent modes).
    pub nrd: Tensor3,
    pub total: Tensor3,
    pub terms_used: u64,
    pub converged: bool,
    /// Estimated magnitude of the discarded tail, per entry.
    pub tail_bound: f64,
}
