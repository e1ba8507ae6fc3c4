//! Klainerman vector fields `∂_t, ∂₁, ∂₂, S, R, H₁, H₂` on `ℝ^{1+2}` and
//! their action on second-order jets.
//!
//! Each field is `Z = c⁰∂_t + c¹∂₁ + c²∂₂` with coefficients affine in
//! `(t, x)`, so `ZΦ` needs the gradient of `Φ` and `∂(ZΦ)` or `Z_iZ_jΦ` need
//! its Hessian. Index 0 is `t`, indices 1 and 2 are `x₁`, `x₂`.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VectorField {
    Dt,
    D1,
    D2,
    /// `S = t∂_t + x·∇`
    Scaling,
    /// `R = x₁∂₂ - x₂∂₁`
    Rotation,
    /// `H₁ = x₁∂_t + t∂₁`
    Boost1,
    /// `H₂ = x₂∂_t + t∂₂`
    Boost2,
}

impl VectorField {
    pub const ALL: [VectorField; 7] = [
        VectorField::Dt,
        VectorField::D1,
        VectorField::D2,
        VectorField::Scaling,
        VectorField::Rotation,
        VectorField::Boost1,
        VectorField::Boost2,
    ];

    /// `(c⁰, c¹, c²)` at `p = (t, x₁, x₂)`.
    pub fn coefficients(self, p: [f64; 3]) -> [f64; 3] {
        let [t, x1, x2] = p;
        match self {
            VectorField::Dt => [1.0, 0.0, 0.0],
            VectorField::D1 => [0.0, 1.0, 0.0],
            VectorField::D2 => [0.0, 0.0, 1.0],
            VectorField::Scaling => [t, x1, x2],
            VectorField::Rotation => [0.0, -x2, x1],
            VectorField::Boost1 => [x1, t, 0.0],
            VectorField::Boost2 => [x2, 0.0, t],
        }
    }

    /// `J[a][b] = ∂_a c^b`, constant in `(t, x)`.
    pub fn jacobian(self) -> [[f64; 3]; 3] {
        let mut j = [[0.0; 3]; 3];
        match self {
            VectorField::Dt | VectorField::D1 | VectorField::D2 => {}
            VectorField::Scaling => {
                j[0][0] = 1.0;
                j[1][1] = 1.0;
                j[2][2] = 1.0;
            }
            VectorField::Rotation => {
                j[1][2] = 1.0;
                j[2][1] = -1.0;
            }
            VectorField::Boost1 => {
                j[0][1] = 1.0;
                j[1][0] = 1.0;
            }
            VectorField::Boost2 => {
                j[0][2] = 1.0;
                j[2][0] = 1.0;
            }
        }
        j
    }
}

/// Second-order jet of `Φ` at a space-time point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointJet {
    pub p: [f64; 3],
    pub v: f64,
    pub g: [f64; 3],
    pub h: [[f64; 3]; 3],
}

impl PointJet {
    /// `ZΦ`.
    pub fn apply(&self, z: VectorField) -> f64 {
        let c = z.coefficients(self.p);
        c[0] * self.g[0] + c[1] * self.g[1] + c[2] * self.g[2]
    }

    /// `∂_a(ZΦ) = Σ_b (∂_a c^b)∂_bΦ + Σ_b c^b ∂_a∂_bΦ`.
    pub fn grad_apply(&self, z: VectorField) -> [f64; 3] {
        let c = z.coefficients(self.p);
        let j = z.jacobian();
        let mut out = [0.0; 3];
        for (a, o) in out.iter_mut().enumerate() {
            for b in 0..3 {
                *o += j[a][b] * self.g[b] + c[b] * self.h[a][b];
            }
        }
        out
    }

    /// `Z_iZ_jΦ = Σ_a c_i^a ∂_a(Z_jΦ)`.
    pub fn apply2(&self, zi: VectorField, zj: VectorField) -> f64 {
        let c = zi.coefficients(self.p);
        let d = self.grad_apply(zj);
        c[0] * d[0] + c[1] * d[1] + c[2] * d[2]
    }

    /// `Σ_{|α|≤2} |Z^αΦ|²` over the identity, the seven fields and their 49
    /// ordered products.
    pub fn z_sum_sq(&self) -> f64 {
        let mut acc = self.v * self.v;
        for zi in VectorField::ALL {
            let a = self.apply(zi);
            acc += a * a;
            for zj in VectorField::ALL {
                let b = self.apply2(zi, zj);
                acc += b * b;
            }
        }
        acc
    }
}
