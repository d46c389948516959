//! Minimal 3D rigid-body math: rotations, translations and their composition.

use crate::scalar::Real;

pub type Vec3<T> = [T; 3];
pub type Mat3<T> = [[T; 3]; 3];

pub fn add<T: Real>(a: Vec3<T>, b: Vec3<T>) -> Vec3<T> {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn sub<T: Real>(a: Vec3<T>, b: Vec3<T>) -> Vec3<T> {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn scale<T: Real>(a: Vec3<T>, s: T) -> Vec3<T> {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub fn norm<T: Real>(a: Vec3<T>) -> T {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

fn mat_mul<T: Real>(a: &Mat3<T>, b: &Mat3<T>) -> Mat3<T> {
    let mut out = [[T::zero(); 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, o) in row.iter_mut().enumerate() {
            *o = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
        }
    }
    out
}

fn mat_vec<T: Real>(a: &Mat3<T>, v: Vec3<T>) -> Vec3<T> {
    [
        a[0][0] * v[0] + a[0][1] * v[1] + a[0][2] * v[2],
        a[1][0] * v[0] + a[1][1] * v[1] + a[1][2] * v[2],
        a[2][0] * v[0] + a[2][1] * v[1] + a[2][2] * v[2],
    ]
}

fn transpose<T: Real>(a: &Mat3<T>) -> Mat3<T> {
    let mut out = *a;
    for (i, row) in out.iter_mut().enumerate() {
        for (j, o) in row.iter_mut().enumerate() {
            *o = a[j][i];
        }
    }
    out
}

fn identity<T: Real>() -> Mat3<T> {
    let (o, z) = (T::one(), T::zero());
    [[o, z, z], [z, o, z], [z, z, o]]
}

/// Rotation by `angle` about the unit vector `axis` (Rodrigues).
pub fn axis_angle<T: Real>(axis: Vec3<T>, angle: T) -> Mat3<T> {
    let (s, c) = angle.sin_cos();
    let t = T::one() - c;
    let [x, y, z] = axis;
    [
        [t * x * x + c, t * x * y - s * z, t * x * z + s * y],
        [t * x * y + s * z, t * y * y + c, t * y * z - s * x],
        [t * x * z - s * y, t * y * z + s * x, t * z * z + c],
    ]
}

/// Fixed-axis roll/pitch/yaw: `Rz(yaw) * Ry(pitch) * Rx(roll)`.
pub fn from_rpy<T: Real>(rpy: Vec3<T>) -> Mat3<T> {
    let (o, z) = (T::one(), T::zero());
    let rx = axis_angle([o, z, z], rpy[0]);
    let ry = axis_angle([z, o, z], rpy[1]);
    let rz = axis_angle([z, z, o], rpy[2]);
    mat_mul(&rz, &mat_mul(&ry, &rx))
}

/// Largest entry of `R^T R - I`.
pub fn orthonormality_error<T: Real>(r: &Mat3<T>) -> T {
    let p = mat_mul(&transpose(r), r);
    let id = identity::<T>();
    let mut worst = T::zero();
    for i in 0..3 {
        for j in 0..3 {
            worst = worst.max((p[i][j] - id[i][j]).abs());
        }
    }
    worst
}

/// `x -> rotation * x + translation`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rigid<T> {
    pub rotation: Mat3<T>,
    pub translation: Vec3<T>,
}

impl<T: Real> Rigid<T> {
    pub fn identity() -> Self {
        Self {
            rotation: identity(),
            translation: [T::zero(); 3],
        }
    }

    pub fn from_xyz_rpy(xyz: Vec3<T>, rpy: Vec3<T>) -> Self {
        Self {
            rotation: from_rpy(rpy),
            translation: xyz,
        }
    }

    pub fn rotation(rotation: Mat3<T>) -> Self {
        Self {
            rotation,
            translation: [T::zero(); 3],
        }
    }

    pub fn translation(translation: Vec3<T>) -> Self {
        Self {
            rotation: identity(),
            translation,
        }
    }

    /// `self * other`: apply `other` first.
    pub fn then(&self, other: &Self) -> Self {
        Self {
            rotation: mat_mul(&self.rotation, &other.rotation),
            translation: add(mat_vec(&self.rotation, other.translation), self.translation),
        }
    }

    pub fn apply(&self, p: Vec3<T>) -> Vec3<T> {
        add(mat_vec(&self.rotation, p), self.translation)
    }

    pub fn inverse(&self) -> Self {
        let rt = transpose(&self.rotation);
        Self {
            translation: scale(mat_vec(&rt, self.translation), -T::one()),
            rotation: rt,
        }
    }
}
