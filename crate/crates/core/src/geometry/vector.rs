//! Small fixed-size linear algebra: points, unit directions, quaternions and poses.
//!
//! World frame is right-handed with +Y up. A pose looks along its local -Z axis.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::GeometryError;

/// Tolerance on the norm of unit directions and quaternions.
pub const UNIT_TOLERANCE: f64 = 1e-9;

/// A 3-vector in meters. Used both for points and free vectors.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// A position in the world frame (meters).
pub type Point3 = Vec3;

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);
    pub const X: Vec3 = Vec3::new(1.0, 0.0, 0.0);
    pub const Y: Vec3 = Vec3::new(0.0, 1.0, 0.0);
    pub const Z: Vec3 = Vec3::new(0.0, 0.0, 1.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn distance(self, o: Vec3) -> f64 {
        (self - o).norm()
    }

    pub fn distance_squared(self, o: Vec3) -> f64 {
        (self - o).norm_squared()
    }

    pub fn lerp(self, o: Vec3, f: f64) -> Vec3 {
        self + (o - self) * f
    }

    pub fn min(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x.min(o.x), self.y.min(o.y), self.z.min(o.z))
    }

    pub fn max(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x.max(o.x), self.y.max(o.y), self.z.max(o.z))
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn axis(self, axis: usize) -> f64 {
        match axis {
            0 => self.x,
            1 => self.y,
            _ => self.z,
        }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    /// Normalizes to a unit direction, failing on zero-length or non-finite input.
    pub fn normalized(self) -> Result<Direction3, GeometryError> {
        Direction3::new(self)
    }
}

impl From<[f64; 3]> for Vec3 {
    fn from(a: [f64; 3]) -> Self {
        Vec3::new(a[0], a[1], a[2])
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Div<f64> for Vec3 {
    type Output = Vec3;
    fn div(self, s: f64) -> Vec3 {
        Vec3::new(self.x / s, self.y / s, self.z / s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl Serialize for Vec3 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_array().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Vec3 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let a = <[f64; 3]>::deserialize(d)?;
        let v = Vec3::from(a);
        if !v.is_finite() {
            return Err(serde::de::Error::custom("non-finite component"));
        }
        Ok(v)
    }
}

/// A unit-length direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction3(Vec3);

impl Direction3 {
    pub const UP: Direction3 = Direction3(Vec3::Y);

    pub fn new(v: Vec3) -> Result<Self, GeometryError> {
        let n = v.norm();
        if !v.is_finite() || !n.is_finite() || n <= f64::MIN_POSITIVE {
            return Err(GeometryError::DegenerateDirection);
        }
        if (n - 1.0).abs() <= UNIT_TOLERANCE {
            Ok(Direction3(v))
        } else {
            Ok(Direction3(v / n))
        }
    }

    pub fn get(self) -> Vec3 {
        self.0
    }

    pub fn is_unit(self) -> bool {
        (self.0.norm() - 1.0).abs() <= UNIT_TOLERANCE
    }
}

impl Neg for Direction3 {
    type Output = Direction3;
    fn neg(self) -> Direction3 {
        Direction3(-self.0)
    }
}

impl Serialize for Direction3 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Direction3 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec3::deserialize(d)?;
        let dir = Direction3(v);
        if !dir.is_unit() {
            return Err(serde::de::Error::custom("direction is not unit length"));
        }
        Ok(dir)
    }
}

/// Unit quaternion, scalar first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quat {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quat {
    pub const IDENTITY: Quat = Quat { w: 1.0, x: 0.0, y: 0.0, z: 0.0 };

    /// Builds a quaternion, rejecting norms further than [`UNIT_TOLERANCE`] from 1. The
    /// components are kept as given so serialized poses round-trip exactly.
    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Result<Self, GeometryError> {
        let q = Quat { w, x, y, z };
        let n = q.norm();
        if !n.is_finite() || (n - 1.0).abs() > UNIT_TOLERANCE {
            return Err(GeometryError::NonUnitQuaternion(n));
        }
        Ok(q)
    }

    fn norm(self) -> f64 {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// Rescales to unit length. Fails only for zero or non-finite input.
    pub fn renormalized(self) -> Result<Quat, GeometryError> {
        let n = self.norm();
        if !n.is_finite() || n == 0.0 {
            return Err(GeometryError::NonUnitQuaternion(n));
        }
        Ok(self.normalize_raw())
    }

    fn normalize_raw(self) -> Quat {
        let n = self.norm();
        Quat { w: self.w / n, x: self.x / n, y: self.y / n, z: self.z / n }
    }

    pub fn from_axis_angle(axis: Direction3, angle: f64) -> Quat {
        let (s, c) = (angle * 0.5).sin_cos();
        let a = axis.get();
        Quat { w: c, x: a.x * s, y: a.y * s, z: a.z * s }
    }

    /// Rotation taking local -Z onto `forward`, keeping local +Y as close to world up as possible.
    pub fn look_rotation(forward: Direction3) -> Quat {
        let f = forward.get();
        let mut right = f.cross(Vec3::Y);
        if right.norm_squared() < 1e-12 {
            // Looking straight up or down: pick a stable right axis.
            right = Vec3::X;
        }
        let right = right / right.norm();
        let up = right.cross(f);
        // Columns of the rotation matrix: local X -> right, local Y -> up, local Z -> -forward.
        Quat::from_basis(right, up, -f)
    }

    fn from_basis(c0: Vec3, c1: Vec3, c2: Vec3) -> Quat {
        let (m00, m01, m02) = (c0.x, c1.x, c2.x);
        let (m10, m11, m12) = (c0.y, c1.y, c2.y);
        let (m20, m21, m22) = (c0.z, c1.z, c2.z);
        let trace = m00 + m11 + m22;
        let q = if trace > 0.0 {
            let s = (trace + 1.0).sqrt() * 2.0;
            Quat { w: 0.25 * s, x: (m21 - m12) / s, y: (m02 - m20) / s, z: (m10 - m01) / s }
        } else if m00 > m11 && m00 > m22 {
            let s = (1.0 + m00 - m11 - m22).sqrt() * 2.0;
            Quat { w: (m21 - m12) / s, x: 0.25 * s, y: (m01 + m10) / s, z: (m02 + m20) / s }
        } else if m11 > m22 {
            let s = (1.0 + m11 - m00 - m22).sqrt() * 2.0;
            Quat { w: (m02 - m20) / s, x: (m01 + m10) / s, y: 0.25 * s, z: (m12 + m21) / s }
        } else {
            let s = (1.0 + m22 - m00 - m11).sqrt() * 2.0;
            Quat { w: (m10 - m01) / s, x: (m02 + m20) / s, y: (m12 + m21) / s, z: 0.25 * s }
        };
        q.normalize_raw()
    }

    pub fn conjugate(self) -> Quat {
        Quat { w: self.w, x: -self.x, y: -self.y, z: -self.z }
    }

    pub fn rotate(self, v: Vec3) -> Vec3 {
        let u = Vec3::new(self.x, self.y, self.z);
        let t = u.cross(v) * 2.0;
        v + t * self.w + u.cross(t)
    }

    /// Spherical linear interpolation along the shorter arc.
    pub fn slerp(self, other: Quat, f: f64) -> Quat {
        let mut b = other;
        let mut cos = self.w * b.w + self.x * b.x + self.y * b.y + self.z * b.z;
        if cos < 0.0 {
            b = Quat { w: -b.w, x: -b.x, y: -b.y, z: -b.z };
            cos = -cos;
        }
        let (ka, kb) = if cos > 0.9995 {
            (1.0 - f, f)
        } else {
            let theta = cos.acos();
            let s = theta.sin();
            (((1.0 - f) * theta).sin() / s, (f * theta).sin() / s)
        };
        Quat {
            w: ka * self.w + kb * b.w,
            x: ka * self.x + kb * b.x,
            y: ka * self.y + kb * b.y,
            z: ka * self.z + kb * b.z,
        }
        .normalize_raw()
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }
}

impl Mul for Quat {
    type Output = Quat;
    fn mul(self, o: Quat) -> Quat {
        Quat {
            w: self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            x: self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            y: self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            z: self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        }
    }
}

impl Serialize for Quat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_array().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Quat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [w, x, y, z] = <[f64; 4]>::deserialize(d)?;
        Quat::new(w, x, y, z).map_err(serde::de::Error::custom)
    }
}

/// A 6-DoF head pose. The gaze ray starts at `position` and runs along local -Z.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose6DoF {
    pub position: Point3,
    pub orientation: Quat,
}

impl Pose6DoF {
    pub fn new(position: Point3, orientation: Quat) -> Self {
        Self { position, orientation }
    }

    pub fn looking_at(position: Point3, target: Point3) -> Result<Self, GeometryError> {
        let forward = (target - position).normalized()?;
        Ok(Self::new(position, Quat::look_rotation(forward)))
    }

    pub fn forward(&self) -> Direction3 {
        let f = self.orientation.rotate(-Vec3::Z);
        // Orientation is unit, so this only renormalizes rounding drift.
        Direction3::new(f).unwrap_or(Direction3(-Vec3::Z))
    }

    pub fn gaze_ray(&self) -> Ray {
        Ray::new(self.position, self.forward())
    }

    pub fn transform_point(&self, p: Point3) -> Point3 {
        self.orientation.rotate(p) + self.position
    }
}

impl Default for Pose6DoF {
    fn default() -> Self {
        Self::new(Vec3::ZERO, Quat::IDENTITY)
    }
}

/// A half-line from `origin` along `direction`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray {
    pub origin: Point3,
    pub direction: Direction3,
}

impl Ray {
    pub fn new(origin: Point3, direction: Direction3) -> Self {
        Self { origin, direction }
    }

    pub fn at(&self, t: f64) -> Point3 {
        self.origin + self.direction.get() * t
    }
}
