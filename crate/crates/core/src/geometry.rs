//! Boundary curves and the closest-point frame that relates a COM chord to
//! the curve.
//!
//! Frame conventions used throughout the crate:
//!
//! * `x_c` is the unit tangent at the closest point, pointing in the curve's
//!   direction of travel; `zeta` is its lab angle.
//! * The frame normal points from the closest point toward the runner. When
//!   the runner is on the left of the direction of travel the normal is the
//!   tangent rotated by +pi/2 and the frame is [`Chirality::Direct`];
//!   otherwise it is [`Chirality::Mirrored`].
//! * `kappa > 0` means the runner is on the convex side, so
//!   `lambda = rho + 1/kappa` is the distance from the runner to the center
//!   of curvature.
//! * `sin(theta) > 0` means the chord heads toward the curve, which is what
//!   makes the cosine-law distance recursion hold in both chiralities.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::Vector2;

use crate::error::{Error, Result};

pub type Point = Vector2<f64>;

/// Wrap an angle into `(-pi, pi]`.
pub fn normalize_angle(a: f64) -> f64 {
    let x = a.rem_euclid(2.0 * PI);
    if x > PI {
        x - 2.0 * PI
    } else {
        x
    }
}

pub fn unit(angle: f64) -> Point {
    Point::new(angle.cos(), angle.sin())
}

fn rotate_left(v: &Point) -> Point {
    Point::new(-v.y, v.x)
}

fn cross(a: &Point, b: &Point) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Direction of travel around a closed curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Ccw,
    Cw,
}

/// Which side of the direction of travel the runner is on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chirality {
    /// Runner on the left of the direction of travel.
    Direct,
    /// Runner on the right of the direction of travel.
    Mirrored,
}

impl Chirality {
    pub fn sign(self) -> f64 {
        match self {
            Chirality::Direct => 1.0,
            Chirality::Mirrored => -1.0,
        }
    }
}

/// `lambda = rho + 1/kappa`; straight boundaries have no center of curvature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CenterDistance {
    Finite(f64),
    Infinite,
}

impl CenterDistance {
    pub fn from_curvature(rho: f64, kappa: f64) -> Self {
        if kappa == 0.0 {
            CenterDistance::Infinite
        } else {
            CenterDistance::Finite(rho + 1.0 / kappa)
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            CenterDistance::Finite(l) => Some(l),
            CenterDistance::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, CenterDistance::Infinite)
    }
}

/// A smooth parameterized curve `t -> p(t)` used for general convex boundaries.
///
/// The parameter need not be arc length; the frame only uses the first two
/// derivatives. Travel follows increasing `t`.
pub trait ParametricCurve: Send + Sync + fmt::Debug {
    fn point(&self, t: f64) -> Point;
    fn velocity(&self, t: f64) -> Point;
    fn acceleration(&self, t: f64) -> Point;
    /// Parameter interval `[t0, t1]`.
    fn domain(&self) -> (f64, f64);
    /// Whether `p(t0) == p(t1)` and the parameter wraps around.
    fn is_closed(&self) -> bool;
}

/// Axis-aligned-then-rotated ellipse `c + R(rot) [a cos t, b sin t]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ellipse {
    pub center: Point,
    pub semi_x: f64,
    pub semi_y: f64,
    pub rotation: f64,
    pub direction: Direction,
}

impl Ellipse {
    fn orient(&self, t: f64) -> f64 {
        match self.direction {
            Direction::Ccw => t,
            Direction::Cw => -t,
        }
    }

    fn rotate(&self, v: Point) -> Point {
        let (s, c) = self.rotation.sin_cos();
        Point::new(c * v.x - s * v.y, s * v.x + c * v.y)
    }
}

impl ParametricCurve for Ellipse {
    fn point(&self, t: f64) -> Point {
        let u = self.orient(t);
        self.center + self.rotate(Point::new(self.semi_x * u.cos(), self.semi_y * u.sin()))
    }

    fn velocity(&self, t: f64) -> Point {
        let u = self.orient(t);
        let du = self.orient(1.0);
        self.rotate(Point::new(-self.semi_x * u.sin(), self.semi_y * u.cos()) * du)
    }

    fn acceleration(&self, t: f64) -> Point {
        let u = self.orient(t);
        self.rotate(Point::new(-self.semi_x * u.cos(), -self.semi_y * u.sin()))
    }

    fn domain(&self) -> (f64, f64) {
        (0.0, 2.0 * PI)
    }

    fn is_closed(&self) -> bool {
        true
    }
}

/// The desired boundary curve.
#[derive(Debug, Clone)]
pub enum CurveModel {
    Circle {
        center: Point,
        radius: f64,
        direction: Direction,
    },
    Line {
        point: Point,
        /// Unit direction of travel.
        direction: Point,
    },
    Parametric(Arc<dyn ParametricCurve>),
}

impl CurveModel {
    pub fn circle(center: Point, radius: f64, direction: Direction) -> Self {
        CurveModel::Circle {
            center,
            radius,
            direction,
        }
    }

    pub fn line(point: Point, direction: Point) -> Self {
        CurveModel::Line {
            point,
            direction: direction.normalize(),
        }
    }

    /// True when every point of the curve has the same curvature.
    pub fn has_constant_curvature(&self) -> bool {
        !matches!(self, CurveModel::Parametric(_))
    }
}

/// Tangent/normal frame at the boundary point nearest the COM.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosestFrame {
    pub r_c: Point,
    pub rho: f64,
    pub zeta: f64,
    pub kappa: f64,
    pub lambda: CenterDistance,
    pub chirality: Chirality,
}

impl ClosestFrame {
    /// Unit tangent `x_c`.
    pub fn tangent(&self) -> Point {
        unit(self.zeta)
    }

    /// Unit normal pointing from the curve toward the runner's side.
    pub fn normal(&self) -> Point {
        rotate_left(&self.tangent()) * self.chirality.sign()
    }

    /// Lab angle of a chord with steering angle `theta` in this frame.
    pub fn chord_heading(&self, theta: f64) -> f64 {
        normalize_angle(self.zeta - self.chirality.sign() * theta)
    }

    /// Steering angle of a chord with lab angle `delta` in this frame.
    pub fn theta_of_heading(&self, delta: f64) -> f64 {
        self.chirality.sign() * normalize_angle(self.zeta - delta)
    }
}

fn frame_from_parts(
    r_c: Point,
    rho: f64,
    tangent: Point,
    runner_normal: Point,
    signed_curvature: f64,
) -> ClosestFrame {
    let chirality = if runner_normal.dot(&rotate_left(&tangent)) >= 0.0 {
        Chirality::Direct
    } else {
        Chirality::Mirrored
    };
    // Center of curvature sits on the left of travel when signed curvature > 0;
    // it is on the far side from the runner exactly when the runner is on the right.
    let kappa = if signed_curvature == 0.0 {
        0.0
    } else {
        -signed_curvature * chirality.sign()
    };
    ClosestFrame {
        r_c,
        rho,
        zeta: normalize_angle(tangent.y.atan2(tangent.x)),
        kappa,
        lambda: CenterDistance::from_curvature(rho, kappa),
        chirality,
    }
}

/// Closest point on `curve` to `r` together with its tangent frame.
pub fn closest_frame(curve: &CurveModel, r: &Point) -> Result<ClosestFrame> {
    match curve {
        CurveModel::Circle {
            center,
            radius,
            direction,
        } => {
            let offset = r - center;
            let d = offset.norm();
            if d <= f64::EPSILON * radius.max(1.0) {
                return Err(Error::DegenerateQuery);
            }
            let u = offset / d;
            let r_c = center + u * *radius;
            let tangent = match direction {
                Direction::Ccw => rotate_left(&u),
                Direction::Cw => -rotate_left(&u),
            };
            let signed_curvature = match direction {
                Direction::Ccw => 1.0 / radius,
                Direction::Cw => -1.0 / radius,
            };
            // On the curve itself the convex side is used.
            let runner_normal = if d >= *radius { u } else { -u };
            Ok(frame_from_parts(
                r_c,
                (d - radius).abs(),
                tangent,
                runner_normal,
                signed_curvature,
            ))
        }
        CurveModel::Line { point, direction } => {
            let along = (r - point).dot(direction);
            let r_c = point + direction * along;
            let offset = r - r_c;
            let rho = offset.norm();
            let runner_normal = if rho > 0.0 {
                offset / rho
            } else {
                rotate_left(direction)
            };
            Ok(frame_from_parts(r_c, rho, *direction, runner_normal, 0.0))
        }
        CurveModel::Parametric(curve) => parametric_frame(curve.as_ref(), r),
    }
}

const PARAMETRIC_SAMPLES: usize = 720;

fn parametric_frame(curve: &dyn ParametricCurve, r: &Point) -> Result<ClosestFrame> {
    let (t0, t1) = curve.domain();
    let n = PARAMETRIC_SAMPLES;
    let dt = (t1 - t0) / n as f64;
    let dist2 = |t: f64| (curve.point(t) - r).norm_squared();

    let mut best = 0;
    let mut best_d = f64::INFINITY;
    let last = if curve.is_closed() { n - 1 } else { n };
    for j in 0..=last {
        let d = dist2(t0 + j as f64 * dt);
        if d < best_d {
            best_d = d;
            best = j;
        }
    }

    // Stationarity of the squared distance: g(t) = (p(t) - r) . p'(t).
    let g = |t: f64| (curve.point(t) - r).dot(&curve.velocity(t));
    let tb = t0 + best as f64 * dt;
    let (mut lo, mut hi) = if curve.is_closed() {
        (tb - dt, tb + dt)
    } else {
        ((tb - dt).max(t0), (tb + dt).min(t1))
    };
    let mut t_star = tb;
    let (g_lo, g_hi) = (g(lo), g(hi));
    if g_lo < 0.0 && g_hi > 0.0 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if g(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        t_star = 0.5 * (lo + hi);
    } else if !curve.is_closed() {
        // Minimum sits at an open end of the domain.
        t_star = if dist2(lo) < dist2(hi) { lo } else { hi };
    }

    let p = curve.point(t_star);
    let v = curve.velocity(t_star);
    let a = curve.acceleration(t_star);
    let speed = v.norm();
    let tangent = v / speed;
    let signed_curvature = cross(&v, &a) / speed.powi(3);
    let offset = r - p;
    let rho = offset.norm();
    let runner_normal = if rho > 0.0 {
        // Remove the residual tangential component left by the root finder.
        let n = offset - tangent * offset.dot(&tangent);
        if n.norm() > 0.0 {
            n.normalize()
        } else {
            offset / rho
        }
    } else if signed_curvature >= 0.0 {
        -rotate_left(&tangent)
    } else {
        rotate_left(&tangent)
    };
    Ok(frame_from_parts(
        p,
        rho,
        tangent,
        runner_normal,
        signed_curvature,
    ))
}

/// Steering angle between a unit chord direction and the frame tangent,
/// `theta = atan2(-q . y_c, q . x_c)` with `y_c` the frame normal.
pub fn bearing_theta(q_dir: &Point, frame: &ClosestFrame) -> f64 {
    let x_c = frame.tangent();
    let y_c = frame.normal();
    normalize_angle((-q_dir.dot(&y_c)).atan2(q_dir.dot(&x_c)))
}

/// Signed curvature of the circle through three points (positive when the
/// points turn counter-clockwise); zero for collinear points.
pub fn estimate_curvature(p1: &Point, p2: &Point, p3: &Point) -> Result<f64> {
    let a = (p2 - p1).norm();
    let b = (p3 - p2).norm();
    let c = (p3 - p1).norm();
    if a == 0.0 || b == 0.0 || c == 0.0 {
        return Err(Error::DegeneratePoints);
    }
    let area2 = cross(&(p2 - p1), &(p3 - p1));
    Ok(2.0 * area2 / (a * b * c))
}

/// Rotation `gamma` of the closest point over one stance, from the sine law
/// `sin(gamma) = q cos(theta) / (lambda + f)`.
pub fn advance_zeta(frame: &ClosestFrame, q: f64, theta: f64, f: f64) -> Result<f64> {
    let lambda = match frame.lambda {
        CenterDistance::Infinite => return Ok(0.0),
        CenterDistance::Finite(l) => l,
    };
    let arg = q * theta.cos() / (lambda + f);
    if !arg.is_finite() || arg.abs() > 1.0 + 1e-12 {
        return Err(Error::InfeasibleGeometry(arg));
    }
    Ok(arg.clamp(-1.0, 1.0).asin())
}
