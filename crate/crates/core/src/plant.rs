//! Plant families under control: the relative-degree-one normal form with
//! linear internal dynamics, the stable linear sensor plant driven through an
//! input integrator, and the light-source field sensed by the cart.

use alloc::string::String;
use alloc::vec::Vec;

use crate::linalg;
use crate::math;

/// Normal form
///   eta' = A_ee eta + a_ez z
///   z'   = a_ze . eta + a_zz z + phi2 u
/// with eta unmeasured. The linear family covers the worked examples; the
/// functions phi0, phi1 of the general form are the two rows above.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalFormPlant {
    pub eta: Vec<f64>,
    pub z: f64,
    /// row-major (n-1) x (n-1)
    pub a_eta_eta: Vec<f64>,
    pub a_eta_z: Vec<f64>,
    pub a_z_eta: Vec<f64>,
    pub a_z_z: f64,
    pub phi2: f64,
    /// known lower bound on |phi2| (assumption: relative degree one)
    pub phi2_min: f64,
}

impl NormalFormPlant {
    /// The paper's example: x' = [[-1,1],[1,1]] x + [0,1]^T u with x = [eta, z].
    pub fn example1(z0: f64) -> Self {
        NormalFormPlant {
            eta: alloc::vec![0.0],
            z: z0,
            a_eta_eta: alloc::vec![-1.0],
            a_eta_z: alloc::vec![1.0],
            a_z_eta: alloc::vec![1.0],
            a_z_z: 1.0,
            phi2: 1.0,
            phi2_min: 1.0,
        }
    }

    /// Single integrator z' = u, the simplest member of the class.
    pub fn integrator(z0: f64) -> Self {
        NormalFormPlant {
            eta: Vec::new(),
            z: z0,
            a_eta_eta: Vec::new(),
            a_eta_z: Vec::new(),
            a_z_eta: Vec::new(),
            a_z_z: 0.0,
            phi2: 1.0,
            phi2_min: 1.0,
        }
    }

    pub fn eta_dim(&self) -> usize {
        self.eta.len()
    }

    pub fn validate(&self) -> Result<(), String> {
        let m = self.eta.len();
        if self.a_eta_eta.len() != m * m || self.a_eta_z.len() != m || self.a_z_eta.len() != m {
            return Err(String::from("normal-form matrix dimensions inconsistent"));
        }
        if !(self.phi2_min > 0.0) {
            return Err(String::from("phi2_min must be positive"));
        }
        if math::abs(self.phi2) < self.phi2_min {
            return Err(String::from("|phi2| below its declared lower bound"));
        }
        Ok(())
    }

    /// Euler-advances eta' = phi0, z' = phi1 + phi2 u. Returns true when the
    /// relative-degree bound |phi2| >= phi2_min held at this step.
    pub fn step(&mut self, u: f64, h: f64) -> bool {
        let m = self.eta.len();
        let mut d_eta = linalg::matvec(&self.a_eta_eta, &self.eta, m);
        for i in 0..m {
            d_eta[i] += self.a_eta_z[i] * self.z;
        }
        let mut d_z = self.a_z_z * self.z + self.phi2 * u;
        for i in 0..m {
            d_z += self.a_z_eta[i] * self.eta[i];
        }
        for i in 0..m {
            self.eta[i] += h * d_eta[i];
        }
        self.z += h * d_z;
        math::abs(self.phi2) >= self.phi2_min
    }

    pub fn eta_norm(&self) -> f64 {
        math::sqrt(self.eta.iter().map(|e| e * e).sum())
    }
}

/// Stable linear subsystem x' = A x + B v, z = C x, driven through the
/// chattering-alleviation integrator v' = u. A must be Hurwitz.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSensorPlant {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub x: Vec<f64>,
    pub v: f64,
    pub n: usize,
}

impl LinearSensorPlant {
    pub fn new(a: Vec<f64>, b: Vec<f64>, c: Vec<f64>, x0: Vec<f64>, v0: f64) -> Result<Self, String> {
        let n = b.len();
        if a.len() != n * n || c.len() != n || x0.len() != n || n == 0 {
            return Err(String::from("linear-sensor matrix dimensions inconsistent"));
        }
        if !linalg::is_hurwitz(&a, n) {
            return Err(String::from("A matrix is not Hurwitz"));
        }
        match linalg::c_ainv_b(&a, &b, &c, n) {
            Some(g) if math::abs(g) > 0.0 => {}
            _ => return Err(String::from("C A^-1 B must be nonzero")),
        }
        Ok(LinearSensorPlant { a, b, c, x: x0, v: v0, n })
    }

    /// DC motor of the servo cart: z' = -17.2 z + 3.9 v.
    pub fn dc_motor() -> Self {
        LinearSensorPlant::new(
            alloc::vec![-17.2],
            alloc::vec![3.9],
            alloc::vec![1.0],
            alloc::vec![0.0],
            0.0,
        )
        .unwrap()
    }

    pub fn output(&self) -> f64 {
        self.c.iter().zip(self.x.iter()).map(|(c, x)| c * x).sum()
    }

    /// -C A^{-1} B, the gain entering the singular HFG k_p(z) = -Phi'(z) C A^{-1} B.
    pub fn dc_gain(&self) -> f64 {
        -linalg::c_ainv_b(&self.a, &self.b, &self.c, self.n).unwrap_or(0.0)
    }

    /// Euler step of v' = u and x' = A x + B v from the current sample.
    pub fn step(&mut self, u: f64, h: f64) {
        let mut dx = linalg::matvec(&self.a, &self.x, self.n);
        for i in 0..self.n {
            dx[i] += self.b[i] * self.v;
        }
        self.v += h * u;
        for i in 0..self.n {
            self.x[i] += h * dx[i];
        }
    }
}

/// Light field over the track: ambient plus a Gaussian bump that follows the
/// source schedule, measured through a sensor that saturates at `cap`.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceField {
    pub amplitude: f64,
    pub width: f64,
    pub ambient: f64,
    pub cap: f64,
    /// initial source position on the track
    pub source_position: f64,
    /// source emits nothing before this time
    pub source_off_until: f64,
    /// linear motion from `source_position` to `move_to` over [move_start, move_end]
    pub move_start: f64,
    pub move_end: f64,
    pub move_to: f64,
}

impl SourceField {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.width > 0.0) {
            return Err(String::from("field width must be positive"));
        }
        if self.ambient < 0.0 {
            return Err(String::from("ambient offset must be nonnegative"));
        }
        if !(self.cap > 0.0) {
            return Err(String::from("sensor cap must be positive"));
        }
        if self.move_end < self.move_start {
            return Err(String::from("move_end must not precede move_start"));
        }
        Ok(())
    }

    /// Ground-truth source position at time t.
    pub fn source_at(&self, t: f64) -> f64 {
        if t <= self.move_start || self.move_end == self.move_start {
            self.source_position
        } else if t >= self.move_end {
            self.move_to
        } else {
            let f = (t - self.move_start) / (self.move_end - self.move_start);
            self.source_position + f * (self.move_to - self.source_position)
        }
    }

    /// Sensor reading at cart position p: ambient + field, capped.
    pub fn output(&self, p: f64, t: f64) -> f64 {
        let amp = if t < self.source_off_until { 0.0 } else { self.amplitude };
        let d = p - self.source_at(t);
        let y = self.ambient + amp * math::exp(-d * d / self.width);
        y.min(self.cap)
    }

    /// Peak sensor reading (with the source on).
    pub fn y_star(&self) -> f64 {
        (self.ambient + self.amplitude).min(self.cap)
    }

    /// Derivative of the measured (capped) field w.r.t. the source-relative
    /// offset d: zero on the saturation plateau, the Gaussian slope outside.
    pub fn effective_derivative(&self, d: f64) -> f64 {
        let raw = self.ambient + self.amplitude * math::exp(-d * d / self.width);
        if raw >= self.cap {
            0.0
        } else {
            -2.0 * self.amplitude * d / self.width * math::exp(-d * d / self.width)
        }
    }

    /// Diagnostics of the measured field in the source-relative coordinate.
    /// The sensor cap matters here: the Delta-vicinity extends at least to
    /// the edge of the saturation plateau, where all gradient is lost.
    pub fn diagnostics(&self, l_phi: f64) -> crate::map::MapDiagnostics {
        let span = 6.0 * math::sqrt(self.width);
        let n = 20_001usize;
        let step = 2.0 * span / (n - 1) as f64;
        let mut m_phi: f64 = 0.0;
        for i in 0..n {
            let d = -span + step * i as f64;
            m_phi = m_phi.max(math::abs(self.effective_derivative(d)));
        }
        let fine = 1e-5;
        let mut radius = fine;
        while radius < span {
            if math::abs(self.effective_derivative(radius)) >= l_phi
                || math::abs(self.effective_derivative(-radius)) >= l_phi
            {
                break;
            }
            radius += fine;
        }
        crate::map::MapDiagnostics {
            z_star: 0.0,
            y_star: self.y_star(),
            m_phi,
            l_phi,
            delta: 2.0 * radius,
        }
    }
}
