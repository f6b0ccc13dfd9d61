//! The unknown static map y = Phi(z) to be maximized, plus the numerical
//! diagnostics the tests and metrics rely on: the maximizer z*, the peak
//! value y*, the grid supremum of |Phi'|, and the Delta-vicinity implied by
//! a gradient lower bound L_Phi.
//!
//! The controller never reads any of the diagnostics; they exist so that a
//! run can be judged against the ground truth it is supposed to find.

use alloc::string::String;
use alloc::vec::Vec;

use crate::math;

/// One Gaussian bump a * exp(-(z-c)^2 / w).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussComponent {
    pub amplitude: f64,
    pub center: f64,
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CostMap {
    /// Sum of Gaussian bumps, the paper's example family.
    GaussianMixture(Vec<GaussComponent>),
    /// offset - curvature * (z - center)^2; satisfies the global gradient
    /// lower bound, unlike compactly-peaked mixtures.
    Quadratic {
        offset: f64,
        curvature: f64,
        center: f64,
    },
    /// Tabulated samples joined by a monotone cubic (Fritsch-Carlson)
    /// interpolant; the derivative comes from the interpolant, so the
    /// smoothness assumed of Phi is only approximate here.
    Table { z: Vec<f64>, y: Vec<f64> },
}

/// Numerically computed ground-truth facts about a map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapDiagnostics {
    pub z_star: f64,
    pub y_star: f64,
    /// Grid supremum of |Phi'| over the diagnostic window.
    pub m_phi: f64,
    /// Gradient lower bound the Delta-vicinity was computed for.
    pub l_phi: f64,
    /// Full width of D_Delta = { z : |z - z*| < delta/2 }.
    pub delta: f64,
}

impl CostMap {
    pub fn example1() -> Self {
        CostMap::GaussianMixture(alloc::vec![
            GaussComponent {
                amplitude: 1.0,
                center: 3.0,
                width: 0.5,
            },
            GaussComponent {
                amplitude: 1.5,
                center: 5.0,
                width: 1.5,
            },
        ])
    }

    pub fn eval(&self, z: f64) -> f64 {
        match self {
            CostMap::GaussianMixture(comps) => comps
                .iter()
                .map(|c| c.amplitude * math::exp(-(z - c.center) * (z - c.center) / c.width))
                .sum(),
            CostMap::Quadratic {
                offset,
                curvature,
                center,
            } => offset - curvature * (z - center) * (z - center),
            CostMap::Table { z: zs, y: ys } => table::eval(zs, ys, z),
        }
    }

    /// Analytic derivative Phi'(z) (from the interpolant for tables).
    /// Diagnostics and bound construction only; the controller never calls it.
    pub fn derivative(&self, z: f64) -> f64 {
        match self {
            CostMap::GaussianMixture(comps) => comps
                .iter()
                .map(|c| {
                    let d = z - c.center;
                    -2.0 * c.amplitude * d / c.width * math::exp(-d * d / c.width)
                })
                .sum(),
            CostMap::Quadratic {
                curvature, center, ..
            } => -2.0 * curvature * (z - center),
            CostMap::Table { z: zs, y: ys } => table::derivative(zs, ys, z),
        }
    }

    /// Validity check: finite, nonempty, positive widths, table monotone in z.
    pub fn validate(&self) -> Result<(), String> {
        match self {
            CostMap::GaussianMixture(comps) => {
                if comps.is_empty() {
                    return Err(String::from("gaussian mixture needs at least one component"));
                }
                for c in comps {
                    if !(c.width > 0.0) {
                        return Err(String::from("component widths must be positive"));
                    }
                    if !c.amplitude.is_finite() || !c.center.is_finite() {
                        return Err(String::from("component parameters must be finite"));
                    }
                }
                Ok(())
            }
            CostMap::Quadratic { curvature, .. } => {
                if *curvature > 0.0 {
                    Ok(())
                } else {
                    Err(String::from("quadratic curvature must be positive"))
                }
            }
            CostMap::Table { z, y } => {
                if z.len() < 2 || z.len() != y.len() {
                    return Err(String::from("table needs matching z/y lists, length >= 2"));
                }
                if z.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(String::from("table z values must be strictly increasing"));
                }
                Ok(())
            }
        }
    }

    /// Window the diagnostics grid covers.
    fn window(&self) -> (f64, f64) {
        match self {
            CostMap::GaussianMixture(comps) => {
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for c in comps {
                    let span = 6.0 * math::sqrt(c.width);
                    lo = lo.min(c.center - span);
                    hi = hi.max(c.center + span);
                }
                (lo, hi)
            }
            CostMap::Quadratic { center, .. } => (center - 10.0, center + 10.0),
            CostMap::Table { z, .. } => (z[0], *z.last().unwrap()),
        }
    }

    /// Computes z*, y*, the grid sup of |Phi'|, and the Delta-vicinity for
    /// `l_phi`: the largest interval around z* on which |Phi'| < l_phi.
    ///
    /// The multi-extremum maps this library exists for violate the global
    /// gradient bound away from z* (at local maxima and in the tails), so
    /// the Delta construction is local by nature.
    pub fn diagnostics(&self, l_phi: f64) -> MapDiagnostics {
        let (lo, hi) = self.window();
        let n = 20_001usize;
        let step = (hi - lo) / (n - 1) as f64;

        let mut z_best = lo;
        let mut y_best = f64::NEG_INFINITY;
        let mut m_phi: f64 = 0.0;
        for i in 0..n {
            let z = lo + step * i as f64;
            let y = self.eval(z);
            if y > y_best {
                y_best = y;
                z_best = z;
            }
            let d = math::abs(self.derivative(z));
            if d > m_phi {
                m_phi = d;
            }
        }

        // golden-section refinement of the maximizer, then bisection on the
        // derivative's sign change (the value-based search stalls at the
        // sqrt of machine precision on a flat peak)
        let mut a = z_best - step;
        let mut b = z_best + step;
        for _ in 0..80 {
            let m1 = a + 0.381_966_011_250_105 * (b - a);
            let m2 = b - 0.381_966_011_250_105 * (b - a);
            if self.eval(m1) < self.eval(m2) {
                a = m1;
            } else {
                b = m2;
            }
        }
        let mut z_star = 0.5 * (a + b);
        let (mut da, mut db) = (z_star - step, z_star + step);
        if self.derivative(da) > 0.0 && self.derivative(db) < 0.0 {
            for _ in 0..200 {
                let mid = 0.5 * (da + db);
                if self.derivative(mid) > 0.0 {
                    da = mid;
                } else {
                    db = mid;
                }
            }
            z_star = 0.5 * (da + db);
        }
        let y_star = self.eval(z_star);

        // one-sided radii: first offset at which |Phi'| reaches l_phi on
        // each flank; D_Delta takes the larger so the bound holds on both
        // sides of the (generally asymmetric) peak
        let fine = step.min(1e-4).max(1e-6);
        let max_r = hi - lo;
        let side = |dir: f64| {
            let mut r = fine;
            while r < max_r {
                if math::abs(self.derivative(z_star + dir * r)) >= l_phi {
                    break;
                }
                r += fine;
            }
            r
        };
        let radius = side(1.0).max(side(-1.0));

        MapDiagnostics {
            z_star,
            y_star,
            m_phi,
            l_phi,
            delta: 2.0 * radius,
        }
    }
}

mod table {
    //! Monotone cubic (Fritsch-Carlson) interpolation over tabulated data.

    use super::math;
    use alloc::vec;
    use alloc::vec::Vec;

    fn slopes(zs: &[f64], ys: &[f64]) -> Vec<f64> {
        let n = zs.len();
        let mut delta = vec![0.0; n - 1];
        for i in 0..n - 1 {
            delta[i] = (ys[i + 1] - ys[i]) / (zs[i + 1] - zs[i]);
        }
        let mut m = vec![0.0; n];
        m[0] = delta[0];
        m[n - 1] = delta[n - 2];
        for i in 1..n - 1 {
            if delta[i - 1] * delta[i] <= 0.0 {
                m[i] = 0.0;
            } else {
                m[i] = 0.5 * (delta[i - 1] + delta[i]);
            }
        }
        // Fritsch-Carlson clamp keeps the interpolant monotone per interval
        for i in 0..n - 1 {
            if delta[i] == 0.0 {
                m[i] = 0.0;
                m[i + 1] = 0.0;
            } else {
                let alpha = m[i] / delta[i];
                let beta = m[i + 1] / delta[i];
                let s = alpha * alpha + beta * beta;
                if s > 9.0 {
                    let tau = 3.0 / math::sqrt(s);
                    m[i] = tau * alpha * delta[i];
                    m[i + 1] = tau * beta * delta[i];
                }
            }
        }
        m
    }

    fn locate(zs: &[f64], z: f64) -> usize {
        if z <= zs[0] {
            return 0;
        }
        if z >= zs[zs.len() - 2] {
            return zs.len() - 2;
        }
        let mut lo = 0;
        let mut hi = zs.len() - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if zs[mid] <= z {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    pub fn eval(zs: &[f64], ys: &[f64], z: f64) -> f64 {
        let m = slopes(zs, ys);
        let i = locate(zs, z);
        let h = zs[i + 1] - zs[i];
        let t = ((z - zs[i]) / h).clamp(0.0, 1.0);
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * ys[i] + h10 * h * m[i] + h01 * ys[i + 1] + h11 * h * m[i + 1]
    }

    pub fn derivative(zs: &[f64], ys: &[f64], z: f64) -> f64 {
        let m = slopes(zs, ys);
        let i = locate(zs, z);
        let h = zs[i + 1] - zs[i];
        let t = ((z - zs[i]) / h).clamp(0.0, 1.0);
        let t2 = t * t;
        let dh00 = (6.0 * t2 - 6.0 * t) / h;
        let dh10 = (3.0 * t2 - 4.0 * t + 1.0) / h;
        let dh01 = (-6.0 * t2 + 6.0 * t) / h;
        let dh11 = (3.0 * t2 - 2.0 * t) / h;
        dh00 * ys[i] + dh10 * h * m[i] + dh01 * ys[i + 1] + dh11 * h * m[i + 1]
    }
}
