//! Polynomial-in-time evolution of symmetrized moment vectors and their
//! time-translation invariants.
//!
//! A moment vector of order `n` holds `y_0..y_n`, where `y_k` is the
//! symmetrized expectation of `k` momentum deviations and `n - k` position
//! deviations about the centroid. Under free evolution every component is a
//! polynomial in `t / m`, and the combinations `Z_l` built around the
//! reference time `t0 = -m y_{n-1} / y_n` stay constant.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

/// Largest order for which exact binomial coefficients are tabulated.
pub const MAX_ORDER: usize = 64;

/// Exact binomial coefficient `C(n, k)` for `n <= MAX_ORDER`.
pub fn binomial(n: usize, k: usize) -> u64 {
    debug_assert!(n <= MAX_ORDER);
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    // Multiplicative form stays exact: each partial product is C(n-k+i, i).
    let mut acc: u128 = 1;
    for i in 1..=k as u128 {
        acc = acc * (n as u128 - k as u128 + i) / i;
    }
    acc as u64
}

fn binom_f(n: usize, k: usize) -> f64 {
    binomial(n, k) as f64
}

fn check_order(order: usize) -> Result<()> {
    if order == 0 {
        return Err(Error::InvalidInput("moment order must be at least 1".into()));
    }
    if order > MAX_ORDER {
        return Err(Error::OrderTooLarge {
            order,
            max: MAX_ORDER,
        });
    }
    Ok(())
}

fn check_positive(label: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{label} must be positive and finite, got {v}")))
    }
}

/// Symmetrized moments `y_0..y_n` of a single order, with the mass and
/// Planck constant of the system they were measured in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMomentVector")]
pub struct MomentVector {
    order: usize,
    values: Vec<f64>,
    mass: f64,
    hbar: f64,
}

#[derive(Deserialize)]
struct RawMomentVector {
    order: usize,
    values: Vec<f64>,
    mass: f64,
    hbar: f64,
}

impl TryFrom<RawMomentVector> for MomentVector {
    type Error = Error;

    fn try_from(raw: RawMomentVector) -> Result<Self> {
        if raw.values.len() != raw.order + 1 {
            return Err(Error::InvalidInput(format!(
                "order {} needs {} values, got {}",
                raw.order,
                raw.order + 1,
                raw.values.len()
            )));
        }
        MomentVector::new(raw.values, raw.mass, raw.hbar)
    }
}

impl MomentVector {
    /// Builds a moment vector of order `values.len() - 1`.
    pub fn new(values: Vec<f64>, mass: f64, hbar: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("empty moment vector".into()));
        }
        let order = values.len() - 1;
        check_order(order)?;
        check_positive("mass", mass)?;
        check_positive("hbar", hbar)?;
        for (k, v) in values.iter().enumerate() {
            ensure_finite(&format!("y_{k}"), *v)?;
        }
        Ok(Self {
            order,
            values,
            mass,
            hbar,
        })
    }

    /// Moment vector in units with `m = hbar = 1`.
    pub fn unit(values: Vec<f64>) -> Result<Self> {
        Self::new(values, 1.0, 1.0)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// The invariant top moment `y_n`.
    pub fn top(&self) -> f64 {
        self.values[self.order]
    }

    pub fn get(&self, k: usize) -> f64 {
        self.values[k]
    }

    /// For even orders a physical quantum state has `y_0 > 0` and `y_n > 0`.
    pub fn check_even_positivity(&self) -> Result<()> {
        if self.order.is_multiple_of(2) {
            if self.values[0] <= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "even-order y_0 must be positive, got {}",
                    self.values[0]
                )));
            }
            if self.top() <= 0.0 {
                return Err(Error::InvalidEvenTopMoment(self.top()));
            }
        }
        Ok(())
    }

    /// Free evolution over time `t`:
    /// `Y_k = sum_l C(n-k, l) (t/m)^l y_{k+l}`.
    pub fn propagate(&self, t: f64) -> Result<MomentVector> {
        ensure_finite("t", t)?;
        let n = self.order;
        let tau = t / self.mass;
        let values = (0..=n)
            .map(|k| {
                // Horner in tau; the k = n row is a plain copy of y_n.
                let mut acc = self.values[n];
                for l in (0..n - k).rev() {
                    acc = acc * tau + binom_f(n - k, l) * self.values[k + l];
                }
                acc
            })
            .collect::<Vec<_>>();
        for v in &values {
            ensure_finite("propagated moment", *v)?;
        }
        Ok(MomentVector {
            order: n,
            values,
            mass: self.mass,
            hbar: self.hbar,
        })
    }

    /// Time derivatives `d_t Y_k = (n - k) Y_{k+1} / m`, with `d_t Y_n = 0`.
    pub fn derivative(&self) -> Vec<f64> {
        let n = self.order;
        (0..=n)
            .map(|k| {
                if k == n {
                    0.0
                } else {
                    (n - k) as f64 * self.values[k + 1] / self.mass
                }
            })
            .collect()
    }

    /// `t0 = -m y_{n-1} / y_n`, the time at which `Y_{n-1}` vanishes.
    pub fn reference_time(&self) -> Result<f64> {
        let yn = self.top();
        if yn == 0.0 {
            return Err(Error::DegenerateTopMoment { order: self.order });
        }
        let t0 = -self.mass * self.values[self.order - 1] / yn;
        // avoid reporting -0.0
        Ok(if t0 == 0.0 { 0.0 } else { t0 })
    }

    /// Invariant combinations `Z_0..Z_n` (`Z_2 = Omega`, `Z_3 = Lambda`,
    /// `Z_4 = Theta`).
    pub fn invariants(&self) -> Result<InvariantSet> {
        let t0 = self.reference_time()?;
        let n = self.order;
        let y = &self.values;
        let yn = y[n];
        let neg = -y[n - 1];
        let mut z = vec![0.0; n + 1];
        z[0] = 1.0;
        if n >= 1 {
            z[1] = 0.0;
        }
        for (l, zl) in z.iter_mut().enumerate().skip(2) {
            let mut acc = 0.0;
            for j in 0..=l - 2 {
                acc += binom_f(l, j) * y[n - l + j] * neg.powi(j as i32) * yn.powi((l - j - 1) as i32);
            }
            acc -= (l - 1) as f64 * neg.powi(l as i32);
            *zl = acc;
        }
        for v in &z {
            ensure_finite("invariant", *v)?;
        }
        Ok(InvariantSet { order: n, z, t0, yn })
    }

    /// Sum of the absolute values of the terms making up each `Z_l`: the
    /// size against which rounding in `Z_l` should be judged.
    pub fn invariant_scales(&self) -> Vec<f64> {
        let n = self.order;
        let y = &self.values;
        let yn = y[n].abs();
        let neg = y[n - 1].abs();
        (0..=n)
            .map(|l| match l {
                0 => 1.0,
                1 => 0.0,
                _ => {
                    let mut acc = (l - 1) as f64 * neg.powi(l as i32);
                    for j in 0..=l - 2 {
                        acc += binom_f(l, j) * y[n - l + j].abs() * neg.powi(j as i32) * yn.powi((l - j - 1) as i32);
                    }
                    acc
                }
            })
            .collect()
    }

    /// Position and value of the waist of a second-order vector:
    /// `(t0, Omega_2 / y_2)`.
    pub fn second_order_waist(&self) -> Result<(f64, f64)> {
        if self.order != 2 {
            return Err(Error::InvalidInput(format!(
                "waist needs order 2 moments, got order {}",
                self.order
            )));
        }
        let [y0, y1, y2] = [self.values[0], self.values[1], self.values[2]];
        if y2 <= 0.0 {
            return Err(Error::InvalidSecondMoment(y2));
        }
        let t_min = -self.mass * y1 / y2;
        let omega = y0 * y2 - y1 * y1;
        Ok((if t_min == 0.0 { 0.0 } else { t_min }, omega / y2))
    }
}

/// The invariants `Z_0..Z_n` of one order together with the reference time
/// and the top moment needed to rebuild the moments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInvariantSet")]
pub struct InvariantSet {
    order: usize,
    z: Vec<f64>,
    t0: f64,
    yn: f64,
}

#[derive(Deserialize)]
struct RawInvariantSet {
    order: usize,
    z: Vec<f64>,
    t0: f64,
    yn: f64,
}

impl TryFrom<RawInvariantSet> for InvariantSet {
    type Error = Error;

    fn try_from(raw: RawInvariantSet) -> Result<Self> {
        InvariantSet::new(raw.order, raw.z, raw.t0, raw.yn)
    }
}

impl InvariantSet {
    pub fn new(order: usize, z: Vec<f64>, t0: f64, yn: f64) -> Result<Self> {
        check_order(order)?;
        if z.len() != order + 1 {
            return Err(Error::InvalidInput(format!(
                "order {order} needs {} invariants, got {}",
                order + 1,
                z.len()
            )));
        }
        if z[0] != 1.0 || (order >= 1 && z[1] != 0.0) {
            return Err(Error::InvalidInput("Z_0 must be 1 and Z_1 must be 0".into()));
        }
        for v in &z {
            ensure_finite("invariant", *v)?;
        }
        ensure_finite("t0", t0)?;
        ensure_finite("y_n", yn)?;
        if yn == 0.0 {
            return Err(Error::DegenerateTopMoment { order });
        }
        Ok(Self { order, z, t0, yn })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn yn(&self) -> f64 {
        self.yn
    }

    /// `Z_2`, written Omega_n for order n.
    pub fn omega(&self) -> Option<f64> {
        self.z.get(2).copied()
    }

    /// `Z_3`, written Lambda_n.
    pub fn lambda(&self) -> Option<f64> {
        self.z.get(3).copied()
    }

    /// `Z_4`, written Theta_n.
    pub fn theta(&self) -> Option<f64> {
        self.z.get(4).copied()
    }

    /// Moments at scaled time `u = (t - t0) / m`:
    /// `Y_k = sum_j C(n-k, j) Z_{n-k-j} u^j / y_n^{n-k-j-1}`.
    pub fn moments_at(&self, u: f64) -> Vec<f64> {
        let n = self.order;
        (0..=n)
            .map(|k| {
                let r = n - k;
                (0..=r)
                    .map(|j| {
                        let exp = r as i32 - j as i32 - 1;
                        binom_f(r, j) * self.z[r - j] * u.powi(j as i32) / self.yn.powi(exp)
                    })
                    .sum()
            })
            .collect()
    }
}

/// Rebuilds the moment vector at `u = (t - t0)/m` from its invariants.
pub fn moments_from_invariants(zset: &InvariantSet, u: f64, mass: f64, hbar: f64) -> Result<MomentVector> {
    ensure_finite("u", u)?;
    MomentVector::new(zset.moments_at(u), mass, hbar)
}

/// Centroid of a free particle: position, constant momentum and mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CentroidState {
    pub x0: f64,
    pub p: f64,
    pub mass: f64,
}

impl CentroidState {
    pub fn new(x0: f64, p: f64, mass: f64) -> Result<Self> {
        ensure_finite("x0", x0)?;
        ensure_finite("p", p)?;
        check_positive("mass", mass)?;
        Ok(Self { x0, p, mass })
    }

    pub fn evolve(&self, t: f64) -> CentroidState {
        CentroidState {
            x0: self.x0 + self.p * t / self.mass,
            ..*self
        }
    }

    /// Classical kinetic energy of the centroid, `p^2 / 2m`.
    pub fn kinetic_energy(&self) -> f64 {
        self.p * self.p / (2.0 * self.mass)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mv(v: &[f64]) -> MomentVector {
        MomentVector::unit(v.to_vec()).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn binomials_exact() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(64, 32), 1_832_624_140_942_590_534);
        assert_eq!(binomial(10, 11), 0);
        assert_eq!(binomial(0, 0), 1);
    }

    #[test]
    fn order_limit() {
        assert!(matches!(
            MomentVector::unit(vec![1.0; 66]),
            Err(Error::OrderTooLarge { order: 65, .. })
        ));
        assert!(MomentVector::unit(vec![1.0; 65]).is_ok());
        assert!(MomentVector::unit(vec![1.0]).is_err());
    }

    #[test]
    fn propagate_examples() {
        assert_eq!(mv(&[0.0, 0.0, 0.0, 1.0]).propagate(1.0).unwrap().values(), &[1.0, 1.0, 1.0, 1.0]);
        assert_eq!(mv(&[1.0, 0.0, 1.0]).propagate(1.0).unwrap().values(), &[2.0, 1.0, 1.0]);
        let y = mv(&[0.3, -1.2, 2.5, 0.7]);
        assert_eq!(y.propagate(0.0).unwrap(), y);
    }

    #[test]
    fn propagate_rejects_non_finite_time() {
        assert!(mv(&[1.0, 0.0, 1.0]).propagate(f64::NAN).is_err());
        assert!(mv(&[1.0, 0.0, 1.0]).propagate(f64::INFINITY).is_err());
        assert!(MomentVector::unit(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(mv(&[1.0, 0.0, 1.0]).derivative(), vec![0.0, 1.0, 0.0]);
        assert_eq!(mv(&[0.0, 0.0, 0.0, 0.0, 1.0]).derivative(), vec![0.0, 0.0, 0.0, 1.0, 0.0]);
        assert_eq!(mv(&[1.0, 1.0, 1.0, 1.0]).derivative(), vec![3.0, 2.0, 1.0, 0.0]);
    }

    #[test]
    fn reference_time_examples() {
        assert_eq!(mv(&[0.0, -0.1006, 0.0, 0.02666]).reference_time().unwrap(), 0.0);
        assert_eq!(mv(&[1.0, 1.0, 1.0]).reference_time().unwrap(), -1.0);
        assert_eq!(mv(&[0.2, 0.0, 0.3, 0.0, 2.0]).reference_time().unwrap(), 0.0);
        assert!(matches!(
            mv(&[1.0, 1.0, 1.0, 0.0]).reference_time(),
            Err(Error::DegenerateTopMoment { order: 3 })
        ));
    }

    #[test]
    fn invariants_examples() {
        let z = mv(&[1.0, 0.0, 1.0]).invariants().unwrap();
        assert_eq!(z.z(), &[1.0, 0.0, 1.0]);

        let z = mv(&[0.0, -0.1006, 0.0, 0.02666]).invariants().unwrap();
        assert!(close(z.omega().unwrap(), -0.1006 * 0.02666, 1e-12));
        assert_eq!(z.lambda().unwrap(), 0.0);

        let z = mv(&[3.0 / 16.0, 0.0, 0.25, 0.0, 3.0]).invariants().unwrap();
        assert_eq!(z.omega().unwrap(), 0.75);
        assert_eq!(z.lambda().unwrap(), 0.0);
        assert_eq!(z.theta().unwrap(), 81.0 / 16.0);
    }

    #[test]
    fn invariants_match_named_forms() {
        // Omega_4, Lambda_4, Theta_4 written out explicitly.
        let y = [0.7, -0.4, 1.3, 0.25, 2.1];
        let z = mv(&y).invariants().unwrap();
        let om = y[2] * y[4] - y[3] * y[3];
        let la = y[1] * y[4] * y[4] + 2.0 * y[3].powi(3) - 3.0 * y[2] * y[3] * y[4];
        let th = y[0] * y[4].powi(3) - 3.0 * y[3].powi(4) + 6.0 * y[2] * y[3] * y[3] * y[4]
            - 4.0 * y[1] * y[3] * y[4] * y[4];
        assert!(close(z.omega().unwrap(), om, 1e-14));
        assert!(close(z.lambda().unwrap(), la, 1e-14));
        assert!(close(z.theta().unwrap(), th, 1e-14));

        // Lambda_3 = Y0 Y3^2 - 3 Y1 Y2 Y3 + 2 Y2^3
        let y = [0.2, 0.9, -0.6, 1.7];
        let z = mv(&y).invariants().unwrap();
        let la = y[0] * y[3] * y[3] - 3.0 * y[1] * y[2] * y[3] + 2.0 * y[2].powi(3);
        assert!(close(z.lambda().unwrap(), la, 1e-14));
    }

    #[test]
    fn degenerate_top_moment() {
        assert!(matches!(
            mv(&[1.0, 2.0, 0.0]).invariants(),
            Err(Error::DegenerateTopMoment { .. })
        ));
    }

    #[test]
    fn moments_from_invariants_examples() {
        let (om, la, y3) = (-0.3, 0.8, 1.5);
        let z = InvariantSet::new(3, vec![1.0, 0.0, om, la], 0.0, y3).unwrap();
        let m = z.moments_at(0.0);
        assert!(close(m[0], la / (y3 * y3), 1e-15));
        assert_eq!(m[3], y3);

        let (om, la, th, y4) = (-0.2, 0.35, 1.9, 2.0);
        let z = InvariantSet::new(4, vec![1.0, 0.0, om, la, th], 0.0, y4).unwrap();
        let m = z.moments_at(0.0);
        let expect = [th / y4.powi(3), la / (y4 * y4), om / y4, 0.0, y4];
        for (a, b) in m.iter().zip(expect) {
            assert!(close(*a, b, 1e-15), "{a} vs {b}");
        }
        // Y_0 at generic u follows the quartic in the invariants.
        let u: f64 = 0.7;
        let m = z.moments_at(u);
        let y0 = y4 * u.powi(4) + 6.0 * (om / y4) * u * u + 4.0 * (la / (y4 * y4)) * u + th / y4.powi(3);
        assert!(close(m[0], y0, 1e-14));
    }

    #[test]
    fn invariant_set_validation() {
        assert!(InvariantSet::new(2, vec![1.0, 0.1, 1.0], 0.0, 1.0).is_err());
        assert!(InvariantSet::new(2, vec![1.0, 0.0], 0.0, 1.0).is_err());
        assert!(InvariantSet::new(2, vec![1.0, 0.0, 1.0], 0.0, 0.0).is_err());
    }

    #[test]
    fn waist_examples() {
        assert_eq!(mv(&[1.0, 0.0, 1.0]).second_order_waist().unwrap(), (0.0, 1.0));
        assert_eq!(mv(&[2.0, 1.0, 1.0]).second_order_waist().unwrap(), (-1.0, 1.0));
        assert_eq!(mv(&[0.25, 0.0, 1.0]).second_order_waist().unwrap(), (0.0, 0.25));
        assert!(matches!(
            mv(&[1.0, 0.0, 0.0]).second_order_waist(),
            Err(Error::InvalidSecondMoment(_))
        ));
        let y = mv(&[2.0, 1.0, 1.0]);
        let (t, v) = y.second_order_waist().unwrap();
        assert!(close(y.propagate(t).unwrap().get(0), v, 1e-15));
    }

    #[test]
    fn centroid_examples() {
        let c = CentroidState::new(0.0, 0.0, 1.0).unwrap();
        assert_eq!(c.evolve(12.0), c);
        let c = CentroidState::new(0.0, 0.5477, 1.0).unwrap();
        let e = c.evolve(2.0);
        assert!(close(e.x0, 1.0954, 1e-15));
        assert_eq!(e.p, 0.5477);
        let a = c.evolve(0.3).evolve(1.1);
        assert!(close(a.x0, c.evolve(1.4).x0, 1e-15));
    }

    #[test]
    fn json_shape() {
        let y = MomentVector::new(vec![1.0, 0.0, 1.0], 2.0, 1.0).unwrap();
        let s = serde_json::to_string(&y).unwrap();
        assert_eq!(s, r#"{"order":2,"values":[1.0,0.0,1.0],"mass":2.0,"hbar":1.0}"#);
        let back: MomentVector = serde_json::from_str(&s).unwrap();
        assert_eq!(back, y);
        assert!(serde_json::from_str::<MomentVector>(r#"{"order":3,"values":[1.0,0.0,1.0],"mass":2.0,"hbar":1.0}"#).is_err());
        assert!(serde_json::from_str::<MomentVector>(r#"{"order":2,"values":[1.0,0.0,1.0],"mass":-2.0,"hbar":1.0}"#).is_err());

        let z = y.invariants().unwrap();
        let s = serde_json::to_string(&z).unwrap();
        assert_eq!(s, r#"{"order":2,"z":[1.0,0.0,1.0],"t0":0.0,"yn":1.0}"#);
        assert_eq!(serde_json::from_str::<InvariantSet>(&s).unwrap(), z);
    }

    #[test]
    fn invariant_scales_bound_invariants() {
        let y = mv(&[0.3, -0.2, 0.5, 0.1, 2.0]);
        let z = y.invariants().unwrap();
        let s = y.invariant_scales();
        assert_eq!(s[0], 1.0);
        assert_eq!(s[1], 0.0);
        for l in 2..=4 {
            assert!(z.z()[l].abs() <= s[l]);
        }
        // Z_2 = y2 y4 - y3^2 has terms y2 y4 and y3^2
        assert!(close(s[2], 0.5 * 2.0 + 0.01, 1e-15));
    }
}
