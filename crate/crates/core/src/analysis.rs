//! Closed-form security quantities and the solvers for the headline numbers.

use crate::error::{Error, Result};

/// Detection probability where the BB84 protocol's curve is usually quoted.
pub const BB84_DETECTION: f64 = 0.15;
/// Detection probability quoted for the ping-pong protocol.
pub const PING_PONG_DETECTION: f64 = 0.18;
/// Largest detection probability any incoherent attack can cause.
pub const MAX_DETECTION: f64 = 0.375;

const BISECTION_TOL: f64 = 1e-12;

/// One point of the security curves; all information quantities in bits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecurityPoint {
    pub p_d: f64,
    pub p_e: f64,
    pub i_ab: f64,
    pub i_ae: f64,
}

impl SecurityPoint {
    pub fn at(p_d: f64) -> Result<Self> {
        check_range(p_d, 0.0, MAX_DETECTION, "[0, 3/8]")?;
        let p_e = eve_error(p_d)?;
        Ok(SecurityPoint { p_d, p_e, i_ab: mutual_info_ab(p_d)?, i_ae: 1.0 - binary_entropy(p_e)? })
    }

    pub fn sum(&self) -> f64 {
        self.i_ab + self.i_ae
    }
}

/// Security points on a strictly increasing p_d grid over [0, 3/8].
#[derive(Debug, Clone, PartialEq)]
pub struct SecurityCurve {
    pub points: Vec<SecurityPoint>,
}

impl SecurityCurve {
    /// Grid 0, step, 2·step, … up to 3/8; 3/8 itself is always the last point.
    pub fn sample(step: f64) -> Result<Self> {
        if !(step > 0.0 && step < MAX_DETECTION) {
            return Err(Error::Domain { value: step, domain: "(0, 3/8)" });
        }
        let n = (MAX_DETECTION / step).floor() as usize;
        let mut grid: Vec<f64> = (0..=n).map(|k| k as f64 * step).filter(|&p| p < MAX_DETECTION - 1e-12).collect();
        grid.push(MAX_DETECTION);
        let points = grid.into_iter().map(SecurityPoint::at).collect::<Result<_>>()?;
        Ok(SecurityCurve { points })
    }
}

fn check_range(x: f64, lo: f64, hi: f64, domain: &'static str) -> Result<()> {
    if !(lo..=hi).contains(&x) {
        return Err(Error::Domain { value: x, domain });
    }
    Ok(())
}

/// 3/8 − (c_x² + c_y² + c_x² c_y²)/8.
pub fn detection_probability(c_x: f64, c_y: f64) -> Result<f64> {
    check_range(c_x, 0.0, 1.0, "[0, 1]")?;
    check_range(c_y, 0.0, 1.0, "[0, 1]")?;
    let (x2, y2) = (c_x * c_x, c_y * c_y);
    Ok(0.375 - (x2 + y2 + x2 * y2) / 8.0)
}

/// h(p) = −p log₂ p − (1−p) log₂(1−p), with 0 log 0 = 0.
pub fn binary_entropy(p: f64) -> Result<f64> {
    check_range(p, 0.0, 1.0, "[0, 1]")?;
    let term = |q: f64| if q > 0.0 { -q * q.log2() } else { 0.0 };
    Ok(term(p) + term(1.0 - p))
}

pub fn mutual_info_ab(p_d: f64) -> Result<f64> {
    Ok(1.0 - binary_entropy(p_d)?)
}

/// Eve's error rate on the key bit as a function of the detection probability.
pub fn eve_error(p_d: f64) -> Result<f64> {
    check_range(p_d, 0.0, 0.5, "[0, 1/2]")?;
    let r = (1.0 - 2.0 * p_d).sqrt();
    Ok(0.5 - 0.5 * r * (1.0 - r) * (2.0 * r + (2.0 * (1.0 - r)).sqrt()))
}

pub fn mutual_info_ae(p_d: f64) -> Result<f64> {
    Ok(1.0 - binary_entropy(eve_error(p_d)?)?)
}

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> Result<f64> {
    let (flo, fhi) = (f(lo), f(hi));
    if flo.signum() == fhi.signum() {
        return Err(Error::State(format!("no sign change on [{lo}, {hi}]")));
    }
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if f(mid).signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The detection probability at which I(A,B) = I(A,E).
pub fn find_security_threshold() -> f64 {
    let gap = |p: f64| mutual_info_ab(p).unwrap_or(f64::NAN) - mutual_info_ae(p).unwrap_or(f64::NAN);
    bisect(1e-9, MAX_DETECTION - 1e-9, gap).expect("I(A,B) − I(A,E) changes sign on (0, 3/8)")
}

/// The detection probability maximizing I(A,E) on [0, 3/8].
pub fn find_eve_optimum() -> f64 {
    let f = |p: f64| mutual_info_ae(p).unwrap_or(f64::NEG_INFINITY);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0, MAX_DETECTION);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    while b - a > 1e-10 {
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - inv_phi * (b - a);
        d = a + inv_phi * (b - a);
    }
    0.5 * (a + b)
}

/// p in (0, 1/2) with h(p) = `entropy`.
pub fn solve_binary_entropy(entropy: f64) -> Result<f64> {
    check_range(entropy, 0.0, 1.0, "[0, 1]")?;
    if entropy >= 1.0 {
        return Ok(0.5);
    }
    if entropy <= 0.0 {
        return Ok(0.0);
    }
    bisect(0.0, 0.5, |p| binary_entropy(p).unwrap_or(f64::NAN) - entropy)
}

/// The largest detection probability with 1 − h(p) ≥ 1/2.
pub fn collective_bound() -> f64 {
    solve_binary_entropy(0.5).expect("1/2 is in range")
}

/// I(A,B) + I(A,E) on the grid; fails if the sum ever exceeds 1.
pub fn sum_information_curve(step: f64) -> Result<Vec<(f64, f64)>> {
    let curve = SecurityCurve::sample(step)?;
    let sums: Vec<(f64, f64)> = curve.points.iter().map(|p| (p.p_d, p.sum())).collect();
    if let Some(&(p, s)) = sums.iter().find(|(_, s)| *s > 1.0 + 1e-12) {
        return Err(Error::State(format!("I(A,B) + I(A,E) = {s} > 1 at p_d = {p}")));
    }
    Ok(sums)
}

/// Plug-in mutual information (bits) of a 2×2 contingency table.
pub fn empirical_mutual_information(counts: [[u64; 2]; 2]) -> Result<f64> {
    let total: u64 = counts.iter().flatten().sum();
    if total == 0 {
        return Err(Error::arg("contingency table is empty"));
    }
    let n = total as f64;
    let row = [counts[0][0] + counts[0][1], counts[1][0] + counts[1][1]];
    let col = [counts[0][0] + counts[1][0], counts[0][1] + counts[1][1]];
    let mut mi = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            if counts[i][j] > 0 {
                let pij = counts[i][j] as f64 / n;
                mi += pij * (pij * n * n / (row[i] as f64 * col[j] as f64)).log2();
            }
        }
    }
    Ok(mi.max(0.0))
}

/// Accumulates a 2×2 table from bit pairs.
pub fn contingency<I: IntoIterator<Item = (bool, bool)>>(pairs: I) -> [[u64; 2]; 2] {
    let mut t = [[0u64; 2]; 2];
    for (a, b) in pairs {
        t[usize::from(a)][usize::from(b)] += 1;
    }
    t
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn detection_probability_examples() {
        assert_eq!(detection_probability(0.0, 0.0).unwrap(), 0.375);
        assert_eq!(detection_probability(1.0, 1.0).unwrap(), 0.0);
        assert_eq!(detection_probability(1.0, 0.0).unwrap(), 0.25);
        assert!(detection_probability(1.01, 0.0).is_err());
        assert!(detection_probability(0.5, -0.1).is_err());
    }

    #[test]
    fn detection_probability_monotone() {
        for i in 0..=20 {
            for j in 0..20 {
                let (x, y0, y1) = (i as f64 / 20.0, j as f64 / 20.0, (j + 1) as f64 / 20.0);
                assert!(detection_probability(x, y1).unwrap() <= detection_probability(x, y0).unwrap());
                assert!(detection_probability(y1, x).unwrap() <= detection_probability(y0, x).unwrap());
            }
        }
    }

    #[test]
    fn endpoints() {
        assert_eq!(mutual_info_ab(0.0).unwrap(), 1.0);
        assert_eq!(eve_error(0.0).unwrap(), 0.5);
        assert_eq!(mutual_info_ae(0.0).unwrap(), 0.0);
        // 1 − 2·3/8 = 1/4, r = 1/2: p_e = 1/2 − (1/2)(1/2)(1/2)(1 + 1) = 1/4
        assert!((eve_error(0.375).unwrap() - 0.25).abs() < 1e-15);
        let h_quarter = -(0.25f64.log2() * 0.25 + 0.75 * 0.75f64.log2());
        assert!((mutual_info_ae(0.375).unwrap() - (1.0 - h_quarter)).abs() < 1e-12);
        assert!((mutual_info_ae(0.375).unwrap() - 0.1887).abs() < 1e-4);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(eve_error(0.51), Err(Error::Domain { .. })));
        assert!(eve_error(-0.01).is_err());
        assert!(binary_entropy(1.5).is_err());
        assert!(mutual_info_ab(-0.2).is_err());
        assert!(eve_error(0.5).is_ok());
    }

    #[test]
    fn threshold() {
        let p = find_security_threshold();
        assert!((p - 0.266188).abs() < 1e-5, "{p}");
        assert!(p > PING_PONG_DETECTION);
        assert!(p > BB84_DETECTION);
        assert!((mutual_info_ab(p).unwrap() - mutual_info_ae(p).unwrap()).abs() < 1e-8);
        assert!((eve_error(0.266188).unwrap() - 0.266188).abs() < 1e-4);
    }

    #[test]
    fn eve_optimum() {
        let p = find_eve_optimum();
        assert!((p - 0.345).abs() < 0.005, "{p}");
        let best = mutual_info_ae(p).unwrap();
        assert!(best > mutual_info_ae(MAX_DETECTION).unwrap());
        assert!((best - 0.194).abs() < 5e-4, "{best}");
    }

    #[test]
    fn collective() {
        let p = collective_bound();
        assert!((p - 0.110028).abs() < 1e-5, "{p}");
        assert!((binary_entropy(p).unwrap() - 0.5).abs() < 1e-8);
        assert_eq!(solve_binary_entropy(1.0).unwrap(), 0.5);
    }

    #[test]
    fn solvers_are_deterministic() {
        assert_eq!(find_security_threshold().to_bits(), find_security_threshold().to_bits());
        assert_eq!(find_eve_optimum().to_bits(), find_eve_optimum().to_bits());
    }

    #[test]
    fn sum_curve() {
        let sums = sum_information_curve(0.001).unwrap();
        assert_eq!(sums[0], (0.0, 1.0));
        assert!(sums[1..].iter().all(|&(_, s)| s < 1.0));
        let t = find_security_threshold();
        let at = SecurityPoint::at(t).unwrap();
        assert!((at.sum() - 2.0 * at.i_ab).abs() < 1e-8);
        assert!((at.sum() - 0.328).abs() < 1e-3);
    }

    #[test]
    fn curve_grid_is_increasing_and_consistent() {
        let c = SecurityCurve::sample(0.01).unwrap();
        assert_eq!(c.points.last().unwrap().p_d, MAX_DETECTION);
        for w in c.points.windows(2) {
            assert!(w[1].p_d > w[0].p_d);
            assert!(w[1].i_ab < w[0].i_ab);
        }
        for p in &c.points {
            assert!((p.i_ae - mutual_info_ae(p.p_d).unwrap()).abs() < 1e-15);
        }
        assert!(SecurityCurve::sample(0.0).is_err());
        assert!(SecurityCurve::sample(0.4).is_err());
    }

    #[test]
    fn empirical_mi() {
        assert!((empirical_mutual_information([[50, 0], [0, 50]]).unwrap() - 1.0).abs() < 1e-12);
        assert!(empirical_mutual_information([[50, 50], [50, 50]]).unwrap().abs() < 1e-12);
        assert!(empirical_mutual_information([[0, 0], [0, 0]]).is_err());

        let mut r = ChaCha8Rng::seed_from_u64(11);
        let pairs = (0..1_000_000).map(|_| {
            let a: bool = r.random();
            (a, a ^ (r.random::<f64>() < 0.25))
        });
        let mi = empirical_mutual_information(contingency(pairs)).unwrap();
        let expected = 1.0 - binary_entropy(0.25).unwrap();
        assert!((mi - expected).abs() < 0.01, "{mi}");
    }
}
