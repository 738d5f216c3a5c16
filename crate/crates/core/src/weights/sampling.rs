use crate::scalar::Scalar;

const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Radical inverse of `i` in base `b`.
fn radical_inverse(mut i: u64, b: u32) -> f64 {
    let inv = 1.0 / b as f64;
    let mut f = inv;
    let mut out = 0.0;
    while i > 0 {
        out += f * (i % b as u64) as f64;
        i /= b as u64;
        f *= inv;
    }
    out
}

/// Deterministic probe offsets in the closed ball of radius `rho` in `R^k`:
/// the origin, the `2k` axis extremes `+-rho e_i`, then `extra` Halton points
/// accepted from the enclosing cube.
pub fn ball_samples<T: Scalar>(k: usize, rho: T, extra: usize) -> Vec<Vec<T>> {
    assert!(
        k <= PRIMES.len(),
        "ball sampling supports up to {} dimensions",
        PRIMES.len()
    );
    let mut out = vec![vec![T::zero(); k]];
    for a in 0..k {
        for s in [T::one(), -T::one()] {
            let mut p = vec![T::zero(); k];
            p[a] = s * rho;
            out.push(p);
        }
    }
    let mut i = 1u64;
    let mut accepted = 0;
    while accepted < extra {
        let u: Vec<f64> = (0..k)
            .map(|a| 2.0 * radical_inverse(i, PRIMES[a]) - 1.0)
            .collect();
        i += 1;
        if u.iter().map(|v| v * v).sum::<f64>() <= 1.0 {
            out.push(u.iter().map(|&v| T::lit(v) * rho).collect());
            accepted += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_stay_in_ball() {
        let s = ball_samples(3, 0.5_f64, 50);
        assert_eq!(s.len(), 1 + 6 + 50);
        assert!(s
            .iter()
            .all(|p| p.iter().map(|v| v * v).sum::<f64>().sqrt() <= 0.5 + 1e-15));
        assert_eq!(s, ball_samples(3, 0.5, 50));
    }

    #[test]
    fn van_der_corput() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(3, 2), 0.75);
        assert!((radical_inverse(5, 3) - (2.0 / 3.0 + 1.0 / 9.0)).abs() < 1e-15);
    }
}
