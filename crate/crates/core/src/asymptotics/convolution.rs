//! Piecewise-polynomial densities and their convolution with uniforms.

/// A density supported on `[knots[0], knots[last]]`; piece `k` is the
/// polynomial `sum_i c_i (x - knots[k])^i` on `[knots[k], knots[k+1]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePolynomial {
    knots: Vec<f64>,
    pieces: Vec<Vec<f64>>,
}

/// Rewrites `sum c_i (y + delta)^i` as a polynomial in `y`.
fn taylor_shift(coeffs: &[f64], delta: f64) -> Vec<f64> {
    let mut out = coeffs.to_vec();
    let n = out.len();
    for k in 0..n {
        for i in (k..n - 1).rev() {
            out[i] += delta * out[i + 1];
        }
    }
    out
}

fn horner(coeffs: &[f64], y: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * y + c)
}

impl PiecewisePolynomial {
    /// Density of `U(lo, hi)`.
    pub fn uniform(lo: f64, hi: f64) -> Self {
        assert!(hi > lo, "empty interval");
        PiecewisePolynomial {
            knots: vec![lo, hi],
            pieces: vec![vec![1.0 / (hi - lo)]],
        }
    }

    pub fn support(&self) -> (f64, f64) {
        (self.knots[0], *self.knots.last().expect("knots"))
    }

    fn piece_index(&self, x: f64) -> Option<usize> {
        let (lo, hi) = self.support();
        if x < lo || x > hi {
            return None;
        }
        let k = self.knots.partition_point(|&t| t <= x);
        Some(k.saturating_sub(1).min(self.pieces.len() - 1))
    }

    pub fn density(&self, x: f64) -> f64 {
        match self.piece_index(x) {
            Some(k) => horner(&self.pieces[k], x - self.knots[k]),
            None => 0.0,
        }
    }

    /// Antiderivative pieces with the running integral at each knot.
    fn antiderivative(&self) -> (Vec<Vec<f64>>, Vec<f64>) {
        let mut pieces = Vec::with_capacity(self.pieces.len());
        let mut at_knot = vec![0.0];
        for (k, c) in self.pieces.iter().enumerate() {
            let mut a = vec![*at_knot.last().expect("start")];
            a.extend(c.iter().enumerate().map(|(i, ci)| ci / (i + 1) as f64));
            let width = self.knots[k + 1] - self.knots[k];
            at_knot.push(horner(&a, width));
            pieces.push(a);
        }
        (pieces, at_knot)
    }

    /// `P(X <= x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        let (anti, at_knot) = self.antiderivative();
        let (lo, hi) = self.support();
        if x <= lo {
            0.0
        } else if x >= hi {
            *at_knot.last().expect("total")
        } else {
            let k = self.piece_index(x).expect("inside");
            horner(&anti[k], x - self.knots[k])
        }
    }

    pub fn total_mass(&self) -> f64 {
        *self.antiderivative().1.last().expect("total")
    }

    /// Density of `X + U` with `U ~ U(lo, hi)` independent of `X`.
    pub fn convolve_uniform(&self, lo: f64, hi: f64) -> Self {
        assert!(hi > lo, "empty interval");
        let width = hi - lo;
        let (anti, at_knot) = self.antiderivative();
        let total = *at_knot.last().expect("total");
        let mut knots: Vec<f64> = self.knots.iter().flat_map(|&t| [t + lo, t + hi]).collect();
        knots.sort_by(f64::total_cmp);
        let scale = knots.iter().fold(1.0f64, |a, &t| a.max(t.abs()));
        knots.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * scale);

        // CDF of X evaluated at `x - shift`, as a polynomial in `y = x - left`.
        let shifted_cdf = |left: f64, right: f64, shift: f64| -> Vec<f64> {
            let mid = 0.5 * (left + right) - shift;
            let (slo, shi) = self.support();
            if mid <= slo {
                vec![0.0]
            } else if mid >= shi {
                vec![total]
            } else {
                let k = self.piece_index(mid).expect("inside");
                taylor_shift(&anti[k], left - shift - self.knots[k])
            }
        };
        let mut pieces = Vec::with_capacity(knots.len() - 1);
        for w in knots.windows(2) {
            let a = shifted_cdf(w[0], w[1], lo);
            let b = shifted_cdf(w[0], w[1], hi);
            let n = a.len().max(b.len());
            let piece: Vec<f64> = (0..n)
                .map(|i| (a.get(i).copied().unwrap_or(0.0) - b.get(i).copied().unwrap_or(0.0)) / width)
                .collect();
            pieces.push(piece);
        }
        PiecewisePolynomial { knots, pieces }
    }

    /// Density of `c + U_0 + sum_k a U_k` with one `U_0 ~ U(-1/2, 1/2)`
    /// and `count` terms `U_k ~ U(-1/2, 1/2)`.
    pub fn centred_uniform_sum(c: f64, a: f64, count: usize) -> Self {
        let mut pp = PiecewisePolynomial::uniform(c - 0.5, c + 0.5);
        for _ in 0..count {
            pp = pp.convolve_uniform(-0.5 * a, 0.5 * a);
        }
        pp
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Irwin-Hall CDF by inclusion-exclusion.
    fn irwin_hall_cdf(n: usize, x: f64) -> f64 {
        let mut fact = 1.0;
        for i in 1..=n {
            fact *= i as f64;
        }
        let mut sum = 0.0;
        let mut binom = 1.0;
        for k in 0..=n {
            let t = x - k as f64;
            if t > 0.0 {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sum += sign * binom * t.powi(n as i32);
            }
            binom = binom * (n - k) as f64 / (k + 1) as f64;
        }
        sum / fact
    }

    #[test]
    fn shift_matches_direct_evaluation() {
        let c = [1.0, -2.0, 0.5, 3.0];
        for &(delta, y) in &[(0.3, 0.7), (-1.2, 2.0), (4.0, -0.5)] {
            assert!((horner(&taylor_shift(&c, delta), y) - horner(&c, y + delta)).abs() < 1e-10);
        }
    }

    #[test]
    fn reproduces_irwin_hall() {
        for n in 1..=8 {
            let mut pp = PiecewisePolynomial::uniform(0.0, 1.0);
            for _ in 1..n {
                pp = pp.convolve_uniform(0.0, 1.0);
            }
            assert!((pp.total_mass() - 1.0).abs() < 1e-12);
            for k in 0..=40 {
                let x = n as f64 * k as f64 / 40.0;
                assert!((pp.cdf(x) - irwin_hall_cdf(n, x)).abs() < 1e-11, "n={n} x={x}");
            }
        }
    }

    #[test]
    fn unequal_widths_match_brute_integration() {
        // U(0,1) + U(0,0.3): trapezoid with plateau density 1 on [0.3, 1].
        let pp = PiecewisePolynomial::uniform(0.0, 1.0).convolve_uniform(0.0, 0.3);
        assert!((pp.density(0.15) - 0.5).abs() < 1e-12);
        assert!((pp.density(0.6) - 1.0).abs() < 1e-12);
        assert!((pp.cdf(1.3) - 1.0).abs() < 1e-12);
        assert!((pp.cdf(0.3) - 0.15).abs() < 1e-12);
    }
}
