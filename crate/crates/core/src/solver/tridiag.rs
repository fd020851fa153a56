use crate::error::{Error, Result};

/// Thomas algorithm with the forward sweep factored once.
#[derive(Debug, Clone)]
pub struct Tridiag {
    lower: Vec<f64>,
    inv_pivot: Vec<f64>,
    upper_scaled: Vec<f64>,
}

impl Tridiag {
    /// `lower[0]` and `upper[n-1]` are ignored.
    pub fn new(lower: &[f64], diag: &[f64], upper: &[f64]) -> Result<Self> {
        let n = diag.len();
        assert!(lower.len() == n && upper.len() == n, "band lengths differ");
        let mut inv_pivot = vec![0.0; n];
        let mut upper_scaled = vec![0.0; n];
        let mut prev = 0.0;
        for i in 0..n {
            let piv = diag[i] - if i > 0 { lower[i] * prev } else { 0.0 };
            if piv == 0.0 || !piv.is_finite() {
                return Err(Error::ZeroPivot(i));
            }
            inv_pivot[i] = 1.0 / piv;
            prev = if i + 1 < n { upper[i] / piv } else { 0.0 };
            upper_scaled[i] = prev;
        }
        Ok(Tridiag { lower: lower.to_vec(), inv_pivot, upper_scaled })
    }

    /// Backward-Euler matrix `I - a Δ` (with `a = D dt / dx²`) under zero-flux ends.
    pub fn implicit_diffusion(n: usize, a: f64) -> Result<Self> {
        let mut lower = vec![-a; n];
        let diag = vec![1.0 + 2.0 * a; n];
        let mut upper = vec![-a; n];
        upper[0] = -2.0 * a;
        lower[n - 1] = -2.0 * a;
        Tridiag::new(&lower, &diag, &upper)
    }

    pub fn solve_in_place(&self, rhs: &mut [f64]) {
        let n = rhs.len();
        rhs[0] *= self.inv_pivot[0];
        for i in 1..n {
            rhs[i] = (rhs[i] - self.lower[i] * rhs[i - 1]) * self.inv_pivot[i];
        }
        for i in (0..n - 1).rev() {
            rhs[i] -= self.upper_scaled[i] * rhs[i + 1];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_known_system() {
        let lower = [0.0, 1.0, 1.0, 1.0];
        let diag = [4.0, 4.0, 4.0, 4.0];
        let upper = [1.0, 1.0, 1.0, 0.0];
        let x = [1.0, -2.0, 3.0, 0.5];
        let mut b: Vec<f64> = (0..4)
            .map(|i| {
                diag[i] * x[i]
                    + if i > 0 { lower[i] * x[i - 1] } else { 0.0 }
                    + if i < 3 { upper[i] * x[i + 1] } else { 0.0 }
            })
            .collect();
        Tridiag::new(&lower, &diag, &upper).unwrap().solve_in_place(&mut b);
        for i in 0..4 {
            assert!((b[i] - x[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_pivot_reported() {
        assert!(matches!(Tridiag::new(&[0.0, 0.0], &[0.0, 1.0], &[1.0, 0.0]), Err(Error::ZeroPivot(0))));
    }

    #[test]
    fn constant_state_is_fixed() {
        let t = Tridiag::implicit_diffusion(50, 3.7).unwrap();
        let mut v = vec![2.5; 50];
        t.solve_in_place(&mut v);
        assert!(v.iter().all(|&y| (y - 2.5).abs() < 1e-13));
    }
}
