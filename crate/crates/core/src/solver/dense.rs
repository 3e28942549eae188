//! Banded Cholesky factorization.

/// Banded Cholesky for symmetric positive definite matrices with half
/// bandwidth `bw`. Row `i` stores columns `i − bw ..= i`.
pub(crate) struct Banded {
    n: usize,
    bw: usize,
    l: Vec<f64>,
}

impl Banded {
    /// Empty `n × n` band; fill with [`Banded::add`] then [`Banded::factor`].
    pub(crate) fn zeros(n: usize, bw: usize) -> Self {
        Banded {
            n,
            bw,
            l: vec![0.0; n * (bw + 1)],
        }
    }

    fn at(&self, i: usize, j: usize) -> usize {
        i * (self.bw + 1) + (j + self.bw - i)
    }

    /// Adds `v` to entry `(i, j)` of the lower triangle (`j ≤ i`, `i − j ≤ bw`).
    pub(crate) fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.at(i, j);
        self.l[k] += v;
    }

    pub(crate) fn factor(&mut self) -> bool {
        let (n, bw) = (self.n, self.bw);
        for i in 0..n {
            let j0 = i.saturating_sub(bw);
            for j in j0..=i {
                let k0 = j0.max(j.saturating_sub(bw));
                let mut s = self.l[self.at(i, j)];
                for k in k0..j {
                    s -= self.l[self.at(i, k)] * self.l[self.at(j, k)];
                }
                if j == i {
                    if !(s > 0.0) {
                        return false;
                    }
                    let idx = self.at(i, i);
                    self.l[idx] = s.sqrt();
                } else {
                    let idx = self.at(i, j);
                    self.l[idx] = s / self.l[self.at(j, j)];
                }
            }
        }
        true
    }

    pub(crate) fn solve(&self, b: &mut [f64]) {
        let (n, bw) = (self.n, self.bw);
        for i in 0..n {
            let mut s = b[i];
            for k in i.saturating_sub(bw)..i {
                s -= self.l[self.at(i, k)] * b[k];
            }
            b[i] = s / self.l[self.at(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for k in i + 1..(i + bw + 1).min(n) {
                s -= self.l[self.at(k, i)] * b[k];
            }
            b[i] = s / self.l[self.at(i, i)];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn banded_matches_dense() {
        // Tridiagonal plus one extra band.
        let n = 7;
        let bw = 2;
        let mut dense = vec![0.0; n * n];
        let mut band = Banded::zeros(n, bw);
        for i in 0..n {
            for j in i.saturating_sub(bw)..=i {
                let v = if i == j {
                    6.0 + i as f64
                } else {
                    1.0 / (1 + i - j) as f64
                };
                dense[i * n + j] = v;
                dense[j * n + i] = v;
                band.add(i, j, v);
            }
        }
        assert!(band.factor());
        let rhs: Vec<f64> = (0..n).map(|i| i as f64 - 2.5).collect();
        let mut x = rhs.clone();
        band.solve(&mut x);
        for i in 0..n {
            let r: f64 = (0..n).map(|j| dense[i * n + j] * x[j]).sum();
            assert!((r - rhs[i]).abs() < 1e-12);
        }
    }
}
