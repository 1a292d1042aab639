//! Symmetric banded matrices with an unpivoted LDLᵀ factorization.
//!
//! The factorization is a congruence, so by Sylvester's law of inertia the
//! number of negative pivots of `A − σB` counts the generalized eigenvalues
//! below `σ`.

#[derive(Debug, Clone, PartialEq)]
pub struct SymBand {
    n: usize,
    bw: usize,
    /// Row `i` holds `A[i][i − k]` at offset `k`, `k = 0..=bw`.
    data: Vec<f64>,
}

impl SymBand {
    pub fn zeros(n: usize, bw: usize) -> Self {
        Self {
            n,
            bw,
            data: vec![0.0; n * (bw + 1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    fn idx(&self, i: usize, j: usize) -> Option<usize> {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        let k = i - j;
        (k <= self.bw && i < self.n).then(|| i * (self.bw + 1) + k)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.idx(i, j).map_or(0.0, |k| self.data[k])
    }

    /// Adds `v` to the symmetric pair `(i, j)`, `(j, i)`.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self
            .idx(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) outside band {}", self.bw));
        self.data[k] += v;
    }

    /// `self − sigma · other`, with the wider of the two bandwidths.
    pub fn shifted(&self, sigma: f64, other: &SymBand) -> SymBand {
        assert_eq!(self.n, other.n);
        let bw = self.bw.max(other.bw);
        let mut out = SymBand::zeros(self.n, bw);
        for i in 0..self.n {
            for k in 0..=bw.min(i) {
                let j = i - k;
                out.data[i * (bw + 1) + k] = self.get(i, j) - sigma * other.get(i, j);
            }
        }
        out
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            for k in 0..=self.bw.min(i) {
                let j = i - k;
                let a = self.data[i * (self.bw + 1) + k];
                y[i] += a * x[j];
                if k > 0 {
                    y[j] += a * x[i];
                }
            }
        }
        y
    }

    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        dot(x, &self.matvec(x))
    }

    /// Unpivoted `LDLᵀ`; fails on an exactly zero or non-finite pivot.
    pub fn ldlt(&self) -> Option<Ldlt> {
        let n = self.n;
        let bw = self.bw;
        let w = bw + 1;
        let mut l = vec![0.0; n * w];
        let mut d = vec![0.0; n];
        for j in 0..n {
            let lo = j.saturating_sub(bw);
            let mut djj = self.data[j * w];
            for k in lo..j {
                let ljk = l[j * w + (j - k)];
                djj -= ljk * ljk * d[k];
            }
            if djj == 0.0 || !djj.is_finite() {
                return None;
            }
            d[j] = djj;
            for i in j + 1..n.min(j + bw + 1) {
                let mut v = self.data[i * w + (i - j)];
                for k in i.saturating_sub(bw)..j {
                    v -= l[i * w + (i - k)] * l[j * w + (j - k)] * d[k];
                }
                l[i * w + (i - j)] = v / djj;
            }
        }
        Some(Ldlt { n, bw, l, d })
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Clone)]
pub struct Ldlt {
    n: usize,
    bw: usize,
    l: Vec<f64>,
    d: Vec<f64>,
}

impl Ldlt {
    pub fn negative_pivots(&self) -> usize {
        self.d.iter().filter(|&&x| x < 0.0).count()
    }

    pub fn is_positive_definite(&self) -> bool {
        self.d.iter().all(|&x| x > 0.0)
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let w = self.bw + 1;
        let mut x = b.to_vec();
        for i in 0..self.n {
            for k in i.saturating_sub(self.bw)..i {
                x[i] -= self.l[i * w + (i - k)] * x[k];
            }
        }
        for (xi, di) in x.iter_mut().zip(&self.d) {
            *xi /= di;
        }
        for i in (0..self.n).rev() {
            for j in i + 1..self.n.min(i + self.bw + 1) {
                x[i] -= self.l[j * w + (j - i)] * x[j];
            }
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn laplacian_1d(n: usize) -> SymBand {
        let mut a = SymBand::zeros(n, 1);
        for i in 0..n {
            a.add(i, i, 2.0);
            if i > 0 {
                a.add(i, i - 1, -1.0);
            }
        }
        a
    }

    #[test]
    fn solve_recovers_known_vector() {
        let mut a = SymBand::zeros(6, 2);
        for i in 0..6 {
            a.add(i, i, 6.0 + i as f64);
            if i > 0 {
                a.add(i, i - 1, -1.5);
            }
            if i > 1 {
                a.add(i, i - 2, 0.5);
            }
        }
        let x: Vec<f64> = (0..6).map(|i| (i as f64).sin() + 1.0).collect();
        let b = a.matvec(&x);
        let f = a.ldlt().unwrap();
        assert!(f.is_positive_definite());
        for (u, v) in f.solve(&b).iter().zip(&x) {
            assert_relative_eq!(u, v, max_relative = 1e-13);
        }
    }

    #[test]
    fn inertia_counts_eigenvalues_below_shift() {
        // eigenvalues of tridiag(-1, 2, -1): 2 - 2cos(kπ/(n+1))
        let n = 10;
        let a = laplacian_1d(n);
        let mut id = SymBand::zeros(n, 0);
        for i in 0..n {
            id.add(i, i, 1.0);
        }
        let eig = |k: usize| 2.0 - 2.0 * (k as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos();
        for k in 1..n {
            let sigma = 0.4 * eig(k) + 0.6 * eig(k + 1);
            assert_eq!(a.shifted(sigma, &id).ldlt().unwrap().negative_pivots(), k);
        }
    }

    #[test]
    fn shifted_and_quadratic_form() {
        let a = laplacian_1d(3);
        let s = a.shifted(1.0, &a);
        assert_eq!(s.get(0, 0), 0.0);
        assert_eq!(a.quadratic_form(&[1.0, 1.0, 1.0]), 2.0);
        assert_eq!(a.get(0, 2), 0.0);
    }
}
