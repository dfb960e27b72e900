//! General banded matrices with LU factorization and partial pivoting.
//!
//! Storage follows the usual band layout: entry `(r, c)` lives at band row
//! `kl + ku + r - c` of column `c`; the extra `kl` rows absorb pivoting
//! fill-in. Factorization cost is `O(n kl (kl + ku))`, ample for the
//! structured-grid systems this crate produces.

use alloc::vec;
use alloc::vec::Vec;

use libm::fabs;

/// Column-major banded matrix with `kl` sub- and `ku` superdiagonals.
#[derive(Debug, Clone)]
pub struct BandedMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    ld: usize,
    ab: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let ld = 2 * kl + ku + 1;
        Self { n, kl, ku, ld, ab: vec![0.0; ld * n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kl(&self) -> usize {
        self.kl
    }

    pub fn ku(&self) -> usize {
        self.ku
    }

    #[inline]
    fn slot(&self, r: usize, c: usize) -> usize {
        debug_assert!(r < self.n && c < self.n);
        debug_assert!(r + self.ku >= c && c + self.kl >= r, "outside band: ({r}, {c})");
        c * self.ld + (self.kl + self.ku + r - c)
    }

    #[inline]
    pub fn add(&mut self, r: usize, c: usize, v: f64) {
        let s = self.slot(r, c);
        self.ab[s] += v;
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        let s = self.slot(r, c);
        self.ab[s] = v;
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        if r + self.ku < c || c + self.kl < r {
            return 0.0;
        }
        self.ab[self.slot(r, c)]
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for c in 0..self.n {
            let lo = c.saturating_sub(self.ku);
            let hi = (c + self.kl).min(self.n - 1);
            let xc = x[c];
            for r in lo..=hi {
                y[r] += self.ab[c * self.ld + (self.kl + self.ku + r - c)] * xc;
            }
        }
        y
    }

    /// In-place LU with row partial pivoting. Returns the column index of
    /// the vanishing pivot on failure.
    pub fn lu_factor(mut self) -> Result<BandedLu, usize> {
        let (n, kl, ku, ld) = (self.n, self.kl, self.ku, self.ld);
        let mut ipiv = vec![0usize; n];
        for j in 0..n {
            let pmax = (j + kl).min(n - 1);
            let mut p = j;
            let mut best = fabs(self.ab[j * ld + (kl + ku + j - j)]);
            for r in j + 1..=pmax {
                let v = fabs(self.ab[j * ld + (kl + ku + r - j)]);
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best == 0.0 {
                return Err(j);
            }
            ipiv[j] = p;
            let chi = (j + kl + ku).min(n - 1);
            if p != j {
                for c in j..=chi {
                    let sj = c * ld + (kl + ku + j - c);
                    let sp = c * ld + (kl + ku + p - c);
                    self.ab.swap(sj, sp);
                }
            }
            let pivot = self.ab[j * ld + kl + ku];
            for r in j + 1..=pmax {
                let sm = j * ld + (kl + ku + r - j);
                let m = self.ab[sm] / pivot;
                self.ab[sm] = m;
                if m != 0.0 {
                    for c in j + 1..=chi {
                        let src = c * ld + (kl + ku + j - c);
                        let dst = c * ld + (kl + ku + r - c);
                        self.ab[dst] -= m * self.ab[src];
                    }
                }
            }
        }
        Ok(BandedLu { n, kl, ku, ld, ab: self.ab, ipiv })
    }
}

/// Factored form; solves by forward/back substitution.
#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    kl: usize,
    ku: usize,
    ld: usize,
    ab: Vec<f64>,
    ipiv: Vec<usize>,
}

impl BandedLu {
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let (n, kl, ku, ld) = (self.n, self.kl, self.ku, self.ld);
        let mut x = b.to_vec();
        for j in 0..n {
            let p = self.ipiv[j];
            if p != j {
                x.swap(j, p);
            }
            let xj = x[j];
            if xj != 0.0 {
                let rmax = (j + kl).min(n - 1);
                for r in j + 1..=rmax {
                    x[r] -= self.ab[j * ld + (kl + ku + r - j)] * xj;
                }
            }
        }
        for j in (0..n).rev() {
            let mut s = x[j];
            let chi = (j + kl + ku).min(n - 1);
            for c in j + 1..=chi {
                s -= self.ab[c * ld + (kl + ku + j - c)] * x[c];
            }
            let v = s / self.ab[j * ld + kl + ku];
            x[j] = v;
        }
        x
    }
}
