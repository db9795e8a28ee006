//! Dense state-vector reference simulator for small registers.
//!
//! Used as an independent check of the tableau: amplitudes are evolved
//! directly, measurements are projections followed by renormalization, and
//! entropies come from the eigenvalues of the reduced density matrix.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::tableau::PauliRow;

/// Largest register the dense simulator accepts.
pub const MAX_DENSE_QUBITS: usize = 14;

#[derive(Clone, Debug)]
pub struct DenseState {
    n: usize,
    amps: Vec<Complex64>,
}

impl DenseState {
    fn check_size(n: usize) -> Result<()> {
        if n == 0 || n > MAX_DENSE_QUBITS {
            return Err(Error::invalid(format!(
                "dense simulation supports 1..={MAX_DENSE_QUBITS} qubits, got {n}"
            )));
        }
        Ok(())
    }

    /// Site 0 is the most significant bit of the basis index.
    #[inline]
    fn bit(&self, site: usize) -> usize {
        1 << (self.n - 1 - site)
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::check_size(n)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(DenseState { n, amps })
    }

    /// `(|00> + |11>)/sqrt 2` on each bond `(2k, 2k+1)`.
    pub fn bell_pairs(n: usize) -> Result<Self> {
        if n % 2 != 0 {
            return Err(Error::invalid("Bell pairs need an even qubit count"));
        }
        Self::check_size(n)?;
        let dim = 1usize << n;
        let norm = (0.5f64).powf(n as f64 / 4.0);
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        for (idx, a) in amps.iter_mut().enumerate() {
            let paired = (0..n / 2).all(|k| {
                let b0 = idx >> (n - 1 - 2 * k) & 1;
                let b1 = idx >> (n - 2 - 2 * k) & 1;
                b0 == b1
            });
            if paired {
                *a = Complex64::new(norm, 0.0);
            }
        }
        Ok(DenseState { n, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) {
        let (cb, tb) = (self.bit(control), self.bit(target));
        for idx in 0..self.amps.len() {
            if idx & cb != 0 && idx & tb == 0 {
                self.amps.swap(idx, idx | tb);
            }
        }
    }

    pub fn apply_swap(&mut self, a: usize, b: usize) {
        let (ab, bb) = (self.bit(a), self.bit(b));
        for idx in 0..self.amps.len() {
            if idx & ab != 0 && idx & bb == 0 {
                self.amps.swap(idx, idx ^ ab ^ bb);
            }
        }
    }

    /// `P|psi>` for a signed Pauli string.
    pub fn apply_pauli(&self, op: &PauliRow) -> Vec<Complex64> {
        let mut xmask = 0usize;
        let mut zmask = 0usize;
        let mut n_y = 0;
        for site in 0..self.n {
            if op.x(site) {
                xmask |= self.bit(site);
            }
            if op.z(site) {
                zmask |= self.bit(site);
            }
            if op.x(site) && op.z(site) {
                n_y += 1;
            }
        }
        let i_pow = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, -1.0),
        ][n_y % 4]
            * op.sign() as f64;
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (idx, &a) in self.amps.iter().enumerate() {
            let s = if (idx & zmask).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            out[idx ^ xmask] += a * i_pow * s;
        }
        out
    }

    /// Probability of outcome `+1` when measuring `op`.
    pub fn probability_plus(&self, op: &PauliRow) -> f64 {
        let p_psi = self.apply_pauli(op);
        let expectation: f64 = self
            .amps
            .iter()
            .zip(&p_psi)
            .map(|(a, b)| (a.conj() * b).re)
            .sum();
        ((1.0 + expectation) / 2.0).clamp(0.0, 1.0)
    }

    /// Projects onto the `outcome` eigenspace of `op` and renormalizes.
    pub fn project(&mut self, op: &PauliRow, outcome: i8) -> Result<()> {
        let p_psi = self.apply_pauli(op);
        let s = outcome as f64;
        let mut norm = 0.0;
        for (a, b) in self.amps.iter_mut().zip(&p_psi) {
            *a = (*a + b * s) * 0.5;
            norm += a.norm_sqr();
        }
        if norm < 1e-12 {
            return Err(Error::invalid("projection onto a zero-probability outcome"));
        }
        let inv = 1.0 / norm.sqrt();
        for a in &mut self.amps {
            *a *= inv;
        }
        Ok(())
    }

    /// Samples an outcome with Born probabilities and projects.
    pub fn measure<R: Rng + ?Sized>(&mut self, op: &PauliRow, rng: &mut R) -> i8 {
        let p = self.probability_plus(op);
        let outcome = if rng.gen::<f64>() < p { 1 } else { -1 };
        let outcome = if p < 1e-12 {
            -1
        } else if p > 1.0 - 1e-12 {
            1
        } else {
            outcome
        };
        self.project(op, outcome).expect("sampled outcome has positive probability");
        outcome
    }

    pub fn measure_bell_pair<R: Rng + ?Sized>(&mut self, a: usize, b: usize, rng: &mut R) {
        self.measure(&PauliRow::xx(self.n, a, b), rng);
        self.measure(&PauliRow::zz(self.n, a, b), rng);
    }

    /// Von Neumann entropy in bits of `region`, from the reduced density matrix.
    pub fn entropy(&self, region: &[usize]) -> f64 {
        let mut inside: Vec<usize> = region.iter().copied().filter(|&s| s < self.n).collect();
        inside.sort_unstable();
        inside.dedup();
        if inside.is_empty() || inside.len() == self.n {
            return 0.0;
        }
        let outside: Vec<usize> = (0..self.n).filter(|s| !inside.contains(s)).collect();
        let (da, db) = (1usize << inside.len(), 1usize << outside.len());
        let mut m = DMatrix::<Complex64>::zeros(da, db);
        for (idx, &amp) in self.amps.iter().enumerate() {
            let gather = |sites: &[usize]| {
                sites
                    .iter()
                    .fold(0usize, |acc, &s| (acc << 1) | (idx >> (self.n - 1 - s) & 1))
            };
            m[(gather(&inside), gather(&outside))] = amp;
        }
        let rho = &m * m.adjoint();
        let eig = rho.symmetric_eigen();
        eig.eigenvalues
            .iter()
            .filter(|&&l| l > 1e-12)
            .map(|&l| -l * l.log2())
            .sum()
    }
}
