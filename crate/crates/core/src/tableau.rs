//! Stabilizer states in the Gottesman-Knill representation.
//!
//! The tableau stores `N` stabilizer generators for an `N`-qubit pure state.
//! Storage is column-major: every qubit owns one packed x-column and one
//! packed z-column whose bit `i` belongs to generator `i`. A CNOT is then a
//! handful of word operations, and a measurement touches only the columns in
//! the support of the pivot generator.
//!
//! SWAP gates never move data. The tableau keeps a site-to-slot permutation
//! and a SWAP only exchanges two entries of it.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::gf2;

/// A Hermitian Pauli string `±P` on `N` qubits.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliRow {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    negative: bool,
}

impl PauliRow {
    pub fn identity(n: usize) -> Self {
        let w = gf2::words_for(n);
        PauliRow {
            n,
            x: vec![0; w],
            z: vec![0; w],
            negative: false,
        }
    }

    /// `X_a X_b` with a `+` sign.
    pub fn xx(n: usize, a: usize, b: usize) -> Self {
        let mut p = Self::identity(n);
        p.set_x(a, true);
        p.set_x(b, true);
        p
    }

    /// `Z_a Z_b` with a `+` sign.
    pub fn zz(n: usize, a: usize, b: usize) -> Self {
        let mut p = Self::identity(n);
        p.set_z(a, true);
        p.set_z(b, true);
        p
    }

    pub fn single_z(n: usize, a: usize) -> Self {
        let mut p = Self::identity(n);
        p.set_z(a, true);
        p
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn x(&self, site: usize) -> bool {
        gf2::get_bit(&self.x, site)
    }

    pub fn z(&self, site: usize) -> bool {
        gf2::get_bit(&self.z, site)
    }

    pub fn set_x(&mut self, site: usize, v: bool) {
        gf2::set_bit(&mut self.x, site, v);
    }

    pub fn set_z(&mut self, site: usize, v: bool) {
        gf2::set_bit(&mut self.z, site, v);
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    pub fn set_negative(&mut self, negative: bool) {
        self.negative = negative;
    }

    /// `+1` or `-1`.
    pub fn sign(&self) -> i8 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    pub fn is_identity(&self) -> bool {
        gf2::is_zero(&self.x) && gf2::is_zero(&self.z)
    }

    pub fn weight(&self) -> usize {
        (0..self.n).filter(|&j| self.x(j) || self.z(j)).count()
    }

    /// Symplectic inner product: `true` when the two strings anticommute.
    pub fn anticommutes(&self, other: &PauliRow) -> bool {
        let mut acc = 0u32;
        for k in 0..self.x.len() {
            acc ^= ((self.x[k] & other.z[k]) ^ (self.z[k] & other.x[k])).count_ones() & 1;
        }
        acc == 1
    }

    /// Same Pauli letters, ignoring sign.
    pub fn same_letters(&self, other: &PauliRow) -> bool {
        self.n == other.n && self.x == other.x && self.z == other.z
    }

    /// Letters without the sign, e.g. `XZI`.
    pub fn letters(&self) -> String {
        (0..self.n)
            .map(|j| match (self.x(j), self.z(j)) {
                (false, false) => 'I',
                (true, false) => 'X',
                (false, true) => 'Z',
                (true, true) => 'Y',
            })
            .collect()
    }

    /// Multiply `self` on the left by `other` (`self <- other * self`).
    ///
    /// Both strings must commute so the product stays Hermitian.
    pub(crate) fn left_mul(&mut self, other: &PauliRow) {
        debug_assert!(!self.anticommutes(other));
        let mut exponent: i32 = 0;
        for j in 0..self.n {
            exponent += phase_exponent(other.x(j), other.z(j), self.x(j), self.z(j));
        }
        let total = exponent.rem_euclid(4);
        debug_assert!(total % 2 == 0);
        self.negative ^= other.negative ^ (total == 2);
        gf2::xor_into(&mut self.x, &other.x);
        gf2::xor_into(&mut self.z, &other.z);
    }
}

/// Power of `i` picked up when multiplying single-qubit Paulis `(x1,z1)·(x2,z2)`.
fn phase_exponent(x1: bool, z1: bool, x2: bool, z2: bool) -> i32 {
    let (x2, z2) = (x2 as i32, z2 as i32);
    match (x1, z1) {
        (false, false) => 0,
        (true, true) => z2 - x2,
        (true, false) => z2 * (2 * x2 - 1),
        (false, true) => x2 * (1 - 2 * z2),
    }
}

impl fmt::Display for PauliRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.negative { '-' } else { '+' };
        write!(f, "{s}{}", self.letters())
    }
}

impl FromStr for PauliRow {
    type Err = Error;

    /// Parses strings like `+XZI`, `-YY` or `XX` (site 0 first).
    fn from_str(s: &str) -> Result<Self> {
        let (negative, body) = match s.as_bytes().first() {
            Some(b'+') => (false, &s[1..]),
            Some(b'-') => (true, &s[1..]),
            _ => (false, s),
        };
        if body.is_empty() {
            return Err(Error::invalid("empty Pauli string"));
        }
        let mut p = PauliRow::identity(body.chars().count());
        p.negative = negative;
        for (j, c) in body.chars().enumerate() {
            match c {
                'I' | '_' | '.' => {}
                'X' => p.set_x(j, true),
                'Z' => p.set_z(j, true),
                'Y' => {
                    p.set_x(j, true);
                    p.set_z(j, true);
                }
                other => return Err(Error::invalid(format!("bad Pauli letter {other:?}"))),
            }
        }
        Ok(p)
    }
}

/// Result of a projective Pauli measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Outcome {
    /// Eigenvalue, `+1` or `-1`.
    pub value: i8,
    /// `false` when the state already fixed the outcome.
    pub random: bool,
}

/// Stabilizer state of `N` qubits.
#[derive(Clone, Debug)]
pub struct StabilizerTableau {
    n: usize,
    words: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    signs: Vec<u64>,
    slot_of_site: Vec<usize>,
}

impl PartialEq for StabilizerTableau {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.rows() == other.rows()
    }
}

impl Eq for StabilizerTableau {}

impl StabilizerTableau {
    fn empty(n: usize) -> Self {
        let words = gf2::words_for(n);
        StabilizerTableau {
            n,
            words,
            x: vec![0; n * words],
            z: vec![0; n * words],
            signs: vec![0; words],
            slot_of_site: (0..n).collect(),
        }
    }

    /// Nearest-neighbour Bell pairs on bonds `(0,1), (2,3), ...`.
    ///
    /// Generator `2k` is `X_{2k} X_{2k+1}` and generator `2k+1` is `Z_{2k} Z_{2k+1}`.
    pub fn init_bell_pairs(n_qubits: usize) -> Result<Self> {
        if n_qubits < 2 || n_qubits % 2 != 0 {
            return Err(Error::invalid(format!(
                "Bell-pair initialization needs an even qubit count >= 2, got {n_qubits}"
            )));
        }
        let mut t = Self::empty(n_qubits);
        for k in 0..n_qubits / 2 {
            let (a, b) = (2 * k, 2 * k + 1);
            t.set_x_bit(a, 2 * k, true);
            t.set_x_bit(b, 2 * k, true);
            t.set_z_bit(a, 2 * k + 1, true);
            t.set_z_bit(b, 2 * k + 1, true);
        }
        t.debug_check();
        Ok(t)
    }

    /// The all-zeros computational basis state, generators `Z_i`.
    pub fn init_product_state(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::invalid("product state needs at least one qubit"));
        }
        let mut t = Self::empty(n_qubits);
        for i in 0..n_qubits {
            t.set_z_bit(i, i, true);
        }
        Ok(t)
    }

    /// Builds a tableau from explicit generators, validating all invariants.
    pub fn from_rows(rows: &[PauliRow]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::invalid("no generators"));
        }
        if rows.iter().any(|r| r.n_qubits() != n) {
            return Err(Error::invalid("generator length must equal generator count"));
        }
        let mut t = Self::empty(n);
        for (i, r) in rows.iter().enumerate() {
            for site in 0..n {
                t.set_x_bit(site, i, r.x(site));
                t.set_z_bit(site, i, r.z(site));
            }
            gf2::set_bit(&mut t.signs, i, r.is_negative());
        }
        t.check_invariants().map_err(Error::InvalidArgument)?;
        Ok(t)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    fn xcol(&self, slot: usize) -> &[u64] {
        &self.x[slot * self.words..(slot + 1) * self.words]
    }

    #[inline]
    fn zcol(&self, slot: usize) -> &[u64] {
        &self.z[slot * self.words..(slot + 1) * self.words]
    }

    fn set_x_bit(&mut self, site: usize, row: usize, v: bool) {
        let slot = self.slot_of_site[site];
        let w = self.words;
        gf2::set_bit(&mut self.x[slot * w..(slot + 1) * w], row, v);
    }

    fn set_z_bit(&mut self, site: usize, row: usize, v: bool) {
        let slot = self.slot_of_site[site];
        let w = self.words;
        gf2::set_bit(&mut self.z[slot * w..(slot + 1) * w], row, v);
    }

    /// Generator `i` in site order.
    pub fn row(&self, i: usize) -> PauliRow {
        let mut p = PauliRow::identity(self.n);
        for site in 0..self.n {
            let slot = self.slot_of_site[site];
            p.set_x(site, gf2::get_bit(self.xcol(slot), i));
            p.set_z(site, gf2::get_bit(self.zcol(slot), i));
        }
        p.negative = gf2::get_bit(&self.signs, i);
        p
    }

    pub fn rows(&self) -> Vec<PauliRow> {
        (0..self.n).map(|i| self.row(i)).collect()
    }

    fn check_site(&self, site: usize) -> Result<()> {
        if site >= self.n {
            return Err(Error::invalid(format!(
                "site {site} out of range for {} qubits",
                self.n
            )));
        }
        Ok(())
    }

    fn check_pair(&self, a: usize, b: usize) -> Result<()> {
        self.check_site(a)?;
        self.check_site(b)?;
        if a == b {
            return Err(Error::invalid(format!("two-site operation on a single site {a}")));
        }
        Ok(())
    }

    /// Conjugates every generator by `CNOT(control -> target)`.
    pub fn apply_cnot(&mut self, control: usize, target: usize) -> Result<()> {
        self.check_pair(control, target)?;
        let (c, t) = (self.slot_of_site[control], self.slot_of_site[target]);
        let w = self.words;
        for k in 0..w {
            let xc = self.x[c * w + k];
            let zc = self.z[c * w + k];
            let xt = self.x[t * w + k];
            let zt = self.z[t * w + k];
            self.signs[k] ^= xc & zt & !(xt ^ zc);
            self.x[t * w + k] = xt ^ xc;
            self.z[c * w + k] = zc ^ zt;
        }
        self.debug_check();
        Ok(())
    }

    /// Exchanges sites `a` and `b`.
    pub fn apply_swap(&mut self, a: usize, b: usize) -> Result<()> {
        self.check_pair(a, b)?;
        self.slot_of_site.swap(a, b);
        Ok(())
    }

    /// Mask of generators anticommuting with `op`.
    fn anticommuting_mask(&self, op: &PauliRow) -> Vec<u64> {
        let mut mask = vec![0u64; self.words];
        for site in 0..self.n {
            let slot = self.slot_of_site[site];
            if op.z(site) {
                gf2::xor_into(&mut mask, self.xcol(slot));
            }
            if op.x(site) {
                gf2::xor_into(&mut mask, self.zcol(slot));
            }
        }
        mask
    }

    fn check_op(&self, op: &PauliRow) -> Result<()> {
        if op.n_qubits() != self.n {
            return Err(Error::invalid(format!(
                "Pauli string on {} qubits measured on a {}-qubit state",
                op.n_qubits(),
                self.n
            )));
        }
        if op.is_identity() {
            return Err(Error::invalid("cannot measure the identity"));
        }
        Ok(())
    }

    /// Projective measurement of `op`, with the outcome resolved in every case.
    ///
    /// When the outcome is random, the lowest-index anticommuting generator is
    /// the pivot: it multiplies every other anticommuting generator and is then
    /// replaced by `±op`. A determined outcome is read off by expressing `op`
    /// in terms of the generators.
    pub fn measure_pauli<R: Rng + ?Sized>(&mut self, op: &PauliRow, rng: &mut R) -> Result<Outcome> {
        self.check_op(op)?;
        let mask = self.anticommuting_mask(op);
        if gf2::is_zero(&mask) {
            let value = self.determined_value(op);
            return Ok(Outcome {
                value,
                random: false,
            });
        }
        let value = self.collapse(op, mask, rng);
        Ok(Outcome {
            value,
            random: true,
        })
    }

    /// Like [`measure_pauli`](Self::measure_pauli) but skips resolving a
    /// determined outcome. Returns `None` when the state is left unchanged.
    pub fn project_pauli<R: Rng + ?Sized>(&mut self, op: &PauliRow, rng: &mut R) -> Result<Option<i8>> {
        self.check_op(op)?;
        let mask = self.anticommuting_mask(op);
        if gf2::is_zero(&mask) {
            return Ok(None);
        }
        Ok(Some(self.collapse(op, mask, rng)))
    }

    fn collapse<R: Rng + ?Sized>(&mut self, op: &PauliRow, mut mask: Vec<u64>, rng: &mut R) -> i8 {
        let w = self.words;
        let pivot = gf2::lowest_set(&mask).expect("non-empty mask");
        gf2::set_bit(&mut mask, pivot, false);
        if !gf2::is_zero(&mask) {
            // mod-4 counters of the i-exponent, bit-sliced over generators
            let mut lo = vec![0u64; w];
            let mut hi = vec![0u64; w];
            let (pw, pb) = (pivot >> 6, pivot & 63);
            for slot in 0..self.n {
                let xr = (self.x[slot * w + pw] >> pb) & 1 == 1;
                let zr = (self.z[slot * w + pw] >> pb) & 1 == 1;
                if !xr && !zr {
                    continue;
                }
                for k in 0..w {
                    let m = mask[k];
                    if m == 0 {
                        continue;
                    }
                    let x2 = self.x[slot * w + k];
                    let z2 = self.z[slot * w + k];
                    let (plus, minus) = match (xr, zr) {
                        (true, true) => (z2 & !x2, x2 & !z2),
                        (true, false) => (x2 & z2, z2 & !x2),
                        _ => (x2 & !z2, x2 & z2),
                    };
                    let (plus, minus) = (plus & m, minus & m);
                    let carry = lo[k] & plus;
                    lo[k] ^= plus;
                    hi[k] ^= carry;
                    let borrow = !lo[k] & minus;
                    lo[k] ^= minus;
                    hi[k] ^= borrow;
                    if xr {
                        self.x[slot * w + k] = x2 ^ m;
                    }
                    if zr {
                        self.z[slot * w + k] = z2 ^ m;
                    }
                }
            }
            let pivot_sign = if gf2::get_bit(&self.signs, pivot) { !0u64 } else { 0 };
            for k in 0..w {
                debug_assert_eq!(lo[k] & mask[k], 0, "product of commuting generators must be Hermitian");
                self.signs[k] ^= mask[k] & (hi[k] ^ pivot_sign);
            }
        }
        // replace the pivot by the measured operator
        let (pw, bit) = (pivot >> 6, 1u64 << (pivot & 63));
        for slot in 0..self.n {
            self.x[slot * w + pw] &= !bit;
            self.z[slot * w + pw] &= !bit;
        }
        for site in 0..self.n {
            if op.x(site) {
                self.set_x_bit(site, pivot, true);
            }
            if op.z(site) {
                self.set_z_bit(site, pivot, true);
            }
        }
        let minus: bool = rng.gen();
        gf2::set_bit(&mut self.signs, pivot, minus ^ op.is_negative());
        self.debug_check();
        if minus {
            -1
        } else {
            1
        }
    }

    /// Eigenvalue of `op` on a state where it is already determined.
    fn determined_value(&self, op: &PauliRow) -> i8 {
        // Solve sum_i c_i g_i = op over GF(2), tracking combinations.
        let n = self.n;
        let rows = self.rows();
        let mut vecs: Vec<(Vec<u64>, Vec<u64>)> = rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut v = r.x.clone();
                v.extend_from_slice(&r.z);
                let mut comb = vec![0u64; gf2::words_for(n)];
                gf2::set_bit(&mut comb, i, true);
                (v, comb)
            })
            .collect();
        let mut target = op.x.clone();
        target.extend_from_slice(&op.z);
        let mut used = vec![0u64; gf2::words_for(n)];
        for i in 0..vecs.len() {
            let Some(p) = gf2::lowest_set(&vecs[i].0) else {
                continue;
            };
            let (head, tail) = vecs.split_at_mut(i + 1);
            let (pv, pc) = &head[i];
            for (v, c) in tail.iter_mut() {
                if gf2::get_bit(v, p) {
                    gf2::xor_into(v, pv);
                    gf2::xor_into(c, pc);
                }
            }
            if gf2::get_bit(&target, p) {
                gf2::xor_into(&mut target, pv);
                gf2::xor_into(&mut used, pc);
            }
        }
        debug_assert!(gf2::is_zero(&target), "commuting Pauli must lie in the stabilizer group");
        let mut acc = PauliRow::identity(n);
        for (i, r) in rows.iter().enumerate() {
            if gf2::get_bit(&used, i) {
                acc.left_mul(r);
            }
        }
        debug_assert!(acc.same_letters(op));
        if acc.is_negative() ^ op.is_negative() {
            -1
        } else {
            1
        }
    }

    /// Bell-basis measurement of `(a, b)`: `X_a X_b` followed by `Z_a Z_b`.
    pub fn measure_bell_pair<R: Rng + ?Sized>(&mut self, a: usize, b: usize, rng: &mut R) -> Result<()> {
        self.check_pair(a, b)?;
        self.project_pauli(&PauliRow::xx(self.n, a, b), rng)?;
        self.project_pauli(&PauliRow::zz(self.n, a, b), rng)?;
        Ok(())
    }

    /// Von Neumann entropy (bits) of `region`: rank of the generators
    /// restricted to the region minus its size.
    pub fn entanglement_entropy(&self, region: &[usize]) -> usize {
        let mut sites: Vec<usize> = region.iter().copied().filter(|&s| s < self.n).collect();
        sites.sort_unstable();
        sites.dedup();
        if sites.is_empty() {
            return 0;
        }
        let mut cols: Vec<Vec<u64>> = Vec::with_capacity(2 * sites.len());
        for &s in &sites {
            let slot = self.slot_of_site[s];
            cols.push(self.xcol(slot).to_vec());
            cols.push(self.zcol(slot).to_vec());
        }
        gf2::rank(cols) - sites.len()
    }

    /// `S_A + S_C - S_B` for the three contiguous thirds of the chain.
    pub fn mutual_information_i2(&self) -> Result<i64> {
        if self.n % 3 != 0 {
            return Err(Error::invalid(format!(
                "I2 needs a qubit count divisible by 3, got {}",
                self.n
            )));
        }
        let third = self.n / 3;
        let a: Vec<usize> = (0..third).collect();
        let b: Vec<usize> = (third..2 * third).collect();
        let c: Vec<usize> = (2 * third..self.n).collect();
        let sa = self.entanglement_entropy(&a) as i64;
        let sb = self.entanglement_entropy(&b) as i64;
        let sc = self.entanglement_entropy(&c) as i64;
        Ok(sa + sc - sb)
    }

    /// Checks row count, pairwise commutation and full rank.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let rows = self.rows();
        if rows.len() != self.n {
            return Err(format!("{} generators for {} qubits", rows.len(), self.n));
        }
        for i in 0..rows.len() {
            for j in i + 1..rows.len() {
                if rows[i].anticommutes(&rows[j]) {
                    return Err(format!("generators {i} and {j} anticommute"));
                }
            }
        }
        let vecs: Vec<Vec<u64>> = rows
            .iter()
            .map(|r| {
                let mut v = r.x.clone();
                v.extend_from_slice(&r.z);
                v
            })
            .collect();
        let rank = gf2::rank(vecs);
        if rank != self.n {
            return Err(format!("generator rank {rank} != {}", self.n));
        }
        Ok(())
    }

    #[inline]
    fn debug_check(&self) {
        // O(N^3) check, limited to small registers
        #[cfg(debug_assertions)]
        if self.n <= 12 {
            if let Err(e) = self.check_invariants() {
                panic!("tableau invariant violated: {e}");
            }
        }
    }
}

impl fmt::Display for StabilizerTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            writeln!(f, "{}", self.row(i))?;
        }
        Ok(())
    }
}
