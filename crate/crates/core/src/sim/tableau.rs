//! Stabilizer tableau in the Aaronson-Gottesman (CHP) layout.
//!
//! Rows `0..n` are destabilizers, rows `n..2n` stabilizers, and row `2n` is
//! scratch space for deterministic measurements. Each row stores packed X and
//! Z bits plus a sign bit (`true` = -1).

use rand::Rng;

/// Single-qubit Pauli, used for noise injection and basis bookkeeping.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    /// The three non-identity Paulis in index order 1..=3.
    pub fn from_index(i: usize) -> Pauli {
        match i & 3 {
            0 => Pauli::I,
            1 => Pauli::X,
            2 => Pauli::Y,
            _ => Pauli::Z,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tableau {
    n: usize,
    words: usize,
    xs: Vec<u64>,
    zs: Vec<u64>,
    signs: Vec<bool>,
}

impl Tableau {
    /// `|0...0⟩` on `n` qubits: destabilizer `i` is `X_i`, stabilizer `i` is `Z_i`.
    pub fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        let rows = 2 * n + 1;
        let mut t = Tableau {
            n,
            words,
            xs: vec![0; rows * words],
            zs: vec![0; rows * words],
            signs: vec![false; rows],
        };
        for i in 0..n {
            t.xs[i * words + i / 64] |= 1 << (i % 64);
            t.zs[(i + n) * words + i / 64] |= 1 << (i % 64);
        }
        t
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    fn bit(v: &[u64], words: usize, row: usize, q: usize) -> bool {
        v[row * words + q / 64] >> (q % 64) & 1 == 1
    }

    #[inline]
    fn x(&self, row: usize, q: usize) -> bool {
        Self::bit(&self.xs, self.words, row, q)
    }

    #[inline]
    fn z(&self, row: usize, q: usize) -> bool {
        Self::bit(&self.zs, self.words, row, q)
    }

    pub fn h(&mut self, a: usize) {
        let (w, m) = (a / 64, 1u64 << (a % 64));
        for row in 0..2 * self.n {
            let i = row * self.words + w;
            let (x, z) = (self.xs[i] & m, self.zs[i] & m);
            if x != 0 && z != 0 {
                self.signs[row] ^= true;
            }
            if (x != 0) != (z != 0) {
                self.xs[i] ^= m;
                self.zs[i] ^= m;
            }
        }
    }

    pub fn s(&mut self, a: usize) {
        let (w, m) = (a / 64, 1u64 << (a % 64));
        for row in 0..2 * self.n {
            let i = row * self.words + w;
            let x = self.xs[i] & m;
            if x != 0 {
                if self.zs[i] & m != 0 {
                    self.signs[row] ^= true;
                }
                self.zs[i] ^= m;
            }
        }
    }

    pub fn cx(&mut self, a: usize, b: usize) {
        debug_assert_ne!(a, b);
        let (wa, ma) = (a / 64, 1u64 << (a % 64));
        let (wb, mb) = (b / 64, 1u64 << (b % 64));
        for row in 0..2 * self.n {
            let base = row * self.words;
            let xa = self.xs[base + wa] & ma != 0;
            let za = self.zs[base + wa] & ma != 0;
            let xb = self.xs[base + wb] & mb != 0;
            let zb = self.zs[base + wb] & mb != 0;
            if xa && zb && (xb == za) {
                self.signs[row] ^= true;
            }
            if xa {
                self.xs[base + wb] ^= mb;
            }
            if zb {
                self.zs[base + wa] ^= ma;
            }
        }
    }

    /// Conjugate by a Pauli: flips the sign of every row anticommuting with it.
    pub fn pauli(&mut self, a: usize, p: Pauli) {
        let (w, m) = (a / 64, 1u64 << (a % 64));
        for row in 0..2 * self.n {
            let i = row * self.words + w;
            let x = self.xs[i] & m != 0;
            let z = self.zs[i] & m != 0;
            let anti = match p {
                Pauli::I => false,
                Pauli::X => z,
                Pauli::Z => x,
                Pauli::Y => x ^ z,
            };
            if anti {
                self.signs[row] ^= true;
            }
        }
    }

    pub fn x_gate(&mut self, a: usize) {
        self.pauli(a, Pauli::X);
    }

    pub fn z_gate(&mut self, a: usize) {
        self.pauli(a, Pauli::Z);
    }

    /// Row `h` becomes (row `i`) · (row `h`), tracking the phase.
    fn rowsum(&mut self, h: usize, i: usize) {
        let wd = self.words;
        let mut plus = 0u32;
        let mut minus = 0u32;
        for k in 0..wd {
            let (x1, z1) = (self.xs[i * wd + k], self.zs[i * wd + k]);
            let (x2, z2) = (self.xs[h * wd + k], self.zs[h * wd + k]);
            let (px1, py1, pz1) = (x1 & !z1, x1 & z1, !x1 & z1);
            let (px2, py2, pz2) = (x2 & !z2, x2 & z2, !x2 & z2);
            plus += ((px1 & py2) | (py1 & pz2) | (pz1 & px2)).count_ones();
            minus += ((px1 & pz2) | (py1 & px2) | (pz1 & py2)).count_ones();
            self.xs[h * wd + k] = x1 ^ x2;
            self.zs[h * wd + k] = z1 ^ z2;
        }
        let exponent = 2 * u32::from(self.signs[i]) + 2 * u32::from(self.signs[h]) + plus + 4 * wd as u32 * 64 - minus;
        self.signs[h] = exponent % 4 >= 2;
    }

    fn copy_row(&mut self, dst: usize, src: usize) {
        let wd = self.words;
        self.xs.copy_within(src * wd..(src + 1) * wd, dst * wd);
        self.zs.copy_within(src * wd..(src + 1) * wd, dst * wd);
        self.signs[dst] = self.signs[src];
    }

    fn clear_row(&mut self, row: usize) {
        let wd = self.words;
        self.xs[row * wd..(row + 1) * wd].fill(0);
        self.zs[row * wd..(row + 1) * wd].fill(0);
        self.signs[row] = false;
    }

    /// Outcome of a Z measurement on `a` when it is determined by the state.
    pub fn deterministic_outcome(&mut self, a: usize) -> Option<bool> {
        let n = self.n;
        if (n..2 * n).any(|p| self.x(p, a)) {
            return None;
        }
        let scratch = 2 * n;
        self.clear_row(scratch);
        for i in 0..n {
            if self.x(i, a) {
                self.rowsum(scratch, i + n);
            }
        }
        let outcome = self.signs[scratch];
        self.clear_row(scratch);
        Some(outcome)
    }

    /// Measure `a` in the Z basis. Random outcomes draw one bit from `rng`;
    /// determined outcomes neither consume randomness nor change the state.
    pub fn measure<R: Rng + ?Sized>(&mut self, a: usize, rng: &mut R) -> bool {
        self.measure_with(a, || rng.random::<bool>())
    }

    /// Measure with a caller-chosen outcome; `choose` only runs when the
    /// outcome is random.
    pub fn measure_with(&mut self, a: usize, choose: impl FnOnce() -> bool) -> bool {
        let n = self.n;
        let Some(p) = (n..2 * n).find(|&p| self.x(p, a)) else {
            return self.deterministic_outcome(a).expect("no stabilizer has X on a");
        };
        for i in 0..2 * n {
            if i != p && self.x(i, a) {
                self.rowsum(i, p);
            }
        }
        self.copy_row(p - n, p);
        self.clear_row(p);
        let outcome = choose();
        self.zs[p * self.words + a / 64] |= 1 << (a % 64);
        self.signs[p] = outcome;
        outcome
    }

    /// Whether the outcome of measuring `a` would be random.
    pub fn is_random(&self, a: usize) -> bool {
        (self.n..2 * self.n).any(|p| self.x(p, a))
    }

    /// Measure then flip back to `|0⟩` using the true outcome.
    pub fn reset<R: Rng + ?Sized>(&mut self, a: usize, rng: &mut R) -> bool {
        let v = self.measure(a, rng);
        if v {
            self.x_gate(a);
        }
        v
    }

    /// Symplectic invariant: stabilizers commute pairwise, destabilizers
    /// commute pairwise, destabilizer `i` anticommutes exactly with
    /// stabilizer `i`.
    pub fn check_invariants(&self) -> Result<(), String> {
        let n = self.n;
        let wd = self.words;
        let anti = |r: usize, s: usize| {
            let mut acc = 0u32;
            for k in 0..wd {
                acc += ((self.xs[r * wd + k] & self.zs[s * wd + k]) ^ (self.zs[r * wd + k] & self.xs[s * wd + k])).count_ones();
            }
            acc % 2 == 1
        };
        for r in 0..2 * n {
            for s in r + 1..2 * n {
                let expected = r < n && s == r + n;
                if anti(r, s) != expected {
                    return Err(format!("rows {r} and {s}: anticommute={} expected {expected}", !expected));
                }
            }
        }
        Ok(())
    }

    /// Expectation of a Pauli string given as per-qubit `(x, z)` bits with
    /// overall sign: `+1`, `-1`, or `0` when it is not in the stabilizer group
    /// up to sign.
    pub fn pauli_expectation(&self, x: &[bool], z: &[bool], negative: bool) -> i32 {
        let n = self.n;
        // anticommutes with some stabilizer -> expectation 0
        for s in n..2 * n {
            let mut parity = false;
            for q in 0..n {
                parity ^= (x[q] && self.z(s, q)) ^ (z[q] && self.x(s, q));
            }
            if parity {
                return 0;
            }
        }
        // product of stabilizers whose destabilizer anticommutes with the string
        let mut t = self.clone();
        let scratch = 2 * n;
        t.clear_row(scratch);
        for i in 0..n {
            let mut parity = false;
            for q in 0..n {
                parity ^= (x[q] && t.z(i, q)) ^ (z[q] && t.x(i, q));
            }
            if parity {
                t.rowsum(scratch, i + n);
            }
        }
        debug_assert!((0..n).all(|q| t.x(scratch, q) == x[q] && t.z(scratch, q) == z[q]));
        if t.signs[scratch] == negative {
            1
        } else {
            -1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;

    #[test]
    fn fresh_state_measures_zero() {
        let mut t = Tableau::new(3);
        let mut rng = seed::rng(0);
        for q in 0..3 {
            assert_eq!(t.deterministic_outcome(q), Some(false));
            assert!(!t.measure(q, &mut rng));
        }
        t.check_invariants().unwrap();
    }

    #[test]
    fn x_flips_deterministically() {
        let mut t = Tableau::new(1);
        t.x_gate(0);
        assert_eq!(t.deterministic_outcome(0), Some(true));
    }

    #[test]
    fn hadamard_is_fair() {
        let mut ones = 0;
        for s in 0..4000 {
            let mut t = Tableau::new(1);
            t.h(0);
            ones += usize::from(t.measure(0, &mut seed::rng(s)));
        }
        assert!((ones as f64 / 4000.0 - 0.5).abs() < 0.03, "{ones}");
    }

    #[test]
    fn cx_on_zero_state_stays_zero() {
        let mut t = Tableau::new(2);
        t.cx(0, 1);
        assert_eq!(t.deterministic_outcome(0), Some(false));
        assert_eq!(t.deterministic_outcome(1), Some(false));
    }

    #[test]
    fn bell_and_ghz_correlations() {
        for s in 0..50 {
            let mut rng = seed::rng(s);
            let mut t = Tableau::new(3);
            t.h(0);
            t.cx(0, 1);
            t.cx(1, 2);
            t.check_invariants().unwrap();
            let a = t.measure(0, &mut rng);
            let b = t.measure(1, &mut rng);
            let c = t.measure(2, &mut rng);
            assert!(a == b && b == c);
            t.check_invariants().unwrap();
        }
    }

    #[test]
    fn deterministic_measurement_leaves_state_alone() {
        let mut t = Tableau::new(2);
        t.h(0);
        t.cx(0, 1);
        let mut rng = seed::rng(1);
        let first = t.measure(0, &mut rng);
        let snapshot = t.clone();
        assert!(!t.is_random(1));
        assert_eq!(t.measure_with(1, || panic!("must not draw")), first);
        assert_eq!(t, snapshot);
    }

    #[test]
    fn pauli_expectations_of_ghz() {
        let mut t = Tableau::new(2);
        t.h(0);
        t.cx(0, 1);
        // XX = +1, ZZ = +1, YY = -1, ZI = 0
        assert_eq!(t.pauli_expectation(&[true, true], &[false, false], false), 1);
        assert_eq!(t.pauli_expectation(&[false, false], &[true, true], false), 1);
        assert_eq!(t.pauli_expectation(&[true, true], &[true, true], false), -1);
        assert_eq!(t.pauli_expectation(&[true, true], &[true, true], true), 1);
        assert_eq!(t.pauli_expectation(&[false, false], &[true, false], false), 0);
    }

    #[test]
    fn s_gate_phases() {
        // S H |0> = |+i>, Y eigenstate with +1
        let mut t = Tableau::new(1);
        t.h(0);
        t.s(0);
        assert_eq!(t.pauli_expectation(&[true], &[true], false), 1);
        t.s(0);
        // S^2 = Z takes |+> to |->
        assert_eq!(t.pauli_expectation(&[true], &[false], false), -1);
    }
}
