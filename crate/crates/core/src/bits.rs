//! Bit-packed GF(2) linear algebra: rank and nullspace of 0/1 matrices with
//! rows packed into machine words. Sized for systems like 8188 x 176, which
//! reduce in well under a millisecond.

/// Dense GF(2) matrix, each row packed little-endian into u64 words.
#[derive(Debug, Clone)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64);
        BitMatrix { rows, cols, words, data: vec![0; rows * words] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn set(&mut self, r: usize, c: usize, bit: bool) {
        debug_assert!(r < self.rows && c < self.cols);
        let idx = r * self.words + c / 64;
        let mask = 1u64 << (c % 64);
        if bit {
            self.data[idx] |= mask;
        } else {
            self.data[idx] &= !mask;
        }
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        let idx = r * self.words + c / 64;
        self.data[idx] >> (c % 64) & 1 == 1
    }

    fn xor_rows(&mut self, dst: usize, src: usize) {
        let (d, s) = (dst * self.words, src * self.words);
        for w in 0..self.words {
            let v = self.data[s + w];
            self.data[d + w] ^= v;
        }
    }

    /// Rank by in-place forward elimination.
    pub fn rank(mut self) -> usize {
        let mut rank = 0usize;
        for col in 0..self.cols {
            let word = col / 64;
            let mask = 1u64 << (col % 64);
            let pivot = (rank..self.rows).find(|&r| self.data[r * self.words + word] & mask != 0);
            let Some(pivot) = pivot else { continue };
            if pivot != rank {
                for w in 0..self.words {
                    self.data.swap(rank * self.words + w, pivot * self.words + w);
                }
            }
            for r in rank + 1..self.rows {
                if self.data[r * self.words + word] & mask != 0 {
                    self.xor_rows(r, rank);
                }
            }
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        rank
    }

    /// Basis of the right nullspace {x : A x = 0}, each vector as a bit Vec
    /// of length `cols`. Deterministic: free columns in ascending order.
    pub fn nullspace_basis(mut self) -> Vec<Vec<bool>> {
        let mut pivot_col_of_row: Vec<usize> = Vec::new();
        let mut pivot_cols: Vec<usize> = Vec::new();
        let mut rank = 0usize;
        for col in 0..self.cols {
            let word = col / 64;
            let mask = 1u64 << (col % 64);
            let pivot = (rank..self.rows).find(|&r| self.data[r * self.words + word] & mask != 0);
            let Some(pivot) = pivot else { continue };
            if pivot != rank {
                for w in 0..self.words {
                    self.data.swap(rank * self.words + w, pivot * self.words + w);
                }
            }
            for r in 0..self.rows {
                if r != rank && self.data[r * self.words + word] & mask != 0 {
                    self.xor_rows(r, rank);
                }
            }
            pivot_col_of_row.push(col);
            pivot_cols.push(col);
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        let is_pivot: Vec<bool> = {
            let mut v = vec![false; self.cols];
            for &c in &pivot_cols {
                v[c] = true;
            }
            v
        };
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if is_pivot[free] {
                continue;
            }
            let mut x = vec![false; self.cols];
            x[free] = true;
            for (row, &pc) in pivot_col_of_row.iter().enumerate() {
                if self.get(row, free) {
                    x[pc] = true;
                }
            }
            basis.push(x);
        }
        basis
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_small() {
        let mut m = BitMatrix::zero(3, 3);
        m.set(0, 0, true);
        m.set(1, 1, true);
        m.set(2, 0, true);
        m.set(2, 1, true);
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn rank_identity_wide() {
        let mut m = BitMatrix::zero(4, 130);
        for i in 0..4 {
            m.set(i, 100 + i, true);
        }
        assert_eq!(m.rank(), 4);
    }

    #[test]
    fn nullspace_solves() {
        // x0 + x1 = 0, x1 + x2 = 0 -> nullspace spanned by (1,1,1)
        let mut m = BitMatrix::zero(2, 3);
        m.set(0, 0, true);
        m.set(0, 1, true);
        m.set(1, 1, true);
        m.set(1, 2, true);
        let basis = m.clone().nullspace_basis();
        assert_eq!(basis.len(), 1);
        assert_eq!(basis[0], vec![true, true, true]);
        // verify A x = 0
        for x in basis {
            for r in 0..2 {
                let mut acc = false;
                for c in 0..3 {
                    acc ^= m.get(r, c) && x[c];
                }
                assert!(!acc);
            }
        }
    }

    #[test]
    fn nullspace_dimension_matches_rank() {
        let mut m = BitMatrix::zero(5, 8);
        let mut seed = 12345u64;
        for r in 0..5 {
            for c in 0..8 {
                seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
                m.set(r, c, seed >> 40 & 1 == 1);
            }
        }
        let rank = m.clone().rank();
        let basis = m.nullspace_basis();
        assert_eq!(basis.len(), 8 - rank);
    }
}
