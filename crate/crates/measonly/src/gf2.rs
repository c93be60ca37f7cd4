//! Dense GF(2) matrices packed 64 columns per word; rank by Gaussian
//! elimination. Small and allocation-friendly: entanglement queries build a
//! fresh matrix per call.

#[derive(Clone)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = cols.div_ceil(64).max(1);
        BitMatrix { rows, cols, stride, data: vec![0; rows * stride] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        debug_assert!(r < self.rows && c < self.cols);
        let w = r * self.stride + c / 64;
        let b = c % 64;
        self.data[w] = self.data[w] & !(1 << b) | (v as u64) << b;
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        self.data[r * self.stride + c / 64] >> (c % 64) & 1 == 1
    }

    fn row_is_zero(&self, r: usize) -> bool {
        self.data[r * self.stride..(r + 1) * self.stride].iter().all(|&w| w == 0)
    }

    /// Rank over GF(2). Consumes the matrix (elimination is in place).
    pub fn rank(mut self) -> usize {
        let mut rank = 0;
        for col in 0..self.cols {
            let (w, b) = (col / 64, col % 64);
            let pivot = (rank..self.rows).find(|&r| self.data[r * self.stride + w] >> b & 1 == 1);
            let Some(pivot) = pivot else { continue };
            if pivot != rank {
                for k in 0..self.stride {
                    self.data.swap(pivot * self.stride + k, rank * self.stride + k);
                }
            }
            for r in rank + 1..self.rows {
                if self.data[r * self.stride + w] >> b & 1 == 1 {
                    for k in 0..self.stride {
                        self.data[r * self.stride + k] ^= self.data[rank * self.stride + k];
                    }
                }
            }
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        // Forward elimination can stop early; any remaining nonzero rows would
        // have been cleared column by column, so rank is final here.
        debug_assert!((rank..self.rows).all(|r| self.row_is_zero(r)) || rank == self.rows);
        rank
    }
}
