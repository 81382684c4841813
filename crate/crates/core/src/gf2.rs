//! Dense GF(2) vectors and matrices packed into `u64` words.
//!
//! This is the little linear algebra the code constructions need: row
//! reduction with a caller-chosen column order, rank, and nullspace
//! computation. Everything is row-major; unused high bits of the last
//! word are kept zero so that word-wise operations stay exact.

/// A fixed-length bit vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    /// The all-zero vector of `len` bits.
    pub fn zeros(len: usize) -> Self {
        BitVector {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    /// Builds a vector by evaluating `f` at every position.
    pub fn from_fn(len: usize, mut f: impl FnMut(usize) -> bool) -> Self {
        let mut v = BitVector::zeros(len);
        for i in 0..len {
            if f(i) {
                v.set(i, true);
            }
        }
        v
    }

    /// Builds a vector from 0/1 bits.
    pub fn from_bits(bits: &[u8]) -> Self {
        BitVector::from_fn(bits.len(), |i| bits[i] != 0)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    /// In-place XOR (vector addition over GF(2)).
    pub fn xor_assign(&mut self, other: &BitVector) {
        assert_eq!(self.len, other.len, "bit vector length mismatch");
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w ^= o;
        }
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Weight of the component-wise product `self * other`.
    pub fn and_weight(&self, other: &BitVector) -> usize {
        assert_eq!(self.len, other.len, "bit vector length mismatch");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// Weight of the component-wise triple product `self * b * c`.
    pub fn and3_weight(&self, b: &BitVector, c: &BitVector) -> usize {
        assert_eq!(self.len, b.len, "bit vector length mismatch");
        assert_eq!(self.len, c.len, "bit vector length mismatch");
        self.words
            .iter()
            .zip(&b.words)
            .zip(&c.words)
            .map(|((x, y), z)| (x & y & z).count_ones() as usize)
            .sum()
    }

    /// Parity of `<self, other>` (GF(2) inner product).
    pub fn dot(&self, other: &BitVector) -> bool {
        self.and_weight(other) % 2 == 1
    }

    /// Positions of the set bits, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.len).filter(|&i| self.get(i)).collect()
    }

    /// Row bits packed little-endian, `ceil(len/8)` bytes.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.len.div_ceil(8)];
        for i in 0..self.len {
            if self.get(i) {
                out[i / 8] |= 1 << (i % 8);
            }
        }
        out
    }

    /// Inverse of [`BitVector::to_bytes`].
    pub fn from_bytes(len: usize, bytes: &[u8]) -> Option<Self> {
        if bytes.len() != len.div_ceil(8) {
            return None;
        }
        // Reject stray bits beyond `len` so round-trips are exact.
        if len % 8 != 0 && bytes[len / 8] >> (len % 8) != 0 {
            return None;
        }
        Some(BitVector::from_fn(len, |i| {
            bytes[i / 8] >> (i % 8) & 1 == 1
        }))
    }
}

impl std::fmt::Debug for BitVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", self.get(i) as u8)?;
        }
        Ok(())
    }
}

/// A dense GF(2) matrix stored as rows of [`BitVector`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<BitVector>,
}

impl BitMatrix {
    /// An empty matrix (zero rows) with a fixed column count.
    pub fn new(cols: usize) -> Self {
        BitMatrix { cols, rows: Vec::new() }
    }

    pub fn from_rows(cols: usize, rows: Vec<BitVector>) -> Self {
        assert!(rows.iter().all(|r| r.len() == cols), "row length mismatch");
        BitMatrix { cols, rows }
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, i: usize) -> &BitVector {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }

    pub fn push_row(&mut self, row: BitVector) {
        assert_eq!(row.len(), self.cols, "row length mismatch");
        self.rows.push(row);
    }

    /// Row reduction with an explicit column order.
    ///
    /// Columns are visited in the order given; each column that contains a
    /// pivot is fully eliminated (above and below), and pivot rows are
    /// swapped into the leading positions in visit order. Returns the list
    /// of `(row, column)` pivots. Passing all columns in ascending order
    /// yields the reduced row echelon form.
    pub fn reduce_ordered(&mut self, col_order: &[usize]) -> Vec<(usize, usize)> {
        let mut pivots = Vec::new();
        let mut next_row = 0;
        for &col in col_order {
            assert!(col < self.cols, "column index out of range");
            let Some(pivot) = (next_row..self.rows.len()).find(|&r| self.rows[r].get(col)) else {
                continue;
            };
            self.rows.swap(next_row, pivot);
            let pivot_row = self.rows[next_row].clone();
            for (r, row) in self.rows.iter_mut().enumerate() {
                if r != next_row && row.get(col) {
                    row.xor_assign(&pivot_row);
                }
            }
            pivots.push((next_row, col));
            next_row += 1;
        }
        pivots
    }

    /// Reduced row echelon form (ascending column order); returns pivots.
    pub fn rref(&mut self) -> Vec<(usize, usize)> {
        let order: Vec<usize> = (0..self.cols).collect();
        self.reduce_ordered(&order)
    }

    /// Rank over GF(2). Does not modify `self`.
    pub fn rank(&self) -> usize {
        let mut work = self.clone();
        work.rref().len()
    }

    /// A basis for the right nullspace `{ x : self · xᵀ = 0 }`, as rows.
    ///
    /// The result has `cols() - rank()` rows over the same column count.
    pub fn nullspace(&self) -> BitMatrix {
        let mut work = self.clone();
        let pivots = work.rref();
        let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
        let is_pivot = {
            let mut v = vec![false; self.cols];
            for &c in &pivot_cols {
                v[c] = true;
            }
            v
        };
        let mut basis = BitMatrix::new(self.cols);
        for free in 0..self.cols {
            if is_pivot[free] {
                continue;
            }
            let mut x = BitVector::zeros(self.cols);
            x.set(free, true);
            // Back-substitute: each pivot variable equals the free column's
            // entry in its reduced row.
            for (&(r, c), _) in pivots.iter().zip(&pivot_cols) {
                if work.rows[r].get(free) {
                    x.set(c, true);
                }
            }
            basis.push_row(x);
        }
        basis
    }

    /// Removes the given columns (must be sorted ascending, deduplicated).
    pub fn drop_columns(&self, cols: &[usize]) -> BitMatrix {
        debug_assert!(cols.windows(2).all(|w| w[0] < w[1]));
        let keep: Vec<usize> = (0..self.cols)
            .filter(|c| cols.binary_search(c).is_err())
            .collect();
        let rows = self
            .rows
            .iter()
            .map(|row| BitVector::from_fn(keep.len(), |j| row.get(keep[j])))
            .collect();
        BitMatrix::from_rows(keep.len(), rows)
    }

    /// Parity product `self · xᵀ` as a bit per row.
    pub fn mul_vector(&self, x: &BitVector) -> BitVector {
        BitVector::from_fn(self.rows.len(), |r| self.rows[r].dot(x))
    }
}
