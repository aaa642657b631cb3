//! Sparse linear algebra over GF(2).
//!
//! Chains, boundary maps, kernels and solvability checks all live here.
//! Vectors are sparse sorted index sets; elimination uses dense bit rows
//! internally. All pivoting is deterministic (lowest column index first) so
//! that solutions and kernel bases are reproducible across runs.

use std::fmt;

/// Sparse GF(2) vector: a strictly increasing set of set-bit indices together
/// with the dimension of the ambient space.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVec {
    len: usize,
    support: Vec<u32>,
}

impl BitVec {
    /// Zero vector of the given length.
    pub fn zeros(len: usize) -> Self {
        BitVec { len, support: Vec::new() }
    }

    /// Vector with exactly one bit set.
    pub fn singleton(len: usize, idx: usize) -> Self {
        assert!(idx < len, "singleton index {idx} out of range (len={len})");
        BitVec { len, support: vec![idx as u32] }
    }

    /// Builds a vector from an iterator of indices; duplicates cancel (XOR).
    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut v = BitVec::zeros(len);
        for i in indices {
            v.flip(i);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    /// Number of set bits.
    pub fn weight(&self) -> usize {
        self.support.len()
    }

    pub fn get(&self, idx: usize) -> bool {
        assert!(idx < self.len, "index {idx} out of range (len={})", self.len);
        self.support.binary_search(&(idx as u32)).is_ok()
    }

    /// XORs bit `idx` into the vector.
    pub fn flip(&mut self, idx: usize) {
        assert!(idx < self.len, "index {idx} out of range (len={})", self.len);
        match self.support.binary_search(&(idx as u32)) {
            Ok(pos) => {
                self.support.remove(pos);
            }
            Err(pos) => self.support.insert(pos, idx as u32),
        }
    }

    pub fn set(&mut self, idx: usize, value: bool) {
        if self.get(idx) != value {
            self.flip(idx);
        }
    }

    /// Set-bit indices in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.support.iter().map(|&i| i as usize)
    }

    /// Lowest set bit, if any.
    pub fn leading(&self) -> Option<usize> {
        self.support.first().map(|&i| i as usize)
    }

    /// XOR (addition in GF(2)); lengths must agree.
    pub fn xor(&self, other: &BitVec) -> BitVec {
        assert_eq!(self.len, other.len, "xor: length mismatch");
        let mut support = Vec::with_capacity(self.support.len() + other.support.len());
        let (mut a, mut b) = (0, 0);
        while a < self.support.len() && b < other.support.len() {
            match self.support[a].cmp(&other.support[b]) {
                std::cmp::Ordering::Less => {
                    support.push(self.support[a]);
                    a += 1;
                }
                std::cmp::Ordering::Greater => {
                    support.push(other.support[b]);
                    b += 1;
                }
                std::cmp::Ordering::Equal => {
                    a += 1;
                    b += 1;
                }
            }
        }
        support.extend_from_slice(&self.support[a..]);
        support.extend_from_slice(&other.support[b..]);
        BitVec { len: self.len, support }
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        *self = self.xor(other);
    }

    /// Mod-2 inner product.
    pub fn dot(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len, "dot: length mismatch");
        let (mut a, mut b) = (0, 0);
        let mut parity = false;
        while a < self.support.len() && b < other.support.len() {
            match self.support[a].cmp(&other.support[b]) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => {
                    parity = !parity;
                    a += 1;
                    b += 1;
                }
            }
        }
        parity
    }

    fn to_dense(&self) -> DenseRow {
        let mut row = DenseRow::zeros(self.len);
        for &i in &self.support {
            row.flip(i as usize);
        }
        row
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec(len={}, {:?})", self.len, self.support)
    }
}

/// Dense bit row used internally during elimination.
#[derive(Clone)]
struct DenseRow {
    len: usize,
    words: Vec<u64>,
}

impl DenseRow {
    fn zeros(len: usize) -> Self {
        DenseRow { len, words: vec![0; len.div_ceil(64)] }
    }

    fn get(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1 << (i % 64);
    }

    fn xor_assign(&mut self, other: &DenseRow) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    fn lowest_set(&self) -> Option<usize> {
        for (w, &word) in self.words.iter().enumerate() {
            if word != 0 {
                return Some(w * 64 + word.trailing_zeros() as usize);
            }
        }
        None
    }

    fn to_sparse(&self) -> BitVec {
        let mut support = Vec::new();
        for (w, &word) in self.words.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                support.push((w * 64 + bits.trailing_zeros() as usize) as u32);
                bits &= bits - 1;
            }
        }
        BitVec { len: self.len, support }
    }
}

/// Sparse row-major GF(2) matrix. Row supports are strictly increasing and
/// duplicate entries are XOR-normalized away at construction.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    row_support: Vec<Vec<u32>>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BitMatrix { rows, cols, row_support: vec![Vec::new(); rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMatrix::zeros(n, n);
        for i in 0..n {
            m.row_support[i].push(i as u32);
        }
        m
    }

    /// Builds a matrix from `(row, col)` entries; repeated entries cancel.
    pub fn from_entries(
        rows: usize,
        cols: usize,
        entries: impl IntoIterator<Item = (usize, usize)>,
    ) -> Self {
        let mut m = BitMatrix::zeros(rows, cols);
        for (r, c) in entries {
            m.flip(r, c);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of range");
        self.row_support[r].binary_search(&(c as u32)).is_ok()
    }

    /// XORs entry `(r, c)`.
    pub fn flip(&mut self, r: usize, c: usize) {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of range");
        match self.row_support[r].binary_search(&(c as u32)) {
            Ok(pos) => {
                self.row_support[r].remove(pos);
            }
            Err(pos) => self.row_support[r].insert(pos, c as u32),
        }
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        if self.get(r, c) != value {
            self.flip(r, c);
        }
    }

    /// Column indices set in row `r`, increasing.
    pub fn row(&self, r: usize) -> impl Iterator<Item = usize> + '_ {
        self.row_support[r].iter().map(|&c| c as usize)
    }

    pub fn row_vec(&self, r: usize) -> BitVec {
        BitVec { len: self.cols, support: self.row_support[r].clone() }
    }

    pub fn row_weight(&self, r: usize) -> usize {
        self.row_support[r].len()
    }

    pub fn is_zero(&self) -> bool {
        self.row_support.iter().all(|r| r.is_empty())
    }

    pub fn entry_count(&self) -> usize {
        self.row_support.iter().map(|r| r.len()).sum()
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for &c in &self.row_support[r] {
                t.row_support[c as usize].push(r as u32);
            }
        }
        t
    }

    /// Matrix-vector product over GF(2).
    pub fn mat_vec(&self, v: &BitVec) -> BitVec {
        assert_eq!(v.len(), self.cols, "mat_vec: vector length {} != cols {}", v.len(), self.cols);
        let mut out = Vec::new();
        for r in 0..self.rows {
            let mut parity = false;
            let (mut a, mut b) = (0, 0);
            let row = &self.row_support[r];
            while a < row.len() && b < v.support.len() {
                match row[a].cmp(&v.support[b]) {
                    std::cmp::Ordering::Less => a += 1,
                    std::cmp::Ordering::Greater => b += 1,
                    std::cmp::Ordering::Equal => {
                        parity = !parity;
                        a += 1;
                        b += 1;
                    }
                }
            }
            if parity {
                out.push(r as u32);
            }
        }
        BitVec { len: self.rows, support: out }
    }

    /// Transpose-apply without materializing the transpose.
    pub fn mat_vec_transpose(&self, v: &BitVec) -> BitVec {
        assert_eq!(v.len(), self.rows, "mat_vec_transpose: length {} != rows {}", v.len(), self.rows);
        let mut out = BitVec::zeros(self.cols);
        for r in v.iter() {
            for &c in &self.row_support[r] {
                out.flip(c as usize);
            }
        }
        out
    }

    /// Sparse matrix product `self * other`.
    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.rows, "mul: inner dimension mismatch");
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let mut acc: Vec<u32> = Vec::new();
            for &k in &self.row_support[r] {
                // acc ^= other.row(k)
                let mut merged = Vec::with_capacity(acc.len() + other.row_support[k as usize].len());
                let row = &other.row_support[k as usize];
                let (mut a, mut b) = (0, 0);
                while a < acc.len() && b < row.len() {
                    match acc[a].cmp(&row[b]) {
                        std::cmp::Ordering::Less => {
                            merged.push(acc[a]);
                            a += 1;
                        }
                        std::cmp::Ordering::Greater => {
                            merged.push(row[b]);
                            b += 1;
                        }
                        std::cmp::Ordering::Equal => {
                            a += 1;
                            b += 1;
                        }
                    }
                }
                merged.extend_from_slice(&acc[a..]);
                merged.extend_from_slice(&row[b..]);
                acc = merged;
            }
            out.row_support[r] = acc;
        }
        out
    }

    /// Row rank via dense elimination.
    pub fn rank(&self) -> usize {
        Echelon::reduce(self, None).pivots.len()
    }

    /// Solves `self * x = y` for one `x`, or `None` if inconsistent.
    ///
    /// Deterministic: columns are eliminated lowest index first and free
    /// variables are set to zero, so the returned solution is the canonical
    /// pivot solution.
    pub fn solve(&self, y: &BitVec) -> Option<BitVec> {
        assert_eq!(y.len(), self.rows, "solve: rhs length {} != rows {}", y.len(), self.rows);
        let ech = Echelon::reduce(self, Some(y));
        ech.particular_solution()
    }

    /// Basis of the kernel `{x : self * x = 0}`, ordered by leading index.
    ///
    /// The basis is linearly independent and spans the kernel; its size is
    /// `cols - rank`.
    pub fn kernel_basis(&self) -> Vec<BitVec> {
        let ech = Echelon::reduce(self, None);
        ech.kernel_basis()
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix({}x{}):", self.rows, self.cols)?;
        for r in 0..self.rows.min(40) {
            writeln!(f, "  {:?}", self.row_support[r])?;
        }
        if self.rows > 40 {
            writeln!(f, "  ...")?;
        }
        Ok(())
    }
}

/// Result of row-reducing a matrix (optionally augmented with one RHS).
struct Echelon {
    cols: usize,
    /// Reduced rows in pivot order; `pivots[i]` is the pivot column of `rows[i]`.
    rows: Vec<DenseRow>,
    pivots: Vec<usize>,
    /// RHS bits carried through the elimination, parallel to `rows`.
    rhs: Vec<bool>,
    /// Leftover RHS inconsistency: true if some zero row has RHS 1.
    inconsistent: bool,
    has_rhs: bool,
}

impl Echelon {
    /// Gaussian elimination to reduced row echelon form, lowest column first.
    fn reduce(m: &BitMatrix, y: Option<&BitVec>) -> Echelon {
        let mut work: Vec<DenseRow> = (0..m.rows()).map(|r| m.row_vec(r).to_dense()).collect();
        let mut rhs: Vec<bool> = match y {
            Some(y) => (0..m.rows()).map(|r| y.get(r)).collect(),
            None => vec![false; m.rows()],
        };
        let mut rows: Vec<DenseRow> = Vec::new();
        let mut pivots: Vec<usize> = Vec::new();
        let mut out_rhs: Vec<bool> = Vec::new();
        let mut next = 0usize; // first unprocessed work row

        // Process columns in increasing order by repeatedly taking the
        // unprocessed row with the lowest leading column.
        loop {
            // Find the unprocessed row with the smallest leading index.
            let mut best: Option<(usize, usize)> = None;
            for r in next..work.len() {
                if let Some(lead) = work[r].lowest_set() {
                    match best {
                        Some((_, bl)) if bl <= lead => {}
                        _ => best = Some((r, lead)),
                    }
                }
            }
            let Some((r, lead)) = best else { break };
            work.swap(next, r);
            rhs.swap(next, r);
            let pivot_row = work[next].clone();
            let pivot_rhs = rhs[next];
            // Clear this column from every other row (full reduction).
            for (i, row) in work.iter_mut().enumerate() {
                if i != next && row.get(lead) {
                    row.xor_assign(&pivot_row);
                    rhs[i] ^= pivot_rhs;
                }
            }
            for (row, row_rhs) in rows.iter_mut().zip(out_rhs.iter_mut()) {
                if row.get(lead) {
                    row.xor_assign(&pivot_row);
                    *row_rhs ^= pivot_rhs;
                }
            }
            rows.push(pivot_row);
            pivots.push(lead);
            out_rhs.push(pivot_rhs);
            next += 1;
        }

        let inconsistent = rhs[next..].iter().any(|&b| b);
        Echelon { cols: m.cols(), rows, pivots, rhs: out_rhs, inconsistent, has_rhs: y.is_some() }
    }

    fn particular_solution(&self) -> Option<BitVec> {
        assert!(self.has_rhs);
        if self.inconsistent {
            return None;
        }
        // Free variables are zero, so x[pivot] = rhs of the reduced row.
        let mut x = BitVec::zeros(self.cols);
        for (i, &p) in self.pivots.iter().enumerate() {
            if self.rhs[i] {
                x.flip(p);
            }
        }
        Some(x)
    }

    fn kernel_basis(&self) -> Vec<BitVec> {
        let pivot_set: std::collections::BTreeSet<usize> = self.pivots.iter().copied().collect();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut v = DenseRow::zeros(self.cols);
            v.flip(free);
            for (i, &p) in self.pivots.iter().enumerate() {
                if self.rows[i].get(free) {
                    v.flip(p);
                }
            }
            basis.push(v.to_sparse());
        }
        basis.sort_by_key(|v| v.support.first().copied().unwrap_or(u32::MAX));
        basis
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, density: f64) -> BitMatrix {
        let mut m = BitMatrix::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                if rng.gen_bool(density) {
                    m.flip(r, c);
                }
            }
        }
        m
    }

    fn random_vec(rng: &mut ChaCha8Rng, len: usize, density: f64) -> BitVec {
        BitVec::from_indices(len, (0..len).filter(|_| rng.gen_bool(density)))
    }

    #[test]
    fn mat_vec_zero_identity_and_hand_example() {
        let z = BitMatrix::zeros(3, 3);
        let v = BitVec::from_indices(3, [0, 2]);
        assert!(z.mat_vec(&v).is_zero());

        let id = BitMatrix::identity(3);
        assert_eq!(id.mat_vec(&v), v);

        // [[1,1],[0,1]] * {0,1} = {1}: row 0 gives 1+1=0, row 1 gives 1.
        let m = BitMatrix::from_entries(2, 2, [(0, 0), (0, 1), (1, 1)]);
        let v = BitVec::from_indices(2, [0, 1]);
        assert_eq!(m.mat_vec(&v), BitVec::from_indices(2, [1]));
    }

    #[test]
    fn mat_vec_linearity() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let rows = rng.gen_range(1..10);
            let cols = rng.gen_range(1..10);
            let m = random_matrix(&mut rng, rows, cols, 0.4);
            let v = random_vec(&mut rng, cols, 0.5);
            let w = random_vec(&mut rng, cols, 0.5);
            assert_eq!(m.mat_vec(&v.xor(&w)), m.mat_vec(&v).xor(&m.mat_vec(&w)));
        }
    }

    #[test]
    fn solve_identity_and_pivot_order() {
        let id = BitMatrix::identity(4);
        let y = BitVec::from_indices(4, [1, 3]);
        assert_eq!(id.solve(&y), Some(y.clone()));

        // [[1,1]] x = (1): solutions {0} and {1}; pivot order selects {0}.
        let m = BitMatrix::from_entries(1, 2, [(0, 0), (0, 1)]);
        let y = BitVec::singleton(1, 0);
        assert_eq!(m.solve(&y), Some(BitVec::singleton(2, 0)));

        // [[0,0]] x = (1): inconsistent.
        let m = BitMatrix::zeros(1, 2);
        assert_eq!(m.solve(&y), None);
    }

    #[test]
    fn solve_agrees_with_bruteforce() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let rows = rng.gen_range(1..7);
            let cols = rng.gen_range(1..8);
            let m = random_matrix(&mut rng, rows, cols, 0.4);
            let y = random_vec(&mut rng, rows, 0.5);
            match m.solve(&y) {
                Some(x) => assert_eq!(m.mat_vec(&x), y),
                None => {
                    // Exhaustive check that no solution exists.
                    for bits in 0u32..(1 << cols) {
                        let x = BitVec::from_indices(cols, (0..cols).filter(|i| bits >> i & 1 == 1));
                        assert_ne!(m.mat_vec(&x), y, "solve missed a solution");
                    }
                }
            }
        }
    }

    #[test]
    fn kernel_basis_examples() {
        assert!(BitMatrix::identity(5).kernel_basis().is_empty());

        let z = BitMatrix::zeros(2, 4);
        let basis = z.kernel_basis();
        assert_eq!(basis.len(), 4);
        for (i, v) in basis.iter().enumerate() {
            assert_eq!(*v, BitVec::singleton(4, i));
        }

        // [[1,1,0],[0,1,1]] has kernel spanned by {0,1,2} (brute-force checked).
        let m = BitMatrix::from_entries(2, 3, [(0, 0), (0, 1), (1, 1), (1, 2)]);
        let basis = m.kernel_basis();
        assert_eq!(basis, vec![BitVec::from_indices(3, [0, 1, 2])]);
    }

    #[test]
    fn kernel_spans_and_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..200 {
            let rows = rng.gen_range(1..7);
            let cols = rng.gen_range(1..10);
            let m = random_matrix(&mut rng, rows, cols, 0.35);
            let basis = m.kernel_basis();
            assert_eq!(basis.len(), cols - m.rank());
            for v in &basis {
                assert!(m.mat_vec(v).is_zero());
            }
            // Linear independence: stack the basis and check its rank.
            let stacked = BitMatrix::from_entries(
                basis.len(),
                cols,
                basis.iter().enumerate().flat_map(|(r, v)| {
                    v.iter().map(move |c| (r, c)).collect::<Vec<_>>()
                }),
            );
            assert_eq!(stacked.rank(), basis.len());
        }
    }

    #[test]
    fn rank_examples() {
        assert_eq!(BitMatrix::identity(4).rank(), 4);
        assert_eq!(BitMatrix::zeros(3, 5).rank(), 0);
        let m = BitMatrix::from_entries(2, 2, [(0, 0), (0, 1), (1, 0), (1, 1)]);
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn transpose_and_mul() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let (ar, ac, bc) = (rng.gen_range(1..8), rng.gen_range(1..8), rng.gen_range(1..8));
            let a = random_matrix(&mut rng, ar, ac, 0.4);
            let b = random_matrix(&mut rng, a.cols(), bc, 0.4);
            let ab = a.mul(&b);
            let v = random_vec(&mut rng, b.cols(), 0.5);
            assert_eq!(ab.mat_vec(&v), a.mat_vec(&b.mat_vec(&v)));
            assert_eq!(a.transpose().transpose(), a);
            let w = random_vec(&mut rng, a.rows(), 0.5);
            assert_eq!(a.transpose().mat_vec(&w), a.mat_vec_transpose(&w));
        }
    }
}
