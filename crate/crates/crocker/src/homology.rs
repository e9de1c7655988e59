//! Betti numbers over the two-element field.
//!
//! Boundary matrices store one bitset per column (one column per simplex,
//! one row per facet). Ranks come from left-to-right column elimination with
//! pivot bookkeeping; exact arithmetic, no tolerances. Beta_k is then
//!
//!   beta_k = (#k-simplices - rank d_k) - rank d_{k+1},
//!
//! with d_0 the zero map. A disjoint-set count of connected components
//! provides an independent cross-check for beta_0.

use crate::complex::FlagComplex;
use crate::error::{Error, Result};
use crate::union_find::UnionFind;

/// Dense bit column over GF(2).
#[derive(Clone, PartialEq, Eq)]
pub(crate) struct Gf2Column {
    words: Vec<u64>,
}

impl Gf2Column {
    fn zeros(rows: usize) -> Self {
        Self { words: vec![0; rows.div_ceil(64)] }
    }

    fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1u64 << (i % 64);
    }

    fn get(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[cfg(test)]
    fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    fn xor_assign(&mut self, other: &Self) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Lowest set bit, the pivot for column reduction.
    fn pivot(&self) -> Option<usize> {
        for (w, &word) in self.words.iter().enumerate() {
            if word != 0 {
                return Some(w * 64 + word.trailing_zeros() as usize);
            }
        }
        None
    }

    fn ones(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (w, &word) in self.words.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                out.push(w * 64 + bits.trailing_zeros() as usize);
                bits &= bits - 1;
            }
        }
        out
    }
}

/// The boundary map d_k of a flag complex, columns over GF(2).
pub struct BoundaryMatrix {
    k: usize,
    rows: usize,
    columns: Vec<Gf2Column>,
}

impl BoundaryMatrix {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn entry(&self, row: usize, col: usize) -> bool {
        self.columns[col].get(row)
    }

    /// Row indices of the nonzero entries of one column.
    pub fn column_support(&self, col: usize) -> Vec<usize> {
        self.columns[col].ones()
    }

    /// Rank over GF(2) by column elimination. Columns are processed left to
    /// right; a column keeps xoring with the recorded owner of its pivot row
    /// until its pivot is fresh or the column vanishes.
    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.columns.is_empty() {
            return 0;
        }
        let mut work: Vec<Gf2Column> = self.columns.clone();
        let mut owner: Vec<Option<usize>> = vec![None; self.rows];
        let mut rank = 0;
        for j in 0..work.len() {
            while let Some(p) = work[j].pivot() {
                match owner[p] {
                    None => {
                        owner[p] = Some(j);
                        rank += 1;
                        break;
                    }
                    Some(o) => {
                        // owners always precede the column being reduced
                        let (left, right) = work.split_at_mut(j);
                        right[0].xor_assign(&left[o]);
                    }
                }
            }
        }
        rank
    }
}

/// Boundary matrix of the k-simplices of `complex`. Rows are indexed by the
/// (k-1)-simplices in their sorted order, columns by the k-simplices.
pub fn boundary_matrix(complex: &FlagComplex, k: usize) -> Result<BoundaryMatrix> {
    if k < 1 {
        return Err(Error::InvalidParameter("boundary_matrix needs k >= 1".into()));
    }
    if k > complex.dim_cap() {
        return Err(Error::SimplicesNotEnumerated { requested: k, dim_cap: complex.dim_cap() });
    }
    let faces = complex.simplices_by_dim(k - 1);
    let cells = complex.simplices_by_dim(k);
    let mut columns = Vec::with_capacity(cells.len());
    let mut facet = Vec::with_capacity(k);
    for cell in cells {
        let mut col = Gf2Column::zeros(faces.len());
        for omit in 0..cell.len() {
            facet.clear();
            facet.extend(cell.iter().enumerate().filter(|&(i, _)| i != omit).map(|(_, &v)| v));
            let row = faces
                .binary_search_by(|f| f.as_slice().cmp(facet.as_slice()))
                .expect("facet of an enumerated simplex is enumerated");
            col.set(row);
        }
        columns.push(col);
    }
    Ok(BoundaryMatrix { k, rows: faces.len(), columns })
}

/// Betti numbers beta_0..beta_{k_max}. Requires the complex to enumerate
/// simplices up to dimension k_max + 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BettiVector {
    pub values: Vec<usize>,
}

impl BettiVector {
    pub fn get(&self, k: usize) -> usize {
        self.values.get(k).copied().unwrap_or(0)
    }
}

pub fn betti_numbers(complex: &FlagComplex, k_max: usize) -> Result<BettiVector> {
    if complex.dim_cap() < k_max + 1 {
        return Err(Error::SimplicesNotEnumerated {
            requested: k_max + 1,
            dim_cap: complex.dim_cap(),
        });
    }
    // rank d_k for k = 1..=k_max+1; d_0 = 0.
    let mut ranks = vec![0usize];
    for k in 1..=k_max + 1 {
        ranks.push(boundary_matrix(complex, k)?.rank());
    }
    let values = (0..=k_max)
        .map(|k| {
            let n_k = complex.simplex_count(k);
            n_k - ranks[k] - ranks[k + 1]
        })
        .collect();
    Ok(BettiVector { values })
}

/// Connected-component count by disjoint-set union over the edge list.
/// Independent of the matrix-reduction path; must agree with beta_0.
pub fn betti0_union_find(complex: &FlagComplex) -> usize {
    let mut uf = UnionFind::new(complex.vertex_count());
    for e in complex.simplices_by_dim(1) {
        uf.union(e[0] as usize, e[1] as usize);
    }
    uf.set_count()
}
