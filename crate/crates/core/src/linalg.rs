//! Exact linear algebra helpers: an incremental row-echelon span over
//! monomial-indexed sparse rows, a dense kernel computation, and a dense
//! linear solver. All arithmetic is in a coefficient [`Field`].

use std::collections::{BTreeMap, BTreeSet};

use crate::field::{Field, FieldElement};
use crate::poly::Monomial;

pub type SparseRow = BTreeMap<Monomial, FieldElement>;

/// An incrementally built row space. Rows that reduce to a single monomial
/// are tracked as plain monomial pivots, which keeps reduction cheap when
/// most of the span is monomial.
#[derive(Clone)]
pub struct RowSpace {
    mono_pivots: BTreeSet<Monomial>,
    poly_rows: BTreeMap<Monomial, SparseRow>,
}

impl RowSpace {
    pub fn new() -> RowSpace {
        RowSpace {
            mono_pivots: BTreeSet::new(),
            poly_rows: BTreeMap::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.mono_pivots.len() + self.poly_rows.len()
    }

    /// Fully reduces a row against the span; the result is zero iff the row
    /// lies in the span.
    pub fn reduce(&self, mut row: SparseRow) -> SparseRow {
        loop {
            // prune coordinates covered by monomial pivots
            let covered: Vec<Monomial> = row
                .keys()
                .filter(|m| self.mono_pivots.contains(*m))
                .cloned()
                .collect();
            for m in covered {
                row.remove(&m);
            }
            let lead = match row.keys().next_back() {
                None => return row,
                Some(m) => m.clone(),
            };
            match self.poly_rows.get(&lead) {
                None => return row,
                Some(pivot) => {
                    let c = row.get(&lead).unwrap().clone();
                    let pc = pivot.get(&lead).unwrap();
                    let f = c.div(pc).expect("pivot nonzero");
                    for (m, pv) in pivot {
                        let delta = f.mul(pv);
                        match row.get_mut(m) {
                            Some(acc) => {
                                let s = acc.sub(&delta);
                                if s.is_zero() {
                                    row.remove(m);
                                } else {
                                    *acc = s;
                                }
                            }
                            None => {
                                if !delta.is_zero() {
                                    row.insert(m.clone(), delta.neg());
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    /// Adds a row; returns true when it enlarged the span.
    pub fn insert(&mut self, row: SparseRow) -> bool {
        let red = self.reduce(row);
        if red.is_empty() {
            return false;
        }
        if red.len() == 1 {
            let m = red.keys().next().unwrap().clone();
            self.mono_pivots.insert(m);
        } else {
            let lead = red.keys().next_back().unwrap().clone();
            self.poly_rows.insert(lead, red);
        }
        true
    }

    pub fn contains(&self, row: &SparseRow) -> bool {
        self.reduce(row.clone()).is_empty()
    }
}

impl Default for RowSpace {
    fn default() -> Self {
        Self::new()
    }
}

/// Basis of the null space of a dense matrix (rows of length `ncols`).
pub fn kernel_basis(field: &Field, rows: &[Vec<FieldElement>], ncols: usize) -> Vec<Vec<FieldElement>> {
    let mut m: Vec<Vec<FieldElement>> = rows.to_vec();
    let nrows = m.len();
    let mut pivot_col_of_row: Vec<usize> = Vec::new();
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let mut pr = None;
        for i in r..nrows {
            if !m[i][c].is_zero() {
                pr = Some(i);
                break;
            }
        }
        let Some(pr) = pr else { continue };
        m.swap(r, pr);
        let inv = m[r][c].inv().expect("pivot nonzero");
        for j in c..ncols {
            m[r][j] = m[r][j].mul(&inv);
        }
        for i in 0..nrows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..ncols {
                    let d = f.mul(&m[r][j]);
                    m[i][j] = m[i][j].sub(&d);
                }
            }
        }
        pivot_col_of_row.push(c);
        pivot_cols.push(c);
        r += 1;
        if r == nrows {
            break;
        }
    }
    let mut basis = Vec::new();
    for free in 0..ncols {
        if pivot_cols.contains(&free) {
            continue;
        }
        let mut v = vec![field.zero(); ncols];
        v[free] = field.one();
        for (row_idx, &pc) in pivot_col_of_row.iter().enumerate() {
            // x_pc = -m[row_idx][free]
            v[pc] = m[row_idx][free].neg();
        }
        basis.push(v);
    }
    basis
}

/// Solves a square dense system `a x = b`; None when singular.
pub fn solve_square(a: &[Vec<FieldElement>], b: &[FieldElement]) -> Option<Vec<FieldElement>> {
    let n = a.len();
    let mut m: Vec<Vec<FieldElement>> = a
        .iter()
        .zip(b.iter())
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    for c in 0..n {
        let pr = (c..n).find(|&i| !m[i][c].is_zero())?;
        m.swap(c, pr);
        let inv = m[c][c].inv().ok()?;
        for j in c..=n {
            m[c][j] = m[c][j].mul(&inv);
        }
        for i in 0..n {
            if i != c && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..=n {
                    let d = f.mul(&m[c][j]);
                    m[i][j] = m[i][j].sub(&d);
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::rationals()
    }

    fn mono(e: &[u32]) -> Monomial {
        Monomial(e.to_vec())
    }

    fn row(field: &Field, entries: &[(&[u32], i64)]) -> SparseRow {
        entries
            .iter()
            .map(|(m, c)| (mono(m), field.from_i64(*c)))
            .collect()
    }

    #[test]
    fn rowspace_membership() {
        let f = q();
        let mut s = RowSpace::new();
        assert!(s.insert(row(&f, &[(&[2, 0], 1)])));
        assert!(s.insert(row(&f, &[(&[1, 1], 1), (&[0, 1], 2)])));
        // already covered
        assert!(!s.insert(row(&f, &[(&[2, 0], 5)])));
        // combination: (1,1) + 2*(0,1) plus multiple of x^2
        let r = row(&f, &[(&[1, 1], 3), (&[0, 1], 6), (&[2, 0], -4)]);
        assert!(s.contains(&r));
        let r2 = row(&f, &[(&[1, 1], 1)]);
        assert!(!s.contains(&r2));
    }

    #[test]
    fn kernel_small() {
        let f = q();
        // x + y + z = 0, y - z = 0  -> kernel spanned by (-2, 1, 1)
        let rows = vec![
            vec![f.one(), f.one(), f.one()],
            vec![f.zero(), f.one(), f.from_i64(-1)],
        ];
        let k = kernel_basis(&f, &rows, 3);
        assert_eq!(k.len(), 1);
        let v = &k[0];
        // check both rows annihilate v
        for r in &rows {
            let mut acc = f.zero();
            for (a, x) in r.iter().zip(v.iter()) {
                acc = acc.add(&a.mul(x));
            }
            assert!(acc.is_zero());
        }
    }

    #[test]
    fn solve_small() {
        let f = q();
        let a = vec![
            vec![f.from_i64(2), f.from_i64(1)],
            vec![f.from_i64(1), f.from_i64(3)],
        ];
        let b = vec![f.from_i64(5), f.from_i64(10)];
        let x = solve_square(&a, &b).unwrap();
        assert_eq!(x[0], f.from_i64(1));
        assert_eq!(x[1], f.from_i64(3));
    }
}
