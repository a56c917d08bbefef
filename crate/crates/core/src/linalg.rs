//! Row reduction over any [`FieldOps`] field.

use crate::gf::FieldOps;

/// A matrix in reduced row-echelon form together with its pivot columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Echelon<E> {
    pub rows: Vec<Vec<E>>,
    pub pivots: Vec<usize>,
    pub ncols: usize,
}

impl<E: Copy + Eq> Echelon<E> {
    pub fn rank(&self) -> usize {
        self.rows.len()
    }
}

/// Reduced row-echelon form; zero rows are dropped.
pub fn rref<F: FieldOps>(f: &F, mut rows: Vec<Vec<F::Elem>>, ncols: usize) -> Echelon<F::Elem> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(found) = (r..rows.len()).find(|&i| !f.is_zero(rows[i][col])) else {
            continue;
        };
        rows.swap(r, found);
        let inv = f.inv(rows[r][col]).expect("pivot is nonzero");
        for x in rows[r].iter_mut() {
            *x = f.mul(*x, inv);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || f.is_zero(row[col]) {
                continue;
            }
            let factor = row[col];
            for (x, &pv) in row.iter_mut().zip(&pivot_row) {
                *x = f.sub(*x, f.mul(factor, pv));
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    Echelon { rows, pivots, ncols }
}

/// Reduces `v` in place against an echelon basis; the result is zero iff
/// `v` lies in the row space.
pub fn reduce<F: FieldOps>(f: &F, basis: &Echelon<F::Elem>, v: &mut [F::Elem]) {
    for (row, &col) in basis.rows.iter().zip(&basis.pivots) {
        let c = v[col];
        if f.is_zero(c) {
            continue;
        }
        for (x, &b) in v.iter_mut().zip(row) {
            *x = f.sub(*x, f.mul(c, b));
        }
    }
}

pub fn in_row_space<F: FieldOps>(f: &F, basis: &Echelon<F::Elem>, v: &[F::Elem]) -> bool {
    let mut w = v.to_vec();
    reduce(f, basis, &mut w);
    w.iter().all(|&x| f.is_zero(x))
}

/// Basis of `{x : M·x = 0}` for the matrix whose rows are given in echelon form.
pub fn kernel<F: FieldOps>(f: &F, m: &Echelon<F::Elem>) -> Vec<Vec<F::Elem>> {
    let free: Vec<usize> = (0..m.ncols).filter(|c| !m.pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut x = vec![f.zero(); m.ncols];
            x[fc] = f.one();
            for (row, &pc) in m.rows.iter().zip(&m.pivots) {
                x[pc] = f.neg(row[fc]);
            }
            x
        })
        .collect()
}

pub fn dot<F: FieldOps>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> F::Elem {
    a.iter().zip(b).fold(f.zero(), |acc, (&x, &y)| f.add(acc, f.mul(x, y)))
}
