//! Finite group multiplication tables with exhaustively checked axioms.

use crate::error::{Error, Result};

/// A finite group presented by its full multiplication table. Element 0 is
/// always the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupTable {
    order: usize,
    mul: Vec<Vec<usize>>,
}

impl GroupTable {
    /// Validates closure, associativity, the identity at index 0 and the
    /// existence of inverses.
    pub fn new(mul: Vec<Vec<usize>>) -> Result<Self> {
        let n = mul.len();
        if n == 0 {
            return Err(Error::Validation("group order must be >= 1".into()));
        }
        for row in &mul {
            if row.len() != n {
                return Err(Error::Validation("multiplication table not square".into()));
            }
            for &v in row {
                if v >= n {
                    return Err(Error::Validation("table entry out of range".into()));
                }
            }
        }
        for a in 0..n {
            if mul[0][a] != a || mul[a][0] != a {
                return Err(Error::Validation(
                    "element 0 is not a two-sided identity".into(),
                ));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if mul[mul[a][b]][c] != mul[a][mul[b][c]] {
                        return Err(Error::Validation(format!(
                            "associativity fails at ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
        for a in 0..n {
            if !(0..n).any(|b| mul[a][b] == 0 && mul[b][a] == 0) {
                return Err(Error::Validation(format!("element {a} has no inverse")));
            }
        }
        Ok(GroupTable { order: n, mul })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        (0..self.order).find(|&b| self.mul[a][b] == 0).unwrap()
    }

    pub fn table(&self) -> &Vec<Vec<usize>> {
        &self.mul
    }

    pub fn trivial() -> Self {
        GroupTable::new(vec![vec![0]]).unwrap()
    }

    pub fn cyclic(n: usize) -> Self {
        let mul = (0..n)
            .map(|a| (0..n).map(|b| (a + b) % n).collect())
            .collect();
        GroupTable::new(mul).unwrap()
    }

    pub fn direct_product(g: &GroupTable, h: &GroupTable) -> Self {
        let n = g.order() * h.order();
        let idx = |a: usize, b: usize| a * h.order() + b;
        let mut mul = vec![vec![0; n]; n];
        for a1 in 0..g.order() {
            for b1 in 0..h.order() {
                for a2 in 0..g.order() {
                    for b2 in 0..h.order() {
                        mul[idx(a1, b1)][idx(a2, b2)] = idx(g.mul(a1, a2), h.mul(b1, b2));
                    }
                }
            }
        }
        GroupTable::new(mul).unwrap()
    }

    pub fn klein() -> Self {
        Self::direct_product(&Self::cyclic(2), &Self::cyclic(2))
    }

    /// The symmetric group on three letters, as permutation composition
    /// (identity first, then transpositions, then 3-cycles).
    pub fn symmetric_3() -> Self {
        let perms: [[usize; 3]; 6] = [
            [0, 1, 2],
            [1, 0, 2],
            [2, 1, 0],
            [0, 2, 1],
            [1, 2, 0],
            [2, 0, 1],
        ];
        let compose = |p: &[usize; 3], q: &[usize; 3]| -> [usize; 3] {
            // (p * q)(x) = p(q(x))
            [p[q[0]], p[q[1]], p[q[2]]]
        };
        let mut mul = vec![vec![0; 6]; 6];
        for (i, p) in perms.iter().enumerate() {
            for (j, q) in perms.iter().enumerate() {
                let r = compose(p, q);
                mul[i][j] = perms.iter().position(|s| *s == r).unwrap();
            }
        }
        GroupTable::new(mul).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_groups_are_groups() {
        for n in 1..=6 {
            let g = GroupTable::cyclic(n);
            assert_eq!(g.order(), n);
        }
    }

    #[test]
    fn s3_is_nonabelian_of_order_six() {
        let g = GroupTable::symmetric_3();
        assert_eq!(g.order(), 6);
        let mut commutes = true;
        for a in 0..6 {
            for b in 0..6 {
                if g.mul(a, b) != g.mul(b, a) {
                    commutes = false;
                }
            }
        }
        assert!(!commutes);
    }

    #[test]
    fn bad_identity_rejected() {
        // swap of Z/2 table rows puts identity at index 1
        assert!(GroupTable::new(vec![vec![1, 0], vec![0, 1]]).is_err());
    }

    #[test]
    fn non_associative_rejected() {
        // a "table" with identity but broken associativity
        let t = vec![vec![0, 1, 2], vec![1, 2, 2], vec![2, 2, 0]];
        assert!(GroupTable::new(t).is_err());
    }
}
