//! The ten block cases (l1, l2) of the two-function reduction: which Toda
//! components serve as (w, v), the exponents (a, b), the p-equality classes,
//! and the h-relations used by the change of variable.

use crate::error::{Error, Result};
use crate::holodata::monomial::{rat, Rat};
use num_traits::Zero;

/// One row of the case table. `l2 = 0` encodes the single-block rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseSpec {
    pub l1: u32,
    pub l2: u32,
    pub n_plus_1: usize,
    /// w = 2 w_{w_index}, v = 2 w_{v_index}.
    pub w_index: usize,
    pub v_index: usize,
    pub a: u32,
    pub b: u32,
    /// Partition of 0..n into classes with equal exponents, in table order.
    pub p_classes: Vec<Vec<usize>>,
    /// Index sets [i, j, ...] with h_i h_j ... = 1 (singletons force h_i = 1).
    pub h_relations: Vec<Vec<usize>>,
}

/// All ten (l1, l2) rows, in table order.
pub const CASES: [(u32, u32); 10] = [
    (4, 0),
    (5, 0),
    (1, 4),
    (1, 5),
    (2, 2),
    (2, 3),
    (3, 2),
    (3, 3),
    (4, 1),
    (5, 1),
];

/// Construct the case row for (l1, l2); `l2 = 0` selects a single-block row.
pub fn case_spec(l1: u32, l2: u32) -> Result<CaseSpec> {
    let (n_plus_1, w_index, v_index, a, b, p_classes, h_relations): (
        usize,
        usize,
        usize,
        u32,
        u32,
        Vec<Vec<usize>>,
        Vec<Vec<usize>>,
    ) = match (l1, l2) {
        (4, 0) => (4, 0, 1, 2, 2, vec![vec![0], vec![1, 3], vec![2]], vec![vec![0, 3], vec![1, 2]]),
        (5, 0) => (
            5,
            0,
            1,
            2,
            1,
            vec![vec![0], vec![1, 4], vec![2, 3]],
            vec![vec![0, 4], vec![1, 3], vec![2]],
        ),
        (1, 4) => (
            5,
            1,
            2,
            1,
            2,
            vec![vec![0, 1], vec![2, 4], vec![3]],
            vec![vec![0], vec![1, 4], vec![2, 3]],
        ),
        (1, 5) => (
            6,
            1,
            2,
            1,
            1,
            vec![vec![0, 1], vec![2, 5], vec![3, 4]],
            vec![vec![0], vec![1, 5], vec![2, 4], vec![3]],
        ),
        (2, 2) => (4, 3, 0, 2, 2, vec![vec![0, 2], vec![1], vec![3]], vec![vec![0, 1], vec![2, 3]]),
        (2, 3) => (
            5,
            4,
            0,
            1,
            2,
            vec![vec![0, 2], vec![1], vec![3, 4]],
            vec![vec![0, 1], vec![2, 4], vec![3]],
        ),
        (3, 2) => (
            5,
            4,
            0,
            2,
            1,
            vec![vec![0, 3], vec![1, 2], vec![4]],
            vec![vec![0, 2], vec![1], vec![3, 4]],
        ),
        (3, 3) => (
            6,
            5,
            0,
            1,
            1,
            vec![vec![0, 3], vec![1, 2], vec![4, 5]],
            vec![vec![0, 2], vec![1], vec![3, 5], vec![4]],
        ),
        (4, 1) => (
            5,
            0,
            1,
            1,
            2,
            vec![vec![0, 4], vec![1, 3], vec![2]],
            vec![vec![0, 3], vec![1, 2], vec![4]],
        ),
        (5, 1) => (
            6,
            0,
            1,
            1,
            1,
            vec![vec![0, 5], vec![1, 4], vec![2, 3]],
            vec![vec![0, 4], vec![1, 3], vec![2], vec![5]],
        ),
        _ => {
            return Err(Error::invalid(format!(
                "({l1}, {l2}) is not one of the ten two-function cases"
            )))
        }
    };
    let case = CaseSpec {
        l1,
        l2,
        n_plus_1,
        w_index,
        v_index,
        a,
        b,
        p_classes,
        h_relations,
    };
    case.check_consistency()?;
    Ok(case)
}

impl CaseSpec {
    /// Class index (position in `p_classes`) of a data index.
    pub fn class_of(&self, i: usize) -> usize {
        self.p_classes
            .iter()
            .position(|cl| cl.contains(&i))
            .expect("classes partition the indices")
    }

    /// Multiplicity of each class (how many indices share its exponent).
    pub fn class_multiplicities(&self) -> Vec<usize> {
        self.p_classes.iter().map(Vec::len).collect()
    }

    fn check_consistency(&self) -> Result<()> {
        let n1 = self.n_plus_1;
        // p-classes and h-relations both partition 0..n
        for (name, parts) in [("p_classes", &self.p_classes), ("h_relations", &self.h_relations)] {
            let mut seen = vec![false; n1];
            for part in parts.iter() {
                for &i in part {
                    if i >= n1 || seen[i] {
                        return Err(Error::internal(format!(
                            "case ({}, {}): {name} is not a partition",
                            self.l1, self.l2
                        )));
                    }
                    seen[i] = true;
                }
            }
            if !seen.iter().all(|&s| s) {
                return Err(Error::internal(format!(
                    "case ({}, {}): {name} misses an index",
                    self.l1, self.l2
                )));
            }
        }
        if self.w_index >= n1 || self.v_index >= n1 || self.w_index == self.v_index {
            return Err(Error::internal("bad (w, v) component indices"));
        }
        if self.l2 == 0 && self.l1 as usize != n1 {
            return Err(Error::internal("single-block size mismatch"));
        }
        if self.l2 > 0 && (self.l1 + self.l2) as usize != n1 {
            return Err(Error::internal("block sizes must sum to n+1"));
        }
        // The h-chain must close on generic exponents: solve it with a
        // generic rational test vector and require every relation to hold.
        let test = [rat(1, 7), rat(3, 5), rat(-1, 3)];
        let k: Vec<Rat> = (0..n1).map(|i| test[self.class_of(i)].clone()).collect();
        let m = self.solve_exponent_chain(&k)?;
        for rel in &self.h_relations {
            let total: Rat = rel.iter().map(|&i| m[i].clone()).sum();
            if !total.is_zero() {
                return Err(Error::internal(format!(
                    "case ({}, {}): h-relation {rel:?} inconsistent with the p-classes",
                    self.l1, self.l2
                )));
            }
        }
        Ok(())
    }

    /// Exponents m_i of the h_i monomials: the chain m_i - m_{i-1} =
    /// nu - k_i anchored by the first h-relation (singleton h = 1, or a pair
    /// h_i h_j = 1 splitting the accumulated offset in half). Every other
    /// relation must then hold identically; a failure is an internal error.
    pub(crate) fn solve_exponent_chain(&self, k: &[Rat]) -> Result<Vec<Rat>> {
        let n1 = self.n_plus_1;
        let total: Rat = k.iter().sum();
        let nu = total / rat(n1 as i64, 1);
        let mut off = vec![Rat::zero(); n1];
        for i in 1..n1 {
            off[i] = off[i - 1].clone() + nu.clone() - k[i].clone();
        }
        let rel = &self.h_relations[0];
        let base = match rel.len() {
            1 => -off[rel[0]].clone(),
            2 => -(off[rel[0]].clone() + off[rel[1]].clone()) / rat(2, 1),
            _ => {
                return Err(Error::internal(
                    "h-relations longer than two indices are not used by any case",
                ))
            }
        };
        Ok(off.into_iter().map(|o| base.clone() + o).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_ten_cases_construct() {
        for &(l1, l2) in &CASES {
            let c = case_spec(l1, l2).unwrap();
            assert_eq!(c.p_classes.len(), 3, "every case has three classes");
            let mult: usize = c.class_multiplicities().iter().sum();
            assert_eq!(mult, c.n_plus_1);
        }
    }

    #[test]
    fn unknown_rows_rejected() {
        assert!(case_spec(6, 0).is_err());
        assert!(case_spec(2, 4).is_err());
        assert!(case_spec(0, 0).is_err());
    }

    #[test]
    fn table_rows_match() {
        let c = case_spec(2, 2).unwrap();
        assert_eq!((c.a, c.b), (2, 2));
        assert_eq!((c.w_index, c.v_index), (3, 0));
        assert_eq!(c.p_classes, vec![vec![0, 2], vec![1], vec![3]]);
        assert_eq!(c.h_relations, vec![vec![0, 1], vec![2, 3]]);

        let c = case_spec(5, 0).unwrap();
        assert_eq!((c.a, c.b), (2, 1));
        assert_eq!(c.p_classes, vec![vec![0], vec![1, 4], vec![2, 3]]);
        assert_eq!(c.h_relations, vec![vec![0, 4], vec![1, 3], vec![2]]);

        let c = case_spec(1, 5).unwrap();
        assert_eq!((c.a, c.b), (1, 1));
        assert_eq!(c.h_relations, vec![vec![0], vec![1, 5], vec![2, 4], vec![3]]);
    }
}
