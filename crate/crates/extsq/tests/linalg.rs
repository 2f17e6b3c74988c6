//! Row reduction, solving and kernels over F2 against brute-force
//! enumeration on small matrices.

use extsq::chainmap::{OrderedSolver, TieBreak};
use extsq::linalg::{kernel_basis, rref, solve, F2Matrix, F2Vector, Solver, Subspace};
use proptest::prelude::*;

fn matrix(rows: &[Vec<bool>], ncols: usize) -> F2Matrix {
    F2Matrix::from_rows(rows.iter().map(|r| F2Vector::from_bools(r)).collect(), ncols)
}

/// All combinations `x a` for `x` ranging over `F2^nrows`.
fn row_space(a: &F2Matrix) -> Vec<F2Vector> {
    (0..1u32 << a.nrows())
        .map(|mask| {
            let x = F2Vector::from_indices(a.nrows(), (0..a.nrows()).filter(|&i| mask >> i & 1 == 1));
            a.apply(&x)
        })
        .collect()
}

fn brute_rank(a: &F2Matrix) -> usize {
    let mut span = row_space(a);
    span.sort_by_key(|v| format!("{v:?}"));
    span.dedup();
    span.len().trailing_zeros() as usize
}

fn arb_matrix() -> impl Strategy<Value = F2Matrix> {
    (0usize..7, 0usize..9).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop::collection::vec(any::<bool>(), c), r).prop_map(move |rows| matrix(&rows, c))
    })
}

proptest! {
    #[test]
    fn rank_matches_span_size(a in arb_matrix()) {
        prop_assert_eq!(a.rank(), brute_rank(&a));
        prop_assert_eq!(rref(&a).rank(), brute_rank(&a));
        prop_assert_eq!(a.transpose().rank(), a.rank());
    }

    #[test]
    fn rref_transform_reproduces_reduced(a in arb_matrix()) {
        let r = rref(&a);
        prop_assert_eq!(r.transform.then(&a), r.reduced.clone());
        for (k, &p) in r.pivots.iter().enumerate() {
            for (j, row) in r.reduced.rows().iter().enumerate() {
                prop_assert_eq!(row.get(p), j == k);
            }
        }
    }

    #[test]
    fn solve_agrees_with_enumeration(a in arb_matrix(), bits in prop::collection::vec(any::<bool>(), 8)) {
        let b = F2Vector::from_bools(&bits[..a.ncols()]);
        let reachable = row_space(&a).contains(&b);
        match solve(&a, &b) {
            Some(x) => prop_assert_eq!(a.apply(&x), b.clone()),
            None => prop_assert!(!reachable),
        }
        prop_assert_eq!(Solver::new(&a).solve(&b).is_some(), reachable);
        for tie in [TieBreak::Natural, TieBreak::Reversed] {
            match OrderedSolver::new(&a, tie).solve(&b) {
                Some(x) => prop_assert_eq!(a.apply(&x), b.clone()),
                None => prop_assert!(!reachable),
            }
        }
    }

    #[test]
    fn kernel_basis_spans_the_kernel(a in arb_matrix()) {
        let kernel = kernel_basis(&a);
        let mut space = Subspace::new(a.nrows());
        for v in &kernel {
            prop_assert!(a.apply(v).is_zero());
            prop_assert!(space.insert(v).is_some());
        }
        prop_assert_eq!(kernel.len() + a.rank(), a.nrows());
    }

    #[test]
    fn subspace_membership(rows in prop::collection::vec(prop::collection::vec(any::<bool>(), 6), 0..6),
                           probe in prop::collection::vec(any::<bool>(), 6)) {
        let a = matrix(&rows, 6);
        let mut s = Subspace::new(6);
        for r in a.rows() {
            s.insert(r);
        }
        prop_assert_eq!(s.dim(), a.rank());
        let v = F2Vector::from_bools(&probe);
        prop_assert_eq!(s.contains(&v), row_space(&a).contains(&v));
        for (p, b) in s.pivots().iter().zip(s.basis()) {
            prop_assert_eq!(b.first_one(), Some(*p));
        }
    }

    #[test]
    fn vector_operations(bits in prop::collection::vec(any::<bool>(), 0..200), other in prop::collection::vec(any::<bool>(), 0..200)) {
        let v = F2Vector::from_bools(&bits);
        prop_assert_eq!(v.count_ones(), bits.iter().filter(|&&b| b).count());
        let w = F2Vector::from_bools(&other);
        let c = v.concat(&w);
        prop_assert_eq!(c.slice(0, v.len()), v.clone());
        prop_assert_eq!(c.slice(v.len(), c.len()), w);
        let mut z = v.clone();
        z.add_assign(&v);
        prop_assert!(z.is_zero());
    }
}

#[test]
fn identity_and_zero() {
    let i = F2Matrix::identity(5);
    assert_eq!(i.rank(), 5);
    assert!(kernel_basis(&i).is_empty());
    let z = F2Matrix::zero(3, 4);
    assert_eq!(z.rank(), 0);
    assert_eq!(kernel_basis(&z).len(), 3);
    assert!(solve(&z, &F2Vector::unit(4, 1)).is_none());
}
