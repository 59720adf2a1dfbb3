//! Dense complex linear algebra for small Hilbert spaces (dim <= ~16).
//!
//! Everything here is sized for tiny operators: Hermitian eigendecomposition,
//! Kronecker products, partial trace/transpose, Hilbert-Schmidt inner product,
//! and a fixed-size real 3x3 SVD used for correlation matrices.
//!
//! The Kronecker index convention is fixed crate-wide: the A system is the
//! slow index, so `(a kron b)[i*db + k, j*db + l] = a[i,j] * b[k,l]`. All
//! bipartite operations (partial trace, partial transpose, contractions)
//! share it.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use num_complex::Complex;

use crate::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Real 3x3 matrix; carrier for two-qubit correlation matrices.
pub type RealMatrix3 = Matrix3<f64>;

/// Hermiticity tolerance in max-entry norm.
pub const TOL_HERM: f64 = 1e-10;

/// Which tensor factor of a bipartite operator an operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Dense square complex matrix with an optional bipartite dimension split.
///
/// Carrier for states, effects and witnesses. The split `(d_a, d_b)` must
/// satisfy `d_a * d_b == dim` and is required by the bipartite operations.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    mat: CMat,
    split: Option<(usize, usize)>,
}

impl OperatorMatrix {
    pub fn new(mat: CMat) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::NotSquare {
                rows: mat.nrows(),
                cols: mat.ncols(),
            });
        }
        Ok(Self { mat, split: None })
    }

    pub fn with_split(mat: CMat, d_a: usize, d_b: usize) -> Result<Self> {
        let op = Self::new(mat)?;
        op.split_as(d_a, d_b)
    }

    /// Return the same matrix with the given bipartite split declared.
    pub fn split_as(mut self, d_a: usize, d_b: usize) -> Result<Self> {
        if d_a * d_b != self.dim() {
            return Err(Error::BadSplit {
                d_a,
                d_b,
                dim: self.dim(),
            });
        }
        self.split = Some((d_a, d_b));
        Ok(self)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            mat: CMat::identity(dim, dim),
            split: None,
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            mat: CMat::zeros(dim, dim),
            split: None,
        }
    }

    /// Rank-1 projector |v><v| / <v|v>.
    pub fn projector(v: &CVec) -> Self {
        let n2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let mat = CMat::from_fn(v.len(), v.len(), |i, j| v[i] * v[j].conj() / n2);
        Self { mat, split: None }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn split(&self) -> Option<(usize, usize)> {
        self.split
    }

    pub fn mat(&self) -> &CMat {
        &self.mat
    }

    pub fn into_mat(self) -> CMat {
        self.mat
    }

    pub fn trace(&self) -> C64 {
        self.mat.diagonal().sum()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            mat: self.mat.adjoint(),
            split: self.split,
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            mat: &self.mat * c,
            split: self.split,
        }
    }

    pub fn scale_re(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self {
            mat: &self.mat + &other.mat,
            split: self.split.or(other.split),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self {
            mat: &self.mat - &other.mat,
            split: self.split.or(other.split),
        })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self {
            mat: &self.mat * &other.mat,
            split: self.split.or(other.split),
        })
    }

    /// Max-entry deviation from Hermiticity.
    pub fn herm_deviation(&self) -> f64 {
        let adj = self.mat.adjoint();
        (&self.mat - adj)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Hermitian part (X + X^dag)/2.
    pub fn symmetrize(&self) -> Self {
        Self {
            mat: (&self.mat + self.mat.adjoint()) * C64::new(0.5, 0.0),
            split: self.split,
        }
    }

    pub fn max_entry_norm(&self) -> f64 {
        self.mat.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }

    fn require_split(&self) -> Result<(usize, usize)> {
        self.split.ok_or(Error::MissingSplit)
    }
}

/// Result of a Hermitian eigendecomposition, eigenvalues sorted descending.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvector columns, matching `eigenvalues` order.
    pub eigenvectors: CMat,
}

impl HermitianEig {
    pub fn top_eigenvector(&self) -> CVec {
        self.eigenvectors.column(0).into_owned()
    }

    pub fn bottom_eigenvector(&self) -> CVec {
        self.eigenvectors
            .column(self.eigenvalues.len() - 1)
            .into_owned()
    }
}

/// Kronecker product, A slow / B fast; result carries the (dim a, dim b) split.
pub fn kron(a: &OperatorMatrix, b: &OperatorMatrix) -> OperatorMatrix {
    let (da, db) = (a.dim(), b.dim());
    let mat = CMat::from_fn(da * db, da * db, |r, c| {
        a.mat[(r / db, c / db)] * b.mat[(r % db, c % db)]
    });
    OperatorMatrix {
        mat,
        split: Some((da, db)),
    }
}

/// Eigendecomposition of a Hermitian operator.
///
/// The input is checked against [`TOL_HERM`] in max-entry norm and
/// symmetrized before decomposition; eigenvalues come back descending.
pub fn hermitian_eig(x: &OperatorMatrix) -> Result<HermitianEig> {
    let dev = x.herm_deviation();
    if dev > TOL_HERM {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let sym = x.symmetrize();
    let eig = nalgebra::SymmetricEigen::new(sym.mat);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].partial_cmp(&eig.eigenvalues[i]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let n = eigenvalues.len();
    let eigenvectors = CMat::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(HermitianEig {
        eigenvalues,
        eigenvectors,
    })
}

/// Largest |eigenvalue| of a Hermitian operator.
pub fn operator_norm(x: &OperatorMatrix) -> Result<f64> {
    let eig = hermitian_eig(x)?;
    Ok(eig.eigenvalues.iter().map(|l| l.abs()).fold(0.0, f64::max))
}

/// Partial transpose on the chosen subsystem. Involutive and bit-exact.
pub fn partial_transpose(x: &OperatorMatrix, subsystem: Subsystem) -> Result<OperatorMatrix> {
    let (da, db) = x.require_split()?;
    let dim = x.dim();
    let mat = CMat::from_fn(dim, dim, |r, c| {
        let (i, k) = (r / db, r % db);
        let (j, l) = (c / db, c % db);
        match subsystem {
            Subsystem::A => x.mat[(j * db + k, i * db + l)],
            Subsystem::B => x.mat[(i * db + l, j * db + k)],
        }
    });
    Ok(OperatorMatrix {
        mat,
        split: Some((da, db)),
    })
}

/// Partial trace over the chosen subsystem; preserves the total trace.
pub fn partial_trace(x: &OperatorMatrix, traced: Subsystem) -> Result<OperatorMatrix> {
    let (da, db) = x.require_split()?;
    let mat = match traced {
        Subsystem::A => CMat::from_fn(db, db, |k, l| {
            (0..da).map(|i| x.mat[(i * db + k, i * db + l)]).sum()
        }),
        Subsystem::B => CMat::from_fn(da, da, |i, j| {
            (0..db).map(|k| x.mat[(i * db + k, j * db + k)]).sum()
        }),
    };
    Ok(OperatorMatrix { mat, split: None })
}

/// Contraction tr_B[(1 (x) Y) X], an operator on A.
///
/// Satisfies tr[(rho (x) Y) X] = tr_A[rho * contract_b(X, Y)].
pub fn contract_b(x: &OperatorMatrix, y: &OperatorMatrix) -> Result<OperatorMatrix> {
    let (da, db) = x.require_split()?;
    if y.dim() != db {
        return Err(Error::DimMismatch {
            left: y.dim(),
            right: db,
        });
    }
    let mat = CMat::from_fn(da, da, |i, j| {
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..db {
            for l in 0..db {
                acc += y.mat[(k, l)] * x.mat[(i * db + l, j * db + k)];
            }
        }
        acc
    });
    Ok(OperatorMatrix { mat, split: None })
}

/// Contraction tr_A[(Y (x) 1) X], an operator on B.
///
/// Satisfies tr[(Y (x) rho) X] = tr_B[rho * contract_a(X, Y)].
pub fn contract_a(x: &OperatorMatrix, y: &OperatorMatrix) -> Result<OperatorMatrix> {
    let (da, db) = x.require_split()?;
    if y.dim() != da {
        return Err(Error::DimMismatch {
            left: y.dim(),
            right: da,
        });
    }
    let mat = CMat::from_fn(db, db, |k, l| {
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..da {
            for j in 0..da {
                acc += y.mat[(i, j)] * x.mat[(j * db + k, i * db + l)];
            }
        }
        acc
    });
    Ok(OperatorMatrix { mat, split: None })
}

/// Hilbert-Schmidt inner product tr(A^dag B).
pub fn hs_inner(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<C64> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let mut acc = C64::new(0.0, 0.0);
    for j in 0..a.dim() {
        for i in 0..a.dim() {
            acc += a.mat[(i, j)].conj() * b.mat[(i, j)];
        }
    }
    Ok(acc)
}

/// Singular value decomposition of a real 3x3 matrix: T = U diag(s) V^T.
///
/// Computed from the eigendecomposition of T^T T; left vectors are rebuilt
/// sign-consistently as u_k = T v_k / s_k, with orthonormal completion for
/// (near-)zero singular values.
#[derive(Debug, Clone)]
pub struct Svd3 {
    /// Singular values, descending, nonnegative.
    pub s: [f64; 3],
    pub u: RealMatrix3,
    pub v: RealMatrix3,
}

pub fn svd3(t: &RealMatrix3) -> Svd3 {
    let gram = t.transpose() * t;
    let eig = nalgebra::SymmetricEigen::new(gram);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| eig.eigenvalues[j].partial_cmp(&eig.eigenvalues[i]).unwrap());
    let mut s = [0.0f64; 3];
    let mut v = RealMatrix3::zeros();
    for (k, &i) in order.iter().enumerate() {
        s[k] = eig.eigenvalues[i].max(0.0).sqrt();
        v.set_column(k, &eig.eigenvectors.column(i).into_owned());
    }
    // Left vectors: T v_k / s_k where well-defined, else orthonormal fill-in.
    let mut u = RealMatrix3::zeros();
    let scale = s[0].max(1.0);
    for k in 0..3 {
        let col = if s[k] > 1e-14 * scale {
            t * v.column(k) / s[k]
        } else {
            orthonormal_completion(&u, k)
        };
        u.set_column(k, &col);
    }
    Svd3 { s, u, v }
}

fn orthonormal_completion(u: &RealMatrix3, k: usize) -> Vector3<f64> {
    for cand in [Vector3::x(), Vector3::y(), Vector3::z()] {
        let mut w = cand;
        for j in 0..k {
            let uj = u.column(j);
            w -= uj * uj.dot(&w);
        }
        if w.norm() > 1e-6 {
            return w / w.norm();
        }
    }
    unreachable!("three candidates always span a complement of rank < 3");
}

/// Singular values of a real 3x3 matrix, descending.
pub fn singular_values(t: &RealMatrix3) -> [f64; 3] {
    svd3(t).s
}

/// Nuclear norm tr sqrt(T^T T), the sum of singular values.
pub fn nuclear_norm(t: &RealMatrix3) -> f64 {
    singular_values(t).iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objects::{sigma_x, sigma_z};
    use approx::assert_relative_eq;

    fn phi_plus() -> OperatorMatrix {
        let v = CVec::from_vec(vec![
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
        ]);
        OperatorMatrix::projector(&v).split_as(2, 2).unwrap()
    }

    #[test]
    fn kron_pauli_identity() {
        let zz = kron(&sigma_z(), &sigma_z());
        for (i, want) in [1.0, -1.0, -1.0, 1.0].into_iter().enumerate() {
            assert_relative_eq!(zz.mat()[(i, i)].re, want);
        }
        let i4 = kron(&OperatorMatrix::identity(2), &OperatorMatrix::identity(2));
        assert_eq!(i4.mat(), OperatorMatrix::identity(4).mat());
        let p0 = OperatorMatrix::projector(&CVec::from_vec(vec![
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
        ]));
        let p00 = kron(&p0, &p0);
        assert_relative_eq!(p00.mat()[(0, 0)].re, 1.0);
        assert_relative_eq!(p00.mat().iter().map(|z| z.norm()).sum::<f64>(), 1.0);
    }

    #[test]
    fn hermitian_eig_pauli_and_mixed() {
        let e = hermitian_eig(&sigma_z()).unwrap();
        assert_relative_eq!(e.eigenvalues[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(e.eigenvalues[1], -1.0, epsilon = 1e-12);

        let q = OperatorMatrix::identity(4).scale_re(0.25);
        let e = hermitian_eig(&q).unwrap();
        for l in e.eigenvalues {
            assert_relative_eq!(l, 0.25, epsilon = 1e-12);
        }
    }

    #[test]
    fn hermitian_eig_reconstruction_and_orthonormality() {
        let pt = partial_transpose(&phi_plus(), Subsystem::A).unwrap();
        let e = hermitian_eig(&pt).unwrap();
        assert_relative_eq!(e.eigenvalues[0], 0.5, epsilon = 1e-10);
        assert_relative_eq!(e.eigenvalues[3], -0.5, epsilon = 1e-10);
        // V Lambda V^dag reconstruction.
        let n = 4;
        let lam = CMat::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(e.eigenvalues[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let rec = &e.eigenvectors * lam * e.eigenvectors.adjoint();
        let dev = (pt.mat() - rec)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(dev <= 1e-9, "reconstruction deviation {dev}");
        let gram = e.eigenvectors.adjoint() * &e.eigenvectors;
        let id_dev = (gram - CMat::identity(n, n))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(id_dev <= 1e-10);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = CMat::zeros(2, 2);
        m[(0, 1)] = C64::new(1.0, 0.0);
        let x = OperatorMatrix::new(m).unwrap();
        assert!(matches!(hermitian_eig(&x), Err(Error::NotHermitian { .. })));
        assert!(matches!(operator_norm(&x), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn singular_values_examples() {
        let t = RealMatrix3::from_diagonal(&Vector3::new(-1.0, 1.0, 1.0));
        let s = singular_values(&t);
        for sk in s {
            assert_relative_eq!(sk, 1.0, epsilon = 1e-12);
        }
        assert_eq!(singular_values(&RealMatrix3::zeros()), [0.0, 0.0, 0.0]);
        let t = RealMatrix3::from_diagonal(&Vector3::new(0.0, 0.0, 1.0));
        let s = singular_values(&t);
        assert_relative_eq!(s[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(s[1], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn nuclear_norm_examples() {
        let t = RealMatrix3::from_diagonal(&Vector3::new(-1.0, 1.0, 1.0));
        assert_relative_eq!(nuclear_norm(&t), 3.0, epsilon = 1e-12);
        let t = RealMatrix3::from_diagonal(&Vector3::new(0.0, 0.0, 1.0));
        assert_relative_eq!(nuclear_norm(&t), 1.0, epsilon = 1e-12);
        let t = RealMatrix3::from_diagonal(&Vector3::new(1.0, -1.0, 1.0)) * 0.2;
        assert_relative_eq!(nuclear_norm(&t), 0.6, epsilon = 1e-12);
    }

    #[test]
    fn svd3_reconstructs() {
        let t = RealMatrix3::new(0.3, -1.2, 0.0, 0.5, 0.1, 0.9, -0.4, 0.0, 0.7);
        let svd = svd3(&t);
        let rec = svd.u * RealMatrix3::from_diagonal(&Vector3::from(svd.s)) * svd.v.transpose();
        assert_relative_eq!(rec, t, epsilon = 1e-10);
        assert!(svd.s[0] >= svd.s[1] && svd.s[1] >= svd.s[2] && svd.s[2] >= 0.0);
    }

    #[test]
    fn operator_norm_examples() {
        assert_relative_eq!(operator_norm(&sigma_x()).unwrap(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(
            operator_norm(&OperatorMatrix::identity(5)).unwrap(),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn partial_transpose_examples() {
        // Product operator: PT over A transposes the A factor only.
        let a = sigma_x()
            .matmul(&sigma_z())
            .unwrap()
            .scale(C64::new(0.0, 1.0));
        let b = sigma_x();
        let prod = kron(&a, &b);
        let pt = partial_transpose(&prod, Subsystem::A).unwrap();
        let at = OperatorMatrix::new(a.mat().transpose()).unwrap();
        let want = kron(&at, &b);
        assert_relative_eq!(
            pt.sub(&want).unwrap().max_entry_norm(),
            0.0,
            epsilon = 1e-14
        );

        let i4 = OperatorMatrix::identity(4).split_as(2, 2).unwrap();
        let pt = partial_transpose(&i4, Subsystem::B).unwrap();
        assert_eq!(pt.mat(), i4.mat());

        // Involution is bit-exact.
        let x = phi_plus();
        let twice =
            partial_transpose(&partial_transpose(&x, Subsystem::A).unwrap(), Subsystem::A).unwrap();
        assert_eq!(twice.mat(), x.mat());
    }

    #[test]
    fn partial_trace_examples() {
        let red = partial_trace(&phi_plus(), Subsystem::A).unwrap();
        for i in 0..2 {
            assert_relative_eq!(red.mat()[(i, i)].re, 0.5, epsilon = 1e-12);
        }
        assert_relative_eq!(red.mat()[(0, 1)].norm(), 0.0, epsilon = 1e-12);

        let a = sigma_z();
        let b = sigma_x();
        let tr_a = partial_trace(&kron(&a, &b), Subsystem::A).unwrap();
        // tr(sigma_z) = 0, so the reduction vanishes.
        assert_relative_eq!(tr_a.max_entry_norm(), 0.0, epsilon = 1e-14);

        let mut diag = CMat::zeros(4, 4);
        diag[(0, 0)] = C64::new(1.0, 0.0);
        let x = OperatorMatrix::with_split(diag, 2, 2).unwrap();
        let red = partial_trace(&x, Subsystem::B).unwrap();
        assert_relative_eq!(red.mat()[(0, 0)].re, 1.0, epsilon = 1e-14);
        assert_relative_eq!(red.mat()[(1, 1)].re, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn partial_trace_preserves_trace() {
        let x = phi_plus();
        let t0 = x.trace();
        let t1 = partial_trace(&x, Subsystem::B).unwrap().trace();
        assert_relative_eq!(t0.re, t1.re, epsilon = 1e-12);
    }

    #[test]
    fn hs_inner_examples() {
        assert_relative_eq!(
            hs_inner(&sigma_x(), &sigma_x()).unwrap().re,
            2.0,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            hs_inner(&sigma_x(), &sigma_z()).unwrap().norm(),
            0.0,
            epsilon = 1e-12
        );
        let v = CVec::from_vec(vec![
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(-1.0, 0.0),
        ]);
        let phi_minus = OperatorMatrix::projector(&v);
        let q = OperatorMatrix::identity(4).scale_re(0.25);
        assert_relative_eq!(hs_inner(&q, &phi_minus).unwrap().re, 0.25, epsilon = 1e-12);
    }

    #[test]
    fn contractions_match_definitions() {
        let a = sigma_z();
        let b = sigma_x();
        let x = phi_plus();
        // tr[(a (x) b) X] must equal tr_A[a * contract_b(X, b)].
        let lhs = hs_inner(&kron(&a, &b).adjoint(), &x).unwrap();
        let k = contract_b(&x, &b).unwrap();
        let rhs = a.matmul(&k).unwrap().trace();
        assert_relative_eq!(lhs.re, rhs.re, epsilon = 1e-12);
        let k = contract_a(&x, &a).unwrap();
        let rhs = b.matmul(&k).unwrap().trace();
        assert_relative_eq!(lhs.re, rhs.re, epsilon = 1e-12);
    }

    fn arb_matrix(dim: usize) -> impl proptest::strategy::Strategy<Value = CMat> {
        use proptest::prelude::*;
        proptest::collection::vec((-10.0..10.0f64, -10.0..10.0f64), dim * dim).prop_map(
            move |entries| {
                CMat::from_fn(dim, dim, |i, j| {
                    let (re, im) = entries[i * dim + j];
                    C64::new(re, im)
                })
            },
        )
    }

    proptest::proptest! {
        #[test]
        fn kron_trace_is_multiplicative(a in arb_matrix(2), b in arb_matrix(3)) {
            let a = OperatorMatrix::new(a).unwrap();
            let b = OperatorMatrix::new(b).unwrap();
            let lhs = kron(&a, &b).trace();
            let rhs = a.trace() * b.trace();
            proptest::prop_assert!((lhs - rhs).norm() <= 1e-9 * (1.0 + rhs.norm()));
        }

        #[test]
        fn partial_transpose_is_involutive(m in arb_matrix(6)) {
            let x = OperatorMatrix::with_split(m, 2, 3).unwrap();
            for side in [Subsystem::A, Subsystem::B] {
                let twice = partial_transpose(&partial_transpose(&x, side).unwrap(), side).unwrap();
                proptest::prop_assert!(twice.sub(&x).unwrap().max_entry_norm() == 0.0);
            }
        }

        #[test]
        fn partial_traces_are_consistent(m in arb_matrix(6)) {
            let x = OperatorMatrix::with_split(m, 2, 3).unwrap();
            let ta = partial_trace(&x, Subsystem::A).unwrap();
            let tb = partial_trace(&x, Subsystem::B).unwrap();
            proptest::prop_assert!((ta.trace() - x.trace()).norm() <= 1e-9);
            proptest::prop_assert!((tb.trace() - x.trace()).norm() <= 1e-9);
        }
    }
}
