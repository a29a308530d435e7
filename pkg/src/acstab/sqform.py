"""Sparse symmetric quadratic forms and smallest-eigenvalue solves.

Every Hessian, Gram matrix and stabilizer in this package is carried by a
:class:`SymQuadForm`.  Stability of a model is decided by the smallest
generalized eigenvalue of the pencil (H, M) where M is a gradient Gram.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

DENSE_CUTOFF = 1400


class IndefiniteGramError(Exception):
    """Raised when the mass form of a pencil is not positive definite."""


class ConvergenceError(Exception):
    """Iterative eigensolve did not reach the requested residual.

    Carries the best iterate found so far in ``result``.
    """

    def __init__(self, msg, result=None):
        super().__init__(msg)
        self.result = result


@dataclass
class SpectralResult:
    lambda_min: float
    eigvec: np.ndarray
    residual: float
    iterations: int


class SymQuadForm:
    """Symmetric bilinear form over an indexed DOF set.

    Entries are accumulated with :meth:`add`; (i, j) and (j, i) land in the
    same slot.  ``finalize`` freezes the form; afterwards it may be used from
    any number of threads.
    """

    def __init__(self, dimension, label=""):
        if dimension <= 0:
            raise ValueError("dimension must be positive")
        self.dimension = int(dimension)
        self.label = label
        self._entries = {}
        self._csr = None

    def add(self, i, j, value):
        if self._csr is not None:
            raise RuntimeError("form already finalized")
        if not (0 <= i < self.dimension and 0 <= j < self.dimension):
            raise IndexError(f"entry ({i},{j}) outside dimension {self.dimension}")
        if i > j:
            i, j = j, i
        key = (i, j)
        self._entries[key] = self._entries.get(key, 0.0) + value

    def add_functional_square(self, functional, coeff=1.0):
        """Accumulate coeff * |sum_k c_k u_k|^2 for functional = [(k, c_k)...]."""
        for i, ci in functional:
            for j, cj in functional:
                if i <= j:
                    self.add(i, j, coeff * ci * cj)

    def add_functional_product(self, f1, f2, coeff=1.0):
        """Accumulate coeff * f1(u) f2(u), symmetrized."""
        for i, ci in f1:
            for j, cj in f2:
                if i <= j:
                    self.add(i, j, 0.5 * coeff * ci * cj)
                if j <= i:
                    self.add(j, i, 0.5 * coeff * ci * cj)

    def finalize(self):
        if self._csr is None:
            n = self.dimension
            if self._entries:
                keys = np.array(list(self._entries.keys()), dtype=np.int64)
                vals = np.array(list(self._entries.values()))
                ii, jj = keys[:, 0], keys[:, 1]
                off = ii != jj
                rows = np.concatenate([ii, jj[off]])
                cols = np.concatenate([jj, ii[off]])
                data = np.concatenate([vals, vals[off]])
                self._csr = sp.csr_matrix((data, (rows, cols)), shape=(n, n))
            else:
                self._csr = sp.csr_matrix((n, n))
        return self._csr

    @property
    def matrix(self):
        return self.finalize()

    def to_dense(self):
        return self.finalize().toarray()

    def quadratic(self, u):
        u = np.asarray(u, dtype=float)
        return float(u @ (self.finalize() @ u))

    def max_abs(self):
        m = self.finalize()
        return float(np.max(np.abs(m.data))) if m.nnz else 0.0

    def scaled_plus(self, other, alpha=1.0):
        """New finalized form self + alpha * other (same dimension)."""
        if other.dimension != self.dimension:
            raise ValueError("dimension mismatch")
        out = SymQuadForm(self.dimension, label=self.label)
        out._csr = (self.finalize() + alpha * other.finalize()).tocsr()
        return out

    def dump(self, path):
        """Write 'i j value' triples (upper triangle), 17 significant digits."""
        m = self.finalize().tocoo()
        with open(path, "w") as fh:
            fh.write(f"# symquadform dim={self.dimension} label={self.label}\n")
            for i, j, v in zip(m.row, m.col, m.data):
                if i <= j:
                    fh.write(f"{i} {j} {v:.17g}\n")

    @classmethod
    def load(cls, path):
        entries = []
        dim = 0
        with open(path) as fh:
            for line in fh:
                if line.startswith("#"):
                    for tok in line.split():
                        if tok.startswith("dim="):
                            dim = int(tok[4:])
                    continue
                i, j, v = line.split()
                entries.append((int(i), int(j), float(v)))
        if dim == 0:
            dim = 1 + max(max(i, j) for i, j, _ in entries)
        out = cls(dim)
        for i, j, v in entries:
            out.add(i, j, v)
        return out


def _seed_vector(n, seed):
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n)
    return v / np.linalg.norm(v)


def _fix_sign(v):
    nz = np.nonzero(np.abs(v) > 1e-14 * (np.max(np.abs(v)) + 1e-300))[0]
    if len(nz) and v[nz[0]] < 0:
        return -v
    return v


def min_generalized_eig(H, M, tol=1e-10, seed=0, sigma=None, maxiter=20000):
    """Algebraically smallest eigenpair of H v = lambda M v.

    H, M may be SymQuadForm or scipy sparse matrices.  M must be positive
    definite (clamped boundaries remove the constant nullspace).  Dense
    LAPACK is used up to DENSE_CUTOFF rows; larger problems go through
    ARPACK (shift-invert when ``sigma`` is supplied, which must then lie
    below the smallest eigenvalue).
    """
    A = H.finalize() if isinstance(H, SymQuadForm) else sp.csr_matrix(H)
    B = M.finalize() if isinstance(M, SymQuadForm) else sp.csr_matrix(M)
    if A.shape != B.shape:
        raise ValueError("dimension mismatch between H and M")
    n = A.shape[0]

    if n <= DENSE_CUTOFF:
        Ad, Bd = A.toarray(), B.toarray()
        try:
            w, V = scipy.linalg.eigh(Ad, Bd, subset_by_index=[0, 0])
        except scipy.linalg.LinAlgError as exc:
            raise IndefiniteGramError(f"Gram not positive definite: {exc}") from exc
        lam, v = float(w[0]), _fix_sign(V[:, 0])
        res = np.linalg.norm(Ad @ v - lam * (Bd @ v)) / np.linalg.norm(v)
        return SpectralResult(lam, v, float(res), 1)

    v0 = _seed_vector(n, seed)
    try:
        if sigma is None:
            w, V = spla.eigsh(A, k=1, M=B, which="SA", v0=v0,
                              tol=max(tol * 1e-2, 1e-14), maxiter=maxiter)
        else:
            w, V = spla.eigsh(A, k=1, M=B, sigma=sigma, which="LM", v0=v0,
                              tol=max(tol * 1e-2, 1e-14), maxiter=maxiter)
    except spla.ArpackNoConvergence as exc:
        best = None
        if len(exc.eigenvalues):
            best = SpectralResult(float(exc.eigenvalues[0]),
                                  _fix_sign(exc.eigenvectors[:, 0]), np.inf, maxiter)
        raise ConvergenceError(str(exc), best) from exc
    except RuntimeError as exc:
        # SuperLU factorization failures surface as RuntimeError
        raise IndefiniteGramError(str(exc)) from exc
    lam, v = float(w[0]), _fix_sign(V[:, 0])
    res = float(np.linalg.norm(A @ v - lam * (B @ v)) / np.linalg.norm(v))
    if not np.isfinite(res) or res > max(tol, 1e-8) * (1.0 + abs(lam)) * max(1.0, abs(A).max()):
        raise ConvergenceError(f"residual {res} above tolerance",
                               SpectralResult(lam, v, res, maxiter))
    return SpectralResult(lam, v, res, maxiter)


def is_stable(H, M, margin=0.0, tol=1e-10, seed=0):
    """True iff lambda_min(H, M) exceeds margin (plus a small numerical floor).

    The floor 1e-10 * max|H| guards against calling a zero crossing by
    round-off alone.
    """
    form = H if isinstance(H, SymQuadForm) else None
    hmax = form.max_abs() if form is not None else float(np.max(np.abs(sp.csr_matrix(H).data or [0.0])))
    floor = margin + 1e-10 * hmax
    r = min_generalized_eig(H, M, tol=tol, seed=seed)
    return bool(r.lambda_min > floor)
