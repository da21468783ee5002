"""
CIP-FEM for the Helmholtz equation on uniform tensor-product meshes of the
unit interval and the unit square.

    a(u, v) = (grad u, grad v) - k^2 (u, v) + J(u, v) + i k <u, v>_Robin
    J(u, v) = gamma h^(2p-1) sum_faces int [d^p u/dn^p][d^p v/dn^p]

The p-th derivative of a degree-p Lagrange function is constant on each
element, so every face term is an outer product of 1D jump vectors with
(in 2D) the 1D edge mass matrix; no face quadrature is needed.
"""

import time
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from basis import (
    basis_integrals,
    check_order,
    element_matrices,
    gauss_points,
    lagrange_values,
    pth_derivative_values,
)
from dispersion import resolve_gamma
from errors import DegenerateInput, ResourceExhausted, SolverFailure
from exact import to_float
from logger import get_logger
from settings import get_setting
from symbol import direction_cosines

logger = get_logger()

EXAMPLE_DIMENSIONS = {"ex1": 1, "ex2": 2}


@dataclass(frozen=True)
class TensorMesh:
    d: int
    n: int

    def __post_init__(self):
        if self.d not in (1, 2):
            raise DegenerateInput("FEM meshes are 1D or 2D", {"d": self.d})
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise DegenerateInput("need at least one element per direction", {"n": self.n})

    @property
    def h(self):
        return 1.0 / self.n

    def nodes_per_dim(self, p):
        return self.n * p + 1

    def dof_count(self, p):
        return self.nodes_per_dim(p) ** self.d

    def node_coordinates(self, p):
        """Nodes in lexicographic order (x index slowest); shape (dofs,) in 1D, (dofs, 2) in 2D."""
        line = np.linspace(0.0, 1.0, self.nodes_per_dim(p))
        if self.d == 1:
            return line
        x, y = np.meshgrid(line, line, indexing="ij")
        return np.column_stack([x.ravel(), y.ravel()])

    def element_dofs(self, p):
        """(elements, (p+1)^d) global indices; local index i*(p+1) + j in 2D."""
        local = np.arange(p + 1)
        starts = np.arange(self.n) * p
        line = starts[:, None] + local[None, :]
        if self.d == 1:
            return line
        size = self.nodes_per_dim(p)
        dofs = line[:, None, :, None] * size + line[None, :, None, :]
        return dofs.reshape(self.n * self.n, (p + 1) ** 2)


@dataclass
class FESystem:
    matrix: object  # scipy.sparse.csr_matrix, complex
    rhs: np.ndarray
    mesh: TensorMesh
    p: int
    k: float
    gamma: float
    example: str
    dirichlet: tuple = ()
    params: dict = field(default_factory=dict)

    @property
    def dofs(self):
        return self.matrix.shape[0]


@dataclass(frozen=True)
class ErrorRecord:
    p: int
    k: float
    n: int
    gamma: float
    rel_h1_error: float
    dofs: int
    wall_time: float

    def as_row(self):
        return {
            "p": self.p, "k": self.k, "n": self.n, "h": 1.0 / self.n, "t": self.k / self.n,
            "gamma": self.gamma, "rel_h1_error": self.rel_h1_error, "dofs": self.dofs,
        }


# exact solutions


def exact_solution(example, k):
    """(u, grad u) callables for the example; grad returns a tuple in 2D."""
    k = float(k)
    if example == "ex1":
        # -u'' - k^2 u = 1, u(0) = 0, u'(1) + i k u(1) = 0
        b = 1j * (np.exp(-1j * k) - 1.0)

        def u(x):
            return (np.cos(k * x) - 1.0 + b * np.sin(k * x)) / k ** 2

        def grad(x):
            return (-np.sin(k * x) + b * np.cos(k * x)) / k

        return u, grad
    if example == "ex2":
        a = k / np.sqrt(2.0)

        def u(x, y):
            return np.sin(a * (x + y)) + 0j

        def grad(x, y):
            g = a * np.cos(a * (x + y)) + 0j
            return g, g

        return u, grad
    raise DegenerateInput("unknown example", {"example": example})


def _robin_data(example, k):
    """g = du/dn + i k u on each side of the unit square: side -> g(s) along the side."""
    u, grad = exact_solution(example, k)
    k = float(k)
    return {
        "x0": lambda s: -grad(0.0 * s, s)[0] + 1j * k * u(0.0 * s, s),
        "x1": lambda s: grad(0.0 * s + 1.0, s)[0] + 1j * k * u(0.0 * s + 1.0, s),
        "y0": lambda s: -grad(s, 0.0 * s)[1] + 1j * k * u(s, 0.0 * s),
        "y1": lambda s: grad(s, 0.0 * s + 1.0)[1] + 1j * k * u(s, 0.0 * s + 1.0),
    }


# assembly


def _float_element_data(p):
    em = element_matrices(p)
    jump = np.array([to_float(v) for v in pth_derivative_values(p)])
    w = np.zeros(2 * p + 1)
    w[:p + 1] -= jump
    w[p:] += jump
    return em.stiffness_array(), em.mass_array(), w


def _coo(dofs, local, size):
    """Sparse sum of one local matrix scattered over every row of dofs."""
    count, nl = dofs.shape
    rows = np.broadcast_to(dofs[:, :, None], (count, nl, nl)).ravel()
    cols = np.broadcast_to(dofs[:, None, :], (count, nl, nl)).ravel()
    vals = np.broadcast_to(local, (count, nl, nl)).ravel()
    return scipy.sparse.coo_matrix((vals, (rows, cols)), shape=(size, size), dtype=complex).tocsr()


def _face_dofs(mesh, p):
    """Global dofs of the two elements sharing each interior face (x-faces, y-faces)."""
    span = np.arange(2 * p + 1)
    starts = np.arange(mesh.n - 1) * p
    if mesh.d == 1:
        return starts[:, None] + span[None, :], None
    size = mesh.nodes_per_dim(p)
    across = starts[:, None] + span[None, :]  # (n-1, 2p+1)
    along = np.arange(mesh.n)[:, None] * p + np.arange(p + 1)[None, :]  # (n, p+1)
    x_faces = (across[:, None, :, None] * size + along[None, :, None, :]).reshape(-1, (2 * p + 1) * (p + 1))
    y_faces = (along[:, None, :, None] * size + across[None, :, None, :]).reshape(-1, (p + 1) * (2 * p + 1))
    return x_faces, y_faces


def volume_matrix(mesh, p, k):
    """(grad u, grad v) - k^2 (u, v); scaled by 1/h in 1D, unscaled in 2D."""
    p = check_order(p)
    stiff, mass, _ = _float_element_data(p)
    t_sq = (k * mesh.h) ** 2
    size = mesh.dof_count(p)
    if mesh.d == 1:
        local = (stiff - t_sq * mass) / mesh.h
    else:
        local = np.kron(stiff, mass) + np.kron(mass, stiff) - t_sq * np.kron(mass, mass)
    return _coo(mesh.element_dofs(p), local, size)


def penalty_matrix(mesh, p, gamma):
    """The jump penalty J alone."""
    p = check_order(p)
    size = mesh.dof_count(p)
    if gamma == 0 or mesh.n < 2:
        return scipy.sparse.csr_matrix((size, size), dtype=complex)
    _, mass, w = _float_element_data(p)
    jump = np.outer(w, w)
    x_faces, y_faces = _face_dofs(mesh, p)
    if mesh.d == 1:
        return _coo(x_faces, gamma / mesh.h * jump, size)
    return _coo(x_faces, gamma * np.kron(jump, mass), size) + _coo(y_faces, gamma * np.kron(mass, jump), size)


def _boundary_edges(mesh, p):
    """Per side of the unit square: (global dofs of each boundary edge, edge start coordinates)."""
    size = mesh.nodes_per_dim(p)
    along = np.arange(mesh.n)[:, None] * p + np.arange(p + 1)[None, :]
    starts = np.arange(mesh.n) * mesh.h
    return {
        "x0": (along, starts),
        "x1": ((size - 1) * size + along, starts),
        "y0": (along * size, starts),
        "y1": (along * size + size - 1, starts),
    }


def robin_matrix(mesh, p, k, example):
    """i k <u, v> on the Robin part of the boundary."""
    p = check_order(p)
    size = mesh.dof_count(p)
    if example == "ex1":
        robin = scipy.sparse.lil_matrix((size, size), dtype=complex)
        robin[size - 1, size - 1] = 1j * k
        return robin.tocsr()
    _, mass, _ = _float_element_data(p)
    local = 1j * k * mesh.h * mass
    total = scipy.sparse.csr_matrix((size, size), dtype=complex)
    for dofs, _ in _boundary_edges(mesh, p).values():
        total = total + _coo(dofs, local, size)
    return total


def helmholtz_matrix(mesh, p, k, example):
    """Penalty-free (plain FEM) matrix including the Robin terms, before Dirichlet elimination."""
    return volume_matrix(mesh, p, k) + robin_matrix(mesh, p, k, example)


def load_vector(mesh, p, k, example):
    p = check_order(p)
    size = mesh.dof_count(p)
    rhs = np.zeros(size, dtype=complex)
    if example == "ex1":
        # f = 1, g = 0
        integrals = np.array([to_float(v) for v in basis_integrals(p)])
        np.add.at(rhs, mesh.element_dofs(p), mesh.h * integrals[None, :])
        return rhs
    points, weights = gauss_points(p + 2)
    values, _ = lagrange_values(p, points)
    for side, (dofs, starts) in _boundary_edges(mesh, p).items():
        g = _robin_data(example, k)[side](starts[:, None] + mesh.h * points[None, :])
        contrib = mesh.h * (g * weights[None, :]) @ values.T
        np.add.at(rhs, dofs, contrib)
    return rhs


def _eliminate_dirichlet(matrix, rhs, nodes):
    matrix = matrix.tolil()
    for node in nodes:
        matrix[node, :] = 0.0
        matrix[:, node] = 0.0
        matrix[node, node] = 1.0
        rhs[node] = 0.0
    return matrix.tocsr(), rhs


def assemble(mesh, p, k, gamma, example):
    """
    FESystem for Example ex1 (1D: f = 1, u(0) = 0, Robin at x = 1) or ex2
    (2D: f = 0, Robin on the whole boundary with data from the plane wave).
    """
    p = check_order(p)
    if EXAMPLE_DIMENSIONS.get(example) != mesh.d:
        raise DegenerateInput("example does not match mesh dimension", {"example": example, "d": mesh.d})
    matrix = helmholtz_matrix(mesh, p, k, example)
    if gamma:
        matrix = matrix + penalty_matrix(mesh, p, gamma)
    rhs = load_vector(mesh, p, k, example)
    dirichlet = (0,) if example == "ex1" else ()
    if dirichlet:
        matrix, rhs = _eliminate_dirichlet(matrix, rhs, dirichlet)
    logger.debug(f"Assembled {example}: p={p}, k={k}, n={mesh.n}, gamma={gamma}, dofs={matrix.shape[0]}, nnz={matrix.nnz}")
    return FESystem(matrix.tocsr(), rhs, mesh, p, float(k), float(gamma), example, dirichlet)


# solve


def _to_banded(matrix, bandwidth):
    coo = matrix.tocoo()
    size = matrix.shape[0]
    ab = np.zeros((2 * bandwidth + 1, size), dtype=complex)
    ab[bandwidth + coo.row - coo.col, coo.col] = coo.data
    return ab


def solve(system):
    """Direct solve: banded elimination in 1D, sparse LU with COLAMD ordering in 2D."""
    matrix = system.matrix
    rhs = system.rhs
    try:
        if system.mesh.d == 1:
            bandwidth = 2 * system.p
            solution = scipy.linalg.solve_banded((bandwidth, bandwidth), _to_banded(matrix, bandwidth), rhs)
        else:
            lu = scipy.sparse.linalg.splu(matrix.tocsc(), permc_spec="COLAMD")
            solution = lu.solve(rhs)
    except (np.linalg.LinAlgError, RuntimeError, ValueError) as e:
        raise SolverFailure("factorization broke down",
                            {"p": system.p, "k": system.k, "n": system.mesh.n, "reason": str(e)})
    residual = np.linalg.norm(matrix @ solution - rhs) / max(np.linalg.norm(rhs), np.finfo(float).tiny)
    tol = get_setting("SOLVER_RESIDUAL_TOL")
    if not np.isfinite(residual) or residual > tol:
        raise SolverFailure("relative residual above tolerance",
                            {"p": system.p, "k": system.k, "n": system.mesh.n, "residual": float(residual), "tol": tol})
    logger.debug(f"Solved {system.dofs} dofs, relative residual {residual:.2e}")
    return solution


# errors


def interpolate(mesh, p, u):
    """Nodal interpolant: values of u at the mesh nodes."""
    nodes = mesh.node_coordinates(p)
    if mesh.d == 1:
        return np.asarray(u(nodes), dtype=complex)
    return np.asarray(u(nodes[:, 0], nodes[:, 1]), dtype=complex)


def h1_relative_error(solution, exact, mesh, p):
    """||u - u_h||_H1 / ||u||_H1 with p+2 Gauss points per direction and element."""
    u, grad = exact
    h = mesh.h
    points, weights = gauss_points(p + 2)
    values, derivs = lagrange_values(p, points)
    dofs = mesh.element_dofs(p)
    coeffs = np.asarray(solution)[dofs]
    if mesh.d == 1:
        x = (np.arange(mesh.n)[:, None] + points[None, :]) * h
        uh = coeffs @ values
        duh = coeffs @ derivs / h
        w = h * weights[None, :]
        err = np.sum(w * (np.abs(u(x) - uh) ** 2 + np.abs(grad(x) - duh) ** 2))
        norm = np.sum(w * (np.abs(u(x)) ** 2 + np.abs(grad(x)) ** 2))
        return float(np.sqrt(err / norm))
    coeffs = coeffs.reshape(-1, p + 1, p + 1)
    uh = np.einsum("eij,ia,jb->eab", coeffs, values, values)
    uxh = np.einsum("eij,ia,jb->eab", coeffs, derivs, values) / h
    uyh = np.einsum("eij,ia,jb->eab", coeffs, values, derivs) / h
    ex, ey = np.divmod(np.arange(mesh.n * mesh.n), mesh.n)
    shape = (ex.size, points.size, points.size)
    x = np.broadcast_to(((ex[:, None] + points[None, :]) * h)[:, :, None], shape)
    y = np.broadcast_to(((ey[:, None] + points[None, :]) * h)[:, None, :], shape)
    w = h * h * np.outer(weights, weights)[None, :, :]
    ux, uy = grad(x, y)
    ue = u(x, y)
    err = np.sum(w * (np.abs(ue - uh) ** 2 + np.abs(ux - uxh) ** 2 + np.abs(uy - uyh) ** 2))
    norm = np.sum(w * (np.abs(ue) ** 2 + np.abs(ux) ** 2 + np.abs(uy) ** 2))
    return float(np.sqrt(err / norm))


def interpolation_error(example, p, k, n):
    """Relative H1 error of the nodal interpolant, the best-approximation reference."""
    mesh = TensorMesh(EXAMPLE_DIMENSIONS[example], n)
    exact = exact_solution(example, k)
    return h1_relative_error(interpolate(mesh, p, exact[0]), exact, mesh, p)


def run_example(example, p, k, n, gamma=0.0):
    """assemble -> solve -> relative H1 error."""
    if example not in EXAMPLE_DIMENSIONS:
        raise DegenerateInput("unknown example", {"example": example})
    if not k > 0:
        raise DegenerateInput("k must be positive", {"k": k})
    start = time.perf_counter()
    mesh = TensorMesh(EXAMPLE_DIMENSIONS[example], int(n))
    system = assemble(mesh, p, k, gamma, example)
    solution = solve(system)
    error = h1_relative_error(solution, exact_solution(example, k), mesh, p)
    elapsed = time.perf_counter() - start
    logger.info(f"{example}: p={p} k={k} n={n} gamma={gamma:.6e} rel_h1={error:.6e} ({elapsed:.2f}s)")
    return ErrorRecord(p, float(k), int(n), float(gamma), error, system.dofs, elapsed)


@dataclass(frozen=True)
class CriticalMesh:
    h: float
    n: int
    bracket: tuple  # (largest failing n or None, smallest passing n)
    error: float


def critical_mesh_size(example, p, k, epsilon, gamma_rule="fem", n_start=None, n_max=None):
    """
    Largest h = 1/n with relative H1 error <= epsilon: doubling from n_start
    (or halving when n_start already passes), then integer bisection.
    """
    if not 0.0 < epsilon < 1.0:
        raise DegenerateInput("epsilon must lie in (0, 1)", {"epsilon": epsilon})
    n_start = int(n_start or get_setting("CRITICAL_N_START"))
    n_max = int(n_max or get_setting("CRITICAL_N_MAX"))
    cache = {}

    def error(n):
        if n not in cache:
            gamma = resolve_gamma(gamma_rule, p, k / n)
            cache[n] = run_example(example, p, k, n, gamma).rel_h1_error
            logger.debug(f"critical_mesh_size: n={n} error={cache[n]:.4e}")
        return cache[n]

    n = n_start
    if error(n) <= epsilon:
        passing, failing = n, None
        while passing > 1:
            candidate = max(1, passing // 2)
            if error(candidate) > epsilon:
                failing = candidate
                break
            passing = candidate
    else:
        failing = n
        passing = None
        while passing is None:
            n *= 2
            if n > n_max:
                raise ResourceExhausted("error stays above epsilon on the whole ladder",
                                        {"example": example, "p": p, "k": k, "epsilon": epsilon,
                                         "n_max": n_max, "last_error": cache[failing]})
            if error(n) <= epsilon:
                passing = n
            else:
                failing = n
    if failing is not None:
        while passing - failing > 1:
            middle = (passing + failing) // 2
            if error(middle) <= epsilon:
                passing = middle
            else:
                failing = middle
    logger.info(f"critical mesh size: {example} p={p} k={k} eps={epsilon} gamma={gamma_rule} -> n={passing}")
    return CriticalMesh(1.0 / passing, passing, (failing, passing), cache[passing])


# Bloch consistency


def bloch_symbol_from_matrix(system, t_h, direction=None):
    """
    Bloch symbol read off the assembled matrix: the rows of the generating
    nodes of a central element, with U_j replaced by U_c e^{i m . beta}
    (m the element offset of node j, c its position in the generating set)
    and beta = t_h times the direction cosines. Scaled by h^(2-d).
    """
    mesh, p = system.mesh, system.p
    if mesh.n < 6:
        raise DegenerateInput("Bloch extraction needs at least 6 elements per direction", {"n": mesh.n})
    d = mesh.d
    size = mesh.nodes_per_dim(p)
    center = mesh.n // 2
    beta = float(t_h) * np.asarray(direction_cosines(d, direction), dtype=float)
    matrix = system.matrix.tocsr()
    out = np.zeros((p ** d, p ** d), dtype=complex)
    for r in range(p ** d):
        local = np.unravel_index(r, (p,) * d)
        position = [center * p + c for c in local]
        row = position[0] if d == 1 else position[0] * size + position[1]
        start, stop = matrix.indptr[row], matrix.indptr[row + 1]
        for col, value in zip(matrix.indices[start:stop], matrix.data[start:stop]):
            coords = (col,) if d == 1 else divmod(col, size)
            offsets = [c // p - center for c in coords]
            slot = np.ravel_multi_index(tuple(c % p for c in coords), (p,) * d)
            out[r, slot] += value * np.exp(1j * np.dot(offsets, beta))
    return out * mesh.h ** (2 - d)
