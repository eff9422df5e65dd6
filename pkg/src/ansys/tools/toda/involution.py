# Copyright (C) 2025 ANSYS, Inc. and/or its affiliates.
# SPDX-License-Identifier: MIT
#
#
# Permission is hereby granted, free of charge, to any person obtaining a copy
# of this software and associated documentation files (the "Software"), to deal
# in the Software without restriction, including without limitation the rights
# to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
# copies of the Software, and to permit persons to whom the Software is
# furnished to do so, subject to the following conditions:
#
# The above copyright notice and this permission notice shall be included in all
# copies or substantial portions of the Software.
#
# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
# IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
# FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
# AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
# LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
# OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
# SOFTWARE.


"""
Involutions of the extended Dynkin diagram and their lifts to the Lie algebra.

An involution ``pi`` of the nodes ``0..N`` induces the linear map ``alpha_j -> alpha_{pi(j)}``
on roots. It is lifted to an involutive automorphism ``Theta`` of the Lie algebra by choosing
signs ``b_j`` with ``Theta(R_{alpha_j}) = b_j R_{alpha_{pi(j)}}`` and extending along brackets.
Composing ``Theta`` with the compact conjugation gives the antilinear conjugation of a real
form for which the Coxeter automorphism permutes the extended simple root spaces.

All matrices in this module are exact integer matrices in the Chevalley basis.
"""

from dataclasses import dataclass, field
import itertools
import logging
from typing import TYPE_CHECKING, Dict, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import expm

from ansys.tools.toda.chevalley import (
    AlgebraElement,
    ChevalleyAlgebra,
    adjoint_matrix,
    structure_constant,
)
from ansys.tools.toda.errors import ConstructionError, DomainError
from ansys.tools.toda.rootsystem import (
    Permutation,
    Root,
    RootSystem,
    apply_permutation,
    diagram_automorphisms,
    extended_diagram,
    involutions,
    is_involution,
)

if TYPE_CHECKING:  # pragma: no cover
    from ansys.tools.toda.coxeter import CoxeterAutomorphism

LOG = logging.getLogger(__name__)

CertificateKind = Literal["fixed-node", "gamma", "gamma-delta", "none"]


@dataclass(frozen=True)
class DiagramInvolution:
    """Involution ``pi`` of the extended diagram, ``perm[j]`` being the image of node ``j``."""

    perm: Permutation

    def __post_init__(self):
        perm = tuple(int(p) for p in self.perm)
        object.__setattr__(self, "perm", perm)
        if sorted(perm) != list(range(len(perm))) or not is_involution(perm):
            raise DomainError(f"{perm} is not an involution of the nodes 0..{len(perm) - 1}")

    @property
    def fixed_nodes(self) -> Tuple[int, ...]:
        return tuple(j for j, p in enumerate(self.perm) if p == j)

    @property
    def is_identity(self) -> bool:
        return len(self.fixed_nodes) == len(self.perm)

    def __str__(self) -> str:
        return "(" + " ".join(str(p) for p in self.perm) + ")"


@dataclass(frozen=True)
class Certificate:
    """Witness that an involution lifts with ``b_0 b_{pi(0)} = 1``.

    ``fixed-node`` carries a node fixed by ``pi`` with an odd mark, ``gamma`` a positive root
    ``gamma`` and ``gamma-delta`` a pair of positive roots satisfying the root conditions on
    ``alpha_0`` and ``alpha_{pi(0)}``.
    """

    kind: CertificateKind
    node: Optional[int] = None
    gamma: Optional[Root] = None
    delta: Optional[Root] = None

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "node": self.node,
            "gamma": list(self.gamma.coeffs) if self.gamma is not None else None,
            "delta": list(self.delta.coeffs) if self.delta is not None else None,
        }

    def __str__(self) -> str:
        if self.kind == "fixed-node":
            return f"fixed node {self.node}"
        if self.kind == "gamma":
            return f"gamma={self.gamma}"
        if self.kind == "gamma-delta":
            return f"gamma={self.gamma}, delta={self.delta}"
        return "none"


@dataclass(eq=False)
class CartanInvolution:
    """Involutive automorphism ``Theta`` lifting a diagram involution.

    Attributes
    ----------
    alg : ChevalleyAlgebra
        Algebra acted on.
    involution : DiagramInvolution
        Diagram involution being lifted.
    matrix : numpy.ndarray
        Integer matrix of ``Theta`` in the Chevalley basis.
    signs : tuple of int
        ``b_1 .. b_N``.
    b0 : int
        ``b_0``, the coefficient of ``Theta(R_{alpha_0})``.
    root_signs : dict
        ``s_alpha`` with ``Theta(R_alpha) = s_alpha R_{Theta(alpha)}`` for every root.
    certificate : Certificate
        Certificate returned by :func:`find_certificate`.
    """

    alg: ChevalleyAlgebra
    involution: DiagramInvolution
    matrix: np.ndarray
    signs: Tuple[int, ...]
    b0: int
    root_signs: Dict[Root, int] = field(repr=False)
    certificate: Certificate = field(default_factory=lambda: Certificate("none"))

    def apply(self, x: AlgebraElement) -> AlgebraElement:
        """``Theta(x)``, batched over leading dimensions."""
        x = np.asarray(x)
        if x.dtype == object:
            return self.matrix.astype(object) @ x
        return x @ self.matrix.T

    __call__ = apply

    def to_dict(self) -> dict:
        return {
            "perm": list(self.involution.perm),
            "signs": list(self.signs),
            "b0": self.b0,
            "certificate": self.certificate.to_dict(),
        }


@dataclass(eq=False)
class AntilinearConjugation:
    """Antilinear map ``x -> L conj(x)`` with ``L`` given in the Chevalley basis."""

    alg: ChevalleyAlgebra
    matrix: np.ndarray

    def apply(self, x: AlgebraElement) -> AlgebraElement:
        """Apply the conjugation, batched over leading dimensions."""
        x = np.asarray(x)
        if x.dtype == object:
            return self.matrix.astype(object) @ x
        return np.conj(x) @ self.matrix.T

    __call__ = apply

    def compose(self, other: "AntilinearConjugation") -> np.ndarray:
        """Matrix of the linear map ``self o other``."""
        return self.matrix @ np.conj(other.matrix)

    def is_involutive(self, tolerance: float = 0.0) -> bool:
        square = self.compose(self)
        return bool(np.allclose(square, np.eye(self.alg.dim), rtol=0, atol=tolerance))

    def is_automorphism(self) -> bool:
        """Whether the map preserves brackets.

        The structure constants are real, so an antilinear map with matrix ``L`` is a bracket
        automorphism exactly when ``L`` is one. It is enough to check the generators
        ``R_{+-alpha_j}``.
        """
        return _preserves_brackets(self.alg, np.conj(self.matrix))


def _preserves_brackets(alg: ChevalleyAlgebra, matrix: np.ndarray) -> bool:
    """``matrix ad(e) = ad(matrix e) matrix`` for the generators ``e = R_{+-alpha_j}``."""
    exact = np.issubdtype(matrix.dtype, np.integer)
    for root in alg.rs.simple_roots:
        for sign in (root, -root):
            index = alg.root_index(sign)
            image = matrix[:, index]
            left = matrix @ adjoint_matrix(alg, alg.basis(index).real.astype(np.int64))
            right = adjoint_matrix(alg, image) @ matrix
            if exact:
                if not np.array_equal(left, right):
                    return False
            elif not np.allclose(left, right, rtol=0, atol=1e-10):
                return False
    return True


def _root_images(rs: RootSystem, perm: Sequence[int]) -> Dict[Root, Root]:
    images = {root: apply_permutation(rs, perm, root) for root in rs.roots}
    for root, image in images.items():
        if image not in rs.index:
            raise DomainError(f"Permutation {tuple(perm)} maps the root {root} to {image}")
    return images


def _bracket_words(rs: RootSystem) -> Dict[Root, Tuple[int, Root]]:
    """For each non-simple positive root, the first simple ``alpha_i`` with ``root - alpha_i``
    a root."""
    words: Dict[Root, Tuple[int, Root]] = {}
    for root in rs.positive_roots:
        if root.height < 2:
            continue
        for i, alpha in enumerate(rs.simple_roots):
            rest = root - alpha
            if rest in rs.index and rest.is_positive:
                words[root] = (i, rest)
                break
    return words


def _extend_signs(
    alg: ChevalleyAlgebra,
    images: Dict[Root, Root],
    words: Dict[Root, Tuple[int, Root]],
    signs: Sequence[int],
) -> Dict[Root, int]:
    rs = alg.rs
    s: Dict[Root, int] = {}
    for j, alpha in enumerate(rs.simple_roots):
        s[alpha] = s[-alpha] = int(signs[j])
    for root in rs.positive_roots:
        if root.height < 2:
            continue
        i, rest = words[root]
        alpha = rs.simple_roots[i]
        for a, b in ((alpha, rest), (-alpha, -rest)):
            before = structure_constant(alg, a, b)
            after = structure_constant(alg, images[a], images[b])
            if abs(before) != abs(after) or before == 0:
                raise ConstructionError(
                    f"Structure constants of {a}, {b} and their images differ in magnitude"
                )
            s[a + b] = s[a] * s[b] * (after // before)
    return s


def _theta_matrix(
    alg: ChevalleyAlgebra, perm: Sequence[int], images: Dict[Root, Root], s: Dict[Root, int]
) -> np.ndarray:
    rs, n = alg.rs, alg.rank
    matrix = np.zeros((alg.dim, alg.dim), dtype=np.int64)
    extended = rs.extended_simple_roots
    for j in range(n):
        target = extended[perm[j + 1]]
        matrix[:n, j] = alg.coroots[rs.index[target]]
    for root in rs.roots:
        matrix[alg.root_index(images[root]), alg.root_index(root)] = s[root]
    return matrix


def _sign_orbits(perm: Sequence[int]) -> List[Tuple[int, ...]]:
    """Orbits of ``pi`` on ``1..N`` on which the signs ``b_j`` must agree."""
    orbits, seen = [], set()
    for j in range(1, len(perm)):
        if j in seen:
            continue
        partner = perm[j]
        orbit = (j,) if partner in (0, j) else (j, partner)
        seen.update(orbit)
        orbits.append(orbit)
    return orbits


def _assignment(orbits: Sequence[Tuple[int, ...]], choice: Sequence[int], rank: int) -> tuple:
    signs = [1] * rank
    for orbit, value in zip(orbits, choice):
        for j in orbit:
            signs[j - 1] = value
    return tuple(signs)


def _sign_candidates(rs: RootSystem, perm: Sequence[int]):
    """Sign assignments ``b_1..b_N`` in search order, tagged with the search stage."""
    orbits = _sign_orbits(perm)
    tried = set()
    first = (1,) * rs.rank
    tried.add(first)
    yield "trivial", first
    marks = rs.extended_marks
    for j in range(1, rs.rank + 1):
        if perm[j] == j and marks[j] % 2 == 1:
            signs = list(first)
            signs[j - 1] = -1
            signs = tuple(signs)
            if signs not in tried:
                tried.add(signs)
                yield "fixed-node", signs
    for choice in itertools.product((1, -1), repeat=len(orbits)):
        signs = _assignment(orbits, choice, rs.rank)
        if signs not in tried:
            tried.add(signs)
            yield "exhaustive", signs


def find_certificate(rs: RootSystem, involution: Union[DiagramInvolution, Sequence[int]]):
    """Find the witness that ``b_0 b_{pi(0)} = 1`` can be achieved.

    The search order is: a node fixed by ``pi`` with odd mark (largest mark first, then lowest
    node), a positive root ``gamma`` by increasing height, then pairs ``(gamma, delta)`` in
    lexicographic root order.

    Parameters
    ----------
    rs : RootSystem
        Root system of the algebra.
    involution : DiagramInvolution or sequence of int
        Diagram involution.

    Returns
    -------
    Certificate
        First certificate found, or one of kind ``"none"``.
    """
    perm = _as_involution(involution).perm
    marks = rs.extended_marks
    fixed = [j for j in range(rs.rank + 1) if perm[j] == j and marks[j] % 2 == 1]
    if fixed:
        node = min(fixed, key=lambda j: (-marks[j], j))
        return Certificate("fixed-node", node=node)

    target = perm[0]
    alpha_target = rs.extended_simple_roots[target]
    alpha_0 = rs.lowest_root
    images = _root_images(rs, perm)
    goal = -alpha_0 - alpha_target
    if not any(goal.coeffs):
        # A_1: the empty sum satisfies every condition
        return Certificate("gamma", gamma=goal)
    # roots not involving alpha_{pi(0)}
    free = [g for g in rs.positive_roots if g.coeffs[target - 1] == 0]

    for gamma in free:
        image = images[gamma]
        if (image + alpha_target) in rs.index and gamma + image == goal:
            LOG.debug(f"Involution {perm}: gamma certificate {gamma}")
            return Certificate("gamma", gamma=gamma)

    for gamma in free:
        image = images[gamma]
        if (image + alpha_target) not in rs.index:
            continue
        for delta in free:
            delta_sum = delta + images[delta]
            if delta_sum in rs.index and delta_sum + gamma + image == goal:
                LOG.debug(f"Involution {perm}: gamma-delta certificate {gamma}, {delta}")
                return Certificate("gamma-delta", gamma=gamma, delta=delta)

    LOG.warning(f"No certificate found for the involution {perm} of {rs!r}")
    return Certificate("none")


def _as_involution(involution: Union[DiagramInvolution, Sequence[int]]) -> DiagramInvolution:
    if isinstance(involution, DiagramInvolution):
        return involution
    return DiagramInvolution(tuple(involution))


def lift_involution(
    alg: ChevalleyAlgebra, involution: Union[DiagramInvolution, Sequence[int]]
) -> CartanInvolution:
    """Lift a diagram involution to an involutive automorphism of the algebra.

    The signs ``b_j`` are constant on the orbits of ``pi``. The search first tries all signs
    ``+1``, then flips a fixed node with odd mark, and only then enumerates every admissible
    assignment. Each candidate is extended along fixed bracket words and accepted when
    ``b_0 b_{pi(0)} = 1``; the accepted matrix is checked to square to the identity and to
    preserve brackets.

    Parameters
    ----------
    alg : ChevalleyAlgebra
        Algebra to act on.
    involution : DiagramInvolution or sequence of int
        Involution of the extended diagram of ``alg``.

    Returns
    -------
    CartanInvolution
        The lift.

    Raises
    ------
    DomainError
        ``involution`` does not preserve the extended diagram.
    ConstructionError
        No admissible sign assignment gives an involution.

    Examples
    --------
    >>> from ansys.tools.toda.rootsystem import build_root_system
    >>> from ansys.tools.toda.chevalley import build_chevalley_basis
    >>> alg = build_chevalley_basis(build_root_system("A", 2))
    >>> theta = lift_involution(alg, (0, 2, 1))
    >>> theta.signs
    (1, 1)
    """
    rs = alg.rs
    pi = _as_involution(involution)
    perm = pi.perm
    if len(perm) != rs.rank + 1 or not extended_diagram(rs).is_automorphism(perm):
        raise DomainError(f"{perm} is not an automorphism of the extended diagram of {rs!r}")

    images = _root_images(rs, perm)
    words = _bracket_words(rs)
    certificate = find_certificate(rs, pi)
    extended = rs.extended_simple_roots
    identity = np.eye(alg.dim, dtype=np.int64)

    for stage, signs in _sign_candidates(rs, perm):
        s = _extend_signs(alg, images, words, signs)
        b0 = s[extended[0]]
        if b0 * s[extended[perm[0]]] != 1:
            LOG.debug(f"Involution {perm}: signs {signs} give b_0 b_pi(0) = -1")
            continue
        if stage == "exhaustive":
            LOG.warning(
                f"Involution {perm} of {rs!r} needed the exhaustive sign search "
                f"(certificate: {certificate})"
            )
        matrix = _theta_matrix(alg, perm, images, s)
        if not np.array_equal(matrix @ matrix, identity):
            raise ConstructionError(f"Lift of {perm} does not square to the identity")
        if not _preserves_brackets(alg, matrix):
            raise ConstructionError(f"Lift of {perm} does not preserve brackets")
        LOG.debug(f"Lifted {perm} on {rs!r} with signs {signs} ({stage})")
        return CartanInvolution(alg, pi, matrix, tuple(signs), b0, s, certificate)

    raise ConstructionError(f"No sign assignment lifts {perm} to an involution of {rs!r}")


def enumerate_lifts(alg: ChevalleyAlgebra, method: str = "auto") -> List[CartanInvolution]:
    """Lift every involution of the extended diagram, identity first."""
    diagram = extended_diagram(alg.rs)
    perms = involutions(diagram_automorphisms(diagram, method=method))
    return [lift_involution(alg, perm) for perm in perms]


def compact_conjugation(alg: ChevalleyAlgebra) -> AntilinearConjugation:
    """Conjugation of the compact real form: ``H_i -> -H_i``, ``R_alpha -> -R_{-alpha}``.

    Raises
    ------
    ConstructionError
        The map fails to be an involutive bracket automorphism.
    """
    rs, n = alg.rs, alg.rank
    matrix = np.zeros((alg.dim, alg.dim), dtype=np.int64)
    matrix[:n, :n] = -np.eye(n, dtype=np.int64)
    for root in rs.roots:
        matrix[alg.root_index(-root), alg.root_index(root)] = -1
    conj = AntilinearConjugation(alg, matrix)
    if not conj.is_involutive() or not conj.is_automorphism():
        raise ConstructionError(f"Compact conjugation of {alg!r} is not an involution")
    return conj


def real_form_conjugation(
    theta: CartanInvolution, omega0: Optional[AntilinearConjugation] = None
) -> AntilinearConjugation:
    """Conjugation ``Theta o omega_0`` of the real form attached to ``Theta``.

    Raises
    ------
    ConstructionError
        ``Theta`` and ``omega_0`` do not commute.
    """
    if omega0 is None:
        omega0 = compact_conjugation(theta.alg)
    left = theta.matrix @ omega0.matrix
    right = omega0.matrix @ np.conj(theta.matrix)
    if not np.array_equal(left, right):
        defect = np.abs(left - right).max()
        raise ConstructionError(
            f"Theta for {theta.involution} does not commute with the compact conjugation "
            f"(max entry defect {defect})"
        )
    return AntilinearConjugation(theta.alg, left)


def _single_root_image(alg: ChevalleyAlgebra, column: np.ndarray, tolerance: float):
    support = np.flatnonzero(np.abs(column) > tolerance)
    if len(support) != 1 or support[0] < alg.rank:
        return None
    index = int(support[0])
    return alg.rs.roots[index - alg.rank], column[index]


def reality_permutation(
    conj: AntilinearConjugation, tolerance: float = 1e-12
) -> Optional[Permutation]:
    """Permutation ``pi`` with ``conj(alpha_j) = -alpha_{pi(j)}`` on the extended simple roots.

    Returns
    -------
    tuple of int or None
        ``None`` when the image of some ``R_{alpha_j}`` is not a multiple of a root vector
        ``R_{-alpha_l}`` for an extended simple root ``alpha_l``.
    """
    alg = conj.alg
    extended = alg.rs.extended_simple_roots
    perm = []
    for root in extended:
        found = _single_root_image(alg, conj.matrix[:, alg.root_index(root)], tolerance)
        if found is None or -found[0] not in extended:
            LOG.debug(f"Conjugation does not map R_{root} into the negative extended roots")
            return None
        perm.append(extended.index(-found[0]))
    if sorted(perm) != list(range(len(extended))):
        return None
    return tuple(perm)


def reality_signs(conj: AntilinearConjugation) -> Tuple[complex, ...]:
    """``eps_j`` with ``conj(R_{alpha_j}) = eps_j R_{-alpha_{pi(j)}}``, ``j = 0..N``.

    Raises
    ------
    DomainError
        The conjugation does not permute the extended simple root spaces.
    """
    perm = reality_permutation(conj)
    if perm is None:
        raise DomainError("The conjugation does not preserve the extended simple root spaces")
    alg = conj.alg
    extended = alg.rs.extended_simple_roots
    signs = []
    for j, root in enumerate(extended):
        column = conj.matrix[:, alg.root_index(root)]
        value = column[alg.root_index(-extended[perm[j]])]
        signs.append(int(value) if np.issubdtype(column.dtype, np.integer) else complex(value))
    return tuple(signs)


@dataclass(frozen=True)
class CoxeterCompatibilityReport:
    """The three equivalent conditions relating ``sigma``, ``Theta`` and the conjugation."""

    sigma_commutes_with_conjugation: bool
    sigma_commutes_with_theta: bool
    theta_permutes_extended_roots: bool

    @property
    def consistent(self) -> bool:
        values = {
            self.sigma_commutes_with_conjugation,
            self.sigma_commutes_with_theta,
            self.theta_permutes_extended_roots,
        }
        return len(values) == 1

    def as_tuple(self) -> Tuple[bool, bool, bool]:
        return (
            self.sigma_commutes_with_conjugation,
            self.sigma_commutes_with_theta,
            self.theta_permutes_extended_roots,
        )

    def to_dict(self) -> dict:
        return {
            "sigma_conj": self.sigma_commutes_with_conjugation,
            "sigma_theta": self.sigma_commutes_with_theta,
            "theta_permutes": self.theta_permutes_extended_roots,
            "consistent": self.consistent,
        }


def _permutes_extended(alg: ChevalleyAlgebra, matrix: np.ndarray, tolerance: float) -> bool:
    extended = alg.rs.extended_simple_roots
    targets = []
    for root in extended:
        found = _single_root_image(alg, matrix[:, alg.root_index(root)], tolerance)
        if found is None or found[0] not in extended:
            return False
        targets.append(found[0])
    return len(set(targets)) == len(extended)


def certify_coxeter_compatibility(
    alg: ChevalleyAlgebra,
    theta: Union[CartanInvolution, np.ndarray],
    sigma: "CoxeterAutomorphism",
    conj: AntilinearConjugation,
    tolerance: float = 1e-10,
) -> CoxeterCompatibilityReport:
    """Evaluate the three conditions tying a real form to the Coxeter automorphism.

    The conditions are: ``sigma`` commutes with ``conj``; ``sigma`` commutes with ``Theta``;
    ``Theta`` maps the extended simple root spaces onto each other. For a valid
    ``(Theta, conj)`` pair they agree.

    Parameters
    ----------
    alg : ChevalleyAlgebra
        Common algebra.
    theta : CartanInvolution or numpy.ndarray
        Involution, or a bare matrix for negative controls.
    sigma : CoxeterAutomorphism
        Coxeter automorphism of ``alg``.
    conj : AntilinearConjugation
        Conjugation of the real form.
    tolerance : float, optional
        Absolute tolerance of the floating comparisons.

    Returns
    -------
    CoxeterCompatibilityReport
        The three booleans.
    """
    matrix = theta.matrix if isinstance(theta, CartanInvolution) else np.asarray(theta)
    diag = np.asarray(sigma.diagonal)
    lhs = diag[:, None] * conj.matrix
    rhs = conj.matrix * np.conj(diag)[None, :]
    report = CoxeterCompatibilityReport(
        sigma_commutes_with_conjugation=bool(np.allclose(lhs, rhs, rtol=0, atol=tolerance)),
        sigma_commutes_with_theta=bool(
            np.allclose(diag[:, None] * matrix, matrix * diag[None, :], rtol=0, atol=tolerance)
        ),
        theta_permutes_extended_roots=_permutes_extended(alg, matrix, tolerance),
    )
    LOG.info(f"Coxeter/real form conditions on {alg!r}: {report.as_tuple()}")
    return report


def weyl_reflection_automorphism(alg: ChevalleyAlgebra, i: int) -> np.ndarray:
    """Integer matrix of ``exp(ad R_{alpha_i}) exp(-ad R_{-alpha_i}) exp(ad R_{alpha_i})``.

    The result is an automorphism acting on roots as the simple reflection ``s_i``; it does
    not preserve the extended simple roots.

    Parameters
    ----------
    alg : ChevalleyAlgebra
        Algebra.
    i : int
        Zero-based index of the simple root.
    """
    if not 0 <= i < alg.rank:
        raise DomainError(f"Simple root index {i} out of range for {alg!r}")
    root = alg.rs.simple_roots[i]
    e = adjoint_matrix(alg, alg.root_vector(root).real.astype(np.int64)).astype(np.float64)
    f = adjoint_matrix(alg, alg.root_vector(-root).real.astype(np.int64)).astype(np.float64)
    product = expm(e) @ expm(-f) @ expm(e)
    rounded = np.rint(product)
    if np.abs(product - rounded).max() > 1e-8:
        raise ConstructionError(f"Reflection automorphism {i} of {alg!r} is not integral")
    return rounded.astype(np.int64)
