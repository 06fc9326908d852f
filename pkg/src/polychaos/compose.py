"""Galerkin expansion of a polynomial system definition.

Each uncertain parameter or initial condition owns one germ dimension
(parameters first, then initial conditions, both in declaration order).
For a monomial ``c * prod(params) * x_{s_1} ... x_{s_p} * inputs(t)`` in the
equation of state ``s`` the expanded right-hand side of coefficient block ``s``
receives::

    inputs(t) * sum_{j, k_1..k_p} ahat_j * xhat_{s_1, k_1} ... xhat_{s_p, k_p} * e[j, k_1..k_p, i]

where ``ahat`` projects the whole parameter part (coefficient included) onto
the basis and ``e`` is the shared order-``p`` Galerkin tensor.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Any, Mapping

import numpy as np
import scipy.sparse as sp

from .pcebasis import BasisSet, CoeffTensor, galerkin_tensor
from .distributions import Distribution
from .modelir import TIME, ModelError, SystemDef
from .orthopoly import DEFAULT_MAX_ORDER, PolyFamily1D, QuadratureBudgetError, family_for

log = logging.getLogger(__name__)

MAX_NODES = DEFAULT_MAX_ORDER


class ComposeError(ModelError):
    pass


class CollocationOnlyError(ComposeError):
    """The system has non-polynomial right-hand sides."""


class UpdateError(ComposeError):
    pass


@dataclass(frozen=True)
class Germ:
    name: str
    owner: str  # "parameter" or "state"
    dim: int
    family: PolyFamily1D
    dist: Distribution


@dataclass(frozen=True)
class GermMap:
    germs: tuple[Germ, ...] = ()

    def __len__(self):
        return len(self.germs)

    def __iter__(self):
        return iter(self.germs)

    def dim_of(self, name: str) -> int | None:
        for g in self.germs:
            if g.name == name:
                return g.dim
        return None

    @property
    def names(self) -> list[str]:
        return [g.name for g in self.germs]


def assign_germs(sys: SystemDef) -> GermMap:
    uncertain = [(p.name, "parameter", p.dist) for p in sys.parameters if not p.dist.is_deterministic]
    uncertain += [(s.name, "state", s.initial) for s in sys.states if not s.initial.is_deterministic]
    return GermMap(tuple(Germ(n, o, d, family_for(dist), dist) for d, (n, o, dist) in enumerate(uncertain)))


def _factor_projection(dist: Distribution, fam: PolyFamily1D, order: int, power: int) -> np.ndarray:
    """1-D coefficients of ``v(xi)**power`` on ``phi_0..phi_order``."""
    shift, scale = dist.germ_map()
    rule = fam.rule_for_degree(power + order)
    vals = fam.eval_all(order, rule.nodes)
    v = (shift + scale * rule.nodes) ** power
    coeffs = rule.integrate(vals * v) / fam.norms_sq(order)
    peak = np.abs(coeffs).max()
    coeffs[np.abs(coeffs) <= 1e-14 * peak] = 0.0
    return coeffs


def project_compound(
    coeff: float,
    powers: Mapping[str, int],
    dists: Mapping[str, Distribution],
    germs: GermMap,
    b: BasisSet,
) -> np.ndarray:
    """Project ``coeff * prod(v**e for v, e in powers)`` onto the basis.

    Distinct variables live on distinct germs, so the projection factors into
    one-dimensional projections per germ dimension.
    """
    scalar = float(coeff)
    factors = {}
    for name, e in powers.items():
        dim = germs.dim_of(name)
        if dim is None:
            scalar *= dists[name].raw_moment(e) if e else 1.0
        else:
            factors[dim] = _factor_projection(dists[name], germs.germs[dim].family, b.order, e)
    # a germ dimension without a factor only carries the constant polynomial
    untouched = [d for d in range(b.n_xi) if d not in factors]
    out = scalar * np.all(b.indices[:, untouched] == 0, axis=1).astype(float)
    for dim, c in factors.items():
        out *= c[b.indices[:, dim]]
    return out + 0.0  # no negative zeros


def project_variable(d: Distribution, b: BasisSet, germ: int | None) -> np.ndarray:
    """PCE coefficients of a single variable owning germ dimension ``germ``."""
    if d.is_deterministic or germ is None:
        out = np.zeros(b.size)
        out[0] = d.mean()
        return out
    fam = b.families[germ]
    if fam != family_for(d):
        raise ComposeError(f"{d!r} does not match the {fam.family} germ in dimension {germ}")
    c = _factor_projection(d, fam, b.order, 1)
    unit = np.zeros(b.n_xi, dtype=np.int64)
    out = np.zeros(b.size)
    for n in range(b.order + 1):
        unit[germ] = n
        out[b.position(unit)] = c[n]
    return out


@dataclass(frozen=True)
class Term:
    """One monomial of a state equation (or output map) after projection."""

    target: int
    coeff: float
    params: tuple  # ((name, exponent), ...)
    factors: tuple[int, ...]  # state indices, repeated by exponent
    inputs: tuple  # ((name, exponent), ...)
    ahat: np.ndarray = field(compare=False, repr=False)

    @property
    def p(self) -> int:
        return len(self.factors)


@dataclass(frozen=True)
class _Group:
    """Concatenated sparse kernels sharing a monomial order and input factor."""

    inputs: tuple
    gather: np.ndarray  # (nnz, p) flat positions in the stacked state vector
    target: np.ndarray  # (nnz,) flat positions in the output vector
    values: np.ndarray
    scatter: Any  # sparse (nnz, n_out) for batched evaluation


def _compile(terms: list[Term], tensors: Mapping[int, CoeffTensor], size: int, n_out: int) -> tuple[_Group, ...]:
    merged: dict[tuple, np.ndarray] = {}
    for t in terms:
        key = (t.target, t.factors, t.inputs)
        merged[key] = merged.get(key, 0.0) + t.ahat
    buckets: dict[tuple, list] = {}
    for (target, factors, inputs), ahat in merged.items():
        coords, values = tensors[len(factors)].contract_first(ahat)
        if len(values) == 0:
            continue
        gather = np.array(factors, dtype=np.int64) * size + coords[:, :-1]
        buckets.setdefault((len(factors), inputs), []).append((gather, target * size + coords[:, -1], values))
    groups = []
    for (p, inputs), parts in sorted(buckets.items(), key=lambda kv: (kv[0][0], kv[0][1])):
        target = np.concatenate([t for _, t, _ in parts])
        gather = np.concatenate([g for g, _, _ in parts]).reshape(len(target), p)
        values = np.concatenate([v for _, _, v in parts])
        scatter = sp.csr_matrix(
            (np.ones(len(target)), (np.arange(len(target)), target)), shape=(len(target), n_out * size)
        )
        groups.append(_Group(inputs, gather, target, values, scatter))
    return tuple(groups)


def _input_factor(inputs: tuple, values: Mapping[str, Any]):
    out = 1.0
    for name, e in inputs:
        out = out * values[name] ** e
    return out


def _apply_groups(groups, x: np.ndarray, inputs: Mapping[str, Any], n_flat: int) -> np.ndarray:
    if x.ndim == 1:
        out = np.zeros(n_flat)
        for g in groups:
            contrib = g.values.copy()
            for s in range(g.gather.shape[1]):
                contrib *= x[g.gather[:, s]]
            f = _input_factor(g.inputs, inputs)
            out += np.bincount(g.target, weights=contrib, minlength=n_flat) * f
        return out
    out = np.zeros(x.shape[:-1] + (n_flat,))
    for g in groups:
        contrib = np.broadcast_to(g.values, x.shape[:-1] + g.values.shape)
        for s in range(g.gather.shape[1]):
            contrib = contrib * x[..., g.gather[:, s]]
        f = np.asarray(_input_factor(g.inputs, inputs))
        out += (g.scatter.T @ contrib.T).T * (f[..., None] if f.ndim else f)
    return out


@dataclass(frozen=True)
class ExpandedSystem:
    system: SystemDef
    basis: BasisSet
    germs: GermMap
    tensors: Mapping[int, CoeffTensor]
    terms: tuple[Term, ...]
    output_terms: tuple[Term, ...]
    x0_hat: np.ndarray
    galerkin: bool = True
    _groups: tuple = field(default=(), repr=False, compare=False)
    _output_groups: tuple = field(default=(), repr=False, compare=False)

    @property
    def order(self) -> int:
        return self.basis.order

    @property
    def size(self) -> int:
        return self.basis.size

    @property
    def n_states(self) -> int:
        return len(self.system.states)

    @property
    def state_names(self) -> list[str]:
        return self.system.state_names

    @property
    def output_names(self) -> list[str]:
        return [o.name for o in self.system.outputs]

    def block(self, xhat: np.ndarray, name: str) -> np.ndarray:
        """Coefficients of state ``name`` from a stacked vector (trailing axis)."""
        k = self.state_names.index(name)
        return xhat[..., k * self.size : (k + 1) * self.size]

    def variable_coeffs(self, name: str) -> np.ndarray:
        """PCE coefficients of a parameter or initial condition."""
        dist = self.system.distribution_of(name)
        return project_variable(dist, self.basis, self.germs.dim_of(name))

    def rhs(self, t: float, xhat: np.ndarray, input_overrides: Mapping[str, Any] | None = None) -> np.ndarray:
        if not self.galerkin:
            raise CollocationOnlyError("system was composed without projection; use collocation or Monte Carlo")
        inputs = self.system.input_values(t, input_overrides) if self.system.inputs else {}
        inputs[TIME] = t
        return _apply_groups(self._groups, np.asarray(xhat, dtype=float), inputs, self.n_states * self.size)

    def output_coeffs(self, times, xhat, input_overrides=None) -> np.ndarray:
        """Output PCE coefficients along a trajectory ``xhat`` of shape ``(T, n_states * size)``."""
        times = np.asarray(times, dtype=float)
        inputs = self.system.input_values(times, input_overrides)
        inputs = {k: np.broadcast_to(v, times.shape) for k, v in inputs.items()}
        inputs[TIME] = times
        n_flat = len(self.system.outputs) * self.size
        if not self._output_groups:
            return np.zeros(np.shape(xhat)[:-1] + (n_flat,))
        return _apply_groups(self._output_groups, np.atleast_2d(xhat), inputs, n_flat)

    # nominal (unexpanded) model ----------------------------------------------

    def realize(self, germ_samples: np.ndarray) -> dict[str, np.ndarray]:
        """Physical values of every uncertain variable at germ samples ``(n_xi, n)``."""
        germ_samples = np.asarray(germ_samples, dtype=float)
        out = {}
        for g in self.germs:
            shift, scale = g.dist.germ_map()
            out[g.name] = shift + scale * germ_samples[g.dim]
        return out

    def nominal_rhs(self, t, y: np.ndarray, params: Mapping[str, Any], input_overrides=None) -> np.ndarray:
        """Right-hand side of the original model; ``y`` has shape ``(n_states, ...)``."""
        env = dict(params)
        env.update(self.system.input_values(t, input_overrides))
        env[TIME] = t
        for k, name in enumerate(self.state_names):
            env[name] = y[k]
        return np.stack([np.broadcast_to(s.rhs(env), y.shape[1:]) for s in self.system.states]).astype(float)

    def nominal_outputs(self, times, y: np.ndarray, params: Mapping[str, Any], input_overrides=None) -> np.ndarray:
        """Outputs of the original model for ``y`` of shape ``(n_states, T, n)``."""
        times = np.asarray(times, dtype=float)
        env = dict(params)
        inputs = self.system.input_values(times, input_overrides)
        env.update({k: np.asarray(v)[..., None] if np.ndim(v) else v for k, v in inputs.items()})
        env[TIME] = times[:, None]
        for k, name in enumerate(self.state_names):
            env[name] = y[k]
        return np.stack([np.broadcast_to(o.rhs(env), y.shape[1:]) for o in self.system.outputs]) if self.system.outputs else np.zeros((0,) + y.shape[1:])

    def deterministic_values(self) -> dict[str, float]:
        """Values of Dirac parameters, which never own a germ."""
        return {p.name: float(p.dist.value) for p in self.system.parameters if p.dist.is_deterministic}

    def initial_states(self, realized: Mapping[str, np.ndarray], n: int) -> np.ndarray:
        y0 = np.empty((self.n_states, n))
        for k, s in enumerate(self.system.states):
            y0[k] = realized[s.name] if s.name in realized else s.initial.mean()
        return y0

    def to_dump(self) -> dict:
        def term_info(t: Term, names):
            return {
                "target": names[t.target],
                "coeff": t.coeff,
                "parameters": dict(t.params),
                "state_factors": [self.state_names[k] for k in t.factors],
                "inputs": dict(t.inputs),
                "p": t.p,
                "ahat": [float(v) for v in t.ahat],
                "tensor_nnz": self.tensors[t.p].nnz,
            }

        return {
            "order": self.order,
            "n_xi": self.basis.n_xi,
            "basis_size": self.size,
            "multi_indices": self.basis.indices.tolist(),
            "germs": [
                {"name": g.name, "owner": g.owner, "dim": g.dim, "family": g.family.family,
                 "jacobi": [g.family.alpha, g.family.beta] if g.family.family == "jacobi" else None,
                 "pdf": g.dist.kind, "data": list(g.dist.data)}
                for g in self.germs
            ],
            "x0_hat": [float(v) for v in self.x0_hat],
            "tensors": {str(p): {"nnz": t.nnz, "dense_shape": [self.size] * (p + 2)} for p, t in self.tensors.items()},
            "terms": [term_info(t, self.state_names) for t in self.terms],
            "output_terms": [term_info(t, self.output_names) for t in self.output_terms],
        }


def _build_terms(sys: SystemDef, germs: GermMap, b: BasisSet, exprs, dists) -> list[Term]:
    state_index = {n: k for k, n in enumerate(sys.state_names)}
    params = set(sys.parameter_names)
    terms = []
    for target, expr in enumerate(exprs):
        for m in expr.poly.monomials:
            ppow = tuple((n, e) for n, e in m.powers if n in params)
            factors = tuple(sorted(state_index[n] for n, e in m.powers if n in state_index for _ in range(e)))
            ahat = project_compound(m.coeff, dict(ppow), dists, germs, b)
            terms.append(Term(target, m.coeff, ppow, factors, m.inputs, ahat))
    return terms


def _distributions(sys: SystemDef) -> dict[str, Distribution]:
    out = {p.name: p.dist for p in sys.parameters}
    out.update({s.name: s.initial for s in sys.states})
    return out


def _x0_hat(sys: SystemDef, germs: GermMap, b: BasisSet) -> np.ndarray:
    return np.concatenate([project_variable(s.initial, b, germs.dim_of(s.name)) for s in sys.states])


def compose(sys: SystemDef, order: int, projection: bool = True, max_nodes: int = MAX_NODES) -> ExpandedSystem:
    """Build the Galerkin-expanded system of total order ``order``.

    With ``projection=False`` only the basis, germ map and initial coefficients
    are built; that is enough for collocation and Monte Carlo runs of
    non-polynomial models.
    """
    if order < 0:
        raise ComposeError("PCE order must be >= 0")
    germs = assign_germs(sys)
    b = BasisSet(tuple(g.family for g in germs), order)
    x0 = _x0_hat(sys, germs, b)
    if not projection:
        return ExpandedSystem(sys, b, germs, {}, (), (), x0, galerkin=False)
    if not sys.galerkin_ok:
        raise CollocationOnlyError(
            "collocation-only system (use the collocation or mc method): " + "; ".join(sys.diagnostics())
        )
    dists = _distributions(sys)
    terms = _build_terms(sys, germs, b, [s.rhs for s in sys.states], dists)
    out_terms = _build_terms(sys, germs, b, [o.rhs for o in sys.outputs], dists)
    orders = sorted({t.p for t in terms} | {t.p for t in out_terms})
    tensors = {}
    for p in orders:
        try:
            tensors[p] = galerkin_tensor(b, p, max_nodes=max_nodes)
        except QuadratureBudgetError as exc:
            raise ComposeError(f"monomial order {p} at PCE order {order}: {exc}") from None
    return _finish(ExpandedSystem(sys, b, germs, tensors, tuple(terms), tuple(out_terms), x0))


def _finish(es: ExpandedSystem) -> ExpandedSystem:
    groups = _compile(list(es.terms), es.tensors, es.size, es.n_states)
    out_groups = _compile(list(es.output_terms), es.tensors, es.size, len(es.system.outputs))
    return replace(es, _groups=groups, _output_groups=out_groups)


def update(es: ExpandedSystem, name: str, new: Distribution | Any) -> ExpandedSystem:
    """Replace the distribution of one parameter or initial condition.

    ``new`` is a :class:`Distribution` or the new ``data`` values for the
    current family. Only projected coefficients are recomputed while the germ
    stays the same; a beta shape change alters the Jacobi germ and re-tabulates
    the tensors.
    """
    old = es.system.distribution_of(name)
    if not isinstance(new, Distribution):
        from .distributions import from_spec

        new = from_spec(old.kind, new)
    if new.kind != old.kind:
        raise UpdateError(
            f"cannot change {name!r} from {old.kind} to {new.kind} in place; compose the system again"
        )
    sys = es.system.with_distribution(name, new)
    if new.germ_key() != old.germ_key():
        log.info("germ of %s changed from %s to %s; re-tabulating tensors", name, old.germ_key(), new.germ_key())
        return compose(sys, es.order, projection=es.galerkin)
    germs = GermMap(tuple(replace(g, dist=new) if g.name == name else g for g in es.germs))
    x0 = _x0_hat(sys, germs, es.basis)
    if not es.galerkin:
        return replace(es, system=sys, germs=germs, x0_hat=x0)
    dists = _distributions(sys)

    def refresh(terms):
        return tuple(
            replace(t, ahat=project_compound(t.coeff, dict(t.params), dists, germs, es.basis))
            if name in dict(t.params) else t
            for t in terms
        )

    return _finish(
        replace(es, system=sys, germs=germs, x0_hat=x0, terms=refresh(es.terms), output_terms=refresh(es.output_terms))
    )


def eval_expanded_rhs(es: ExpandedSystem, t: float, xhat, input_overrides=None) -> np.ndarray:
    return es.rhs(t, xhat, input_overrides)
