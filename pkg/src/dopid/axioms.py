"""Gate corpus and executable checks for the decomposition's guarantees.

Every check has a fixed name and is either an equality (``kind="eq"``,
``value`` is an absolute residual that must not exceed the tolerance) or an
inequality (``kind="ineq"``, ``value`` is a margin that must not fall below
minus the tolerance).
"""
from __future__ import annotations

import hashlib
from dataclasses import asdict, dataclass, field
from typing import Iterator

import numpy as np

from . import do_op, io, kernel, measures
from .atoms import TOL, PidResult, decompose, result_from_terms
from .errors import NoiseUnsupported, PidError
from .prob import Alphabet, Dist1, JointDist3, fsum_total, marginal, product, validate

TOL_STRUCT = 1e-12
TOL_IDENTITY = 1e-15

GATE_KINDS = ("xor", "and", "or", "copy", "rdn", "unq", "sum")


class InvalidSpec(PidError):
    pass


@dataclass(frozen=True)
class GateSpec:
    kind: str
    bias_x: float = 0.5
    bias_y: float = 0.5
    noise: float = 0.0

    def __post_init__(self):
        kind = self.kind.lower()
        if kind not in GATE_KINDS:
            raise InvalidSpec(f"unknown gate {self.kind!r}; choose from {', '.join(GATE_KINDS)}")
        object.__setattr__(self, "kind", kind)
        for name in ("bias_x", "bias_y"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise InvalidSpec(f"{name} must lie in [0, 1], got {v}")
        if not 0.0 <= self.noise <= 0.5:
            raise InvalidSpec(f"noise must lie in [0, 0.5], got {self.noise}")


def copy_system(dx: Dist1, dy: Dist1) -> JointDist3:
    """Independent sources with Z = (X, Y) over the product alphabet."""
    nx, ny = len(dx.a), len(dy.a)
    p = np.zeros((nx, ny, nx * ny))
    for i in range(nx):
        for j in range(ny):
            p[i, j, i * ny + j] = dx.p[i] * dy.p[j]
    return validate(p, dx.a, dy.a, dx.a.pair(dy.a))


_BINARY_FUNCS = {
    "xor": lambda x, y: x ^ y,
    "and": lambda x, y: x & y,
    "or": lambda x, y: x | y,
    "unq": lambda x, y: x,
}


def make_gate(spec: GateSpec) -> JointDist3:
    """Joint distribution of a two-input logic gate with independent inputs.

    RDN copies X into both Y and Z, so ``bias_y`` is unused for it. Noise
    flips a binary output symbol independently of the inputs.
    """
    bit = Alphabet(("0", "1"))
    px = np.array([1.0 - spec.bias_x, spec.bias_x])
    py = np.array([1.0 - spec.bias_y, spec.bias_y])
    if spec.kind in ("copy", "sum") and spec.noise > 0:
        raise NoiseUnsupported(f"noise is defined only for binary outputs, not {spec.kind.upper()}")
    if spec.kind == "copy":
        return copy_system(Dist1(bit, px, var="x"), Dist1(bit, py, var="y"))
    if spec.kind == "sum":
        p = np.zeros((2, 2, 3))
        for x in range(2):
            for y in range(2):
                p[x, y, x + y] = px[x] * py[y]
        return validate(p, bit, bit, Alphabet(("0", "1", "2")))
    p = np.zeros((2, 2, 2))
    e = spec.noise
    for x in range(2):
        if spec.kind == "rdn":
            p[x, x, x] += px[x] * (1 - e)
            p[x, x, 1 - x] += px[x] * e
            continue
        for y in range(2):
            z = _BINARY_FUNCS[spec.kind](x, y)
            p[x, y, z] += px[x] * py[y] * (1 - e)
            p[x, y, 1 - z] += px[x] * py[y] * e
    return validate(p, bit, bit, bit)


def fingerprint(d: JointDist3) -> str:
    return hashlib.sha256(io.dumps(io.dist_to_json(d)).encode()).hexdigest()[:16]


@dataclass
class CheckResult:
    name: str
    kind: str
    value: float
    tolerance: float
    passed: bool = field(init=False)
    cases: int = 1
    failures: int = field(init=False)
    detail: dict | None = None

    def __post_init__(self):
        self.value = float(self.value)
        self.passed = self._judge(self.value)
        self.failures = 0 if self.passed else 1

    def _judge(self, v: float) -> bool:
        if self.kind == "eq":
            return v <= self.tolerance
        return v >= -self.tolerance

    def merge(self, other: "CheckResult") -> None:
        if self.kind == "eq":
            self.value = max(self.value, other.value)
        else:
            self.value = min(self.value, other.value)
        self.cases += other.cases
        self.failures += other.failures
        self.passed = self.failures == 0

    def to_json(self) -> dict:
        out = asdict(self)
        if out["detail"] is None:
            del out["detail"]
        return out


@dataclass
class AxiomReport:
    checks: list
    fingerprint: str
    n_cases: int = 1
    meta: dict = field(default_factory=dict)

    @property
    def n_failed(self) -> int:
        return sum(1 for c in self.checks if not c.passed)

    @property
    def passed(self) -> bool:
        return self.n_failed == 0

    def __getitem__(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    @property
    def names(self) -> list:
        return [c.name for c in self.checks]

    def to_json(self) -> dict:
        return {
            "fingerprint": self.fingerprint,
            "n_cases": self.n_cases,
            "n_checks": len(self.checks),
            "n_failed": self.n_failed,
            "passed": self.passed,
            "meta": self.meta,
            "checks": [c.to_json() for c in self.checks],
        }

    def to_table(self) -> str:
        w = max([len(c.name) for c in self.checks] + [5])
        lines = [f"{'check':<{w}}  {'kind':<5} {'value':>24} {'tolerance':>10}  verdict"]
        for c in self.checks:
            verdict = "PASS" if c.passed else f"FAIL ({c.failures}/{c.cases})"
            lines.append(f"{c.name:<{w}}  {c.kind:<5} {c.value:>24.17g} {c.tolerance:>10.1e}  {verdict}")
        lines.append(f"{len(self.checks) - self.n_failed}/{len(self.checks)} checks passed over {self.n_cases} case(s)")
        return "\n".join(lines) + "\n"


def aggregate(reports, fingerprint_: str = "", meta: dict | None = None) -> AxiomReport:
    merged: dict = {}
    n = 0
    failed_cases = []
    for i, r in enumerate(reports):
        n += r.n_cases
        if not r.passed:
            failed_cases.append(i)
        for c in r.checks:
            if c.name in merged:
                merged[c.name].merge(c)
            else:
                merged[c.name] = CheckResult(c.name, c.kind, c.value, c.tolerance, cases=c.cases)
                merged[c.name].failures = c.failures
                merged[c.name].passed = c.passed
    meta = dict(meta or {})
    meta["failed_cases"] = failed_cases
    return AxiomReport(list(merged.values()), fingerprint_, n, meta)


def _do_identity_residual(d: JointDist3) -> float:
    res = do_op.do_operation(d, marginal(d, "z"))
    return float(np.max(np.abs(res.dist.p - d.p)))


def run_axioms(d: JointDist3, base=2, tol: float = TOL, backend: str | None = None) -> AxiomReport:
    """Evaluate every check on one distribution."""
    k = kernel
    t = k.compute_terms(d.p, measures.log_base(base), backend)
    r: PidResult = result_from_terms(t, base)
    tx, ty = t.x, t.y
    ux, uy = r.un_x_z_given_y, r.un_y_z_given_x

    def eq(name, v, tl=tol):
        return CheckResult(name, "eq", abs(v), tl)

    def ineq(name, v, tl=tol):
        return CheckResult(name, "ineq", v, tl)

    checks = [
        eq("atoms_sum_to_joint_mi", r.i_xyz - (r.red + r.syn + ux + uy)),
        eq("red_plus_un_x_is_i_xz", r.red + ux - r.i_xz),
        eq("red_plus_un_y_is_i_yz", r.red + uy - r.i_yz),
        eq("syn_plus_un_x_is_i_xz_given_y", r.syn + ux - r.i_xz_given_y),
        eq("syn_plus_un_y_is_i_yz_given_x", r.syn + uy - r.i_yz_given_x),
        eq("red_commutativity", r.red - r.red_swapped),
        ineq("red_upper_bound", min(r.i_xz, r.i_yz) - r.red),
        ineq("red_nonneg", r.red),
        ineq("un_x_nonneg", ux),
        ineq("un_y_nonneg", uy),
        ineq("un_x_le_i_xz", r.i_xz - ux),
        ineq("un_y_le_i_yz", r.i_yz - uy),
        ineq("un_x_le_h_z_given_y", tx[k.H_Z_GIVEN_COND] - ux),
        ineq("un_y_le_h_z_given_x", ty[k.H_Z_GIVEN_COND] - uy),
        eq("un_x_entropy_route", ux - r.un_x_alt),
        eq("un_y_entropy_route", uy - r.un_y_alt),
        eq("red_aggregate_route", r.red - r.red_alt),
        eq("red_swapped_aggregate_route", r.red_swapped - r.red_swapped_alt),
        eq("aggregate_joint_commutativity", float(np.max(np.abs(t.joint_a_y - t.joint_x_b))), TOL_STRUCT),
        eq("channel_invariance_x", tx[k.H_SRC_GIVEN_Z] - tx[k.AVG_H_GIVEN_C]),
        eq("channel_invariance_y", ty[k.H_SRC_GIVEN_Z] - ty[k.AVG_H_GIVEN_C]),
        eq("aggregate_entropy_x", tx[k.H_AGG] - tx[k.H_SRC]),
        eq("aggregate_entropy_y", ty[k.H_AGG] - ty[k.H_SRC]),
        eq("aggregate_marginal_x", tx[k.AGG_SRC_MARGIN], TOL_STRUCT),
        eq("aggregate_marginal_y", ty[k.AGG_SRC_MARGIN], TOL_STRUCT),
        eq("aggregate_weights_x", tx[k.AGG_COND_MARGIN], TOL_STRUCT),
        eq("aggregate_weights_y", ty[k.AGG_COND_MARGIN], TOL_STRUCT),
        eq("aggregate_row_entropy_x", tx[k.AGG_ROW_ENTROPY], TOL_STRUCT),
        eq("aggregate_row_entropy_y", ty[k.AGG_ROW_ENTROPY], TOL_STRUCT),
        ineq("avg_entropy_bound_x", tx[k.H_SRC] - tx[k.AVG_H]),
        ineq("avg_entropy_bound_y", ty[k.H_SRC] - ty[k.AVG_H]),
        eq("do_output_total_x", tx[k.DO_TOTAL], TOL_STRUCT),
        eq("do_output_total_y", ty[k.DO_TOTAL], TOL_STRUCT),
        ineq("do_output_nonneg", min(tx[k.DO_MIN], ty[k.DO_MIN]), TOL_STRUCT),
        eq("do_target_marginal_x", tx[k.DO_MARGIN], TOL_STRUCT),
        eq("do_target_marginal_y", ty[k.DO_MARGIN], TOL_STRUCT),
        eq("do_identity", _do_identity_residual(d), TOL_IDENTITY),
        ineq(
            "shannon_nonneg",
            min(r.i_xz, r.i_yz, r.i_xyz, r.i_xz_given_y, r.i_yz_given_x, r.h_z_given_xy),
            TOL_STRUCT,
        ),
    ]
    if r.closed_system:
        checks.append(ineq("syn_nonneg_closed", r.syn))
    return AxiomReport(checks, fingerprint(d), meta={"atoms": list(r.atoms), "closed_system": r.closed_system})


def random_dirichlet(shape, rng: np.random.Generator) -> JointDist3:
    """Uniform sample from the probability simplex over ``shape`` cells."""
    n = int(np.prod(shape))
    p = rng.dirichlet(np.ones(n)).reshape(shape)
    return validate(p, *(Alphabet.range(s) for s in shape))


def random_sparse(shape, rng: np.random.Generator, z_support: int | None = None) -> JointDist3:
    """Dirichlet sample on a random subset of cells.

    Z is first restricted to ``z_support`` outcomes (random size when None),
    then each remaining cell is kept with a random probability.
    """
    nx, ny, nz = shape
    kz = int(z_support) if z_support is not None else int(rng.integers(1, nz + 1))
    kz = min(max(kz, 1), nz)
    zs = rng.choice(nz, size=kz, replace=False)
    allowed = np.zeros(shape, dtype=bool)
    allowed[:, :, zs] = True
    keep = allowed & (rng.random(shape) < rng.uniform(0.15, 0.8))
    if not keep.any():
        cells = np.argwhere(allowed)
        keep[tuple(cells[rng.integers(len(cells))])] = True
    p = np.zeros(shape)
    p[keep] = rng.dirichlet(np.ones(int(keep.sum())))
    return validate(p, *(Alphabet.range(s) for s in shape))


def battery_corpus(
    count: int,
    shape,
    seed: int,
    boundary_fraction: float = 0.0,
    z_support: int | None = None,
) -> Iterator[JointDist3]:
    """The distributions :func:`run_battery` checks, in order.

    Trial ``i`` draws from its own child of ``SeedSequence(seed)``, so a
    trial's sample does not depend on any other trial.
    """
    if count < 1:
        raise InvalidSpec(f"count must be at least 1, got {count}")
    shape = tuple(int(s) for s in shape)
    if len(shape) != 3 or min(shape) < 1:
        raise InvalidSpec(f"shape must be three positive sizes, got {shape}")
    if not 0.0 <= boundary_fraction <= 1.0:
        raise InvalidSpec(f"boundary_fraction must lie in [0, 1], got {boundary_fraction}")
    n_boundary = int(round(count * boundary_fraction))
    for i, child in enumerate(np.random.SeedSequence(seed).spawn(count)):
        rng = np.random.default_rng(child)
        if i >= count - n_boundary:
            yield random_sparse(shape, rng, z_support)
        else:
            yield random_dirichlet(shape, rng)


def run_battery(
    count: int,
    shape=(3, 3, 3),
    seed: int = 0,
    boundary_fraction: float = 0.0,
    z_support: int | None = None,
    base=2,
    tol: float = TOL,
    backend: str | None = None,
) -> AxiomReport:
    """Run :func:`run_axioms` over a seeded corpus and keep the worst value per check."""
    reports = (
        run_axioms(d, base, tol, backend)
        for d in battery_corpus(count, shape, seed, boundary_fraction, z_support)
    )
    meta = {
        "count": count,
        "shape": list(shape),
        "seed": seed,
        "boundary_fraction": boundary_fraction,
    }
    fp = hashlib.sha256(io.dumps(meta).encode()).hexdigest()[:16]
    return aggregate(reports, fp, meta)


def check_additivity(d1: JointDist3, d2: JointDist3, base=2, tol: float = TOL, backend=None) -> CheckResult:
    """Atoms of the product system against the sums of the factors' atoms."""
    a1 = decompose(d1, base, backend).atoms
    a2 = decompose(d2, base, backend).atoms
    ap = decompose(product(d1, d2), base, backend).atoms
    sums = [u + v for u, v in zip(a1, a2)]
    resid = max(abs(u - v) for u, v in zip(ap, sums))
    return CheckResult("additivity", "eq", resid, tol, detail={"product": list(ap), "sum": sums})


def check_independent_identity(dx: Dist1, dy: Dist1, base=2, tol: float = TOL, backend=None) -> CheckResult:
    """Red of the copy system over independent sources, which must vanish."""
    r = decompose(copy_system(dx, dy), base, backend)
    return CheckResult("independent_identity", "eq", abs(r.red), tol, detail={"red": r.red})


def perturb(d: JointDist3, delta: float, rng: np.random.Generator, max_tries: int = 200) -> JointDist3:
    """Random distribution within L1 distance ``delta`` of ``d``.

    A zero-sum direction of L1 norm ``delta`` is added, negatives are clipped
    and the result renormalized. Draws that land too far are redrawn at half
    the step.
    """
    if delta < 0:
        raise InvalidSpec(f"delta must be nonnegative, got {delta}")
    if delta == 0:
        return d
    p = d.p
    step = delta
    for _ in range(max_tries):
        v = rng.standard_normal(p.shape)
        v -= v.mean()
        v *= step / np.abs(v).sum()
        q = np.clip(p + v, 0.0, None)
        q /= fsum_total(q)
        if np.abs(q - p).sum() <= delta:
            return JointDist3(d.ax, d.ay, d.az, q)
        step *= 0.5
    raise RuntimeError(f"no perturbation within L1 radius {delta} after {max_tries} draws")


@dataclass
class ContinuityProbe:
    fingerprint: str
    deltas: list
    trials_per_delta: int
    max_d_red: list
    max_d_un_x: list
    max_d_syn: list
    max_l1: list
    ceiling: float
    noise_floor: float

    @staticmethod
    def _non_increasing(vals, slack) -> bool:
        return all(b <= a + slack for a, b in zip(vals, vals[1:]))

    @property
    def monotone(self) -> bool:
        return all(
            self._non_increasing(v, self.noise_floor)
            for v in (self.max_d_red, self.max_d_un_x, self.max_d_syn)
        )

    @property
    def below_ceiling(self) -> bool:
        return max(self.max_d_red[-1], self.max_d_un_x[-1], self.max_d_syn[-1]) <= self.ceiling

    @property
    def passed(self) -> bool:
        return self.monotone and self.below_ceiling

    def to_json(self) -> dict:
        out = asdict(self)
        out.update(monotone=self.monotone, below_ceiling=self.below_ceiling, passed=self.passed)
        return out

    def to_table(self) -> str:
        lines = [f"{'delta':>10} {'max|dRed|':>24} {'max|dUn_x|':>24} {'max|dSyn|':>24}"]
        for i, dl in enumerate(self.deltas):
            lines.append(
                f"{dl:>10.1e} {self.max_d_red[i]:>24.17g} {self.max_d_un_x[i]:>24.17g} {self.max_d_syn[i]:>24.17g}"
            )
        lines.append(f"monotone={self.monotone} below_ceiling={self.below_ceiling} (ceiling {self.ceiling:g})")
        return "\n".join(lines) + "\n"


def probe_continuity(
    d: JointDist3,
    deltas=(1e-2, 1e-4, 1e-6),
    trials_per_delta: int = 50,
    seed: int = 0,
    ceiling: float = 1e-3,
    noise_floor: float = 1e-12,
    base=2,
    backend: str | None = None,
) -> ContinuityProbe:
    """Largest atom changes over random perturbations at each radius.

    The ceiling bounds the changes at the smallest radius; it is a smoke
    threshold, not a derived modulus of continuity.
    """
    deltas = [float(v) for v in deltas]
    if not deltas or any(v <= 0 for v in deltas):
        raise InvalidSpec("deltas must be positive")
    if any(b >= a for a, b in zip(deltas, deltas[1:])):
        raise InvalidSpec(f"deltas must be strictly decreasing, got {deltas}")
    if trials_per_delta < 1:
        raise InvalidSpec("trials_per_delta must be at least 1")
    r0 = decompose(d, base, backend)
    children = np.random.SeedSequence(seed).spawn(len(deltas) * trials_per_delta)
    d_red, d_un, d_syn, l1 = [], [], [], []
    for i, delta in enumerate(deltas):
        mr = mu = ms = ml = 0.0
        for j in range(trials_per_delta):
            rng = np.random.default_rng(children[i * trials_per_delta + j])
            q = perturb(d, delta, rng)
            r = decompose(q, base, backend)
            mr = max(mr, abs(r.red - r0.red))
            mu = max(mu, abs(r.un_x_z_given_y - r0.un_x_z_given_y))
            ms = max(ms, abs(r.syn - r0.syn))
            ml = max(ml, float(np.abs(q.p - d.p).sum()))
        d_red.append(mr)
        d_un.append(mu)
        d_syn.append(ms)
        l1.append(ml)
    return ContinuityProbe(fingerprint(d), deltas, trials_per_delta, d_red, d_un, d_syn, l1, ceiling, noise_floor)
