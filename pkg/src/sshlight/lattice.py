"""SSH lattices with movable domain walls and z-dependent coupling schedules.

Bond convention: a chain of ``n`` waveguides has ``n - 1`` nearest-neighbour
bonds.  The pristine dimerization alternates ``u, v, u, v, ...`` starting with
``u`` at bond 0.  A domain wall at position ``d`` inserts one extra bond of the
wall coupling at bond index ``d`` and shifts the pristine pattern one slot to
the right from there on.  The insertion leaves exactly one pair of consecutive
equal bonds next to ``d``; the site shared by that pair carries the localized
wall mode (for a weak-coupling wall in a dimerized bulk).

Couplings are in cm^-1, lengths in cm, waveguide distances in um.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

COUPLING_FLOOR = 1e-6  # cm^-1, smallest coupling kept when disorder drives a bond negative


class LatticeError(ValueError):
    """Raised for invalid lattice or schedule construction."""


# ---------------------------------------------------------------------------
# static lattice
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LatticeSpec:
    """Static description of an SSH chain with zero or more domain walls.

    ``wall_coupling`` selects which coupling value is repeated at each wall:
    ``"u"`` builds the wall that hosts an isolated in-gap mode when u is the
    weak coupling; ``"v"`` builds the other kind.
    """

    n_sites: int
    u: float
    v: float
    dw_positions: tuple[int, ...] = ()
    wall_coupling: str = "u"
    onsite: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.n_sites < 2:
            raise LatticeError(f"need at least 2 sites, got {self.n_sites}")
        if self.u <= 0 or self.v <= 0:
            raise LatticeError(f"couplings must be positive, got u={self.u}, v={self.v}")
        if self.wall_coupling not in ("u", "v"):
            raise LatticeError(f"wall_coupling must be 'u' or 'v', got {self.wall_coupling!r}")
        object.__setattr__(self, "dw_positions", tuple(int(p) for p in self.dw_positions))
        for p in self.dw_positions:
            if not 1 <= p <= self.n_sites - 3:
                raise LatticeError(f"wall position {p} out of range [1, {self.n_sites - 3}]")
        walls = sorted(self.dw_positions)
        for a, b in zip(walls, walls[1:]):
            if b - a < 2:
                raise LatticeError(f"wall positions {a}, {b} are adjacent or coincide")
        if self.onsite is not None:
            object.__setattr__(self, "onsite", tuple(float(x) for x in self.onsite))
            if len(self.onsite) != self.n_sites:
                raise LatticeError(
                    f"onsite has {len(self.onsite)} entries for {self.n_sites} sites")

    @property
    def delta(self) -> float:
        """Coupling ratio v/u; > 1 is the topological regime."""
        return self.v / self.u

    def onsite_array(self) -> np.ndarray:
        if self.onsite is None:
            return np.zeros(self.n_sites)
        return np.asarray(self.onsite, dtype=float)


def _insertion_bonds(n_sites: int, u: float, v: float, walls: Sequence[int],
                     wall_value: float) -> np.ndarray:
    """Bond values under the insertion rule; walls may be adjacent here."""
    walls = sorted(int(w) for w in walls)
    bonds = np.empty(n_sites - 1)
    shift = 0
    wset = set(walls)
    for i in range(n_sites - 1):
        if i in wset:
            bonds[i] = wall_value
            shift += 1
        else:
            bonds[i] = u if (i - shift) % 2 == 0 else v
    return bonds


def bond_values(spec: LatticeSpec, walls: Sequence[int] | None = None) -> np.ndarray:
    """Nearest-neighbour couplings of ``spec``, optionally with walls moved.

    ``walls`` overrides the wall positions without re-validating adjacency;
    the schedule builders use this to realize merged (adjacent-wall)
    configurations that are not constructible as a public ``LatticeSpec``.
    """
    wall_value = spec.u if spec.wall_coupling == "u" else spec.v
    positions = spec.dw_positions if walls is None else tuple(walls)
    for p in positions:
        if not 1 <= p <= spec.n_sites - 3:
            raise LatticeError(f"wall position {p} out of range")
    return _insertion_bonds(spec.n_sites, spec.u, spec.v, positions, wall_value)


def hamiltonian_from_bonds(bonds: np.ndarray, onsite: np.ndarray | None = None) -> np.ndarray:
    n = len(bonds) + 1
    h = np.zeros((n, n))
    idx = np.arange(n - 1)
    h[idx, idx + 1] = bonds
    h[idx + 1, idx] = bonds
    if onsite is not None:
        h[np.diag_indices(n)] += onsite
    return h


def build_ssh(spec: LatticeSpec) -> np.ndarray:
    """Real symmetric Hamiltonian of the static lattice."""
    return hamiltonian_from_bonds(bond_values(spec), spec.onsite_array())


def wall_sites(spec: LatticeSpec, walls: Sequence[int] | None = None) -> tuple[int, ...]:
    """Site shared by the repeated-bond pair of each wall, in wall order."""
    positions = spec.dw_positions if walls is None else tuple(walls)
    bonds = bond_values(spec, positions)
    sites = []
    for d in positions:
        if d > 0 and np.isclose(bonds[d - 1], bonds[d]):
            sites.append(d)
        elif d + 1 < len(bonds) and np.isclose(bonds[d], bonds[d + 1]):
            sites.append(d + 1)
        else:
            # adjacent walls merge into a longer run of equal bonds
            sites.append(d)
    return tuple(sites)


# ---------------------------------------------------------------------------
# coupling-distance calibration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DistanceModel:
    """Exponential coupling-distance law C(D) = c2 * exp(-c1 * D)."""

    c1: float  # um^-1
    c2: float  # cm^-1

    def __post_init__(self):
        if self.c1 <= 0 or self.c2 <= 0:
            raise LatticeError(f"c1 and c2 must be positive, got {self.c1}, {self.c2}")


def coupling_from_distance(distance: float, model: DistanceModel) -> float:
    """Coupling in cm^-1 for a waveguide separation in um."""
    if distance <= 0:
        raise LatticeError(f"distance must be positive, got {distance}")
    return model.c2 * np.exp(-model.c1 * distance)


def calibrate_distance_model(d_a: float, c_a: float, d_b: float, c_b: float) -> DistanceModel:
    """Fit the exponential law through two (distance, coupling) anchors."""
    if c_a <= 0 or c_b <= 0:
        raise LatticeError("anchor couplings must be positive")
    if d_a == d_b:
        raise LatticeError("anchor distances must differ")
    c1 = np.log(c_b / c_a) / (d_a - d_b)
    if c1 <= 0:
        raise LatticeError("degenerate anchors: coupling must decay with distance")
    c2 = c_a * np.exp(c1 * d_a)
    return DistanceModel(c1=float(c1), c2=float(c2))


# ---------------------------------------------------------------------------
# bend profile
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BendProfile:
    """S-shaped coupling ramp from A at z=0 to A-B at z=Z_m with slope s.

    The raw expression is 0/0 at both endpoints; the continuous extension
    f(0)=A, f(Z_m)=A-B is used.  Monotonicity is checked on a grid at
    construction.
    """

    a: float
    b: float
    s: float
    z_m: float

    def __post_init__(self):
        if self.s <= 0:
            raise LatticeError(f"slope s must be positive, got {self.s}")
        if self.z_m <= 0:
            raise LatticeError(f"modulation length must be positive, got {self.z_m}")
        zs = np.linspace(0.0, self.z_m, 257)
        vals = _bend_values(zs, self.a, self.b, self.s, self.z_m)
        diffs = np.diff(vals)
        tol = 1e-12 * (abs(self.b) + abs(self.a) + 1.0)
        if self.b > 0 and np.any(diffs > tol):
            raise LatticeError("bend profile is not monotone decreasing for B > 0")
        if self.b < 0 and np.any(diffs < -tol):
            raise LatticeError("bend profile is not monotone increasing for B < 0")


def _bend_values(z, a, b, s, z_m):
    z = np.atleast_1d(np.asarray(z, dtype=float))
    out = np.full(z.shape, a)
    inner = (z > 0) & (z < z_m)
    zi = z[inner]
    with np.errstate(over="ignore"):  # z_m/z -> inf near z = 0 is benign: exp(-inf) = 0
        e_start = np.exp(-z_m / zi)
    e_end = np.exp(-1.0 / (1.0 - zi / z_m))
    out[inner] = a - b * e_start / (s * e_end + e_start)
    out[z >= z_m] = a - b
    return out


def bend_profile(z: float | np.ndarray, profile: BendProfile) -> float | np.ndarray:
    """Evaluate the bend profile; z must lie within [0, Z_m]."""
    zarr = np.atleast_1d(np.asarray(z, dtype=float))
    if np.any(zarr < 0) or np.any(zarr > profile.z_m):
        raise LatticeError(f"z outside [0, {profile.z_m}]")
    vals = _bend_values(zarr, profile.a, profile.b, profile.s, profile.z_m)
    return float(vals[0]) if np.isscalar(z) or np.ndim(z) == 0 else vals


def solve_profile_params(c_start: float, c_end: float) -> tuple[float, float]:
    """(A, B) realizing a ramp from c_start to c_end."""
    if c_start <= 0 or c_end <= 0:
        raise LatticeError("profile endpoint couplings must be positive")
    return float(c_start), float(c_start - c_end)


# ---------------------------------------------------------------------------
# schedules
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Segment:
    """One z-interval of a schedule.

    Every bond ramps from ``bonds_start`` to ``bonds_end`` following the bend
    profile with shared slope ``s``; bonds with equal endpoints stay constant.
    A segment with ``bonds_start is bonds_end`` elementwise is constant.
    """

    length: float
    bonds_start: np.ndarray
    bonds_end: np.ndarray
    s: float = 1.5
    label: str = ""

    @property
    def constant(self) -> bool:
        return bool(np.array_equal(self.bonds_start, self.bonds_end))

    def bonds_at(self, z_local: float) -> np.ndarray:
        if self.constant or self.length == 0.0:
            return self.bonds_start
        b = self.bonds_start.copy()
        idx = np.nonzero(self.bonds_start != self.bonds_end)[0]
        for i in idx:
            a = self.bonds_start[i]
            b[i] = _bend_values(z_local, a, a - self.bonds_end[i], self.s, self.length)[0]
        return b


@dataclass(frozen=True)
class CouplingSchedule:
    """z-parameterized Hermitian coupling matrix H(z) over [0, Z_total].

    Immutable; evaluation is pure.  Disorder enters as a static per-bond
    multiplicative factor and a static per-site onsite offset, applied at
    every z on top of the designed bonds.
    """

    n_sites: int
    segments: tuple[Segment, ...]
    onsite: np.ndarray
    bond_factor: np.ndarray | None = None
    onsite_offset: np.ndarray | None = None
    floor: float = COUPLING_FLOOR
    warnings: tuple[str, ...] = ()
    meta: dict = field(default_factory=dict)

    @property
    def total_length(self) -> float:
        return float(sum(seg.length for seg in self.segments))

    def _locate(self, z: float) -> tuple[Segment, float]:
        if z < -1e-12 or z > self.total_length + 1e-12:
            raise LatticeError(f"z={z} outside schedule domain [0, {self.total_length}]")
        acc = 0.0
        for seg in self.segments:
            if z <= acc + seg.length or seg is self.segments[-1]:
                return seg, min(max(z - acc, 0.0), seg.length)
            acc += seg.length
        return self.segments[-1], self.segments[-1].length

    def bonds(self, z: float) -> np.ndarray:
        seg, zl = self._locate(z)
        b = seg.bonds_at(zl)
        if self.bond_factor is not None:
            b = b * self.bond_factor
            b = np.maximum(b, self.floor)
        return b

    def hamiltonian(self, z: float) -> np.ndarray:
        ons = self.onsite
        if self.onsite_offset is not None:
            ons = ons + self.onsite_offset
        return hamiltonian_from_bonds(self.bonds(z), ons)

    def endpoint_hamiltonians(self) -> tuple[np.ndarray, np.ndarray]:
        return self.hamiltonian(0.0), self.hamiltonian(self.total_length)


def constant_schedule(spec: LatticeSpec, length: float = 0.0) -> CouplingSchedule:
    b = bond_values(spec)
    seg = Segment(length=float(length), bonds_start=b, bonds_end=b, label="static")
    return CouplingSchedule(n_sites=spec.n_sites, segments=(seg,), onsite=spec.onsite_array())


def _shift_wall(walls: tuple[int, ...], index: int, direction: str) -> tuple[int, ...]:
    step = {"right": 2, "left": -2}.get(direction)
    if step is None:
        raise LatticeError(f"direction must be 'left' or 'right', got {direction!r}")
    new = list(walls)
    new[index] += step
    return tuple(new)


def _ramp_segment(spec: LatticeSpec, walls_from: tuple[int, ...],
                  walls_to: tuple[int, ...], s: float, z_m: float,
                  label: str = "move") -> Segment:
    b0 = bond_values(spec, walls_from)
    b1 = bond_values(spec, walls_to)
    return Segment(length=float(z_m), bonds_start=b0, bonds_end=b1, s=float(s), label=label)


def move_schedule(spec: LatticeSpec, dw_index: int, direction: str,
                  s: float, z_m: float) -> CouplingSchedule:
    """Schedule moving one wall by a unit cell (two sites) over [0, Z_m].

    Exactly the two bonds adjacent to the bent waveguide ramp: the weak one
    grows to the strong value and vice versa.  H(Z_m) equals the rebuilt
    lattice with the shifted wall.
    """
    if not 0 <= dw_index < len(spec.dw_positions):
        raise LatticeError(f"no wall with index {dw_index}")
    walls_to = _shift_wall(spec.dw_positions, dw_index, direction)
    p = walls_to[dw_index]
    if not 1 <= p <= spec.n_sites - 3:
        raise LatticeError(f"move pushes wall to {p}, off the lattice")
    others = [w for i, w in enumerate(walls_to) if i != dw_index]
    if any(abs(p - w) < 1 for w in others):
        raise LatticeError("move collides with another wall")
    seg = _ramp_segment(spec, spec.dw_positions, walls_to, s, z_m,
                        label=f"move[{dw_index}]{direction}")
    sched = CouplingSchedule(n_sites=spec.n_sites, segments=(seg,),
                             onsite=spec.onsite_array())
    sched.meta["walls_final"] = walls_to
    return sched


def concat_schedules(parts: Iterable[CouplingSchedule]) -> CouplingSchedule:
    parts = list(parts)
    first = parts[0]
    segs: list[Segment] = []
    warns: list[str] = []
    for p in parts:
        if p.n_sites != first.n_sites:
            raise LatticeError("cannot concatenate schedules of different sizes")
        segs.extend(p.segments)
        warns.extend(p.warnings)
    return CouplingSchedule(n_sites=first.n_sites, segments=tuple(segs),
                            onsite=first.onsite, warnings=tuple(warns))


def merge_split_schedule(spec: LatticeSpec, dw_a: int, dw_b: int, z_int: float,
                         s: float, z_m: float) -> CouplingSchedule:
    """Approach two walls until adjacent, hold for z_int, and separate again.

    During the hold the two wall sites form a dimer coupled by the wall
    coupling, effectively decoupled from the gapped bulk.  Approach segments
    move both walls simultaneously when the gap allows it; the return mirrors
    the approach, so H(Z_total) = H(0).
    """
    if z_int < 0:
        raise LatticeError("interaction length must be non-negative")
    walls = spec.dw_positions
    if len(walls) < 2:
        raise LatticeError("need two walls to merge")
    wa, wb = walls[dw_a], walls[dw_b]
    if wa > wb:
        dw_a, dw_b = dw_b, dw_a
        wa, wb = wb, wa
    gap = wb - wa
    if gap % 2 == 0:
        raise LatticeError(
            f"walls at {wa}, {wb} sit an even distance apart and cannot become adjacent")

    approach: list[Segment] = []
    current = list(walls)
    while current[dw_b] - current[dw_a] > 1:
        g = current[dw_b] - current[dw_a]
        nxt = list(current)
        if g >= 5:
            nxt[dw_a] += 2
            nxt[dw_b] -= 2
        else:  # g == 3, one wall closes the remaining cell
            nxt[dw_a] += 2
        approach.append(_ramp_segment(spec, tuple(current), tuple(nxt), s, z_m,
                                      label="approach"))
        current = nxt

    merged = tuple(current)
    bm = bond_values(spec, merged)
    dwell = Segment(length=float(z_int), bonds_start=bm, bonds_end=bm, s=float(s),
                    label="interact")
    ret = [Segment(length=seg.length, bonds_start=seg.bonds_end,
                   bonds_end=seg.bonds_start, s=seg.s, label="return")
           for seg in reversed(approach)]
    sched = CouplingSchedule(n_sites=spec.n_sites,
                             segments=tuple(approach) + (dwell,) + tuple(ret),
                             onsite=spec.onsite_array())
    sched.meta["walls_merged"] = merged
    sched.meta["approach_length"] = float(sum(sg.length for sg in approach))
    return sched


# ---------------------------------------------------------------------------
# disorder
# ---------------------------------------------------------------------------

def apply_disorder(schedule: CouplingSchedule, kind: str, delta: float,
                   seed: int) -> CouplingSchedule:
    """One static disorder realization layered over a schedule.

    ``onsite`` adds an independent uniform draw from [-delta, +delta] to each
    site's propagation constant.  ``coupling`` perturbs each bond by a uniform
    draw scaled in proportion to the bond's design strength, so the strongest
    design coupling wobbles by up to +-delta; this keeps the perturbation a
    realizable waveguide-spacing error (an additive +-delta on the weak bonds
    would drive couplings negative).  Bonds are floored at a small positive
    value if an extreme delta would close them, with a warning recorded.
    Deterministic for a given seed.
    """
    if delta < 0:
        raise LatticeError("disorder amplitude must be non-negative")
    rng = np.random.default_rng(seed)
    warns = list(schedule.warnings)
    if kind == "coupling":
        scale = max(max(float(seg.bonds_start.max()), float(seg.bonds_end.max()))
                    for seg in schedule.segments)
        draw = rng.uniform(-delta, delta, schedule.n_sites - 1)
        factor = 1.0 + draw / scale
        if np.any(factor <= 0):
            warns.append("coupling disorder clamped at the positive floor")
        new = replace(schedule, bond_factor=factor, warnings=tuple(warns))
    elif kind == "onsite":
        offs = rng.uniform(-delta, delta, schedule.n_sites)
        new = replace(schedule, onsite_offset=offs, warnings=tuple(warns))
    else:
        raise LatticeError(f"unknown disorder kind {kind!r}")
    new.meta.update(schedule.meta)
    new.meta["disorder"] = {"kind": kind, "delta": float(delta), "seed": int(seed)}
    return new
