"""Combinatorial bookkeeping for contact round surgeries.

States are tuples of immutable :class:`PieceDescriptor`; steps never mutate
their input.  Framings are opaque labels compared by equality only.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, replace
from typing import Iterable, Sequence, Union

from .errors import IllegalStep

__all__ = ["BoundaryModel", "Boundary", "FeatureKind", "Feature", "PieceDescriptor",
           "PushOffIsotropic", "PushOffTransverse", "RoundIndex1", "RoundIndex2n",
           "XiRoundToConvex", "SurgeryStep", "TraceEntry", "Trace", "apply_step", "replay",
           "run_recipe", "initial_state", "RECIPES", "FINAL_TAGS"]


class BoundaryModel(str, enum.Enum):
    CONVEX = "ConvexSphereTimesCircle"
    XI_ROUND = "XiRoundSphereTimesCircle"
    CLOSED = "Closed"


class FeatureKind(str, enum.Enum):
    ISOTROPIC_CIRCLE = "isotropic circle"
    TRANSVERSE_CIRCLE = "transverse circle"
    PRELAGRANGIAN_TORUS = "pre-Lagrangian torus"
    CONVEX_HYPERSURFACE = "convex hypersurface"
    XI_ROUND_HYPERSURFACE = "xi-round hypersurface"


def sphere_circle_dividing(n: int) -> str:
    return f"S^{2 * n - 2} x S^1"


@dataclass(frozen=True)
class Boundary:
    name: str
    model: BoundaryModel
    dividing: str | None = None

    def to_json(self) -> dict:
        return {"name": self.name, "model": self.model.value, "dividing": self.dividing}


@dataclass(frozen=True)
class Feature:
    name: str
    kind: FeatureKind
    framing: str | None = None
    dividing: str | None = None

    def to_json(self) -> dict:
        return {"name": self.name, "kind": self.kind.value, "framing": self.framing,
                "dividing": self.dividing}


@dataclass(frozen=True)
class PieceDescriptor:
    name: str
    dim: int
    manifold: str
    boundaries: tuple[Boundary, ...] = ()
    features: tuple[Feature, ...] = ()
    tags: tuple[str, ...] = ()

    def __post_init__(self):
        if self.dim < 3 or self.dim % 2 == 0:
            raise ValueError(f"piece {self.name}: dimension must be odd and at least 3")
        for b in self.boundaries:
            if b.model is BoundaryModel.CONVEX and not b.dividing:
                raise ValueError(f"piece {self.name}: convex boundary {b.name} lacks a dividing set")
        for f in self.features:
            if f.kind is FeatureKind.CONVEX_HYPERSURFACE and not f.dividing:
                raise ValueError(f"piece {self.name}: convex hypersurface {f.name} lacks a dividing set")
        names = [f.name for f in self.features]
        if len(set(names)) != len(names):
            raise ValueError(f"piece {self.name}: duplicate feature names")

    def feature(self, name: str) -> Feature | None:
        for f in self.features:
            if f.name == name:
                return f
        return None

    def without(self, *names: str) -> tuple[Feature, ...]:
        return tuple(f for f in self.features if f.name not in names)

    def to_json(self) -> dict:
        return {"name": self.name, "dim": self.dim, "manifold": self.manifold,
                "boundaries": [b.to_json() for b in self.boundaries],
                "features": [f.to_json() for f in self.features], "tags": list(self.tags)}


# --------------------------------------------------------------------------
# steps

@dataclass(frozen=True)
class PushOffIsotropic:
    """Isotropic push-off of a transverse circle."""
    circle: str
    result: str
    framing: str
    label: str = ""


@dataclass(frozen=True)
class PushOffTransverse:
    """Transverse push-off of an isotropic circle."""
    circle: str
    result: str
    label: str = ""


@dataclass(frozen=True)
class RoundIndex1:
    circle_a: str
    circle_b: str
    framings: tuple[str, str]
    belt: str = ""
    tag: str | None = None
    label: str = ""
    assumption: str | None = None


@dataclass(frozen=True)
class RoundIndex2n:
    hypersurface: str
    framing: str
    cores: tuple[str, str] = ()
    tag: str | None = None
    label: str = ""


@dataclass(frozen=True)
class XiRoundToConvex:
    hypersurface: str
    result: str = ""
    label: str = ""


SurgeryStep = Union[PushOffIsotropic, PushOffTransverse, RoundIndex1, RoundIndex2n, XiRoundToConvex]


def step_json(s: SurgeryStep) -> dict:
    out = {"kind": type(s).__name__}
    for k, v in s.__dict__.items():
        out[k] = list(v) if isinstance(v, tuple) else v
    return out


@dataclass(frozen=True)
class TraceEntry:
    step: SurgeryStep
    pre: tuple[PieceDescriptor, ...]
    post: tuple[PieceDescriptor, ...]
    log: str

    def to_json(self) -> dict:
        return {"step": step_json(self.step), "log": self.log,
                "pre": [p.to_json() for p in self.pre], "post": [p.to_json() for p in self.post]}


@dataclass(frozen=True)
class Trace:
    recipe: str
    n: int
    entries: tuple[TraceEntry, ...]
    initial: tuple[PieceDescriptor, ...]
    assumptions: tuple[str, ...] = ()

    @property
    def final(self) -> tuple[PieceDescriptor, ...]:
        return self.entries[-1].post if self.entries else self.initial

    @property
    def logs(self) -> list[str]:
        return [e.log for e in self.entries]

    @property
    def kinds(self) -> list[str]:
        return [type(e.step).__name__ for e in self.entries]

    def to_json(self) -> dict:
        return {"recipe": self.recipe, "n": self.n, "initial": [p.to_json() for p in self.initial],
                "steps": [e.to_json() for e in self.entries],
                "final": [p.to_json() for p in self.final], "assumptions": list(self.assumptions)}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True, ensure_ascii=False)


def _locate(state: Sequence[PieceDescriptor], name: str) -> tuple[int, PieceDescriptor, Feature]:
    for i, p in enumerate(state):
        f = p.feature(name)
        if f is not None:
            return i, p, f
    raise IllegalStep(f"no feature named {name!r} in the current pieces")


def _expect(f: Feature, kind: FeatureKind, what: str) -> None:
    if f.kind is not kind:
        raise IllegalStep(f"{what}: {f.name!r} is a {f.kind.value}, expected a {kind.value}")


def _prefix(label: str) -> str:
    return f"{label}: " if label else ""


def _put(state, i, piece) -> tuple[PieceDescriptor, ...]:
    return tuple(piece if j == i else p for j, p in enumerate(state))


def apply_step(state: Sequence[PieceDescriptor], s: SurgeryStep
               ) -> tuple[tuple[PieceDescriptor, ...], str]:
    """Legality check and rewrite; returns the new state and one audit-log line."""
    state = tuple(state)
    if isinstance(s, (PushOffIsotropic, PushOffTransverse)):
        i, p, f = _locate(state, s.circle)
        iso = isinstance(s, PushOffIsotropic)
        src = FeatureKind.TRANSVERSE_CIRCLE if iso else FeatureKind.ISOTROPIC_CIRCLE
        _expect(f, src, "push-off")
        if p.feature(s.result) is not None:
            raise IllegalStep(f"push-off target {s.result!r} already exists")
        new = Feature(s.result, FeatureKind.ISOTROPIC_CIRCLE, s.framing) if iso else \
            Feature(s.result, FeatureKind.TRANSVERSE_CIRCLE)
        word = "isotropic" if iso else "transverse"
        return (_put(state, i, replace(p, features=p.features + (new,))),
                f"{_prefix(s.label)}{word} push-off of {s.circle} in {p.name} gives {s.result}")
    if isinstance(s, XiRoundToConvex):
        i, p, f = _locate(state, s.hypersurface)
        _expect(f, FeatureKind.XI_ROUND_HYPERSURFACE, "xi-round to convex")
        out = s.result or f"{s.hypersurface}~"
        feat = Feature(out, FeatureKind.CONVEX_HYPERSURFACE, f.framing,
                       sphere_circle_dividing((p.dim - 1) // 2))
        feats = tuple(feat if g.name == f.name else g for g in p.features)
        return (_put(state, i, replace(p, features=feats)),
                f"{_prefix(s.label)}perturb xi-round {s.hypersurface} in {p.name} to convex {out} "
                f"with dividing set {feat.dividing}")
    if isinstance(s, RoundIndex1):
        return _index1(state, s)
    if isinstance(s, RoundIndex2n):
        return _index2n(state, s)
    raise IllegalStep(f"unknown step {s!r}")


def _index1(state, s: RoundIndex1):
    if s.circle_a == s.circle_b:
        raise IllegalStep("index 1 needs two disjoint isotropic circles")
    ia, pa, fa = _locate(state, s.circle_a)
    ib, pb, fb = _locate(state, s.circle_b)
    _expect(fa, FeatureKind.ISOTROPIC_CIRCLE, "index 1")
    _expect(fb, FeatureKind.ISOTROPIC_CIRCLE, "index 1")
    if len(s.framings) != 2 or not all(s.framings):
        raise IllegalStep("index 1 needs a framing label for each circle")
    for f, lab in ((fa, s.framings[0]), (fb, s.framings[1])):
        if f.framing != lab:
            raise IllegalStep(f"framing label {lab!r} does not match {f.name!r} ({f.framing!r})")
    if pa.dim != pb.dim:
        raise IllegalStep("index 1 joins pieces of different dimension")
    belt = s.belt or f"belt({s.circle_a},{s.circle_b})"
    belt_f = Feature(belt, FeatureKind.XI_ROUND_HYPERSURFACE)
    tags = tuple(t for t in (s.tag,) if t)
    if ia == ib:
        merged = replace(pa, features=pa.without(s.circle_a, s.circle_b) + (belt_f,),
                         tags=pa.tags + tags)
        new = _put(state, ia, merged)
        where = pa.name
    else:
        first, second = (pa, pb) if ia < ib else (pb, pa)
        merged = PieceDescriptor(
            first.name, first.dim, first.manifold, first.boundaries + second.boundaries,
            first.without(s.circle_a, s.circle_b) + second.without(s.circle_a, s.circle_b) + (belt_f,),
            first.tags + second.tags + tags)
        lo, hi = sorted((ia, ib))
        new = state[:lo] + (merged,) + state[lo + 1:hi] + state[hi + 1:]
        where = f"{first.name} and {second.name}"
    return new, (f"{_prefix(s.label)}contact round surgery of index 1 along {s.circle_a}, "
                 f"{s.circle_b} in {where}")


def _index2n(state, s: RoundIndex2n):
    i, p, f = _locate(state, s.hypersurface)
    if f.kind is FeatureKind.XI_ROUND_HYPERSURFACE:
        raise IllegalStep(f"{f.name!r} is xi-round, not convex; perturb it to convex first")
    _expect(f, FeatureKind.CONVEX_HYPERSURFACE, "index 2n")
    want = sphere_circle_dividing((p.dim - 1) // 2)
    if f.dividing != want:
        raise IllegalStep(f"{f.name!r} has dividing set {f.dividing!r}, expected {want!r}")
    if not s.framing:
        raise IllegalStep("index 2n needs a framing label")
    cores = tuple(Feature(c, FeatureKind.TRANSVERSE_CIRCLE) for c in s.cores)
    piece = replace(p, features=p.without(f.name) + cores,
                    tags=p.tags + tuple(t for t in (s.tag,) if t))
    return _put(state, i, piece), (f"{_prefix(s.label)}contact round surgery of index 2n along "
                                   f"{f.name} in {p.name}: two solid tubes glued")


def replay(state: Sequence[PieceDescriptor], steps: Iterable[SurgeryStep], *, recipe: str = "",
           n: int = 1, assumptions: Sequence[str] = ()) -> Trace:
    state = tuple(state)
    initial = state
    entries = []
    for s in steps:
        post, log = apply_step(state, s)
        entries.append(TraceEntry(s, state, post, log))
        state = post
    return Trace(recipe, n, tuple(entries), initial, tuple(assumptions))


# --------------------------------------------------------------------------
# recipes

FINAL_TAGS = {"twist-along-circle": "model π-Lutz tube inserted",
              "twist-along-hypersurface": "wide Giroux domain"}

FRAMING_ASSUMPTION = ("the framing of the last index 1 surgery corresponds to the trivialization "
                      "of the conformal symplectic normal bundle of L1 and L2; recorded, not computed")


def initial_state(recipe: str, n: int) -> tuple[PieceDescriptor, ...]:
    if n < 1:
        raise ValueError("n must be at least 1")
    dim = 2 * n + 1
    if recipe == "twist-along-circle":
        return (PieceDescriptor("M", dim, "M", features=(Feature("gamma", FeatureKind.TRANSVERSE_CIRCLE),)),
                PieceDescriptor("model", dim, f"S^{dim}", features=(
                    Feature("Gamma", FeatureKind.TRANSVERSE_CIRCLE),
                    Feature("dT", FeatureKind.XI_ROUND_HYPERSURFACE)), tags=("model π-Lutz tube",)))
    if recipe == "twist-along-hypersurface":
        return (PieceDescriptor("M", dim, "M", features=(
            Feature("H", FeatureKind.XI_ROUND_HYPERSURFACE),
            Feature("L1", FeatureKind.ISOTROPIC_CIRCLE, "CSN(L1)"),
            Feature("L2", FeatureKind.ISOTROPIC_CIRCLE, "CSN(L2)"))),)
    raise KeyError(recipe)


def _circle_steps(n: int) -> list[SurgeryStep]:
    return [PushOffIsotropic("gamma", "gamma~", "CSN(gamma~)", "Operation 1"),
            PushOffIsotropic("Gamma", "Gamma~", "CSN(Gamma~)", "Operation 1"),
            RoundIndex1("gamma~", "Gamma~", ("CSN(gamma~)", "CSN(Gamma~)"), label="Operation 1"),
            XiRoundToConvex("dT", "dT~", "Operation 2"),
            RoundIndex2n("dT~", "product framing", tag=FINAL_TAGS["twist-along-circle"],
                         label="Operation 2")]


def _hypersurface_steps(n: int) -> list[SurgeryStep]:
    return [XiRoundToConvex("H", "H~", "Operation 1"),
            RoundIndex2n("H~", "product framing", cores=("l1", "l2"), label="Operation 1"),
            PushOffIsotropic("l1", "l1~", "CSN(l1~)", "Operation 2"),
            RoundIndex1("L1", "l1~", ("CSN(L1)", "CSN(l1~)"), label="Operation 2"),
            PushOffIsotropic("l2", "l2~", "CSN(l2~)", "Operation 3"),
            RoundIndex1("l2~", "L2", ("CSN(l2~)", "CSN(L2)"), tag=FINAL_TAGS["twist-along-hypersurface"],
                        label="Operation 3", assumption=FRAMING_ASSUMPTION)]


RECIPES = {"twist-along-circle": _circle_steps, "twist-along-hypersurface": _hypersurface_steps}


def run_recipe(name: str, n: int) -> Trace:
    if name not in RECIPES:
        raise KeyError(f"unknown recipe {name!r}; known: {', '.join(sorted(RECIPES))}")
    steps = RECIPES[name](n)
    notes = [s.assumption for s in steps if isinstance(s, RoundIndex1) and s.assumption]
    return replay(initial_state(name, n), steps, recipe=name, n=n, assumptions=notes)
