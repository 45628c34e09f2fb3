"""Loading, validating and re-emitting JSON manifests."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

import jsonschema

from ..arrangement import Arrangement
from ..expr import format_mero, parse_mero_expression
from ..numkernel import LatticeBasis, LinearForm, as_vector, frac_str
from ..pairing import Constants, FixedPointDatum, PairingProblem, SubgroupDatum, Torus
from ..rootsystem import RootSystem


class ManifestError(ValueError):
    """Malformed manifest (schema violation or unreadable file)."""


def load_schema(name: str) -> dict:
    text = resources.files("qhresidue.cli").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


def _validate(data: dict, schema_name: str) -> None:
    try:
        jsonschema.validate(data, load_schema(schema_name))
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ManifestError(f"{schema_name} manifest invalid at {where}: {exc.message}") from None


def read_json(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ManifestError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ManifestError(f"{path}: invalid JSON ({exc})") from None


def _vec_out(v) -> list:
    return [frac_str(x) for x in v]


# --------------------------------------------------------------------------
# arrangement manifests
# --------------------------------------------------------------------------

@dataclass
class Manifest:
    group: RootSystem | None
    arrangement: Arrangement
    lattice: LatticeBasis
    lattice_kind: str | None = None
    functions: dict = field(default_factory=dict)
    run: dict = field(default_factory=dict)

    @property
    def rank(self) -> int:
        return self.arrangement.rank


def manifest_from_json(data: dict) -> Manifest:
    _validate(data, "manifest")
    group = RootSystem.from_name(data["group"]) if "group" in data else None
    if "arrangement" in data:
        a = data["arrangement"]
        forms = tuple(LinearForm(as_vector(f)) for f in a["forms"])
        labels = tuple(a["labels"]) if "labels" in a else None
        order = tuple(i - 1 for i in a["order"]) if "order" in a else None
        arr = Arrangement(forms, order, labels)
    else:
        arr = group.arrangement()
    lat = data.get("lattice", {})
    kind = lat.get("kind")
    if "generators" in lat:
        gram = lat.get("gram")
        lattice = LatticeBasis.from_generators([as_vector(g) for g in lat["generators"]],
                                               None if gram is None else [as_vector(r) for r in gram])
    elif group is not None:
        lattice = group.lattice(kind or "weight")
    else:
        from ..numkernel import identity
        lattice = LatticeBasis(identity(arr.rank))
    funcs = {k: parse_mero_expression(v, arr.rank) for k, v in data.get("functions", {}).items()}
    return Manifest(group, arr, lattice, kind, funcs, dict(data.get("run", {})))


def manifest_to_json(m: Manifest) -> dict:
    out: dict = {"version": 1}
    if m.group is not None:
        out["group"] = m.group.name
    out["arrangement"] = {"forms": [_vec_out(f.coeffs) for f in m.arrangement.forms],
                          "order": [i + 1 for i in m.arrangement.order], "labels": list(m.arrangement.labels)}
    lat: dict = {"generators": [_vec_out(g) for g in m.lattice.generators],
                 "gram": [_vec_out(r) for r in m.lattice.gram]}
    if m.lattice_kind:
        lat["kind"] = m.lattice_kind
    out["lattice"] = lat
    if m.functions:
        out["functions"] = {k: format_mero(v) for k, v in sorted(m.functions.items())}
    if m.run:
        run = dict(m.run)
        if "t" in run:
            run["t"] = _vec_out(as_vector(run["t"]))
        out["run"] = run
    return out


def load_manifest(path: str) -> Manifest:
    return manifest_from_json(read_json(path))


# --------------------------------------------------------------------------
# pairing problems
# --------------------------------------------------------------------------

def _group_from(choice):
    if isinstance(choice, str):
        return RootSystem.from_name(choice)
    return Torus(choice["torus"])


def _arr_choice(choice):
    if isinstance(choice, str):
        return choice
    return tuple(LinearForm(as_vector(f)) for f in choice)


def problem_from_json(data: dict) -> PairingProblem:
    _validate(data, "problem")
    group = _group_from(data["group"])
    subs = []
    for s in data["subgroups"]:
        kwargs = {}
        if "lattice" in s:
            lat = s["lattice"]
            if isinstance(lat, str):
                kwargs["lattice"] = lat
            else:
                gram = lat.get("gram")
                kwargs["lattice"] = LatticeBasis.from_generators(
                    [as_vector(g) for g in lat["generators"]], None if gram is None else [as_vector(r) for r in gram])
        for key in ("arrangement", "amw_arrangement"):
            if key in s:
                kwargs[key] = _arr_choice(s[key])
        if "order" in s:
            kwargs["order"] = tuple(i - 1 for i in s["order"])
        subs.append(SubgroupDatum(s["id"], tuple(as_vector(g) for g in s["generators"]), **kwargs))
    ranks = {s.id: s.rank for s in subs}
    fps = []
    for f in data["fixed_points"]:
        k = ranks.get(f["subgroup"], 0)
        h = parse_mero_expression(f["h"], k) if "h" in f else None
        eta = parse_mero_expression(f["eta"], k) if "eta" in f else None
        fps.append(FixedPointDatum(f["label"], f["subgroup"], as_vector(f["mu"]),
                                   tuple(LinearForm(as_vector(w)) for w in f.get("normal_weights", ())), h, eta))
    consts = Constants(**{k: as_vector([v])[0] for k, v in data.get("constants", {}).items()})
    kwargs = {"box": data["box"]} if "box" in data else {}
    return PairingProblem(group, subs, fps, consts, **kwargs)


def problem_to_json(p: PairingProblem) -> dict:
    g = p.group
    out: dict = {"version": 1, "group": g.name if isinstance(g, RootSystem) else {"torus": g.rank}}
    subs = []
    for s in p.subgroups:
        d: dict = {"id": s.id, "generators": [_vec_out(v) for v in s.generators]}
        if isinstance(s.lattice, LatticeBasis):
            d["lattice"] = {"generators": [_vec_out(v) for v in s.lattice.generators],
                            "gram": [_vec_out(r) for r in s.lattice.gram]}
        else:
            d["lattice"] = s.lattice
        for key in ("arrangement", "amw_arrangement"):
            v = getattr(s, key)
            d[key] = v if isinstance(v, str) else [_vec_out(f.coeffs) for f in v]
        if s.order:
            d["order"] = [i + 1 for i in s.order]
        subs.append(d)
    out["subgroups"] = subs
    fps = []
    for f in p.fixed_points:
        d = {"label": f.label, "subgroup": f.subgroup, "mu": _vec_out(f.mu),
             "normal_weights": [_vec_out(w.coeffs) for w in f.normal_weights]}
        if f.h is not None:
            d["h"] = format_mero(f.h)
        else:
            d["eta"] = format_mero(f.eta)
        fps.append(d)
    out["fixed_points"] = fps
    c = p.constants
    out["constants"] = {"n1": frac_str(c.n1), "n0p": frac_str(c.n0p), "k": frac_str(c.k),
                        "vol_g_squared": frac_str(c.vol_g_squared)}
    out["box"] = p.box
    return out


def load_problem(path: str) -> PairingProblem:
    return problem_from_json(read_json(path))
