"""JSON and DOT formats for models, action models, complexes and maps.

World keys are encoded structurally: facets become lists of ``[agent, value]`` pairs,
update worlds ``{"class", "action"}``, message-passing actions ``{"class", "pattern"}``
and failure patterns ``{"n", "fails"}``.
"""
from __future__ import annotations

import json
from typing import Any

from .actions import ActionModel, FailurePattern, MPAction
from .complex import Complex, SimplicialModel, Vertex, simplex
from .formula import Atom, parse, to_text
from .model import PartialEpistemicModel
from .update import UpdateWorld

PALETTE = ("gray", "red", "blue", "darkgreen", "orange", "purple")


class FormatError(ValueError):
    pass


# keys

def encode_key(k) -> Any:
    if isinstance(k, UpdateWorld):
        return {"class": [encode_key(x) for x in k.input_class], "action": encode_key(k.action)}
    if isinstance(k, MPAction):
        return {"class": [encode_key(x) for x in k.input_class], "pattern": encode_key(k.pattern)}
    if isinstance(k, FailurePattern):
        return {"n": k.n, "fails": {str(b): list(rs) for b, rs in k.fails}}
    if isinstance(k, Vertex):
        return [k.agent, k.value]
    if isinstance(k, tuple):
        return [encode_key(x) for x in k]
    if isinstance(k, (int, str)) and not isinstance(k, bool):
        return k
    raise FormatError(f"cannot encode world key {k!r}")


def _is_pair(x) -> bool:
    return isinstance(x, list) and len(x) == 2 and all(isinstance(v, int) for v in x)


def decode_key(obj) -> Any:
    if isinstance(obj, dict):
        if "action" in obj:
            return UpdateWorld(tuple(decode_key(x) for x in obj["class"]), decode_key(obj["action"]))
        if "pattern" in obj:
            return MPAction(tuple(decode_key(x) for x in obj["class"]), decode_key(obj["pattern"]))
        if "fails" in obj:
            return FailurePattern.from_map(obj["n"], {int(b): rs for b, rs in obj["fails"].items()})
        raise FormatError(f"unrecognised key object {obj!r}")
    if isinstance(obj, list):
        if obj and all(_is_pair(x) for x in obj):
            return simplex(obj)
        return tuple(decode_key(x) for x in obj)
    return obj


def key_text(k) -> str:
    return json.dumps(encode_key(k), separators=(",", ":"))


def atom_text(p) -> str:
    return f"input({p[0]},{p[1]})"


def parse_atom(text: str) -> tuple:
    f = parse(text)
    if not isinstance(f, Atom):
        raise FormatError(f"not an atom: {text!r}")
    return (f.agent, f.value)


# models

def model_to_json(m: PartialEpistemicModel) -> dict:
    return {
        "n": m.n,
        "worlds": [encode_key(w) for w in m.worlds],
        "rel": {str(a): [list(e) for e in m.edges(a) if e[0] <= e[1]] for a in range(m.n)},
        "labels": {str(i): [atom_text(p) for p in sorted(lab)] for i, lab in enumerate(m.labels) if lab},
    }


def model_from_json(obj: dict) -> PartialEpistemicModel:
    try:
        n = int(obj["n"])
        worlds = [decode_key(w) for w in obj["worlds"]]
        rel = {int(a): [(worlds[i], worlds[j]) for i, j in es] for a, es in obj.get("rel", {}).items()}
        labels = {worlds[int(i)]: [parse_atom(t) for t in ts] for i, ts in obj.get("labels", {}).items()}
    except (KeyError, IndexError, TypeError) as e:
        raise FormatError(f"malformed model JSON: {e!r}") from e
    return PartialEpistemicModel.from_pairs(n, worlds, rel, labels)


def action_model_to_json(act: ActionModel) -> dict:
    out = model_to_json(act.frame)
    out.pop("labels")
    out["pre"] = {str(i): to_text(act.pre[t]) for i, t in enumerate(act.actions)}
    return out


def action_model_from_json(obj: dict) -> ActionModel:
    frame = model_from_json({**obj, "labels": {}})
    try:
        pre = {frame.worlds[int(i)]: parse(t, n=frame.n) for i, t in obj.get("pre", {}).items()}
    except (IndexError, ValueError) as e:
        raise FormatError(f"malformed preconditions: {e}") from e
    return ActionModel(frame, pre)


# complexes and maps

def complex_to_json(sm: SimplicialModel | Complex) -> dict:
    c = sm.complex if isinstance(sm, SimplicialModel) else sm
    out = {"n": c.n, "values": list(c.values), "facets": [[list(v) for v in f] for f in c.facets]}
    if isinstance(sm, SimplicialModel):
        out["labels"] = {str(i): [atom_text(p) for p in sorted(sm.labels[f])] for i, f in enumerate(c.facets)}
    return out


def complex_from_json(obj: dict) -> SimplicialModel:
    c = Complex(int(obj["n"]), obj["values"], obj["facets"])
    labels = obj.get("labels")
    if labels is None:
        return SimplicialModel(c)
    return SimplicialModel(c, {c.facets[int(i)]: [parse_atom(t) for t in ts] for i, ts in labels.items()})


def morphism_to_json(f: dict) -> list:
    return [{"world": encode_key(w), "image": [encode_key(u) for u in sorted(f[w])]} for w in sorted(f)]


def morphism_from_json(obj: list) -> dict:
    return {decode_key(e["world"]): frozenset(decode_key(u) for u in e["image"]) for e in obj}


def facet_map_to_json(fm) -> dict:
    return {"map": {key_text(x): [encode_key(y) for y in ys] for x, ys in fm.map.items()}}


def load_any(obj: dict):
    """Model, action model or simplicial model, by shape."""
    if "facets" in obj:
        return complex_from_json(obj)
    if "pre" in obj:
        return action_model_from_json(obj)
    return model_from_json(obj)


# DOT

def _dot_escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def world_text(w) -> str:
    if isinstance(w, tuple) and w and isinstance(w[0], Vertex):
        return "{" + ", ".join(f"({v.agent},{v.value})" for v in w) + "}"
    if isinstance(w, UpdateWorld):
        return "[" + " ".join(world_text(x) for x in w.input_class) + "] / " + world_text(w.action)
    if isinstance(w, MPAction):
        return "[" + " ".join(world_text(x) for x in w.input_class) + "] " + str(w.pattern)
    return str(w)


def model_to_dot(m: PartialEpistemicModel, name: str = "model") -> str:
    lines = [f"graph {name} {{", "  node [shape=box, fontsize=10];"]
    for i, w in enumerate(m.worlds):
        lab = _dot_escape(world_text(w))
        if m.labels[i]:
            lab += "\\n" + " ".join(atom_text(p) for p in sorted(m.labels[i]))
        lines.append(f'  w{i} [label="{lab}"];')
    for a in range(m.n):
        for i, j in m.edges(a):
            if i < j:
                lines.append(f'  w{i} -- w{j} [color={PALETTE[a % len(PALETTE)]}, agent={a}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def complex_to_dot(c: Complex, name: str = "complex") -> str:
    lines = [f"graph {name} {{", "  node [shape=box, fontsize=10];"]
    for i, f in enumerate(c.facets):
        lines.append(f'  f{i} [label="{_dot_escape(world_text(f))}"];')
    for i, x in enumerate(c.facets):
        for j in range(i + 1, len(c.facets)):
            shared = set(x) & set(c.facets[j])
            for v in sorted(shared):
                lines.append(f'  f{i} -- f{j} [color={PALETTE[v.agent % len(PALETTE)]}, agent={v.agent}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def dumps(obj) -> str:
    """One top-level entry per line, values compact; stable for golden files."""
    if not isinstance(obj, dict):
        return json.dumps(obj, separators=(",", ":")) + "\n"
    body = ",\n".join(f" {json.dumps(k)}: {json.dumps(v, separators=(',', ':'))}" for k, v in obj.items())
    return "{\n" + body + "\n}\n"
