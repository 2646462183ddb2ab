"""PCSP text format, the built-in menu problem and a random instance generator.

Format (line oriented, ``#`` comments)::

    problem <name>
    var <name> : <label> <label> ...
    constraint <id> <necessity> on <var> ... <allow|forbid> { <tuple> ; <tuple> ; ... }
"""

from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .core import (
    Constraint,
    DomainVariable,
    Mode,
    Problem,
    ProblemError,
    ValuedConstraint,
    check_necessity,
    check_token,
)

_KEYWORDS = {"allow", "forbid"}
_DECIMAL = re.compile(r"^(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][-+]?\d+)?$")


class PcspSyntaxError(ProblemError):
    def __init__(self, lineno, message):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def _strip_comment(line):
    return line.split("#", 1)[0].strip()


def _parse_constraint(lineno, body, domains):
    # body: <id> <nec> on <vars...> <allow|forbid> { ... }
    if "{" not in body or not body.rstrip().endswith("}"):
        raise PcspSyntaxError(lineno, "constraint must end with a { ... } relation")
    head, _, rel = body.partition("{")
    rel = rel.rstrip()[:-1]
    if "{" in rel or "}" in rel:
        raise PcspSyntaxError(lineno, "nested or repeated braces")
    words = head.split()
    if len(words) < 5 or words[2] != "on":
        raise PcspSyntaxError(lineno, "expected: constraint <id> <necessity> on <vars> <allow|forbid> { ... }")
    cid, nec_text, mode_word = words[0], words[1], words[-1]
    scope = words[3:-1]
    if mode_word not in _KEYWORDS:
        raise PcspSyntaxError(lineno, f"expected allow or forbid, got {mode_word!r}")
    if not scope:
        raise PcspSyntaxError(lineno, f"constraint {cid!r} has an empty scope")
    if not _DECIMAL.match(nec_text):
        raise PcspSyntaxError(lineno, f"necessity {nec_text!r} is not a decimal literal")
    for name in scope:
        if name not in domains:
            raise PcspSyntaxError(lineno, f"constraint {cid!r} mentions undeclared variable {name!r}")
    tuples = []
    if rel.strip():
        for chunk in rel.split(";"):
            labels = chunk.split()
            if len(labels) != len(scope):
                raise PcspSyntaxError(
                    lineno, f"tuple {chunk.strip()!r} has {len(labels)} labels, scope has {len(scope)}")
            for name, lab in zip(scope, labels):
                if lab not in domains[name]:
                    raise PcspSyntaxError(lineno, f"label {lab!r} not in domain of {name!r}")
            tuples.append(tuple(labels))
    try:
        k = Constraint(tuple(scope), frozenset(tuples), Mode(mode_word),
                       tuple(domains[n] for n in scope))
        return ValuedConstraint(cid, k, check_necessity(nec_text))
    except ProblemError as exc:
        raise PcspSyntaxError(lineno, str(exc)) from None


def parse_problem(text: str) -> Problem:
    name = None
    variables = []
    domains = {}
    constraints = []
    seen_ids = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        if not line:
            continue
        keyword, _, rest = line.partition(" ")
        rest = rest.strip()
        if name is None:
            if keyword != "problem" or len(rest.split()) != 1:
                raise PcspSyntaxError(lineno, "first declaration must be 'problem <name>'")
            try:
                name = check_token(rest, "problem name")
            except ProblemError as exc:
                raise PcspSyntaxError(lineno, str(exc)) from None
        elif keyword == "var":
            vname, colon, labels = rest.partition(":")
            vname = vname.strip()
            if not colon or not vname or len(vname.split()) != 1:
                raise PcspSyntaxError(lineno, "expected: var <name> : <label> ...")
            if vname in domains:
                raise PcspSyntaxError(lineno, f"duplicate variable name {vname!r}")
            if vname in _KEYWORDS or vname == "on":
                raise PcspSyntaxError(lineno, f"{vname!r} is reserved")
            try:
                var = DomainVariable(vname, tuple(labels.split()))
            except ProblemError as exc:
                raise PcspSyntaxError(lineno, str(exc)) from None
            variables.append(var)
            domains[vname] = var.domain
        elif keyword == "constraint":
            vc = _parse_constraint(lineno, rest, domains)
            if vc.id in seen_ids:
                raise PcspSyntaxError(lineno, f"duplicate constraint id {vc.id!r}")
            seen_ids.add(vc.id)
            constraints.append(vc)
        elif keyword == "problem":
            raise PcspSyntaxError(lineno, "second 'problem' declaration")
        else:
            raise PcspSyntaxError(lineno, f"unknown declaration {keyword!r}")
    if name is None:
        raise PcspSyntaxError(1, "empty input, expected 'problem <name>'")
    return Problem(name, tuple(variables), tuple(constraints))


def load_problem(path) -> Problem:
    return parse_problem(Path(path).read_text(encoding="utf-8"))


def format_number(x: float) -> str:
    return repr(float(x))


def write_problem(p: Problem) -> str:
    lines = [f"problem {p.name}"]
    for var in p.variables:
        lines.append(f"var {var.name} : {' '.join(var.domain)}")
    for vc in p.constraints:
        c = vc.constraint
        index = [{lab: i for i, lab in enumerate(d)} for d in c.domains]
        ordered = sorted(c.tuples, key=lambda t: [ix[lab] for ix, lab in zip(index, t)])
        body = " ; ".join(" ".join(t) for t in ordered)
        rel = f"{{ {body} }}" if body else "{}"
        lines.append(
            f"constraint {vc.id} {format_number(vc.necessity)} on {' '.join(c.scope)} {c.mode.value} {rel}")
    return "\n".join(lines) + "\n"


def menu_text() -> str:
    return resources.files("possibcsp").joinpath("data/menu.pcsp").read_text(encoding="utf-8")


def builtin_menu() -> Problem:
    """The restaurant menu design problem (4 variables, 15 constraints)."""
    return parse_problem(menu_text())


@dataclass(frozen=True)
class GeneratorSpec:
    seed: int = 0
    n_vars: int = 4
    domain_size: int = 3
    n_constraints: int = 5
    max_arity: int = 2
    tightness: float = 0.3
    necessity_levels: tuple = field(default=(0.2, 0.5, 0.8, 1.0))

    def __post_init__(self):
        for name in ("n_vars", "domain_size", "max_arity"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.n_constraints < 0:
            raise ValueError("n_constraints must be non-negative")
        if self.max_arity > self.n_vars:
            raise ValueError(f"max_arity {self.max_arity} exceeds n_vars {self.n_vars}")
        if not 0.0 <= self.tightness <= 1.0:
            raise ValueError(f"tightness {self.tightness} is outside [0, 1]")
        if not self.necessity_levels:
            raise ValueError("necessity_levels is empty")
        for level in self.necessity_levels:
            if not 0.0 < level <= 1.0:
                raise ValueError(f"necessity level {level} is outside (0, 1]")


def random_problem(spec: GeneratorSpec) -> Problem:
    rng = random.Random(spec.seed)
    labels = tuple(f"v{i}" for i in range(spec.domain_size))
    variables = tuple(DomainVariable(f"x{i}", labels) for i in range(spec.n_vars))
    names = [v.name for v in variables]
    constraints = []
    for c in range(spec.n_constraints):
        arity = rng.randint(1, spec.max_arity)
        scope = tuple(sorted(rng.sample(names, arity), key=names.index))
        cross = list(itertools.product(labels, repeat=arity))
        n_forbidden = round(spec.tightness * len(cross))
        forbidden = rng.sample(cross, n_forbidden)
        k = Constraint(scope, frozenset(forbidden), Mode.FORBID, (labels,) * arity)
        constraints.append(ValuedConstraint(f"c{c}", k, rng.choice(spec.necessity_levels)))
    return Problem(f"random-{spec.seed}", variables, tuple(constraints))
