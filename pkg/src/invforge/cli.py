"""Command-line front door.

    invforge run --config cfg.json [--seed N] [--out DIR]
    invforge construct|verify|stabilizer|jacobian|bench [--config cfg.json | flags]

Exit status: 0 all pass, 1 any fail, 2 config or usage error,
3 inconclusive without any fail.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import jsonschema

from .classical import CLASSICAL_CLAIMS, KIND_GROUP, identity_check_classical, theorem41_generators
from .classical import chu_converse, matrix_size
from .errors import ConfigInvalid, InvforgeError
from .gf import make_field
from .groups import ENUM_CAP, enumerate_group, gl_order, parse_form, sample_elements, standard_form
from .groups import FORM_FOR_GROUP
from .invariants import IDENTITY_CLAIMS, dickson_c, dickson_d, dickson_matrix, identity_check
from .invariants import steinberg_build
from .mpoly import PolyMatrix, VarGrid, determinant
from .ratexpr import TERM_CAP
from .report import VerdictReport
from .verify import (
    eta_membership_check,
    invariance_report,
    jacobian_independence,
    stabilizer_enumeration,
)

EXTRA_CLAIMS = ("invariance", "det_invariance", "eta_membership", "chu_converse")
TASK_PATTERN = ("^(construct|stabilizer|jacobian|bench|verify:("
                + "|".join(IDENTITY_CLAIMS + CLASSICAL_CLAIMS + EXTRA_CLAIMS) + "))$")

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["field", "grid", "tasks"],
    "properties": {
        "field": {
            "type": "object",
            "additionalProperties": False,
            "required": ["p"],
            "properties": {"p": {"type": "integer", "minimum": 2},
                           "e": {"type": "integer", "minimum": 1}},
        },
        "grid": {
            "type": "object",
            "additionalProperties": False,
            "required": ["m"],
            "properties": {"m": {"type": "integer", "minimum": 1},
                           "n": {"type": "integer", "minimum": 1},
                           "size": {"type": "integer", "minimum": 1}},
        },
        "group": {"enum": ["GL", "SL", "Sp", "U", "O"]},
        "form": {"type": "string"},
        "tasks": {"type": "array", "minItems": 1,
                  "items": {"type": "string", "pattern": TASK_PATTERN}},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "mode": {"enum": ["exact", "prob", "auto"]},
        "trials": {"type": "integer", "minimum": 1},
        "samples": {"type": "integer", "minimum": 1},
        "params": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"i": {"type": "integer", "minimum": 1},
                           "j": {"type": "integer", "minimum": 1},
                           "k": {"type": "integer", "minimum": 0},
                           "s": {"type": "integer", "minimum": 1},
                           "removed": {"type": "array", "items": {"type": "integer"},
                                       "minItems": 2, "maxItems": 2}},
        },
        "caps": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"enumeration": {"type": "integer", "minimum": 1},
                           "term_count": {"type": "integer", "minimum": 1}},
        },
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"dir": {"type": "string"},
                           "reports": {"type": "string"},
                           "polynomials": {"type": "string"}},
        },
    },
}


def validate_config(cfg) -> dict:
    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ConfigInvalid(f"config rejected: {exc.message}") from None
    grid = cfg["grid"]
    if "n" not in grid and "size" not in grid:
        raise ConfigInvalid("grid needs n or size")
    try:
        make_field(cfg["field"]["p"], cfg["field"].get("e", 1))
    except InvforgeError as exc:
        raise ConfigInvalid(f"bad field: {exc}") from None
    return cfg


def load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigInvalid(f"cannot read config {path}: {exc}") from None
    return validate_config(cfg)


class Runner:
    """Executes the tasks of one validated config in order."""

    def __init__(self, cfg: dict, out_dir: Path | None = None, stdout=None):
        self.cfg = cfg
        self.stdout = stdout or sys.stdout
        f = cfg["field"]
        self.spec = make_field(f["p"], f.get("e", 1))
        self.group = cfg.get("group", "GL")
        self.seed = cfg.get("seed", 0)
        self.mode = cfg.get("mode", "auto")
        self.trials = cfg.get("trials", 20)
        self.samples = cfg.get("samples", 50)
        self.params = cfg.get("params", {})
        caps = cfg.get("caps", {})
        env_cap = os.environ.get("INVFORGE_CAP")
        self.enum_cap = int(env_cap) if env_cap else caps.get("enumeration", ENUM_CAP)
        self.term_cap = caps.get("term_count", TERM_CAP)
        grid = cfg["grid"]
        self.m = grid["m"]
        out = cfg.get("output", {})
        self.out_dir = out_dir or Path(out.get("dir", "invforge-out"))
        self.reports_name = out.get("reports", "reports.jsonl")
        self.poly_name = out.get("polynomials", "construct.txt")
        if self.group in FORM_FOR_GROUP:
            self.kind = {v: k for k, v in KIND_GROUP.items()}[self.group]
            self.size = matrix_size(self.kind, grid)
        else:
            self.kind = None
            self.size = grid.get("size", grid.get("n"))
        self.n = self.size
        self.reports: list[VerdictReport] = []
        self.poly_lines: list[str] = []

    # ------------------------------------------------------------------
    def base_q(self) -> int:
        if self.kind == "unitary":
            if self.spec.e % 2:
                raise ConfigInvalid("unitary configs need a field F_(q^2)")
            return self.spec.p ** (self.spec.e // 2)
        return self.spec.q

    def form(self):
        text = self.cfg.get("form", "standard")
        kind = FORM_FOR_GROUP[self.group]
        if text == "standard":
            return standard_form(kind, self.size, self.spec)
        return parse_form(kind, text, self.spec)

    def family(self):
        return steinberg_build(self.m, self.n, self.spec)

    def generators(self):
        """(labels, generators) of the configured family."""
        if self.kind is None:
            fam = self.family()
            items = sorted(fam.generators.items())
            return [f"l[{i},{j}]/l0" for (i, j), _ in items], [g for _, g in items]
        bf = theorem41_generators(self.kind, self.form(), self.m)
        return bf.labels, bf.generators

    def elements(self, group: str, form=None):
        if gl_order(self.size, self.spec.q) <= min(self.enum_cap, 5000):
            return enumerate_group(group, self.size, self.spec, form, cap=self.enum_cap), "enumeration"
        return sample_elements(group, self.size, self.spec, self.samples, seed=self.seed,
                               form=form), "exact"

    # ------------------------------------------------------------------
    def task_construct(self):
        lines = self.poly_lines
        if self.kind is None:
            grid = VarGrid(1, self.n)
            for i in range(self.n + 1):
                lines.append(f"d[{self.n},{i}] = {dickson_d(self.n, i, 1, grid, self.spec)}")
            for s in range(self.n):
                lines.append(f"c[{self.n},{s}] = {dickson_c(self.n, s, 1, grid, self.spec)}")
            fam = self.family()
            lines.append(f"l0 = {fam.ell0}")
            for i in range(1, self.m + 1):
                for j in range(1, self.n + 1):
                    lines.append(f"l[{i},{j}] = {fam.lijk(i, j, 1)}")
            count = 2 * self.n + 1 + 1 + self.m * self.n
        else:
            labels, gens = self.generators()
            for label, g in zip(labels, gens):
                lines.append(f"{label} = {g}")
            count = len(gens)
        return VerdictReport("construct", self.base_params(), "exact", "pass",
                             details={"polynomials": count})

    def base_params(self) -> dict:
        out = {"q": self.spec.q, "m": self.m, "size": self.size, "group": self.group}
        if self.kind is not None:
            out["form"] = str(self.form())
        return out

    def task_verify(self, claim: str):
        p = dict(self.params)
        if claim in IDENTITY_CLAIMS:
            p.update({"q": self.spec.q, "n": self.n, "m": self.m, "mode": self.mode,
                      "trials": self.trials, "seed": self.seed})
            if "removed" in p:
                p["removed"] = tuple(p["removed"])
            return identity_check(claim, p)
        if claim in CLASSICAL_CLAIMS:
            if self.kind is None:
                raise ConfigInvalid(f"{claim} needs group Sp, U or O")
            p.update({"q": self.base_q(), "size": self.size, "m": self.m,
                      "form": self.cfg.get("form", "standard"), "seed": self.seed,
                      "kind": self.kind})
            return identity_check_classical(claim, p)
        if claim in ("invariance", "det_invariance"):
            return self.invariance(claim)
        if claim == "eta_membership":
            return eta_membership_check(steinberg_build(self.n, self.n, self.spec),
                                        p.get("s", 2), seed=self.seed, samples=self.samples)
        if claim == "chu_converse":
            form = self.form() if self.group == "O" else None
            return chu_converse(self.spec.q, self.size, form)
        raise ConfigInvalid(f"unknown claim {claim}")

    def invariance(self, claim: str):
        if self.kind is None:
            fam = self.family()
            if claim == "invariance":
                labels, gens = self.generators()
            else:
                k = self.params.get("k", 1)
                labels, gens = ["l0"], [fam.ell0]
                for i in range(1, self.m + 1):
                    for j in range(1, self.n + 1):
                        labels.append(f"l[{i},{j}]^({k})")
                        gens.append(fam.lijk(i, j, k))
            group = self.group
            elements, method = self.elements(group)
            mode = "invariant" if claim == "invariance" else "det_invariant"
            return invariance_report(gens, elements, mode=mode, claim=claim,
                                     params=self.base_params(), labels=labels, method=method,
                                     seed=None if method == "enumeration" else self.seed)
        if claim == "det_invariance":
            raise ConfigInvalid("det_invariance applies to GL/SL configs")
        labels, gens = self.generators()
        form = self.form()
        elements, method = self.elements(self.group, form)
        return invariance_report(gens, elements, claim=claim, params=self.base_params(),
                                 labels=labels, method=method, transpose=True,
                                 seed=None if method == "enumeration" else self.seed)

    def task_stabilizer(self):
        fam = steinberg_build(self.n, self.n, self.spec)
        return stabilizer_enumeration(fam, cap=self.enum_cap)

    def task_jacobian(self):
        labels, gens = self.generators()
        grid = gens[0].grid
        rep = jacobian_independence(gens, grid, seed=self.seed, claim="jacobian",
                                    params=self.base_params())
        rep.details["count"] = len(gens)
        rep.details["expected_count"] = self.m * self.size
        if len(gens) != self.m * self.size and rep.verdict == "pass":
            rep.verdict = "fail"
            rep.witness = {"count": len(gens)}
        return rep

    def task_bench(self):
        """Cofactor vs Bareiss on Dickson and Steinberg matrices; timings go
        to stdout only so the report stays deterministic."""
        q = self.spec.q
        grid = VarGrid(1, self.n)
        cases = [(f"D[{self.n},{i}]", dickson_matrix(self.n, i, 1, grid, self.spec))
                 for i in range(self.n + 1)]
        fam = self.family()
        for i in range(1, min(self.m, self.n) + 1):
            cols = list(fam.L0_cols)
            cols[0] = fam.replacement(i, 1)
            cases.append((f"L[{i},1]", PolyMatrix.from_columns([fam.column(c) for c in cols])))
        lines, terms = [], {}
        agree = True
        for name, mtx in cases:
            t0 = time.perf_counter()
            a = determinant(mtx, strategy="cofactor")
            t1 = time.perf_counter()
            b = determinant(mtx, strategy="bareiss")
            t2 = time.perf_counter()
            agree = agree and a == b
            terms[name] = len(a)
            lines.append(f"bench {name} q={q} cofactor={t1 - t0:.4f}s bareiss={t2 - t1:.4f}s "
                         f"terms={len(a)}")
        terms["l0"] = len(fam.ell0)
        for line in lines:
            print(line, file=self.stdout)
        return VerdictReport("bench", self.base_params(), "exact", "pass" if agree else "fail",
                             details={"terms": terms, "strategies_agree": agree})

    # ------------------------------------------------------------------
    def run_task(self, task: str) -> VerdictReport:
        try:
            if task == "construct":
                return self.task_construct()
            if task.startswith("verify:"):
                return self.task_verify(task.split(":", 1)[1])
            if task == "stabilizer":
                return self.task_stabilizer()
            if task == "jacobian":
                return self.task_jacobian()
            if task == "bench":
                return self.task_bench()
        except ConfigInvalid:
            raise
        except InvforgeError as exc:
            return VerdictReport(task, self.base_params(), "exact", "fail",
                                 witness={"error": type(exc).__name__},
                                 details={"message": str(exc)})
        raise ConfigInvalid(f"unknown task {task}")

    def run(self) -> int:
        for task in self.cfg["tasks"]:
            rep = self.run_task(task)
            self.reports.append(rep)
            print(f"{task}: {rep.verdict}", file=self.stdout)
        self.write()
        return exit_code(self.reports)

    def write(self):
        self.out_dir.mkdir(parents=True, exist_ok=True)
        with open(self.out_dir / self.reports_name, "w", encoding="utf-8", newline="\n") as fh:
            for rep in self.reports:
                fh.write(rep.to_json() + "\n")
        if self.poly_lines:
            with open(self.out_dir / self.poly_name, "w", encoding="utf-8", newline="\n") as fh:
                fh.write("\n".join(self.poly_lines) + "\n")


def exit_code(reports) -> int:
    verdicts = {r.verdict for r in reports}
    if "fail" in verdicts:
        return 1
    if "inconclusive" in verdicts:
        return 3
    return 0


def _config_from_flags(args, task: str) -> dict:
    cfg = {"field": {"p": args.p, "e": args.e}, "grid": {"m": args.m}, "tasks": [task]}
    if args.size is not None:
        cfg["grid"]["size"] = args.size
    else:
        cfg["grid"]["n"] = args.n
    if args.group:
        cfg["group"] = args.group
    if args.form:
        cfg["form"] = args.form
    if args.mode:
        cfg["mode"] = args.mode
    params = {k: getattr(args, k) for k in ("i", "j", "k", "s") if getattr(args, k) is not None}
    if params:
        cfg["params"] = params
    return cfg


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="invforge",
                                     description="Vector invariant fields over finite fields")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("run", "construct", "verify", "stabilizer", "jacobian", "bench"):
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="JSON run configuration")
        sp.add_argument("--seed", type=int, help="override the config seed")
        sp.add_argument("--out", help="output directory")
        if name == "run":
            continue
        sp.add_argument("--p", type=int, default=2)
        sp.add_argument("--e", type=int, default=1)
        sp.add_argument("--n", type=int, default=2)
        sp.add_argument("--m", type=int, default=2)
        sp.add_argument("--size", type=int)
        sp.add_argument("--group", choices=["GL", "SL", "Sp", "U", "O"])
        sp.add_argument("--form")
        sp.add_argument("--mode", choices=["exact", "prob", "auto"])
        for key in ("i", "j", "k", "s"):
            sp.add_argument(f"--{key}", type=int)
        if name == "verify":
            sp.add_argument("--claim", help="claim id, e.g. lemma_27")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        if args.config:
            cfg = load_config(args.config)
            if args.command not in ("run",):
                wanted = args.command
                tasks = [t for t in cfg["tasks"]
                         if t == wanted or (wanted == "verify" and t.startswith("verify:"))]
                if not tasks:
                    raise ConfigInvalid(f"config has no {wanted} tasks")
                cfg = dict(cfg, tasks=tasks)
        elif args.command == "run":
            raise ConfigInvalid("run needs --config")
        else:
            if args.command == "verify":
                if not args.claim:
                    raise ConfigInvalid("verify needs --claim or --config")
                task = f"verify:{args.claim}"
            else:
                task = args.command
            cfg = validate_config(_config_from_flags(args, task))
        if args.seed is not None:
            cfg = dict(cfg, seed=args.seed)
            validate_config(cfg)
        runner = Runner(cfg, Path(args.out) if args.out else None)
        return runner.run()
    except ConfigInvalid as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
