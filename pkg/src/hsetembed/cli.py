"""Command line: ``hsetembed <command> [flags]``.

Exit status is 0 for Holds, 1 for Fails, 2 for Inconclusive and 64 for a
usage or input error.  Informational commands (indices, envelope, hset)
exit with 0.  ``--json`` prints a report with sorted keys, so identical
queries produce identical bytes.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from . import embed_rn, envelope, gauge, hset_lab, oracle, seqcalc, trace_gamma, verify
from .dsl import ParseError, format_gauge, format_seq, parse_gauge, parse_seq
from .seqcalc import INF, exponent, format_exponent
from .verdict import Condition, Status, Verdict

EXIT = {Status.HOLDS: 0, Status.FAILS: 1, Status.INCONCLUSIVE: 2}
EXIT_USAGE = 64

COMMANDS = ("indices", "lq", "embed-rn", "trace-exists", "trace-lr", "embed-gamma", "envelope", "oracle", "hset", "verify")


class UsageError(Exception):
    pass


@dataclass
class Query:
    command: str
    params: Dict[str, Any] = field(default_factory=dict)
    json: bool = False


@dataclass
class Report:
    data: Dict[str, Any]

    @property
    def status(self) -> Optional[str]:
        return self.data.get("status")

    @property
    def exit_code(self) -> int:
        s = self.status
        return 0 if s is None else EXIT[Status(s)]

    def to_json(self) -> str:
        return json.dumps(self.data, sort_keys=True, indent=2)

    def to_text(self) -> str:
        d = self.data
        lines = [f"{d['command']}: {d['status'] or 'ok'}"]
        for k, v in d["inputs"].items():
            lines.append(f"  {k} = {v}")
        if d.get("citation"):
            lines.append(f"  citation: {d['citation']}")
        for c in d.get("conditions", []):
            lines.append(f"  [{c['decision']}] {c['name']}: {c['sequence']} in l_{c['exponent']} ({c['reason']})")
        for k, v in d.get("hypotheses", {}).items():
            lines.append(f"  hypothesis {k}: {v}")
        for note in d.get("notes", []):
            lines.append(f"  note: {note}")
        if d.get("numerics"):
            for k, v in d["numerics"].items():
                if k == "tree":
                    continue
                if isinstance(v, list) and len(v) > 8:
                    v = f"[{len(v)} entries]"
                lines.append(f"  {k}: {v}")
        return "\n".join(lines)


def condition_report(c: Condition) -> dict:
    return {
        "name": c.name,
        "sequence": format_seq(c.sequence),
        "exponent": format_exponent(c.exponent),
        "decision": c.decision.verdict.value,
        "reason": c.decision.reason,
    }


def _report(command: str, inputs: dict, v: Optional[Verdict] = None, numerics: Optional[dict] = None, status=None) -> Report:
    data: Dict[str, Any] = {"command": command, "inputs": inputs, "status": None}
    if v is not None:
        data.update(
            status=v.status.value,
            conditions=[condition_report(c) for c in v.conditions],
            hypotheses=v.hypotheses.as_dict(),
            citation=v.citation,
            notes=list(v.notes),
        )
    if status is not None:
        data["status"] = status.value
    if numerics is not None:
        data["numerics"] = numerics
    return Report(data)


def _need(params: dict, *names: str) -> List[Any]:
    missing = [n for n in names if params.get(n) is None]
    if missing:
        raise UsageError("missing required flag(s): " + ", ".join("--" + m for m in missing))
    return [params[n] for n in names]


def _seq(text: str) -> seqcalc.SeqExpr:
    return parse_seq(text)


def _gauge(params: dict) -> gauge.GaugeExpr:
    (text,) = _need(params, "gauge")
    return parse_gauge(text, n=params.get("n") or 1)


def _exp(text) -> seqcalc.Exponent:
    try:
        return exponent(text)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise UsageError(f"bad exponent {text!r}: {exc}") from None


def _fmt(q) -> str:
    return format_exponent(q)


def _rn_space(params: dict, sig: str, p: str, q: str) -> embed_rn.SpaceRn:
    s, pv, qv = _need(params, sig, p, q)
    return embed_rn.SpaceRn(_seq(s), _exp(pv), _exp(qv), params.get("n") or 1)


def _gamma_space(params: dict, sig: str, p: str, q: str, g: gauge.GaugeExpr) -> trace_gamma.SpaceGamma:
    s, pv, qv = _need(params, sig, p, q)
    return trace_gamma.SpaceGamma(_seq(s), _exp(pv), _exp(qv), g)


def _space_inputs(sigma, p, q, prefix="") -> dict:
    return {prefix + "sigma": format_seq(sigma), prefix + "p": _fmt(p), prefix + "q": _fmt(q)}


def run(query: Query) -> Report:
    """Evaluate one query; raises UsageError or ValueError on bad input."""
    c, P = query.command, query.params
    if c == "indices":
        (text,) = _need(P, "sigma")
        s = _seq(text)
        ip, bp = seqcalc.indices(s), seqcalc.boyd_indices(s)
        lo, hi = seqcalc.admissibility_bounds(s)
        num = {
            "lower": seqcalc.format_number(ip.lower),
            "upper": seqcalc.format_number(ip.upper),
            "boyd_lower": seqcalc.format_number(bp.lower),
            "boyd_upper": seqcalc.format_number(bp.upper),
            "ratio_bounds": [lo, hi],
        }
        return _report(c, {"sigma": format_seq(s)}, numerics=num)
    if c == "lq":
        text, qv = _need(P, "sigma", "q")
        s, q = _seq(text), _exp(qv)
        cond = Condition.test("sigma", s, q)
        v = Verdict(Status.of(cond.member), (cond,), citation="l_q membership by tail rules")
        return _report(c, {"sigma": format_seq(s), "q": _fmt(q)}, v)
    if c == "embed-rn":
        src = _rn_space(P, "sigma", "p", "q")
        inputs = _space_inputs(src.sigma, src.p, src.q)
        inputs["n"] = src.n
        target = P.get("target") or "besov"
        inputs["target"] = target
        if target == "besov":
            tgt = _rn_space(P, "tau", "p2", "q2")
            inputs.update(_space_inputs(tgt.sigma, tgt.p, tgt.q, "target_"))
            v = embed_rn.embed_besov_rn(src, tgt)
            alpha = embed_rn.rn_alpha(src, tgt)
            J = P.get("depth") or 256
            num = {
                "J": J,
                "log2_opnorm_exact": oracle.log2_diag_opnorm_exact(alpha, src.q, tgt.q, J),
                "log2_opnorm_search": oracle.log2_diag_opnorm_search(alpha, src.q, tgt.q, J, trials=16, seed=P.get("seed") or 0),
            }
            return _report(c, inputs, v, num)
        if target == "lmax":
            return _report(c, inputs, embed_rn.embed_into_Lmax(src))
        if target == "c":
            return _report(c, inputs, embed_rn.embed_into_C(src))
        raise UsageError(f"unknown target {target!r}")
    if c in ("trace-exists", "trace-lr", "embed-gamma", "envelope"):
        g = _gauge(P)
        if c == "envelope" and P.get("sigma") is None:
            (pv,) = _need(P, "p")
            pair = envelope.growth_envelope_Lp(g, _exp(pv), J=P.get("depth") or 64)
            return _report(c, {"gauge": format_gauge(g), "p": _fmt(_exp(pv)), "n": g.n}, numerics=_envelope_numerics(pair))
        X = _gamma_space(P, "sigma", "p", "q", g)
        inputs = _space_inputs(X.sigma, X.p, X.q)
        inputs.update(gauge=format_gauge(g), n=g.n)
        if c == "trace-exists":
            return _report(c, inputs, trace_gamma.trace_exists(X))
        if c == "trace-lr":
            (r,) = _need(P, "r")
            r = _exp(r)
            if r == INF:
                raise UsageError("--r must be finite; use embed-gamma --target linfty")
            inputs["r"] = _fmt(r)
            return _report(c, inputs, trace_gamma.trace_into_Lr(X, r))
        if c == "envelope":
            pair = envelope.growth_envelope_gamma(X, J=P.get("depth") or 64)
            return _report(c, inputs, numerics=_envelope_numerics(pair))
        target = P.get("target") or "besov"
        inputs["target"] = target
        if target == "besov":
            Y = _gamma_space(P, "tau", "p2", "q2", g)
            inputs.update(_space_inputs(Y.sigma, Y.p, Y.q, "target_"))
            profile = P.get("profile") or "standard"
            inputs["profile"] = profile
            return _report(c, inputs, trace_gamma.embed_gamma_gamma(X, Y, profile))
        if target == "linfty":
            return _report(c, inputs, trace_gamma.embed_into_Linfty(X))
        if target == "lmax":
            return _report(c, inputs, trace_gamma.embed_into_Lmax_gamma(X))
        raise UsageError(f"unknown target {target!r}")
    if c == "oracle":
        text, q1, q2 = _need(P, "sigma", "q", "q2")
        alpha, q1, q2 = _seq(text), _exp(q1), _exp(q2)
        J = P.get("depth") or 256
        seed = P.get("seed") or 0
        v = Verdict(
            Status.of(seqcalc.landau_dual(q1, q2, alpha).member),
            (Condition.test("alpha", alpha, seqcalc.q_star(q1, q2)),),
            citation="diagonal multiplier l_q1 -> l_q2 bounded iff alpha in l_{q*}",
        )
        ls = [oracle.log2_diag_opnorm_exact(alpha, q1, q2, j) for j in (J // 8, J // 4, J // 2, J)]
        num = {
            "J": J,
            "seed": seed,
            "log2_opnorm_exact": ls,
            "log2_opnorm_search": oracle.log2_diag_opnorm_search(alpha, q1, q2, J, trials=64, seed=seed),
        }
        inputs = {"alpha": format_seq(alpha), "q1": _fmt(q1), "q2": _fmt(q2)}
        return _report(c, inputs, v, num)
    if c == "hset":
        g = _gauge(P)
        if g.n != 1:
            raise UsageError("tree construction is one-dimensional (--n 1)")
        J = P.get("depth") or 16
        seed = P.get("seed") or 0
        ng = hset_lab.normalize_gauge(g, J)
        tree = hset_lab.build_cantor(ng)
        chk = hset_lab.empirical_h_check(tree, ng, samples=P.get("samples") or 1000, seed=seed)
        num = {
            "depth": J,
            "seed": seed,
            "distortion": ng.distortion,
            "mass_bound": tree.bound,
            "nodes_per_level": [tree.level_size(j) for j in range(J + 1)],
            "ball_ratio_min": chk.ratio_min,
            "ball_ratio_max": chk.ratio_max,
            "ball_ratio_median": chk.ratio_median,
            "doubling_max": chk.doubling_max,
            "tree": hset_lab.dumps(tree),
        }
        return _report(c, {"gauge": format_gauge(g), "n": 1}, numerics=num)
    if c == "verify":
        (case,) = _need(P, "case")
        seed = P.get("seed") or 0
        res = verify.run_suite(case, seed=seed, n=P.get("n"))
        st = Status.HOLDS if res.ok else Status.FAILS
        inputs = {"case": case, "seed": seed, "n": res.total}
        rep = _report(c, inputs, numerics=res.summary(), status=st)
        rep.data["citation"] = f"consistency suite {case}"
        return rep
    raise UsageError(f"unknown command {c!r}")


def _envelope_numerics(pair: envelope.EnvelopePair) -> dict:
    return {
        "mode": pair.mode,
        "index_u": None if pair.index_u is None else format_exponent(pair.index_u),
        "closed_form": None if pair.closed_form is None else {k: _jsonable(v) for k, v in pair.closed_form.items()},
        "grid": [[float(t), float(v)] for t, v in zip(pair.t, pair.values)],
    }


def _jsonable(v):
    if isinstance(v, (int, str)) or v is None:
        return v
    try:
        return seqcalc.format_number(v)
    except (TypeError, ValueError):
        return str(v)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="hsetembed", description="Embedding verdicts for Besov spaces on R^n and on h-sets.")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)
    flags = {
        "--sigma": dict(help="source smoothness sequence, e.g. '2^(0.5j)*(1+j)^-1'"),
        "--tau": dict(help="target smoothness sequence"),
        "--gauge": dict(help="gauge, e.g. 'r^0.63*(1+L)^-1'"),
        "--p": dict(), "--q": dict(), "--p2": dict(), "--q2": dict(), "--r": dict(),
        "--n": dict(type=int, help="ambient dimension (verify: number of cases)"),
        "--seed": dict(type=int), "--depth": dict(type=int),
    }
    specs = {
        "indices": ["--sigma"],
        "lq": ["--sigma", "--q"],
        "embed-rn": ["--sigma", "--p", "--q", "--tau", "--p2", "--q2", "--n", "--seed", "--depth"],
        "trace-exists": ["--sigma", "--gauge", "--p", "--q", "--n"],
        "trace-lr": ["--sigma", "--gauge", "--p", "--q", "--r", "--n"],
        "embed-gamma": ["--sigma", "--tau", "--gauge", "--p", "--q", "--p2", "--q2", "--n"],
        "envelope": ["--sigma", "--gauge", "--p", "--q", "--n", "--depth"],
        "oracle": ["--sigma", "--q", "--q2", "--seed", "--depth"],
        "hset": ["--gauge", "--depth", "--seed", "--n"],
        "verify": ["--n", "--seed"],
    }
    for name in COMMANDS:
        sp = sub.add_parser(name)
        for f in specs[name]:
            sp.add_argument(f, **flags[f])
        sp.add_argument("--json", action="store_true", help="print a JSON report")
        if name in ("embed-rn", "embed-gamma"):
            choices = ["besov", "lmax", "c"] if name == "embed-rn" else ["besov", "linfty", "lmax"]
            sp.add_argument("--target", choices=choices, default="besov")
        if name == "embed-gamma":
            sp.add_argument("--profile", choices=["standard", "weak"], default="standard")
        if name == "hset":
            sp.add_argument("--samples", type=int, default=1000)
            sp.add_argument("--tree-out", help="write the tree in text format to this file")
        if name == "verify":
            sp.add_argument("--case", required=True, choices=sorted(verify.SUITES))
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    ap = build_parser()
    if not argv:
        ap.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        ns = ap.parse_args(argv)
        if ns.command is None:
            raise UsageError("missing command")
        params = {k: v for k, v in vars(ns).items() if k not in ("command", "json", "tree_out")}
        rep = run(Query(ns.command, params, ns.json))
    except ParseError as exc:
        print(f"hsetembed: parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, ValueError) as exc:
        print(f"hsetembed: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if getattr(ns, "tree_out", None):
        with open(ns.tree_out, "w") as fh:
            fh.write(rep.data["numerics"]["tree"])
    print(rep.to_json() if ns.json else rep.to_text())
    return rep.exit_code


if __name__ == "__main__":
    sys.exit(main())
