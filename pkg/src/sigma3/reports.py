"""Invariant reports with deterministic JSON rendering.

A report bundles the invariants of one group: logarithmic order, generator
and relation rank, nuclear rank, commutator quotient type, class, derived
length, the kernel quartet with its rank and type layers, and, on request,
descendant counts per step size. Key order is fixed by construction, so
identical inputs and flags produce identical JSON; anything wall-clock
dependent lives in the provenance block and nowhere else.
"""

from __future__ import annotations

import importlib.metadata
import json
import time

from .artin import artin_pattern, named_type, sigma_schur_test
from .genealogy import fingerprint, immediate_descendants
from .presentations import PcPresentation
from .quotients import p_cover
from .structure import abelian_quotient_type, classify

__all__ = ["build_report", "render_report", "tool_version"]


def tool_version() -> str:
    try:
        return importlib.metadata.version("sigma3")
    except importlib.metadata.PackageNotFoundError:
        return "unpackaged"


def _descendant_block(pc: PcPresentation, auts, s: int) -> dict:
    rep = immediate_descendants(pc, auts, s, lift_auts=False, with_nu=True)
    children = []
    for i, c in enumerate(rep.children, 1):
        fp = fingerprint(c.pc, nu=c.nu)
        children.append({
            "index": i,
            "orbit_size": c.orbit_size,
            "nu": c.nu,
            "lo": fp.lo,
            "ab_logs": list(fp.ab),
            "kappa": fp.kappa,
            "alpha1": list(fp.alpha1),
        })
    return {"step": s, "N": rep.total, "C": rep.capable,
            "allowable": rep.allowable, "children": children}


def build_report(pc: PcPresentation, auts=None, *, subject: str = "",
                 depth: int = 1, steps: tuple = (), want_sigma: bool = True,
                 seed: int | None = None) -> dict:
    """Full invariant report as a JSON-ready dict with stable key order.

    depth 2 adds the second-order type bundle; steps lists the step sizes
    whose descendant counts (N classes, C capable) should be included, which
    requires auts. The kernel quartet block is None when the commutator
    quotient is not of the bicyclic shape that defines one.
    """
    t0 = time.perf_counter()
    cls = classify(pc)
    cov = p_cover(pc)
    ab = abelian_quotient_type(pc)
    report = {
        "subject": subject,
        "lo": pc.n,
        "order": f"3^{pc.n}",
        "d": sum(1 for w in pc.weights if w == 1),
        "r": cov.multiplicator_rank,
        "nu": cov.nuclear_rank,
        "terminal": cov.nuclear_rank == 0,
        "ab": ab.render(),
        "ab_logs": list(ab.logs),
        "p_class": cls.pclass,
        "cl": cls.cl,
        "sl": cls.sl,
        "bcf": cls.bcf,
    }
    try:
        pat = artin_pattern(pc, depth, auts=auts, want_sigma=want_sigma)
    except ValueError:
        pat = None
    if pat is None:
        report["kappa"] = None
        if want_sigma:
            res = sigma_schur_test(pc, auts=auts)
            report["sigma"], report["schur"] = res.sigma, res.schur
    else:
        report["kappa"] = {
            "raw": pat.kappa_raw.render(),
            "canonical": pat.kappa.render(),
            "name": named_type(pat.kappa),
        }
        report["rho"] = list(pat.rho)
        report["alpha1"] = [t.render() for t in pat.alpha1]
        if pat.alpha2 is not None:
            report["alpha2"] = pat.alpha2.render()
        report["sigma"] = pat.sigma
        report["schur"] = pat.schur
    if steps:
        if auts is None:
            raise ValueError("descendant counts need an automorphism group")
        report["descendants"] = {
            str(s): _descendant_block(pc, auts, s) for s in sorted(steps)}
    report["provenance"] = {
        "tool": "sigma3",
        "version": tool_version(),
        "seed": seed,
        "elapsed_s": round(time.perf_counter() - t0, 3),
    }
    return report


def render_report(report: dict) -> str:
    """Human-readable one-block text form of a report dict."""
    lines = [f"subject   {report['subject']}"]
    lines.append(f"order     {report['order']}  (lo {report['lo']})")
    lines.append(f"ranks     d {report['d']}  r {report['r']}  nu {report['nu']}"
                 + ("  terminal" if report["terminal"] else ""))
    lines.append(f"ab        {report['ab']}")
    lines.append(f"class     cl {report['cl']}  p-class {report['p_class']}"
                 f"  sl {report['sl']}  {'bcf' if report['bcf'] else 'cf'}")
    kap = report.get("kappa")
    if kap:
        name = f"  name {kap['name']}" if kap.get("name") else ""
        lines.append(f"kappa     {kap['canonical']}  raw {kap['raw']}{name}")
        rho = ",".join(str(v) for v in report["rho"][:3])
        lines.append(f"rho       ({rho};{report['rho'][3]})")
        lines.append(f"alpha1    [{','.join(report['alpha1'][:3])};{report['alpha1'][3]}]")
        if "alpha2" in report:
            lines.append(f"alpha2    {report['alpha2']}")
    for key in ("sigma", "schur"):
        if report.get(key) is not None:
            lines.append(f"{key:<9} {'yes' if report[key] else 'no'}")
    for s, block in report.get("descendants", {}).items():
        lines.append(f"step {s}    N {block['N']}  C {block['C']}"
                     f"  allowable {block['allowable']}")
        for c in block["children"]:
            kappa = c["kappa"] or "-"
            lines.append(f"  #{s};{c['index']:<3} orbit {c['orbit_size']:<4}"
                         f" nu {c['nu']}  lo {c['lo']}"
                         f"  ab {''.join(str(v) for v in c['ab_logs'])}"
                         f"  kappa {kappa}")
    return "\n".join(lines)


def report_json(report: dict) -> str:
    return json.dumps(report, indent=2, ensure_ascii=False)
