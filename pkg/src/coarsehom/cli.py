"""Batch front end: parse workspace documents, dispatch to the
computational modules, and emit deterministic reports.

One self-describing JSON schema (versioned, "schema": 1) covers all
entities; see the README for the full format.  Exit codes: 0 success,
2 validation failure, 3 out-of-scope request, 4 internal invariant
breach.  Reports are byte-identical across runs for identical input,
seed and format, regardless of the thread count.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from random import Random

from .errors import InternalCheckError, OutOfScopeError, ValidationError
from . import groups as G
from . import spaces as SP
from . import spans as SPN
from . import tape as TP
from . import axioms as AX
from . import mackey as MK
from .homology import SpaceComplex, homology, induced_map
from . import randgen as RG


@dataclass
class Workspace:
    groups: dict = field(default_factory=dict)
    gsets: dict = field(default_factory=dict)
    spaces: dict = field(default_factory=dict)
    maps: dict = field(default_factory=dict)
    spans: dict = field(default_factory=dict)
    squares: dict = field(default_factory=dict)


class _Errors:
    def __init__(self):
        self.items = []

    def add(self, pointer, message):
        self.items.append(f"{pointer}: {message}")

    def raise_if_any(self):
        if self.items:
            raise ValidationError("; ".join(self.items))


def parse_workspace(doc):
    """Resolve and validate a workspace document.  Raises ValidationError
    carrying every collected problem with its JSON-pointer location."""
    errs = _Errors()
    if not isinstance(doc, dict):
        raise ValidationError("/: document must be a JSON object")
    if doc.get("schema") != 1:
        errs.add("/schema", "missing or unsupported schema version (expected 1)")
    ws = Workspace()

    for name, entry in (doc.get("groups") or {}).items():
        ptr = f"/groups/{name}"
        try:
            if "preset" in entry:
                preset = entry["preset"]
                if preset not in G.GROUP_PRESETS:
                    errs.add(ptr + "/preset", f"unknown preset {preset!r}")
                    continue
                ws.groups[name] = G.GROUP_PRESETS[preset]()
            elif "table" in entry:
                ws.groups[name] = G.Group(tuple(tuple(r) for r in entry["table"]), name=name)
            else:
                errs.add(ptr, "need 'preset' or 'table'")
        except (ValidationError, TypeError, KeyError) as e:
            errs.add(ptr, str(e))

    for name, entry in (doc.get("gsets") or {}).items():
        ptr = f"/gsets/{name}"
        try:
            grp = ws.groups.get(entry.get("group"))
            if grp is None:
                errs.add(ptr + "/group", f"unknown group {entry.get('group')!r}")
                continue
            if "trivial" in entry:
                ws.gsets[name] = G.trivial_gset(grp, int(entry["trivial"]))
            elif "cosets_of" in entry:
                ws.gsets[name] = G.coset_gset(grp, frozenset(entry["cosets_of"]))
            elif "action" in entry:
                act = tuple(tuple(r) for r in entry["action"])
                size = len(act[0]) if act else 0
                ws.gsets[name] = G.GSet(grp, size, act)
            else:
                errs.add(ptr, "need 'trivial', 'cosets_of' or 'action'")
        except (ValidationError, TypeError, ValueError, KeyError) as e:
            errs.add(ptr, str(e))

    for name, entry in (doc.get("spaces") or {}).items():
        ptr = f"/spaces/{name}"
        try:
            if "tape" in entry:
                t = entry["tape"]
                fiber = ws.spaces.get(t.get("fiber"))
                if fiber is None or not isinstance(fiber, SP.BornCoarseSpace):
                    errs.add(ptr + "/tape/fiber", "unknown or non-finite fiber space")
                    continue
                ws.spaces[name] = TP.TapeSpace(
                    fiber,
                    t.get("coarse", "discrete"),
                    t.get("bornology", "finite_window"),
                    name=name,
                )
                continue
            gs = ws.gsets.get(entry.get("gset"))
            if gs is None:
                errs.add(ptr + "/gset", f"unknown gset {entry.get('gset')!r}")
                continue
            born = (entry.get("bornology") or {}).get("preset", "full")
            if born != "full":
                errs.add(ptr + "/bornology", "finite carriers force the full power set")
                continue
            coarse = entry.get("coarse") or {"preset": "minimal"}
            if coarse.get("preset") == "minimal":
                ws.spaces[name] = SP.minimal_space(gs, name=name)
            elif coarse.get("preset") == "maximal":
                ws.spaces[name] = SP.maximal_space(gs, name=name)
            elif "generators" in coarse:
                gens = [
                    frozenset((int(a), int(b)) for a, b in ent)
                    for ent in coarse["generators"]
                ]
                sym = [U | frozenset((b, a) for (a, b) in U) for U in gens]
                ws.spaces[name] = SP.make_space(gs, sym, name=name)
            else:
                errs.add(ptr + "/coarse", "need a preset or generators")
        except (ValidationError, TypeError, ValueError, KeyError) as e:
            errs.add(ptr, str(e))

    for name, entry in (doc.get("maps") or {}).items():
        ptr = f"/maps/{name}"
        try:
            src = ws.spaces.get(entry.get("src"))
            dst = ws.spaces.get(entry.get("dst"))
            if src is None or dst is None:
                errs.add(ptr, "unknown src or dst space")
                continue
            if isinstance(src, TP.TapeSpace):
                kind = entry.get("kind")
                fm = tuple(entry.get("fiber_images", ()))
                ws.maps[name] = TP.TapeMap(kind, src, dst, fm, int(entry.get("shift", 0)))
            else:
                images = tuple(entry["images"])
                G.require_equivariant(images, src.carrier, dst.carrier, f"map {name}")
                ws.maps[name] = ("finite", entry["src"], entry["dst"], images)
        except (ValidationError, TypeError, ValueError, KeyError) as e:
            errs.add(ptr, str(e))

    for name, entry in (doc.get("spans") or {}).items():
        ptr = f"/spans/{name}"
        try:
            srcn, apexn, dstn = entry["src"], entry["apex"], entry["dst"]
            src, apex, dst = (ws.spaces.get(k) for k in (srcn, apexn, dstn))
            left = ws.maps.get(entry["left"])
            right = ws.maps.get(entry["right"])
            if None in (src, apex, dst) or left is None or right is None:
                errs.add(ptr, "dangling reference")
                continue
            if isinstance(apex, TP.TapeSpace):
                ws.spans[name] = SPN.make_span(src, apex, dst, left, right, validate=True)
            else:
                if left[1] != apexn or left[2] != srcn:
                    errs.add(ptr + "/left", "left map must run apex -> src")
                    continue
                if right[1] != apexn or right[2] != dstn:
                    errs.add(ptr + "/right", "right map must run apex -> dst")
                    continue
                ws.spans[name] = SPN.make_span(src, apex, dst, left[3], right[3], validate=True)
        except (ValidationError, TypeError, ValueError, KeyError) as e:
            errs.add(ptr, str(e))

    for name, entry in (doc.get("squares") or {}).items():
        ptr = f"/squares/{name}"
        try:
            sp = [ws.spaces.get(entry.get(k)) for k in ("W", "U", "V", "Z")]
            mp = [ws.maps.get(entry.get(k)) for k in ("f", "w", "g", "u")]
            if None in sp or None in mp:
                errs.add(ptr, "dangling reference")
                continue
            ws.squares[name] = SPN.AdmissibleSquareCandidate(
                sp[0], sp[1], sp[2], sp[3], mp[0][3], mp[1][3], mp[2][3], mp[3][3]
            )
        except (ValidationError, TypeError, ValueError, KeyError) as e:
            errs.add(ptr, str(e))

    errs.raise_if_any()
    return ws


def load_workspace(path):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as e:
        raise ValidationError(f"cannot read {path}: {e}")
    except json.JSONDecodeError as e:
        raise ValidationError(f"{path}: JSON syntax error: {e}")
    return parse_workspace(doc)


def _pick(ws_dict, name, kind):
    if name is not None:
        if name not in ws_dict:
            raise ValidationError(f"no {kind} named {name!r} in the workspace")
        return name, ws_dict[name]
    if len(ws_dict) != 1:
        raise ValidationError(f"workspace has {len(ws_dict)} {kind}s; pass --name")
    return next(iter(ws_dict.items()))


# -- report emission ---------------------------------------------------------


def emit(report, fmt, out):
    if fmt == "json":
        out.write(json.dumps(report, sort_keys=True, indent=2))
        out.write("\n")
        return
    rows = report.get("rows") or []
    header = report.get("columns") or []
    if fmt == "csv":
        out.write(",".join(str(h) for h in header) + "\n")
        for r in rows:
            out.write(",".join(str(x) for x in r) + "\n")
        return
    widths = [len(str(h)) for h in header]
    for r in rows:
        for i, x in enumerate(r):
            widths[i] = max(widths[i], len(str(x)))
    if "title" in report:
        out.write(report["title"] + "\n")
    out.write("  ".join(str(h).ljust(w) for h, w in zip(header, widths)).rstrip() + "\n")
    for r in rows:
        out.write("  ".join(str(x).ljust(w) for x, w in zip(r, widths)).rstrip() + "\n")
    for note in report.get("notes", ()):
        out.write(note + "\n")


# -- subcommands -------------------------------------------------------------


def cmd_homology(args, out):
    ws = load_workspace(args.workspace)
    name, X = _pick(ws.spaces, args.name, "space")
    if isinstance(X, TP.TapeSpace):
        raise OutOfScopeError("homology of tape spaces is out of scope")
    H = homology(X, args.max_degree)
    rows = [
        [n, rank, ".".join(str(d) for d in tors) or "-"]
        for n, (rank, tors) in enumerate(H.degrees)
    ]
    emit(
        {
            "title": f"homology of {name}",
            "columns": ["degree", "rank", "torsion"],
            "rows": rows,
            "space": name,
            "degrees": [
                {"degree": n, "rank": r, "torsion": list(t)}
                for n, (r, t) in enumerate(H.degrees)
            ],
        },
        args.format,
        out,
    )
    return 0


def cmd_induced_map(args, out):
    ws = load_workspace(args.workspace)
    name, span = _pick(ws.spans, args.name, "span")
    if not span.is_finite():
        raise OutOfScopeError("induced maps need finite carriers")
    homs = induced_map(span, args.max_degree)
    rows = []
    mats = []
    for n, h in enumerate(homs):
        rows.append([n, h.src.describe(), h.dst.describe(), json.dumps(h.matrix)])
        mats.append({"degree": n, "matrix": h.matrix, "src": h.src.describe(), "dst": h.dst.describe()})
    emit(
        {
            "title": f"induced map of span {name}",
            "columns": ["degree", "source", "target", "matrix"],
            "rows": rows,
            "span": name,
            "maps": mats,
        },
        args.format,
        out,
    )
    return 0


def cmd_check_covering(args, out):
    ws = load_workspace(args.workspace)
    name, mp = _pick(ws.maps, args.name, "map")
    if isinstance(mp, TP.TapeMap):
        ok, diag = SPN.is_bounded_covering(mp, mp.src, mp.dst)
        W_name = mp.src.name or "(tape)"
        Z_name = getattr(mp.dst, "name", "") or "(target)"
    else:
        _, srcn, dstn, images = mp
        ok, diag = SPN.is_bounded_covering(images, ws.spaces[srcn], ws.spaces[dstn])
        W_name, Z_name = srcn, dstn
    emit(
        {
            "title": f"bounded covering check: {name}",
            "columns": ["map", "total space", "base", "verdict", "diagnostic"],
            "rows": [[name, W_name, Z_name, "PASS" if ok else "FAIL", diag]],
            "map": name,
            "ok": ok,
            "diagnostic": diag,
        },
        args.format,
        out,
    )
    return 0


def cmd_check_square(args, out):
    ws = load_workspace(args.workspace)
    name, sq = _pick(ws.squares, args.name, "square")
    ok, diag = SPN.is_admissible(sq)
    emit(
        {
            "title": f"admissible square check: {name}",
            "columns": ["square", "verdict", "diagnostic"],
            "rows": [[name, "PASS" if ok else "FAIL", diag]],
            "square": name,
            "ok": ok,
            "diagnostic": diag,
        },
        args.format,
        out,
    )
    return 0


def cmd_compose(args, out):
    ws = load_workspace(args.workspace)
    if args.left not in ws.spans or args.right not in ws.spans:
        raise ValidationError("compose needs --left and --right span names from the workspace")
    s1, s2 = ws.spans[args.left], ws.spans[args.right]
    comp = SPN.compose(s1, s2)
    comps = comp.apex.components()
    emit(
        {
            "title": f"composite {args.right} o {args.left}",
            "columns": ["apex points", "apex components", "left leg", "right leg"],
            "rows": [
                [
                    comp.apex.size,
                    len(comps),
                    json.dumps(list(comp.left)),
                    json.dumps(list(comp.right)),
                ]
            ],
            "apex_size": comp.apex.size,
            "apex_component_sizes": sorted(len(c) for c in comps),
            "left": list(comp.left),
            "right": list(comp.right),
        },
        args.format,
        out,
    )
    return 0


def cmd_check_axioms(args, out):
    ws = load_workspace(args.workspace)
    name, X = _pick(ws.spaces, args.name, "space")
    if isinstance(X, TP.TapeSpace):
        if not args.witness:
            raise OutOfScopeError(
                "tape spaces support only the flasqueness witness check (pass --witness)"
            )
        wmap = ws.maps.get(args.witness)
        if not isinstance(wmap, TP.TapeMap):
            raise ValidationError("witness must name a tape map")
        probes = (0, 4, getattr(args, "window", 16))
        ok, diag = TP.check_flasque_witness(X, wmap, probe_windows=probes)
        emit(
            {
                "title": f"flasqueness witness on {name}",
                "columns": ["check", "verdict", "detail"],
                "rows": [["flasque-witness", "PASS" if ok else "FAIL", diag]],
                "ok": ok,
            },
            args.format,
            out,
        )
        return 0

    N = args.max_degree
    checks = []

    def run_all():
        cx = SpaceComplex(X, N)
        checks.append(("d.d = 0", cx.check_dd_zero(), ""))
        ok, v = AX.check_coarse_invariance(X, N)
        checks.append(("coarse invariance", ok, f"degrees {v}"))
        ok, k = AX.check_u_continuity(X, N)
        checks.append(("u-continuity", ok, f"stabilizes at generator {k}"))
        for sz in (2, 3):
            I = G.trivial_gset(X.group, sz)
            checks.append((f"weak transfers |I|={sz}", AX.check_weak_transfers(X, I, N), ""))
        # alternate G-orbits of components into Z and its complement; both
        # sides are invariant and coarsely closed, forming a valid pair
        comps = X.components()
        seen = set()
        orbit_blocks = []
        for ci, comp in enumerate(comps):
            if ci in seen:
                continue
            labels = {X.coarse.block[X.carrier.act(g, comp[0])] for g in X.group.elements()}
            seen |= labels
            orbit_blocks.append(sorted(p for l in labels for p in comps[l]))
        Zpart = sorted(p for i, blk in enumerate(orbit_blocks) if i % 2 == 0 for p in blk)
        Ypart = sorted(set(range(X.size)) - set(Zpart))
        if X.size:
            ok, v = AX.check_excision(X, Zpart, [Ypart], N)
            checks.append(("excision (component pair)", ok, f"degrees {v}"))
        okf, diagf = TP.check_flasque_witness(X, None)
        checks.append(("flasque via identity", not okf if X.size else okf, diagf))

    run_all()
    rows = [[c, "PASS" if ok else "FAIL", d] for (c, ok, d) in checks]
    emit(
        {
            "title": f"axiom checks on {name} (degrees 0..{N})",
            "columns": ["check", "verdict", "detail"],
            "rows": rows,
            "ok": all(ok for (_c, ok, _d) in checks),
        },
        args.format,
        out,
    )
    return 0


def _family_by_name(group, label):
    """Resolve a family: the names all/sol/triv, or a path to a JSON
    file holding a list of generating subgroups (element lists), which
    is closed under conjugation and subgroups."""
    if label == "all":
        return G.family_all(group)
    if label == "sol":
        return G.family_solvable(group)
    if label == "triv":
        return G.family_trivial(group)
    import os

    if os.path.exists(label):
        try:
            with open(label) as fh:
                seeds = json.load(fh)
        except (OSError, json.JSONDecodeError) as e:
            raise ValidationError(f"family file {label}: {e}")
        if not isinstance(seeds, list):
            raise ValidationError(f"family file {label}: expected a list of subgroup element lists")
        return G.family_generated_by(
            group, [frozenset(s) for s in seeds], name=os.path.basename(label)
        )
    raise ValidationError(f"unknown family {label!r} (use all, sol, triv, or a file path)")


def cmd_mackey_table(args, out):
    ws = load_workspace(args.workspace)
    name, grp = _pick(ws.groups, args.group, "group")
    family = _family_by_name(grp, args.family)
    reps = [H for H in G.subgroup_class_representatives(grp) if H in family]
    ctx = MK.EMContext(args.max_degree)
    rows = []
    values = {}
    for H in reps:
        S = G.coset_gset(grp, H)
        data = [
            ctx.complex_of(S).homology_data(n).group.describe()
            for n in range(args.max_degree + 1)
        ]
        label = "G/" + MK.subgroup_label(grp, H)
        values[label] = data
        rows.append([label, len(H), "; ".join(f"H_{n}={d}" for n, d in enumerate(data))])
    matrices = []
    for H in reps:
        for K in reps:
            if len(H) <= len(K) and H <= K:
                res = MK.EM_morphism(
                    MK.GFinSpan(
                        G.coset_gset(grp, H),
                        G.coset_gset(grp, K),
                        G.coset_gset(grp, H),
                        tuple(range(grp.order // len(H))),
                        MK.coset_projection(grp, H, K),
                    ),
                    0,
                    ctx,
                )[0]
                tr = MK.EM_morphism(
                    MK.GFinSpan(
                        G.coset_gset(grp, K),
                        G.coset_gset(grp, H),
                        G.coset_gset(grp, H),
                        MK.coset_projection(grp, H, K),
                        tuple(range(grp.order // len(H))),
                    ),
                    0,
                    ctx,
                )[0]
                matrices.append(
                    {
                        "pair": [MK.subgroup_label(grp, H), MK.subgroup_label(grp, K)],
                        "restriction_deg0": res.matrix,
                        "transfer_deg0": tr.matrix,
                    }
                )
    emit(
        {
            "title": f"Mackey table for {name} (family {family.name})",
            "columns": ["object", "|H|", "EM values"],
            "rows": rows,
            "values": values,
            "matrices": matrices,
        },
        args.format,
        out,
    )
    return 0


def cmd_assembly(args, out):
    ws = load_workspace(args.workspace)
    name, grp = _pick(ws.groups, args.group, "group")
    family = _family_by_name(grp, args.family)
    r = MK.assembly(grp, family, args.degree)
    emit(
        {
            "title": r.verdict_line(),
            "columns": ["group", "family", "degree", "colimit", "target", "injective", "split", "label"],
            "rows": [
                [
                    name,
                    family.name,
                    args.degree,
                    r.colimit.describe(),
                    r.target.describe(),
                    r.injective,
                    r.split,
                    r.label,
                ]
            ],
            "group": name,
            "family": family.name,
            "degree": args.degree,
            "objects": r.object_labels,
            "colimit": {"rank": r.colimit.rank, "torsion": list(r.colimit.torsion)},
            "target": {"rank": r.target.rank, "torsion": list(r.target.torsion)},
            "assembly_matrix": r.assembly.matrix,
            "injective": r.injective,
            "split": r.split,
            "label": r.label,
        },
        args.format,
        out,
    )
    return 0


# -- fuzzing harness ---------------------------------------------------------


def _fuzz_case_spans(case):
    s1, s2, s3 = case
    left = SPN.compose(SPN.compose(s1, s2), s3)
    right = SPN.compose(s1, SPN.compose(s2, s3))
    ok = SPN.spans_isomorphic(left, right)
    ok = ok and SPN.spans_isomorphic(SPN.compose(SPN.identity_span(s1.src), s1), s1)
    ok = ok and SPN.spans_isomorphic(SPN.compose(s1, SPN.identity_span(s1.dst)), s1)
    return ok


def _fuzz_case_chains(case):
    from .homology import (
        pullback_chain_cols,
        pushforward_chain_cols,
        scols_eq,
        scols_mul,
    )

    s1, s2 = case
    P, u, h = SPN.pullback(s1.right, s1.apex, s2.left, s2.apex, s1.dst)
    N = 2
    cxP = SpaceComplex(P, N)
    cxW = SpaceComplex(s1.apex, N)
    cxV = SpaceComplex(s2.apex, N)
    cxX = SpaceComplex(s1.src, N)
    cxY = SpaceComplex(s1.dst, N)
    wu = tuple(s1.left[u[i]] for i in range(P.size))
    for n in range(N + 1):
        lhs = scols_mul(
            pullback_chain_cols(u, P, s1.apex, cxP, cxW, n),
            pullback_chain_cols(s1.left, s1.apex, s1.src, cxW, cxX, n),
        )
        rhs = pullback_chain_cols(wu, P, s1.src, cxP, cxX, n)
        if not scols_eq(lhs, rhs):
            return False
        lhs2 = scols_mul(
            pushforward_chain_cols(h, P, s2.apex, cxP, cxV, n),
            pullback_chain_cols(u, P, s1.apex, cxP, cxW, n),
        )
        rhs2 = scols_mul(
            pullback_chain_cols(s2.left, s2.apex, s1.dst, cxV, cxY, n),
            pushforward_chain_cols(s1.right, s1.apex, s1.dst, cxW, cxY, n),
        )
        if not scols_eq(lhs2, rhs2):
            return False
    return True


def _fuzz_case_axioms(case):
    X, Z, Ys, I_size = case
    ok, _ = AX.check_coarse_invariance(X, 2)
    if not ok:
        return False
    ok, _ = AX.check_excision(X, Z, Ys, 2)
    if not ok:
        return False
    return AX.check_weak_transfers(X, G.trivial_gset(X.group, I_size), 2)


def _fuzz_case_mackey(case):
    s1, s2, ctx = case
    comp = MK.compose_gfin_spans(s1, s2)
    lhs = ctx.em_morphism(comp)
    h1 = ctx.em_morphism(s1)
    h2 = ctx.em_morphism(s2)
    for n in range(len(lhs)):
        if not MK.hom_equal(lhs[n], h1[n].compose(h2[n])):
            return False
    return True


def cmd_fuzz(args, out):
    rng = Random(args.seed)
    cfg = RG.FuzzConfig(max_points=6, max_component=3, max_copies=2)
    suites = ["spans", "chains", "axioms", "mackey"] if args.suite == "all" else [args.suite]
    rows = []
    for suite in suites:
        cases = []
        for _ in range(args.cases):
            if suite == "spans":
                s1, s2 = RG.random_composable_spans(rng, cfg)
                s3 = RG.random_span(rng, s2.dst, cfg)
                cases.append((s1, s2, s3))
            elif suite == "chains":
                cases.append(RG.random_composable_spans(rng, cfg))
            elif suite == "axioms":
                X = RG.random_space(rng, cfg)
                Z, Ys = RG.random_complementary_pair(rng, X)
                cases.append((X, Z, Ys, 1 + rng.randrange(3)))
            elif suite == "mackey":
                grp = RG.random_group(rng)
                ctx = MK.EMContext(1)
                src = RG.random_gset(rng, grp, cfg.max_points)
                s1 = RG.random_gfin_span(rng, src, cfg)
                s2 = RG.random_gfin_span(rng, s1.dst, cfg)
                cases.append((s1, s2, ctx))
            else:
                raise ValidationError(f"unknown suite {suite!r}")
        runner = {
            "spans": _fuzz_case_spans,
            "chains": _fuzz_case_chains,
            "axioms": _fuzz_case_axioms,
            "mackey": _fuzz_case_mackey,
        }[suite]
        if args.threads > 1:
            with ThreadPoolExecutor(max_workers=args.threads) as pool:
                results = list(pool.map(runner, cases))
        else:
            results = [runner(c) for c in cases]
        passed = sum(1 for r in results if r)
        rows.append([suite, args.cases, passed, args.cases - passed])
    emit(
        {
            "title": f"fuzz seed={args.seed}",
            "columns": ["suite", "cases", "pass", "fail"],
            "rows": rows,
            "seed": args.seed,
            "results": [
                {"suite": r[0], "cases": r[1], "pass": r[2], "fail": r[3]} for r in rows
            ],
        },
        args.format,
        out,
    )
    return 0 if all(r[3] == 0 for r in rows) else 4


TASK_OPS = {}


def _task_op(name):
    def reg(fn):
        TASK_OPS[name] = fn
        return fn

    return reg


def cmd_run(args, out):
    """Execute the workspace's task list in declaration order.

    Tasks may be evaluated in parallel (--threads), but reports are
    emitted in declaration order, so output is thread-count independent.
    """
    try:
        with open(args.workspace) as fh:
            doc = json.load(fh)
    except OSError as e:
        raise ValidationError(f"cannot read {args.workspace}: {e}")
    except json.JSONDecodeError as e:
        raise ValidationError(f"{args.workspace}: JSON syntax error: {e}")
    tasks = doc.get("tasks") or []
    parse_workspace(doc)  # every entity passes its validator before any task runs

    parser = build_parser()

    def eval_task(idx_task):
        idx, task = idx_task
        op = task.get("op")
        argv = [op, args.workspace]
        for key, val in sorted(task.items()):
            if key == "op":
                continue
            flag = "--" + key.replace("_", "-")
            argv.extend([flag, str(val)])
        if op == "fuzz":
            argv = [op] + argv[2:]
        argv.extend(["--format", args.format])
        sub_args = parser.parse_args(argv)
        buf = _StringBuffer()
        rc = sub_args.fn(sub_args, buf)
        return idx, rc, buf.value()

    indexed = list(enumerate(tasks))
    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            results = sorted(pool.map(eval_task, indexed))
    else:
        results = [eval_task(it) for it in indexed]
    worst = 0
    for idx, rc, text in results:
        out.write(f"== task {idx}: {tasks[idx].get('op')} ==\n")
        out.write(text)
        worst = max(worst, rc)
    return worst


class _StringBuffer:
    def __init__(self):
        self.parts = []

    def write(self, s):
        self.parts.append(s)

    def value(self):
        return "".join(self.parts)


def build_parser():
    p = argparse.ArgumentParser(
        prog="coarsehom",
        description="Exact calculus of coarse-geometric transfers: coverings, spans, homology, Mackey layer.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["table", "json", "csv"], default="table")
    common.add_argument("--threads", type=int, default=1)
    sub = p.add_subparsers(dest="command", required=True)

    def ws_cmd(name, fn, **extra):
        q = sub.add_parser(name, parents=[common])
        q.add_argument("workspace")
        for flag, kw in extra.items():
            q.add_argument(flag, **kw)
        q.set_defaults(fn=fn)
        return q

    ws_cmd(
        "homology",
        cmd_homology,
        **{"--name": dict(default=None), "--max-degree": dict(type=int, default=3)},
    )
    ws_cmd(
        "induced-map",
        cmd_induced_map,
        **{"--name": dict(default=None), "--max-degree": dict(type=int, default=3)},
    )
    ws_cmd("check-covering", cmd_check_covering, **{"--name": dict(default=None)})
    ws_cmd("check-square", cmd_check_square, **{"--name": dict(default=None)})
    ws_cmd(
        "compose",
        cmd_compose,
        **{"--left": dict(required=True), "--right": dict(required=True)},
    )
    ws_cmd(
        "check-axioms",
        cmd_check_axioms,
        **{
            "--name": dict(default=None),
            "--max-degree": dict(type=int, default=2),
            "--witness": dict(default=None),
            "--window": dict(type=int, default=16),
        },
    )
    ws_cmd(
        "mackey-table",
        cmd_mackey_table,
        **{
            "--group": dict(default=None),
            "--family": dict(default="all"),
            "--max-degree": dict(type=int, default=1),
        },
    )
    ws_cmd(
        "assembly",
        cmd_assembly,
        **{
            "--group": dict(default=None),
            "--family": dict(default="all"),
            "--degree": dict(type=int, default=0),
        },
    )
    ws_cmd("run", cmd_run)
    f = sub.add_parser("fuzz", parents=[common])
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--cases", type=int, default=50)
    f.add_argument("--suite", default="all", choices=["all", "spans", "chains", "axioms", "mackey"])
    f.set_defaults(fn=cmd_fuzz)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args, sys.stdout)
    except ValidationError as e:
        print(f"validation error: {e}", file=sys.stderr)
        return 2
    except OutOfScopeError as e:
        print(f"out of scope: {e}", file=sys.stderr)
        return 3
    except InternalCheckError as e:
        print(f"internal invariant breach: {e}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
