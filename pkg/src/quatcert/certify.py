"""Witness certificates: build, verify, serialize.

A certificate is a single self-describing JSON document whose every claim
is re-derivable from the raw data (field, sigma, a, b, d, n).  Verification
trusts nothing cached: it recomputes the ramification set, the squareness
facts, the norm transcripts and both local obstruction routes from scratch,
and reports one pass/fail line per check in a fixed order.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass

from .exact_arith import (
    FUNCTION_FIELD,
    FieldElem,
    GAUSSIAN,
    GaussInt,
    GrammarError,
    InputError,
    format_elem,
    is_global_square,
    make_elem,
    parse_elem,
)
from .finitefield import GF
from .hilbert import (
    QuatPresentation,
    RamificationSet,
    presentation_from_ramification,
    ramification_set,
)
from .localsearch import hensel_precision_bound, hensel_search
from .places import (
    Place,
    format_place,
    is_local_square,
    parse_place,
    place_of,
    residue_symbol,
)
from .quadforms import DiagForm, full_norm_form, local_represents, pure_norm_form
from .witness import (
    DCandidate,
    LocalSquareEvidence,
    NegNormLocalFact,
    NegNormTranscript,
    Obstruction,
    check_neg_nrd,
    check_not_pure_norm,
    find_d,
    normalize_presentation,
)

FORMAT_VERSION = 1


@dataclass(frozen=True)
class GroupDescriptor:
    """Inert metadata for the adjoint group built on the witness: the
    algebra M_n(Q) with an orthogonal involution of discriminant d gives a
    group of type D_n over a field of transcendence degree at most 3n+4."""

    n: int
    algebra: str
    group_type: str
    discriminant: str
    trdeg_bound: int

    @staticmethod
    def for_n(n: int, d: FieldElem) -> "GroupDescriptor":
        if n % 2 == 0 or n < 3:
            raise InputError("n must be an odd integer >= 3")
        return GroupDescriptor(
            n=n,
            algebra=f"M_{n}(Q)",
            group_type=f"D_{n}",
            discriminant=format_elem(d),
            trdeg_bound=3 * n + 4,
        )


@dataclass(frozen=True)
class WitnessCertificate:
    format_version: int
    field_kind: str  # "gaussian" | "function-field"
    field_q: int | None
    sigma: RamificationSet
    presentation: QuatPresentation
    d: FieldElem
    d_candidate: DCandidate
    neg_nrd: NegNormTranscript
    obstructions: tuple  # tuple[Obstruction, ...]
    group: GroupDescriptor


@dataclass
class VerifyReport:
    checks: list  # list[(name, passed, detail)]
    elapsed: float

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def lines(self):
        for name, ok, detail in self.checks:
            mark = "ok  " if ok else "FAIL"
            yield f"{mark} {name}: {detail}"
        yield ("PASS" if self.passed else "FAIL") \
            + f" ({self.elapsed:.2f}s, {len(self.checks)} checks)"


# ---------------------------------------------------------------------------
# build
# ---------------------------------------------------------------------------

def _field_info(field_descriptor: str):
    if field_descriptor == GAUSSIAN:
        return GAUSSIAN, None
    if field_descriptor.startswith("fq:"):
        qtxt = field_descriptor[3:]
        if not qtxt.isdigit():
            raise InputError(f"bad field descriptor {field_descriptor!r}")
        q = int(qtxt)
        if q % 4 != 1:
            raise InputError(
                "the function-field backend needs q = 1 mod 4 so that -1 "
                "is a square and every place is tame")
        return FUNCTION_FIELD, GF(q)
    raise InputError(f"bad field descriptor {field_descriptor!r}")


def build_witness(field_descriptor: str, sigma, n: int = 3,
                  height_bound: int = 100) -> WitnessCertificate:
    """Assemble a complete certificate; deterministic for fixed inputs."""
    kind, ff_field = _field_info(field_descriptor)
    sigma = sigma if isinstance(sigma, RamificationSet) \
        else RamificationSet.of(sigma)
    if n % 2 == 0 or n < 3:
        raise InputError("n must be an odd integer >= 3")
    if len(sigma) == 0:
        raise InputError("sigma must be nonempty")
    if len(sigma) % 2 != 0:
        raise InputError("sigma must have even cardinality")
    if not any(not v.dyadic for v in sigma):
        raise InputError("sigma needs at least one odd-residue place")
    for v in sigma:
        v_kind = GAUSSIAN if v.kind == "gauss" else FUNCTION_FIELD
        if v_kind != kind:
            raise InputError(f"place {v} does not belong to {kind}")
        if kind == FUNCTION_FIELD and v.ff_field != ff_field:
            raise InputError(f"place {v} has the wrong constant field")
    presentation = presentation_from_ramification(
        sigma, height_bound,
        backend=GAUSSIAN if kind == GAUSSIAN else "ff", field=ff_field)
    d_candidate = find_d(sigma, height_bound)
    d = d_candidate.d
    neg_nrd = check_neg_nrd(presentation, d)
    obstructions = tuple(
        check_not_pure_norm(presentation, d, v)
        for v in sigma if not v.dyadic and v.kind != "ff-inf")
    if not obstructions:
        raise InputError("no odd finite place available for the obstruction")
    q = ff_field.q if ff_field is not None else None
    return WitnessCertificate(
        format_version=FORMAT_VERSION,
        field_kind=kind,
        field_q=q,
        sigma=sigma,
        presentation=presentation,
        d=d,
        d_candidate=d_candidate,
        neg_nrd=neg_nrd,
        obstructions=obstructions,
        group=GroupDescriptor.for_n(n, d),
    )


def catalog(n_list, field_descriptor: str, sigma,
            height_bound: int = 100) -> list:
    """One certificate per n, sharing the arithmetic core."""
    for n in n_list:
        if n % 2 == 0 or n < 3:
            raise InputError(f"catalog rejects n = {n}: must be odd and >= 3")
    base = build_witness(field_descriptor, sigma, n_list[0], height_bound)
    out = []
    for n in n_list:
        out.append(WitnessCertificate(
            format_version=base.format_version,
            field_kind=base.field_kind,
            field_q=base.field_q,
            sigma=base.sigma,
            presentation=base.presentation,
            d=base.d,
            d_candidate=base.d_candidate,
            neg_nrd=base.neg_nrd,
            obstructions=base.obstructions,
            group=GroupDescriptor.for_n(n, base.d),
        ))
    return out


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def verify_certificate(cert: WitnessCertificate) -> VerifyReport:
    """Re-derive every claim from the raw data (a, b, d, sigma, n)."""
    t0 = time.monotonic()
    checks = []

    def check(name, fn, detail_pass="verified"):
        try:
            ok, detail = fn()
        except Exception as exc:  # a failed recomputation is a report entry
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        checks.append((name, ok, detail if not ok or detail else detail_pass))
        return ok

    check("format-version",
          lambda: (cert.format_version == FORMAT_VERSION,
                   f"version {cert.format_version}"))
    check("sigma-even-cardinality",
          lambda: (len(cert.sigma) % 2 == 0, f"|sigma| = {len(cert.sigma)}"))
    check("sigma-canonical-order",
          lambda: (list(cert.sigma.places)
                   == sorted(cert.sigma.places, key=lambda v: v.sort_key())
                   and len({v.sort_key() for v in cert.sigma})
                   == len(cert.sigma),
                   "sorted, no duplicates"))
    check("n-odd-ge-3",
          lambda: (cert.group.n % 2 == 1 and cert.group.n >= 3,
                   f"n = {cert.group.n}"))
    check("trdeg-bound-formula",
          lambda: (cert.group.trdeg_bound == 3 * cert.group.n + 4,
                   f"bound = {cert.group.trdeg_bound}"))
    check("group-descriptor-consistency",
          lambda: (cert.group.algebra == f"M_{cert.group.n}(Q)"
                   and cert.group.group_type == f"D_{cert.group.n}"
                   and cert.group.discriminant == format_elem(cert.d),
                   f"{cert.group.algebra}, {cert.group.group_type}"))

    def ram_check():
        ram = ramification_set(cert.presentation)
        got = {v.sort_key() for v in ram}
        want = {v.sort_key() for v in cert.sigma}
        return got == want, f"recomputed {ram}"
    check("ramification-set-matches-sigma", ram_check)

    check("d-global-nonsquare",
          lambda: (not is_global_square(cert.d), f"d = {cert.d}"))

    def wplace_check():
        w = cert.d_candidate.witness_place
        if w is None:
            return True, "certified by unit square class"
        val = w.valuation(cert.d)
        return val % 2 == 1, f"odd exponent {val} at {w}"
    check("d-nonsquare-witness-place", wplace_check)

    def d_local_check():
        if {e.place.sort_key() for e in cert.d_candidate.local_evidence} \
                != {v.sort_key() for v in cert.sigma}:
            return False, "evidence does not cover sigma"
        for ev in cert.d_candidate.local_evidence:
            if not is_local_square(cert.d, ev.place):
                return False, f"not a local square at {ev.place}"
            if not ev.recheck(cert.d):
                return False, f"stale evidence at {ev.place}"
        return True, f"local square at all of {cert.sigma}"
    check("d-local-square-on-sigma", d_local_check)

    def d_matches_candidate():
        return cert.d_candidate.d == cert.d, "d fields agree"
    check("d-consistency", d_matches_candidate)

    def neg_nrd_check():
        tr = cert.neg_nrd
        if tr.presentation != cert.presentation or tr.d != cert.d:
            return False, "transcript drifted from the certificate"
        expected = full_norm_form(cert.presentation)
        if tr.norm_form != expected:
            return False, "wrong norm form"
        ram_keys = {v.sort_key() for v in cert.sigma}
        for fact in tr.local_facts:
            ramified = fact.place.sort_key() in ram_keys
            if ramified and fact.status != "ramified-square":
                return False, f"{fact.place} should be ramified-square"
            if not ramified and fact.status != "split-automatic":
                return False, f"{fact.place} should be split-automatic"
            if ramified and (fact.evidence is None
                             or not fact.evidence.recheck(cert.d)):
                return False, f"bad square evidence at {fact.place}"
        if not tr.recheck():
            return False, "transcript recheck failed"
        if tr.global_witness is not None:
            value = expected.evaluate(tr.global_witness)
            if value != -cert.d:
                return False, "witness vector does not evaluate to -d"
            return True, "explicit norm witness verified"
        return True, "local evidence only (bounded search missed)"
    check("neg-nrd-transcript", neg_nrd_check)

    def obstruction_coverage():
        want = {v.sort_key() for v in cert.sigma
                if not v.dyadic and v.kind != "ff-inf"}
        got = {o.place.sort_key() for o in cert.obstructions}
        if not got:
            return False, "no obstruction recorded"
        if got != want:
            return False, "obstructions must cover the odd places of sigma"
        return True, f"{len(got)} place(s); one is required, the rest " \
                     "are extra evidence"
    check("obstruction-coverage", obstruction_coverage)

    for idx, ob in enumerate(cert.obstructions):
        tag = f"obstruction[{format_place(ob.place)}]"

        def norm_check(ob=ob):
            renorm = normalize_presentation(cert.presentation, ob.place)
            if renorm != ob.normalized:
                return False, "recomputed normalization differs"
            return True, f"normalized to {ob.normalized}"
        check(f"{tag}-normalization", norm_check)

        def fact_check(ob=ob):
            if residue_symbol(ob.normalized.a, ob.place) != -1 \
                    or ob.a_residue_symbol != -1:
                return False, "first entry is a residue square"
            if not is_local_square(cert.d, ob.place) or not ob.d_local_square:
                return False, "d is not a local square"
            if ob.place.valuation(cert.d) != ob.d_valuation \
                    or ob.d_valuation % 2 != 0:
                return False, "wrong d valuation"
            return True, "residue facts verified"
        check(f"{tag}-residue-facts", fact_check)

        def verdict_check(ob=ob):
            form = pure_norm_form(ob.normalized)
            solv = local_represents(form, cert.d, ob.place)
            if solv.verdict:
                return False, "invariants now say representable"
            if not solv.recheck():
                return False, "solvability evidence fails rechecking"
            return True, "not represented (invariant route)"
        check(f"{tag}-local-verdict", verdict_check)

        def hensel_check(ob=ob):
            form = pure_norm_form(ob.normalized)
            bound = hensel_precision_bound(
                list(form.coeffs), cert.d, ob.place)
            if ob.hensel_precision != bound:
                return False, f"recorded precision {ob.hensel_precision} " \
                              f"is not the stated bound {bound}"
            found = hensel_search(list(form.coeffs), cert.d, ob.place, bound)
            if found is not None:
                return False, "search found a local solution"
            return True, f"no primitive solution mod pi^{bound}"
        check(f"{tag}-hensel-absent", hensel_check)

    return VerifyReport(checks, time.monotonic() - t0)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _elem_str(x: FieldElem) -> str:
    return format_elem(x)


def _evidence_json(ev: LocalSquareEvidence) -> dict:
    return {
        "place": format_place(ev.place),
        "valuation": ev.valuation,
        "unit_sqrt": _elem_str(ev.unit_sqrt),
    }


def encode_certificate(cert: WitnessCertificate) -> str:
    doc = {
        "format_version": cert.format_version,
        "field": ({"kind": GAUSSIAN} if cert.field_kind == GAUSSIAN
                  else {"kind": FUNCTION_FIELD, "q": cert.field_q}),
        "sigma": [format_place(v) for v in cert.sigma],
        "presentation": {"a": _elem_str(cert.presentation.a),
                         "b": _elem_str(cert.presentation.b)},
        "d": _elem_str(cert.d),
        "d_transcript": {
            "witness_place": (format_place(cert.d_candidate.witness_place)
                              if cert.d_candidate.witness_place is not None
                              else None),
            "local_squares": [_evidence_json(e)
                              for e in cert.d_candidate.local_evidence],
        },
        "neg_nrd": {
            "norm_form": [_elem_str(c) for c in cert.neg_nrd.norm_form.coeffs],
            "local": [
                {"place": format_place(f.place), "status": f.status,
                 **({"square_evidence": _evidence_json(f.evidence)}
                    if f.evidence is not None else {})}
                for f in cert.neg_nrd.local_facts
            ],
            "global_witness": ([_elem_str(x)
                                for x in cert.neg_nrd.global_witness]
                               if cert.neg_nrd.global_witness is not None
                               else None),
        },
        "obstructions": [
            {
                "place": format_place(ob.place),
                "normalized": {"a": _elem_str(ob.normalized.a),
                               "b": _elem_str(ob.normalized.b)},
                "a_residue_symbol": ob.a_residue_symbol,
                "d_local_square": ob.d_local_square,
                "d_valuation": ob.d_valuation,
                "hensel_precision": ob.hensel_precision,
            }
            for ob in cert.obstructions
        ],
        "group": {
            "n": cert.group.n,
            "algebra": cert.group.algebra,
            "type": cert.group.group_type,
            "discriminant": cert.group.discriminant,
            "trdeg_bound": cert.group.trdeg_bound,
        },
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _expect_keys(obj: dict, required, optional=(), where="document"):
    keys = set(obj)
    missing = set(required) - keys
    unknown = keys - set(required) - set(optional)
    if missing:
        raise GrammarError(f"{where}: missing keys {sorted(missing)}")
    if unknown:
        raise GrammarError(f"{where}: unknown keys {sorted(unknown)}")


def _decode_evidence(obj: dict) -> LocalSquareEvidence:
    _expect_keys(obj, ["place", "valuation", "unit_sqrt"],
                 where="square evidence")
    return LocalSquareEvidence(
        parse_place(obj["place"]), int(obj["valuation"]),
        parse_elem(obj["unit_sqrt"]))


def decode_certificate(text: str) -> WitnessCertificate:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GrammarError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise GrammarError("certificate must be a JSON object")
    _expect_keys(doc, ["format_version", "field", "sigma", "presentation",
                       "d", "d_transcript", "neg_nrd", "obstructions",
                       "group"])
    if doc["format_version"] != FORMAT_VERSION:
        raise GrammarError(
            f"unsupported format version {doc['format_version']!r}")
    fielddoc = doc["field"]
    _expect_keys(fielddoc, ["kind"], optional=["q"], where="field")
    kind = fielddoc["kind"]
    if kind == GAUSSIAN:
        field_q = None
    elif kind == FUNCTION_FIELD:
        field_q = int(fielddoc["q"])
    else:
        raise GrammarError(f"unknown field kind {kind!r}")
    sigma = RamificationSet.of(parse_place(s) for s in doc["sigma"])
    if [format_place(v) for v in sigma] != list(doc["sigma"]):
        raise GrammarError("sigma is not in canonical order")
    _expect_keys(doc["presentation"], ["a", "b"], where="presentation")
    presentation = QuatPresentation(parse_elem(doc["presentation"]["a"]),
                                    parse_elem(doc["presentation"]["b"]))
    d = parse_elem(doc["d"])
    dt = doc["d_transcript"]
    _expect_keys(dt, ["witness_place", "local_squares"],
                 where="d_transcript")
    wp = parse_place(dt["witness_place"]) \
        if dt["witness_place"] is not None else None
    evidence = tuple(_decode_evidence(e) for e in dt["local_squares"])
    d_candidate = DCandidate(d, sigma, evidence, wp)
    nn = doc["neg_nrd"]
    _expect_keys(nn, ["norm_form", "local", "global_witness"],
                 where="neg_nrd")
    norm_form = DiagForm.of(*[parse_elem(c) for c in nn["norm_form"]])
    facts = []
    for f in nn["local"]:
        _expect_keys(f, ["place", "status"], optional=["square_evidence"],
                     where="neg_nrd.local")
        ev = _decode_evidence(f["square_evidence"]) \
            if "square_evidence" in f else None
        if f["status"] not in ("split-automatic", "ramified-square"):
            raise GrammarError(f"unknown status {f['status']!r}")
        facts.append(NegNormLocalFact(parse_place(f["place"]),
                                      f["status"], ev))
    witness_vec = None
    if nn["global_witness"] is not None:
        witness_vec = tuple(parse_elem(x) for x in nn["global_witness"])
    neg_nrd = NegNormTranscript(presentation, d, norm_form,
                                tuple(facts), witness_vec)
    obstructions = []
    for ob in doc["obstructions"]:
        _expect_keys(ob, ["place", "normalized", "a_residue_symbol",
                          "d_local_square", "d_valuation",
                          "hensel_precision"], where="obstruction")
        _expect_keys(ob["normalized"], ["a", "b"], where="normalized")
        obstructions.append(Obstruction(
            place=parse_place(ob["place"]),
            normalized=QuatPresentation(parse_elem(ob["normalized"]["a"]),
                                        parse_elem(ob["normalized"]["b"])),
            a_residue_symbol=int(ob["a_residue_symbol"]),
            d_local_square=bool(ob["d_local_square"]),
            d_valuation=int(ob["d_valuation"]),
            hensel_precision=int(ob["hensel_precision"]),
        ))
    g = doc["group"]
    _expect_keys(g, ["n", "algebra", "type", "discriminant", "trdeg_bound"],
                 where="group")
    group = GroupDescriptor(int(g["n"]), g["algebra"], g["type"],
                            g["discriminant"], int(g["trdeg_bound"]))
    return WitnessCertificate(
        format_version=doc["format_version"],
        field_kind=kind,
        field_q=field_q,
        sigma=sigma,
        presentation=presentation,
        d=d,
        d_candidate=d_candidate,
        neg_nrd=neg_nrd,
        obstructions=tuple(obstructions),
        group=group,
    )
