"""Command-line surface for the automaton-group toolkit.

Every command is deterministic under --seed, reads/writes the JSON
formats of the library modules, and exits 0 exactly when its declared
postcondition held.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from random import Random
from typing import Optional

from . import protocols
from .mealy import (
    MealyAutomaton,
    act,
    format_word,
    free_reduce,
    inverse_word,
    invert,
    parse_word,
    random_word,
    validate,
)
from .platforms import (
    AffineSpec,
    OmegaSequence,
    affine_platform,
    basilica_platform,
    grigorchuk_first,
    grigorchuk_omega,
)
from .protocols import (
    Ciphertext,
    MetaParams,
    MetaPublicKey,
    Rejected,
    WP_RELATOR_WORDS,
    meta_alice_keygen,
    meta_alice_session,
    meta_bob_session,
    meta_decrypt,
    meta_encrypt,
    verify_session,
)
from .rewriting import Relator, RewriteSystem, reachable_count
from .wordproblem import (
    BudgetExceeded,
    DecisionBudget,
    acts_trivially_to_depth,
    commutes,
    decide_identity,
)

PRESETS = ("grigorchuk", "grigorchuk-omega", "basilica2", "basilica3", "affine")

DEFAULT_AFFINE_SPEC = AffineSpec(2, 1, ((3,),))


class CliError(Exception):
    pass


@dataclass
class Platform:
    name: str
    machine: object
    system: Optional[RewriteSystem]
    base: tuple


def _parse_omega(args) -> OmegaSequence:
    period = tuple(int(ch) for ch in (args.omega or "012"))
    pre = tuple(int(ch) for ch in (args.omega_preperiod or ""))
    return OmegaSequence(pre, period)


def load_platform(args) -> Platform:
    if getattr(args, "automaton", None):
        machine = MealyAutomaton.from_json(Path(args.automaton).read_text())
        report = validate(machine)
        if not report.ok:
            raise CliError("invalid automaton: " + "; ".join(report.problems))
        return Platform("custom", machine, None,
                        tuple(((s, 1),) for s in machine.states))
    name = getattr(args, "preset", None) or "grigorchuk"
    depth = getattr(args, "relator_depth", 2)
    if name == "grigorchuk":
        machine, system = grigorchuk_first(depth)
        base = tuple(parse_word(g) for g in "abcd")
    elif name == "grigorchuk-omega":
        omega = _parse_omega(args)
        machine = grigorchuk_omega(omega)
        relators = [Relator(parse_word(w)) for w in WP_RELATOR_WORDS]
        system = RewriteSystem(relators, ("a", "b", "c", "d"), 256, machine=machine)
        base = tuple(parse_word(g) for g in "abcd")
    elif name in ("basilica2", "basilica3"):
        machine, system = basilica_platform(int(name[-1]))
        base = (parse_word("a"), parse_word("b"))
    elif name == "affine":
        spec = DEFAULT_AFFINE_SPEC
        if getattr(args, "spec", None):
            text = args.spec
            if text.startswith("@"):
                text = Path(text[1:]).read_text()
            spec = AffineSpec.from_json(text)
        machine, system = affine_platform(spec)
        base = tuple(parse_word(g) for g in machine.generators if g != "t")
        base = base + (parse_word("t"),)
    else:
        raise CliError(f"unknown preset {name!r}")
    return Platform(name, machine, system, base)


def _budget(args) -> DecisionBudget:
    return DecisionBudget(max_states=getattr(args, "budget_states", 2 ** 20) or 2 ** 20)


def _emit(args, doc: dict, csv_rows=None, csv_header=None) -> None:
    if getattr(args, "format", "json") == "csv" and csv_rows is not None:
        print(",".join(csv_header))
        for row in csv_rows:
            print(",".join(str(x) for x in row))
    else:
        print(json.dumps(doc, sort_keys=True))


# -- simple word/automaton commands -----------------------------------


def cmd_validate(args) -> int:
    machine = MealyAutomaton.from_json(Path(args.automaton).read_text())
    report = validate(machine)
    _emit(args, {"ok": report.ok, "problems": list(report.problems)})
    return 0 if report.ok else 1


def cmd_invert(args) -> int:
    machine = MealyAutomaton.from_json(Path(args.automaton).read_text())
    print(invert(machine).to_json())
    return 0


def cmd_act(args) -> int:
    plat = load_platform(args)
    w = parse_word(args.word)
    _emit(args, {"output": act(plat.machine, w, args.input)})
    return 0


def cmd_wp_check(args) -> int:
    plat = load_platform(args)
    w = parse_word(args.word)
    if args.word2:
        w = free_reduce(w + inverse_word(parse_word(args.word2)))
    try:
        result, explored = decide_identity(plat.machine, w, _budget(args))
    except BudgetExceeded:
        ok = acts_trivially_to_depth(plat.machine, w, args.depth)
        _emit(args, {"result": None, "trivial_to_depth": ok, "depth": args.depth})
        return 1
    _emit(args, {"result": result, "explored_states": explored})
    return 0


def cmd_platform_export(args) -> int:
    plat = load_platform(args)
    machine = plat.machine
    if not isinstance(machine, MealyAutomaton):
        machine = machine.materialize(state_cap=args.state_cap)
    print(machine.to_json())
    return 0


# -- key lifecycle -----------------------------------------------------


def _public_key_doc(plat: Platform, args) -> dict:
    doc = {
        "base_tuple": [format_word(w) for w in plat.base],
        "relators": [format_word(r.word) for r in plat.system.relators],
        "params": {
            "A_len": args.a_len,
            "obf_steps": args.obf_steps,
            "u_blocks": args.u_blocks,
        },
        "platform": {"preset": plat.name},
    }
    if plat.name == "affine":
        spec = DEFAULT_AFFINE_SPEC
        if getattr(args, "spec", None):
            text = args.spec
            if text.startswith("@"):
                text = Path(text[1:]).read_text()
            spec = AffineSpec.from_json(text)
        doc["platform"]["spec"] = json.loads(spec.to_json())
    if plat.name == "grigorchuk-omega":
        doc["platform"]["omega"] = {
            "preperiod": args.omega_preperiod or "",
            "period": args.omega or "012",
        }
    return doc


def cmd_keygen(args) -> int:
    plat = load_platform(args)
    if plat.system is None:
        raise CliError("keygen needs a preset platform with relators")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    doc = _public_key_doc(plat, args)
    (out / "public.json").write_text(json.dumps(doc, sort_keys=True, indent=2))
    _emit(args, {"written": str(out / "public.json")})
    return 0


def _params(args) -> MetaParams:
    return MetaParams(A_len=args.a_len, obf_steps=args.obf_steps,
                      u_blocks=args.u_blocks)


def cmd_exchange(args) -> int:
    plat = load_platform(args)
    if plat.system is None:
        raise CliError("exchange needs a preset platform with relators")
    rng = Random(args.seed)
    params = _params(args)
    pub = MetaPublicKey(plat.machine, plat.base, plat.system)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    priv, c_tuple = meta_alice_keygen(pub, params, rng)
    try:
        u, uA = meta_bob_session(pub, c_tuple, params, rng)
    except Rejected as exc:
        _emit(args, {"error": "Rejected", "detail": str(exc)})
        return 2
    U = meta_alice_session(priv, uA)
    verification = verify_session(plat.machine, U, u)

    payload = bytes(rng.randrange(256) for _ in range(args.payload))
    ct = meta_encrypt(plat.machine, u, payload)
    bob_to_alice_ok = meta_decrypt(plat.machine, U, ct) == payload
    ct2 = meta_encrypt(plat.machine, U, payload)
    alice_to_bob_ok = meta_decrypt(plat.machine, u, ct2) == payload
    ok = verification.equal and bob_to_alice_ok and alice_to_bob_ok

    files = {
        "public.json": _public_key_doc(plat, args),
        "private.json": {"A": format_word(priv.A)},
        "handshake.json": {
            "c_tuple": [format_word(c) for c in c_tuple],
            "uA": format_word(uA),
        },
        "session_alice.json": {"key": format_word(U)},
        "session_bob.json": {"key": format_word(u)},
        "report.json": {
            "accepted": True,
            "verified": verification.equal,
            "verified_exact": verification.exact,
            "verified_at_depth": verification.depth,
            "roundtrip_bob_to_alice": bob_to_alice_ok,
            "roundtrip_alice_to_bob": alice_to_bob_ok,
        },
    }
    transcript = json.dumps(files, sort_keys=True, indent=2)
    for name, doc in files.items():
        (out / name).write_text(json.dumps(doc, sort_keys=True, indent=2))
    digest = hashlib.sha256(transcript.encode()).hexdigest()
    _emit(args, {"ok": ok, "transcript_sha256": digest, "out": str(out)})
    return 0 if ok else 1


def _read_session_key(path: str):
    doc = json.loads(Path(path).read_text())
    return parse_word(doc["key"])


def cmd_encrypt(args) -> int:
    plat = load_platform(args)
    key = _read_session_key(args.key)
    data = Path(args.infile).read_bytes()
    ct = meta_encrypt(plat.machine, key, data)
    Path(args.outfile).write_text(json.dumps(
        {"header": ct.length, "payload": ct.payload}, sort_keys=True))
    _emit(args, {"bytes": ct.length, "symbols": len(ct.payload)})
    return 0


def cmd_decrypt(args) -> int:
    plat = load_platform(args)
    key = _read_session_key(args.key)
    doc = json.loads(Path(args.infile).read_text())
    ct = Ciphertext(payload=doc["payload"], length=doc["header"])
    data = meta_decrypt(plat.machine, key, ct)
    Path(args.outfile).write_bytes(data)
    _emit(args, {"bytes": len(data)})
    return 0


# -- protocol demos ----------------------------------------------------


def cmd_aag_demo(args) -> int:
    plat = load_platform(args)
    rng = Random(args.seed)
    gens = [w for w in plat.base]
    half = max(1, len(gens) // 2)
    a_words, b_words = tuple(gens[:half]), tuple(gens[half:] or gens[:half])
    alice_picks = protocols.random_picks(len(a_words), args.private_len, rng)
    bob_picks = protocols.random_picks(len(b_words), args.private_len, rng)
    alice_key, bob_key, transcript = protocols.aag_exchange(
        a_words, b_words, alice_picks, bob_picks)
    try:
        equal, _ = decide_identity(
            plat.machine, alice_key + inverse_word(bob_key), _budget(args))
    except BudgetExceeded:
        equal = None
    _emit(args, {
        "alice_key": format_word(alice_key),
        "bob_key": format_word(bob_key),
        "keys_equal": equal,
        "transcript": {
            "conjugated_b": [format_word(w) for w in transcript.conjugated_b],
            "conjugated_a": [format_word(w) for w in transcript.conjugated_a],
        },
    })
    return 0 if equal else 1


def cmd_wp_cipher_demo(args) -> int:
    rng = Random(args.seed)
    omega = _parse_omega(args)
    pub, secret = protocols.wp_keygen(omega)
    bits = [rng.randrange(2) for _ in range(args.bits)]
    ok = 0
    for bit in bits:
        word_ = protocols.wp_encrypt_bit(pub, bit, args.steps, rng)
        if protocols.wp_decrypt_bit(secret, pub, word_) == bit:
            ok += 1
    _emit(args, {"bits": len(bits), "correct": ok})
    return 0 if ok == len(bits) else 1


# -- experiments -------------------------------------------------------


def _sample_word_upto(generators, max_len: int, rng: Random):
    return random_word(generators, rng.randint(0, max_len), rng)


def cmd_experiment_commute(args) -> int:
    plat = load_platform(args)
    rng = Random(args.seed)
    gens = plat.machine.generators
    gens = tuple(g for g in gens if g != "e") or gens
    budget = _budget(args)
    noncommuting = undecided = 0
    for _ in range(args.samples):
        u = _sample_word_upto(gens, args.N, rng)
        A = _sample_word_upto(gens, args.N, rng)
        try:
            if not commutes(plat.machine, u, A, budget):
                noncommuting += 1
        except BudgetExceeded:
            comm = free_reduce(u + A + inverse_word(u) + inverse_word(A))
            if not acts_trivially_to_depth(plat.machine, comm, args.depth):
                noncommuting += 1
            else:
                undecided += 1
    doc = {
        "N": args.N,
        "samples": args.samples,
        "noncommuting_fraction": noncommuting / args.samples,
        "undecided_fraction": undecided / args.samples,
    }
    _emit(args, doc,
          csv_rows=[[args.N, args.samples, doc["noncommuting_fraction"],
                     doc["undecided_fraction"]]],
          csv_header=["N", "samples", "noncommuting_fraction", "undecided_fraction"])
    return 0


def cmd_experiment_rewrite_space(args) -> int:
    plat = load_platform(args)
    if plat.system is None:
        raise CliError("rewrite-space needs a preset platform with relators")
    w = parse_word(args.word)
    counts, truncated = reachable_count(w, plat.system, args.steps, args.cap)
    rows = [[k, c, truncated and k == len(counts) - 1] for k, c in enumerate(counts)]
    _emit(args, {"counts": counts, "truncated": truncated},
          csv_rows=rows, csv_header=["step", "count", "truncated"])
    return 0


def cmd_experiment_hamming(args) -> int:
    plat = load_platform(args)
    rng = Random(args.seed)
    machine = plat.machine
    gens = tuple(g for g in machine.generators if g != "e") or machine.generators
    key = (_read_session_key(args.key) if args.key
           else random_word(gens, args.key_len, rng))
    messages = [bytes(rng.randrange(256) for _ in range(args.msg_bytes))
                for _ in range(args.messages)]
    encrypted = [meta_encrypt(machine, key, m).payload for m in messages]
    rows = []
    hs = [()] + [random_word(gens, L, rng)
                 for L in range(1, args.max_h_len + 1)]
    for h in hs:
        total = 0
        for M in encrypted:
            hM = act(machine, h, M)
            total += sum(1 for x, y in zip(M, hM) if x != y)
        mean = total / (len(encrypted) * len(encrypted[0]))
        rows.append([format_word(h) or "1", len(h), round(mean * len(encrypted[0]), 4)])
    _emit(args, {"rows": rows}, csv_rows=rows,
          csv_header=["h", "h_len", "mean_hamming_distance"])
    return 0


# -- parser ------------------------------------------------------------


def _add_platform_args(p, automaton=True):
    p.add_argument("--preset", choices=PRESETS, default="grigorchuk")
    if automaton:
        p.add_argument("--automaton", help="automaton JSON file (overrides --preset)")
    p.add_argument("--relator-depth", type=int, default=2, dest="relator_depth")
    p.add_argument("--omega", help="period digits for grigorchuk-omega (default 012)")
    p.add_argument("--omega-preperiod", dest="omega_preperiod",
                   help="preperiod digits for grigorchuk-omega")
    p.add_argument("--spec", help="AffineSpec JSON (or @file) for the affine preset")


def _add_common(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget-states", type=int, default=2 ** 20, dest="budget_states")
    p.add_argument("--depth", type=int, default=14)
    p.add_argument("--format", choices=("json", "csv"), default="json")


def _add_meta_params(p):
    p.add_argument("--a-len", type=int, default=6, dest="a_len")
    p.add_argument("--obf-steps", type=int, default=40, dest="obf_steps")
    p.add_argument("--u-blocks", type=int, default=5, dest="u_blocks")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="agcrypt",
        description="Automaton-group word problem, rewriting, and key exchange.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate an automaton JSON file")
    p.add_argument("automaton")
    _add_common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("invert", help="emit the inverse automaton")
    p.add_argument("automaton")
    _add_common(p)
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("act", help="apply a group word to an input word")
    _add_platform_args(p)
    _add_common(p)
    p.add_argument("--word", required=True)
    p.add_argument("--input", required=True)
    p.set_defaults(func=cmd_act)

    p = sub.add_parser("wp-check", help="exact word-problem query")
    _add_platform_args(p)
    _add_common(p)
    p.add_argument("--word", required=True)
    p.add_argument("--word2", help="check equality with this word instead of identity")
    p.set_defaults(func=cmd_wp_check)

    p = sub.add_parser("platform", help="platform utilities")
    psub = p.add_subparsers(dest="subcommand", required=True)
    pe = psub.add_parser("export", help="materialize a platform as automaton JSON")
    _add_platform_args(pe, automaton=False)
    _add_common(pe)
    pe.add_argument("--state-cap", type=int, default=1024, dest="state_cap")
    pe.set_defaults(func=cmd_platform_export)

    p = sub.add_parser("keygen", help="write a metascheme public key file")
    _add_platform_args(p)
    _add_common(p)
    _add_meta_params(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("exchange", help="run a full metascheme session")
    _add_platform_args(p)
    _add_common(p)
    _add_meta_params(p)
    p.add_argument("--out", required=True)
    p.add_argument("--payload", type=int, default=1024)
    p.set_defaults(func=cmd_exchange)

    p = sub.add_parser("encrypt", help="encrypt a file with a session key")
    _add_platform_args(p)
    _add_common(p)
    p.add_argument("--key", required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", dest="outfile", required=True)
    p.set_defaults(func=cmd_encrypt)

    p = sub.add_parser("decrypt", help="decrypt a ciphertext file")
    _add_platform_args(p)
    _add_common(p)
    p.add_argument("--key", required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", dest="outfile", required=True)
    p.set_defaults(func=cmd_decrypt)

    p = sub.add_parser("aag-demo", help="Anshel-Anshel-Goldfeld key agreement demo")
    _add_platform_args(p)
    _add_common(p)
    p.add_argument("--private-len", type=int, default=4, dest="private_len")
    p.set_defaults(func=cmd_aag_demo)

    p = sub.add_parser("wp-cipher-demo", help="word-problem bit cipher demo")
    _add_common(p)
    p.add_argument("--omega", help="period digits (default 012)")
    p.add_argument("--omega-preperiod", dest="omega_preperiod")
    p.add_argument("--bits", type=int, default=32)
    p.add_argument("--steps", type=int, default=50)
    p.set_defaults(func=cmd_wp_cipher_demo)

    p = sub.add_parser("experiment", help="measurement suites")
    esub = p.add_subparsers(dest="subcommand", required=True)

    pc = esub.add_parser("commute", help="non-commutation probability")
    _add_platform_args(pc)
    _add_common(pc)
    pc.add_argument("-N", type=int, default=6)
    pc.add_argument("--samples", type=int, default=1000)
    pc.set_defaults(func=cmd_experiment_commute)

    pr = esub.add_parser("rewrite-space", help="rewrite ball growth")
    _add_platform_args(pr)
    _add_common(pr)
    pr.add_argument("--word", default="a")
    pr.add_argument("--steps", type=int, default=3)
    pr.add_argument("--cap", type=int, default=20000)
    pr.set_defaults(func=cmd_experiment_rewrite_space)

    ph = esub.add_parser("hamming", help="Hamming profile of nearby keys")
    _add_platform_args(ph)
    _add_common(ph)
    ph.add_argument("--key", help="session key file; random key if omitted")
    ph.add_argument("--key-len", type=int, default=8, dest="key_len")
    ph.add_argument("--max-h-len", type=int, default=4, dest="max_h_len")
    ph.add_argument("--messages", type=int, default=16)
    ph.add_argument("--msg-bytes", type=int, default=32, dest="msg_bytes")
    ph.set_defaults(func=cmd_experiment_hamming)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CliError, OSError, ValueError, KeyError) as exc:
        print(json.dumps({"error": type(exc).__name__, "detail": str(exc)}))
        return 2


if __name__ == "__main__":
    sys.exit(main())
