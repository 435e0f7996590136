"""Command-line front end.

::

    baptista keygen  --out KEY [--seed N] [--map KIND] [--eta E]
    baptista encrypt --key KEY --in PLAIN --out CIPHER [--scheme S] [--encoding E] [--seed N] [--eta E]
    baptista decrypt --key KEY --in CIPHER --out PLAIN
    baptista analyze-dist  [--key KEY] [--trials N] [--seed N] [--out CSV]
    baptista analyze-error [--key KEY] [--scheme masked|rectified] [--trials N] [--length L] [--seed N] [--out CSV]
    baptista analyze-map   [--map KIND] [--param V] [--trials N] [--seed N] [--out CSV]

Plaintext is a raw byte stream. Reports go to stdout, diagnostics to stderr.
"""

import argparse
import sys
from dataclasses import replace

from baptista import _prng, analysis
from baptista.chaos import MapKind, MapSpec, PerturbConfig
from baptista.ciphers import Variant, decipher, encipher
from baptista.encoding import Scheme, read_ciphertext, write_ciphertext
from baptista.errors import BaptistaError
from baptista.keys import generate_key, read_key_file, write_key_file
from baptista.partition import Partition

S = 256

_SCHEMES = {
    ("original", "fixed"): Scheme.ORIGINAL_FIXED,
    ("masked", "fixed"): Scheme.MASKED_FIXED,
    ("rectified", "varlen"): Scheme.RECTIFIED_VARLEN,
    ("rectified", "compressed"): Scheme.RECTIFIED_COMPRESSED,
}
_VARIANT_OF = {v: Variant(k[0]) for k, v in _SCHEMES.items()}
_DEFAULT_ENCODING = {"original": "fixed", "masked": "fixed", "rectified": "varlen"}


class UsageError(Exception):
    pass


def _seed(text):
    value = int(text, 0)
    if value < 0:
        raise argparse.ArgumentTypeError("seed must be non-negative")
    return value


def _parser():
    ap = argparse.ArgumentParser(prog="baptista", description="Baptista-type chaotic ciphers.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, key=False, key_required=False, io=False, out_required=False):
        if key:
            p.add_argument("--key", required=key_required, help="key file")
        if io:
            p.add_argument("--in", dest="input", required=True, help="input file")
        p.add_argument("--out", required=out_required, help="output file")
        p.add_argument("--seed", type=_seed, default=None, help="master seed (non-negative)")

    p = sub.add_parser("keygen", help="write a key file with random secrets")
    common(p, out_required=True)
    p.add_argument("--map", choices=[k.value for k in MapKind], default=MapKind.SKEW_TENT.value)
    p.add_argument("--eta", type=float, default=None)

    p = sub.add_parser("encrypt", help="encrypt a file")
    common(p, key=True, key_required=True, io=True, out_required=True)
    p.add_argument("--scheme", choices=["original", "masked", "rectified"], default="rectified")
    p.add_argument("--encoding", choices=["fixed", "varlen", "compressed"], default=None)
    p.add_argument("--eta", type=float, default=None, help="override the key's eta")

    p = sub.add_parser("decrypt", help="decrypt a file")
    common(p, key=True, key_required=True, io=True, out_required=True)
    p.add_argument("--scheme", choices=["original", "masked", "rectified"], default=None,
                   help="expected scheme (default: taken from the file header)")
    p.add_argument("--encoding", choices=["fixed", "varlen", "compressed"], default=None)

    p = sub.add_parser("analyze-dist", help="count distribution and mask uniformity")
    common(p, key=True)
    p.add_argument("--trials", type=int, default=100_000)

    p = sub.add_parser("analyze-error", help="per-position decryption error rates")
    common(p, key=True)
    p.add_argument("--scheme", choices=["masked", "rectified"], default="masked")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--length", type=int, default=1, help="characters per message")

    p = sub.add_parser("analyze-map", help="occupancy, autocorrelation and Lyapunov exponent")
    common(p)
    p.add_argument("--map", choices=[k.value for k in MapKind], default=MapKind.SKEW_TENT.value)
    p.add_argument("--param", type=float, default=None, help="b (logistic) or p (skew tent)")
    p.add_argument("--trials", type=int, default=1_000_000, help="orbit length")
    p.add_argument("--no-perturb", action="store_true")
    return ap


def _scheme(scheme, encoding):
    encoding = encoding or _DEFAULT_ENCODING[scheme]
    try:
        return _SCHEMES[(scheme, encoding)]
    except KeyError:
        raise UsageError(f"encoding {encoding!r} cannot be used with scheme {scheme!r}") from None


def _load_key(args, eta=None):
    if args.key:
        key = read_key_file(args.key)
    else:
        key = generate_key(0 if args.seed is None else args.seed)
    if eta is not None:
        key = replace(key, eta=eta)
    return key


def _read(path):
    with open(path, "rb") as fh:
        return fh.read()


def _write(path, data):
    with open(path, "wb") as fh:
        fh.write(data)


def _emit(report, args):
    print(report.table())
    if args.out:
        with open(args.out, "w", newline="") as fh:
            report.to_csv(fh)


def cmd_keygen(args):
    overrides = {} if args.eta is None else {"eta": args.eta}
    key = generate_key(args.seed, args.map, **overrides)
    write_key_file(args.out, key)


def cmd_encrypt(args):
    scheme = _scheme(args.scheme, args.encoding)
    key = _load_key(args, args.eta)
    part = Partition.for_key(key, S)
    kappa = None if args.seed is None else _prng.derive_seed(args.seed, "kappa")
    tr = encipher(_VARIANT_OF[scheme], key, part, _read(args.input), kappa_seed=kappa)
    _write(args.out, write_ciphertext(tr.units, key, scheme, S))


def cmd_decrypt(args):
    key = _load_key(args)
    header, units = read_ciphertext(_read(args.input), key)
    if args.scheme and _scheme(args.scheme, args.encoding) is not header.scheme:
        raise UsageError(f"file holds a {header.scheme.name} stream")
    if header.s != S:
        raise UsageError(f"file uses an alphabet of {header.s} symbols, expected {S}")
    part = Partition.for_key(key, S)
    symbols = decipher(_VARIANT_OF[header.scheme], key, part, units).symbols
    _write(args.out, symbols.astype("uint8").tobytes())


def cmd_analyze_dist(args):
    key = _load_key(args)
    part = Partition.for_key(key, S)
    seed = 0 if args.seed is None else args.seed
    counts = analysis.sample_counts(key, part, args.trials, seed)
    rep = analysis.count_distribution_test(counts, S, key.n0)
    rep.values["occupancy_hit_probability"] = analysis.occupancy_hit_probability(
        key.map, part, 10**6, seed=seed, perturb=key.perturb)
    mask = analysis.mask_uniformity_test(key, part, args.trials, seed + 1)
    rep.values["mask_chi_square"] = mask.chi_square.statistic
    rep.values["mask_p_value"] = mask.chi_square.p_value
    rep.values["mask_uniform"] = mask.chi_square.passed
    rep.values["unmasked_p_value"] = mask.values["unmasked_p_value"]
    _emit(rep, args)


def cmd_analyze_error(args):
    key = _load_key(args)
    part = Partition.for_key(key, S)
    seed = 0 if args.seed is None else args.seed
    rep = analysis.masked_error_rate(key, part, args.trials, args.length, seed,
                                     variant=args.scheme, min_trials=1)
    _emit(rep, args)


def cmd_analyze_map(args):
    kind = MapKind(args.map)
    if kind is MapKind.LOGISTIC:
        mapspec = MapSpec.logistic(4.0 if args.param is None else args.param)
    elif kind is MapKind.SKEW_TENT:
        mapspec = MapSpec.skew_tent(0.37 if args.param is None else args.param)
    else:
        mapspec = MapSpec.pwlcm([(0.3, 0), (0.55, 1), (0.8, 0), (1.0, 1)])
    seed = 0 if args.seed is None else args.seed
    perturb = PerturbConfig.off() if args.no_perturb else PerturbConfig(True, 16, seed, 8)
    _emit(analysis.map_report(mapspec, args.trials, seed, perturb), args)


_COMMANDS = {
    "keygen": cmd_keygen,
    "encrypt": cmd_encrypt,
    "decrypt": cmd_decrypt,
    "analyze-dist": cmd_analyze_dist,
    "analyze-error": cmd_analyze_error,
    "analyze-map": cmd_analyze_map,
}


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        _COMMANDS[args.command](args)
    except (BaptistaError, ValueError, UsageError, OSError) as exc:
        print(f"baptista {args.command}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
