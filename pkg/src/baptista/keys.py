"""Key material and its flat text file format.

A key file is UTF-8 text with one ``name = value`` pair per line. Blank lines
and lines starting with ``#`` are ignored; unknown or repeated names are
rejected. Recognised names::

    map_kind       logistic | skewtent | pwlcm
    b              logistic parameter           (map_kind = logistic)
    p              skew tent apex               (map_kind = skewtent)
    breakpoints    end:anchor,end:anchor,...    (map_kind = pwlcm)
    x0             initial condition
    assoc_seed     hex, 128-bit seed of the association shuffle
    eta            count selection threshold in [0, 1)
    n0, nmax       count bounds
    n_bits         ciphertext token width
    perturb_delta  perturbation period, 0 disables perturbation
    perturb_seed   hex, 64-bit
    perturb_bits   perturbation magnitude bits
    mask_enabled   true | false

Reals are written with ``repr`` so a file round-trips bit-exactly.
"""

import secrets
from dataclasses import dataclass, field

from baptista import _prng
from baptista.chaos import MapKind, MapSpec, PerturbConfig
from baptista.errors import KeyFileError

N0_DEFAULT = 250
NMAX_DEFAULT = 65532
N_BITS_DEFAULT = 16
N_BITS_RANGE = (8, 24)


@dataclass(frozen=True)
class KeyMaterial:
    map: MapSpec
    x0: float
    assoc_seed: int
    eta: float = 0.0
    n0: int = N0_DEFAULT
    nmax: int = NMAX_DEFAULT
    perturb: PerturbConfig = field(default_factory=PerturbConfig)
    mask_enabled: bool = True
    n_bits: int = N_BITS_DEFAULT

    def __post_init__(self):
        lo, hi = N_BITS_RANGE
        if not (lo <= self.n_bits <= hi):
            raise ValueError(f"n_bits must lie in [{lo}, {hi}]")
        if not (1 <= self.n0 < self.nmax < 2**self.n_bits):
            raise ValueError("need 1 <= n0 < nmax < 2**n_bits")
        if not (0.0 <= self.eta < 1.0):
            # kappa is drawn from [0, 1), so eta = 1 would reject every match
            raise ValueError("eta must lie in [0, 1)")
        if not (0.0 <= self.x0 <= 1.0):
            raise ValueError("x0 outside the defining interval [0, 1]")
        if not (0 <= self.assoc_seed < 2**128):
            raise ValueError("assoc_seed must be a 128-bit unsigned integer")


def generate_key(seed=None, map_kind=MapKind.SKEW_TENT, **overrides):
    """Key with random secrets and default public parameters.

    With ``seed`` given, every secret is derived from it (domain separated),
    so equal seeds give equal keys.
    """
    if seed is None:
        seed = secrets.randbits(128)
    map_kind = MapKind(map_kind)

    def unit(label):
        # (0, 1), excluding the endpoints
        return (_prng.derive_seed(seed, label) >> 11 | 1) * 2.0**-53

    if map_kind is MapKind.LOGISTIC:
        mapspec = MapSpec.logistic(3.99 + 0.01 * unit("b"))
    elif map_kind is MapKind.SKEW_TENT:
        mapspec = MapSpec.skew_tent(0.1 + 0.8 * unit("p"))
    else:
        cuts = sorted(0.1 + 0.8 * unit(f"cut{i}") for i in range(3))
        anchors = [_prng.derive_seed(seed, f"anchor{i}") & 1 for i in range(4)]
        mapspec = MapSpec.pwlcm(zip(cuts + [1.0], anchors))
    fields = dict(
        map=mapspec,
        x0=unit("x0"),
        assoc_seed=_prng.derive_seed(seed, "assoc", bits=128),
        perturb=PerturbConfig(True, 16, _prng.derive_seed(seed, "perturb"), 8),
    )
    fields.update(overrides)
    return KeyMaterial(**fields)


def format_key(key):
    lines = [f"map_kind = {key.map.kind.value}"]
    if key.map.kind is MapKind.LOGISTIC:
        lines.append(f"b = {key.map.b!r}")
    elif key.map.kind is MapKind.SKEW_TENT:
        lines.append(f"p = {key.map.p!r}")
    else:
        bps = ",".join(f"{e!r}:{a}" for e, a in key.map.breakpoints)
        lines.append(f"breakpoints = {bps}")
    pert = key.perturb
    lines += [
        f"x0 = {key.x0!r}",
        f"assoc_seed = {key.assoc_seed:#034x}",
        f"eta = {key.eta!r}",
        f"n0 = {key.n0}",
        f"nmax = {key.nmax}",
        f"n_bits = {key.n_bits}",
        f"perturb_delta = {pert.delta if pert.enabled else 0}",
        f"perturb_seed = {pert.prng_seed:#018x}",
        f"perturb_bits = {pert.magnitude_bits}",
        f"mask_enabled = {'true' if key.mask_enabled else 'false'}",
    ]
    return "\n".join(lines) + "\n"


_MAP_PARAM = {MapKind.LOGISTIC: "b", MapKind.SKEW_TENT: "p", MapKind.PWLCM: "breakpoints"}
_COMMON = ("x0", "assoc_seed", "eta", "n0", "nmax", "n_bits",
           "perturb_delta", "perturb_seed", "perturb_bits", "mask_enabled")
_KNOWN = {"map_kind", "b", "p", "breakpoints", *_COMMON}


def _parse_bool(text):
    if text in ("true", "1", "yes"):
        return True
    if text in ("false", "0", "no"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_breakpoints(text):
    out = []
    for item in text.split(","):
        end, anchor = item.split(":")
        out.append((float(end), int(anchor)))
    return out


def parse_key(text):
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        name, sep, value = line.partition("=")
        name, value = name.strip(), value.strip()
        if not sep or not name:
            raise KeyFileError(f"line {lineno}: expected 'name = value'")
        if name not in _KNOWN:
            raise KeyFileError(f"line {lineno}: unknown key {name!r}")
        if name in entries:
            raise KeyFileError(f"line {lineno}: duplicate key {name!r}")
        entries[name] = value

    try:
        kind = MapKind(entries["map_kind"])
    except KeyError:
        raise KeyFileError("missing key 'map_kind'") from None
    except ValueError:
        raise KeyFileError(f"unknown map_kind {entries['map_kind']!r}") from None
    wanted = _MAP_PARAM[kind]
    for other in set(_MAP_PARAM.values()) - {wanted}:
        if other in entries:
            raise KeyFileError(f"key {other!r} does not apply to map_kind {kind.value}")
    missing = [n for n in (wanted, *_COMMON) if n not in entries]
    if missing:
        raise KeyFileError(f"missing keys: {', '.join(missing)}")

    try:
        if kind is MapKind.LOGISTIC:
            mapspec = MapSpec.logistic(float(entries["b"]))
        elif kind is MapKind.SKEW_TENT:
            mapspec = MapSpec.skew_tent(float(entries["p"]))
        else:
            mapspec = MapSpec.pwlcm(_parse_breakpoints(entries["breakpoints"]))
        delta = int(entries["perturb_delta"])
        perturb = PerturbConfig(
            enabled=delta > 0,
            delta=delta if delta > 0 else 16,
            prng_seed=int(entries["perturb_seed"], 16),
            magnitude_bits=int(entries["perturb_bits"]),
        )
        return KeyMaterial(
            map=mapspec,
            x0=float(entries["x0"]),
            assoc_seed=int(entries["assoc_seed"], 16),
            eta=float(entries["eta"]),
            n0=int(entries["n0"]),
            nmax=int(entries["nmax"]),
            perturb=perturb,
            mask_enabled=_parse_bool(entries["mask_enabled"]),
            n_bits=int(entries["n_bits"]),
        )
    except ValueError as exc:
        raise KeyFileError(str(exc)) from exc


def read_key_file(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except UnicodeDecodeError as exc:
        raise KeyFileError(f"{path}: not UTF-8 text") from exc
    return parse_key(text)


def write_key_file(path, key):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_key(key))
