"""Statistics of Baptista-type ciphers.

Closed-form decryption probabilities for the masked cipher, Monte Carlo
harnesses that measure the same quantities on real encryptions, and
diagnostics of the chaotic maps (bin occupancy, autocorrelation).

All Monte Carlo runs are driven by a master seed; trial ``t`` uses a seed
derived from ``(master, t)`` only, so results do not depend on run order.
"""

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from baptista import _kernels as K
from baptista.chaos import OrbitState, PerturbConfig, orbit
from baptista.ciphers import Variant, search_cap, f_be
from baptista.errors import DegenerateOrbitError, InsufficientDataError

ALPHA = 0.01
MIN_COUNT_SAMPLES = 10_000
MIN_ERROR_TRIALS = 10_000


# closed forms

def pc_single(count, n_bits, n0):
    """Probability that first-match decryption recovers ``count``."""
    if count < n0:
        raise ValueError("count must be at least n0")
    return (1.0 - 2.0**-n_bits) ** (count - n0)


def pc_first(S, n_bits, n0, nmax, p=None):
    """Probability that the first character decrypts correctly.

    ``p`` is the per-interval hit probability, ``1/S`` by default.
    """
    if S < 2:
        raise ValueError("S must be at least 2")
    p = 1.0 / S if p is None else p
    q = (1.0 - p) * (1.0 - 2.0**-n_bits)
    return p * (1.0 - q ** (nmax - n0)) / (1.0 - q)


def pc_position(i, pc1):
    """Probability that character ``i`` (1-based) decrypts correctly."""
    if not 0.0 <= pc1 <= 1.0:
        raise ValueError("pc1 must be a probability")
    if i < 1:
        raise ValueError("positions start at 1")
    return pc1**i


def random_guess_position(pc1, S):
    """First position where decryption is worse than guessing a symbol."""
    if pc1 >= 1.0:
        return None
    return math.floor(math.log(1.0 / S) / math.log(pc1)) + 1


def geometric_entropy_bits(p):
    """Entropy in bits of a geometric law ``P{j} = p (1-p)**j``."""
    return (-(1.0 - p) * math.log2(1.0 - p) - p * math.log2(p)) / p


def overflow_probability(p, n0, nmax):
    """Probability that a count exceeds ``nmax``."""
    return (1.0 - p) ** (nmax - n0)


# reports

@dataclass
class ChiSquare:
    statistic: float
    dof: int
    p_value: float
    alpha: float = ALPHA

    @property
    def passed(self):
        return self.p_value >= self.alpha


@dataclass
class AnalysisReport:
    """Result of one analysis run.

    ``histogram`` counts always sum to ``samples``. Error-rate fields are
    filled by the decryption harness; ``theory`` holds the matching closed
    form values per position.
    """

    title: str
    samples: int = 0
    histogram: np.ndarray = None
    bin_labels: list = None
    expected: np.ndarray = None
    chi_square: ChiSquare = None
    positions: np.ndarray = None
    correct_rates: np.ndarray = None
    ci_low: np.ndarray = None
    ci_high: np.ndarray = None
    theory: np.ndarray = None
    values: dict = field(default_factory=dict)

    def table(self):
        out = [self.title, "=" * len(self.title)]
        for name, value in self.values.items():
            out.append(f"{name:<28} {_fmt(value)}")
        if self.chi_square is not None:
            c = self.chi_square
            verdict = "pass" if c.passed else "FAIL"
            out.append(f"{'chi-square':<28} {c.statistic:.2f} (dof {c.dof}, p = {c.p_value:.4g}, "
                       f"{verdict} at {c.alpha:g})")
        if self.positions is not None:
            out.append("")
            out.append(f"{'position':>8} {'correct':>10} {'ci_low':>10} {'ci_high':>10} {'theory':>10}")
            for row in zip(self.positions, self.correct_rates, self.ci_low, self.ci_high, self.theory):
                out.append(f"{row[0]:>8d} " + " ".join(f"{v:>10.6f}" for v in row[1:]))
        return "\n".join(out)

    def rows(self):
        if self.positions is not None:
            header = ["position", "correct_rate", "ci_low", "ci_high", "theory"]
            body = zip(self.positions, self.correct_rates, self.ci_low, self.ci_high, self.theory)
        elif self.histogram is not None:
            header = ["bin", "observed", "expected"]
            exp = self.expected if self.expected is not None else [""] * len(self.histogram)
            labels = self.bin_labels or list(range(len(self.histogram)))
            body = zip(labels, self.histogram, exp)
        else:
            header, body = ["name", "value"], self.values.items()
        return header, [list(r) for r in body]

    def to_csv(self, fh=None):
        header, body = self.rows()
        buf = fh or io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(body)
        return None if fh else buf.getvalue()


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def wilson_interval(successes, n, z=3.0):
    """Wilson score interval for a binomial proportion."""
    successes = np.asarray(successes, dtype=float)
    phat = successes / n
    denom = 1.0 + z * z / n
    centre = (phat + z * z / (2 * n)) / denom
    half = z * np.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / denom
    return np.clip(centre - half, 0.0, 1.0), np.clip(centre + half, 0.0, 1.0)


# map diagnostics

def autocorrelation(x, max_lag):
    """Normalized sample autocovariance at lags ``1..max_lag``."""
    x = np.asarray(x, dtype=float)
    if x.size <= 2 * max_lag:
        raise InsufficientDataError("orbit must be much longer than max_lag")
    xc = x - x.mean()
    var = np.mean(xc * xc)
    if var == 0.0:
        raise DegenerateOrbitError("orbit has zero variance")
    n = x.size
    return np.array([np.dot(xc[: n - k], xc[k:]) / (n - k) / var for k in range(1, max_lag + 1)])


def chi_square_uniform(values, bins, lo, hi, alpha=ALPHA):
    """Chi-square test of equal occupancy over ``bins`` equal-width bins."""
    hist = np.histogram(values, bins=bins, range=(lo, hi))[0]
    stat, pv = stats.chisquare(hist)
    return hist, ChiSquare(float(stat), bins - 1, float(pv), alpha)


def occupancy_test(values, bins=256, lo=0.0, hi=1.0, sigma=5.0):
    """Per-bin occupancy against the uniform expectation.

    Passes when every bin lies within ``sigma`` binomial standard
    deviations of ``n / bins``.
    """
    values = np.asarray(values, dtype=float)
    hist, chi = chi_square_uniform(values, bins, lo, hi)
    n = values.size
    e = n / bins
    z = (hist - e) / math.sqrt(e * (1.0 - 1.0 / bins))
    rep = AnalysisReport(f"bin occupancy ({bins} bins)", n, hist, None,
                         np.full(bins, e), chi)
    rep.values.update(max_abs_z=float(np.abs(z).max()), sigma_bound=sigma,
                      uniform=bool(np.abs(z).max() < sigma))
    return rep


def occupancy_hit_probability(mapspec, partition, n=10**6, seed=1, perturb=None, x0=None):
    """Share of orbit iterates in the visiting interval divided by ``S``.

    This is the invariant measure of one interval. Waiting times are not
    exactly geometric in it (visits cluster near fixed points), so the
    count law is better described by :func:`hit_probability`.
    """
    x0 = x0 if x0 is not None else (np.random.default_rng(seed).random() * 0.98 + 0.01)
    perturb = perturb or PerturbConfig.off()
    if perturb.enabled:
        perturb = PerturbConfig(True, perturb.delta, seed & (2**64 - 1), perturb.magnitude_bits)
    xs = orbit(mapspec, x0, n, perturb)
    inside = np.count_nonzero((xs >= partition.x_min) & (xs < partition.x_max))
    return inside / n / partition.S


def interval_occupancy(mapspec, partition, n=10**6, seed=1, perturb=None):
    """Per-interval visit frequencies of one orbit, plus a uniformity test."""
    x0 = np.random.default_rng(seed).random() * 0.98 + 0.01
    xs = orbit(mapspec, x0, n, perturb)
    xs = xs[(xs >= partition.x_min) & (xs < partition.x_max)]
    hist, chi = chi_square_uniform(xs, partition.S, partition.x_min, partition.x_max)
    rep = AnalysisReport("epsilon-interval occupancy", int(xs.size), hist, None,
                         np.full(partition.S, xs.size / partition.S), chi)
    freq = hist / n
    rep.values.update(min_hit_probability=float(freq.min()), max_hit_probability=float(freq.max()),
                      mean_hit_probability=float(freq.mean()))
    return rep


def map_report(mapspec, n=10**6, seed=1, perturb=None, bins=256, max_lag=10):
    """Occupancy, autocorrelation and (if piecewise linear) Lyapunov exponent."""
    from baptista.chaos import MapKind, lyapunov_pwlcm

    x0 = np.random.default_rng(seed).random() * 0.98 + 0.01
    xs = orbit(mapspec, x0, n, perturb)
    rep = occupancy_test(xs, bins)
    rep.title = f"{mapspec.kind.value} map diagnostics"
    tau = autocorrelation(xs, max_lag)
    for k, t in enumerate(tau, 1):
        rep.values[f"autocorrelation[{k}]"] = float(t)
    if mapspec.kind is not MapKind.LOGISTIC:
        rep.values["lyapunov"] = lyapunov_pwlcm(mapspec)
    return rep


# cipher statistics


def _kernel_setup(key, partition, perturb):
    perturb = key.perturb if perturb is None else perturb
    return (*key.map.kernel_args(), *perturb.kernel_args(), *partition.kernel_args())


def sample_counts(key, partition, trials, seed=0, perturb=None):
    """Counts of independent single-symbol original encryptions.

    Each trial draws a fresh initial condition, perturbation seed and
    target symbol; the map, partition and ``n0`` come from ``key``.
    """
    counts = K.sample_counts(int(trials), np.uint64(seed), *_kernel_setup(key, partition, perturb),
                             key.n0, search_cap(key, Variant.ORIGINAL))
    return counts[counts >= 0]


def sample_tokens(key, partition, trials, seed=0, perturb=None):
    """``(counts, masked_tokens)`` of independent single-symbol encryptions."""
    counts, tokens = K.sample_tokens(int(trials), np.uint64(seed),
                                     *_kernel_setup(key, partition, perturb),
                                     key.n0, search_cap(key, Variant.ORIGINAL), key.n_bits)
    ok = counts >= 0
    return counts[ok], tokens[ok]


def hit_probability(key, partition, trials=100_000, seed=0, perturb=None):
    """Per-step hit probability fitted to sampled original-cipher counts.

    ``1 / (1 + mean(C - n0))``, the maximum likelihood estimate of the
    geometric count law.
    """
    counts = sample_counts(key, partition, trials, seed, perturb)
    return 1.0 / (1.0 + float(np.mean(counts - key.n0)))


def _geometric_bins(p, n, max_bins=60):
    nb = int(max(2, min(max_bins, n // 50)))
    log1p = math.log1p(-p)
    edges = [0]
    for i in range(1, nb):
        # smallest j with P{J < j} >= i/nb
        j = math.ceil(math.log1p(-i / nb) / log1p)
        if j > edges[-1]:
            edges.append(j)
    return np.array(edges, dtype=np.int64)


def count_distribution_test(samples, S, n0, alpha=ALPHA, min_samples=MIN_COUNT_SAMPLES):
    """Chi-square fit of ``count - n0`` to a geometric law.

    The success probability is estimated from the sample mean. Bins are
    equiprobable under the fitted law; the last bin is open.
    """
    samples = np.asarray(samples, dtype=np.int64)
    if samples.size < min_samples:
        raise InsufficientDataError(f"need at least {min_samples} samples, got {samples.size}")
    j = samples - n0
    if j.min() < 0:
        raise ValueError("samples below n0")
    mean = float(j.mean())
    p_hat = 1.0 / (1.0 + mean)
    edges = _geometric_bins(p_hat, samples.size)
    observed = np.bincount(np.searchsorted(edges, j, side="right") - 1, minlength=edges.size)
    surv = (1.0 - p_hat) ** edges.astype(float)
    probs = surv - np.append(surv[1:], 0.0)
    expected = probs * samples.size
    stat = float(np.sum((observed - expected) ** 2 / expected))
    dof = edges.size - 2
    chi = ChiSquare(stat, dof, float(stats.chi2.sf(stat, dof)), alpha)
    labels = [f"{n0 + a}-{n0 + b - 1}" for a, b in zip(edges[:-1], edges[1:])] + [f">={n0 + edges[-1]}"]
    rep = AnalysisReport("count distribution vs geometric", int(samples.size), observed, labels,
                         expected, chi)
    rep.values.update(
        mean_count=float(samples.mean()),
        p_hat=p_hat,
        p_uniform=1.0 / S,
        p_hat_times_S=p_hat * S,
        mean_stderr=float(samples.std(ddof=1) / math.sqrt(samples.size)),
        exponential_decay=chi.passed,
    )
    return rep


def masked_error_rate(key, partition, trials, message_len, seed=0, variant=Variant.MASKED,
                      p=None, perturb=None, min_trials=MIN_ERROR_TRIALS, z=3.0):
    """Per-position correct-decryption rates of random messages.

    Every trial encrypts a fresh random message from a fresh initial state
    and decrypts it with the first-match (masked) or occurrence-counting
    (rectified) receiver. A receiver that gives up (scan cap) counts every
    remaining position as wrong. The theory curve uses ``p``, measured with
    :func:`hit_probability` when not given.
    """
    if trials < min_trials:
        raise InsufficientDataError(f"need at least {min_trials} trials")
    variant = Variant(variant)
    correct, multi, status = K.error_trials(
        K.MODE_RECTIFIED if variant is Variant.RECTIFIED else K.MODE_MASKED,
        int(trials), int(message_len), np.uint64(seed), *_kernel_setup(key, partition, perturb),
        key.n0, search_cap(key, variant), key.n_bits, key.mask_enabled)
    encrypted = (status != K.SEARCH_LIMIT) & (status != K.COUNTER_OVERFLOW)
    correct = correct[encrypted]
    n = correct.shape[0]
    hits = correct.sum(axis=0)
    rates = hits / n
    lo, hi = wilson_interval(hits, n, z)
    if p is None:
        p = hit_probability(key, partition, 100_000, seed=seed ^ 0x5EED, perturb=perturb)
    pc1 = pc_first(partition.S, key.n_bits, key.n0, key.nmax, p)
    positions = np.arange(1, message_len + 1)
    theory = pc1 ** positions
    rep = AnalysisReport(f"{variant.value} cipher decryption ({n} trials x {message_len})", n,
                         positions=positions, correct_rates=rates, ci_low=lo, ci_high=hi,
                         theory=theory)
    wrong = correct == 0
    if message_len > 1:
        prev_wrong = wrong[:, :-1]
        n_prev = int(prev_wrong.sum())
        follow = float((wrong[:, 1:] & prev_wrong).sum() / n_prev) if n_prev else float("nan")
    else:
        follow = float("nan")
    rep.values.update(
        p_hit=p,
        pc1_theory=pc1,
        first_error_rate=float(1.0 - rates[0]),
        first_error_theory=1.0 - pc1,
        first_error_sigma=math.sqrt(pc1 * (1.0 - pc1) / n),
        wrong_after_wrong=follow,
        multi_occurrence_fraction=float(multi[encrypted].mean()),
        gave_up_trials=int(np.count_nonzero(status[encrypted] == K.DESYNC)),
        encryption_failures=int(np.count_nonzero(~encrypted)),
        total_errors=int(wrong.sum()),
    )
    return rep


def mask_uniformity_test(key, partition, trials, seed=0, bins=256, alpha=ALPHA):
    """Coarse-bin uniformity of masked tokens and, as a control, raw counts.

    Tokens and counts are binned by their top ``log2(bins)`` bits within
    the ``n_bits`` word.
    """
    counts, tokens = sample_tokens(key, partition, trials, seed)
    shift = key.n_bits - int(round(math.log2(bins)))
    masked = np.bincount(tokens >> shift, minlength=bins)
    raw = np.bincount(np.minimum(counts, (1 << key.n_bits) - 1) >> shift, minlength=bins)
    cm = stats.chisquare(masked)
    cr = stats.chisquare(raw)
    rep = AnalysisReport("masked token uniformity", int(tokens.size), masked, None,
                         np.full(bins, tokens.size / bins),
                         ChiSquare(float(cm.statistic), bins - 1, float(cm.pvalue), alpha))
    rep.values.update(
        unmasked_chi_square=float(cr.statistic),
        unmasked_p_value=float(cr.pvalue),
        unmasked_uniform=bool(cr.pvalue >= alpha),
    )
    return rep


def mask_independence_audit(mapspec, n_bits, n=10**6, seed=1, perturb=None, lag=1):
    """Checks behind the independence assumption of the error model.

    Reports uniformity of ``f_be`` over an orbit and the correlation of
    keystream words ``lag`` steps apart. Exact repeats at that lag are
    compared to the ``2**-n_bits`` expected from independent words.
    """
    perturb = perturb or PerturbConfig.off()
    x0 = np.random.default_rng(seed).random() * 0.98 + 0.01
    st = OrbitState.start(x0, perturb)
    words = K.fbe_orbit(*st.kernel_args(), int(n), n_bits, *mapspec.kernel_args(),
                        *perturb.kernel_args())
    hist, chi = chi_square_uniform(words >> (n_bits - 8), 256, 0, 256)
    a, b = words[:-lag].astype(float), words[lag:].astype(float)
    rep = AnalysisReport("keystream independence audit", int(n), hist, None,
                         np.full(256, n / 256), chi)
    rep.values.update(
        lag=lag,
        correlation=float(np.corrcoef(a, b)[0, 1]),
        repeat_rate=float(np.mean(words[:-lag] == words[lag:])),
        repeat_rate_independent=2.0**-n_bits,
    )
    return rep


__all__ = [
    "ChiSquare",
    "AnalysisReport",
    "pc_single",
    "pc_first",
    "pc_position",
    "random_guess_position",
    "geometric_entropy_bits",
    "overflow_probability",
    "wilson_interval",
    "autocorrelation",
    "chi_square_uniform",
    "occupancy_test",
    "hit_probability",
    "occupancy_hit_probability",
    "interval_occupancy",
    "map_report",
    "sample_counts",
    "sample_tokens",
    "count_distribution_test",
    "masked_error_rate",
    "mask_uniformity_test",
    "mask_independence_audit",
    "f_be",
]
