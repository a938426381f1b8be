"""
Detection chain arithmetic and Monte-Carlo coincidence counting
"""

import logging
import math
from typing import Optional, Tuple

import numpy as np
from scipy.stats import norm

from src.schema.data_models import CoincidenceHistogram, CoincidenceRates, DetectionChain
from src.tools.scheduler import Scheduler
from src.utils.errors import AnalysisError, DomainError, SolverError

logger = logging.getLogger(__name__)

MAX_EXPECTED_EVENTS = 1e9
PEAK_TO_MEDIAN = 5.0


def noise_rates(chain: DetectionChain, power_in: float) -> Tuple[float, float]:
    """Uncorrelated counts/s per arm: linear + quadratic pump-driven noise plus dark counts"""
    signal = (chain.noise_linear_signal * power_in
              + chain.noise_quadratic_signal * power_in ** 2 + chain.dark_count_rate)
    idler = (chain.noise_linear_idler * power_in
             + chain.noise_quadratic_idler * power_in ** 2 + chain.dark_count_rate)
    return signal, idler


def detected_rates(pair_rate: float, chain: DetectionChain, power_in: float,
                   include_noise: bool = True) -> CoincidenceRates:
    """Singles and true coincidences seen by the detectors"""
    if pair_rate < 0:
        raise DomainError(f"pair rate must be non-negative, got {pair_rate}")
    t_s, t_i = chain.signal_transmission, chain.idler_transmission
    pair_signal, pair_idler = pair_rate * t_s, pair_rate * t_i
    noise_signal, noise_idler = noise_rates(chain, power_in) if include_noise else (0.0, 0.0)
    return CoincidenceRates(singles_signal=pair_signal + noise_signal,
                            singles_idler=pair_idler + noise_idler,
                            true_coincidences=pair_rate * t_s * t_i,
                            pair_singles_signal=pair_signal,
                            pair_singles_idler=pair_idler)


def infer_internal_rate(true_coincidences: float, chain: DetectionChain) -> float:
    """Internal pair rate from a measured coincidence rate and the arm losses"""
    return true_coincidences / (chain.signal_transmission * chain.idler_transmission)


def coincidence_window(bin_width: float, jitter: float) -> Tuple[float, int]:
    """(fraction of true coincidences inside the peak FWHM window, window width in bins)

    The signal-minus-idler delay of a pair is Gaussian with sigma sqrt(2) * jitter;
    the window holds the zero-delay bin and every neighbour at or above half its share.
    """
    if jitter <= 0 or bin_width <= 0:
        return 1.0, 1
    spread = math.sqrt(2) * jitter

    def share(k: int) -> float:
        return float(norm.cdf((k + 0.5) * bin_width / spread)
                     - norm.cdf((k - 0.5) * bin_width / spread))

    peak = share(0)
    captured, k = peak, 1
    while share(k) >= 0.5 * peak:
        captured += 2 * share(k)
        k += 1
    return captured, 2 * k - 1


def car_analytic(pair_rate: float, chain: DetectionChain,
                 power_in: float) -> Tuple[float, float]:
    """(CAR with noise and dark counts, CAR from multi-pair emission alone)

    True coincidences are counted inside the jitter-broadened peak window and
    accidentals over that window's width, the same window the histogram CAR uses.
    """
    if pair_rate <= 0:
        raise DomainError(f"pair rate must be positive, got {pair_rate}")
    captured, window_bins = coincidence_window(chain.bin_width_s, chain.jitter_sigma_s)
    results = []
    for include_noise in (True, False):
        rates = detected_rates(pair_rate, chain, power_in, include_noise=include_noise)
        accidental = rates.singles_signal * rates.singles_idler * chain.bin_width_s * window_bins
        results.append(math.inf if accidental == 0
                       else captured * rates.true_coincidences / accidental)
    return results[0], results[1]


def _histogram_edges(bin_width: float, half_range_bins: int) -> np.ndarray:
    # bins centered on k * bin_width, k = -half_range_bins .. half_range_bins
    return (np.arange(-half_range_bins, half_range_bins + 2) - 0.5) * bin_width


def _delays(signal: np.ndarray, idler: np.ndarray, half_range: float) -> np.ndarray:
    """All signal-minus-idler delays within +-half_range, both inputs sorted"""
    low = np.searchsorted(idler, signal - half_range, side="left")
    high = np.searchsorted(idler, signal + half_range, side="right")
    counts = high - low
    total = int(counts.sum())
    if total == 0:
        return np.empty(0)
    signal_index = np.repeat(np.arange(signal.size), counts)
    starts = np.repeat(np.cumsum(counts) - counts, counts)
    idler_index = np.repeat(low, counts) + (np.arange(total) - starts)
    return signal[signal_index] - idler[idler_index]


def _simulate_chunk(rng: np.random.Generator, duration: float, pair_rate: float,
                    t_s: float, t_i: float, noise: Tuple[float, float], jitter: float,
                    edges: np.ndarray) -> np.ndarray:
    emissions = rng.uniform(0.0, duration, rng.poisson(pair_rate * duration))
    arms = []
    for transmission, noise_rate in ((t_s, noise[0]), (t_i, noise[1])):
        survived = emissions[rng.random(emissions.size) < transmission]
        if jitter > 0:
            survived = survived + rng.normal(0.0, jitter, survived.size)
        background = rng.uniform(0.0, duration, rng.poisson(noise_rate * duration))
        arms.append(np.sort(np.concatenate([survived, background])))

    delays = _delays(arms[0], arms[1], edges[-1])
    counts, _ = np.histogram(delays, bins=edges)
    return counts


def simulate_histogram(rates: CoincidenceRates, chain: DetectionChain, duration: float,
                       seed: Optional[int], half_range_bins: int = 500,
                       max_chunk_events: float = 5e6,
                       scheduler: Optional[Scheduler] = None) -> CoincidenceHistogram:
    """Monte-Carlo start-stop histogram of signal-minus-idler delays

    Pair photons survive each arm independently and get Gaussian jitter;
    noise and dark counts are independent Poisson streams. The acquisition is
    split into independently seeded chunks summed in order.
    """
    if duration <= 0:
        raise DomainError(f"duration must be positive, got {duration}")
    if half_range_bins < 1:
        raise DomainError(f"half_range_bins must be >= 1, got {half_range_bins}")

    if rates.true_coincidences > 0:
        pair_rate = rates.pair_singles_signal * rates.pair_singles_idler / rates.true_coincidences
        t_s = rates.true_coincidences / rates.pair_singles_idler
        t_i = rates.true_coincidences / rates.pair_singles_signal
    else:
        pair_rate, t_s, t_i = 0.0, 0.0, 0.0
    noise = (rates.singles_signal - rates.pair_singles_signal,
             rates.singles_idler - rates.pair_singles_idler)

    event_rate = pair_rate + noise[0] + noise[1]
    expected = event_rate * duration
    if expected > MAX_EXPECTED_EVENTS:
        raise SolverError(f"{expected:.3e} expected events exceed the {MAX_EXPECTED_EVENTS:.0e} "
                          "limit; split the acquisition into shorter runs")

    scheduler = scheduler or Scheduler()
    chunks = scheduler.plan_chunks(duration, event_rate, max_chunk_events)
    streams = np.random.SeedSequence(seed).spawn(len(chunks))
    edges = _histogram_edges(chain.bin_width_s, half_range_bins)
    logger.info(f"simulating {duration} s in {len(chunks)} chunks ({expected:.3e} events)")

    def run(index: int) -> np.ndarray:
        return _simulate_chunk(np.random.default_rng(streams[index]), chunks[index],
                               pair_rate, t_s, t_i, noise, chain.jitter_sigma_s, edges)

    counts = np.zeros(edges.size - 1, dtype=np.int64)
    for chunk_counts in scheduler.map_ordered(run, range(len(chunks))):
        counts += chunk_counts
    return CoincidenceHistogram(bin_edges=edges, counts=counts, acquisition_time_s=duration)


def peak_window(counts: np.ndarray) -> Tuple[int, int]:
    """Contiguous bins around the peak at or above half the background-subtracted maximum"""
    counts = np.asarray(counts, dtype=float)
    peak = int(np.argmax(counts))
    level = np.median(counts)
    if counts[peak] <= PEAK_TO_MEDIAN * level or counts[peak] <= 0:
        raise AnalysisError(f"no detectable coincidence peak (peak {counts[peak]:.0f}, "
                            f"median {level:.1f})")
    half = level + 0.5 * (counts[peak] - level)
    start, stop = peak, peak
    while start > 0 and counts[start - 1] >= half:
        start -= 1
    while stop < counts.size - 1 and counts[stop + 1] >= half:
        stop += 1
    return start, stop + 1


def car(hist: CoincidenceHistogram) -> float:
    """Background-subtracted coincidences within the peak FWHM over the background there"""
    counts = np.asarray(hist.counts, dtype=float)
    start, stop = peak_window(counts)
    off_peak = np.concatenate([counts[:start], counts[stop:]])
    level = np.median(off_peak) if off_peak.size else 0.0
    background = level * (stop - start)
    in_window = counts[start:stop].sum()
    if background <= 0:
        logger.warning("zero background under the coincidence peak; CAR is unbounded")
        return math.inf
    return float((in_window - background) / background)
