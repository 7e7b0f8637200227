"""Vocal stress timeline from session audio.

Pitch is tracked with a normalized autocorrelation (NCCF) over a 60-400 Hz
lag band; a frame is voiced when the peak clears the voicing threshold and
the frame has audible energy. Pitch frames aggregate into windows of
f0 mean/std, jitter and RMS energy, which are scored against statistics of
a calm baseline period: positive z-deviations combine into a logistic
score in [0, 1], thresholded at 0.5 for the binary stress flag.
"""
from __future__ import annotations

import bisect
import math
import statistics
import wave
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import ClipTooShort, MissingBaseline, OutOfRangeScore, SchemaError
from .ingest import StressConfig

MIN_SAMPLE_RATE_HZ = 8000
_STD_FLOOR = 1e-6


@dataclass(frozen=True)
class AudioClip:
    sample_rate_hz: int
    samples: np.ndarray  # mono float64 in [-1, 1]

    def __post_init__(self):
        if self.sample_rate_hz < MIN_SAMPLE_RATE_HZ:
            raise ValueError(f"sample rate must be >= {MIN_SAMPLE_RATE_HZ} Hz")
        if len(self.samples) == 0:
            raise ValueError("clip must be non-empty")

    @property
    def duration_ms(self) -> float:
        return len(self.samples) * 1000.0 / self.sample_rate_hz


@dataclass(frozen=True)
class PitchFrame:
    t_ms: int
    rms_energy: float
    autocorr_peak: float
    f0_hz: Optional[float] = None  # absent = unvoiced

    @property
    def voiced(self) -> bool:
        return self.f0_hz is not None


@dataclass(frozen=True)
class StressWindowFeatures:
    window_start_ms: int
    window_end_ms: int
    voiced_fraction: float
    energy_rms: float
    f0_mean: Optional[float] = None
    f0_std: Optional[float] = None
    jitter: Optional[float] = None

    @property
    def has_features(self) -> bool:
        return self.f0_mean is not None


@dataclass(frozen=True)
class BaselineStats:
    f0_mean: tuple[float, float]  # (mean, std) over baseline windows
    jitter: tuple[float, float]
    energy_rms: tuple[float, float]


@dataclass(frozen=True)
class StressSample:
    t_ms: int
    score: float
    binary: int
    gap: bool = False


# -- audio I/O ------------------------------------------------------------------

def read_wav(path: str) -> AudioClip:
    """Load a PCM-16 RIFF/WAVE file; stereo is averaged to mono."""
    with wave.open(path, "rb") as wf:
        if wf.getsampwidth() != 2:
            raise SchemaError("audio.wav", "only 16-bit PCM is supported")
        rate = wf.getframerate()
        channels = wf.getnchannels()
        raw = wf.readframes(wf.getnframes())
    data = np.frombuffer(raw, dtype="<i2").astype(np.float64) / 32768.0
    if channels > 1:
        data = data[: len(data) - len(data) % channels].reshape(-1, channels).mean(axis=1)
    if rate < MIN_SAMPLE_RATE_HZ:
        raise SchemaError("audio.wav", f"sample rate must be >= {MIN_SAMPLE_RATE_HZ} Hz")
    if len(data) == 0:
        raise SchemaError("audio.wav", "no audio frames")
    return AudioClip(sample_rate_hz=rate, samples=data)


def write_wav(path: str, clip: AudioClip) -> None:
    pcm = np.clip(np.round(clip.samples * 32767.0), -32768, 32767).astype("<i2")
    with wave.open(path, "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(2)
        wf.setframerate(clip.sample_rate_hz)
        wf.writeframes(pcm.tobytes())


# -- framing and pitch ------------------------------------------------------------

def frame_audio(clip: AudioClip, frame_ms: int = 40, hop_ms: int = 10) -> np.ndarray:
    """Slice the clip into (n_frames, frame_len) windows at hop spacing.

    The trailing partial frame is dropped;
    n_frames = floor((len_ms - frame_ms) / hop_ms) + 1.
    """
    if frame_ms <= 0 or hop_ms <= 0:
        raise ValueError("frame_ms and hop_ms must be positive")
    frame_len = int(round(frame_ms * clip.sample_rate_hz / 1000.0))
    hop_len = int(round(hop_ms * clip.sample_rate_hz / 1000.0))
    n = len(clip.samples)
    if n < frame_len:
        raise ClipTooShort(f"clip of {n} samples shorter than one {frame_len}-sample frame")
    n_frames = (n - frame_len) // hop_len + 1
    idx = np.arange(frame_len)[None, :] + hop_len * np.arange(n_frames)[:, None]
    return clip.samples[idx]


def _lag_band(sample_rate: int, f0_min: float, f0_max: float, frame_len: int) -> tuple[int, int]:
    lag_min = max(1, math.ceil(sample_rate / f0_max))
    lag_max = min(frame_len - 1, math.floor(sample_rate / f0_min))
    return lag_min, lag_max


def _nccf_best(frames: np.ndarray, lag_min: int, lag_max: int) -> tuple[np.ndarray, np.ndarray]:
    """Per frame: (best normalized autocorrelation peak, its lag)."""
    n_frames, frame_len = frames.shape
    nfft = 1
    while nfft < 2 * frame_len:
        nfft <<= 1
    spec = np.fft.rfft(frames, nfft, axis=1)
    acf = np.fft.irfft(spec * np.conj(spec), nfft, axis=1)[:, : lag_max + 1]

    energy = np.cumsum(frames * frames, axis=1)
    total = energy[:, -1]
    lags = np.arange(lag_min, lag_max + 1)
    e_head = energy[:, frame_len - 1 - lags]
    e_tail = total[:, None] - energy[:, lags - 1]
    denom = np.sqrt(e_head * e_tail)
    nccf = np.divide(acf[:, lags], denom, out=np.zeros_like(denom), where=denom > 0)

    # Lags at period multiples can score marginally above the fundamental
    # (integer-lag quantization), so take the smallest local maximum within
    # tolerance of the global peak instead of the argmax.
    left = np.empty_like(nccf)
    left[:, 0] = -np.inf
    left[:, 1:] = nccf[:, :-1]
    right = np.empty_like(nccf)
    right[:, -1] = -np.inf
    right[:, :-1] = nccf[:, 1:]
    is_local_max = (nccf >= left) & (nccf > right)
    best_vals = nccf.max(axis=1)
    qualifies = is_local_max & (nccf >= best_vals[:, None] - 0.01)
    rows = np.arange(n_frames)
    chosen = np.where(qualifies.any(axis=1), np.argmax(qualifies, axis=1), np.argmax(nccf, axis=1))
    peaks = np.clip(nccf[rows, chosen], 0.0, 1.0)
    return peaks, lags[chosen]


def estimate_f0(
    frame: np.ndarray,
    sample_rate: int,
    t_ms: int = 0,
    config: StressConfig | None = None,
) -> PitchFrame:
    """Pitch of one frame; unvoiced when the peak or energy is too low."""
    cfg = config or StressConfig()
    frame = np.asarray(frame, dtype=np.float64)
    rms = float(np.sqrt(np.mean(frame * frame))) if len(frame) else 0.0
    lag_min, lag_max = _lag_band(sample_rate, cfg.f0_min_hz, cfg.f0_max_hz, len(frame))
    if lag_max < lag_min:
        return PitchFrame(t_ms=t_ms, rms_energy=rms, autocorr_peak=0.0)
    peaks, lags = _nccf_best(frame[None, :], lag_min, lag_max)
    peak, lag = float(peaks[0]), int(lags[0])
    if peak >= cfg.voicing_peak and rms >= cfg.energy_floor:
        return PitchFrame(t_ms=t_ms, rms_energy=rms, autocorr_peak=peak, f0_hz=sample_rate / lag)
    return PitchFrame(t_ms=t_ms, rms_energy=rms, autocorr_peak=peak)


def pitch_frames(clip: AudioClip, config: StressConfig | None = None) -> list[PitchFrame]:
    """Pitch-track the whole clip; frames are chunked to bound memory."""
    cfg = config or StressConfig()
    frames = frame_audio(clip, cfg.frame_ms, cfg.hop_ms)
    n_frames, frame_len = frames.shape
    lag_min, lag_max = _lag_band(clip.sample_rate_hz, cfg.f0_min_hz, cfg.f0_max_hz, frame_len)

    rms = np.sqrt(np.mean(frames * frames, axis=1))
    out: list[PitchFrame] = []
    chunk = 4096
    for lo in range(0, n_frames, chunk):
        hi = min(lo + chunk, n_frames)
        if lag_max < lag_min:
            peaks = np.zeros(hi - lo)
            lags = np.ones(hi - lo, dtype=int)
        else:
            peaks, lags = _nccf_best(frames[lo:hi], lag_min, lag_max)
        for i in range(lo, hi):
            t_ms = i * cfg.hop_ms
            peak = float(peaks[i - lo])
            voiced = peak >= cfg.voicing_peak and rms[i] >= cfg.energy_floor
            out.append(
                PitchFrame(
                    t_ms=t_ms,
                    rms_energy=float(rms[i]),
                    autocorr_peak=peak,
                    f0_hz=clip.sample_rate_hz / int(lags[i - lo]) if voiced else None,
                )
            )
    return out


# -- window features ---------------------------------------------------------------

def window_features(
    frames: Sequence[PitchFrame],
    total_ms: float,
    window_ms: int = 3000,
    hop_ms: int = 1000,
    min_voicing: float = 0.2,
) -> list[StressWindowFeatures]:
    """Aggregate pitch frames into stress features per sliding window.

    Windows below the minimum voiced fraction are emitted feature-absent.
    Jitter is the mean absolute consecutive-voiced f0 step over the mean f0.
    """
    if total_ms < window_ms:
        return []
    n_windows = int((total_ms - window_ms) // hop_ms) + 1
    out = []
    ts = [f.t_ms for f in frames]
    for w in range(n_windows):
        start = w * hop_ms
        end = start + window_ms
        lo = bisect.bisect_left(ts, start)
        hi = bisect.bisect_left(ts, end)
        members = frames[lo:hi]
        if not members:
            out.append(
                StressWindowFeatures(
                    window_start_ms=start, window_end_ms=end, voiced_fraction=0.0, energy_rms=0.0
                )
            )
            continue
        energy = math.sqrt(sum(f.rms_energy**2 for f in members) / len(members))
        voiced = [f.f0_hz for f in members if f.f0_hz is not None]
        fraction = len(voiced) / len(members)
        if fraction < min_voicing:
            out.append(
                StressWindowFeatures(
                    window_start_ms=start,
                    window_end_ms=end,
                    voiced_fraction=fraction,
                    energy_rms=energy,
                )
            )
            continue
        f0_mean = sum(voiced) / len(voiced)
        f0_std = math.sqrt(sum((v - f0_mean) ** 2 for v in voiced) / len(voiced))
        if len(voiced) >= 2:
            steps = [abs(b - a) for a, b in zip(voiced, voiced[1:])]
            jitter = (sum(steps) / len(steps)) / f0_mean
        else:
            jitter = 0.0
        out.append(
            StressWindowFeatures(
                window_start_ms=start,
                window_end_ms=end,
                voiced_fraction=fraction,
                energy_rms=energy,
                f0_mean=f0_mean,
                f0_std=f0_std,
                jitter=jitter,
            )
        )
    return out


# -- scoring -------------------------------------------------------------------------

def compute_baseline(features: Sequence[StressWindowFeatures]) -> BaselineStats:
    """Mean/std of each feature over calm-period windows that have features."""
    usable = [f for f in features if f.has_features]
    if not usable:
        raise MissingBaseline("no voiced windows in the baseline period")

    def stats(values: list[float]) -> tuple[float, float]:
        mean = sum(values) / len(values)
        std = math.sqrt(sum((v - mean) ** 2 for v in values) / len(values))
        return mean, std

    return BaselineStats(
        f0_mean=stats([f.f0_mean for f in usable]),
        jitter=stats([f.jitter for f in usable]),
        energy_rms=stats([f.energy_rms for f in usable]),
    )


def _logistic(z: float, slope: float, z0: float) -> float:
    arg = -slope * (z - z0)
    if arg > 700:
        return 0.0
    if arg < -700:
        return 1.0
    return 1.0 / (1.0 + math.exp(arg))


def stress_score(
    features: StressWindowFeatures,
    baseline: Optional[BaselineStats],
    weights: tuple[float, float, float] = (0.5, 0.3, 0.2),
    slope: float = 2.0,
    z0: float = 2.0,
) -> StressSample:
    """Logistic score of positive feature deviations from the baseline."""
    if baseline is None:
        raise MissingBaseline("baseline statistics are required")
    if not features.has_features:
        raise MissingBaseline("window has no features to score")

    def zpos(value: float, stat: tuple[float, float]) -> float:
        mean, std = stat
        return max(0.0, (value - mean) / max(std, _STD_FLOOR))

    a1, a2, a3 = weights
    z = (
        a1 * zpos(features.f0_mean, baseline.f0_mean)
        + a2 * zpos(features.jitter, baseline.jitter)
        + a3 * zpos(features.energy_rms, baseline.energy_rms)
    )
    score = _logistic(z, slope, z0)
    return StressSample(t_ms=features.window_start_ms, score=score, binary=int(score >= 0.5))


def median_filter(values: Sequence[float], k: int) -> list[float]:
    """Centered median with window k (odd); edges shrink to available values."""
    if k < 1 or k % 2 == 0:
        raise ValueError("k must be a positive odd integer")
    half = k // 2
    out = []
    for i in range(len(values)):
        lo = max(0, i - half)
        hi = min(len(values), i + half + 1)
        out.append(statistics.median(values[lo:hi]))
    return out


class StressModelAdapter:
    """Interface for an external acoustic stress-scoring backend."""

    def score(self, clip_segment: AudioClip) -> float:
        raise NotImplementedError


def stress_timeline(
    clip: AudioClip,
    config: StressConfig | None = None,
    adapter: Optional[StressModelAdapter] = None,
) -> list[StressSample]:
    """Baseline-relative stress series over the whole clip.

    The first ``baseline_ms`` of audio provides the calm statistics. Windows
    without enough voicing carry the previous score forward with the gap
    flag set; scores are median-filtered before the binary threshold.
    """
    cfg = config or StressConfig()
    total_ms = clip.duration_ms
    if total_ms <= cfg.baseline_ms:
        raise MissingBaseline(
            f"clip of {total_ms:.0f} ms not longer than baseline {cfg.baseline_ms} ms"
        )

    frames = pitch_frames(clip, cfg)
    windows = window_features(
        frames, total_ms, cfg.window_ms, cfg.window_hop_ms, cfg.min_voicing
    )
    if not windows:
        raise ClipTooShort("no analysis windows")

    raw: list[float] = []
    gaps: list[bool] = []
    if adapter is not None:
        for w in windows:
            lo = int(w.window_start_ms * clip.sample_rate_hz / 1000)
            hi = int(w.window_end_ms * clip.sample_rate_hz / 1000)
            value = adapter.score(
                AudioClip(sample_rate_hz=clip.sample_rate_hz, samples=clip.samples[lo:hi])
            )
            if not 0.0 <= value <= 1.0:
                raise OutOfRangeScore(f"adapter score {value} outside [0,1]")
            raw.append(float(value))
            gaps.append(False)
    else:
        baseline_windows = [w for w in windows if w.window_end_ms <= cfg.baseline_ms]
        baseline = compute_baseline(baseline_windows)
        prev = 0.0
        for w in windows:
            if w.has_features:
                prev = stress_score(w, baseline, cfg.weights, cfg.slope, cfg.z0).score
                gaps.append(False)
            else:
                gaps.append(True)
            raw.append(prev)

    filtered = median_filter(raw, cfg.median_filter_k)
    return [
        StressSample(t_ms=w.window_start_ms, score=s, binary=int(s >= 0.5), gap=g)
        for w, s, g in zip(windows, filtered, gaps)
    ]
