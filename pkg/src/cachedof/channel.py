"""Complex AWGN interference channel and zero-forcing beamforming.

Implements the constructive side of the valid-round argument: for each packet,
solve a small linear system so its effective channel coefficient is 1 at the
target receiver and 0 at the round receivers that did not cache it.  Round
simulation then checks physical decodability end to end.
"""

from dataclasses import dataclass

import numpy as np

from .errors import IllConditionedError, PreconditionFailedError

CONDITION_LIMIT = 1e12


@dataclass(frozen=True)
class ChannelRealization:
    """One block-constant channel draw: (n receivers) x (K_T transmitters)."""

    H: np.ndarray
    seed: object


@dataclass(frozen=True)
class BeamformingPlan:
    """Per-packet beamforming columns plus the rows each must zero-force.

    vectors is (K_T, n); column i has nonzeros only at transmitters caching
    packet i.  zero_rows[i] lists the entry indices whose effective channel
    coefficient must vanish for packet i.
    """

    vectors: np.ndarray
    zero_rows: tuple


@dataclass(frozen=True)
class SimulatedRound:
    """One simulated transmission: signals, estimates, and per-receiver MSE.

    transmitted rows satisfy the per-transmitter power bound; the bound binds
    exactly at the loudest transmitter.
    """

    transmitted: np.ndarray  # (K_T, b)
    received: np.ndarray     # (n, b)
    estimates: np.ndarray    # (n, b)
    mse: np.ndarray
    power_scale: float
    snr: float


def sample_channel(n, n_transmitters, seed):
    """i.i.d. CN(0, 1) channel matrix, deterministic for a given seed."""
    rng = np.random.default_rng(seed)
    H = (
        rng.standard_normal((n, n_transmitters))
        + 1j * rng.standard_normal((n, n_transmitters))
    ) / np.sqrt(2.0)
    return ChannelRealization(H=H, seed=seed)


def make_payloads(n, length, seed):
    """Unit-average-power complex payload vectors, one per served receiver."""
    rng = np.random.default_rng(seed)
    return (
        rng.standard_normal((n, length)) + 1j * rng.standard_normal((n, length))
    ) / np.sqrt(2.0)


def solve_beamforming(round_, caching, channel):
    """Beamforming vectors satisfying the unit/zero constraints for each packet.

    Raises PreconditionFailedError when the round does not meet the cached-at
    thresholds, IllConditionedError when the channel submatrix is numerically
    singular (resample the channel in that case).
    """
    H = channel.H
    entries = round_.entries
    n = len(entries)
    rx_ids = [rx for rx, _ in entries]
    if len(set(rx_ids)) != n:
        raise PreconditionFailedError("round serves a receiver twice")
    if H.shape[0] != n:
        raise PreconditionFailedError(
            f"channel has {H.shape[0]} rows for a round of {n} receivers"
        )

    vectors = np.zeros((H.shape[1], n), dtype=complex)
    zero_rows = []
    for i, (rx, pkt) in enumerate(entries):
        key = pkt.subfile
        txs = sorted(caching.transmitters_of(key))
        t_t = len(txs)
        if not set(round_.transmitters) <= set(txs):
            raise PreconditionFailedError(
                f"packet {pkt} not cached at all round transmitters"
            )
        cached_rx = caching.receivers_of(key)
        if rx in cached_rx:
            raise PreconditionFailedError(f"packet {pkt} already cached at {rx}")
        rows = [k for k, r in enumerate(rx_ids) if k != i and r not in cached_rx]
        if len(rows) > t_t - 1:
            raise PreconditionFailedError(
                f"packet {pkt} cached at too few round receivers "
                f"({n - 1 - len(rows)} < {n - t_t})"
            )
        sub = H[np.ix_([i] + rows, [t - 1 for t in txs])]
        if np.linalg.cond(sub) > CONDITION_LIMIT:
            raise IllConditionedError(
                f"channel submatrix condition number exceeds {CONDITION_LIMIT:g}"
            )
        target = np.zeros(len(rows) + 1, dtype=complex)
        target[0] = 1.0
        coeffs = np.linalg.lstsq(sub, target, rcond=None)[0]
        vectors[[t - 1 for t in txs], i] = coeffs
        zero_rows.append(tuple(rows))
    return BeamformingPlan(vectors=vectors, zero_rows=tuple(zero_rows))


def residual_interference(round_, plan, channel):
    """Worst-case violation of the beamforming constraints.

    Max over required-zero effective coefficients |C[k][i]| and unit-gain
    errors |C[i][i] - 1|.
    """
    C = channel.H @ plan.vectors
    worst = 0.0
    for i in range(len(round_.entries)):
        worst = max(worst, abs(C[i, i] - 1.0))
        for k in plan.zero_rows[i]:
            worst = max(worst, abs(C[k, i]))
    return worst


def simulate_round(round_, plan, channel, payloads, snr, noise_seed=None):
    """Transmit one round and decode at every served receiver.

    Each receiver cancels the interference terms it holds in cache, leaving
    its own payload plus scaled noise.  snr is a linear power bound; the
    transmit signal is scaled so the loudest transmitter meets it exactly.
    Omitting noise_seed runs noise-free.
    """
    if snr <= 0:
        raise ValueError(f"snr must be a positive linear scale, got {snr}")
    H = channel.H
    n, length = payloads.shape
    X = plan.vectors @ payloads
    per_tx_power = (np.abs(X) ** 2).mean(axis=1)
    peak = per_tx_power.max()
    scale = float(np.sqrt(snr / peak)) if peak > 0 else 1.0
    X = scale * X

    if noise_seed is None:
        noise = np.zeros((n, length), dtype=complex)
    else:
        rng = np.random.default_rng(noise_seed)
        noise = (
            rng.standard_normal((n, length)) + 1j * rng.standard_normal((n, length))
        ) / np.sqrt(2.0)
    Y = H @ X + noise

    C = H @ plan.vectors
    estimates = np.empty_like(payloads)
    for k in range(n):
        zero_set = set()
        for i in range(n):
            if k in plan.zero_rows[i]:
                zero_set.add(i)
        cancel = np.zeros(length, dtype=complex)
        for i in range(n):
            if i != k and i not in zero_set:
                cancel += C[k, i] * payloads[i]
        estimates[k] = (Y[k] - scale * cancel) / scale
    mse = (np.abs(estimates - payloads) ** 2).mean(axis=1)
    return SimulatedRound(
        transmitted=X,
        received=Y,
        estimates=estimates,
        mse=mse,
        power_scale=scale,
        snr=snr,
    )


def round_channel_seed(global_seed, round_index):
    """Deterministic per-round channel seed."""
    return (global_seed, round_index, 0)


def round_noise_seed(global_seed, round_index, draw):
    """Deterministic per-round, per-draw noise seed."""
    return (global_seed, round_index, 1, draw)
