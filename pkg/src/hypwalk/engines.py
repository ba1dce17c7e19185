"""Vectorized batch trajectory engines (internal).

These produce exactly the same samples as per-sample `walk.sample_walk`
(same Philox stream per sample index) but keep only the statistics an
estimator needs, so experiments with 1e5+ samples stay cheap.  Free-group
walks run as numpy letter stacks; Farey walks run as per-sample python
loops over arbitrary-precision 2x2 matrices.

Work is split into fixed-size sample blocks merged in block order, so a
thread pool over blocks cannot change any output.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

import numpy as np

from .models.farey import Slope, dist_to_infinity, slope_distance
from .walk import StepDistribution, stream_generator

BLOCK_SIZE = 16384

# Stream namespaces.  Sweeps over a grid (shadow-decay n values) or over k
# (iterated walks) key their ensembles by the swept value, so the compared
# estimates come from independent draws under one master seed.
ENSEMBLE_PRIMARY = 0
ENSEMBLE_REFLECTED = 1
ENSEMBLE_AUX = 2
ENSEMBLE_GRID_BASE = 8
ENSEMBLE_ITERATED_BASE = 256


def _blocks(samples: int) -> list[tuple[int, int]]:
    return [(lo, min(lo + BLOCK_SIZE, samples)) for lo in range(0, samples, BLOCK_SIZE)]


def _run_blocks(fn, samples: int, threads: int = 1) -> list:
    spans = _blocks(samples)
    if threads <= 1 or len(spans) <= 1:
        return [fn(lo, hi) for lo, hi in spans]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(fn, lo, hi) for lo, hi in spans]
        return [f.result() for f in futures]  # block order, not completion order


def _draw_index_block(dist: StepDistribution, n: int, lo: int, hi: int,
                      seed: int, ensemble: int) -> np.ndarray:
    out = np.empty((hi - lo, n), dtype=np.int16)
    for i in range(lo, hi):
        gen = stream_generator(seed, i, ensemble)
        out[i - lo] = dist.draw_indices(gen, n)
    return out


def _support_letter_words(dist: StepDistribution) -> list[tuple[int, ...]]:
    return [g.letters for g in dist.support]


class _LetterStacks:
    """Freely reduced words for a block of samples, as an int8 letter matrix
    plus a length vector."""

    def __init__(self, rows: int, capacity: int):
        self.stack = np.zeros((rows, capacity), dtype=np.int8)
        self.length = np.zeros(rows, dtype=np.int64)

    def apply_letter(self, rows: np.ndarray, letter: int) -> None:
        ln = self.length
        top_idx = np.maximum(ln[rows] - 1, 0)
        top = self.stack[rows, top_idx]
        cancel = (ln[rows] > 0) & (top == -letter)
        crows = rows[cancel]
        prows = rows[~cancel]
        ln[crows] -= 1
        self.stack[prows, ln[prows]] = letter
        ln[prows] += 1

    def apply_step_column(self, idx_col: np.ndarray, words: Sequence[tuple[int, ...]]) -> None:
        for j, word in enumerate(words):
            if not word:
                continue
            rows = np.nonzero(idx_col == j)[0]
            if rows.size == 0:
                continue
            for letter in word:
                self.apply_letter(rows, letter)

    def snapshot(self) -> tuple[np.ndarray, np.ndarray]:
        return self.stack.copy(), self.length.copy()


def _pair_prefix_len(stack_a, len_a, stack_b, len_b) -> np.ndarray:
    # positions below min(len_a, len_b) are live in both stacks, so stale
    # letters beyond the live region cannot shorten the computed prefix
    lim = np.minimum(len_a, len_b)
    width = max(stack_a.shape[1], stack_b.shape[1])
    a = stack_a if stack_a.shape[1] == width else np.pad(stack_a, ((0, 0), (0, width - stack_a.shape[1])))
    b = stack_b if stack_b.shape[1] == width else np.pad(stack_b, ((0, 0), (0, width - stack_b.shape[1])))
    neq = a != b
    first = np.argmax(neq, axis=1)
    none = ~neq.any(axis=1)
    return np.where(none, lim, np.minimum(first, lim))


def _fixed_prefix_len(stack, length, word: tuple[int, ...]) -> np.ndarray:
    m = len(word)
    if m == 0:
        return np.zeros(len(length), dtype=np.int64)
    w = np.asarray(word, dtype=np.int8)
    seg = stack[:, :m]
    neq = seg != w[None, :]
    first = np.argmax(neq, axis=1)
    none = ~neq.any(axis=1)
    cp = np.where(none, m, first)
    return np.minimum(cp, length)


def _cyclic_core_lengths(stack, length) -> np.ndarray:
    rows, cap = stack.shape
    j = np.arange(cap)
    rev_idx = np.clip(length[:, None] - 1 - j[None, :], 0, cap - 1)
    mirrored = stack[np.arange(rows)[:, None], rev_idx]
    valid = j[None, :] < (length[:, None] // 2)
    match = (stack == -mirrored) & valid
    peel = np.argmax(~match, axis=1)  # first position that fails to cancel
    return length - 2 * peel


def _max_word_len(dist: StepDistribution) -> int:
    return max((len(g) for g in dist.support), default=1) or 1


def free_distance_trajectories(dist: StepDistribution, checkpoints: Sequence[int],
                               samples: int, seed: int, ensemble: int = ENSEMBLE_PRIMARY,
                               threads: int = 1) -> dict[int, np.ndarray]:
    """d(1, w_n) for every n in `checkpoints`, per sample."""
    checkpoints = sorted(set(int(c) for c in checkpoints))
    n = checkpoints[-1]
    words = _support_letter_words(dist)
    cap = n * _max_word_len(dist) + 1

    def run_block(lo: int, hi: int) -> dict[int, np.ndarray]:
        idx = _draw_index_block(dist, n, lo, hi, seed, ensemble)
        stacks = _LetterStacks(hi - lo, cap)
        out: dict[int, np.ndarray] = {}
        cps = set(checkpoints)
        for i in range(n):
            stacks.apply_step_column(idx[:, i], words)
            if (i + 1) in cps:
                out[i + 1] = stacks.length.copy()
        return out

    parts = _run_blocks(run_block, samples, threads)
    return {c: np.concatenate([p[c] for p in parts]) for c in checkpoints}


def free_segment_increments(dist: StepDistribution, k: int, n_iter: int,
                            samples: int, seed: int, ensemble: int = ENSEMBLE_PRIMARY,
                            threads: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """(Y, D) with Y[i] = d(w_{ik}, w_{(i+1)k}) and D[i] = d(1, w_{(i+1)k}),
    each of shape (n_iter, samples)."""
    n = k * n_iter
    words = _support_letter_words(dist)
    wmax = _max_word_len(dist)

    def run_block(lo: int, hi: int):
        idx = _draw_index_block(dist, n, lo, hi, seed, ensemble)
        rows = hi - lo
        main = _LetterStacks(rows, n * wmax + 1)
        seg = _LetterStacks(rows, k * wmax + 1)
        Y = np.empty((n_iter, rows), dtype=np.int64)
        D = np.empty((n_iter, rows), dtype=np.int64)
        for i in range(n):
            col = idx[:, i]
            main.apply_step_column(col, words)
            seg.apply_step_column(col, words)
            if (i + 1) % k == 0:
                t = (i + 1) // k - 1
                Y[t] = seg.length
                D[t] = main.length
                seg.length[:] = 0
        return Y, D

    parts = _run_blocks(run_block, samples, threads)
    return (
        np.concatenate([p[0] for p in parts], axis=1),
        np.concatenate([p[1] for p in parts], axis=1),
    )


def free_center_products(dist: StepDistribution, center_letters: tuple[int, ...],
                         checkpoints: Sequence[int], samples: int, seed: int,
                         ensemble: int = ENSEMBLE_PRIMARY,
                         threads: int = 1) -> dict[int, np.ndarray]:
    """(x . w_n)_1 against the fixed word x, per sample, at each checkpoint.
    In the tree this is the common prefix length."""
    checkpoints = sorted(set(int(c) for c in checkpoints))
    n = checkpoints[-1]
    words = _support_letter_words(dist)
    cap = max(n * _max_word_len(dist) + 1, len(center_letters) + 1)

    def run_block(lo: int, hi: int):
        idx = _draw_index_block(dist, n, lo, hi, seed, ensemble)
        stacks = _LetterStacks(hi - lo, cap)
        out = {}
        cps = set(checkpoints)
        for i in range(n):
            stacks.apply_step_column(idx[:, i], words)
            if (i + 1) in cps:
                out[i + 1] = _fixed_prefix_len(stacks.stack, stacks.length, center_letters)
        return out

    parts = _run_blocks(run_block, samples, threads)
    return {c: np.concatenate([p[c] for p in parts]) for c in checkpoints}


def free_midpoint_events(dist: StepDistribution, two_n: int, samples: int, seed: int,
                         threads: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """((w_n . w_2n)_1, d(1, w_n)) per sample for a walk of length two_n."""
    if two_n % 2 != 0:
        raise ValueError("walk length must be even")
    n = two_n // 2
    words = _support_letter_words(dist)
    cap = two_n * _max_word_len(dist) + 1

    def run_block(lo: int, hi: int):
        idx = _draw_index_block(dist, two_n, lo, hi, seed, ENSEMBLE_PRIMARY)
        stacks = _LetterStacks(hi - lo, cap)
        mid_stack = mid_len = None
        for i in range(two_n):
            stacks.apply_step_column(idx[:, i], words)
            if i + 1 == n:
                mid_stack, mid_len = stacks.snapshot()
        gp = _pair_prefix_len(mid_stack, mid_len, stacks.stack, stacks.length)
        return gp, mid_len

    parts = _run_blocks(run_block, samples, threads)
    return (
        np.concatenate([p[0] for p in parts]),
        np.concatenate([p[1] for p in parts]),
    )


def free_diagonal_products(dist: StepDistribution, dist_reflected: StepDistribution,
                           n: int, samples: int, seed: int,
                           threads: int = 1) -> np.ndarray:
    """(v_n . w_n)_1 for independent walks v ~ mu (ensemble 0) and
    w ~ reflected mu (ensemble 1)."""
    words_v = _support_letter_words(dist)
    words_w = _support_letter_words(dist_reflected)
    cap_v = n * _max_word_len(dist) + 1
    cap_w = n * _max_word_len(dist_reflected) + 1

    def run_block(lo: int, hi: int):
        idx_v = _draw_index_block(dist, n, lo, hi, seed, ENSEMBLE_PRIMARY)
        idx_w = _draw_index_block(dist_reflected, n, lo, hi, seed, ENSEMBLE_REFLECTED)
        sv = _LetterStacks(hi - lo, cap_v)
        sw = _LetterStacks(hi - lo, cap_w)
        for i in range(n):
            sv.apply_step_column(idx_v[:, i], words_v)
            sw.apply_step_column(idx_w[:, i], words_w)
        return _pair_prefix_len(sv.stack, sv.length, sw.stack, sw.length)

    return np.concatenate(_run_blocks(run_block, samples, threads))


def free_translation_lengths(dist: StepDistribution, checkpoints: Sequence[int],
                             samples: int, seed: int,
                             threads: int = 1) -> dict[int, np.ndarray]:
    """Exact translation lengths (cyclic-reduction lengths) at checkpoints."""
    checkpoints = sorted(set(int(c) for c in checkpoints))
    n = checkpoints[-1]
    words = _support_letter_words(dist)
    cap = n * _max_word_len(dist) + 1

    def run_block(lo: int, hi: int):
        idx = _draw_index_block(dist, n, lo, hi, seed, ENSEMBLE_PRIMARY)
        stacks = _LetterStacks(hi - lo, cap)
        out = {}
        cps = set(checkpoints)
        for i in range(n):
            stacks.apply_step_column(idx[:, i], words)
            if (i + 1) in cps:
                out[i + 1] = _cyclic_core_lengths(stacks.stack, stacks.length)
        return out

    parts = _run_blocks(run_block, samples, threads)
    return {c: np.concatenate([p[c] for p in parts]) for c in checkpoints}


# --- Farey engine: python loops over arbitrary-precision matrices ---


def farey_checkpoint_stats(dist: StepDistribution, checkpoints: Sequence[int],
                           samples: int, seed: int, want_distance: bool = False,
                           ensemble: int = ENSEMBLE_PRIMARY,
                           threads: int = 1) -> dict[int, dict[str, np.ndarray]]:
    """Per-checkpoint 'trace_small' (|trace| <= 2) flags and optionally
    exact distances d(1, w_n)."""
    checkpoints = sorted(set(int(c) for c in checkpoints))
    n = checkpoints[-1]
    mats = [g.entries() for g in dist.support]
    cpset = set(checkpoints)

    def run_block(lo: int, hi: int):
        idx = _draw_index_block(dist, n, lo, hi, seed, ensemble)
        rows = hi - lo
        trace_small = {c: np.zeros(rows, dtype=bool) for c in checkpoints}
        distance = {c: np.zeros(rows, dtype=np.int64) for c in checkpoints} if want_distance else None
        for r in range(rows):
            a, b, c_, d = 1, 0, 0, 1
            row = idx[r]
            for i in range(n):
                e, f, g2, h = mats[row[i]]
                a, b, c_, d = a * e + b * g2, a * f + b * h, c_ * e + d * g2, c_ * f + d * h
                t = i + 1
                if t in cpset:
                    trace_small[t][r] = abs(a + d) <= 2
                    if want_distance:
                        distance[t][r] = dist_to_infinity(a, c_)
        out = {}
        for c in checkpoints:
            entry = {"trace_small": trace_small[c]}
            if want_distance:
                entry["distance"] = distance[c]
            out[c] = entry
        return out

    parts = _run_blocks(run_block, samples, threads)
    merged: dict[int, dict[str, np.ndarray]] = {}
    for c in checkpoints:
        merged[c] = {
            key: np.concatenate([p[c][key] for p in parts]) for key in parts[0][c]
        }
    return merged


def farey_center_products(dist: StepDistribution, center_entries: tuple[int, int, int, int],
                          checkpoints: Sequence[int], samples: int, seed: int,
                          ensemble: int = ENSEMBLE_PRIMARY,
                          threads: int = 1) -> dict[int, np.ndarray]:
    """(x . w_n)_1 against a fixed matrix x, per sample, at each checkpoint."""
    checkpoints = sorted(set(int(c) for c in checkpoints))
    n = checkpoints[-1]
    mats = [g.entries() for g in dist.support]
    cpset = set(checkpoints)
    xa, _, xc, _ = center_entries
    x_slope = Slope(xa, xc)
    dx = dist_to_infinity(xa, xc)

    def run_block(lo: int, hi: int):
        idx = _draw_index_block(dist, n, lo, hi, seed, ensemble)
        rows = hi - lo
        out = {c: np.zeros(rows, dtype=np.float64) for c in checkpoints}
        for r in range(rows):
            a, b, c_, d = 1, 0, 0, 1
            row = idx[r]
            for i in range(n):
                e, f, g2, h = mats[row[i]]
                a, b, c_, d = a * e + b * g2, a * f + b * h, c_ * e + d * g2, c_ * f + d * h
                t = i + 1
                if t in cpset:
                    dw = dist_to_infinity(a, c_)
                    dxw = slope_distance(x_slope, Slope(a, c_))
                    out[t][r] = 0.5 * (dx + dw - dxw)
        return out

    parts = _run_blocks(run_block, samples, threads)
    return {c: np.concatenate([p[c] for p in parts]) for c in checkpoints}
