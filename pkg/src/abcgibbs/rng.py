"""Seedable, splittable random streams.

Every stochastic routine in the package takes an explicit :class:`RngStream`.
A stream is identified by ``(seed, stream_id)`` and wraps a counter-based
Philox generator, so two streams built from the same pair replay the same
draws and streams obtained by :meth:`RngStream.split` share no state.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def _derive(stream_id: int, index: int) -> int:
    ss = np.random.SeedSequence([stream_id & _MASK64, index & _MASK64, 0x5EED])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


class RngStream:
    """A reproducible random stream.

    Numpy ``Generator`` methods (``normal``, ``uniform``, ``gamma``, ...) are
    available directly on the stream.

    Parameters
    ----------
    seed : int
        64-bit unsigned seed.
    stream_id : int, optional
        64-bit unsigned sub-stream identifier.
    """

    def __init__(self, seed: int, stream_id: int = 0):
        if not (0 <= seed <= _MASK64) or not (0 <= stream_id <= _MASK64):
            raise ValueError("seed and stream_id must be 64-bit unsigned integers")
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        self.generator = np.random.Generator(np.random.Philox(ss))

    def split(self, n: int) -> list[RngStream]:
        """Return ``n`` independent child streams.

        Children depend only on ``(seed, stream_id)`` and their index, never on
        how many draws the parent has consumed.
        """
        return [RngStream(self.seed, _derive(self.stream_id, i)) for i in range(n)]

    def child(self, index: int) -> RngStream:
        return RngStream(self.seed, _derive(self.stream_id, index))

    def __getattr__(self, name):
        # only reached for attributes not defined on the stream itself
        gen = self.__dict__.get("generator")
        if gen is None or name.startswith("__"):
            raise AttributeError(name)
        return getattr(gen, name)

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"


def as_stream(rng: RngStream | int | None) -> RngStream:
    if isinstance(rng, RngStream):
        return rng
    if rng is None:
        return RngStream(int(np.random.SeedSequence().entropy) & _MASK64)
    return RngStream(int(rng))
