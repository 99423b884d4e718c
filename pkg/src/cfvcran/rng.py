"""Counter-based random streams with documented splitting.

Every random quantity in the pipeline is drawn from its own Philox4x64 stream
identified by four coordinates: (seed, purpose, substream, instance).  The
128-bit Philox key carries (seed, purpose); the two high words of the 256-bit
counter carry (substream, instance).  Drawing from a stream only advances the
two low counter words, so distinct streams can never overlap no matter how
much is drawn from each, and any stream can be regenerated independently of
the others (used e.g. to replay Monte-Carlo realization t without storing it).

Purpose tags:
  UE_POSITION  one stream per user index, used for the uniform drop;
  SHADOWING    one stream per user index, log-normal shadow fading over APs;
  CHANNEL      one stream per Monte-Carlo realization index t.

Philox4x64-10 is a published, machine-independent generator, so the exact
experiment protocol is reproducible from the four coordinates alone.
"""

import numpy as np

UE_POSITION = 1
SHADOWING = 2
CHANNEL = 3

_MASK64 = (1 << 64) - 1


def stream(seed: int, purpose: int, substream: int = 0, instance: int = 0) -> np.random.Generator:
    """Return an independent Generator for the given stream coordinates."""
    key = np.array([seed & _MASK64, purpose & _MASK64], dtype=np.uint64)
    counter = np.array([0, 0, substream & _MASK64, instance & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(counter=counter, key=key))


def complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    """I.i.d. CN(0, 1) samples: real and imaginary parts N(0, 1/2)."""
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return (re + 1j * im) / np.sqrt(2.0)
