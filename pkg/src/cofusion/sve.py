"""Spatially-varying-exposure mosaics: decoding and a forward simulator.

A macro-pixel is a 2x2 cluster of sensor pixels, each behind a different
attenuator.  Decoded channels keep the captured (attenuated) values so
that downstream multi-exposure fusion sees genuinely different exposures.
"""

from dataclasses import dataclass, field

import numpy as np

DEFAULT_TRANSMITTANCES = (1.0, 0.55, 0.45, 0.0025)


@dataclass(frozen=True)
class SveLayout:
    """Macro-pixel arrangement: offsets[k] = (dx, dy) of channel k in the 2x2 cell.

    Channels are ordered brightest-first; transmittances must be strictly
    positive and strictly decreasing.
    """

    offsets: tuple = ((0, 0), (1, 0), (0, 1), (1, 1))
    transmittances: tuple = DEFAULT_TRANSMITTANCES

    def __post_init__(self):
        if sorted(self.offsets) != [(0, 0), (0, 1), (1, 0), (1, 1)]:
            raise ValueError(f"offsets must be a permutation of the 2x2 cell, got {self.offsets}")
        taus = self.transmittances
        if len(taus) != 4 or any(t <= 0 for t in taus):
            raise ValueError(f"need 4 positive transmittances, got {taus}")
        if any(a <= b for a, b in zip(taus, taus[1:])):
            raise ValueError(f"transmittances must be strictly decreasing, got {taus}")


@dataclass
class ExposureStack:
    """K aligned grayscale channels with per-channel exposure metadata.

    `channels` is a (K, H, W) float array; `exposures` carries one value
    per channel (transmittance or gamma).  Channel order is brightest
    first (descending effective exposure).
    """

    channels: np.ndarray
    exposures: tuple = ()

    def __post_init__(self):
        self.channels = np.asarray(self.channels, dtype=np.float64)
        if self.channels.ndim != 3 or self.channels.shape[0] < 1:
            raise ValueError(f"channels must be (K, H, W) with K >= 1, got {self.channels.shape}")
        if not np.all(np.isfinite(self.channels)):
            raise ValueError("channels contain non-finite values")
        if self.exposures and len(self.exposures) != self.channels.shape[0]:
            raise ValueError("exposure metadata length does not match channel count")

    @property
    def k(self):
        return self.channels.shape[0]

    @property
    def shape(self):
        return self.channels.shape[1:]

    def __iter__(self):
        return iter(self.channels)


def _upsample2x(chan, out_shape, offset):
    """Bilinear upsample of one sub-grid back to mosaic resolution.

    Sample (i, j) of the channel sits at mosaic position (2j+dx, 2i+dy);
    coordinates outside the sample lattice clamp to the nearest sample.
    """
    dx, dy = offset
    h, w = out_shape
    sh, sw = chan.shape
    ys = np.clip((np.arange(h, dtype=np.float64) - dy) / 2.0, 0.0, sh - 1)
    xs = np.clip((np.arange(w, dtype=np.float64) - dx) / 2.0, 0.0, sw - 1)
    y0 = np.floor(ys).astype(np.int64)
    x0 = np.floor(xs).astype(np.int64)
    y1 = np.minimum(y0 + 1, sh - 1)
    x1 = np.minimum(x0 + 1, sw - 1)
    fy = (ys - y0)[:, None]
    fx = (xs - x0)[None, :]
    top = chan[np.ix_(y0, x0)] * (1 - fx) + chan[np.ix_(y0, x1)] * fx
    bot = chan[np.ix_(y1, x0)] * (1 - fx) + chan[np.ix_(y1, x1)] * fx
    return top * (1 - fy) + bot * fy


def decode_mosaic(raw, layout=SveLayout(), upsample=True):
    """Split an SVE mosaic into its 4 exposure channels.

    With `upsample` each half-resolution channel is bilinearly brought
    back to mosaic resolution so the channels stay pixel-aligned;
    without it the raw sub-grids are returned (exact round-trip).
    """
    raw = np.asarray(raw, dtype=np.float64)
    h, w = raw.shape
    if h % 2 or w % 2:
        raise ValueError(f"mosaic dimensions must be even, got {raw.shape}")
    channels = []
    for dx, dy in layout.offsets:
        chan = raw[dy::2, dx::2]
        if upsample:
            chan = _upsample2x(chan, (h, w), (dx, dy))
        channels.append(chan)
    return ExposureStack(np.stack(channels), exposures=layout.transmittances)


def assemble_mosaic(stack, layout=SveLayout()):
    """Interleave half-resolution channels into a mosaic (decode inverse)."""
    sh, sw = stack.shape
    raw = np.zeros((sh * 2, sw * 2), dtype=np.float64)
    for chan, (dx, dy) in zip(stack.channels, layout.offsets):
        raw[dy::2, dx::2] = chan
    return raw


def simulate_sve(hdr, layout=SveLayout(), noise_sigma=0.0, quantize_bits=16, seed=0):
    """Forward model of the SVE sensor on an HDR radiance map (values >= 0).

    Each channel is hdr * tau_k plus seeded Gaussian read noise, quantized
    to the requested bit depth and clamped to [0, 1].  Returns the mosaic
    and the full-resolution ground-truth stack (mosaic samples are taken
    from the stack's sub-grids, so decode without upsampling is exact).
    """
    hdr = np.asarray(hdr, dtype=np.float64)
    if np.any(hdr < 0):
        raise ValueError("radiance map must be non-negative")
    if noise_sigma < 0:
        raise ValueError("noise_sigma must be >= 0")
    if quantize_bits not in (8, 16):
        raise ValueError(f"quantize_bits must be 8 or 16, got {quantize_bits}")
    if hdr.shape[0] % 2 or hdr.shape[1] % 2:
        raise ValueError(f"radiance map dimensions must be even, got {hdr.shape}")
    rng = np.random.default_rng(seed)
    maxval = (1 << quantize_bits) - 1
    channels = []
    for tau in layout.transmittances:
        chan = hdr * tau
        if noise_sigma > 0:
            chan = chan + rng.normal(0.0, noise_sigma, size=hdr.shape)
        chan = np.clip(np.rint(chan * maxval) / maxval, 0.0, 1.0)
        channels.append(chan)
    stack = ExposureStack(np.stack(channels), exposures=layout.transmittances)
    raw = np.zeros(hdr.shape, dtype=np.float64)
    for chan, (dx, dy) in zip(stack.channels, layout.offsets):
        raw[dy::2, dx::2] = chan[dy::2, dx::2]
    return raw, stack


def dynamic_range_extension_db(layout=SveLayout()):
    """Dynamic-range gain from the attenuator span, in dB."""
    taus = layout.transmittances
    return 20.0 * np.log10(taus[0] / taus[-1])
