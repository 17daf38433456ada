"""Ordered Chinese restaurant processes: exact laws, samplers and checks."""

import json as _json

from ._crplab import (
    bruteforce_law,
    exact_law,
    fragmentation_identity,
    hausdorff,
    hit_probability,
    nested_ocrp,
    pcrp_via_clades,
    sample_ocrp,
    sample_pdip,
    sampling_consistency,
    scale_function,
    simulate_pcrp,
    simulate_updown,
    spinal_decomposition,
)
from ._crplab import acceptance as _acceptance


def acceptance(seed, only=()):
    """Run acceptance criteria; returns a list of dicts, one per criterion."""
    return _json.loads(_acceptance(seed, list(only)))


__all__ = [
    "acceptance",
    "bruteforce_law",
    "exact_law",
    "fragmentation_identity",
    "hausdorff",
    "hit_probability",
    "nested_ocrp",
    "pcrp_via_clades",
    "sample_ocrp",
    "sample_pdip",
    "sampling_consistency",
    "scale_function",
    "simulate_pcrp",
    "simulate_updown",
    "spinal_decomposition",
]
