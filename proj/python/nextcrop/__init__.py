"""Next-crop panorama token generation with seam coherence metrics.

Token grids are ``(rows, cols)`` ``uint32`` arrays and images are
``(height, width, 3)`` ``uint8`` arrays. Engine failures raise
:class:`nextcrop.Error` carrying ``code`` (e.g. ``"plan"``) and the CLI
``exit_code``.
"""

from ._nextcrop import (
    Codebook,
    Error,
    ExpansionPlan,
    Generator,
    baseline_independent,
    blend_boundary,
    build_codebook,
    coh,
    decode_ptok,
    decode_tokens,
    default_config,
    encode_image,
    encode_prompt,
    encode_ptok,
    evaluate_panorama,
    generate_panorama,
    image_guided_generate,
    iterations_for,
    layout_generate,
    load_generator,
    markov_generator,
    run_command,
    ssim,
    stride_columns,
    tv_seam,
)

__all__ = [
    "Codebook",
    "Error",
    "ExpansionPlan",
    "Generator",
    "baseline_independent",
    "blend_boundary",
    "build_codebook",
    "coh",
    "decode_ptok",
    "decode_tokens",
    "default_config",
    "encode_image",
    "encode_prompt",
    "encode_ptok",
    "evaluate_panorama",
    "generate_panorama",
    "image_guided_generate",
    "iterations_for",
    "layout_generate",
    "load_generator",
    "markov_generator",
    "run_command",
    "ssim",
    "stride_columns",
    "tv_seam",
]
