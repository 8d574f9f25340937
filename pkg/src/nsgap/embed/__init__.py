"""Constructive embeddings of finite metric spaces."""

from nsgap.embed.bourgain import bourgain_matousek_embed
from nsgap.embed.duality import duality_certificate
from nsgap.embed.jl import jl_reduce
from nsgap.embed.line import line_embed
from nsgap.embed.partition import ckr_partition, zero_set_from_partition
from nsgap.embed.sdp import spread_sdp
from nsgap.embed.witness import EmbeddingWitness, make_witness

__all__ = [
    "EmbeddingWitness",
    "bourgain_matousek_embed",
    "ckr_partition",
    "duality_certificate",
    "jl_reduce",
    "line_embed",
    "make_witness",
    "spread_sdp",
    "zero_set_from_partition",
]
