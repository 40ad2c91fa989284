# Copyright 2026  The zsabx authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#  http://www.apache.org/licenses/LICENSE-2.0
#
# THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
# KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
# WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
# MERCHANTABLITY OR NON-INFRINGEMENT.
# See the Apache 2 License for the specific language governing permissions and
# limitations under the License.

"""Zero-shot speech representation evaluation: ABX discrimination (DTW +
cosine), k-means unit quantization, contrastive/masked-prediction loss
checks, and multilingual gap/gain statistics."""

from ._zsabx import (
    ContractError,
    DataError,
    abx_language,
    abx_phonetic,
    analyze,
    assign_units,
    combined_loss,
    contrastive_av,
    dtw_distance,
    fit_kmeans,
    frame_distance,
    generate_fixture,
    grad_contrastive_av,
    masked_ce,
    relative_gain,
    relative_gap,
)

__version__ = "1.0.0"

__all__ = [
    "ContractError",
    "DataError",
    "abx_language",
    "abx_phonetic",
    "analyze",
    "assign_units",
    "combined_loss",
    "contrastive_av",
    "dtw_distance",
    "fit_kmeans",
    "frame_distance",
    "generate_fixture",
    "grad_contrastive_av",
    "masked_ce",
    "relative_gain",
    "relative_gap",
]
