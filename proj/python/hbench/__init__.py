# Copyright 2026 The hbench Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Homography benchmark toolkit.

Images are float32 arrays shaped (channels, height, width) with values in
[-1, 1]. Corners are (4, 2) arrays, four-point deltas are length-8 arrays
ordered (du0, dv0, ..., du3, dv3) and homographies are 3x3 arrays.
"""

from ._hbench import (
    DhModel,
    HbenchError,
    HierarchicalStack,
    __version__,
    ace,
    apply_corruption,
    classical_estimate,
    generate_pair,
    h4pt_to_hmat,
    hmat_to_h4pt,
    load_image,
    load_weights,
    load_working_image,
    median_ace,
    outlier_ratio,
    report_markdown,
    run_experiment,
    save_weights,
    square_corners,
    tensor_specs,
    to_grayscale,
    warp_image,
)

__all__ = [
    "DhModel",
    "HbenchError",
    "HierarchicalStack",
    "__version__",
    "ace",
    "apply_corruption",
    "classical_estimate",
    "generate_pair",
    "h4pt_to_hmat",
    "hmat_to_h4pt",
    "load_image",
    "load_weights",
    "load_working_image",
    "median_ace",
    "outlier_ratio",
    "report_markdown",
    "run_experiment",
    "save_weights",
    "square_corners",
    "tensor_specs",
    "to_grayscale",
    "warp_image",
]
