// Copyright 2026 The s3grl Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "s3grl/common.hpp"
#include "s3grl/sparse.hpp"
#include "s3grl/graph.hpp"
#include "s3grl/sampling.hpp"
#include "s3grl/labeling.hpp"
#include "s3grl/diffusion.hpp"
#include "s3grl/record_io.hpp"
#include "s3grl/metrics.hpp"
#include "s3grl/heuristics.hpp"
#include "s3grl/model.hpp"
#include "s3grl/experiment.hpp"
