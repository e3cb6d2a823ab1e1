// Copyright 2026 The AOSOBoost Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef AOSO_AOSO_HPP_
#define AOSO_AOSO_HPP_

#include "aoso/booster.hpp"
#include "aoso/dataset.hpp"
#include "aoso/errors.hpp"
#include "aoso/evaluation.hpp"
#include "aoso/model_io.hpp"
#include "aoso/numerics.hpp"
#include "aoso/pair_quadratic.hpp"
#include "aoso/tree.hpp"
#include "aoso/tree_builder.hpp"

#endif  // AOSO_AOSO_HPP_
