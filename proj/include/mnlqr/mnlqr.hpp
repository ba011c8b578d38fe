// Copyright 2026 the mnlqr authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MNLQR_MNLQR_HPP_
#define MNLQR_MNLQR_HPP_

#include "mnlqr/concentration.hpp"
#include "mnlqr/cpop.hpp"
#include "mnlqr/errors.hpp"
#include "mnlqr/experiment.hpp"
#include "mnlqr/identify.hpp"
#include "mnlqr/model.hpp"
#include "mnlqr/rng.hpp"
#include "mnlqr/simulate.hpp"
#include "mnlqr/symm.hpp"
#include "mnlqr/synthesis.hpp"
#include "mnlqr/tensor.hpp"

#endif  // MNLQR_MNLQR_HPP_
