// Copyright 2026 The hmarl Authors.
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

#ifndef HMARL_HMARL_HPP_
#define HMARL_HMARL_HPP_

#include "hmarl/cce.hpp"
#include "hmarl/config.hpp"
#include "hmarl/driver.hpp"
#include "hmarl/env.hpp"
#include "hmarl/gp.hpp"
#include "hmarl/hallucination.hpp"
#include "hmarl/output.hpp"
#include "hmarl/parallel.hpp"
#include "hmarl/random.hpp"
#include "hmarl/runner.hpp"

#endif  // HMARL_HMARL_HPP_
