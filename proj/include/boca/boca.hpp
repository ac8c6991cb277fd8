// Copyright 2026 The boca Authors
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

#include "boca/mcore.hpp"
#include "boca/algebra.hpp"
#include "boca/cpmap.hpp"
#include "boca/expectation.hpp"
#include "boca/tower.hpp"
#include "boca/freeprod.hpp"
#include "boca/extend.hpp"
#include "boca/instance.hpp"
#include "boca/generate.hpp"
#include "boca/scenario.hpp"
