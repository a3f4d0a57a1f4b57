// Copyright 2026 the sobis authors
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

#ifndef SOBIS_SOBIS_HPP
#define SOBIS_SOBIS_HPP

#include "sobis/box.hpp"
#include "sobis/dataset.hpp"
#include "sobis/density.hpp"
#include "sobis/estimators.hpp"
#include "sobis/givendata.hpp"
#include "sobis/models.hpp"
#include "sobis/quadrature.hpp"
#include "sobis/subset.hpp"
#include "sobis/variance_opt.hpp"

#endif  // SOBIS_SOBIS_HPP
