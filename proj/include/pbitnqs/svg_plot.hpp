// Copyright 2026 The pbit-nqs developers
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

#pragma once
#include <iosfwd>
#include <optional>

#include "pbitnqs/trainer.hpp"

namespace pbitnqs {

// Self-contained SVG: energy mean per epoch with its standard-error band, and
// the exact ground energy as a dashed horizontal reference line when known.
void write_convergence_svg(std::ostream& os, const TrainHistory& history,
                           std::optional<double> exact_energy);

}  // namespace pbitnqs
