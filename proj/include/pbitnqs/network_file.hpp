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
#include <string>

#include "pbitnqs/pbit_network.hpp"

namespace pbitnqs {

// Plain-text network description:
//   n <count>
//   bias <i> <value>
//   coupler <i> <j> <value>
// '#' starts a comment; values are quantized to s{6}{3} on load. Errors name
// the offending line.
PbitNetwork load_network_text(std::istream& is);
PbitNetwork load_network_text_file(const std::string& path);
void save_network_text(std::ostream& os, const PbitNetwork& net);

}  // namespace pbitnqs
