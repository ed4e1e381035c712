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

#include "pbitnqs/network_file.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include "pbitnqs/errors.hpp"

namespace pbitnqs {

PbitNetwork load_network_text(std::istream& is) {
    std::optional<PbitNetwork> net;
    std::string line;
    size_t line_no = 0;
    auto fail = [&](const std::string& why) -> IoError {
        return IoError("network file line " + std::to_string(line_no) + ": " + why);
    };
    while (std::getline(is, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag[0] == '#') continue;
        if (tag == "n") {
            uint32_t n = 0;
            if (!(ls >> n) || n == 0) throw fail("expected 'n <count>' with count >= 1");
            if (net) throw fail("duplicate 'n' line");
            net.emplace(n);
        } else if (tag == "bias") {
            if (!net) throw fail("'bias' before 'n'");
            uint32_t i = 0;
            double value = 0.0;
            if (!(ls >> i >> value)) throw fail("expected 'bias <i> <value>'");
            if (i >= net->size()) throw fail("bias index out of range");
            if (!std::isfinite(value)) throw fail("non-finite bias value");
            net->set_bias(i, FixedPoint::quantize(value));
        } else if (tag == "coupler") {
            if (!net) throw fail("'coupler' before 'n'");
            uint32_t i = 0;
            uint32_t j = 0;
            double value = 0.0;
            if (!(ls >> i >> j >> value)) throw fail("expected 'coupler <i> <j> <value>'");
            if (i >= net->size() || j >= net->size()) throw fail("coupler index out of range");
            if (i == j) throw fail("coupler with i == j");
            if (!std::isfinite(value)) throw fail("non-finite coupler value");
            net->set_coupler(i, j, FixedPoint::quantize(value));
        } else {
            throw fail("unknown tag '" + tag + "'");
        }
    }
    if (!net) throw IoError("network file: missing 'n <count>' line");
    return *net;
}

PbitNetwork load_network_text_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open network file " + path);
    return load_network_text(is);
}

void save_network_text(std::ostream& os, const PbitNetwork& net) {
    os << "# pbit-nqs network\n";
    os << "n " << net.size() << "\n";
    for (uint32_t i = 0; i < net.size(); ++i)
        if (!net.bias(i).is_zero()) os << "bias " << i << " " << net.bias(i).value() << "\n";
    for (const Coupler& c : net.couplers())
        os << "coupler " << c.i << " " << c.j << " " << c.weight.value() << "\n";
}

}  // namespace pbitnqs
