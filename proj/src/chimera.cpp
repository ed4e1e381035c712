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

#include "pbitnqs/chimera.hpp"

#include <algorithm>
#include <stdexcept>

#include "pbitnqs/errors.hpp"

namespace pbitnqs {

ChimeraTopology::ChimeraTopology(ChimeraDims dims) : dims_(dims) {
    if (dims.rows == 0 || dims.cols == 0 || dims.shore == 0)
        throw ConfigError("ChimeraTopology: all of (M, N, L) must be >= 1, got " +
                          to_string(dims));
}

uint32_t ChimeraTopology::node_count() const {
    return 2 * dims_.rows * dims_.cols * dims_.shore;
}

uint32_t ChimeraTopology::node_index(uint32_t row, uint32_t col, Side side, uint32_t k) const {
    if (row >= dims_.rows || col >= dims_.cols || k >= dims_.shore)
        throw std::out_of_range("ChimeraTopology::node_index: label out of range");
    const uint32_t cell = row * dims_.cols + col;
    return cell * 2 * dims_.shore + (side == Side::Horizontal ? dims_.shore : 0) + k;
}

uint32_t ChimeraTopology::node_index(const ChimeraNode& n) const {
    return node_index(n.row, n.col, n.side, n.index);
}

ChimeraNode ChimeraTopology::node_label(uint32_t idx) const {
    if (idx >= node_count()) throw std::out_of_range("ChimeraTopology::node_label: out of range");
    const uint32_t per_cell = 2 * dims_.shore;
    const uint32_t cell = idx / per_cell;
    const uint32_t within = idx % per_cell;
    return ChimeraNode{cell / dims_.cols, cell % dims_.cols,
                       within < dims_.shore ? Side::Vertical : Side::Horizontal,
                       within % dims_.shore};
}

uint32_t ChimeraTopology::intra_cell_coupler_count() const {
    return dims_.rows * dims_.cols * dims_.shore * dims_.shore;
}

uint32_t ChimeraTopology::vertical_coupler_count() const {
    return (dims_.rows - 1) * dims_.cols * dims_.shore;
}

uint32_t ChimeraTopology::horizontal_coupler_count() const {
    return dims_.rows * (dims_.cols - 1) * dims_.shore;
}

uint32_t ChimeraTopology::coupler_count() const {
    return intra_cell_coupler_count() + vertical_coupler_count() + horizontal_coupler_count();
}

std::vector<std::pair<uint32_t, uint32_t>> ChimeraTopology::couplers() const {
    std::vector<std::pair<uint32_t, uint32_t>> out;
    out.reserve(coupler_count());
    for (uint32_t row = 0; row < dims_.rows; ++row) {
        for (uint32_t col = 0; col < dims_.cols; ++col) {
            for (uint32_t a = 0; a < dims_.shore; ++a)
                for (uint32_t b = 0; b < dims_.shore; ++b)
                    out.emplace_back(node_index(row, col, Side::Vertical, a),
                                     node_index(row, col, Side::Horizontal, b));
            if (row + 1 < dims_.rows)
                for (uint32_t k = 0; k < dims_.shore; ++k)
                    out.emplace_back(node_index(row, col, Side::Vertical, k),
                                     node_index(row + 1, col, Side::Vertical, k));
            if (col + 1 < dims_.cols)
                for (uint32_t k = 0; k < dims_.shore; ++k)
                    out.emplace_back(node_index(row, col, Side::Horizontal, k),
                                     node_index(row, col + 1, Side::Horizontal, k));
        }
    }
    for (auto& c : out)
        if (c.first > c.second) std::swap(c.first, c.second);
    return out;
}

bool ChimeraTopology::adjacent(uint32_t a, uint32_t b) const {
    if (a == b) return false;
    const ChimeraNode na = node_label(a);
    const ChimeraNode nb = node_label(b);
    if (na.row == nb.row && na.col == nb.col) return na.side != nb.side;
    if (na.side != nb.side || na.index != nb.index) return false;
    if (na.side == Side::Vertical)
        return na.col == nb.col && (na.row + 1 == nb.row || nb.row + 1 == na.row);
    return na.row == nb.row && (na.col + 1 == nb.col || nb.col + 1 == na.col);
}

uint32_t ChimeraTopology::degree(uint32_t idx) const {
    const ChimeraNode n = node_label(idx);
    uint32_t d = dims_.shore;  // the opposite shore of the cell
    if (n.side == Side::Vertical) {
        if (n.row > 0) ++d;
        if (n.row + 1 < dims_.rows) ++d;
    } else {
        if (n.col > 0) ++d;
        if (n.col + 1 < dims_.cols) ++d;
    }
    return d;
}

uint32_t ChimeraTopology::max_degree() const {
    uint32_t d = dims_.shore;
    if (dims_.rows > 1 || dims_.cols > 1) {
        const uint32_t vert = dims_.rows > 2 ? 2 : dims_.rows - 1;
        const uint32_t horiz = dims_.cols > 2 ? 2 : dims_.cols - 1;
        d += std::max(vert, horiz);
    }
    return d;
}

std::string ChimeraTopology::to_string(const ChimeraDims& d) {
    return "(" + std::to_string(d.rows) + "," + std::to_string(d.cols) + "," +
           std::to_string(d.shore) + ")";
}

}  // namespace pbitnqs
