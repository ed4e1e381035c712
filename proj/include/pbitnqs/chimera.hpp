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
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace pbitnqs {

// Chimera dimensions (M, N, L): M rows and N columns of K_{L,L} unit cells.
struct ChimeraDims {
    uint32_t rows = 0;   // M
    uint32_t cols = 0;   // N
    uint32_t shore = 0;  // L, the half-cell size

    friend bool operator==(const ChimeraDims&, const ChimeraDims&) = default;
};

enum class Side : uint8_t { Vertical = 0, Horizontal = 1 };

struct ChimeraNode {
    uint32_t row = 0;
    uint32_t col = 0;
    Side side = Side::Vertical;
    uint32_t index = 0;  // position within the shore, < L

    friend bool operator==(const ChimeraNode&, const ChimeraNode&) = default;
};

// The (M, N, L) Chimera hardware graph: 2*M*N*L nodes, a complete bipartite
// K_{L,L} inside every cell, vertical qubits of same index coupled between
// row-adjacent cells and horizontal qubits between column-adjacent cells.
// Immutable after construction; safe for concurrent shared reads.
class ChimeraTopology {
public:
    explicit ChimeraTopology(ChimeraDims dims);
    ChimeraTopology(uint32_t rows, uint32_t cols, uint32_t shore)
        : ChimeraTopology(ChimeraDims{rows, cols, shore}) {}

    const ChimeraDims& dims() const { return dims_; }

    uint32_t node_count() const;  // 2*M*N*L

    // Linear node label: cells in row-major order, vertical shore first.
    uint32_t node_index(const ChimeraNode& n) const;
    uint32_t node_index(uint32_t row, uint32_t col, Side side, uint32_t k) const;
    ChimeraNode node_label(uint32_t idx) const;

    uint32_t intra_cell_coupler_count() const;       // M*N*L^2
    uint32_t vertical_coupler_count() const;         // (M-1)*N*L
    uint32_t horizontal_coupler_count() const;       // M*(N-1)*L
    uint32_t coupler_count() const;

    // All couplers as (a, b) label pairs with a < b, in a canonical order.
    std::vector<std::pair<uint32_t, uint32_t>> couplers() const;

    bool adjacent(uint32_t a, uint32_t b) const;
    uint32_t degree(uint32_t idx) const;
    uint32_t max_degree() const;  // L + 2 whenever the lattice has interior cells

    static std::string to_string(const ChimeraDims& d);

private:
    ChimeraDims dims_;
};

}  // namespace pbitnqs
