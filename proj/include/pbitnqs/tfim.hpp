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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pbitnqs/rbm.hpp"

namespace pbitnqs {

// 1D transverse-field Ising chain
//     H = -( Σ_i J_{i,i+1} σ^z_i σ^z_{i+1} + Γ Σ_i σ^x_i ),
// stored with one bond per spin: bonds[i] couples spins i and (i+1) mod n,
// so bonds[n-1] is the wraparound bond (0.0 for an open chain).
struct TfimModel {
    uint32_t n_spins = 0;
    std::vector<double> bonds;
    double gamma = 0.0;

    static TfimModel uniform(uint32_t n, double j, double gamma, bool periodic = true);
    void validate() const;
};

// Largest chain the enumeration / diagonalization oracles accept.
inline constexpr uint32_t kMaxExactSpins = 20;

// Diagonal part: -Σ_i J_{i,i+1} v_i v_{i+1} with wraparound.
double classical_energy(std::span<const int8_t> v, const TfimModel& m);

// Local energy E_loc(v) = classical_energy(v) - Γ Σ_i ratio(i), where
// ratio(i) = ψ(v with spin i flipped)/ψ(v) is supplied by the wavefunction.
template <class RatioFn>
double local_energy_with_ratios(std::span<const int8_t> v, const TfimModel& m, RatioFn&& ratio) {
    double off_diag = 0.0;
    for (uint32_t i = 0; i < m.n_spins; ++i) off_diag += ratio(i);
    return classical_energy(v, m) - m.gamma * off_diag;
}

// RBM local energy via θ-cache ratio evaluations; O(N * nh) per call.
double local_energy(std::span<const int8_t> v, const RbmParams& p, const TfimModel& m,
                    const ThetaCache& cache);
double local_energy(std::span<const int8_t> v, const RbmParams& p, const TfimModel& m);

// Σ_v ψ(v)² E_loc(v) / Σ_v ψ(v)² by full enumeration of the 2^N visible
// configurations. Rejects N > kMaxExactSpins.
double variational_energy_exact(const RbmParams& p, const TfimModel& m);

// Bit convention shared by the enumeration and diagonalization code: bit i of
// the basis index holds spin i, set bit = +1.
void spin_configuration(uint64_t basis_index, uint32_t n, std::span<int8_t> out);

struct SpectrumResult {
    double ground_energy = 0.0;
    std::optional<std::vector<double>> ground_vector;  // in the σ^z product basis
    double residual = 0.0;                             // ‖H x - E x‖ of the accepted pair
    uint32_t iterations = 0;                           // total Lanczos steps
    std::string method;
};

// Lowest eigenvalue of H via restarted Lanczos on the sparse matrix-free
// operator (diagonal + N single-flip off-diagonals of weight -Γ). Rejects
// N > kMaxExactSpins; throws NumericError with the residual on
// non-convergence.
SpectrumResult exact_ground_energy(const TfimModel& m, bool keep_vector = false);

// y = H x for test cross-checks and residual evaluation.
void apply_hamiltonian(const TfimModel& m, std::span<const double> x, std::span<double> y);

}  // namespace pbitnqs
