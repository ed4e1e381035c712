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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pbitnqs/errors.hpp"
#include "pbitnqs/tfim.hpp"
#include "support/oracles.hpp"

using namespace pbitnqs;

namespace {

std::vector<int8_t> all_up(uint32_t n) { return std::vector<int8_t>(n, 1); }

std::vector<int8_t> alternating(uint32_t n) {
    std::vector<int8_t> v(n);
    for (uint32_t i = 0; i < n; ++i) v[i] = i % 2 == 0 ? 1 : -1;
    return v;
}

}  // namespace

TEST_CASE("classical_energy: ferromagnet, frustration, domain walls") {
    const TfimModel m = TfimModel::uniform(12, 1.0, 1.0);
    CHECK(classical_energy(all_up(12), m) == -12.0);
    CHECK(classical_energy(alternating(12), m) == 12.0);

    auto walls = all_up(12);
    for (uint32_t i = 3; i < 7; ++i) walls[i] = -1;  // one flipped domain, two broken bonds
    CHECK(classical_energy(walls, m) == -8.0);
}

TEST_CASE("classical_energy: length mismatch rejected") {
    const TfimModel m = TfimModel::uniform(4, 1.0, 0.5);
    CHECK_THROWS_AS(classical_energy(all_up(3), m), std::invalid_argument);
}

TEST_CASE("local_energy: zero parameters make every ratio 1") {
    const TfimModel m = TfimModel::uniform(12, 1.0, 1.0);
    const RbmParams p(12, 48);
    CHECK(local_energy(all_up(12), p, m) == doctest::Approx(-24.0).epsilon(1e-12));
    CHECK(local_energy(alternating(12), p, m) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("local_energy: gamma = 0 drops the off-diagonal term") {
    const TfimModel m = TfimModel::uniform(12, 1.0, 0.0);
    const RbmParams p = RbmParams::random(12, 48, 3, 0.2);
    CHECK(local_energy(all_up(12), p, m) == doctest::Approx(-12.0).epsilon(1e-12));
}

TEST_CASE("variational_energy_exact: uniform wavefunction gives -N at the critical point") {
    const TfimModel m = TfimModel::uniform(12, 1.0, 1.0);
    const RbmParams p(12, 48);
    // ⟨classical⟩ vanishes by symmetry, every ratio is 1 -> -Γ N.
    CHECK(variational_energy_exact(p, m) == doctest::Approx(-12.0).epsilon(1e-12));
}

TEST_CASE("variational_energy_exact: equals the Rayleigh quotient") {
    const TfimModel m = TfimModel::uniform(8, 1.0, 0.7);
    const RbmParams p = RbmParams::random(8, 16, 21, 0.3);
    const double from_eloc = variational_energy_exact(p, m);

    // Independent route: assemble the amplitude vector and apply H.
    const size_t dim = 256;
    std::vector<double> amp(dim);
    std::vector<int8_t> v(8);
    for (size_t s = 0; s < dim; ++s) {
        spin_configuration(s, 8, v);
        amp[s] = std::exp(log_psi(v, p) - 10.0);  // keep exp in range
    }
    std::vector<double> hamp(dim);
    apply_hamiltonian(m, amp, hamp);
    const double rayleigh = std::inner_product(amp.begin(), amp.end(), hamp.begin(), 0.0) /
                            std::inner_product(amp.begin(), amp.end(), amp.begin(), 0.0);
    CHECK(from_eloc == doctest::Approx(rayleigh).epsilon(1e-10));
}

TEST_CASE("variational_energy_exact: bounded below by the exact ground energy") {
    const TfimModel m = TfimModel::uniform(8, 1.0, 1.0);
    const double e0 = exact_ground_energy(m).ground_energy;
    for (uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL, 5ULL}) {
        const RbmParams p = RbmParams::random(8, 16, seed, 0.4);
        CHECK(variational_energy_exact(p, m) >= e0 - 1e-10);
    }
}

TEST_CASE("variational_energy_exact: rejects oversized systems") {
    TfimModel m = TfimModel::uniform(21, 1.0, 1.0);
    const RbmParams p(21, 21);
    CHECK_THROWS_AS(variational_energy_exact(p, m), ConfigError);
}

TEST_CASE("exact_ground_energy: classical limit gamma = 0") {
    const TfimModel m = TfimModel::uniform(12, 1.0, 0.0);
    const SpectrumResult r = exact_ground_energy(m);
    CHECK(r.ground_energy == doctest::Approx(-12.0).epsilon(1e-10));
}

TEST_CASE("exact_ground_energy: N=12 critical point matches the reference magnitude") {
    const TfimModel m = TfimModel::uniform(12, 1.0, 1.0);
    const SpectrumResult r = exact_ground_energy(m);
    CHECK(std::abs(std::abs(r.ground_energy) - 15.32256) < 1e-4);
    CHECK(r.residual < 1e-8);
}

TEST_CASE("exact_ground_energy: agrees with the free-fermion solution") {
    for (auto [n, gamma] : {std::pair<uint32_t, double>{8, 1.0},
                            std::pair<uint32_t, double>{10, 0.5},
                            std::pair<uint32_t, double>{12, 1.0},
                            std::pair<uint32_t, double>{12, 2.0}}) {
        const TfimModel m = TfimModel::uniform(n, 1.0, gamma);
        const SpectrumResult r = exact_ground_energy(m);
        CHECK(r.ground_energy ==
              doctest::Approx(testing::free_fermion_ground_energy(n, 1.0, gamma)).epsilon(1e-9));
    }
}

TEST_CASE("exact_ground_energy: agrees with a dense Jacobi diagonalization") {
    const TfimModel m = TfimModel::uniform(6, 0.8, 1.3);
    const auto dense = testing::dense_tfim_matrix(m);
    const auto evals = testing::jacobi_eigenvalues(dense, 64);
    const SpectrumResult r = exact_ground_energy(m);
    CHECK(r.ground_energy == doctest::Approx(evals.front()).epsilon(1e-9));
}

TEST_CASE("exact_ground_energy: invariant under cyclic bond relabeling") {
    TfimModel m = TfimModel::uniform(8, 1.0, 0.9);
    m.bonds = {0.3, 1.1, 0.7, 0.2, 1.4, 0.9, 0.5, 1.0};
    const double base = exact_ground_energy(m).ground_energy;
    for (int shift = 1; shift < 8; ++shift) {
        TfimModel rotated = m;
        std::rotate(rotated.bonds.begin(), rotated.bonds.begin() + shift, rotated.bonds.end());
        CHECK(exact_ground_energy(rotated).ground_energy == doctest::Approx(base).epsilon(1e-9));
    }
}

TEST_CASE("exact_ground_energy: keeps a residual-checked eigenvector on request") {
    const TfimModel m = TfimModel::uniform(6, 1.0, 1.0);
    const SpectrumResult r = exact_ground_energy(m, true);
    REQUIRE(r.ground_vector.has_value());
    const auto& x = *r.ground_vector;
    std::vector<double> hx(x.size());
    apply_hamiltonian(m, x, hx);
    double res2 = 0.0;
    for (size_t s = 0; s < x.size(); ++s) {
        const double d = hx[s] - r.ground_energy * x[s];
        res2 += d * d;
    }
    CHECK(std::sqrt(res2) < 1e-8);
}

TEST_CASE("exact_ground_energy: open boundary differs from periodic") {
    const TfimModel pbc = TfimModel::uniform(8, 1.0, 1.0, true);
    const TfimModel obc = TfimModel::uniform(8, 1.0, 1.0, false);
    CHECK(exact_ground_energy(pbc).ground_energy < exact_ground_energy(obc).ground_energy);
}

TEST_CASE("exact_ground_energy: size limit enforced") {
    CHECK_THROWS_AS(exact_ground_energy(TfimModel::uniform(21, 1.0, 1.0)), ConfigError);
}

TEST_CASE("zero-variance principle: exact eigenvector lookup wavefunction") {
    const TfimModel m = TfimModel::uniform(8, 1.0, 1.0);
    const SpectrumResult r = exact_ground_energy(m, true);
    REQUIRE(r.ground_vector.has_value());
    const auto& psi = *r.ground_vector;

    // Inject the eigenvector as a lookup wavefunction through the generic
    // ratio interface.
    std::vector<int8_t> v(8);
    for (size_t s = 0; s < psi.size(); ++s) {
        if (std::abs(psi[s]) < 1e-8) continue;
        spin_configuration(s, 8, v);
        const double eloc = local_energy_with_ratios(
            v, m, [&](uint32_t i) { return psi[s ^ (size_t{1} << i)] / psi[s]; });
        CHECK(eloc == doctest::Approx(r.ground_energy).epsilon(1e-8));
    }
}

TEST_CASE("translation invariance of the uniform chain's local energies") {
    // With uniform J the model is cyclic: rotating a configuration leaves the
    // classical energy unchanged.
    const TfimModel m = TfimModel::uniform(10, 1.0, 1.0);
    std::vector<int8_t> v(10);
    testing::index_to_spins(0b1011001110, 10, v);
    const double base = classical_energy(v, m);
    for (int shift = 1; shift < 10; ++shift) {
        std::rotate(v.begin(), v.begin() + 1, v.end());
        CHECK(classical_energy(v, m) == doctest::Approx(base).epsilon(1e-14));
    }
}
