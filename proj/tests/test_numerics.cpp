// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include "jsac/numerics.hpp"

using namespace jsac;

namespace {

cvec random_cvec(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    cvec v(n);
    for (auto& x : v) x = rng.cgaussian();
    return v;
}

double max_abs_diff(const cvec& a, const cvec& b) {
    REQUIRE(a.size() == b.size());
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("unitary dft of an impulse is a flat spectrum") {
    const cvec v{{1, 0}, {0, 0}, {0, 0}, {0, 0}};
    const cvec f = unitary_dft(v);
    for (const auto& x : f) CHECK(std::abs(x - cplx{0.5, 0.0}) < 1e-12);
}

TEST_CASE("unitary dft of a DC vector concentrates at bin zero") {
    const cvec v{{1, 0}, {1, 0}, {1, 0}, {1, 0}};
    const cvec f = unitary_dft(v);
    CHECK(std::abs(f[0] - cplx{2.0, 0.0}) < 1e-12);
    for (std::size_t i = 1; i < 4; ++i) CHECK(std::abs(f[i]) < 1e-12);
}

TEST_CASE("unitary dft round trips within 1e-12 up to length 4096") {
    for (std::size_t n : {1u, 2u, 3u, 17u, 128u, 1000u, 1024u, 4096u}) {
        const cvec v = random_cvec(n, 41 + n);
        CHECK(max_abs_diff(unitary_dft(unitary_dft(v), true), v) < 1e-12);
    }
}

TEST_CASE("parseval holds to 1e-10 relative") {
    for (std::size_t n : {7u, 64u, 1024u, 4096u}) {
        const cvec v = random_cvec(n, 7 + n);
        const cvec f = unitary_dft(v);
        double ev = 0.0, ef = 0.0;
        for (const auto& x : v) ev += std::norm(x);
        for (const auto& x : f) ef += std::norm(x);
        CHECK(std::abs(ev - ef) / ev < 1e-10);
    }
}

TEST_CASE("unitary dft rejects empty input") {
    CHECK_THROWS_AS(unitary_dft(cvec{}), std::invalid_argument);
}

TEST_CASE("block interleave follows the tone-spacing layout") {
    // N=2 blocks of M=2: block b occupies positions {b, b+N}
    const std::vector<cvec> blocks{{{1, 0}, {2, 0}}, {{3, 0}, {4, 0}}};
    const cvec out = block_interleave(blocks);
    const cvec expect{{1, 0}, {3, 0}, {2, 0}, {4, 0}};
    CHECK(max_abs_diff(out, expect) == 0.0);
}

TEST_CASE("single-block interleave is the identity") {
    const std::vector<cvec> blocks{random_cvec(9, 3)};
    CHECK(max_abs_diff(block_interleave(blocks), blocks[0]) == 0.0);
}

TEST_CASE("interleave and deinterleave are mutually inverse") {
    for (auto [m, n] : {std::pair<std::size_t, std::size_t>{2, 2}, {8, 4}, {32, 32}}) {
        std::vector<cvec> blocks;
        for (std::size_t b = 0; b < n; ++b) blocks.push_back(random_cvec(m, 100 * b + m));
        const cvec flat = block_interleave(blocks);
        REQUIRE(flat.size() == m * n);
        const auto back = block_deinterleave(flat, n);
        for (std::size_t b = 0; b < n; ++b) CHECK(max_abs_diff(back[b], blocks[b]) == 0.0);
    }
}

TEST_CASE("interleave rejects ragged blocks") {
    CHECK_THROWS_AS(block_interleave({{{1, 0}}, {{1, 0}, {2, 0}}}), std::invalid_argument);
}

TEST_CASE("papr of a constant-modulus vector is 0 dB") {
    cvec v(64);
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double ph = 0.17 * static_cast<double>(i * i);
        v[i] = {std::cos(ph), std::sin(ph)};
    }
    CHECK(std::abs(papr_db(v)) < 1e-12);
}

TEST_CASE("papr of a lone spike matches direct arithmetic") {
    const cvec v{{2, 0}, {0, 0}, {0, 0}, {0, 0}};
    CHECK(papr_db(v) == Catch::Approx(10.0 * std::log10(4.0)).margin(1e-12));
}

TEST_CASE("papr rejects all-zero input") {
    CHECK_THROWS_AS(papr_db(cvec(8)), std::invalid_argument);
}

TEST_CASE("derived seeds are deterministic and distinct") {
    CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
    CHECK(derive_seed(1, 2, 3) != derive_seed(1, 2, 4));
    CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 2));
    CHECK(derive_seed(1, 2, 3) != derive_seed(2, 2, 3));
}

TEST_CASE("rng streams with equal seeds agree") {
    Rng a(99), b(99);
    for (int i = 0; i < 100; ++i) {
        CHECK(a.uniform(0.0, 1.0) == b.uniform(0.0, 1.0));
        CHECK(a.cgaussian() == b.cgaussian());
    }
}

TEST_CASE("complex gaussian hits the requested variance") {
    Rng rng(5);
    double acc = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) acc += std::norm(rng.cgaussian(2.5));
    CHECK(acc / n == Catch::Approx(2.5).epsilon(0.02));
}
