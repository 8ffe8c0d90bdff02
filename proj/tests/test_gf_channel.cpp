// SPDX-License-Identifier: Apache-2.0
//
// gocdm - generalized chirp division multiplexing simulation toolkit
// Copyright (C) 2026 The gocdm authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <catch_amalgamated.hpp>

#include "test_util.hpp"

using namespace gocdm;
using namespace gocdm::test;

namespace {

ChannelRealization one_path(std::size_t MN, std::size_t delay, int k, double kappa, cplx gain = 1.0)
{
    ChannelRealization ch;
    ch.block_size = MN;
    PathRealization p;
    p.gain = gain;
    p.delay = delay;
    p.doppler_int = k;
    p.doppler_frac = kappa;
    ch.paths.push_back(p);
    return ch;
}

/// T H T^H with every matrix written out.
cmat conjugated_reference(const FrameParams &p, const ChannelRealization &ch)
{
    cmat T;
    if (p.mode == Mode::ofdm)
    {
        const auto n = static_cast<Eigen::Index>(p.size());
        T.resize(n, n);
        for (Eigen::Index r = 0; r < n; ++r)
            for (Eigen::Index c = 0; c < n; ++c)
                T(r, c) = std::exp(cplx(0, -2.0 * pi * static_cast<double>(r * c) / static_cast<double>(n))) /
                          std::sqrt(static_cast<double>(n));
    }
    else
        T = kron_identity(fresnel_reference(p.N), p.M);
    return T * dense_h(ch) * T.adjoint();
}

} // namespace

TEST_CASE("dense_heff matches explicit conjugation", "[gf_channel]")
{
    std::mt19937_64 rng(1);
    const std::vector<FrameParams> frames{{Mode::gocdm, 2, 4, 4, 1.0},
                                          {Mode::gocdm, 3, 5, 6, 1.0},
                                          {Mode::ocdm, 1, 16, 6, 1.0},
                                          {Mode::ofdm, 1, 16, 6, 1.0},
                                          {Mode::sc, 10, 1, 6, 1.0}};
    for (const auto &p : frames)
    {
        const auto ch = random_channel(p.size(), 4, p.G, 2, true, rng);
        const cmat H = dense_heff(p, ch);
        CHECK(relative_frobenius(H, conjugated_reference(p, ch)) < 1e-12);
        CHECK(std::abs(H.norm() - dense_h(ch).norm()) < 1e-9);
    }

    const FrameParams p{Mode::gocdm, 2, 4, 2, 1.0};
    CHECK(inf_norm_from_identity(dense_heff(p, one_path(8, 0, 0, 0.0))) < 1e-12);
    CHECK((dense_heff(p, one_path(8, 2, 0, 0.0)) - cyclic_shift_matrix(8) * cyclic_shift_matrix(8))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
    CHECK_THROWS_AS(dense_heff(p, one_path(16, 0, 0, 0.0)), std::invalid_argument);
}

TEST_CASE("lambda coefficients", "[gf_channel]")
{
    const auto zero = lambda_coeffs(0.0, 5, 16);
    REQUIRE(zero.size() == 1);
    CHECK(zero[0] == cplx(1.0));

    const auto half = lambda_coeffs(0.5, 1, 16);
    REQUIRE(half.size() == 3);
    for (const auto &v : half)
        CHECK(std::abs(half[1]) >= std::abs(v) - 1e-12);
    // kappa = 0.5 sits midway between bins 0 and 1
    CHECK(std::abs(std::abs(half[1]) - std::abs(half[2])) < 1e-12);

    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> frac(-0.49, 0.5);
    for (int t = 0; t < 20; ++t)
    {
        const double kappa = frac(rng);
        const std::size_t MN = 32;
        double total = 0.0;
        for (const auto &v : lambda_coeffs(kappa, 15, MN))
            total += std::norm(v);
        CHECK(total <= 1.0 + 1e-12);

        // the full set of MN offsets rebuilds the fractional ramp
        const auto [lo, hi] = basis_offsets(MN, MN);
        REQUIRE(hi - lo + 1 == static_cast<int>(MN));
        double worst = 0.0;
        for (std::size_t n = 0; n < MN; ++n)
        {
            cplx sum{};
            for (int b = lo; b <= hi; ++b)
                sum += lambda_coeff(kappa, b, MN) *
                       std::exp(cplx(0, 2.0 * pi * b * static_cast<double>(n) / static_cast<double>(MN)));
            worst = std::max(worst, std::abs(sum - std::exp(cplx(0, 2.0 * pi * kappa * static_cast<double>(n) /
                                                                      static_cast<double>(MN)))));
        }
        CHECK(worst < 1e-10);
    }
}

TEST_CASE("integer Doppler sparse channel is exact", "[gf_channel]")
{
    std::mt19937_64 rng(3);
    const std::vector<std::pair<std::size_t, std::size_t>> shapes{{2, 4}, {3, 5}, {1, 8}, {4, 3}, {8, 16}, {1, 7}, {5, 1}};
    for (const auto &[M, N] : shapes)
        for (int t = 0; t < 5; ++t)
        {
            const Mode mode = N == 1 ? Mode::sc : (M == 1 ? Mode::ocdm : Mode::gocdm);
            const FrameParams p(mode, M, N, M * N / 2, 1.0);
            const auto ch = random_channel(p.size(), 1 + t, p.G, 3, false, rng);
            const auto sg = sparse_heff(p, ch, 10);
            CHECK(relative_frobenius(sg.dense(), dense_heff(p, ch)) < 1e-9);
        }

    const FrameParams p{Mode::gocdm, 2, 4, 2, 1.0};
    const auto id = sparse_heff(p, one_path(8, 0, 0, 0.0), 10);
    REQUIRE(id.groups() == 1);
    CHECK(id.shift(0) == 0);
    for (std::size_t r = 0; r < 8; ++r)
        CHECK(std::abs(id.coeff(r, 0) - 1.0) < 1e-12);
}

TEST_CASE("OFDM sparse channel is the dense restriction", "[gf_channel]")
{
    std::mt19937_64 rng(4);
    const FrameParams p{Mode::ofdm, 1, 32, 8, 1.0};
    const auto ch = random_channel(32, 3, 8, 2, false, rng);
    CHECK(relative_frobenius(sparse_heff(p, ch, 0).dense(), dense_heff(p, ch)) < 1e-9);
}

TEST_CASE("fractional truncation error shrinks with B", "[gf_channel]")
{
    std::mt19937_64 rng(5);
    const FrameParams p{Mode::gocdm, 8, 16, 48, 1.0};
    for (int t = 0; t < 20; ++t)
    {
        const auto ch = random_channel(128, 1 + static_cast<std::size_t>(t % 6), 48, 7, true, rng);
        const cmat H = dense_heff(p, ch);
        double previous = std::numeric_limits<double>::infinity();
        for (std::size_t B : {1, 2, 5, 10, 20})
        {
            const double err = relative_frobenius(sparse_heff(p, ch, B).dense(), H);
            CHECK(err <= previous + 1e-12);
            previous = err;
        }
        CHECK(relative_frobenius(sparse_heff(p, ch, 64).dense(), H) < 1e-10);
    }

    // one UWA-like path
    const auto ch = one_path(128, 22, 7, 0.111, cplx(0.6, -0.3));
    const cmat H = dense_heff(p, ch);
    CHECK(relative_frobenius(sparse_heff(p, ch, 10).dense(), H) <
          relative_frobenius(sparse_heff(p, ch, 2).dense(), H));
}

TEST_CASE("sparse layout", "[gf_channel]")
{
    std::mt19937_64 rng(6);
    const FrameParams p{Mode::gocdm, 4, 8, 8, 1.0};
    const auto ch = random_channel(32, 4, 8, 2, true, rng);
    const auto sg = sparse_heff(p, ch, 2);
    const auto shifts = sg.shifts();
    CHECK(std::adjacent_find(shifts.begin(), shifts.end(), std::greater_equal<>()) == shifts.end());

    const cmat D = sg.dense();
    for (Eigen::Index r = 0; r < 32; ++r)
    {
        CHECK((D.row(r).array().abs() > 0).count() == static_cast<Eigen::Index>(sg.groups()));
        CHECK((D.col(r).array().abs() > 0).count() == static_cast<Eigen::Index>(sg.groups()));
    }

    const cvec x = random_vector(32, rng);
    CHECK(max_abs_diff(sg.apply(x), mul(D, x)) < 1e-12);

    CHECK_THROWS_AS(SparseGfChannel(8, {1, 1}), std::invalid_argument);
    CHECK_THROWS_AS(SparseGfChannel(8, {9}), std::invalid_argument);
}

TEST_CASE("index vectors", "[gf_channel]")
{
    const SparseGfChannel single(8, {0});
    for (std::size_t p = 0; p < 8; ++p)
    {
        const auto iv = index_vectors(single, p);
        CHECK(iv.b == std::vector<std::size_t>{p});
        CHECK(iv.q == std::vector<std::size_t>{p});
    }

    const SparseGfChannel two(8, {0, 3});
    const auto iv = index_vectors(two, 1);
    CHECK(iv.b == std::vector<std::size_t>{1, 6});
    CHECK(iv.q == std::vector<std::size_t>{1, 4});
    CHECK_THROWS_AS(index_vectors(two, 8), std::out_of_range);

    const SparseGfChannel sg(20, {0, 3, 7, 11, 19});
    for (std::size_t p = 0; p < 20; ++p)
    {
        const auto bp = index_vectors(sg, p);
        for (std::size_t l = 0; l < sg.groups(); ++l)
            CHECK(index_vectors(sg, bp.b[l]).q[l] == p);
    }
}

TEST_CASE("Lemma 1 holds for both parities", "[gf_channel]")
{
    for (auto [M, N] : std::vector<std::pair<std::size_t, std::size_t>>{{2, 4}, {3, 5}, {1, 8}, {1, 7}, {5, 3}})
        CHECK(verify_lemma1(M, N) < 1e-12);
}

TEST_CASE("transformed white noise stays white", "[gf_channel]")
{
    std::mt19937_64 rng(7);
    const GdfntParams params{2, 8};
    const std::size_t n = params.size();
    const double N0 = 0.3;
    cmat cov = cmat::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    const int draws = 10000;
    for (int t = 0; t < draws; ++t)
    {
        cvec w(n, cplx{});
        add_noise(w, N0, rng);
        const cvec y = gdfnt_apply(params, w, Direction::forward);
        const Eigen::Map<const Eigen::VectorXcd> v(y.data(), static_cast<Eigen::Index>(n));
        cov += v * v.adjoint();
    }
    cov /= draws;
    for (Eigen::Index i = 0; i < cov.rows(); ++i)
        CHECK(cov(i, i).real() == Catch::Approx(N0).epsilon(0.05));
}
