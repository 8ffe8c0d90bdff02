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

#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace gocdm {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;
using cmat = Eigen::MatrixXcd;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx j{0.0, 1.0};

enum class Direction { forward, inverse };

/// Non-negative remainder of a modulo n.
inline std::size_t wrap(std::int64_t a, std::size_t n)
{
    const auto m = static_cast<std::int64_t>(n);
    const std::int64_t r = a % m;
    return static_cast<std::size_t>(r < 0 ? r + m : r);
}

/// e^{j*phase}
inline cplx cis(double phase) { return {std::cos(phase), std::sin(phase)}; }

inline double energy(const cvec &v)
{
    double e = 0.0;
    for (const auto &z : v)
        e += std::norm(z);
    return e;
}

} // namespace gocdm
