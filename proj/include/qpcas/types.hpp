// SPDX-License-Identifier: Apache-2.0
//
// qpcas - joint precoding, antenna selection and power control for
// quantized MU-MIMO rate-splitting downlinks
// Copyright (C) 2026 The qpcas Authors
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

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qpcas
{
    using cplx = std::complex<double>;
    using CMat = Eigen::MatrixXcd;
    using CVec = Eigen::VectorXcd;
    using RVec = Eigen::VectorXd;
    using RMat = Eigen::MatrixXd;

    // One flag per BS antenna, true when the RF chain is powered.
    using AntennaMask = std::vector<bool>;

    using Rng = std::mt19937_64;

    // Raised when the power budget cannot host even the cheapest configuration.
    class InfeasibleBudget : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Raised when a quadratic form or solve produces a non-finite value.
    class NumericalError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    inline std::size_t count_active(const AntennaMask &mask)
    {
        std::size_t n = 0;
        for (bool b : mask)
            n += b ? 1 : 0;
        return n;
    }

    // Draw from CN(0, 1): real and imaginary parts are N(0, 1/2).
    inline cplx complex_normal(Rng &rng)
    {
        std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
        const double re = nd(rng);
        const double im = nd(rng);
        return {re, im};
    }

    inline CVec complex_normal_vector(Eigen::Index n, Rng &rng)
    {
        CVec v(n);
        for (Eigen::Index i = 0; i < n; ++i)
            v(i) = complex_normal(rng);
        return v;
    }

    // Rows of `full` (or entries, for vectors) whose mask bit is set.
    template <typename Derived>
    Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Derived::ColsAtCompileTime>
    select_rows(const Eigen::MatrixBase<Derived> &full, const AntennaMask &mask)
    {
        Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Derived::ColsAtCompileTime> out(
            static_cast<Eigen::Index>(count_active(mask)), full.cols());
        Eigen::Index r = 0;
        for (Eigen::Index i = 0; i < full.rows(); ++i)
            if (mask[static_cast<std::size_t>(i)])
                out.row(r++) = full.row(i);
        return out;
    }

    // Inverse of select_rows: scatter the reduced rows back, zero elsewhere.
    inline CMat expand_rows(const CMat &reduced, const AntennaMask &mask)
    {
        CMat full = CMat::Zero(static_cast<Eigen::Index>(mask.size()), reduced.cols());
        Eigen::Index r = 0;
        for (std::size_t i = 0; i < mask.size(); ++i)
            if (mask[i])
                full.row(static_cast<Eigen::Index>(i)) = reduced.row(r++);
        return full;
    }
}
