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

#include "qpcas/types.hpp"

#include <cstddef>
#include <span>

// Complex double-precision inner loops used by the solvers.
//
// Every kernel has a scalar reference implementation and, on x86-64 builds,
// an AVX2+FMA variant. The variant is picked once at startup from CPUID; set
// QPCAS_ISA=scalar in the environment to force the reference path.
// Matrices are column-major with an explicit leading dimension, which is the
// layout of Eigen::MatrixXcd.
namespace qpcas::kernels
{
    enum class Isa
    {
        scalar,
        avx2
    };

    struct KernelTable
    {
        Isa isa;
        const char *name;

        // sum_i conj(x_i) * y_i
        cplx (*dotc)(const cplx *x, const cplx *y, std::size_t n);

        // sum_i |x_i|^2
        double (*norm2)(const cplx *x, std::size_t n);

        // sum_i d_i |x_i|^2
        double (*weighted_norm2)(const double *d, const cplx *x, std::size_t n);

        // y += a * x
        void (*axpy)(cplx a, const cplx *x, cplx *y, std::size_t n);

        // y = A x, A is rows x cols
        void (*gemv)(const cplx *a, std::size_t lda, std::size_t rows, std::size_t cols,
                     const cplx *x, cplx *y);

        // A += alpha * x * x^H on the full n x n matrix
        void (*her)(double alpha, const cplx *x, cplx *a, std::size_t lda, std::size_t n);
    };

    const KernelTable &scalar_table();

    // nullptr when the library was built without AVX2 support.
    const KernelTable *avx2_table();

    bool cpu_supports(Isa isa);

    // Table used by the library. Thread-safe after first call.
    const KernelTable &active();

    // Override the runtime choice (tests and benchmarks). Throws if the ISA is
    // unavailable on this machine or build.
    void select(Isa isa);

    // -- convenience wrappers over Eigen storage --------------------------

    inline cplx dotc(const CVec &x, const CVec &y)
    {
        return active().dotc(x.data(), y.data(), static_cast<std::size_t>(x.size()));
    }

    inline double norm2(const CVec &x)
    {
        return active().norm2(x.data(), static_cast<std::size_t>(x.size()));
    }

    inline double weighted_norm2(const RVec &d, const CVec &x)
    {
        return active().weighted_norm2(d.data(), x.data(), static_cast<std::size_t>(x.size()));
    }

    inline void axpy(cplx a, const CVec &x, CVec &y)
    {
        active().axpy(a, x.data(), y.data(), static_cast<std::size_t>(x.size()));
    }

    // y = A x
    inline void gemv(const CMat &a, const cplx *x, cplx *y)
    {
        active().gemv(a.data(), static_cast<std::size_t>(a.outerStride()),
                      static_cast<std::size_t>(a.rows()), static_cast<std::size_t>(a.cols()), x, y);
    }

    inline CVec gemv(const CMat &a, const CVec &x)
    {
        CVec y(a.rows());
        gemv(a, x.data(), y.data());
        return y;
    }

    // A += alpha x x^H
    inline void her(double alpha, const CVec &x, CMat &a)
    {
        active().her(alpha, x.data(), a.data(), static_cast<std::size_t>(a.outerStride()),
                     static_cast<std::size_t>(a.rows()));
    }
}
