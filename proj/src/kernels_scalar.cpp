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

#include "qpcas/kernels.hpp"

namespace qpcas::kernels
{
    namespace
    {
        cplx dotc_scalar(const cplx *x, const cplx *y, std::size_t n)
        {
            double re = 0.0, im = 0.0;
            for (std::size_t i = 0; i < n; ++i)
            {
                re += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
                im += x[i].real() * y[i].imag() - x[i].imag() * y[i].real();
            }
            return {re, im};
        }

        double norm2_scalar(const cplx *x, std::size_t n)
        {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                s += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
            return s;
        }

        double weighted_norm2_scalar(const double *d, const cplx *x, std::size_t n)
        {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                s += d[i] * (x[i].real() * x[i].real() + x[i].imag() * x[i].imag());
            return s;
        }

        void axpy_scalar(cplx a, const cplx *x, cplx *y, std::size_t n)
        {
            const double ar = a.real(), ai = a.imag();
            for (std::size_t i = 0; i < n; ++i)
            {
                const double xr = x[i].real(), xi = x[i].imag();
                y[i] = {y[i].real() + xr * ar - xi * ai, y[i].imag() + xi * ar + xr * ai};
            }
        }

        void gemv_scalar(const cplx *a, std::size_t lda, std::size_t rows, std::size_t cols,
                         const cplx *x, cplx *y)
        {
            for (std::size_t i = 0; i < rows; ++i)
                y[i] = 0.0;
            for (std::size_t j = 0; j < cols; ++j)
                axpy_scalar(x[j], a + j * lda, y, rows);
        }

        void her_scalar(double alpha, const cplx *x, cplx *a, std::size_t lda, std::size_t n)
        {
            for (std::size_t j = 0; j < n; ++j)
                axpy_scalar(alpha * std::conj(x[j]), x, a + j * lda, n);
        }

        const KernelTable table{
            Isa::scalar, "scalar",
            dotc_scalar, norm2_scalar, weighted_norm2_scalar,
            axpy_scalar, gemv_scalar, her_scalar};
    }

    const KernelTable &scalar_table()
    {
        return table;
    }
}
