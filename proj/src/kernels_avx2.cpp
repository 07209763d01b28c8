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

// Compiled with -mavx2 -mfma. Only reached after a CPUID check.

#include "qpcas/kernels.hpp"

#include <immintrin.h>

namespace qpcas::kernels
{
    namespace
    {
        // Two interleaved complex doubles per register: [re0 im0 re1 im1].
        inline __m256d load2(const cplx *p)
        {
            return _mm256_loadu_pd(reinterpret_cast<const double *>(p));
        }

        inline void store2(cplx *p, __m256d v)
        {
            _mm256_storeu_pd(reinterpret_cast<double *>(p), v);
        }

        inline double hsum(__m256d v)
        {
            __m128d lo = _mm256_castpd256_pd128(v);
            __m128d hi = _mm256_extractf128_pd(v, 1);
            lo = _mm_add_pd(lo, hi);
            return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
        }

        cplx dotc_avx2(const cplx *x, const cplx *y, std::size_t n)
        {
            // acc_re lanes hold xr*yr and xi*yi, acc_im lanes hold xr*yi and xi*yr.
            __m256d acc_re = _mm256_setzero_pd();
            __m256d acc_im = _mm256_setzero_pd();
            std::size_t i = 0;
            for (; i + 2 <= n; i += 2)
            {
                const __m256d xv = load2(x + i);
                const __m256d yv = load2(y + i);
                acc_re = _mm256_fmadd_pd(xv, yv, acc_re);
                acc_im = _mm256_fmadd_pd(xv, _mm256_permute_pd(yv, 0x5), acc_im);
            }
            alignas(32) double im_lanes[4];
            _mm256_store_pd(im_lanes, acc_im);
            double re = hsum(acc_re);
            double im = (im_lanes[0] - im_lanes[1]) + (im_lanes[2] - im_lanes[3]);
            for (; i < n; ++i)
            {
                re += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
                im += x[i].real() * y[i].imag() - x[i].imag() * y[i].real();
            }
            return {re, im};
        }

        double norm2_avx2(const cplx *x, std::size_t n)
        {
            __m256d acc = _mm256_setzero_pd();
            std::size_t i = 0;
            for (; i + 2 <= n; i += 2)
            {
                const __m256d xv = load2(x + i);
                acc = _mm256_fmadd_pd(xv, xv, acc);
            }
            double s = hsum(acc);
            for (; i < n; ++i)
                s += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
            return s;
        }

        double weighted_norm2_avx2(const double *d, const cplx *x, std::size_t n)
        {
            __m256d acc = _mm256_setzero_pd();
            std::size_t i = 0;
            for (; i + 2 <= n; i += 2)
            {
                // [d0 d0 d1 d1]
                const __m128d dd = _mm_loadu_pd(d + i);
                const __m256d dv = _mm256_permute4x64_pd(_mm256_castpd128_pd256(dd), 0x50);
                const __m256d xv = load2(x + i);
                acc = _mm256_fmadd_pd(_mm256_mul_pd(xv, xv), dv, acc);
            }
            double s = hsum(acc);
            for (; i < n; ++i)
                s += d[i] * (x[i].real() * x[i].real() + x[i].imag() * x[i].imag());
            return s;
        }

        void axpy_avx2(cplx a, const cplx *x, cplx *y, std::size_t n)
        {
            const __m256d ar = _mm256_set1_pd(a.real());
            const __m256d ai = _mm256_set1_pd(a.imag());
            std::size_t i = 0;
            for (; i + 2 <= n; i += 2)
            {
                const __m256d xv = load2(x + i);
                const __m256d xs = _mm256_permute_pd(xv, 0x5);
                // [xr*ar - xi*ai, xi*ar + xr*ai]
                const __m256d prod = _mm256_fmaddsub_pd(xv, ar, _mm256_mul_pd(xs, ai));
                store2(y + i, _mm256_add_pd(load2(y + i), prod));
            }
            for (; i < n; ++i)
            {
                const double xr = x[i].real(), xi = x[i].imag();
                y[i] = {y[i].real() + xr * a.real() - xi * a.imag(),
                        y[i].imag() + xi * a.real() + xr * a.imag()};
            }
        }

        void gemv_avx2(const cplx *a, std::size_t lda, std::size_t rows, std::size_t cols,
                       const cplx *x, cplx *y)
        {
            for (std::size_t i = 0; i < rows; ++i)
                y[i] = 0.0;
            for (std::size_t j = 0; j < cols; ++j)
                axpy_avx2(x[j], a + j * lda, y, rows);
        }

        void her_avx2(double alpha, const cplx *x, cplx *a, std::size_t lda, std::size_t n)
        {
            for (std::size_t j = 0; j < n; ++j)
                axpy_avx2(alpha * std::conj(x[j]), x, a + j * lda, n);
        }

        const KernelTable table{
            Isa::avx2, "avx2",
            dotc_avx2, norm2_avx2, weighted_norm2_avx2,
            axpy_avx2, gemv_avx2, her_avx2};
    }

    const KernelTable *avx2_table_impl()
    {
        return &table;
    }
}
