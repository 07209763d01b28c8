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

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace qpcas::kernels
{
#if defined(QPCAS_HAVE_AVX2)
    const KernelTable *avx2_table_impl();
#endif

    const KernelTable *avx2_table()
    {
#if defined(QPCAS_HAVE_AVX2)
        return avx2_table_impl();
#else
        return nullptr;
#endif
    }

    bool cpu_supports(Isa isa)
    {
        switch (isa)
        {
        case Isa::scalar:
            return true;
        case Isa::avx2:
#if defined(QPCAS_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
        }
        return false;
    }

    namespace
    {
        const KernelTable *detect()
        {
            const char *env = std::getenv("QPCAS_ISA");
            if (env != nullptr && std::strcmp(env, "scalar") == 0)
                return &scalar_table();
            if (cpu_supports(Isa::avx2))
                return avx2_table();
            return &scalar_table();
        }

        std::atomic<const KernelTable *> &slot()
        {
            static std::atomic<const KernelTable *> current{detect()};
            return current;
        }
    }

    const KernelTable &active()
    {
        return *slot().load(std::memory_order_acquire);
    }

    void select(Isa isa)
    {
        if (!cpu_supports(isa))
            throw std::runtime_error("kernel ISA not available on this build or CPU");
        slot().store(isa == Isa::avx2 ? avx2_table() : &scalar_table(), std::memory_order_release);
    }
}
