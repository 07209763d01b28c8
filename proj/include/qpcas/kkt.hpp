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

#include "qpcas/rates.hpp"

#include <vector>

namespace qpcas
{
    // Scalar weights of the first-order condition at a direction W.
    //
    //   A' = sum_k a_c,k A_c,k + sum_k a_p,k A_k
    //   B' = sum_i c1_i E_i + sum_k c2_k B_c,k + sum_k c3_k B_k
    //
    // with a_c = psi / num_c, a_p = 1 / num_p, c2 = psi / den_c, c3 = 1 / den_p,
    // c1_i = mu P_ant,i / (log2(1 + 1/rho) w^H E_i w) and psi the soft-min
    // weights of the common rates. The stationarity condition is A' w = B' w;
    // scaling A' by lambda_num and B' by lambda_den with lambda = num / den
    // gives the eigenvalue form B^-1 A w = lambda w.
    struct KktWeights
    {
        RVec psi;
        RVec a_c;
        RVec a_p;
        RVec c1;
        RVec c2;
        RVec c3;
        RVec e_diag;  // diagonal of sum_i c1_i E_i restricted to one block
        double lambda = 0.0;
        SmoothObjective objective;
    };

    KktWeights kkt_weights(const CMat &w, const RateMatrices &m, const PowerModel &pm,
                           const LagrangianSettings &s);

    // A' W, block by block (column s of the result is block s).
    CMat apply_a_kkt(const KktWeights &kw, const RateMatrices &m, const CMat &w);

    // B' W
    CMat apply_b_kkt(const KktWeights &kw, const RateMatrices &m, const CMat &w);

    // Euclidean gradient dL / dw^H = (A' w - B' w) / ln 2.
    CMat lagrangian_gradient(const KktWeights &kw, const RateMatrices &m, const CMat &w);

    // Dense N x N blocks of B' (slot 0 is the common block).
    CMat b_kkt_block(const KktWeights &kw, const RateMatrices &m, int slot);
    CMat a_kkt_block(const KktWeights &kw, const RateMatrices &m, int slot);

    struct KktOperator
    {
        std::vector<CMat> a_blocks;
        std::vector<CMat> b_blocks;
        double lambda_num = 1.0;
        double lambda_den = 1.0;

        CMat apply_a(const CMat &w) const;
        CMat apply_b(const CMat &w) const;
        CMat solve_b(const CMat &rhs) const;
    };

    KktOperator build_kkt_operator(const KktWeights &kw, const RateMatrices &m, double lambda_num,
                                   double lambda_den);

    // -- block solvers for B' X = R --------------------------------------

    // Cholesky per block, O(K N^3).
    CMat solve_b_dense(const KktWeights &kw, const RateMatrices &m, const CMat &rhs);

    // IID-mode structure: every block is a diagonal plus rank-one terms.
    struct SmBlockInverse
    {
        RVec d_common;   // block 0, fully diagonal
        RVec d_private;  // shared diagonal core of blocks 1..K
        CMat z_inv;      // (D + sum_k (c2 + c3) u u^H)^-1
        std::vector<CVec> z_inv_u;
        std::vector<double> downdate_den;  // 1 - c3_k u_k^H Z^-1 u_k
        RVec c3;
    };

    SmBlockInverse build_sm_inverse(const KktWeights &kw, const RateMatrices &m);

    // Solve one block (slot 0 = common) using the cached inverse. Private blocks
    // are checked by their O(K N) product and refined up to twice; a dense solve
    // takes over when the downdate denominator is below 1e-12 or the backward
    // error stays above 1e-13.
    CVec sm_block_solve(int slot, const CVec &rhs, const SmBlockInverse &st, const KktWeights &kw,
                        const RateMatrices &m);

    // O(K N^2). Requires m.iid.
    CMat solve_b_sm(const KktWeights &kw, const RateMatrices &m, const CMat &rhs);

    enum class SolverPath
    {
        dense,
        sherman_morrison
    };

    // One fixed-point update W <- normalize(B'^-1 A' W).
    CMat gpi_step(const KktWeights &kw, const RateMatrices &m, const CMat &w, SolverPath path);

    // ||B'^-1 A' w - w|| = ||B^-1 A w - lambda w|| / lambda for any split.
    double stationarity_residual(const KktWeights &kw, const RateMatrices &m, const CMat &w,
                                 SolverPath path);
}
