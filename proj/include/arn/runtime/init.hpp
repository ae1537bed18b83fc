#pragma once

#include <random>
#include <vector>

#include "arn/compiler/kernel.hpp"

namespace arn::rt {

// Glorot-uniform fill of a rows x cols row-major matrix, scaled by `scale`.
void glorot_uniform(double* m, int rows, int cols, double scale, std::mt19937_64& rng);

// Random orthogonal rows x rows matrix (QR of a Gaussian sample with the
// sign correction that makes the factorization unique), scaled by `scale`.
void orthogonal(double* m, int n, double scale, std::mt19937_64& rng);

// Fill the recurrent weight block at params[base ...]:
//   U_i  Glorot-uniform x 0.1
//   W_i, P_i  orthogonal x 0.1, diagonal zeroed
//   b_i  0, auxiliary vectors 1
void init_recurrent_weights(std::vector<double>& params, int base,
                            const compiler::WeightLayout& layout, std::mt19937_64& rng);

}  // namespace arn::rt
