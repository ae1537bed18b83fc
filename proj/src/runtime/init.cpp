#include "arn/runtime/init.hpp"

#include <cmath>

namespace arn::rt {

void glorot_uniform(double* m, int rows, int cols, double scale, std::mt19937_64& rng) {
    double limit = std::sqrt(6.0 / (rows + cols));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (int i = 0; i < rows * cols; ++i) m[i] = scale * dist(rng);
}

void orthogonal(double* m, int n, double scale, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> a(static_cast<size_t>(n) * n);
    for (auto& v : a) v = gauss(rng);

    // Modified Gram-Schmidt on columns, applied twice for orthogonality
    // near machine precision; the diagonal sign correction makes Q unique.
    for (int pass = 0; pass < 2; ++pass) {
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < j; ++k) {
                double dot = 0.0;
                for (int i = 0; i < n; ++i) dot += a[i * n + j] * a[i * n + k];
                for (int i = 0; i < n; ++i) a[i * n + j] -= dot * a[i * n + k];
            }
            double norm = 0.0;
            for (int i = 0; i < n; ++i) norm += a[i * n + j] * a[i * n + j];
            norm = std::sqrt(norm);
            for (int i = 0; i < n; ++i) a[i * n + j] /= norm;
        }
    }
    for (int j = 0; j < n; ++j) {
        if (a[j * n + j] < 0.0)
            for (int i = 0; i < n; ++i) a[i * n + j] = -a[i * n + j];
    }
    for (int i = 0; i < n * n; ++i) m[i] = scale * a[i];
}

void init_recurrent_weights(std::vector<double>& params, int base,
                            const compiler::WeightLayout& layout, std::mt19937_64& rng) {
    using compiler::kMappings;
    int l = layout.l;
    for (int i = 0; i < kMappings; ++i)
        glorot_uniform(params.data() + base + layout.u_off + i * l * layout.n_in, l, layout.n_in,
                       0.1, rng);
    for (int off : {layout.w_off, layout.p_off})
        for (int i = 0; i < kMappings; ++i) {
            double* m = params.data() + base + off + i * l * l;
            orthogonal(m, l, 0.1, rng);
            for (int j = 0; j < l; ++j) m[j * l + j] = 0.0;
        }
    for (int i = 0; i < kMappings * l; ++i) params[base + layout.b_off + i] = 0.0;
    for (int i = 0; i < layout.aux_count * l; ++i) params[base + layout.aux_off + i] = 1.0;
}

}  // namespace arn::rt
