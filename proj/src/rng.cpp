#include "aqnn/rng.hpp"

namespace aqnn {

void add_isotropic_noise(std::span<double> v, double sigma, std::uint64_t stream_seed) {
    if (sigma == 0.0) return;
    Rng rng(stream_seed);
    std::normal_distribution<double> normal(0.0, sigma);
    for (double& x : v) x += normal(rng);
}

}  // namespace aqnn
