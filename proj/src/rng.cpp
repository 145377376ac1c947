#include "dirty/rng.hpp"

#include <cmath>

namespace dirty {

std::uint64_t StreamRng::below(std::uint64_t bound) {
    if (bound <= 1)
        return 0;
    // rejection keeps the result exactly uniform
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x = next_u64();
    while (x >= limit)
        x = next_u64();
    return x % bound;
}

double StreamRng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u = 0.0, v = 0.0, q = 0.0;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        q = u * u + v * v;
    } while (q >= 1.0 || q == 0.0);
    const double f = std::sqrt(-2.0 * std::log(q) / q);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
}

} // namespace dirty
