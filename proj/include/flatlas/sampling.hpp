#ifndef FLATLAS_SAMPLING_HPP
#define FLATLAS_SAMPLING_HPP

#include <cstdint>
#include <functional>
#include <set>
#include <vector>

#include "flatlas/expr.hpp"

namespace flatlas {

/// Default seed for all sampled decisions (zero tests, generic ranks).
inline constexpr std::uint64_t kDefaultSeed = 0x5EED;

/// Number of sample points backing probabilistic decisions.
inline constexpr int kNumSamples = 25;

/// Maximum resampling attempts when evaluation fails at a sample point.
inline constexpr int kMaxSampleAttempts = 200;

/// Deterministic pseudo-random rational sampler. Values are p/q with
/// p in {-7..7}\{0} and q in {1..5}. Streams derive independent sequences
/// from (seed, stream, index) so results do not depend on evaluation order.
class Sampler {
public:
    explicit Sampler(std::uint64_t seed = kDefaultSeed) : seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    Rational rational(std::uint64_t stream, std::uint64_t index) const;

    /// Small perturbation in (-radius, radius), rational, never exactly 0.
    Rational perturbation(std::uint64_t stream, std::uint64_t index, const Rational& radius) const;

    PointMap point_for(const std::set<SymbolId>& symbols, std::uint64_t stream) const;

private:
    static std::uint64_t mix(std::uint64_t x);
    std::uint64_t seed_;
};

/// Generates full bindings for a symbol set, one per sample index. Used to
/// realize "generic" (all symbols random) and "near a point" (bound symbols
/// perturbed in a box, the rest random) sampling schemes.
using PointScheme = std::function<PointMap(const std::set<SymbolId>&, int sample_index)>;

PointScheme generic_scheme(const Sampler& s);

/// Base symbols take their point value perturbed within `radius`; sample 0
/// is the unperturbed point itself. Unbound symbols are drawn at random.
PointScheme near_point_scheme(const Sampler& s, const PointMap& base, const Rational& radius);

/// Probabilistic zero test: canonical-form zero, else exact evaluation at
/// kNumSamples points (resampling on evaluation failure); expressions with
/// transcendental nodes fall back to float evaluation with |v| <= 1e-9.
bool is_zero_expr(const Expr& e, const Sampler& s);

bool contains_apply(const Expr& e);

}  // namespace flatlas

#endif  // FLATLAS_SAMPLING_HPP
