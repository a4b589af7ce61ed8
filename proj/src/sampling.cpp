#include "flatlas/sampling.hpp"

#include <cmath>

namespace flatlas {

// splitmix64; deterministic across platforms, unlike std distributions.
std::uint64_t Sampler::mix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

Rational Sampler::rational(std::uint64_t stream, std::uint64_t index) const {
    std::uint64_t h = mix(seed_ ^ mix(stream ^ mix(index)));
    long p = static_cast<long>(h % 14) - 7;       // -7..6
    if (p >= 0) ++p;                              // skip 0 -> -7..-1, 1..7
    long q = static_cast<long>((h >> 32) % 5) + 1;  // 1..5
    return Rational(p, q);
}

Rational Sampler::perturbation(std::uint64_t stream, std::uint64_t index,
                               const Rational& radius) const {
    // r * p / (8q) with p in {-7..7}\{0}, q in {1..5}: magnitude < radius.
    Rational r = rational(stream, index);
    return r * radius * Rational(1, 8);
}

PointMap Sampler::point_for(const std::set<SymbolId>& symbols, std::uint64_t stream) const {
    PointMap m;
    for (SymbolId s : symbols) m[s] = rational(stream, s);
    return m;
}

PointScheme generic_scheme(const Sampler& s) {
    return [s](const std::set<SymbolId>& symbols, int sample_index) {
        return s.point_for(symbols, static_cast<std::uint64_t>(sample_index));
    };
}

PointScheme near_point_scheme(const Sampler& s, const PointMap& base, const Rational& radius) {
    return [s, base, radius](const std::set<SymbolId>& symbols, int sample_index) {
        PointMap m;
        const auto stream = static_cast<std::uint64_t>(sample_index) + 0x4E41ull;
        for (SymbolId sym : symbols) {
            auto it = base.find(sym);
            if (it != base.end()) {
                m[sym] = sample_index == 0 ? it->second
                                           : it->second + s.perturbation(stream, sym, radius);
            } else {
                m[sym] = s.rational(stream, sym);
            }
        }
        return m;
    };
}

bool contains_apply(const Expr& e) {
    if (e.kind() == ExprKind::Apply) return true;
    for (const auto& k : e.children())
        if (contains_apply(k)) return true;
    return false;
}

bool is_zero_expr(const Expr& e, const Sampler& s) {
    Expr c = canonical(e);
    if (c.is_zero()) return true;
    const std::set<SymbolId> symbols = free_symbols(c);
    const bool transcendental = contains_apply(c);
    int done = 0;
    for (int attempt = 0; attempt < kMaxSampleAttempts && done < kNumSamples; ++attempt) {
        PointMap pt = s.point_for(symbols, static_cast<std::uint64_t>(attempt));
        try {
            if (transcendental) {
                FloatMap fp;
                for (const auto& [k, v] : pt) fp[k] = v.to_double();
                if (std::abs(evaluate_float(c, fp)) > 1e-9) return false;
            } else {
                if (!evaluate(c, pt).is_zero()) return false;
            }
            ++done;
        } catch (const EvalError&) {
            // resample
        }
    }
    return done > 0;
}

}  // namespace flatlas
