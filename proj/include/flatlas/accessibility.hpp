#ifndef FLATLAS_ACCESSIBILITY_HPP
#define FLATLAS_ACCESSIBILITY_HPP

#include <optional>
#include <string>
#include <vector>

#include "flatlas/geometry.hpp"

namespace flatlas {

/// One level of a bracket-generated tower with its rank bookkeeping.
struct TowerLevel {
    std::vector<VectorField> generators;  // accumulated generating set
    std::size_t generic_rank = 0;
    std::size_t point_rank = 0;
};

/// Tower Gamma_{k+1} = Gamma_k + ad_g Gamma_k with u held symbolic during
/// bracketing and ranks evaluated at the point.
struct GammaTower {
    std::vector<TowerLevel> levels;
    std::optional<int> k_star;  // first level with point rank n
    bool stabilized = false;    // no generator survived pruning at some level
    bool budget_exhausted = false;
    std::vector<std::string> warnings;

    std::vector<std::size_t> point_ranks() const {
        std::vector<std::size_t> r;
        for (const auto& l : levels) r.push_back(l.point_rank);
        return r;
    }
};

/// Tower D_{k+1} = clos(D_k) + ad_{f0} clos(D_k), D_0 = Gamma_0, with
/// involutive closures interleaved. Lives on the state frame only.
struct DTower {
    std::vector<TowerLevel> levels;
    std::optional<int> k_star;
    bool stabilized = false;
    bool budget_exhausted = false;
    std::vector<std::string> warnings;
};

/// First-order controllability test: scan k = 1..m for
/// dim Span{f_1..f_m, [g,f_k]} = n at the point ([g,f_k] computed at
/// symbolic u, then evaluated). include_drift additionally tries the
/// nonstandard k = 0 test with [g,f_0].
struct GenericConditionResult {
    std::optional<int> holds_with_k;  // 1-based control index; 0 = drift test
    std::vector<std::size_t> span_ranks;  // rank per scanned k
};

GenericConditionResult check_generic_condition(const ControlAffineSystem& sys,
                                               const PointMap& point, const Sampler& sampler,
                                               bool include_drift = false);

GammaTower gamma_accessibility(const ControlAffineSystem& sys, const PointMap& point, int budget,
                               const Sampler& sampler);

DTower strong_accessibility(const ControlAffineSystem& sys, const PointMap& point, int budget,
                            const Sampler& sampler);

enum class PointClassTag { InOmega0, InOmegaOnly, OutsideOmega, Indeterminate };

const char* point_class_name(PointClassTag t);

/// Classification per the intrinsic-singularity sandwich: InOmega0 when the
/// generic condition holds; InOmegaOnly when only the Gamma tower reaches
/// rank n; OutsideOmega when the tower stabilizes strictly below n within
/// budget (candidate intrinsic singularity, definitively non-flat);
/// Indeterminate when the budget runs out first.
struct PointClass {
    PointClassTag tag = PointClassTag::Indeterminate;
    std::optional<int> generic_k;  // Eq-(12)-style index when InOmega0
    std::optional<int> k_star;     // Gamma tower index when rank n reached
    GammaTower gamma;
    std::optional<DTower> dtower;
    std::vector<std::string> warnings;
};

PointClass classify_point(const ControlAffineSystem& sys, const PointMap& point,
                          const Sampler& sampler, int budget = -1);

/// Default tower budget: 2n bracket levels.
int default_budget(const ControlAffineSystem& sys);

}  // namespace flatlas

#endif  // FLATLAS_ACCESSIBILITY_HPP
