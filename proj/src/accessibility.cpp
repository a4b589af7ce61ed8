#include "flatlas/accessibility.hpp"

#include <algorithm>

namespace flatlas {

int default_budget(const ControlAffineSystem& sys) { return 2 * static_cast<int>(sys.n()); }

const char* point_class_name(PointClassTag t) {
    switch (t) {
        case PointClassTag::InOmega0: return "InOmega0";
        case PointClassTag::InOmegaOnly: return "InOmegaOnly";
        case PointClassTag::OutsideOmega: return "OutsideOmega";
        case PointClassTag::Indeterminate: return "Indeterminate";
    }
    return "?";
}

GenericConditionResult check_generic_condition(const ControlAffineSystem& sys,
                                               const PointMap& point, const Sampler& sampler,
                                               bool include_drift) {
    (void)sampler;
    GenericConditionResult out;
    const VectorField g = system_field_g(sys, symbolic_inputs(sys));
    const std::size_t n = sys.n();

    auto test_bracket_with = [&](const VectorField& fk) -> std::size_t {
        FieldMatrix m(sys.state_frame);
        for (const auto& f : sys.controls) m.push_column(f);
        m.push_column(lie_bracket(g, fk));
        return rank_at_point(m, point);
    };

    // scan k = 1..m ascending; optional nonstandard drift test (k = 0) last
    for (std::size_t k = 1; k <= sys.m(); ++k) {
        const std::size_t r = test_bracket_with(sys.controls[k - 1]);
        out.span_ranks.push_back(r);
        if (r == n && !out.holds_with_k) out.holds_with_k = static_cast<int>(k);
    }
    if (!out.holds_with_k && include_drift) {
        const std::size_t r = test_bracket_with(sys.drift);
        out.span_ranks.push_back(r);
        if (r == n) out.holds_with_k = 0;
    }
    return out;
}

namespace {

// Shared tower driver: extends `current` generators by `bracket_with` of the
// newest generation, pruning brackets that raise neither the generic nor the
// at-point rank of the accumulated set.
struct TowerState {
    FieldMatrix acc;
    std::size_t generic_rank = 0;
    std::size_t point_rank = 0;
};

std::size_t try_rank_at_point(const FieldMatrix& m, const PointMap& point,
                              std::vector<std::string>& warnings) {
    try {
        return rank_at_point(m, point);
    } catch (const EvalError& e) {
        warnings.push_back(std::string("rank evaluation failed at point: ") + e.what());
        return 0;
    }
}

}  // namespace

GammaTower gamma_accessibility(const ControlAffineSystem& sys, const PointMap& point, int budget,
                               const Sampler& sampler) {
    if (budget < 1) throw std::invalid_argument("gamma_accessibility: budget must be >= 1");
    GammaTower tower;
    const std::size_t n = sys.n();
    const VectorField g = system_field_g(sys, symbolic_inputs(sys));

    TowerLevel level;
    level.generators = sys.controls;
    FieldMatrix acc(sys.state_frame, sys.controls);
    level.generic_rank = generic_rank(acc, sampler);
    level.point_rank = try_rank_at_point(acc, point, tower.warnings);
    tower.levels.push_back(level);
    if (level.point_rank == n) tower.k_star = 0;

    std::vector<VectorField> newest = sys.controls;
    for (int k = 1; k <= budget && !tower.k_star && !tower.stabilized; ++k) {
        std::vector<VectorField> kept;
        TowerLevel next = tower.levels.back();
        for (const auto& gen : newest) {
            VectorField br = lie_bracket(g, gen);
            if (br.is_zero()) continue;
            FieldMatrix trial = acc;
            trial.push_column(br);
            const std::size_t gr = generic_rank(trial, sampler);
            const std::size_t pr = try_rank_at_point(trial, point, tower.warnings);
            if (gr > next.generic_rank || pr > next.point_rank) {
                acc = std::move(trial);
                next.generic_rank = std::max(next.generic_rank, gr);
                next.point_rank = std::max(next.point_rank, pr);
                next.generators.push_back(br);
                kept.push_back(std::move(br));
            }
        }
        if (kept.empty()) {
            tower.stabilized = true;
            break;
        }
        tower.levels.push_back(next);
        if (next.point_rank == n) tower.k_star = k;
        newest = std::move(kept);
    }
    if (!tower.k_star && !tower.stabilized) {
        tower.budget_exhausted = true;
        tower.warnings.push_back("bracket budget exhausted before stabilization");
    }
    if (!tower.k_star)
        tower.warnings.push_back(
            "generator pruning drops rank-neutral brackets; stabilization is generic, not proven");
    return tower;
}

DTower strong_accessibility(const ControlAffineSystem& sys, const PointMap& point, int budget,
                            const Sampler& sampler) {
    if (budget < 1) throw std::invalid_argument("strong_accessibility: budget must be >= 1");
    DTower tower;
    const std::size_t n = sys.n();

    // D towers live on the state frame; drop u bindings from the point
    PointMap state_point;
    for (SymbolId s : sys.state_frame) {
        auto it = point.find(s);
        if (it != point.end()) state_point[s] = it->second;
    }

    auto record_level = [&](const Distribution& d) {
        TowerLevel level;
        level.generators = d.generators;
        FieldMatrix m = d.matrix();
        level.generic_rank = generic_rank(m, sampler);
        level.point_rank = try_rank_at_point(m, state_point, tower.warnings);
        tower.levels.push_back(level);
        return level;
    };

    // D_0 = Gamma_0
    Distribution current(sys.state_frame, sys.controls);
    TowerLevel level = record_level(current);
    if (level.point_rank == n) {
        tower.k_star = 0;
        return tower;
    }

    for (int k = 1; k <= budget; ++k) {
        ClosureResult closed = involutive_closure(current, budget, sampler);
        if (!closed.closed)
            tower.warnings.push_back("involutive closure step budget exhausted at level " +
                                     std::to_string(k));
        // D_{k} = clos(D_{k-1}) + ad_{f0} clos(D_{k-1}); rank-neutral
        // brackets are pruned (recorded as a completeness caveat)
        std::vector<VectorField> gens = closed.distribution.generators;
        FieldMatrix acc = closed.distribution.matrix();
        std::size_t gr = generic_rank(acc, sampler);
        std::size_t pr = try_rank_at_point(acc, state_point, tower.warnings);
        bool grew = gens.size() != current.generators.size() || gr > tower.levels.back().generic_rank;
        for (const auto& gamma : closed.distribution.generators) {
            VectorField br = lie_bracket(sys.drift, gamma);
            if (br.is_zero()) continue;
            FieldMatrix trial = acc;
            trial.push_column(br);
            const std::size_t tgr = generic_rank(trial, sampler);
            const std::size_t tpr = try_rank_at_point(trial, state_point, tower.warnings);
            if (tgr > gr || tpr > pr) {
                gr = tgr;
                pr = tpr;
                acc = std::move(trial);
                gens.push_back(std::move(br));
                grew = true;
            }
        }
        if (!grew) {
            tower.stabilized = true;
            return tower;
        }
        current = Distribution(sys.state_frame, std::move(gens));
        level = record_level(current);
        if (level.point_rank == n) {
            tower.k_star = k;
            return tower;
        }
    }
    tower.budget_exhausted = true;
    tower.warnings.push_back("bracket budget exhausted before stabilization");
    return tower;
}

PointClass classify_point(const ControlAffineSystem& sys, const PointMap& point,
                          const Sampler& sampler, int budget) {
    if (budget < 1) budget = default_budget(sys);
    PointClass out;
    GenericConditionResult gc = check_generic_condition(sys, point, sampler);
    out.gamma = gamma_accessibility(sys, point, budget, sampler);
    out.warnings = out.gamma.warnings;
    if (gc.holds_with_k) {
        out.tag = PointClassTag::InOmega0;
        out.generic_k = gc.holds_with_k;
        out.k_star = out.gamma.k_star;
        return out;
    }
    if (out.gamma.k_star) {
        out.tag = PointClassTag::InOmegaOnly;
        out.k_star = out.gamma.k_star;
        return out;
    }
    if (out.gamma.stabilized) {
        out.tag = PointClassTag::OutsideOmega;
        return out;
    }
    out.tag = PointClassTag::Indeterminate;
    return out;
}

}  // namespace flatlas
