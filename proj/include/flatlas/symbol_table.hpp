#ifndef FLATLAS_SYMBOL_TABLE_HPP
#define FLATLAS_SYMBOL_TABLE_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace flatlas {

using SymbolId = std::uint32_t;

/// Ordered, append-only registry of coordinate names. Names are unique and
/// index <-> name is bijective. Tables are treated as immutable once shared;
/// extensions (jet coordinates, flat-output symbols) produce a new table that
/// preserves all existing ids.
class SymbolTable {
public:
    SymbolTable() = default;

    static bool valid_identifier(std::string_view s) {
        if (s.empty()) return false;
        auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
        auto alnum = [&](char c) { return alpha(c) || (c >= '0' && c <= '9'); };
        if (!alpha(s[0])) return false;
        for (char c : s)
            if (!alnum(c)) return false;
        return true;
    }

    SymbolId add(const std::string& name) {
        if (!valid_identifier(name)) throw std::invalid_argument("invalid symbol name '" + name + "'");
        if (index_.count(name)) throw std::invalid_argument("duplicate symbol name '" + name + "'");
        const SymbolId id = static_cast<SymbolId>(names_.size());
        names_.push_back(name);
        index_.emplace(name, id);
        return id;
    }

    std::optional<SymbolId> find(std::string_view name) const {
        auto it = index_.find(std::string(name));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    const std::string& name(SymbolId id) const {
        if (id >= names_.size()) throw std::out_of_range("symbol id out of range");
        return names_[id];
    }

    std::size_t size() const { return names_.size(); }

    /// Copy with extra names appended; existing ids stay valid.
    SymbolTable extended(const std::vector<std::string>& extra) const {
        SymbolTable t(*this);
        for (const auto& n : extra) t.add(n);
        return t;
    }

    /// Name of the k-th time derivative of `base`: order 0 is `base` itself,
    /// higher orders get a "_d<k>" suffix (kept parseable as an identifier).
    static std::string jet_name(const std::string& base, int order) {
        if (order <= 0) return base;
        return base + "_d" + std::to_string(order);
    }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, SymbolId> index_;
};

}  // namespace flatlas

#endif  // FLATLAS_SYMBOL_TABLE_HPP
