#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "texbank/error.hpp"

namespace texbank {

/// Named, ordered real-valued features. Names are unique and values finite.
class FeatureVector {
public:
    FeatureVector() = default;

    FeatureVector(std::vector<std::string> names, std::vector<double> values)
        : names_(std::move(names)), values_(std::move(values)) {
        if (names_.size() != values_.size()) throw SchemaError("FeatureVector: names and values differ in length");
        std::unordered_set<std::string> seen;
        for (const auto& n : names_)
            if (!seen.insert(n).second) throw NameCollisionError("duplicate feature name: " + n);
        for (std::size_t i = 0; i < values_.size(); ++i)
            if (!std::isfinite(values_[i])) throw DomainError("FeatureVector: non-finite value for " + names_[i]);
    }

    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    const std::vector<std::string>& names() const noexcept { return names_; }
    std::span<const double> values() const noexcept { return values_; }

    double operator[](std::size_t i) const { return values_[i]; }
    const std::string& name(std::size_t i) const { return names_[i]; }

    friend bool operator==(const FeatureVector&, const FeatureVector&) = default;

private:
    std::vector<std::string> names_;
    std::vector<double> values_;
};

/// Concatenates feature vectors, keeping part order and the order inside
/// each part. Throws NameCollisionError if a name appears twice.
inline FeatureVector fuse(std::span<const FeatureVector> parts) {
    std::vector<std::string> names;
    std::vector<double> values;
    std::unordered_set<std::string> seen;
    for (const auto& part : parts) {
        for (std::size_t i = 0; i < part.size(); ++i) {
            if (!seen.insert(part.name(i)).second)
                throw NameCollisionError("feature name appears in more than one part: " + part.name(i));
            names.push_back(part.name(i));
            values.push_back(part[i]);
        }
    }
    return FeatureVector(std::move(names), std::move(values));
}

inline FeatureVector fuse(std::initializer_list<FeatureVector> parts) {
    return fuse(std::span<const FeatureVector>(parts.begin(), parts.size()));
}

}  // namespace texbank
