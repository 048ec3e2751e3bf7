#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace cfs {

// Ordered set of feature indices. Indices are kept strictly increasing.
class FeatureSubset {
public:
    FeatureSubset() = default;
    FeatureSubset(std::initializer_list<std::size_t> indices);
    explicit FeatureSubset(std::vector<std::size_t> indices);

    static FeatureSubset all(std::size_t d);

    const std::vector<std::size_t>& indices() const { return indices_; }
    std::size_t size() const { return indices_.size(); }
    bool empty() const { return indices_.empty(); }
    bool contains(std::size_t feature) const;

    // True iff every index lies in [0, d).
    bool fits(std::size_t d) const { return indices_.empty() || indices_.back() < d; }

    FeatureSubset with(std::size_t feature) const;
    FeatureSubset without(std::size_t feature) const;
    FeatureSubset unite(const FeatureSubset& other) const;
    FeatureSubset minus(const FeatureSubset& other) const;
    bool includes(const FeatureSubset& other) const;

    std::string to_string() const;

    auto begin() const { return indices_.begin(); }
    auto end() const { return indices_.end(); }

    bool operator==(const FeatureSubset&) const = default;

private:
    std::vector<std::size_t> indices_;
};

}  // namespace cfs
