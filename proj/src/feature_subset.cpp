#include "cfs/feature_subset.hpp"

#include <algorithm>
#include <iterator>
#include <numeric>

namespace cfs {

namespace {
std::vector<std::size_t> normalized(std::vector<std::size_t> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}
}  // namespace

FeatureSubset::FeatureSubset(std::initializer_list<std::size_t> indices)
    : indices_(normalized(std::vector<std::size_t>(indices))) {}

FeatureSubset::FeatureSubset(std::vector<std::size_t> indices) : indices_(normalized(std::move(indices))) {}

FeatureSubset FeatureSubset::all(std::size_t d) {
    std::vector<std::size_t> v(d);
    std::iota(v.begin(), v.end(), std::size_t{0});
    FeatureSubset s;
    s.indices_ = std::move(v);
    return s;
}

bool FeatureSubset::contains(std::size_t feature) const {
    return std::binary_search(indices_.begin(), indices_.end(), feature);
}

FeatureSubset FeatureSubset::with(std::size_t feature) const {
    FeatureSubset s = *this;
    auto it = std::lower_bound(s.indices_.begin(), s.indices_.end(), feature);
    if (it == s.indices_.end() || *it != feature) s.indices_.insert(it, feature);
    return s;
}

FeatureSubset FeatureSubset::without(std::size_t feature) const {
    FeatureSubset s = *this;
    auto it = std::lower_bound(s.indices_.begin(), s.indices_.end(), feature);
    if (it != s.indices_.end() && *it == feature) s.indices_.erase(it);
    return s;
}

FeatureSubset FeatureSubset::unite(const FeatureSubset& other) const {
    FeatureSubset s;
    std::set_union(indices_.begin(), indices_.end(), other.indices_.begin(), other.indices_.end(),
                   std::back_inserter(s.indices_));
    return s;
}

FeatureSubset FeatureSubset::minus(const FeatureSubset& other) const {
    FeatureSubset s;
    std::set_difference(indices_.begin(), indices_.end(), other.indices_.begin(), other.indices_.end(),
                        std::back_inserter(s.indices_));
    return s;
}

bool FeatureSubset::includes(const FeatureSubset& other) const {
    return std::includes(indices_.begin(), indices_.end(), other.indices_.begin(), other.indices_.end());
}

std::string FeatureSubset::to_string() const {
    std::string out = "{";
    for (std::size_t i = 0; i < indices_.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(indices_[i]);
    }
    return out + "}";
}

}  // namespace cfs
