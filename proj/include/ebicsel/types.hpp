#pragma once
#include <Eigen/Core>
#include <algorithm>
#include <initializer_list>
#include <vector>

namespace ebicsel {

using index_t = Eigen::Index;

template <class T>
using mat_type = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

template <class T>
using vec_type = Eigen::Matrix<T, Eigen::Dynamic, 1>;

/**
 * Ordered set of feature (column) indices describing a submodel.
 * Indices are 0-based and strictly increasing; the empty set is allowed.
 */
class SupportSet
{
public:
    using container_t = std::vector<index_t>;
    using const_iterator = container_t::const_iterator;

    SupportSet() = default;

    /// Throws InvalidArgument unless `indices` is strictly increasing and nonnegative.
    explicit SupportSet(container_t indices);
    SupportSet(std::initializer_list<index_t> indices)
        : SupportSet(container_t(indices)) {}

    /// Sorts and deduplicates arbitrary indices.
    static SupportSet from_unsorted(container_t indices);

    /// {0, 1, ..., count-1}
    static SupportSet iota(index_t count);

    index_t size() const { return static_cast<index_t>(indices_.size()); }
    bool empty() const { return indices_.empty(); }
    index_t operator[](index_t i) const { return indices_[static_cast<size_t>(i)]; }
    const_iterator begin() const { return indices_.begin(); }
    const_iterator end() const { return indices_.end(); }
    const container_t& indices() const { return indices_; }

    bool contains(index_t j) const
    {
        return std::binary_search(indices_.begin(), indices_.end(), j);
    }

    /// Maps positions within `*this` through `parent`: result[i] = parent[(*this)[i]].
    SupportSet lift(const SupportSet& parent) const;

    friend bool operator==(const SupportSet&, const SupportSet&) = default;

private:
    container_t indices_;
};

index_t intersection_size(const SupportSet& a, const SupportSet& b);
index_t difference_size(const SupportSet& a, const SupportSet& b); // |a \ b|
bool is_subset(const SupportSet& a, const SupportSet& b);            // a ⊆ b

/// Columns of `x` listed in `s`, as a dense copy.
template <class Derived>
mat_type<typename Derived::Scalar>
columns(const Eigen::MatrixBase<Derived>& x, const SupportSet& s)
{
    mat_type<typename Derived::Scalar> out(x.rows(), s.size());
    for (index_t k = 0; k < s.size(); ++k) out.col(k) = x.col(s[k]);
    return out;
}

} // namespace ebicsel
