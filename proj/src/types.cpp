#include <ebicsel/error.hpp>
#include <ebicsel/types.hpp>
#include <numeric>

namespace ebicsel {

SupportSet::SupportSet(container_t indices)
    : indices_(std::move(indices))
{
    for (size_t i = 0; i < indices_.size(); ++i) {
        if (indices_[i] < 0) throw InvalidArgument("support index must be nonnegative");
        if (i > 0 && indices_[i] <= indices_[i - 1]) {
            throw InvalidArgument("support indices must be strictly increasing");
        }
    }
}

SupportSet SupportSet::from_unsorted(container_t indices)
{
    std::sort(indices.begin(), indices.end());
    indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
    return SupportSet(std::move(indices));
}

SupportSet SupportSet::iota(index_t count)
{
    container_t v(static_cast<size_t>(std::max<index_t>(count, 0)));
    std::iota(v.begin(), v.end(), index_t{0});
    return SupportSet(std::move(v));
}

SupportSet SupportSet::lift(const SupportSet& parent) const
{
    container_t out;
    out.reserve(indices_.size());
    for (auto i : indices_) {
        if (i >= parent.size()) throw InvalidArgument("support position outside parent set");
        out.push_back(parent[i]);
    }
    return SupportSet(std::move(out));
}

index_t intersection_size(const SupportSet& a, const SupportSet& b)
{
    index_t count = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) ++ia;
        else if (*ib < *ia) ++ib;
        else { ++count; ++ia; ++ib; }
    }
    return count;
}

index_t difference_size(const SupportSet& a, const SupportSet& b)
{
    return a.size() - intersection_size(a, b);
}

bool is_subset(const SupportSet& a, const SupportSet& b)
{
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

} // namespace ebicsel
