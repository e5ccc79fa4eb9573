#pragma once

#include <numeric>
#include <vector>

namespace diskperc {

/// Disjoint sets with union by size and path halving.
class UnionFind {
public:
    explicit UnionFind(int size = 0) { reset(size); }

    void reset(int size) {
        parent_.resize(static_cast<std::size_t>(size));
        std::iota(parent_.begin(), parent_.end(), 0);
        size_.assign(static_cast<std::size_t>(size), 1);
    }

    int find(int i) noexcept {
        while (parent_[static_cast<std::size_t>(i)] != i) {
            auto& p = parent_[static_cast<std::size_t>(i)];
            p = parent_[static_cast<std::size_t>(p)];
            i = p;
        }
        return i;
    }

    /// Returns true if a merge happened.
    bool unite(int a, int b) noexcept {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (size_[static_cast<std::size_t>(a)] < size_[static_cast<std::size_t>(b)]) std::swap(a, b);
        parent_[static_cast<std::size_t>(b)] = a;
        size_[static_cast<std::size_t>(a)] += size_[static_cast<std::size_t>(b)];
        return true;
    }

    bool same(int a, int b) noexcept { return find(a) == find(b); }
    int set_size(int i) noexcept { return size_[static_cast<std::size_t>(find(i))]; }
    int size() const noexcept { return static_cast<int>(parent_.size()); }

private:
    std::vector<int> parent_;
    std::vector<int> size_;
};

}  // namespace diskperc
