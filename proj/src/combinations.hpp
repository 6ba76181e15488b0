#pragma once

#include <numeric>
#include <type_traits>
#include <utility>
#include <vector>

namespace sipkit::detail {

/// Calls fn on every k-combination (ascending indices) of [0, n). A bool-returning
/// fn stops the walk by returning false.
template <class Fn>
void for_each_combination(int n, int k, Fn&& fn) {
    if (k > n || k < 0) return;
    std::vector<int> idx(static_cast<std::size_t>(k));
    std::iota(idx.begin(), idx.end(), 0);
    for (;;) {
        if constexpr (std::is_same_v<std::invoke_result_t<Fn&, const std::vector<int>&>, bool>) {
            if (!fn(std::as_const(idx))) return;
        } else {
            fn(std::as_const(idx));
        }
        int i = k - 1;
        while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
        if (i < 0) return;
        ++idx[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
}

}  // namespace sipkit::detail
