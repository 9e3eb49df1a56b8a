#pragma once

// Cycle types (sparse multiplicity vectors with sum k*c_k = n), permutations in
// one-line notation, and the conversions between them.

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace involab {

// Sparse non-negative count vector: sorted (k, count) pairs with count > 0.
// Used both for cycle types and for truncated spacing-process counts, where
// no partition constraint applies.
struct SparseCounts {
    std::vector<std::pair<std::int64_t, std::int64_t>> kv;

    std::int64_t at(std::int64_t k) const {
        auto it = std::lower_bound(kv.begin(), kv.end(), k,
                                   [](const auto& p, std::int64_t key) { return p.first < key; });
        return (it != kv.end() && it->first == k) ? it->second : 0;
    }
    void add(std::int64_t k, std::int64_t c) {
        if (c == 0) return;
        auto it = std::lower_bound(kv.begin(), kv.end(), k,
                                   [](const auto& p, std::int64_t key) { return p.first < key; });
        if (it != kv.end() && it->first == k) {
            it->second += c;
            if (it->second == 0) kv.erase(it);
        } else {
            kv.insert(it, {k, c});
        }
    }
    std::int64_t weighted_sum() const {
        std::int64_t s = 0;
        for (const auto& [k, c] : kv) s += k * c;
        return s;
    }
    std::int64_t total() const {
        std::int64_t s = 0;
        for (const auto& [k, c] : kv) s += c;
        return s;
    }
    bool operator==(const SparseCounts&) const = default;
    auto operator<=>(const SparseCounts&) const = default;
};

class CycleType {
  public:
    CycleType() = default;

    CycleType(std::int64_t n, SparseCounts counts) : n_(n), counts_(std::move(counts)) {
        validate();
    }

    // dense: counts[k-1] = number of k-cycles
    static CycleType from_dense(const std::vector<std::int64_t>& dense) {
        SparseCounts sc;
        for (std::size_t i = 0; i < dense.size(); ++i) {
            if (dense[i] < 0) throw std::invalid_argument("negative multiplicity in cycle type");
            if (dense[i] > 0) sc.add(static_cast<std::int64_t>(i + 1), dense[i]);
        }
        const std::int64_t n = sc.weighted_sum();
        return CycleType(n, std::move(sc));
    }

    static CycleType single_cycle(std::int64_t n) {
        SparseCounts sc;
        sc.add(n, 1);
        return CycleType(n, std::move(sc));
    }

    static CycleType identity(std::int64_t n) {
        SparseCounts sc;
        if (n > 0) sc.add(1, n);
        return CycleType(n, std::move(sc));
    }

    std::int64_t n() const { return n_; }
    const SparseCounts& counts() const { return counts_; }
    std::int64_t count(std::int64_t k) const { return counts_.at(k); }
    std::int64_t total_cycles() const { return counts_.total(); }

    bool operator==(const CycleType&) const = default;
    auto operator<=>(const CycleType&) const = default;

  private:
    void validate() const {
        if (n_ <= 0) throw std::invalid_argument("cycle type needs positive ground-set size");
        for (const auto& [k, c] : counts_.kv)
            if (k <= 0 || c < 0) throw std::invalid_argument("invalid cycle type entry");
        if (counts_.weighted_sum() != n_)
            throw std::invalid_argument("cycle type multiplicities do not sum to n");
    }

    std::int64_t n_ = 0;
    SparseCounts counts_;
};

// One-line notation; image[i] is the image of i, 0-based internally.
class Permutation {
  public:
    Permutation() = default;
    explicit Permutation(std::vector<std::int32_t> image) : image_(std::move(image)) { validate(); }

    static Permutation identity(std::int64_t n) {
        std::vector<std::int32_t> im(static_cast<std::size_t>(n));
        for (std::size_t i = 0; i < im.size(); ++i) im[i] = static_cast<std::int32_t>(i);
        return Permutation(std::move(im));
    }

    // one-based one-line notation, e.g. {2,1,3}
    static Permutation from_one_based(const std::vector<std::int64_t>& v) {
        std::vector<std::int32_t> im(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (v[i] < 1 || v[i] > static_cast<std::int64_t>(v.size()))
                throw std::invalid_argument("one-line entry out of range");
            im[i] = static_cast<std::int32_t>(v[i] - 1);
        }
        return Permutation(std::move(im));
    }

    std::int64_t size() const { return static_cast<std::int64_t>(image_.size()); }
    std::int32_t operator()(std::int32_t i) const { return image_[static_cast<std::size_t>(i)]; }
    const std::vector<std::int32_t>& image() const { return image_; }

    bool is_involution() const {
        for (std::size_t i = 0; i < image_.size(); ++i)
            if (image_[static_cast<std::size_t>(image_[i])] != static_cast<std::int32_t>(i)) return false;
        return true;
    }

    bool operator==(const Permutation&) const = default;

  private:
    void validate() const {
        std::vector<bool> seen(image_.size(), false);
        for (auto v : image_) {
            if (v < 0 || v >= static_cast<std::int32_t>(image_.size()) || seen[static_cast<std::size_t>(v)])
                throw std::invalid_argument("one-line notation is not a bijection");
            seen[static_cast<std::size_t>(v)] = true;
        }
    }
    std::vector<std::int32_t> image_;
};

inline CycleType cycle_type_of(const Permutation& p) {
    const auto n = p.size();
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    SparseCounts sc;
    for (std::int32_t i = 0; i < n; ++i) {
        if (seen[static_cast<std::size_t>(i)]) continue;
        std::int64_t len = 0;
        std::int32_t j = i;
        while (!seen[static_cast<std::size_t>(j)]) {
            seen[static_cast<std::size_t>(j)] = true;
            j = p(j);
            ++len;
        }
        sc.add(len, 1);
    }
    return CycleType(n, std::move(sc));
}

}  // namespace involab
