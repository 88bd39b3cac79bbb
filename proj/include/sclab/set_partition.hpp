#pragma once

#include <cstdint>
#include <iterator>
#include <string>
#include <vector>

#include "sclab/error.hpp"

namespace sclab {

/// Largest ground set for which exhaustive partition enumeration is allowed
/// (Bell(14) is about 1.9e8).
inline constexpr int kMaxPartitionGround = 14;

/// Partition of {0, ..., k-1} stored as a restricted-growth sequence:
/// element i belongs to block rgs[i], and block b first appears only after
/// blocks 0..b-1 have appeared.
class SetPartition {
public:
    SetPartition() = default;

    explicit SetPartition(std::vector<int> rgs) : rgs_(std::move(rgs)) {
        int next = 0;
        for (std::size_t i = 0; i < rgs_.size(); ++i) {
            require(rgs_[i] >= 0 && rgs_[i] <= next,
                    "SetPartition: not a restricted-growth sequence at position " + std::to_string(i));
            if (rgs_[i] == next) ++next;
        }
        blocks_ = next;
    }

    /// Builds the partition from explicit blocks of 0-based elements. Blocks must be
    /// nonempty, disjoint, and cover {0..k-1}.
    static SetPartition from_blocks(const std::vector<std::vector<int>>& blocks, int k) {
        std::vector<int> owner(static_cast<std::size_t>(k), -1);
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            require(!blocks[b].empty(), "SetPartition: empty block");
            for (int e : blocks[b]) {
                require(e >= 0 && e < k, "SetPartition: element " + std::to_string(e) + " outside ground set");
                require(owner[static_cast<std::size_t>(e)] < 0,
                        "SetPartition: element " + std::to_string(e) + " in two blocks");
                owner[static_cast<std::size_t>(e)] = static_cast<int>(b);
            }
        }
        std::vector<int> relabel(blocks.size(), -1);
        std::vector<int> rgs(static_cast<std::size_t>(k));
        int next = 0;
        for (int i = 0; i < k; ++i) {
            const int b = owner[static_cast<std::size_t>(i)];
            require(b >= 0, "SetPartition: element " + std::to_string(i) + " not covered");
            if (relabel[static_cast<std::size_t>(b)] < 0) relabel[static_cast<std::size_t>(b)] = next++;
            rgs[static_cast<std::size_t>(i)] = relabel[static_cast<std::size_t>(b)];
        }
        return SetPartition(std::move(rgs));
    }

    int ground_size() const { return static_cast<int>(rgs_.size()); }
    int block_count() const { return blocks_; }
    int block_of(int element) const { return rgs_[static_cast<std::size_t>(element)]; }
    const std::vector<int>& rgs() const { return rgs_; }

    std::vector<std::vector<int>> blocks() const {
        std::vector<std::vector<int>> out(static_cast<std::size_t>(blocks_));
        for (int i = 0; i < ground_size(); ++i) out[static_cast<std::size_t>(rgs_[static_cast<std::size_t>(i)])].push_back(i);
        return out;
    }

    friend bool operator==(const SetPartition&, const SetPartition&) = default;

private:
    std::vector<int> rgs_;
    int blocks_ = 0;
};

/// Input range over all partitions of {0..k-1} in lexicographic
/// restricted-growth order. Starts at the one-block partition 00...0 and ends
/// at the discrete partition 01...(k-1).
class Partitions {
public:
    explicit Partitions(int k, int max_ground = kMaxPartitionGround) : k_(k) {
        require(k >= 1 && k <= max_ground,
                "enumerate_partitions: k=" + std::to_string(k) + " outside [1, " + std::to_string(max_ground) + "]");
    }

    class iterator {
    public:
        using iterator_category = std::input_iterator_tag;
        using value_type = SetPartition;
        using difference_type = std::ptrdiff_t;
        using pointer = const SetPartition*;
        using reference = const SetPartition&;

        iterator() = default;
        explicit iterator(int k) : rgs_(static_cast<std::size_t>(k), 0), prefix_max_(static_cast<std::size_t>(k), 0), done_(false) {
            current_ = SetPartition(rgs_);
        }

        reference operator*() const { return current_; }
        pointer operator->() const { return &current_; }

        iterator& operator++() {
            advance();
            return *this;
        }
        void operator++(int) { advance(); }

        friend bool operator==(const iterator& it, std::default_sentinel_t) { return it.done_; }

    private:
        void advance() {
            const int k = static_cast<int>(rgs_.size());
            int i = k - 1;
            while (i >= 1 && rgs_[static_cast<std::size_t>(i)] > prefix_max_[static_cast<std::size_t>(i - 1)]) --i;
            if (i < 1) {
                done_ = true;
                return;
            }
            ++rgs_[static_cast<std::size_t>(i)];
            prefix_max_[static_cast<std::size_t>(i)] =
                std::max(prefix_max_[static_cast<std::size_t>(i - 1)], rgs_[static_cast<std::size_t>(i)]);
            for (int j = i + 1; j < k; ++j) {
                rgs_[static_cast<std::size_t>(j)] = 0;
                prefix_max_[static_cast<std::size_t>(j)] = prefix_max_[static_cast<std::size_t>(i)];
            }
            current_ = SetPartition(rgs_);
        }

        std::vector<int> rgs_;
        std::vector<int> prefix_max_;
        SetPartition current_;
        bool done_ = true;
    };

    iterator begin() const { return iterator(k_); }
    std::default_sentinel_t end() const { return {}; }

private:
    int k_;
};

inline Partitions enumerate_partitions(int k) { return Partitions(k); }

/// Catalan number binomial(2m, m)/(m+1), exact for m <= 30.
inline std::uint64_t catalan(int m) {
    require(m >= 0, "catalan: negative argument");
    require(m <= 30, "catalan: m=" + std::to_string(m) + " overflows 64-bit (limit 30)");
    __uint128_t c = 1;
    for (int n = 0; n < m; ++n) c = c * static_cast<__uint128_t>(2 * (2 * n + 1)) / static_cast<__uint128_t>(n + 2);
    return static_cast<std::uint64_t>(c);
}

}  // namespace sclab
