#include "streamq/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace streamq {

void indexed_multiset::insert(double value) {
    if (blocks_.empty()) {
        blocks_.push_back({value});
        block_max_.push_back(value);
        size_ = 1;
        return;
    }

    // First block whose max can absorb the value; values beyond every max
    // go into the last block.
    std::size_t bi = static_cast<std::size_t>(
        std::lower_bound(block_max_.begin(), block_max_.end(), value) - block_max_.begin());
    if (bi == blocks_.size()) bi = blocks_.size() - 1;

    auto& block = blocks_[bi];
    block.insert(std::upper_bound(block.begin(), block.end(), value), value);
    block_max_[bi] = block.back();
    ++size_;

    if (block.size() >= 2 * kBlockTarget) {
        const auto mid = block.begin() + static_cast<std::ptrdiff_t>(block.size() / 2);
        std::vector<double> upper(mid, block.end());
        block.erase(mid, block.end());
        block_max_[bi] = block.back();
        blocks_.insert(blocks_.begin() + static_cast<std::ptrdiff_t>(bi) + 1, std::move(upper));
        block_max_.insert(block_max_.begin() + static_cast<std::ptrdiff_t>(bi) + 1,
                          blocks_[bi + 1].back());
    }
}

double indexed_multiset::kth(std::size_t k) const {
    if (k == 0 || k > size_) {
        throw domain_error("indexed_multiset: rank " + std::to_string(k) + " out of range for " +
                           std::to_string(size_) + " values");
    }
    std::size_t before = 0;
    for (const auto& block : blocks_) {
        if (k <= before + block.size()) {
            return block[k - before - 1];
        }
        before += block.size();
    }
    return blocks_.back().back(); // unreachable: k <= size_
}

void exact_oracle::observe(double datum) {
    if (!std::isfinite(datum)) {
        throw invalid_datum(datum, "exact_oracle");
    }
    values_.insert(datum);
}

double exact_oracle::quantile(double q) const {
    if (!(q > 0.0) || !(q <= 1.0)) {
        throw domain_error("quantile level must be in (0, 1], got " + std::to_string(q));
    }
    if (values_.empty()) {
        throw domain_error("exact_oracle: no observations yet");
    }
    auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values_.size())));
    rank = std::clamp<std::size_t>(rank, 1, values_.size());
    return values_.kth(rank);
}

double exact_quantile(std::vector<double> values, double q) {
    if (!(q > 0.0) || !(q <= 1.0)) {
        throw domain_error("quantile level must be in (0, 1], got " + std::to_string(q));
    }
    if (values.empty()) {
        throw domain_error("exact_quantile: empty batch");
    }
    auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size())));
    rank = std::clamp<std::size_t>(rank, 1, values.size());
    const auto nth = values.begin() + static_cast<std::ptrdiff_t>(rank) - 1;
    std::nth_element(values.begin(), nth, values.end());
    return *nth;
}

} // namespace streamq
