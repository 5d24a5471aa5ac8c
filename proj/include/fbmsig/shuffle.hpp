#pragma once

#include <cstddef>
#include <map>

#include "fbmsig/signature.hpp"
#include "fbmsig/word.hpp"

namespace fbmsig {

/// Words with positive multiplicities.
struct WordMultiset {
    std::map<Word, std::size_t> entries;

    std::size_t total() const noexcept {
        std::size_t n = 0;
        for (const auto& [w, m] : entries) n += m;
        return n;
    }
};

/// All order-preserving interleavings of i and j, with multiplicity.
WordMultiset shuffle(const Word& i, const Word& j);

/// |S_i S_j - sum_{w in i sh j} S_w| on the given signature.
double shuffle_check(const Signature& sig, const Word& i, const Word& j);

}  // namespace fbmsig
