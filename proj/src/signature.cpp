#include "fbmsig/signature.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "fbmsig/shuffle.hpp"

namespace fbmsig {

MultiPath time_augment(const MultiPath& p) {
    Eigen::MatrixXd values(p.dim() + 1, p.size());
    values.row(0) = p.times().transpose();
    values.bottomRows(p.dim()) = p.values();
    return MultiPath(p.times(), std::move(values));
}

void write_signature_csv(std::ostream& os, const Signature& sig) {
    os << "word,value\n";
    char buf[32];
    for (int k = 0; k <= sig.depth(); ++k) {
        const auto& lvl = sig.level(k);
        for (Eigen::Index i = 0; i < lvl.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", lvl[i]);
            os << word_at(sig.dim(), static_cast<std::size_t>(k), static_cast<std::size_t>(i)).to_string() << ','
               << buf << '\n';
        }
    }
}

namespace {

void shuffle_into(const std::vector<int>& a, std::size_t ia, const std::vector<int>& b, std::size_t ib,
                  std::vector<int>& prefix, int alphabet, WordMultiset& out) {
    if (ia == a.size() && ib == b.size()) {
        ++out.entries[Word(alphabet, prefix)];
        return;
    }
    if (ia < a.size()) {
        prefix.push_back(a[ia]);
        shuffle_into(a, ia + 1, b, ib, prefix, alphabet, out);
        prefix.pop_back();
    }
    if (ib < b.size()) {
        prefix.push_back(b[ib]);
        shuffle_into(a, ia, b, ib + 1, prefix, alphabet, out);
        prefix.pop_back();
    }
}

}  // namespace

WordMultiset shuffle(const Word& i, const Word& j) {
    if (i.alphabet() != j.alphabet()) throw std::invalid_argument("shuffle: alphabet mismatch");
    WordMultiset out;
    std::vector<int> prefix;
    prefix.reserve(i.length() + j.length());
    shuffle_into(i.letters(), 0, j.letters(), 0, prefix, i.alphabet(), out);
    return out;
}

double shuffle_check(const Signature& sig, const Word& i, const Word& j) {
    if (i.length() + j.length() > static_cast<std::size_t>(sig.depth()))
        throw std::out_of_range("shuffle_check: |i| + |j| exceeds the truncation depth");
    double rhs = 0.0;
    for (const auto& [w, m] : shuffle(i, j).entries) rhs += static_cast<double>(m) * sig[w];
    return std::abs(sig[i] * sig[j] - rhs);
}

}  // namespace fbmsig
