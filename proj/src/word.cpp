#include "fbmsig/word.hpp"

#include <sstream>
#include <stdexcept>

namespace fbmsig {

Word::Word(int alphabet, std::vector<int> letters) : alphabet_(alphabet), letters_(std::move(letters)) {
    if (alphabet_ < 1) throw std::invalid_argument("Word: alphabet size must be positive");
    for (int l : letters_)
        if (l < 1 || l > alphabet_)
            throw std::out_of_range("Word: letter " + std::to_string(l) + " outside {1.." +
                                    std::to_string(alphabet_) + "}");
}

Word Word::repeated(int alphabet, int letter, std::size_t length) {
    return Word(alphabet, std::vector<int>(length, letter));
}

Word Word::concat(const Word& other) const {
    if (other.alphabet_ != alphabet_) throw std::invalid_argument("Word::concat: alphabet mismatch");
    std::vector<int> l = letters_;
    l.insert(l.end(), other.letters_.begin(), other.letters_.end());
    return Word(alphabet_, std::move(l));
}

Word Word::append(int letter) const {
    std::vector<int> l = letters_;
    l.push_back(letter);
    return Word(alphabet_, std::move(l));
}

std::string Word::to_string() const {
    std::string out;
    for (std::size_t i = 0; i < letters_.size(); ++i) {
        if (i) out += '.';
        out += std::to_string(letters_[i]);
    }
    return out;
}

std::strong_ordering operator<=>(const Word& a, const Word& b) {
    if (auto c = a.alphabet_ <=> b.alphabet_; c != 0) return c;
    if (auto c = a.letters_.size() <=> b.letters_.size(); c != 0) return c;
    return a.letters_ <=> b.letters_;
}

Word parse_word(const std::string& text, int alphabet) {
    std::vector<int> letters;
    if (!text.empty()) {
        std::istringstream ss(text);
        std::string part;
        while (std::getline(ss, part, '.')) {
            std::size_t used = 0;
            int v = 0;
            try {
                v = std::stoi(part, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (part.empty() || used != part.size())
                throw std::invalid_argument("parse_word: malformed word '" + text + "'");
            letters.push_back(v);
        }
    }
    return Word(alphabet, std::move(letters));
}

std::size_t int_pow(std::size_t base, std::size_t exp) {
    std::size_t r = 1;
    for (std::size_t i = 0; i < exp; ++i) r *= base;
    return r;
}

std::size_t word_index(const Word& w) {
    std::size_t idx = 0;
    const auto d = static_cast<std::size_t>(w.alphabet());
    for (int l : w.letters()) idx = idx * d + static_cast<std::size_t>(l - 1);
    return idx;
}

Word word_at(int alphabet, std::size_t length, std::size_t index) {
    const auto d = static_cast<std::size_t>(alphabet);
    if (index >= int_pow(d, length)) throw std::out_of_range("word_at: index beyond level size");
    std::vector<int> letters(length);
    for (std::size_t j = length; j-- > 0;) {
        letters[j] = static_cast<int>(index % d) + 1;
        index /= d;
    }
    return Word(alphabet, std::move(letters));
}

std::size_t predictor_count(int d, int depth) {
    if (d < 1 || depth < 0) throw std::invalid_argument("predictor_count: need d >= 1 and depth >= 0");
    if (d == 1) return static_cast<std::size_t>(depth) + 1;
    const auto dd = static_cast<std::size_t>(d);
    return (int_pow(dd, static_cast<std::size_t>(depth) + 1) - 1) / (dd - 1);
}

std::vector<Word> all_words(int d, int depth) {
    std::vector<Word> out;
    out.reserve(predictor_count(d, depth));
    for (int k = 0; k <= depth; ++k) {
        const std::size_t n = int_pow(static_cast<std::size_t>(d), static_cast<std::size_t>(k));
        for (std::size_t i = 0; i < n; ++i) out.push_back(word_at(d, static_cast<std::size_t>(k), i));
    }
    return out;
}

}  // namespace fbmsig
