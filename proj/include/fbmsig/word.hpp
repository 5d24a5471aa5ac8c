#pragma once

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace fbmsig {

/// A multi-index (i_1, ..., i_k) over the alphabet {1, ..., d}. The empty
/// word is the key of the order-0 signature component.
class Word {
public:
    Word(int alphabet, std::vector<int> letters);
    Word(int alphabet, std::initializer_list<int> letters) : Word(alphabet, std::vector<int>(letters)) {}
    explicit Word(int alphabet) : Word(alphabet, std::vector<int>{}) {}

    /// Word made of `length` copies of `letter`.
    static Word repeated(int alphabet, int letter, std::size_t length);

    int alphabet() const noexcept { return alphabet_; }
    std::size_t length() const noexcept { return letters_.size(); }
    bool empty() const noexcept { return letters_.empty(); }
    const std::vector<int>& letters() const noexcept { return letters_; }
    int operator[](std::size_t i) const { return letters_[i]; }

    Word concat(const Word& other) const;
    Word append(int letter) const;

    /// Dot-joined letters, empty string for the empty word.
    std::string to_string() const;

    /// Ordered by alphabet, then length, then lexicographically: the column
    /// order of signature design matrices.
    friend std::strong_ordering operator<=>(const Word& a, const Word& b);
    friend bool operator==(const Word& a, const Word& b) = default;

private:
    int alphabet_;
    std::vector<int> letters_;
};

Word parse_word(const std::string& text, int alphabet);

/// Position of `w` inside its level: sum_j (i_j - 1) d^{|w| - j}.
std::size_t word_index(const Word& w);

/// Inverse of word_index within level `length`.
Word word_at(int alphabet, std::size_t length, std::size_t index);

/// Number of signature components of orders 0..depth over d letters.
std::size_t predictor_count(int d, int depth);

/// All words of length 0..depth in level-then-lexicographic order.
std::vector<Word> all_words(int d, int depth);

/// d^k as an exact integer.
std::size_t int_pow(std::size_t base, std::size_t exp);

}  // namespace fbmsig
