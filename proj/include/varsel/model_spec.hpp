#pragma once

#include <cstdint>
#include <cstddef>
#include <string>
#include <vector>

#include "varsel/errors.hpp"

namespace varsel {

// A subset of the p candidate regressors: one point of the 2^p model space.
// The intercept is always part of a fitted model and is never a member here.
// Variables are indexed 0..p-1 internally; user-facing text is 1-based.
class ModelSpec {
  public:
    ModelSpec() = default;

    explicit ModelSpec(int width) : width_(width), blocks_((width + 63) / 64, 0) {
        if (width < 0) throw DimensionError("ModelSpec width must be >= 0");
    }

    static ModelSpec from_indices(int width, const std::vector<int>& idx) {
        ModelSpec s(width);
        for (int j : idx) s.set(j, true);
        return s;
    }

    // Low masks only make sense for width <= 64; used by small-p enumeration.
    static ModelSpec from_mask(int width, std::uint64_t mask) {
        ModelSpec s(width);
        if (width > 0) s.blocks_[0] = mask;
        return s;
    }

    int width() const { return width_; }

    bool test(int j) const {
        check_index(j);
        return (blocks_[j >> 6] >> (j & 63)) & 1u;
    }

    void set(int j, bool value) {
        check_index(j);
        std::uint64_t bit = std::uint64_t{1} << (j & 63);
        if (value)
            blocks_[j >> 6] |= bit;
        else
            blocks_[j >> 6] &= ~bit;
    }

    void flip(int j) { set(j, !test(j)); }

    int count() const {
        int c = 0;
        for (std::uint64_t b : blocks_) c += __builtin_popcountll(b);
        return c;
    }

    bool empty() const { return count() == 0; }

    // Ascending indices of the included regressors.
    std::vector<int> indices() const {
        std::vector<int> out;
        out.reserve(static_cast<std::size_t>(count()));
        for (int j = 0; j < width_; ++j)
            if (test(j)) out.push_back(j);
        return out;
    }

    bool operator==(const ModelSpec& o) const {
        return width_ == o.width_ && blocks_ == o.blocks_;
    }
    bool operator!=(const ModelSpec& o) const { return !(*this == o); }

    bool subset_of(const ModelSpec& o) const {
        if (width_ != o.width_) return false;
        for (std::size_t i = 0; i < blocks_.size(); ++i)
            if (blocks_[i] & ~o.blocks_[i]) return false;
        return true;
    }

    std::size_t hash() const {
        std::uint64_t h = 0x9e3779b97f4a7c15ull ^ static_cast<std::uint64_t>(width_);
        for (std::uint64_t b : blocks_) {
            h ^= b + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        }
        return static_cast<std::size_t>(h);
    }

    // Fixed-width bit string, character i = regressor i+1 ('1' = included).
    std::string to_bitstring() const {
        std::string s(static_cast<std::size_t>(width_), '0');
        for (int j = 0; j < width_; ++j)
            if (test(j)) s[static_cast<std::size_t>(j)] = '1';
        return s;
    }

    static ModelSpec from_bitstring(const std::string& s) {
        ModelSpec spec(static_cast<int>(s.size()));
        for (std::size_t j = 0; j < s.size(); ++j) {
            if (s[j] == '1')
                spec.set(static_cast<int>(j), true);
            else if (s[j] != '0')
                throw DimensionError("bad bit string: " + s);
        }
        return spec;
    }

    // 1-based index list, e.g. "{1,3,5}"; "{}" for the null model.
    std::string to_index_string() const {
        std::string s = "{";
        bool first = true;
        for (int j : indices()) {
            if (!first) s += ",";
            s += std::to_string(j + 1);
            first = false;
        }
        return s + "}";
    }

  private:
    void check_index(int j) const {
        if (j < 0 || j >= width_) throw DimensionError("ModelSpec index out of range");
    }

    int width_ = 0;
    std::vector<std::uint64_t> blocks_;
};

struct ModelSpecHash {
    std::size_t operator()(const ModelSpec& s) const { return s.hash(); }
};

// Lexicographic order on the ascending 1-based index lists, so {1,4} < {2,3}.
// Used as the final deterministic tie-break between equal-criterion models.
inline bool spec_lex_less(const ModelSpec& a, const ModelSpec& b) {
    int w = a.width() < b.width() ? a.width() : b.width();
    for (int j = 0; j < w; ++j) {
        bool ja = a.test(j), jb = b.test(j);
        if (ja != jb) return ja; // the one containing the smaller index comes first
    }
    return false;
}

// Full tie rule shared by the search and selection paths: lower score wins,
// then fewer regressors, then lexicographically smaller index list.
inline bool score_spec_better(double score_a, const ModelSpec& a, double score_b,
                              const ModelSpec& b) {
    if (score_a != score_b) return score_a < score_b;
    if (a.count() != b.count()) return a.count() < b.count();
    return spec_lex_less(a, b);
}

} // namespace varsel
