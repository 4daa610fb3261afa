#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "threes/core_model.hpp"

namespace threes {

/// Fixed-universe set of variables backed by 64-bit words. Word access is
/// exposed so graph traversals can mask whole rows at once.
class VarSet {
public:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    VarSet() = default;
    explicit VarSet(std::size_t universe) : n_(universe), words_((universe + 63) / 64, 0) {}

    static VarSet full(std::size_t universe) {
        VarSet s(universe);
        for (auto& w : s.words_)
            w = ~std::uint64_t{0};
        s.trim();
        return s;
    }

    std::size_t universe() const noexcept { return n_; }

    bool test(VarId v) const { return test(v.index); }
    bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
    void set(VarId v) { set(v.index); }
    void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
    void reset(VarId v) { reset(v.index); }
    void reset(std::size_t i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }

    std::size_t count() const {
        std::size_t c = 0;
        for (auto w : words_)
            c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }

    bool empty() const {
        for (auto w : words_)
            if (w)
                return false;
        return true;
    }

    bool intersects(const VarSet& o) const {
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & o.words_[i])
                return true;
        return false;
    }

    std::size_t find_first() const { return find_from(0); }
    std::size_t find_next(std::size_t i) const { return find_from(i + 1); }

    std::vector<VarId> members() const {
        std::vector<VarId> out;
        for (std::size_t i = find_first(); i != npos; i = find_next(i))
            out.emplace_back(static_cast<std::uint32_t>(i));
        return out;
    }

    VarSet& operator&=(const VarSet& o) {
        for (std::size_t i = 0; i < words_.size(); ++i)
            words_[i] &= o.words_[i];
        return *this;
    }
    VarSet& operator|=(const VarSet& o) {
        for (std::size_t i = 0; i < words_.size(); ++i)
            words_[i] |= o.words_[i];
        return *this;
    }
    VarSet& operator-=(const VarSet& o) {
        for (std::size_t i = 0; i < words_.size(); ++i)
            words_[i] &= ~o.words_[i];
        return *this;
    }

    friend VarSet operator&(VarSet a, const VarSet& b) { return a &= b; }
    friend VarSet operator|(VarSet a, const VarSet& b) { return a |= b; }
    friend VarSet operator-(VarSet a, const VarSet& b) { return a -= b; }
    friend bool operator==(const VarSet&, const VarSet&) = default;

    std::vector<std::uint64_t>& words() noexcept { return words_; }
    const std::vector<std::uint64_t>& words() const noexcept { return words_; }

private:
    std::size_t find_from(std::size_t i) const {
        if (i >= n_)
            return npos;
        std::size_t w = i >> 6;
        std::uint64_t bits = words_[w] & (~std::uint64_t{0} << (i & 63));
        while (true) {
            if (bits)
                return (w << 6) + static_cast<std::size_t>(std::countr_zero(bits));
            if (++w == words_.size())
                return npos;
            bits = words_[w];
        }
    }

    void trim() {
        if (n_ % 64 && !words_.empty())
            words_.back() &= (std::uint64_t{1} << (n_ % 64)) - 1;
    }

    std::size_t n_ = 0;
    std::vector<std::uint64_t> words_;
};

} // namespace threes
