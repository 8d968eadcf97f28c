#ifndef LOOPSMITH_RELATION_HPP
#define LOOPSMITH_RELATION_HPP

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace loopsmith {

// Fixed-size bitset over 0..n-1, used for vertex sets and matrix rows.
class Bits {
public:
    Bits() = default;
    explicit Bits(int n, bool fill = false);

    int size() const { return n_; }
    bool test(int i) const { return (w_[i >> 6] >> (i & 63)) & 1u; }
    void set(int i) { w_[i >> 6] |= uint64_t(1) << (i & 63); }
    void reset(int i) { w_[i >> 6] &= ~(uint64_t(1) << (i & 63)); }
    void assign(int i, bool v) { v ? set(i) : reset(i); }

    int count() const;
    bool any() const;
    bool none() const { return !any(); }
    bool all() const { return count() == n_; }
    bool subset_of(const Bits& o) const;
    bool intersects(const Bits& o) const;

    Bits& operator|=(const Bits& o);
    Bits& operator&=(const Bits& o);
    Bits& operator-=(const Bits& o);
    Bits operator|(const Bits& o) const { Bits r = *this; r |= o; return r; }
    Bits operator&(const Bits& o) const { Bits r = *this; r &= o; return r; }
    Bits operator-(const Bits& o) const { Bits r = *this; r -= o; return r; }
    Bits complement() const;
    bool operator==(const Bits& o) const { return n_ == o.n_ && w_ == o.w_; }
    bool operator!=(const Bits& o) const { return !(*this == o); }
    bool operator<(const Bits& o) const { return w_ < o.w_; }

    std::vector<int> elements() const;
    int first() const;
    static Bits from(int n, const std::vector<int>& xs);

    template <class F>
    void for_each(F&& f) const {
        for (size_t k = 0; k < w_.size(); ++k) {
            uint64_t x = w_[k];
            while (x) {
                int b = __builtin_ctzll(x);
                f(int(k * 64 + b));
                x &= x - 1;
            }
        }
    }

    const std::vector<uint64_t>& words() const { return w_; }

private:
    void trim();
    int n_ = 0;
    std::vector<uint64_t> w_;
};

// Binary relation on 0..n-1 stored as a bit matrix (row i = successors of i).
class BinRel {
public:
    BinRel() = default;
    explicit BinRel(int n) : n_(n), rows_(n, Bits(n)) {}

    static BinRel identity(int n);
    static BinRel full(int n);
    static BinRel from_pairs(int n, const std::vector<std::pair<int, int>>& ps);

    int size() const { return n_; }
    bool test(int a, int b) const { return rows_[a].test(b); }
    void set(int a, int b) { rows_[a].set(b); }
    void reset(int a, int b) { rows_[a].reset(b); }
    const Bits& row(int a) const { return rows_[a]; }
    Bits& row(int a) { return rows_[a]; }

    int count() const;
    bool empty() const { return count() == 0; }
    bool is_full() const { return count() == n_ * n_; }
    std::vector<std::pair<int, int>> pairs() const;

    BinRel compose(const BinRel& o) const;  // {(a,c) : a R b, b S c}
    BinRel inverse() const;
    BinRel operator&(const BinRel& o) const;
    BinRel operator|(const BinRel& o) const;
    BinRel power(int k) const;
    BinRel restrict(const Bits& s) const;  // R ∩ (s × s)
    Bits image(const Bits& s) const;       // s + R
    Bits preimage(const Bits& s) const;    // s − R
    Bits domain() const;
    Bits range() const;

    bool is_reflexive() const;
    bool is_symmetric() const;
    bool is_transitive() const;
    bool is_equivalence() const { return is_reflexive() && is_symmetric() && is_transitive(); }
    BinRel transitive_closure() const;

    bool operator==(const BinRel& o) const { return n_ == o.n_ && rows_ == o.rows_; }
    bool operator!=(const BinRel& o) const { return !(*this == o); }
    bool subset_of(const BinRel& o) const;

private:
    void check(const BinRel& o) const;
    int n_ = 0;
    std::vector<Bits> rows_;
};

enum class RelOp { Compose, Inverse, Intersect, Union, Power, Restrict };

// Dispatcher over the binary relation algebra.
BinRel relation_algebra(RelOp op, const std::vector<BinRel>& args, int k = 0, const Bits* set = nullptr);

std::vector<std::vector<int>> equivalence_classes(const BinRel& eq);

// k-ary relation over 0..n-1 as sorted unique tuples (flat storage).
class KaryRel {
public:
    KaryRel() = default;
    KaryRel(int n, int arity) : n_(n), arity_(arity) {}

    int domain() const { return n_; }
    int arity() const { return arity_; }
    size_t size() const { return arity_ == 0 ? (nullary_ ? 1 : 0) : data_.size() / arity_; }
    bool empty() const { return size() == 0; }
    const int* tuple(size_t i) const { return data_.data() + i * arity_; }
    std::vector<int> at(size_t i) const { return {tuple(i), tuple(i) + arity_}; }
    bool contains(const int* t) const;
    bool contains(const std::vector<int>& t) const { return contains(t.data()); }

    // Unsorted appends; call normalize() before queries.
    void push(const int* t) { if (arity_ == 0) nullary_ = true; else data_.insert(data_.end(), t, t + arity_); }
    void push(const std::vector<int>& t) { push(t.data()); }
    void normalize();
    void reserve(size_t tuples) { data_.reserve(tuples * arity_); }

    static KaryRel full(int n, int arity);
    static KaryRel from_bin(const BinRel& r);
    static KaryRel from_set(const Bits& s);
    static KaryRel from_tuples(int n, int arity, const std::vector<std::vector<int>>& ts);
    // Takes flat row-major data; rows are sorted and deduplicated.
    static KaryRel from_flat(int n, int arity, std::vector<int> data);
    static KaryRel nullary(int n, bool value) { KaryRel r(n, 0); r.nullary_ = value; return r; }
    BinRel to_bin() const;
    Bits to_set() const;
    bool is_full() const;

    KaryRel intersect(const KaryRel& o) const;
    KaryRel unite(const KaryRel& o) const;
    bool subset_of(const KaryRel& o) const;
    KaryRel project(const std::vector<int>& cols) const;
    KaryRel permute(const std::vector<int>& perm) const { return project(perm); }

    bool operator==(const KaryRel& o) const {
        return n_ == o.n_ && arity_ == o.arity_ && data_ == o.data_ && nullary_ == o.nullary_;
    }
    bool operator!=(const KaryRel& o) const { return !(*this == o); }
    const std::vector<int>& raw() const { return data_; }

private:
    int n_ = 0;
    int arity_ = 0;
    bool nullary_ = false;
    std::vector<int> data_;
};

bool is_totally_symmetric(const KaryRel& r);
bool is_totally_reflexive(const KaryRel& r);

}  // namespace loopsmith

#endif
