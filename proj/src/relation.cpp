#include "loopsmith/relation.hpp"

#include <algorithm>
#include <numeric>

namespace loopsmith {

Bits::Bits(int n, bool fill) : n_(n), w_((n + 63) / 64, fill ? ~uint64_t(0) : 0) { trim(); }

void Bits::trim() {
    if (n_ % 64 && !w_.empty()) w_.back() &= (uint64_t(1) << (n_ % 64)) - 1;
}

int Bits::count() const {
    int c = 0;
    for (auto x : w_) c += __builtin_popcountll(x);
    return c;
}

bool Bits::any() const {
    for (auto x : w_)
        if (x) return true;
    return false;
}

bool Bits::subset_of(const Bits& o) const {
    for (size_t i = 0; i < w_.size(); ++i)
        if (w_[i] & ~o.w_[i]) return false;
    return true;
}

bool Bits::intersects(const Bits& o) const {
    for (size_t i = 0; i < w_.size(); ++i)
        if (w_[i] & o.w_[i]) return true;
    return false;
}

Bits& Bits::operator|=(const Bits& o) {
    for (size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
    return *this;
}
Bits& Bits::operator&=(const Bits& o) {
    for (size_t i = 0; i < w_.size(); ++i) w_[i] &= o.w_[i];
    return *this;
}
Bits& Bits::operator-=(const Bits& o) {
    for (size_t i = 0; i < w_.size(); ++i) w_[i] &= ~o.w_[i];
    return *this;
}

Bits Bits::complement() const {
    Bits r = *this;
    for (auto& x : r.w_) x = ~x;
    r.trim();
    return r;
}

std::vector<int> Bits::elements() const {
    std::vector<int> out;
    for_each([&](int i) { out.push_back(i); });
    return out;
}

int Bits::first() const {
    for (size_t k = 0; k < w_.size(); ++k)
        if (w_[k]) return int(k * 64 + __builtin_ctzll(w_[k]));
    return -1;
}

Bits Bits::from(int n, const std::vector<int>& xs) {
    Bits b(n);
    for (int x : xs) b.set(x);
    return b;
}

BinRel BinRel::identity(int n) {
    BinRel r(n);
    for (int i = 0; i < n; ++i) r.set(i, i);
    return r;
}

BinRel BinRel::full(int n) {
    BinRel r(n);
    for (int i = 0; i < n; ++i) r.rows_[i] = Bits(n, true);
    return r;
}

BinRel BinRel::from_pairs(int n, const std::vector<std::pair<int, int>>& ps) {
    BinRel r(n);
    for (auto [a, b] : ps) {
        if (a < 0 || b < 0 || a >= n || b >= n) throw std::out_of_range("pair outside domain");
        r.set(a, b);
    }
    return r;
}

int BinRel::count() const {
    int c = 0;
    for (auto& r : rows_) c += r.count();
    return c;
}

std::vector<std::pair<int, int>> BinRel::pairs() const {
    std::vector<std::pair<int, int>> out;
    for (int a = 0; a < n_; ++a) rows_[a].for_each([&](int b) { out.emplace_back(a, b); });
    return out;
}

void BinRel::check(const BinRel& o) const {
    if (n_ != o.n_) throw std::invalid_argument("domain size mismatch");
}

BinRel BinRel::compose(const BinRel& o) const {
    check(o);
    BinRel r(n_);
    for (int a = 0; a < n_; ++a) rows_[a].for_each([&](int b) { r.rows_[a] |= o.rows_[b]; });
    return r;
}

BinRel BinRel::inverse() const {
    BinRel r(n_);
    for (int a = 0; a < n_; ++a) rows_[a].for_each([&](int b) { r.set(b, a); });
    return r;
}

BinRel BinRel::operator&(const BinRel& o) const {
    check(o);
    BinRel r = *this;
    for (int a = 0; a < n_; ++a) r.rows_[a] &= o.rows_[a];
    return r;
}

BinRel BinRel::operator|(const BinRel& o) const {
    check(o);
    BinRel r = *this;
    for (int a = 0; a < n_; ++a) r.rows_[a] |= o.rows_[a];
    return r;
}

BinRel BinRel::power(int k) const {
    if (k < 0) throw std::invalid_argument("negative power");
    BinRel r = identity(n_);
    for (int i = 0; i < k; ++i) r = r.compose(*this);
    return r;
}

BinRel BinRel::restrict(const Bits& s) const {
    BinRel r(n_);
    s.for_each([&](int a) { r.rows_[a] = rows_[a] & s; });
    return r;
}

Bits BinRel::image(const Bits& s) const {
    Bits out(n_);
    s.for_each([&](int a) { out |= rows_[a]; });
    return out;
}

Bits BinRel::preimage(const Bits& s) const {
    Bits out(n_);
    for (int a = 0; a < n_; ++a)
        if (rows_[a].intersects(s)) out.set(a);
    return out;
}

Bits BinRel::domain() const {
    Bits out(n_);
    for (int a = 0; a < n_; ++a)
        if (rows_[a].any()) out.set(a);
    return out;
}

Bits BinRel::range() const {
    Bits out(n_);
    for (auto& r : rows_) out |= r;
    return out;
}

bool BinRel::is_reflexive() const {
    for (int a = 0; a < n_; ++a)
        if (!test(a, a)) return false;
    return true;
}

bool BinRel::is_symmetric() const { return *this == inverse(); }

bool BinRel::is_transitive() const { return compose(*this).subset_of(*this); }

BinRel BinRel::transitive_closure() const {
    BinRel r = *this;
    // Warshall on rows
    for (int k = 0; k < n_; ++k)
        for (int a = 0; a < n_; ++a)
            if (r.test(a, k)) r.rows_[a] |= r.rows_[k];
    return r;
}

bool BinRel::subset_of(const BinRel& o) const {
    check(o);
    for (int a = 0; a < n_; ++a)
        if (!rows_[a].subset_of(o.rows_[a])) return false;
    return true;
}

BinRel relation_algebra(RelOp op, const std::vector<BinRel>& args, int k, const Bits* set) {
    auto need = [&](size_t m) {
        if (args.size() < m) throw std::invalid_argument("relation_algebra: missing argument");
    };
    switch (op) {
        case RelOp::Compose: {
            need(1);
            BinRel r = args[0];
            for (size_t i = 1; i < args.size(); ++i) r = r.compose(args[i]);
            return r;
        }
        case RelOp::Inverse: need(1); return args[0].inverse();
        case RelOp::Intersect: {
            need(1);
            BinRel r = args[0];
            for (size_t i = 1; i < args.size(); ++i) r = r & args[i];
            return r;
        }
        case RelOp::Union: {
            need(1);
            BinRel r = args[0];
            for (size_t i = 1; i < args.size(); ++i) r = r | args[i];
            return r;
        }
        case RelOp::Power: need(1); return args[0].power(k);
        case RelOp::Restrict:
            need(1);
            if (!set || set->size() != args[0].size()) throw std::invalid_argument("domain size mismatch");
            return args[0].restrict(*set);
    }
    throw std::invalid_argument("unknown op");
}

std::vector<std::vector<int>> equivalence_classes(const BinRel& eq) {
    std::vector<std::vector<int>> out;
    Bits seen(eq.size());
    for (int a = 0; a < eq.size(); ++a) {
        if (seen.test(a)) continue;
        Bits c = eq.row(a);
        seen |= c;
        out.push_back(c.elements());
    }
    return out;
}

// ---- KaryRel ----

namespace {
struct TupleLess {
    const std::vector<int>* d;
    int k;
    bool operator()(size_t a, size_t b) const {
        return std::lexicographical_compare(d->begin() + a * k, d->begin() + (a + 1) * k, d->begin() + b * k,
                                            d->begin() + (b + 1) * k);
    }
};
}  // namespace

void KaryRel::normalize() {
    if (arity_ == 0) return;
    size_t m = data_.size() / arity_;
    if (m < 2) return;
    // fast path: already strictly sorted
    bool sorted = true;
    for (size_t i = 1; i < m && sorted; ++i)
        sorted = std::lexicographical_compare(data_.begin() + (i - 1) * arity_, data_.begin() + i * arity_,
                                              data_.begin() + i * arity_, data_.begin() + (i + 1) * arity_);
    if (sorted) return;
    if (arity_ == 1) {
        std::sort(data_.begin(), data_.end());
        data_.erase(std::unique(data_.begin(), data_.end()), data_.end());
        return;
    }
    if (arity_ == 2) {
        std::vector<uint64_t> keys(m);
        for (size_t i = 0; i < m; ++i) keys[i] = (uint64_t(uint32_t(data_[2 * i])) << 32) | uint32_t(data_[2 * i + 1]);
        std::sort(keys.begin(), keys.end());
        keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
        data_.resize(keys.size() * 2);
        for (size_t i = 0; i < keys.size(); ++i) {
            data_[2 * i] = int(keys[i] >> 32);
            data_[2 * i + 1] = int(uint32_t(keys[i]));
        }
        return;
    }
    int bits = 1;
    while ((1 << bits) < n_) ++bits;
    if (bits * arity_ <= 64) {
        std::vector<uint64_t> keys(m);
        for (size_t i = 0; i < m; ++i) {
            uint64_t key = 0;
            for (int j = 0; j < arity_; ++j) key = (key << bits) | uint64_t(data_[i * arity_ + j]);
            keys[i] = key;
        }
        std::sort(keys.begin(), keys.end());
        keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
        data_.resize(keys.size() * arity_);
        uint64_t mask = (bits == 64) ? ~uint64_t(0) : ((uint64_t(1) << bits) - 1);
        for (size_t i = 0; i < keys.size(); ++i) {
            uint64_t key = keys[i];
            for (int j = arity_ - 1; j >= 0; --j) {
                data_[i * arity_ + j] = int(key & mask);
                key >>= bits;
            }
        }
        return;
    }
    std::vector<size_t> idx(m);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), TupleLess{&data_, arity_});
    std::vector<int> out;
    out.reserve(data_.size());
    for (size_t j = 0; j < m; ++j) {
        const int* t = data_.data() + idx[j] * arity_;
        if (!out.empty() && std::equal(t, t + arity_, out.end() - arity_)) continue;
        out.insert(out.end(), t, t + arity_);
    }
    data_.swap(out);
}

bool KaryRel::contains(const int* t) const {
    if (arity_ == 0) return nullary_;
    size_t lo = 0, hi = size();
    while (lo < hi) {
        size_t mid = (lo + hi) / 2;
        const int* m = tuple(mid);
        if (std::lexicographical_compare(m, m + arity_, t, t + arity_))
            lo = mid + 1;
        else
            hi = mid;
    }
    return lo < size() && std::equal(t, t + arity_, tuple(lo));
}

KaryRel KaryRel::full(int n, int arity) {
    KaryRel r(n, arity);
    if (arity == 0) {
        r.nullary_ = true;
        return r;
    }
    size_t total = 1;
    for (int i = 0; i < arity; ++i) total *= size_t(n);
    r.data_.reserve(total * arity);
    std::vector<int> t(arity, 0);
    for (size_t c = 0; c < total; ++c) {
        r.data_.insert(r.data_.end(), t.begin(), t.end());
        for (int i = arity - 1; i >= 0; --i) {
            if (++t[i] < n) break;
            t[i] = 0;
        }
    }
    return r;
}

KaryRel KaryRel::from_bin(const BinRel& b) {
    KaryRel r(b.size(), 2);
    for (auto [x, y] : b.pairs()) {
        r.data_.push_back(x);
        r.data_.push_back(y);
    }
    return r;
}

KaryRel KaryRel::from_set(const Bits& s) {
    KaryRel r(s.size(), 1);
    s.for_each([&](int x) { r.data_.push_back(x); });
    return r;
}

KaryRel KaryRel::from_tuples(int n, int arity, const std::vector<std::vector<int>>& ts) {
    KaryRel r(n, arity);
    for (auto& t : ts) {
        if (int(t.size()) != arity) throw std::invalid_argument("tuple arity mismatch");
        for (int x : t)
            if (x < 0 || x >= n) throw std::out_of_range("tuple entry outside domain");
        r.push(t);
    }
    r.normalize();
    return r;
}

KaryRel KaryRel::from_flat(int n, int arity, std::vector<int> data) {
    KaryRel r(n, arity);
    if (arity == 0) {
        r.nullary_ = true;
        return r;
    }
    r.data_ = std::move(data);
    r.normalize();
    return r;
}

BinRel KaryRel::to_bin() const {
    if (arity_ != 2) throw std::invalid_argument("to_bin on non-binary relation");
    BinRel b(n_);
    for (size_t i = 0; i < size(); ++i) b.set(tuple(i)[0], tuple(i)[1]);
    return b;
}

Bits KaryRel::to_set() const {
    if (arity_ != 1) throw std::invalid_argument("to_set on non-unary relation");
    Bits b(n_);
    for (int x : data_) b.set(x);
    return b;
}

bool KaryRel::is_full() const {
    if (arity_ == 0) return nullary_;
    double total = 1;
    for (int i = 0; i < arity_; ++i) total *= n_;
    return double(size()) == total;
}

KaryRel KaryRel::intersect(const KaryRel& o) const {
    if (o.arity_ != arity_ || o.n_ != n_) throw std::invalid_argument("intersect: shape mismatch");
    KaryRel r(n_, arity_);
    if (arity_ == 0) {
        r.nullary_ = nullary_ && o.nullary_;
        return r;
    }
    size_t i = 0, j = 0;
    while (i < size() && j < o.size()) {
        const int* a = tuple(i);
        const int* b = o.tuple(j);
        if (std::lexicographical_compare(a, a + arity_, b, b + arity_))
            ++i;
        else if (std::lexicographical_compare(b, b + arity_, a, a + arity_))
            ++j;
        else {
            r.data_.insert(r.data_.end(), a, a + arity_);
            ++i, ++j;
        }
    }
    return r;
}

KaryRel KaryRel::unite(const KaryRel& o) const {
    if (o.arity_ != arity_ || o.n_ != n_) throw std::invalid_argument("unite: shape mismatch");
    KaryRel r = *this;
    r.data_.insert(r.data_.end(), o.data_.begin(), o.data_.end());
    r.nullary_ = nullary_ || o.nullary_;
    r.normalize();
    return r;
}

bool KaryRel::subset_of(const KaryRel& o) const {
    for (size_t i = 0; i < size(); ++i)
        if (!o.contains(tuple(i))) return false;
    return arity_ != 0 || !nullary_ || o.nullary_;
}

KaryRel KaryRel::project(const std::vector<int>& cols) const {
    KaryRel r(n_, int(cols.size()));
    if (cols.empty()) {
        r.nullary_ = !empty();
        return r;
    }
    r.data_.reserve(size() * cols.size());
    for (size_t i = 0; i < size(); ++i) {
        const int* t = tuple(i);
        for (int c : cols) r.data_.push_back(t[c]);
    }
    r.normalize();
    return r;
}

bool is_totally_symmetric(const KaryRel& r) {
    int k = r.arity();
    if (k < 2) return true;
    std::vector<int> t(k);
    for (size_t i = 0; i < r.size(); ++i) {
        const int* s = r.tuple(i);
        // adjacent transpositions generate the symmetric group
        for (int j = 0; j + 1 < k; ++j) {
            std::copy(s, s + k, t.begin());
            std::swap(t[j], t[j + 1]);
            if (!r.contains(t)) return false;
        }
    }
    return true;
}

bool is_totally_reflexive(const KaryRel& r) {
    int k = r.arity(), n = r.domain();
    if (k < 2) return true;
    std::vector<int> t(k, 0);
    size_t total = 1;
    for (int i = 0; i < k; ++i) total *= size_t(n);
    for (size_t c = 0; c < total; ++c) {
        bool rep = false;
        for (int i = 0; i < k && !rep; ++i)
            for (int j = i + 1; j < k && !rep; ++j) rep = t[i] == t[j];
        if (rep && !r.contains(t)) return false;
        for (int i = k - 1; i >= 0; --i) {
            if (++t[i] < n) break;
            t[i] = 0;
        }
    }
    return true;
}

}  // namespace loopsmith
