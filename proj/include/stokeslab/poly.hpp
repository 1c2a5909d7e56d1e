#pragma once

// Sparse multivariate polynomials over C with integer variable ids.
// Monomials are sorted multisets of ids.  Used for observables on g*
// (variables = entries of L) and on the dual group (variables = entries
// of b+ and b-).

#include <algorithm>
#include <iterator>
#include <map>
#include <vector>

#include "common.hpp"

namespace stokeslab {

class Poly {
public:
    using Mono = std::vector<int>;  // sorted ids, repetition = power

    Poly() = default;

    static Poly constant(cplx c) {
        Poly p;
        if (c != cplx(0.0)) p.terms_[{}] = c;
        return p;
    }
    static Poly variable(int id) {
        Poly p;
        p.terms_[{id}] = 1.0;
        return p;
    }

    const std::map<Mono, cplx>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    int degree() const {
        int d = 0;
        for (const auto& [m, c] : terms_) d = std::max(d, (int)m.size());
        return d;
    }

    Poly operator+(const Poly& o) const {
        Poly r = *this;
        for (const auto& [m, c] : o.terms_) r.add(m, c);
        return r;
    }
    Poly operator-(const Poly& o) const {
        Poly r = *this;
        for (const auto& [m, c] : o.terms_) r.add(m, -c);
        return r;
    }
    Poly operator*(cplx s) const {
        Poly r;
        if (s == cplx(0.0)) return r;
        for (const auto& [m, c] : terms_) r.terms_[m] = c * s;
        return r;
    }
    Poly operator*(const Poly& o) const {
        Poly r;
        for (const auto& [m1, c1] : terms_)
            for (const auto& [m2, c2] : o.terms_) {
                Mono m;
                m.reserve(m1.size() + m2.size());
                std::merge(m1.begin(), m1.end(), m2.begin(), m2.end(),
                           std::back_inserter(m));
                r.add(m, c1 * c2);
            }
        return r;
    }

    Poly derivative(int id) const {
        Poly r;
        for (const auto& [m, c] : terms_) {
            int mult = (int)std::count(m.begin(), m.end(), id);
            if (mult == 0) continue;
            Mono rest = m;
            rest.erase(std::find(rest.begin(), rest.end(), id));
            r.add(rest, c * double(mult));
        }
        return r;
    }

    // ids appearing in any term
    std::vector<int> support() const {
        std::vector<int> ids;
        for (const auto& [m, c] : terms_)
            for (int id : m)
                if (std::find(ids.begin(), ids.end(), id) == ids.end())
                    ids.push_back(id);
        return ids;
    }

    template <class Lookup>  // Lookup: int id -> cplx
    cplx eval(Lookup&& val) const {
        cplx s = 0.0;
        for (const auto& [m, c] : terms_) {
            cplx t = c;
            for (int id : m) t *= val(id);
            s += t;
        }
        return s;
    }

private:
    void add(const Mono& m, cplx c) {
        auto it = terms_.find(m);
        if (it == terms_.end()) {
            if (c != cplx(0.0)) terms_[m] = c;
        } else {
            it->second += c;
            if (std::abs(it->second) == 0.0) terms_.erase(it);
        }
    }
    std::map<Mono, cplx> terms_;
};

inline Poly operator*(cplx s, const Poly& p) { return p * s; }

}  // namespace stokeslab
