#pragma once

// Truncated symbolic layer: normal-ordered monomials in the generators
// E_ij of gl_n, tensors with up to three legs, and formal series in the
// deformation parameter.  Straightening uses
//   [E_ab, E_cd] = delta_bc E_ad - delta_da E_cb
// and a fixed total order on generators (row-major index).  This is enough
// to express coproducts, the counit projection pi = id - eta eps, Drinfeld's
// subalgebra membership and the map into tensor powers of g.

#include <array>
#include <map>
#include <vector>

#include "lie.hpp"

namespace stokeslab {

namespace pbw {

using Mono = std::vector<int>;  // ascending generator ids, id = i*n + j

// single-leg element of the enveloping algebra
struct Element {
    int n = 0;
    std::map<Mono, cplx> terms;

    static Element one(int n) {
        Element e;
        e.n = n;
        e.terms[{}] = 1.0;
        return e;
    }
    static Element generator(int n, int i, int j) {
        Element e;
        e.n = n;
        e.terms[{i * n + j}] = 1.0;
        return e;
    }

    bool is_zero() const { return terms.empty(); }
    int degree() const {
        int d = 0;
        for (const auto& [m, c] : terms) d = std::max(d, (int)m.size());
        return d;
    }
    void add(const Mono& m, cplx c) {
        auto it = terms.find(m);
        if (it == terms.end()) {
            if (std::abs(c) != 0.0) terms[m] = c;
        } else {
            it->second += c;
            if (std::abs(it->second) < 1e-300) terms.erase(it);
        }
    }
    double norm() const {
        double s = 0;
        for (const auto& [m, c] : terms) s += std::norm(c);
        return std::sqrt(s);
    }
};

// straighten a word of generator ids into normal order, accumulating into out
inline void straighten(int n, std::vector<int> word, cplx coeff, Element& out,
                       int cap) {
    if ((int)word.size() > cap)
        throw DegreeOverflow("monomial degree exceeds the cap");
    for (size_t p = 0; p + 1 < word.size();) {
        if (word[p] <= word[p + 1]) {
            ++p;
            continue;
        }
        int a = word[p] / n, b = word[p] % n;
        int c = word[p + 1] / n, d = word[p + 1] % n;
        // E_ab E_cd = E_cd E_ab + delta_bc E_ad - delta_da E_cb
        std::swap(word[p], word[p + 1]);
        if (b == c) {
            std::vector<int> w2(word.begin(), word.begin() + p);
            w2.push_back(a * n + d);
            w2.insert(w2.end(), word.begin() + p + 2, word.end());
            straighten(n, std::move(w2), coeff, out, cap);
        }
        if (d == a) {
            std::vector<int> w2(word.begin(), word.begin() + p);
            w2.push_back(c * n + b);
            w2.insert(w2.end(), word.begin() + p + 2, word.end());
            straighten(n, std::move(w2), -coeff, out, cap);
        }
        p = p > 0 ? p - 1 : 0;
    }
    out.add(word, coeff);
}

inline Element normal_form(int n, const std::vector<int>& word, cplx coeff,
                           int cap = 4) {
    Element e;
    e.n = n;
    straighten(n, word, coeff, e, cap);
    return e;
}

inline Element mul(const Element& x, const Element& y, int cap = 4) {
    Element out;
    out.n = x.n;
    for (const auto& [mx, cx] : x.terms)
        for (const auto& [my, cy] : y.terms) {
            std::vector<int> w = mx;
            w.insert(w.end(), my.begin(), my.end());
            straighten(x.n, std::move(w), cx * cy, out, cap);
        }
    return out;
}

inline Element add(const Element& x, const Element& y) {
    Element out = x;
    for (const auto& [m, c] : y.terms) out.add(m, c);
    return out;
}

inline Element scale(const Element& x, cplx s) {
    Element out;
    out.n = x.n;
    if (std::abs(s) == 0.0) return out;
    for (const auto& [m, c] : x.terms) out.terms[m] = c * s;
    return out;
}

inline cplx counit(const Element& x) {
    auto it = x.terms.find({});
    return it == x.terms.end() ? cplx(0.0) : it->second;
}

// pi = id - unit . counit
inline Element project(const Element& x) {
    Element out = x;
    out.terms.erase(Mono{});
    return out;
}

// ---------------------------------------------------------------------------
// Tensors with k legs, each leg an enveloping-algebra monomial.

struct Tensor {
    int n = 0;
    int legs = 1;
    std::map<std::vector<Mono>, cplx> terms;  // key size == legs

    static Tensor one(int n, int legs) {
        Tensor t;
        t.n = n;
        t.legs = legs;
        t.terms[std::vector<Mono>(legs)] = 1.0;
        return t;
    }

    bool is_zero() const { return terms.empty(); }
    void add(const std::vector<Mono>& key, cplx c) {
        auto it = terms.find(key);
        if (it == terms.end()) {
            if (std::abs(c) != 0.0) terms[key] = c;
        } else {
            it->second += c;
            if (std::abs(it->second) < 1e-300) terms.erase(it);
        }
    }
    double norm() const {
        double s = 0;
        for (const auto& [m, c] : terms) s += std::norm(c);
        return std::sqrt(s);
    }
    int leg_degree(int leg) const {
        int d = 0;
        for (const auto& [m, c] : terms) d = std::max(d, (int)m[leg].size());
        return d;
    }
    // filtration degree: max total degree across legs
    int total_degree() const {
        int d = 0;
        for (const auto& [m, c] : terms) {
            int s = 0;
            for (const Mono& leg : m) s += (int)leg.size();
            d = std::max(d, s);
        }
        return d;
    }
};

inline Tensor add(const Tensor& x, const Tensor& y) {
    Tensor out = x;
    for (const auto& [m, c] : y.terms) out.add(m, c);
    return out;
}

inline Tensor scale(const Tensor& x, cplx s) {
    Tensor out;
    out.n = x.n;
    out.legs = x.legs;
    if (std::abs(s) == 0.0) return out;
    for (const auto& [m, c] : x.terms) out.terms[m] = c * s;
    return out;
}

inline Tensor sub(const Tensor& x, const Tensor& y) { return add(x, scale(y, -1.0)); }

// leg-wise product with straightening in every leg
inline Tensor mul(const Tensor& x, const Tensor& y, int cap = 4) {
    Tensor out;
    out.n = x.n;
    out.legs = x.legs;
    for (const auto& [mx, cx] : x.terms)
        for (const auto& [my, cy] : y.terms) {
            // straighten each leg independently, then distribute
            std::vector<Element> legs(x.legs);
            for (int l = 0; l < x.legs; ++l) {
                std::vector<int> w = mx[l];
                w.insert(w.end(), my[l].begin(), my[l].end());
                legs[l] = normal_form(x.n, w, 1.0, cap);
            }
            std::vector<std::vector<Mono>> keys{{}};
            std::vector<cplx> coefs{cx * cy};
            for (int l = 0; l < x.legs; ++l) {
                std::vector<std::vector<Mono>> nk;
                std::vector<cplx> nc;
                for (size_t t = 0; t < keys.size(); ++t)
                    for (const auto& [m, c] : legs[l].terms) {
                        auto k = keys[t];
                        k.push_back(m);
                        nk.push_back(std::move(k));
                        nc.push_back(coefs[t] * c);
                    }
                keys = std::move(nk);
                coefs = std::move(nc);
            }
            for (size_t t = 0; t < keys.size(); ++t) out.add(keys[t], coefs[t]);
        }
    return out;
}

// embed a single-leg element as the given leg of a k-leg tensor
inline Tensor embed(const Element& x, int legs, int leg) {
    Tensor out;
    out.n = x.n;
    out.legs = legs;
    for (const auto& [m, c] : x.terms) {
        std::vector<Mono> key(legs);
        key[leg] = m;
        out.terms[key] = c;
    }
    return out;
}

// coproduct applied to one leg: k legs -> k+1 legs, the chosen leg splits
// into legs (leg, leg+1).  Delta(E) = E (x) 1 + 1 (x) E as an algebra map.
inline Tensor coproduct(const Tensor& x, int leg, int cap = 4) {
    Tensor out;
    out.n = x.n;
    out.legs = x.legs + 1;
    for (const auto& [m, c] : x.terms) {
        // expand the chosen leg's monomial over all subsets
        const Mono& w = m[leg];
        int k = (int)w.size();
        for (int mask = 0; mask < (1 << k); ++mask) {
            std::vector<int> wa, wb;
            for (int p = 0; p < k; ++p)
                ((mask >> p) & 1 ? wa : wb).push_back(w[p]);
            Element ea = normal_form(x.n, wa, 1.0, cap);
            Element eb = normal_form(x.n, wb, 1.0, cap);
            for (const auto& [ma, ca] : ea.terms)
                for (const auto& [mb, cb] : eb.terms) {
                    std::vector<Mono> key;
                    key.reserve(x.legs + 1);
                    for (int l = 0; l < x.legs; ++l) {
                        if (l == leg) {
                            key.push_back(ma);
                            key.push_back(mb);
                        } else {
                            key.push_back(m[l]);
                        }
                    }
                    out.add(key, c * ca * cb);
                }
        }
    }
    return out;
}

// pi applied to every leg
inline Tensor project_all(const Tensor& x) {
    Tensor out;
    out.n = x.n;
    out.legs = x.legs;
    for (const auto& [m, c] : x.terms) {
        bool keep = true;
        for (const Mono& leg : m)
            if (leg.empty()) keep = false;
        if (keep) out.add(m, c);
    }
    return out;
}

// pi^{(x)n} Delta^{(n)} of a single-leg element
inline Tensor pi_delta_n(const Element& x, int nfold, int cap = 4) {
    Tensor t = embed(x, 1, 0);
    for (int k = 1; k < nfold; ++k) t = coproduct(t, 0, cap);
    return project_all(t);
}

// ---------------------------------------------------------------------------
// Series in the deformation parameter (coefficients of hbar^m, m <= N).

struct Series {
    int n = 0;
    int legs = 1;
    std::vector<Tensor> c;  // c[m], all with the same leg count

    static Series zero(int n, int legs, int N) {
        Series s;
        s.n = n;
        s.legs = legs;
        s.c.assign(N + 1, Tensor{});
        for (auto& t : s.c) {
            t.n = n;
            t.legs = legs;
        }
        return s;
    }
    int order() const { return (int)c.size() - 1; }
};

struct MembershipWitness {
    bool delta_criterion;       // pi^{(x)n} Delta^{(n)}(x_m) = 0 for m < n
    bool filtration_criterion;  // total degree of x_m <= m
    int failing_order = -1;
};

// both characterizations of Drinfeld's subalgebra, checked up to 3-fold
// coproducts; they must agree
inline MembershipWitness uprime_membership(const Series& x, int cap = 4) {
    MembershipWitness w{true, true, -1};
    for (int m = 0; m <= x.order(); ++m) {
        if (x.c[m].total_degree() > m) {
            w.filtration_criterion = false;
            if (w.failing_order < 0) w.failing_order = m;
        }
        for (int nfold = m + 1; nfold <= 3; ++nfold) {
            // x_m is single-leg by convention here
            Element e;
            e.n = x.n;
            for (const auto& [key, cc] : x.c[m].terms) e.add(key[0], cc);
            if (pi_delta_n(e, nfold, cap).norm() > 1e-12) {
                w.delta_criterion = false;
                if (w.failing_order < 0) w.failing_order = m;
            }
        }
    }
    return w;
}

// i_Delta: component n is pi^{(x)n} Delta^{(n)}(x_n) at hbar = 0; each
// component must have degree one in every leg (i.e. lie in g^{(x)n})
struct IDeltaComponents {
    cplx c0;                      // counit of x_0
    std::vector<Tensor> higher;   // n = 1, 2, ...
};

inline IDeltaComponents i_delta(const Series& x, int n_max, int cap = 4) {
    MembershipWitness w = uprime_membership(x, cap);
    if (!w.delta_criterion || !w.filtration_criterion)
        throw NotInDualSubalgebra("element fails the membership criteria");
    IDeltaComponents out;
    Element e0;
    e0.n = x.n;
    for (const auto& [key, cc] : x.c[0].terms) e0.add(key[0], cc);
    out.c0 = counit(e0);
    for (int nfold = 1; nfold <= n_max; ++nfold) {
        if (nfold > x.order()) {
            Tensor t;
            t.n = x.n;
            t.legs = nfold;
            out.higher.push_back(t);
            continue;
        }
        Element e;
        e.n = x.n;
        for (const auto& [key, cc] : x.c[nfold].terms) e.add(key[0], cc);
        Tensor t = pi_delta_n(e, nfold, cap);
        for (int l = 0; l < nfold; ++l)
            if (t.leg_degree(l) > 1)
                throw NotInDualSubalgebra("component leaves g in some leg");
        out.higher.push_back(t);
    }
    return out;
}

// two-leg tensor of matrices <-> the n^2 x n^2 representation
inline Tensor from_tensor2(const Tensor2& t) {
    Tensor out;
    out.n = t.n();
    out.legs = 2;
    int n = t.n();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    cplx c = t.coeff(i, j, k, l);
                    if (std::abs(c) != 0.0)
                        out.add({{i * n + j}, {k * n + l}}, c);
                }
    return out;
}

}  // namespace pbw

}  // namespace stokeslab
