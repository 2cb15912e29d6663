#pragma once

// Arbitrary-precision reference for mixture posterior weights (MPFR, 200
// bits, roughly 60 decimal digits).

#include <mpfr.h>

#include <vector>

namespace oracle {

struct Component {
    double weight;
    double alpha;
    double beta;
};

class Mp {
   public:
    Mp() { mpfr_init2(v, 200); }
    explicit Mp(double d) : Mp() { mpfr_set_d(v, d, MPFR_RNDN); }
    Mp(const Mp& o) : Mp() { mpfr_set(v, o.v, MPFR_RNDN); }
    Mp& operator=(const Mp& o) {
        mpfr_set(v, o.v, MPFR_RNDN);
        return *this;
    }
    ~Mp() { mpfr_clear(v); }
    mpfr_t v;
};

inline Mp lbeta(const Mp& a, const Mp& b) {
    Mp r, t, s;
    mpfr_lngamma(r.v, a.v, MPFR_RNDN);
    mpfr_lngamma(t.v, b.v, MPFR_RNDN);
    mpfr_add(r.v, r.v, t.v, MPFR_RNDN);
    mpfr_add(s.v, a.v, b.v, MPFR_RNDN);
    mpfr_lngamma(t.v, s.v, MPFR_RNDN);
    mpfr_sub(r.v, r.v, t.v, MPFR_RNDN);
    return r;
}

/// w_c B(a_c + y, b_c + n - y) / B(a_c, b_c), normalized.
inline std::vector<double> posterior_weights(const std::vector<Component>& prior, long y, long n) {
    std::vector<Mp> logw;
    for (const auto& c : prior) {
        Mp a(c.alpha), b(c.beta), ay(c.alpha + static_cast<double>(y)), bf(c.beta + static_cast<double>(n - y));
        Mp lw = lbeta(ay, bf);
        Mp l0 = lbeta(a, b);
        mpfr_sub(lw.v, lw.v, l0.v, MPFR_RNDN);
        Mp w(c.weight);
        mpfr_log(w.v, w.v, MPFR_RNDN);
        mpfr_add(lw.v, lw.v, w.v, MPFR_RNDN);
        logw.push_back(lw);
    }
    Mp top = logw[0];
    for (const auto& l : logw) mpfr_max(top.v, top.v, l.v, MPFR_RNDN);
    Mp z(0.0);
    std::vector<Mp> ex;
    for (auto& l : logw) {
        Mp e;
        mpfr_sub(e.v, l.v, top.v, MPFR_RNDN);
        mpfr_exp(e.v, e.v, MPFR_RNDN);
        mpfr_add(z.v, z.v, e.v, MPFR_RNDN);
        ex.push_back(e);
    }
    std::vector<double> out;
    for (auto& e : ex) {
        mpfr_div(e.v, e.v, z.v, MPFR_RNDN);
        out.push_back(mpfr_get_d(e.v, MPFR_RNDN));
    }
    return out;
}

}  // namespace oracle
