#pragma once

#include <mpfr.h>

#include <algorithm>
#include <utility>

namespace paoi::detail {

/// Minimal RAII value type over mpfr_t. Results of binary operations carry
/// the larger operand precision; doubles are lifted at the thread-local
/// working precision set through PrecisionGuard.
class BigFloat {
public:
    static thread_local mpfr_prec_t working_prec;

    BigFloat() { mpfr_init2(v_, working_prec); mpfr_set_zero(v_, 1); }
    BigFloat(double d) { // NOLINT(google-explicit-constructor)
        mpfr_init2(v_, working_prec);
        mpfr_set_d(v_, d, MPFR_RNDN);
    }
    BigFloat(const BigFloat& o) {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    BigFloat(BigFloat&& o) noexcept {
        mpfr_init2(v_, MPFR_PREC_MIN);
        mpfr_swap(v_, o.v_);
    }
    BigFloat& operator=(BigFloat o) noexcept {
        mpfr_swap(v_, o.v_);
        return *this;
    }
    ~BigFloat() { mpfr_clear(v_); }

    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

    friend BigFloat operator+(const BigFloat& a, const BigFloat& b) {
        BigFloat r;
        mpfr_add(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }
    friend BigFloat operator-(const BigFloat& a, const BigFloat& b) {
        BigFloat r;
        mpfr_sub(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }
    friend BigFloat operator*(const BigFloat& a, const BigFloat& b) {
        BigFloat r;
        mpfr_mul(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }
    friend BigFloat operator/(const BigFloat& a, const BigFloat& b) {
        BigFloat r;
        mpfr_div(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }
    BigFloat operator-() const {
        BigFloat r(*this);
        mpfr_neg(r.v_, r.v_, MPFR_RNDN);
        return r;
    }
    BigFloat& operator+=(const BigFloat& o) {
        mpfr_add(v_, v_, o.v_, MPFR_RNDN);
        return *this;
    }
    BigFloat& operator*=(const BigFloat& o) {
        mpfr_mul(v_, v_, o.v_, MPFR_RNDN);
        return *this;
    }

    friend BigFloat exp(const BigFloat& a) {
        BigFloat r;
        mpfr_exp(r.v_, a.v_, MPFR_RNDN);
        return r;
    }
    friend double to_double(const BigFloat& a) { return a.to_double(); }

private:
    mpfr_t v_;
};

struct PrecisionGuard {
    explicit PrecisionGuard(mpfr_prec_t p) : saved(BigFloat::working_prec) {
        BigFloat::working_prec = std::max<mpfr_prec_t>(p, 64);
    }
    ~PrecisionGuard() { BigFloat::working_prec = saved; }
    mpfr_prec_t saved;
};

inline double to_double(double a) { return a; }

} // namespace paoi::detail
