#include "paoi/core.hpp"

#include <cmath>
#include <string>

namespace paoi {

namespace {

void check_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument(std::string(name) + " must be positive and finite");
    }
}

} // namespace

TandemParams::TandemParams(double lambda, double mu1, ServerSpec second)
    : lambda_(lambda), mu1_(mu1), second_(second) {
    check_positive(lambda, "lambda");
    check_positive(mu1, "mu1");
    if (second_is_deterministic()) {
        check_positive(std::get<DeterministicService>(second_).duration, "service D");
    } else {
        check_positive(std::get<ExponentialService>(second_).rate, "mu2");
    }
}

TandemParams TandemParams::md1(double lambda, double mu1, double service_d) {
    return TandemParams(lambda, mu1, DeterministicService{service_d});
}

TandemParams TandemParams::mm1(double lambda, double mu1, double mu2) {
    return TandemParams(lambda, mu1, ExponentialService{mu2});
}

bool TandemParams::second_is_deterministic() const {
    return std::holds_alternative<DeterministicService>(second_);
}

double TandemParams::service_d() const {
    if (!second_is_deterministic()) {
        throw std::logic_error("second server is exponential, no deterministic service time");
    }
    return std::get<DeterministicService>(second_).duration;
}

double TandemParams::mu2() const {
    if (second_is_deterministic()) {
        throw std::logic_error("second server is deterministic, no exponential rate");
    }
    return std::get<ExponentialService>(second_).rate;
}

double TandemParams::rho2() const {
    return second_is_deterministic() ? lambda_ * service_d() : lambda_ / mu2();
}

bool TandemParams::stable() const {
    return lambda_ < mu1_ && rho2() < 1.0;
}

void TandemParams::require_stable() const {
    if (!stable()) {
        throw UnstableParamsError("unstable tandem parameters: require lambda < mu1 and "
                                  "second-server utilization < 1");
    }
}

char to_char(CaseLabel c) {
    switch (c) {
    case CaseLabel::A: return 'A';
    case CaseLabel::B: return 'B';
    case CaseLabel::C: return 'C';
    case CaseLabel::D: return 'D';
    }
    return '?';
}

CaseLabel case_from_char(char c) {
    switch (c) {
    case 'A': return CaseLabel::A;
    case 'B': return CaseLabel::B;
    case 'C': return CaseLabel::C;
    case 'D': return CaseLabel::D;
    default: throw std::invalid_argument("unknown case label");
    }
}

CaseLabel classify_case(double omega1, double omega2) {
    if (omega1 > 0.0) {
        return omega2 > 0.0 ? CaseLabel::A : CaseLabel::B;
    }
    return omega2 > 0.0 ? CaseLabel::C : CaseLabel::D;
}

double paoi_from_record(double y, double t1, double t2) {
    return y + t1 + t2;
}

} // namespace paoi
