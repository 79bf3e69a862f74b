#include "coherence/rational_function.hpp"

#include <algorithm>
#include <charconv>
#include <map>

#include "coherence/csv.hpp"
#include "coherence/error.hpp"

namespace coherence {

namespace {

// Power of two that brings |lead| into [1, 2), with the sign folded in.
double normalizer(double lead) {
    int exponent = 0;
    std::frexp(lead, &exponent);
    const double scale = std::ldexp(1.0, 1 - exponent);
    return lead < 0.0 ? -scale : scale;
}

}  // namespace

RationalFunction::RationalFunction(Polynomial num, Polynomial den) {
    if (den.is_zero()) throw Error(ErrorKind::ZeroFunction, "rational function with zero denominator");
    if (num.is_zero()) {
        den_ = Polynomial::constant(1.0);
        return;
    }
    if (num.degree() > 0 && den.degree() > 0) {
        const Polynomial g = gcd(num, den, kCancellationTolerance);
        if (g.degree() > 0) {
            num = divmod(num, g).first;
            den = divmod(den, g).first;
        }
    }
    const double k = normalizer(den.leading());
    num_           = num.scaled(k);
    den_           = den.scaled(k);
}

Complex RationalFunction::eval(Complex s) const {
    const Complex n = num_(s);
    const Complex d = den_(s);
    if (d == 0.0) {
        if (n == 0.0) throw Error(ErrorKind::Indeterminate, "0/0 evaluating a rational function");
        return kComplexInfinity;
    }
    return n / d;
}

RationalFunction RationalFunction::reciprocal() const {
    if (is_zero()) throw Error(ErrorKind::ZeroFunction, "reciprocal of the zero function");
    const double k = normalizer(num_.leading());
    return RationalFunction(Canonical{}, den_.scaled(k), num_.scaled(k));
}

RationalFunction RationalFunction::scaled(double c) const {
    if (c == 0.0 || is_zero()) return {};
    return RationalFunction(Canonical{}, num_.scaled(c), den_);
}

std::pair<Polynomial, Polynomial> RationalFunction::monic() const {
    const double lead = den_.leading();
    std::vector<double> n(num_.coeffs()), d(den_.coeffs());
    for (double& x : n) x /= lead;
    for (double& x : d) x /= lead;
    return {Polynomial(std::move(n)), Polynomial(std::move(d))};
}

std::vector<Complex> RationalFunction::poles() const {
    if (den_.degree() < 1) return {};
    return roots(den_);
}

std::vector<Complex> RationalFunction::zeros() const {
    if (num_.degree() < 1) return {};
    return roots(num_);
}

RationalFunction operator+(const RationalFunction& a, const RationalFunction& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.den_ == b.den_) return RationalFunction(a.num_ + b.num_, a.den_);
    return RationalFunction(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

RationalFunction operator-(const RationalFunction& a, const RationalFunction& b) { return a + b.scaled(-1.0); }

RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) {
    if (a.is_zero() || b.is_zero()) return {};
    return RationalFunction(a.num_ * b.num_, a.den_ * b.den_);
}

RationalFunction arithmetic(const RationalFunction& a, const RationalFunction& b, ArithmeticOp op) {
    return op == ArithmeticOp::add ? a + b : a * b;
}

RationalFunction inverse_sum(std::span<const RationalFunction> gs) {
    if (gs.empty()) throw Error(ErrorKind::InvalidArgument, "inverse_sum of an empty list");

    // Group reciprocals by denominator; std::map orders the groups canonically.
    std::map<std::vector<double>, std::vector<Polynomial>> groups;
    for (const auto& g : gs) {
        const RationalFunction inv = g.reciprocal();
        groups[inv.den().coeffs()].push_back(inv.num());
    }

    RationalFunction total;
    for (const auto& [den, nums] : groups) total = total + RationalFunction(exact_sum(nums), Polynomial(den));
    if (total.is_zero()) throw Error(ErrorKind::ZeroFunction, "sum of reciprocals vanishes identically");
    return total.reciprocal();
}

RationalFunction harmonic_mean(std::span<const RationalFunction> gs) {
    if (gs.empty()) throw Error(ErrorKind::InvalidArgument, "harmonic_mean of an empty list");
    for (const auto& g : gs) {
        if (g.is_zero()) throw Error(ErrorKind::ZeroFunction, "harmonic_mean over a zero transfer function");
    }
    if (std::all_of(gs.begin(), gs.end(), [&](const RationalFunction& g) { return g == gs.front(); })) {
        return gs.front();
    }
    return inverse_sum(gs).scaled(static_cast<double>(gs.size()));
}

namespace {

std::string list_text(const std::vector<double>& v) {
    std::string out = "[";
    if (v.empty()) out += "0";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += format_number(v[i], 15);
    }
    out += ']';
    return out;
}

std::vector<double> parse_list(std::string_view text, std::string_view key) {
    const auto at = text.find(key);
    if (at == std::string_view::npos) throw Error(ErrorKind::ConfigParse, "missing '" + std::string(key) + "' in rational text");
    const auto open  = text.find('[', at);
    const auto close = text.find(']', open);
    if (open == std::string_view::npos || close == std::string_view::npos) {
        throw Error(ErrorKind::ConfigParse, "malformed coefficient list for '" + std::string(key) + "'");
    }
    std::vector<double> out;
    std::string_view    body = text.substr(open + 1, close - open - 1);
    while (!body.empty()) {
        while (!body.empty() && (body.front() == ' ' || body.front() == ',')) body.remove_prefix(1);
        if (body.empty()) break;
        if (body.front() == '+') body.remove_prefix(1);
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
        if (ec != std::errc()) throw Error(ErrorKind::ConfigParse, "bad number in coefficient list '" + std::string(body) + "'");
        body.remove_prefix(static_cast<std::size_t>(ptr - body.data()));
        out.push_back(value);
    }
    return out;
}

}  // namespace

std::string to_text(const RationalFunction& r) {
    if (r.is_zero()) return "num=[0], den=[1]";
    const double        lead = r.num().leading();
    std::vector<double> n(r.num().coeffs()), d(r.den().coeffs());
    for (double& x : n) x /= lead;
    for (double& x : d) x /= lead;
    return "num=" + list_text(n) + ", den=" + list_text(d);
}

RationalFunction parse_rational(std::string_view text) {
    const auto num_at = text.find("num");
    const auto den_at = text.find("den");
    if (num_at == std::string_view::npos || den_at == std::string_view::npos) {
        throw Error(ErrorKind::ConfigParse, "expected 'num=[...], den=[...]'");
    }
    return RationalFunction(parse_list(text, "num"), parse_list(text, "den"));
}

}  // namespace coherence
