#include "coherence/polynomial.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "coherence/error.hpp"

namespace coherence {

Polynomial::Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
    for (double c : coeffs_) {
        if (!std::isfinite(c)) throw Error(ErrorKind::InvalidArgument, "polynomial coefficient is not finite");
    }
    strip();
}

Polynomial Polynomial::monomial(int degree, double c) {
    if (degree < 0) throw Error(ErrorKind::InvalidArgument, "negative monomial degree");
    std::vector<double> v(static_cast<std::size_t>(degree) + 1, 0.0);
    v.back() = c;
    return Polynomial(std::move(v));
}

void Polynomial::strip() {
    while (!coeffs_.empty() && coeffs_.back() == 0.0) coeffs_.pop_back();
}

double Polynomial::max_abs() const noexcept {
    double m = 0.0;
    for (double c : coeffs_) m = std::max(m, std::abs(c));
    return m;
}

double Polynomial::operator()(double x) const noexcept {
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
    return acc;
}

Complex Polynomial::operator()(Complex s) const noexcept {
    Complex acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * s + *it;
    return acc;
}

Polynomial Polynomial::derivative() const {
    if (coeffs_.size() <= 1) return {};
    std::vector<double> d(coeffs_.size() - 1);
    for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = static_cast<double>(k) * coeffs_[k];
    return Polynomial(std::move(d));
}

Polynomial Polynomial::monic() const {
    if (is_zero()) throw Error(ErrorKind::ZeroFunction, "cannot normalize the zero polynomial");
    return scaled(1.0 / leading());
}

Polynomial Polynomial::scaled(double c) const {
    std::vector<double> v(coeffs_);
    for (double& x : v) x *= c;
    return Polynomial(std::move(v));
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<double> v(std::max(a.coeffs_.size(), b.coeffs_.size()), 0.0);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = a[k] + b[k];
    return Polynomial(std::move(v));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) {
    std::vector<double> v(std::max(a.coeffs_.size(), b.coeffs_.size()), 0.0);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = a[k] - b[k];
    return Polynomial(std::move(v));
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<double> v(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
        for (std::size_t j = 0; j < b.coeffs_.size(); ++j) v[i + j] += a.coeffs_[i] * b.coeffs_[j];
    }
    return Polynomial(std::move(v));
}

std::pair<Polynomial, Polynomial> divmod(const Polynomial& a, const Polynomial& b) {
    if (b.is_zero()) throw Error(ErrorKind::ZeroFunction, "polynomial division by zero");
    if (a.degree() < b.degree()) return {Polynomial{}, a};
    std::vector<double>       rem(a.coeffs());
    const std::vector<double>& den = b.coeffs();
    const std::size_t          nb  = den.size();
    std::vector<double>        quot(rem.size() - nb + 1, 0.0);
    for (std::size_t k = quot.size(); k-- > 0;) {
        const double q = rem[k + nb - 1] / den.back();
        quot[k]        = q;
        for (std::size_t j = 0; j < nb; ++j) rem[k + j] -= q * den[j];
        rem[k + nb - 1] = 0.0;
    }
    rem.resize(nb - 1);
    return {Polynomial(std::move(quot)), Polynomial(std::move(rem))};
}

Polynomial gcd(const Polynomial& a, const Polynomial& b, double rel_tol) {
    if (a.is_zero() && b.is_zero()) throw Error(ErrorKind::ZeroFunction, "gcd of two zero polynomials");
    if (a.is_zero()) return b.monic();
    if (b.is_zero()) return a.monic();

    Polynomial x = a.scaled(1.0 / a.max_abs());
    Polynomial y = b.scaled(1.0 / b.max_abs());
    if (x.degree() < y.degree()) std::swap(x, y);

    while (true) {
        if (y.degree() == 0) return Polynomial::constant(1.0);
        auto [q, r]        = divmod(x, y);
        const double ref   = std::max(x.max_abs(), q.max_abs() * y.max_abs());
        const double floor = rel_tol * ref;
        std::vector<double> rc(r.coeffs());
        while (!rc.empty() && std::abs(rc.back()) <= floor) rc.pop_back();
        if (rc.empty()) return y.monic();
        Polynomial rem(std::move(rc));
        x = std::move(y);
        y = rem.scaled(1.0 / rem.max_abs());
    }
}

namespace {

// Parlett-Reinsch balancing with powers of two, so the eigenvalues are unchanged
// up to rounding while the companion matrix becomes much better conditioned.
void balance(Eigen::MatrixXd& m) {
    const Eigen::Index n      = m.rows();
    bool               done   = false;
    constexpr double   radix  = 2.0;
    constexpr double   radix2 = radix * radix;
    while (!done) {
        done = true;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double row = m.row(i).lpNorm<1>() - std::abs(m(i, i));
            const double col = m.col(i).lpNorm<1>() - std::abs(m(i, i));
            if (row == 0.0 || col == 0.0) continue;
            double       g = row / radix;
            double       f = 1.0;
            double       c = col;
            const double s = col + row;
            while (c < g) {
                f *= radix;
                c *= radix2;
            }
            g = row * radix;
            while (c > g) {
                f /= radix;
                c /= radix2;
            }
            if ((c + row) / f < 0.95 * s) {
                done = false;
                m.row(i) /= f;
                m.col(i) *= f;
            }
        }
    }
}

}  // namespace

std::vector<Complex> roots(const Polynomial& p) {
    if (p.degree() < 1) throw Error(ErrorKind::DegreeZero, "roots of a constant polynomial");
    const int       n = p.degree();
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) companion(i, n - 1) = -p[static_cast<std::size_t>(i)] / p.leading();
    balance(companion);

    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    if (solver.info() != Eigen::Success) throw Error(ErrorKind::InvalidArgument, "companion eigenvalue solve failed");

    const Polynomial     dp = p.derivative();
    std::vector<Complex> out;
    out.reserve(static_cast<std::size_t>(n));
    for (const Complex& z0 : solver.eigenvalues()) {
        // A couple of Newton steps; kept only while they reduce the residual.
        Complex z   = z0;
        double  res = std::abs(p(z));
        for (int it = 0; it < 3 && res > 0.0; ++it) {
            const Complex d = dp(z);
            if (d == 0.0) break;
            const Complex cand = z - p(z) / d;
            const double  cres = std::abs(p(cand));
            if (!(cres < res)) break;
            z   = cand;
            res = cres;
        }
        if (std::abs(z.imag()) <= 1e-14 * std::max(1.0, std::abs(z))) z.imag(0.0);
        out.push_back(z);
    }
    std::sort(out.begin(), out.end(), [](const Complex& a, const Complex& b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() > b.imag();
    });
    return out;
}

double exact_sum(std::span<const double> values) {
    // Shewchuk's non-overlapping partials with a final correctly rounded collapse.
    std::vector<double> partials;
    for (double v : values) {
        if (!std::isfinite(v)) {
            double naive = 0.0;
            for (double w : values) naive += w;
            return naive;
        }
        double      x = v;
        std::size_t i = 0;
        for (double y : partials) {
            if (std::abs(x) < std::abs(y)) std::swap(x, y);
            const double hi = x + y;
            const double lo = y - (hi - x);
            if (lo != 0.0) partials[i++] = lo;
            x = hi;
        }
        partials.resize(i);
        partials.push_back(x);
    }
    if (partials.empty()) return 0.0;

    std::size_t n  = partials.size() - 1;
    double      hi = partials[n];
    double      lo = 0.0;
    while (n > 0) {
        const double x = hi;
        const double y = partials[--n];
        hi             = x + y;
        lo             = y - (hi - x);
        if (lo != 0.0) break;
    }
    if (n > 0 && ((lo < 0.0 && partials[n - 1] < 0.0) || (lo > 0.0 && partials[n - 1] > 0.0))) {
        const double y = lo * 2.0;
        const double x = hi + y;
        if (y == x - hi) hi = x;
    }
    return hi;
}

Polynomial exact_sum(std::span<const Polynomial> terms) {
    std::size_t width = 0;
    for (const auto& t : terms) width = std::max(width, t.coeffs().size());
    std::vector<double> out(width, 0.0);
    std::vector<double> column(terms.size());
    for (std::size_t k = 0; k < width; ++k) {
        for (std::size_t i = 0; i < terms.size(); ++i) column[i] = terms[i][k];
        out[k] = exact_sum(column);
    }
    return Polynomial(std::move(out));
}

}  // namespace coherence
